//! Readers for the text artifacts written by earlier stages.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use crate::cliques::TemporalClique;
use crate::coauthor::{AuthorPair, PairTimeline, PairTimelines};
use crate::corpus::PublicationTable;
use crate::overlap::{
    Impulse, ImpulseCounts, ImpulseSummary, OverlapKind, OverlapRelation, Timing, IMPULSE_COLUMNS,
};
use crate::persistence::{PersistentEdge, PersistentNetwork};
use crate::success::{SuccessTag, SuccessTags};
use crate::teams::Team;
use crate::{AuthorId, Span, TeamId, Year};

use super::PipelineError;

struct Rows {
    path: String,
    reader: csv::Reader<BufReader<File>>,
    record: csv::StringRecord,
}

impl Rows {
    fn open(path: &Path, header: &[&str]) -> Result<Self, PipelineError> {
        let file = File::open(path).map_err(|e| PipelineError::io(path, e))?;
        let mut reader = csv::Reader::from_reader(BufReader::with_capacity(1 << 20, file));
        let shown = path.display().to_string();
        let got: Vec<String> = reader
            .headers()
            .map_err(|e| PipelineError::artifact(&shown, 1, e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        if got != header {
            return Err(PipelineError::artifact(&shown, 1, format!("expected header {}", header.join(","))));
        }
        Ok(Rows { path: shown, reader, record: csv::StringRecord::new() })
    }

    fn next(&mut self) -> Result<Option<&csv::StringRecord>, PipelineError> {
        let more = self
            .reader
            .read_record(&mut self.record)
            .map_err(|e| PipelineError::artifact(&self.path, 0, e.to_string()))?;
        Ok(more.then_some(&self.record))
    }

    fn line(&self) -> usize {
        self.record.position().map_or(0, |p| p.line() as usize)
    }

    fn err(&self, message: impl Into<String>) -> PipelineError {
        PipelineError::artifact(&self.path, self.line(), message)
    }

    fn field<T: std::str::FromStr>(&self, i: usize) -> Result<T, PipelineError> {
        let raw = self.record.get(i).unwrap_or("");
        raw.parse().map_err(|_| self.err(format!("column {} has unparsable value {raw:?}", i + 1)))
    }

    fn author(&self, pubs: &PublicationTable, name: &str) -> Result<AuthorId, PipelineError> {
        pubs.author_id(name).ok_or_else(|| self.err(format!("unknown author {name:?}")))
    }

    fn members(&self, pubs: &PublicationTable, i: usize) -> Result<Vec<AuthorId>, PipelineError> {
        let mut out: Vec<AuthorId> =
            self.record[i].split(';').map(|n| self.author(pubs, n)).collect::<Result<_, _>>()?;
        out.sort_unstable();
        Ok(out)
    }

    fn spans(&self, i: usize) -> Result<Vec<Span>, PipelineError> {
        self.record[i]
            .split(';')
            .map(|s| Span::parse(s).ok_or_else(|| self.err(format!("bad span {s:?}"))))
            .collect()
    }
}

pub fn read_success_tags(path: &Path, pubs: &PublicationTable) -> Result<SuccessTags, PipelineError> {
    let mut rows = Rows::open(path, &["pub_id", "citations_3y", "top10", "top1"])?;
    let mut tags = Vec::with_capacity(pubs.len());
    while rows.next()?.is_some() {
        let i = tags.len();
        if i >= pubs.len() || rows.record[0] != *pubs.get(crate::PubIdx::from(i)).pub_id {
            return Err(rows.err("success tags out of step with publications.jsonl"));
        }
        let flag = |c: usize| rows.field::<u8>(c).map(|v| v == 1);
        tags.push(SuccessTag { citations_3y: rows.field(1)?, top10: flag(2)?, top1: flag(3)? });
    }
    if tags.len() != pubs.len() {
        return Err(rows.err(format!("{} tags for {} publications", tags.len(), pubs.len())));
    }
    Ok(SuccessTags::from_tags(tags))
}

pub fn read_pair_timelines(path: &Path, pubs: &PublicationTable) -> Result<PairTimelines, PipelineError> {
    let mut rows = Rows::open(path, &["author_a", "author_b", "years"])?;
    let mut out: Vec<PairTimeline> = Vec::new();
    while rows.next()?.is_some() {
        let pair = AuthorPair::new(rows.author(pubs, &rows.record[0])?, rows.author(pubs, &rows.record[1])?);
        let years = rows.record[2]
            .split(';')
            .map(|y| y.parse::<Year>().map_err(|_| rows.err(format!("bad year {y:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if out.last().is_some_and(|t| t.pair >= pair) {
            return Err(rows.err("pairs out of order"));
        }
        out.push(PairTimeline { pair, years });
    }
    Ok(PairTimelines::from_sorted(out))
}

pub fn read_persistent_network(path: &Path, pubs: &PublicationTable) -> Result<PersistentNetwork, PipelineError> {
    let mut rows = Rows::open(path, &["author_a", "author_b", "periods"])?;
    let mut edges = Vec::new();
    while rows.next()?.is_some() {
        let pair = AuthorPair::new(rows.author(pubs, &rows.record[0])?, rows.author(pubs, &rows.record[1])?);
        edges.push(PersistentEdge { pair, periods: rows.spans(2)? });
    }
    Ok(PersistentNetwork::from_edges(edges))
}

pub fn read_cliques(path: &Path, pubs: &PublicationTable) -> Result<Vec<TemporalClique>, PipelineError> {
    let mut rows = Rows::open(path, &["members", "start", "end"])?;
    let mut out = Vec::new();
    while rows.next()?.is_some() {
        let (s, e): (Year, Year) = (rows.field(1)?, rows.field(2)?);
        if s > e {
            return Err(rows.err("start after end"));
        }
        out.push(TemporalClique { members: rows.members(pubs, 0)?, span: Span::new(s, e) });
    }
    Ok(out)
}

pub const TEAM_COLUMNS: [&str; 12] = [
    "team_id",
    "members",
    "intervals",
    "duration_start",
    "duration_end",
    "n_pubs",
    "n_top10",
    "n_top1",
    "orgs_pm",
    "cities_pm",
    "countries_pm",
    "dist_pm",
];

/// Teams with their publications, from `teams.csv` and `team_pubs.csv`.
pub fn read_teams(teams_path: &Path, team_pubs_path: &Path, pubs: &PublicationTable) -> Result<Vec<Team>, PipelineError> {
    let mut rows = Rows::open(teams_path, &TEAM_COLUMNS)?;
    let mut teams: Vec<Team> = Vec::new();
    while rows.next()?.is_some() {
        let id: u32 = rows.field(0)?;
        if id as usize != teams.len() {
            return Err(rows.err(format!("team ids must run 0.. in order, found {id}")));
        }
        let intervals = rows.spans(2)?;
        let duration = Span::new(rows.field(3)?, rows.field(4)?);
        teams.push(Team { id: TeamId(id), members: rows.members(pubs, 1)?, intervals, duration, pubs: Vec::new() });
    }
    let mut rows = Rows::open(team_pubs_path, &["team_id", "pub_id"])?;
    while rows.next()?.is_some() {
        let id: usize = rows.field(0)?;
        let p = pubs.pub_idx(&rows.record[1]).ok_or_else(|| rows.err(format!("unknown publication {:?}", &rows.record[1])))?;
        let team = teams.get_mut(id).ok_or_else(|| rows.err(format!("unknown team {id}")))?;
        team.pubs.push(p);
    }
    for t in &mut teams {
        t.pubs.sort_unstable();
    }
    Ok(teams)
}

pub fn read_overlaps(path: &Path) -> Result<Vec<OverlapRelation>, PipelineError> {
    let mut rows = Rows::open(path, &["focal_id", "other_id", "kind", "timing", "impulse"])?;
    let mut out = Vec::new();
    while rows.next()?.is_some() {
        let kind = OverlapKind::parse(&rows.record[2]).ok_or_else(|| rows.err("bad kind"))?;
        let timing = Timing::parse(&rows.record[3]).ok_or_else(|| rows.err("bad timing"))?;
        let impulse = Impulse::parse(&rows.record[4]).ok_or_else(|| rows.err("bad impulse"))?;
        out.push(OverlapRelation { focal: TeamId(rows.field(0)?), other: TeamId(rows.field(1)?), kind, timing, impulse });
    }
    Ok(out)
}

/// Impulse summaries from `impulses.csv`; the per-year rate is recomputed
/// from the counts and team durations.
pub fn read_impulses(path: &Path, teams: &[Team]) -> Result<Vec<ImpulseSummary>, PipelineError> {
    let mut rows = Rows::open(path, &IMPULSE_COLUMNS)?;
    let mut out = Vec::with_capacity(teams.len());
    while rows.next()?.is_some() {
        let id: usize = rows.field(0)?;
        let team = teams.get(id).filter(|_| id == out.len()).ok_or_else(|| rows.err("team ids out of step with teams.csv"))?;
        let counts = |c: usize| -> Result<ImpulseCounts, PipelineError> {
            Ok(ImpulseCounts { total: rows.field(c)?, from_top10: rows.field(c + 1)?, from_top1: rows.field(c + 2)? })
        };
        let mut s = ImpulseSummary { team: team.id, ..Default::default() };
        s.persistence = counts(1)?;
        s.early_persistence_top10 = rows.field(4)?;
        s.early_persistence_top1 = rows.field(5)?;
        s.synchronous = counts(6)?;
        s.freshness = counts(9)?;
        s.impulses_per_year = f64::from(s.total()) / f64::from(team.duration_years());
        out.push(s);
    }
    if out.len() != teams.len() {
        return Err(rows.err(format!("{} impulse rows for {} teams", out.len(), teams.len())));
    }
    Ok(out)
}

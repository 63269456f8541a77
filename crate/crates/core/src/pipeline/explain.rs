//! Human-readable account of why one team exists.

use std::fmt::Write as _;
use std::path::Path;

use crate::coauthor::AuthorPair;
use crate::corpus::{load_publications, IngestConfig};
use crate::Year;

use super::{
    read_overlaps, read_pair_timelines, read_persistent_network, read_success_tags, read_teams, PipelineError, Stage,
    OVERLAPS, PAIR_TIMELINES, PERSISTENT_EDGES, PUBLICATIONS, SUCCESS_TAGS, TEAMS, TEAM_PUBS,
};

fn need(dir: &Path, file: &str) -> Result<std::path::PathBuf, PipelineError> {
    let p = dir.join(file);
    if p.exists() {
        Ok(p)
    } else {
        Err(PipelineError::MissingArtifact { stage: Stage::producer(file).unwrap(), file: file.to_string() })
    }
}

fn years_list(years: &[Year]) -> String {
    years.iter().map(Year::to_string).collect::<Vec<_>>().join(",")
}

/// Members, intervals, the persistent pair periods behind them, the team's
/// publications with their tags, and its overlap relations.
pub fn explain_team(out_dir: &Path, team_id: &str) -> Result<String, PipelineError> {
    let (pubs, _) = load_publications(&need(out_dir, PUBLICATIONS)?, &IngestConfig { window: None })?;
    let teams = read_teams(&need(out_dir, TEAMS)?, &need(out_dir, TEAM_PUBS)?, &pubs)?;
    let team = team_id
        .parse::<usize>()
        .ok()
        .and_then(|i| teams.get(i))
        .ok_or_else(|| PipelineError::UnknownTeam(team_id.to_string()))?;
    let tags = read_success_tags(&need(out_dir, SUCCESS_TAGS)?, &pubs)?;
    let timelines = read_pair_timelines(&need(out_dir, PAIR_TIMELINES)?, &pubs)?;
    let net = read_persistent_network(&need(out_dir, PERSISTENT_EDGES)?, &pubs)?;
    let relations = read_overlaps(&need(out_dir, OVERLAPS)?)?;

    let name = |a| pubs.author_name(a);
    let mut s = String::new();
    let members: Vec<&str> = team.members.iter().map(|&a| name(a)).collect();
    let _ = writeln!(s, "team {}: {}", team.id.0, members.join(", "));
    let intervals: Vec<String> = team.intervals.iter().map(|i| i.to_string()).collect();
    let _ = writeln!(s, "intervals: {}", intervals.join(", "));
    let _ = writeln!(s, "duration: {} ({} years)", team.duration, team.duration_years());

    let _ = writeln!(s, "pairs:");
    for (i, &a) in team.members.iter().enumerate() {
        for &b in &team.members[i + 1..] {
            let pair = AuthorPair::new(a, b);
            let periods = net
                .get(pair)
                .map(|e| e.periods.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "))
                .unwrap_or_default();
            let years = timelines.get(pair).map(|t| years_list(&t.years)).unwrap_or_default();
            let _ = writeln!(s, "  {} - {}: persistent {periods}; joint years {years}", name(a), name(b));
        }
    }

    let _ = writeln!(s, "publications ({}):", team.pubs.len());
    for &p in &team.pubs {
        let publ = pubs.get(p);
        let tag = tags.get(p);
        let mut marks = String::new();
        if tag.top10 {
            marks.push_str(" top10");
        }
        if tag.top1 {
            marks.push_str(" top1");
        }
        let _ = writeln!(s, "  {} {} citations_3y={}{marks}", publ.pub_id, publ.year, tag.citations_3y);
    }

    let _ = writeln!(s, "relations:");
    let mut any = false;
    for r in relations.iter().filter(|r| r.focal == team.id || r.other == team.id) {
        any = true;
        let _ = writeln!(
            s,
            "  focal {} other {}: {} {} -> {}",
            r.focal.0,
            r.other.0,
            r.kind.as_str(),
            r.timing.as_str(),
            r.impulse.as_str()
        );
    }
    if !any {
        let _ = writeln!(s, "  none");
    }
    Ok(s)
}

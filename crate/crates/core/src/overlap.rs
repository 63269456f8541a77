//! Team overlaps: candidate discovery, classification into kind and timing,
//! and per-team impulse summaries.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::success::Percentile;
use crate::teams::{Team, TeamSuccess};
use crate::{AuthorId, Span, TeamId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OverlapKind {
    /// Other team's members are a proper subset of the focal team's.
    Core,
    /// Other team's members are a proper superset of the focal team's.
    Extension,
    OffshootSharedCore,
    OffshootNoSharedCore,
}

impl OverlapKind {
    pub const ALL: [OverlapKind; 4] =
        [OverlapKind::Core, OverlapKind::Extension, OverlapKind::OffshootSharedCore, OverlapKind::OffshootNoSharedCore];

    pub fn as_str(&self) -> &'static str {
        match self {
            OverlapKind::Core => "core",
            OverlapKind::Extension => "extension",
            OverlapKind::OffshootSharedCore => "offshoot_shared_core",
            OverlapKind::OffshootNoSharedCore => "offshoot_no_shared_core",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        OverlapKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Timing {
    Preceding,
    Simultaneous,
    Succeeding,
}

impl Timing {
    pub const ALL: [Timing; 3] = [Timing::Preceding, Timing::Simultaneous, Timing::Succeeding];

    /// Compares duration starts of the other team against the focal team.
    pub fn of(focal: &Team, other: &Team) -> Timing {
        match other.duration.start.cmp(&focal.duration.start) {
            std::cmp::Ordering::Less => Timing::Preceding,
            std::cmp::Ordering::Equal => Timing::Simultaneous,
            std::cmp::Ordering::Greater => Timing::Succeeding,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Timing::Preceding => "preceding",
            Timing::Simultaneous => "simultaneous",
            Timing::Succeeding => "succeeding",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Timing::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Impulse {
    Persistence,
    Synchronous,
    Freshness,
    None,
}

impl Impulse {
    pub const ALL: [Impulse; 4] = [Impulse::Persistence, Impulse::Synchronous, Impulse::Freshness, Impulse::None];
    /// The three impulse types that count.
    pub const COUNTED: [Impulse; 3] = [Impulse::Persistence, Impulse::Synchronous, Impulse::Freshness];

    pub fn as_str(&self) -> &'static str {
        match self {
            Impulse::Persistence => "persistence",
            Impulse::Synchronous => "synchronous",
            Impulse::Freshness => "freshness",
            Impulse::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Impulse::ALL.into_iter().find(|i| i.as_str() == s)
    }
}

impl fmt::Display for OverlapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Timing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Impulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Impulse of a (kind, timing) cell, or `None` for the two impossible cells.
pub fn cell_impulse(kind: OverlapKind, timing: Timing) -> Option<Impulse> {
    use OverlapKind::*;
    use Timing::*;
    match (kind, timing) {
        (Core, Succeeding) | (Extension, Preceding) => None,
        (Core, Simultaneous) | (OffshootSharedCore, Preceding) => Some(Impulse::None),
        (_, Preceding) => Some(Impulse::Persistence),
        (_, Simultaneous) => Some(Impulse::Synchronous),
        (_, Succeeding) => Some(Impulse::Freshness),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OverlapRelation {
    pub focal: TeamId,
    pub other: TeamId,
    pub kind: OverlapKind,
    pub timing: Timing,
    pub impulse: Impulse,
}

/// A subset pair whose duration spans break the containment expected of
/// single-interval cliques. Only disconnected periods can cause this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct OverlapAnomaly {
    pub focal: TeamId,
    pub other: TeamId,
    /// `Core` or `Extension`: the member-set relation that was checked.
    pub relation: OverlapKind,
    pub focal_span: Span,
    pub other_span: Span,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OverlapError {
    #[error("teams {focal:?} and {other:?} landed in impossible cell {kind}/{timing}")]
    InfeasibleCell { focal: TeamId, other: TeamId, kind: OverlapKind, timing: Timing },
    #[error("teams {0:?} and {1:?} share an identical member set")]
    DuplicateMembers(TeamId, TeamId),
}

fn intersection_size(a: &[AuthorId], b: &[AuthorId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn is_subset(small: &[AuthorId], big: &[AuthorId]) -> bool {
    small.len() <= big.len() && intersection_size(small, big) == small.len()
}

/// Enough shared members: at least half of the larger member set.
pub fn is_candidate(focal: &Team, other: &Team) -> bool {
    focal.id != other.id && 2 * intersection_size(&focal.members, &other.members) >= focal.size().max(other.size())
}

/// Member to teams lookup.
#[derive(Debug, Clone, Default)]
pub struct OverlapIndex {
    offsets: Vec<usize>,
    teams: Vec<TeamId>,
}

impl OverlapIndex {
    pub fn build(teams: &[Team]) -> Self {
        let n_authors = teams.iter().flat_map(|t| t.members.last()).map(|a| a.index() + 1).max().unwrap_or(0);
        let mut offsets = vec![0usize; n_authors + 1];
        for t in teams {
            for m in &t.members {
                offsets[m.index() + 1] += 1;
            }
        }
        for i in 0..n_authors {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut list = vec![TeamId(0); offsets[n_authors]];
        for t in teams {
            for m in &t.members {
                list[fill[m.index()]] = t.id;
                fill[m.index()] += 1;
            }
        }
        OverlapIndex { offsets, teams: list }
    }

    pub fn teams_of(&self, author: AuthorId) -> &[TeamId] {
        match self.offsets.get(author.index() + 1) {
            Some(&end) => &self.teams[self.offsets[author.index()]..end],
            None => &[],
        }
    }

    /// Candidate partners of one focal team, ascending.
    pub fn candidates_of(&self, focal: &Team, teams: &[Team]) -> Vec<TeamId> {
        let mut shared: HashMap<TeamId, usize> = HashMap::new();
        for &m in &focal.members {
            for &t in self.teams_of(m) {
                if t != focal.id {
                    *shared.entry(t).or_default() += 1;
                }
            }
        }
        let mut out: Vec<TeamId> = shared
            .into_iter()
            .filter(|&(t, n)| 2 * n >= focal.size().max(teams[t.index()].size()))
            .map(|(t, _)| t)
            .collect();
        out.sort_unstable();
        out
    }
}

/// All ordered candidate pairs `(focal, other)`, sorted. `teams[i].id` must be `i`.
pub fn find_overlap_candidates(teams: &[Team]) -> Vec<(TeamId, TeamId)> {
    let index = OverlapIndex::build(teams);
    teams
        .par_iter()
        .flat_map_iter(|f| index.candidates_of(f, teams).into_iter().map(move |o| (f.id, o)))
        .collect()
}

/// Outcome for one candidate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classified {
    Relation(OverlapRelation),
    Anomaly(OverlapAnomaly),
}

/// Kind of the member-set relation, with offshoots left undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Membership {
    Core,
    Extension,
    Offshoot,
}

fn membership(focal: &Team, other: &Team) -> Result<Membership, OverlapError> {
    if focal.members == other.members {
        return Err(OverlapError::DuplicateMembers(focal.id, other.id));
    }
    Ok(if is_subset(&other.members, &focal.members) {
        Membership::Core
    } else if is_subset(&focal.members, &other.members) {
        Membership::Extension
    } else {
        Membership::Offshoot
    })
}

fn lemma_holds(focal: &Team, other: &Team, m: Membership) -> bool {
    match m {
        Membership::Core => other.duration.covers(&focal.duration) && other.duration != focal.duration,
        Membership::Extension => focal.duration.covers(&other.duration),
        Membership::Offshoot => true,
    }
}

fn finish(focal: &Team, other: &Team, kind: OverlapKind) -> Result<Classified, OverlapError> {
    let timing = Timing::of(focal, other);
    let impulse = cell_impulse(kind, timing).ok_or(OverlapError::InfeasibleCell {
        focal: focal.id,
        other: other.id,
        kind,
        timing,
    })?;
    Ok(Classified::Relation(OverlapRelation { focal: focal.id, other: other.id, kind, timing, impulse }))
}

fn classify_with(
    focal: &Team,
    other: &Team,
    shared_core: impl FnOnce() -> bool,
) -> Result<Classified, OverlapError> {
    let m = membership(focal, other)?;
    if !lemma_holds(focal, other, m) {
        let relation = if m == Membership::Core { OverlapKind::Core } else { OverlapKind::Extension };
        return Ok(Classified::Anomaly(OverlapAnomaly {
            focal: focal.id,
            other: other.id,
            relation,
            focal_span: focal.duration,
            other_span: other.duration,
        }));
    }
    let kind = match m {
        Membership::Core => OverlapKind::Core,
        Membership::Extension => OverlapKind::Extension,
        Membership::Offshoot if shared_core() => OverlapKind::OffshootSharedCore,
        Membership::Offshoot => OverlapKind::OffshootNoSharedCore,
    };
    finish(focal, other, kind)
}

/// Classifies a candidate pair. `teams` is only consulted for the shared-core
/// test of offshoots.
pub fn classify_overlap(focal: &Team, other: &Team, teams: &[Team]) -> Result<Classified, OverlapError> {
    classify_with(focal, other, || shared_core_test(focal, other, teams))
}

/// A candidate core of `focal` that starts strictly earlier and satisfies
/// the containment check.
fn is_preceding_core(focal: &Team, core: &Team) -> bool {
    core.id != focal.id
        && core.size() < focal.size()
        && is_candidate(focal, core)
        && is_subset(&core.members, &focal.members)
        && lemma_holds(focal, core, Membership::Core)
        && core.duration.start < focal.duration.start
}

/// Some team inside the members shared by `focal` and `offshoot` is a
/// preceding core of `focal`.
pub fn shared_core_test(focal: &Team, offshoot: &Team, teams: &[Team]) -> bool {
    teams.iter().any(|c| is_preceding_core(focal, c) && is_subset(&c.members, &offshoot.members))
}

/// All classified relations and anomalies, each sorted by (focal, other).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OverlapResult {
    pub relations: Vec<OverlapRelation>,
    pub anomalies: Vec<OverlapAnomaly>,
    pub candidates: usize,
}

impl OverlapResult {
    /// Relations with the given focal team.
    pub fn of_focal(&self, focal: TeamId) -> &[OverlapRelation] {
        let lo = self.relations.partition_point(|r| r.focal < focal);
        let hi = self.relations.partition_point(|r| r.focal <= focal);
        &self.relations[lo..hi]
    }

    pub fn cell_counts(&self) -> HashMap<(OverlapKind, Timing), usize> {
        let mut out = HashMap::new();
        for r in &self.relations {
            *out.entry((r.kind, r.timing)).or_default() += 1;
        }
        out
    }
}

fn classify_focal(focal: &Team, teams: &[Team], index: &OverlapIndex) -> Result<Vec<Classified>, OverlapError> {
    let candidates = index.candidates_of(focal, teams);
    let cores: Vec<&Team> = candidates
        .iter()
        .map(|&t| &teams[t.index()])
        .filter(|c| is_preceding_core(focal, c))
        .collect();
    candidates
        .iter()
        .map(|&o| {
            let other = &teams[o.index()];
            classify_with(focal, other, || cores.iter().any(|c| is_subset(&c.members, &other.members)))
        })
        .collect()
}

/// Classifies every candidate pair. `teams[i].id` must be `i`.
pub fn classify_all(teams: &[Team]) -> Result<OverlapResult, OverlapError> {
    debug_assert!(teams.iter().enumerate().all(|(i, t)| t.id.index() == i));
    let index = OverlapIndex::build(teams);
    let per_focal: Vec<Vec<Classified>> =
        teams.par_iter().map(|f| classify_focal(f, teams, &index)).collect::<Result<_, _>>()?;
    let mut out = OverlapResult::default();
    for c in per_focal.into_iter().flatten() {
        out.candidates += 1;
        match c {
            Classified::Relation(r) => out.relations.push(r),
            Classified::Anomaly(a) => out.anomalies.push(a),
        }
    }
    if !out.anomalies.is_empty() {
        log::warn!("{} overlap pairs break span containment and were left unclassified", out.anomalies.len());
    }
    Ok(out)
}

/// Impulse counts of one type, with the number coming from successful source teams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ImpulseCounts {
    pub total: u32,
    pub from_top10: u32,
    pub from_top1: u32,
}

impl ImpulseCounts {
    pub fn from_stratum(&self, stratum: SourceStratum) -> u32 {
        match stratum {
            SourceStratum::Any => self.total,
            SourceStratum::Top10 => self.from_top10,
            SourceStratum::Top1 => self.from_top1,
        }
    }
}

/// Quality filter on impulse source teams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceStratum {
    Any,
    Top10,
    Top1,
}

impl SourceStratum {
    pub const ALL: [SourceStratum; 3] = [SourceStratum::Any, SourceStratum::Top10, SourceStratum::Top1];

    pub fn as_str(&self) -> &'static str {
        match self {
            SourceStratum::Any => "any",
            SourceStratum::Top10 => "top10",
            SourceStratum::Top1 => "top1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImpulseSummary {
    pub team: TeamId,
    pub persistence: ImpulseCounts,
    pub synchronous: ImpulseCounts,
    pub freshness: ImpulseCounts,
    /// Persistence impulses whose source had a top-10% publication before the focal start.
    pub early_persistence_top10: u32,
    pub early_persistence_top1: u32,
    pub impulses_per_year: f64,
}

impl ImpulseSummary {
    pub fn counts(&self, impulse: Impulse) -> ImpulseCounts {
        match impulse {
            Impulse::Persistence => self.persistence,
            Impulse::Synchronous => self.synchronous,
            Impulse::Freshness => self.freshness,
            Impulse::None => ImpulseCounts::default(),
        }
    }

    pub fn total(&self) -> u32 {
        self.persistence.total + self.synchronous.total + self.freshness.total
    }

    pub fn is_closed(&self) -> bool {
        self.total() == 0
    }

    pub fn early_persistence(&self, q: Percentile) -> u32 {
        if q == Percentile::TOP1 {
            self.early_persistence_top1
        } else {
            self.early_persistence_top10
        }
    }
}

/// Summary for `focal` from its own relations; `success` is indexed by team id.
pub fn impulse_summary(focal: &Team, relations: &[OverlapRelation], success: &[TeamSuccess]) -> ImpulseSummary {
    let mut s = ImpulseSummary { team: focal.id, ..Default::default() };
    for r in relations.iter().filter(|r| r.focal == focal.id) {
        let src = &success[r.other.index()];
        let counts = match r.impulse {
            Impulse::Persistence => &mut s.persistence,
            Impulse::Synchronous => &mut s.synchronous,
            Impulse::Freshness => &mut s.freshness,
            Impulse::None => continue,
        };
        counts.total += 1;
        counts.from_top10 += u32::from(src.n_top10 > 0);
        counts.from_top1 += u32::from(src.n_top1 > 0);
        if r.impulse == Impulse::Persistence {
            let before = |y: Option<crate::Year>| y.is_some_and(|y| y < focal.duration.start);
            s.early_persistence_top10 += u32::from(before(src.first_top10));
            s.early_persistence_top1 += u32::from(before(src.first_top1));
        }
    }
    s.impulses_per_year = f64::from(s.total()) / f64::from(focal.duration_years());
    s
}

pub fn summarize_all(teams: &[Team], overlaps: &OverlapResult, success: &[TeamSuccess]) -> Vec<ImpulseSummary> {
    teams.par_iter().map(|t| impulse_summary(t, overlaps.of_focal(t.id), success)).collect()
}

/// `overlaps.csv`.
pub fn write_overlaps_csv<W: Write>(relations: &[OverlapRelation], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["focal_id", "other_id", "kind", "timing", "impulse"])?;
    for r in relations {
        out.write_record([
            r.focal.0.to_string().as_str(),
            r.other.0.to_string().as_str(),
            r.kind.as_str(),
            r.timing.as_str(),
            r.impulse.as_str(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `overlap_anomalies.csv`.
pub fn write_anomalies_csv<W: Write>(anomalies: &[OverlapAnomaly], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["focal_id", "other_id", "relation", "focal_span", "other_span"])?;
    for a in anomalies {
        out.write_record([
            a.focal.0.to_string(),
            a.other.0.to_string(),
            a.relation.as_str().to_string(),
            a.focal_span.to_string(),
            a.other_span.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub const IMPULSE_COLUMNS: [&str; 13] = [
    "team_id",
    "persistence",
    "persistence_top10",
    "persistence_top1",
    "persistence_early_top10",
    "persistence_early_top1",
    "synchronous",
    "synchronous_top10",
    "synchronous_top1",
    "freshness",
    "freshness_top10",
    "freshness_top1",
    "impulses_per_year",
];

/// `impulses.csv`: one row per team.
pub fn write_impulses_csv<W: Write>(summaries: &[ImpulseSummary], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(IMPULSE_COLUMNS)?;
    for s in summaries {
        let c = |c: ImpulseCounts| [c.total, c.from_top10, c.from_top1].map(|v| v.to_string());
        let mut row = vec![s.team.0.to_string()];
        row.extend(c(s.persistence));
        row.push(s.early_persistence_top10.to_string());
        row.push(s.early_persistence_top1.to_string());
        row.extend(c(s.synchronous));
        row.extend(c(s.freshness));
        row.push(format!("{:.6}", s.impulses_per_year));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Year;
    use proptest::prelude::*;

    fn team(id: u32, members: &str, s: Year, e: Year) -> Team {
        let mut m: Vec<AuthorId> = members.bytes().map(|b| AuthorId(u32::from(b - b'A'))).collect();
        m.sort_unstable();
        Team { id: TeamId(id), members: m, intervals: vec![Span::new(s, e)], duration: Span::new(s, e), pubs: vec![] }
    }

    fn relation(c: Classified) -> (OverlapKind, Timing, Impulse) {
        match c {
            Classified::Relation(r) => (r.kind, r.timing, r.impulse),
            Classified::Anomaly(a) => panic!("unexpected anomaly {a:?}"),
        }
    }

    #[test]
    fn cell_table() {
        use Impulse as I;
        use OverlapKind::*;
        use Timing::*;
        let expect = [
            (Core, Preceding, Some(I::Persistence)),
            (Core, Simultaneous, Some(I::None)),
            (Core, Succeeding, None),
            (Extension, Preceding, None),
            (Extension, Simultaneous, Some(I::Synchronous)),
            (Extension, Succeeding, Some(I::Freshness)),
            (OffshootSharedCore, Preceding, Some(I::None)),
            (OffshootSharedCore, Simultaneous, Some(I::Synchronous)),
            (OffshootSharedCore, Succeeding, Some(I::Freshness)),
            (OffshootNoSharedCore, Preceding, Some(I::Persistence)),
            (OffshootNoSharedCore, Simultaneous, Some(I::Synchronous)),
            (OffshootNoSharedCore, Succeeding, Some(I::Freshness)),
        ];
        for (k, t, i) in expect {
            assert_eq!(cell_impulse(k, t), i, "{k}/{t}");
        }
    }

    #[test]
    fn worked_classifications() {
        let f = team(0, "ABC", 3, 6);
        let cases = [
            (team(1, "AB", 1, 7), (OverlapKind::Core, Timing::Preceding, Impulse::Persistence)),
            (team(1, "ABCD", 4, 5), (OverlapKind::Extension, Timing::Succeeding, Impulse::Freshness)),
            (team(1, "AB", 3, 8), (OverlapKind::Core, Timing::Simultaneous, Impulse::None)),
        ];
        for (o, want) in cases {
            assert_eq!(relation(classify_overlap(&f, &o, &[f.clone(), o.clone()]).unwrap()), want);
        }
        let f = team(0, "ABCD", 3, 6);
        let o = team(1, "ABEF", 3, 5);
        assert_eq!(
            relation(classify_overlap(&f, &o, &[f.clone(), o.clone()]).unwrap()),
            (OverlapKind::OffshootNoSharedCore, Timing::Simultaneous, Impulse::Synchronous)
        );
    }

    #[test]
    fn candidate_threshold() {
        let teams = vec![team(0, "ABC", 1, 3), team(1, "DEF", 1, 3), team(2, "ABCD", 1, 2), team(3, "ABEF", 1, 2)];
        let c = find_overlap_candidates(&teams);
        assert!(!c.contains(&(TeamId(0), TeamId(1))));
        assert!(c.contains(&(TeamId(2), TeamId(3))) && c.contains(&(TeamId(3), TeamId(2))));
        assert!(c.contains(&(TeamId(0), TeamId(2))));
        // {A,B,E,F} vs {A,B,C}: 2 shared of max 4
        assert!(c.contains(&(TeamId(0), TeamId(3))));
        let small = vec![team(0, "AB", 1, 3), team(1, "ACDE", 1, 3)];
        assert!(find_overlap_candidates(&small).is_empty());
    }

    #[test]
    fn shared_core_examples() {
        let core = team(0, "AB", 1, 9);
        let focal = team(1, "ABC", 3, 6);
        let off = team(2, "ABD", 2, 5);
        let teams = vec![core.clone(), focal.clone(), off.clone()];
        assert!(shared_core_test(&focal, &off, &teams));
        assert_eq!(
            relation(classify_overlap(&focal, &off, &teams).unwrap()),
            (OverlapKind::OffshootSharedCore, Timing::Preceding, Impulse::None)
        );

        let without = vec![focal.clone(), off.clone()];
        assert!(!shared_core_test(&focal, &off, &without));

        let simultaneous = team(0, "AB", 3, 9);
        assert!(!shared_core_test(&focal, &off, &[simultaneous, focal.clone(), off.clone()]));
    }

    #[test]
    fn core_must_sit_inside_the_offshoot() {
        let core = team(0, "AC", 1, 9);
        let focal = team(1, "ABC", 3, 6);
        let off = team(2, "ABD", 2, 5);
        assert!(!shared_core_test(&focal, &off, &[core, focal.clone(), off.clone()]));
    }

    #[test]
    fn containment_violation_is_an_anomaly() {
        let f = team(0, "ABC", 3, 6);
        let mut o = team(1, "AB", 5, 9);
        o.intervals = vec![Span::new(5, 9)];
        match classify_overlap(&f, &o, &[]).unwrap() {
            Classified::Anomaly(a) => assert_eq!(a.relation, OverlapKind::Core),
            c => panic!("{c:?}"),
        }
        let e = team(1, "ABCD", 2, 4);
        assert!(matches!(classify_overlap(&f, &e, &[]).unwrap(), Classified::Anomaly(_)));
        // equal spans cannot both be maximal for a subset pair
        let same = team(1, "AB", 3, 6);
        assert!(matches!(classify_overlap(&f, &same, &[]).unwrap(), Classified::Anomaly(_)));
    }

    #[test]
    fn duplicate_members_rejected() {
        let a = team(0, "AB", 1, 3);
        let b = team(1, "AB", 5, 7);
        assert_eq!(classify_overlap(&a, &b, &[]), Err(OverlapError::DuplicateMembers(TeamId(0), TeamId(1))));
    }

    fn success(top10: Option<Year>, top1: Option<Year>) -> TeamSuccess {
        TeamSuccess {
            n_pubs: 5,
            n_top10: u32::from(top10.is_some()),
            n_top1: u32::from(top1.is_some()),
            first_top10: top10,
            first_top1: top1,
        }
    }

    #[test]
    fn summary_examples() {
        let focal = team(0, "ABC", 3, 6);
        let closed = impulse_summary(&focal, &[], &[]);
        assert!(closed.is_closed());
        assert_eq!(closed.impulses_per_year, 0.0);

        let rel = OverlapRelation {
            focal: TeamId(0),
            other: TeamId(1),
            kind: OverlapKind::Core,
            timing: Timing::Preceding,
            impulse: Impulse::Persistence,
        };
        let s = impulse_summary(&focal, &[rel], &[success(None, None), success(Some(2), Some(2))]);
        assert_eq!(s.persistence, ImpulseCounts { total: 1, from_top10: 1, from_top1: 1 });
        assert_eq!((s.early_persistence_top10, s.early_persistence_top1), (1, 1));

        let late = impulse_summary(&focal, &[rel], &[success(None, None), success(Some(3), None)]);
        assert_eq!(late.persistence, ImpulseCounts { total: 1, from_top10: 1, from_top1: 0 });
        assert_eq!(late.early_persistence_top10, 0);
    }

    #[test]
    fn impulses_per_year_is_total_over_duration() {
        let focal = team(0, "ABC", 3, 6);
        let kinds = [Impulse::Persistence, Impulse::Synchronous, Impulse::Freshness, Impulse::Freshness, Impulse::Freshness, Impulse::Synchronous, Impulse::None];
        let rels: Vec<OverlapRelation> = kinds
            .iter()
            .enumerate()
            .map(|(i, &impulse)| OverlapRelation {
                focal: TeamId(0),
                other: TeamId(i as u32 + 1),
                kind: OverlapKind::OffshootNoSharedCore,
                timing: Timing::Simultaneous,
                impulse,
            })
            .collect();
        let success = vec![TeamSuccess::default(); 8];
        let s = impulse_summary(&focal, &rels, &success);
        assert_eq!(s.total(), 6);
        assert_eq!(s.impulses_per_year, 1.5);
    }

    fn random_teams() -> impl Strategy<Value = Vec<Team>> {
        prop::collection::btree_map(
            prop::collection::btree_set(0u32..7, 2..5),
            (0i32..6, 0i32..4),
            1..12,
        )
        .prop_map(|m| {
            m.into_iter()
                .enumerate()
                .map(|(i, (members, (s, len)))| Team {
                    id: TeamId(i as u32),
                    members: members.into_iter().map(AuthorId).collect(),
                    intervals: vec![Span::new(s, s + len)],
                    duration: Span::new(s, s + len),
                    pubs: vec![],
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn indexed_path_matches_direct_classification(teams in random_teams()) {
            let result = classify_all(&teams).unwrap();
            let mut expected = Vec::new();
            for f in &teams {
                for o in &teams {
                    if is_candidate(f, o) {
                        expected.push(classify_overlap(f, o, &teams).unwrap());
                    }
                }
            }
            let mut got: Vec<Classified> = result.relations.iter().map(|&r| Classified::Relation(r)).collect();
            got.extend(result.anomalies.iter().map(|&a| Classified::Anomaly(a)));
            let key = |c: &Classified| match c {
                Classified::Relation(r) => (r.focal, r.other),
                Classified::Anomaly(a) => (a.focal, a.other),
            };
            got.sort_by_key(key);
            expected.sort_by_key(key);
            prop_assert_eq!(got, expected);
            prop_assert_eq!(result.candidates, find_overlap_candidates(&teams).len());
        }

        #[test]
        fn relations_never_in_impossible_cells(teams in random_teams()) {
            for r in classify_all(&teams).unwrap().relations {
                prop_assert!(cell_impulse(r.kind, r.timing) == Some(r.impulse));
            }
        }
    }
}

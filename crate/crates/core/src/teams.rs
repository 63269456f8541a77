//! Persistent teams: cliques grouped by member set, their publications and
//! composition metrics.

use std::io::Write;

use rayon::prelude::*;

use crate::cliques::TemporalClique;
use crate::corpus::{AuthorPubIndex, PublicationTable};
use crate::geo::great_circle_km;
use crate::success::SuccessTags;
use crate::{AuthorId, CityId, CountryId, OrgId, PubIdx, Span, TeamId, Year};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Team {
    pub id: TeamId,
    /// Sorted ascending.
    pub members: Vec<AuthorId>,
    /// Clique spans of this member set; sorted, disjoint.
    pub intervals: Vec<Span>,
    /// From the first interval start to the last interval end.
    pub duration: Span,
    /// Associated publications, ascending.
    pub pubs: Vec<PubIdx>,
}

impl Team {
    /// Year lies inside one of the intervals (never in a gap).
    pub fn active_in(&self, year: Year) -> bool {
        self.intervals.iter().any(|s| s.contains(year))
    }

    pub fn duration_years(&self) -> u32 {
        self.duration.years()
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// 1-based team age of a year, counted from the duration start.
    pub fn age_of(&self, year: Year) -> u32 {
        (year - self.duration.start + 1) as u32
    }

    pub fn has_member(&self, a: AuthorId) -> bool {
        self.members.binary_search(&a).is_ok()
    }
}

/// Groups cliques by exact member set. Team ids follow member-set order.
pub fn assemble_teams(cliques: &[TemporalClique]) -> Vec<Team> {
    let mut sorted: Vec<&TemporalClique> = cliques.iter().collect();
    sorted.sort_unstable();
    let mut teams: Vec<Team> = Vec::new();
    for c in sorted {
        match teams.last_mut() {
            Some(t) if t.members == c.members => {
                assert!(
                    t.intervals.last().is_some_and(|last| last.end < c.span.start),
                    "overlapping clique spans for one member set"
                );
                t.intervals.push(c.span);
                t.duration.end = t.duration.end.max(c.span.end);
            }
            _ => teams.push(Team {
                id: TeamId::from(teams.len()),
                members: c.members.clone(),
                intervals: vec![c.span],
                duration: c.span,
                pubs: Vec::new(),
            }),
        }
    }
    teams
}

/// Minimum number of team members a publication needs: at least half
/// (rounded up), and never fewer than two.
pub fn association_threshold(team_size: usize) -> usize {
    team_size.div_ceil(2).max(2)
}

/// Publications inside one of the team's intervals with enough team members
/// among their authors.
pub fn associate_publications(team: &Team, pubs: &PublicationTable, index: &AuthorPubIndex) -> Vec<PubIdx> {
    let need = association_threshold(team.size());
    let mut hits: Vec<PubIdx> = team
        .members
        .iter()
        .flat_map(|&m| index.pubs_of(m).iter().copied())
        .filter(|&p| team.active_in(pubs.get(p).year))
        .collect();
    hits.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < hits.len() {
        let mut j = i;
        while j < hits.len() && hits[j] == hits[i] {
            j += 1;
        }
        if j - i >= need {
            out.push(hits[i]);
        }
        i = j;
    }
    out
}

/// Fills `pubs` for every team.
pub fn associate_all(teams: &mut [Team], pubs: &PublicationTable) {
    let index = pubs.author_index();
    teams.par_iter_mut().for_each(|t| t.pubs = associate_publications(t, pubs, &index));
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompositionMetrics {
    pub orgs_per_member: f64,
    pub cities_per_member: f64,
    pub countries_per_member: f64,
    /// Mean distance between distinct geolocated cities, divided by team size.
    pub mean_city_distance_per_member: f64,
}

/// Affiliations of team members on the team's associated publications;
/// co-authors outside the team are ignored.
pub fn composition_metrics(team: &Team, pubs: &PublicationTable) -> CompositionMetrics {
    let mut orgs: Vec<OrgId> = Vec::new();
    let mut cities: Vec<CityId> = Vec::new();
    let mut countries: Vec<CountryId> = Vec::new();
    for &p in &team.pubs {
        for entry in pubs.get(p).authors.iter().filter(|a| team.has_member(a.author)) {
            for aff in &entry.affiliations {
                orgs.extend(aff.org);
                cities.extend(aff.city);
                countries.extend(aff.country);
            }
        }
    }
    for v in [&mut orgs as &mut dyn DedupVec, &mut cities, &mut countries] {
        v.sort_dedup();
    }
    let located: Vec<_> = cities.iter().filter_map(|&c| pubs.city_coord(c)).collect();
    let mut total = 0.0;
    let mut pairs = 0u64;
    for (i, &a) in located.iter().enumerate() {
        for &b in &located[i + 1..] {
            total += great_circle_km(a, b).expect("validated at ingest");
            pairs += 1;
        }
    }
    let mean = if pairs == 0 { 0.0 } else { total / pairs as f64 };
    let size = team.size() as f64;
    CompositionMetrics {
        orgs_per_member: orgs.len() as f64 / size,
        cities_per_member: cities.len() as f64 / size,
        countries_per_member: countries.len() as f64 / size,
        mean_city_distance_per_member: mean / size,
    }
}

trait DedupVec {
    fn sort_dedup(&mut self);
}

impl<T: Ord> DedupVec for Vec<T> {
    fn sort_dedup(&mut self) {
        self.sort_unstable();
        self.dedup();
    }
}

pub fn composition_all(teams: &[Team], pubs: &PublicationTable) -> Vec<CompositionMetrics> {
    teams.par_iter().map(|t| composition_metrics(t, pubs)).collect()
}

/// Success counts over a team's associated publications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TeamSuccess {
    pub n_pubs: u32,
    pub n_top10: u32,
    pub n_top1: u32,
    pub first_top10: Option<Year>,
    pub first_top1: Option<Year>,
}

impl TeamSuccess {
    pub fn of(team: &Team, pubs: &PublicationTable, tags: &SuccessTags) -> Self {
        let mut s = TeamSuccess { n_pubs: team.pubs.len() as u32, ..Default::default() };
        for &p in &team.pubs {
            let year = pubs.get(p).year;
            let tag = tags.get(p);
            if tag.top10 {
                s.n_top10 += 1;
                s.first_top10 = Some(s.first_top10.map_or(year, |y| y.min(year)));
            }
            if tag.top1 {
                s.n_top1 += 1;
                s.first_top1 = Some(s.first_top1.map_or(year, |y| y.min(year)));
            }
        }
        s
    }

    pub fn count(&self, q: crate::success::Percentile) -> u32 {
        if q == crate::success::Percentile::TOP1 {
            self.n_top1
        } else {
            self.n_top10
        }
    }

    pub fn first(&self, q: crate::success::Percentile) -> Option<Year> {
        if q == crate::success::Percentile::TOP1 {
            self.first_top1
        } else {
            self.first_top10
        }
    }
}

pub fn success_all(teams: &[Team], pubs: &PublicationTable, tags: &SuccessTags) -> Vec<TeamSuccess> {
    teams.par_iter().map(|t| TeamSuccess::of(t, pubs, tags)).collect()
}

fn join_members(pubs: &PublicationTable, members: &[AuthorId]) -> String {
    members.iter().map(|&a| pubs.author_name(a)).collect::<Vec<_>>().join(";")
}

fn join_spans(spans: &[Span]) -> String {
    spans.iter().map(Span::to_string).collect::<Vec<_>>().join(";")
}

/// `teams.csv`.
pub fn write_teams_csv<W: Write>(
    pubs: &PublicationTable,
    teams: &[Team],
    success: &[TeamSuccess],
    metrics: &[CompositionMetrics],
    w: W,
) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
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
    ])?;
    for ((t, s), m) in teams.iter().zip(success).zip(metrics) {
        out.write_record([
            t.id.0.to_string(),
            join_members(pubs, &t.members),
            join_spans(&t.intervals),
            t.duration.start.to_string(),
            t.duration.end.to_string(),
            s.n_pubs.to_string(),
            s.n_top10.to_string(),
            s.n_top1.to_string(),
            format!("{:.6}", m.orgs_per_member),
            format!("{:.6}", m.cities_per_member),
            format!("{:.6}", m.countries_per_member),
            format!("{:.6}", m.mean_city_distance_per_member),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `team_pubs.csv`: `team_id,pub_id`.
pub fn write_team_pubs_csv<W: Write>(pubs: &PublicationTable, teams: &[Team], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["team_id", "pub_id"])?;
    for t in teams {
        for &p in &t.pubs {
            out.write_record([t.id.0.to_string().as_str(), pubs.get(p).pub_id.as_str()])?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{read_publications, IngestConfig, RawAffiliation, RawAuthor, RawPublication};
    use proptest::prelude::*;

    fn clique(members: &[u32], s: Year, e: Year) -> TemporalClique {
        TemporalClique { members: members.iter().map(|&m| AuthorId(m)).collect(), span: Span::new(s, e) }
    }

    #[test]
    fn disconnected_spans_merge_into_one_team() {
        let teams = assemble_teams(&[clique(&[0, 1], 7, 9), clique(&[0, 1], 1, 3)]);
        assert_eq!(teams.len(), 1);
        assert_eq!(teams[0].intervals, vec![Span::new(1, 3), Span::new(7, 9)]);
        assert_eq!(teams[0].duration, Span::new(1, 9));
        assert!(!teams[0].active_in(5));
    }

    #[test]
    fn different_member_sets_are_different_teams() {
        let teams = assemble_teams(&[clique(&[0, 2], 1, 3), clique(&[0, 1], 1, 3)]);
        assert_eq!(teams.len(), 2);
        assert_eq!(teams[0].members, vec![AuthorId(0), AuthorId(1)]);
        assert_eq!(teams[1].id, TeamId(1));
        assert!(assemble_teams(&[]).is_empty());
    }

    #[test]
    fn threshold_arithmetic() {
        assert_eq!(association_threshold(2), 2);
        assert_eq!(association_threshold(3), 2);
        assert_eq!(association_threshold(4), 2);
        assert_eq!(association_threshold(5), 3);
        assert_eq!(association_threshold(6), 3);
        assert_eq!(association_threshold(7), 4);
    }

    type Aff = (Option<&'static str>, Option<&'static str>, Option<&'static str>, Option<(f64, f64)>);

    fn corpus(pubs: &[(&str, i64, Vec<(&str, Aff)>)]) -> PublicationTable {
        let text: String = pubs
            .iter()
            .map(|(id, year, authors)| {
                let r = RawPublication {
                    pub_id: (*id).into(),
                    year: *year,
                    doc_type: "Article".into(),
                    fields: vec!["F".into()],
                    authors: authors
                        .iter()
                        .map(|(a, (org, city, country, coord))| RawAuthor {
                            author_id: (*a).into(),
                            affiliations: vec![RawAffiliation {
                                org_id: org.map(Into::into),
                                city_id: city.map(Into::into),
                                country: country.map(Into::into),
                                lat: coord.map(|c| c.0),
                                lon: coord.map(|c| c.1),
                            }],
                        })
                        .collect(),
                };
                serde_json::to_string(&r).unwrap() + "\n"
            })
            .collect();
        read_publications(text.as_bytes(), &IngestConfig { window: None }).unwrap().0
    }

    const ORG: Aff = (Some("O"), Some("C"), Some("NL"), Some((52.0, 4.0)));

    fn team_of(pubs: &PublicationTable, names: &[&str], intervals: &[(Year, Year)]) -> Team {
        let mut members: Vec<AuthorId> = names.iter().map(|n| pubs.author_id(n).unwrap()).collect();
        members.sort_unstable();
        let intervals: Vec<Span> = intervals.iter().map(|&(s, e)| Span::new(s, e)).collect();
        let duration = Span::new(intervals[0].start, intervals.last().unwrap().end);
        let mut t = Team { id: TeamId(0), members, intervals, duration, pubs: vec![] };
        t.pubs = associate_publications(&t, pubs, &pubs.author_index());
        t
    }

    #[test]
    fn association_rules() {
        let pubs = corpus(&[
            ("two_of_five", 2, vec![("A", ORG), ("B", ORG), ("X", ORG)]),
            ("three_of_five", 2, vec![("A", ORG), ("B", ORG), ("C", ORG)]),
            ("in_gap", 5, vec![("A", ORG), ("B", ORG), ("C", ORG)]),
            ("second_interval", 8, vec![("D", ORG), ("E", ORG), ("C", ORG)]),
            ("outside", 12, vec![("A", ORG), ("B", ORG), ("C", ORG)]),
            ("pad", 1, vec![("D", ORG), ("E", ORG)]),
        ]);
        let t = team_of(&pubs, &["A", "B", "C", "D", "E"], &[(1, 3), (7, 9)]);
        let ids: Vec<&str> = t.pubs.iter().map(|&p| pubs.get(p).pub_id.as_str()).collect();
        assert_eq!(ids, vec!["second_interval", "three_of_five"]);

        let pair = team_of(&pubs, &["D", "E"], &[(1, 2)]);
        assert_eq!(pair.pubs.len(), 1);
    }

    #[test]
    fn shared_location_metrics() {
        let pubs = corpus(&[("P", 2, vec![("A", ORG), ("B", ORG), ("Z", (Some("O2"), Some("C2"), Some("DE"), Some((50.0, 8.0))))])]);
        let t = team_of(&pubs, &["A", "B"], &[(1, 3)]);
        let m = composition_metrics(&t, &pubs);
        assert_eq!(m, CompositionMetrics {
            orgs_per_member: 0.5,
            cities_per_member: 0.5,
            countries_per_member: 0.5,
            mean_city_distance_per_member: 0.0,
        });
    }

    #[test]
    fn identical_coordinates_give_zero_distance() {
        let pubs = corpus(&[(
            "P",
            2,
            vec![
                ("A", (Some("O"), Some("C1"), Some("NL"), Some((10.0, 10.0)))),
                ("B", (Some("O"), Some("C2"), Some("NL"), Some((10.0, 10.0)))),
            ],
        )]);
        let t = team_of(&pubs, &["A", "B"], &[(1, 3)]);
        assert_eq!(composition_metrics(&t, &pubs).mean_city_distance_per_member, 0.0);
    }

    #[test]
    fn one_degree_apart_per_member() {
        let pubs = corpus(&[(
            "P",
            2,
            vec![
                ("A", (Some("O1"), Some("C1"), Some("NL"), Some((10.0, 5.0)))),
                ("B", (Some("O2"), Some("C2"), Some("NL"), Some((11.0, 5.0)))),
            ],
        )]);
        let t = team_of(&pubs, &["A", "B"], &[(1, 3)]);
        let m = composition_metrics(&t, &pubs);
        // 6371 * pi / 180 = 111.19 km between the cities, halved per member.
        let expected = 6371.0 * std::f64::consts::PI / 180.0 / 2.0;
        assert!((m.mean_city_distance_per_member - expected).abs() / expected < 0.005);
        assert!((m.mean_city_distance_per_member - 55.6).abs() < 0.3);
        assert_eq!(m.orgs_per_member, 1.0);
        assert_eq!(m.countries_per_member, 0.5);
    }

    #[test]
    fn team_without_publications_has_zero_metrics() {
        let pubs = corpus(&[("P", 2, vec![("A", ORG), ("B", ORG)])]);
        let t = team_of(&pubs, &["A", "B"], &[(5, 6)]);
        assert!(t.pubs.is_empty());
        assert_eq!(composition_metrics(&t, &pubs), CompositionMetrics::default());
    }

    proptest! {
        #[test]
        fn adding_a_member_author_never_drops_association(
            authors in prop::collection::btree_set(0usize..6, 1..6),
            extra in 0usize..6,
        ) {
            let names = ["A", "B", "C", "D", "E", "F"];
            let mut base: Vec<(&str, Aff)> = authors.iter().map(|&i| (names[i], ORG)).collect();
            let mut all: Vec<(&str, Aff)> = names.iter().map(|n| (*n, ORG)).collect();
            all.truncate(6);
            let universe = corpus(&[("U", 1, all)]);
            let _ = universe;
            let before = corpus(&[("P", 2, base.clone()), ("Q", 1, names.iter().map(|n| (*n, ORG)).collect())]);
            if !authors.contains(&extra) {
                base.push((names[extra], ORG));
            }
            let after = corpus(&[("P", 2, base), ("Q", 1, names.iter().map(|n| (*n, ORG)).collect())]);
            let team = ["A", "B", "C", "D"];
            let tb = team_of(&before, &team, &[(2, 2)]);
            let ta = team_of(&after, &team, &[(2, 2)]);
            prop_assert!(tb.pubs.len() <= ta.pubs.len());
        }
    }
}

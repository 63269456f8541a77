//! Aggregate tables over teams, publications and impulses.
//!
//! Probabilities and percentages are kept as integer `count / N` pairs until
//! formatting, so every ratio row satisfies `value * N = count` exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;

use crate::corpus::PublicationTable;
use crate::overlap::{Impulse, ImpulseSummary, SourceStratum};
use crate::success::{Percentile, SuccessTags};
use crate::teams::{CompositionMetrics, Team, TeamSuccess};
use crate::Year;

pub const PERCENTILES: [Percentile; 2] = [Percentile::TOP10, Percentile::TOP1];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    /// `count / n`, optionally as a percentage.
    Ratio { count: u64, n: u64, percent: bool },
    Mean { value: f64, n: u64 },
    /// Nothing to report for a population of `n`.
    Missing { n: u64 },
}

impl Value {
    pub fn probability(count: u64, n: u64) -> Value {
        Value::Ratio { count, n, percent: false }
    }

    pub fn percentage(count: u64, n: u64) -> Value {
        Value::Ratio { count, n, percent: true }
    }

    pub fn n(&self) -> u64 {
        match *self {
            Value::Ratio { n, .. } | Value::Mean { n, .. } | Value::Missing { n } => n,
        }
    }

    pub fn get(&self) -> Option<f64> {
        match *self {
            Value::Ratio { n: 0, .. } | Value::Missing { .. } => None,
            Value::Ratio { count, n, percent } => {
                let scale = if percent { 100.0 } else { 1.0 };
                Some(count as f64 * scale / n as f64)
            }
            Value::Mean { value, .. } => Some(value),
        }
    }

    pub fn count(&self) -> Option<u64> {
        match *self {
            Value::Ratio { count, .. } => Some(count),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub keys: Vec<String>,
    pub value: Value,
    pub flag: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    /// File stem, e.g. `fig2a`.
    pub name: &'static str,
    pub key_names: Vec<&'static str>,
    pub rows: Vec<SeriesRow>,
}

impl SeriesTable {
    fn new(name: &'static str, key_names: &[&'static str]) -> Self {
        SeriesTable { name, key_names: key_names.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, keys: Vec<String>, value: Value) {
        debug_assert_eq!(keys.len(), self.key_names.len());
        self.rows.push(SeriesRow { keys, value, flag: None });
    }

    fn push_flagged(&mut self, keys: Vec<String>, value: Value, flag: &'static str) {
        self.rows.push(SeriesRow { keys, value, flag: Some(flag) });
    }

    /// First row whose keys equal `keys`.
    pub fn find(&self, keys: &[&str]) -> Option<&SeriesRow> {
        self.rows.iter().find(|r| r.keys.iter().map(String::as_str).eq(keys.iter().copied()))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<&str> = self.key_names.clone();
        header.extend(["value", "N", "count", "flag"]);
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = r.keys.clone();
            rec.push(r.value.get().map(|v| format!("{v:.6}")).unwrap_or_default());
            rec.push(r.value.n().to_string());
            rec.push(r.value.count().map(|c| c.to_string()).unwrap_or_default());
            rec.push(r.flag.unwrap_or("").to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisConfig {
    /// Corpus year window; with `margin`, teams near its edges are left out
    /// of team-centric tables.
    pub window: Option<(Year, Year)>,
    pub margin: u32,
    /// Group durations into cohorts of this many years; `None` keeps each duration separate.
    pub duration_bin: Option<u32>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { window: Some((2008, 2020)), margin: 4, duration_bin: None }
    }
}

impl AnalysisConfig {
    pub fn eligible(&self, team: &Team) -> bool {
        match self.window {
            Some((w0, w1)) => {
                let m = self.margin as Year;
                team.duration.start >= w0 + m && team.duration.end <= w1 - m
            }
            None => true,
        }
    }

    /// Cohort bounds containing a duration.
    pub fn cohort(&self, duration: u32) -> (u32, u32) {
        match self.duration_bin {
            Some(w) if w > 1 => {
                let lo = (duration - 1) / w * w + 1;
                (lo, lo + w - 1)
            }
            _ => (duration, duration),
        }
    }

    fn cohort_label(&self, duration: u32) -> String {
        match self.cohort(duration) {
            (lo, hi) if lo == hi => lo.to_string(),
            (lo, hi) => format!("{lo}-{hi}"),
        }
    }
}

/// Everything the tables draw on. `success` and `summaries` are indexed by team id.
#[derive(Debug, Clone, Copy)]
pub struct AnalysisInput<'a> {
    pub pubs: &'a PublicationTable,
    pub teams: &'a [Team],
    pub tags: &'a SuccessTags,
    pub success: &'a [TeamSuccess],
    pub metrics: &'a [CompositionMetrics],
    pub summaries: &'a [ImpulseSummary],
}

fn team_pub_mask(pubs: &PublicationTable, teams: &[Team]) -> Vec<bool> {
    let mut mask = vec![false; pubs.len()];
    for p in teams.iter().flat_map(|t| t.pubs.iter()) {
        mask[p.index()] = true;
    }
    mask
}

/// Percentage of multi-author publications associated with a team, per
/// year and publication stratum.
pub fn team_prevalence_by_year(pubs: &PublicationTable, teams: &[Team], tags: &SuccessTags) -> SeriesTable {
    let in_team = team_pub_mask(pubs, teams);
    let mut cells: BTreeMap<(Year, usize), (u64, u64)> = BTreeMap::new();
    for (idx, p) in pubs.iter().filter(|(_, p)| p.authors.len() >= 2) {
        let tag = tags.get(idx);
        let hit = u64::from(in_team[idx.index()]);
        for (s, included) in [true, tag.top10, tag.top1].into_iter().enumerate() {
            if included {
                let c = cells.entry((p.year, s)).or_default();
                c.0 += hit;
                c.1 += 1;
            }
        }
    }
    let mut t = SeriesTable::new("fig1a", &["year", "stratum"]);
    for ((year, s), (hit, n)) in cells {
        t.push(vec![year.to_string(), ["all", "top10", "top1"][s].to_string()], Value::percentage(hit, n));
    }
    t
}

/// Same percentage per country; a publication counts for every country of
/// its authors' affiliations.
pub fn team_prevalence_by_country(pubs: &PublicationTable, teams: &[Team]) -> SeriesTable {
    let in_team = team_pub_mask(pubs, teams);
    let mut cells = vec![(0u64, 0u64); pubs.n_countries()];
    for (idx, p) in pubs.iter().filter(|(_, p)| p.authors.len() >= 2) {
        let countries: BTreeSet<_> =
            p.authors.iter().flat_map(|a| a.affiliations.iter().filter_map(|f| f.country)).collect();
        let hit = u64::from(in_team[idx.index()]);
        for c in countries {
            cells[c.index()].0 += hit;
            cells[c.index()].1 += 1;
        }
    }
    let mut t = SeriesTable::new("fig1b", &["country"]);
    for (i, (hit, n)) in cells.into_iter().enumerate() {
        if n > 0 {
            t.push(vec![pubs.country_name(crate::CountryId::from(i)).to_string()], Value::percentage(hit, n));
        }
    }
    t
}

fn eligible_teams<'a>(input: &AnalysisInput<'a>, cfg: &AnalysisConfig) -> Vec<&'a Team> {
    input.teams.iter().filter(|t| cfg.eligible(t)).collect()
}

/// Probability that a team publication at a given team age is top-q, per
/// duration cohort.
pub fn success_prob_by_age(input: &AnalysisInput, cfg: &AnalysisConfig) -> SeriesTable {
    let teams = eligible_teams(input, cfg);
    let mut t = SeriesTable::new("fig2a", &["q", "duration", "age"]);
    for q in PERCENTILES {
        let mut cells: BTreeMap<((u32, u32), u32), (u64, u64)> = BTreeMap::new();
        for team in &teams {
            let cohort = cfg.cohort(team.duration_years());
            for &p in &team.pubs {
                let c = cells.entry((cohort, team.age_of(input.pubs.get(p).year))).or_default();
                c.0 += u64::from(input.tags.is_top(p, q));
                c.1 += 1;
            }
        }
        for ((cohort, age), (hit, n)) in cells {
            t.push(vec![q.label(), cfg.cohort_label(cohort.0), age.to_string()], Value::probability(hit, n));
        }
    }
    t
}

/// Among teams with a top-q publication: percentage whose first one falls
/// at each team age, per duration cohort.
pub fn first_success_distribution(input: &AnalysisInput, cfg: &AnalysisConfig) -> SeriesTable {
    let mut t = SeriesTable::new("fig2b", &["q", "duration", "age"]);
    for q in PERCENTILES {
        let mut cohorts: BTreeMap<(u32, u32), BTreeMap<u32, u64>> = BTreeMap::new();
        for team in eligible_teams(input, cfg) {
            if let Some(first) = input.success[team.id.index()].first(q) {
                *cohorts.entry(cfg.cohort(team.duration_years())).or_default().entry(team.age_of(first)).or_default() +=
                    1;
            }
        }
        for (cohort, ages) in cohorts {
            let n: u64 = ages.values().sum();
            for age in 1..=cohort.1 {
                let hit = ages.get(&age).copied().unwrap_or(0);
                t.push(vec![q.label(), cfg.cohort_label(cohort.0), age.to_string()], Value::percentage(hit, n));
            }
        }
    }
    t
}

/// Percentage of teams still without a top-q publication at the start of an
/// age that get their first one during it.
pub fn newly_successful_rate(input: &AnalysisInput, cfg: &AnalysisConfig) -> SeriesTable {
    let teams = eligible_teams(input, cfg);
    let max_age = teams.iter().map(|t| t.duration_years()).max().unwrap_or(0);
    let mut t = SeriesTable::new("figs2add", &["q", "age"]);
    for q in PERCENTILES {
        let mut at_risk = vec![0u64; max_age as usize + 2];
        let mut first = vec![0u64; max_age as usize + 2];
        for team in &teams {
            let first_age = input.success[team.id.index()].first(q).map(|y| team.age_of(y));
            let last_at_risk = first_age.unwrap_or(team.duration_years()).min(team.duration_years());
            for a in 1..=last_at_risk {
                at_risk[a as usize] += 1;
            }
            if let Some(a) = first_age {
                first[a as usize] += 1;
            }
        }
        for age in 1..=max_age {
            let (hit, n) = (first[age as usize], at_risk[age as usize]);
            let keys = vec![q.label(), age.to_string()];
            if n == 0 {
                t.push_flagged(keys, Value::Missing { n }, "no_population");
            } else {
                t.push(keys, Value::percentage(hit, n));
            }
        }
    }
    t
}

pub const COMPOSITION_METRICS: [&str; 4] = ["orgs_pm", "cities_pm", "countries_pm", "dist_pm"];

/// Bin key: 0.25 steps for per-member counts, 10 km steps for distance.
pub fn composition_bin(metric: &str, value: f64) -> String {
    if metric == "dist_pm" {
        format!("{}", ((value + 1e-9) / 10.0).floor() as i64 * 10)
    } else {
        format!("{:.2}", ((value * 4.0) + 1e-9).floor() / 4.0)
    }
}

/// Probability that a team publication is top-q, with teams binned by each
/// composition metric and publications pooled within a bin.
pub fn success_by_composition(input: &AnalysisInput, cfg: &AnalysisConfig) -> SeriesTable {
    let mut t = SeriesTable::new("fig3", &["q", "metric", "bin"]);
    for q in PERCENTILES {
        for (mi, metric) in COMPOSITION_METRICS.iter().enumerate() {
            let mut bins: BTreeMap<i64, (String, u64, u64)> = BTreeMap::new();
            for team in eligible_teams(input, cfg).into_iter().filter(|t| !t.pubs.is_empty()) {
                let m = input.metrics[team.id.index()];
                let v = [m.orgs_per_member, m.cities_per_member, m.countries_per_member, m.mean_city_distance_per_member]
                    [mi];
                let label = composition_bin(metric, v);
                let order = (label.parse::<f64>().unwrap() * 100.0).round() as i64;
                let s = input.success[team.id.index()];
                let e = bins.entry(order).or_insert((label, 0, 0));
                e.1 += u64::from(s.count(q));
                e.2 += u64::from(s.n_pubs);
            }
            for (_, (label, hit, n)) in bins {
                t.push(vec![q.label(), metric.to_string(), label], Value::probability(hit, n));
            }
        }
    }
    t
}

/// Team-level (`fig5a`) or publication-level (`fig5b`) success keyed by
/// impulse type, source stratum and number of impulses, with closed teams
/// as baseline.
fn success_by_impulse_count(input: &AnalysisInput, cfg: &AnalysisConfig, per_pub: bool) -> SeriesTable {
    let name = if per_pub { "fig5b" } else { "fig5a" };
    let mut t = SeriesTable::new(name, &["q", "impulse", "stratum", "impulses"]);
    let teams = eligible_teams(input, cfg);
    for q in PERCENTILES {
        let measure = |team: &Team| -> (u64, u64) {
            let s = input.success[team.id.index()];
            if per_pub {
                (u64::from(s.count(q)), u64::from(s.n_pubs))
            } else {
                (u64::from(s.count(q) > 0), 1)
            }
        };
        let (mut hit, mut n) = (0, 0);
        for team in teams.iter().filter(|t| input.summaries[t.id.index()].is_closed()) {
            let (h, m) = measure(team);
            hit += h;
            n += m;
        }
        t.push(
            vec![q.label(), "closed".into(), SourceStratum::Any.as_str().into(), "0".into()],
            Value::probability(hit, n),
        );
        for impulse in Impulse::COUNTED {
            for stratum in SourceStratum::ALL {
                let mut cells: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
                for team in &teams {
                    let k = input.summaries[team.id.index()].counts(impulse).from_stratum(stratum);
                    if k > 0 {
                        let (h, m) = measure(team);
                        let c = cells.entry(k).or_default();
                        c.0 += h;
                        c.1 += m;
                    }
                }
                for (k, (hit, n)) in cells {
                    t.push(
                        vec![q.label(), impulse.as_str().into(), stratum.as_str().into(), k.to_string()],
                        Value::probability(hit, n),
                    );
                }
            }
        }
    }
    t
}

pub fn success_by_impulse_count_team(input: &AnalysisInput, cfg: &AnalysisConfig) -> SeriesTable {
    success_by_impulse_count(input, cfg, false)
}

pub fn success_by_impulse_count_pub(input: &AnalysisInput, cfg: &AnalysisConfig) -> SeriesTable {
    success_by_impulse_count(input, cfg, true)
}

/// Probability of at least one (or two) top-q publications, with open teams
/// binned by impulses per year in 0.25 steps and closed teams separate.
pub fn success_by_impulse_rate(input: &AnalysisInput, cfg: &AnalysisConfig) -> SeriesTable {
    let mut t = SeriesTable::new("fig5c", &["q", "at_least", "impulses_per_year"]);
    let teams = eligible_teams(input, cfg);
    for q in PERCENTILES {
        for at_least in [1u32, 2] {
            let mut closed = (0u64, 0u64);
            let mut bins: BTreeMap<i64, (u64, u64)> = BTreeMap::new();
            for team in &teams {
                let hit = u64::from(input.success[team.id.index()].count(q) >= at_least);
                let s = &input.summaries[team.id.index()];
                let cell = if s.is_closed() {
                    &mut closed
                } else {
                    bins.entry((s.impulses_per_year * 4.0 + 1e-9).floor() as i64).or_default()
                };
                cell.0 += hit;
                cell.1 += 1;
            }
            t.push(vec![q.label(), at_least.to_string(), "closed".into()], Value::probability(closed.0, closed.1));
            for (b, (hit, n)) in bins {
                t.push(
                    vec![q.label(), at_least.to_string(), format!("{:.2}", b as f64 / 4.0)],
                    Value::probability(hit, n),
                );
            }
        }
    }
    t
}

pub const SHIFT_CONDITIONS: [&str; 3] = ["persistence", "freshness", "early_persistence"];

/// How much earlier successful teams with a given kind of impulse reach
/// their first top-q publication than closed teams of the same cohort.
pub fn first_success_shift(input: &AnalysisInput, cfg: &AnalysisConfig) -> SeriesTable {
    let mut t = SeriesTable::new("fig5d", &["q", "duration", "condition", "measure"]);
    let teams = eligible_teams(input, cfg);
    for q in PERCENTILES {
        // (cohort, condition index or closed) -> (sum of first ages, teams)
        let mut sums: BTreeMap<((u32, u32), usize), (u64, u64)> = BTreeMap::new();
        const CLOSED: usize = usize::MAX;
        for team in &teams {
            let Some(first) = input.success[team.id.index()].first(q) else { continue };
            let age = u64::from(team.age_of(first));
            let s = &input.summaries[team.id.index()];
            let cohort = cfg.cohort(team.duration_years());
            let mut add = |k: usize| {
                let e = sums.entry((cohort, k)).or_default();
                e.0 += age;
                e.1 += 1;
            };
            if s.is_closed() {
                add(CLOSED);
            }
            let present = [s.persistence.total > 0, s.freshness.total > 0, s.early_persistence(q) > 0];
            for (i, _) in present.iter().enumerate().filter(|(_, &p)| p) {
                add(i);
            }
        }
        let cohorts: BTreeSet<(u32, u32)> = sums.keys().map(|k| k.0).collect();
        for cohort in cohorts {
            let label = cfg.cohort_label(cohort.0);
            let closed = sums.get(&(cohort, CLOSED)).map(|&(s, n)| (s as f64 / n as f64, n));
            if let Some((mean, n)) = closed {
                t.push(
                    vec![q.label(), label.clone(), "closed".into(), "mean_first_age".into()],
                    Value::Mean { value: mean, n },
                );
            }
            for (i, cond) in SHIFT_CONDITIONS.iter().enumerate() {
                let Some(&(sum, n)) = sums.get(&(cohort, i)) else { continue };
                let keys = vec![q.label(), label.clone(), cond.to_string(), "decrease".into()];
                match closed {
                    Some((base, _)) => t.push(keys, Value::Mean { value: base - sum as f64 / n as f64, n }),
                    None => t.push_flagged(keys, Value::Missing { n }, "no_closed_baseline"),
                }
            }
        }
    }
    t
}

/// Every table, in file order.
pub fn all_tables(input: &AnalysisInput, cfg: &AnalysisConfig) -> Vec<SeriesTable> {
    type Builder = fn(&AnalysisInput, &AnalysisConfig) -> SeriesTable;
    let builders: [Builder; 10] = [
        |i, _| team_prevalence_by_year(i.pubs, i.teams, i.tags),
        |i, _| team_prevalence_by_country(i.pubs, i.teams),
        success_prob_by_age,
        first_success_distribution,
        newly_successful_rate,
        success_by_composition,
        success_by_impulse_count_team,
        success_by_impulse_count_pub,
        success_by_impulse_rate,
        first_success_shift,
    ];
    builders.par_iter().map(|b| b(input, cfg)).collect()
}

//! Three-year citation counts and per (field, year) percentile tagging.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CitationTable, PublicationTable};
use crate::{FieldId, PubIdx, Year};

/// Which three calendar years count towards a publication's citations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CitationWindow {
    /// `[Y, Y+2]`: the publication year and the two following years.
    #[default]
    IncludePublicationYear,
    /// `[Y+1, Y+3]`.
    FollowingYears,
}

impl CitationWindow {
    pub fn range(&self, pub_year: Year) -> (Year, Year) {
        match self {
            CitationWindow::IncludePublicationYear => (pub_year, pub_year + 2),
            CitationWindow::FollowingYears => (pub_year + 1, pub_year + 3),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CitationWindow::IncludePublicationYear => "inclusive",
            CitationWindow::FollowingYears => "following",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "inclusive" => Some(CitationWindow::IncludePublicationYear),
            "following" => Some(CitationWindow::FollowingYears),
            _ => None,
        }
    }
}

/// Citations received inside the window, indexed by [`PubIdx`].
pub fn three_year_citations(pubs: &PublicationTable, citations: &CitationTable, window: CitationWindow) -> Vec<u32> {
    let mut counts = vec![0u32; pubs.len()];
    for e in citations.events() {
        let (lo, hi) = window.range(pubs.get(e.cited).year);
        if lo <= e.citing_year && e.citing_year <= hi {
            counts[e.cited.index()] += 1;
        }
    }
    counts
}

/// A top-q percentile, stored in basis points so cutoff ranks are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Percentile {
    basis_points: u32,
}

impl Percentile {
    pub const TOP1: Percentile = Percentile { basis_points: 100 };
    pub const TOP10: Percentile = Percentile { basis_points: 1000 };

    pub fn from_basis_points(basis_points: u32) -> Option<Percentile> {
        (1..=10_000).contains(&basis_points).then_some(Percentile { basis_points })
    }

    pub fn basis_points(&self) -> u32 {
        self.basis_points
    }

    pub fn fraction(&self) -> f64 {
        f64::from(self.basis_points) / 10_000.0
    }

    /// `ceil(q * n)`.
    pub fn cutoff_rank(&self, n: usize) -> usize {
        let scaled = n as u64 * u64::from(self.basis_points);
        scaled.div_ceil(10_000) as usize
    }

    /// Short label used in table keys ("top1", "top10", otherwise "top{bp}bp").
    pub fn label(&self) -> String {
        if self.basis_points.is_multiple_of(100) {
            format!("top{}", self.basis_points / 100)
        } else {
            format!("top{}bp", self.basis_points)
        }
    }
}

impl fmt::Display for Percentile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PercentileThreshold {
    pub field: FieldId,
    pub year: Year,
    pub q: Percentile,
    /// Minimum three-year citation count that qualifies (never below 1).
    pub threshold: u32,
    pub population: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdTable {
    pub q: Percentile,
    cells: BTreeMap<(FieldId, Year), PercentileThreshold>,
}

impl ThresholdTable {
    pub fn get(&self, field: FieldId, year: Year) -> Option<&PercentileThreshold> {
        self.cells.get(&(field, year))
    }

    pub fn cells(&self) -> impl Iterator<Item = &PercentileThreshold> {
        self.cells.values()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Groups citation counts by (field, year) cell.
fn cells(pubs: &PublicationTable, counts: &[u32]) -> BTreeMap<(FieldId, Year), Vec<u32>> {
    let mut out: BTreeMap<(FieldId, Year), Vec<u32>> = BTreeMap::new();
    for (idx, p) in pubs.iter() {
        for &f in &p.fields {
            out.entry((f, p.year)).or_default().push(counts[idx.index()]);
        }
    }
    out
}

/// Per cell: rank by count descending, take the count at rank `ceil(q*N)`,
/// floor it at 1 so an all-zero cell has no successes.
pub fn percentile_thresholds(pubs: &PublicationTable, counts: &[u32], q: Percentile) -> ThresholdTable {
    let grouped: Vec<((FieldId, Year), Vec<u32>)> = cells(pubs, counts).into_iter().collect();
    let cells = grouped
        .into_par_iter()
        .map(|((field, year), mut values)| {
            values.sort_unstable_by(|a, b| b.cmp(a));
            let k = q.cutoff_rank(values.len()).max(1);
            let threshold = values[k - 1].max(1);
            (
                (field, year),
                PercentileThreshold { field, year, q, threshold, population: values.len() as u32 },
            )
        })
        .collect();
    ThresholdTable { q, cells }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuccessTag {
    pub citations_3y: u32,
    pub top10: bool,
    pub top1: bool,
}

impl SuccessTag {
    pub fn is_top(&self, q: Percentile) -> bool {
        if q == Percentile::TOP1 {
            self.top1
        } else if q == Percentile::TOP10 {
            self.top10
        } else {
            panic!("only top1/top10 tags are stored, asked for {q}")
        }
    }
}

/// Success tags indexed by [`PubIdx`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuccessTags {
    tags: Vec<SuccessTag>,
}

impl SuccessTags {
    pub fn from_tags(tags: Vec<SuccessTag>) -> Self {
        SuccessTags { tags }
    }

    pub fn get(&self, idx: PubIdx) -> SuccessTag {
        self.tags[idx.index()]
    }

    pub fn is_top(&self, idx: PubIdx, q: Percentile) -> bool {
        self.get(idx).is_top(q)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PubIdx, SuccessTag)> + '_ {
        self.tags.iter().enumerate().map(|(i, t)| (PubIdx::from(i), *t))
    }

    /// `success_tags.csv`: `pub_id,citations_3y,top10,top1`.
    pub fn write_csv<W: Write>(&self, pubs: &PublicationTable, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["pub_id", "citations_3y", "top10", "top1"])?;
        for (idx, t) in self.iter() {
            out.write_record([
                pubs.get(idx).pub_id.as_str(),
                &t.citations_3y.to_string(),
                if t.top10 { "1" } else { "0" },
                if t.top1 { "1" } else { "0" },
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn qualifies(p: &crate::corpus::Publication, count: u32, table: &ThresholdTable) -> bool {
    p.fields.iter().any(|&f| {
        let cell = table
            .get(f, p.year)
            .unwrap_or_else(|| panic!("no threshold for field {f:?} year {}", p.year));
        count >= cell.threshold
    })
}

/// A publication is top-q when it reaches the threshold in any of its cells.
pub fn tag_success(pubs: &PublicationTable, counts: &[u32], top10: &ThresholdTable, top1: &ThresholdTable) -> SuccessTags {
    assert_eq!(top10.q, Percentile::TOP10);
    assert_eq!(top1.q, Percentile::TOP1);
    let tags = pubs
        .publications()
        .par_iter()
        .zip(counts.par_iter())
        .map(|(p, &c)| SuccessTag { citations_3y: c, top10: qualifies(p, c, top10), top1: qualifies(p, c, top1) })
        .collect();
    SuccessTags { tags }
}

/// Counts, both threshold tables and the tags in one call.
pub fn compute_success(
    pubs: &PublicationTable,
    citations: &CitationTable,
    window: CitationWindow,
) -> (SuccessTags, ThresholdTable, ThresholdTable) {
    let counts = three_year_citations(pubs, citations, window);
    let t10 = percentile_thresholds(pubs, &counts, Percentile::TOP10);
    let t1 = percentile_thresholds(pubs, &counts, Percentile::TOP1);
    let tags = tag_success(pubs, &counts, &t10, &t1);
    (tags, t10, t1)
}

/// `thresholds.csv`: `field,year,q,threshold,population` for both tables.
pub fn write_thresholds_csv<W: Write>(pubs: &PublicationTable, tables: &[&ThresholdTable], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["field", "year", "q", "threshold", "population"])?;
    for t in tables {
        for c in t.cells() {
            out.write_record([
                pubs.field_name(c.field),
                &c.year.to_string(),
                &c.q.label(),
                &c.threshold.to_string(),
                &c.population.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

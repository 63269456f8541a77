//! Temporal co-authorship network: publication years per author pair.

use std::io::Write;

use rayon::prelude::*;

use crate::corpus::PublicationTable;
use crate::{AuthorId, Year};

/// Unordered author pair, smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AuthorPair {
    pub a: AuthorId,
    pub b: AuthorId,
}

impl AuthorPair {
    pub fn new(x: AuthorId, y: AuthorId) -> Self {
        assert_ne!(x, y, "self pair");
        if x < y {
            AuthorPair { a: x, b: y }
        } else {
            AuthorPair { a: y, b: x }
        }
    }

    fn key(&self) -> u64 {
        (u64::from(self.a.0) << 32) | u64::from(self.b.0)
    }

    fn from_key(k: u64) -> Self {
        AuthorPair { a: AuthorId((k >> 32) as u32), b: AuthorId(k as u32) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTimeline {
    pub pair: AuthorPair,
    /// Ascending, with one entry per joint publication.
    pub years: Vec<Year>,
}

/// All pair timelines, sorted by pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairTimelines {
    timelines: Vec<PairTimeline>,
}

impl PairTimelines {
    pub fn from_sorted(timelines: Vec<PairTimeline>) -> Self {
        debug_assert!(timelines.windows(2).all(|w| w[0].pair < w[1].pair));
        PairTimelines { timelines }
    }

    pub fn as_slice(&self) -> &[PairTimeline] {
        &self.timelines
    }

    pub fn len(&self) -> usize {
        self.timelines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timelines.is_empty()
    }

    pub fn get(&self, pair: AuthorPair) -> Option<&PairTimeline> {
        self.timelines.binary_search_by(|t| t.pair.cmp(&pair)).ok().map(|i| &self.timelines[i])
    }

    /// `pair_timelines.csv`: `author_a,author_b,years` (years `;`-separated).
    pub fn write_csv<W: Write>(&self, pubs: &PublicationTable, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["author_a", "author_b", "years"])?;
        for t in &self.timelines {
            let years: Vec<String> = t.years.iter().map(Year::to_string).collect();
            out.write_record([pubs.author_name(t.pair.a), pubs.author_name(t.pair.b), &years.join(";")])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// One timeline per co-authoring pair. Publications with more than
/// `author_cap` authors are skipped here (they stay in the corpus).
pub fn build_pair_timelines(pubs: &PublicationTable, author_cap: Option<usize>) -> PairTimelines {
    let mut entries: Vec<(u64, Year)> = pubs
        .publications()
        .par_iter()
        .filter(|p| author_cap.is_none_or(|cap| p.authors.len() <= cap))
        .flat_map_iter(|p| {
            let n = p.authors.len();
            let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
            for (i, x) in p.authors.iter().enumerate() {
                for y in &p.authors[i + 1..] {
                    out.push((AuthorPair::new(x.author, y.author).key(), p.year));
                }
            }
            out
        })
        .collect();
    entries.par_sort_unstable();

    let mut timelines: Vec<PairTimeline> = Vec::new();
    for (key, year) in entries {
        match timelines.last_mut() {
            Some(t) if t.pair.key() == key => t.years.push(year),
            _ => timelines.push(PairTimeline { pair: AuthorPair::from_key(key), years: vec![year] }),
        }
    }
    PairTimelines { timelines }
}

//! Persistent collaboration network.
//!
//! A pair is persistent inside any window of `window_len` consecutive
//! calendar years holding at least `min_pubs` joint publications. Each such
//! window marks the stretch from its first to its last joint publication;
//! the pair's persistent periods are the union of all marked stretches, with
//! overlapping or adjacent stretches merged.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coauthor::{AuthorPair, PairTimelines};
use crate::corpus::PublicationTable;
use crate::{merge_spans, Span, Year};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersistenceParams {
    /// Window length in inclusive calendar years.
    pub window_len: u32,
    pub min_pubs: u32,
}

impl Default for PersistenceParams {
    fn default() -> Self {
        PersistenceParams { window_len: 5, min_pubs: 3 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid persistence parameters: window_len={window_len}, min_pubs={min_pubs} (both must be >= 1)")]
pub struct InvalidParams {
    pub window_len: u32,
    pub min_pubs: u32,
}

impl PersistenceParams {
    pub fn validate(&self) -> Result<(), InvalidParams> {
        if self.window_len >= 1 && self.min_pubs >= 1 {
            Ok(())
        } else {
            Err(InvalidParams { window_len: self.window_len, min_pubs: self.min_pubs })
        }
    }
}

/// Persistent periods of one pair. `years` must be sorted ascending.
///
/// Only windows starting on a publication year need checking: sliding a
/// window's start forward to its first publication keeps every publication
/// it held and can only add later ones.
pub fn persistent_periods(years: &[Year], params: PersistenceParams) -> Vec<Span> {
    debug_assert!(years.windows(2).all(|w| w[0] <= w[1]), "years not sorted");
    let min_pubs = params.min_pubs.max(1) as usize;
    let reach = params.window_len.max(1) as Year - 1;
    let mut marked = Vec::new();
    let mut hi = 0usize;
    let mut i = 0usize;
    while i < years.len() {
        let start = years[i];
        hi = hi.max(i);
        while hi + 1 < years.len() && years[hi + 1] <= start + reach {
            hi += 1;
        }
        if hi + 1 - i >= min_pubs {
            marked.push(Span::new(start, years[hi]));
        }
        // next distinct start year
        while i < years.len() && years[i] == start {
            i += 1;
        }
    }
    merge_spans(marked)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistentEdge {
    pub pair: AuthorPair,
    /// Sorted, disjoint, with at least one gap year between neighbours.
    pub periods: Vec<Span>,
}

impl PersistentEdge {
    /// The period containing all of `span`, if any.
    pub fn covering(&self, span: Span) -> Option<Span> {
        let i = self.periods.partition_point(|p| p.end < span.end);
        self.periods.get(i).copied().filter(|p| p.covers(&span))
    }
}

/// Persistent edges sorted by pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PersistentNetwork {
    edges: Vec<PersistentEdge>,
}

impl PersistentNetwork {
    pub fn from_edges(mut edges: Vec<PersistentEdge>) -> Self {
        edges.retain(|e| !e.periods.is_empty());
        edges.sort_by_key(|e| e.pair);
        edges.dedup_by_key(|e| e.pair);
        PersistentNetwork { edges }
    }

    pub fn edges(&self) -> &[PersistentEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn get(&self, pair: AuthorPair) -> Option<&PersistentEdge> {
        self.edges.binary_search_by(|e| e.pair.cmp(&pair)).ok().map(|i| &self.edges[i])
    }

    /// `persistent_edges.csv`: `author_a,author_b,periods` (`start-end`, `;`-separated).
    pub fn write_csv<W: Write>(&self, pubs: &PublicationTable, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["author_a", "author_b", "periods"])?;
        for e in &self.edges {
            let periods: Vec<String> = e.periods.iter().map(Span::to_string).collect();
            out.write_record([pubs.author_name(e.pair.a), pubs.author_name(e.pair.b), &periods.join(";")])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn build_persistent_network(timelines: &PairTimelines, params: PersistenceParams) -> PersistentNetwork {
    let edges = timelines
        .as_slice()
        .par_iter()
        .filter_map(|t| {
            let periods = persistent_periods(&t.years, params);
            (!periods.is_empty()).then_some(PersistentEdge { pair: t.pair, periods })
        })
        .collect();
    PersistentNetwork { edges }
}

//! Temporal maximal clique enumeration over a persistent network.
//!
//! With window length 1 and minimum weight 1, an author pair is connected in
//! year `t` exactly when one of its persistent periods contains `t`. A
//! temporal clique is a member set together with a span `[x, y]` such that
//! every member pair is connected in every year of the span. It is maximal
//! when no outside author is connected to every member throughout the span
//! and the span cannot grow by a year on either side.
//!
//! Strategy: for a member set `M` fully connected on `[x, y]`, each pair's
//! connection comes from a single period, so `M` stays connected exactly on
//! `[max start, min end]` over those periods. Hence a maximal clique's span
//! starts on some period start and ends on some period end. For each such
//! candidate span we build the static graph of pairs whose period covers the
//! span, enumerate its maximal cliques with pivoting Bron-Kerbosch in
//! degeneracy order, and keep the cliques whose covering periods pin the
//! span exactly. Each maximal temporal clique is produced once, by its own
//! span.

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coauthor::AuthorPair;
use crate::corpus::PublicationTable;
use crate::persistence::PersistentNetwork;
use crate::{AuthorId, Span, Year};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueParams {
    /// Window length in years; only 1 is supported.
    pub delta: u32,
    /// Minimum edge weight per window; only 1 is supported.
    pub gamma: u32,
    pub min_size: usize,
}

impl Default for CliqueParams {
    fn default() -> Self {
        CliqueParams { delta: 1, gamma: 1, min_size: 2 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliqueError {
    #[error("unsupported clique parameters delta={delta}, gamma={gamma}, min_size={min_size}: need delta=1, gamma=1, min_size>=2")]
    UnsupportedParams { delta: u32, gamma: u32, min_size: usize },
    #[error("brute-force oracle limited to 14 authors and 10 years, got {authors} authors over {years} years")]
    OracleTooLarge { authors: usize, years: u32 },
}

impl CliqueParams {
    pub fn validate(&self) -> Result<(), CliqueError> {
        if self.delta == 1 && self.gamma == 1 && self.min_size >= 2 {
            Ok(())
        } else {
            Err(CliqueError::UnsupportedParams { delta: self.delta, gamma: self.gamma, min_size: self.min_size })
        }
    }
}

/// Ordered by member list, then span.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalClique {
    /// Sorted ascending.
    pub members: Vec<AuthorId>,
    pub span: Span,
}

/// Static graph of all pairs whose persistent period covers one span.
struct SpanGraph {
    vertices: Vec<AuthorId>,
    nbrs: Vec<Vec<u32>>,
    periods: Vec<Vec<Span>>,
}

impl SpanGraph {
    fn build(net: &PersistentNetwork, span: Span) -> Self {
        let active: Vec<(AuthorPair, Span)> =
            net.edges().iter().filter_map(|e| e.covering(span).map(|p| (e.pair, p))).collect();
        let mut vertices: Vec<AuthorId> = active.iter().flat_map(|(p, _)| [p.a, p.b]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let local = |a: AuthorId| vertices.binary_search(&a).expect("endpoint listed") as u32;
        let mut adj: Vec<Vec<(u32, Span)>> = vec![Vec::new(); vertices.len()];
        for (pair, period) in &active {
            let (u, v) = (local(pair.a), local(pair.b));
            adj[u as usize].push((v, *period));
            adj[v as usize].push((u, *period));
        }
        let mut nbrs = Vec::with_capacity(adj.len());
        let mut periods = Vec::with_capacity(adj.len());
        for mut list in adj {
            list.sort_unstable_by_key(|(v, _)| *v);
            nbrs.push(list.iter().map(|(v, _)| *v).collect());
            periods.push(list.into_iter().map(|(_, p)| p).collect());
        }
        SpanGraph { vertices, nbrs, periods }
    }

    fn period(&self, u: u32, v: u32) -> Span {
        let i = self.nbrs[u as usize].binary_search(&v).expect("clique members are adjacent");
        self.periods[u as usize][i]
    }

    /// Vertices in smallest-last (degeneracy) order.
    fn degeneracy_order(&self) -> Vec<u32> {
        let n = self.vertices.len();
        let mut degree: Vec<usize> = self.nbrs.iter().map(Vec::len).collect();
        let max_deg = degree.iter().copied().max().unwrap_or(0);
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); max_deg + 1];
        for (v, &d) in degree.iter().enumerate() {
            buckets[d].push(v as u32);
        }
        let mut removed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut d = 0;
        while order.len() < n {
            d = d.min(max_deg);
            while buckets[d].is_empty() {
                d += 1;
            }
            let v = buckets[d].pop().unwrap();
            if removed[v as usize] || degree[v as usize] != d {
                continue;
            }
            removed[v as usize] = true;
            order.push(v);
            for &w in &self.nbrs[v as usize] {
                let w = w as usize;
                if !removed[w] {
                    degree[w] -= 1;
                    buckets[degree[w]].push(w as u32);
                }
            }
            d = d.saturating_sub(1);
        }
        order
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersect_len(a: &[u32], b: &[u32]) -> usize {
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

fn bron_kerbosch(g: &SpanGraph, r: &mut Vec<u32>, mut p: Vec<u32>, mut x: Vec<u32>, emit: &mut dyn FnMut(&[u32])) {
    if p.is_empty() {
        if x.is_empty() {
            emit(r);
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| (intersect_len(&g.nbrs[u as usize], &p), std::cmp::Reverse(u)))
        .expect("p non-empty");
    let pivot_nbrs = &g.nbrs[pivot as usize];
    let branch: Vec<u32> = p.iter().copied().filter(|v| pivot_nbrs.binary_search(v).is_err()).collect();
    for v in branch {
        let nv = &g.nbrs[v as usize];
        r.push(v);
        bron_kerbosch(g, r, intersect(&p, nv), intersect(&x, nv), emit);
        r.pop();
        let pos = p.binary_search(&v).expect("branch vertex in p");
        p.remove(pos);
        let pos = x.binary_search(&v).unwrap_err();
        x.insert(pos, v);
    }
}

fn mine_span(net: &PersistentNetwork, span: Span, min_size: usize) -> Vec<TemporalClique> {
    let g = SpanGraph::build(net, span);
    if g.vertices.is_empty() {
        return Vec::new();
    }
    let order = g.degeneracy_order();
    let mut rank = vec![0usize; order.len()];
    for (i, &v) in order.iter().enumerate() {
        rank[v as usize] = i;
    }
    order
        .par_iter()
        .flat_map_iter(|&v| {
            let nv = &g.nbrs[v as usize];
            let p: Vec<u32> = nv.iter().copied().filter(|&w| rank[w as usize] > rank[v as usize]).collect();
            let x: Vec<u32> = nv.iter().copied().filter(|&w| rank[w as usize] < rank[v as usize]).collect();
            let mut found = Vec::new();
            let mut r = vec![v];
            bron_kerbosch(&g, &mut r, p, x, &mut |clique: &[u32]| {
                if clique.len() < min_size {
                    return;
                }
                let mut lo = Year::MIN;
                let mut hi = Year::MAX;
                for (i, &a) in clique.iter().enumerate() {
                    for &b in &clique[i + 1..] {
                        let p = g.period(a, b);
                        lo = lo.max(p.start);
                        hi = hi.min(p.end);
                    }
                }
                if lo == span.start && hi == span.end {
                    let mut members: Vec<AuthorId> = clique.iter().map(|&u| g.vertices[u as usize]).collect();
                    members.sort_unstable();
                    found.push(TemporalClique { members, span });
                }
            });
            found
        })
        .collect()
}

/// All maximal temporal cliques, sorted by (members, span).
pub fn enumerate_maximal_cliques(net: &PersistentNetwork, params: CliqueParams) -> Result<Vec<TemporalClique>, CliqueError> {
    params.validate()?;
    let mut starts = BTreeSet::new();
    let mut ends = BTreeSet::new();
    for e in net.edges() {
        for p in &e.periods {
            starts.insert(p.start);
            ends.insert(p.end);
        }
    }
    let spans: Vec<Span> = starts
        .iter()
        .flat_map(|&s| ends.range(s..).map(move |&e| Span::new(s, e)))
        .collect();
    let mut cliques: Vec<TemporalClique> =
        spans.par_iter().flat_map_iter(|&span| mine_span(net, span, params.min_size)).collect();
    cliques.par_sort_unstable();
    debug_assert!(cliques.windows(2).all(|w| w[0] != w[1]), "duplicate clique");
    Ok(cliques)
}

/// Every member pair has one persistent period covering `span`.
pub fn is_clique(net: &PersistentNetwork, members: &[AuthorId], span: Span) -> bool {
    members.iter().enumerate().all(|(i, &a)| {
        members[i + 1..].iter().all(|&b| {
            a != b && net.get(AuthorPair::new(a, b)).is_some_and(|e| e.covering(span).is_some())
        })
    })
}

/// Connected, not extendable by one year on either side, and no outside
/// author is connected to all members throughout the span.
pub fn is_maximal_clique(net: &PersistentNetwork, clique: &TemporalClique) -> bool {
    let TemporalClique { members, span } = clique;
    if !is_clique(net, members, *span) {
        return false;
    }
    if is_clique(net, members, Span::new(span.start - 1, span.end))
        || is_clique(net, members, Span::new(span.start, span.end + 1))
    {
        return false;
    }
    let first = members[0];
    let outsiders = net
        .edges()
        .iter()
        .filter_map(|e| {
            if e.pair.a == first {
                Some(e.pair.b)
            } else if e.pair.b == first {
                Some(e.pair.a)
            } else {
                None
            }
        })
        .filter(|c| !members.contains(c));
    for candidate in outsiders {
        let mut extended = members.clone();
        extended.push(candidate);
        if is_clique(net, &extended, *span) {
            return false;
        }
    }
    true
}

/// Exhaustive reference enumeration for small networks (at most 14 authors
/// over at most 10 years): every member subset and span is tested for full
/// connectivity, then every entry dominated by another entry with a superset
/// of members and a covering span is removed.
pub fn brute_force_cliques(net: &PersistentNetwork, params: CliqueParams) -> Result<Vec<TemporalClique>, CliqueError> {
    params.validate()?;
    let mut authors: Vec<AuthorId> = net.edges().iter().flat_map(|e| [e.pair.a, e.pair.b]).collect();
    authors.sort_unstable();
    authors.dedup();
    if authors.is_empty() {
        return Ok(Vec::new());
    }
    let lo = net.edges().iter().flat_map(|e| e.periods.iter().map(|p| p.start)).min().unwrap();
    let hi = net.edges().iter().flat_map(|e| e.periods.iter().map(|p| p.end)).max().unwrap();
    let n_years = (hi - lo + 1) as u32;
    if authors.len() > 14 || n_years > 10 {
        return Err(CliqueError::OracleTooLarge { authors: authors.len(), years: n_years });
    }
    let n = authors.len();
    let mut year_mask = vec![vec![0u16; n]; n];
    for e in net.edges() {
        let i = authors.binary_search(&e.pair.a).unwrap();
        let j = authors.binary_search(&e.pair.b).unwrap();
        let mut m = 0u16;
        for p in &e.periods {
            for y in p.start..=p.end {
                m |= 1 << (y - lo);
            }
        }
        year_mask[i][j] = m;
        year_mask[j][i] = m;
    }

    // (member bitmask, span) for every fully connected combination.
    let mut valid: Vec<(u32, Span)> = Vec::new();
    for subset in 1u32..(1 << n) {
        if (subset.count_ones() as usize) < params.min_size {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| subset & (1 << i) != 0).collect();
        for x in lo..=hi {
            for y in x..=hi {
                let mut span_mask = 0u16;
                for t in x..=y {
                    span_mask |= 1 << (t - lo);
                }
                let connected = idx.iter().enumerate().all(|(k, &i)| {
                    idx[k + 1..].iter().all(|&j| year_mask[i][j] & span_mask == span_mask)
                });
                if connected {
                    valid.push((subset, Span::new(x, y)));
                }
            }
        }
    }

    // A strict dominator has a larger member count or a longer span, so
    // visiting in decreasing (members + years) order sees it first.
    valid.sort_by_key(|(m, s)| std::cmp::Reverse(m.count_ones() + s.years()));
    let mut kept: Vec<(u32, Span)> = Vec::new();
    for (mask, span) in valid {
        let dominated = kept.iter().any(|&(km, ks)| km & mask == mask && ks.covers(&span));
        if !dominated {
            kept.push((mask, span));
        }
    }

    let mut out: Vec<TemporalClique> = kept
        .into_iter()
        .map(|(mask, span)| TemporalClique {
            members: (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| authors[i]).collect(),
            span,
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// `cliques.csv`: `members,start,end` (members `;`-separated, sorted).
pub fn write_cliques_csv<W: Write>(pubs: &PublicationTable, cliques: &[TemporalClique], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["members", "start", "end"])?;
    for c in cliques {
        let members: Vec<&str> = c.members.iter().map(|&a| pubs.author_name(a)).collect();
        out.write_record([members.join(";"), c.span.start.to_string(), c.span.end.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

//! Acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p persteam --test acceptance`. The scale check reads
//! `PERSTEAM_SCALE_PUBS` (default 1,000,000 publications, authors at 30% of
//! that); set it to 0 to skip.

use std::collections::{BTreeSet, HashSet};
use std::io::Cursor;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use persteam::cliques::{brute_force_cliques, enumerate_maximal_cliques, CliqueParams, TemporalClique};
use persteam::coauthor::{build_pair_timelines, AuthorPair};
use persteam::corpus::{read_citations, read_publications, CitationTable, IngestConfig, PublicationTable, RawPublication};
use persteam::overlap::{find_overlap_candidates, Classified, Impulse, OverlapKind, Timing};
use persteam::persistence::{build_persistent_network, persistent_periods, PersistenceParams, PersistentEdge, PersistentNetwork};
use persteam::pipeline::{analyze, Analysis, Pipeline, PipelineConfig, Stage};
use persteam::success::{percentile_thresholds, tag_success, Percentile};
use persteam::synth::{generate_corpus, verify_against_truth, SynthConfig, SynthCorpus};
use persteam::teams::Team;
use persteam::{AuthorId, Span, Year};

type Outcome = Result<String, String>;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn load(corpus: &SynthCorpus) -> (PublicationTable, CitationTable) {
    let mut text = Vec::new();
    corpus.write_publications(&mut text).unwrap();
    let (pubs, _) = read_publications(Cursor::new(text), &IngestConfig { window: Some(corpus.truth.years) }).unwrap();
    let mut cits = Vec::new();
    corpus.write_citations(&mut cits).unwrap();
    let (cits, _) = read_citations(Cursor::new(cits), &pubs).unwrap();
    (pubs, cits)
}

fn run_config(years: (Year, Year), margin: u32) -> PipelineConfig {
    PipelineConfig { window: Some(years), margin, ..Default::default() }
}

fn mine(corpus: &SynthCorpus, margin: u32) -> (PublicationTable, Analysis) {
    let (pubs, cits) = load(corpus);
    let analysis = analyze(&pubs, &cits, &run_config(corpus.truth.years, margin)).unwrap();
    (pubs, analysis)
}

// Persistence oracle: slide every five-year window over the calendar, mark
// the stretch between the first and last publication of each qualifying
// window, and read off the runs of marked years.
fn window_union(years: &[Year]) -> Vec<Span> {
    let (Some(&lo), Some(&hi)) = (years.iter().min(), years.iter().max()) else { return Vec::new() };
    let mut marked = vec![false; (hi - lo + 1) as usize];
    for w in lo - 4..=hi {
        let inside: Vec<Year> = years.iter().copied().filter(|&y| y >= w && y <= w + 4).collect();
        if inside.len() >= 3 {
            let (a, b) = (*inside.iter().min().unwrap(), *inside.iter().max().unwrap());
            for y in a..=b {
                marked[(y - lo) as usize] = true;
            }
        }
    }
    let mut out = Vec::new();
    let mut run: Option<Year> = None;
    for (i, &m) in marked.iter().chain([&false]).enumerate() {
        let y = lo + i as Year;
        match (m, run) {
            (true, None) => run = Some(y),
            (false, Some(s)) => {
                out.push(Span::new(s, y - 1));
                run = None;
            }
            _ => {}
        }
    }
    out
}

// Clique oracle: every member subset and span, kept when all pairs are
// active in every year and neither one more member nor one more year fits.
fn oracle_cliques(net: &PersistentNetwork, n: u32, years: (Year, Year)) -> BTreeSet<TemporalClique> {
    let active = |a: u32, b: u32, y: Year| {
        net.get(AuthorPair::new(AuthorId(a), AuthorId(b)))
            .is_some_and(|e| e.periods.iter().any(|p| p.contains(y)))
    };
    let is_clique = |mask: u32, s: Year, e: Year| {
        let m: Vec<u32> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        (s..=e).all(|y| m.iter().enumerate().all(|(i, &a)| m[i + 1..].iter().all(|&b| active(a, b, y))))
    };
    let mut out = BTreeSet::new();
    for mask in 1u32..1 << n {
        if mask.count_ones() < 2 {
            continue;
        }
        for s in years.0..=years.1 {
            for e in s..=years.1 {
                if !is_clique(mask, s, e) {
                    continue;
                }
                let grows = (0..n).any(|x| mask >> x & 1 == 0 && is_clique(mask | 1 << x, s, e))
                    || (s > years.0 && is_clique(mask, s - 1, e))
                    || (e < years.1 && is_clique(mask, s, e + 1));
                if !grows {
                    let members = (0..n).filter(|i| mask >> i & 1 == 1).map(AuthorId).collect();
                    out.insert(TemporalClique { members, span: Span::new(s, e) });
                }
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let corpus = generate_corpus(&SynthConfig::fig_s1()).map_err(|e| e.to_string())?;
    let (pubs, cits) = load(&corpus);
    let timelines = build_pair_timelines(&pubs, None);
    let net = build_persistent_network(&timelines, PersistenceParams::default());
    let id = |n: &str| pubs.author_id(n).unwrap();
    let pair = |a: &str, b: &str| AuthorPair::new(id(a), id(b));
    let periods = |a: &str, b: &str| net.get(pair(a, b)).map(|e| e.periods.clone()).unwrap_or_default();

    for t in timelines.as_slice() {
        let got = net.get(t.pair).map(|e| e.periods.clone()).unwrap_or_default();
        check!(got == window_union(&t.years), "pair {:?} periods {got:?} differ from the window oracle", t.pair);
    }
    check!(periods("A", "B") == vec![Span::new(2, 6)], "AB periods {:?}", periods("A", "B"));
    check!(timelines.get(pair("C", "D")).is_some(), "C and D never co-author");
    check!(net.get(pair("C", "D")).is_none(), "CD has a persistent edge {:?}", periods("C", "D"));

    let analysis = analyze(&pubs, &cits, &run_config((1, 8), 0)).map_err(|e| e.to_string())?;
    let abc: Vec<AuthorId> = ["A", "B", "C"].iter().map(|n| id(n)).collect();
    let team = analysis.teams.iter().find(|t| t.members == abc);
    check!(team.is_some_and(|t| t.intervals == vec![Span::new(2, 5)]), "team ABC is {team:?}");
    let elapsed = t0.elapsed();
    check!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("AB [2,6], no CD edge, team ABC [2,5], {} teams, {elapsed:.0?}", analysis.teams.len()))
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut cliques = 0usize;
    let networks = 1000;
    for _ in 0..networks {
        let n = rng.random_range(2..=10u32);
        let years = (1, rng.random_range(1..=8));
        let density = rng.random_range(0.2..0.95);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if !rng.random_bool(density) {
                    continue;
                }
                let spans = (0..rng.random_range(1..=3))
                    .map(|_| {
                        let s = rng.random_range(years.0..=years.1);
                        Span::new(s, rng.random_range(s..=years.1))
                    })
                    .collect();
                edges.push(PersistentEdge { pair: AuthorPair::new(AuthorId(a), AuthorId(b)), periods: persteam::merge_spans(spans) });
            }
        }
        let net = PersistentNetwork::from_edges(edges);
        let fast: BTreeSet<TemporalClique> =
            enumerate_maximal_cliques(&net, CliqueParams::default()).unwrap().into_iter().collect();
        let brute: BTreeSet<TemporalClique> =
            brute_force_cliques(&net, CliqueParams::default()).unwrap().into_iter().collect();
        let oracle = oracle_cliques(&net, n, years);
        check!(fast == brute, "enumeration differs from brute force on {net:?}");
        check!(fast == oracle, "enumeration differs from the subset oracle on {net:?}");
        cliques += fast.len();
    }
    let elapsed = t0.elapsed();
    check!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{networks} networks, {cliques} cliques, all equal, {elapsed:.1?}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = 10_000;
    let mut nonempty = 0;
    for _ in 0..cases {
        let span = rng.random_range(1..=15);
        let len = rng.random_range(0..=12);
        let mut years: Vec<Year> = (0..len).map(|_| 2000 + rng.random_range(0..span)).collect();
        years.sort_unstable();
        let got = persistent_periods(&years, PersistenceParams::default());
        let want = window_union(&years);
        check!(got == want, "years {years:?}: {got:?} vs oracle {want:?}");
        nonempty += usize::from(!got.is_empty());
    }
    Ok(format!("{cases} multisets equal ({nonempty} with a persistent period)"))
}

fn subset(a: &[AuthorId], b: &[AuthorId]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn shared(a: &[AuthorId], b: &[AuthorId]) -> usize {
    a.iter().filter(|x| b.binary_search(x).is_ok()).count()
}

// Classification oracle straight from the definitions.
enum Expected {
    Relation(OverlapKind, Timing, Impulse),
    Anomaly,
}

fn expected(f: &Team, o: &Team, teams: &[Team]) -> Expected {
    let timing = match o.duration.start.cmp(&f.duration.start) {
        std::cmp::Ordering::Less => Timing::Preceding,
        std::cmp::Ordering::Equal => Timing::Simultaneous,
        std::cmp::Ordering::Greater => Timing::Succeeding,
    };
    let kind = if subset(&o.members, &f.members) {
        if !(o.duration.covers(&f.duration) && o.duration != f.duration) {
            return Expected::Anomaly;
        }
        OverlapKind::Core
    } else if subset(&f.members, &o.members) {
        if !f.duration.covers(&o.duration) {
            return Expected::Anomaly;
        }
        OverlapKind::Extension
    } else {
        let has_core = teams.iter().any(|c| {
            c.id != f.id
                && c.size() < f.size()
                && subset(&c.members, &f.members)
                && 2 * c.size() >= f.size()
                && c.duration.covers(&f.duration)
                && c.duration.start < f.duration.start
                && subset(&c.members, &o.members)
        });
        if has_core {
            OverlapKind::OffshootSharedCore
        } else {
            OverlapKind::OffshootNoSharedCore
        }
    };
    let impulse = match (kind, timing) {
        (OverlapKind::Core, Timing::Simultaneous) | (OverlapKind::OffshootSharedCore, Timing::Preceding) => Impulse::None,
        (_, Timing::Preceding) => Impulse::Persistence,
        (_, Timing::Simultaneous) => Impulse::Synchronous,
        (_, Timing::Succeeding) => Impulse::Freshness,
    };
    Expected::Relation(kind, timing, impulse)
}

fn criterion_4() -> Outcome {
    let mut corpora: Vec<(String, SynthConfig, bool)> = Vec::new();
    for seed in 1..=4 {
        corpora.push((format!("planted/{seed}"), SynthConfig::planted(seed, 80), true));
        corpora.push((format!("clean/{seed}"), SynthConfig { noise_pubs: 0, ..SynthConfig::planted(seed, 80) }, false));
    }
    corpora.push(("shift".into(), SynthConfig::shift(5, 200), false));
    corpora.push(("hazard".into(), SynthConfig::hazard(6, 200, 0.2), false));
    corpora.push(("fig_s1".into(), SynthConfig::fig_s1(), false));

    let (mut pairs, mut noisy_anomalies) = (0usize, 0usize);
    let mut cells: HashSet<(OverlapKind, Timing)> = HashSet::new();
    for (name, cfg, noisy) in &corpora {
        let corpus = generate_corpus(cfg).map_err(|e| format!("{name}: {e}"))?;
        let (_, a) = mine(&corpus, 0);
        let teams = &a.teams;
        let mut brute = Vec::new();
        for f in teams {
            for o in teams {
                if f.id != o.id && 2 * shared(&f.members, &o.members) >= f.size().max(o.size()) {
                    brute.push((f.id, o.id));
                }
            }
        }
        check!(find_overlap_candidates(teams) == brute, "{name}: candidate index differs from all-pairs scan");
        let res = &a.overlaps;
        check!(res.candidates == brute.len(), "{name}: {} classified of {} candidates", res.candidates, brute.len());
        check!(
            res.relations.len() + res.anomalies.len() == brute.len(),
            "{name}: relations and anomalies do not partition the candidates"
        );
        let mut rel = res.relations.iter().peekable();
        let mut ano = res.anomalies.iter().peekable();
        for &(f, o) in &brute {
            let got = if rel.peek().is_some_and(|r| (r.focal, r.other) == (f, o)) {
                let r = rel.next().unwrap();
                Classified::Relation(*r)
            } else if ano.peek().is_some_and(|x| (x.focal, x.other) == (f, o)) {
                Classified::Anomaly(*ano.next().unwrap())
            } else {
                return Err(format!("{name}: candidate ({f:?}, {o:?}) missing from the output"));
            };
            match (expected(&teams[f.index()], &teams[o.index()], teams), got) {
                (Expected::Relation(k, t, i), Classified::Relation(r)) => {
                    check!((r.kind, r.timing, r.impulse) == (k, t, i), "{name}: {r:?} expected {k}/{t}/{i}");
                    check!(
                        !matches!((k, t), (OverlapKind::Core, Timing::Succeeding) | (OverlapKind::Extension, Timing::Preceding)),
                        "{name}: infeasible cell {k}/{t}"
                    );
                    cells.insert((k, t));
                }
                (Expected::Anomaly, Classified::Anomaly(_)) => {}
                (_, got) => return Err(format!("{name}: ({f:?}, {o:?}) classified as {got:?} against the oracle")),
            }
        }
        check!(*noisy || res.anomalies.is_empty(), "{name}: {} anomalies on a noise-free corpus", res.anomalies.len());
        noisy_anomalies += res.anomalies.len();
        pairs += brute.len();
    }
    Ok(format!(
        "{} corpora, {pairs} candidate pairs each in one feasible cell, {} cells seen, {noisy_anomalies} anomalies (noisy corpora only)",
        corpora.len(),
        cells.len()
    ))
}

fn single_cell(n: usize) -> PublicationTable {
    let records = (0..n)
        .map(|i| {
            (
                i + 1,
                RawPublication {
                    pub_id: format!("P{i:05}"),
                    year: 2010,
                    doc_type: "Article".into(),
                    fields: vec!["F".into()],
                    authors: vec![],
                },
            )
        })
        .collect();
    PublicationTable::from_valid_records(records).unwrap()
}

fn top_counts(pubs: &PublicationTable, counts: &[u32]) -> Result<(usize, usize), String> {
    let t10 = percentile_thresholds(pubs, counts, Percentile::TOP10);
    let t1 = percentile_thresholds(pubs, counts, Percentile::TOP1);
    let tags = tag_success(pubs, counts, &t10, &t1);
    check!(tags.iter().all(|(_, t)| !t.top1 || t.top10), "a top-1% publication is not top-10%");
    Ok((tags.iter().filter(|(_, t)| t.top1).count(), tags.iter().filter(|(_, t)| t.top10).count()))
}

fn criterion_5() -> Outcome {
    let n = 10_000;
    let pubs = single_cell(n);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut distinct: Vec<u32> = (0..n as u32).map(|i| i * 3 + 1).collect();
    for i in (1..n).rev() {
        distinct.swap(i, rng.random_range(0..=i));
    }
    let (top1, top10) = top_counts(&pubs, &distinct)?;
    check!(top1 == 100 && top10 == 1000, "distinct counts: {top1} top1, {top10} top10");

    // 99 above the cutoff, then 25 sharing the value at rank 100
    let tied: Vec<u32> = (0..n as u32)
        .map(|i| match i {
            0..99 => 100_000 - i,
            99..124 => 50_000,
            _ => i % 40_000,
        })
        .collect();
    let (tied1, _) = top_counts(&pubs, &tied)?;
    check!(tied1 == 100 + 24, "25-way tie gives {tied1} top1");
    Ok(format!("distinct: {top1}/10000 top1, {top10}/10000 top10; tie: {tied1}/10000 top1; top1 within top10"))
}

fn criterion_6() -> Outcome {
    let t0 = Instant::now();
    let corpus = generate_corpus(&SynthConfig::planted(6, 100)).map_err(|e| e.to_string())?;
    let (pubs, a) = mine(&corpus, 0);
    let r = verify_against_truth(&pubs, &a.teams, &a.overlaps.relations, &a.tags, &corpus.truth);
    let elapsed = t0.elapsed();
    check!(r.recall() == Some(1.0), "{}; missing {:?}", r.summary(), r.missing);
    check!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("{}, {elapsed:.1?}", r.summary()))
}

fn criterion_7() -> Outcome {
    let corpus = generate_corpus(&SynthConfig::hazard(7, 4000, 0.2)).map_err(|e| e.to_string())?;
    let (pubs, a) = mine(&corpus, 0);
    let r = verify_against_truth(&pubs, &a.teams, &a.overlaps.relations, &a.tags, &corpus.truth);
    check!(r.tag_match_rate() == Some(1.0), "planted tags not recovered: {}", r.summary());
    let table = a.tables.iter().find(|t| t.name == "figs2add").unwrap();
    let mut ages = Vec::new();
    for row in table.rows.iter().filter(|r| r.keys[0] == "top1") {
        let (Some(hit), n) = (row.value.count(), row.value.n()) else { continue };
        if n < 500 {
            continue;
        }
        let p = hit as f64 / n as f64;
        let half = 2.576 * (0.2 * 0.8 / n as f64).sqrt();
        check!((p - 0.2).abs() <= half, "age {}: rate {p:.4} outside 0.2 +/- {half:.4} (N={n})", row.keys[1]);
        ages.push(format!("age {} {p:.3} (N={n})", row.keys[1]));
    }
    check!(!ages.is_empty(), "no age has N >= 500");

    let corpus = generate_corpus(&SynthConfig::shift(7, 600)).map_err(|e| e.to_string())?;
    let (_, a) = mine(&corpus, 0);
    let table = a.tables.iter().find(|t| t.name == "fig5d").unwrap();
    let mut shifts = Vec::new();
    for row in table.rows.iter().filter(|r| r.keys[0] == "top1" && r.keys[2] == "persistence") {
        let v = row.value.get().ok_or_else(|| format!("duration {}: no closed baseline", row.keys[1]))?;
        check!((v - 1.0).abs() <= 0.1, "duration {}: shift {v:.3}", row.keys[1]);
        shifts.push(v);
    }
    check!(!shifts.is_empty(), "no persistence rows in fig5d");
    let (lo, hi) = shifts.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
    Ok(format!("hazard: {}; shift {lo:.3}..{hi:.3} over {} cohorts", ages.join(", "), shifts.len()))
}

fn run_dir(input: &Path, out: &Path, threads: usize) -> Result<Vec<(String, Vec<u8>)>, String> {
    let cfg = PipelineConfig {
        publications: input.join("publications.jsonl"),
        citations: Some(input.join("citations.csv")),
        out_dir: out.to_path_buf(),
        threads: Some(threads),
        ..Default::default()
    };
    let p = Pipeline::new(cfg).map_err(|e| e.to_string())?;
    p.run_all().map_err(|e| e.to_string())?;
    let again = p.run_all().map_err(|e| e.to_string())?;
    check!(again.iter().all(|o| o.cached), "second run in the same directory was not a cache hit");
    let mut files = Vec::new();
    for s in Stage::ALL {
        for f in s.outputs() {
            let bytes = std::fs::read(out.join(&f)).map_err(|e| format!("{f}: {e}"))?;
            files.push((f, bytes));
        }
    }
    Ok(files)
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("input");
    generate_corpus(&SynthConfig::planted(8, 150)).and_then(|c| c.write_dir(&input)).map_err(|e| e.to_string())?;
    let max = std::thread::available_parallelism().map_or(1, |n| n.get()).max(4);
    let a = run_dir(&input, &dir.path().join("a"), 1)?;
    let b = run_dir(&input, &dir.path().join("b"), 1)?;
    let c = run_dir(&input, &dir.path().join("c"), max)?;
    for ((name, x), ((_, y), (_, z))) in a.iter().zip(b.iter().zip(&c)) {
        check!(x == y, "{name} differs between two runs");
        check!(x == z, "{name} differs between 1 and {max} threads");
    }
    let figs = a.iter().filter(|(n, _)| n.starts_with("fig")).count();
    Ok(format!("{} artifacts ({figs} figure tables) byte-identical across 2 runs and 1 vs {max} threads", a.len()))
}

fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn criterion_9() -> Outcome {
    let n_pubs: usize = std::env::var("PERSTEAM_SCALE_PUBS").ok().and_then(|v| v.parse().ok()).unwrap_or(1_000_000);
    if n_pubs == 0 {
        return Ok("skipped (PERSTEAM_SCALE_PUBS=0)".into());
    }
    let n_authors = n_pubs * 3 / 10;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("input");
    let t0 = Instant::now();
    let corpus = generate_corpus(&SynthConfig::scale(9, n_pubs, n_authors)).map_err(|e| e.to_string())?;
    let lines = corpus.publication_lines.len();
    corpus.write_dir(&input).map_err(|e| e.to_string())?;
    drop(corpus);
    let t_gen = t0.elapsed();
    let t1 = Instant::now();
    let cfg = PipelineConfig {
        publications: input.join("publications.jsonl"),
        citations: Some(input.join("citations.csv")),
        out_dir: dir.path().join("run"),
        ..Default::default()
    };
    let outcomes = Pipeline::new(cfg).and_then(|p| p.run_all()).map_err(|e| e.to_string())?;
    let t_run = t1.elapsed();
    let teams = outcomes.iter().find(|o| o.stage == Stage::Teams).and_then(|o| o.rows.get("teams.csv").copied());
    let peak_mb = peak_rss_kb().map_or(0, |kb| kb / 1024);
    check!(lines >= n_pubs, "generated {lines} publications, wanted {n_pubs}");
    check!(t_run < Duration::from_secs(600), "run all took {t_run:?}");
    check!(peak_mb > 0 && peak_mb < 8 * 1024, "peak memory {peak_mb} MB");
    Ok(format!(
        "{lines} publications, {n_authors} authors, {} teams; generate {t_gen:.1?}, run all {t_run:.1?}, peak {peak_mb} MB",
        teams.unwrap_or(0)
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("four-author golden test", criterion_1),
        ("clique enumeration equals brute force", criterion_2),
        ("persistence equals window-union oracle", criterion_3),
        ("overlap taxonomy exhaustive", criterion_4),
        ("percentile tagging exact", criterion_5),
        ("planted team recovery", criterion_6),
        ("analytics recover planted hazard and shift", criterion_7),
        ("determinism across runs and threads", criterion_8),
        ("scale smoke", criterion_9),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {n} PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

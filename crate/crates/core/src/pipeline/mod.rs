//! Stage driver with on-disk artifacts and a digest manifest.
//!
//! Each stage reads the artifacts of earlier stages from `out_dir`, writes its
//! own, and records input digests, the relevant configuration and output
//! digests in `manifest.json`. A stage whose record still matches is skipped.

mod artifacts;
mod config;
mod explain;
mod manifest;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::sync::Mutex;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::{all_tables, AnalysisInput, SeriesTable};
use crate::cliques::{enumerate_maximal_cliques, write_cliques_csv, CliqueError, TemporalClique};
use crate::coauthor::build_pair_timelines;
use crate::corpus::{
    corpus_stats, load_citations, load_publications, CitationTable, IngestConfig, IngestError, PublicationTable,
};
use crate::overlap::{
    classify_all, summarize_all, write_anomalies_csv, write_impulses_csv, write_overlaps_csv, ImpulseSummary,
    OverlapError, OverlapResult,
};
use crate::persistence::build_persistent_network;
use crate::success::{compute_success, write_thresholds_csv, SuccessTags};
use crate::synth::SynthError;
use crate::teams::{
    assemble_teams, associate_all, composition_all, success_all, write_team_pubs_csv, write_teams_csv,
    CompositionMetrics, Team, TeamSuccess,
};

pub use artifacts::{
    read_cliques, read_impulses, read_overlaps, read_pair_timelines, read_persistent_network, read_success_tags,
    read_teams, TEAM_COLUMNS,
};
pub use config::{PipelineConfig, KEYS};
pub use explain::explain_team;
pub use manifest::{config_digest, file_digest, sha256_hex, Manifest, StageRecord};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("stage {stage}: artifact {file} is missing; run `{stage}` first")]
    MissingArtifact { stage: Stage, file: String },
    #[error("stage {stage} is out of date ({reason}); rerun `{stage}` or run `all`")]
    Stale { stage: Stage, reason: String },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Clique(#[from] CliqueError),
    #[error(transparent)]
    Overlap(#[from] OverlapError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Artifact { path: String, line: usize, message: String },
    #[error("unknown team {0:?}")]
    UnknownTeam(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        PipelineError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn artifact(path: &str, line: usize, message: impl Into<String>) -> Self {
        PipelineError::Artifact { path: path.to_string(), line, message: message.into() }
    }
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Hashes and counts newlines while writing.
struct Tally<W> {
    inner: W,
    hash: Sha256,
    newlines: usize,
}

impl<W: Write> Write for Tally<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hash.update(&buf[..n]);
        self.newlines += buf[..n].iter().filter(|&&b| b == b'\n').count();
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Tag,
    Network,
    Persist,
    Mine,
    Teams,
    Overlaps,
    Stats,
}

pub const PUBLICATIONS: &str = "publications.jsonl";
pub const CITATIONS: &str = "citations.csv";
pub const SUCCESS_TAGS: &str = "success_tags.csv";
pub const PAIR_TIMELINES: &str = "pair_timelines.csv";
pub const PERSISTENT_EDGES: &str = "persistent_edges.csv";
pub const CLIQUES: &str = "cliques.csv";
pub const TEAMS: &str = "teams.csv";
pub const TEAM_PUBS: &str = "team_pubs.csv";
pub const OVERLAPS: &str = "overlaps.csv";
pub const IMPULSES: &str = "impulses.csv";

/// Analytics table names, each written as `<name>.csv` by the stats stage.
pub const TABLES: [&str; 10] =
    ["fig1a", "fig1b", "fig2a", "fig2b", "figs2add", "fig3", "fig5a", "fig5b", "fig5c", "fig5d"];

impl Stage {
    pub const ALL: [Stage; 8] =
        [Stage::Ingest, Stage::Tag, Stage::Network, Stage::Persist, Stage::Mine, Stage::Teams, Stage::Overlaps, Stage::Stats];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Tag => "tag",
            Stage::Network => "network",
            Stage::Persist => "persist",
            Stage::Mine => "mine",
            Stage::Teams => "teams",
            Stage::Overlaps => "overlaps",
            Stage::Stats => "stats",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|st| st.as_str() == s)
    }

    /// Artifact files read from `out_dir`.
    pub fn inputs(&self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &[],
            Stage::Tag => &[PUBLICATIONS, CITATIONS],
            Stage::Network => &[PUBLICATIONS],
            Stage::Persist => &[PUBLICATIONS, PAIR_TIMELINES],
            Stage::Mine => &[PUBLICATIONS, PERSISTENT_EDGES],
            Stage::Teams => &[PUBLICATIONS, SUCCESS_TAGS, CLIQUES],
            Stage::Overlaps => &[PUBLICATIONS, SUCCESS_TAGS, TEAMS, TEAM_PUBS],
            Stage::Stats => &[PUBLICATIONS, SUCCESS_TAGS, TEAMS, TEAM_PUBS, IMPULSES],
        }
    }

    pub fn outputs(&self) -> Vec<String> {
        let fixed: &[&str] = match self {
            Stage::Ingest => &[PUBLICATIONS, CITATIONS, "rejects.csv"],
            Stage::Tag => &[SUCCESS_TAGS, "thresholds.csv", "corpus_stats.csv"],
            Stage::Network => &[PAIR_TIMELINES],
            Stage::Persist => &[PERSISTENT_EDGES],
            Stage::Mine => &[CLIQUES],
            Stage::Teams => &[TEAMS, TEAM_PUBS],
            Stage::Overlaps => &[OVERLAPS, "overlap_anomalies.csv", IMPULSES],
            Stage::Stats => return TABLES.iter().map(|t| format!("{t}.csv")).collect(),
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }

    /// Configuration keys whose values feed this stage.
    pub fn config_keys(&self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &["window_start", "window_end"],
            Stage::Tag => &["citation_window"],
            Stage::Network => &["author_cap"],
            Stage::Persist => &["window_len", "min_pubs"],
            Stage::Mine => &["delta", "gamma", "min_clique_size"],
            Stage::Teams | Stage::Overlaps => &[],
            Stage::Stats => &["window_start", "window_end", "margin", "duration_bin"],
        }
    }

    /// The stage that writes an artifact file.
    pub fn producer(file: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|s| s.outputs().iter().any(|o| o == file))
    }

    /// Every stage this one depends on, directly or not, in pipeline order.
    pub fn upstream(&self) -> Vec<Stage> {
        let mut seen = [false; 8];
        let mut stack = vec![*self];
        while let Some(s) = stack.pop() {
            for f in s.inputs() {
                let p = Stage::producer(f).expect("every input has a producer");
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        Stage::ALL.into_iter().filter(|s| seen[*s as usize]).collect()
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOutcome {
    pub stage: Stage,
    pub cached: bool,
    pub rows: BTreeMap<String, usize>,
}

/// Everything computed from one corpus, held in memory.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub tags: SuccessTags,
    pub cliques: Vec<TemporalClique>,
    pub teams: Vec<Team>,
    pub success: Vec<TeamSuccess>,
    pub metrics: Vec<CompositionMetrics>,
    pub overlaps: OverlapResult,
    pub summaries: Vec<ImpulseSummary>,
    pub tables: Vec<SeriesTable>,
}

/// Runs every stage in memory, without touching `out_dir`.
pub fn analyze(pubs: &PublicationTable, citations: &CitationTable, cfg: &PipelineConfig) -> Result<Analysis, PipelineError> {
    cfg.validate()?;
    let (tags, _, _) = compute_success(pubs, citations, cfg.citation_window);
    let timelines = build_pair_timelines(pubs, cfg.author_cap);
    let net = build_persistent_network(&timelines, cfg.persistence);
    drop(timelines);
    let cliques = enumerate_maximal_cliques(&net, cfg.cliques)?;
    drop(net);
    let mut teams = assemble_teams(&cliques);
    associate_all(&mut teams, pubs);
    let success = success_all(&teams, pubs, &tags);
    let metrics = composition_all(&teams, pubs);
    let overlaps = classify_all(&teams)?;
    let summaries = summarize_all(&teams, &overlaps, &success);
    let input = AnalysisInput {
        pubs,
        teams: &teams,
        tags: &tags,
        success: &success,
        metrics: &metrics,
        summaries: &summaries,
    };
    let tables = all_tables(&input, &cfg.analysis());
    Ok(Analysis { tags, cliques, teams, success, metrics, overlaps, summaries, tables })
}

pub struct Pipeline {
    cfg: PipelineConfig,
    force: bool,
    pool: rayon::ThreadPool,
    digests: Mutex<HashMap<PathBuf, String>>,
    loaded: Mutex<Option<(String, Arc<PublicationTable>)>>,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads.unwrap_or(0))
            .build()
            .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
        Ok(Pipeline { cfg, force: false, pool, digests: Mutex::new(HashMap::new()), loaded: Mutex::new(None) })
    }

    /// Rerun stages even when their manifest record matches.
    pub fn force(mut self, force: bool) -> Self {
        self.force = force;
        self
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn out_dir(&self) -> &Path {
        &self.cfg.out_dir
    }

    pub fn run_all(&self) -> Result<Vec<StageOutcome>, PipelineError> {
        self.prepare_dir()?;
        self.pool.install(|| Stage::ALL.into_iter().map(|s| self.run_one(s)).collect())
    }

    /// Runs one stage after checking that everything upstream is current.
    pub fn run_stage(&self, stage: Stage) -> Result<StageOutcome, PipelineError> {
        self.prepare_dir()?;
        self.pool.install(|| {
            let manifest = self.manifest()?;
            for up in stage.upstream() {
                self.check_fresh(up, &manifest)?;
            }
            self.run_one(stage)
        })
    }

    fn prepare_dir(&self) -> Result<(), PipelineError> {
        fs::create_dir_all(self.out_dir()).map_err(|e| PipelineError::io(self.out_dir(), e))
    }

    fn manifest(&self) -> Result<Manifest, PipelineError> {
        Manifest::load(self.out_dir()).map_err(|e| PipelineError::io(&self.out_dir().join(Manifest::FILE), e))
    }

    fn artifact(&self, file: &str) -> PathBuf {
        self.out_dir().join(file)
    }

    fn digest(&self, path: &Path) -> Result<Option<String>, PipelineError> {
        if let Some(d) = self.digests.lock().unwrap().get(path) {
            return Ok(Some(d.clone()));
        }
        match file_digest(path) {
            Ok(d) => {
                self.digests.lock().unwrap().insert(path.to_path_buf(), d.clone());
                Ok(Some(d))
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(PipelineError::io(path, e)),
        }
    }

    fn stage_config(&self, stage: Stage) -> BTreeMap<String, String> {
        stage.config_keys().iter().map(|k| (k.to_string(), self.cfg.get(k).unwrap_or_default())).collect()
    }

    /// Current digests of a stage's inputs; a missing artifact is an error
    /// naming the stage that writes it.
    fn input_digests(&self, stage: Stage) -> Result<BTreeMap<String, String>, PipelineError> {
        let mut out = BTreeMap::new();
        if stage == Stage::Ingest {
            let p = &self.cfg.publications;
            let d = self.digest(p)?.ok_or_else(|| {
                PipelineError::io(p, io::Error::new(io::ErrorKind::NotFound, "publications input not found"))
            })?;
            out.insert("input:publications".to_string(), d);
            let c = match &self.cfg.citations {
                Some(c) => self.digest(c)?.ok_or_else(|| {
                    PipelineError::io(c, io::Error::new(io::ErrorKind::NotFound, "citations input not found"))
                })?,
                None => "none".to_string(),
            };
            out.insert("input:citations".to_string(), c);
            return Ok(out);
        }
        for f in stage.inputs() {
            let d = self.digest(&self.artifact(f))?.ok_or_else(|| PipelineError::MissingArtifact {
                stage: Stage::producer(f).unwrap(),
                file: f.to_string(),
            })?;
            out.insert(f.to_string(), d);
        }
        Ok(out)
    }

    /// Why the stage's record no longer describes the files on disk, if it does not.
    fn staleness(&self, stage: Stage, record: Option<&StageRecord>) -> Result<Option<String>, PipelineError> {
        let Some(rec) = record else {
            return Ok(Some("no manifest record".into()));
        };
        let cfg = self.stage_config(stage);
        if rec.config_digest != config_digest(&cfg) {
            let changed: Vec<&str> =
                cfg.iter().filter(|(k, v)| rec.config.get(*k) != Some(*v)).map(|(k, _)| k.as_str()).collect();
            return Ok(Some(format!("config changed: {}", changed.join(", "))));
        }
        let inputs = self.input_digests(stage)?;
        if let Some(k) = inputs.iter().find(|(k, v)| rec.inputs.get(*k) != Some(*v)).map(|(k, _)| k) {
            return Ok(Some(format!("input {k} changed")));
        }
        for f in stage.outputs() {
            match self.digest(&self.artifact(&f))? {
                None => return Ok(Some(format!("artifact {f} is missing"))),
                Some(d) if rec.outputs.get(&f) != Some(&d) => return Ok(Some(format!("artifact {f} was modified"))),
                Some(_) => {}
            }
        }
        Ok(None)
    }

    fn check_fresh(&self, stage: Stage, manifest: &Manifest) -> Result<(), PipelineError> {
        for f in stage.outputs() {
            if !self.artifact(&f).exists() {
                return Err(PipelineError::MissingArtifact { stage, file: f });
            }
        }
        match self.staleness(stage, manifest.stages.get(stage.as_str()))? {
            Some(reason) => Err(PipelineError::Stale { stage, reason }),
            None => Ok(()),
        }
    }

    fn run_one(&self, stage: Stage) -> Result<StageOutcome, PipelineError> {
        let mut manifest = self.manifest()?;
        let record = manifest.stages.get(stage.as_str());
        if !self.force {
            if let (Some(rec), None) = (record, self.staleness(stage, record)?) {
                log::info!("{stage}: up to date");
                return Ok(StageOutcome { stage, cached: true, rows: rec.rows.clone() });
            }
        }
        let inputs = self.input_digests(stage)?;
        log::info!("{stage}: running");
        let written = self.execute(stage)?;
        let config = self.stage_config(stage);
        let mut rec = StageRecord { inputs, config_digest: config_digest(&config), config, ..Default::default() };
        for (file, digest, rows) in written {
            rec.outputs.insert(file.clone(), digest);
            rec.rows.insert(file, rows);
        }
        let rows = rec.rows.clone();
        manifest.stages.insert(stage.as_str().to_string(), rec);
        manifest.save(self.out_dir()).map_err(|e| PipelineError::io(&self.out_dir().join(Manifest::FILE), e))?;
        Ok(StageOutcome { stage, cached: false, rows })
    }

    /// Writes one artifact through a temp file; returns its digest and data rows.
    fn write_output(
        &self,
        file: &str,
        header_lines: usize,
        body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
    ) -> Result<(String, String, usize), PipelineError> {
        let path = self.artifact(file);
        let tmp = tmp_path(&path);
        let f = File::create(&tmp).map_err(|e| PipelineError::io(&tmp, e))?;
        let mut w = Tally { inner: BufWriter::with_capacity(1 << 20, f), hash: Sha256::new(), newlines: 0 };
        body(&mut w).and_then(|_| w.flush()).map_err(|e| PipelineError::io(&tmp, e))?;
        drop(w.inner);
        fs::rename(&tmp, &path).map_err(|e| PipelineError::io(&path, e))?;
        let digest = hex::encode(w.hash.finalize());
        self.digests.lock().unwrap().insert(path, digest.clone());
        Ok((file.to_string(), digest, w.newlines.saturating_sub(header_lines)))
    }

    fn publications(&self) -> Result<Arc<PublicationTable>, PipelineError> {
        let path = self.artifact(PUBLICATIONS);
        let digest = self
            .digest(&path)?
            .ok_or_else(|| PipelineError::MissingArtifact { stage: Stage::Ingest, file: PUBLICATIONS.into() })?;
        let mut loaded = self.loaded.lock().unwrap();
        if let Some((d, t)) = loaded.as_ref() {
            if *d == digest {
                return Ok(t.clone());
            }
        }
        let (table, _) = load_publications(&path, &IngestConfig { window: None })?;
        let table = Arc::new(table);
        *loaded = Some((digest, table.clone()));
        Ok(table)
    }

    fn tags(&self, pubs: &PublicationTable) -> Result<SuccessTags, PipelineError> {
        read_success_tags(&self.artifact(SUCCESS_TAGS), pubs)
    }

    fn teams(&self, pubs: &PublicationTable) -> Result<Vec<Team>, PipelineError> {
        read_teams(&self.artifact(TEAMS), &self.artifact(TEAM_PUBS), pubs)
    }

    fn execute(&self, stage: Stage) -> Result<Vec<(String, String, usize)>, PipelineError> {
        let csv = |r: csv::Result<()>| r.map_err(io::Error::from);
        let mut out = Vec::new();
        match stage {
            Stage::Ingest => {
                let (pubs, report) = load_publications(&self.cfg.publications, &self.cfg.ingest())?;
                log::info!(
                    "ingest: {} lines, {} accepted, {} rejected",
                    report.lines,
                    report.accepted,
                    report.rejects.len()
                );
                let citations = match &self.cfg.citations {
                    Some(path) => {
                        let (c, r) = load_citations(path, &pubs)?;
                        log::info!(
                            "ingest: {} citation rows, {} stored, {} unknown cited, {} missing year",
                            r.rows,
                            r.stored,
                            r.unknown_cited,
                            r.missing_year
                        );
                        c
                    }
                    None => CitationTable::default(),
                };
                out.push(self.write_output(PUBLICATIONS, 0, |w| pubs.write_jsonl(w))?);
                out.push(self.write_output(CITATIONS, 1, |w| csv(citations.write_csv(&pubs, w)))?);
                out.push(self.write_output("rejects.csv", 1, |w| csv(report.write_rejects_csv(w)))?);
            }
            Stage::Tag => {
                let pubs = self.publications()?;
                let (citations, _) = load_citations(&self.artifact(CITATIONS), &pubs)?;
                let (tags, t10, t1) = compute_success(&pubs, &citations, self.cfg.citation_window);
                out.push(self.write_output(SUCCESS_TAGS, 1, |w| csv(tags.write_csv(&pubs, w)))?);
                out.push(self.write_output("thresholds.csv", 1, |w| csv(write_thresholds_csv(&pubs, &[&t10, &t1], w)))?);
                let stats = corpus_stats(&pubs, &tags);
                out.push(self.write_output("corpus_stats.csv", 1, |w| csv(stats.write_csv(w)))?);
            }
            Stage::Network => {
                let pubs = self.publications()?;
                let timelines = build_pair_timelines(&pubs, self.cfg.author_cap);
                out.push(self.write_output(PAIR_TIMELINES, 1, |w| csv(timelines.write_csv(&pubs, w)))?);
            }
            Stage::Persist => {
                let pubs = self.publications()?;
                let timelines = read_pair_timelines(&self.artifact(PAIR_TIMELINES), &pubs)?;
                let net = build_persistent_network(&timelines, self.cfg.persistence);
                out.push(self.write_output(PERSISTENT_EDGES, 1, |w| csv(net.write_csv(&pubs, w)))?);
            }
            Stage::Mine => {
                let pubs = self.publications()?;
                let net = read_persistent_network(&self.artifact(PERSISTENT_EDGES), &pubs)?;
                let cliques = enumerate_maximal_cliques(&net, self.cfg.cliques)?;
                out.push(self.write_output(CLIQUES, 1, |w| csv(write_cliques_csv(&pubs, &cliques, w)))?);
            }
            Stage::Teams => {
                let pubs = self.publications()?;
                let tags = self.tags(&pubs)?;
                let cliques = read_cliques(&self.artifact(CLIQUES), &pubs)?;
                let mut teams = assemble_teams(&cliques);
                associate_all(&mut teams, &pubs);
                let success = success_all(&teams, &pubs, &tags);
                let metrics = composition_all(&teams, &pubs);
                out.push(self.write_output(TEAMS, 1, |w| csv(write_teams_csv(&pubs, &teams, &success, &metrics, w)))?);
                out.push(self.write_output(TEAM_PUBS, 1, |w| csv(write_team_pubs_csv(&pubs, &teams, w)))?);
            }
            Stage::Overlaps => {
                let pubs = self.publications()?;
                let tags = self.tags(&pubs)?;
                let teams = self.teams(&pubs)?;
                let success = success_all(&teams, &pubs, &tags);
                let result = classify_all(&teams)?;
                if !result.anomalies.is_empty() {
                    log::warn!("overlaps: {} relations contradict team durations", result.anomalies.len());
                }
                let summaries = summarize_all(&teams, &result, &success);
                out.push(self.write_output(OVERLAPS, 1, |w| csv(write_overlaps_csv(&result.relations, w)))?);
                out.push(self.write_output("overlap_anomalies.csv", 1, |w| csv(write_anomalies_csv(&result.anomalies, w)))?);
                out.push(self.write_output(IMPULSES, 1, |w| csv(write_impulses_csv(&summaries, w)))?);
            }
            Stage::Stats => {
                let pubs = self.publications()?;
                let tags = self.tags(&pubs)?;
                let teams = self.teams(&pubs)?;
                let success = success_all(&teams, &pubs, &tags);
                let metrics = composition_all(&teams, &pubs);
                let summaries = read_impulses(&self.artifact(IMPULSES), &teams)?;
                let input = AnalysisInput {
                    pubs: &pubs,
                    teams: &teams,
                    tags: &tags,
                    success: &success,
                    metrics: &metrics,
                    summaries: &summaries,
                };
                for table in all_tables(&input, &self.cfg.analysis()) {
                    out.push(self.write_output(&format!("{}.csv", table.name), 1, |w| csv(table.write_csv(w)))?);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_graph() {
        assert_eq!(Stage::Ingest.upstream(), vec![]);
        assert_eq!(Stage::Persist.upstream(), vec![Stage::Ingest, Stage::Network]);
        assert_eq!(
            Stage::Stats.upstream(),
            vec![Stage::Ingest, Stage::Tag, Stage::Network, Stage::Persist, Stage::Mine, Stage::Teams, Stage::Overlaps]
        );
        for s in Stage::ALL {
            assert_eq!(Stage::parse(s.as_str()), Some(s));
            for f in s.inputs() {
                assert!(Stage::producer(f).unwrap() < s);
            }
        }
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert!(!tmp_path(&p).exists());
    }
}

//! Flat `key = value` pipeline configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analytics::AnalysisConfig;
use crate::cliques::CliqueParams;
use crate::corpus::IngestConfig;
use crate::persistence::PersistenceParams;
use crate::success::CitationWindow;
use crate::Year;

use super::PipelineError;

/// Every key with a one-line description, in file order.
pub const KEYS: [(&str, &str); 15] = [
    ("publications", "input publication records, one JSON object per line"),
    ("citations", "input citation events CSV (citing_pub_id,cited_pub_id,citing_year); empty for none"),
    ("out_dir", "directory for artifacts and manifest.json"),
    ("window_start", "first publication year kept (empty for no lower bound together with window_end)"),
    ("window_end", "last publication year kept"),
    ("citation_window", "inclusive (publication year and two after) or following (three years after)"),
    ("author_cap", "skip publications with more authors when building pairs; empty for no cap"),
    ("window_len", "persistence window length in years"),
    ("min_pubs", "joint publications needed inside one window"),
    ("delta", "clique window length (only 1 supported)"),
    ("gamma", "clique minimum edge weight (only 1 supported)"),
    ("min_clique_size", "smallest team size"),
    ("margin", "years at each end of the window whose teams are left out of team tables"),
    ("duration_bin", "group team durations into cohorts of this width; empty keeps each duration"),
    ("threads", "worker threads; empty uses every core"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub publications: PathBuf,
    pub citations: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub window: Option<(Year, Year)>,
    pub citation_window: CitationWindow,
    pub author_cap: Option<usize>,
    pub persistence: PersistenceParams,
    pub cliques: CliqueParams,
    pub margin: u32,
    pub duration_bin: Option<u32>,
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            publications: PathBuf::from("publications.jsonl"),
            citations: None,
            out_dir: PathBuf::from("out"),
            window: Some((2008, 2020)),
            citation_window: CitationWindow::default(),
            author_cap: None,
            persistence: PersistenceParams::default(),
            cliques: CliqueParams::default(),
            margin: 4,
            duration_bin: None,
            threads: None,
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl PipelineConfig {
    /// Parses a config file body. Later lines win; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let mut cfg = PipelineConfig::default();
        let mut start: Option<Option<Year>> = None;
        let mut end: Option<Option<Year>> = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set_tracking(key.trim(), value.trim(), &mut start, &mut end)?;
        }
        cfg.apply_window(start, end)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<(), PipelineError> {
        let mut start = None;
        let mut end = None;
        for (k, v) in pairs {
            self.set_tracking(k, v, &mut start, &mut end)?;
        }
        self.apply_window(start, end)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        self.apply_overrides([(key, value)])
    }

    fn apply_window(&mut self, start: Option<Option<Year>>, end: Option<Option<Year>>) -> Result<(), PipelineError> {
        if start.is_none() && end.is_none() {
            return Ok(());
        }
        let cur = self.window;
        let s = start.unwrap_or(cur.map(|w| w.0));
        let e = end.unwrap_or(cur.map(|w| w.1));
        self.window = match (s, e) {
            (Some(s), Some(e)) if s <= e => Some((s, e)),
            (None, None) => None,
            _ => return Err(PipelineError::Config("window_start and window_end must both be set (start <= end) or both empty".into())),
        };
        Ok(())
    }

    fn set_tracking(
        &mut self,
        key: &str,
        value: &str,
        start: &mut Option<Option<Year>>,
        end: &mut Option<Option<Year>>,
    ) -> Result<(), PipelineError> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, PipelineError> {
            v.parse().map_err(|_| PipelineError::Config(format!("{key}: {v:?} is not a valid number")))
        }
        fn opt_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<Option<T>, PipelineError> {
            if v.is_empty() || v == "none" {
                Ok(None)
            } else {
                num(key, v).map(Some)
            }
        }
        match key {
            "publications" => self.publications = PathBuf::from(value),
            "citations" => self.citations = (!value.is_empty()).then(|| PathBuf::from(value)),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "window_start" => *start = Some(opt_num(key, value)?),
            "window_end" => *end = Some(opt_num(key, value)?),
            "citation_window" => {
                self.citation_window = CitationWindow::parse(value)
                    .ok_or_else(|| PipelineError::Config(format!("citation_window: expected inclusive or following, got {value:?}")))?
            }
            "author_cap" => self.author_cap = opt_num(key, value)?,
            "window_len" => self.persistence.window_len = num(key, value)?,
            "min_pubs" => self.persistence.min_pubs = num(key, value)?,
            "delta" => self.cliques.delta = num(key, value)?,
            "gamma" => self.cliques.gamma = num(key, value)?,
            "min_clique_size" => self.cliques.min_size = num(key, value)?,
            "margin" => self.margin = num(key, value)?,
            "duration_bin" => self.duration_bin = opt_num(key, value)?,
            "threads" => self.threads = opt_num(key, value)?,
            _ => return Err(PipelineError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.persistence.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        self.cliques.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.threads == Some(0) {
            return Err(PipelineError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Value of one key as it would appear in a config file.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "publications" => self.publications.display().to_string(),
            "citations" => self.citations.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "out_dir" => self.out_dir.display().to_string(),
            "window_start" => opt(self.window.map(|w| w.0)),
            "window_end" => opt(self.window.map(|w| w.1)),
            "citation_window" => self.citation_window.as_str().to_string(),
            "author_cap" => opt(self.author_cap),
            "window_len" => self.persistence.window_len.to_string(),
            "min_pubs" => self.persistence.min_pubs.to_string(),
            "delta" => self.cliques.delta.to_string(),
            "gamma" => self.cliques.gamma.to_string(),
            "min_clique_size" => self.cliques.min_size.to_string(),
            "margin" => self.margin.to_string(),
            "duration_bin" => opt(self.duration_bin),
            "threads" => opt(self.threads),
            _ => return None,
        })
    }

    /// The whole configuration in file syntax.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, _) in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).unwrap());
        }
        out
    }

    pub fn ingest(&self) -> IngestConfig {
        IngestConfig { window: self.window }
    }

    pub fn analysis(&self) -> AnalysisConfig {
        AnalysisConfig { window: self.window, margin: self.margin, duration_bin: self.duration_bin }
    }
}

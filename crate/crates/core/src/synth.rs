//! Synthetic corpora with planted teams, overlaps and citation success.
//!
//! All randomness comes from one ChaCha8 stream (`rand_chacha::ChaCha8Rng`)
//! seeded with [`SynthConfig::seed`], so a configuration always yields the
//! same files. Generation is single-threaded.
//!
//! Citation counts are drawn per publication tier so that percentile tagging
//! reproduces the intended tags exactly: top-1% publications get 30 to 39
//! citations, top-10% ones 10 to 19, the rest 0 to 4. Single-author filler
//! publications pad every (field, year) cell until the tier sizes equal the
//! percentile cutoff ranks.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{PublicationTable, RawAffiliation, RawAuthor, RawPublication};
use crate::overlap::{cell_impulse, OverlapKind, OverlapRelation, Timing};
use crate::persistence::PersistenceParams;
use crate::success::{Percentile, SuccessTags};
use crate::teams::Team;
use crate::{Span, Year};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("infeasible synthetic corpus: {0}")]
    Infeasible(String),
    #[error("writing {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("reading ground truth {path}: {message}")]
    Truth { path: String, message: String },
}

/// Probability that a planted focal team gets each kind of overlapping team.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Wiring {
    pub core: f64,
    pub extension: f64,
    pub offshoot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SuccessModel {
    /// Each planted team publication is independently top-1% or top-10%.
    Rates { top10: f64, top1: f64 },
    /// Each year until its first success, a focal team succeeds with
    /// probability `hazard`; one publication of that year becomes top-q.
    Hazard { q_basis_points: u32, hazard: f64 },
    /// Closed focal teams first succeed at `closed_age`, focal teams with a
    /// preceding core at `core_age`; other planted teams never succeed.
    FixedAge { q_basis_points: u32, closed_age: u32, core_age: u32 },
}

/// A publication given verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPub {
    pub pub_id: String,
    pub year: Year,
    pub authors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    /// Inclusive publication years.
    pub years: (Year, Year),
    pub n_fields: u32,
    pub n_cities: u32,
    pub n_countries: u32,
    /// Planted focal teams, each with its own authors.
    pub groups: usize,
    pub team_size: (usize, usize),
    pub duration: (u32, u32),
    pub max_pubs_per_year: u32,
    pub wiring: Wiring,
    pub noise_pubs: usize,
    /// When set, background publications top the corpus up to this many
    /// valid publications instead of adding `noise_pubs`, and the background
    /// pool tops the distinct authors up to `noise_authors`.
    pub fill_to: Option<usize>,
    pub noise_authors: usize,
    pub max_noise_authors: usize,
    /// Fraction of publications listed under two fields.
    pub multi_field_rate: f64,
    pub success: SuccessModel,
    /// Fraction of publications that also get citations after their window.
    pub out_of_window_rate: f64,
    /// Fraction of output lines that are invalid records.
    pub reject_rate: f64,
    /// Pad cells with filler publications so tags come out exactly as planned.
    pub calibrate: bool,
    pub persistence: PersistenceParams,
    pub fixed_pubs: Vec<FixedPub>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 1,
            years: (2008, 2020),
            n_fields: 4,
            n_cities: 40,
            n_countries: 12,
            groups: 100,
            team_size: (2, 6),
            duration: (1, 8),
            max_pubs_per_year: 2,
            wiring: Wiring::default(),
            noise_pubs: 0,
            fill_to: None,
            noise_authors: 1000,
            max_noise_authors: 4,
            multi_field_rate: 0.1,
            success: SuccessModel::Rates { top10: 0.1, top1: 0.01 },
            out_of_window_rate: 0.05,
            reject_rate: 0.0,
            calibrate: true,
            persistence: PersistenceParams::default(),
            fixed_pubs: Vec::new(),
        }
    }
}

impl SynthConfig {
    /// Six authors over years 1 to 8 whose pair patterns give persistent
    /// edges AB [2,6], AC [2,5], BC [1,7], DE [6,8], EF [6,8], and a
    /// non-persistent CD with three publications spread over six years.
    pub fn fig_s1() -> Self {
        let pubs: [(Year, &str); 18] = [
            (1, "BC"),
            (2, "ABC"),
            (3, "AC"),
            (3, "BC"),
            (4, "AB"),
            (5, "AC"),
            (5, "BC"),
            (6, "AB"),
            (6, "BC"),
            (7, "BC"),
            (3, "CD"),
            (6, "CD"),
            (8, "CD"),
            (6, "DEF"),
            (7, "DE"),
            (8, "EF"),
            (8, "DEF"),
            (1, "F"),
        ];
        SynthConfig {
            years: (1, 8),
            groups: 0,
            calibrate: false,
            multi_field_rate: 0.0,
            out_of_window_rate: 0.0,
            success: SuccessModel::Rates { top10: 0.0, top1: 0.0 },
            fixed_pubs: pubs
                .iter()
                .enumerate()
                .map(|(i, (year, authors))| FixedPub {
                    pub_id: format!("P{}", i + 1),
                    year: *year,
                    authors: authors.chars().map(String::from).collect(),
                })
                .collect(),
            ..Default::default()
        }
    }

    /// Planted teams with all overlap kinds and light background noise.
    pub fn planted(seed: u64, groups: usize) -> Self {
        SynthConfig {
            seed,
            groups,
            wiring: Wiring { core: 0.3, extension: 0.3, offshoot: 0.3 },
            noise_pubs: groups * 3,
            noise_authors: (groups * 10).max(100),
            ..Default::default()
        }
    }

    /// Unwired teams whose first top-1% publication follows a constant hazard.
    pub fn hazard(seed: u64, groups: usize, hazard: f64) -> Self {
        SynthConfig {
            seed,
            groups,
            team_size: (2, 4),
            max_pubs_per_year: 1,
            success: SuccessModel::Hazard { q_basis_points: Percentile::TOP1.basis_points(), hazard },
            ..Default::default()
        }
    }

    /// Closed teams first succeed at age 3, teams with a preceding core at age 2.
    pub fn shift(seed: u64, groups: usize) -> Self {
        SynthConfig {
            seed,
            groups,
            team_size: (3, 5),
            duration: (3, 8),
            max_pubs_per_year: 1,
            wiring: Wiring { core: 0.5, extension: 0.0, offshoot: 0.0 },
            success: SuccessModel::FixedAge { q_basis_points: Percentile::TOP1.basis_points(), closed_age: 3, core_age: 2 },
            ..Default::default()
        }
    }

    /// About `n_pubs` publications over `n_authors` authors, mostly background.
    pub fn scale(seed: u64, n_pubs: usize, n_authors: usize) -> Self {
        let groups = n_pubs / 50;
        SynthConfig {
            seed,
            groups,
            n_fields: 20,
            n_cities: 500,
            n_countries: 60,
            wiring: Wiring { core: 0.2, extension: 0.2, offshoot: 0.2 },
            fill_to: Some(n_pubs),
            noise_authors: n_authors,
            ..Default::default()
        }
    }

    /// Publications per planted team year needed for a persistent span of `d` years.
    pub fn min_pubs_per_year(&self, d: u32) -> u32 {
        let covered = d.min(self.persistence.window_len).max(1);
        self.persistence.min_pubs.div_ceil(covered)
    }

    fn check(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Infeasible(m));
        let n_years = self.years.1 - self.years.0 + 1;
        if n_years < 1 {
            return bad(format!("empty year range {:?}", self.years));
        }
        if self.persistence.validate().is_err() {
            return bad("persistence parameters must be positive".into());
        }
        if self.n_fields == 0 || self.n_cities == 0 || self.n_countries == 0 || self.n_countries > 26 * 26 {
            return bad("need at least one field, city and country (at most 676 countries)".into());
        }
        if self.groups > 0 {
            if self.team_size.0 < 2 || self.team_size.0 > self.team_size.1 {
                return bad(format!("team sizes {:?} must be at least 2 and ordered", self.team_size));
            }
            if self.duration.0 == 0 || self.duration.0 > self.duration.1 || self.duration.1 as Year > n_years {
                return bad(format!("durations {:?} do not fit years {:?}", self.duration, self.years));
            }
            if self.max_pubs_per_year == 0 {
                return bad("max_pubs_per_year of 0 cannot satisfy persistence".into());
            }
        }
        if (self.noise_pubs > 0 || self.fill_to.is_some()) && (self.noise_authors == 0 || self.max_noise_authors == 0) {
            return bad("noise publications need noise authors".into());
        }
        for rate in [self.multi_field_rate, self.out_of_window_rate, self.wiring.core, self.wiring.extension, self.wiring.offshoot] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("rate {rate} outside [0, 1]"));
            }
        }
        if !(0.0..1.0).contains(&self.reject_rate) {
            return bad(format!("reject rate {} outside [0, 1)", self.reject_rate));
        }
        match self.success {
            SuccessModel::Rates { top10, top1 } if !(top1 >= 0.0 && top10 >= 0.0 && top1 + top10 <= 1.0) => {
                bad("success rates must be non-negative and sum to at most 1".into())
            }
            SuccessModel::Hazard { q_basis_points, hazard }
                if Percentile::from_basis_points(q_basis_points).is_none() || !(0.0..=1.0).contains(&hazard) =>
            {
                bad("hazard needs a valid percentile and a probability".into())
            }
            SuccessModel::FixedAge { q_basis_points, closed_age, core_age }
                if Percentile::from_basis_points(q_basis_points).is_none() || closed_age == 0 || core_age == 0 =>
            {
                bad("fixed ages are 1-based and need a valid percentile".into())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Focal,
    Core,
    Extension,
    Offshoot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedTeam {
    /// `g<group>.<role>`.
    pub key: String,
    pub role: Role,
    /// Sorted author ids.
    pub members: Vec<String>,
    pub intervals: Vec<Span>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedOverlap {
    pub focal: String,
    pub other: String,
    pub kind: String,
    pub timing: String,
    pub impulse: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedTag {
    pub pub_id: String,
    pub top10: bool,
    pub top1: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub years: (Year, Year),
    pub teams: Vec<PlantedTeam>,
    pub overlaps: Vec<PlantedOverlap>,
    pub tags: Vec<PlantedTag>,
    pub valid_pubs: usize,
    pub rejected_lines: usize,
}

impl GroundTruth {
    pub fn load(path: &Path) -> Result<Self, SynthError> {
        let text = fs::read_to_string(path)
            .map_err(|e| SynthError::Truth { path: path.display().to_string(), message: e.to_string() })?;
        serde_json::from_str(&text)
            .map_err(|e| SynthError::Truth { path: path.display().to_string(), message: e.to_string() })
    }
}

/// Generated files, held in memory.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    /// One JSON record per line, in output order.
    pub publication_lines: Vec<String>,
    /// `(citing_pub_id, cited_pub_id, citing_year)`.
    pub citations: Vec<(String, String, Year)>,
    pub truth: GroundTruth,
}

impl SynthCorpus {
    pub fn write_publications<W: Write>(&self, mut w: W) -> io::Result<()> {
        for line in &self.publication_lines {
            w.write_all(line.as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn write_citations<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["citing_pub_id", "cited_pub_id", "citing_year"])?;
        for (citing, cited, year) in &self.citations {
            out.write_record([citing.as_str(), cited.as_str(), year.to_string().as_str()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `publications.jsonl`, `citations.csv` and `truth.json` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), SynthError> {
        let io_err = |p: &Path, e: io::Error| SynthError::Io { path: p.display().to_string(), source: e };
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let p = dir.join("publications.jsonl");
        let f = File::create(&p).map_err(|e| io_err(&p, e))?;
        self.write_publications(BufWriter::new(f)).map_err(|e| io_err(&p, e))?;
        let p = dir.join("citations.csv");
        let f = File::create(&p).map_err(|e| io_err(&p, e))?;
        self.write_citations(BufWriter::new(f)).map_err(|e| io_err(&p, io::Error::other(e)))?;
        let p = dir.join("truth.json");
        let f = File::create(&p).map_err(|e| io_err(&p, e))?;
        serde_json::to_writer(BufWriter::new(f), &self.truth).map_err(|e| io_err(&p, io::Error::other(e)))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Tier {
    Plain,
    Top10,
    Top1,
}

struct PlannedPub {
    pub_id: String,
    year: Year,
    authors: Vec<u32>,
    fields: Vec<u32>,
    tier: Tier,
}

struct PlannedTeam {
    key: String,
    role: Role,
    members: Vec<u32>,
    span: Span,
    /// Indices into the publication plan.
    pubs: Vec<usize>,
}

struct Home {
    org: String,
    city: u32,
}

struct Generator<'c> {
    cfg: &'c SynthConfig,
    rng: ChaCha8Rng,
    names: Vec<String>,
    homes: Vec<Home>,
    by_name: HashMap<String, u32>,
    pubs: Vec<PlannedPub>,
    teams: Vec<PlannedTeam>,
    overlaps: Vec<PlantedOverlap>,
    next_team_author: usize,
}

fn country_code(i: u32) -> String {
    let a = (b'A' + (i / 26) as u8) as char;
    let b = (b'A' + (i % 26) as u8) as char;
    format!("{a}{b}")
}

impl<'c> Generator<'c> {
    fn new(cfg: &'c SynthConfig) -> Self {
        Generator {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            names: Vec::new(),
            homes: Vec::new(),
            by_name: HashMap::new(),
            pubs: Vec::new(),
            teams: Vec::new(),
            overlaps: Vec::new(),
            next_team_author: 0,
        }
    }

    fn author(&mut self, name: String) -> u32 {
        if let Some(&id) = self.by_name.get(&name) {
            return id;
        }
        let city = self.rng.random_range(0..self.cfg.n_cities);
        let org = format!("O{city:04}-{}", self.rng.random_range(0..3));
        let id = self.names.len() as u32;
        self.by_name.insert(name.clone(), id);
        self.names.push(name);
        self.homes.push(Home { org, city });
        id
    }

    fn fresh_team_authors(&mut self, n: usize) -> Vec<u32> {
        (0..n)
            .map(|_| {
                self.next_team_author += 1;
                self.author(format!("T{:07}", self.next_team_author))
            })
            .collect()
    }

    fn fields(&mut self) -> Vec<u32> {
        let first = self.rng.random_range(0..self.cfg.n_fields);
        let mut f = vec![first];
        if self.cfg.n_fields > 1 && self.rng.random_bool(self.cfg.multi_field_rate) {
            let second = (first + self.rng.random_range(1..self.cfg.n_fields)) % self.cfg.n_fields;
            f.push(second);
        }
        f.sort_unstable();
        f
    }

    fn add_pub(&mut self, year: Year, authors: Vec<u32>, tier: Tier) -> usize {
        let fields = self.fields();
        let pub_id = format!("P{:08}", self.pubs.len() + 1);
        self.pubs.push(PlannedPub { pub_id, year, authors, fields, tier });
        self.pubs.len() - 1
    }

    fn plant(&mut self, key: String, role: Role, members: Vec<u32>, span: Span) -> usize {
        let d = span.years();
        let ppy = self.cfg.min_pubs_per_year(d).max(self.rng.random_range(1..=self.cfg.max_pubs_per_year));
        let mut pubs = Vec::new();
        for year in span.start..=span.end {
            for _ in 0..ppy {
                pubs.push(self.add_pub(year, members.clone(), Tier::Plain));
            }
        }
        let mut sorted = members;
        sorted.sort_unstable();
        self.teams.push(PlannedTeam { key, role, members: sorted, span, pubs });
        self.teams.len() - 1
    }

    fn overlap(&mut self, focal: usize, other: usize, kind: OverlapKind) {
        let (f, o) = (self.teams[focal].span, self.teams[other].span);
        let timing = match o.start.cmp(&f.start) {
            std::cmp::Ordering::Less => Timing::Preceding,
            std::cmp::Ordering::Equal => Timing::Simultaneous,
            std::cmp::Ordering::Greater => Timing::Succeeding,
        };
        let impulse = cell_impulse(kind, timing).expect("planted overlap in a feasible cell");
        self.overlaps.push(PlantedOverlap {
            focal: self.teams[focal].key.clone(),
            other: self.teams[other].key.clone(),
            kind: kind.as_str().into(),
            timing: timing.as_str().into(),
            impulse: impulse.as_str().into(),
        });
    }

    /// One focal team with its optional core, extension and offshoot.
    ///
    /// Every author pair ends up with a single contiguous period: cores span
    /// past the focal team, extensions sit inside it, offshoots overlap it
    /// in time (and stay inside the core when there is one).
    fn group(&mut self, g: usize) {
        let (y0, y1) = self.cfg.years;
        let size = self.rng.random_range(self.cfg.team_size.0..=self.cfg.team_size.1);
        let d = self.rng.random_range(self.cfg.duration.0..=self.cfg.duration.1) as Year;
        let start = self.rng.random_range(y0..=y1 - d + 1);
        let span = Span::new(start, start + d - 1);
        let members = self.fresh_team_authors(size);
        let focal = self.plant(format!("g{g}.focal"), Role::Focal, members.clone(), span);

        let want_core = size >= 3 && start > y0 && self.rng.random_bool(self.cfg.wiring.core);
        let want_ext = d >= 2 && self.rng.random_bool(self.cfg.wiring.extension);
        let want_off = self.rng.random_bool(self.cfg.wiring.offshoot);

        // Offshoot timing is chosen first so a shared core can make room for it.
        let timing = if want_off {
            let mut options = vec![Timing::Simultaneous];
            if d >= 2 {
                options.push(Timing::Succeeding);
            }
            if start - y0 >= if want_core { 2 } else { 1 } {
                options.push(Timing::Preceding);
            }
            Some(*options.choose(&mut self.rng).unwrap())
        } else {
            None
        };

        let mut core = None;
        if want_core {
            let c = self.rng.random_range(size.div_ceil(2).max(2)..size);
            let mut picked: Vec<u32> = members.choose_multiple(&mut self.rng, c).copied().collect();
            picked.sort_unstable();
            let lead = if timing == Some(Timing::Preceding) { 2 } else { self.rng.random_range(1..=2) };
            let core_span = Span::new((start - lead).max(y0), (span.end + self.rng.random_range(0..=1)).min(y1));
            let id = self.plant(format!("g{g}.core"), Role::Core, picked, core_span);
            self.overlap(focal, id, OverlapKind::Core);
            core = Some(id);
        }

        if want_ext {
            let extra = self.rng.random_range(1..=2usize.min(size));
            let mut ext = members.clone();
            ext.extend(self.fresh_team_authors(extra));
            let sub = loop {
                let s = self.rng.random_range(span.start..=span.end);
                let e = self.rng.random_range(s..=span.end);
                if (s, e) != (span.start, span.end) {
                    break Span::new(s, e);
                }
            };
            let id = self.plant(format!("g{g}.extension"), Role::Extension, ext, sub);
            self.overlap(focal, id, OverlapKind::Extension);
        }

        if let Some(timing) = timing {
            let core_members = core.map(|c| self.teams[c].members.clone()).unwrap_or_default();
            let lo = size.div_ceil(2).max(core_members.len()).max(1);
            let shared = self.rng.random_range(lo..size);
            let mut rest: Vec<u32> = members.iter().copied().filter(|m| !core_members.contains(m)).collect();
            rest.shuffle(&mut self.rng);
            let mut off: Vec<u32> = core_members.clone();
            off.extend(rest.into_iter().take(shared - core_members.len()));
            let new = self.rng.random_range(1..=shared);
            off.extend(self.fresh_team_authors(new));

            let end_cap = core.map_or(y1, |c| self.teams[c].span.end);
            let off_span = match timing {
                Timing::Preceding => {
                    let s = match core {
                        Some(c) => self.rng.random_range(self.teams[c].span.start + 1..start),
                        None => self.rng.random_range((start - 2).max(y0)..start),
                    };
                    let e_lo = if core.is_some() { start } else { span.end };
                    Span::new(s, self.rng.random_range(e_lo..=end_cap.max(e_lo)))
                }
                Timing::Simultaneous => Span::new(start, self.rng.random_range(start..=end_cap)),
                Timing::Succeeding => {
                    let s = self.rng.random_range(start + 1..=span.end);
                    Span::new(s, self.rng.random_range(s..=end_cap))
                }
            };
            let id = self.plant(format!("g{g}.offshoot"), Role::Offshoot, off, off_span);
            let kind = if core.is_some() { OverlapKind::OffshootSharedCore } else { OverlapKind::OffshootNoSharedCore };
            self.overlap(focal, id, kind);
        }
    }

    fn plant_success(&mut self) {
        let q_tier = |bp: u32| if bp == Percentile::TOP1.basis_points() { Tier::Top1 } else { Tier::Top10 };
        match self.cfg.success {
            SuccessModel::Rates { top10, top1 } => {
                for t in 0..self.teams.len() {
                    for i in 0..self.teams[t].pubs.len() {
                        let p = self.teams[t].pubs[i];
                        let r: f64 = self.rng.random();
                        self.pubs[p].tier = if r < top1 {
                            Tier::Top1
                        } else if r < top1 + top10 {
                            Tier::Top10
                        } else {
                            Tier::Plain
                        };
                    }
                }
            }
            SuccessModel::Hazard { q_basis_points, hazard } => {
                for t in 0..self.teams.len() {
                    if self.teams[t].role != Role::Focal {
                        continue;
                    }
                    let span = self.teams[t].span;
                    for year in span.start..=span.end {
                        if self.rng.random_bool(hazard) {
                            self.succeed_in(t, year, q_tier(q_basis_points));
                            break;
                        }
                    }
                }
            }
            SuccessModel::FixedAge { q_basis_points, closed_age, core_age } => {
                // group -> (has a core, has any overlapping team)
                let mut groups: HashMap<String, (bool, bool)> = HashMap::new();
                for t in &self.teams {
                    let g = groups.entry(t.key.split('.').next().unwrap().to_string()).or_default();
                    g.0 |= t.role == Role::Core;
                    g.1 |= t.role != Role::Focal;
                }
                for t in 0..self.teams.len() {
                    if self.teams[t].role != Role::Focal {
                        continue;
                    }
                    let (with_core, wired) = groups[self.teams[t].key.split('.').next().unwrap()];
                    let age = if with_core {
                        core_age
                    } else if !wired {
                        closed_age
                    } else {
                        continue;
                    };
                    if age <= self.teams[t].span.years() {
                        let year = self.teams[t].span.start + age as Year - 1;
                        self.succeed_in(t, year, q_tier(q_basis_points));
                    }
                }
            }
        }
    }

    fn succeed_in(&mut self, team: usize, year: Year, tier: Tier) {
        let candidates: Vec<usize> = self.teams[team].pubs.iter().copied().filter(|&p| self.pubs[p].year == year).collect();
        let &p = candidates.choose(&mut self.rng).expect("planted team publishes every year");
        self.pubs[p].tier = tier;
    }

    fn noise(&mut self) {
        let n = match self.cfg.fill_to {
            Some(total) => total.saturating_sub(self.pubs.len() + self.cfg.fixed_pubs.len()),
            None => self.cfg.noise_pubs,
        };
        if n == 0 {
            return;
        }
        let pool_size = match self.cfg.fill_to {
            Some(_) => self.cfg.noise_authors.saturating_sub(self.names.len()).max(1000),
            None => self.cfg.noise_authors,
        };
        let pool: Vec<u32> = (0..pool_size).map(|i| self.author(format!("N{i:07}"))).collect();
        let limit = self.cfg.persistence.min_pubs.saturating_sub(1);
        let mut pair_counts: HashMap<(u32, u32), u32> = HashMap::new();
        let (y0, y1) = self.cfg.years;
        for _ in 0..n {
            let year = self.rng.random_range(y0..=y1);
            let mut authors = vec![*pool.choose(&mut self.rng).unwrap()];
            for _attempt in 0..8 {
                let k = self.rng.random_range(1..=self.cfg.max_noise_authors.min(pool.len()));
                let mut pick: Vec<u32> = pool.choose_multiple(&mut self.rng, k).copied().collect();
                pick.sort_unstable();
                let pairs: Vec<(u32, u32)> =
                    pick.iter().enumerate().flat_map(|(i, &a)| pick[i + 1..].iter().map(move |&b| (a, b))).collect();
                if pairs.iter().all(|p| pair_counts.get(p).copied().unwrap_or(0) < limit) {
                    for p in pairs {
                        *pair_counts.entry(p).or_default() += 1;
                    }
                    authors = pick;
                    break;
                }
            }
            self.add_pub(year, authors, Tier::Plain);
        }
    }

    fn fixed(&mut self) {
        for f in &self.cfg.fixed_pubs {
            let authors: Vec<u32> = f.authors.iter().map(|a| self.author(a.clone())).collect();
            let fields = vec![0];
            self.pubs.push(PlannedPub { pub_id: f.pub_id.clone(), year: f.year, authors, fields, tier: Tier::Plain });
        }
    }

    /// Pads every (field, year) cell with single-author publications so that
    /// the number of top-1% and top-10% publications equals the cutoff ranks.
    fn calibrate(&mut self) {
        let mut cells: BTreeMap<(u32, Year), [usize; 3]> = BTreeMap::new();
        for p in &self.pubs {
            for &f in &p.fields {
                cells.entry((f, p.year)).or_default()[p.tier as usize] += 1;
            }
        }
        let fillers: Vec<u32> = (0..200).map(|i| self.author(format!("Z{i:05}"))).collect();
        for ((field, year), [plain, top10, top1]) in cells {
            let n = plain + top10 + top1;
            let mut total = n;
            let (k1, k10) = loop {
                let (c1, c10) = (Percentile::TOP1.cutoff_rank(total), Percentile::TOP10.cutoff_rank(total));
                let (f1, f10) = (c1 as i64 - top1 as i64, (c10 - c1) as i64 - top10 as i64);
                if f1 >= 0 && f10 >= 0 && (total - n) as i64 >= f1 + f10 {
                    break (f1 as usize, f10 as usize);
                }
                total += 1;
            };
            let plain_fill = total - n - k1 - k10;
            for (tier, count) in [(Tier::Top1, k1), (Tier::Top10, k10), (Tier::Plain, plain_fill)] {
                for _ in 0..count {
                    let author = *fillers.choose(&mut self.rng).unwrap();
                    let pub_id = format!("P{:08}", self.pubs.len() + 1);
                    self.pubs.push(PlannedPub { pub_id, year, authors: vec![author], fields: vec![field], tier });
                }
            }
        }
    }

    fn citation_count(&mut self, tier: Tier) -> u32 {
        match tier {
            Tier::Top1 => self.rng.random_range(30..=39),
            Tier::Top10 => self.rng.random_range(10..=19),
            Tier::Plain => self.rng.random_range(0..=4),
        }
    }

    fn raw(&self, p: &PlannedPub) -> RawPublication {
        RawPublication {
            pub_id: p.pub_id.clone(),
            year: i64::from(p.year),
            doc_type: ["Article", "Article", "Article", "Review", "Letter", "Proceedings Paper"][p.pub_id.len() % 6].into(),
            fields: p.fields.iter().map(|f| format!("FIELD{f:03}")).collect(),
            authors: p
                .authors
                .iter()
                .map(|&a| {
                    let home = &self.homes[a as usize];
                    let city = home.city;
                    let country = city % self.cfg.n_countries;
                    // coordinates are a pure function of the city id
                    let lat = f64::from(((city * 37) % 1000) as i32 * 11 - 5000) / 100.0;
                    let lon = f64::from(((city * 91) % 1000) as i32 * 34 - 17000) / 100.0;
                    RawAuthor {
                        author_id: self.names[a as usize].clone(),
                        affiliations: vec![RawAffiliation {
                            org_id: Some(home.org.clone()),
                            city_id: Some(format!("C{city:04}")),
                            country: Some(country_code(country)),
                            lat: Some(lat),
                            lon: Some(lon),
                        }],
                    }
                })
                .collect(),
        }
    }

    fn reject_line(&self, i: usize) -> String {
        let (y0, _) = self.cfg.years;
        let mut r = RawPublication {
            pub_id: format!("R{i:08}"),
            year: i64::from(y0),
            doc_type: "Article".into(),
            fields: vec!["FIELD000".into()],
            authors: vec![RawAuthor {
                author_id: "R".into(),
                affiliations: vec![RawAffiliation { org_id: Some("O".into()), ..Default::default() }],
            }],
        };
        match i % 4 {
            0 => r.doc_type = "Editorial".into(),
            1 => r.year = i64::from(y0) - 5,
            2 => r.fields.clear(),
            _ => r.authors.clear(),
        }
        serde_json::to_string(&r).expect("serializable")
    }
}

pub fn generate_corpus(cfg: &SynthConfig) -> Result<SynthCorpus, SynthError> {
    cfg.check()?;
    let mut g = Generator::new(cfg);
    for i in 0..cfg.groups {
        g.group(i);
    }
    g.plant_success();
    g.noise();
    g.fixed();
    if cfg.calibrate {
        g.calibrate();
    }

    let mut citations = Vec::new();
    let mut n_citing = 0usize;
    let mut tags = Vec::with_capacity(g.pubs.len());
    for i in 0..g.pubs.len() {
        let (tier, year) = (g.pubs[i].tier, g.pubs[i].year);
        let count = g.citation_count(tier);
        for _ in 0..count {
            n_citing += 1;
            let y = year + g.rng.random_range(0..=2);
            citations.push((format!("X{n_citing:09}"), g.pubs[i].pub_id.clone(), y));
        }
        if g.rng.random_bool(cfg.out_of_window_rate) {
            for _ in 0..g.rng.random_range(1..=3) {
                n_citing += 1;
                let y = year + g.rng.random_range(3..=5);
                citations.push((format!("X{n_citing:09}"), g.pubs[i].pub_id.clone(), y));
            }
        }
        tags.push(PlantedTag {
            pub_id: g.pubs[i].pub_id.clone(),
            top10: tier >= Tier::Top10,
            top1: tier == Tier::Top1,
        });
    }
    citations.shuffle(&mut g.rng);

    let mut lines: Vec<String> =
        g.pubs.iter().map(|p| serde_json::to_string(&g.raw(p)).expect("serializable")).collect();
    let valid = lines.len();
    let rejected = (cfg.reject_rate * valid as f64 / (1.0 - cfg.reject_rate)).round() as usize;
    lines.extend((0..rejected).map(|i| g.reject_line(i)));
    lines.shuffle(&mut g.rng);

    let teams = g
        .teams
        .iter()
        .map(|t| {
            let mut members: Vec<String> = t.members.iter().map(|&a| g.names[a as usize].clone()).collect();
            members.sort();
            PlantedTeam { key: t.key.clone(), role: t.role, members, intervals: vec![t.span] }
        })
        .collect();
    let truth = GroundTruth {
        seed: cfg.seed,
        years: cfg.years,
        teams,
        overlaps: g.overlaps,
        tags,
        valid_pubs: valid,
        rejected_lines: rejected,
    };
    Ok(SynthCorpus { publication_lines: lines, citations, truth })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct VerifyReport {
    pub planted: usize,
    pub exact: usize,
    pub superset: usize,
    pub missing: Vec<String>,
    pub mined: usize,
    /// Mined teams that exactly match a planted one.
    pub mined_matching: usize,
    pub overlaps_planted: usize,
    pub overlaps_matched: usize,
    pub tags_planted: usize,
    pub tags_matched: usize,
}

fn rate(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl VerifyReport {
    /// Exact or superset matches over planted teams.
    pub fn recall(&self) -> Option<f64> {
        rate(self.exact + self.superset, self.planted)
    }

    pub fn exact_recall(&self) -> Option<f64> {
        rate(self.exact, self.planted)
    }

    pub fn precision(&self) -> Option<f64> {
        rate(self.mined_matching, self.mined)
    }

    pub fn overlap_match_rate(&self) -> Option<f64> {
        rate(self.overlaps_matched, self.overlaps_planted)
    }

    pub fn tag_match_rate(&self) -> Option<f64> {
        rate(self.tags_matched, self.tags_planted)
    }

    pub fn summary(&self) -> String {
        let f = |r: Option<f64>| r.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        format!(
            "planted teams {} (exact {}, superset {}, missing {}); recall {} (exact {}); mined {} precision {}; \
             overlaps {}/{} ({}); tags {}/{} ({})",
            self.planted,
            self.exact,
            self.superset,
            self.missing.len(),
            f(self.recall()),
            f(self.exact_recall()),
            self.mined,
            f(self.precision()),
            self.overlaps_matched,
            self.overlaps_planted,
            f(self.overlap_match_rate()),
            self.tags_matched,
            self.tags_planted,
            f(self.tag_match_rate()),
        )
    }
}

/// Compares mined teams, overlap relations and tags with the planted truth.
/// A superset match is a mined team containing every planted member whose
/// intervals cover every planted interval.
pub fn verify_against_truth(
    pubs: &PublicationTable,
    teams: &[Team],
    relations: &[OverlapRelation],
    tags: &SuccessTags,
    truth: &GroundTruth,
) -> VerifyReport {
    let names = |t: &Team| -> Vec<String> { t.members.iter().map(|&a| pubs.author_name(a).to_string()).collect() };
    let mut by_members: HashMap<Vec<String>, &Team> = HashMap::new();
    let mut by_author: HashMap<&str, Vec<&Team>> = HashMap::new();
    for t in teams {
        by_members.insert(names(t), t);
        for &a in &t.members {
            by_author.entry(pubs.author_name(a)).or_default().push(t);
        }
    }

    let mut report = VerifyReport { planted: truth.teams.len(), mined: teams.len(), ..Default::default() };
    let mut matched: HashMap<&str, u32> = HashMap::new();
    for p in &truth.teams {
        if let Some(t) = by_members.get(&p.members).filter(|t| t.intervals == p.intervals) {
            report.exact += 1;
            matched.insert(p.key.as_str(), t.id.0);
            continue;
        }
        let covers = |t: &Team| {
            p.members.iter().all(|m| t.members.iter().any(|&a| pubs.author_name(a) == m))
                && p.intervals.iter().all(|s| t.intervals.iter().any(|i| i.covers(s)))
        };
        let found = p.members.first().and_then(|m| by_author.get(m.as_str())).is_some_and(|ts| ts.iter().any(|t| covers(t)));
        if found {
            report.superset += 1;
        } else {
            report.missing.push(p.key.clone());
        }
    }
    let planted_sets: HashMap<&Vec<String>, &Vec<Span>> = truth.teams.iter().map(|p| (&p.members, &p.intervals)).collect();
    report.mined_matching = teams.iter().filter(|t| planted_sets.get(&names(t)) == Some(&&t.intervals)).count();

    let rel: HashMap<(u32, u32), &OverlapRelation> = relations.iter().map(|r| ((r.focal.0, r.other.0), r)).collect();
    report.overlaps_planted = truth.overlaps.len();
    report.overlaps_matched = truth
        .overlaps
        .iter()
        .filter(|o| {
            let (Some(&f), Some(&t)) = (matched.get(o.focal.as_str()), matched.get(o.other.as_str())) else {
                return false;
            };
            rel.get(&(f, t)).is_some_and(|r| {
                r.kind.as_str() == o.kind && r.timing.as_str() == o.timing && r.impulse.as_str() == o.impulse
            })
        })
        .count();

    report.tags_planted = truth.tags.len();
    report.tags_matched = truth
        .tags
        .iter()
        .filter(|t| {
            pubs.pub_idx(&t.pub_id).is_some_and(|i| {
                let got = tags.get(i);
                got.top10 == t.top10 && got.top1 == t.top1
            })
        })
        .count();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{read_publications, IngestConfig};
    use crate::persistence::persistent_periods;

    #[test]
    fn same_seed_same_bytes() {
        let cfg = SynthConfig::planted(7, 20);
        let a = generate_corpus(&cfg).unwrap();
        let b = generate_corpus(&cfg).unwrap();
        assert_eq!(a.publication_lines, b.publication_lines);
        assert_eq!(a.citations, b.citations);
        assert_eq!(a.truth, b.truth);
        let c = generate_corpus(&SynthConfig::planted(8, 20)).unwrap();
        assert_ne!(a.publication_lines, c.publication_lines);
    }

    #[test]
    fn output_passes_ingest() {
        let corpus = generate_corpus(&SynthConfig::planted(3, 30)).unwrap();
        let text = corpus.publication_lines.join("\n");
        let (table, report) = read_publications(text.as_bytes(), &IngestConfig::default()).unwrap();
        assert!(report.rejects.is_empty(), "{:?}", report.reject_counts());
        assert_eq!(table.len(), corpus.truth.valid_pubs);
    }

    #[test]
    fn planted_reject_rate() {
        let cfg = SynthConfig { reject_rate: 0.133, ..SynthConfig::planted(3, 30) };
        let corpus = generate_corpus(&cfg).unwrap();
        let text = corpus.publication_lines.join("\n");
        let (_, report) = read_publications(text.as_bytes(), &IngestConfig::default()).unwrap();
        assert_eq!(report.rejects.len(), corpus.truth.rejected_lines);
        assert!((report.rejected_fraction() - 0.133).abs() < 0.005);
    }

    #[test]
    fn planted_pairs_reproduce_planted_spans() {
        let cfg = SynthConfig { wiring: Wiring::default(), noise_pubs: 0, calibrate: false, ..SynthConfig::planted(5, 50) };
        let corpus = generate_corpus(&cfg).unwrap();
        let text = corpus.publication_lines.join("\n");
        let (table, _) = read_publications(text.as_bytes(), &IngestConfig::default()).unwrap();
        let timelines = crate::coauthor::build_pair_timelines(&table, None);
        for team in &corpus.truth.teams {
            let a = table.author_id(&team.members[0]).unwrap();
            let b = table.author_id(&team.members[1]).unwrap();
            let t = timelines.get(crate::coauthor::AuthorPair::new(a, b)).unwrap();
            assert_eq!(persistent_periods(&t.years, cfg.persistence), team.intervals);
        }
    }

    #[test]
    fn minimum_yearly_output() {
        let cfg = SynthConfig::default();
        assert_eq!(cfg.min_pubs_per_year(1), 3);
        assert_eq!(cfg.min_pubs_per_year(2), 2);
        assert_eq!(cfg.min_pubs_per_year(3), 1);
        assert_eq!(cfg.min_pubs_per_year(8), 1);
    }

    #[test]
    fn infeasible_configs_rejected() {
        let zero = SynthConfig { max_pubs_per_year: 0, ..Default::default() };
        assert!(matches!(generate_corpus(&zero), Err(SynthError::Infeasible(_))));
        let long = SynthConfig { duration: (1, 30), ..Default::default() };
        assert!(generate_corpus(&long).is_err());
        let single = SynthConfig { team_size: (1, 3), ..Default::default() };
        assert!(generate_corpus(&single).is_err());
    }

    #[test]
    fn noise_pairs_stay_below_threshold() {
        let cfg = SynthConfig { groups: 0, noise_pubs: 3000, noise_authors: 60, calibrate: false, ..Default::default() };
        let corpus = generate_corpus(&cfg).unwrap();
        let text = corpus.publication_lines.join("\n");
        let (table, _) = read_publications(text.as_bytes(), &IngestConfig::default()).unwrap();
        let timelines = crate::coauthor::build_pair_timelines(&table, None);
        assert!(!timelines.is_empty());
        assert!(timelines.as_slice().iter().all(|t| t.years.len() < 3));
    }

    #[test]
    fn fig_s1_corpus_shape() {
        let corpus = generate_corpus(&SynthConfig::fig_s1()).unwrap();
        assert_eq!(corpus.truth.valid_pubs, 18);
        assert!(corpus.truth.teams.is_empty());
    }
}

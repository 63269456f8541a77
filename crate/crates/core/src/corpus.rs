//! Publication and citation ingest.
//!
//! Publications arrive as one JSON object per line:
//!
//! ```text
//! {"pub_id":"P1","year":2010,"doc_type":"Article","fields":["F1"],
//!  "authors":[{"author_id":"A1","affiliations":[
//!      {"org_id":"O1","city_id":"C1","country":"NL","lat":52.16,"lon":4.49}]}]}
//! ```
//!
//! Citations arrive as a comma-separated file with header
//! `citing_pub_id,cited_pub_id,citing_year`. Records that fail validation are
//! rejected with a reason and never stored; malformed lines are fatal.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::GeoPoint;
use crate::success::SuccessTags;
use crate::{AuthorId, CityId, CountryId, FieldId, OrgId, PubIdx, Year};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed record on line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate pub_id {pub_id:?} on line {line}")]
    DuplicatePubId { line: usize, pub_id: String },
}

impl IngestError {
    fn io(path: &Path, source: io::Error) -> Self {
        IngestError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DocType {
    Article,
    Review,
    Letter,
    ProceedingsPaper,
}

impl DocType {
    pub const ALL: [DocType; 4] = [
        DocType::Article,
        DocType::Review,
        DocType::Letter,
        DocType::ProceedingsPaper,
    ];

    /// Accepts the four retained document types, case-insensitively and
    /// ignoring spaces and underscores ("Proceeding Paper" is accepted too).
    pub fn parse(s: &str) -> Option<DocType> {
        let norm: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .flat_map(char::to_lowercase)
            .collect();
        match norm.as_str() {
            "article" => Some(DocType::Article),
            "review" => Some(DocType::Review),
            "letter" => Some(DocType::Letter),
            "proceedingspaper" | "proceedingpaper" => Some(DocType::ProceedingsPaper),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DocType::Article => "Article",
            DocType::Review => "Review",
            DocType::Letter => "Letter",
            DocType::ProceedingsPaper => "Proceedings Paper",
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

// Wire format.

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawAffiliation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub org_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub city_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawAuthor {
    pub author_id: String,
    #[serde(default)]
    pub affiliations: Vec<RawAffiliation>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawPublication {
    pub pub_id: String,
    pub year: i64,
    pub doc_type: String,
    #[serde(default)]
    pub fields: Vec<String>,
    #[serde(default)]
    pub authors: Vec<RawAuthor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RejectReason {
    Blank,
    EmptyId,
    DocType,
    YearWindow,
    NoFields,
    NoAuthors,
    DuplicateAuthor,
    NoAffiliation,
    UnlocatedAffiliation,
    InvalidCoordinates,
    InvalidCountry,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::Blank => "blank",
            RejectReason::EmptyId => "empty_id",
            RejectReason::DocType => "doc_type",
            RejectReason::YearWindow => "year_window",
            RejectReason::NoFields => "no_fields",
            RejectReason::NoAuthors => "no_authors",
            RejectReason::DuplicateAuthor => "duplicate_author",
            RejectReason::NoAffiliation => "no_affiliation",
            RejectReason::UnlocatedAffiliation => "unlocated_affiliation",
            RejectReason::InvalidCoordinates => "invalid_coordinates",
            RejectReason::InvalidCountry => "invalid_country",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestConfig {
    /// Inclusive publication-year window; `None` accepts every year.
    pub window: Option<(Year, Year)>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig { window: Some((2008, 2020)) }
    }
}

/// Checks every record-level invariant.
pub fn validate(raw: &RawPublication, config: &IngestConfig) -> Result<(), RejectReason> {
    if raw.pub_id.trim().is_empty() {
        return Err(RejectReason::EmptyId);
    }
    if DocType::parse(&raw.doc_type).is_none() {
        return Err(RejectReason::DocType);
    }
    let year_ok = Year::try_from(raw.year).is_ok_and(|y| match config.window {
        Some((lo, hi)) => lo <= y && y <= hi,
        None => true,
    });
    if !year_ok {
        return Err(RejectReason::YearWindow);
    }
    if raw.fields.iter().all(|f| f.trim().is_empty()) {
        return Err(RejectReason::NoFields);
    }
    if raw.authors.is_empty() {
        return Err(RejectReason::NoAuthors);
    }
    let mut seen = HashSet::with_capacity(raw.authors.len());
    for author in &raw.authors {
        if author.author_id.trim().is_empty() {
            return Err(RejectReason::EmptyId);
        }
        if !seen.insert(author.author_id.as_str()) {
            return Err(RejectReason::DuplicateAuthor);
        }
        if author.affiliations.is_empty() {
            return Err(RejectReason::NoAffiliation);
        }
        for aff in &author.affiliations {
            match (aff.lat, aff.lon) {
                (Some(lat), Some(lon)) => {
                    if GeoPoint::new(lat, lon).is_err() {
                        return Err(RejectReason::InvalidCoordinates);
                    }
                }
                (None, None) => {
                    if aff.org_id.is_none() {
                        return Err(RejectReason::UnlocatedAffiliation);
                    }
                }
                _ => return Err(RejectReason::InvalidCoordinates),
            }
            if let Some(c) = &aff.country {
                if c.len() != 2 || !c.bytes().all(|b| b.is_ascii_uppercase()) {
                    return Err(RejectReason::InvalidCountry);
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affiliation {
    pub org: Option<OrgId>,
    pub city: Option<CityId>,
    pub country: Option<CountryId>,
    pub coord: Option<GeoPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuthorEntry {
    pub author: AuthorId,
    pub affiliations: Vec<Affiliation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Publication {
    pub pub_id: String,
    pub year: Year,
    pub doc_type: DocType,
    /// Sorted, distinct.
    pub fields: Vec<FieldId>,
    pub authors: Vec<AuthorEntry>,
}

impl Publication {
    pub fn has_author(&self, author: AuthorId) -> bool {
        self.authors.iter().any(|a| a.author == author)
    }
}

/// Sorted string interner: ids follow lexicographic order of the names.
#[derive(Debug, Clone, Default, PartialEq)]
struct Names {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Names {
    fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }
}

/// Interner in first-seen order, sorted at the end.
#[derive(Default)]
struct Interner {
    index: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.index.insert(name.to_owned(), id);
        self.names.push(name.to_owned());
        id
    }

    /// Sorted names and the old-to-new id map.
    fn finish(self) -> (Names, Vec<u32>) {
        let mut order: Vec<u32> = (0..self.names.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| self.names[a as usize].cmp(&self.names[b as usize]));
        let mut remap = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let mut names = self.names;
        let mut index = self.index;
        for v in index.values_mut() {
            *v = remap[*v as usize];
        }
        let mut sorted = vec![String::new(); names.len()];
        for (old, name) in names.drain(..).enumerate() {
            sorted[remap[old] as usize] = name;
        }
        (Names { names: sorted, index }, remap)
    }
}

/// Converts validated records one at a time so raw strings never pile up.
#[derive(Default)]
struct TableBuilder {
    pubs: Vec<(usize, Publication)>,
    authors: Interner,
    fields: Interner,
    orgs: Interner,
    cities: Interner,
    countries: Interner,
}

impl TableBuilder {
    fn push(&mut self, line: usize, r: RawPublication) {
        let fields = r
            .fields
            .iter()
            .map(|f| f.trim())
            .filter(|f| !f.is_empty())
            .map(|f| FieldId(self.fields.intern(f)))
            .collect();
        let authors = r
            .authors
            .iter()
            .map(|a| AuthorEntry {
                author: AuthorId(self.authors.intern(&a.author_id)),
                affiliations: a
                    .affiliations
                    .iter()
                    .map(|aff| Affiliation {
                        org: aff.org_id.as_deref().map(|o| OrgId(self.orgs.intern(o))),
                        city: aff.city_id.as_deref().map(|c| CityId(self.cities.intern(c))),
                        country: aff.country.as_deref().map(|c| CountryId(self.countries.intern(c))),
                        coord: match (aff.lat, aff.lon) {
                            (Some(lat), Some(lon)) => Some(GeoPoint { lat, lon }),
                            _ => None,
                        },
                    })
                    .collect(),
            })
            .collect();
        let doc_type = DocType::parse(&r.doc_type).expect("validated doc type");
        self.pubs.push((line, Publication { pub_id: r.pub_id, year: r.year as Year, doc_type, fields, authors }));
    }

    fn finish(self) -> Result<PublicationTable, IngestError> {
        let mut records = self.pubs;
        records.par_sort_unstable_by(|a, b| a.1.pub_id.cmp(&b.1.pub_id).then(a.0.cmp(&b.0)));
        for w in records.windows(2) {
            if w[0].1.pub_id == w[1].1.pub_id {
                return Err(IngestError::DuplicatePubId { line: w[1].0, pub_id: w[1].1.pub_id.clone() });
            }
        }
        let (authors, a_map) = self.authors.finish();
        let (fields, f_map) = self.fields.finish();
        let (orgs, o_map) = self.orgs.finish();
        let (cities, c_map) = self.cities.finish();
        let (countries, k_map) = self.countries.finish();
        let pubs: Vec<Publication> = records
            .into_par_iter()
            .map(|(_, mut p)| {
                for f in &mut p.fields {
                    f.0 = f_map[f.index()];
                }
                p.fields.sort_unstable();
                p.fields.dedup();
                for a in &mut p.authors {
                    a.author.0 = a_map[a.author.index()];
                    for aff in &mut a.affiliations {
                        if let Some(o) = &mut aff.org {
                            o.0 = o_map[o.index()];
                        }
                        if let Some(c) = &mut aff.city {
                            c.0 = c_map[c.index()];
                        }
                        if let Some(k) = &mut aff.country {
                            k.0 = k_map[k.index()];
                        }
                    }
                }
                p
            })
            .collect();

        // One representative point per city: the lexicographically smallest
        // (lat, lon) seen anywhere in the corpus.
        let mut city_coords: Vec<Option<GeoPoint>> = vec![None; cities.names.len()];
        for p in &pubs {
            for a in &p.authors {
                for aff in &a.affiliations {
                    if let (Some(c), Some(pt)) = (aff.city, aff.coord) {
                        let slot = &mut city_coords[c.index()];
                        let smaller = match slot {
                            None => true,
                            Some(cur) => (pt.lat, pt.lon) < (cur.lat, cur.lon),
                        };
                        if smaller {
                            *slot = Some(pt);
                        }
                    }
                }
            }
        }

        let pub_index = pubs.iter().enumerate().map(|(i, p)| (p.pub_id.clone(), PubIdx::from(i))).collect();
        Ok(PublicationTable { pubs, pub_index, authors, fields, orgs, cities, countries, city_coords })
    }
}

/// Canonical in-memory publication table, sorted by `pub_id`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PublicationTable {
    pubs: Vec<Publication>,
    pub_index: HashMap<String, PubIdx>,
    authors: Names,
    fields: Names,
    orgs: Names,
    cities: Names,
    countries: Names,
    city_coords: Vec<Option<GeoPoint>>,
}

impl PublicationTable {
    /// Builds the table from records that already passed [`validate`].
    /// Each record carries the source line number for error reporting.
    pub fn from_valid_records(records: Vec<(usize, RawPublication)>) -> Result<Self, IngestError> {
        let mut b = TableBuilder::default();
        for (line, r) in records {
            b.push(line, r);
        }
        b.finish()
    }

    pub fn len(&self) -> usize {
        self.pubs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pubs.is_empty()
    }

    pub fn get(&self, idx: PubIdx) -> &Publication {
        &self.pubs[idx.index()]
    }

    pub fn publications(&self) -> &[Publication] {
        &self.pubs
    }

    pub fn iter(&self) -> impl Iterator<Item = (PubIdx, &Publication)> {
        self.pubs.iter().enumerate().map(|(i, p)| (PubIdx::from(i), p))
    }

    pub fn pub_idx(&self, pub_id: &str) -> Option<PubIdx> {
        self.pub_index.get(pub_id).copied()
    }

    pub fn n_authors(&self) -> usize {
        self.authors.names.len()
    }

    pub fn n_fields(&self) -> usize {
        self.fields.names.len()
    }

    pub fn author_name(&self, id: AuthorId) -> &str {
        &self.authors.names[id.index()]
    }

    pub fn author_id(&self, name: &str) -> Option<AuthorId> {
        self.authors.get(name).map(AuthorId)
    }

    pub fn field_name(&self, id: FieldId) -> &str {
        &self.fields.names[id.index()]
    }

    pub fn org_name(&self, id: OrgId) -> &str {
        &self.orgs.names[id.index()]
    }

    pub fn city_name(&self, id: CityId) -> &str {
        &self.cities.names[id.index()]
    }

    pub fn country_name(&self, id: CountryId) -> &str {
        &self.countries.names[id.index()]
    }

    pub fn n_countries(&self) -> usize {
        self.countries.names.len()
    }

    /// Canonical coordinates of a city, if any affiliation geolocated it.
    pub fn city_coord(&self, id: CityId) -> Option<GeoPoint> {
        self.city_coords[id.index()]
    }

    pub fn to_raw(&self, idx: PubIdx) -> RawPublication {
        let p = self.get(idx);
        RawPublication {
            pub_id: p.pub_id.clone(),
            year: i64::from(p.year),
            doc_type: p.doc_type.as_str().to_owned(),
            fields: p.fields.iter().map(|&f| self.field_name(f).to_owned()).collect(),
            authors: p
                .authors
                .iter()
                .map(|a| RawAuthor {
                    author_id: self.author_name(a.author).to_owned(),
                    affiliations: a
                        .affiliations
                        .iter()
                        .map(|aff| RawAffiliation {
                            org_id: aff.org.map(|o| self.org_name(o).to_owned()),
                            city_id: aff.city.map(|c| self.city_name(c).to_owned()),
                            country: aff.country.map(|c| self.country_name(c).to_owned()),
                            lat: aff.coord.map(|g| g.lat),
                            lon: aff.coord.map(|g| g.lon),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Writes the canonical line-delimited form (sorted by `pub_id`).
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (idx, _) in self.iter() {
            serde_json::to_writer(&mut w, &self.to_raw(idx))?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Author to publications postings (each list sorted by publication index).
    pub fn author_index(&self) -> AuthorPubIndex {
        let mut counts = vec![0u32; self.n_authors() + 1];
        for p in &self.pubs {
            for a in &p.authors {
                counts[a.author.index() + 1] += 1;
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut postings = vec![PubIdx(0); *offsets.last().unwrap_or(&0) as usize];
        for (idx, p) in self.iter() {
            for a in &p.authors {
                let slot = &mut fill[a.author.index()];
                postings[*slot as usize] = idx;
                *slot += 1;
            }
        }
        AuthorPubIndex { offsets, postings }
    }
}

/// Compressed author to publication postings.
#[derive(Debug, Clone)]
pub struct AuthorPubIndex {
    offsets: Vec<u32>,
    postings: Vec<PubIdx>,
}

impl AuthorPubIndex {
    pub fn pubs_of(&self, author: AuthorId) -> &[PubIdx] {
        let i = author.index();
        &self.postings[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reject {
    pub line: usize,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestReport {
    pub lines: usize,
    pub accepted: usize,
    pub rejects: Vec<Reject>,
}

impl IngestReport {
    pub fn reject_counts(&self) -> BTreeMap<RejectReason, usize> {
        let mut out = BTreeMap::new();
        for r in &self.rejects {
            *out.entry(r.reason).or_insert(0) += 1;
        }
        out
    }

    pub fn rejected_fraction(&self) -> f64 {
        if self.lines == 0 {
            0.0
        } else {
            self.rejects.len() as f64 / self.lines as f64
        }
    }

    /// `rejects.csv`: `line,reason`.
    pub fn write_rejects_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["line", "reason"])?;
        for r in &self.rejects {
            out.write_record([r.line.to_string().as_str(), r.reason.as_str()])?;
        }
        out.flush()?;
        Ok(())
    }
}

const PARSE_BATCH: usize = 1 << 16;

/// Parses and validates publication records from a line-delimited reader.
pub fn read_publications<R: BufRead>(
    reader: R,
    config: &IngestConfig,
) -> Result<(PublicationTable, IngestReport), IngestError> {
    let mut report = IngestReport::default();
    let mut builder = TableBuilder::default();
    let mut rejected_ids: Vec<(usize, String)> = Vec::new();

    let mut lines = reader.lines();
    let mut batch: Vec<String> = Vec::with_capacity(PARSE_BATCH);
    let mut first_line = 1usize;
    loop {
        batch.clear();
        for line in lines.by_ref().take(PARSE_BATCH) {
            let line = line.map_err(|e| IngestError::Malformed {
                line: first_line + batch.len(),
                message: e.to_string(),
            })?;
            batch.push(line);
        }
        if batch.is_empty() {
            break;
        }
        let parsed: Vec<Result<Option<RawPublication>, IngestError>> = batch
            .par_iter()
            .enumerate()
            .map(|(i, line)| {
                if line.trim().is_empty() {
                    return Ok(None);
                }
                serde_json::from_str::<RawPublication>(line)
                    .map(Some)
                    .map_err(|e| IngestError::Malformed { line: first_line + i, message: e.to_string() })
            })
            .collect();
        for (i, rec) in parsed.into_iter().enumerate() {
            let line = first_line + i;
            report.lines += 1;
            match rec? {
                None => report.rejects.push(Reject { line, reason: RejectReason::Blank }),
                Some(raw) => match validate(&raw, config) {
                    Ok(()) => builder.push(line, raw),
                    Err(reason) => {
                        report.rejects.push(Reject { line, reason });
                        rejected_ids.push((line, raw.pub_id));
                    }
                },
            }
        }
        first_line += batch.len();
    }

    // Duplicate ids are fatal whether or not the earlier copy was accepted.
    if !rejected_ids.is_empty() {
        let mut all: Vec<(&str, usize)> = builder
            .pubs
            .iter()
            .map(|(l, p)| (p.pub_id.as_str(), *l))
            .chain(rejected_ids.iter().map(|(l, id)| (id.as_str(), *l)))
            .collect();
        all.sort_unstable();
        for w in all.windows(2) {
            if w[0].0 == w[1].0 && !w[0].0.trim().is_empty() {
                return Err(IngestError::DuplicatePubId { line: w[0].1.max(w[1].1), pub_id: w[1].0.to_owned() });
            }
        }
    }

    report.accepted = builder.pubs.len();
    let table = builder.finish()?;
    Ok((table, report))
}

pub fn load_publications(path: &Path, config: &IngestConfig) -> Result<(PublicationTable, IngestReport), IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_publications(BufReader::with_capacity(1 << 20, file), config)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationEvent {
    pub citing_pub_id: String,
    pub cited: PubIdx,
    pub citing_year: Year,
}

/// Resolved citation events sorted by (cited, citing_year, citing_pub_id).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CitationTable {
    events: Vec<CitationEvent>,
}

impl CitationTable {
    pub fn events(&self) -> &[CitationEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn write_csv<W: Write>(&self, pubs: &PublicationTable, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["citing_pub_id", "cited_pub_id", "citing_year"])?;
        for e in &self.events {
            out.write_record([
                e.citing_pub_id.as_str(),
                pubs.get(e.cited).pub_id.as_str(),
                e.citing_year.to_string().as_str(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CitationReport {
    pub rows: usize,
    pub stored: usize,
    /// Cited publication not in the table.
    pub unknown_cited: usize,
    /// `citing_year` earlier than the cited publication's year.
    pub before_publication: usize,
    /// No `citing_year` and the citing publication is not in the table.
    pub missing_year: usize,
}

pub fn read_citations<R: Read>(reader: R, pubs: &PublicationTable) -> Result<(CitationTable, CitationReport), IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header_ok = rdr
        .headers()
        .map(|h| h.iter().collect::<Vec<_>>() == ["citing_pub_id", "cited_pub_id", "citing_year"])
        .unwrap_or(false);
    if !header_ok {
        // An empty file is an empty table.
        if rdr.headers().map(|h| h.is_empty()).unwrap_or(false) {
            return Ok((CitationTable::default(), CitationReport::default()));
        }
        return Err(IngestError::Malformed {
            line: 1,
            message: "expected header citing_pub_id,cited_pub_id,citing_year".into(),
        });
    }

    let mut report = CitationReport::default();
    let mut events = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let more = rdr.read_record(&mut record).map_err(|e| IngestError::Malformed {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 3 {
            return Err(IngestError::Malformed { line, message: format!("expected 3 columns, got {}", record.len()) });
        }
        report.rows += 1;
        let citing = &record[0];
        let Some(cited) = pubs.pub_idx(&record[1]) else {
            report.unknown_cited += 1;
            continue;
        };
        let citing_year: Year = if record[2].is_empty() {
            match pubs.pub_idx(citing) {
                Some(c) => pubs.get(c).year,
                None => {
                    report.missing_year += 1;
                    continue;
                }
            }
        } else {
            record[2].parse().map_err(|_| IngestError::Malformed {
                line,
                message: format!("citing_year {:?} is not an integer", &record[2]),
            })?
        };
        if citing_year < pubs.get(cited).year {
            report.before_publication += 1;
            continue;
        }
        events.push(CitationEvent { citing_pub_id: citing.to_owned(), cited, citing_year });
    }
    if report.before_publication > 0 {
        log::warn!("{} citation events predate the cited publication; dropped", report.before_publication);
    }
    events.par_sort_unstable_by(|a, b| {
        (a.cited, a.citing_year, &a.citing_pub_id).cmp(&(b.cited, b.citing_year, &b.citing_pub_id))
    });
    report.stored = events.len();
    Ok((CitationTable { events }, report))
}

pub fn load_citations(path: &Path, pubs: &PublicationTable) -> Result<(CitationTable, CitationReport), IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_citations(BufReader::with_capacity(1 << 20, file), pubs)
}

/// Column order of [`CorpusStats`] cells.
pub const STATS_COLUMNS: [&str; 3] = ["all", "top10", "top1"];

#[derive(Debug, Clone, PartialEq)]
pub struct DocTypeStats {
    pub doc_type: DocType,
    pub counts: [u64; 3],
    /// Percentage of the column population; 0 when the column is empty.
    pub percents: [f64; 3],
}

/// Document-type prevalence among all, top-10% and top-1% publications.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub rows: Vec<DocTypeStats>,
    pub totals: [u64; 3],
    /// Set for columns whose population is empty (percentages undefined).
    pub empty: [bool; 3],
}

pub fn corpus_stats(pubs: &PublicationTable, tags: &SuccessTags) -> CorpusStats {
    let mut counts = [[0u64; 3]; 4];
    for (idx, p) in pubs.iter() {
        let row = DocType::ALL.iter().position(|d| *d == p.doc_type).expect("known doc type");
        let tag = tags.get(idx);
        counts[row][0] += 1;
        counts[row][1] += u64::from(tag.top10);
        counts[row][2] += u64::from(tag.top1);
    }
    let mut totals = [0u64; 3];
    for row in &counts {
        for c in 0..3 {
            totals[c] += row[c];
        }
    }
    let empty = totals.map(|t| t == 0);
    let rows = DocType::ALL
        .iter()
        .zip(counts)
        .map(|(&doc_type, c)| DocTypeStats {
            doc_type,
            counts: c,
            percents: [0, 1, 2].map(|k| if totals[k] == 0 { 0.0 } else { 100.0 * c[k] as f64 / totals[k] as f64 }),
        })
        .collect();
    CorpusStats { rows, totals, empty }
}

impl CorpusStats {
    pub fn row(&self, doc_type: DocType) -> &DocTypeStats {
        self.rows.iter().find(|r| r.doc_type == doc_type).expect("all doc types present")
    }

    /// `doc_type,n_all,pct_all,n_top10,pct_top10,n_top1,pct_top1,empty`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["doc_type", "n_all", "pct_all", "n_top10", "pct_top10", "n_top1", "pct_top1", "empty"])?;
        let empty_flag: Vec<&str> = STATS_COLUMNS.iter().zip(self.empty).filter(|(_, e)| *e).map(|(c, _)| *c).collect();
        let empty_flag = empty_flag.join(";");
        for r in &self.rows {
            let mut rec = vec![r.doc_type.as_str().to_owned()];
            for k in 0..3 {
                rec.push(r.counts[k].to_string());
                rec.push(format!("{:.2}", r.percents[k]));
            }
            rec.push(empty_flag.clone());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

//! Persistent team mining for co-authorship data.
//!
//! The pipeline turns timestamped publication records into a temporal
//! co-authorship network, keeps only sufficiently persistent author pairs,
//! enumerates temporal maximal cliques over the result and treats those as
//! persistent teams. On top of the teams it computes citation success,
//! team composition, and the overlap taxonomy (core, extension and offshoot
//! teams) that yields persistence, synchronous and freshness impulses.
//!
//! Stages, in order:
//!
//! 1. [`corpus`]: ingest and validate publication and citation records.
//! 2. [`success`]: three-year citation counts and top-1% / top-10% tags.
//! 3. [`coauthor`]: per-pair publication-year timelines.
//! 4. [`persistence`]: persistent collaboration periods per pair.
//! 5. [`cliques`]: temporal maximal clique enumeration.
//! 6. [`teams`]: team assembly, publication association, composition.
//! 7. [`overlap`]: overlap candidates, classification and impulse summaries.
//! 8. [`analytics`]: aggregate tables.
//!
//! [`synth`] generates corpora with planted structure and [`pipeline`]
//! drives the stages with cached on-disk artifacts.

pub mod analytics;
pub mod cliques;
pub mod coauthor;
pub mod corpus;
pub mod geo;
pub mod overlap;
pub mod persistence;
pub mod pipeline;
pub mod success;
pub mod synth;
pub mod teams;

mod span;

pub use span::{merge_spans, Span};

/// Calendar year.
pub type Year = i32;

macro_rules! index_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl From<usize> for $name {
            #[inline]
            fn from(i: usize) -> Self {
                $name(u32::try_from(i).expect("index overflows u32"))
            }
        }
    };
}

index_newtype!(
    /// Dense author index. Indices follow the lexicographic order of the
    /// external author identifiers, so sorting by index sorts by identifier.
    AuthorId
);
index_newtype!(
    /// Position of a publication in a [`corpus::PublicationTable`].
    PubIdx
);
index_newtype!(
    /// Dense subject-field index.
    FieldId
);
index_newtype!(OrgId);
index_newtype!(CityId);
index_newtype!(CountryId);
index_newtype!(
    /// Dense team identifier, assigned in canonical member-set order.
    TeamId
);

//! Insight recommendation engine.
//!
//! A dataset is ingested once into an immutable columnar [`Dataset`]. Per-column
//! [`MomentSummary`] power sums and mergeable sketches are precomputed, after which
//! the [`Engine`] answers insight queries: ranked top-k lists per insight class,
//! fixed-attribute and metric-range constraints, similarity neighborhoods and
//! class-wide overviews. [`session`] keeps a focus list on top of the engine and
//! re-ranks recommendations around it.
//!
//! ```
//! use insight_core::{ingest_csv, CsvOptions, Engine, EngineConfig, InsightClass, InsightQuery};
//!
//! let csv = "a,b,c\n1,2,9\n2,4,7\n3,6,8\n4,8,1\n";
//! let ds = ingest_csv("demo", csv.as_bytes(), &CsvOptions::default()).unwrap();
//! let engine = Engine::new(ds, EngineConfig::default());
//! let top = engine.rank(&InsightQuery::new(InsightClass::LinearRelationship)).unwrap();
//! assert_eq!(top[0].tuple, vec!["a".to_string(), "b".to_string()]);
//! ```

pub mod bench;
pub mod dataset;
mod error;
pub mod metrics;
pub mod moments;
mod numeric;
pub mod query;
pub mod session;
pub mod sketch;
pub mod store;
pub mod synth;

pub use dataset::{
    ingest_csv, ingest_csv_with_kinds, write_csv, Column, ColumnData, ColumnKind, CsvOptions,
    Dataset,
};
pub use error::{Error, Result};
pub use metrics::{MetricId, MetricStatus, MetricValue, OutlierConfig};
pub use moments::MomentSummary;
pub use query::{
    Engine, EngineConfig, InsightClass, InsightDescriptor, InsightQuery, Mode, Overview, SortOrder,
    VisualizationPayload,
};
pub use session::ExplorationState;
pub use sketch::{FrequentItemsSketch, HyperplaneConfig, HyperplaneSketch, SignVector};

//! Insight classes, ranking, neighborhoods, overviews and chart payloads.

mod class;
mod engine;
mod neighborhood;
mod overview;
mod types;
mod visualize;

pub use class::{InsightClass, InsightClassSpec, SortOrder, VizKind};
pub use engine::{Engine, EngineConfig};
pub use neighborhood::{attribute_overlap, similarity, value_span, ScoredInsight};
pub use overview::{Overview, OverviewEntry};
pub use types::{InsightDescriptor, InsightQuery, MetricRange, Mode, DEFAULT_LIMIT};
pub use visualize::{
    box_plot, histogram, pareto, scatter, ParetoBar, VisualizationPayload, MAX_BOX_OUTLIERS,
    MAX_PARETO_BARS,
};

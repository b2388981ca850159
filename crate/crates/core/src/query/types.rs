use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricId;

use super::class::{InsightClass, SortOrder};

/// Where pairwise correlation values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact below the engine's work budget, sketches above it.
    #[default]
    Auto,
    Exact,
    Sketch,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Mode::Auto),
            "exact" => Ok(Mode::Exact),
            "sketch" => Ok(Mode::Sketch),
            _ => Err(Error::InvalidQuery(format!("unknown mode `{s}`"))),
        }
    }
}

/// One ranked insight: a tuple of attributes and its strength under a metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightDescriptor {
    pub class_id: InsightClass,
    /// Attribute names in dataset column order.
    pub tuple: Vec<String>,
    pub metric_id: MetricId,
    pub value: f64,
    /// Set when a sketch supplied `value`.
    pub approximate: bool,
    /// Signed companion of a magnitude value (γ₁, ρ).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signed_aux: Option<f64>,
}

impl InsightDescriptor {
    /// Identity used for focus membership: class, tuple and metric (not the value).
    pub fn same_insight(&self, other: &InsightDescriptor) -> bool {
        self.class_id == other.class_id
            && self.tuple == other.tuple
            && self.metric_id == other.metric_id
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRange {
    pub lo: f64,
    pub hi: f64,
}

impl MetricRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

pub const DEFAULT_LIMIT: usize = 10;

fn default_limit() -> usize {
    DEFAULT_LIMIT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightQuery {
    pub class_id: InsightClass,
    /// Attributes every returned tuple must contain.
    #[serde(default)]
    pub fixed: Vec<String>,
    #[serde(default)]
    pub metric_range: Option<MetricRange>,
    #[serde(default = "default_limit")]
    pub limit: usize,
    #[serde(default)]
    pub mode: Mode,
    /// Overrides the class's default ranking metric.
    #[serde(default)]
    pub metric: Option<MetricId>,
    /// Overrides the class's default sort order.
    #[serde(default)]
    pub order: Option<SortOrder>,
}

impl InsightQuery {
    pub fn new(class_id: InsightClass) -> Self {
        Self {
            class_id,
            fixed: Vec::new(),
            metric_range: None,
            limit: DEFAULT_LIMIT,
            mode: Mode::Auto,
            metric: None,
            order: None,
        }
    }

    pub fn fix(mut self, attribute: impl Into<String>) -> Self {
        self.fixed.push(attribute.into());
        self
    }

    pub fn range(mut self, lo: f64, hi: f64) -> Self {
        self.metric_range = Some(MetricRange::new(lo, hi));
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn metric(mut self, metric: MetricId) -> Self {
        self.metric = Some(metric);
        self
    }

    pub fn order(mut self, order: SortOrder) -> Self {
        self.order = Some(order);
        self
    }

    pub fn resolved_metric(&self) -> MetricId {
        self.metric.unwrap_or_else(|| self.class_id.metric())
    }

    pub fn resolved_order(&self) -> SortOrder {
        self.order.unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.limit == 0 {
            return Err(Error::InvalidQuery("limit must be at least 1".into()));
        }
        if let Some(r) = self.metric_range {
            if !(r.lo <= r.hi) {
                return Err(Error::InvalidQuery(format!(
                    "empty metric range [{}, {}]",
                    r.lo, r.hi
                )));
            }
        }
        if self.fixed.len() > self.class_id.arity() {
            return Err(Error::InvalidQuery(format!(
                "{} fixed attributes for a class of arity {}",
                self.fixed.len(),
                self.class_id.arity()
            )));
        }
        if let Some(m) = self.metric {
            if !self.class_id.allowed_metrics().contains(&m) {
                return Err(Error::InvalidQuery(format!(
                    "metric {} cannot rank {}",
                    m.as_str(),
                    self.class_id
                )));
            }
        }
        Ok(())
    }
}

use serde::{Deserialize, Serialize};

use crate::dataset::ColumnKind;
use crate::error::Error;
use crate::metrics::MetricId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsightClass {
    Dispersion,
    Skew,
    HeavyTails,
    Outliers,
    HeterogeneousFrequencies,
    LinearRelationship,
    MonotonicRelationship,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VizKind {
    Histogram,
    BoxPlot,
    ParetoChart,
    ScatterWithFitLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortOrder {
    #[default]
    Descending,
    Ascending,
}

/// Static description of an insight class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InsightClassSpec {
    pub class_id: InsightClass,
    pub arity: usize,
    pub column_kinds: Vec<ColumnKind>,
    pub metric_id: MetricId,
    /// Metrics a query may rank this class by; the first is the default.
    pub metrics: Vec<MetricId>,
    pub viz_kind: VizKind,
    pub sort_order: SortOrder,
    pub has_overview: bool,
}

impl InsightClass {
    pub const ALL: [InsightClass; 7] = [
        InsightClass::Dispersion,
        InsightClass::Skew,
        InsightClass::HeavyTails,
        InsightClass::Outliers,
        InsightClass::HeterogeneousFrequencies,
        InsightClass::LinearRelationship,
        InsightClass::MonotonicRelationship,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InsightClass::Dispersion => "dispersion",
            InsightClass::Skew => "skew",
            InsightClass::HeavyTails => "heavy_tails",
            InsightClass::Outliers => "outliers",
            InsightClass::HeterogeneousFrequencies => "heterogeneous_frequencies",
            InsightClass::LinearRelationship => "linear_relationship",
            InsightClass::MonotonicRelationship => "monotonic_relationship",
        }
    }

    pub fn metric(self) -> MetricId {
        match self {
            InsightClass::Dispersion => MetricId::Variance,
            InsightClass::Skew => MetricId::Skewness,
            InsightClass::HeavyTails => MetricId::Kurtosis,
            InsightClass::Outliers => MetricId::OutlierScore,
            InsightClass::HeterogeneousFrequencies => MetricId::RelFreqTopK,
            InsightClass::LinearRelationship => MetricId::PearsonAbs,
            InsightClass::MonotonicRelationship => MetricId::SpearmanAbs,
        }
    }

    pub fn arity(self) -> usize {
        self.metric().arity()
    }

    pub fn column_kind(self) -> ColumnKind {
        match self {
            InsightClass::HeterogeneousFrequencies => ColumnKind::Categorical,
            _ => ColumnKind::Numeric,
        }
    }

    pub fn allowed_metrics(self) -> Vec<MetricId> {
        match self {
            InsightClass::LinearRelationship => vec![MetricId::PearsonAbs, MetricId::SpearmanAbs],
            InsightClass::MonotonicRelationship => {
                vec![MetricId::SpearmanAbs, MetricId::PearsonAbs]
            }
            other => vec![other.metric()],
        }
    }

    pub fn viz_kind(self) -> VizKind {
        match self {
            InsightClass::Dispersion | InsightClass::Skew | InsightClass::HeavyTails => {
                VizKind::Histogram
            }
            InsightClass::Outliers => VizKind::BoxPlot,
            InsightClass::HeterogeneousFrequencies => VizKind::ParetoChart,
            InsightClass::LinearRelationship | InsightClass::MonotonicRelationship => {
                VizKind::ScatterWithFitLine
            }
        }
    }

    pub fn spec(self) -> InsightClassSpec {
        InsightClassSpec {
            class_id: self,
            arity: self.arity(),
            column_kinds: vec![self.column_kind(); self.arity()],
            metric_id: self.metric(),
            metrics: self.allowed_metrics(),
            viz_kind: self.viz_kind(),
            sort_order: SortOrder::Descending,
            has_overview: true,
        }
    }

    pub fn is_pair(self) -> bool {
        self.arity() == 2
    }
}

impl std::fmt::Display for InsightClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for InsightClass {
    type Err = Error;

    /// Accepts the canonical snake_case id or a short alias (`linear`, `monotonic`, `hh`, ...).
    fn from_str(s: &str) -> Result<Self, Error> {
        let c = match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "dispersion" | "variance" => InsightClass::Dispersion,
            "skew" | "skewness" => InsightClass::Skew,
            "heavy_tails" | "tails" | "kurtosis" => InsightClass::HeavyTails,
            "outliers" | "outlier" => InsightClass::Outliers,
            "heterogeneous_frequencies" | "frequencies" | "hh" | "heavy_hitters" => {
                InsightClass::HeterogeneousFrequencies
            }
            "linear_relationship" | "linear" | "correlation" | "pearson" => {
                InsightClass::LinearRelationship
            }
            "monotonic_relationship" | "monotonic" | "spearman" => {
                InsightClass::MonotonicRelationship
            }
            _ => return Err(Error::UnknownClass(s.to_string())),
        };
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_are_consistent() {
        for c in InsightClass::ALL {
            let s = c.spec();
            assert_eq!(s.arity, s.column_kinds.len());
            assert_eq!(s.metrics[0], s.metric_id);
            assert_eq!(c.as_str().parse::<InsightClass>().unwrap(), c);
        }
    }

    #[test]
    fn aliases_parse() {
        assert_eq!(
            "linear".parse::<InsightClass>().unwrap(),
            InsightClass::LinearRelationship
        );
        assert!(matches!(
            "bogus".parse::<InsightClass>(),
            Err(Error::UnknownClass(_))
        ));
    }
}

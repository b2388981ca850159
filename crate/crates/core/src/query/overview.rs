use serde::{Deserialize, Serialize};

use crate::metrics::MetricId;

use super::class::InsightClass;
use super::engine::Engine;
use super::types::Mode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverviewEntry {
    pub attribute: String,
    /// `None` when the metric is undefined for this attribute.
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signed: Option<f64>,
}

/// Class-wide display of metric values over all tuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Overview {
    /// Signed pair values, row-major `n × n`, unit diagonal.
    Matrix {
        class_id: InsightClass,
        metric_id: MetricId,
        attributes: Vec<String>,
        values: Vec<Option<f64>>,
        approximate: bool,
    },
    List {
        class_id: InsightClass,
        metric_id: MetricId,
        entries: Vec<OverviewEntry>,
        approximate: bool,
    },
}

impl Overview {
    /// Matrix cell; `None` for list overviews, out-of-range indices and undefined pairs.
    pub fn cell(&self, i: usize, j: usize) -> Option<f64> {
        match self {
            Overview::Matrix {
                attributes, values, ..
            } => {
                let n = attributes.len();
                (i < n && j < n).then(|| values[i * n + j]).flatten()
            }
            Overview::List { .. } => None,
        }
    }
}

impl Engine {
    pub fn overview(&self, class: InsightClass, mode: Mode) -> Overview {
        let metric = class.metric();
        let evaluated = self.evaluate_class(class, metric, mode);
        let approximate = evaluated.iter().any(|e| e.approximate);
        if class.is_pair() {
            let cols = self.dataset().indices_of_kind(class.column_kind());
            let n = cols.len();
            let pos = |c: usize| cols.binary_search(&c).expect("eligible column");
            let mut values = vec![None; n * n];
            for i in 0..n {
                values[i * n + i] = Some(1.0);
            }
            for e in &evaluated {
                let (i, j) = (pos(e.cols[0]), pos(e.cols[1]));
                values[i * n + j] = e.value.signed;
                values[j * n + i] = e.value.signed;
            }
            Overview::Matrix {
                class_id: class,
                metric_id: metric,
                attributes: cols
                    .iter()
                    .map(|&c| self.dataset().column(c).name().to_string())
                    .collect(),
                values,
                approximate,
            }
        } else {
            Overview::List {
                class_id: class,
                metric_id: metric,
                entries: evaluated
                    .iter()
                    .map(|e| OverviewEntry {
                        attribute: self.dataset().column(e.cols[0]).name().to_string(),
                        value: e.value.rank_value(),
                        signed: e.value.signed,
                    })
                    .collect(),
                approximate,
            }
        }
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Column;
use crate::error::Result;
use crate::metrics::{self, CoMoments};
use crate::moments::MomentSummary;
use crate::sketch::Reservoir;

use super::class::VizKind;
use super::engine::Engine;
use super::types::InsightDescriptor;

/// Bars shown before the remaining categories are lumped together.
pub const MAX_PARETO_BARS: usize = 50;
/// Flagged outlier values carried by a box plot.
pub const MAX_BOX_OUTLIERS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoBar {
    /// Category label; `None` for the bucket of remaining categories.
    pub label: Option<String>,
    pub count: u64,
    pub share: f64,
    pub cumulative: f64,
}

/// Everything a client needs to draw an insight's chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "viz_kind", rename_all = "snake_case")]
pub enum VisualizationPayload {
    Histogram {
        attribute: String,
        /// `counts.len() + 1` ascending edges; the last bin is closed on the right.
        edges: Vec<f64>,
        counts: Vec<u64>,
    },
    BoxPlot {
        attribute: String,
        min: f64,
        q1: f64,
        median: f64,
        q3: f64,
        max: f64,
        /// Values beyond the outlier threshold, in row order (at most [`MAX_BOX_OUTLIERS`]).
        outliers: Vec<f64>,
        outlier_count: usize,
        /// Quartiles came from a sample rather than all rows.
        approximate: bool,
    },
    ParetoChart {
        attribute: String,
        total: u64,
        bars: Vec<ParetoBar>,
    },
    ScatterWithFitLine {
        x_attribute: String,
        y_attribute: String,
        points: Vec<[f64; 2]>,
        /// Jointly valid rows; `points` is a uniform sample when this exceeds the cap.
        n_joint: usize,
        slope: Option<f64>,
        intercept: Option<f64>,
    },
}

impl VisualizationPayload {
    pub fn viz_kind(&self) -> VizKind {
        match self {
            VisualizationPayload::Histogram { .. } => VizKind::Histogram,
            VisualizationPayload::BoxPlot { .. } => VizKind::BoxPlot,
            VisualizationPayload::ParetoChart { .. } => VizKind::ParetoChart,
            VisualizationPayload::ScatterWithFitLine { .. } => VizKind::ScatterWithFitLine,
        }
    }
}

/// Equal-width histogram with `min(⌈√n⌉, max_bins)` bins over `[min, max]`.
pub fn histogram(
    column: &Column,
    summary: &MomentSummary,
    max_bins: usize,
) -> VisualizationPayload {
    let attribute = column.name().to_string();
    let n = summary.count;
    if n == 0 {
        return VisualizationPayload::Histogram {
            attribute,
            edges: Vec::new(),
            counts: Vec::new(),
        };
    }
    let (lo, hi) = (summary.min, summary.max);
    if lo == hi {
        return VisualizationPayload::Histogram {
            attribute,
            edges: vec![lo, hi],
            counts: vec![n],
        };
    }
    let bins = ((n as f64).sqrt().ceil() as usize).clamp(1, max_bins.max(1));
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for x in column.valid_values() {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    VisualizationPayload::Histogram {
        attribute,
        edges,
        counts,
    }
}

pub fn box_plot(
    column: &Column,
    summary: &MomentSummary,
    engine_cfg: &super::EngineConfig,
) -> VisualizationPayload {
    let mut reservoir = Reservoir::new(engine_cfg.reservoir_size, engine_cfg.seed);
    for x in column.valid_values() {
        reservoir.push(x);
    }
    let q = crate::sketch::quantiles_of_sorted(&reservoir.sorted(), &[0.25, 0.5, 0.75]);
    let flagged = metrics::flagged_outliers(column, summary, &engine_cfg.outlier);
    let values = column.as_numeric().unwrap_or(&[]);
    let (q1, median, q3) = match q.as_slice() {
        [a, b, c] => (*a, *b, *c),
        _ => (f64::NAN, f64::NAN, f64::NAN),
    };
    VisualizationPayload::BoxPlot {
        attribute: column.name().to_string(),
        min: summary.min,
        q1,
        median,
        q3,
        max: summary.max,
        outliers: flagged
            .iter()
            .take(MAX_BOX_OUTLIERS)
            .map(|&(row, _)| values[row])
            .collect(),
        outlier_count: flagged.len(),
        approximate: !reservoir.is_exact(),
    }
}

/// Categories by decreasing frequency with running share.
pub fn pareto(column: &Column) -> VisualizationPayload {
    let counts = metrics::category_counts(column);
    let dict = column.as_categorical().map(|(_, d)| d).unwrap_or(&[]);
    let total: u64 = counts.iter().sum();
    let order = metrics::codes_by_frequency(&counts);
    let mut bars = Vec::new();
    let mut running = 0u64;
    let mut push = |label: Option<String>, count: u64, bars: &mut Vec<ParetoBar>| {
        running += count;
        bars.push(ParetoBar {
            label,
            count,
            share: count as f64 / total as f64,
            cumulative: running as f64 / total as f64,
        });
    };
    for &code in order
        .iter()
        .filter(|&&c| counts[c] > 0)
        .take(MAX_PARETO_BARS)
    {
        push(Some(dict[code].clone()), counts[code], &mut bars);
    }
    let rest: u64 = order.iter().skip(MAX_PARETO_BARS).map(|&c| counts[c]).sum();
    if rest > 0 {
        push(None, rest, &mut bars);
    }
    VisualizationPayload::ParetoChart {
        attribute: column.name().to_string(),
        total,
        bars,
    }
}

/// Scatter of jointly valid rows, downsampled to `cap` points, with the least-squares line.
pub fn scatter(x: &Column, y: &Column, cap: usize, seed: u64) -> VisualizationPayload {
    let (xs, ys) = metrics::joint_values(x, y);
    let n = xs.len();
    let fit = CoMoments::of_slices(&xs, &ys).fit_line();
    let rows: Vec<usize> = if n > cap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = rand::seq::index::sample(&mut rng, n, cap).into_vec();
        picked.sort_unstable();
        picked
    } else {
        (0..n).collect()
    };
    VisualizationPayload::ScatterWithFitLine {
        x_attribute: x.name().to_string(),
        y_attribute: y.name().to_string(),
        points: rows.iter().map(|&i| [xs[i], ys[i]]).collect(),
        n_joint: n,
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
    }
}

impl Engine {
    /// Chart payload for an insight, chosen by its class.
    pub fn visualize(&self, insight: &InsightDescriptor) -> Result<VisualizationPayload> {
        let cols = self.resolve(insight)?;
        let ds = self.dataset();
        let cfg = self.config();
        Ok(match (insight.class_id.viz_kind(), cols.as_slice()) {
            (VizKind::Histogram, [c]) => histogram(ds.column(*c), self.summary(*c), cfg.max_bins),
            (VizKind::BoxPlot, [c]) => box_plot(ds.column(*c), self.summary(*c), cfg),
            (VizKind::ParetoChart, [c]) => pareto(ds.column(*c)),
            (VizKind::ScatterWithFitLine, [a, b]) => {
                scatter(ds.column(*a), ds.column(*b), cfg.scatter_cap, cfg.seed)
            }
            (kind, _) => unreachable!("{kind:?} with tuple of arity {}", cols.len()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(values: &[f64]) -> Column {
        Column::numeric("x", values.iter().map(|v| Some(*v)))
    }

    #[test]
    fn constant_column_is_one_bin() {
        let c = num(&[4.0; 9]);
        let VisualizationPayload::Histogram { edges, counts, .. } =
            histogram(&c, &MomentSummary::of_column(&c), 50)
        else {
            panic!()
        };
        assert_eq!(counts, vec![9]);
        assert_eq!(edges, vec![4.0, 4.0]);
    }

    #[test]
    fn histogram_bins_follow_sqrt_rule() {
        let values: Vec<f64> = (0..10_000).map(|i| i as f64).collect();
        let c = num(&values);
        let s = MomentSummary::of_column(&c);
        let VisualizationPayload::Histogram { edges, counts, .. } = histogram(&c, &s, 50) else {
            panic!()
        };
        assert_eq!(counts.len(), 50);
        assert_eq!(edges.len(), 51);
        assert_eq!(counts.iter().sum::<u64>(), 10_000);
        let c = num(&values[..10]);
        let VisualizationPayload::Histogram { counts, .. } =
            histogram(&c, &MomentSummary::of_column(&c), 50)
        else {
            panic!()
        };
        assert_eq!(counts.len(), 4);
    }

    #[test]
    fn pareto_of_small_column() {
        let c = Column::categorical("c", ["a", "a", "a", "b", "c"].map(Some));
        let VisualizationPayload::ParetoChart { bars, total, .. } = pareto(&c) else {
            panic!()
        };
        assert_eq!(total, 5);
        let labels: Vec<_> = bars.iter().map(|b| b.label.clone().unwrap()).collect();
        assert_eq!(labels, ["a", "b", "c"]);
        let cum: Vec<f64> = bars.iter().map(|b| b.cumulative).collect();
        for (got, want) in cum.iter().zip([0.6, 0.8, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn pareto_lumps_tail() {
        let labels: Vec<String> = (0..80).map(|i| format!("v{i}")).collect();
        let c = Column::categorical("c", labels.iter().map(|s| Some(s.as_str())));
        let VisualizationPayload::ParetoChart { bars, .. } = pareto(&c) else {
            panic!()
        };
        assert_eq!(bars.len(), MAX_PARETO_BARS + 1);
        assert_eq!(bars.last().unwrap().label, None);
        assert_eq!(bars.last().unwrap().count, 30);
        assert!((bars.last().unwrap().cumulative - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scatter_fit_on_exact_line() {
        let xs: Vec<f64> = (0..5000).map(|i| i as f64 * 0.01).collect();
        let x = Column::numeric("x", xs.iter().map(|v| Some(*v)));
        let y = Column::numeric("y", xs.iter().map(|v| Some(2.0 * v + 1.0)));
        let VisualizationPayload::ScatterWithFitLine {
            points,
            slope,
            intercept,
            n_joint,
            ..
        } = scatter(&x, &y, 2000, 3)
        else {
            panic!()
        };
        assert_eq!(n_joint, 5000);
        assert_eq!(points.len(), 2000);
        assert!((slope.unwrap() - 2.0).abs() < 1e-9);
        assert!((intercept.unwrap() - 1.0).abs() < 1e-9);
        assert!(points.windows(2).all(|w| w[0][0] < w[1][0]));
        assert_eq!(scatter(&x, &y, 2000, 3), scatter(&x, &y, 2000, 3));
    }
}

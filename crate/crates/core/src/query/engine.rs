use std::cmp::Ordering;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{self, CoMoments, MetricId, MetricStatus, MetricValue, OutlierConfig};
use crate::moments::MomentSummary;
use crate::sketch::{
    build_hyperplanes, estimate_correlation, FrequentItemsSketch, HyperplaneConfig,
    HyperplaneSketch, SignVector,
};

use super::class::{InsightClass, SortOrder};
use super::types::{InsightDescriptor, InsightQuery, Mode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// Seed for hyperplanes, reservoirs and scatter sampling.
    pub seed: u64,
    /// Hyperplane sketch width; `None` picks `max(64, ⌈log₂²n⌉)` rounded to 64.
    pub sketch_k: Option<usize>,
    pub rel_freq_k: usize,
    pub outlier: OutlierConfig,
    /// Multiply-adds (`n × pairs`) below which Auto mode computes exact correlations.
    pub exact_budget: u64,
    /// Space-Saving capacity; `None` means `max(64, 4·rel_freq_k)`.
    pub frequent_capacity: Option<usize>,
    pub reservoir_size: usize,
    pub scatter_cap: usize,
    pub max_bins: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            sketch_k: None,
            rel_freq_k: metrics::DEFAULT_REL_FREQ_K,
            outlier: OutlierConfig::default(),
            exact_budget: 10_000_000,
            frequent_capacity: None,
            reservoir_size: crate::sketch::DEFAULT_RESERVOIR,
            scatter_cap: 2000,
            max_bins: 50,
        }
    }
}

impl EngineConfig {
    pub fn frequent_capacity(&self) -> usize {
        self.frequent_capacity
            .unwrap_or_else(|| 64.max(4 * self.rel_freq_k))
    }
}

/// Metric values for all `i < j` pairs of a column list, in triangular order.
#[derive(Debug)]
pub(crate) struct PairTable {
    n: usize,
    values: Vec<MetricValue>,
}

impl PairTable {
    fn slot(&self, a: usize, b: usize) -> usize {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    fn get(&self, a: usize, b: usize) -> MetricValue {
        self.values[self.slot(a, b)]
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// One evaluated tuple (column indices in ascending order).
#[derive(Debug, Clone)]
pub(crate) struct Evaluated {
    pub cols: Vec<usize>,
    pub value: MetricValue,
    pub approximate: bool,
}

/// Precomputed state over an immutable dataset; answers insight queries.
///
/// Expensive artifacts (sketches, exact pair tables, outlier scans) are built
/// on first use and cached, so an `Engine` can be shared across threads.
#[derive(Debug)]
pub struct Engine {
    dataset: Dataset,
    config: EngineConfig,
    hyperplane: HyperplaneConfig,
    numeric: Vec<usize>,
    summaries: Vec<MomentSummary>,
    sketches: OnceLock<Vec<HyperplaneSketch>>,
    signs: OnceLock<Vec<Option<SignVector>>>,
    frequent: OnceLock<Vec<Option<FrequentItemsSketch>>>,
    outliers: OnceLock<Vec<MetricValue>>,
    pearson: OnceLock<PairTable>,
    spearman: OnceLock<PairTable>,
}

impl Engine {
    pub fn new(dataset: Dataset, config: EngineConfig) -> Self {
        let summaries = dataset
            .columns()
            .par_iter()
            .map(MomentSummary::of_column)
            .collect();
        let hyperplane = HyperplaneConfig::new(
            config
                .sketch_k
                .unwrap_or_else(|| HyperplaneConfig::default_k(dataset.n_rows())),
            config.seed,
        );
        Self {
            numeric: dataset.indices_of_kind(ColumnKind::Numeric),
            dataset,
            config,
            hyperplane,
            summaries,
            sketches: OnceLock::new(),
            signs: OnceLock::new(),
            frequent: OnceLock::new(),
            outliers: OnceLock::new(),
            pearson: OnceLock::new(),
            spearman: OnceLock::new(),
        }
    }

    /// Installs previously built hyperplane sketches (one per numeric column, in column order).
    pub fn with_hyperplane_sketches(mut self, sketches: Vec<HyperplaneSketch>) -> Result<Self> {
        let ids: Vec<usize> = sketches.iter().map(|s| s.column_id as usize).collect();
        if ids != self.numeric {
            return Err(Error::Malformed(format!(
                "sketches cover columns {ids:?}, dataset numeric columns are {:?}",
                self.numeric
            )));
        }
        if let Some(first) = sketches.first() {
            if sketches.iter().any(|s| s.config != first.config) {
                return Err(Error::Malformed(
                    "sketches disagree on width or seed".into(),
                ));
            }
            for s in &sketches {
                if s.row_count != self.summaries[s.column_id as usize].count {
                    return Err(Error::Malformed(format!(
                        "sketch for column {} has wrong row count",
                        s.column_id
                    )));
                }
            }
            self.hyperplane = first.config;
        }
        self.sketches = OnceLock::from(sketches);
        self.signs = OnceLock::new();
        Ok(self)
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn hyperplane_config(&self) -> HyperplaneConfig {
        self.hyperplane
    }

    pub fn summary(&self, column: usize) -> &MomentSummary {
        &self.summaries[column]
    }

    pub fn summaries(&self) -> &[MomentSummary] {
        &self.summaries
    }

    pub fn numeric_columns(&self) -> &[usize] {
        &self.numeric
    }

    pub fn hyperplane_sketches(&self) -> &[HyperplaneSketch] {
        self.sketches.get_or_init(|| {
            let cols: Vec<(u32, &crate::dataset::Column)> = self
                .numeric
                .iter()
                .map(|&i| (i as u32, self.dataset.column(i)))
                .collect();
            build_hyperplanes(&cols, &self.hyperplane, 0..self.dataset.n_rows())
        })
    }

    /// Finalized sign vector per dataset column (`None` for categorical or empty columns).
    pub fn sign_vectors(&self) -> &[Option<SignVector>] {
        self.signs.get_or_init(|| {
            let mut out = vec![None; self.dataset.n_cols()];
            for s in self.hyperplane_sketches() {
                out[s.column_id as usize] = s.finalize().ok();
            }
            out
        })
    }

    pub fn frequent_items(&self) -> &[Option<FrequentItemsSketch>] {
        self.frequent.get_or_init(|| {
            let cap = self.config.frequent_capacity();
            self.dataset
                .columns()
                .iter()
                .map(|c| {
                    (c.kind() == ColumnKind::Categorical)
                        .then(|| FrequentItemsSketch::of_column(c, cap))
                })
                .collect()
        })
    }

    fn outlier_scores(&self) -> &[MetricValue] {
        self.outliers.get_or_init(|| {
            self.dataset
                .columns()
                .par_iter()
                .zip(&self.summaries)
                .map(|(c, s)| metrics::outlier_score(c, s, &self.config.outlier))
                .collect()
        })
    }

    fn pearson_table(&self) -> &PairTable {
        self.pearson.get_or_init(|| {
            let cols: Vec<_> = self
                .numeric
                .iter()
                .map(|&i| self.dataset.column(i))
                .collect();
            let values = pairs(cols.len())
                .into_par_iter()
                .map(|(a, b)| metrics::pearson(cols[a], cols[b]))
                .collect();
            PairTable {
                n: cols.len(),
                values,
            }
        })
    }

    fn spearman_table(&self) -> &PairTable {
        self.spearman.get_or_init(|| {
            let cols: Vec<_> = self
                .numeric
                .iter()
                .map(|&i| self.dataset.column(i))
                .collect();
            // Full columns can share their ranks across pairs.
            let ranks: Vec<Option<Vec<f64>>> = cols
                .par_iter()
                .map(|c| {
                    (!c.has_nulls()).then(|| metrics::mid_ranks(c.as_numeric().expect("numeric")))
                })
                .collect();
            let values = pairs(cols.len())
                .into_par_iter()
                .map(|(a, b)| match (&ranks[a], &ranks[b]) {
                    (Some(ra), Some(rb)) => metrics::spearman_of_ranks(ra, rb),
                    _ => metrics::spearman(cols[a], cols[b]),
                })
                .collect();
            PairTable {
                n: cols.len(),
                values,
            }
        })
    }

    /// Builds every cached artifact, reporting `(done, total)` after each step.
    pub fn precompute(&self, progress: &(dyn Fn(usize, usize) + Sync)) {
        let total = 5;
        progress(0, total);
        self.hyperplane_sketches();
        progress(1, total);
        self.sign_vectors();
        progress(2, total);
        self.frequent_items();
        progress(3, total);
        self.outlier_scores();
        progress(4, total);
        if !self.pairs_use_sketch(Mode::Auto) {
            self.pearson_table();
        }
        progress(5, total);
    }

    /// Whether pairwise correlation in `mode` is answered from sketches.
    pub fn pairs_use_sketch(&self, mode: Mode) -> bool {
        match mode {
            Mode::Exact => false,
            Mode::Sketch => true,
            Mode::Auto => {
                let d = self.numeric.len() as u64;
                let work = self.dataset.n_rows() as u64 * (d * d.saturating_sub(1) / 2);
                work > self.config.exact_budget
            }
        }
    }

    fn position_in_numeric(&self, col: usize) -> usize {
        self.numeric.binary_search(&col).expect("numeric column")
    }

    fn sketch_pearson(&self, a: usize, b: usize) -> MetricValue {
        let (sa, sb) = (&self.summaries[a], &self.summaries[b]);
        let support = sa.count.min(sb.count) as usize;
        let undefined = |status| MetricValue {
            metric: MetricId::PearsonAbs,
            value: None,
            signed: None,
            support,
            status,
        };
        if support < metrics::MIN_PAIR_SUPPORT {
            return undefined(MetricStatus::InsufficientSupport);
        }
        if !metrics::variance(sa).is_defined() || !metrics::variance(sb).is_defined() {
            return undefined(MetricStatus::Degenerate);
        }
        let signs = self.sign_vectors();
        match (&signs[a], &signs[b]) {
            (Some(x), Some(y)) => {
                let r = estimate_correlation(x, y).expect("equal widths");
                MetricValue {
                    metric: MetricId::PearsonAbs,
                    value: Some(r.abs()),
                    signed: Some(r),
                    support,
                    status: MetricStatus::Defined,
                }
            }
            _ => undefined(MetricStatus::InsufficientSupport),
        }
    }

    /// Metric value of one tuple. Returns the value and whether it is approximate.
    pub(crate) fn evaluate_tuple(
        &self,
        cols: &[usize],
        metric: MetricId,
        mode: Mode,
    ) -> (MetricValue, bool) {
        match (metric, cols) {
            (MetricId::Variance, [c]) => (metrics::variance(&self.summaries[*c]), false),
            (MetricId::Skewness, [c]) => (metrics::skewness(&self.summaries[*c]), false),
            (MetricId::Kurtosis, [c]) => (metrics::kurtosis(&self.summaries[*c]), false),
            (MetricId::OutlierScore, [c]) => (self.outlier_scores()[*c], false),
            (MetricId::RelFreqTopK, [c]) => {
                let k = self.config.rel_freq_k;
                if mode == Mode::Sketch {
                    let fi = self.frequent_items()[*c]
                        .as_ref()
                        .expect("categorical column");
                    let mut v = metrics::rel_freq_topk(self.dataset.column(*c), k);
                    v.value = fi.rel_freq_estimate(k).filter(|_| v.is_defined());
                    (v, true)
                } else {
                    (metrics::rel_freq_topk(self.dataset.column(*c), k), false)
                }
            }
            (MetricId::PearsonAbs, [a, b]) => {
                if self.pairs_use_sketch(mode) {
                    (self.sketch_pearson(*a, *b), true)
                } else {
                    let t = self.pearson_table();
                    (
                        t.get(self.position_in_numeric(*a), self.position_in_numeric(*b)),
                        false,
                    )
                }
            }
            (MetricId::SpearmanAbs, [a, b]) => {
                let t = self.spearman_table();
                (
                    t.get(self.position_in_numeric(*a), self.position_in_numeric(*b)),
                    false,
                )
            }
            _ => unreachable!("metric {metric:?} on tuple of arity {}", cols.len()),
        }
    }

    /// All tuples of a class, canonical order, including undefined values.
    pub(crate) fn evaluate_class(
        &self,
        class: InsightClass,
        metric: MetricId,
        mode: Mode,
    ) -> Vec<Evaluated> {
        self.enumerate_class(class)
            .into_iter()
            .map(|cols| {
                let (value, approximate) = self.evaluate_tuple(&cols, metric, mode);
                Evaluated {
                    cols,
                    value,
                    approximate,
                }
            })
            .collect()
    }

    /// Candidate tuples of a class, as index tuples.
    pub fn enumerate_class(&self, class: InsightClass) -> Vec<Vec<usize>> {
        let eligible = self.dataset.indices_of_kind(class.column_kind());
        if class.is_pair() {
            pairs(eligible.len())
                .into_iter()
                .map(|(a, b)| vec![eligible[a], eligible[b]])
                .collect()
        } else {
            eligible.into_iter().map(|c| vec![c]).collect()
        }
    }

    pub(crate) fn attribute_index(&self, name: &str, class: InsightClass) -> Result<usize> {
        let idx = self
            .dataset
            .index_of(name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))?;
        if self.dataset.column(idx).kind() != class.column_kind() {
            return Err(Error::InvalidQuery(format!(
                "attribute `{name}` is not {:?} as {class} requires",
                class.column_kind()
            )));
        }
        Ok(idx)
    }

    pub(crate) fn descriptor(&self, class: InsightClass, e: &Evaluated) -> InsightDescriptor {
        InsightDescriptor {
            class_id: class,
            tuple: e
                .cols
                .iter()
                .map(|&c| self.dataset.column(c).name().to_string())
                .collect(),
            metric_id: e.value.metric,
            value: e
                .value
                .rank_value()
                .expect("only defined values become descriptors"),
            approximate: e.approximate,
            signed_aux: e.value.signed,
        }
    }

    /// Column indices of a descriptor's tuple, checking it belongs to its class.
    pub fn resolve(&self, d: &InsightDescriptor) -> Result<Vec<usize>> {
        let class = d.class_id;
        if d.tuple.len() != class.arity() {
            return Err(Error::UnknownFocus(format!(
                "{class} needs {} attributes",
                class.arity()
            )));
        }
        if !class.allowed_metrics().contains(&d.metric_id) {
            return Err(Error::UnknownFocus(format!(
                "{} does not rank {class}",
                d.metric_id.as_str()
            )));
        }
        let cols = d
            .tuple
            .iter()
            .map(|n| match self.attribute_index(n, class) {
                Err(Error::InvalidQuery(m)) => Err(Error::UnknownFocus(m)),
                other => other,
            })
            .collect::<Result<Vec<_>>>()?;
        if cols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnknownFocus(format!(
                "tuple {:?} is not in canonical column order",
                d.tuple
            )));
        }
        Ok(cols)
    }

    /// Filtered and sorted candidates without the limit applied.
    pub(crate) fn ranked(&self, q: &InsightQuery) -> Result<Vec<InsightDescriptor>> {
        q.validate()?;
        let class = q.class_id;
        let fixed = q
            .fixed
            .iter()
            .map(|n| self.attribute_index(n, class))
            .collect::<Result<Vec<_>>>()?;
        let order = q.resolved_order();
        let mut hits: Vec<(f64, Evaluated)> = self
            .evaluate_class(class, q.resolved_metric(), q.mode)
            .into_iter()
            .filter_map(|e| e.value.rank_value().map(|v| (v, e)))
            .filter(|(_, e)| fixed.iter().all(|f| e.cols.contains(f)))
            .filter(|(v, _)| q.metric_range.is_none_or(|r| r.contains(*v)))
            .collect();
        hits.sort_by(|(va, ea), (vb, eb)| {
            let by_value = match order {
                SortOrder::Descending => vb.partial_cmp(va),
                SortOrder::Ascending => va.partial_cmp(vb),
            };
            by_value
                .unwrap_or(Ordering::Equal)
                .then_with(|| ea.cols.cmp(&eb.cols))
        });
        Ok(hits
            .iter()
            .map(|(_, e)| self.descriptor(class, e))
            .collect())
    }

    /// Top-`limit` insights of a class under the query's constraints.
    pub fn rank(&self, q: &InsightQuery) -> Result<Vec<InsightDescriptor>> {
        let mut out = self.ranked(q)?;
        out.truncate(q.limit);
        Ok(out)
    }

    /// Exact Pearson between two columns regardless of mode (jointly valid rows).
    pub fn exact_comoments(&self, a: usize, b: usize) -> CoMoments {
        let (x, y) = (self.dataset.column(a), self.dataset.column(b));
        match (x.as_numeric(), y.as_numeric()) {
            (Some(xs), Some(ys)) => CoMoments::of_columns(xs, ys, x.validity(), y.validity()),
            _ => CoMoments::default(),
        }
    }
}

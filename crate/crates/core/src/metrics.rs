//! Exact insight-strength metrics for single columns and column pairs.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dataset::Column;
use crate::moments::{CentralMoments, MomentSummary};

/// Below this many jointly valid rows a pairwise metric is undefined.
pub const MIN_PAIR_SUPPORT: usize = 3;
/// Relative tolerance under which a variance counts as zero: `σ² ≤ tol·(max−min)²`.
pub const DEGENERATE_VARIANCE_TOL: f64 = 1e-12;
pub const DEFAULT_REL_FREQ_K: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    Variance,
    Skewness,
    Kurtosis,
    OutlierScore,
    RelFreqTopK,
    PearsonAbs,
    SpearmanAbs,
}

impl MetricId {
    pub const ALL: [MetricId; 7] = [
        MetricId::Variance,
        MetricId::Skewness,
        MetricId::Kurtosis,
        MetricId::OutlierScore,
        MetricId::RelFreqTopK,
        MetricId::PearsonAbs,
        MetricId::SpearmanAbs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::Variance => "variance",
            MetricId::Skewness => "skewness",
            MetricId::Kurtosis => "kurtosis",
            MetricId::OutlierScore => "outlier_score",
            MetricId::RelFreqTopK => "rel_freq_top_k",
            MetricId::PearsonAbs => "pearson_abs",
            MetricId::SpearmanAbs => "spearman_abs",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            MetricId::PearsonAbs | MetricId::SpearmanAbs => 2,
            _ => 1,
        }
    }
}

impl std::str::FromStr for MetricId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricStatus {
    Defined,
    /// Zero variance within tolerance.
    Degenerate,
    InsufficientSupport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub metric: MetricId,
    /// Ranking value. Present for defined metrics, and for the variance of a
    /// degenerate column (which is a meaningful 0).
    pub value: Option<f64>,
    /// Signed companion of a magnitude metric (γ₁ for skewness ranking, ρ for |ρ|).
    pub signed: Option<f64>,
    pub support: usize,
    pub status: MetricStatus,
}

impl MetricValue {
    fn defined(metric: MetricId, value: f64, signed: Option<f64>, support: usize) -> Self {
        Self {
            metric,
            value: Some(value),
            signed,
            support,
            status: MetricStatus::Defined,
        }
    }

    fn undefined(metric: MetricId, status: MetricStatus, support: usize) -> Self {
        Self {
            metric,
            value: None,
            signed: None,
            support,
            status,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.status == MetricStatus::Defined
    }

    /// The ranking value when the metric is defined.
    pub fn rank_value(&self) -> Option<f64> {
        if self.is_defined() {
            self.value
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutlierDetector {
    #[default]
    ZScoreThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierConfig {
    pub detector: OutlierDetector,
    pub z_threshold: f64,
}

impl Default for OutlierConfig {
    fn default() -> Self {
        Self {
            detector: OutlierDetector::ZScoreThreshold,
            z_threshold: 3.0,
        }
    }
}

fn is_degenerate(variance: f64, range: f64) -> bool {
    range == 0.0 || variance <= DEGENERATE_VARIANCE_TOL * range * range
}

/// Central moments when the summary has at least `min_count` rows and non-zero spread.
fn usable(s: &MomentSummary, min_count: u64) -> Result<CentralMoments, MetricStatus> {
    if s.count < min_count {
        return Err(MetricStatus::InsufficientSupport);
    }
    let c = s.central().ok_or(MetricStatus::InsufficientSupport)?;
    if is_degenerate(c.m2, s.range()) {
        return Err(MetricStatus::Degenerate);
    }
    Ok(c)
}

/// Population variance. A constant column yields value `0` with status `Degenerate`.
pub fn variance(s: &MomentSummary) -> MetricValue {
    let support = s.count as usize;
    if s.count < 2 {
        return MetricValue::undefined(
            MetricId::Variance,
            MetricStatus::InsufficientSupport,
            support,
        );
    }
    let c = s.central().expect("count >= 2");
    if is_degenerate(c.m2, s.range()) {
        return MetricValue {
            metric: MetricId::Variance,
            value: Some(0.0),
            signed: None,
            support,
            status: MetricStatus::Degenerate,
        };
    }
    MetricValue::defined(MetricId::Variance, c.m2, None, support)
}

/// Standardized skewness γ₁. `value` is |γ₁| (the ranking value), `signed` is γ₁.
pub fn skewness(s: &MomentSummary) -> MetricValue {
    match usable(s, 3) {
        Ok(c) => {
            let g = c.m3 / c.m2.powf(1.5);
            MetricValue::defined(MetricId::Skewness, g.abs(), Some(g), s.count as usize)
        }
        Err(status) => MetricValue::undefined(MetricId::Skewness, status, s.count as usize),
    }
}

/// Raw (non-excess) kurtosis `m4 / m2²`.
pub fn kurtosis(s: &MomentSummary) -> MetricValue {
    match usable(s, 4) {
        Ok(c) => MetricValue::defined(
            MetricId::Kurtosis,
            c.m4 / (c.m2 * c.m2),
            None,
            s.count as usize,
        ),
        Err(status) => MetricValue::undefined(MetricId::Kurtosis, status, s.count as usize),
    }
}

/// Rows whose standardized distance from the mean exceeds the threshold, with that distance.
pub fn flagged_outliers(
    column: &Column,
    summary: &MomentSummary,
    cfg: &OutlierConfig,
) -> Vec<(usize, f64)> {
    let Ok(c) = usable(summary, 2) else {
        return Vec::new();
    };
    let Some(values) = column.as_numeric() else {
        return Vec::new();
    };
    let sd = c.m2.sqrt();
    match cfg.detector {
        OutlierDetector::ZScoreThreshold => values
            .iter()
            .zip(column.validity())
            .enumerate()
            .filter(|(_, (_, ok))| **ok)
            .map(|(row, (x, _))| (row, (x - c.mean).abs() / sd))
            .filter(|(_, z)| *z > cfg.z_threshold)
            .collect(),
    }
}

/// Mean standardized distance of flagged outliers; `0` when nothing is flagged.
pub fn outlier_score(column: &Column, summary: &MomentSummary, cfg: &OutlierConfig) -> MetricValue {
    let support = summary.count as usize;
    if let Err(status) = usable(summary, 2) {
        return MetricValue::undefined(MetricId::OutlierScore, status, support);
    }
    let flagged = flagged_outliers(column, summary, cfg);
    let score = if flagged.is_empty() {
        0.0
    } else {
        flagged.iter().map(|(_, z)| z).sum::<f64>() / flagged.len() as f64
    };
    MetricValue::defined(MetricId::OutlierScore, score, None, support)
}

/// Per-code counts of valid rows, indexed by dictionary code.
pub fn category_counts(column: &Column) -> Vec<u64> {
    let Some((codes, dict)) = column.as_categorical() else {
        return Vec::new();
    };
    let mut counts = vec![0u64; dict.len()];
    for (code, ok) in codes.iter().zip(column.validity()) {
        if *ok {
            counts[*code as usize] += 1;
        }
    }
    counts
}

/// Codes ordered by descending count; ties keep dictionary (first-seen) order.
pub fn codes_by_frequency(counts: &[u64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    order
}

/// Total relative frequency of the `k` most frequent values.
pub fn rel_freq_topk(column: &Column, k: usize) -> MetricValue {
    let counts = category_counts(column);
    let total: u64 = counts.iter().sum();
    if total == 0 || k == 0 {
        return MetricValue::undefined(
            MetricId::RelFreqTopK,
            MetricStatus::InsufficientSupport,
            total as usize,
        );
    }
    let top: u64 = codes_by_frequency(&counts)
        .iter()
        .take(k)
        .map(|&c| counts[c])
        .sum();
    MetricValue::defined(
        MetricId::RelFreqTopK,
        top as f64 / total as f64,
        None,
        total as usize,
    )
}

/// Mergeable single-pass co-moment accumulator (Welford-style updates).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CoMoments {
    pub n: u64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub m2_x: f64,
    pub m2_y: f64,
    pub c_xy: f64,
    pub min_x: f64,
    pub max_x: f64,
    pub min_y: f64,
    pub max_y: f64,
}

impl CoMoments {
    pub fn push(&mut self, x: f64, y: f64) {
        if self.n == 0 {
            self.min_x = x;
            self.max_x = x;
            self.min_y = y;
            self.max_y = y;
        } else {
            self.min_x = self.min_x.min(x);
            self.max_x = self.max_x.max(x);
            self.min_y = self.min_y.min(y);
            self.max_y = self.max_y.max(y);
        }
        self.n += 1;
        let n = self.n as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        let dx2 = x - self.mean_x;
        let dy2 = y - self.mean_y;
        self.m2_x += dx * dx2;
        self.m2_y += dy * dy2;
        self.c_xy += dx * dy2;
    }

    pub fn of_columns(x: &[f64], y: &[f64], valid_x: &[bool], valid_y: &[bool]) -> Self {
        let mut acc = Self::default();
        for i in 0..x.len() {
            if valid_x[i] && valid_y[i] {
                acc.push(x[i], y[i]);
            }
        }
        acc
    }

    pub fn of_slices(x: &[f64], y: &[f64]) -> Self {
        let mut acc = Self::default();
        for (a, b) in x.iter().zip(y) {
            acc.push(*a, *b);
        }
        acc
    }

    /// Signed correlation, or the reason it is undefined.
    pub fn correlation(&self) -> Result<f64, MetricStatus> {
        if (self.n as usize) < MIN_PAIR_SUPPORT {
            return Err(MetricStatus::InsufficientSupport);
        }
        let n = self.n as f64;
        if is_degenerate(self.m2_x / n, self.max_x - self.min_x)
            || is_degenerate(self.m2_y / n, self.max_y - self.min_y)
        {
            return Err(MetricStatus::Degenerate);
        }
        Ok((self.c_xy / (self.m2_x.sqrt() * self.m2_y.sqrt())).clamp(-1.0, 1.0))
    }

    /// Least-squares line `y = slope·x + intercept`.
    pub fn fit_line(&self) -> Option<(f64, f64)> {
        if self.n < 2 || self.m2_x == 0.0 {
            return None;
        }
        let slope = self.c_xy / self.m2_x;
        Some((slope, self.mean_y - slope * self.mean_x))
    }
}

fn correlation_metric(metric: MetricId, acc: &CoMoments) -> MetricValue {
    match acc.correlation() {
        Ok(r) => MetricValue::defined(metric, r.abs(), Some(r), acc.n as usize),
        Err(status) => MetricValue::undefined(metric, status, acc.n as usize),
    }
}

/// |ρ| over jointly valid rows, with signed ρ alongside.
pub fn pearson(x: &Column, y: &Column) -> MetricValue {
    let (Some(xs), Some(ys)) = (x.as_numeric(), y.as_numeric()) else {
        return MetricValue::undefined(MetricId::PearsonAbs, MetricStatus::InsufficientSupport, 0);
    };
    correlation_metric(
        MetricId::PearsonAbs,
        &CoMoments::of_columns(xs, ys, x.validity(), y.validity()),
    )
}

/// Mid-ranks (1-based, ties averaged).
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold equal values; ranks start+1..=end.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Jointly valid `(x, y)` values of two numeric columns.
pub fn joint_values(x: &Column, y: &Column) -> (Vec<f64>, Vec<f64>) {
    let (Some(xs), Some(ys)) = (x.as_numeric(), y.as_numeric()) else {
        return (Vec::new(), Vec::new());
    };
    let (vx, vy) = (x.validity(), y.validity());
    (0..xs.len())
        .filter(|&i| vx[i] && vy[i])
        .map(|i| (xs[i], ys[i]))
        .unzip()
}

/// Spearman rank correlation: Pearson of mid-ranks over jointly valid rows.
pub fn spearman(x: &Column, y: &Column) -> MetricValue {
    let (xs, ys) = joint_values(x, y);
    spearman_of_ranks(&mid_ranks(&xs), &mid_ranks(&ys))
}

pub(crate) fn spearman_of_ranks(rx: &[f64], ry: &[f64]) -> MetricValue {
    correlation_metric(MetricId::SpearmanAbs, &CoMoments::of_slices(rx, ry))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(values: &[f64]) -> Column {
        Column::numeric("x", values.iter().map(|v| Some(*v)))
    }

    fn summary(values: &[f64]) -> MomentSummary {
        MomentSummary::from_values(values.iter().copied())
    }

    fn cat(values: &[&str]) -> Column {
        Column::categorical("c", values.iter().map(|v| Some(*v)))
    }

    #[test]
    fn variance_examples() {
        let v = variance(&summary(&[5.0, 5.0, 5.0]));
        assert_eq!(v.value, Some(0.0));
        assert_eq!(v.status, MetricStatus::Degenerate);
        let v = variance(&summary(&[1.0, 2.0, 3.0]));
        assert!((v.value.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(v.is_defined());
        assert_eq!(variance(&summary(&[])).value, None);
    }

    #[test]
    fn skewness_examples() {
        let s = skewness(&summary(&[1.0, 2.0, 3.0, 4.0, 5.0]));
        assert!(s.signed.unwrap().abs() < 1e-12);
        // Two-pass by hand: μ = 1/4, m2 = 3/16, m3 = 3/32 → γ₁ = 2/√3.
        let s = skewness(&summary(&[0.0, 0.0, 0.0, 1.0]));
        assert!((s.signed.unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((s.value.unwrap() - 1.1547).abs() < 1e-4);
        assert_eq!(
            skewness(&summary(&[5.0, 5.0, 5.0])).status,
            MetricStatus::Degenerate
        );
    }

    #[test]
    fn kurtosis_examples() {
        let k = kurtosis(&summary(&[-1.0, -1.0, 1.0, 1.0]));
        assert!((k.value.unwrap() - 1.0).abs() < 1e-12);
        // m2 = 2, m4 = (16+1+0+1+16)/5 = 6.8 → 1.7.
        let k = kurtosis(&summary(&[1.0, 2.0, 3.0, 4.0, 5.0]));
        assert!((k.value.unwrap() - 1.7).abs() < 1e-12);
        assert_eq!(
            kurtosis(&summary(&[1.0, 2.0, 3.0])).status,
            MetricStatus::InsufficientSupport
        );
    }

    #[test]
    fn kurtosis_of_normal_sample_is_near_three() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let s = MomentSummary::from_values((0..100_000).map(|_| StandardNormal.sample(&mut rng)));
        let k = kurtosis(&s).value.unwrap();
        assert!((k - 3.0).abs() < 0.15, "kurtosis {k}");
    }

    #[test]
    fn outlier_examples() {
        let zeros = num(&[0.0; 4]);
        let s = MomentSummary::of_column(&zeros);
        assert_eq!(
            outlier_score(&zeros, &s, &OutlierConfig::default()).status,
            MetricStatus::Degenerate
        );

        let calm = num(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let s = MomentSummary::of_column(&calm);
        assert_eq!(
            outlier_score(&calm, &s, &OutlierConfig::default()).value,
            Some(0.0)
        );

        let mut values = vec![0.0; 100];
        values.push(50.0);
        let spike = num(&values);
        let s = MomentSummary::of_column(&spike);
        let got = outlier_score(&spike, &s, &OutlierConfig::default());
        // Brute force: mean = 50/101, sd over 101 rows, only the spike exceeds 3σ.
        let n: f64 = 101.0;
        let mean = 50.0 / n;
        let var = (100.0 * mean * mean + (50.0 - mean) * (50.0 - mean)) / n;
        let z = (50.0 - mean) / var.sqrt();
        assert!((got.value.unwrap() - z).abs() < 1e-9);
        assert_eq!(
            flagged_outliers(&spike, &s, &OutlierConfig::default()).len(),
            1
        );
    }

    #[test]
    fn rel_freq_examples() {
        assert_eq!(rel_freq_topk(&cat(&["q", "q", "q"]), 1).value, Some(1.0));
        let c = cat(&["a", "a", "a", "b", "c"]);
        assert!((rel_freq_topk(&c, 1).value.unwrap() - 0.6).abs() < 1e-15);
        assert!((rel_freq_topk(&c, 2).value.unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(rel_freq_topk(&c, 9).value, Some(1.0));
        let empty = Column::categorical::<&str>("c", [None, None]);
        assert!(!rel_freq_topk(&empty, 1).is_defined());
    }

    #[test]
    fn frequency_ties_follow_dictionary_order() {
        let c = cat(&["b", "a", "a", "b", "c"]);
        assert_eq!(codes_by_frequency(&category_counts(&c)), vec![0, 1, 2]);
    }

    #[test]
    fn pearson_examples() {
        let x = num(&[1.0, 2.0, 3.0]);
        assert!((pearson(&x, &x).value.unwrap() - 1.0).abs() < 1e-15);
        let p = pearson(&x, &num(&[6.0, 4.0, 2.0]));
        assert!((p.value.unwrap() - 1.0).abs() < 1e-15);
        assert!((p.signed.unwrap() + 1.0).abs() < 1e-15);
        let p = pearson(&num(&[1.0, 2.0, 3.0, 4.0]), &num(&[1.0, 3.0, 2.0, 4.0]));
        assert!((p.value.unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn pearson_support_and_degeneracy() {
        let short = pearson(&num(&[1.0, 2.0]), &num(&[2.0, 1.0]));
        assert_eq!(short.status, MetricStatus::InsufficientSupport);
        let flat = pearson(&num(&[1.0, 2.0, 3.0]), &num(&[4.0, 4.0, 4.0]));
        assert_eq!(flat.status, MetricStatus::Degenerate);
        let x = Column::numeric("x", [Some(1.0), None, Some(3.0), Some(4.0)]);
        let y = Column::numeric("y", [Some(2.0), Some(9.0), None, Some(8.0)]);
        assert_eq!(pearson(&x, &y).support, 2);
    }

    #[test]
    fn spearman_examples() {
        let x = num(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = num(&[1.0, 8.0, 27.0, 64.0, 1000.0]);
        assert!((spearman(&x, &y).value.unwrap() - 1.0).abs() < 1e-15);
        let down = spearman(&x, &num(&[9.0, 3.0, 0.0, -4.0, -100.0]));
        assert!((down.signed.unwrap() + 1.0).abs() < 1e-15);
        let s = spearman(&num(&[1.0, 2.0, 3.0, 4.0]), &num(&[1.0, 3.0, 2.0, 4.0]));
        assert!((s.value.unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn mid_ranks_average_ties() {
        assert_eq!(
            mid_ranks(&[10.0, 20.0, 10.0, 30.0]),
            vec![1.5, 3.0, 1.5, 4.0]
        );
    }

    #[test]
    fn fit_line_recovers_exact_relation() {
        let xs: Vec<f64> = (0..20).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let (m, b) = CoMoments::of_slices(&xs, &ys).fit_line().unwrap();
        assert!((m - 2.0).abs() < 1e-9 && (b - 1.0).abs() < 1e-9);
    }
}

//! Test-side oracles: straightforward two-pass and brute-force versions of
//! every metric, plus a random dataset generator.

#![allow(dead_code)]

use insight_core::{Column, ColumnKind, Dataset, InsightClass, InsightQuery, MetricId, SortOrder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const TOL: f64 = 1e-9;

/// `|got - want| <= tol * max(scale, |want|)`.
pub fn close(got: f64, want: f64, scale: f64) -> bool {
    (got - want).abs() <= TOL * scale.max(want.abs())
}

pub fn valid(c: &Column) -> Vec<f64> {
    c.valid_values().collect()
}

pub fn joint(x: &Column, y: &Column) -> (Vec<f64>, Vec<f64>) {
    let (xs, ys) = (x.as_numeric().unwrap(), y.as_numeric().unwrap());
    (0..xs.len())
        .filter(|&i| x.is_valid(i) && y.is_valid(i))
        .map(|i| (xs[i], ys[i]))
        .unzip()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population central moment of order `p` by two passes.
pub fn central(v: &[f64], p: i32) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(p)).sum::<f64>() / v.len() as f64
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

pub fn degenerate(v: &[f64]) -> bool {
    let r = spread(v);
    r == 0.0 || central(v, 2) <= 1e-12 * r * r
}

pub fn variance(v: &[f64]) -> Option<f64> {
    (v.len() >= 2 && !degenerate(v)).then(|| central(v, 2))
}

pub fn skewness(v: &[f64]) -> Option<f64> {
    (v.len() >= 3 && !degenerate(v)).then(|| central(v, 3) / central(v, 2).powf(1.5))
}

pub fn kurtosis(v: &[f64]) -> Option<f64> {
    (v.len() >= 4 && !degenerate(v)).then(|| central(v, 4) / central(v, 2).powi(2))
}

pub fn outlier_score(v: &[f64], z: f64) -> Option<f64> {
    if v.len() < 2 || degenerate(v) {
        return None;
    }
    let m = mean(v);
    let sd = central(v, 2).sqrt();
    let flagged: Vec<f64> = v
        .iter()
        .map(|x| (x - m).abs() / sd)
        .filter(|d| *d > z)
        .collect();
    Some(if flagged.is_empty() {
        0.0
    } else {
        mean(&flagged)
    })
}

pub fn rel_freq(c: &Column, k: usize) -> Option<f64> {
    let mut counts = std::collections::HashMap::<String, u64>::new();
    for row in 0..c.len() {
        if let Some(t) = c.token(row) {
            *counts.entry(t).or_default() += 1;
        }
    }
    let total: u64 = counts.values().sum();
    if total == 0 {
        return None;
    }
    let mut v: Vec<u64> = counts.into_values().collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    Some(v.iter().take(k).sum::<u64>() as f64 / total as f64)
}

pub fn pearson_of(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 3 || degenerate(x) || degenerate(y) {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Mid-ranks from counts of smaller and equal values.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    v.iter()
        .map(|x| {
            let below = sorted.partition_point(|s| s < x);
            let upto = sorted.partition_point(|s| s <= x);
            (below + 1 + upto) as f64 / 2.0
        })
        .collect()
}

pub fn pearson(x: &Column, y: &Column) -> Option<f64> {
    let (a, b) = joint(x, y);
    pearson_of(&a, &b)
}

pub fn spearman(x: &Column, y: &Column) -> Option<f64> {
    let (a, b) = joint(x, y);
    pearson_of(&ranks(&a), &ranks(&b))
}

/// Oracle ranking value of a tuple under a metric (`None` when undefined).
pub fn metric_value(ds: &Dataset, metric: MetricId, cols: &[usize]) -> Option<f64> {
    let c = |i: usize| ds.column(cols[i]);
    match metric {
        MetricId::Variance => variance(&valid(c(0))),
        MetricId::Skewness => skewness(&valid(c(0))).map(f64::abs),
        MetricId::Kurtosis => kurtosis(&valid(c(0))),
        MetricId::OutlierScore => outlier_score(&valid(c(0)), 3.0),
        MetricId::RelFreqTopK => rel_freq(c(0), 3),
        MetricId::PearsonAbs => pearson(c(0), c(1)).map(f64::abs),
        MetricId::SpearmanAbs => spearman(c(0), c(1)).map(f64::abs),
    }
}

/// Exhaustive ranking: every tuple of the class evaluated, filtered and sorted.
pub fn brute_rank(ds: &Dataset, q: &InsightQuery) -> Vec<(Vec<String>, f64)> {
    let class = q.class_id;
    let kind = if class == InsightClass::HeterogeneousFrequencies {
        ColumnKind::Categorical
    } else {
        ColumnKind::Numeric
    };
    let eligible: Vec<usize> = (0..ds.n_cols())
        .filter(|&i| ds.column(i).kind() == kind)
        .collect();
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    if class.arity() == 2 {
        for (p, &i) in eligible.iter().enumerate() {
            for &j in &eligible[p + 1..] {
                tuples.push(vec![i, j]);
            }
        }
    } else {
        tuples = eligible.iter().map(|&i| vec![i]).collect();
    }
    let metric = q.metric.unwrap_or(class.metric());
    let mut out: Vec<(Vec<usize>, f64)> = tuples
        .into_iter()
        .filter_map(|t| metric_value(ds, metric, &t).map(|v| (t, v)))
        .filter(|(t, _)| {
            q.fixed
                .iter()
                .all(|f| t.iter().any(|&c| ds.column(c).name() == f))
        })
        .filter(|(_, v)| q.metric_range.is_none_or(|r| r.lo <= *v && *v <= r.hi))
        .collect();
    let desc = q.order.unwrap_or_default() == SortOrder::Descending;
    out.sort_by(|(ta, a), (tb, b)| {
        let o = if desc {
            b.partial_cmp(a)
        } else {
            a.partial_cmp(b)
        };
        o.unwrap().then_with(|| ta.cmp(tb))
    });
    out.truncate(q.limit);
    out.into_iter()
        .map(|(t, v)| {
            (
                t.iter().map(|&c| ds.column(c).name().to_string()).collect(),
                v,
            )
        })
        .collect()
}

/// Random table with up to `max_cols` columns of mixed shape: continuous,
/// tied integers, linear mixtures of earlier columns, constants, nulls and
/// categorical columns.
pub fn random_dataset(seed: u64, max_cols: usize, max_rows: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_rows);
    let d = rng.random_range(1..=max_cols);
    let mut numeric: Vec<Vec<f64>> = Vec::new();
    let mut columns = Vec::new();
    for c in 0..d {
        let name = format!("x{c}");
        let null_rate = if rng.random_bool(0.3) { 0.1 } else { 0.0 };
        let shape = rng.random_range(0..10);
        if shape == 9 {
            let labels = ["a", "b", "c", "d", "e", "f"];
            let values: Vec<Option<&str>> = (0..n)
                .map(|_| {
                    (!rng.random_bool(null_rate)).then(|| {
                        let u: f64 = rng.random();
                        labels[((u * u) * labels.len() as f64) as usize]
                    })
                })
                .collect();
            columns.push(Column::categorical(name, values));
            continue;
        }
        let values: Vec<f64> = match shape {
            0 | 1 | 2 => (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal) * 3.0 + 10.0)
                .collect(),
            3 | 4 => (0..n).map(|_| rng.random_range(0..5) as f64).collect(),
            5 => (0..n)
                .map(|_| rng.sample::<f64, _>(StandardNormal).exp())
                .collect(),
            6 => vec![2.5; n],
            _ if !numeric.is_empty() => {
                let base = &numeric[rng.random_range(0..numeric.len())];
                let a = rng.random_range(-2.0..2.0);
                let noise = rng.random_range(0.0..2.0);
                base.iter()
                    .map(|x| a * x + noise * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            }
            _ => (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        numeric.push(values.clone());
        columns.push(Column::numeric(
            name,
            values
                .into_iter()
                .map(|v| (!rng.random_bool(null_rate)).then_some(v)),
        ));
    }
    Dataset::new(format!("random{seed}"), columns).unwrap()
}

//! Synthetic datasets with planted structure and their ground truth.
//!
//! Plants are written as `kind:value:attributes`:
//!
//! | plant                 | effect                                                     |
//! |-----------------------|------------------------------------------------------------|
//! | `rho:0.9:a,b`         | `a` and `b` are jointly normal with correlation 0.9        |
//! | `skew:2:a`            | `a` is Gamma-distributed with skewness 2 (sign respected)  |
//! | `tails:3:a`           | `a` is Student-t with 3 degrees of freedom                 |
//! | `hh:0.4:a`            | `a` is categorical, its top value holds 40% of the rows    |
//! | `outlier:8:a`         | about 1% of `a`'s rows are replaced by ±8                  |
//!
//! Planted attribute names come first in the output, in order of appearance;
//! the remaining columns are independent standard normals named `c<index>`.

use std::collections::HashMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::dataset::{Column, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{self, CoMoments};
use crate::moments::MomentSummary;

/// Categories besides the heavy hitter in an `hh` column.
const HH_TAIL_CATEGORIES: usize = 20;
/// Share of rows replaced in an `outlier` column.
const OUTLIER_RATE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Plant {
    Rho { value: f64, a: String, b: String },
    Skew { value: f64, a: String },
    Tails { df: f64, a: String },
    Hh { share: f64, a: String },
    Outlier { z: f64, a: String },
}

impl Plant {
    pub fn attributes(&self) -> Vec<&str> {
        match self {
            Plant::Rho { a, b, .. } => vec![a, b],
            Plant::Skew { a, .. }
            | Plant::Tails { a, .. }
            | Plant::Hh { a, .. }
            | Plant::Outlier { a, .. } => {
                vec![a]
            }
        }
    }
}

impl FromStr for Plant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPlant(s.to_string());
        let mut parts = s.splitn(3, ':');
        let (Some(kind), Some(value), Some(attrs)) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let v: f64 = value.trim().parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        let names: Vec<String> = attrs.split(',').map(|a| a.trim().to_string()).collect();
        if names.iter().any(|n| n.is_empty()) {
            return Err(bad());
        }
        let one = |names: &[String]| match names {
            [a] => Ok(a.clone()),
            _ => Err(bad()),
        };
        match kind.trim() {
            "rho" => match names.as_slice() {
                [a, b] if a != b && v.abs() < 1.0 => Ok(Plant::Rho {
                    value: v,
                    a: a.clone(),
                    b: b.clone(),
                }),
                _ => Err(bad()),
            },
            "skew" if v != 0.0 => Ok(Plant::Skew {
                value: v,
                a: one(&names)?,
            }),
            "tails" if v > 4.0 => Ok(Plant::Tails {
                df: v,
                a: one(&names)?,
            }),
            "hh" if v > 0.0 && v <= 1.0 => Ok(Plant::Hh {
                share: v,
                a: one(&names)?,
            }),
            "outlier" if v > 0.0 => Ok(Plant::Outlier {
                z: v,
                a: one(&names)?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub rows: usize,
    /// Total column count; raised to the number of planted attributes if smaller.
    pub cols: usize,
    pub plants: Vec<Plant>,
    pub seed: u64,
}

/// What was planted and what the generated data actually shows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: SynthSpec,
    pub columns: Vec<String>,
    pub realized: Vec<Realized>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realized {
    pub plant: Plant,
    /// Sample Pearson ρ, skewness γ₁, kurtosis, top-value share, or flagged-row count.
    pub measured: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Normal,
    Gamma(f64, f64),
    StudentT(f64),
    Hh(f64),
}

/// Lower-triangular `L` with `L Lᵀ = m` for a symmetric positive-definite `m` (row-major).
fn cholesky(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            if i == j {
                let d = m[i * n + i] - s;
                if d <= 1e-12 {
                    return None;
                }
                l[i * n + i] = d.sqrt();
            } else {
                l[i * n + j] = (m[i * n + j] - s) / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn column_names(spec: &SynthSpec) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for p in &spec.plants {
        for a in p.attributes() {
            if !names.iter().any(|n| n == a) {
                names.push(a.to_string());
            }
        }
    }
    let mut i = names.len();
    while names.len() < spec.cols {
        let candidate = format!("c{i}");
        if !names.contains(&candidate) {
            names.push(candidate);
        }
        i += 1;
    }
    names
}

/// Generates the dataset described by `spec`. Deterministic in `spec.seed`.
pub fn generate(spec: &SynthSpec) -> Result<(Dataset, GroundTruth)> {
    let names = column_names(spec);
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let d = names.len();
    let n = spec.rows;
    let invalid = |msg: String| Error::InvalidPlant(msg);

    let mut shapes = vec![Shape::Normal; d];
    let mut outliers: Vec<Option<f64>> = vec![None; d];
    let mut correlated: Vec<usize> = Vec::new();
    for p in &spec.plants {
        match p {
            Plant::Rho { a, b, .. } => {
                for c in [index[a.as_str()], index[b.as_str()]] {
                    if !correlated.contains(&c) {
                        correlated.push(c);
                    }
                }
            }
            Plant::Outlier { z, a } => outliers[index[a.as_str()]] = Some(*z),
            Plant::Skew { value, a }
            | Plant::Tails { df: value, a }
            | Plant::Hh { share: value, a } => {
                let c = index[a.as_str()];
                if shapes[c] != Shape::Normal {
                    return Err(invalid(format!("`{a}` has two distribution plants")));
                }
                shapes[c] = match p {
                    // Gamma(α) has skewness 2/√α.
                    Plant::Skew { .. } => Shape::Gamma(4.0 / (value * value), value.signum()),
                    Plant::Tails { .. } => Shape::StudentT(*value),
                    _ => Shape::Hh(*value),
                };
            }
        }
    }
    correlated.sort_unstable();
    for &c in &correlated {
        if shapes[c] != Shape::Normal {
            return Err(invalid(format!(
                "`{}` cannot be both correlated and reshaped",
                names[c]
            )));
        }
    }
    for c in 0..d {
        if matches!(shapes[c], Shape::Hh(_)) && outliers[c].is_some() {
            return Err(invalid(format!(
                "`{}` is categorical and cannot hold outliers",
                names[c]
            )));
        }
    }

    // Correlation block over the columns named in rho plants.
    let m = correlated.len();
    let mut corr = vec![0.0; m * m];
    for i in 0..m {
        corr[i * m + i] = 1.0;
    }
    for p in &spec.plants {
        if let Plant::Rho { value, a, b } = p {
            let i = correlated
                .binary_search(&index[a.as_str()])
                .expect("collected");
            let j = correlated
                .binary_search(&index[b.as_str()])
                .expect("collected");
            corr[i * m + j] = *value;
            corr[j * m + i] = *value;
        }
    }
    let chol = cholesky(&corr, m)
        .ok_or_else(|| invalid("rho plants are not a valid correlation matrix".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut numeric: Vec<Vec<f64>> = vec![Vec::new(); d];
    let mut categorical: Vec<Vec<String>> = vec![Vec::new(); d];
    for c in 0..d {
        match shapes[c] {
            Shape::Normal => numeric[c] = (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            Shape::Gamma(alpha, sign) => {
                let g = Gamma::new(alpha, 1.0).map_err(|e| invalid(e.to_string()))?;
                numeric[c] = (0..n).map(|_| sign * g.sample(&mut rng)).collect();
            }
            Shape::StudentT(df) => {
                let t = StudentT::new(df).map_err(|e| invalid(e.to_string()))?;
                numeric[c] = (0..n).map(|_| t.sample(&mut rng)).collect();
            }
            Shape::Hh(share) => {
                categorical[c] = (0..n)
                    .map(|_| {
                        if rng.random::<f64>() < share {
                            "h0".to_string()
                        } else {
                            format!("v{}", rng.random_range(1..=HH_TAIL_CATEGORIES))
                        }
                    })
                    .collect();
            }
        }
    }
    if m > 0 {
        let mut z = vec![0.0; m];
        for row in 0..n {
            for (i, &c) in correlated.iter().enumerate() {
                z[i] = numeric[c][row];
            }
            for (i, &c) in correlated.iter().enumerate() {
                numeric[c][row] = (0..=i).map(|k| chol[i * m + k] * z[k]).sum();
            }
        }
    }
    for c in 0..d {
        if let Some(z) = outliers[c] {
            let hits = ((n as f64 * OUTLIER_RATE).round() as usize).clamp(1, n.max(1));
            let rows = rand::seq::index::sample(&mut rng, n, hits.min(n));
            for (i, row) in rows.into_iter().enumerate() {
                numeric[c][row] = if i % 2 == 0 { z } else { -z };
            }
        }
    }

    let columns = (0..d)
        .map(|c| match shapes[c] {
            Shape::Hh(_) => Column::categorical(names[c].clone(), categorical[c].iter().map(Some)),
            _ => Column::numeric(names[c].clone(), numeric[c].iter().map(|v| Some(*v))),
        })
        .collect();
    let ds = Dataset::new("synth", columns)?;
    let realized = spec.plants.iter().map(|p| realize(&ds, p)).collect();
    Ok((
        ds,
        GroundTruth {
            spec: spec.clone(),
            columns: names,
            realized,
        },
    ))
}

fn realize(ds: &Dataset, p: &Plant) -> Realized {
    let col = |a: &str| ds.column_by_name(a).expect("planted column exists");
    let measured = match p {
        Plant::Rho { a, b, .. } => {
            let (x, y) = (col(a), col(b));
            CoMoments::of_slices(x.as_numeric().unwrap_or(&[]), y.as_numeric().unwrap_or(&[]))
                .correlation()
                .ok()
        }
        Plant::Skew { a, .. } => metrics::skewness(&MomentSummary::of_column(col(a))).signed,
        Plant::Tails { a, .. } => metrics::kurtosis(&MomentSummary::of_column(col(a))).value,
        Plant::Hh { a, .. } => metrics::rel_freq_topk(col(a), 1).value,
        Plant::Outlier { a, .. } => {
            let c = col(a);
            let flagged =
                metrics::flagged_outliers(c, &MomentSummary::of_column(c), &Default::default());
            Some(flagged.len() as f64)
        }
    };
    Realized {
        plant: p.clone(),
        measured,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(plants: &[&str]) -> SynthSpec {
        SynthSpec {
            rows: 5000,
            cols: 6,
            plants: plants.iter().map(|p| p.parse().unwrap()).collect(),
            seed: 7,
        }
    }

    #[test]
    fn parses_plants() {
        assert_eq!(
            "rho:0.9:a,b".parse::<Plant>().unwrap(),
            Plant::Rho {
                value: 0.9,
                a: "a".into(),
                b: "b".into()
            }
        );
        assert_eq!(
            "hh:0.4:x".parse::<Plant>().unwrap(),
            Plant::Hh {
                share: 0.4,
                a: "x".into()
            }
        );
        for bad in [
            "rho:1.5:a,b",
            "rho:0.5:a",
            "rho:0.5:a,a",
            "skew:x:a",
            "hh:2:a",
            "nope:1:a",
            "rho:0.5",
        ] {
            assert!(bad.parse::<Plant>().is_err(), "{bad}");
        }
    }

    #[test]
    fn names_planted_first() {
        let (ds, truth) = generate(&spec(&["rho:0.5:x,y", "hh:0.3:k"])).unwrap();
        let names: Vec<_> = ds.columns().iter().map(|c| c.name()).collect();
        assert_eq!(names, ["x", "y", "k", "c3", "c4", "c5"]);
        assert_eq!(truth.columns.len(), 6);
    }

    #[test]
    fn planted_values_show_up() {
        let (_, truth) = generate(&spec(&[
            "rho:0.8:a,b",
            "skew:2:s",
            "hh:0.5:h",
            "outlier:9:o",
        ]))
        .unwrap();
        let m: Vec<f64> = truth.realized.iter().map(|r| r.measured.unwrap()).collect();
        assert!((m[0] - 0.8).abs() < 0.03, "{m:?}");
        assert!((m[1] - 2.0).abs() < 0.4, "{m:?}");
        assert!((m[2] - 0.5).abs() < 0.03, "{m:?}");
        assert_eq!(m[3], 50.0);
    }

    #[test]
    fn deterministic_in_seed() {
        let s = spec(&["rho:0.3:a,b"]);
        assert_eq!(
            generate(&s).unwrap().0.fingerprint(),
            generate(&s).unwrap().0.fingerprint()
        );
        let mut t = s.clone();
        t.seed = 8;
        assert_ne!(
            generate(&s).unwrap().0.fingerprint(),
            generate(&t).unwrap().0.fingerprint()
        );
    }

    #[test]
    fn rejects_impossible_correlations() {
        let s = spec(&["rho:0.9:a,b", "rho:0.9:a,c", "rho:-0.9:b,c"]);
        assert!(matches!(generate(&s), Err(Error::InvalidPlant(_))));
        assert!(generate(&spec(&["rho:0.5:a,b", "skew:1:a"])).is_err());
    }
}

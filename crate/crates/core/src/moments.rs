//! Single-pass power sums with an exact, order-free merge.

use serde::{Deserialize, Serialize};

use crate::dataset::Column;
use crate::numeric::Dd;

/// Running power sums `Σx, Σx², Σx³, Σx⁴` over the valid rows of a numeric column.
///
/// Sums are carried in double-double precision so that central moments derived
/// at read time survive the cancellation in `Σx⁴/n - 4μΣx³/n + ...` for columns
/// whose mean is large relative to their spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub count: u64,
    sums: [[f64; 2]; 4],
    /// `+inf` when empty.
    #[serde(with = "bound::lower")]
    pub min: f64,
    /// `-inf` when empty.
    #[serde(with = "bound::upper")]
    pub max: f64,
}

/// Empty summaries have infinite bounds, which JSON cannot carry; they travel as `null`.
mod bound {
    use serde::{Deserialize, Deserializer, Serializer};

    fn ser<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        match v.is_finite() {
            true => s.serialize_some(v),
            false => s.serialize_none(),
        }
    }

    pub mod lower {
        use super::*;
        pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
            ser(v, s)
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
            Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
        }
    }

    pub mod upper {
        use super::*;
        pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
            ser(v, s)
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
            Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
        }
    }
}

impl Default for MomentSummary {
    fn default() -> Self {
        Self::zero()
    }
}

/// Central moments `m2, m3, m4` (population, divided by n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMoments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl MomentSummary {
    pub const fn zero() -> Self {
        Self {
            count: 0,
            sums: [[0.0; 2]; 4],
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let mut s = Self::zero();
        for x in values {
            s.push(x);
        }
        s
    }

    /// Summary over the valid rows of a numeric column (empty for categorical).
    pub fn of_column(column: &Column) -> Self {
        Self::from_values(column.valid_values())
    }

    /// Summary over valid rows within `rows`.
    pub fn of_rows(column: &Column, rows: std::ops::Range<usize>) -> Self {
        let Some(values) = column.as_numeric() else {
            return Self::zero();
        };
        let valid = column.validity();
        Self::from_values(rows.filter(|&r| valid[r]).map(|r| values[r]))
    }

    fn dd(&self, p: usize) -> Dd {
        Dd {
            hi: self.sums[p][0],
            lo: self.sums[p][1],
        }
    }

    fn set(&mut self, p: usize, v: Dd) {
        self.sums[p] = [v.hi, v.lo];
    }

    pub fn push(&mut self, x: f64) {
        let x2 = Dd::square(x);
        let x3 = x2.mul_f64(x);
        let x4 = x2 * x2;
        self.set(0, self.dd(0) + Dd::from_f64(x));
        self.set(1, self.dd(1) + x2);
        self.set(2, self.dd(2) + x3);
        self.set(3, self.dd(3) + x4);
        self.count += 1;
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    /// Component-wise sum of two summaries over disjoint rows.
    pub fn merge(&self, other: &Self) -> Self {
        let mut out = *self;
        for p in 0..4 {
            out.set(p, self.dd(p) + other.dd(p));
        }
        out.count += other.count;
        out.min = self.min.min(other.min);
        out.max = self.max.max(other.max);
        out
    }

    pub fn sum1(&self) -> f64 {
        self.dd(0).to_f64()
    }
    pub fn sum2(&self) -> f64 {
        self.dd(1).to_f64()
    }
    pub fn sum3(&self) -> f64 {
        self.dd(2).to_f64()
    }
    pub fn sum4(&self) -> f64 {
        self.dd(3).to_f64()
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| (self.dd(0) / Dd::from_f64(self.count as f64)).to_f64())
    }

    pub fn range(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.max - self.min
        }
    }

    /// Central moments from the power sums. `None` when empty.
    pub fn central(&self) -> Option<CentralMoments> {
        if self.count == 0 {
            return None;
        }
        let n = Dd::from_f64(self.count as f64);
        let mu = self.dd(0) / n;
        let e2 = self.dd(1) / n;
        let e3 = self.dd(2) / n;
        let e4 = self.dd(3) / n;
        let mu2 = mu * mu;
        let three = Dd::from_f64(3.0);
        let m2 = e2 - mu2;
        let m3 = e3 - three * mu * e2 + Dd::from_f64(2.0) * mu2 * mu;
        let m4 =
            e4 - Dd::from_f64(4.0) * mu * e3 + Dd::from_f64(6.0) * mu2 * e2 - three * mu2 * mu2;
        Some(CentralMoments {
            count: self.count,
            mean: mu.to_f64(),
            m2: m2.to_f64().max(0.0),
            m3: m3.to_f64(),
            m4: m4.to_f64().max(0.0),
        })
    }
}

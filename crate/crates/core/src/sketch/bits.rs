use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `k` sign bits packed into 64-bit words; bit `i` lives in word `i / 64`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector {
    k: usize,
    words: Vec<u64>,
}

impl SignVector {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            words: vec![0; k.div_ceil(64)],
        }
    }

    pub fn from_fn(k: usize, mut bit: impl FnMut(usize) -> bool) -> Self {
        let mut v = Self::zeros(k);
        for i in 0..k {
            if bit(i) {
                v.words[i / 64] |= 1 << (i % 64);
            }
        }
        v
    }

    /// Low `k` bits of `value`, bit `i` = `(value >> i) & 1`.
    pub fn from_u64(k: usize, value: u64) -> Self {
        assert!(k <= 64);
        Self::from_fn(k, |i| (value >> i) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.k, |i| !self.get(i))
    }
}

/// Number of positions at which the two vectors differ.
pub fn hamming(a: &SignVector, b: &SignVector) -> Result<usize> {
    if a.k != b.k {
        return Err(Error::WidthMismatch(a.k, b.k));
    }
    Ok(hamming_words(&a.words, &b.words) as usize)
}

#[inline]
fn hamming_words(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// `cos(π·H/k)`: the correlation implied by the estimated angle between columns.
pub fn estimate_correlation(a: &SignVector, b: &SignVector) -> Result<f64> {
    let h = hamming(a, b)?;
    Ok(angle_to_correlation(h, a.k))
}

fn angle_to_correlation(h: usize, k: usize) -> f64 {
    (std::f64::consts::PI * h as f64 / k as f64).cos()
}

/// Dense symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    pub n: usize,
    pub values: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn identity(n: usize) -> Self {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
        }
        Self { n, values }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.n + j] = v;
        self.values[j * self.n + i] = v;
    }
}

/// Pairwise correlation estimates over all sign vectors: `O(d²·k/64)` word operations.
pub fn estimate_all_pairs(sketches: &[SignVector]) -> Result<SymmetricMatrix> {
    let n = sketches.len();
    let mut m = SymmetricMatrix::identity(n);
    let Some(first) = sketches.first() else {
        return Ok(m);
    };
    let k = first.k;
    if let Some(bad) = sketches.iter().find(|s| s.k != k) {
        return Err(Error::WidthMismatch(k, bad.k));
    }
    for i in 0..n {
        for j in i + 1..n {
            let h = hamming_words(&sketches[i].words, &sketches[j].words) as usize;
            m.set(i, j, angle_to_correlation(h, k));
        }
    }
    Ok(m)
}

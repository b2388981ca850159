use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Column;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemCounter {
    pub item: u32,
    /// Upper bound on the true count.
    pub count: u64,
    /// Maximum overcount; `count - error` is a lower bound.
    pub error: u64,
}

/// Space-Saving summary over categorical codes.
///
/// Any item whose true count exceeds `processed / capacity` is tracked, and
/// every tracked count overestimates the truth by at most `error ≤ processed / capacity`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequentItemsSketch {
    capacity: usize,
    counters: Vec<ItemCounter>,
    index: HashMap<u32, usize>,
    processed: u64,
}

impl FrequentItemsSketch {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "capacity must be at least 1");
        Self {
            capacity,
            counters: Vec::with_capacity(capacity),
            index: HashMap::with_capacity(capacity),
            processed: 0,
        }
    }

    /// Sketch of the valid rows of a categorical column.
    pub fn of_column(column: &Column, capacity: usize) -> Self {
        let mut s = Self::new(capacity);
        if let Some((codes, _)) = column.as_categorical() {
            for (code, ok) in codes.iter().zip(column.validity()) {
                if *ok {
                    s.update(*code);
                }
            }
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn update(&mut self, item: u32) {
        self.processed += 1;
        if let Some(&slot) = self.index.get(&item) {
            self.counters[slot].count += 1;
            return;
        }
        if self.counters.len() < self.capacity {
            self.index.insert(item, self.counters.len());
            self.counters.push(ItemCounter {
                item,
                count: 1,
                error: 0,
            });
            return;
        }
        // Evict the first counter holding the minimum count.
        let (slot, min) = self
            .counters
            .iter()
            .enumerate()
            .min_by_key(|(i, c)| (c.count, *i))
            .map(|(i, c)| (i, c.count))
            .expect("capacity >= 1");
        self.index.remove(&self.counters[slot].item);
        self.index.insert(item, slot);
        self.counters[slot] = ItemCounter {
            item,
            count: min + 1,
            error: min,
        };
    }

    pub fn estimate(&self, item: u32) -> Option<ItemCounter> {
        self.index.get(&item).map(|&i| self.counters[i])
    }

    /// Tracked counters by descending count; ties by ascending item code.
    pub fn top(&self, k: usize) -> Vec<ItemCounter> {
        let mut v = self.counters.clone();
        v.sort_by(|a, b| b.count.cmp(&a.count).then(a.item.cmp(&b.item)));
        v.truncate(k);
        v
    }

    /// Estimated total relative frequency of the `k` most frequent items.
    pub fn rel_freq_estimate(&self, k: usize) -> Option<f64> {
        if self.processed == 0 {
            return None;
        }
        let top: u64 = self.top(k).iter().map(|c| c.count).sum();
        Some((top as f64 / self.processed as f64).min(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feed(items: &[u32], m: usize) -> FrequentItemsSketch {
        let mut s = FrequentItemsSketch::new(m);
        for &i in items {
            s.update(i);
        }
        s
    }

    #[test]
    fn exact_when_capacity_suffices() {
        let s = feed(&[0, 0, 0, 1, 2], 3);
        assert_eq!(
            s.estimate(0),
            Some(ItemCounter {
                item: 0,
                count: 3,
                error: 0
            })
        );
        assert!(s.top(3).iter().all(|c| c.error == 0));
        assert_eq!(s.processed(), 5);
    }

    #[test]
    fn single_counter_keeps_majority() {
        // [a,a,a,b,c] with m=1: a reaches 3, then b and c each evict.
        let s = feed(&[0, 0, 0, 1, 2], 1);
        let top = s.top(1)[0];
        assert!(top.count >= 3);
        // The final occupant overcounts by exactly its error.
        assert_eq!(top.count - top.error, 1);
    }

    #[test]
    fn rel_freq_estimate_matches_when_exact() {
        let s = feed(&[0, 0, 0, 1, 2], 8);
        assert!((s.rel_freq_estimate(1).unwrap() - 0.6).abs() < 1e-15);
        assert!((s.rel_freq_estimate(2).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(FrequentItemsSketch::new(2).rel_freq_estimate(1), None);
    }

    #[test]
    fn errors_bounded_by_processed_over_capacity() {
        let mut items = Vec::new();
        for v in 0..200u32 {
            for _ in 0..(1000 / (v + 1)) {
                items.push(v);
            }
        }
        // Interleave deterministically.
        items.sort_by_key(|x| (x.wrapping_mul(2_654_435_761)) % 97);
        let m = 16;
        let s = feed(&items, m);
        let bound = s.processed() / m as u64;
        let mut truth = HashMap::new();
        for &i in &items {
            *truth.entry(i).or_insert(0u64) += 1;
        }
        for c in s.top(m) {
            let t = truth[&c.item];
            assert!(c.count >= t && c.count - c.error <= t);
            assert!(c.count - t <= bound);
        }
        for (item, t) in truth {
            if t > bound {
                assert!(s.estimate(item).is_some(), "heavy item {item} missing");
            }
        }
    }
}

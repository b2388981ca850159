use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::engine::Engine;
use super::types::{InsightDescriptor, InsightQuery, Mode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredInsight {
    pub insight: InsightDescriptor,
    pub similarity: f64,
}

/// Share of attributes two tuples have in common: `|A ∩ B| / max(|A|, |B|)`.
pub fn attribute_overlap(a: &[String], b: &[String]) -> f64 {
    let shared = a.iter().filter(|x| b.contains(x)).count();
    shared as f64 / a.len().max(b.len()).max(1) as f64
}

/// `max(attribute overlap, 1 - |Δvalue| / span)`.
///
/// Metric proximity only counts between insights ranked by the same metric;
/// `span` is the spread of that metric over the candidate set (0 means all equal).
pub fn similarity(focus: &InsightDescriptor, candidate: &InsightDescriptor, span: f64) -> f64 {
    let overlap = attribute_overlap(&focus.tuple, &candidate.tuple);
    let proximity = if focus.metric_id != candidate.metric_id {
        0.0
    } else if span > 0.0 {
        (1.0 - (focus.value - candidate.value).abs() / span).clamp(0.0, 1.0)
    } else {
        1.0
    };
    overlap.max(proximity)
}

/// Spread of values among `candidates` (and `extra`) sharing `metric`.
pub fn value_span<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

impl Engine {
    /// Insights of the focus's class ordered by similarity to it; the focus itself is excluded.
    pub fn neighborhood(
        &self,
        focus: &InsightDescriptor,
        limit: usize,
    ) -> Result<Vec<ScoredInsight>> {
        self.resolve(focus)?;
        let mode = if focus.approximate {
            Mode::Sketch
        } else {
            Mode::Exact
        };
        let q = InsightQuery::new(focus.class_id)
            .metric(focus.metric_id)
            .mode(mode);
        let candidates = self.ranked(&q)?;
        let span = value_span(
            candidates
                .iter()
                .map(|c| &c.value)
                .chain(std::iter::once(&focus.value)),
        );
        let mut scored: Vec<(Vec<usize>, ScoredInsight)> = candidates
            .into_iter()
            .filter(|c| !c.same_insight(focus))
            .map(|c| {
                let cols = self.resolve(&c).expect("engine output resolves");
                let s = similarity(focus, &c, span);
                (
                    cols,
                    ScoredInsight {
                        insight: c,
                        similarity: s,
                    },
                )
            })
            .collect();
        scored.sort_by(|(ca, a), (cb, b)| {
            b.similarity
                .partial_cmp(&a.similarity)
                .unwrap_or(Ordering::Equal)
                .then_with(|| ca.cmp(cb))
        });
        scored.truncate(limit);
        Ok(scored.into_iter().map(|(_, s)| s).collect())
    }
}

//! Exploration state: focused insights, per-class constraints and the
//! recommendations they produce, with a versioned JSON save format.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::query::{similarity, value_span, Engine, InsightClass, InsightDescriptor, InsightQuery};

pub const STATE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRef {
    pub name: String,
    /// 16 hex digits, see [`crate::Dataset::fingerprint`].
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationState {
    pub schema_version: u32,
    pub dataset: DatasetRef,
    pub focus: Vec<InsightDescriptor>,
    /// Query overrides per class; classes without one use the default query.
    pub constraints: BTreeMap<InsightClass, InsightQuery>,
    pub recommendations: BTreeMap<InsightClass, Vec<InsightDescriptor>>,
    pub created_unix_ms: u64,
    pub modified_unix_ms: u64,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl ExplorationState {
    /// Fresh state with default recommendations.
    pub fn new(engine: &Engine) -> Result<Self> {
        let ds = engine.dataset();
        let now = now_ms();
        let mut state = Self {
            schema_version: STATE_SCHEMA_VERSION,
            dataset: DatasetRef {
                name: ds.name().to_string(),
                fingerprint: ds.fingerprint_hex(),
            },
            focus: Vec::new(),
            constraints: BTreeMap::new(),
            recommendations: BTreeMap::new(),
            created_unix_ms: now,
            modified_unix_ms: now,
        };
        state.recompute(engine)?;
        Ok(state)
    }

    pub fn is_focused(&self, insight: &InsightDescriptor) -> bool {
        self.focus.iter().any(|f| f.same_insight(insight))
    }

    /// The query a class is ranked by: its constraint, or the class default.
    pub fn query_for(&self, class: InsightClass) -> InsightQuery {
        self.constraints
            .get(&class)
            .cloned()
            .unwrap_or_else(|| InsightQuery::new(class))
    }

    /// Adds an insight to the focus list and re-ranks. Focusing twice is a no-op.
    pub fn focus(&mut self, engine: &Engine, insight: InsightDescriptor) -> Result<()> {
        check_insight(engine, &insight)?;
        if self.is_focused(&insight) {
            return Ok(());
        }
        self.focus.push(insight);
        self.recompute(engine)?;
        self.touch();
        Ok(())
    }

    /// Removes an insight from the focus list. Returns a warning, and leaves
    /// the state untouched, when it was not focused.
    pub fn unfocus(
        &mut self,
        engine: &Engine,
        insight: &InsightDescriptor,
    ) -> Result<Option<String>> {
        let before = self.focus.len();
        self.focus.retain(|f| !f.same_insight(insight));
        if self.focus.len() == before {
            return Ok(Some(format!(
                "{} insight on {:?} is not in focus",
                insight.class_id, insight.tuple
            )));
        }
        self.recompute(engine)?;
        self.touch();
        Ok(None)
    }

    /// Replaces a class's query and re-ranks. The query's class decides the slot.
    pub fn set_constraint(&mut self, engine: &Engine, query: InsightQuery) -> Result<()> {
        engine.rank(&query)?;
        self.constraints.insert(query.class_id, query);
        self.recompute(engine)?;
        self.touch();
        Ok(())
    }

    pub fn clear_constraint(&mut self, engine: &Engine, class: InsightClass) -> Result<()> {
        if self.constraints.remove(&class).is_some() {
            self.recompute(engine)?;
            self.touch();
        }
        Ok(())
    }

    /// Rebuilds every class's recommendations from the focus list and constraints.
    ///
    /// Without foci a class shows its plain ranking. With foci, every candidate
    /// passing the class query is scored by its mean similarity to the foci;
    /// equal scores keep the plain ranking order and foci themselves are left out.
    pub fn recompute(&mut self, engine: &Engine) -> Result<()> {
        let mut recs = BTreeMap::new();
        for class in InsightClass::ALL {
            let q = self.query_for(class);
            recs.insert(class, recommend(engine, &q, &self.focus)?);
        }
        self.recommendations = recs;
        Ok(())
    }

    fn touch(&mut self) {
        self.modified_unix_ms = now_ms().max(self.modified_unix_ms);
    }

    pub fn save(&self) -> String {
        serde_json::to_string_pretty(self).expect("state serializes")
    }

    /// Parses a saved state and checks it against the engine's dataset.
    pub fn load(doc: &str, engine: &Engine) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(doc)?;
        let version = raw
            .get("schema_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Malformed("missing schema_version".into()))?;
        if version != STATE_SCHEMA_VERSION as u64 {
            return Err(Error::VersionMismatch {
                expected: STATE_SCHEMA_VERSION,
                found: version.min(u32::MAX as u64) as u32,
            });
        }
        let state: ExplorationState = serde_json::from_value(raw)?;
        let found = engine.dataset().fingerprint_hex();
        if state.dataset.fingerprint != found {
            return Err(Error::FingerprintMismatch {
                expected: state.dataset.fingerprint,
                found,
            });
        }
        for f in &state.focus {
            check_insight(engine, f)?;
        }
        for q in state.constraints.values() {
            q.validate()?;
        }
        Ok(state)
    }
}

fn check_insight(engine: &Engine, insight: &InsightDescriptor) -> Result<()> {
    match engine.resolve(insight) {
        Ok(_) => Ok(()),
        Err(Error::UnknownAttribute(name)) => Err(Error::StaleInsight(name)),
        Err(e) => Err(e),
    }
}

/// Recommendations for one class query given a focus list.
pub fn recommend(
    engine: &Engine,
    query: &InsightQuery,
    focus: &[InsightDescriptor],
) -> Result<Vec<InsightDescriptor>> {
    if focus.is_empty() {
        return engine.rank(query);
    }
    let candidates: Vec<InsightDescriptor> = engine
        .rank(&query.clone().limit(usize::MAX))?
        .into_iter()
        .filter(|c| !focus.iter().any(|f| f.same_insight(c)))
        .collect();
    let spans: Vec<f64> = focus
        .iter()
        .map(|f| {
            value_span(
                candidates
                    .iter()
                    .filter(|c| c.metric_id == f.metric_id)
                    .map(|c| &c.value)
                    .chain(std::iter::once(&f.value)),
            )
        })
        .collect();
    let mut scored: Vec<(f64, InsightDescriptor)> = candidates
        .into_iter()
        .map(|c| {
            let total: f64 = focus
                .iter()
                .zip(&spans)
                .map(|(f, span)| similarity(f, &c, *span))
                .sum();
            (total / focus.len() as f64, c)
        })
        .collect();
    // Stable: equal scores keep the class ranking order.
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    scored.truncate(query.limit);
    Ok(scored.into_iter().map(|(_, c)| c).collect())
}

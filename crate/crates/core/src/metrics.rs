//! Metric series: storage, windowed queries and a seeded synthetic generator.
//!
//! The generator uses ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`. ChaCha output and rand's integer-to-float
//! conversion are both specified bit-for-bit, so a given
//! `(seed, kind, n, spec)` yields the same series on every platform.

use std::collections::{BTreeMap, HashSet};
use std::sync::RwLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SeriesKind {
    TimeSeries,
    Categorical,
}

impl std::str::FromStr for SeriesKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "timeSeries" | "time-series" | "time" => Ok(SeriesKind::TimeSeries),
            "categorical" => Ok(SeriesKind::Categorical),
            other => Err(format!("unknown series kind `{other}` (expected timeSeries or categorical)")),
        }
    }
}

/// Label of a categorical point or epoch-millisecond timestamp of a time point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointKey {
    Time(i64),
    Label(String),
}

impl PointKey {
    pub fn label(&self) -> String {
        match self {
            PointKey::Time(t) => t.to_string(),
            PointKey::Label(l) => l.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub id: String,
    pub name: String,
    pub kind: SeriesKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    pub points: Vec<(PointKey, f64)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("metric `{0}` not found")]
    NotFound(String),
    #[error("invalid series `{id}`: {reason}")]
    InvalidSeries { id: String, reason: String },
    #[error("malformed series document: {0}")]
    Malformed(String),
}

impl MetricSeries {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|(_, v)| *v).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.points.iter().map(|(k, _)| k.label()).collect()
    }

    pub fn last_value(&self) -> Option<f64> {
        self.points.last().map(|(_, v)| *v)
    }

    /// Storage-level checks: non-empty, finite values, key kind matching the
    /// series kind, strictly increasing timestamps or unique labels.
    pub fn validate(&self) -> Result<(), MetricsError> {
        let fail = |reason: String| {
            Err(MetricsError::InvalidSeries {
                id: self.id.clone(),
                reason,
            })
        };
        if self.id.is_empty() {
            return fail("empty id".into());
        }
        if self.points.is_empty() {
            return fail("a stored series needs at least one point".into());
        }
        if let Some(i) = self.points.iter().position(|(_, v)| !v.is_finite()) {
            return fail(format!("point {i} has a non-finite value"));
        }
        match self.kind {
            SeriesKind::TimeSeries => {
                let mut prev: Option<i64> = None;
                for (i, (key, _)) in self.points.iter().enumerate() {
                    let PointKey::Time(t) = key else {
                        return fail(format!("point {i} has a label in a time series"));
                    };
                    if prev.is_some_and(|p| *t <= p) {
                        return fail(format!("timestamp at point {i} is not strictly increasing"));
                    }
                    prev = Some(*t);
                }
            }
            SeriesKind::Categorical => {
                let mut seen = HashSet::new();
                for (i, (key, _)) in self.points.iter().enumerate() {
                    if !seen.insert(key.label()) {
                        return fail(format!("duplicate label `{}` at point {i}", key.label()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, MetricsError> {
        serde_json::from_str(text).map_err(|e| MetricsError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("series serializes");
        out.push('\n');
        out
    }
}

/// Inclusive time window; either end may be open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TimeWindow {
    pub from: Option<i64>,
    pub to: Option<i64>,
}

impl TimeWindow {
    pub fn new(from: i64, to: i64) -> Self {
        TimeWindow {
            from: Some(from),
            to: Some(to),
        }
    }

    pub fn contains(&self, t: i64) -> bool {
        self.from.is_none_or(|f| t >= f) && self.to.is_none_or(|e| t <= e)
    }
}

/// Restrict a series to a window. Categorical points carry no time and are
/// returned unfiltered; the result may have zero points.
pub fn window_series(series: &MetricSeries, window: Option<TimeWindow>) -> MetricSeries {
    let Some(window) = window else {
        return series.clone();
    };
    let points = series
        .points
        .iter()
        .filter(|(key, _)| match key {
            PointKey::Time(t) => window.contains(*t),
            PointKey::Label(_) => true,
        })
        .cloned()
        .collect();
    MetricSeries {
        points,
        ..series.clone()
    }
}

/// Anything that resolves metric ids to series.
pub trait DataProvider: Sync {
    fn series(&self, id: &str) -> Option<MetricSeries>;
}

/// Provider that knows no metrics.
pub struct NoData;

impl DataProvider for NoData {
    fn series(&self, _id: &str) -> Option<MetricSeries> {
        None
    }
}

impl DataProvider for BTreeMap<String, MetricSeries> {
    fn series(&self, id: &str) -> Option<MetricSeries> {
        self.get(id).cloned()
    }
}

/// In-memory store: many concurrent readers, one writer at a time.
#[derive(Debug, Default)]
pub struct SeriesStore {
    inner: RwLock<BTreeMap<String, MetricSeries>>,
}

impl SeriesStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&self, series: MetricSeries) -> Result<(), MetricsError> {
        series.validate()?;
        self.inner
            .write()
            .expect("series store lock poisoned")
            .insert(series.id.clone(), series);
        Ok(())
    }

    pub fn query(&self, id: &str, window: Option<TimeWindow>) -> Result<MetricSeries, MetricsError> {
        let guard = self.inner.read().expect("series store lock poisoned");
        let series = guard
            .get(id)
            .ok_or_else(|| MetricsError::NotFound(id.to_string()))?;
        Ok(window_series(series, window))
    }

    pub fn ids(&self) -> Vec<String> {
        self.inner
            .read()
            .expect("series store lock poisoned")
            .keys()
            .cloned()
            .collect()
    }
}

impl DataProvider for SeriesStore {
    fn series(&self, id: &str) -> Option<MetricSeries> {
        self.query(id, None).ok()
    }
}

/// Value range and time axis for [`generate_series`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub min: f64,
    pub max: f64,
    /// First timestamp (epoch ms) of a time series.
    pub start_ms: i64,
    /// Spacing between timestamps; must be positive.
    pub step_ms: i64,
}

impl GeneratorSpec {
    pub fn range(min: f64, max: f64) -> Self {
        GeneratorSpec {
            min,
            max,
            ..Self::default()
        }
    }
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            min: 0.0,
            max: 100.0,
            start_ms: 1_600_000_000_000,
            step_ms: 60_000,
        }
    }
}

/// Largest single step of the random walk, as a fraction of the range.
const WALK_STEP: f64 = 0.1;

/// Deterministic synthetic series.
///
/// Categorical series draw each value uniformly from `[min, max]` and are
/// labelled `Value1..ValueN`. Time series start at the middle of the range
/// and take uniform steps of at most a tenth of the range, clamped to it.
pub fn generate_series(
    seed: u64,
    kind: SeriesKind,
    n: usize,
    spec: GeneratorSpec,
) -> Result<MetricSeries, MetricsError> {
    if n == 0 {
        return Err(MetricsError::InvalidSpec("point count must be at least 1".into()));
    }
    if !(spec.min.is_finite() && spec.max.is_finite()) || spec.min > spec.max {
        return Err(MetricsError::InvalidSpec(format!(
            "empty range [{}, {}]",
            spec.min, spec.max
        )));
    }
    if kind == SeriesKind::TimeSeries && spec.step_ms <= 0 {
        return Err(MetricsError::InvalidSpec("time step must be positive".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = spec.max - spec.min;
    let points = match kind {
        SeriesKind::Categorical => (0..n)
            .map(|i| {
                let u: f64 = rng.random();
                (PointKey::Label(format!("Value{}", i + 1)), spec.min + u * span)
            })
            .collect(),
        SeriesKind::TimeSeries => {
            let mut value = spec.min + span / 2.0;
            (0..n)
                .map(|i| {
                    if i > 0 {
                        let u: f64 = rng.random();
                        value = (value + (2.0 * u - 1.0) * WALK_STEP * span).clamp(spec.min, spec.max);
                    }
                    let t = spec.start_ms + spec.step_ms * i as i64;
                    (PointKey::Time(t), value)
                })
                .collect()
        }
    };
    Ok(MetricSeries {
        id: format!("generated-{seed}"),
        name: format!("Generated series {seed}"),
        kind,
        unit: None,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn time_series(ts: &[i64]) -> MetricSeries {
        MetricSeries {
            id: "t".into(),
            name: "t".into(),
            kind: SeriesKind::TimeSeries,
            unit: None,
            points: ts.iter().map(|&t| (PointKey::Time(t), t as f64)).collect(),
        }
    }

    #[test]
    fn degenerate_range_gives_constant_values() {
        let s = generate_series(7, SeriesKind::Categorical, 3, GeneratorSpec::range(0.0, 0.0)).unwrap();
        assert_eq!(s.values(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = GeneratorSpec::default();
        let a = generate_series(42, SeriesKind::TimeSeries, 50, spec).unwrap();
        let b = generate_series(42, SeriesKind::TimeSeries, 50, spec).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = generate_series(43, SeriesKind::TimeSeries, 50, spec).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn random_walk_stays_in_range_with_increasing_time() {
        let s = generate_series(1, SeriesKind::TimeSeries, 100, GeneratorSpec::range(0.0, 100.0)).unwrap();
        assert_eq!(s.points.len(), 100);
        assert!(s.values().iter().all(|v| (0.0..=100.0).contains(v)));
        assert!(s.validate().is_ok());
        let steps: Vec<f64> = s.values().windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(steps.iter().all(|&d| d <= 10.0 + 1e-9));
    }

    #[test]
    fn bad_specs() {
        let err = generate_series(1, SeriesKind::Categorical, 3, GeneratorSpec::range(5.0, 1.0));
        assert!(matches!(err, Err(MetricsError::InvalidSpec(_))));
        let err = generate_series(1, SeriesKind::Categorical, 0, GeneratorSpec::default());
        assert!(matches!(err, Err(MetricsError::InvalidSpec(_))));
    }

    #[test]
    fn wire_form() {
        let s = MetricSeries {
            id: "cpu".into(),
            name: "CPU".into(),
            kind: SeriesKind::TimeSeries,
            unit: Some("%".into()),
            points: vec![(PointKey::Time(1000), 1.5), (PointKey::Time(2000), 2.0)],
        };
        let json: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"id":"cpu","name":"CPU","kind":"timeSeries","unit":"%","points":[[1000,1.5],[2000,2.0]]})
        );
        assert_eq!(MetricSeries::from_json(&s.to_json()).unwrap(), s);
        let cat = MetricSeries::from_json(r#"{"id":"c","name":"c","kind":"categorical","points":[["a",1],["b",2]]}"#).unwrap();
        assert_eq!(cat.points[0].0, PointKey::Label("a".into()));
    }

    #[test]
    fn storage_validation() {
        assert!(time_series(&[1, 2, 3]).validate().is_ok());
        assert!(time_series(&[1, 1]).validate().is_err());
        assert!(time_series(&[]).validate().is_err());
        let mut s = time_series(&[1]);
        s.points[0].1 = f64::NAN;
        assert!(s.validate().is_err());
        let dup = MetricSeries::from_json(r#"{"id":"c","name":"c","kind":"categorical","points":[["a",1],["a",2]]}"#).unwrap();
        assert!(dup.validate().is_err());
    }

    #[test]
    fn query_full_and_windowed() {
        let store = SeriesStore::new();
        let s = time_series(&[1, 2, 3, 4, 5]);
        store.put(s.clone()).unwrap();
        assert_eq!(store.query("t", None).unwrap(), s);
        let w = store.query("t", Some(TimeWindow::new(2, 4))).unwrap();
        assert_eq!(w.points.iter().map(|(k, _)| k.clone()).collect::<Vec<_>>(), [PointKey::Time(2), PointKey::Time(3), PointKey::Time(4)]);
        assert!(store.query("t", Some(TimeWindow::new(10, 20))).unwrap().points.is_empty());
        assert_eq!(store.query("x", None), Err(MetricsError::NotFound("x".into())));
    }
}

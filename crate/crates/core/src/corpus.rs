//! Bundled example dashboards and the metric series they bind to.

use std::collections::BTreeMap;

use crate::metrics::MetricSeries;
use crate::model::{parse_model, DashboardModel};

/// `(name, JSON text)` of every bundled dashboard.
pub const MODELS: [(&str, &str); 8] = [
    ("energy", include_str!("../corpus/energy.json")),
    ("finance", include_str!("../corpus/finance.json")),
    ("marketing", include_str!("../corpus/marketing.json")),
    ("network", include_str!("../corpus/network.json")),
    ("operations", include_str!("../corpus/operations.json")),
    ("people", include_str!("../corpus/people.json")),
    ("sales", include_str!("../corpus/sales.json")),
    ("support", include_str!("../corpus/support.json")),
];

pub const METRICS: [&str; 11] = [
    include_str!("../corpus/metrics/cpu.json"),
    include_str!("../corpus/metrics/energy.json"),
    include_str!("../corpus/metrics/flows.json"),
    include_str!("../corpus/metrics/headcount.json"),
    include_str!("../corpus/metrics/keywords.json"),
    include_str!("../corpus/metrics/latency.json"),
    include_str!("../corpus/metrics/memory.json"),
    include_str!("../corpus/metrics/requests.json"),
    include_str!("../corpus/metrics/revenue.json"),
    include_str!("../corpus/metrics/satisfaction.json"),
    include_str!("../corpus/metrics/signups.json"),
];

pub fn models() -> Vec<(&'static str, DashboardModel)> {
    MODELS
        .iter()
        .map(|(name, text)| (*name, parse_model(text).unwrap_or_else(|e| panic!("corpus model {name}: {e}"))))
        .collect()
}

pub fn metrics() -> BTreeMap<String, MetricSeries> {
    METRICS
        .iter()
        .map(|text| {
            let series = MetricSeries::from_json(text).expect("corpus series parses");
            (series.id.clone(), series)
        })
        .collect()
}

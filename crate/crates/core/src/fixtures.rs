//! Built-in sample documents.

use crate::model::{parse_model, DashboardModel};

/// One light-themed page holding a title widget and a three-slice pie with a
/// detail-on-demand interaction.
pub const SAMPLE: &str = include_str!("../fixtures/sample_dashboard.json");

pub fn sample() -> DashboardModel {
    parse_model(SAMPLE).expect("built-in sample parses")
}

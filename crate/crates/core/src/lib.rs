//! Dashboard modelling language.
//!
//! A dashboard is a JSON document of pages and widgets placed on a 12-column
//! grid. This crate parses and validates such documents, lays widgets out,
//! renders them to SVG, composes whole pages, applies edit commands and
//! compares two dashboards decision by decision.

pub mod compare;
pub mod compose;
pub mod corpus;
pub mod edit;
pub mod fixtures;
pub mod layout;
pub mod metrics;
pub mod model;
pub mod par;
pub mod render;
pub mod synth;

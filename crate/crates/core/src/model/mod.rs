//! Dashboard document model.
//!
//! A dashboard is a four-level hierarchy: the dashboard itself, its pages,
//! the widgets placed on each page, and the interactions attached to a
//! widget. Every object level keeps an `extensions` bag holding wire keys the
//! model does not know about, so a document survives a parse/serialize round
//! trip unchanged.

mod validate;
mod wire;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::Value;

pub use validate::{overlapping_pairs, validate_model, Rule, ValidationReport, Violation};
pub use wire::{model_from_value, parse_model, serialize_model, ParseError};

/// Number of columns on the page grid.
pub const GRID_COLUMNS: u32 = 12;

/// Unknown wire keys of one object, kept verbatim.
pub type Extensions = BTreeMap<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theme {
    Light,
    Dark,
}

impl Theme {
    pub const ALL: [Theme; 2] = [Theme::Light, Theme::Dark];

    pub fn as_str(self) -> &'static str {
        match self {
            Theme::Light => "light",
            Theme::Dark => "dark",
        }
    }
}

impl FromStr for Theme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "light" => Ok(Theme::Light),
            "dark" => Ok(Theme::Dark),
            other => Err(format!("unknown theme `{other}` (expected light or dark)")),
        }
    }
}

impl fmt::Display for Theme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Root document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DashboardModel {
    pub id: String,
    pub name: String,
    pub theme: Theme,
    #[serde(rename = "baseDataModel", skip_serializing_if = "Option::is_none")]
    pub base_data_model: Option<String>,
    pub revision: u64,
    pub pages: Vec<Page>,
    #[serde(flatten)]
    pub extensions: Extensions,
}

impl DashboardModel {
    /// The smallest valid document: one empty page.
    pub fn minimal(id: impl Into<String>, name: impl Into<String>) -> Self {
        DashboardModel {
            id: id.into(),
            name: name.into(),
            theme: Theme::Light,
            base_data_model: None,
            revision: 0,
            pages: vec![Page {
                id: "0".to_string(),
                name: "Page 1".to_string(),
                widgets: Vec::new(),
                extensions: Extensions::new(),
            }],
            extensions: Extensions::new(),
        }
    }

    pub fn page(&self, id: &str) -> Option<&Page> {
        self.pages.iter().find(|p| p.id == id)
    }

    pub fn page_index(&self, id: &str) -> Option<usize> {
        self.pages.iter().position(|p| p.id == id)
    }

    /// Locate a widget anywhere in the dashboard as `(page index, widget index)`.
    pub fn find_widget(&self, id: &str) -> Option<(usize, usize)> {
        self.pages.iter().enumerate().find_map(|(pi, page)| {
            page.widgets
                .iter()
                .position(|w| w.id == id)
                .map(|wi| (pi, wi))
        })
    }

    pub fn widget(&self, id: &str) -> Option<&Widget> {
        self.find_widget(id)
            .map(|(pi, wi)| &self.pages[pi].widgets[wi])
    }

    pub fn widgets(&self) -> impl Iterator<Item = &Widget> {
        self.pages.iter().flat_map(|p| p.widgets.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Page {
    pub id: String,
    pub name: String,
    pub widgets: Vec<Widget>,
    #[serde(flatten)]
    pub extensions: Extensions,
}

impl Page {
    pub fn widget(&self, id: &str) -> Option<&Widget> {
        self.widgets.iter().find(|w| w.id == id)
    }

    /// First row below every widget on the page (0 for an empty page).
    pub fn bottom(&self) -> u32 {
        self.widgets
            .iter()
            .map(|w| w.layout.bottom())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Widget {
    pub id: String,
    pub name: Option<String>,
    pub metric_id: Option<MetricBinding>,
    pub properties: VisProperties,
    pub layout: LayoutRect,
    /// Unknown keys found inside the `layout` object.
    pub layout_extensions: Extensions,
    pub visconfig: Option<VisConfig>,
    pub interaction: Option<InteractionSpec>,
    pub extensions: Extensions,
}

impl Serialize for Widget {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct LayoutOut<'a> {
            #[serde(flatten)]
            rect: &'a LayoutRect,
            #[serde(flatten)]
            extensions: &'a Extensions,
        }

        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("id", &self.id)?;
        if let Some(name) = &self.name {
            map.serialize_entry("name", name)?;
        }
        if let Some(metric_id) = &self.metric_id {
            map.serialize_entry("metricId", metric_id)?;
        }
        map.serialize_entry("properties", &self.properties)?;
        map.serialize_entry(
            "layout",
            &LayoutOut {
                rect: &self.layout,
                extensions: &self.layout_extensions,
            },
        )?;
        if let Some(visconfig) = &self.visconfig {
            map.serialize_entry("visconfig", visconfig)?;
        }
        if let Some(interaction) = &self.interaction {
            map.serialize_entry("interaction", interaction)?;
        }
        for (key, value) in &self.extensions {
            map.serialize_entry(key, value)?;
        }
        map.end()
    }
}

impl Widget {
    pub fn new(id: impl Into<String>, vistype: VisType, layout: LayoutRect) -> Self {
        Widget {
            id: id.into(),
            name: None,
            metric_id: None,
            properties: VisProperties::new(vistype),
            layout,
            layout_extensions: Extensions::new(),
            visconfig: None,
            interaction: None,
            extensions: Extensions::new(),
        }
    }

    pub fn vistype(&self) -> VisType {
        self.properties.vistype
    }

    pub fn interactions(&self) -> impl Iterator<Item = InteractionType> + '_ {
        self.interaction
            .iter()
            .flat_map(|spec| spec.interactions.iter().copied())
    }

    pub fn metric_ids(&self) -> Vec<&str> {
        match &self.metric_id {
            None => Vec::new(),
            Some(binding) => binding.ids().collect(),
        }
    }

    pub fn visconfig_mut(&mut self) -> &mut VisConfig {
        self.visconfig.get_or_insert_with(VisConfig::default)
    }
}

/// `metricId` is either a single metric or a list of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum MetricBinding {
    Single(String),
    Multiple(Vec<String>),
}

impl MetricBinding {
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        let ids: &[String] = match self {
            MetricBinding::Single(id) => std::slice::from_ref(id),
            MetricBinding::Multiple(ids) => ids,
        };
        ids.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisProperties {
    pub vistype: VisType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub childrenname: Option<Vec<String>>,
    #[serde(flatten)]
    pub extensions: Extensions,
}

impl VisProperties {
    pub fn new(vistype: VisType) -> Self {
        VisProperties {
            vistype,
            title: None,
            childrenname: None,
            extensions: Extensions::new(),
        }
    }
}

/// Widget rectangle in grid units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LayoutRect {
    pub w: u32,
    pub h: u32,
    pub x: u32,
    pub y: u32,
}

impl LayoutRect {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        LayoutRect { w, h, x, y }
    }

    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub fn area(&self) -> u64 {
        u64::from(self.w) * u64::from(self.h)
    }

    /// Half-open rectangle intersection; empty rectangles intersect nothing.
    pub fn intersects(&self, other: &LayoutRect) -> bool {
        self.area() > 0
            && other.area() > 0
            && self.x < other.right()
            && other.x < self.right()
            && self.y < other.bottom()
            && other.y < self.bottom()
    }

    pub fn with_y(self, y: u32) -> Self {
        LayoutRect { y, ..self }
    }
}

impl fmt::Display for LayoutRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.x, self.y, self.w, self.h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LegendPosition {
    Top,
    Bottom,
    Left,
    Right,
}

impl FromStr for LegendPosition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "top" => Ok(LegendPosition::Top),
            "bottom" => Ok(LegendPosition::Bottom),
            "left" => Ok(LegendPosition::Left),
            "right" => Ok(LegendPosition::Right),
            other => Err(format!("unknown legend position `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Baseline {
    None,
    MovingAverage,
    Deviation,
}

impl FromStr for Baseline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Baseline::None),
            "movingAverage" => Ok(Baseline::MovingAverage),
            "deviation" => Ok(Baseline::Deviation),
            other => Err(format!("unknown baseline `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VisConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colour: Option<Vec<String>>,
    #[serde(rename = "legendDisabled", skip_serializing_if = "Option::is_none")]
    pub legend_disabled: Option<bool>,
    #[serde(rename = "legendPosition", skip_serializing_if = "Option::is_none")]
    pub legend_position: Option<LegendPosition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<Baseline>,
    #[serde(rename = "fontSize", skip_serializing_if = "Option::is_none")]
    pub font_size: Option<f64>,
    #[serde(rename = "axisLabelDisabled", skip_serializing_if = "Option::is_none")]
    pub axis_label_disabled: Option<bool>,
    #[serde(flatten)]
    pub extensions: Extensions,
}

/// `#RRGGBB`, case-insensitive.
pub fn is_hex_colour(s: &str) -> bool {
    s.len() == 7
        && s.starts_with('#')
        && s[1..].bytes().all(|b| b.is_ascii_hexdigit())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InteractionType {
    Filter,
    Zoom,
    Share,
    Customization,
    DetailOnDemand,
    Refresh,
    Print,
    Navigation,
}

impl InteractionType {
    pub const ALL: [InteractionType; 8] = [
        InteractionType::Filter,
        InteractionType::Zoom,
        InteractionType::Share,
        InteractionType::Customization,
        InteractionType::DetailOnDemand,
        InteractionType::Refresh,
        InteractionType::Print,
        InteractionType::Navigation,
    ];

    /// Human-readable wire name.
    pub fn wire_name(self) -> &'static str {
        match self {
            InteractionType::Filter => "Filter",
            InteractionType::Zoom => "Zoom",
            InteractionType::Share => "Share",
            InteractionType::Customization => "Customization",
            InteractionType::DetailOnDemand => "Detail on demand",
            InteractionType::Refresh => "Refresh",
            InteractionType::Print => "Print",
            InteractionType::Navigation => "Navigation",
        }
    }

    /// Stable camelCase identifier used in decision keys and CSS classes.
    pub fn key(self) -> &'static str {
        match self {
            InteractionType::Filter => "filter",
            InteractionType::Zoom => "zoom",
            InteractionType::Share => "share",
            InteractionType::Customization => "customization",
            InteractionType::DetailOnDemand => "detailOnDemand",
            InteractionType::Refresh => "refresh",
            InteractionType::Print => "print",
            InteractionType::Navigation => "navigation",
        }
    }

    /// Case-insensitive; spaces, hyphens and underscores are ignored, so
    /// "Detail on demand", "detail-on-demand" and "detailOnDemand" agree.
    pub fn parse(s: &str) -> Option<Self> {
        let folded: String = s
            .chars()
            .filter(|c| !matches!(c, ' ' | '-' | '_'))
            .flat_map(char::to_lowercase)
            .collect();
        let kind = match folded.as_str() {
            "filter" => InteractionType::Filter,
            "zoom" => InteractionType::Zoom,
            "share" => InteractionType::Share,
            "customization" | "customisation" | "configuration" => InteractionType::Customization,
            "detailondemand" => InteractionType::DetailOnDemand,
            "refresh" => InteractionType::Refresh,
            "print" => InteractionType::Print,
            "navigation" => InteractionType::Navigation,
            _ => return None,
        };
        Some(kind)
    }
}

impl Serialize for InteractionType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.wire_name())
    }
}

impl fmt::Display for InteractionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.wire_name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionSpec {
    pub interactions: BTreeSet<InteractionType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<DetailConfig>,
    #[serde(flatten)]
    pub extensions: Extensions,
}

impl InteractionSpec {
    pub fn new(interactions: impl IntoIterator<Item = InteractionType>) -> Self {
        InteractionSpec {
            interactions: interactions.into_iter().collect(),
            detail: None,
            extensions: Extensions::new(),
        }
    }
}

/// How a detail-on-demand target page is shown.
///
/// `Pure` renders the target page without the navigation menu; `Full` is the
/// normal page.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PageMode {
    #[default]
    Full,
    Pure,
}

impl PageMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PageMode::Full => "full",
            PageMode::Pure => "pure",
        }
    }
}

impl FromStr for PageMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(PageMode::Full),
            "pure" => Ok(PageMode::Pure),
            other => Err(format!("unknown page mode `{other}` (expected full or pure)")),
        }
    }
}

impl fmt::Display for PageMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetailConfig {
    pub target: String,
    pub method: PageMode,
    #[serde(flatten)]
    pub extensions: Extensions,
}

impl DetailConfig {
    pub fn new(target: impl Into<String>, method: PageMode) -> Self {
        DetailConfig {
            target: target.into(),
            method,
            extensions: Extensions::new(),
        }
    }
}

/// Visualization technique of a widget: the eighteen chart kinds plus the
/// structural `title` widget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VisType {
    Title,
    SingleValue,
    Table,
    Gauge,
    AreaChart,
    ColumnChart,
    WordCloud,
    Ring,
    Map,
    CompositeChart,
    Scatter,
    RadialTree,
    Pie,
    BarChart,
    Treemap,
    LineChart,
    Bullet,
    Sankey,
    Radar,
}

impl VisType {
    /// The eighteen visualization techniques (excludes `Title`).
    pub const TECHNIQUES: [VisType; 18] = [
        VisType::SingleValue,
        VisType::Table,
        VisType::Gauge,
        VisType::AreaChart,
        VisType::ColumnChart,
        VisType::WordCloud,
        VisType::Ring,
        VisType::Map,
        VisType::CompositeChart,
        VisType::Scatter,
        VisType::RadialTree,
        VisType::Pie,
        VisType::BarChart,
        VisType::Treemap,
        VisType::LineChart,
        VisType::Bullet,
        VisType::Sankey,
        VisType::Radar,
    ];

    pub fn wire_name(self) -> &'static str {
        match self {
            VisType::Title => "title",
            VisType::SingleValue => "single-value",
            VisType::Table => "table",
            VisType::Gauge => "gauge",
            VisType::AreaChart => "area",
            VisType::ColumnChart => "column",
            VisType::WordCloud => "wordcloud",
            VisType::Ring => "ring",
            VisType::Map => "map",
            VisType::CompositeChart => "composite",
            VisType::Scatter => "scatter",
            VisType::RadialTree => "radial-tree",
            VisType::Pie => "pie",
            VisType::BarChart => "bar",
            VisType::Treemap => "treemap",
            VisType::LineChart => "line",
            VisType::Bullet => "bullet",
            VisType::Sankey => "sankey",
            VisType::Radar => "radar",
        }
    }

    pub fn from_wire(s: &str) -> Option<Self> {
        std::iter::once(VisType::Title)
            .chain(VisType::TECHNIQUES)
            .find(|t| t.wire_name() == s)
    }

    /// Whether rendering needs a bound (or placeholder) series.
    pub fn needs_series(self) -> bool {
        !matches!(self, VisType::Title)
    }

    /// Pie-like techniques whose categories come from `childrenname`.
    pub fn is_arc(self) -> bool {
        matches!(self, VisType::Pie | VisType::Ring)
    }
}

impl Serialize for VisType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.wire_name())
    }
}

impl fmt::Display for VisType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.wire_name())
    }
}

impl FromStr for VisType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VisType::from_wire(s).ok_or_else(|| format!("unknown vistype `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vistype_wire_names_are_bijective() {
        let all: Vec<VisType> = std::iter::once(VisType::Title)
            .chain(VisType::TECHNIQUES)
            .collect();
        assert_eq!(all.len(), 19);
        let names: BTreeSet<&str> = all.iter().map(|t| t.wire_name()).collect();
        assert_eq!(names.len(), 19);
        for t in all {
            assert_eq!(VisType::from_wire(t.wire_name()), Some(t));
        }
    }

    #[test]
    fn interaction_names_parse_case_insensitively() {
        assert_eq!(
            InteractionType::parse("Detail on demand"),
            Some(InteractionType::DetailOnDemand)
        );
        assert_eq!(
            InteractionType::parse("DETAIL ON DEMAND"),
            Some(InteractionType::DetailOnDemand)
        );
        assert_eq!(
            InteractionType::parse("detailOnDemand"),
            Some(InteractionType::DetailOnDemand)
        );
        assert_eq!(InteractionType::parse("zoom"), Some(InteractionType::Zoom));
        assert_eq!(InteractionType::parse("teleport"), None);
        for t in InteractionType::ALL {
            assert_eq!(InteractionType::parse(t.wire_name()), Some(t));
            assert_eq!(InteractionType::parse(t.key()), Some(t));
        }
    }

    #[test]
    fn rect_intersection_is_half_open() {
        let a = LayoutRect::new(0, 0, 4, 2);
        assert!(!a.intersects(&LayoutRect::new(0, 2, 4, 8)));
        assert!(!a.intersects(&LayoutRect::new(4, 0, 4, 2)));
        assert!(a.intersects(&LayoutRect::new(3, 1, 1, 1)));
        assert!(!a.intersects(&LayoutRect::new(1, 1, 0, 1)));
    }

    #[test]
    fn hex_colours() {
        assert!(is_hex_colour("#82b365"));
        assert!(is_hex_colour("#ABCDEF"));
        assert!(!is_hex_colour("82b365"));
        assert!(!is_hex_colour("#82b36"));
        assert!(!is_hex_colour("#82b36g"));
    }
}

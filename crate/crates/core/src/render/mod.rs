//! Deterministic per-widget rendering.
//!
//! Each widget becomes a [`WidgetNode`]: a standalone SVG fragment plus the
//! structured pieces (title, legend, interaction icons) the page composer
//! lays out around it. Output depends only on the widget, its data and the
//! palette, so identical inputs give byte-identical markup.

mod charts;
pub mod geometry;
pub mod svg;
pub mod theme;

use serde::Serialize;
use thiserror::Error;

use crate::metrics::MetricSeries;
use crate::model::{InteractionType, LayoutRect, LegendPosition, PageMode, VisType, Widget};

pub use geometry::GeometryError;
pub use theme::ThemePalette;

/// Pixel width of one grid column at the reference page width.
pub const CELL_WIDTH: f64 = 100.0;
/// Pixel height of one grid row.
pub const CELL_HEIGHT: f64 = 40.0;

/// Pixel size of a widget's drawing surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Canvas {
    pub fn for_rect(rect: LayoutRect, cell_width: f64) -> Self {
        Canvas {
            width: f64::from(rect.w) * cell_width,
            height: f64::from(rect.h) * CELL_HEIGHT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegendEntry {
    pub label: String,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InteractionIcon {
    #[serde(serialize_with = "interaction_key")]
    pub kind: InteractionType,
    pub glyph: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub href: Option<String>,
}

fn interaction_key<S: serde::Serializer>(kind: &InteractionType, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(kind.key())
}

/// Icon glyph per interaction type.
pub fn glyph(kind: InteractionType) -> &'static str {
    match kind {
        InteractionType::Filter => "\u{25BD}",         // ▽
        InteractionType::Zoom => "\u{2295}",           // ⊕
        InteractionType::Share => "\u{2197}",          // ↗
        InteractionType::Customization => "\u{2699}",  // ⚙
        InteractionType::DetailOnDemand => "\u{22EF}", // ⋯
        InteractionType::Refresh => "\u{21BB}",        // ↻
        InteractionType::Print => "\u{2399}",          // ⎙
        InteractionType::Navigation => "\u{2630}",     // ☰
    }
}

/// Link followed by a detail-on-demand icon.
pub fn detail_href(target: &str, method: PageMode) -> String {
    format!("/page/{target}?mode={method}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WidgetNode {
    pub widget_id: String,
    pub vistype: VisType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title_text: Option<String>,
    pub graphic: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub legend: Option<Vec<LegendEntry>>,
    pub legend_position: LegendPosition,
    pub interaction_icons: Vec<InteractionIcon>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("widget `{widget}` has no data{}", metric.as_ref().map(|m| format!(" (metric `{m}`)")).unwrap_or_default())]
    MissingData { widget: String, metric: Option<String> },
    #[error("widget `{widget}` cannot render its data: {reason}")]
    InvalidData { widget: String, reason: String },
}

/// Render at the reference cell size, interactions included.
pub fn render_widget(widget: &Widget, data: &[MetricSeries], palette: &ThemePalette) -> Result<WidgetNode, RenderError> {
    let canvas = Canvas::for_rect(widget.layout, CELL_WIDTH);
    let mut node = render_chart(widget, data, palette, canvas)?;
    node.interaction_icons = interaction_icons(widget);
    Ok(node)
}

/// Graphic, title and legend only; `interaction_icons` is left empty.
pub fn render_chart(
    widget: &Widget,
    data: &[MetricSeries],
    palette: &ThemePalette,
    canvas: Canvas,
) -> Result<WidgetNode, RenderError> {
    let drawn = charts::draw(widget, data, palette, canvas)?;
    let config = widget.visconfig.as_ref();
    let legend_disabled = config.and_then(|c| c.legend_disabled).unwrap_or(false);
    Ok(WidgetNode {
        widget_id: widget.id.clone(),
        vistype: widget.vistype(),
        title_text: widget.name.clone(),
        graphic: drawn.graphic,
        legend: if legend_disabled || drawn.legend.is_empty() {
            None
        } else {
            Some(drawn.legend)
        },
        legend_position: config
            .and_then(|c| c.legend_position)
            .unwrap_or(LegendPosition::Bottom),
        interaction_icons: Vec::new(),
    })
}

/// One icon per declared interaction, in canonical interaction order.
pub fn interaction_icons(widget: &Widget) -> Vec<InteractionIcon> {
    let detail = widget.interaction.as_ref().and_then(|spec| spec.detail.as_ref());
    widget
        .interactions()
        .map(|kind| InteractionIcon {
            kind,
            glyph: glyph(kind),
            href: match (kind, detail) {
                (InteractionType::DetailOnDemand, Some(d)) => Some(detail_href(&d.target, d.method)),
                _ => None,
            },
        })
        .collect()
}

/// Inline panel shown in place of a widget whose data failed.
pub fn error_node(widget: &Widget, message: &str, palette: &ThemePalette, canvas: Canvas) -> WidgetNode {
    let mut svg = svg::Svg::new("error-panel", canvas.width, canvas.height);
    svg.rect("background", 0.0, 0.0, canvas.width, canvas.height, palette.surface)
        .text(
            "error-message",
            (canvas.width / 2.0, canvas.height / 2.0),
            12.0,
            "middle",
            palette.text,
            message,
        );
    WidgetNode {
        widget_id: widget.id.clone(),
        vistype: widget.vistype(),
        title_text: widget.name.clone(),
        graphic: svg.finish(),
        legend: None,
        legend_position: LegendPosition::Bottom,
        interaction_icons: Vec::new(),
    }
}

//! Page composition: menu, frame, layout, widget and interaction stages,
//! followed by static HTML export.

use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::metrics::{generate_series, DataProvider, GeneratorSpec, MetricSeries, SeriesKind};
use crate::model::{DashboardModel, LegendPosition, PageMode, Theme, VisType, Widget};
use crate::par::Exec;
use crate::render::svg::{escape, num};
use crate::render::{error_node, interaction_icons, render_chart, Canvas, ThemePalette, WidgetNode, CELL_HEIGHT};

/// Reference page width of the static export, in pixels.
pub const PAGE_WIDTH: f64 = 1200.0;
/// Range of placeholder values drawn for widgets without a metric binding.
pub const PLACEHOLDER_RANGE: (f64, f64) = (1.0, 100.0);
const PLACEHOLDER_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("unknown page `{0}`")]
    UnknownPage(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MenuEntry {
    pub page_id: String,
    pub page_name: String,
    pub href: String,
    pub current: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PixelRect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl PixelRect {
    pub fn intersects(&self, other: &PixelRect) -> bool {
        self.w > 0.0
            && self.h > 0.0
            && other.w > 0.0
            && other.h > 0.0
            && self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PlacedWidget {
    pub widget_node: WidgetNode,
    pub pixel_rect: PixelRect,
    /// Set when the widget's data could not be rendered; the node is then an
    /// error panel.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RenderTree {
    pub dashboard_title: String,
    pub theme: Theme,
    pub menu: Vec<MenuEntry>,
    pub current_page_id: String,
    pub current_page_name: String,
    pub frame: Vec<PlacedWidget>,
    pub mode: PageMode,
}

impl RenderTree {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("render tree serializes") + "\n"
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ComposeOptions {
    /// Seed of the placeholder data drawn for unbound widgets.
    pub seed: u64,
    pub page_width: f64,
    pub exec: Exec,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        ComposeOptions {
            seed: 0,
            page_width: PAGE_WIDTH,
            exec: Exec::default(),
        }
    }
}

pub fn list_menu(model: &DashboardModel) -> Vec<MenuEntry> {
    model
        .pages
        .iter()
        .map(|p| MenuEntry {
            page_id: p.id.clone(),
            page_name: p.name.clone(),
            href: format!("/page/{}", p.id),
            current: false,
        })
        .collect()
}

/// Menu plus resolved current page, with an empty frame.
pub fn frame_page(model: &DashboardModel, page_ref: &str, mode: PageMode) -> Result<RenderTree, ComposeError> {
    let page = model
        .page(page_ref)
        .ok_or_else(|| ComposeError::UnknownPage(page_ref.to_string()))?;
    let mut menu = list_menu(model);
    for entry in &mut menu {
        entry.current = entry.page_id == page.id;
    }
    Ok(RenderTree {
        dashboard_title: model.name.clone(),
        theme: model.theme,
        menu,
        current_page_id: page.id.clone(),
        current_page_name: page.name.clone(),
        frame: Vec::new(),
        mode,
    })
}

pub fn compose_page(
    model: &DashboardModel,
    page_ref: &str,
    data: &dyn DataProvider,
    mode: PageMode,
) -> Result<RenderTree, ComposeError> {
    compose_page_with(model, page_ref, data, mode, ComposeOptions::default())
}

pub fn compose_page_with(
    model: &DashboardModel,
    page_ref: &str,
    data: &dyn DataProvider,
    mode: PageMode,
    options: ComposeOptions,
) -> Result<RenderTree, ComposeError> {
    let mut tree = frame_page(model, page_ref, mode)?;
    let page = model.page(page_ref).expect("frame_page resolved the page");
    let palette = ThemePalette::for_theme(model.theme);
    let cell_width = options.page_width / crate::model::GRID_COLUMNS as f64;

    let placed: Vec<(&Widget, PixelRect)> = page
        .widgets
        .iter()
        .map(|w| (w, pixel_rect(w, cell_width)))
        .collect();

    tree.frame = options.exec.map(&placed, |(widget, rect)| {
        let canvas = Canvas::for_rect(widget.layout, cell_width);
        let (node, error) = match resolve_data(widget, data, options.seed)
            .and_then(|series| render_chart(widget, &series, palette, canvas).map_err(|e| e.to_string()))
        {
            Ok(node) => (node, None),
            Err(message) => (error_node(widget, &message, palette, canvas), Some(message)),
        };
        PlacedWidget {
            widget_node: node,
            pixel_rect: *rect,
            error,
        }
    });

    for (placed, widget) in tree.frame.iter_mut().zip(&page.widgets) {
        placed.widget_node.interaction_icons = interaction_icons(widget);
    }
    Ok(tree)
}

fn pixel_rect(widget: &Widget, cell_width: f64) -> PixelRect {
    let r = widget.layout;
    PixelRect {
        x: f64::from(r.x) * cell_width,
        y: f64::from(r.y) * CELL_HEIGHT,
        w: f64::from(r.w) * cell_width,
        h: f64::from(r.h) * CELL_HEIGHT,
    }
}

/// FNV-1a, used to derive a stable per-widget placeholder seed.
fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}

/// Placeholder categorical series for a widget with no metric binding.
pub fn placeholder_series(widget: &Widget, seed: u64) -> MetricSeries {
    let n = widget
        .properties
        .childrenname
        .as_ref()
        .map(|names| names.len())
        .filter(|n| *n > 0)
        .unwrap_or(PLACEHOLDER_POINTS);
    let spec = GeneratorSpec::range(PLACEHOLDER_RANGE.0, PLACEHOLDER_RANGE.1);
    let mut series =
        generate_series(seed ^ fnv1a(&widget.id), SeriesKind::Categorical, n, spec).expect("placeholder spec is valid");
    series.id = format!("placeholder-{}", widget.id);
    series.name = widget.name.clone().unwrap_or_else(|| widget.id.clone());
    series
}

fn resolve_data(widget: &Widget, data: &dyn DataProvider, seed: u64) -> Result<Vec<MetricSeries>, String> {
    let ids = widget.metric_ids();
    if ids.is_empty() {
        let inline_value = widget.properties.extensions.contains_key("value");
        return Ok(match widget.vistype() {
            VisType::Title => Vec::new(),
            VisType::SingleValue if inline_value => Vec::new(),
            _ => vec![placeholder_series(widget, seed)],
        });
    }
    ids.iter()
        .map(|id| {
            data.series(id)
                .ok_or_else(|| format!("metric `{id}` is not available"))
        })
        .collect()
}

fn css(palette: &ThemePalette) -> String {
    format!(
        "body{{margin:0;font-family:sans-serif;background:{bg};color:{text}}}\
header{{padding:12px 16px}}\
h1{{margin:0;font-size:20px}}\
h2{{margin:4px 0 0;font-size:14px;color:{axis}}}\
nav.menu ul{{list-style:none;margin:0;padding:0 16px;display:flex;gap:16px}}\
nav.menu a{{color:{text};text-decoration:none}}\
nav.menu a.current{{font-weight:bold;border-bottom:2px solid {accent}}}\
main.frame{{position:relative;margin:8px 0}}\
section.widget{{position:absolute;box-sizing:border-box;overflow:hidden;background:{surface}}}\
.widget-header{{position:absolute;top:0;left:0;right:0;display:flex;justify-content:space-between;padding:2px 6px;font-size:12px}}\
.icon{{margin-left:4px;color:{text};text-decoration:none}}\
ul.legend{{position:absolute;bottom:0;left:0;margin:0;padding:2px 6px;list-style:none;font-size:11px;display:flex;flex-wrap:wrap;gap:6px}}\
ul.legend-top{{top:18px;bottom:auto}}\
ul.legend-left,ul.legend-right{{flex-direction:column;top:18px;bottom:auto}}\
ul.legend-right{{left:auto;right:0}}\
.swatch{{display:inline-block;width:10px;height:10px;margin-right:4px}}\
.widget-error .error-message{{font-style:italic}}",
        bg = palette.background,
        text = palette.text,
        axis = palette.axis,
        surface = palette.surface,
        accent = palette.categorical[0],
    )
}

fn legend_class(position: LegendPosition) -> &'static str {
    match position {
        LegendPosition::Top => "legend legend-top",
        LegendPosition::Bottom => "legend legend-bottom",
        LegendPosition::Left => "legend legend-left",
        LegendPosition::Right => "legend legend-right",
    }
}

/// Self-contained HTML document: inline styles and graphics, no scripts and
/// no external references.
pub fn export_html(tree: &RenderTree) -> String {
    let palette = ThemePalette::for_theme(tree.theme);
    let title = escape(&tree.dashboard_title);
    let height = tree
        .frame
        .iter()
        .map(|p| p.pixel_rect.y + p.pixel_rect.h)
        .fold(0.0, f64::max);
    let width = tree
        .frame
        .iter()
        .map(|p| p.pixel_rect.x + p.pixel_rect.w)
        .fold(PAGE_WIDTH, f64::max);

    let mut out = String::new();
    let _ = write!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{title}</title>\n<style>{}</style>\n</head>\n",
        css(palette)
    );
    let _ = writeln!(
        out,
        "<body class=\"theme-{} mode-{}\">",
        tree.theme.as_str(),
        tree.mode.as_str()
    );
    let _ = writeln!(
        out,
        "<header><h1 class=\"dashboard-title\">{title}</h1><h2 class=\"page-name\">{}</h2></header>",
        escape(&tree.current_page_name)
    );
    if tree.mode == PageMode::Full {
        out.push_str("<nav class=\"menu\"><ul>");
        for entry in &tree.menu {
            let class = if entry.current { " class=\"current\"" } else { "" };
            let _ = write!(
                out,
                "<li><a href=\"{}\"{class}>{}</a></li>",
                escape(&entry.href),
                escape(&entry.page_name)
            );
        }
        out.push_str("</ul></nav>\n");
    }
    let _ = writeln!(
        out,
        "<main class=\"frame\" style=\"width:{}px;height:{}px\">",
        num(width),
        num(height)
    );
    for placed in &tree.frame {
        write_widget(&mut out, placed);
    }
    out.push_str("</main>\n</body>\n</html>\n");
    out
}

fn write_widget(out: &mut String, placed: &PlacedWidget) {
    let node = &placed.widget_node;
    let r = placed.pixel_rect;
    let class = if placed.error.is_some() { "widget widget-error" } else { "widget" };
    let _ = write!(
        out,
        "<section class=\"{class}\" id=\"widget-{}\" data-vistype=\"{}\" style=\"left:{}px;top:{}px;width:{}px;height:{}px\">",
        escape(&node.widget_id),
        node.vistype.wire_name(),
        num(r.x),
        num(r.y),
        num(r.w),
        num(r.h)
    );
    out.push_str("<div class=\"widget-header\"><span class=\"widget-title\">");
    if let Some(title) = &node.title_text {
        out.push_str(&escape(title));
    }
    out.push_str("</span><span class=\"icons\">");
    for icon in &node.interaction_icons {
        match &icon.href {
            Some(href) => {
                let _ = write!(
                    out,
                    "<a class=\"icon icon-{}\" href=\"{}\" title=\"{}\">{}</a>",
                    icon.kind.key(),
                    escape(href),
                    icon.kind.wire_name(),
                    icon.glyph
                );
            }
            None => {
                let _ = write!(
                    out,
                    "<span class=\"icon icon-{}\" title=\"{}\">{}</span>",
                    icon.kind.key(),
                    icon.kind.wire_name(),
                    icon.glyph
                );
            }
        }
    }
    out.push_str("</span></div>");
    out.push_str(&node.graphic);
    if let Some(legend) = &node.legend {
        let _ = write!(out, "<ul class=\"{}\">", legend_class(node.legend_position));
        for entry in legend {
            let _ = write!(
                out,
                "<li><span class=\"swatch\" style=\"background:{}\"></span>{}</li>",
                escape(&entry.color),
                escape(&entry.label)
            );
        }
        out.push_str("</ul>");
    }
    out.push_str("</section>\n");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sample;
    use crate::layout::compact;
    use crate::metrics::NoData;
    use crate::model::{LayoutRect, MetricBinding, Page};

    #[test]
    fn sample_menu() {
        let menu = list_menu(&sample());
        assert_eq!(
            menu,
            [MenuEntry {
                page_id: "0".into(),
                page_name: "Sample Page".into(),
                href: "/page/0".into(),
                current: false,
            }]
        );
    }

    #[test]
    fn duplicate_page_names_keep_distinct_hrefs() {
        let mut m = sample();
        let mut second = m.pages[0].clone();
        second.id = "1".into();
        m.pages.push(second);
        let menu = list_menu(&m);
        assert_eq!(menu.len(), 2);
        assert_ne!(menu[0].href, menu[1].href);
    }

    #[test]
    fn frame_marks_one_current_entry() {
        let tree = frame_page(&sample(), "0", PageMode::Full).unwrap();
        assert_eq!(tree.menu.iter().filter(|e| e.current).count(), 1);
        assert!(tree.frame.is_empty());
        assert_eq!(frame_page(&sample(), "9", PageMode::Full), Err(ComposeError::UnknownPage("9".into())));
    }

    #[test]
    fn sample_composes_with_detail_link() {
        let tree = compose_page(&sample(), "0", &NoData, PageMode::Full).unwrap();
        assert_eq!(tree.frame.len(), 2);
        assert!(tree.frame.iter().all(|p| p.error.is_none()));
        let pie = &tree.frame[1];
        assert_eq!(pie.pixel_rect, PixelRect { x: 0.0, y: 80.0, w: 400.0, h: 320.0 });
        assert_eq!(pie.widget_node.interaction_icons[0].href.as_deref(), Some("/page/0?mode=pure"));
    }

    #[test]
    fn empty_page_gives_empty_frame() {
        let m = DashboardModel::minimal("d", "Empty");
        let tree = compose_page(&m, "0", &NoData, PageMode::Full).unwrap();
        assert!(tree.frame.is_empty());
        assert!(export_html(&tree).contains("Empty"));
    }

    #[test]
    fn missing_metric_becomes_error_panel() {
        let mut m = sample();
        m.pages[0].widgets[1].metric_id = Some(MetricBinding::Single("cpu".into()));
        let tree = compose_page(&m, "0", &NoData, PageMode::Full).unwrap();
        let pie = &tree.frame[1];
        assert!(pie.error.as_deref().unwrap().contains("cpu"));
        assert!(pie.widget_node.graphic.contains("error-panel"));
        assert_eq!(pie.pixel_rect.y, 80.0);
    }

    #[test]
    fn pure_mode_hides_menu() {
        let tree = compose_page(&sample(), "0", &NoData, PageMode::Pure).unwrap();
        let html = export_html(&tree);
        assert!(!html.contains("<nav"));
        assert!(html.contains("Sample Pie Widget"));
    }

    #[test]
    fn dark_export_uses_dark_background() {
        let mut m = sample();
        m.theme = Theme::Dark;
        let html = export_html(&compose_page(&m, "0", &NoData, PageMode::Full).unwrap());
        assert!(html.contains("background:#141414"));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut page = Page {
            id: "0".into(),
            name: "Many".into(),
            widgets: Vec::new(),
            extensions: Default::default(),
        };
        for (i, v) in VisType::TECHNIQUES.iter().enumerate() {
            page.widgets.push(Widget::new(format!("w{i}"), *v, LayoutRect::new((i as u32 % 3) * 4, 0, 4, 6)));
        }
        let page = compact(&page);
        let mut m = DashboardModel::minimal("d", "Many");
        m.pages = vec![page];
        let opts = |exec| ComposeOptions { exec, ..ComposeOptions::default() };
        let seq = compose_page_with(&m, "0", &NoData, PageMode::Full, opts(Exec::Sequential)).unwrap();
        let par = compose_page_with(&m, "0", &NoData, PageMode::Full, opts(Exec::Parallel)).unwrap();
        assert_eq!(seq, par);
        assert_eq!(export_html(&seq), export_html(&par));
    }

    #[test]
    fn export_has_no_external_references() {
        let html = export_html(&compose_page(&sample(), "0", &NoData, PageMode::Full).unwrap());
        assert!(!html.contains("http://") && !html.contains("https://"));
        assert!(!html.contains("<script"));
    }
}

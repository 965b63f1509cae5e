use std::collections::BTreeMap;

use super::geometry::{
    arc_angles, deviation, gauge_angle, moving_average, scale_linear, treemap_slice_dice, GeometryError, Rect,
};
use super::svg::{num, Svg};
use super::{Canvas, LegendEntry, RenderError, ThemePalette};
use crate::metrics::{MetricSeries, PointKey, SeriesKind};
use crate::model::{Baseline, VisType, Widget};

/// Window of the moving-average baseline overlay.
pub(crate) const BASELINE_WINDOW: usize = 3;
/// Gauge dial range used when the metric carries none.
pub(crate) const GAUGE_RANGE: (f64, f64) = (0.0, 100.0);
const DEFAULT_FONT_SIZE: f64 = 32.0;
const PAD: f64 = 8.0;

pub(super) struct Drawn {
    pub graphic: String,
    pub legend: Vec<LegendEntry>,
}

struct Ctx<'a> {
    widget: &'a Widget,
    palette: &'a ThemePalette,
    canvas: Canvas,
    axis_labels: bool,
}

/// Inner drawing area of axis charts.
#[derive(Clone, Copy)]
struct Plot {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl Plot {
    fn bottom(&self) -> f64 {
        self.top + self.height
    }

    fn right(&self) -> f64 {
        self.left + self.width
    }

    /// Centre of band `i` of `n` along the x axis.
    fn band_x(&self, i: usize, n: usize) -> f64 {
        self.left + (i as f64 + 0.5) * self.width / n.max(1) as f64
    }

    fn band_y(&self, i: usize, n: usize) -> f64 {
        self.top + (i as f64 + 0.5) * self.height / n.max(1) as f64
    }
}

impl<'a> Ctx<'a> {
    fn colour(&self, i: usize) -> String {
        match self.widget.visconfig.as_ref().and_then(|c| c.colour.as_ref()) {
            Some(list) if !list.is_empty() => list[i % list.len()].clone(),
            _ => self.palette.categorical[i % self.palette.categorical.len()].to_string(),
        }
    }

    fn svg(&self) -> Svg {
        let class = format!("vis-{}", self.widget.vistype().wire_name());
        let mut svg = Svg::new(&class, self.canvas.width, self.canvas.height);
        svg.rect("background", 0.0, 0.0, self.canvas.width, self.canvas.height, self.palette.surface);
        svg
    }

    fn missing(&self) -> RenderError {
        RenderError::MissingData {
            widget: self.widget.id.clone(),
            metric: self.widget.metric_ids().first().map(|m| m.to_string()),
        }
    }

    fn invalid(&self, reason: impl ToString) -> RenderError {
        RenderError::InvalidData {
            widget: self.widget.id.clone(),
            reason: reason.to_string(),
        }
    }

    fn geometry(&self, e: GeometryError) -> RenderError {
        self.invalid(e)
    }

    fn primary<'d>(&self, data: &'d [MetricSeries]) -> Result<&'d MetricSeries, RenderError> {
        let series = data.first().ok_or_else(|| self.missing())?;
        if series.points.is_empty() {
            return Err(self.invalid(format!("series `{}` has no points", series.id)));
        }
        Ok(series)
    }

    fn non_empty<'d>(&self, data: &'d [MetricSeries]) -> Result<&'d [MetricSeries], RenderError> {
        self.primary(data)?;
        Ok(data)
    }

    /// Category labels come from `childrenname` where given.
    fn categories(&self, series: &MetricSeries) -> Vec<(String, f64)> {
        let names = self.widget.properties.childrenname.as_deref().unwrap_or(&[]);
        series
            .points
            .iter()
            .enumerate()
            .map(|(i, (key, v))| (names.get(i).cloned().unwrap_or_else(|| key.label()), *v))
            .collect()
    }

    fn category_legend(&self, categories: &[(String, f64)]) -> Vec<LegendEntry> {
        categories
            .iter()
            .enumerate()
            .map(|(i, (label, _))| LegendEntry {
                label: label.clone(),
                color: self.colour(i),
            })
            .collect()
    }

    fn series_legend(&self, data: &[MetricSeries]) -> Vec<LegendEntry> {
        data.iter()
            .enumerate()
            .map(|(i, s)| LegendEntry {
                label: s.name.clone(),
                color: self.colour(i),
            })
            .collect()
    }

    fn baseline(&self) -> Baseline {
        self.widget
            .visconfig
            .as_ref()
            .and_then(|c| c.baseline)
            .unwrap_or(Baseline::None)
    }

    fn plot(&self) -> Plot {
        let (left, bottom) = if self.axis_labels { (40.0, 20.0) } else { (PAD, PAD) };
        Plot {
            left,
            top: PAD,
            width: (self.canvas.width - left - PAD).max(1.0),
            height: (self.canvas.height - PAD - bottom).max(1.0),
        }
    }

    fn label_size(&self) -> f64 {
        10.0
    }
}

/// Value domain that always contains zero and is never degenerate.
fn zero_domain<'v>(values: impl IntoIterator<Item = &'v f64>) -> (f64, f64) {
    let (lo, hi) = values
        .into_iter()
        .fold((0.0_f64, 0.0_f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo, lo + 1.0)
    }
}

pub(super) fn draw(widget: &Widget, data: &[MetricSeries], palette: &ThemePalette, canvas: Canvas) -> Result<Drawn, RenderError> {
    let ctx = Ctx {
        widget,
        palette,
        canvas,
        axis_labels: !widget
            .visconfig
            .as_ref()
            .and_then(|c| c.axis_label_disabled)
            .unwrap_or(false),
    };
    match widget.vistype() {
        VisType::Title => Ok(title(&ctx)),
        VisType::SingleValue => single_value(&ctx, data),
        VisType::Table => table(&ctx, data),
        VisType::Gauge => gauge(&ctx, data),
        VisType::AreaChart => lines(&ctx, data, true),
        VisType::LineChart => lines(&ctx, data, false),
        VisType::ColumnChart => bars(&ctx, data, false),
        VisType::BarChart => bars(&ctx, data, true),
        VisType::WordCloud => word_cloud(&ctx, data),
        VisType::Pie => arcs(&ctx, data, false),
        VisType::Ring => arcs(&ctx, data, true),
        VisType::Map => map(&ctx, data),
        VisType::CompositeChart => composite(&ctx, data),
        VisType::Scatter => scatter(&ctx, data),
        VisType::RadialTree => radial_tree(&ctx, data),
        VisType::Treemap => treemap(&ctx, data),
        VisType::Bullet => bullet(&ctx, data),
        VisType::Sankey => sankey(&ctx, data),
        VisType::Radar => radar(&ctx, data),
    }
}

fn title(ctx: &Ctx) -> Drawn {
    let w = ctx.widget;
    let text = w
        .properties
        .title
        .as_deref()
        .or(w.name.as_deref())
        .unwrap_or(&w.id);
    let size = (ctx.canvas.height * 0.45).min(28.0);
    let mut svg = ctx.svg();
    svg.text("title-text", (12.0, ctx.canvas.height / 2.0), size, "start", ctx.palette.text, text);
    Drawn {
        graphic: svg.finish(),
        legend: Vec::new(),
    }
}

fn single_value(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let inline = ctx.widget.properties.extensions.get("value").and_then(|v| v.as_f64());
    let (value, unit) = match data.first() {
        Some(series) => (
            series
                .last_value()
                .ok_or_else(|| ctx.invalid(format!("series `{}` has no points", series.id)))?,
            series.unit.clone(),
        ),
        None => (inline.ok_or_else(|| ctx.missing())?, None),
    };
    let size = ctx
        .widget
        .visconfig
        .as_ref()
        .and_then(|c| c.font_size)
        .unwrap_or(DEFAULT_FONT_SIZE);
    let (cx, cy) = (ctx.canvas.width / 2.0, ctx.canvas.height / 2.0);
    let mut svg = ctx.svg();
    svg.text("single-value", (cx, cy), size, "middle", ctx.palette.text, &num(value));
    if let Some(unit) = unit {
        svg.text("unit", (cx, cy + size * 0.75), ctx.label_size() + 2.0, "middle", ctx.palette.axis, &unit);
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: Vec::new(),
    })
}

fn table(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let series = ctx.primary(data)?;
    const ROW: f64 = 22.0;
    let w = ctx.canvas.width;
    let mut svg = ctx.svg();
    svg.rect("table-header", 0.0, 0.0, w, ROW, ctx.palette.axis)
        .text("table-head", (PAD, ROW / 2.0), 11.0, "start", ctx.palette.background, "Label")
        .text(
            "table-head",
            (w - PAD, ROW / 2.0),
            11.0,
            "end",
            ctx.palette.background,
            series.unit.as_deref().unwrap_or("Value"),
        );
    for (i, (label, value)) in ctx.categories(series).iter().enumerate() {
        let y = ROW * (i as f64 + 1.5);
        svg.text("table-cell", (PAD, y), 11.0, "start", ctx.palette.text, label)
            .text("table-cell", (w - PAD, y), 11.0, "end", ctx.palette.text, &num(*value))
            .line(
                "table-rule",
                (0.0, ROW * (i as f64 + 2.0)),
                (w, ROW * (i as f64 + 2.0)),
                ctx.palette.axis,
                0.5,
            );
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: Vec::new(),
    })
}

fn polar(cx: f64, cy: f64, r: f64, degrees_from_top: f64) -> (f64, f64) {
    let rad = degrees_from_top.to_radians();
    (cx + r * rad.sin(), cy - r * rad.cos())
}

fn gauge(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let value = ctx.primary(data)?.last_value().expect("non-empty series");
    let (min, max) = GAUGE_RANGE;
    let angle = gauge_angle(value, min, max).map_err(|e| ctx.geometry(e))?;
    let (w, h) = (ctx.canvas.width, ctx.canvas.height);
    let (cx, cy) = (w / 2.0, h * 0.8);
    let r = (w / 2.0 - 2.0 * PAD).min(h * 0.65).max(4.0);
    // 0° of the dial points left (-90° from top), 180° points right.
    let end = polar(cx, cy, r, angle - 90.0);
    let tip = polar(cx, cy, r * 0.9, angle - 90.0);
    let mut svg = ctx.svg();
    svg.raw(&format!(
        r#"<path class="gauge-dial" d="M {} {} A {r} {r} 0 0 1 {} {}" fill="none" stroke="{}" stroke-width="10"/>"#,
        num(cx - r),
        num(cy),
        num(cx + r),
        num(cy),
        ctx.palette.axis,
        r = num(r)
    ))
    .raw(&format!(
        r#"<path class="gauge-value" d="M {} {} A {r} {r} 0 0 1 {} {}" fill="none" stroke="{}" stroke-width="10"/>"#,
        num(cx - r),
        num(cy),
        num(end.0),
        num(end.1),
        ctx.colour(0),
        r = num(r)
    ))
    .raw(&format!(
        r#"<line class="gauge-needle" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2" data-angle="{angle}"/>"#,
        num(cx),
        num(cy),
        num(tip.0),
        num(tip.1),
        ctx.palette.text
    ))
    .text("gauge-label", (cx, cy + 12.0), 12.0, "middle", ctx.palette.text, &num(value));
    Ok(Drawn {
        graphic: svg.finish(),
        legend: Vec::new(),
    })
}

fn axes(ctx: &Ctx, svg: &mut Svg, plot: Plot, domain: (f64, f64), labels: &[String], values_horizontal: bool) {
    let axis = ctx.palette.axis;
    svg.line("axis", (plot.left, plot.bottom()), (plot.right(), plot.bottom()), axis, 1.0)
        .line("axis", (plot.left, plot.top), (plot.left, plot.bottom()), axis, 1.0);
    if !ctx.axis_labels {
        return;
    }
    let size = ctx.label_size();
    if values_horizontal {
        svg.text("axis-label", (plot.left, plot.bottom() + 10.0), size, "start", axis, &num(domain.0))
            .text("axis-label", (plot.right(), plot.bottom() + 10.0), size, "end", axis, &num(domain.1));
        if let (Some(first), Some(last)) = (labels.first(), labels.last()) {
            let n = labels.len();
            svg.text("axis-label", (plot.left - 4.0, plot.band_y(0, n)), size, "end", axis, first);
            if n > 1 {
                svg.text("axis-label", (plot.left - 4.0, plot.band_y(n - 1, n)), size, "end", axis, last);
            }
        }
    } else {
        svg.text("axis-label", (plot.left - 4.0, plot.bottom()), size, "end", axis, &num(domain.0))
            .text("axis-label", (plot.left - 4.0, plot.top + 4.0), size, "end", axis, &num(domain.1));
        if let (Some(first), Some(last)) = (labels.first(), labels.last()) {
            let n = labels.len();
            svg.text("axis-label", (plot.band_x(0, n), plot.bottom() + 10.0), size, "middle", axis, first);
            if n > 1 {
                svg.text("axis-label", (plot.band_x(n - 1, n), plot.bottom() + 10.0), size, "middle", axis, last);
            }
        }
    }
}

fn y_scale(plot: Plot, domain: (f64, f64), v: f64) -> f64 {
    scale_linear(domain.0, domain.1, plot.bottom(), plot.top, v).expect("zero_domain is never degenerate")
}

fn lines(ctx: &Ctx, data: &[MetricSeries], filled: bool) -> Result<Drawn, RenderError> {
    let data = ctx.non_empty(data)?;
    let plot = ctx.plot();
    let n = data.iter().map(|s| s.points.len()).max().unwrap_or(0);
    let primary = data[0].values();
    let ma = moving_average(&primary, BASELINE_WINDOW).map_err(|e| ctx.geometry(e))?;
    let domain = zero_domain(data.iter().flat_map(|s| s.points.iter().map(|(_, v)| v)));
    let labels: Vec<String> = ctx.categories(&data[0]).into_iter().map(|(l, _)| l).collect();
    let mut svg = ctx.svg();
    axes(ctx, &mut svg, plot, domain, &labels, false);
    for (si, series) in data.iter().enumerate() {
        let points: Vec<(f64, f64)> = series
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| (plot.band_x(i, n), y_scale(plot, domain, *v)))
            .collect();
        if filled {
            let base = y_scale(plot, domain, 0.0);
            let mut area = points.clone();
            area.push((points.last().expect("non-empty").0, base));
            area.push((points[0].0, base));
            svg.polygon("area", &area, &ctx.colour(si), 0.3);
        }
        svg.polyline("series-line", &points, &ctx.colour(si), false);
    }
    match ctx.baseline() {
        Baseline::None => {}
        Baseline::MovingAverage => {
            let points: Vec<(f64, f64)> = ma
                .iter()
                .enumerate()
                .map(|(i, v)| (plot.band_x(i, n), y_scale(plot, domain, *v)))
                .collect();
            svg.polyline("baseline-ma", &points, ctx.palette.text, true);
        }
        Baseline::Deviation => {
            let mean = primary.iter().sum::<f64>() / primary.len() as f64;
            let y = y_scale(plot, domain, mean);
            svg.raw(&format!(
                r#"<line class="baseline-mean" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="1" stroke-dasharray="4 3"/>"#,
                num(plot.left),
                num(plot.right()),
                ctx.palette.text,
                y = num(y)
            ));
        }
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: ctx.series_legend(data),
    })
}

fn bars(ctx: &Ctx, data: &[MetricSeries], horizontal: bool) -> Result<Drawn, RenderError> {
    let series = ctx.primary(data)?;
    let categories = ctx.categories(series);
    let raw: Vec<f64> = categories.iter().map(|(_, v)| *v).collect();
    let baseline = ctx.baseline();
    let values = match baseline {
        Baseline::Deviation => deviation(&raw).map_err(|e| ctx.geometry(e))?,
        _ => raw.clone(),
    };
    let domain = zero_domain(&values);
    let plot = ctx.plot();
    let n = values.len();
    let labels: Vec<String> = categories.iter().map(|(l, _)| l.clone()).collect();
    let mut svg = ctx.svg();
    axes(ctx, &mut svg, plot, domain, &labels, horizontal);
    let class = if horizontal { "bar" } else { "column" };
    for (i, v) in values.iter().enumerate() {
        let colour = ctx.colour(i);
        if horizontal {
            let band = plot.height / n as f64;
            let x0 = scale_linear(domain.0, domain.1, plot.left, plot.right(), 0.0).expect("non-degenerate");
            let x1 = scale_linear(domain.0, domain.1, plot.left, plot.right(), *v).expect("non-degenerate");
            svg.rect_with(
                class,
                (x0.min(x1), plot.top + band * (i as f64 + 0.1), (x1 - x0).abs(), band * 0.8),
                &colour,
                ("extent", (x1 - x0).abs()),
            );
        } else {
            let band = plot.width / n as f64;
            let y0 = y_scale(plot, domain, 0.0);
            let y1 = y_scale(plot, domain, *v);
            svg.rect_with(
                class,
                (plot.left + band * (i as f64 + 0.1), y0.min(y1), band * 0.8, (y1 - y0).abs()),
                &colour,
                ("extent", (y1 - y0).abs()),
            );
        }
    }
    if baseline == Baseline::MovingAverage {
        let ma = moving_average(&raw, BASELINE_WINDOW).map_err(|e| ctx.geometry(e))?;
        let points: Vec<(f64, f64)> = ma
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if horizontal {
                    let x = scale_linear(domain.0, domain.1, plot.left, plot.right(), *v).expect("non-degenerate");
                    (x, plot.band_y(i, n))
                } else {
                    (plot.band_x(i, n), y_scale(plot, domain, *v))
                }
            })
            .collect();
        svg.polyline("baseline-ma", &points, ctx.palette.text, true);
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: ctx.category_legend(&categories),
    })
}

fn word_cloud(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let series = ctx.primary(data)?;
    let mut words: Vec<(usize, String, f64)> = ctx
        .categories(series)
        .into_iter()
        .enumerate()
        .map(|(i, (label, weight))| (i, label, weight))
        .collect();
    words.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.1.cmp(&b.1)));
    let lo = words.iter().map(|w| w.2).fold(f64::INFINITY, f64::min);
    let hi = words.iter().map(|w| w.2).fold(f64::NEG_INFINITY, f64::max);
    let size_of = |weight: f64| scale_linear(lo, hi, 12.0, 32.0, weight).unwrap_or(22.0);

    // Greedy left-to-right rows.
    let limit = ctx.canvas.width - PAD;
    let mut rows: Vec<Vec<(usize, String, f64, f64)>> = vec![Vec::new()];
    let mut x = PAD;
    for (i, label, weight) in words {
        let size = size_of(weight);
        let width = 0.6 * size * label.chars().count() as f64 + PAD;
        if x + width > limit && x > PAD {
            rows.push(Vec::new());
            x = PAD;
        }
        rows.last_mut().expect("at least one row").push((i, label, size, x));
        x += width;
    }

    let mut svg = ctx.svg();
    let mut top = PAD;
    for row in &rows {
        let height = row.iter().map(|w| w.2).fold(0.0, f64::max) * 1.25;
        for (i, label, size, x) in row {
            svg.text("word", (*x, top + height / 2.0), *size, "start", &ctx.colour(*i), label);
        }
        top += height;
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: Vec::new(),
    })
}

fn slice_path(cx: f64, cy: f64, r: f64, inner: f64, start: f64, sweep: f64) -> String {
    if sweep >= 360.0 {
        let circle = |rad: f64, forward: bool| {
            let sweep_flag = if forward { 1 } else { 0 };
            format!(
                "M {x} {top} A {r} {r} 0 1 {f} {x} {bot} A {r} {r} 0 1 {f} {x} {top} Z",
                x = num(cx),
                top = num(cy - rad),
                bot = num(cy + rad),
                r = num(rad),
                f = sweep_flag
            )
        };
        return if inner > 0.0 {
            format!("{} {}", circle(r, true), circle(inner, false))
        } else {
            circle(r, true)
        };
    }
    let large = if sweep > 180.0 { 1 } else { 0 };
    let (x0, y0) = polar(cx, cy, r, start);
    let (x1, y1) = polar(cx, cy, r, start + sweep);
    if inner > 0.0 {
        let (ix1, iy1) = polar(cx, cy, inner, start + sweep);
        let (ix0, iy0) = polar(cx, cy, inner, start);
        format!(
            "M {} {} A {r} {r} 0 {large} 1 {} {} L {} {} A {ir} {ir} 0 {large} 0 {} {} Z",
            num(x0),
            num(y0),
            num(x1),
            num(y1),
            num(ix1),
            num(iy1),
            num(ix0),
            num(iy0),
            r = num(r),
            ir = num(inner)
        )
    } else {
        format!(
            "M {} {} L {} {} A {r} {r} 0 {large} 1 {} {} Z",
            num(cx),
            num(cy),
            num(x0),
            num(y0),
            num(x1),
            num(y1),
            r = num(r)
        )
    }
}

fn arcs(ctx: &Ctx, data: &[MetricSeries], ring: bool) -> Result<Drawn, RenderError> {
    let series = ctx.primary(data)?;
    let categories = ctx.categories(series);
    let values: Vec<f64> = categories.iter().map(|(_, v)| *v).collect();
    let angles = arc_angles(&values).map_err(|e| ctx.geometry(e))?;
    let (cx, cy) = (ctx.canvas.width / 2.0, ctx.canvas.height / 2.0);
    let r = (ctx.canvas.width.min(ctx.canvas.height) / 2.0 - PAD).max(4.0);
    let inner = if ring { r * 0.6 } else { 0.0 };
    let class = if ring { "ring-slice" } else { "pie-slice" };
    let mut svg = ctx.svg();
    let mut start = 0.0;
    for (i, sweep) in angles.iter().enumerate() {
        let d = slice_path(cx, cy, r, inner, start, *sweep);
        if ring && *sweep >= 360.0 {
            svg.raw(&format!(
                r#"<path class="{class}" d="{d}" fill="{}" fill-rule="evenodd" data-angle="{sweep}"/>"#,
                ctx.colour(i)
            ));
        } else {
            svg.path_with(class, &d, &ctx.colour(i), ("angle", *sweep));
        }
        start += sweep;
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: ctx.category_legend(&categories),
    })
}

fn map(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let series = data.first().ok_or_else(|| ctx.missing())?;
    let (w, h) = (ctx.canvas.width, ctx.canvas.height);
    let mut svg = ctx.svg();
    svg.raw(&format!(
        r#"<rect class="map-placeholder" x="{p}" y="{p}" width="{}" height="{}" fill="none" stroke="{}" stroke-dasharray="6 4"/>"#,
        num((w - 2.0 * PAD).max(0.0)),
        num((h - 2.0 * PAD).max(0.0)),
        ctx.palette.axis,
        p = num(PAD)
    ))
    .text("map-label", (w / 2.0, h / 2.0 - 10.0), 14.0, "middle", ctx.palette.text, &format!("Map: {}", series.name))
    .text(
        "map-count",
        (w / 2.0, h / 2.0 + 10.0),
        12.0,
        "middle",
        ctx.palette.axis,
        &format!("{} values", series.points.len()),
    );
    Ok(Drawn {
        graphic: svg.finish(),
        legend: Vec::new(),
    })
}

fn composite(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let data = ctx.non_empty(data)?;
    let plot = ctx.plot();
    let columns = data[0].values();
    let n = columns.len();
    let domain = zero_domain(data.iter().flat_map(|s| s.points.iter().map(|(_, v)| v)));
    let labels: Vec<String> = ctx.categories(&data[0]).into_iter().map(|(l, _)| l).collect();
    let mut svg = ctx.svg();
    axes(ctx, &mut svg, plot, domain, &labels, false);
    let band = plot.width / n as f64;
    let y0 = y_scale(plot, domain, 0.0);
    let colour = ctx.colour(0);
    for (i, v) in columns.iter().enumerate() {
        let y1 = y_scale(plot, domain, *v);
        svg.rect_with(
            "column",
            (plot.left + band * (i as f64 + 0.1), y0.min(y1), band * 0.8, (y1 - y0).abs()),
            &colour,
            ("extent", (y1 - y0).abs()),
        );
    }
    for (si, series) in data.iter().enumerate().skip(1) {
        let points: Vec<(f64, f64)> = series
            .values()
            .iter()
            .take(n)
            .enumerate()
            .map(|(i, v)| (plot.band_x(i, n), y_scale(plot, domain, *v)))
            .collect();
        svg.polyline("series-line", &points, &ctx.colour(si), false);
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: ctx.series_legend(data),
    })
}

fn scatter(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let data = ctx.non_empty(data)?;
    let plot = ctx.plot();
    let domain = zero_domain(data.iter().flat_map(|s| s.points.iter().map(|(_, v)| v)));
    let times: Vec<i64> = data
        .iter()
        .flat_map(|s| s.points.iter())
        .filter_map(|(k, _)| match k {
            PointKey::Time(t) => Some(*t),
            PointKey::Label(_) => None,
        })
        .collect();
    let t_range = (times.iter().min().copied(), times.iter().max().copied());
    let n = data.iter().map(|s| s.points.len()).max().unwrap_or(0);
    let labels: Vec<String> = ctx.categories(&data[0]).into_iter().map(|(l, _)| l).collect();
    let mut svg = ctx.svg();
    axes(ctx, &mut svg, plot, domain, &labels, false);
    for (si, series) in data.iter().enumerate() {
        let colour = ctx.colour(si);
        for (i, (key, v)) in series.points.iter().enumerate() {
            let x = match (series.kind, key, t_range) {
                (SeriesKind::TimeSeries, PointKey::Time(t), (Some(lo), Some(hi))) => {
                    scale_linear(lo as f64, hi as f64, plot.left, plot.right(), *t as f64)
                        .unwrap_or(plot.left + plot.width / 2.0)
                }
                _ => plot.band_x(i, n),
            };
            svg.circle("point", (x, y_scale(plot, domain, *v)), 3.0, &colour);
        }
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: ctx.series_legend(data),
    })
}

fn radial_tree(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let series = ctx.primary(data)?;
    let leaves = ctx.categories(series);
    let (cx, cy) = (ctx.canvas.width / 2.0, ctx.canvas.height / 2.0);
    let radius = (ctx.canvas.width.min(ctx.canvas.height) / 2.0 - 20.0).max(4.0);
    let max = leaves.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let n = leaves.len();
    let mut svg = ctx.svg();
    for (i, (label, v)) in leaves.iter().enumerate() {
        let angle = 360.0 * i as f64 / n as f64;
        let leaf = polar(cx, cy, radius, angle);
        let size = if max > 0.0 { 3.0 + 5.0 * v.abs() / max } else { 3.0 };
        let text_at = polar(cx, cy, radius + 12.0, angle);
        svg.line("tree-edge", (cx, cy), leaf, ctx.palette.axis, 1.0)
            .circle("tree-leaf", leaf, size, &ctx.colour(i))
            .text("tree-label", text_at, 9.0, "middle", ctx.palette.text, label);
    }
    svg.circle("tree-root", (cx, cy), 6.0, ctx.palette.text);
    Ok(Drawn {
        graphic: svg.finish(),
        legend: Vec::new(),
    })
}

fn treemap(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let series = ctx.primary(data)?;
    let categories = ctx.categories(series);
    let values: Vec<f64> = categories.iter().map(|(_, v)| *v).collect();
    let area = Rect::new(0.0, 0.0, ctx.canvas.width, ctx.canvas.height);
    let tiles = treemap_slice_dice(&values, area, 0).map_err(|e| ctx.geometry(e))?;
    let mut svg = ctx.svg();
    for (i, (tile, (label, _))) in tiles.iter().zip(&categories).enumerate() {
        svg.rect_with(
            "treemap-tile",
            (tile.x, tile.y, tile.w, tile.h),
            &ctx.colour(i),
            ("area", tile.area()),
        )
        .text(
            "tile-label",
            (tile.x + tile.w / 2.0, tile.y + tile.h / 2.0),
            10.0,
            "middle",
            ctx.palette.background,
            label,
        );
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: ctx.category_legend(&categories),
    })
}

fn bullet(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let series = ctx.primary(data)?;
    let values = series.values();
    let measure = *values.last().expect("non-empty");
    let target = values.iter().sum::<f64>() / values.len() as f64;
    let top = values.iter().copied().fold(target.max(0.0), f64::max) * 1.1;
    let domain = (0.0, if top > 0.0 { top } else { 1.0 });
    let plot = ctx.plot();
    let x = |v: f64| scale_linear(domain.0, domain.1, plot.left, plot.right(), v).expect("non-degenerate");
    let mut svg = ctx.svg();
    for (lo, hi, opacity) in [(0.0, 0.5, 0.35), (0.5, 0.75, 0.25), (0.75, 1.0, 0.15)] {
        svg.raw(&format!(
            r#"<rect class="bullet-band" x="{}" y="{}" width="{}" height="{}" fill="{}" fill-opacity="{opacity}"/>"#,
            num(x(domain.1 * lo)),
            num(plot.top),
            num(x(domain.1 * hi) - x(domain.1 * lo)),
            num(plot.height),
            ctx.palette.axis
        ));
    }
    let x0 = x(0.0);
    let x1 = x(measure.max(0.0));
    svg.rect_with(
        "bullet-measure",
        (x0, plot.top + plot.height / 3.0, x1 - x0, plot.height / 3.0),
        &ctx.colour(0),
        ("extent", x1 - x0),
    )
    .line(
        "bullet-target",
        (x(target), plot.top + plot.height * 0.15),
        (x(target), plot.top + plot.height * 0.85),
        ctx.palette.text,
        2.0,
    );
    if ctx.axis_labels {
        svg.text("axis-label", (plot.left, plot.bottom() + 10.0), ctx.label_size(), "start", ctx.palette.axis, "0")
            .text(
                "axis-label",
                (plot.right(), plot.bottom() + 10.0),
                ctx.label_size(),
                "end",
                ctx.palette.axis,
                &num(domain.1),
            );
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: Vec::new(),
    })
}

/// Links are categorical points labelled `source->target`; a label without
/// an arrow is a flow from the series itself to that label.
fn sankey(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let series = ctx.primary(data)?;
    let mut nodes: Vec<String> = Vec::new();
    let node_index = |name: &str, nodes: &mut Vec<String>| -> usize {
        nodes.iter().position(|n| n == name).unwrap_or_else(|| {
            nodes.push(name.to_string());
            nodes.len() - 1
        })
    };
    let mut links: Vec<(usize, usize, f64)> = Vec::new();
    for (label, value) in ctx.categories(series) {
        let (src, dst) = match label.split_once("->") {
            Some((a, b)) => (a.trim().to_string(), b.trim().to_string()),
            None => (series.name.clone(), label),
        };
        let s = node_index(&src, &mut nodes);
        let d = node_index(&dst, &mut nodes);
        if s != d {
            links.push((s, d, value.max(0.0)));
        }
    }

    // Longest-path layering; capped so cycles cannot loop forever.
    let n = nodes.len();
    let mut depth = vec![0usize; n];
    for _ in 0..n {
        let mut changed = false;
        for &(s, d, _) in &links {
            if depth[d] < depth[s] + 1 && depth[s] + 1 < n {
                depth[d] = depth[s] + 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut inflow = vec![0.0; n];
    let mut outflow = vec![0.0; n];
    for &(s, d, v) in &links {
        outflow[s] += v;
        inflow[d] += v;
    }
    let size: Vec<f64> = (0..n).map(|i| f64::max(inflow[i], outflow[i])).collect();
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let mut columns: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, d) in depth.iter().enumerate() {
        columns.entry(*d).or_default().push(i);
    }

    const NODE_W: f64 = 10.0;
    const GAP: f64 = 8.0;
    let plot = Plot {
        left: PAD,
        top: PAD,
        width: (ctx.canvas.width - 2.0 * PAD).max(NODE_W),
        height: (ctx.canvas.height - 2.0 * PAD).max(1.0),
    };
    let scale = columns
        .values()
        .map(|col| {
            let total: f64 = col.iter().map(|&i| size[i]).sum();
            let room = plot.height - GAP * (col.len() as f64 - 1.0);
            if total > 0.0 { room.max(1.0) / total } else { f64::INFINITY }
        })
        .fold(f64::INFINITY, f64::min);
    let scale = if scale.is_finite() { scale } else { 0.0 };

    let mut node_pos = vec![(0.0, 0.0); n];
    for (d, col) in &columns {
        let x = plot.left + (plot.width - NODE_W) * *d as f64 / max_depth.max(1) as f64;
        let mut y = plot.top;
        for &i in col {
            node_pos[i] = (x, y);
            y += size[i] * scale + GAP;
        }
    }

    let mut svg = ctx.svg();
    let mut out_offset = vec![0.0; n];
    let mut in_offset = vec![0.0; n];
    for &(s, d, v) in &links {
        let width = v * scale;
        let (sx, sy) = node_pos[s];
        let (tx, ty) = node_pos[d];
        let y_start = sy + out_offset[s] + width / 2.0;
        let y_end = ty + in_offset[d] + width / 2.0;
        out_offset[s] += width;
        in_offset[d] += width;
        let x_start = sx + NODE_W;
        let mid = (x_start + tx) / 2.0;
        svg.raw(&format!(
            r#"<path class="sankey-link" d="M {} {} C {} {} {} {} {} {}" fill="none" stroke="{}" stroke-opacity="0.4" stroke-width="{}" data-value="{v}"/>"#,
            num(x_start),
            num(y_start),
            num(mid),
            num(y_start),
            num(mid),
            num(y_end),
            num(tx),
            num(y_end),
            ctx.colour(s),
            num(width)
        ));
    }
    for (i, name) in nodes.iter().enumerate() {
        let (x, y) = node_pos[i];
        svg.rect("sankey-node", x, y, NODE_W, size[i] * scale, &ctx.colour(i));
        let (tx, anchor) = if depth[i] == max_depth && max_depth > 0 {
            (x - 4.0, "end")
        } else {
            (x + NODE_W + 4.0, "start")
        };
        svg.text("sankey-label", (tx, y + size[i] * scale / 2.0), 9.0, anchor, ctx.palette.text, name);
    }
    Ok(Drawn {
        graphic: svg.finish(),
        legend: Vec::new(),
    })
}

fn radar(ctx: &Ctx, data: &[MetricSeries]) -> Result<Drawn, RenderError> {
    let series = ctx.primary(data)?;
    let axes = ctx.categories(series);
    let n = axes.len();
    let (cx, cy) = (ctx.canvas.width / 2.0, ctx.canvas.height / 2.0);
    let radius = (ctx.canvas.width.min(ctx.canvas.height) / 2.0 - 16.0).max(4.0);
    let max = axes.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let max = if max > 0.0 { max } else { 1.0 };
    let mut svg = ctx.svg();
    let mut polygon = Vec::with_capacity(n);
    for (i, (label, v)) in axes.iter().enumerate() {
        let angle = 360.0 * i as f64 / n as f64;
        let r = scale_linear(0.0, max, 0.0, radius, v.max(0.0)).expect("non-degenerate");
        svg.line("radar-spoke", (cx, cy), polar(cx, cy, radius, angle), ctx.palette.axis, 1.0);
        if ctx.axis_labels {
            svg.text("axis-label", polar(cx, cy, radius + 8.0, angle), 9.0, "middle", ctx.palette.axis, label);
        }
        polygon.push(polar(cx, cy, r, angle));
    }
    svg.polygon("radar-area", &polygon, &ctx.colour(0), 0.35);
    let mut closed = polygon.clone();
    closed.push(polygon[0]);
    svg.polyline("radar-outline", &closed, &ctx.colour(0), false);
    Ok(Drawn {
        graphic: svg.finish(),
        legend: ctx.series_legend(&data[..1]),
    })
}

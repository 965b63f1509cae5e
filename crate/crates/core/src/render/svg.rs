//! Minimal SVG markup writer with deterministic number formatting.

use std::fmt::Write;

/// Coordinates are written with at most three decimals and no trailing zeros.
pub fn num(v: f64) -> String {
    let rounded = (v * 1000.0).round() / 1000.0;
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    let mut s = format!("{rounded:.3}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

pub struct Svg {
    buf: String,
}

impl Svg {
    pub fn new(class: &str, width: f64, height: f64) -> Self {
        let mut buf = String::new();
        write!(
            buf,
            r#"<svg class="widget-graphic {class}" viewBox="0 0 {w} {h}" width="{w}" height="{h}" role="img">"#,
            w = num(width),
            h = num(height)
        )
        .unwrap();
        Svg { buf }
    }

    pub fn rect(&mut self, class: &str, x: f64, y: f64, w: f64, h: f64, fill: &str) -> &mut Self {
        write!(
            self.buf,
            r#"<rect class="{class}" x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
            num(x),
            num(y),
            num(w),
            num(h)
        )
        .unwrap();
        self
    }

    /// Rectangle annotated with a full-precision `data-*` attribute.
    pub fn rect_with(
        &mut self,
        class: &str,
        (x, y, w, h): (f64, f64, f64, f64),
        fill: &str,
        data: (&str, f64),
    ) -> &mut Self {
        write!(
            self.buf,
            r#"<rect class="{class}" x="{}" y="{}" width="{}" height="{}" fill="{fill}" data-{}="{}"/>"#,
            num(x),
            num(y),
            num(w),
            num(h),
            data.0,
            data.1
        )
        .unwrap();
        self
    }

    pub fn path(&mut self, class: &str, d: &str, fill: &str, stroke: Option<(&str, f64)>) -> &mut Self {
        write!(self.buf, r#"<path class="{class}" d="{d}" fill="{fill}""#).unwrap();
        if let Some((colour, width)) = stroke {
            write!(self.buf, r#" stroke="{colour}" stroke-width="{}""#, num(width)).unwrap();
        }
        self.buf.push_str("/>");
        self
    }

    pub fn path_with(&mut self, class: &str, d: &str, fill: &str, data: (&str, f64)) -> &mut Self {
        write!(
            self.buf,
            r#"<path class="{class}" d="{d}" fill="{fill}" data-{}="{}"/>"#,
            data.0, data.1
        )
        .unwrap();
        self
    }

    pub fn line(&mut self, class: &str, (x1, y1): (f64, f64), (x2, y2): (f64, f64), stroke: &str, width: f64) -> &mut Self {
        write!(
            self.buf,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{}"/>"#,
            num(x1),
            num(y1),
            num(x2),
            num(y2),
            num(width)
        )
        .unwrap();
        self
    }

    pub fn polyline(&mut self, class: &str, points: &[(f64, f64)], stroke: &str, dashed: bool) -> &mut Self {
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
        write!(
            self.buf,
            r#"<polyline class="{class}" points="{}" fill="none" stroke="{stroke}" stroke-width="2""#,
            pts.join(" ")
        )
        .unwrap();
        if dashed {
            self.buf.push_str(r#" stroke-dasharray="4 3""#);
        }
        self.buf.push_str("/>");
        self
    }

    pub fn polygon(&mut self, class: &str, points: &[(f64, f64)], fill: &str, opacity: f64) -> &mut Self {
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
        write!(
            self.buf,
            r#"<polygon class="{class}" points="{}" fill="{fill}" fill-opacity="{}"/>"#,
            pts.join(" "),
            num(opacity)
        )
        .unwrap();
        self
    }

    pub fn circle(&mut self, class: &str, (cx, cy): (f64, f64), r: f64, fill: &str) -> &mut Self {
        write!(
            self.buf,
            r#"<circle class="{class}" cx="{}" cy="{}" r="{}" fill="{fill}"/>"#,
            num(cx),
            num(cy),
            num(r)
        )
        .unwrap();
        self
    }

    pub fn text(&mut self, class: &str, (x, y): (f64, f64), size: f64, anchor: &str, fill: &str, content: &str) -> &mut Self {
        write!(
            self.buf,
            r#"<text class="{class}" x="{}" y="{}" font-size="{}" text-anchor="{anchor}" dominant-baseline="middle" fill="{fill}">{}</text>"#,
            num(x),
            num(y),
            num(size),
            escape(content)
        )
        .unwrap();
        self
    }

    pub fn raw(&mut self, markup: &str) -> &mut Self {
        self.buf.push_str(markup);
        self
    }

    pub fn finish(mut self) -> String {
        self.buf.push_str("</svg>");
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0001), "0");
        assert_eq!(num(12.5), "12.5");
        assert_eq!(num(1.23456), "1.235");
        assert_eq!(num(100.0), "100");
        assert_eq!(num(-3.1), "-3.1");
    }

    #[test]
    fn escaping() {
        assert_eq!(escape(r#"<a & "b">"#), "&lt;a &amp; &quot;b&quot;&gt;");
    }
}

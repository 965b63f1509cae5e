use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::*;

/// Identifier of one structural rule. Enumerations (`theme`, `vistype`,
/// interaction names) and non-negativity of coordinates are enforced by the
/// decoder, so they have no rule here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    EmptyId,
    NoPages,
    DuplicatePageId,
    EmptyPageName,
    DuplicateWidgetId,
    LayoutExtent,
    LayoutBounds,
    EmptyChildren,
    BadColour,
    BadFontSize,
    MissingDetail,
    DanglingTarget,
    Overlap,
}

impl Rule {
    pub const ALL: [Rule; 13] = [
        Rule::EmptyId,
        Rule::NoPages,
        Rule::DuplicatePageId,
        Rule::EmptyPageName,
        Rule::DuplicateWidgetId,
        Rule::LayoutExtent,
        Rule::LayoutBounds,
        Rule::EmptyChildren,
        Rule::BadColour,
        Rule::BadFontSize,
        Rule::MissingDetail,
        Rule::DanglingTarget,
        Rule::Overlap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::EmptyId => "EMPTY_ID",
            Rule::NoPages => "NO_PAGES",
            Rule::DuplicatePageId => "DUPLICATE_PAGE_ID",
            Rule::EmptyPageName => "EMPTY_PAGE_NAME",
            Rule::DuplicateWidgetId => "DUPLICATE_WIDGET_ID",
            Rule::LayoutExtent => "LAYOUT_EXTENT",
            Rule::LayoutBounds => "LAYOUT_BOUNDS",
            Rule::EmptyChildren => "EMPTY_CHILDREN",
            Rule::BadColour => "BAD_COLOUR",
            Rule::BadFontSize => "BAD_FONT_SIZE",
            Rule::MissingDetail => "MISSING_DETAIL",
            Rule::DanglingTarget => "DANGLING_TARGET",
            Rule::Overlap => "OVERLAP",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.rule, self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn rules(&self) -> BTreeSet<Rule> {
        self.violations.iter().map(|v| v.rule).collect()
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.violations.iter().filter(|v| v.rule == rule).count()
    }

    fn push(&mut self, rule: Rule, path: String, message: impl Into<String>) {
        self.violations.push(Violation {
            rule,
            path,
            message: message.into(),
        });
    }
}

pub fn validate_model(model: &DashboardModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    if model.id.is_empty() {
        report.push(Rule::EmptyId, "id".into(), "dashboard id is empty");
    }
    if model.pages.is_empty() {
        report.push(Rule::NoPages, "pages".into(), "a dashboard needs at least one page");
    }

    let page_ids: BTreeSet<&str> = model.pages.iter().map(|p| p.id.as_str()).collect();
    let mut seen_pages: HashMap<&str, usize> = HashMap::new();
    let mut seen_widgets: HashMap<&str, String> = HashMap::new();

    for (pi, page) in model.pages.iter().enumerate() {
        let ppath = format!("pages[{pi}]");
        if page.id.is_empty() {
            report.push(Rule::EmptyId, format!("{ppath}.id"), "page id is empty");
        }
        if let Some(first) = seen_pages.insert(&page.id, pi) {
            report.push(
                Rule::DuplicatePageId,
                format!("{ppath}.id"),
                format!("page id `{}` already used by pages[{first}]", page.id),
            );
        }
        if page.name.trim().is_empty() {
            report.push(Rule::EmptyPageName, format!("{ppath}.name"), "page name labels the menu and must not be empty");
        }

        for (wi, widget) in page.widgets.iter().enumerate() {
            let wpath = format!("{ppath}.widgets[{wi}]");
            if widget.id.is_empty() {
                report.push(Rule::EmptyId, format!("{wpath}.id"), "widget id is empty");
            }
            if let Some(first) = seen_widgets.insert(&widget.id, wpath.clone()) {
                report.push(
                    Rule::DuplicateWidgetId,
                    format!("{wpath}.id"),
                    format!("widget id `{}` already used by {first}", widget.id),
                );
            }
            check_widget(widget, &wpath, &page_ids, &mut report);
        }

        for (i, j) in overlapping_pairs(&page.widgets) {
            let (a, b) = (&page.widgets[i], &page.widgets[j]);
            report.push(
                Rule::Overlap,
                format!("{ppath}.widgets[{j}].layout"),
                format!("widgets `{}` {} and `{}` {} overlap", a.id, a.layout, b.id, b.layout),
            );
        }
    }
    report
}

fn check_widget(widget: &Widget, wpath: &str, page_ids: &BTreeSet<&str>, report: &mut ValidationReport) {
    let rect = widget.layout;
    if rect.w < 1 || rect.h < 1 {
        report.push(
            Rule::LayoutExtent,
            format!("{wpath}.layout"),
            format!("extent {}x{} must be at least 1x1", rect.w, rect.h),
        );
    }
    if rect.right() > GRID_COLUMNS {
        report.push(
            Rule::LayoutBounds,
            format!("{wpath}.layout"),
            format!("x + w = {} exceeds {GRID_COLUMNS} columns", rect.right()),
        );
    }
    if widget.vistype().is_arc() {
        if let Some(children) = &widget.properties.childrenname {
            if children.is_empty() {
                report.push(
                    Rule::EmptyChildren,
                    format!("{wpath}.properties.childrenname"),
                    "category list must not be empty",
                );
            }
        }
    }
    if let Some(config) = &widget.visconfig {
        for (ci, colour) in config.colour.iter().flatten().enumerate() {
            if !is_hex_colour(colour) {
                report.push(
                    Rule::BadColour,
                    format!("{wpath}.visconfig.colour[{ci}]"),
                    format!("`{colour}` is not a #RRGGBB colour"),
                );
            }
        }
        if let Some(size) = config.font_size {
            if !(size > 0.0 && size.is_finite()) {
                report.push(
                    Rule::BadFontSize,
                    format!("{wpath}.visconfig.fontSize"),
                    format!("font size {size} must be positive"),
                );
            }
        }
    }
    if let Some(spec) = &widget.interaction {
        match &spec.detail {
            None if spec.interactions.contains(&InteractionType::DetailOnDemand) => report.push(
                Rule::MissingDetail,
                format!("{wpath}.interaction.detail"),
                "detail on demand requires a detail target",
            ),
            Some(detail) if !page_ids.contains(detail.target.as_str()) => report.push(
                Rule::DanglingTarget,
                format!("{wpath}.interaction.detail.target"),
                format!("target page `{}` does not exist", detail.target),
            ),
            _ => {}
        }
    }
}

/// All index pairs `(i, j)`, `i < j`, whose rectangles intersect.
/// Index pairs `(i, j)`, `i < j`, of widgets whose rectangles intersect.
pub fn overlapping_pairs(widgets: &[Widget]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, a) in widgets.iter().enumerate() {
        for (j, b) in widgets.iter().enumerate().skip(i + 1) {
            if a.layout.intersects(&b.layout) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sample, SAMPLE};

    #[test]
    fn sample_is_valid() {
        assert!(validate_model(&sample()).is_valid());
    }

    #[test]
    fn identical_rectangles_overlap_once() {
        let mut m = DashboardModel::minimal("d", "d");
        m.pages[0].widgets = vec![
            Widget::new("a", VisType::Table, LayoutRect::new(0, 0, 2, 2)),
            Widget::new("b", VisType::Table, LayoutRect::new(0, 0, 2, 2)),
        ];
        let report = validate_model(&m);
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.rule, Rule::Overlap);
        assert!(v.message.contains("`a`") && v.message.contains("`b`"));
    }

    #[test]
    fn dangling_detail_target() {
        let text = SAMPLE.replace(r#""target": "0""#, r#""target": "99""#);
        let report = validate_model(&parse_model(&text).unwrap());
        assert_eq!(report.rules(), BTreeSet::from([Rule::DanglingTarget]));
        assert_eq!(report.violations[0].path, "pages[0].widgets[1].interaction.detail.target");
    }

    #[test]
    fn detail_on_demand_needs_a_detail() {
        let mut m = sample();
        m.pages[0].widgets[1].interaction.as_mut().unwrap().detail = None;
        assert_eq!(validate_model(&m).rules(), BTreeSet::from([Rule::MissingDetail]));
    }

    #[test]
    fn each_rule_fires_alone() {
        let base = sample();
        type Mutation = Box<dyn Fn(&mut DashboardModel)>;
        let cases: Vec<(Rule, Mutation)> = vec![
            (Rule::EmptyId, Box::new(|m| m.id.clear())),
            (Rule::NoPages, Box::new(|m| m.pages.clear())),
            (
                Rule::DuplicatePageId,
                Box::new(|m| {
                    let mut p = m.pages[0].clone();
                    p.widgets.clear();
                    p.name = "Other".into();
                    m.pages.push(p);
                }),
            ),
            (Rule::EmptyPageName, Box::new(|m| m.pages[0].name.clear())),
            (
                Rule::DuplicateWidgetId,
                Box::new(|m| {
                    m.pages[0].widgets[1].id = "p0-i0".into();
                }),
            ),
            (Rule::LayoutExtent, Box::new(|m| m.pages[0].widgets[0].layout.h = 0)),
            (Rule::LayoutBounds, Box::new(|m| m.pages[0].widgets[1].layout.x = 9)),
            (
                Rule::EmptyChildren,
                Box::new(|m| m.pages[0].widgets[1].properties.childrenname = Some(vec![])),
            ),
            (
                Rule::BadColour,
                Box::new(|m| {
                    m.pages[0].widgets[1].visconfig_mut().colour = Some(vec!["red".into()]);
                }),
            ),
            (
                Rule::BadFontSize,
                Box::new(|m| m.pages[0].widgets[1].visconfig_mut().font_size = Some(0.0)),
            ),
            (
                Rule::MissingDetail,
                Box::new(|m| m.pages[0].widgets[1].interaction.as_mut().unwrap().detail = None),
            ),
            (
                Rule::DanglingTarget,
                Box::new(|m| {
                    m.pages[0].widgets[1]
                        .interaction
                        .as_mut()
                        .unwrap()
                        .detail
                        .as_mut()
                        .unwrap()
                        .target = "nope".into();
                }),
            ),
            (Rule::Overlap, Box::new(|m| m.pages[0].widgets[1].layout.y = 1)),
        ];
        assert_eq!(cases.len(), Rule::ALL.len());
        for (rule, inject) in cases {
            let mut m = base.clone();
            inject(&mut m);
            let report = validate_model(&m);
            assert_eq!(report.rules(), BTreeSet::from([rule]), "{rule}: {report:?}");
        }
    }
}

//! Design-decision extraction and reproduction rates.
//!
//! Keys are deliberately independent across categories: a widget's vistype
//! only appears in its major key, its rectangle and colours only in minor
//! keys, and its interactions only in interaction keys. Changing one aspect
//! of a replica therefore moves exactly one category.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::layout::compact;
use crate::model::DashboardModel;
use crate::par::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Category {
    Major,
    Minor,
    Interaction,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Major, Category::Minor, Category::Interaction];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DesignDecision {
    pub category: Category,
    pub key: String,
    pub source_path: String,
}

/// Decisions in model order: dashboard-level first, then page by page.
pub fn extract_decisions(model: &DashboardModel) -> Vec<DesignDecision> {
    let mut out = Vec::new();
    let mut push = |category, key: String, source_path: String| {
        out.push(DesignDecision {
            category,
            key,
            source_path,
        })
    };
    push(Category::Minor, format!("theme={}", model.theme.as_str()), "theme".into());
    push(Category::Minor, format!("dashboardName={}", model.name), "name".into());

    for (p, page) in model.pages.iter().enumerate() {
        push(Category::Minor, format!("pageName={}", page.name), format!("pages[{p}].name"));
        let compacted = compact(page);
        for (i, (widget, normalized)) in page.widgets.iter().zip(&compacted.widgets).enumerate() {
            let path = format!("pages[{p}].widgets[{i}]");
            let metrics = widget.metric_ids();
            let major = if metrics.is_empty() {
                widget.vistype().wire_name().to_string()
            } else {
                format!("{}@{}", widget.vistype().wire_name(), metrics.join(","))
            };
            push(Category::Major, major, format!("{path}.properties.vistype"));

            let r = normalized.layout;
            push(
                Category::Minor,
                format!("layout={},{},{},{}", r.x, r.y, r.w, r.h),
                format!("{path}.layout"),
            );
            if let Some(colours) = widget.visconfig.as_ref().and_then(|c| c.colour.as_ref()) {
                if !colours.is_empty() {
                    let list: Vec<String> = colours.iter().map(|c| c.to_ascii_lowercase()).collect();
                    push(
                        Category::Minor,
                        format!("colour={}", list.join(",")),
                        format!("{path}.visconfig.colour"),
                    );
                }
            }
            if let Some(name) = &widget.name {
                push(Category::Minor, format!("widgetName={name}"), format!("{path}.name"));
            }

            if let Some(spec) = &widget.interaction {
                for kind in &spec.interactions {
                    let key = match (kind, &spec.detail) {
                        (crate::model::InteractionType::DetailOnDemand, Some(d)) => {
                            format!("{}->{}", kind.key(), d.target)
                        }
                        _ => kind.key().to_string(),
                    };
                    push(Category::Interaction, key, format!("{path}.interaction.interactions"));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CategoryReport {
    pub original_count: usize,
    pub matched_count: usize,
    pub rate: f64,
}

impl CategoryReport {
    fn new(original_count: usize, matched_count: usize) -> Self {
        let rate = if original_count == 0 {
            1.0
        } else {
            matched_count as f64 / original_count as f64
        };
        CategoryReport {
            original_count,
            matched_count,
            rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecisionReport {
    pub major: CategoryReport,
    pub minor: CategoryReport,
    pub interaction: CategoryReport,
}

impl DecisionReport {
    pub fn get(&self, category: Category) -> &CategoryReport {
        match category {
            Category::Major => &self.major,
            Category::Minor => &self.minor,
            Category::Interaction => &self.interaction,
        }
    }

    /// Matched decisions over original decisions, all categories pooled.
    pub fn overall_rate(&self) -> f64 {
        let original: usize = Category::ALL.iter().map(|c| self.get(*c).original_count).sum();
        let matched: usize = Category::ALL.iter().map(|c| self.get(*c).matched_count).sum();
        if original == 0 {
            1.0
        } else {
            matched as f64 / original as f64
        }
    }
}

impl fmt::Display for DecisionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, c) in [("major", &self.major), ("minor", &self.minor), ("interaction", &self.interaction)] {
            writeln!(f, "{label:<12} {:>4}/{:<4} {:.3}", c.matched_count, c.original_count, c.rate)?;
        }
        write!(f, "{:<12} {:>14.3}", "overall", self.overall_rate())
    }
}

fn counts(decisions: &[DesignDecision]) -> BTreeMap<(Category, &str), usize> {
    let mut map = BTreeMap::new();
    for d in decisions {
        *map.entry((d.category, d.key.as_str())).or_insert(0) += 1;
    }
    map
}

/// Match by exact key within each category, each replica decision used at
/// most once. With exact keys the greedy matching is maximal and equals
/// the multiset intersection size.
pub fn match_decisions(original: &[DesignDecision], replica: &[DesignDecision]) -> DecisionReport {
    let orig = counts(original);
    let repl = counts(replica);
    let mut total = BTreeMap::new();
    let mut matched = BTreeMap::new();
    for (&(category, key), &n) in &orig {
        *total.entry(category).or_insert(0) += n;
        let m = repl.get(&(category, key)).copied().unwrap_or(0).min(n);
        *matched.entry(category).or_insert(0) += m;
    }
    let report = |c| CategoryReport::new(total.get(&c).copied().unwrap_or(0), matched.get(&c).copied().unwrap_or(0));
    DecisionReport {
        major: report(Category::Major),
        minor: report(Category::Minor),
        interaction: report(Category::Interaction),
    }
}

pub fn diff(original: &DashboardModel, replica: &DashboardModel) -> DecisionReport {
    match_decisions(&extract_decisions(original), &extract_decisions(replica))
}

/// Compare many (original, replica) pairs.
pub fn diff_all(pairs: &[(DashboardModel, DashboardModel)], exec: Exec) -> Vec<DecisionReport> {
    exec.map(pairs, |(a, b)| diff(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sample;
    use crate::model::{InteractionSpec, InteractionType};

    fn count(ds: &[DesignDecision], c: Category) -> usize {
        ds.iter().filter(|d| d.category == c).count()
    }

    #[test]
    fn sample_decisions() {
        let ds = extract_decisions(&sample());
        assert_eq!(count(&ds, Category::Major), 2);
        // theme, dashboard name, page name, two layouts, one colour list, one widget name
        assert_eq!(count(&ds, Category::Minor), 7);
        assert_eq!(count(&ds, Category::Interaction), 1);
        assert!(ds.iter().any(|d| d.key == "detailOnDemand->0"));
        assert!(ds.iter().any(|d| d.key == "colour=#82b365,#9673a6,#6c8ec0"));
    }

    #[test]
    fn minimal_model_decisions() {
        let ds = extract_decisions(&DashboardModel::minimal("d", "D"));
        assert_eq!(count(&ds, Category::Major), 0);
        assert_eq!(count(&ds, Category::Minor), 3);
        assert_eq!(count(&ds, Category::Interaction), 0);
        let r = diff(&DashboardModel::minimal("d", "D"), &DashboardModel::minimal("d", "D"));
        assert_eq!(r.interaction.rate, 1.0);
    }

    #[test]
    fn two_interactions_per_widget() {
        let mut m = sample();
        for w in &mut m.pages[0].widgets {
            w.interaction = Some(InteractionSpec::new([InteractionType::Filter, InteractionType::Zoom]));
        }
        assert_eq!(count(&extract_decisions(&m), Category::Interaction), 4);
    }

    #[test]
    fn identity_and_removal() {
        let m = sample();
        let r = diff(&m, &m);
        for c in Category::ALL {
            assert_eq!(r.get(c).rate, 1.0);
        }
        let mut replica = m.clone();
        replica.pages[0].widgets[1].interaction = None;
        let r = diff(&m, &replica);
        assert_eq!(r.interaction.rate, 0.0);
        assert_eq!(r.major.rate, 1.0);
        assert_eq!(r.minor.rate, 1.0);
    }

    #[test]
    fn half_of_two_interactions() {
        let mut m = sample();
        m.pages[0].widgets[0].interaction = Some(InteractionSpec::new([InteractionType::Filter]));
        let mut replica = m.clone();
        replica.pages[0].widgets[0].interaction = None;
        assert_eq!(diff(&m, &replica).interaction.rate, 0.5);
    }

    #[test]
    fn extra_replica_decisions_do_not_count() {
        let m = sample();
        let mut replica = m.clone();
        let mut extra = replica.pages[0].widgets[1].clone();
        extra.id = "copy".into();
        extra.layout.y = 20;
        replica.pages[0].widgets.push(extra);
        let r = diff(&m, &replica);
        assert_eq!(r.major.matched_count, r.major.original_count);
        assert_eq!(r.interaction.matched_count, 1);
    }

    #[test]
    fn vertical_gaps_are_normalized() {
        let m = sample();
        let mut replica = m.clone();
        replica.pages[0].widgets[1].layout.y = 6;
        assert_eq!(diff(&m, &replica).minor.rate, 1.0);
    }

    #[test]
    fn colour_keys_ignore_case() {
        let m = sample();
        let mut replica = m.clone();
        replica.pages[0].widgets[1].visconfig_mut().colour = Some(vec!["#82B365".into(), "#9673A6".into(), "#6C8EC0".into()]);
        assert_eq!(diff(&m, &replica).minor.rate, 1.0);
    }

    #[test]
    fn report_wire_form() {
        let json = serde_json::to_value(diff(&sample(), &sample())).unwrap();
        assert_eq!(json["interaction"]["originalCount"], 1);
        assert_eq!(json["major"]["rate"], 1.0);
    }
}

//! Seeded generators of valid dashboards, pages and edit scripts.
//!
//! Used by the property suites and the benchmarks. All output is a pure
//! function of the seed.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::edit::{EditCommand, EditOp, RectPayload};
use crate::model::{
    Baseline, DashboardModel, DetailConfig, Extensions, InteractionSpec, InteractionType, LayoutRect, LegendPosition,
    MetricBinding, Page, PageMode, Theme, VisConfig, VisType, Widget, GRID_COLUMNS,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const WORDS: [&str; 12] = [
    "Revenue", "Latency", "Ünits", "North \"East\"", "Q3 <draft>", "Ops & Infra", "Signups", "Churn", "日本", "CPU", "Cost",
    "Tickets",
];

fn word(rng: &mut impl Rng) -> String {
    WORDS.choose(rng).expect("non-empty").to_string()
}

fn colour(rng: &mut impl Rng) -> String {
    let c: u32 = rng.random_range(0..0x100_0000);
    if rng.random_bool(0.2) {
        format!("#{c:06X}")
    } else {
        format!("#{c:06x}")
    }
}

/// Random rectangle inside the grid.
pub fn rect(rng: &mut impl Rng, max_y: u32) -> LayoutRect {
    let w = rng.random_range(1..=6);
    let h = rng.random_range(1..=8);
    let x = rng.random_range(0..=GRID_COLUMNS - w);
    let y = rng.random_range(0..=max_y);
    LayoutRect::new(x, y, w, h)
}

/// Rectangles that may overlap each other.
pub fn rects(rng: &mut impl Rng, n: usize) -> Vec<LayoutRect> {
    (0..n).map(|_| rect(rng, 12)).collect()
}

/// Rectangles with no pairwise overlap; a rejected placement falls back to
/// the current bottom of the stack.
pub fn disjoint_rects(rng: &mut impl Rng, n: usize) -> Vec<LayoutRect> {
    let mut out: Vec<LayoutRect> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut candidate = rect(rng, 16);
        if out.iter().any(|r| r.intersects(&candidate)) {
            let bottom = out.iter().map(LayoutRect::bottom).max().unwrap_or(0);
            candidate.y = bottom;
        }
        out.push(candidate);
    }
    out
}

fn extensions(rng: &mut impl Rng) -> Extensions {
    let mut ext = Extensions::new();
    if rng.random_bool(0.15) {
        ext.insert("owner".into(), Value::String(word(rng)));
    }
    if rng.random_bool(0.05) {
        ext.insert("x-meta".into(), serde_json::json!({"tags": [word(rng)], "weight": rng.random::<f64>()}));
    }
    ext
}

fn visconfig(rng: &mut impl Rng) -> Option<VisConfig> {
    if rng.random_bool(0.4) {
        return None;
    }
    let mut c = VisConfig::default();
    if rng.random_bool(0.5) {
        c.colour = Some((0..rng.random_range(1..=5)).map(|_| colour(rng)).collect());
    }
    if rng.random_bool(0.3) {
        c.legend_disabled = Some(rng.random());
    }
    if rng.random_bool(0.3) {
        c.legend_position = Some(*[LegendPosition::Top, LegendPosition::Bottom, LegendPosition::Left, LegendPosition::Right]
            .choose(rng)
            .expect("non-empty"));
    }
    if rng.random_bool(0.3) {
        c.baseline = Some(*[Baseline::None, Baseline::MovingAverage, Baseline::Deviation]
            .choose(rng)
            .expect("non-empty"));
    }
    if rng.random_bool(0.3) {
        c.font_size = Some(4.0 + rng.random::<f64>() * 60.0);
    }
    if rng.random_bool(0.2) {
        c.axis_label_disabled = Some(rng.random());
    }
    c.extensions = extensions(rng);
    Some(c)
}

fn interaction(rng: &mut impl Rng, page_ids: &[String]) -> Option<InteractionSpec> {
    if rng.random_bool(0.5) {
        return None;
    }
    let kinds: Vec<InteractionType> = InteractionType::ALL
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.25))
        .collect();
    let mut spec = InteractionSpec::new(kinds);
    if spec.interactions.contains(&InteractionType::DetailOnDemand) || rng.random_bool(0.1) {
        let target = page_ids.choose(rng).expect("at least one page").clone();
        let method = if rng.random() { PageMode::Full } else { PageMode::Pure };
        spec.detail = Some(DetailConfig::new(target, method));
    }
    spec.extensions = extensions(rng);
    Some(spec)
}

fn widget(rng: &mut impl Rng, id: String, layout: LayoutRect, page_ids: &[String]) -> Widget {
    let vistype = if rng.random_bool(0.1) {
        VisType::Title
    } else {
        *VisType::TECHNIQUES.choose(rng).expect("non-empty")
    };
    let mut w = Widget::new(id, vistype, layout);
    if rng.random_bool(0.6) {
        w.name = Some(word(rng));
    }
    if vistype == VisType::Title || rng.random_bool(0.1) {
        w.properties.title = Some(word(rng));
    }
    if rng.random_bool(0.3) {
        w.properties.childrenname = Some((0..rng.random_range(1..=4)).map(|_| word(rng)).collect());
    }
    w.metric_id = match rng.random_range(0..6) {
        0 => Some(MetricBinding::Multiple((0..rng.random_range(1..=3)).map(|i| format!("m{i}")).collect())),
        1 | 2 => Some(MetricBinding::Single(word(rng).to_lowercase())),
        _ => None,
    };
    w.properties.extensions = extensions(rng);
    w.visconfig = visconfig(rng);
    w.interaction = interaction(rng, page_ids);
    if rng.random_bool(0.05) {
        w.layout_extensions.insert("minW".into(), Value::from(1));
    }
    w.extensions = extensions(rng);
    w
}

/// A page of `n` non-overlapping widgets.
pub fn page(rng: &mut impl Rng, page_index: usize, n: usize, page_ids: &[String]) -> Page {
    let rects = disjoint_rects(rng, n);
    Page {
        id: page_ids[page_index].clone(),
        name: word(rng),
        widgets: rects
            .into_iter()
            .enumerate()
            .map(|(i, r)| widget(rng, format!("p{page_index}-i{i}"), r, page_ids))
            .collect(),
        extensions: extensions(rng),
    }
}

/// A valid dashboard of up to three pages and up to eight widgets per page.
pub fn model(seed: u64) -> DashboardModel {
    let mut rng = rng(seed);
    let pages = rng.random_range(1..=3);
    let page_ids: Vec<String> = (0..pages).map(|i| i.to_string()).collect();
    let mut m = DashboardModel::minimal(format!("dash-{seed}"), word(&mut rng));
    m.theme = if rng.random() { Theme::Light } else { Theme::Dark };
    if rng.random_bool(0.3) {
        m.base_data_model = Some(word(&mut rng));
    }
    m.revision = rng.random_range(0..1000);
    m.pages = (0..pages)
        .map(|i| {
            let n = rng.random_range(0..=8);
            page(&mut rng, i, n, &page_ids)
        })
        .collect();
    m.extensions = extensions(&mut rng);
    m
}

fn vistype_name(rng: &mut impl Rng) -> String {
    VisType::TECHNIQUES.choose(rng).expect("non-empty").wire_name().to_string()
}

/// A random edit aimed at something that exists in `m`. Some edits are
/// legitimately rejected (for example a move that runs off the grid).
pub fn edit(rng: &mut impl Rng, m: &DashboardModel) -> EditCommand {
    let page = m.pages.choose(rng).expect("valid models have pages");
    let widget = m.widgets().collect::<Vec<_>>().choose(rng).map(|w| w.id.clone());
    let page_id = page.id.clone();
    let dash = || "dashboard".to_string();

    let widget_ops = widget.is_some();
    let choice = if widget_ops { rng.random_range(0..24) } else { rng.random_range(0..8) };
    let wid = widget.unwrap_or_default();
    match choice {
        0 => EditCommand::new(dash(), EditOp::RenameDashboard { name: word(rng) }),
        1 => EditCommand::new(
            dash(),
            EditOp::SetTheme {
                theme: if rng.random() { "light" } else { "dark" }.into(),
            },
        ),
        2 => EditCommand::new(dash(), EditOp::NewPage { id: None, name: word(rng) }),
        3 => EditCommand::new(page_id, EditOp::RenamePage { name: word(rng) }),
        4 | 5 => EditCommand::new(
            page_id,
            EditOp::NewWidget {
                vistype: vistype_name(rng),
                id: None,
                name: Some(word(rng)),
                metric_id: None,
                childrenname: None,
            },
        ),
        6 => EditCommand::new(page_id, EditOp::DeletePage {}),
        7 => EditCommand::new(
            dash(),
            EditOp::SetBaseDataModel {
                base_data_model: Some(word(rng)),
            },
        ),
        8 | 9 => {
            let r = rect(rng, 12);
            EditCommand::new(wid, EditOp::Move { x: r.x, y: r.y })
        }
        10 | 11 => {
            let r = rect(rng, 0);
            EditCommand::new(wid, EditOp::Resize { w: r.w, h: r.h })
        }
        12 => EditCommand::new(wid, EditOp::RenameWidget { name: word(rng) }),
        13 => EditCommand::new(wid, EditOp::SetVisType { vistype: vistype_name(rng) }),
        14 => EditCommand::new(
            wid,
            EditOp::SetColor {
                colour: Some((0..rng.random_range(1..=3)).map(|_| colour(rng)).collect()),
            },
        ),
        15 => EditCommand::new(
            wid,
            EditOp::SetMetricId {
                metric_id: Some(Value::String(word(rng))),
            },
        ),
        16 => EditCommand::new(
            wid,
            EditOp::SetElementLayout {
                legend_position: Some("right".into()),
                axis_label_disabled: Some(rng.random()),
            },
        ),
        17 => EditCommand::new(wid, EditOp::SetLegendDisabled { disabled: rng.random() }),
        18 => EditCommand::new(wid, EditOp::SetBaseline { baseline: "deviation".into() }),
        19 => EditCommand::new(
            wid,
            EditOp::SetFontSize {
                font_size: Some(f64::from(rng.random_range(8..40))),
            },
        ),
        20 => EditCommand::new(
            wid,
            EditOp::SetInteractions {
                interactions: InteractionType::ALL
                    .iter()
                    .filter(|k| **k != InteractionType::DetailOnDemand && rng.random_bool(0.3))
                    .map(|k| k.wire_name().to_string())
                    .collect(),
            },
        ),
        21 => EditCommand::new(
            wid,
            EditOp::ConfigureInteraction {
                page: page_id,
                method: Some("pure".into()),
            },
        ),
        22 => EditCommand::new(wid, EditOp::DeleteWidget {}),
        _ => {
            let layout = page
                .widgets
                .iter()
                .map(|w| {
                    let r = w.layout;
                    (w.id.clone(), RectPayload { x: r.x, y: r.y, w: r.w, h: r.h })
                })
                .collect();
            EditCommand::new(page.id.clone(), EditOp::SetPageLayout { layout })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_model;

    #[test]
    fn generated_models_are_valid() {
        for seed in 0..200 {
            let m = model(seed);
            let report = validate_model(&m);
            assert!(report.is_valid(), "seed {seed}: {:?}", report.violations);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(model(7), model(7));
        assert_ne!(model(7), model(8));
    }
}

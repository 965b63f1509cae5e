use std::collections::{BTreeMap, BTreeSet};

use dashlang_core::compare::{extract_decisions, match_decisions, Category};
use dashlang_core::compose::{compose_page_with, export_html, ComposeOptions};
use dashlang_core::edit::apply_edit;
use dashlang_core::layout::{compact, place_all};
use dashlang_core::metrics::{generate_series, window_series, GeneratorSpec, NoData, SeriesKind, TimeWindow};
use dashlang_core::model::{
    overlapping_pairs, parse_model, serialize_model, validate_model, DashboardModel, LayoutRect, Page, VisType, Widget,
};
use dashlang_core::par::Exec;
use dashlang_core::render::geometry::{arc_angles, deviation, treemap_slice_dice, Rect};
use dashlang_core::synth;
use proptest::prelude::*;

fn page_of(rects: &[LayoutRect]) -> Page {
    let mut p = DashboardModel::minimal("d", "d").pages.remove(0);
    p.widgets = rects
        .iter()
        .enumerate()
        .map(|(i, r)| Widget::new(format!("w{i}"), VisType::Table, *r))
        .collect();
    p
}

/// Pairs of widgets sharing at least one grid cell, by brute force.
fn cell_oracle(rects: &[LayoutRect]) -> BTreeSet<(usize, usize)> {
    let mut owners: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (i, r) in rects.iter().enumerate() {
        for x in r.x..r.x + r.w {
            for y in r.y..r.y + r.h {
                owners.entry((x, y)).or_default().push(i);
            }
        }
    }
    let mut pairs = BTreeSet::new();
    for ids in owners.values() {
        for (k, &a) in ids.iter().enumerate() {
            for &b in &ids[k + 1..] {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    pairs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let m = synth::model(seed);
        let text = serialize_model(&m);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(serialize_model(&back), text);
    }

    #[test]
    fn overlap_detection_matches_cell_oracle(seed in any::<u64>(), n in 0usize..12) {
        let rects = synth::rects(&mut synth::rng(seed), n);
        let page = page_of(&rects);
        let found: BTreeSet<_> = overlapping_pairs(&page.widgets).into_iter().collect();
        let oracle = cell_oracle(&rects);
        prop_assert_eq!(&found, &oracle);
        prop_assert_eq!(place_all(&page).is_ok(), oracle.is_empty());
    }

    #[test]
    fn compaction_is_idempotent_and_only_lifts(seed in any::<u64>(), n in 0usize..12) {
        let rects = synth::disjoint_rects(&mut synth::rng(seed), n);
        let page = page_of(&rects);
        let once = compact(&page);
        prop_assert_eq!(&compact(&once), &once);
        prop_assert!(overlapping_pairs(&once.widgets).is_empty());
        for (before, after) in page.widgets.iter().zip(&once.widgets) {
            prop_assert_eq!((before.layout.x, before.layout.w, before.layout.h), (after.layout.x, after.layout.w, after.layout.h));
            prop_assert!(after.layout.y <= before.layout.y);
        }
    }

    #[test]
    fn edit_scripts_preserve_validity(seed in any::<u64>(), len in 0usize..=50) {
        let mut rng = synth::rng(seed);
        let mut m = synth::model(seed);
        for _ in 0..len {
            let cmd = synth::edit(&mut rng, &m);
            let before = m.clone();
            if let Ok(next) = apply_edit(&m, &cmd) {
                prop_assert_eq!(&m, &before);
                prop_assert!(validate_model(&next).is_valid(), "{:?}", cmd);
                prop_assert_eq!(next.revision, m.revision + 1);
                prop_assert_eq!(parse_model(&serialize_model(&next)).unwrap(), next.clone());
                m = next;
            }
            for page in &m.pages {
                let c = compact(page);
                prop_assert_eq!(&compact(&c), &c);
            }
        }
    }

    #[test]
    fn removing_replica_decisions_never_raises_rates(seed in any::<u64>(), drop in any::<prop::sample::Index>()) {
        let original = extract_decisions(&synth::model(seed));
        let replica = extract_decisions(&synth::model(seed ^ 1));
        let full = match_decisions(&original, &replica);
        if !replica.is_empty() {
            let mut fewer = replica.clone();
            fewer.remove(drop.index(replica.len()));
            let reduced = match_decisions(&original, &fewer);
            for c in Category::ALL {
                prop_assert!(reduced.get(c).rate <= full.get(c).rate);
                prop_assert!(full.get(c).matched_count <= full.get(c).original_count);
            }
        }
        let identity = match_decisions(&original, &original);
        for c in Category::ALL {
            prop_assert_eq!(identity.get(c).rate, 1.0);
        }
        let mut reversed = replica.clone();
        reversed.reverse();
        prop_assert_eq!(match_decisions(&original, &reversed), full);
    }

    #[test]
    fn arc_angles_sum_to_full_circle(values in prop::collection::vec(0.0f64..1e6, 1..40)) {
        prop_assume!(values.iter().any(|v| *v > 0.0));
        let angles = arc_angles(&values).unwrap();
        let sum: f64 = angles.iter().sum();
        prop_assert!((sum - 360.0).abs() <= 1e-3, "sum {}", sum);
        let total: f64 = values.iter().sum();
        for (a, v) in angles.iter().zip(&values) {
            prop_assert!((a - v / total * 360.0).abs() <= 1e-3);
        }
    }

    #[test]
    fn treemap_areas_are_proportional(values in prop::collection::vec(0.01f64..1e4, 1..30), depth in 0usize..4) {
        let area = Rect::new(0.0, 0.0, 640.0, 480.0);
        let tiles = treemap_slice_dice(&values, area, depth).unwrap();
        let total: f64 = values.iter().sum();
        for (t, v) in tiles.iter().zip(&values) {
            prop_assert!((t.area() / area.area() - v / total).abs() <= 1e-6);
        }
    }

    #[test]
    fn deviations_cancel(values in prop::collection::vec(-1e4f64..1e4, 1..50)) {
        let sum: f64 = deviation(&values).unwrap().iter().sum();
        prop_assert!(sum.abs() <= 1e-6 * values.len() as f64 * 1e4);
    }

    #[test]
    fn windowed_queries_match_linear_scan(seed in any::<u64>(), n in 1usize..60, from in 0i64..80, len in 0i64..80) {
        let spec = GeneratorSpec { start_ms: 0, step_ms: 1, ..GeneratorSpec::range(0.0, 100.0) };
        let series = generate_series(seed, SeriesKind::TimeSeries, n, spec).unwrap();
        let window = TimeWindow::new(from, from + len);
        let got = window_series(&series, Some(window));
        let expected: Vec<_> = series
            .points
            .iter()
            .filter(|(k, _)| matches!(k, dashlang_core::metrics::PointKey::Time(t) if *t >= from && *t <= from + len))
            .cloned()
            .collect();
        prop_assert_eq!(got.points, expected);
        prop_assert!(series.values().iter().all(|v| (0.0..=100.0).contains(v)));
    }

    #[test]
    fn composition_is_order_independent(seed in any::<u64>()) {
        let m = synth::model(seed);
        let page = &m.pages[0].id;
        let opts = |exec| ComposeOptions { exec, seed, ..ComposeOptions::default() };
        let seq = compose_page_with(&m, page, &NoData, Default::default(), opts(Exec::Sequential)).unwrap();
        let par = compose_page_with(&m, page, &NoData, Default::default(), opts(Exec::Parallel)).unwrap();
        prop_assert_eq!(export_html(&seq), export_html(&par));
        prop_assert_eq!(&seq, &par);
        for (i, a) in seq.frame.iter().enumerate() {
            for b in &seq.frame[i + 1..] {
                prop_assert!(!a.pixel_rect.intersects(&b.pixel_rect));
            }
        }
        let declared: usize = m.pages[0].widgets.iter().map(|w| w.interactions().count()).sum();
        let icons: usize = seq.frame.iter().map(|p| p.widget_node.interaction_icons.len()).sum();
        prop_assert_eq!(declared, icons);
    }
}

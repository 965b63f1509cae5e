//! Page grid: placement, vertical compaction and drag/resize with push-down
//! collision resolution.
//!
//! The grid is [`GRID_COLUMNS`] wide and unbounded downward. Every editing
//! operation resolves collisions by pushing intersecting widgets straight
//! down and then compacting the page, so the result never overlaps.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{LayoutRect, Page, Widget, GRID_COLUMNS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("widgets `{first}` and `{second}` both claim cell ({column}, {row})")]
    Conflict {
        first: String,
        second: String,
        column: u32,
        row: u32,
    },
    #[error("unknown widget `{0}`")]
    UnknownWidget(String),
    #[error("rectangle {0} does not fit the {cols}-column grid", cols = GRID_COLUMNS)]
    OutOfBounds(LayoutRect),
}

/// Cell-level occupancy of one page.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OccupancyGrid {
    cells: BTreeMap<(u32, u32), String>,
}

impl OccupancyGrid {
    pub const COLUMNS: u32 = GRID_COLUMNS;

    pub fn get(&self, column: u32, row: u32) -> Option<&str> {
        self.cells.get(&(column, row)).map(String::as_str)
    }

    pub fn occupied(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of rows down to the last occupied one.
    pub fn rows(&self) -> u32 {
        self.cells.keys().map(|&(_, row)| row + 1).max().unwrap_or(0)
    }

    /// Cells held by `id`, ordered by (column, row).
    pub fn cells_of<'a>(&'a self, id: &'a str) -> impl Iterator<Item = (u32, u32)> + 'a {
        self.cells
            .iter()
            .filter(move |(_, owner)| owner.as_str() == id)
            .map(|(&cell, _)| cell)
    }

    fn claim(&mut self, widget: &Widget) -> Result<(), LayoutError> {
        let r = widget.layout;
        if r.right() > GRID_COLUMNS {
            return Err(LayoutError::OutOfBounds(r));
        }
        for column in r.x..r.right() {
            for row in r.y..r.bottom() {
                if let Some(owner) = self.cells.insert((column, row), widget.id.clone()) {
                    let (first, second) = if owner <= widget.id {
                        (owner, widget.id.clone())
                    } else {
                        (widget.id.clone(), owner)
                    };
                    return Err(LayoutError::Conflict {
                        first,
                        second,
                        column,
                        row,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Occupy every widget's declared rectangle.
pub fn place_all(page: &Page) -> Result<OccupancyGrid, LayoutError> {
    let mut grid = OccupancyGrid::default();
    for widget in &page.widgets {
        grid.claim(widget)?;
    }
    Ok(grid)
}

/// Move each widget, in (y, x) order of the input, to the smallest row at
/// which it clears every widget already placed. Columns never change.
pub fn compact(page: &Page) -> Page {
    let rects: Vec<LayoutRect> = page.widgets.iter().map(|w| w.layout).collect();
    let compacted = compact_rects(&rects);
    let mut out = page.clone();
    for (widget, rect) in out.widgets.iter_mut().zip(compacted) {
        widget.layout = rect;
    }
    out
}

pub(crate) fn compact_rects(rects: &[LayoutRect]) -> Vec<LayoutRect> {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by_key(|&i| (rects[i].y, rects[i].x, i));

    let mut out = rects.to_vec();
    let mut placed: Vec<LayoutRect> = Vec::with_capacity(rects.len());
    for i in order {
        let rect = rects[i];
        let mut y = 0;
        // The lowest blocker's bottom is a lower bound for the next candidate
        // row, so this loop runs at most once per placed rectangle.
        loop {
            let candidate = rect.with_y(y);
            match placed
                .iter()
                .filter(|p| p.intersects(&candidate))
                .map(LayoutRect::bottom)
                .max()
            {
                Some(bottom) => y = bottom,
                None => break,
            }
        }
        out[i] = rect.with_y(y);
        placed.push(out[i]);
    }
    out
}

/// Drag a widget to `(x, y)`, push whatever it now covers straight down and
/// compact the page.
pub fn move_widget(page: &Page, id: &str, x: u32, y: u32) -> Result<Page, LayoutError> {
    let index = widget_index(page, id)?;
    let rect = page.widgets[index].layout;
    let target = LayoutRect { x, y, ..rect };
    check_bounds(target)?;
    Ok(relayout(page, index, target))
}

/// Change a widget's extent, resolving collisions like [`move_widget`].
pub fn resize_widget(page: &Page, id: &str, w: u32, h: u32) -> Result<Page, LayoutError> {
    let index = widget_index(page, id)?;
    let rect = page.widgets[index].layout;
    let target = LayoutRect { w, h, ..rect };
    check_bounds(target)?;
    Ok(relayout(page, index, target))
}

fn widget_index(page: &Page, id: &str) -> Result<usize, LayoutError> {
    page.widgets
        .iter()
        .position(|w| w.id == id)
        .ok_or_else(|| LayoutError::UnknownWidget(id.to_string()))
}

fn check_bounds(rect: LayoutRect) -> Result<(), LayoutError> {
    if rect.w < 1 || rect.h < 1 || rect.right() > GRID_COLUMNS {
        return Err(LayoutError::OutOfBounds(rect));
    }
    Ok(())
}

fn relayout(page: &Page, index: usize, target: LayoutRect) -> Page {
    let mut rects: Vec<LayoutRect> = page.widgets.iter().map(|w| w.layout).collect();
    rects[index] = target;
    push_down(&mut rects, index, index);
    let compacted = compact_rects(&rects);
    let mut out = page.clone();
    for (widget, rect) in out.widgets.iter_mut().zip(compacted) {
        widget.layout = rect;
    }
    out
}

/// Push every rectangle intersecting `rects[pusher]` to just below it, then
/// recurse from each pushed rectangle. `anchor` (the edited widget) never
/// moves. Pushed rectangles always land below their pusher, so the chain only
/// travels downward and terminates.
pub(crate) fn push_down(rects: &mut [LayoutRect], pusher: usize, anchor: usize) {
    let mut victims: Vec<usize> = (0..rects.len())
        .filter(|&j| j != pusher && j != anchor && rects[j].intersects(&rects[pusher]))
        .collect();
    victims.sort_by_key(|&j| (rects[j].y, rects[j].x, j));
    for j in victims {
        if rects[j].intersects(&rects[pusher]) {
            rects[j].y = rects[pusher].bottom();
            push_down(rects, j, anchor);
        }
    }
}

/// Row where a new widget goes: directly below everything on the page.
pub fn bottom_row(page: &Page) -> u32 {
    page.bottom()
}

/// Coarse arrangement of a page.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum LayoutClass {
    /// Widgets aligned both horizontally and vertically.
    StandardGrid,
    /// Widgets filled row by row; columns need not line up across rows.
    RowOriented,
    /// Widgets filled column by column; rows need not line up across columns.
    ColumnOriented,
    /// Neither rows nor columns are consistently aligned.
    Disordered,
}

impl LayoutClass {
    pub const ALL: [LayoutClass; 4] = [
        LayoutClass::StandardGrid,
        LayoutClass::RowOriented,
        LayoutClass::ColumnOriented,
        LayoutClass::Disordered,
    ];
}

/// Classify a page by its guillotine bands.
///
/// A horizontal band is a maximal run of rows that no full-width cut
/// separates; vertical bands are the same for columns. A page is
/// row-oriented when every widget spans its whole horizontal band,
/// column-oriented when every widget spans its whole vertical band, and a
/// standard grid when both hold.
pub fn classify_layout(page: &Page) -> LayoutClass {
    let rects: Vec<LayoutRect> = page.widgets.iter().map(|w| w.layout).collect();
    let rows = bands(rects.iter().map(|r| (r.y, r.bottom())));
    let columns = bands(rects.iter().map(|r| (r.x, r.right())));
    let fills = |bands: &[(u32, u32)], span: (u32, u32)| bands.contains(&span);
    let row_aligned = rects.iter().all(|r| fills(&rows, (r.y, r.bottom())));
    let column_aligned = rects.iter().all(|r| fills(&columns, (r.x, r.right())));
    match (row_aligned, column_aligned) {
        (true, true) => LayoutClass::StandardGrid,
        (true, false) => LayoutClass::RowOriented,
        (false, true) => LayoutClass::ColumnOriented,
        (false, false) => LayoutClass::Disordered,
    }
}

/// Merge half-open intervals into maximal overlapping runs.
fn bands(spans: impl Iterator<Item = (u32, u32)>) -> Vec<(u32, u32)> {
    let mut spans: Vec<(u32, u32)> = spans.filter(|(a, b)| a < b).collect();
    spans.sort_unstable();
    let mut merged: Vec<(u32, u32)> = Vec::new();
    for (start, end) in spans {
        match merged.last_mut() {
            Some(last) if start < last.1 => last.1 = last.1.max(end),
            _ => merged.push((start, end)),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sample;
    use crate::model::{validate_model, Rule, VisType};

    fn page(rects: &[(u32, u32, u32, u32)]) -> Page {
        let mut p = crate::model::DashboardModel::minimal("d", "d").pages.remove(0);
        p.widgets = rects
            .iter()
            .enumerate()
            .map(|(i, &(x, y, w, h))| Widget::new(format!("w{i}"), VisType::Table, LayoutRect::new(x, y, w, h)))
            .collect();
        p
    }

    fn rects(p: &Page) -> Vec<(u32, u32, u32, u32)> {
        p.widgets
            .iter()
            .map(|w| (w.layout.x, w.layout.y, w.layout.w, w.layout.h))
            .collect()
    }

    #[test]
    fn sample_page_cells() {
        let m = sample();
        let grid = place_all(&m.pages[0]).unwrap();
        let title: Vec<_> = grid.cells_of("p0-i0").collect();
        let expected: Vec<_> = (0..4).flat_map(|c| (0..2).map(move |r| (c, r))).collect();
        assert_eq!(title, expected);
        let pie: Vec<_> = grid.cells_of("p0-i1").collect();
        let expected: Vec<_> = (0..4).flat_map(|c| (2..10).map(move |r| (c, r))).collect();
        assert_eq!(pie, expected);
        assert_eq!(grid.occupied(), 8 + 32);
        assert_eq!(grid.rows(), 10);
    }

    #[test]
    fn empty_page_has_empty_grid() {
        assert!(place_all(&page(&[])).unwrap().is_empty());
    }

    #[test]
    fn full_row_of_unit_widgets() {
        let p = page(&(0..12).map(|x| (x, 0, 1, 1)).collect::<Vec<_>>());
        let grid = place_all(&p).unwrap();
        assert_eq!(grid.occupied(), 12);
        assert!((0..12).all(|c| grid.get(c, 0).is_some()));
        assert_eq!(grid.rows(), 1);
    }

    #[test]
    fn overlap_is_a_conflict() {
        let err = place_all(&page(&[(0, 0, 2, 2), (1, 1, 2, 2)])).unwrap_err();
        assert_eq!(
            err,
            LayoutError::Conflict {
                first: "w0".into(),
                second: "w1".into(),
                column: 1,
                row: 1
            }
        );
    }

    #[test]
    fn compact_lifts_a_lone_widget() {
        assert_eq!(rects(&compact(&page(&[(3, 5, 2, 2)]))), [(3, 0, 2, 2)]);
    }

    #[test]
    fn compact_keeps_the_sample() {
        let m = sample();
        assert_eq!(compact(&m.pages[0]), m.pages[0]);
    }

    #[test]
    fn compact_closes_a_gap() {
        let p = compact(&page(&[(0, 0, 4, 2), (0, 6, 4, 2)]));
        assert_eq!(rects(&p), [(0, 0, 4, 2), (0, 2, 4, 2)]);
    }

    #[test]
    fn move_without_collision() {
        let m = sample();
        let moved = move_widget(&m.pages[0], "p0-i1", 4, 0).unwrap();
        assert_eq!(moved.widgets[1].layout, LayoutRect::new(4, 0, 4, 8));
        assert_eq!(moved.widgets[0].layout, m.pages[0].widgets[0].layout);
    }

    #[test]
    fn identity_move() {
        let m = sample();
        let p = &m.pages[0];
        assert_eq!(&move_widget(p, "p0-i1", 0, 2).unwrap(), p);
    }

    #[test]
    fn move_onto_another_pushes_it_down() {
        let p = page(&[(0, 0, 4, 2), (0, 2, 4, 2)]);
        let mut pushed: Vec<LayoutRect> = p.widgets.iter().map(|w| w.layout).collect();
        pushed[0] = LayoutRect::new(0, 2, 4, 2);
        push_down(&mut pushed, 0, 0);
        assert_eq!(pushed[1], LayoutRect::new(0, 4, 4, 2));

        let moved = move_widget(&p, "w0", 0, 2).unwrap();
        assert!(place_all(&moved).is_ok());
        assert_eq!(validate_model_page(&moved), 0);
    }

    #[test]
    fn push_cascades() {
        let mut r = vec![
            LayoutRect::new(0, 0, 6, 3),
            LayoutRect::new(0, 1, 3, 2),
            LayoutRect::new(0, 3, 3, 1),
            LayoutRect::new(6, 0, 6, 1),
        ];
        push_down(&mut r, 0, 0);
        assert_eq!(r[1], LayoutRect::new(0, 3, 3, 2));
        assert_eq!(r[2], LayoutRect::new(0, 5, 3, 1));
        assert_eq!(r[3], LayoutRect::new(6, 0, 6, 1));
    }

    #[test]
    fn resize_title_to_full_width() {
        let m = sample();
        let p = resize_widget(&m.pages[0], "p0-i0", 12, 2).unwrap();
        assert_eq!(p.widgets[0].layout, LayoutRect::new(0, 0, 12, 2));
        assert_eq!(p.widgets[1].layout, LayoutRect::new(0, 2, 4, 8));
        let p = resize_widget(&m.pages[0], "p0-i0", 4, 5).unwrap();
        assert_eq!(p.widgets[1].layout, LayoutRect::new(0, 5, 4, 8));
    }

    #[test]
    fn resize_identity_and_bounds() {
        let m = sample();
        let p = &m.pages[0];
        assert_eq!(&resize_widget(p, "p0-i0", 4, 2).unwrap(), p);
        assert!(matches!(resize_widget(p, "p0-i0", 13, 2), Err(LayoutError::OutOfBounds(_))));
        assert!(matches!(resize_widget(p, "p0-i0", 0, 2), Err(LayoutError::OutOfBounds(_))));
        assert!(matches!(move_widget(p, "p0-i0", 9, 0), Err(LayoutError::OutOfBounds(_))));
        assert_eq!(
            move_widget(p, "nope", 0, 0),
            Err(LayoutError::UnknownWidget("nope".into()))
        );
    }

    #[test]
    fn classification() {
        assert_eq!(classify_layout(&sample().pages[0]), LayoutClass::StandardGrid);
        assert_eq!(
            classify_layout(&page(&[(0, 0, 6, 2), (6, 0, 6, 2), (0, 2, 6, 2), (6, 2, 6, 2)])),
            LayoutClass::StandardGrid
        );
        assert_eq!(
            classify_layout(&page(&[(0, 0, 4, 2), (4, 0, 8, 2), (0, 2, 6, 3), (6, 2, 6, 3)])),
            LayoutClass::RowOriented
        );
        assert_eq!(
            classify_layout(&page(&[(0, 0, 4, 2), (0, 2, 4, 4), (4, 0, 8, 3), (4, 3, 8, 3)])),
            LayoutClass::ColumnOriented
        );
        assert_eq!(
            classify_layout(&page(&[(0, 0, 4, 4), (4, 0, 8, 2), (4, 2, 4, 4), (0, 4, 4, 2), (8, 2, 4, 2)])),
            LayoutClass::Disordered
        );
    }

    fn validate_model_page(p: &Page) -> usize {
        let mut m = crate::model::DashboardModel::minimal("d", "d");
        m.pages[0] = p.clone();
        validate_model(&m).count(Rule::Overlap)
    }
}

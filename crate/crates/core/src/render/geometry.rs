//! Chart math shared by the renderers.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("every value is zero")]
    AllZero,
    #[error("value {0} is negative")]
    NegativeValue(f64),
    #[error("value {0} is not positive")]
    NonPositiveValue(f64),
    #[error("degenerate domain [{0}, {1}]")]
    DegenerateDomain(f64, f64),
    #[error("empty series")]
    EmptySeries,
    #[error("window must be at least 1")]
    ZeroWindow,
}

/// Resolution of [`arc_angles`], in degrees.
pub const ANGLE_RESOLUTION: f64 = 1e-3;

/// Split 360° proportionally to `values`.
///
/// Angles are apportioned in whole millidegrees with the largest-remainder
/// method (ties go to the earlier index), so they always add up to exactly
/// 360 000 millidegrees.
pub fn arc_angles(values: &[f64]) -> Result<Vec<f64>, GeometryError> {
    if let Some(&v) = values.iter().find(|v| **v < 0.0 || !v.is_finite()) {
        return Err(GeometryError::NegativeValue(v));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(GeometryError::AllZero);
    }
    const FULL: u64 = 360_000;
    let exact: Vec<f64> = values.iter().map(|v| v / total * FULL as f64).collect();
    let mut units: Vec<u64> = exact.iter().map(|e| e.floor() as u64).collect();
    let assigned: u64 = units.iter().sum();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(FULL.saturating_sub(assigned) as usize) {
        units[i] += 1;
    }
    Ok(units.into_iter().map(|u| u as f64 / 1000.0).collect())
}

/// Affine map of `[domain_min, domain_max]` onto `[range_min, range_max]`.
pub fn scale_linear(
    domain_min: f64,
    domain_max: f64,
    range_min: f64,
    range_max: f64,
    v: f64,
) -> Result<f64, GeometryError> {
    if domain_max.partial_cmp(&domain_min) != Some(std::cmp::Ordering::Greater) {
        return Err(GeometryError::DegenerateDomain(domain_min, domain_max));
    }
    Ok(range_min + (v - domain_min) / (domain_max - domain_min) * (range_max - range_min))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Slice-and-dice treemap of one level.
///
/// Even `depth` slices along the width (side-by-side slabs), odd `depth`
/// along the height (stacked slabs); nested levels alternate by passing
/// `depth + 1` for each child rectangle. Areas are proportional to values
/// and the slabs tile `rect` exactly: the last slab ends on the far edge.
pub fn treemap_slice_dice(values: &[f64], rect: Rect, depth: usize) -> Result<Vec<Rect>, GeometryError> {
    if values.is_empty() {
        return Err(GeometryError::EmptySeries);
    }
    if let Some(&v) = values.iter().find(|v| !v.is_finite() || **v <= 0.0 || v.is_nan()) {
        return Err(GeometryError::NonPositiveValue(v));
    }
    let total: f64 = values.iter().sum();
    let horizontal = depth.is_multiple_of(2);
    let extent = if horizontal { rect.w } else { rect.h };
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (i, v) in values.iter().enumerate() {
        let start = extent * acc / total;
        acc += v;
        let end = if i + 1 == values.len() { extent } else { extent * acc / total };
        out.push(if horizontal {
            Rect::new(rect.x + start, rect.y, end - start, rect.h)
        } else {
            Rect::new(rect.x, rect.y + start, rect.w, end - start)
        });
    }
    Ok(out)
}

/// Trailing moving average; the first `window - 1` outputs average the
/// points available so far.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>, GeometryError> {
    if series.is_empty() {
        return Err(GeometryError::EmptySeries);
    }
    if window == 0 {
        return Err(GeometryError::ZeroWindow);
    }
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for i in 0..series.len() {
        sum += series[i];
        if i >= window {
            sum -= series[i - window];
        }
        let count = (i + 1).min(window);
        out.push(sum / count as f64);
    }
    Ok(out)
}

/// Deviation of each point from the series mean.
pub fn deviation(series: &[f64]) -> Result<Vec<f64>, GeometryError> {
    if series.is_empty() {
        return Err(GeometryError::EmptySeries);
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    Ok(series.iter().map(|v| v - mean).collect())
}

/// Needle angle of a half-circle gauge in degrees, 0° at `min` and 180° at
/// `max`, clamped to the dial.
pub fn gauge_angle(value: f64, min: f64, max: f64) -> Result<f64, GeometryError> {
    Ok(scale_linear(min, max, 0.0, 180.0, value)?.clamp(0.0, 180.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_examples() {
        assert_eq!(arc_angles(&[1.0, 1.0, 1.0, 1.0]).unwrap(), [90.0; 4]);
        assert_eq!(arc_angles(&[3.0]).unwrap(), [360.0]);
        assert_eq!(arc_angles(&[2.0, 3.0, 5.0]).unwrap(), [72.0, 108.0, 180.0]);
        assert_eq!(arc_angles(&[1.0, 2.0, 3.0]).unwrap(), [60.0, 120.0, 180.0]);
        assert_eq!(arc_angles(&[1.0, 1.0, 1.0]).unwrap(), [120.0; 3]);
        assert_eq!(arc_angles(&[0.0, 0.0]), Err(GeometryError::AllZero));
        assert!(matches!(arc_angles(&[1.0, -1.0]), Err(GeometryError::NegativeValue(_))));
    }

    #[test]
    fn arc_rounding_distributes_remainders() {
        // 360000 / 7 = 51428.571..., remainder 4 units go to the first four.
        let a = arc_angles(&[1.0; 7]).unwrap();
        assert_eq!(a[..4], [51.429; 4]);
        assert_eq!(a[4..], [51.428; 3]);
        let millis: u64 = a.iter().map(|d| (d * 1000.0).round() as u64).sum();
        assert_eq!(millis, 360_000);
    }

    #[test]
    fn scale_examples() {
        assert_eq!(scale_linear(0.0, 10.0, 0.0, 100.0, 5.0).unwrap(), 50.0);
        assert_eq!(scale_linear(0.0, 10.0, 0.0, 100.0, 0.0).unwrap(), 0.0);
        assert_eq!(scale_linear(2.0, 8.0, 10.0, 40.0, 5.0).unwrap(), 25.0);
        assert_eq!(
            scale_linear(3.0, 3.0, 0.0, 1.0, 3.0),
            Err(GeometryError::DegenerateDomain(3.0, 3.0))
        );
    }

    #[test]
    fn treemap_examples() {
        let unit = Rect::new(0.0, 0.0, 1.0, 1.0);
        assert_eq!(treemap_slice_dice(&[1.0], unit, 0).unwrap(), [unit]);
        assert_eq!(
            treemap_slice_dice(&[1.0, 1.0], unit, 0).unwrap(),
            [Rect::new(0.0, 0.0, 0.5, 1.0), Rect::new(0.5, 0.0, 0.5, 1.0)]
        );
        let tiles = treemap_slice_dice(&[1.0, 2.0, 1.0], Rect::new(0.0, 0.0, 4.0, 1.0), 0).unwrap();
        assert_eq!(tiles.iter().map(|r| r.w).collect::<Vec<_>>(), [1.0, 2.0, 1.0]);
        let stacked = treemap_slice_dice(&[1.0, 3.0], Rect::new(0.0, 0.0, 2.0, 4.0), 1).unwrap();
        assert_eq!(stacked, [Rect::new(0.0, 0.0, 2.0, 1.0), Rect::new(0.0, 1.0, 2.0, 3.0)]);
        assert!(matches!(
            treemap_slice_dice(&[1.0, 0.0], unit, 0),
            Err(GeometryError::NonPositiveValue(_))
        ));
    }

    #[test]
    fn moving_average_examples() {
        assert_eq!(moving_average(&[5.0, 5.0, 5.0], 2).unwrap(), [5.0, 5.0, 5.0]);
        assert_eq!(moving_average(&[1.0, 3.0], 1).unwrap(), [1.0, 3.0]);
        assert_eq!(moving_average(&[2.0, 4.0, 6.0, 8.0], 2).unwrap(), [2.0, 3.0, 5.0, 7.0]);
        assert_eq!(moving_average(&[], 2), Err(GeometryError::EmptySeries));
        assert_eq!(moving_average(&[1.0], 0), Err(GeometryError::ZeroWindow));
    }

    #[test]
    fn gauge_examples() {
        assert_eq!(gauge_angle(0.0, 0.0, 100.0).unwrap(), 0.0);
        assert_eq!(gauge_angle(50.0, 0.0, 100.0).unwrap(), 90.0);
        assert_eq!(gauge_angle(100.0, 0.0, 100.0).unwrap(), 180.0);
        assert_eq!(gauge_angle(150.0, 0.0, 100.0).unwrap(), 180.0);
        assert_eq!(gauge_angle(-5.0, 0.0, 100.0).unwrap(), 0.0);
    }

    #[test]
    fn deviation_sums_to_zero() {
        let d = deviation(&[1.0, 2.0, 6.0]).unwrap();
        assert_eq!(d, [-2.0, -1.0, 3.0]);
    }
}

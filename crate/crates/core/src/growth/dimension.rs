use crate::error::{domain, Result};
use crate::geometry::Polygon;
use crate::numerics::{fit_line, logspace};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverCount {
    pub eps: f64,
    pub count: usize,
}

/// Box-counting estimate of the upper Minkowski dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub dimension: f64,
    /// `[ε_min, ε_max]` of the scaling window.
    pub window: [f64; 2],
    pub residual_rms: f64,
    pub counts: Vec<CoverCount>,
    /// False when no window met the residual threshold and the whole grid was used.
    pub window_found: bool,
}

/// 20 geometrically spaced radii in `[1e−4, 1e−1]`.
pub fn default_eps_grid() -> Vec<f64> {
    logspace(1e-4, 1e-1, 20)
}

/// Polar angles of a polygon's vertices.
pub fn vertex_angles(poly: &Polygon) -> Vec<f64> {
    poly.vertices().iter().map(|v| v[1].atan2(v[0])).collect()
}

/// Minimal number of arcs of radius `eps` covering the angles, in the
/// arc-length metric of the unit circle. Greedy from the largest gap, which
/// is optimal on a circle up to one arc.
pub fn covering_number(angles: &[f64], eps: f64) -> usize {
    if angles.is_empty() {
        return 0;
    }
    let mut a: Vec<f64> = angles.iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
    a.sort_by(f64::total_cmp);
    let m = a.len();
    let (start, _) = (0..m)
        .map(|k| {
            let gap = if k == 0 { a[0] + 2.0 * PI - a[m - 1] } else { a[k] - a[k - 1] };
            (k, gap)
        })
        .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
    let mut count = 0;
    let mut reach = f64::NEG_INFINITY;
    for j in 0..m {
        let mut t = a[(start + j) % m];
        if start + j >= m {
            t += 2.0 * PI;
        }
        if t > reach {
            count += 1;
            reach = t + 2.0 * eps;
        }
    }
    count
}

/// Slope of `log N(ε)` against `log(1/ε)` over the longest contiguous run of
/// at least four grid values whose fit residual stays below 0.05.
pub fn minkowski_dimension(angles: &[f64], eps_grid: &[f64]) -> Result<DimensionEstimate> {
    let mut eps: Vec<f64> = eps_grid.to_vec();
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(domain("ε values must be positive"));
    }
    eps.sort_by(f64::total_cmp);
    let counts: Vec<CoverCount> = eps
        .iter()
        .map(|&e| CoverCount {
            eps: e,
            count: covering_number(angles, e),
        })
        .collect();
    let window_of = |lo: usize, hi: usize| [eps[lo], eps[hi]];
    if angles.len() <= 2 || eps.len() < 4 {
        return Ok(DimensionEstimate {
            dimension: 0.0,
            window: window_of(0, eps.len().saturating_sub(1)),
            residual_rms: 0.0,
            counts,
            window_found: false,
        });
    }
    let xs: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (c.count as f64).ln()).collect();
    let fit = |lo: usize, hi: usize| fit_line(&xs[lo..=hi], &ys[lo..=hi]).expect("distinct ε");
    let mut best: Option<(usize, usize, f64)> = None;
    for lo in 0..eps.len() {
        for hi in lo + 3..eps.len() {
            let f = fit(lo, hi);
            if f.residual_rms >= 0.05 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bl, bh, br)) => {
                    let (span, bspan) = (hi - lo, bh - bl);
                    span > bspan || (span == bspan && f.residual_rms < br)
                }
            };
            if better {
                best = Some((lo, hi, f.residual_rms));
            }
        }
    }
    let (lo, hi, found) = match best {
        Some((lo, hi, _)) => (lo, hi, true),
        None => (0, eps.len() - 1, false),
    };
    let f = fit(lo, hi);
    Ok(DimensionEstimate {
        dimension: f.slope,
        window: window_of(lo, hi),
        residual_rms: f.residual_rms,
        counts,
        window_found: found,
    })
}

/// Entropy bound `2/(3 − d)` from the dimension `d ∈ [0, 1]` of the extremal points.
pub fn dim_entropy_bound(d: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&d) {
        return Err(domain(format!("dimension {d} outside [0, 1]")));
    }
    Ok(2.0 / (3.0 - d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equally_spaced_points_are_zero_dimensional() {
        let pts: Vec<f64> = (0..12).map(|k| k as f64 * PI / 6.0).collect();
        let est = minkowski_dimension(&pts, &default_eps_grid()).unwrap();
        assert_eq!(est.counts[0].count, 12);
        assert!(est.dimension.abs() < 1e-12);
    }

    #[test]
    fn bound_values() {
        assert!((dim_entropy_bound(0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((dim_entropy_bound(0.5).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(dim_entropy_bound(1.0).unwrap(), 1.0);
    }
}

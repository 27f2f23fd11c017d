use super::GrowthSeries;
use crate::error::{domain, Result};
use crate::numerics::fit_line;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthMode {
    /// Fit `log V(r)`.
    Ball,
    /// Fit `log A(r)`.
    Sphere,
}

/// Least-squares slope of `log V` or `log A` against `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub window: [f64; 2],
    pub residual_rms: f64,
    pub mode: GrowthMode,
    pub points: usize,
}

/// Fits over `window` (default `[r_max/2, r_max]`); needs at least 4 samples.
pub fn entropy_fit(
    series: &GrowthSeries,
    window: Option<[f64; 2]>,
    mode: GrowthMode,
) -> Result<EntropyEstimate> {
    let r_max = *series
        .radii
        .last()
        .ok_or_else(|| domain("empty growth series"))?;
    let [lo, hi] = window.unwrap_or([0.5 * r_max, r_max]);
    let values = match mode {
        GrowthMode::Ball => &series.volume,
        GrowthMode::Sphere => &series.sphere,
    };
    let tol = 1e-9 * hi.abs().max(1.0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = series
        .radii
        .iter()
        .zip(values)
        .filter(|(r, _)| **r >= lo - tol && **r <= hi + tol)
        .map(|(r, v)| (*r, v.ln()))
        .unzip();
    if xs.len() < 4 {
        return Err(domain(format!(
            "window [{lo}, {hi}] holds {} samples, need at least 4",
            xs.len()
        )));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(domain(format!("{mode:?} values missing or nonpositive in the window")));
    }
    let fit = fit_line(&xs, &ys).ok_or_else(|| domain("degenerate fit window"))?;
    Ok(EntropyEstimate {
        slope: fit.slope,
        intercept: fit.intercept,
        window: [lo, hi],
        residual_rms: fit.residual_rms,
        mode,
        points: xs.len(),
    })
}

/// `V(r)/sinh^{n−1} r` at the largest radius against `𝒜_p/(n−1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientReport {
    pub limit: f64,
    pub radius: f64,
    pub ratio: f64,
    /// Relative deviation, or the ratio itself when the limit is zero.
    pub deviation: f64,
    /// The ratio decreases over the last three samples.
    pub tail_decreasing: bool,
}

pub fn entropy_coefficient(series: &GrowthSeries, ap: f64) -> Result<CoefficientReport> {
    let n = series.ratio.len();
    if n == 0 || !series.ratio[n - 1].is_finite() {
        return Err(domain("series has no ball volumes"));
    }
    let limit = ap / (series.dimension as f64 - 1.0);
    let ratio = series.ratio[n - 1];
    let deviation = if limit > 0.0 {
        (ratio - limit).abs() / limit
    } else {
        ratio.abs()
    };
    let tail = &series.ratio[n.saturating_sub(3)..];
    Ok(CoefficientReport {
        limit,
        radius: series.radii[n - 1],
        ratio,
        deviation,
        tail_decreasing: tail.windows(2).all(|w| w[1] < w[0]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoareaSample {
    pub r: f64,
    pub dv: f64,
    pub a: f64,
    pub ratio: f64,
}

/// Observed bracket of `V′(r)/A(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoareaReport {
    pub samples: Vec<CoareaSample>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `exact` when `V′` comes from the boundary integral, else `central_difference`.
    pub source: String,
    pub derivative_positive: bool,
}

pub fn coarea_check(series: &GrowthSeries) -> Result<CoareaReport> {
    let n = series.len();
    let exact = series.derivative.iter().all(|d| d.is_finite());
    let mut samples = Vec::new();
    for i in 0..n {
        let dv = if exact {
            series.derivative[i]
        } else if i > 0 && i + 1 < n {
            (series.volume[i + 1] - series.volume[i - 1])
                / (series.radii[i + 1] - series.radii[i - 1])
        } else {
            continue;
        };
        let a = series.sphere[i];
        if !(dv.is_finite() && a.is_finite()) {
            return Err(domain("co-area check needs both V and A"));
        }
        samples.push(CoareaSample {
            r: series.radii[i],
            dv,
            a,
            ratio: dv / a,
        });
    }
    if samples.is_empty() {
        return Err(domain("co-area check needs at least three radii"));
    }
    Ok(CoareaReport {
        min_ratio: samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min),
        max_ratio: samples.iter().map(|s| s.ratio).fold(f64::NEG_INFINITY, f64::max),
        derivative_positive: samples.iter().all(|s| s.dv > 0.0),
        source: if exact { "exact" } else { "central_difference" }.to_string(),
        samples,
    })
}

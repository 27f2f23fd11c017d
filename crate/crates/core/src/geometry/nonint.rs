use super::Polygon;
use crate::error::{invalid, Result};
use crate::numerics::zeta_upper;
use serde::Serialize;
use std::f64::consts::PI;

/// Truncated centrally symmetric polygon with vertex gaps `α_i = C_s / i^s`,
/// each gap used three times in a row.
///
/// The infinite version has entropy strictly between 0 and 1. A truncation
/// to `N` terms is a polygon (entropy 0), but its sphere lengths follow the
/// infinite body up to [`NonintExample::valid_radius`].
#[derive(Debug, Clone)]
pub struct NonintExample {
    pub polygon: Polygon,
    pub s: f64,
    pub terms: usize,
    pub safety: f64,
    /// `C_s = safety·π / (3 ζ(s))`.
    pub c_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonintSummary {
    pub s: f64,
    pub terms: usize,
    pub safety: f64,
    pub c_s: f64,
    pub vertices: usize,
    pub valid_radius: f64,
    pub entropy_band: [f64; 2],
}

/// Builds the example for exponent `s > 2` with `terms` gap values.
pub fn make_nonint_example(s: f64, terms: usize, safety: f64) -> Result<NonintExample> {
    if !(s > 2.0 && s.is_finite()) {
        return Err(invalid("exponent s must exceed 2"));
    }
    if terms < 1 {
        return Err(invalid("need at least one term"));
    }
    if !(safety > 0.0 && safety < 1.0) {
        return Err(invalid("safety factor must lie in (0, 1)"));
    }
    let c_s = safety * PI / (3.0 * zeta_upper(s, 1_000_000));
    let alphas: Vec<f64> = (1..=terms).map(|i| c_s / (i as f64).powf(s)).collect();
    let budget: f64 = 3.0 * alphas.iter().sum::<f64>();
    if budget >= PI {
        return Err(invalid(format!("angle budget exceeded: 3Σα = {budget} ≥ π")));
    }
    // Cumulative angles c_k = β_1 + … + β_k with β = (α_1, α_1, α_1, α_2, …);
    // consecutive vertices c_1..c_{3N} are separated by β_2..β_{3N}.
    let betas: Vec<f64> = alphas.iter().flat_map(|&a| [a, a, a]).collect();
    let start = betas[0];
    let inner: Vec<f64> = betas[1..].to_vec();
    let spread: f64 = inner.iter().rev().sum();
    let closing = PI - spread;
    let mut gaps = inner.clone();
    gaps.push(closing);
    gaps.extend_from_slice(&inner);
    gaps.push(closing);
    let polygon = Polygon::from_circle_gaps(start, gaps)?;
    Ok(NonintExample {
        polygon,
        s,
        terms,
        safety,
        c_s,
    })
}

impl NonintExample {
    pub fn alpha(&self, i: usize) -> f64 {
        self.c_s / (i as f64).powf(self.s)
    }

    /// Largest radius for which the truncation reproduces the infinite body's
    /// sphere growth: `s·log(N / (2 C_s)^{1/s})`.
    pub fn valid_radius(&self) -> f64 {
        self.s * (self.terms as f64 / (2.0 * self.c_s).powf(1.0 / self.s)).ln()
    }

    /// Theoretical entropy band `[1/s, (2s − 2)/(3s − 4)]`.
    pub fn entropy_band(&self) -> [f64; 2] {
        [1.0 / self.s, (2.0 * self.s - 2.0) / (3.0 * self.s - 4.0)]
    }

    /// Index of the edge joining the first two vertices of the `i`-th triple.
    pub fn middle_edge(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.terms);
        3 * i - 3
    }

    /// Hilbert length of the middle segment of triple `i` on the sphere `S(o, r)`.
    pub fn middle_segment_length(&self, i: usize, r: f64) -> f64 {
        let delta = 2.0 / ((2.0 * r).exp() + 1.0);
        self.polygon.scaled_edge_length(self.middle_edge(i), delta)
    }

    /// Closed-form lower bound for [`Self::middle_segment_length`]:
    /// `log(tanh r/(1 − tanh r)·2 sin(α/2) sin(2α)/cos(α/2) + 1)`.
    pub fn segment_lower_bound(&self, i: usize, r: f64) -> f64 {
        let a = self.alpha(i);
        let ratio = 0.5 * (2.0 * r).exp_m1();
        (ratio * 2.0 * (0.5 * a).sin() * (2.0 * a).sin() / (0.5 * a).cos()).ln_1p()
    }

    /// The same expression with `sin α` in place of `sin 2α`. The chord
    /// through the middle segment meets the neighbouring edges, whose slopes
    /// are `∓cot α` in the frame of the segment, so this value is attained
    /// whenever the chord ends on those edges.
    pub fn segment_bound_sin_alpha(&self, i: usize, r: f64) -> f64 {
        let a = self.alpha(i);
        let ratio = 0.5 * (2.0 * r).exp_m1();
        (ratio * 2.0 * (0.5 * a).sin() * a.sin() / (0.5 * a).cos()).ln_1p()
    }

    pub fn summary(&self) -> NonintSummary {
        NonintSummary {
            s: self.s,
            terms: self.terms,
            safety: self.safety,
            c_s: self.c_s,
            vertices: self.polygon.len(),
            valid_radius: self.valid_radius(),
            entropy_band: self.entropy_band(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_has_six_vertices() {
        let ex = make_nonint_example(3.0, 1, 0.9).unwrap();
        assert_eq!(ex.polygon.len(), 6);
        for v in ex.polygon.vertices() {
            assert!((v.norm() - 1.0).abs() < 1e-15);
        }
        assert!(ex.polygon.circle_gaps().is_some());
    }

    #[test]
    fn middle_segment_attains_sin_alpha_form() {
        let ex = make_nonint_example(3.0, 50, 0.9).unwrap();
        for (i, r) in [(2, 3.0), (3, 4.0), (2, 6.0)] {
            let len = ex.middle_segment_length(i, r);
            let b = ex.segment_bound_sin_alpha(i, r);
            assert!((len - b).abs() < 1e-9 * len, "i={i} r={r} {len} {b}");
        }
        for (i, r) in [(7, 2.5), (20, 5.0)] {
            assert!(ex.middle_segment_length(i, r) > ex.segment_bound_sin_alpha(i, r));
        }
    }

    #[test]
    fn constant_for_s3() {
        let ex = make_nonint_example(3.0, 3, 0.9).unwrap();
        let want = 0.9 * PI / (3.0 * 1.202_056_903_159_594);
        assert!((ex.c_s - want).abs() < 1e-12 && (ex.c_s - 0.78418).abs() < 2e-4, "{}", ex.c_s);
    }
}

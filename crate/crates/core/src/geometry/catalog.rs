use super::{
    make_nonint_example, ConvexBody, Ellipsoid, Paraboloid, Polygon, Radial2d, RadialProfile,
    RoundedPolygon, Vector2,
};
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// JSON body specification, tagged by `"kind"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Polygon2d {
        vertices: Vec<[f64; 2]>,
    },
    /// Ellipse centered at the origin unless `origin` moves the marked point
    /// (given in the ellipse's own centered coordinates).
    Ellipse {
        semi_axes: [f64; 2],
        #[serde(default)]
        angle: f64,
        #[serde(default)]
        origin: Option<[f64; 2]>,
    },
    Disc {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        origin: Option<[f64; 2]>,
    },
    Ellipsoid {
        semi_axes: [f64; 3],
    },
    Radial2d {
        rho: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Parabola2d {
        c: f64,
    },
    NonintExample {
        s: f64,
        terms: usize,
        safety: f64,
    },
    RegularPolygon {
        m: usize,
        #[serde(default = "one")]
        circumradius: f64,
        #[serde(default)]
        phase: f64,
    },
    Square {
        #[serde(default = "one")]
        half_side: f64,
    },
    /// Triangle; defaults to `(1,0), (0,1), (-1,-1)`.
    Triangle {
        #[serde(default)]
        vertices: Option<[[f64; 2]; 3]>,
    },
    Stadium {
        half_length: f64,
        radius: f64,
    },
    RoundedPolygon {
        m: usize,
        corner: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// A constructed body of either supported dimension.
#[derive(Debug, Clone)]
pub enum Body {
    Planar(Arc<dyn ConvexBody<2>>),
    Spatial(Arc<dyn ConvexBody<3>>),
}

impl Body {
    pub fn dimension(&self) -> usize {
        match self {
            Body::Planar(_) => 2,
            Body::Spatial(_) => 3,
        }
    }

    pub fn planar(&self) -> Result<&Arc<dyn ConvexBody<2>>> {
        match self {
            Body::Planar(b) => Ok(b),
            Body::Spatial(_) => Err(crate::error::unsupported("operation needs a planar body")),
        }
    }
}

impl BodySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("body spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

fn param(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| invalid(format!("radial2d parameter '{key}' is missing")))
}

fn v2(p: &[f64; 2]) -> Vector2 {
    Vector2::new(p[0], p[1])
}

/// Radial profile from its catalog identifier and parameters.
pub fn radial_profile(rho: &str, params: &BTreeMap<String, f64>) -> Result<RadialProfile> {
    Ok(match rho {
        "circle" => RadialProfile::Circle {
            radius: param(params, "radius")?,
        },
        "shifted_circle" => RadialProfile::ShiftedCircle {
            radius: param(params, "radius")?,
            cx: param(params, "cx")?,
            cy: param(params, "cy")?,
        },
        "limacon" => RadialProfile::Limacon {
            b: param(params, "b")?,
            a: param(params, "a")?,
        },
        "cosine" => {
            let k = param(params, "k")?;
            if k < 0.0 || k.fract() != 0.0 {
                return Err(invalid("cosine profile needs a nonnegative integer k"));
            }
            RadialProfile::Cosine {
                r0: param(params, "r0")?,
                eps: param(params, "eps")?,
                k: k as u32,
            }
        }
        other => {
            return Err(invalid(format!(
                "unknown radial profile '{other}' (expected circle, shifted_circle, limacon, cosine)"
            )))
        }
    })
}

/// Builds the body described by `spec`.
pub fn make_body(spec: &BodySpec) -> Result<Body> {
    let planar = |b: Arc<dyn ConvexBody<2>>| Ok(Body::Planar(b));
    match spec {
        BodySpec::Polygon2d { vertices } => {
            planar(Arc::new(Polygon::new(vertices.iter().map(v2).collect())?))
        }
        BodySpec::Ellipse {
            semi_axes,
            angle,
            origin,
        } => {
            let e = Ellipsoid::ellipse(semi_axes[0], semi_axes[1], *angle, Vector2::zeros())?;
            let e = match origin {
                Some(o) => e.recentered(&v2(o))?,
                None => e,
            };
            planar(Arc::new(e))
        }
        BodySpec::Disc { radius, origin } => {
            let e = Ellipsoid::<2>::ball(*radius)?;
            let e = match origin {
                Some(o) => e.recentered(&v2(o))?,
                None => e,
            };
            planar(Arc::new(e))
        }
        BodySpec::Ellipsoid { semi_axes } => {
            Ok(Body::Spatial(Arc::new(Ellipsoid::<3>::axis_aligned(*semi_axes)?)))
        }
        BodySpec::Radial2d { rho, params } => {
            planar(Arc::new(Radial2d::new(radial_profile(rho, params)?)?))
        }
        BodySpec::Parabola2d { c } => planar(Arc::new(Paraboloid::<2>::planar(*c)?)),
        BodySpec::NonintExample { s, terms, safety } => {
            planar(Arc::new(make_nonint_example(*s, *terms, *safety)?.polygon))
        }
        BodySpec::RegularPolygon {
            m,
            circumradius,
            phase,
        } => planar(Arc::new(Polygon::regular(*m, *circumradius, *phase)?)),
        BodySpec::Square { half_side } => planar(Arc::new(Polygon::square(*half_side)?)),
        BodySpec::Triangle { vertices } => {
            let vs = vertices.unwrap_or([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]);
            planar(Arc::new(Polygon::new(vs.iter().map(v2).collect())?))
        }
        BodySpec::Stadium {
            half_length,
            radius,
        } => planar(Arc::new(RoundedPolygon::stadium(*half_length, *radius)?)),
        BodySpec::RoundedPolygon { m, corner } => {
            planar(Arc::new(RoundedPolygon::rounded_regular(*m, *corner)?))
        }
    }
}

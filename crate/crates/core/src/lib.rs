//! Hilbert geometry of convex bodies.
//!
//! The crate computes Hilbert distances and Finsler norms, Busemann
//! densities, growth of metric balls and spheres, volume-entropy fits and
//! the centro-affine and centro-projective areas of the boundary. All bodies
//! carry a marked interior point at the coordinate origin.
//!
//! ```
//! use hilbert_core::geometry::{Ellipsoid, Vector2};
//! use hilbert_core::metric::hilbert_distance;
//!
//! let disc = Ellipsoid::<2>::ball(1.0).unwrap();
//! let d = hilbert_distance(&disc, &Vector2::zeros(), &Vector2::new(0.5, 0.0)).unwrap();
//! assert!((d - 0.5f64.atanh()).abs() < 1e-15);
//! ```

pub mod areas;
pub mod busemann;
pub mod error;
pub mod geometry;
pub mod growth;
pub mod metric;
pub mod numerics;

pub use error::{GeomError, Result};

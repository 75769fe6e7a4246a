//! Evaluation of the Gauss hypergeometric function `F(a, b, c; z)` on the
//! compactified real line and on the Riemann sphere by a multidomain
//! ultraspherical spectral method.
//!
//! The real line is covered by three domains around the singular points
//! `0`, `1` and `∞`. On each, a Kummer-transformed form of the
//! hypergeometric equation is solved for its regular local solution in
//! Chebyshev coefficient space; the pieces are glued by `C¹` matching. In
//! the complex plane the same local solutions are obtained on ellipses and
//! a disk by solving the ODE along the boundary and continuing the boundary
//! data harmonically into the interior.
//!
//! ```
//! use hyperspec::{HypParams, HypRepresentation};
//!
//! let p = HypParams::real(-1.0 / 3.0, 0.5, 0.5).unwrap();
//! let rep = HypRepresentation::build(&p, &Default::default()).unwrap();
//! let f = rep.eval_real(0.5).unwrap();
//! assert!((f.re - 0.5f64.powf(1.0 / 3.0)).abs() < 1e-13);
//! ```

pub mod cheb;
pub mod complex_plane;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod laplace;
pub mod linalg;
pub mod operators;
pub mod params;
pub mod real_line;
pub mod us;

pub use cheb::{ChebSeries, Endpoint, Interval, C64};
pub use complex_plane::{ComplexOptions, ComplexRepresentation, Domain};
pub use error::{Error, Result};
pub use geometry::DomainGeometry;
pub use params::{genericness_check, GenericnessReport, HypParams};
pub use real_line::{HypRepresentation, RealOptions};

//! Ellipses and disks that cover the Riemann sphere.
//!
//! With the semi-axis `A` along the real axis, domain I is the ellipse with
//! semi-axes `(A, B)` around `z = 0`, domain II the same ellipse around
//! `z = 1` and domain III the exterior of the circle `|z - 1/2| = R`, which in
//! `s = -1/(z - 1/2)` is the disk of radius `1/R`. `B` and `R` are chosen so
//! that the circle passes through the points where the two ellipses meet and
//! through `z = -A` and `z = 1 + A`.

use std::f64::consts::PI;

use crate::cheb::C64;
use crate::error::{Error, Result};

pub const DEFAULT_A: f64 = 0.6;

/// `w = P ζ + Q ζ̄` with `ζ = r e^{iφ}`, `P = (a + b)/2`, `Q = (a - b)/2`:
/// the ellipse with semi-axes `a` (real) and `b` (imaginary) around the
/// origin of a local variable. `a == b` is a disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
}

impl Ellipse {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(Error::InvalidArgument(format!("ellipse semi-axes must be positive, got ({a}, {b})")));
        }
        Ok(Ellipse { a, b })
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(radius, radius)
    }

    pub fn is_disk(&self) -> bool {
        self.a == self.b
    }

    pub fn p(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn q(&self) -> f64 {
        0.5 * (self.a - self.b)
    }

    pub fn point(&self, r: f64, phi: f64) -> C64 {
        let e = C64::from_polar(r, phi);
        e * self.p() + e.conj() * self.q()
    }

    /// `dw/dφ` on the boundary `r = 1`.
    pub fn boundary_derivative(&self, phi: f64) -> C64 {
        let e = C64::from_polar(1.0, phi);
        C64::new(0.0, 1.0) * (e * self.p() - e.conj() * self.q())
    }

    /// Elliptic polar coordinates `(r, φ)` of `w`, `φ ∈ (-π, π]`.
    pub fn coordinates(&self, w: C64) -> (f64, f64) {
        let zeta = (w * self.p() - w.conj() * self.q()) / (self.a * self.b);
        let r = zeta.norm();
        let phi = if r == 0.0 { 0.0 } else { zeta.arg() };
        (r, phi)
    }

    /// `(Re w / a)² + (Im w / b)² <= 1`.
    pub fn contains(&self, w: C64) -> bool {
        (w.re / self.a).powi(2) + (w.im / self.b).powi(2) <= 1.0
    }
}

/// Parameters of the three-domain cover for a given `A ∈ (1/2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainGeometry {
    pub a: f64,
    pub b: f64,
    /// Radius of the circle `|z - 1/2| = R` bounding domain III.
    pub r: f64,
}

impl DomainGeometry {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.5 && a < 1.0) {
            return Err(Error::InvalidArgument(format!("ellipse parameter A must lie in (1/2, 1), got {a}")));
        }
        let root = (1.0 - 1.0 / (4.0 * a * a)).sqrt();
        // 1 - A = 2 - 1/R, written so that A = 0.6 gives R = 0.625 exactly
        let r = 1.0 / (1.0 + a);
        let b = r / root;
        Ok(DomainGeometry { a, b, r })
    }

    /// Domains I and II in their local variables `z` and `t = 1 - z`.
    pub fn ellipse(&self) -> Ellipse {
        Ellipse { a: self.a, b: self.b }
    }

    /// Domain III in `s = -1/(z - 1/2)`.
    pub fn disk(&self) -> Ellipse {
        Ellipse {
            a: 1.0 / self.r,
            b: 1.0 / self.r,
        }
    }

    /// Points where the ellipses around 0 and 1 intersect: `1/2 ± i y`.
    pub fn intersections(&self) -> [C64; 2] {
        let y = self.b * (1.0 - 1.0 / (4.0 * self.a * self.a)).sqrt();
        [C64::new(0.5, y), C64::new(0.5, -y)]
    }
}

impl Default for DomainGeometry {
    fn default() -> Self {
        DomainGeometry::new(DEFAULT_A).expect("default A is valid")
    }
}

/// Angles `φ_j = -π + 2πj/m` used when sampling boundary data.
pub fn boundary_angle(j: usize, m: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / m as f64
}

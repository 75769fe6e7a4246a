//! Hypergeometric parameters and the genericness diagnostics.

use std::fmt;

use crate::cheb::C64;
use crate::error::{Error, Result};

/// Default warning threshold for the distance of a parameter combination to
/// the integers.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Distances at or below this are treated as exact integers.
const EXACT_TOL: f64 = 1e-14;

/// Parameters `(a, b, c)` of `F(a, b, c; z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl HypParams {
    pub fn new(a: C64, b: C64, c: C64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("parameter {name} is not finite")));
            }
        }
        Ok(HypParams { a, b, c })
    }

    pub fn real(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0))
    }

    /// `c - a - b`, the nontrivial exponent at `z = 1`.
    pub fn kappa(&self) -> C64 {
        self.c - self.a - self.b
    }

    pub fn swapped(&self) -> Self {
        HypParams {
            a: self.b,
            b: self.a,
            c: self.c,
        }
    }

    /// `F` is symmetric in `a` and `b`; order them so that `Re b >= Re a`.
    pub fn normalized(&self) -> Self {
        if self.b.re < self.a.re {
            self.swapped()
        } else {
            *self
        }
    }
}

/// Distance from `w` to the nearest integer, and that integer.
pub fn distance_to_integer(w: C64) -> (f64, i64) {
    let k = w.re.round();
    ((w.re - k).hypot(w.im), k as i64)
}

/// The parameter combinations that must avoid the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// `c` must not be a non-positive integer.
    C,
    /// `c - a - b` must not be an integer.
    CMinusAMinusB,
    /// `b - a` must not be an integer.
    BMinusA,
}

impl ConditionKind {
    fn label(self) -> &'static str {
        match self {
            ConditionKind::C => "c",
            ConditionKind::CMinusAMinusB => "c - a - b",
            ConditionKind::BMinusA => "b - a",
        }
    }
}

/// One violated or nearly violated genericness condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub kind: ConditionKind,
    pub distance: f64,
    pub nearest: i64,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.distance <= EXACT_TOL {
            write!(f, "{} equals the integer {}", self.kind.label(), self.nearest)
        } else {
            write!(
                f,
                "{} is within {:.3e} of the integer {}",
                self.kind.label(),
                self.distance,
                self.nearest
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericnessReport {
    pub dist_c: f64,
    pub dist_c_minus_a_minus_b: f64,
    pub dist_b_minus_a: f64,
    pub epsilon: f64,
    /// Exact violations; the local solutions are then not independent.
    pub failures: Vec<Condition>,
    /// Near violations; results are returned but may lose accuracy.
    pub warnings: Vec<Condition>,
}

impl GenericnessReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.failures.is_empty() {
            Ok(self)
        } else {
            Err(Error::Degenerate(self.failures))
        }
    }
}

/// Check `c ∉ ℤ≤0`, `c - a - b ∉ ℤ` and `b - a ∉ ℤ`.
///
/// A positive integer `c` only affects the second solution at `z = 0`,
/// which the method never uses, so it is neither a failure nor a warning;
/// its distance is still reported.
pub fn genericness_check(p: &HypParams, epsilon: f64) -> GenericnessReport {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    let checks = [
        (ConditionKind::C, p.c),
        (ConditionKind::CMinusAMinusB, p.kappa()),
        (ConditionKind::BMinusA, p.b - p.a),
    ];
    let mut dists = [0.0; 3];
    for (slot, (kind, w)) in dists.iter_mut().zip(checks) {
        let (distance, nearest) = distance_to_integer(w);
        *slot = distance;
        if kind == ConditionKind::C && nearest > 0 {
            continue;
        }
        let cond = Condition {
            kind,
            distance,
            nearest,
        };
        if distance <= EXACT_TOL {
            failures.push(cond);
        } else if distance < epsilon {
            warnings.push(cond);
        }
    }
    GenericnessReport {
        dist_c: dists[0],
        dist_c_minus_a_minus_b: dists[1],
        dist_b_minus_a: dists[2],
        epsilon,
        failures,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_example_distances() {
        let p = HypParams::real(-1.0 / 3.0, 0.5, 0.5).unwrap();
        let r = genericness_check(&p, DEFAULT_EPSILON);
        assert!((r.dist_c - 0.5).abs() < 1e-15);
        assert!((r.dist_c_minus_a_minus_b - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.dist_b_minus_a - 1.0 / 6.0).abs() < 1e-15);
        assert!(r.passes() && r.warnings.is_empty());
    }

    #[test]
    fn logarithmic_case_fails() {
        let p = HypParams::real(1.0, 1.0, 2.0).unwrap();
        let r = genericness_check(&p, DEFAULT_EPSILON);
        assert!(!r.passes());
        let kinds: Vec<_> = r.failures.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, vec![ConditionKind::CMinusAMinusB, ConditionKind::BMinusA]);
        let msg = r.into_result().unwrap_err().to_string();
        assert!(msg.contains("c - a - b equals the integer 0"), "{msg}");
        assert!(msg.contains("b - a equals the integer 0"), "{msg}");
    }

    #[test]
    fn negative_c_distances() {
        let p = HypParams::real(0.1, 0.2, -0.3).unwrap();
        let r = genericness_check(&p, DEFAULT_EPSILON);
        assert!((r.dist_c - 0.3).abs() < 1e-15);
        assert!((r.dist_c_minus_a_minus_b - 0.4).abs() < 1e-15);
        assert!((r.dist_b_minus_a - 0.1).abs() < 1e-15);
        assert!(r.passes());
    }

    #[test]
    fn near_violation_warns() {
        let p = HypParams::real(0.25, 0.25 + 1.0 + 1e-8, 0.9).unwrap();
        let r = genericness_check(&p, DEFAULT_EPSILON);
        assert!(r.passes());
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.warnings[0].kind, ConditionKind::BMinusA);
        assert_eq!(r.warnings[0].nearest, 1);
    }

    #[test]
    fn non_positive_integer_c_fails_positive_does_not() {
        let bad = HypParams::real(0.3, 0.45, -2.0).unwrap();
        assert!(!genericness_check(&bad, DEFAULT_EPSILON).passes());
        let fine = HypParams::real(4.0, 1.1, 2.0).unwrap();
        let r = genericness_check(&fine, DEFAULT_EPSILON);
        assert!(r.passes() && r.warnings.is_empty());
        assert_eq!(r.dist_c, 0.0);
    }

    #[test]
    fn normalization_orders_real_parts() {
        let p = HypParams::real(2.0, -1.0, 0.5).unwrap().normalized();
        assert_eq!(p.a.re, -1.0);
        assert_eq!(p.b.re, 2.0);
    }
}

//! Modular phase-space arithmetic: the odd dimension, root-of-unity phases,
//! and lattice points.
//!
//! All lattice arithmetic uses the canonical representative range `[0, d)`;
//! the centered window `[-(d-1)/2, (d-1)/2]` is a display and export
//! convention only. Division by two is the modular inverse
//! `2^{-1} = (d+1)/2 (mod d)`, which is well defined exactly because `d` is
//! odd; no floating division of indices ever occurs.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// An odd positive Hilbert-space dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dim(usize);

impl Dim {
    /// Validates that `d` is odd and positive.
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 || d % 2 == 0 {
            return Err(Error::InvalidDim(d as i64));
        }
        Ok(Dim(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn as_i64(self) -> i64 {
        self.0 as i64
    }

    /// The modular inverse of 2, i.e. `(d + 1) / 2`.
    pub fn half_inverse(self) -> i64 {
        (self.as_i64() + 1) / 2
    }

    /// Largest centered coordinate, `(d - 1) / 2`.
    pub fn centered_max(self) -> i64 {
        (self.as_i64() - 1) / 2
    }

    /// Reduce an integer to the canonical representative in `[0, d)`.
    pub fn reduce(self, x: i64) -> i64 {
        x.rem_euclid(self.as_i64())
    }

    /// Map a canonical representative into the centered window
    /// `[-(d-1)/2, (d-1)/2]`.
    pub fn center(self, x: i64) -> i64 {
        let r = self.reduce(x);
        if r > self.centered_max() {
            r - self.as_i64()
        } else {
            r
        }
    }

    /// All lattice points in row-major canonical order.
    pub fn lattice(self) -> impl Iterator<Item = PhasePoint> {
        let d = self.as_i64();
        (0..d).flat_map(move |a1| (0..d).map(move |a2| PhasePoint { a1, a2 }))
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The root-of-unity phases attached to a dimension:
/// `omega = exp(2 pi i / d)`, `tau = exp(i pi (d+1) / d)` and
/// `epsilon = tau^d`, which equals `+1` for odd `d` so that displacement
/// operators are periodic on the `d x d` lattice.
///
/// For odd `d`, `tau = omega^{(d+1)/2}` is itself a `d`-th root of unity, so
/// every phase in the algebra is `omega` to some exponent mod `d`. Exponents
/// are reduced before evaluating the complex exponential, keeping phases
/// accurate for arbitrarily large integer exponents.
#[derive(Clone, Copy, Debug)]
pub struct PhaseRoots {
    d: Dim,
}

impl PhaseRoots {
    pub fn new(d: Dim) -> Self {
        PhaseRoots { d }
    }

    pub fn dim(self) -> Dim {
        self.d
    }

    /// `omega^e` with the exponent reduced mod `d`.
    pub fn omega_pow(self, e: i64) -> C64 {
        let r = self.d.reduce(e);
        C64::from_polar(1.0, TAU * r as f64 / self.d.as_i64() as f64)
    }

    /// `tau^e = omega^{e (d+1)/2}` with the exponent reduced mod `d`.
    pub fn tau_pow(self, e: i64) -> C64 {
        let half = self.d.half_inverse();
        self.omega_pow(self.d.reduce(e) * half)
    }

    pub fn omega(self) -> C64 {
        self.omega_pow(1)
    }

    pub fn tau(self) -> C64 {
        self.tau_pow(1)
    }

    /// `tau^d`, identically `+1` for odd `d`.
    pub fn epsilon(self) -> f64 {
        1.0
    }
}

/// A point of the discrete `d x d` phase-space lattice, held as the canonical
/// representative `(a1, a2)` with both coordinates in `[0, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePoint {
    a1: i64,
    a2: i64,
}

impl PhasePoint {
    pub fn new(d: Dim, a1: i64, a2: i64) -> Self {
        PhasePoint {
            a1: d.reduce(a1),
            a2: d.reduce(a2),
        }
    }

    pub fn origin() -> Self {
        PhasePoint { a1: 0, a2: 0 }
    }

    pub fn a1(self) -> i64 {
        self.a1
    }

    pub fn a2(self) -> i64 {
        self.a2
    }

    pub fn is_origin(self) -> bool {
        self.a1 == 0 && self.a2 == 0
    }

    /// Display representative with both coordinates in
    /// `[-(d-1)/2, (d-1)/2]`.
    pub fn centered(self, d: Dim) -> (i64, i64) {
        (d.center(self.a1), d.center(self.a2))
    }

    pub fn neg(self, d: Dim) -> Self {
        PhasePoint::new(d, -self.a1, -self.a2)
    }

    pub fn add(self, d: Dim, other: Self) -> Self {
        PhasePoint::new(d, self.a1 + other.a1, self.a2 + other.a2)
    }

    pub fn sub(self, d: Dim, other: Self) -> Self {
        PhasePoint::new(d, self.a1 - other.a1, self.a2 - other.a2)
    }

    /// Linear index `a1 * d + a2` into row-major `d x d` grids.
    pub fn index(self, d: Dim) -> usize {
        (self.a1 * d.as_i64() + self.a2) as usize
    }
}

/// The symplectic product `<a, b> = a2 b1 - a1 b2`, the phase exponent in the
/// displacement composition rule. Antisymmetric: `<a, b> = -<b, a>`.
pub fn symplectic(a: PhasePoint, b: PhasePoint) -> i64 {
    a.a2() * b.a1() - a.a1() * b.a2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_rejects_even_and_zero() {
        assert!(Dim::new(0).is_err());
        assert!(Dim::new(2).is_err());
        assert!(Dim::new(4).is_err());
        assert!(Dim::new(66).is_err());
        assert!(Dim::new(1).is_ok());
        assert!(Dim::new(3).is_ok());
        assert!(Dim::new(67).is_ok());
    }

    #[test]
    fn phase_roots_identities() {
        for d in [1usize, 3, 5, 7, 9, 15, 67] {
            let roots = PhaseRoots::new(Dim::new(d).unwrap());
            let omega = roots.omega();
            let tau = roots.tau();
            // omega = tau^2
            assert!((omega - tau * tau).norm() < 1e-14, "d = {d}");
            // tau against its defining value exp(i pi (d+1)/d)
            let tau_direct = C64::from_polar(1.0, std::f64::consts::PI * (d as f64 + 1.0) / d as f64);
            assert!((tau - tau_direct).norm() < 1e-13, "d = {d}");
            // tau^d = epsilon = +1 for odd d
            assert!((roots.tau_pow(d as i64) - C64::new(1.0, 0.0)).norm() < 1e-14);
            // tau^{2d} = tau^{d^2} = 1
            assert!((roots.tau_pow(2 * d as i64) - C64::new(1.0, 0.0)).norm() < 1e-14);
            assert!((roots.tau_pow((d * d) as i64) - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn tau_pow_matches_unreduced_angle() {
        // tau^e for raw e must agree with the mod-d reduced evaluation
        let roots = PhaseRoots::new(Dim::new(7).unwrap());
        for e in -50i64..50 {
            let direct = C64::from_polar(1.0, std::f64::consts::PI * 8.0 / 7.0 * e as f64);
            assert!(
                (roots.tau_pow(e) - direct).norm() < 1e-12,
                "e = {e}: {} vs {}",
                roots.tau_pow(e),
                direct
            );
        }
    }

    #[test]
    fn centered_window() {
        let d = Dim::new(5).unwrap();
        let p = PhasePoint::new(d, 3, 4);
        assert_eq!(p.centered(d), (-2, -1));
        let q = PhasePoint::new(d, -1, -7);
        assert_eq!((q.a1(), q.a2()), (4, 3));
        assert_eq!(q.centered(d), (-1, -2));
    }

    #[test]
    fn symplectic_antisymmetry() {
        let d = Dim::new(7).unwrap();
        for a in d.lattice() {
            for b in d.lattice() {
                assert_eq!(symplectic(a, b), -symplectic(b, a));
            }
        }
    }
}

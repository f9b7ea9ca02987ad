//! Weyl-Heisenberg operators for odd dimension: the Schwinger shift and
//! clock pair, phase-space displacements, reflections, and the Fourier and
//! parity operators.
//!
//! Conventions:
//!
//! - shift:  `V |n> = |n+1 mod d>`,  clock:  `U |n> = omega^n |n>`
//! - displacement:  `T_a = V^{a1} U^{a2} tau^{a1 a2}`, equivalently
//!   `T_a = sum_j |j + a1/2><j - a1/2| omega^{a2 j}` with `1/2 = (d+1)/2 mod d`
//! - reflection:  `R_x = (1/d) sum_a omega^{<x,a>} T_a
//!              = sum_j |x1 + j/2><x1 - j/2| omega^{x2 j}`
//! - Fourier:  `<i|F|j> = omega^{-ij} / sqrt(d)`
//!
//! The displacements compose as `T_a T_b = tau^{<a,b>} T_{a+b}` and are
//! orthogonal under the trace product, `tr(T_b T_a^dag) = d delta(b, a)`;
//! the reflections are Hermitian, unitary and involutive. Those identities
//! are exercised exhaustively in the test suites rather than assumed.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::dim::{symplectic, Dim, PhasePoint, PhaseRoots};
use crate::op::{DenseOp, PureState};

/// The Schwinger pair `(V, U)`: cyclic position shift and clock.
pub fn schwinger_uv(d: Dim) -> (DenseOp, DenseOp) {
    let roots = PhaseRoots::new(d);
    let n = d.get();
    let shift = DenseOp::from_fn(d, |row, col| {
        if row == (col + 1) % n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let clock = DenseOp::from_fn(d, |row, col| {
        if row == col {
            roots.omega_pow(row as i64)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    (shift, clock)
}

/// The displacement `T_a = V^{a1} U^{a2} tau^{a1 a2}`, materialized from its
/// matrix elements `<j + a1/2| T_a |j - a1/2> = omega^{a2 j}`.
pub fn displacement(d: Dim, alpha: PhasePoint) -> DenseOp {
    let roots = PhaseRoots::new(d);
    let half = d.half_inverse();
    let mut op = DenseOp::zeros(d);
    let mut m = op.matrix().clone();
    for j in 0..d.as_i64() {
        let row = d.reduce(j + alpha.a1() * half) as usize;
        let col = d.reduce(j - alpha.a1() * half) as usize;
        m[(row, col)] += roots.omega_pow(alpha.a2() * j);
    }
    op = DenseOp::new(d, m).expect("square by construction");
    op
}

/// The reflection (phase-space point) operator
/// `R_x = sum_j |x1 + j/2><x1 - j/2| omega^{x2 j}`.
pub fn reflection(d: Dim, x: PhasePoint) -> DenseOp {
    let roots = PhaseRoots::new(d);
    let half = d.half_inverse();
    let mut m = DenseOp::zeros(d).matrix().clone();
    for j in 0..d.as_i64() {
        let row = d.reduce(x.a1() + j * half) as usize;
        let col = d.reduce(x.a1() - j * half) as usize;
        m[(row, col)] += roots.omega_pow(x.a2() * j);
    }
    DenseOp::new(d, m).expect("square by construction")
}

/// The parity operator `R_{0,0} |j> = |-j mod d>`.
pub fn parity(d: Dim) -> DenseOp {
    reflection(d, PhasePoint::origin())
}

/// The Fourier operator, `<i|F|j> = omega^{-ij} / sqrt(d)`.
pub fn fourier(d: Dim) -> DenseOp {
    let roots = PhaseRoots::new(d);
    let scale = 1.0 / (d.get() as f64).sqrt();
    DenseOp::from_fn(d, |i, j| {
        roots.omega_pow(-((i * j) as i64)) * scale
    })
}

/// Applies `T_a` to an amplitude vector in `O(d)` without materializing the
/// matrix: `(T_a psi)[m + a1] = tau^{a1 a2} omega^{a2 m} psi[m]`.
pub fn displace_amps(d: Dim, alpha: PhasePoint, amps: &DVector<C64>) -> DVector<C64> {
    let roots = PhaseRoots::new(d);
    let phase = roots.tau_pow(alpha.a1() * alpha.a2());
    let mut out = DVector::from_element(d.get(), C64::new(0.0, 0.0));
    for m in 0..d.as_i64() {
        let target = d.reduce(m + alpha.a1()) as usize;
        out[target] = phase * roots.omega_pow(alpha.a2() * m) * amps[m as usize];
    }
    out
}

/// `<psi| T_a |psi>` in `O(d)`.
pub fn displacement_expectation(state: &PureState, alpha: PhasePoint) -> C64 {
    let d = state.dim();
    let roots = PhaseRoots::new(d);
    let amps = state.amps();
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..d.as_i64() {
        let shifted = d.reduce(m + alpha.a1()) as usize;
        acc += amps[shifted].conj() * roots.omega_pow(alpha.a2() * m) * amps[m as usize];
    }
    acc * roots.tau_pow(alpha.a1() * alpha.a2())
}

/// `<psi| R_x |psi>` in `O(d)`.
pub fn reflection_expectation(state: &PureState, x: PhasePoint) -> C64 {
    let d = state.dim();
    let roots = PhaseRoots::new(d);
    let half = d.half_inverse();
    let amps = state.amps();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..d.as_i64() {
        let row = d.reduce(x.a1() + j * half) as usize;
        let col = d.reduce(x.a1() - j * half) as usize;
        acc += amps[row].conj() * roots.omega_pow(x.a2() * j) * amps[col];
    }
    acc
}

/// The displacement composition phase: `T_a T_b = tau^{<a,b>} T_{a+b}`.
pub fn composition_phase(d: Dim, a: PhasePoint, b: PhasePoint) -> C64 {
    PhaseRoots::new(d).tau_pow(symplectic(a, b))
}

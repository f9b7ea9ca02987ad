//! Chord and Wigner representations of operators and states.
//!
//! The chord (characteristic) function of an operator is its expansion in
//! the displacement basis, `C_A(a) = tr(A T_a^dag)`; the Wigner function is
//! the expansion in the reflection basis, `W_A(x) = tr(A R_x)`. With the
//! normalization used here, `C_A(0,0) = tr(A) = (1/d) sum_x W_A(x)` and both
//! grids are bounded by 1 in modulus for a normalized state. Reconstruction
//! inverts either expansion: `A = (1/d) sum C(a) T_a = (1/d) sum W(x) R_x`.
//!
//! A state is a SIC-POVM fiducial exactly when its chord function has
//! constant modulus `1/sqrt(d+1)` away from the origin; the remaining
//! freedom is a field of phases `psi_a`, antisymmetric under `a -> -a`.
//! [`extract_sic_phases`] reads that field off a fiducial and
//! [`assemble_sigma`] rebuilds the corresponding unit-trace Hermitian
//! operator (which need not be positive for arbitrary phases).

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::dim::{symplectic, Dim, PhasePoint, PhaseRoots};
use crate::error::{Error, Result};
use crate::op::{DenseOp, PureState};
use crate::weyl::{displacement, displacement_expectation, reflection, reflection_expectation};

/// Chord coefficients `C(a)` on the `d x d` lattice, row-major in the
/// canonical representatives.
#[derive(Clone, Debug)]
pub struct ChordGrid {
    dim: Dim,
    values: Vec<C64>,
}

impl ChordGrid {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn get(&self, a: PhasePoint) -> C64 {
        self.values[a.index(self.dim)]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `max_a |C(-a) - conj C(a)|`; zero for grids of Hermitian operators.
    pub fn conjugation_residual(&self) -> f64 {
        self.dim
            .lattice()
            .map(|a| (self.get(a.neg(self.dim)) - self.get(a).conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Wigner values `W(x)` on the `d x d` lattice. The imaginary parts of
/// `tr(A R_x)` are dropped from the stored grid but their maximum modulus is
/// recorded, so a non-Hermitian source is reported rather than silently
/// truncated.
#[derive(Clone, Debug)]
pub struct WignerGrid {
    dim: Dim,
    values: Vec<f64>,
    max_imag_residual: f64,
}

impl WignerGrid {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn get(&self, x: PhasePoint) -> f64 {
        self.values[x.index(self.dim)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_imag_residual(&self) -> f64 {
        self.max_imag_residual
    }

    /// `(1/d) sum_x W(x)`, which equals `tr(A)` for the source operator.
    pub fn trace(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.dim.get() as f64
    }
}

/// `C_A(a) = tr(A T_a^dag)` over the full lattice.
pub fn chord_transform(a: &DenseOp) -> ChordGrid {
    let d = a.dim();
    let values = d
        .lattice()
        .map(|p| a.trace_product(&displacement(d, p).adjoint()))
        .collect();
    ChordGrid { dim: d, values }
}

/// `W_A(x) = tr(A R_x)` over the full lattice.
pub fn wigner_transform(a: &DenseOp) -> WignerGrid {
    let d = a.dim();
    let mut values = Vec::with_capacity(d.get() * d.get());
    let mut max_imag = 0.0f64;
    for x in d.lattice() {
        let w = a.trace_product(&reflection(d, x));
        max_imag = max_imag.max(w.im.abs());
        values.push(w.re);
    }
    WignerGrid {
        dim: d,
        values,
        max_imag_residual: max_imag,
    }
}

/// Chord function of a pure state, `C(a) = conj(<psi| T_a |psi>)`, computed
/// in `O(d^3)` total via the sparse displacement action.
pub fn chord_of_state(state: &PureState) -> ChordGrid {
    let d = state.dim();
    let values = d
        .lattice()
        .map(|p| displacement_expectation(state, p).conj())
        .collect();
    ChordGrid { dim: d, values }
}

/// Wigner function of a pure state, `W(x) = <psi| R_x |psi>`.
pub fn wigner_of_state(state: &PureState) -> WignerGrid {
    let d = state.dim();
    let mut values = Vec::with_capacity(d.get() * d.get());
    let mut max_imag = 0.0f64;
    for x in d.lattice() {
        let w = reflection_expectation(state, x);
        max_imag = max_imag.max(w.im.abs());
        values.push(w.re);
    }
    WignerGrid {
        dim: d,
        values,
        max_imag_residual: max_imag,
    }
}

/// Inverts the chord expansion: `A = (1/d) sum_a C(a) T_a`.
pub fn reconstruct_from_chord(grid: &ChordGrid) -> DenseOp {
    let d = grid.dim;
    let mut acc = DenseOp::zeros(d);
    for a in d.lattice() {
        acc = acc.add(&displacement(d, a).scale(grid.get(a)));
    }
    acc.scale(C64::new(1.0 / d.get() as f64, 0.0))
}

/// Inverts the Wigner expansion: `A = (1/d) sum_x W(x) R_x`.
pub fn reconstruct_from_wigner(grid: &WignerGrid) -> DenseOp {
    let d = grid.dim;
    let mut acc = DenseOp::zeros(d);
    for x in d.lattice() {
        acc = acc.add(&reflection(d, x).scale(C64::new(grid.get(x), 0.0)));
    }
    acc.scale(C64::new(1.0 / d.get() as f64, 0.0))
}

/// Max-norm residual of the pure-state condition in the chord picture,
/// `C(a) = (1/d) sum_b C(b) C(a-b) tau^{<a,b>}`. Vanishes iff the source
/// density operator is a pure state.
pub fn purity_residual_chord(grid: &ChordGrid) -> f64 {
    let d = grid.dim;
    let roots = PhaseRoots::new(d);
    let inv_d = 1.0 / d.get() as f64;
    let mut residual = 0.0f64;
    for a in d.lattice() {
        let mut rhs = C64::new(0.0, 0.0);
        for b in d.lattice() {
            rhs += grid.get(b) * grid.get(a.sub(d, b)) * roots.tau_pow(symplectic(a, b));
        }
        residual = residual.max((grid.get(a) - rhs * inv_d).norm());
    }
    residual
}

/// Max-norm residual of the pure-state condition in the Wigner picture,
/// `W(x) = (1/d^2) sum_{x1,x2} W(x1) W(x2) omega^{2<x-x1, x-x2>}`.
pub fn purity_residual_wigner(grid: &WignerGrid) -> f64 {
    let d = grid.dim;
    let roots = PhaseRoots::new(d);
    let inv_d2 = 1.0 / (d.get() * d.get()) as f64;
    let mut residual = 0.0f64;
    for x in d.lattice() {
        let mut rhs = C64::new(0.0, 0.0);
        for x1 in d.lattice() {
            let w1 = grid.get(x1);
            if w1 == 0.0 {
                continue;
            }
            let r1 = x.sub(d, x1);
            for x2 in d.lattice() {
                let r2 = x.sub(d, x2);
                rhs += C64::new(w1 * grid.get(x2), 0.0) * roots.omega_pow(2 * symplectic(r1, r2));
            }
        }
        residual = residual.max((C64::new(grid.get(x), 0.0) - rhs * inv_d2).norm());
    }
    residual
}

/// The phase field `psi_a = arg C(a)` of a fiducial state's chord function.
///
/// Hermiticity forces `psi_{-a} = -psi_a`, so only one representative of
/// each `(a, -a)` pair is stored: the one whose centered coordinates are
/// lexicographically smaller. Phases live in `(-pi, pi]`.
#[derive(Clone, Debug)]
pub struct PhaseField {
    dim: Dim,
    psi: BTreeMap<(i64, i64), f64>,
}

impl PhaseField {
    /// Canonical representative of the `(a, -a)` pair, in centered
    /// coordinates.
    pub fn canonical_key(d: Dim, a: PhasePoint) -> (i64, i64) {
        let c = a.centered(d);
        let n = a.neg(d).centered(d);
        c.min(n)
    }

    /// Builds a field from `(point, phase)` pairs, folding each pair onto
    /// its canonical representative and rejecting antisymmetry conflicts.
    pub fn from_pairs(d: Dim, pairs: impl IntoIterator<Item = (PhasePoint, f64)>) -> Result<Self> {
        let mut psi = BTreeMap::new();
        for (a, mut phase) in pairs {
            if a.is_origin() {
                return Err(Error::InconsistentPhases { point: (0, 0) });
            }
            let key = Self::canonical_key(d, a);
            if a.centered(d) != key {
                phase = -phase;
            }
            let phase = wrap_phase(phase);
            if let Some(&existing) = psi.get(&key) {
                if wrap_phase(existing - phase).abs() > 1e-9 {
                    return Err(Error::InconsistentPhases { point: key });
                }
            } else {
                psi.insert(key, phase);
            }
        }
        Ok(PhaseField { dim: d, psi })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Stored representatives `(centered point, phase)`.
    pub fn entries(&self) -> impl Iterator<Item = ((i64, i64), f64)> + '_ {
        self.psi.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// `psi_a` for any nonzero lattice point, using the stored
    /// representative and antisymmetry.
    pub fn phase_at(&self, a: PhasePoint) -> Option<f64> {
        let key = Self::canonical_key(self.dim, a);
        let stored = *self.psi.get(&key)?;
        Some(if a.centered(self.dim) == key {
            stored
        } else {
            wrap_phase(-stored)
        })
    }
}

fn wrap_phase(mut p: f64) -> f64 {
    use std::f64::consts::PI;
    while p > PI {
        p -= 2.0 * PI;
    }
    while p <= -PI {
        p += 2.0 * PI;
    }
    p
}

/// Default tolerance on `| |C(a)| sqrt(d+1) - 1 |` for accepting a state as
/// a fiducial in [`extract_sic_phases`].
pub const FIDUCIAL_MAGNITUDE_TOL: f64 = 1e-8;

/// Reads the chord phase field off a fiducial state, verifying that every
/// nonzero chord coefficient has modulus `1/sqrt(d+1)` to within `tol`.
pub fn extract_sic_phases(state: &PureState, tol: f64) -> Result<PhaseField> {
    let d = state.dim();
    let grid = chord_of_state(state);
    let scale = ((d.get() + 1) as f64).sqrt();
    let mut max_dev = 0.0f64;
    for a in d.lattice() {
        if a.is_origin() {
            continue;
        }
        max_dev = max_dev.max((grid.get(a).norm() * scale - 1.0).abs());
    }
    if max_dev > tol {
        return Err(Error::NotFiducial { max_dev, tol });
    }
    PhaseField::from_pairs(
        d,
        d.lattice()
            .filter(|a| !a.is_origin())
            // fold onto representatives; read the phase from the key's own
            // chord value so both members of a pair agree exactly
            .map(|a| (a, grid.get(a).arg())),
    )
}

/// Assembles `sigma = (1/d) [ 1 + (d+1)^{-1/2} sum_{a != 0} e^{i psi_a} T_a ]`
/// from a phase field covering every nonzero pair.
///
/// The result is Hermitian with `tr sigma = tr sigma^2 = 1` but is not
/// necessarily positive; inspect the minimum eigenvalue to decide.
pub fn assemble_sigma(phases: &PhaseField) -> Result<DenseOp> {
    let d = phases.dim();
    let expected = (d.get() * d.get() - 1) / 2;
    if phases.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: phases.len(),
        });
    }
    let mut acc = DenseOp::zeros(d);
    for a in d.lattice() {
        if a.is_origin() {
            continue;
        }
        let psi = phases.phase_at(a).ok_or(Error::InconsistentPhases {
            point: a.centered(d),
        })?;
        acc = acc.add(&displacement(d, a).scale(C64::from_polar(1.0, psi)));
    }
    let weight = 1.0 / ((d.get() + 1) as f64).sqrt();
    let sigma = DenseOp::identity(d)
        .add(&acc.scale(C64::new(weight, 0.0)))
        .scale(C64::new(1.0 / d.get() as f64, 0.0));
    Ok(sigma)
}

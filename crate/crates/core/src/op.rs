//! Dense operators and pure states on the `d`-dimensional space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::dim::Dim;
use crate::error::{Error, Result};

/// A dense `d x d` complex matrix. Structural properties (hermitian,
/// unitary) are verified on demand, never trusted as stored flags.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOp {
    dim: Dim,
    entries: DMatrix<C64>,
}

impl DenseOp {
    pub fn new(dim: Dim, entries: DMatrix<C64>) -> Result<Self> {
        let d = dim.get();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(DenseOp { dim, entries })
    }

    pub fn zeros(dim: Dim) -> Self {
        DenseOp {
            dim,
            entries: DMatrix::zeros(dim.get(), dim.get()),
        }
    }

    pub fn identity(dim: Dim) -> Self {
        DenseOp {
            dim,
            entries: DMatrix::identity(dim.get(), dim.get()),
        }
    }

    pub fn from_fn(dim: Dim, f: impl Fn(usize, usize) -> C64) -> Self {
        DenseOp {
            dim,
            entries: DMatrix::from_fn(dim.get(), dim.get(), f),
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn mul(&self, other: &DenseOp) -> DenseOp {
        DenseOp {
            dim: self.dim,
            entries: &self.entries * &other.entries,
        }
    }

    pub fn adjoint(&self) -> DenseOp {
        DenseOp {
            dim: self.dim,
            entries: self.entries.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> DenseOp {
        DenseOp {
            dim: self.dim,
            entries: &self.entries * c,
        }
    }

    pub fn add(&self, other: &DenseOp) -> DenseOp {
        DenseOp {
            dim: self.dim,
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &DenseOp) -> DenseOp {
        DenseOp {
            dim: self.dim,
            entries: &self.entries - &other.entries,
        }
    }

    pub fn trace(&self) -> C64 {
        self.entries.diagonal().sum()
    }

    /// `tr(self * other)` without materializing the product.
    pub fn trace_product(&self, other: &DenseOp) -> C64 {
        let d = self.dim.get();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.entries[(i, j)] * other.entries[(j, i)];
            }
        }
        acc
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.entries * v
    }

    /// Maximum entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &DenseOp) -> f64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.mul(&self.adjoint())
            .max_abs_diff(&DenseOp::identity(self.dim))
            <= tol
    }

    pub fn commutator_max_abs(&self, other: &DenseOp) -> f64 {
        self.mul(other).max_abs_diff(&other.mul(self))
    }

    /// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
    /// Deterministic for fixed input. Returns `(eigenvalues, eigenvectors)`
    /// with eigenvectors as matrix columns matching the eigenvalue order.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let eig = self.entries.clone().symmetric_eigen();
        let d = self.dim.get();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .partial_cmp(&eig.eigenvalues[j])
                .expect("finite eigenvalues")
                .then(i.cmp(&j))
        });
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(d, d);
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }
        (values, vectors)
    }

    /// Smallest eigenvalue of a Hermitian operator.
    pub fn min_eigenvalue(&self) -> f64 {
        let (values, _) = self.hermitian_eigen();
        values[0]
    }
}

/// A normalized pure state, as amplitudes `<n|psi>` in the position basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dim: Dim,
    amps: DVector<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized to within `1e-12`.
    pub fn new(dim: Dim, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != dim.get() {
            return Err(Error::DimensionMismatch {
                expected: dim.get(),
                got: amps.len(),
            });
        }
        let v = DVector::from_vec(amps);
        let dev = (v.norm() - 1.0).abs();
        if dev > 1e-12 {
            return Err(Error::NotNormalizable(dev));
        }
        Ok(PureState { dim, amps: v })
    }

    /// Normalizes arbitrary amplitudes and applies the canonical global
    /// phase (largest-modulus amplitude real and nonnegative; ties broken
    /// by the lowest index).
    pub fn normalized(dim: Dim, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != dim.get() {
            return Err(Error::DimensionMismatch {
                expected: dim.get(),
                got: amps.len(),
            });
        }
        let mut v = DVector::from_vec(amps);
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::NotNormalizable((norm - 1.0).abs()));
        }
        v /= C64::new(norm, 0.0);
        canonicalize_phase(&mut v);
        Ok(PureState { dim, amps: v })
    }

    pub fn basis_state(dim: Dim, n: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); dim.get()];
        amps[n] = C64::new(1.0, 0.0);
        PureState {
            dim,
            amps: DVector::from_vec(amps),
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amp(&self, n: usize) -> C64 {
        self.amps[n]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `<self| A |self>`.
    pub fn expectation(&self, op: &DenseOp) -> C64 {
        self.amps.dotc(&op.apply(&self.amps))
    }

    /// The projector `|self><self|`.
    pub fn projector(&self) -> DenseOp {
        DenseOp::from_fn(self.dim, |i, j| self.amps[i] * self.amps[j].conj())
    }

    /// Returns the state with the canonical global phase applied.
    pub fn canonicalized(&self) -> PureState {
        let mut v = self.amps.clone();
        canonicalize_phase(&mut v);
        PureState { dim: self.dim, amps: v }
    }
}

/// Rotate the global phase so the largest-modulus component is real and
/// nonnegative. Ties on the modulus pick the lowest index.
pub(crate) fn canonicalize_phase(v: &mut DVector<C64>) {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm_sqr();
        if n > best_norm {
            best_norm = n;
            best = i;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        let phase = z / C64::new(z.norm(), 0.0);
        *v /= phase;
        // pin the pivot exactly onto the real axis
        let pivot = v[best];
        v[best] = C64::new(pivot.norm() * pivot.re.signum(), 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn normalized_canonical_phase() {
        let d = Dim::new(3).unwrap();
        let s = PureState::normalized(d, vec![c(0.0, 0.3), c(0.0, -1.2), c(0.4, 0.0)]).unwrap();
        assert!((s.amps().norm() - 1.0).abs() < 1e-15);
        // index 1 has the largest modulus; must be real nonnegative
        assert!(s.amp(1).im.abs() < 1e-15);
        assert!(s.amp(1).re > 0.0);
    }

    #[test]
    fn new_rejects_unnormalized() {
        let d = Dim::new(3).unwrap();
        assert!(matches!(
            PureState::new(d, vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            Err(Error::NotNormalizable(_))
        ));
    }

    #[test]
    fn projector_is_hermitian_idempotent() {
        let d = Dim::new(5).unwrap();
        let s = PureState::normalized(
            d,
            (0..5).map(|n| c(n as f64 + 0.3, 1.0 - n as f64 * 0.2)).collect(),
        )
        .unwrap();
        let p = s.projector();
        assert!(p.is_hermitian(1e-14));
        assert!(p.mul(&p).max_abs_diff(&p) < 1e-14);
        assert!((p.trace() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hermitian_eigen_residual() {
        let d = Dim::new(7).unwrap();
        let a = DenseOp::from_fn(d, |i, j| {
            c(
                (i * j) as f64 * 0.17 - i as f64 * 0.4,
                i as f64 - j as f64,
            )
        });
        let h = a.add(&a.adjoint()).scale(c(0.5, 0.0));
        let (vals, vecs) = h.hermitian_eigen();
        for k in 0..7 {
            let v = DVector::from_column_slice(vecs.column(k).as_slice());
            let res = (h.apply(&v) - &v * c(vals[k], 0.0)).norm();
            assert!(res < 1e-12, "residual {res} at k = {k}");
        }
        // ascending order
        for k in 1..7 {
            assert!(vals[k] >= vals[k - 1]);
        }
        // orthonormality
        for a in 0..7 {
            for b in 0..7 {
                let dot = vecs.column(a).dotc(&vecs.column(b));
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}

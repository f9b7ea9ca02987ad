//! The order-3 Zauner unitary, its classical lattice map, invariant regions
//! and cycles, cycle operators, the Harper-variant Hamiltonian that commutes
//! with the symmetry, and the labeled joint eigenbasis.
//!
//! The Zauner unitary `Z` quantizes the elliptic cat map
//! `a -> (-a2, a1 - a2) mod d` on the `d x d` lattice: conjugation maps
//! displacements among themselves, `Z T_a Z^dag = T_{Za}`. Every orbit of
//! the lattice map has period three apart from the origin (and, when `3 | d`,
//! the two extra fixed points `+-(d/3, -d/3)`). The lattice splits into three
//! invariant regions labeled by `eps = trunc(2 (a1 - a2) / d)` on centered
//! coordinates, mirroring the invariant regions of the continuous map.
//!
//! `Z` alone is highly degenerate (three eigenvalues `e^{2 pi i k/3}`), so a
//! Hermitian operator commuting with both `Z` and parity is used to resolve
//! a complete eigenbasis: the Harper variant
//! `H = (U + U^dag)/2 + (V + V^dag)/2 + (U V tau^* + V^dag U^dag tau)/2`,
//! the cycle operator of the orbit `(0,1), (1,0), (-1,-1)`. Each eigenvector
//! carries the triple `(eps_i, r, k)` with `R_0 v = r v` and
//! `Z v = e^{2 pi i k/3} v`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;

use crate::dim::{Dim, PhasePoint, PhaseRoots};
use crate::error::{Error, Result};
use crate::op::{DenseOp, PureState};
use crate::reps::{chord_of_state, wigner_of_state, PhaseField};
use crate::weyl::{displacement, parity, schwinger_uv};

/// The Zauner unitary, `<k|Z|j> = e^{i chi}/sqrt(d) tau^{2kj + k^2}` with
/// `chi = pi (d-1)/12`, normalized so that `Z^3 = 1`.
pub fn zauner_unitary(d: Dim) -> DenseOp {
    let roots = PhaseRoots::new(d);
    let chi = C64::from_polar(1.0 / (d.get() as f64).sqrt(), PI * (d.as_i64() - 1) as f64 / 12.0);
    DenseOp::from_fn(d, |k, j| {
        let k = k as i64;
        let j = j as i64;
        chi * roots.tau_pow(2 * k * j + k * k)
    })
}

/// One step of the discretized classical Zauner map,
/// `a -> (-a2, a1 - a2) mod d`.
pub fn classical_map(d: Dim, alpha: PhasePoint) -> PhasePoint {
    PhasePoint::new(d, -alpha.a2(), alpha.a1() - alpha.a2())
}

/// Invariant-region label `eps in {-1, 0, 1}` of a lattice point,
/// `eps = trunc(2 (a1 - a2) / d)` on centered representatives (integer part,
/// truncated toward zero, which reproduces the region census exactly).
pub fn region_of(d: Dim, alpha: PhasePoint) -> i8 {
    let (c1, c2) = alpha.centered(d);
    (2 * (c1 - c2) / d.as_i64()) as i8
}

/// Number of lattice points in region `eps`: `(3 d^2 + 1)/4` for the central
/// region and `(d-1)(d+1)/8` for each wing.
pub fn region_size_formula(d: Dim, eps: i8) -> usize {
    let dd = d.get();
    if eps == 0 {
        (3 * dd * dd + 1) / 4
    } else {
        (dd - 1) * (dd + 1) / 8
    }
}

/// Closed-form count of 3-cycles in region `eps`.
pub fn cycle_count_formula(d: Dim, eps: i8) -> usize {
    let dd = d.get();
    if eps == 0 {
        (dd * dd - 1) / 4
    } else if dd % 3 == 0 {
        (dd * dd - 9) / 24
    } else {
        (dd * dd - 1) / 24
    }
}

/// Closed-form count of phases left free by the Zauner symmetry after
/// pairing cycles under `a -> -a`: `(d^2 + 3)/6` when `3 | d`, else
/// `(d^2 - 1)/6`.
pub fn independent_phase_formula(d: Dim) -> usize {
    let dd = d.get();
    if dd % 3 == 0 {
        (dd * dd + 3) / 6
    } else {
        (dd * dd - 1) / 6
    }
}

/// The partition of the lattice into Zauner orbits.
#[derive(Clone, Debug)]
pub struct CycleSet {
    dim: Dim,
    fixed_points: Vec<PhasePoint>,
    cycles: Vec<[PhasePoint; 3]>,
    cycles_per_region: [usize; 3], // indexed by eps + 1
    independent_phases: usize,
}

impl CycleSet {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn fixed_points(&self) -> &[PhasePoint] {
        &self.fixed_points
    }

    pub fn cycles(&self) -> &[[PhasePoint; 3]] {
        &self.cycles
    }

    /// Number of 3-cycles in region `eps`.
    pub fn cycle_count(&self, eps: i8) -> usize {
        self.cycles_per_region[(eps + 1) as usize]
    }

    /// Number of phases not constrained by the Zauner symmetry.
    pub fn independent_phases(&self) -> usize {
        self.independent_phases
    }

    /// All orbits (fixed points as singletons) in enumeration order.
    pub fn orbits(&self) -> impl Iterator<Item = &[PhasePoint]> {
        self.fixed_points
            .iter()
            .map(std::slice::from_ref)
            .chain(self.cycles.iter().map(|c| c.as_slice()))
    }
}

/// Enumerates every orbit of the lattice map and cross-checks the census
/// against the closed-form counts. Panics on an internal inconsistency,
/// which would indicate a broken map, not bad input.
pub fn enumerate_cycles(d: Dim) -> CycleSet {
    let n = d.get();
    let mut seen = vec![false; n * n];
    let mut fixed_points = Vec::new();
    let mut cycles = Vec::new();
    let mut cycles_per_region = [0usize; 3];

    for p in d.lattice() {
        if seen[p.index(d)] {
            continue;
        }
        let q = classical_map(d, p);
        if q == p {
            seen[p.index(d)] = true;
            fixed_points.push(p);
            continue;
        }
        let r = classical_map(d, q);
        assert_eq!(classical_map(d, r), p, "orbit of {p:?} does not close in 3 steps");
        for m in [p, q, r] {
            seen[m.index(d)] = true;
        }
        let eps = region_of(d, p);
        assert!(
            region_of(d, q) == eps && region_of(d, r) == eps,
            "region label not invariant along the orbit of {p:?}"
        );
        cycles_per_region[(eps + 1) as usize] += 1;
        cycles.push([p, q, r]);
    }

    // pair 3-cycles under a -> -a; no cycle is self-paired for odd d
    let cycle_key = |c: &[PhasePoint; 3]| -> PhasePoint { *c.iter().min().unwrap() };
    let mut keys: Vec<(PhasePoint, PhasePoint)> = cycles
        .iter()
        .map(|c| {
            let neg = [c[0].neg(d), c[1].neg(d), c[2].neg(d)];
            let k = cycle_key(c);
            let nk = cycle_key(&neg);
            (k.min(nk), k.max(nk))
        })
        .collect();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len() * 2, cycles.len(), "cycle negation pairing failed");
    let nonzero_fixed = fixed_points.iter().filter(|p| !p.is_origin()).count();
    let independent_phases = keys.len() + nonzero_fixed / 2;

    // census against the closed forms
    let expected_fixed = if n % 3 == 0 { 3 } else { 1 };
    assert_eq!(fixed_points.len(), expected_fixed);
    for eps in [-1i8, 0, 1] {
        assert_eq!(
            cycles_per_region[(eps + 1) as usize],
            cycle_count_formula(d, eps),
            "cycle count mismatch in region {eps} at d = {n}"
        );
        let pts = d.lattice().filter(|p| region_of(d, *p) == eps).count();
        assert_eq!(pts, region_size_formula(d, eps), "region size mismatch at d = {n}");
    }
    assert_eq!(independent_phases, independent_phase_formula(d));

    CycleSet {
        dim: d,
        fixed_points,
        cycles,
        cycles_per_region,
        independent_phases,
    }
}

/// The cycle operator `M_p = sum_{a in p} T_a` of one orbit.
pub fn cycle_operator(d: Dim, orbit: &[PhasePoint]) -> Result<DenseOp> {
    let valid = match orbit {
        [p] => classical_map(d, *p) == *p,
        [p, q, r] => {
            let set = [*p, *q, *r];
            set.iter().all(|m| set.contains(&classical_map(d, *m)))
                && p != q
                && q != r
                && p != r
        }
        _ => false,
    };
    if !valid {
        return Err(Error::NotAnOrbit);
    }
    let mut acc = DenseOp::zeros(d);
    for &a in orbit {
        acc = acc.add(&displacement(d, a));
    }
    Ok(acc)
}

/// Hermitian part of a cycle operator, `(M_p + M_p^dag)/2`; commutes with
/// both the Zauner unitary and parity.
pub fn cycle_hamiltonian(d: Dim, orbit: &[PhasePoint]) -> Result<DenseOp> {
    let m = cycle_operator(d, orbit)?;
    Ok(m.add(&m.adjoint()).scale(C64::new(0.5, 0.0)))
}

/// The Harper-variant Hamiltonian
/// `H = (U + U^dag)/2 + (V + V^dag)/2 + (U V tau^* + V^dag U^dag tau)/2`,
/// the cycle Hamiltonian of the orbit `(0,1), (1,0), (-1,-1)`.
pub fn harper_hamiltonian(d: Dim) -> DenseOp {
    let roots = PhaseRoots::new(d);
    let (shift, clock) = schwinger_uv(d);
    let half = C64::new(0.5, 0.0);
    let uv = clock.mul(&shift).scale(roots.tau_pow(-1));
    clock
        .add(&clock.adjoint())
        .add(&shift.add(&shift.adjoint()))
        .add(&uv.add(&uv.adjoint()))
        .scale(half)
}

/// The classical Hamiltonian whose Weyl quantization `H` approaches as
/// `d -> infinity`: `H(q,p) = cos 2 pi q + cos 2 pi p - cos 2 pi (q - p)`.
pub fn classical_h(q: f64, p: f64) -> f64 {
    (TAU * q).cos() + (TAU * p).cos() - (TAU * (q - p)).cos()
}

/// `classical_h` sampled on an `n x n` grid over `[0,1)^2`.
#[derive(Clone, Debug)]
pub struct ClassicalHGrid {
    pub n: usize,
    /// Row-major `h(q_i, p_j)` with `q_i = i/n`, `p_j = j/n`.
    pub values: Vec<f64>,
}

pub fn classical_h_grid(n: usize) -> ClassicalHGrid {
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            values.push(classical_h(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    ClassicalHGrid { n, values }
}

/// One entry of the labeled joint eigenbasis.
#[derive(Clone, Debug)]
pub struct EigenEntry {
    pub index: usize,
    pub eps: f64,
    /// Parity quantum number, `+1` or `-1`.
    pub r: i8,
    /// Zauner quantum number in `{0, 1, 2}`; `2` is the same sector as the
    /// signed label `-1`.
    pub k: u8,
    pub vector: PureState,
}

impl EigenEntry {
    /// The `k` label in signed form, identifying `2` with `-1`.
    pub fn k_signed(&self) -> i8 {
        if self.k == 2 {
            -1
        } else {
            self.k as i8
        }
    }
}

/// The complete eigenbasis of the Harper-variant Hamiltonian, labeled by
/// parity and Zauner quantum numbers and sorted by ascending eigenvalue.
#[derive(Clone, Debug)]
pub struct LabeledEigenbasis {
    dim: Dim,
    entries: Vec<EigenEntry>,
}

impl LabeledEigenbasis {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn entries(&self) -> &[EigenEntry] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &EigenEntry {
        &self.entries[i]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Threshold below which adjacent Hamiltonian eigenvalues are treated as one
/// degenerate cluster and re-split against `Z`, then `R_0`.
const DEGENERACY_GAP: f64 = 1e-8;

/// Diagonalizes the Harper-variant Hamiltonian and labels each eigenvector
/// with its parity and Zauner quantum numbers.
///
/// Near-degenerate clusters of `H` are resolved inside their own span by the
/// exact sector projectors `(1/3) sum_m e^{-2 pi i k m / 3} Z^m` and the
/// parity projectors `(1 +- R_0)/2` before labeling, so the returned vectors
/// are joint eigenvectors of all three operators.
pub fn labeled_eigenbasis(d: Dim) -> Result<LabeledEigenbasis> {
    let h = harper_hamiltonian(d);
    let z = zauner_unitary(d);
    let r0 = parity(d);
    let (vals, vecs) = h.hermitian_eigen();
    let n = d.get();

    let mut columns: Vec<nalgebra::DVector<C64>> =
        (0..n).map(|c| vecs.column(c).into_owned()).collect();

    // resolve degenerate clusters
    let mut start = 0usize;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals[end] - vals[end - 1]).abs() < DEGENERACY_GAP {
            end += 1;
        }
        if end - start > 1 {
            let cluster: Vec<_> = columns[start..end].to_vec();
            let resolved = split_cluster(&cluster, &z, &r0)?;
            columns[start..end].clone_from_slice(&resolved);
        }
        start = end;
    }

    // label, canonicalize phases, and re-read eps as a Rayleigh quotient
    let mut entries: Vec<EigenEntry> = Vec::with_capacity(n);
    for v in columns {
        let state = PureState::normalized(d, v.iter().copied().collect())?;
        let eps = state.expectation(&h).re;
        let r_exp = state.expectation(&r0);
        let r = if r_exp.re >= 0.0 { 1i8 } else { -1i8 };
        let r_dist = (r_exp - C64::new(r as f64, 0.0)).norm();
        if r_dist > 0.1 {
            return Err(Error::LabelAmbiguous {
                what: "parity",
                dist: r_dist,
            });
        }
        let z_exp = state.expectation(&z);
        let k = ((z_exp.arg() * 3.0 / TAU).round().rem_euclid(3.0)) as u8;
        let k_dist = (z_exp - C64::from_polar(1.0, TAU * k as f64 / 3.0)).norm();
        if k_dist > 0.1 {
            return Err(Error::LabelAmbiguous {
                what: "zauner sector",
                dist: k_dist,
            });
        }
        entries.push(EigenEntry {
            index: 0,
            eps,
            r,
            k,
            vector: state,
        });
    }
    entries.sort_by(|a, b| {
        a.eps
            .partial_cmp(&b.eps)
            .expect("finite eigenvalues")
            .then(a.k.cmp(&b.k))
            .then(b.r.cmp(&a.r))
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.index = i;
    }
    Ok(LabeledEigenbasis { dim: d, entries })
}

/// Splits a degenerate cluster into joint eigenvectors of `Z` and `R_0`.
fn split_cluster(
    cluster: &[nalgebra::DVector<C64>],
    z: &DenseOp,
    r0: &DenseOp,
) -> Result<Vec<nalgebra::DVector<C64>>> {
    let mut out: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(cluster.len());
    for k in 0u8..3 {
        // images of the cluster basis under the sector projector
        let mut sector: Vec<nalgebra::DVector<C64>> = Vec::new();
        for v in cluster {
            let zv = z.apply(v);
            let zzv = z.apply(&zv);
            let w0 = C64::from_polar(1.0, -TAU * k as f64 / 3.0);
            let p = (v + zv * w0 + zzv * w0 * w0) * C64::new(1.0 / 3.0, 0.0);
            sector.push(p);
        }
        for r_sign in [1.0f64, -1.0] {
            let mut group: Vec<nalgebra::DVector<C64>> = Vec::new();
            for v in &sector {
                let rv = r0.apply(v);
                group.push((v + rv * C64::new(r_sign, 0.0)) * C64::new(0.5, 0.0));
            }
            // orthonormalize against everything accepted so far
            for mut w in group {
                for b in &out {
                    let overlap: C64 = b.dotc(&w);
                    w -= b * overlap;
                }
                let norm = w.norm();
                if norm > 1e-6 {
                    out.push(w / C64::new(norm, 0.0));
                }
            }
        }
    }
    if out.len() != cluster.len() {
        return Err(Error::LabelAmbiguous {
            what: "degenerate cluster split",
            dist: (out.len() as f64 - cluster.len() as f64).abs(),
        });
    }
    Ok(out)
}

/// Which Zauner sector supports an expansion, if a single one does.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    Pure(u8),
    Mixed,
}

/// Expansion of a state in a labeled eigenbasis.
#[derive(Clone, Debug)]
pub struct ExpansionCoeffs {
    dim: Dim,
    coeffs: Vec<C64>,
    sector: Sector,
}

impl ExpansionCoeffs {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// `a_i = <psi_i | state>` in basis order.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    /// Indices with `|a_i|` above the support threshold.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > SUPPORT_THRESHOLD)
            .map(|(i, _)| i)
            .collect()
    }
}

const SUPPORT_THRESHOLD: f64 = 1e-8;

/// Expands `state` in the labeled eigenbasis and reports the common sector
/// of its support.
pub fn expand_in_eigenbasis(state: &PureState, basis: &LabeledEigenbasis) -> Result<ExpansionCoeffs> {
    if state.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim().get(),
            got: state.dim().get(),
        });
    }
    let coeffs: Vec<C64> = basis
        .entries()
        .iter()
        .map(|e| e.vector.inner(state))
        .collect();
    let mut sector: Option<u8> = None;
    let mut mixed = false;
    for (i, a) in coeffs.iter().enumerate() {
        if a.norm() > SUPPORT_THRESHOLD {
            let k = basis.entry(i).k;
            match sector {
                None => sector = Some(k),
                Some(prev) if prev != k => mixed = true,
                _ => {}
            }
        }
    }
    let sector = if mixed {
        Sector::Mixed
    } else {
        Sector::Pure(sector.unwrap_or(0))
    };
    Ok(ExpansionCoeffs {
        dim: state.dim(),
        coeffs,
        sector,
    })
}

/// Checks that a chord phase field is constant along every 3-cycle; returns
/// the maximum phase spread encountered.
pub fn phase_cycle_spread(field: &PhaseField, cycles: &CycleSet) -> f64 {
    let mut max_spread = 0.0f64;
    for cycle in cycles.cycles() {
        let phases: Vec<f64> = cycle
            .iter()
            .filter_map(|&a| field.phase_at(a))
            .collect();
        for w in phases.windows(2) {
            let diff = (w[1] - w[0]).rem_euclid(TAU);
            let diff = diff.min(TAU - diff);
            max_spread = max_spread.max(diff);
        }
    }
    max_spread
}

/// Maximum spread of a state's Wigner values along the 3-cycles.
pub fn wigner_cycle_spread(state: &PureState, cycles: &CycleSet) -> f64 {
    let grid = wigner_of_state(state);
    let mut max_spread = 0.0f64;
    for cycle in cycles.cycles() {
        let w: Vec<f64> = cycle.iter().map(|&x| grid.get(x)).collect();
        for pair in w.windows(2) {
            max_spread = max_spread.max((pair[1] - pair[0]).abs());
        }
    }
    max_spread
}

/// Maximum spread of a state's chord phases along the 3-cycles, read from
/// the raw chord function (no fiducial assumption).
pub fn chord_phase_cycle_spread(state: &PureState, cycles: &CycleSet) -> f64 {
    let grid = chord_of_state(state);
    let mut max_spread = 0.0f64;
    for cycle in cycles.cycles() {
        let args: Vec<f64> = cycle.iter().map(|&a| grid.get(a).arg()).collect();
        for pair in args.windows(2) {
            let diff = (pair[1] - pair[0]).rem_euclid(TAU);
            let diff = diff.min(TAU - diff);
            max_spread = max_spread.max(diff);
        }
    }
    max_spread
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::fourier;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    #[test]
    fn zauner_cubes_to_identity() {
        for dd in [3usize, 5, 7, 9, 13] {
            let d = dim(dd);
            let z = zauner_unitary(d);
            assert!(z.is_unitary(1e-12), "d = {dd}");
            let z3 = z.mul(&z).mul(&z);
            assert!(
                z3.max_abs_diff(&DenseOp::identity(d)) < 1e-12,
                "d = {dd}: {}",
                z3.max_abs_diff(&DenseOp::identity(d))
            );
        }
    }

    #[test]
    fn zauner_eigenvalues_are_cube_roots() {
        let d = dim(7);
        let z = zauner_unitary(d);
        // eigenvalues of Z via the Hermitian decomposition of (Z + Z^dag)/2
        // would conflate sectors; check the defining property instead:
        // P_k = (1/3) sum e^{-2 pi i k m/3} Z^m are projectors summing to 1
        let z2 = z.mul(&z);
        let third = C64::new(1.0 / 3.0, 0.0);
        let mut sum = DenseOp::zeros(d);
        for k in 0..3 {
            let w = C64::from_polar(1.0, -TAU * k as f64 / 3.0);
            let p = DenseOp::identity(d)
                .add(&z.scale(w))
                .add(&z2.scale(w * w))
                .scale(third);
            assert!(p.mul(&p).max_abs_diff(&p) < 1e-10, "P_{k} not idempotent");
            sum = sum.add(&p);
        }
        assert!(sum.max_abs_diff(&DenseOp::identity(d)) < 1e-12);
    }

    #[test]
    fn zauner_symmetries() {
        for dd in [3usize, 7, 9] {
            let d = dim(dd);
            let z = zauner_unitary(d);
            let r0 = parity(d);
            let f = fourier(d);
            assert!(r0.mul(&z).mul(&r0).max_abs_diff(&z) < 1e-12);
            // F Z F^dag = (Z^*)^{-1} = Z^T for unitary Z
            let lhs = f.mul(&z).mul(&f.adjoint());
            let rhs = DenseOp::new(d, z.matrix().transpose()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12, "d = {dd}");
        }
    }

    #[test]
    fn zauner_conjugates_displacements() {
        // Z T_a Z^dag = T_{Za} for all lattice points, d = 9
        let d = dim(9);
        let z = zauner_unitary(d);
        for a in d.lattice() {
            let lhs = z.mul(&displacement(d, a)).mul(&z.adjoint());
            let rhs = displacement(d, classical_map(d, a));
            assert!(lhs.max_abs_diff(&rhs) < 1e-11, "a = {a:?}");
        }
    }

    #[test]
    fn classical_map_fixed_points_and_orbits() {
        let d = dim(9);
        assert_eq!(
            classical_map(d, PhasePoint::origin()),
            PhasePoint::origin()
        );
        let fp = PhasePoint::new(d, 3, -3);
        assert_eq!(classical_map(d, fp), fp);

        let d7 = dim(7);
        let p = PhasePoint::new(d7, 0, 1);
        let q = classical_map(d7, p);
        assert_eq!(q.centered(d7), (-1, -1));
        let r = classical_map(d7, q);
        assert_eq!(r.centered(d7), (1, 0));
        assert_eq!(classical_map(d7, r), p);
    }

    #[test]
    fn region_labels() {
        let d = dim(7);
        assert_eq!(region_of(d, PhasePoint::origin()), 0);
        let mut census = [0usize; 3];
        for p in d.lattice() {
            census[(region_of(d, p) + 1) as usize] += 1;
        }
        assert_eq!(census, [6, 37, 6]);
        let d9 = dim(9);
        assert_eq!(region_of(d9, PhasePoint::new(d9, 3, -3)), 1);
    }

    #[test]
    fn cycle_census_d7_d9_d15() {
        let c7 = enumerate_cycles(dim(7));
        assert_eq!(c7.cycle_count(0), 12);
        assert_eq!(c7.cycle_count(1), 2);
        assert_eq!(c7.cycle_count(-1), 2);
        assert_eq!(c7.fixed_points().len(), 1);
        assert_eq!(c7.independent_phases(), 8);

        let c9 = enumerate_cycles(dim(9));
        assert_eq!(c9.cycle_count(0), 20);
        assert_eq!(c9.cycle_count(1), 3);
        assert_eq!(c9.cycle_count(-1), 3);
        assert_eq!(c9.fixed_points().len(), 3);
        assert_eq!(c9.independent_phases(), 14);

        let c15 = enumerate_cycles(dim(15));
        assert_eq!(c15.cycle_count(0), 56);
        assert_eq!(c15.cycle_count(1), 9);
        assert_eq!(c15.cycle_count(-1), 9);
        assert_eq!(c15.independent_phases(), 38);
    }

    #[test]
    fn cycle_enumeration_all_odd_d() {
        // enumerate_cycles asserts the closed-form census internally
        for dd in (3..=67usize).step_by(2) {
            enumerate_cycles(dim(dd));
        }
    }

    #[test]
    fn cycle_operator_properties() {
        let d = dim(7);
        let z = zauner_unitary(d);
        let r0 = parity(d);
        // the origin orbit gives the identity
        let m0 = cycle_operator(d, &[PhasePoint::origin()]).unwrap();
        assert!(m0.max_abs_diff(&DenseOp::identity(d)) < 1e-14);
        // the orbit of (0,1)
        let p = PhasePoint::new(d, 0, 1);
        let orbit = [p, classical_map(d, p), classical_map(d, classical_map(d, p))];
        let m = cycle_operator(d, &orbit).unwrap();
        assert!(m.commutator_max_abs(&z) < 1e-12);
        let h = cycle_hamiltonian(d, &orbit).unwrap();
        assert!(h.is_hermitian(1e-14));
        assert!(h.commutator_max_abs(&z) < 1e-12);
        assert!(h.commutator_max_abs(&r0) < 1e-12);
        // and it equals the Harper-variant Hamiltonian
        assert!(h.max_abs_diff(&harper_hamiltonian(d)) < 1e-13);
        // a non-orbit is rejected
        let bad = [p, PhasePoint::new(d, 1, 1), PhasePoint::new(d, 2, 2)];
        assert!(matches!(cycle_operator(d, &bad), Err(Error::NotAnOrbit)));
    }

    #[test]
    fn harper_hermitian_and_commuting() {
        for dd in [3usize, 7, 15] {
            let d = dim(dd);
            let h = harper_hamiltonian(d);
            assert!(h.max_abs_diff(&h.adjoint()) < 1e-14);
            assert!(h.commutator_max_abs(&zauner_unitary(d)) < 1e-12);
            assert!(h.commutator_max_abs(&parity(d)) < 1e-12);
        }
    }

    #[test]
    fn classical_h_values() {
        assert!((classical_h(0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((classical_h(1.0 / 3.0, 2.0 / 3.0) + 0.5).abs() < 1e-14);
        // doubly periodic
        for (q, p) in [(0.13, 0.57), (0.9, 0.42)] {
            assert!((classical_h(q, p) - classical_h(q + 1.0, p)).abs() < 1e-12);
            assert!((classical_h(q, p) - classical_h(q, p + 1.0)).abs() < 1e-12);
        }
        // the classical map permutes the cosine triple (q, p, q - p), so the
        // accumulated value around a 3-cycle is the same from any of its
        // three starting points
        let cycle_sum = |q: f64, p: f64| -> f64 {
            classical_h(q, p) + classical_h(-p, q - p) + classical_h(p - q, -q)
        };
        for (q, p) in [(0.13, 0.57), (0.9, 0.42), (0.31, 0.31)] {
            let s = cycle_sum(q, p);
            assert!((s - cycle_sum(-p, q - p)).abs() < 1e-12);
            assert!((s - cycle_sum(p - q, -q)).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_h_is_semiclassical_limit_of_harper() {
        // the quantum spectrum fills out the classical range [-3, 3/2]
        let d = dim(31);
        let (vals, _) = harper_hamiltonian(d).hermitian_eigen();
        assert!(vals[0] >= -3.0 - 1e-10);
        assert!(vals[30] <= 1.5 + 1e-10);
        assert!(vals[0] < -2.7, "ground level {} far from -3", vals[0]);
        assert!(vals[30] > 1.35, "top level {} far from 3/2", vals[30]);
    }

    #[test]
    fn eigenbasis_complete_and_labeled() {
        for dd in [7usize, 9] {
            let d = dim(dd);
            let basis = labeled_eigenbasis(d).unwrap();
            assert_eq!(basis.len(), dd);
            let h = harper_hamiltonian(d);
            let z = zauner_unitary(d);
            let r0 = parity(d);
            let hnorm = h.max_abs();
            // completeness
            let mut sum = DenseOp::zeros(d);
            for e in basis.entries() {
                sum = sum.add(&e.vector.projector());
            }
            assert!(sum.max_abs_diff(&DenseOp::identity(d)) < 1e-10);
            for e in basis.entries() {
                let v = e.vector.amps();
                let hv = h.apply(v);
                let res = (&hv - v * C64::new(e.eps, 0.0)).norm();
                assert!(res < 1e-11 * hnorm.max(1.0), "H residual {res}");
                let rv = r0.apply(v);
                assert!((&rv - v * C64::new(e.r as f64, 0.0)).norm() < 1e-9);
                let zv = z.apply(v);
                let w = C64::from_polar(1.0, TAU * e.k as f64 / 3.0);
                assert!((&zv - v * w).norm() < 1e-9, "Z residual at d = {dd}");
            }
            // ascending eigenvalues
            for pair in basis.entries().windows(2) {
                assert!(pair[0].eps <= pair[1].eps + 1e-12);
            }
        }
    }

    #[test]
    fn table_values_d7() {
        // published eigenvalues and quantum numbers of the d = 7 Hamiltonian
        let basis = labeled_eigenbasis(dim(7)).unwrap();
        let expected: [(f64, i8, i8); 7] = [
            (-2.315069600541, -1, -1),
            (-1.118527682059, 1, 0),
            (-0.209389069220, -1, 1),
            (0.337407948091, 1, -1),
            (0.940071117953, 1, 1),
            (1.024458669761, -1, 0),
            (1.341048616015, 1, 0),
        ];
        for (i, &(eps, r, k_signed)) in expected.iter().enumerate() {
            let e = basis.entry(i);
            assert!(
                (e.eps - eps).abs() < 1e-10,
                "eigenvalue {i}: {} vs {eps}",
                e.eps
            );
            assert_eq!(e.r, r, "r label at {i}");
            assert_eq!(e.k_signed(), k_signed, "k label at {i}");
        }
    }

    #[test]
    fn expansion_completeness() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(3);
        let d = dim(7);
        let basis = labeled_eigenbasis(d).unwrap();
        let amps: Vec<C64> = (0..7)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let psi = PureState::normalized(d, amps).unwrap();
        let exp = expand_in_eigenbasis(&psi, &basis).unwrap();
        let total: f64 = exp.coeffs().iter().map(|a| a.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // reconstruct the state from the coefficients
        let mut back = nalgebra::DVector::from_element(7, C64::new(0.0, 0.0));
        for (a, e) in exp.coeffs().iter().zip(basis.entries()) {
            back += e.vector.amps() * *a;
        }
        assert!((back - psi.amps()).norm() < 1e-11);
    }
}

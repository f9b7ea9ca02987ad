//! Continuous representations on the unit torus: the Jacobi theta function,
//! the periodized coherent-state kernel, Bargmann and Husimi functions, zero
//! constellations, and stellar reconstruction.
//!
//! A state of dimension `d` lives on a torus of unit area with
//! `hbar = 1/(2 pi d)`. Its Bargmann function
//! `B(z) = sum_n <z|n/d>_d <n|psi>` is entire and obeys the quasi-periodic
//! boundary conditions
//!
//! ```text
//! B(z + 1) = e^{pi d (1/2 + z)}  B(z)
//! B(z + i) = e^{pi d (1/2 - iz)} B(z)
//! ```
//!
//! which force exactly `d` zeros per fundamental cell, with the zero sum
//! congruent to `d (1+i)/2` modulo the integer lattice. The Husimi density
//! `H(z) = |B(z)|^2 e^{-pi d z zbar}` is strictly periodic, nonnegative, and
//! vanishes exactly at those zeros; the zero constellation determines the
//! state up to normalization and global phase (the stellar representation),
//! realized by Hadamard factorization over the elementary `d = 1` factor
//! `psi_1(z) = e^{-pi z^2 / 2} theta_3(-i pi z | i)`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::op::PureState;

/// Torus constants tied to a dimension: `hbar = 1/(2 pi d)` and the zero
/// `z_0 = (1 + i)/2` of the elementary `d = 1` factor.
#[derive(Clone, Copy, Debug)]
pub struct TorusConstants {
    d: Dim,
    hbar: f64,
}

impl TorusConstants {
    pub fn new(d: Dim) -> Self {
        TorusConstants {
            d,
            hbar: 1.0 / (TAU * d.get() as f64),
        }
    }

    pub fn dim(self) -> Dim {
        self.d
    }

    pub fn hbar(self) -> f64 {
        self.hbar
    }

    pub fn z0(self) -> C64 {
        C64::new(0.5, 0.5)
    }
}

/// Minimum half-width of the theta summation window; the series is always
/// scanned at least this far even when terms are already negligible.
const THETA_MIN_TERMS: i64 = 12;
/// Truncation: stop once terms fall below this factor of the largest term
/// seen so far.
const THETA_TRUNCATION: f64 = 1e-17;

/// Jacobi theta function
/// `theta_3(z | tau) = sum_mu e^{i pi tau mu^2} e^{2 i mu z}`, for
/// `Im(tau) > 0`, together with its first two `z`-derivatives.
pub fn theta3_with_derivatives(z: C64, tau_mod: C64) -> Result<(C64, C64, C64)> {
    if tau_mod.im <= 0.0 {
        return Err(Error::NonConvergent);
    }
    let i = C64::new(0.0, 1.0);
    let mut sum = C64::new(1.0, 0.0); // mu = 0 term
    let mut d1 = C64::new(0.0, 0.0);
    let mut d2 = C64::new(0.0, 0.0);
    let mut largest = 1.0f64;
    let mut mu: i64 = 1;
    loop {
        // exponentiate the combined argument: the Gaussian factor and the
        // oscillatory factor can separately over/underflow even when their
        // product is negligible
        let gauss_arg = i * PI * tau_mod * (mu * mu) as f64;
        let t_plus = (gauss_arg + i * 2.0 * mu as f64 * z).exp();
        let t_minus = (gauss_arg - i * 2.0 * mu as f64 * z).exp();
        sum += t_plus + t_minus;
        let fac = i * 2.0 * mu as f64;
        d1 += fac * (t_plus - t_minus);
        d2 += fac * fac * (t_plus + t_minus);
        let mag = t_plus.norm().max(t_minus.norm());
        largest = largest.max(mag);
        if mu >= THETA_MIN_TERMS && mag < THETA_TRUNCATION * largest {
            return Ok((sum, d1, d2));
        }
        mu += 1;
        if mu > 20_000 {
            // unreachable for Im(tau) > 0, kept as a hard stop
            return Err(Error::NonConvergent);
        }
    }
}

/// Jacobi theta function `theta_3(z | tau)`.
pub fn theta3(z: C64, tau_mod: C64) -> Result<C64> {
    theta3_with_derivatives(z, tau_mod).map(|(v, _, _)| v)
}

/// The periodized coherent-state overlap
/// `<z|n/d>_d = e^{2 pi d [z^2/4 - (z - n/d)^2/2]} theta_3(i pi (n - dz) | i d)`
/// and its first two `z`-derivatives.
pub fn coherent_overlap_with_derivatives(
    c: TorusConstants,
    z: C64,
    n: usize,
) -> Result<(C64, C64, C64)> {
    let d = c.dim().get() as f64;
    let i = C64::new(0.0, 1.0);
    let center = C64::new(n as f64 / d, 0.0);
    let w = z - center;
    let exponent = TAU * d * (z * z * 0.25 - w * w * 0.5);
    let prefactor = exponent.exp();
    // g = d/dz of the exponent
    let g = TAU * d * (z * 0.5 - w);
    let g1 = C64::new(-PI * d, 0.0);
    let zeta = i * PI * (C64::new(n as f64, 0.0) - z * d);
    let dzeta = -i * PI * d;
    let (theta, theta1, theta2) = theta3_with_derivatives(zeta, i * d)?;
    let f = prefactor * theta;
    let f1 = prefactor * (g * theta + theta1 * dzeta);
    let f2 = prefactor
        * (g * g * theta
            + g1 * theta
            + 2.0 * g * theta1 * dzeta
            + theta2 * dzeta * dzeta);
    Ok((f, f1, f2))
}

/// The periodized coherent-state overlap `<z|n/d>_d`.
pub fn coherent_overlap(c: TorusConstants, z: C64, n: usize) -> C64 {
    coherent_overlap_with_derivatives(c, z, n)
        .expect("Im(i d) > 0 always")
        .0
}

/// The elementary `d = 1` factor `psi_1(z) = e^{-pi z^2/2} theta_3(-i pi z | i)`,
/// with a single zero (per cell) at `z_0 = (1 + i)/2`, peaked at `z = 0`.
pub fn elementary_factor(z: C64) -> C64 {
    coherent_overlap(TorusConstants::new(Dim::new(1).expect("1 is odd")), z, 0)
}

/// Elementary Husimi factor `|psi_1(zeta)|^2 e^{-pi zeta zetabar}`: periodic,
/// nonnegative, vanishing only at `z_0` mod the lattice.
pub fn elementary_husimi(zeta: C64) -> f64 {
    elementary_factor(zeta).norm_sqr() * (-PI * zeta.norm_sqr()).exp()
}

/// The Bargmann function `B(z) = sum_n <z|n/d>_d <n|psi>`.
pub fn bargmann(state: &PureState, z: C64) -> C64 {
    bargmann_with_derivatives(state, z).0
}

/// `B(z)` with its first two derivatives, for Newton refinement of zeros.
pub fn bargmann_with_derivatives(state: &PureState, z: C64) -> (C64, C64, C64) {
    let c = TorusConstants::new(state.dim());
    let mut f = C64::new(0.0, 0.0);
    let mut f1 = C64::new(0.0, 0.0);
    let mut f2 = C64::new(0.0, 0.0);
    for n in 0..state.dim().get() {
        let amp = state.amp(n);
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let (k, k1, k2) =
            coherent_overlap_with_derivatives(c, z, n).expect("Im(i d) > 0 always");
        f += k * amp;
        f1 += k1 * amp;
        f2 += k2 * amp;
    }
    (f, f1, f2)
}

/// The Husimi density `H(q, p) = |B(z)|^2 e^{-pi d z zbar}` at `z = q - i p`.
pub fn husimi_point(state: &PureState, q: f64, p: f64) -> f64 {
    let z = C64::new(q, -p);
    let d = state.dim().get() as f64;
    bargmann(state, z).norm_sqr() * (-PI * d * z.norm_sqr()).exp()
}

/// Husimi density sampled on an `n x n` grid over `(q, p) in [0, 1)^2`.
#[derive(Clone, Debug)]
pub struct HusimiGrid {
    dim: Dim,
    n: usize,
    values: Vec<f64>,
}

impl HusimiGrid {
    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Row-major values, `q` varying over rows and `p` over columns.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, iq: usize, ip: usize) -> f64 {
        self.values[iq * self.n + ip]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Minimum admissible Husimi resolution for dimension `d`.
pub fn husimi_min_resolution(d: Dim) -> usize {
    8 * (d.get() as f64).sqrt().ceil() as usize
}

/// Samples the Husimi density at `z = q - i p` on the `n x n` lattice over
/// `[0, 1)^2`.
pub fn husimi_grid(state: &PureState, n: usize) -> Result<HusimiGrid> {
    let d = state.dim();
    let min = husimi_min_resolution(d);
    if n < min {
        return Err(Error::ResolutionTooLow {
            got: n,
            min,
            d: d.get(),
        });
    }
    let mut values = Vec::with_capacity(n * n);
    for iq in 0..n {
        for ip in 0..n {
            values.push(husimi_point(state, iq as f64 / n as f64, ip as f64 / n as f64));
        }
    }
    Ok(HusimiGrid { dim: d, n, values })
}

/// The `d` Bargmann zeros of a state, reduced to the fundamental cell
/// `[0,1) x [0,1)`; multiple zeros appear with their multiplicity.
#[derive(Clone, Debug)]
pub struct Constellation {
    dim: Dim,
    zeros: Vec<C64>,
}

impl Constellation {
    /// Validates the zero count and the centroid constraint
    /// `sum z_i = d (1+i)/2 (mod Z + iZ)` to within `1e-8`.
    pub fn new(dim: Dim, zeros: Vec<C64>) -> Result<Self> {
        let c = Constellation::new_unchecked(dim, zeros)?;
        let res = c.centroid_residual();
        if res > 1e-8 {
            return Err(Error::CentroidViolation(res));
        }
        Ok(c)
    }

    /// Validates only the zero count; used to probe invalid constellations.
    pub fn new_unchecked(dim: Dim, zeros: Vec<C64>) -> Result<Self> {
        if zeros.len() != dim.get() {
            return Err(Error::ZeroCountMismatch {
                found: zeros.len(),
                expected: dim.get(),
            });
        }
        let zeros = zeros.into_iter().map(reduce_to_cell).collect();
        Ok(Constellation { dim, zeros })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    /// Distance of `sum z_i - d (1+i)/2` from the nearest Gaussian integer.
    pub fn centroid_residual(&self) -> f64 {
        let sum: C64 = self.zeros.iter().sum();
        let target = C64::new(0.5, 0.5) * self.dim.get() as f64;
        let offset = sum - target;
        let nearest = C64::new(offset.re.round(), offset.im.round());
        (offset - nearest).norm()
    }

    /// The Gaussian-integer lattice offset `sum z_i - d (1+i)/2` rounded to
    /// the nearest integers.
    pub fn lattice_offset(&self) -> (i64, i64) {
        let sum: C64 = self.zeros.iter().sum();
        let target = C64::new(0.5, 0.5) * self.dim.get() as f64;
        let offset = sum - target;
        (offset.re.round() as i64, offset.im.round() as i64)
    }
}

fn reduce_to_cell(z: C64) -> C64 {
    C64::new(z.re.rem_euclid(1.0), z.im.rem_euclid(1.0))
}

/// Torus distance between two points of the fundamental cell.
fn torus_distance(a: C64, b: C64) -> f64 {
    let dre = (a.re - b.re).rem_euclid(1.0);
    let dim_ = (a.im - b.im).rem_euclid(1.0);
    let dre = dre.min(1.0 - dre);
    let dim_ = dim_.min(1.0 - dim_);
    (dre * dre + dim_ * dim_).sqrt()
}

/// Total winding number of `B` summed over all plaquettes of an `n x n`
/// grid shifted by half a pixel (so common symmetric zeros stay off the
/// sampling points). Interior edges cancel, so this equals the boundary
/// winding of the whole cell: the number of zeros inside.
pub fn winding_zero_count(state: &PureState, n: usize) -> i64 {
    let mut phases = vec![0.0f64; (n + 1) * (n + 1)];
    for ix in 0..=n {
        for iy in 0..=n {
            let z = C64::new(
                (ix as f64 + 0.5) / n as f64,
                (iy as f64 + 0.5) / n as f64,
            );
            phases[ix * (n + 1) + iy] = bargmann(state, z).arg();
        }
    }
    let wrap = |mut x: f64| {
        while x > PI {
            x -= TAU;
        }
        while x <= -PI {
            x += TAU;
        }
        x
    };
    let mut total = 0.0f64;
    for ix in 0..n {
        for iy in 0..n {
            let p00 = phases[ix * (n + 1) + iy];
            let p10 = phases[(ix + 1) * (n + 1) + iy];
            let p11 = phases[(ix + 1) * (n + 1) + iy + 1];
            let p01 = phases[ix * (n + 1) + iy + 1];
            total += wrap(p10 - p00) + wrap(p11 - p10) + wrap(p01 - p11) + wrap(p00 - p01);
        }
    }
    (total / TAU).round() as i64
}

/// Winding number and first zero moment of `B` on a circle around `center`:
/// returns `(m, s1)` with `m` the enclosed multiplicity and
/// `s1 = (1/2 pi i) int z B'/B dz` the sum of the enclosed zeros. The mean
/// `s1/m` locates an `m`-fold zero far more accurately than the function
/// values near it, where `B` is dominated by rounding noise.
fn circle_winding_and_moment(state: &PureState, center: C64, rho: f64) -> (i64, C64) {
    let samples = 512usize;
    let mut total_arg = 0.0f64;
    let mut moment = C64::new(0.0, 0.0);
    let mut prev = bargmann(state, center + C64::from_polar(rho, 0.0)).arg();
    for s in 1..=samples {
        let angle = TAU * s as f64 / samples as f64;
        let z = center + C64::from_polar(rho, angle);
        let (f, f1, _) = bargmann_with_derivatives(state, z);
        let arg = f.arg();
        let mut diff = arg - prev;
        while diff > PI {
            diff -= TAU;
        }
        while diff <= -PI {
            diff += TAU;
        }
        total_arg += diff;
        prev = arg;
        // trapezoid on the circle: (1/2 pi) int z (B'/B) rho e^{i theta} dtheta
        moment += z * (f1 / f) * C64::from_polar(rho, angle);
    }
    let m = (total_arg / TAU).round() as i64;
    (m, moment / samples as f64)
}

/// Finds the `d` Bargmann zeros of a state in the fundamental cell.
///
/// Seeds are the local minima of the Husimi density at resolution
/// `32 ceil(sqrt(d))`; each seed is refined by Newton iteration on
/// `B / B'` (which has simple zeros regardless of multiplicity), then
/// multiplicities are confirmed by phase winding on small circles and the
/// total is cross-checked against the whole-cell winding number.
pub fn find_zeros(state: &PureState) -> Result<Constellation> {
    let d = state.dim();
    let res = 32 * (d.get() as f64).sqrt().ceil() as usize;
    let grid = husimi_grid(state, res)?;
    let weighted_max = grid.max().sqrt();

    // local minima of the Husimi grid, periodic neighborhood
    let mut seeds: Vec<C64> = Vec::new();
    for iq in 0..res {
        for ip in 0..res {
            let v = grid.get(iq, ip);
            let mut is_min = true;
            'neigh: for dq in [-1i64, 0, 1] {
                for dp in [-1i64, 0, 1] {
                    if dq == 0 && dp == 0 {
                        continue;
                    }
                    let nq = (iq as i64 + dq).rem_euclid(res as i64) as usize;
                    let np = (ip as i64 + dp).rem_euclid(res as i64) as usize;
                    if grid.get(nq, np) < v {
                        is_min = false;
                        break 'neigh;
                    }
                }
            }
            if is_min {
                seeds.push(C64::new(iq as f64 / res as f64, -(ip as f64) / res as f64));
            }
        }
    }

    // Newton refinement on u = B/B', quadratic for simple zeros; for an
    // m-fold zero the values are noise-dominated within radius eps^{1/m},
    // so the final iterate is kept and the contour pass below fixes it up
    let mut refined: Vec<C64> = Vec::new();
    for seed in seeds {
        let mut z = seed;
        for _ in 0..80 {
            let (f, f1, f2) = bargmann_with_derivatives(state, z);
            if f.norm() == 0.0 {
                break;
            }
            let denom = f1 * f1 - f * f2;
            if denom.norm() == 0.0 {
                break;
            }
            let step = f * f1 / denom;
            z -= step;
            z = reduce_to_cell(z);
            if step.norm() < 1e-14 {
                break;
            }
        }
        // accept only genuine zeros on the Husimi-weighted scale
        let zc = reduce_to_cell(z);
        let weighted =
            bargmann(state, zc).norm() * (-PI * d.get() as f64 * zc.norm_sqr() / 2.0).exp();
        if weighted <= 1e-9 * weighted_max {
            refined.push(zc);
        }
    }

    // deduplicate on the torus metric
    let mut unique: Vec<C64> = Vec::new();
    for z in refined {
        if !unique.iter().any(|u| torus_distance(*u, z) < 1e-6) {
            unique.push(z);
        }
    }

    // single-linkage clustering: candidates closer than the worst-case
    // noise scatter of a degenerate zero belong to one cluster
    const CLUSTER_LINK: f64 = 2.5e-2;
    let mut cluster_of: Vec<usize> = (0..unique.len()).collect();
    loop {
        let mut changed = false;
        for i in 0..unique.len() {
            for j in (i + 1)..unique.len() {
                if torus_distance(unique[i], unique[j]) < CLUSTER_LINK
                    && cluster_of[i] != cluster_of[j]
                {
                    let (a, b) = (cluster_of[i].min(cluster_of[j]), cluster_of[i].max(cluster_of[j]));
                    for c in cluster_of.iter_mut() {
                        if *c == b {
                            *c = a;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut cluster_ids: Vec<usize> = cluster_of.clone();
    cluster_ids.sort_unstable();
    cluster_ids.dedup();
    let clusters: Vec<Vec<C64>> = cluster_ids
        .iter()
        .map(|&id| {
            cluster_of
                .iter()
                .zip(&unique)
                .filter(|(c, _)| **c == id)
                .map(|(_, z)| *z)
                .collect()
        })
        .collect();

    let centers: Vec<C64> = clusters
        .iter()
        .map(|members| {
            // mean of the members, unwrapped around the first one
            let base = members[0];
            let mut acc = C64::new(0.0, 0.0);
            for &m in members {
                let mut delta = m - base;
                delta.re -= delta.re.round();
                delta.im -= delta.im.round();
                acc += delta;
            }
            reduce_to_cell(base + acc / members.len() as f64)
        })
        .collect();

    let mut zeros: Vec<C64> = Vec::new();
    for (ci, members) in clusters.iter().enumerate() {
        let center = centers[ci];
        let mut dist_other = f64::INFINITY;
        for (cj, &other) in centers.iter().enumerate() {
            if ci != cj {
                dist_other = dist_other.min(torus_distance(center, other));
            }
        }
        let rho = (0.45 * dist_other).min(0.08);
        let (mult, s1) = circle_winding_and_moment(state, center, rho);
        if mult <= 0 {
            continue; // spurious cluster
        }
        if mult == 1 && members.len() == 1 {
            zeros.push(members[0]);
        } else {
            // an exactly (or nearly) degenerate zero: the moment mean is
            // well conditioned even when the individual values are not
            let z = reduce_to_cell(s1 / mult as f64);
            for _ in 0..mult {
                zeros.push(z);
            }
        }
    }

    let found = zeros.len();
    if found != d.get() {
        return Err(Error::ZeroCountMismatch {
            found,
            expected: d.get(),
        });
    }
    // independent topological cross-check on the whole cell
    let total = winding_zero_count(state, res);
    if total != d.as_i64() {
        return Err(Error::ZeroCountMismatch {
            found: total.max(0) as usize,
            expected: d.get(),
        });
    }
    zeros.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite zeros"));
    Constellation::new(d, zeros)
}

/// Sampling line for stellar reconstruction: `d` points at
/// `Re z = (j + 0.13)/d`, `Im z = 0.37` (shifted on retries).
fn sampling_points(d: Dim, shift: f64) -> Vec<C64> {
    (0..d.get())
        .map(|j| C64::new((j as f64 + 0.13) / d.get() as f64, 0.37 + shift))
        .collect()
}

/// Rebuilds the pure state whose Bargmann function has the given zero
/// constellation, up to normalization and global phase.
///
/// The Hadamard product `prod_i psi_1(z + z_0 - z_i)` matches the
/// quasi-periodicity of a Bargmann function only up to the exponential
/// factor `e^{pi (m - i n) z}` fixed by the lattice offset
/// `(m, n) = sum z_i - d (1+i)/2`; the corrected product is sampled at `d`
/// points and solved against the coherent overlaps for the amplitudes.
pub fn stellar_reconstruct(constellation: &Constellation) -> Result<PureState> {
    let d = constellation.dim();
    let res = constellation.centroid_residual();
    if res > 1e-8 {
        return Err(Error::CentroidViolation(res));
    }
    let (m, n_off) = constellation.lattice_offset();
    let growth = C64::new(PI * m as f64, -PI * n_off as f64);
    let c = TorusConstants::new(d);
    let z0 = c.z0();

    let target = |z: C64| -> C64 {
        let mut prod = (growth * z).exp();
        for &zi in constellation.zeros() {
            prod *= elementary_factor(z + z0 - zi);
        }
        prod
    };

    let dd = d.get();
    for attempt in 0..3 {
        let points = sampling_points(d, 0.11 * attempt as f64);
        let mut mat = DMatrix::<C64>::zeros(dd, dd);
        let mut rhs = DVector::<C64>::zeros(dd);
        for (j, &zj) in points.iter().enumerate() {
            // row scaling by the coherent weight keeps the system balanced
            let weight = C64::new((-PI * dd as f64 * zj.norm_sqr() / 2.0).exp(), 0.0);
            for n in 0..dd {
                mat[(j, n)] = coherent_overlap(c, zj, n) * weight;
            }
            rhs[j] = target(zj) * weight;
        }
        let lu = mat.clone().lu();
        if let Some(solution) = lu.solve(&rhs) {
            let residual = (&mat * &solution - &rhs).norm() / rhs.norm().max(1e-300);
            if residual < 1e-6 && solution.norm() > 0.0 {
                return PureState::normalized(d, solution.iter().copied().collect());
            }
        }
    }
    Err(Error::SingularSampling)
}

/// The torus coherent state peaked at the phase-space origin: the state
/// whose constellation is `d`-fold degenerate at the far corner of the cell
/// (the point `(1+i)/2` diagonally opposite the peak).
pub fn coherent_reference_state(d: Dim) -> Result<PureState> {
    let zeros = vec![C64::new(0.5, 0.5); d.get()];
    stellar_reconstruct(&Constellation::new(d, zeros)?)
}

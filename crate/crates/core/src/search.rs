//! Numerical search for SIC-POVM fiducial states.
//!
//! The cost is the phase-space localization `M(psi)`, whose global minimum
//! `2/(d+1)` is attained exactly on fiducial states, so driving the gap
//! `M - 2/(d+1)` to zero certifies success. Minimization runs over the real
//! and imaginary parts of the amplitudes with the analytic gradient of the
//! scale-invariant extension of `M` (which is automatically tangent to the
//! unit sphere), using a multi-start limited-memory BFGS with Armijo
//! backtracking. Restarts draw Haar-random initial states from per-restart
//! seeds split off the master seed; the search is bit-reproducible for a
//! fixed configuration.
//!
//! A search may be confined to one eigenvalue sector of the Zauner unitary:
//! the start and every iterate are passed through the sector projector
//! `P_k = (1/3) sum_m e^{-2 pi i k m/3} Z^m` and renormalized, so iterates
//! never leave the sector.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::localization::{derive_seed, haar_sample, m_lower_bound, RNG_ALGORITHM};
use crate::op::{DenseOp, PureState};
use crate::weyl::{displace_amps, displacement_expectation};
use crate::zauner::zauner_unitary;

/// Search configuration; `tol` is the convergence threshold on the gap
/// `M - 2/(d+1)`.
#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    pub d: usize,
    pub sector: Option<u8>,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(d: Dim, seed: u64) -> Self {
        SearchConfig {
            d: d.get(),
            sector: None,
            restarts: 20,
            max_iters: 2000,
            tol: 1e-9,
            seed,
        }
    }

    fn validate(&self) -> Result<Dim> {
        if self.restarts == 0 || self.tol <= 0.0 {
            return Err(Error::Parse(format!(
                "invalid search config: restarts = {}, tol = {}",
                self.restarts, self.tol
            )));
        }
        if let Some(k) = self.sector {
            if k > 2 {
                return Err(Error::Parse(format!("invalid Zauner sector {k}")));
            }
        }
        Dim::new(self.d)
    }
}

/// Identifier of the local minimizer, recorded in search metadata.
pub const OPTIMIZER: &str = "lbfgs-armijo";

/// Outcome of one restart.
#[derive(Clone, Debug, Serialize)]
pub struct RestartOutcome {
    pub restart_index: usize,
    pub m_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip)]
    pub state: PureState,
}

/// Best result over all restarts.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best_state: PureState,
    pub m_value: f64,
    /// `M - 2/(d+1)`, nonnegative up to rounding.
    pub gap: f64,
    pub converged: bool,
    pub restart_index: usize,
    pub iterations: usize,
    pub seed: u64,
    pub optimizer: &'static str,
    pub rng_algorithm: &'static str,
}

/// `M(psi)` together with its gradient with respect to the `2d` real
/// parameters (re, im interleaved) of the unnormalized amplitudes, for the
/// scale-invariant extension `M(c/|c|)`. The returned gradient is projected
/// onto the tangent space of the unit sphere; it matches central finite
/// differences of the extension.
pub fn cost_and_gradient(state: &PureState) -> (f64, Vec<f64>) {
    let (m, grad_c) = cost_and_complex_gradient(state);
    let n = state.dim().get();
    let mut grad = vec![0.0f64; 2 * n];
    for i in 0..n {
        grad[2 * i] = 2.0 * grad_c[i].re;
        grad[2 * i + 1] = 2.0 * grad_c[i].im;
    }
    (m, grad)
}

/// Wirtinger gradient `dM/d(conj c)` at a normalized state, tangent to the
/// sphere (radial and global-phase components removed).
fn cost_and_complex_gradient(state: &PureState) -> (f64, DVector<C64>) {
    let d = state.dim();
    let dd = d.get() as f64;
    let amps = state.amps();
    let mut acc = DVector::from_element(d.get(), C64::new(0.0, 0.0));
    let mut m = 0.0f64;
    for a in d.lattice() {
        let t = displacement_expectation(state, a);
        let t2 = t.norm_sqr();
        m += t2 * t2;
        // |t|^2 ( conj(t) T_a + t T_a^dag ) psi, using the sparse action
        let ta_psi = displace_amps(d, a, amps);
        let tadag_psi = displace_amps(d, a.neg(d), amps);
        acc += ta_psi * (t.conj() * t2) + tadag_psi * (t * t2);
    }
    m /= dd;
    let mut grad = acc * C64::new(2.0 / dd, 0.0) - amps * C64::new(4.0 * m, 0.0);
    // tangent projection (analytically already tangent; this removes rounding)
    let radial = amps.dotc(&grad);
    grad -= amps * radial;
    (m, grad)
}

/// Projects a state onto the Zauner sector `k` and renormalizes.
pub fn project_to_sector(state: &PureState, k: u8) -> Result<PureState> {
    let d = state.dim();
    let z = zauner_unitary(d);
    project_to_sector_with(state, k, &z)
}

fn project_to_sector_with(state: &PureState, k: u8, z: &DenseOp) -> Result<PureState> {
    let d = state.dim();
    let v = state.amps();
    let zv = z.apply(v);
    let zzv = z.apply(&zv);
    let w = C64::from_polar(1.0, -std::f64::consts::TAU * k as f64 / 3.0);
    let projected = (v + zv * w + zzv * w * w) * C64::new(1.0 / 3.0, 0.0);
    let norm = projected.norm();
    if norm < 1e-12 {
        return Err(Error::ZeroProjection { k });
    }
    PureState::normalized(d, projected.iter().copied().collect())
}

/// L-BFGS history depth.
const LBFGS_MEMORY: usize = 8;
/// Armijo sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
/// Stop when the projected gradient norm falls below this.
const GRAD_TOL: f64 = 1e-12;

struct Minimizer<'a> {
    d: Dim,
    sector: Option<(u8, &'a DenseOp)>,
}

impl Minimizer<'_> {
    /// Renormalize raw amplitudes onto the constraint set (sphere, and the
    /// sector subspace when configured).
    fn retract(&self, raw: &DVector<C64>) -> Result<PureState> {
        let state = PureState::normalized(self.d, raw.iter().copied().collect())?;
        match self.sector {
            Some((k, z)) => project_to_sector_with(&state, k, z),
            None => Ok(state),
        }
    }

    fn run(&self, start: PureState, max_iters: usize, tol: f64) -> (PureState, f64, usize, bool) {
        let lower = m_lower_bound(self.d);
        let mut state = start;
        let (mut cost, mut grad) = cost_and_complex_gradient(&state);
        let mut history: Vec<(DVector<C64>, DVector<C64>, f64)> = Vec::new();
        let mut iterations = 0usize;

        // The gap is quadratic in the overlap deviations, so convergence is
        // classified by the gap but iteration continues to the gradient
        // stall; a converged result then also satisfies the fiducial
        // condition pointwise, not just on average.
        for iter in 0..max_iters {
            iterations = iter;
            if grad.norm() <= GRAD_TOL {
                break;
            }

            // two-loop recursion on the complex coordinates
            let mut direction = grad.clone();
            let mut alphas = Vec::with_capacity(history.len());
            for (s, y, rho) in history.iter().rev() {
                let alpha = rho * s.dotc(&direction).re;
                direction -= y * C64::new(alpha, 0.0);
                alphas.push(alpha);
            }
            if let Some((s, y, _)) = history.last() {
                let sy = s.dotc(y).re;
                let yy = y.dotc(y).re;
                if sy > 0.0 && yy > 0.0 {
                    direction *= C64::new(sy / yy, 0.0);
                }
            }
            for ((s, y, rho), alpha) in history.iter().zip(alphas.iter().rev()) {
                let beta = rho * y.dotc(&direction).re;
                direction += s * C64::new(alpha - beta, 0.0);
            }
            // descent direction for the real inner product Re<g, p>
            let slope = -grad.dotc(&direction).re;
            let mut direction = direction;
            let mut slope = slope;
            if slope >= 0.0 {
                direction = grad.clone();
                slope = -grad.norm_squared();
                history.clear();
            }

            // Armijo backtracking on the retracted iterate; once cost
            // decrements sink below f64 noise (the cost is quadratic near
            // the bottom) accept on strict gradient decrease instead, which
            // stays resolvable all the way down to GRAD_TOL
            let mut step = 1.0f64;
            let mut accepted = None;
            for _ in 0..60 {
                let raw = state.amps() - &direction * C64::new(step, 0.0);
                if let Ok(candidate) = self.retract(&raw) {
                    let (c_new, g_new) = cost_and_complex_gradient(&candidate);
                    let armijo = c_new <= cost + ARMIJO_C1 * step * slope;
                    let noise_regime =
                        c_new <= cost + 1e-13 && g_new.norm() <= 0.9 * grad.norm();
                    if armijo || noise_regime {
                        accepted = Some((candidate, c_new, g_new));
                        break;
                    }
                }
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
            let Some((next, c_new, g_new)) = accepted else {
                break; // line search stalled at an apparent minimum
            };

            let s = next.amps() - state.amps();
            let y = &g_new - &grad;
            let sy = s.dotc(&y).re;
            if sy > 1e-12 * s.norm() * y.norm() {
                history.push((s, y, 1.0 / sy));
                if history.len() > LBFGS_MEMORY {
                    history.remove(0);
                }
            }
            state = next;
            cost = c_new;
            grad = g_new;
        }
        let gap = cost - lower;
        (state, cost, iterations, gap <= tol)
    }
}

/// Runs every restart and returns the per-restart outcomes in restart order.
pub fn run_restarts(config: &SearchConfig) -> Result<Vec<RestartOutcome>> {
    let d = config.validate()?;
    let z = config.sector.map(|_| zauner_unitary(d));
    let lower = m_lower_bound(d);

    let outcomes: Result<Vec<RestartOutcome>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, r as u64));
            let mut start = haar_sample(d, &mut rng);
            let minimizer = Minimizer {
                d,
                sector: config.sector.map(|k| (k, z.as_ref().expect("built above"))),
            };
            if let Some((k, zop)) = minimizer.sector {
                start = project_to_sector_with(&start, k, zop)?;
            }
            let (state, m_value, iterations, converged) =
                minimizer.run(start, config.max_iters, config.tol);
            Ok(RestartOutcome {
                restart_index: r,
                m_value,
                gap: m_value - lower,
                iterations,
                converged,
                state,
            })
        })
        .collect();
    outcomes
}

/// Multi-start search: runs all restarts and returns the lowest-cost result
/// (ties broken by restart index).
pub fn search(config: &SearchConfig) -> Result<SearchResult> {
    let outcomes = run_restarts(config)?;
    let best = outcomes
        .into_iter()
        .min_by(|a, b| {
            a.m_value
                .partial_cmp(&b.m_value)
                .expect("finite costs")
                .then(a.restart_index.cmp(&b.restart_index))
        })
        .expect("restarts >= 1");
    Ok(SearchResult {
        best_state: best.state,
        m_value: best.m_value,
        gap: best.gap,
        converged: best.converged,
        restart_index: best.restart_index,
        iterations: best.iterations,
        seed: config.seed,
        optimizer: OPTIMIZER,
        rng_algorithm: RNG_ALGORITHM,
    })
}

//! Localization measures, SIC verification, and Haar-measure Monte Carlo.
//!
//! Two measures are used. The inverse participation ratio
//! `P = sum_i |<i|psi>|^4` quantifies localization in the position basis
//! (1/d flat, 1 peaked) and is basis dependent. The phase-space measure
//! `M = (1/d) sum_a |<psi|T_a|psi>|^4` is invariant under Clifford
//! operations, bounded by `2/(d+1) <= M <= 1`, saturates its upper bound on
//! position states, and attains its lower bound exactly on SIC-POVM fiducial
//! states, which makes it the natural cost function for fiducial searches.
//!
//! For Haar-random states the analytic averages are `<P> = 2/(d+1)`,
//! `<M> = 3/(d+2)` and, for the displacement fourth moment,
//! `<|<psi|T_a|psi>|^4> = 2/((d+1)(d+2))` at every nonzero `a`. The Monte
//! Carlo estimators here reproduce those values from a seeded, cross-run
//! stable generator (ChaCha8), parallelized over fixed-size sample blocks
//! with per-block seeds derived by a SplitMix64 rule, so results do not
//! depend on thread scheduling.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::dim::{Dim, PhasePoint};
use crate::error::Result;
use crate::op::PureState;
use crate::weyl::{displacement_expectation, reflection_expectation};

/// Inverse participation ratio in the position basis,
/// `P = sum_i |<i|psi>|^4`.
pub fn ipr(state: &PureState) -> f64 {
    state.amps().iter().map(|a| a.norm_sqr() * a.norm_sqr()).sum()
}

/// Phase-space localization `M = (1/d) sum_a |<psi|T_a|psi>|^4`, evaluated
/// through the chord form and cross-checked against the Wigner form
/// `(1/d) sum_x W(x)^4` (the two coincide for pure states); the chord value
/// is returned.
pub fn phase_space_m(state: &PureState) -> f64 {
    let chord = m_via_chord(state);
    let wigner = m_via_wigner(state);
    assert!(
        (chord - wigner).abs() <= 1e-11,
        "chord/Wigner localization mismatch: {chord} vs {wigner}"
    );
    chord
}

pub(crate) fn m_via_chord(state: &PureState) -> f64 {
    let d = state.dim();
    let sum: f64 = d
        .lattice()
        .map(|a| {
            let t = displacement_expectation(state, a).norm_sqr();
            t * t
        })
        .sum();
    sum / d.get() as f64
}

pub(crate) fn m_via_wigner(state: &PureState) -> f64 {
    let d = state.dim();
    let sum: f64 = d
        .lattice()
        .map(|x| {
            let w = reflection_expectation(state, x).re;
            let w2 = w * w;
            w2 * w2
        })
        .sum();
    sum / d.get() as f64
}

/// The SIC lower bound of `M`, `2/(d+1)`.
pub fn m_lower_bound(d: Dim) -> f64 {
    2.0 / (d.get() as f64 + 1.0)
}

/// Outcome of checking the fiducial condition
/// `|<phi|T_a|phi>|^2 = 1/(d+1)` over all nonzero displacements.
#[derive(Clone, Debug, Serialize)]
pub struct SicReport {
    pub d: usize,
    /// `max_a | |<phi|T_a|phi>|^2 - 1/(d+1) |` over nonzero `a`.
    pub max_dev: f64,
    pub m_value: f64,
    pub p_value: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks the fiducial condition at tolerance `tol`. Failure is a report,
/// not an error.
pub fn verify_sic(state: &PureState, tol: f64) -> SicReport {
    let d = state.dim();
    let target = 1.0 / (d.get() as f64 + 1.0);
    let mut max_dev = 0.0f64;
    for a in d.lattice() {
        if a.is_origin() {
            continue;
        }
        let overlap = displacement_expectation(state, a).norm_sqr();
        max_dev = max_dev.max((overlap - target).abs());
    }
    SicReport {
        d: d.get(),
        max_dev,
        m_value: phase_space_m(state),
        p_value: ipr(state),
        tol,
        pass: max_dev <= tol,
    }
}

/// Derives a stream seed from a master seed and an index (SplitMix64
/// finalizer); the recorded splitting rule for parallel blocks and restarts.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Name of the generator backing all Monte Carlo sampling, recorded in
/// output metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Draws a Haar-distributed pure state: independent standard complex
/// Gaussian amplitudes, normalized (and phase-canonicalized).
pub fn haar_sample<R: Rng + ?Sized>(d: Dim, rng: &mut R) -> PureState {
    let amps: Vec<C64> = (0..d.get())
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect();
    PureState::normalized(d, amps).expect("Gaussian draw is normalizable")
}

/// Statistic sampled by the Haar Monte Carlo estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaarStatistic {
    /// Inverse participation ratio `P`.
    P,
    /// Phase-space measure `M`.
    M,
    /// Displacement fourth moment `|<psi|T_a|psi>|^4` at a fixed point.
    T4(PhasePoint),
}

impl HaarStatistic {
    pub fn name(&self, d: Dim) -> String {
        match self {
            HaarStatistic::P => "P".into(),
            HaarStatistic::M => "M".into(),
            HaarStatistic::T4(a) => {
                let (c1, c2) = a.centered(d);
                format!("T4({c1},{c2})")
            }
        }
    }

    /// The analytic Haar average, when known.
    pub fn analytic(&self, d: Dim) -> Option<f64> {
        let df = d.get() as f64;
        match self {
            HaarStatistic::P => Some(2.0 / (df + 1.0)),
            HaarStatistic::M => Some(3.0 / (df + 2.0)),
            HaarStatistic::T4(a) => {
                if a.is_origin() {
                    Some(1.0)
                } else {
                    Some(2.0 / ((df + 1.0) * (df + 2.0)))
                }
            }
        }
    }

    fn evaluate(&self, state: &PureState) -> f64 {
        match self {
            HaarStatistic::P => ipr(state),
            // single-route evaluator; the dual-route consistency of
            // phase_space_m is exercised separately
            HaarStatistic::M => m_via_chord(state),
            HaarStatistic::T4(a) => {
                let t = displacement_expectation(state, *a).norm_sqr();
                t * t
            }
        }
    }
}

/// A seeded Monte Carlo estimate with its standard error and, when known,
/// the analytic value of the average.
#[derive(Clone, Debug, Serialize)]
pub struct HaarEstimate {
    pub statistic: String,
    pub d: usize,
    pub n_samples: usize,
    pub mean: f64,
    pub stderr: f64,
    pub analytic: Option<f64>,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub block_size: usize,
}

/// Histogram of an inverse statistic (`1/P` or `1/M`), 500 bins over
/// `[0, d]`.
#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub bins: Vec<u64>,
}

impl Histogram {
    fn new(lo: f64, hi: f64, n_bins: usize) -> Self {
        Histogram {
            lo,
            hi,
            bins: vec![0; n_bins],
        }
    }

    fn record(&mut self, value: f64) {
        let width = (self.hi - self.lo) / self.bins.len() as f64;
        let idx = ((value - self.lo) / width).floor();
        let idx = (idx.max(0.0) as usize).min(self.bins.len() - 1);
        self.bins[idx] += 1;
    }

    fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        let width = (self.hi - self.lo) / self.bins.len() as f64;
        self.bins.iter().enumerate().map(move |(i, &c)| {
            (self.lo + width * i as f64, self.lo + width * (i + 1) as f64, c)
        })
    }
}

pub const HISTOGRAM_BINS: usize = 500;

/// Samples per block; fixed so the merged estimate is independent of how
/// blocks are scheduled across threads.
const BLOCK_SIZE: usize = 4096;

/// Monte Carlo estimate of a Haar average over `n` samples.
pub fn haar_estimate(stat: HaarStatistic, d: Dim, n: usize, seed: u64) -> HaarEstimate {
    haar_run(stat, d, n, seed, false).0
}

/// Monte Carlo estimate plus the histogram of the inverse statistic.
pub fn haar_estimate_with_histogram(
    stat: HaarStatistic,
    d: Dim,
    n: usize,
    seed: u64,
) -> (HaarEstimate, Histogram) {
    let (est, hist) = haar_run(stat, d, n, seed, true);
    (est, hist.expect("histogram requested"))
}

fn haar_run(
    stat: HaarStatistic,
    d: Dim,
    n: usize,
    seed: u64,
    want_hist: bool,
) -> (HaarEstimate, Option<Histogram>) {
    let n_blocks = n.div_ceil(BLOCK_SIZE);
    let blocks: Vec<(f64, f64, Option<Histogram>)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, b as u64));
            let mut sum = 0.0f64;
            let mut sum_sq = 0.0f64;
            let mut hist = want_hist
                .then(|| Histogram::new(0.0, d.get() as f64, HISTOGRAM_BINS));
            for _ in 0..count {
                let psi = haar_sample(d, &mut rng);
                let v = stat.evaluate(&psi);
                sum += v;
                sum_sq += v * v;
                if let Some(h) = hist.as_mut() {
                    h.record(1.0 / v);
                }
            }
            (sum, sum_sq, hist)
        })
        .collect();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut hist = want_hist.then(|| Histogram::new(0.0, d.get() as f64, HISTOGRAM_BINS));
    for (s, s2, h) in &blocks {
        sum += s;
        sum_sq += s2;
        if let (Some(total), Some(part)) = (hist.as_mut(), h.as_ref()) {
            total.merge(part);
        }
    }
    let nf = n as f64;
    let mean = sum / nf;
    let variance = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let stderr = (variance / nf).sqrt();
    (
        HaarEstimate {
            statistic: stat.name(d),
            d: d.get(),
            n_samples: n,
            mean,
            stderr,
            analytic: stat.analytic(d),
            seed,
            rng_algorithm: RNG_ALGORITHM,
            block_size: BLOCK_SIZE,
        },
        hist,
    )
}

/// Reference values of the inverse statistic for the histogram's vertical
/// guide lines: position basis states, the torus coherent state, and the
/// fiducial bound.
#[derive(Clone, Debug, Serialize)]
pub struct InverseReferences {
    pub position: f64,
    pub coherent: f64,
    pub fiducial: f64,
}

pub fn inverse_references(stat: HaarStatistic, d: Dim) -> Result<InverseReferences> {
    let coherent_state = crate::bargmann::coherent_reference_state(d)?;
    let (position, coherent) = match stat {
        HaarStatistic::P => (
            1.0 / ipr(&PureState::basis_state(d, 0)),
            1.0 / ipr(&coherent_state),
        ),
        _ => (
            1.0 / phase_space_m(&PureState::basis_state(d, 0)),
            1.0 / phase_space_m(&coherent_state),
        ),
    };
    Ok(InverseReferences {
        position,
        coherent,
        fiducial: (d.get() as f64 + 1.0) / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dim::PhasePoint;
    use crate::weyl::{displace_amps, fourier, parity};
    use rand::rngs::StdRng;

    fn dim(d: usize) -> Dim {
        Dim::new(d).unwrap()
    }

    fn d3_fiducial() -> PureState {
        let s = 1.0 / 2f64.sqrt();
        PureState::new(
            dim(3),
            vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)],
        )
        .unwrap()
    }

    fn random_state(d: Dim, rng: &mut StdRng) -> PureState {
        let amps: Vec<C64> = (0..d.get())
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        PureState::normalized(d, amps).unwrap()
    }

    #[test]
    fn ipr_extremes() {
        let d = dim(7);
        assert!((ipr(&PureState::basis_state(d, 3)) - 1.0).abs() < 1e-15);
        let flat = PureState::normalized(d, vec![C64::new(1.0, 0.0); 7]).unwrap();
        assert!((ipr(&flat) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn m_of_position_state_saturates() {
        let d = dim(7);
        assert!((phase_space_m(&PureState::basis_state(d, 2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn m_of_d3_fiducial() {
        // brute force over all 9 displacements gives M = 1/2
        let psi = d3_fiducial();
        assert!((phase_space_m(&psi) - 0.5).abs() < 1e-13);
        assert!((ipr(&psi) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn m_bounds_on_random_states() {
        let mut rng = StdRng::seed_from_u64(43);
        for dd in [3usize, 5, 11] {
            let d = dim(dd);
            let lo = m_lower_bound(d);
            for _ in 0..200 {
                let m = phase_space_m(&random_state(d, &mut rng));
                assert!(m >= lo - 1e-12);
                assert!(m <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn m_invariant_under_clifford_moves() {
        let mut rng = StdRng::seed_from_u64(47);
        let d = dim(7);
        let psi = random_state(d, &mut rng);
        let m0 = phase_space_m(&psi);
        // displacement
        for _ in 0..5 {
            let beta = PhasePoint::new(
                d,
                rng.gen_range(0..d.as_i64()),
                rng.gen_range(0..d.as_i64()),
            );
            let moved =
                PureState::new(d, displace_amps(d, beta, psi.amps()).iter().copied().collect())
                    .unwrap();
            assert!((phase_space_m(&moved) - m0).abs() < 1e-12);
        }
        // Fourier and parity
        for op in [fourier(d), parity(d)] {
            let rotated =
                PureState::normalized(d, op.apply(psi.amps()).iter().copied().collect()).unwrap();
            assert!((phase_space_m(&rotated) - m0).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_chord_fourth_moment_equivalence() {
        // sum_x W^4 = sum_a |C|^4 for pure states
        let mut rng = StdRng::seed_from_u64(53);
        for dd in (3..=31usize).step_by(2) {
            let d = dim(dd);
            for _ in 0..50 {
                let psi = random_state(d, &mut rng);
                let mc = m_via_chord(&psi);
                let mw = m_via_wigner(&psi);
                assert!(
                    (mc - mw).abs() <= 1e-10 * mc.abs().max(1.0),
                    "d = {dd}: {mc} vs {mw}"
                );
            }
        }
    }

    #[test]
    fn verify_sic_on_d3_fiducial() {
        let report = verify_sic(&d3_fiducial(), 1e-10);
        assert!(report.pass);
        assert!(report.max_dev <= 1e-15, "max_dev = {}", report.max_dev);
        assert!((report.m_value - 0.5).abs() < 1e-12);
        assert!((report.p_value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn verify_sic_rejects_random_state() {
        let mut rng = StdRng::seed_from_u64(59);
        let report = verify_sic(&random_state(dim(5), &mut rng), 1e-10);
        assert!(!report.pass);
        assert!(report.max_dev > 1e-2);
    }

    #[test]
    fn sic_pass_implies_m_near_bound() {
        let report = verify_sic(&d3_fiducial(), 1e-10);
        assert!(report.pass);
        assert!((report.m_value - m_lower_bound(dim(3))).abs() <= 10.0 * report.tol);
    }

    #[test]
    fn haar_sample_deterministic() {
        let d = dim(11);
        let a = haar_sample(d, &mut ChaCha8Rng::seed_from_u64(99));
        let b = haar_sample(d, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a.amps(), b.amps());
        let c = haar_sample(d, &mut ChaCha8Rng::seed_from_u64(100));
        assert!(a.fidelity(&c) < 0.9);
    }

    #[test]
    fn haar_first_moment() {
        // mean of |<0|psi>|^2 over many samples approaches 1/d
        let d = dim(11);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let v = haar_sample(d, &mut rng).amp(0).norm_sqr();
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n as f64;
        let stderr = (((sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)) / n as f64).sqrt();
        assert!((mean - 1.0 / 11.0).abs() < 3.0 * stderr, "mean {mean}");
    }

    #[test]
    fn haar_estimate_block_determinism() {
        let d = dim(5);
        let a = haar_estimate(HaarStatistic::P, d, 5000, 42);
        let b = haar_estimate(HaarStatistic::P, d, 5000, 42);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn haar_estimate_t4_at_origin_is_one() {
        let d = dim(5);
        let est = haar_estimate(HaarStatistic::T4(PhasePoint::origin()), d, 500, 1);
        assert!((est.mean - 1.0).abs() < 1e-12);
        assert_eq!(est.analytic, Some(1.0));
    }

    #[test]
    fn haar_estimates_match_analytic() {
        let d = dim(11);
        let n = 20_000usize;
        for stat in [
            HaarStatistic::P,
            HaarStatistic::M,
            HaarStatistic::T4(PhasePoint::new(d, 2, 5)),
        ] {
            let est = haar_estimate(stat, d, n, 12345);
            let analytic = est.analytic.unwrap();
            assert!(
                (est.mean - analytic).abs() < 3.0 * est.stderr,
                "{}: mean {} vs {} (stderr {})",
                est.statistic,
                est.mean,
                analytic,
                est.stderr
            );
        }
    }

    #[test]
    fn histogram_covers_samples() {
        let d = dim(5);
        let (est, hist) = haar_estimate_with_histogram(HaarStatistic::P, d, 3000, 3);
        assert_eq!(est.n_samples, 3000);
        assert_eq!(hist.bins.len(), HISTOGRAM_BINS);
        assert_eq!(hist.bins.iter().sum::<u64>(), 3000);
        // 1/P lies in [1, d]
        let width = (hist.hi - hist.lo) / hist.bins.len() as f64;
        for (i, &c) in hist.bins.iter().enumerate() {
            if c > 0 {
                let lo = hist.lo + width * i as f64;
                assert!(lo >= 1.0 - width && lo <= 5.0);
            }
        }
    }

    #[test]
    fn inverse_reference_values() {
        let d = dim(5);
        let refs = inverse_references(HaarStatistic::M, d).unwrap();
        assert!((refs.position - 1.0).abs() < 1e-10);
        assert!((refs.fiducial - 3.0).abs() < 1e-12);
        // the coherent state sits strictly between
        assert!(refs.coherent > 1.0 && refs.coherent < 3.0);
    }
}

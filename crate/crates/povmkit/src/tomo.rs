//! Monte Carlo simulation of linear quantum state tomography.
//!
//! A trial samples N outcomes of an IC-POVM measured on ρ, estimates the
//! outcome probabilities, and reconstructs ρ̂ = Σ p̂(x)·Q(x) against a dual
//! frame Q. The expected squared Hilbert–Schmidt error of that estimate is
//! (Δ_p(Q) − tr ρ²)/N with Δ_p(Q) = Σ p(x)·(Q(x)|Q(x)); averaged over a
//! Haar orbit ρ = UσU† it becomes (Δ_τ(Q)/d − tr σ²)/N, and for the
//! canonical dual Δ_τ(R) = Tr(𝓕⁻¹). The simulator reports both the
//! empirical mean and the matching closed-form prediction.
//!
//! Reproducibility: trial k draws from a ChaCha8 generator seeded with
//! `splitmix64(seed XOR k·0x9E3779B97F4A7C15)`, so trials are independent,
//! parallelizable, and the whole run is bit-stable for a given seed
//! regardless of thread count.

use ndarray::{Array1, Array2};
use ndarray_linalg::QRSquare;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::MubFamily;
use crate::error::{Error, Result};
use crate::linops::{eigh_complex, hsq, vectorize, Operator, SuperOp};
use crate::povm::{canonical_reconstruction, DiscretePOVM, Povd, ReconstructionOvd};
use crate::tol;

// ---------------------------------------------------------------------------
// Random sampling utilities
// ---------------------------------------------------------------------------

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Child seed for trial `k` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, k: u64) -> u64 {
    splitmix64(seed ^ k.wrapping_mul(0x9E3779B97F4A7C15))
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// the triangular factor's diagonal pushed into Q, which makes the
/// decomposition unique and the distribution exactly invariant.
pub fn haar_random_unitary(dim: usize, rng: &mut impl Rng) -> Operator {
    let scale = 1.0 / 2f64.sqrt();
    let gauss = Array2::from_shape_fn((dim, dim), |_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * scale
    });
    let (q, r) = gauss.qr_square().expect("Gaussian matrix QR");
    let mut u = q;
    for k in 0..dim {
        let rkk: Complex64 = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            u[(i, k)] *= phase;
        }
    }
    Operator::new(u).expect("square unitary")
}

/// Haar-random pure state.
pub fn haar_random_pure_state(dim: usize, rng: &mut impl Rng) -> Array1<Complex64> {
    let mut v = Array1::from_shape_fn(dim, |_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.iter().map(|z: &Complex64| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / norm);
    v
}

/// Random full-rank density matrix GG†/tr(GG†) from a complex Gaussian G.
pub fn random_density_matrix(dim: usize, rng: &mut impl Rng) -> Operator {
    let g = Operator::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let gg = &g * &g.adjoint();
    gg.scale(Complex64::new(1.0, 0.0) / gg.trace())
}

/// Checks Hermiticity, unit trace, and positivity (within 1e-9) of a
/// candidate density matrix.
pub fn validate_density(rho: &Operator) -> Result<()> {
    if !rho.is_hermitian(1e-9 * rho.frobenius_norm().max(1.0)) {
        return Err(Error::InvalidArgument("state is not Hermitian".into()));
    }
    if (rho.trace().re - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "state has trace {}, expected 1",
            rho.trace().re
        )));
    }
    let min = rho.hermitian_part().eigvalsh()?[0];
    if min < -1e-9 {
        return Err(Error::InvalidArgument(format!(
            "state has negative eigenvalue {min:.3e}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Outcome statistics
// ---------------------------------------------------------------------------

/// Multinomial record of N samples over the outcomes of a POVM.
#[derive(Debug, Clone)]
pub struct OutcomeCounts {
    counts: Vec<u64>,
    total: u64,
}

impl OutcomeCounts {
    pub fn new(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Born probabilities p(x) = tr[F(x)ρ] over all outcomes of the POVM.
/// Negative values below roundoff are clamped; anything worse is an error,
/// as is a total away from one.
pub fn born_probabilities(povm: &DiscretePOVM, rho: &Operator) -> Result<Vec<f64>> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs POVM dim {}",
            rho.dim(),
            povm.dim()
        )));
    }
    let mut probs = Vec::with_capacity(povm.len());
    for f in povm.elements() {
        let p = hsq(f, rho);
        if p.im.abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "complex outcome probability {p}; state or POVM not Hermitian"
            )));
        }
        if p.re < tol::PROB_FLOOR {
            return Err(Error::InvalidArgument(format!(
                "negative outcome probability {:.3e}",
                p.re
            )));
        }
        probs.push(p.re.max(0.0));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "outcome probabilities sum to {total}, expected 1"
        )));
    }
    Ok(probs)
}

/// N multinomial samples from the exact Born distribution, by inverse CDF
/// on the cumulative probability vector.
pub fn sample_outcomes(
    povm: &DiscretePOVM,
    rho: &Operator,
    n: u64,
    rng: &mut impl Rng,
) -> Result<OutcomeCounts> {
    let probs = born_probabilities(povm, rho)?;
    sample_from_probabilities(&probs, n, rng)
}

pub(crate) fn sample_from_probabilities(
    probs: &[f64],
    n: u64,
    rng: &mut impl Rng,
) -> Result<OutcomeCounts> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    cdf[last] = 1.0;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..n {
        let u: f64 = rng.gen();
        let idx = cdf.partition_point(|&c| c < u).min(last);
        counts[idx] += 1;
    }
    Ok(OutcomeCounts { counts, total: n })
}

/// Relative frequencies p̂(x) = n(x)/N: the unbiased linear estimate of the
/// outcome probabilities.
pub fn frequency_estimate(counts: &OutcomeCounts) -> Vec<f64> {
    let n = counts.total.max(1) as f64;
    counts.counts.iter().map(|&c| c as f64 / n).collect()
}

/// Constrained estimate for a complete-MUB POVM, treating the outcomes as
/// d+1 separate orthogonal measurements:
/// p̂(e_j^l) = n(e_j^l) / [(d+1)·Σ_k n(e_k^l)].
///
/// Satisfies Σ p̂ = 1 and the d linear constraints
/// Σ c_k(e_j^l)·p̂(e_j^l) = 0 with c_k(e_j^l) = (d+1)δ(k,l) − 1.
pub fn mub_constrained_estimate(counts: &OutcomeCounts, family: &MubFamily) -> Result<Vec<f64>> {
    let d = family.dim();
    mub_constrained_from_counts(counts.counts(), d)
}

pub(crate) fn mub_constrained_from_counts(counts: &[u64], d: usize) -> Result<Vec<f64>> {
    if counts.len() != d * (d + 1) {
        return Err(Error::DimensionMismatch(format!(
            "{} counts for a complete-MUB layout of {} outcomes",
            counts.len(),
            d * (d + 1)
        )));
    }
    let mut out = Vec::with_capacity(counts.len());
    for group in counts.chunks(d) {
        let group_total: u64 = group.iter().sum();
        if group_total == 0 {
            return Err(Error::InvalidArgument(
                "a basis group received no samples; the constrained estimate is undefined".into(),
            ));
        }
        let denom = (d + 1) as f64 * group_total as f64;
        out.extend(group.iter().map(|&c| c as f64 / denom));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Dual frames and error laws
// ---------------------------------------------------------------------------

/// Residual ‖Σ τ(x)|Q(x))(P(x)| − 𝐈‖ of the dual-frame resolution.
pub fn dual_residual(povd: &Povd, dual: &[Operator]) -> Result<f64> {
    if dual.len() != povd.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} dual operators for {} outcomes",
            dual.len(),
            povd.len()
        )));
    }
    let d = povd.dim();
    let mut resolution = SuperOp::zeros(d);
    for ((&tau, q), p) in povd.taus().iter().zip(dual).zip(povd.densities()) {
        let outer = SuperOp::outer(&vectorize(q), &vectorize(p))?;
        resolution = &resolution + &outer.scale(tau);
    }
    Ok((&resolution - &SuperOp::identity(d)).frobenius_norm())
}

fn verify_dual(povd: &Povd, dual: &[Operator]) -> Result<()> {
    let residual = dual_residual(povd, dual)?;
    if residual > tol::DUAL_FRAME {
        return Err(Error::NotADualFrame { residual });
    }
    Ok(())
}

/// Δ_p(Q) = Σ p(x)·(Q(x)|Q(x)) over the retained outcomes.
fn delta_p(probs: &[f64], dual: &[Operator]) -> f64 {
    probs
        .iter()
        .zip(dual)
        .map(|(&p, q)| p * hsq(q, q).re)
        .sum()
}

/// Expected squared error (Δ_p(Q) − tr ρ²)/N of the linear estimate of ρ
/// from N samples, for a verified dual frame Q.
pub fn expected_error(
    povm: &DiscretePOVM,
    dual: &[Operator],
    rho: &Operator,
    n: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let povd = povm.povd();
    verify_dual(&povd, dual)?;
    let probs = povd.restrict(&born_probabilities(povm, rho)?);
    let purity = hsq(rho, rho).re;
    Ok((delta_p(&probs, dual) - purity) / n as f64)
}

/// Δ_τ(Q) = Σ τ(x)·(Q(x)|Q(x)): d times the isotropic average of Δ_p(Q).
/// Equals Tr(𝓕⁻¹) for the canonical dual and is strictly larger for every
/// other dual frame.
pub fn delta_tau(povm: &DiscretePOVM, dual: &[Operator]) -> Result<f64> {
    let povd = povm.povd();
    verify_dual(&povd, dual)?;
    Ok(povd
        .taus()
        .iter()
        .zip(dual)
        .map(|(&tau, q)| tau * hsq(q, q).re)
        .sum())
}

/// Orthonormal basis of the real null space of c ↦ Σ τ(x)c(x)P(x).
///
/// Each kernel vector c, paired with any Hermitian direction G, yields a
/// dual-frame perturbation D(x) = c(x)·G with Σ τ|D)(P| = 0; the POVM must
/// be overcomplete for the kernel to be nontrivial.
pub fn dual_null_coefficients(povm: &DiscretePOVM) -> Result<Vec<Vec<f64>>> {
    let povd = povm.povd();
    let n = povd.len();
    // Gram matrix M_xy = τ_x τ_y Re(P_x|P_y) of the synthesis map.
    let mut m = Array2::<Complex64>::zeros((n, n));
    for x in 0..n {
        for y in 0..n {
            let inner = hsq(&povd.densities()[x], &povd.densities()[y]).re;
            m[(x, y)] = Complex64::new(povd.taus()[x] * povd.taus()[y] * inner, 0.0);
        }
    }
    let (vals, vecs) = eigh_complex(&m)?;
    let max = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut kernel = Vec::new();
    for (k, &lambda) in vals.iter().enumerate() {
        if lambda.abs() <= 1e-10 * max.max(1.0) {
            kernel.push(vecs.column(k).iter().map(|z| z.re).collect());
        }
    }
    Ok(kernel)
}

/// Alternative dual Q(x) = R(x) + c(x)·G from a canonical dual and a kernel
/// direction. Its Δ_τ exceeds the canonical one by exactly
/// Σ τ(x)c(x)²·(G|G).
pub fn perturbed_dual(
    recon: &ReconstructionOvd,
    coefficients: &[f64],
    direction: &Operator,
) -> Result<Vec<Operator>> {
    if coefficients.len() != recon.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} outcomes",
            coefficients.len(),
            recon.len()
        )));
    }
    if !direction.is_hermitian(1e-10 * direction.frobenius_norm().max(1.0)) {
        return Err(Error::InvalidArgument("perturbation direction must be Hermitian".into()));
    }
    Ok(recon
        .operators()
        .iter()
        .zip(coefficients)
        .map(|(r, &c)| r + &direction.scale_re(c))
        .collect())
}

// ---------------------------------------------------------------------------
// The simulator
// ---------------------------------------------------------------------------

/// Probability estimator applied to the sampled counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Raw relative frequencies n(x)/N.
    Frequency,
    /// Per-basis renormalization for complete-MUB POVMs.
    MubConstrained,
}

/// State model for the experiment.
#[derive(Debug, Clone)]
pub enum StateEnsemble {
    /// Measure the same state every trial.
    Fixed(Operator),
    /// Measure UσU† with a fresh Haar U each trial.
    HaarOrbit(Operator),
}

/// Dual frame used for reconstruction.
#[derive(Debug, Clone)]
pub enum DualChoice {
    Canonical,
    /// Explicit dual operators, one per retained outcome; verified before
    /// the run.
    Supplied(Vec<Operator>),
}

/// Full experiment description.
#[derive(Debug, Clone)]
pub struct TomographyConfig {
    pub samples_per_trial: u64,
    pub trials: u64,
    pub seed: u64,
    pub estimator: Estimator,
    pub state_ensemble: StateEnsemble,
    pub dual: DualChoice,
    /// Retain the per-trial squared errors in the result.
    pub keep_trial_errors: bool,
}

/// Monte Carlo record of squared Hilbert–Schmidt reconstruction errors.
#[derive(Debug, Clone, Serialize)]
pub struct TomographyStats {
    pub mean_sq_error: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    /// Closed-form expectation for the frequency estimator with the
    /// configured dual.
    pub predicted: f64,
    pub trials: u64,
    pub samples_per_trial: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_trial_errors: Option<Vec<f64>>,
}

/// Runs the experiment described by `config` against an IC-POVM.
///
/// Each trial draws its state (fixed or Haar orbit), samples N outcomes,
/// estimates probabilities, reconstructs ρ̂ = Σ p̂(x)Q(x), and records
/// ‖ρ − ρ̂‖². Trials run in parallel; accumulation is in trial order.
pub fn run_tomography(povm: &DiscretePOVM, config: &TomographyConfig) -> Result<TomographyStats> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if config.samples_per_trial == 0 {
        return Err(Error::InvalidArgument("need at least one sample per trial".into()));
    }
    let recon = canonical_reconstruction(povm)?;
    let povd = recon.povd().clone();
    let dual: Vec<Operator> = match &config.dual {
        DualChoice::Canonical => recon.operators().to_vec(),
        DualChoice::Supplied(ops) => {
            verify_dual(&povd, ops)?;
            ops.clone()
        }
    };
    if config.estimator == Estimator::MubConstrained {
        validate_mub_layout(povm)?;
    }
    let sigma = match &config.state_ensemble {
        StateEnsemble::Fixed(rho) => {
            validate_density(rho)?;
            rho.clone()
        }
        StateEnsemble::HaarOrbit(sigma) => {
            validate_density(sigma)?;
            sigma.clone()
        }
    };
    let haar = matches!(config.state_ensemble, StateEnsemble::HaarOrbit(_));
    let n = config.samples_per_trial;

    let errors: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, k));
            let rho = if haar {
                let u = haar_random_unitary(povm.dim(), &mut rng);
                &(&u * &sigma) * &u.adjoint()
            } else {
                sigma.clone()
            };
            let probs = born_probabilities(povm, &rho)?;
            let counts = sample_from_probabilities(&probs, n, &mut rng)?;
            let estimate = match config.estimator {
                Estimator::Frequency => frequency_estimate(&counts),
                Estimator::MubConstrained => {
                    mub_constrained_from_counts(counts.counts(), povm.dim())?
                }
            };
            let estimate = povd.restrict(&estimate);
            let mut rho_hat = Operator::zeros(povm.dim());
            for (p, q) in estimate.iter().zip(&dual) {
                rho_hat = &rho_hat + &q.scale_re(*p);
            }
            let diff = &rho - &rho_hat;
            Ok(hsq(&diff, &diff).re)
        })
        .collect::<Result<Vec<f64>>>()?;

    let trials = config.trials as f64;
    let mean = errors.iter().sum::<f64>() / trials;
    let variance = if config.trials > 1 {
        errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1.0)
    } else {
        0.0
    };
    let std_error = (variance / trials).sqrt();

    let predicted = match &config.state_ensemble {
        StateEnsemble::Fixed(rho) => expected_error(povm, &dual, rho, n)?,
        StateEnsemble::HaarOrbit(sigma) => {
            let dt = povd
                .taus()
                .iter()
                .zip(&dual)
                .map(|(&tau, q)| tau * hsq(q, q).re)
                .sum::<f64>();
            (dt / povm.dim() as f64 - hsq(sigma, sigma).re) / n as f64
        }
    };

    Ok(TomographyStats {
        mean_sq_error: mean,
        std_error,
        predicted,
        trials: config.trials,
        samples_per_trial: n,
        seed: config.seed,
        per_trial_errors: config.keep_trial_errors.then_some(errors),
    })
}

/// A MUB-constrained run needs the basis-major layout produced by
/// `mub_povm`: d(d+1) outcomes whose consecutive groups of d each sum to
/// I/(d+1).
fn validate_mub_layout(povm: &DiscretePOVM) -> Result<()> {
    let d = povm.dim();
    if povm.len() != d * (d + 1) {
        return Err(Error::InvalidArgument(format!(
            "MUB-constrained estimator needs d(d+1) = {} outcomes, got {}",
            d * (d + 1),
            povm.len()
        )));
    }
    let target = Operator::identity(d).scale_re(1.0 / (d + 1) as f64);
    for (g, group) in povm.elements().chunks(d).enumerate() {
        let mut sum = Operator::zeros(d);
        for e in group {
            sum = &sum + e;
        }
        if sum.distance(&target) > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "outcome group {g} does not resolve I/(d+1); not a complete-MUB layout"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------

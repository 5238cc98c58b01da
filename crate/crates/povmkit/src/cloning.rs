//! Measurement-based cloning analysis.
//!
//! A strategy pairs a POVM with a per-outcome estimate state ρ̂(x); on input
//! ψ its success probability is f(ψ) = Σ τ(x)·⟨ψ|P(x)|ψ⟩·⟨ψ|ρ̂(x)|ψ⟩.
//! The Haar average obeys f_av = (1/(d(d+1)))·Σ τ(x)(1 + tr[P(x)ρ̂(x)])
//! ≤ 2/(d+1), with equality exactly for rank-one POVMs with ρ̂ = P; the
//! variance of f over ψ vanishes exactly when that POVM is additionally a
//! tight IC-POVM, making f(ψ) = 2/(d+1) flat.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linops::{hsq, Operator};
use crate::povm::{DiscretePOVM, Povd};
use crate::tomo::{haar_random_pure_state, trial_seed, validate_density};

/// Tolerance for the rank-one / ρ̂ = P scope checks of the closed forms.
const SCOPE_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// CloningStrategy
// ---------------------------------------------------------------------------

/// A POVM together with one estimate state per outcome.
#[derive(Debug, Clone)]
pub struct CloningStrategy {
    povm: DiscretePOVM,
    povd: Povd,
    /// Estimate states aligned with the retained outcomes of the Povd.
    estimates: Vec<Operator>,
}

impl CloningStrategy {
    /// Pairs a POVM with explicit estimates (one per retained outcome, each
    /// a valid density matrix).
    pub fn new(povm: DiscretePOVM, estimates: Vec<Operator>) -> Result<Self> {
        let povd = povm.povd();
        if estimates.len() != povd.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} estimates for {} outcomes",
                estimates.len(),
                povd.len()
            )));
        }
        for (k, e) in estimates.iter().enumerate() {
            validate_density(e).map_err(|err| {
                Error::InvalidArgument(format!("estimate {k} is not a state: {err}"))
            })?;
        }
        Ok(Self { povm, povd, estimates })
    }

    /// The natural strategy ρ̂ = P: announce the measured density itself.
    pub fn from_povd(povm: DiscretePOVM) -> Result<Self> {
        let povd = povm.povd();
        let estimates = povd.densities().to_vec();
        Ok(Self { povm, povd, estimates })
    }

    pub fn povm(&self) -> &DiscretePOVM {
        &self.povm
    }

    pub fn povd(&self) -> &Povd {
        &self.povd
    }

    pub fn estimates(&self) -> &[Operator] {
        &self.estimates
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    /// True when every density is rank-one and ρ̂ coincides with it; the
    /// closed-form variance and posterior mean hold only in this scope.
    pub fn is_povd_rank_one(&self) -> bool {
        self.povd
            .densities()
            .iter()
            .zip(&self.estimates)
            .all(|(p, rho)| {
                (hsq(p, p).re - 1.0).abs() <= SCOPE_TOL && p.distance(rho) <= SCOPE_TOL
            })
    }
}

// ---------------------------------------------------------------------------
// Fidelity functionals
// ---------------------------------------------------------------------------

/// Success probability f(ψ) = Σ τ(x)·⟨ψ|P(x)|ψ⟩·⟨ψ|ρ̂(x)|ψ⟩ of cloning the
/// pure state ψ.
pub fn success_probability(
    strategy: &CloningStrategy,
    psi: &ndarray::Array1<Complex64>,
) -> f64 {
    let povd = &strategy.povd;
    povd.taus()
        .iter()
        .zip(povd.densities())
        .zip(&strategy.estimates)
        .map(|((&tau, p), rho)| tau * p.expectation(psi).re * rho.expectation(psi).re)
        .sum()
}

/// Haar-average fidelity (1/(d(d+1)))·Σ τ(x)(1 + tr[P(x)ρ̂(x)]); at most
/// 2/(d+1), met exactly iff the POVM is rank-one with ρ̂ = P.
pub fn average_fidelity(strategy: &CloningStrategy) -> f64 {
    let d = strategy.dim() as f64;
    let povd = &strategy.povd;
    let total: f64 = povd
        .taus()
        .iter()
        .zip(povd.densities())
        .zip(&strategy.estimates)
        .map(|((&tau, p), rho)| tau * (1.0 + hsq(p, rho).re))
        .sum();
    total / (d * (d + 1.0))
}

/// Haar variance of f(ψ) for rank-one strategies with ρ̂ = P, via the
/// closed-form second moment
/// (4/(d(d+1)(d+2)(d+3)))·(d² + 4d + Σ_{x,y} τ(x)τ(y)|⟨x|y⟩|⁴).
/// Zero exactly when the POVM is a tight rank-one IC-POVM.
pub fn fidelity_variance(strategy: &CloningStrategy) -> Result<f64> {
    if !strategy.is_povd_rank_one() {
        return Err(Error::InvalidArgument(
            "closed-form variance requires a rank-one POVM with ρ̂ = P".into(),
        ));
    }
    let d = strategy.dim() as f64;
    let povd = &strategy.povd;
    let n = povd.len();
    let mut quartic = 0.0;
    for x in 0..n {
        for y in 0..n {
            // rank-one densities: (P(x)|P(y)) = |⟨x|y⟩|²
            let overlap = hsq(&povd.densities()[x], &povd.densities()[y]).re;
            quartic += povd.taus()[x] * povd.taus()[y] * overlap * overlap;
        }
    }
    let second = 4.0 / (d * (d + 1.0) * (d + 2.0) * (d + 3.0)) * (d * d + 4.0 * d + quartic);
    let mean = average_fidelity(strategy);
    Ok(second - mean * mean)
}

/// Posterior mean Σ τ(x)⟨ψ|π(x)|ψ⟩·π(x) of the announced state, i.e. the
/// left–right action of 𝓕 on |π(ψ)). Equals (I + |ψ⟩⟨ψ|)/(d+1) exactly
/// when the POVM is a tight rank-one IC-POVM.
pub fn posterior_mean(
    strategy: &CloningStrategy,
    psi: &ndarray::Array1<Complex64>,
) -> Result<Operator> {
    if !strategy.is_povd_rank_one() {
        return Err(Error::InvalidArgument(
            "posterior mean requires a rank-one POVM with ρ̂ = P".into(),
        ));
    }
    let povd = &strategy.povd;
    let mut mean = Operator::zeros(strategy.dim());
    for (&tau, p) in povd.taus().iter().zip(povd.densities()) {
        mean = &mean + &p.scale_re(tau * p.expectation(psi).re);
    }
    Ok(mean)
}

// ---------------------------------------------------------------------------
// Worst case and reports
// ---------------------------------------------------------------------------

/// Sampled upper bound on the worst-case fidelity inf_ψ f(ψ): the minimum
/// over `samples` Haar states, refined by `refine_iters` projected-gradient
/// descent steps. Reproducible per seed.
pub fn worst_case_fidelity(
    strategy: &CloningStrategy,
    samples: usize,
    refine_iters: usize,
    seed: u64,
) -> f64 {
    summarize_fidelity(strategy, samples, refine_iters, seed).f_wc_estimate
}

/// Mean/min/max/std of f(ψ) over the Haar samples.
#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
}

/// Full fidelity report for a strategy.
#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    /// Closed-form Haar average.
    pub f_av: f64,
    /// Sampled-and-refined upper bound on the worst case.
    pub f_wc_estimate: f64,
    /// Closed form within its scope, otherwise the sample variance.
    pub variance: f64,
    pub variance_is_closed_form: bool,
    pub samples: SampleSummary,
}

/// Evaluates f over Haar samples, refines the worst one, and assembles the
/// report.
pub fn summarize_fidelity(
    strategy: &CloningStrategy,
    samples: usize,
    refine_iters: usize,
    seed: u64,
) -> FidelityReport {
    let samples = samples.max(1);
    let d = strategy.dim();
    let values: Vec<(f64, ndarray::Array1<Complex64>)> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, k));
            let psi = haar_random_pure_state(d, &mut rng);
            (success_probability(strategy, &psi), psi)
        })
        .collect();

    let mean = values.iter().map(|(f, _)| f).sum::<f64>() / samples as f64;
    let max = values.iter().map(|(f, _)| *f).fold(f64::NEG_INFINITY, f64::max);
    let var = values.iter().map(|(f, _)| (f - mean).powi(2)).sum::<f64>()
        / (samples as f64 - 1.0).max(1.0);
    let (worst_f, worst_psi) = values
        .into_iter()
        .min_by(|(a, _), (b, _)| a.partial_cmp(b).unwrap())
        .expect("at least one sample");

    let refined = refine_minimum(strategy, worst_psi, worst_f, refine_iters);

    let f_av = average_fidelity(strategy);
    let (variance, closed) = match fidelity_variance(strategy) {
        Ok(v) => (v, true),
        Err(_) => (var, false),
    };
    FidelityReport {
        f_av,
        f_wc_estimate: refined.min(worst_f),
        variance,
        variance_is_closed_form: closed,
        samples: SampleSummary {
            count: samples,
            mean,
            min: worst_f,
            max,
            std: var.sqrt(),
        },
    }
}

/// Projected-gradient descent on f(ψ) from a starting state; returns the
/// lowest value reached.
fn refine_minimum(
    strategy: &CloningStrategy,
    mut psi: ndarray::Array1<Complex64>,
    mut f: f64,
    iters: usize,
) -> f64 {
    let povd = &strategy.povd;
    let d = strategy.dim();
    let gradient = |psi: &ndarray::Array1<Complex64>| {
        let mut grad = ndarray::Array1::<Complex64>::zeros(d);
        for ((&tau, p), rho) in povd.taus().iter().zip(povd.densities()).zip(&strategy.estimates)
        {
            let pexp = p.expectation(psi).re;
            let rexp = rho.expectation(psi).re;
            let pv = p.apply_vec(psi);
            let rv = rho.apply_vec(psi);
            for i in 0..d {
                grad[i] += (pv[i] * rexp + rv[i] * pexp) * tau;
            }
        }
        let radial: Complex64 = psi.iter().zip(grad.iter()).map(|(p, g)| p.conj() * g).sum();
        for (g, p) in grad.iter_mut().zip(psi.iter()) {
            *g -= radial * p;
        }
        grad
    };

    let mut eta = 0.25;
    for _ in 0..iters {
        let grad = gradient(&psi);
        let gnorm_sq: f64 = grad.iter().map(|z| z.norm_sqr()).sum();
        if gnorm_sq < 1e-24 {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial: ndarray::Array1<Complex64> = &psi - &grad.mapv(|z| z * eta);
            let norm = trial.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            trial.mapv_inplace(|z| z / norm);
            let ft = success_probability(strategy, &trial);
            if ft <= f - 1e-4 * eta * gnorm_sq {
                psi = trial;
                f = ft;
                eta = (eta * 1.3).min(1.0);
                accepted = true;
                break;
            }
            eta *= 0.5;
            if eta < 1e-16 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    f
}

// ---------------------------------------------------------------------------

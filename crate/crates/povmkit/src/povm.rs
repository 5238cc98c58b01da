//! POVM data model, trace-measure decomposition, informational-completeness
//! and tightness certification, canonical dual frames, and the closed-form
//! reconstruction paths.
//!
//! A discrete POVM {F(x)} decomposes against its trace measure
//! τ(x) = tr F(x) into unit-trace densities P(x) = F(x)/τ(x). The POVM
//! superoperator 𝓕 = Σ τ(x)|P(x))(P(x)| drives everything here: the POVM is
//! informationally complete iff 𝓕 has full left–right rank, the canonical
//! dual is R(x) = 𝓕⁻¹|P(x)), and the POVM is a *tight* IC-POVM when
//! 𝚷₀𝓕𝚷₀ = a𝚷₀ on the traceless subspace, in which case reconstruction
//! needs no superoperator inversion at all.

use serde::Serialize;

use crate::designs::WeightedDesign;
use crate::error::{Error, Result};
use crate::linops::{
    herm_eig, hsq, identity_superops, superop_inverse, vectorize, Operator, SuperOp,
};
use crate::tol;

// ---------------------------------------------------------------------------
// DiscretePOVM
// ---------------------------------------------------------------------------

/// A finite family of positive operators summing to the identity.
#[derive(Debug, Clone)]
pub struct DiscretePOVM {
    dim: usize,
    elements: Vec<Operator>,
    labels: Vec<String>,
}

/// Per-element and global diagnostics from [`DiscretePOVM::validate`].
#[derive(Debug, Clone, Serialize)]
pub struct PovmDiagnostics {
    /// Smallest eigenvalue of the Hermitian part of each element.
    pub element_min_eigenvalues: Vec<f64>,
    /// max |F − F†| per element.
    pub element_hermiticity: Vec<f64>,
    /// Frobenius norm of Σ F(x) − I.
    pub sum_residual: f64,
    pub pass: bool,
    pub tol: f64,
}

impl DiscretePOVM {
    /// Builds a POVM and checks its invariants at the default tolerances:
    /// every element PSD within the eigenvalue floor, sum equal to the
    /// identity within the sum residual.
    pub fn new(dim: usize, elements: Vec<Operator>) -> Result<Self> {
        let labels = (0..elements.len()).map(|k| k.to_string()).collect();
        Self::with_labels(dim, elements, labels)
    }

    /// [`DiscretePOVM::new`] with explicit outcome labels.
    pub fn with_labels(
        dim: usize,
        elements: Vec<Operator>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let povm = Self::new_unchecked(dim, elements, labels)?;
        let diag = povm.validate(tol::POVM_SUM);
        if !diag.pass {
            return Err(Error::InvalidPovm(format!(
                "min eigenvalue {:.3e}, sum residual {:.3e} (tol {:.1e})",
                diag.element_min_eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min),
                diag.sum_residual,
                diag.tol,
            )));
        }
        Ok(povm)
    }

    /// Wraps elements without checking positivity or normalization. Intended
    /// for diagnostics on candidate data; analysis entry points revalidate.
    pub fn new_unchecked(
        dim: usize,
        elements: Vec<Operator>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("a POVM needs at least one element".into()));
        }
        if labels.len() != elements.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} elements",
                labels.len(),
                elements.len()
            )));
        }
        for (k, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "element {k} has dimension {}, expected {dim}",
                    e.dim()
                )));
            }
        }
        Ok(Self { dim, elements, labels })
    }

    /// Rank-one POVM d·w(x)·π(x) from a weighted design; the design must be
    /// a 1-design for the elements to sum to the identity.
    pub fn from_design(design: &WeightedDesign) -> Result<Self> {
        let d = design.dim();
        let elements = design
            .points()
            .iter()
            .zip(design.weights())
            .map(|(x, &w)| Operator::projector(x).scale_re(w * d as f64))
            .collect();
        Self::new(d, elements)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Positivity and normalization diagnostics; never fails.
    pub fn validate(&self, tol: f64) -> PovmDiagnostics {
        let mut mins = Vec::with_capacity(self.elements.len());
        let mut herms = Vec::with_capacity(self.elements.len());
        let mut sum = Operator::zeros(self.dim);
        for e in &self.elements {
            herms.push(e.hermiticity_deviation());
            let evs = e
                .hermitian_part()
                .eigvalsh()
                .expect("hermitian part is Hermitian");
            mins.push(evs[0]);
            sum = &sum + e;
        }
        let sum_residual = sum.distance(&Operator::identity(self.dim));
        let pass = sum_residual <= tol
            && mins.iter().all(|&m| m >= -tol)
            && herms.iter().all(|&h| h <= tol);
        PovmDiagnostics {
            element_min_eigenvalues: mins,
            element_hermiticity: herms,
            sum_residual,
            pass,
            tol,
        }
    }

    /// Trace-measure decomposition; see [`povd_decompose`].
    pub fn povd(&self) -> Povd {
        povd_decompose(self)
    }
}

/// Diagnostic form of the POVM invariants at tolerance `tol`.
pub fn validate_povm(povm: &DiscretePOVM, tol: f64) -> PovmDiagnostics {
    povm.validate(tol)
}

// ---------------------------------------------------------------------------
// Povd: trace measure and density
// ---------------------------------------------------------------------------

/// Trace-measure decomposition F(x) = τ(x)·P(x) with tr P(x) = 1.
///
/// Zero-trace elements carry no measure and are dropped; `retained` maps each
/// kept density back to its outcome index in the source POVM.
#[derive(Debug, Clone)]
pub struct Povd {
    dim: usize,
    taus: Vec<f64>,
    densities: Vec<Operator>,
    retained: Vec<usize>,
    dropped: Vec<usize>,
}

impl Povd {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn densities(&self) -> &[Operator] {
        &self.densities
    }

    /// Outcome indices in the source POVM for each retained density.
    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    /// Outcome indices dropped as τ-null.
    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    /// Σ τ(x), equal to d for a valid POVM.
    pub fn total_measure(&self) -> f64 {
        self.taus.iter().sum()
    }

    /// Tr(𝓕) = Σ τ(x)·tr[P(x)²] without building the superoperator.
    pub fn superop_trace(&self) -> f64 {
        self.taus
            .iter()
            .zip(&self.densities)
            .map(|(&t, p)| t * hsq(p, p).re)
            .sum()
    }

    /// Restricts a per-outcome vector of the source POVM to the retained
    /// outcomes.
    pub fn restrict<T: Copy>(&self, full: &[T]) -> Vec<T> {
        self.retained.iter().map(|&i| full[i]).collect()
    }
}

/// Splits a POVM into its trace measure τ(x) = tr F(x) and unit-trace
/// densities P(x) = F(x)/τ(x), dropping τ-null outcomes.
pub fn povd_decompose(povm: &DiscretePOVM) -> Povd {
    let mut taus = Vec::new();
    let mut densities = Vec::new();
    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    for (k, e) in povm.elements().iter().enumerate() {
        let tau = e.trace().re;
        if tau <= 1e-12 {
            dropped.push(k);
            continue;
        }
        taus.push(tau);
        densities.push(e.scale_re(1.0 / tau));
        retained.push(k);
    }
    Povd { dim: povm.dim(), taus, densities, retained, dropped }
}

// ---------------------------------------------------------------------------
// POVM superoperator and informational completeness
// ---------------------------------------------------------------------------

/// 𝓕 = Σ τ(x)|P(x))(P(x)|, Hermitian and PSD, with 𝓕|I) = |I).
pub fn povm_superoperator(povm: &DiscretePOVM) -> SuperOp {
    superop_from_povd(&povm.povd())
}

pub(crate) fn superop_from_povd(povd: &Povd) -> SuperOp {
    let mut s = SuperOp::zeros(povd.dim());
    for (&tau, p) in povd.taus().iter().zip(povd.densities()) {
        let ket = vectorize(p);
        let outer = SuperOp::outer(&ket, &ket).expect("same dim");
        s = &s + &outer.scale(tau);
    }
    s
}

/// Outcome of [`ic_check`].
#[derive(Debug, Clone, Serialize)]
pub struct IcReport {
    pub is_ic: bool,
    /// Smallest left–right eigenvalue of 𝓕.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Retained (τ-positive) outcome count.
    pub outcomes: usize,
}

/// A POVM is informationally complete iff 𝓕 is strictly positive; `tol` is
/// relative to the largest eigenvalue. Fewer than d² outcomes can never be
/// complete.
pub fn ic_check(povm: &DiscretePOVM, tol: f64) -> IcReport {
    let povd = povm.povd();
    let superop = superop_from_povd(&povd);
    let eig = herm_eig(&superop).expect("POVM superoperator is Hermitian by construction");
    let lambda_min = eig.eigenvalues[0];
    let lambda_max = *eig.eigenvalues.last().unwrap();
    let outcomes = povd.len();
    let is_ic = outcomes >= povm.dim() * povm.dim() && lambda_min > tol * lambda_max;
    IcReport { is_ic, lambda_min, lambda_max, outcomes }
}

/// Frame constant a(F) = (Σ τ(x)·tr[P(x)²] − 1)/(d² − 1): the eigenvalue of
/// 𝓕 on traceless operators when F is tight.
pub fn frame_constant(povm: &DiscretePOVM) -> f64 {
    let povd = povm.povd();
    let d = povm.dim();
    debug_assert!(d >= 2, "frame constant needs d ≥ 2");
    (povd.superop_trace() - 1.0) / (d * d - 1) as f64
}

// ---------------------------------------------------------------------------
// Canonical dual frame and reconstruction
// ---------------------------------------------------------------------------

/// Canonical dual frame R(x) = 𝓕⁻¹|P(x)), one Hermitian operator per
/// retained outcome. Satisfies tr R(x) = 1, Σ τ(x)R(x) = I, and the
/// resolution Σ τ(x)|R(x))(P(x)| = 𝐈.
#[derive(Debug, Clone)]
pub struct ReconstructionOvd {
    povd: Povd,
    operators: Vec<Operator>,
}

impl ReconstructionOvd {
    pub fn povd(&self) -> &Povd {
        &self.povd
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Linear estimate Σ p(x)·R(x) from per-outcome probabilities (indexed
    /// like the retained outcomes). Empirical frequencies are used as given,
    /// without renormalization.
    pub fn reconstruct(&self, probabilities: &[f64]) -> Result<Operator> {
        let probs = checked_probabilities(probabilities, self.operators.len())?;
        let mut rho = Operator::zeros(self.povd.dim());
        for (p, r) in probs.iter().zip(&self.operators) {
            rho = &rho + &r.scale_re(*p);
        }
        Ok(rho)
    }
}

fn checked_probabilities(probabilities: &[f64], expected: usize) -> Result<Vec<f64>> {
    if probabilities.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} outcomes",
            probabilities.len(),
            expected
        )));
    }
    probabilities
        .iter()
        .map(|&p| {
            if p < tol::PROB_FLOOR {
                Err(Error::InvalidArgument(format!("negative probability {p}")))
            } else {
                Ok(p.max(0.0))
            }
        })
        .collect()
}

/// Builds the canonical dual frame; fails on POVMs that are not
/// informationally complete.
pub fn canonical_reconstruction(povm: &DiscretePOVM) -> Result<ReconstructionOvd> {
    let report = ic_check(povm, tol::SPECTRAL_REL);
    if !report.is_ic {
        return Err(Error::NotInformationallyComplete {
            lambda_min: report.lambda_min / report.lambda_max.max(f64::MIN_POSITIVE),
        });
    }
    let povd = povm.povd();
    let superop = superop_from_povd(&povd);
    let inverse = superop_inverse(&superop, tol::SPECTRAL_REL)?;
    let operators = povd
        .densities()
        .iter()
        .map(|p| {
            let r = inverse.apply_op(p).expect("matching dims");
            // 𝓕⁻¹ maps Hermitian operators to Hermitian operators; strip
            // roundoff drift.
            r.hermitian_part()
        })
        .collect();
    Ok(ReconstructionOvd { povd, operators })
}

/// State-reconstruction formula ρ = Σ p(x)·R(x) with the canonical dual.
pub fn reconstruct(povm: &DiscretePOVM, probabilities: &[f64]) -> Result<Operator> {
    canonical_reconstruction(povm)?.reconstruct(probabilities)
}

// ---------------------------------------------------------------------------
// Tightness
// ---------------------------------------------------------------------------

/// Certification of the tight IC-POVM property and related frame bounds.
#[derive(Debug, Clone, Serialize)]
pub struct TightnessReport {
    /// Frame constant a(F).
    pub a: f64,
    /// ‖𝚷₀𝓕𝚷₀ − a𝚷₀‖ (Frobenius).
    pub residual: f64,
    pub is_tight: bool,
    /// ‖𝓕 − (𝐈 + 𝓘)/(d+1)‖ (Frobenius).
    pub rank_one_residual: f64,
    pub is_rank_one_tight: bool,
    /// Tr(𝓕⁻¹); `None` when 𝓕 is singular (POVM not informationally
    /// complete). At least d(d(d+1)−1) with equality exactly for tight
    /// rank-one IC-POVMs.
    pub trace_inverse: Option<f64>,
    /// Tr(𝓕) = Σ τ(x)·tr[P(x)²]; equals d exactly for rank-one POVMs.
    pub trace_f: f64,
    /// Σ_{x,y} τ(x)τ(y)·(P(x)|P(y))², computed by direct double summation.
    pub frame_bound_lhs: f64,
    /// 1 + (Tr𝓕 − 1)²/(d² − 1); the frame bound, met exactly iff tight.
    pub frame_bound_rhs: f64,
}

/// Checks 𝚷₀𝓕𝚷₀ = a𝚷₀ with a = frame_constant(F), plus the rank-one
/// characterization 𝓕 = (𝐈 + 𝓘)/(d+1) and the frame-bound quantities.
///
/// `is_tight` additionally requires a > tol, so POVMs whose densities carry
/// no traceless component (e.g. the single-outcome POVM {I}) are rejected
/// even though their residual vanishes.
pub fn tightness_check(povm: &DiscretePOVM, tol_in: f64) -> TightnessReport {
    let d = povm.dim();
    let povd = povm.povd();
    let superop = superop_from_povd(&povd);
    let (identity, cal_i, pi0) = identity_superops(d);

    let a = frame_constant(povm);
    let projected = pi0.compose(&superop).and_then(|m| m.compose(&pi0)).expect("same dim");
    let residual = (&projected - &pi0.scale(a)).frobenius_norm();
    let is_tight = residual <= tol_in && a > tol_in;

    let target = (&identity + &cal_i).scale(1.0 / (d + 1) as f64);
    let rank_one_residual = (&superop - &target).frobenius_norm();
    let is_rank_one_tight = rank_one_residual <= tol_in;

    let eig = herm_eig(&superop).expect("POVM superoperator is Hermitian by construction");
    let lambda_max = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let trace_inverse = if eig.eigenvalues[0] > tol::SPECTRAL_REL * lambda_max {
        Some(eig.eigenvalues.iter().map(|l| 1.0 / l).sum())
    } else {
        None
    };

    let trace_f = povd.superop_trace();
    let n = povd.len();
    let mut lhs = 0.0;
    for x in 0..n {
        for y in 0..n {
            let inner = hsq(&povd.densities()[x], &povd.densities()[y]).re;
            lhs += povd.taus()[x] * povd.taus()[y] * inner * inner;
        }
    }
    let rhs = 1.0 + (trace_f - 1.0).powi(2) / (d * d - 1) as f64;

    TightnessReport {
        a,
        residual,
        is_tight,
        rank_one_residual,
        is_rank_one_tight,
        trace_inverse,
        trace_f,
        frame_bound_lhs: lhs,
        frame_bound_rhs: rhs,
    }
}

/// Closed-form reconstruction for tight IC-POVMs:
/// ρ = (1/a)·Σ p(x)P(x) − ((1−a)/(ad))·I. Rejects POVMs that fail the
/// tightness check at the default tolerance.
pub fn tight_reconstruct(povm: &DiscretePOVM, probabilities: &[f64]) -> Result<Operator> {
    let report = tightness_check(povm, tol::TIGHTNESS_ABS);
    if !report.is_tight {
        return Err(Error::NotTight {
            residual: report.residual,
            frame_constant: report.a,
        });
    }
    let povd = povm.povd();
    let probs = checked_probabilities(probabilities, povd.len())?;
    let d = povm.dim();
    let a = report.a;
    let mut rho = Operator::zeros(d);
    for (p, density) in probs.iter().zip(povd.densities()) {
        rho = &rho + &density.scale_re(p / a);
    }
    rho = &rho - &Operator::identity(d).scale_re((1.0 - a) / (a * d as f64));
    Ok(rho)
}

// ---------------------------------------------------------------------------
// Rank-one POVMs as designs
// ---------------------------------------------------------------------------

/// Reads a rank-one POVM as the weighted set (𝒳, τ/d) of its density
/// directions. Fails when any density has purity tr(P²) away from one.
pub fn design_from_rank_one_povm(povm: &DiscretePOVM, tol_in: f64) -> Result<WeightedDesign> {
    let povd = povm.povd();
    let mut points = Vec::with_capacity(povd.len());
    for (k, p) in povd.densities().iter().enumerate() {
        let purity = hsq(p, p).re;
        if (purity - 1.0).abs() > tol_in {
            return Err(Error::InvalidArgument(format!(
                "density {k} has purity {purity}, not rank-one within {tol_in}"
            )));
        }
        let (_, vecs) = p.eigh()?;
        points.push(vecs.last().expect("nonempty spectrum").clone());
    }
    let d = povm.dim() as f64;
    let weights = povd.taus().iter().map(|t| t / d).collect();
    WeightedDesign::normalized(povm.dim(), points, weights)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{basis_povm, mub_povm, random_rank_one_povm, sic_povm};
    use crate::designs::{is_t_design, welch_bound};
    use crate::linops::hs_inner;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use ndarray::Array1;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_density(dim: usize, rng: &mut impl Rng) -> Operator {
        let g = Operator::from_fn(dim, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let gg = &g * &g.adjoint();
        gg.scale(c(1.0, 0.0) / gg.trace())
    }

    fn born(povm: &DiscretePOVM, rho: &Operator) -> Vec<f64> {
        povm.elements().iter().map(|f| hsq(f, rho).re).collect()
    }

    #[test]
    fn validate_pass_and_fail() {
        let sic = sic_povm(2).unwrap();
        assert!(sic.validate(1e-10).pass);

        let single = DiscretePOVM::new(2, vec![Operator::identity(2)]).unwrap();
        assert!(single.validate(1e-10).pass);

        let bad = DiscretePOVM::new_unchecked(
            2,
            vec![Operator::identity(2), Operator::identity(2).scale_re(0.5)],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let diag = bad.validate(1e-10);
        assert!(!diag.pass);
        assert!(diag.sum_residual > 0.5);
        assert!(DiscretePOVM::new(2, vec![Operator::identity(2).scale_re(0.9)]).is_err());
    }

    #[test]
    fn povd_of_sic_and_mub() {
        let sic = sic_povm(2).unwrap();
        let povd = sic.povd();
        assert_eq!(povd.len(), 4);
        for &tau in povd.taus() {
            assert_abs_diff_eq!(tau, 0.5, epsilon = 1e-12);
        }
        for p in povd.densities() {
            assert_abs_diff_eq!(p.trace().re, 1.0, epsilon = 1e-12);
            // pure projector
            assert_abs_diff_eq!(hsq(p, p).re, 1.0, epsilon = 1e-10);
        }

        let mub = mub_povm(2).unwrap();
        let povd = mub.povd();
        assert_eq!(povd.len(), 6);
        for &tau in povd.taus() {
            assert_abs_diff_eq!(tau, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn povd_drops_zero_elements() {
        let sic = sic_povm(2).unwrap();
        let mut elements = sic.elements().to_vec();
        elements.push(Operator::zeros(2));
        let labels = (0..5).map(|k| k.to_string()).collect();
        let povm = DiscretePOVM::new_unchecked(2, elements, labels).unwrap();
        let povd = povm.povd();
        assert_eq!(povd.len(), 4);
        assert_eq!(povd.dropped(), &[4]);
        assert_abs_diff_eq!(povd.total_measure(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn superoperator_spectrum_of_sic() {
        let sic = sic_povm(2).unwrap();
        let s = povm_superoperator(&sic);
        let eig = herm_eig(&s).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0], 1.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.eigenvalues[1], 1.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.eigenvalues[2], 1.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.eigenvalues[3], 1.0, epsilon = 1e-10);

        let inv = superop_inverse(&s, tol::SPECTRAL_REL).unwrap();
        let eig = herm_eig(&inv).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(eig.eigenvalues[3], 3.0, epsilon = 1e-9);
    }

    #[test]
    fn identity_is_always_an_eigenvector() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let povms = vec![
            sic_povm(2).unwrap(),
            sic_povm(3).unwrap(),
            mub_povm(2).unwrap(),
            mub_povm(3).unwrap(),
            basis_povm(3).unwrap(),
            random_rank_one_povm(2, 5, rng.gen()).unwrap(),
        ];
        for povm in &povms {
            let s = povm_superoperator(povm);
            let id = Operator::identity(povm.dim());
            let out = s.apply_op(&id).unwrap();
            assert!(out.distance(&id) < 1e-10);
        }
    }

    #[test]
    fn basis_povm_superoperator_is_rank_d() {
        let povm = basis_povm(3).unwrap();
        let s = povm_superoperator(&povm);
        let eig = herm_eig(&s).unwrap();
        let rank = eig.eigenvalues.iter().filter(|&&l| l > 1e-10).count();
        assert_eq!(rank, 3);
    }

    #[test]
    fn ic_check_results() {
        let r = ic_check(&sic_povm(3).unwrap(), tol::SPECTRAL_REL);
        assert!(r.is_ic);
        assert_abs_diff_eq!(r.lambda_min, 0.25, epsilon = 1e-10);

        let r = ic_check(&basis_povm(2).unwrap(), tol::SPECTRAL_REL);
        assert!(!r.is_ic);
        assert_abs_diff_eq!(r.lambda_min, 0.0, epsilon = 1e-12);

        for seed in 0..20 {
            let povm = random_rank_one_povm(2, 4, seed).unwrap();
            assert!(ic_check(&povm, tol::SPECTRAL_REL).is_ic);
        }
    }

    #[test]
    fn canonical_dual_of_sic_is_closed_form() {
        // R(x) = (d+1)P(x) − I for a SIC.
        for d in [2usize, 3] {
            let sic = sic_povm(d).unwrap();
            let ovd = canonical_reconstruction(&sic).unwrap();
            let povd = ovd.povd();
            for (r, p) in ovd.operators().iter().zip(povd.densities()) {
                let expect = &p.scale_re((d + 1) as f64) - &Operator::identity(d);
                assert!(r.distance(&expect) < 1e-9);
            }
        }
    }

    #[test]
    fn dual_frame_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let povms = vec![
            sic_povm(2).unwrap(),
            mub_povm(3).unwrap(),
            random_rank_one_povm(2, 6, rng.gen()).unwrap(),
            random_rank_one_povm(3, 11, rng.gen()).unwrap(),
        ];
        for povm in &povms {
            let d = povm.dim();
            let ovd = canonical_reconstruction(povm).unwrap();
            let povd = ovd.povd();
            // tr R = 1
            for r in ovd.operators() {
                assert_abs_diff_eq!(r.trace().re, 1.0, epsilon = 1e-9);
                assert!(r.hermiticity_deviation() < 1e-12);
            }
            // Σ τ R = I
            let mut sum = Operator::zeros(d);
            for (&tau, r) in povd.taus().iter().zip(ovd.operators()) {
                sum = &sum + &r.scale_re(tau);
            }
            assert!(sum.distance(&Operator::identity(d)) < 1e-9);
            // Σ τ |R)(P| = 𝐈
            let mut resolution = SuperOp::zeros(d);
            for ((&tau, r), p) in povd.taus().iter().zip(ovd.operators()).zip(povd.densities()) {
                let outer = SuperOp::outer(&vectorize(r), &vectorize(p)).unwrap();
                resolution = &resolution + &outer.scale(tau);
            }
            assert!((&resolution - &SuperOp::identity(d)).frobenius_norm() < 1e-9);
            // 𝓕⁻¹ = Σ τ |R)(R|
            let finv = superop_inverse(&povm_superoperator(povm), tol::SPECTRAL_REL).unwrap();
            let mut sum = SuperOp::zeros(d);
            for (&tau, r) in povd.taus().iter().zip(ovd.operators()) {
                let outer = SuperOp::outer(&vectorize(r), &vectorize(r)).unwrap();
                sum = &sum + &outer.scale(tau);
            }
            assert!((&finv - &sum).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn canonical_reconstruction_rejects_non_ic() {
        assert!(matches!(
            canonical_reconstruction(&basis_povm(2).unwrap()),
            Err(Error::NotInformationallyComplete { .. })
        ));
    }

    #[test]
    fn reconstruct_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);

        // maximally mixed state under any IC-POVM
        let mub = mub_povm(3).unwrap();
        let mixed = Operator::identity(3).scale_re(1.0 / 3.0);
        let rho = reconstruct(&mub, &born(&mub, &mixed)).unwrap();
        assert!(rho.distance(&mixed) < 1e-10);

        // random pure state under the qubit SIC
        let sic = sic_povm(2).unwrap();
        for _ in 0..20 {
            let mut v: Array1<Complex64> = Array1::from_shape_fn(2, |_| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.mapv_inplace(|z| z / norm);
            let pure = Operator::projector(&v);
            let rho = reconstruct(&sic, &born(&sic, &pure)).unwrap();
            assert!(rho.distance(&pure) < 1e-10);
        }

        // random mixed states under the d=3 MUB POVM
        for _ in 0..20 {
            let target = random_density(3, &mut rng);
            let rho = reconstruct(&mub, &born(&mub, &target)).unwrap();
            assert!(rho.distance(&target) < 1e-10);
        }
    }

    #[test]
    fn reconstruct_rejects_bad_lengths() {
        let sic = sic_povm(2).unwrap();
        assert!(matches!(
            reconstruct(&sic, &[0.25, 0.25, 0.5]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            reconstruct(&sic, &[0.5, 0.5, 0.5, -0.5]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn frame_constant_values() {
        assert_abs_diff_eq!(frame_constant(&sic_povm(2).unwrap()), 1.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(frame_constant(&mub_povm(3).unwrap()), 0.25, epsilon = 1e-10);
        // single-outcome POVM {I}: P = I/d has tr P² = 1/d, numerator
        // d·(1/d) − 1 = 0.
        let single = DiscretePOVM::new(2, vec![Operator::identity(2)]).unwrap();
        assert_abs_diff_eq!(frame_constant(&single), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tightness_of_sic_and_mub() {
        let report = tightness_check(&sic_povm(2).unwrap(), tol::TIGHTNESS_ABS);
        assert!(report.is_tight);
        assert!(report.is_rank_one_tight);
        assert_abs_diff_eq!(report.a, 1.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.trace_inverse.unwrap(), 10.0, epsilon = 1e-9);
        assert_abs_diff_eq!(report.trace_f, 2.0, epsilon = 1e-10);

        let report = tightness_check(&mub_povm(2).unwrap(), tol::TIGHTNESS_ABS);
        assert!(report.is_rank_one_tight);
        assert_abs_diff_eq!(report.frame_bound_lhs, 4.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(report.trace_inverse.unwrap(), 10.0, epsilon = 1e-9);
    }

    #[test]
    fn single_outcome_povm_is_not_tight() {
        // residual vanishes but a = 0, so the definition's a > 0 clause must
        // reject it.
        let single = DiscretePOVM::new(2, vec![Operator::identity(2)]).unwrap();
        let report = tightness_check(&single, tol::TIGHTNESS_ABS);
        assert!(report.residual < 1e-12);
        assert!(!report.is_tight);
    }

    #[test]
    fn random_povms_are_generically_not_tight() {
        for seed in 0..100 {
            let povm = random_rank_one_povm(2, 6, seed).unwrap();
            let report = tightness_check(&povm, tol::TIGHTNESS_ABS);
            assert!(!report.is_tight, "seed {seed}");
            assert!(report.frame_bound_lhs > 4.0 / 3.0 + 1e-6, "seed {seed}");
            assert!(report.trace_inverse.unwrap() > 10.0 + 1e-4, "seed {seed}");
        }
    }

    #[test]
    fn frame_bound_inequality_and_equality_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let pool = vec![
            sic_povm(2).unwrap(),
            sic_povm(3).unwrap(),
            mub_povm(2).unwrap(),
            mub_povm(3).unwrap(),
            basis_povm(2).unwrap(),
            random_rank_one_povm(2, 6, rng.gen()).unwrap(),
            random_rank_one_povm(3, 10, rng.gen()).unwrap(),
        ];
        for povm in &pool {
            let report = tightness_check(povm, tol::TIGHTNESS_ABS);
            assert!(report.frame_bound_lhs >= report.frame_bound_rhs - 1e-10);
            let equality = (report.frame_bound_lhs - report.frame_bound_rhs).abs() < 1e-9;
            assert_eq!(equality, report.is_tight);
            // the double-sum route must agree with Tr(𝓕²)
            let s = povm_superoperator(povm);
            let tr_sq = s.compose(&s).unwrap().supertrace().re;
            assert_abs_diff_eq!(report.frame_bound_lhs, tr_sq, epsilon = 1e-9);
        }
    }

    #[test]
    fn tight_reconstruct_agrees_with_canonical() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let mub = mub_povm(3).unwrap();
        let ovd = canonical_reconstruction(&mub).unwrap();
        for _ in 0..50 {
            let target = random_density(3, &mut rng);
            let probs = born(&mub, &target);
            let via_tight = tight_reconstruct(&mub, &probs).unwrap();
            let via_dual = ovd.reconstruct(&probs).unwrap();
            assert!(via_tight.distance(&via_dual) < 1e-9);
            assert!(via_tight.distance(&target) < 1e-9);
        }

        let sic = sic_povm(2).unwrap();
        let mut v: Array1<Complex64> =
            Array1::from_shape_fn(2, |_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.mapv_inplace(|z| z / norm);
        let pure = Operator::projector(&v);
        let rho = tight_reconstruct(&sic, &born(&sic, &pure)).unwrap();
        assert!(rho.distance(&pure) < 1e-10);

        let mub2 = mub_povm(2).unwrap();
        let mixed = Operator::identity(2).scale_re(0.5);
        let rho = tight_reconstruct(&mub2, &born(&mub2, &mixed)).unwrap();
        assert!(rho.distance(&mixed) < 1e-10);
    }

    #[test]
    fn tight_reconstruct_rejects_non_tight() {
        let povm = random_rank_one_povm(2, 6, 3).unwrap();
        let probs = vec![1.0 / 6.0; 6];
        assert!(matches!(
            tight_reconstruct(&povm, &probs),
            Err(Error::NotTight { .. })
        ));
    }

    #[test]
    fn superoperator_splits_into_trace_and_traceless_parts() {
        // 𝓕 = 𝓘/d + Σ τ(x)|P(x) − I/d)(P(x) − I/d|
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for povm in [mub_povm(3).unwrap(), random_rank_one_povm(2, 6, rng.gen()).unwrap()] {
            let d = povm.dim();
            let povd = povm.povd();
            let mut shifted = crate::linops::identity_dyad(d).scale(1.0 / d as f64);
            let id_over_d = Operator::identity(d).scale_re(1.0 / d as f64);
            for (&tau, p) in povd.taus().iter().zip(povd.densities()) {
                let ket = vectorize(&(p - &id_over_d));
                shifted = &shifted + &SuperOp::outer(&ket, &ket).unwrap().scale(tau);
            }
            let direct = povm_superoperator(&povm);
            assert!((&direct - &shifted).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn povm_from_design_round_trips() {
        // a certified 2-design, read back as a POVM, is rank-one tight
        let mub = mub_povm(2).unwrap();
        let design = design_from_rank_one_povm(&mub, 1e-9).unwrap();
        let povm = DiscretePOVM::from_design(&design).unwrap();
        assert_eq!(povm.len(), 6);
        assert!(povm.validate(tol::POVM_SUM).pass);
        assert!(tightness_check(&povm, tol::TIGHTNESS_ABS).is_rank_one_tight);

        // a bare 1-design that is not a 2-design yields a valid POVM that
        // fails informational completeness
        let basis = design_from_rank_one_povm(&basis_povm(2).unwrap(), 1e-9).unwrap();
        let povm = DiscretePOVM::from_design(&basis).unwrap();
        assert!(povm.validate(tol::POVM_SUM).pass);
        assert!(!ic_check(&povm, tol::SPECTRAL_REL).is_ic);
    }

    #[test]
    fn rank_one_tightness_matches_design_oracle() {
        // is_rank_one_tight ⇔ the outcome distribution (𝒳, τ/d) is a
        // 2-design.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let pool = vec![
            sic_povm(2).unwrap(),
            sic_povm(3).unwrap(),
            mub_povm(2).unwrap(),
            mub_povm(3).unwrap(),
            random_rank_one_povm(2, 6, rng.gen()).unwrap(),
            random_rank_one_povm(3, 9, rng.gen()).unwrap(),
        ];
        for povm in &pool {
            let report = tightness_check(povm, tol::TIGHTNESS_ABS);
            let design = design_from_rank_one_povm(povm, 1e-8).unwrap();
            let design_report = is_t_design(&design, 2, 1e-8);
            assert_eq!(report.is_rank_one_tight, design_report.is_design);
            if report.is_rank_one_tight {
                assert_abs_diff_eq!(
                    design_report.potential,
                    welch_bound(povm.dim(), 2),
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn hs_inner_exported_for_probabilities() {
        let sic = sic_povm(2).unwrap();
        let mixed = Operator::identity(2).scale_re(0.5);
        let p: Vec<f64> = sic
            .elements()
            .iter()
            .map(|f| hs_inner(f, &mixed).unwrap().re)
            .collect();
        for &x in &p {
            assert_abs_diff_eq!(x, 0.25, epsilon = 1e-12);
        }
    }
}

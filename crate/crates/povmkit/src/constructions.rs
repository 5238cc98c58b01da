//! Canonical POVM and design generators.
//!
//! SIC-POVMs come from Weyl–Heisenberg orbits of a fiducial vector
//! (analytic fiducials for d = 2, 3; numerical search elsewhere), complete
//! MUB sets exist here for prime dimension, and two control families round
//! out the test pool: the orthonormal-basis POVM (never informationally
//! complete for d ≥ 2) and random rank-one POVMs (almost surely complete for
//! n ≥ d², almost never tight).
//!
//! Every generator validates its output instead of trusting constants:
//! overlap tables are checked at build time.

use ndarray::Array1;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::designs::{fix_phase, is_t_design, SearchOpts, WeightedDesign};
use crate::error::{Error, Result};
use crate::linops::Operator;
use crate::povm::DiscretePOVM;

fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

pub(crate) fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Weyl–Heisenberg displacements
// ---------------------------------------------------------------------------

/// The d² clock-and-shift unitaries D_{j,k} = X^j Z^k, ordered j·d + k,
/// where X is the cyclic shift and Z = diag(ω^m) with ω = exp(2πi/d).
/// Pairwise Hilbert–Schmidt orthogonal with (D|D) = d.
pub fn wh_displacements(dim: usize) -> Result<Vec<Operator>> {
    if dim < 2 {
        return Err(Error::InvalidArgument("displacements need d ≥ 2".into()));
    }
    let shift = Operator::from_fn(dim, |i, j| {
        if i == (j + 1) % dim {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let omega = 2.0 * std::f64::consts::PI / dim as f64;
    let clock = Operator::from_fn(dim, |i, j| {
        if i == j {
            cis(omega * i as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut xs = vec![Operator::identity(dim)];
    for _ in 1..dim {
        xs.push(&shift * xs.last().unwrap());
    }
    let mut zs = vec![Operator::identity(dim)];
    for _ in 1..dim {
        zs.push(&clock * zs.last().unwrap());
    }
    let mut out = Vec::with_capacity(dim * dim);
    for x in &xs {
        for z in &zs {
            out.push(x * z);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// SIC fiducials
// ---------------------------------------------------------------------------

/// How a fiducial was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Numerical { seed: u64 },
}

/// A candidate SIC fiducial together with its orbit diagnostics.
#[derive(Debug, Clone)]
pub struct FiducialVector {
    dim: usize,
    coords: Array1<Complex64>,
    provenance: Provenance,
    /// max |overlap² − 1/(d+1)| over distinct orbit pairs.
    orbit_spread: f64,
    /// True when the orbit passed the 2-design certificate.
    certified: bool,
}

impl FiducialVector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &Array1<Complex64> {
        &self.coords
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn orbit_spread(&self) -> f64 {
        self.orbit_spread
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    /// The d² orbit states D_{j,k}|ψ⟩, gauge-fixed.
    pub fn orbit(&self) -> Result<Vec<Array1<Complex64>>> {
        let displacements = wh_displacements(self.dim)?;
        Ok(displacements
            .iter()
            .map(|u| fix_phase(&u.apply_vec(&self.coords)))
            .collect())
    }
}

fn orbit_diagnostics(dim: usize, orbit: &[Array1<Complex64>]) -> (f64, bool) {
    let target = 1.0 / (dim + 1) as f64;
    let mut spread = 0.0f64;
    for x in 0..orbit.len() {
        for y in (x + 1)..orbit.len() {
            let o: Complex64 = orbit[x]
                .iter()
                .zip(orbit[y].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            spread = spread.max((o.norm_sqr() - target).abs());
        }
    }
    let design = WeightedDesign::uniform(dim, orbit.to_vec()).expect("unit orbit states");
    let certified = is_t_design(&design, 2, crate::tol::DESIGN_CERT).is_design;
    (spread, certified)
}

fn build_fiducial(
    dim: usize,
    coords: Array1<Complex64>,
    provenance: Provenance,
) -> Result<FiducialVector> {
    let mut f = FiducialVector {
        dim,
        coords: fix_phase(&coords),
        provenance,
        orbit_spread: f64::NAN,
        certified: false,
    };
    let orbit = f.orbit()?;
    let (spread, certified) = orbit_diagnostics(dim, &orbit);
    f.orbit_spread = spread;
    f.certified = certified;
    Ok(f)
}

/// Analytic fiducial for d = 2 (Bloch vector (1,1,1)/√3) or d = 3
/// ((0, 1, −1)/√2), validated by its orbit overlap table at build time.
pub fn sic_fiducial(dim: usize) -> Result<FiducialVector> {
    let coords = match dim {
        2 => {
            let theta = (1.0 / 3f64.sqrt()).acos();
            ndarray::array![
                Complex64::new((theta / 2.0).cos(), 0.0),
                cis(std::f64::consts::FRAC_PI_4) * (theta / 2.0).sin()
            ]
        }
        3 => {
            let h = 1.0 / 2f64.sqrt();
            ndarray::array![
                Complex64::new(0.0, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0)
            ]
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no analytic fiducial for d = {dim}; use sic_fiducial_numerical"
            )));
        }
    };
    let f = build_fiducial(dim, coords, Provenance::Analytic)?;
    if f.orbit_spread > 1e-9 {
        return Err(Error::Numerical(format!(
            "analytic fiducial failed its orbit test: spread {:.3e}",
            f.orbit_spread
        )));
    }
    Ok(f)
}

/// Numerical fiducial search: minimizes the Weyl–Heisenberg orbit potential
/// Σ_{(j,k)≠(0,0)} |⟨ψ|D_{j,k}|ψ⟩|⁴ over unit ψ, which reaches
/// (d−1)/(d+1) exactly on SIC fiducials. The result may fail to certify;
/// check [`FiducialVector::certified`].
pub fn sic_fiducial_numerical(dim: usize, seed: u64, opts: &SearchOpts) -> Result<FiducialVector> {
    if dim < 2 {
        return Err(Error::InvalidArgument("fiducial search needs d ≥ 2".into()));
    }
    let displacements = wh_displacements(dim)?;
    let nontrivial: Vec<&Operator> = displacements.iter().skip(1).collect();
    let adjoints: Vec<Operator> = nontrivial.iter().map(|u| u.adjoint()).collect();
    let target = (dim - 1) as f64 / (dim + 1) as f64;
    let stop = (opts.cert_tol * 1e-4).max(5e-14);

    let objective = |psi: &Array1<Complex64>| -> (f64, Array1<Complex64>) {
        let mut f = 0.0;
        let mut grad = Array1::<Complex64>::zeros(dim);
        for (u, udag) in nontrivial.iter().zip(&adjoints) {
            let upsi = u.apply_vec(psi);
            let s: Complex64 = psi.iter().zip(upsi.iter()).map(|(a, b)| a.conj() * b).sum();
            let m = s.norm_sqr();
            f += m * m;
            let udpsi = udag.apply_vec(psi);
            for i in 0..dim {
                grad[i] += (s.conj() * upsi[i] + s * udpsi[i]) * (2.0 * m);
            }
        }
        // tangent projection
        let radial: Complex64 = psi.iter().zip(grad.iter()).map(|(p, g)| p.conj() * g).sum();
        for i in 0..dim {
            grad[i] -= radial * psi[i];
        }
        (f, grad)
    };

    let mut best: Option<(f64, Array1<Complex64>)> = None;
    for r in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let mut psi = Array1::from_shape_fn(dim, |_| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm = psi.iter().map(|z: &Complex64| z.norm_sqr()).sum::<f64>().sqrt();
        psi.mapv_inplace(|z| z / norm);

        let (mut f, mut grad) = objective(&psi);
        let mut eta = 0.5;
        for _ in 0..opts.max_iters {
            if f - target <= stop {
                break;
            }
            let gnorm_sq: f64 = grad.iter().map(|z| z.norm_sqr()).sum();
            if gnorm_sq < 1e-28 {
                break;
            }
            let mut accepted = false;
            for _ in 0..60 {
                let mut trial: Array1<Complex64> = &psi - &grad.mapv(|z| z * eta);
                let norm = trial.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                trial.mapv_inplace(|z| z / norm);
                let (ft, gt) = objective(&trial);
                if ft <= f - 1e-4 * eta * gnorm_sq {
                    psi = trial;
                    f = ft;
                    grad = gt;
                    eta = (eta * 1.3).min(2.0);
                    accepted = true;
                    break;
                }
                eta *= 0.5;
                if eta < 1e-17 {
                    break;
                }
            }
            if !accepted {
                break;
            }
        }
        if best.as_ref().map(|(bf, _)| f < *bf).unwrap_or(true) {
            best = Some((f, psi));
        }
    }
    let (_, psi) = best.expect("at least one restart");
    build_fiducial(dim, psi, Provenance::Numerical { seed })
}

// ---------------------------------------------------------------------------
// SIC-POVM
// ---------------------------------------------------------------------------

/// d² rank-one elements π(x)/d over the Weyl–Heisenberg orbit of a fiducial,
/// labeled by displacement indices "j,k".
pub fn sic_povm_from_fiducial(fiducial: &FiducialVector) -> Result<DiscretePOVM> {
    let d = fiducial.dim();
    let orbit = fiducial.orbit()?;
    let elements = orbit
        .iter()
        .map(|x| Operator::projector(x).scale_re(1.0 / d as f64))
        .collect();
    let labels = (0..d)
        .flat_map(|j| (0..d).map(move |k| format!("{j},{k}")))
        .collect();
    DiscretePOVM::with_labels(d, elements, labels)
}

/// SIC-POVM for the analytic dimensions d ∈ {2, 3}.
pub fn sic_povm(dim: usize) -> Result<DiscretePOVM> {
    sic_povm_from_fiducial(&sic_fiducial(dim)?)
}

// ---------------------------------------------------------------------------
// Mutually unbiased bases
// ---------------------------------------------------------------------------

/// p + 1 orthonormal bases of ℂ^p with all cross-basis squared overlaps
/// equal to 1/p.
#[derive(Debug, Clone)]
pub struct MubFamily {
    prime: usize,
    bases: Vec<Vec<Array1<Complex64>>>,
}

impl MubFamily {
    pub fn prime(&self) -> usize {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.prime
    }

    pub fn bases(&self) -> &[Vec<Array1<Complex64>>] {
        &self.bases
    }

    /// All p(p+1) vectors, basis-major.
    pub fn vectors(&self) -> Vec<Array1<Complex64>> {
        self.bases.iter().flatten().cloned().collect()
    }
}

/// Complete MUB set for prime p: the computational basis plus, for odd p,
/// the bases with components ω^{m j² + k j}/√p (m the basis, k the vector,
/// j the coordinate); p = 2 uses the three Pauli eigenbases. Verified
/// against the overlap table at build time.
pub fn mub_family(p: usize) -> Result<MubFamily> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument("p must be prime".into()));
    }
    let mut bases: Vec<Vec<Array1<Complex64>>> = Vec::with_capacity(p + 1);
    let computational: Vec<Array1<Complex64>> = (0..p)
        .map(|k| {
            Array1::from_shape_fn(p, |j| {
                if j == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    bases.push(computational);

    if p == 2 {
        let h = 1.0 / 2f64.sqrt();
        bases.push(vec![
            ndarray::array![Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            ndarray::array![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        ]);
        bases.push(vec![
            ndarray::array![Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            ndarray::array![Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        ]);
    } else {
        let omega = 2.0 * std::f64::consts::PI / p as f64;
        let scale = 1.0 / (p as f64).sqrt();
        for m in 0..p {
            let basis = (0..p)
                .map(|k| {
                    Array1::from_shape_fn(p, |j| {
                        cis(omega * ((m * j * j + k * j) % p) as f64) * scale
                    })
                })
                .collect();
            bases.push(basis);
        }
    }

    let family = MubFamily { prime: p, bases };
    validate_mub_overlaps(&family)?;
    Ok(family)
}

fn validate_mub_overlaps(family: &MubFamily) -> Result<()> {
    let p = family.prime;
    let unbiased = 1.0 / p as f64;
    for (l, basis_l) in family.bases.iter().enumerate() {
        for (m, basis_m) in family.bases.iter().enumerate() {
            for (j, u) in basis_l.iter().enumerate() {
                for (k, v) in basis_m.iter().enumerate() {
                    let o: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                    let o2 = o.norm_sqr();
                    let expect = if l == m {
                        if j == k {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        unbiased
                    };
                    if (o2 - expect).abs() > 1e-10 {
                        return Err(Error::Numerical(format!(
                            "MUB overlap failure at ({l},{j})×({m},{k}): {o2} vs {expect}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The d(d+1)-outcome POVM π(e_j^l)/(d+1) over a complete MUB set, labeled
/// "l:j" (basis:vector).
pub fn mub_povm(p: usize) -> Result<DiscretePOVM> {
    let family = mub_family(p)?;
    let scale = 1.0 / (p + 1) as f64;
    let mut elements = Vec::with_capacity(p * (p + 1));
    let mut labels = Vec::with_capacity(p * (p + 1));
    for (l, basis) in family.bases().iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            elements.push(Operator::projector(v).scale_re(scale));
            labels.push(format!("{l}:{j}"));
        }
    }
    DiscretePOVM::with_labels(p, elements, labels)
}

// ---------------------------------------------------------------------------
// Control POVMs
// ---------------------------------------------------------------------------

/// The d orthogonal projectors onto the computational basis. A valid POVM
/// but never informationally complete for d ≥ 2.
pub fn basis_povm(dim: usize) -> Result<DiscretePOVM> {
    if dim < 1 {
        return Err(Error::InvalidArgument("basis POVM needs d ≥ 1".into()));
    }
    let elements = (0..dim)
        .map(|k| {
            Operator::from_fn(dim, |i, j| {
                if i == k && j == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    DiscretePOVM::new(dim, elements)
}

/// Generic rank-one POVM: draws n complex Gaussian vectors v_i, forms
/// G = Σ|v_i⟩⟨v_i|, and returns elements |w_i⟩⟨w_i| with w_i = G^{−1/2}v_i,
/// which sum to the identity by construction. Almost surely informationally
/// complete when n ≥ d²; almost never tight.
pub fn random_rank_one_povm(dim: usize, n: usize, seed: u64) -> Result<DiscretePOVM> {
    if n < dim {
        return Err(Error::InvalidArgument(format!(
            "need at least d = {dim} vectors to resolve the identity, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..8 {
        let vectors: Vec<Array1<Complex64>> = (0..n)
            .map(|_| {
                Array1::from_shape_fn(dim, |_| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
            })
            .collect();
        let mut gram = Operator::zeros(dim);
        for v in &vectors {
            gram = &gram + &Operator::projector(v);
        }
        let (vals, vecs) = gram.eigh()?;
        let max = vals.last().copied().unwrap_or(0.0);
        if vals[0] <= 1e-10 * max {
            continue;
        }
        let mut inv_sqrt = Operator::zeros(dim);
        for (lambda, v) in vals.iter().zip(&vecs) {
            inv_sqrt = &inv_sqrt + &Operator::projector(v).scale_re(1.0 / lambda.sqrt());
        }
        let elements = vectors
            .iter()
            .map(|v| Operator::projector(&inv_sqrt.apply_vec(v)))
            .collect();
        return DiscretePOVM::new(dim, elements);
    }
    Err(Error::Numerical(
        "random POVM generator drew singular Gram matrices 8 times in a row".into(),
    ))
}

// ---------------------------------------------------------------------------

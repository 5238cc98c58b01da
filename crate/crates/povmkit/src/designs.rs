//! Complex projective t-design verification and search.
//!
//! A weighted set of unit vectors in ℂ^d is a t-design when its t-th
//! tensor-power moment operator equals the normalized projector onto the
//! totally symmetric subspace, or equivalently when its order-t frame
//! potential meets the Welch bound 1/binom(d+t−1, t). Both certificates are
//! implemented here and kept independent so they can cross-check each other.
//!
//! The numerical search minimizes the degree-4 frame potential by projected
//! gradient descent on the product of unit spheres, with random restarts and
//! a step-halving line search.

use ndarray::Array1;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linops::{binomial, Operator};
use crate::tol;

// ---------------------------------------------------------------------------
// WeightedDesign
// ---------------------------------------------------------------------------

/// Finite set of unit vectors in ℂ^d with normalized positive weights.
///
/// Stored vectors are gauge-fixed: the first coordinate of nonnegligible
/// modulus is made real-positive, which removes the U(1) phase redundancy
/// from comparisons and logs.
#[derive(Debug, Clone)]
pub struct WeightedDesign {
    dim: usize,
    points: Vec<Array1<Complex64>>,
    weights: Vec<f64>,
}

/// Removes the global phase: first coordinate with |z| > 1e-12 becomes
/// real-positive.
pub(crate) fn fix_phase(v: &Array1<Complex64>) -> Array1<Complex64> {
    for z in v.iter() {
        if z.norm() > 1e-12 {
            let phase = z.conj() / z.norm();
            return v.mapv(|x| x * phase);
        }
    }
    v.clone()
}

impl WeightedDesign {
    /// Validates unit norms (within 1e-12), positive weights summing to one
    /// (within 1e-12), and consistent dimensions.
    pub fn new(
        dim: usize,
        points: Vec<Array1<Complex64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("design dimension must be ≥ 1".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("design needs at least one point".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} points vs {} weights",
                points.len(),
                weights.len()
            )));
        }
        for (k, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "point {k} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("point {k} has non-finite entries")));
            }
            let norm = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > tol::DESIGN_NORM {
                return Err(Error::InvalidArgument(format!(
                    "point {k} has norm {norm}, expected 1 within {}",
                    tol::DESIGN_NORM
                )));
            }
        }
        let wsum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w <= 0.0 || w.is_nan()) {
            return Err(Error::InvalidArgument("weights must be strictly positive".into()));
        }
        if (wsum - 1.0).abs() > tol::DESIGN_NORM {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {wsum}, expected 1 within {}",
                tol::DESIGN_NORM
            )));
        }
        let points = points.iter().map(fix_phase).collect();
        Ok(Self { dim, points, weights })
    }

    /// Uniform weights 1/n.
    pub fn uniform(dim: usize, points: Vec<Array1<Complex64>>) -> Result<Self> {
        let n = points.len();
        Self::new(dim, points, vec![1.0 / n as f64; n])
    }

    /// Normalizes each point to unit norm and the weights to unit sum, then
    /// validates. Used by file readers.
    pub fn normalized(
        dim: usize,
        points: Vec<Array1<Complex64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let points = points
            .into_iter()
            .map(|p| {
                let norm = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm <= 0.0 || !norm.is_finite() {
                    Err(Error::InvalidArgument("cannot normalize a zero design point".into()))
                } else {
                    Ok(p.mapv(|z| z / norm))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let wsum: f64 = weights.iter().sum();
        if wsum <= 0.0 || !wsum.is_finite() {
            return Err(Error::InvalidArgument("weights must have positive finite sum".into()));
        }
        let weights = weights.iter().map(|w| w / wsum).collect();
        Self::new(dim, points, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Array1<Complex64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// |⟨x_i|x_j⟩|².
    pub fn overlap_sq(&self, i: usize, j: usize) -> f64 {
        inner(&self.points[i], &self.points[j]).norm_sqr()
    }
}

fn inner(a: &Array1<Complex64>, b: &Array1<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

/// Verification summary for one (design, t) pair.
#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    pub t: usize,
    pub potential: f64,
    pub bound: f64,
    /// potential − bound; nonnegative up to roundoff.
    pub gap: f64,
    pub is_design: bool,
    /// Looser reporting flag: gap within the near-design threshold.
    pub near_design: bool,
    /// Minimum number of points any weighted t-design must have.
    pub size_bound: u64,
    /// Common squared overlap when the design is equiangular with uniform
    /// weights.
    pub equiangular: Option<f64>,
}

/// Order-t frame potential Σ_{x,y} w(x)w(y)|⟨x|y⟩|^{2t}.
pub fn frame_potential(design: &WeightedDesign, t: usize) -> f64 {
    let n = design.len();
    let mut acc = 0.0;
    for x in 0..n {
        // diagonal term
        acc += design.weights[x] * design.weights[x];
        for y in (x + 1)..n {
            let o = design.overlap_sq(x, y);
            acc += 2.0 * design.weights[x] * design.weights[y] * o.powi(t as i32);
        }
    }
    acc
}

/// Welch bound 1/binom(d+t−1, t): the minimum of the order-t frame potential.
pub fn welch_bound(dim: usize, t: usize) -> f64 {
    1.0 / binomial((dim + t - 1) as u64, t as u64) as f64
}

/// Minimum size binom(d+⌈t/2⌉−1, ⌈t/2⌉)·binom(d+⌊t/2⌋−1, ⌊t/2⌋) of any
/// weighted t-design.
pub fn design_size_bound(dim: usize, t: usize) -> u64 {
    let d = dim as u64;
    let hi = t.div_ceil(2) as u64;
    let lo = (t / 2) as u64;
    binomial(d + hi - 1, hi) * binomial(d + lo - 1, lo)
}

/// Welch-bound certificate: the design is a t-design iff the frame potential
/// meets the bound within `tol`.
pub fn is_t_design(design: &WeightedDesign, t: usize, tol: f64) -> DesignReport {
    let potential = frame_potential(design, t);
    let bound = welch_bound(design.dim, t);
    let gap = potential - bound;
    DesignReport {
        t,
        potential,
        bound,
        gap,
        is_design: gap <= tol,
        near_design: gap <= crate::tol::DESIGN_NEAR.max(tol),
        size_bound: design_size_bound(design.dim, t),
        equiangular: classify_equiangular(design, crate::tol::DESIGN_NEAR),
    }
}

/// Moment operator Σ w(x) π(x)^⊗t on (ℂ^d)^⊗t.
///
/// For a t-design this equals Π_sym / binom(d+t−1, t); comparing against the
/// explicitly built projector is the certificate independent of the Welch
/// route.
pub fn moment_operator(design: &WeightedDesign, t: usize) -> Result<Operator> {
    if t == 0 || t > tol::SYM_MAX_T {
        return Err(Error::InvalidArgument(format!(
            "moment operator needs 1 ≤ t ≤ {}, got {t}",
            tol::SYM_MAX_T
        )));
    }
    let tensor_dim = design
        .dim
        .checked_pow(t as u32)
        .filter(|&n| n <= tol::SYM_TENSOR_DIM_LIMIT)
        .ok_or(Error::SizeLimit {
            dim: design.dim.pow(t as u32),
            limit: tol::SYM_TENSOR_DIM_LIMIT,
        })?;
    let mut m = Operator::zeros(tensor_dim);
    for (p, &w) in design.points.iter().zip(&design.weights) {
        let v = kron_power(p, t);
        m = &m + &Operator::projector(&v).scale_re(w);
    }
    Ok(m)
}

fn kron_power(v: &Array1<Complex64>, t: usize) -> Array1<Complex64> {
    let mut out = v.clone();
    for _ in 1..t {
        let mut next = Array1::zeros(out.len() * v.len());
        for (i, a) in out.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                next[i * v.len() + j] = a * b;
            }
        }
        out = next;
    }
    out
}

/// Returns the common squared overlap when all distinct pairs agree within
/// `tol` and the weights are uniform; `None` otherwise.
pub fn classify_equiangular(design: &WeightedDesign, tol: f64) -> Option<f64> {
    let n = design.len();
    if n < 2 {
        return None;
    }
    let w0 = 1.0 / n as f64;
    if design.weights.iter().any(|&w| (w - w0).abs() > tol) {
        return None;
    }
    let mut sum = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in 0..n {
        for y in (x + 1)..n {
            let o = design.overlap_sq(x, y);
            sum += o;
            lo = lo.min(o);
            hi = hi.max(o);
        }
    }
    if hi - lo <= tol {
        Some(sum / (n * (n - 1) / 2) as f64)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Numerical 2-design search
// ---------------------------------------------------------------------------

/// Knobs for [`search_2design`].
#[derive(Debug, Clone)]
pub struct SearchOpts {
    pub max_iters: usize,
    pub restarts: usize,
    /// Gap at which the result is certified a 2-design.
    pub cert_tol: f64,
    /// Optimize weights on the simplex alongside the points. Minimal designs
    /// force uniform weights, so this is off by default.
    pub optimize_weights: bool,
}

impl Default for SearchOpts {
    fn default() -> Self {
        Self {
            max_iters: 30_000,
            restarts: 12,
            cert_tol: tol::DESIGN_CERT,
            optimize_weights: false,
        }
    }
}

/// One logged point of the optimization.
#[derive(Debug, Clone, Serialize)]
pub struct SearchTraceEntry {
    pub restart: usize,
    pub iter: usize,
    pub potential: f64,
}

/// Search result: best configuration plus its certification report.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub design: WeightedDesign,
    pub report: DesignReport,
    /// True when the gap met `cert_tol`.
    pub certified: bool,
    pub best_restart: usize,
    pub trace: Vec<SearchTraceEntry>,
}

/// Minimizes the order-2 frame potential over n unit vectors in ℂ^d.
///
/// Restarts are independent (restart r seeds its generator with
/// `seed + r`) and may run in parallel; the winner is the lowest potential,
/// ties broken by restart index, so the outcome is deterministic for a given
/// seed regardless of thread count. A run that never reaches `cert_tol`
/// still returns the best configuration, flagged `certified: false`.
pub fn search_2design(
    dim: usize,
    n: usize,
    seed: u64,
    opts: &SearchOpts,
) -> Result<SearchOutcome> {
    if dim < 1 {
        return Err(Error::InvalidArgument("dimension must be ≥ 1".into()));
    }
    if n < dim * dim {
        return Err(Error::InvalidArgument(format!(
            "a 2-design needs at least d² = {} points, got {n}",
            dim * dim
        )));
    }
    let bound = welch_bound(dim, 2);
    // Polish well past the certification gap so downstream overlap checks
    // inherit slack.
    let stop_gap = (opts.cert_tol * 1e-4).max(5e-14);

    let runs: Vec<RestartResult> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| run_restart(dim, n, seed.wrapping_add(r as u64), r, bound, stop_gap, opts))
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            a.potential
                .partial_cmp(&b.potential)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(j))
        })
        .map(|(i, _)| i)
        .expect("at least one restart");

    let mut trace = Vec::new();
    for run in &runs {
        trace.extend(run.trace.iter().cloned());
    }

    let winner = &runs[best];
    let design = WeightedDesign::new(dim, winner.points.clone(), winner.weights.clone())?;
    let report = is_t_design(&design, 2, opts.cert_tol);
    let certified = report.is_design;
    Ok(SearchOutcome { design, report, certified, best_restart: best, trace })
}

struct RestartResult {
    points: Vec<Array1<Complex64>>,
    weights: Vec<f64>,
    potential: f64,
    trace: Vec<SearchTraceEntry>,
}

fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> Array1<Complex64> {
    use rand_distr::StandardNormal;
    let mut v = Array1::from_shape_fn(dim, |_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.iter().map(|z: &Complex64| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / norm);
    v
}

/// Potential and conjugate-coordinate gradient of the degree-4 potential.
fn potential_and_grad(
    points: &[Array1<Complex64>],
    weights: &[f64],
) -> (f64, Vec<Array1<Complex64>>) {
    let n = points.len();
    let dim = points[0].len();
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for x in 0..n {
        for y in 0..n {
            gram[x * n + y] = inner(&points[x], &points[y]);
        }
    }
    let mut f = 0.0;
    for x in 0..n {
        for y in 0..n {
            f += weights[x] * weights[y] * gram[x * n + y].norm_sqr().powi(2);
        }
    }
    let mut grads = Vec::with_capacity(n);
    for p in 0..n {
        let mut g = Array1::<Complex64>::zeros(dim);
        for y in 0..n {
            let gpy = gram[p * n + y];
            let coeff = 4.0 * weights[p] * weights[y] * gpy.norm_sqr();
            let c = gpy.conj() * coeff;
            g.iter_mut().zip(points[y].iter()).for_each(|(gi, yi)| *gi += c * yi);
        }
        // Riemannian gradient: remove the radial (and gauge) component.
        let radial = inner(&points[p], &g);
        g.iter_mut().zip(points[p].iter()).for_each(|(gi, pi)| *gi -= radial * pi);
        grads.push(g);
    }
    (f, grads)
}

fn step_points(
    points: &[Array1<Complex64>],
    grads: &[Array1<Complex64>],
    eta: f64,
) -> Vec<Array1<Complex64>> {
    points
        .iter()
        .zip(grads)
        .map(|(p, g)| {
            let mut q: Array1<Complex64> = p - &g.mapv(|z| z * eta);
            let norm = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            q.mapv_inplace(|z| z / norm);
            q
        })
        .collect()
}

/// Euclidean projection onto the probability simplex (Duchi et al.).
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn run_restart(
    dim: usize,
    n: usize,
    restart_seed: u64,
    restart_index: usize,
    bound: f64,
    stop_gap: f64,
    opts: &SearchOpts,
) -> RestartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed);
    let mut points: Vec<Array1<Complex64>> =
        (0..n).map(|_| random_unit_vector(dim, &mut rng)).collect();
    let mut weights = vec![1.0 / n as f64; n];

    let mut eta = 0.5;
    let mut trace = Vec::new();
    let (mut f, mut grads) = potential_and_grad(&points, &weights);
    trace.push(SearchTraceEntry { restart: restart_index, iter: 0, potential: f });

    for iter in 1..=opts.max_iters {
        if f - bound <= stop_gap {
            break;
        }
        let gnorm_sq: f64 = grads.iter().map(|g| g.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum();
        if gnorm_sq < 1e-28 {
            break;
        }
        // Armijo backtracking on the joint step.
        let mut accepted = false;
        for _ in 0..60 {
            let trial = step_points(&points, &grads, eta);
            let (ft, gt) = potential_and_grad(&trial, &weights);
            if ft <= f - 1e-4 * eta * gnorm_sq {
                points = trial;
                f = ft;
                grads = gt;
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

        if opts.optimize_weights && iter % 25 == 0 {
            weight_step(&points, &mut weights, &mut f, &mut grads);
        }

        if iter % 500 == 0 {
            trace.push(SearchTraceEntry { restart: restart_index, iter, potential: f });
        }
    }
    trace.push(SearchTraceEntry {
        restart: restart_index,
        iter: opts.max_iters,
        potential: f,
    });
    RestartResult { points, weights, potential: f, trace }
}

fn weight_step(
    points: &[Array1<Complex64>],
    weights: &mut Vec<f64>,
    f: &mut f64,
    grads: &mut Vec<Array1<Complex64>>,
) {
    let n = points.len();
    let mut overlaps4 = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            overlaps4[x * n + y] = inner(&points[x], &points[y]).norm_sqr().powi(2);
        }
    }
    let grad_w: Vec<f64> = (0..n)
        .map(|x| 2.0 * (0..n).map(|y| weights[y] * overlaps4[x * n + y]).sum::<f64>())
        .collect();
    let mut eta = 0.1;
    for _ in 0..30 {
        let trial: Vec<f64> = weights.iter().zip(&grad_w).map(|(w, g)| w - eta * g).collect();
        let trial = project_simplex(&trial);
        if trial.iter().any(|&w| w <= 0.0) {
            eta *= 0.5;
            continue;
        }
        let (ft, gt) = potential_and_grad(points, &trial);
        if ft < *f {
            *weights = trial;
            *f = ft;
            *grads = gt;
            return;
        }
        eta *= 0.5;
    }
}

// ---------------------------------------------------------------------------

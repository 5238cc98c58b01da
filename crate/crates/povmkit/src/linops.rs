//! Complex operator and superoperator substrate.
//!
//! A linear operator `A` on ℂ^d is treated as a ket `|A)` in the
//! d²-dimensional Hilbert–Schmidt space with inner product
//! `(A|B) = tr(A†B)`. Superoperators act on operator kets as ordinary
//! d²×d² matrices (the left–right action). Vectorization fixes the
//! column-stacking convention: coordinate `j·d + i` of `|A)` holds `A[i,j]`.
//!
//! The module also provides the totally symmetric projector on `(ℂ^d)^⊗t`
//! and Hermitian spectral routines used by every downstream analysis.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Exact binomial coefficient for the small arguments used here.
pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

// ---------------------------------------------------------------------------
// Operator
// ---------------------------------------------------------------------------

/// A d×d complex matrix, viewed as a vector in Hilbert–Schmidt space when
/// convenient.
#[derive(Debug, Clone)]
pub struct Operator {
    mat: Array2<Complex64>,
}

impl Operator {
    /// Wraps a square matrix with finite entries.
    pub fn new(mat: Array2<Complex64>) -> Result<Self> {
        let (r, c) = mat.dim();
        if r != c || r == 0 {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square and nonempty, got {r}×{c}"
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(Self { mat })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: Array2::zeros((dim, dim)) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: Array2::eye(dim) }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self { mat: Array2::from_shape_fn((dim, dim), |(i, j)| f(i, j)) }
    }

    /// Rank-one operator |u⟩⟨v|.
    pub fn dyad(u: &Array1<Complex64>, v: &Array1<Complex64>) -> Self {
        let d = u.len();
        Self {
            mat: Array2::from_shape_fn((d, d), |(i, j)| u[i] * v[j].conj()),
        }
    }

    /// Projector |v⟩⟨v| (no normalization applied).
    pub fn projector(v: &Array1<Complex64>) -> Self {
        Self::dyad(v, v)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub fn into_mat(self) -> Array2<Complex64> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.t().mapv(|z| z.conj()) }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.diag().sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { mat: self.mat.mapv(|z| z * c) }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance ‖A − B‖.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    /// max |A − A†| over entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        let adj = self.adjoint();
        (&self.mat - &adj.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self { mat: (&self.mat + &adj.mat).mapv(|z| z * 0.5) }
    }

    pub fn apply_vec(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        self.mat.dot(v)
    }

    /// ⟨ψ|A|ψ⟩.
    pub fn expectation(&self, psi: &Array1<Complex64>) -> Complex64 {
        psi.iter()
            .zip(self.mat.dot(psi).iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        self.eigh().map(|(vals, _)| vals)
    }

    /// Full Hermitian eigendecomposition; eigenvectors are orthonormal.
    pub fn eigh(&self) -> Result<(Vec<f64>, Vec<Array1<Complex64>>)> {
        let gate = tol::HERMITICITY_REL * self.frobenius_norm().max(1.0);
        let dev = self.hermiticity_deviation();
        if dev > gate {
            return Err(Error::NotHermitian { deviation: dev, tol: gate });
        }
        let (vals, vecs) = eigh_complex(&self.mat)?;
        let cols = (0..vecs.ncols()).map(|k| vecs.column(k).to_owned()).collect();
        Ok((vals.to_vec(), cols))
    }
}

impl std::ops::Index<(usize, usize)> for Operator {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.mat[idx]
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat + &rhs.mat }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat - &rhs.mat }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator { mat: self.mat.dot(&rhs.mat) }
    }
}

/// Hilbert–Schmidt inner product (A|B) = tr(A†B).
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "hs_inner: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(hsq(a, b))
}

/// Unchecked Hilbert–Schmidt inner product for in-crate use.
pub(crate) fn hsq(a: &Operator, b: &Operator) -> Complex64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.mat
        .iter()
        .zip(b.mat.iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

// ---------------------------------------------------------------------------
// OperatorKet
// ---------------------------------------------------------------------------

/// An operator written out as a d²-coordinate ket under column stacking.
#[derive(Debug, Clone)]
pub struct OperatorKet {
    dim: usize,
    coords: Array1<Complex64>,
}

impl OperatorKet {
    pub fn new(dim: usize, coords: Array1<Complex64>) -> Result<Self> {
        if coords.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "operator ket needs {} coordinates, got {}",
                dim * dim,
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &Array1<Complex64> {
        &self.coords
    }

    /// (self|other) with the conjugate on `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Column-stacking vectorization: coordinate j·d + i holds `A[i,j]`.
pub fn vectorize(a: &Operator) -> OperatorKet {
    let d = a.dim();
    let mut coords = Array1::zeros(d * d);
    for j in 0..d {
        for i in 0..d {
            coords[j * d + i] = a.mat[(i, j)];
        }
    }
    OperatorKet { dim: d, coords }
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &OperatorKet) -> Operator {
    let d = v.dim;
    Operator::from_fn(d, |i, j| v.coords[j * d + i])
}

// ---------------------------------------------------------------------------
// SuperOp
// ---------------------------------------------------------------------------

/// A d²×d² complex matrix acting on operator kets (left–right action).
#[derive(Debug, Clone)]
pub struct SuperOp {
    dim: usize,
    mat: Array2<Complex64>,
}

impl SuperOp {
    pub fn new(dim: usize, mat: Array2<Complex64>) -> Result<Self> {
        let d2 = dim * dim;
        if mat.dim() != (d2, d2) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator for dim {dim} must be {d2}×{d2}, got {}×{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { dim, mat })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, mat: Array2::zeros((dim * dim, dim * dim)) }
    }

    /// The left–right identity 𝐈.
    pub fn identity(dim: usize) -> Self {
        Self { dim, mat: Array2::eye(dim * dim) }
    }

    /// Rank-one superoperator |u)(v|.
    pub fn outer(u: &OperatorKet, v: &OperatorKet) -> Result<Self> {
        if u.dim != v.dim {
            return Err(Error::DimensionMismatch(format!(
                "superop outer: {} vs {}",
                u.dim, v.dim
            )));
        }
        let d2 = u.dim * u.dim;
        let mat = Array2::from_shape_fn((d2, d2), |(i, j)| u.coords[i] * v.coords[j].conj());
        Ok(Self { dim: u.dim, mat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mat(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub fn apply(&self, v: &OperatorKet) -> Result<OperatorKet> {
        if v.dim != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "superop dim {} applied to ket dim {}",
                self.dim, v.dim
            )));
        }
        Ok(OperatorKet { dim: self.dim, coords: self.mat.dot(&v.coords) })
    }

    /// Apply to an operator: devectorize(S · vectorize(A)).
    pub fn apply_op(&self, a: &Operator) -> Result<Operator> {
        let ket = self.apply(&vectorize(a))?;
        Ok(devectorize(&ket))
    }

    /// Matrix composition self ∘ rhs.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(format!(
                "superop compose: {} vs {}",
                self.dim, rhs.dim
            )));
        }
        Ok(Self { dim: self.dim, mat: self.mat.dot(&rhs.mat) })
    }

    /// Superoperator trace Tr(S).
    pub fn supertrace(&self) -> Complex64 {
        self.mat.diag().sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { dim: self.dim, mat: self.mat.mapv(|z| z * c) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let adj = self.mat.t().mapv(|z| z.conj());
        (&self.mat - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }
}

impl std::ops::Add for &SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: &SuperOp) -> SuperOp {
        assert_eq!(self.dim, rhs.dim, "superop dims must match");
        SuperOp { dim: self.dim, mat: &self.mat + &rhs.mat }
    }
}

impl std::ops::Sub for &SuperOp {
    type Output = SuperOp;
    fn sub(self, rhs: &SuperOp) -> SuperOp {
        assert_eq!(self.dim, rhs.dim, "superop dims must match");
        SuperOp { dim: self.dim, mat: &self.mat - &rhs.mat }
    }
}

/// Builds Σ s_jk |E_j)(E_k| from dyad terms (coefficient, E_j, E_k).
///
/// The result acts as S|A) = Σ s_jk E_j · tr(E_k† A).
pub fn superop_from_dyads(
    dim: usize,
    terms: &[(Complex64, Operator, Operator)],
) -> Result<SuperOp> {
    let mut s = SuperOp::zeros(dim);
    for (coeff, ej, ek) in terms {
        if ej.dim() != dim || ek.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "dyad term has dims {}×{}, superop dim {dim}",
                ej.dim(),
                ek.dim()
            )));
        }
        let u = vectorize(ej);
        let v = vectorize(ek);
        let outer = SuperOp::outer(&u, &v)?;
        s.mat = &s.mat + &outer.mat.mapv(|z| z * coeff);
    }
    Ok(s)
}

/// The dyad 𝓘 = |I)(I|, acting as A ↦ tr(A)·I.
pub fn identity_dyad(dim: usize) -> SuperOp {
    let id = vectorize(&Operator::identity(dim));
    SuperOp::outer(&id, &id).expect("same dim")
}

/// 𝚷₀ = 𝐈 − 𝓘/d: the left–right projector onto traceless operators.
pub fn traceless_projector(dim: usize) -> SuperOp {
    &SuperOp::identity(dim) - &identity_dyad(dim).scale(1.0 / dim as f64)
}

/// The triple (𝐈, 𝓘, 𝚷₀).
pub fn identity_superops(dim: usize) -> (SuperOp, SuperOp, SuperOp) {
    (
        SuperOp::identity(dim),
        identity_dyad(dim),
        traceless_projector(dim),
    )
}

// ---------------------------------------------------------------------------
// Symmetric subspace projector
// ---------------------------------------------------------------------------

/// Projector onto the totally symmetric subspace of (ℂ^d)^⊗t.
#[derive(Debug, Clone)]
pub struct SymProjector {
    dim: usize,
    t: usize,
    mat: Array2<Complex64>,
}

impl SymProjector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Dimension d^t of the tensor space the projector acts on.
    pub fn tensor_dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Rank of the projector, binom(d+t−1, t).
    pub fn sym_dim(&self) -> u64 {
        binomial((self.dim + self.t - 1) as u64, self.t as u64)
    }

    pub fn mat(&self) -> &Array2<Complex64> {
        &self.mat
    }

    /// View as an operator on the d^t-dimensional tensor space.
    pub fn as_operator(&self) -> Operator {
        Operator { mat: self.mat.clone() }
    }
}

/// Builds the symmetric projector as the average of all t! permutation
/// operators on (ℂ^d)^⊗t. Explicit and O(t!·d^2t): fine for t ≤ 4 at the
/// dimensions this crate targets.
pub fn sym_projector(dim: usize, t: usize) -> Result<SymProjector> {
    sym_projector_with_limit(dim, t, tol::SYM_TENSOR_DIM_LIMIT)
}

/// [`sym_projector`] with an explicit tensor-dimension cap.
pub fn sym_projector_with_limit(dim: usize, t: usize, limit: usize) -> Result<SymProjector> {
    if dim == 0 || t == 0 || t > tol::SYM_MAX_T {
        return Err(Error::InvalidArgument(format!(
            "symmetric projector needs d ≥ 1 and 1 ≤ t ≤ {}, got d={dim}, t={t}",
            tol::SYM_MAX_T
        )));
    }
    let tensor_dim = dim.checked_pow(t as u32).filter(|&n| n <= limit);
    let tensor_dim = match tensor_dim {
        Some(n) => n,
        None => {
            return Err(Error::SizeLimit { dim: dim.pow(t as u32), limit });
        }
    };

    use itertools::Itertools;
    let mut mat = Array2::<Complex64>::zeros((tensor_dim, tensor_dim));
    let mut count = 0usize;
    for perm in (0..t).permutations(t) {
        // Column = source multi-index (big-endian base-d digits), row = image
        // with tensor factors reordered by the permutation.
        for col in 0..tensor_dim {
            let digits = to_digits(col, dim, t);
            let mut image = vec![0usize; t];
            for (k, &p) in perm.iter().enumerate() {
                image[k] = digits[p];
            }
            let row = from_digits(&image, dim);
            mat[(row, col)] += Complex64::new(1.0, 0.0);
        }
        count += 1;
    }
    mat.mapv_inplace(|z| z / count as f64);
    Ok(SymProjector { dim, t, mat })
}

fn to_digits(mut index: usize, base: usize, len: usize) -> Vec<usize> {
    let mut digits = vec![0usize; len];
    for k in (0..len).rev() {
        digits[k] = index % base;
        index /= base;
    }
    digits
}

fn from_digits(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * base + d)
}

// ---------------------------------------------------------------------------
// Spectral routines
// ---------------------------------------------------------------------------

/// Hermitian spectral decomposition of a superoperator.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Real spectrum in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenkets matching `eigenvalues`.
    pub eigenkets: Vec<OperatorKet>,
}

impl HermEig {
    /// Σ λ_k |v_k)(v_k|.
    pub fn reconstruct(&self, dim: usize) -> SuperOp {
        let mut s = SuperOp::zeros(dim);
        for (lambda, ket) in self.eigenvalues.iter().zip(&self.eigenkets) {
            let outer = SuperOp::outer(ket, ket).expect("same dim");
            s.mat = &s.mat + &outer.mat.mapv(|z| z * *lambda);
        }
        s
    }
}

/// Full spectrum of a Hermitian superoperator, ascending.
///
/// Rejects input whose asymmetry exceeds `1e-9 · max(1, ‖S‖)`.
pub fn herm_eig(s: &SuperOp) -> Result<HermEig> {
    let gate = tol::HERMITICITY_REL * s.frobenius_norm().max(1.0);
    let dev = s.hermiticity_deviation();
    if dev > gate {
        return Err(Error::NotHermitian { deviation: dev, tol: gate });
    }
    let (vals, vecs) = eigh_complex(&s.mat)?;
    let eigenkets = (0..vecs.ncols())
        .map(|k| OperatorKet { dim: s.dim, coords: vecs.column(k).to_owned() })
        .collect();
    Ok(HermEig { eigenvalues: vals.to_vec(), eigenkets })
}

/// Left–right inverse of a Hermitian superoperator.
///
/// `threshold` is relative to the largest eigenvalue magnitude; any
/// eigenvalue at or below it makes the superoperator singular.
pub fn superop_inverse(s: &SuperOp, threshold: f64) -> Result<SuperOp> {
    let eig = herm_eig(s)?;
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let cut = threshold * max_abs.max(f64::MIN_POSITIVE);
    for &lambda in &eig.eigenvalues {
        if lambda <= cut {
            return Err(Error::Singular { eigenvalue: lambda, threshold: cut });
        }
    }
    let mut inv = SuperOp::zeros(s.dim);
    for (lambda, ket) in eig.eigenvalues.iter().zip(&eig.eigenkets) {
        let outer = SuperOp::outer(ket, ket).expect("same dim");
        inv.mat = &inv.mat + &outer.mat.mapv(|z| z / lambda);
    }
    Ok(inv)
}

pub(crate) fn eigh_complex(
    mat: &Array2<Complex64>,
) -> Result<(Array1<f64>, Array2<Complex64>)> {
    // ndarray-linalg 0.18 hands row-major data to LAPACK as if column-major,
    // so for Hermitian input it diagonalizes conj(A); the eigenvalues are
    // unaffected and the eigenvectors come back conjugated.
    let std_layout = mat.as_standard_layout().to_owned();
    let (vals, vecs) = std_layout
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok((vals, vecs.mapv(|z| z.conj())))
}

// ---------------------------------------------------------------------------

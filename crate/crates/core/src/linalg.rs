//! Dense complex linear algebra for small dimensions, plus the unbiasedness
//! and Hadamard predicates the rest of the crate builds on.

use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::scalar::{unit_phase, Complex, Real};

/// Default tolerance for structural checks (Hadamard, orthonormality, unbiasedness).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Default tolerance for algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;

/// A unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    comps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps components as-is. Fails on non-finite input or a zero vector.
    pub fn new(comps: Vec<Complex<T>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if comps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { comps })
    }

    /// Normalizes the components to unit Euclidean norm.
    pub fn normalized(comps: Vec<Complex<T>>) -> Result<Self> {
        let mut v = Self::new(comps)?;
        let n = v.norm();
        if n == T::zero() {
            return Err(Error::NonFinite);
        }
        for c in &mut v.comps {
            *c = *c / n;
        }
        Ok(v)
    }

    /// Canonical basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut comps = vec![Complex::new(T::zero(), T::zero()); dim];
        comps[k] = Complex::new(T::one(), T::zero());
        Self { comps }
    }

    pub(crate) fn from_raw(comps: Vec<Complex<T>>) -> Self {
        Self { comps }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Complex<T>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Complex<T>> {
        self.comps
    }

    pub fn norm(&self) -> T {
        self.comps.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    /// Componentwise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            comps: self.comps.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Multiplies every component by `phase`.
    pub fn scaled(&self, phase: Complex<T>) -> Self {
        Self {
            comps: self.comps.iter().map(|c| *c * phase).collect(),
        }
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        inner(self, other)
    }
}

impl<T> Index<usize> for StateVector<T> {
    type Output = Complex<T>;
    fn index(&self, i: usize) -> &Complex<T> {
        &self.comps[i]
    }
}

/// `⟨u|v⟩` with `u` conjugated.
pub fn inner<T: Real>(u: &StateVector<T>, v: &StateVector<T>) -> Result<Complex<T>> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok(dot_conj(&u.comps, &v.comps))
}

#[inline]
pub(crate) fn dot_conj<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter()
        .zip(v)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows; every row must have as many entries as there are rows.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[StateVector<T>]) -> Result<Self> {
        let dim = cols.len();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(bad) = cols.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self::from_fn(dim, |r, c| cols[c][r]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> Vec<Complex<T>> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    /// Entrywise (Hadamard) product `A ∘ B`.
    pub fn hadamard_product(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    /// Row `r` of the result is row `perm[r]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.dim, |r, c| self[(perm[r], c)])
    }

    /// Column `c` of the result is column `perm[c]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.dim, |r, c| self[(r, perm[c])])
    }

    /// `diag(d) · self`.
    pub fn scale_rows(&self, d: &[Complex<T>]) -> Self {
        Self::from_fn(self.dim, |r, c| d[r] * self[(r, c)])
    }

    /// `self · diag(d)`.
    pub fn scale_cols(&self, d: &[Complex<T>]) -> Self {
        Self::from_fn(self.dim, |r, c| self[(r, c)] * d[c])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                for c in 0..n {
                    out.data[r * n + c] = out.data[r * n + c] + a * other.data[k * n + c];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &StateVector<T>) -> Result<StateVector<T>> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        let comps = (0..self.dim)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v.components())
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect();
        Ok(StateVector::from_raw(comps))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.dim + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.dim + c]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs).expect("matrix dimensions agree")
    }
}

/// Permutation matrix exchanging the 1-based indices `i` and `j`.
pub fn transposition<T: Real>(dim: usize, i: usize, j: usize) -> Matrix<T> {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.swap(i - 1, j - 1);
    Matrix::identity(dim).permute_rows(&perm)
}

/// Kronecker product `A ⊗ B`.
pub fn tensor<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (da, db) = (a.dim(), b.dim());
    Matrix::from_fn(da * db, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
}

/// True iff every entry is unimodular and `M†M = d·I`, both within `tol`.
pub fn is_hadamard<T: Real>(m: &Matrix<T>, tol: T) -> bool {
    let d = m.dim();
    if m.entries().iter().any(|z| (z.norm() - T::one()).abs() > tol) {
        return false;
    }
    let dd = T::from_count(d);
    for i in 0..d {
        for j in i..d {
            let g = (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, r| {
                acc + m[(r, i)].conj() * m[(r, j)]
            });
            let expected = if i == j { dd } else { T::zero() };
            if (g - Complex::new(expected, T::zero())).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Moves every entry's phase so row 0 and column 0 become positive reals
/// (all ones for a Hadamard matrix), using only diagonal unitaries.
pub fn dephase<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    dephase_at(m, 0, 0)
}

/// Like [`dephase`] but normalizes row `pivot_row` and column `pivot_col`.
pub fn dephase_at<T: Real>(m: &Matrix<T>, pivot_row: usize, pivot_col: usize) -> Result<Matrix<T>> {
    let d = m.dim();
    let tiny = T::epsilon();
    let phase = |r: usize, c: usize| unit_phase(m[(r, c)], tiny).ok_or(Error::ZeroEntry { row: r, col: c });
    let corner = phase(pivot_row, pivot_col)?;
    let mut left = Vec::with_capacity(d);
    for r in 0..d {
        left.push(phase(r, pivot_col)?.conj());
    }
    let mut right = Vec::with_capacity(d);
    for c in 0..d {
        right.push((phase(pivot_row, c)? * corner.conj()).conj());
    }
    Ok(m.scale_rows(&left).scale_cols(&right))
}

/// An orthonormal basis stored as the columns of a matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis<T> {
    columns: Matrix<T>,
    standard: bool,
}

impl<T: Real> OrthonormalBasis<T> {
    /// Validates orthonormality of the columns within `tol`.
    pub fn new(columns: Matrix<T>, tol: T) -> Result<Self> {
        let dev = orthonormality_deviation(&columns);
        if dev > tol {
            return Err(Error::NotOrthonormal(dev.as_f64()));
        }
        let standard = columns.max_abs_diff(&Matrix::identity(columns.dim()))? == T::zero();
        Ok(Self { columns, standard })
    }

    pub fn from_vectors(vectors: &[StateVector<T>], tol: T) -> Result<Self> {
        Self::new(Matrix::from_columns(vectors)?, tol)
    }

    /// The computational basis.
    pub fn standard(dim: usize) -> Self {
        Self {
            columns: Matrix::identity(dim),
            standard: true,
        }
    }

    /// Columns of `H/√d` for a complex Hadamard matrix `H`.
    pub fn from_hadamard(h: &Matrix<T>) -> Result<Self> {
        let s = T::one() / T::from_count(h.dim()).sqrt();
        Self::new(h.scale(s), T::lit(STRUCTURAL_TOL))
    }

    pub fn dim(&self) -> usize {
        self.columns.dim()
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.columns
    }

    pub fn vector(&self, k: usize) -> StateVector<T> {
        StateVector::from_raw(self.columns.column(k))
    }

    pub fn vectors(&self) -> Vec<StateVector<T>> {
        (0..self.dim()).map(|k| self.vector(k)).collect()
    }

    /// Expansion coefficients `⟨φ_k|ψ⟩` written into `out`.
    #[inline]
    pub fn coefficients_into(&self, psi: &[Complex<T>], out: &mut [Complex<T>]) {
        if self.standard {
            out.copy_from_slice(psi);
            return;
        }
        let d = self.dim();
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (r, &x) in psi.iter().enumerate().take(d) {
                acc = acc + self.columns[(r, k)].conj() * x;
            }
            *o = acc;
        }
    }

    /// `Σ_k coeffs[k]·|φ_k⟩` written into `out`.
    #[inline]
    pub fn synthesize_into(&self, coeffs: &[Complex<T>], out: &mut [Complex<T>]) {
        if self.standard {
            out.copy_from_slice(coeffs);
            return;
        }
        for (r, o) in out.iter_mut().enumerate() {
            *o = self
                .columns
                .row(r)
                .iter()
                .zip(coeffs)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b);
        }
    }

    pub fn coefficients(&self, psi: &StateVector<T>) -> Result<Vec<Complex<T>>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        self.coefficients_into(psi.components(), &mut out);
        Ok(out)
    }
}

/// Largest `|⟨v_i|v_j⟩ − δ_ij|` over the columns.
pub fn orthonormality_deviation<T: Real>(m: &Matrix<T>) -> T {
    let d = m.dim();
    let mut worst = T::zero();
    for i in 0..d {
        for j in i..d {
            let g = (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, r| {
                acc + m[(r, i)].conj() * m[(r, j)]
            });
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((g - Complex::new(target, T::zero())).norm());
        }
    }
    worst
}

/// `max_{k,l} | |⟨φ_k|ϕ_l⟩|² − 1/d |`; zero for an exactly unbiased pair.
pub fn mu_deviation<T: Real>(a: &OrthonormalBasis<T>, b: &OrthonormalBasis<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let d = a.dim();
    let inv = T::one() / T::from_count(d);
    let mut worst = T::zero();
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); d];
    for l in 0..d {
        let col = b.matrix().column(l);
        a.coefficients_into(&col, &mut coeffs);
        for c in &coeffs {
            worst = worst.max((c.norm_sqr() - inv).abs());
        }
    }
    Ok(worst)
}

/// A probability vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityDistribution<T> {
    weights: Vec<T>,
}

impl<T: Real> ProbabilityDistribution<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(Error::InvalidDistribution("negative or non-finite weight".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(IDENTITY_TOL) {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            weights: vec![T::one() / T::from_count(dim); dim],
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

//! Equivalence of complex Hadamard matrices under `H1 = P1·D1·H2·D2·P2`.
//!
//! Brute force over row permutations of the second matrix and the choice of
//! its pivot column, followed by dephasing and a greedy column match. At
//! `d = 6` that is 720·6 candidate alignments.

use crate::error::{Error, Result};
use crate::linalg::{dephase, dephase_at, Matrix};
use crate::scalar::{unit_phase, Complex, Real};

/// A certificate that `h1 = diag(left)·h2[row_perm, col_perm]·diag(right)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceWitness<T> {
    /// Row `i` of the aligned matrix is row `row_perm[i]` of `h2`.
    pub row_perm: Vec<usize>,
    /// Column `j` of the aligned matrix is column `col_perm[j]` of `h2`.
    pub col_perm: Vec<usize>,
    pub left: Vec<Complex<T>>,
    pub right: Vec<Complex<T>>,
    /// Max entrywise deviation of the reconstruction from `h1`.
    pub residual: T,
}

impl<T: Real> EquivalenceWitness<T> {
    /// Applies the monomial transformation to `m`.
    pub fn apply(&self, m: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(m.dim(), |i, j| {
            self.left[i] * m[(self.row_perm[i], self.col_perm[j])] * self.right[j]
        })
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn match_columns<T: Real>(a: &Matrix<T>, b: &Matrix<T>, tol: T) -> Option<Vec<usize>> {
    let d = a.dim();
    let mut used = vec![false; d];
    let mut perm = Vec::with_capacity(d);
    for j in 0..d {
        let found = (0..d).find(|&k| !used[k] && (0..d).all(|r| (a[(r, j)] - b[(r, k)]).norm() <= tol))?;
        used[found] = true;
        perm.push(found);
    }
    Some(perm)
}

fn witness_for<T: Real>(
    h1: &Matrix<T>,
    h2: &Matrix<T>,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
) -> Result<EquivalenceWitness<T>> {
    let d = h1.dim();
    let aligned = Matrix::from_fn(d, |i, j| h2[(row_perm[i], col_perm[j])]);
    let tiny = T::epsilon();
    let ratio = |i: usize, j: usize| {
        unit_phase(h1[(i, j)] * aligned[(i, j)].conj(), tiny).ok_or(Error::ZeroEntry { row: i, col: j })
    };
    let mut left = Vec::with_capacity(d);
    for i in 0..d {
        left.push(ratio(i, 0)?);
    }
    let mut right = Vec::with_capacity(d);
    for j in 0..d {
        right.push(ratio(0, j)? * left[0].conj());
    }
    let mut w = EquivalenceWitness {
        row_perm,
        col_perm,
        left,
        right,
        residual: T::zero(),
    };
    w.residual = w.apply(h2).max_abs_diff(h1)?;
    Ok(w)
}

fn search<T: Real>(h1: &Matrix<T>, h2: &Matrix<T>, tol: T, first_only: bool) -> Result<Vec<EquivalenceWitness<T>>> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch {
            expected: h1.dim(),
            found: h2.dim(),
        });
    }
    let d = h1.dim();
    let target = dephase(h1)?;
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..d).collect();
    loop {
        let rows = h2.permute_rows(&perm);
        for pivot in 0..d {
            let candidate = dephase_at(&rows, 0, pivot)?;
            if let Some(cols) = match_columns(&target, &candidate, tol) {
                let w = witness_for(h1, h2, perm.clone(), cols)?;
                if w.residual <= tol * T::lit(4.0) {
                    out.push(w);
                    if first_only {
                        return Ok(out);
                    }
                }
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

/// Finds one monomial transformation taking `h2` to `h1`, if any.
pub fn find_equivalence<T: Real>(h1: &Matrix<T>, h2: &Matrix<T>, tol: T) -> Result<Option<EquivalenceWitness<T>>> {
    Ok(search(h1, h2, tol, true)?.into_iter().next())
}

/// Every monomial transformation taking `h2` to `h1`. With `h1 = h2` this is
/// the automorphism group of the matrix, modulo global phase.
pub fn all_equivalences<T: Real>(h1: &Matrix<T>, h2: &Matrix<T>, tol: T) -> Result<Vec<EquivalenceWitness<T>>> {
    search(h1, h2, tol, false)
}

/// True iff `h1` and `h2` are equivalent within `tol`.
pub fn equivalence_test<T: Real>(h1: &Matrix<T>, h2: &Matrix<T>, tol: T) -> Result<bool> {
    Ok(find_equivalence(h1, h2, tol)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{fourier, tao};
    use crate::scalar::cis;

    fn scramble(h: &Matrix<f64>) -> Matrix<f64> {
        let d1: Vec<_> = (0..6).map(|k| cis(0.37 * k as f64 + 0.1)).collect();
        let d2: Vec<_> = (0..6).map(|k| cis(-1.3 * (k * k) as f64)).collect();
        h.scale_rows(&d1)
            .scale_cols(&d2)
            .permute_rows(&[3, 0, 5, 1, 4, 2])
            .permute_cols(&[2, 4, 0, 5, 1, 3])
    }

    #[test]
    fn scrambled_matrix_is_equivalent_with_witness() {
        let f = fourier::<f64>(6).unwrap();
        let s = scramble(&f);
        let w = find_equivalence(&s, &f, 1e-9).unwrap().expect("equivalent");
        assert!(w.residual < 1e-12);
        assert!(w.apply(&f).max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn fourier_and_tao_are_inequivalent() {
        let f = fourier::<f64>(6).unwrap();
        assert!(!equivalence_test(&f, &tao(), 1e-8).unwrap());
        assert!(!equivalence_test(&tao(), &f, 1e-8).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = fourier::<f64>(4).unwrap();
        let b = fourier::<f64>(6).unwrap();
        assert!(matches!(
            equivalence_test(&a, &b, 1e-8),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn permutation_enumeration_is_complete() {
        let mut p = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut p) {
            n += 1;
        }
        assert_eq!(n, 24);
    }

    #[test]
    fn fourier_has_nontrivial_automorphisms() {
        let f = fourier::<f64>(6).unwrap();
        let autos = all_equivalences(&f, &f, 1e-9).unwrap();
        assert!(autos.len() > 1);
        for a in &autos {
            assert!(a.apply(&f).max_abs_diff(&f).unwrap() < 1e-9);
        }
    }
}

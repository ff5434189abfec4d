//! Weyl–Heisenberg displacement operators and the orbits they generate.

use crate::catalog::fourier;
use crate::error::{Error, Result};
use crate::linalg::{dot_conj, Matrix, OrthonormalBasis, StateVector};
use crate::scalar::{cis, Complex, Real};

use super::{CanonicalVector, MUVectorSet, Triplet, DEDUP_TOL};

/// A point `(p1, p2)` of `Z_d × Z_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DisplacementIndex {
    pub p1: usize,
    pub p2: usize,
    pub dim: usize,
}

impl DisplacementIndex {
    pub fn new(p1: usize, p2: usize, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            p1: p1 % dim,
            p2: p2 % dim,
            dim,
        })
    }

    pub fn is_identity(self) -> bool {
        self.p1 == 0 && self.p2 == 0
    }

    /// All `d²` indices in row-major order.
    pub fn all(dim: usize) -> impl Iterator<Item = DisplacementIndex> {
        (0..dim * dim).map(move |k| DisplacementIndex {
            p1: k / dim,
            p2: k % dim,
            dim,
        })
    }
}

/// `τ = −e^{iπ/d}`.
pub fn standard_tau<T: Real>(dim: usize) -> Complex<T> {
    -cis(T::PI() / T::from_count(dim))
}

/// `(D_p v)_j = τ^{p1 p2} ω^{(j − p1) p2} v_{j − p1}`.
fn apply<T: Real>(idx: DisplacementIndex, tau: Complex<T>, v: &[Complex<T>]) -> Vec<Complex<T>> {
    let d = idx.dim;
    let step = T::TAU() / T::from_count(d);
    let global = tau.powu((idx.p1 * idx.p2) as u32);
    (0..d)
        .map(|j| {
            let src = (j + d - idx.p1) % d;
            global * cis(step * T::from_count((src * idx.p2) % d)) * v[src]
        })
        .collect()
}

/// `D_p = τ^{p1 p2} X^{p1} Z^{p2}` with `X|k⟩ = |k+1⟩` and `Z|k⟩ = ω^k|k⟩`.
pub fn displacement<T: Real>(idx: DisplacementIndex, tau: Complex<T>) -> Matrix<T> {
    let d = idx.dim;
    let cols: Vec<Vec<Complex<T>>> = (0..d)
        .map(|k| apply(idx, tau, StateVector::<T>::basis(d, k).components()))
        .collect();
    Matrix::from_fn(d, |r, c| cols[c][r])
}

/// The first nontrivial `p` (row-major order) for which `v` is an
/// eigenvector of `D_p`, if any.
pub fn displacement_eigen_index<T: Real>(v: &StateVector<T>, tol: T) -> Option<DisplacementIndex> {
    let tau = standard_tau(v.dim());
    DisplacementIndex::all(v.dim())
        .filter(|p| !p.is_identity())
        .find(|&p| dot_conj(v.components(), &apply(p, tau, v.components())).norm() > T::one() - tol)
}

/// Distinct rays `{D_p v}` over all `p`, in order of first appearance.
pub fn orbit<T: Real>(v: &StateVector<T>, tol: T) -> Vec<CanonicalVector<T>> {
    let tau = standard_tau(v.dim());
    let mut out: Vec<CanonicalVector<T>> = Vec::new();
    for p in DisplacementIndex::all(v.dim()) {
        let image = CanonicalVector::new(&StateVector::from_raw(apply(p, tau, v.components())));
        if !out.iter().any(|u| u.overlap(&image) > T::one() - tol) {
            out.push(image);
        }
    }
    out
}

/// Members of a vector set grouped into displacement orbits.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPartition {
    /// Indices into the set, one group per orbit, ordered by smallest member.
    pub orbits: Vec<Vec<usize>>,
    /// False when some orbit leaves the set; the grouping is then partial.
    pub closed: bool,
}

impl OrbitPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

/// Partitions `set` into orbits of the displacement group.
pub fn classify_orbits<T: Real>(set: &MUVectorSet<T>) -> OrbitPartition {
    let tol = T::lit(DEDUP_TOL);
    let mut assigned = vec![false; set.len()];
    let mut orbits = Vec::new();
    let mut closed = true;
    for i in 0..set.len() {
        if assigned[i] {
            continue;
        }
        let mut group = Vec::new();
        for member in orbit(set.vectors()[i].vector(), tol) {
            match set.position(&member) {
                Some(j) if !assigned[j] => {
                    assigned[j] = true;
                    group.push(j);
                }
                Some(_) => {}
                None => closed = false,
            }
        }
        group.sort_unstable();
        orbits.push(group);
    }
    OrbitPartition { orbits, closed }
}

/// Eigenbases of `Z`, `X` and `XZ`: the standard basis, the Fourier basis and
/// a quadratic chirp. They are pairwise unbiased in every dimension.
pub fn weyl_triplet<T: Real>(dim: usize) -> Result<Triplet<T>> {
    let z = OrthonormalBasis::standard(dim);
    let x = OrthonormalBasis::from_hadamard(&fourier(dim)?)?;
    // (XZ)v = λv gives v_j = ω^{j(j-1)/2} λ^{-j} with λ = e^{iπ(d-1)/d} ω^m.
    let d = T::from_count(dim);
    let step = T::TAU() / d;
    let shift = T::PI() * T::from_count(dim - 1) / d;
    let norm = T::one() / d.sqrt();
    let xz = Matrix::from_fn(dim, |j, m| {
        let quad = T::from_count((j * j.saturating_sub(1) / 2) % dim);
        let lin = T::from_count((j * m) % dim);
        cis(step * (quad - lin) - shift * T::from_count(j)) * norm
    });
    let xz = OrthonormalBasis::new(xz, T::lit(1e-10))?;
    Triplet::new(z, x, xz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IDENTITY_TOL;

    fn v1() -> StateVector<f64> {
        let w = |k: f64| cis(std::f64::consts::TAU * k / 6.0);
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        StateVector::normalized(vec![one, i, w(4.0), i, one, i * w(4.0)]).unwrap()
    }

    #[test]
    fn identity_and_shift() {
        let tau = standard_tau::<f64>(6);
        let id = displacement(DisplacementIndex::new(0, 0, 6).unwrap(), tau);
        assert!(id.max_abs_diff(&Matrix::identity(6)).unwrap() < 1e-15);
        let x = displacement(DisplacementIndex::new(1, 0, 6).unwrap(), tau);
        for k in 0..6 {
            assert!((x[((k + 1) % 6, k)] - Complex::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn composition_holds_up_to_phase() {
        let d = 5;
        let tau = standard_tau::<f64>(d);
        for (p, q) in [((1, 2), (3, 4)), ((2, 0), (0, 3)), ((4, 4), (1, 1))] {
            let dp = displacement(DisplacementIndex::new(p.0, p.1, d).unwrap(), tau);
            let dq = displacement(DisplacementIndex::new(q.0, q.1, d).unwrap(), tau);
            let dpq = displacement(DisplacementIndex::new(p.0 + q.0, p.1 + q.1, d).unwrap(), tau);
            let prod = &dp * &dq;
            let phase = (0..d)
                .flat_map(|r| (0..d).map(move |c| (r, c)))
                .find(|&(r, c)| dpq[(r, c)].norm() > 0.5)
                .map(|(r, c)| prod[(r, c)] / dpq[(r, c)])
                .unwrap();
            assert!((phase.norm() - 1.0).abs() < 1e-12);
            assert!(prod.max_abs_diff(&dpq.map(|z| z * phase)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn gaussian_vector_has_small_orbit() {
        assert_eq!(orbit(&v1(), 1e-8).len(), 6);
        let conj = orbit(&v1().conj(), 1e-8);
        assert_eq!(conj.len(), 6);
        for u in orbit(&v1(), 1e-8) {
            assert!(conj.iter().all(|w| w.overlap(&u) < 1.0 - 1e-8));
        }
    }

    #[test]
    fn gaussian_vector_is_diagonal_eigenvector() {
        let v = v1();
        let tau = standard_tau::<f64>(6);
        for mu in 0..6 {
            let p = DisplacementIndex::new(mu, mu, 6).unwrap();
            let overlap = dot_conj(v.components(), &apply(p, tau, v.components())).norm();
            assert!((overlap - 1.0).abs() < IDENTITY_TOL);
        }
    }

    #[test]
    fn displacements_are_unitary() {
        let tau = standard_tau::<f64>(4);
        for p in DisplacementIndex::all(4) {
            let m = displacement(p, tau);
            assert!((&m.adjoint() * &m).max_abs_diff(&Matrix::identity(4)).unwrap() < 1e-14);
        }
    }
}

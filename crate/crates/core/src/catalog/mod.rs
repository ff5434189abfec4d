//! Complex Hadamard matrices and families in dimension six, plus Fourier
//! matrices in any dimension.
//!
//! Explicit entries for the Tao, Diţă and Björck matrices follow the public
//! catalogue of complex Hadamard matrices maintained by Bruzda, Tadej and
//! Życzkowski; the Björck family is written in its Hermitian dephased form.

mod equivalence;
mod karlsson;

use std::fmt;
use std::str::FromStr;

pub use equivalence::{all_equivalences, equivalence_test, find_equivalence, EquivalenceWitness};
pub use karlsson::{
    karlsson2, karlsson2_corner_limit, karlsson2_generator, karlsson3, karlsson3_affine_slice, karlsson3_phases,
    mobius, mobius_inverse, pi_shift_check, symmetry_residual, KarlssonPhases, SymmetryIdentity,
};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{cis, wrap, Complex, Real};

/// The Hadamard families the crate can construct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// Fourier matrix of the given dimension.
    Fourier(usize),
    FourierFamily6,
    Dita6,
    Tao6,
    Bjorck6,
    Matolcsi6,
    Karlsson2,
    Karlsson3,
}

impl FamilyId {
    pub const ALL_CODES: [&'static str; 8] = ["F", "F6", "D6", "S6", "B6", "M6", "K2", "K3"];

    pub fn arity(self) -> usize {
        match self {
            FamilyId::Fourier(_) | FamilyId::Tao6 => 0,
            FamilyId::Dita6 | FamilyId::Bjorck6 | FamilyId::Matolcsi6 => 1,
            FamilyId::FourierFamily6 | FamilyId::Karlsson2 => 2,
            FamilyId::Karlsson3 => 3,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            FamilyId::Fourier(d) => d,
            _ => 6,
        }
    }

    /// Short code used on the command line.
    pub fn code(self) -> &'static str {
        match self {
            FamilyId::Fourier(_) => "F",
            FamilyId::FourierFamily6 => "F6",
            FamilyId::Dita6 => "D6",
            FamilyId::Tao6 => "S6",
            FamilyId::Bjorck6 => "B6",
            FamilyId::Matolcsi6 => "M6",
            FamilyId::Karlsson2 => "K2",
            FamilyId::Karlsson3 => "K3",
        }
    }

    pub fn is_affine(self) -> bool {
        matches!(self, FamilyId::Fourier(_) | FamilyId::FourierFamily6 | FamilyId::Dita6)
    }

    /// True for matrices admitting no inequivalent deformation.
    pub fn is_isolated(self) -> bool {
        matches!(self, FamilyId::Tao6)
    }

    /// Human readable parameter domain.
    pub fn domain(self) -> &'static str {
        match self {
            FamilyId::Fourier(_) | FamilyId::Tao6 => "no parameters",
            FamilyId::FourierFamily6 => "(a, b) in [-pi, pi)^2",
            FamilyId::Dita6 => "c in [-1/8, 1/8]",
            FamilyId::Bjorck6 => "s in [-pi, -s0] u [s0, pi], s0 = arccos((sqrt 3 - 1)/2)",
            FamilyId::Matolcsi6 => "t in (pi/2, pi] u (3pi/2, 2pi]",
            FamilyId::Karlsson2 => "(x1, x2) in [-pi/2, pi/2]^2 minus the corners",
            FamilyId::Karlsson3 => "(theta, phi, psi) in [0, pi)^3",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::Fourier(d) if *d != 6 => write!(f, "F(d={d})"),
            other => f.write_str(other.code()),
        }
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    /// Parses a family code. `F` means the Fourier matrix in dimension six.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "F" => FamilyId::Fourier(6),
            "F6" => FamilyId::FourierFamily6,
            "D6" => FamilyId::Dita6,
            "S6" => FamilyId::Tao6,
            "B6" => FamilyId::Bjorck6,
            "M6" => FamilyId::Matolcsi6,
            "K2" => FamilyId::Karlsson2,
            "K3" => FamilyId::Karlsson3,
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }
}

/// A family together with a parameter tuple reduced to its fundamental domain.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyPoint {
    family: FamilyId,
    params: Vec<f64>,
}

impl FamilyPoint {
    /// Validates arity and domain, and canonicalizes angular parameters.
    /// Reduction only ever replaces a matrix by an equivalent one.
    pub fn new(family: FamilyId, params: &[f64]) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(Error::WrongArity {
                family: family.code(),
                expected: family.arity(),
                found: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let pi = std::f64::consts::PI;
        let params = match family {
            FamilyId::Fourier(d) => {
                if d < 2 {
                    return Err(Error::InvalidDimension(d));
                }
                vec![]
            }
            FamilyId::Tao6 => vec![],
            FamilyId::FourierFamily6 => params.iter().map(|&x| wrap(x, -pi, 2.0 * pi)).collect(),
            FamilyId::Dita6 => {
                check_dita_range(params[0])?;
                params.to_vec()
            }
            FamilyId::Bjorck6 => {
                let s = wrap(params[0], -pi, 2.0 * pi);
                // -pi and pi are the same point; report it as pi.
                let s = if s == -pi { pi } else { s };
                check_bjorck_range(s)?;
                vec![s]
            }
            FamilyId::Matolcsi6 => {
                let mut t = wrap(params[0], 0.0, 2.0 * pi);
                if t == 0.0 {
                    t = 2.0 * pi;
                }
                check_matolcsi_range(t)?;
                vec![t]
            }
            FamilyId::Karlsson2 => params.iter().map(|&x| reduce_half_pi(x)).collect(),
            FamilyId::Karlsson3 => params.iter().map(|&x| wrap(x, 0.0, pi)).collect(),
        };
        Ok(Self { family, params })
    }

    pub fn family(&self) -> FamilyId {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// The Hadamard matrix at this point.
    pub fn matrix<T: Real>(&self) -> Result<Matrix<T>> {
        let p: Vec<T> = self.params.iter().map(|&x| T::lit(x)).collect();
        match self.family {
            FamilyId::Fourier(d) => fourier(d),
            FamilyId::FourierFamily6 => Ok(fourier_family6(p[0], p[1])),
            FamilyId::Dita6 => dita(p[0]),
            FamilyId::Tao6 => Ok(tao()),
            FamilyId::Bjorck6 => bjorck(p[0]),
            FamilyId::Matolcsi6 => matolcsi(p[0]),
            FamilyId::Karlsson2 => karlsson2(p[0], p[1]),
            FamilyId::Karlsson3 => karlsson3(p[0], p[1], p[2]),
        }
    }
}

fn reduce_half_pi(x: f64) -> f64 {
    let h = std::f64::consts::FRAC_PI_2;
    if (-h..=h).contains(&x) {
        x
    } else {
        wrap(x, -h, 2.0 * h)
    }
}

/// `H(x) = H(0) ∘ Exp(i Σ_j x_j R_j)` for fixed real direction matrices `R_j`.
#[derive(Clone, Debug)]
pub struct AffineFamily<T> {
    base: Matrix<T>,
    directions: Vec<Vec<T>>,
}

impl<T: Real> AffineFamily<T> {
    /// Each direction is a row-major `d×d` real matrix.
    pub fn new(base: Matrix<T>, directions: Vec<Vec<T>>) -> Result<Self> {
        let n = base.dim() * base.dim();
        if let Some(bad) = directions.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self { base, directions })
    }

    pub fn base(&self) -> &Matrix<T> {
        &self.base
    }

    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    /// Phase pattern `Σ_j x_j R_j`, row-major.
    pub fn phase_pattern(&self, params: &[T]) -> Result<Vec<T>> {
        if params.len() != self.directions.len() {
            return Err(Error::DimensionMismatch {
                expected: self.directions.len(),
                found: params.len(),
            });
        }
        let n = self.base.dim() * self.base.dim();
        let mut r = vec![T::zero(); n];
        for (x, dir) in params.iter().zip(&self.directions) {
            for (acc, &e) in r.iter_mut().zip(dir) {
                *acc = *acc + *x * e;
            }
        }
        Ok(r)
    }

    pub fn at(&self, params: &[T]) -> Result<Matrix<T>> {
        let r = self.phase_pattern(params)?;
        let d = self.base.dim();
        Ok(Matrix::from_fn(d, |i, j| self.base[(i, j)] * cis(r[i * d + j])))
    }
}

/// `F_d` with entries `ω^{jk}`, `ω = e^{2πi/d}`.
pub fn fourier<T: Real>(d: usize) -> Result<Matrix<T>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let step = T::TAU() / T::from_count(d);
    Ok(Matrix::from_fn(d, |j, k| cis(step * T::from_count((j * k) % d))))
}

/// Two-parameter affine family through `F_6`.
pub fn fourier_family6_affine<T: Real>() -> AffineFamily<T> {
    let mut ra = vec![T::zero(); 36];
    let mut rb = vec![T::zero(); 36];
    for r in [1, 3, 5] {
        ra[r * 6 + 1] = T::one();
        ra[r * 6 + 4] = T::one();
        rb[r * 6 + 2] = T::one();
        rb[r * 6 + 5] = T::one();
    }
    AffineFamily::new(fourier(6).expect("d = 6"), vec![ra, rb]).expect("6x6 directions")
}

pub fn fourier_family6<T: Real>(a: T, b: T) -> Matrix<T> {
    fourier_family6_affine().at(&[a, b]).expect("two parameters")
}

/// Dephased Diţă matrix, the `c = 0` member of the Diţă family.
pub fn dita_base<T: Real>() -> Matrix<T> {
    const D: [[(i8, i8); 6]; 6] = [
        [(1, 0), (1, 0), (1, 0), (1, 0), (1, 0), (1, 0)],
        [(1, 0), (-1, 0), (0, 1), (0, -1), (0, -1), (0, 1)],
        [(1, 0), (0, 1), (-1, 0), (0, 1), (0, -1), (0, -1)],
        [(1, 0), (0, -1), (0, 1), (-1, 0), (0, 1), (0, -1)],
        [(1, 0), (0, -1), (0, -1), (0, 1), (-1, 0), (0, 1)],
        [(1, 0), (0, 1), (0, -1), (0, -1), (0, 1), (-1, 0)],
    ];
    Matrix::from_fn(6, |r, c| {
        let (re, im) = D[r][c];
        Complex::new(T::lit(re as f64), T::lit(im as f64))
    })
}

/// Diţă family as an affine family; the phase direction is `2π` times an
/// antisymmetric pattern on the lower 4×4 block.
pub fn dita_affine<T: Real>() -> AffineFamily<T> {
    let mut s = vec![T::zero(); 36];
    let tau = T::TAU();
    for &(i, j, v) in &[(2usize, 3usize, -1.0), (2, 4, -1.0), (3, 5, 1.0), (4, 5, 1.0)] {
        s[i * 6 + j] = tau * T::lit(v);
        s[j * 6 + i] = -tau * T::lit(v);
    }
    AffineFamily::new(dita_base(), vec![s]).expect("6x6 direction")
}

fn check_dita_range(c: f64) -> Result<()> {
    if !(-0.125..=0.125).contains(&c) {
        return Err(Error::ParameterOutOfRange {
            family: "D6",
            value: c,
            domain: FamilyId::Dita6.domain(),
        });
    }
    Ok(())
}

/// Diţă family member `D(c)`, `c ∈ [-1/8, 1/8]`.
pub fn dita<T: Real>(c: T) -> Result<Matrix<T>> {
    check_dita_range(c.as_f64())?;
    dita_affine().at(&[c])
}

/// Tao's spectral matrix, built from cube roots of unity.
pub fn tao<T: Real>() -> Matrix<T> {
    const EXP: [[u8; 6]; 6] = [
        [0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 2, 2],
        [0, 1, 0, 2, 2, 1],
        [0, 1, 2, 0, 1, 2],
        [0, 2, 2, 1, 0, 1],
        [0, 2, 1, 2, 1, 0],
    ];
    let third = T::TAU() / T::lit(3.0);
    Matrix::from_fn(6, |r, c| cis(third * T::from_count(EXP[r][c] as usize)))
}

/// Lower edge `arccos((√3 − 1)/2)` of the Björck family's parameter range.
pub fn bjorck_threshold() -> f64 {
    ((3f64.sqrt() - 1.0) / 2.0).acos()
}

fn check_bjorck_range(s: f64) -> Result<()> {
    let pi = std::f64::consts::PI;
    let s0 = bjorck_threshold();
    if !(s.abs() >= s0 && s.abs() <= pi) {
        return Err(Error::ParameterOutOfRange {
            family: "B6",
            value: s,
            domain: FamilyId::Bjorck6.domain(),
        });
    }
    Ok(())
}

/// Björck's one-parameter family. The matrix is Hermitian and dephased; its
/// free entries `x, y, z, t` are unimodular exactly on the valid range.
pub fn bjorck<T: Real>(s: T) -> Result<Matrix<T>> {
    check_bjorck_range(s.as_f64())?;
    let one = Complex::new(T::one(), T::zero());
    let two = T::lit(2.0);
    let y = cis(s);
    let y2 = y * y;
    let z = (one + y * two - y2) / (y * (-one + y * two + y2));
    let disc = (one + y * two + y2 * y * two + y2 * y2).sqrt() * T::SQRT_2();
    let x = (one + y * two + y2 + disc) / (one + y * two - y2);
    let t = x * y * z;
    // Renormalize: the expressions are unimodular analytically.
    let unit = |w: Complex<T>| w / w.norm();
    let (x, y, z, t) = (unit(x), unit(y), unit(z), unit(t));
    let (xc, yc, zc, tc) = (x.conj(), y.conj(), z.conj(), t.conj());
    let rows = vec![
        vec![one, one, one, one, one, one],
        vec![one, one, -x, y, zc, -tc],
        vec![one, -xc, -one, xc, -tc, tc],
        vec![one, yc, x, -one, -x, -yc],
        vec![one, z, -t, -xc, one, yc],
        vec![one, -t, t, -y, y, -one],
    ];
    Matrix::from_rows(rows)
}

fn check_matolcsi_range(t: f64) -> Result<()> {
    let pi = std::f64::consts::PI;
    let ok = (t > pi / 2.0 && t <= pi) || (t > 1.5 * pi && t <= 2.0 * pi);
    if !ok {
        return Err(Error::ParameterOutOfRange {
            family: "M6",
            value: t,
            domain: FamilyId::Matolcsi6.domain(),
        });
    }
    Ok(())
}

/// Matolcsi's one-parameter family, realized as the diagonal `(t, t)` of the
/// two-parameter Karlsson family.
pub fn matolcsi<T: Real>(t: T) -> Result<Matrix<T>> {
    check_matolcsi_range(t.as_f64())?;
    karlsson2(t, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dephase, is_hadamard, mu_deviation, OrthonormalBasis};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn fourier_small_dimensions() {
        let f2 = fourier::<f64>(2).unwrap();
        let expected = [[1.0, 1.0], [1.0, -1.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((f2[(r, c)] - Complex::new(expected[r][c], 0.0)).norm() < 1e-15);
            }
        }
        let f4 = fourier::<f64>(4).unwrap();
        assert!((f4[(1, 1)] - Complex::new(0.0, 1.0)).norm() < 1e-15);
        assert!((f4[(3, 3)] - Complex::new(0.0, 1.0)).norm() < 1e-15);
        assert!(matches!(fourier::<f64>(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn fourier_six_is_unbiased_to_identity() {
        let f6 = fourier::<f64>(6).unwrap();
        assert!(is_hadamard(&f6, 1e-10));
        let b = OrthonormalBasis::from_hadamard(&f6).unwrap();
        assert!(mu_deviation(&OrthonormalBasis::standard(6), &b).unwrap() <= 1e-12);
    }

    #[test]
    fn fourier_family_origin_is_fourier() {
        let f = fourier_family6::<f64>(0.0, 0.0);
        assert!(f.max_abs_diff(&fourier(6).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn fixed_matrices_are_hadamard() {
        assert!(is_hadamard(&tao::<f64>(), 1e-10));
        assert!(is_hadamard(&dita_base::<f64>(), 1e-10));
        for z in tao::<f64>().entries() {
            assert!((z.powu(3) - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dita_range_is_enforced() {
        assert!(dita(0.125f64).is_ok());
        assert!(matches!(dita(0.2f64), Err(Error::ParameterOutOfRange { .. })));
    }

    #[test]
    fn bjorck_range_is_enforced() {
        let s0 = bjorck_threshold();
        assert!((s0 - 1.1960618940861565).abs() < 1e-15);
        assert!(bjorck(s0 + 1e-9).is_ok());
        assert!(bjorck(-PI).is_ok());
        assert!(matches!(bjorck(1.0f64), Err(Error::ParameterOutOfRange { .. })));
        assert!(matches!(bjorck(-0.5f64), Err(Error::ParameterOutOfRange { .. })));
    }

    #[test]
    fn bjorck_is_hermitian() {
        let b = bjorck(2.3f64).unwrap();
        assert!(b.max_abs_diff(&b.adjoint()).unwrap() < 1e-12);
    }

    #[test]
    fn matolcsi_range_is_enforced() {
        assert!(matolcsi(0.7 * PI).is_ok());
        assert!(matolcsi(2.0 * PI).is_ok());
        assert!(matches!(matolcsi(0.3f64), Err(Error::ParameterOutOfRange { .. })));
        assert!(matches!(matolcsi(PI / 2.0), Err(Error::ParameterOutOfRange { .. })));
    }

    #[test]
    fn family_codes_round_trip() {
        for code in FamilyId::ALL_CODES {
            let id: FamilyId = code.parse().unwrap();
            assert_eq!(id.code(), code);
        }
        assert!(matches!("X9".parse::<FamilyId>(), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn family_point_checks_arity_and_reduces_angles() {
        assert!(matches!(
            FamilyPoint::new(FamilyId::Karlsson2, &[0.1]),
            Err(Error::WrongArity { expected: 2, .. })
        ));
        let p = FamilyPoint::new(FamilyId::Karlsson2, &[0.3 + PI, -0.8 - 2.0 * PI]).unwrap();
        assert!((p.params()[0] - 0.3).abs() < 1e-12);
        assert!((p.params()[1] + 0.8).abs() < 1e-12);
        let p = FamilyPoint::new(FamilyId::Karlsson3, &[3.5, -0.2, 7.0]).unwrap();
        assert!(p.params().iter().all(|&x| (0.0..PI).contains(&x)));
        let p = FamilyPoint::new(FamilyId::Matolcsi6, &[-0.3 * PI]).unwrap();
        assert!((p.params()[0] - 1.7 * PI).abs() < 1e-12);
    }

    #[test]
    fn reduced_points_stay_equivalent() {
        let raw = karlsson2(0.3 + PI, -0.8).unwrap();
        let reduced = FamilyPoint::new(FamilyId::Karlsson2, &[0.3 + PI, -0.8])
            .unwrap()
            .matrix::<f64>()
            .unwrap();
        assert!(equivalence_test(&raw, &reduced, 1e-9).unwrap());
        let raw = karlsson3(0.7 + PI, 1.2 + PI, 0.4 + PI).unwrap();
        let reduced = FamilyPoint::new(FamilyId::Karlsson3, &[0.7 + PI, 1.2 + PI, 0.4 + PI])
            .unwrap()
            .matrix::<f64>()
            .unwrap();
        assert!(equivalence_test(&raw, &reduced, 1e-9).unwrap());
    }

    #[test]
    fn catalog_outputs_dephase_to_ones() {
        for m in [
            tao::<f64>(),
            dita(0.05).unwrap(),
            bjorck(2.0).unwrap(),
            karlsson2(0.2, 0.4).unwrap(),
        ] {
            let d = dephase(&m).unwrap();
            for k in 0..6 {
                assert!((d[(0, k)] - Complex::new(1.0, 0.0)).norm() < 1e-12);
                assert!((d[(k, 0)] - Complex::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_precision_smoke() {
        assert!(is_hadamard(&fourier_family6::<f32>(0.4, 1.1), 1e-5));
        assert!(is_hadamard(&karlsson2::<f32>(0.4, -1.1).unwrap(), 1e-4));
    }

    #[test]
    fn generic_fourier_family_is_not_fourier() {
        let f = fourier::<f64>(6).unwrap();
        for &(a, b) in &[(0.4, 1.1), (-2.0, 0.3)] {
            assert!(!equivalence_test(&fourier_family6(a, b), &f, 1e-8).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn fourier_family_is_hadamard(a in -PI..PI, b in -PI..PI) {
            prop_assert!(is_hadamard(&fourier_family6(a, b), 1e-10));
        }

        #[test]
        fn dita_is_hadamard(c in -0.125f64..=0.125) {
            prop_assert!(is_hadamard(&dita(c).unwrap(), 1e-10));
        }

        #[test]
        fn bjorck_is_hadamard(u in 0.0f64..1.0, neg in any::<bool>()) {
            let s0 = bjorck_threshold();
            let s = s0 + u * (PI - s0);
            let s = if neg { -s } else { s };
            prop_assert!(is_hadamard(&bjorck(s).unwrap(), 1e-10));
        }

        #[test]
        fn matolcsi_is_hadamard(u in 0.001f64..1.0, upper in any::<bool>()) {
            let t = PI / 2.0 + u * PI / 2.0 + if upper { PI } else { 0.0 };
            prop_assert!(is_hadamard(&matolcsi(t).unwrap(), 1e-10));
        }
    }
}

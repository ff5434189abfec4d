//! Karlsson's non-affine families: the two-parameter family built from a
//! single generator function, and the three-parameter H2-reducible family
//! assembled from 2×2 blocks and a chain of Möbius maps.

use crate::error::{Error, Result};
use crate::linalg::{tensor, transposition, Matrix};
use crate::scalar::{cis, Complex, Real};

use super::fourier;

/// Below this modulus the generator's inner factor is treated as zero.
const SINGULAR_TOL: f64 = 1e-14;

fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// How the generator treats the points where it is undefined.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Singular {
    Fail,
    /// Take the limit along the diagonal from inside the square.
    DiagonalLimit,
}

fn generator<T: Real>(a: T, b: T, rule: Singular) -> Result<Complex<T>> {
    let half = T::lit(0.5);
    // p = cos((a-b)/2) - i sin((a+b)/2), and |p|^2 = 1 + sin a sin b.
    let p = c(((a - b) * half).cos(), -((a + b) * half).sin());
    let r = p.norm();
    let dir = if r <= T::lit(SINGULAR_TOL) {
        match rule {
            Singular::Fail => {
                return Err(Error::SingularParameter {
                    family: "K2",
                    detail: format!(
                        "1 + sin({a}) sin({b}) vanishes; the family degenerates to the Dita family here, \
                         use the corner limit instead"
                    ),
                })
            }
            Singular::DiagonalLimit => c(T::one(), T::zero()),
        }
    } else {
        p / r
    };
    let root = (T::one() - r * r * T::lit(0.25)).max(T::zero()).sqrt();
    let inner = p * half + c(T::zero(), T::one()) * dir * root;
    Ok(cis((a + b) * half) * inner)
}

/// The generator `f(x1, x2)` of the two-parameter family, evaluated in a form
/// that stays accurate next to its singular points.
pub fn karlsson2_generator<T: Real>(x1: T, x2: T) -> Result<Complex<T>> {
    generator(x1, x2, Singular::Fail)
}

fn karlsson2_with<T: Real>(x1: T, x2: T, rule: Singular) -> Result<Matrix<T>> {
    let f1 = generator(x1, x2, rule)?;
    let f2 = generator(x1, -x2, rule)?;
    let f3 = generator(-x1, -x2, rule)?;
    let f4 = generator(-x1, x2, rule)?;
    let z1 = cis(x1);
    let z2 = cis(x2);
    let one = c(T::one(), T::zero());
    let z12 = z1 * z2;
    let rows = vec![
        vec![one, one, one, one, one, one],
        vec![one, -one, z1, -z1, z1, -z1],
        vec![one, z2, -f1, -z2 * f2, -f3.conj(), -z2 * f4.conj()],
        vec![one, -z2, -z1 * f2.conj(), z12 * f1.conj(), -z1 * f4, z12 * f3],
        vec![one, z2, -f3.conj(), -z2 * f4.conj(), -f1, -z2 * f2],
        vec![one, -z2, -z1 * f4, z12 * f3, -z1 * f2.conj(), z12 * f1.conj()],
    ];
    Matrix::from_rows(rows)
}

/// Two-parameter Karlsson matrix at `(x1, x2)`. The formula is evaluated as
/// given, without reducing the parameters.
pub fn karlsson2<T: Real>(x1: T, x2: T) -> Result<Matrix<T>> {
    karlsson2_with(x1, x2, Singular::Fail)
}

/// Limit of the two-parameter family at a corner `(±π/2, ±π/2)`, approached
/// along the diagonal through the corner. Other approach directions give
/// other members of the Diţă family.
pub fn karlsson2_corner_limit<T: Real>(x1_positive: bool, x2_positive: bool) -> Matrix<T> {
    let h = T::FRAC_PI_2();
    let x1 = if x1_positive { h } else { -h };
    let x2 = if x2_positive { h } else { -h };
    karlsson2_with(x1, x2, Singular::DiagonalLimit).expect("corner limit is finite")
}

/// Algebraic symmetries of the two-parameter family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryIdentity {
    /// `x2 -> -x2`.
    ReflectSecond,
    /// `x1 -> -x1`.
    ReflectFirst,
    /// `(x1, x2) -> (x2, x1)`.
    SwapParameters,
    /// `x1 -> x1 + π`.
    ShiftFirst,
    /// `x2 -> x2 + π`.
    ShiftSecond,
}

impl SymmetryIdentity {
    pub const ALL: [SymmetryIdentity; 5] = [
        SymmetryIdentity::ReflectSecond,
        SymmetryIdentity::ReflectFirst,
        SymmetryIdentity::SwapParameters,
        SymmetryIdentity::ShiftFirst,
        SymmetryIdentity::ShiftSecond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SymmetryIdentity::ReflectSecond => "reflect-x2",
            SymmetryIdentity::ReflectFirst => "reflect-x1",
            SymmetryIdentity::SwapParameters => "swap",
            SymmetryIdentity::ShiftFirst => "shift-x1",
            SymmetryIdentity::ShiftSecond => "shift-x2",
        }
    }

    fn image<T: Real>(self, x1: T, x2: T) -> (T, T) {
        match self {
            SymmetryIdentity::ReflectSecond => (x1, -x2),
            SymmetryIdentity::ReflectFirst => (-x1, x2),
            SymmetryIdentity::SwapParameters => (x2, x1),
            SymmetryIdentity::ShiftFirst => (x1 + T::PI(), x2),
            SymmetryIdentity::ShiftSecond => (x1, x2 + T::PI()),
        }
    }

    /// The right-hand side built from `K(x1, x2)` in its exact form, which
    /// for the reflections needs diagonal phases besides the permutations.
    fn exact_rhs<T: Real>(self, k: &Matrix<T>, x1: T, x2: T) -> Matrix<T> {
        let p = |i, j| transposition::<T>(6, i, j);
        let alternating = |z: Complex<T>| {
            let one = c(T::one(), T::zero());
            let w = z.conj();
            vec![one, -one, w, -w, w, -w]
        };
        match self {
            SymmetryIdentity::ReflectSecond => {
                let right = &(&p(1, 2) * &p(3, 4)) * &p(5, 6);
                &k.scale_rows(&alternating(cis(x2))) * &right
            }
            SymmetryIdentity::ReflectFirst => {
                let left = &(&p(1, 2) * &p(3, 6)) * &p(4, 5);
                (&left * k).scale_cols(&alternating(cis(x1)))
            }
            SymmetryIdentity::SwapParameters => &(&p(4, 6) * &k.transpose()) * &p(4, 6),
            SymmetryIdentity::ShiftFirst => &(k * &p(3, 4)) * &p(5, 6),
            SymmetryIdentity::ShiftSecond => &(&p(3, 6) * &p(4, 5)) * k,
        }
    }

    /// The permutation-only right-hand side: `P36·P45·K` for both
    /// reflections and `K` itself for the swap. These do not hold; they are
    /// kept so the discrepancy can be measured.
    fn permutation_rhs<T: Real>(self, k: &Matrix<T>) -> Matrix<T> {
        let p = |i, j| transposition::<T>(6, i, j);
        match self {
            SymmetryIdentity::ReflectSecond | SymmetryIdentity::ReflectFirst => &(&p(3, 6) * &p(4, 5)) * k,
            SymmetryIdentity::SwapParameters => k.clone(),
            SymmetryIdentity::ShiftFirst => &(k * &p(3, 4)) * &p(5, 6),
            SymmetryIdentity::ShiftSecond => &(&p(3, 6) * &p(4, 5)) * k,
        }
    }
}

/// Max entrywise deviation of a symmetry identity at `(x1, x2)`. With
/// `exact = false` the permutation-only form is checked instead.
pub fn symmetry_residual<T: Real>(id: SymmetryIdentity, x1: T, x2: T, exact: bool) -> Result<T> {
    let k = karlsson2(x1, x2)?;
    let (y1, y2) = id.image(x1, x2);
    let lhs = karlsson2(y1, y2)?;
    let rhs = if exact {
        id.exact_rhs(&k, x1, x2)
    } else {
        id.permutation_rhs(&k)
    };
    lhs.max_abs_diff(&rhs)
}

/// Checks both π-shift relations at `(x1, x2)` within `tol`.
pub fn pi_shift_check<T: Real>(x1: T, x2: T, tol: T) -> Result<bool> {
    for id in [SymmetryIdentity::ShiftFirst, SymmetryIdentity::ShiftSecond] {
        if symmetry_residual(id, x1, x2, true)? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(αz − β)/(β̄z − ᾱ)`.
pub fn mobius<T: Real>(alpha: Complex<T>, beta: Complex<T>, z: Complex<T>) -> Result<Complex<T>> {
    let den = beta.conj() * z - alpha.conj();
    if den.norm() <= T::lit(SINGULAR_TOL) {
        return Err(Error::MobiusSingular { transform: "M" });
    }
    Ok((alpha * z - beta) / den)
}

/// Inverse of [`mobius`]: `(ᾱw − β)/(β̄w − α)`.
pub fn mobius_inverse<T: Real>(alpha: Complex<T>, beta: Complex<T>, w: Complex<T>) -> Result<Complex<T>> {
    let den = beta.conj() * w - alpha;
    if den.norm() <= T::lit(SINGULAR_TOL) {
        return Err(Error::MobiusSingular { transform: "M^-1" });
    }
    Ok((alpha.conj() * w - beta) / den)
}

/// Inner 2×2 core `A` and the four unimodular numbers driving the blocks.
#[derive(Clone, Copy, Debug)]
pub struct KarlssonPhases<T> {
    pub a11: Complex<T>,
    pub a12: Complex<T>,
    pub z: [Complex<T>; 4],
}

fn core_entries<T: Real>(theta: T, phi: T) -> (Complex<T>, Complex<T>) {
    let h = T::lit(0.5);
    let s = T::lit(3f64.sqrt() / 2.0);
    let i = c(T::zero(), T::one());
    let a11 = c(-h, T::zero()) + i * s * (c(theta.cos(), T::zero()) + cis(-phi) * theta.sin());
    let a12 = c(-h, T::zero()) + i * s * (c(-theta.cos(), T::zero()) + cis(phi) * theta.sin());
    (a11, a12)
}

/// Computes `z1..z4` for the three-parameter family. On the `θ = 0` slice
/// every Möbius map is constant, the chain for `z2` is `0/0`, and the
/// convention `z2 = z3 = z4 = 1` is used.
pub fn karlsson3_phases<T: Real>(theta: T, phi: T, psi: T) -> Result<KarlssonPhases<T>> {
    let (a11, a12) = core_entries(theta, phi);
    let one = c(T::one(), T::zero());
    let z1 = cis(psi);
    if theta.sin().abs() <= T::lit(SINGULAR_TOL) {
        return Ok(KarlssonPhases {
            a11,
            a12,
            z: [z1, one, one, one],
        });
    }
    let b11 = -one - a11;
    let b12 = -one - a12;
    let (alpha_a, beta_a) = (a12 * a12, a11 * a11);
    let (alpha_b, beta_b) = (b12 * b12, b11 * b11);
    let tol = T::lit(1e-12);
    if (alpha_a.norm_sqr() - beta_a.norm_sqr()).abs() <= tol {
        return Err(Error::MobiusSingular {
            transform: "M_A (constant map)",
        });
    }
    let w = z1 * z1;
    let m_b = mobius(alpha_b, beta_b, w).map_err(|_| Error::MobiusSingular { transform: "M_B" })?;
    let m_a = mobius(alpha_a, beta_a, w).map_err(|_| Error::MobiusSingular { transform: "M_A" })?;
    let chain = mobius_inverse(alpha_a, beta_a, m_b).map_err(|_| Error::MobiusSingular { transform: "M_A^-1" })?;
    let unit = |u: Complex<T>| {
        let s = u.sqrt();
        s / s.norm()
    };
    Ok(KarlssonPhases {
        a11,
        a12,
        z: [z1, unit(chain), unit(m_a), unit(m_b)],
    })
}

/// Three-parameter Karlsson matrix at `(θ, φ, ψ)`.
pub fn karlsson3<T: Real>(theta: T, phi: T, psi: T) -> Result<Matrix<T>> {
    let ph = karlsson3_phases(theta, phi, psi)?;
    let one = c(T::one(), T::zero());
    let [z1, z2, z3, z4] = ph.z;
    let a = [[ph.a11, ph.a12], [ph.a12.conj(), -ph.a11.conj()]];
    let b = [[-one - a[0][0], -one - a[0][1]], [-one - a[1][0], one - a[1][1]]];
    type M2<T> = [[Complex<T>; 2]; 2];
    let col_block = |z: Complex<T>| -> M2<T> { [[one, one], [z, -z]] };
    let row_block = |z: Complex<T>| -> M2<T> { [[one, z], [one, -z]] };
    let mul = |x: M2<T>, y: M2<T>| -> M2<T> {
        let mut out = [[c(T::zero(), T::zero()); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        out
    };
    let half = |x: M2<T>| -> M2<T> { x.map(|r| r.map(|e| e * T::lit(0.5))) };
    let f2: M2<T> = [[one, one], [one, -one]];
    let (zc1, zc2, zr3, zr4) = (col_block(z1), col_block(z2), row_block(z3), row_block(z4));
    let blocks: [[M2<T>; 3]; 3] = [
        [f2, zc1, zc2],
        [zr3, half(mul(mul(zr3, a), zc1)), half(mul(mul(zr3, b), zc2))],
        [zr4, half(mul(mul(zr4, b), zc1)), half(mul(mul(zr4, a), zc2))],
    ];
    Ok(Matrix::from_fn(6, |r, col| blocks[r / 2][col / 2][r % 2][col % 2]))
}

/// Affine slice `(P46·(F3 ⊗ F2)) ∘ Exp(iR(ψ))` that the three-parameter
/// family reduces to at `θ = 0`; `R(ψ)` puts `ψ` at rows 1, 3, 5 and
/// columns 2, 3 (0-based).
pub fn karlsson3_affine_slice<T: Real>(psi: T) -> Matrix<T> {
    let f3 = fourier::<T>(3).expect("d = 3");
    let f2 = fourier::<T>(2).expect("d = 2");
    let base = &transposition::<T>(6, 4, 6) * &tensor(&f3, &f2);
    let phase = cis(psi);
    Matrix::from_fn(6, |r, col| {
        let z = base[(r, col)];
        if r % 2 == 1 && (col == 2 || col == 3) {
            z * phase
        } else {
            z
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{dita, equivalence_test, fourier_family6};
    use crate::linalg::is_hadamard;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn generator_is_symmetric_and_unimodular() {
        let f = karlsson2_generator(0.3f64, -0.8).unwrap();
        let g = karlsson2_generator(-0.8f64, 0.3).unwrap();
        assert!((f - g).norm() < 1e-15);
        assert!((f.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generator_matches_the_direct_formula_away_from_corners() {
        for &(a, b) in &[(0.3f64, -0.8f64), (1.2, 0.4), (-1.0, -1.3)] {
            let direct = cis((a + b) / 2.0)
                * Complex::new(((a - b) / 2.0).cos(), -((a + b) / 2.0).sin())
                * Complex::new(0.5, (1.0 / (1.0 + a.sin() * b.sin()) - 0.25).sqrt());
            assert!((direct - karlsson2_generator(a, b).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn every_corner_is_singular() {
        for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let err = karlsson2(s1 * FRAC_PI_2, s2 * FRAC_PI_2).unwrap_err();
            assert!(matches!(err, Error::SingularParameter { .. }), "{s1} {s2}");
            assert!(err.is_numerical());
        }
    }

    #[test]
    fn corner_limits_are_dita_at_origin() {
        let d0 = dita(0.0f64).unwrap();
        for (p1, p2) in [(true, true), (false, false), (true, false), (false, true)] {
            let k = karlsson2_corner_limit::<f64>(p1, p2);
            assert!(is_hadamard(&k, 1e-10));
            assert!(equivalence_test(&k, &d0, 1e-8).unwrap(), "{p1} {p2}");
        }
    }

    #[test]
    fn corner_limit_is_continuous_along_the_diagonal() {
        let eps = 1e-9;
        let near = karlsson2(FRAC_PI_2 - eps, FRAC_PI_2 - eps).unwrap();
        let limit = karlsson2_corner_limit::<f64>(true, true);
        assert!(near.max_abs_diff(&limit).unwrap() < 1e-7);
    }

    #[test]
    fn centre_and_axes() {
        let f6 = crate::catalog::fourier::<f64>(6).unwrap();
        assert!(equivalence_test(&karlsson2(0.0, 0.0).unwrap(), &f6, 1e-9).unwrap());
        for &x in &[0.4f64, -1.1, 1.3] {
            let axis = fourier_family6(x, x);
            assert!(equivalence_test(&karlsson2(x, 0.0).unwrap(), &axis, 1e-9).unwrap());
            assert!(equivalence_test(&karlsson2(0.0, x).unwrap(), &axis.transpose(), 1e-9).unwrap());
        }
    }

    #[test]
    fn permutation_only_reflections_do_not_hold() {
        for id in [
            SymmetryIdentity::ReflectSecond,
            SymmetryIdentity::ReflectFirst,
            SymmetryIdentity::SwapParameters,
        ] {
            assert!(symmetry_residual(id, 0.3, -0.8, false).unwrap() > 0.5, "{}", id.name());
        }
    }

    #[test]
    fn pi_shift_at_sample_points() {
        assert!(pi_shift_check(0.3, -0.8, 1e-12).unwrap());
        assert!(pi_shift_check(0.0, 0.0, 1e-12).unwrap());
    }

    #[test]
    fn mobius_examples() {
        let z = cis(0.7f64);
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        assert!((mobius(one, zero, z).unwrap() + z).norm() < 1e-15);
        assert!(matches!(mobius(one, one, one), Err(Error::MobiusSingular { .. })));
    }

    #[test]
    fn theta_zero_maps_are_constant_not_identity() {
        let (a11, a12) = core_entries(0.0f64, 0.9);
        let (alpha, beta) = (a12 * a12, a11 * a11);
        let one = Complex::new(1.0, 0.0);
        for &psi in &[0.2f64, 1.0, 2.5] {
            let w = cis(2.0 * psi);
            assert!((mobius(alpha, beta, w).unwrap() - one).norm() < 1e-12);
        }
    }

    #[test]
    fn theta_zero_slice_is_affine_and_phi_free() {
        for &(phi, psi) in &[(0.3f64, 0.9f64), (2.0, 0.9), (1.0, 2.2)] {
            let k = karlsson3(0.0, phi, psi).unwrap();
            assert!(k.max_abs_diff(&karlsson3_affine_slice(psi)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn degenerate_core_is_reported() {
        // 3 cos θ cos φ = √3 sin φ makes M_A constant.
        let theta = 0.5f64;
        let phi = (3.0f64.sqrt() * theta.cos()).atan();
        assert!(matches!(karlsson3(theta, phi, 0.4), Err(Error::MobiusSingular { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn karlsson2_is_hadamard(x1 in -1.5f64..1.5, x2 in -1.5f64..1.5) {
            prop_assert!(is_hadamard(&karlsson2(x1, x2).unwrap(), 1e-10));
        }

        #[test]
        fn karlsson3_is_hadamard(theta in 0.01f64..PI - 0.01, phi in 0.0f64..PI, psi in 0.0f64..PI) {
            match karlsson3(theta, phi, psi) {
                Ok(k) => prop_assert!(is_hadamard(&k, 1e-9)),
                Err(e) => { let singular = matches!(e, Error::MobiusSingular { .. }); prop_assert!(singular) }
            }
        }

        #[test]
        fn exact_symmetries_hold(x1 in -1.5f64..1.5, x2 in -1.5f64..1.5) {
            for id in SymmetryIdentity::ALL {
                prop_assert!(symmetry_residual(id, x1, x2, true).unwrap() < 1e-12, "{}", id.name());
            }
        }

        #[test]
        fn mobius_preserves_the_unit_circle(a in 0.0f64..6.3, b in 0.0f64..6.3, t in 0.0f64..6.3) {
            let (alpha, beta, z) = (cis(a), cis(b).scale(0.5), cis(t));
            let w = mobius(alpha, beta, z).unwrap();
            prop_assert!((w.norm() - 1.0).abs() < 1e-12);
            prop_assert!((mobius_inverse(alpha, beta, w).unwrap() - z).norm() < 1e-12);
        }

        #[test]
        fn chain_reproduces_the_block_entries(theta in 0.05f64..3.0, phi in 0.0f64..3.1, psi in 0.0f64..3.1) {
            if let Ok(ph) = karlsson3_phases(theta, phi, psi) {
                let one = Complex::new(1.0, 0.0);
                let (a11, a12) = (ph.a11, ph.a12);
                let (b11, b12) = (-one - a11, -one - a12);
                let w = ph.z[0] * ph.z[0];
                let mb = mobius(b12 * b12, b11 * b11, w).unwrap();
                let back = mobius(a12 * a12, a11 * a11, ph.z[1] * ph.z[1]).unwrap();
                prop_assert!((back - mb).norm() < 1e-9);
            }
        }
    }
}

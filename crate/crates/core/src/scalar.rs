//! Real scalar abstraction.
//!
//! Everything numeric in this crate is written against [`Real`] so the same
//! code runs in `f32` or `f64`. The tolerances quoted throughout the crate
//! assume `f64`; `f32` is useful for quick smoke runs only.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Complex number over a [`Real`] scalar.
pub type Complex<T> = num_complex::Complex<T>;

/// Floating point scalar used by the linear algebra, catalog and solver layers.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the supported float types.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable")
    }

    /// Converts a `usize` (dimensions, counts).
    #[inline]
    fn from_count(value: usize) -> Self {
        Self::from_usize(value).expect("count representable")
    }

    /// Lossless widening for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{i·angle}`.
#[inline]
pub fn cis<T: Real>(angle: T) -> Complex<T> {
    Complex::new(angle.cos(), angle.sin())
}

/// `z / |z|`, or `None` when `|z| <= zero_tol`.
#[inline]
pub fn unit_phase<T: Real>(z: Complex<T>, zero_tol: T) -> Option<Complex<T>> {
    let r = z.norm();
    if r <= zero_tol {
        None
    } else {
        Some(z / r)
    }
}

/// Wraps `x` into `[lo, lo + period)`.
pub fn wrap<T: Real>(x: T, lo: T, period: T) -> T {
    let mut y = (x - lo) % period;
    if y < T::zero() {
        y = y + period;
    }
    // `%` can return `period` itself after the correction above when `x - lo`
    // is a tiny negative number.
    if y >= period {
        y = y - period;
    }
    lo + y
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_stays_in_half_open_interval() {
        for &x in &[-7.0, -PI, -1e-18, 0.0, 1.0, PI, 2.0 * PI, 13.7] {
            let y = wrap(x, -PI / 2.0, PI);
            assert!((-PI / 2.0..PI / 2.0).contains(&y), "{x} -> {y}");
            let k = ((x - y) / PI).round();
            assert!((x - y - k * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn cis_is_unimodular_in_both_precisions() {
        assert!((cis(0.3f64).norm() - 1.0).abs() < 1e-15);
        assert!((cis(0.3f32).norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unit_phase_rejects_zero() {
        assert!(unit_phase(Complex::new(0.0f64, 0.0), 1e-14).is_none());
        let p = unit_phase(Complex::new(3.0f64, 4.0), 1e-14).unwrap();
        assert!((p - Complex::new(0.6, 0.8)).norm() < 1e-15);
    }
}

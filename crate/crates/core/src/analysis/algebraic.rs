//! Matching numerically found vector components against small sets of exact
//! unimodular numbers.

use num_complex::Complex64;

use crate::linalg::{OrthonormalBasis, StateVector};
use crate::scalar::Real;

use super::MUVectorSet;

/// Default componentwise matching tolerance.
pub const MATCH_TOL: f64 = 1e-8;

/// Candidate values `e^{2πik/n}·f` for a root order `n` and a short list of
/// unimodular factors `f`. Factor 0 is always `1`.
#[derive(Clone, Debug)]
pub struct Alphabet {
    name: String,
    order: usize,
    factors: Vec<(String, Complex64)>,
}

/// Björck's number `(1 − √3)/2 + i·√(√3/2)`.
pub fn bjorck_number() -> Complex64 {
    let s3 = 3f64.sqrt();
    Complex64::new((1.0 - s3) / 2.0, (s3 / 2.0).sqrt())
}

/// `(−1 + 2i)/√5`.
pub fn dita_number() -> Complex64 {
    Complex64::new(-1.0, 2.0) / 5f64.sqrt()
}

impl Alphabet {
    pub fn new(name: impl Into<String>, order: usize, extra: Vec<(String, Complex64)>) -> Self {
        let mut factors = vec![("1".to_string(), Complex64::new(1.0, 0.0))];
        factors.extend(extra);
        Self {
            name: name.into(),
            order: order.max(1),
            factors,
        }
    }

    /// Roots of unity of the given order and nothing else.
    pub fn roots(order: usize) -> Self {
        Self::new(format!("{order}th roots"), order, Vec::new())
    }

    /// Sixth roots of unity together with `a, a*, a², (a*)²` as bare values.
    pub fn bjorck_literal() -> Self {
        let a = bjorck_number();
        // Bare values carry a '=' label and only match with root 0.
        Self::new(
            "6th roots and a, a*, a², a*²",
            6,
            bare(&[("a", a), ("a*", a.conj()), ("a²", a * a), ("a*²", (a * a).conj())]),
        )
    }

    /// Twelfth roots of unity times `1, a^{±1}, a^{±2}`.
    pub fn bjorck() -> Self {
        let a = bjorck_number();
        Self::new(
            "12th roots × a^k",
            12,
            vec![
                ("a".into(), a),
                ("a*".into(), a.conj()),
                ("a²".into(), a * a),
                ("a*²".into(), (a * a).conj()),
            ],
        )
    }

    /// 24th roots of unity times `1, b, b*` with `b = (−1 + 2i)/√5`. The
    /// factors `±i` are absorbed by the roots.
    pub fn dita() -> Self {
        let b = dita_number();
        Self::new("24th roots × b2", 24, vec![("b2".into(), b), ("b2*".into(), b.conj())])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn factor_label(&self, factor: usize) -> &str {
        self.factors[factor].0.trim_start_matches('=')
    }

    /// Finds `(k, f)` with `|z − e^{2πik/n}·factor_f| ≤ tol`; plain roots are
    /// preferred over products.
    pub fn locate(&self, z: Complex64, tol: f64) -> Option<Symbol> {
        for (f, (label, value)) in self.factors.iter().enumerate() {
            let q = z / value;
            let steps = q.arg() * self.order as f64 / std::f64::consts::TAU;
            let k = steps.round().rem_euclid(self.order as f64) as usize;
            if label.starts_with('=') && k != 0 {
                continue;
            }
            let candidate = value * Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / self.order as f64);
            let err = (z - candidate).norm();
            if err <= tol {
                return Some(Symbol {
                    root: k,
                    factor: f,
                    error: err,
                });
            }
        }
        None
    }

    /// Human-readable form of a symbol, e.g. `w^3·a*`.
    pub fn render(&self, s: &Symbol) -> String {
        let label = self.factors[s.factor].0.trim_start_matches('=');
        match (s.root, s.factor) {
            (0, 0) => "1".into(),
            (k, 0) => format!("w{}^{k}", self.order),
            (0, _) => label.to_string(),
            (k, _) => format!("w{}^{k}·{label}", self.order),
        }
    }
}

fn bare(values: &[(&str, Complex64)]) -> Vec<(String, Complex64)> {
    values.iter().map(|(l, v)| (format!("={l}"), *v)).collect()
}

/// One matched component: `e^{2πi·root/n}·factor`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Symbol {
    pub root: usize,
    pub factor: usize,
    pub error: f64,
}

/// Match of one vector, dephased so its first component is `1` and scaled
/// by `√d` so that unbiased components are unimodular.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorMatch {
    pub symbols: Vec<Option<Symbol>>,
}

impl VectorMatch {
    pub fn is_complete(&self) -> bool {
        self.symbols.iter().all(Option::is_some)
    }

    pub fn matched(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_some()).count()
    }

    /// True iff every component matched with the trivial factor.
    pub fn roots_only(&self) -> bool {
        self.symbols.iter().all(|s| matches!(s, Some(s) if s.factor == 0))
    }

    pub fn max_error(&self) -> f64 {
        self.symbols.iter().flatten().map(|s| s.error).fold(0.0, f64::max)
    }
}

/// Per-vector matches for a whole set.
#[derive(Clone, Debug)]
pub struct AlgebraicReport {
    pub alphabet: String,
    pub vectors: Vec<VectorMatch>,
}

impl AlgebraicReport {
    pub fn complete(&self) -> usize {
        self.vectors.iter().filter(|m| m.is_complete()).count()
    }

    /// Fraction of all components matched.
    pub fn coverage(&self) -> f64 {
        let total: usize = self.vectors.iter().map(|m| m.symbols.len()).sum();
        if total == 0 {
            return 1.0;
        }
        self.vectors.iter().map(VectorMatch::matched).sum::<usize>() as f64 / total as f64
    }
}

/// Matches the components of `v` against `alphabet` after dephasing.
pub fn match_vector<T: Real>(v: &StateVector<T>, alphabet: &Alphabet, tol: f64) -> VectorMatch {
    let comps: Vec<Complex64> = v
        .components()
        .iter()
        .map(|z| Complex64::new(z.re.as_f64(), z.im.as_f64()))
        .collect();
    let scale = (comps.len() as f64).sqrt();
    let first = comps.first().copied().unwrap_or(Complex64::new(1.0, 0.0));
    let phase = if first.norm() > 0.0 {
        first.conj() / first.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    VectorMatch {
        symbols: comps.iter().map(|&z| alphabet.locate(z * phase * scale, tol)).collect(),
    }
}

/// Matches every member of `set` at the default tolerance.
pub fn match_algebraic<T: Real>(set: &MUVectorSet<T>, alphabet: &Alphabet) -> AlgebraicReport {
    AlgebraicReport {
        alphabet: alphabet.name().to_string(),
        vectors: set
            .vectors()
            .iter()
            .map(|v| match_vector(v.vector(), alphabet, MATCH_TOL))
            .collect(),
    }
}

/// Nontrivial factors used by the dephased columns of `basis`, sorted and
/// deduplicated; `None` if some component is not in the alphabet.
pub fn factor_signature<T: Real>(basis: &OrthonormalBasis<T>, alphabet: &Alphabet, tol: f64) -> Option<Vec<usize>> {
    let mut used = Vec::new();
    for v in basis.vectors() {
        for s in match_vector(&v, alphabet, tol).symbols {
            let s = s?;
            if s.factor != 0 {
                used.push(s.factor);
            }
        }
    }
    used.sort_unstable();
    used.dedup();
    Some(used)
}

/// Groups bases by [`factor_signature`]; unmatched bases share one class.
pub fn signature_classes<T: Real>(bases: &[OrthonormalBasis<T>], alphabet: &Alphabet, tol: f64) -> Vec<usize> {
    let mut seen: Vec<Option<Vec<usize>>> = Vec::new();
    bases
        .iter()
        .map(|b| {
            let sig = factor_signature(b, alphabet, tol);
            seen.iter().position(|s| *s == sig).unwrap_or_else(|| {
                seen.push(sig);
                seen.len() - 1
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cis;

    #[test]
    fn constants_are_unimodular() {
        assert!((bjorck_number().norm() - 1.0).abs() < 1e-15);
        assert!((dita_number().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn locates_roots_and_products() {
        let alpha = Alphabet::bjorck();
        let a = bjorck_number();
        let w = |k: f64| Complex64::from_polar(1.0, std::f64::consts::TAU * k / 12.0);
        let s = alpha.locate(w(5.0) * a.conj(), 1e-12).unwrap();
        assert_eq!((s.root, alpha.factor_label(s.factor)), (5, "a*"));
        let s = alpha.locate(w(3.0), 1e-12).unwrap();
        assert_eq!((s.root, s.factor), (3, 0));
        assert!(alpha.locate(cis(0.1), 1e-8).is_none());
    }

    #[test]
    fn bare_values_admit_no_root_factor() {
        let alpha = Alphabet::bjorck_literal();
        let a = bjorck_number();
        assert!(alpha.locate(a, 1e-12).is_some());
        let w6 = Complex64::from_polar(1.0, std::f64::consts::TAU / 6.0);
        assert!(alpha.locate(a * w6, 1e-12).is_none());
        assert_eq!(alpha.render(&alpha.locate(a, 1e-12).unwrap()), "a");
    }

    #[test]
    fn gaussian_vector_needs_twelfth_roots() {
        let w = |k: f64| cis(std::f64::consts::TAU * k / 6.0);
        let i = num_complex::Complex::new(0.0, 1.0);
        let one = num_complex::Complex::new(1.0, 0.0);
        let v1 = StateVector::normalized(vec![one, i, w(4.0), i, one, i * w(4.0)]).unwrap();
        let sixth = match_vector(&v1, &Alphabet::roots(6), MATCH_TOL);
        assert_eq!(sixth.matched(), 3);
        let twelfth = match_vector(&v1, &Alphabet::roots(12), MATCH_TOL);
        assert!(twelfth.is_complete() && twelfth.roots_only());
    }

    #[test]
    fn dephasing_removes_global_phase() {
        let v = StateVector::normalized(
            (0..4)
                .map(|k| cis(0.37 + std::f64::consts::TAU * (k * k) as f64 / 8.0))
                .collect(),
        )
        .unwrap();
        let m = match_vector(&v, &Alphabet::roots(8), 1e-12);
        assert!(m.is_complete());
        assert_eq!(m.symbols[0].unwrap().root, 0);
    }
}

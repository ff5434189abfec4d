//! Phase-preserving amplitude imposition and the alternating fixed-point
//! iteration built from it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{OrthonormalBasis, ProbabilityDistribution, StateVector};
use crate::scalar::{Complex, Real};

/// Overlaps at or below this modulus count as zero; their phase is taken as 1.
pub const ZERO_TOL: f64 = 1e-14;

/// A basis together with the outcome distribution a state must reproduce.
#[derive(Clone, Debug)]
pub struct MeasurementConstraint<T> {
    basis: OrthonormalBasis<T>,
    target: ProbabilityDistribution<T>,
    amplitudes: Vec<T>,
}

impl<T: Real> MeasurementConstraint<T> {
    pub fn new(basis: OrthonormalBasis<T>, target: ProbabilityDistribution<T>) -> Result<Self> {
        if basis.dim() != target.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: target.len(),
            });
        }
        let amplitudes = target.weights().iter().map(|p| p.sqrt()).collect();
        Ok(Self {
            basis,
            target,
            amplitudes,
        })
    }

    /// Uniform target: the constraint satisfied by every vector unbiased to `basis`.
    pub fn uniform(basis: OrthonormalBasis<T>) -> Self {
        let d = basis.dim();
        Self::new(basis, ProbabilityDistribution::uniform(d)).expect("matching dimension")
    }

    pub fn basis(&self) -> &OrthonormalBasis<T> {
        &self.basis
    }

    pub fn target(&self) -> &ProbabilityDistribution<T> {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// Uniform constraints for every basis in `bases`.
pub fn uniform_constraints<T: Real>(bases: &[OrthonormalBasis<T>]) -> Vec<MeasurementConstraint<T>> {
    bases.iter().cloned().map(MeasurementConstraint::uniform).collect()
}

/// Iteration limits and thresholds.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// A run counts as converged once the distance to the targets drops below this.
    pub convergence_threshold: f64,
    /// Iteration continues until successive iterates are this close.
    pub polish_threshold: f64,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            convergence_threshold: 0.01,
            polish_threshold: 1e-12,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(rng_seed: u64) -> Self {
        Self {
            rng_seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iterations > 0
            && self.convergence_threshold > 0.0
            && self.polish_threshold > 0.0
            && self.polish_threshold <= self.convergence_threshold;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "solver config needs max_iterations > 0 and 0 < polish_threshold <= convergence_threshold, got {self:?}"
            )));
        }
        Ok(())
    }

    /// RNG for the seed with the given index. Streams are independent, so
    /// runs can be distributed over threads without changing results.
    pub fn rng_for(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(index);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIterations,
}

/// Result of one run of the iteration.
#[derive(Clone, Debug)]
pub struct IterationOutcome<T> {
    pub status: Status,
    pub state: StateVector<T>,
    /// Final distributional distance to the targets.
    pub distance: T,
    /// Number of full cycles performed.
    pub iterations: usize,
    /// Cycle at which the distance first fell below the convergence threshold.
    pub converged_at: Option<usize>,
    /// Whether successive iterates reached the polish threshold.
    pub polished: bool,
}

impl<T> IterationOutcome<T> {
    pub fn is_converged(&self) -> bool {
        self.status == Status::Converged
    }
}

fn impose_in_place<T: Real>(c: &MeasurementConstraint<T>, psi: &mut [Complex<T>], scratch: &mut [Complex<T>]) {
    let zero_tol = T::lit(ZERO_TOL);
    c.basis.coefficients_into(psi, scratch);
    for (coef, &amp) in scratch.iter_mut().zip(&c.amplitudes) {
        let r = coef.norm();
        *coef = if r <= zero_tol {
            Complex::new(amp, T::zero())
        } else {
            *coef * (amp / r)
        };
    }
    c.basis.synthesize_into(scratch, psi);
    let n = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if n > T::zero() {
        for z in psi.iter_mut() {
            *z = *z / n;
        }
    }
}

/// Replaces the moduli of the expansion coefficients of `psi` in the
/// constraint's basis by the target amplitudes, keeping their phases.
pub fn impose<T: Real>(c: &MeasurementConstraint<T>, psi: &StateVector<T>) -> Result<StateVector<T>> {
    check_dim(c.dim(), psi.dim())?;
    let mut out = psi.components().to_vec();
    let mut scratch = out.clone();
    impose_in_place(c, &mut out, &mut scratch);
    Ok(StateVector::from_raw(out))
}

/// Applies [`impose`] for each constraint in order.
pub fn cycle<T: Real>(constraints: &[MeasurementConstraint<T>], psi: &StateVector<T>) -> Result<StateVector<T>> {
    let d = check_constraints(constraints)?;
    check_dim(d, psi.dim())?;
    let mut out = psi.components().to_vec();
    let mut scratch = out.clone();
    for c in constraints {
        impose_in_place(c, &mut out, &mut scratch);
    }
    Ok(StateVector::from_raw(out))
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn check_constraints<T: Real>(constraints: &[MeasurementConstraint<T>]) -> Result<usize> {
    let first = constraints.first().ok_or(Error::EmptyConstraints)?;
    let d = first.dim();
    for c in constraints {
        check_dim(d, c.dim())?;
    }
    Ok(d)
}

/// Haar-random unit vector: i.i.d. standard complex Gaussians, normalized.
pub fn haar_state<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector<T> {
    loop {
        let comps: Vec<Complex<T>> = (0..dim)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        if let Ok(v) = StateVector::normalized(comps) {
            return v;
        }
    }
}

/// Reusable buffers for repeated runs in one dimension.
struct Workspace<T> {
    psi: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
    moduli: Vec<T>,
    previous: Vec<T>,
}

impl<T: Real> Workspace<T> {
    fn new(d: usize, m: usize) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        Self {
            psi: vec![zero; d],
            scratch: vec![zero; d],
            moduli: vec![T::zero(); d * m],
            previous: vec![T::zero(); d * m],
        }
    }

    /// Fills `moduli` with `|⟨φ_k|ψ⟩|` for every constraint basis.
    fn measure(&mut self, constraints: &[MeasurementConstraint<T>]) {
        let d = self.psi.len();
        for (j, c) in constraints.iter().enumerate() {
            c.basis.coefficients_into(&self.psi, &mut self.scratch);
            for k in 0..d {
                self.moduli[j * d + k] = self.scratch[k].norm();
            }
        }
    }

    fn target_distance(&self, constraints: &[MeasurementConstraint<T>]) -> T {
        let d = self.psi.len();
        let mut acc = T::zero();
        for (j, c) in constraints.iter().enumerate() {
            for k in 0..d {
                let e = self.moduli[j * d + k] - c.amplitudes[k];
                acc = acc + e * e;
            }
        }
        (acc / T::from_count(constraints.len())).sqrt()
    }

    fn step_distance(&self, m: usize) -> T {
        let acc: T = self
            .moduli
            .iter()
            .zip(&self.previous)
            .map(|(a, b)| (*a - *b) * (*a - *b))
            .sum();
        (acc / T::from_count(m)).sqrt()
    }
}

/// Runs the composite iteration from `seed_state`, or from a Haar-random seed
/// drawn from `config.rng_seed` when none is given.
pub fn iterate<T: Real>(
    constraints: &[MeasurementConstraint<T>],
    config: &SolverConfig,
    seed_state: Option<&StateVector<T>>,
) -> Result<IterationOutcome<T>> {
    let d = check_constraints(constraints)?;
    config.validate()?;
    let seed = match seed_state {
        Some(s) => {
            check_dim(d, s.dim())?;
            s.clone()
        }
        None => haar_state(d, &mut config.rng_for(0)),
    };
    Ok(run(constraints, config, &seed))
}

pub(crate) fn run<T: Real>(
    constraints: &[MeasurementConstraint<T>],
    config: &SolverConfig,
    seed: &StateVector<T>,
) -> IterationOutcome<T> {
    let d = seed.dim();
    let m = constraints.len();
    let threshold = T::lit(config.convergence_threshold);
    let polish = T::lit(config.polish_threshold);
    let mut ws = Workspace::new(d, m);
    ws.psi.copy_from_slice(seed.components());
    ws.measure(constraints);
    let mut converged_at = None;
    let mut polished = false;
    let mut iterations = 0;
    let mut distance = ws.target_distance(constraints);
    while iterations < config.max_iterations {
        std::mem::swap(&mut ws.moduli, &mut ws.previous);
        for c in constraints {
            impose_in_place(c, &mut ws.psi, &mut ws.scratch);
        }
        iterations += 1;
        ws.measure(constraints);
        distance = ws.target_distance(constraints);
        if converged_at.is_none() && distance < threshold {
            converged_at = Some(iterations);
        }
        if converged_at.is_some() && ws.step_distance(m) < polish {
            polished = true;
            break;
        }
    }
    let status = if distance < threshold {
        Status::Converged
    } else {
        Status::MaxIterations
    };
    IterationOutcome {
        status,
        state: StateVector::from_raw(ws.psi),
        distance,
        iterations,
        converged_at,
        polished,
    }
}

/// `√(Σ_k (|⟨φ_k|u⟩| − |⟨φ_k|v⟩|)²)`.
pub fn hellinger<T: Real>(basis: &OrthonormalBasis<T>, u: &StateVector<T>, v: &StateVector<T>) -> Result<T> {
    let cu = basis.coefficients(u)?;
    let cv = basis.coefficients(v)?;
    Ok(cu
        .iter()
        .zip(&cv)
        .map(|(a, b)| {
            let e = a.norm() - b.norm();
            e * e
        })
        .sum::<T>()
        .sqrt())
}

/// Root mean square of [`hellinger`] over `bases`.
pub fn distributional<T: Real>(bases: &[OrthonormalBasis<T>], u: &StateVector<T>, v: &StateVector<T>) -> Result<T> {
    if bases.is_empty() {
        return Err(Error::EmptyConstraints);
    }
    let mut acc = T::zero();
    for b in bases {
        let h = hellinger(b, u, v)?;
        acc = acc + h * h;
    }
    Ok((acc / T::from_count(bases.len())).sqrt())
}

/// Distributional distance of `psi` to the targets of `constraints`.
pub fn target_distance<T: Real>(constraints: &[MeasurementConstraint<T>], psi: &StateVector<T>) -> Result<T> {
    let d = check_constraints(constraints)?;
    check_dim(d, psi.dim())?;
    let mut ws = Workspace::new(d, constraints.len());
    ws.psi.copy_from_slice(psi.components());
    ws.measure(constraints);
    Ok(ws.target_distance(constraints))
}

/// Distance of `psi` from being unbiased to both bases of `pair`:
/// `√(2 − (1/√d)(Σ_k|⟨φ_k|ψ⟩| + Σ_l|⟨ϕ_l|ψ⟩|))` for unit `psi`.
///
/// Evaluated as the equivalent sum of squared amplitude errors, which does
/// not lose precision when the distance is tiny.
pub fn mu_distance<T: Real>(pair: (&OrthonormalBasis<T>, &OrthonormalBasis<T>), psi: &StateVector<T>) -> Result<T> {
    let d = pair.0.dim();
    check_dim(d, pair.1.dim())?;
    check_dim(d, psi.dim())?;
    let amp = T::one() / T::from_count(d).sqrt();
    let mut acc = T::zero();
    for b in [pair.0, pair.1] {
        for c in b.coefficients(psi)? {
            let e = c.norm() - amp;
            acc = acc + e * e;
        }
    }
    Ok((acc / T::lit(2.0)).sqrt())
}

//! From raw solver output to structure: deduplicated vector sets, third
//! bases, triplet extension, displacement orbits and algebraic matching.

mod algebraic;
mod cliques;
mod orbits;

pub use algebraic::{
    bjorck_number, dita_number, factor_signature, match_algebraic, match_vector, signature_classes, AlgebraicReport,
    Alphabet, Symbol, VectorMatch, MATCH_TOL,
};
pub use cliques::{hadamard_classes, pair_automorphisms, third_bases, triplet_classes, Triplet};
pub use orbits::{
    classify_orbits, displacement, displacement_eigen_index, orbit, standard_tau, weyl_triplet, DisplacementIndex,
    OrbitPartition,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dot_conj, mu_deviation, OrthonormalBasis, StateVector, STRUCTURAL_TOL};
use crate::scalar::{unit_phase, Complex, Real};
use crate::solver::{self, haar_state, uniform_constraints, MeasurementConstraint, SolverConfig};

/// Two vectors are the same ray when `|⟨u|v⟩| > 1 − DEDUP_TOL`.
pub const DEDUP_TOL: f64 = 1e-8;

/// Default orthogonality threshold for third-basis cliques.
pub const ORTHO_TOL: f64 = 1e-8;

/// Seeds are run in blocks of this size; results are merged in seed order.
const BATCH: usize = 64;

/// A unit vector with its global phase fixed: the first component whose
/// modulus is not negligible is real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalVector<T> {
    v: StateVector<T>,
}

impl<T: Real> CanonicalVector<T> {
    pub fn new(v: &StateVector<T>) -> Self {
        let comps = v.components();
        let max = comps.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        let cutoff = max * T::lit(1e-6);
        let Some(pivot) = comps.iter().position(|z| z.norm() > cutoff) else {
            return Self { v: v.clone() };
        };
        let phase = unit_phase(comps[pivot], T::zero()).unwrap_or(Complex::new(T::one(), T::zero()));
        let mut out = v.scaled(phase.conj()).into_components();
        out[pivot] = Complex::new(comps[pivot].norm(), T::zero());
        Self {
            v: StateVector::from_raw(out),
        }
    }

    pub fn vector(&self) -> &StateVector<T> {
        &self.v
    }

    pub fn components(&self) -> &[Complex<T>] {
        self.v.components()
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &Self) -> T {
        dot_conj(self.components(), other.components()).norm()
    }

    pub fn conj(&self) -> Self {
        Self::new(&self.v.conj())
    }
}

/// Counters describing how a vector set was produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CollectStats {
    pub seeds_run: usize,
    pub converged: usize,
    /// Converged runs whose state was not accurate enough to keep.
    pub rejected: usize,
    pub stopped_early: bool,
}

/// Distinct rays with hit counts.
#[derive(Clone, Debug)]
pub struct MUVectorSet<T> {
    dim: usize,
    vectors: Vec<CanonicalVector<T>>,
    hits: Vec<usize>,
    /// Seed index of the first hit of each vector.
    first_seen: Vec<usize>,
    dedup_tol: T,
    pub stats: CollectStats,
}

impl<T: Real> MUVectorSet<T> {
    pub fn new(dim: usize) -> Self {
        Self::with_tolerance(dim, T::lit(DEDUP_TOL))
    }

    pub fn with_tolerance(dim: usize, dedup_tol: T) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
            hits: Vec::new(),
            first_seen: Vec::new(),
            dedup_tol,
            stats: CollectStats::default(),
        }
    }

    /// Builds a set from explicit vectors, one hit each.
    pub fn from_vectors(dim: usize, vectors: &[StateVector<T>]) -> Result<Self> {
        let mut set = Self::new(dim);
        for (i, v) in vectors.iter().enumerate() {
            set.insert_at(v, 1, i)?;
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CanonicalVector<T>] {
        &self.vectors
    }

    pub fn hits(&self) -> &[usize] {
        &self.hits
    }

    pub fn first_seen(&self) -> &[usize] {
        &self.first_seen
    }

    pub fn dedup_tol(&self) -> T {
        self.dedup_tol
    }

    /// Index of the member equal to `v` up to phase.
    pub fn position(&self, v: &CanonicalVector<T>) -> Option<usize> {
        let limit = T::one() - self.dedup_tol;
        self.vectors.iter().position(|u| u.overlap(v) > limit)
    }

    pub fn contains(&self, v: &StateVector<T>) -> bool {
        self.position(&CanonicalVector::new(v)).is_some()
    }

    /// Adds `count` hits of `v`. Returns true when `v` is new.
    pub fn insert(&mut self, v: &StateVector<T>, count: usize) -> Result<bool> {
        let at = self.first_seen.iter().copied().max().map_or(0, |m| m + 1);
        self.insert_at(v, count, at)
    }

    fn insert_at(&mut self, v: &StateVector<T>, count: usize, seed: usize) -> Result<bool> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        let c = CanonicalVector::new(v);
        match self.position(&c) {
            Some(i) => {
                self.hits[i] += count;
                self.first_seen[i] = self.first_seen[i].min(seed);
                Ok(false)
            }
            None => {
                self.vectors.push(c);
                self.hits.push(count);
                self.first_seen.push(seed);
                Ok(true)
            }
        }
    }

    /// Merges `other` into `self`, summing hits. Membership and hit totals do
    /// not depend on merge order.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        for ((v, &h), &s) in other.vectors.iter().zip(&other.hits).zip(&other.first_seen) {
            self.insert_at(v.vector(), h, s)?;
        }
        self.stats.seeds_run += other.stats.seeds_run;
        self.stats.converged += other.stats.converged;
        self.stats.rejected += other.stats.rejected;
        Ok(())
    }

    /// Members ordered by first appearance; useful for order-independent comparison.
    pub fn sorted_by_first_seen(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_key(|&i| self.first_seen[i]);
        idx
    }
}

/// Collection options beyond the solver configuration.
#[derive(Clone, Debug)]
pub struct CollectOptions {
    /// Index of the first seed; lets independent runs share one `rng_seed`.
    pub seed_offset: u64,
    /// Apply the saturation stopping rule.
    pub early_stop: bool,
    /// Keep a converged state only if its distance to the targets is below this.
    pub accept_distance: f64,
}

impl Default for CollectOptions {
    fn default() -> Self {
        Self {
            seed_offset: 0,
            early_stop: true,
            accept_distance: 1e-9,
        }
    }
}

/// Number of consecutive seeds without a new vector after which collection stops.
pub fn saturation_window(set_len: usize) -> usize {
    1000.max(20 * set_len)
}

/// Runs the solver from `n_seeds` Haar-random seeds and deduplicates the
/// converged states. `visit` sees each set after a seed is merged and can
/// stop collection by returning false.
pub fn collect_with<T: Real>(
    constraints: &[MeasurementConstraint<T>],
    n_seeds: usize,
    config: &SolverConfig,
    options: &CollectOptions,
    mut visit: impl FnMut(&MUVectorSet<T>, bool) -> bool,
) -> Result<MUVectorSet<T>> {
    config.validate()?;
    let d = constraints.first().ok_or(Error::EmptyConstraints)?.dim();
    let accept = T::lit(options.accept_distance);
    let mut set = MUVectorSet::new(d);
    let mut since_new = 0usize;
    let mut start = 0usize;
    while start < n_seeds {
        let end = (start + BATCH).min(n_seeds);
        let outcomes: Vec<_> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = config.rng_for(options.seed_offset + i as u64);
                let seed = haar_state::<T, _>(d, &mut rng);
                solver::run(constraints, config, &seed)
            })
            .collect();
        for (k, out) in outcomes.into_iter().enumerate() {
            let i = start + k;
            set.stats.seeds_run += 1;
            let mut is_new = false;
            if out.is_converged() {
                set.stats.converged += 1;
                if out.polished && out.distance <= accept {
                    is_new = set.insert_at(&out.state, 1, i)?;
                } else {
                    set.stats.rejected += 1;
                }
            }
            since_new = if is_new { 0 } else { since_new + 1 };
            if !visit(&set, is_new) {
                return Ok(set);
            }
            if options.early_stop && since_new >= saturation_window(set.len()) {
                set.stats.stopped_early = true;
                return Ok(set);
            }
        }
        start = end;
    }
    Ok(set)
}

/// Collects vectors unbiased to both bases of `pair`.
pub fn collect<T: Real>(
    pair: (&OrthonormalBasis<T>, &OrthonormalBasis<T>),
    n_seeds: usize,
    config: &SolverConfig,
) -> Result<MUVectorSet<T>> {
    check_unbiased(pair.0, pair.1)?;
    let constraints = uniform_constraints(&[pair.0.clone(), pair.1.clone()]);
    collect_with(&constraints, n_seeds, config, &CollectOptions::default(), |_, _| true)
}

pub(crate) fn check_unbiased<T: Real>(a: &OrthonormalBasis<T>, b: &OrthonormalBasis<T>) -> Result<()> {
    let dev = mu_deviation(a, b)?;
    if dev > T::lit(STRUCTURAL_TOL) {
        return Err(Error::NotMutuallyUnbiased(dev.as_f64()));
    }
    Ok(())
}

/// Searches for vectors unbiased to all three bases of `t`.
pub fn extend_triplet<T: Real>(t: &Triplet<T>, n_seeds: usize, config: &SolverConfig) -> Result<MUVectorSet<T>> {
    let constraints = uniform_constraints(&t.bases());
    collect_with(&constraints, n_seeds, config, &CollectOptions::default(), |_, _| true)
}

/// Like [`extend_triplet`] but stops at the first vector found.
pub fn find_extension<T: Real>(
    t: &Triplet<T>,
    n_seeds: usize,
    config: &SolverConfig,
) -> Result<Option<StateVector<T>>> {
    let constraints = uniform_constraints(&t.bases());
    let options = CollectOptions {
        early_stop: false,
        ..CollectOptions::default()
    };
    let set = collect_with(&constraints, n_seeds, config, &options, |s, _| s.is_empty())?;
    Ok(set.vectors().first().map(|v| v.vector().clone()))
}

//! Parameter scans over the catalog: for every sampled point, look for MU
//! vectors of `{I, H(x)}`, try to close a third basis and try to extend it.

use std::f64::consts::{FRAC_PI_2, PI};

use log::{debug, info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{collect_with, third_bases, CollectOptions, MUVectorSet, Triplet, ORTHO_TOL};
use crate::catalog::{bjorck_threshold, FamilyId, FamilyPoint};
use crate::error::{Error, Result};
use crate::linalg::OrthonormalBasis;
use crate::scalar::Real;
use crate::solver::{uniform_constraints, SolverConfig};

/// How points are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// Cell centres of a regular grid, `resolution` cells per free axis.
    Grid,
    /// `resolution` uniform samples of the domain.
    Random,
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub family: FamilyId,
    pub mode: SweepMode,
    /// Cells per free axis in grid mode, number of points in random mode.
    pub resolution: usize,
    pub seeds_per_point: usize,
    /// Seeds spent looking for a vector unbiased to a found triplet; 0 skips
    /// the extension test.
    pub extension_seeds: usize,
    pub solver: SolverConfig,
    /// One entry per family parameter; `Some` pins that parameter.
    pub fixed: Vec<Option<f64>>,
    /// Karlsson two-parameter family only: scan the triangle
    /// `0 ≤ x2 ≤ x1 ≤ π/2` instead of the full square.
    pub reduced: bool,
    /// Keep collecting after the first third basis appears.
    pub exhaustive: bool,
}

impl SweepSpec {
    pub fn new(family: FamilyId, mode: SweepMode, resolution: usize) -> Self {
        Self {
            family,
            mode,
            resolution,
            seeds_per_point: 200,
            extension_seeds: 200,
            solver: SolverConfig::default(),
            fixed: Vec::new(),
            reduced: false,
            exhaustive: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if self.resolution == 0 || self.seeds_per_point == 0 {
            return Err(Error::InvalidConfig(
                "resolution and seeds_per_point must be positive".into(),
            ));
        }
        if !self.fixed.is_empty() && self.fixed.len() != self.family.arity() {
            return Err(Error::WrongArity {
                family: self.family.code(),
                expected: self.family.arity(),
                found: self.fixed.len(),
            });
        }
        if self.reduced && self.family != FamilyId::Karlsson2 {
            return Err(Error::InvalidConfig(format!("no reduced domain for {}", self.family)));
        }
        if self.reduced && self.fixed.iter().any(Option::is_some) {
            return Err(Error::InvalidConfig("reduced scans cannot pin parameters".into()));
        }
        Ok(())
    }

    fn fixed(&self, axis: usize) -> Option<f64> {
        self.fixed.get(axis).copied().flatten()
    }
}

/// Outcome at one sampled point.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub index: usize,
    /// Parameters as sampled, before reduction to the fundamental domain.
    pub params: Vec<f64>,
    /// Grid coordinates, one per parameter; empty in random mode.
    pub cell: Vec<usize>,
    pub n_vectors: usize,
    pub n_third_bases: usize,
    pub triplet_found: bool,
    pub extension_found: bool,
    pub n_converged: usize,
    pub n_seeds: usize,
    /// The matrix could not be built here (singular parameter); no search ran.
    pub skipped: bool,
}

/// Sub-intervals making up the domain of each parameter.
fn domains(family: FamilyId) -> Vec<Vec<(f64, f64)>> {
    let s0 = bjorck_threshold();
    match family {
        FamilyId::Fourier(_) | FamilyId::Tao6 => vec![],
        FamilyId::FourierFamily6 => vec![vec![(-PI, PI)]; 2],
        FamilyId::Dita6 => vec![vec![(-0.125, 0.125)]],
        FamilyId::Bjorck6 => vec![vec![(-PI, -s0), (s0, PI)]],
        FamilyId::Matolcsi6 => vec![vec![(FRAC_PI_2, PI), (1.5 * PI, 2.0 * PI)]],
        FamilyId::Karlsson2 => vec![vec![(-FRAC_PI_2, FRAC_PI_2)]; 2],
        FamilyId::Karlsson3 => vec![vec![(0.0, PI)]; 3],
    }
}

/// `n` cell centres spread over a union of intervals in proportion to length.
fn axis_grid(parts: &[(f64, f64)], n: usize) -> Vec<f64> {
    let total: f64 = parts.iter().map(|(a, b)| b - a).sum();
    let mut out = Vec::with_capacity(n);
    let mut assigned = 0;
    for (k, &(a, b)) in parts.iter().enumerate() {
        let m = if k + 1 == parts.len() {
            n - assigned
        } else {
            ((b - a) / total * n as f64).round() as usize
        };
        assigned += m;
        let h = (b - a) / m.max(1) as f64;
        out.extend((0..m).map(|i| a + (i as f64 + 0.5) * h));
    }
    out
}

fn sample_axis(parts: &[(f64, f64)], rng: &mut impl Rng) -> f64 {
    let total: f64 = parts.iter().map(|(a, b)| b - a).sum();
    let mut u = rng.random::<f64>() * total;
    for &(a, b) in parts {
        if u < b - a {
            return a + u;
        }
        u -= b - a;
    }
    parts.last().map_or(0.0, |&(_, b)| b)
}

/// Sampled points as `(params, cell)` in scan order.
pub fn sample_points(spec: &SweepSpec) -> Result<Vec<(Vec<f64>, Vec<usize>)>> {
    spec.validate()?;
    let doms = domains(spec.family);
    if spec.reduced {
        let axis = axis_grid(&[(0.0, FRAC_PI_2)], spec.resolution);
        let mut pts = Vec::new();
        for (i, &x1) in axis.iter().enumerate() {
            for (j, &x2) in axis.iter().enumerate().take(i + 1) {
                pts.push((vec![x1, x2], vec![i, j]));
            }
        }
        return Ok(pts);
    }
    match spec.mode {
        SweepMode::Grid => {
            let axes: Vec<Vec<f64>> = doms
                .iter()
                .enumerate()
                .map(|(k, parts)| match spec.fixed(k) {
                    Some(v) => vec![v],
                    None => axis_grid(parts, spec.resolution),
                })
                .collect();
            let mut pts = vec![(Vec::new(), Vec::new())];
            for axis in &axes {
                pts = pts
                    .into_iter()
                    .flat_map(|(p, c)| {
                        axis.iter().enumerate().map(move |(i, &x)| {
                            let mut p = p.clone();
                            let mut c = c.clone();
                            p.push(x);
                            c.push(i);
                            (p, c)
                        })
                    })
                    .collect();
            }
            Ok(pts)
        }
        SweepMode::Random => {
            let n = if doms.is_empty() { 1 } else { spec.resolution };
            Ok((0..n)
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(spec.solver.rng_seed ^ POINT_SALT);
                    rng.set_stream(i as u64);
                    let p = doms
                        .iter()
                        .enumerate()
                        .map(|(k, parts)| spec.fixed(k).unwrap_or_else(|| sample_axis(parts, &mut rng)))
                        .collect();
                    (p, Vec::new())
                })
                .collect())
        }
    }
}

// Seed streams: the point index occupies the high 32 bits, seeds the low 31,
// and bit 31 separates extension seeds from pair seeds. Random points come
// from a differently keyed generator.
const EXTENSION_STREAM: u64 = 1 << 31;
const POINT_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

fn point_stream(index: usize) -> u64 {
    (index as u64) << 32
}

/// Runs the search at every sampled point. Records come back in scan order
/// and do not depend on the number of worker threads.
pub fn run_sweep<T: Real>(spec: &SweepSpec) -> Result<Vec<ScanRecord>> {
    let points = sample_points(spec)?;
    info!("sweep {}: {} points", spec.family, points.len());
    points
        .into_par_iter()
        .enumerate()
        .map(|(index, (params, cell))| scan_point::<T>(spec, index, params, cell))
        .collect()
}

/// The search at a single point. Errors are configuration errors; numerical
/// failures mark the record as skipped.
pub fn scan_point<T: Real>(spec: &SweepSpec, index: usize, params: Vec<f64>, cell: Vec<usize>) -> Result<ScanRecord> {
    let mut record = ScanRecord {
        index,
        params,
        cell,
        n_vectors: 0,
        n_third_bases: 0,
        triplet_found: false,
        extension_found: false,
        n_converged: 0,
        n_seeds: 0,
        skipped: false,
    };
    let pair = match FamilyPoint::new(spec.family, &record.params)
        .and_then(|p| p.matrix::<T>())
        .and_then(|h| OrthonormalBasis::from_hadamard(&h))
    {
        Ok(b) => b,
        Err(e) if e.is_numerical() || matches!(e, Error::ParameterOutOfRange { .. }) => {
            debug!("point {index} {:?} skipped: {e}", record.params);
            record.skipped = true;
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    let std = OrthonormalBasis::standard(pair.dim());
    let constraints = uniform_constraints(&[std.clone(), pair.clone()]);
    let options = CollectOptions {
        seed_offset: point_stream(index),
        early_stop: false,
        ..CollectOptions::default()
    };
    let ortho = T::lit(ORTHO_TOL);
    let mut thirds: Vec<OrthonormalBasis<T>> = Vec::new();
    let set: MUVectorSet<T> = collect_with(
        &constraints,
        spec.seeds_per_point,
        &spec.solver,
        &options,
        |set, is_new| {
            if is_new && set.len() >= set.dim() {
                thirds = third_bases(set, ortho);
            }
            spec.exhaustive || thirds.is_empty()
        },
    )?;
    record.n_vectors = set.len();
    record.n_converged = set.stats.converged;
    record.n_seeds = set.stats.seeds_run;
    record.n_third_bases = thirds.len();
    record.triplet_found = !thirds.is_empty();
    if record.triplet_found && spec.extension_seeds > 0 {
        let triplet = Triplet::new(std, pair, thirds.swap_remove(0))?;
        let constraints = uniform_constraints(&triplet.bases());
        let options = CollectOptions {
            seed_offset: point_stream(index) | EXTENSION_STREAM,
            early_stop: false,
            ..CollectOptions::default()
        };
        let ext = collect_with(&constraints, spec.extension_seeds, &spec.solver, &options, |s, _| {
            s.is_empty()
        })?;
        record.extension_found = !ext.is_empty();
        if record.extension_found {
            warn!(
                "{} at {:?}: found a vector unbiased to a whole triplet",
                spec.family, record.params
            );
        }
    }
    info!(
        "point {index} {:?}: {} vectors, {} third bases",
        record.params, record.n_vectors, record.n_third_bases
    );
    Ok(record)
}

/// One symmetry comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryCheck {
    pub name: &'static str,
    /// Point pairs compared (both ends present and not skipped).
    pub compared: usize,
    pub mismatches: usize,
}

impl SymmetryCheck {
    pub fn mismatch_fraction(&self) -> f64 {
        if self.compared == 0 {
            0.0
        } else {
            self.mismatches as f64 / self.compared as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub family: FamilyId,
    pub checks: Vec<SymmetryCheck>,
}

impl SymmetryReport {
    pub fn worst_fraction(&self) -> f64 {
        self.checks
            .iter()
            .map(SymmetryCheck::mismatch_fraction)
            .fold(0.0, f64::max)
    }
}

type CellMap = fn(&[usize], &[usize]) -> Vec<usize>;

/// Compares `triplet_found` at grid points related by the exact symmetries
/// of the family.
pub fn symmetry_validate(records: &[ScanRecord], family: FamilyId) -> Result<SymmetryReport> {
    if records
        .iter()
        .any(|r| r.cell.len() != family.arity() || r.cell.is_empty())
    {
        return Err(Error::NonGrid(
            "records lack grid coordinates for every parameter".into(),
        ));
    }
    let arity = family.arity();
    let shape: Vec<usize> = (0..arity)
        .map(|k| records.iter().map(|r| r.cell[k] + 1).max().unwrap_or(0))
        .collect();
    let maps: Vec<(&'static str, CellMap)> = match family {
        FamilyId::Karlsson2 => vec![
            ("x1 -> -x1", |c, s| vec![s[0] - 1 - c[0], c[1]]),
            ("x2 -> -x2", |c, s| vec![c[0], s[1] - 1 - c[1]]),
            ("(x1, x2) -> (-x1, -x2)", |c, s| vec![s[0] - 1 - c[0], s[1] - 1 - c[1]]),
            ("(x1, x2) -> (x2, x1)", |c, _| vec![c[1], c[0]]),
        ],
        FamilyId::Matolcsi6 => vec![("t -> t + pi", |c, s| vec![(c[0] + s[0] / 2) % s[0]])],
        _ => return Err(Error::NoSymmetries(family.code())),
    };
    if family == FamilyId::Karlsson2 && shape[0] != shape[1] {
        return Err(Error::NonGrid(format!("grid {shape:?} is not square")));
    }
    if family == FamilyId::Matolcsi6 && !shape[0].is_multiple_of(2) {
        return Err(Error::NonGrid(format!(
            "{} cells cannot pair the two branches",
            shape[0]
        )));
    }
    let mut lookup = vec![None; shape.iter().product()];
    let flat = |c: &[usize]| c.iter().zip(&shape).fold(0, |acc, (&i, &n)| acc * n + i);
    for r in records {
        if !r.skipped {
            lookup[flat(&r.cell)] = Some(r.triplet_found);
        }
    }
    let checks = maps
        .into_iter()
        .map(|(name, map)| {
            let (mut compared, mut mismatches) = (0, 0);
            for r in records.iter().filter(|r| !r.skipped) {
                if let Some(other) = lookup[flat(&map(&r.cell, &shape))] {
                    compared += 1;
                    if other != r.triplet_found {
                        mismatches += 1;
                    }
                }
            }
            SymmetryCheck {
                name,
                compared,
                mismatches,
            }
        })
        .collect();
    Ok(SymmetryReport { family, checks })
}

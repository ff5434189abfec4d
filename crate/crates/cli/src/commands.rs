use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use mubforge_core::analysis::{
    classify_orbits, collect, displacement_eigen_index, extend_triplet, third_bases, MUVectorSet, Triplet, ORTHO_TOL,
};
use mubforge_core::catalog::{find_equivalence, FamilyId, FamilyPoint};
use mubforge_core::io;
use mubforge_core::linalg::{is_hadamard, Matrix, OrthonormalBasis, STRUCTURAL_TOL};
use mubforge_core::scalar::Complex;
use mubforge_core::solver::SolverConfig;
use mubforge_core::sweep::{run_sweep, symmetry_validate, ScanRecord, SweepMode, SweepSpec};

use crate::{Cli, Command, FamilyArgs};

pub fn run(cli: &Cli) -> Result<String> {
    let config = SolverConfig::with_seed(cli.rng);
    match &cli.command {
        Command::Catalog { family, verify } => catalog(cli.json, family, *verify),
        Command::MuSearch { family, seeds, out } => mu_search(cli.json, family, *seeds, &config, out.as_deref()),
        Command::Triplets {
            input,
            family,
            params,
            out,
        } => triplets(cli.json, input, family.as_deref(), params, out.as_deref()),
        Command::Extend { triplet, seeds, out } => extend(cli.json, triplet, *seeds, &config, out.as_deref()),
        Command::Orbits { input } => orbits(cli.json, input),
        Command::Sweep {
            family,
            grid,
            random,
            seeds_per_point,
            extension_seeds,
            reduced,
            fixed,
            exhaustive,
            out,
            bitmap,
        } => {
            let family: FamilyId = family.parse()?;
            let (mode, resolution) = match (grid, random) {
                (_, Some(n)) => (SweepMode::Random, *n),
                (Some(n), None) => (SweepMode::Grid, *n),
                (None, None) => (SweepMode::Grid, 64),
            };
            let mut spec = SweepSpec::new(family, mode, resolution);
            spec.seeds_per_point = *seeds_per_point;
            spec.extension_seeds = *extension_seeds;
            spec.solver = config;
            spec.reduced = *reduced;
            spec.exhaustive = *exhaustive;
            if let Some(fixed) = fixed {
                spec.fixed = parse_fixed(fixed)?;
            }
            sweep(cli.json, &spec, out.as_deref(), bitmap.as_deref())
        }
        Command::SymmetryCheck { input } => symmetry_check(cli.json, input),
        Command::Equivalence { a, b, tol } => equivalence(cli.json, a, b, *tol),
    }
}

fn parse_params(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("malformed parameter '{s}'")))
        .collect()
}

fn parse_fixed(text: &str) -> Result<Vec<Option<f64>>> {
    text.split(',')
        .map(str::trim)
        .map(|s| match s {
            "" | "_" => Ok(None),
            s => s
                .parse::<f64>()
                .map(Some)
                .with_context(|| format!("malformed fixed value '{s}'")),
        })
        .collect()
}

fn point(args: &FamilyArgs) -> Result<FamilyPoint> {
    let family: FamilyId = args.family.parse()?;
    Ok(FamilyPoint::new(family, &parse_params(&args.params)?)?)
}

fn complex_json(z: Complex<f64>) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &Matrix<f64>) -> Value {
    Value::Array(
        (0..m.dim())
            .map(|r| Value::Array(m.row(r).iter().map(|&z| complex_json(z)).collect()))
            .collect(),
    )
}

fn render(json: bool, doc: Value, text: String) -> Result<String> {
    if json {
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    } else {
        Ok(text)
    }
}

fn catalog(json: bool, args: &FamilyArgs, verify: bool) -> Result<String> {
    let p = point(args)?;
    let h: Matrix<f64> = p.matrix()?;
    let hadamard = is_hadamard(&h, STRUCTURAL_TOL);
    let isolated = p.family().is_isolated();
    let mut text = io::matrix_to_csv(&h);
    if verify {
        let _ = writeln!(text, "Hadamard: {hadamard}, isolated: {isolated}");
    }
    let mut doc = json!({
        "family": p.family().code(),
        "params": p.params(),
        "matrix": matrix_json(&h),
    });
    if verify {
        doc["hadamard"] = json!(hadamard);
        doc["isolated"] = json!(isolated);
    }
    render(json, doc, text)
}

fn pair_bases(p: &FamilyPoint) -> Result<(OrthonormalBasis<f64>, OrthonormalBasis<f64>)> {
    let h: Matrix<f64> = p.matrix()?;
    Ok((
        OrthonormalBasis::standard(h.dim()),
        OrthonormalBasis::from_hadamard(&h)?,
    ))
}

fn set_summary(set: &MUVectorSet<f64>) -> Value {
    json!({
        "n_vectors": set.len(),
        "seeds_run": set.stats.seeds_run,
        "converged": set.stats.converged,
        "rejected": set.stats.rejected,
        "stopped_early": set.stats.stopped_early,
        "hits": set.hits(),
    })
}

fn mu_search(json: bool, args: &FamilyArgs, seeds: usize, config: &SolverConfig, out: Option<&Path>) -> Result<String> {
    let p = point(args)?;
    let (std, h) = pair_bases(&p)?;
    let set = collect((&std, &h), seeds, config)?;
    if let Some(path) = out {
        io::write_vectors(path, &set)?;
    }
    let text = format!(
        "{} distinct vectors\nseeds run: {}, converged: {}, rejected: {}, stopped early: {}\n",
        set.len(),
        set.stats.seeds_run,
        set.stats.converged,
        set.stats.rejected,
        set.stats.stopped_early
    );
    let mut doc = set_summary(&set);
    doc["family"] = json!(p.family().code());
    doc["params"] = json!(p.params());
    render(json, doc, text)
}

fn triplets(json: bool, input: &Path, family: Option<&str>, params: &str, out: Option<&Path>) -> Result<String> {
    let set: MUVectorSet<f64> = io::read_vectors(input)?;
    let thirds = third_bases(&set, ORTHO_TOL);
    let pair = match family {
        Some(f) => Some(pair_bases(&point(&FamilyArgs {
            family: f.to_string(),
            params: params.to_string(),
        })?)?),
        None => None,
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (k, third) in thirds.iter().enumerate() {
            io::write_text(
                &dir.join(format!("third_{k}.csv")),
                &io::bases_to_csv(std::slice::from_ref(third)),
            )?;
            if let Some((std, h)) = &pair {
                let t = Triplet::new(std.clone(), h.clone(), third.clone())?;
                io::write_triplet(&dir.join(format!("triplet_{k}.csv")), &t)?;
            }
        }
    }
    let text = format!("{} vectors, {} third bases\n", set.len(), thirds.len());
    let doc = json!({
        "n_vectors": set.len(),
        "n_third_bases": thirds.len(),
        "third_bases": thirds.iter().map(|b| matrix_json(b.matrix())).collect::<Vec<_>>(),
    });
    render(json, doc, text)
}

fn extend(json: bool, path: &Path, seeds: usize, config: &SolverConfig, out: Option<&Path>) -> Result<String> {
    let t: Triplet<f64> = io::read_triplet(path)?;
    let set = extend_triplet(&t, seeds, config)?;
    if let Some(path) = out {
        io::write_vectors(path, &set)?;
    }
    let text = format!(
        "{} vectors unbiased to all three bases (seeds run: {}, converged: {})\n",
        set.len(),
        set.stats.seeds_run,
        set.stats.converged
    );
    render(json, set_summary(&set), text)
}

fn orbits(json: bool, input: &Path) -> Result<String> {
    let set: MUVectorSet<f64> = io::read_vectors(input)?;
    let partition = classify_orbits(&set);
    let mut text = String::new();
    let mut rows = Vec::new();
    for (k, members) in partition.orbits.iter().enumerate() {
        let eigen = displacement_eigen_index(set.vectors()[members[0]].vector(), 1e-8);
        let eigen_text = eigen.map_or("no displacement".to_string(), |p| format!("D({}, {})", p.p1, p.p2));
        let _ = writeln!(text, "orbit {k}: size {}, eigenvector of {eigen_text}", members.len());
        rows.push(json!({
            "orbit": k,
            "size": members.len(),
            "members": members,
            "eigen_index": eigen.map(|p| [p.p1, p.p2]),
        }));
    }
    let sizes = partition.sizes();
    let _ = writeln!(
        text,
        "sizes: {}\nclosed: {}",
        sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
        partition.closed
    );
    let doc = json!({ "orbits": rows, "sizes": sizes, "closed": partition.closed });
    render(json, doc, text)
}

fn record_json(family: FamilyId, r: &ScanRecord) -> Value {
    let mut row = serde_json::Map::new();
    for (k, p) in r.params.iter().enumerate() {
        row.insert(format!("param{}", k + 1), json!(p));
    }
    row.insert("n_vectors".into(), json!(r.n_vectors));
    row.insert("n_third_bases".into(), json!(r.n_third_bases));
    row.insert("triplet_found".into(), json!(r.triplet_found));
    row.insert("extension_found".into(), json!(r.extension_found));
    row.insert("n_converged".into(), json!(r.n_converged));
    row.insert("n_seeds".into(), json!(r.n_seeds));
    row.insert("skipped".into(), json!(r.skipped));
    row.insert("family".into(), json!(family.code()));
    for (k, c) in r.cell.iter().enumerate() {
        row.insert(format!("cell{}", k + 1), json!(c));
    }
    Value::Object(row)
}

fn sweep(json: bool, spec: &SweepSpec, out: Option<&Path>, bitmap: Option<&Path>) -> Result<String> {
    let records = run_sweep::<f64>(spec)?;
    if let Some(path) = out {
        io::write_scan(path, spec.family, &records)?;
    }
    if let Some(path) = bitmap {
        io::write_pgm(path, &records)?;
    }
    let found = records.iter().filter(|r| r.triplet_found).count();
    let skipped = records.iter().filter(|r| r.skipped).count();
    let text = if out.is_some() {
        format!("{} points, {found} with a triplet, {skipped} skipped\n", records.len())
    } else {
        io::scan_to_csv(spec.family, &records)
    };
    let doc = Value::Array(records.iter().map(|r| record_json(spec.family, r)).collect());
    render(json, doc, text)
}

fn symmetry_check(json: bool, input: &Path) -> Result<String> {
    let (family, records) = io::read_scan(input)?;
    let Some(family) = family else {
        bail!("{} holds no scan records", input.display());
    };
    let report = symmetry_validate(&records, family)?;
    let mut text = String::new();
    for c in &report.checks {
        let _ = writeln!(text, "{}: {} mismatches in {} pairs", c.name, c.mismatches, c.compared);
    }
    let _ = writeln!(text, "worst mismatch fraction: {}", report.worst_fraction());
    let doc = json!({
        "family": family.code(),
        "checks": report.checks.iter().map(|c| json!({
            "name": c.name,
            "compared": c.compared,
            "mismatches": c.mismatches,
        })).collect::<Vec<_>>(),
        "worst_fraction": report.worst_fraction(),
    });
    render(json, doc, text)
}

fn equivalence(json: bool, a: &Path, b: &Path, tol: f64) -> Result<String> {
    let ha: Matrix<f64> = io::read_matrix(a)?;
    let hb: Matrix<f64> = io::read_matrix(b)?;
    let witness = find_equivalence(&ha, &hb, tol)?;
    let mut text = format!("equivalent: {}\n", witness.is_some());
    let mut doc = json!({ "equivalent": witness.is_some() });
    if let Some(w) = &witness {
        let _ = writeln!(
            text,
            "row permutation: {:?}\ncolumn permutation: {:?}\nresidual: {:.3e}",
            w.row_perm, w.col_perm, w.residual
        );
        doc["row_perm"] = json!(w.row_perm);
        doc["col_perm"] = json!(w.col_perm);
        doc["left"] = Value::Array(w.left.iter().map(|&z| complex_json(z)).collect());
        doc["right"] = Value::Array(w.right.iter().map(|&z| complex_json(z)).collect());
        doc["residual"] = json!(w.residual);
    }
    render(json, doc, text)
}

//! Plain-text exchange formats.
//!
//! * Matrices: CSV without header, row-major, each cell `re±imi` with 17
//!   significant digits, e.g. `1.0000000000000000e0+0.0000000000000000e0i`.
//! * Vector sets: header `re0,im0,…,re{d-1},im{d-1},hits`, one vector per row.
//! * Triplets: three blocks separated by a blank line; line `k` of a block is
//!   basis vector `k` in the matrix cell format (so each block is the basis
//!   matrix written column by column).
//! * Scans: header `param1,…,n_vectors,n_third_bases,triplet_found,
//!   extension_found,n_converged,n_seeds,skipped,family,cell1,…`.
//! * Bitmaps: plain PGM (`P2`); 0 = triplet found, 255 = none, 128 = skipped
//!   or not sampled.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::analysis::{MUVectorSet, Triplet};
use crate::catalog::FamilyId;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, OrthonormalBasis, StateVector, STRUCTURAL_TOL};
use crate::scalar::{Complex, Real};
use crate::sweep::ScanRecord;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(context: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        context: context.to_string(),
        line,
        message: message.into(),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

pub fn format_complex<T: Real>(z: Complex<T>) -> String {
    format!("{:.16e}{:+.16e}i", z.re.as_f64(), z.im.as_f64())
}

/// Parses `a±bi`, a bare real `a`, or a bare imaginary `bi`.
pub fn parse_complex(s: &str) -> Option<Complex<f64>> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| Complex::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Some(Complex::new(body[..k].parse().ok()?, body[k..].parse().ok()?)),
        None => Some(Complex::new(0.0, body.parse().ok()?)),
    }
}

fn lift<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

pub fn matrix_to_csv<T: Real>(m: &Matrix<T>) -> String {
    let mut out = String::new();
    for r in 0..m.dim() {
        let row: Vec<String> = m.row(r).iter().map(|&z| format_complex(z)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn parse_rows(text: &str, context: &str) -> Result<Vec<Vec<Complex<f64>>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .map(|cell| {
                    parse_complex(cell).ok_or_else(|| parse_err(context, i + 1, format!("bad complex '{cell}'")))
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_csv<T: Real>(text: &str, context: &str) -> Result<Matrix<T>> {
    let rows = parse_rows(text, context)?;
    let n = rows.len();
    if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(parse_err(
            context,
            i + 1,
            format!("expected {n} columns in a square matrix"),
        ));
    }
    Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(lift).collect()).collect())
}

pub fn read_matrix<T: Real>(path: &Path) -> Result<Matrix<T>> {
    matrix_from_csv(&read_text(path)?, &path.display().to_string())
}

pub fn write_matrix<T: Real>(path: &Path, m: &Matrix<T>) -> Result<()> {
    write_text(path, &matrix_to_csv(m))
}

pub fn vectors_to_csv<T: Real>(set: &MUVectorSet<T>) -> String {
    let d = set.dim();
    let mut out = String::new();
    let header: Vec<String> = (0..d).flat_map(|k| [format!("re{k}"), format!("im{k}")]).collect();
    let _ = writeln!(out, "{},hits", header.join(","));
    for (v, hits) in set.vectors().iter().zip(set.hits()) {
        for z in v.components() {
            let _ = write!(out, "{:.16e},{:.16e},", z.re.as_f64(), z.im.as_f64());
        }
        let _ = writeln!(out, "{hits}");
    }
    out
}

pub fn vectors_from_csv<T: Real>(text: &str, context: &str) -> Result<MUVectorSet<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let width = rdr.headers().map_err(|e| parse_err(context, 1, e.to_string()))?.len();
    if width < 3 || width % 2 == 0 {
        return Err(parse_err(context, 1, "expected re/im column pairs and a hits column"));
    }
    let d = (width - 1) / 2;
    let mut set = MUVectorSet::new(d);
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| parse_err(context, line, e.to_string()))?;
        let nums: Vec<f64> = row
            .iter()
            .take(2 * d)
            .map(|c| {
                c.trim()
                    .parse()
                    .map_err(|_| parse_err(context, line, format!("bad number '{c}'")))
            })
            .collect::<Result<_>>()?;
        let hits: usize = row[2 * d]
            .trim()
            .parse()
            .map_err(|_| parse_err(context, line, "bad hit count"))?;
        let comps = nums.chunks(2).map(|p| lift(Complex::new(p[0], p[1]))).collect();
        let v = StateVector::normalized(comps).map_err(|e| parse_err(context, line, e.to_string()))?;
        set.insert(&v, hits)?;
    }
    Ok(set)
}

pub fn read_vectors<T: Real>(path: &Path) -> Result<MUVectorSet<T>> {
    vectors_from_csv(&read_text(path)?, &path.display().to_string())
}

pub fn write_vectors<T: Real>(path: &Path, set: &MUVectorSet<T>) -> Result<()> {
    write_text(path, &vectors_to_csv(set))
}

pub fn bases_to_csv<T: Real>(bases: &[OrthonormalBasis<T>]) -> String {
    let blocks: Vec<String> = bases.iter().map(|b| matrix_to_csv(&b.matrix().transpose())).collect();
    blocks.join("\n")
}

/// Reads blank-line separated basis blocks.
pub fn bases_from_csv<T: Real>(text: &str, context: &str) -> Result<Vec<OrthonormalBasis<T>>> {
    let mut blocks: Vec<String> = vec![String::new()];
    for line in text.lines() {
        if line.trim().is_empty() {
            if !blocks.last().is_some_and(String::is_empty) {
                blocks.push(String::new());
            }
        } else {
            let last = blocks.last_mut().expect("nonempty");
            last.push_str(line);
            last.push('\n');
        }
    }
    blocks
        .into_iter()
        .filter(|b| !b.is_empty())
        .map(|b| {
            let rows: Matrix<T> = matrix_from_csv(&b, context)?;
            OrthonormalBasis::new(rows.transpose(), T::lit(STRUCTURAL_TOL))
        })
        .collect()
}

pub fn write_triplet<T: Real>(path: &Path, t: &Triplet<T>) -> Result<()> {
    write_text(path, &bases_to_csv(&t.bases()))
}

pub fn read_triplet<T: Real>(path: &Path) -> Result<Triplet<T>> {
    let context = path.display().to_string();
    let mut bases = bases_from_csv::<T>(&read_text(path)?, &context)?;
    if bases.len() != 3 {
        return Err(parse_err(
            &context,
            1,
            format!("expected 3 bases, found {}", bases.len()),
        ));
    }
    let third = bases.pop().expect("three");
    let second = bases.pop().expect("three");
    let first = bases.pop().expect("three");
    Triplet::new(first, second, third)
}

/// Scan records as CSV; `arity` fixes the number of parameter columns.
pub fn scan_to_csv(family: FamilyId, records: &[ScanRecord]) -> String {
    let arity = family.arity();
    let mut header: Vec<String> = (1..=arity).map(|k| format!("param{k}")).collect();
    header.extend(
        [
            "n_vectors",
            "n_third_bases",
            "triplet_found",
            "extension_found",
            "n_converged",
            "n_seeds",
            "skipped",
            "family",
        ]
        .map(String::from),
    );
    header.extend((1..=arity).map(|k| format!("cell{k}")));
    let mut out = header.join(",");
    out.push('\n');
    for r in records {
        let mut row: Vec<String> = r.params.iter().map(|p| format!("{p:.16e}")).collect();
        row.extend([
            r.n_vectors.to_string(),
            r.n_third_bases.to_string(),
            r.triplet_found.to_string(),
            r.extension_found.to_string(),
            r.n_converged.to_string(),
            r.n_seeds.to_string(),
            r.skipped.to_string(),
            family.code().to_string(),
        ]);
        row.extend((0..arity).map(|k| r.cell.get(k).map(usize::to_string).unwrap_or_default()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a scan CSV. The family comes from the `family` column; an empty
/// file body yields `None` for it.
pub fn scan_from_csv(text: &str, context: &str) -> Result<(Option<FamilyId>, Vec<ScanRecord>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| parse_err(context, 1, e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(context, 1, format!("missing column '{name}'")))
    };
    let params: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("param"))
        .map(|(i, _)| i)
        .collect();
    let cells: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("cell"))
        .map(|(i, _)| i)
        .collect();
    let idx = [
        col("n_vectors")?,
        col("n_third_bases")?,
        col("triplet_found")?,
        col("extension_found")?,
        col("n_converged")?,
        col("n_seeds")?,
        col("skipped")?,
        col("family")?,
    ];
    let mut family = None;
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| parse_err(context, line, e.to_string()))?;
        let field = |k: usize| row.get(k).unwrap_or("").trim();
        let num = |k: usize| -> Result<usize> {
            field(k)
                .parse()
                .map_err(|_| parse_err(context, line, format!("bad integer '{}'", field(k))))
        };
        let flag = |k: usize| -> Result<bool> {
            field(k)
                .parse()
                .map_err(|_| parse_err(context, line, format!("bad boolean '{}'", field(k))))
        };
        let fam: FamilyId = field(idx[7])
            .parse()
            .map_err(|e: Error| parse_err(context, line, e.to_string()))?;
        if family.is_some_and(|f| f != fam) {
            return Err(parse_err(context, line, "mixed families in one scan"));
        }
        family = Some(fam);
        let params = params
            .iter()
            .map(|&k| {
                field(k)
                    .parse()
                    .map_err(|_| parse_err(context, line, format!("bad parameter '{}'", field(k))))
            })
            .collect::<Result<Vec<f64>>>()?;
        let cell = if cells.iter().all(|&k| !field(k).is_empty()) {
            cells.iter().map(|&k| num(k)).collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        records.push(ScanRecord {
            index: i,
            params,
            cell,
            n_vectors: num(idx[0])?,
            n_third_bases: num(idx[1])?,
            triplet_found: flag(idx[2])?,
            extension_found: flag(idx[3])?,
            n_converged: num(idx[4])?,
            n_seeds: num(idx[5])?,
            skipped: flag(idx[6])?,
        });
    }
    Ok((family, records))
}

pub fn read_scan(path: &Path) -> Result<(Option<FamilyId>, Vec<ScanRecord>)> {
    scan_from_csv(&read_text(path)?, &path.display().to_string())
}

pub fn write_scan(path: &Path, family: FamilyId, records: &[ScanRecord]) -> Result<()> {
    write_text(path, &scan_to_csv(family, records))
}

/// Plain PGM of a grid scan. Axes with a single cell are dropped; the last
/// remaining axis runs along image rows.
pub fn render_pgm(records: &[ScanRecord]) -> Result<String> {
    let Some(first) = records.first() else {
        return Err(Error::NonGrid("no records".into()));
    };
    let arity = first.cell.len();
    if records.iter().any(|r| r.cell.len() != arity || r.cell.is_empty()) {
        return Err(Error::NonGrid("records lack grid coordinates".into()));
    }
    let shape: Vec<usize> = (0..arity)
        .map(|k| records.iter().map(|r| r.cell[k] + 1).max().unwrap_or(1))
        .collect();
    let free: Vec<usize> = (0..arity).filter(|&k| shape[k] > 1).collect();
    if free.len() > 2 {
        return Err(Error::NonGrid(format!(
            "{} free axes; bitmaps need at most 2",
            free.len()
        )));
    }
    let (height, width) = match free.as_slice() {
        [] => (1, 1),
        [a] => (1, shape[*a]),
        [a, b] => (shape[*a], shape[*b]),
        _ => unreachable!(),
    };
    let mut pixels = vec![128u8; width * height];
    for r in records {
        let (y, x) = match free.as_slice() {
            [] => (0, 0),
            [a] => (0, r.cell[*a]),
            [a, b] => (r.cell[*a], r.cell[*b]),
            _ => unreachable!(),
        };
        pixels[y * width + x] = match (r.skipped, r.triplet_found) {
            (true, _) => 128,
            (false, true) => 0,
            (false, false) => 255,
        };
    }
    let mut out = format!("P2\n{width} {height}\n255\n");
    for row in pixels.chunks(width) {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_pgm(path: &Path, records: &[ScanRecord]) -> Result<()> {
    write_text(path, &render_pgm(records)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{fourier, karlsson2};

    fn record(cell: Vec<usize>, found: bool, skipped: bool) -> ScanRecord {
        ScanRecord {
            index: 0,
            params: vec![0.25; cell.len()],
            cell,
            n_vectors: 3,
            n_third_bases: usize::from(found),
            triplet_found: found,
            extension_found: false,
            n_converged: 5,
            n_seeds: 7,
            skipped,
        }
    }

    #[test]
    fn complex_literals_round_trip() {
        for z in [
            Complex::new(1.0, 0.0),
            Complex::new(-0.1, -2.5e-17),
            Complex::new(3e10, 1e-300),
        ] {
            assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }
        assert_eq!(parse_complex("2"), Some(Complex::new(2.0, 0.0)));
        assert_eq!(parse_complex("-1.5i"), Some(Complex::new(0.0, -1.5)));
        assert_eq!(parse_complex("1e-3-2E+2i"), Some(Complex::new(1e-3, -200.0)));
        assert_eq!(parse_complex("x+yi"), None);
    }

    #[test]
    fn matrices_round_trip_exactly() {
        let k = karlsson2::<f64>(0.3, -0.8).unwrap();
        let back: Matrix<f64> = matrix_from_csv(&matrix_to_csv(&k), "k").unwrap();
        assert_eq!(back, k);
        assert!(matches!(
            matrix_from_csv::<f64>("1,2\n3\n", "bad"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn vector_sets_round_trip() {
        let f = OrthonormalBasis::<f64>::from_hadamard(&fourier(3).unwrap()).unwrap();
        let set = MUVectorSet::from_vectors(3, &f.vectors()).unwrap();
        let text = vectors_to_csv(&set);
        assert!(text.starts_with("re0,im0,re1,im1,re2,im2,hits\n"));
        let back: MUVectorSet<f64> = vectors_from_csv(&text, "v").unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.hits(), set.hits());
        for (a, b) in back.vectors().iter().zip(set.vectors()) {
            assert!(a.overlap(b) > 1.0 - 1e-15);
        }
    }

    #[test]
    fn triplet_blocks_round_trip() {
        let t = crate::analysis::weyl_triplet::<f64>(4).unwrap();
        let bases: Vec<OrthonormalBasis<f64>> = bases_from_csv(&bases_to_csv(&t.bases()), "t").unwrap();
        assert_eq!(bases.len(), 3);
        for (a, b) in bases.iter().zip(t.bases()) {
            assert!(a.matrix().max_abs_diff(b.matrix()).unwrap() == 0.0);
        }
    }

    #[test]
    fn scans_round_trip_and_empty_scan_has_header() {
        let empty = scan_to_csv(FamilyId::Karlsson2, &[]);
        assert_eq!(
            empty,
            "param1,param2,n_vectors,n_third_bases,triplet_found,extension_found,n_converged,n_seeds,skipped,family,cell1,cell2\n"
        );
        let recs = vec![record(vec![0, 1], true, false), record(vec![1, 0], false, true)];
        let (fam, back) = scan_from_csv(&scan_to_csv(FamilyId::Karlsson2, &recs), "s").unwrap();
        assert_eq!(fam, Some(FamilyId::Karlsson2));
        for (a, b) in back.iter().zip(&recs) {
            assert_eq!(
                (&a.params, &a.cell, a.triplet_found, a.skipped),
                (&b.params, &b.cell, b.triplet_found, b.skipped)
            );
        }
    }

    #[test]
    fn bitmaps() {
        let one = render_pgm(&[record(vec![0, 0], true, false)]).unwrap();
        assert_eq!(one, "P2\n1 1\n255\n0\n");
        let recs = vec![
            record(vec![0, 0], true, false),
            record(vec![0, 1], false, false),
            record(vec![1, 0], false, true),
        ];
        assert_eq!(render_pgm(&recs).unwrap(), "P2\n2 2\n255\n0 255\n128 128\n");
        assert!(matches!(
            render_pgm(&[record(vec![], true, false)]),
            Err(Error::NonGrid(_))
        ));
    }
}

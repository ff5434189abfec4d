use mubforge_core::analysis::{classify_orbits, collect, third_bases, MUVectorSet, Triplet, ORTHO_TOL};
use mubforge_core::catalog::{fourier, FamilyId, FamilyPoint};
use mubforge_core::io;
use mubforge_core::linalg::{mu_deviation, OrthonormalBasis};
use mubforge_core::solver::SolverConfig;
use mubforge_core::sweep::{run_sweep, symmetry_validate, SweepMode, SweepSpec};

#[test]
fn fourier_set_survives_a_file_round_trip() {
    let std = OrthonormalBasis::standard(6);
    let f = OrthonormalBasis::from_hadamard(&fourier::<f64>(6).unwrap()).unwrap();
    let set = collect((&std, &f), 5000, &SolverConfig::with_seed(42)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    io::write_vectors(&path, &set).unwrap();
    let back: MUVectorSet<f64> = io::read_vectors(&path).unwrap();
    assert_eq!(back.len(), 48);
    assert_eq!(back.hits(), set.hits());
    let thirds = third_bases(&back, ORTHO_TOL);
    assert_eq!(thirds.len(), 16);
    assert_eq!(classify_orbits(&back).sizes().len(), 3);

    let t = Triplet::new(std, f, thirds[3].clone()).unwrap();
    let tpath = dir.path().join("t.csv");
    io::write_triplet(&tpath, &t).unwrap();
    let t2: Triplet<f64> = io::read_triplet(&tpath).unwrap();
    for (a, b) in t.bases().iter().zip(t2.bases().iter()) {
        assert_eq!(a.matrix(), b.matrix());
        assert!(mu_deviation(a, &t2.bases()[0]).unwrap() < 1e-10 || a.is_standard());
    }
}

#[test]
fn missing_files_name_their_path() {
    let err = io::read_matrix::<f64>(std::path::Path::new("/no/such/dir/m.csv")).unwrap_err();
    assert!(err.to_string().contains("/no/such/dir/m.csv"), "{err}");
}

#[test]
fn scan_files_feed_the_symmetry_check() {
    let mut spec = SweepSpec::new(FamilyId::Karlsson2, SweepMode::Grid, 4);
    spec.seeds_per_point = 30;
    spec.extension_seeds = 0;
    let records = run_sweep::<f64>(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    io::write_scan(&path, spec.family, &records).unwrap();
    let (family, back) = io::read_scan(&path).unwrap();
    assert_eq!(family, Some(FamilyId::Karlsson2));
    assert_eq!(back.len(), 16);
    let direct = symmetry_validate(&records, spec.family).unwrap();
    let via_file = symmetry_validate(&back, spec.family).unwrap();
    assert_eq!(direct, via_file);
    let pgm = io::render_pgm(&back).unwrap();
    assert!(pgm.starts_with("P2\n4 4\n255\n"));
}

#[test]
fn sweeps_are_reproducible() {
    let mut spec = SweepSpec::new(FamilyId::Bjorck6, SweepMode::Random, 6);
    spec.seeds_per_point = 40;
    spec.solver = SolverConfig::with_seed(5);
    let a = run_sweep::<f64>(&spec).unwrap();
    let b = run_sweep::<f64>(&spec).unwrap();
    assert_eq!(io::scan_to_csv(spec.family, &a), io::scan_to_csv(spec.family, &b));
    for r in &a {
        assert!(FamilyPoint::new(spec.family, &r.params).is_ok());
    }
}

use modvar_core::io::*;
use modvar_core::lattice::{quadrature_density, to_momentum, GridSpec, QuadratureAngle};
use modvar_core::modular::zak_transform;
use modvar_core::random::random_state;
use modvar_core::two_mode::tensor;
use modvar_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid() -> GridSpec<f64> {
    GridSpec::new(2.0 * std::f64::consts::PI.sqrt(), 16, 8).unwrap()
}

#[test]
fn state_csv_round_trips_exactly() {
    let g = grid();
    let psi = random_state(&g, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let mut buf = Vec::new();
    write_state_csv(&mut buf, &psi).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,re,im"));
    assert_eq!(text.lines().count(), g.len() + 1);
    let first = lines.next().unwrap();
    let mantissa = first.split(',').next().unwrap().trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17);
    let back = read_state_csv(buf.as_slice(), g).unwrap();
    assert_eq!(back, psi);
}

#[test]
fn momentum_csv_header() {
    let g = grid();
    let psi = random_state(&g, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let mut buf = Vec::new();
    write_momentum_csv(&mut buf, &to_momentum(&psi)).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("p,re,im\n"));
}

#[test]
fn read_rejects_bad_input() {
    let g = grid();
    assert!(matches!(read_state_csv("a,b,c\n".as_bytes(), g), Err(Error::Format(_))));
    assert!(matches!(read_state_csv("x,re,im\n0,1,0\n".as_bytes(), g), Err(Error::Format(_))));
}

#[test]
fn dump_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let g = grid();
    let psi = random_state(&g, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let path = dir.path().join("state.csv");
    dump_state(&path, &psi).unwrap();
    let meta = read_metadata(&sidecar_path(&path)).unwrap();
    assert_eq!(meta.kind, "position");
    assert_eq!(meta.grids[0].grid().unwrap(), g);
    let back = read_state_csv(std::fs::File::open(&path).unwrap(), g).unwrap();
    assert_eq!(back, psi);

    let dpath = dir.path().join("density.csv");
    let dens = quadrature_density(&psi, QuadratureAngle::new(0.4));
    dump_density(&dpath, &g, &dens).unwrap();
    assert_eq!(read_metadata(&sidecar_path(&dpath)).unwrap().angle, Some(0.4));
    let text = std::fs::read_to_string(&dpath).unwrap();
    assert!(text.starts_with("x_phi,density\n"));
}

#[test]
fn modular_dumps() {
    let g = grid();
    let mwf = zak_transform(&random_state(&g, &mut ChaCha8Rng::seed_from_u64(4)).unwrap());
    let mut buf = Vec::new();
    write_modular_csv(&mut buf, &mwf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("xbar,pbar,re,im\n"));
    assert_eq!(text.lines().count(), g.len() + 1);
    let mut buf = Vec::new();
    write_modular_density_csv(&mut buf, &mwf).unwrap();
    let total: f64 = String::from_utf8(buf)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .sum::<f64>()
        * g.modular_cell();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn two_mode_dumps() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let psi = tensor(&random_state(&g, &mut rng).unwrap(), &random_state(&g, &mut rng).unwrap()).unwrap();
    let mut buf = Vec::new();
    let rows = write_two_mode_csv(&mut buf, &psi, 1e-3).unwrap();
    let want = psi.amplitudes().iter().filter(|a| a.norm() > 1e-3).count();
    assert_eq!(rows, want);
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("x1,x2,re,im\n"));
    assert_eq!(text.lines().count(), want + 1);

    let mut bin = Vec::new();
    write_two_mode_binary(&mut bin, &psi).unwrap();
    assert_eq!(bin.len(), 16 * g.len() * g.len());
    assert_eq!(f64::from_le_bytes(bin[..8].try_into().unwrap()), psi.amplitudes()[0].re);
    assert_eq!(read_two_mode_binary(bin.as_slice(), [g, g]).unwrap(), psi);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.bin");
    dump_two_mode(&path, &psi, true, 0.0).unwrap();
    assert_eq!(read_metadata(&sidecar_path(&path)).unwrap().kind, "two_mode_binary");
}

#[test]
fn fmt17_is_lossless() {
    for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI] {
        assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
    }
}

use modvar_core::lattice::{overlap, GridSpec, WaveFunction1D};
use modvar_core::modular::{
    extract_qubit, extract_qubit_in, extract_qubit_momentum, inverse_zak, pbar, xbar, zak_transform, Gauge,
    ModularWaveFunction,
};
use modvar_core::random::random_state;
use modvar_core::states::{gaussian_comb, logical_state, BlochAngles, CombParams, CombOffset};
use num_complex::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn grid() -> GridSpec<f64> {
    GridSpec::new(2.0 * PI.sqrt(), 64, 32).unwrap()
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Zak transform by direct summation, written against the continuum formula.
fn naive_zak(psi: &WaveFunction1D<f64>) -> Vec<C> {
    let g = *psi.grid();
    let (m, p) = (g.points_per_period, g.periods);
    let mut out = vec![C::new(0.0, 0.0); m * p];
    for j in 0..m {
        for k in 0..p {
            let (xb, pb) = (xbar(&g, j), pbar(&g, k));
            let mut acc = C::new(0.0, 0.0);
            for n in 0..p {
                let x = n as f64 * g.ell + xb;
                acc += psi.at(x) * C::from_polar(1.0, -(n as f64) * pb * g.ell);
            }
            out[j * p + k] = acc * (g.ell / TAU).sqrt();
        }
    }
    out
}

#[test]
fn matches_direct_summation() {
    let g = GridSpec::new(2.0 * PI.sqrt(), 16, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = random_state(&g, &mut rng).unwrap();
    assert!(max_diff(zak_transform(&psi).amplitudes(), &naive_zak(&psi)) < 1e-12);
}

#[test]
fn round_trip_and_unitarity() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let a = random_state(&g, &mut rng).unwrap();
        let b = random_state(&g, &mut rng).unwrap();
        let (za, zb) = (zak_transform(&a), zak_transform(&b));
        assert!((za.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(max_diff(inverse_zak(&za).amplitudes(), a.amplitudes()) < 1e-12);
        let lhs = za.inner(&zb).unwrap();
        let rhs = overlap(&a, &b).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn delta_comb_lands_at_origin() {
    let g = grid();
    let m = g.points_per_period;
    let amps = (0..g.len()).map(|j| if (j + g.len() / 2) % m == 0 { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) });
    let psi = WaveFunction1D::normalized(g, amps.collect()).unwrap();
    let z = zak_transform(&psi);
    let (j0, k0) = (m / 4, g.periods / 2);
    assert!(xbar(&g, j0).abs() < 1e-15 && pbar(&g, k0).abs() < 1e-15);
    let d = z.density();
    let peak = d[j0 * g.periods + k0];
    let rest: f64 = d.iter().sum::<f64>() - peak;
    assert!(peak > 0.0 && rest < 1e-20);
}

#[test]
fn single_torus_points_invert_to_combs() {
    let g = grid();
    let (m, p) = (g.points_per_period, g.periods);
    for (j, shift) in [(m / 4, 0.0), (3 * m / 4, g.ell / 2.0)] {
        let mut amps = vec![C::new(0.0, 0.0); g.len()];
        amps[j * p + p / 2] = C::new(1.0, 0.0);
        let mwf = ModularWaveFunction::normalized(g, amps).unwrap();
        let psi = inverse_zak(&mwf);
        let peak = psi.at(shift);
        for n in -(p as i64) / 2..(p as i64) / 2 {
            let x = n as f64 * g.ell + shift;
            assert!((psi.at(x) - peak).norm() < 1e-12, "x = {x}");
        }
        let mass: f64 = psi.density().iter().sum::<f64>() * g.dx();
        let on_comb = p as f64 * peak.norm_sqr() * g.dx();
        assert!((mass - on_comb).abs() < 1e-12);
    }
}

#[test]
fn period_shift_is_a_phase() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let psi = random_state(&g, &mut rng).unwrap();
    let mut shifted = psi.amplitudes().to_vec();
    shifted.rotate_right(g.points_per_period);
    let shifted = WaveFunction1D::new(g, shifted).unwrap();
    let (z0, z1) = (zak_transform(&psi), zak_transform(&shifted));
    for j in 0..z0.rows() {
        for k in 0..z0.cols() {
            let want = z0.get(j, k) * C::from_polar(1.0, -z0.pbar(k) * g.ell);
            assert!((z1.get(j, k) - want).norm() < 1e-10);
        }
    }
}

#[test]
fn comb_is_nearly_separable() {
    let ell = 2.0 * PI.sqrt();
    let mut last = f64::INFINITY;
    for eps in [0.1, 0.05, 0.02] {
        let g = GridSpec::new(ell, 128, 64).unwrap();
        let params = CombParams::new(eps * ell, eps / ell).unwrap();
        let z = zak_transform(&gaussian_comb(&g, &params).unwrap());
        let r = z.rank1_residual();
        assert!(r <= 5.0 * eps && r < last, "eps = {eps}, residual = {r}");
        last = r;
    }
}

#[test]
fn extraction_reconstructs_exactly() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for gauge in [Gauge::Standard, Gauge::Modified] {
        let z = zak_transform(&random_state(&g, &mut rng).unwrap());
        let d = extract_qubit_in(&z, gauge);
        assert!((d.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(d.theta.iter().all(|t| (0.0..=PI).contains(t)));
        assert!(d.phi.iter().all(|p| (-PI..PI).contains(p)));
        assert!(max_diff(d.reconstruct().amplitudes(), z.amplitudes()) < 1e-10);
    }
    let z = zak_transform(&random_state(&g, &mut rng).unwrap());
    let d = extract_qubit_momentum(&z).unwrap();
    assert!(max_diff(d.reconstruct().amplitudes(), z.amplitudes()) < 1e-10);
}

fn supported(f: &[C]) -> Vec<usize> {
    let fmax = f.iter().map(|a| a.norm()).fold(0.0, f64::max);
    (0..f.len()).filter(|&i| f[i].norm() > 1e-3 * fmax).collect()
}

#[test]
fn logical_states_have_constant_angles() {
    let g = grid();
    let ell = g.ell;
    let params = CombParams::new(0.04 * ell, 0.5 / ell).unwrap();
    let cases = [
        BlochAngles::zero(),
        BlochAngles::plus(),
        BlochAngles::new(PI / 2.0, PI / 2.0).unwrap(),
        BlochAngles::new(1.1, -2.3).unwrap(),
    ];
    for angles in cases {
        let d = extract_qubit(&zak_transform(&logical_state(&g, &params, &angles).unwrap()));
        for i in supported(&d.f) {
            assert!((d.theta[i] - angles.theta).abs() < 1e-6, "{angles:?} theta {}", d.theta[i]);
            if angles.theta > 0.0 {
                let dphi = (d.phi[i] - angles.phi + PI).rem_euclid(TAU) - PI;
                assert!(dphi.abs() < 1e-6, "{angles:?} phi {}", d.phi[i]);
            }
        }
    }
}

#[test]
fn momentum_split_sees_plus_as_zero() {
    let g = GridSpec::new(2.0 * PI.sqrt(), 32, 128).unwrap();
    let params = CombParams::new(0.1 * g.ell, 0.1 / g.ell).unwrap();
    let plus = logical_state(&g, &params, &BlochAngles::plus()).unwrap();
    let d = extract_qubit_momentum(&zak_transform(&plus)).unwrap();
    for i in supported(&d.f) {
        assert!(d.theta[i] < 1e-6, "theta {}", d.theta[i]);
    }
}

#[test]
fn momentum_split_partner_half_reads_pi() {
    let g = grid();
    let p = g.periods;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut amps = zak_transform(&random_state(&g, &mut rng).unwrap()).amplitudes().to_vec();
    for (i, a) in amps.iter_mut().enumerate() {
        let k = i % p;
        if (p / 4..3 * p / 4).contains(&k) {
            *a = C::new(0.0, 0.0);
        }
    }
    let d = extract_qubit_momentum(&ModularWaveFunction::normalized(g, amps).unwrap()).unwrap();
    for i in supported(&d.f) {
        assert!((d.theta[i] - PI).abs() < 1e-12);
    }
}

#[test]
fn momentum_split_needs_quarter_periods() {
    let g = GridSpec::new(1.0, 8, 6).unwrap();
    let psi = WaveFunction1D::from_fn(g, |x: f64| C::new((-x * x).exp(), 0.0)).unwrap();
    assert!(extract_qubit_momentum(&zak_transform(&psi)).is_err());
}

#[test]
fn one_comb_reads_theta_pi() {
    let g = grid();
    let params = CombParams::new(0.05 * g.ell, 0.05 / g.ell).unwrap().with_offset(CombOffset::HalfPeriod);
    let d = extract_qubit(&zak_transform(&gaussian_comb(&g, &params).unwrap()));
    for i in supported(&d.f) {
        assert!((d.theta[i] - PI).abs() < 1e-6);
    }
}

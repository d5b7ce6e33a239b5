//! Built-in invariant suite behind `modvar check`.

use modvar_core::lattice::WaveFunction1D;
use modvar_core::modular::{inverse_zak, zak_transform};
use modvar_core::operators::{logical_x, logical_z, pauli, Pauli};
use modvar_core::povm::{measurement_unitary, povm_measure};
use modvar_core::random::seeded_states;
use modvar_core::readout::{
    certify_class, expectation, expectation_modular, expectation_quadrature, BetaClass, Observable, PhaseSpaceObservable,
    BUILTIN_OBSERVABLES,
};
use modvar_core::{Grid, WaveFunction};

use crate::record::Record;

/// Result of one invariant check: `metric ≤ bound` passes.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub metric: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, metric: f64, bound: f64) -> Self {
        Self { name, metric, bound, pass: metric <= bound }
    }

    fn failed(name: &'static str) -> Self {
        Self { name, metric: f64::INFINITY, bound: 0.0, pass: false }
    }

    pub fn record(&self) -> Record {
        Record::new("check")
            .with("name", self.name)
            .with("metric", self.metric)
            .with("bound", self.bound)
            .with("pass", self.pass)
    }
}

fn max_diff(a: &WaveFunction1D<f64>, b: &WaveFunction1D<f64>) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn l2_sum(a: &WaveFunction, b: &WaveFunction, sign: f64) -> f64 {
    let dx = a.grid().dx();
    (a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x + y * sign).norm_sqr()).sum::<f64>() * dx).sqrt()
}

fn builtins(ell: f64) -> Vec<(&'static str, Observable<f64>)> {
    BUILTIN_OBSERVABLES.iter().map(|n| (*n, Observable::builtin(n, ell).expect("built-in"))).collect()
}

fn readouts(ell: f64) -> [Observable<f64>; 3] {
    ["ReX", "ReY", "ReZ"].map(|n| Observable::builtin(n, ell).expect("built-in"))
}

fn worst(
    name: &'static str,
    bound: f64,
    states: &[WaveFunction],
    f: impl Fn(&WaveFunction) -> modvar_core::Result<f64>,
) -> CheckOutcome {
    let mut m: f64 = 0.0;
    for s in states {
        match f(s) {
            Ok(v) if v.is_finite() => m = m.max(v),
            _ => return CheckOutcome::failed(name),
        }
    }
    CheckOutcome::new(name, m, bound)
}

/// Runs every check on `count` seeded random states over `grid`.
pub fn run_suite(grid: &Grid, count: usize, seed: u64) -> Vec<CheckOutcome> {
    let states = match seeded_states(grid, count, seed) {
        Ok(s) => s,
        Err(_) => return vec![CheckOutcome::failed("random_states")],
    };
    let ell = grid.ell;
    let [rx, ry, rz] = readouts(ell);
    let mut out = vec![
        worst("zak_round_trip", 1e-12, &states, |s| Ok(max_diff(&inverse_zak(&zak_transform(s)), s))),
        worst("pauli_anticommutator", 1e-10, &states, |s| {
            Ok(l2_sum(&logical_z(&logical_x(s)), &logical_x(&logical_z(s)), 1.0))
        }),
        worst("z_squared_invisible", 1e-10, &states, |s| {
            let z2 = pauli(&pauli(s, Pauli::Z, false), Pauli::Z, false);
            let mut m: f64 = 0.0;
            for o in [&rx, &ry, &rz] {
                m = m.max((expectation(&z2, o)? - expectation(s, o)?).abs());
            }
            Ok(m)
        }),
        worst("bloch_ball", 1e-9, &states, |s| {
            let r2 = expectation(s, &rx)?.powi(2) + expectation(s, &ry)?.powi(2) + expectation(s, &rz)?.powi(2);
            Ok((r2 - 1.0).max(0.0))
        }),
        worst("dual_path", 1e-6, &states, |s| {
            let mwf = zak_transform(s);
            let mut m: f64 = 0.0;
            for o in [&rx, &ry, &rz] {
                let a = expectation(s, o)?;
                let b = expectation_modular(&mwf, o)?;
                let c = expectation_quadrature(s, o)?;
                m = m.max((a - b).abs()).max((a - c).abs()).max((b - c).abs());
            }
            Ok(m)
        }),
        worst("povm_equivalence", 1e-8, &states, |s| {
            let mut m: f64 = 0.0;
            for (_, o) in builtins(ell) {
                let (gate, _) = measurement_unitary(&o, s.grid())?;
                m = m.max((povm_measure(s, &gate)?.expectation - expectation(s, &o)?).abs());
            }
            Ok(m)
        }),
    ];
    let classes = [
        (PhaseSpaceObservable::re_z(ell), BetaClass::Z),
        (PhaseSpaceObservable::re_x(ell), BetaClass::X),
        (PhaseSpaceObservable::re_y(ell), BetaClass::Y),
    ];
    let miscertified = classes.iter().filter(|(o, c)| certify_class(o, ell) != *c).count();
    out.push(CheckOutcome::new("certification", miscertified as f64, 0.0));
    out
}

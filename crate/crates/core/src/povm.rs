//! Two-outcome measurement through an ancilla-controlled unitary.
//!
//! The circuit maps `|ψ⟩|0⟩` to `½(𝟙+U)|ψ⟩|0⟩ + ½(𝟙−U)|ψ⟩|1⟩`, so the
//! ancilla reads `±` with effects `E± = (𝟙 ± Re U)/2` when `U` is unitary.
//! Sampling uses ChaCha8 seeded with [`rand::SeedableRng::seed_from_u64`],
//! whose stream is fixed across platforms.

use num_complex::Complex;
use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{overlap, GridSpec, QuadratureAngle, WaveFunction1D};
use crate::num::{norm_sqr_sum, Real};
use crate::operators::Gate;
use crate::readout::{quadrature_form, Observable};

/// Outcome statistics and post-measurement states.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmOutcome<T: Real> {
    pub p_plus: T,
    pub p_minus: T,
    /// `None` when the outcome has probability below `1e-14`.
    pub post_plus: Option<WaveFunction1D<T>>,
    pub post_minus: Option<WaveFunction1D<T>>,
    /// `p₊ − p₋`.
    pub expectation: T,
}

const UNDEFINED_BELOW: f64 = 1e-14;

/// Runs the circuit for `U = gate` on `psi`.
///
/// Fails with [`Error::Invariant`] if `p₊ − p₋` and `Re⟨ψ|U|ψ⟩` disagree by
/// more than `1e-10`, which happens only for non-unitary input.
pub fn povm_measure<T: Real>(psi: &WaveFunction1D<T>, gate: &Gate<T>) -> Result<PovmOutcome<T>> {
    let grid = *psi.grid();
    let moved = gate.apply(psi)?;
    let half = T::of(0.5);
    let branch = |sign: T| -> Vec<Complex<T>> {
        psi.amplitudes().iter().zip(moved.amplitudes()).map(|(a, u)| (*a + *u * sign) * half).collect()
    };
    let (plus, minus) = (branch(T::one()), branch(-T::one()));
    let p_plus = norm_sqr_sum(&plus) * grid.dx();
    let p_minus = norm_sqr_sum(&minus) * grid.dx();
    let re_u = overlap(psi, &moved)?.re;
    let expectation = p_plus - p_minus;
    let gap = (expectation - re_u).abs().to_f64_lossy();
    let total = (p_plus + p_minus - T::one()).abs().to_f64_lossy();
    if gap > 1e-10 || total > 1e-10 {
        return Err(Error::Invariant(format!(
            "ancilla statistics off: p+ - p- = {expectation}, Re<U> = {re_u}, p+ + p- = {}",
            p_plus + p_minus
        )));
    }
    let post = |amps: Vec<Complex<T>>, p: T| -> Result<Option<WaveFunction1D<T>>> {
        if p.to_f64_lossy() < UNDEFINED_BELOW {
            Ok(None)
        } else {
            WaveFunction1D::normalized(grid, amps).map(Some)
        }
    };
    Ok(PovmOutcome {
        post_plus: post(plus, p_plus)?,
        post_minus: post(minus, p_minus)?,
        p_plus,
        p_minus,
        expectation,
    })
}

/// `e^{ih(x̂_φ)}`, with `h` sampled at the position-grid coordinates of the
/// rotated frame.
pub fn phase_gate<T: Real>(h: Vec<T>, angle: QuadratureAngle<T>) -> Gate<T> {
    Gate::QuadraturePhase { h, angle, sign: T::one() }
}

/// `arccos` of samples of `F`, with the number of values clamped into
/// `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArccosSamples<T: Real> {
    pub h: Vec<T>,
    pub clamped: usize,
}

/// Values within `1e-9` outside `[-1, 1]` are clamped; anything further out
/// is rejected.
pub fn arccos_samples<T: Real>(values: &[T]) -> Result<ArccosSamples<T>> {
    let mut clamped = 0;
    let h = values
        .iter()
        .map(|v| {
            let f = v.to_f64_lossy();
            if !(f.abs() <= 1.0 + 1e-9) {
                return Err(Error::OutOfUnitRange(f));
            }
            if f.abs() > 1.0 {
                clamped += 1;
            }
            Ok(v.max(-T::one()).min(T::one()).acos())
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(ArccosSamples { h, clamped })
}

/// The unitary whose ancilla statistics reproduce `⟨obs⟩`.
///
/// Step observables are their own unitaries; a table `½(D(v) + D(-v))` uses
/// `D(v)`; any other quadrature-diagonal table `F(x̂_φ)` uses the phase gate
/// `e^{i·arccos F(x̂_φ)}`. The second value counts clamped samples.
pub fn measurement_unitary<T: Real>(obs: &Observable<T>, grid: &GridSpec<T>) -> Result<(Gate<T>, usize)> {
    match obs {
        Observable::Step(axis) => Ok((Gate::Step(*axis), 0)),
        Observable::Fourier(table) => {
            let terms: Vec<_> = table.terms().collect();
            let half = T::of(0.5);
            if let [(n, m, d), (n2, m2, d2)] = terms[..] {
                let real_half = |c: Complex<T>| (c - Complex::new(half, T::zero())).norm().to_f64_lossy() < 1e-14;
                if n2 == -n && m2 == -m && real_half(d) && real_half(d2) {
                    let gate = Gate::Displace(table.displacement(n, m));
                    gate.validate(grid)?;
                    return Ok((gate, 0));
                }
            }
            let form = quadrature_form(obs, grid.ell)?;
            let values: Vec<T> = (0..grid.len()).map(|j| form.function.eval(grid.x(j))).collect();
            let ArccosSamples { h, clamped } = arccos_samples(&values)?;
            let gate = phase_gate(h, form.angle);
            gate.validate(grid)?;
            Ok((gate, clamped))
        }
    }
}

/// Finite-shot outcome counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub plus: u64,
    pub minus: u64,
}

impl Counts {
    pub fn shots(&self) -> u64 {
        self.plus + self.minus
    }

    /// `(n₊ − n₋)/shots`.
    pub fn estimate(&self) -> f64 {
        (self.plus as f64 - self.minus as f64) / self.shots() as f64
    }
}

/// Standard error of the `±1` estimator, `2√(p₊p₋/shots)`.
pub fn standard_error(p_plus: f64, shots: u64) -> f64 {
    let p = p_plus.clamp(0.0, 1.0);
    2.0 * (p * (1.0 - p) / shots as f64).sqrt()
}

/// `shots` Bernoulli(`p_plus`) draws from ChaCha8 seeded with `seed`.
pub fn sample_counts(p_plus: f64, shots: u64, seed: u64) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let dist = Bernoulli::new(p_plus.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidParameter(format!("bad probability {p_plus}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plus = (0..shots).filter(|_| dist.sample(&mut rng)).count() as u64;
    Ok(Counts { plus, minus: shots - plus })
}

/// Measures `psi` with `gate` and samples `shots` outcomes.
pub fn sample_outcomes<T: Real>(psi: &WaveFunction1D<T>, gate: &Gate<T>, shots: u64, seed: u64) -> Result<Counts> {
    let outcome = povm_measure(psi, gate)?;
    sample_counts(outcome.p_plus.to_f64_lossy(), shots, seed)
}

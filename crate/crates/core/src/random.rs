//! Smooth, localized random states for property tests and self-checks.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::lattice::{GridSpec, WaveFunction1D};
use crate::num::Real;

/// Superposition of one to four Gaussian wavepackets with random centers,
/// widths, momenta and complex weights.
///
/// Centers stay within a quarter of the grid extent (and `|x₀|, |p₀| ≤ 10`)
/// so the state is well resolved in both representations.
pub fn random_state<T: Real, R: Rng + ?Sized>(grid: &GridSpec<T>, rng: &mut R) -> Result<WaveFunction1D<T>> {
    let n = grid.len() as f64;
    let x_reach = (0.25 * n * grid.dx().to_f64_lossy()).min(10.0);
    let p_reach = (0.25 * n * grid.dp().to_f64_lossy()).min(10.0);
    let packets: Vec<(f64, f64, f64, Complex<f64>)> = (0..rng.random_range(1..=4))
        .map(|_| {
            let x0 = rng.random_range(-x_reach..=x_reach) * 0.6;
            let p0 = rng.random_range(-p_reach..=p_reach) * 0.6;
            let width = rng.random_range(0.7..1.4);
            let c = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (x0, p0, width, c)
        })
        .collect();
    WaveFunction1D::from_fn(*grid, |x| {
        let x = x.to_f64_lossy();
        let v = packets.iter().fold(Complex::new(0.0, 0.0), |acc, &(x0, p0, w, c)| {
            acc + c * Complex::from_polar((-(x - x0).powi(2) / (2.0 * w * w)).exp(), p0 * x)
        });
        Complex::new(T::of(v.re), T::of(v.im))
    })
}

/// `count` states from [`random_state`] driven by ChaCha8 seeded with `seed`.
pub fn seeded_states<T: Real>(grid: &GridSpec<T>, count: usize, seed: u64) -> Result<Vec<WaveFunction1D<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_state(grid, &mut rng)).collect()
}

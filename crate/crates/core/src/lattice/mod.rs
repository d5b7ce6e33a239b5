//! Discretized single-mode wavefunctions on a cyclic position grid.
//!
//! The grid models `P` periods of length `ℓ`, each sampled with `M` points.
//! Position and momentum grids are FFT conjugates, so every displacement by
//! a grid-commensurate amount is an exact cyclic permutation (or diagonal
//! phase) and stays exactly unitary. Wraparound across the grid edge is the
//! dominant finite-size artifact.

mod fourier;
mod wavefunction;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

pub use fourier::{
    fractional_fourier, from_momentum, quadrature_density, quadrature_wavefunction, to_momentum,
    QuadratureDensity,
};
pub(crate) use fourier::{frft_in_place, frft_inverse_in_place, quadrature_in_place, Spectral};
pub use wavefunction::{overlap, MomentumWaveFunction, QuadratureWaveFunction, WaveFunction1D};

/// Largest single-mode grid accepted by [`GridSpec::new`].
pub const MAX_GRID_POINTS: usize = 1 << 22;

/// Uniform cyclic grid carrying `periods` copies of the modular cell `[-ℓ/4, 3ℓ/4)`.
///
/// Position samples are `x_j = (j - N/2)·δx` for `j in 0..N`, with
/// `δx = ℓ/M` and `N = M·P`. Momentum samples are `p_k = (k - N/2)·δp`
/// with `δp = 2π/(N·δx) = 2π/(P·ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T: Real> {
    pub ell: T,
    pub points_per_period: usize,
    pub periods: usize,
}

impl<T: Real> GridSpec<T> {
    /// Builds a grid; `M` must be a positive multiple of 4 and `P` a positive
    /// even number, so `±ℓ/4`, `ℓ/2`, `π/ℓ` and `2π/ℓ` all land on samples.
    pub fn new(ell: T, points_per_period: usize, periods: usize) -> Result<Self> {
        if !(ell > T::zero()) || !ell.is_finite() {
            return Err(Error::InvalidGrid(format!("ell must be positive, got {ell}")));
        }
        if points_per_period == 0 || points_per_period % 4 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per period M = {points_per_period} is not a positive multiple of 4"
            )));
        }
        if periods == 0 || periods % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "period count P = {periods} is not a positive even number"
            )));
        }
        let n = points_per_period
            .checked_mul(periods)
            .ok_or(Error::GridTooLarge { requested: usize::MAX, cap: MAX_GRID_POINTS })?;
        if n > MAX_GRID_POINTS {
            return Err(Error::GridTooLarge { requested: n, cap: MAX_GRID_POINTS });
        }
        Ok(Self { ell, points_per_period, periods })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points_per_period * self.periods
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.ell / T::of_usize(self.points_per_period)
    }

    #[inline]
    pub fn dp(&self) -> T {
        T::TAU() / (T::of_usize(self.periods) * self.ell)
    }

    /// Position of sample `j`.
    #[inline]
    pub fn x(&self, j: usize) -> T {
        T::of_isize(j as isize - (self.len() / 2) as isize) * self.dx()
    }

    /// Momentum of sample `k`.
    #[inline]
    pub fn p(&self, k: usize) -> T {
        T::of_isize(k as isize - (self.len() / 2) as isize) * self.dp()
    }

    pub fn positions(&self) -> Vec<T> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }

    pub fn momenta(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.p(k)).collect()
    }

    /// Cyclic index of the sample at integer step offset `steps` from `x = 0`.
    #[inline]
    pub fn index_of_step(&self, steps: i64) -> usize {
        let n = self.len() as i64;
        (steps + n / 2).rem_euclid(n) as usize
    }

    /// Whether `δx == δp`, which lets quadrature rotations map the position
    /// grid onto itself.
    pub fn is_square(&self) -> bool {
        let (dx, dp) = (self.dx().to_f64_lossy(), self.dp().to_f64_lossy());
        (dx - dp).abs() <= 1e-12 * dx.max(dp)
    }

    /// Scale `d = ℓ/(2√π)` of the logical shear and rescaled Fourier gates.
    pub fn gate_scale(&self) -> T {
        self.ell / (T::of(2.0) * T::PI().sqrt())
    }

    /// Cell size of the modular torus, `δx̄ · δp̄`.
    pub fn modular_cell(&self) -> T {
        self.dx() * self.dp()
    }
}

/// Angle `φ` of the rotated quadrature `x̂_φ = cos φ·x̂ + sin φ·p̂`.
///
/// `φ = 0` is position and `φ = π/2` is momentum. Stored reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureAngle<T: Real>(T);

impl<T: Real> QuadratureAngle<T> {
    pub fn new(phi: T) -> Self {
        let tau = T::TAU();
        let mut r = phi % tau;
        if r < T::zero() {
            r = r + tau;
        }
        if r >= tau {
            r = T::zero();
        }
        Self(r)
    }

    pub fn position() -> Self {
        Self(T::zero())
    }

    pub fn momentum() -> Self {
        Self(T::FRAC_PI_2())
    }

    #[inline]
    pub fn radians(&self) -> T {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_figure_grid() {
        let ell = 2.0 * std::f64::consts::PI.sqrt();
        let g = GridSpec::new(ell, 16, 8).unwrap();
        assert_eq!(g.len(), 128);
        assert!((g.dx() - ell / 16.0).abs() < 1e-15);
        assert!(g.is_square());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(GridSpec::new(1.0, 3, 8), Err(Error::InvalidGrid(_))));
        assert!(matches!(GridSpec::new(1.0, 4, 3), Err(Error::InvalidGrid(_))));
        assert!(matches!(GridSpec::new(0.0, 4, 2), Err(Error::InvalidGrid(_))));
        assert!(matches!(GridSpec::new(-1.0, 4, 2), Err(Error::InvalidGrid(_))));
        assert!(matches!(GridSpec::new(1.0, 1 << 12, 1 << 12), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn momentum_period_spans_p_steps() {
        let g = GridSpec::new(1.0, 64, 32).unwrap();
        assert!((g.dp() - std::f64::consts::TAU / 32.0).abs() < 1e-15);
        assert!((g.dp() * 32.0 - std::f64::consts::TAU / g.ell).abs() < 1e-14);
        assert!((g.dx() * g.dp() * g.len() as f64 - std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn quarter_points_are_samples() {
        let g = GridSpec::new(1.0, 8, 4).unwrap();
        let xs = g.positions();
        for target in [0.0f64, 0.25, -0.25, 0.5] {
            assert!(xs.iter().any(|x| (x - target).abs() < 1e-15), "{target}");
        }
        assert_eq!(g.x(g.index_of_step(0)), 0.0);
    }

    #[test]
    fn angle_reduces_into_range() {
        let a = QuadratureAngle::new(-std::f64::consts::FRAC_PI_2);
        assert!((a.radians() - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(QuadratureAngle::new(std::f64::consts::TAU).radians(), 0.0);
    }
}

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{GridSpec, MomentumWaveFunction, QuadratureAngle, QuadratureWaveFunction, WaveFunction1D};
use crate::error::{Error, Result};
use crate::num::{cis, Real};

/// Planned forward/inverse FFTs of one length, applying the centered
/// convention `ψ̃_k = c·(-1)^k Σ_j (-1)^j ψ_j e^{-2πijk/N}`.
///
/// The `(-1)^j` factors move the origin to index `N/2`; they are exact because
/// `N/2` is even for every valid grid.
pub(crate) struct Spectral<T: Real> {
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> Spectral<T> {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    pub(crate) fn forward(&self, data: &mut [Complex<T>], scale: T) {
        Self::run(&*self.fwd, data, scale);
    }

    pub(crate) fn inverse(&self, data: &mut [Complex<T>], scale: T) {
        Self::run(&*self.inv, data, scale);
    }

    fn run(fft: &dyn Fft<T>, data: &mut [Complex<T>], scale: T) {
        for a in data.iter_mut().skip(1).step_by(2) {
            *a = -*a;
        }
        fft.process(data);
        for (k, a) in data.iter_mut().enumerate() {
            *a = if k % 2 == 0 { *a * scale } else { -*a * scale };
        }
    }

    /// Position samples to momentum samples.
    pub(crate) fn to_p(&self, grid: &GridSpec<T>, data: &mut [Complex<T>]) {
        self.forward(data, grid.dx() / T::TAU().sqrt());
    }

    /// Momentum samples to position samples.
    pub(crate) fn to_x(&self, grid: &GridSpec<T>, data: &mut [Complex<T>]) {
        self.inverse(data, grid.dp() / T::TAU().sqrt());
    }
}


/// Unitary position-to-momentum transform, `ψ̃(p) = (2π)^{-1/2}∫ψ(x)e^{-ipx}dx`.
pub fn to_momentum<T: Real>(psi: &WaveFunction1D<T>) -> MomentumWaveFunction<T> {
    let grid = *psi.grid();
    let mut data = psi.amplitudes().to_vec();
    Spectral::new(data.len()).to_p(&grid, &mut data);
    MomentumWaveFunction::from_raw(grid, data)
}

/// Inverse of [`to_momentum`].
pub fn from_momentum<T: Real>(phi: &MomentumWaveFunction<T>) -> WaveFunction1D<T> {
    let grid = *phi.grid();
    let mut data = phi.amplitudes().to_vec();
    Spectral::new(data.len()).to_x(&grid, &mut data);
    WaveFunction1D::from_raw(grid, data)
}

/// Splits `φ ∈ [0, 2π)` into quarter turns `k` and a residual in `[-π/4, π/4]`.
fn split_angle<T: Real>(phi: T) -> (usize, T) {
    let q = T::FRAC_PI_2();
    let k = (phi / q).round();
    let r = phi - k * q;
    let k = (k.to_f64_lossy() as i64).rem_euclid(4) as usize;
    (k, r)
}

fn parity<T: Real>(data: &mut [Complex<T>]) {
    data[1..].reverse();
}

/// Applies `e^{-iφ n̂}` for `|φ| ≤ π/4` by the chirp factorization
/// `e^{-i tan(φ/2) x²/2} e^{-i sin φ p²/2} e^{-i tan(φ/2) x²/2}` times `e^{iφ/2}`.
fn rotate_residual<T: Real>(spec: &Spectral<T>, grid: &GridSpec<T>, data: &mut [Complex<T>], r: T) {
    if r.abs() <= T::epsilon() {
        return;
    }
    let half = T::of(0.5);
    let t = (r * half).tan();
    let s = r.sin();
    let x_chirp: Vec<Complex<T>> = (0..data.len())
        .map(|j| {
            let x = grid.x(j);
            cis(-t * x * x * half)
        })
        .collect();
    for (a, c) in data.iter_mut().zip(&x_chirp) {
        *a = *a * c;
    }
    spec.to_p(grid, data);
    for (k, a) in data.iter_mut().enumerate() {
        let p = grid.p(k);
        *a = *a * cis(-s * p * p * half);
    }
    spec.to_x(grid, data);
    let global = cis(r * half);
    for (a, c) in data.iter_mut().zip(&x_chirp) {
        *a = *a * c * global;
    }
}

/// Quarter turns; odd `k` leaves the samples on the momentum spacing.
fn rotate_quarters<T: Real>(spec: &Spectral<T>, grid: &GridSpec<T>, data: &mut [Complex<T>], k: usize) {
    match k {
        0 => {}
        1 => spec.to_p(grid, data),
        2 => parity(data),
        _ => {
            spec.to_p(grid, data);
            parity(data);
        }
    }
}

fn unrotate_quarters<T: Real>(spec: &Spectral<T>, grid: &GridSpec<T>, data: &mut [Complex<T>], k: usize) {
    match k {
        0 => {}
        1 => spec.to_x(grid, data),
        2 => parity(data),
        _ => {
            parity(data);
            spec.to_x(grid, data);
        }
    }
}

/// Exact inverse of [`frft_in_place`] on the grid.
pub(crate) fn frft_inverse_in_place<T: Real>(
    spec: &Spectral<T>,
    grid: &GridSpec<T>,
    data: &mut [Complex<T>],
    angle: QuadratureAngle<T>,
) -> Result<()> {
    let (k, r) = split_angle(angle.radians());
    if k % 2 == 1 && !grid.is_square() {
        return Err(Error::NonSquareGrid { dx: grid.dx().to_f64_lossy(), dp: grid.dp().to_f64_lossy() });
    }
    unrotate_quarters(spec, grid, data, k);
    rotate_residual(spec, grid, data, -r);
    Ok(())
}

/// In-place `e^{-iφn̂}` on a position-sampled array.
pub(crate) fn frft_in_place<T: Real>(
    spec: &Spectral<T>,
    grid: &GridSpec<T>,
    data: &mut [Complex<T>],
    angle: QuadratureAngle<T>,
) -> Result<()> {
    let (k, r) = split_angle(angle.radians());
    if k % 2 == 1 && !grid.is_square() {
        return Err(Error::NonSquareGrid { dx: grid.dx().to_f64_lossy(), dp: grid.dp().to_f64_lossy() });
    }
    rotate_residual(spec, grid, data, r);
    rotate_quarters(spec, grid, data, k);
    Ok(())
}

/// As [`frft_in_place`] on any grid; returns the spacing of the resulting samples.
pub(crate) fn quadrature_in_place<T: Real>(
    spec: &Spectral<T>,
    grid: &GridSpec<T>,
    data: &mut [Complex<T>],
    angle: QuadratureAngle<T>,
) -> T {
    let (k, r) = split_angle(angle.radians());
    rotate_residual(spec, grid, data, r);
    rotate_quarters(spec, grid, data, k);
    if k % 2 == 1 {
        grid.dp()
    } else {
        grid.dx()
    }
}

/// Fractional Fourier transform `e^{-iφn̂}` with `n̂ = (x̂² + p̂² - 1)/2`.
///
/// The position density of the result is the `x̂_φ` quadrature density.
/// Angles near odd multiples of `π/2` need a square grid (`δx = δp`); use
/// [`quadrature_wavefunction`] otherwise.
pub fn fractional_fourier<T: Real>(psi: &WaveFunction1D<T>, angle: QuadratureAngle<T>) -> Result<WaveFunction1D<T>> {
    let grid = *psi.grid();
    let mut data = psi.amplitudes().to_vec();
    frft_in_place(&Spectral::new(data.len()), &grid, &mut data, angle)?;
    Ok(WaveFunction1D::from_raw(grid, data))
}

/// `x̂_φ`-representation amplitudes on whichever spacing the rotation lands.
pub fn quadrature_wavefunction<T: Real>(psi: &WaveFunction1D<T>, angle: QuadratureAngle<T>) -> QuadratureWaveFunction<T> {
    let grid = *psi.grid();
    let mut data = psi.amplitudes().to_vec();
    let spacing = quadrature_in_place(&Spectral::new(data.len()), &grid, &mut data, angle);
    QuadratureWaveFunction { grid, angle, spacing, amplitudes: data }
}

/// Probability density of `x̂_φ`, normalized so `Σ values·spacing = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureDensity<T: Real> {
    pub angle: T,
    pub spacing: T,
    pub values: Vec<T>,
}

impl<T: Real> QuadratureDensity<T> {
    pub fn coordinate(&self, j: usize) -> T {
        T::of_isize(j as isize - (self.values.len() / 2) as isize) * self.spacing
    }

    pub fn total(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc + *v) * self.spacing
    }

    /// `Σ h(u_j)·p(u_j)·spacing`.
    pub fn integrate(&self, h: impl Fn(T) -> T) -> T {
        self.values
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, v)| acc + h(self.coordinate(j)) * *v)
            * self.spacing
    }
}

/// `p_φ(u) = |⟨u|_φ|ψ⟩|²`.
pub fn quadrature_density<T: Real>(psi: &WaveFunction1D<T>, angle: QuadratureAngle<T>) -> QuadratureDensity<T> {
    let q = quadrature_wavefunction(psi, angle);
    QuadratureDensity { angle: angle.radians(), spacing: q.spacing, values: q.density() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> GridSpec<f64> {
        GridSpec::new(2.0 * std::f64::consts::PI.sqrt(), 16, 8).unwrap()
    }

    fn coherent(grid: GridSpec<f64>, x0: f64, p0: f64) -> WaveFunction1D<f64> {
        let amps = (0..grid.len())
            .map(|j| {
                let x = grid.x(j);
                let env = std::f64::consts::PI.powf(-0.25) * (-(x - x0).powi(2) / 2.0).exp();
                Complex::from_polar(env, p0 * x - x0 * p0 / 2.0)
            })
            .collect();
        WaveFunction1D::new(grid, amps).unwrap()
    }

    fn max_diff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = grid();
        let psi = coherent(g, 0.0, 0.0);
        let phi = to_momentum(&psi);
        for k in 0..g.len() {
            let p = g.p(k);
            let want = std::f64::consts::PI.powf(-0.25) * (-p * p / 2.0).exp();
            assert_abs_diff_eq!(phi.amplitudes()[k].re, want, epsilon = 1e-12);
            assert_abs_diff_eq!(phi.amplitudes()[k].im, 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(phi.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spike_has_flat_spectrum() {
        let g = grid();
        let mut amps = vec![Complex::new(0.0, 0.0); g.len()];
        amps[g.len() / 2] = Complex::new(1.0, 0.0);
        let psi = WaveFunction1D::normalized(g, amps).unwrap();
        let phi = to_momentum(&psi);
        let m0 = phi.amplitudes()[0].norm();
        assert!(phi.amplitudes().iter().all(|a| (a.norm() - m0).abs() < 1e-12));
        assert!(phi.amplitudes().iter().all(|a| (a.im).abs() < 1e-12 && a.re > 0.0));
    }

    #[test]
    fn momentum_round_trip() {
        let g = grid();
        let psi = coherent(g, 1.3, -0.7);
        let back = from_momentum(&to_momentum(&psi));
        assert!(max_diff(back.amplitudes(), psi.amplitudes()) < 1e-12);
    }

    #[test]
    fn frft_special_angles() {
        let g = grid();
        let psi = coherent(g, 0.9, 0.4);
        let id = fractional_fourier(&psi, QuadratureAngle::new(0.0)).unwrap();
        assert_eq!(id.amplitudes(), psi.amplitudes());
        let quarter = fractional_fourier(&psi, QuadratureAngle::momentum()).unwrap();
        assert!(max_diff(quarter.amplitudes(), to_momentum(&psi).amplitudes()) < 1e-10);
        let full = fractional_fourier(&psi, QuadratureAngle::new(std::f64::consts::TAU)).unwrap();
        assert!(max_diff(full.amplitudes(), psi.amplitudes()) < 1e-8);
    }

    #[test]
    fn frft_rotates_coherent_states() {
        let g = GridSpec::new(2.0 * std::f64::consts::PI.sqrt(), 64, 32).unwrap();
        let (x0, p0) = (1.1, -0.6);
        let psi = coherent(g, x0, p0);
        for &phi in &[0.1, 0.5, 0.7853981633974483, 1.0, 2.2, 3.5, 5.9] {
            let out = fractional_fourier(&psi, QuadratureAngle::new(phi)).unwrap();
            let (c, s) = (phi.cos(), phi.sin());
            let want = coherent(g, x0 * c + p0 * s, p0 * c - x0 * s);
            assert!(max_diff(out.amplitudes(), want.amplitudes()) < 1e-8, "phi = {phi}");
        }
    }

    #[test]
    fn odd_quarter_turns_need_square_grid() {
        let g = GridSpec::new(1.0, 64, 32).unwrap();
        assert!(!g.is_square());
        let psi = coherent(g, 0.0, 0.0);
        assert!(matches!(
            fractional_fourier(&psi, QuadratureAngle::momentum()),
            Err(Error::NonSquareGrid { .. })
        ));
        assert!(fractional_fourier(&psi, QuadratureAngle::new(std::f64::consts::PI)).is_ok());
        let q = quadrature_wavefunction(&psi, QuadratureAngle::momentum());
        assert_eq!(q.spacing, g.dp());
        assert!(max_diff(&q.amplitudes, to_momentum(&psi).amplitudes()) < 1e-12);
    }

    #[test]
    fn density_is_normalized() {
        let g = grid();
        let psi = coherent(g, 0.5, 1.5);
        for &phi in &[0.0, 0.3, 1.2, std::f64::consts::FRAC_PI_2, 4.0] {
            let d = quadrature_density(&psi, QuadratureAngle::new(phi));
            assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-10);
        }
        let d0 = quadrature_density(&psi, QuadratureAngle::position());
        assert_eq!(d0.values, psi.density());
    }
}

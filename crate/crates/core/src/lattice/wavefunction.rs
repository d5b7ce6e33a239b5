use num_complex::Complex;

use super::{GridSpec, QuadratureAngle};
use crate::error::{Error, Result};
use crate::num::{inner, norm_sqr_sum, Real};

/// Pure state sampled on the position grid, normalized so `Σ|ψ_j|²·δx = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction1D<T: Real> {
    grid: GridSpec<T>,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> WaveFunction1D<T> {
    /// Wraps amplitudes that are already normalized.
    pub fn new(grid: GridSpec<T>, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_len(&grid, amplitudes.len())?;
        let norm = (norm_sqr_sum(&amplitudes) * grid.dx()).to_f64_lossy();
        if !((norm - 1.0).abs() <= T::NORM_TOL) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { grid, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(grid: GridSpec<T>, mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_len(&grid, amplitudes.len())?;
        let norm = norm_sqr_sum(&amplitudes) * grid.dx();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm.to_f64_lossy()));
        }
        let scale = norm.sqrt().recip();
        for a in &mut amplitudes {
            *a = *a * scale;
        }
        Ok(Self { grid, amplitudes })
    }

    /// Samples `f(x_j)` and normalizes.
    pub fn from_fn(grid: GridSpec<T>, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        let amps = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self::normalized(grid, amps)
    }

    pub(crate) fn from_raw(grid: GridSpec<T>, amplitudes: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(grid.len(), amplitudes.len());
        Self { grid, amplitudes }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    /// `Σ|ψ_j|²·δx`.
    pub fn norm_sqr(&self) -> T {
        norm_sqr_sum(&self.amplitudes) * self.grid.dx()
    }

    /// Position probability density `|ψ(x_j)|²`.
    pub fn density(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Amplitude at the sample nearest to `x` (cyclic).
    pub fn at(&self, x: T) -> Complex<T> {
        let steps = (x / self.grid.dx()).round().to_f64_lossy() as i64;
        self.amplitudes[self.grid.index_of_step(steps)]
    }
}

/// Momentum-space amplitudes `ψ̃(p_k)`, normalized so `Σ|ψ̃_k|²·δp = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumWaveFunction<T: Real> {
    grid: GridSpec<T>,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> MomentumWaveFunction<T> {
    pub fn new(grid: GridSpec<T>, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_len(&grid, amplitudes.len())?;
        let norm = (norm_sqr_sum(&amplitudes) * grid.dp()).to_f64_lossy();
        if !((norm - 1.0).abs() <= T::NORM_TOL) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { grid, amplitudes })
    }

    pub(crate) fn from_raw(grid: GridSpec<T>, amplitudes: Vec<Complex<T>>) -> Self {
        Self { grid, amplitudes }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr_sum(&self.amplitudes) * self.grid.dp()
    }

    pub fn density(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Amplitudes in the eigenbasis of `x̂_φ`, sampled at `u_j = (j - N/2)·spacing`.
///
/// The spacing is `δx` for angles near a multiple of `π` and `δp` near odd
/// multiples of `π/2`; both coincide on a square grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureWaveFunction<T: Real> {
    pub grid: GridSpec<T>,
    pub angle: QuadratureAngle<T>,
    pub spacing: T,
    pub amplitudes: Vec<Complex<T>>,
}

impl<T: Real> QuadratureWaveFunction<T> {
    pub fn coordinate(&self, j: usize) -> T {
        T::of_isize(j as isize - (self.amplitudes.len() / 2) as isize) * self.spacing
    }

    pub fn density(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `⟨a|b⟩ = Σ conj(a_j) b_j δx`.
pub fn overlap<T: Real>(a: &WaveFunction1D<T>, b: &WaveFunction1D<T>) -> Result<Complex<T>> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(inner(&a.amplitudes, &b.amplitudes) * a.grid.dx())
}

fn check_len<T: Real>(grid: &GridSpec<T>, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} amplitudes, got {len}",
            grid.len()
        )));
    }
    Ok(())
}

//! Zak transform onto the `(x̄, p̄)` torus and pointwise qubit extraction.
//!
//! The torus is `x̄ ∈ [-ℓ/4, 3ℓ/4)` (M samples) by `p̄ ∈ [-π/ℓ, π/ℓ)`
//! (P samples). With the weight `√(ℓ/2π)` the discrete transform is exactly
//! unitary between `Σ|ψ|²δx` and `Σ|Ψ|²δx·δp`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{GridSpec, WaveFunction1D};
use crate::num::{cis, czero, norm_sqr_sum, Real};

/// Zak-domain amplitudes, stored row-major with `x̄` as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularWaveFunction<T: Real> {
    grid: GridSpec<T>,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> ModularWaveFunction<T> {
    pub fn new(grid: GridSpec<T>, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_len(&grid, amplitudes.len())?;
        let norm = (norm_sqr_sum(&amplitudes) * grid.modular_cell()).to_f64_lossy();
        if !((norm - 1.0).abs() <= T::NORM_TOL) {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn normalized(grid: GridSpec<T>, mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_len(&grid, amplitudes.len())?;
        let norm = norm_sqr_sum(&amplitudes) * grid.modular_cell();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm.to_f64_lossy()));
        }
        let s = norm.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a = *a * s);
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

    pub fn rows(&self) -> usize {
        self.grid.points_per_period
    }

    pub fn cols(&self) -> usize {
        self.grid.periods
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.amplitudes[j * self.grid.periods + k]
    }

    #[inline]
    pub fn xbar(&self, j: usize) -> T {
        xbar(&self.grid, j)
    }

    #[inline]
    pub fn pbar(&self, k: usize) -> T {
        pbar(&self.grid, k)
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr_sum(&self.amplitudes) * self.grid.modular_cell()
    }

    /// `|Ψ(x̄_j, p̄_k)|²`, row-major.
    pub fn density(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Amplitudes on the two-level fiber over half-torus point `(j, k)`,
    /// `j < M/2`: components along `|x̄_j, p̄_k⟩` and `|x̄_j + ℓ/2, p̄_k⟩`
    /// expressed in `gauge`.
    pub fn fiber(&self, j: usize, k: usize, gauge: Gauge) -> (Complex<T>, Complex<T>) {
        let a = self.get(j, k);
        let b = self.get(j + self.grid.points_per_period / 2, k);
        match gauge {
            Gauge::Standard => (a, b),
            Gauge::Modified => {
                let g = gauge_phase(&self.grid, k);
                (a * g, b * g.conj())
            }
        }
    }

    /// Relative Frobenius distance to the best rank-1 (separable) matrix,
    /// `sqrt(1 - σ₁²/‖Ψ‖²)` for the M×P amplitude matrix.
    pub fn rank1_residual(&self) -> T {
        let (m, p) = (self.rows(), self.cols());
        let mut gram = vec![czero::<T>(); p * p];
        for j in 0..m {
            let row = &self.amplitudes[j * p..(j + 1) * p];
            for a in 0..p {
                let ca = row[a].conj();
                for b in 0..p {
                    gram[a * p + b] = gram[a * p + b] + ca * row[b];
                }
            }
        }
        let total = (0..p).fold(T::zero(), |acc, a| acc + gram[a * p + a].re);
        let mut v: Vec<Complex<T>> = (0..p).map(|a| gram[a * p + a].re.sqrt().into()).collect();
        let mut lambda = T::zero();
        for _ in 0..500 {
            let w: Vec<Complex<T>> = (0..p)
                .map(|a| (0..p).fold(czero(), |acc, b| acc + gram[a * p + b] * v[b]))
                .collect();
            let norm = norm_sqr_sum(&w).sqrt();
            if !(norm > T::zero()) {
                break;
            }
            let next = norm / norm_sqr_sum(&v).sqrt();
            v = w.into_iter().map(|x| x / norm).collect();
            let done = (next - lambda).abs() <= T::epsilon() * next;
            lambda = next;
            if done {
                break;
            }
        }
        (T::one() - lambda / total).max(T::zero()).sqrt()
    }

    /// `Σ conj(Ψ_a)·Ψ_b·δx̄·δp̄`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(crate::num::inner(&self.amplitudes, &other.amplitudes) * self.grid.modular_cell())
    }
}

#[inline]
pub fn xbar<T: Real>(grid: &GridSpec<T>, j: usize) -> T {
    -grid.ell * T::of(0.25) + T::of_usize(j) * grid.dx()
}

#[inline]
pub fn pbar<T: Real>(grid: &GridSpec<T>, k: usize) -> T {
    -T::PI() / grid.ell + T::of_usize(k) * grid.dp()
}

/// Position-array index of `x = n·ℓ + x̄_j`.
#[inline]
pub(crate) fn position_index<T: Real>(grid: &GridSpec<T>, n: usize, j: usize) -> usize {
    let m = grid.points_per_period;
    let len = grid.len();
    (n * m + j + len / 2 + len - m / 4) % len
}

fn check_len<T: Real>(grid: &GridSpec<T>, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} modular amplitudes, got {len}",
            grid.len()
        )));
    }
    Ok(())
}

pub(crate) struct RowFft<T: Real> {
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> RowFft<T> {
    pub(crate) fn new(p: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { fwd: planner.plan_fft_forward(p), inv: planner.plan_fft_inverse(p) }
    }
}

/// `Ψ(x̄_j, p̄_k) = √(ℓ/2π)·Σ_n ψ(nℓ + x̄_j)·e^{-i n p̄_k ℓ}`.
pub fn zak_transform<T: Real>(psi: &WaveFunction1D<T>) -> ModularWaveFunction<T> {
    let grid = *psi.grid();
    let mut out = vec![czero(); grid.len()];
    zak_slice(&grid, &RowFft::new(grid.periods), psi.amplitudes(), &mut out);
    ModularWaveFunction::from_raw(grid, out)
}

/// Zak transform of raw position samples into `out` (row-major `M×P`).
pub(crate) fn zak_slice<T: Real>(grid: &GridSpec<T>, fft: &RowFft<T>, src: &[Complex<T>], out: &mut [Complex<T>]) {
    let p = grid.periods;
    let weight = (grid.ell / T::TAU()).sqrt();
    for (j, row) in out.chunks_mut(p).enumerate().take(grid.points_per_period) {
        for (n, slot) in row.iter_mut().enumerate() {
            let a = src[position_index(grid, n, j)];
            *slot = if n % 2 == 0 { a * weight } else { -a * weight };
        }
        fft.fwd.process(row);
    }
}

/// Exact inverse of [`zak_transform`].
pub fn inverse_zak<T: Real>(mwf: &ModularWaveFunction<T>) -> WaveFunction1D<T> {
    let grid = mwf.grid;
    let (m, p) = (grid.points_per_period, grid.periods);
    let fft = RowFft::<T>::new(p);
    let scale = ((grid.ell / T::TAU()).sqrt() * T::of_usize(p)).recip();
    let mut out = vec![czero(); grid.len()];
    let mut row = vec![czero(); p];
    for j in 0..m {
        row.copy_from_slice(&mwf.amplitudes[j * p..(j + 1) * p]);
        fft.inv.process(&mut row);
        for (n, a) in row.iter().enumerate() {
            out[position_index(&grid, n, j)] = if n % 2 == 0 { *a * scale } else { -*a * scale };
        }
    }
    WaveFunction1D::from_raw(grid, out)
}

/// Phase convention of the two-level basis on each fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Gauge {
    /// `{|x̄,p̄⟩, |x̄+ℓ/2,p̄⟩}`.
    Standard,
    /// `{e^{-ip̄ℓ/4}|x̄,p̄⟩, e^{ip̄ℓ/4}|x̄+ℓ/2,p̄⟩}`, in which the logical Paulis
    /// act as `σ_β` times a scalar phase.
    #[default]
    Modified,
}

/// Which torus coordinate is halved to form the qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Split {
    /// Half torus `x̄ ∈ [-ℓ/4, ℓ/4)`, partner `x̄ + ℓ/2`.
    Position,
    /// Half torus `p̄ ∈ [-π/2ℓ, π/2ℓ)`, partner `p̄ + π/ℓ` (wrapped).
    Momentum,
}

/// Pointwise qubit `f·(cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩)` over a half torus.
///
/// Arrays are row-major with shape [`LogicalDecomposition::shape`].
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalDecomposition<T: Real> {
    pub grid: GridSpec<T>,
    pub gauge: Gauge,
    pub split: Split,
    pub f: Vec<Complex<T>>,
    pub theta: Vec<T>,
    pub phi: Vec<T>,
}

impl<T: Real> LogicalDecomposition<T> {
    /// `(rows, cols)` of the half-torus arrays.
    pub fn shape(&self) -> (usize, usize) {
        let (m, p) = (self.grid.points_per_period, self.grid.periods);
        match self.split {
            Split::Position => (m / 2, p),
            Split::Momentum => (m, p / 2),
        }
    }

    /// Torus indices of the "0" point and its partner for half-torus cell `(r, c)`.
    pub fn torus_pair(&self, r: usize, c: usize) -> ((usize, usize), (usize, usize)) {
        let (m, p) = (self.grid.points_per_period, self.grid.periods);
        match self.split {
            Split::Position => ((r, c), (r + m / 2, c)),
            Split::Momentum => {
                let k0 = c + p / 4;
                ((r, k0), (r, (k0 + p / 2) % p))
            }
        }
    }

    /// Torus coordinates `(x̄, p̄)` of half-torus cell `(r, c)`.
    pub fn coordinates(&self, r: usize, c: usize) -> (T, T) {
        let ((j, k), _) = self.torus_pair(r, c);
        (xbar(&self.grid, j), pbar(&self.grid, k))
    }

    /// `Σ|f|²·δx̄·δp̄`.
    pub fn norm_sqr(&self) -> T {
        norm_sqr_sum(&self.f) * self.grid.modular_cell()
    }

    /// Component amplitudes `(a, b)` in this decomposition's gauge.
    pub fn components(&self, idx: usize) -> (Complex<T>, Complex<T>) {
        let half = T::of(0.5);
        let a = self.f[idx] * (self.theta[idx] * half).cos();
        let b = self.f[idx] * cis(self.phi[idx]) * (self.theta[idx] * half).sin();
        (a, b)
    }

    /// Rebuilds the modular wavefunction from `f`, `θ`, `φ`.
    pub fn reconstruct(&self) -> ModularWaveFunction<T> {
        let p = self.grid.periods;
        let (rows, cols) = self.shape();
        let mut out = vec![czero(); self.grid.len()];
        for r in 0..rows {
            for c in 0..cols {
                let idx = r * cols + c;
                let (mut a, mut b) = self.components(idx);
                let ((j0, k0), (j1, k1)) = self.torus_pair(r, c);
                if self.split == Split::Position && self.gauge == Gauge::Modified {
                    let g = gauge_phase(&self.grid, k0);
                    a = a * g.conj();
                    b = b * g;
                }
                out[j0 * p + k0] = a;
                out[j1 * p + k1] = b;
            }
        }
        ModularWaveFunction::from_raw(self.grid, out)
    }
}

/// `e^{ip̄ℓ/4}`, the factor taking standard to modified first-component amplitudes.
#[inline]
pub(crate) fn gauge_phase<T: Real>(grid: &GridSpec<T>, k: usize) -> Complex<T> {
    cis(pbar(grid, k) * grid.ell * T::of(0.25))
}

fn wrap_angle<T: Real>(a: T) -> T {
    let tau = T::TAU();
    let w = (a + T::PI()) % tau;
    let w = if w < T::zero() { w + tau } else { w };
    let w = w - T::PI();
    if w >= T::PI() {
        w - tau
    } else {
        w
    }
}

fn decompose<T: Real>(a: Complex<T>, b: Complex<T>) -> (Complex<T>, T, T) {
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm.to_f64_lossy() < T::TINY {
        return (czero(), T::zero(), T::zero());
    }
    let theta = T::of(2.0) * b.norm().atan2(a.norm());
    let phi = wrap_angle(b.arg() - a.arg());
    (Complex::from_polar(norm, a.arg()), theta, phi)
}

fn extract<T: Real>(mwf: &ModularWaveFunction<T>, split: Split, gauge: Gauge) -> LogicalDecomposition<T> {
    let grid = mwf.grid;
    let mut out = LogicalDecomposition { grid, gauge, split, f: Vec::new(), theta: Vec::new(), phi: Vec::new() };
    let (rows, cols) = out.shape();
    out.f.reserve(rows * cols);
    out.theta.reserve(rows * cols);
    out.phi.reserve(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let ((j0, k0), (j1, k1)) = out.torus_pair(r, c);
            let (mut a, mut b) = (mwf.get(j0, k0), mwf.get(j1, k1));
            if split == Split::Position && gauge == Gauge::Modified {
                let g = gauge_phase(&grid, k0);
                a = a * g;
                b = b * g.conj();
            }
            let (f, theta, phi) = decompose(a, b);
            out.f.push(f);
            out.theta.push(theta);
            out.phi.push(phi);
        }
    }
    out
}

/// Splits `x̄` into `[-ℓ/4, ℓ/4)` and its `+ℓ/2` partner, in the modified gauge.
pub fn extract_qubit<T: Real>(mwf: &ModularWaveFunction<T>) -> LogicalDecomposition<T> {
    extract(mwf, Split::Position, Gauge::Modified)
}

/// As [`extract_qubit`] with an explicit gauge.
pub fn extract_qubit_in<T: Real>(mwf: &ModularWaveFunction<T>, gauge: Gauge) -> LogicalDecomposition<T> {
    extract(mwf, Split::Position, gauge)
}

/// Splits `p̄` into `[-π/2ℓ, π/2ℓ)` and its `+π/ℓ` partner.
///
/// Centering the first half on `p̄ = 0` makes momentum combs (`|+_L⟩`) the
/// split's "0" state. Requires `P` divisible by 4.
pub fn extract_qubit_momentum<T: Real>(mwf: &ModularWaveFunction<T>) -> Result<LogicalDecomposition<T>> {
    if mwf.grid.periods % 4 != 0 {
        return Err(Error::InvalidGrid(format!(
            "momentum split needs P divisible by 4, got P = {}",
            mwf.grid.periods
        )));
    }
    Ok(extract(mwf, Split::Momentum, Gauge::Standard))
}

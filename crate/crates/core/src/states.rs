//! Comb-like logical states and the diffraction-grating preparation model.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{overlap, GridSpec, WaveFunction1D};
use crate::num::{cis, Real};

/// Which logical comb a spike train encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum CombOffset {
    /// Spikes at `x = nℓ`.
    #[default]
    Zero,
    /// Spikes at `x = nℓ + ℓ/2`.
    HalfPeriod,
}

/// Shape of a comb of Gaussian spikes under a Gaussian envelope.
///
/// `delta` is the spike width and `kappa` the inverse envelope width. The
/// spike spacing is always the grid's `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombParams<T: Real> {
    pub delta: T,
    pub kappa: T,
    pub offset: CombOffset,
}

/// Parameter combinations where the comb no longer approximates the ideal
/// separable form. Reported, never enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeWarning {
    /// `Δ/ℓ ≥ 0.25`.
    WideSpikes,
    /// `κℓ ≥ 0.25`.
    NarrowEnvelope,
}

impl<T: Real> CombParams<T> {
    pub fn new(delta: T, kappa: T) -> Result<Self> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("Delta must be positive, got {delta}")));
        }
        if !(kappa > T::zero()) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self { delta, kappa, offset: CombOffset::Zero })
    }

    pub fn with_offset(mut self, offset: CombOffset) -> Self {
        self.offset = offset;
        self
    }

    pub fn regime_warnings(&self, ell: T) -> Vec<RegimeWarning> {
        let quarter = T::of(0.25);
        let mut w = Vec::new();
        if self.delta / ell >= quarter {
            w.push(RegimeWarning::WideSpikes);
        }
        if self.kappa * ell >= quarter {
            w.push(RegimeWarning::NarrowEnvelope);
        }
        w
    }

    fn validate_on(&self, grid: &GridSpec<T>) -> Result<()> {
        if self.delta < T::of(2.0) * grid.dx() {
            return Err(Error::InvalidParameter(format!(
                "Delta = {} is below two grid steps (2·dx = {}); spikes are unresolvable",
                self.delta,
                T::of(2.0) * grid.dx()
            )));
        }
        Ok(())
    }
}

/// Logical Bloch-sphere angles, `θ ∈ [0, π]` and `φ ∈ [-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochAngles<T: Real> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> BlochAngles<T> {
    /// Validates `θ` and wraps `φ` into `[-π, π)`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::PI()) {
            return Err(Error::InvalidParameter(format!("theta must lie in [0, pi], got {theta}")));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("phi must be finite, got {phi}")));
        }
        let tau = T::TAU();
        let mut w = (phi + T::PI()) % tau;
        if w < T::zero() {
            w = w + tau;
        }
        let mut phi = w - T::PI();
        if phi >= T::PI() {
            phi = phi - tau;
        }
        Ok(Self { theta, phi })
    }

    pub fn zero() -> Self {
        Self { theta: T::zero(), phi: T::zero() }
    }

    pub fn one() -> Self {
        Self { theta: T::PI(), phi: T::zero() }
    }

    pub fn plus() -> Self {
        Self { theta: T::FRAC_PI_2(), phi: T::zero() }
    }

    pub fn minus() -> Self {
        Self { theta: T::FRAC_PI_2(), phi: -T::PI() }
    }

    /// Unit Bloch vector `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn vector(&self) -> [T; 3] {
        let s = self.theta.sin();
        [s * self.phi.cos(), s * self.phi.sin(), self.theta.cos()]
    }
}

fn comb_amplitudes<T: Real>(grid: &GridSpec<T>, params: &CombParams<T>) -> Vec<Complex<T>> {
    let ell = grid.ell;
    let half = T::of(0.5);
    let shift = match params.offset {
        CombOffset::Zero => T::zero(),
        CombOffset::HalfPeriod => ell * half,
    };
    let reach = (T::of(10.0) * params.delta / ell).ceil().to_f64_lossy() as i64 + 1;
    let reach = reach.min(grid.periods as i64 / 2 - 1).max(0);
    let inv_two_d2 = (T::of(2.0) * params.delta * params.delta).recip();
    (0..grid.len())
        .map(|j| {
            let x = grid.x(j);
            let u = x - shift;
            let r = u - (u / ell).round() * ell;
            let mut spikes = T::zero();
            for s in -reach..=reach {
                let d = r + T::of(s as f64) * ell;
                spikes = spikes + (-d * d * inv_two_d2).exp();
            }
            let env = (-(x * params.kappa).powi(2) * half).exp();
            Complex::new(env * spikes, T::zero())
        })
        .collect()
}

/// `e^{-(xκ)²/2}·Σ_n e^{-(x - nℓ - offset)²/(2Δ²)}`, numerically normalized.
///
/// The envelope is centered at `x = 0` for both offsets. Spikes are taken at
/// their cyclic minimum-image distance.
pub fn gaussian_comb<T: Real>(grid: &GridSpec<T>, params: &CombParams<T>) -> Result<WaveFunction1D<T>> {
    params.validate_on(grid)?;
    WaveFunction1D::normalized(*grid, comb_amplitudes(grid, params))
}

/// Non-orthogonality bookkeeping of a logical superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateQuality<T: Real> {
    /// `⟨0_L|1_L⟩` of the two normalized combs.
    pub basis_overlap: Complex<T>,
    /// Norm of the unnormalized superposition, `1` for orthogonal combs.
    pub raw_norm: T,
}

/// `⟨0_L|1_L⟩` for combs with the given shape.
pub fn basis_overlap<T: Real>(grid: &GridSpec<T>, params: &CombParams<T>) -> Result<Complex<T>> {
    let zero = gaussian_comb(grid, &params.with_offset(CombOffset::Zero))?;
    let one = gaussian_comb(grid, &params.with_offset(CombOffset::HalfPeriod))?;
    overlap(&zero, &one)
}

/// `cos(θ/2)|0_L⟩ + e^{iφ} sin(θ/2)|1_L⟩`, renormalized, plus quality metrics.
pub fn logical_state_with_quality<T: Real>(
    grid: &GridSpec<T>,
    params: &CombParams<T>,
    angles: &BlochAngles<T>,
) -> Result<(WaveFunction1D<T>, StateQuality<T>)> {
    let zero = gaussian_comb(grid, &params.with_offset(CombOffset::Zero))?;
    let one = gaussian_comb(grid, &params.with_offset(CombOffset::HalfPeriod))?;
    let half = T::of(0.5);
    let c0 = Complex::new((angles.theta * half).cos(), T::zero());
    let c1 = cis(angles.phi) * (angles.theta * half).sin();
    let amps: Vec<_> = zero.amplitudes().iter().zip(one.amplitudes()).map(|(a, b)| c0 * a + c1 * b).collect();
    let raw = WaveFunction1D::from_raw(*grid, amps);
    let quality = StateQuality { basis_overlap: overlap(&zero, &one)?, raw_norm: raw.norm_sqr().sqrt() };
    Ok((WaveFunction1D::normalized(*grid, raw.into_amplitudes())?, quality))
}

/// `cos(θ/2)|0_L⟩ + e^{iφ} sin(θ/2)|1_L⟩`, renormalized.
pub fn logical_state<T: Real>(
    grid: &GridSpec<T>,
    params: &CombParams<T>,
    angles: &BlochAngles<T>,
) -> Result<WaveFunction1D<T>> {
    logical_state_with_quality(grid, params, angles).map(|(s, _)| s)
}

/// Grating diffraction coefficient `a_m = exp(-½m²(2πΔ/L)²)`.
pub fn grating_coefficient<T: Real>(m: i64, delta: T, spacing: T) -> T {
    let w = T::TAU() * delta / spacing;
    (-T::of(0.5) * T::of((m * m) as f64) * w * w).exp()
}

/// Smallest `m ≥ 0` with `a_m < 1e-12`.
pub fn grating_cutoff<T: Real>(delta: T, spacing: T) -> usize {
    (0..)
        .find(|&m| grating_coefficient(m as i64, delta, spacing).to_f64_lossy() < 1e-12)
        .unwrap_or(0)
}

/// Envelope times the transmitted Fourier series `Σ_{|m|≤m_max} a_m e^{2πimx/L}`.
///
/// `max_order` overrides the automatic cutoff of [`grating_cutoff`].
pub fn grating_output<T: Real>(
    grid: &GridSpec<T>,
    kappa: T,
    slit_width: T,
    slit_distance: T,
    max_order: Option<usize>,
) -> Result<WaveFunction1D<T>> {
    let rel = ((slit_distance - grid.ell) / grid.ell).abs().to_f64_lossy();
    if !(rel <= 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "slit distance {slit_distance} must equal the grid period {}",
            grid.ell
        )));
    }
    if !(kappa > T::zero()) || !(slit_width > T::zero()) {
        return Err(Error::InvalidParameter("kappa and slit width must be positive".into()));
    }
    let m_max = max_order.unwrap_or_else(|| grating_cutoff(slit_width, slit_distance));
    let coeffs: Vec<T> = (1..=m_max as i64).map(|m| grating_coefficient(m, slit_width, slit_distance)).collect();
    let a0 = grating_coefficient(0, slit_width, slit_distance);
    let two = T::of(2.0);
    let amps = (0..grid.len())
        .map(|j| {
            let x = grid.x(j);
            let env = (-(x * kappa).powi(2) * T::of(0.5)).exp();
            let theta = T::TAU() * x / slit_distance;
            let series = coeffs
                .iter()
                .enumerate()
                .fold(a0, |acc, (i, a)| acc + two * *a * (T::of_usize(i + 1) * theta).cos());
            Complex::new(env * series, T::zero())
        })
        .collect();
    WaveFunction1D::normalized(*grid, amps)
}

/// Serializable description of a single-mode state preparation.
///
/// Omitted `Delta` and `kappa` default to `0.05·ℓ` and `0.05/ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum StateSpec {
    Comb {
        #[serde(rename = "Delta", default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
        #[serde(default)]
        offset: CombOffset,
    },
    Logical {
        #[serde(rename = "Delta", default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
        #[serde(default)]
        theta: f64,
        #[serde(default)]
        phi: f64,
    },
    Grating {
        #[serde(rename = "Delta", default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_order: Option<usize>,
    },
}

pub const DEFAULT_DELTA_OVER_ELL: f64 = 0.05;
pub const DEFAULT_KAPPA_TIMES_ELL: f64 = 0.05;

impl StateSpec {
    fn shape(delta: Option<f64>, kappa: Option<f64>, ell: f64) -> (f64, f64) {
        (
            delta.unwrap_or(DEFAULT_DELTA_OVER_ELL * ell),
            kappa.unwrap_or(DEFAULT_KAPPA_TIMES_ELL / ell),
        )
    }

    pub fn build<T: Real>(&self, grid: &GridSpec<T>) -> Result<WaveFunction1D<T>> {
        let ell = grid.ell.to_f64_lossy();
        match *self {
            StateSpec::Comb { delta, kappa, offset } => {
                let (d, k) = Self::shape(delta, kappa, ell);
                gaussian_comb(grid, &CombParams::new(T::of(d), T::of(k))?.with_offset(offset))
            }
            StateSpec::Logical { delta, kappa, theta, phi } => {
                let (d, k) = Self::shape(delta, kappa, ell);
                let params = CombParams::new(T::of(d), T::of(k))?;
                logical_state(grid, &params, &BlochAngles::new(T::of(theta), T::of(phi))?)
            }
            StateSpec::Grating { delta, kappa, max_order } => {
                let (d, k) = Self::shape(delta, kappa, ell);
                grating_output(grid, T::of(k), T::of(d), grid.ell, max_order)
            }
        }
    }
}

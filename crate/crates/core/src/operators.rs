//! Displacement-based gates acting on single-mode grid states.
//!
//! Every gate here is exactly unitary on the cyclic grid. Gates are described
//! by [`Gate`], which acts in place on an amplitude slice so the same kernels
//! serve single-mode states, rows/columns of two-mode states, and the
//! ancilla-controlled unitaries of the measurement circuit.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{frft_in_place, frft_inverse_in_place, GridSpec, QuadratureAngle, Spectral, WaveFunction1D};
use crate::num::{as_grid_steps, cis, imag_unit, Real};

/// Relative tolerance for recognizing a length as an integer number of grid steps.
const COMMENSURATE_TOL: f64 = 1e-9;

/// Phase-space shift `D(Δx, Δp) = exp(iΔp x̂ - iΔx p̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Displacement<T: Real> {
    pub dx: T,
    pub dp: T,
}

impl<T: Real> Displacement<T> {
    pub fn new(dx: T, dp: T) -> Self {
        Self { dx, dp }
    }

    pub fn inverse(&self) -> Self {
        Self { dx: -self.dx, dp: -self.dp }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { dx: self.dx + other.dx, dp: self.dp + other.dp }
    }

    /// `(Δx/δx, Δp/δp)` as integers, or an error if either is off-grid.
    pub fn steps(&self, grid: &GridSpec<T>) -> Result<(i64, i64)> {
        let sx = as_grid_steps(self.dx, grid.dx(), COMMENSURATE_TOL).ok_or(Error::Incommensurate {
            what: "position shift",
            value: self.dx.to_f64_lossy(),
            step: grid.dx().to_f64_lossy(),
        })?;
        let sp = as_grid_steps(self.dp, grid.dp(), COMMENSURATE_TOL).ok_or(Error::Incommensurate {
            what: "momentum kick",
            value: self.dp.to_f64_lossy(),
            step: grid.dp().to_f64_lossy(),
        })?;
        Ok((sx, sp))
    }
}

/// Phase `ω` in `D(a)·D(b) = e^{iω}·D(a + b)`, i.e. `ω = (b₁a₂ - a₁b₂)/2`
/// for `a = (a₁, b₁)`, `b = (a₂, b₂)`.
pub fn weyl_phase<T: Real>(a: &Displacement<T>, b: &Displacement<T>) -> T {
    (a.dp * b.dx - a.dx * b.dp) * T::of(0.5)
}

/// Logical Pauli displacements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// `X = D(ℓ/2, 0)`, `Z = D(0, 2π/ℓ)`, `Y = iX†Z† = D(-ℓ/2, -2π/ℓ)`.
    pub fn displacement<T: Real>(self, ell: T) -> Displacement<T> {
        let (a, b) = (ell * T::of(0.5), T::TAU() / ell);
        match self {
            Pauli::X => Displacement::new(a, T::zero()),
            Pauli::Z => Displacement::new(T::zero(), b),
            Pauli::Y => Displacement::new(-a, -b),
        }
    }
}

/// Square-wave involutions `Γ¹_β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepAxis {
    X,
    Y,
    Z,
}

/// Unit rotation axis `n` for `cos(φ/2)𝟙 + i sin(φ/2) n·Γ¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationAxis<T: Real> {
    n: [T; 3],
}

impl<T: Real> RotationAxis<T> {
    /// Accepts `n` only if `‖n‖ = 1` within `1e-12`.
    pub fn new(n: [T; 3]) -> Result<Self> {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt().to_f64_lossy();
        if !((norm - 1.0).abs() <= 1e-12_f64.max(T::epsilon().to_f64_lossy() * 8.0)) {
            return Err(Error::InvalidParameter(format!("rotation axis must be a unit vector, |n| = {norm}")));
        }
        Ok(Self { n })
    }

    /// Scales any nonzero vector to unit length.
    pub fn normalized(n: [T; 3]) -> Result<Self> {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidParameter("rotation axis must be nonzero".into()));
        }
        Ok(Self { n: [n[0] / norm, n[1] / norm, n[2] / norm] })
    }

    pub fn x() -> Self {
        Self { n: [T::one(), T::zero(), T::zero()] }
    }

    pub fn y() -> Self {
        Self { n: [T::zero(), T::one(), T::zero()] }
    }

    pub fn z() -> Self {
        Self { n: [T::zero(), T::zero(), T::one()] }
    }

    pub fn components(&self) -> [T; 3] {
        self.n
    }
}

/// A unitary acting on one mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate<T: Real> {
    Identity,
    Displace(Displacement<T>),
    Pauli { which: Pauli, dagger: bool },
    /// `e^{±ix²/(2d²)}`, `d = ℓ/(2√π)`.
    Shear { inverse: bool },
    /// Fourier transform in units of `d`.
    Fourier { inverse: bool },
    Step(StepAxis),
    Rotate { axis: RotationAxis<T>, angle: T },
    /// `e^{i·sign·h(x_φ)}` with `h` sampled on the `x̂_φ` grid.
    QuadraturePhase { h: Vec<T>, angle: QuadratureAngle<T>, sign: T },
}

impl<T: Real> Gate<T> {
    pub fn adjoint(&self) -> Self {
        match self {
            Gate::Identity => Gate::Identity,
            Gate::Displace(d) => Gate::Displace(d.inverse()),
            Gate::Pauli { which, dagger } => Gate::Pauli { which: *which, dagger: !dagger },
            Gate::Shear { inverse } => Gate::Shear { inverse: !inverse },
            Gate::Fourier { inverse } => Gate::Fourier { inverse: !inverse },
            Gate::Step(a) => Gate::Step(*a),
            Gate::Rotate { axis, angle } => Gate::Rotate { axis: *axis, angle: -*angle },
            Gate::QuadraturePhase { h, angle, sign } => {
                Gate::QuadraturePhase { h: h.clone(), angle: *angle, sign: -*sign }
            }
        }
    }

    /// Whether `U² = 𝟙` holds exactly.
    pub fn is_involution(&self) -> bool {
        matches!(self, Gate::Identity | Gate::Step(_))
    }

    /// Checks grid requirements without touching a state.
    pub fn validate(&self, grid: &GridSpec<T>) -> Result<()> {
        match self {
            Gate::Displace(d) => d.steps(grid).map(|_| ()),
            Gate::Fourier { .. } => rescale_check(grid),
            Gate::QuadraturePhase { h, angle, .. } => {
                if h.len() != grid.len() {
                    return Err(Error::InvalidParameter(format!(
                        "phase function has {} samples, grid has {}",
                        h.len(),
                        grid.len()
                    )));
                }
                let (k, _) = quarter_split(angle.radians());
                if k % 2 == 1 && !grid.is_square() {
                    return Err(Error::NonSquareGrid { dx: grid.dx().to_f64_lossy(), dp: grid.dp().to_f64_lossy() });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Applies the gate in place to position amplitudes on `grid`.
    pub(crate) fn apply_slice(&self, grid: &GridSpec<T>, spec: &Spectral<T>, data: &mut [Complex<T>]) -> Result<()> {
        match self {
            Gate::Identity => {}
            Gate::Displace(d) => {
                let (sx, sp) = d.steps(grid)?;
                displace_kernel(grid, data, sx, sp);
            }
            Gate::Pauli { which, dagger } => {
                let d = which.displacement(grid.ell);
                let d = if *dagger { d.inverse() } else { d };
                let (sx, sp) = d.steps(grid)?;
                displace_kernel(grid, data, sx, sp);
            }
            Gate::Shear { inverse } => {
                let d2 = grid.gate_scale().powi(2);
                let sign = if *inverse { -T::one() } else { T::one() };
                for (j, a) in data.iter_mut().enumerate() {
                    let x = grid.x(j);
                    *a = *a * cis(sign * x * x / (T::of(2.0) * d2));
                }
            }
            Gate::Fourier { inverse } => {
                rescale_check(grid)?;
                let d = grid.gate_scale();
                if *inverse {
                    spec.forward(data, grid.dx() / (T::TAU().sqrt() * d));
                } else {
                    spec.inverse(data, grid.dp() * d / T::TAU().sqrt());
                }
            }
            Gate::Step(axis) => step_kernel(grid, spec, data, *axis),
            Gate::Rotate { axis, angle } => rotate_kernel(grid, spec, data, axis, *angle),
            Gate::QuadraturePhase { h, angle, sign } => {
                self.validate(grid)?;
                frft_in_place(spec, grid, data, *angle)?;
                for (a, v) in data.iter_mut().zip(h) {
                    *a = *a * cis(*sign * *v);
                }
                frft_inverse_in_place(spec, grid, data, *angle)?;
            }
        }
        Ok(())
    }

    /// Applies the gate to a single-mode state.
    pub fn apply(&self, psi: &WaveFunction1D<T>) -> Result<WaveFunction1D<T>> {
        let grid = *psi.grid();
        let mut data = psi.amplitudes().to_vec();
        self.apply_slice(&grid, &Spectral::new(data.len()), &mut data)?;
        Ok(WaveFunction1D::from_raw(grid, data))
    }
}

fn quarter_split<T: Real>(phi: T) -> (usize, T) {
    let q = T::FRAC_PI_2();
    let k = (phi / q).round();
    ((k.to_f64_lossy() as i64).rem_euclid(4) as usize, phi - k * q)
}

fn rescale_check<T: Real>(grid: &GridSpec<T>) -> Result<()> {
    if grid.points_per_period != 2 * grid.periods {
        let required = grid.dp() * grid.gate_scale().powi(2);
        return Err(Error::RescaleUnsupported { dx: grid.dx().to_f64_lossy(), required: required.to_f64_lossy() });
    }
    Ok(())
}

/// `e^{-iab/2}·K_b·T_a` with `a = sx·δx`, `b = sp·δp`.
pub(crate) fn displace_kernel<T: Real>(grid: &GridSpec<T>, data: &mut [Complex<T>], sx: i64, sp: i64) {
    let n = data.len() as i64;
    let shift = sx.rem_euclid(n) as usize;
    if shift != 0 {
        data.rotate_right(shift);
    }
    if sp != 0 || sx != 0 {
        let (a, b) = (T::of(sx as f64) * grid.dx(), T::of(sp as f64) * grid.dp());
        let global = cis(-a * b * T::of(0.5));
        for (j, v) in data.iter_mut().enumerate() {
            *v = *v * cis(b * grid.x(j)) * global;
        }
    }
}

/// `s_z(x_j)`: `+1` on `[-ℓ/4, ℓ/4) mod ℓ`, else `-1`.
#[inline]
pub(crate) fn s_z<T: Real>(grid: &GridSpec<T>, j: usize) -> T {
    let m = grid.points_per_period as i64;
    let s = j as i64 - (grid.len() / 2) as i64;
    if (s + m / 4).rem_euclid(m) < m / 2 {
        T::one()
    } else {
        -T::one()
    }
}

/// `s_x(p_k) = (-1)^m` on `[-π/ℓ + 2πm/ℓ, π/ℓ + 2πm/ℓ)`.
#[inline]
pub(crate) fn s_x<T: Real>(grid: &GridSpec<T>, k: usize) -> T {
    let p = grid.periods as i64;
    let q = k as i64 - (grid.len() / 2) as i64;
    if (q + p / 2).div_euclid(p).rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}

fn step_kernel<T: Real>(grid: &GridSpec<T>, spec: &Spectral<T>, data: &mut [Complex<T>], axis: StepAxis) {
    let apply_z = |data: &mut [Complex<T>]| {
        for (j, a) in data.iter_mut().enumerate() {
            *a = *a * s_z(grid, j);
        }
    };
    let apply_x = |data: &mut [Complex<T>]| {
        spec.to_p(grid, data);
        for (k, a) in data.iter_mut().enumerate() {
            *a = *a * s_x(grid, k);
        }
        spec.to_x(grid, data);
    };
    match axis {
        StepAxis::Z => apply_z(data),
        StepAxis::X => apply_x(data),
        StepAxis::Y => {
            apply_z(data);
            apply_x(data);
            let i = imag_unit::<T>();
            data.iter_mut().for_each(|a| *a = *a * i);
        }
    }
}

fn rotate_kernel<T: Real>(
    grid: &GridSpec<T>,
    spec: &Spectral<T>,
    data: &mut [Complex<T>],
    axis: &RotationAxis<T>,
    angle: T,
) {
    let half = angle * T::of(0.5);
    let (c, s) = (half.cos(), half.sin());
    let [nx, ny, nz] = axis.n;
    let mut gz = data.to_vec();
    step_kernel(grid, spec, &mut gz, StepAxis::Z);
    let mut gx = data.to_vec();
    step_kernel(grid, spec, &mut gx, StepAxis::X);
    let mut gy = gz.clone();
    step_kernel(grid, spec, &mut gy, StepAxis::X);
    let i = imag_unit::<T>();
    for j in 0..data.len() {
        let gen = gx[j] * nx + i * gy[j] * ny + gz[j] * nz;
        data[j] = data[j] * c + i * gen * s;
    }
}

/// `D(Δx, Δp)ψ`.
pub fn displace<T: Real>(psi: &WaveFunction1D<T>, d: Displacement<T>) -> Result<WaveFunction1D<T>> {
    Gate::Displace(d).apply(psi)
}

/// `Z = e^{2πix̂/ℓ}`.
pub fn logical_z<T: Real>(psi: &WaveFunction1D<T>) -> WaveFunction1D<T> {
    pauli(psi, Pauli::Z, false)
}

/// `X = e^{-ip̂ℓ/2}`, a shift by `ℓ/2`.
pub fn logical_x<T: Real>(psi: &WaveFunction1D<T>) -> WaveFunction1D<T> {
    pauli(psi, Pauli::X, false)
}

/// `Y = iX†Z† = D(-ℓ/2, -2π/ℓ)`.
pub fn logical_y<T: Real>(psi: &WaveFunction1D<T>) -> WaveFunction1D<T> {
    pauli(psi, Pauli::Y, false)
}

/// Logical Pauli or its adjoint.
pub fn pauli<T: Real>(psi: &WaveFunction1D<T>, which: Pauli, dagger: bool) -> WaveFunction1D<T> {
    let grid = *psi.grid();
    let d = which.displacement(grid.ell);
    let d = if dagger { d.inverse() } else { d };
    let (sx, sp) = d.steps(&grid).expect("logical Paulis are commensurate on every valid grid");
    let mut data = psi.amplitudes().to_vec();
    displace_kernel(&grid, &mut data, sx, sp);
    WaveFunction1D::from_raw(grid, data)
}

/// `e^{ix²/(2d²)}ψ`.
pub fn shear<T: Real>(psi: &WaveFunction1D<T>) -> WaveFunction1D<T> {
    Gate::Shear { inverse: false }.apply(psi).expect("shear is defined on every grid")
}

/// `F ψ` with `(Fψ)(x) = (2π)^{-1/2} d^{-1} ∫ψ(y) e^{ixy/d²} dy`; needs `M = 2P`.
pub fn rescaled_fourier<T: Real>(psi: &WaveFunction1D<T>) -> Result<WaveFunction1D<T>> {
    Gate::Fourier { inverse: false }.apply(psi)
}

/// `Γ¹_β ψ`.
pub fn gamma1_step<T: Real>(psi: &WaveFunction1D<T>, axis: StepAxis) -> WaveFunction1D<T> {
    Gate::Step(axis).apply(psi).expect("step operators are defined on every grid")
}

/// `(cos(φ/2)𝟙 + i sin(φ/2) n·Γ¹)ψ`.
pub fn rotate<T: Real>(psi: &WaveFunction1D<T>, axis: &RotationAxis<T>, angle: T) -> WaveFunction1D<T> {
    Gate::Rotate { axis: *axis, angle }.apply(psi).expect("rotations are defined on every grid")
}

//! Two-mode states on product grids, CNOT, joint quadrature statistics.
//!
//! Amplitudes are stored row-major: index `i·N₂ + j` holds `ψ(x₁_i, x₂_j)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{quadrature_in_place, GridSpec, QuadratureAngle, QuadratureDensity, Spectral, WaveFunction1D};
use crate::modular::{gauge_phase, zak_slice, RowFft};
use crate::num::{as_grid_steps, czero, inner, norm_sqr_sum, Real};
use crate::operators::{displace, gamma1_step, Gate};
use crate::readout::{quadrature_form, Observable};
use crate::states::{logical_state, BlochAngles, CombParams};

/// Default cap on `N₁·N₂`.
pub const DEFAULT_JOINT_CAP: usize = 1 << 22;

/// Which factor of the product space an operation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

impl Mode {
    pub fn other(self) -> Self {
        match self {
            Mode::A => Mode::B,
            Mode::B => Mode::A,
        }
    }
}

/// Normalized pure state of two modes.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction2D<T: Real> {
    grids: [GridSpec<T>; 2],
    amplitudes: Vec<Complex<T>>,
}

fn check_cap(n1: usize, n2: usize, cap: usize) -> Result<()> {
    match n1.checked_mul(n2) {
        Some(n) if n <= cap => Ok(()),
        _ => Err(Error::MemoryCap { requested: n1.saturating_mul(n2), cap }),
    }
}

impl<T: Real> WaveFunction2D<T> {
    pub fn new(grids: [GridSpec<T>; 2], amplitudes: Vec<Complex<T>>) -> Result<Self> {
        Self::with_cap(grids, amplitudes, DEFAULT_JOINT_CAP)
    }

    /// As [`WaveFunction2D::new`] with an explicit amplitude cap.
    pub fn with_cap(grids: [GridSpec<T>; 2], amplitudes: Vec<Complex<T>>, cap: usize) -> Result<Self> {
        check_cap(grids[0].len(), grids[1].len(), cap)?;
        if amplitudes.len() != grids[0].len() * grids[1].len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} joint amplitudes, got {}",
                grids[0].len() * grids[1].len(),
                amplitudes.len()
            )));
        }
        let out = Self { grids, amplitudes };
        let norm = out.norm_sqr().to_f64_lossy();
        if (norm - 1.0).abs() > T::NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(out)
    }

    /// Rescales to unit norm.
    pub fn normalized(grids: [GridSpec<T>; 2], mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let cell = grids[0].dx() * grids[1].dx();
        let norm = (norm_sqr_sum(&amplitudes) * cell).sqrt();
        if !(norm.to_f64_lossy() > T::TINY) {
            return Err(Error::InvalidParameter("cannot normalize a zero state".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a = *a / norm);
        Self::new(grids, amplitudes)
    }

    pub(crate) fn from_raw(grids: [GridSpec<T>; 2], amplitudes: Vec<Complex<T>>) -> Self {
        Self { grids, amplitudes }
    }

    pub fn grids(&self) -> &[GridSpec<T>; 2] {
        &self.grids
    }

    pub fn grid(&self, mode: Mode) -> &GridSpec<T> {
        &self.grids[mode as usize]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.grids[0].len(), self.grids[1].len())
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.amplitudes[i * self.grids[1].len() + j]
    }

    fn cell(&self) -> T {
        self.grids[0].dx() * self.grids[1].dx()
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr_sum(&self.amplitudes) * self.cell()
    }

    /// `|ψ(x₁, x₂)|²`, row-major.
    pub fn density(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Position density of one mode with the other traced out.
    pub fn marginal(&self, mode: Mode) -> Vec<T> {
        let (n1, n2) = self.shape();
        match mode {
            Mode::A => (0..n1)
                .map(|i| norm_sqr_sum(&self.amplitudes[i * n2..(i + 1) * n2]) * self.grids[1].dx())
                .collect(),
            Mode::B => {
                let mut out = vec![T::zero(); n2];
                for row in self.amplitudes.chunks(n2) {
                    for (o, a) in out.iter_mut().zip(row) {
                        *o = *o + a.norm_sqr();
                    }
                }
                out.iter_mut().for_each(|o| *o = *o * self.grids[0].dx());
                out
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.grids != other.grids {
            return Err(Error::GridMismatch);
        }
        Ok(inner(&self.amplitudes, &other.amplitudes) * self.cell())
    }

    /// Normalized state of the other mode after projecting `mode` onto `a`,
    /// together with the projection probability `‖⟨a|ψ⟩‖²`.
    pub fn condition_on(&self, mode: Mode, a: &WaveFunction1D<T>) -> Result<(T, WaveFunction1D<T>)> {
        if a.grid() != self.grid(mode) {
            return Err(Error::GridMismatch);
        }
        let (n1, n2) = self.shape();
        let w = a.grid().dx();
        let av = a.amplitudes();
        let rest: Vec<Complex<T>> = match mode {
            Mode::A => (0..n2)
                .map(|j| (0..n1).fold(czero(), |acc, i| acc + av[i].conj() * self.amplitudes[i * n2 + j]) * w)
                .collect(),
            Mode::B => (0..n1).map(|i| inner(av, &self.amplitudes[i * n2..(i + 1) * n2]) * w).collect(),
        };
        let other = *self.grid(mode.other());
        let prob = norm_sqr_sum(&rest) * other.dx();
        Ok((prob, WaveFunction1D::normalized(other, rest)?))
    }

    /// Applies `f` to every one-mode slice along `mode`.
    fn map_slices(&self, mode: Mode, mut f: impl FnMut(&mut [Complex<T>]) -> Result<()>) -> Result<Self> {
        let (n1, n2) = self.shape();
        let mut out = self.amplitudes.clone();
        match mode {
            Mode::B => {
                for row in out.chunks_mut(n2) {
                    f(row)?;
                }
            }
            Mode::A => {
                let mut col = vec![czero(); n1];
                for j in 0..n2 {
                    for i in 0..n1 {
                        col[i] = out[i * n2 + j];
                    }
                    f(&mut col)?;
                    for i in 0..n1 {
                        out[i * n2 + j] = col[i];
                    }
                }
            }
        }
        Ok(Self::from_raw(self.grids, out))
    }

    /// `U ⊗ 𝟙` or `𝟙 ⊗ U`.
    pub fn apply_local(&self, mode: Mode, gate: &Gate<T>) -> Result<Self> {
        let grid = *self.grid(mode);
        gate.validate(&grid)?;
        let spec = Spectral::new(grid.len());
        self.map_slices(mode, |s| gate.apply_slice(&grid, &spec, s))
    }
}

/// `a ⊗ b`.
pub fn tensor<T: Real>(a: &WaveFunction1D<T>, b: &WaveFunction1D<T>) -> Result<WaveFunction2D<T>> {
    tensor_with_cap(a, b, DEFAULT_JOINT_CAP)
}

pub fn tensor_with_cap<T: Real>(a: &WaveFunction1D<T>, b: &WaveFunction1D<T>, cap: usize) -> Result<WaveFunction2D<T>> {
    check_cap(a.grid().len(), b.grid().len(), cap)?;
    let mut amps = Vec::with_capacity(a.grid().len() * b.grid().len());
    for x in a.amplitudes() {
        amps.extend(b.amplitudes().iter().map(|y| *x * *y));
    }
    Ok(WaveFunction2D::from_raw([*a.grid(), *b.grid()], amps))
}

/// The four logical Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellState {
    /// `(|00⟩ + |11⟩)/√2`
    PhiPlus,
    /// `(|00⟩ - |11⟩)/√2`
    PhiMinus,
    /// `(|01⟩ + |10⟩)/√2`
    PsiPlus,
    /// `(|01⟩ - |10⟩)/√2`
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi_plus",
            BellState::PhiMinus => "phi_minus",
            BellState::PsiPlus => "psi_plus",
            BellState::PsiMinus => "psi_minus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Coefficients on `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn logical_vector<T: Real>(self) -> [Complex<T>; 4] {
        let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
        let (z, p, m) = (czero(), Complex::new(h, T::zero()), Complex::new(-h, T::zero()));
        match self {
            BellState::PhiPlus => [p, z, z, p],
            BellState::PhiMinus => [p, z, z, m],
            BellState::PsiPlus => [z, p, p, z],
            BellState::PsiMinus => [z, p, m, z],
        }
    }
}

/// Entangled pair built from the comb logical states, renormalized.
pub fn bell_logical<T: Real>(grid: &GridSpec<T>, params: &CombParams<T>, which: BellState) -> Result<WaveFunction2D<T>> {
    check_cap(grid.len(), grid.len(), DEFAULT_JOINT_CAP)?;
    let zero = logical_state(grid, params, &BlochAngles::zero())?;
    let one = logical_state(grid, params, &BlochAngles::one())?;
    let basis = [&zero, &one];
    let coeffs = which.logical_vector::<T>();
    let n = grid.len();
    let mut amps = vec![czero(); n * n];
    for (idx, c) in coeffs.iter().enumerate() {
        if c.norm_sqr() == T::zero() {
            continue;
        }
        let (a, b) = (basis[idx >> 1].amplitudes(), basis[idx & 1].amplitudes());
        for (i, x) in a.iter().enumerate() {
            let cx = *c * *x;
            for (slot, y) in amps[i * n..(i + 1) * n].iter_mut().zip(b) {
                *slot = *slot + cx * *y;
            }
        }
    }
    WaveFunction2D::normalized([*grid, *grid], amps)
}

fn control_ratio<T: Real>(grids: &[GridSpec<T>; 2]) -> Result<i64> {
    let (a, b) = (grids[0].dx(), grids[1].dx());
    as_grid_steps(a, b, 1e-9).filter(|r| *r > 0).ok_or_else(|| Error::Incommensurate {
        what: "control spacing".into(),
        value: a.to_f64_lossy(),
        step: b.to_f64_lossy(),
    })
}

fn controlled_shift<T: Real>(psi: &WaveFunction2D<T>, sign: i64) -> Result<WaveFunction2D<T>> {
    let ratio = control_ratio(&psi.grids)?;
    let (n1, n2) = psi.shape();
    let mut out = psi.amplitudes.clone();
    for (i, row) in out.chunks_mut(n2).enumerate() {
        let steps = sign * ratio * (i as i64 - (n1 / 2) as i64);
        let s = steps.rem_euclid(n2 as i64) as usize;
        row.rotate_right(s);
    }
    Ok(WaveFunction2D::from_raw(psi.grids, out))
}

/// `e^{-ix̂_A p̂_B}`: shifts mode B by the position of mode A, cyclically.
///
/// Needs `δx_A` to be a positive integer multiple of `δx_B`.
pub fn cnot<T: Real>(psi: &WaveFunction2D<T>) -> Result<WaveFunction2D<T>> {
    controlled_shift(psi, 1)
}

/// Inverse of [`cnot`].
pub fn cnot_adjoint<T: Real>(psi: &WaveFunction2D<T>) -> Result<WaveFunction2D<T>> {
    controlled_shift(psi, -1)
}

/// Joint density of `(x̂_{φ₁}, x̂_{φ₂})`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDensity<T: Real> {
    pub angles: [T; 2],
    pub spacings: [T; 2],
    pub shape: (usize, usize),
    pub values: Vec<T>,
}

impl<T: Real> JointDensity<T> {
    pub fn coordinate(&self, mode: Mode, idx: usize) -> T {
        let n = if mode == Mode::A { self.shape.0 } else { self.shape.1 };
        T::of_isize(idx as isize - (n / 2) as isize) * self.spacings[mode as usize]
    }

    fn cell(&self) -> T {
        self.spacings[0] * self.spacings[1]
    }

    pub fn total(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a + *v) * self.cell()
    }

    /// Marginal density of one mode.
    pub fn marginal(&self, mode: Mode) -> QuadratureDensity<T> {
        let (n1, n2) = self.shape;
        let values = match mode {
            Mode::A => self
                .values
                .chunks(n2)
                .map(|r| r.iter().fold(T::zero(), |a, v| a + *v) * self.spacings[1])
                .collect(),
            Mode::B => (0..n2)
                .map(|j| (0..n1).fold(T::zero(), |a, i| a + self.values[i * n2 + j]) * self.spacings[0])
                .collect(),
        };
        QuadratureDensity { angle: self.angles[mode as usize], spacing: self.spacings[mode as usize], values }
    }

    /// `∬ f(u₁, u₂) p(u₁, u₂) du₁ du₂`.
    pub fn integrate(&self, f: impl Fn(T, T) -> T) -> T {
        let n2 = self.shape.1;
        let mut acc = T::zero();
        for (i, row) in self.values.chunks(n2).enumerate() {
            let u1 = self.coordinate(Mode::A, i);
            for (j, v) in row.iter().enumerate() {
                acc = acc + f(u1, self.coordinate(Mode::B, j)) * *v;
            }
        }
        acc * self.cell()
    }
}

/// `p(u₁, u₂) = |⟨u₁|_{φ₁}⟨u₂|_{φ₂}|ψ⟩|²`.
pub fn joint_quadrature_density<T: Real>(
    psi: &WaveFunction2D<T>,
    angle_a: QuadratureAngle<T>,
    angle_b: QuadratureAngle<T>,
) -> JointDensity<T> {
    let mut state = psi.clone();
    let mut spacings = [T::zero(); 2];
    for (mode, angle) in [(Mode::A, angle_a), (Mode::B, angle_b)] {
        let grid = *psi.grid(mode);
        let spec = Spectral::new(grid.len());
        let mut spacing = grid.dx();
        state = state
            .map_slices(mode, |s| {
                spacing = quadrature_in_place(&spec, &grid, s, angle);
                Ok(())
            })
            .expect("quadrature rotation is infallible");
        spacings[mode as usize] = spacing;
    }
    JointDensity {
        angles: [angle_a.radians(), angle_b.radians()],
        spacings,
        shape: psi.shape(),
        values: state.density(),
    }
}

/// `⟨F_A(x̂_{φ₁}) ⊗ F_B(x̂_{φ₂})⟩` from the joint quadrature density, with the
/// angles and functions taken from the quadrature forms of the observables.
pub fn correlator<T: Real>(psi: &WaveFunction2D<T>, obs_a: &Observable<T>, obs_b: &Observable<T>) -> Result<T> {
    let fa = quadrature_form(obs_a, psi.grids[0].ell)?;
    let fb = quadrature_form(obs_b, psi.grids[1].ell)?;
    let density = joint_quadrature_density(psi, fa.angle, fb.angle);
    Ok(density.integrate(|u1, u2| fa.function.eval(u1) * fb.function.eval(u2)))
}

/// Applies an observable's operator to every slice along `mode` (not normalized).
fn act_local<T: Real>(psi: &WaveFunction2D<T>, mode: Mode, obs: &Observable<T>) -> Result<Vec<Complex<T>>> {
    let grid = *psi.grid(mode);
    let raw = |s: &[Complex<T>]| WaveFunction1D::from_raw(grid, s.to_vec());
    let out = psi.map_slices(mode, |s| {
        let w = raw(s);
        let result: Vec<Complex<T>> = match obs {
            Observable::Step(axis) => gamma1_step(&w, *axis).into_amplitudes(),
            Observable::Fourier(o) => {
                let mut acc = vec![czero(); s.len()];
                for (n, m, d) in o.terms() {
                    let moved = displace(&w, o.displacement(n, m))?;
                    for (a, v) in acc.iter_mut().zip(moved.amplitudes()) {
                        *a = *a + d * *v;
                    }
                }
                acc
            }
        };
        s.copy_from_slice(&result);
        Ok(())
    })?;
    Ok(out.amplitudes)
}

/// `⟨ψ|O ⊗ 𝟙|ψ⟩` or `⟨ψ|𝟙 ⊗ O|ψ⟩`, evaluated from operator actions.
pub fn expectation_local<T: Real>(psi: &WaveFunction2D<T>, mode: Mode, obs: &Observable<T>) -> Result<T> {
    let moved = act_local(psi, mode, obs)?;
    Ok((inner(&psi.amplitudes, &moved) * psi.cell()).re)
}

/// `⟨ψ|O_A ⊗ O_B|ψ⟩` from operator actions, independent of any quadrature form.
pub fn correlator_exact<T: Real>(psi: &WaveFunction2D<T>, obs_a: &Observable<T>, obs_b: &Observable<T>) -> Result<T> {
    let first = WaveFunction2D::from_raw(psi.grids, act_local(psi, Mode::A, obs_a)?);
    let both = act_local(&first, Mode::B, obs_b)?;
    Ok((inner(&psi.amplitudes, &both) * psi.cell()).re)
}

/// Two-qubit density matrix `Σ v v†` summed over fiber pairs, where `v` are
/// the modified-gauge logical components of the joint Zak transform.
/// Basis order `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn logical_density<T: Real>(psi: &WaveFunction2D<T>) -> [[Complex<T>; 4]; 4] {
    let [ga, gb] = psi.grids;
    let (n1, n2) = psi.shape();
    let mut stage = vec![czero(); n1 * n2];
    let fft_b = RowFft::new(gb.periods);
    for (src, dst) in psi.amplitudes.chunks(n2).zip(stage.chunks_mut(n2)) {
        zak_slice(&gb, &fft_b, src, dst);
    }
    let fft_a = RowFft::new(ga.periods);
    let mut col = vec![czero(); n1];
    let mut zcol = vec![czero(); n1];
    for c in 0..n2 {
        for i in 0..n1 {
            col[i] = stage[i * n2 + c];
        }
        zak_slice(&ga, &fft_a, &col, &mut zcol);
        for i in 0..n1 {
            stage[i * n2 + c] = zcol[i];
        }
    }
    let (ma, pa, mb, pb) = (ga.points_per_period, ga.periods, gb.points_per_period, gb.periods);
    let at = |ja: usize, ka: usize, jb: usize, kb: usize| stage[(ja * pa + ka) * n2 + jb * pb + kb];
    let mut rho = [[czero::<T>(); 4]; 4];
    for ja in 0..ma / 2 {
        for ka in 0..pa {
            let g_a = gauge_phase(&ga, ka);
            for jb in 0..mb / 2 {
                for kb in 0..pb {
                    let g_b = gauge_phase(&gb, kb);
                    let v = [
                        at(ja, ka, jb, kb) * g_a * g_b,
                        at(ja, ka, jb + mb / 2, kb) * g_a * g_b.conj(),
                        at(ja + ma / 2, ka, jb, kb) * g_a.conj() * g_b,
                        at(ja + ma / 2, ka, jb + mb / 2, kb) * g_a.conj() * g_b.conj(),
                    ];
                    for r in 0..4 {
                        for c in 0..4 {
                            rho[r][c] = rho[r][c] + v[r] * v[c].conj();
                        }
                    }
                }
            }
        }
    }
    let w = ga.modular_cell() * gb.modular_cell();
    for row in rho.iter_mut() {
        for e in row.iter_mut() {
            *e = *e * w;
        }
    }
    rho
}

/// `⟨t|ρ|t⟩` for the logical density of `psi` and a two-qubit target.
pub fn logical_fidelity<T: Real>(psi: &WaveFunction2D<T>, target: &[Complex<T>; 4]) -> T {
    let rho = logical_density(psi);
    let mut acc = czero::<T>();
    for r in 0..4 {
        for c in 0..4 {
            acc = acc + target[r].conj() * rho[r][c] * target[c];
        }
    }
    acc.re
}

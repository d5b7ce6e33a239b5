//! Periodic phase-space observables and Bloch-vector readout.
//!
//! An observable `F = Σ d_{n,m} e^{2πinx̂/L - iL′mp̂}` is a sum of
//! displacements `D(L′m, 2πn/L)`. When every displacement lies on the
//! lattice `(α·ℓ/2, β·2π/ℓ)` with one shared parity pattern of `(α, β)`, `F`
//! acts on each modular fiber as `ζ(x̄, p̄)·σ_β` in the modified gauge:
//! `(even, odd)` gives `Γ_z`, `(odd, even)` gives `Γ_x`, `(odd, odd)` gives `Γ_y`.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{overlap, quadrature_density, GridSpec, QuadratureAngle, WaveFunction1D};
use crate::modular::{extract_qubit, pbar, xbar, zak_transform, Gauge, LogicalDecomposition, ModularWaveFunction, Split};
use crate::num::{as_grid_steps, cis, czero, Real};
use crate::operators::{displace, gamma1_step, Displacement, StepAxis};

/// Which Pauli-like structure an observable has on the modular fibers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BetaClass {
    None,
    X,
    Y,
    Z,
}

/// Double-Fourier coefficient table `d_{n,m}` with periods `L`, `L′`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceObservable<T: Real> {
    period_x: T,
    period_p: T,
    coeffs: BTreeMap<(i64, i64), Complex<T>>,
}

impl<T: Real> PhaseSpaceObservable<T> {
    /// Builds a table; repeated `(n, m)` keys are summed and coefficients with
    /// `|d| < 1e-14` are dropped.
    pub fn new(period_x: T, period_p: T, terms: impl IntoIterator<Item = (i64, i64, Complex<T>)>) -> Result<Self> {
        for (name, v) in [("L", period_x), ("L'", period_p)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("period {name} must be positive, got {v}")));
            }
        }
        let mut coeffs = BTreeMap::new();
        for (n, m, d) in terms {
            let e = coeffs.entry((n, m)).or_insert_with(czero);
            *e = *e + d;
        }
        coeffs.retain(|_, d: &mut Complex<T>| d.norm().to_f64_lossy() >= 1e-14);
        Ok(Self { period_x, period_p, coeffs })
    }

    /// `Re Z = cos(2πx̂/ℓ)`.
    pub fn re_z(ell: T) -> Self {
        let h = Complex::new(T::of(0.5), T::zero());
        Self::new(ell, ell, [(1, 0, h), (-1, 0, h)]).expect("positive period")
    }

    /// `Re X = cos(p̂ℓ/2)`.
    pub fn re_x(ell: T) -> Self {
        let h = Complex::new(T::of(0.5), T::zero());
        let half = ell * T::of(0.5);
        Self::new(half, half, [(0, 1, h), (0, -1, h)]).expect("positive period")
    }

    /// `Re Y = cos(2πx̂/ℓ - p̂ℓ/2)`.
    pub fn re_y(ell: T) -> Self {
        let h = Complex::new(T::of(0.5), T::zero());
        Self::new(ell, ell * T::of(0.5), [(1, 1, h), (-1, -1, h)]).expect("positive period")
    }

    /// Same periods with one coefficient added.
    pub fn with_term(&self, n: i64, m: i64, d: Complex<T>) -> Self {
        let terms = self.terms().chain(std::iter::once((n, m, d)));
        Self::new(self.period_x, self.period_p, terms.collect::<Vec<_>>()).expect("periods already validated")
    }

    pub fn period_x(&self) -> T {
        self.period_x
    }

    pub fn period_p(&self) -> T {
        self.period_p
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64, Complex<T>)> + '_ {
        self.coeffs.iter().map(|(&(n, m), &d)| (n, m, d))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `D(L′m, 2πn/L)`, the displacement carried by term `(n, m)`.
    pub fn displacement(&self, n: i64, m: i64) -> Displacement<T> {
        Displacement::new(self.period_p * T::of(m as f64), T::TAU() * T::of(n as f64) / self.period_x)
    }

    /// `Σ|d|²`.
    pub fn l2_norm_sqr(&self) -> T {
        self.coeffs.values().fold(T::zero(), |a, d| a + d.norm_sqr())
    }

    /// `Σ|d|`, an upper bound on the operator norm.
    pub fn l1_norm(&self) -> T {
        self.coeffs.values().fold(T::zero(), |a, d| a + d.norm())
    }

    /// `d_{-n,-m} = conj(d_{n,m})` for every term.
    pub fn is_hermitian(&self) -> bool {
        self.coeffs.iter().all(|(&(n, m), d)| {
            let partner = self.coeffs.get(&(-n, -m)).copied().unwrap_or_else(czero);
            (partner - d.conj()).norm().to_f64_lossy() <= 1e-12
        })
    }

    /// Terms as `(α, β, d)` with `D = D(α·ℓ/2, β·2π/ℓ)`, if all are on that lattice.
    fn lattice_terms(&self, ell: T) -> Option<Vec<(i64, i64, Complex<T>)>> {
        self.terms()
            .map(|(n, m, d)| {
                let disp = self.displacement(n, m);
                let alpha = as_grid_steps(disp.dx, ell * T::of(0.5), 1e-9)?;
                let beta = as_grid_steps(disp.dp, T::TAU() / ell, 1e-9)?;
                Some((alpha, beta, d))
            })
            .collect()
    }
}

/// JSON form `{"L": …, "Lp": …, "coeffs": [[n, m, re, im], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSpec {
    #[serde(rename = "L")]
    pub period_x: f64,
    #[serde(rename = "Lp")]
    pub period_p: f64,
    pub coeffs: Vec<[f64; 4]>,
}

impl ObservableSpec {
    pub fn build<T: Real>(&self) -> Result<PhaseSpaceObservable<T>> {
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if c[0].fract() != 0.0 || c[1].fract() != 0.0 {
                return Err(Error::Format(format!("coefficient indices must be integers, got ({}, {})", c[0], c[1])));
            }
            terms.push((c[0] as i64, c[1] as i64, Complex::new(T::of(c[2]), T::of(c[3]))));
        }
        PhaseSpaceObservable::new(T::of(self.period_x), T::of(self.period_p), terms)
    }
}

impl<T: Real> From<&PhaseSpaceObservable<T>> for ObservableSpec {
    fn from(o: &PhaseSpaceObservable<T>) -> Self {
        Self {
            period_x: o.period_x.to_f64_lossy(),
            period_p: o.period_p.to_f64_lossy(),
            coeffs: o
                .terms()
                .map(|(n, m, d)| [n as f64, m as f64, d.re.to_f64_lossy(), d.im.to_f64_lossy()])
                .collect(),
        }
    }
}

/// Classifies a coefficient table against the grid period `ℓ`.
///
/// Returns `None` unless the table is Hermitian, every displacement sits on
/// the `(ℓ/2, 2π/ℓ)` lattice, and all share one of the three parity patterns.
pub fn certify_class<T: Real>(obs: &PhaseSpaceObservable<T>, ell: T) -> BetaClass {
    if obs.is_empty() || !obs.is_hermitian() {
        return BetaClass::None;
    }
    let Some(terms) = obs.lattice_terms(ell) else {
        return BetaClass::None;
    };
    let pattern = |a: i64, b: i64| (a.rem_euclid(2), b.rem_euclid(2));
    let first = pattern(terms[0].0, terms[0].1);
    if terms.iter().any(|&(a, b, _)| pattern(a, b) != first) {
        return BetaClass::None;
    }
    match first {
        (0, 1) => BetaClass::Z,
        (1, 0) => BetaClass::X,
        (1, 1) => BetaClass::Y,
        _ => BetaClass::None,
    }
}

/// 2×2 action of `obs` on the fiber over `(x̄, p̄)` in the modified gauge,
/// rows/columns ordered `(|x̄⟩, |x̄+ℓ/2⟩)`. `None` if any term is off-lattice.
pub fn fiber_matrix<T: Real>(obs: &PhaseSpaceObservable<T>, ell: T, xb: T, pb: T) -> Option<[[Complex<T>; 2]; 2]> {
    let terms = obs.lattice_terms(ell)?;
    let mut out = [[czero(); 2]; 2];
    for (alpha, beta, d) in terms {
        let a = T::of(alpha as f64) * ell * T::of(0.5);
        let b = T::of(beta as f64) * T::TAU() / ell;
        let ph = d * cis(-T::FRAC_PI_2() * T::of((alpha * beta) as f64) + b * xb - pb * a);
        let sign = if beta.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        if alpha.rem_euclid(2) == 0 {
            out[0][0] = out[0][0] + ph;
            out[1][1] = out[1][1] + ph * sign;
        } else {
            out[0][1] = out[0][1] + ph;
            out[1][0] = out[1][0] + ph * sign;
        }
    }
    Some(out)
}

/// `ζ_β` sampled on the half torus `[-ℓ/4, ℓ/4) × [-π/ℓ, π/ℓ)`, row-major (M/2 × P).
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaGrid<T: Real> {
    pub class: BetaClass,
    pub values: Vec<T>,
}

impl<T: Real> ZetaGrid<T> {
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a.max(v.abs()))
    }
}

/// Evaluates `ζ_β` for a certified table; errors if uncertified or if the
/// series is not real within `1e-10`.
pub fn zeta_function<T: Real>(obs: &PhaseSpaceObservable<T>, grid: &GridSpec<T>) -> Result<ZetaGrid<T>> {
    let class = certify_class(obs, grid.ell);
    if class == BetaClass::None {
        return Err(Error::Uncertified);
    }
    let (rows, cols) = (grid.points_per_period / 2, grid.periods);
    let mut values = Vec::with_capacity(rows * cols);
    let tol = 1e-10 * obs.l1_norm().to_f64_lossy().max(1.0);
    for j in 0..rows {
        for k in 0..cols {
            let m = fiber_matrix(obs, grid.ell, xbar(grid, j), pbar(grid, k)).ok_or(Error::Uncertified)?;
            let z = match class {
                BetaClass::Z => m[0][0],
                BetaClass::X => m[0][1],
                BetaClass::Y => Complex::new(T::zero(), -T::one()) * m[1][0],
                BetaClass::None => unreachable!(),
            };
            if z.im.abs().to_f64_lossy() > tol {
                return Err(Error::NonHermitian(format!("zeta has imaginary part {} at ({j}, {k})", z.im)));
            }
            values.push(z.re);
        }
    }
    Ok(ZetaGrid { class, values })
}

/// A readout observable: a coefficient table or one of the `Γ¹_β` square waves.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable<T: Real> {
    Fourier(PhaseSpaceObservable<T>),
    Step(StepAxis),
}

/// Names accepted by [`Observable::builtin`].
pub const BUILTIN_OBSERVABLES: [&str; 6] = ["ReX", "ReY", "ReZ", "G1X", "G1Y", "G1Z"];

impl<T: Real> Observable<T> {
    pub fn builtin(name: &str, ell: T) -> Option<Self> {
        Some(match name {
            "ReX" => Observable::Fourier(PhaseSpaceObservable::re_x(ell)),
            "ReY" => Observable::Fourier(PhaseSpaceObservable::re_y(ell)),
            "ReZ" => Observable::Fourier(PhaseSpaceObservable::re_z(ell)),
            "G1X" => Observable::Step(StepAxis::X),
            "G1Y" => Observable::Step(StepAxis::Y),
            "G1Z" => Observable::Step(StepAxis::Z),
            _ => return None,
        })
    }

    pub fn class(&self, ell: T) -> BetaClass {
        match self {
            Observable::Fourier(o) => certify_class(o, ell),
            Observable::Step(StepAxis::X) => BetaClass::X,
            Observable::Step(StepAxis::Y) => BetaClass::Y,
            Observable::Step(StepAxis::Z) => BetaClass::Z,
        }
    }

    pub fn zeta(&self, grid: &GridSpec<T>) -> Result<ZetaGrid<T>> {
        match self {
            Observable::Fourier(o) => zeta_function(o, grid),
            Observable::Step(_) => Ok(ZetaGrid {
                class: self.class(grid.ell),
                values: vec![T::one(); grid.points_per_period / 2 * grid.periods],
            }),
        }
    }
}

/// `⟨ψ|F|ψ⟩` as a sum of displaced overlaps (tables) or a direct square-wave
/// overlap (`Γ¹_β`).
pub fn expectation<T: Real>(psi: &WaveFunction1D<T>, obs: &Observable<T>) -> Result<T> {
    match obs {
        Observable::Step(axis) => Ok(overlap(psi, &gamma1_step(psi, *axis))?.re),
        Observable::Fourier(o) => {
            let mut acc = czero::<T>();
            for (n, m, d) in o.terms() {
                let moved = displace(psi, o.displacement(n, m))?;
                acc = acc + d * overlap(psi, &moved)?;
            }
            let tol = 1e-10 * o.l1_norm().to_f64_lossy().max(1.0);
            if acc.im.abs().to_f64_lossy() > tol {
                return Err(Error::NonHermitian(format!("expectation has imaginary part {}", acc.im)));
            }
            Ok(acc.re)
        }
    }
}

fn half_torus_sum<T: Real>(decomp: &LogicalDecomposition<T>, weight: impl Fn(usize) -> T) -> T {
    let sum = (0..decomp.f.len()).fold(T::zero(), |acc, i| acc + weight(i));
    sum * decomp.grid.modular_cell()
}

fn require_position_split<T: Real>(decomp: &LogicalDecomposition<T>) -> Result<()> {
    if decomp.split != Split::Position || decomp.gauge != Gauge::Modified {
        return Err(Error::InvalidParameter(
            "readout integrals need a position-split decomposition in the modified gauge".into(),
        ));
    }
    Ok(())
}

/// `⟨Γ_β⟩ = ∫ζ_β|f|² n_β` over the half torus, with `n` the pointwise Bloch vector.
pub fn expectation_from_decomposition<T: Real>(decomp: &LogicalDecomposition<T>, obs: &Observable<T>) -> Result<T> {
    require_position_split(decomp)?;
    let zeta = obs.zeta(&decomp.grid)?;
    let component = |i: usize| -> T {
        let (t, p) = (decomp.theta[i], decomp.phi[i]);
        match zeta.class {
            BetaClass::X => t.sin() * p.cos(),
            BetaClass::Y => t.sin() * p.sin(),
            BetaClass::Z => t.cos(),
            BetaClass::None => T::zero(),
        }
    };
    Ok(half_torus_sum(decomp, |i| zeta.values[i] * decomp.f[i].norm_sqr() * component(i)))
}

/// [`expectation`] computed in the modular representation from `f, θ, φ`.
pub fn expectation_modular<T: Real>(mwf: &ModularWaveFunction<T>, obs: &Observable<T>) -> Result<T> {
    expectation_from_decomposition(&extract_qubit(mwf), obs)
}

/// `K_β = ∫ζ_β|f|²` over the half torus.
pub fn k_factor<T: Real>(decomp: &LogicalDecomposition<T>, obs: &Observable<T>) -> Result<T> {
    require_position_split(decomp)?;
    let zeta = obs.zeta(&decomp.grid)?;
    Ok(half_torus_sum(decomp, |i| zeta.values[i] * decomp.f[i].norm_sqr()))
}

/// Measured `⟨Γ_β⟩`, the matching `K_β`, and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochEstimate<T: Real> {
    pub gamma: [T; 3],
    pub k: [T; 3],
    /// `gamma/k` where `|k| > 1e-12`.
    pub bloch: [Option<T>; 3],
    /// `max |ζ_β|` over the torus and the three observables.
    pub zeta_max: T,
}

/// Reads out `(⟨Γ_x⟩, ⟨Γ_y⟩, ⟨Γ_z⟩)` and the Bloch estimate `⟨Γ_β⟩/K_β`.
pub fn bloch_estimate<T: Real>(
    psi: &WaveFunction1D<T>,
    obs_x: &Observable<T>,
    obs_y: &Observable<T>,
    obs_z: &Observable<T>,
) -> Result<BlochEstimate<T>> {
    let ell = psi.grid().ell;
    let slots = [(obs_x, BetaClass::X), (obs_y, BetaClass::Y), (obs_z, BetaClass::Z)];
    if slots.iter().any(|(o, c)| o.class(ell) != *c) {
        return Err(Error::ClassMismatch);
    }
    let decomp = extract_qubit(&zak_transform(psi));
    let mut out = BlochEstimate { gamma: [T::zero(); 3], k: [T::zero(); 3], bloch: [None; 3], zeta_max: T::zero() };
    for (i, (obs, _)) in slots.iter().enumerate() {
        out.gamma[i] = expectation(psi, obs)?;
        out.k[i] = k_factor(&decomp, obs)?;
        out.zeta_max = out.zeta_max.max(obs.zeta(psi.grid())?.max_abs());
        if out.k[i].abs().to_f64_lossy() > 1e-12 {
            out.bloch[i] = Some(out.gamma[i] / out.k[i]);
        }
    }
    let len = out.gamma.iter().fold(T::zero(), |a, g| a + *g * *g).sqrt();
    if len.to_f64_lossy() > out.zeta_max.to_f64_lossy() + 1e-10 {
        return Err(Error::Invariant(format!("|<Gamma>| = {len} exceeds max|zeta| = {}", out.zeta_max)));
    }
    Ok(out)
}

/// A real function of one quadrature value.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadratureFunction<T: Real> {
    /// `Σ c·e^{i r u}` (real for Hermitian tables).
    Trig(Vec<(T, Complex<T>)>),
    /// `s_z(u)`: `+1` on `[-ℓ/4, ℓ/4) mod ℓ`.
    SquareZ(T),
    /// `s_x(u)`: `(-1)^m` on `[-π/ℓ + 2πm/ℓ, π/ℓ + 2πm/ℓ)`.
    SquareX(T),
}

impl<T: Real> QuadratureFunction<T> {
    pub fn eval(&self, u: T) -> T {
        let bias = T::of(1e-12);
        match self {
            QuadratureFunction::Trig(terms) => terms.iter().fold(T::zero(), |a, (r, c)| a + (*c * cis(*r * u)).re),
            QuadratureFunction::SquareZ(ell) => {
                let t = (u + *ell * T::of(0.25)) / *ell + bias;
                if t - t.floor() < T::of(0.5) {
                    T::one()
                } else {
                    -T::one()
                }
            }
            QuadratureFunction::SquareX(ell) => {
                let t = (u * *ell / T::PI() + T::one()) * T::of(0.5) + bias;
                if (t.floor().to_f64_lossy() as i64).rem_euclid(2) == 0 {
                    T::one()
                } else {
                    -T::one()
                }
            }
        }
    }
}

/// `F = h(x̂_φ)` for a single quadrature angle.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureForm<T: Real> {
    pub angle: QuadratureAngle<T>,
    pub function: QuadratureFunction<T>,
}

/// Rewrites `obs` as a function of one rotated quadrature.
///
/// A table qualifies when all its displacements are collinear in phase
/// space; `D(a, b) = e^{i r x̂_φ}` with `r cos φ = b`, `r sin φ = -a`.
/// `Γ¹_z` and `Γ¹_x` are position and momentum square waves; `Γ¹_y` is not
/// quadrature-diagonal.
pub fn quadrature_form<T: Real>(obs: &Observable<T>, ell: T) -> Result<QuadratureForm<T>> {
    match obs {
        Observable::Step(StepAxis::Z) => {
            Ok(QuadratureForm { angle: QuadratureAngle::position(), function: QuadratureFunction::SquareZ(ell) })
        }
        Observable::Step(StepAxis::X) => {
            Ok(QuadratureForm { angle: QuadratureAngle::momentum(), function: QuadratureFunction::SquareX(ell) })
        }
        Observable::Step(StepAxis::Y) => Err(Error::NotQuadratureDiagonal),
        Observable::Fourier(o) => {
            let disps: Vec<(Displacement<T>, Complex<T>)> =
                o.terms().map(|(n, m, d)| (o.displacement(n, m), d)).collect();
            let lead = disps
                .iter()
                .map(|(v, _)| *v)
                .max_by(|a, b| (a.dx.hypot(a.dp)).partial_cmp(&b.dx.hypot(b.dp)).unwrap())
                .unwrap_or(Displacement::new(T::zero(), T::zero()));
            let mut phi = (-lead.dx).atan2(lead.dp);
            if phi < T::zero() {
                phi = phi + T::PI();
            }
            if phi >= T::PI() {
                phi = phi - T::PI();
            }
            let (c, s) = (phi.cos(), phi.sin());
            let mut terms = Vec::with_capacity(disps.len());
            for (v, d) in disps {
                let scale = T::one().max(v.dx.hypot(v.dp));
                let cross = v.dp * s + v.dx * c;
                if cross.abs() / scale > T::of(1e-12) {
                    return Err(Error::NotQuadratureDiagonal);
                }
                terms.push((v.dp * c - v.dx * s, d));
            }
            Ok(QuadratureForm { angle: QuadratureAngle::new(phi), function: QuadratureFunction::Trig(terms) })
        }
    }
}

/// `∫ h(u) p_φ(u) du` using the quadrature form of `obs`.
pub fn expectation_quadrature<T: Real>(psi: &WaveFunction1D<T>, obs: &Observable<T>) -> Result<T> {
    let form = quadrature_form(obs, psi.grid().ell)?;
    let density = quadrature_density(psi, form.angle);
    Ok(density.integrate(|u| form.function.eval(u)))
}

//! Program execution.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;

use modvar_core::io::{self, DumpMetadata, GridMetadata};
use modvar_core::lattice::quadrature_density;
use modvar_core::modular::zak_transform;
use modvar_core::operators::{Displacement, Gate, Pauli, RotationAxis, StepAxis};
use modvar_core::povm::{measurement_unitary, povm_measure, sample_counts, standard_error};
use modvar_core::readout::{bloch_estimate, expectation, Observable, ObservableSpec};
use modvar_core::states::{BlochAngles, CombOffset, CombParams, StateSpec, DEFAULT_DELTA_OVER_ELL, DEFAULT_KAPPA_TIMES_ELL};
use modvar_core::two_mode::{
    bell_logical, cnot, correlator_exact, expectation_local, joint_quadrature_density, tensor, BellState, Mode,
    WaveFunction2D,
};
use modvar_core::{Angle, Grid, WaveFunction};

use crate::ast::*;
use crate::error::{CliError, Result};
use crate::record::Record;

pub const DEFAULT_M: usize = 64;
pub const DEFAULT_P: usize = 32;
pub const DEFAULT_TOLERANCE: f64 = 1e-2;

/// `ℓ = 2√π`, where the Fourier gate needs no rescaling.
pub fn default_ell() -> f64 {
    2.0 * std::f64::consts::PI.sqrt()
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Where dumps are written.
    pub out_dir: PathBuf,
    /// Where `observable … = json(…)` paths are resolved.
    pub base_dir: PathBuf,
    /// Tolerance for checks without `tol=`.
    pub tolerance: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { out_dir: PathBuf::from("."), base_dir: PathBuf::from("."), tolerance: DEFAULT_TOLERANCE }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub records: usize,
    pub checks: usize,
    pub failed_checks: usize,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failed_checks > 0 {
            2
        } else {
            0
        }
    }
}

enum System {
    Single(WaveFunction),
    Pair { psi: WaveFunction2D<f64>, modes: [String; 2] },
}

struct Machine<'a> {
    opts: &'a RunOptions,
    grid: Grid,
    systems: Vec<Option<System>>,
    owner: HashMap<String, usize>,
    observables: HashMap<String, Observable<f64>>,
    line: usize,
}

/// Runs `program`, writing one JSON line per measurement or dump to `out`.
///
/// Stops at the first runtime error. Failed declared checks do not stop the
/// run; they are counted in the summary.
pub fn run(program: &Program, opts: &RunOptions, out: &mut dyn Write) -> Result<RunSummary> {
    let grid = Grid::new(default_ell(), DEFAULT_M, DEFAULT_P).map_err(|source| CliError::Runtime { line: 0, source })?;
    let mut m = Machine { opts, grid, systems: Vec::new(), owner: HashMap::new(), observables: HashMap::new(), line: 0 };
    let mut summary = RunSummary::default();
    for Located { line, statement } in &program.statements {
        m.line = *line;
        if let Some(mut record) = m.execute(statement)? {
            record.set("line", *line);
            if let Some(crate::record::Value::Bool(pass)) = record.get("pass") {
                summary.checks += 1;
                if !pass {
                    summary.failed_checks += 1;
                }
            }
            writeln!(out, "{}", record.to_json()).map_err(|e| CliError::Io(e.to_string()))?;
            summary.records += 1;
        }
    }
    Ok(summary)
}

/// Structured record for an error that aborted a run.
pub fn error_record(err: &CliError) -> Record {
    Record::new("error")
        .with("category", err.category())
        .with("line", err.line())
        .with("exit_code", err.exit_code() as u64)
        .with("message", err.to_string())
}

fn comb_shape(delta: &Option<Expr>, kappa: &Option<Expr>, ell: f64) -> (Option<f64>, Option<f64>) {
    (
        Some(delta.as_ref().map_or(DEFAULT_DELTA_OVER_ELL * ell, Expr::eval)),
        Some(kappa.as_ref().map_or(DEFAULT_KAPPA_TIMES_ELL / ell, Expr::eval)),
    )
}

fn named_gate(g: NamedGate) -> Gate<f64> {
    let pauli = |which, dagger| Gate::Pauli { which, dagger };
    match g {
        NamedGate::X => pauli(Pauli::X, false),
        NamedGate::Y => pauli(Pauli::Y, false),
        NamedGate::Z => pauli(Pauli::Z, false),
        NamedGate::Xdag => pauli(Pauli::X, true),
        NamedGate::Ydag => pauli(Pauli::Y, true),
        NamedGate::Zdag => pauli(Pauli::Z, true),
        NamedGate::Shear => Gate::Shear { inverse: false },
        NamedGate::ShearDag => Gate::Shear { inverse: true },
        NamedGate::F => Gate::Fourier { inverse: false },
        NamedGate::Fdag => Gate::Fourier { inverse: true },
        NamedGate::G1X => Gate::Step(StepAxis::X),
        NamedGate::G1Y => Gate::Step(StepAxis::Y),
        NamedGate::G1Z => Gate::Step(StepAxis::Z),
    }
}

fn swap_modes(psi: &WaveFunction2D<f64>) -> modvar_core::Result<WaveFunction2D<f64>> {
    let [ga, gb] = *psi.grids();
    let (n1, n2) = psi.shape();
    let mut amps = vec![Complex::new(0.0, 0.0); n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            amps[j * n1 + i] = psi.get(i, j);
        }
    }
    WaveFunction2D::new([gb, ga], amps)
}

impl Machine<'_> {
    fn fail(&self, source: modvar_core::Error) -> CliError {
        CliError::Runtime { line: self.line, source }
    }

    fn semantic(&self, message: impl Into<String>) -> CliError {
        CliError::Semantic { line: self.line, message: message.into() }
    }

    fn core<T>(&self, r: modvar_core::Result<T>) -> Result<T> {
        r.map_err(|e| self.fail(e))
    }

    fn execute(&mut self, statement: &Statement) -> Result<Option<Record>> {
        match statement {
            Statement::Grid { ell, m, p } => {
                let ell = ell.as_ref().map_or(default_ell(), Expr::eval);
                self.grid = self.core(Grid::new(ell, m.unwrap_or(DEFAULT_M), p.unwrap_or(DEFAULT_P)))?;
                Ok(None)
            }
            Statement::State { registers, prep } => self.prepare(registers, prep),
            Statement::Observable { name, path } => {
                let full = self.opts.base_dir.join(path);
                let text = fs::read_to_string(&full)
                    .map_err(|e| CliError::Io(format!("line {}: cannot read {}: {e}", self.line, full.display())))?;
                let spec: ObservableSpec = serde_json::from_str(&text)
                    .map_err(|e| self.fail(modvar_core::Error::Format(format!("{}: {e}", full.display()))))?;
                let table = self.core(spec.build())?;
                self.observables.insert(name.clone(), Observable::Fourier(table));
                Ok(None)
            }
            Statement::Apply { gate, targets } => {
                self.apply(gate, targets)?;
                Ok(None)
            }
            Statement::Measure { measure, check } => self.measure(measure, check.as_ref()).map(Some),
            Statement::Dump(d) => self.dump(d).map(Some),
        }
    }

    fn add_system(&mut self, system: System, names: &[String]) {
        self.systems.push(Some(system));
        for n in names {
            self.owner.insert(n.clone(), self.systems.len() - 1);
        }
    }

    fn prepare(&mut self, registers: &[String], prep: &Prep) -> Result<Option<Record>> {
        let ell = self.grid.ell;
        let mut record = Record::new("state").with("registers", Vec::from(registers).join(" "));
        let (delta, kappa) = match prep {
            Prep::Comb { delta, kappa, offset } => {
                let (d, k) = comb_shape(delta, kappa, ell);
                let offset = if *offset == Offset::Half { CombOffset::HalfPeriod } else { CombOffset::Zero };
                let psi = self.core(StateSpec::Comb { delta: d, kappa: k, offset }.build(&self.grid))?;
                self.add_system(System::Single(psi), registers);
                (d, k)
            }
            Prep::Logical { theta, phi, delta, kappa } => {
                let (d, k) = comb_shape(delta, kappa, ell);
                let spec = StateSpec::Logical { delta: d, kappa: k, theta: theta.eval(), phi: phi.eval() };
                self.core(BlochAngles::new(theta.eval(), phi.eval()))?;
                let psi = self.core(spec.build(&self.grid))?;
                self.add_system(System::Single(psi), registers);
                (d, k)
            }
            Prep::Bell { which, delta, kappa } => {
                let (d, k) = comb_shape(delta, kappa, ell);
                let params = self.core(CombParams::new(d.expect("defaulted"), k.expect("defaulted")))?;
                let which = BellState::from_name(which.name()).expect("same names");
                let psi = self.core(bell_logical(&self.grid, &params, which))?;
                let modes = [registers[0].clone(), registers[1].clone()];
                self.add_system(System::Pair { psi, modes }, registers);
                (d, k)
            }
        };
        let params = self.core(CombParams::new(delta.expect("defaulted"), kappa.expect("defaulted")))?;
        let warnings = params.regime_warnings(ell);
        if warnings.is_empty() {
            return Ok(None);
        }
        let names: Vec<crate::record::Value> = warnings.iter().map(|w| format!("{w:?}").into()).collect();
        record.set("warnings", crate::record::Value::List(names));
        Ok(Some(record))
    }

    /// System index and mode of a register (`None` for single-mode systems).
    fn locate(&self, name: &str) -> (usize, Option<Mode>) {
        let idx = self.owner[name];
        match self.systems[idx].as_ref().expect("live system") {
            System::Single(_) => (idx, None),
            System::Pair { modes, .. } => (idx, Some(if modes[0] == name { Mode::A } else { Mode::B })),
        }
    }

    fn single(&self, name: &str, what: &str) -> Result<&WaveFunction> {
        match self.systems[self.owner[name]].as_ref().expect("live system") {
            System::Single(psi) => Ok(psi),
            System::Pair { .. } => Err(self.semantic(format!("{what} needs `{name}` unentangled"))),
        }
    }

    /// Joint state with `a` as mode A and `b` as mode B, merging single-mode
    /// registers by tensor product.
    fn pair_ordered(&mut self, a: &str, b: &str) -> Result<(usize, WaveFunction2D<f64>)> {
        let (ia, ib) = (self.owner[a], self.owner[b]);
        if ia != ib {
            let (sa, sb) = (self.systems[ia].take(), self.systems[ib].take());
            let (Some(System::Single(pa)), Some(System::Single(pb))) = (&sa, &sb) else {
                self.systems[ia] = sa;
                self.systems[ib] = sb;
                return Err(self.semantic(format!("`{a}` and `{b}` belong to different entangled pairs")));
            };
            let psi = match tensor(pa, pb) {
                Ok(p) => p,
                Err(e) => {
                    self.systems[ia] = sa;
                    self.systems[ib] = sb;
                    return Err(self.fail(e));
                }
            };
            self.add_system(System::Pair { psi: psi.clone(), modes: [a.to_string(), b.to_string()] }, &[
                a.to_string(),
                b.to_string(),
            ]);
            return Ok((self.systems.len() - 1, psi));
        }
        let Some(System::Pair { psi, modes }) = self.systems[ia].as_ref() else {
            unreachable!("two registers share only pair systems")
        };
        let psi = if modes[0] == a { psi.clone() } else { self.core(swap_modes(psi))? };
        Ok((ia, psi))
    }

    fn store_pair(&mut self, idx: usize, psi: WaveFunction2D<f64>, a: &str, b: &str) {
        self.systems[idx] = Some(System::Pair { psi, modes: [a.to_string(), b.to_string()] });
    }

    fn gate(&self, g: &GateExpr) -> Result<Gate<f64>> {
        Ok(match g {
            GateExpr::Named(n) => named_gate(*n),
            GateExpr::Displace(a, b) => Gate::Displace(Displacement::new(a.eval(), b.eval())),
            GateExpr::Rot([nx, ny, nz, angle]) => Gate::Rotate {
                axis: self.core(RotationAxis::normalized([nx.eval(), ny.eval(), nz.eval()]))?,
                angle: angle.eval(),
            },
            GateExpr::Cnot => return Err(self.semantic("CNOT acts on two registers")),
        })
    }

    fn apply(&mut self, g: &GateExpr, targets: &[String]) -> Result<()> {
        if *g == GateExpr::Cnot {
            let (a, b) = (&targets[0], &targets[1]);
            let (idx, psi) = self.pair_ordered(a, b)?;
            let out = self.core(cnot(&psi))?;
            self.store_pair(idx, out, a, b);
            return Ok(());
        }
        let gate = self.gate(g)?;
        let (idx, mode) = self.locate(&targets[0]);
        let next = match (self.systems[idx].as_ref().expect("live system"), mode) {
            (System::Single(psi), _) => System::Single(self.core(gate.apply(psi))?),
            (System::Pair { psi, modes }, Some(mode)) => {
                System::Pair { psi: self.core(psi.apply_local(mode, &gate))?, modes: modes.clone() }
            }
            (System::Pair { .. }, None) => unreachable!("pair registers have a mode"),
        };
        self.systems[idx] = Some(next);
        Ok(())
    }

    fn observable(&self, name: &str) -> Observable<f64> {
        self.observables
            .get(name)
            .cloned()
            .or_else(|| Observable::builtin(name, self.grid.ell))
            .expect("validated at parse time")
    }

    fn local_expectation(&self, register: &str, obs: &Observable<f64>) -> Result<f64> {
        let (idx, mode) = self.locate(register);
        match (self.systems[idx].as_ref().expect("live system"), mode) {
            (System::Single(psi), _) => self.core(expectation(psi, obs)),
            (System::Pair { psi, .. }, Some(mode)) => self.core(expectation_local(psi, mode, obs)),
            _ => unreachable!("pair registers have a mode"),
        }
    }

    fn check(&self, record: &mut Record, check: Option<&Check>, measured: &[Option<f64>]) {
        let Some(check) = check else { return };
        let expected: Vec<f64> = check.expect.iter().map(Expr::eval).collect();
        let tol = check.tol.as_ref().map_or(self.opts.tolerance, Expr::eval);
        let pass = expected.iter().zip(measured).all(|(e, m)| m.is_some_and(|m| (m - e).abs() <= tol));
        if expected.len() == 1 {
            record.set("expected", expected[0]);
        } else {
            record.set("expected", crate::record::Value::List(expected.into_iter().map(Into::into).collect()));
        }
        record.set("tolerance", tol);
        record.set("pass", pass);
    }

    fn measure(&mut self, measure: &Measure, check: Option<&Check>) -> Result<Record> {
        match measure {
            Measure::Expectation { observable, register } => {
                let value = self.local_expectation(register, &self.observable(observable))?;
                let mut r = Record::new("expectation")
                    .with("register", register.as_str())
                    .with("observable", observable.as_str())
                    .with("value", value);
                self.check(&mut r, check, &[Some(value)]);
                Ok(r)
            }
            Measure::Correlator { observables: [o1, o2], registers: [a, b] } => {
                let (oa, ob) = (self.observable(o1), self.observable(o2));
                let value = if self.owner[a.as_str()] == self.owner[b.as_str()] {
                    let (_, psi) = self.pair_ordered(a, b)?;
                    self.core(correlator_exact(&psi, &oa, &ob))?
                } else {
                    self.local_expectation(a, &oa)? * self.local_expectation(b, &ob)?
                };
                let mut r = Record::new("correlator")
                    .with("registers", [a.as_str(), b.as_str()])
                    .with("observables", [o1.as_str(), o2.as_str()])
                    .with("value", value);
                self.check(&mut r, check, &[Some(value)]);
                Ok(r)
            }
            Measure::Bloch { register } => {
                let ell = self.grid.ell;
                let [ox, oy, oz] = ["ReX", "ReY", "ReZ"].map(|n| Observable::builtin(n, ell).expect("built-in"));
                let mut r = Record::new("bloch").with("register", register.as_str());
                let bloch = match self.locate(register) {
                    (_, None) => {
                        let psi = self.single(register, "bloch")?;
                        let est = self.core(bloch_estimate(psi, &ox, &oy, &oz))?;
                        r.set("gamma", est.gamma);
                        r.set("k", est.k);
                        r.set("bloch", est.bloch);
                        r.set("zeta_max", est.zeta_max);
                        est.bloch
                    }
                    (_, Some(_)) => {
                        let gamma = [
                            self.local_expectation(register, &ox)?,
                            self.local_expectation(register, &oy)?,
                            self.local_expectation(register, &oz)?,
                        ];
                        r.set("gamma", gamma);
                        r.set("k", None::<f64>);
                        r.set("bloch", None::<f64>);
                        [None; 3]
                    }
                };
                self.check(&mut r, check, &bloch);
                Ok(r)
            }
            Measure::Povm { unitary, register, shots, seed } => {
                self.povm("povm", unitary, register, *shots, *seed, check)
            }
            Measure::Sample { unitary, register, shots, seed } => {
                self.povm("sample", unitary, register, Some(*shots), *seed, check)
            }
        }
    }

    fn povm(
        &self,
        kind: &str,
        unitary: &UnitaryRef,
        register: &str,
        shots: Option<u64>,
        seed: u64,
        check: Option<&Check>,
    ) -> Result<Record> {
        let psi = self.single(register, "povm")?;
        let (gate, clamped) = match unitary {
            UnitaryRef::Gate(g) => {
                let gate = self.gate(g)?;
                self.core(gate.validate(&self.grid))?;
                (gate, 0)
            }
            UnitaryRef::Observable(name) => self.core(measurement_unitary(&self.observable(name), &self.grid))?,
        };
        let outcome = self.core(povm_measure(psi, &gate))?;
        let mut r = Record::new(kind)
            .with("register", register)
            .with("unitary", unitary.to_string())
            .with("p_plus", outcome.p_plus)
            .with("p_minus", outcome.p_minus)
            .with("expectation", outcome.expectation)
            .with("shots", shots);
        let measured = match shots {
            Some(n) => {
                let counts = self.core(sample_counts(outcome.p_plus, n, seed))?;
                r.set("counts", [counts.plus, counts.minus]);
                r.set("estimate", counts.estimate());
                r.set("standard_error", standard_error(outcome.p_plus, n));
                if kind == "sample" {
                    counts.estimate()
                } else {
                    outcome.expectation
                }
            }
            None => {
                r.set("counts", None::<u64>);
                outcome.expectation
            }
        };
        r.set("seed", seed);
        if clamped > 0 {
            r.set("clamped", clamped);
        }
        self.check(&mut r, check, &[Some(measured)]);
        Ok(r)
    }

    fn target(&self, file: &str) -> Result<PathBuf> {
        let path = self.opts.out_dir.join(file);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
        Ok(path)
    }

    fn dump(&mut self, d: &Dump) -> Result<Record> {
        let (what, registers, file): (&str, Vec<&str>, &str) = match d {
            Dump::Density { register, file, .. } => ("density", vec![register], file),
            Dump::State { register, file } => ("state", vec![register], file),
            Dump::Modular { register, file } => ("modular", vec![register], file),
            Dump::ModularDensity { register, file } => ("modular_density", vec![register], file),
            Dump::Joint { registers, file, .. } => ("joint", registers.iter().map(String::as_str).collect(), file),
            Dump::Pair { registers, file, .. } => ("pair", registers.iter().map(String::as_str).collect(), file),
        };
        let path = self.target(file)?;
        match d {
            Dump::Density { register, phi, .. } => {
                let angle = Angle::new(phi.eval());
                let density = match self.locate(register) {
                    (_, None) => quadrature_density(self.single(register, "dump")?, angle),
                    (idx, Some(mode)) => {
                        let Some(System::Pair { psi, .. }) = self.systems[idx].as_ref() else { unreachable!() };
                        joint_quadrature_density(psi, angle, angle).marginal(mode)
                    }
                };
                self.core(io::dump_density(&path, &self.grid, &density))?;
            }
            Dump::State { register, .. } => self.core(io::dump_state(&path, self.single(register, "dump state")?))?,
            Dump::Modular { register, .. } => {
                let mwf = zak_transform(self.single(register, "dump modular")?);
                self.core(io::dump_modular(&path, &mwf))?;
            }
            Dump::ModularDensity { register, .. } => {
                let mwf = zak_transform(self.single(register, "dump modular_density")?);
                let f = File::create(&path).map_err(|e| self.fail(e.into()))?;
                self.core(io::write_modular_density_csv(BufWriter::new(f), &mwf))?;
                let meta = DumpMetadata {
                    kind: "modular_density".into(),
                    grids: vec![GridMetadata::of(&self.grid)],
                    angle: None,
                    threshold: None,
                };
                self.core(io::write_metadata(&io::sidecar_path(&path), &meta))?;
            }
            Dump::Joint { registers: [a, b], phi: [p1, p2], threshold, .. } => {
                let (_, psi) = self.pair_ordered(a, b)?;
                let density = joint_quadrature_density(&psi, Angle::new(p1.eval()), Angle::new(p2.eval()));
                let threshold = threshold.as_ref().map_or(0.0, Expr::eval);
                let f = File::create(&path).map_err(|e| self.fail(e.into()))?;
                self.core(io::write_joint_density_csv(BufWriter::new(f), &density, threshold))?;
                let meta = DumpMetadata {
                    kind: "joint_quadrature".into(),
                    grids: psi.grids().iter().map(GridMetadata::of).collect(),
                    angle: None,
                    threshold: Some(threshold),
                };
                self.core(io::write_metadata(&io::sidecar_path(&path), &meta))?;
            }
            Dump::Pair { registers: [a, b], format, threshold, .. } => {
                let (_, psi) = self.pair_ordered(a, b)?;
                let threshold = threshold.as_ref().map_or(0.0, Expr::eval);
                self.core(io::dump_two_mode(&path, &psi, *format == PairFormat::Binary, threshold))?;
            }
        }
        Ok(Record::new("dump")
            .with("what", what)
            .with("registers", crate::record::Value::List(registers.into_iter().map(Into::into).collect()))
            .with("file", path.display().to_string()))
    }
}

/// Directory containing `script`, for resolving relative input paths.
pub fn script_dir(script: &Path) -> PathBuf {
    script.parent().filter(|p| !p.as_os_str().is_empty()).map_or_else(|| PathBuf::from("."), Path::to_path_buf)
}

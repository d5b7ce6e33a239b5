//! Circuit program syntax tree and its canonical printer.
//!
//! `Display` output is valid source that parses back to an equal tree.

use std::fmt;

/// Numeric expression over literals, `pi`, `+ - * / ^` and [`Func`] calls.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(Box<Expr>, BinOp, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Cos,
    Sin,
}

impl Func {
    pub const ALL: [(&'static str, Func); 5] =
        [("sqrt", Func::Sqrt), ("exp", Func::Exp), ("ln", Func::Ln), ("cos", Func::Cos), ("sin", Func::Sin)];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
    }

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, f)| *f == self).map(|(n, _)| *n).expect("listed")
    }

    fn eval(self, v: f64) -> f64 {
        match self {
            Func::Sqrt => v.sqrt(),
            Func::Exp => v.exp(),
            Func::Ln => v.ln(),
            Func::Cos => v.cos(),
            Func::Sin => v.sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

impl Expr {
    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    pub fn eval(&self) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Neg(e) => -e.eval(),
            Expr::Call(func, e) => func.eval(e.eval()),
            Expr::Bin(a, op, b) => {
                let (a, b) = (a.eval(), b.eval());
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Bin(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_operand(f)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Bin(a, op, b) => {
                // `-a ^ b` reads as `-(a ^ b)`.
                if *op == BinOp::Pow && matches!(**a, Expr::Neg(_)) {
                    write!(f, "({a})")?;
                } else {
                    a.fmt_operand(f)?;
                }
                write!(f, " {} ", op.symbol())?;
                b.fmt_operand(f)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Offset {
    Zero,
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const NAMES: [(&'static str, Bell); 4] = [
        ("phi_plus", Bell::PhiPlus),
        ("phi_minus", Bell::PhiMinus),
        ("psi_plus", Bell::PsiPlus),
        ("psi_minus", Bell::PsiMinus),
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES.iter().find(|(_, b)| *b == self).map(|(n, _)| *n).expect("listed")
    }
}

/// State preparation on the right of `state ... =`.
#[derive(Debug, Clone, PartialEq)]
pub enum Prep {
    Comb { delta: Option<Expr>, kappa: Option<Expr>, offset: Offset },
    Logical { theta: Expr, phi: Expr, delta: Option<Expr>, kappa: Option<Expr> },
    Bell { which: Bell, delta: Option<Expr>, kappa: Option<Expr> },
}

/// Single-mode gate names usable in `apply`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedGate {
    X,
    Y,
    Z,
    Xdag,
    Ydag,
    Zdag,
    Shear,
    ShearDag,
    F,
    Fdag,
    G1X,
    G1Y,
    G1Z,
}

impl NamedGate {
    pub const ALL: [(&'static str, NamedGate); 13] = [
        ("X", NamedGate::X),
        ("Y", NamedGate::Y),
        ("Z", NamedGate::Z),
        ("XDAG", NamedGate::Xdag),
        ("YDAG", NamedGate::Ydag),
        ("ZDAG", NamedGate::Zdag),
        ("SHEAR", NamedGate::Shear),
        ("SHEARDAG", NamedGate::ShearDag),
        ("F", NamedGate::F),
        ("FDAG", NamedGate::Fdag),
        ("G1X", NamedGate::G1X),
        ("G1Y", NamedGate::G1Y),
        ("G1Z", NamedGate::G1Z),
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().find(|(n, _)| *n == name).map(|(_, g)| *g)
    }

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, g)| *g == self).map(|(n, _)| *n).expect("listed")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateExpr {
    Named(NamedGate),
    Displace(Expr, Expr),
    Rot([Expr; 4]),
    Cnot,
}

impl GateExpr {
    pub fn arity(&self) -> usize {
        if matches!(self, GateExpr::Cnot) {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for GateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateExpr::Named(g) => f.write_str(g.name()),
            GateExpr::Displace(a, b) => write!(f, "D({a}, {b})"),
            GateExpr::Rot([a, b, c, d]) => write!(f, "ROT({a}, {b}, {c}, {d})"),
            GateExpr::Cnot => f.write_str("CNOT"),
        }
    }
}

/// Unitary used by `measure povm` / `measure sample`: a gate, or an
/// observable whose measurement unitary is derived from it.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitaryRef {
    Gate(GateExpr),
    Observable(String),
}

impl fmt::Display for UnitaryRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitaryRef::Gate(g) => write!(f, "{g}"),
            UnitaryRef::Observable(o) => f.write_str(o),
        }
    }
}

/// Declared expected value and tolerance of a measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub expect: Vec<Expr>,
    pub tol: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Expectation { observable: String, register: String },
    Correlator { observables: [String; 2], registers: [String; 2] },
    Bloch { register: String },
    Povm { unitary: UnitaryRef, register: String, shots: Option<u64>, seed: u64 },
    Sample { unitary: UnitaryRef, register: String, shots: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFormat {
    Csv,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dump {
    Density { register: String, phi: Expr, file: String },
    State { register: String, file: String },
    Modular { register: String, file: String },
    ModularDensity { register: String, file: String },
    Joint { registers: [String; 2], phi: [Expr; 2], file: String, threshold: Option<Expr> },
    Pair { registers: [String; 2], file: String, format: PairFormat, threshold: Option<Expr> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Grid { ell: Option<Expr>, m: Option<usize>, p: Option<usize> },
    State { registers: Vec<String>, prep: Prep },
    Observable { name: String, path: String },
    Apply { gate: GateExpr, targets: Vec<String> },
    Measure { measure: Measure, check: Option<Check> },
    Dump(Dump),
}

/// A statement with the source line it came from.
#[derive(Debug, Clone)]
pub struct Located {
    pub line: usize,
    pub statement: Statement,
}

/// Parsed program. Equality ignores line numbers.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub statements: Vec<Located>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.statements.len() == other.statements.len()
            && self.statements.iter().zip(&other.statements).all(|(a, b)| a.statement == b.statement)
    }
}

impl Program {
    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}

fn opt_kw(f: &mut fmt::Formatter<'_>, key: &str, v: &Option<Expr>) -> fmt::Result {
    match v {
        Some(e) => write!(f, ", {key}={e}"),
        None => Ok(()),
    }
}

fn path_literal(path: &str) -> String {
    serde_json::to_string(path).expect("strings serialize")
}

impl fmt::Display for Prep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prep::Comb { delta, kappa, offset } => {
                let mut args = Vec::new();
                if let Some(e) = delta {
                    args.push(format!("Delta={e}"));
                }
                if let Some(e) = kappa {
                    args.push(format!("kappa={e}"));
                }
                if *offset == Offset::Half {
                    args.push("offset=half".to_string());
                }
                write!(f, "comb({})", args.join(", "))
            }
            Prep::Logical { theta, phi, delta, kappa } => {
                write!(f, "logical(theta={theta}, phi={phi}")?;
                opt_kw(f, "Delta", delta)?;
                opt_kw(f, "kappa", kappa)?;
                f.write_str(")")
            }
            Prep::Bell { which, delta, kappa } => {
                write!(f, "bell({}", which.name())?;
                opt_kw(f, "Delta", delta)?;
                opt_kw(f, "kappa", kappa)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.expect.iter().map(|e| e.to_string()).collect();
        write!(f, " expect={}", vals.join(","))?;
        if let Some(t) = &self.tol {
            write!(f, " tol={t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Expectation { observable, register } => write!(f, "measure expectation {observable} {register}"),
            Measure::Correlator { observables: [o1, o2], registers: [r1, r2] } => {
                write!(f, "measure correlator {o1} {o2} {r1} {r2}")
            }
            Measure::Bloch { register } => write!(f, "measure bloch {register}"),
            Measure::Povm { unitary, register, shots, seed } => {
                write!(f, "measure povm {unitary} {register}")?;
                if let Some(s) = shots {
                    write!(f, " shots={s}")?;
                }
                write!(f, " seed={seed}")
            }
            Measure::Sample { unitary, register, shots, seed } => {
                write!(f, "measure sample {unitary} {register} shots={shots} seed={seed}")
            }
        }
    }
}

impl fmt::Display for Dump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dump::Density { register, phi, file } => {
                write!(f, "dump density {register} phi={phi} file={}", path_literal(file))
            }
            Dump::State { register, file } => write!(f, "dump state {register} file={}", path_literal(file)),
            Dump::Modular { register, file } => write!(f, "dump modular {register} file={}", path_literal(file)),
            Dump::ModularDensity { register, file } => {
                write!(f, "dump modular_density {register} file={}", path_literal(file))
            }
            Dump::Joint { registers: [a, b], phi: [p1, p2], file, threshold } => {
                write!(f, "dump joint {a} {b} phi1={p1} phi2={p2} file={}", path_literal(file))?;
                if let Some(t) = threshold {
                    write!(f, " threshold={t}")?;
                }
                Ok(())
            }
            Dump::Pair { registers: [a, b], file, format, threshold } => {
                write!(f, "dump pair {a} {b} file={}", path_literal(file))?;
                if *format == PairFormat::Binary {
                    f.write_str(" format=binary")?;
                }
                if let Some(t) = threshold {
                    write!(f, " threshold={t}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Grid { ell, m, p } => {
                f.write_str("grid")?;
                if let Some(e) = ell {
                    write!(f, " ell={e}")?;
                }
                if let Some(m) = m {
                    write!(f, " M={m}")?;
                }
                if let Some(p) = p {
                    write!(f, " P={p}")?;
                }
                Ok(())
            }
            Statement::State { registers, prep } => write!(f, "state {} = {prep}", registers.join(" ")),
            Statement::Observable { name, path } => write!(f, "observable {name} = json({})", path_literal(path)),
            Statement::Apply { gate, targets } => write!(f, "apply {gate} {}", targets.join(" ")),
            Statement::Measure { measure, check } => {
                write!(f, "{measure}")?;
                if let Some(c) = check {
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            Statement::Dump(d) => write!(f, "{d}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{}", s.statement)?;
        }
        Ok(())
    }
}

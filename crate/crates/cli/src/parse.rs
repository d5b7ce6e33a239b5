//! Line-oriented parser for circuit scripts.
//!
//! One statement per line, `#` starts a comment. Numeric arguments accept
//! `pi`, `sqrt exp ln cos sin`, parentheses and `+ - * / ^`.

use std::collections::{HashMap, HashSet};

use crate::ast::*;
use crate::error::{CliError, Result};

/// Built-in observable names accepted by `measure`.
pub const BUILTIN_OBSERVABLES: [&str; 6] = modvar_core::readout::BUILTIN_OBSERVABLES;

/// Parses and validates a whole script.
pub fn parse(source: &str) -> Result<Program> {
    let mut statements = Vec::new();
    for (idx, text) in source.lines().enumerate() {
        let line = idx + 1;
        let mut cur = Cursor::new(text, line);
        if cur.at_end() {
            continue;
        }
        for statement in cur.statement()? {
            statements.push(Located { line, statement });
        }
        if !cur.at_end() {
            return Err(cur.error("unexpected trailing input"));
        }
    }
    let program = Program { statements };
    validate(&program)?;
    Ok(program)
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(text: &str, line: usize) -> Self {
        Self { chars: text.chars().collect(), pos: 0, line }
    }

    fn error(&self, message: impl Into<String>) -> CliError {
        CliError::Syntax { line: self.line, column: self.pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        match self.chars.get(self.pos) {
            Some('#') | None => None,
            Some(c) => Some(*c),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn peek_ident(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_')
    }

    fn ident(&mut self) -> Result<String> {
        if !self.peek_ident() {
            return Err(self.error("expected a name"));
        }
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn keyword(&mut self, expected: &str) -> Result<()> {
        let save = self.pos;
        match self.ident() {
            Ok(w) if w == expected => Ok(()),
            _ => {
                self.pos = save;
                self.skip_ws();
                Err(self.error(format!("expected `{expected}`")))
            }
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if text.is_empty() {
            return Err(self.error("expected an integer"));
        }
        if matches!(self.chars.get(self.pos), Some('.' | 'e' | 'E')) {
            self.pos = start;
            return Err(self.error("expected an integer"));
        }
        text.parse().map_err(|_| {
            self.pos = start;
            self.error("integer out of range")
        })
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let digits = |s: &mut Self| {
            let b = s.pos;
            while s.pos < s.chars.len() && s.chars[s.pos].is_ascii_digit() {
                s.pos += 1;
            }
            s.pos > b
        };
        let mut any = digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            any |= digits(self);
        }
        if !any {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            if !digits(self) {
                self.pos = mark;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| {
            self.pos = start;
            self.error(format!("bad number `{text}`"))
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(Box::new(lhs), op, Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(Box::new(lhs), op, Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Bin(Box::new(base), BinOp::Pow, Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number().map(Expr::Num),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident()?;
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                match Func::from_name(&name) {
                    Some(func) => {
                        self.expect('(')?;
                        let e = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Call(func, Box::new(e)))
                    }
                    None => {
                        let other = name;
                        self.pos = start;
                        Err(self.error(format!("unknown name `{other}` in expression")))
                    }
                }
            }
            _ => Err(self.error("expected an expression")),
        }
    }

    /// A quoted JSON string or a bare run of non-space characters.
    fn path(&mut self) -> Result<String> {
        match self.peek() {
            Some('"') => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.chars.len() {
                    match self.chars[self.pos] {
                        '\\' => self.pos += 2,
                        '"' => break,
                        _ => self.pos += 1,
                    }
                }
                if self.pos >= self.chars.len() {
                    self.pos = start;
                    return Err(self.error("unterminated string"));
                }
                self.pos += 1;
                let text: String = self.chars[start..self.pos].iter().collect();
                serde_json::from_str(&text).map_err(|e| {
                    self.pos = start;
                    self.error(format!("bad string literal: {e}"))
                })
            }
            Some(_) => {
                let start = self.pos;
                while self.pos < self.chars.len() && !self.chars[self.pos].is_whitespace() {
                    self.pos += 1;
                }
                Ok(self.chars[start..self.pos].iter().collect())
            }
            None => Err(self.error("expected a file name")),
        }
    }

    /// Whitespace-separated `key=value` pairs until end of line.
    fn keywords(&mut self, mut value: impl FnMut(&mut Self, &str) -> Result<bool>) -> Result<()> {
        let mut seen = HashSet::new();
        while !self.at_end() {
            let start = self.pos;
            let key = self.ident()?;
            self.expect('=')?;
            if !seen.insert(key.clone()) {
                self.pos = start;
                return Err(self.error(format!("duplicate argument `{key}`")));
            }
            if !value(self, &key)? {
                self.pos = start;
                return Err(self.error(format!("unknown argument `{key}`")));
            }
        }
        Ok(())
    }

    /// Comma-separated arguments inside `( … )`: positional names first,
    /// then `key=expr`.
    fn call_args(&mut self) -> Result<(Vec<String>, Vec<(String, usize, CallValue)>)> {
        self.expect('(')?;
        let mut positional = Vec::new();
        let mut named = Vec::new();
        if self.eat(')') {
            return Ok((positional, named));
        }
        loop {
            let start = self.pos;
            let name = self.ident()?;
            if self.eat('=') {
                let value = if self.peek_ident() && !self.peek_expression_word() {
                    CallValue::Word(self.ident()?)
                } else {
                    CallValue::Expr(self.expr()?)
                };
                if named.iter().any(|(k, _, _)| *k == name) {
                    self.pos = start;
                    return Err(self.error(format!("duplicate argument `{name}`")));
                }
                named.push((name, start, value));
            } else if named.is_empty() {
                positional.push(name);
            } else {
                self.pos = start;
                return Err(self.error("positional argument after named ones"));
            }
            if self.eat(')') {
                return Ok((positional, named));
            }
            self.expect(',')?;
        }
    }

    fn peek_expression_word(&mut self) -> bool {
        let save = self.pos;
        let hit = self.ident().map(|w| w == "pi" || Func::from_name(&w).is_some()).unwrap_or(false);
        self.pos = save;
        hit
    }

    fn peek_word_is(&mut self, word: &str) -> bool {
        let save = self.pos;
        let hit = self.ident().map(|w| w == word).unwrap_or(false);
        self.pos = save;
        hit
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>> {
        let mut out = vec![self.expr()?];
        while self.eat(',') {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn statement(&mut self) -> Result<Vec<Statement>> {
        let start = self.pos;
        let head = self.ident()?;
        let one = |s| Ok(vec![s]);
        match head.as_str() {
            "grid" => one(self.grid()?),
            "state" => one(self.state()?),
            "observable" => one(self.observable()?),
            "apply" => self.apply(),
            "measure" => one(self.measure()?),
            "dump" => one(Statement::Dump(self.dump()?)),
            other => {
                self.pos = start;
                Err(self.error(format!("unknown statement `{other}`")))
            }
        }
    }

    fn grid(&mut self) -> Result<Statement> {
        let (mut ell, mut m, mut p) = (None, None, None);
        self.keywords(|s, key| {
            match key {
                "ell" => ell = Some(s.expr()?),
                "M" => m = Some(s.integer()? as usize),
                "P" => p = Some(s.integer()? as usize),
                _ => return Ok(false),
            }
            Ok(true)
        })?;
        Ok(Statement::Grid { ell, m, p })
    }

    fn state(&mut self) -> Result<Statement> {
        let mut registers = vec![self.ident()?];
        while self.peek_ident() {
            registers.push(self.ident()?);
        }
        self.expect('=')?;
        let kind_at = self.pos;
        let kind = self.ident()?;
        let args_at = self.pos;
        let (positional, named) = self.call_args()?;
        let end = self.pos;
        let take = |key: &str| -> Option<(usize, CallValue)> {
            named.iter().find(|(k, _, _)| k == key).map(|(_, at, v)| (*at, v.clone()))
        };
        let expr_of = |s: &mut Self, key: &str| -> Result<Option<Expr>> {
            match take(key) {
                None => Ok(None),
                Some((_, CallValue::Expr(e))) => Ok(Some(e)),
                Some((at, CallValue::Word(_))) => {
                    s.pos = at;
                    Err(s.error(format!("`{key}` needs a number")))
                }
            }
        };
        let allowed: &[&str] = match kind.as_str() {
            "comb" => &["Delta", "kappa", "offset"],
            "logical" => &["theta", "phi", "Delta", "kappa"],
            "bell" => &["Delta", "kappa"],
            _ => {
                self.pos = kind_at;
                return Err(self.error(format!("unknown preparation `{kind}`")));
            }
        };
        if let Some((k, at, _)) = named.iter().find(|(k, _, _)| !allowed.contains(&k.as_str())) {
            self.pos = *at;
            return Err(self.error(format!("unknown argument `{k}` for {kind}")));
        }
        let want_positional = usize::from(kind == "bell");
        if positional.len() != want_positional {
            self.pos = args_at;
            return Err(self.error(format!("{kind} takes {want_positional} positional argument(s)")));
        }
        let want_registers = if kind == "bell" { 2 } else { 1 };
        if registers.len() != want_registers {
            self.pos = kind_at;
            return Err(self.error(format!("{kind} prepares {want_registers} register(s), got {}", registers.len())));
        }
        let delta = expr_of(self, "Delta")?;
        let kappa = expr_of(self, "kappa")?;
        let prep = match kind.as_str() {
            "comb" => {
                let offset = match take("offset") {
                    None => Offset::Zero,
                    Some((_, CallValue::Word(w))) if w == "half" => Offset::Half,
                    Some((_, CallValue::Expr(Expr::Num(v)))) if v == 0.0 => Offset::Zero,
                    Some((at, _)) => {
                        self.pos = at;
                        return Err(self.error("offset must be `0` or `half`"));
                    }
                };
                Prep::Comb { delta, kappa, offset }
            }
            "logical" => {
                let required = |s: &mut Self, key: &str| -> Result<Expr> {
                    expr_of(s, key)?.ok_or_else(|| {
                        s.pos = args_at;
                        s.error(format!("logical needs `{key}=`"))
                    })
                };
                let theta = required(self, "theta")?;
                let phi = required(self, "phi")?;
                Prep::Logical { theta, phi, delta, kappa }
            }
            _ => {
                let which = Bell::NAMES.iter().find(|(n, _)| *n == positional[0]).map(|(_, b)| *b).ok_or_else(|| {
                    self.pos = args_at;
                    self.error(format!("unknown Bell state `{}`", positional[0]))
                })?;
                Prep::Bell { which, delta, kappa }
            }
        };
        self.pos = end;
        Ok(Statement::State { registers, prep })
    }

    fn observable(&mut self) -> Result<Statement> {
        let name = self.ident()?;
        self.expect('=')?;
        self.keyword("json")?;
        self.expect('(')?;
        let path = self.path_until(')')?;
        self.expect(')')?;
        Ok(Statement::Observable { name, path })
    }

    fn path_until(&mut self, close: char) -> Result<String> {
        if self.peek() == Some('"') {
            return self.path();
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos] != close && !self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a file name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    /// Gate name plus arguments, or `None` for names that are not gates.
    fn gate(&mut self) -> Result<Option<GateExpr>> {
        let start = self.pos;
        let name = self.ident()?;
        let gate = match name.as_str() {
            "D" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(')')?;
                GateExpr::Displace(a, b)
            }
            "ROT" => {
                self.expect('(')?;
                let mut args = Vec::with_capacity(4);
                for i in 0..4 {
                    if i > 0 {
                        self.expect(',')?;
                    }
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                GateExpr::Rot(args.try_into().expect("four arguments"))
            }
            "CNOT" => GateExpr::Cnot,
            other => match NamedGate::from_name(other) {
                Some(g) => GateExpr::Named(g),
                None => {
                    self.pos = start;
                    return Ok(None);
                }
            },
        };
        Ok(Some(gate))
    }

    fn register_list(&mut self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        if self.eat('(') {
            out.push(self.ident()?);
            while self.eat(',') {
                out.push(self.ident()?);
            }
            self.expect(')')?;
            return Ok(out);
        }
        while self.peek_ident() {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn apply(&mut self) -> Result<Vec<Statement>> {
        self.skip_ws();
        let start = self.pos;
        if self.peek_word_is("CZ") {
            self.ident()?;
            let targets = self.register_list()?;
            if targets.len() != 2 {
                self.pos = start;
                return Err(self.error("CZ takes two registers"));
            }
            let b = vec![targets[1].clone()];
            return Ok(vec![
                Statement::Apply { gate: GateExpr::Named(NamedGate::Fdag), targets: b.clone() },
                Statement::Apply { gate: GateExpr::Cnot, targets },
                Statement::Apply { gate: GateExpr::Named(NamedGate::F), targets: b },
            ]);
        }
        let gate = match self.gate()? {
            Some(g) => g,
            None => {
                let name = self.ident()?;
                return Err(CliError::Unknown { line: self.line, what: "gate", name });
            }
        };
        let targets = if gate == GateExpr::Cnot { self.register_list()? } else { self.plain_registers()? };
        if targets.len() != gate.arity() {
            self.pos = start;
            return Err(self.error(format!("{gate} acts on {} register(s), got {}", gate.arity(), targets.len())));
        }
        Ok(vec![Statement::Apply { gate, targets }])
    }

    fn plain_registers(&mut self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        while self.peek_ident() {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn check_keywords(&mut self, extra: &mut dyn FnMut(&mut Self, &str) -> Result<bool>) -> Result<Option<Check>> {
        let (mut expect, mut tol) = (None, None);
        self.keywords(|s, key| match key {
            "expect" => {
                expect = Some(s.expr_list()?);
                Ok(true)
            }
            "tol" => {
                tol = Some(s.expr()?);
                Ok(true)
            }
            _ => extra(s, key),
        })?;
        match (expect, tol) {
            (Some(expect), tol) => Ok(Some(Check { expect, tol })),
            (None, Some(_)) => Err(self.error("`tol=` needs `expect=`")),
            (None, None) => Ok(None),
        }
    }

    fn measure(&mut self) -> Result<Statement> {
        let start = self.pos;
        let kind = self.ident()?;
        let mut none = |_: &mut Self, _: &str| Ok(false);
        let (measure, check, arity) = match kind.as_str() {
            "expectation" => {
                let observable = self.ident()?;
                let register = self.ident()?;
                let check = self.check_keywords(&mut none)?;
                (Measure::Expectation { observable, register }, check, 1)
            }
            "correlator" => {
                let observables = [self.ident()?, self.ident()?];
                let registers = [self.ident()?, self.ident()?];
                let check = self.check_keywords(&mut none)?;
                (Measure::Correlator { observables, registers }, check, 1)
            }
            "bloch" => {
                let register = self.ident()?;
                let check = self.check_keywords(&mut none)?;
                (Measure::Bloch { register }, check, 3)
            }
            "povm" | "sample" => {
                let unitary = match self.gate()? {
                    Some(GateExpr::Cnot) => {
                        return Err(CliError::Semantic {
                            line: self.line,
                            message: "measurement unitaries act on one register".into(),
                        })
                    }
                    Some(g) => UnitaryRef::Gate(g),
                    None => UnitaryRef::Observable(self.ident()?),
                };
                let register = self.ident()?;
                let (mut shots, mut seed) = (None, 0u64);
                let check = self.check_keywords(&mut |s, key| {
                    match key {
                        "shots" => shots = Some(s.integer()?),
                        "seed" => seed = s.integer()?,
                        _ => return Ok(false),
                    }
                    Ok(true)
                })?;
                let measure = if kind == "povm" {
                    Measure::Povm { unitary, register, shots, seed }
                } else {
                    let shots = shots.ok_or_else(|| self.error("sample needs `shots=`"))?;
                    Measure::Sample { unitary, register, shots, seed }
                };
                (measure, check, 1)
            }
            other => {
                self.pos = start;
                return Err(self.error(format!("unknown measurement `{other}`")));
            }
        };
        if let Some(c) = &check {
            if c.expect.len() != arity {
                return Err(CliError::Semantic {
                    line: self.line,
                    message: format!("{kind} expects {arity} value(s) in `expect=`, got {}", c.expect.len()),
                });
            }
        }
        Ok(Statement::Measure { measure, check })
    }

    fn dump(&mut self) -> Result<Dump> {
        let start = self.pos;
        let kind = self.ident()?;
        let (mut phi, mut phi2, mut file, mut threshold, mut format) = (None, None, None, None, PairFormat::Csv);
        let registers = match kind.as_str() {
            "density" | "state" | "modular" | "modular_density" => vec![self.ident()?],
            "joint" | "pair" => vec![self.ident()?, self.ident()?],
            other => {
                self.pos = start;
                return Err(self.error(format!("unknown dump `{other}`")));
            }
        };
        let kind_ref = kind.as_str();
        self.keywords(|s, key| {
            match (kind_ref, key) {
                (_, "file") => file = Some(s.path()?),
                ("density", "phi") | ("joint", "phi1") => phi = Some(s.expr()?),
                ("joint", "phi2") => phi2 = Some(s.expr()?),
                ("joint" | "pair", "threshold") => threshold = Some(s.expr()?),
                ("pair", "format") => {
                    format = match s.ident()?.as_str() {
                        "csv" => PairFormat::Csv,
                        "binary" => PairFormat::Binary,
                        _ => return Err(s.error("format must be `csv` or `binary`")),
                    }
                }
                _ => return Ok(false),
            }
            Ok(true)
        })?;
        let file = file.ok_or_else(|| self.error("dump needs `file=`"))?;
        let zero = || Expr::Num(0.0);
        let mut regs = registers.into_iter();
        let mut next = || regs.next().expect("counted above");
        Ok(match kind_ref {
            "density" => Dump::Density { register: next(), phi: phi.unwrap_or_else(zero), file },
            "state" => Dump::State { register: next(), file },
            "modular" => Dump::Modular { register: next(), file },
            "modular_density" => Dump::ModularDensity { register: next(), file },
            "joint" => Dump::Joint {
                registers: [next(), next()],
                phi: [phi.unwrap_or_else(zero), phi2.unwrap_or_else(zero)],
                file,
                threshold,
            },
            _ => Dump::Pair { registers: [next(), next()], file, format, threshold },
        })
    }
}

#[derive(Debug, Clone)]
enum CallValue {
    Expr(Expr),
    Word(String),
}

fn registers_of(statement: &Statement) -> Vec<&str> {
    match statement {
        Statement::Apply { targets, .. } => targets.iter().map(String::as_str).collect(),
        Statement::Measure { measure, .. } => match measure {
            Measure::Expectation { register, .. }
            | Measure::Bloch { register }
            | Measure::Povm { register, .. }
            | Measure::Sample { register, .. } => vec![register],
            Measure::Correlator { registers, .. } => registers.iter().map(String::as_str).collect(),
        },
        Statement::Dump(d) => match d {
            Dump::Density { register, .. }
            | Dump::State { register, .. }
            | Dump::Modular { register, .. }
            | Dump::ModularDensity { register, .. } => vec![register],
            Dump::Joint { registers, .. } | Dump::Pair { registers, .. } => {
                registers.iter().map(String::as_str).collect()
            }
        },
        _ => Vec::new(),
    }
}

fn observables_of(statement: &Statement) -> Vec<&str> {
    match statement {
        Statement::Measure { measure, .. } => match measure {
            Measure::Expectation { observable, .. } => vec![observable],
            Measure::Correlator { observables, .. } => observables.iter().map(String::as_str).collect(),
            Measure::Povm { unitary: UnitaryRef::Observable(o), .. }
            | Measure::Sample { unitary: UnitaryRef::Observable(o), .. } => vec![o],
            _ => Vec::new(),
        },
        _ => Vec::new(),
    }
}

/// Registers declared before use, known observables, one leading grid.
fn validate(program: &Program) -> Result<()> {
    let mut registers: HashMap<&str, usize> = HashMap::new();
    let mut observables: HashSet<&str> = BUILTIN_OBSERVABLES.into_iter().collect();
    for (idx, Located { line, statement }) in program.statements.iter().enumerate() {
        let line = *line;
        match statement {
            Statement::Grid { .. } if idx > 0 => {
                return Err(CliError::Semantic { line, message: "`grid` must be the first statement".into() });
            }
            Statement::State { registers: names, .. } => {
                for (i, name) in names.iter().enumerate() {
                    if registers.contains_key(name.as_str()) || names[..i].contains(name) {
                        return Err(CliError::Semantic { line, message: format!("register `{name}` declared twice") });
                    }
                }
                for name in names {
                    registers.insert(name, line);
                }
            }
            Statement::Observable { name, .. } => {
                if !observables.insert(name) {
                    return Err(CliError::Semantic { line, message: format!("observable `{name}` declared twice") });
                }
            }
            _ => {}
        }
        for name in registers_of(statement) {
            if !registers.contains_key(name) {
                return Err(CliError::UndeclaredRegister { line, name: name.to_string() });
            }
        }
        let regs = registers_of(statement);
        if regs.len() == 2 && regs[0] == regs[1] {
            return Err(CliError::Semantic { line, message: format!("register `{}` used twice", regs[0]) });
        }
        for name in observables_of(statement) {
            if !observables.contains(name) {
                return Err(CliError::Unknown { line, what: "observable", name: name.to_string() });
            }
        }
    }
    Ok(())
}

use modvar_cli::ast::{BinOp, Expr, Func, GateExpr, NamedGate, Statement};
use modvar_cli::{parse, run, CliError, Program, RunOptions};
use proptest::prelude::*;
use serde_json::Value;

fn run_lines(src: &str) -> Vec<Value> {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions { out_dir: dir.path().to_path_buf(), base_dir: dir.path().to_path_buf(), ..Default::default() };
    let mut out = Vec::new();
    let summary = run(&parse(src).unwrap(), &opts, &mut out).unwrap();
    assert_eq!(summary.failed_checks, 0);
    String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn value(rec: &Value) -> f64 {
    rec["value"].as_f64().unwrap()
}

#[test]
fn grid_line_evaluates_ell() {
    let p = parse("grid ell=2*sqrt(pi) M=16 P=8").unwrap();
    let Statement::Grid { ell, m, p } = &p.statements[0].statement else { panic!() };
    assert!((ell.as_ref().unwrap().eval() - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
    assert_eq!((*m, *p), (Some(16), Some(8)));
}

#[test]
fn empty_and_comment_only_sources_are_valid() {
    assert!(parse("").unwrap().is_empty());
    assert!(parse("# nothing\n\n   # here\n").unwrap().is_empty());
}

#[test]
fn undeclared_register_is_named_with_its_line() {
    let err = parse("state q0 = comb()\n\napply X q9\n").unwrap_err();
    match &err {
        CliError::UndeclaredRegister { line, name } => assert_eq!((*line, name.as_str()), (3, "q9")),
        other => panic!("{other:?}"),
    }
    let msg = err.to_string();
    assert!(msg.contains("q9") && msg.contains("line 3"), "{msg}");
}

#[test]
fn unknown_gate_and_observable_names() {
    let err = parse("state q = comb()\napply HADAMARD q").unwrap_err();
    assert!(matches!(err, CliError::Unknown { line: 2, what: "gate", .. }), "{err:?}");
    let err = parse("state q = comb()\nmeasure expectation ReW q").unwrap_err();
    assert!(matches!(err, CliError::Unknown { line: 2, what: "observable", .. }), "{err:?}");
}

#[test]
fn syntax_errors_report_columns() {
    let err = parse("grid ell=2*) M=4").unwrap_err();
    match err {
        CliError::Syntax { line, column, .. } => assert_eq!((line, column), (1, 12)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse("grid M=4.5").unwrap_err(), CliError::Syntax { column: 8, .. }));
    assert!(matches!(parse("teleport q").unwrap_err(), CliError::Syntax { column: 1, .. }));
    assert!(matches!(parse("state q = comb(offset=third)").unwrap_err(), CliError::Syntax { .. }));
}

#[test]
fn declaration_rules() {
    assert!(parse("state q = comb()\ngrid M=4").is_err());
    assert!(parse("state q = comb()\nstate q = comb()").is_err());
    assert!(parse("state a = bell(phi_plus)").is_err());
    assert!(parse("state a b = bell(phi_plus)\napply CNOT a a").is_err());
    assert!(parse("state a = comb()\napply X a tol=1").is_err());
}

#[test]
fn cz_expands_to_fourier_conjugated_cnot() {
    let p = parse("state a b = bell(phi_plus)\napply CZ a b").unwrap();
    let gates: Vec<_> = p.statements[1..]
        .iter()
        .map(|l| match &l.statement {
            Statement::Apply { gate, targets } => (gate.clone(), targets.clone()),
            _ => panic!(),
        })
        .collect();
    assert_eq!(gates[0], (GateExpr::Named(NamedGate::Fdag), vec!["b".to_string()]));
    assert_eq!(gates[1], (GateExpr::Cnot, vec!["a".to_string(), "b".to_string()]));
    assert_eq!(gates[2], (GateExpr::Named(NamedGate::F), vec!["b".to_string()]));
    assert!(p.statements[1..].iter().all(|l| l.line == 2));
}

const KITCHEN_SINK: &str = r#"
grid ell=2*sqrt(pi) M=32 P=16   # trailing comment
state a = comb(Delta=0.1, offset=half)
state b = logical(theta=pi/3, phi=-pi/4, kappa=1/(10*2^0.5))
state c d = bell(psi_minus, Delta=0.2)
observable O = json("obs file.json")
apply D(sqrt(2)*pi, -1e-3) a
apply ROT(0, 0, 1, pi/2) b
apply CNOT(a, b)
apply SHEARDAG c
measure expectation ReZ a expect=exp(-(pi*0.1)^2) tol=1e-2
measure correlator ReZ O c d
measure bloch b expect=0.5,-0.5,cos(pi/3)
measure povm G1X b seed=3
measure sample D(0, 2*pi/sqrt(pi)) b shots=10 seed=4 expect=0 tol=1
dump density a phi=pi/2 file=out/a.csv
dump joint c d phi1=0 phi2=pi/2 file="joint.csv" threshold=1e-6
dump pair c d file=pair.bin format=binary
dump modular_density b file=b.csv
"#;

#[test]
fn printing_reaches_a_fixpoint() {
    let first = parse(KITCHEN_SINK).unwrap();
    let printed = first.to_string();
    let second = parse(&printed).unwrap();
    assert_eq!(first, second);
    assert_eq!(printed, second.to_string());
    let fig2 = parse(include_str!("../examples/fig2.mv")).unwrap();
    assert_eq!(parse(&fig2.to_string()).unwrap(), fig2);
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0.0f64..1e6).prop_map(Expr::Num), Just(Expr::Pi), (0u32..100).prop_map(|n| Expr::Num(n as f64))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
        let func = prop_oneof![Just(Func::Sqrt), Just(Func::Exp), Just(Func::Cos)];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (func, inner.clone()).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
            (inner.clone(), op, inner).prop_map(|(a, o, b)| Expr::Bin(Box::new(a), o, Box::new(b))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn expressions_survive_printing(e in arb_expr(), f in arb_expr()) {
        let src = format!("state q = comb()\napply D({e}, {f}) q\nmeasure expectation ReZ q expect={e} tol={f}");
        let p: Program = parse(&src).unwrap();
        let reparsed = parse(&p.to_string()).unwrap();
        prop_assert_eq!(&p, &reparsed);
        let Statement::Apply { gate: GateExpr::Displace(a, b), .. } = &reparsed.statements[1].statement else {
            panic!()
        };
        prop_assert_eq!(a, &e);
        prop_assert_eq!(b, &f);
    }
}

#[test]
fn zero_state_reads_positive_re_z_and_x_negates_it() {
    let recs = run_lines("state q = logical(theta=0, phi=0)\nmeasure expectation ReZ q\napply X q\nmeasure expectation ReZ q");
    let (before, after) = (value(&recs[0]), value(&recs[1]));
    assert!(before > 0.9 && before < 1.0, "{before}");
    assert!((before + after).abs() < 1e-8, "{before} {after}");
    let oracle = (-(std::f64::consts::PI * 0.05).powi(2)).exp();
    assert!((before - oracle).abs() < 1e-3);
}

#[test]
fn bell_correlator_matches_squared_k_factor() {
    let recs = run_lines(
        "grid M=64 P=8\nstate a b = bell(phi_plus)\nstate c = logical(theta=0, phi=0)\n\
         measure correlator ReZ ReZ a b\nmeasure correlator ReZ ReZ b a\nmeasure expectation ReZ c",
    );
    let (ab, ba, kz) = (value(&recs[0]), value(&recs[1]), value(&recs[2]));
    assert!(ab > 0.0);
    assert!((ab - kz * kz).abs() < 2e-3, "{ab} vs {}", kz * kz);
    assert!((ab - ba).abs() < 1e-12);
}

#[test]
fn scripted_cnot_flips_target_of_one_control() {
    let recs = run_lines(
        "grid M=64 P=8\nstate a = logical(theta=pi, phi=0)\nstate b = logical(theta=0, phi=0)\n\
         apply CNOT a b\nmeasure expectation ReZ b\nmeasure expectation ReZ a\n\
         apply CNOT b a\nmeasure expectation ReZ a",
    );
    let kz2 = (-2.0 * (std::f64::consts::PI * 0.05).powi(2)).exp();
    assert!((value(&recs[0]) + kz2).abs() < 5e-3, "{}", value(&recs[0]));
    assert!(value(&recs[1]) < -0.9);
    // x_a -> 2x_a + x_b widens the spikes of a to sqrt(5)·Delta.
    let kz5 = (-5.0 * (std::f64::consts::PI * 0.05).powi(2)).exp();
    assert!((value(&recs[2]) - kz5).abs() < 5e-3, "control |1> flips a back: {}", value(&recs[2]));
}

#[test]
fn povm_record_has_report_fields() {
    let recs = run_lines("state q = logical(theta=pi/2, phi=0)\nmeasure povm X q shots=1000 seed=42\nmeasure povm ReX q");
    let r = &recs[0];
    for key in ["p_plus", "p_minus", "expectation", "shots", "counts", "seed"] {
        assert!(!r[key].is_null(), "missing {key}");
    }
    let counts: Vec<u64> = r["counts"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(counts.iter().sum::<u64>(), 1000);
    assert_eq!(r["seed"].as_u64(), Some(42));
    assert!(recs[1]["counts"].is_null());
    assert!((recs[1]["expectation"].as_f64().unwrap() - r["expectation"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let src = include_str!("../examples/fig2.mv");
    let once = || {
        let dir = tempfile::tempdir().unwrap();
        let opts = RunOptions { out_dir: dir.path().into(), ..Default::default() };
        let mut out = Vec::new();
        run(&parse(src).unwrap(), &opts, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        text.replace(&dir.path().display().to_string(), "")
    };
    assert_eq!(once(), once());
}

#[test]
fn runtime_errors_carry_line_and_exit_code() {
    let program = parse("state q = comb()\n\napply D(0.1234, 0) q").unwrap();
    let mut out = Vec::new();
    let err = run(&program, &RunOptions::default(), &mut out).unwrap_err();
    assert_eq!(err.line(), Some(3));
    assert_eq!(err.exit_code(), 1);
    let rec: Value = serde_json::from_str(&modvar_cli::run::error_record(&err).to_json()).unwrap();
    assert_eq!(rec["kind"], "error");
    assert_eq!(rec["line"], 3);

    let big = parse("grid M=64 P=64\nstate a b = bell(phi_plus)").unwrap();
    let err = run(&big, &RunOptions::default(), &mut Vec::new()).unwrap_err();
    assert!(matches!(err, CliError::Runtime { source: modvar_core::Error::MemoryCap { .. }, .. }), "{err:?}");
}

#[test]
fn failed_checks_are_counted_not_fatal() {
    let program = parse("state q = comb()\nmeasure expectation ReZ q expect=0 tol=1e-3\nmeasure expectation ReZ q").unwrap();
    let mut out = Vec::new();
    let summary = run(&program, &RunOptions::default(), &mut out).unwrap();
    assert_eq!((summary.records, summary.checks, summary.failed_checks), (2, 1, 1));
    assert_eq!(summary.exit_code(), 2);
}

#[test]
fn observables_load_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let ell = 2.0 * std::f64::consts::PI.sqrt();
    let table = modvar_core::readout::PhaseSpaceObservable::<f64>::re_z(ell);
    let spec = modvar_core::readout::ObservableSpec::from(&table);
    std::fs::write(dir.path().join("z.json"), serde_json::to_string(&spec).unwrap()).unwrap();
    let program = parse(
        "state q = logical(theta=0, phi=0)\nobservable MyZ = json(z.json)\n\
         measure expectation MyZ q\nmeasure expectation ReZ q",
    )
    .unwrap();
    let opts = RunOptions { out_dir: dir.path().into(), base_dir: dir.path().into(), ..Default::default() };
    let mut out = Vec::new();
    run(&program, &opts, &mut out).unwrap();
    let recs: Vec<Value> = String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(value(&recs[0]), value(&recs[1]));
}

#[test]
fn dumps_write_csv_with_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let program = parse(
        "grid M=64 P=8\nstate q = logical(theta=pi/2, phi=0)\nstate a b = bell(phi_plus)\n\
         dump density q phi=pi/2 file=d/q.csv\ndump state q file=q_state.csv\ndump modular q file=m.csv\n\
         dump density a phi=0 file=a.csv\ndump pair a b file=ab.bin format=binary",
    )
    .unwrap();
    let opts = RunOptions { out_dir: dir.path().into(), ..Default::default() };
    run(&program, &opts, &mut Vec::new()).unwrap();
    let density = std::fs::read_to_string(dir.path().join("d/q.csv")).unwrap();
    assert!(density.starts_with("x_phi,density"));
    assert_eq!(density.lines().count(), 64 * 8 + 1);
    for f in ["d/q.json", "q_state.json", "m.json", "a.json", "ab.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::metadata(dir.path().join("ab.bin")).unwrap().len(), (512 * 512 * 16) as u64);
    let a: f64 = std::fs::read_to_string(dir.path().join("a.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum::<f64>()
        * (2.0 * std::f64::consts::PI.sqrt() / 64.0);
    assert!((a - 1.0).abs() < 1e-10, "{a}");
}

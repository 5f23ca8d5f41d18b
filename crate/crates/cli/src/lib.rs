//! Command-line front end for `fraclab-core`.
//!
//! Exit codes: `0` all checks passed, `1` a check or assertion failed,
//! `2` usage or input error (bad flags, unreadable file, malformed
//! expression or DIMACS), `3` a size cap or bit budget was exceeded.

pub mod expr;

use std::fmt::Write as _;
use std::path::PathBuf;

use fraclab_core::ackermann::{self, Tower};
use fraclab_core::construct::ConstructError;
use fraclab_core::fraclp::{self, LpError, LpOptions};
use fraclab_core::hall::{self, HallError, HallOptions};
use fraclab_core::invariants;
use fraclab_core::rational;
use fraclab_core::verify::{self, Suite};
use fraclab_core::{dimacs, Graph};
use num_bigint::BigUint;
use serde_json::{json, Value};

pub use expr::{parse_expression, ParseError, ParseErrorKind};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Largest expression size `gen` and the exact commands will build.
pub const BUILD_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Gen,
    Alpha,
    Chi,
    ChiF,
    Hall,
    Gap,
    Ackermann,
    /// `None` runs every suite.
    Verify(Option<Suite>),
}

impl Command {
    fn needs_graph(&self) -> bool {
        !matches!(self, Command::Ackermann | Command::Verify(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Expr(String),
    Dimacs(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<Input>,
    pub seed: u64,
    pub hall_cap: usize,
    pub lp_cap: usize,
    pub bits: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            seed: 0,
            hall_cap: hall::DEFAULT_HALL_CAP,
            lp_cap: fraclp::DEFAULT_LP_LIMIT,
            bits: ackermann::DEFAULT_BUDGET,
            format: Format::Table,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.hall_cap == 0 || self.lp_cap == 0 || self.bits == 0 {
            return Err("caps must be positive".into());
        }
        if self.command.needs_graph() && self.input.is_none() {
            return Err("this command needs --expr or --dimacs".into());
        }
        Ok(())
    }
}

/// What a run produced: the exit status and the text to emit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub output: String,
}

impl Outcome {
    fn new(status: i32, output: String) -> Self {
        Self { status, output }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Self::new(EXIT_USAGE, format!("error: {msg}\n"))
    }

    fn cap(msg: impl std::fmt::Display) -> Self {
        Self::new(EXIT_CAP, format!("error: {msg}\n"))
    }
}

fn construct_status(e: &ConstructError) -> i32 {
    match e {
        ConstructError::TooLarge { .. } | ConstructError::BudgetExhausted { .. } => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

fn lp_failure(e: LpError) -> Outcome {
    match e {
        LpError::Construct(c) => Outcome::new(construct_status(&c), format!("error: {c}\n")),
        LpError::Empty | LpError::Invariant(_) => Outcome::usage(e),
        LpError::TooLarge { .. } | LpError::BitCap { .. } => Outcome::cap(e),
    }
}

fn hall_failure(e: HallError) -> Outcome {
    match e {
        HallError::Lp(lp) => lp_failure(lp),
        HallError::Empty => Outcome::usage(e),
        HallError::TooLarge { .. } => Outcome::cap(e),
    }
}

fn load_graph(input: &Input) -> Result<Graph, Outcome> {
    match input {
        Input::Expr(text) => {
            let e = parse_expression(text).map_err(Outcome::usage)?;
            e.build_within(BUILD_LIMIT)
                .map_err(|err| Outcome::new(construct_status(&err), format!("error: {err}\n")))
        }
        Input::Dimacs(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Outcome::usage(format!("cannot read {}: {e}", path.display())))?;
            dimacs::parse(&text).map_err(Outcome::usage)
        }
    }
}

fn json_text(mut v: Value) -> String {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(verify::SCHEMA));
    }
    let mut s = serde_json::to_string_pretty(&v).expect("json value");
    s.push('\n');
    s
}

fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        let _ = writeln!(s, "{k:<width$}  {v}");
    }
    s
}

fn emit(config: &RunConfig, status: i32, json_value: Value, rows: &[(&str, String)]) -> Outcome {
    let text = match config.format {
        Format::Json => json_text(json_value),
        Format::Table => table(rows),
    };
    Outcome::new(status, text)
}

fn list(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

/// Runs one command. Output is returned, or written to `config.out` when
/// set (then the returned text is empty unless writing failed).
pub fn run(config: &RunConfig) -> Outcome {
    if let Err(msg) = config.validate() {
        return Outcome::usage(msg);
    }
    let outcome = execute(config);
    match &config.out {
        Some(path) if !outcome.output.starts_with("error:") => {
            match std::fs::write(path, &outcome.output) {
                Ok(()) => Outcome::new(outcome.status, String::new()),
                Err(e) => Outcome::usage(format!("cannot write {}: {e}", path.display())),
            }
        }
        _ => outcome,
    }
}

fn execute(config: &RunConfig) -> Outcome {
    let graph = match (&config.input, config.command.needs_graph()) {
        (Some(input), true) => match load_graph(input) {
            Ok(g) => Some(g),
            Err(o) => return o,
        },
        _ => None,
    };
    let lp = LpOptions {
        max_n: config.lp_cap,
        bit_cap: fraclp::DEFAULT_BIT_CAP,
    };
    let hall_opts = HallOptions {
        cap: config.hall_cap,
        connected_only: false,
    };
    match &config.command {
        Command::Gen => {
            let g = graph.expect("graph command");
            match config.format {
                Format::Table => Outcome::new(EXIT_PASS, dimacs::write(&g)),
                Format::Json => Outcome::new(
                    EXIT_PASS,
                    json_text(json!({
                        "n": g.n(),
                        "edges": g.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
                        "labels": g.labels(),
                    })),
                ),
            }
        }
        Command::Alpha => {
            let g = graph.expect("graph command");
            let (a, witness) = invariants::alpha(&g);
            emit(
                config,
                EXIT_PASS,
                json!({ "n": g.n(), "alpha": a, "witness": witness.to_vec() }),
                &[("n", g.n().to_string()), ("alpha", a.to_string()), ("witness", list(&witness.to_vec()))],
            )
        }
        Command::Chi => {
            let g = graph.expect("graph command");
            if g.n() > invariants::COMPOSITION_LIMIT {
                return Outcome::cap(format!(
                    "graph has {} vertices, exact coloring limit is {}",
                    g.n(),
                    invariants::COMPOSITION_LIMIT
                ));
            }
            let (chi, coloring) = invariants::chromatic_number(&g);
            let status = if coloring.is_proper(&g) { EXIT_PASS } else { EXIT_FAIL };
            emit(
                config,
                status,
                json!({ "n": g.n(), "chi": chi, "coloring": coloring.colors }),
                &[("n", g.n().to_string()), ("chi", chi.to_string()), ("coloring", list(&coloring.colors))],
            )
        }
        Command::ChiF => {
            let g = graph.expect("graph command");
            let solution = match fraclp::chi_f_with(&g, &lp) {
                Ok(s) => s,
                Err(e) => return lp_failure(e),
            };
            let cert = solution.certificate;
            let verdict = fraclp::verify_certificate(&g, &cert);
            let status = if verdict.is_ok() { EXIT_PASS } else { EXIT_FAIL };
            let mut rows = vec![
                ("n", g.n().to_string()),
                ("chi_f", rational::display(&cert.value)),
                ("verified", verdict.is_ok().to_string()),
                ("pivots", solution.stats.pivots.to_string()),
                ("columns", solution.stats.columns.to_string()),
            ];
            let primal: Vec<String> = cert
                .primal
                .iter()
                .map(|p| format!("{} x {}", list(&p.set), rational::display(&p.weight)))
                .collect();
            let primal_text = primal.join("; ");
            rows.push(("primal", primal_text));
            let dual: Vec<String> = cert.dual.weights().iter().map(rational::display).collect();
            rows.push(("dual", dual.join(" ")));
            emit(
                config,
                status,
                json!({
                    "certificate": cert,
                    "verified": verdict.is_ok(),
                    "defect": verdict.err(),
                    "stats": solution.stats,
                }),
                &rows,
            )
        }
        Command::Hall => {
            let g = graph.expect("graph command");
            match hall::hall_ratio_with(&g, &hall_opts) {
                Ok(r) => emit(
                    config,
                    EXIT_PASS,
                    serde_json::to_value(&r).expect("serializable"),
                    &[
                        ("rho", rational::display(&r.value)),
                        ("witness", list(&r.witness.to_vec())),
                        ("alpha_of_witness", r.alpha_of_witness.to_string()),
                    ],
                ),
                Err(e @ HallError::TooLarge { .. }) => {
                    let lb = hall::hall_ratio_lower_bound(&g, 1000, config.seed);
                    Outcome::cap(format!(
                        "{e}\nlower bound from 1000 seeded subsets: {}",
                        rational::display(&lb.value)
                    ))
                }
                Err(e) => hall_failure(e),
            }
        }
        Command::Gap => {
            let g = graph.expect("graph command");
            match hall::gap_report_with(&g, &hall_opts, &lp) {
                Ok(r) => {
                    let status = if r.chain_ok { EXIT_PASS } else { EXIT_FAIL };
                    emit(
                        config,
                        status,
                        serde_json::to_value(&r).expect("serializable"),
                        &[
                            ("n", r.n.to_string()),
                            ("n/alpha", rational::display(&r.n_over_alpha)),
                            ("rho", rational::display(&r.rho)),
                            ("chi_f", rational::display(&r.chi_f)),
                            ("chi", r.chi.to_string()),
                            ("ratio", rational::display(&r.ratio)),
                            ("chain_ok", r.chain_ok.to_string()),
                        ],
                    )
                }
                Err(e) => hall_failure(e),
            }
        }
        Command::Ackermann => ackermann_report(config),
        Command::Verify(suite) => verify_report(config, *suite),
    }
}

fn tower_cell(t: &Tower) -> (Value, String) {
    match t {
        Tower::Value(v) if v.bits() <= 64 => (json!(v.to_string()), v.to_string()),
        Tower::Value(v) => (
            json!({ "bits": v.bits() }),
            format!("<{} bits>", v.bits()),
        ),
        Tower::Overflow { height } => (json!({ "overflow": { "height": height } }), "overflow".into()),
    }
}

fn ackermann_report(config: &RunConfig) -> Outcome {
    let budget = config.bits;
    let mut rows_json = Vec::new();
    let mut text = String::new();
    let _ = writeln!(text, "F_k(b), bit budget {budget}");
    let _ = write!(text, "{:>4}", "k\\b");
    for b in 0..=6 {
        let _ = write!(text, "{b:>16}");
    }
    text.push('\n');
    for k in 1..=4u32 {
        let _ = write!(text, "{k:>4}");
        let mut cells = Vec::new();
        for b in 0..=6u64 {
            let t = ackermann::tower(k, &BigUint::from(b), budget).expect("k >= 1");
            let (j, s) = tower_cell(&t);
            cells.push(j);
            let _ = write!(text, "{s:>16}");
        }
        text.push('\n');
        rows_json.push(json!({ "k": k, "values": cells }));
    }

    let mut facts = Vec::new();
    let mut all_ok = true;
    let mut record = |name: String, r: Result<bool, ackermann::AckermannError>| {
        let (status, ok) = match &r {
            Ok(true) => ("holds", true),
            Ok(false) => ("fails", false),
            Err(ackermann::AckermannError::Overflow { .. }) => ("untestable", true),
            Err(_) => ("error", false),
        };
        all_ok &= ok;
        facts.push((name, status));
    };
    for k in 1..=2u32 {
        for n in 1..=4u64 {
            record(format!("fact1 k={k} n={n}"), ackermann::check_fact1(k, n, budget));
        }
    }
    for e in [128u32, 200] {
        let m = BigUint::from(1u32) << e;
        record(format!("fact2 k=1 M=2^{e}"), ackermann::check_fact2(1, &m, budget));
    }
    for k in 1..=2u32 {
        for n in 0..=5u64 {
            record(format!("fact3 k={k} n={n}"), ackermann::check_fact3(k, n, budget));
        }
    }
    let mut appendix = Vec::new();
    for (k, n_max) in [(1u32, 30u64), (2, 4)] {
        match ackermann::check_appendix_basics(k, n_max, config.seed, budget) {
            Ok(rep) => {
                record(format!("appendix k={k} n<={n_max}"), Ok(rep.holds));
                appendix.push(serde_json::to_value(&rep).expect("serializable"));
            }
            Err(e) => record(format!("appendix k={k}"), Err(e)),
        }
    }
    let status = if all_ok { EXIT_PASS } else { EXIT_FAIL };
    match config.format {
        Format::Json => Outcome::new(
            status,
            json_text(json!({
                "budget_bits": budget,
                "towers": rows_json,
                "facts": facts.iter().map(|(n, s)| json!({ "check": n, "status": s })).collect::<Vec<_>>(),
                "appendix": appendix,
            })),
        ),
        Format::Table => {
            text.push('\n');
            let rows: Vec<(&str, String)> = facts.iter().map(|(n, s)| (n.as_str(), s.to_string())).collect();
            text.push_str(&table(&rows));
            Outcome::new(status, text)
        }
    }
}

fn verify_report(config: &RunConfig, suite: Option<Suite>) -> Outcome {
    let battery = match suite {
        None => verify::run_battery(config.seed),
        Some(s) => {
            let report = verify::run_suite(s, config.seed);
            verify::BatteryReport {
                schema: verify::SCHEMA,
                seed: config.seed,
                passed: report.passed,
                suites: vec![report],
            }
        }
    };
    let status = if battery.passed { EXIT_PASS } else { EXIT_FAIL };
    match config.format {
        Format::Json => {
            let mut s = battery.to_json();
            s.push('\n');
            Outcome::new(status, s)
        }
        Format::Table => {
            let mut text = String::new();
            for s in &battery.suites {
                let _ = writeln!(
                    text,
                    "{:<18} {:>4} checks  {}",
                    s.suite,
                    s.checks,
                    if s.passed { "PASS".to_string() } else { format!("FAIL ({} failed)", s.failed) }
                );
                for r in s.records.iter().filter(|r| !r.ok) {
                    let _ = writeln!(text, "    {}: {}", r.label, r.detail);
                }
            }
            Outcome::new(status, text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command, expr: &str) -> RunConfig {
        RunConfig {
            input: Some(Input::Expr(expr.into())),
            format: Format::Json,
            ..RunConfig::new(command)
        }
    }

    #[test]
    fn gap_on_join_of_cycles() {
        let out = run(&cfg(Command::Gap, "join(cycle(5),cycle(7))"));
        assert_eq!(out.status, EXIT_PASS);
        let v: Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["rho"], json!({"num": "9", "den": "2"}));
        assert_eq!(v["chi_f"], json!({"num": "29", "den": "6"}));
        assert_eq!(v["ratio"], json!({"num": "29", "den": "27"}));
    }

    #[test]
    fn usage_errors() {
        let out = run(&RunConfig::new(Command::Alpha));
        assert_eq!(out.status, EXIT_USAGE);
        let out = run(&cfg(Command::Alpha, "compose(cycle(3); complete(1), complete(1))"));
        assert_eq!(out.status, EXIT_USAGE);
        assert!(out.output.contains("arity"), "{}", out.output);
        let mut c = cfg(Command::Alpha, "cycle(5)");
        c.hall_cap = 0;
        assert_eq!(run(&c).status, EXIT_USAGE);
    }

    #[test]
    fn cap_errors() {
        let mut c = cfg(Command::Hall, "cycle(12)");
        c.hall_cap = 10;
        let out = run(&c);
        assert_eq!(out.status, EXIT_CAP);
        assert!(out.output.contains("lower bound"));
        let mut c = cfg(Command::ChiF, "cycle(12)");
        c.lp_cap = 10;
        assert_eq!(run(&c).status, EXIT_CAP);
        assert_eq!(run(&cfg(Command::Gen, "gadget(10, 9, seed=1, budget=2)")).status, EXIT_CAP);
    }

    #[test]
    fn chi_f_certificate_re_verifies() {
        let out = run(&cfg(Command::ChiF, "petersen"));
        assert_eq!(out.status, EXIT_PASS);
        let v: Value = serde_json::from_str(&out.output).unwrap();
        let cert: fraclp::FractionalCertificate = serde_json::from_value(v["certificate"].clone()).unwrap();
        assert_eq!(cert.value, rational::rat(5, 2));
        assert_eq!(fraclp::verify_certificate(&Graph::petersen(), &cert), Ok(()));
    }

    #[test]
    fn table_output() {
        let mut c = cfg(Command::Alpha, "cycle(7)");
        c.format = Format::Table;
        let out = run(&c);
        assert_eq!(out.output, "n        7\nalpha    3\nwitness  {0, 2, 4}\n");
        let mut c = cfg(Command::Gen, "cycle(3)");
        c.format = Format::Table;
        assert_eq!(run(&c).output, "p edge 3 3\ne 1 2\ne 1 3\ne 2 3\n");
    }
}

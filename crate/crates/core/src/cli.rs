//! The `hardy` command-line tool.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::format::{complex, complex_vec, fmt, fmt_complex, num, nums};
use crate::hardy::{
    certification_construction, hardy_probability, joint_table, make_witness_report,
    search_bipartitions, HardyCondition, HardyConstruction, HardyWitness, PairChoice, Verdict,
    WitnessOptions, WitnessReport, DEFAULT_ZERO_TOL, NOT_APPLICABLE_REASON,
};
use crate::lhv::{
    certify, certify_multipartite, hardy_condition_set, verify_no_deterministic_model,
    Certification, LhvCertificate,
};
use crate::multipartite::{multipartite_witness, MultipartiteOptions, MultipartiteVerdict};
use crate::sampler::{analyze, records_to_csv, sample_table, SettingSchedule, DEFAULT_SIGMA};
use crate::scan::scan;
use crate::schmidt::{distinct_weight_pairs, schmidt_decompose, DEFAULT_EPS_DEG};
use crate::statefile::read_state;
use crate::table::JointTable;
use crate::tensor::{Bipartition, StateVector};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hardy", version, about = "Hardy-type nonlocality tests for entangled pure states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schmidt weights across a bipartition.
    Schmidt(StateArgs),
    /// Build the Hardy observables and evaluate the six conditions.
    Witness(WitnessArgs),
    /// Decide whether a local hidden-variable model reproduces the table.
    Certify(CertifyArgs),
    /// Sample a finite-shot experiment and test the conditions statistically.
    Simulate(SimulateArgs),
    /// Sweep the two-qubit Hardy probability over the first squared weight.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Bipartite,
    Multipartite,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// JSON state file.
    #[arg(long)]
    pub state: PathBuf,
    /// Bipartition such as "1,2|3" (1-based), or "all" to search every split.
    /// Defaults to the first subsystem against the rest.
    #[arg(long)]
    pub split: Option<String>,
    /// Schmidt term pair "i,j" (1-based) or "auto".
    #[arg(long, default_value = "auto")]
    pub pair: String,
    #[arg(long, default_value_t = DEFAULT_EPS_DEG)]
    pub eps_deg: f64,
    #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
    pub zero_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub common: StateArgs,
    #[arg(long, value_enum, default_value_t = Mode::Bipartite)]
    pub mode: Mode,
    /// Multipartite mode: try every peeling order.
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub witness: WitnessArgs,
    /// Zero entries at or below --zero-tol before certifying.
    #[arg(long)]
    pub idealized: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: StateArgs,
    #[arg(long)]
    pub shots: usize,
    #[arg(long)]
    pub seed: u64,
    /// Write the shot records as CSV.
    #[arg(long)]
    pub export: Option<PathBuf>,
    /// "round-robin" or a comma list of setting pairs such as "Y1Y2" or "X1X2,Y1Y2".
    #[arg(long, default_value = "round-robin")]
    pub schedule: String,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    pub sigma: f64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalFailure(_) => CliError::Numeric(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Output text and exit code of a command.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

/// Parses `args` (program name first), runs the command and returns its exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(out) => {
            let _ = stdout.write_all(out.text.as_bytes());
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Schmidt(a) => cmd_schmidt(a),
        Command::Witness(a) => cmd_witness(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Scan(a) => cmd_scan(a),
    }
}

fn check_positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {x}")))
    }
}

fn load(a: &StateArgs) -> CliResult<StateVector> {
    check_positive("--eps-deg", a.eps_deg)?;
    check_positive("--zero-tol", a.zero_tol)?;
    read_state(&a.state).map_err(|e| CliError::Usage(e.to_string()))
}

enum SplitChoice {
    Given(Bipartition),
    All,
}

fn split_choice(a: &StateArgs, n: usize) -> CliResult<SplitChoice> {
    match a.split.as_deref() {
        Some("all") => Ok(SplitChoice::All),
        Some(s) => Ok(SplitChoice::Given(Bipartition::parse(s, n)?)),
        None => Ok(SplitChoice::Given(Bipartition::leading(1, n)?)),
    }
}

fn given_split(a: &StateArgs, n: usize) -> CliResult<Bipartition> {
    match split_choice(a, n)? {
        SplitChoice::Given(s) => Ok(s),
        SplitChoice::All => Err(CliError::Usage(
            "--split all is only supported by the witness command".into(),
        )),
    }
}

fn pair_choice(s: &str) -> CliResult<PairChoice> {
    if s == "auto" {
        return Ok(PairChoice::Auto);
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parsed: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
    match parsed.as_deref() {
        Some(&[i, j]) if i >= 1 && j >= 1 && i != j => Ok(PairChoice::Explicit(i - 1, j - 1)),
        _ => Err(CliError::Usage(format!(
            "--pair expects \"auto\" or two distinct 1-based indices \"i,j\", got {s:?}"
        ))),
    }
}

fn options(a: &StateArgs) -> WitnessOptions {
    WitnessOptions {
        eps_deg: a.eps_deg,
        zero_tol: a.zero_tol,
    }
}

fn render(format: Format, human: String, machine: Value) -> String {
    match format {
        Format::Human => human,
        Format::Machine => {
            let mut s = serde_json::to_string_pretty(&machine).expect("JSON serializes");
            s.push('\n');
            s
        }
    }
}

fn obj(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn pair_text(i: usize, j: usize) -> String {
    format!("({},{})", i + 1, j + 1)
}

fn cmd_schmidt(a: &StateArgs) -> CliResult<Outcome> {
    let v = load(a)?;
    let split = given_split(a, v.num_subsystems())?;
    let d = schmidt_decompose(&v, &split)?;
    let pairs = distinct_weight_pairs(&d, a.eps_deg);
    let w = d.weights();

    let mut h = String::new();
    writeln!(h, "split: {split}").unwrap();
    writeln!(h, "rank: {}", d.rank()).unwrap();
    writeln!(
        h,
        "weights: {}",
        w.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(" ")
    )
    .unwrap();
    writeln!(
        h,
        "squared weights: {}",
        w.iter().map(|&x| fmt(x * x)).collect::<Vec<_>>().join(" ")
    )
    .unwrap();
    if pairs.is_empty() {
        writeln!(h, "note: no usable pair ({NOT_APPLICABLE_REASON})").unwrap();
    } else {
        for &(i, j) in &pairs {
            writeln!(
                h,
                "usable pair {}: Hardy probability {}",
                pair_text(i, j),
                fmt(hardy_probability(w[i], w[j]))
            )
            .unwrap();
        }
    }
    let m = obj(vec![
        ("command", json!("schmidt")),
        ("dims", json!(v.dims())),
        ("split", json!(split.to_string())),
        ("rank", json!(d.rank())),
        ("weights", nums(w)),
        (
            "left_vectors",
            Value::Array(d.left_vectors().iter().map(|x| complex_vec(x)).collect()),
        ),
        (
            "right_vectors",
            Value::Array(d.right_vectors().iter().map(|x| complex_vec(x)).collect()),
        ),
        ("has_usable_pair", json!(!pairs.is_empty())),
        (
            "usable_pairs",
            Value::Array(
                pairs
                    .iter()
                    .map(|&(i, j)| {
                        obj(vec![
                            ("pair", json!([i + 1, j + 1])),
                            ("hardy_probability", num(hardy_probability(w[i], w[j]))),
                        ])
                    })
                    .collect(),
            ),
        ),
    ]);
    Ok(Outcome {
        text: render(a.format, h, m),
        code: EXIT_OK,
    })
}

fn matrix_json(m: &crate::tensor::DenseMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

/// `P(X1=+1,Y2=0,...)` label of a flat table entry.
fn entry_label(t: &JointTable, e: usize) -> String {
    let (s, o) = t.decode(e);
    let terms: Vec<String> = t
        .parties()
        .iter()
        .zip(s.iter().zip(&o))
        .map(|(p, (&s, &o))| {
            format!(
                "{}={}",
                p.settings[s],
                crate::hardy::outcome_label(p.outcomes[o])
            )
        })
        .collect();
    format!("P({})", terms.join(","))
}

fn table_json(t: &JointTable) -> Value {
    Value::Array(
        (0..t.len())
            .map(|e| {
                obj(vec![
                    ("event", json!(entry_label(t, e))),
                    ("probability", num(t.probs()[e])),
                ])
            })
            .collect(),
    )
}

fn construction_json(c: &HardyConstruction) -> Value {
    let b = &c.bases;
    obj(vec![
        ("split", json!(c.split.to_string())),
        ("pair", json!([c.pair.0 + 1, c.pair.1 + 1])),
        ("p1", num(c.p1())),
        ("p2", num(c.p2())),
        ("u", matrix_json(&c.unitaries.u)),
        ("v", matrix_json(&c.unitaries.v)),
        (
            "bases",
            obj(vec![
                ("x_plus_1", complex_vec(&b.x_plus_1)),
                ("x_minus_1", complex_vec(&b.x_minus_1)),
                ("y_plus_1", complex_vec(&b.y_plus_1)),
                ("y_minus_1", complex_vec(&b.y_minus_1)),
                ("x_plus_2", complex_vec(&b.x_plus_2)),
                ("x_minus_2", complex_vec(&b.x_minus_2)),
                ("y_plus_2", complex_vec(&b.y_plus_2)),
                ("y_minus_2", complex_vec(&b.y_minus_2)),
            ]),
        ),
    ])
}

fn witness_json(w: &HardyWitness, zero_tol: f64) -> Value {
    let mut zero = Map::new();
    for (c, &p) in HardyCondition::ZERO.iter().zip(&w.zero_conditions) {
        zero.insert(c.name(), num(p));
    }
    let d = &w.decomposition;
    obj(vec![
        ("pair", json!([w.pair.0 + 1, w.pair.1 + 1])),
        ("p1", num(w.p1())),
        ("p2", num(w.p2())),
        ("zero_conditions", Value::Object(zero)),
        ("zero_conditions_hold", json!(w.zero_conditions_hold(zero_tol))),
        ("hardy_condition", json!(HardyCondition::YPlusYPlus.name())),
        ("hardy_measured", num(w.hardy_measured)),
        ("hardy_closed_form", num(w.hardy_closed_form)),
        ("probabilities_agree", json!(w.probabilities_agree())),
        ("decomposition_residuals", nums(&d.residuals)),
        (
            "x_coefficients",
            Value::Array(
                d.x_coefficients
                    .iter()
                    .map(|r| Value::Array(r.iter().map(|&z| complex(z)).collect()))
                    .collect(),
            ),
        ),
        ("construction", construction_json(&w.construction)),
        ("table", table_json(&w.table)),
    ])
}

fn report_human(r: &WitnessReport, zero_tol: f64) -> String {
    let mut h = String::new();
    writeln!(h, "split: {}", r.split).unwrap();
    writeln!(
        h,
        "weights: {}",
        r.weights.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(" ")
    )
    .unwrap();
    match &r.verdict {
        Verdict::NotApplicable { reason } => {
            writeln!(h, "verdict: not applicable ({reason})").unwrap();
        }
        Verdict::Applicable(w) => {
            writeln!(h, "verdict: applicable").unwrap();
            writeln!(
                h,
                "pair: {}  p1 = {}  p2 = {}",
                pair_text(w.pair.0, w.pair.1),
                fmt(w.p1()),
                fmt(w.p2())
            )
            .unwrap();
            for (c, &p) in HardyCondition::ZERO.iter().zip(&w.zero_conditions) {
                writeln!(h, "{} = {}", c.name(), fmt(p)).unwrap();
            }
            writeln!(
                h,
                "{} = {}  (closed form {})",
                HardyCondition::YPlusYPlus.name(),
                fmt(w.hardy_measured),
                fmt(w.hardy_closed_form)
            )
            .unwrap();
            writeln!(
                h,
                "zero conditions below {}: {}",
                fmt(zero_tol),
                if w.zero_conditions_hold(zero_tol) { "yes" } else { "no" }
            )
            .unwrap();
            writeln!(
                h,
                "decomposition residuals: {}",
                w.decomposition.residuals.map(fmt).join(" ")
            )
            .unwrap();
            let xc = &w.decomposition.x_coefficients;
            writeln!(
                h,
                "x-basis coefficients: ++ {}  +- {}  -+ {}  -- {}",
                fmt_complex(xc[0][0]),
                fmt_complex(xc[0][1]),
                fmt_complex(xc[1][0]),
                fmt_complex(xc[1][1])
            )
            .unwrap();
        }
    }
    h
}

fn report_json(r: &WitnessReport, zero_tol: f64) -> Value {
    let mut pairs = vec![
        ("command", json!("witness")),
        ("mode", json!("bipartite")),
        ("split", json!(r.split.to_string())),
        ("weights", nums(&r.weights)),
        ("applicable", json!(r.is_applicable())),
    ];
    match &r.verdict {
        Verdict::NotApplicable { reason } => pairs.push(("reason", json!(reason))),
        Verdict::Applicable(w) => pairs.push(("witness", witness_json(w, zero_tol))),
    }
    obj(pairs)
}

fn bipartite_report(a: &StateArgs, v: &StateVector) -> CliResult<WitnessReport> {
    let opts = options(a);
    match split_choice(a, v.num_subsystems())? {
        SplitChoice::All => {
            if pair_choice(&a.pair)? != PairChoice::Auto {
                return Err(CliError::Usage("--split all requires --pair auto".into()));
            }
            Ok(search_bipartitions(v, &opts)?)
        }
        SplitChoice::Given(split) => Ok(make_witness_report(v, &split, pair_choice(&a.pair)?, &opts)?),
    }
}

fn multipartite_options(a: &WitnessArgs) -> CliResult<MultipartiteOptions> {
    if a.common.split.is_some() || a.common.pair != "auto" {
        return Err(CliError::Usage(
            "multipartite mode chooses its own split and pair; omit --split and --pair".into(),
        ));
    }
    Ok(MultipartiteOptions {
        witness: options(&a.common),
        exhaustive: a.exhaustive,
    })
}

fn multipartite_human(out: &MultipartiteVerdict) -> String {
    let mut h = String::from("mode: multipartite\n");
    let w = match out {
        MultipartiteVerdict::NotApplicable { reason } => {
            writeln!(h, "verdict: not applicable ({reason})").unwrap();
            return h;
        }
        MultipartiteVerdict::Applicable(w) => w,
    };
    writeln!(h, "verdict: applicable").unwrap();
    for (k, s) in w.steps.iter().enumerate() {
        writeln!(
            h,
            "peel {}: subsystem {}, weights {}, marked branch {} (T{}={})",
            k + 1,
            s.subsystem + 1,
            s.weights.iter().map(|&q| fmt(q)).collect::<Vec<_>>().join(" "),
            s.marked + 1,
            s.subsystem + 1,
            crate::hardy::outcome_label(s.marked_label())
        )
        .unwrap();
    }
    writeln!(
        h,
        "final pair: subsystems {}|{}  p1 = {}  p2 = {}",
        w.final_subsystems[0] + 1,
        w.final_subsystems[1] + 1,
        fmt(w.bipartite.p1()),
        fmt(w.bipartite.p2())
    )
    .unwrap();
    for c in &w.conditions.zero {
        writeln!(h, "{} = {}", c.name, fmt(c.observed)).unwrap();
    }
    writeln!(h, "{} = {}", w.conditions.nonzero.name, fmt(w.hardy_measured())).unwrap();
    writeln!(h, "marked weight product: {}", fmt(w.marked_weight_product())).unwrap();
    writeln!(h, "bipartite Hardy probability: {}", fmt(w.bipartite.hardy_closed_form)).unwrap();
    writeln!(h, "combined probability: {}", fmt(w.combined_probability)).unwrap();
    h
}

fn multipartite_json(out: &MultipartiteVerdict, zero_tol: f64) -> Value {
    let mut pairs = vec![
        ("command", json!("witness")),
        ("mode", json!("multipartite")),
        ("applicable", json!(out.witness().is_some())),
    ];
    match out {
        MultipartiteVerdict::NotApplicable { reason } => pairs.push(("reason", json!(reason))),
        MultipartiteVerdict::Applicable(w) => {
            let steps: Vec<Value> = w
                .steps
                .iter()
                .map(|s| {
                    obj(vec![
                        ("subsystem", json!(s.subsystem + 1)),
                        ("weights", nums(&s.weights)),
                        ("marked_branch", json!(s.marked + 1)),
                        ("marked_label", json!(s.marked_label())),
                        (
                            "vectors",
                            Value::Array(s.vectors.iter().map(|x| complex_vec(x)).collect()),
                        ),
                    ])
                })
                .collect();
            let mut zero = Map::new();
            for c in &w.conditions.zero {
                zero.insert(c.name.clone(), num(c.observed));
            }
            pairs.extend([
                ("steps", Value::Array(steps)),
                (
                    "final_subsystems",
                    json!([w.final_subsystems[0] + 1, w.final_subsystems[1] + 1]),
                ),
                ("zero_conditions", Value::Object(zero)),
                ("hardy_condition", json!(w.conditions.nonzero.name)),
                ("hardy_measured", num(w.hardy_measured())),
                ("marked_weight_product", num(w.marked_weight_product())),
                ("bipartite_hardy_probability", num(w.bipartite.hardy_closed_form)),
                ("combined_probability", num(w.combined_probability)),
                ("bipartite", witness_json(&w.bipartite, zero_tol)),
            ]);
        }
    }
    obj(pairs)
}

fn cmd_witness(a: &WitnessArgs) -> CliResult<Outcome> {
    let v = load(&a.common)?;
    let text = match a.mode {
        Mode::Bipartite => {
            let r = bipartite_report(&a.common, &v)?;
            render(
                a.common.format,
                report_human(&r, a.common.zero_tol),
                report_json(&r, a.common.zero_tol),
            )
        }
        Mode::Multipartite => {
            let out = multipartite_witness(&v, &multipartite_options(a)?)?;
            render(
                a.common.format,
                multipartite_human(&out),
                multipartite_json(&out, a.common.zero_tol),
            )
        }
    };
    Ok(Outcome { text, code: EXIT_OK })
}

/// Table to certify plus a description of where it came from.
struct CertifyInput {
    table: JointTable,
    source: Vec<(&'static str, Value)>,
    extra: Vec<(usize, usize, usize)>,
}

fn bipartite_table(a: &StateArgs, v: &StateVector) -> CliResult<(JointTable, HardyConstruction)> {
    let split = given_split(a, v.num_subsystems())?;
    let d = schmidt_decompose(v, &split)?;
    let c = certification_construction(&d, pair_choice(&a.pair)?, a.eps_deg)?;
    Ok((joint_table(v, &c.parties())?, c))
}

fn certify_input(a: &WitnessArgs, v: &StateVector) -> CliResult<Option<CertifyInput>> {
    match a.mode {
        Mode::Bipartite => {
            let (table, c) = bipartite_table(&a.common, v)?;
            Ok(Some(CertifyInput {
                table,
                source: vec![
                    ("split", json!(c.split.to_string())),
                    ("pair", json!([c.pair.0 + 1, c.pair.1 + 1])),
                    ("p1", num(c.p1())),
                    ("p2", num(c.p2())),
                ],
                extra: Vec::new(),
            }))
        }
        Mode::Multipartite => {
            let out = multipartite_witness(v, &multipartite_options(a)?)?;
            Ok(out.witness().map(|w| CertifyInput {
                table: w.table.clone(),
                source: vec![
                    (
                        "final_subsystems",
                        json!([w.final_subsystems[0] + 1, w.final_subsystems[1] + 1]),
                    ),
                    (
                        "peeled",
                        json!(w.steps.iter().map(|s| s.subsystem + 1).collect::<Vec<_>>()),
                    ),
                ],
                extra: w
                    .steps
                    .iter()
                    .enumerate()
                    .map(|(j, s)| (2 + j, 0, s.marked))
                    .collect(),
            }))
        }
    }
}

fn inequality_text(t: &JointTable, dual: &[f64], offset: f64) -> String {
    let mut s = String::new();
    for (e, &y) in dual.iter().enumerate() {
        if y.abs() <= 1e-12 {
            continue;
        }
        let sign = if y < 0.0 { "-" } else { "+" };
        write!(s, " {sign} {} {}", fmt(y.abs()), entry_label(t, e)).unwrap();
    }
    let sign = if offset < 0.0 { "-" } else { "+" };
    write!(s, " {sign} {} <= 0", fmt(offset.abs())).unwrap();
    s.trim_start_matches(" + ").trim_start().to_string()
}

fn cmd_certify(a: &CertifyArgs) -> CliResult<Outcome> {
    let w = &a.witness;
    let v = load(&w.common)?;
    let format = w.common.format;
    let Some(input) = certify_input(w, &v)? else {
        let h = format!("mode: multipartite\nverdict: not applicable ({})\nnothing to certify\n",
            crate::multipartite::NO_USABLE_BRANCH_REASON);
        let m = obj(vec![
            ("command", json!("certify")),
            ("mode", json!("multipartite")),
            ("applicable", json!(false)),
            ("reason", json!(crate::multipartite::NO_USABLE_BRANCH_REASON)),
        ]);
        return Ok(Outcome {
            text: render(format, h, m),
            code: EXIT_OK,
        });
    };
    let zero_tol = w.common.zero_tol;
    let table = if a.idealized {
        input.table.idealized(zero_tol)
    } else {
        input.table.clone()
    };
    let cert: Certification = match w.mode {
        Mode::Bipartite => certify(&table)?,
        Mode::Multipartite => certify_multipartite(&table)?,
    };
    let conditions = hardy_condition_set(&input.table.idealized(zero_tol), &input.extra)
        .ok_or_else(|| CliError::Numeric("Hardy labels missing from table".into()))?;
    let trace = verify_no_deterministic_model(&conditions, &cert.strategies, zero_tol);

    let mut h = String::new();
    let mode = match w.mode {
        Mode::Bipartite => "bipartite",
        Mode::Multipartite => "multipartite",
    };
    writeln!(h, "mode: {mode}").unwrap();
    for (k, val) in &input.source {
        writeln!(h, "{k}: {}", human_value(val)).unwrap();
    }
    writeln!(h, "table: {}", if a.idealized { "idealized" } else { "measured" }).unwrap();
    writeln!(h, "deterministic strategies: {}", cert.strategies.len()).unwrap();
    let mut m = vec![
        ("command", json!("certify")),
        ("mode", json!(mode)),
    ];
    m.extend(input.source.iter().cloned());
    m.push(("idealized", json!(a.idealized)));
    m.push(("strategies", json!(cert.strategies.len())));
    m.push(("pivots", json!(cert.pivots)));
    m.push(("phase_one_objective", num(cert.phase_one_objective)));

    let code = match &cert.certificate {
        LhvCertificate::Feasible {
            weights,
            max_residual,
        } => {
            writeln!(h, "verdict: feasible (a local hidden-variable mixture reproduces the table)").unwrap();
            writeln!(h, "max residual: {}", fmt(*max_residual)).unwrap();
            writeln!(h, "mixture:").unwrap();
            for &(k, wt) in weights {
                writeln!(h, "  {}  {}", fmt(wt), cert.strategies[k].describe(table.parties())).unwrap();
            }
            m.push(("verdict", json!("feasible")));
            m.push(("max_residual", num(*max_residual)));
            m.push((
                "mixture",
                Value::Array(
                    weights
                        .iter()
                        .map(|&(k, wt)| {
                            obj(vec![
                                ("strategy", json!(cert.strategies[k].describe(table.parties()))),
                                ("weight", num(wt)),
                            ])
                        })
                        .collect(),
                ),
            ));
            EXIT_OK
        }
        LhvCertificate::Infeasible(f) => {
            writeln!(h, "verdict: infeasible (no local hidden-variable model)").unwrap();
            writeln!(h, "violation margin: {}", fmt(f.margin)).unwrap();
            writeln!(h, "largest local value: {}", fmt(f.max_local_value)).unwrap();
            writeln!(h, "certificate verified: {}", if f.verify(&table, &cert.strategies) { "yes" } else { "no" }).unwrap();
            writeln!(h, "inequality obeyed by every local model:").unwrap();
            writeln!(h, "  {}", inequality_text(&table, &f.dual, f.offset)).unwrap();
            m.push(("verdict", json!("infeasible")));
            m.push(("margin", num(f.margin)));
            m.push(("max_local_value", num(f.max_local_value)));
            m.push(("certificate_verified", json!(f.verify(&table, &cert.strategies))));
            m.push(("offset", num(f.offset)));
            m.push((
                "dual",
                Value::Array(
                    f.dual
                        .iter()
                        .enumerate()
                        .map(|(e, &y)| {
                            obj(vec![
                                ("event", json!(entry_label(&table, e))),
                                ("coefficient", num(y)),
                            ])
                        })
                        .collect(),
                ),
            ));
            m.push(("inequality", json!(inequality_text(&table, &f.dual, f.offset))));
            EXIT_INFEASIBLE
        }
    };
    writeln!(
        h,
        "condition check: {} of {} strategies satisfy the zero conditions, {} of those give {}",
        trace.compatible,
        cert.strategies.len(),
        trace.compatible_firing,
        conditions.nonzero.name
    )
    .unwrap();
    writeln!(
        h,
        "contradiction with locality: {}",
        if trace.contradiction { "yes" } else { "no" }
    )
    .unwrap();
    m.push((
        "condition_check",
        obj(vec![
            ("zero_conditions_hold", json!(trace.zero_conditions_hold)),
            ("nonzero_holds", json!(trace.nonzero_holds)),
            ("compatible_strategies", json!(trace.compatible)),
            ("compatible_firing", json!(trace.compatible_firing)),
            ("contradiction", json!(trace.contradiction)),
        ]),
    ));
    Ok(Outcome {
        text: render(format, h, obj(m)),
        code,
    })
}

fn human_value(v: &Value) -> String {
    match v {
        Value::Array(xs) => format!(
            "({})",
            xs.iter().map(human_value).collect::<Vec<_>>().join(",")
        ),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), fmt),
        other => other.to_string(),
    }
}

const SETTING_PAIRS: [&str; 4] = ["X1X2", "X1Y2", "Y1X2", "Y1Y2"];

fn parse_schedule(s: &str) -> CliResult<SettingSchedule> {
    if s == "round-robin" {
        return Ok(SettingSchedule::RoundRobin);
    }
    let combos = s
        .split(',')
        .map(|p| {
            SETTING_PAIRS
                .iter()
                .position(|&q| q.eq_ignore_ascii_case(p.trim()))
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "unknown setting pair {p:?}; expected one of {}",
                        SETTING_PAIRS.join(", ")
                    ))
                })
        })
        .collect::<CliResult<Vec<usize>>>()?;
    Ok(match combos.as_slice() {
        [c] => SettingSchedule::Fixed(*c),
        _ => SettingSchedule::Cycle(combos),
    })
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<Outcome> {
    let c = &a.common;
    if a.shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    check_positive("--sigma", a.sigma)?;
    let schedule = parse_schedule(&a.schedule)?;
    let v = load(c)?;
    let (table, construction) = bipartite_table(c, &v)?;
    let records = sample_table(&table, a.shots, a.seed, &schedule)?;
    let report = analyze(&records, &table, a.sigma)?;
    if let Some(path) = &a.export {
        std::fs::write(path, records_to_csv(&records, &table))
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }

    let mut h = String::new();
    writeln!(h, "split: {}", construction.split).unwrap();
    writeln!(
        h,
        "pair: {}  p1 = {}  p2 = {}",
        pair_text(construction.pair.0, construction.pair.1),
        fmt(construction.p1()),
        fmt(construction.p2())
    )
    .unwrap();
    writeln!(h, "shots: {}  seed: {}  schedule: {}", a.shots, a.seed, a.schedule).unwrap();
    writeln!(
        h,
        "shots per setting pair: {}",
        SETTING_PAIRS
            .iter()
            .zip(&report.shots_per_combo)
            .map(|(p, n)| format!("{p}={n}"))
            .collect::<Vec<_>>()
            .join(" ")
    )
    .unwrap();
    for chk in &report.conditions {
        writeln!(
            h,
            "{}: count {} of {}, frequency {}, exact {}, std error {}, {}",
            chk.condition.name(),
            chk.count,
            chk.shots,
            fmt(chk.frequency),
            fmt(chk.exact),
            fmt(chk.std_error),
            chk.verdict.as_str()
        )
        .unwrap();
    }
    if let Some(path) = &a.export {
        writeln!(h, "records written to {}", path.display()).unwrap();
    }

    let cells: Vec<Value> = report
        .cells
        .iter()
        .map(|cell| {
            obj(vec![
                ("settings", json!(SETTING_PAIRS[cell.combo])),
                ("outcomes", json!(cell.outcomes)),
                ("count", json!(cell.count)),
                ("frequency", num(cell.frequency)),
                ("exact", num(cell.exact)),
                ("std_error", num(cell.std_error)),
            ])
        })
        .collect();
    let conditions: Vec<Value> = report
        .conditions
        .iter()
        .map(|chk| {
            obj(vec![
                ("condition", json!(chk.condition.name())),
                ("shots", json!(chk.shots)),
                ("count", json!(chk.count)),
                ("frequency", num(chk.frequency)),
                ("exact", num(chk.exact)),
                ("std_error", num(chk.std_error)),
                ("verdict", json!(chk.verdict.as_str())),
            ])
        })
        .collect();
    let m = obj(vec![
        ("command", json!("simulate")),
        ("split", json!(construction.split.to_string())),
        ("pair", json!([construction.pair.0 + 1, construction.pair.1 + 1])),
        ("p1", num(construction.p1())),
        ("p2", num(construction.p2())),
        ("shots", json!(a.shots)),
        ("seed", json!(a.seed)),
        ("schedule", json!(a.schedule)),
        ("sigma", num(a.sigma)),
        ("shots_per_setting_pair", json!(report.shots_per_combo)),
        ("conditions", Value::Array(conditions)),
        ("cells", Value::Array(cells)),
        (
            "export",
            a.export
                .as_ref()
                .map_or(Value::Null, |p| json!(p.display().to_string())),
        ),
    ]);
    Ok(Outcome {
        text: render(c.format, h, m),
        code: EXIT_OK,
    })
}

fn cmd_scan(a: &ScanArgs) -> CliResult<Outcome> {
    if a.grid < 2 {
        return Err(CliError::Usage(format!("--grid must be at least 2, got {}", a.grid)));
    }
    let r = scan(a.grid)?;
    let mut h = String::new();
    writeln!(h, "grid: {} points in (0,1)", r.grid).unwrap();
    if r.rows.is_empty() {
        writeln!(h, "table omitted above {} points", crate::scan::MAX_TABLE_ROWS).unwrap();
    } else {
        writeln!(h, "p1^2  hardy_probability").unwrap();
        for &(x, p) in &r.rows {
            writeln!(h, "{}  {}", fmt(x), fmt(p)).unwrap();
        }
    }
    writeln!(h, "grid maximum: {} at p1^2 = {}", fmt(r.grid_max), fmt(r.grid_argmax)).unwrap();
    writeln!(h, "refined maximum: {} at p1^2 = {}", fmt(r.max), fmt(r.argmax)).unwrap();
    let m = obj(vec![
        ("command", json!("scan")),
        ("grid", json!(r.grid)),
        (
            "rows",
            Value::Array(
                r.rows
                    .iter()
                    .map(|&(x, p)| obj(vec![("p1_squared", num(x)), ("hardy_probability", num(p))]))
                    .collect(),
            ),
        ),
        ("grid_argmax", num(r.grid_argmax)),
        ("grid_max", num(r.grid_max)),
        ("argmax", num(r.argmax)),
        ("max", num(r.max)),
    ]);
    Ok(Outcome {
        text: render(a.format, h, m),
        code: EXIT_OK,
    })
}

//! `invmetric` command line: metrics, distances, suites, the path oracle and reports.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use invmetric::geometry::parse_complex;
use invmetric::maps::{sample_member, FamilyMember, MemberMap};
use invmetric::planar::{self, Normalization, PlanarDomain};
use invmetric::product::{finsler_product, ProductNormalization};
use invmetric::tolerances;
use invmetric::verifier::{
    normalization_audit, run_suite_detailed, slack_rows, AuditReport, InequalitySuite, PathProblem, SampleOutcome,
    SuiteId, VerificationReport,
};
use invmetric::{ComplexVector, Error, Space};

#[derive(Parser, Debug)]
#[command(name = "invmetric", version, about = "Invariant metrics on model domains and Schwarz-type inequality suites")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Norm {
    Hyp,
    Kob,
}

impl From<Norm> for Normalization {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Hyp => Normalization::Hyp,
            Norm::Kob => Normalization::Kob,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hyperbolic density of a planar domain at a point.
    Density {
        #[arg(long)]
        domain: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value = "hyp")]
        norm: Norm,
    },
    /// Closed-form distance between two points.
    Dist {
        #[arg(long)]
        space: String,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, value_enum, default_value = "hyp")]
        norm: Norm,
    },
    /// Kobayashi-Finsler norm of a tangent vector.
    Finsler {
        #[arg(long)]
        space: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        /// `hyp` doubles the value; on products this is the literal-Hyp variant.
        #[arg(long, value_enum, default_value = "kob")]
        norm: Norm,
    },
    /// Run inequality suites.
    Verify {
        /// Suite id, or `all` for the whole registry.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, env = "INVMETRIC_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = tolerances::INEQUALITY)]
        tolerance: f64,
        /// Also write the JSON document here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write one CSV row per check here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Minimize the discretized path length between two points.
    Oracle {
        #[arg(long)]
        space: String,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = invmetric::verifier::oracle::DEFAULT_SEGMENTS)]
        segments: usize,
        #[arg(long, default_value_t = invmetric::verifier::oracle::DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Compare the two product Finsler normalizations against the oracle.
    AuditNormalization,
    /// Report utilities.
    Report {
        #[command(subcommand)]
        action: ReportAction,
    },
    /// Re-run one sample of a suite and print the member map and inputs.
    Replay {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        index: u64,
        #[arg(long, env = "INVMETRIC_SEED", default_value_t = 42)]
        seed: u64,
    },
    /// Evaluate a serialized map (JSON text or file) and its Jacobian at a point.
    Eval {
        #[arg(long)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// List registered suites.
    Suites,
}

#[derive(Subcommand, Debug)]
enum ReportAction {
    /// Parse a report written by `verify --out` and print it again.
    Inspect { file: PathBuf },
}

/// Effective configuration echoed at the top of every document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Config {
    command: String,
    format: Format,
    #[serde(flatten)]
    args: serde_json::Map<String, serde_json::Value>,
}

/// What `verify` prints and writes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct VerifyDocument {
    config: Config,
    passed: bool,
    reports: Vec<VerificationReport>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Violations,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg.lines().next().unwrap_or_default());
            ExitCode::from(2)
        }
    }
}

fn config(command: &str, format: Format, args: serde_json::Value) -> Config {
    let args = match args {
        serde_json::Value::Object(m) => m,
        _ => serde_json::Map::new(),
    };
    Config {
        command: command.to_string(),
        format,
        args,
    }
}

fn emit(text: &str) -> Outcome {
    let mut out = io::stdout().lock();
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        // a closed pipe (`| head`) is not an error
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn vector(s: &str) -> Result<ComplexVector, Failure> {
    Ok(s.parse()?)
}

fn space(s: &str) -> Result<Space, Failure> {
    Ok(s.parse()?)
}

fn scalar_output(format: Format, cfg: Config, name: &str, value: f64) -> Outcome {
    match format {
        Format::Plain => emit(&format!("{value}")),
        Format::Csv => emit(&format!("{name}\n{value}")),
        Format::Json => emit(&pretty(&serde_json::json!({ "config": cfg, name: value }))?),
    }
}

fn run(cli: Cli) -> Outcome {
    let fmt = |default| cli.format.unwrap_or(default);
    match cli.command {
        Command::Density { domain, point, norm } => {
            let format = fmt(Format::Plain);
            let dom: PlanarDomain = domain.parse()?;
            let z = parse_complex(&point)?;
            let value = planar::density(&dom, z)?.get(norm.into());
            let cfg = config("density", format, serde_json::json!({ "domain": domain, "point": point, "norm": norm }));
            scalar_output(format, cfg, "density", value)
        }
        Command::Dist { space: s, from, to, norm } => {
            let format = fmt(Format::Plain);
            let sp = space(&s)?;
            let (z, w) = (vector(&from)?, vector(&to)?);
            sp.check(&z)?;
            sp.check(&w)?;
            let kob = sp
                .closed_form_distance(&z, &w)
                .ok_or_else(|| Failure::Usage(format!("no closed-form distance on {sp}; use `oracle`")))??;
            let value = Normalization::from(norm).from_kob() * kob;
            let cfg = config("dist", format, serde_json::json!({ "space": s, "from": from, "to": to, "norm": norm }));
            scalar_output(format, cfg, "distance", value)
        }
        Command::Finsler { space: s, point, vector: v, norm } => {
            let format = fmt(Format::Plain);
            let sp = space(&s)?;
            let (p, u) = (vector(&point)?, vector(&v)?);
            let value = match (&sp, norm) {
                (Space::Product(omega), Norm::Hyp) => {
                    finsler_product(omega, &p, &u, ProductNormalization::LiteralHyp)?.value
                }
                (_, norm) => Normalization::from(norm).from_kob() * sp.finsler(&p, &u)?,
            };
            let cfg = config("finsler", format, serde_json::json!({ "space": s, "point": point, "vector": v, "norm": norm }));
            scalar_output(format, cfg, "finsler", value)
        }
        Command::Verify {
            suite,
            samples,
            seed,
            tolerance,
            out,
            csv,
        } => verify(fmt(Format::Json), &suite, samples, seed, tolerance, out, csv),
        Command::Oracle {
            space: s,
            from,
            to,
            segments,
            max_iters,
        } => {
            let format = fmt(Format::Plain);
            let sp = space(&s)?;
            let (z, w) = (vector(&from)?, vector(&to)?);
            let problem = PathProblem::new(sp.clone(), z.clone(), w.clone())?
                .with_segments(segments)?
                .with_max_iters(max_iters);
            let result = problem.solve()?;
            let closed = sp.closed_form_distance(&z, &w).transpose()?;
            match format {
                Format::Plain => emit(&format!("{}", result.length)),
                Format::Csv => emit(&format!(
                    "length,converged,sweeps,segments,closed_form\n{},{},{},{},{}",
                    result.length,
                    result.converged,
                    result.sweeps,
                    result.segments,
                    closed.map(|c| c.to_string()).unwrap_or_default()
                )),
                Format::Json => {
                    let cfg = config(
                        "oracle",
                        format,
                        serde_json::json!({ "space": s, "from": from, "to": to, "segments": segments, "max_iters": max_iters }),
                    );
                    emit(&pretty(&serde_json::json!({
                        "config": cfg,
                        "length": result.length,
                        "converged": result.converged,
                        "sweeps": result.sweeps,
                        "segments": result.segments,
                        "closed_form": closed,
                    }))?)
                }
            }
        }
        Command::AuditNormalization => audit(fmt(Format::Json)),
        Command::Report {
            action: ReportAction::Inspect { file },
        } => {
            let text = fs::read_to_string(&file)?;
            let doc: VerifyDocument = serde_json::from_str(&text)?;
            match fmt(Format::Json) {
                Format::Json => emit(&pretty(&doc)?),
                Format::Plain => emit(&plain_summary(&doc.reports)),
                Format::Csv => emit(&csv_summary(&doc.reports)?),
            }
        }
        Command::Replay { suite, index, seed } => {
            let id: SuiteId = suite.parse()?;
            let (kind, member_index) = id.member_slot(index);
            let member = sample_member(&kind, seed, member_index);
            let outcome = id.sample(seed, index)?;
            let format = fmt(Format::Json);
            let cfg = config("replay", format, serde_json::json!({ "suite": suite, "index": index, "seed": seed }));
            match format {
                Format::Json => emit(&pretty(&Replay {
                    config: cfg,
                    member,
                    outcome,
                })?),
                Format::Plain | Format::Csv => emit(&plain_outcome(&outcome)),
            }
        }
        Command::Eval { map, point } => {
            let text = if map.trim_start().starts_with('{') { map.clone() } else { fs::read_to_string(&map)? };
            let member: MemberMap = serde_json::from_str(&text)
                .or_else(|_| serde_json::from_str(&text).map(MemberMap::Holo))?;
            let z = vector(&point)?;
            let value = member.eval(&z)?;
            let jacobian = match &member {
                MemberMap::Holo(f) => {
                    let j = f.deriv(&z)?;
                    (0..j.nrows())
                        .map(|r| ComplexVector((0..j.ncols()).map(|c| j[(r, c)]).collect()).to_string())
                        .collect::<Vec<_>>()
                }
                MemberMap::Harmonic(h) => {
                    let j = h.real_jacobian(&z)?;
                    (0..j.nrows())
                        .map(|r| ComplexVector::real(&j.row(r).iter().copied().collect::<Vec<_>>()).to_string())
                        .collect()
                }
            };
            let format = fmt(Format::Plain);
            match format {
                Format::Plain | Format::Csv => emit(&format!("value {value}\njacobian {}", jacobian.join(" | "))),
                Format::Json => emit(&pretty(&serde_json::json!({
                    "config": config("eval", format, serde_json::json!({ "point": point })),
                    "value": value.to_string(),
                    "jacobian_rows": jacobian,
                }))?),
            }
        }
        Command::Suites => {
            let lines: Vec<String> = SuiteId::ALL
                .iter()
                .map(|id| format!("{:20} {}", id.as_str(), id.statement()))
                .collect();
            emit(&lines.join("\n"))
        }
    }
}

#[derive(Serialize)]
struct Replay {
    config: Config,
    member: FamilyMember,
    outcome: SampleOutcome,
}

fn suites_from(arg: &str) -> Result<Vec<SuiteId>, Failure> {
    if arg == "all" {
        Ok(SuiteId::ALL.to_vec())
    } else {
        Ok(vec![arg.parse()?])
    }
}

fn verify(
    format: Format,
    suite: &str,
    samples: usize,
    seed: u64,
    tolerance: f64,
    out: Option<PathBuf>,
    csv_path: Option<PathBuf>,
) -> Outcome {
    if !(tolerance >= 0.0) {
        return Err(Failure::Usage(format!("tolerance must be nonnegative, got {tolerance}")));
    }
    let ids = suites_from(suite)?;
    let mut reports = Vec::with_capacity(ids.len());
    let mut rows = Vec::new();
    for id in &ids {
        let cfg = InequalitySuite::new(*id, samples, seed).with_tolerance(tolerance);
        let (report, outcomes) = run_suite_detailed(&cfg)?;
        if csv_path.is_some() {
            rows.extend(slack_rows(&outcomes).into_iter().map(|r| (id.as_str(), r)));
        }
        reports.push(report);
    }
    let passed = reports.iter().all(VerificationReport::passed);
    let cfg = config(
        "verify",
        format,
        serde_json::json!({
            "suite": suite,
            "samples": samples,
            "seed": seed,
            "tolerance": tolerance,
            "out": out,
            "csv": csv_path,
        }),
    );
    let doc = VerifyDocument {
        config: cfg,
        passed,
        reports,
    };
    if let Some(path) = &out {
        fs::write(path, pretty(&doc)?)?;
    }
    if let Some(path) = &csv_path {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["suite", "index", "check", "inputs", "lhs", "rhs", "slack"])?;
        for (suite, r) in rows {
            w.write_record([
                suite.to_string(),
                r.index.to_string(),
                r.check,
                r.inputs,
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.slack.to_string(),
            ])?;
        }
        w.flush()?;
    }
    match format {
        Format::Json => emit(&pretty(&doc)?)?,
        Format::Plain => emit(&plain_summary(&doc.reports))?,
        Format::Csv => emit(&csv_summary(&doc.reports)?)?,
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Violations)
    }
}

fn plain_summary(reports: &[VerificationReport]) -> String {
    let mut lines = Vec::new();
    for r in reports {
        lines.push(format!(
            "{:20} {} samples={} checks={} violations={} min_slack={:e} max_slack={:e} witnesses={}",
            r.suite,
            if r.passed() { "PASS" } else { "FAIL" },
            r.samples,
            r.checks,
            r.violations.len(),
            r.min_slack,
            r.max_slack,
            r.equality_witnesses.len()
        ));
        for v in r.violations.iter().take(5) {
            lines.push(format!(
                "  index={} check={} family={} lhs={} rhs={} slack={:e}",
                v.index, v.check, v.family, v.lhs, v.rhs, v.slack
            ));
        }
    }
    lines.join("\n")
}

fn csv_summary(reports: &[VerificationReport]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "suite",
        "seed",
        "samples",
        "tolerance",
        "checks",
        "violations",
        "min_slack",
        "max_slack",
        "mean_slack",
        "equality_witnesses",
    ])?;
    for r in reports {
        w.write_record([
            r.suite.clone(),
            r.seed.to_string(),
            r.samples.to_string(),
            r.tolerance.to_string(),
            r.checks.to_string(),
            r.violations.len().to_string(),
            r.min_slack.to_string(),
            r.max_slack.to_string(),
            r.mean_slack.to_string(),
            r.equality_witnesses.len().to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Usage(e.to_string()))
}

fn plain_outcome(o: &SampleOutcome) -> String {
    let mut lines = vec![format!("index={} family={} member={} role={:?}", o.index, o.family, o.member, o.role)];
    lines.extend(o.inputs.iter().map(|i| format!("input {i}")));
    lines.extend(
        o.checks
            .iter()
            .map(|c| format!("{} lhs={} rhs={} slack={:e}", c.label, c.lhs, c.rhs, c.slack())),
    );
    lines.join("\n")
}

fn audit(format: Format) -> Outcome {
    let report: AuditReport = normalization_audit()?;
    match format {
        Format::Json => emit(&pretty(&serde_json::json!({
            "config": config("audit-normalization", format, serde_json::json!({})),
            "audit": report,
        }))?),
        Format::Plain | Format::Csv => {
            let mut lines = vec!["space,point,vector,k_value,literal_value,oracle_rate,closed_form_rate,k_error".to_string()];
            for c in &report.cases {
                lines.push(format!(
                    "{},\"{}\",\"{}\",{},{},{},{},{:e}",
                    c.space, c.point, c.vector, c.k_value, c.literal_value, c.oracle_rate, c.closed_form_rate, c.k_error
                ));
            }
            if format == Format::Plain {
                lines.push(report.verdict.clone());
            }
            emit(&lines.join("\n"))
        }
    }
}

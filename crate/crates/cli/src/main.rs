//! Command-line driver: configuration parsing, command dispatch and
//! machine/human output for the DT pipeline.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 precondition
//! violation (symmetry, genericity, framing, guards), 3 audit failure under
//! `--strict`.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{parse_config, ConfigError, ConfigFormat, JobConfig};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use output::{betti_json, csv, dim_label, polynomial_csv, slope_label, table, Format, Rendered};
use quiver_dt::dt::{
    check_integrality, check_positivity, check_unimodular, dt_series, euler_specialization,
    framed_series, ic_betti, local_dt, moduli_dimension, nullcone_bound, ss_stack_motive,
    sym_reconstructs, HnCache, Stability,
};
use quiver_dt::motive::{gl_motive, rep_space_motive};
use quiver_dt::oracle::{count_gl, count_reps, count_semistable, FFConfig};
use quiver_dt::series::TruncatedSeries;
use quiver_dt::{DimVector, Error as EngineError, Quiver};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "quiver-dt", version, about = "Exact motivic DT invariants of quivers")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// DT invariants with integrality/positivity/unimodularity audits
    Dt(CommonArgs),
    /// Framed (PT-DT) generating series
    Framed(FramedArgs),
    /// Local DT series of the Ext-quiver given by a Gram matrix
    Local(CommonArgs),
    /// Intersection Betti numbers extracted from the DT invariants
    Betti(CommonArgs),
    /// Nullcone dimension bounds for a symmetric quiver
    Nullcone(CommonArgs),
    /// Finite-field point counts compared against motive evaluations
    Oracle(CommonArgs),
    /// Run every audit and print one pass/fail line per check
    Check(CheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Job configuration file (TOML, or JSON with --config-format json)
    config: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Write the output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Configuration format (defaults to the file extension, else TOML)
    #[arg(long, value_enum)]
    config_format: Option<ConfigFormatArg>,
    /// Exit with code 3 when integrality or positivity fails
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct FramedArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Use the IC-normalized weight [P^(f.d-1)]_vir (requires even framing)
    #[arg(long)]
    normalized: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also audit membership in the localized ring Z[L^(1/2), (L^N-1)^(-1)]
    #[arg(long)]
    ring_audit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ConfigFormatArg {
    Toml,
    Json,
}

enum CliError {
    Config(String),
    Engine(EngineError),
    AuditFailure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Engine(_) => 2,
            CliError::AuditFailure(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            CliError::Engine(e) => e.to_string(),
            CliError::AuditFailure(m) => m.clone(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Engine(e)
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("DT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn load_config(args: &CommonArgs) -> Result<JobConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let format = match args.config_format {
        Some(ConfigFormatArg::Json) => ConfigFormat::Json,
        Some(ConfigFormatArg::Toml) => ConfigFormat::Toml,
        None => {
            if args.config.extension().is_some_and(|e| e == "json") {
                ConfigFormat::Json
            } else {
                ConfigFormat::Toml
            }
        }
    };
    Ok(parse_config(&text, format)?)
}

fn write_output(args: &CommonArgs, rendered: &Rendered) -> Result<(), CliError> {
    let text = rendered.emit(args.format);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Dt(args) => {
            let cfg = load_config(&args)?;
            let (rendered, failure) = dt_command(&cfg)?;
            write_output(&args, &rendered)?;
            finish_strict(args.strict, failure)
        }
        Cmd::Framed(args) => {
            let cfg = load_config(&args.common)?;
            let rendered = framed_command(&cfg, args.normalized)?;
            write_output(&args.common, &rendered)
        }
        Cmd::Local(args) => {
            let cfg = load_config(&args)?;
            let rendered = local_command(&cfg)?;
            write_output(&args, &rendered)
        }
        Cmd::Betti(args) => {
            let cfg = load_config(&args)?;
            let rendered = betti_command(&cfg)?;
            write_output(&args, &rendered)
        }
        Cmd::Nullcone(args) => {
            let cfg = load_config(&args)?;
            let rendered = nullcone_command(&cfg)?;
            write_output(&args, &rendered)
        }
        Cmd::Oracle(args) => {
            let cfg = load_config(&args)?;
            let rendered = oracle_command(&cfg)?;
            write_output(&args, &rendered)
        }
        Cmd::Check(args) => {
            let cfg = load_config(&args.common)?;
            let (rendered, failure) = check_command(&cfg, args.ring_audit)?;
            write_output(&args.common, &rendered)?;
            finish_strict(args.common.strict, failure)
        }
    }
}

fn finish_strict(strict: bool, failure: Option<String>) -> Result<(), CliError> {
    match failure {
        Some(message) if strict => Err(CliError::AuditFailure(message)),
        _ => Ok(()),
    }
}

fn quiver_job(cfg: &JobConfig) -> Result<(Quiver, DimVector, Stability), CliError> {
    let quiver = cfg.quiver()?;
    let bound = cfg.quiver_bound(&quiver)?;
    let stability = cfg.stability()?;
    Ok((quiver, bound, stability))
}

fn dt_command(cfg: &JobConfig) -> Result<(Rendered, Option<String>), CliError> {
    let (quiver, bound, stability) = quiver_job(cfg)?;
    let result = dt_series(&quiver, &stability, &bound)?;
    let integrality = check_integrality(&result);
    let positivity = check_positivity(&result).ok();
    let unimodularity = check_unimodular(&result).ok();

    let keys: Vec<DimVector> = {
        let mut keys: Vec<DimVector> = result.omega.keys().cloned().collect();
        keys.sort_by(|a, b| a.graded_lex(b));
        keys
    };

    let mut rows = Vec::new();
    for d in &keys {
        let omega = &result.omega[d];
        let positive = positivity
            .as_ref()
            .map_or("-".to_string(), |p| yes_no(p.per_d[d].pass()));
        let unimodular = unimodularity
            .as_ref()
            .map_or("-".to_string(), |u| yes_no(u.per_d[d].pass()));
        rows.push(vec![
            dim_label(d),
            omega.to_string(),
            yes_no(result.integral[d]),
            positive,
            unimodular,
        ]);
    }
    let table_text = table(
        &["d", "omega", "integral", "positive", "unimodular"],
        &rows,
    );

    let audits = json!({
        "integrality": {
            "all": integrality.all_integral(),
            "violations": integrality.violations.iter().map(|d| json!(d.entries())).collect::<Vec<_>>(),
        },
        "positivity": positivity.as_ref().map(|p| {
            keys.iter().map(|d| {
                let e = &p.per_d[d];
                json!({"d": d.entries(), "nonnegative": e.nonnegative, "uniform_parity": e.uniform_parity})
            }).collect::<Vec<_>>()
        }),
        "unimodularity": unimodularity.as_ref().map(|u| {
            keys.iter().map(|d| {
                let e = &u.per_d[d];
                json!({"d": d.entries(), "palindromic": e.palindromic, "unimodal": e.unimodal})
            }).collect::<Vec<_>>()
        }),
    });
    let json_doc = json!({
        "result": serde_json::to_value(&result).expect("result serializes"),
        "audits": audits,
    });

    let entries: Vec<(DimVector, quiver_dt::motive::RationalMotive)> = keys
        .iter()
        .map(|d| (d.clone(), result.omega[d].clone()))
        .collect();
    let csv_text = polynomial_csv(&entries);

    let mut failure = None;
    if !integrality.all_integral() {
        failure = Some(format!(
            "integrality failed at {}",
            integrality
                .violations
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ));
    } else if positivity.as_ref().is_some_and(|p| !p.all_pass()) {
        failure = Some("positivity failed".to_string());
    }

    Ok((
        Rendered {
            json: json_doc,
            table: table_text,
            csv: csv_text,
        },
        failure,
    ))
}

fn series_rendered(series: &TruncatedSeries, meta: Value) -> Rendered {
    let keys = series.support_graded_lex();
    let rows: Vec<Vec<String>> = keys
        .iter()
        .map(|d| vec![dim_label(d), series.coefficient(d).to_string()])
        .collect();
    let table_text = table(&["d", "coefficient"], &rows);
    let entries: Vec<(DimVector, quiver_dt::motive::RationalMotive)> = keys
        .iter()
        .map(|d| (d.clone(), series.coefficient(d)))
        .collect();
    let mut json_doc = meta;
    json_doc["series"] = serde_json::to_value(series).expect("series serializes");
    Rendered {
        json: json_doc,
        table: table_text,
        csv: polynomial_csv(&entries),
    }
}

fn framed_command(cfg: &JobConfig, normalized: bool) -> Result<Rendered, CliError> {
    let (quiver, bound, stability) = quiver_job(cfg)?;
    let framing = cfg.framing(&quiver)?;
    let series = framed_series(&quiver, &stability, &framing, &bound, normalized)?;
    let meta = json!({
        "framing": framing.entries(),
        "normalized": normalized,
    });
    Ok(series_rendered(&series, meta))
}

fn local_command(cfg: &JobConfig) -> Result<Rendered, CliError> {
    let (spec, bound) = cfg.ext_spec()?;
    let series = local_dt(&spec, &bound)?;
    let meta = json!({
        "gram": spec.gram,
        "multiplicities": spec.multiplicities.entries(),
    });
    Ok(series_rendered(&series, meta))
}

fn betti_command(cfg: &JobConfig) -> Result<Rendered, CliError> {
    let (quiver, bound, stability) = quiver_job(cfg)?;
    let result = dt_series(&quiver, &stability, &bound)?;
    let mut keys: Vec<DimVector> = result.omega.keys().cloned().collect();
    keys.sort_by(|a, b| a.graded_lex(b));

    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    let mut csv_rows = Vec::new();
    for d in &keys {
        let omega = &result.omega[d];
        if omega.is_zero() {
            rows.push(vec![
                dim_label(d),
                "-".into(),
                "no stable points".into(),
                "0".into(),
            ]);
            json_rows.push(json!({"d": d.entries(), "stable": false}));
            continue;
        }
        let dim = moduli_dimension(&quiver, d)?;
        let betti = ic_betti(omega, dim)?;
        let euler = euler_specialization(omega)?;
        let betti_text = betti
            .iter()
            .map(|(k, b)| format!("{k}:{b}"))
            .collect::<Vec<_>>()
            .join(" ");
        rows.push(vec![
            dim_label(d),
            dim.to_string(),
            betti_text,
            euler.to_string(),
        ]);
        for (k, b) in &betti {
            csv_rows.push(vec![dim_label(d), k.to_string(), b.to_string()]);
        }
        json_rows.push(json!({
            "d": d.entries(),
            "stable": true,
            "dim": dim,
            "betti": betti_json(&betti),
            "euler": euler.to_string(),
        }));
    }
    Ok(Rendered {
        json: json!({"betti": json_rows}),
        table: table(&["d", "dim", "betti (degree:count)", "euler"], &rows),
        csv: csv(&["d", "degree", "betti"], &csv_rows),
    })
}

fn nullcone_command(cfg: &JobConfig) -> Result<Rendered, CliError> {
    let quiver = cfg.quiver()?;
    let bound = cfg.quiver_bound(&quiver)?;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for d in DimVector::iter_box(&bound) {
        if d.is_zero() {
            continue;
        }
        let value = nullcone_bound(&quiver, &d)?;
        rows.push(vec![dim_label(&d), slope_label(&value)]);
        json_rows.push(json!({"d": d.entries(), "bound": slope_label(&value)}));
    }
    rows.sort();
    Ok(Rendered {
        json: json!({"nullcone": json_rows}),
        table: table(&["d", "bound"], &rows),
        csv: csv(&["d", "bound"], &rows),
    })
}

fn oracle_command(cfg: &JobConfig) -> Result<Rendered, CliError> {
    let quiver = cfg.quiver()?;
    let bound = cfg.quiver_bound(&quiver)?;
    let theta = cfg.oracle_theta(&quiver)?;
    let section = cfg.oracle_section();

    let mut rows: Vec<(String, String, String, String, String, bool)> = Vec::new();
    for &q in &section.q {
        let mut ff = FFConfig::new(q)?;
        ff.max_total_dim = section.max_total_dim;
        let q_rat = BigRational::from_integer(BigInt::from(q));
        for d in DimVector::iter_box(&bound) {
            if d.is_zero() || d.total() > ff.max_total_dim {
                continue;
            }
            let reps = match count_reps(&quiver, &d, &ff) {
                Ok(n) => n,
                Err(EngineError::GuardExceeded { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let rep_eval = rep_space_motive(&quiver, &d)?.evaluate(&q_rat)?;
            push_row(&mut rows, "reps", &d, q, &reps, &rep_eval);

            let gl = count_gl(&d, &ff);
            let gl_eval = gl_motive(&d).evaluate(&q_rat)?;
            push_row(&mut rows, "gl", &d, q, &gl, &gl_eval);

            let ss = match count_semistable(&quiver, &theta, &d, &ff) {
                Ok(n) => n,
                Err(EngineError::GuardExceeded { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let mut cache = HnCache::new();
            let ss_motive = ss_stack_motive(&quiver, &theta, &d, &mut cache)?.mul(&gl_motive(&d));
            let ss_eval = ss_motive.evaluate(&q_rat)?;
            push_row(&mut rows, "semistable", &d, q, &ss, &ss_eval);
        }
    }

    let table_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(kind, d, q, count, eval, ok)| {
            vec![
                kind.clone(),
                d.clone(),
                q.clone(),
                count.clone(),
                eval.clone(),
                yes_no(*ok),
            ]
        })
        .collect();
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|(kind, d, q, count, eval, ok)| {
            json!({
                "kind": kind,
                "d": d.split(' ').map(|x| x.parse::<u64>().unwrap()).collect::<Vec<_>>(),
                "q": q.parse::<u64>().unwrap(),
                "count": count,
                "motive_eval": eval,
                "match": ok,
            })
        })
        .collect();
    let header = ["kind", "d", "q", "count", "motive_eval", "match"];
    Ok(Rendered {
        json: json!({"oracle": json_rows}),
        table: table(&header, &table_rows),
        csv: csv(&header, &table_rows),
    })
}

fn push_row(
    rows: &mut Vec<(String, String, String, String, String, bool)>,
    kind: &str,
    d: &DimVector,
    q: u64,
    count: &BigInt,
    eval: &BigRational,
) {
    let matches = eval.denom().is_one() && eval.numer() == count;
    rows.push((
        kind.to_string(),
        dim_label(d),
        q.to_string(),
        count.to_string(),
        if eval.denom().is_one() {
            eval.numer().to_string()
        } else {
            eval.to_string()
        },
        matches,
    ));
}

fn check_command(cfg: &JobConfig, ring_audit: bool) -> Result<(Rendered, Option<String>), CliError> {
    let (quiver, bound, stability) = quiver_job(cfg)?;
    let result = dt_series(&quiver, &stability, &bound)?;

    let integrality = check_integrality(&result);
    let positivity = check_positivity(&result).ok();
    let unimodularity = check_unimodular(&result).ok();
    let sym = sym_reconstructs(&result)?;

    let mut checks: Vec<(String, bool, String)> = Vec::new();
    checks.push((
        "integrality".into(),
        integrality.all_integral(),
        if integrality.all_integral() {
            "all Omega_d in Z[v^(+-1)]".into()
        } else {
            format!(
                "violations at {}",
                integrality
                    .violations
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        },
    ));
    checks.push((
        "positivity".into(),
        positivity.as_ref().is_some_and(|p| p.all_pass()),
        match &positivity {
            None => "skipped: non-integral input".into(),
            Some(p) if p.all_pass() => "coefficients nonnegative, parity uniform per d".into(),
            Some(p) => {
                let bad: Vec<String> = p
                    .per_d
                    .iter()
                    .filter(|(_, e)| !e.pass())
                    .map(|(d, _)| d.to_string())
                    .collect();
                format!("violations at {}", bad.join(", "))
            }
        },
    ));
    checks.push((
        "unimodularity".into(),
        unimodularity.as_ref().is_some_and(|u| u.all_pass()),
        match &unimodularity {
            None => "skipped: non-integral input".into(),
            Some(u) if u.all_pass() => "palindromic and unimodal per d".into(),
            Some(u) => {
                let bad: Vec<String> = u
                    .per_d
                    .iter()
                    .filter(|(_, e)| !e.pass())
                    .map(|(d, _)| d.to_string())
                    .collect();
                format!("informational: fails at {}", bad.join(", "))
            }
        },
    ));
    checks.push((
        "sym_reconstruction".into(),
        sym,
        "Exp(Omega/(v - v^(-1))) reproduces the A-series".into(),
    ));
    if ring_audit {
        let max_n = bound.total().max(1);
        let bad: Vec<String> = result
            .omega
            .iter()
            .filter(|(_, omega)| !omega.in_localized_ring(max_n))
            .map(|(d, _)| d.to_string())
            .collect();
        checks.push((
            "localized_ring".into(),
            bad.is_empty(),
            if bad.is_empty() {
                format!("denominators split into (L^N - 1) factors, N <= {max_n}")
            } else {
                format!("violations at {}", bad.join(", "))
            },
        ));
    }

    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|(name, pass, detail)| vec![name.clone(), pass_fail(*pass), detail.clone()])
        .collect();
    let json_rows: Vec<Value> = checks
        .iter()
        .map(|(name, pass, detail)| json!({"check": name, "pass": pass, "detail": detail}))
        .collect();

    // strict gate: integrality and positivity only
    let mut failure = None;
    if !integrality.all_integral() {
        failure = Some("integrality audit failed".to_string());
    } else if positivity.as_ref().is_some_and(|p| !p.all_pass()) {
        failure = Some("positivity audit failed".to_string());
    }

    Ok((
        Rendered {
            json: json!({"checks": json_rows}),
            table: table(&["check", "result", "detail"], &rows),
            csv: csv(&["check", "result"], &checks
                .iter()
                .map(|(name, pass, _)| vec![name.clone(), pass_fail(*pass)])
                .collect::<Vec<_>>()),
        },
        failure,
    ))
}

fn yes_no(b: bool) -> String {
    if b { "yes".into() } else { "no".into() }
}

fn pass_fail(b: bool) -> String {
    if b { "PASS".into() } else { "FAIL".into() }
}

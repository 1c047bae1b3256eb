//! Command-line front end: `vdc verify | pipeline | gns | met | folner | corpus run`.
//!
//! Exit codes: 0 when everything holds, 1 on a violated verdict, 2 on usage or
//! parse errors, 3 when a precondition check fails (its witness goes to stderr).

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cstar::{AlgebraElement, FiniteCStarAlgebra};
use crate::ergodic::{self, mean_ergodic_projection, met_convergence_trace, Contraction};
use crate::error::Error;
use crate::folner::{folner_defect, CayleyTable, Element, FolnerSet, Semigroup};
use crate::gns::{self, GnsSpace};
use crate::harness::{
    reports_to_csv, run_proof_pipeline, run_suite, verify_seeded, CStarPayload, SuiteName, Variant,
    VariantSpec,
};
use crate::literal;
use crate::sequences::{parse_sequence, WindowSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "vdc",
    version,
    about = "Check van der Corput-type inequalities on finite truncations"
)]
struct Cli {
    /// JSON file supplying default values for any flag.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate both sides of one inequality variant.
    Verify(VerifyArgs),
    /// Walk through the argument on a finite C*-model and print each link.
    Pipeline(PipelineArgs),
    /// GNS space of a state: dimension and Gram spectrum.
    Gns(GnsArgs),
    /// Distance of Cesàro power averages to the mean ergodic projection.
    Met(MetArgs),
    /// Følner defect of a finite set under a right translation.
    Folner(FolnerArgs),
    /// Built-in corpora.
    #[command(subcommand)]
    Corpus(CorpusCommand),
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    variant: String,
    /// Sequence description such as `weyl:alpha=0.4142,deg=2`.
    #[arg(long)]
    seq: Option<String>,
    /// JSON payload (or `@file`) for operator, semigroup, cstar_abstract and module_abstract.
    #[arg(long)]
    payload: Option<String>,
    #[arg(long)]
    n_max: u64,
    #[arg(long)]
    j_max: u64,
    #[arg(long, default_value_t = 0.5)]
    window_frac: f64,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long)]
    algebra: String,
    #[arg(long)]
    map: String,
    #[arg(long)]
    state: String,
    /// Comma-separated increasing `N_i`.
    #[arg(long)]
    n_schedule: String,
    /// Element `x`; a seeded random element when omitted.
    #[arg(long)]
    x: Option<String>,
    #[arg(long, default_value_t = 20)]
    j_max: u64,
    #[arg(long, default_value_t = 0.5)]
    window_frac: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct GnsArgs {
    #[arg(long)]
    algebra: String,
    #[arg(long)]
    state: String,
    #[arg(long, default_value_t = gns::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct MetArgs {
    #[arg(long)]
    matrix: String,
    #[arg(long)]
    j_list: String,
    #[arg(long, default_value_t = ergodic::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct FolnerArgs {
    /// `box:d=1,L=100`, `lattice:d=2`, `cyclic:m=5`, or a JSON Cayley table.
    #[arg(long)]
    semigroup: String,
    /// `L=<int>[,d=<int>]`.
    #[arg(long = "box")]
    box_spec: Option<String>,
    /// Comma-separated coordinates (lattice) or an element index (finite).
    #[arg(long)]
    shift: String,
    /// Element indices of `F` for finite semigroups (default: all).
    #[arg(long)]
    subset: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Subcommand)]
enum CorpusCommand {
    Run(CorpusArgs),
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

/// A finished command: what to print and the exit code.
struct Outcome {
    text: String,
    code: i32,
}

fn ok(text: String) -> Outcome {
    Outcome {
        text,
        code: EXIT_OK,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::PayloadInvalid(_)
        | Error::ShapeMismatch { .. }
        | Error::InvalidWindow(_)
        | Error::NotAState(_)
        | Error::NonUnimodular { .. }
        | Error::NotAssociative(..) => EXIT_USAGE,
        _ => EXIT_PRECONDITION,
    }
}

/// Appends `--key value` for every config entry whose flag is absent.
fn merge_config(mut argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = argv
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(argv);
    };
    let path = if let Some(p) = argv[pos].strip_prefix("--config=") {
        let p = p.to_string();
        argv.remove(pos);
        p
    } else {
        if pos + 1 >= argv.len() {
            return Err("--config needs a path".into());
        }
        let p = argv.remove(pos + 1);
        argv.remove(pos);
        p
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| format!("config {path} is not valid JSON: {e}"))?;
    let obj = value
        .as_object()
        .ok_or_else(|| format!("config {path} must be a JSON object"))?;
    for (key, v) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        let present = argv
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => {
                argv.push(flag);
                argv.push(s.clone());
            }
            Value::Number(n) => {
                argv.push(flag);
                argv.push(n.to_string());
            }
            Value::Array(items) if items.iter().all(Value::is_u64) => {
                argv.push(flag);
                argv.push(
                    items
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                );
            }
            other => {
                argv.push(flag);
                argv.push(other.to_string());
            }
        }
    }
    Ok(argv)
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (result, out) = match cli.command {
        Command::Verify(a) => {
            let out = a.output.out.clone();
            (verify_cmd(&a), out)
        }
        Command::Pipeline(a) => {
            let out = a.output.out.clone();
            (pipeline_cmd(&a), out)
        }
        Command::Gns(a) => {
            let out = a.output.out.clone();
            (gns_cmd(&a), out)
        }
        Command::Met(a) => {
            let out = a.output.out.clone();
            (met_cmd(&a), out)
        }
        Command::Folner(a) => {
            let out = a.output.out.clone();
            (folner_cmd(&a), out)
        }
        Command::Corpus(CorpusCommand::Run(a)) => {
            let out = a.output.out.clone();
            (corpus_cmd(&a), out)
        }
    };
    match result {
        Ok(outcome) => {
            match out {
                Some(path) => {
                    if let Err(e) = fs::write(&path, &outcome.text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_USAGE;
                    }
                }
                None => print!("{}", outcome.text),
            }
            outcome.code
        }
        Err(e) => {
            match &e {
                Error::PreconditionFailed { check, witness } => {
                    eprintln!("precondition `{check}` failed");
                    eprintln!("witness: {witness}");
                }
                other => eprintln!("error: {other}"),
            }
            exit_code(&e)
        }
    }
}

fn json_arg(text: &str) -> crate::Result<Value> {
    match text.strip_prefix('@') {
        Some(path) => {
            let body =
                fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
            literal::parse_json(&body)
        }
        // bare words such as `tracial` or `identity` need no JSON quoting
        None if !text.is_empty() && text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => {
            Ok(Value::String(text.to_string()))
        }
        None => literal::parse_json(text),
    }
}

fn int_list(text: &str) -> crate::Result<Vec<u64>> {
    text.split(',')
        .map(|t| {
            t.trim().parse::<u64>().map_err(|_| {
                usage(format!(
                    "expected a comma-separated list of integers, found `{text}`"
                ))
            })
        })
        .collect()
}

fn verify_cmd(a: &VerifyArgs) -> crate::Result<Outcome> {
    let variant: Variant = a.variant.parse()?;
    let w = WindowSpec::new(a.n_max, a.window_frac, a.j_max)?;
    let spec = match (&a.seq, &a.payload) {
        (Some(_), Some(_)) => return Err(usage("give either --seq or --payload, not both")),
        (Some(seq), None) if variant.takes_sequence() => {
            VariantSpec::from_sequence(variant, parse_sequence(seq)?, &w)?
        }
        (None, Some(p)) => {
            let v = json_arg(p)?;
            match variant {
                Variant::Operator => VariantSpec::Operator(literal::operator_payload(&v)?),
                Variant::Semigroup => VariantSpec::Semigroup(literal::semigroup_payload(&v)?),
                Variant::CStarAbstract => VariantSpec::CStarAbstract(literal::cstar_payload(&v)?),
                Variant::ModuleAbstract => {
                    VariantSpec::ModuleAbstract(literal::module_payload(&v)?)
                }
                other => return Err(usage(format!("variant `{other}` takes --seq"))),
            }
        }
        (Some(_), None) => return Err(usage(format!("variant `{variant}` takes --payload"))),
        (None, None) => return Err(usage("missing --seq or --payload")),
    };
    let report = verify_seeded(&spec, &w, a.tol, a.seed)?;
    let text = match a.output.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => reports_to_csv(std::slice::from_ref(&report)),
        Format::Text => report.to_text(),
    };
    Ok(Outcome {
        text,
        code: if report.verdict.is_ok() {
            EXIT_OK
        } else {
            EXIT_VIOLATED
        },
    })
}

fn pipeline_cmd(a: &PipelineArgs) -> crate::Result<Outcome> {
    let alg = literal::algebra(&json_arg(&a.algebra)?)?;
    let map = literal::map(&alg, &json_arg(&a.map)?)?;
    let state = literal::state(&alg, &json_arg(&a.state)?)?;
    let x: AlgebraElement = match &a.x {
        Some(text) => literal::element(&alg, &json_arg(text)?)?,
        None => alg.random_element(&mut ChaCha8Rng::seed_from_u64(a.seed)),
    };
    let payload = CStarPayload {
        map,
        x,
        states: vec![state],
        schedule: int_list(&a.n_schedule)?,
    };
    let w = WindowSpec::new(1, a.window_frac, a.j_max)?;
    let trace = run_proof_pipeline(&payload, &w, a.seed)?;
    let text = match a.output.format {
        Format::Json => trace.to_json() + "\n",
        Format::Text => trace.to_text(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["link", "value", "relation"])
                .expect("in-memory write");
            for link in &trace.chain {
                let rel = serde_json::to_string(&link.relation).expect("serializable");
                w.write_record([link.label.clone(), format!("{:e}", link.value), rel])
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
        }
    };
    Ok(Outcome {
        text,
        code: if trace.monotone {
            EXIT_OK
        } else {
            EXIT_VIOLATED
        },
    })
}

fn gns_cmd(a: &GnsArgs) -> crate::Result<Outcome> {
    let alg: FiniteCStarAlgebra = literal::algebra(&json_arg(&a.algebra)?)?;
    let state = literal::state(&alg, &json_arg(&a.state)?)?;
    let space = GnsSpace::from_state(&alg, &state, a.tol)?;
    Ok(ok(match a.output.format {
        Format::Json => {
            serde_json::to_string_pretty(&literal::gns_value(&space)).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("index,eigenvalue\n");
            for (i, v) in space.spectrum.iter().enumerate() {
                s += &format!("{i},{v:e}\n");
            }
            s
        }
        Format::Text => {
            let spectrum: Vec<String> = space.spectrum.iter().map(|v| format!("{v:.6e}")).collect();
            format!(
                "h = {}\nambient dimension {}\ngram spectrum: {}\ntol used {:e}\n",
                space.h,
                space.ambient_dim,
                spectrum.join(" "),
                space.tol_used
            )
        }
    }))
}

fn met_cmd(a: &MetArgs) -> crate::Result<Outcome> {
    let t = Contraction::new(literal::matrix(&json_arg(&a.matrix)?)?)?;
    let j_list = int_list(&a.j_list)?;
    let projection = mean_ergodic_projection(&t, a.tol)?;
    let trace = met_convergence_trace(&t, &j_list, a.tol)?;
    Ok(ok(match a.output.format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "rank": projection.rank,
                "consistency_defect": projection.consistency_defect,
                "trace": trace,
            }))
            .expect("serializable")
                + "\n"
        }
        Format::Csv => {
            let mut s = String::from("J,delta\n");
            for (j, d) in &trace {
                s += &format!("{j},{d:e}\n");
            }
            s
        }
        Format::Text => {
            let mut s = format!("fixed space rank {}\n", projection.rank);
            for (j, d) in &trace {
                s += &format!("J = {j:>8}  |C_J - P| = {d:.6e}\n");
            }
            s
        }
    }))
}

fn key_values(text: &str) -> crate::Result<Vec<(String, u64)>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| usage(format!("expected key=value, found `{p}`")))?;
            let v = v
                .trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("expected an integer in `{p}`")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn lookup(pairs: &[(String, u64)], key: &str) -> Option<u64> {
    pairs.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
}

fn folner_cmd(a: &FolnerArgs) -> crate::Result<Outcome> {
    let spec = a.semigroup.trim();
    let (sg, set) = if spec.starts_with('[') {
        let rows = literal::parse_json(spec)?;
        let table: Vec<Vec<usize>> = rows
            .as_array()
            .ok_or_else(|| usage("Cayley table must be an array of rows"))?
            .iter()
            .map(|r| literal::naturals(r).map(|v| v.into_iter().map(|x| x as usize).collect()))
            .collect::<crate::Result<_>>()?;
        let table = CayleyTable::new(table)?;
        (Semigroup::Finite(table), None)
    } else {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let params = key_values(rest)?;
        match kind {
            "box" | "lattice" => {
                let d = lookup(&params, "d").unwrap_or(1) as usize;
                let side = lookup(&params, "L");
                (
                    Semigroup::lattice(d)?,
                    side.map(|l| FolnerSet::cube(d, l)).transpose()?,
                )
            }
            "cyclic" => {
                let m = lookup(&params, "m").ok_or_else(|| usage("cyclic needs m=<int>"))? as usize;
                if m == 0 {
                    return Err(usage("cyclic needs m >= 1"));
                }
                (Semigroup::Finite(CayleyTable::cyclic(m)), None)
            }
            other => return Err(usage(format!("unknown semigroup `{other}`"))),
        }
    };
    let set = match (&sg, &a.box_spec, &a.subset) {
        (Semigroup::Lattice { dim }, Some(b), _) => {
            let params = key_values(b)?;
            let d = lookup(&params, "d").unwrap_or(*dim as u64) as usize;
            if d != *dim {
                return Err(usage(format!(
                    "box dimension {d} does not match the lattice dimension {dim}"
                )));
            }
            let l = lookup(&params, "L").ok_or_else(|| usage("--box needs L=<int>"))?;
            FolnerSet::cube(d, l)?
        }
        (Semigroup::Lattice { .. }, None, _) => {
            set.ok_or_else(|| usage("lattice semigroups need a box size"))?
        }
        (Semigroup::Finite(_), _, Some(subset)) => {
            let f = FolnerSet::explicit(int_list(subset)?.into_iter().map(|x| vec![x]).collect())?;
            f.check(&sg)?;
            f
        }
        (Semigroup::Finite(t), _, None) => FolnerSet::whole(t),
    };
    let shift: Element = int_list(&a.shift)?;
    sg.check(&shift)?;
    let defect = folner_defect(&sg, &set, &shift)?;
    Ok(ok(match a.output.format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "defect": defect,
                "set_size": set.len(),
                "shift": shift,
            }))
            .expect("serializable")
                + "\n"
        }
        Format::Csv => format!("set_size,defect\n{},{defect}\n", set.len()),
        Format::Text => format!("|F| = {}\nfolner defect {defect}\n", set.len()),
    }))
}

fn corpus_cmd(a: &CorpusArgs) -> crate::Result<Outcome> {
    let name: SuiteName = a.suite.parse()?;
    let result = run_suite(name, a.tol, a.seed);
    let text = match a.output.format {
        Format::Json => result.to_json() + "\n",
        Format::Text => result.to_text(),
        Format::Csv => {
            let reports: Vec<_> = result
                .cells
                .iter()
                .filter_map(|c| c.report.clone())
                .collect();
            reports_to_csv(&reports)
        }
    };
    Ok(Outcome {
        text,
        code: if result.all_passed() {
            EXIT_OK
        } else {
            EXIT_VIOLATED
        },
    })
}

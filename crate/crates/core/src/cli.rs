//! The `qim` command line. Every subcommand prints one JSON report on stdout.
//!
//! Exit codes: 0 success (or compatible), 1 incompatible or a failed check,
//! 2 unknown, 64 malformed JSON, 65 invalid input values, 66 unreadable file.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::causal::{formula_probability, CausalFormula, Grpsem};
use crate::compat::{decide_general, verify_witness, CompatVerdict, GeneralOptions, Witness};
use crate::corpus::{builtin_corpus, load_corpus, run_corpus};
use crate::dist::JointDistribution;
use crate::error::{Error, Result};
use crate::hypergraph::DirectedHypergraph;
use crate::info::information_profile;
use crate::scoring::{idef, siminc, NoiseSizes, SimincResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "qim", version, about = "Compatibility of distributions with directed hypergraphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalFlags {
    /// Numerical tolerance for exact checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 5000)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Hypergraph JSON file.
    #[arg(short = 'A', long = "hypergraph")]
    pub hypergraph: PathBuf,
    /// Distribution JSON file.
    #[arg(short = 'd', long = "dist")]
    pub dist: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information profile of a distribution.
    Profile {
        #[arg(short = 'd', long = "dist")]
        dist: PathBuf,
    },
    /// Information deficiency of a distribution against a hypergraph.
    Idef(Inputs),
    /// Search for the best extension; prints the witness candidate.
    Siminc {
        #[command(flatten)]
        inputs: Inputs,
        /// Noise values per arc; `response` uses one value per source-to-target function.
        #[arg(long, default_value = "response")]
        noise: String,
    },
    /// Decide compatibility. Exit 0 compatible, 1 incompatible, 2 unknown.
    Compat(Inputs),
    /// Check a witness against a distribution and hypergraph.
    VerifyWitness {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(short = 'w', long = "witness")]
        witness: PathBuf,
    },
    /// Queries on a structural equation model.
    Sem {
        #[command(subcommand)]
        command: SemCommand,
    },
    /// Run the golden corpus; the built-in one unless a directory is given.
    Corpus {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SemCommand {
    /// Solutions of the equations in every context of positive probability.
    Solve {
        #[arg(short = 'm', long = "model")]
        model: PathBuf,
    },
    /// The distribution over endogenous and noise variables the model induces.
    Arise {
        #[arg(short = 'm', long = "model")]
        model: PathBuf,
    },
    /// The model with the given variables held fixed.
    Intervene {
        #[arg(short = 'm', long = "model")]
        model: PathBuf,
        /// `VAR=VALUE`, repeatable.
        #[arg(long = "set", required = true, value_parser = parse_assignment)]
        set: Vec<(String, String)>,
    },
    /// The noise settings that force the given values.
    DoEvent {
        #[arg(short = 'm', long = "model")]
        model: PathBuf,
        #[arg(long = "set", required = true, value_parser = parse_assignment)]
        set: Vec<(String, String)>,
    },
    /// Probability of a causal formula given as JSON.
    Formula {
        #[arg(short = 'm', long = "model")]
        model: PathBuf,
        #[arg(short = 'f', long = "formula")]
        formula: PathBuf,
    },
}

fn parse_assignment(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok((k.to_string(), v.to_string())),
        _ => Err(format!("expected VAR=VALUE, got `{s}`")),
    }
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Json(j) if j.is_data() => 65,
        Error::Json(_) => 64,
        Error::Io(_) => 66,
        _ => 65,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_dist(path: &Path) -> Result<JointDistribution> {
    JointDistribution::from_json(&read(path)?)
}

fn load_graph(path: &Path) -> Result<DirectedHypergraph> {
    DirectedHypergraph::from_json(&read(path)?)
}

fn load_model(path: &Path) -> Result<Grpsem> {
    Grpsem::from_json(&read(path)?)
}

fn options(g: &GlobalFlags) -> GeneralOptions {
    let mut o = GeneralOptions { tol: g.tol, ..Default::default() };
    o.siminc.seed = g.seed;
    o.siminc.restarts = g.restarts;
    o.siminc.max_iters = g.max_iters;
    o
}

pub fn siminc_json(r: &SimincResult) -> Value {
    json!({
        "value": r.value,
        "converged": r.converged,
        "iterations": r.iterations,
        "restarts_used": r.restarts_used,
        "restart_values": r.restart_values,
        "parametrization": r.parametrization,
        "breakdown": r.breakdown,
        "arc_map": r.arc_map,
        "witness_candidate": r.witness_candidate,
    })
}

pub fn verdict_json(v: &CompatVerdict) -> Value {
    match v {
        CompatVerdict::Compatible { witness, method } => json!({
            "verdict": "compatible",
            "method": method,
            "witness": { "joint": witness.joint(), "arc_map": witness.arc_map() },
        }),
        CompatVerdict::Incompatible { certificate } => json!({ "verdict": "incompatible", "certificate": certificate }),
        CompatVerdict::Unknown { best, reason } => json!({
            "verdict": "unknown",
            "reason": reason,
            "best": best.as_deref().map(siminc_json),
        }),
    }
}

fn labels_of(vars: &[crate::dist::Variable], setting: &[usize]) -> Map<String, Value> {
    vars.iter().zip(setting).map(|(v, &i)| (v.name().to_string(), Value::from(v.values()[i].clone()))).collect()
}

/// Runs one command; returns the report and exit code.
pub fn execute(cli: &Cli) -> Result<(Value, i32)> {
    let g = &cli.global;
    let mut seeded = false;
    let (body, code) = match &cli.command {
        Command::Profile { dist } => (information_profile(&load_dist(dist)?)?.to_json(), 0),
        Command::Idef(i) => {
            let bits = idef(&load_graph(&i.hypergraph)?, &load_dist(&i.dist)?)?;
            (json!({ "idef_bits": bits }), 0)
        }
        Command::Siminc { inputs, noise } => {
            seeded = true;
            let mut o = options(g).siminc;
            o.noise = match noise.as_str() {
                "response" => NoiseSizes::Response,
                n => NoiseSizes::Uniform(
                    n.parse().map_err(|_| Error::InvalidOption(format!("noise must be `response` or a count, got `{n}`")))?,
                ),
            };
            let r = siminc(&load_graph(&inputs.hypergraph)?, &load_dist(&inputs.dist)?, &o)?;
            (siminc_json(&r), 0)
        }
        Command::Compat(i) => {
            seeded = true;
            let v = decide_general(&load_graph(&i.hypergraph)?, &load_dist(&i.dist)?, &options(g))?;
            let code = match v.decided() {
                Some(true) => 0,
                Some(false) => 1,
                None => 2,
            };
            (verdict_json(&v), code)
        }
        Command::VerifyWitness { inputs, witness } => {
            let w = Witness::from_json(&read(witness)?)?;
            let r = verify_witness(&load_dist(&inputs.dist)?, &load_graph(&inputs.hypergraph)?, &w, g.tol)?;
            let passed = r.passed();
            let mut body = serde_json::to_value(&r)?;
            body["passed"] = Value::from(passed);
            (body, i32::from(!passed))
        }
        Command::Sem { command } => (sem(command)?, 0),
        Command::Corpus { dir } => {
            seeded = true;
            let entries = match dir {
                Some(d) => load_corpus(d)?,
                None => builtin_corpus(),
            };
            let report = run_corpus(&entries, &options(g));
            let code = i32::from(!report.passed);
            (serde_json::to_value(report)?, code)
        }
    };
    let mut out = Map::new();
    out.insert("version".into(), Value::from(VERSION));
    if seeded {
        out.insert("seed".into(), Value::from(g.seed));
    }
    match body {
        Value::Object(m) => out.extend(m),
        other => {
            out.insert("result".into(), other);
        }
    }
    Ok((Value::Object(out), code))
}

fn sem(command: &SemCommand) -> Result<Value> {
    Ok(match command {
        SemCommand::Solve { model } => {
            let m = load_model(model)?;
            let noise = m.noise_distribution();
            let mut contexts = Vec::new();
            for (i, &p) in noise.probs().iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                let u = noise.decode(i);
                let solutions: Vec<Value> =
                    m.solutions(&u).iter().map(|x| Value::Object(labels_of(m.variables(), x))).collect();
                contexts.push(json!({ "context": labels_of(noise.variables(), &u), "probability": p, "solutions": solutions }));
            }
            json!({ "contexts": contexts })
        }
        SemCommand::Arise { model } => json!({ "distribution": load_model(model)?.arising_distribution()? }),
        SemCommand::Intervene { model, set } => {
            let m = load_model(model)?.intervene(set)?;
            json!({ "model": serde_json::from_str::<Value>(&m.to_json())? })
        }
        SemCommand::DoEvent { model, set } => {
            let m = load_model(model)?;
            let event = m.do_event(set)?;
            let noise = m.noise_distribution();
            let members: Vec<Value> =
                event.members().iter().map(|&i| Value::Object(labels_of(noise.variables(), &noise.decode(i)))).collect();
            json!({ "probability": event.probability(&noise)?, "contexts": members })
        }
        SemCommand::Formula { model, formula } => {
            let m = load_model(model)?;
            let phi: CausalFormula = serde_json::from_str(&read(formula)?)?;
            serde_json::to_value(formula_probability(&m, &phi)?)?
        }
    })
}

/// Parses `args`, runs the command, writes the report to `out` and diagnostics
/// to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 64;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(&cli) {
        Ok((report, code)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

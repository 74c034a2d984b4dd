//! Command-line front end. One subcommand per workflow; every report is a
//! single JSON document on stdout (or `--out`), summaries and the run
//! manifest go to stderr so output files stay byte-deterministic.
//!
//! Exit codes: 0 success, 1 verified negative (validation violations, no
//! good partition, pipeline halt, extension refusal), 2 bad input.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::binning::{self, Mode};
use crate::code::{
    check_feasibility, estimate_error, exact_error_with_budget, FailureTable, NetworkCode,
};
use crate::error::{Error, Result};
use crate::instance::{
    build_index_coding_instance, build_supernode_extension, validate_instance, IndexCodingSpec,
    NetworkInstance, SupernodeExtension,
};
use crate::outer::extend_blocklength_with_budget;
use crate::rat::Rational;
use crate::transform::{
    edge_removal_transform, index_coding_transform, reduction_pipeline,
    zero_error_transform_colocated, zero_error_transform_supernode, AlwaysFailStrategy,
    EdgeRemovalStrategy, IdentityStrategy, PipelineOptions, PipelineOutcome, SearchParams,
};
use crate::DEFAULT_BUDGET;

pub const BUDGET_ENV: &str = "ZERRNET_BUDGET";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "zerrnet",
    version,
    about = "Finite-blocklength network-coding toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Check an instance file's structural invariants
    Validate(ValidateArgs),
    /// Measure a code's decoding-error probability
    EvalError(EvalErrorArgs),
    /// Apply a verified code surgery
    Transform {
        #[command(subcommand)]
        which: TransformCommand,
    },
    /// Run the supernode reduction chain end to end
    Reduce(ReduceArgs),
    /// Repeat a code over rounds under greedily built outer codes
    Extend(ExtendArgs),
    /// Estimate the probability that a random partition set is good
    EstimateGood(EstimateGoodArgs),
    /// Partition-set operations over an explicit failure table
    Binning {
        #[command(subcommand)]
        which: BinningCommand,
    },
    /// Construct instances from templates
    Build {
        #[command(subcommand)]
        which: BuildCommand,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalErrorArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub code: PathBuf,
    /// Exhaustive measurement (the default when --trials is absent)
    #[arg(long)]
    pub exact: bool,
    #[arg(long, conflicts_with = "exact")]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also check feasibility against this error bound
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the failure table (exact mode only)
    #[arg(long)]
    pub table_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum TransformCommand {
    /// Zero-error transform for co-located sources
    ZeroError(BinningTransformArgs),
    /// Zero-error transform through a supernode extension
    Supernode(BinningTransformArgs),
    /// Zero-error transform for index-coding instances
    IndexCoding(IndexCodingTransformArgs),
    /// Fix an edge's best value and remove the edge
    RemoveEdge(RemoveEdgeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BinningTransformArgs {
    /// For `supernode`: the extended instance with its layout block
    #[arg(long)]
    pub instance: PathBuf,
    /// For `supernode`: the code of the base instance
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long = "deltaRn")]
    pub delta_rn: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub attempts: u32,
    #[arg(long, default_value_t = Mode::Diagonal)]
    pub mode: Mode,
    /// Where to write the output code
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IndexCodingTransformArgs {
    /// IndexCodingSpec JSON (k, side_edges, requirement)
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long = "deltaRn")]
    pub delta_rn: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub attempts: u32,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RemoveEdgeArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub edge: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the edge-less instance
    #[arg(long)]
    pub instance_out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReduceArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long = "deltaRn")]
    pub delta_rn: u32,
    /// Bottleneck capacity; defaults to max(deltaRn, 1)/n
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub attempts: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "identity")]
    pub strategy: String,
    /// Where to write the final code on pipeline completion
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtendArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the per-source outer codes as a JSON array
    #[arg(long)]
    pub outer_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateGoodArgs {
    #[arg(long = "failure-table")]
    pub failure_table: PathBuf,
    #[arg(long = "deltaRn")]
    pub delta_rn: u32,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Mode::Diagonal)]
    pub mode: Mode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum BinningCommand {
    /// Sample partition sets until one is good for the given failure table
    Search(BinningSearchArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BinningSearchArgs {
    #[arg(long = "failure-table")]
    pub failure_table: PathBuf,
    #[arg(long = "deltaRn")]
    pub delta_rn: u32,
    #[arg(long, default_value_t = 64)]
    pub attempts: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Mode::Diagonal)]
    pub mode: Mode,
    /// Where to write the found partition set
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum BuildCommand {
    /// Instantiate the index-coding template from a spec file
    IndexCoding(BuildIndexCodingArgs),
    /// Attach fresh sources, a super-node, and a relay to an instance
    Supernode(BuildSupernodeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BuildIndexCodingArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildSupernodeArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Source rate R; the fresh feed edges get this capacity
    #[arg(long)]
    pub rate: String,
    /// Bottleneck and relay-link capacity
    #[arg(long)]
    pub delta: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Ctx {
    budget: u64,
    inputs: BTreeMap<String, serde_json::Value>,
    outputs: Vec<String>,
}

impl Ctx {
    fn new() -> Self {
        let budget = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Ctx {
            budget,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    fn read(&mut self, flag: &str, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path)?;
        let digest = hex_digest(text.as_bytes());
        self.inputs.insert(
            flag.to_string(),
            json!({ "path": path.display().to_string(), "sha256": digest }),
        );
        Ok(text)
    }

    fn instance(&mut self, path: &Path) -> Result<NetworkInstance> {
        NetworkInstance::from_json(&self.read("instance", path)?)
    }

    fn code(&mut self, path: &Path) -> Result<NetworkCode> {
        NetworkCode::from_json(&self.read("code", path)?)
    }

    fn write(&mut self, path: &Path, content: &str) -> Result<()> {
        std::fs::write(path, content)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    /// Report JSON: to `--out` when given, else stdout.
    fn emit(&mut self, out: &Option<PathBuf>, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        match out {
            Some(path) => self.write(path, &text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn parse_rational(text: &str, what: &str) -> Result<Rational> {
    text.parse()
        .map_err(|_| Error::Parameter(format!("{what}: invalid rational {text:?}")))
}

/// Parse and run; returns the process exit code and writes the manifest to
/// stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with exit 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let mut ctx = Ctx::new();
    let params = serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null);
    let subcommand = subcommand_name(&cli.command);

    let exit = match dispatch(&cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("zerrnet: error: {e}");
            2
        }
    };

    let manifest = json!({
        "subcommand": subcommand,
        "inputs": ctx.inputs,
        "outputs": ctx.outputs,
        "parameters": params,
        "budget": ctx.budget,
        "version": env!("CARGO_PKG_VERSION"),
        "duration_ms": started.elapsed().as_millis() as u64,
        "exit_code": exit,
    });
    eprintln!("{manifest}");
    exit
}

fn subcommand_name(cmd: &Command) -> String {
    match cmd {
        Command::Validate(_) => "validate".into(),
        Command::EvalError(_) => "eval-error".into(),
        Command::Transform { which } => match which {
            TransformCommand::ZeroError(_) => "transform zero-error".into(),
            TransformCommand::Supernode(_) => "transform supernode".into(),
            TransformCommand::IndexCoding(_) => "transform index-coding".into(),
            TransformCommand::RemoveEdge(_) => "transform remove-edge".into(),
        },
        Command::Reduce(_) => "reduce".into(),
        Command::Extend(_) => "extend".into(),
        Command::EstimateGood(_) => "estimate-good".into(),
        Command::Binning { .. } => "binning search".into(),
        Command::Build { which } => match which {
            BuildCommand::IndexCoding(_) => "build index-coding".into(),
            BuildCommand::Supernode(_) => "build supernode".into(),
        },
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<i32> {
    match cmd {
        Command::Validate(a) => cmd_validate(a, ctx),
        Command::EvalError(a) => cmd_eval_error(a, ctx),
        Command::Transform { which } => match which {
            TransformCommand::ZeroError(a) => cmd_transform_zero_error(a, ctx),
            TransformCommand::Supernode(a) => cmd_transform_supernode(a, ctx),
            TransformCommand::IndexCoding(a) => cmd_transform_index_coding(a, ctx),
            TransformCommand::RemoveEdge(a) => cmd_remove_edge(a, ctx),
        },
        Command::Reduce(a) => cmd_reduce(a, ctx),
        Command::Extend(a) => cmd_extend(a, ctx),
        Command::EstimateGood(a) => cmd_estimate_good(a, ctx),
        Command::Binning { which } => match which {
            BinningCommand::Search(a) => cmd_binning_search(a, ctx),
        },
        Command::Build { which } => match which {
            BuildCommand::IndexCoding(a) => cmd_build_index_coding(a, ctx),
            BuildCommand::Supernode(a) => cmd_build_supernode(a, ctx),
        },
    }
}

fn cmd_validate(a: &ValidateArgs, ctx: &mut Ctx) -> Result<i32> {
    let inst = ctx.instance(&a.instance)?;
    let violations = validate_instance(&inst);
    let ok = violations.is_empty();
    let report = json!({
        "valid": ok,
        "violations": violations,
        "nodes": inst.nodes.len(),
        "edges": inst.edges.len(),
        "sources": inst.sources.len(),
        "terminals": inst.terminals.len(),
    });
    ctx.emit(&a.out, &report)?;
    if ok {
        eprintln!("validate: ok");
        Ok(0)
    } else {
        eprintln!("validate: {} violation(s)", violations.len());
        Ok(1)
    }
}

fn cmd_eval_error(a: &EvalErrorArgs, ctx: &mut Ctx) -> Result<i32> {
    let inst = ctx.instance(&a.instance)?;
    let code = ctx.code(&a.code)?;
    match a.trials {
        None => {
            let (report, table) = exact_error_with_budget(&inst, &code, ctx.budget, false)?;
            if let Some(path) = &a.table_out {
                ctx.write(path, &table.to_json())?;
            }
            let feasibility = match &a.epsilon {
                Some(eps) => {
                    let eps = parse_rational(eps, "--epsilon")?;
                    Some(check_feasibility(&inst, &code, &eps, &code.rate, code.n)?)
                }
                None => None,
            };
            eprintln!("eval-error: epsilon={}", report.epsilon);
            let doc = json!({ "report": report, "feasibility": feasibility });
            ctx.emit(&a.out, &doc)?;
            Ok(0)
        }
        Some(trials) => {
            let est = estimate_error(&inst, &code, trials, a.seed)?;
            eprintln!(
                "eval-error: estimate={} ({}/{} trials)",
                est.estimate, est.failures, est.trials
            );
            ctx.emit(&a.out, &est)?;
            Ok(0)
        }
    }
}

fn search_params(seed: u64, attempts: u32, mode: Mode, budget: u64) -> SearchParams {
    SearchParams {
        attempts,
        seed,
        mode,
        budget,
    }
}

/// Exit-1 outcomes share this shape so refusal reasons stay greppable.
fn refusal(reason: &str, detail: serde_json::Value) -> serde_json::Value {
    json!({ "reason": reason, "detail": detail })
}

fn cmd_transform_zero_error(a: &BinningTransformArgs, ctx: &mut Ctx) -> Result<i32> {
    let inst = ctx.instance(&a.instance)?;
    let code = ctx.code(&a.code)?;
    let params = search_params(a.seed, a.attempts, a.mode, ctx.budget);
    match zero_error_transform_colocated(&inst, &code, a.delta_rn, &params) {
        Ok((zec, report)) => {
            ctx.write(&a.out, &zec.code.to_json())?;
            eprintln!(
                "transform zero-error: epsilon {} -> {}, rate {} -> {}",
                report.input.epsilon, report.output.epsilon, report.input.rate, report.output.rate
            );
            let ok = report.verification.zero_error;
            ctx.emit(&a.report, &report)?;
            Ok(if ok { 0 } else { 1 })
        }
        Err(Error::NoGoodPartition { attempts }) => {
            let doc = refusal("no-good-partition", json!({ "attempts": attempts }));
            eprintln!("transform zero-error: no good partition in {attempts} attempts");
            ctx.emit(&a.report, &doc)?;
            Ok(1)
        }
        Err(e) => Err(e),
    }
}

fn cmd_transform_supernode(a: &BinningTransformArgs, ctx: &mut Ctx) -> Result<i32> {
    let inst = ctx.instance(&a.instance)?;
    let ext = SupernodeExtension::from_instance(&inst)?;
    let code = ctx.code(&a.code)?;
    let params = search_params(a.seed, a.attempts, a.mode, ctx.budget);
    match zero_error_transform_supernode(&ext, &code, a.delta_rn, &params) {
        Ok((zec, report)) => {
            ctx.write(&a.out, &zec.code.to_json())?;
            eprintln!(
                "transform supernode: epsilon {} -> {}, rate {} -> {}",
                report.input.epsilon, report.output.epsilon, report.input.rate, report.output.rate
            );
            let ok = report.verification.zero_error;
            ctx.emit(&a.report, &report)?;
            Ok(if ok { 0 } else { 1 })
        }
        Err(Error::NoGoodPartition { attempts }) => {
            let doc = refusal("no-good-partition", json!({ "attempts": attempts }));
            eprintln!("transform supernode: no good partition in {attempts} attempts");
            ctx.emit(&a.report, &doc)?;
            Ok(1)
        }
        Err(e) => Err(e),
    }
}

fn cmd_transform_index_coding(a: &IndexCodingTransformArgs, ctx: &mut Ctx) -> Result<i32> {
    let spec: IndexCodingSpec = serde_json::from_str(&ctx.read("spec", &a.spec)?)?;
    let code = ctx.code(&a.code)?;
    let params = search_params(a.seed, a.attempts, Mode::Diagonal, ctx.budget);
    match index_coding_transform(&spec, &code, a.delta_rn, &params) {
        Ok((zec, report, _inst)) => {
            ctx.write(&a.out, &zec.code.to_json())?;
            eprintln!(
                "transform index-coding: epsilon {} -> {}, blocklength {} -> {}",
                report.input.epsilon, report.output.epsilon, report.input.n, report.output.n
            );
            let ok = report.verification.zero_error;
            ctx.emit(&a.report, &report)?;
            Ok(if ok { 0 } else { 1 })
        }
        Err(Error::NoGoodPartition { attempts }) => {
            let doc = refusal("no-good-partition", json!({ "attempts": attempts }));
            eprintln!("transform index-coding: no good partition in {attempts} attempts");
            ctx.emit(&a.report, &doc)?;
            Ok(1)
        }
        Err(e) => Err(e),
    }
}

fn cmd_remove_edge(a: &RemoveEdgeArgs, ctx: &mut Ctx) -> Result<i32> {
    let inst = ctx.instance(&a.instance)?;
    let code = ctx.code(&a.code)?;
    let outcome = edge_removal_transform(&inst, &code, &a.edge, ctx.budget)?;
    ctx.write(&a.out, &outcome.code.to_json())?;
    if let Some(path) = &a.instance_out {
        ctx.write(path, &outcome.instance.to_json())?;
    }
    eprintln!(
        "transform remove-edge: epsilon {} -> {} (bound {})",
        outcome.report.epsilon_in, outcome.report.epsilon_out, outcome.report.bound
    );
    let ok = outcome.report.bound_holds;
    ctx.emit(&a.report, &outcome.report)?;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_reduce(a: &ReduceArgs, ctx: &mut Ctx) -> Result<i32> {
    let inst = ctx.instance(&a.instance)?;
    let code = ctx.code(&a.code)?;
    let strategy: Box<dyn EdgeRemovalStrategy> = match a.strategy.as_str() {
        "identity" => Box::new(IdentityStrategy),
        "always-fail" => Box::new(AlwaysFailStrategy),
        other => {
            return Err(Error::Parameter(format!(
                "unknown strategy {other:?} (expected identity or always-fail)"
            )))
        }
    };
    let delta = match &a.delta {
        Some(text) => Some(parse_rational(text, "--delta")?),
        None => None,
    };
    let options = PipelineOptions {
        cell_bits: a.delta_rn,
        delta,
        attempts: a.attempts,
        seed: a.seed,
        budget: ctx.budget,
        epsilon_prime: None,
        c2: None,
    };
    let run = reduction_pipeline(&inst, &code, &options, strategy.as_ref())?;
    let completed = run.outcome == PipelineOutcome::Completed;
    if completed {
        if let Some(path) = &a.out {
            let last = run.stages.last().expect("completed run has stages");
            ctx.write(path, &last.code.to_json())?;
        }
        eprintln!("reduce: completed ({} stages verified)", run.stages.len());
    } else if let PipelineOutcome::Halted { step, reason } = &run.outcome {
        eprintln!("reduce: halted at step {step}: {reason}");
    }
    ctx.emit(&a.report, &run.report)?;
    Ok(if completed { 0 } else { 1 })
}

fn cmd_extend(a: &ExtendArgs, ctx: &mut Ctx) -> Result<i32> {
    let inst = ctx.instance(&a.instance)?;
    let code = ctx.code(&a.code)?;
    let outcome =
        extend_blocklength_with_budget(&inst, &code, a.rounds, a.seed, a.trials, ctx.budget)?;
    if let (Some(path), Some(protocol)) = (&a.outer_out, &outcome.protocol) {
        let mut text = serde_json::to_string_pretty(&protocol.outer_codes)?;
        text.push('\n');
        ctx.write(path, &text)?;
    }
    let refused = outcome.report.refused;
    if refused {
        eprintln!(
            "extend: refused ({})",
            outcome.report.refusal_reason.as_deref().unwrap_or("?")
        );
    } else {
        let mc = outcome.report.monte_carlo.as_ref().unwrap();
        eprintln!(
            "extend: estimate={} over {} trials, outer rate {:.4}",
            mc.estimate,
            mc.trials,
            outcome.report.outer_rate.unwrap_or(f64::NAN)
        );
    }
    ctx.emit(&a.out, &outcome.report)?;
    Ok(if refused { 1 } else { 0 })
}

fn cmd_estimate_good(a: &EstimateGoodArgs, ctx: &mut Ctx) -> Result<i32> {
    let table = FailureTable::from_json(&ctx.read("failure-table", &a.failure_table)?)?;
    let est = binning::estimate_good_probability(
        &table, a.delta_rn, a.trials, a.seed, a.mode, ctx.budget,
    )?;
    eprintln!(
        "estimate-good: {}/{} partition sets good",
        est.good, est.trials
    );
    ctx.emit(&a.out, &est)?;
    Ok(0)
}

fn cmd_binning_search(a: &BinningSearchArgs, ctx: &mut Ctx) -> Result<i32> {
    let table = FailureTable::from_json(&ctx.read("failure-table", &a.failure_table)?)?;
    let outcome =
        binning::search_good_partition(&table, a.delta_rn, a.attempts, a.seed, a.mode, ctx.budget)?;
    match &outcome.partition {
        Some(partition) => {
            if let Some(path) = &a.out {
                let mut text = serde_json::to_string_pretty(partition)?;
                text.push('\n');
                ctx.write(path, &text)?;
            }
            eprintln!(
                "binning search: good partition on attempt {}",
                outcome.attempts_used
            );
            let doc = json!({
                "found": true,
                "attempts_used": outcome.attempts_used,
                "partition": partition,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(0)
        }
        None => {
            eprintln!(
                "binning search: no good partition in {} attempts",
                outcome.attempts_used
            );
            let doc = refusal(
                "no-good-partition",
                json!({ "attempts": outcome.attempts_used }),
            );
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(1)
        }
    }
}

fn cmd_build_index_coding(a: &BuildIndexCodingArgs, ctx: &mut Ctx) -> Result<i32> {
    let spec: IndexCodingSpec = serde_json::from_str(&ctx.read("spec", &a.spec)?)?;
    let inst = build_index_coding_instance(&spec)?;
    eprintln!(
        "build index-coding: {} nodes, {} edges",
        inst.nodes.len(),
        inst.edges.len()
    );
    match &a.out {
        Some(path) => ctx.write(path, &inst.to_json())?,
        None => print!("{}", inst.to_json()),
    }
    Ok(0)
}

fn cmd_build_supernode(a: &BuildSupernodeArgs, ctx: &mut Ctx) -> Result<i32> {
    let inst = ctx.instance(&a.instance)?;
    let rate = parse_rational(&a.rate, "--rate")?;
    let delta = parse_rational(&a.delta, "--delta")?;
    let ext = build_supernode_extension(&inst, &rate, &delta)?;
    eprintln!(
        "build supernode: {} nodes, {} edges",
        ext.instance.nodes.len(),
        ext.instance.edges.len()
    );
    match &a.out {
        Some(path) => ctx.write(path, &ext.instance.to_json())?,
        None => print!("{}", ext.instance.to_json()),
    }
    Ok(0)
}

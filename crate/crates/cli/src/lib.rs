//! Argument parsing and command dispatch for the `ramsey-forge` binary.
//!
//! [`run`] is the whole program minus process I/O, so tests can drive it
//! directly. Exit codes: 0 for any decisive answer, 2 when a budget or cap
//! stops a computation, 1 for usage and input errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ramsey_forge::framework::{
    build_tree_instance, check_domain_axioms, check_space_axioms, dump_fragment, lp_implies_r, AxiomCheck,
    LpImpliesRReport,
};
use ramsey_forge::fullsets::{fs_instance_check, Factor, FullSetError};
use ramsey_forge::maps::{all_maps, enumerate_embeddings, enumerate_rigid_surjections};
use ramsey_forge::moore::{moore_check, MooreError};
use ramsey_forge::partitions::enumerate_partitions;
use ramsey_forge::tree::{enumerate_trees, OrderedTree};
use ramsey_forge::witness::{
    build_instance, decide_witness_with, search_min_witness, CandidateOutcome, InstanceSpec, SearchKind,
    SearchOptions, Verdict, WitnessError,
};
use ramsey_forge::coloring_cap_from_env;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ramsey-forge", version, about = "Exhaustive finite Ramsey theory on ordered trees")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads for the parallel engines; results do not depend on it.
    #[arg(long, default_value_t = 1, global = true, value_parser = clap::value_parser!(u64).range(1..=256))]
    workers: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical ordered trees.
    #[command(subcommand)]
    Trees(TreesCmd),
    /// Maps between two trees.
    #[command(subcommand)]
    Maps(MapsCmd),
    /// Set partitions of [m].
    #[command(subcommand)]
    Partitions(PartitionsCmd),
    /// Axioms of the sealed-surjection fragment.
    #[command(subcommand)]
    Axioms(AxiomsCmd),
    /// Ramsey witnesses.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Moore's convex-combination statement.
    #[command(subcommand)]
    Moore(MooreCmd),
    /// Full sets of partial vectors.
    #[command(subcommand)]
    Fullsets(FullsetsCmd),
}

#[derive(Debug, Subcommand)]
enum TreesCmd {
    /// List trees with at most --max-nodes nodes.
    Enumerate {
        #[arg(long)]
        max_nodes: usize,
        /// Keep only binary trees with this many leaves.
        #[arg(long)]
        binary_leaves: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MapKind {
    Rigid,
    Sealed,
    Embeddings,
    Morphisms,
}

#[derive(Debug, Subcommand)]
enum MapsCmd {
    /// List maps of one kind from --source to --target.
    Enumerate {
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, value_enum, default_value_t = MapKind::Rigid)]
        kind: MapKind,
        /// TOML file supplying `source` and `target`.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum PartitionsCmd {
    /// List k-partitions of [m] in restricted-growth order.
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        homogeneous: bool,
    },
}

#[derive(Debug, Subcommand)]
enum AxiomsCmd {
    /// Check every axiom on the fragment with trees of at most --max-nodes nodes.
    Check {
        #[arg(long)]
        max_nodes: usize,
        /// Also compare (LP) and (R) on every set at this many colors.
        #[arg(short = 'c', long)]
        colors: Option<usize>,
        /// Write the fragment tables as JSON to this path.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InstanceKind {
    DualTree,
    Leeb,
    Gr,
    GrHomogeneous,
}

#[derive(Debug, clap::Args)]
struct InstanceArgs {
    #[arg(long, value_enum)]
    instance: InstanceKind,
    #[arg(short = 'c', long, default_value_t = 2)]
    colors: usize,
    /// Small tree (dual-tree, leeb).
    #[arg(long)]
    s: Option<String>,
    /// Placement tree (dual-tree, leeb).
    #[arg(long)]
    t: Option<String>,
    /// Candidate witness tree (dual-tree, leeb; check only).
    #[arg(long)]
    u: Option<String>,
    /// Blocks of the small partitions (gr).
    #[arg(long)]
    k: Option<usize>,
    /// Blocks of the placement partitions (gr).
    #[arg(long)]
    l: Option<usize>,
    /// Ground set size (gr; check only).
    #[arg(long)]
    m: Option<usize>,
    /// Restrict dual-tree maps to sealed rigid surjections.
    #[arg(long)]
    sealed: bool,
    /// Node budget per top-level search subtree.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// TOML file supplying `s`, `t`, `u`.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum WitnessCmd {
    /// Decide whether one candidate is a witness.
    Check(InstanceArgs),
    /// Find the least witness up to --max-size.
    Search {
        #[command(flatten)]
        args: InstanceArgs,
        /// Largest candidate: nodes of U for trees, m for partitions.
        #[arg(long)]
        max_size: usize,
    },
}

#[derive(Debug, Subcommand)]
enum MooreCmd {
    /// Sweep every 2-coloring of the binary trees with --n leaves.
    Check {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
enum FullsetsCmd {
    /// Sweep every coloring of a product of partial-vector spaces.
    Check {
        /// One factor as `p,l,n`; repeat for products.
        #[arg(long = "factor", required = true, value_parser = parse_factor)]
        factors: Vec<Factor>,
        #[arg(short = 'c', long, default_value_t = 2)]
        colors: usize,
    },
}

const DEFAULT_BUDGET: u64 = 50_000_000;

fn parse_factor(s: &str) -> Result<Factor, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [p, l, n] = parts.as_slice() else {
        return Err(format!("expected p,l,n, got {s:?}"));
    };
    let num = |x: &str, name: &str| x.parse::<usize>().map_err(|_| format!("{name} = {x:?} is not a number"));
    let p = num(p, "p")?;
    let p = u8::try_from(p).map_err(|_| format!("p = {p} is too large"))?;
    Ok(Factor {
        p,
        l: num(l, "l")?,
        n: num(n, "n")?,
    })
}

/// Keys accepted in `--file`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeFile {
    s: Option<String>,
    t: Option<String>,
    u: Option<String>,
    source: Option<String>,
    target: Option<String>,
}

fn read_tree_file(path: &Option<PathBuf>) -> Result<TreeFile, Failure> {
    let Some(path) = path else {
        return Ok(TreeFile::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("--file {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("--file {}: {e}", path.display())))
}

enum Failure {
    Usage(String),
    Inconclusive(Value),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn tree_arg(flag: &str, inline: &Option<String>, from_file: &Option<String>) -> Result<OrderedTree, Failure> {
    let text = inline
        .as_ref()
        .or(from_file.as_ref())
        .ok_or_else(|| usage(format!("missing --{flag}")))?;
    text.parse().map_err(|e| usage(format!("--{flag}: {e}")))
}

fn count_arg(flag: &str, v: Option<usize>) -> Result<usize, Failure> {
    v.ok_or_else(|| usage(format!("missing --{flag}")))
}

/// Runs the program on `argv` (including the program name) and returns the
/// exit code with the text to print.
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (code, e.to_string());
        }
    };
    let format = cli.format;
    match dispatch(cli) {
        Ok(value) => (EXIT_OK, render(&value, format)),
        Err(Failure::Inconclusive(value)) => (EXIT_INCONCLUSIVE, render(&value, format)),
        Err(Failure::Usage(msg)) => (EXIT_USAGE, format!("error: {msg}\n")),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("output types serialize")
}

fn inconclusive(reason: String) -> Failure {
    Failure::Inconclusive(json!({ "verdict": "inconclusive", "reason": reason }))
}

fn dispatch(cli: Cli) -> Result<Value, Failure> {
    let workers = cli.workers as usize;
    match cli.command {
        Command::Trees(TreesCmd::Enumerate {
            max_nodes,
            binary_leaves,
        }) => {
            let trees: Vec<String> = enumerate_trees(max_nodes, binary_leaves).map(|t| t.to_string()).collect();
            Ok(json!({
                "max_nodes": max_nodes,
                "binary_leaves": binary_leaves,
                "count": trees.len(),
                "trees": trees,
            }))
        }
        Command::Maps(MapsCmd::Enumerate {
            source,
            target,
            kind,
            file,
        }) => {
            let f = read_tree_file(&file)?;
            let source = tree_arg("source", &source, &f.source)?;
            let target = tree_arg("target", &target, &f.target)?;
            let maps: Vec<String> = match kind {
                MapKind::Rigid => enumerate_rigid_surjections(&source, &target, false)
                    .iter()
                    .map(|m| m.to_string())
                    .collect(),
                MapKind::Sealed => enumerate_rigid_surjections(&source, &target, true)
                    .iter()
                    .map(|m| m.to_string())
                    .collect(),
                MapKind::Embeddings => enumerate_embeddings(&source, &target)
                    .iter()
                    .map(|m| m.to_string())
                    .collect(),
                MapKind::Morphisms => all_maps(&source, &target)
                    .filter(|m| m.is_morphism())
                    .map(|m| m.to_string())
                    .collect(),
            };
            Ok(json!({
                "source": source.to_string(),
                "target": target.to_string(),
                "kind": kind,
                "count": maps.len(),
                "maps": maps,
            }))
        }
        Command::Partitions(PartitionsCmd::Enumerate { m, k, homogeneous }) => {
            let list = enumerate_partitions(m, k, homogeneous).map_err(|e| usage(e.to_string()))?;
            let parts: Vec<String> = list.partitions.iter().map(|p| p.to_string()).collect();
            Ok(json!({
                "m": m,
                "k": k,
                "homogeneous": homogeneous,
                "count": parts.len(),
                "partitions": parts,
                "warning": list.warning,
            }))
        }
        Command::Axioms(AxiomsCmd::Check {
            max_nodes,
            colors,
            dump,
            budget,
        }) => axioms(max_nodes, colors, dump, SearchOptions { budget, workers }),
        Command::Witness(WitnessCmd::Check(args)) => witness_check(&args, workers),
        Command::Witness(WitnessCmd::Search { args, max_size }) => witness_search(&args, max_size, workers),
        Command::Moore(MooreCmd::Check { m, n }) => match moore_check(m, n, coloring_cap_from_env(), workers) {
            Ok(report) => Ok(to_value(&report)),
            Err(e @ MooreError::CapExceeded { .. }) => Err(inconclusive(e.to_string())),
            Err(e) => Err(usage(e.to_string())),
        },
        Command::Fullsets(FullsetsCmd::Check { factors, colors }) => {
            match fs_instance_check(&factors, colors, coloring_cap_from_env(), workers) {
                Ok(report) => Ok(to_value(&report)),
                Err(e @ FullSetError::CapExceeded { .. }) => Err(inconclusive(e.to_string())),
                Err(e) => Err(usage(e.to_string())),
            }
        }
    }
}

#[derive(Serialize)]
struct AxiomsOut {
    max_nodes: usize,
    elements: usize,
    sets: usize,
    all_passed: bool,
    space: Vec<AxiomCheck>,
    domain: Vec<AxiomCheck>,
    lp_implies_r: Option<LpImpliesRReport>,
}

fn axioms(max_nodes: usize, colors: Option<usize>, dump: Option<PathBuf>, opts: SearchOptions) -> Result<Value, Failure> {
    if max_nodes == 0 {
        return Err(usage("--max-nodes must be at least 1"));
    }
    let inst = build_tree_instance(max_nodes).map_err(|e| usage(e.to_string()))?;
    let space = check_space_axioms(&inst.space);
    let domain = check_domain_axioms(&inst.space, &inst.domain);
    if let Some(path) = dump {
        let text = serde_json::to_string_pretty(&dump_fragment(&inst.space, &inst.domain)).expect("dump serializes");
        std::fs::write(&path, text + "\n").map_err(|e| usage(format!("--dump {}: {e}", path.display())))?;
    }
    let lp_r = match colors {
        Some(0) => return Err(usage("--colors must be at least 1")),
        Some(c) => Some(lp_implies_r(&inst.space, &inst.domain, c, opts).map_err(|e| match e {
            ramsey_forge::framework::FrameworkError::Witness(WitnessError::BudgetExhausted { budget }) => {
                inconclusive(format!("search budget of {budget} nodes exhausted"))
            }
            e => usage(e.to_string()),
        })?),
        None => None,
    };
    Ok(to_value(&AxiomsOut {
        max_nodes,
        elements: inst.elements.len(),
        sets: inst.domain.p_sets.len(),
        all_passed: space.all_passed() && domain.all_passed(),
        space: space.checks,
        domain: domain.checks,
        lp_implies_r: lp_r,
    }))
}

fn instance_spec(args: &InstanceArgs) -> Result<(String, InstanceSpec), Failure> {
    let f = read_tree_file(&args.file)?;
    Ok(match args.instance {
        InstanceKind::DualTree | InstanceKind::Leeb => {
            let s = tree_arg("s", &args.s, &f.s)?;
            let t = tree_arg("t", &args.t, &f.t)?;
            let u = tree_arg("u", &args.u, &f.u)?;
            if args.instance == InstanceKind::DualTree {
                let label = format!("dual-tree s={s} t={t} u={u} sealed={}", args.sealed);
                (label, InstanceSpec::DualTree { s, t, u, sealed: args.sealed })
            } else {
                (format!("leeb s={s} t={t} u={u}"), InstanceSpec::Leeb { s, t, u })
            }
        }
        InstanceKind::Gr | InstanceKind::GrHomogeneous => {
            let k = count_arg("k", args.k)?;
            let l = count_arg("l", args.l)?;
            let m = count_arg("m", args.m)?;
            if args.instance == InstanceKind::Gr {
                (format!("gr k={k} l={l} m={m}"), InstanceSpec::Gr { k, l, m })
            } else {
                (
                    format!("gr-homogeneous k={k} l={l} m={m}"),
                    InstanceSpec::GrHomogeneous { k, l, m },
                )
            }
        }
    })
}

fn search_kind(args: &InstanceArgs) -> Result<(String, SearchKind), Failure> {
    let f = read_tree_file(&args.file)?;
    Ok(match args.instance {
        InstanceKind::DualTree => {
            let s = tree_arg("s", &args.s, &f.s)?;
            let t = tree_arg("t", &args.t, &f.t)?;
            let label = format!("dual-tree s={s} t={t} sealed={}", args.sealed);
            (label, SearchKind::DualTree { s, t, sealed: args.sealed })
        }
        InstanceKind::Leeb => {
            let s = tree_arg("s", &args.s, &f.s)?;
            let t = tree_arg("t", &args.t, &f.t)?;
            (format!("leeb s={s} t={t}"), SearchKind::Leeb { s, t })
        }
        InstanceKind::Gr => {
            let (k, l) = (count_arg("k", args.k)?, count_arg("l", args.l)?);
            (format!("gr k={k} l={l}"), SearchKind::Gr { k, l })
        }
        InstanceKind::GrHomogeneous => {
            let (k, l) = (count_arg("k", args.k)?, count_arg("l", args.l)?);
            (format!("gr-homogeneous k={k} l={l}"), SearchKind::GrHomogeneous { k, l })
        }
    })
}

fn witness_failure(e: WitnessError) -> Failure {
    match e {
        WitnessError::BudgetExhausted { budget } => inconclusive(format!("search budget of {budget} nodes exhausted")),
        e => usage(e.to_string()),
    }
}

#[derive(Serialize)]
struct WitnessCheckOut {
    instance: String,
    colors: usize,
    smalls: usize,
    placements: usize,
    verdict: Verdict,
    bad_coloring: Option<Vec<usize>>,
    nodes: u64,
}

fn witness_check(args: &InstanceArgs, workers: usize) -> Result<Value, Failure> {
    if args.colors == 0 {
        return Err(usage("--colors must be at least 1"));
    }
    let (label, spec) = instance_spec(args)?;
    let inst = match build_instance(&spec, args.colors) {
        Ok(inst) => inst,
        // Nothing to place: every coloring avoids monochromatic placements.
        Err(WitnessError::EmptyPlacements { smalls }) => {
            return Ok(to_value(&WitnessCheckOut {
                instance: label,
                colors: args.colors,
                smalls,
                placements: 0,
                verdict: Verdict::NotWitness,
                bad_coloring: Some(vec![0; smalls]),
                nodes: 0,
            }))
        }
        Err(e) => return Err(witness_failure(e)),
    };
    let opts = SearchOptions {
        budget: args.budget,
        workers,
    };
    let v = decide_witness_with(&inst, opts).map_err(witness_failure)?;
    Ok(to_value(&WitnessCheckOut {
        instance: label,
        colors: args.colors,
        smalls: inst.smalls().len(),
        placements: inst.placements().len(),
        verdict: v.verdict,
        bad_coloring: v.bad_coloring,
        nodes: v.stats.nodes,
    }))
}

#[derive(Serialize)]
struct CandidateOut {
    candidate: String,
    outcome: &'static str,
    bad_coloring: Option<Vec<usize>>,
    nodes: u64,
}

#[derive(Serialize)]
struct WitnessSearchOut {
    instance: String,
    colors: usize,
    max_size: usize,
    /// `witness` when some candidate is one, `not_witness` otherwise.
    verdict: Verdict,
    found: Option<String>,
    candidates_tried: Vec<CandidateOut>,
}

fn witness_search(args: &InstanceArgs, max_size: usize, workers: usize) -> Result<Value, Failure> {
    if args.colors == 0 {
        return Err(usage("--colors must be at least 1"));
    }
    let (label, kind) = search_kind(args)?;
    let opts = SearchOptions {
        budget: args.budget,
        workers,
    };
    let report = search_min_witness(&kind, args.colors, max_size, opts).map_err(witness_failure)?;
    let tried = report
        .tried
        .into_iter()
        .map(|c| {
            let (outcome, bad) = match c.outcome {
                CandidateOutcome::NoPlacements => ("no_placements", None),
                CandidateOutcome::NotWitness(col) => ("not_witness", Some(col)),
                CandidateOutcome::Witness => ("witness", None),
            };
            CandidateOut {
                candidate: c.candidate,
                outcome,
                bad_coloring: bad,
                nodes: c.nodes,
            }
        })
        .collect();
    let found = report.found.map(|(name, _)| name);
    Ok(to_value(&WitnessSearchOut {
        instance: label,
        colors: args.colors,
        max_size,
        verdict: if found.is_some() {
            Verdict::Witness
        } else {
            Verdict::NotWitness
        },
        found,
        candidates_tried: tried,
    }))
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("values serialize") + "\n",
        Format::Table => {
            let mut out = String::new();
            table(value, 0, &mut out);
            out
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::String(s) => Some(s.clone()),
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::Array(_) | Value::Object(_) => None,
                _ => scalar(i),
            })
            .collect::<Option<Vec<_>>>()
            .map(|s| s.join(" ")),
        Value::Object(_) => None,
    }
}

/// One `key  value` line per field; nested records are indented below
/// their key.
fn table(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in map {
                match scalar(v) {
                    Some(s) => out.push_str(&format!("{pad}{k:<width$}  {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}\n"));
                        table(v, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}[{i}]  {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        table(item, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

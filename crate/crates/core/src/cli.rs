//! Command-line front end. Every subcommand reads model JSON, calls into the
//! library and prints a JSON report carrying `"schema": 1`.
//!
//! Exit codes: 0 property holds, 1 property fails, 2 input or usage error,
//! 3 numeric degeneracy.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::abstraction::{abstract_by_substitution, abstract_by_transformation, AbstractionResult, Partition};
use crate::error::{Error, Result};
use crate::graph::{
    check_generalized_invariance, check_immersion_invariance, derived_conditions, select_nodes_with, to_dot,
    InvarianceQuery, SelectionOptions, StructuralGraph,
};
use crate::identifiability::{
    abstracted_pattern, check_prop4, has_leading_diagonal, identifiability_template, r_check_structure,
    v_check_structure, StructurePattern,
};
use crate::network::io::{matrix_from_json, model_to_json, read_model};
use crate::network::{
    check_abstraction, check_equivalence, validate_model, FrequencyGrid, NetworkModel, SelectionMatrix,
    DEFAULT_GRID_SIZE, DEFAULT_TOLERANCE,
};
use crate::transform::{apply_transformation, is_valid_transformation, transformation_between, Transformation};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "dynnet", version, about = "Abstraction and identifiability tools for linear dynamic networks")]
pub struct Cli {
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct NumericArgs {
    /// Frequency points for numeric checks.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_SIZE)]
    pub grid: usize,
    /// Scaled tolerance for numeric checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Seed for randomized rank checks and grid rotation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

/// Node sets by label or one-based index. Unlisted nodes go to `Z̃`.
#[derive(Args, Debug, Clone, Default)]
pub struct PartitionArgs {
    /// Kept nodes with their own equation.
    #[arg(long = "s", value_delimiter = ',')]
    pub s_tilde: Vec<String>,
    /// Kept nodes used as indirect observations.
    #[arg(long = "l", value_delimiter = ',')]
    pub l: Vec<String>,
    /// Removed nodes that are indirectly observed.
    #[arg(long = "v", value_delimiter = ',')]
    pub v: Vec<String>,
    /// Removed nodes eliminated outright.
    #[arg(long = "z", value_delimiter = ',')]
    pub z: Vec<String>,
}

impl PartitionArgs {
    fn is_empty(&self) -> bool {
        self.s_tilde.is_empty() && self.l.is_empty() && self.v.is_empty() && self.z.is_empty()
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Transform,
    Substitute,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that a model is well posed.
    Validate { model: PathBuf },
    /// Apply a transformation given as a matrix or by its target module matrix.
    Transform {
        model: PathBuf,
        /// JSON file with the transformation as a sparse `"row,col"` map.
        #[arg(long, conflicts_with = "target")]
        p: Option<PathBuf>,
        /// Model whose module matrix the transformation should produce.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove nodes while keeping the responses of the rest.
    Abstract {
        model: PathBuf,
        #[command(flatten)]
        partition: PartitionArgs,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural check that module `i → j` survives the abstraction.
    Invariance {
        model: PathBuf,
        #[arg(long)]
        i: String,
        #[arg(long)]
        j: String,
        #[command(flatten)]
        partition: PartitionArgs,
        /// Also compute the abstraction and compare the module exactly.
        #[arg(long)]
        verify: bool,
    },
    /// Enumerate node selections that keep module `i → j` invariant.
    Select {
        model: PathBuf,
        #[arg(long)]
        i: String,
        #[arg(long)]
        j: String,
        /// Nodes that may be measured; all nodes when omitted.
        #[arg(long, value_delimiter = ',')]
        measurable: Vec<String>,
        #[arg(long, default_value_t = 10)]
        max: usize,
    },
    /// Compare two models, or a model with an abstraction onto `--selection`.
    Equivalence {
        model_a: PathBuf,
        model_b: PathBuf,
        /// Nodes of the first model kept in the second, in order.
        #[arg(long, value_delimiter = ',')]
        selection: Option<Vec<String>>,
    },
    /// Graphviz rendering of the module graph.
    Dot {
        model: PathBuf,
        #[command(flatten)]
        partition: PartitionArgs,
    },
    /// Check the excitation and module structure needed for identification.
    Identifiability {
        model: PathBuf,
        #[command(flatten)]
        partition: PartitionArgs,
    },
}

/// Failure of a command: either an error from the library or a usage problem.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PoleAtPoint | Error::DegreeOverflow { .. } | Error::SingularMatrix | Error::SelfLoopSingular { .. } => {
            EXIT_NUMERIC
        }
        Error::NoFeasibleSelection => EXIT_FAILS,
        _ => EXIT_INPUT,
    }
}

struct Outcome {
    holds: bool,
    text: String,
}

impl Outcome {
    fn report(holds: bool, mut body: Value) -> Self {
        body["schema"] = json!(SCHEMA_VERSION);
        Outcome { holds, text: serde_json::to_string_pretty(&body).expect("serializable") + "\n" }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_HOLDS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            if o.holds {
                EXIT_HOLDS
            } else {
                EXIT_FAILS
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

fn execute(cli: &Cli) -> std::result::Result<Outcome, Failure> {
    let n = &cli.numeric;
    if !(n.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    if n.grid < 8 {
        return Err(usage("--grid must be at least 8"));
    }
    match &cli.command {
        Command::Validate { model } => cmd_validate(model),
        Command::Transform { model, p, target, out } => cmd_transform(n, model, p.as_deref(), target.as_deref(), out.as_deref()),
        Command::Abstract { model, partition, method, out } => cmd_abstract(model, partition, *method, out.as_deref()),
        Command::Invariance { model, i, j, partition, verify } => cmd_invariance(model, i, j, partition, *verify),
        Command::Select { model, i, j, measurable, max } => cmd_select(model, i, j, measurable, *max),
        Command::Equivalence { model_a, model_b, selection } => cmd_equivalence(n, model_a, model_b, selection.as_deref()),
        Command::Dot { model, partition } => cmd_dot(model, partition),
        Command::Identifiability { model, partition } => cmd_identifiability(model, partition),
    }
}

fn grid(n: &NumericArgs) -> FrequencyGrid {
    FrequencyGrid::uniform(n.grid).with_seed(n.seed)
}

fn resolve_node(m: &NetworkModel, name: &str) -> Result<usize> {
    if let Some(i) = m.node_index(name) {
        return Ok(i);
    }
    match name.parse::<usize>() {
        Ok(k) if (1..=m.node_count()).contains(&k) => Ok(k - 1),
        _ => Err(Error::InvalidPartition(format!("unknown node {name:?}"))),
    }
}

fn partition_of(m: &NetworkModel, a: &PartitionArgs) -> Result<Partition> {
    Partition::from_labels(m.labels(), &a.s_tilde, &a.l, &a.v, &a.z)
}

fn write_json(path: &Path, v: &Value) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_validate(model: &Path) -> std::result::Result<Outcome, Failure> {
    let m = read_model(model)?;
    let rep = validate_model(&m);
    Ok(Outcome::report(rep.all_passed(), json!({ "command": "validate", "valid": rep.all_passed(), "clauses": rep.clauses })))
}

fn cmd_transform(
    n: &NumericArgs,
    model: &Path,
    p: Option<&Path>,
    target: Option<&Path>,
    out: Option<&Path>,
) -> std::result::Result<Outcome, Failure> {
    let m = read_model(model)?;
    let size = m.node_count();
    let t = match (p, target) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            let body = v.get("P").unwrap_or(&v);
            Transformation::new(matrix_from_json(body, size, size)?)?
        }
        (None, Some(path)) => transformation_between(m.g(), read_model(path)?.g())?,
        _ => return Err(usage("give exactly one of --p or --target")),
    };
    if !is_valid_transformation(&t, &m) {
        return Ok(Outcome::report(false, json!({ "command": "transform", "valid": false })));
    }
    let transformed = apply_transformation(&m, &t)?;
    let equivalent = check_equivalence(&m, &transformed, &grid(n), n.tol)?;
    let model_json = model_to_json(&transformed);
    if let Some(path) = out {
        write_json(path, &model_json)?;
    }
    Ok(Outcome::report(
        equivalent,
        json!({ "command": "transform", "valid": true, "equivalent": equivalent, "model": model_json }),
    ))
}

fn run_abstraction(m: &NetworkModel, p: &Partition, method: Method) -> std::result::Result<AbstractionResult, Failure> {
    match method {
        Method::Transform => Ok(abstract_by_transformation(m, p)?),
        Method::Substitute => Ok(abstract_by_substitution(m, p)?),
        Method::Both => {
            let a = abstract_by_transformation(m, p)?;
            let b = abstract_by_substitution(m, p)?;
            if a.abstracted != b.abstracted {
                return Err(Failure {
                    code: EXIT_FAILS,
                    message: "transformation and substitution results differ".into(),
                });
            }
            Ok(a)
        }
    }
}

fn cmd_abstract(model: &Path, pa: &PartitionArgs, method: Method, out: Option<&Path>) -> std::result::Result<Outcome, Failure> {
    let m = read_model(model)?;
    let p = partition_of(&m, pa)?;
    let a = run_abstraction(&m, &p, method)?;
    let model_json = model_to_json(&a.abstracted);
    if let Some(path) = out {
        write_json(path, &model_json)?;
    }
    let method_name = match method {
        Method::Transform => "transform",
        Method::Substitute => "substitute",
        Method::Both => "both",
    };
    Ok(Outcome::report(
        true,
        json!({ "command": "abstract", "method": method_name, "report": a.report, "model": model_json }),
    ))
}

fn cmd_invariance(model: &Path, i: &str, j: &str, pa: &PartitionArgs, verify: bool) -> std::result::Result<Outcome, Failure> {
    let m = read_model(model)?;
    let (i, j) = (resolve_node(&m, i)?, resolve_node(&m, j)?);
    let p = partition_of(&m, pa)?;
    let g = StructuralGraph::from_matrix(m.g());
    let q = InvarianceQuery::new(i, j, p.clone())?;
    let invariant = check_generalized_invariance(&g, &q);
    let mut body = json!({
        "command": "invariance",
        "module": { "input": m.node_label(i), "output": m.node_label(j) },
        "partition": p.with_labels(m.labels()),
        "invariant": invariant,
        "derived_conditions": derived_conditions(&g, &q),
    });
    if p.is_immersion() {
        body["immersion_check"] = json!(check_immersion_invariance(&g, i, j, p.s_tilde()));
    }
    let mut holds = invariant;
    if verify {
        let a = abstract_by_transformation(&m, &p)?;
        let kept = p.kept();
        let pos = |k: usize| kept.iter().position(|&x| x == k).expect("kept");
        let equal = a.abstracted.g().get(pos(j), pos(i)) == m.g().get(j, i);
        body["verified"] = json!(equal);
        holds = holds && equal;
    }
    Ok(Outcome::report(holds, body))
}

fn cmd_select(model: &Path, i: &str, j: &str, measurable: &[String], max: usize) -> std::result::Result<Outcome, Failure> {
    let m = read_model(model)?;
    let (i, j) = (resolve_node(&m, i)?, resolve_node(&m, j)?);
    let meas: Vec<usize> = if measurable.is_empty() {
        (0..m.node_count()).collect()
    } else {
        measurable.iter().map(|s| resolve_node(&m, s)).collect::<Result<_>>()?
    };
    let g = StructuralGraph::from_matrix(m.g());
    let opts = SelectionOptions { max_results: max, ..SelectionOptions::default() };
    let found = match select_nodes_with(&g, i, j, &meas, &opts) {
        Ok(o) => o,
        Err(Error::NoFeasibleSelection) => {
            return Ok(Outcome::report(false, json!({ "command": "select", "partitions": [] })));
        }
        Err(e) => return Err(e.into()),
    };
    let parts: Vec<Value> = found.partitions.iter().map(|p| json!(p.with_labels(m.labels()))).collect();
    Ok(Outcome::report(
        !parts.is_empty(),
        json!({
            "command": "select",
            "partitions": parts,
            "evaluations": found.evaluations,
            "budget_exhausted": found.budget_exhausted,
        }),
    ))
}

fn cmd_equivalence(n: &NumericArgs, a: &Path, b: &Path, selection: Option<&[String]>) -> std::result::Result<Outcome, Failure> {
    let (ma, mb) = (read_model(a)?, read_model(b)?);
    let g = grid(n);
    let (mode, equal) = match selection {
        None => ("equivalence", check_equivalence(&ma, &mb, &g, n.tol)?),
        Some(names) => {
            let kept = names.iter().map(|s| resolve_node(&ma, s)).collect::<Result<Vec<_>>>()?;
            let c = SelectionMatrix::new(kept, ma.node_count())?;
            ("abstraction", check_abstraction(&ma, &mb, &c, &g, n.tol)?)
        }
    };
    Ok(Outcome::report(equal, json!({ "command": "equivalence", "mode": mode, "equivalent": equal })))
}

fn cmd_dot(model: &Path, pa: &PartitionArgs) -> std::result::Result<Outcome, Failure> {
    let m = read_model(model)?;
    let p = if pa.is_empty() { None } else { Some(partition_of(&m, pa)?) };
    let g = StructuralGraph::from_matrix(m.g());
    Ok(Outcome { holds: true, text: to_dot(&g, &m.labels().nodes, p.as_ref()) })
}

fn pattern_json(p: &StructurePattern) -> Value {
    json!(p.render().lines().collect::<Vec<_>>())
}

fn cmd_identifiability(model: &Path, pa: &PartitionArgs) -> std::result::Result<Outcome, Failure> {
    let m = read_model(model)?;
    let p = partition_of(&m, pa)?;
    let conditions = check_prop4(&m, &p)?;
    let predicted_r = r_check_structure(&m, &p)?;
    let predicted_v = v_check_structure(&m, &p)?;
    let leading = has_leading_diagonal(&predicted_r);
    let mut body = json!({
        "command": "identifiability",
        "partition": p.with_labels(m.labels()),
        "clauses": conditions.clauses,
        "predicted_r": pattern_json(&predicted_r),
        "predicted_noise": pattern_json(&predicted_v),
        "leading_diagonal": leading,
    });
    if predicted_r.block_cols() == 4 {
        let template = identifiability_template(&p)?;
        body["template"] = pattern_json(&template);
        body["conforms"] = json!(predicted_r.conforms_to(&template));
    }
    if let Ok(a) = abstract_by_transformation(&m, &p) {
        let concrete = abstracted_pattern(a.abstracted.r(), &p)?;
        body["concrete_r"] = pattern_json(&concrete);
        body["concrete_conforms"] = json!(concrete.conforms_to(&predicted_r));
    }
    Ok(Outcome::report(conditions.all_passed() && leading, body))
}

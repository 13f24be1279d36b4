//! The `codd-lab` experiment runner.
//!
//! Every subcommand is a function of its input files and flags. Reports are
//! JSON documents carrying the resolved configuration; tables are CSV.
//! Exit status: 0 on success, 1 on domain errors, 2 on usage errors.

mod io;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bits::BitString;
use crate::codd::{self, codd_size, CoddExpr, ExprJson, Fuel, Outcome};
use crate::dtree::{
    self, greedy_tree, optimal_tree_with, DecisionTree, Labeling, LabelingJson, PartitionMode, TieBreak,
};
use crate::error::Error;
use crate::growth::{self, EnsembleConfig, GrowthConfig, ProfileConfig};
use crate::partitions::{self, Distribution, DistributionJson, InputSpace, Partition, PartitionJson};
use crate::pattern::{self, ProgramJson, RelevanceFn, RelevanceJson};
use crate::rational::{self, Rational};
use crate::synsem::{self, CorrelationConfig, EditCostScheme, SchemeKind};

pub use io::CliError;
use io::{parse_json, read_bytes, to_json_bytes, write_atomic, CliResult, Located};

#[derive(Parser, Debug)]
#[command(name = "codd-lab", version, about = "Decision dags, distinctions and entropy experiments")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Logical and Shannon entropy of a partition.
    Entropy(EntropyArgs),
    /// Decision trees for a labeling.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Combinatorial decision dags.
    #[command(subcommand)]
    Codd(CoddCommand),
    /// Pattern predicates between two programs.
    #[command(subcommand)]
    Pattern(PatternCommand),
    /// Syntax/semantics correlation.
    #[command(subcommand)]
    Synsem(SynsemCommand),
    /// Random tree growth; `grow ensemble` and `grow profile` for ensembles.
    Grow(GrowCommand),
}

#[derive(Subcommand, Debug)]
enum TreeCommand {
    /// Minimal expected depth tree.
    Optimal(TreeArgs),
    /// Maximal-information-gain tree.
    Greedy(TreeArgs),
}

#[derive(Subcommand, Debug)]
enum CoddCommand {
    /// Apply an expression to arguments and reduce to normal form.
    Eval(EvalArgs),
    /// Serialize an expression to its bit-exact binary form.
    Encode(EncodeArgs),
    /// Parse the binary form back into an expression.
    Decode(DecodeArgs),
    /// Fold `(P a)(P b)` into `Sp P a b`.
    Memoize(MemoizeArgs),
}

#[derive(Subcommand, Debug)]
enum PatternCommand {
    /// Is P a (possibly approximate) pattern in F?
    Check(PatternArgs),
}

#[derive(Subcommand, Debug)]
enum SynsemCommand {
    /// Correlate semantic and syntactic distance over random pairs.
    Correlate(CorrelateArgs),
}

#[derive(Args, Debug, Serialize)]
struct DistArg {
    /// Input distribution file `{"n", "mass": ["p/q", ...]}`; uniform when absent.
    #[arg(long)]
    dist: Option<PathBuf>,
}

impl DistArg {
    fn load(&self, space: InputSpace) -> CliResult<Distribution> {
        match &self.dist {
            None => Ok(Distribution::uniform(space)),
            Some(p) => {
                let d = Distribution::from_json(&parse_json::<DistributionJson>(p)?).in_file(p)?;
                d.ensure_over(&space).in_file(p)?;
                Ok(d)
            }
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct OutArg {
    /// Write the report here (atomically) instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct JobsArg {
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug, Serialize)]
struct EntropyArgs {
    /// Partition file `{"n", "cell": [...]}`.
    #[arg(long)]
    partition: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    dist: DistArg,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TieArg {
    LowestBit,
    MaxGain,
}

#[derive(Args, Debug, Serialize)]
struct TreeArgs {
    /// Labeling file `{"n", "output": [...]}`.
    #[arg(long)]
    labeling: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    dist: DistArg,
    /// Tie-break among optimal splits (optimal only).
    #[arg(long, value_enum, default_value = "lowest-bit")]
    tie: TieArg,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    /// Expression file: JSON, or the binary form when the name ends in `.bin`.
    #[arg(long)]
    expr: PathBuf,
    /// Argument, repeatable: an expression file, or `bits:0101` for a leaf.
    #[arg(long)]
    arg: Vec<String>,
    /// Reduction step budget.
    #[arg(long, default_value_t = 10_000)]
    fuel: u64,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct EncodeArgs {
    /// Expression file (JSON).
    #[arg(long)]
    expr: PathBuf,
    /// Binary output; when absent the report carries the bits.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct DecodeArgs {
    /// Binary expression file.
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct MemoizeArgs {
    /// Expression file: JSON, or the binary form when the name ends in `.bin`.
    #[arg(long)]
    expr: PathBuf,
    /// Pattern expression file; the largest repeated function when absent.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct PatternArgs {
    /// Candidate pattern: `{"n", "output"}` or `{"n", "tree"}`.
    #[arg(long)]
    p: PathBuf,
    /// Program the pattern is checked against, same formats.
    #[arg(long)]
    f: PathBuf,
    /// Relevance file `{"n", "default_weight", "overrides"}`.
    #[arg(long, visible_alias = "relevance")]
    rho: PathBuf,
    /// Use the approximate predicate with this slack.
    #[arg(long)]
    slack: Option<u64>,
    /// Also compare optimal expected depths under this distribution.
    #[arg(long)]
    dist: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum EnsembleArg {
    Perturbed,
    Independent,
    Identical,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BuilderArg {
    Optimal,
    Greedy,
}

#[derive(Args, Debug, Serialize)]
struct CorrelateArgs {
    /// Input bits.
    #[arg(long, default_value_t = 4)]
    n: u32,
    /// Number of labeling pairs.
    #[arg(long, default_value_t = 200)]
    pairs: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated edit cost schemes.
    #[arg(long, default_value = "entropy,depth", value_delimiter = ',')]
    scheme: Vec<String>,
    /// Depth decay for the depth scheme.
    #[arg(long, default_value = "1/2")]
    decay: String,
    /// How the second labeling of a pair is drawn.
    #[arg(long, value_enum, default_value = "perturbed")]
    ensemble: EnsembleArg,
    /// Tree builder for each labeling.
    #[arg(long, value_enum, default_value = "optimal")]
    builder: BuilderArg,
    #[command(flatten)]
    #[serde(flatten)]
    dist: DistArg,
    /// Per-pair table: pair_id, semantic, syn_<scheme>...
    #[arg(long)]
    #[serde(skip)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArg,
    #[command(flatten)]
    #[serde(skip)]
    jobs: JobsArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    ByLeaf,
    ByOutput,
}

impl From<ModeArg> for PartitionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ByLeaf => PartitionMode::ByLeaf,
            ModeArg::ByOutput => PartitionMode::ByOutput,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct GrowthArgs {
    /// Input bits.
    #[arg(long, default_value_t = 6)]
    n: u32,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Labels are drawn uniformly from 0..alphabet.
    #[arg(long, default_value_t = 2)]
    alphabet: u64,
    /// Partition whose entropy is measured.
    #[arg(long, value_enum, default_value = "by-leaf")]
    mode: ModeArg,
    #[command(flatten)]
    #[serde(flatten)]
    dist: DistArg,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct GrowCommand {
    #[command(subcommand)]
    action: Option<GrowAction>,
    #[command(flatten)]
    trace: GrowArgs,
}

#[derive(Subcommand, Debug)]
enum GrowAction {
    /// Entropy by tree size over many random trees.
    Ensemble(EnsembleArgs),
    /// Entropy distribution at one fixed size.
    Profile(ProfileArgs),
}

#[derive(Args, Debug, Serialize)]
struct GrowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    growth: GrowthArgs,
    /// Growth steps.
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Per-step table: step, size, entropy_num, entropy_den.
    #[arg(long)]
    #[serde(skip)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArg,
}

#[derive(Args, Debug, Serialize)]
struct EnsembleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    growth: GrowthArgs,
    /// Sizes as `a..b` (inclusive) or a comma-separated list.
    #[arg(long, default_value = "1..50")]
    sizes: String,
    /// Trees per size.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Per-size table: size, samples, mean, min, q25, median, q75, max.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// JSON report; standard output when absent.
    #[arg(long)]
    #[serde(skip)]
    report: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    jobs: JobsArg,
}

#[derive(Args, Debug, Serialize)]
struct ProfileArgs {
    #[command(flatten)]
    #[serde(flatten)]
    growth: GrowthArgs,
    /// Splits per tree.
    #[arg(long, default_value_t = 30)]
    size: usize,
    /// Number of trees.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Fraction below the empirical maximum still counted as near it.
    #[arg(long, default_value = "1/10")]
    delta: String,
    /// Histogram bins.
    #[arg(long, default_value_t = 20)]
    bins: usize,
    #[command(flatten)]
    #[serde(skip)]
    out: OutArg,
    #[command(flatten)]
    #[serde(skip)]
    jobs: JobsArg,
}

#[derive(Serialize)]
struct RunReport<'a, C: Serialize, R: Serialize> {
    command: &'static str,
    version: &'static str,
    config: &'a C,
    result: R,
}

fn emit<C: Serialize, R: Serialize>(command: &'static str, config: &C, result: R, out: Option<&Path>) -> CliResult<()> {
    let report = RunReport { command, version: env!("CARGO_PKG_VERSION"), config, result };
    let bytes = to_json_bytes(&report);
    match out {
        Some(p) => write_atomic(p, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| Error::Io(e).into())
        }
    }
}

fn with_jobs<T: Send>(jobs: &JobsArg, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.jobs)
        .build()
        .map_err(|e| Error::invalid("jobs", e.to_string()))?;
    Ok(pool.install(f))
}

fn parse_rational(flag: &'static str, s: &str) -> CliResult<Rational> {
    rational::parse(s).map_err(|e| Error::invalid(flag, e.to_string()).into())
}

/// Parses argv, runs, and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let started = Instant::now();
    match dispatch(cli.command) {
        Ok(()) => {
            eprintln!("elapsed {:.3}s", started.elapsed().as_secs_f64());
            0
        }
        Err(e) => {
            eprintln!("{e}");
            1
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Entropy(a) => entropy(&a),
        Command::Tree(TreeCommand::Optimal(a)) => tree(&a, true),
        Command::Tree(TreeCommand::Greedy(a)) => tree(&a, false),
        Command::Codd(CoddCommand::Eval(a)) => codd_eval(&a),
        Command::Codd(CoddCommand::Encode(a)) => codd_encode(&a),
        Command::Codd(CoddCommand::Decode(a)) => codd_decode(&a),
        Command::Codd(CoddCommand::Memoize(a)) => codd_memoize(&a),
        Command::Pattern(PatternCommand::Check(a)) => pattern_check(&a),
        Command::Synsem(SynsemCommand::Correlate(a)) => correlate(&a),
        Command::Grow(GrowCommand { action: None, trace }) => grow(&trace),
        Command::Grow(GrowCommand { action: Some(GrowAction::Ensemble(a)), .. }) => grow_ensemble(&a),
        Command::Grow(GrowCommand { action: Some(GrowAction::Profile(a)), .. }) => grow_profile(&a),
    }
}

#[derive(Serialize)]
struct EntropyResult {
    #[serde(with = "rational::serde_str")]
    logical: Rational,
    shannon: f64,
    cells: u32,
    dits: u64,
}

fn entropy(a: &EntropyArgs) -> CliResult<()> {
    let p = Partition::from_json(&parse_json::<PartitionJson>(&a.partition)?).in_file(&a.partition)?;
    let d = a.dist.load(p.space())?;
    let result = EntropyResult {
        logical: partitions::logical_entropy(&p, &d)?,
        shannon: partitions::shannon_entropy(&p, &d)?,
        cells: p.cell_count(),
        dits: p.dit_count(),
    };
    emit("entropy", a, result, a.out.out.as_deref())
}

#[derive(Serialize)]
struct TreeResult {
    tree: DecisionTree,
    #[serde(with = "rational::serde_str")]
    average_depth: Rational,
    size: usize,
    depth: u32,
}

fn tree(a: &TreeArgs, optimal: bool) -> CliResult<()> {
    let lab = Labeling::from_json(&parse_json::<LabelingJson>(&a.labeling)?).in_file(&a.labeling)?;
    let d = a.dist.load(lab.space())?;
    let t = if optimal {
        let tie = match a.tie {
            TieArg::LowestBit => TieBreak::LowestBit,
            TieArg::MaxGain => TieBreak::MaxGain,
        };
        optimal_tree_with(&lab, &d, tie)?.tree
    } else {
        greedy_tree(&lab, &d)
    };
    let result = TreeResult {
        average_depth: dtree::average_depth(&t, &d),
        size: dtree::tree_size(&t),
        depth: t.depth(),
        tree: t,
    };
    emit(if optimal { "tree optimal" } else { "tree greedy" }, a, result, a.out.out.as_deref())
}

fn load_expr(path: &Path) -> CliResult<CoddExpr> {
    if path.extension().is_some_and(|e| e == "bin") {
        let bits = BitString::from_bytes(&read_bytes(path)?);
        codd::decode(&bits).in_file(path)
    } else {
        CoddExpr::from_json(&parse_json::<ExprJson>(path)?).in_file(path)
    }
}

#[derive(Serialize)]
struct EvalResult {
    outcome: &'static str,
    steps: u64,
    normal_form: Option<ExprJson>,
}

fn codd_eval(a: &EvalArgs) -> CliResult<()> {
    let e = load_expr(&a.expr)?;
    let args = a
        .arg
        .iter()
        .map(|s| match s.strip_prefix("bits:") {
            Some(b) => Ok(CoddExpr::leaf(b.parse().map_err(CliError::from)?)),
            None => load_expr(Path::new(s)),
        })
        .collect::<CliResult<Vec<_>>>()?;
    let r = codd::eval_codd(&e, &args, Fuel::new(a.fuel)?).in_file(&a.expr)?;
    let result = match r.outcome {
        Outcome::Normal(nf) => EvalResult { outcome: "normal", steps: r.steps, normal_form: Some(nf.to_json()) },
        Outcome::FuelExhausted => EvalResult { outcome: "fuel-exhausted", steps: r.steps, normal_form: None },
    };
    emit("codd eval", a, result, a.out.out.as_deref())
}

#[derive(Serialize)]
struct EncodeResult {
    nodes: usize,
    bits: usize,
    bytes: usize,
    /// The encoding as a bit string; only when no output file is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    encoding: Option<String>,
}

fn codd_encode(a: &EncodeArgs) -> CliResult<()> {
    let e = load_expr(&a.expr)?;
    let enc = codd::encode(&e).in_file(&a.expr)?;
    let bytes = enc.to_bytes();
    let result = EncodeResult {
        nodes: e.len(),
        bits: enc.bits().len(),
        bytes: bytes.len(),
        encoding: a.out.is_none().then(|| enc.bits().to_string()),
    };
    if let Some(p) = &a.out {
        write_atomic(p, &bytes)?;
    }
    emit("codd encode", a, result, None)
}

#[derive(Serialize)]
struct DecodeResult {
    expr: ExprJson,
    codd_size: usize,
}

fn codd_decode(a: &DecodeArgs) -> CliResult<()> {
    let bits = BitString::from_bytes(&read_bytes(&a.input)?);
    let e = codd::decode(&bits).in_file(&a.input)?;
    let result = DecodeResult { codd_size: codd_size(&e), expr: e.to_json() };
    emit("codd decode", a, result, a.out.out.as_deref())
}

#[derive(Serialize)]
struct MemoizeResult {
    expr: ExprJson,
    pattern: Option<ExprJson>,
    rewritten: usize,
    notice: Option<String>,
    codd_size_before: usize,
    codd_size_after: usize,
}

fn codd_memoize(a: &MemoizeArgs) -> CliResult<()> {
    let e = load_expr(&a.expr)?;
    let pattern = match &a.pattern {
        Some(p) => Some(load_expr(p)?),
        None => codd::find_repeats(&e).into_iter().next().map(|r| r.pattern),
    };
    let result = match &pattern {
        Some(p) => {
            let out = codd::memoize_rewrite(&e, p);
            MemoizeResult {
                codd_size_after: codd_size(&out.expr),
                expr: out.expr.to_json(),
                pattern: Some(p.to_json()),
                rewritten: out.rewritten,
                notice: out.notice,
                codd_size_before: codd_size(&e),
            }
        }
        None => MemoizeResult {
            expr: e.to_json(),
            pattern: None,
            rewritten: 0,
            notice: Some("no function is applied more than once".into()),
            codd_size_before: codd_size(&e),
            codd_size_after: codd_size(&e),
        },
    };
    emit("codd memoize", a, result, a.out.out.as_deref())
}

fn pattern_check(a: &PatternArgs) -> CliResult<()> {
    let p = parse_json::<ProgramJson>(&a.p)?.to_view().in_file(&a.p)?;
    let f = parse_json::<ProgramJson>(&a.f)?.to_view().in_file(&a.f)?;
    let rho = RelevanceFn::from_json(&parse_json::<RelevanceJson>(&a.rho)?).in_file(&a.rho)?;
    let d = match &a.dist {
        Some(path) => Some(DistArg { dist: Some(path.clone()) }.load(f.space())?),
        None => None,
    };
    let verdict = pattern::check(&p, &f, &rho, a.slack, d.as_ref())?;
    emit("pattern check", a, verdict, a.out.out.as_deref())
}

fn correlate(a: &CorrelateArgs) -> CliResult<()> {
    let space = InputSpace::new(a.n)?;
    let decay = parse_rational("decay", &a.decay)?;
    let schemes = a
        .scheme
        .iter()
        .map(|s| {
            let kind: SchemeKind = s.trim().parse()?;
            let base = rational::one();
            EditCostScheme::new(kind, base.clone(), base.clone(), base, decay.clone())
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut config = CorrelationConfig::new(a.n, a.pairs, a.seed);
    config.schemes = schemes;
    config.ensemble = match a.ensemble {
        EnsembleArg::Perturbed => synsem::PairEnsemble::Perturbed,
        EnsembleArg::Independent => synsem::PairEnsemble::Independent,
        EnsembleArg::Identical => synsem::PairEnsemble::Identical,
    };
    config.builder = match a.builder {
        BuilderArg::Optimal => synsem::Builder::Optimal,
        BuilderArg::Greedy => synsem::Builder::Greedy,
    };
    if a.dist.dist.is_some() {
        config.distribution = Some(a.dist.load(space)?);
    }
    let report = with_jobs(&a.jobs, || synsem::correlation_experiment(&config))??;
    if let Some(p) = &a.csv {
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        write_atomic(p, &buf)?;
    }
    emit("synsem correlate", a, report, a.out.out.as_deref())
}

impl GrowthArgs {
    fn space_and_dist(&self) -> CliResult<(InputSpace, Distribution)> {
        let space = InputSpace::new(self.n)?;
        Ok((space, self.dist.load(space)?))
    }
}

#[derive(Serialize)]
struct GrowResult {
    final_size: usize,
    #[serde(with = "rational::serde_str")]
    final_entropy: Rational,
    /// Steps at which the measured entropy decreased.
    decreases: Vec<usize>,
    tree: DecisionTree,
}

fn grow(a: &GrowArgs) -> CliResult<()> {
    let (_, d) = a.growth.space_and_dist()?;
    let config = GrowthConfig {
        n: a.growth.n,
        steps: a.steps,
        seed: a.growth.seed,
        alphabet: a.growth.alphabet,
        mode: a.growth.mode.into(),
    };
    let trace = growth::grow_random(&config, &d)?;
    if let Some(p) = &a.trace {
        let mut buf = Vec::new();
        trace.write_csv(&mut buf)?;
        write_atomic(p, &buf)?;
    }
    let last = trace.entries.last().expect("initial entry");
    let result = GrowResult {
        final_size: last.size,
        final_entropy: last.entropy.clone(),
        decreases: trace.violations(),
        tree: trace.tree.clone(),
    };
    emit("grow", a, result, a.out.out.as_deref())
}

fn parse_sizes(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::from(Error::invalid("sizes", format!("{s:?} (expected a..b or a,b,c)")));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn grow_ensemble(a: &EnsembleArgs) -> CliResult<()> {
    let (_, d) = a.growth.space_and_dist()?;
    let mut config = EnsembleConfig::new(parse_sizes(&a.sizes)?, a.samples, a.growth.n, a.growth.seed);
    config.alphabet = a.growth.alphabet;
    config.mode = a.growth.mode.into();
    let table = with_jobs(&a.jobs, || growth::size_entropy_ensemble(&config, &d))??;
    if let Some(p) = &a.out {
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        write_atomic(p, &buf)?;
    }
    emit("grow ensemble", a, table, a.report.as_deref())
}

fn grow_profile(a: &ProfileArgs) -> CliResult<()> {
    let (_, d) = a.growth.space_and_dist()?;
    let mut config = ProfileConfig::new(a.size, a.samples, a.growth.n, a.growth.seed);
    config.delta = parse_rational("delta", &a.delta)?;
    config.bins = a.bins;
    config.alphabet = a.growth.alphabet;
    config.mode = a.growth.mode.into();
    let profile = with_jobs(&a.jobs, || growth::entropy_concentration_profile(&config, &d))??;
    emit("grow profile", a, profile, a.out.out.as_deref())
}

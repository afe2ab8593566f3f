use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bmfni::sp::Fold;
use bmfni::{Epsilon, ValuePair};

/// Biobjective maximum-flow interdiction on series-parallel graphs.
///
/// Exit codes: 0 ok, 1 usage, 2 parse or validation error, 3 unmet
/// precondition, 4 verification failure, 5 size guard.
#[derive(Debug, Parser)]
#[command(name = "bmfni", version)]
pub struct Cli {
    /// Worker threads for the solvers; 0 uses every core, 1 runs serially.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact nondominated front.
    Solve(SolveArgs),
    /// Approximate front for unit interdiction costs.
    Approx(ApproxArgs),
    /// Front by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Verify a front file against the enumerated front.
    Check(CheckArgs),
    /// Is some feasible strategy at or below a threshold pair?
    Decide(DecideArgs),
    /// Biobjective knapsack view of a parallel instance.
    Knapsack(InstanceArgs),
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Exact solver against several ε, as CSV.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    pub instance: PathBuf,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Binarization of n-ary compositions in SP expressions.
    #[arg(long, value_enum, default_value_t = FoldArg::Left)]
    pub fold: FoldArg,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: InstanceArgs,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub common: InstanceArgs,
    /// Decimal (`0.1`) or fraction (`1/10`), strictly positive.
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: Epsilon,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: InstanceArgs,
    /// Refuse instances with more arcs than this.
    #[arg(long, default_value_t = bmfni::oracle::DEFAULT_MAX_ARCS)]
    pub max_arcs: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub front: PathBuf,
    pub instance: PathBuf,
    /// Check ε-coverage instead of exact equality.
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: Option<Epsilon>,
    #[arg(long, default_value_t = bmfni::oracle::DEFAULT_MAX_ARCS)]
    pub max_arcs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    #[command(flatten)]
    pub common: InstanceArgs,
    /// `v1,v2`; defaults to the file's "threshold".
    #[arg(long, value_parser = parse_pair)]
    pub threshold: Option<ValuePair>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Random series-parallel instance.
    Sp(GenSpArgs),
    /// Parallel arcs with capacities (2^i, 2^(m-i)).
    HardParallel(GenHardArgs),
    /// Random knapsack decision instance and its interdiction counterpart.
    Reduction(GenReductionArgs),
}

#[derive(Debug, Args)]
pub struct GenSpArgs {
    #[arg(long)]
    pub arcs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub max_capacity: u64,
    #[arg(long, default_value_t = 1)]
    pub max_cost: u64,
    /// Fixed budget.
    #[arg(long, conflicts_with = "budget_fraction")]
    pub budget: Option<u64>,
    /// Budget as a fraction `num/den` of the total cost (default 1/3).
    #[arg(long, value_parser = parse_fraction)]
    pub budget_fraction: Option<(u64, u64)>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenHardArgs {
    #[arg(long)]
    pub arcs: usize,
    /// Defaults to the arc count.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenReductionArgs {
    #[arg(long)]
    pub items: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub max_profit: u64,
    #[arg(long, default_value_t = 10)]
    pub max_weight: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: InstanceArgs,
    /// Repeatable.
    #[arg(long = "epsilon", value_parser = parse_epsilon, required = true)]
    pub epsilons: Vec<Epsilon>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FoldArg {
    Left,
    Right,
}

impl From<FoldArg> for Fold {
    fn from(f: FoldArg) -> Self {
        match f {
            FoldArg::Left => Fold::Left,
            FoldArg::Right => Fold::Right,
        }
    }
}

fn parse_epsilon(s: &str) -> Result<Epsilon, String> {
    s.parse::<Epsilon>().map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<ValuePair, String> {
    let (a, b) = s.split_once(',').ok_or("expected v1,v2")?;
    let a = a.trim().parse::<u64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<u64>().map_err(|e| e.to_string())?;
    Ok(ValuePair::new(a, b))
}

fn parse_fraction(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once('/').ok_or("expected num/den")?;
    let a = a.trim().parse::<u64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<u64>().map_err(|e| e.to_string())?;
    if b == 0 {
        return Err("denominator must be positive".into());
    }
    Ok((a, b))
}

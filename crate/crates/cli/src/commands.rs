use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use bmfni::exact::{decision_check, solve_exact};
use bmfni::fptas::solve_fptas;
use bmfni::generator::{
    gen_hard_parallel_with_budget, gen_reduction, gen_sp, BudgetRule, ReductionParams, SpParams,
};
use bmfni::knapsack::{knapsack_front_to_interdiction, knapsack_to_bmfni, parallel_to_knapsack, solve_biknapsack};
use bmfni::oracle::{enumerate_front, verify_front, VerifyMode};
use bmfni::pareto::eps_covers;
use bmfni::sp::{render_sp_expression, Fold};
use bmfni::{Epsilon, Instance, ValuePair};

use crate::args::*;
use crate::error::{exit, CliError, CliResult};
use crate::files::{FrontFile, InstanceFile, KnapsackSpec, PairSpec, Parameters, PointSpec, Timing};

/// What a command produced: the result document, where it goes, and the
/// exit code.
#[derive(Debug)]
pub struct Outcome {
    pub document: String,
    pub out: Option<PathBuf>,
    pub code: i32,
}

impl Outcome {
    fn ok(document: String, out: &Option<PathBuf>) -> Self {
        Self {
            document,
            out: out.clone(),
            code: exit::OK,
        }
    }
}

pub fn run(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Solve(a) => solve(&a.common),
        Command::Approx(a) => approx(a),
        Command::Oracle(a) => oracle(a),
        Command::Check(a) => check(a),
        Command::Decide(a) => decide(a),
        Command::Knapsack(a) => knapsack(a),
        Command::Gen(g) => generate(g),
        Command::Compare(a) => compare(a),
    }
}

pub fn read_instance(path: &Path) -> CliResult<InstanceFile> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(&shown, e))?;
    InstanceFile::parse(&text, &shown)
}

fn load(args: &InstanceArgs) -> CliResult<(InstanceFile, Instance)> {
    let file = read_instance(&args.instance)?;
    let instance = file.instance(Fold::from(args.fold))?;
    Ok((file, instance))
}

fn elapsed(start: Instant) -> Timing {
    Timing {
        wall_us: start.elapsed().as_micros() as u64,
    }
}

fn solve(args: &InstanceArgs) -> CliResult<Outcome> {
    let (file, instance) = load(args)?;
    let start = Instant::now();
    let solution = solve_exact(&instance)?;
    let front = FrontFile::new(
        "exact",
        Parameters::default(),
        file.digest(),
        &instance,
        &solution.front,
        elapsed(start),
    );
    Ok(Outcome::ok(front.to_json(), &args.out))
}

fn approx(args: &ApproxArgs) -> CliResult<Outcome> {
    let (file, instance) = load(&args.common)?;
    let start = Instant::now();
    let solution = solve_fptas(&instance, args.epsilon)?;
    let front = FrontFile::new(
        "fptas",
        Parameters {
            epsilon: Some(args.epsilon.to_string()),
        },
        file.digest(),
        &instance,
        &solution.front,
        elapsed(start),
    );
    Ok(Outcome::ok(front.to_json(), &args.common.out))
}

fn oracle(args: &OracleArgs) -> CliResult<Outcome> {
    let (file, instance) = load(&args.common)?;
    let start = Instant::now();
    let report = enumerate_front(&instance, args.max_arcs)?;
    let front = FrontFile::new(
        "oracle",
        Parameters::default(),
        file.digest(),
        &instance,
        &report.labeled(),
        elapsed(start),
    );
    Ok(Outcome::ok(front.to_json(), &args.common.out))
}

#[derive(Serialize)]
struct BadWitness {
    v1: u64,
    v2: u64,
    reason: String,
}

#[derive(Serialize)]
struct CheckReport {
    passed: bool,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<String>,
    digest_matches: bool,
    sorted: bool,
    missing: Vec<PairSpec>,
    unexpected: Vec<PairSpec>,
    uncovered: Vec<PairSpec>,
    bad_witnesses: Vec<BadWitness>,
}

fn check(args: &CheckArgs) -> CliResult<Outcome> {
    let shown = args.front.display().to_string();
    let text = std::fs::read_to_string(&args.front).map_err(|e| CliError::io(&shown, e))?;
    let front = FrontFile::parse(&text, &shown)?;
    let file = read_instance(&args.instance)?;
    let instance = file.instance(Fold::Left)?;
    let candidate = front.labeled_points(&instance)?;
    let report = enumerate_front(&instance, args.max_arcs)?;
    let mode = match args.epsilon {
        Some(e) => VerifyMode::Eps(e),
        None => VerifyMode::Exact,
    };
    let verdict = verify_front(&instance, &candidate, &report, mode)?;

    let sorted = front
        .points
        .windows(2)
        .all(|w| w[0].v1 < w[1].v1 && w[0].v2 > w[1].v2);
    let digest_matches = front.instance_digest == file.digest();
    let pairs = |v: &[ValuePair]| v.iter().map(|&p| PairSpec::from(p)).collect::<Vec<_>>();
    let out = CheckReport {
        passed: verdict.passed() && sorted && digest_matches,
        mode: if args.epsilon.is_some() { "eps" } else { "exact" },
        epsilon: args.epsilon.map(|e| e.to_string()),
        digest_matches,
        sorted,
        missing: pairs(&verdict.missing),
        unexpected: pairs(&verdict.unexpected),
        uncovered: pairs(&verdict.uncovered),
        bad_witnesses: verdict
            .bad_witnesses
            .iter()
            .map(|(p, reason)| BadWitness {
                v1: p.v1,
                v2: p.v2,
                reason: reason.clone(),
            })
            .collect(),
    };
    let code = if out.passed { exit::OK } else { exit::VERIFICATION };
    Ok(Outcome {
        document: to_pretty(&out),
        out: args.out.clone(),
        code,
    })
}

fn decide(args: &DecideArgs) -> CliResult<Outcome> {
    let file = read_instance(&args.common.instance)?;
    let (instance, threshold, source) = if file.has_graph() {
        let instance = file.instance(Fold::from(args.common.fold))?;
        let threshold = args
            .threshold
            .or(file.threshold.map(ValuePair::from))
            .ok_or_else(|| CliError::usage("no threshold: pass --threshold or add \"threshold\" to the file"))?;
        (instance, threshold, "graph")
    } else if let Some(kd) = file.knapsack_decision() {
        let (instance, k) = knapsack_to_bmfni(&kd)?;
        (instance, args.threshold.unwrap_or(k), "knapsack")
    } else {
        return Err(CliError::input("validation", "instance file has neither \"graph\" nor \"knapsack\""));
    };
    let answer = decision_check(&instance, threshold)?;
    let doc = json!({
        "answer": answer,
        "threshold": PairSpec::from(threshold),
        "source": source,
        "instance_digest": file.digest(),
    });
    Ok(Outcome::ok(to_pretty(&doc), &args.common.out))
}

#[derive(Serialize)]
struct KnapsackPoint {
    p1: u64,
    p2: u64,
    items: Vec<String>,
    weight: u64,
}

fn knapsack(args: &InstanceArgs) -> CliResult<Outcome> {
    let (file, instance) = load(args)?;
    let k = parallel_to_knapsack(&instance)?;
    let efficient = solve_biknapsack(&k)?;
    let names = |x: &bmfni::Strategy| x.arcs().map(|a| instance.arcs[a].name.clone()).collect::<Vec<_>>();
    let points: Vec<KnapsackPoint> = efficient
        .iter()
        .map(|p| KnapsackPoint {
            p1: p.value.v1,
            p2: p.value.v2,
            items: names(&p.witness),
            weight: p.witness.cost(),
        })
        .collect();
    let interdiction: Vec<PointSpec> = knapsack_front_to_interdiction(&k, &efficient)
        .iter()
        .map(|p| PointSpec {
            v1: p.value.v1,
            v2: p.value.v2,
            strategy: names(&p.witness),
            cost: p.witness.cost(),
        })
        .collect();
    let doc = json!({
        "solver": "biknapsack",
        "instance_digest": file.digest(),
        "capacity": k.capacity,
        "points": points,
        "interdiction": interdiction,
    });
    Ok(Outcome::ok(to_pretty(&doc), &args.out))
}

fn generate(command: &GenCommand) -> CliResult<Outcome> {
    match command {
        GenCommand::Sp(a) => {
            let budget = match (a.budget, a.budget_fraction) {
                (Some(b), _) => BudgetRule::Fixed(b),
                (None, Some((num, den))) => BudgetRule::FractionOfTotalCost { num, den },
                (None, None) => BudgetRule::FractionOfTotalCost { num: 1, den: 3 },
            };
            let instance = gen_sp(&SpParams {
                arcs: a.arcs,
                seed: a.seed,
                max_capacity: a.max_capacity,
                max_cost: a.max_cost,
                budget,
            })
            .map_err(usage_error)?;
            Ok(Outcome::ok(instance_document(&instance).to_json(), &a.out))
        }
        GenCommand::HardParallel(a) => {
            let budget = a.budget.unwrap_or(a.arcs as u64);
            let instance = gen_hard_parallel_with_budget(a.arcs, budget).map_err(usage_error)?;
            Ok(Outcome::ok(instance_document(&instance).to_json(), &a.out))
        }
        GenCommand::Reduction(a) => {
            let generated = gen_reduction(&ReductionParams {
                items: a.items,
                seed: a.seed,
                max_profit: a.max_profit,
                max_weight: a.max_weight,
            })
            .map_err(usage_error)?;
            let mut file = instance_document(&generated.instance);
            file.threshold = Some(generated.threshold.into());
            file.knapsack = Some(KnapsackSpec::from(&generated.knapsack));
            Ok(Outcome::ok(file.to_json(), &a.out))
        }
    }
}

/// Generator failures come from parameters, so they are usage errors.
fn usage_error(err: bmfni::Error) -> CliError {
    CliError::usage(err.to_string())
}

fn instance_document(instance: &Instance) -> InstanceFile {
    let tree = instance.tree().expect("generated instances carry a tree");
    let names = instance.arc_names();
    InstanceFile::from_instance(instance, render_sp_expression(&tree, &names))
}

pub const COMPARE_HEADER: [&str; 8] = ["m", "U", "B", "epsilon", "labels", "front", "covered", "wall_ms"];

fn compare(args: &CompareArgs) -> CliResult<Outcome> {
    let (_, instance) = load(&args.common)?;
    if !instance.unit_costs() {
        return Err(bmfni::Error::NonUnitCosts {
            arc: instance.arcs.iter().find(|a| a.cost != 1).map(|a| a.name.clone()).unwrap_or_default(),
            cost: instance.arcs.iter().map(|a| a.cost).find(|&c| c != 1).unwrap_or(0),
        }
        .into());
    }
    let m = instance.arc_count().to_string();
    let u = instance.max_capacity_overall().to_string();
    let b = instance.effective_budget().to_string();

    let mut csv = csv::Writer::from_writer(Vec::new());
    let write_err = |e: csv::Error| CliError::new(exit::INPUT, "io", e.to_string());
    csv.write_record(COMPARE_HEADER).map_err(write_err)?;

    let start = Instant::now();
    let exact = solve_exact(&instance)?;
    let ms = millis(start);
    csv.write_record([
        m.as_str(),
        &u,
        &b,
        "exact",
        &exact.stats.labels_created.to_string(),
        &exact.front.len().to_string(),
        "true",
        &ms,
    ])
    .map_err(write_err)?;

    for &eps in &args.epsilons {
        let start = Instant::now();
        let approx = solve_fptas(&instance, eps)?;
        let ms = millis(start);
        let covered = covers_all(&approx.front, &exact.front, eps);
        csv.write_record([
            m.as_str(),
            &u,
            &b,
            &eps.to_string(),
            &approx.stats.labels_created.to_string(),
            &approx.front.len().to_string(),
            if covered { "true" } else { "false" },
            &ms,
        ])
        .map_err(write_err)?;
    }
    let bytes = csv
        .into_inner()
        .map_err(|e| CliError::new(exit::INPUT, "io", e.to_string()))?;
    Ok(Outcome::ok(String::from_utf8(bytes).expect("csv of ASCII fields"), &args.common.out))
}

fn millis(start: Instant) -> String {
    format!("{:.3}", start.elapsed().as_secs_f64() * 1000.0)
}

/// Every exact point is `(1+ε)`-covered by the approximation.
fn covers_all(approx: &[bmfni::LabeledPoint], exact: &[bmfni::LabeledPoint], eps: Epsilon) -> bool {
    let values: Vec<ValuePair> = approx.iter().map(|p| p.value).collect();
    exact.iter().all(|p| eps_covers(&values, &p.value, eps))
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports always serialize") + "\n"
}

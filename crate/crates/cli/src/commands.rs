//! Subcommand implementations.

use std::path::{Path, PathBuf};

use serde::Serialize;

use robust_newsvendor::baselines::{
    default_budget_grid, sweep_instance, ExperimentConfig, MarginRegime, SweepRow,
};
use robust_newsvendor::extensions::{
    cvar_robust_policy, multi_constraint_policy, yield_robust_policy,
};
use robust_newsvendor::knapsack::{knapsack_allocate, lower_bound_policy};
use robust_newsvendor::moments::best_case_two_point;
use robust_newsvendor::{Instance, Item, OrderingPolicy, PolicyModel};

use crate::instance::{load_instance, LoadedInstance};
use crate::output::{sig10, sweep_csv, write_atomic};
use crate::CliError;

#[derive(Serialize)]
struct ValidateOutput {
    ok: bool,
    items: Vec<ValidateItem>,
}

#[derive(Serialize)]
struct ValidateItem {
    item: usize,
    notes: Vec<String>,
}

pub fn validate(path: &Path, echo: bool) -> Result<(), CliError> {
    let loaded = load_instance(path)?;
    if echo {
        let text = serde_json::to_string_pretty(&loaded.file)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        println!("{text}");
        return Ok(());
    }
    let items = loaded
        .items
        .iter()
        .enumerate()
        .map(|(i, item)| ValidateItem {
            item: i,
            notes: item.spec.validate().notes,
        })
        .collect();
    print_json(&ValidateOutput { ok: true, items })
}

#[derive(Serialize)]
struct SolveOutput {
    model: PolicyModel,
    budget: f64,
    objective: f64,
    spent: f64,
    items: Vec<SolveItem>,
}

#[derive(Serialize)]
struct SolveItem {
    item: usize,
    q: f64,
    /// Highest breakpoint level fully reached (0-based), if any.
    piece: Option<usize>,
    /// True when the quantity sits strictly between levels (partial fill).
    partial: bool,
}

fn level_position(levels: &[f64], q: f64) -> (Option<usize>, bool) {
    let reached = levels.iter().rposition(|&lvl| q >= lvl - 1e-9);
    let partial = match reached {
        Some(k) => q > levels[k] + 1e-9,
        None => q > 1e-12,
    };
    (reached, partial)
}

fn solve_items(items: &[Item], policy: &OrderingPolicy, lower: bool) -> Vec<SolveItem> {
    items
        .iter()
        .zip(&policy.quantities)
        .enumerate()
        .map(|(i, (item, &q))| {
            let levels: Vec<f64> = if lower {
                let dist = best_case_two_point(&item.spec).expect("validated spec with beta");
                if dist.is_point_mass() {
                    vec![dist.min()]
                } else {
                    vec![dist.min(), dist.max()]
                }
            } else {
                vec![item.spec.a, item.spec.mu, item.spec.b]
            };
            let (piece, partial) = level_position(&levels, q);
            SolveItem {
                item: i,
                q: sig10(q),
                piece,
                partial,
            }
        })
        .collect()
}

pub fn solve(path: &Path, budget: Option<f64>, lower: bool) -> Result<(), CliError> {
    let loaded = load_instance(path)?;
    let budget = required_budget(budget, &loaded)?;
    let (items, policy) = if lower {
        let items = loaded.items_with_beta()?;
        let policy = lower_bound_policy(&Instance::new(items.clone(), budget)?)?;
        (items, policy)
    } else {
        let items = loaded.items.clone();
        let policy = knapsack_allocate(&Instance::new(items.clone(), budget)?)?;
        (items, policy)
    };
    let rows = solve_items(&items, &policy, lower);
    print_json(&SolveOutput {
        model: policy.model,
        budget: sig10(budget),
        objective: sig10(policy.objective),
        spent: sig10(policy.spent),
        items: rows,
    })
}

pub struct SweepArgs {
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub case: Option<u8>,
    pub margin: Option<String>,
    pub out: Option<PathBuf>,
    pub instance: Option<PathBuf>,
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let rows: Vec<SweepRow> = if let Some(case) = args.case {
        let margin: MarginRegime = match args.margin.as_deref() {
            None => MarginRegime::Low,
            Some(text) => text.parse()?,
        };
        let config = ExperimentConfig {
            n_items: 25,
            margin,
            case,
            grid_points: args.grid.unwrap_or(101),
            seed: args.seed.unwrap_or(0),
            budgets: None,
        };
        robust_newsvendor::baselines::budget_sweep(&config)?
    } else {
        let path = args
            .instance
            .as_deref()
            .ok_or_else(|| CliError::Schema("sweep needs an instance file or --case".into()))?;
        let loaded = load_instance(path)?;
        let items = loaded.items_with_beta()?;
        let dists = loaded.ground_truths()?;
        let budgets = match &loaded.file.budget_grid {
            Some(grid) => grid.clone(),
            None => {
                let econs = loaded.econs();
                let points = args.grid.or(loaded.file.options.grid_points).unwrap_or(101);
                default_budget_grid(&econs, &dists, points)?
            }
        };
        sweep_instance(&items, &dists, &budgets)?
    };
    let csv = sweep_csv(&rows);
    match &args.out {
        Some(path) => write_atomic(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct EvaluateOutput {
    budget: f64,
    reference: PolicyModel,
    policies: Vec<PolicySummary>,
}

#[derive(Serialize)]
struct PolicySummary {
    policy: PolicyModel,
    q: Vec<f64>,
    spent: f64,
    cost_true: f64,
    cost_upper: f64,
    cost_lower: f64,
    evai: f64,
}

pub fn evaluate(path: &Path, budget: Option<f64>) -> Result<(), CliError> {
    let loaded = load_instance(path)?;
    let budget = required_budget(budget, &loaded)?;
    let items = loaded.items_with_beta()?;
    let dists = loaded.ground_truths()?;
    let rows = sweep_instance(&items, &dists, &[budget])?;
    let econs = loaded.econs();
    let mut policies = Vec::new();
    for model in PolicyModel::ALL {
        let model_rows: Vec<&SweepRow> = rows.iter().filter(|r| r.policy == model).collect();
        if model_rows.is_empty() {
            continue;
        }
        let q: Vec<f64> = model_rows.iter().map(|r| sig10(r.q)).collect();
        let spent: f64 = econs.iter().zip(&q).map(|(e, &qi)| e.unit_cost * qi).sum();
        let first = model_rows[0];
        policies.push(PolicySummary {
            policy: model,
            q,
            spent: sig10(spent),
            cost_true: sig10(first.cost_true),
            cost_upper: sig10(first.cost_upper),
            cost_lower: sig10(first.cost_lower),
            evai: sig10(first.evai),
        });
    }
    print_json(&EvaluateOutput {
        budget: sig10(budget),
        reference: PolicyModel::FullInformation,
        policies,
    })
}

#[derive(Serialize)]
struct ExtMultiOutput {
    objective: f64,
    q: Vec<f64>,
    shadow_prices: Vec<f64>,
}

pub fn ext_multi(path: &Path) -> Result<(), CliError> {
    let loaded = load_instance(path)?;
    let (weights, budgets) = loaded.constraints()?;
    let solution = multi_constraint_policy(&loaded.items, &weights, &budgets)?;
    print_json(&ExtMultiOutput {
        objective: sig10(solution.policy.objective),
        q: solution
            .policy
            .quantities
            .iter()
            .map(|&q| sig10(q))
            .collect(),
        shadow_prices: solution.shadow_prices.iter().map(|&s| sig10(s)).collect(),
    })
}

#[derive(Serialize)]
struct ExtYieldOutput {
    budget: f64,
    objective: f64,
    spent: f64,
    q: Vec<f64>,
}

pub fn ext_yield(path: &Path, budget: Option<f64>) -> Result<(), CliError> {
    let loaded = load_instance(path)?;
    let budget = required_budget(budget, &loaded)?;
    let yields = loaded.yields()?;
    let policy = yield_robust_policy(&loaded.items, &yields, budget)?;
    print_json(&ExtYieldOutput {
        budget: sig10(budget),
        objective: sig10(policy.objective),
        spent: sig10(policy.spent),
        q: policy.quantities.iter().map(|&q| sig10(q)).collect(),
    })
}

#[derive(Serialize)]
struct ExtCvarOutput {
    budget: f64,
    gamma: f64,
    objective: f64,
    theta: f64,
    spent: f64,
    q: Vec<f64>,
}

pub fn ext_cvar(path: &Path, gamma: Option<f64>, budget: Option<f64>) -> Result<(), CliError> {
    let loaded = load_instance(path)?;
    let budget = required_budget(budget, &loaded)?;
    let gamma = gamma.or(loaded.file.options.gamma).ok_or_else(|| {
        CliError::Schema("gamma required (pass --gamma or set options.gamma)".into())
    })?;
    let solution = cvar_robust_policy(&loaded.items, budget, gamma)?;
    print_json(&ExtCvarOutput {
        budget: sig10(budget),
        gamma,
        objective: sig10(solution.policy.objective),
        theta: sig10(solution.theta),
        spent: sig10(solution.policy.spent),
        q: solution
            .policy
            .quantities
            .iter()
            .map(|&q| sig10(q))
            .collect(),
    })
}

fn required_budget(flag: Option<f64>, loaded: &LoadedInstance) -> Result<f64, CliError> {
    flag.or(loaded.file.budget).ok_or_else(|| {
        CliError::Schema("budget required (pass --budget or set `budget` in the instance)".into())
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("{text}");
    Ok(())
}

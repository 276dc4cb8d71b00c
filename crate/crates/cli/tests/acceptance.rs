//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p adjsim-cli --test acceptance`.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use adjsim::{
    build_model, draw_dataset, enumerate_catalog, estimand_table, lemma_check, parse_graph, population_covariance,
    population_estimand, run_simulation, GraphSelection, SeedSpec, Sign, SimConfig, Technique, WClass, XyRelation,
    EDGE_COEFFICIENT,
};

const LEMMA_TOL: f64 = 1e-9;
const COVARIANCE_TOL: f64 = 0.01;
const MEDIAN_TOL: f64 = 0.05;
const FITTED_X_MEDIAN_TOL: f64 = 0.10;
const RESIDUAL_Y_BOUND: f64 = 0.30;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn check(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn within_budget(elapsed: Duration, budget_secs: u64) -> (bool, String) {
    (
        elapsed <= Duration::from_secs(budget_secs),
        format!("{:.2}s of {budget_secs}s", elapsed.as_secs_f64()),
    )
}

fn catalog_counts() -> Outcome {
    let catalog = enumerate_catalog();
    let unsigned: HashSet<_> = catalog.iter().map(|e| e.graph.with_wx_sign(Sign::Positive)).collect();
    let links = ["->", "<-", "-"];
    let mut cyclic = Vec::new();
    for a in links {
        for b in links {
            for c in links {
                let notation = format!("X{a}W{b}Y,X{c}Y");
                if parse_graph(&notation).is_err() {
                    cyclic.push(notation);
                }
            }
        }
    }
    cyclic.sort();
    let ids_dense = catalog.iter().enumerate().all(|(i, e)| e.id as usize == i + 1);
    Outcome::check(
        catalog.len() == 33 && unsigned.len() == 25 && cyclic == ["X->W->Y,X<-Y", "X<-W<-Y,X->Y"] && ids_dense,
        format!(
            "{} entries, {} distinct all-positive graphs, rejected {:?}",
            catalog.len(),
            unsigned.len(),
            cyclic
        ),
    )
}

fn lemma_suite() -> Outcome {
    let start = Instant::now();
    let report = lemma_check(5000, 30, 2024).expect("valid parameters");
    let (fast, time) = within_budget(start.elapsed(), 5);
    Outcome::check(
        report.datasets - report.skipped >= 1000
            && report.max_residual_x_gap < LEMMA_TOL
            && report.max_residual_xy_gap < LEMMA_TOL
            && fast,
        format!(
            "{} datasets, max gaps {:.2e} / {:.2e} (< {LEMMA_TOL:e}), {time}",
            report.datasets - report.skipped,
            report.max_residual_x_gap,
            report.max_residual_xy_gap
        ),
    )
}

fn oracle_sampler_agreement() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, String::new());
    for entry in enumerate_catalog() {
        let model = build_model(&entry.graph);
        let sigma = population_covariance(&model).sigma;
        let data = draw_dataset(&model, 1_000_000, SeedSpec::new(1, entry.id, 0)).expect("n >= 3");
        let empirical = data.covariance();
        for i in 0..3 {
            for j in 0..3 {
                let gap = (empirical[i][j] - sigma[i][j]).abs();
                if gap > worst.0 {
                    worst = (gap, entry.notation.clone());
                }
            }
        }
    }
    let (fast, time) = within_budget(start.elapsed(), 60);
    Outcome::check(
        worst.0 <= COVARIANCE_TOL && fast,
        format!("max entrywise gap {:.4} ({}) <= {COVARIANCE_TOL}, {time}", worst.0, worst.1),
    )
}

fn monte_carlo_convergence() -> Outcome {
    let start = Instant::now();
    let out = run_simulation(&SimConfig::default()).expect("default config is valid");
    let (fast, time) = within_budget(start.elapsed(), 30);
    let mut worst_main = 0.0f64;
    let mut worst_fitted = 0.0f64;
    let mut failures = Vec::new();
    for s in &out.summaries {
        let tol = match s.technique {
            Technique::SimpleRegression | Technique::MultipleRegression | Technique::ResidualY => MEDIAN_TOL,
            Technique::FittedX => FITTED_X_MEDIAN_TOL,
            _ => continue,
        };
        let (Some(estimand), Some(stats)) = (s.population_estimand, s.stats) else {
            continue;
        };
        let gap = (stats.median - estimand).abs();
        if s.technique == Technique::FittedX {
            worst_fitted = worst_fitted.max(gap);
        } else {
            worst_main = worst_main.max(gap);
        }
        if gap > tol {
            failures.push(format!("graph {} {} {} gap {:+.3}", s.graph_id, s.notation, s.technique, stats.median - estimand));
        }
    }
    let mut detail = format!(
        "max |median - estimand|: Simple/Multiple/ResidualY {worst_main:.4} (<= {MEDIAN_TOL}), FittedX {worst_fitted:.4} (<= {FITTED_X_MEDIAN_TOL}), {time}"
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; exceeded: {}", failures.join("; ")));
    }
    Outcome::check(failures.is_empty() && fast, detail)
}

fn true_value_anchor() -> Outcome {
    let forward = parse_graph("X->W->Y,X->Y").unwrap().true_effect();
    let expected = EDGE_COEFFICIENT * EDGE_COEFFICIENT + EDGE_COEFFICIENT;
    let reverse_zero = enumerate_catalog()
        .iter()
        .filter(|e| e.class.xy_relation == XyRelation::YCausesX)
        .all(|e| e.true_effect() == 0.0);
    Outcome::check(
        forward == expected && (forward - 0.9107).abs() < 5e-5 && reverse_zero,
        format!("forward chain {forward:.6}, every Y->X graph 0: {reverse_zero}"),
    )
}

fn instrumental_claim() -> Outcome {
    let graph = parse_graph("X<-W-Y,X->Y").unwrap();
    let cov = population_covariance(&build_model(&graph));
    let estimand = population_estimand(&cov, Technique::FittedX).unwrap();
    let out = run_simulation(&SimConfig {
        selection: GraphSelection::Notation("X<-W-Y,X->Y".into()),
        ..SimConfig::default()
    })
    .unwrap();
    let median = out
        .summaries
        .iter()
        .find(|s| s.technique == Technique::FittedX)
        .and_then(|s| s.stats)
        .unwrap()
        .median;
    let exact = (estimand - EDGE_COEFFICIENT).abs() < 1e-12 && (graph.true_effect() - EDGE_COEFFICIENT).abs() < 1e-15;
    Outcome::check(
        exact && (median - EDGE_COEFFICIENT).abs() <= FITTED_X_MEDIAN_TOL,
        format!("estimand {estimand:.6}, true effect {:.6}, simulated median {median:.4}", graph.true_effect()),
    )
}

fn residual_y_bound() -> Outcome {
    let table = estimand_table(&enumerate_catalog());
    let max_abs_bias = |t: Technique| {
        table
            .iter()
            .filter(|r| r.w_class == WClass::Confounding && r.technique == t)
            .map(|r| r.bias.map_or(f64::INFINITY, f64::abs))
            .fold(0.0f64, f64::max)
    };
    let ry = max_abs_bias(Technique::ResidualY);
    let others: Vec<(Technique, f64)> = [Technique::SimpleRegression, Technique::MultipleRegression, Technique::FittedX]
        .into_iter()
        .map(|t| (t, max_abs_bias(t)))
        .collect();
    let passed = ry <= RESIDUAL_Y_BOUND
        && (ry - 0.278).abs() < 5e-4
        && others.iter().all(|(_, b)| *b > ry)
        && others.iter().find(|(t, _)| *t == Technique::MultipleRegression).unwrap().1 > RESIDUAL_Y_BOUND;
    let rendered: Vec<String> = others.iter().map(|(t, b)| format!("{t} {b:.4}")).collect();
    Outcome::check(
        passed,
        format!("ResidualY max |bias| {ry:.4} <= {RESIDUAL_Y_BOUND}; {}", rendered.join(", ")),
    )
}

fn adjsim(args: &[&str], threads: Option<&str>) -> Result<(), String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_adjsim"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).trim().to_string())
    }
}

fn simulate_and_plot(dir: &Path, threads: Option<&str>) -> Result<(), String> {
    let out = dir.to_str().unwrap();
    adjsim(&["simulate", "--n", "30", "--reps", "1000", "--seed", "7", "--out", out], threads)?;
    adjsim(&["plot", "--out", out], threads)
}

fn files_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism(root: &Path) -> Outcome {
    let (a, b) = (root.join("serial"), root.join("parallel"));
    if let Err(e) = simulate_and_plot(&a, Some("1")).and_then(|_| simulate_and_plot(&b, None)) {
        return Outcome::check(false, e);
    }
    let tables_a = files_in(&a);
    let figures_a = files_in(&a.join("figures"));
    let same = tables_a == files_in(&b) && figures_a == files_in(&b.join("figures"));
    let names: Vec<&str> = tables_a.iter().map(|(n, _)| n.as_str()).collect();
    Outcome::check(
        same && names.contains(&"raw.csv") && names.contains(&"summary.csv") && figures_a.len() == 11,
        format!(
            "1-thread vs default-pool runs byte-identical over {:?} and {} SVGs: {same}",
            names,
            figures_a.len()
        ),
    )
}

fn figure_inventory(root: &Path) -> Outcome {
    let dir = root.join("serial").join("figures");
    let figures = files_in(&dir);
    let mut panels = 0;
    let mut problems = Vec::new();
    for (name, bytes) in &figures {
        let svg = String::from_utf8_lossy(bytes);
        for panel in svg.split("<g class=\"panel\"").skip(1) {
            panels += 1;
            let techniques: Vec<&str> = panel
                .split("data-technique=\"")
                .skip(1)
                .map(|s| &s[..s.find('"').unwrap()])
                .collect();
            let expected: Vec<&str> = Technique::DISPLAYED.iter().map(|t| t.as_str()).collect();
            if techniques != expected {
                problems.push(format!("{name}: techniques {techniques:?}"));
            }
            if panel.matches("class=\"true-effect\"").count() != 1 {
                problems.push(format!("{name}: true-effect lines"));
            }
        }
    }
    Outcome::check(
        figures.len() == 11 && panels == 33 && problems.is_empty(),
        format!("{} figures, {panels} panels, 4 techniques + 1 true-effect line each; issues: {problems:?}", figures.len()),
    )
}

fn main() -> ExitCode {
    let root = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 catalog counts", Box::new(catalog_counts)),
        ("2 three-estimator equivalence", Box::new(lemma_suite)),
        ("3 oracle-sampler covariance agreement", Box::new(oracle_sampler_agreement)),
        ("4 Monte Carlo convergence to oracle", Box::new(monte_carlo_convergence)),
        ("5 true-value anchor", Box::new(true_value_anchor)),
        ("6 instrumental FittedX", Box::new(instrumental_claim)),
        ("7 ResidualY bias bound under confounding", Box::new(residual_y_bound)),
        ("8 determinism", Box::new(|| determinism(root.path()))),
        ("9 figure inventory", Box::new(|| figure_inventory(root.path()))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let outcome = check();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Monte Carlo protocol: `reps` datasets of `n` observations per graph, all
//! six estimators on each, and per-technique distribution summaries.
//!
//! Replications run in parallel. Each one draws from its own substream and
//! results are put in (graph_id, rep, technique) order before aggregation,
//! so output depends only on the [`SimConfig`].

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SimulationError;
use crate::estimators::estimate_all;
use crate::graph::{enumerate_catalog, parse_graph, CatalogEntry, WClass, XyRelation};
use crate::sampler::{draw_dataset, SeedSpec};
use crate::sem::{build_model, population_covariance, population_estimand, EstimandRow};
use crate::technique::Technique;

pub const QUARTILE_CONVENTION: &str = "type7 (linear interpolation between order statistics)";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSelection {
    All,
    Ids(Vec<u32>),
    Notation(String),
}

impl FromStr for GraphSelection {
    type Err = std::convert::Infallible;

    /// `all`, a comma-separated id list such as `1,5,9`, or a graph notation.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(GraphSelection::All);
        }
        let ids: Option<Vec<u32>> = s.split(',').map(|p| p.trim().parse().ok()).collect();
        Ok(match ids {
            Some(ids) => GraphSelection::Ids(ids),
            None => GraphSelection::Notation(s.to_string()),
        })
    }
}

impl GraphSelection {
    /// Resolves to catalog entries in id order.
    pub fn resolve(&self, catalog: &[CatalogEntry]) -> Result<Vec<CatalogEntry>, SimulationError> {
        let mut selected = match self {
            GraphSelection::All => catalog.to_vec(),
            GraphSelection::Ids(ids) => ids
                .iter()
                .map(|&id| {
                    catalog
                        .iter()
                        .find(|e| e.id == id)
                        .cloned()
                        .ok_or(SimulationError::UnknownGraphId(id))
                })
                .collect::<Result<_, _>>()?,
            GraphSelection::Notation(notation) => {
                let graph = parse_graph(notation)?;
                let class = crate::graph::classify(&graph)?;
                vec![catalog
                    .iter()
                    .find(|e| e.class == class)
                    .cloned()
                    .expect("classified graphs are in the catalog")]
            }
        };
        selected.sort_by_key(|e| e.id);
        selected.dedup_by_key(|e| e.id);
        Ok(selected)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub n: usize,
    pub reps: usize,
    pub master_seed: u64,
    pub selection: GraphSelection,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 30,
            reps: 1000,
            master_seed: 0,
            selection: GraphSelection::All,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimulationError> {
        if self.n < 3 {
            return Err(SimulationError::SampleSize(self.n));
        }
        if self.reps < 1 {
            return Err(SimulationError::Replications);
        }
        Ok(())
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            n: self.n,
            reps: self.reps,
            master_seed: self.master_seed,
            quartile_convention: QUARTILE_CONVENTION.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub n: usize,
    pub reps: usize,
    pub master_seed: u64,
    pub quartile_convention: String,
}

/// One estimate; `None` when the technique was degenerate in that replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub graph_id: u32,
    pub notation: String,
    pub technique: Technique,
    pub rep: usize,
    pub estimate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub sd: f64,
}

/// Type-7 quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Five-number summary, mean and sample SD (divisor `count − 1`; 0 for a
/// single value).
pub fn summarize(estimates: &[f64]) -> Result<Summary, SimulationError> {
    if estimates.is_empty() {
        return Err(SimulationError::EmptySample);
    }
    let mut sorted = estimates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let sd = if estimates.len() > 1 {
        (estimates.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(Summary {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
        mean,
        sd,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub graph_id: u32,
    pub notation: String,
    pub w_class: WClass,
    pub xy_relation: XyRelation,
    pub technique: Technique,
    /// Replications with a defined estimate.
    pub count: usize,
    /// `None` when no replication produced an estimate.
    pub stats: Option<Summary>,
    pub true_effect: f64,
    pub population_estimand: Option<f64>,
}

impl SimulationSummary {
    pub fn median_bias(&self) -> Option<f64> {
        self.stats.map(|s| s.median - self.true_effect)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub metadata: Metadata,
    pub raw: Vec<RawRow>,
    pub summaries: Vec<SimulationSummary>,
}

/// Runs every selected catalog graph. Degenerate replications show up as
/// empty estimates and are left out of the summaries.
pub fn run_simulation(config: &SimConfig) -> Result<SimulationOutput, SimulationError> {
    config.validate()?;
    let entries = config.selection.resolve(&enumerate_catalog())?;

    let mut raw = Vec::with_capacity(entries.len() * config.reps * Technique::ALL.len());
    let mut summaries = Vec::with_capacity(entries.len() * Technique::ALL.len());
    for entry in &entries {
        let model = build_model(&entry.graph);
        let estimates: Vec<_> = (0..config.reps)
            .into_par_iter()
            .map(|rep| {
                let seed = SeedSpec::new(config.master_seed, entry.id, rep as u64);
                let data = draw_dataset(&model, config.n, seed).expect("n validated");
                estimate_all(&data)
            })
            .collect();
        for (rep, set) in estimates.iter().enumerate() {
            raw.extend(set.iter().map(|(technique, estimate)| RawRow {
                graph_id: entry.id,
                notation: entry.notation.clone(),
                technique,
                rep,
                estimate,
            }));
        }

        let cov = population_covariance(&model);
        for technique in Technique::ALL {
            let values: Vec<f64> = estimates.iter().filter_map(|s| s.get(technique)).collect();
            summaries.push(SimulationSummary {
                graph_id: entry.id,
                notation: entry.notation.clone(),
                w_class: entry.class.w_class,
                xy_relation: entry.class.xy_relation,
                technique,
                count: values.len(),
                stats: summarize(&values).ok(),
                true_effect: entry.true_effect(),
                population_estimand: population_estimand(&cov, technique),
            });
        }
    }
    raw.sort_by_key(|r| (r.graph_id, r.rep, r.technique));

    Ok(SimulationOutput {
        metadata: config.metadata(),
        raw,
        summaries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub graph_id: u32,
    pub technique: Technique,
    pub median: Option<f64>,
    pub estimand: Option<f64>,
    /// `median − estimand`; `None` when either side is undefined.
    pub gap: Option<f64>,
}

/// Joins simulated medians to the analytic estimand table.
pub fn compare_to_oracle(summaries: &[SimulationSummary], table: &[EstimandRow]) -> Vec<OracleComparison> {
    let estimands: BTreeMap<(u32, Technique), Option<f64>> = table
        .iter()
        .map(|r| ((r.graph_id, r.technique), r.estimand))
        .collect();
    summaries
        .iter()
        .map(|s| {
            let median = s.stats.map(|st| st.median);
            let estimand = estimands.get(&(s.graph_id, s.technique)).copied().flatten();
            OracleComparison {
                graph_id: s.graph_id,
                technique: s.technique,
                median,
                estimand,
                gap: median.zip(estimand).map(|(m, e)| m - e),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub datasets: usize,
    /// Datasets where x and w were collinear, so the lemma does not apply.
    pub skipped: usize,
    pub max_residual_x_gap: f64,
    pub max_residual_xy_gap: f64,
}

/// Checks that ResidualX and ResidualXY reproduce the MultipleRegression
/// slope on `reps` datasets, cycling through the catalog models. Gaps are
/// relative to `max(1, |multiple|)`.
pub fn lemma_check(reps: usize, n: usize, master_seed: u64) -> Result<LemmaReport, SimulationError> {
    if n < 3 {
        return Err(SimulationError::SampleSize(n));
    }
    let catalog = enumerate_catalog();
    let models: Vec<_> = catalog.iter().map(|e| (e.id, build_model(&e.graph))).collect();
    let gaps: Vec<Option<(f64, f64)>> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let (id, model) = &models[i % models.len()];
            let data = draw_dataset(model, n, SeedSpec::new(master_seed, *id, i as u64)).expect("n validated");
            let est = estimate_all(&data);
            let m = est.get(Technique::MultipleRegression)?;
            let scale = m.abs().max(1.0);
            let rx = est.get(Technique::ResidualX)?;
            let rxy = est.get(Technique::ResidualXY)?;
            Some(((m - rx).abs() / scale, (m - rxy).abs() / scale))
        })
        .collect();
    let skipped = gaps.iter().filter(|g| g.is_none()).count();
    let (max_rx, max_rxy) = gaps
        .iter()
        .flatten()
        .fold((0.0f64, 0.0f64), |(a, b), &(x, y)| (a.max(x), b.max(y)));
    Ok(LemmaReport {
        datasets: reps,
        skipped,
        max_residual_x_gap: max_rx,
        max_residual_xy_gap: max_rxy,
    })
}

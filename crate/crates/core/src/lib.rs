//! Statistical adjustment with three continuous variables.
//!
//! The crate enumerates the 33 signed three-variable causal graphs, builds
//! their linear Gaussian structural models, computes exact population
//! estimands for six regression-based adjustment techniques, runs seeded
//! Monte Carlo replications of those techniques and renders the results as
//! boxplot figures.
//!
//! ```
//! use adjsim::{enumerate_catalog, build_model, population_covariance, population_estimand, Technique};
//!
//! let catalog = enumerate_catalog();
//! assert_eq!(catalog.len(), 33);
//! let instrumental = catalog.iter().find(|e| e.notation == "X<-W-Y,X->Y").unwrap();
//! let cov = population_covariance(&build_model(&instrumental.graph));
//! let fitted_x = population_estimand(&cov, Technique::FittedX).unwrap();
//! assert!((fitted_x - instrumental.true_effect()).abs() < 1e-12);
//! ```

pub mod error;
pub mod estimators;
pub mod export;
pub mod graph;
pub mod report;
pub mod sampler;
pub mod sem;
pub mod simulation;
pub mod technique;

pub use error::{DatasetError, EstimationError, GraphError, ReportError, SimulationError};
pub use estimators::{estimate_all, ols_simple, ols_two, EstimateSet, SimpleFit, TwoPredictorFit};
pub use export::{export_simulation, read_raw, read_summary, write_raw, write_summary, Format};
pub use graph::{
    catalog_json, classify, enumerate_catalog, format_graph, parse_graph, CatalogEntry, CausalGraph, EdgeSpec,
    GraphClass, Orientation, Sign, Var, WClass, XyRelation, EDGE_COEFFICIENT, FIGURES,
};
pub use report::{build_figures, figure_file_name, render_figure, BoxGlyph, FigureSpec};
pub use sampler::{draw_dataset, substream_seed, Dataset, SeedSpec};
pub use sem::{
    build_model, estimand_table, population_covariance, population_estimand, write_estimand_csv, EstimandRow,
    PopulationCovariance, StructuralModel,
};
pub use simulation::{
    compare_to_oracle, lemma_check, run_simulation, summarize, GraphSelection, LemmaReport, Metadata, RawRow,
    SimConfig, SimulationOutput, SimulationSummary, Summary,
};
pub use technique::Technique;

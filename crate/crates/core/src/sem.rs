//! Linear Gaussian structural equation models for catalog graphs and their
//! exact population moments.
//!
//! Every present edge carries a coefficient of magnitude `1/√3`. Error
//! standard deviations depend only on the number of parents: 1 for an
//! exogenous variable, `√2/√3` for one parent and `1/√3` for two. With two
//! correlated parents this rule does not keep the child at unit variance
//! (the collider with `X->Y` has `Var(W) = 1 + 2/(3√3)`); the rule is kept
//! as is.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::graph::{CatalogEntry, CausalGraph, Var, WClass, XyRelation};
use crate::technique::Technique;

pub type Matrix3 = [[f64; 3]; 3];

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Error SD for a variable with `parents` causes.
pub fn error_sd_for(parents: usize) -> f64 {
    match parents {
        0 => 1.0,
        1 => 2f64.sqrt() / SQRT_3,
        _ => 1.0 / SQRT_3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralModel {
    coeff: Matrix3,
    error_sd: [f64; 3],
    topo_order: [Var; 3],
}

impl StructuralModel {
    /// `coeff[child][parent]`, indexed by [`Var::index`].
    pub fn coeff(&self) -> &Matrix3 {
        &self.coeff
    }

    pub fn coefficient(&self, child: Var, parent: Var) -> f64 {
        self.coeff[child.index()][parent.index()]
    }

    pub fn error_sd(&self) -> [f64; 3] {
        self.error_sd
    }

    pub fn topo_order(&self) -> [Var; 3] {
        self.topo_order
    }

    /// Replaces the error SDs. Used to propagate noiseless data in tests.
    pub fn with_error_sd(mut self, error_sd: [f64; 3]) -> Self {
        self.error_sd = error_sd;
        self
    }
}

pub fn build_model(graph: &CausalGraph) -> StructuralModel {
    let mut coeff = [[0.0; 3]; 3];
    for edge in graph.directed_edges() {
        coeff[edge.child.index()][edge.parent.index()] = edge.coefficient();
    }
    let error_sd = Var::ALL.map(|v| error_sd_for(graph.parents(v).len()));
    let topo_order = graph
        .topological_order()
        .expect("CausalGraph is acyclic by construction");
    StructuralModel {
        coeff,
        error_sd,
        topo_order,
    }
}

fn det3(m: &Matrix3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Adjugate inverse; `None` for a singular matrix.
pub fn invert3(m: &Matrix3) -> Option<Matrix3> {
    let det = det3(m);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let cofactor = |r: usize, c: usize| {
        let rows = [(r + 1) % 3, (r + 2) % 3];
        let cols = [(c + 1) % 3, (c + 2) % 3];
        m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]]
    };
    let mut inv = [[0.0; 3]; 3];
    for (r, row) in inv.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            // adj[r][c] = cofactor[c][r]; cyclic index choice already carries the sign
            *cell = cofactor(c, r) / det;
        }
    }
    Some(inv)
}

/// Exact covariance of (X, W, Y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationCovariance {
    pub sigma: Matrix3,
}

impl PopulationCovariance {
    pub fn get(&self, a: Var, b: Var) -> f64 {
        self.sigma[a.index()][b.index()]
    }

    pub fn xx(&self) -> f64 {
        self.get(Var::X, Var::X)
    }
    pub fn xw(&self) -> f64 {
        self.get(Var::X, Var::W)
    }
    pub fn xy(&self) -> f64 {
        self.get(Var::X, Var::Y)
    }
    pub fn ww(&self) -> f64 {
        self.get(Var::W, Var::W)
    }
    pub fn wy(&self) -> f64 {
        self.get(Var::W, Var::Y)
    }
    pub fn yy(&self) -> f64 {
        self.get(Var::Y, Var::Y)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.sigma[i][j] == self.sigma[j][i]))
    }

    /// Sylvester's criterion.
    pub fn is_positive_definite(&self) -> bool {
        let s = &self.sigma;
        let m1 = s[0][0];
        let m2 = s[0][0] * s[1][1] - s[0][1] * s[1][0];
        m1 > 0.0 && m2 > 0.0 && det3(s) > 0.0
    }
}

/// `Σ = (I − B)⁻¹ D (I − B)⁻ᵀ` with `D = diag(error_sd²)`.
pub fn population_covariance(model: &StructuralModel) -> PopulationCovariance {
    let mut i_minus_b = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            i_minus_b[r][c] = f64::from(u8::from(r == c)) - model.coeff[r][c];
        }
    }
    let a = invert3(&i_minus_b).expect("I - B is unit triangular up to permutation");
    let d = model.error_sd.map(|s| s * s);
    let mut sigma = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in r..3 {
            let v: f64 = (0..3).map(|k| a[r][k] * d[k] * a[c][k]).sum();
            sigma[r][c] = v;
            sigma[c][r] = v;
        }
    }
    PopulationCovariance { sigma }
}

const DEGENERATE_TOL: f64 = 1e-12;

/// Large-sample limit of each technique's slope, or `None` where the
/// technique has no limit (FittedX with `σ_xw = 0`, or X and W perfectly
/// correlated for the W-conditioning techniques).
pub fn population_estimand(cov: &PopulationCovariance, technique: Technique) -> Option<f64> {
    let (sxx, sxw, sxy, sww, swy) = (cov.xx(), cov.xw(), cov.xy(), cov.ww(), cov.wy());
    match technique {
        Technique::SimpleRegression => (sxx > 0.0).then(|| sxy / sxx),
        Technique::MultipleRegression | Technique::ResidualX | Technique::ResidualXY => {
            let det = sxx * sww - sxw * sxw;
            (det > DEGENERATE_TOL * sxx * sww).then(|| (sxy * sww - swy * sxw) / det)
        }
        Technique::ResidualY => (sxx > 0.0 && sww > 0.0).then(|| (sxy - swy * sxw / sww) / sxx),
        Technique::FittedX => (sxw.abs() > DEGENERATE_TOL).then(|| swy / sxw),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimandRow {
    pub graph_id: u32,
    pub notation: String,
    pub w_class: WClass,
    pub xy_relation: XyRelation,
    pub technique: Technique,
    pub estimand: Option<f64>,
    pub true_effect: f64,
    pub bias: Option<f64>,
}

/// One row per catalog entry and technique, in catalog then technique order.
pub fn estimand_table(catalog: &[CatalogEntry]) -> Vec<EstimandRow> {
    catalog
        .iter()
        .flat_map(|entry| {
            let cov = population_covariance(&build_model(&entry.graph));
            let true_effect = entry.true_effect();
            Technique::ALL.into_iter().map(move |technique| {
                let estimand = population_estimand(&cov, technique);
                EstimandRow {
                    graph_id: entry.id,
                    notation: entry.notation.clone(),
                    w_class: entry.class.w_class,
                    xy_relation: entry.class.xy_relation,
                    technique,
                    estimand,
                    true_effect,
                    bias: estimand.map(|e| e - true_effect),
                }
            })
        })
        .collect()
}

/// Writes the estimand table as CSV; undefined values are empty fields.
pub fn write_estimand_csv<W: Write>(rows: &[EstimandRow], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "graph_id",
        "notation",
        "w_class",
        "xy_relation",
        "technique",
        "estimand",
        "true_effect",
        "bias",
    ])?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for row in rows {
        writer.write_record([
            row.graph_id.to_string(),
            row.notation.clone(),
            row.w_class.to_string(),
            row.xy_relation.to_string(),
            row.technique.to_string(),
            opt(row.estimand),
            row.true_effect.to_string(),
            opt(row.bias),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

//! Seeded sampling of datasets from a [`StructuralModel`].
//!
//! Each replication draws from its own ChaCha8 stream, seeded by
//! [`substream_seed`]. Standard normal deviates come from the ziggurat
//! sampler in `rand_distr`. Variables are generated column by column in
//! topological order, so a replication never depends on any other.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::DatasetError;
use crate::graph::Var;
use crate::sem::StructuralModel;

/// Identifies one replication's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub graph_id: u32,
    pub rep_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, graph_id: u32, rep_index: u64) -> Self {
        SeedSpec {
            master_seed,
            graph_id,
            rep_index,
        }
    }
}

/// SplitMix64 finalizer; a bijection on `u64`.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `splitmix64(splitmix64(master) ^ (graph_id << 32 | rep_index))`.
///
/// For a fixed master seed this is injective over `graph_id < 2^32` and
/// `rep_index < 2^32`.
pub fn substream_seed(seed: SeedSpec) -> u64 {
    let key = (u64::from(seed.graph_id) << 32) | (seed.rep_index & 0xffff_ffff);
    splitmix64(splitmix64(seed.master_seed) ^ key)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    w: Vec<f64>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, w: Vec<f64>, y: Vec<f64>) -> Result<Self, DatasetError> {
        if x.len() != w.len() || x.len() != y.len() {
            return Err(DatasetError::LengthMismatch {
                x: x.len(),
                w: w.len(),
                y: y.len(),
            });
        }
        if x.len() < 3 {
            return Err(DatasetError::TooFewObservations(x.len()));
        }
        for (column, values) in [("x", &x), ("w", &w), ("y", &y)] {
            if let Some(row) = values.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite { column, row });
            }
        }
        Ok(Dataset { x, w, y })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn column(&self, v: Var) -> &[f64] {
        match v {
            Var::X => &self.x,
            Var::W => &self.w,
            Var::Y => &self.y,
        }
    }

    /// Empirical covariance (divisor n − 1), indexed by [`Var::index`].
    pub fn covariance(&self) -> [[f64; 3]; 3] {
        let n = self.n() as f64;
        let cols = [&self.x, &self.w, &self.y];
        let means = cols.map(|c| c.iter().sum::<f64>() / n);
        let mut cov = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let s: f64 = cols[i]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(a, b)| (a - means[i]) * (b - means[j]))
                    .sum();
                cov[i][j] = s / (n - 1.0);
                cov[j][i] = cov[i][j];
            }
        }
        cov
    }

    /// CSV with header `x,w,y`; values are written in shortest round-trip form.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["x", "w", "y"])?;
        for i in 0..self.n() {
            writer.write_record([self.x[i].to_string(), self.w[i].to_string(), self.y[i].to_string()])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Draws `n` observations of (X, W, Y). Pure in `(model, n, seed)`.
pub fn draw_dataset(model: &StructuralModel, n: usize, seed: SeedSpec) -> Result<Dataset, DatasetError> {
    if n < 3 {
        return Err(DatasetError::TooFewObservations(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed));
    let mut cols: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for v in model.topo_order() {
        let c = v.index();
        let sd = model.error_sd()[c];
        let coeff = model.coeff()[c];
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            let mut value = sd * z;
            for (p, &b) in coeff.iter().enumerate() {
                if b != 0.0 {
                    value += b * cols[p][i];
                }
            }
            values.push(value);
        }
        cols[c] = values;
    }
    let [x, w, y] = cols;
    Dataset::new(x, w, y)
}

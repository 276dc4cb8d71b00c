//! Closed-form least squares and the six adjustment estimators.
//!
//! Every regression includes an intercept, computed on mean-centered data.

use crate::error::EstimationError;
use crate::sampler::Dataset;
use crate::technique::Technique;

/// Relative determinant below which two predictors count as collinear.
pub const COLLINEARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPredictorFit {
    pub slope1: f64,
    pub slope2: f64,
    pub intercept: f64,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<(), EstimationError> {
    if a.len() != b.len() {
        return Err(EstimationError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 3 {
        return Err(EstimationError::TooFewObservations(a.len()));
    }
    Ok(())
}

/// Centered cross products `Σ(a−ā)(b−b̄)`.
fn cross(a: &[f64], a_mean: f64, b: &[f64], b_mean: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - a_mean) * (y - b_mean)).sum()
}

/// Whether the centered spread of `v` is lost in rounding noise.
fn is_constant(v: &[f64], v_mean: f64, ss: f64) -> bool {
    let scale = v.iter().fold(v_mean.abs(), |m, x| m.max(x.abs()));
    ss == 0.0 || (ss / v.len() as f64).sqrt() <= 4.0 * f64::EPSILON * scale
}

/// Regresses `response` on `predictor`.
pub fn ols_simple(response: &[f64], predictor: &[f64]) -> Result<SimpleFit, EstimationError> {
    check_lengths(response, predictor)?;
    let (r_mean, p_mean) = (mean(response), mean(predictor));
    let spp = cross(predictor, p_mean, predictor, p_mean);
    if is_constant(predictor, p_mean, spp) {
        return Err(EstimationError::DegeneratePredictor);
    }
    let slope = cross(predictor, p_mean, response, r_mean) / spp;
    let intercept = r_mean - slope * p_mean;
    let fitted: Vec<f64> = predictor.iter().map(|p| intercept + slope * p).collect();
    let residuals = response.iter().zip(&fitted).map(|(r, f)| r - f).collect();
    Ok(SimpleFit {
        slope,
        intercept,
        residuals,
        fitted,
    })
}

/// Regresses `response` on `p1` and `p2` via the centered 2×2 normal equations.
pub fn ols_two(response: &[f64], p1: &[f64], p2: &[f64]) -> Result<TwoPredictorFit, EstimationError> {
    check_lengths(response, p1)?;
    check_lengths(response, p2)?;
    let (r_mean, m1, m2) = (mean(response), mean(p1), mean(p2));
    let s11 = cross(p1, m1, p1, m1);
    let s22 = cross(p2, m2, p2, m2);
    let s12 = cross(p1, m1, p2, m2);
    let s1r = cross(p1, m1, response, r_mean);
    let s2r = cross(p2, m2, response, r_mean);
    let det = s11 * s22 - s12 * s12;
    if is_constant(p1, m1, s11) || is_constant(p2, m2, s22) || det < COLLINEARITY_TOL * s11 * s22 {
        return Err(EstimationError::Collinear);
    }
    let slope1 = (s1r * s22 - s2r * s12) / det;
    let slope2 = (s2r * s11 - s1r * s12) / det;
    Ok(TwoPredictorFit {
        slope1,
        slope2,
        intercept: r_mean - slope1 * m1 - slope2 * m2,
    })
}

/// Slope estimates of all six techniques for one dataset. A technique that
/// is degenerate on this dataset holds its error; the others are unaffected.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSet {
    values: [Result<f64, EstimationError>; 6],
}

impl EstimateSet {
    pub fn get(&self, technique: Technique) -> Option<f64> {
        self.values[technique.index()].as_ref().ok().copied()
    }

    pub fn result(&self, technique: Technique) -> &Result<f64, EstimationError> {
        &self.values[technique.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Technique, Option<f64>)> + '_ {
        Technique::ALL.into_iter().map(|t| (t, self.get(t)))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn estimate_all(data: &Dataset) -> EstimateSet {
    let (x, w, y) = (data.x(), data.w(), data.y());
    let x_on_w = ols_simple(x, w);
    let y_on_w = ols_simple(y, w);

    let simple = ols_simple(y, x).map(|f| f.slope);
    let multiple = ols_two(y, x, w).map(|f| f.slope1);
    let residual_x = x_on_w
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|xw| ols_simple(y, &xw.residuals))
        .map(|f| f.slope);
    let residual_y = y_on_w
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|yw| ols_simple(&yw.residuals, x))
        .map(|f| f.slope);
    let residual_xy = match (&x_on_w, &y_on_w) {
        (Ok(xw), Ok(yw)) => ols_simple(&yw.residuals, &xw.residuals).map(|f| f.slope),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    let fitted_x = x_on_w
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|xw| ols_simple(y, &xw.fitted))
        .map(|f| f.slope);

    EstimateSet {
        values: [simple, multiple, residual_x, residual_y, residual_xy, fitted_x],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_catalog;
    use crate::sampler::{draw_dataset, SeedSpec};
    use crate::sem::build_model;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let fit = ols_simple(&[-2.0, 0.0, 2.0], &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(fit.slope, 2.0);
        assert_eq!(fit.intercept, 0.0);
    }

    #[test]
    fn constant_response_has_zero_slope() {
        let fit = ols_simple(&[4.0; 5], &[1.0, 2.0, 3.0, 5.0, 8.0]).unwrap();
        assert_eq!(fit.slope, 0.0);
    }

    #[test]
    fn hand_computed_slope() {
        // Σ(p−p̄)(r−r̄) = 3, Σ(p−p̄)² = 5
        let fit = ols_simple(&[2.0, 1.0, 4.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((fit.slope - 0.6).abs() < 1e-15);
        for i in 0..4 {
            let r = fit.fitted[i] + fit.residuals[i];
            assert!((r - [2.0, 1.0, 4.0, 3.0][i]).abs() < 1e-12 * 4.0);
        }
    }

    #[test]
    fn degenerate_predictor() {
        assert_eq!(ols_simple(&[1.0, 2.0, 3.0], &[0.1, 0.1, 0.1]), Err(EstimationError::DegeneratePredictor));
        assert_eq!(ols_simple(&[1.0, 2.0], &[0.0, 1.0]), Err(EstimationError::TooFewObservations(2)));
        assert_eq!(ols_simple(&[1.0, 2.0, 3.0], &[0.0, 1.0]), Err(EstimationError::LengthMismatch(3, 2)));
    }

    #[test]
    fn orthogonal_two_predictor_fit() {
        let p1 = [1.0, -1.0, 0.0, 0.0];
        let p2 = [0.0, 0.0, 1.0, -1.0];
        let r: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| 2.0 * a + 3.0 * b).collect();
        let fit = ols_two(&r, &p1, &p2).unwrap();
        assert!((fit.slope1 - 2.0).abs() < 1e-15);
        assert!((fit.slope2 - 3.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_predictors() {
        let p = [1.0, 2.0, 4.0, 7.0];
        assert_eq!(ols_two(&[1.0, 0.0, 1.0, 0.0], &p, &p), Err(EstimationError::Collinear));
        let scaled: Vec<f64> = p.iter().map(|v| -3.0 * v + 1.0).collect();
        assert_eq!(ols_two(&[1.0, 0.0, 1.0, 0.0], &p, &scaled), Err(EstimationError::Collinear));
    }

    #[test]
    fn response_equal_to_first_predictor() {
        let p1 = [0.3, -1.2, 2.5, 0.7, -0.4];
        let p2 = [1.0, 0.5, -0.5, 2.0, 0.1];
        let fit = ols_two(&p1, &p1, &p2).unwrap();
        assert!((fit.slope1 - 1.0).abs() < 1e-12);
        assert!(fit.slope2.abs() < 1e-12);
    }

    #[test]
    fn orthogonal_w_makes_multiple_equal_simple() {
        // centered x and w with Σxw = 0
        let x = vec![1.0, -1.0, 1.0, -1.0];
        let w = vec![1.0, 1.0, -1.0, -1.0];
        let y = vec![2.0, -0.5, 0.3, 1.1];
        let est = estimate_all(&Dataset::new(x, w, y).unwrap());
        let (s, m) = (est.get(Technique::SimpleRegression).unwrap(), est.get(Technique::MultipleRegression).unwrap());
        assert!((s - m).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_w_y_makes_residual_y_equal_simple() {
        let w = vec![1.0, 1.0, -1.0, -1.0];
        let y = vec![1.0, -1.0, 1.0, -1.0];
        let x = vec![0.4, -2.0, 1.3, 0.2];
        let est = estimate_all(&Dataset::new(x, w, y).unwrap());
        let (s, r) = (est.get(Technique::SimpleRegression).unwrap(), est.get(Technique::ResidualY).unwrap());
        assert!((s - r).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fitted_x_is_isolated() {
        // w orthogonal to x: x~w slope is exactly 0, fitted values constant
        let x = vec![1.0, -1.0, 1.0, -1.0];
        let w = vec![1.0, 1.0, -1.0, -1.0];
        let y = vec![0.5, 0.1, -0.7, 0.2];
        let est = estimate_all(&Dataset::new(x, w, y).unwrap());
        assert_eq!(est.result(Technique::FittedX), &Err(EstimationError::DegeneratePredictor));
        assert_eq!(est.iter().filter(|(_, v)| v.is_some()).count(), 5);
        assert_eq!(est.len(), 6);
    }

    #[test]
    fn constant_w_voids_only_w_techniques() {
        let x = vec![1.0, 2.0, 0.5, 3.0];
        let w = vec![2.0; 4];
        let y = vec![0.5, 0.1, -0.7, 0.2];
        let est = estimate_all(&Dataset::new(x, w, y).unwrap());
        assert!(est.get(Technique::SimpleRegression).is_some());
        for t in [Technique::MultipleRegression, Technique::ResidualX, Technique::ResidualY, Technique::ResidualXY, Technique::FittedX] {
            assert!(est.get(t).is_none(), "{t}");
        }
    }

    #[test]
    fn residuals_orthogonal_to_w() {
        let catalog = enumerate_catalog();
        for e in &catalog {
            let d = draw_dataset(&build_model(&e.graph), 30, SeedSpec::new(5, e.id, 0)).unwrap();
            for target in [d.x(), d.y()] {
                let fit = ols_simple(target, d.w()).unwrap();
                let wm = mean(d.w());
                let rm = mean(&fit.residuals);
                let c = cross(&fit.residuals, rm, d.w(), wm);
                let norm = (cross(&fit.residuals, rm, &fit.residuals, rm) * cross(d.w(), wm, d.w(), wm)).sqrt();
                assert!((c / norm).abs() < 1e-12);
            }
        }
    }

    fn column(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, n)
    }

    fn dataset() -> impl Strategy<Value = Dataset> {
        (3usize..40)
            .prop_flat_map(|n| (column(n), column(n), column(n)))
            .prop_filter_map("degenerate", |(x, w, y)| {
                let d = Dataset::new(x, w, y).ok()?;
                let (xm, wm) = (mean(d.x()), mean(d.w()));
                let sxx = cross(d.x(), xm, d.x(), xm);
                let sww = cross(d.w(), wm, d.w(), wm);
                let sxw = cross(d.x(), xm, d.w(), wm);
                let r2 = sxw * sxw / (sxx * sww);
                (sxx > 1e-6 && sww > 1e-6 && r2 > 1e-6 && r2 < 0.999).then_some(d)
            })
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }

    proptest! {
        #[test]
        fn lemma_three_estimators_agree(d in dataset()) {
            let est = estimate_all(&d);
            let m = est.get(Technique::MultipleRegression).unwrap();
            prop_assert!(rel(m, est.get(Technique::ResidualX).unwrap()) < 1e-9);
            prop_assert!(rel(m, est.get(Technique::ResidualXY).unwrap()) < 1e-9);
        }

        #[test]
        fn scale_equivariance(d in dataset(), c in prop_oneof![-5.0f64..-0.2, 0.2f64..5.0]) {
            let base = estimate_all(&d);
            let ys: Vec<f64> = d.y().iter().map(|v| v * c).collect();
            let scaled_y = estimate_all(&Dataset::new(d.x().to_vec(), d.w().to_vec(), ys).unwrap());
            let xs: Vec<f64> = d.x().iter().map(|v| v * c).collect();
            let scaled_x = estimate_all(&Dataset::new(xs, d.w().to_vec(), d.y().to_vec()).unwrap());
            for t in Technique::ALL {
                let b = base.get(t).unwrap();
                prop_assert!(rel(scaled_y.get(t).unwrap(), b * c) < 1e-9, "{} y-scale", t);
                prop_assert!(rel(scaled_x.get(t).unwrap(), b / c) < 1e-9, "{} x-scale", t);
            }
        }

        #[test]
        fn translation_invariance(d in dataset(), a in -50.0f64..50.0, b in -50.0f64..50.0, c in -50.0f64..50.0) {
            let base = estimate_all(&d);
            let shift = |v: &[f64], k: f64| v.iter().map(|x| x + k).collect::<Vec<_>>();
            let moved = estimate_all(&Dataset::new(shift(d.x(), a), shift(d.w(), b), shift(d.y(), c)).unwrap());
            for t in Technique::ALL {
                prop_assert!(rel(moved.get(t).unwrap(), base.get(t).unwrap()) < 1e-8, "{}", t);
            }
        }

        #[test]
        fn fitted_x_is_ratio_of_slopes(d in dataset()) {
            let fx = estimate_all(&d).get(Technique::FittedX).unwrap();
            let ratio = ols_simple(d.y(), d.w()).unwrap().slope / ols_simple(d.x(), d.w()).unwrap().slope;
            prop_assert!(rel(fx, ratio) < 1e-9);
        }
    }
}

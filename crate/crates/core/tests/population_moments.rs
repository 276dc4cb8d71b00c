//! Empirical moments of large samples against the analytic covariance.

use adjsim::{build_model, draw_dataset, enumerate_catalog, population_covariance, SeedSpec};

#[test]
fn large_sample_covariance_matches_population() {
    // one graph per figure; the acceptance suite covers all 33
    for entry in enumerate_catalog().iter().step_by(3) {
        let model = build_model(&entry.graph);
        let sigma = population_covariance(&model).sigma;
        let data = draw_dataset(&model, 1_000_000, SeedSpec::new(77, entry.id, 0)).unwrap();
        let empirical = data.covariance();
        for i in 0..3 {
            for j in 0..3 {
                let gap = (empirical[i][j] - sigma[i][j]).abs();
                assert!(gap < 0.01, "{} [{i}][{j}] gap {gap}", entry.notation);
            }
        }
    }
}

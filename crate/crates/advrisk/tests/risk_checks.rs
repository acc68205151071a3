//! Cross-checks between the closed-form risks, the Monte Carlo estimators,
//! and the exact per-sample identities that hold in integer arithmetic.

mod common;

use advrisk::model::{
    sample_mixture, sample_squares, Dataset, DistributionId, GaussianMixture, LinearClassifier,
    PerturbationBudget,
};
use advrisk::numerics::{dual_norm, logistic_loss, NormKind};
use advrisk::risk::{
    cf_excess_adv_risk, cf_new_adv_risk_bound, cf_standard_risk, cf_worst_case_adv_risk, mc_risk,
    mc_risk_sampled, Loss, RiskFamily,
};
use common::TestRng;

fn linf(eps: f64) -> PerturbationBudget {
    PerturbationBudget::new(NormKind::LInf, eps).unwrap()
}

#[test]
fn closed_forms_agree_with_monte_carlo() {
    let configs = [
        (vec![1.0, 0.5], vec![0.8, 0.7], 1.0, 0.3, NormKind::LInf),
        (vec![-0.3, 1.2, 0.4], vec![0.5, 0.9, -0.2], 0.8, 0.5, NormKind::L2),
        (vec![0.6, -0.6], vec![1.5, 0.0], 1.5, 0.7, NormKind::LInf),
    ];
    for (w, w_star, sigma, eps, kind) in configs {
        let f = LinearClassifier::new(w).unwrap();
        let model = GaussianMixture::new(w_star, sigma).unwrap();
        let budget = PerturbationBudget::new(kind, eps).unwrap();
        let n = 200_000;
        let pairs = [
            (cf_standard_risk(&f, &model).unwrap(), RiskFamily::Standard),
            (cf_worst_case_adv_risk(&f, &model, budget).unwrap(), RiskFamily::WorstCase),
            (cf_excess_adv_risk(&f, &model, budget).unwrap(), RiskFamily::GAdv),
        ];
        for (cf, family) in pairs {
            let mc =
                mc_risk_sampled(family, &f, None, &model, n, 99, budget, Loss::ZeroOne).unwrap();
            assert!(
                (cf.value - mc.value).abs() <= 4.0 * mc.std_err,
                "{:?}: cf {} vs mc {} (se {})",
                family,
                cf.value,
                mc.value,
                mc.std_err
            );
        }
    }
}

#[test]
fn excess_plus_standard_equals_worst_case_exactly() {
    let mut rng = TestRng::new(2024);
    for trial in 0..20 {
        let d = 2 + trial % 4;
        let f = LinearClassifier::new(rng.vector(d, -1.5, 1.5)).unwrap();
        let model = GaussianMixture::new(rng.vector(d, -1.0, 1.0), rng.range(0.5, 1.5)).unwrap();
        let kind = if trial % 2 == 0 { NormKind::LInf } else { NormKind::L2 };
        let budget = PerturbationBudget::new(kind, rng.range(0.0, 1.0)).unwrap();

        // Per sample: on a singleton dataset each mean is the 0/1 loss itself,
        // so the identity must hold bit for bit.
        let full = sample_mixture(&model, 256, trial as u64).unwrap();
        for (x, y) in full.iter().take(40) {
            let one =
                Dataset::from_parts(vec![x.to_vec()], vec![y], DistributionId::External, 0)
                    .unwrap();
            let std =
                mc_risk(RiskFamily::Standard, &f, None, &one, budget, Loss::ZeroOne).unwrap();
            let gadv = mc_risk(RiskFamily::GAdv, &f, None, &one, budget, Loss::ZeroOne).unwrap();
            let worst =
                mc_risk(RiskFamily::WorstCase, &f, None, &one, budget, Loss::ZeroOne).unwrap();
            assert_eq!(std.value + gadv.value, worst.value, "trial {trial}");
        }

        // In aggregate: the error counts obey the identity as exact integers.
        // Each reported mean is count/n rounded once, so multiplying back by n
        // recovers the count without ambiguity.
        let count = |family| {
            let report = mc_risk(family, &f, None, &full, budget, Loss::ZeroOne).unwrap();
            (report.value * full.len() as f64).round() as i64
        };
        let std_n = count(RiskFamily::Standard);
        let gadv_n = count(RiskFamily::GAdv);
        let worst_n = count(RiskFamily::WorstCase);
        assert_eq!(std_n + gadv_n, worst_n, "trial {trial}");
        // With n a power of two every division above is exact, so the means
        // themselves also match bit for bit.
        let std = mc_risk(RiskFamily::Standard, &f, None, &full, budget, Loss::ZeroOne).unwrap();
        let gadv = mc_risk(RiskFamily::GAdv, &f, None, &full, budget, Loss::ZeroOne).unwrap();
        let worst = mc_risk(RiskFamily::WorstCase, &f, None, &full, budget, Loss::ZeroOne).unwrap();
        assert_eq!(std.value + gadv.value, worst.value, "trial {trial}");
    }
}

#[test]
fn base_relative_risk_of_the_base_classifier_is_exactly_zero() {
    let model = GaussianMixture::new(vec![1.0, -0.7, 0.3], 0.9).unwrap();
    let g = LinearClassifier::new(vec![0.8, -0.5, 0.4]).unwrap();
    let data = sample_mixture(&model, 30_000, 5).unwrap();
    for eps in [0.1, 0.5, 2.0] {
        let r = mc_risk(RiskFamily::RAdv, &g, Some(&g), &data, linf(eps), Loss::ZeroOne).unwrap();
        assert_eq!(r.value, 0.0, "eps = {eps}");
        assert_eq!(r.std_err, 0.0, "eps = {eps}");
    }
    let squares = sample_squares(30_000, 6).unwrap();
    let g2 = LinearClassifier::new(vec![1.0, 0.2]).unwrap();
    let r = mc_risk(RiskFamily::RAdv, &g2, Some(&g2), &squares, linf(0.8), Loss::ZeroOne).unwrap();
    assert_eq!(r.value, 0.0);
}

#[test]
fn constrained_flips_are_a_subset_of_unconstrained_flips() {
    let mut rng = TestRng::new(31);
    for trial in 0..10 {
        let d = 2 + trial % 3;
        let f = LinearClassifier::new(rng.vector(d, -1.0, 1.0)).unwrap();
        let g = LinearClassifier::new(rng.vector(d, -1.0, 1.0)).unwrap();
        let model = GaussianMixture::new(rng.vector(d, -1.0, 1.0), 1.0).unwrap();
        let data = sample_mixture(&model, 5000, 100 + trial as u64).unwrap();
        let budget = linf(rng.range(0.1, 1.0));
        let radv = mc_risk(RiskFamily::RAdv, &f, Some(&g), &data, budget, Loss::ZeroOne).unwrap();
        let hadv = mc_risk(RiskFamily::HAdv, &f, Some(&g), &data, budget, Loss::ZeroOne).unwrap();
        assert!(radv.value <= hadv.value, "trial {trial}: {} > {}", radv.value, hadv.value);
    }
}

#[test]
fn closed_form_bound_sits_above_the_monte_carlo_estimate() {
    let mut rng = TestRng::new(47);
    for trial in 0..8 {
        let d = 2 + trial % 4;
        let w_star = rng.vector(d, -1.0, 1.0);
        // Perturb the Bayes direction so the bound is nontrivial.
        let w: Vec<f64> = w_star.iter().map(|v| v + rng.range(-0.3, 0.3)).collect();
        let f = LinearClassifier::new(w).unwrap();
        let model = GaussianMixture::new(w_star, rng.range(0.6, 1.4)).unwrap();
        let g = advrisk::model::bayes_classifier(&model).unwrap();
        let budget = linf(rng.range(0.05, 0.6));
        let bound = cf_new_adv_risk_bound(&f, &model, budget).unwrap();
        assert!(bound.is_upper_bound);
        let mc = mc_risk_sampled(
            RiskFamily::RAdv,
            &f,
            Some(&g),
            &model,
            100_000,
            trial as u64,
            budget,
            Loss::ZeroOne,
        )
        .unwrap();
        assert!(
            mc.value <= bound.value + 3.0 * mc.std_err,
            "trial {trial}: mc {} above bound {} (se {})",
            mc.value,
            bound.value,
            mc.std_err
        );
    }
}

#[test]
fn logistic_excess_equals_the_margin_drop_formula() {
    let x = vec![0.7, -0.4, 1.1];
    let y = 1.0;
    let data =
        Dataset::from_parts(vec![x.clone()], vec![y], DistributionId::External, 0).unwrap();
    let f = LinearClassifier::new(vec![0.9, 0.2, -0.5]).unwrap();
    for (kind, eps) in [(NormKind::LInf, 0.4), (NormKind::L2, 0.4), (NormKind::LInf, 0.0)] {
        let budget = PerturbationBudget::new(kind, eps).unwrap();
        let got = mc_risk(RiskFamily::GAdv, &f, None, &data, budget, Loss::Logistic)
            .unwrap()
            .value;
        let margin: f64 = y * f.w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        let drop = eps * dual_norm(&f.w, kind).unwrap();
        let want = logistic_loss(margin - drop) - logistic_loss(margin);
        assert!((got - want).abs() <= 1e-12, "{kind:?} eps {eps}: {got} vs {want}");
    }
}

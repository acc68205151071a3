//! Training behavior: gradient correctness against finite differences,
//! objective descent, the documented risk levels on the two-squares data,
//! and the low-dimensional invariance properties.

mod common;

use advrisk::model::{sample_mixture, sample_squares, GaussianMixture, PerturbationBudget};
use advrisk::numerics::NormKind;
use advrisk::risk::{mc_risk, Loss, RiskFamily};
use advrisk::train::{
    check_gradient, restricted_class_check, train, train_standard, verify_lowdim_invariance, Init,
    TrainConfig,
};
use common::TestRng;

fn linf(eps: f64) -> PerturbationBudget {
    PerturbationBudget::new(NormKind::LInf, eps).unwrap()
}

#[test]
fn gradient_matches_finite_differences_on_fifty_instances() {
    let mut rng = TestRng::new(0x97ad);
    for trial in 0..50 {
        let d = 2 + trial % 4;
        let n = 10 + rng.below(50);
        let model = GaussianMixture::new(rng.vector(d, -1.0, 1.0), rng.range(0.5, 1.5)).unwrap();
        let data = sample_mixture(&model, n, trial as u64).unwrap();
        let kind = if trial % 2 == 0 { NormKind::LInf } else { NormKind::L2 };
        let lambda = [0.0, 0.5, 2.0][trial % 3];
        let budget = PerturbationBudget::new(kind, rng.range(0.0, 1.0)).unwrap();
        let cfg = TrainConfig::new(lambda, budget);
        // Coordinates bounded away from zero keep the L1 subgradient smooth
        // within the finite-difference stencil.
        let w: Vec<f64> =
            (0..d).map(|_| rng.range(0.2, 1.5) * if rng.f64() < 0.5 { -1.0 } else { 1.0 }).collect();
        let rel = check_gradient(&data, &cfg, &w, 1e-5).unwrap();
        let cap = if lambda == 0.0 { 1e-6 } else { 1e-5 };
        assert!(rel <= cap, "trial {trial}: relative error {rel:e} over {cap:e}");
    }
}

#[test]
fn squares_training_reaches_the_bayes_level_inside_the_margin() {
    let data = sample_squares(100_000, 8).unwrap();
    let cfg = TrainConfig::new(1.0, linf(0.5));
    let result = train(&data, &cfg).unwrap();
    let eval = sample_squares(200_000, 9).unwrap();
    let risk =
        mc_risk(RiskFamily::Standard, &result.w_final, None, &eval, cfg.budget, Loss::ZeroOne)
            .unwrap();
    assert!(
        (risk.value - 0.30).abs() <= 0.01,
        "standard risk {} strays from 0.30",
        risk.value
    );
}

#[test]
fn final_objective_never_exceeds_the_initial_one_on_the_figure_grid() {
    let data = sample_squares(20_000, 12).unwrap();
    let mut violations = Vec::new();
    for (eps, lambda) in
        [(0.25, 0.1), (0.25, 1.0), (0.5, 0.1), (0.5, 1.0), (1.0, 0.1), (1.0, 1.0), (1.5, 10.0)]
    {
        let result = train(&data, &TrainConfig::new(lambda, linf(eps))).unwrap();
        let first = result.objective_history[0];
        let last = *result.objective_history.last().unwrap();
        if last > first {
            violations.push(format!("eps {eps}, lambda {lambda}: objective went {first} -> {last}"));
        }
    }
    assert!(violations.is_empty(), "{violations:?}");
}

#[test]
fn standard_risk_rises_with_lambda_beyond_the_margin() {
    let data = sample_squares(100_000, 21).unwrap();
    let eval = sample_squares(400_000, 22).unwrap();
    let mut measured = Vec::new();
    for lambda in [0.1, 1.0, 10.0] {
        let cfg = TrainConfig::new(lambda, linf(1.5));
        let result = train(&data, &cfg).unwrap();
        let risk =
            mc_risk(RiskFamily::Standard, &result.w_final, None, &eval, cfg.budget, Loss::ZeroOne)
                .unwrap();
        measured.push((lambda, risk.value, risk.std_err));
    }
    let (_, lo_risk, lo_se) = measured[0];
    let (_, hi_risk, hi_se) = measured[2];
    let band = 3.0 * (lo_se.powi(2) + hi_se.powi(2)).sqrt();
    assert!(
        hi_risk >= lo_risk + band,
        "risk(lambda=10) = {hi_risk} is not separated above risk(lambda=0.1) = {lo_risk} \
         by {band} (full sweep: {measured:?})"
    );
}

#[test]
fn off_support_coordinates_never_move_under_gaussian_init() {
    let k = 4;
    let d = 40;
    let head = 2.5 / (k as f64).sqrt();
    let mut w_star = vec![0.0; d];
    let mut mask = vec![false; d];
    for i in 0..k {
        w_star[i] = head;
        mask[i] = true;
    }
    let model = GaussianMixture::with_mask(w_star, 1.0, Some(mask)).unwrap();
    let data = sample_mixture(&model, 10_000, 31).unwrap();
    let mut cfg = TrainConfig::new(0.0, linf(0.0));
    cfg.init = Init::Gaussian { scale: 1.0 / ((d - k) as f64).sqrt(), seed: 77 };
    let rep = verify_lowdim_invariance(&model, &cfg, &data, 200_000, 32).unwrap();
    assert_eq!(rep.max_off_support_drift, 0.0);
    assert!(rep.heldout_standard.value < 0.05, "held-out risk {}", rep.heldout_standard.value);
    assert!(
        rep.radv_vs_bayes.value >= 0.95 - 3.0 * rep.radv_vs_bayes.std_err,
        "base-relative adversarial risk {}",
        rep.radv_vs_bayes.value
    );
}

#[test]
fn zeros_init_leaves_no_off_support_mass_to_exploit() {
    let k = 4;
    let d = 40;
    let head = 2.5 / (k as f64).sqrt();
    let mut w_star = vec![0.0; d];
    let mut mask = vec![false; d];
    for i in 0..k {
        w_star[i] = head;
        mask[i] = true;
    }
    let model = GaussianMixture::with_mask(w_star, 1.0, Some(mask)).unwrap();
    let data = sample_mixture(&model, 10_000, 33).unwrap();
    let cfg = TrainConfig::new(0.0, linf(0.0));
    let rep = verify_lowdim_invariance(&model, &cfg, &data, 200_000, 34).unwrap();
    assert_eq!(rep.max_off_support_drift, 0.0);
    for &v in &rep.train.w_final.w[k..] {
        assert_eq!(v, 0.0);
    }
    assert_eq!(
        rep.radv_vs_bayes.value, 0.0,
        "base-relative adversarial risk should vanish without off-support mass"
    );
}

#[test]
fn lambda_zero_training_is_bit_identical_to_the_standard_path() {
    let data = sample_squares(1500, 40).unwrap();
    let mut cfg = TrainConfig::new(0.0, PerturbationBudget::new(NormKind::L2, 0.8).unwrap());
    cfg.iters = 300;
    cfg.record_trace = true;
    let joint = train(&data, &cfg).unwrap();
    let standard = train_standard(&data, &cfg).unwrap();
    assert_eq!(joint.w_final.w, standard.w_final.w);
    assert_eq!(joint.objective_history, standard.objective_history);
    assert_eq!(joint.trace, standard.trace);
}

#[test]
fn restricted_class_check_at_scale() {
    let d = 100;
    let wv = 1.0 / ((d / 2) as f64).sqrt();
    let model = GaussianMixture::new(vec![wv; d], 1.0).unwrap();
    let rep = restricted_class_check(&model, d / 2, 200_000, 51).unwrap();
    assert!((rep.gap - 0.080005).abs() <= 1e-6, "gap {}", rep.gap);
    assert!(rep.gap < 0.1);
    let c = rep.smallest_c.expect("some C below 5 reaches 0.95");
    assert!((0.25..=5.0).contains(&c), "smallest C = {c}");
    // The event probability is monotone in C.
    for pair in rep.event_probs.windows(2) {
        assert!(pair[1].1 >= pair[0].1 - 1e-12);
    }
}

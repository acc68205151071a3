//! Command-line experiment runner: reproducible built-in checks, the
//! standard-risk-vs-eps figure sweep, a λ tradeoff sweep, one-shot risk
//! tables, and adversarial training runs, all emitting CSV (and SVG plots
//! next to file outputs).
//!
//! Every command derives per-cell seeds from `--seed` deterministically, so
//! identical invocations produce byte-identical CSV. The experiment drivers
//! are plain functions over parsed values, reusable from integration tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::model::{
    bayes_classifier, sample_mixture, sample_squares, GaussianMixture, LinearClassifier,
    PerturbationBudget,
};
use crate::numerics::{self, normal_cdf, NormKind};
use crate::plot::LinePlot;
use crate::risk::{
    cf_excess_adv_risk, cf_new_adv_risk_bound, cf_standard_risk, cf_worst_case_adv_risk,
    check_reg_bounds, mc_risk, mc_risk_sampled, Loss, RiskFamily, RiskReport,
};
use crate::rng::mix_seed;
use crate::train::{restricted_class_check, train, Init, TrainConfig};
use crate::{Error, Result};

/// Seed for grid cell `index` (1-based), decorrelated from the base seed
/// and from every other cell.
fn cell_seed(seed: u64, index: u64) -> u64 {
    seed ^ mix_seed(index)
}

// ---------------------------------------------------------------------------
// Flag parsing

/// A parsed numeric grid (one or more values).
#[derive(Debug, Clone)]
pub struct Grid(pub Vec<f64>);

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("not a number: {s:?}"))
}

/// Accepts a single real or an `a:b:step` inclusive range.
fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => Ok(vec![parse_real(parts[0])?]),
        3 => {
            let a = parse_real(parts[0])?;
            let b = parse_real(parts[1])?;
            let step = parse_real(parts[2])?;
            if !(step > 0.0) {
                return Err(format!("grid step must be > 0, got {step}"));
            }
            if b < a {
                return Err(format!("grid end {b} is below start {a}"));
            }
            let mut grid = Vec::new();
            let mut i = 0u32;
            loop {
                let v = a + step * i as f64;
                if v > b + 1e-12 {
                    break;
                }
                grid.push(v);
                i += 1;
            }
            Ok(grid)
        }
        _ => Err(format!("expected a number or a:b:step, got {s:?}")),
    }
}

/// Accepts a single real or a comma-separated list.
fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(parse_real).collect()
}

fn check_range(values: &[f64], lo: f64, hi: f64, what: &str) -> std::result::Result<(), String> {
    match values.iter().find(|v| !v.is_finite() || **v < lo || **v > hi) {
        Some(v) => Err(format!("{what} value {v} is outside [{lo}, {hi}]")),
        None => Ok(()),
    }
}

fn parse_fig_eps(s: &str) -> std::result::Result<Grid, String> {
    let g = parse_grid(s)?;
    check_range(&g, 0.0, 3.0, "eps")?;
    Ok(Grid(g))
}

fn parse_fig_lambda(s: &str) -> std::result::Result<Grid, String> {
    let g = parse_list(s)?;
    check_range(&g, 0.0, 100.0, "lambda")?;
    Ok(Grid(g))
}

fn parse_lambda_list(s: &str) -> std::result::Result<Grid, String> {
    let g = parse_list(s)?;
    check_range(&g, 0.0, f64::INFINITY, "lambda")?;
    Ok(Grid(g))
}

fn parse_eps_scalar(s: &str) -> std::result::Result<f64, String> {
    let v = parse_real(s)?;
    if !v.is_finite() || v < 0.0 {
        return Err(format!("eps must be finite and >= 0, got {v}"));
    }
    Ok(v)
}

/// Comma-separated weight vector, e.g. `1,0.5,-2`. Wrapped so clap treats the
/// whole list as one argument value rather than repeated occurrences.
#[derive(Debug, Clone)]
pub struct WeightVec(pub Vec<f64>);

fn parse_vector(s: &str) -> std::result::Result<WeightVec, String> {
    let v = parse_list(s)?;
    if v.is_empty() {
        return Err("empty vector".into());
    }
    Ok(WeightVec(v))
}

/// Comma-separated 0/1 support mask, e.g. `1,1,0,0`.
#[derive(Debug, Clone)]
pub struct MaskVec(pub Vec<bool>);

fn parse_mask(s: &str) -> std::result::Result<MaskVec, String> {
    s.split(',')
        .map(|f| match f.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(format!("mask entries are 0 or 1, got {other:?}")),
        })
        .collect::<std::result::Result<Vec<bool>, String>>()
        .map(MaskVec)
}

fn parse_norm(s: &str) -> std::result::Result<NormKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "linf" => Ok(NormKind::LInf),
        "l2" => Ok(NormKind::L2),
        other => Err(format!("norm is linf or l2, got {other:?}")),
    }
}

// ---------------------------------------------------------------------------
// Command definitions

#[derive(Debug, Parser)]
#[command(
    name = "advrisk",
    version,
    about = "Standard and adversarial risk experiments for linear classifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep (eps, lambda), training on the two-squares data and plotting
    /// the standard risk of the trained classifier against eps.
    FigToy(FigToyArgs),
    /// Run one of the built-in checks: 5, 6, 7, nomargin, or reg.
    CheckThm(CheckThmArgs),
    /// Sweep lambda on a Gaussian mixture and report the standard/excess
    /// adversarial risk tradeoff.
    LambdaSweep(LambdaSweepArgs),
    /// Print every supported risk for one classifier/model configuration.
    Risk(RiskArgs),
    /// Train on the two-squares data and dump the iterate trace.
    Train(TrainArgs),
}

#[derive(Debug, Args)]
pub struct FigToyArgs {
    /// Perturbation radii, `a:b:step` or a single value, within [0, 3].
    #[arg(long, default_value = "0:1.5:0.25", value_parser = parse_fig_eps)]
    pub eps: Grid,
    /// Penalty weights, comma-separated, within [0, 100].
    #[arg(long, default_value = "0.1,1,10", value_parser = parse_fig_lambda)]
    pub lambda: Grid,
    /// Training samples per grid cell.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Shared evaluation samples.
    #[arg(long, default_value_t = 1_000_000)]
    pub n_eval: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output path (SVG written alongside); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckThmArgs {
    /// Which check to run: 5, 6, 7, nomargin, or reg.
    pub id: String,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Monte Carlo / training sample count (check-specific default).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_eval: Option<usize>,
    #[arg(long, value_parser = parse_eps_scalar)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output path for the measured metrics; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LambdaSweepArgs {
    #[arg(long, default_value_t = 20)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.2, value_parser = parse_eps_scalar)]
    pub eps: f64,
    #[arg(long, default_value = "0,0.5,1,2,4", value_parser = parse_lambda_list)]
    pub lambda: Grid,
    /// Training samples (shared across lambda cells).
    #[arg(long, default_value_t = 20_000)]
    pub n: usize,
    #[arg(long, default_value_t = 200_000)]
    pub n_eval: usize,
    #[arg(long, default_value = "linf", value_parser = parse_norm)]
    pub norm: NormKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    /// Classifier weights, comma-separated.
    #[arg(long, value_parser = parse_vector)]
    pub f: WeightVec,
    /// Base classifier weights; enables the base-relative risks.
    #[arg(long, value_parser = parse_vector)]
    pub g: Option<WeightVec>,
    /// Data distribution: mixture or squares.
    #[arg(long, default_value = "mixture")]
    pub dist: String,
    /// Mixture mean vector, comma-separated (mixture only).
    #[arg(long, value_parser = parse_vector)]
    pub wstar: Option<WeightVec>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Mixture support mask of 0/1 entries (optional).
    #[arg(long, value_parser = parse_mask)]
    pub mask: Option<MaskVec>,
    #[arg(long, default_value_t = 0.5, value_parser = parse_eps_scalar)]
    pub eps: f64,
    #[arg(long, default_value = "linf", value_parser = parse_norm)]
    pub norm: NormKind,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training samples (two-squares distribution).
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 200_000)]
    pub n_eval: usize,
    #[arg(long, default_value_t = 0.5, value_parser = parse_eps_scalar)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    #[arg(long, default_value = "linf", value_parser = parse_norm)]
    pub norm: NormKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iterate trace CSV path; no trace is kept when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Experiment drivers

/// One cell of the figure sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FigToyRow {
    pub eps: f64,
    pub lambda: f64,
    pub std_risk: f64,
    pub std_err: f64,
}

/// Trains on fresh two-squares data for every (eps, lambda) cell and
/// evaluates each trained classifier's standard 0/1 risk on one shared
/// evaluation set.
pub fn run_fig_toy(
    eps_grid: &[f64],
    lambda_grid: &[f64],
    n_train: usize,
    n_eval: usize,
    seed: u64,
) -> Result<Vec<FigToyRow>> {
    let eval = sample_squares(n_eval, seed)?;
    let mut rows = Vec::with_capacity(eps_grid.len() * lambda_grid.len());
    let mut idx = 0u64;
    for &eps in eps_grid {
        for &lambda in lambda_grid {
            idx += 1;
            let data = sample_squares(n_train, cell_seed(seed, idx))?;
            let budget = PerturbationBudget::new(NormKind::LInf, eps)?;
            let result = train(&data, &TrainConfig::new(lambda, budget))?;
            let report = mc_risk(RiskFamily::Standard, &result.w_final, None, &eval, budget, Loss::ZeroOne)?;
            rows.push(FigToyRow { eps, lambda, std_risk: report.value, std_err: report.std_err });
        }
    }
    Ok(rows)
}

/// One named assertion from a check run.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a check measured, plus its pass/fail verdicts.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub outcomes: Vec<CheckOutcome>,
    pub metrics: Vec<(String, f64)>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.outcomes.push(CheckOutcome { name: name.into(), passed, detail });
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.push((name.into(), value));
    }
}

/// Restricted-class check: halving the coordinates of the Bayes direction
/// costs under 0.1 standard risk but lets a structured perturbation of size
/// C/√d flip the restricted classifier on 95% of points for some C ≤ 5.
pub fn run_check_thm5(d: usize, n: usize, seed: u64) -> Result<CheckReport> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::Domain(format!("this check needs even d >= 2, got {d}")));
    }
    let wv = 1.0 / ((d / 2) as f64).sqrt();
    let model = GaussianMixture::new(vec![wv; d], 1.0)?;
    let rc = restricted_class_check(&model, d / 2, n, seed)?;
    let mut report = CheckReport::default();
    report.metric("risk_full", rc.risk_full);
    report.metric("risk_restricted", rc.risk_restricted);
    report.metric("gap", rc.gap);
    for &(c, p) in &rc.event_probs {
        report.metric(&format!("event_prob_c{c}"), p);
    }
    report.metric("smallest_c", rc.smallest_c.unwrap_or(-1.0));
    report.check(
        "restricted risk gap",
        (rc.gap - 0.080005).abs() <= 1e-6 && rc.gap < 0.1,
        format!("gap = {:.9}, target 0.080005 within 1e-6 and below 0.1", rc.gap),
    );
    report.check(
        "structured flip probability",
        rc.smallest_c.is_some_and(|c| c <= 5.0),
        format!("smallest C with flip probability >= 0.95: {:?} (need <= 5)", rc.smallest_c),
    );
    Ok(report)
}

/// Sparse-plus-tail construction: the classifier matching the Bayes rule on
/// its support but spreading small mass over the tail pays almost no
/// standard risk yet is adversarially flipped on over 95% of points, with
/// the tail-only flip event hitting its analytic probability 2Φ(2) − 1.
pub fn run_check_thm6(d: usize, k: usize, n: usize, seed: u64) -> Result<CheckReport> {
    if k == 0 || d <= k {
        return Err(Error::Domain(format!("this check needs d > k >= 1, got d = {d}, k = {k}")));
    }
    let w_sq = 2.0 + 2.0 * 2.0_f64.sqrt();
    let head = (w_sq / k as f64).sqrt();
    let tail = 1.0 / ((d - k) as f64).sqrt();
    let mut w_star = vec![0.0; d];
    let mut w = vec![tail; d];
    for i in 0..k {
        w_star[i] = head;
        w[i] = head;
    }
    let model = GaussianMixture::new(w_star, 1.0)?;
    let f = LinearClassifier::new(w)?;
    let g = bayes_classifier(&model)?;
    let eps = 2.0 * w_sq / ((d - k) as f64).sqrt();

    let bayes_risk = cf_standard_risk(&g, &model)?.value;
    let risk_f_cf = cf_standard_risk(&f, &model)?.value;
    let alpha_l1: f64 = f.w[k..].iter().map(|v| v.abs()).sum();
    let tail_drop = eps * alpha_l1;
    let event_target = 2.0 * normal_cdf(2.0)? - 1.0;

    let solver = crate::attack::ConstrainedSolver::new(&f, &g)?;
    let mut sums = [0.0f64; 3];
    let mut sumsqs = [0.0f64; 3];
    crate::model::for_each_mixture_sample(&model, n, seed, |x, y| {
        let f_score = numerics::dot(&f.w, x);
        let g_score = numerics::dot(&g.w, x);
        let std_w = numerics::zero_one(f_score, y);
        let margin = y * f_score;
        let event = if margin >= 0.0 && margin < tail_drop { 1.0 } else { 0.0 };
        let radv = if numerics::sign(f_score) == numerics::sign(g_score)
            && solver.achieved(f_score, g_score, eps).0 < 0.0
        {
            1.0
        } else {
            0.0
        };
        for (acc, v) in [std_w, event, radv].into_iter().enumerate() {
            sums[acc] += v;
            sumsqs[acc] += v * v;
        }
    })?;
    let nf = n as f64;
    let mean_se = |i: usize| {
        let mean: f64 = sums[i] / nf;
        let var = ((sumsqs[i] - sums[i] * mean) / (nf - 1.0)).max(0.0);
        (mean, (var / nf).sqrt())
    };
    let (std_mc, std_se) = mean_se(0);
    let (event_mc, event_se) = mean_se(1);
    let (radv_mc, radv_se) = mean_se(2);
    let excess_mc = std_mc - bayes_risk;

    let mut report = CheckReport::default();
    report.metric("eps", eps);
    report.metric("bayes_risk", bayes_risk);
    report.metric("standard_risk_cf", risk_f_cf);
    report.metric("standard_risk_mc", std_mc);
    report.metric("excess_mc", excess_mc);
    report.metric("excess_std_err", std_se);
    report.metric("tail_event_prob", event_mc);
    report.metric("tail_event_target", event_target);
    report.metric("radv", radv_mc);
    report.metric("radv_std_err", radv_se);
    report.check(
        "excess standard risk",
        excess_mc <= 0.02 + 3.0 * std_se,
        format!("excess = {excess_mc:.6} (cf {:.6}), need <= 0.02 + 3se = {:.6}", risk_f_cf - bayes_risk, 0.02 + 3.0 * std_se),
    );
    report.check(
        "adversarial risk",
        radv_mc >= 0.95 - 3.0 * radv_se,
        format!("radv = {radv_mc:.6}, need >= {:.6}", 0.95 - 3.0 * radv_se),
    );
    report.check(
        "tail flip event probability",
        (event_mc - event_target).abs() <= 3.0 * event_se,
        format!("event = {event_mc:.6}, analytic {event_target:.6}, band 3se = {:.6}", 3.0 * event_se),
    );
    Ok(report)
}

/// Gradient-descent invariance: training on a mixture whose noise lives on
/// k coordinates never moves the other d − k weights, yet the Gaussian
/// initialization mass left there makes the trained classifier almost
/// always flippable without crossing the Bayes boundary.
pub fn run_check_thm7(d: usize, k: usize, n_train: usize, n_eval: usize, seed: u64) -> Result<CheckReport> {
    if k == 0 || d <= k {
        return Err(Error::Domain(format!("this check needs d > k >= 1, got d = {d}, k = {k}")));
    }
    let w_norm = 2.5;
    let head = w_norm / (k as f64).sqrt();
    let mut w_star = vec![0.0; d];
    let mut mask = vec![false; d];
    for i in 0..k {
        w_star[i] = head;
        mask[i] = true;
    }
    let model = GaussianMixture::with_mask(w_star, 1.0, Some(mask))?;
    let data = sample_mixture(&model, n_train, cell_seed(seed, 1))?;
    let mut cfg = TrainConfig::new(0.0, PerturbationBudget::new(NormKind::LInf, 0.0)?);
    cfg.init = Init::Gaussian { scale: 1.0 / ((d - k) as f64).sqrt(), seed: cell_seed(seed, 2) };
    let rep = crate::train::verify_lowdim_invariance(&model, &cfg, &data, n_eval, cell_seed(seed, 3))?;
    let bayes_risk = normal_cdf(-w_norm)?;

    let mut report = CheckReport::default();
    report.metric("eps", rep.eps);
    report.metric("max_off_support_drift", rep.max_off_support_drift);
    report.metric("heldout_standard_risk", rep.heldout_standard.value);
    report.metric("heldout_std_err", rep.heldout_standard.std_err);
    report.metric("bayes_risk", bayes_risk);
    report.metric("radv", rep.radv_vs_bayes.value);
    report.metric("radv_std_err", rep.radv_vs_bayes.std_err);
    report.check(
        "off-support invariance",
        rep.max_off_support_drift == 0.0,
        format!("max drift = {:e} (must be exactly 0)", rep.max_off_support_drift),
    );
    report.check(
        "held-out risk at Bayes level",
        (rep.heldout_standard.value - bayes_risk).abs() <= 3.0 * rep.heldout_standard.std_err,
        format!(
            "risk = {:.6}, Bayes = {bayes_risk:.6}, band 3se = {:.6}",
            rep.heldout_standard.value,
            3.0 * rep.heldout_standard.std_err
        ),
    );
    report.check(
        "adversarial risk",
        rep.radv_vs_bayes.value >= 0.95 - 3.0 * rep.radv_vs_bayes.std_err,
        format!("radv = {:.6}, need >= {:.6}", rep.radv_vs_bayes.value, 0.95 - 3.0 * rep.radv_vs_bayes.std_err),
    );
    Ok(report)
}

/// Trains on the two-squares data with a perturbation radius beyond the
/// class margin and a heavy penalty, expecting the trained classifier's
/// standard risk to exceed the Bayes level by more than Monte Carlo noise.
pub fn run_check_nomargin(
    n_train: usize,
    n_eval: usize,
    eps: f64,
    lambda: f64,
    seed: u64,
) -> Result<CheckReport> {
    let budget = PerturbationBudget::new(NormKind::LInf, eps)?;
    let data = sample_squares(n_train, cell_seed(seed, 1))?;
    let result = train(&data, &TrainConfig::new(lambda, budget))?;
    let eval = sample_squares(n_eval, cell_seed(seed, 2))?;
    let risk = mc_risk(RiskFamily::Standard, &result.w_final, None, &eval, budget, Loss::ZeroOne)?;

    let mut report = CheckReport::default();
    report.metric("eps", eps);
    report.metric("lambda", lambda);
    report.metric("standard_risk", risk.value);
    report.metric("std_err", risk.std_err);
    report.metric("objective_initial", result.objective_history[0]);
    report.metric("objective_final", *result.objective_history.last().unwrap());
    report.check(
        "risk above Bayes level",
        risk.value > 0.3 + 3.0 * risk.std_err,
        format!("risk = {:.6}, need > {:.6}", risk.value, 0.3 + 3.0 * risk.std_err),
    );
    Ok(report)
}

/// Evaluates the regularization bounds for the Bayes classifier of a small
/// mixture: the excess adversarial logistic risk sits between
/// (eps/2)·R_{0/1}·‖w‖_* and eps·‖w‖_* up to Monte Carlo noise.
pub fn run_check_reg(eps: f64, sigma: f64, lambda: f64, n: usize, seed: u64) -> Result<CheckReport> {
    let model = GaussianMixture::new(vec![2.0, 0.0], sigma)?;
    let w = bayes_classifier(&model)?;
    let data = sample_mixture(&model, n, cell_seed(seed, 1))?;
    let budget = PerturbationBudget::new(NormKind::LInf, eps)?;
    let bounds = check_reg_bounds(&w, &w, &data, budget, lambda)?;

    let mut report = CheckReport::default();
    report.metric("eps", eps);
    report.metric("lambda", lambda);
    report.metric("dual_norm_w", bounds.dual_norm_w);
    report.metric("standard_logistic", bounds.standard_logistic.value);
    report.metric("gadv_logistic", bounds.gadv_logistic.value);
    report.metric("gadv_std_err", bounds.gadv_logistic.std_err);
    report.metric("standard_01", bounds.standard_01.value);
    report.metric("surrogate", bounds.surrogate_value);
    report.metric("regularized_objective", bounds.regularized_objective);
    report.metric("regularized_upper", bounds.regularized_upper);
    let upper = eps * bounds.dual_norm_w;
    let lower = (eps / 2.0) * bounds.standard_01.value * bounds.dual_norm_w;
    report.check(
        "upper bound",
        bounds.upper_holds,
        format!("gadv = {:.6} <= eps*dual + 3se = {:.6}", bounds.gadv_logistic.value, upper + 3.0 * bounds.gadv_logistic.std_err),
    );
    report.check(
        "lower bound",
        bounds.lower_holds,
        format!("gadv = {:.6} >= (eps/2)*R01*dual - 3se = {:.6}", bounds.gadv_logistic.value, lower - 3.0 * bounds.gadv_logistic.std_err),
    );
    report.check(
        "surrogate bound",
        bounds.surrogate_holds,
        format!("surrogate = {:.6} <= {:.6}", bounds.surrogate_value, upper + 3.0 * bounds.surrogate_std_err),
    );
    Ok(report)
}

/// One lambda cell of the tradeoff sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub lambda: f64,
    pub standard: RiskReport,
    pub gadv: RiskReport,
}

/// Sweep result: per-lambda risks plus the monotone-trend verdicts.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub outcomes: Vec<CheckOutcome>,
}

impl SweepReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

/// Trains the penalized objective for each lambda on one shared mixture
/// training set (geometrically decaying Bayes direction) and evaluates
/// standard and excess adversarial 0/1 risks on fresh samples. Raising
/// lambda should trade standard risk for adversarial slack: the check
/// asserts GAdv01 nonincreasing and Standard01 nondecreasing between
/// consecutive cells, within 3 combined standard errors.
pub fn run_lambda_sweep(
    d: usize,
    sigma: f64,
    eps: f64,
    lambdas: &[f64],
    n_train: usize,
    n_eval: usize,
    norm: NormKind,
    seed: u64,
) -> Result<SweepReport> {
    if d == 0 {
        return Err(Error::Domain("d must be >= 1".into()));
    }
    if lambdas.is_empty() {
        return Err(Error::Domain("lambda grid is empty".into()));
    }
    let mut w_star: Vec<f64> = (0..d).map(|i| 0.5_f64.powi(i as i32)).collect();
    let scale = 1.5 / numerics::l2(&w_star);
    for v in w_star.iter_mut() {
        *v *= scale;
    }
    let model = GaussianMixture::new(w_star, sigma)?;
    let budget = PerturbationBudget::new(norm, eps)?;
    let data = sample_mixture(&model, n_train, cell_seed(seed, 1))?;
    let eval_seed = cell_seed(seed, 2);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let result = train(&data, &TrainConfig::new(lambda, budget))?;
        let w = &result.w_final;
        let standard =
            mc_risk_sampled(RiskFamily::Standard, w, None, &model, n_eval, eval_seed, budget, Loss::ZeroOne)?;
        let gadv =
            mc_risk_sampled(RiskFamily::GAdv, w, None, &model, n_eval, eval_seed, budget, Loss::ZeroOne)?;
        rows.push(SweepRow { lambda, standard, gadv });
    }
    let mut outcomes = Vec::new();
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let band_g = 3.0 * (a.gadv.std_err.powi(2) + b.gadv.std_err.powi(2)).sqrt();
        let band_s = 3.0 * (a.standard.std_err.powi(2) + b.standard.std_err.powi(2)).sqrt();
        outcomes.push(CheckOutcome {
            name: format!("gadv nonincreasing {} -> {}", a.lambda, b.lambda),
            passed: b.gadv.value <= a.gadv.value + band_g,
            detail: format!("{:.6} -> {:.6}, band {:.6}", a.gadv.value, b.gadv.value, band_g),
        });
        outcomes.push(CheckOutcome {
            name: format!("standard nondecreasing {} -> {}", a.lambda, b.lambda),
            passed: b.standard.value >= a.standard.value - band_s,
            detail: format!("{:.6} -> {:.6}, band {:.6}", a.standard.value, b.standard.value, band_s),
        });
    }
    Ok(SweepReport { rows, outcomes })
}

/// Builds the risk table for one configuration: closed forms where the
/// model admits them, Monte Carlo rows for every supported (family, loss)
/// combination, base-relative rows only when `g` is given.
#[allow(clippy::too_many_arguments)]
pub fn run_risk_table(
    f: &LinearClassifier,
    g: Option<&LinearClassifier>,
    dist: &str,
    wstar: Option<Vec<f64>>,
    sigma: f64,
    mask: Option<Vec<bool>>,
    budget: PerturbationBudget,
    n: usize,
    seed: u64,
) -> Result<Vec<RiskReport>> {
    let mut rows = Vec::new();
    match dist {
        "mixture" => {
            let w_star = wstar.ok_or_else(|| Error::Domain("the mixture distribution needs --wstar".into()))?;
            let model = GaussianMixture::with_mask(w_star, sigma, mask)?;
            rows.push(cf_standard_risk(f, &model)?);
            rows.push(cf_worst_case_adv_risk(f, &model, budget)?);
            rows.push(cf_excess_adv_risk(f, &model, budget)?);
            if budget.kind == NormKind::LInf {
                rows.push(cf_new_adv_risk_bound(f, &model, budget)?);
            }
            let mc = |family, g: Option<&LinearClassifier>, loss| {
                mc_risk_sampled(family, f, g, &model, n, seed, budget, loss)
            };
            rows.push(mc(RiskFamily::Standard, None, Loss::ZeroOne)?);
            rows.push(mc(RiskFamily::Standard, None, Loss::Logistic)?);
            rows.push(mc(RiskFamily::WorstCase, None, Loss::ZeroOne)?);
            rows.push(mc(RiskFamily::GAdv, None, Loss::ZeroOne)?);
            rows.push(mc(RiskFamily::GAdv, None, Loss::Logistic)?);
            if let Some(g) = g {
                rows.push(mc(RiskFamily::HAdv, Some(g), Loss::ZeroOne)?);
                if budget.kind == NormKind::LInf {
                    rows.push(mc(RiskFamily::RAdv, Some(g), Loss::ZeroOne)?);
                }
            }
        }
        "squares" => {
            let data = sample_squares(n, seed)?;
            let mc = |family, g: Option<&LinearClassifier>, loss| mc_risk(family, f, g, &data, budget, loss);
            rows.push(mc(RiskFamily::Standard, None, Loss::ZeroOne)?);
            rows.push(mc(RiskFamily::Standard, None, Loss::Logistic)?);
            rows.push(mc(RiskFamily::WorstCase, None, Loss::ZeroOne)?);
            rows.push(mc(RiskFamily::GAdv, None, Loss::ZeroOne)?);
            rows.push(mc(RiskFamily::GAdv, None, Loss::Logistic)?);
            if let Some(g) = g {
                rows.push(mc(RiskFamily::HAdv, Some(g), Loss::ZeroOne)?);
                if budget.kind == NormKind::LInf {
                    rows.push(mc(RiskFamily::RAdv, Some(g), Loss::ZeroOne)?);
                }
            }
        }
        other => {
            return Err(Error::Domain(format!("unknown distribution {other:?}; use mixture or squares")));
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Output plumbing

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|source| Error::Io { path: path.into(), source })
}

fn emit(out: Option<&Path>, csv: &str, svg: Option<String>) -> Result<()> {
    match out {
        None => {
            print!("{csv}");
            Ok(())
        }
        Some(path) => {
            write_file(path, csv)?;
            if let Some(svg) = svg {
                write_file(&path.with_extension("svg"), &svg)?;
            }
            Ok(())
        }
    }
}

fn fig_toy_csv(rows: &[FigToyRow]) -> String {
    let mut csv = String::from("eps,lambda,std_risk,std_err\n");
    for r in rows {
        let _ = writeln!(csv, "{},{},{},{}", r.eps, r.lambda, r.std_risk, r.std_err);
    }
    csv
}

fn fig_toy_svg(rows: &[FigToyRow], lambda_grid: &[f64]) -> String {
    let mut plot = LinePlot::new("Standard risk of the trained classifier", "eps", "standard 0/1 risk");
    for &lambda in lambda_grid {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.lambda == lambda)
            .map(|r| (r.eps, r.std_risk))
            .collect();
        plot.add_series(&format!("lambda = {lambda}"), points);
    }
    plot.add_h_line(0.3);
    plot.to_svg()
}

fn metrics_csv(report: &CheckReport) -> String {
    let mut csv = String::from("metric,value\n");
    for (name, value) in &report.metrics {
        let _ = writeln!(csv, "{name},{value}");
    }
    csv
}

fn print_outcomes(outcomes: &[CheckOutcome]) {
    for o in outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag}: {} ({})", o.name, o.detail);
    }
}

fn sweep_csv(report: &SweepReport) -> String {
    let mut csv = String::from("lambda,standard_01,standard_std_err,gadv_01,gadv_std_err,joint_01\n");
    for r in &report.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.lambda,
            r.standard.value,
            r.standard.std_err,
            r.gadv.value,
            r.gadv.std_err,
            r.standard.value + r.gadv.value
        );
    }
    csv
}

fn sweep_svg(report: &SweepReport) -> String {
    let mut plot = LinePlot::new("Risk tradeoff against the penalty weight", "lambda", "0/1 risk");
    let series: [(&str, Box<dyn Fn(&SweepRow) -> f64>); 3] = [
        ("standard", Box::new(|r: &SweepRow| r.standard.value)),
        ("gadv excess", Box::new(|r: &SweepRow| r.gadv.value)),
        ("joint", Box::new(|r: &SweepRow| r.standard.value + r.gadv.value)),
    ];
    for (label, pick) in &series {
        plot.add_series(label, report.rows.iter().map(|r| (r.lambda, pick(r))).collect());
    }
    plot.to_svg()
}

fn risk_csv(rows: &[RiskReport], eps: f64, seed: u64) -> String {
    let mut csv = String::from(RiskReport::csv_header());
    csv.push('\n');
    for r in rows {
        csv.push_str(&r.csv_row(eps, 0.0, seed));
        csv.push('\n');
    }
    csv
}

// ---------------------------------------------------------------------------
// Command dispatch

/// Runs a parsed command. `Ok(true)` means every assertion passed (or the
/// command had none); `Ok(false)` means some check failed.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::FigToy(args) => {
            let rows = run_fig_toy(&args.eps.0, &args.lambda.0, args.n, args.n_eval, args.seed)?;
            emit(args.out.as_deref(), &fig_toy_csv(&rows), Some(fig_toy_svg(&rows, &args.lambda.0)))?;
            Ok(true)
        }
        Command::CheckThm(args) => {
            let report = match args.id.as_str() {
                "5" => run_check_thm5(args.d.unwrap_or(100), args.n.unwrap_or(1_000_000), args.seed)?,
                "6" => run_check_thm6(
                    args.d.unwrap_or(1000),
                    args.k.unwrap_or(4),
                    args.n.unwrap_or(1_000_000),
                    args.seed,
                )?,
                "7" => run_check_thm7(
                    args.d.unwrap_or(200),
                    args.k.unwrap_or(4),
                    args.n.unwrap_or(10_000),
                    args.n_eval.unwrap_or(1_000_000),
                    args.seed,
                )?,
                "nomargin" => run_check_nomargin(
                    args.n.unwrap_or(100_000),
                    args.n_eval.unwrap_or(1_000_000),
                    args.eps.unwrap_or(1.5),
                    args.lambda.unwrap_or(10.0),
                    args.seed,
                )?,
                "reg" => run_check_reg(
                    args.eps.unwrap_or(0.1),
                    args.sigma,
                    args.lambda.unwrap_or(1.0),
                    args.n.unwrap_or(100_000),
                    args.seed,
                )?,
                other => {
                    return Err(Error::Domain(format!(
                        "unknown check {other:?}; use 5, 6, 7, nomargin, or reg"
                    )));
                }
            };
            print_outcomes(&report.outcomes);
            emit(args.out.as_deref(), &metrics_csv(&report), None)?;
            Ok(report.all_passed())
        }
        Command::LambdaSweep(args) => {
            let report = run_lambda_sweep(
                args.d,
                args.sigma,
                args.eps,
                &args.lambda.0,
                args.n,
                args.n_eval,
                args.norm,
                args.seed,
            )?;
            print_outcomes(&report.outcomes);
            emit(args.out.as_deref(), &sweep_csv(&report), Some(sweep_svg(&report)))?;
            Ok(report.all_passed())
        }
        Command::Risk(args) => {
            let f = LinearClassifier::new(args.f.0.clone())?;
            let g = args.g.clone().map(|g| LinearClassifier::new(g.0)).transpose()?;
            let budget = PerturbationBudget::new(args.norm, args.eps)?;
            let rows = run_risk_table(
                &f,
                g.as_ref(),
                &args.dist,
                args.wstar.clone().map(|w| w.0),
                args.sigma,
                args.mask.clone().map(|m| m.0),
                budget,
                args.n,
                args.seed,
            )?;
            emit(args.out.as_deref(), &risk_csv(&rows, args.eps, args.seed), None)?;
            Ok(true)
        }
        Command::Train(args) => {
            let budget = PerturbationBudget::new(args.norm, args.eps)?;
            let data = sample_squares(args.n, cell_seed(args.seed, 1))?;
            let mut cfg = TrainConfig::new(args.lambda, budget);
            cfg.lr = args.lr;
            cfg.iters = args.iters;
            cfg.record_trace = args.out.is_some();
            let result = train(&data, &cfg)?;
            if let Some(path) = &args.out {
                result.save_trace_csv(path)?;
            }
            let eval = sample_squares(args.n_eval, cell_seed(args.seed, 2))?;
            let risk = mc_risk(RiskFamily::Standard, &result.w_final, None, &eval, budget, Loss::ZeroOne)?;
            println!(
                "objective: {} -> {}",
                result.objective_history[0],
                result.objective_history.last().unwrap()
            );
            println!("w_final: {:?}", result.w_final.w);
            println!("standard 0/1 risk: {} (std_err {})", risk.value, risk.std_err);
            Ok(true)
        }
    }
}

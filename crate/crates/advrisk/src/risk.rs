//! Risk measures for linear classifiers on the Gaussian mixture: exact
//! closed forms, Monte Carlo estimators of five risk families under 0/1 and
//! logistic losses, and empirical checks of the regularization bounds that
//! relate the excess adversarial risk to a dual-norm penalty.

use crate::attack::ConstrainedSolver;
use crate::model::{Dataset, GaussianMixture, LinearClassifier, PerturbationBudget};
use crate::numerics::{self, logistic_loss, normal_cdf, zero_one, NormKind};
use crate::{Error, Result};

/// Loss functions the estimators support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    ZeroOne,
    Logistic,
}

/// The five per-sample quantities an estimator can average.
///
/// `Standard` is the plain loss; `WorstCase` the loss at the unconstrained
/// worst perturbation; `GAdv` their difference (excess, against the true
/// label); `HAdv` the same difference against the base classifier's label
/// g(x) instead of y; `RAdv` the indicator that f agrees with g at x and the
/// g-sign-preserving attack still strictly flips f.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskFamily {
    Standard,
    WorstCase,
    GAdv,
    HAdv,
    RAdv,
}

/// The seven supported (family, loss) combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskName {
    Standard01,
    StandardLogistic,
    GAdv01,
    GAdvLogistic,
    HAdv01,
    RAdv01,
    WorstCase01,
}

impl std::fmt::Display for RiskName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RiskName::Standard01 => "standard_01",
            RiskName::StandardLogistic => "standard_logistic",
            RiskName::GAdv01 => "gadv_01",
            RiskName::GAdvLogistic => "gadv_logistic",
            RiskName::HAdv01 => "hadv_01",
            RiskName::RAdv01 => "radv_01",
            RiskName::WorstCase01 => "worst_case_01",
        })
    }
}

/// How a report's value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskKind {
    ClosedForm,
    MonteCarlo,
}

impl std::fmt::Display for RiskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RiskKind::ClosedForm => "closed_form",
            RiskKind::MonteCarlo => "monte_carlo",
        })
    }
}

/// One risk value with its provenance and Monte Carlo error bar.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub risk_name: RiskName,
    pub kind: RiskKind,
    pub value: f64,
    /// Sample standard deviation over √n; 0 for closed forms.
    pub std_err: f64,
    /// Samples averaged; 0 for closed forms.
    pub n: usize,
    /// True when the value is an upper bound on the named risk rather than
    /// the risk itself.
    pub is_upper_bound: bool,
}

impl RiskReport {
    fn closed_form(risk_name: RiskName, value: f64) -> Self {
        RiskReport { risk_name, kind: RiskKind::ClosedForm, value, std_err: 0.0, n: 0, is_upper_bound: false }
    }

    pub fn csv_header() -> &'static str {
        "risk_name,kind,value,std_err,n,eps,lambda,seed"
    }

    /// One CSV row under [`RiskReport::csv_header`], with the run context
    /// appended.
    pub fn csv_row(&self, eps: f64, lambda: f64, seed: u64) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.risk_name, self.kind, self.value, self.std_err, self.n, eps, lambda, seed
        )
    }
}

fn check_model_dims(w: &LinearClassifier, model: &GaussianMixture) -> Result<()> {
    if w.dim() != model.dim() {
        return Err(Error::Dimension(format!(
            "classifier has dimension {}, mixture has dimension {}",
            w.dim(),
            model.dim()
        )));
    }
    Ok(())
}

/// Conditional standard deviation of w·x given y: σ·‖w‖₂ over the model's
/// noise-carrying coordinates. Errors when it degenerates to 0.
fn margin_sd(w: &LinearClassifier, model: &GaussianMixture) -> Result<f64> {
    let masked = model.masked(&w.w);
    let sd = model.sigma() * numerics::l2(&masked);
    if sd > 0.0 {
        Ok(sd)
    } else {
        Err(Error::Domain(
            "w·x has zero variance under the model (w vanishes on the noise support or sigma = 0)".into(),
        ))
    }
}

/// Exact standard 0/1 risk of w on the mixture: Φ(−w·w* / (σ‖w‖₂)), with
/// ‖w‖₂ measured on the model's noise-carrying coordinates.
pub fn cf_standard_risk(w: &LinearClassifier, model: &GaussianMixture) -> Result<RiskReport> {
    check_model_dims(w, model)?;
    let sd = margin_sd(w, model)?;
    let value = normal_cdf(-numerics::dot(&w.w, model.w_star()) / sd)?;
    Ok(RiskReport::closed_form(RiskName::Standard01, value))
}

/// Exact worst-case 0/1 risk under unconstrained perturbations:
/// Φ((eps·‖w‖_* − w·w*) / (σ‖w‖₂)). This is E[sup over the ball of the
/// loss], not the excess over the standard risk.
pub fn cf_worst_case_adv_risk(
    w: &LinearClassifier,
    model: &GaussianMixture,
    budget: PerturbationBudget,
) -> Result<RiskReport> {
    check_model_dims(w, model)?;
    let sd = margin_sd(w, model)?;
    let dual = numerics::dual_norm(&w.w, budget.kind)?;
    let value = normal_cdf((budget.eps * dual - numerics::dot(&w.w, model.w_star())) / sd)?;
    Ok(RiskReport::closed_form(RiskName::WorstCase01, value))
}

/// Exact excess adversarial 0/1 risk: worst-case minus standard. The
/// difference is nonnegative because the inner sup dominates the base loss
/// pointwise.
pub fn cf_excess_adv_risk(
    w: &LinearClassifier,
    model: &GaussianMixture,
    budget: PerturbationBudget,
) -> Result<RiskReport> {
    let worst = cf_worst_case_adv_risk(w, model, budget)?;
    let standard = cf_standard_risk(w, model)?;
    let value = (worst.value - standard.value).max(0.0);
    Ok(RiskReport::closed_form(RiskName::GAdv01, value))
}

/// Upper bound on the base-classifier-relative adversarial risk of w when
/// the base classifier is the mixture's own Bayes rule w*:
/// Φ((eps·‖w−w*‖₁ − (w−w*)·w*) / (σ‖w−w*‖₂)), for L∞ budgets.
///
/// Edge cases: w = w* returns exactly 0 (a point that agrees with w* cannot
/// be flipped without flipping w* too). When w − w* is zero on every
/// noise-carrying coordinate but not identically zero, the bound's argument
/// degenerates to ±∞ and the limit value (1 for a positive numerator, else
/// 0) is returned.
pub fn cf_new_adv_risk_bound(
    w: &LinearClassifier,
    model: &GaussianMixture,
    budget: PerturbationBudget,
) -> Result<RiskReport> {
    if budget.kind != NormKind::LInf {
        return Err(Error::Unsupported(
            "the adversarial risk bound is implemented for L-infinity budgets only".into(),
        ));
    }
    check_model_dims(w, model)?;
    let diff: Vec<f64> = w.w.iter().zip(model.w_star()).map(|(&a, &b)| a - b).collect();
    let mut report = RiskReport::closed_form(RiskName::RAdv01, 0.0);
    report.is_upper_bound = true;
    if diff.iter().all(|&d| d == 0.0) {
        return Ok(report);
    }
    let numerator = budget.eps * numerics::l1(&diff) - numerics::dot(&diff, model.w_star());
    let sd = model.sigma() * numerics::l2(&model.masked(&diff));
    report.value = if sd > 0.0 {
        normal_cdf(numerator / sd)?
    } else if numerator > 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(report)
}

fn risk_name(family: RiskFamily, loss: Loss) -> Result<RiskName> {
    match (family, loss) {
        (RiskFamily::Standard, Loss::ZeroOne) => Ok(RiskName::Standard01),
        (RiskFamily::Standard, Loss::Logistic) => Ok(RiskName::StandardLogistic),
        (RiskFamily::WorstCase, Loss::ZeroOne) => Ok(RiskName::WorstCase01),
        (RiskFamily::GAdv, Loss::ZeroOne) => Ok(RiskName::GAdv01),
        (RiskFamily::GAdv, Loss::Logistic) => Ok(RiskName::GAdvLogistic),
        (RiskFamily::HAdv, Loss::ZeroOne) => Ok(RiskName::HAdv01),
        (RiskFamily::RAdv, Loss::ZeroOne) => Ok(RiskName::RAdv01),
        (family, Loss::Logistic) => Err(Error::Unsupported(format!(
            "{family:?} is not defined for the logistic loss here (no closed inner maximizer)"
        ))),
    }
}

/// Per-sample evaluator shared by the materialized and streaming
/// estimators. Construction validates the (family, loss, g, budget)
/// combination and precomputes everything reusable across samples.
struct Evaluator<'a> {
    family: RiskFamily,
    loss: Loss,
    f: &'a LinearClassifier,
    g: Option<&'a LinearClassifier>,
    solver: Option<ConstrainedSolver<'a>>,
    dual_w: f64,
    eps: f64,
}

impl<'a> Evaluator<'a> {
    fn new(
        family: RiskFamily,
        f: &'a LinearClassifier,
        g: Option<&'a LinearClassifier>,
        budget: PerturbationBudget,
        loss: Loss,
        data_dim: usize,
    ) -> Result<Self> {
        if f.dim() != data_dim {
            return Err(Error::Dimension(format!(
                "classifier has dimension {}, data has dimension {data_dim}",
                f.dim()
            )));
        }
        if let Some(g) = g {
            if g.dim() != data_dim {
                return Err(Error::Dimension(format!(
                    "base classifier has dimension {}, data has dimension {data_dim}",
                    g.dim()
                )));
            }
        }
        let needs_g = matches!(family, RiskFamily::HAdv | RiskFamily::RAdv);
        if needs_g && g.is_none() {
            return Err(Error::Domain(format!(
                "{family:?} is defined relative to a base classifier; none was given"
            )));
        }
        if family == RiskFamily::RAdv && budget.kind != NormKind::LInf {
            return Err(Error::Unsupported(
                "the base-relative adversarial risk uses the constrained attack, which is L-infinity only".into(),
            ));
        }
        let solver = if family == RiskFamily::RAdv {
            Some(ConstrainedSolver::new(f, g.unwrap())?)
        } else {
            None
        };
        Ok(Evaluator {
            family,
            loss,
            f,
            g,
            solver,
            dual_w: numerics::norm(&f.w, budget.kind.dual())?,
            eps: budget.eps,
        })
    }

    fn eval(&self, x: &[f64], y: f64) -> f64 {
        let f_score = numerics::dot(&self.f.w, x);
        match (self.family, self.loss) {
            (RiskFamily::Standard, Loss::ZeroOne) => zero_one(f_score, y),
            (RiskFamily::Standard, Loss::Logistic) => logistic_loss(y * f_score),
            (RiskFamily::WorstCase, Loss::ZeroOne) => {
                zero_one(f_score - y * self.eps * self.dual_w, y)
            }
            (RiskFamily::GAdv, Loss::ZeroOne) => {
                zero_one(f_score - y * self.eps * self.dual_w, y) - zero_one(f_score, y)
            }
            (RiskFamily::GAdv, Loss::Logistic) => {
                let margin = y * f_score;
                logistic_loss(margin - self.eps * self.dual_w) - logistic_loss(margin)
            }
            (RiskFamily::HAdv, Loss::ZeroOne) => {
                let s = numerics::sign(numerics::dot(&self.g.unwrap().w, x));
                zero_one(f_score - s * self.eps * self.dual_w, s) - zero_one(f_score, s)
            }
            (RiskFamily::RAdv, Loss::ZeroOne) => {
                let g_score = numerics::dot(&self.g.unwrap().w, x);
                let s = numerics::sign(g_score);
                if numerics::sign(f_score) != s {
                    // f already disagrees with the base classifier here;
                    // that is a standard error, not an adversarial one.
                    return 0.0;
                }
                let (objective, _) = self.solver.as_ref().unwrap().achieved(f_score, g_score, self.eps);
                if objective < 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            // Construction rejects the remaining combinations.
            (RiskFamily::WorstCase | RiskFamily::HAdv | RiskFamily::RAdv, Loss::Logistic) => {
                unreachable!("combination rejected at construction")
            }
        }
    }
}

fn summarize(name: RiskName, sum: f64, sumsq: f64, n: usize) -> RiskReport {
    let mean = sum / n as f64;
    let std_err = if n > 1 {
        let var = ((sumsq - sum * mean) / (n - 1) as f64).max(0.0);
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    RiskReport { risk_name: name, kind: RiskKind::MonteCarlo, value: mean, std_err, n, is_upper_bound: false }
}

/// Monte Carlo estimate of a risk over a materialized dataset. The inner
/// maximization is exact per sample (closed-form margin drop, or the
/// constrained attack for [`RiskFamily::RAdv`]), so the only randomness is
/// the sample itself.
///
/// `g` is the base classifier; it is required for `HAdv` and `RAdv` and
/// ignored otherwise. Unsupported combinations (`WorstCase`, `HAdv`, or
/// `RAdv` with the logistic loss; `RAdv` with an L2 budget) are rejected.
pub fn mc_risk(
    family: RiskFamily,
    f: &LinearClassifier,
    g: Option<&LinearClassifier>,
    data: &Dataset,
    budget: PerturbationBudget,
    loss: Loss,
) -> Result<RiskReport> {
    let name = risk_name(family, loss)?;
    let eval = Evaluator::new(family, f, g, budget, loss, data.dim())?;
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for (x, y) in data.iter() {
        let v = eval.eval(x, y);
        sum += v;
        sumsq += v * v;
    }
    Ok(summarize(name, sum, sumsq, data.len()))
}

/// Streaming variant of [`mc_risk`]: draws `n` fresh samples from the
/// mixture without materializing them, for evaluation sizes where the
/// dataset itself would dominate memory. Identical (model, n, seed) triples
/// give identical estimates.
pub fn mc_risk_sampled(
    family: RiskFamily,
    f: &LinearClassifier,
    g: Option<&LinearClassifier>,
    model: &GaussianMixture,
    n: usize,
    seed: u64,
    budget: PerturbationBudget,
    loss: Loss,
) -> Result<RiskReport> {
    let name = risk_name(family, loss)?;
    let eval = Evaluator::new(family, f, g, budget, loss, model.dim())?;
    let (mut sum, mut sumsq) = (0.0, 0.0);
    crate::model::for_each_mixture_sample(model, n, seed, |x, y| {
        let v = eval.eval(x, y);
        sum += v;
        sumsq += v * v;
    })?;
    Ok(summarize(name, sum, sumsq, n))
}

/// Empirical check of the two regularization bounds tying the excess
/// adversarial logistic risk to the dual-norm penalty eps·‖w‖_*, plus the
/// surrogate bound that replaces the true label with the base classifier's
/// sign. All three estimates and their verdicts are returned; nothing
/// panics on a violated inequality.
#[derive(Debug, Clone)]
pub struct RegBoundsReport {
    pub standard_logistic: RiskReport,
    pub gadv_logistic: RiskReport,
    pub standard_01: RiskReport,
    /// Mean of ℓ(s·w·x − eps·‖w‖_*) − ℓ(s·w·x) with s = sign(g.w·x).
    pub surrogate_value: f64,
    pub surrogate_std_err: f64,
    pub dual_norm_w: f64,
    pub eps: f64,
    pub lambda: f64,
    /// Penalized objective R + λ·G_adv and its closed upper bound
    /// R + λ·eps·‖w‖_*; equal when λ = 0.
    pub regularized_objective: f64,
    pub regularized_upper: f64,
    /// G_adv ≤ eps·‖w‖_* + 3·std_err.
    pub upper_holds: bool,
    /// G_adv ≥ (eps/2)·R_{0/1}·‖w‖_* − 3·std_err.
    pub lower_holds: bool,
    /// Surrogate mean ≤ eps·‖w‖_* + 3·std_err.
    pub surrogate_holds: bool,
}

/// Evaluates the regularization bounds for classifier `w` against base
/// classifier `g` on a dataset.
pub fn check_reg_bounds(
    w: &LinearClassifier,
    g: &LinearClassifier,
    data: &Dataset,
    budget: PerturbationBudget,
    lambda: f64,
) -> Result<RegBoundsReport> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let standard_logistic = mc_risk(RiskFamily::Standard, w, None, data, budget, Loss::Logistic)?;
    let gadv_logistic = mc_risk(RiskFamily::GAdv, w, None, data, budget, Loss::Logistic)?;
    let standard_01 = mc_risk(RiskFamily::Standard, w, None, data, budget, Loss::ZeroOne)?;
    let dual_norm_w = numerics::dual_norm(&w.w, budget.kind)?;
    if g.dim() != data.dim() {
        return Err(Error::Dimension(format!(
            "base classifier has dimension {}, data has dimension {}",
            g.dim(),
            data.dim()
        )));
    }

    let drop = budget.eps * dual_norm_w;
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for (x, _) in data.iter() {
        let s = numerics::sign(numerics::dot(&g.w, x));
        let base = s * numerics::dot(&w.w, x);
        let v = logistic_loss(base - drop) - logistic_loss(base);
        sum += v;
        sumsq += v * v;
    }
    let surrogate = summarize(RiskName::GAdvLogistic, sum, sumsq, data.len());

    let eps = budget.eps;
    Ok(RegBoundsReport {
        upper_holds: gadv_logistic.value <= drop + 3.0 * gadv_logistic.std_err,
        lower_holds: gadv_logistic.value
            >= (eps / 2.0) * standard_01.value * dual_norm_w - 3.0 * gadv_logistic.std_err,
        surrogate_holds: surrogate.value <= drop + 3.0 * surrogate.std_err,
        surrogate_value: surrogate.value,
        surrogate_std_err: surrogate.std_err,
        regularized_objective: standard_logistic.value + lambda * gadv_logistic.value,
        regularized_upper: standard_logistic.value + lambda * drop,
        standard_logistic,
        gadv_logistic,
        standard_01,
        dual_norm_w,
        eps,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_mixture, DistributionId};

    fn lc(w: &[f64]) -> LinearClassifier {
        LinearClassifier::new(w.to_vec()).unwrap()
    }

    fn linf(eps: f64) -> PerturbationBudget {
        PerturbationBudget::new(NormKind::LInf, eps).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn cf_standard_reference_values() {
        let model = GaussianMixture::new(vec![1.0, 1.0], 1.0).unwrap();
        let r = cf_standard_risk(&lc(&[1.0, 1.0]), &model).unwrap();
        close(r.value, 0.078650, 5e-7);
        assert_eq!(r.kind, RiskKind::ClosedForm);
        assert_eq!(r.n, 0);
        assert_eq!(r.std_err, 0.0);

        let h = 1.0 / 2.0_f64.sqrt();
        let model = GaussianMixture::new(vec![h, h, h, h], 1.0).unwrap();
        let r = cf_standard_risk(&lc(&[h, h, 0.0, 0.0]), &model).unwrap();
        close(r.value, 0.158655, 5e-7);

        let model = GaussianMixture::new(vec![1.0, 0.0], 1.0).unwrap();
        let r = cf_standard_risk(&lc(&[0.0, 1.0]), &model).unwrap();
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn cf_standard_rejects_degenerate_margin() {
        let mask = Some(vec![true, false]);
        let model = GaussianMixture::with_mask(vec![1.0, 0.0], 1.0, mask).unwrap();
        assert!(matches!(cf_standard_risk(&lc(&[0.0, 1.0]), &model), Err(Error::Domain(_))));
        let flat = GaussianMixture::new(vec![1.0], 0.0).unwrap();
        assert!(cf_standard_risk(&lc(&[1.0]), &flat).is_err());
    }

    #[test]
    fn cf_worst_case_values() {
        let model = GaussianMixture::new(vec![1.0, 0.0], 1.0).unwrap();
        let w = lc(&[1.0, 0.0]);
        let r0 = cf_worst_case_adv_risk(&w, &model, linf(0.0)).unwrap();
        assert_eq!(r0.value, cf_standard_risk(&w, &model).unwrap().value);
        let r = cf_worst_case_adv_risk(&w, &model, linf(0.5)).unwrap();
        close(r.value, 0.308538, 5e-7);
    }

    #[test]
    fn cf_excess_values() {
        let model = GaussianMixture::new(vec![1.0, 0.0], 1.0).unwrap();
        let w = lc(&[1.0, 0.0]);
        assert_eq!(cf_excess_adv_risk(&w, &model, linf(0.0)).unwrap().value, 0.0);
        close(cf_excess_adv_risk(&w, &model, linf(0.5)).unwrap().value, 0.149882, 5e-7);

        // Orthogonal w: excess = Φ(eps·‖w‖₁/‖w‖₂) − 1/2.
        let w = lc(&[0.0, 1.0]);
        let r = cf_excess_adv_risk(&w, &model, linf(0.3)).unwrap();
        close(r.value, normal_cdf(0.3).unwrap() - 0.5, 1e-15);
    }

    #[test]
    fn cf_bound_edge_cases() {
        let model = GaussianMixture::new(vec![1.0, 0.0], 1.0).unwrap();
        let same = cf_new_adv_risk_bound(&lc(&[1.0, 0.0]), &model, linf(0.5)).unwrap();
        assert_eq!(same.value, 0.0);
        assert!(same.is_upper_bound);

        // w − w* confined to zero-variance coordinates: the bound's argument
        // degenerates and the limit value is reported.
        let masked = GaussianMixture::with_mask(vec![1.0, 0.0], 1.0, Some(vec![true, false])).unwrap();
        let deg = cf_new_adv_risk_bound(&lc(&[1.0, 0.5]), &masked, linf(0.5)).unwrap();
        assert_eq!(deg.value, 1.0);
        let deg0 = cf_new_adv_risk_bound(&lc(&[1.0, 0.5]), &masked, linf(0.0)).unwrap();
        assert_eq!(deg0.value, 0.0);

        let budget = PerturbationBudget::new(NormKind::L2, 0.5).unwrap();
        assert!(matches!(
            cf_new_adv_risk_bound(&lc(&[1.0, 0.0]), &model, budget),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn mc_gadv_identity_is_exact() {
        let model = GaussianMixture::new(vec![0.8, -0.3], 1.0).unwrap();
        let data = sample_mixture(&model, 4000, 17).unwrap();
        let w = lc(&[1.0, 0.4]);
        let budget = linf(0.35);
        let std = mc_risk(RiskFamily::Standard, &w, None, &data, budget, Loss::ZeroOne).unwrap();
        let worst = mc_risk(RiskFamily::WorstCase, &w, None, &data, budget, Loss::ZeroOne).unwrap();
        let gadv = mc_risk(RiskFamily::GAdv, &w, None, &data, budget, Loss::ZeroOne).unwrap();
        assert_eq!(gadv.value, worst.value - std.value);
    }

    #[test]
    fn mc_radv_of_base_classifier_is_zero() {
        let model = GaussianMixture::new(vec![0.5, 0.5, -0.5], 1.0).unwrap();
        let g = crate::model::bayes_classifier(&model).unwrap();
        let data = sample_mixture(&model, 2000, 3).unwrap();
        let r = mc_risk(RiskFamily::RAdv, &g, Some(&g), &data, linf(2.0), Loss::ZeroOne).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.std_err, 0.0);
    }

    #[test]
    fn mc_logistic_gadv_matches_margin_drop() {
        let xs = vec![vec![0.7, -0.4]];
        let data = Dataset::from_parts(xs, vec![1.0], DistributionId::External, 0).unwrap();
        let w = lc(&[1.2, 0.3]);
        let budget = linf(0.25);
        let r = mc_risk(RiskFamily::GAdv, &w, None, &data, budget, Loss::Logistic).unwrap();
        let margin = 1.0 * (1.2 * 0.7 + 0.3 * -0.4);
        let drop = 0.25 * (1.2 + 0.3);
        assert_eq!(r.value, logistic_loss(margin - drop) - logistic_loss(margin));
        assert_eq!(r.std_err, 0.0);
    }

    #[test]
    fn mc_rejects_unsupported_combinations() {
        let model = GaussianMixture::new(vec![1.0], 1.0).unwrap();
        let data = sample_mixture(&model, 4, 0).unwrap();
        let w = lc(&[1.0]);
        let b = linf(0.1);
        for family in [RiskFamily::WorstCase, RiskFamily::HAdv, RiskFamily::RAdv] {
            assert!(matches!(
                mc_risk(family, &w, Some(&w), &data, b, Loss::Logistic),
                Err(Error::Unsupported(_))
            ));
        }
        for family in [RiskFamily::HAdv, RiskFamily::RAdv] {
            assert!(matches!(
                mc_risk(family, &w, None, &data, b, Loss::ZeroOne),
                Err(Error::Domain(_))
            ));
        }
        let l2 = PerturbationBudget::new(NormKind::L2, 0.1).unwrap();
        assert!(matches!(
            mc_risk(RiskFamily::RAdv, &w, Some(&w), &data, l2, Loss::ZeroOne),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sampled_estimator_matches_materialized() {
        let model = GaussianMixture::new(vec![1.0, -0.5], 0.8).unwrap();
        let w = lc(&[0.9, 0.1]);
        let data = sample_mixture(&model, 5000, 77).unwrap();
        let a = mc_risk(RiskFamily::WorstCase, &w, None, &data, linf(0.2), Loss::ZeroOne).unwrap();
        let b = mc_risk_sampled(RiskFamily::WorstCase, &w, None, &model, 5000, 77, linf(0.2), Loss::ZeroOne)
            .unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.std_err, b.std_err);
    }

    #[test]
    fn reg_bounds_small_case() {
        let model = GaussianMixture::new(vec![2.0, 0.0], 1.0).unwrap();
        let w = crate::model::bayes_classifier(&model).unwrap();
        let data = sample_mixture(&model, 20_000, 5).unwrap();
        let rep = check_reg_bounds(&w, &w, &data, linf(0.1), 1.0).unwrap();
        assert!(rep.upper_holds);
        assert!(rep.lower_holds);
        assert!(rep.surrogate_holds);

        let zero_eps = check_reg_bounds(&w, &w, &data, linf(0.0), 0.0).unwrap();
        assert_eq!(zero_eps.gadv_logistic.value, 0.0);
        assert_eq!(zero_eps.regularized_objective, zero_eps.regularized_upper);
        assert!(check_reg_bounds(&w, &w, &data, linf(0.1), -1.0).is_err());
    }

    #[test]
    fn csv_row_format() {
        let rep = RiskReport {
            risk_name: RiskName::GAdv01,
            kind: RiskKind::MonteCarlo,
            value: 0.25,
            std_err: 0.001,
            n: 1000,
            is_upper_bound: false,
        };
        assert_eq!(RiskReport::csv_header(), "risk_name,kind,value,std_err,n,eps,lambda,seed");
        assert_eq!(rep.csv_row(0.5, 2.0, 42), "gadv_01,monte_carlo,0.25,0.001,1000,0.5,2,42");
    }

    #[test]
    fn risk_name_strings() {
        assert_eq!(RiskName::Standard01.to_string(), "standard_01");
        assert_eq!(RiskName::StandardLogistic.to_string(), "standard_logistic");
        assert_eq!(RiskName::WorstCase01.to_string(), "worst_case_01");
        assert_eq!(RiskName::RAdv01.to_string(), "radv_01");
        assert_eq!(RiskKind::ClosedForm.to_string(), "closed_form");
    }
}

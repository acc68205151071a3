//! C interface to the adversarial-risk library.
//!
//! Every entry point is `extern "C"`, returns an [`AdvrStatus`] code (out
//! values go through pointer arguments), stores a human-readable message for
//! the most recent failure in thread-local storage, and catches panics at the
//! boundary so they surface as [`AdvrStatus::Internal`] instead of unwinding
//! into C. Heap-backed objects cross the boundary as opaque handles with
//! explicit `_new`/`_free` pairs; everything else uses caller-owned flat
//! arrays of `double`.
//!
//! The build script regenerates `include/advrisk.h` from this file with
//! cbindgen; the header is committed so C consumers do not need the Rust
//! toolchain.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::slice;

use advrisk::attack::{attack_constrained, attack_unconstrained};
use advrisk::model::{
    bayes_classifier, sample_mixture, sample_squares, Dataset, GaussianMixture, LinearClassifier,
    PerturbationBudget,
};
use advrisk::numerics::NormKind;
use advrisk::risk::{
    cf_excess_adv_risk, cf_new_adv_risk_bound, cf_standard_risk, cf_worst_case_adv_risk, mc_risk,
    Loss, RiskFamily,
};
use advrisk::train::{train, Init, TrainConfig};
use advrisk::Error;

/// Result code returned by every fallible function in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvrStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArg = 1,
    /// An argument violated a documented precondition (bad dimension,
    /// non-finite value, invalid label, malformed input file, ...).
    InvalidArg = 2,
    /// The requested combination is intentionally not implemented.
    Unsupported = 3,
    /// Training produced a non-finite iterate or objective.
    Diverged = 4,
    /// A file operation failed.
    Io = 5,
    /// A panic was caught at the language boundary; this is a bug in the
    /// library, not in the caller.
    Internal = 6,
}

/// Norm bounding the perturbation ball.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvrNorm {
    Linf = 0,
    L2 = 1,
}

/// Loss function for Monte Carlo risk estimates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvrLoss {
    ZeroOne = 0,
    Logistic = 1,
}

/// Which risk a Monte Carlo estimate targets. `Standard` is the plain
/// misclassification risk, `WorstCase` takes the supremum of the loss over
/// the perturbation ball, `Gadv` is the excess of that supremum over the
/// standard loss, `Hadv` compares against the base classifier's label, and
/// `Radv` counts points where f agrees with the base classifier g yet a
/// perturbation that preserves g's label flips f.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvrRiskFamily {
    Standard = 0,
    WorstCase = 1,
    Gadv = 2,
    Hadv = 3,
    Radv = 4,
}

/// Weight initialization for training.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvrInit {
    /// All-zero start; `scale` and `init_seed` are ignored.
    Zeros = 0,
    /// Independent centered Gaussian coordinates with the given scale,
    /// drawn deterministically from `init_seed`.
    Gaussian = 1,
}

/// Scalar facts about one attack, next to the perturbation itself.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AdvrAttackInfo {
    /// Score w·(x+δ) at the perturbed point.
    pub achieved_score: f64,
    /// Whether the attack flipped the classifier's sign (for the constrained
    /// attack, landing exactly on the boundary does not count).
    pub flipped: bool,
    /// Whether the sign-preservation constraint shaped the answer; always
    /// false for unconstrained attacks.
    pub constraint_active: bool,
}

/// Opaque handle to a labeled Gaussian mixture model.
pub struct AdvrMixture(GaussianMixture);

/// Opaque handle to an immutable labeled sample set.
pub struct AdvrDataset(Dataset);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: String) {
    let stored = CString::new(message)
        .unwrap_or_else(|_| CString::new("error message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = stored);
}

fn fail(err: Error) -> AdvrStatus {
    let status = match err {
        Error::Domain(_) | Error::Dimension(_) => AdvrStatus::InvalidArg,
        Error::Unsupported(_) => AdvrStatus::Unsupported,
        Error::Diverged { .. } => AdvrStatus::Diverged,
        Error::Io { .. } => AdvrStatus::Io,
    };
    set_last_error(err.to_string());
    status
}

fn null_arg(name: &str) -> AdvrStatus {
    set_last_error(format!("{name} must not be null"));
    AdvrStatus::NullArg
}

/// Runs a body, converting a panic into `Internal` instead of unwinding
/// across the C boundary.
fn guarded(body: impl FnOnce() -> AdvrStatus) -> AdvrStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| {
        set_last_error("internal panic".into());
        AdvrStatus::Internal
    })
}

fn budget_of(norm: AdvrNorm, eps: f64) -> Result<PerturbationBudget, Error> {
    let kind = match norm {
        AdvrNorm::Linf => NormKind::LInf,
        AdvrNorm::L2 => NormKind::L2,
    };
    PerturbationBudget::new(kind, eps)
}

fn family_of(family: AdvrRiskFamily) -> RiskFamily {
    match family {
        AdvrRiskFamily::Standard => RiskFamily::Standard,
        AdvrRiskFamily::WorstCase => RiskFamily::WorstCase,
        AdvrRiskFamily::Gadv => RiskFamily::GAdv,
        AdvrRiskFamily::Hadv => RiskFamily::HAdv,
        AdvrRiskFamily::Radv => RiskFamily::RAdv,
    }
}

fn loss_of(loss: AdvrLoss) -> Loss {
    match loss {
        AdvrLoss::ZeroOne => Loss::ZeroOne,
        AdvrLoss::Logistic => Loss::Logistic,
    }
}

/// Library version as a static NUL-terminated string; never null, never
/// freed by the caller.
#[no_mangle]
pub extern "C" fn advr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on the calling thread, or an empty
/// string if nothing has failed yet. The pointer stays valid until the next
/// failing call on the same thread; the caller must not free it.
#[no_mangle]
pub extern "C" fn advr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Creates a mixture model x | y ~ N(y·w_star, σ²·D) with fair ±1 labels.
///
/// `support_mask` may be null (full support); otherwise it holds `dim` bytes
/// where nonzero marks an on-support coordinate, and off-support coordinates
/// get exactly zero noise and mean.
///
/// On success writes a handle to `*out`; release it with
/// [`advr_mixture_free`].
///
/// # Safety
/// `w_star` must point to `dim` readable doubles, `support_mask` to `dim`
/// readable bytes when non-null, and `out` to writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn advr_mixture_new(
    w_star: *const f64,
    dim: usize,
    sigma: f64,
    support_mask: *const u8,
    out: *mut *mut AdvrMixture,
) -> AdvrStatus {
    guarded(|| {
        if w_star.is_null() {
            return null_arg("w_star");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let w = slice::from_raw_parts(w_star, dim).to_vec();
        let mask = (!support_mask.is_null())
            .then(|| slice::from_raw_parts(support_mask, dim).iter().map(|&b| b != 0).collect());
        match GaussianMixture::with_mask(w, sigma, mask) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(AdvrMixture(model)));
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Releases a mixture handle. Null is a no-op.
///
/// # Safety
/// `model` must have come from [`advr_mixture_new`] and not been freed
/// already.
#[no_mangle]
pub unsafe extern "C" fn advr_mixture_free(model: *mut AdvrMixture) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Draws `n` labeled samples from the mixture into a new dataset handle.
/// Identical (model, n, seed) triples produce bit-identical datasets.
///
/// # Safety
/// `model` must be a live handle from [`advr_mixture_new`] and `out` must
/// point to writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn advr_mixture_sample(
    model: *const AdvrMixture,
    n: usize,
    seed: u64,
    out: *mut *mut AdvrDataset,
) -> AdvrStatus {
    guarded(|| {
        if model.is_null() {
            return null_arg("model");
        }
        if out.is_null() {
            return null_arg("out");
        }
        match sample_mixture(&(*model).0, n, seed) {
            Ok(data) => {
                *out = Box::into_raw(Box::new(AdvrDataset(data)));
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Writes the Bayes-optimal linear classifier of the mixture (its mean
/// vector) into `out_w`.
///
/// # Safety
/// `model` must be a live handle and `out_w` must point to `dim` writable
/// doubles, where `dim` is the model's dimension.
#[no_mangle]
pub unsafe extern "C" fn advr_bayes_classifier(
    model: *const AdvrMixture,
    out_w: *mut f64,
) -> AdvrStatus {
    guarded(|| {
        if model.is_null() {
            return null_arg("model");
        }
        if out_w.is_null() {
            return null_arg("out_w");
        }
        match bayes_classifier(&(*model).0) {
            Ok(g) => {
                slice::from_raw_parts_mut(out_w, g.w.len()).copy_from_slice(&g.w);
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Draws `n` samples of the planar two-squares distribution (side-2 squares
/// centered at (±2, 0); the right square is labeled +1 with probability 0.7,
/// the left with probability 0.3) into a new dataset handle.
///
/// # Safety
/// `out` must point to writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn advr_squares_sample(
    n: usize,
    seed: u64,
    out: *mut *mut AdvrDataset,
) -> AdvrStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        match sample_squares(n, seed) {
            Ok(data) => {
                *out = Box::into_raw(Box::new(AdvrDataset(data)));
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Number of samples in a dataset.
///
/// # Safety
/// `data` must be a live dataset handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn advr_dataset_len(data: *const AdvrDataset, out: *mut usize) -> AdvrStatus {
    guarded(|| {
        if data.is_null() {
            return null_arg("data");
        }
        if out.is_null() {
            return null_arg("out");
        }
        *out = (*data).0.len();
        AdvrStatus::Ok
    })
}

/// Point dimension of a dataset.
///
/// # Safety
/// `data` must be a live dataset handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn advr_dataset_dim(data: *const AdvrDataset, out: *mut usize) -> AdvrStatus {
    guarded(|| {
        if data.is_null() {
            return null_arg("data");
        }
        if out.is_null() {
            return null_arg("out");
        }
        *out = (*data).0.dim();
        AdvrStatus::Ok
    })
}

/// Saves a dataset to CSV (`y,x0,x1,...` with a header row).
///
/// # Safety
/// `data` must be a live dataset handle and `path` a NUL-terminated UTF-8
/// string.
#[no_mangle]
pub unsafe extern "C" fn advr_dataset_save_csv(
    data: *const AdvrDataset,
    path: *const c_char,
) -> AdvrStatus {
    guarded(|| {
        if data.is_null() {
            return null_arg("data");
        }
        if path.is_null() {
            return null_arg("path");
        }
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            set_last_error("path is not valid UTF-8".into());
            return AdvrStatus::InvalidArg;
        };
        match (*data).0.save_csv(Path::new(path)) {
            Ok(()) => AdvrStatus::Ok,
            Err(err) => fail(err),
        }
    })
}

/// Releases a dataset handle. Null is a no-op.
///
/// # Safety
/// `data` must have come from a sampling function and not been freed
/// already.
#[no_mangle]
pub unsafe extern "C" fn advr_dataset_free(data: *mut AdvrDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

unsafe fn classifier_from(w: *const f64, dim: usize) -> Result<LinearClassifier, Error> {
    LinearClassifier::new(slice::from_raw_parts(w, dim).to_vec())
}

/// Exact standard 0/1 risk of the classifier `w` on the mixture:
/// Φ(−w·w*/(σ‖w_masked‖₂)).
///
/// # Safety
/// `w` must point to `dim` readable doubles matching the model's dimension;
/// `model` must be a live handle; `out_value` must be writable. Enum
/// arguments throughout this interface must be valid enumerators.
#[no_mangle]
pub unsafe extern "C" fn advr_cf_standard_risk(
    w: *const f64,
    dim: usize,
    model: *const AdvrMixture,
    out_value: *mut f64,
) -> AdvrStatus {
    guarded(|| {
        if w.is_null() {
            return null_arg("w");
        }
        if model.is_null() {
            return null_arg("model");
        }
        if out_value.is_null() {
            return null_arg("out_value");
        }
        match classifier_from(w, dim).and_then(|f| cf_standard_risk(&f, &(*model).0)) {
            Ok(report) => {
                *out_value = report.value;
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Exact worst-case adversarial 0/1 risk of `w` on the mixture under the
/// given perturbation budget.
///
/// # Safety
/// Same requirements as [`advr_cf_standard_risk`].
#[no_mangle]
pub unsafe extern "C" fn advr_cf_worst_case_adv_risk(
    w: *const f64,
    dim: usize,
    model: *const AdvrMixture,
    norm: AdvrNorm,
    eps: f64,
    out_value: *mut f64,
) -> AdvrStatus {
    guarded(|| {
        if w.is_null() {
            return null_arg("w");
        }
        if model.is_null() {
            return null_arg("model");
        }
        if out_value.is_null() {
            return null_arg("out_value");
        }
        let result = classifier_from(w, dim).and_then(|f| {
            let budget = budget_of(norm, eps)?;
            cf_worst_case_adv_risk(&f, &(*model).0, budget)
        });
        match result {
            Ok(report) => {
                *out_value = report.value;
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Exact excess adversarial 0/1 risk (worst-case minus standard) of `w` on
/// the mixture.
///
/// # Safety
/// Same requirements as [`advr_cf_standard_risk`].
#[no_mangle]
pub unsafe extern "C" fn advr_cf_excess_adv_risk(
    w: *const f64,
    dim: usize,
    model: *const AdvrMixture,
    norm: AdvrNorm,
    eps: f64,
    out_value: *mut f64,
) -> AdvrStatus {
    guarded(|| {
        if w.is_null() {
            return null_arg("w");
        }
        if model.is_null() {
            return null_arg("model");
        }
        if out_value.is_null() {
            return null_arg("out_value");
        }
        let result = classifier_from(w, dim).and_then(|f| {
            let budget = budget_of(norm, eps)?;
            cf_excess_adv_risk(&f, &(*model).0, budget)
        });
        match result {
            Ok(report) => {
                *out_value = report.value;
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Closed-form upper bound on the base-relative adversarial risk of `w`
/// against the mixture's Bayes classifier; L∞ budgets only (an L2 budget
/// returns `Unsupported`).
///
/// # Safety
/// Same requirements as [`advr_cf_standard_risk`].
#[no_mangle]
pub unsafe extern "C" fn advr_cf_new_adv_risk_bound(
    w: *const f64,
    dim: usize,
    model: *const AdvrMixture,
    norm: AdvrNorm,
    eps: f64,
    out_value: *mut f64,
) -> AdvrStatus {
    guarded(|| {
        if w.is_null() {
            return null_arg("w");
        }
        if model.is_null() {
            return null_arg("model");
        }
        if out_value.is_null() {
            return null_arg("out_value");
        }
        let result = classifier_from(w, dim).and_then(|f| {
            let budget = budget_of(norm, eps)?;
            cf_new_adv_risk_bound(&f, &(*model).0, budget)
        });
        match result {
            Ok(report) => {
                *out_value = report.value;
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Monte Carlo risk estimate of classifier `f` on a dataset. `g` is the base
/// classifier; `Hadv` and `Radv` require it, the other families ignore it,
/// and null means absent. Writes the estimate to `*out_value` and its
/// standard error to `*out_std_err` (which may be null to skip it).
///
/// Supported (family, loss) pairs: every family with the 0/1 loss, plus
/// `Standard` and `Gadv` with the logistic loss; other logistic pairs return
/// `Unsupported`.
///
/// # Safety
/// `f` (and `g` when non-null) must point to `dim` readable doubles matching
/// the dataset's dimension; `data` must be a live handle; `out_value` must
/// be writable, and `out_std_err` too when non-null.
#[no_mangle]
pub unsafe extern "C" fn advr_mc_risk(
    family: AdvrRiskFamily,
    loss: AdvrLoss,
    f: *const f64,
    g: *const f64,
    dim: usize,
    data: *const AdvrDataset,
    norm: AdvrNorm,
    eps: f64,
    out_value: *mut f64,
    out_std_err: *mut f64,
) -> AdvrStatus {
    guarded(|| {
        if f.is_null() {
            return null_arg("f");
        }
        if data.is_null() {
            return null_arg("data");
        }
        if out_value.is_null() {
            return null_arg("out_value");
        }
        let result = classifier_from(f, dim).and_then(|fw| {
            let gw = if g.is_null() { None } else { Some(classifier_from(g, dim)?) };
            let budget = budget_of(norm, eps)?;
            mc_risk(family_of(family), &fw, gw.as_ref(), &(*data).0, budget, loss_of(loss))
        });
        match result {
            Ok(report) => {
                *out_value = report.value;
                if !out_std_err.is_null() {
                    *out_std_err = report.std_err;
                }
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Worst-case perturbation of the point `x` with target label `y` (±1)
/// against classifier `w`: minimizes y·w·(x+δ) over the budget ball. Writes
/// the perturbation into `out_delta` and the scalar outcome into `out_info`.
///
/// # Safety
/// `w` and `x` must point to `dim` readable doubles, `out_delta` to `dim`
/// writable doubles, and `out_info` to a writable [`AdvrAttackInfo`].
#[no_mangle]
pub unsafe extern "C" fn advr_attack_unconstrained(
    w: *const f64,
    dim: usize,
    x: *const f64,
    y: f64,
    norm: AdvrNorm,
    eps: f64,
    out_delta: *mut f64,
    out_info: *mut AdvrAttackInfo,
) -> AdvrStatus {
    guarded(|| {
        if w.is_null() {
            return null_arg("w");
        }
        if x.is_null() {
            return null_arg("x");
        }
        if out_delta.is_null() {
            return null_arg("out_delta");
        }
        if out_info.is_null() {
            return null_arg("out_info");
        }
        let result = classifier_from(w, dim).and_then(|f| {
            let budget = budget_of(norm, eps)?;
            attack_unconstrained(&f, slice::from_raw_parts(x, dim), y, budget)
        });
        match result {
            Ok(attack) => {
                slice::from_raw_parts_mut(out_delta, dim).copy_from_slice(&attack.delta);
                *out_info = AdvrAttackInfo {
                    achieved_score: attack.achieved_score,
                    flipped: attack.flipped,
                    constraint_active: attack.constraint_active,
                };
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Strongest perturbation of `x` against classifier `w` that keeps the base
/// classifier `g`'s sign at `x` unchanged; L∞ budgets only (an L2 budget
/// returns `Unsupported`). Writes the perturbation into `out_delta` and the
/// scalar outcome into `out_info`.
///
/// # Safety
/// `w`, `g`, and `x` must point to `dim` readable doubles, `out_delta` to
/// `dim` writable doubles, and `out_info` to a writable [`AdvrAttackInfo`].
#[no_mangle]
pub unsafe extern "C" fn advr_attack_constrained(
    w: *const f64,
    g: *const f64,
    dim: usize,
    x: *const f64,
    norm: AdvrNorm,
    eps: f64,
    out_delta: *mut f64,
    out_info: *mut AdvrAttackInfo,
) -> AdvrStatus {
    guarded(|| {
        if w.is_null() {
            return null_arg("w");
        }
        if g.is_null() {
            return null_arg("g");
        }
        if x.is_null() {
            return null_arg("x");
        }
        if out_delta.is_null() {
            return null_arg("out_delta");
        }
        if out_info.is_null() {
            return null_arg("out_info");
        }
        let result = classifier_from(w, dim).and_then(|f| {
            let base = classifier_from(g, dim)?;
            let budget = budget_of(norm, eps)?;
            attack_constrained(&f, &base, slice::from_raw_parts(x, dim), budget)
        });
        match result {
            Ok(attack) => {
                slice::from_raw_parts_mut(out_delta, dim).copy_from_slice(&attack.delta);
                *out_info = AdvrAttackInfo {
                    achieved_score: attack.achieved_score,
                    flipped: attack.flipped,
                    constraint_active: attack.constraint_active,
                };
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Trains a linear classifier on the dataset by full-batch gradient descent
/// on the joint objective: mean logistic loss plus `lambda` times the mean
/// worst-case logistic excess at budget `eps`. `lambda = 0` reduces to plain
/// logistic regression. Writes the trained weights into `out_w` (sized to
/// the dataset's dimension) and, when `out_objective` is non-null, the final
/// objective value.
///
/// Identical inputs produce bit-identical results. `lr` must be positive
/// and `iters` at least 1; 0.05 and 2000 are the tuned defaults.
///
/// # Safety
/// `data` must be a live dataset handle; `out_w` must point to as many
/// writable doubles as [`advr_dataset_dim`] reports; `out_objective` must be
/// writable when non-null.
#[no_mangle]
pub unsafe extern "C" fn advr_train(
    data: *const AdvrDataset,
    lambda: f64,
    norm: AdvrNorm,
    eps: f64,
    lr: f64,
    iters: usize,
    init: AdvrInit,
    init_scale: f64,
    init_seed: u64,
    out_w: *mut f64,
    out_objective: *mut f64,
) -> AdvrStatus {
    guarded(|| {
        if data.is_null() {
            return null_arg("data");
        }
        if out_w.is_null() {
            return null_arg("out_w");
        }
        let result = budget_of(norm, eps).and_then(|budget| {
            let mut cfg = TrainConfig::new(lambda, budget);
            cfg.lr = lr;
            cfg.iters = iters;
            cfg.init = match init {
                AdvrInit::Zeros => Init::Zeros,
                AdvrInit::Gaussian => Init::Gaussian { scale: init_scale, seed: init_seed },
            };
            train(&(*data).0, &cfg)
        });
        match result {
            Ok(outcome) => {
                slice::from_raw_parts_mut(out_w, outcome.w_final.w.len())
                    .copy_from_slice(&outcome.w_final.w);
                if !out_objective.is_null() {
                    *out_objective = *outcome.objective_history.last().unwrap();
                }
                AdvrStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

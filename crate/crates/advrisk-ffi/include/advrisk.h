/* C interface to the advrisk library. Generated by cbindgen; do not edit. */

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Weight initialization for training.
typedef enum AdvrInit {
  // All-zero start; `scale` and `init_seed` are ignored.
  ADVR_INIT_ZEROS = 0,
  // Independent centered Gaussian coordinates with the given scale,
  // drawn deterministically from `init_seed`.
  ADVR_INIT_GAUSSIAN = 1,
} AdvrInit;

// Loss function for Monte Carlo risk estimates.
typedef enum AdvrLoss {
  ADVR_LOSS_ZERO_ONE = 0,
  ADVR_LOSS_LOGISTIC = 1,
} AdvrLoss;

// Norm bounding the perturbation ball.
typedef enum AdvrNorm {
  ADVR_NORM_LINF = 0,
  ADVR_NORM_L2 = 1,
} AdvrNorm;

// Which risk a Monte Carlo estimate targets. `Standard` is the plain
// misclassification risk, `WorstCase` takes the supremum of the loss over
// the perturbation ball, `Gadv` is the excess of that supremum over the
// standard loss, `Hadv` compares against the base classifier's label, and
// `Radv` counts points where f agrees with the base classifier g yet a
// perturbation that preserves g's label flips f.
typedef enum AdvrRiskFamily {
  ADVR_RISK_FAMILY_STANDARD = 0,
  ADVR_RISK_FAMILY_WORST_CASE = 1,
  ADVR_RISK_FAMILY_GADV = 2,
  ADVR_RISK_FAMILY_HADV = 3,
  ADVR_RISK_FAMILY_RADV = 4,
} AdvrRiskFamily;

// Result code returned by every fallible function in this interface.
typedef enum AdvrStatus {
  // The call succeeded.
  ADVR_STATUS_OK = 0,
  // A required pointer argument was null.
  ADVR_STATUS_NULL_ARG = 1,
  // An argument violated a documented precondition (bad dimension,
  // non-finite value, invalid label, malformed input file, ...).
  ADVR_STATUS_INVALID_ARG = 2,
  // The requested combination is intentionally not implemented.
  ADVR_STATUS_UNSUPPORTED = 3,
  // Training produced a non-finite iterate or objective.
  ADVR_STATUS_DIVERGED = 4,
  // A file operation failed.
  ADVR_STATUS_IO = 5,
  // A panic was caught at the language boundary; this is a bug in the
  // library, not in the caller.
  ADVR_STATUS_INTERNAL = 6,
} AdvrStatus;

// Opaque handle to an immutable labeled sample set.
typedef struct AdvrDataset AdvrDataset;

// Opaque handle to a labeled Gaussian mixture model.
typedef struct AdvrMixture AdvrMixture;

// Scalar facts about one attack, next to the perturbation itself.
typedef struct AdvrAttackInfo {
  // Score w·(x+δ) at the perturbed point.
  double achieved_score;
  // Whether the attack flipped the classifier's sign (for the constrained
  // attack, landing exactly on the boundary does not count).
  bool flipped;
  // Whether the sign-preservation constraint shaped the answer; always
  // false for unconstrained attacks.
  bool constraint_active;
} AdvrAttackInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string; never null, never
// freed by the caller.
const char *advr_version(void);

// Message for the most recent failure on the calling thread, or an empty
// string if nothing has failed yet. The pointer stays valid until the next
// failing call on the same thread; the caller must not free it.
const char *advr_last_error_message(void);

// Creates a mixture model x | y ~ N(y·w_star, σ²·D) with fair ±1 labels.
//
// `support_mask` may be null (full support); otherwise it holds `dim` bytes
// where nonzero marks an on-support coordinate, and off-support coordinates
// get exactly zero noise and mean.
//
// On success writes a handle to `*out`; release it with
// [`advr_mixture_free`].
//
// # Safety
// `w_star` must point to `dim` readable doubles, `support_mask` to `dim`
// readable bytes when non-null, and `out` to writable pointer storage.
enum AdvrStatus advr_mixture_new(const double *w_star,
                                 size_t dim,
                                 double sigma,
                                 const uint8_t *support_mask,
                                 struct AdvrMixture **out);

// Releases a mixture handle. Null is a no-op.
//
// # Safety
// `model` must have come from [`advr_mixture_new`] and not been freed
// already.
void advr_mixture_free(struct AdvrMixture *model);

// Draws `n` labeled samples from the mixture into a new dataset handle.
// Identical (model, n, seed) triples produce bit-identical datasets.
//
// # Safety
// `model` must be a live handle from [`advr_mixture_new`] and `out` must
// point to writable pointer storage.
enum AdvrStatus advr_mixture_sample(const struct AdvrMixture *model,
                                    size_t n,
                                    uint64_t seed,
                                    struct AdvrDataset **out);

// Writes the Bayes-optimal linear classifier of the mixture (its mean
// vector) into `out_w`.
//
// # Safety
// `model` must be a live handle and `out_w` must point to `dim` writable
// doubles, where `dim` is the model's dimension.
enum AdvrStatus advr_bayes_classifier(const struct AdvrMixture *model, double *out_w);

// Draws `n` samples of the planar two-squares distribution (side-2 squares
// centered at (±2, 0); the right square is labeled +1 with probability 0.7,
// the left with probability 0.3) into a new dataset handle.
//
// # Safety
// `out` must point to writable pointer storage.
enum AdvrStatus advr_squares_sample(size_t n, uint64_t seed, struct AdvrDataset **out);

// Number of samples in a dataset.
//
// # Safety
// `data` must be a live dataset handle and `out` must be writable.
enum AdvrStatus advr_dataset_len(const struct AdvrDataset *data, size_t *out);

// Point dimension of a dataset.
//
// # Safety
// `data` must be a live dataset handle and `out` must be writable.
enum AdvrStatus advr_dataset_dim(const struct AdvrDataset *data, size_t *out);

// Saves a dataset to CSV (`y,x0,x1,...` with a header row).
//
// # Safety
// `data` must be a live dataset handle and `path` a NUL-terminated UTF-8
// string.
enum AdvrStatus advr_dataset_save_csv(const struct AdvrDataset *data, const char *path);

// Releases a dataset handle. Null is a no-op.
//
// # Safety
// `data` must have come from a sampling function and not been freed
// already.
void advr_dataset_free(struct AdvrDataset *data);

// Exact standard 0/1 risk of the classifier `w` on the mixture:
// Φ(−w·w*/(σ‖w_masked‖₂)).
//
// # Safety
// `w` must point to `dim` readable doubles matching the model's dimension;
// `model` must be a live handle; `out_value` must be writable. Enum
// arguments throughout this interface must be valid enumerators.
enum AdvrStatus advr_cf_standard_risk(const double *w,
                                      size_t dim,
                                      const struct AdvrMixture *model,
                                      double *out_value);

// Exact worst-case adversarial 0/1 risk of `w` on the mixture under the
// given perturbation budget.
//
// # Safety
// Same requirements as [`advr_cf_standard_risk`].
enum AdvrStatus advr_cf_worst_case_adv_risk(const double *w,
                                            size_t dim,
                                            const struct AdvrMixture *model,
                                            enum AdvrNorm norm,
                                            double eps,
                                            double *out_value);

// Exact excess adversarial 0/1 risk (worst-case minus standard) of `w` on
// the mixture.
//
// # Safety
// Same requirements as [`advr_cf_standard_risk`].
enum AdvrStatus advr_cf_excess_adv_risk(const double *w,
                                        size_t dim,
                                        const struct AdvrMixture *model,
                                        enum AdvrNorm norm,
                                        double eps,
                                        double *out_value);

// Closed-form upper bound on the base-relative adversarial risk of `w`
// against the mixture's Bayes classifier; L∞ budgets only (an L2 budget
// returns `Unsupported`).
//
// # Safety
// Same requirements as [`advr_cf_standard_risk`].
enum AdvrStatus advr_cf_new_adv_risk_bound(const double *w,
                                           size_t dim,
                                           const struct AdvrMixture *model,
                                           enum AdvrNorm norm,
                                           double eps,
                                           double *out_value);

// Monte Carlo risk estimate of classifier `f` on a dataset. `g` is the base
// classifier; `Hadv` and `Radv` require it, the other families ignore it,
// and null means absent. Writes the estimate to `*out_value` and its
// standard error to `*out_std_err` (which may be null to skip it).
//
// Supported (family, loss) pairs: every family with the 0/1 loss, plus
// `Standard` and `Gadv` with the logistic loss; other logistic pairs return
// `Unsupported`.
//
// # Safety
// `f` (and `g` when non-null) must point to `dim` readable doubles matching
// the dataset's dimension; `data` must be a live handle; `out_value` must
// be writable, and `out_std_err` too when non-null.
enum AdvrStatus advr_mc_risk(enum AdvrRiskFamily family,
                             enum AdvrLoss loss,
                             const double *f,
                             const double *g,
                             size_t dim,
                             const struct AdvrDataset *data,
                             enum AdvrNorm norm,
                             double eps,
                             double *out_value,
                             double *out_std_err);

// Worst-case perturbation of the point `x` with target label `y` (±1)
// against classifier `w`: minimizes y·w·(x+δ) over the budget ball. Writes
// the perturbation into `out_delta` and the scalar outcome into `out_info`.
//
// # Safety
// `w` and `x` must point to `dim` readable doubles, `out_delta` to `dim`
// writable doubles, and `out_info` to a writable [`AdvrAttackInfo`].
enum AdvrStatus advr_attack_unconstrained(const double *w,
                                          size_t dim,
                                          const double *x,
                                          double y,
                                          enum AdvrNorm norm,
                                          double eps,
                                          double *out_delta,
                                          struct AdvrAttackInfo *out_info);

// Strongest perturbation of `x` against classifier `w` that keeps the base
// classifier `g`'s sign at `x` unchanged; L∞ budgets only (an L2 budget
// returns `Unsupported`). Writes the perturbation into `out_delta` and the
// scalar outcome into `out_info`.
//
// # Safety
// `w`, `g`, and `x` must point to `dim` readable doubles, `out_delta` to
// `dim` writable doubles, and `out_info` to a writable [`AdvrAttackInfo`].
enum AdvrStatus advr_attack_constrained(const double *w,
                                        const double *g,
                                        size_t dim,
                                        const double *x,
                                        enum AdvrNorm norm,
                                        double eps,
                                        double *out_delta,
                                        struct AdvrAttackInfo *out_info);

// Trains a linear classifier on the dataset by full-batch gradient descent
// on the joint objective: mean logistic loss plus `lambda` times the mean
// worst-case logistic excess at budget `eps`. `lambda = 0` reduces to plain
// logistic regression. Writes the trained weights into `out_w` (sized to
// the dataset's dimension) and, when `out_objective` is non-null, the final
// objective value.
//
// Identical inputs produce bit-identical results. `lr` must be positive
// and `iters` at least 1; 0.05 and 2000 are the tuned defaults.
//
// # Safety
// `data` must be a live dataset handle; `out_w` must point to as many
// writable doubles as [`advr_dataset_dim`] reports; `out_objective` must be
// writable when non-null.
enum AdvrStatus advr_train(const struct AdvrDataset *data,
                           double lambda,
                           enum AdvrNorm norm,
                           double eps,
                           double lr,
                           size_t iters,
                           enum AdvrInit init,
                           double init_scale,
                           uint64_t init_seed,
                           double *out_w,
                           double *out_objective);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

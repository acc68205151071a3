//! Scalar numerical primitives: the standard normal CDF, a numerically
//! stable logistic loss, the shared sign convention, and vector norms with
//! their duals.

use crate::{Error, Result};

/// Sign convention used everywhere in this crate: +1 for strictly positive
/// arguments, −1 otherwise (so `sign(0.0) == -1.0`).
///
/// All label predictions and flip tests route through this single function;
/// do not reimplement the comparison elsewhere.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

// Complementary error function ported from FreeBSD's msun s_erf.c by way of
// Go's math/erf.go. Original notice:
//
//   Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//   Developed at SunPro, a Sun Microsystems, Inc. business.
//   Permission to use, copy, modify, and distribute this
//   software is freely granted, provided that this notice
//   is preserved.
//
// Method summary (details in the original source): odd rational
// approximation on [0, 0.84375]; rational approximation around the fixed
// point on [0.84375, 1.25]; exp(-x^2 - 0.5625 + R/S) asymptotic form with a
// pseudo-single-precision split of x beyond 1.25.

const ERX: f64 = 8.45062911510467529297e-01;

const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

// 2^-56
const TINY: f64 = 1.3877787807814456755295395851135253906250e-17;

fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    } else if x == f64::INFINITY {
        return 0.0;
    } else if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < TINY {
            x
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if x < 0.25 {
                x + x * y
            } else {
                0.5 + (x * y + (x - 0.5))
            }
        };
        return if sign { 1.0 + temp } else { 1.0 - temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign {
            1.0 + ERX + p / q
        } else {
            1.0 - ERX - p / q
        };
    }
    if x < 28.0 {
        let s = 1.0 / (x * x);
        let r;
        let q;
        if x < 1.0 / 0.35 {
            r = RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
            q = 1.0 + s * (SA1 + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
        } else {
            if sign && x > 6.0 {
                return 2.0;
            }
            r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
            q = 1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
        }
        // Split x into a pseudo-single-precision high part so that
        // -x*x = -z*z + (z-x)*(z+x) is computed without cancellation.
        let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
        let e = f64::exp(-z * z - 0.5625) * f64::exp((z - x) * (z + x) + r / q);
        return if sign { 2.0 - e / x } else { e / x };
    }
    if sign {
        2.0
    } else {
        0.0
    }
}

/// Standard normal cumulative distribution function Φ(z).
///
/// Absolute error is below 1e-12 for |z| ≤ 8, and Φ(z) + Φ(−z) = 1 up to
/// rounding (both directions evaluate the same complementary error function
/// term).
pub fn normal_cdf(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("normal_cdf requires a finite argument, got {z}")));
    }
    let t = std::f64::consts::FRAC_1_SQRT_2;
    if z <= 0.0 {
        Ok(0.5 * erfc(-z * t))
    } else {
        Ok(1.0 - 0.5 * erfc(z * t))
    }
}

/// Logistic loss ℓ(m) = log(1 + exp(−m)) of a margin m = y·f(x), evaluated
/// through the overflow-safe branch max(0, −m) + log1p(exp(−|m|)).
#[inline]
pub fn logistic_loss(margin: f64) -> f64 {
    let hinge = if margin < 0.0 { -margin } else { 0.0 };
    hinge + (-margin.abs()).exp().ln_1p()
}

/// Derivative ℓ′(m) = −1 / (1 + exp(m)) of the logistic loss, evaluated
/// without overflow for any finite margin. The value lies in [−1, 0]: the
/// mathematical range is open, but the correctly rounded result saturates
/// at −1 below m ≈ −36.7 and at −0.0 above m ≈ 745.
#[inline]
pub fn logistic_loss_derivative(margin: f64) -> f64 {
    if margin >= 0.0 {
        let e = (-margin).exp();
        -e / (1.0 + e)
    } else {
        -1.0 / (1.0 + margin.exp())
    }
}

/// 0/1 loss of a raw score against a ±1 label, using the crate-wide sign
/// convention (a score of exactly 0 predicts −1).
pub fn zero_one_loss(score: f64, label: f64) -> Result<f64> {
    if label != 1.0 && label != -1.0 {
        return Err(Error::Domain(format!("label must be +1 or -1, got {label}")));
    }
    Ok(zero_one(score, label))
}

/// Unchecked 0/1 loss for hot paths where the label is already validated.
#[inline]
pub(crate) fn zero_one(score: f64, label: f64) -> f64 {
    if sign(score) == label {
        0.0
    } else {
        1.0
    }
}

/// Vector norms available for measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VecNorm {
    L1,
    L2,
    LInf,
}

/// Perturbation-ball norms. The dual norm pairs are dual(LInf) = L1 and
/// dual(L2) = L2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    LInf,
    L2,
}

impl NormKind {
    /// The norm measuring the perturbation ball itself.
    pub fn primal(self) -> VecNorm {
        match self {
            NormKind::LInf => VecNorm::LInf,
            NormKind::L2 => VecNorm::L2,
        }
    }

    /// The dual norm ‖·‖_* appearing in worst-case margin drops.
    pub fn dual(self) -> VecNorm {
        match self {
            NormKind::LInf => VecNorm::L1,
            NormKind::L2 => VecNorm::L2,
        }
    }
}

#[inline]
pub(crate) fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

#[inline]
pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[inline]
pub(crate) fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

/// Norm of a vector under the requested measurement.
pub fn norm(v: &[f64], kind: VecNorm) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::Domain("norm of an empty vector".into()));
    }
    Ok(match kind {
        VecNorm::L1 => l1(v),
        VecNorm::L2 => l2(v),
        VecNorm::LInf => linf(v),
    })
}

/// Dual norm ‖v‖_* of a perturbation-ball norm: Σ|vᵢ| for LInf balls, ‖v‖₂
/// for L2 balls.
pub fn dual_norm(v: &[f64], kind: NormKind) -> Result<f64> {
    norm(v, kind.dual())
}

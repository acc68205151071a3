//! Exact worst-case perturbations against linear classifiers: the
//! closed-form dual-norm attack, a sign-preserving constrained attack (a box
//! LP with one half-space constraint, solved greedily and exactly), and a
//! brute-force enumeration oracle for verifying both.

use crate::model::{LinearClassifier, PerturbationBudget};
use crate::numerics::{self, NormKind};
use crate::{Error, Result};

/// Outcome of an attack at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    /// The chosen perturbation; always inside the budget ball (within 1e-9).
    pub delta: Vec<f64>,
    /// Score w·(x+δ) at the perturbed point.
    pub achieved_score: f64,
    /// Whether the attack pushed the score past the target sign. The
    /// unconstrained attack compares `sign(achieved_score)` with the target
    /// label; the constrained attack counts only a strict sign reversal, so
    /// landing exactly on the boundary does not flip.
    pub flipped: bool,
    /// Whether the sign-preservation constraint shaped the answer (always
    /// false for unconstrained attacks).
    pub constraint_active: bool,
}

fn check_dims(w: &[f64], x: &[f64]) -> Result<()> {
    if w.len() != x.len() {
        return Err(Error::Dimension(format!(
            "classifier has dimension {}, point has dimension {}",
            w.len(),
            x.len()
        )));
    }
    Ok(())
}

fn check_label(y: f64) -> Result<()> {
    if y != 1.0 && y != -1.0 {
        return Err(Error::Domain(format!("target label must be +1 or -1, got {y}")));
    }
    Ok(())
}

/// Minimizes y·w·(x+δ) over the budget ball. The optimum is closed-form:
/// δᵢ = −y·eps·sign(wᵢ) per coordinate for L∞ budgets (δᵢ = 0 where
/// wᵢ = 0), δ = −y·eps·w/‖w‖₂ for L2 budgets, dropping the margin by
/// exactly eps·‖w‖_*.
///
/// A zero weight vector is not an error: the score is 0 everywhere, δ = 0
/// is returned, and `flipped` reflects the sign convention at score 0.
pub fn attack_unconstrained(
    f: &LinearClassifier,
    x: &[f64],
    y: f64,
    budget: PerturbationBudget,
) -> Result<AttackResult> {
    check_dims(&f.w, x)?;
    check_label(y)?;
    let eps = budget.eps;
    let delta: Vec<f64> = match budget.kind {
        NormKind::LInf => f
            .w
            .iter()
            .map(|&wi| if wi == 0.0 { 0.0 } else { -y * eps * numerics::sign(wi) })
            .collect(),
        NormKind::L2 => {
            let norm = numerics::l2(&f.w);
            if norm == 0.0 {
                vec![0.0; f.w.len()]
            } else {
                f.w.iter().map(|&wi| -y * eps * wi / norm).collect()
            }
        }
    };
    let mut achieved = 0.0;
    for i in 0..x.len() {
        achieved += f.w[i] * (x[i] + delta[i]);
    }
    Ok(AttackResult {
        delta,
        achieved_score: achieved,
        flipped: numerics::sign(achieved) != y,
        constraint_active: false,
    })
}

/// One coordinate the greedy repair may move toward the constraint-best end
/// of the box. `span` is the travel distance in units of eps (2 when the
/// coordinate starts at the opposite box end, 1 when it starts at 0 because
/// wᵢ = 0), `cost_rate`/`gain_rate` are |wᵢ|/|g.wᵢ|, and `ratio` their
/// quotient, the objective cost per unit of constraint gained.
struct RepairMove {
    coord: usize,
    span: f64,
    cost_rate: f64,
    gain_rate: f64,
    ratio: f64,
}

/// Precomputed solver for the constrained attack under a fixed pair (f, g).
/// Building it sorts the repair schedule once, so per-point solves are O(d);
/// Monte Carlo loops over many points should reuse one solver.
pub(crate) struct ConstrainedSolver<'a> {
    f: &'a LinearClassifier,
    g: &'a LinearClassifier,
    /// Σ|wᵢ|, the corner value of the objective drop.
    l1_w: f64,
    /// Σ agree(i)·|g.wᵢ| over coordinates with wᵢ ≠ 0, where agree is +1
    /// when sign(wᵢ) = sign(g.wᵢ); the corner value of the constraint drop.
    corner_g: f64,
    moves: Vec<RepairMove>,
}

/// Greedy repair outcome: the objective value s·w·(x+δ) at the solution,
/// whether any repair happened, how many scheduled moves ran fully, and the
/// fraction of the next move (0 when none was partial).
struct Repair {
    objective: f64,
    active: bool,
    full_moves: usize,
    fraction: f64,
}

impl<'a> ConstrainedSolver<'a> {
    pub(crate) fn new(f: &'a LinearClassifier, g: &'a LinearClassifier) -> Result<Self> {
        if f.dim() != g.dim() {
            return Err(Error::Dimension(format!(
                "attacked classifier has dimension {}, base classifier has dimension {}",
                f.dim(),
                g.dim()
            )));
        }
        let mut corner_g = 0.0;
        let mut moves = Vec::new();
        for (i, (&wi, &gi)) in f.w.iter().zip(&g.w).enumerate() {
            if wi != 0.0 && gi != 0.0 {
                if numerics::sign(wi) == numerics::sign(gi) {
                    corner_g += gi.abs();
                    moves.push(RepairMove {
                        coord: i,
                        span: 2.0,
                        cost_rate: wi.abs(),
                        gain_rate: gi.abs(),
                        ratio: wi.abs() / gi.abs(),
                    });
                } else {
                    // The unconstrained corner already sits at this
                    // coordinate's constraint-best end; nothing to repair.
                    corner_g -= gi.abs();
                }
            } else if wi == 0.0 && gi != 0.0 {
                // Free constraint capacity: the objective ignores this
                // coordinate, so it starts at 0 and moves first.
                moves.push(RepairMove {
                    coord: i,
                    span: 1.0,
                    cost_rate: 0.0,
                    gain_rate: gi.abs(),
                    ratio: 0.0,
                });
            }
        }
        moves.sort_by(|a, b| a.ratio.total_cmp(&b.ratio).then(a.coord.cmp(&b.coord)));
        Ok(ConstrainedSolver {
            f,
            g,
            l1_w: numerics::l1(&f.w),
            corner_g,
            moves,
        })
    }

    /// Runs the greedy repair given the two raw scores at x. The fractional
    /// step adds `deficit·ratio` to the objective, so when f = g (every
    /// ratio is exactly 1 and costs track gains bit-for-bit) the repaired
    /// objective is exactly 0, never a negative rounding residue.
    fn repair(&self, s: f64, f_score: f64, g_score: f64, eps: f64) -> Repair {
        let mut objective = s * f_score - eps * self.l1_w;
        let constraint = s * g_score - eps * self.corner_g;
        if constraint >= 0.0 {
            return Repair { objective, active: false, full_moves: 0, fraction: 0.0 };
        }
        let mut deficit = -constraint;
        for (k, mv) in self.moves.iter().enumerate() {
            let gain = mv.span * eps * mv.gain_rate;
            if gain >= deficit {
                objective += deficit * mv.ratio;
                return Repair { objective, active: true, full_moves: k, fraction: deficit / gain };
            }
            objective += mv.span * eps * mv.cost_rate;
            deficit -= gain;
        }
        // Unreachable for s chosen from g's own sign: the all-repaired box
        // corner satisfies s·g.w·x + eps·‖g.w‖₁ ≥ 0. Kept as the feasibility
        // boundary fallback.
        debug_assert!(deficit <= 1e-9 * (1.0 + g_score.abs()), "repair capacity exhausted");
        Repair { objective, active: true, full_moves: self.moves.len(), fraction: 0.0 }
    }

    /// Objective value s·w·(x+δ) at the constrained optimum, without
    /// materializing δ. `f_score` and `g_score` are w·x and g.w·x.
    pub(crate) fn achieved(&self, f_score: f64, g_score: f64, eps: f64) -> (f64, bool) {
        let s = numerics::sign(g_score);
        let r = self.repair(s, f_score, g_score, eps);
        (r.objective, r.active)
    }

    /// Full solve at one point.
    pub(crate) fn solve(&self, x: &[f64], eps: f64) -> Result<AttackResult> {
        check_dims(&self.f.w, x)?;
        let f_score = numerics::dot(&self.f.w, x);
        let g_score = numerics::dot(&self.g.w, x);
        let s = numerics::sign(g_score);
        let r = self.repair(s, f_score, g_score, eps);

        let mut delta: Vec<f64> = self
            .f
            .w
            .iter()
            .map(|&wi| if wi == 0.0 { 0.0 } else { -eps * s * numerics::sign(wi) })
            .collect();
        for mv in &self.moves[..r.full_moves] {
            delta[mv.coord] = eps * s * numerics::sign(self.g.w[mv.coord]);
        }
        if r.fraction > 0.0 {
            let mv = &self.moves[r.full_moves];
            let start = delta[mv.coord];
            let end = eps * s * numerics::sign(self.g.w[mv.coord]);
            delta[mv.coord] = start + r.fraction * (end - start);
        }

        if cfg!(debug_assertions) {
            let mut c = 0.0;
            for i in 0..x.len() {
                c += self.g.w[i] * (x[i] + delta[i]);
            }
            debug_assert!(s * c >= -1e-9 * (1.0 + g_score.abs()), "constraint violated: {c}");
        }

        Ok(AttackResult {
            delta,
            achieved_score: s * r.objective,
            flipped: r.objective < 0.0,
            constraint_active: r.active,
        })
    }
}

/// Minimizes s·w·(x+δ) over the eps-box subject to the perturbed point
/// staying on g's side of its own boundary, s·g.w·(x+δ) ≥ 0, where
/// s = sign(g.w·x). Starting from the unconstrained box corner, coordinates
/// are moved toward their constraint-best end in ascending order of
/// objective cost per unit of constraint slack (|wᵢ|/|g.wᵢ|, ties by index,
/// coordinates with wᵢ = 0 first), stopping at constraint equality with at
/// most one partially moved coordinate. This greedy schedule is the exact LP
/// optimum.
///
/// Only L∞ budgets are supported; an L2 budget is rejected as unsupported.
pub fn attack_constrained(
    f: &LinearClassifier,
    g: &LinearClassifier,
    x: &[f64],
    budget: PerturbationBudget,
) -> Result<AttackResult> {
    if budget.kind != NormKind::LInf {
        return Err(Error::Unsupported(
            "constrained attacks are implemented for L-infinity budgets only".into(),
        ));
    }
    ConstrainedSolver::new(f, g)?.solve(x, budget.eps)
}

/// Brute-force reference for the two attacks above, for dimensions up to 12.
///
/// Enumerates all 2^d corners of the eps-box and, when a base classifier is
/// supplied, every box edge point where exactly one coordinate is fractional
/// and the sign-preservation constraint holds with equality; the LP optimum
/// always lies in this candidate set. `target` is the sign being attacked:
/// the true label for the unconstrained problem, or sign(g.w·x) (which the
/// oracle checks) for the constrained one.
pub fn attack_oracle(
    f: &LinearClassifier,
    g: Option<&LinearClassifier>,
    x: &[f64],
    target: f64,
    budget: PerturbationBudget,
) -> Result<AttackResult> {
    let d = x.len();
    if d > 12 {
        return Err(Error::Unsupported(format!(
            "oracle enumerates 2^d corners; d = {d} is past the d <= 12 cap"
        )));
    }
    if budget.kind != NormKind::LInf {
        return Err(Error::Unsupported("the oracle covers L-infinity budgets only".into()));
    }
    check_dims(&f.w, x)?;
    check_label(target)?;
    let g_score = match g {
        Some(g) => {
            check_dims(&g.w, x)?;
            let gs = numerics::dot(&g.w, x);
            if numerics::sign(gs) != target {
                return Err(Error::Domain(format!(
                    "target {target} does not match the base classifier's sign at x"
                )));
            }
            Some(gs)
        }
        None => None,
    };
    let eps = budget.eps;
    let scale = 1.0 + g_score.map_or(0.0, f64::abs);

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |delta: &[f64]| {
        if let Some(g) = g {
            let mut c = 0.0;
            for i in 0..d {
                c += g.w[i] * (x[i] + delta[i]);
            }
            if target * c < -1e-12 * scale {
                return;
            }
        }
        let mut score = 0.0;
        for i in 0..d {
            score += f.w[i] * (x[i] + delta[i]);
        }
        let objective = target * score;
        if best.as_ref().is_none_or(|(b, _)| objective < *b) {
            best = Some((objective, delta.to_vec()));
        }
    };

    let mut delta = vec![0.0; d];
    for bits in 0u32..(1u32 << d) {
        for (i, slot) in delta.iter_mut().enumerate() {
            *slot = if bits & (1 << i) != 0 { eps } else { -eps };
        }
        consider(&delta);
    }
    if let Some(g) = g {
        for free in 0..d {
            if g.w[free] == 0.0 {
                continue;
            }
            for bits in 0u32..(1u32 << (d - 1)) {
                let mut bit = 0;
                for (i, slot) in delta.iter_mut().enumerate() {
                    if i == free {
                        continue;
                    }
                    *slot = if bits & (1 << bit) != 0 { eps } else { -eps };
                    bit += 1;
                }
                let mut rest = 0.0;
                for i in 0..d {
                    if i != free {
                        rest += g.w[i] * (x[i] + delta[i]);
                    }
                }
                let frac = -(rest / g.w[free] + x[free]);
                if frac.abs() <= eps + 1e-12 {
                    delta[free] = frac;
                    consider(&delta);
                }
            }
        }
    }

    let (objective, delta) = best.expect("the all-repaired corner is always feasible");
    let achieved = target * objective;
    let flipped = match g {
        // Edge candidates sit on the constraint boundary up to rounding, so
        // their float objectives can be a few ulps below zero; a flip must
        // clear the same tolerance that admitted the candidate as feasible.
        Some(_) => objective < -1e-12 * scale,
        None => numerics::sign(achieved) != target,
    };
    let constraint_active = match (g, g_score) {
        (Some(g), Some(gs)) => {
            // Active iff the unconstrained corner was infeasible.
            let mut corner_c = target * gs;
            for (&wi, &gi) in f.w.iter().zip(&g.w) {
                if wi != 0.0 {
                    corner_c -= eps * gi.abs() * numerics::sign(wi) * numerics::sign(gi);
                }
            }
            corner_c < 0.0
        }
        _ => false,
    };
    Ok(AttackResult { delta, achieved_score: achieved, flipped, constraint_active })
}

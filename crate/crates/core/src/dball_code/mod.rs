//! Distortion-ball covering and the codes built on it.
//!
//! Reproduction symbols are picked greedily: `y_1` has the heaviest ball
//! `B_D(y) = {x : d(x, y) <= D}`, and each later `y_i` has the heaviest part of its ball
//! not yet covered. The newly covered parts `A_D(y_i)` are disjoint with non-increasing
//! mass, and three cut points on their running total drive everything else:
//!
//! | index | first `i` whose cumulative cell mass reaches |
//! |-------|----------------------------------------------|
//! | `i*`  | `1 - ε - δ` (and `1` when `ε + δ >= 1`)      |
//! | `k*`  | `1 - ε`                                      |
//! | `j*`  | `1 - γ - δ`, with `γ = 1 - cum(k*)`           |
//!
//! `log2 i*` is exactly `G_{D,ε}^δ(X)`, the smallest smooth max entropy `H^δ(Y)` over
//! all channels whose excess-distortion probability is at most `ε`. The stochastic
//! code has rate `floor(log2 i*)`; the deterministic one `floor(log2 min(j*, k*))`.

mod code;

pub use code::{build_deterministic_code, build_stochastic_code, CodeKind, CodeTable, Emission};

use rayon::prelude::*;

use crate::error::{LossyError, Result};
use crate::model::{check_feasible, floor_log2, require_feasible, Feasibility, LossyProblem};
use crate::prob::Prob;

/// `B_D(y)` for an explicit instance or any other [`LossyProblem`].
pub fn distortion_ball<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L, y: usize) -> Vec<usize> {
    problem.ball(y)
}

/// Output of [`greedy_cover`]: the first `k*` centers and the thresholds derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyCover<P> {
    centers: Vec<usize>,
    cells: Vec<Vec<usize>>,
    cell_mass: Vec<P>,
    cum_mass: Vec<P>,
    i_star: usize,
    k_star: usize,
    j_star: usize,
    alpha: P,
    beta: P,
    gamma: P,
}

impl<P: Prob> GreedyCover<P> {
    /// Reproduction indices `y_1, ..., y_{k*}`.
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    /// `A_D(y_i)` as ascending source indices.
    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_mass(&self) -> &[P] {
        &self.cell_mass
    }

    /// `cum_mass()[i - 1]` is the mass of the first `i` cells.
    pub fn cum_mass(&self) -> &[P] {
        &self.cum_mass
    }

    pub fn i_star(&self) -> usize {
        self.i_star
    }

    pub fn k_star(&self) -> usize {
        self.k_star
    }

    pub fn j_star(&self) -> usize {
        self.j_star
    }

    /// Mass of the first `k* - 1` cells.
    pub fn alpha(&self) -> &P {
        &self.alpha
    }

    /// `1 - ε - α`: the part of cell `k*` that must still be reproduced within `D`.
    pub fn beta(&self) -> &P {
        &self.beta
    }

    /// Mass left outside the first `k*` cells.
    pub fn gamma(&self) -> &P {
        &self.gamma
    }

    /// `G = log2 i*` in bits.
    pub fn g_bits(&self) -> f64 {
        (self.i_star as f64).log2()
    }

    /// Rate of the stochastic code, `floor(G)`.
    pub fn stochastic_rate(&self) -> u32 {
        floor_log2(self.i_star as u64)
    }

    /// Rate of the deterministic code, `floor(log2 min(j*, k*))`.
    pub fn deterministic_rate(&self) -> u32 {
        floor_log2(self.j_star.min(self.k_star) as u64)
    }

    /// Cell index (0-based) of every source symbol, `None` outside the first `k*` cells.
    pub fn cell_of(&self, x_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; x_count];
        for (i, cell) in self.cells.iter().enumerate() {
            for &x in cell {
                out[x] = Some(i);
            }
        }
        out
    }
}

/// First 1-based position whose cumulative mass reaches `target`.
fn first_reaching<P: Prob>(cum: &[P], target: &P) -> Option<usize> {
    cum.iter().position(|c| c.at_least(target)).map(|i| i + 1)
}

/// Greedy covering by distortion balls, stopped at `k*`.
///
/// Ties in the arg-max go to the smallest reproduction index (in float mode, residuals
/// within the comparison slack of the maximum count as ties).
pub fn greedy_cover<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L) -> Result<GreedyCover<P>> {
    require_feasible(problem)?;
    let probs = problem.probs();
    let eps = problem.epsilon().clone();
    let delta = problem.delta().clone();
    let target_k = P::one() - eps.clone();

    let mut residual: Vec<P> = (0..problem.y_count())
        .into_par_iter()
        .map(|y| problem.ball(y).into_iter().fold(P::zero(), |acc, x| acc + probs[x].clone()))
        .collect();
    let mut covered = vec![false; problem.x_count()];

    let mut centers = Vec::new();
    let mut cells = Vec::new();
    let mut cell_mass = Vec::new();
    let mut cum_mass: Vec<P> = Vec::new();
    let mut cum = P::zero();

    loop {
        let best = residual
            .iter()
            .fold(None::<&P>, |acc, r| match acc {
                Some(b) if !(r > b) => Some(b),
                _ => Some(r),
            })
            .cloned()
            .unwrap_or_else(P::zero);
        if !(best > P::zero()) {
            // Everything coverable is covered and 1 - ε is still out of reach.
            return Err(LossyError::Infeasible { uncoverable: (P::one() - cum).to_f64(), epsilon: eps.to_f64() });
        }
        let y = residual.iter().position(|r| r.at_least(&best)).expect("maximum is attained");

        let cell: Vec<usize> = problem.ball(y).into_iter().filter(|&x| !covered[x]).collect();
        let mass = cell.iter().fold(P::zero(), |acc, &x| acc + probs[x].clone());
        for &x in &cell {
            covered[x] = true;
            for other in problem.coball(x) {
                residual[other] = residual[other].clone() - probs[x].clone();
            }
        }
        residual[y] = P::zero();

        cum = cum + mass.clone();
        centers.push(y);
        cells.push(cell);
        cell_mass.push(mass);
        cum_mass.push(cum.clone());
        if cum.at_least(&target_k) {
            break;
        }
    }

    let k_star = centers.len();
    let i_star = first_reaching(&cum_mass, &(target_k.clone() - delta.clone())).expect("i* <= k*");
    let alpha = if k_star > 1 { cum_mass[k_star - 2].clone() } else { P::zero() };
    let beta = target_k - alpha.clone();
    let gamma = P::one() - cum_mass[k_star - 1].clone();
    let j_star = first_reaching(&cum_mass, &(P::one() - gamma.clone() - delta)).expect("j* <= k*");

    assert!(j_star.min(k_star) <= i_star + 2, "min(j*, k*) = {} exceeds i* + 2 = {}", j_star.min(k_star), i_star + 2);
    debug_assert!(i_star <= k_star && i_star <= j_star);
    debug_assert!(beta > P::zero());

    Ok(GreedyCover { centers, cells, cell_mass, cum_mass, i_star, k_star, j_star, alpha, beta, gamma })
}

/// `G_{D,ε}^δ(X)` in bits, or `+∞` when no code meets the excess-distortion budget.
pub fn g_value<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L) -> Result<f64> {
    match check_feasible(problem) {
        Feasibility::Infeasible { .. } => Ok(f64::INFINITY),
        Feasibility::Feasible => Ok(greedy_cover(problem)?.g_bits()),
    }
}

/// Upper bound `floor(G + 2 log2(e) / 2^G)` on the deterministic rate.
pub fn deterministic_rate_bound(g_bits: f64) -> f64 {
    (g_bits + 2.0 * std::f64::consts::LOG2_E / g_bits.exp2()).floor()
}

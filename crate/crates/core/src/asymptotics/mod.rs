//! Single-letter quantities for memoryless sources.
//!
//! [`rate_distortion`] solves `R_X(D) = min I(X;Y)` over channels with `E d(X,Y) <= D`
//! by alternating minimization at a fixed slope, bisecting the slope until the achieved
//! distortion hits `D`. From the optimal output law it derives the slope `λ*`, the
//! per-symbol `D`-tilted information and its variance, the rate-dispersion `V_X(D)`.
//! [`gaussian_approx`] combines them into `R_X(D) + sqrt(V/n) Q^{-1}(ε + δ)`.

mod qfunc;

pub use qfunc::{q_function, q_inverse};

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::blocklength::g_rate;
use crate::error::{LossyError, Result};
use crate::model::{Instance, LossyProblem};
use crate::prob::Prob;

/// Tolerance on `|E[ȷ(X, D)] - R_X(D)|` accepted from a solve.
pub const TAU_RD: f64 = 1e-6;

/// Stop the inner loop once the upper/lower rate bounds are this close (bits).
const GAP_BITS: f64 = 1e-10;
const BISECTION_STEPS: usize = 60;
const MAX_INNER: usize = 2_000_000;
const PRUNE_BELOW: f64 = 1e-15;
const DISPERSION_FLOOR: f64 = 1e-12;

/// Solution of the rate-distortion problem at one distortion level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RdSolution {
    /// Target distortion.
    pub distortion: f64,
    /// `R_X(D)` in bits.
    pub rate: f64,
    /// Optimal output law `P_{Y*}`.
    pub output_law: Vec<f64>,
    /// `λ* = -R'_X(D)` in bits per unit distortion.
    pub slope: f64,
    /// `ȷ_X(x, D)` per source symbol, bits.
    pub tilted: Vec<f64>,
    /// `V_X(D) = Var[ȷ_X(X, D)]`, bits squared.
    pub dispersion: f64,
    pub d_min: f64,
    pub d_max: f64,
}

impl RdSolution {
    pub const CSV_HEADER: &'static str = "D,rate_bits,lambda_star,dispersion";

    pub fn csv_row(&self) -> String {
        format!("{:.16e},{:.16e},{:.16e},{:.16e}", self.distortion, self.rate, self.slope, self.dispersion)
    }
}

/// `(D_min, D_max) = (E[min_y d(X, y)], min_y E[d(X, y)])`.
pub fn d_bounds(probs: &[f64], matrix: &[Vec<f64>]) -> (f64, f64) {
    let ny = matrix.first().map_or(0, Vec::len);
    let d_min = probs.iter().zip(matrix).map(|(p, row)| p * row.iter().copied().fold(f64::INFINITY, f64::min)).sum();
    let d_max =
        (0..ny).map(|y| probs.iter().zip(matrix).map(|(p, row)| p * row[y]).sum::<f64>()).fold(f64::INFINITY, f64::min);
    (d_min, d_max)
}

/// State of alternating minimization at one slope (nats per unit distortion).
struct SlopePoint {
    lambda: f64,
    output: Vec<f64>,
    distortion: f64,
    /// Mutual information in nats.
    info: f64,
    /// `ln Z_x = ln Σ_y q(y) exp(-λ d(x, y))`.
    log_partition: Vec<f64>,
}

struct Problem<'a> {
    probs: &'a [f64],
    matrix: &'a [Vec<f64>],
    row_floor: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(probs: &'a [f64], matrix: &'a [Vec<f64>]) -> Self {
        let row_floor = matrix.iter().map(|row| row.iter().copied().fold(f64::INFINITY, f64::min)).collect();
        Self { probs, matrix, row_floor }
    }

    /// Shifted kernel `exp(-λ (d(x, y) - min_y d(x, y)))`, which never underflows to an all-zero row.
    fn kernel(&self, lambda: f64) -> Vec<Vec<f64>> {
        self.matrix
            .iter()
            .zip(&self.row_floor)
            .map(|(row, s)| row.iter().map(|d| (-lambda * (d - s)).exp()).collect())
            .collect()
    }

    fn solve_at(&self, lambda: f64, start: &[f64]) -> Result<SlopePoint> {
        let ny = start.len();
        let kernel = self.kernel(lambda);
        let mut q = start.to_vec();
        let mut z = vec![0.0; self.probs.len()];
        let mut c = vec![0.0; ny];
        for _ in 0..MAX_INNER {
            for (zx, krow) in z.iter_mut().zip(&kernel) {
                *zx = krow.iter().zip(&q).map(|(k, qy)| k * qy).sum();
            }
            c.iter_mut().for_each(|v| *v = 0.0);
            for ((p, krow), zx) in self.probs.iter().zip(&kernel).zip(&z) {
                if *p > 0.0 {
                    for (cy, k) in c.iter_mut().zip(krow) {
                        *cy += p * k / zx;
                    }
                }
            }
            let max_log_c = c.iter().map(|v| v.ln()).fold(f64::NEG_INFINITY, f64::max);
            let mean_log_c: f64 = q.iter().zip(&c).filter(|(qy, _)| **qy > 0.0).map(|(qy, cy)| qy * cy * cy.ln()).sum();
            for (qy, cy) in q.iter_mut().zip(&c) {
                *qy *= cy;
            }
            let total: f64 = q.iter().sum();
            q.iter_mut().for_each(|v| *v /= total);
            if (max_log_c - mean_log_c) / LN_2 < GAP_BITS {
                return Ok(self.point(lambda, q, &kernel));
            }
        }
        Err(LossyError::NoConvergence(format!("alternating minimization at slope {lambda} nats")))
    }

    fn point(&self, lambda: f64, q: Vec<f64>, kernel: &[Vec<f64>]) -> SlopePoint {
        let mut distortion = 0.0;
        let mut info = 0.0;
        let mut log_partition = Vec::with_capacity(self.probs.len());
        for (((p, krow), drow), s) in self.probs.iter().zip(kernel).zip(self.matrix).zip(&self.row_floor) {
            let zx: f64 = krow.iter().zip(&q).map(|(k, qy)| k * qy).sum();
            log_partition.push(zx.ln() - lambda * s);
            if *p == 0.0 {
                continue;
            }
            for ((k, qy), d) in krow.iter().zip(&q).zip(drow) {
                let w = qy * k / zx;
                if w > 0.0 {
                    distortion += p * w * d;
                    info += p * w * (k / zx).ln();
                }
            }
        }
        SlopePoint { lambda, output: q, distortion, info, log_partition }
    }
}

/// `R_X(D)` with its optimal output law, slope, tilted information and dispersion.
///
/// Levels at or above `D_max` return the zero-rate solution. Levels at or below
/// `D_min` are rejected.
pub fn rate_distortion(probs: &[f64], matrix: &[Vec<f64>], distortion: f64) -> Result<RdSolution> {
    if probs.len() != matrix.len() || matrix.iter().any(|r| r.len() != matrix[0].len()) {
        return Err(LossyError::Dimension("distortion matrix does not match the source".into()));
    }
    let (d_min, d_max) = d_bounds(probs, matrix);
    if !(distortion > d_min) {
        return Err(LossyError::Domain(format!("D = {distortion} is not above D_min = {d_min}")));
    }
    let ny = matrix[0].len();
    if distortion >= d_max {
        let best = (0..ny)
            .min_by(|&a, &b| {
                let ea: f64 = probs.iter().zip(matrix).map(|(p, r)| p * r[a]).sum();
                let eb: f64 = probs.iter().zip(matrix).map(|(p, r)| p * r[b]).sum();
                ea.total_cmp(&eb)
            })
            .expect("non-empty reproduction alphabet");
        let mut output_law = vec![0.0; ny];
        output_law[best] = 1.0;
        return Ok(RdSolution {
            distortion,
            rate: 0.0,
            output_law,
            slope: 0.0,
            tilted: vec![0.0; probs.len()],
            dispersion: 0.0,
            d_min,
            d_max,
        });
    }

    let problem = Problem::new(probs, matrix);
    let uniform = vec![1.0 / ny as f64; ny];
    let warm = |q: &[f64]| -> Vec<f64> { q.iter().map(|v| (1.0 - 1e-6) * v + 1e-6 / ny as f64).collect() };

    // D(λ) decreases from D_max at λ = 0; grow λ until the level is undershot.
    let mut hi = problem.solve_at(1.0, &uniform)?;
    let mut lo_lambda = 0.0;
    let mut lo: Option<SlopePoint> = None;
    while hi.distortion > distortion {
        lo_lambda = hi.lambda;
        let next = problem.solve_at(hi.lambda * 2.0, &warm(&hi.output))?;
        lo = Some(std::mem::replace(&mut hi, next));
        if hi.lambda > 1e6 {
            return Err(LossyError::NoConvergence(format!("slope bracket for D = {distortion}")));
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo_lambda + hi.lambda);
        if mid <= lo_lambda || mid >= hi.lambda {
            break;
        }
        let point = problem.solve_at(mid, &warm(&hi.output))?;
        if point.distortion > distortion {
            lo_lambda = mid;
            lo = Some(point);
        } else {
            hi = point;
        }
    }

    // Drop spurious atoms and re-solve once at the final slope.
    let mut pruned: Vec<f64> = hi.output.iter().map(|&v| if v < PRUNE_BELOW { 0.0 } else { v }).collect();
    let total: f64 = pruned.iter().sum();
    pruned.iter_mut().for_each(|v| *v /= total);
    let hi = problem.solve_at(hi.lambda, &pruned)?;

    // A linear stretch of R(D) makes D(λ) jump at one slope; mix the two sides.
    let (rate_nats, output_law, lambda) = match lo {
        Some(lo)
            if lo.distortion > distortion
                && (lo.distortion - hi.distortion) > 1e-9
                && hi.distortion < distortion - 1e-12 =>
        {
            let t = (distortion - hi.distortion) / (lo.distortion - hi.distortion);
            let law = hi.output.iter().zip(&lo.output).map(|(a, b)| (1.0 - t) * a + t * b).collect();
            ((1.0 - t) * hi.info + t * lo.info, law, hi.lambda)
        }
        _ => (hi.info + hi.lambda * (hi.distortion - distortion), hi.output.clone(), hi.lambda),
    };

    let kernel_point = problem.point(lambda, output_law.clone(), &problem.kernel(lambda));
    let tilted: Vec<f64> = kernel_point.log_partition.iter().map(|ln_z| -(lambda * distortion + ln_z) / LN_2).collect();
    let rate = (rate_nats / LN_2).max(0.0);
    let mean: f64 = probs.iter().zip(&tilted).map(|(p, j)| p * j).sum();
    if (mean - rate).abs() > TAU_RD {
        return Err(LossyError::NoConvergence(format!(
            "tilted-information mean {mean} differs from rate {rate} at D = {distortion}"
        )));
    }
    let mut dispersion: f64 = probs.iter().zip(&tilted).map(|(p, j)| p * (j - mean).powi(2)).sum();
    if dispersion < DISPERSION_FLOOR {
        dispersion = 0.0;
    }
    Ok(RdSolution { distortion, rate, output_law, slope: lambda / LN_2, tilted, dispersion, d_min, d_max })
}

/// [`rate_distortion`] at the instance's own level.
pub fn rate_distortion_of<P: Prob>(inst: &Instance<P>) -> Result<RdSolution> {
    let probs: Vec<f64> = inst.source().probs().iter().map(Prob::to_f64).collect();
    rate_distortion(&probs, inst.distortion().matrix(), inst.distortion().level())
}

/// `R_X(D) + sqrt(V_X(D) / n) Q^{-1}(ε + δ)` in bits per symbol, without the
/// `O(log n / n)` remainder.
pub fn gaussian_approx<P: Prob>(base: &Instance<P>, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(LossyError::Domain("blocklength must be at least 1".into()));
    }
    let total = base.epsilon().to_f64() + base.delta().to_f64();
    if !(total > 0.0 && total < 1.0) {
        return Err(LossyError::Domain(format!("epsilon + delta = {total} is outside (0, 1)")));
    }
    let probs: Vec<f64> = base.source().probs().iter().map(Prob::to_f64).collect();
    let (d_min, d_max) = d_bounds(&probs, base.distortion().matrix());
    let level = base.distortion().level();
    if !(level > d_min && level < d_max) {
        return Err(LossyError::Domain(format!("D = {level} is outside (D_min, D_max) = ({d_min}, {d_max})")));
    }
    let rd = rate_distortion(&probs, base.distortion().matrix(), level)?;
    if rd.dispersion == 0.0 {
        return Ok(rd.rate);
    }
    Ok(rd.rate + (rd.dispersion / n as f64).sqrt() * q_inverse(total)?)
}

/// `g_rate` with the whole budget moved to the excess-distortion side, `(ε + δ, 0)`.
///
/// Equal to `g_rate` at the original split whenever that split is feasible.
pub fn fixed_length_bridge<P: Prob>(base: &Instance<P>, n: usize, budget: usize) -> Result<f64> {
    let total = base.epsilon().clone() + base.delta().clone();
    if total >= P::one() {
        // i* = 1 whenever ε + δ >= 1.
        return Ok(0.0);
    }
    g_rate(&base.with_budgets(total, P::zero())?, n, budget)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

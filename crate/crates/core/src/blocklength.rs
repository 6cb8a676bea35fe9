//! Memoryless product sources and the blocklength-`n` rate sandwich.
//!
//! A [`ProductInstance`] materializes the product law on `X^n` but never the block
//! distortion matrix: balls are enumerated by a depth-first walk over positions that
//! prunes as soon as the running distortion plus the cheapest completion exceeds `nD`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::dball_code::{deterministic_rate_bound, greedy_cover};
use crate::error::{LossyError, Result};
use crate::model::{check_feasible, within_level, Feasibility, Instance, LossyProblem, DIST_TOL};
use crate::prob::Prob;

/// Default cap on `|X|^n` and `|Y|^n`.
pub const DEFAULT_BUDGET: usize = 1 << 14;

/// `base` extended to blocks of length `n`, with additive distortion at level `nD`.
#[derive(Debug, Clone)]
pub struct ProductInstance<P> {
    base: Instance<P>,
    n: usize,
    probs: Vec<P>,
    y_len: usize,
    level: f64,
    epsilon: P,
    delta: P,
    /// `min_y d(x, y)` per base source symbol.
    x_floor: Vec<f64>,
    /// `min_x d(x, y)` per base reproduction symbol.
    y_floor: Vec<f64>,
}

fn checked_power(radix: usize, n: usize, budget: usize) -> Result<usize> {
    let size = (radix as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > budget as u128 {
        Err(LossyError::Budget { size, budget })
    } else {
        Ok(size as usize)
    }
}

/// Product law in lexicographic order (first position most significant).
fn product_law<P: Prob>(base: &[P], n: usize) -> Vec<P> {
    let mut law = vec![P::one()];
    for _ in 0..n {
        law = law.iter().flat_map(|a| base.iter().map(move |p| a.clone() * p.clone())).collect();
    }
    law
}

/// Materializes `X^n`, `Y^n` and the product law of `base`.
pub fn expand<P: Prob>(base: &Instance<P>, n: usize, budget: usize) -> Result<ProductInstance<P>> {
    if n == 0 {
        return Err(LossyError::Domain("blocklength must be at least 1".into()));
    }
    checked_power(base.source().len(), n, budget)?;
    let y_len = checked_power(base.y_symbols().len(), n, budget)?;
    let d = base.distortion();
    let x_floor = (0..d.x_len()).map(|x| (0..d.y_len()).map(|y| d.at(x, y)).fold(f64::INFINITY, f64::min)).collect();
    let y_floor = (0..d.y_len()).map(|y| (0..d.x_len()).map(|x| d.at(x, y)).fold(f64::INFINITY, f64::min)).collect();
    Ok(ProductInstance {
        probs: product_law(base.source().probs(), n),
        y_len,
        level: n as f64 * d.level(),
        epsilon: LossyProblem::epsilon(base).clone(),
        delta: LossyProblem::delta(base).clone(),
        base: base.clone(),
        n,
        x_floor,
        y_floor,
    })
}

impl<P: Prob> ProductInstance<P> {
    pub fn base(&self) -> &Instance<P> {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn x_radix(&self) -> usize {
        self.base.source().len()
    }

    fn y_radix(&self) -> usize {
        self.base.y_symbols().len()
    }

    /// Base-symbol digits of a block index, first position first.
    pub fn digits(index: usize, radix: usize, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = rest % radix;
            rest /= radix;
        }
        out
    }

    pub fn with_budgets(&self, epsilon: P, delta: P) -> Result<Self> {
        let base = self.base.with_budgets(epsilon.clone(), delta.clone())?;
        Ok(Self { base, epsilon, delta, ..self.clone() })
    }

    /// Explicit instance over `X^n × Y^n` with the full block distortion matrix.
    pub fn materialize(&self) -> Result<Instance<P>> {
        let matrix = (0..self.probs.len()).map(|x| (0..self.y_len).map(|y| self.distortion(x, y)).collect()).collect();
        let xs = (0..self.probs.len()).map(|x| self.x_label(x)).collect();
        let ys = (0..self.y_len).map(|y| self.y_label(y)).collect();
        let source = crate::model::FiniteSource::new(xs, self.probs.clone())?;
        let spec = crate::model::DistortionSpec::new(matrix, self.level)?;
        Instance::new(source, ys, spec, self.epsilon.clone(), self.delta.clone())
    }

    fn limit(&self) -> f64 {
        self.level + DIST_TOL * self.level.abs().max(1.0)
    }

    fn label(&self, index: usize, radix: usize, symbols: &[String]) -> String {
        let parts: Vec<&str> = Self::digits(index, radix, self.n).into_iter().map(|d| symbols[d].as_str()).collect();
        if symbols.iter().all(|s| s.chars().count() == 1) {
            parts.concat()
        } else {
            parts.join(",")
        }
    }

    /// Depth-first enumeration of the partners of a fixed block within the level.
    ///
    /// `cost(pos, candidate)` is the per-position distortion and `floor[pos]` the
    /// cheapest cost at that position; output is in ascending index order.
    fn enumerate(&self, radix: usize, cost: impl Fn(usize, usize) -> f64, floor: &[f64]) -> Vec<usize> {
        let n = self.n;
        let mut rest = vec![0.0; n + 1];
        for pos in (0..n).rev() {
            rest[pos] = rest[pos + 1] + floor[pos];
        }
        let limit = self.limit();
        let mut out = Vec::new();
        let mut stack: Vec<(usize, usize, f64)> = vec![(0, 0, 0.0)];
        while let Some((pos, prefix, acc)) = stack.pop() {
            if pos == n {
                out.push(prefix);
                continue;
            }
            // Reverse push keeps the pop order ascending.
            for c in (0..radix).rev() {
                let next = acc + cost(pos, c);
                if next + rest[pos + 1] <= limit {
                    stack.push((pos + 1, prefix * radix + c, next));
                }
            }
        }
        out
    }
}

impl<P: Prob> LossyProblem<P> for ProductInstance<P> {
    fn probs(&self) -> &[P] {
        &self.probs
    }

    fn y_count(&self) -> usize {
        self.y_len
    }

    fn level(&self) -> f64 {
        self.level
    }

    fn distortion(&self, x: usize, y: usize) -> f64 {
        let d = self.base.distortion();
        let xs = Self::digits(x, self.x_radix(), self.n);
        let ys = Self::digits(y, self.y_radix(), self.n);
        xs.iter().zip(&ys).map(|(&a, &b)| d.at(a, b)).sum()
    }

    fn epsilon(&self) -> &P {
        &self.epsilon
    }

    fn delta(&self) -> &P {
        &self.delta
    }

    fn x_label(&self, x: usize) -> String {
        self.label(x, self.x_radix(), self.base.source().symbols())
    }

    fn y_label(&self, y: usize) -> String {
        self.label(y, self.y_radix(), self.base.y_symbols())
    }

    fn within(&self, x: usize, y: usize) -> bool {
        let d = self.base.distortion();
        let (xr, yr) = (self.x_radix(), self.y_radix());
        let (mut xi, mut yi) = (x, y);
        let limit = self.limit();
        let mut acc = 0.0;
        for _ in 0..self.n {
            acc += d.at(xi % xr, yi % yr);
            if acc > limit {
                return false;
            }
            xi /= xr;
            yi /= yr;
        }
        within_level(acc, self.level)
    }

    fn ball(&self, y: usize) -> Vec<usize> {
        let d = self.base.distortion();
        let ys = Self::digits(y, self.y_radix(), self.n);
        let floor: Vec<f64> = ys.iter().map(|&b| self.y_floor[b]).collect();
        self.enumerate(self.x_radix(), |pos, x| d.at(x, ys[pos]), &floor)
    }

    fn coball(&self, x: usize) -> Vec<usize> {
        let d = self.base.distortion();
        let xs = Self::digits(x, self.x_radix(), self.n);
        let floor: Vec<f64> = xs.iter().map(|&a| self.x_floor[a]).collect();
        self.enumerate(self.y_radix(), |pos, y| d.at(xs[pos], y), &floor)
    }

    fn is_coverable(&self, x: usize) -> bool {
        let total: f64 = Self::digits(x, self.x_radix(), self.n).iter().map(|&a| self.x_floor[a]).sum();
        within_level(total, self.level)
    }
}

/// `G(X^n) / n` in bits per symbol; `+∞` when infeasible at level `nD`.
pub fn g_rate<P: Prob>(base: &Instance<P>, n: usize, budget: usize) -> Result<f64> {
    let product = expand(base, n, budget)?;
    match check_feasible(&product) {
        Feasibility::Infeasible { .. } => Ok(f64::INFINITY),
        Feasibility::Feasible => Ok(greedy_cover(&product)?.g_bits() / n as f64),
    }
}

/// Bounds on the optimal blocklength-`n` rates, in bits per symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sandwich {
    pub n: usize,
    pub g_bits: f64,
    /// `(G - 1) / n`, strictly below the optimal rate.
    pub lower: f64,
    /// `floor(G) / n`, achieved by the stochastic code.
    pub upper_stochastic: f64,
    /// `floor(G + 2 log2(e) / 2^G) / n`, achieved by a deterministic code.
    pub upper_deterministic: f64,
    pub i_star: usize,
    pub k_star: usize,
    pub j_star: usize,
}

impl Sandwich {
    fn from_g(n: usize, g_bits: f64, i_star: usize, k_star: usize, j_star: usize) -> Self {
        let nf = n as f64;
        Self {
            n,
            g_bits,
            lower: (g_bits - 1.0) / nf,
            upper_stochastic: f64::from(crate::model::floor_log2(i_star as u64)) / nf,
            upper_deterministic: deterministic_rate_bound(g_bits) / nf,
            i_star,
            k_star,
            j_star,
        }
    }
}

pub fn sandwich<P: Prob>(base: &Instance<P>, n: usize, budget: usize) -> Result<Sandwich> {
    let product = expand(base, n, budget)?;
    let cover = greedy_cover(&product)?;
    Ok(Sandwich::from_g(n, cover.g_bits(), cover.i_star(), cover.k_star(), cover.j_star()))
}

/// One row of a blocklength sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sandwich: Sandwich,
    pub wall_time_ms: f64,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "n,G_bits,lower,upper_stochastic,upper_deterministic,i_star,k_star,wall_time_ms";

    pub fn csv_row(&self) -> String {
        let s = &self.sandwich;
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.3}",
            s.n, s.g_bits, s.lower, s.upper_stochastic, s.upper_deterministic, s.i_star, s.k_star, self.wall_time_ms
        )
    }
}

/// Sandwich for `n = 1..=max_n`, computed in parallel and returned in ascending `n`.
pub fn sweep<P: Prob>(base: &Instance<P>, max_n: usize, budget: usize) -> Result<Vec<SweepRow>> {
    (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let start = Instant::now();
            let sandwich = sandwich(base, n, budget)?;
            Ok(SweepRow { sandwich, wall_time_ms: start.elapsed().as_secs_f64() * 1e3 })
        })
        .collect()
}

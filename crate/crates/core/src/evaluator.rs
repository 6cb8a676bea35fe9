//! Exact and sampled evaluation of codes, plus the audits that tie codes back to `G`.
//!
//! - [`evaluate_code`] sums over the source alphabet (and encoder randomization) to get the
//!   excess-distortion probability, the codeword-length law and the law of `Ŷ = g(f(X))`.
//! - [`converse_audit`] checks the counting converse on any valid code after
//!   [`canonicalize`] has made its decoder injective on the used codewords.
//! - [`majorization_audit`] samples channels meeting the excess-distortion budget and
//!   checks that the constructed code's output law majorizes each induced law.
//! - [`simulate`] is a seeded Monte Carlo cross-check of the exact numbers.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dball_code::{build_stochastic_code, greedy_cover, CodeTable, Emission};
use crate::error::{LossyError, Result};
use crate::model::{require_feasible, uncoverable_mass, CodewordIndex, LossyProblem};
use crate::prob::Prob;
use crate::smooth_entropy::{majorizes, smooth_max_support};

/// Seeded stream `stream` of the master generator `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exact performance of a code on a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeReport<P> {
    /// `Pr{d(X, g(f(X))) > D}`.
    pub excess_prob: P,
    /// Law of `Ŷ = g(f(X))` over the reproduction alphabet.
    pub output_law: Vec<P>,
    /// `length_law[l] = Pr{ℓ(f(X)) = l}`.
    pub length_law: Vec<P>,
}

impl<P: Prob> CodeReport<P> {
    /// `Pr{ℓ(f(X)) > rate}`.
    pub fn overflow_prob(&self, rate: f64) -> P {
        self.length_law
            .iter()
            .enumerate()
            .filter(|(l, _)| *l as f64 > rate)
            .fold(P::zero(), |acc, (_, p)| acc + p.clone())
    }

    /// Whether the code is a `(D, rate, ε, δ)` code.
    pub fn is_code(&self, epsilon: &P, delta: &P, rate: f64) -> bool {
        epsilon.at_least(&self.excess_prob) && delta.at_least(&self.overflow_prob(rate))
    }

    /// Smallest integer rate `R` with `Pr{ℓ > R} <= δ`.
    pub fn min_rate(&self, delta: &P) -> u32 {
        (0..self.length_law.len() as u32)
            .find(|&r| delta.at_least(&self.overflow_prob(f64::from(r))))
            .unwrap_or(self.length_law.len() as u32)
    }

    pub fn to_json(&self, problem: &dyn LossyProblem<P>, rate: f64) -> serde_json::Value {
        let output: serde_json::Map<String, serde_json::Value> =
            self.output_law.iter().enumerate().map(|(y, p)| (problem.y_label(y), p.to_json())).collect();
        serde_json::json!({
            "excess_prob": self.excess_prob.to_json(),
            "rate": rate,
            "overflow_prob": self.overflow_prob(rate).to_json(),
            "is_code": self.is_code(problem.epsilon(), problem.delta(), rate),
            "output_law": output,
            "length_law": self.length_law.iter().map(Prob::to_json).collect::<Vec<_>>(),
        })
    }
}

fn check_dimensions<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L, code: &CodeTable<P>) -> Result<()> {
    if code.encode().len() != problem.x_count() {
        return Err(LossyError::Dimension(format!(
            "encoder covers {} source symbols, instance has {}",
            code.encode().len(),
            problem.x_count()
        )));
    }
    if let Some(y) = code.decode().iter().find(|&&y| y >= problem.y_count()) {
        return Err(LossyError::Dimension(format!(
            "decoder emits reproduction index {y}, alphabet has {}",
            problem.y_count()
        )));
    }
    Ok(())
}

/// Exact excess-distortion probability, length law and output law of `code`.
pub fn evaluate_code<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L, code: &CodeTable<P>) -> Result<CodeReport<P>> {
    check_dimensions(problem, code)?;
    let probs = problem.probs();
    let max_len = code.encode().iter().flatten().map(|e| e.index.len() as usize).max().unwrap_or(0);
    let mut excess = P::zero();
    let mut output_law = vec![P::zero(); problem.y_count()];
    let mut length_law = vec![P::zero(); max_len + 1];
    for (x, row) in code.encode().iter().enumerate() {
        for e in row {
            let mass = probs[x].clone() * e.prob.clone();
            let y = code.decode_index(e.index);
            if !problem.within(x, y) {
                excess = excess + mass.clone();
            }
            let l = e.index.len() as usize;
            length_law[l] = length_law[l].clone() + mass.clone();
            output_law[y] = output_law[y].clone() + mass;
        }
    }
    Ok(CodeReport { excess_prob: excess, output_law, length_law })
}

/// Re-points every used codeword to the shortest used codeword with the same
/// reproduction, so the decoder is injective on what the encoder emits.
///
/// Distortion is unchanged and no codeword gets longer.
pub fn canonicalize<P: Prob>(code: &CodeTable<P>) -> CodeTable<P> {
    let mut shortest: HashMap<usize, CodewordIndex> = HashMap::new();
    for e in code.encode().iter().flatten() {
        if e.prob > P::zero() {
            let y = code.decode_index(e.index);
            shortest.entry(y).and_modify(|i| *i = (*i).min(e.index)).or_insert(e.index);
        }
    }
    let encode = code
        .encode()
        .iter()
        .map(|row| {
            let mut merged: BTreeMap<CodewordIndex, P> = BTreeMap::new();
            for e in row {
                let target = shortest.get(&code.decode_index(e.index)).copied().unwrap_or(e.index);
                let slot = merged.entry(target).or_insert_with(P::zero);
                *slot = slot.clone() + e.prob.clone();
            }
            merged.into_iter().map(|(index, prob)| Emission { index, prob }).collect()
        })
        .collect();
    code.with_encode(encode)
}

/// Quantities checked by [`converse_audit`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseCheck {
    pub rate: f64,
    pub g_bits: f64,
    /// `H^δ(Ŷ)` of the canonicalized code.
    pub output_entropy: f64,
    /// Distinct reproductions reachable through codewords of length `<= floor(rate)`.
    pub short_outputs: usize,
    /// `Pr{Ŷ` reachable through a short codeword`} >= 1 - δ`.
    pub short_mass_ok: bool,
    pub passed: bool,
}

/// Full converse bookkeeping for a valid `(D, rate, ε, δ)` code.
pub fn converse_check<P: Prob, L: LossyProblem<P> + ?Sized>(
    problem: &L,
    code: &CodeTable<P>,
    rate: f64,
) -> Result<ConverseCheck> {
    let report = evaluate_code(problem, code)?;
    if !report.is_code(problem.epsilon(), problem.delta(), rate) {
        return Err(LossyError::Domain(format!("code does not meet (eps, delta) at rate {rate}")));
    }
    let canon = canonicalize(code);
    let canon_report = evaluate_code(problem, &canon)?;
    let cover = greedy_cover(problem)?;
    let g_bits = cover.g_bits();

    let probs = problem.probs();
    let mut short = HashSet::new();
    let mut short_mass = P::zero();
    for (x, row) in canon.encode().iter().enumerate() {
        for e in row.iter().filter(|e| e.prob > P::zero()) {
            if f64::from(e.index.len()) <= rate {
                short.insert(canon.decode_index(e.index));
                short_mass = short_mass + probs[x].clone() * e.prob.clone();
            }
        }
    }
    let short_mass_ok = short_mass.at_least(&(P::one() - problem.delta().clone()));
    let max_short = (1u128 << (rate.max(0.0).floor() as u32 + 1).min(127)) - 1;
    let support = smooth_max_support(&canon_report.output_law, problem.delta())?;
    let output_entropy = (support as f64).log2();

    let passed = short_mass_ok
        && (short.len() as u128) <= max_short
        && cover.i_star() <= support
        && support <= short.len().max(1)
        && rate > g_bits - 1.0;
    Ok(ConverseCheck { rate, g_bits, output_entropy, short_outputs: short.len(), short_mass_ok, passed })
}

/// `true` iff the code respects the converse `rate > G - 1` and its counting argument.
pub fn converse_audit<P: Prob, L: LossyProblem<P> + ?Sized>(
    problem: &L,
    code: &CodeTable<P>,
    rate: f64,
) -> Result<bool> {
    Ok(converse_check(problem, code, rate)?.passed)
}

/// Outcome of [`random_code_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RandomCodeSearch {
    pub attempted: usize,
    pub valid: usize,
    pub violations: usize,
}

/// Draws random deterministic codes with indices in `1..=max_index`, keeps those that
/// meet the excess-distortion budget, and audits each at its smallest admissible
/// integer rate. Stops after `valid_target` valid codes or `50 * valid_target` draws.
pub fn random_code_search<P: Prob, L: LossyProblem<P> + ?Sized>(
    problem: &L,
    valid_target: usize,
    max_index: u64,
    seed: u64,
) -> Result<RandomCodeSearch> {
    require_feasible(problem)?;
    let mut rng = rng_stream(seed, 0);
    let mut out = RandomCodeSearch { attempted: 0, valid: 0, violations: 0 };
    let (nx, ny) = (problem.x_count(), problem.y_count());
    while out.valid < valid_target && out.attempted < valid_target.saturating_mul(50) {
        out.attempted += 1;
        let decode: Vec<usize> = (0..max_index).map(|_| rng.random_range(0..ny)).collect();
        let encode: Vec<u64> = (0..nx)
            .map(|x| {
                let good: Vec<u64> = (1..=max_index).filter(|&i| problem.within(x, decode[(i - 1) as usize])).collect();
                if !good.is_empty() && rng.random_bool(0.85) {
                    good[rng.random_range(0..good.len())]
                } else {
                    rng.random_range(1..=max_index)
                }
            })
            .collect();
        let code = CodeTable::<P>::deterministic(encode, decode, 0.0)?;
        let report = evaluate_code(problem, &code)?;
        if !problem.epsilon().at_least(&report.excess_prob) {
            continue;
        }
        let rate = f64::from(report.min_rate(problem.delta()));
        out.valid += 1;
        if !converse_audit(problem, &code, rate)? {
            out.violations += 1;
        }
    }
    Ok(out)
}

/// A channel `P_{Y|X}` as row-stochastic float rows.
pub type Conditional = Vec<Vec<f64>>;

/// `Pr{d(X, Y) > D}` under `P_X × conditional`.
pub fn conditional_excess<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L, conditional: &Conditional) -> f64 {
    conditional
        .iter()
        .enumerate()
        .map(|(x, row)| {
            let bad: f64 = row.iter().enumerate().filter(|(y, _)| !problem.within(x, *y)).map(|(_, w)| w).sum();
            problem.probs()[x].to_f64() * bad
        })
        .sum()
}

/// Law of `Y` induced by `P_X` and the channel.
pub fn induced_law<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L, conditional: &Conditional) -> Vec<f64> {
    let mut law = vec![0.0; problem.y_count()];
    for (x, row) in conditional.iter().enumerate() {
        let p = problem.probs()[x].to_f64();
        for (y, w) in row.iter().enumerate() {
            law[y] += p * w;
        }
    }
    law
}

fn random_simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    if rng.random_bool(0.3) {
        let mut v = vec![0.0; m];
        v[rng.random_range(0..m)] = 1.0;
        return v;
    }
    let w: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// A random channel with `Pr{d(X, Y) > D} <= ε`.
///
/// Each coverable source symbol starts from a point mass on a random reproduction within
/// the level, mixed with random noise at a random weight; the noise weights are then
/// scaled down uniformly until the violating mass fits the budget. Not uniform over the
/// feasible polytope.
pub fn sample_feasible_conditional<P: Prob, L: LossyProblem<P> + ?Sized>(
    problem: &L,
    seed: u64,
) -> Result<Conditional> {
    require_feasible(problem)?;
    let mut rng = rng_stream(seed, u64::MAX);
    Ok(sample_conditional_with(problem, &mut rng))
}

fn sample_conditional_with<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L, rng: &mut ChaCha8Rng) -> Conditional {
    let ny = problem.y_count();
    let eps = problem.epsilon().to_f64();
    let unavoidable = uncoverable_mass(problem).to_f64();
    let mut bases = Vec::with_capacity(problem.x_count());
    let mut noises = Vec::with_capacity(problem.x_count());
    let mut weights = Vec::with_capacity(problem.x_count());
    let mut noise_violation = 0.0;
    for x in 0..problem.x_count() {
        let good = problem.coball(x);
        let noise = random_simplex(rng, ny);
        if good.is_empty() {
            bases.push(None);
            weights.push(1.0);
        } else {
            let t = if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() };
            let bad: f64 = noise.iter().enumerate().filter(|(y, _)| !problem.within(x, *y)).map(|(_, w)| w).sum();
            noise_violation += problem.probs()[x].to_f64() * t * bad;
            bases.push(Some(good[rng.random_range(0..good.len())]));
            weights.push(t);
        }
        noises.push(noise);
    }
    let room = (eps - unavoidable).max(0.0);
    let scale = if noise_violation > room { room / noise_violation * (1.0 - 1e-12) } else { 1.0 };
    bases
        .into_iter()
        .zip(noises)
        .zip(weights)
        .map(|((base, noise), t)| match base {
            None => noise,
            Some(y) => {
                let t = t * scale;
                let mut row: Vec<f64> = noise.into_iter().map(|w| t * w).collect();
                row[y] += 1.0 - t;
                row
            }
        })
        .collect()
}

/// Checks that the constructed stochastic code's output law majorizes the law induced by
/// each of `trials` random feasible channels.
pub fn majorization_audit<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L, trials: usize, seed: u64) -> Result<bool> {
    let code = build_stochastic_code(problem)?;
    let best: Vec<f64> = evaluate_code(problem, &code)?.output_law.iter().map(Prob::to_f64).collect();
    let eps = problem.epsilon().to_f64();
    let failures = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_stream(seed, t);
            let cond = sample_conditional_with(problem, &mut rng);
            debug_assert!(conditional_excess(problem, &cond) <= eps + 1e-9);
            let law = induced_law(problem, &cond);
            majorizes(&best, &law).map(|ok| usize::from(!ok))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(failures == 0)
}

/// Monte Carlo estimate of a code's excess-distortion and overflow probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub samples: u64,
    pub seed: u64,
    pub rate: f64,
    pub excess_hat: f64,
    pub excess_se: f64,
    pub overflow_hat: f64,
    pub overflow_se: f64,
}

impl EmpiricalReport {
    pub const CSV_HEADER: &'static str = "samples,excess_hat,excess_se,overflow_hat,overflow_se,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.samples, self.excess_hat, self.excess_se, self.overflow_hat, self.overflow_se, self.seed
        )
    }
}

const SIM_SHARDS: u64 = 64;

type SymbolDraw = (Vec<f64>, Vec<(bool, u32)>);

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], u: f64) -> usize {
    let u = u * cdf.last().copied().unwrap_or(1.0);
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Samples `X` and the encoder randomization `samples` times at the code's rate.
///
/// Work is split into fixed shards with independent streams, so the result does not
/// depend on the thread count.
pub fn simulate<P: Prob, L: LossyProblem<P> + ?Sized>(
    problem: &L,
    code: &CodeTable<P>,
    samples: u64,
    seed: u64,
) -> Result<EmpiricalReport> {
    if samples == 0 {
        return Err(LossyError::Domain("samples must be at least 1".into()));
    }
    check_dimensions(problem, code)?;
    let source_cdf = cumulative(problem.probs().iter().map(Prob::to_f64));
    // Per source symbol: encoder CDF, and (violates level, codeword length) per branch.
    let rows: Vec<SymbolDraw> = code
        .encode()
        .iter()
        .enumerate()
        .map(|(x, row)| {
            let cdf = cumulative(row.iter().map(|e| e.prob.to_f64()));
            let outcomes =
                row.iter().map(|e| (!problem.within(x, code.decode_index(e.index)), e.index.len())).collect();
            (cdf, outcomes)
        })
        .collect();
    let rate = code.rate();
    let (excess, overflow) = (0..SIM_SHARDS)
        .into_par_iter()
        .map(|shard| {
            let n = samples / SIM_SHARDS + u64::from(shard < samples % SIM_SHARDS);
            let mut rng = rng_stream(seed, shard);
            let (mut excess, mut overflow) = (0u64, 0u64);
            for _ in 0..n {
                let x = draw(&source_cdf, rng.random::<f64>());
                let (cdf, outcomes) = &rows[x];
                let (bad, len) =
                    if outcomes.len() == 1 { outcomes[0] } else { outcomes[draw(cdf, rng.random::<f64>())] };
                excess += u64::from(bad);
                overflow += u64::from(f64::from(len) > rate);
            }
            (excess, overflow)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let stats = |k: u64| {
        let p = k as f64 / n;
        (p, (p * (1.0 - p) / n).sqrt())
    };
    let (excess_hat, excess_se) = stats(excess);
    let (overflow_hat, overflow_se) = stats(overflow);
    Ok(EmpiricalReport { samples, seed, rate, excess_hat, excess_se, overflow_hat, overflow_se })
}

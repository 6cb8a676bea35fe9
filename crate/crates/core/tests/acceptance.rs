//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the measured
//! quantities and wall time. Exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use lossy_overflow::asymptotics::{gaussian_approx, rate_distortion, rate_distortion_of};
use lossy_overflow::blocklength::{expand, g_rate, DEFAULT_BUDGET};
use lossy_overflow::dball_code::{
    build_deterministic_code, build_stochastic_code, deterministic_rate_bound, g_value, greedy_cover, GreedyCover,
};
use lossy_overflow::evaluator::{converse_audit, evaluate_code, majorization_audit, random_code_search, simulate};
use lossy_overflow::model::{DistortionSpec, Instance, LossyProblem};
use lossy_overflow::prob::{Exact, Prob};
use lossy_overflow::smooth_entropy::{smooth_max_entropy, SortedLaw};

use common::{gen, oracle};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within_budget(elapsed: Duration, secs: u64) -> bool {
    elapsed <= Duration::from_secs(secs)
}

fn thresholds_close<P: Prob>(cover: &GreedyCover<P>) -> bool {
    cover.j_star().min(cover.k_star()) <= cover.i_star() + 2
}

/// Stochastic and deterministic codes on random instances, with converse audits on
/// the constructed codes and on random valid codes.
fn one_shot_sandwich() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(1);
    let corpus: Vec<Instance<Exact>> = (0..500).map(|_| gen::instance(&mut rng, 8, false)).collect();
    let mut failures = Vec::new();
    let mut excess_misses = Vec::new();
    let mut float_misses = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let cover = greedy_cover(inst).unwrap();
        let g = cover.g_bits();
        let (eps, delta) = (inst.epsilon(), inst.delta());
        let reference = oracle::g_bits(inst.source().probs(), inst.distortion().matrix(), inst.level(), eps, delta);
        if g != reference {
            failures.push(format!("#{i}: G = {g}, brute force {reference}"));
        }

        let stochastic = build_stochastic_code(inst).unwrap();
        let report = evaluate_code(inst, &stochastic).unwrap();
        if report.excess_prob != *eps {
            excess_misses.push((i, cover.k_star(), report.excess_prob.clone()));
        }
        if report.excess_prob > *eps || report.overflow_prob(g.floor()) > *delta || stochastic.rate() != g.floor() {
            failures.push(format!(
                "#{i}: stochastic code excess {} overflow {}",
                report.excess_prob,
                report.overflow_prob(g.floor())
            ));
        }
        let float = inst.to_float();
        let float_report = evaluate_code(&float, &build_stochastic_code(&float).unwrap()).unwrap();
        if (float_report.excess_prob - eps.to_f64()).abs() > 1e-9 {
            float_misses += 1;
        }
        if float_report.excess_prob > eps.to_f64() + 1e-9
            || float_report.overflow_prob(g.floor()) > delta.to_f64() + 1e-9
        {
            failures.push(format!("#{i}: float stochastic excess {}", float_report.excess_prob));
        }

        let deterministic = build_deterministic_code(inst).unwrap();
        let report = evaluate_code(inst, &deterministic).unwrap();
        let rate = deterministic.rate();
        if report.excess_prob > *eps || report.overflow_prob(rate) > *delta || rate > deterministic_rate_bound(g) {
            failures.push(format!("#{i}: deterministic code at rate {rate}"));
        }
        if !converse_audit(inst, &stochastic, stochastic.rate()).unwrap()
            || !converse_audit(inst, &deterministic, rate).unwrap()
        {
            failures.push(format!("#{i}: converse audit failed on a constructed code"));
        }
    }

    let (mut valid, mut violations, mut round) = (0usize, 0usize, 0u64);
    while valid < 10_000 && round < 10 {
        for (i, inst) in corpus.iter().enumerate() {
            let max_index = 2 * inst.y_count() as u64 + 1;
            let search = random_code_search(inst, 20, max_index, round * 1000 + i as u64).unwrap();
            valid += search.valid;
            violations += search.violations;
        }
        round += 1;
    }
    if valid < 10_000 {
        failures.push(format!("only {valid} random valid codes found"));
    }
    if violations > 0 {
        failures.push(format!("{violations} random codes violate the converse"));
    }
    let elapsed = start.elapsed();
    let single_cell = excess_misses.iter().filter(|(_, k, _)| *k == 1).count();
    let pass = failures.is_empty() && excess_misses.is_empty() && float_misses == 0 && within_budget(elapsed, 60);
    let example = excess_misses.first().map_or(String::new(), |(i, k, e)| format!(", e.g. #{i} k*={k} excess {e}"));
    outcome(
        pass,
        format!(
            "500 instances: stochastic excess = epsilon on {}/500 ({} misses with k* = 1, {} with k* > 1, {float_misses} float misses{example}); \
             {} other failures{}; {valid} random valid codes, {violations} converse violations; {:.1} s (limit 60 s)",
            500 - excess_misses.len(),
            single_cell,
            excess_misses.len() - single_cell,
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(" ({f})")),
            elapsed.as_secs_f64()
        ),
    )
}

/// `i*` depends on `(ε, δ)` only through `ε + δ`.
fn split_invariance() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(2);
    let mut mismatches = 0;
    let mut covers = 0;
    for _ in 0..100 {
        let inst = gen::instance(&mut rng, 8, true);
        for s in [1u64, 3, 5, 8] {
            let total = Exact::from_ratio(s, 10);
            let stars: Vec<usize> = (0..=20u64)
                .map(|t| {
                    let eps = total.clone() * Exact::from_ratio(t, 20);
                    let delta = total.clone() - eps.clone();
                    covers += 1;
                    greedy_cover(&inst.with_budgets(eps, delta).unwrap()).unwrap().i_star()
                })
                .collect();
            mismatches += usize::from(stars.iter().any(|&i| i != stars[0]));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && within_budget(elapsed, 10),
        format!(
            "100 instances x 4 sums x 21 splits ({covers} covers), {mismatches} mismatches, {:.1} s (limit 10 s)",
            elapsed.as_secs_f64()
        ),
    )
}

/// The stochastic code's output law has smooth max entropy exactly `G` and majorizes
/// every feasible induced law.
fn output_law_optimality() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(3);
    let (mut entropy_failures, mut majorization_failures) = (0, 0);
    for i in 0..100u64 {
        let inst = gen::instance(&mut rng, 8, false);
        let cover = greedy_cover(&inst).unwrap();
        let law = evaluate_code(&inst, &build_stochastic_code(&inst).unwrap()).unwrap().output_law;
        if smooth_max_entropy(&law, inst.delta()).unwrap() != cover.g_bits() {
            entropy_failures += 1;
        }
        if !majorization_audit(&inst, 200, i).unwrap() {
            majorization_failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        entropy_failures == 0 && majorization_failures == 0 && within_budget(elapsed, 60),
        format!(
            "100 instances, {entropy_failures} entropy mismatches, {majorization_failures} majorization failures (200 trials each), {:.1} s (limit 60 s)",
            elapsed.as_secs_f64()
        ),
    )
}

/// `min(j*, k*) <= i* + 2` on one-shot and product instances.
fn threshold_bound() -> Outcome {
    let mut rng = gen::rng(1);
    let mut checked = 0;
    let mut violations = 0;
    for _ in 0..500 {
        let cover = greedy_cover(&gen::instance(&mut rng, 8, false)).unwrap();
        checked += 1;
        violations += usize::from(!thresholds_close(&cover));
    }
    for (p, d, eps, delta) in [(0.3, 0.1, 0.1, 0.1), (0.2, 0.2, 0.02, 0.3), (0.45, 0.15, 0.3, 0.05)] {
        let base = Instance::from_parts(
            vec![1.0 - p, p],
            DistortionSpec::hamming(2, d).unwrap().matrix().to_vec(),
            d,
            eps,
            delta,
        )
        .unwrap();
        for n in 1..=10 {
            let cover = greedy_cover(&expand(&base, n, DEFAULT_BUDGET).unwrap()).unwrap();
            checked += 1;
            violations += usize::from(!thresholds_close(&cover));
        }
    }
    outcome(
        violations == 0,
        format!("{checked} covers checked (also asserted inside greedy_cover), {violations} violations"),
    )
}

/// Zero distortion on `X = Y` reduces `G` to the smooth max entropy at `ε + δ`.
fn lossless_reduction() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(5);
    let mut failures = 0;
    for _ in 0..50 {
        let m = rand::Rng::random_range(&mut rng, 1..=8usize);
        let law = gen::law(&mut rng, m);
        let eps = rand::Rng::random_range(&mut rng, 0..1000u64);
        let delta = rand::Rng::random_range(&mut rng, 0..1000 - eps);
        let (eps, delta) = (Exact::from_ratio(eps, 1000), Exact::from_ratio(delta, 1000));
        let hamming = DistortionSpec::hamming(m, 0.0).unwrap();
        let inst =
            Instance::from_parts(law.clone(), hamming.matrix().to_vec(), 0.0, eps.clone(), delta.clone()).unwrap();
        let total = eps + delta;
        let h = smooth_max_entropy(&law, &total).unwrap();
        let brute = (oracle::smooth_support(&law, &total) as f64).log2();
        let cover = greedy_cover(&inst).unwrap();
        let order = SortedLaw::new(&law);
        let same_order = cover.centers() == &order.permutation()[..cover.centers().len()];
        if g_value(&inst).unwrap() != h || h != brute || !same_order {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && within_budget(elapsed, 5),
        format!("50 laws, {failures} failures, {:.2} s (limit 5 s)", elapsed.as_secs_f64()),
    )
}

/// Binary-Hamming rate-distortion against `h(p) - h(D)`.
fn rate_distortion_oracle() -> Outcome {
    let start = Instant::now();
    let hamming = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    let (mut worst_rate, mut worst_mean, mut worst_v): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut errors = 0;
    for p in [0.1_f64, 0.2, 0.3, 0.4, 0.5] {
        for k in 1..=8 {
            let d = p.min(1.0 - p) * f64::from(k) / 9.0;
            let Ok(sol) = rate_distortion(&[1.0 - p, p], &hamming, d) else {
                errors += 1;
                continue;
            };
            worst_rate = worst_rate.max((sol.rate - (oracle::h2(p) - oracle::h2(d))).abs());
            let mean = (1.0 - p) * sol.tilted[0] + p * sol.tilted[1];
            worst_mean = worst_mean.max((mean - sol.rate).abs());
            if p == 0.5 {
                worst_v = worst_v.max(sol.dispersion.abs());
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        errors == 0 && worst_rate <= 1e-6 && worst_mean <= 1e-6 && worst_v <= 1e-9 && within_budget(elapsed, 10),
        format!(
            "5x8 grid, max |R - (h(p) - h(D))| = {worst_rate:.2e}, max |E j - R| = {worst_mean:.2e}, max V at p = 0.5 {worst_v:.2e}, {errors} solver errors, {:.2} s (limit 10 s)",
            elapsed.as_secs_f64()
        ),
    )
}

/// Blocklength rates approach the Gaussian approximation at the predicted order.
fn second_order_trend() -> Outcome {
    let start = Instant::now();
    let hamming = DistortionSpec::hamming(2, 0.1).unwrap();
    let base = Instance::from_parts(vec![0.7, 0.3], hamming.matrix().to_vec(), 0.1, 0.1, 0.1).unwrap();
    let rate = rate_distortion_of(&base).unwrap().rate;
    let mut fit = 0.0_f64;
    let mut finite = true;
    let mut distance = Vec::new();
    for n in 1..=12 {
        let g = g_rate(&base, n, DEFAULT_BUDGET).unwrap();
        let gap = g - gaussian_approx(&base, n).unwrap();
        finite &= gap.is_finite();
        if n >= 4 {
            fit = fit.max(gap.abs() * n as f64 / ((n + 1) as f64).log2());
            distance.push((g - rate).abs());
        }
    }
    let inversions = distance.windows(2).filter(|w| w[1] > w[0]).count();
    let elapsed = start.elapsed();
    let trend: Vec<String> = distance.iter().map(|d| format!("{d:.3}")).collect();
    outcome(
        finite && fit <= 8.0 && inversions <= 1 && within_budget(elapsed, 600),
        format!(
            "(a) C = {fit:.3} (limit 8), (b) |g_rate - R| for n = 4..12: [{}] with {inversions} inversions (limit 1), {:.2} s",
            trend.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

/// Monte Carlo estimates against exact excess and overflow probabilities.
fn monte_carlo_consistency() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(8);
    let samples = 1_000_000u64;
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let inst = gen::instance(&mut rng, 8, false);
        let float = inst.to_float();
        for code in [build_stochastic_code(&inst).unwrap(), build_deterministic_code(&inst).unwrap()] {
            let exact = evaluate_code(&inst, &code).unwrap();
            let float_code = if code.kind() == lossy_overflow::dball_code::CodeKind::Stochastic {
                build_stochastic_code(&float).unwrap()
            } else {
                build_deterministic_code(&float).unwrap()
            };
            let sim = simulate(&float, &float_code, samples, i).unwrap();
            for (hat, p) in [
                (sim.excess_hat, exact.excess_prob.to_f64()),
                (sim.overflow_hat, exact.overflow_prob(code.rate()).to_f64()),
            ] {
                let se = (p * (1.0 - p) / samples as f64).sqrt();
                let z = if se == 0.0 {
                    if hat == p {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (hat - p).abs() / se
                };
                worst = worst.max(z);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 4.0 && within_budget(elapsed, 30),
        format!("20 instances x 2 codes, 10^6 samples each, worst deviation {worst:.2} standard errors (limit 4), {:.1} s (limit 30 s)", elapsed.as_secs_f64()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("one-shot sandwich", one_shot_sandwich),
        ("split invariance", split_invariance),
        ("output law optimality", output_law_optimality),
        ("threshold bound", threshold_bound),
        ("lossless reduction", lossless_reduction),
        ("rate-distortion oracle", rate_distortion_oracle),
        ("second-order trend", second_order_trend),
        ("monte carlo consistency", monte_carlo_consistency),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| outcome(false, "panicked"));
        failed += usize::from(!result.pass);
        println!("criterion {} {name}: {} ({})", k + 1, if result.pass { "PASS" } else { "FAIL" }, result.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

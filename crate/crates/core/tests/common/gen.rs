//! Random instances with rational probabilities and distortions on a coarse grid.

use lossy_overflow::model::{Instance, LossyProblem};
use lossy_overflow::prob::{Exact, Prob};
use num::{BigInt, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A law on `m` atoms with denominators from integer weights; some atoms may be zero.
pub fn law(rng: &mut impl Rng, m: usize) -> Vec<Exact> {
    loop {
        let w: Vec<u64> = (0..m).map(|_| if rng.random_bool(0.1) { 0 } else { rng.random_range(1..=20) }).collect();
        let total: u64 = w.iter().sum();
        if total > 0 {
            return w.iter().map(|&k| Exact::new(BigInt::from(k), BigInt::from(total))).collect();
        }
    }
}

pub fn matrix(rng: &mut impl Rng, nx: usize, ny: usize) -> Vec<Vec<f64>> {
    (0..nx).map(|_| (0..ny).map(|_| f64::from(rng.random_range(0..=8u32)) * 0.25).collect()).collect()
}

fn thousandths(k: u64) -> Exact {
    Exact::from_ratio(k, 1000)
}

/// A feasible instance with `|X|, |Y| <= max_alpha` and `ε, δ` in thousandths with `ε + δ < 1`.
///
/// With `all_coverable`, every source symbol has a reproduction within the level.
pub fn instance(rng: &mut impl Rng, max_alpha: usize, all_coverable: bool) -> Instance<Exact> {
    loop {
        let nx = rng.random_range(1..=max_alpha);
        let ny = rng.random_range(1..=max_alpha);
        let probs = law(rng, nx);
        let mut d = matrix(rng, nx, ny);
        let level = f64::from(rng.random_range(0..=6u32)) * 0.25;
        if all_coverable {
            for row in &mut d {
                if !row.iter().any(|&v| v <= level) {
                    let y = rng.random_range(0..ny);
                    row[y] = level;
                }
            }
        }
        let eps = rng.random_range(0..1000u64);
        let delta = rng.random_range(0..1000 - eps);
        let inst = Instance::from_parts(probs.clone(), d.clone(), level, thousandths(eps), thousandths(delta)).unwrap();
        let uncoverable = probs
            .iter()
            .zip(&d)
            .filter(|(_, row)| !row.iter().any(|&v| v <= level))
            .fold(Exact::zero(), |a, (p, _)| a + p);
        if uncoverable <= *inst.epsilon() {
            return inst;
        }
    }
}

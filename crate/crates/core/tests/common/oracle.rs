//! Brute-force references that share no code with the library's algorithms.

use lossy_overflow::prob::Exact;
use num::{One, Zero};

/// `log2` of the fewest reproduction symbols `W` such that some channel meeting the
/// excess budget puts mass `>= 1 - δ` on `W`, found by enumerating every subset of `Y`.
///
/// For fixed `W` the best channel sends every symbol with a `D`-close member of `W` there,
/// every symbol that is close to nothing there too (its violation is unavoidable), and
/// spends what is left of `ε` moving other symbols into `W`.
pub fn g_bits(probs: &[Exact], matrix: &[Vec<f64>], level: f64, epsilon: &Exact, delta: &Exact) -> f64 {
    let ny = matrix[0].len();
    assert!(ny <= 16, "subset enumeration is exponential");
    let close = |x: usize, y: usize| matrix[x][y] <= level + 1e-12 * level.abs().max(1.0);
    let uncoverable: Exact =
        (0..probs.len()).filter(|&x| !(0..ny).any(|y| close(x, y))).fold(Exact::zero(), |a, x| a + &probs[x]);
    assert!(uncoverable <= *epsilon, "oracle needs a feasible instance");
    let spare = epsilon - &uncoverable;
    let target = Exact::one() - delta;
    let mut best = usize::MAX;
    for mask in 0u32..(1 << ny) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let in_w = |y: usize| mask >> y & 1 == 1;
        let mut hit = uncoverable.clone();
        let mut movable = Exact::zero();
        for (x, p) in probs.iter().enumerate() {
            if (0..ny).any(|y| in_w(y) && close(x, y)) {
                hit += p;
            } else if (0..ny).any(|y| close(x, y)) {
                movable += p;
            }
        }
        if size == 0 {
            // The empty set only works when the target is already zero.
            hit = Exact::zero();
            movable = Exact::zero();
        }
        let reach = hit + if movable < spare { movable } else { spare.clone() };
        if reach >= target {
            best = size;
        }
    }
    (best.max(1) as f64).log2()
}

/// Smooth max entropy by trying every support size against every subset of atoms.
pub fn smooth_support(law: &[Exact], delta: &Exact) -> usize {
    let target = Exact::one() - delta;
    let m = law.len();
    (1..=m)
        .find(|&k| {
            (0u32..(1 << m))
                .filter(|s| s.count_ones() as usize == k)
                .any(|s| (0..m).filter(|i| s >> i & 1 == 1).fold(Exact::zero(), |a, i| a + &law[i]) >= target)
        })
        .unwrap_or(m)
}

/// Binary entropy in bits, written out independently of the library.
pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -(p * p.ln() + (1.0 - p) * (1.0 - p).ln()) / std::f64::consts::LN_2
    }
}

//! With zero distortion on the source alphabet, `G` is the smooth max entropy at `epsilon + delta`.

use lossy_overflow::dball_code::greedy_cover;
use lossy_overflow::model::{DistortionSpec, Instance};
use lossy_overflow::prob::{Exact, Prob};
use lossy_overflow::smooth_entropy::smooth_max_entropy;

fn main() -> lossy_overflow::error::Result<()> {
    let probs: Vec<Exact> = [1, 6, 2, 5, 3, 4].iter().map(|&k| Exact::from_ratio(k, 21)).collect();
    let hamming = DistortionSpec::hamming(probs.len(), 0.0)?;
    for (eps, delta) in [(0, 0), (1, 10), (3, 7), (6, 4)] {
        let (eps, delta) = (Exact::from_ratio(eps, 100), Exact::from_ratio(delta, 100));
        let inst = Instance::from_parts(probs.clone(), hamming.matrix().to_vec(), 0.0, eps.clone(), delta.clone())?;
        let cover = greedy_cover(&inst)?;
        let h = smooth_max_entropy(&probs, &(eps.clone() + delta.clone()))?;
        println!(
            "epsilon = {eps}, delta = {delta}: G = {:.6}, H^(epsilon+delta) = {h:.6}, centers {:?}",
            cover.g_bits(),
            cover.centers()
        );
    }
    Ok(())
}

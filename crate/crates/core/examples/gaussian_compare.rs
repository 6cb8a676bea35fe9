//! Blocklength rate `G(X^n)/n` against `R(D) + sqrt(V/n) Q^{-1}(epsilon + delta)`.

use lossy_overflow::asymptotics::{fixed_length_bridge, gaussian_approx, rate_distortion_of};
use lossy_overflow::blocklength::{g_rate, DEFAULT_BUDGET};
use lossy_overflow::model::{DistortionSpec, Instance};

fn main() -> lossy_overflow::error::Result<()> {
    let hamming = DistortionSpec::hamming(2, 0.1)?;
    let base = Instance::from_parts(vec![0.7, 0.3], hamming.matrix().to_vec(), 0.1, 0.05, 0.15)?;
    let rd = rate_distortion_of(&base)?;
    println!("R(D) = {:.6} bits, V(D) = {:.6} bits^2", rd.rate, rd.dispersion);
    println!("{:>3} {:>9} {:>9} {:>9} {:>9}", "n", "G/n", "gaussian", "gap", "fixed-len");
    for n in 1..=12 {
        let g = g_rate(&base, n, DEFAULT_BUDGET)?;
        let approx = gaussian_approx(&base, n)?;
        let bridge = fixed_length_bridge(&base, n, DEFAULT_BUDGET)?;
        println!("{n:>3} {g:>9.6} {approx:>9.6} {:>9.6} {bridge:>9.6}", g - approx);
    }
    Ok(())
}

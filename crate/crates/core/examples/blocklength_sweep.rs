//! Per-symbol bounds on the optimal rate of a memoryless Bernoulli(0.3) source, n = 1..12.

use lossy_overflow::blocklength::{sweep, DEFAULT_BUDGET};
use lossy_overflow::model::{DistortionSpec, Instance};

fn main() -> lossy_overflow::error::Result<()> {
    let hamming = DistortionSpec::hamming(2, 0.1)?;
    let base = Instance::from_parts(vec![0.7, 0.3], hamming.matrix().to_vec(), 0.1, 0.1, 0.1)?;
    println!("{:>3} {:>9} {:>9} {:>9} {:>9} {:>6}", "n", "G/n", "lower", "stoch", "determ", "i*");
    for row in sweep(&base, 12, DEFAULT_BUDGET)? {
        let s = row.sandwich;
        println!(
            "{:>3} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>6}",
            s.n,
            s.g_bits / s.n as f64,
            s.lower,
            s.upper_stochastic,
            s.upper_deterministic,
            s.i_star
        );
    }
    Ok(())
}

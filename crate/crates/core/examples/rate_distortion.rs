//! Rate-distortion function, slope and dispersion of a binary source against `h(p) - h(D)`.

use lossy_overflow::asymptotics::{binary_entropy, rate_distortion};

fn main() -> lossy_overflow::error::Result<()> {
    let hamming = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    let p = 0.3;
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "D", "R(D)", "h(p)-h(D)", "lambda*", "V(D)");
    for k in 1..=6 {
        let d = 0.05 * k as f64;
        let sol = rate_distortion(&[1.0 - p, p], &hamming, d)?;
        let oracle = (binary_entropy(p) - binary_entropy(d)).max(0.0);
        println!("{d:>5.2} {:>10.6} {oracle:>10.6} {:>10.6} {:>10.6}", sol.rate, sol.slope, sol.dispersion);
    }

    // Quaternary source, absolute-error distortion.
    let probs = [0.4, 0.3, 0.2, 0.1];
    let matrix: Vec<Vec<f64>> = (0..4).map(|x: i32| (0..4).map(|y: i32| f64::from((x - y).abs())).collect()).collect();
    for d in [0.25, 0.5, 0.75] {
        let sol = rate_distortion(&probs, &matrix, d)?;
        let law: Vec<String> = sol.output_law.iter().map(|q| format!("{q:.4}")).collect();
        println!("quaternary D = {d}: R = {:.6} bits, output law [{}]", sol.rate, law.join(", "));
    }
    Ok(())
}

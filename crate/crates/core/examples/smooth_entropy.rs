//! Smooth max entropy of a few laws and a majorization check.

use lossy_overflow::prob::Exact;
use lossy_overflow::smooth_entropy::{majorizes, smooth_max_entropy, smooth_max_support};

fn main() -> lossy_overflow::error::Result<()> {
    let law = [0.5, 0.25, 0.25];
    for delta in [0.0, 0.25, 0.5, 0.75] {
        println!("H^{delta}(0.5, 0.25, 0.25) = {:.6} bits", smooth_max_entropy(&law, &delta)?);
    }

    let exact: Vec<Exact> = [(1, 3), (1, 3), (1, 3)].iter().map(|&(p, q)| Exact::new(p.into(), q.into())).collect();
    let third = Exact::new(1.into(), 3.into());
    println!("support of uniform(3) at delta = 1/3: {}", smooth_max_support(&exact, &third)?);

    let peaked = [0.7, 0.2, 0.1];
    let flat = [0.4, 0.3, 0.3];
    println!("(0.7, 0.2, 0.1) majorizes (0.4, 0.3, 0.3): {}", majorizes(&peaked, &flat)?);
    for delta in [0.1, 0.3] {
        println!(
            "delta = {delta}: H(peaked) = {:.6} <= H(flat) = {:.6}",
            smooth_max_entropy(&peaked, &delta)?,
            smooth_max_entropy(&flat, &delta)?
        );
    }
    Ok(())
}

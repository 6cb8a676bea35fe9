//! Monte Carlo estimates of excess and overflow probabilities next to their exact values.

use lossy_overflow::dball_code::{build_deterministic_code, build_stochastic_code};
use lossy_overflow::evaluator::{evaluate_code, simulate};
use lossy_overflow::io::load_instance;
use lossy_overflow::prob::Prob;

fn main() -> lossy_overflow::error::Result<()> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/quaternary_abs.json");
    let inst = load_instance::<f64>(&path)?;
    for code in [build_stochastic_code(&inst)?, build_deterministic_code(&inst)?] {
        let exact = evaluate_code(&inst, &code)?;
        let sim = simulate(&inst, &code, 1_000_000, 42)?;
        println!(
            "{:>13}: excess {:.5} ± {:.5} (exact {:.5}), overflow {:.5} ± {:.5} (exact {:.5})",
            code.kind().as_str(),
            sim.excess_hat,
            sim.excess_se,
            exact.excess_prob.to_f64(),
            sim.overflow_hat,
            sim.overflow_se,
            exact.overflow_prob(code.rate()).to_f64()
        );
    }
    Ok(())
}

//! The stochastic and deterministic D-ball codes of an instance, evaluated exactly.

use lossy_overflow::dball_code::{
    build_deterministic_code, build_stochastic_code, deterministic_rate_bound, greedy_cover,
};
use lossy_overflow::evaluator::evaluate_code;
use lossy_overflow::io::{code_to_json, load_instance};
use lossy_overflow::model::LossyProblem;
use lossy_overflow::prob::Exact;

fn main() -> lossy_overflow::error::Result<()> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/quaternary_abs.json");
    let inst = load_instance::<Exact>(&path)?;
    let g = greedy_cover(&inst)?.g_bits();
    println!("G = {g:.6} bits, deterministic rate bound {}", deterministic_rate_bound(g));

    for code in [build_stochastic_code(&inst)?, build_deterministic_code(&inst)?] {
        let report = evaluate_code(&inst, &code)?;
        println!(
            "{:>13}: rate {}, excess {} (epsilon {}), overflow {} (delta {})",
            code.kind().as_str(),
            code.rate(),
            report.excess_prob,
            inst.epsilon(),
            report.overflow_prob(code.rate()),
            inst.delta()
        );
    }
    let code = build_stochastic_code(&inst)?;
    println!("{}", serde_json::to_string_pretty(&code_to_json(&inst, &code))?);
    Ok(())
}

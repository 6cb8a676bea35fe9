//! Converse and majorization audits on the bundled instances.

use lossy_overflow::dball_code::{build_deterministic_code, build_stochastic_code};
use lossy_overflow::evaluator::{converse_check, majorization_audit, random_code_search};
use lossy_overflow::io::load_instance;
use lossy_overflow::model::LossyProblem;
use lossy_overflow::prob::Exact;

fn main() -> lossy_overflow::error::Result<()> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    for name in ["binary.json", "three_point.json", "quaternary_abs.json"] {
        let inst = load_instance::<Exact>(&dir.join(name))?;
        println!("{name}");
        for code in [build_stochastic_code(&inst)?, build_deterministic_code(&inst)?] {
            let check = converse_check(&inst, &code, code.rate())?;
            println!(
                "  {:>13} code: rate {} > G - 1 = {:.3}, H^delta(output) = {:.3}, passed {}",
                code.kind().as_str(),
                check.rate,
                check.g_bits - 1.0,
                check.output_entropy,
                check.passed
            );
        }
        let search = random_code_search(&inst, 500, 2 * inst.y_count() as u64 + 1, 1)?;
        println!("  random codes: {} valid, {} converse violations", search.valid, search.violations);
        println!("  majorization over 200 feasible channels: {}", majorization_audit(&inst, 200, 1)?);
    }
    Ok(())
}

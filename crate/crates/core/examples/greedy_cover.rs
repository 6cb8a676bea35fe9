//! Greedy D-ball cover of an instance file and the quantity `G` it yields.
//!
//! `cargo run --example greedy_cover -- examples/data/quaternary_abs.json`

use std::path::PathBuf;

use lossy_overflow::dball_code::greedy_cover;
use lossy_overflow::io::load_instance;
use lossy_overflow::model::LossyProblem;
use lossy_overflow::prob::Exact;

fn main() -> lossy_overflow::error::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/quaternary_abs.json"));
    let inst = load_instance::<Exact>(&path)?;
    let cover = greedy_cover(&inst)?;

    println!("{:>6} {:>10} {:>10}  cell", "center", "mass", "cumulative");
    for ((y, cell), (mass, cum)) in
        cover.centers().iter().zip(cover.cells()).zip(cover.cell_mass().iter().zip(cover.cum_mass()))
    {
        let members: Vec<String> = cell.iter().map(|&x| inst.x_label(x)).collect();
        println!(
            "{:>6} {:>10} {:>10}  {{{}}}",
            inst.y_label(*y),
            mass.to_string(),
            cum.to_string(),
            members.join(", ")
        );
    }
    println!("i* = {}, k* = {}, j* = {}", cover.i_star(), cover.k_star(), cover.j_star());
    println!("alpha = {}, beta = {}, gamma = {}", cover.alpha(), cover.beta(), cover.gamma());
    println!("G = {:.6} bits", cover.g_bits());
    println!("epsilon + delta = {}", inst.epsilon().clone() + inst.delta().clone());
    Ok(())
}

//! Lattice candidates: exact enumeration against simulated annealing.
//!
//! cargo run --release --example surrogate_candidates [SEQUENCE]

use fusefold::residue::parse_sequence;
use fusefold::surrogate::{
    anneal, enumerate_exhaustive_distinct, AnnealSchedule, SurrogateEnergyModel,
};

fn main() -> fusefold::Result<()> {
    let seq_arg = std::env::args().nth(1).unwrap_or_else(|| "MKLVFWAG".into());
    let seq = parse_sequence(&seq_arg)?;
    let model = SurrogateEnergyModel::miyazawa_jernigan(seq.len());

    let exact = enumerate_exhaustive_distinct(&seq, &model, 5)?;
    println!("exhaustive, {} distinct folds:", exact.len());
    for c in &exact.candidates {
        println!(
            "  {}  E = {:8.3}  moves {}",
            c.conformation.id(),
            c.energy,
            c.moves
        );
    }

    let schedule = AnnealSchedule::default();
    for seed in 0..3 {
        let best = anneal(&seq, &model, &schedule, seed, 1)?;
        let c = &best.candidates[0];
        println!(
            "anneal seed {seed}: E = {:8.3}  moves {}",
            c.energy, c.moves
        );
    }
    Ok(())
}

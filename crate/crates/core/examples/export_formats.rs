//! Write one candidate as XYZ and PDB, and a ranking as the summary table.
//!
//! cargo run --example export_formats

use fusefold::io_formats::{format_pdb, format_summary, format_xyz, parse_xyz};
use fusefold::prelude::*;

fn main() -> fusefold::Result<()> {
    let seq = parse_sequence("GAVLKFW")?;
    let model = SurrogateEnergyModel::miyazawa_jernigan(seq.len());
    let set = enumerate_exhaustive_distinct(&seq, &model, 4)?;
    let best = &set.candidates[0];

    let xyz = format_xyz(&best.conformation, &[("moves", best.moves.to_string())])?;
    println!("--- XYZ\n{xyz}");
    let back = parse_xyz(&xyz, None, "unused")?;
    assert_eq!(back.energy_q(), best.conformation.energy_q());

    println!("--- PDB\n{}", format_pdb(&best.conformation)?);

    let cfg = ScoringConfig::default();
    // priors that favour the third-lowest fold
    let priors = priors_from_conformation(&set.candidates[2].conformation, &cfg.rama);
    let report = fuse(
        &set.conformations(),
        &priors,
        &FusionWeights::default(),
        &cfg,
    )?;
    println!("--- summary.csv\n{}", format_summary(&report)?);
    Ok(())
}

//! Fuse noisy energies with priors and compare against energy-only ranking.
//!
//! cargo run --release --example rerank

use fusefold::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fusefold::Result<()> {
    let seq = parse_sequence("MKVLWEFA")?;
    let model = SurrogateEnergyModel::miyazawa_jernigan(seq.len());
    let set = enumerate_exhaustive_distinct(&seq, &model, 10)?;
    let native = set.candidates[0].conformation.clone();

    // perturb the energies to mimic an imprecise energy model
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let candidates = set
        .candidates
        .iter()
        .map(|c| {
            c.conformation
                .clone()
                .with_energy(c.energy + rng.random_range(-3.0..3.0))
        })
        .collect::<Result<Vec<_>>>()?;

    let cfg = ScoringConfig::default();
    let priors = priors_from_conformation(&native, &cfg.rama);
    let fused = fuse(&candidates, &priors, &FusionWeights::default(), &cfg)?;
    let energy_only = fuse(
        &candidates,
        &priors,
        &FusionWeights::new(1.0, 0.0, 0.0)?,
        &cfg,
    )?;

    println!("rank  candidate  E_q       D_ss     D_angle   E_fuse   RMSD");
    for e in &fused.entries {
        let c = candidates
            .iter()
            .find(|c| c.id() == e.score.candidate_id)
            .unwrap();
        println!(
            "{:>4}  {:<9}  {:8.3}  {:7.4}  {:7.4}  {:7.4}  {:5.2}",
            e.rank,
            c.id(),
            e.score.e_q_raw,
            e.score.d_ss_raw.unwrap_or(f64::NAN),
            e.score.d_angle_raw.unwrap_or(f64::NAN),
            e.score.e_fuse,
            kabsch_rmsd(c, &native)?,
        );
    }
    println!(
        "\nfused pick {} vs energy-only pick {} (native {})",
        fused.best().score.candidate_id,
        energy_only.best().score.candidate_id,
        native.id()
    );
    Ok(())
}

//! Re-rank protein fragment backbones by fusing a raw energy with
//! secondary-structure and dihedral priors.
//!
//! The pipeline: candidates (Cα traces with an energy `E_q`) come from the
//! lattice [`surrogate`] or from `.xyz` files; [`scoring::fuse`] compares each
//! candidate's virtual torsions and induced secondary structure against a
//! per-residue [`priors::PriorsProfile`] and orders them by
//! `α·Ẽ_q + β·D̃_ss + γ·D̃_∠`. [`evaluation`] holds the statistics used to
//! compare methods across fragments.
//!
//! ```
//! use fusefold::prelude::*;
//!
//! let seq = parse_sequence("MKLVFGA")?;
//! let model = SurrogateEnergyModel::miyazawa_jernigan(seq.len());
//! let set = enumerate_exhaustive_distinct(&seq, &model, 8)?;
//! let native = &set.candidates[2].conformation;
//! let priors = priors_from_conformation(native, &RamaConfig::default());
//! let report = fuse(&set.conformations(), &priors, &FusionWeights::default(), &ScoringConfig::default())?;
//! assert_eq!(report.best().score.candidate_id, native.id());
//! # Ok::<(), fusefold::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod io_formats;
pub mod priors;
pub mod rama;
pub mod residue;
pub mod scoring;
pub mod surrogate;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{kabsch_rmsd, virtual_dihedrals, Conformation, Point3};
    pub use crate::priors::{parse_priors, PriorsProfile, PriorsSchema};
    pub use crate::rama::RamaConfig;
    pub use crate::residue::{parse_sequence, AminoAcid};
    pub use crate::scoring::{
        fuse, priors_from_conformation, FusionWeights, RankingReport, ScoringConfig, SsMetric,
        SsMode,
    };
    pub use crate::surrogate::{
        anneal, enumerate_exhaustive, enumerate_exhaustive_distinct, AnnealSchedule,
        SurrogateEnergyModel,
    };
}

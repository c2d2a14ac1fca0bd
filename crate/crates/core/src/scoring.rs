//! Divergence and consistency terms, per-term normalization, and the fused
//! ranking.
//!
//! For candidate `c` the fused energy is
//! `α·Ẽq(c) + β·D̃ss(c) + γ·D̃∠(c)`, where each tilde term is min–max scaled
//! across the candidate set. Candidates are sorted ascending by the fused
//! value; exact ties fall back to the raw energy and then to the id.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{virtual_dihedrals, wrap_finite, Conformation, DihedralTrace};
use crate::priors::PriorsProfile;
use crate::rama::{expand_ss8_unchecked, induce_ss3, RamaConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SsMetric {
    CrossEntropy,
    #[default]
    KullbackLeibler,
    L2,
}

impl FromStr for SsMetric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ce" => Ok(Self::CrossEntropy),
            "kl" => Ok(Self::KullbackLeibler),
            "l2" => Ok(Self::L2),
            other => Err(Error::Config(format!("unknown SS metric {other:?}"))),
        }
    }
}

impl fmt::Display for SsMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CrossEntropy => "ce",
            Self::KullbackLeibler => "kl",
            Self::L2 => "l2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SsMode {
    #[default]
    Ss3,
    Ss8,
}

impl FromStr for SsMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ss3" => Ok(Self::Ss3),
            "ss8" => Ok(Self::Ss8),
            other => Err(Error::Config(format!("unknown SS mode {other:?}"))),
        }
    }
}

impl fmt::Display for SsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ss3 => "ss3",
            Self::Ss8 => "ss8",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl FusionWeights {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let w = Self { alpha, beta, gamma };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config(format!(
                "weights must be finite and non-negative, got {all:?}"
            )));
        }
        if all.iter().all(|w| *w == 0.0) {
            return Err(Error::Config("at least one weight must be positive".into()));
        }
        Ok(())
    }
}

impl Default for FusionWeights {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringConfig {
    pub ss_metric: SsMetric,
    pub ss_mode: SsMode,
    pub epsilon: f64,
    pub rsa_weighting: bool,
    pub normalize: bool,
    pub rama: RamaConfig,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            ss_metric: SsMetric::KullbackLeibler,
            ss_mode: SsMode::Ss3,
            epsilon: 1e-8,
            rsa_weighting: false,
            normalize: true,
            rama: RamaConfig::default(),
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1e-3) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1e-3], got {}",
                self.epsilon
            )));
        }
        self.rama.validate()
    }
}

/// Torsions and induced SS3 distributions derived from one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateAnnotation {
    pub dihedrals: DihedralTrace,
    /// Present exactly where both torsions are.
    pub ss3: Vec<Option<[f64; 3]>>,
}

impl CandidateAnnotation {
    pub fn len(&self) -> usize {
        self.ss3.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ss3.is_empty()
    }

    fn induced(&self, i: usize, mode: SsMode) -> Option<Distribution> {
        let p3 = self.ss3[i]?;
        Some(match mode {
            SsMode::Ss3 => Distribution::Three(p3),
            SsMode::Ss8 => Distribution::Eight(expand_ss8_unchecked(p3)),
        })
    }
}

enum Distribution {
    Three([f64; 3]),
    Eight([f64; 8]),
}

impl Distribution {
    fn as_slice(&self) -> &[f64] {
        match self {
            Distribution::Three(p) => p,
            Distribution::Eight(p) => p,
        }
    }
}

pub fn annotate(c: &Conformation, rama: &RamaConfig) -> CandidateAnnotation {
    let dihedrals = virtual_dihedrals(c);
    let ss3 = dihedrals
        .phi_hat
        .iter()
        .zip(&dihedrals.psi_hat)
        .map(|(phi, psi)| induce_ss3((*phi)?, (*psi)?, rama))
        .collect();
    CandidateAnnotation { dihedrals, ss3 }
}

/// Priors that a candidate agrees with perfectly: its own torsions and induced
/// distributions, unit RSA. Masked residues stay masked.
pub fn priors_from_conformation(c: &Conformation, rama: &RamaConfig) -> PriorsProfile {
    let ann = annotate(c, rama);
    PriorsProfile {
        sequence: c.sequence(),
        ss8: ann
            .ss3
            .iter()
            .map(|p| p.map(expand_ss8_unchecked))
            .collect(),
        ss3: ann.ss3,
        phi: ann.dihedrals.phi_hat,
        psi: ann.dihedrals.psi_hat,
        rsa: vec![1.0; c.len()],
    }
}

/// Per-residue discrepancy between a prior distribution `p` and a candidate
/// distribution `p_hat`.
pub fn ss_divergence(p: &[f64], p_hat: &[f64], metric: SsMetric, epsilon: f64) -> Result<f64> {
    if p.len() != p_hat.len() {
        return Err(Error::Shape(format!(
            "distributions of length {} and {}",
            p.len(),
            p_hat.len()
        )));
    }
    if p.len() != 3 && p.len() != 8 {
        return Err(Error::Shape(format!(
            "expected 3 or 8 classes, got {}",
            p.len()
        )));
    }
    let pairs = p.iter().zip(p_hat);
    Ok(match metric {
        SsMetric::CrossEntropy => -pairs.map(|(a, b)| a * (b + epsilon).ln()).sum::<f64>(),
        SsMetric::KullbackLeibler => pairs
            .map(|(a, b)| a * ((a + epsilon) / (b + epsilon)).ln())
            .sum(),
        SsMetric::L2 => pairs.map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
    })
}

fn check_length(ann: &CandidateAnnotation, priors: &PriorsProfile) -> Result<()> {
    if ann.len() != priors.len() {
        return Err(Error::Shape(format!(
            "candidate has {} residues but priors cover {}",
            ann.len(),
            priors.len()
        )));
    }
    Ok(())
}

/// Mean SS divergence over residues where both the prior and the induced
/// distribution exist; `None` when there are none.
pub fn ss_aggregate(
    ann: &CandidateAnnotation,
    priors: &PriorsProfile,
    cfg: &ScoringConfig,
) -> Result<Option<f64>> {
    check_length(ann, priors)?;
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..ann.len() {
        let prior: Option<&[f64]> = match cfg.ss_mode {
            SsMode::Ss3 => priors.ss3[i].as_ref().map(|p| p.as_slice()),
            SsMode::Ss8 => priors.ss8[i].as_ref().map(|p| p.as_slice()),
        };
        let (Some(prior), Some(induced)) = (prior, ann.induced(i, cfg.ss_mode)) else {
            continue;
        };
        total += ss_divergence(prior, induced.as_slice(), cfg.ss_metric, cfg.epsilon)?;
        count += 1;
    }
    Ok((count > 0).then(|| total / count as f64))
}

/// Weighted mean squared wrapped angle error.
///
/// φ and ψ are paired independently: a residue contributes its φ term when both
/// sides have φ, its ψ term when both sides have ψ, and its weight once if it
/// contributes any term.
pub fn angle_consistency(
    ann: &CandidateAnnotation,
    priors: &PriorsProfile,
    cfg: &ScoringConfig,
) -> Result<Option<f64>> {
    check_length(ann, priors)?;
    let sq = |a: Option<f64>, b: Option<f64>| -> Option<f64> {
        let d = wrap_finite(a? - b?);
        Some(d * d)
    };
    let mut terms = Vec::new();
    for i in 0..ann.len() {
        let phi = sq(priors.phi[i], ann.dihedrals.phi_hat[i]);
        let psi = sq(priors.psi[i], ann.dihedrals.psi_hat[i]);
        if phi.is_none() && psi.is_none() {
            continue;
        }
        let w = if cfg.rsa_weighting {
            let r = priors.rsa[i];
            if r.is_nan() {
                1.0
            } else {
                r.clamp(0.0, 1.0)
            }
        } else {
            1.0
        };
        terms.push((w, phi.unwrap_or(0.0) + psi.unwrap_or(0.0)));
    }
    if terms.is_empty() {
        return Ok(None);
    }
    let weight_sum: f64 = terms.iter().map(|(w, _)| w).sum();
    if weight_sum > 0.0 {
        Ok(Some(
            terms.iter().map(|(w, d)| w * d).sum::<f64>() / weight_sum,
        ))
    } else {
        Ok(Some(
            terms.iter().map(|(_, d)| d).sum::<f64>() / terms.len() as f64,
        ))
    }
}

/// Min–max scale the finite entries into `[0, 1]`. Absent or non-finite
/// entries become 0, as do all entries when the finite range is empty.
pub fn minmax_normalize(values: &[Option<f64>]) -> Vec<f64> {
    let finite = values.iter().flatten().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    values
        .iter()
        .map(|v| match v {
            Some(v) if v.is_finite() && hi > lo => ((v - lo) / (hi - lo)).clamp(0.0, 1.0),
            _ => 0.0,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusedScore {
    pub candidate_id: String,
    pub e_q_raw: f64,
    pub d_ss_raw: Option<f64>,
    pub d_angle_raw: Option<f64>,
    /// Scaled terms. With normalization disabled these carry the raw values,
    /// absent terms still reading 0.
    pub e_q_norm: f64,
    pub d_ss_norm: f64,
    pub d_angle_norm: f64,
    pub e_fuse: f64,
}

/// How a candidate was separated from neighbours sharing its fused energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    None,
    RawEnergy,
    CandidateId,
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreak::None => "none",
            TieBreak::RawEnergy => "e_q",
            TieBreak::CandidateId => "id",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    /// 1-based.
    pub rank: usize,
    pub score: FusedScore,
    pub tie_break: TieBreak,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingReport {
    pub entries: Vec<RankedCandidate>,
    pub weights: FusionWeights,
    pub config: ScoringConfig,
}

impl RankingReport {
    pub fn ordered_ids(&self) -> Vec<&str> {
        self.entries
            .iter()
            .map(|e| e.score.candidate_id.as_str())
            .collect()
    }

    pub fn best(&self) -> &RankedCandidate {
        &self.entries[0]
    }

    pub fn get(&self, id: &str) -> Option<&RankedCandidate> {
        self.entries.iter().find(|e| e.score.candidate_id == id)
    }
}

struct RawTerms {
    e_q: f64,
    d_ss: Option<f64>,
    d_angle: Option<f64>,
}

fn float_cmp(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or_else(|| a.total_cmp(&b))
}

/// Score, normalize, fuse and rank a candidate set against one priors profile.
pub fn fuse(
    candidates: &[Conformation],
    priors: &PriorsProfile,
    weights: &FusionWeights,
    cfg: &ScoringConfig,
) -> Result<RankingReport> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput("no candidates to rank"));
    }
    weights.validate()?;
    cfg.validate()?;
    let mut ids: Vec<&str> = candidates.iter().map(Conformation::id).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateId(w[0].to_string()));
    }

    let raw: Vec<RawTerms> = candidates
        .par_iter()
        .map(|c| -> Result<RawTerms> {
            let ann = annotate(c, &cfg.rama);
            Ok(RawTerms {
                e_q: c.energy_q(),
                d_ss: ss_aggregate(&ann, priors, cfg)?,
                d_angle: angle_consistency(&ann, priors, cfg)?,
            })
        })
        .collect::<Result<_>>()?;

    let scale = |values: Vec<Option<f64>>| -> Vec<f64> {
        if cfg.normalize {
            minmax_normalize(&values)
        } else {
            values.into_iter().map(|v| v.unwrap_or(0.0)).collect()
        }
    };
    let e_q = scale(raw.iter().map(|r| Some(r.e_q)).collect());
    let d_ss = scale(raw.iter().map(|r| r.d_ss).collect());
    let d_angle = scale(raw.iter().map(|r| r.d_angle).collect());

    let mut scores: Vec<FusedScore> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| FusedScore {
            candidate_id: c.id().to_string(),
            e_q_raw: raw[i].e_q,
            d_ss_raw: raw[i].d_ss,
            d_angle_raw: raw[i].d_angle,
            e_q_norm: e_q[i],
            d_ss_norm: d_ss[i],
            d_angle_norm: d_angle[i],
            e_fuse: weights.alpha * e_q[i] + weights.beta * d_ss[i] + weights.gamma * d_angle[i],
        })
        .collect();
    scores.sort_by(|a, b| {
        float_cmp(a.e_fuse, b.e_fuse)
            .then_with(|| float_cmp(a.e_q_raw, b.e_q_raw))
            .then_with(|| a.candidate_id.cmp(&b.candidate_id))
    });

    let tie_break = |i: usize| -> TieBreak {
        let me = &scores[i];
        let neighbours = [i.checked_sub(1), Some(i + 1)];
        let mut best = TieBreak::None;
        for j in neighbours.into_iter().flatten() {
            let Some(other) = scores.get(j) else { continue };
            if other.e_fuse != me.e_fuse {
                continue;
            }
            if other.e_q_raw == me.e_q_raw {
                return TieBreak::CandidateId;
            }
            best = TieBreak::RawEnergy;
        }
        best
    };
    let breaks: Vec<TieBreak> = (0..scores.len()).map(tie_break).collect();
    let entries = scores
        .into_iter()
        .zip(breaks)
        .enumerate()
        .map(|(i, (score, tie_break))| RankedCandidate {
            rank: i + 1,
            score,
            tie_break,
        })
        .collect();
    Ok(RankingReport {
        entries,
        weights: *weights,
        config: *cfg,
    })
}

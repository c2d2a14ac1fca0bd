//! Cubic-lattice stand-in for hardware candidate generation.
//!
//! A fragment of length `L` is a self-avoiding-ish walk whose first bond lies
//! along +x; the remaining `L - 2` bonds are relative turns encoded as a
//! [`MoveString`]. The energy mirrors the term split of the hardware
//! Hamiltonian:
//!
//! * backbone integrity holds by construction (every bond has the same length),
//! * steric exclusion is a penalty `λ` per pair of coinciding residues,
//! * residue interactions are Miyazawa–Jernigan contact energies between
//!   non-bonded residues (`|i - j| >= 3`) at unit lattice distance,
//! * the miscellaneous term is zero.
//!
//! Small fragments are solved exactly by [`enumerate_exhaustive`]; larger ones
//! by the Metropolis chain in [`anneal`].

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Conformation, Point3};
use crate::residue::AminoAcid;

/// Canonical Cα–Cα virtual bond length in ångströms.
pub const DEFAULT_BOND_LENGTH: f64 = 3.8;

/// Largest fragment the exhaustive enumerator accepts (5^8 walks).
pub const MAX_EXHAUSTIVE_LENGTH: usize = 10;

/// Relative turn on the cubic lattice, ordered by its letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Down,
    Forward,
    Left,
    Right,
    Up,
}

impl Move {
    pub const ALL: [Move; 5] = [Move::Down, Move::Forward, Move::Left, Move::Right, Move::Up];

    pub fn letter(self) -> char {
        match self {
            Move::Down => 'D',
            Move::Forward => 'F',
            Move::Left => 'L',
            Move::Right => 'R',
            Move::Up => 'U',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.letter() == c.to_ascii_uppercase())
    }

    /// The same turn seen from a frame rolled a quarter turn about its heading.
    fn rolled(self) -> Self {
        match self {
            Move::Up => Move::Right,
            Move::Right => Move::Down,
            Move::Down => Move::Left,
            Move::Left => Move::Up,
            Move::Forward => Move::Forward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MoveString(pub Vec<Move>);

impl MoveString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of residues the walk places.
    pub fn fragment_length(&self) -> usize {
        self.0.len() + 2
    }

    pub fn straight(fragment_length: usize) -> Self {
        MoveString(vec![Move::Forward; fragment_length.saturating_sub(2)])
    }

    /// Representative shared by all walks that differ only by a rigid
    /// rotation about the first bond: the smallest of the four rolled labelings.
    pub fn canonical(&self) -> MoveString {
        let mut current = self.clone();
        let mut best = self.clone();
        for _ in 0..3 {
            current = MoveString(current.0.iter().map(|m| m.rolled()).collect());
            if current < best {
                best = current.clone();
            }
        }
        best
    }

    fn from_index(mut index: usize, len: usize) -> Self {
        let mut moves = vec![Move::Down; len];
        for slot in moves.iter_mut().rev() {
            *slot = Move::ALL[index % 5];
            index /= 5;
        }
        MoveString(moves)
    }
}

impl fmt::Display for MoveString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|m| write!(f, "{}", m.letter()))
    }
}

impl FromStr for MoveString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| {
                Move::from_letter(c).ok_or_else(|| {
                    Error::Config(format!("invalid move {c:?} at position {}", i + 1))
                })
            })
            .collect::<Result<_>>()
            .map(MoveString)
    }
}

type Site = [i32; 3];

fn add(a: Site, b: Site) -> Site {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn neg(a: Site) -> Site {
    [-a[0], -a[1], -a[2]]
}

fn cross(a: Site, b: Site) -> Site {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Integer lattice sites of the walk, starting at the origin.
///
/// The frame `(heading, up)` starts as `(+x, +y)` and is carried along each
/// turn: `Up` pitches the heading onto the up vector, `Left`/`Right` yaw about
/// it, with right = heading × up.
pub fn lattice_walk(moves: &MoveString) -> Vec<[i32; 3]> {
    let mut sites = Vec::with_capacity(moves.fragment_length());
    let mut pos = [0, 0, 0];
    let mut heading = [1, 0, 0];
    let mut up = [0, 1, 0];
    sites.push(pos);
    pos = add(pos, heading);
    sites.push(pos);
    for m in &moves.0 {
        let (h, u) = match m {
            Move::Forward => (heading, up),
            Move::Up => (up, neg(heading)),
            Move::Down => (neg(up), heading),
            Move::Right => (cross(heading, up), up),
            Move::Left => (cross(up, heading), up),
        };
        heading = h;
        up = u;
        pos = add(pos, heading);
        sites.push(pos);
    }
    sites
}

/// Cα coordinates of the walk scaled by `bond_length`.
pub fn decode(moves: &MoveString, bond_length: f64) -> Vec<Point3> {
    lattice_walk(moves)
        .into_iter()
        .map(|s| Point3::new(s[0] as f64, s[1] as f64, s[2] as f64) * bond_length)
        .collect()
}

/// Symmetric 20×20 residue contact energies indexed by [`AminoAcid::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct ContactMatrix([[f64; 20]; 20]);

impl ContactMatrix {
    pub fn from_fn(f: impl Fn(AminoAcid, AminoAcid) -> f64) -> Result<Self> {
        let mut m = [[0.0; 20]; 20];
        for a in AminoAcid::ALL {
            for b in AminoAcid::ALL {
                m[a.index()][b.index()] = f(a, b);
            }
        }
        let out = Self(m);
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..20 {
            for j in 0..20 {
                let v = self.0[i][j];
                if !v.is_finite() || v != self.0[j][i] {
                    return Err(Error::Config(format!(
                        "contact matrix entry ({}, {}) is not finite and symmetric",
                        AminoAcid::ALL[i],
                        AminoAcid::ALL[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// The bundled Miyazawa–Jernigan table.
    pub fn miyazawa_jernigan() -> &'static ContactMatrix {
        static TABLE: OnceLock<ContactMatrix> = OnceLock::new();
        TABLE.get_or_init(|| {
            Self::parse_triangle(include_str!("../data/miyazawa_jernigan.tsv"))
                .expect("bundled contact table is well formed")
        })
    }

    /// Parse an upper-triangular table: a header naming the residue order,
    /// then one row per residue listing entries from the diagonal rightwards.
    pub fn parse_triangle(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("contact table is empty".into()))?;
        let order: Vec<AminoAcid> = header
            .split_whitespace()
            .map(|c| {
                AminoAcid::parse_code(c)
                    .ok_or_else(|| Error::Format(format!("unknown residue {c:?} in header")))
            })
            .collect::<Result<_>>()?;
        if order.len() != 20 {
            return Err(Error::Format(format!(
                "contact table header lists {} residues",
                order.len()
            )));
        }
        let mut m = [[f64::NAN; 20]; 20];
        for (i, line) in lines.enumerate() {
            let mut fields = line.split_whitespace();
            let label = fields.next().unwrap_or_default();
            if i >= 20 || AminoAcid::parse_code(label) != Some(order[i]) {
                return Err(Error::Format(format!("unexpected contact row {label:?}")));
            }
            let values: Vec<f64> = fields
                .map(|v| {
                    v.parse()
                        .map_err(|_| Error::Format(format!("bad contact energy {v:?}")))
                })
                .collect::<Result<_>>()?;
            if values.len() != 20 - i {
                return Err(Error::Format(format!(
                    "row {label} has {} entries, expected {}",
                    values.len(),
                    20 - i
                )));
            }
            for (k, v) in values.into_iter().enumerate() {
                let (a, b) = (order[i].index(), order[i + k].index());
                m[a][b] = v;
                m[b][a] = v;
            }
        }
        let out = Self(m);
        out.validate()?;
        Ok(out)
    }

    pub fn get(&self, a: AminoAcid, b: AminoAcid) -> f64 {
        self.0[a.index()][b.index()]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateEnergyModel {
    pub contacts: ContactMatrix,
    /// Penalty per pair of residues sharing a lattice site.
    pub lambda_steric: f64,
    pub bond_length: f64,
}

impl SurrogateEnergyModel {
    /// Rejects a steric penalty that could be outweighed by contacts in a
    /// fragment of `fragment_length` residues.
    pub fn new(
        contacts: ContactMatrix,
        lambda_steric: f64,
        bond_length: f64,
        fragment_length: usize,
    ) -> Result<Self> {
        let floor = contacts.max_abs() * (fragment_length * fragment_length) as f64;
        if !(lambda_steric > floor) || !lambda_steric.is_finite() {
            return Err(Error::Config(format!(
                "steric penalty {lambda_steric} must exceed {floor} for length {fragment_length}"
            )));
        }
        if !(bond_length > 0.0 && bond_length.is_finite()) {
            return Err(Error::Config(format!(
                "bond length must be positive, got {bond_length}"
            )));
        }
        Ok(Self {
            contacts,
            lambda_steric,
            bond_length,
        })
    }

    /// Default penalty of 10³ × max|contact| × L².
    pub fn with_contacts(contacts: ContactMatrix, fragment_length: usize) -> Self {
        let lambda = 1e3
            * contacts.max_abs().max(f64::MIN_POSITIVE)
            * (fragment_length.max(1).pow(2)) as f64;
        Self {
            contacts,
            lambda_steric: lambda,
            bond_length: DEFAULT_BOND_LENGTH,
        }
    }

    /// Miyazawa–Jernigan contacts with default penalty and bond length.
    pub fn miyazawa_jernigan(fragment_length: usize) -> Self {
        Self::with_contacts(ContactMatrix::miyazawa_jernigan().clone(), fragment_length)
    }
}

/// Energy and overlap count of a walk given as lattice sites.
pub fn lattice_energy(
    sites: &[[i32; 3]],
    sequence: &[AminoAcid],
    model: &SurrogateEnergyModel,
) -> (f64, usize) {
    let mut contact = 0.0;
    let mut overlaps = 0usize;
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            let d: i32 = (0..3).map(|k| (sites[i][k] - sites[j][k]).abs()).sum();
            if d == 0 {
                overlaps += 1;
            } else if d == 1 && j - i >= 3 {
                contact += model.contacts.get(sequence[i], sequence[j]);
            }
        }
    }
    (contact + model.lambda_steric * overlaps as f64, overlaps)
}

/// Surrogate energy of an on-lattice conformation.
pub fn energy(c: &Conformation, model: &SurrogateEnergyModel) -> Result<f64> {
    let sites = c
        .coords()
        .iter()
        .map(|p| {
            let mut site = [0i32; 3];
            for (slot, v) in site.iter_mut().zip(p.to_array()) {
                let scaled = v / model.bond_length;
                let rounded = scaled.round();
                if (scaled - rounded).abs() > 1e-6 || rounded.abs() > i32::MAX as f64 {
                    return Err(Error::Domain(format!(
                        "{}: coordinate {v} is not a lattice multiple of {}",
                        c.id(),
                        model.bond_length
                    )));
                }
                *slot = rounded as i32;
            }
            Ok(site)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(lattice_energy(&sites, &c.sequence(), model).0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub moves: MoveString,
    pub energy: f64,
    pub conformation: Conformation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            t_start: 10.0,
            t_end: 0.05,
            steps: 20_000,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t_start.is_finite()
            && self.t_end.is_finite()
            && self.t_start > 0.0
            && self.t_end > 0.0
            && self.t_end <= self.t_start
            && self.steps >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid schedule: T from {} to {} over {} steps",
                self.t_start, self.t_end, self.steps
            )))
        }
    }

    /// Geometric cooling from `t_start` at step 0 to `t_end` at the last step.
    pub fn temperature(&self, step: usize) -> f64 {
        if self.steps <= 1 {
            return self.t_start;
        }
        let frac = step as f64 / (self.steps - 1) as f64;
        self.t_start * (self.t_end / self.t_start).powf(frac)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenerationMethod {
    Exhaustive,
    Anneal { seed: u64, schedule: AnnealSchedule },
}

impl fmt::Display for GenerationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenerationMethod::Exhaustive => f.write_str("exhaustive"),
            GenerationMethod::Anneal { .. } => f.write_str("anneal"),
        }
    }
}

/// Low-energy overlap-free conformations, ascending by energy.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
    pub method: GenerationMethod,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn best_energy(&self) -> Option<f64> {
        self.candidates.first().map(|c| c.energy)
    }

    pub fn conformations(&self) -> Vec<Conformation> {
        self.candidates
            .iter()
            .map(|c| c.conformation.clone())
            .collect()
    }
}

/// Candidate id for the walk at 1-based position `rank`.
pub fn candidate_id(rank: usize) -> String {
    format!("cand{rank:03}")
}

fn build_candidates(
    ranked: Vec<(f64, MoveString)>,
    sequence: &[AminoAcid],
    model: &SurrogateEnergyModel,
) -> Result<Vec<Candidate>> {
    ranked
        .into_iter()
        .enumerate()
        .map(|(i, (energy, moves))| {
            let coords = decode(&moves, model.bond_length);
            let conformation =
                Conformation::from_parts(candidate_id(i + 1), sequence, &coords, energy)?;
            Ok(Candidate {
                moves,
                energy,
                conformation,
            })
        })
        .collect()
}

fn check_sequence(sequence: &[AminoAcid]) -> Result<()> {
    if sequence.len() < 2 {
        return Err(Error::Domain(format!(
            "a lattice fragment needs at least 2 residues, got {}",
            sequence.len()
        )));
    }
    Ok(())
}

fn exhaustive_scores(
    sequence: &[AminoAcid],
    model: &SurrogateEnergyModel,
) -> Result<Vec<(f64, usize)>> {
    check_sequence(sequence)?;
    if sequence.len() > MAX_EXHAUSTIVE_LENGTH {
        return Err(Error::Size(format!(
            "exhaustive enumeration is limited to {MAX_EXHAUSTIVE_LENGTH} residues, got {}; use anneal",
            sequence.len()
        )));
    }
    let moves_len = sequence.len() - 2;
    let total = 5usize.pow(moves_len as u32);
    let mut scored: Vec<(f64, usize)> = (0..total)
        .into_par_iter()
        .filter_map(|index| {
            let moves = MoveString::from_index(index, moves_len);
            let (e, overlaps) = lattice_energy(&lattice_walk(&moves), sequence, model);
            (overlaps == 0).then_some((e, index))
        })
        .collect();
    // index order is lexicographic move order
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(scored)
}

/// Score every walk and keep the `top_n` lowest-energy overlap-free ones,
/// ties broken lexicographically by move string.
pub fn enumerate_exhaustive(
    sequence: &[AminoAcid],
    model: &SurrogateEnergyModel,
    top_n: usize,
) -> Result<CandidateSet> {
    let moves_len = sequence.len().saturating_sub(2);
    let ranked = exhaustive_scores(sequence, model)?
        .into_iter()
        .take(top_n)
        .map(|(e, i)| (e, MoveString::from_index(i, moves_len)))
        .collect();
    Ok(CandidateSet {
        candidates: build_candidates(ranked, sequence, model)?,
        method: GenerationMethod::Exhaustive,
    })
}

/// Like [`enumerate_exhaustive`] but keeps one walk per fold, dropping walks
/// that are rigid rotations of an earlier (lower or lexicographically smaller)
/// one.
pub fn enumerate_exhaustive_distinct(
    sequence: &[AminoAcid],
    model: &SurrogateEnergyModel,
    top_n: usize,
) -> Result<CandidateSet> {
    let moves_len = sequence.len().saturating_sub(2);
    let mut seen = HashSet::new();
    let ranked = exhaustive_scores(sequence, model)?
        .into_iter()
        .map(|(e, i)| (e, MoveString::from_index(i, moves_len)))
        .filter(|(_, m)| seen.insert(m.canonical()))
        .take(top_n)
        .collect();
    Ok(CandidateSet {
        candidates: build_candidates(ranked, sequence, model)?,
        method: GenerationMethod::Exhaustive,
    })
}

struct Pool {
    capacity: usize,
    entries: Vec<(f64, MoveString)>,
    members: HashSet<MoveString>,
}

impl Pool {
    fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: Vec::new(),
            members: HashSet::new(),
        }
    }

    fn offer(&mut self, energy: f64, moves: &MoveString) {
        if self.capacity == 0 || self.members.contains(moves) {
            return;
        }
        let key = |e: &(f64, MoveString)| (e.0, e.1.clone());
        if self.entries.len() == self.capacity {
            let worst = key(self.entries.last().expect("pool is full"));
            if (energy, moves.clone()) >= worst {
                return;
            }
            let (_, evicted) = self.entries.pop().expect("pool is full");
            self.members.remove(&evicted);
        }
        let pos = self
            .entries
            .partition_point(|e| e.0 < energy || (e.0 == energy && e.1 < *moves));
        self.entries.insert(pos, (energy, moves.clone()));
        self.members.insert(moves.clone());
    }
}

/// Metropolis annealing over single-move mutations. Returns the `top_n` best
/// distinct overlap-free walks seen, plus the energy after every accepted move.
pub fn anneal_traced(
    sequence: &[AminoAcid],
    model: &SurrogateEnergyModel,
    schedule: &AnnealSchedule,
    seed: u64,
    top_n: usize,
) -> Result<(CandidateSet, Vec<f64>)> {
    schedule.validate()?;
    if sequence.len() < 4 {
        return Err(Error::Domain(format!(
            "annealing needs at least 4 residues, got {}",
            sequence.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = Pool::new(top_n);
    let mut trace = Vec::new();

    let mut current = MoveString::straight(sequence.len());
    let (mut current_e, overlaps) = lattice_energy(&lattice_walk(&current), sequence, model);
    if overlaps == 0 {
        pool.offer(current_e, &current);
    }
    let mut proposal = current.clone();
    for step in 0..schedule.steps {
        let t = schedule.temperature(step);
        let pos = rng.random_range(0..current.len());
        let old = current.0[pos];
        let pick = rng.random_range(0..4);
        let new = Move::ALL
            .into_iter()
            .filter(|m| *m != old)
            .nth(pick)
            .expect("4 alternatives");
        proposal.0.clone_from(&current.0);
        proposal.0[pos] = new;
        let (e, overlaps) = lattice_energy(&lattice_walk(&proposal), sequence, model);
        if overlaps == 0 {
            pool.offer(e, &proposal);
        }
        let delta = e - current_e;
        let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp();
        if accept {
            std::mem::swap(&mut current, &mut proposal);
            current_e = e;
            trace.push(e);
        }
    }
    let set = CandidateSet {
        candidates: build_candidates(pool.entries, sequence, model)?,
        method: GenerationMethod::Anneal {
            seed,
            schedule: *schedule,
        },
    };
    Ok((set, trace))
}

pub fn anneal(
    sequence: &[AminoAcid],
    model: &SurrogateEnergyModel,
    schedule: &AnnealSchedule,
    seed: u64,
    top_n: usize,
) -> Result<CandidateSet> {
    anneal_traced(sequence, model, schedule, seed, top_n).map(|(set, _)| set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::parse_sequence;
    use proptest::prelude::*;

    fn moves(s: &str) -> MoveString {
        s.parse().unwrap()
    }

    fn ala_model(len: usize) -> SurrogateEnergyModel {
        SurrogateEnergyModel::miyazawa_jernigan(len)
    }

    #[test]
    fn decode_examples() {
        let pts = decode(&moves("FF"), 3.8);
        let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
        assert_eq!(xs, [0.0, 3.8, 7.6, 3.8 * 3.0]);
        assert!(pts.iter().all(|p| p.y == 0.0 && p.z == 0.0));

        let pts = decode(&moves("U"), 3.8);
        assert_eq!(pts[2], Point3::new(3.8, 3.8, 0.0));

        // pitch twice: +x, then +y, then -x closes a U
        let sites = lattice_walk(&moves("UU"));
        assert_eq!(sites, vec![[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]);
        // a pitch followed by a yaw leaves the plane
        let sites = lattice_walk(&moves("UL"));
        assert_eq!(sites[3], [1, 1, -1]);
    }

    #[test]
    fn bundled_table_is_symmetric_and_attractive() {
        let mj = ContactMatrix::miyazawa_jernigan();
        for a in AminoAcid::ALL {
            for b in AminoAcid::ALL {
                assert_eq!(mj.get(a, b), mj.get(b, a));
            }
        }
        use AminoAcid::*;
        for (a, b) in [(Leu, Leu), (Phe, Phe), (Ile, Val), (Met, Phe), (Leu, Ile)] {
            assert!(mj.get(a, b) < 0.0);
            // hydrophobic pairs bind more strongly than polar ones
            assert!(mj.get(a, b) < mj.get(Lys, Glu));
        }
        assert!(mj.max_abs() > 7.0 && mj.max_abs() < 8.0);
    }

    #[test]
    fn energy_examples() {
        let seq = parse_sequence("AAAA").unwrap();
        let model = ala_model(4);
        let straight =
            Conformation::from_parts("s", &seq, &decode(&moves("FF"), 3.8), 0.0).unwrap();
        assert_eq!(energy(&straight, &model).unwrap(), 0.0);

        let seq = parse_sequence("LAAF").unwrap();
        let u = Conformation::from_parts("u", &seq, &decode(&moves("UU"), 3.8), 0.0).unwrap();
        let mj = ContactMatrix::miyazawa_jernigan();
        assert_eq!(
            energy(&u, &model).unwrap(),
            mj.get(AminoAcid::Leu, AminoAcid::Phe)
        );

        let off = Conformation::from_parts("o", &seq, &decode(&moves("UU"), 3.7), 0.0).unwrap();
        assert!(matches!(energy(&off, &model), Err(Error::Domain(_))));
    }

    #[test]
    fn overlap_dominates() {
        // U, U, U revisits the origin's neighbour ring and then the origin
        let seq = parse_sequence("LLLLL").unwrap();
        let model = ala_model(5);
        let sites = lattice_walk(&moves("UUU"));
        assert_eq!(sites[4], sites[0]);
        let (e, overlaps) = lattice_energy(&sites, &seq, &model);
        assert_eq!(overlaps, 1);
        let floor = model.lambda_steric - model.contacts.max_abs() * 25.0;
        assert!(e >= floor);
        let best_free = enumerate_exhaustive(&seq, &model, 1).unwrap();
        assert!(e > best_free.best_energy().unwrap());
    }

    #[test]
    fn model_validation() {
        let mj = ContactMatrix::miyazawa_jernigan().clone();
        assert!(SurrogateEnergyModel::new(mj.clone(), 1.0, 3.8, 6).is_err());
        assert!(SurrogateEnergyModel::new(mj.clone(), 1e6, 0.0, 6).is_err());
        assert!(SurrogateEnergyModel::new(mj, 1e6, 3.8, 6).is_ok());
        let asym = ContactMatrix::from_fn(|a, b| if a < b { 1.0 } else { 0.0 });
        assert!(asym.is_err());
    }

    #[test]
    fn triangle_parser_rejects_short_rows() {
        let text = include_str!("../data/miyazawa_jernigan.tsv").replace("\t-1.75\n", "\n");
        assert!(ContactMatrix::parse_triangle(&text).is_err());
    }

    #[test]
    fn three_residue_enumeration() {
        let seq = parse_sequence("GAG").unwrap();
        let set = enumerate_exhaustive(&seq, &ala_model(3), 10).unwrap();
        let listed: Vec<String> = set.candidates.iter().map(|c| c.moves.to_string()).collect();
        assert_eq!(listed, ["D", "F", "L", "R", "U"]);
        assert!(set.candidates.iter().all(|c| c.energy == 0.0));
        let top2 = enumerate_exhaustive(&seq, &ala_model(3), 2).unwrap();
        assert_eq!(top2.len(), 2);
        assert_eq!(top2.candidates[0].moves, moves("D"));
    }

    #[test]
    fn four_residue_ground_states_are_u_turns() {
        let seq = parse_sequence("LLLL").unwrap();
        let model = ala_model(4);
        let all = enumerate_exhaustive(&seq, &model, usize::MAX).unwrap();
        assert_eq!(all.len(), 25);
        let ground = all.best_energy().unwrap();
        assert_eq!(ground, model.contacts.get(AminoAcid::Leu, AminoAcid::Leu));
        let u_turns: Vec<String> = all
            .candidates
            .iter()
            .filter(|c| c.energy == ground)
            .map(|c| c.moves.to_string())
            .collect();
        assert_eq!(u_turns, ["DD", "LL", "RR", "UU"]);
        let distinct = enumerate_exhaustive_distinct(&seq, &model, usize::MAX).unwrap();
        assert_eq!(distinct.candidates[0].moves, moves("DD"));
        assert_eq!(
            distinct
                .candidates
                .iter()
                .filter(|c| c.energy == ground)
                .count(),
            1
        );
    }

    #[test]
    fn top_n_contract_and_size_limit() {
        let seq = parse_sequence("MKLVFG").unwrap();
        let set = enumerate_exhaustive(&seq, &ala_model(6), 5).unwrap();
        assert_eq!(set.len(), 5);
        assert!(set
            .candidates
            .windows(2)
            .all(|w| w[0].energy <= w[1].energy));
        let long = parse_sequence("AAAAAAAAAAA").unwrap();
        assert!(matches!(
            enumerate_exhaustive(&long, &ala_model(11), 5),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn schedule_validation() {
        let seq = parse_sequence("AAAAA").unwrap();
        let model = ala_model(5);
        for bad in [
            AnnealSchedule {
                t_start: 0.0,
                t_end: 0.0,
                steps: 10,
            },
            AnnealSchedule {
                t_start: 1.0,
                t_end: 2.0,
                steps: 10,
            },
            AnnealSchedule {
                t_start: 1.0,
                t_end: 0.5,
                steps: 0,
            },
        ] {
            assert!(matches!(
                anneal(&seq, &model, &bad, 1, 3),
                Err(Error::Config(_))
            ));
        }
        let s = AnnealSchedule {
            t_start: 8.0,
            t_end: 2.0,
            steps: 3,
        };
        assert_eq!(s.temperature(0), 8.0);
        assert!((s.temperature(1) - 4.0).abs() < 1e-12);
        assert!((s.temperature(2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_temperature_descends() {
        let seq = parse_sequence("LKFVILAM").unwrap();
        let model = ala_model(8);
        let cold = AnnealSchedule {
            t_start: 1e-9,
            t_end: 1e-9,
            steps: 3000,
        };
        let (_, trace) = anneal_traced(&seq, &model, &cold, 7, 5).unwrap();
        assert!(!trace.is_empty());
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn anneal_is_deterministic() {
        let seq = parse_sequence("FAKLMVW").unwrap();
        let model = ala_model(7);
        let s = AnnealSchedule {
            steps: 4000,
            ..Default::default()
        };
        let a = anneal(&seq, &model, &s, 42, 5).unwrap();
        let b = anneal(&seq, &model, &s, 42, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.candidates.windows(2).all(|w| w[0].energy <= w[1].energy));
        let exact = enumerate_exhaustive(&seq, &model, 1).unwrap();
        assert!(a.best_energy().unwrap() >= exact.best_energy().unwrap());
    }

    fn lattice_rotations() -> Vec<[[i32; 3]; 3]> {
        // all signed permutation matrices with determinant +1
        let perms = [
            [0, 1, 2],
            [1, 2, 0],
            [2, 0, 1],
            [0, 2, 1],
            [2, 1, 0],
            [1, 0, 2],
        ];
        let mut out = Vec::new();
        for (pi, p) in perms.iter().enumerate() {
            let parity = if pi < 3 { 1 } else { -1 };
            for signs in 0..8 {
                let s = [
                    if signs & 1 == 0 { 1 } else { -1 },
                    if signs & 2 == 0 { 1 } else { -1 },
                    if signs & 4 == 0 { 1 } else { -1 },
                ];
                if s[0] * s[1] * s[2] * parity != 1 {
                    continue;
                }
                let mut m = [[0; 3]; 3];
                for r in 0..3 {
                    m[r][p[r]] = s[r];
                }
                out.push(m);
            }
        }
        out
    }

    fn walk_strategy() -> impl Strategy<Value = (MoveString, Vec<AminoAcid>)> {
        (2usize..9).prop_flat_map(|n| {
            (
                prop::collection::vec(0usize..5, n - 2)
                    .prop_map(|v| MoveString(v.into_iter().map(|i| Move::ALL[i]).collect())),
                prop::collection::vec(0usize..20, n)
                    .prop_map(|v| v.into_iter().map(|i| AminoAcid::ALL[i]).collect()),
            )
        })
    }

    #[test]
    fn there_are_24_lattice_rotations() {
        assert_eq!(lattice_rotations().len(), 24);
    }

    proptest! {
        #[test]
        fn bonds_have_exact_length((m, _) in walk_strategy(), b in 0.5..5.0f64) {
            let pts = decode(&m, b);
            let sites = lattice_walk(&m);
            for w in sites.windows(2) {
                let d: i32 = (0..3).map(|k| (w[0][k] - w[1][k]).abs()).sum();
                prop_assert_eq!(d, 1);
            }
            for w in pts.windows(2) {
                let d = w[0].distance(w[1]);
                prop_assert!((d - b).abs() <= 1e-12 * b);
            }
        }

        #[test]
        fn energy_invariant_under_lattice_symmetry(
            (m, seq) in walk_strategy(),
            rot in 0usize..24,
            shift in prop::array::uniform3(-5i32..5),
        ) {
            let model = SurrogateEnergyModel::miyazawa_jernigan(seq.len());
            let sites = lattice_walk(&m);
            let (e, _) = lattice_energy(&sites, &seq, &model);
            let r = lattice_rotations()[rot];
            let moved: Vec<[i32; 3]> = sites
                .iter()
                .map(|s| {
                    let mut out = shift;
                    for row in 0..3 {
                        out[row] += (0..3).map(|k| r[row][k] * s[k]).sum::<i32>();
                    }
                    out
                })
                .collect();
            prop_assert_eq!(lattice_energy(&moved, &seq, &model).0, e);
            let mut rev_sites = sites.clone();
            rev_sites.reverse();
            let mut rev_seq = seq.clone();
            rev_seq.reverse();
            // summation order changes under reversal
            prop_assert!((lattice_energy(&rev_sites, &rev_seq, &model).0 - e).abs() < 1e-9);
        }

        #[test]
        fn steric_separation((m, seq) in walk_strategy()) {
            let model = SurrogateEnergyModel::miyazawa_jernigan(seq.len());
            let (e, overlaps) = lattice_energy(&lattice_walk(&m), &seq, &model);
            let bound = model.contacts.max_abs() * (seq.len() * seq.len()) as f64;
            if overlaps == 0 {
                prop_assert!(e < model.lambda_steric);
                prop_assert!(e.abs() <= bound);
            } else {
                prop_assert!(e >= model.lambda_steric - bound);
                prop_assert!(e > bound);
            }
        }

        #[test]
        fn canonical_matches_rotation_about_first_bond((m, seq) in walk_strategy()) {
            let mut rolled = m.clone();
            for _ in 0..4 {
                rolled = MoveString(rolled.0.iter().map(|x| x.rolled()).collect());
                prop_assert_eq!(rolled.canonical(), m.canonical());
                // rolled walks are rigid copies: same internal distances
                let a = lattice_walk(&m);
                let b = lattice_walk(&rolled);
                for i in 0..a.len() {
                    for j in 0..a.len() {
                        let da: i32 = (0..3).map(|k| (a[i][k] - a[j][k]).pow(2)).sum();
                        let db: i32 = (0..3).map(|k| (b[i][k] - b[j][k]).pow(2)).sum();
                        prop_assert_eq!(da, db);
                    }
                }
            }
            let model = SurrogateEnergyModel::miyazawa_jernigan(seq.len());
            prop_assert_eq!(
                lattice_energy(&lattice_walk(&m), &seq, &model).0,
                lattice_energy(&lattice_walk(&m.canonical()), &seq, &model).0
            );
        }
    }
}

//! Vector geometry on Cα backbones.
//!
//! Torsions follow the four-point construction with `b0 = p1 - p0`,
//! `b1 = p2 - p1`, `b2 = p3 - p2`; the component of `b0` and `b2` orthogonal
//! to `b1` are `v` and `w`, and the angle is `atan2((b̂1 × v)·w, v·w)`.
//! Because `b0` points from `p0` towards `p1`, the result is the IUPAC torsion
//! shifted by π: a planar cis arrangement reads π and a planar trans one 0.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::residue::AminoAcid;

/// Projected vectors shorter than this (Å) make a torsion undefined.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    fn from_vector(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl Add for Point3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residue {
    pub code: AminoAcid,
    pub ca: Point3,
}

/// A Cα-only fragment backbone together with its raw energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Conformation {
    id: String,
    residues: Vec<Residue>,
    energy_q: f64,
}

impl Conformation {
    /// Fails if the chain is empty, any coordinate or the energy is
    /// non-finite, or two consecutive Cα atoms coincide.
    pub fn new(id: impl Into<String>, residues: Vec<Residue>, energy_q: f64) -> Result<Self> {
        let id = id.into();
        if residues.is_empty() {
            return Err(Error::InvalidConformation(format!("{id}: no residues")));
        }
        if !energy_q.is_finite() {
            return Err(Error::InvalidConformation(format!(
                "{id}: energy {energy_q} is not finite"
            )));
        }
        if let Some(i) = residues.iter().position(|r| !r.ca.is_finite()) {
            return Err(Error::InvalidConformation(format!(
                "{id}: residue {} has a non-finite coordinate",
                i + 1
            )));
        }
        if let Some(i) = residues
            .windows(2)
            .position(|w| w[0].ca.distance(w[1].ca) <= 0.0)
        {
            return Err(Error::InvalidConformation(format!(
                "{id}: residues {} and {} coincide",
                i + 1,
                i + 2
            )));
        }
        Ok(Self {
            id,
            residues,
            energy_q,
        })
    }

    /// Convenience constructor pairing a sequence with coordinates.
    pub fn from_parts(
        id: impl Into<String>,
        sequence: &[AminoAcid],
        coords: &[Point3],
        energy_q: f64,
    ) -> Result<Self> {
        if sequence.len() != coords.len() {
            return Err(Error::Shape(format!(
                "sequence has {} residues but {} coordinates were given",
                sequence.len(),
                coords.len()
            )));
        }
        let residues = sequence
            .iter()
            .zip(coords)
            .map(|(&code, &ca)| Residue { code, ca })
            .collect();
        Self::new(id, residues, energy_q)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn residues(&self) -> &[Residue] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn energy_q(&self) -> f64 {
        self.energy_q
    }

    pub fn coords(&self) -> Vec<Point3> {
        self.residues.iter().map(|r| r.ca).collect()
    }

    pub fn sequence(&self) -> Vec<AminoAcid> {
        self.residues.iter().map(|r| r.code).collect()
    }

    pub fn with_energy(mut self, energy_q: f64) -> Result<Self> {
        if !energy_q.is_finite() {
            return Err(Error::InvalidConformation(format!(
                "{}: energy {energy_q} is not finite",
                self.id
            )));
        }
        self.energy_q = energy_q;
        Ok(self)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

/// Per-residue virtual torsions. `None` marks a masked entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DihedralTrace {
    pub phi_hat: Vec<Option<f64>>,
    pub psi_hat: Vec<Option<f64>>,
}

impl DihedralTrace {
    pub fn len(&self) -> usize {
        self.phi_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi_hat.is_empty()
    }

    /// Both torsions of residue `i` (0-based) are present.
    pub fn is_valid(&self, i: usize) -> bool {
        self.phi_hat[i].is_some() && self.psi_hat[i].is_some()
    }

    pub fn mask(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.is_valid(i)).collect()
    }

    /// Residues where both torsions are present, as `(index, phi, psi)`.
    pub fn valid_pairs(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.phi_hat
            .iter()
            .zip(&self.psi_hat)
            .enumerate()
            .filter_map(|(i, (phi, psi))| Some((i, (*phi)?, (*psi)?)))
    }
}

/// Map an angle into `(-π, π]`.
pub fn wrap(angle: f64) -> Result<f64> {
    if !angle.is_finite() {
        return Err(Error::InvalidAngle(angle));
    }
    Ok(wrap_finite(angle))
}

pub(crate) fn wrap_finite(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let mut r = angle.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    if r <= -PI {
        r = PI;
    }
    r
}

pub fn dihedral(p0: Point3, p1: Point3, p2: Point3, p3: Point3) -> Result<f64> {
    let b0 = p1 - p0;
    let b1 = p2 - p1;
    let b2 = p3 - p2;
    let n1 = b1.norm();
    if n1 < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateTorsion("central bond has zero length"));
    }
    let b1_hat = b1 * (1.0 / n1);
    let v = b0 - b1_hat * b0.dot(b1_hat);
    let w = b2 - b1_hat * b2.dot(b1_hat);
    if v.norm() < DEGENERACY_THRESHOLD || w.norm() < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateTorsion("collinear points"));
    }
    let y = b1_hat.cross(v).dot(w);
    let x = v.dot(w);
    Ok(wrap_finite(y.atan2(x)))
}

/// Cα-only proxies for φ and ψ.
///
/// With 1-based residue `i`, φ̂ᵢ uses Cα(i-2..=i+1) and ψ̂ᵢ uses Cα(i-1..=i+2).
/// Entries without a full window, or whose window is degenerate, are masked.
pub fn virtual_dihedrals(c: &Conformation) -> DihedralTrace {
    let ca = c.coords();
    let n = ca.len();
    // torsion over the quadruple starting at 0-based index k
    let torsion = |k: usize| -> Option<f64> {
        if k + 3 >= n {
            return None;
        }
        dihedral(ca[k], ca[k + 1], ca[k + 2], ca[k + 3]).ok()
    };
    let mut phi_hat = vec![None; n];
    let mut psi_hat = vec![None; n];
    for i in 0..n {
        // 0-based: phi needs i-2..=i+1, psi needs i-1..=i+2
        if i >= 2 && i + 1 < n {
            phi_hat[i] = torsion(i - 2);
        }
        if i >= 1 && i + 2 < n {
            psi_hat[i] = torsion(i - 1);
        }
    }
    DihedralTrace { phi_hat, psi_hat }
}

/// Minimum Cα RMSD over proper rigid superpositions.
pub fn kabsch_rmsd(a: &Conformation, b: &Conformation) -> Result<f64> {
    kabsch_rmsd_points(&a.coords(), &b.coords())
}

pub fn kabsch_rmsd_points(a: &[Point3], b: &[Point3]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "cannot superpose {} atoms onto {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("superposition needs at least one atom"));
    }
    let (rotation, ca, cb) = kabsch_rotation(a, b);
    let sum_sq: f64 = a
        .iter()
        .zip(b)
        .map(|(p, q)| {
            let moved = rotation * (p.to_vector() - ca) + cb;
            (moved - q.to_vector()).norm_squared()
        })
        .sum();
    Ok((sum_sq / a.len() as f64).sqrt())
}

/// Superpose `mobile` onto `target`, returning the transformed mobile coordinates.
pub fn superpose(mobile: &[Point3], target: &[Point3]) -> Result<Vec<Point3>> {
    if mobile.len() != target.len() || mobile.is_empty() {
        return Err(Error::Shape(format!(
            "cannot superpose {} atoms onto {}",
            mobile.len(),
            target.len()
        )));
    }
    let (rotation, cm, ct) = kabsch_rotation(mobile, target);
    Ok(mobile
        .iter()
        .map(|p| Point3::from_vector(rotation * (p.to_vector() - cm) + ct))
        .collect())
}

fn centroid(points: &[Point3]) -> Vector3<f64> {
    points
        .iter()
        .fold(Vector3::zeros(), |acc, p| acc + p.to_vector())
        / points.len() as f64
}

fn kabsch_rotation(
    mobile: &[Point3],
    target: &[Point3],
) -> (Matrix3<f64>, Vector3<f64>, Vector3<f64>) {
    let cm = centroid(mobile);
    let ct = centroid(target);
    let mut h = Matrix3::zeros();
    for (p, q) in mobile.iter().zip(target) {
        h += (p.to_vector() - cm) * (q.to_vector() - ct).transpose();
    }
    let svd = h.svd(true, true);
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    let v = v_t.transpose();
    // proper rotations only
    let d = (v * u.transpose()).determinant().signum();
    let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d));
    (v * correction * u.transpose(), cm, ct)
}

//! Residue-wise structural priors from a sequence-based predictor.
//!
//! The canonical table is tab- or comma-delimited with a header row and 19
//! columns:
//!
//! ```text
//! id residue ss8_H ss8_G ss8_I ss8_E ss8_B ss8_T ss8_S ss8_L ss3_H ss3_E ss3_C
//!    disorder_0 disorder_1 rsa asa phi psi
//! ```
//!
//! Angles are in degrees. Disorder and ASA columns are read but not used.
//! Columns are located by header name, so extra columns and reordering are
//! fine. [`PriorsSchema::netsurfp3`] maps NetSurfP-3.0 CSV headers and
//! [`PriorsSchema::positional`] reads headerless files in canonical order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::wrap_finite;
use crate::residue::AminoAcid;

/// SS8 class order used throughout.
pub const SS8_LABELS: [char; 8] = ['H', 'G', 'I', 'E', 'B', 'T', 'S', 'L'];
/// SS3 class order used throughout.
pub const SS3_LABELS: [char; 3] = ['H', 'E', 'C'];

/// Slack allowed on probability cells before they are rejected.
pub const PROBABILITY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PriorsProfile {
    pub sequence: Vec<AminoAcid>,
    pub ss3: Vec<Option<[f64; 3]>>,
    pub ss8: Vec<Option<[f64; 8]>>,
    /// Radians in `(-π, π]`; `None` is masked.
    pub phi: Vec<Option<f64>>,
    pub psi: Vec<Option<f64>>,
    pub rsa: Vec<f64>,
}

impl PriorsProfile {
    /// Uniform distributions, masked angles and unit RSA weights.
    pub fn uniform(sequence: Vec<AminoAcid>) -> Self {
        let n = sequence.len();
        Self {
            sequence,
            ss3: vec![Some([1.0 / 3.0; 3]); n],
            ss8: vec![Some([1.0 / 8.0; 8]); n],
            phi: vec![None; n],
            psi: vec![None; n],
            rsa: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Clip RSA into `[0, 1]` (NaN becomes 1), impute missing or non-finite
    /// distributions as uniform and mask non-finite angles.
    pub fn sanitize(&self) -> Self {
        Self {
            sequence: self.sequence.clone(),
            ss3: self.ss3.iter().map(|p| Some(sanitize_dist(*p))).collect(),
            ss8: self.ss8.iter().map(|p| Some(sanitize_dist(*p))).collect(),
            phi: self.phi.iter().map(|a| sanitize_angle(*a)).collect(),
            psi: self.psi.iter().map(|a| sanitize_angle(*a)).collect(),
            rsa: self.rsa.iter().map(|&r| sanitize_rsa(r)).collect(),
        }
    }
}

/// Free-function form of [`PriorsProfile::sanitize`].
pub fn sanitize(p: &PriorsProfile) -> PriorsProfile {
    p.sanitize()
}

fn sanitize_rsa(r: f64) -> f64 {
    if r.is_nan() {
        1.0
    } else {
        r.clamp(0.0, 1.0)
    }
}

fn sanitize_angle(a: Option<f64>) -> Option<f64> {
    a.filter(|v| v.is_finite()).map(wrap_finite)
}

fn sanitize_dist<const K: usize>(p: Option<[f64; K]>) -> [f64; K] {
    p.and_then(normalize_dist).unwrap_or([1.0 / K as f64; K])
}

/// Clamp to `[0, 1]` and rescale to unit sum. `None` when any entry is
/// non-finite or the mass is zero.
pub(crate) fn normalize_dist<const K: usize>(p: [f64; K]) -> Option<[f64; K]> {
    if p.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let clamped = p.map(|v| v.clamp(0.0, 1.0));
    let sum: f64 = clamped.iter().sum();
    if sum <= 0.0 {
        return None;
    }
    if (sum - 1.0).abs() < 1e-12 {
        return Some(clamped);
    }
    Some(clamped.map(|v| v / sum))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

impl From<&str> for ColumnRef {
    fn from(s: &str) -> Self {
        ColumnRef::Name(s.to_string())
    }
}

/// Where each required field lives in the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorsSchema {
    pub has_header: bool,
    pub residue: ColumnRef,
    pub ss8: [ColumnRef; 8],
    pub ss3: [ColumnRef; 3],
    pub rsa: ColumnRef,
    pub phi: ColumnRef,
    pub psi: ColumnRef,
}

/// Canonical column names, in file order.
pub const CANONICAL_COLUMNS: [&str; 19] = [
    "id",
    "residue",
    "ss8_H",
    "ss8_G",
    "ss8_I",
    "ss8_E",
    "ss8_B",
    "ss8_T",
    "ss8_S",
    "ss8_L",
    "ss3_H",
    "ss3_E",
    "ss3_C",
    "disorder_0",
    "disorder_1",
    "rsa",
    "asa",
    "phi",
    "psi",
];

impl PriorsSchema {
    pub fn canonical() -> Self {
        Self {
            has_header: true,
            residue: "residue".into(),
            ss8: [
                "ss8_H", "ss8_G", "ss8_I", "ss8_E", "ss8_B", "ss8_T", "ss8_S", "ss8_L",
            ]
            .map(ColumnRef::from),
            ss3: ["ss3_H", "ss3_E", "ss3_C"].map(ColumnRef::from),
            rsa: "rsa".into(),
            phi: "phi".into(),
            psi: "psi".into(),
        }
    }

    /// NetSurfP-3.0 CSV export headers. Its 8-state coil class `C` maps to `L`.
    pub fn netsurfp3() -> Self {
        Self {
            has_header: true,
            residue: "seq".into(),
            ss8: [
                "p[q8_H]", "p[q8_G]", "p[q8_I]", "p[q8_E]", "p[q8_B]", "p[q8_T]", "p[q8_S]",
                "p[q8_C]",
            ]
            .map(ColumnRef::from),
            ss3: ["p[q3_H]", "p[q3_E]", "p[q3_C]"].map(ColumnRef::from),
            rsa: "rsa".into(),
            phi: "phi".into(),
            psi: "psi".into(),
        }
    }

    /// Headerless table in canonical column order.
    pub fn positional() -> Self {
        let idx = |name: &str| {
            ColumnRef::Index(
                CANONICAL_COLUMNS
                    .iter()
                    .position(|c| *c == name)
                    .expect("canonical column"),
            )
        };
        let canonical = Self::canonical();
        let by_index = |c: &ColumnRef| match c {
            ColumnRef::Name(n) => idx(n),
            ColumnRef::Index(i) => ColumnRef::Index(*i),
        };
        Self {
            has_header: false,
            residue: by_index(&canonical.residue),
            ss8: canonical.ss8.each_ref().map(by_index),
            ss3: canonical.ss3.each_ref().map(by_index),
            rsa: by_index(&canonical.rsa),
            phi: by_index(&canonical.phi),
            psi: by_index(&canonical.psi),
        }
    }
}

impl Default for PriorsSchema {
    fn default() -> Self {
        Self::canonical()
    }
}

struct Resolved {
    residue: usize,
    ss8: [usize; 8],
    ss3: [usize; 3],
    rsa: usize,
    phi: usize,
    psi: usize,
}

fn resolve(schema: &PriorsSchema, header: Option<&csv::StringRecord>) -> Result<Resolved> {
    let find = |c: &ColumnRef| -> Result<usize> {
        match (c, header) {
            (ColumnRef::Index(i), _) => Ok(*i),
            (ColumnRef::Name(name), Some(h)) => h
                .iter()
                .position(|col| col.trim() == name)
                .ok_or_else(|| Error::Schema(format!("missing required column {name:?}"))),
            (ColumnRef::Name(name), None) => Err(Error::Schema(format!(
                "column {name:?} referenced by name but the table has no header"
            ))),
        }
    };
    let ss8 = schema.ss8.each_ref().map(find);
    let ss3 = schema.ss3.each_ref().map(find);
    Ok(Resolved {
        residue: find(&schema.residue)?,
        ss8: collect_array(ss8)?,
        ss3: collect_array(ss3)?,
        rsa: find(&schema.rsa)?,
        phi: find(&schema.phi)?,
        psi: find(&schema.psi)?,
    })
}

fn collect_array<const K: usize>(items: [Result<usize>; K]) -> Result<[usize; K]> {
    let mut out = [0; K];
    for (slot, item) in out.iter_mut().zip(items) {
        *slot = item?;
    }
    Ok(out)
}

fn detect_delimiter(table: &str) -> u8 {
    let first = table
        .lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if first.contains('\t') {
        b'\t'
    } else {
        b','
    }
}

/// Locale-independent numeric cell. Empty, `NA` and `NaN` are missing.
fn parse_cell(record: &csv::StringRecord, idx: usize, row: usize, name: &str) -> Result<f64> {
    let raw = record.get(idx).ok_or_else(|| Error::Parse {
        row,
        column: name.to_string(),
        message: format!("row has only {} fields", record.len()),
    })?;
    let cell = raw.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    cell.parse::<f64>().map_err(|_| Error::Parse {
        row,
        column: name.to_string(),
        message: format!("{cell:?} is not a number"),
    })
}

fn parse_probabilities<const K: usize>(
    record: &csv::StringRecord,
    idx: &[usize; K],
    row: usize,
    label: &str,
) -> Result<Option<[f64; K]>> {
    let mut p = [0.0; K];
    for (k, (&i, slot)) in idx.iter().zip(p.iter_mut()).enumerate() {
        let name = format!("{label}[{k}]");
        let v = parse_cell(record, i, row, &name)?;
        if v.is_finite() && !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&v) {
            return Err(Error::Validation(format!(
                "row {row}: {name} = {v} is not a probability"
            )));
        }
        *slot = v;
    }
    Ok(normalize_dist(p))
}

/// Parse a priors table. Distributions are renormalized to unit sum; rows with
/// missing probability cells yield `None`, to be imputed by [`sanitize`].
pub fn parse_priors(table: &str, schema: &PriorsSchema) -> Result<PriorsProfile> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(table))
        .has_headers(schema.has_header)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(table.as_bytes());
    let header = if schema.has_header {
        Some(reader.headers()?.clone())
    } else {
        None
    };
    let cols = resolve(schema, header.as_ref())?;

    let mut out = PriorsProfile {
        sequence: Vec::new(),
        ss3: Vec::new(),
        ss8: Vec::new(),
        phi: Vec::new(),
        psi: Vec::new(),
        rsa: Vec::new(),
    };
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let code = record.get(cols.residue).unwrap_or("").trim();
        let aa = AminoAcid::parse_code(code).ok_or_else(|| Error::Parse {
            row,
            column: "residue".into(),
            message: format!("{code:?} is not a standard amino acid"),
        })?;
        out.sequence.push(aa);
        out.ss8
            .push(parse_probabilities(&record, &cols.ss8, row, "ss8")?);
        out.ss3
            .push(parse_probabilities(&record, &cols.ss3, row, "ss3")?);
        out.rsa.push(parse_cell(&record, cols.rsa, row, "rsa")?);
        let angle = |idx, name| -> Result<Option<f64>> {
            let deg = parse_cell(&record, idx, row, name)?;
            Ok(deg.is_finite().then(|| wrap_finite(deg.to_radians())))
        };
        out.phi.push(angle(cols.phi, "phi")?);
        out.psi.push(angle(cols.psi, "psi")?);
    }
    if out.sequence.is_empty() {
        return Err(Error::EmptyInput("priors table has no residue rows"));
    }
    Ok(out)
}

/// Write a profile in the canonical tab-delimited layout. Probabilities use
/// shortest round-trip formatting, angles are degrees to nine decimals with
/// trailing zeros dropped, missing values are `NA`.
pub fn write_priors(p: &PriorsProfile) -> String {
    let mut s = CANONICAL_COLUMNS.join("\t");
    s.push('\n');
    let num = |v: f64| {
        if v.is_finite() {
            format!("{v}")
        } else {
            "NA".to_string()
        }
    };
    for i in 0..p.len() {
        let _ = write!(s, "{}\t{}", i + 1, p.sequence[i]);
        match p.ss8[i] {
            Some(d) => d.iter().for_each(|v| {
                let _ = write!(s, "\t{}", num(*v));
            }),
            None => s.push_str(&"\tNA".repeat(8)),
        }
        match p.ss3[i] {
            Some(d) => d.iter().for_each(|v| {
                let _ = write!(s, "\t{}", num(*v));
            }),
            None => s.push_str(&"\tNA".repeat(3)),
        }
        let deg = |a: Option<f64>| {
            a.filter(|r| r.is_finite()).map_or("NA".to_string(), |r| {
                let text = format!("{:.9}", r.to_degrees());
                let text = text.trim_end_matches('0').trim_end_matches('.');
                if text == "-0" {
                    "0".to_string()
                } else {
                    text.to_string()
                }
            })
        };
        let _ = writeln!(
            s,
            "\tNA\tNA\t{}\tNA\t{}\t{}",
            num(p.rsa[i]),
            deg(p.phi[i]),
            deg(p.psi[i])
        );
    }
    s
}

//! Candidate and result files: XYZ with embedded energy, Cα-only PDB, the
//! ranking summary table and the generation manifest.
//!
//! Every writer is a pure `format_*` function returning text plus a thin
//! `write_*` wrapper that puts it on disk, so output is byte-for-byte
//! reproducible.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Conformation, Point3, Residue};
use crate::residue::{sequence_string, AminoAcid};
use crate::scoring::RankingReport;
use crate::surrogate::CandidateSet;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct XyzRecord {
    pub label: String,
    pub position: Point3,
    pub residue: Option<AminoAcid>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct XyzDocument {
    /// `key=value` pairs from the comment line, in order.
    pub metadata: Vec<(String, String)>,
    pub records: Vec<XyzRecord>,
}

impl XyzDocument {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn energy(&self) -> Result<f64> {
        let raw = self
            .get("E_q")
            .ok_or_else(|| Error::Metadata("XYZ comment line has no E_q=<value>".into()))?;
        raw.parse()
            .map_err(|_| Error::Format(format!("E_q value {raw:?} is not a number")))
    }

    /// Build a conformation. Residue codes come from the fifth column when
    /// every record has one, otherwise from `sequence`; `energy` overrides
    /// the embedded `E_q`.
    pub fn to_conformation(
        &self,
        id: &str,
        sequence: Option<&[AminoAcid]>,
        energy: Option<f64>,
    ) -> Result<Conformation> {
        let energy = match energy {
            Some(e) => e,
            None => self.energy()?,
        };
        let codes: Vec<AminoAcid> = match self.records.iter().map(|r| r.residue).collect() {
            Some(codes) => codes,
            None => {
                let seq = sequence.ok_or_else(|| {
                    Error::Metadata(format!(
                        "{id}: XYZ records carry no residue column and no sequence was given"
                    ))
                })?;
                if seq.len() != self.records.len() {
                    return Err(Error::Shape(format!(
                        "{id}: sequence has {} residues but the XYZ file has {} atoms",
                        seq.len(),
                        self.records.len()
                    )));
                }
                seq.to_vec()
            }
        };
        let residues = codes
            .into_iter()
            .zip(&self.records)
            .map(|(code, r)| Residue {
                code,
                ca: r.position,
            })
            .collect();
        Conformation::new(id, residues, energy)
    }
}

/// Parse the three-section XYZ layout: atom count, comment, records.
pub fn parse_xyz_document(text: &str) -> Result<XyzDocument> {
    let mut lines = text.lines();
    let count_line = lines
        .next()
        .ok_or_else(|| Error::Format("XYZ text is empty".into()))?;
    let count: usize = count_line.trim().parse().map_err(|_| {
        Error::Format(format!(
            "atom count {:?} is not an integer",
            count_line.trim()
        ))
    })?;
    let comment = lines
        .next()
        .ok_or_else(|| Error::Format("XYZ text has no comment line".into()))?;
    let metadata = comment
        .split_whitespace()
        .filter_map(|tok| tok.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();

    let mut records = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let line_no = i + 3;
        if !(4..=5).contains(&fields.len()) {
            return Err(Error::Format(format!(
                "line {line_no}: expected 4 or 5 fields, found {}",
                fields.len()
            )));
        }
        let mut xyz = [0.0; 3];
        for (slot, field) in xyz.iter_mut().zip(&fields[1..4]) {
            *slot = field
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    Error::Format(format!(
                        "line {line_no}: {field:?} is not a finite coordinate"
                    ))
                })?;
        }
        let residue = match fields.get(4) {
            Some(code) => Some(AminoAcid::parse_code(code).ok_or_else(|| {
                Error::Format(format!("line {line_no}: unknown residue code {code:?}"))
            })?),
            None => None,
        };
        records.push(XyzRecord {
            label: fields[0].to_string(),
            position: Point3::from(xyz),
            residue,
        });
    }
    if records.len() != count {
        return Err(Error::Format(format!(
            "XYZ declares {count} atoms but has {} records",
            records.len()
        )));
    }
    Ok(XyzDocument { metadata, records })
}

/// Parse an XYZ candidate. The id is taken from `id=` metadata, else
/// `fallback_id`.
pub fn parse_xyz(
    text: &str,
    sequence: Option<&[AminoAcid]>,
    fallback_id: &str,
) -> Result<Conformation> {
    let doc = parse_xyz_document(text)?;
    let id = doc.get("id").unwrap_or(fallback_id).to_string();
    doc.to_conformation(&id, sequence, None)
}

/// Read an XYZ candidate file; the file stem is the fallback id.
pub fn read_xyz(path: &Path, sequence: Option<&[AminoAcid]>) -> Result<Conformation> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_xyz(&read_text(path)?, sequence, &stem)
}

fn check_token(key: &str, value: &str) -> Result<()> {
    if value.is_empty() || value.contains(char::is_whitespace) {
        return Err(Error::Format(format!(
            "metadata {key}={value:?} must be a non-empty token without whitespace"
        )));
    }
    Ok(())
}

/// XYZ text with `id`, `E_q` and any `extra` pairs on the comment line.
///
/// Coordinates carry six decimals; the energy is written in shortest
/// round-trip form so it reads back bit-identical.
pub fn format_xyz(c: &Conformation, extra: &[(&str, String)]) -> Result<String> {
    check_token("id", c.id())?;
    let mut out = format!("{}\nid={} E_q={}", c.len(), c.id(), c.energy_q());
    for (k, v) in extra {
        check_token(k, v)?;
        let _ = write!(out, " {k}={v}");
    }
    out.push('\n');
    for r in c.residues() {
        let _ = writeln!(
            out,
            "CA {:.6} {:.6} {:.6} {}",
            r.ca.x,
            r.ca.y,
            r.ca.z,
            r.code.one_letter()
        );
    }
    Ok(out)
}

pub fn write_xyz(path: &Path, c: &Conformation, extra: &[(&str, String)]) -> Result<()> {
    write_text(path, &format_xyz(c, extra)?)
}

fn pdb_coord(v: f64) -> Result<String> {
    let s = format!("{v:>8.3}");
    if s.len() > 8 || v.abs() >= 1e4 {
        return Err(Error::FormatOverflow(v));
    }
    Ok(s)
}

/// Cα-only PDB text: one `ATOM` record per residue on chain A, then
/// `TER` and `END`.
pub fn format_pdb(c: &Conformation) -> Result<String> {
    if c.len() > 9999 {
        return Err(Error::Format(format!(
            "{} residues do not fit PDB residue numbering",
            c.len()
        )));
    }
    let mut out = String::new();
    for (i, r) in c.residues().iter().enumerate() {
        let n = i + 1;
        let _ = writeln!(
            out,
            "ATOM  {n:>5}  CA  {} A{n:>4}    {}{}{}  1.00  0.00           C",
            r.code.three_letter(),
            pdb_coord(r.ca.x)?,
            pdb_coord(r.ca.y)?,
            pdb_coord(r.ca.z)?,
        );
    }
    let last = c.residues().last().expect("conformations are non-empty");
    let _ = writeln!(
        out,
        "TER   {:>5}      {} A{:>4}",
        c.len() + 1,
        last.code.three_letter(),
        c.len()
    );
    out.push_str("END\n");
    Ok(out)
}

pub fn write_pdb(path: &Path, c: &Conformation) -> Result<()> {
    write_text(path, &format_pdb(c)?)
}

/// Cα atoms from the `ATOM` records of a PDB text, read by column.
pub fn parse_pdb_ca(text: &str) -> Result<Vec<Residue>> {
    let field = |line: &str, range: std::ops::Range<usize>, n: usize| -> Result<String> {
        line.get(range)
            .map(|s| s.trim().to_string())
            .ok_or_else(|| Error::Format(format!("line {n}: ATOM record is truncated")))
    };
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if !line.starts_with("ATOM") || field(line, 12..16, n)? != "CA" {
            continue;
        }
        let name = field(line, 17..20, n)?;
        let code = AminoAcid::from_three_letter(&name)
            .ok_or_else(|| Error::Format(format!("line {n}: unknown residue {name:?}")))?;
        let mut xyz = [0.0; 3];
        for (k, slot) in xyz.iter_mut().enumerate() {
            let start = 30 + 8 * k;
            let raw = field(line, start..start + 8, n)?;
            *slot = raw
                .parse()
                .map_err(|_| Error::Format(format!("line {n}: bad coordinate {raw:?}")))?;
        }
        out.push(Residue {
            code,
            ca: Point3::from(xyz),
        });
    }
    Ok(out)
}

pub const SUMMARY_HEADER: &str =
    "rank,candidate_id,e_q,d_ss,d_angle,e_q_norm,d_ss_norm,d_angle_norm,e_fuse,tie_break";

/// One parsed line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub rank: usize,
    pub candidate_id: String,
    pub e_q: f64,
    pub d_ss: Option<f64>,
    pub d_angle: Option<f64>,
    pub e_q_norm: f64,
    pub d_ss_norm: f64,
    pub d_angle_norm: f64,
    pub e_fuse: f64,
    pub tie_break: String,
}

fn fixed(v: f64) -> String {
    // keep "-0.000000" out of the table
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn fixed_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), fixed)
}

/// The ranking table in rank order, preceded by a comment echoing weights
/// and scoring configuration.
pub fn format_summary(report: &RankingReport) -> Result<String> {
    if report.entries.is_empty() {
        return Err(Error::EmptyInput("ranking report"));
    }
    let (w, cfg) = (&report.weights, &report.config);
    let mut out = format!(
        "# alpha={} beta={} gamma={} ss_metric={} ss_mode={} epsilon={} rsa_weighting={} normalize={} sigma={}\n{SUMMARY_HEADER}\n",
        w.alpha,
        w.beta,
        w.gamma,
        cfg.ss_metric,
        cfg.ss_mode,
        cfg.epsilon,
        cfg.rsa_weighting,
        cfg.normalize,
        cfg.rama.sigma,
    );
    for e in &report.entries {
        let s = &e.score;
        if s.candidate_id.contains([',', '"', '\n']) {
            return Err(Error::Format(format!(
                "candidate id {:?} cannot be written unquoted",
                s.candidate_id
            )));
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            e.rank,
            s.candidate_id,
            fixed(s.e_q_raw),
            fixed_opt(s.d_ss_raw),
            fixed_opt(s.d_angle_raw),
            fixed(s.e_q_norm),
            fixed(s.d_ss_norm),
            fixed(s.d_angle_norm),
            fixed(s.e_fuse),
            e.tie_break,
        );
    }
    Ok(out)
}

pub fn write_summary(path: &Path, report: &RankingReport) -> Result<()> {
    write_text(path, &format_summary(report)?)
}

pub fn parse_summary(text: &str) -> Result<Vec<SummaryRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    if reader.headers()?.iter().collect::<Vec<_>>().join(",") != SUMMARY_HEADER {
        return Err(Error::Schema("unexpected summary header".into()));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let cell = |k: usize| record.get(k).unwrap_or("");
        let num = |k: usize, name: &str| -> Result<Option<f64>> {
            match cell(k) {
                "NA" => Ok(None),
                v => v.parse().map(Some).map_err(|_| Error::Parse {
                    row,
                    column: name.into(),
                    message: format!("{v:?} is not a number"),
                }),
            }
        };
        let req = |k: usize, name: &str| -> Result<f64> {
            num(k, name)?.ok_or_else(|| Error::Parse {
                row,
                column: name.into(),
                message: "value is required".into(),
            })
        };
        rows.push(SummaryRow {
            rank: cell(0).parse().map_err(|_| Error::Parse {
                row,
                column: "rank".into(),
                message: format!("{:?} is not a rank", cell(0)),
            })?,
            candidate_id: cell(1).to_string(),
            e_q: req(2, "e_q")?,
            d_ss: num(3, "d_ss")?,
            d_angle: num(4, "d_angle")?,
            e_q_norm: req(5, "e_q_norm")?,
            d_ss_norm: req(6, "d_ss_norm")?,
            d_angle_norm: req(7, "d_angle_norm")?,
            e_fuse: req(8, "e_fuse")?,
            tie_break: cell(9).to_string(),
        });
    }
    Ok(rows)
}

pub const MANIFEST_HEADER: &str = "rank,candidate_id,file,energy,moves";

/// Listing of generated candidates, ascending by energy.
pub fn format_manifest(set: &CandidateSet, sequence: &[AminoAcid]) -> String {
    let mut out = format!(
        "# sequence={} method={}",
        sequence_string(sequence),
        set.method
    );
    if let crate::surrogate::GenerationMethod::Anneal { seed, schedule } = set.method {
        let _ = write!(
            out,
            " seed={seed} t_start={} t_end={} steps={}",
            schedule.t_start, schedule.t_end, schedule.steps
        );
    }
    let _ = write!(out, "\n{MANIFEST_HEADER}\n");
    for (i, c) in set.candidates.iter().enumerate() {
        let id = c.conformation.id();
        let _ = writeln!(out, "{},{id},{id}.xyz,{},{}", i + 1, c.energy, c.moves);
    }
    out
}

//! The twenty standard amino acids.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AminoAcid {
    Ala,
    Arg,
    Asn,
    Asp,
    Cys,
    Gln,
    Glu,
    Gly,
    His,
    Ile,
    Leu,
    Lys,
    Met,
    Phe,
    Pro,
    Ser,
    Thr,
    Trp,
    Tyr,
    Val,
}

use AminoAcid::*;

impl AminoAcid {
    pub const ALL: [AminoAcid; 20] = [
        Ala, Arg, Asn, Asp, Cys, Gln, Glu, Gly, His, Ile, Leu, Lys, Met, Phe, Pro, Ser, Thr, Trp,
        Tyr, Val,
    ];

    pub fn from_one_letter(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'A' => Ala,
            'R' => Arg,
            'N' => Asn,
            'D' => Asp,
            'C' => Cys,
            'Q' => Gln,
            'E' => Glu,
            'G' => Gly,
            'H' => His,
            'I' => Ile,
            'L' => Leu,
            'K' => Lys,
            'M' => Met,
            'F' => Phe,
            'P' => Pro,
            'S' => Ser,
            'T' => Thr,
            'W' => Trp,
            'Y' => Tyr,
            'V' => Val,
            _ => return None,
        })
    }

    pub fn one_letter(self) -> char {
        match self {
            Ala => 'A',
            Arg => 'R',
            Asn => 'N',
            Asp => 'D',
            Cys => 'C',
            Gln => 'Q',
            Glu => 'E',
            Gly => 'G',
            His => 'H',
            Ile => 'I',
            Leu => 'L',
            Lys => 'K',
            Met => 'M',
            Phe => 'F',
            Pro => 'P',
            Ser => 'S',
            Thr => 'T',
            Trp => 'W',
            Tyr => 'Y',
            Val => 'V',
        }
    }

    pub fn three_letter(self) -> &'static str {
        match self {
            Ala => "ALA",
            Arg => "ARG",
            Asn => "ASN",
            Asp => "ASP",
            Cys => "CYS",
            Gln => "GLN",
            Glu => "GLU",
            Gly => "GLY",
            His => "HIS",
            Ile => "ILE",
            Leu => "LEU",
            Lys => "LYS",
            Met => "MET",
            Phe => "PHE",
            Pro => "PRO",
            Ser => "SER",
            Thr => "THR",
            Trp => "TRP",
            Tyr => "TYR",
            Val => "VAL",
        }
    }

    pub fn from_three_letter(code: &str) -> Option<Self> {
        let upper = code.to_ascii_uppercase();
        Self::ALL.into_iter().find(|aa| aa.three_letter() == upper)
    }

    /// Accepts either a one-letter or a three-letter code.
    pub fn parse_code(code: &str) -> Option<Self> {
        let mut chars = code.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Self::from_one_letter(c),
            _ => Self::from_three_letter(code),
        }
    }

    /// Index into [`AminoAcid::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AminoAcid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.one_letter())
    }
}

/// Parse a one-letter sequence string. Errors name the 1-based position of the
/// first invalid letter.
pub fn parse_sequence(seq: &str) -> Result<Vec<AminoAcid>> {
    seq.chars()
        .enumerate()
        .map(|(i, c)| {
            AminoAcid::from_one_letter(c).ok_or(Error::UnknownResidue {
                code: c,
                position: i + 1,
            })
        })
        .collect()
}

pub fn sequence_string(seq: &[AminoAcid]) -> String {
    seq.iter().map(|aa| aa.one_letter()).collect()
}

impl FromStr for AminoAcid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_code(s).ok_or(Error::UnknownResidue {
            code: s.chars().next().unwrap_or('?'),
            position: 1,
        })
    }
}

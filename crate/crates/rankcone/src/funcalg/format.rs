//! Function file formats and inline literals.

use serde::{Deserialize, Serialize};

use super::{Piece, Piecewise, PowerSum, PowerTerm};
use crate::error::{Error, Result};
use crate::io::Q;
use crate::scalar::{parse_rational, Flavor, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermFile {
    pub coeff: Q,
    pub exponent: Q,
    pub flavor: Flavor,
}

/// `{"constant": "p/q", "terms": [{"coeff", "exponent", "flavor"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSumFile {
    pub constant: Q,
    #[serde(default)]
    pub terms: Vec<TermFile>,
}

impl From<&PowerSum> for PowerSumFile {
    fn from(f: &PowerSum) -> Self {
        PowerSumFile {
            constant: Q(f.constant.clone()),
            terms: f
                .terms
                .iter()
                .map(|t| TermFile {
                    coeff: Q(t.coeff.clone()),
                    exponent: Q(t.exponent.clone()),
                    flavor: t.flavor,
                })
                .collect(),
        }
    }
}

impl TryFrom<PowerSumFile> for PowerSum {
    type Error = Error;

    fn try_from(file: PowerSumFile) -> Result<Self> {
        let terms = file
            .terms
            .into_iter()
            .map(|t| PowerTerm::new(t.coeff.0, t.exponent.0, t.flavor))
            .collect();
        PowerSum::new(file.constant.0, terms)
    }
}

/// Either a power sum or a piecewise power sum `{"pieces": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionFile {
    Piecewise { pieces: Vec<PieceFile> },
    Power(PowerSumFile),
}

/// Serialized piece of a piecewise function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceFile {
    pub from: Option<Q>,
    pub function: PowerSumFile,
}

impl PowerSum {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PowerSumFile::from(self)).expect("power sums always serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: PowerSumFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        file.try_into()
    }
}

impl Piecewise {
    pub fn to_file(&self) -> FunctionFile {
        FunctionFile::Piecewise {
            pieces: self
                .pieces()
                .iter()
                .map(|p| PieceFile {
                    from: p.from.clone().map(Q),
                    function: PowerSumFile::from(&p.function),
                })
                .collect(),
        }
    }
}

impl FunctionFile {
    pub fn into_function(self) -> Result<super::Function> {
        match self {
            FunctionFile::Power(p) => Ok(super::Function::Power(p.try_into()?)),
            FunctionFile::Piecewise { pieces } => {
                let pieces = pieces
                    .into_iter()
                    .map(|p| {
                        Ok(Piece {
                            from: p.from.map(|q| q.0),
                            function: p.function.try_into()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(super::Function::Piecewise(Piecewise::new(pieces)?))
            }
        }
    }
}

/// Inline literals: `plain:α`, `phi:α`, `psi:α`, `poly:c0,c1,...`.
pub fn parse_literal(s: &str) -> Result<PowerSum> {
    let (kind, body) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("function literal {s:?} lacks a kind prefix")))?;
    let flavor = match kind {
        "plain" => Flavor::Plain,
        "phi" => Flavor::Phi,
        "psi" => Flavor::Psi,
        "poly" => {
            let coeffs = body
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<Rational>>>()?;
            return Ok(PowerSum::polynomial(&coeffs));
        }
        other => return Err(Error::Parse(format!("unknown function kind {other:?}"))),
    };
    PowerSum::term(Rational::from_integer(1.into()), parse_rational(body)?, flavor)
}

impl Serialize for PowerSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PowerSumFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PowerSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = PowerSumFile::deserialize(d)?;
        PowerSum::try_from(file).map_err(serde::de::Error::custom)
    }
}

impl Serialize for super::Function {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for super::Function {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = FunctionFile::deserialize(d)?;
        file.into_function().map_err(serde::de::Error::custom)
    }
}

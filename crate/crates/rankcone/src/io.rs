//! JSON file formats for matrices and exact scalars.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::scalar::{parse_rational, Backend, Rational};
use crate::tol::Tolerances;
use crate::{ExactMatrix, FloatMatrix};

/// Exact rational serialized as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => parse_rational(&s).map(Q).map_err(D::Error::custom),
            Value::Number(n) if n.is_i64() => Ok(Q(Rational::from_integer(n.as_i64().unwrap().into()))),
            other => Err(D::Error::custom(format!("expected a \"p/q\" string, got {other}"))),
        }
    }
}

pub fn qs(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

pub fn unq(v: Vec<Q>) -> Vec<Rational> {
    v.into_iter().map(|q| q.0).collect()
}

/// A matrix on either backend, as read from or written to disk.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    Exact(ExactMatrix),
    Float(FloatMatrix),
}

impl AnyMatrix {
    pub fn n(&self) -> usize {
        match self {
            AnyMatrix::Exact(m) => m.n(),
            AnyMatrix::Float(m) => m.n(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            AnyMatrix::Exact(_) => Backend::Exact,
            AnyMatrix::Float(_) => Backend::Float,
        }
    }

    pub fn rank(&self, tol: &Tolerances) -> usize {
        match self {
            AnyMatrix::Exact(m) => m.rank_with(tol),
            AnyMatrix::Float(m) => m.rank_with(tol),
        }
    }

    pub fn is_psd(&self, tol: &Tolerances) -> bool {
        match self {
            AnyMatrix::Exact(m) => m.is_psd_with(tol),
            AnyMatrix::Float(m) => m.is_psd_with(tol),
        }
    }

    pub fn to_float(&self) -> FloatMatrix {
        match self {
            AnyMatrix::Exact(m) => m.to_float(),
            AnyMatrix::Float(m) => m.clone(),
        }
    }

    /// Refused on the float backend, where minors cancel unstably.
    pub fn minors_rank_test(&self, r: usize, principal_only: bool) -> Result<bool> {
        match self {
            AnyMatrix::Exact(m) => m.minors_rank_test(r, principal_only),
            AnyMatrix::Float(_) => Err(Error::Backend(
                "minor-based rank tests need the exact backend".into(),
            )),
        }
    }

    pub fn as_exact(&self) -> Option<&ExactMatrix> {
        match self {
            AnyMatrix::Exact(m) => Some(m),
            AnyMatrix::Float(_) => None,
        }
    }

    pub fn to_json(&self) -> Result<Value> {
        serde_json::to_value(self).map_err(|e| Error::Domain(e.to_string()))
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        AnyMatrix::deserialize(v).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl From<ExactMatrix> for AnyMatrix {
    fn from(m: ExactMatrix) -> Self {
        AnyMatrix::Exact(m)
    }
}

impl From<FloatMatrix> for AnyMatrix {
    fn from(m: FloatMatrix) -> Self {
        AnyMatrix::Float(m)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    backend: Backend,
    entries: Vec<Vec<Value>>,
}

impl Serialize for AnyMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let entries = match self {
            AnyMatrix::Exact(m) => m
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(|q| Value::String(q.to_string())).collect())
                .collect(),
            AnyMatrix::Float(m) => m
                .rows()
                .into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|x| {
                            serde_json::Number::from_f64(x)
                                .map(Value::Number)
                                .ok_or_else(|| S::Error::custom(format!("non-finite entry {x}")))
                        })
                        .collect::<std::result::Result<Vec<_>, _>>()
                })
                .collect::<std::result::Result<Vec<_>, _>>()?,
        };
        MatrixFile { n: self.n(), backend: self.backend(), entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AnyMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = MatrixFile::deserialize(d)?;
        if file.entries.len() != file.n {
            return Err(D::Error::custom(format!(
                "declared n = {} but {} rows",
                file.n,
                file.entries.len()
            )));
        }
        let m = match file.backend {
            Backend::Exact => {
                let rows = file
                    .entries
                    .into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|v| Q::deserialize(v).map(|q| q.0))
                            .collect::<std::result::Result<Vec<_>, _>>()
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(D::Error::custom)?;
                AnyMatrix::Exact(SymMatrix::from_rows(rows).map_err(D::Error::custom)?)
            }
            Backend::Float => {
                let rows = file
                    .entries
                    .into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|v| {
                                v.as_f64()
                                    .ok_or_else(|| D::Error::custom(format!("expected a number, got {v}")))
                            })
                            .collect::<std::result::Result<Vec<_>, _>>()
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                AnyMatrix::Float(SymMatrix::from_rows(rows).map_err(D::Error::custom)?)
            }
        };
        Ok(m)
    }
}

//! Piecewise power sums with rational breakpoints.

use std::fmt;

use super::PowerSum;
use crate::error::{Error, Result};
use crate::io::AnyMatrix;
use crate::matrix::SymMatrix;
use crate::scalar::{Rational, Scalar};
use crate::ExactMatrix;

/// `function` on `[from, next.from)`; `from = None` means `-∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub from: Option<Rational>,
    pub function: PowerSum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piecewise {
    pieces: Vec<Piece>,
}

impl Piecewise {
    /// Pieces must start at `-∞` and have strictly increasing breakpoints.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        match pieces.first() {
            None => return Err(Error::Invalid("piecewise function without pieces".into())),
            Some(p) if p.from.is_some() => {
                return Err(Error::Invalid("the first piece must start at -inf".into()))
            }
            _ => {}
        }
        for w in pieces.windows(2).skip(1) {
            if w[0].from >= w[1].from {
                return Err(Error::Invalid("breakpoints must increase".into()));
            }
        }
        if pieces.iter().skip(1).any(|p| p.from.is_none()) {
            return Err(Error::Invalid("only the first piece may start at -inf".into()));
        }
        Ok(Piecewise { pieces })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn piece_at<T: Scalar>(&self, x: &T) -> &PowerSum {
        let mut chosen = &self.pieces[0].function;
        for p in &self.pieces[1..] {
            let from = p.from.as_ref().expect("validated breakpoints");
            if *x >= T::from_rational(from) {
                chosen = &p.function;
            }
        }
        chosen
    }

    pub fn eval<T: Scalar>(&self, x: &T) -> Result<T> {
        self.piece_at(x).eval(x)
    }

    /// True when every piece meeting `[lo, hi)` is identically zero.
    pub fn vanishes_on(&self, lo: &Rational, hi: Option<&Rational>) -> bool {
        self.pieces.iter().enumerate().all(|(i, p)| {
            let start = p.from.as_ref();
            let end = self.pieces.get(i + 1).and_then(|q| q.from.as_ref());
            let starts_before_hi = match (start, hi) {
                (Some(s), Some(h)) => s < h,
                _ => true,
            };
            let ends_after_lo = end.map_or(true, |e| e > lo);
            !(starts_before_hi && ends_after_lo) || p.function.is_zero()
        })
    }

    fn exact_capable(&self) -> bool {
        self.pieces.iter().all(|p| p.function.has_integer_exponents())
    }
}

/// Any function the deciders accept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Function {
    Power(PowerSum),
    Piecewise(Piecewise),
}

impl From<PowerSum> for Function {
    fn from(f: PowerSum) -> Self {
        Function::Power(f)
    }
}

impl Function {
    pub fn eval<T: Scalar>(&self, x: &T) -> Result<T> {
        match self {
            Function::Power(f) => f.eval(x),
            Function::Piecewise(f) => f.eval(x),
        }
    }

    pub fn apply<T: Scalar>(&self, a: &SymMatrix<T>) -> Result<SymMatrix<T>> {
        a.try_map(|x| self.eval(x))
    }

    pub fn exact_capable(&self) -> bool {
        match self {
            Function::Power(f) => f.has_integer_exponents(),
            Function::Piecewise(f) => f.exact_capable(),
        }
    }

    pub fn apply_any(&self, a: &ExactMatrix) -> Result<AnyMatrix> {
        if self.exact_capable() {
            Ok(AnyMatrix::Exact(self.apply(a)?))
        } else {
            Ok(AnyMatrix::Float(self.apply(&a.to_float::<f64>())?))
        }
    }

    pub fn as_power_sum(&self) -> Option<&PowerSum> {
        match self {
            Function::Power(f) => Some(f),
            Function::Piecewise(_) => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Function::Power(f) => f.to_json(),
            Function::Piecewise(p) => serde_json::to_value(p.to_file()).expect("serializable"),
        }
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let file: super::FunctionFile =
            serde::Deserialize::deserialize(v).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_function()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Function::Power(p) => write!(f, "{p}"),
            Function::Piecewise(p) => {
                let parts: Vec<String> = p
                    .pieces
                    .iter()
                    .map(|piece| match &piece.from {
                        None => format!("{}", piece.function),
                        Some(b) => format!("[{b},..): {}", piece.function),
                    })
                    .collect();
                write!(f, "piecewise{{{}}}", parts.join("; "))
            }
        }
    }
}

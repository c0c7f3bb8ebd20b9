//! Closed-form catalog of extended-real functions with known conjugates.

use std::fmt;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::{Grid, GridFn};
use crate::special::lambert_w0;

/// Norms on the plane used by the 2-D atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    pub fn from_exponent(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(NormKind::L1)
        } else if p == 2.0 {
            Ok(NormKind::L2)
        } else if p == f64::INFINITY {
            Ok(NormKind::LInf)
        } else {
            Err(Error::Parameter(format!("norm exponent must be 1, 2 or inf, got {p}")))
        }
    }

    pub fn exponent(self) -> f64 {
        match self {
            NormKind::L1 => 1.0,
            NormKind::L2 => 2.0,
            NormKind::LInf => f64::INFINITY,
        }
    }

    pub fn dual(self) -> Self {
        match self {
            NormKind::L1 => NormKind::LInf,
            NormKind::L2 => NormKind::L2,
            NormKind::LInf => NormKind::L1,
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            NormKind::L1 => x.iter().map(|v| v.abs()).sum(),
            NormKind::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::LInf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

/// Catalog entry. One-dimensional unless stated otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FnAtom {
    /// `|x|`
    Abs,
    /// `|x|^p / p`, `p > 1`
    Power { p: f64 },
    /// `e^x`
    Exp,
    /// `x log x - x` on `x >= 0` (0 at 0), `+inf` for `x < 0`
    XLogX,
    /// indicator of `[a, b]`
    Indicator { a: f64, b: f64 },
    /// support function of `[a, b]`: `max(a y, b y)`
    Support { a: f64, b: f64 },
    /// distance to `[a, b]`
    Distance { a: f64, b: f64 },
    /// `-sqrt(1 - x^2)` on `[-1, 1]`
    NegSqrtCircle,
    /// `sqrt(1 + y^2)`
    SqrtOnePlusSq,
    /// `-sqrt(x)` on `x >= 0`
    NegSqrt,
    /// `exp(exp(x))`
    ExpExp,
    /// `y (log y - W(y) - 1/W(y))` on `y > 0`, `-1` at 0
    ExpExpConj,
    /// constant `c`
    Constant { c: f64 },
    /// `x^3`, not convex
    Cube,
    /// `min(|x - 1|, |x + 1|)`, not convex
    DoubleWell,
    /// 2-D: `||x||`
    Norm { kind: NormKind },
    /// 2-D: `||x||^2 / 2`
    NormSq { kind: NormKind },
    /// 2-D: indicator of the closed unit ball of the norm
    Ball { kind: NormKind },
}

const CATALOG: &[&str] = &[
    "abs",
    "power",
    "exp",
    "xlogx",
    "indicator",
    "support",
    "distance",
    "negsqrt_circle",
    "sqrt_one_plus_sq",
    "negsqrt",
    "expexp",
    "expexp_conj",
    "constant",
    "cube",
    "double_well",
    "norm",
    "normsq",
    "ball",
];

impl FnAtom {
    /// Names accepted by [`FnAtom::from_tag`].
    pub fn catalog() -> &'static [&'static str] {
        CATALOG
    }

    /// Builds an atom from its tag and parameter vector. Missing parameters
    /// take defaults (`p = 2`, interval `[-1, 1]`, `c = 0`, Euclidean norm).
    pub fn from_tag(tag: &str, params: &[f64]) -> Result<Self> {
        let arg = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        let interval = || -> Result<(f64, f64)> {
            let (a, b) = (arg(0, -1.0), arg(1, 1.0));
            if !(a <= b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::Parameter(format!("interval needs a <= b finite, got [{a}, {b}]")));
            }
            Ok((a, b))
        };
        let atom = match tag {
            "abs" => FnAtom::Abs,
            "power" => FnAtom::Power { p: arg(0, 2.0) },
            "exp" => FnAtom::Exp,
            "xlogx" => FnAtom::XLogX,
            "indicator" => {
                let (a, b) = interval()?;
                FnAtom::Indicator { a, b }
            }
            "support" => {
                let (a, b) = interval()?;
                FnAtom::Support { a, b }
            }
            "distance" => {
                let (a, b) = interval()?;
                FnAtom::Distance { a, b }
            }
            "negsqrt_circle" => FnAtom::NegSqrtCircle,
            "sqrt_one_plus_sq" => FnAtom::SqrtOnePlusSq,
            "negsqrt" => FnAtom::NegSqrt,
            "expexp" => FnAtom::ExpExp,
            "expexp_conj" => FnAtom::ExpExpConj,
            "constant" => FnAtom::Constant { c: arg(0, 0.0) },
            "cube" => FnAtom::Cube,
            "double_well" => FnAtom::DoubleWell,
            "norm" => FnAtom::Norm { kind: NormKind::from_exponent(arg(0, 2.0))? },
            "normsq" => FnAtom::NormSq { kind: NormKind::from_exponent(arg(0, 2.0))? },
            "ball" => FnAtom::Ball { kind: NormKind::from_exponent(arg(0, 2.0))? },
            other => {
                return Err(Error::UnknownAtom {
                    name: other.to_string(),
                    catalog: CATALOG.iter().map(|s| s.to_string()).collect(),
                })
            }
        };
        atom.validate()?;
        Ok(atom)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FnAtom::Abs => "abs",
            FnAtom::Power { .. } => "power",
            FnAtom::Exp => "exp",
            FnAtom::XLogX => "xlogx",
            FnAtom::Indicator { .. } => "indicator",
            FnAtom::Support { .. } => "support",
            FnAtom::Distance { .. } => "distance",
            FnAtom::NegSqrtCircle => "negsqrt_circle",
            FnAtom::SqrtOnePlusSq => "sqrt_one_plus_sq",
            FnAtom::NegSqrt => "negsqrt",
            FnAtom::ExpExp => "expexp",
            FnAtom::ExpExpConj => "expexp_conj",
            FnAtom::Constant { .. } => "constant",
            FnAtom::Cube => "cube",
            FnAtom::DoubleWell => "double_well",
            FnAtom::Norm { .. } => "norm",
            FnAtom::NormSq { .. } => "normsq",
            FnAtom::Ball { .. } => "ball",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            FnAtom::Power { p } => vec![p],
            FnAtom::Indicator { a, b } | FnAtom::Support { a, b } | FnAtom::Distance { a, b } => {
                vec![a, b]
            }
            FnAtom::Constant { c } => vec![c],
            FnAtom::Norm { kind } | FnAtom::NormSq { kind } | FnAtom::Ball { kind } => {
                vec![kind.exponent()]
            }
            _ => vec![],
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FnAtom::Power { p } if !(p > 1.0 && p.is_finite()) => {
                Err(Error::Parameter(format!("power atom needs 1 < p < inf, got {p}")))
            }
            FnAtom::Indicator { a, b } | FnAtom::Support { a, b } | FnAtom::Distance { a, b }
                if !(a <= b) =>
            {
                Err(Error::Parameter(format!("interval needs a <= b, got [{a}, {b}]")))
            }
            FnAtom::Constant { c } if !c.is_finite() => {
                Err(Error::Parameter("constant must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Number of real arguments.
    pub fn arity(&self) -> usize {
        match self {
            FnAtom::Norm { .. } | FnAtom::NormSq { .. } | FnAtom::Ball { .. } => 2,
            _ => 1,
        }
    }

    /// Whether the atom is convex on its whole domain.
    pub fn is_convex(&self) -> bool {
        !matches!(self, FnAtom::Cube | FnAtom::DoubleWell)
    }

    /// The analytic conjugate, when it is itself a catalog entry.
    pub fn conjugate(&self) -> Option<FnAtom> {
        Some(match *self {
            FnAtom::Abs => FnAtom::Indicator { a: -1.0, b: 1.0 },
            FnAtom::Power { p } => FnAtom::Power { p: p / (p - 1.0) },
            FnAtom::Exp => FnAtom::XLogX,
            FnAtom::XLogX => FnAtom::Exp,
            FnAtom::Indicator { a, b } => FnAtom::Support { a, b },
            FnAtom::Support { a, b } => FnAtom::Indicator { a, b },
            FnAtom::NegSqrtCircle => FnAtom::SqrtOnePlusSq,
            FnAtom::SqrtOnePlusSq => FnAtom::NegSqrtCircle,
            FnAtom::ExpExp => FnAtom::ExpExpConj,
            FnAtom::ExpExpConj => FnAtom::ExpExp,
            FnAtom::Constant { c: 0.0 } => FnAtom::Indicator { a: 0.0, b: 0.0 },
            FnAtom::Norm { kind } => FnAtom::Ball { kind: kind.dual() },
            FnAtom::Ball { kind } => FnAtom::Norm { kind: kind.dual() },
            FnAtom::NormSq { kind } => FnAtom::NormSq { kind: kind.dual() },
            _ => return None,
        })
    }

    /// Evaluates the atom at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        if x.len() != self.arity() {
            return Err(Error::DimensionMismatch { expected: self.arity(), found: x.len() });
        }
        ExtReal::new(self.eval_raw(x))
    }

    /// Evaluation without the arity check; `x` must have `arity()` entries.
    pub fn eval_raw(&self, x: &[f64]) -> f64 {
        const INF: f64 = f64::INFINITY;
        let t = x[0];
        match *self {
            FnAtom::Abs => t.abs(),
            FnAtom::Power { p } => t.abs().powf(p) / p,
            FnAtom::Exp => t.exp(),
            FnAtom::XLogX => {
                if t > 0.0 {
                    t * t.ln() - t
                } else if t == 0.0 {
                    0.0
                } else {
                    INF
                }
            }
            FnAtom::Indicator { a, b } => {
                if t >= a && t <= b {
                    0.0
                } else {
                    INF
                }
            }
            FnAtom::Support { a, b } => (a * t).max(b * t),
            FnAtom::Distance { a, b } => (a - t).max(t - b).max(0.0),
            FnAtom::NegSqrtCircle => {
                if t.abs() <= 1.0 {
                    -(1.0 - t * t).sqrt()
                } else {
                    INF
                }
            }
            FnAtom::SqrtOnePlusSq => t.hypot(1.0),
            FnAtom::NegSqrt => {
                if t >= 0.0 {
                    -t.sqrt()
                } else {
                    INF
                }
            }
            FnAtom::ExpExp => t.exp().exp(),
            FnAtom::ExpExpConj => {
                if t > 0.0 {
                    let w = lambert_w0(t);
                    t * (t.ln() - w - 1.0 / w)
                } else if t == 0.0 {
                    -1.0
                } else {
                    INF
                }
            }
            FnAtom::Constant { c } => c,
            FnAtom::Cube => t * t * t,
            FnAtom::DoubleWell => (t - 1.0).abs().min((t + 1.0).abs()),
            FnAtom::Norm { kind } => kind.eval(x),
            FnAtom::NormSq { kind } => {
                let n = kind.eval(x);
                0.5 * n * n
            }
            FnAtom::Ball { kind } => {
                if kind.eval(x) <= 1.0 + 1e-12 {
                    0.0
                } else {
                    INF
                }
            }
        }
    }

    /// Samples the atom at every node of `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<GridFn> {
        if grid.dim() != self.arity() {
            return Err(Error::DimensionMismatch { expected: self.arity(), found: grid.dim() });
        }
        let values = (0..grid.len())
            .map(|k| {
                let p = grid.node2(k);
                self.eval_raw(&p[..grid.dim()])
            })
            .collect();
        GridFn::new(grid.clone(), values)
    }
}

impl fmt::Display for FnAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            f.write_str(self.tag())
        } else {
            let p: Vec<String> = params.iter().map(|v| v.to_string()).collect();
            write!(f, "{}({})", self.tag(), p.join(","))
        }
    }
}

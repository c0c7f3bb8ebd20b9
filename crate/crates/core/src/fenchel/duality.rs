//! Primal and dual values of `min f(x) + g(T x)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fenchel::conjugate::conjugate_at;
use crate::grid::{Grid, GridFn};

/// A linear map `R^cols -> R^rows` with `rows, cols` in `{1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearMap {
    rows: usize,
    cols: usize,
    a: [[f64; 2]; 2],
}

impl LinearMap {
    /// Row-major entries.
    pub fn new(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if !(1..=2).contains(&rows) || !(1..=2).contains(&cols) {
            return Err(Error::Parameter(format!("unsupported map shape {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("map entries must be finite".into()));
        }
        let mut a = [[0.0; 2]; 2];
        for r in 0..rows {
            for c in 0..cols {
                a[r][c] = entries[r * cols + c];
            }
        }
        Ok(LinearMap { rows, cols, a })
    }

    pub fn identity(n: usize) -> Result<Self> {
        match n {
            1 => Self::new(1, 1, &[1.0]),
            2 => Self::new(2, 2, &[1.0, 0.0, 0.0, 1.0]),
            _ => Err(Error::Parameter(format!("unsupported dimension {n}"))),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.a[r][c] * x[c]).sum()).collect()
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        (0..self.cols).map(|c| (0..self.rows).map(|r| self.a[r][c] * y[r]).sum()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityGap {
    /// `min over primal nodes of f(x) + g(T x)`.
    pub primal: f64,
    /// `max over dual nodes of -f*(T^t y) - g*(-y)`.
    pub dual: f64,
    /// `primal - dual`; `+inf` when the primal problem is infeasible.
    pub gap: f64,
    /// The primal minimizer sits on the boundary of a grid, so the truncated
    /// problem may differ from the untruncated one.
    pub truncated: bool,
}

/// Weak-duality pair for `f` on its grid and `g` evaluated by multilinear
/// interpolation (`+inf` off its grid). Conjugates are exact discrete
/// maxima, so `primal >= dual` up to rounding.
pub fn fenchel_duality_gap(f: &GridFn, g: &GridFn, t: &LinearMap, dual: &Grid) -> Result<DualityGap> {
    f.ensure_proper()?;
    g.ensure_proper()?;
    if t.cols() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: t.cols() });
    }
    if t.rows() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: t.rows() });
    }
    if dual.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: dual.dim() });
    }

    let pg = f.grid();
    let mut primal = f64::INFINITY;
    let mut at = None;
    for (k, &fx) in f.values().iter().enumerate() {
        if !fx.is_finite() {
            continue;
        }
        let tx = t.apply(&pg.node(k));
        let v = fx + g.interp(&tx);
        if v < primal {
            primal = v;
            at = Some((k, tx));
        }
    }

    let values: Vec<f64> = crate::par::map_range(dual.len(), |k| {
        let y = dual.node(k);
        let (fs, _) = conjugate_at(f, &t.apply_transpose(&y));
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let (gs, _) = conjugate_at(g, &neg);
        -fs - gs
    });
    let dual_value = values.into_iter().fold(f64::NEG_INFINITY, f64::max);

    let truncated = match &at {
        Some((k, tx)) => {
            pg.is_boundary(*k) || {
                let gg = g.grid();
                gg.axes().iter().zip(tx).any(|(a, &v)| {
                    let s = 0.5 * a.step();
                    v <= a.lo + s || v >= a.hi - s
                })
            }
        }
        None => false,
    };
    let gap = if primal == f64::INFINITY { f64::INFINITY } else { primal - dual_value };
    Ok(DualityGap { primal, dual: dual_value, gap, truncated })
}

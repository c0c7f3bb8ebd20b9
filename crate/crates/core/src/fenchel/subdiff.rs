//! Discrete subdifferentials through the Fenchel–Young gap, and the max
//! formula for directional derivatives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fenchel::conjugate::conjugate;
use crate::grid::{Grid, GridFn};

/// Relative tolerance of the default Fenchel–Young slack.
pub const DEFAULT_SUBDIFF_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdifferentialSet {
    /// Base point.
    pub x: Vec<f64>,
    /// Dual nodes `y` with `f(x) + f*(y) - <y, x> <= epsilon`.
    pub slopes: Vec<Vec<f64>>,
    /// Flat dual-grid indices of `slopes`.
    pub indices: Vec<usize>,
    pub epsilon: f64,
}

impl SubdifferentialSet {
    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }
}

/// Rounding-level slack for the Fenchel–Young gap at `x`: the discrete gap is
/// exactly zero on the discrete subdifferential, up to float cancellation.
pub fn default_epsilon(f: &GridFn, x: &[f64], dual: &Grid) -> f64 {
    let xs = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ys = dual.axes().iter().fold(0.0f64, |m, a| m.max(a.lo.abs()).max(a.hi.abs()));
    DEFAULT_SUBDIFF_TOL * (1.0 + f.finite_scale() + xs * ys * dual.dim() as f64)
}

/// Dual nodes satisfying the Fenchel–Young equality at node `node` within
/// `epsilon` (the rounding-level default when `None`).
pub fn subdifferential(
    f: &GridFn,
    node: usize,
    dual: &Grid,
    epsilon: Option<f64>,
) -> Result<SubdifferentialSet> {
    if node >= f.len() {
        return Err(Error::Parameter(format!("node {node} out of range 0..{}", f.len())));
    }
    let fx = f.values()[node];
    if !fx.is_finite() {
        return Err(Error::Domain(format!("f is not finite at node {node}")));
    }
    let x = f.grid().node(node);
    let eps = epsilon.unwrap_or_else(|| default_epsilon(f, &x, dual));
    if !(eps >= 0.0) {
        return Err(Error::Parameter(format!("epsilon must be nonnegative, got {eps}")));
    }
    let conj = conjugate(f, dual)?;
    let mut slopes = Vec::new();
    let mut indices = Vec::new();
    for k in 0..dual.len() {
        let y = dual.node(k);
        let inner: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
        let gap = fx + conj.dual.values()[k] - inner;
        if gap <= eps {
            slopes.push(y);
            indices.push(k);
        }
    }
    Ok(SubdifferentialSet { x, slopes, indices, epsilon: eps })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxFormula {
    /// `(f(x + t d) - f(x)) / t` with `t` the smallest grid step.
    pub quotient: f64,
    /// `max <y, d>` over the discrete subdifferential at `x`.
    pub support: f64,
}

/// Compares the forward difference quotient of `f` at `node` along `d`
/// with the support function of the subdifferential in direction `d`.
pub fn max_formula_check(f: &GridFn, node: usize, d: &[f64], dual: &Grid) -> Result<MaxFormula> {
    let grid = f.grid();
    grid.check_point(d)?;
    if node >= f.len() {
        return Err(Error::Parameter(format!("node {node} out of range 0..{}", f.len())));
    }
    if grid.is_boundary(node) {
        return Err(Error::Geometry(format!("node {node} lies on the grid boundary")));
    }
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Parameter("direction must be nonzero".into()));
    }
    let d: Vec<f64> = d.iter().map(|v| v / norm).collect();
    let x = grid.node(node);
    let t = grid.min_step();
    let moved: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
    let quotient = (f.interp(&moved) - f.values()[node]) / t;
    let set = subdifferential(f, node, dual, None)?;
    if set.is_empty() {
        return Err(Error::EmptySubdifferential(node));
    }
    let support = set
        .slopes
        .iter()
        .map(|y| y.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MaxFormula { quotient, support })
}

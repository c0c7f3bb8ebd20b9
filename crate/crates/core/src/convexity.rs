//! Discrete convexity test for sampled functions.
//!
//! A sampled function passes when, along every grid line, its finite values
//! form one contiguous block and every second difference of three
//! consecutive finite values is `>= -tol * max(1, |f|_max)`. In 2-D the lines
//! are the rows, the columns and both diagonal families.

use crate::error::{Error, Result};
use crate::grid::GridFn;
use crate::par;

/// Relative tolerance on second differences.
pub const DEFAULT_CONVEXITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvexityReport {
    pub convex: bool,
    /// Flat index of the first offending node, in line scan order.
    pub violation: Option<usize>,
}

pub fn discrete_convexity_check(f: &GridFn) -> Result<ConvexityReport> {
    check_convexity(f, DEFAULT_CONVEXITY_TOL)
}

pub fn check_convexity(f: &GridFn, tol: f64) -> Result<ConvexityReport> {
    f.ensure_proper()?;
    let slack = tol * f.finite_scale().max(1.0);
    let lines = grid_lines(f);
    let vals = f.values();
    let violation = par::find_first(lines.len(), |l| line_violation(vals, &lines[l], slack));
    Ok(ConvexityReport { convex: violation.is_none(), violation })
}

/// Requires convexity, mapping a failure to [`Error::NonConvex`].
pub fn require_convex(f: &GridFn, tol: f64) -> Result<()> {
    match check_convexity(f, tol)?.violation {
        None => Ok(()),
        Some(node) => Err(Error::NonConvex { node }),
    }
}

fn line_violation(vals: &[f64], line: &[usize], slack: f64) -> Option<usize> {
    let first = line.iter().position(|&k| vals[k].is_finite())?;
    let last = line.iter().rposition(|&k| vals[k].is_finite())?;
    let block = &line[first..=last];
    if let Some(&hole) = block.iter().find(|&&k| !vals[k].is_finite()) {
        return Some(hole);
    }
    block
        .windows(3)
        .find(|w| vals[w[0]] - 2.0 * vals[w[1]] + vals[w[2]] < -slack)
        .map(|w| w[1])
}

/// Flat index lists of every line that carries a second-difference test.
fn grid_lines(f: &GridFn) -> Vec<Vec<usize>> {
    let g = f.grid();
    let (n0, n1) = g.shape();
    if g.dim() == 1 {
        return vec![(0..n0).collect()];
    }
    let mut lines = Vec::with_capacity(2 * (n0 + n1) + 2 * (n0 + n1));
    for i in 0..n0 {
        lines.push((0..n1).map(|j| g.flat(i, j)).collect());
    }
    for j in 0..n1 {
        lines.push((0..n0).map(|i| g.flat(i, j)).collect());
    }
    // Diagonals i - j = const and anti-diagonals i + j = const.
    for d in -(n1 as i64 - 1)..=(n0 as i64 - 1) {
        let line: Vec<usize> = (0..n0)
            .filter_map(|i| {
                let j = i as i64 - d;
                (j >= 0 && (j as usize) < n1).then(|| g.flat(i, j as usize))
            })
            .collect();
        if line.len() >= 3 {
            lines.push(line);
        }
    }
    for s in 0..(n0 + n1 - 1) {
        let line: Vec<usize> = (0..n0)
            .filter_map(|i| {
                let j = s as i64 - i as i64;
                (j >= 0 && (j as usize) < n1).then(|| g.flat(i, j as usize))
            })
            .collect();
        if line.len() >= 3 {
            lines.push(line);
        }
    }
    lines
}

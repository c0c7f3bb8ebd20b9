//! Conjugation, biconjugation, inf-convolution, subdifferentials,
//! coercivity and Fenchel duality on grids.

pub mod coercivity;
pub mod conjugate;
pub mod duality;
pub mod infconv;
pub mod subdiff;

pub use coercivity::{coercivity_check, CoercivityReport};
pub use conjugate::{conjugate, conjugate_at, conjugate_oracle, ConjugateResult, NO_ARGMAX};
pub use duality::{fenchel_duality_gap, DualityGap, LinearMap};
pub use infconv::{inf_convolution, infconv_dual_check, InfConvResult};
pub(crate) use infconv::inf_convolution_at;
pub use subdiff::{max_formula_check, subdifferential, MaxFormula, SubdifferentialSet};

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid, GridFn};

/// Dual nodes per axis allowed by [`covering_dual_grid`].
pub const COVER_CAP_1D: usize = 200_001;
pub const COVER_CAP_2D: usize = 1_201;

/// `f**` on the primal grid, through `f*` on `dual`.
pub fn biconjugate(f: &GridFn, dual: &Grid) -> Result<GridFn> {
    let star = conjugate(f, dual)?;
    Ok(conjugate(&star.dual, f.grid())?.dual)
}

/// A dual grid spanning every discrete slope of `f` along each axis, with a
/// spacing below the smallest gap between consecutive slopes (capped), so
/// that `f**` reproduces `f` on the domain of a convex input.
pub fn covering_dual_grid(f: &GridFn) -> Result<Grid> {
    f.ensure_proper()?;
    let grid = f.grid();
    let (n0, n1) = grid.shape();
    let vals = f.values();
    let cap = if grid.dim() == 1 { COVER_CAP_1D } else { COVER_CAP_2D };
    let mut axes = Vec::with_capacity(grid.dim());
    for k in 0..grid.dim() {
        let h = grid.axis(k).step();
        let (lines, len, stride) = if k == 0 { (n1, n0, n1) } else { (n0, n1, 1) };
        let start = |l: usize| if k == 0 { l } else { l * n1 };
        let (mut lo, mut hi, mut gap) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
        for l in 0..lines {
            let mut prev: Option<f64> = None;
            for i in 1..len {
                let (a, b) = (vals[start(l) + (i - 1) * stride], vals[start(l) + i * stride]);
                if !(a.is_finite() && b.is_finite()) {
                    prev = None;
                    continue;
                }
                let s = (b - a) / h;
                lo = lo.min(s);
                hi = hi.max(s);
                if let Some(p) = prev {
                    // Rounding-level differences are ties, not curvature.
                    if s - p > 1e-9 * (1.0 + s.abs() + p.abs()) {
                        gap = gap.min(s - p);
                    }
                }
                prev = Some(s);
            }
        }
        if lo > hi {
            lo = 0.0;
            hi = 0.0;
        }
        let width = hi - lo;
        let pad = (0.05 * (1.0 + width)).max(if gap.is_finite() { 2.0 * gap } else { 0.0 });
        let (a, b) = (lo - pad, hi + pad);
        // Dyadic spacing with lattice-aligned ends keeps dyadic slopes
        // (integers in particular) exactly on dual nodes.
        let target = if gap.is_finite() { 0.5 * gap } else { (b - a) / 100.0 };
        let mut step = 2f64.powi(target.log2().floor() as i32);
        let (mut lo_k, mut hi_k) = ((a / step).floor(), (b / step).ceil());
        while hi_k - lo_k + 1.0 > cap as f64 {
            step *= 2.0;
            lo_k = (a / step).floor();
            hi_k = (b / step).ceil();
        }
        let n = (hi_k - lo_k) as usize + 1;
        axes.push(Axis::new(lo_k * step, hi_k * step, n).map_err(|e| Error::InvalidGrid(e.to_string()))?);
    }
    Grid::new(axes)
}

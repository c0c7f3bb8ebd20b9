//! Proximal points, Moreau envelopes, the Moreau decomposition and
//! projections onto boxes.
//!
//! `prox` minimizes `f(u) + |x - u|^2 / (2 lambda)` for the piecewise-linear
//! interpolant of the samples: the best node is found first, then the exact
//! minimizer on the two adjacent cells follows from the one-sided slopes.
//! The result is the true proximal map of a convex function, hence firmly
//! nonexpansive, and it is exact at kinks and for indicators.

use serde::Serialize;

use crate::atom::FnAtom;
use crate::convexity::{require_convex, DEFAULT_CONVEXITY_TOL};
use crate::error::{Error, Result};
use crate::fenchel::{conjugate, conjugate_at, inf_convolution};
use crate::grid::{Axis, Grid, GridFn};
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProxResult {
    /// Query point.
    pub x: Vec<f64>,
    /// The proximal point.
    #[serde(rename = "prox")]
    pub point: Vec<f64>,
    /// `e_lambda f(x) = f(point) + |x - point|^2 / (2 lambda)`.
    pub envelope: f64,
    pub lambda: f64,
    /// Fenchel–Young gap `f(u) + f*(y) - <u, y>` at `u = point`,
    /// `y = (x - u) / lambda`; zero when `y` is a subgradient at `u`.
    pub certificate_eps: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

/// A validated proximal operator for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Proximal<'a> {
    f: &'a GridFn,
    lambda: f64,
}

impl<'a> Proximal<'a> {
    /// Checks `lambda > 0` and discrete convexity of `f` once.
    pub fn new(f: &'a GridFn, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        require_convex(f, DEFAULT_CONVEXITY_TOL)?;
        Ok(Proximal { f, lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Proximal point without the certificate.
    pub fn point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let grid = self.f.grid();
        grid.check_point(x)?;
        if !grid.contains(x) {
            return Err(Error::OutsideGrid(x.to_vec()));
        }
        let k = self.discrete_argmin(x);
        Ok(if grid.dim() == 1 { vec![self.refine_1d(x[0], k)] } else { self.refine_2d(x, k) })
    }

    /// Proximal point, envelope value and Fenchel–Young certificate.
    pub fn at(&self, x: &[f64]) -> Result<ProxResult> {
        let u = self.point(x)?;
        let envelope = self.objective(x, &u);
        let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| (a - b) / self.lambda).collect();
        let (fstar, _) = conjugate_at(self.f, &y);
        let inner: f64 = u.iter().zip(&y).map(|(a, b)| a * b).sum();
        let certificate_eps = self.f.interp(&u) + fstar - inner;
        Ok(ProxResult { x: x.to_vec(), point: u, envelope, lambda: self.lambda, certificate_eps })
    }

    fn objective(&self, x: &[f64], u: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum();
        self.f.interp(u) + d2 / (2.0 * self.lambda)
    }

    /// Node minimizing the sampled objective, smallest index on ties.
    fn discrete_argmin(&self, x: &[f64]) -> usize {
        let grid = self.f.grid();
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for (k, &v) in self.f.values().iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            let p = grid.node2(k);
            let d2: f64 = x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            let o = v + d2 / (2.0 * self.lambda);
            if o < best {
                best = o;
                arg = k;
            }
        }
        arg
    }

    /// Exact minimizer on the cells adjacent to node `i` of a line with
    /// values `at(i)` and step `h`.
    fn refine_line(&self, x: f64, i: usize, n: usize, axis: &Axis, at: impl Fn(usize) -> f64) -> f64 {
        let h = axis.step();
        let yi = axis.coord(i);
        let fi = at(i);
        if i + 1 < n {
            let s = (at(i + 1) - fi) / h;
            let u = x - self.lambda * s;
            if u > yi {
                return u.min(axis.coord(i + 1));
            }
        }
        if i > 0 {
            let s = (fi - at(i - 1)) / h;
            let u = x - self.lambda * s;
            if u < yi {
                return u.max(axis.coord(i - 1));
            }
        }
        yi
    }

    fn refine_1d(&self, x: f64, k: usize) -> f64 {
        let v = self.f.values();
        self.refine_line(x, k, v.len(), self.f.grid().axis(0), |i| v[i])
    }

    /// Per-axis refinement along the grid lines through the best node; kept
    /// only when it does not worsen the objective.
    fn refine_2d(&self, x: &[f64], k: usize) -> Vec<f64> {
        let grid = self.f.grid();
        let (n0, n1) = grid.shape();
        let (i, j) = grid.unflat(k);
        let v = self.f.values();
        let u0 = self.refine_line(x[0], i, n0, grid.axis(0), |r| v[r * n1 + j]);
        let u1 = self.refine_line(x[1], j, n1, grid.axis(1), |c| v[i * n1 + c]);
        let node = grid.node(k);
        let refined = vec![u0, u1];
        if self.objective(x, &refined) <= self.objective(x, &node) {
            refined
        } else {
            node
        }
    }
}

/// `prox_{lambda f}(x)` with its envelope value and certificate.
pub fn prox(f: &GridFn, lambda: f64, x: &[f64]) -> Result<ProxResult> {
    Proximal::new(f, lambda)?.at(x)
}

/// Lower envelope of the parabolas `v_i + (t - y_i)^2 / (2 lambda)` at the
/// line's own nodes, in `O(n)`. `+inf` entries are skipped; an all-`+inf`
/// line gives `+inf`.
fn envelope_line(axis: &Axis, vals: &[f64], lambda: f64) -> Vec<f64> {
    let n = vals.len();
    let y = |i: usize| axis.coord(i);
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    let mut starts: Vec<f64> = Vec::with_capacity(n);
    let meet = |i: usize, j: usize| -> f64 {
        let (yi, yj) = (y(i), y(j));
        ((vals[j] - vals[i]) * 2.0 * lambda + yj * yj - yi * yi) / (2.0 * (yj - yi))
    };
    for j in (0..n).filter(|&j| vals[j].is_finite()) {
        loop {
            match hull.last() {
                None => {
                    hull.push(j);
                    starts.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&i) => {
                    let s = meet(i, j);
                    if s <= *starts.last().unwrap_or(&f64::NEG_INFINITY) {
                        hull.pop();
                        starts.pop();
                    } else {
                        hull.push(j);
                        starts.push(s);
                        break;
                    }
                }
            }
        }
    }
    if hull.is_empty() {
        return vec![f64::INFINITY; n];
    }
    let mut out = Vec::with_capacity(n);
    let mut p = 0;
    for k in 0..n {
        let t = y(k);
        while p + 1 < hull.len() && starts[p + 1] <= t {
            p += 1;
        }
        let i = hull[p];
        let d = t - y(i);
        out.push(vals[i] + d * d / (2.0 * lambda));
    }
    out
}

/// `e_lambda f` at every node: the minimum over nodes `y` of
/// `f(y) + |x - y|^2 / (2 lambda)`, computed separably along each axis.
pub fn moreau_envelope(f: &GridFn, lambda: f64) -> Result<GridFn> {
    check_lambda(lambda)?;
    require_convex(f, DEFAULT_CONVEXITY_TOL)?;
    let grid = f.grid();
    if grid.dim() == 1 {
        return GridFn::new(grid.clone(), envelope_line(grid.axis(0), f.values(), lambda));
    }
    let (n0, n1) = grid.shape();
    let rows: Vec<Vec<f64>> =
        par::map_range(n0, |i| envelope_line(grid.axis(1), &f.values()[i * n1..(i + 1) * n1], lambda));
    let cols: Vec<Vec<f64>> = par::map_range(n1, |j| {
        let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        envelope_line(grid.axis(0), &column, lambda)
    });
    let mut values = vec![0.0; n0 * n1];
    for (j, c) in cols.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            values[i * n1 + j] = v;
        }
    }
    GridFn::new(grid.clone(), values)
}

/// `|x - prox_f(x) - prox_{f*}(x)|` with `f*` sampled on `dual`.
pub fn moreau_decomposition_residual(f: &GridFn, x: &[f64], dual: &Grid) -> Result<f64> {
    let p = Proximal::new(f, 1.0)?.point(x)?;
    let fstar = conjugate(f, dual)?.dual;
    if !dual.contains(x) {
        return Err(Error::WidenGrid(format!("query {x:?} lies outside the dual grid {dual}")));
    }
    let q = Proximal::new(&fstar, 1.0)?.point(x)?;
    let on_edge = dual.axes().iter().zip(&q).any(|(a, &v)| v <= a.lo || v >= a.hi);
    if on_edge {
        return Err(Error::WidenGrid(format!("prox of the conjugate hit the dual boundary at {q:?}")));
    }
    Ok(x.iter().zip(&p).zip(&q).map(|((a, b), c)| (a - b - c).powi(2)).sum::<f64>().sqrt())
}

/// A nonempty closed box `[lo_1, hi_1] x ... `.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxSet {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxSet {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::DomainEmpty);
        }
        Ok(BoxSet { lo, hi })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

/// Nearest point of the box: a componentwise clamp.
pub fn project(c: &BoxSet, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), found: x.len() });
    }
    Ok(x.iter().zip(c.lo.iter().zip(&c.hi)).map(|(&v, (&a, &b))| v.clamp(a, b)).collect())
}

/// Largest gap between `|.| # i_C` computed on `grid` and the distance to
/// `C = [a, b]` evaluated directly.
pub fn distance_via_infconv_check(a: f64, b: f64, grid: &Grid) -> Result<f64> {
    BoxSet::interval(a, b)?;
    let norm = FnAtom::Abs.sample(grid)?;
    let ind = FnAtom::Indicator { a, b }.sample(grid)?;
    let conv = inf_convolution(&norm, &ind)?;
    let mut worst = 0.0f64;
    for (k, &v) in conv.value.values().iter().enumerate() {
        let x = grid.node(k)[0];
        let d = (a - x).max(x - b).max(0.0);
        worst = worst.max((v - d).abs());
    }
    Ok(worst)
}

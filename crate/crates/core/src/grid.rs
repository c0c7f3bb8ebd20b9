//! Uniform 1-D and 2-D grids and the extended-real functions sampled on them.
//!
//! A [`GridFn`] stands for `f + ι_box`: outside the grid box it is `+inf`.
//! Every transform in the crate works on that truncated object. 2-D data is
//! stored densely in row-major order, the second axis varying fastest.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// Default cap on the number of nodes of a grid.
pub const DEFAULT_NODE_CAP: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidGrid(format!("non-finite bounds {lo}..{hi}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if hi <= lo {
            return Err(Error::InvalidGrid(format!("upper bound {hi} must exceed lower {lo}")));
        }
        Ok(Axis { lo, hi, n })
    }

    #[inline]
    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step()
    }

    /// Offset of the origin in units of the step, when the origin lies on the
    /// axis lattice `lo + k h`, `k` integer (possibly outside `0..n`).
    pub fn origin_offset(&self) -> Option<i64> {
        let h = self.step();
        let k = -self.lo / h;
        let r = k.round();
        if (k - r).abs() <= 1e-7 * (1.0 + k.abs()) {
            Some(r as i64)
        } else {
            None
        }
    }

    /// Index of the node nearest to `x`, clamped to the axis.
    pub fn nearest(&self, x: f64) -> usize {
        let t = ((x - self.lo) / self.step()).round();
        t.clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()));
        x >= self.lo - slack && x <= self.hi + slack
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!("expected lo:hi:count, got `{s}`")));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("bad number `{t}` in `{s}`")))
        };
        let n = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidGrid(format!("bad count `{}` in `{s}`", parts[2])))?;
        Axis::new(num(parts[0])?, num(parts[1])?, n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        Self::with_cap(axes, DEFAULT_NODE_CAP)
    }

    pub fn with_cap(axes: Vec<Axis>, cap: usize) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "grids are 1-D or 2-D, got {} axes",
                axes.len()
            )));
        }
        let nodes = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.n));
        match nodes {
            Some(n) if n <= cap => Ok(Grid { axes }),
            Some(n) => Err(Error::GridTooLarge { nodes: n, cap }),
            None => Err(Error::GridTooLarge { nodes: usize::MAX, cap }),
        }
    }

    /// 1-D grid on `[lo, hi]` with `n` nodes.
    pub fn line(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Grid::new(vec![Axis::new(lo, hi, n)?])
    }

    /// 2-D grid, the product of two axes.
    pub fn plane(a0: Axis, a1: Axis) -> Result<Self> {
        Grid::new(vec![a0, a1])
    }

    /// Square 2-D grid `[lo, hi]^2` with `n` nodes per axis.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let a = Axis::new(lo, hi, n)?;
        Grid::plane(a, a)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    /// Node counts `(n0, n1)`; `n1 = 1` for 1-D grids.
    pub fn shape(&self) -> (usize, usize) {
        match self.axes.as_slice() {
            [a] => (a.n, 1),
            [a, b] => (a.n, b.n),
            _ => unreachable!(),
        }
    }

    pub fn len(&self) -> usize {
        let (a, b) = self.shape();
        a * b
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Smallest step over the axes.
    pub fn min_step(&self) -> f64 {
        self.axes.iter().map(Axis::step).fold(f64::INFINITY, f64::min)
    }

    pub fn max_step(&self) -> f64 {
        self.axes.iter().map(Axis::step).fold(0.0, f64::max)
    }

    #[inline]
    pub fn flat(&self, i: usize, j: usize) -> usize {
        i * self.shape().1 + j
    }

    #[inline]
    pub fn unflat(&self, k: usize) -> (usize, usize) {
        let n1 = self.shape().1;
        (k / n1, k % n1)
    }

    /// Coordinates of node `k`.
    pub fn node(&self, k: usize) -> Vec<f64> {
        match self.axes.as_slice() {
            [a] => vec![a.coord(k)],
            [a, b] => {
                let (i, j) = self.unflat(k);
                vec![a.coord(i), b.coord(j)]
            }
            _ => unreachable!(),
        }
    }

    /// Coordinates of node `k` as a fixed pair; the second entry is 0 in 1-D.
    #[inline]
    pub fn node2(&self, k: usize) -> [f64; 2] {
        match self.axes.as_slice() {
            [a] => [a.coord(k), 0.0],
            [a, b] => {
                let (i, j) = self.unflat(k);
                [a.coord(i), b.coord(j)]
            }
            _ => unreachable!(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.axes.iter().zip(x).all(|(a, &v)| a.contains(v))
    }

    /// Flat index of the node nearest to `x` (clamped into the box).
    pub fn nearest(&self, x: &[f64]) -> Result<usize> {
        self.check_point(x)?;
        Ok(match self.axes.as_slice() {
            [a] => a.nearest(x[0]),
            [a, b] => self.flat(a.nearest(x[0]), b.nearest(x[1])),
            _ => unreachable!(),
        })
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    /// True when node `k` lies on the boundary of the grid box.
    pub fn is_boundary(&self, k: usize) -> bool {
        let (n0, n1) = self.shape();
        let (i, j) = self.unflat(k);
        if self.dim() == 1 {
            i == 0 || i == n0 - 1
        } else {
            i == 0 || i == n0 - 1 || j == 0 || j == n1 - 1
        }
    }

    /// True when every axis is symmetric about 0 with an odd node count, so
    /// the origin is the central node.
    pub fn is_centered(&self) -> bool {
        self.axes.iter().all(|a| {
            a.n % 2 == 1 && (a.lo + a.hi).abs() <= 1e-12 * (a.hi - a.lo)
        })
    }

    /// Flat index of the origin node on a centered grid.
    pub fn center(&self) -> Option<usize> {
        if !self.is_centered() {
            return None;
        }
        let (n0, n1) = self.shape();
        Some(self.flat(n0 / 2, n1 / 2))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axes.as_slice() {
            [a] => write!(f, "{a}"),
            [a, b] => write!(f, "{a}x{b}"),
            _ => unreachable!(),
        }
    }
}

/// Parses `lo:hi:count`, or two such specs joined by `x`.
impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('x').collect();
        let axes = parts
            .iter()
            .map(|p| p.parse::<Axis>())
            .collect::<Result<Vec<_>>>()?;
        Grid::new(axes)
    }
}

/// Extended-real function sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFn {
    /// Wraps node values. `+inf`/`-inf` are allowed, NaN is not.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        if let Some(k) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Domain(format!("NaN value at node {k}")));
        }
        Ok(GridFn { grid, values })
    }

    /// Samples a closure at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(&grid.node(k))).collect();
        GridFn::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn value(&self, k: usize) -> ExtReal {
        ExtReal::finite_or_inf(self.values[k])
    }

    /// At least one finite value and no `-inf`.
    pub fn is_proper(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
            && !self.values.contains(&f64::NEG_INFINITY)
    }

    pub fn ensure_proper(&self) -> Result<()> {
        if let Some(k) = self.values.iter().position(|&v| v == f64::NEG_INFINITY) {
            return Err(Error::Improper(format!("-inf at node {k}")));
        }
        if !self.values.iter().any(|v| v.is_finite()) {
            return Err(Error::DomainEmpty);
        }
        Ok(())
    }

    /// Smallest finite value and its node (smallest index on ties).
    pub fn argmin(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, &v) in self.values.iter().enumerate() {
            if v.is_finite() && best.is_none_or(|(_, b)| v < b) {
                best = Some((k, v));
            }
        }
        best
    }

    /// Largest absolute finite value, 0 when none.
    pub fn finite_scale(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Multilinear interpolation inside the grid box; `+inf` outside the box
    /// or when any contributing corner is `+inf`.
    pub fn interp(&self, x: &[f64]) -> f64 {
        if !self.grid.contains(x) {
            return f64::INFINITY;
        }
        match self.grid.axes() {
            [a] => {
                let (i, t) = bracket(a, x[0]);
                lerp2(self.values[i], self.values[i + 1], t)
            }
            [a, b] => {
                let (i, s) = bracket(a, x[0]);
                let (j, t) = bracket(b, x[1]);
                let g = &self.grid;
                let v00 = self.values[g.flat(i, j)];
                let v01 = self.values[g.flat(i, j + 1)];
                let v10 = self.values[g.flat(i + 1, j)];
                let v11 = self.values[g.flat(i + 1, j + 1)];
                lerp2(lerp2(v00, v01, t), lerp2(v10, v11, t), s)
            }
            _ => unreachable!(),
        }
    }

    /// Applies `op` to every value.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<GridFn> {
        GridFn::new(self.grid.clone(), self.values.iter().map(|&v| op(v)).collect())
    }

    /// Combines two functions on the same grid nodewise.
    pub fn zip_with(&self, other: &GridFn, op: impl Fn(f64, f64) -> f64) -> Result<GridFn> {
        if self.grid != other.grid {
            return Err(Error::Geometry("functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        GridFn::new(self.grid.clone(), values)
    }

    /// Largest |f - g| over nodes where both are finite; `+inf` if their
    /// finite patterns differ.
    pub fn max_abs_diff(&self, other: &GridFn) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| {
                if a.is_finite() && b.is_finite() {
                    (a - b).abs()
                } else if a == b {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Index `i` with `x` in `[x_i, x_{i+1}]` and the fraction `t` along the cell.
fn bracket(a: &Axis, x: f64) -> (usize, f64) {
    let h = a.step();
    let u = ((x - a.lo) / h).clamp(0.0, (a.n - 1) as f64);
    let i = (u.floor() as usize).min(a.n - 2);
    (i, u - i as f64)
}

/// Interpolates between two extended values; a `+inf` endpoint with nonzero
/// weight makes the result `+inf`.
#[inline]
fn lerp2(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else if t == 1.0 {
        b
    } else if a.is_infinite() || b.is_infinite() {
        f64::INFINITY
    } else {
        a + t * (b - a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_coordinates() {
        let g = Grid::line(-1.0, 1.0, 3).unwrap();
        assert_eq!(g.axis(0).step(), 1.0);
        assert_eq!(g.node(0), vec![-1.0]);
        assert_eq!(g.node(2), vec![1.0]);
    }

    #[test]
    fn rejects_degenerate_axes() {
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        assert!(Axis::new(1.0, 1.0, 5).is_err());
        assert!(Axis::new(0.0, f64::INFINITY, 5).is_err());
    }

    #[test]
    fn node_cap_is_enforced() {
        let a = Axis::new(0.0, 1.0, 3000).unwrap();
        assert!(matches!(Grid::plane(a, a), Err(Error::GridTooLarge { .. })));
        assert!(Grid::with_cap(vec![a], 100).is_err());
    }

    #[test]
    fn parses_one_and_two_axes() {
        let g: Grid = "-10:3:2001".parse().unwrap();
        assert_eq!(g.dim(), 1);
        assert_eq!(g.len(), 2001);
        let g: Grid = "-4:4:321x-4:4:321".parse().unwrap();
        assert_eq!(g.shape(), (321, 321));
        assert!(g.is_centered());
        assert_eq!(g.node(g.center().unwrap()), vec![0.0, 0.0]);
        assert!("1:2".parse::<Grid>().is_err());
        assert!("a:2:3".parse::<Grid>().is_err());
    }

    #[test]
    fn row_major_layout() {
        let g = Grid::plane(Axis::new(0.0, 1.0, 2).unwrap(), Axis::new(0.0, 2.0, 3).unwrap())
            .unwrap();
        assert_eq!(g.node(1), vec![0.0, 1.0]);
        assert_eq!(g.node(3), vec![1.0, 0.0]);
        assert_eq!(g.unflat(4), (1, 1));
    }

    #[test]
    fn interpolation_and_truncation() {
        let g = Grid::line(0.0, 2.0, 3).unwrap();
        let f = GridFn::new(g, vec![0.0, 1.0, f64::INFINITY]).unwrap();
        assert_eq!(f.interp(&[0.5]), 0.5);
        assert_eq!(f.interp(&[1.0]), 1.0);
        assert_eq!(f.interp(&[1.5]), f64::INFINITY);
        assert_eq!(f.interp(&[-0.1]), f64::INFINITY);

        let g2 = Grid::square(0.0, 1.0, 2).unwrap();
        let f2 = GridFn::from_fn(g2, |x| x[0] + 2.0 * x[1]).unwrap();
        assert!((f2.interp(&[0.25, 0.5]) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn properness() {
        let g = Grid::line(0.0, 1.0, 2).unwrap();
        let all_inf = GridFn::new(g.clone(), vec![f64::INFINITY; 2]).unwrap();
        assert_eq!(all_inf.ensure_proper(), Err(Error::DomainEmpty));
        let neg = GridFn::new(g.clone(), vec![0.0, f64::NEG_INFINITY]).unwrap();
        assert!(matches!(neg.ensure_proper(), Err(Error::Improper(_))));
        assert!(GridFn::new(g, vec![0.0, f64::NAN]).is_err());
    }
}

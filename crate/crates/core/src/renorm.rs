//! Asplund averaging of two equivalent norms on the plane.
//!
//! Starting from half-squared norms `q0 <= p0 <= (1 + C) q0`, each step sets
//! `p' = (p + q) / 2` and `q'(x) = (p # q)(2x) / 2`. Both sequences are
//! squeezed together geometrically: `q_n <= p_n <= (1 + 4^-n C) q_n`.
//!
//! On a grid, `2x` is evaluated by index doubling, so the window where the
//! pair is defined halves at every step. Outside it `q` is `+inf`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atom::{FnAtom, NormKind};
use crate::convexity::discrete_convexity_check;
use crate::error::{Error, Result};
use crate::extreal::ext_add;
use crate::fenchel::{conjugate, inf_convolution_at};
use crate::grid::{Axis, Grid, GridFn};
use crate::par;

/// Slack on the sandwich bound, in units of the largest grid step.
pub const SANDWICH_SLACK_STEPS: f64 = 10.0;

/// Current iterate `(p_n, q_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormPair {
    p: GridFn,
    q: GridFn,
    n: usize,
    c: f64,
    swapped: bool,
    /// Half-width of the valid window per axis, in nodes.
    half: [usize; 2],
}

/// One line of the iteration log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepReport {
    pub n: usize,
    /// `max p_n / q_n - 1` over nonzero nodes of the window.
    pub r_n: f64,
    /// `4^-n C`.
    pub bound: f64,
    /// Half-widths of the valid window.
    pub region: [f64; 2],
}

fn norm_kind(atom: FnAtom) -> Result<NormKind> {
    match atom {
        FnAtom::Norm { kind } | FnAtom::NormSq { kind } => Ok(kind),
        other => Err(Error::Parameter(format!("`{other}` is not a norm on the plane"))),
    }
}

fn check_centered(grid: &Grid) -> Result<()> {
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: grid.dim() });
    }
    if !grid.is_centered() {
        return Err(Error::Geometry("grid must be symmetric about 0 with odd node counts".into()));
    }
    Ok(())
}

/// Smallest and largest `a / b - 1` over nodes where both are finite and `b > 0`.
fn ratio_range(a: &[f64], b: &[f64]) -> (f64, f64) {
    a.iter().zip(b).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&x, &y)| {
        if x.is_finite() && y.is_finite() && y > 0.0 {
            let r = x / y - 1.0;
            (lo.min(r), hi.max(r))
        } else {
            (lo, hi)
        }
    })
}

/// Half-squared norms of `norm1` and `norm2`, ordered so that `q0 <= p0`.
pub fn init_pair(norm1: FnAtom, norm2: FnAtom, grid: &Grid) -> Result<NormPair> {
    check_centered(grid)?;
    let a = FnAtom::NormSq { kind: norm_kind(norm1)? }.sample(grid)?;
    let b = FnAtom::NormSq { kind: norm_kind(norm2)? }.sample(grid)?;
    let (lo, hi) = ratio_range(a.values(), b.values());
    let eps = 1e-12;
    let (p, q, swapped, c) = if lo >= -eps {
        (a, b, false, hi.max(0.0))
    } else {
        let (lo2, hi2) = ratio_range(b.values(), a.values());
        if lo2 < -eps {
            return Err(Error::Normalization);
        }
        (b, a, true, hi2.max(0.0))
    };
    let (n0, n1) = grid.shape();
    Ok(NormPair { p, q, n: 0, c, swapped, half: [n0 / 2, n1 / 2] })
}

impl NormPair {
    /// Pair from arbitrary sampled functions with a user-supplied constant
    /// `C`. Both must be convex, nonnegative and zero at the origin, with
    /// `q <= p <= (1 + C) q` up to the sandwich slack.
    pub fn from_functions(p: GridFn, q: GridFn, c: f64) -> Result<Self> {
        check_centered(p.grid())?;
        if p.grid() != q.grid() {
            return Err(Error::Geometry("p and q must share a grid".into()));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Parameter(format!("C must be finite and >= 0, got {c}")));
        }
        let origin = p.grid().center().expect("centered grid");
        for f in [&p, &q] {
            if f.values()[origin] != 0.0 || f.values().iter().any(|&v| v < 0.0) {
                return Err(Error::Parameter("both functions must be >= 0 and vanish at the origin".into()));
            }
            let report = discrete_convexity_check(f)?;
            if let Some(node) = report.violation {
                return Err(Error::NonConvex { node });
            }
        }
        let (n0, n1) = p.grid().shape();
        let pair = NormPair { p, q, n: 0, c, swapped: false, half: [n0 / 2, n1 / 2] };
        pair.check_sandwich()?;
        Ok(pair)
    }

    pub fn p(&self) -> &GridFn {
        &self.p
    }

    pub fn q(&self) -> &GridFn {
        &self.q
    }

    pub fn step_count(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The inputs were exchanged to get `q0 <= p0`.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// `4^-n C`.
    pub fn bound(&self) -> f64 {
        self.c * 0.25f64.powi(self.n as i32)
    }

    /// Half-widths of the valid window.
    pub fn region(&self) -> [f64; 2] {
        let g = self.p.grid();
        [self.half[0] as f64 * g.axis(0).step(), self.half[1] as f64 * g.axis(1).step()]
    }

    /// Flat indices of the valid window.
    pub fn window(&self) -> Vec<usize> {
        let g = self.p.grid();
        let (n0, n1) = g.shape();
        let (c0, c1) = (n0 / 2, n1 / 2);
        let mut out = Vec::with_capacity((2 * self.half[0] + 1) * (2 * self.half[1] + 1));
        for i in c0 - self.half[0]..=c0 + self.half[0] {
            for j in c1 - self.half[1]..=c1 + self.half[1] {
                out.push(g.flat(i, j));
            }
        }
        out
    }

    /// `(min, max)` of `p / q - 1` over nonzero nodes of the window.
    pub fn ratio_excess_range(&self) -> (f64, f64) {
        let w = self.window();
        let a: Vec<f64> = w.iter().map(|&k| self.p.values()[k]).collect();
        let b: Vec<f64> = w.iter().map(|&k| self.q.values()[k]).collect();
        let (lo, hi) = ratio_range(&a, &b);
        if lo > hi {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    pub fn report(&self) -> StepReport {
        StepReport { n: self.n, r_n: self.ratio_excess_range().1, bound: self.bound(), region: self.region() }
    }

    fn check_sandwich(&self) -> Result<()> {
        let slack = SANDWICH_SLACK_STEPS * self.p.grid().max_step();
        let (lo, hi) = self.ratio_excess_range();
        let bound = self.bound();
        if hi > bound + slack {
            return Err(Error::Diverged { step: self.n, excess: hi, bound });
        }
        if lo < -slack {
            return Err(Error::Diverged { step: self.n, excess: lo, bound: 0.0 });
        }
        Ok(())
    }

    /// `p` and `q` restricted to the window, on the window's own grid.
    fn cropped(&self) -> Result<(GridFn, GridFn)> {
        let g = self.p.grid();
        let (n0, n1) = g.shape();
        let axis = |k: usize, c: usize, w: usize| {
            let a = g.axis(k);
            Axis::new(a.coord(c - w), a.coord(c + w), 2 * w + 1)
        };
        let sub = Grid::plane(axis(0, n0 / 2, self.half[0])?, axis(1, n1 / 2, self.half[1])?)?;
        let w = self.window();
        let take = |f: &GridFn| GridFn::new(sub.clone(), w.iter().map(|&k| f.values()[k]).collect());
        Ok((take(&self.p)?, take(&self.q)?))
    }
}

/// One averaging step, re-checking the sandwich with constant `4^-(n+1) C`.
pub fn asplund_step(pair: &NormPair) -> Result<NormPair> {
    let half = [pair.half[0] / 2, pair.half[1] / 2];
    if half[0] == 0 || half[1] == 0 {
        return Err(Error::WidenGrid("the valid window has shrunk to a single node".into()));
    }
    let grid = pair.p.grid();
    let (n0, n1) = grid.shape();
    let (c0, c1) = (n0 / 2, n1 / 2);

    let (pv, qv) = (pair.p.values(), pair.q.values());
    let p_next = par::map_range(pv.len(), |k| 0.5 * ext_add(pv[k], qv[k]));

    // In the cropped grid the window centre sits at (w0, w1); node x of the
    // new window maps to 2x there.
    let (pc, qc) = pair.cropped()?;
    let sub_n1 = 2 * pair.half[1] + 1;
    let mut targets = Vec::with_capacity((2 * half[0] + 1) * (2 * half[1] + 1));
    let mut nodes = Vec::with_capacity(targets.capacity());
    for di in -(half[0] as i64)..=half[0] as i64 {
        for dj in -(half[1] as i64)..=half[1] as i64 {
            let si = (pair.half[0] as i64 + 2 * di) as usize;
            let sj = (pair.half[1] as i64 + 2 * dj) as usize;
            targets.push(si * sub_n1 + sj);
            nodes.push(grid.flat((c0 as i64 + di) as usize, (c1 as i64 + dj) as usize));
        }
    }
    let conv = inf_convolution_at(&pc, &qc, &targets)?;

    let mut q_next = vec![f64::INFINITY; grid.len()];
    for (&k, &(v, _)) in nodes.iter().zip(&conv) {
        q_next[k] = 0.5 * v;
    }
    let next = NormPair {
        p: GridFn::new(grid.clone(), p_next)?,
        q: GridFn::new(grid.clone(), q_next)?,
        n: pair.n + 1,
        c: pair.c,
        swapped: pair.swapped,
        half,
    };
    next.check_sandwich()?;
    Ok(next)
}

/// Runs `steps` averaging steps, logging the starting pair and every step.
pub fn asplund_iterate(pair: NormPair, steps: usize) -> Result<(NormPair, Vec<StepReport>)> {
    let mut log = vec![pair.report()];
    let mut cur = pair;
    for _ in 0..steps {
        cur = asplund_step(&cur)?;
        log.push(cur.report());
    }
    Ok((cur, log))
}

/// Residuals of two readings of the conjugate recursion between consecutive
/// pairs, over dual nodes inside the newer window:
/// `averaged = max |q'* - (p* + q*) / 2|` and
/// `literal = max |q'* - (q* + q) / 2|`.
/// Conjugates are taken of the truncated functions, so the numbers only mean
/// something when every supremum is attained inside the window, as for two
/// equal Euclidean norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualRecursion {
    pub averaged: f64,
    pub literal: f64,
}

pub fn dual_recursion_check(prev: &NormPair, next: &NormPair) -> Result<DualRecursion> {
    if prev.p.grid() != next.p.grid() || next.n != prev.n + 1 {
        return Err(Error::Parameter("pairs must be consecutive iterates on one grid".into()));
    }
    let dual = prev.p.grid();
    let ps = conjugate(&prev.p, dual)?.dual;
    let qs = conjugate(&prev.q, dual)?.dual;
    let qn = conjugate(&next.q, dual)?.dual;
    let mut out = DualRecursion { averaged: 0.0, literal: 0.0 };
    for k in next.window() {
        let lhs = qn.values()[k];
        let avg = 0.5 * (ps.values()[k] + qs.values()[k]);
        let lit = 0.5 * (qs.values()[k] + prev.q.values()[k]);
        out.averaged = out.averaged.max((lhs - avg).abs());
        out.literal = out.literal.max((lhs - lit).abs());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictConvexityReport {
    pub samples: usize,
    /// Smallest `(f(a) + f(b)) / 2 - f((a + b) / 2)`.
    pub min_gap: f64,
    /// Smallest gap divided by `|a - b|^2 / 8`, the gap of `|x|^2 / 2`.
    pub min_modulus: f64,
    pub min_pair: ([f64; 2], [f64; 2]),
    /// Pairs with modulus at most `flat_tol`.
    pub flat_pairs: usize,
    pub flat_tol: f64,
    /// No flat pair was found.
    pub strictly_convex: bool,
}

/// Midpoint gaps of `f` over seeded random node pairs `(a, b)` in its finite
/// region that do not lie on a common ray from the origin. Pairs are drawn
/// with even index differences, so the midpoint is itself a node and no
/// interpolation error enters.
pub fn strict_convexity_probe(f: &GridFn, samples: usize, seed: u64, flat_tol: f64) -> Result<StrictConvexityReport> {
    f.ensure_proper()?;
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: f.dim() });
    }
    let grid = f.grid();
    let (n0, n1) = grid.shape();
    let vals = f.values();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(samples);
    let mut attempts = 0usize;
    while pairs.len() < samples && attempts < 100 * samples.max(1) {
        attempts += 1;
        let (ai, aj) = (rng.random_range(0..n0), rng.random_range(0..n1));
        let (bi, bj) = (rng.random_range(0..n0), rng.random_range(0..n1));
        if (ai + bi) % 2 != 0 || (aj + bj) % 2 != 0 {
            continue;
        }
        let (ka, kb) = (grid.flat(ai, aj), grid.flat(bi, bj));
        if ka == kb || !vals[ka].is_finite() || !vals[kb].is_finite() {
            continue;
        }
        let (a, b) = (grid.node2(ka), grid.node2(kb));
        let cross = a[0] * b[1] - a[1] * b[0];
        let same_ray = cross == 0.0 && a[0] * b[0] + a[1] * b[1] >= 0.0;
        if same_ray {
            continue;
        }
        pairs.push((ka, kb, grid.flat((ai + bi) / 2, (aj + bj) / 2)));
    }
    let gaps = par::map_slice(&pairs, |&(ka, kb, km)| {
        let (a, b) = (grid.node2(ka), grid.node2(kb));
        let gap = 0.5 * (vals[ka] + vals[kb]) - vals[km];
        let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
        (gap, gap / (d2 / 8.0))
    });
    let mut report = StrictConvexityReport {
        samples: pairs.len(),
        min_gap: f64::INFINITY,
        min_modulus: f64::INFINITY,
        min_pair: ([0.0; 2], [0.0; 2]),
        flat_pairs: 0,
        flat_tol,
        strictly_convex: true,
    };
    for (&(ka, kb, _), &(gap, modulus)) in pairs.iter().zip(&gaps) {
        report.min_gap = report.min_gap.min(gap);
        if modulus < report.min_modulus {
            report.min_modulus = modulus;
            report.min_pair = (grid.node2(ka), grid.node2(kb));
        }
        if modulus <= flat_tol {
            report.flat_pairs += 1;
        }
    }
    report.strictly_convex = report.flat_pairs == 0 && !pairs.is_empty();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const L1: FnAtom = FnAtom::Norm { kind: NormKind::L1 };
    const L2: FnAtom = FnAtom::Norm { kind: NormKind::L2 };
    const LINF: FnAtom = FnAtom::Norm { kind: NormKind::LInf };

    #[test]
    fn initial_constants() {
        let g = Grid::square(-2.0, 2.0, 41).unwrap();
        let p = init_pair(L1, L2, &g).unwrap();
        assert!((p.c() - 1.0).abs() < 1e-12 && !p.swapped());
        assert_eq!(init_pair(L2, L2, &g).unwrap().c(), 0.0);
        let s = init_pair(LINF, L2, &g).unwrap();
        assert!(s.swapped() && (s.c() - 1.0).abs() < 1e-12);
        assert!(init_pair(L1, L2, &Grid::square(-2.0, 2.0, 40).unwrap()).is_err());
        assert!(init_pair(FnAtom::Abs, L2, &g).is_err());
    }

    #[test]
    fn equal_norms_are_a_fixpoint() {
        let g = Grid::square(-2.0, 2.0, 41).unwrap();
        let p0 = init_pair(L2, L2, &g).unwrap();
        let p1 = asplund_step(&p0).unwrap();
        for k in p1.window() {
            assert!((p1.p().values()[k] - p0.p().values()[k]).abs() < 1e-12);
            assert!((p1.q().values()[k] - p0.q().values()[k]).abs() < 1e-12);
        }
        let d = dual_recursion_check(&p0, &p1).unwrap();
        assert!(d.averaged < 1e-12 && d.literal < 1e-12, "{d:?}");
    }

    #[test]
    fn one_step_contracts_the_ratio() {
        let g = Grid::square(-2.0, 2.0, 81).unwrap();
        let p0 = init_pair(L1, L2, &g).unwrap();
        let p1 = asplund_step(&p0).unwrap();
        let r = p1.report();
        assert!(r.r_n <= 0.25 + 10.0 * 0.05, "{r:?}");
        assert_eq!(r.region, [1.0, 1.0]);
        for k in p1.window() {
            assert!(p1.q().values()[k] >= p0.q().values()[k] - 1e-9);
            assert!(p1.p().values()[k] <= p0.p().values()[k] + 1e-9);
        }
        assert!(discrete_convexity_check(p1.q()).unwrap().convex);
    }

    #[test]
    fn window_exhaustion_is_reported() {
        let g = Grid::square(-1.0, 1.0, 5).unwrap();
        let p = init_pair(L1, L2, &g).unwrap();
        let p = asplund_step(&p).unwrap();
        assert!(matches!(asplund_step(&p), Err(Error::WidenGrid(_))));
    }

    #[test]
    fn from_functions_validates() {
        let g = Grid::square(-1.0, 1.0, 201).unwrap();
        let a = FnAtom::NormSq { kind: NormKind::L1 }.sample(&g).unwrap();
        let b = FnAtom::NormSq { kind: NormKind::L2 }.sample(&g).unwrap();
        assert!(NormPair::from_functions(a.clone(), b.clone(), 1.0).is_ok());
        assert!(matches!(NormPair::from_functions(a.clone(), b.clone(), 0.1), Err(Error::Diverged { .. })));
        let shifted = b.map(|v| v + 1.0).unwrap();
        assert!(NormPair::from_functions(a, shifted, 1.0).is_err());
    }

    #[test]
    fn strict_convexity_examples() {
        let g = Grid::square(-2.0, 2.0, 41).unwrap();
        let probe = |kind| {
            let f = FnAtom::NormSq { kind }.sample(&g).unwrap();
            strict_convexity_probe(&f, 20_000, 7, 1e-9).unwrap()
        };
        let l2 = probe(NormKind::L2);
        assert!(l2.strictly_convex && (l2.min_modulus - 1.0).abs() < 1e-9, "{l2:?}");
        let linf = probe(NormKind::LInf);
        assert!(!linf.strictly_convex && linf.min_gap.abs() < 1e-12);
        let l1 = probe(NormKind::L1);
        assert!(!l1.strictly_convex);
    }
}

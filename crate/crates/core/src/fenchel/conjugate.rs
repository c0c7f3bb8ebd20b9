//! Discrete Legendre–Fenchel transform.
//!
//! `f*(y) = max_x <y, x> - f(x)` over the finite primal nodes. The fast path
//! walks the lower convex hull of `{(x_i, f_i)}` in step with the sorted dual
//! nodes, so a line costs `O(n + m)`. Near-ties are re-evaluated with the
//! same float expression as the exhaustive oracle and resolved toward the
//! smallest primal index, which makes both paths bit-identical.

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid, GridFn};
use crate::par;

/// Sentinel argmax for dual nodes whose line had no finite primal value.
pub const NO_ARGMAX: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateResult {
    /// Values of `f*` on the dual grid.
    pub dual: GridFn,
    /// Flat primal index attaining the max at each dual node.
    pub argmax: Vec<usize>,
}

fn check_inputs(f: &GridFn, dual: &Grid) -> Result<()> {
    f.ensure_proper()?;
    if f.dim() != dual.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: dual.dim() });
    }
    Ok(())
}

/// Linear-time conjugate. 2-D inputs are transformed axis by axis.
pub fn conjugate(f: &GridFn, dual: &Grid) -> Result<ConjugateResult> {
    check_inputs(f, dual)?;
    let pg = f.grid();
    if pg.dim() == 1 {
        let (vals, arg) = conjugate_line(pg.axis(0), f.values(), dual.axis(0));
        return Ok(ConjugateResult { dual: GridFn::new(dual.clone(), vals)?, argmax: arg });
    }

    let (pa0, pa1) = (pg.axis(0), pg.axis(1));
    let (da0, da1) = (dual.axis(0), dual.axis(1));
    let (n0, n1) = pg.shape();
    let m1 = da1.n;

    // Inner transform along the second axis: rows[i] = (f(x0_i, .))*(y1).
    let rows: Vec<(Vec<f64>, Vec<usize>)> = par::map_range(n0, |i| {
        conjugate_line(pa1, &f.values()[i * n1..(i + 1) * n1], da1)
    });

    // Outer transform along the first axis of g(x0, y1) = -rows(x0, y1).
    let cols: Vec<(Vec<f64>, Vec<usize>)> = par::map_range(m1, |l| {
        let column: Vec<f64> = rows.iter().map(|(v, _)| -v[l]).collect();
        conjugate_line(pa0, &column, da0)
    });

    let m0 = da0.n;
    let mut vals = vec![0.0; m0 * m1];
    let mut arg = vec![NO_ARGMAX; m0 * m1];
    for (l, (cv, ci)) in cols.iter().enumerate() {
        for k in 0..m0 {
            vals[k * m1 + l] = cv[k];
            let i = ci[k];
            arg[k * m1 + l] = if i == NO_ARGMAX { NO_ARGMAX } else { i * n1 + rows[i].1[l] };
        }
    }
    Ok(ConjugateResult { dual: GridFn::new(dual.clone(), vals)?, argmax: arg })
}

/// Exhaustive `O(n m)` conjugate; ground truth for [`conjugate`].
///
/// In 2-D the objective is evaluated as `y0 x0 + (y1 x1 - f)`.
pub fn conjugate_oracle(f: &GridFn, dual: &Grid) -> Result<ConjugateResult> {
    check_inputs(f, dual)?;
    let pg = f.grid();
    let fv = f.values();
    let out: Vec<(f64, usize)> = par::map_range(dual.len(), |k| {
        let y = dual.node2(k);
        let mut best = f64::NEG_INFINITY;
        let mut arg = NO_ARGMAX;
        for (i, &fi) in fv.iter().enumerate() {
            if !fi.is_finite() {
                continue;
            }
            let x = pg.node2(i);
            let v = if pg.dim() == 1 { y[0] * x[0] - fi } else { y[0] * x[0] + (y[1] * x[1] - fi) };
            if v > best {
                best = v;
                arg = i;
            }
        }
        (best, arg)
    });
    let (vals, arg): (Vec<f64>, Vec<usize>) = out.into_iter().unzip();
    Ok(ConjugateResult { dual: GridFn::new(dual.clone(), vals)?, argmax: arg })
}

/// `f*(y)` at an arbitrary point by exhaustive search, with its argmax.
pub fn conjugate_at(f: &GridFn, y: &[f64]) -> (f64, usize) {
    let g = f.grid();
    let mut best = f64::NEG_INFINITY;
    let mut arg = NO_ARGMAX;
    for (i, &fi) in f.values().iter().enumerate() {
        if !fi.is_finite() {
            continue;
        }
        let x = g.node2(i);
        let v = if g.dim() == 1 { y[0] * x[0] - fi } else { y[0] * x[0] + (y[1] * x[1] - fi) };
        if v > best {
            best = v;
            arg = i;
        }
    }
    (best, arg)
}

/// One-dimensional transform of the values `f` on `primal` at the nodes of
/// `dual`. Returns values and local argmax indices; a line with no finite
/// value yields `-inf` and [`NO_ARGMAX`].
pub(crate) fn conjugate_line(primal: &Axis, f: &[f64], dual: &Axis) -> (Vec<f64>, Vec<usize>) {
    let m = dual.n;
    let x = |i: usize| primal.coord(i);

    // Strict lower hull: collinear points are dropped.
    let mut hull: Vec<usize> = Vec::new();
    let mut fmax = 0.0f64;
    for (i, &fi) in f.iter().enumerate() {
        if !fi.is_finite() {
            continue;
        }
        fmax = fmax.max(fi.abs());
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // b is dropped unless slope(a, b) < slope(b, i).
            if (f[b] - f[a]) * (x(i) - x(b)) >= (fi - f[b]) * (x(b) - x(a)) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.is_empty() {
        return (vec![f64::NEG_INFINITY; m], vec![NO_ARGMAX; m]);
    }

    let xmax = primal.lo.abs().max(primal.hi.abs());
    let ymax = dual.lo.abs().max(dual.hi.abs());
    let slack = 1e-9 * (1.0 + fmax + xmax * ymax);

    // Points strictly above the hull but within `slack` of it can still win
    // after rounding; remember them per hull edge.
    let edges = hull.len().saturating_sub(1);
    let mut near: Vec<Vec<usize>> = vec![Vec::new(); edges];
    let mut e = 0;
    for (i, &fi) in f.iter().enumerate() {
        if !fi.is_finite() || edges == 0 || i <= hull[0] || i >= hull[edges] {
            continue;
        }
        while hull[e + 1] <= i {
            e += 1;
        }
        if hull[e] == i {
            continue;
        }
        let (a, b) = (hull[e], hull[e + 1]);
        let line = f[a] + (f[b] - f[a]) * (x(i) - x(a)) / (x(b) - x(a));
        if fi - line <= slack {
            near[e].push(i);
        }
    }

    let slope = |k: usize| (f[hull[k + 1]] - f[hull[k]]) / (x(hull[k + 1]) - x(hull[k]));

    let mut vals = Vec::with_capacity(m);
    let mut args = Vec::with_capacity(m);
    let mut p = 0usize;
    for k in 0..m {
        let y = dual.coord(k);
        let val = |i: usize| y * x(i) - f[i];
        while p + 1 < hull.len() && slope(p) < y {
            p += 1;
        }

        let mut best = val(hull[p]);
        let (mut l, mut r) = (p, p);
        while l > 0 && val(hull[l - 1]) >= best - slack {
            l -= 1;
            best = best.max(val(hull[l]));
        }
        while r + 1 < hull.len() && val(hull[r + 1]) >= best - slack {
            r += 1;
            best = best.max(val(hull[r]));
        }

        let mut top = f64::NEG_INFINITY;
        let mut arg = NO_ARGMAX;
        let mut offer = |i: usize| {
            let v = val(i);
            if v > top || (v == top && i < arg) {
                top = v;
                arg = i;
            }
        };
        for &h in &hull[l..=r] {
            offer(h);
        }
        if edges > 0 {
            let first = l.saturating_sub(1);
            let last = r.min(edges - 1);
            for e in first..=last {
                let (a, b) = (hull[e], hull[e + 1]);
                let inside_a = e >= l;
                let inside_b = e < r;
                if inside_a && inside_b {
                    near[e].iter().for_each(|&i| offer(i));
                    continue;
                }
                // Deficit grows linearly away from the in-window endpoint.
                let (va, vb) = (val(a), val(b));
                let deficit = |i: usize| best - (va + (vb - va) * (x(i) - x(a)) / (x(b) - x(a)));
                if inside_b {
                    for &i in near[e].iter().rev() {
                        if deficit(i) > slack {
                            break;
                        }
                        offer(i);
                    }
                } else if inside_a {
                    for &i in near[e].iter() {
                        if deficit(i) > slack {
                            break;
                        }
                        offer(i);
                    }
                }
            }
        }
        vals.push(top);
        args.push(arg);
    }
    (vals, args)
}

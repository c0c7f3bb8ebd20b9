//! Infimal convolution `(f # g)(z) = min_y f(y) + g(z - y)` over grid nodes.

use crate::error::{Error, Result};
use crate::fenchel::conjugate::{conjugate, NO_ARGMAX};
use crate::grid::{Grid, GridFn};
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct InfConvResult {
    pub value: GridFn,
    /// Flat index of the minimizing `y` at each node ([`NO_ARGMAX`] where the
    /// value is `+inf`).
    pub argmin: Vec<usize>,
}

/// Checks that `f` and `g` share a grid whose lattice contains the origin and
/// returns the origin offsets per axis.
fn lattice_offsets(f: &GridFn, g: &GridFn) -> Result<(i64, i64)> {
    f.ensure_proper()?;
    g.ensure_proper()?;
    if f.grid() != g.grid() {
        return Err(Error::Geometry("inf-convolution needs both functions on the same grid".into()));
    }
    let grid = f.grid();
    let off = |k: usize| {
        grid.axis(k).origin_offset().ok_or_else(|| {
            Error::Geometry(format!("axis {} does not have the origin on its lattice", grid.axis(k)))
        })
    };
    let o0 = off(0)?;
    let o1 = if grid.dim() == 2 { off(1)? } else { 0 };
    Ok((o0, o1))
}

/// Exhaustive inf-convolution at every node. Arguments `z - y` that fall off
/// the grid count as `+inf`.
pub fn inf_convolution(f: &GridFn, g: &GridFn) -> Result<InfConvResult> {
    let targets: Vec<usize> = (0..f.len()).collect();
    let out = inf_convolution_at(f, g, &targets)?;
    let (values, argmin): (Vec<f64>, Vec<usize>) = out.into_iter().unzip();
    Ok(InfConvResult { value: GridFn::new(f.grid().clone(), values)?, argmin })
}

/// Inf-convolution value and minimizer at the listed nodes only.
pub(crate) fn inf_convolution_at(
    f: &GridFn,
    g: &GridFn,
    targets: &[usize],
) -> Result<Vec<(f64, usize)>> {
    let (o0, o1) = lattice_offsets(f, g)?;
    let grid = f.grid();
    let (n0, n1) = grid.shape();
    let fv = f.values();
    // Reflecting g makes both operands run forward in the inner loop.
    let gr: Vec<f64> = g.values().iter().rev().copied().collect();
    let range = |a: usize, o: i64, n: usize| -> (i64, i64) {
        let a = a as i64;
        ((a + o - (n as i64 - 1)).max(0), (a + o).min(n as i64 - 1))
    };
    Ok(par::map_slice(targets, |&k| {
        let (a, b) = grid.unflat(k);
        let (i_lo, i_hi) = range(a, o0, n0);
        let (j_lo, j_hi) = range(b, o1, n1);
        let mut best = f64::INFINITY;
        let mut arg = NO_ARGMAX;
        if i_lo > i_hi || j_lo > j_hi {
            return (best, arg);
        }
        let c0 = n0 as i64 - 1 - a as i64 - o0;
        let c1 = n1 as i64 - 1 - b as i64 - o1;
        let width = (j_hi - j_lo + 1) as usize;
        for i in i_lo..=i_hi {
            let fs = i as usize * n1 + j_lo as usize;
            let gs = (i + c0) as usize * n1 + (j_lo + c1) as usize;
            let frow = &fv[fs..fs + width];
            let grow = &gr[gs..gs + width];
            let m = frow.iter().zip(grow).fold(f64::INFINITY, |m, (x, y)| m.min(x + y));
            if m < best {
                best = m;
                let pos = frow.iter().zip(grow).position(|(x, y)| x + y == m).unwrap_or(0);
                arg = fs + pos;
            }
        }
        (best, arg)
    }))
}

/// Largest `|(f # g)* - (f* + g*)|` over dual nodes where all three are
/// finite.
pub fn infconv_dual_check(f: &GridFn, g: &GridFn, dual: &Grid) -> Result<f64> {
    let h = inf_convolution(f, g)?;
    let lhs = conjugate(&h.value, dual)?;
    let cf = conjugate(f, dual)?;
    let cg = conjugate(g, dual)?;
    let mut worst = 0.0f64;
    for k in 0..dual.len() {
        let (a, b, c) = (lhs.dual.values()[k], cf.dual.values()[k], cg.dual.values()[k]);
        if a.is_finite() && b.is_finite() && c.is_finite() {
            worst = worst.max((a - (b + c)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::FnAtom;

    fn point_mass(grid: &Grid) -> GridFn {
        let c = grid.center().unwrap();
        let mut v = vec![f64::INFINITY; grid.len()];
        v[c] = 0.0;
        GridFn::new(grid.clone(), v).unwrap()
    }

    #[test]
    fn figure_one_values() {
        let grid = Grid::line(-2.0, 2.0, 4001).unwrap();
        let f = FnAtom::NegSqrtCircle.sample(&grid).unwrap();
        let g = FnAtom::Abs.sample(&grid).unwrap();
        let r = inf_convolution(&f, &g).unwrap();
        let at = |x: f64| r.value.values()[grid.nearest(&[x]).unwrap()];
        assert!((at(1.0) - (1.0 - 2f64.sqrt())).abs() <= 2e-3);
        assert!((at(0.5) + 0.75f64.sqrt()).abs() <= 2e-3);
    }

    #[test]
    fn point_mass_is_the_identity() {
        let grid = Grid::line(-3.0, 3.0, 61).unwrap();
        let f = FnAtom::Exp.sample(&grid).unwrap();
        let r = inf_convolution(&f, &point_mass(&grid)).unwrap();
        assert_eq!(r.value, f);
        let g2 = Grid::square(-1.0, 1.0, 11).unwrap();
        let f2 = GridFn::from_fn(g2.clone(), |x| x[0] * x[0] + (x[1] - 0.3).abs()).unwrap();
        assert_eq!(inf_convolution(&f2, &point_mass(&g2)).unwrap().value, f2);
    }

    #[test]
    fn off_lattice_origin_is_rejected() {
        let grid = Grid::line(-1.0, 2.0, 4).unwrap();
        let f = FnAtom::Abs.sample(&grid).unwrap();
        assert!(inf_convolution(&f, &f).is_ok());
        let shifted = Grid::line(-0.95, 2.05, 4).unwrap();
        let f = FnAtom::Abs.sample(&shifted).unwrap();
        assert!(matches!(inf_convolution(&f, &f), Err(Error::Geometry(_))));
    }

    #[test]
    fn quadratic_self_convolution_halves() {
        let grid = Grid::line(-6.0, 6.0, 1201).unwrap();
        let f = FnAtom::Power { p: 2.0 }.sample(&grid).unwrap();
        let r = inf_convolution(&f, &f).unwrap();
        for k in (0..grid.len()).step_by(37) {
            let x = grid.node(k)[0];
            if x.abs() <= 3.0 {
                assert!((r.value.values()[k] - x * x / 4.0).abs() < 1e-4, "x = {x}");
            }
        }
    }

    #[test]
    fn dual_identity_examples() {
        let grid = Grid::line(-6.0, 6.0, 1201).unwrap();
        let dual = Grid::line(-2.0, 2.0, 401).unwrap();
        let q = FnAtom::Power { p: 2.0 }.sample(&grid).unwrap();
        assert!(infconv_dual_check(&q, &q, &dual).unwrap() <= 1e-3);
        let a = FnAtom::Abs.sample(&grid).unwrap();
        let ind = FnAtom::Indicator { a: -1.0, b: 1.0 }.sample(&grid).unwrap();
        // Slopes beyond 1 would see the truncated tails of |x|.
        let inner = Grid::line(-1.0, 1.0, 201).unwrap();
        assert!(infconv_dual_check(&a, &ind, &inner).unwrap() <= 1e-3);
        assert!(infconv_dual_check(&q, &point_mass(&grid), &dual).unwrap() <= 1e-12);
    }

    #[test]
    fn argmin_realizes_the_value() {
        let grid = Grid::line(-2.0, 2.0, 41).unwrap();
        let f = FnAtom::Abs.sample(&grid).unwrap();
        let g = FnAtom::Power { p: 2.0 }.sample(&grid).unwrap();
        let r = inf_convolution(&f, &g).unwrap();
        for k in 0..grid.len() {
            let y = r.argmin[k];
            let z = grid.node(k)[0] - grid.node(y)[0];
            let v = f.values()[y] + z * z / 2.0;
            assert!((v - r.value.values()[k]).abs() < 1e-12);
        }
    }
}

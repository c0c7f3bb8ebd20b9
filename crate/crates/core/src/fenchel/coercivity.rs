//! Coercivity diagnostics on the grid: linear growth away from the minimizer
//! and boundedness of sublevel sets.

use serde::Serialize;

use crate::error::Result;
use crate::grid::GridFn;

/// Number of levels in the sublevel-set scan `min f + k / LEVELS`.
pub const LEVELS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoercivityReport {
    /// `min over boundary b of (f(b) - min f) / |b - argmin|`.
    pub growth: f64,
    /// No scanned sublevel set reaches the grid boundary.
    pub bounded_level_sets: bool,
    /// Scanned levels and whether each touched the boundary.
    pub levels: Vec<(f64, bool)>,
    pub argmin: usize,
    pub coercive: bool,
}

pub fn coercivity_check(f: &GridFn) -> Result<CoercivityReport> {
    f.ensure_proper()?;
    let grid = f.grid();
    let vals = f.values();
    let (argmin, fmin) = f.argmin().ok_or(crate::error::Error::DomainEmpty)?;
    let center = grid.node(argmin);

    let mut growth = f64::INFINITY;
    let mut boundary_min = f64::INFINITY;
    for k in (0..f.len()).filter(|&k| grid.is_boundary(k)) {
        boundary_min = boundary_min.min(vals[k]);
        if k == argmin {
            growth = 0.0;
            continue;
        }
        let dist = grid.node(k).iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        growth = growth.min((vals[k] - fmin) / dist);
    }

    let levels: Vec<(f64, bool)> = (1..=LEVELS)
        .map(|k| {
            let c = fmin + k as f64 / LEVELS as f64;
            (c, boundary_min <= c)
        })
        .collect();
    let bounded = levels.iter().all(|&(_, touches)| !touches);
    Ok(CoercivityReport {
        growth,
        bounded_level_sets: bounded,
        coercive: growth > 0.0 && bounded,
        levels,
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::FnAtom;
    use crate::grid::Grid;

    #[test]
    fn quadratic_is_coercive() {
        let g = Grid::line(-5.0, 5.0, 101).unwrap();
        let r = coercivity_check(&FnAtom::Power { p: 2.0 }.sample(&g).unwrap()).unwrap();
        assert!((r.growth - 2.5).abs() < 1e-12);
        assert!(r.bounded_level_sets && r.coercive);
    }

    #[test]
    fn constant_is_not() {
        let g = Grid::line(-5.0, 5.0, 101).unwrap();
        let r = coercivity_check(&FnAtom::Constant { c: 0.0 }.sample(&g).unwrap()).unwrap();
        assert_eq!(r.growth, 0.0);
        assert!(!r.bounded_level_sets && !r.coercive);
    }

    #[test]
    fn exponential_fails_through_its_left_tail() {
        let g = Grid::line(-10.0, 10.0, 201).unwrap();
        let r = coercivity_check(&FnAtom::Exp.sample(&g).unwrap()).unwrap();
        assert_eq!(r.growth, 0.0);
        assert!(!r.coercive);
    }

    #[test]
    fn indicator_boundary_counts_as_infinite_growth() {
        let g = Grid::square(-2.0, 2.0, 21).unwrap();
        let f = FnAtom::Ball { kind: crate::atom::NormKind::L2 }.sample(&g).unwrap();
        let r = coercivity_check(&f).unwrap();
        assert_eq!(r.growth, f64::INFINITY);
        assert!(r.coercive);
    }
}

//! Sampled operator graphs in `R^d`, `d <= 2`: monotonicity, Fitzpatrick
//! functions, and resolvents and Yosida approximations of subdifferentials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFn;
use crate::moreau::Proximal;
use crate::par;

/// Finite graph `{(x, x*)}` of an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorGraph {
    dim: usize,
    pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl OperatorGraph {
    pub fn new(dim: usize, pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Parameter(format!("graph dimension must be 1 or 2, got {dim}")));
        }
        if pairs.is_empty() {
            return Err(Error::EmptyGraph);
        }
        for (x, xs) in &pairs {
            if x.len() != dim || xs.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: x.len().max(xs.len()) });
            }
            if x.iter().chain(xs).any(|v| !v.is_finite()) {
                return Err(Error::Parameter("graph entries must be finite".into()));
            }
        }
        Ok(OperatorGraph { dim, pairs })
    }

    /// Graph of a single-valued map sampled at `points`.
    pub fn from_map(dim: usize, points: &[Vec<f64>], map: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        Self::new(dim, points.iter().map(|x| (x.clone(), map(x))).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: OperatorGraph = serde_json::from_str(text)?;
        Self::new(raw.dim, raw.pairs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[(Vec<f64>, Vec<f64>)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `max |x| * max |x*|`, the magnitude of the inner products involved.
    pub fn scale(&self) -> f64 {
        let mx = self.pairs.iter().map(|(x, _)| norm(x)).fold(0.0, f64::max);
        let ms = self.pairs.iter().map(|(_, s)| norm(s)).fold(0.0, f64::max);
        mx * ms
    }

    /// Default tolerance `1e-8 (1 + scale)`.
    pub fn default_tol(&self) -> f64 {
        1e-8 * (1.0 + self.scale())
    }

    fn check_query(&self, x: &[f64], xs: &[f64]) -> Result<()> {
        if x.len() != self.dim || xs.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len().max(xs.len()) });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub monotone: bool,
    /// First pair `(i, j)`, `i < j` in lexicographic order, with
    /// `<x_i - x_j, x*_i - x*_j> < -tol`.
    pub violation: Option<(usize, usize)>,
    pub tol: f64,
}

/// Exhaustive pairwise check, `O(k^2)`.
pub fn is_monotone(g: &OperatorGraph, tol: Option<f64>) -> MonotoneReport {
    let tol = tol.unwrap_or_else(|| g.default_tol());
    let p = &g.pairs;
    let violation = par::find_first(p.len(), |i| {
        let (xi, si) = &p[i];
        (i + 1..p.len())
            .find(|&j| {
                let (xj, sj) = &p[j];
                let d: f64 = (0..g.dim).map(|c| (xi[c] - xj[c]) * (si[c] - sj[c])).sum();
                d < -tol
            })
            .map(|j| (i, j))
    });
    MonotoneReport { monotone: violation.is_none(), violation, tol }
}

/// Whether `(x, x*)` has nonnegative product (within `-tol`) against every
/// stored pair.
pub fn monotonically_related(g: &OperatorGraph, x: &[f64], xs: &[f64], tol: Option<f64>) -> Result<bool> {
    g.check_query(x, xs)?;
    let tol = tol.unwrap_or_else(|| g.default_tol());
    Ok(g.pairs.iter().all(|(a, s)| {
        let d: f64 = (0..g.dim).map(|c| (x[c] - a[c]) * (xs[c] - s[c])).sum();
        d >= -tol
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitzpatrickEval {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
    pub value: f64,
    /// Stored pair attaining the supremum (smallest index on ties).
    pub index: usize,
}

/// `F(x, x*) = max over stored (a, a*) of <x, a*> + <a, x*> - <a, a*>`.
pub fn fitzpatrick(g: &OperatorGraph, x: &[f64], xs: &[f64]) -> Result<FitzpatrickEval> {
    g.check_query(x, xs)?;
    let mut value = f64::NEG_INFINITY;
    let mut index = 0;
    for (k, (a, s)) in g.pairs.iter().enumerate() {
        let v = dot(x, s) + dot(a, xs) - dot(a, s);
        if v > value {
            value = v;
            index = k;
        }
    }
    Ok(FitzpatrickEval { x: x.to_vec(), xstar: xs.to_vec(), value, index })
}

/// `(x, y)` with `x = J_{lambda A}(z)`, `y = A_lambda(z)` for `A = df`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolvent {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: f64,
    /// Fenchel–Young gap certifying `y` in the `eps`-subdifferential at `x`.
    pub certificate_eps: f64,
}

pub fn resolvent(f: &GridFn, lambda: f64, z: &[f64]) -> Result<Resolvent> {
    let r = Proximal::new(f, lambda)?.at(z)?;
    let y = z.iter().zip(&r.point).map(|(a, b)| (a - b) / lambda).collect();
    Ok(Resolvent { z: z.to_vec(), x: r.point, y, lambda, certificate_eps: r.certificate_eps })
}

/// `(z - prox_{lambda f}(z)) / lambda`.
pub fn yosida(f: &GridFn, lambda: f64, z: &[f64]) -> Result<Vec<f64>> {
    let p = Proximal::new(f, lambda)?.point(z)?;
    Ok(z.iter().zip(&p).map(|(a, b)| (a - b) / lambda).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeEntry {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `|x + y - z|`.
    pub residual: f64,
    pub certificate_eps: f64,
    /// The solution sits on the grid boundary, where truncation adds normal
    /// directions; a wider grid is needed to trust it.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurjectivityReport {
    pub entries: Vec<ProbeEntry>,
    pub max_residual: f64,
    pub max_certificate: f64,
    /// Every target solved with residual and certificate within `tol`, away
    /// from the boundary.
    pub all_solved: bool,
    pub tol: f64,
}

/// Solves `z in x + df(x)` for each target through the resolvent.
pub fn surjectivity_probe(f: &GridFn, targets: &[Vec<f64>], tol: f64) -> Result<SurjectivityReport> {
    let prox = Proximal::new(f, 1.0)?;
    let grid = f.grid();
    let entries = targets
        .iter()
        .map(|z| {
            let r = prox.at(z)?;
            let y: Vec<f64> = z.iter().zip(&r.point).map(|(a, b)| a - b).collect();
            let residual = norm(&r.point.iter().zip(&y).zip(z).map(|((a, b), c)| a + b - c).collect::<Vec<_>>());
            let boundary = grid.axes().iter().zip(&r.point).any(|(a, &u)| u <= a.lo || u >= a.hi);
            Ok(ProbeEntry { z: z.clone(), x: r.point, y, residual, certificate_eps: r.certificate_eps, boundary })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    let max_certificate = entries.iter().map(|e| e.certificate_eps).fold(0.0, f64::max);
    let all_solved = entries.iter().all(|e| e.residual <= tol && e.certificate_eps <= tol && !e.boundary);
    Ok(SurjectivityReport { entries, max_residual, max_certificate, all_solved, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::FnAtom;
    use crate::grid::Grid;

    fn samples(lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| vec![lo + (hi - lo) * i as f64 / (n - 1) as f64]).collect()
    }

    fn identity(n: usize) -> OperatorGraph {
        OperatorGraph::from_map(1, &samples(-1.0, 1.0, n), |x| x.to_vec()).unwrap()
    }

    fn abs_subdifferential() -> OperatorGraph {
        let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = samples(-1.0, 1.0, 101)
            .into_iter()
            .filter(|x| x[0] != 0.0)
            .map(|x| {
                let s = x[0].signum();
                (x, vec![s])
            })
            .collect();
        pairs.extend(samples(-1.0, 1.0, 21).into_iter().map(|s| (vec![0.0], s)));
        OperatorGraph::new(1, pairs).unwrap()
    }

    #[test]
    fn monotonicity_examples() {
        assert!(is_monotone(&identity(101), None).monotone);
        let neg = OperatorGraph::from_map(1, &samples(-1.0, 1.0, 101), |x| vec![-x[0]]).unwrap();
        assert_eq!(is_monotone(&neg, None).violation, Some((0, 1)));
        assert!(is_monotone(&abs_subdifferential(), None).monotone);
    }

    #[test]
    fn related_examples() {
        let g = identity(101);
        assert!(monotonically_related(&g, &[0.0], &[0.0], None).unwrap());
        assert!(monotonically_related(&g, &[2.0], &[5.0], None).unwrap());
        assert!(!monotonically_related(&g, &[0.0], &[1.0], None).unwrap());
    }

    #[test]
    fn fitzpatrick_examples() {
        let g = OperatorGraph::from_map(1, &samples(-2.0, 2.0, 401), |x| x.to_vec()).unwrap();
        assert!((fitzpatrick(&g, &[1.0], &[1.0]).unwrap().value - 1.0).abs() < 1e-12);
        let off = fitzpatrick(&g, &[1.0], &[-1.0]).unwrap();
        assert!(off.value.abs() < 1e-12 && off.value > -1.0);
        let single = OperatorGraph::new(1, vec![(vec![0.0], vec![0.0])]).unwrap();
        assert_eq!(fitzpatrick(&single, &[3.0], &[-7.0]).unwrap().value, 0.0);
    }

    #[test]
    fn graph_validation_and_json() {
        assert_eq!(OperatorGraph::new(1, vec![]), Err(Error::EmptyGraph));
        assert!(OperatorGraph::new(1, vec![(vec![0.0, 1.0], vec![0.0])]).is_err());
        let g = OperatorGraph::from_json(r#"{"dim":2,"pairs":[[[0,1],[1,0]],[[1,1],[2,2]]]}"#).unwrap();
        assert_eq!(g.len(), 2);
        assert!(OperatorGraph::from_json(r#"{"dim":1,"pairs":[]}"#).is_err());
    }

    #[test]
    fn resolvent_examples() {
        let grid = Grid::line(-4.0, 4.0, 801);
        let grid = grid.unwrap();
        let q = FnAtom::Power { p: 2.0 }.sample(&grid).unwrap();
        let r = resolvent(&q, 1.0, &[2.0]).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-9 && (r.y[0] - 1.0).abs() < 1e-9);
        let ind = FnAtom::Indicator { a: -1.0, b: 1.0 }.sample(&grid).unwrap();
        let r = resolvent(&ind, 1.0, &[3.0]).unwrap();
        assert_eq!((r.x[0], r.y[0]), (1.0, 2.0));
        let abs = FnAtom::Abs.sample(&grid).unwrap();
        let r = resolvent(&abs, 1.0, &[0.0]).unwrap();
        assert_eq!((r.x[0], r.y[0]), (0.0, 0.0));
        assert_eq!(yosida(&abs, 1.0, &[0.5]).unwrap(), vec![0.5]);
        assert!((yosida(&abs, 1.0, &[3.0]).unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn surjectivity_examples() {
        let grid = Grid::line(-4.0, 4.0, 801).unwrap();
        let abs = FnAtom::Abs.sample(&grid).unwrap();
        let targets: Vec<Vec<f64>> = [-3.0, -0.5, 0.0, 0.5, 3.0].iter().map(|&z| vec![z]).collect();
        let r = surjectivity_probe(&abs, &targets, 1e-9).unwrap();
        assert!(r.all_solved, "{r:?}");
        let pm = FnAtom::Indicator { a: 0.0, b: 0.0 }.sample(&grid).unwrap();
        let r = surjectivity_probe(&pm, &[vec![2.5]], 1e-9).unwrap();
        assert_eq!(r.entries[0].x, vec![0.0]);
        assert_eq!(r.entries[0].y, vec![2.5]);
        assert!(r.all_solved);
    }
}

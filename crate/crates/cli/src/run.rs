//! Job execution: maps each task onto the library and writes its outputs.

use std::path::Path;

use convan::fenchel::{
    biconjugate, conjugate, conjugate_at, covering_dual_grid, fenchel_duality_gap, inf_convolution,
    infconv_dual_check, LinearMap,
};
use convan::io::{ext_value, gridfn_to_csv, gridfn_to_json, read_gridfn, to_json_string, write_atomic};
use convan::monotone::{fitzpatrick, is_monotone, resolvent, surjectivity_probe, yosida, OperatorGraph};
use convan::moreau::{moreau_envelope, project, Proximal};
use convan::renorm::{asplund_step, init_pair, strict_convexity_probe};
use convan::special::{
    ball_volume, beta_quadrature, convexity_probe, gamma, gamma_limit, ln_gamma, log_concavity_check,
    parse_rational, pn_ie, pn_integral, pn_perm, rational_to_f64, volume_real, CouponInput,
};
use convan::{discrete_convexity_check, Error, GridFn, Result};
use serde_json::{json, Map, Value};

use crate::job::{CouponForm, FnSource, GraphMap, GraphSource, JobSpec, Task, VolumeDim};

/// Default tolerance of the surjectivity probe and the fixpoint check.
pub const DEFAULT_TOL: f64 = 1e-6;

/// JSON for a float that may be infinite.
fn num(v: f64) -> Value {
    ext_value(v)
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub(crate) fn load(src: &FnSource) -> Result<GridFn> {
    match src {
        FnSource::Atom { atom, grid } => atom.sample(grid),
        FnSource::File(path) => read_gridfn(path),
    }
}

fn describe(src: &FnSource) -> Value {
    match src {
        FnSource::Atom { atom, grid } => {
            json!({"atom": atom.tag(), "params": nums(&atom.params()), "grid": grid.to_string()})
        }
        FnSource::File(path) => json!({"file": path.display().to_string()}),
    }
}

/// Writes a grid function as grid-function JSON for `.json` paths, CSV
/// otherwise.
pub(crate) fn write_gridfn(path: &Path, f: &GridFn) -> Result<()> {
    let text = if path.extension().is_some_and(|e| e == "json") { gridfn_to_json(f) } else { gridfn_to_csv(f) };
    write_atomic(path, &text)
}

fn summary(f: &GridFn) -> Value {
    let finite: Vec<f64> = f.values().iter().copied().filter(|v| v.is_finite()).collect();
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmin = f.argmin().map(|(k, _)| nums(&f.grid().node(k)));
    json!({
        "grid": f.grid().to_string(),
        "finite_nodes": finite.len(),
        "min": num(min),
        "max": num(max),
        "argmin": argmin.unwrap_or(Value::Null),
    })
}

/// Emits the report: to `--report` when given, else to stdout.
pub(crate) fn emit(job: &JobSpec, body: Map<String, Value>) -> Result<()> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(1));
    m.insert("command".into(), json!(job.kind.name()));
    m.extend(body);
    let text = to_json_string(&Value::Object(m));
    match &job.report {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

macro_rules! to_value {
    ($v:expr) => {
        serde_json::to_value($v).unwrap_or(Value::Null)
    };
}

/// Runs a validated job and returns its report body.
pub fn execute(job: &JobSpec) -> Result<Map<String, Value>> {
    let tol = job.tol;
    Ok(match &job.task {
        Task::Conjugate { f, dual, at, out } => {
            let fun = load(f)?;
            let dual = match dual {
                Some(d) => d.clone(),
                None => covering_dual_grid(&fun)?,
            };
            let res = conjugate(&fun, &dual)?;
            if let Some(path) = out {
                write_gridfn(path, &res.dual)?;
            }
            let values = at
                .iter()
                .map(|y| {
                    if y.len() != fun.dim() {
                        return Err(Error::DimensionMismatch { expected: fun.dim(), found: y.len() });
                    }
                    let (v, k) = conjugate_at(&fun, y);
                    let argmax = if v.is_finite() { nums(&fun.grid().node(k)) } else { Value::Null };
                    Ok(json!({"y": nums(y), "value": num(v), "argmax": argmax}))
                })
                .collect::<Result<Vec<_>>>()?;
            obj(json!({
                "input": describe(f),
                "dual_grid": dual.to_string(),
                "conjugate": summary(&res.dual),
                "at": values,
            }))
        }
        Task::Biconjugate { f, dual, out } => {
            let fun = load(f)?;
            let dual = match dual {
                Some(d) => d.clone(),
                None => covering_dual_grid(&fun)?,
            };
            let bi = biconjugate(&fun, &dual)?;
            if let Some(path) = out {
                write_gridfn(path, &bi)?;
            }
            let tol = tol.unwrap_or(DEFAULT_TOL);
            let mut max_diff = 0.0f64;
            let mut drops = 0usize;
            for (&a, &b) in fun.values().iter().zip(bi.values()) {
                if a.is_finite() {
                    max_diff = max_diff.max((a - b).abs());
                    if b < a - tol {
                        drops += 1;
                    }
                }
            }
            obj(json!({
                "input": describe(f),
                "dual_grid": dual.to_string(),
                "max_abs_diff": num(max_diff),
                "strict_drops": drops,
                "fixpoint": max_diff <= tol,
                "tol": tol,
                "convex": discrete_convexity_check(&fun)?.convex,
            }))
        }
        Task::Infconv { f, g, dual, out } => {
            let (ff, gg) = (load(f)?, load(g)?);
            let res = inf_convolution(&ff, &gg)?;
            if let Some(path) = out {
                write_gridfn(path, &res.value)?;
            }
            let check = match dual {
                Some(d) => json!({"dual_grid": d.to_string(), "discrepancy": num(infconv_dual_check(&ff, &gg, d)?)}),
                None => Value::Null,
            };
            obj(json!({"f": describe(f), "g": describe(g), "infconv": summary(&res.value), "dual_check": check}))
        }
        Task::Envelope { f, lambda, out } => {
            let fun = load(f)?;
            let env = moreau_envelope(&fun, *lambda)?;
            if let Some(path) = out {
                write_gridfn(path, &env)?;
            }
            obj(json!({"input": describe(f), "lambda": lambda, "envelope": summary(&env)}))
        }
        Task::Prox { f, lambda, at } => {
            let fun = load(f)?;
            let prox = Proximal::new(&fun, *lambda)?;
            let results = at.iter().map(|x| prox.at(x).map(|r| to_value!(&r))).collect::<Result<Vec<_>>>()?;
            obj(json!({"input": describe(f), "lambda": lambda, "results": results}))
        }
        Task::Project { set, at } => {
            let results = at
                .iter()
                .map(|x| project(set, x).map(|p| json!({"x": nums(x), "projection": nums(&p)})))
                .collect::<Result<Vec<_>>>()?;
            obj(json!({"box": to_value!(set), "results": results}))
        }
        Task::Fitzpatrick { graph, at } => {
            let (g, described) = match graph {
                GraphSource::File(path) => {
                    (OperatorGraph::from_json(&std::fs::read_to_string(path)?)?, json!({"file": path.display().to_string()}))
                }
                GraphSource::Map { map, grid } => {
                    let g = sample_map(*map, grid)?;
                    (g, json!({"map": format!("{map:?}").to_lowercase(), "grid": grid.to_string()}))
                }
            };
            let report = is_monotone(&g, tol);
            let evals = at
                .iter()
                .map(|(x, xs)| {
                    let e = fitzpatrick(&g, x, xs)?;
                    let pairing: f64 = x.iter().zip(xs).map(|(a, b)| a * b).sum();
                    Ok(json!({
                        "x": nums(x),
                        "xstar": nums(xs),
                        "value": num(e.value),
                        "pairing": num(pairing),
                        "excess": num(e.value - pairing),
                        "index": e.index,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            obj(json!({"graph": described, "points": g.len(), "monotone": to_value!(&report), "evaluations": evals}))
        }
        Task::Resolvent { f, lambda, at, targets } => {
            let fun = load(f)?;
            let results = at
                .iter()
                .map(|z| {
                    let r = resolvent(&fun, *lambda, z)?;
                    let y = yosida(&fun, *lambda, z)?;
                    let mut v = to_value!(&r);
                    if let Value::Object(m) = &mut v {
                        m.insert("yosida".into(), nums(&y));
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            let probe = if *targets > 0 {
                let zs = probe_targets(&fun, *targets);
                to_value!(&surjectivity_probe(&fun, &zs, tol.unwrap_or(DEFAULT_TOL))?)
            } else {
                Value::Null
            };
            obj(json!({"input": describe(f), "lambda": lambda, "results": results, "probe": probe}))
        }
        Task::Renorm { norms, grid, steps, dump, probe_samples, seed } => {
            let mut pair = init_pair(norms[0], norms[1], grid)?;
            if let Some(dir) = dump {
                std::fs::create_dir_all(dir)?;
            }
            let mut log = Vec::with_capacity(steps + 1);
            loop {
                let n = pair.step_count();
                if let Some(dir) = dump {
                    write_gridfn(&dir.join(format!("p_{n}.csv")), pair.p())?;
                    write_gridfn(&dir.join(format!("q_{n}.csv")), pair.q())?;
                }
                let r = pair.report();
                log.push(json!({"n": r.n, "r_n": num(r.r_n), "bound": num(r.bound), "region": nums(&r.region)}));
                if n == *steps {
                    break;
                }
                pair = asplund_step(&pair)?;
            }
            let probe = if *probe_samples > 0 {
                to_value!(&strict_convexity_probe(pair.p(), *probe_samples, *seed, tol.unwrap_or(DEFAULT_TOL))?)
            } else {
                Value::Null
            };
            obj(json!({
                "norms": [nums(&norms[0].params()), nums(&norms[1].params())],
                "grid": grid.to_string(),
                "c": num(pair.c()),
                "swapped": pair.swapped(),
                "steps": log,
                "strict_convexity": probe,
            }))
        }
        Task::Coupon { x, n, forms, probe_trials, seed } => coupon(x.as_deref(), *n, forms, *probe_trials, *seed)?,
        Task::Volume { dim, p, compare } => {
            let (value, alpha) = match *dim {
                VolumeDim::Integer(n) => (ball_volume(n, *p)?, n as f64),
                VolumeDim::Real(a) => (volume_real(a, *p)?, a),
            };
            let cmp = match compare {
                Some((q, lambda)) => to_value!(&log_concavity_check(alpha, *p, *q, *lambda)?),
                None => Value::Null,
            };
            obj(json!({"alpha": alpha, "p": num(*p), "volume": num(value), "log_concavity": cmp}))
        }
        Task::Gamma { x, terms, beta } => {
            let limit = gamma_limit(*x, *terms)?;
            let ratio = gamma_limit(x + 1.0, *terms)? / (x * limit);
            let beta = match beta {
                Some(y) => {
                    let b = beta_quadrature(*x, *y)?;
                    let identity = b * gamma(x + y) - gamma(*x) * gamma(*y);
                    json!({"y": y, "beta": num(b), "identity_residual": num(identity)})
                }
                None => Value::Null,
            };
            obj(json!({
                "x": x,
                "terms": terms,
                "gamma": num(gamma(*x)),
                "ln_gamma": num(ln_gamma(*x)),
                "gamma_limit": num(limit),
                "recursion_ratio": num(ratio),
                "beta": beta,
            }))
        }
        Task::Duality { f, g, map, dual } => {
            let (ff, gg) = (load(f)?, load(g)?);
            let t = match map {
                Some(entries) => {
                    let cols = ff.dim();
                    if entries.len() % cols != 0 {
                        return Err(Error::Parameter(format!("{} map entries do not fill {cols} columns", entries.len())));
                    }
                    LinearMap::new(entries.len() / cols, cols, entries)?
                }
                None => LinearMap::identity(ff.dim())?,
            };
            let dual = match dual {
                Some(d) => d.clone(),
                None => covering_dual_grid(&gg)?,
            };
            let gap = fenchel_duality_gap(&ff, &gg, &t, &dual)?;
            obj(json!({
                "f": describe(f),
                "g": describe(g),
                "dual_grid": dual.to_string(),
                "primal": num(gap.primal),
                "dual": num(gap.dual),
                "gap": num(gap.gap),
                "truncated": gap.truncated,
            }))
        }
        Task::SelfTest(kind) => crate::selftest::run(*kind)?,
    })
}

/// Evenly spaced targets over the middle half of the grid box (per axis for
/// planar grids, `count` per axis).
fn probe_targets(f: &GridFn, count: usize) -> Vec<Vec<f64>> {
    let line = |k: usize| -> Vec<f64> {
        let a = f.grid().axis(k);
        let (mid, half) = ((a.lo + a.hi) / 2.0, (a.hi - a.lo) / 4.0);
        (0..count)
            .map(|i| if count == 1 { mid } else { mid - half + 2.0 * half * i as f64 / (count - 1) as f64 })
            .collect()
    };
    if f.dim() == 1 {
        line(0).into_iter().map(|v| vec![v]).collect()
    } else {
        let (l0, l1) = (line(0), line(1));
        l0.iter().flat_map(|&a| l1.iter().map(move |&b| vec![a, b])).collect()
    }
}

pub(crate) fn sample_map(map: GraphMap, grid: &convan::Grid) -> Result<OperatorGraph> {
    let points: Vec<Vec<f64>> = (0..grid.len()).map(|k| grid.node(k)).collect();
    match map {
        GraphMap::Identity => OperatorGraph::from_map(grid.dim(), &points, |x| x.to_vec()),
        GraphMap::Negation => OperatorGraph::from_map(grid.dim(), &points, |x| x.iter().map(|v| -v).collect()),
        GraphMap::Rotation => {
            if grid.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: grid.dim() });
            }
            OperatorGraph::from_map(2, &points, |x| vec![-x[1], x[0]])
        }
        GraphMap::Sign => {
            if grid.dim() != 1 {
                return Err(Error::DimensionMismatch { expected: 1, found: grid.dim() });
            }
            let mut pairs = Vec::new();
            for p in points {
                if p[0] == 0.0 {
                    pairs.extend([-1.0, -0.5, 0.0, 0.5, 1.0].map(|s| (vec![0.0], vec![s])));
                } else {
                    pairs.push((p.clone(), vec![p[0].signum()]));
                }
            }
            OperatorGraph::new(1, pairs)
        }
    }
}

fn coupon(x: Option<&[String]>, n: Option<usize>, forms: &[CouponForm], trials: usize, seed: u64) -> Result<Map<String, Value>> {
    let mut body = Map::new();
    let wants = |f: CouponForm| forms.contains(&f) || forms.contains(&CouponForm::All);
    if let Some(x) = x {
        let exact = x.iter().map(|t| parse_rational(t)).collect::<Result<Vec<_>>>()?;
        let floats: Vec<f64> = exact.iter().map(rational_to_f64).collect();
        let input = CouponInput::new(floats.clone())?;
        let mut values = Map::new();
        if wants(CouponForm::Perm) {
            values.insert("perm".into(), num(pn_perm(&input)?));
        }
        if wants(CouponForm::Ie) {
            values.insert("ie".into(), num(pn_ie(&input)?));
        }
        if wants(CouponForm::Integral) {
            values.insert("integral".into(), num(pn_integral(&input)?));
        }
        let finite: Vec<f64> = values.values().filter_map(Value::as_f64).collect();
        let spread = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - finite.iter().copied().fold(f64::INFINITY, f64::min);
        body.insert("n".into(), json!(x.len()));
        body.insert("x".into(), nums(&floats));
        body.insert("values".into(), Value::Object(values));
        body.insert("spread".into(), if finite.is_empty() { Value::Null } else { num(spread) });
        if wants(CouponForm::Exact) {
            let input = CouponInput::new(exact)?;
            let ie = pn_ie(&input)?;
            let perm = pn_perm(&input).ok();
            body.insert(
                "exact".into(),
                json!({
                    "ie": ie.to_string(),
                    "perm": perm.as_ref().map(|p| p.to_string()),
                    "equal": perm.as_ref().map(|p| *p == ie),
                    "value": num(rational_to_f64(&ie)),
                }),
            );
        }
    }
    if trials > 0 {
        let n = n.ok_or_else(|| Error::Parameter("the convexity probe needs N".into()))?;
        body.insert("probe".into(), to_value!(&convexity_probe(n, trials, seed)?));
    }
    Ok(body)
}

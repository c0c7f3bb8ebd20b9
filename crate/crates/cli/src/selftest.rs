//! Golden examples behind `--selftest`, one set per subcommand.

use std::f64::consts::PI;

use convan::fenchel::{biconjugate, conjugate, conjugate_oracle, covering_dual_grid, fenchel_duality_gap, inf_convolution, LinearMap};
use convan::monotone::{fitzpatrick, is_monotone, resolvent, yosida};
use convan::moreau::{distance_via_infconv_check, moreau_envelope, project, prox, BoxSet};
use convan::renorm::{asplund_step, init_pair};
use convan::special::{
    ball_volume, beta_quadrature, gamma, gamma_limit, parse_rational, pn_ie, pn_integral, pn_perm, CouponInput,
};
use convan::{FnAtom, Grid, NormKind, Result};
use serde_json::{json, Map, Value};

use crate::job::{GraphMap, Kind};
use crate::run::sample_map;

struct Case {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn case(name: &'static str, pass: bool, detail: impl Into<String>) -> Case {
    Case { name, pass, detail: detail.into() }
}

fn within(name: &'static str, got: f64, want: f64, tol: f64) -> Case {
    let err = (got - want).abs();
    case(name, err <= tol, format!("got {got:.12e}, want {want:.12e}, |err| {err:.3e} <= {tol:.1e}"))
}

fn line(lo: f64, hi: f64, n: usize) -> Result<Grid> {
    Grid::line(lo, hi, n)
}

fn cases(kind: Kind) -> Result<Vec<Case>> {
    Ok(match kind {
        Kind::Conjugate => {
            let exp = FnAtom::Exp.sample(&line(-10.0, 3.0, 2001)?)?;
            let star = conjugate(&exp, &line(-1.0, 5.0, 601)?)?.dual;
            let k = star.grid().nearest(&[1.0])?;
            let sq = FnAtom::Power { p: 2.0 }.sample(&line(-4.0, 4.0, 801)?)?;
            let sq_star = conjugate(&sq, &line(-2.0, 2.0, 401)?)?.dual;
            let self_dual = sq_star
                .values()
                .iter()
                .enumerate()
                .map(|(k, v)| (v - sq_star.grid().node(k)[0].powi(2) / 2.0).abs())
                .fold(0.0, f64::max);
            let abs = FnAtom::Abs.sample(&line(-2.0, 2.0, 41)?)?;
            let abs_star = conjugate(&abs, &line(-1.5, 1.5, 31)?)?.dual;
            let support_ok = abs_star.values().iter().enumerate().all(|(k, &v)| {
                let y = abs_star.grid().node(k)[0];
                if y.abs() <= 1.0 {
                    v.abs() < 1e-12
                } else {
                    v > 0.0
                }
            });
            let wiggle = FnAtom::DoubleWell.sample(&line(-3.0, 3.0, 61)?)?;
            let dual = line(-2.0, 2.0, 57)?;
            let fast = conjugate(&wiggle, &dual)?;
            let slow = conjugate_oracle(&wiggle, &dual)?;
            vec![
                within("exp conjugate at 1 is -1", star.values()[k], -1.0, 1e-3),
                case("x^2/2 is self-conjugate", self_dual <= 1e-12, format!("max error {self_dual:.3e}")),
                case("|x| conjugates to the indicator of [-1, 1]", support_ok, "0 inside, positive outside"),
                case("fast transform equals the exhaustive one", fast == slow, "bit-identical"),
            ]
        }
        Kind::Biconjugate => {
            let abs = FnAtom::Abs.sample(&line(-2.0, 2.0, 81)?)?;
            let bi = biconjugate(&abs, &covering_dual_grid(&abs)?)?;
            let err = bi.max_abs_diff(&abs);
            let well = FnAtom::DoubleWell.sample(&line(-2.0, 2.0, 81)?)?;
            let bw = biconjugate(&well, &covering_dual_grid(&well)?)?;
            let k0 = well.grid().nearest(&[0.0])?;
            vec![
                case("|x| is its own biconjugate", err <= 1e-12, format!("max error {err:.3e}")),
                within("double well convexifies to 0 at the origin", bw.values()[k0], 0.0, 1e-12),
            ]
        }
        Kind::Infconv => {
            let grid = line(-4.0, 4.0, 801)?;
            let dist = distance_via_infconv_check(-1.0, 1.0, &grid)?;
            let abs = FnAtom::Abs.sample(&grid)?;
            let sq = FnAtom::Power { p: 2.0 }.sample(&grid)?;
            let huber = inf_convolution(&abs, &sq)?.value;
            let k = grid.nearest(&[2.0])?;
            vec![
                case("|x| # indicator of [-1, 1] is the distance", dist <= 1e-12, format!("max error {dist:.3e}")),
                within("|x| # x^2/2 at 2 is 1.5", huber.values()[k], 1.5, 1e-12),
            ]
        }
        Kind::Envelope => {
            let grid = line(-3.0, 3.0, 601)?;
            let env = moreau_envelope(&FnAtom::Abs.sample(&grid)?, 1.0)?;
            let huber = |x: f64| if x.abs() <= 1.0 { x * x / 2.0 } else { x.abs() - 0.5 };
            let err = env
                .values()
                .iter()
                .enumerate()
                .map(|(k, v)| (v - huber(grid.node(k)[0])).abs())
                .fold(0.0, f64::max);
            let ind = moreau_envelope(&FnAtom::Indicator { a: -1.0, b: 1.0 }.sample(&grid)?, 1.0)?;
            let k = grid.nearest(&[2.0])?;
            vec![
                case("envelope of |x| is the Huber function", err <= 1e-6, format!("max error {err:.3e}")),
                within("envelope of an indicator is half the squared distance", ind.values()[k], 0.5, 1e-12),
            ]
        }
        Kind::Prox => {
            let grid = line(-4.0, 4.0, 801)?;
            let abs = FnAtom::Abs.sample(&grid)?;
            let sq = FnAtom::Power { p: 2.0 }.sample(&grid)?;
            vec![
                within("prox of |x| at 2 shrinks to 1", prox(&abs, 1.0, &[2.0])?.point[0], 1.0, 1e-12),
                within("prox of |x| at 0.5 is 0", prox(&abs, 1.0, &[0.5])?.point[0], 0.0, 1e-12),
                within("prox of x^2/2 at 3 halves it", prox(&sq, 1.0, &[3.0])?.point[0], 1.5, 1e-9),
            ]
        }
        Kind::Project => {
            let b = BoxSet::new(vec![-1.0, 0.0], vec![1.0, 2.0])?;
            vec![
                case("inside points stay", project(&b, &[0.5, 1.0])? == vec![0.5, 1.0], "[0.5, 1]"),
                case("outside points clamp", project(&b, &[3.0, -1.0])? == vec![1.0, 0.0], "[3, -1] -> [1, 0]"),
            ]
        }
        Kind::Fitzpatrick => {
            let grid = line(-2.0, 2.0, 257)?;
            let id = sample_map(GraphMap::Identity, &grid)?;
            let on = fitzpatrick(&id, &[0.5], &[0.5])?;
            let off = fitzpatrick(&id, &[1.0], &[-1.0])?;
            let neg = sample_map(GraphMap::Negation, &grid)?;
            vec![
                within("identity graph is tight on the graph", on.value, 0.25, 1e-12),
                within("identity graph off the graph is (x + x*)^2 / 4", off.value, 0.0, 1e-12),
                case("negation is not monotone", !is_monotone(&neg, None).monotone, "violation found"),
                case("identity is monotone", is_monotone(&id, None).monotone, "no violation"),
            ]
        }
        Kind::Resolvent => {
            let abs = FnAtom::Abs.sample(&line(-4.0, 4.0, 801)?)?;
            let r = resolvent(&abs, 1.0, &[3.0])?;
            vec![
                within("resolvent of d|x| at 3 is 2", r.x[0], 2.0, 1e-12),
                within("Yosida approximation at 3 is 1", yosida(&abs, 1.0, &[3.0])?[0], 1.0, 1e-12),
                case("certificate is tiny", r.certificate_eps <= 1e-9, format!("{:.3e}", r.certificate_eps)),
            ]
        }
        Kind::Renorm => {
            let grid = Grid::square(-2.0, 2.0, 81)?;
            let l2 = FnAtom::NormSq { kind: NormKind::L2 };
            let same = init_pair(l2, l2, &grid)?;
            let mixed = init_pair(FnAtom::NormSq { kind: NormKind::L1 }, l2, &grid)?;
            let next = asplund_step(&mixed)?;
            let (r0, r1) = (mixed.report().r_n, next.report().r_n);
            vec![
                within("equal norms start with C = 0", same.c(), 0.0, 1e-12),
                within("l1 against l2 starts with C = 1", mixed.c(), 1.0, 1e-12),
                case("one step contracts the ratio", r1 <= r0 / 4.0 + 10.0 * 0.05, format!("{r0:.4} -> {r1:.4}")),
            ]
        }
        Kind::Coupon => {
            let x = CouponInput::new(vec![1.0, 2.0, 3.0])?;
            let (perm, ie, int) = (pn_perm(&x)?, pn_ie(&x)?, pn_integral(&x)?);
            let ones = CouponInput::new(vec![parse_rational("1")?; 3])?;
            let spread = perm.max(ie).max(int) - perm.min(ie).min(int);
            vec![
                case("three forms agree at (1, 2, 3)", spread <= 1e-8, format!("spread {spread:.3e}")),
                case("N = 3 unit rates give 11/6", pn_ie(&ones)? == parse_rational("11/6")?, "exact"),
                case("exact forms agree", pn_perm(&ones)? == pn_ie(&ones)?, "exact"),
            ]
        }
        Kind::Volume => vec![
            within("V_2(2) = pi", ball_volume(2, 2.0)?, PI, 1e-12),
            within("V_3(2) = 4 pi / 3", ball_volume(3, 2.0)?, 4.0 * PI / 3.0, 1e-12),
            case("V_5(inf) = 32", ball_volume(5, f64::INFINITY)? == 32.0, "exact"),
            within("V_2(1) = 2", ball_volume(2, 1.0)?, 2.0, 1e-12),
        ],
        Kind::Gamma => {
            let b = beta_quadrature(2.0, 3.0)?;
            vec![
                within("Gauss product at 1/2 approaches sqrt(pi)", gamma_limit(0.5, 1_000_000)?, PI.sqrt(), 1e-5),
                within("Gamma(5) = 24", gamma(5.0), 24.0, 1e-10),
                within("B(2, 3) = 1/12", b, 1.0 / 12.0, 1e-12),
            ]
        }
        Kind::Duality => {
            let grid = line(-4.0, 4.0, 801)?;
            let f = FnAtom::Abs.sample(&grid)?;
            let g = convan::GridFn::from_fn(grid.clone(), |x| (x[0] - 2.0).powi(2) / 2.0)?;
            let gap = fenchel_duality_gap(&f, &g, &LinearMap::identity(1)?, &line(-8.0, 8.0, 1601)?)?;
            vec![
                case("weak duality holds", gap.gap >= -1e-9, format!("gap {:.3e}", gap.gap)),
                case("no gap under the qualification", gap.gap <= 1e-6, format!("gap {:.3e}", gap.gap)),
                within("primal value is 1.5", gap.primal, 1.5, 1e-12),
            ]
        }
    })
}

/// Runs the cases of `kind`, prints one line each to stderr and returns the
/// report body with pass/fail counts.
pub fn run(kind: Kind) -> Result<Map<String, Value>> {
    let cases = cases(kind)?;
    let passed = cases.iter().filter(|c| c.pass).count();
    let failed = cases.len() - passed;
    for c in &cases {
        eprintln!("{} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    eprintln!("selftest {}: {passed} passed, {failed} failed", kind.name());
    let list: Vec<Value> =
        cases.iter().map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail})).collect();
    let mut m = Map::new();
    m.insert("selftest".into(), json!(true));
    m.insert("cases".into(), Value::Array(list));
    m.insert("passed".into(), json!(passed));
    m.insert("failed".into(), json!(failed));
    Ok(m)
}

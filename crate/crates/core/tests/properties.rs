use convan::atom::{FnAtom, NormKind};
use convan::convexity::discrete_convexity_check;
use convan::extreal::{ext_add, ExtReal};
use convan::fenchel::{
    biconjugate, conjugate, conjugate_oracle, covering_dual_grid, fenchel_duality_gap, inf_convolution, LinearMap,
};
use convan::grid::{Grid, GridFn};
use convan::monotone::{fitzpatrick, is_monotone, resolvent, yosida, OperatorGraph};
use convan::moreau::{moreau_envelope, prox};
use convan::renorm::{asplund_step, init_pair, NormPair};
use convan::special::{
    ball_volume, gamma_limit, log_concavity_check, pn_ie, pn_integral, pn_perm, CouponInput,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn ext() -> impl Strategy<Value = f64> {
    prop_oneof![4 => (-1000i32..1000).prop_map(f64::from), 1 => Just(f64::INFINITY)]
}

/// Proper values with some `+inf` entries.
fn proper_values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    (proptest::collection::vec(prop_oneof![5 => -5.0..5.0f64, 1 => Just(f64::INFINITY)], len), 0..len).prop_map(
        |(mut v, k)| {
            if v[k].is_infinite() {
                v[k] = 0.0;
            }
            v
        },
    )
}

/// Random convex function `a|x - c| + b (x - d)^2 + e x` on `[-2, 2]`,
/// optionally cut to an interval.
fn convex_1d(n: usize) -> impl Strategy<Value = GridFn> {
    (0.0..2.0f64, -1.0..1.0f64, 0.0..2.0f64, -1.0..1.0f64, -1.0..1.0f64, any::<bool>()).prop_map(
        move |(a, c, b, d, e, cut)| {
            let g = Grid::line(-2.0, 2.0, n).unwrap();
            GridFn::from_fn(g, |x| {
                let t = x[0];
                if cut && t.abs() > 1.0 {
                    f64::INFINITY
                } else {
                    a * (t - c).abs() + b * (t - d).powi(2) + e * t
                }
            })
            .unwrap()
        },
    )
}

fn convex_atoms() -> Vec<FnAtom> {
    vec![
        FnAtom::Abs,
        FnAtom::Power { p: 1.5 },
        FnAtom::Power { p: 2.0 },
        FnAtom::Power { p: 3.0 },
        FnAtom::Exp,
        FnAtom::Indicator { a: -1.0, b: 0.5 },
        FnAtom::Distance { a: -0.5, b: 1.0 },
        FnAtom::Support { a: -1.0, b: 2.0 },
        FnAtom::SqrtOnePlusSq,
        FnAtom::XLogX,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extreal_addition_is_associative(a in ext(), b in ext(), c in ext()) {
        let (a, b, c) = (ExtReal::new(a).unwrap(), ExtReal::new(b).unwrap(), ExtReal::new(c).unwrap());
        prop_assert_eq!((a + b) + c, a + (b + c));
    }

    #[test]
    fn opposite_infinities_add_to_plus_infinity(v in -10.0..10.0f64) {
        prop_assert_eq!(ext_add(f64::INFINITY, f64::NEG_INFINITY), f64::INFINITY);
        prop_assert_eq!(ExtReal::NEG_INFINITY + ExtReal::INFINITY, ExtReal::INFINITY);
        prop_assert_eq!(ext_add(v, f64::NEG_INFINITY), f64::NEG_INFINITY);
    }

    #[test]
    fn sampling_matches_direct_evaluation(lo in -4.0..-0.5f64, hi in 0.5..4.0f64, n in 2usize..200, k in 0usize..10) {
        let atom = convex_atoms()[k];
        let g = Grid::line(lo, hi, n).unwrap();
        let f = atom.sample(&g).unwrap();
        for i in 0..n {
            prop_assert_eq!(f.values()[i].to_bits(), atom.eval_raw(&g.node(i)).to_bits());
        }
    }

    #[test]
    fn convex_atoms_pass_the_convexity_check(lo in -4.0..-1.5f64, hi in 1.5..4.0f64, n in 3usize..300) {
        let g = Grid::line(lo, hi, n).unwrap();
        for atom in [FnAtom::Abs, FnAtom::Power { p: 1.5 }, FnAtom::Power { p: 4.0 }, FnAtom::Exp,
                     FnAtom::Indicator { a: -1.0, b: 1.0 }, FnAtom::Distance { a: -0.5, b: 0.5 }] {
            prop_assert!(discrete_convexity_check(&atom.sample(&g).unwrap()).unwrap().convex, "{}", atom);
        }
    }

    #[test]
    fn fast_conjugate_matches_the_oracle_1d(n in 1usize..=64, m in 1usize..=64, v in proper_values(64),
                                            lo in -3.0..0.0f64, w in 0.1..5.0f64) {
        let n = n.max(2);
        let m = m.max(2);
        let g = Grid::line(lo, lo + w, n).unwrap();
        let f = GridFn::new(g, v[..n].to_vec());
        prop_assume!(f.as_ref().map(|f| f.is_proper()).unwrap_or(false));
        let f = f.unwrap();
        let dual = Grid::line(-4.0, 3.0, m).unwrap();
        prop_assert_eq!(conjugate(&f, &dual).unwrap(), conjugate_oracle(&f, &dual).unwrap());
    }

    #[test]
    fn fast_conjugate_matches_the_oracle_2d(n0 in 2usize..=8, n1 in 2usize..=8, v in proper_values(64),
                                            m0 in 2usize..=8, m1 in 2usize..=8) {
        let g = Grid::plane(convan::Axis::new(-1.0, 2.0, n0).unwrap(), convan::Axis::new(-2.0, 1.5, n1).unwrap()).unwrap();
        let f = GridFn::new(g, v[..n0 * n1].to_vec());
        prop_assume!(f.as_ref().map(|f| f.is_proper()).unwrap_or(false));
        let f = f.unwrap();
        let dual = Grid::plane(convan::Axis::new(-3.0, 3.0, m0).unwrap(), convan::Axis::new(-1.0, 4.0, m1).unwrap()).unwrap();
        prop_assert_eq!(conjugate(&f, &dual).unwrap(), conjugate_oracle(&f, &dual).unwrap());
    }

    #[test]
    fn conjugation_reverses_order(v in proper_values(40), bump in proptest::collection::vec(0.0..3.0f64, 40)) {
        let g = Grid::line(-2.0, 2.0, 40).unwrap();
        let lower = GridFn::new(g.clone(), v.clone()).unwrap();
        let upper = GridFn::new(g, v.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
        let dual = Grid::line(-5.0, 5.0, 77).unwrap();
        let (cl, cu) = (conjugate(&lower, &dual).unwrap().dual, conjugate(&upper, &dual).unwrap().dual);
        for (a, b) in cu.values().iter().zip(cl.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn fenchel_young_and_convex_conjugates(v in proper_values(50)) {
        let g = Grid::line(-3.0, 3.0, 50).unwrap();
        let f = GridFn::new(g.clone(), v).unwrap();
        let dual = Grid::line(-4.0, 4.0, 61).unwrap();
        let c = conjugate(&f, &dual).unwrap().dual;
        for i in 0..g.len() {
            for j in 0..dual.len() {
                let gap = ext_add(f.values()[i], c.values()[j]) - g.node(i)[0] * dual.node(j)[0];
                prop_assert!(gap >= -1e-12);
            }
        }
        prop_assert!(discrete_convexity_check(&c).unwrap().convex);
    }

    #[test]
    fn biconjugate_lies_below(v in proper_values(60)) {
        let g = Grid::line(-2.0, 2.0, 60).unwrap();
        let f = GridFn::new(g, v).unwrap();
        let ff = biconjugate(&f, &Grid::line(-30.0, 30.0, 301).unwrap()).unwrap();
        for (a, b) in ff.values().iter().zip(f.values()) {
            prop_assert!(*a <= b + 1e-12);
        }
    }

    #[test]
    fn convex_inputs_are_fixpoints(f in convex_1d(201)) {
        let ff = biconjugate(&f, &covering_dual_grid(&f).unwrap()).unwrap();
        for (a, b) in ff.values().iter().zip(f.values()) {
            if b.is_finite() {
                prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn inf_convolution_preserves_convexity(f in convex_1d(81), g in convex_1d(81)) {
        let h = inf_convolution(&f, &g).unwrap().value;
        prop_assert!(discrete_convexity_check(&h).unwrap().convex);
    }

    #[test]
    fn weak_duality(f in convex_1d(61), g in convex_1d(61), t in -2.0..2.0f64) {
        let map = LinearMap::new(1, 1, &[t]).unwrap();
        let r = fenchel_duality_gap(&f, &g, &map, &Grid::line(-6.0, 6.0, 121).unwrap()).unwrap();
        prop_assert!(r.gap >= -1e-9, "{:?}", r);
    }

    #[test]
    fn prox_is_firmly_nonexpansive(f in convex_1d(101), x in -2.0..2.0f64, y in -2.0..2.0f64, lambda in 0.1..3.0f64) {
        let (px, py) = (prox(&f, lambda, &[x]).unwrap().point[0], prox(&f, lambda, &[y]).unwrap().point[0]);
        let dp = px - py;
        prop_assert!(dp * dp <= dp * (x - y) + 1e-12);
        prop_assert!(dp.abs() <= (x - y).abs() + 1e-12);
    }

    #[test]
    fn envelope_decreases_in_lambda(f in convex_1d(81), l1 in 0.1..2.0f64, extra in 0.0..2.0f64) {
        let a = moreau_envelope(&f, l1).unwrap();
        let b = moreau_envelope(&f, l1 + extra).unwrap();
        for (x, y) in b.values().iter().zip(a.values()) {
            prop_assert!(x.is_finite() && y.is_finite());
            prop_assert!(*x <= y + 1e-12);
        }
    }

    #[test]
    fn resolvent_round_trip_and_firmness(f in convex_1d(101), z1 in -2.0..2.0f64, z2 in -2.0..2.0f64, lambda in 0.2..2.0f64) {
        let (r1, r2) = (resolvent(&f, lambda, &[z1]).unwrap(), resolvent(&f, lambda, &[z2]).unwrap());
        for r in [&r1, &r2] {
            prop_assert!((r.x[0] + lambda * r.y[0] - r.z[0]).abs() <= 1e-14 * (1.0 + r.z[0].abs()));
            prop_assert_eq!(&yosida(&f, lambda, &r.z).unwrap(), &r.y);
        }
        let dx = r1.x[0] - r2.x[0];
        prop_assert!(dx * dx <= dx * (z1 - z2) + 1e-12);
    }

    #[test]
    fn sampled_gradients_are_monotone(k in 0usize..5, n in 2usize..80) {
        let grads: [fn(f64) -> f64; 5] = [f64::signum, |x| x, |x| x * x.abs(), f64::exp, |x| x.powi(3) + 2.0 * x];
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![-2.0 + 4.0 * i as f64 / (n - 1) as f64]).collect();
        let g = OperatorGraph::from_map(1, &pts, |x| vec![grads[k](x[0])]).unwrap();
        prop_assert!(is_monotone(&g, None).monotone);
        for (x, xs) in g.pairs() {
            let v = fitzpatrick(&g, x, xs).unwrap().value;
            prop_assert!((v - x[0] * xs[0]).abs() <= g.default_tol());
        }
        let dec = OperatorGraph::from_map(1, &pts, |x| vec![-x[0] - x[0].powi(3)]).unwrap();
        prop_assert!(!is_monotone(&dec, None).monotone);
    }

    #[test]
    fn fitzpatrick_is_tight_on_planar_graphs(a in 0.0..2.0f64, b in -1.0..1.0f64, c in 0.0..2.0f64, skew in -2.0..2.0f64) {
        // x -> M x with a positive semidefinite symmetric part
        let m = [[a + b.abs(), b + skew], [b - skew, c + b.abs()]];
        let pts: Vec<Vec<f64>> = (0..15 * 15).map(|k| vec![-1.0 + (k / 15) as f64 / 7.0, -1.0 + (k % 15) as f64 / 7.0]).collect();
        let g = OperatorGraph::from_map(2, &pts, |x| vec![m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]]).unwrap();
        prop_assert!(is_monotone(&g, None).monotone);
        for (x, xs) in g.pairs().iter().step_by(7) {
            let v = fitzpatrick(&g, x, xs).unwrap().value;
            let ip = x[0] * xs[0] + x[1] * xs[1];
            prop_assert!(v >= ip - g.default_tol() && v <= ip + g.default_tol(), "{} vs {}", v, ip);
        }
    }

    #[test]
    fn coupon_forms_are_symmetric_and_decreasing(x in proptest::collection::vec(0.2..5.0f64, 2..6), seed in any::<u64>()) {
        let base = pn_ie(&CouponInput::new(x.clone()).unwrap()).unwrap();
        let mut y = x.clone();
        let r = (seed as usize) % y.len();
        y.rotate_left(r);
        let last = y.len() - 1;
        y.swap(0, last);
        let inp = CouponInput::new(y.clone()).unwrap();
        prop_assert!((pn_ie(&inp).unwrap() - base).abs() <= 1e-12 * base);
        prop_assert!((pn_perm(&inp).unwrap() - base).abs() <= 1e-10 * base);
        prop_assert!((pn_integral(&inp).unwrap() - base).abs() <= 1e-8 * base.max(1.0));
        prop_assert!(base > 0.0);
        for i in 0..x.len() {
            let mut up = x.clone();
            up[i] *= 1.01;
            prop_assert!(pn_ie(&CouponInput::new(up).unwrap()).unwrap() < base);
        }
    }

    #[test]
    fn coupon_forms_agree_exactly_in_rationals(v in proptest::collection::vec((1i64..50, 1i64..20), 1..=6)) {
        let x: Vec<BigRational> = v.iter().map(|&(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b))).collect();
        let inp = CouponInput::new(x).unwrap();
        prop_assert_eq!(pn_perm(&inp).unwrap(), pn_ie(&inp).unwrap());
    }

    #[test]
    fn ball_volume_is_log_concave_in_the_reciprocal_exponent(alpha in 1.1..10.0f64, p in 1.05..20.0f64,
                                                            q in 1.05..20.0f64, lambda in 0.05..0.95f64) {
        prop_assume!((p - q).abs() > 1e-3);
        let r = log_concavity_check(alpha, p, q, lambda).unwrap();
        prop_assert!(r.holds && !r.degenerate, "{:?}", r);
        prop_assert!(ball_volume(alpha.ceil() as u32, p).unwrap() > 0.0);
    }
}

#[test]
fn gamma_recursion_ratio_tends_to_x() {
    for x in [0.3, 0.5, 1.5, 2.5, 4.0] {
        let errs: Vec<f64> = [10u64, 1000, 100_000]
            .iter()
            .map(|&n| (gamma_limit(x + 1.0, n).unwrap() / gamma_limit(x, n).unwrap() - x).abs())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "x = {x}: {errs:?}");
        assert!(errs[2] < 1e-4 * (1.0 + x));
    }
}

#[test]
fn envelope_stays_finite_on_indicators() {
    let g = Grid::line(-3.0, 3.0, 121).unwrap();
    let f = FnAtom::Indicator { a: -0.5, b: 0.25 }.sample(&g).unwrap();
    let e = moreau_envelope(&f, 0.7).unwrap();
    assert!(e.values().iter().all(|v| v.is_finite()));
}

fn renorm_run(a: NormKind, b: NormKind, steps: usize) -> Vec<NormPair> {
    let g = Grid::square(-2.0, 2.0, 81).unwrap();
    let mut out = vec![init_pair(FnAtom::Norm { kind: a }, FnAtom::Norm { kind: b }, &g).unwrap()];
    for _ in 0..steps {
        let next = asplund_step(out.last().unwrap()).unwrap();
        out.push(next);
    }
    out
}

#[test]
fn averaging_invariants() {
    let h = 0.05;
    for (a, b) in [(NormKind::L1, NormKind::L2), (NormKind::LInf, NormKind::L2), (NormKind::L1, NormKind::LInf)] {
        let run = renorm_run(a, b, 4);
        for w in run.windows(2) {
            let (prev, next) = (&w[0], &w[1]);
            let (rp, rn) = (prev.ratio_excess_range().1, next.ratio_excess_range().1);
            assert!(rn <= rp / 4.0 + 10.0 * h, "{a:?}/{b:?}: {rp} -> {rn}");
            for k in next.window() {
                assert!(next.q().values()[k] >= prev.q().values()[k] - 1e-9);
                assert!(next.p().values()[k] <= prev.p().values()[k] + 1e-9);
            }
        }
        for pair in &run {
            assert!(discrete_convexity_check(pair.p()).unwrap().convex);
            assert!(discrete_convexity_check(pair.q()).unwrap().convex);
            let v = pair.p().values();
            let n = v.len();
            for k in 0..n {
                assert!((v[k] - v[n - 1 - k]).abs() <= 1e-12 || (v[k].is_infinite() && v[n - 1 - k].is_infinite()));
            }
        }
    }
}

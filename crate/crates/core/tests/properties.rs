use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shiftinv_core::analysis::{
    adjoint_spec, build_partition, check_l, check_r, decide, eta_limits, eta_limits_by_iteration, eta_values,
    reduce_to_fixed, OperatorSpec, Region, Tolerances, Truth,
};
use shiftinv_core::circle::{circle_dist, compute_periodic_structure, Shift, StructureOptions};
use shiftinv_core::expr::{differentiate, find_zeros, parse, BinaryOp, Expr, UnaryOp};
use shiftinv_core::fixtures::{default_space, extras, random_periodic_coeff, random_smooth_expr, suite, S1};
use shiftinv_core::indices::{associate_indices, space_indices, SpaceIndices};
use shiftinv_core::oracle::composition;
use shiftinv_core::spectrum::{one_sided_core_annuli, radius_bound, shift_spectrum, spectrum_contains};

const M2_LIFT: &str = "t+0.5+0.05*sin(4*pi*t)";

fn shift(lift: &str) -> Shift {
    Shift::from_lift(parse(lift).unwrap(), None).unwrap()
}

fn op(lift: &str, a: &str, b: &str) -> OperatorSpec {
    OperatorSpec::new(parse(a).unwrap(), parse(b).unwrap(), shift(lift), default_space(), Tolerances::default())
        .unwrap()
}

fn all_fixture_specs() -> Vec<OperatorSpec> {
    suite().iter().chain(&extras()).map(|f| f.spec()).collect()
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let num = prop_oneof![
        (0u32..2000).prop_map(|k| Expr::num(k as f64 / 8.0)),
        (-1e6f64..1e6).prop_map(Expr::num),
        (1e-9f64..1e-3).prop_map(Expr::num),
    ];
    let leaf = prop_oneof![num.clone(), Just(Expr::Pi), Just(Expr::var())];
    leaf.prop_recursive(5, 48, 2, move |inner| {
        let unary = prop_oneof![
            Just(UnaryOp::Neg),
            Just(UnaryOp::Sin),
            Just(UnaryOp::Cos),
            Just(UnaryOp::Exp),
            Just(UnaryOp::Log),
            Just(UnaryOp::Abs),
            Just(UnaryOp::Sqrt),
        ];
        let binary = prop_oneof![
            Just(BinaryOp::Add),
            Just(BinaryOp::Sub),
            Just(BinaryOp::Mul),
            Just(BinaryOp::Div),
        ];
        prop_oneof![
            (unary, inner.clone()).prop_map(|(o, e)| Expr::unary(o, e)),
            (binary, inner.clone(), inner.clone()).prop_map(|(o, l, r)| Expr::binary(o, l, r)),
            (inner, num.clone()).prop_map(|(b, e)| Expr::binary(BinaryOp::Pow, b, e)),
        ]
    })
}

fn central_difference(e: &Expr, t: f64) -> f64 {
    let h = 1e-6;
    (e.eval(t + h).unwrap() - e.eval(t - h).unwrap()) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parse_serialize_round_trip(e in arb_expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn derivative_matches_finite_difference(seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = loop {
            let e = random_smooth_expr(&mut rng, 4);
            if ![UnaryOp::Abs, UnaryOp::Log, UnaryOp::Sqrt].iter().any(|&o| e.contains_unary(o)) {
                break e;
            }
        };
        let fd = central_difference(&e, t);
        let d = differentiate(&e).eval(t).unwrap();
        prop_assert!((d - fd).abs() <= 1e-6 * (1.0 + fd.abs()), "{e}: {d} vs {fd} at {t}");
    }

    #[test]
    fn associate_is_an_involution(alpha in 0.01f64..0.99, width in 0.0f64..1.0) {
        let beta = alpha + (0.99 - alpha) * width;
        let x = space_indices(alpha, beta, true).unwrap();
        let y = associate_indices(&x);
        prop_assert!(SpaceIndices::new(y.alpha, y.beta, true).is_ok());
        prop_assert!((y.alpha + x.beta - 1.0).abs() < 1e-15 && (y.beta + x.alpha - 1.0).abs() < 1e-15);
        let z = associate_indices(&y);
        prop_assert!((z.alpha - x.alpha).abs() < 1e-15 && (z.beta - x.beta).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trig_polynomial_zeros_are_complete(
        roots in prop::collection::vec(0.0f64..0.5, 1..=3),
        scale in 0.2f64..3.0,
    ) {
        let mut rs = roots.clone();
        rs.sort_by(f64::total_cmp);
        prop_assume!(rs.windows(2).all(|w| w[1] - w[0] > 0.01));
        prop_assume!(rs[0] > 0.005 && rs[rs.len() - 1] < 0.495);
        let src = rs
            .iter()
            .map(|r| format!("sin(2*pi*(t-{r:.17}))"))
            .collect::<Vec<_>>()
            .join("*");
        let e = parse(&format!("{scale}*{src}")).unwrap();
        let found = find_zeros(&e, 0.0, 1.0, 1e-12).unwrap();
        let mut expected: Vec<f64> = rs.iter().flat_map(|&r| [r, r + 0.5]).collect();
        expected.sort_by(f64::total_cmp);
        prop_assert_eq!(found.points.len(), expected.len(), "{}", src);
        for (z, r) in found.points.iter().zip(&expected) {
            prop_assert!((z.t - r).abs() < 1e-9, "{} vs {}", z.t, r);
        }
    }

    #[test]
    fn iterates_compose(t in 0.0f64..1.0, j in -8i64..=8, k in -8i64..=8, which in 0usize..3) {
        let s = shift([S1, M2_LIFT, "1-t+0.05*sin(2*pi*t)"][which]);
        let lhs = s.apply(t, j + k).unwrap();
        let rhs = s.apply(s.apply(t, k).unwrap(), j).unwrap();
        prop_assert!(circle_dist(lhs, rhs) < 1e-10);
    }

    #[test]
    fn orbits_converge_to_reported_endpoints(t in 0.0f64..1.0, which in 0usize..3) {
        let lift = [S1, M2_LIFT, "t+0.06*sin(4*pi*t)"][which];
        let s = shift(lift);
        let ps = compute_periodic_structure(&s, &StructureOptions::default()).unwrap();
        prop_assume!(ps.lambda_sample(4).iter().all(|&y| circle_dist(y, t) > 1e-6));
        let (rep, att) = ps.orbit_limit_endpoints(t).unwrap();
        let m = ps.m as i64;
        prop_assert!(circle_dist(s.apply(t, 200 * m).unwrap(), att) < 1e-8);
        prop_assert!(circle_dist(s.apply(t, -200 * m).unwrap(), rep) < 1e-8);
    }

    #[test]
    fn arcs_tile_the_circle(which in 0usize..5) {
        let lift = [S1, M2_LIFT, "t", "t+0.5", "t+0.01*(sin(pi*(1-t)/0.75)+abs(sin(pi*(1-t)/0.75)))^2"][which];
        let ps = compute_periodic_structure(&shift(lift), &StructureOptions::default()).unwrap();
        let mut arcs: Vec<(f64, f64)> = ps
            .omega
            .iter()
            .chain(ps.gamma.iter().map(|g| &g.arc))
            .map(|a| (a.start(), a.len()))
            .collect();
        let total: f64 = arcs.iter().map(|a| a.1).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "{}: total length {}", lift, total);
        arcs.sort_by(|x, y| x.0.total_cmp(&y.0));
        // each arc ends where the next begins
        for w in 0..arcs.len() {
            let (s0, l0) = arcs[w];
            let (s1, _) = arcs[(w + 1) % arcs.len()];
            prop_assert!(circle_dist(s0 + l0, s1) < 1e-9, "{}: {:?}", lift, arcs);
        }
    }

    #[test]
    fn classification_is_orbit_invariant(fi in 0usize..11, t in 0.0f64..1.0, k in -3i64..=3) {
        let op = &all_fixture_specs()[fi];
        let part = build_partition(op).unwrap();
        let r = part.classify(op, t).unwrap();
        let rk = part.classify(op, op.shift.apply(t, k).unwrap()).unwrap();
        prop_assert_eq!(r, rk);
    }

    #[test]
    fn eta1_below_eta0(fi in 0usize..11, t in 0.0f64..1.0) {
        let op = &all_fixture_specs()[fi];
        let (e0, e1) = eta_values(op, t).unwrap();
        prop_assert!(e1 <= e0);
    }

    #[test]
    fn eta_limits_two_ways(fi in 0usize..11, t in 0.0f64..1.0) {
        // ARC has parabolic endpoints (α' = 1): orbits converge only
        // algebraically, so 50 steps cannot reach 1e-8 there.
        prop_assume!(fi != 9);
        let op = &all_fixture_specs()[fi];
        let direct = eta_limits(op, t).unwrap();
        let iterated = eta_limits_by_iteration(op, t, 50).unwrap();
        prop_assert!(direct.max_abs_diff(&iterated) <= 1e-8, "{:?} vs {:?}", direct, iterated);
    }
}

#[test]
fn control_regions_avoid_fixed_points() {
    for op in all_fixture_specs() {
        let part = build_partition(&op).unwrap();
        for t in op.structure.lambda_sample(16) {
            let r = part.classify(&op, t).unwrap();
            assert!(!matches!(r, Region::Gamma4 | Region::Gamma5), "{t}: {r:?}");
        }
    }
}

#[test]
fn two_sided_iff_sigma_bounded_away_without_control_regions() {
    for op in all_fixture_specs() {
        let r = decide(&op).unwrap();
        let shortcut = r.min_abs_sigma() > 0.0 && !r.has_control_regions();
        assert_eq!(r.verdict == shiftinv_core::Verdict::TwoSided, shortcut);
    }
}

fn random_op<R: rand::Rng>(rng: &mut R, lift: &str) -> OperatorSpec {
    op(lift, &random_periodic_coeff(rng), &random_periodic_coeff(rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjoint_duality(seed in any::<u64>(), which in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = random_op(&mut rng, [S1, "1-t", "t+0.5", M2_LIFT][which]);
        let r = decide(&o).unwrap();
        let d = decide(&adjoint_spec(&o).unwrap()).unwrap();
        prop_assert_eq!((r.right, r.left), (d.left, d.right));
    }

    #[test]
    fn reduction_consistency(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = random_op(&mut rng, ["1-t", "t+0.5", M2_LIFT][which]);
        prop_assert_eq!(o.m(), 2);
        let red = reduce_to_fixed(&o).unwrap();
        let r = decide(&o).unwrap().right;
        let rm = decide(&red.op_m).unwrap().right;
        prop_assert_eq!(r, rm.and(red.cond));
    }
}

/// Forward-orbit search from every zero of `from` for a zero of `to` on the
/// same γ arc, within `steps` iterations of `α_m`.
fn brute_orbit_hit(op: &OperatorSpec, from: &[f64], to: &[f64], min_n: u64, steps: u64) -> bool {
    let m = op.m() as i64;
    from.iter().any(|&p| {
        let mut x = p;
        (0..steps).any(|n| {
            let hit = n >= min_n && to.iter().any(|&q| circle_dist(x, q) < 1e-9);
            x = op.shift.apply(x, m).unwrap();
            hit
        })
    })
}

fn sampled_zeros(e: &str) -> Vec<f64> {
    let e = parse(e).unwrap();
    let n = 20_000;
    let mut out = Vec::new();
    for i in 0..n {
        let (mut lo, mut hi) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
        let (flo, fhi) = (e.eval(lo).unwrap(), e.eval(hi).unwrap());
        if flo == 0.0 {
            out.push(lo);
            continue;
        }
        if flo * fhi >= 0.0 {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if e.eval(mid).unwrap() * flo > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orbit_conditions_match_brute_force(
        p in 0.03f64..0.47,
        n in 0i64..5,
        plant in any::<bool>(),
        other in 0.03f64..0.47,
    ) {
        let s1 = shift(S1);
        let q = if plant { s1.apply(p, n).unwrap() } else { other };
        prop_assume!(q < 0.49 && circle_dist(p, q) > 1e-6 || plant);
        let za = format!("sin(2*pi*(t-{p:.17}))");
        let zb = format!("sin(2*pi*(t-{q:.17}))");
        let all: Vec<usize> = (0..2).collect();

        // R: zero of a reaching a zero of b
        let o = op(S1, &za, &zb);
        let r = check_r(&o, &all).unwrap();
        let (a0, b0) = (sampled_zeros(&za), sampled_zeros(&zb));
        let fails = brute_orbit_hit(&o, &a0, &b0, 0, 400);
        prop_assert_eq!(r.holds, Truth::from_bool(!fails), "p={} q={}", p, q);

        // L: zero of b reaching a zero of a, n >= 1
        let o = op(S1, &zb, &za);
        let l = check_l(&o, &all).unwrap();
        let fails = brute_orbit_hit(&o, &a0, &b0, 1, 400);
        prop_assert_eq!(l.holds, Truth::from_bool(!fails), "p={} q={}", p, q);
    }
}

#[test]
fn interpolation_is_fourth_order() {
    let s = shift(S1);
    let f = |t: f64| (2.0 * PI * t).sin() + 0.5 * (4.0 * PI * t).cos();
    let ladder = [64usize, 128, 256, 512];
    let errs: Vec<f64> = ladder
        .iter()
        .map(|&n| {
            let interp = composition(&s, n, 1).unwrap();
            let v = nalgebra::DVector::from_fn(n, |i, _| f(i as f64 / n as f64));
            let got = interp.apply(&v);
            (0..n)
                .map(|i| (got[i] - f(s.apply(i as f64 / n as f64, 1).unwrap())).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    // least-squares slope of log err against log N
    let xs: Vec<f64> = ladder.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope + 4.0).abs() <= 0.3, "slope {slope}, errors {errs:?}");
}

fn membership_rotates(lift: &str, d: &str, seed: u64) {
    let s = shift(lift);
    let ps = compute_periodic_structure(&s, &StructureOptions::default()).unwrap();
    let ss = shift_spectrum(&parse(d).unwrap(), &s, &ps, &default_space(), 512).unwrap();
    let rot = Complex64::from_polar(1.0, 2.0 * PI / ss.m as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    use rand::Rng;
    for _ in 0..1000 {
        let z = Complex64::from_polar(rng.gen_range(0.0..2.5), rng.gen_range(0.0..2.0 * PI));
        let a = spectrum_contains(&ss, z, 1e-9);
        let b = spectrum_contains(&ss, z * rot, 1e-9);
        if ss.curve_samples.is_empty() {
            assert_eq!(a, b, "{lift}: {z}");
        } else if a != b {
            // curve parts are only resolved to the sampling distance
            let w = z.powu(ss.m as u32);
            let near = ss.curve_samples.iter().any(|c| (c.powu(ss.m as u32) - w).norm() <= 4.0 * ss.curve_resolution);
            assert!(near, "{lift}: {z}");
        }
    }
}

#[test]
fn spectrum_rotational_symmetry() {
    membership_rotates(M2_LIFT, "1", 1);
    membership_rotates(M2_LIFT, "1.5+0.5*sin(2*pi*t)", 2);
    membership_rotates("t+0.5", "2+sin(2*pi*t)", 3);
    membership_rotates(S1, "1", 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equal_indices_collapse_core_annuli(a in 0.02f64..0.98, which in 0usize..2) {
        let s = shift([S1, M2_LIFT][which]);
        let ps = compute_periodic_structure(&s, &StructureOptions::default()).unwrap();
        let x = SpaceIndices::new(a, a, true).unwrap();
        for g in &ps.gamma {
            for an in one_sided_core_annuli(&s, g, &x).unwrap() {
                prop_assert!(an.r_out - an.r_in < 1e-12);
            }
        }
    }

    #[test]
    fn core_annuli_inside_spectrum(alpha in 0.05f64..0.9, width in 0.0f64..1.0) {
        let beta = alpha + (0.95 - alpha) * width;
        let x = SpaceIndices::new(alpha, beta, true).unwrap();
        let s = shift(S1);
        let ps = compute_periodic_structure(&s, &StructureOptions::default()).unwrap();
        let ss = shift_spectrum(&parse("1").unwrap(), &s, &ps, &x, 128).unwrap();
        for g in &ps.gamma {
            for core in one_sided_core_annuli(&s, g, &x).unwrap() {
                prop_assert!(ss.annuli.iter().any(|a| a.covers(&core, 1e-12)), "{:?} not in {:?}", core, ss.annuli);
            }
        }
    }

    #[test]
    fn spectrum_radius_matches_bound(c0 in 1.2f64..3.0, c1 in -1.0f64..1.0, ph in 0.0f64..1.0) {
        let d = format!("{c0}+{c1}*sin(2*pi*(t-{ph}))");
        let e = parse(&d).unwrap();
        let s = shift(S1);
        let ps = compute_periodic_structure(&s, &StructureOptions::default()).unwrap();
        let x = default_space();
        let ss = shift_spectrum(&e, &s, &ps, &x, 128).unwrap();
        let r = radius_bound(&e, &s, &ps, &x).unwrap();
        prop_assert!((ss.max_modulus() - r).abs() <= 1e-9, "{} vs {}", ss.max_modulus(), r);
    }
}

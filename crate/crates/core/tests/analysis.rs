use approx::assert_abs_diff_eq;
use shiftinv_core::analysis::{
    adjoint_spec, build_partition, decide, eta_limits, eta_values, reduce_to_fixed, sigma_a, OperatorSpec, Region,
    Tolerances, Truth, Verdict, Witness,
};
use shiftinv_core::circle::Shift;
use shiftinv_core::coeff::CircleFn;
use shiftinv_core::fixtures::{by_name, default_space, extras, suite, S1};
use shiftinv_core::parse;

fn op(lift: &str, a: &str, b: &str) -> OperatorSpec {
    let shift = Shift::from_lift(parse(lift).unwrap(), None).unwrap();
    OperatorSpec::new(parse(a).unwrap(), parse(b).unwrap(), shift, default_space(), Tolerances::default()).unwrap()
}

// Independent dilation factors at the two fixed points of S1.
fn x0() -> f64 {
    1.0 + 0.2 * std::f64::consts::PI
}
fn x_half() -> f64 {
    1.0 - 0.2 * std::f64::consts::PI
}

#[test]
fn suite_verdicts() {
    for f in suite().iter().chain(&extras()) {
        let r = decide(&f.spec()).unwrap();
        assert_eq!(r.verdict, f.expected, "{}: {}", f.name, f.note);
    }
}

#[test]
fn eta_at_fixed_points_of_s1() {
    let f1 = by_name("F1").unwrap().spec();
    let (e0, e1) = eta_values(&f1, 0.0).unwrap();
    assert_abs_diff_eq!(e1, 2.0 - x0().powf(-1.0 / 3.0), epsilon = 1e-12);
    assert_abs_diff_eq!(e0, 2.0 - x0().powf(-0.5), epsilon = 1e-12);
    assert_abs_diff_eq!(e1, 1.150, epsilon = 5e-4);

    let f4 = by_name("F4").unwrap().spec();
    let (e0, e1) = eta_values(&f4, 0.0).unwrap();
    assert_abs_diff_eq!(e0, 1.216, epsilon = 5e-4);
    assert_abs_diff_eq!(e1, 1.150, epsilon = 5e-4);
    let (e0, e1) = eta_values(&f4, 0.5).unwrap();
    assert_abs_diff_eq!(e0, 0.1 - x_half().powf(-1.0 / 3.0), epsilon = 1e-12);
    assert_abs_diff_eq!(e1, 0.1 - x_half().powf(-0.5), epsilon = 1e-12);
    assert!(e0 < 0.0 && e1 < 0.0);
}

#[test]
fn eta_limits_on_f4_arc() {
    let f4 = by_name("F4").unwrap().spec();
    let l = eta_limits(&f4, 0.25).unwrap();
    assert_abs_diff_eq!(l.eta0_plus, -1.291, epsilon = 5e-4);
    assert_abs_diff_eq!(l.eta1_minus, 1.150, epsilon = 5e-4);
    let at = eta_limits(&f4, 0.5).unwrap();
    let (e0, e1) = eta_values(&f4, 0.5).unwrap();
    assert_eq!((at.eta0_minus, at.eta0_plus, at.eta1_minus, at.eta1_plus), (e0, e0, e1, e1));
}

#[test]
fn f4_partition() {
    let f4 = by_name("F4").unwrap().spec();
    let part = build_partition(&f4).unwrap();
    assert_eq!(part.classify(&f4, 0.0).unwrap(), Region::Gamma2);
    assert_eq!(part.classify(&f4, 0.5).unwrap(), Region::Gamma3);
    assert_eq!(part.gamma.len(), 2);
    assert!(part.gamma.iter().all(|g| g.region == Region::Gamma4));
    assert!(part.omega.is_empty());
}

#[test]
fn f1_everything_dominant_a() {
    let f1 = by_name("F1").unwrap().spec();
    let part = build_partition(&f1).unwrap();
    assert!(part.regions().all(|r| r == Region::Gamma2));
    for t in [0.0, 0.1, 0.37, 0.5, 0.9] {
        assert_eq!(sigma_a(&f1, &part, t).unwrap(), 2.0);
    }
}

#[test]
fn sigma_examples() {
    let f4 = by_name("F4").unwrap().spec();
    let part = build_partition(&f4).unwrap();
    assert_abs_diff_eq!(sigma_a(&f4, &part, 0.5).unwrap(), -1.0, epsilon = 1e-12);

    // reflection: m = 2 Carleman, σ_A = a_2 - b_2 = a(t)a(1-t) - 1
    let refl = op("-t", "2", "1");
    assert_eq!(refl.m(), 2);
    let part = build_partition(&refl).unwrap();
    assert_abs_diff_eq!(sigma_a(&refl, &part, 0.3).unwrap(), 3.0, epsilon = 1e-12);

    let f7 = by_name("F7").unwrap().spec();
    let part = build_partition(&f7).unwrap();
    for t in [0.1, 0.2, 0.3, 0.7] {
        let s = (2.0 * std::f64::consts::PI * t).sin();
        assert_abs_diff_eq!(sigma_a(&f7, &part, t).unwrap(), -s * s, epsilon = 1e-12);
    }
}

#[test]
fn r_fails_on_shared_zero() {
    let r = decide(&by_name("F6").unwrap().spec()).unwrap();
    assert_eq!(r.right, Truth::False);
    let w = r.r_check.as_ref().and_then(|c| c.witness).expect("R witness");
    assert_abs_diff_eq!(w.p, 0.25, epsilon = 1e-9);
    assert_abs_diff_eq!(w.q, 0.25, epsilon = 1e-9);
    assert_eq!(w.n, 0);
}

#[test]
fn r_holds_when_b_zero_precedes_a_zero() {
    let r = decide(&by_name("RZ").unwrap().spec()).unwrap();
    let c = r.r_check.as_ref().unwrap();
    assert_eq!(c.holds, Truth::True);
    assert!(c.zeros_a.iter().any(|&z| (z - 0.3).abs() < 1e-9));
    assert!(c.zeros_b.iter().any(|&z| (z - 0.1).abs() < 1e-9));
}

#[test]
fn l_fails_along_an_orbit() {
    let s1 = Shift::from_lift(parse(S1).unwrap(), None).unwrap();
    let q = s1.apply(0.1, 3).unwrap();
    let a = format!("0.5*sin(2*pi*(t-{q:.17}))");
    let o = op(S1, &a, "sin(2*pi*(t-0.1))*(1.2-sin(pi*t))");
    let r = decide(&o).unwrap();
    assert!(r.partition.gamma.iter().all(|g| g.region == Region::Gamma5));
    assert_eq!(r.left, Truth::False);
    assert_eq!(r.verdict, Verdict::Neither);
    let w = r.l_check.as_ref().and_then(|c| c.witness).expect("L witness");
    assert_abs_diff_eq!(w.p, 0.1, epsilon = 1e-9);
    assert_abs_diff_eq!(w.q, q, epsilon = 1e-9);
    assert_eq!(w.n, 3);
    assert!(r
        .witnesses
        .iter()
        .any(|w| matches!(w, Witness::OrbitPair { condition: "L", n: 3, .. })));
}

#[test]
fn l_holds_on_shared_zero() {
    let o = op(S1, "0.5*sin(2*pi*(t-0.2))", "sin(2*pi*(t-0.2))*(1.2-sin(pi*t))");
    let r = decide(&o).unwrap();
    assert!(r.partition.gamma.iter().all(|g| g.region == Region::Gamma5));
    assert_eq!(r.l_check.as_ref().unwrap().holds, Truth::True);
    assert_eq!(r.verdict, Verdict::LeftOnly);
}

#[test]
fn tangential_fixed_point_is_undecidable() {
    let r = decide(&op("t+0.05*(1-cos(2*pi*t))", "2", "1")).unwrap();
    assert!(r.structure.is_uncertain());
    assert_eq!(r.verdict, Verdict::Undecidable);
}

#[test]
fn adjoint_coefficient_at_fixed_point() {
    let f1 = op(S1, "2", "1");
    let adj = adjoint_spec(&f1).unwrap();
    assert_abs_diff_eq!(adj.b.eval(0.0).unwrap(), 1.0 / x0(), epsilon = 1e-9);
    assert_abs_diff_eq!(adj.b.eval(0.0).unwrap(), 0.6141, epsilon = 5e-5);
    assert_abs_diff_eq!(adj.b.eval(0.5).unwrap(), 1.0 / x_half(), epsilon = 1e-9);
    // the inverse shift moves points the other way
    assert!(adj.shift.apply(0.25, 1).unwrap() < 0.25);
    assert!((adj.space.alpha - 0.5).abs() < 1e-15 && (adj.space.beta - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn adjoint_of_identity_shift() {
    let o = op("t", "2+cos(2*pi*t)", "0.5*sin(2*pi*t)");
    let adj = adjoint_spec(&o).unwrap();
    for t in [0.0, 0.2, 0.6] {
        assert_abs_diff_eq!(adj.b.eval(t).unwrap(), o.b.eval(t).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(adj.shift.apply(t, 1).unwrap(), t, epsilon = 1e-12);
    }
}

#[test]
fn adjoint_swaps_sides() {
    for f in suite().iter().chain(&extras()) {
        let op = f.spec();
        let r = decide(&op).unwrap();
        let d = decide(&adjoint_spec(&op).unwrap()).unwrap();
        assert_eq!((r.right, r.left), (d.left, d.right), "{}", f.name);
    }
}

#[test]
fn reduction_of_rotation() {
    let o = op("t+0.5", "2", "1");
    let red = reduce_to_fixed(&o).unwrap();
    assert_eq!(red.cond, Truth::True);
    assert_eq!(red.op_m.m(), 1);
    for t in [0.0, 0.3, 0.8] {
        assert_abs_diff_eq!(red.op_m.a.eval(t).unwrap(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(red.op_m.b.eval(t).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(red.op_m.shift.apply(t, 1).unwrap(), t, epsilon = 1e-12);
    }

    let trig = op("t+0.5", "sin(2*pi*t)", "cos(2*pi*t)");
    assert_eq!(reduce_to_fixed(&trig).unwrap().cond, Truth::True);
}

#[test]
fn reduction_is_identity_for_m1() {
    let f4 = by_name("F4").unwrap().spec();
    let red = reduce_to_fixed(&f4).unwrap();
    assert_eq!(red.cond, Truth::True);
    assert_eq!(decide(&red.op_m).unwrap().verdict, Verdict::RightOnly);
}

#[test]
fn orbit_product_examples() {
    let rot = Shift::from_lift(parse("t+0.5").unwrap(), None).unwrap();
    let f = CircleFn::from(parse("t+0.5").unwrap()).orbit_product(&rot, 2);
    assert_abs_diff_eq!(f.eval(0.2).unwrap(), 0.84, epsilon = 1e-12);
    let c = CircleFn::constant(2.0).orbit_product(&rot, 3);
    assert_eq!(c.eval(0.4).unwrap(), 8.0);

    // α_3' as an orbit product of α' against a finite difference of α_3
    let s1 = Shift::from_lift(parse(S1).unwrap(), None).unwrap();
    let d = CircleFn::AbsDerivative { shift: s1.clone(), k: 1 }.orbit_product(&s1, 3);
    let h = 1e-6;
    let t = 0.21;
    let fd = (s1.apply(t + h, 3).unwrap() - s1.apply(t - h, 3).unwrap()) / (2.0 * h);
    assert_abs_diff_eq!(d.eval(t).unwrap(), fd, epsilon = 1e-7);
}

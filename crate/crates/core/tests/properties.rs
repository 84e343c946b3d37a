use num_complex::Complex;
use proptest::prelude::*;

use oplab::funcspace::{parse_fn, AnalyticFn, C64};
use oplab::jet::Jet;
use oplab::operator::OperatorSpec;
use oplab::scalar::{to_c64, Real, TwoFloat};
use oplab::testfns::{g_ia, solve_delta_coeffs, test_fn, DeltaSystem};

const ORDER: usize = 6;

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn coeff() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn point(rmax: f64) -> impl Strategy<Value = C64> {
    (0.0..rmax, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn jet() -> impl Strategy<Value = Jet<f64>> {
    prop::collection::vec(coeff(), ORDER + 1).prop_map(|c| Jet::from_coeffs(Complex::new(0.1, -0.2), c))
}

fn leaf() -> impl Strategy<Value = AnalyticFn> {
    prop_oneof![
        coeff().prop_map(AnalyticFn::constant),
        Just(AnalyticFn::var()),
        prop::collection::vec(coeff(), 1..5).prop_map(|c| AnalyticFn::poly(c).unwrap()),
        point(0.9).prop_map(|a| AnalyticFn::sigma(a).unwrap()),
        (1..6u32, point(0.9)).prop_map(|(j, a)| AnalyticFn::test_fn(j, a).unwrap()),
    ]
}

fn tree() -> impl Strategy<Value = AnalyticFn> {
    leaf().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), coeff()).prop_map(|(a, c)| a / AnalyticFn::poly(vec![Complex::new(3.0, 0.0), c]).unwrap()),
            (inner.clone(), point(0.9)).prop_map(|(a, b)| AnalyticFn::compose(a, AnalyticFn::sigma(b).unwrap())),
            (inner, 0.1..0.99f64).prop_map(|(a, r)| AnalyticFn::dilate(r, a).unwrap()),
        ]
    })
}

fn operator() -> impl Strategy<Value = OperatorSpec> {
    (leaf(), leaf(), point(0.9), 1..5u32, 0.5..4.0f64)
        .prop_map(|(u, v, b, m, alpha)| OperatorSpec::new(u, v, AnalyticFn::sigma(b).unwrap(), m, alpha).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_ring_laws(a in jet(), b in jet(), c in jet()) {
        let ab = &a * &b;
        let ba = &b * &a;
        let lhs = &(&a + &b) * &c;
        let rhs = &(&a * &c) + &(&b * &c);
        let assoc_l = &ab * &c;
        let assoc_r = &a * &(&b * &c);
        for k in 0..=ORDER {
            prop_assert!(close(ab.coeffs()[k], ba.coeffs()[k], 1e-14));
            prop_assert!(close(lhs.coeffs()[k], rhs.coeffs()[k], 1e-13));
            prop_assert!(close(assoc_l.coeffs()[k], assoc_r.coeffs()[k], 1e-13));
        }
    }

    #[test]
    fn jet_division_inverts_multiplication(a in jet(), b in jet(), shift in coeff()) {
        // keep the divisor's constant term away from zero
        let mut bc = b.coeffs().to_vec();
        bc[0] = Complex::new(2.0, 0.0) + shift;
        let b = Jet::from_coeffs(a.center(), bc);
        let back = (&a * &b).checked_div(&b).unwrap();
        for k in 0..=ORDER {
            prop_assert!(close(back.coeffs()[k], a.coeffs()[k], 1e-11));
        }
    }

    #[test]
    fn display_round_trips(f in tree(), z in point(0.8)) {
        let g = parse_fn(&f.to_string()).unwrap();
        let (x, y) = (f.eval::<f64>(z).unwrap(), g.eval::<f64>(z).unwrap());
        prop_assert!(close(x, y, 1e-12), "{f}: {x} vs {y}");
    }

    #[test]
    fn operator_is_linear(op in operator(), f in tree(), g in tree(), c in coeff(), z in point(0.9)) {
        let combo = f.clone() + AnalyticFn::scaled(c, g.clone());
        let lhs = op.apply(&combo).eval::<f64>(z).unwrap();
        let rhs = op.apply(&f).eval::<f64>(z).unwrap() + c * op.apply(&g).eval::<f64>(z).unwrap();
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn expansion_holds_for_random_operators(op in operator(), f in tree(), z in point(0.9)) {
        let r = op.second_derivative_identity_check::<f64>(&f, z).unwrap();
        prop_assert!(r.rel_mismatch <= 1e-9, "{r:?}");
    }

    #[test]
    fn test_fn_derivatives_at_parameter(j in 1..9u32, a in point(0.95)) {
        let d = test_fn(j, a).unwrap().derivatives::<f64>(a, 4).unwrap();
        let s = 1.0 - a.norm_sqr();
        let mut expect = Complex::new(1.0, 0.0);
        for (k, dk) in d.iter().enumerate() {
            prop_assert!(close(*dk, expect, 1e-10), "k={k}");
            expect *= a.conj() * (j + k as u32) as f64 / s;
        }
    }

    #[test]
    fn delta_combination_is_kronecker(m in 1..7u32, i_raw in 0..8u32, a in point(0.9)) {
        let rows = DeltaSystem::new(m).unwrap().rows;
        let i = rows[i_raw as usize % rows.len()];
        let sol = solve_delta_coeffs(i, m, None).unwrap();
        let g = g_ia(&sol, a).unwrap();
        let d = g.derivatives::<TwoFloat>(TwoFloat::cplx(a), *rows.last().unwrap() as usize).unwrap();
        let s = 1.0 - a.norm_sqr();
        for &k in &rows {
            // g^(k)(a) = delta_ik conj(a)^k / (1-|a|^2)^k
            let target = if k == i { a.conj().powi(k as i32) / s.powi(k as i32) } else { C64::new(0.0, 0.0) };
            let got = to_c64(d[k as usize]);
            let scale = (a.norm() / s).powi(k as i32).max(1.0);
            prop_assert!((got - target).norm() <= 1e-9 * scale, "m={m} i={i} k={k}: {got}");
        }
    }
}

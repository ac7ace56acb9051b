use preduals_core::xzero::{
    extend, extend_direct, intertwine_discrepancy, tau_pow_x0, verify_intertwine, x0_eval, x0_window,
};
use preduals_core::{FinSeq, LambdaParam, Scalar, Window};
use proptest::prelude::*;

fn lambdas() -> Vec<LambdaParam> {
    vec![
        LambdaParam::int(2),
        LambdaParam::int(-3),
        LambdaParam::parse("5/2").unwrap(),
        LambdaParam::complex(1.2, 0.9).unwrap(),
    ]
}

proptest! {
    #[test]
    fn digit_recursion(n in 0i64..(1 << 40), li in 0usize..4) {
        let l = &lambdas()[li];
        let even = x0_eval(l, 2 * n);
        let odd = x0_eval(l, 2 * n + 1);
        prop_assert!(even.exactly_equals(&x0_eval(l, n)));
        let d = (&odd - &(l.inv() * &x0_eval(l, n))).abs();
        prop_assert!(d <= 1e-12);
    }

    #[test]
    fn negative_indices_vanish(n in 1i64..(1 << 50)) {
        prop_assert!(x0_eval(&LambdaParam::int(2), -n).is_exact_zero());
    }

    #[test]
    fn spreading_halves_arguments(n in -1000i64..1000, k in 0u32..5) {
        let l = LambdaParam::int(2);
        let v = tau_pow_x0(&l, k, n as i128);
        let span = 1i64 << k;
        if n.rem_euclid(span) == 0 {
            prop_assert_eq!(v, x0_eval(&l, n / span));
        } else {
            prop_assert!(v.is_exact_zero());
        }
    }

    #[test]
    fn extension_matches_direct_sum(
        entries in prop::collection::vec((1i64..=32, -9i64..=9), 1..6),
        li in 0usize..3,
    ) {
        let l = &lambdas()[li];
        let y = FinSeq::from_entries(entries.into_iter().map(|(n, p)| (n, Scalar::ratio(p, 3)))).unwrap();
        prop_assume!(!y.is_zero());
        let ext = extend(&y, l).unwrap();
        let w = Window::new(-300, 700).unwrap();
        let fast = ext.evaluate(w).unwrap();
        let direct = extend_direct(&y, l, ext.k(), w).unwrap();
        for n in w.indices() {
            let a = fast.at(n).unwrap();
            let b = direct.at(n).unwrap();
            prop_assert!(a.exactly_equals(b), "n = {}", n);
        }
        let cert = ext.certificate(w).unwrap();
        prop_assert!(cert.holds(l.is_exact(), 1e-12));
    }

    #[test]
    fn intertwining_on_random_windows(lo in -500i64..500, len in 1i64..400) {
        let l = LambdaParam::int(3);
        let w = Window::new(lo, lo + len).unwrap();
        let input = preduals_core::xzero::intertwine_input_window(w).unwrap();
        let x = x0_window(&l, input).unwrap();
        prop_assert!(intertwine_discrepancy(&x, w).unwrap().exact);
    }
}

#[test]
fn intertwine_report() {
    let r = verify_intertwine(&LambdaParam::int(2), Window::radius(1 << 10).unwrap(), 8, 0).unwrap();
    assert!(r.passed());
}

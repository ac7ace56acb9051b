use preduals_core::{FinSeq, Scalar, Window, WindowedSeq};
use proptest::prelude::*;

fn finseq() -> impl Strategy<Value = FinSeq> {
    prop::collection::vec((-20i64..=20, -9i64..=9, 1i64..=6), 0..6).prop_map(|v| {
        FinSeq::from_entries(v.into_iter().map(|(n, p, q)| (n, Scalar::ratio(p, q)))).unwrap()
    })
}

proptest! {
    #[test]
    fn convolution_is_commutative_and_associative(a in finseq(), b in finseq(), c in finseq()) {
        prop_assert_eq!(a.convolve(&b).unwrap(), b.convolve(&a).unwrap());
        let l = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let r = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn delta_is_the_unit(a in finseq()) {
        prop_assert_eq!(a.convolve(&FinSeq::delta(0)).unwrap(), a);
    }

    #[test]
    fn shifts_compose(a in finseq(), m in -50i64..50, n in -50i64..50) {
        prop_assert_eq!(a.shift(m).unwrap().shift(n).unwrap(), a.shift(m + n).unwrap());
        prop_assert_eq!(a.convolve(&FinSeq::delta(m)).unwrap(), a.shift(m).unwrap());
    }

    #[test]
    fn involution_reverses_products(a in finseq(), b in finseq()) {
        let l = a.convolve(&b).unwrap().involution();
        let r = a.involution().convolve(&b.involution()).unwrap();
        prop_assert_eq!(l, r);
        prop_assert_eq!(a.involution().involution(), a);
    }

    #[test]
    fn l1_is_submultiplicative(a in finseq(), b in finseq()) {
        let ab = a.convolve(&b).unwrap().l1_norm_exact().unwrap();
        let prod = a.l1_norm_exact().unwrap() * b.l1_norm_exact().unwrap();
        prop_assert!(ab <= prod);
    }

    #[test]
    fn powers_add_exponents(a in finseq(), m in 0u32..4, n in 0u32..4) {
        let l = a.power(m).unwrap().convolve(&a.power(n).unwrap()).unwrap();
        prop_assert_eq!(l, a.power(m + n).unwrap());
    }

    #[test]
    fn windowed_shift_matches_finite_shift(a in finseq(), m in -10i64..10) {
        let w = Window::radius(40).unwrap();
        let x = WindowedSeq::from_fn(w, |n| a.get(n)).unwrap();
        let target = Window::radius(25).unwrap();
        let shifted = x.shift(m, target).unwrap();
        let direct = a.shift(m).unwrap();
        for n in target.indices() {
            prop_assert!(shifted.at(n).unwrap().exactly_equals(&direct.get(n)));
        }
    }
}

#[test]
fn window_guards() {
    assert!(Window::new(3, 1).is_err());
    assert!(FinSeq::delta(1 << 61).shift(3 << 61).is_err());
    let w = Window::radius(4).unwrap();
    let x = WindowedSeq::from_fn(w, |_| Scalar::one()).unwrap();
    assert!(x.at(5).is_err());
}

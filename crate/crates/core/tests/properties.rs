use modflow::cf_core::{rcf_expand, DigitSequence};
use modflow::dual_mobius::fstar_expand;
use modflow::farey_cf::farey_expand;
use modflow::lehner::{lehner_expand, LehnerDigit};
use modflow::natext::{natext_inverse, natext_step, OmegaPoint};
use modflow::ExactReal;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const BUDGET: usize = 100_000;

fn ratio(n: i64, d: i64) -> ExactReal {
    ExactReal::from(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

/// A rational `lo + k/den` strictly between `lo` and `lo + width`.
fn rational_between(lo: i64, width: i64) -> impl Strategy<Value = ExactReal> {
    (2i64..2000).prop_flat_map(move |den| (1..den * width).prop_map(move |k| ratio(lo * den + k, den)))
}

fn surd() -> impl Strategy<Value = ExactReal> {
    (-30i64..30, 1i64..6, prop::sample::select(vec![2i64, 3, 5, 6, 7, 10, 11, 13]), 1i64..12)
        .prop_map(|(p, q, d, r)| ExactReal::surd(p, q, d, r).unwrap())
}

fn any_real() -> impl Strategy<Value = ExactReal> {
    prop_oneof![rational_between(-20, 40), surd()]
}

/// `surd()` values that fall inside `(lo, hi)`.
fn surd_in(lo: i64, hi: i64) -> impl Strategy<Value = ExactReal> {
    surd().prop_filter("inside", move |x| x > &ExactReal::from(lo) && x < &ExactReal::from(hi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn text_round_trip(x in any_real()) {
        let back: ExactReal = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn field_identities(x in any_real(), y in surd()) {
        // y and x share a field only sometimes; mixed fields must fail, not lie
        if let Ok(s) = x.try_add(&y) {
            prop_assert_eq!(s.try_sub(&y).unwrap(), x.clone());
            let p = x.try_mul(&y).unwrap();
            prop_assert_eq!(p.try_div(&y).unwrap(), x.clone());
        }
        prop_assert_eq!(x.try_sub(&x).unwrap(), ExactReal::zero());
    }

    #[test]
    fn order_agrees_with_doubles(x in any_real(), y in any_real()) {
        let (a, b) = (x.to_f64(), y.to_f64());
        if (a - b).abs() > 1e-9 {
            prop_assert_eq!(x < y, a < b);
        }
    }

    #[test]
    fn conjugate_is_an_involution(x in surd()) {
        prop_assert_eq!(x.conjugate().conjugate(), x.clone());
        prop_assert_eq!((&x + &x.conjugate()).is_rational(), true);
        prop_assert_eq!((&x * &x.conjugate()).is_rational(), true);
    }

    #[test]
    fn rcf_of_rational_is_finite_and_exact(x in rational_between(-20, 40)) {
        let e = rcf_expand(&x, BUDGET).unwrap();
        prop_assert!(e.digits.period().is_empty());
        prop_assert_eq!(e.value().unwrap(), x);
    }

    #[test]
    fn lehner_round_trip_rational(x in rational_between(1, 1)) {
        let e = lehner_expand(&x, BUDGET).unwrap();
        prop_assert!(e.period().is_empty());
        prop_assert_eq!(e.value().unwrap(), x);
    }

    #[test]
    fn lehner_round_trip_surd(x in surd_in(1, 2)) {
        let e = lehner_expand(&x, BUDGET).unwrap();
        prop_assert!(!e.period().is_empty());
        prop_assert_eq!(e.value().unwrap(), x);
    }

    #[test]
    fn farey_round_trip(x in prop_oneof![rational_between(-1, 30), surd_in(-1, 30)]) {
        let e = farey_expand(&x, BUDGET).unwrap();
        prop_assert_eq!(e.period().is_empty(), x.is_rational() && x != ExactReal::from(-1));
        prop_assert_eq!(e.value().unwrap(), x);
    }

    #[test]
    fn fstar_round_trip(x in prop_oneof![rational_between(0, 1), surd_in(0, 1)]) {
        let x = &(&x + &ExactReal::one()) / &ExactReal::from(2);
        let e = fstar_expand(&x, BUDGET).unwrap();
        if !e.hit_boundary {
            prop_assert_eq!(e.digits.value().unwrap(), x);
        }
    }

    #[test]
    fn natext_step_is_invertible(x in rational_between(1, 1), y in rational_between(-1, 30)) {
        let p = OmegaPoint::new(x, y);
        let q = natext_step(&p).unwrap();
        let back = natext_inverse(&q).unwrap();
        prop_assert_eq!((back.x, back.y, back.eps), (p.x, p.y, p.eps));
    }

    #[test]
    fn normalisation_preserves_value(
        pre in prop::collection::vec(prop::bool::ANY, 0..4),
        per in prop::collection::vec(prop::bool::ANY, 1..4),
        extra in 1usize..3,
    ) {
        let d = |b: &bool| if *b { LehnerDigit::D11 } else { LehnerDigit::D21 };
        let pre: Vec<_> = pre.iter().map(d).collect();
        let per: Vec<_> = per.iter().map(d).collect();
        // unrolling the period and repeating it describes the same word
        let mut longer = pre.clone();
        longer.extend(per.iter().cloned());
        let repeated: Vec<_> = per.iter().cycle().take(per.len() * extra).cloned().collect();
        let a = DigitSequence::new(pre, per);
        let b = DigitSequence::new(longer, repeated);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.value().unwrap(), b.value().unwrap());
    }
}

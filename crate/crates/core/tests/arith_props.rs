use cosetvir::arith::{rat, Cyclotomic, Rational};
use proptest::prelude::*;

const ORDERS: &[u64] = &[1, 3, 4, 5, 7, 8, 12, 15, 24, 28, 32];

fn element() -> impl Strategy<Value = Cyclotomic> {
    (prop::sample::select(ORDERS), prop::collection::vec((-6i64..=6, 1i64..=5), 1..8)).prop_map(|(n, cs)| {
        cs.iter()
            .enumerate()
            .fold(Cyclotomic::zero(), |acc, (i, &(a, b))| {
                acc + Cyclotomic::root_of_unity(n, 3 * i as i64 + a).scale(&rat(a, b))
            })
    })
}

fn f64_value(a: &Cyclotomic) -> (f64, f64) {
    let n = a.order() as f64;
    a.terms().iter().fold((0.0, 0.0), |(re, im), (e, c)| {
        let c = num_traits::ToPrimitive::to_f64(c).unwrap();
        let t = 2.0 * std::f64::consts::PI * (*e as f64) / n;
        (re + c * t.cos(), im + c * t.sin())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in element(), b in element(), c in element()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn inverse_round_trip(a in element()) {
        prop_assume!(!a.is_zero());
        let inv = a.inverse().unwrap();
        prop_assert!((&a * &inv).is_one());
    }

    #[test]
    fn zero_test_agrees_with_enclosures(a in element(), bits in prop::sample::select(vec![32u32, 96, 256])) {
        let r = a.embed(bits);
        if a.is_zero() {
            prop_assert!(r.re.contains_zero() && r.im.contains_zero());
        } else {
            // a nonzero value is separated from zero once the precision is high enough
            let r = a.embed(512);
            prop_assert!(!(r.re.contains_zero() && r.im.contains_zero()));
        }
        let (re, im) = f64_value(&a);
        prop_assert!((r.re.mid_f64() - re).abs() < 1e-9 && (r.im.mid_f64() - im).abs() < 1e-9);
        prop_assert!(r.re.width_at_most(bits as i64) && r.im.width_at_most(bits as i64));
    }

    #[test]
    fn canonical_form_is_idempotent(a in element()) {
        let coeffs: Vec<Rational> = (0..a.order() as usize).map(|e| a.coefficient(e)).collect();
        let again = Cyclotomic::from_coefficients(a.order(), &coeffs);
        prop_assert_eq!(again.terms(), a.terms());
        let json = serde_json::to_string(&a).unwrap();
        let back: Cyclotomic = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn conjugation(a in element()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        let re = a.real_part();
        prop_assert_eq!(re.conj(), re.clone());
        let im = a.imag_part();
        prop_assert_eq!(im.conj(), im.clone());
        let i = Cyclotomic::root_of_unity(4, 1);
        prop_assert_eq!(&re + &(&i * &im), a);
    }

    #[test]
    fn lifting_preserves_value(n in prop::sample::select(ORDERS), k in -40i64..40, m in 1u64..6) {
        let z = Cyclotomic::root_of_unity(n, k);
        let lifted = z.lift(n * m).unwrap();
        prop_assert_eq!(lifted.order(), n * m);
        prop_assert_eq!(&lifted, &Cyclotomic::root_of_unity(n * m, k * m as i64));
        for bits in [32u32, 128] {
            prop_assert!(z.embed(bits).overlaps(&lifted.embed(bits)));
        }
    }

    #[test]
    fn signs_match_floating_point(a in element()) {
        let (re, im) = f64_value(&a);
        let sr = a.sign_real().unwrap();
        let si = a.sign_imag().unwrap();
        if re.abs() > 1e-9 { prop_assert_eq!(sr as f64, re.signum()); }
        if im.abs() > 1e-9 { prop_assert_eq!(si as f64, im.signum()); }
        if sr == 0 { prop_assert!(re.abs() < 1e-9); }
        if si == 0 { prop_assert!(im.abs() < 1e-9); }
    }
}

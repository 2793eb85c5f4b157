use std::collections::BTreeSet;

use ietlang::exactnum::ExactScalar;
use ietlang::iet::{build_iet, Direction, IetKind, IetSpec, IntervalExchange, Step};
use ietlang::language::{
    classify_bispecials, complexity_profile, language_from_iet, left_special_profile, Classification,
};
use ietlang::order::{check_order_condition, find_connections, sequence_order, OrderSpec, OrderVerdict, SeqOrder};
use ietlang::Alphabet;
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = ExactScalar> {
    (-30i64..30, 1i64..12, -10i64..10, 1i64..6).prop_map(|(p, q, bp, bq)| ExactScalar::quad(p, q, bp, bq, 5))
}

fn positive_length() -> impl Strategy<Value = ExactScalar> {
    prop_oneof![
        (1i64..20, 1i64..6).prop_map(|(p, q)| ExactScalar::ratio(p, q)),
        (1i64..8, 1i64..8).prop_map(|(a, b)| ExactScalar::quad(a, 1, b, 1, 5)),
        (1i64..8, 1i64..5).prop_map(|(a, b)| ExactScalar::quad(a, 1, -1, b, 5)),
    ]
    .prop_filter("positive", |x| x.is_positive())
}

/// Random standard or affine exchange on 2 to 5 letters with random flips.
fn random_iet() -> impl Strategy<Value = IntervalExchange> {
    (2usize..=5)
        .prop_flat_map(|n| {
            let perm = || Just((0..n as u8).collect::<Vec<u8>>()).prop_shuffle();
            (
                perm(),
                perm(),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(positive_length(), n),
                prop::collection::vec(positive_length(), n),
                any::<bool>(),
            )
        })
        .prop_map(|(order_d, order_a, flips, lengths, images, affine)| {
            let n = lengths.len();
            let alphabet = Alphabet::from_chars(&"12345"[..n]);
            let flips: BTreeSet<u8> = (0..n as u8).filter(|&l| flips[l as usize]).collect();
            let image_lengths = if affine {
                let total: ExactScalar = lengths.iter().sum();
                let image_total: ExactScalar = images.iter().sum();
                let scale = &total / &image_total;
                Some(images.iter().map(|x| x * &scale).collect())
            } else {
                None
            };
            let kind = if affine { IetKind::Affine } else { IetKind::Standard };
            build_iet(IetSpec { alphabet, lengths, image_lengths, order_d, order_a, flips, kind }).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn field_operations_are_consistent(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn order_is_total_and_matches_floats(a in scalar(), b in scalar()) {
        let exact = a.cmp(&b);
        prop_assert_eq!(exact.reverse(), b.cmp(&a));
        let gap = a.to_f64() - b.to_f64();
        if gap.abs() > 1e-9 {
            prop_assert_eq!(exact, gap.partial_cmp(&0.0).unwrap());
        }
        prop_assert_eq!((&a - &b).signum() as i32, exact as i32);
    }

    #[test]
    fn json_round_trip(a in scalar()) {
        let text = serde_json::to_string(&a).unwrap();
        let back: ExactScalar = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn floor_brackets_the_value(a in scalar()) {
        let f = ExactScalar::from_bigint(a.floor());
        prop_assert!(f <= a);
        prop_assert!(a < &f + &ExactScalar::one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn map_is_invertible_off_endpoints(t in random_iet(), num in 1i64..997) {
        let x = &ExactScalar::ratio(num, 997) * t.total();
        if let Ok(Step::Defined(y)) = t.apply(&x, Direction::Forward) {
            prop_assert_eq!(t.apply(&y, Direction::Backward).unwrap(), Step::Defined(x));
        }
    }

    #[test]
    fn coding_language_satisfies_its_own_order(t in random_iet()) {
        let lang = language_from_iet(&t, 12).unwrap();
        let spec = OrderSpec::from_iet(&t);
        prop_assert_eq!(check_order_condition(&lang, &spec), OrderVerdict::Holds);

        let reports = classify_bispecials(&lang);
        for r in &reports {
            prop_assert!(
                !matches!(r.classification, Classification::Strong | Classification::LocallyStrongOnly),
                "{:?} is {:?}", lang.alphabet().render(&r.word), r.classification
            );
        }

        let weak: BTreeSet<Vec<u8>> =
            reports.iter().filter(|r| r.classification == Classification::Weak).map(|r| r.word.clone()).collect();
        let conn = find_connections(&lang, &spec);
        prop_assert!(conn.warning.is_none());
        let connected: BTreeSet<Vec<u8>> = conn.witnesses.iter().map(|c| c.w.clone()).collect();
        prop_assert_eq!(&weak, &connected);

        let c = complexity_profile(&lang);
        let k = lang.alphabet().len() as i64 - 1;
        // With no strong bispecial, s never grows and drops exactly at lengths carrying a weak word.
        for (i, w) in c.s.windows(2).enumerate() {
            prop_assert!(w[1] <= w[0]);
            let drops = weak.iter().any(|u| u.len() == i + 1);
            prop_assert_eq!(w[1] < w[0], drops);
        }
        if connected.is_empty() {
            prop_assert_eq!(c.p[0] as i64 - 1, k);
            prop_assert!(c.s.iter().all(|&s| s == k), "s = {:?}", c.s);
        }

        prop_assert!(left_special_profile(&lang).holds());
    }

    #[test]
    fn sequence_order_agrees_with_point_order(t in random_iet(), a in 1i64..1000, b in 1i64..1000) {
        prop_assume!(a != b);
        let x = &ExactScalar::ratio(a, 1009) * t.total();
        let y = &ExactScalar::ratio(b, 1009) * t.total();
        let (Ok(cx), Ok(cy)) = (t.natural_coding(&x, 10, 10), t.natural_coding(&y, 10, 10)) else {
            return Ok(());
        };
        if cx.forward_truncated_at.is_some() || cy.forward_truncated_at.is_some()
            || cx.backward_truncated_at.is_some() || cy.backward_truncated_at.is_some() {
            return Ok(());
        }
        let spec = OrderSpec::from_iet(&t);
        let want = if x < y { SeqOrder::Less } else { SeqOrder::Greater };
        match sequence_order(&spec, &cx.window, &cy.window).unwrap() {
            SeqOrder::Unresolved | SeqOrder::Equal => {}
            got => prop_assert_eq!(got, want),
        }
    }
}

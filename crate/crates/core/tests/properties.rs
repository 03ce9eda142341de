use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use gwlab::etale::{norm_to, transfer_to};
use gwlab::expmod::exp;
use gwlab::expr::parse_gw;
use gwlab::gw::GwElem;
use gwlab::laurent::log;
use gwlab::localsymbols::{hilbert, relevant_places, square_class_q, Place};
use gwlab::oracle::{counting_isometric, direct_norm, direct_transfer};
use gwlab::{FieldElem, FieldTower};

fn q() -> FieldTower {
    FieldTower::rationals()
}

fn nonzero(range: i64) -> impl Strategy<Value = i64> {
    (-range..=range).prop_filter("nonzero", |n| *n != 0)
}

fn signed_entries() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((nonzero(40), -2i64..=2), 0..5)
}

fn gw_of(k: &FieldTower, e: &[(i64, i64)]) -> GwElem {
    e.iter().fold(GwElem::zero(k), |acc, &(a, m)| &acc + &GwElem::class_int(k, a).scale(m))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn same(a: &GwElem, b: &GwElem) -> bool {
    a.equals(b).unwrap().is_true()
}

/// ±⟨a⟩(1 + s(⟨b⟩−1)(⟨c⟩−1)) with b > 0, a unit over ℚ.
fn unit(a: i64, b: i64, c: i64, s: i64) -> GwElem {
    let k = q();
    let one = GwElem::one(&k);
    let t = &(&GwElem::class_int(&k, b) - &one) * &(&GwElem::class_int(&k, c) - &one);
    &GwElem::class_int(&k, a) * &(&one + &t.scale(s))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn gw_is_a_commutative_ring(x in signed_entries(), y in signed_entries(), z in signed_entries()) {
        let k = q();
        let (x, y, z) = (gw_of(&k, &x), gw_of(&k, &y), gw_of(&k, &z));
        prop_assert!(same(&(&x * &y), &(&y * &x)));
        prop_assert!(same(&(&(&x + &y) * &z), &(&(&x * &z) + &(&y * &z))));
        prop_assert!(same(&(&(&x * &y) * &z), &(&x * &(&y * &z))));
        prop_assert_eq!((&x * &y).dim(), x.dim() * y.dim());
    }

    #[test]
    fn reduction_is_canonical(x in signed_entries(), r in nonzero(6)) {
        let k = q();
        let x = gw_of(&k, &x);
        let red = x.reduced();
        prop_assert!(same(&red, &x));
        prop_assert_eq!(red.reduced(), red.clone());
        // The same class written with rescaled entries and a cancelling pair.
        let y = x
            .terms()
            .fold(GwElem::zero(&k), |acc, (a, m)| {
                let e = &a.elem(&k) * &k.int(r * r);
                &acc + &GwElem::class(&e).unwrap().scale(m)
            });
        let y = &(&y + &GwElem::class_int(&k, 7 * r * r)) - &GwElem::class_int(&k, 7);
        prop_assert_eq!(y.reduced(), red);
    }

    #[test]
    fn display_round_trips(x in signed_entries()) {
        let k = q();
        let x = gw_of(&k, &x);
        prop_assert_eq!(parse_gw(&k, &x.to_string()).unwrap(), x);
    }

    #[test]
    fn hilbert_symbol_laws(a in nonzero(200), b in nonzero(200), c in nonzero(200)) {
        let mut places = relevant_places([BigInt::from(a), BigInt::from(b), BigInt::from(c)].iter());
        places.push(Place::Finite(BigInt::from(3)));
        for v in &places {
            let h = |x: i64, y: i64| hilbert(&rat(x), &rat(y), v).unwrap();
            prop_assert_eq!(h(a, b), h(b, a));
            prop_assert_eq!(h(a, b * c), h(a, b) * h(a, c));
            prop_assert_eq!(h(a, -a), 1);
        }
        let all = relevant_places([BigInt::from(a), BigInt::from(b)].iter());
        prop_assert_eq!(all.iter().map(|v| hilbert(&rat(a), &rat(b), v).unwrap()).product::<i32>(), 1);
    }

    #[test]
    fn square_classes_ignore_squares(a in nonzero(500), r in nonzero(30), s in nonzero(30)) {
        let x = BigRational::new(BigInt::from(a * r * r), BigInt::from(s * s));
        prop_assert_eq!(square_class_q(&x).unwrap(), square_class_q(&rat(a)).unwrap());
    }

    #[test]
    fn transfer_matches_the_trace_gram_matrix(p in prop::sample::select(vec![3u64, 5, 7, 11]), e in prop::collection::vec((1i64..50, 0i64..50, -2i64..=2), 1..4)) {
        let k = FieldTower::prime_field(p);
        let l = k.extend(&k.nonsquare()).unwrap();
        let g = l.sqrt_gen(1).unwrap();
        let x = e.iter().fold(GwElem::zero(&l), |acc, &(u, v, m)| {
            let c = &l.int(u) + &(&l.int(v) * &g);
            if c.is_zero() { acc } else { &acc + &GwElem::class(&c).unwrap().scale(m) }
        });
        prop_assert!(same(&transfer_to(&x, &k).unwrap(), &direct_transfer(&x, &k).unwrap()));
    }

    #[test]
    fn norm_matches_tensor_induction(p in prop::sample::select(vec![3u64, 5, 7, 13]), e in prop::collection::vec((0i64..40, 0i64..40), 1..4)) {
        let k = FieldTower::prime_field(p);
        let l = k.extend(&k.nonsquare()).unwrap();
        let g = l.sqrt_gen(1).unwrap();
        let entries: Vec<FieldElem> = e
            .iter()
            .map(|&(u, v)| &l.int(u) + &(&l.int(v) * &g))
            .filter(|c| !c.is_zero())
            .collect();
        prop_assume!(!entries.is_empty());
        let x = entries.iter().fold(GwElem::zero(&l), |acc, c| &acc + &GwElem::class(c).unwrap());
        prop_assert!(same(&norm_to(&x, &k).unwrap(), &direct_norm(&entries, &k).unwrap()));
    }

    #[test]
    fn finite_field_isometry_agrees_with_counting(p in prop::sample::select(vec![3u64, 5, 7]), a in prop::collection::vec(1i64..7, 1..4), b in prop::collection::vec(1i64..7, 1..4)) {
        let k = FieldTower::prime_field(p);
        let ea: Vec<FieldElem> = a.iter().map(|&n| k.int(n)).filter(|c| !c.is_zero()).collect();
        let eb: Vec<FieldElem> = b.iter().map(|&n| k.int(n)).filter(|c| !c.is_zero()).collect();
        prop_assume!(!ea.is_empty() && !eb.is_empty());
        let form = |e: &[FieldElem]| e.iter().fold(GwElem::zero(&k), |acc, c| &acc + &GwElem::class(c).unwrap());
        let ours = form(&ea).equals(&form(&eb)).unwrap().known().unwrap();
        prop_assert_eq!(ours, counting_isometric(&ea, &eb).unwrap());
    }

    #[test]
    fn integer_exponents_are_powers(a in nonzero(30), b in 1i64..30, c in nonzero(30), s in -1i64..=1, n in 0i64..5) {
        let k = q();
        let x = unit(a, b, c, s);
        prop_assert!(same(&exp(&x, &GwElem::int(&k, n)).unwrap(), &x.pow(n as u32)));
        prop_assert!(same(&exp(&x, &GwElem::int(&k, -1)).unwrap(), &x.unit_inverse().unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn log_turns_products_into_sums(b1 in 1i64..30, c1 in nonzero(30), b2 in 1i64..30, c2 in nonzero(30)) {
        let x = unit(1, b1, c1, 1);
        let y = unit(1, b2, c2, -1);
        let lhs = log(&(&x * &y).reduced()).unwrap();
        prop_assert!(same(&lhs, &(&log(&x).unwrap() + &log(&y).unwrap())));
    }
}

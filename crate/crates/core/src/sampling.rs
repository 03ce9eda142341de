//! Random elements for the property suites.
//!
//! Entries come from a small pool: squarefree integers in [−30, 30] over ℚ,
//! every nonzero residue over 𝔽_p, and short combinations of the square-root
//! generators over towers. Forms have length at most 6.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fields::{BaseField, FieldElem, FieldTower};
use crate::gw::GwElem;

pub const MAX_LEN: usize = 6;

fn squarefree(n: i64) -> bool {
    let n = n.abs();
    (2..=5).all(|p| n % (p * p) != 0)
}

fn base_scalar(k: &FieldTower, rng: &mut impl Rng) -> FieldElem {
    match k.base() {
        BaseField::Rationals => loop {
            let n = rng.gen_range(-30i64..=30);
            if n != 0 && squarefree(n) {
                return k.int(n);
            }
        },
        BaseField::PrimeField(p) => k.int(rng.gen_range(1..p as i64)),
    }
}

/// A nonzero element of k.
pub fn random_scalar(k: &FieldTower, rng: &mut impl Rng) -> FieldElem {
    let x = base_scalar(k, rng);
    if k.height() == 0 || rng.gen_bool(0.4) {
        return x;
    }
    loop {
        let mut y = k.int(rng.gen_range(-3i64..=3));
        for i in 1..=k.height() {
            if rng.gen_bool(0.7) {
                y = &y + &(&k.sqrt_gen(i).unwrap() * &k.int(rng.gen_range(-2i64..=2)));
            }
        }
        if !y.is_zero() {
            return y;
        }
    }
}

/// A nonzero element positive at every real embedding.
pub fn random_positive(k: &FieldTower, rng: &mut impl Rng) -> FieldElem {
    match k.base() {
        BaseField::PrimeField(_) => random_scalar(k, rng),
        BaseField::Rationals => loop {
            let n = rng.gen_range(1i64..=30);
            if squarefree(n) {
                return k.int(n);
            }
        },
    }
}

pub fn random_entries(k: &FieldTower, rng: &mut impl Rng, max_len: usize) -> Vec<FieldElem> {
    let n = rng.gen_range(1..=max_len.max(1));
    (0..n).map(|_| random_scalar(k, rng)).collect()
}

fn class(a: &FieldElem) -> GwElem {
    GwElem::class(a).expect("nonzero entry")
}

fn sum_classes(k: &FieldTower, entries: &[FieldElem]) -> GwElem {
    entries.iter().fold(GwElem::zero(k), |acc, a| &acc + &class(a))
}

/// A genuine form of length ≤ `max_len`.
pub fn random_form(k: &FieldTower, rng: &mut impl Rng, max_len: usize) -> GwElem {
    sum_classes(k, &random_entries(k, rng, max_len))
}

/// P − M with |P| ≤ 4 and |M| ≤ 2.
pub fn random_gw(k: &FieldTower, rng: &mut impl Rng) -> GwElem {
    let p = rng.gen_range(0..=4);
    let m = rng.gen_range(0..=2);
    let pe: Vec<_> = (0..p).map(|_| random_scalar(k, rng)).collect();
    let me: Vec<_> = (0..m).map(|_| random_scalar(k, rng)).collect();
    &sum_classes(k, &pe) - &sum_classes(k, &me)
}

/// P − M with |P| ≤ 2 and |M| ≤ 1, for exponents over extensions where
/// products of long elements get expensive.
pub fn random_short_gw(k: &FieldTower, rng: &mut impl Rng) -> GwElem {
    let p = rng.gen_range(0..=2);
    let m = rng.gen_range(0..=1);
    let pe: Vec<_> = (0..p).map(|_| random_scalar(k, rng)).collect();
    let me: Vec<_> = (0..m).map(|_| random_scalar(k, rng)).collect();
    &sum_classes(k, &pe) - &sum_classes(k, &me)
}

/// ∏ (⟨aᵢ⟩ − 1) over n random entries.
pub fn random_pfister(k: &FieldTower, rng: &mut impl Rng, n: u32) -> GwElem {
    let one = GwElem::one(k);
    (0..n).fold(one.clone(), |acc, _| &acc * &(&class(&random_scalar(k, rng)) - &one))
}

/// A sum of one or two signed n-fold Pfister differences, an element of Iⁿ.
pub fn random_in(k: &FieldTower, rng: &mut impl Rng, n: u32) -> GwElem {
    let terms = rng.gen_range(1..=2);
    (0..terms).fold(GwElem::zero(k), |acc, _| {
        let p = random_pfister(k, rng, n);
        if rng.gen_bool(0.5) {
            &acc + &p
        } else {
            &acc - &p
        }
    })
}

fn torsion_term(k: &FieldTower, rng: &mut impl Rng) -> GwElem {
    let one = GwElem::one(k);
    let a = &class(&random_positive(k, rng)) - &one;
    let b = &class(&random_scalar(k, rng)) - &one;
    let t = &a * &b;
    if rng.gen_bool(0.5) {
        t
    } else {
        -t
    }
}

/// A torsion element of I²: terms ±(⟨a⟩−1)(⟨b⟩−1) with a totally positive.
pub fn random_torsion_i2(k: &FieldTower, rng: &mut impl Rng) -> GwElem {
    let terms = rng.gen_range(1..=2);
    (0..terms).fold(GwElem::zero(k), |acc, _| &acc + &torsion_term(k, rng)).reduced()
}

/// 1 ± (⟨a⟩−1)(⟨b⟩−1) with a totally positive: a short element of F₂.
pub fn random_short_f2(k: &FieldTower, rng: &mut impl Rng) -> GwElem {
    (&GwElem::one(k) + &torsion_term(k, rng)).reduced()
}

/// An element 1 + z of F₂, z ∈ I²_tor.
pub fn random_f2(k: &FieldTower, rng: &mut impl Rng) -> GwElem {
    &GwElem::one(k) + &random_torsion_i2(k, rng)
}

/// A unit of F₁: ⟨a⟩ or ⟨a⟩·(1 + z).
pub fn random_f1(k: &FieldTower, rng: &mut impl Rng) -> GwElem {
    let a = class(&random_scalar(k, rng));
    if rng.gen_bool(0.5) {
        a
    } else {
        (&a * &random_f2(k, rng)).reduced()
    }
}

/// ±⟨a⟩·(1 + z) for z ∈ I²_tor.
pub fn random_unit(k: &FieldTower, rng: &mut impl Rng) -> GwElem {
    let u = random_f1(k, rng);
    if rng.gen_bool(0.5) {
        -u
    } else {
        u
    }
}

/// Elements on both sides of 2GW + I², for exactness checks.
pub fn random_exactness_candidate(k: &FieldTower, rng: &mut impl Rng) -> GwElem {
    let one = GwElem::one(k);
    match rng.gen_range(0..5) {
        0 => random_gw(k, rng),
        1 => random_gw(k, rng).scale(2),
        2 => &random_in(k, rng, 2) + &random_gw(k, rng).scale(2),
        3 => &class(&random_scalar(k, rng)) - &one,
        _ => &random_in(k, rng, 1) + &random_gw(k, rng).scale(2),
    }
}

/// A signed entry list representing x, shuffled, with cancelling pairs and
/// square rescalings mixed in so the representation is far from canonical.
pub fn scrambled_entries(x: &GwElem, rng: &mut impl Rng) -> Vec<(FieldElem, bool)> {
    let k = x.tower();
    let mut out = Vec::new();
    for (a, m) in x.terms() {
        for _ in 0..m.unsigned_abs() {
            let r = random_scalar(k, rng);
            out.push((&a.elem(k) * &(&r * &r), m < 0));
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        let b = random_scalar(k, rng);
        let r = random_scalar(k, rng);
        out.push((b.clone(), false));
        out.push((&b * &(&r * &r), true));
    }
    out.shuffle(rng);
    out
}

/// The first `count` nonsquare integers of k. Over 𝔽_p these all define the same
/// field, but through different presentations.
pub fn nonsquares(k: &FieldTower, count: usize) -> Vec<FieldElem> {
    let mut out: Vec<FieldElem> = Vec::new();
    let candidates: Vec<i64> = match k.base() {
        BaseField::Rationals => vec![-1, 2, 3, 5, -3, 7, -2, 6],
        BaseField::PrimeField(p) => (2..p as i64).collect(),
    };
    for n in candidates {
        let a = k.int(n);
        if a.is_zero() || a.is_square().unwrap() {
            continue;
        }
        out.push(a);
        if out.len() == count {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_have_their_advertised_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for k in [FieldTower::rationals(), FieldTower::prime_field(5), FieldTower::rationals().extend_int(5).unwrap()] {
            for _ in 0..20 {
                assert!(random_in(&k, &mut rng, 2).in_in(2).is_true());
                assert!(random_f2(&k, &mut rng).in_fn(2).is_true());
                assert!(random_unit(&k, &mut rng).is_unit().is_true());
                let x = random_gw(&k, &mut rng);
                let e = scrambled_entries(&x, &mut rng);
                let y = e.iter().fold(GwElem::zero(&k), |acc, (a, neg)| {
                    let c = GwElem::class(a).unwrap();
                    if *neg {
                        &acc - &c
                    } else {
                        &acc + &c
                    }
                });
                assert!(y.equals(&x).unwrap().is_true());
            }
        }
        assert_eq!(nonsquares(&FieldTower::prime_field(3), 3).len(), 1);
        assert_eq!(nonsquares(&FieldTower::prime_field(13), 3).len(), 3);
        assert_eq!(nonsquares(&FieldTower::rationals(), 3).len(), 3);
    }
}

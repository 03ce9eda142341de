//! Square classes k^×/k^×² used as keys of diagonal forms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::fields::{BaseField, FieldElem, FieldTower, Repr};
use crate::localsymbols::square_class_q;

/// A square class. Canonical over ℚ and finite towers; over ℚ-towers of
/// positive height the key is a content-normalized representative, so two
/// keys may name the same class (use [`SquareClass::same_class`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SquareClass {
    /// Squarefree integer.
    Rational(BigInt),
    /// `true` for the non-square class of a finite field.
    Finite(bool),
    Element(Repr),
}

fn normalize_tower(t: &FieldTower, a: &Repr) -> Repr {
    let h = t.height();
    let terms = a.flatten(h);
    let mut l = BigInt::one();
    for (_, c) in &terms {
        let Repr::Rat(r) = c else { unreachable!() };
        l = l.lcm(r.denom());
    }
    let l2 = BigRational::from_integer(&l * &l);
    let ints: Vec<(u32, BigInt)> = terms
        .iter()
        .map(|(m, c)| {
            let Repr::Rat(r) = c else { unreachable!() };
            (*m, (r * &l2).to_integer())
        })
        .collect();
    let mut g = BigInt::zero();
    for (_, c) in &ints {
        g = g.gcd(c);
    }
    let (_, f) = arith::squarefree_decompose(&g);
    let f2 = BigInt::from(&f * &f);
    let mut out: Vec<(u32, Repr)> = ints
        .into_iter()
        .map(|(m, c)| (m, Repr::Rat(BigRational::from_integer(c / &f2))))
        .collect();
    if out.len() == 1 && out[0].0 == 0 {
        let Repr::Rat(r) = &out[0].1 else { unreachable!() };
        out[0].1 = Repr::Rat(BigRational::from_integer(square_class_q(r).unwrap()));
    }
    Repr::unflatten(&out, h, &Repr::Rat(BigRational::zero()))
}

impl SquareClass {
    pub fn of(a: &FieldElem) -> Result<SquareClass> {
        if a.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let t = &a.tower;
        Ok(match (t.base(), t.height()) {
            (BaseField::PrimeField(_), _) => SquareClass::Finite(!a.is_square()?),
            (BaseField::Rationals, 0) => {
                let Repr::Rat(r) = &a.repr else { unreachable!() };
                SquareClass::Rational(square_class_q(r)?)
            }
            (BaseField::Rationals, _) => SquareClass::Element(normalize_tower(t, &a.repr)),
        })
    }

    pub fn from_int(t: &FieldTower, n: i64) -> SquareClass {
        SquareClass::of(&t.int(n)).expect("nonzero integer")
    }

    pub fn one(t: &FieldTower) -> SquareClass {
        Self::from_int(t, 1)
    }

    /// A representative element.
    pub fn elem(&self, t: &FieldTower) -> FieldElem {
        match self {
            SquareClass::Rational(n) => t.rational(&BigRational::from_integer(n.clone())).unwrap(),
            SquareClass::Finite(false) => t.one(),
            SquareClass::Finite(true) => t.nonsquare(),
            SquareClass::Element(r) => t.elem(r.clone()),
        }
    }

    pub fn mul(&self, o: &SquareClass, t: &FieldTower) -> SquareClass {
        match (self, o) {
            (SquareClass::Rational(a), SquareClass::Rational(b)) => {
                let g = a.gcd(b);
                SquareClass::Rational(a / &g * (b / &g))
            }
            (SquareClass::Finite(a), SquareClass::Finite(b)) => SquareClass::Finite(a ^ b),
            _ => SquareClass::of(&(&self.elem(t) * &o.elem(t))).unwrap(),
        }
    }

    pub fn is_one(&self, t: &FieldTower) -> bool {
        match self {
            SquareClass::Rational(n) => n.is_one(),
            SquareClass::Finite(b) => !b,
            SquareClass::Element(r) => t.lv().is_square(r),
        }
    }

    pub fn same_class(&self, o: &SquareClass, t: &FieldTower) -> bool {
        match self {
            SquareClass::Element(_) => self == o || (&self.elem(t) * &o.elem(t)).is_square().unwrap_or(false),
            _ => self == o,
        }
    }

    /// The squarefree integer of a class lying in ℚ, if it does.
    pub fn rational(&self, t: &FieldTower) -> Option<BigInt> {
        match self {
            SquareClass::Rational(n) => Some(n.clone()),
            SquareClass::Element(_) => {
                let r = self.elem(t).as_rational()?;
                Some(square_class_q(&r).unwrap())
            }
            SquareClass::Finite(_) => None,
        }
    }

    /// Sign under a real embedding of the tower.
    pub fn sign(&self, t: &FieldTower, signs: &[i8]) -> i8 {
        match self {
            SquareClass::Rational(n) => {
                if n.is_negative() {
                    -1
                } else {
                    1
                }
            }
            SquareClass::Finite(_) => panic!("finite fields are not ordered"),
            SquareClass::Element(r) => t.lv().sign_at(r, signs),
        }
    }

    pub fn display<'a>(&'a self, t: &'a FieldTower) -> impl fmt::Display + 'a {
        ClassDisplay(self, t)
    }
}

struct ClassDisplay<'a>(&'a SquareClass, &'a FieldTower);

impl fmt::Display for ClassDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            SquareClass::Rational(n) => write!(f, "{n}"),
            c => write!(f, "{}", c.elem(self.1)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_classes_multiply() {
        let q = FieldTower::rationals();
        let a = SquareClass::from_int(&q, 6);
        let b = SquareClass::from_int(&q, -10);
        assert_eq!(a.mul(&b, &q), SquareClass::from_int(&q, -15));
        assert!(a.mul(&a, &q).is_one(&q));
    }

    #[test]
    fn finite_classes() {
        let f = FieldTower::prime_field(7);
        assert_eq!(SquareClass::from_int(&f, 2), SquareClass::Finite(false));
        assert_eq!(SquareClass::from_int(&f, 3), SquareClass::Finite(true));
        let f49 = f.extend_int(3).unwrap();
        assert_eq!(SquareClass::from_int(&f49, 3), SquareClass::Finite(false));
    }

    #[test]
    fn tower_normalization_scales_out_squares() {
        let t = FieldTower::rationals().extend_int(5).unwrap();
        let s = t.sqrt_gen(1).unwrap();
        let a = &t.int(1) + &s;
        let b = &(&t.int(4) + &(&t.int(4) * &s)) / &t.int(9);
        assert_eq!(SquareClass::of(&a).unwrap(), SquareClass::of(&b).unwrap());
        assert!(SquareClass::from_int(&t, 5).is_one(&t));
        let c = SquareClass::of(&(&a * &(&a * &a))).unwrap();
        assert!(c.same_class(&SquareClass::of(&a).unwrap(), &t));
    }
}

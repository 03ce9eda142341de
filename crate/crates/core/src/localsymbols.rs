//! Legendre and Hilbert symbols over ℚ.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};

/// A place of ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Finite(BigInt),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Place> {
        match s.trim() {
            "inf" | "real" | "oo" => Ok(Place::Real),
            t => {
                let p: BigInt = t
                    .parse()
                    .map_err(|_| Error::Syntax { pos: 0, msg: format!("bad place `{t}`") })?;
                if p < BigInt::from(2) || arith::factor(p.magnitude()).len() != 1 || arith::factor(p.magnitude())[0].1 != 1 {
                    return Err(Error::Syntax { pos: 0, msg: format!("{p} is not prime") });
                }
                Ok(Place::Finite(p))
            }
        }
    }
}

/// Jacobi symbol (a|n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    assert!(n.is_positive() && n.is_odd(), "jacobi needs an odd positive modulus");
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Legendre symbol (a|p) for an odd prime p.
pub fn legendre(a: &BigInt, p: &BigInt) -> i32 {
    jacobi(a, p)
}

/// The squarefree integer representing the square class of `a`.
pub fn square_class_q(a: &BigRational) -> Result<BigInt> {
    if a.is_zero() {
        return Err(Error::ZeroArgument);
    }
    Ok(arith::squarefree_part(&(a.numer() * a.denom())))
}

fn split_val(a: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut u = a.clone();
    let mut v = 0;
    while (&u % p).is_zero() {
        u /= p;
        v += 1;
    }
    (v, u)
}

fn mod_small(a: &BigInt, m: u32) -> u32 {
    a.mod_floor(&BigInt::from(m)).to_u32().unwrap()
}

/// Hilbert symbol of two nonzero integers.
pub fn hilbert_int(a: &BigInt, b: &BigInt, v: &Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    Ok(match v {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) => {
            let (al, u) = split_val(a, p);
            let (be, w) = split_val(b, p);
            if *p == BigInt::from(2) {
                let eps = |x: &BigInt| (mod_small(x, 4) + 3) % 4 / 2;
                let omega = |x: &BigInt| {
                    let r = mod_small(x, 8);
                    u32::from(r == 3 || r == 5)
                };
                let e = eps(&u) * eps(&w) + al * omega(&w) + be * omega(&u);
                if e % 2 == 0 {
                    1
                } else {
                    -1
                }
            } else {
                let ep = mod_small(p, 4) == 3;
                let mut s = if ep && (al * be) % 2 == 1 { -1 } else { 1 };
                if be % 2 == 1 {
                    s *= legendre(&u, p);
                }
                if al % 2 == 1 {
                    s *= legendre(&w, p);
                }
                s
            }
        }
    })
}

/// The Hilbert symbol (a,b)_v of nonzero rationals.
pub fn hilbert(a: &BigRational, b: &BigRational, v: &Place) -> Result<i32> {
    hilbert_int(&square_class_q(a)?, &square_class_q(b)?, v)
}

/// The real place, 2, and every prime dividing a numerator or denominator.
pub fn relevant_places<'a>(entries: impl IntoIterator<Item = &'a BigInt>) -> Vec<Place> {
    let mut ps: Vec<BigInt> = vec![BigInt::from(2)];
    for e in entries {
        ps.extend(arith::prime_divisors(e));
    }
    ps.sort();
    ps.dedup();
    let mut out = vec![Place::Real];
    out.extend(ps.into_iter().map(Place::Finite));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn legendre_against_enumeration() {
        for p in [3i64, 5, 7, 11, 13, 29] {
            for a in -40i64..40 {
                let expect = if a.rem_euclid(p) == 0 {
                    0
                } else if (1..p).any(|x| (x * x - a).rem_euclid(p) == 0) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre(&b(a), &b(p)), expect, "({a}|{p})");
            }
        }
    }

    #[test]
    fn square_classes() {
        let r = |n: i64, d: i64| BigRational::new(b(n), b(d));
        assert_eq!(square_class_q(&r(8, 3)).unwrap(), b(6));
        assert_eq!(square_class_q(&r(-4, 1)).unwrap(), b(-1));
        assert_eq!(square_class_q(&r(1, 1)).unwrap(), b(1));
        assert!(square_class_q(&r(0, 1)).is_err());
    }

    #[test]
    fn hilbert_examples() {
        let two = Place::Finite(b(2));
        let five = Place::Finite(b(5));
        assert_eq!(hilbert_int(&b(-1), &b(-1), &Place::Real).unwrap(), -1);
        assert_eq!(hilbert_int(&b(2), &b(5), &five).unwrap(), -1);
        assert_eq!(hilbert_int(&b(-1), &b(-1), &two).unwrap(), -1);
        assert_eq!(hilbert_int(&b(2), &b(3), &two).unwrap(), -1);
        assert_eq!(hilbert_int(&b(2), &b(7), &two).unwrap(), 1);
    }

    #[test]
    fn place_parsing() {
        assert_eq!("inf".parse::<Place>().unwrap(), Place::Real);
        assert_eq!("7".parse::<Place>().unwrap(), Place::Finite(b(7)));
        assert!("9".parse::<Place>().is_err());
    }
}

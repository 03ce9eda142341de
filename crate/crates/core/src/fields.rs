//! Concrete fields: ℚ, 𝔽_p and towers of quadratic extensions over them.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};

pub const DEFAULT_HEIGHT_LIMIT: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseField {
    Rationals,
    PrimeField(u64),
}

impl BaseField {
    pub fn prime(p: u64) -> Result<BaseField> {
        if p == 2 || !arith::is_prime_u64(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(BaseField::PrimeField(p))
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rationals => write!(f, "Q"),
            BaseField::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// Coefficient tree of a field element. At height `h` the nesting depth is `h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Repr {
    Rat(BigRational),
    Res(u64),
    Ext(Box<(Repr, Repr)>),
}

impl Repr {
    pub fn pair(a: Repr, b: Repr) -> Repr {
        Repr::Ext(Box::new((a, b)))
    }

    pub fn parts(&self) -> (&Repr, &Repr) {
        match self {
            Repr::Ext(b) => (&b.0, &b.1),
            _ => panic!("base coefficient has no quadratic parts"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Repr::Rat(r) => r.is_zero(),
            Repr::Res(x) => *x == 0,
            Repr::Ext(b) => b.0.is_zero() && b.1.is_zero(),
        }
    }

    /// Coefficients as a map from monomial masks (bit i ↔ √d_{i+1}).
    pub fn flatten(&self, h: usize) -> Vec<(u32, Repr)> {
        let mut out = Vec::new();
        self.flatten_into(h, 0, &mut out);
        out
    }

    fn flatten_into(&self, h: usize, mask: u32, out: &mut Vec<(u32, Repr)>) {
        match self {
            Repr::Ext(b) => {
                b.0.flatten_into(h - 1, mask, out);
                b.1.flatten_into(h - 1, mask | (1 << (h - 1)), out);
            }
            leaf => {
                if !leaf.is_zero() {
                    out.push((mask, leaf.clone()));
                }
            }
        }
    }

    /// Inverse of [`Repr::flatten`].
    pub fn unflatten(terms: &[(u32, Repr)], h: usize, zero: &Repr) -> Repr {
        if h == 0 {
            return terms
                .iter()
                .find(|(m, _)| *m == 0)
                .map(|(_, r)| r.clone())
                .unwrap_or_else(|| zero.clone());
        }
        let bit = 1 << (h - 1);
        let lo: Vec<_> = terms.iter().filter(|(m, _)| m & bit == 0).cloned().collect();
        let hi: Vec<_> = terms
            .iter()
            .filter(|(m, _)| m & bit != 0)
            .map(|(m, r)| (m & !bit, r.clone()))
            .collect();
        Repr::pair(Repr::unflatten(&lo, h - 1, zero), Repr::unflatten(&hi, h - 1, zero))
    }
}

/// Arithmetic context for one level of a tower.
#[derive(Clone, Copy)]
pub struct Lv<'a> {
    pub base: BaseField,
    pub ds: &'a [Repr],
}

impl<'a> Lv<'a> {
    pub fn height(&self) -> usize {
        self.ds.len()
    }

    pub fn lower(&self) -> Lv<'a> {
        Lv { base: self.base, ds: &self.ds[..self.ds.len() - 1] }
    }

    fn d(&self) -> &'a Repr {
        &self.ds[self.ds.len() - 1]
    }

    pub fn zero(&self) -> Repr {
        self.from_int(0)
    }

    pub fn one(&self) -> Repr {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Repr {
        self.from_rational(&BigRational::from_integer(n.into()))
            .expect("integer denominators are invertible")
    }

    /// Embeds a rational; fails over 𝔽_p when the denominator vanishes.
    pub fn from_rational(&self, r: &BigRational) -> Result<Repr> {
        let leaf = match self.base {
            BaseField::Rationals => Repr::Rat(r.clone()),
            BaseField::PrimeField(p) => {
                let pb = BigInt::from(p);
                let num = ((r.numer() % &pb) + &pb) % &pb;
                let den = ((r.denom() % &pb) + &pb) % &pb;
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let n = num.to_u64().unwrap();
                let d = den.to_u64().unwrap();
                Repr::Res(n * arith::inv_mod(d, p) % p)
            }
        };
        Ok(self.embed(leaf, 0))
    }

    /// Lifts an element of level `from` to this level.
    pub fn embed(&self, x: Repr, from: usize) -> Repr {
        let mut r = x;
        for h in from..self.height() {
            let z = Lv { base: self.base, ds: &self.ds[..h] }.zero();
            r = Repr::pair(r, z);
        }
        r
    }

    /// The generator √d of the top step.
    pub fn gen(&self) -> Repr {
        let l = self.lower();
        Repr::pair(l.zero(), l.one())
    }

    pub fn add(&self, a: &Repr, b: &Repr) -> Repr {
        match (a, b) {
            (Repr::Rat(x), Repr::Rat(y)) => Repr::Rat(x + y),
            (Repr::Res(x), Repr::Res(y)) => {
                let BaseField::PrimeField(p) = self.base else { unreachable!() };
                Repr::Res((x + y) % p)
            }
            (Repr::Ext(x), Repr::Ext(y)) => {
                let l = self.lower();
                Repr::pair(l.add(&x.0, &y.0), l.add(&x.1, &y.1))
            }
            _ => panic!("coefficient trees of different shapes"),
        }
    }

    pub fn neg(&self, a: &Repr) -> Repr {
        match a {
            Repr::Rat(x) => Repr::Rat(-x),
            Repr::Res(x) => {
                let BaseField::PrimeField(p) = self.base else { unreachable!() };
                Repr::Res((p - x) % p)
            }
            Repr::Ext(x) => {
                let l = self.lower();
                Repr::pair(l.neg(&x.0), l.neg(&x.1))
            }
        }
    }

    pub fn sub(&self, a: &Repr, b: &Repr) -> Repr {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Repr, b: &Repr) -> Repr {
        match (a, b) {
            (Repr::Rat(x), Repr::Rat(y)) => Repr::Rat(x * y),
            (Repr::Res(x), Repr::Res(y)) => {
                let BaseField::PrimeField(p) = self.base else { unreachable!() };
                Repr::Res(((*x as u128 * *y as u128) % p as u128) as u64)
            }
            (Repr::Ext(x), Repr::Ext(y)) => {
                let l = self.lower();
                let (a0, a1) = (&x.0, &x.1);
                let (b0, b1) = (&y.0, &y.1);
                let t = l.mul(&l.mul(a1, b1), self.d());
                Repr::pair(
                    l.add(&l.mul(a0, b0), &t),
                    l.add(&l.mul(a0, b1), &l.mul(a1, b0)),
                )
            }
            _ => panic!("coefficient trees of different shapes"),
        }
    }

    pub fn mul_int(&self, a: &Repr, n: i64) -> Repr {
        self.mul(a, &self.from_int(n))
    }

    pub fn inv(&self, a: &Repr) -> Result<Repr> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match a {
            Repr::Rat(x) => Repr::Rat(x.recip()),
            Repr::Res(x) => {
                let BaseField::PrimeField(p) = self.base else { unreachable!() };
                Repr::Res(arith::inv_mod(*x, p))
            }
            Repr::Ext(_) => {
                let l = self.lower();
                let n = self.norm(a);
                let ni = l.inv(&n)?;
                let c = self.conj(a);
                self.mul(&c, &self.embed(ni, self.height() - 1))
            }
        })
    }

    pub fn div(&self, a: &Repr, b: &Repr) -> Result<Repr> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Repr, mut e: u64) -> Repr {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    pub fn conj(&self, a: &Repr) -> Repr {
        let (u, v) = a.parts();
        Repr::pair(u.clone(), self.lower().neg(v))
    }

    /// a·ā at the level below.
    pub fn norm(&self, a: &Repr) -> Repr {
        let l = self.lower();
        let (u, v) = a.parts();
        l.sub(&l.mul(u, u), &l.mul(&l.mul(v, v), self.d()))
    }

    /// a + ā at the level below.
    pub fn trace(&self, a: &Repr) -> Repr {
        let (u, _) = a.parts();
        self.lower().mul_int(u, 2)
    }

    pub fn is_square(&self, a: &Repr) -> bool {
        if a.is_zero() {
            return true;
        }
        match (self.base, self.height()) {
            (BaseField::PrimeField(p), 0) => {
                let Repr::Res(x) = a else { unreachable!() };
                arith::pow_mod(*x, (p - 1) / 2, p) == 1
            }
            (BaseField::PrimeField(_), _) => self.lower().is_square(&self.norm(a)),
            (BaseField::Rationals, _) => self.sqrt(a).is_some(),
        }
    }

    pub fn sqrt(&self, a: &Repr) -> Option<Repr> {
        if a.is_zero() {
            return Some(a.clone());
        }
        match a {
            Repr::Rat(x) => {
                if x.is_negative() {
                    return None;
                }
                let n = arith::exact_sqrt(x.numer())?;
                let d = arith::exact_sqrt(x.denom())?;
                Some(Repr::Rat(BigRational::new(n, d)))
            }
            Repr::Res(x) => {
                let BaseField::PrimeField(p) = self.base else { unreachable!() };
                arith::sqrt_mod(*x, p).map(Repr::Res)
            }
            Repr::Ext(b) => {
                let l = self.lower();
                let h = self.height();
                let (a0, a1) = (&b.0, &b.1);
                if a1.is_zero() {
                    if let Some(s) = l.sqrt(a0) {
                        return Some(self.embed(s, h - 1));
                    }
                    let q = l.div(a0, self.d()).ok()?;
                    return l.sqrt(&q).map(|s| Repr::pair(l.zero(), s));
                }
                let n = l.sqrt(&self.norm(a))?;
                let half = l.inv(&l.from_int(2)).ok()?;
                for cand in [l.add(a0, &n), l.sub(a0, &n)] {
                    let u2 = l.mul(&cand, &half);
                    if u2.is_zero() {
                        continue;
                    }
                    if let Some(u) = l.sqrt(&u2) {
                        let v = l.div(a1, &l.mul_int(&u, 2)).ok()?;
                        let r = Repr::pair(u, v);
                        if self.mul(&r, &r) == *a {
                            return Some(r);
                        }
                    }
                }
                None
            }
        }
    }

    /// Sign of `a ≠ 0` under the real embedding given by `signs` (one per step).
    pub fn sign_at(&self, a: &Repr, signs: &[i8]) -> i8 {
        match a {
            Repr::Rat(x) => {
                if x.is_positive() {
                    1
                } else if x.is_negative() {
                    -1
                } else {
                    0
                }
            }
            Repr::Res(_) => panic!("finite fields have no real embeddings"),
            Repr::Ext(b) => {
                let l = self.lower();
                let h = self.height();
                let ls = &signs[..h - 1];
                let su = if b.0.is_zero() { 0 } else { l.sign_at(&b.0, ls) };
                let sv = if b.1.is_zero() { 0 } else { signs[h - 1] * l.sign_at(&b.1, ls) };
                if su == 0 {
                    return sv;
                }
                if sv == 0 || su == sv {
                    return su;
                }
                if l.sign_at(&self.norm(a), ls) > 0 {
                    su
                } else {
                    sv
                }
            }
        }
    }
}

struct TowerInner {
    base: BaseField,
    ds: Vec<Repr>,
    limit: usize,
    parent: Option<FieldTower>,
    nonsquare: OnceLock<Repr>,
}

/// ℚ or 𝔽_p extended by a chain of square roots. Cheap to clone.
#[derive(Clone)]
pub struct FieldTower(Arc<TowerInner>);

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.base == other.0.base && self.0.ds == other.0.ds)
    }
}
impl Eq for FieldTower {}

impl Hash for FieldTower {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.base.hash(state);
        self.0.ds.hash(state);
    }
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.parent {
            None => write!(f, "{}", self.0.base),
            Some(p) => {
                let d = FieldElem { tower: p.clone(), repr: self.0.ds.last().unwrap().clone() };
                write!(f, "{p}[sqrt {d}]")
            }
        }
    }
}

impl FieldTower {
    pub fn new(base: BaseField) -> FieldTower {
        Self::with_limit(base, DEFAULT_HEIGHT_LIMIT)
    }

    pub fn with_limit(base: BaseField, limit: usize) -> FieldTower {
        FieldTower(Arc::new(TowerInner {
            base,
            ds: Vec::new(),
            limit,
            parent: None,
            nonsquare: OnceLock::new(),
        }))
    }

    pub fn rationals() -> FieldTower {
        Self::new(BaseField::Rationals)
    }

    /// 𝔽_p; panics unless `p` is an odd prime (see [`BaseField::prime`]).
    pub fn prime_field(p: u64) -> FieldTower {
        Self::new(BaseField::prime(p).expect("odd prime"))
    }

    /// Adjoins √d; `d` must be a nonzero non-square of this field.
    pub fn extend(&self, d: &FieldElem) -> Result<FieldTower> {
        if d.tower != *self {
            return Err(Error::TowerMismatch);
        }
        if d.is_zero() {
            return Err(Error::ZeroArgument);
        }
        if self.height() + 1 > self.0.limit {
            return Err(Error::HeightLimit { height: self.height() + 1, limit: self.0.limit });
        }
        if d.is_square()? {
            return Err(Error::SquareAdjoined(d.to_string()));
        }
        let mut ds = self.0.ds.clone();
        ds.push(d.repr.clone());
        Ok(FieldTower(Arc::new(TowerInner {
            base: self.0.base,
            ds,
            limit: self.0.limit,
            parent: Some(self.clone()),
            nonsquare: OnceLock::new(),
        })))
    }

    /// Adjoins √n for a rational integer n.
    pub fn extend_int(&self, n: i64) -> Result<FieldTower> {
        self.extend(&self.int(n))
    }

    pub fn base(&self) -> BaseField {
        self.0.base
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.0.base, BaseField::PrimeField(_))
    }

    pub fn height(&self) -> usize {
        self.0.ds.len()
    }

    pub fn height_limit(&self) -> usize {
        self.0.limit
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u64 {
        1 << self.height()
    }

    pub fn parent(&self) -> Option<&FieldTower> {
        self.0.parent.as_ref()
    }

    /// The sub-tower of the given height.
    pub fn level(&self, h: usize) -> FieldTower {
        let mut t = self.clone();
        while t.height() > h {
            t = t.parent().unwrap().clone();
        }
        t
    }

    /// The adjoined element of step `i` (1-based), living in the level below it.
    pub fn step(&self, i: usize) -> FieldElem {
        FieldElem { tower: self.level(i - 1), repr: self.0.ds[i - 1].clone() }
    }

    /// True when `self` is obtained from `other` by adjoining further steps.
    pub fn extends(&self, other: &FieldTower) -> bool {
        self.0.base == other.0.base
            && self.height() >= other.height()
            && self.0.ds[..other.height()] == other.0.ds[..]
    }

    pub fn lv(&self) -> Lv<'_> {
        Lv { base: self.0.base, ds: &self.0.ds }
    }

    pub fn elem(&self, repr: Repr) -> FieldElem {
        FieldElem { tower: self.clone(), repr }
    }

    pub fn zero(&self) -> FieldElem {
        self.elem(self.lv().zero())
    }

    pub fn one(&self) -> FieldElem {
        self.elem(self.lv().one())
    }

    pub fn int(&self, n: i64) -> FieldElem {
        self.elem(self.lv().from_int(n))
    }

    pub fn int_big(&self, n: &num_bigint::BigInt) -> FieldElem {
        self.rational(&BigRational::from_integer(n.clone())).expect("integers embed")
    }

    pub fn rational(&self, r: &BigRational) -> Result<FieldElem> {
        Ok(self.elem(self.lv().from_rational(r)?))
    }

    /// √d_i embedded at the top (1-based step index).
    pub fn sqrt_gen(&self, i: usize) -> Result<FieldElem> {
        if i == 0 || i > self.height() {
            return Err(Error::IndexOutOfRange(i));
        }
        let g = self.level(i).lv().gen();
        Ok(self.elem(self.lv().embed(g, i)))
    }

    /// A fixed non-square of a finite tower.
    pub fn nonsquare(&self) -> FieldElem {
        assert!(self.is_finite(), "only finite fields have a distinguished non-square");
        let r = self.0.nonsquare.get_or_init(|| {
            let lv = self.lv();
            let BaseField::PrimeField(p) = self.0.base else { unreachable!() };
            if self.height() == 0 {
                return (2..p).map(Repr::Res).find(|r| !lv.is_square(r)).unwrap();
            }
            let g = lv.gen();
            let l = lv.lower();
            for c in 0..p {
                for e in 1..p {
                    let cand = lv.add(&lv.from_int(c as i64), &lv.mul(&g, &lv.embed(l.from_int(e as i64), self.height() - 1)));
                    if !lv.is_square(&cand) {
                        return cand;
                    }
                }
            }
            let mut x = lv.add(&g, &lv.one());
            loop {
                if !lv.is_square(&x) {
                    return x;
                }
                x = lv.add(&lv.mul(&x, &lv.add(&g, &lv.from_int(3))), &lv.one());
            }
        });
        self.elem(r.clone())
    }

    /// Real embeddings as sign vectors, one sign per adjoined square root.
    pub fn real_embeddings(&self) -> Vec<RealEmbedding> {
        if self.is_finite() {
            return Vec::new();
        }
        let mut cur: Vec<Vec<i8>> = vec![Vec::new()];
        for i in 0..self.height() {
            let l = Lv { base: self.0.base, ds: &self.0.ds[..i] };
            let d = &self.0.ds[i];
            let mut next = Vec::new();
            for s in cur {
                if l.sign_at(d, &s) > 0 {
                    for e in [1i8, -1] {
                        let mut t = s.clone();
                        t.push(e);
                        next.push(t);
                    }
                }
            }
            cur = next;
        }
        cur.into_iter().map(|signs| RealEmbedding { tower: self.clone(), signs }).collect()
    }

    pub fn parse(s: &str) -> Result<FieldTower> {
        crate::expr::parse_field(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealEmbedding {
    pub tower: FieldTower,
    /// Sign of the chosen root of each d_i.
    pub signs: Vec<i8>,
}

impl RealEmbedding {
    pub fn sign_at(&self, a: &FieldElem) -> Result<i8> {
        if a.tower != self.tower {
            return Err(Error::TowerMismatch);
        }
        if a.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(self.tower.lv().sign_at(&a.repr, &self.signs))
    }
}

impl fmt::Display for RealEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.signs.iter().map(|s| if *s > 0 { "+" } else { "-" }).collect();
        write!(f, "[{}]", s.join(""))
    }
}

/// An element of a [`FieldTower`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub tower: FieldTower,
    pub repr: Repr,
}

impl FieldElem {
    pub fn is_zero(&self) -> bool {
        self.repr.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.repr == self.tower.lv().one()
    }

    fn same(&self, o: &FieldElem) -> Result<()> {
        if self.tower == o.tower {
            Ok(())
        } else {
            Err(Error::TowerMismatch)
        }
    }

    pub fn checked_add(&self, o: &FieldElem) -> Result<FieldElem> {
        self.same(o)?;
        Ok(self.tower.elem(self.tower.lv().add(&self.repr, &o.repr)))
    }

    pub fn checked_sub(&self, o: &FieldElem) -> Result<FieldElem> {
        self.same(o)?;
        Ok(self.tower.elem(self.tower.lv().sub(&self.repr, &o.repr)))
    }

    pub fn checked_mul(&self, o: &FieldElem) -> Result<FieldElem> {
        self.same(o)?;
        Ok(self.tower.elem(self.tower.lv().mul(&self.repr, &o.repr)))
    }

    pub fn checked_div(&self, o: &FieldElem) -> Result<FieldElem> {
        self.same(o)?;
        Ok(self.tower.elem(self.tower.lv().div(&self.repr, &o.repr)?))
    }

    pub fn inv(&self) -> Result<FieldElem> {
        Ok(self.tower.elem(self.tower.lv().inv(&self.repr)?))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElem> {
        let b = if e < 0 { self.inv()? } else { self.clone() };
        Ok(self.tower.elem(self.tower.lv().pow(&b.repr, e.unsigned_abs())))
    }

    pub fn is_square(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(self.tower.lv().is_square(&self.repr))
    }

    /// A square root in the same field, if one exists.
    pub fn sqrt(&self) -> Option<FieldElem> {
        self.tower.lv().sqrt(&self.repr).map(|r| self.tower.elem(r))
    }

    /// The nontrivial automorphism of the top step.
    pub fn conj(&self) -> Result<FieldElem> {
        if self.tower.height() == 0 {
            return Err(Error::NoTopStep);
        }
        Ok(self.tower.elem(self.tower.lv().conj(&self.repr)))
    }

    /// a·ā in the field below.
    pub fn norm(&self) -> Result<FieldElem> {
        let p = self.tower.parent().ok_or(Error::NoTopStep)?;
        Ok(p.elem(self.tower.lv().norm(&self.repr)))
    }

    /// a + ā in the field below.
    pub fn trace(&self) -> Result<FieldElem> {
        let p = self.tower.parent().ok_or(Error::NoTopStep)?;
        Ok(p.elem(self.tower.lv().trace(&self.repr)))
    }

    /// Writes a = u + v·√d over the field below.
    pub fn split(&self) -> Result<(FieldElem, FieldElem)> {
        let p = self.tower.parent().ok_or(Error::NoTopStep)?;
        let (u, v) = self.repr.parts();
        Ok((p.elem(u.clone()), p.elem(v.clone())))
    }

    /// u + v·√d for u, v in the parent of `tower`.
    pub fn from_parts(tower: &FieldTower, u: &FieldElem, v: &FieldElem) -> Result<FieldElem> {
        let p = tower.parent().ok_or(Error::NoTopStep)?;
        if u.tower != *p || v.tower != *p {
            return Err(Error::TowerMismatch);
        }
        Ok(tower.elem(Repr::pair(u.repr.clone(), v.repr.clone())))
    }

    /// Image in a tower extending this one.
    pub fn embed_into(&self, t: &FieldTower) -> Result<FieldElem> {
        if !t.extends(&self.tower) {
            return Err(Error::NotAnExtension);
        }
        Ok(t.elem(t.lv().embed(self.repr.clone(), self.tower.height())))
    }

    /// Descends to a sub-tower when the element lies there.
    pub fn descend_to(&self, t: &FieldTower) -> Option<FieldElem> {
        if !self.tower.extends(t) {
            return None;
        }
        let mut r = &self.repr;
        for _ in t.height()..self.tower.height() {
            let (u, v) = r.parts();
            if !v.is_zero() {
                return None;
            }
            r = u;
        }
        Some(t.elem(r.clone()))
    }

    /// The rational value of an element lying in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.descend_to(&self.tower.level(0))?.repr {
            Repr::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// The residue of an element lying in 𝔽_p.
    pub fn as_residue(&self) -> Option<u64> {
        match self.descend_to(&self.tower.level(0))?.repr {
            Repr::Res(r) => Some(r),
            _ => None,
        }
    }

    pub fn parse(tower: &FieldTower, s: &str) -> Result<FieldElem> {
        crate::expr::parse_elem(tower, s)
    }
}

fn fmt_leaf(r: &Repr) -> String {
    match r {
        Repr::Rat(x) => x.to_string(),
        Repr::Res(x) => x.to_string(),
        Repr::Ext(_) => unreachable!(),
    }
}

fn leaf_negative(r: &Repr) -> bool {
    matches!(r, Repr::Rat(x) if x.is_negative())
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.tower.height();
        let terms = self.repr.flatten(h);
        if terms.is_empty() {
            return write!(f, "0");
        }
        let name = |i: usize| if h == 1 { "sqrt".to_string() } else { format!("sqrt{}", i + 1) };
        let mut out = String::new();
        for (k, (mask, c)) in terms.iter().enumerate() {
            let neg = leaf_negative(c);
            let mag = match c {
                Repr::Rat(x) => fmt_leaf(&Repr::Rat(x.abs())),
                _ => fmt_leaf(c),
            };
            if k > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let syms: Vec<String> = (0..h).filter(|i| mask & (1 << i) != 0).map(name).collect();
            if syms.is_empty() {
                out.push_str(&mag);
            } else {
                let coef_one = matches!(c, Repr::Rat(x) if x.abs().is_one())
                    || matches!(c, Repr::Res(1));
                if !coef_one {
                    out.push_str(&mag);
                    out.push('*');
                }
                out.push_str(&syms.join("*"));
            }
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.tower)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $m(self, o: &FieldElem) -> FieldElem {
                self.$checked(o).expect(concat!("field ", stringify!($m)))
            }
        }
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, o: FieldElem) -> FieldElem {
                (&self).$m(&o)
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        self.tower.elem(self.tower.lv().neg(&self.repr))
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> FieldTower {
        FieldTower::rationals().extend_int(5).unwrap()
    }

    #[test]
    fn quadratic_arithmetic() {
        let k = q5();
        let s = k.sqrt_gen(1).unwrap();
        let a = &k.one() + &s;
        let b = &k.one() - &s;
        assert_eq!(&a * &b, k.int(-4));
        assert_eq!(a.norm().unwrap(), FieldTower::rationals().int(-4));
        assert_eq!(a.trace().unwrap(), FieldTower::rationals().int(2));
        assert_eq!((&a / &a), k.one());
        assert!(k.int(5).is_square().unwrap());
        assert!(!k.int(2).is_square().unwrap());
    }

    #[test]
    fn finite_field_basics() {
        let f7 = FieldTower::prime_field(7);
        assert_eq!(&f7.int(3) + &f7.int(5), f7.int(1));
        assert!(f7.int(2).is_square().unwrap());
        assert!(!f7.int(3).is_square().unwrap());
        let f49 = f7.extend_int(3).unwrap();
        for n in 1..7 {
            assert!(f49.int(n).is_square().unwrap());
        }
        assert!(!f49.nonsquare().is_square().unwrap());
        assert!(f7.extend_int(2).is_err());
    }

    #[test]
    fn square_roots_in_towers() {
        let k = FieldTower::rationals().extend_int(2).unwrap().extend_int(3).unwrap();
        let s6 = &k.sqrt_gen(1).unwrap() * &k.sqrt_gen(2).unwrap();
        assert!(k.int(6).is_square().unwrap());
        let x = &k.int(1) + &s6;
        let r = (&x * &x).sqrt().unwrap();
        assert!(r == x || r == -&x);
        let f = FieldTower::prime_field(3).extend_int(2).unwrap().extend(&FieldTower::prime_field(3).extend_int(2).unwrap().nonsquare()).unwrap();
        let mut y = f.sqrt_gen(2).unwrap();
        for _ in 0..20 {
            y = &(&y * &y) + &f.sqrt_gen(1).unwrap();
            if !y.is_zero() {
                let sq = &y * &y;
                let r = sq.sqrt().unwrap();
                assert_eq!(&r * &r, sq);
            }
        }
    }

    #[test]
    fn conjugation_top_step_only() {
        let k = FieldTower::rationals().extend_int(2).unwrap().extend_int(3).unwrap();
        let p = &k.sqrt_gen(1).unwrap() * &k.sqrt_gen(2).unwrap();
        assert_eq!(p.conj().unwrap(), -&p);
        assert_eq!(k.int(7).conj().unwrap(), k.int(7));
        assert_eq!(FieldTower::rationals().int(1).conj(), Err(Error::NoTopStep));
    }

    #[test]
    fn embeddings_and_signs() {
        let k = q5();
        let e = k.real_embeddings();
        assert_eq!(e.len(), 2);
        let a = &k.one() + &k.sqrt_gen(1).unwrap();
        let neg = e.iter().find(|e| e.signs == vec![-1]).unwrap();
        assert_eq!(neg.sign_at(&a).unwrap(), -1);
        let im = FieldTower::rationals().extend_int(-1).unwrap();
        assert!(im.real_embeddings().is_empty());
        assert!(FieldTower::prime_field(7).extend_int(3).unwrap().real_embeddings().is_empty());
        let t = FieldTower::rationals().extend_int(2).unwrap();
        let d = &t.int(1) + &t.sqrt_gen(1).unwrap();
        let t2 = t.extend(&d).unwrap();
        assert_eq!(t2.real_embeddings().len(), 2);
    }

    #[test]
    fn rational_division() {
        let q = FieldTower::rationals();
        let half = q.rational(&BigRational::new(1.into(), 2.into())).unwrap();
        let third = q.rational(&BigRational::new(1.into(), 3.into())).unwrap();
        assert_eq!((&half / &third).as_rational().unwrap(), BigRational::new(3.into(), 2.into()));
        assert_eq!(half.checked_div(&q.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn height_limit_is_configurable() {
        let t = FieldTower::with_limit(BaseField::Rationals, 1).extend_int(2).unwrap();
        assert!(matches!(t.extend_int(3), Err(Error::HeightLimit { .. })));
    }
}

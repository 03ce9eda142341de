//! The Grothendieck–Witt ring GW(k).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Signed;

use crate::classes::SquareClass;
use crate::error::{Error, Result};
use crate::fields::{FieldElem, FieldTower, RealEmbedding};
use crate::forms::{self, DiagForm, FormInvariants, TriBool};
use crate::localsymbols::{hilbert_int, Place};

/// Largest `r` tried by [`GwElem::torsion_exponent`].
pub const TORSION_CAP: u32 = 8;

/// An element Σ cᵢ⟨aᵢ⟩ of GW(k) with signed integer multiplicities.
///
/// Terms with equal square class are merged on construction; over finite
/// fields the representation is the canonical `n + e⟨ν⟩` with `e ∈ {0, 1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct GwElem {
    tower: FieldTower,
    terms: BTreeMap<SquareClass, i64>,
}

impl GwElem {
    pub fn zero(t: &FieldTower) -> GwElem {
        GwElem { tower: t.clone(), terms: BTreeMap::new() }
    }

    pub fn int(t: &FieldTower, n: i64) -> GwElem {
        let mut x = Self::zero(t);
        x.add_term(SquareClass::one(t), n);
        x.normalize();
        x
    }

    pub fn one(t: &FieldTower) -> GwElem {
        Self::int(t, 1)
    }

    /// The hyperbolic plane ⟨1, −1⟩.
    pub fn hyperbolic(t: &FieldTower) -> GwElem {
        &Self::one(t) + &Self::class_int(t, -1)
    }

    /// ⟨a⟩ for nonzero a.
    pub fn class(a: &FieldElem) -> Result<GwElem> {
        Ok(Self::from_class(&a.tower, SquareClass::of(a)?))
    }

    pub fn class_int(t: &FieldTower, n: i64) -> GwElem {
        Self::from_class(t, SquareClass::from_int(t, n))
    }

    pub fn from_class(t: &FieldTower, k: SquareClass) -> GwElem {
        Self::from_terms(t, [(k, 1)])
    }

    pub fn from_terms(t: &FieldTower, terms: impl IntoIterator<Item = (SquareClass, i64)>) -> GwElem {
        let mut x = Self::zero(t);
        for (k, c) in terms {
            x.add_term(k, c);
        }
        x.normalize();
        x
    }

    pub fn from_form(f: &DiagForm) -> GwElem {
        Self::from_terms(&f.tower, f.entries.iter().map(|e| (SquareClass::of(e).unwrap(), 1)))
    }

    /// [p] − [m].
    pub fn difference(p: &DiagForm, m: &DiagForm) -> Result<GwElem> {
        Self::from_form(p).checked_sub(&Self::from_form(m))
    }

    /// Σ ⟨nᵢ⟩ for small integers.
    pub fn form_ints(t: &FieldTower, entries: &[i64]) -> GwElem {
        Self::from_terms(t, entries.iter().map(|n| (SquareClass::from_int(t, *n), 1)))
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SquareClass, i64)> {
        self.terms.iter().map(|(k, c)| (k, *c))
    }

    fn add_term(&mut self, k: SquareClass, c: i64) {
        if c == 0 {
            return;
        }
        let key = if self.terms.contains_key(&k) || !matches!(k, SquareClass::Element(_)) {
            k
        } else {
            self.terms
                .keys()
                .find(|j| j.same_class(&k, &self.tower))
                .cloned()
                .unwrap_or(k)
        };
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    fn normalize(&mut self) {
        if !self.tower.is_finite() {
            return;
        }
        let a = self.terms.get(&SquareClass::Finite(false)).copied().unwrap_or(0);
        let b = self.terms.get(&SquareClass::Finite(true)).copied().unwrap_or(0);
        let e = b.rem_euclid(2);
        self.terms.clear();
        if a + b - e != 0 {
            self.terms.insert(SquareClass::Finite(false), a + b - e);
        }
        if e != 0 {
            self.terms.insert(SquareClass::Finite(true), e);
        }
    }

    fn same(&self, o: &GwElem) -> Result<()> {
        if self.tower == o.tower {
            Ok(())
        } else {
            Err(Error::TowerMismatch)
        }
    }

    pub fn checked_add(&self, o: &GwElem) -> Result<GwElem> {
        self.same(o)?;
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), *c);
        }
        r.normalize();
        Ok(r)
    }

    pub fn checked_sub(&self, o: &GwElem) -> Result<GwElem> {
        self.checked_add(&-o)
    }

    pub fn checked_mul(&self, o: &GwElem) -> Result<GwElem> {
        self.same(o)?;
        let mut r = Self::zero(&self.tower);
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                r.add_term(a.mul(b, &self.tower), c * d);
            }
        }
        r.normalize();
        Ok(r)
    }

    pub fn scale(&self, n: i64) -> GwElem {
        let mut r = Self::zero(&self.tower);
        for (k, c) in &self.terms {
            r.add_term(k.clone(), c * n);
        }
        r.normalize();
        r
    }

    /// Multiplication by ⟨a⟩ given as a class.
    pub fn twist(&self, k: &SquareClass) -> GwElem {
        Self::from_terms(&self.tower, self.terms.iter().map(|(a, c)| (a.mul(k, &self.tower), *c)))
    }

    /// xⁿ by squaring, reducing as it goes so coefficients stay small.
    pub fn pow(&self, mut n: u32) -> GwElem {
        let mut r = Self::one(&self.tower);
        let mut b = self.reduced();
        while n > 0 {
            if n & 1 == 1 {
                r = (&r * &b).reduced();
            }
            n >>= 1;
            if n > 0 {
                b = (&b * &b).reduced();
            }
        }
        r
    }

    /// Rank.
    pub fn dim(&self) -> i64 {
        self.terms.values().sum()
    }

    /// (positive part, negative part) as weighted class lists.
    pub(crate) fn parts(&self) -> (Vec<(SquareClass, u64)>, Vec<(SquareClass, u64)>) {
        let mut p = Vec::new();
        let mut m = Vec::new();
        for (k, c) in &self.terms {
            if *c > 0 {
                p.push((k.clone(), *c as u64));
            } else {
                m.push((k.clone(), c.unsigned_abs()));
            }
        }
        (p, m)
    }

    fn expand(&self, items: Vec<(SquareClass, u64)>) -> DiagForm {
        let entries = items
            .into_iter()
            .flat_map(|(k, c)| std::iter::repeat_n(k.elem(&self.tower), c as usize))
            .collect();
        DiagForm::new(&self.tower, entries).unwrap()
    }

    /// The form whose class is added.
    pub fn plus(&self) -> DiagForm {
        self.expand(self.parts().0)
    }

    /// The form whose class is subtracted.
    pub fn minus(&self) -> DiagForm {
        self.expand(self.parts().1)
    }

    /// Equality in GW(k).
    pub fn equals(&self, o: &GwElem) -> Result<TriBool> {
        Ok(self.checked_sub(o)?.is_zero())
    }

    pub fn is_zero(&self) -> TriBool {
        if self.terms.is_empty() {
            return TriBool::True;
        }
        let (p, m) = self.parts();
        forms::decide(&self.tower, &p, &m)
    }

    /// Items of the Witt-equivalent form P ⊥ −M.
    fn witt_items(&self) -> Vec<(SquareClass, u64)> {
        let t = &self.tower;
        let (p, m) = self.parts();
        let minus = SquareClass::from_int(t, -1);
        forms::merge(t, p.into_iter().chain(m.into_iter().map(|(k, c)| (k.mul(&minus, t), c))))
    }

    /// Signed discriminant of the Witt class.
    pub fn disc(&self) -> SquareClass {
        forms::signed_disc(&self.tower, &self.witt_items())
    }

    fn disc_trivial(&self) -> bool {
        self.disc().is_one(&self.tower)
    }

    pub fn signatures(&self) -> Vec<(RealEmbedding, i64)> {
        let (p, m) = self.parts();
        let sp = forms::signatures(&self.tower, &p);
        let sm = forms::signatures(&self.tower, &m);
        sp.into_iter().zip(sm).map(|((e, a), (_, b))| (e, a - b)).collect()
    }

    /// Hasse symbols of the form of rank |dim| representing ±x (ℚ only).
    fn hasse(&self) -> Vec<(Place, i32)> {
        let t = &self.tower;
        if t.is_finite() || t.height() > 0 {
            return Vec::new();
        }
        let x = if self.dim() < 0 { -self } else { self.clone() };
        let items = x.witt_items();
        // Witt items are the representative plus k hyperbolic planes.
        let k = (items.iter().map(|(_, c)| c).sum::<u64>() - x.dim() as u64) / 2;
        let inv = forms::weighted_invariants(t, &items);
        let q: Vec<(BigInt, u64)> = items.iter().map(|(a, c)| (a.rational(t).unwrap(), *c)).collect();
        let mut det = forms::det_class(t, &items).rational(t).unwrap();
        if k % 2 == 1 {
            det = -det;
        }
        let m1 = BigInt::from(-1);
        inv.hasse
            .iter()
            .map(|(v, _)| {
                let mut s = forms::hasse_q(&q, v);
                if (k * k.saturating_sub(1) / 2) % 2 == 1 {
                    s *= hilbert_int(&m1, &m1, v).unwrap();
                }
                if k % 2 == 1 {
                    s *= hilbert_int(&det, &m1, v).unwrap();
                }
                (v.clone(), s)
            })
            .collect()
    }

    pub fn invariants(&self) -> FormInvariants {
        FormInvariants {
            dim: self.dim(),
            disc: self.disc(),
            hasse: self.hasse(),
            signatures: self.signatures(),
        }
    }

    fn all_rational(&self) -> Option<Vec<(BigInt, i64)>> {
        self.terms.iter().map(|(k, c)| k.rational(&self.tower).map(|r| (r, *c))).collect()
    }

    fn rational_steps(&self) -> Option<Vec<BigInt>> {
        (1..=self.tower.height())
            .map(|i| {
                self.tower
                    .step(i)
                    .as_rational()
                    .map(|r| crate::localsymbols::square_class_q(&r).unwrap())
            })
            .collect()
    }

    /// For dim-0, trivial-disc x: are the local Hasse invariants of the two
    /// halves equal at every finite place? `None` when this cannot be decided.
    fn hasse_balanced(&self) -> Option<bool> {
        let t = &self.tower;
        if t.is_finite() {
            return Some(true);
        }
        let q = self.all_rational()?;
        let steps = self.rational_steps()?;
        let pos: Vec<(BigInt, u64)> = q.iter().filter(|(_, c)| *c > 0).map(|(a, c)| (a.clone(), *c as u64)).collect();
        let neg: Vec<(BigInt, u64)> = q.iter().filter(|(_, c)| *c < 0).map(|(a, c)| (a.clone(), c.unsigned_abs())).collect();
        let places = crate::localsymbols::relevant_places(q.iter().map(|(a, _)| a));
        Some(places.iter().all(|v| {
            let Place::Finite(p) = v else { return true };
            let split = steps.iter().all(|d| {
                if *p == BigInt::from(2) {
                    d.mod_floor_8() == 1
                } else {
                    (d % p) != BigInt::from(0) && crate::localsymbols::legendre(d, p) == 1
                }
            });
            !split || forms::hasse_q(&pos, v) == forms::hasse_q(&neg, v)
        }))
    }

    /// Membership in Iⁿ(k).
    pub fn in_in(&self, n: u32) -> TriBool {
        let t = &self.tower;
        if n == 0 || self.terms.is_empty() {
            return TriBool::True;
        }
        if self.dim() != 0 {
            return TriBool::False;
        }
        if n == 1 {
            return TriBool::True;
        }
        if !self.disc_trivial() {
            return TriBool::False;
        }
        if n == 2 {
            return TriBool::True;
        }
        if t.is_finite() {
            return self.is_zero();
        }
        let sigs = self.signatures();
        if sigs.iter().any(|(_, s)| s % (1i64 << n.min(62)) != 0) {
            return TriBool::False;
        }
        match self.hasse_balanced() {
            Some(true) => TriBool::True,
            Some(false) => TriBool::False,
            None => TriBool::Unknown,
        }
    }

    /// Torsion ⇔ rank 0 and every signature 0.
    pub fn is_torsion(&self) -> TriBool {
        TriBool::from_bool(self.dim() == 0 && self.signatures().iter().all(|(_, s)| *s == 0))
    }

    /// Zero test that also uses that torsion elements of I³ vanish over the
    /// supported fields (global fields and finite fields).
    fn zero_given(&self, known_i3: bool) -> TriBool {
        if known_i3 && self.is_torsion().is_true() {
            return TriBool::True;
        }
        self.is_zero()
    }

    /// Least r ≤ [`TORSION_CAP`] with 2ʳx = 0.
    pub fn torsion_exponent(&self) -> Result<u32> {
        if !self.is_torsion().is_true() {
            return Err(Error::NotTorsion);
        }
        let in2 = self.in_in(2).is_true();
        let mut y = self.clone();
        for r in 0..=TORSION_CAP {
            let known_i3 = r >= 2 || (r == 1 && in2);
            if y.zero_given(known_i3).is_true() {
                return Ok(r);
            }
            y = y.scale(2);
        }
        Err(Error::TorsionCap(TORSION_CAP))
    }

    pub fn is_unit(&self) -> TriBool {
        let d = self.dim();
        if d != 1 && d != -1 {
            return TriBool::False;
        }
        let z = self.scale(d);
        let zp = z.twist(&z.disc());
        (&zp - &Self::one(&self.tower)).is_torsion()
    }

    pub fn unit_inverse(&self) -> Result<GwElem> {
        match self.is_unit() {
            TriBool::True => {}
            TriBool::False => return Err(Error::NotAUnit),
            TriBool::Unknown => return Err(Error::Undecided("unit test".into())),
        }
        let t = &self.tower;
        let d = self.dim();
        let z = self.scale(d);
        let disc = z.disc();
        let zp = z.twist(&disc);
        let w = &zp - &Self::one(t);
        let mut inv = Self::one(t);
        let mut term = Self::one(t);
        let mut k = 1u32;
        loop {
            term = &term * &(-&w);
            // w ∈ I², so wᵏ ∈ I³ once k ≥ 2. A vanishing first term is harmless,
            // so it is not tested.
            if k >= 2 && term.zero_given(true).is_true() {
                break;
            }
            inv = (&inv + &term).reduced();
            term = term.reduced();
            k += 1;
            if k > 64 {
                return Err(Error::Undecided("geometric series did not terminate".into()));
            }
        }
        Ok(inv.twist(&disc).scale(d).reduced())
    }

    pub fn in_fn(&self, n: u32) -> TriBool {
        self.is_unit().and((self - &Self::one(&self.tower)).in_in(n))
    }

    /// x − 1, meaningful modulo I²ⁿ.
    pub fn alpha_n(&self, n: u32) -> Result<GwElem> {
        match self.in_fn(n) {
            TriBool::True => Ok(self - &Self::one(&self.tower)),
            _ => Err(Error::NotInFiltration(n)),
        }
    }

    /// λ², extended to differences by λ²(P − M) = λ²P − PM + M² − λ²M.
    pub fn lambda2(&self) -> GwElem {
        let (p, m) = self.parts();
        let t = &self.tower;
        let lp = lambda2_items(t, &p);
        let lm = lambda2_items(t, &m);
        let pe = Self::from_terms(t, p.iter().map(|(k, c)| (k.clone(), *c as i64)));
        let me = Self::from_terms(t, m.iter().map(|(k, c)| (k.clone(), *c as i64)));
        &(&(&lp - &(&pe * &me)) + &(&me * &me)) - &lm
    }

    /// Image under k → K for a tower K extending k.
    pub fn base_change(&self, to: &FieldTower) -> Result<GwElem> {
        if !to.extends(&self.tower) {
            return Err(Error::NotAnExtension);
        }
        let mut out = Vec::new();
        for (k, c) in &self.terms {
            let e = k.elem(&self.tower).embed_into(to)?;
            out.push((SquareClass::of(&e)?, *c));
        }
        Ok(Self::from_terms(to, out))
    }

    /// Descends an element all of whose classes have representatives in `to`.
    pub fn descend(&self, to: &FieldTower) -> Option<GwElem> {
        let mut out = Vec::new();
        for (k, c) in &self.terms {
            let e = k.elem(&self.tower).descend_to(to)?;
            out.push((SquareClass::of(&e).ok()?, *c));
        }
        Some(Self::from_terms(to, out))
    }

    /// Applies a field map to every class representative.
    pub fn map_classes(&self, to: &FieldTower, f: impl Fn(&FieldElem) -> FieldElem) -> GwElem {
        Self::from_terms(
            to,
            self.terms.iter().map(|(k, c)| (SquareClass::of(&f(&k.elem(&self.tower))).unwrap(), *c)),
        )
    }

    /// A small representative of the same class.
    ///
    /// Canonical over ℚ and finite fields. Over ℚ-towers an element whose
    /// classes are all rational is reduced in GW(ℚ) and mapped back; other
    /// elements are returned unchanged.
    pub fn reduced(&self) -> GwElem {
        let t = &self.tower;
        if t.is_finite() || self.terms.is_empty() {
            return self.clone();
        }
        let Some(q) = self.all_rational() else {
            return self.clone();
        };
        let out = reduce_rational(&q);
        Self::from_terms(t, out.into_iter().map(|(a, c)| (SquareClass::of(&t.int_big(&a)).unwrap(), c)))
    }

    pub fn parse(t: &FieldTower, s: &str) -> Result<GwElem> {
        crate::expr::parse_gw(t, s)
    }
}

trait Mod8 {
    fn mod_floor_8(&self) -> u32;
}

impl Mod8 for BigInt {
    fn mod_floor_8(&self) -> u32 {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        self.mod_floor(&BigInt::from(8)).to_u32().unwrap()
    }
}

/// Canonical representative in GW(ℚ) of Σ cᵢ⟨aᵢ⟩ (squarefree aᵢ).
///
/// Uses the split exact sequence 0 → W(ℤ) → W(ℚ) → ⊕_p W(𝔽_p) → 0. Residues are
/// peeled off from the largest prime down, each replaced by a fixed lift built
/// from ⟨p⟩ and ⟨pν⟩ with ν < p, the remainder in W(ℤ) ≅ ℤ is read off the
/// signature, and the rank is restored with hyperbolic planes.
pub(crate) fn reduce_rational(items: &[(BigInt, i64)]) -> Vec<(BigInt, i64)> {
    use num_integer::Integer;
    use num_traits::{One, Zero};
    use std::collections::BTreeSet;

    let dim: i64 = items.iter().map(|(_, c)| c).sum();
    let sig = |v: &[(BigInt, i64)]| -> i64 { v.iter().map(|(a, c)| if a.is_negative() { -c } else { *c }).sum() };
    let mut primes: BTreeSet<BigInt> = BTreeSet::new();
    for (a, _) in items {
        primes.extend(crate::arith::prime_divisors(a));
    }
    let mut lifts: Vec<(BigInt, i64)> = Vec::new();
    let two = BigInt::from(2);
    while let Some(p) = primes.pop_last() {
        // Residue at p of x minus the lifts chosen so far.
        let mut f = 0i64;
        let mut e = 0i64;
        let all = items.iter().map(|(a, c)| (a, *c)).chain(lifts.iter().map(|(a, c)| (a, -c)));
        for (a, c) in all {
            if !(a % &p).is_zero() {
                continue;
            }
            if p == two || crate::localsymbols::legendre(&(a / &p), &p) == 1 {
                f += c;
            } else {
                e += c;
            }
        }
        if p == two {
            if f.is_odd() {
                lifts.push((two.clone(), 1));
            }
        } else if (&p % 4u32) == BigInt::one() {
            if f.is_odd() {
                lifts.push((p.clone(), 1));
            }
            if e.is_odd() {
                let nu = least_nonresidue(&p);
                primes.extend(crate::arith::prime_divisors(&nu));
                lifts.push((&p * &nu, 1));
            }
        } else {
            let j = (f - e).rem_euclid(4);
            if j != 0 {
                lifts.push((p.clone(), j));
            }
        }
    }
    let r = sig(items) - sig(&lifts);
    let mut out = lifts;
    out.push((BigInt::one(), r));
    let w: i64 = out.iter().map(|(_, c)| c).sum();
    let h = (dim - w) / 2;
    out.push((BigInt::one(), h));
    out.push((BigInt::from(-1), h));
    out
}

fn least_nonresidue(p: &BigInt) -> BigInt {
    let mut n = BigInt::from(2);
    while crate::localsymbols::legendre(&n, p) == 1 {
        n += 1;
    }
    n
}

fn lambda2_items(t: &FieldTower, items: &[(SquareClass, u64)]) -> GwElem {
    let mut out: Vec<(SquareClass, i64)> = Vec::new();
    for (i, (a, c)) in items.iter().enumerate() {
        let c = *c as i64;
        out.push((SquareClass::one(t), c * (c - 1) / 2));
        for (b, d) in &items[i + 1..] {
            out.push((a.mul(b, t), c * *d as i64));
        }
    }
    GwElem::from_terms(t, out)
}

impl fmt::Display for GwElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let neg = *c < 0;
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if k.is_one(&self.tower) && matches!(k, SquareClass::Rational(_) | SquareClass::Finite(_)) {
                write!(f, "{mag}")?;
            } else {
                if mag != 1 {
                    write!(f, "{mag}*")?;
                }
                write!(f, "<{}>", k.display(&self.tower))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GwElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in GW({})", self, self.tower)
    }
}

macro_rules! gw_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&GwElem> for &GwElem {
            type Output = GwElem;
            fn $m(self, o: &GwElem) -> GwElem {
                self.$checked(o).expect("GW operands over different fields")
            }
        }
        impl $tr<GwElem> for GwElem {
            type Output = GwElem;
            fn $m(self, o: GwElem) -> GwElem {
                (&self).$m(&o)
            }
        }
    };
}
gw_binop!(Add, add, checked_add);
gw_binop!(Sub, sub, checked_sub);
gw_binop!(Mul, mul, checked_mul);

impl Neg for &GwElem {
    type Output = GwElem;
    fn neg(self) -> GwElem {
        self.scale(-1)
    }
}

impl Neg for GwElem {
    type Output = GwElem;
    fn neg(self) -> GwElem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldTower {
        FieldTower::rationals()
    }

    fn c(t: &FieldTower, n: i64) -> GwElem {
        GwElem::class_int(t, n)
    }

    #[test]
    fn ring_examples() {
        let t = q();
        let one = GwElem::one(&t);
        assert_eq!(&c(&t, 3) * &c(&t, 3), one);
        let a = &one - &c(&t, 5);
        assert!((&a * &a).equals(&a.scale(2)).unwrap().is_true());
        assert!((&c(&t, 2) - &one).scale(2).is_zero().is_true());
        assert!(GwElem::form_ints(&t, &[1, 1]).equals(&GwElem::form_ints(&t, &[2, 2])).unwrap().is_true());
        assert!(one.equals(&-&one).unwrap().is_false());
        let prod = &(&c(&t, 2) - &one) * &(&c(&t, 5) - &one);
        assert!(prod.is_zero().is_false());
    }

    #[test]
    fn filtration_examples() {
        let t = q();
        let one = GwElem::one(&t);
        let a = &c(&t, -3) - &one;
        let b = &c(&t, -7) - &one;
        assert!((&a * &b).in_in(2).is_true());
        assert!((&c(&t, 5) - &one).in_in(2).is_false());
        assert!(GwElem::zero(&t).in_in(9).is_true());
        let p3 = &(&a * &b) * &(&c(&t, -1) - &one);
        assert!(p3.in_in(3).is_true());
        assert_eq!(p3.signatures()[0].1, -8);
        assert!(p3.in_in(4).is_false());
    }

    #[test]
    fn torsion_and_units() {
        let t = q();
        let one = GwElem::one(&t);
        let x = &(&c(&t, 2) - &one) * &(&c(&t, 5) - &one);
        assert!(x.is_torsion().is_true());
        assert_eq!(x.torsion_exponent().unwrap(), 1);
        assert_eq!((&c(&t, 2) - &one).torsion_exponent().unwrap(), 1);
        assert_eq!(GwElem::zero(&t).torsion_exponent().unwrap(), 0);
        assert!(GwElem::form_ints(&t, &[1, 1]).is_torsion().is_false());
        let u = &one + &x;
        assert!(u.is_unit().is_true());
        assert!((&u.unit_inverse().unwrap() * &u).equals(&one).unwrap().is_true());
        assert!(u.in_fn(2).is_true());
        assert!((-&one).in_fn(1).is_false());
        assert!(c(&t, 7).in_fn(1).is_true());
        assert!(c(&t, 7).unit_inverse().unwrap().equals(&c(&t, 7)).unwrap().is_true());
        assert!(GwElem::form_ints(&t, &[1, 1]).is_unit().is_false());
    }

    #[test]
    fn lambda2_examples() {
        let t = q();
        assert_eq!(GwElem::form_ints(&t, &[3, 5]).lambda2(), c(&t, 15));
        assert_eq!(GwElem::form_ints(&t, &[1, 1]).lambda2(), GwElem::one(&t));
        assert_eq!(GwElem::one(&t).lambda2(), GwElem::zero(&t));
    }

    #[test]
    fn finite_canonical_form() {
        let t = FieldTower::prime_field(7);
        let x = GwElem::form_ints(&t, &[3, 3, 5]);
        assert_eq!(x, &GwElem::int(&t, 2) + &c(&t, 3));
        assert!((&c(&t, 2) - &GwElem::one(&t)).is_zero().is_true());
    }

    #[test]
    fn invariants_reporting() {
        let t = q();
        let inv = GwElem::form_ints(&t, &[2, 10]).invariants();
        assert_eq!(inv.dim, 2);
        let json = inv.to_json(&t);
        assert_eq!(json["disc"], "-5");
        assert_eq!(json["sig"], serde_json::json!([2]));
        let y = &GwElem::form_ints(&t, &[2, 10, 3]) - &GwElem::form_ints(&t, &[3]);
        assert_eq!(y.invariants().hasse, inv.hasse);
        let z = &GwElem::form_ints(&t, &[2, 10, 5, -5]) - &GwElem::hyperbolic(&t);
        assert_eq!(z.invariants().hasse, inv.hasse);
    }

    #[test]
    fn reduction_is_canonical() {
        let t = q();
        let one = GwElem::one(&t);
        let x = &(&c(&t, 2) - &one) * &(&c(&t, 5) - &one);
        let y = &(&c(&t, 10) - &c(&t, 2)).scale(3) + &(&one - &c(&t, 5)).scale(3);
        assert!(x.equals(&y).unwrap().is_true());
        assert_eq!(x.reduced(), y.reduced());
        assert!(x.reduced().equals(&x).unwrap().is_true());
        assert_eq!(GwElem::form_ints(&t, &[1, 1]).reduced(), GwElem::form_ints(&t, &[2, 2]).reduced());
        let z = GwElem::form_ints(&t, &[2, 10, -3, 7, 7, 21]);
        assert!(z.reduced().equals(&z).unwrap().is_true());
        assert_eq!(x.scale(2).reduced(), GwElem::zero(&t));
        let l = t.extend_int(3).unwrap();
        let u = &(&c(&l, 2) - &GwElem::one(&l)) * &(&c(&l, 7) - &GwElem::one(&l));
        assert!(u.reduced().equals(&u).unwrap().is_true());
    }

    #[test]
    fn tower_filtration() {
        let t = q().extend_int(2).unwrap();
        let one = GwElem::one(&t);
        let x = &(&c(&t, 3) - &one) * &(&c(&t, 5) - &one);
        assert!(x.in_in(2).is_true());
        assert!(x.is_torsion().is_true());
        assert!(x.torsion_exponent().unwrap() <= 1);
    }
}

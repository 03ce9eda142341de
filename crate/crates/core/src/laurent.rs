//! The group-ring model GW(k)[⟨t₁⟩,…,⟨t_m⟩]/(⟨tᵢ⟩² = 1) inside GW(k(t₁,…,t_m)),
//! and the logarithm on F₂GW^×(k).
//!
//! Equality is decided in the basis P_S = ∏_{i∈S}(⟨tᵢ⟩ − 1): the coefficient of
//! P_∅ is compared in GW(k) and every other coefficient in W(k), which is
//! exactly what iterated residues see. In particular H·(⟨t⟩ − 1) = 0.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::etale::{norm_restricted, transfer_to};
use crate::expmod::exp;
use crate::fields::FieldTower;
use crate::forms::TriBool;
use crate::gw::GwElem;

/// Default cap on the number of Laurent variables.
pub const MAX_VARS: usize = 12;

#[derive(Clone, PartialEq, Eq)]
pub struct GrElem {
    tower: FieldTower,
    vars: usize,
    /// Coefficient of ⟨t^ε⟩, keyed by the bitmask ε.
    coeffs: BTreeMap<u32, GwElem>,
}

impl GrElem {
    pub fn zero(t: &FieldTower, vars: usize) -> Result<GrElem> {
        if vars > MAX_VARS {
            return Err(Error::TooManyVariables { vars, limit: MAX_VARS });
        }
        Ok(GrElem { tower: t.clone(), vars, coeffs: BTreeMap::new() })
    }

    /// The constant c.
    pub fn constant(c: &GwElem, vars: usize) -> Result<GrElem> {
        Self::monomial(c, 0, vars)
    }

    pub fn one(t: &FieldTower, vars: usize) -> Result<GrElem> {
        Self::constant(&GwElem::one(t), vars)
    }

    /// c·⟨t^ε⟩.
    pub fn monomial(c: &GwElem, mask: u32, vars: usize) -> Result<GrElem> {
        let mut r = Self::zero(c.tower(), vars)?;
        if mask >> vars != 0 {
            return Err(Error::IndexOutOfRange(32 - mask.leading_zeros() as usize));
        }
        r.add_at(mask, c);
        Ok(r)
    }

    /// ⟨tᵢ⟩ (1-based).
    pub fn var(t: &FieldTower, i: usize, vars: usize) -> Result<GrElem> {
        if i == 0 || i > vars {
            return Err(Error::IndexOutOfRange(i));
        }
        Self::monomial(&GwElem::one(t), 1 << (i - 1), vars)
    }

    /// P_m = ∏(⟨tᵢ⟩ − 1) in the first `m` of `vars` variables.
    pub fn p_m(t: &FieldTower, m: usize, vars: usize) -> Result<GrElem> {
        if m > vars {
            return Err(Error::ArityMismatch);
        }
        Self::p_set(t, (1u32 << m) - 1, vars)
    }

    /// P_S = ∏_{i∈S}(⟨tᵢ⟩ − 1) = Σ_{ε⊆S} (−1)^{|S|−|ε|}⟨t^ε⟩.
    fn p_set(t: &FieldTower, s: u32, vars: usize) -> Result<GrElem> {
        let mut r = Self::zero(t, vars)?;
        let mut e = s;
        loop {
            let sign = if (s ^ e).count_ones().is_multiple_of(2) { 1 } else { -1 };
            r.add_at(e, &GwElem::int(t, sign));
            if e == 0 {
                break;
            }
            e = (e - 1) & s;
        }
        Ok(r)
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn coeff(&self, mask: u32) -> GwElem {
        self.coeffs.get(&mask).cloned().unwrap_or_else(|| GwElem::zero(&self.tower))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &GwElem)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    fn add_at(&mut self, mask: u32, c: &GwElem) {
        let e = self.coeffs.entry(mask).or_insert_with(|| GwElem::zero(c.tower()));
        *e = &*e + c;
        if e.terms().next().is_none() {
            self.coeffs.remove(&mask);
        }
    }

    fn same(&self, o: &GrElem) -> Result<()> {
        if self.tower != o.tower {
            return Err(Error::TowerMismatch);
        }
        if self.vars != o.vars {
            return Err(Error::ArityMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &GrElem) -> Result<GrElem> {
        self.same(o)?;
        let mut r = self.clone();
        for (m, c) in &o.coeffs {
            r.add_at(*m, c);
        }
        Ok(r)
    }

    pub fn checked_sub(&self, o: &GrElem) -> Result<GrElem> {
        self.checked_add(&o.neg())
    }

    pub fn neg(&self) -> GrElem {
        self.map(|c| -c)
    }

    pub fn checked_mul(&self, o: &GrElem) -> Result<GrElem> {
        self.same(o)?;
        let mut r = GrElem { tower: self.tower.clone(), vars: self.vars, coeffs: BTreeMap::new() };
        for (a, c) in &self.coeffs {
            for (b, d) in &o.coeffs {
                r.add_at(a ^ b, &(c * d));
            }
        }
        Ok(r.map(GwElem::reduced))
    }

    pub fn scale(&self, c: &GwElem) -> Result<GrElem> {
        if c.tower() != &self.tower {
            return Err(Error::TowerMismatch);
        }
        Ok(self.map(|x| x * c))
    }

    pub fn pow(&self, n: u32) -> GrElem {
        let mut r = Self::one(&self.tower, self.vars).unwrap();
        for _ in 0..n {
            r = r.checked_mul(self).unwrap();
        }
        r
    }

    fn map(&self, f: impl Fn(&GwElem) -> GwElem) -> GrElem {
        let mut r = GrElem { tower: self.tower.clone(), vars: self.vars, coeffs: BTreeMap::new() };
        for (m, c) in &self.coeffs {
            r.add_at(*m, &f(c));
        }
        r
    }

    /// The same element with more variables.
    pub fn widen(&self, vars: usize) -> Result<GrElem> {
        if vars < self.vars {
            return Err(Error::ArityMismatch);
        }
        let mut r = self.clone();
        r.vars = vars;
        Ok(r)
    }

    /// Coefficients in the basis P_S: d_S = Σ_{ε⊇S} c_ε.
    pub fn p_coefficients(&self) -> BTreeMap<u32, GwElem> {
        let mut out: BTreeMap<u32, GwElem> = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let mut s = *e;
            loop {
                let d = out.entry(s).or_insert_with(|| GwElem::zero(&self.tower));
                *d = &*d + c;
                if s == 0 {
                    break;
                }
                s = (s - 1) & e;
            }
        }
        out.retain(|_, d| d.terms().next().is_some());
        out
    }

    /// Equality in GW(k(t₁,…,t_m)).
    pub fn equals(&self, o: &GrElem) -> Result<TriBool> {
        Ok(self.checked_sub(o)?.is_zero())
    }

    pub fn is_zero(&self) -> TriBool {
        let mut r = TriBool::True;
        for (s, d) in self.p_coefficients() {
            let z = if s == 0 { d.is_zero() } else { witt_zero(&d) };
            r = r.and(z);
            if r.is_false() {
                break;
            }
        }
        r
    }

    /// x = a + ⟨tᵢ⟩b ↦ b, dropping the variable tᵢ.
    pub fn second_residue(&self, i: usize) -> Result<GrElem> {
        self.split_at(i).map(|(_, b)| b)
    }

    /// x = a + ⟨tᵢ⟩b ↦ a + b, the specialization tᵢ = 1.
    pub fn specialize_one(&self, i: usize) -> Result<GrElem> {
        let (a, b) = self.split_at(i)?;
        a.checked_add(&b)
    }

    fn split_at(&self, i: usize) -> Result<(GrElem, GrElem)> {
        if i == 0 || i > self.vars {
            return Err(Error::IndexOutOfRange(i));
        }
        let bit = 1u32 << (i - 1);
        let low = bit - 1;
        let mut a = Self::zero(&self.tower, self.vars - 1)?;
        let mut b = Self::zero(&self.tower, self.vars - 1)?;
        for (m, c) in &self.coeffs {
            let squeezed = (m & low) | ((m >> 1) & !low);
            if m & bit == 0 {
                a.add_at(squeezed, c);
            } else {
                b.add_at(squeezed, c);
            }
        }
        Ok((a, b))
    }

    /// The constant when no monomial other than 1 survives in W, else `None`.
    pub fn as_constant(&self) -> Option<GwElem> {
        let d = self.p_coefficients();
        if d.iter().all(|(s, c)| *s == 0 || witt_zero(c).is_true()) {
            Some(d.get(&0).cloned().unwrap_or_else(|| GwElem::zero(&self.tower)))
        } else {
            None
        }
    }
}

/// x = 0 in W(k): x is an integer multiple of H.
fn witt_zero(x: &GwElem) -> TriBool {
    let d = x.dim();
    if d % 2 != 0 {
        return TriBool::False;
    }
    (x - &GwElem::hyperbolic(x.tower()).scale(d / 2)).is_zero()
}

/// The representative of the Witt class of x of rank 0, when the rank is even.
fn rank_zero_representative(x: &GwElem) -> Option<GwElem> {
    let d = x.dim();
    (d % 2 == 0).then(|| x - &GwElem::hyperbolic(x.tower()).scale(d / 2))
}

impl fmt::Display for GrElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if *m == 0 {
                write!(f, "({c})")?;
                continue;
            }
            let vars: Vec<String> = (0..self.vars).filter(|i| m >> i & 1 == 1).map(|i| format!("t{}", i + 1)).collect();
            write!(f, "({c})*<{}>", vars.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for GrElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in GW({})[t1..t{}]", self, self.tower, self.vars)
    }
}

/// Transfer of a group-ring element with coefficients over L down to k.
pub fn gr_transfer(x: &GrElem, k: &FieldTower) -> Result<GrElem> {
    let mut r = GrElem::zero(k, x.vars)?;
    for (m, c) in &x.coeffs {
        r.add_at(*m, &transfer_to(c, k)?);
    }
    Ok(r)
}

/// Norm along the top quadratic step of the coefficient tower.
///
/// Rank-one generators ⟨u·t^ε⟩ have norm ⟨N u⟩ because N(t^ε) is a square,
/// and conjugation fixes the variables.
pub fn gr_norm(x: &GrElem) -> Result<GrElem> {
    let l = &x.tower;
    let k = l.parent().ok_or(Error::OddDegree(1))?.clone();
    let t1 = GrElem::constant(&transfer_to(&GwElem::one(l), &k)?, x.vars)?;
    let mut s = GrElem::zero(l, x.vars)?;
    let mut ns = GrElem::zero(&k, x.vars)?;
    for (mask, coeff) in &x.coeffs {
        for (a, c) in coeff.terms() {
            let ae = a.elem(l);
            let na = GwElem::class(&ae.norm()?)?;
            let nc = t1.scale(&GwElem::int(&k, c * (c - 1) / 2))?.checked_add(&GrElem::constant(&GwElem::int(&k, c), x.vars)?)?;
            let nz = nc.scale(&na)?;
            let zbar = GrElem::monomial(&GwElem::class(&ae.conj()?)?.scale(c), *mask, x.vars)?;
            ns = ns.checked_add(&nz)?.checked_add(&gr_transfer(&s.checked_mul(&zbar)?, &k)?)?;
            s = s.checked_add(&GrElem::monomial(&GwElem::from_class(l, a.clone()).scale(c), *mask, x.vars)?)?;
        }
    }
    Ok(ns)
}

/// u^{⟨t^ε⟩} for a unit u ∈ GW(k), through ⟨a⟩ = tr(k(√2a)) − ⟨2⟩.
fn power_by_monomial(u: &GwElem, mask: u32, vars: usize) -> Result<GrElem> {
    let k = u.tower();
    let two = GwElem::class_int(k, 2);
    // tr(k(√(2t^ε))) = ⟨2⟩ + ⟨2⟩⟨t^ε⟩ inside the model.
    let tr_e1 = GrElem::constant(&two, vars)?.checked_add(&GrElem::monomial(&two, mask, vars)?)?;
    let n1 = norm_restricted_gr(u, &tr_e1)?;
    let two_square = two.equals(&GwElem::one(k))?.is_true();
    let correction = if two_square {
        // ⟨2⟩ = 1.
        u.unit_inverse()?
    } else {
        // ⟨2⟩ = tr(k(√2)) − 1, and N_{k(√2)}(u) from tr(k(√2)) = ⟨2⟩ + 1.
        let n2 = norm_restricted(u, &(&two + &GwElem::one(k)))?;
        &n2.unit_inverse()? * u
    };
    GrElem::constant(&correction, vars)?.checked_mul(&n1)
}

/// x² − 2λ²(x) + λ²(x)·tr(E) for a constant x and tr(E) in the model.
fn norm_restricted_gr(x: &GwElem, tr_e: &GrElem) -> Result<GrElem> {
    let l2 = x.lambda2();
    let c = &(x * x) - &l2.scale(2);
    GrElem::constant(&c, tr_e.vars)?.checked_add(&tr_e.scale(&l2)?)
}

/// x^y for a unit x ∈ GW(k) and y in the group ring.
pub fn gr_exp(x: &GwElem, y: &GrElem) -> Result<GrElem> {
    if x.tower() != &y.tower {
        return Err(Error::TowerMismatch);
    }
    match x.is_unit() {
        TriBool::True => {}
        TriBool::False => return Err(Error::NotAUnit),
        TriBool::Unknown => return Err(Error::Undecided("unit test".into())),
    }
    let mut r = GrElem::one(&y.tower, y.vars)?;
    // Memoize u^{⟨t^ε⟩} for the distinct bases u = x^{c_ε}.
    let mut cache: Vec<(GwElem, GrElem, GrElem)> = Vec::new();
    for (mask, c) in &y.coeffs {
        let u = exp(x, c)?;
        if *mask == 0 {
            r = r.checked_mul(&GrElem::constant(&u, y.vars)?)?;
            continue;
        }
        let hit = cache.iter().position(|(v, _, _)| v == &u);
        let (a, b) = match hit {
            Some(i) => (cache[i].1.clone(), cache[i].2.clone()),
            None => {
                // u^{⟨t^ε⟩} = A + B⟨t^ε⟩ with A, B independent of ε; store them at ε = bit 0.
                let p = power_by_monomial(&u, 1, y.vars.max(1))?;
                let a = GrElem::constant(&p.coeff(0), y.vars)?;
                let b = GrElem::constant(&p.coeff(1), y.vars)?;
                cache.push((u.clone(), a.clone(), b.clone()));
                (a, b)
            }
        };
        let term = a.checked_add(&b.checked_mul(&GrElem::monomial(&GwElem::one(&y.tower), *mask, y.vars)?)?)?;
        r = r.checked_mul(&term)?;
    }
    Ok(r)
}

/// log_(m)(x): the unique y with x^{P_m} = 1 + P_m·y, certified.
pub fn log_m(x: &GwElem, m: usize) -> Result<GwElem> {
    let k = x.tower();
    if !x.in_fn(2).is_true() {
        return Err(Error::NotInF2);
    }
    let pm = GrElem::p_m(k, m, m)?;
    let g = gr_exp(x, &pm)?;
    let mut top = g.clone();
    for _ in 0..m {
        top = top.second_residue(1)?;
    }
    let y = top.coeff(0);
    let expected = GrElem::one(k, m)?.checked_add(&pm.scale(&y)?)?;
    if !g.equals(&expected)?.is_true() {
        return Err(Error::ExtractionMismatch(format!("x^P_{m} is not 1 + P_{m}·y")));
    }
    rank_zero_representative(&y).ok_or(Error::ExtractionMismatch("odd rank top coefficient".into()))
}

/// Number of variables used by [`log`] for torsion exponent r.
pub fn stable_vars(r: u32) -> usize {
    3 * r as usize + 1
}

/// The stable logarithm F₂GW^×(k) → I²_tor(k).
pub fn log(x: &GwElem) -> Result<GwElem> {
    if !x.in_fn(2).is_true() {
        return Err(Error::NotInF2);
    }
    let r = (x - &GwElem::one(x.tower())).torsion_exponent()?;
    let m = stable_vars(r);
    let y = log_m(x, m)?;
    let y2 = log_m(x, m + 1)?;
    if !y.equals(&y2)?.is_true() {
        return Err(Error::ExtractionMismatch(format!("log_({m}) and log_({}) differ", m + 1)));
    }
    if !(y.in_in(2).is_true() && y.is_torsion().is_true()) {
        return Err(Error::ExtractionMismatch("logarithm left I²_tor".into()));
    }
    Ok(y)
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
    fn group_ring_arithmetic() {
        let k = q();
        let t1 = GrElem::var(&k, 1, 2).unwrap();
        let one = GrElem::one(&k, 2).unwrap();
        let u = t1.checked_sub(&one).unwrap();
        let minus_two = GwElem::int(&k, -2);
        assert!(u.pow(2).equals(&u.scale(&minus_two).unwrap()).unwrap().is_true());
        let p2 = GrElem::p_m(&k, 2, 2).unwrap();
        assert_eq!(p2.coeff(3), GwElem::one(&k));
        assert_eq!(p2.coeff(1), GwElem::int(&k, -1));
        assert_eq!(p2.coeff(0), GwElem::one(&k));
        assert!(p2.pow(2).equals(&p2.scale(&GwElem::int(&k, 4)).unwrap()).unwrap().is_true());
        // H(⟨t⟩ − 1) vanishes in GW(k(t)) although its coefficients do not.
        let h = u.scale(&GwElem::hyperbolic(&k)).unwrap();
        assert!(h.is_zero().is_true());
        assert!(u.is_zero().is_false());
    }

    #[test]
    fn residues_and_specialization() {
        let k = q();
        let a = GrElem::constant(&c(&k, 3), 2).unwrap();
        let b = GrElem::constant(&c(&k, 5), 1).unwrap();
        let x = a.checked_add(&GrElem::var(&k, 1, 2).unwrap().checked_mul(&b.widen(2).unwrap()).unwrap()).unwrap();
        assert_eq!(x.second_residue(1).unwrap(), b);
        let p3 = GrElem::p_m(&k, 3, 3).unwrap();
        for i in 1..=3 {
            assert!(p3.specialize_one(i).unwrap().is_zero().is_true());
        }
        assert!(GrElem::constant(&c(&k, 7), 2).unwrap().second_residue(2).unwrap().is_zero().is_true());
        assert!(matches!(p3.second_residue(4), Err(Error::IndexOutOfRange(4))));
    }

    #[test]
    fn norms_in_the_model() {
        let k = q();
        let l = k.extend_int(3).unwrap();
        let tr = transfer_to(&GwElem::one(&l), &k).unwrap();
        let u = GrElem::var(&l, 1, 1).unwrap().checked_sub(&GrElem::one(&l, 1).unwrap()).unwrap();
        let expect = GrElem::var(&k, 1, 1).unwrap().checked_sub(&GrElem::one(&k, 1).unwrap()).unwrap().scale(&-&tr).unwrap();
        assert!(gr_norm(&u).unwrap().equals(&expect).unwrap().is_true());
        for m in 1..=3usize {
            let p = GrElem::p_m(&l, m, m).unwrap();
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let coef = tr.scale(sign << (m - 1));
            let want = GrElem::p_m(&k, m, m).unwrap().scale(&coef).unwrap();
            assert!(gr_norm(&p).unwrap().equals(&want).unwrap().is_true(), "m = {m}");
        }
        let g = gr_transfer(&GrElem::one(&l, 2).unwrap(), &k).unwrap();
        assert_eq!(g, GrElem::constant(&tr, 2).unwrap());
    }

    #[test]
    fn exponentials_in_the_model() {
        let k = q();
        let m1 = GwElem::int(&k, -1);
        assert_eq!(gr_exp(&m1, &GrElem::zero(&k, 1).unwrap()).unwrap(), GrElem::one(&k, 1).unwrap());
        let a = &c(&k, 3) - &GwElem::one(&k);
        let u = GrElem::var(&k, 1, 1).unwrap().checked_sub(&GrElem::one(&k, 1).unwrap()).unwrap();
        let y = u.scale(&a).unwrap();
        let two1 = &c(&k, 2) - &GwElem::one(&k);
        let want = GrElem::one(&k, 1).unwrap().checked_add(&u.scale(&(&two1 * &a)).unwrap()).unwrap();
        assert!(gr_exp(&m1, &y).unwrap().equals(&want).unwrap().is_true());
        let x = c(&k, 5);
        let cst = GrElem::constant(&GwElem::form_ints(&k, &[2, 3]), 2).unwrap();
        let e = gr_exp(&x, &cst).unwrap();
        assert!(e.equals(&GrElem::constant(&exp(&x, &GwElem::form_ints(&k, &[2, 3])).unwrap(), 2).unwrap()).unwrap().is_true());
    }

    #[test]
    fn logarithm_examples() {
        let k = q();
        let one = GwElem::one(&k);
        assert_eq!(log(&one).unwrap(), GwElem::zero(&k));
        let z = &(&c(&k, 3) - &one) * &(&c(&k, 5) - &one);
        let x = exp(&GwElem::int(&k, -1), &z).unwrap();
        let want = &(&c(&k, 2) - &one) * &z;
        for m in 1..=3 {
            assert!(log_m(&x, m).unwrap().equals(&want).unwrap().is_true(), "m = {m}");
        }
        assert!(log(&x).unwrap().equals(&want).unwrap().is_true());
        assert_eq!(log(&c(&k, 3)), Err(Error::NotInF2));
    }
}

//! Étale algebras, Scharlau transfers and Rost norms.

use std::fmt;

use crate::classes::SquareClass;
use crate::error::{Error, Result};
use crate::fields::{FieldElem, FieldTower};
use crate::forms::{diagonalize, TriBool};
use crate::gw::GwElem;

/// A finite product of towers over a common base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaleAlgebra {
    base: FieldTower,
    components: Vec<FieldTower>,
}

impl EtaleAlgebra {
    pub fn new(base: &FieldTower, components: Vec<FieldTower>) -> Result<EtaleAlgebra> {
        if components.is_empty() {
            return Err(Error::NotAnExtension);
        }
        if components.iter().any(|c| !c.extends(base)) {
            return Err(Error::NotAnExtension);
        }
        Ok(EtaleAlgebra { base: base.clone(), components })
    }

    /// kⁿ.
    pub fn split(base: &FieldTower, n: usize) -> EtaleAlgebra {
        EtaleAlgebra { base: base.clone(), components: vec![base.clone(); n.max(1)] }
    }

    /// The field k itself, as the unit algebra.
    pub fn trivial(base: &FieldTower) -> EtaleAlgebra {
        Self::split(base, 1)
    }

    /// k[x]/(x² − d): the field k(√d), or k × k when d is a square.
    pub fn quadratic(d: &FieldElem) -> Result<EtaleAlgebra> {
        let k = &d.tower;
        if d.is_square()? {
            Ok(Self::split(k, 2))
        } else {
            Ok(EtaleAlgebra { base: k.clone(), components: vec![k.extend(d)?] })
        }
    }

    /// Parses `K1 x K2 x ...` with every factor extending `base`.
    pub fn parse(base: &FieldTower, s: &str) -> Result<EtaleAlgebra> {
        let comps = crate::expr::parse_algebra_components(s)?;
        let comps = comps
            .into_iter()
            .map(|c| {
                if c.extends(base) {
                    Ok(c)
                } else {
                    Err(Error::NotAnExtension)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, comps)
    }

    pub fn base(&self) -> &FieldTower {
        &self.base
    }

    pub fn components(&self) -> &[FieldTower] {
        &self.components
    }

    pub fn degree(&self) -> u64 {
        self.components
            .iter()
            .map(|c| 1u64 << (c.height() - self.base.height()))
            .sum()
    }

    /// `k × k`.
    pub fn is_split_pair(&self) -> bool {
        self.components.len() == 2 && self.components.iter().all(|c| c.height() == self.base.height())
    }

    /// tr_{A/k}(1).
    pub fn trace_form(&self) -> GwElem {
        transfer(&GwOverAlgebra::one(self))
    }

    /// Base change A ⊗_k B for a tower B over k; components may be at most
    /// one quadratic step above k.
    pub fn base_change(&self, b: &FieldTower) -> Result<(EtaleAlgebra, Vec<ComponentMap>)> {
        if !b.extends(&self.base) {
            return Err(Error::NotAnExtension);
        }
        let h = self.base.height();
        let mut comps = Vec::new();
        let mut maps = Vec::new();
        for c in &self.components {
            if c.height() == h {
                comps.push(b.clone());
                maps.push(ComponentMap::Same);
                continue;
            }
            if c.height() != h + 1 {
                return Err(Error::OddDegree(1 << (c.height() - h)));
            }
            let a = c.step(c.height()).embed_into(b)?;
            match a.sqrt() {
                Some(s) => {
                    comps.push(b.clone());
                    comps.push(b.clone());
                    maps.push(ComponentMap::Split(s));
                }
                None => {
                    let e = b.extend(&a)?;
                    comps.push(e.clone());
                    maps.push(ComponentMap::Field(e));
                }
            }
        }
        Ok((EtaleAlgebra { base: b.clone(), components: comps }, maps))
    }
}

impl fmt::Display for EtaleAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", v.join(" x "))
    }
}

/// How one component of A is carried to A ⊗ B.
#[derive(Clone, Debug)]
pub enum ComponentMap {
    /// k ⊗ B = B.
    Same,
    /// k(√a) ⊗ B = B(√a).
    Field(FieldTower),
    /// k(√a) ⊗ B = B × B with √a ↦ (s, −s).
    Split(FieldElem),
}

/// An element of GW(A) = ∏ GW(Lᵢ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GwOverAlgebra {
    pub algebra: EtaleAlgebra,
    pub parts: Vec<GwElem>,
}

impl GwOverAlgebra {
    pub fn new(algebra: &EtaleAlgebra, parts: Vec<GwElem>) -> Result<GwOverAlgebra> {
        if parts.len() != algebra.components.len()
            || parts.iter().zip(&algebra.components).any(|(p, c)| p.tower() != c)
        {
            return Err(Error::TowerMismatch);
        }
        Ok(GwOverAlgebra { algebra: algebra.clone(), parts })
    }

    pub fn one(a: &EtaleAlgebra) -> GwOverAlgebra {
        GwOverAlgebra { algebra: a.clone(), parts: a.components.iter().map(GwElem::one).collect() }
    }

    pub fn zero(a: &EtaleAlgebra) -> GwOverAlgebra {
        GwOverAlgebra { algebra: a.clone(), parts: a.components.iter().map(GwElem::zero).collect() }
    }

    fn zip(&self, o: &GwOverAlgebra, f: impl Fn(&GwElem, &GwElem) -> GwElem) -> Result<GwOverAlgebra> {
        if self.algebra != o.algebra {
            return Err(Error::TowerMismatch);
        }
        Ok(GwOverAlgebra {
            algebra: self.algebra.clone(),
            parts: self.parts.iter().zip(&o.parts).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, o: &GwOverAlgebra) -> Result<GwOverAlgebra> {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &GwOverAlgebra) -> Result<GwOverAlgebra> {
        self.zip(o, |a, b| a - b)
    }

    pub fn mul(&self, o: &GwOverAlgebra) -> Result<GwOverAlgebra> {
        self.zip(o, |a, b| a * b)
    }

    pub fn neg(&self) -> GwOverAlgebra {
        self.map(|p| -p)
    }

    pub fn map(&self, f: impl Fn(&GwElem) -> GwElem) -> GwOverAlgebra {
        GwOverAlgebra { algebra: self.algebra.clone(), parts: self.parts.iter().map(f).collect() }
    }

    /// Componentwise equality.
    pub fn equals(&self, o: &GwOverAlgebra) -> Result<TriBool> {
        if self.algebra != o.algebra {
            return Err(Error::TowerMismatch);
        }
        let mut r = TriBool::True;
        for (a, b) in self.parts.iter().zip(&o.parts) {
            r = r.and(a.equals(b)?);
        }
        Ok(r)
    }

    /// The canonical involution of a degree-2 algebra.
    pub fn conj(&self) -> Result<GwOverAlgebra> {
        if self.algebra.is_split_pair() {
            return Ok(GwOverAlgebra {
                algebra: self.algebra.clone(),
                parts: vec![self.parts[1].clone(), self.parts[0].clone()],
            });
        }
        if self.algebra.degree() != 2 {
            return Err(Error::NoTopStep);
        }
        Ok(GwOverAlgebra { algebra: self.algebra.clone(), parts: vec![conj_gw(&self.parts[0])?] })
    }

    /// Image in A ⊗ B.
    pub fn base_change(&self, b: &FieldTower) -> Result<GwOverAlgebra> {
        let (alg, maps) = self.algebra.base_change(b)?;
        let mut parts = Vec::new();
        for (x, m) in self.parts.iter().zip(&maps) {
            match m {
                ComponentMap::Same => parts.push(x.base_change(b)?),
                ComponentMap::Field(e) => {
                    parts.push(x.map_classes(e, |c| {
                        let (u, v) = c.split().unwrap();
                        let u = u.embed_into(b).unwrap();
                        let v = v.embed_into(b).unwrap();
                        FieldElem::from_parts(e, &u, &v).unwrap()
                    }));
                }
                ComponentMap::Split(s) => {
                    for sign in [1i64, -1] {
                        parts.push(x.map_classes(b, |c| {
                            let (u, v) = c.split().unwrap();
                            let u = u.embed_into(b).unwrap();
                            let v = v.embed_into(b).unwrap();
                            &u + &(&(&v * s) * &b.int(sign))
                        }));
                    }
                }
            }
        }
        GwOverAlgebra::new(&alg, parts)
    }
}

/// x|_A.
pub fn restrict(x: &GwElem, a: &EtaleAlgebra) -> Result<GwOverAlgebra> {
    if x.tower() != a.base() {
        return Err(Error::TowerMismatch);
    }
    let parts = a.components.iter().map(|c| x.base_change(c)).collect::<Result<Vec<_>>>()?;
    GwOverAlgebra::new(a, parts)
}

/// Conjugation of the top quadratic step applied to every entry.
pub fn conj_gw(x: &GwElem) -> Result<GwElem> {
    let t = x.tower();
    if t.height() == 0 {
        return Err(Error::NoTopStep);
    }
    Ok(x.map_classes(t, |c| c.conj().unwrap()))
}

/// Gram matrix of (x, y) ↦ tr(c·x·y) in the basis {1, √d}.
pub fn trace_gram(c: &FieldElem) -> Result<Vec<Vec<FieldElem>>> {
    let t = &c.tower;
    let g = t.sqrt_gen(t.height())?;
    let d = &g * &g;
    let a = c.trace()?;
    let b = (c * &g).trace()?;
    let e = (c * &d).trace()?;
    Ok(vec![vec![a, b.clone()], vec![b, e]])
}

/// Scharlau transfer along the top step of the tower of `x`.
pub fn transfer_step(x: &GwElem) -> Result<GwElem> {
    let t = x.tower();
    let k = t.parent().ok_or(Error::NoTopStep)?;
    let mut out = GwElem::zero(k);
    for (c, n) in x.terms() {
        let f = diagonalize(&trace_gram(&c.elem(t))?)?;
        out = &out + &GwElem::from_form(&f).scale(n);
    }
    Ok(out)
}

/// Transfer from a tower down to a sub-tower.
pub fn transfer_to(x: &GwElem, k: &FieldTower) -> Result<GwElem> {
    if !x.tower().extends(k) {
        return Err(Error::NotAnExtension);
    }
    let mut y = x.clone();
    while y.tower().height() > k.height() {
        y = transfer_step(&y)?;
    }
    Ok(y)
}

/// Scharlau transfer tr_{A/k}.
pub fn transfer(x: &GwOverAlgebra) -> GwElem {
    let k = x.algebra.base();
    x.parts
        .iter()
        .fold(GwElem::zero(k), |acc, p| &acc + &transfer_to(p, k).expect("component extends base"))
}

/// Rost norm along the top step, by the grouped Wittkop fold.
pub fn norm_step(x: &GwElem) -> Result<GwElem> {
    let l = x.tower();
    let k = l.parent().ok_or(Error::NoTopStep)?.clone();
    let tr1 = transfer_step(&GwElem::one(l))?;
    let mut s = GwElem::zero(l);
    let mut ns = GwElem::zero(&k);
    for (a, c) in x.terms() {
        let ae = a.elem(l);
        let na = SquareClass::of(&ae.norm()?)?;
        // N(c⟨a⟩) = ⟨N a⟩·(c + tr(1)·c(c−1)/2), valid for every integer c.
        let nc = &GwElem::int(&k, c) + &tr1.scale(c * (c - 1) / 2);
        let nz = nc.twist(&na);
        // tr(s·c⟨ā⟩), class by class: merging terms is cheaper below than over l.
        let abar = ae.conj()?;
        ns = &ns + &nz;
        for (b, m) in s.terms() {
            let t = transfer_step(&GwElem::class(&(&b.elem(l) * &abar))?)?;
            ns = &ns + &t.scale(m * c);
        }
        s = &s + &GwElem::from_class(l, a.clone()).scale(c);
    }
    Ok(ns)
}

/// Rost norm along the top step, folding a signed entry list one entry at a time.
pub fn norm_step_entries(l: &FieldTower, entries: &[(FieldElem, bool)]) -> Result<GwElem> {
    let k = l.parent().ok_or(Error::NoTopStep)?.clone();
    let n_minus_one = &transfer_step(&GwElem::one(l))? - &GwElem::one(&k);
    let mut s = GwElem::zero(l);
    let mut ns = GwElem::zero(&k);
    for (a, negative) in entries {
        let mut nz = GwElem::class(&a.norm()?)?;
        let mut z = GwElem::class(a)?;
        let mut zbar = GwElem::class(&a.conj()?)?;
        if *negative {
            nz = &nz * &n_minus_one;
            z = -z;
            zbar = -zbar;
        }
        ns = &(&ns + &nz) + &transfer_step(&(&s * &zbar))?;
        s = &s + &z;
    }
    Ok(ns)
}

/// Rost norm from a tower down to a sub-tower, one step at a time.
pub fn norm_to(x: &GwElem, k: &FieldTower) -> Result<GwElem> {
    if !x.tower().extends(k) {
        return Err(Error::NotAnExtension);
    }
    let mut y = x.clone();
    while y.tower().height() > k.height() {
        y = norm_step(&y)?;
    }
    Ok(y)
}

/// Rost norm N_{A/k}: the product of the component norms.
pub fn rost_norm(x: &GwOverAlgebra) -> GwElem {
    let k = x.algebra.base();
    x.parts
        .iter()
        .fold(GwElem::one(k), |acc, p| &acc * &norm_to(p, k).expect("component extends base"))
}

/// N_{E/L}(x|_E) from tr(E) alone: x² − 2λ²(x) + λ²(x)·tr(E).
pub fn norm_restricted(x: &GwElem, tr_e: &GwElem) -> Result<GwElem> {
    if tr_e.dim() != 2 {
        return Err(Error::BadTraceForm(tr_e.dim()));
    }
    let l2 = x.lambda2();
    let mut r = &(&(x * x) - &l2.scale(2)) + &(&l2 * tr_e);
    let pad = x.dim() * x.dim() - r.dim();
    if pad != 0 {
        r = &r + &GwElem::hyperbolic(x.tower()).scale(pad / 2);
    }
    Ok(r)
}

/// N(x + y) = N(x) + N(y) + tr(x·ȳ) for a degree-2 algebra, both sides computed separately.
pub fn check_distributivity(x: &GwOverAlgebra, y: &GwOverAlgebra) -> Result<TriBool> {
    if x.algebra.degree() != 2 {
        return Err(Error::OddDegree(x.algebra.degree()));
    }
    let lhs = rost_norm(&x.add(y)?);
    let rhs = &(&rost_norm(x) + &rost_norm(y)) + &transfer(&x.mul(&y.conj()?)?);
    lhs.equals(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldTower {
        FieldTower::rationals()
    }

    #[test]
    fn trace_forms() {
        let k = q();
        let a = EtaleAlgebra::quadratic(&k.int(5)).unwrap();
        assert_eq!(a.trace_form(), GwElem::form_ints(&k, &[2, 10]));
        assert_eq!(EtaleAlgebra::split(&k, 2).trace_form(), GwElem::int(&k, 2));
        let b = EtaleAlgebra::quadratic(&k.int(-3)).unwrap();
        assert!(b.trace_form().equals(&GwElem::form_ints(&k, &[2, -6])).unwrap().is_true());
    }

    #[test]
    fn scharlau_closed_form() {
        // tr⟨u + v√d⟩ = ⟨2u⟩ + ⟨2u·d·N⟩ for u ≠ 0, hyperbolic for u = 0.
        let k = q();
        let l = k.extend_int(7).unwrap();
        let s = l.sqrt_gen(1).unwrap();
        for (u, v) in [(1, 1), (3, -2), (0, 5), (-4, 1), (2, 0)] {
            let c = &l.int(u) + &(&l.int(v) * &s);
            let got = transfer_step(&GwElem::class(&c).unwrap()).unwrap();
            let want = if u == 0 {
                GwElem::hyperbolic(&k)
            } else {
                let n = c.norm().unwrap();
                &GwElem::class_int(&k, 2 * u) + &GwElem::class(&(&k.int(14 * u) * &n)).unwrap()
            };
            assert!(got.equals(&want).unwrap().is_true(), "{u} {v}");
        }
    }

    #[test]
    fn norm_examples() {
        let k = q();
        let a = EtaleAlgebra::quadratic(&k.int(3)).unwrap();
        let t = a.trace_form();
        let m1 = restrict(&GwElem::int(&k, -1), &a).unwrap();
        assert_eq!(rost_norm(&m1), &t - &GwElem::one(&k));
        let two = restrict(&GwElem::int(&k, 2), &a).unwrap();
        assert!(rost_norm(&two).equals(&(&GwElem::int(&k, 2) + &t)).unwrap().is_true());
        let s = EtaleAlgebra::split(&k, 2);
        let x = GwElem::form_ints(&k, &[3, -5]);
        let y = &GwElem::class_int(&k, 7) - &GwElem::int(&k, 2);
        let p = GwOverAlgebra::new(&s, vec![x.clone(), y.clone()]).unwrap();
        assert_eq!(rost_norm(&p), &x * &y);
    }

    #[test]
    fn norm_restricted_matches_rost_norm() {
        let k = q();
        let a = EtaleAlgebra::quadratic(&k.int(-5)).unwrap();
        for x in [
            GwElem::form_ints(&k, &[2, 3, -7]),
            &GwElem::class_int(&k, 6) - &GwElem::form_ints(&k, &[1, 1, -1]),
            GwElem::int(&k, -1),
        ] {
            let direct = rost_norm(&restrict(&x, &a).unwrap());
            let viaλ = norm_restricted(&x, &a.trace_form()).unwrap();
            assert!(direct.equals(&viaλ).unwrap().is_true(), "{x}");
        }
        assert_eq!(norm_restricted(&GwElem::one(&k), &GwElem::one(&k)), Err(Error::BadTraceForm(1)));
    }

    #[test]
    fn distributivity_examples() {
        let k = q();
        let l = k.extend_int(2).unwrap();
        let a = EtaleAlgebra::quadratic(&k.int(2)).unwrap();
        let x = GwOverAlgebra::new(&a, vec![GwElem::class(&(&l.int(1) + &l.sqrt_gen(1).unwrap())).unwrap()]).unwrap();
        let y = GwOverAlgebra::one(&a);
        assert!(check_distributivity(&x, &y).unwrap().is_true());
        let z = GwOverAlgebra::zero(&a);
        assert!(check_distributivity(&z, &z).unwrap().is_true());
    }

    #[test]
    fn fold_order_independence() {
        let k = FieldTower::prime_field(5);
        let l = k.extend_int(2).unwrap();
        let g = l.sqrt_gen(1).unwrap();
        let entries = vec![
            (&l.int(1) + &g, false),
            (l.int(3), true),
            (&g * &l.int(2), false),
            (&l.int(4) + &g, true),
        ];
        let mut rev = entries.clone();
        rev.reverse();
        let a = norm_step_entries(&l, &entries).unwrap();
        let b = norm_step_entries(&l, &rev).unwrap();
        assert_eq!(a, b);
        let x = entries.iter().fold(GwElem::zero(&l), |acc, (e, n)| {
            let c = GwElem::class(e).unwrap();
            if *n {
                &acc - &c
            } else {
                &acc + &c
            }
        });
        assert_eq!(norm_step(&x).unwrap(), a);
    }

    #[test]
    fn base_change_of_norms() {
        let k = FieldTower::prime_field(3);
        let a = EtaleAlgebra::quadratic(&k.int(2)).unwrap();
        let b = k.extend_int(2).unwrap();
        let l = &a.components()[0];
        let x = GwElem::class(&(&l.int(1) + &l.sqrt_gen(1).unwrap())).unwrap();
        let xa = GwOverAlgebra::new(&a, vec![x]).unwrap();
        let lhs = rost_norm(&xa).base_change(&b).unwrap();
        let rhs = rost_norm(&xa.base_change(&b).unwrap());
        assert_eq!(lhs, rhs);
    }
}

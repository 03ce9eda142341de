//! Slow, independent reference computations over finite fields.
//!
//! Everything here avoids the recursive transfer and norm code: transfers are
//! Gram matrices of the full field trace, norms come from tensor induction
//! along the Frobenius, and isometry is decided by counting representations.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::fields::{FieldElem, FieldTower};
use crate::forms::diagonalize;
use crate::gw::GwElem;

fn require_finite(l: &FieldTower, k: &FieldTower) -> Result<u64> {
    if !l.is_finite() || !l.extends(k) {
        return Err(Error::NotAnExtension);
    }
    match l.base() {
        crate::fields::BaseField::PrimeField(p) => Ok(p),
        _ => Err(Error::NotAnExtension),
    }
}

/// x ↦ x^{|K|}, the generator of Gal(L/K).
fn frobenius(x: &FieldElem, k: &FieldTower, p: u64) -> Result<FieldElem> {
    let q = BigUint::from(p).pow(1u32 << k.height());
    let q = q.to_i64().ok_or(Error::HeightLimit { height: k.height(), limit: 0 })?;
    x.pow(q)
}

/// The field trace Tr_{L/K}(z) = Σ φʲ(z), returned in K.
pub fn field_trace(z: &FieldElem, k: &FieldTower) -> Result<FieldElem> {
    let l = z.tower.clone();
    let p = require_finite(&l, k)?;
    let n = 1usize << (l.height() - k.height());
    let mut acc = l.zero();
    let mut y = z.clone();
    for _ in 0..n {
        acc = &acc + &y;
        y = frobenius(&y, k, p)?;
    }
    acc.descend_to(k).ok_or(Error::ExtractionMismatch("trace left the base".into()))
}

fn monomial_basis(l: &FieldTower, k: &FieldTower) -> Result<Vec<FieldElem>> {
    let mut basis = vec![l.one()];
    for i in k.height() + 1..=l.height() {
        let g = l.sqrt_gen(i)?;
        let more: Vec<_> = basis.iter().map(|b| b * &g).collect();
        basis.extend(more);
    }
    Ok(basis)
}

/// tr_{L/K}⟨c⟩ from the Gram matrix of (x, y) ↦ Tr(c·x·y).
pub fn direct_transfer_class(c: &FieldElem, k: &FieldTower) -> Result<GwElem> {
    let basis = monomial_basis(&c.tower, k)?;
    let mut g = Vec::with_capacity(basis.len());
    for bi in &basis {
        let mut row = Vec::with_capacity(basis.len());
        for bj in &basis {
            row.push(field_trace(&(&(c * bi) * bj), k)?);
        }
        g.push(row);
    }
    Ok(GwElem::from_form(&diagonalize(&g)?))
}

/// tr_{L/K} of a virtual form, term by term through [`direct_transfer_class`].
pub fn direct_transfer(x: &GwElem, k: &FieldTower) -> Result<GwElem> {
    let mut out = GwElem::zero(k);
    for (a, m) in x.terms() {
        out = &out + &direct_transfer_class(&a.elem(x.tower()), k)?.scale(m);
    }
    Ok(out)
}

/// N_{L/K}⟨a₁,…,a_r⟩ for a genuine form, by tensor induction.
///
/// The induced form ⊗_j φʲ(q) has basis indexed by f: ℤ/n → {1..r}, with
/// Galois acting by rotation. An orbit of period s contributes
/// tr_{K_s/K}⟨∏ φʲ(a_{f(j)})⟩ where K_s is the degree-s subextension.
pub fn direct_norm(entries: &[FieldElem], k: &FieldTower) -> Result<GwElem> {
    let Some(first) = entries.first() else {
        return Ok(GwElem::zero(k));
    };
    let l = first.tower.clone();
    let p = require_finite(&l, k)?;
    let n = 1usize << (l.height() - k.height());
    let r = entries.len();
    // φʲ(a_i) for all i, j.
    let mut conj = vec![Vec::with_capacity(n); r];
    for (i, a) in entries.iter().enumerate() {
        let mut y = a.clone();
        for _ in 0..n {
            conj[i].push(y.clone());
            y = frobenius(&y, k, p)?;
        }
    }
    let total = r.checked_pow(n as u32).filter(|t| *t <= 1 << 16).ok_or(Error::TooManyVariables {
        vars: n,
        limit: 16,
    })?;
    let mut out = GwElem::zero(k);
    let mut f = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for slot in f.iter_mut() {
            *slot = c % r;
            c /= r;
        }
        let rot = |s: usize| -> Vec<usize> { (0..n).map(|j| f[(j + s) % n]).collect() };
        if (1..n).any(|s| rot(s) < f) {
            continue;
        }
        let period = (1..=n).find(|s| n.is_multiple_of(*s) && rot(*s % n) == f).unwrap();
        let mut prod = l.one();
        for (j, &i) in f.iter().enumerate() {
            prod = &prod * &conj[i][j];
        }
        let ks = l.level(k.height() + period.trailing_zeros() as usize);
        let c = prod.descend_to(&ks).ok_or(Error::ExtractionMismatch("orbit product not fixed".into()))?;
        out = &out + &direct_transfer_class(&c, k)?;
    }
    Ok(out)
}

fn all_elements(t: &FieldTower, p: u64) -> Vec<FieldElem> {
    let basis = monomial_basis(t, &t.level(0)).unwrap_or_default();
    let mut elems = vec![t.zero()];
    for b in &basis {
        let mut next = Vec::with_capacity(elems.len() * p as usize);
        for e in &elems {
            for c in 0..p {
                next.push(e + &(b * &t.int(c as i64)));
            }
        }
        elems = next;
    }
    elems
}

/// For each c ∈ 𝔽_q, the number of v with Σ aᵢvᵢ² = c (𝔽_q in enumeration order).
pub fn representation_counts(entries: &[FieldElem]) -> Result<Vec<usize>> {
    let t = entries.first().map(|e| e.tower.clone()).ok_or(Error::BadMatrix)?;
    let p = match t.base() {
        crate::fields::BaseField::PrimeField(p) => p,
        _ => return Err(Error::NotAnExtension),
    };
    let elems = all_elements(&t, p);
    let index = |x: &FieldElem| elems.iter().position(|e| e == x).unwrap();
    let squares: Vec<usize> = elems.iter().map(|x| index(&(x * x))).collect();
    let mut counts = vec![0usize; elems.len()];
    counts[index(&t.zero())] = 1;
    for a in entries {
        let mut next = vec![0usize; elems.len()];
        let scaled: Vec<FieldElem> = squares.iter().map(|&s| a * &elems[s]).collect();
        for (c, &m) in counts.iter().enumerate() {
            if m == 0 {
                continue;
            }
            for s in &scaled {
                next[index(&(&elems[c] + s))] += m;
            }
        }
        counts = next;
    }
    Ok(counts)
}

/// Isometry of two diagonal forms over a finite field by comparing representation counts.
pub fn counting_isometric(a: &[FieldElem], b: &[FieldElem]) -> Result<bool> {
    Ok(a.len() == b.len() && representation_counts(a)? == representation_counts(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etale::{norm_to, transfer_to};

    #[test]
    fn direct_routes_agree_on_small_cases() {
        let k = FieldTower::prime_field(5);
        let l = k.extend_int(2).unwrap();
        let m = l.extend(&l.sqrt_gen(1).unwrap()).unwrap();
        let a = &m.sqrt_gen(2).unwrap() + &m.int(1);
        let x = GwElem::class(&a).unwrap();
        assert_eq!(direct_transfer(&x, &k).unwrap(), transfer_to(&x, &k).unwrap());
        let b = m.int(3);
        let y = &x + &GwElem::class(&b).unwrap();
        assert_eq!(direct_norm(&[a, b], &k).unwrap(), norm_to(&y, &k).unwrap());
    }

    #[test]
    fn counting_separates_classes() {
        let k = FieldTower::prime_field(7);
        let f = |v: &[i64]| v.iter().map(|n| k.int(*n)).collect::<Vec<_>>();
        assert!(counting_isometric(&f(&[1, 1]), &f(&[3, 5])).unwrap());
        assert!(!counting_isometric(&f(&[1, 1]), &f(&[1, 3])).unwrap());
        assert!(!counting_isometric(&f(&[1]), &f(&[3])).unwrap());
    }
}

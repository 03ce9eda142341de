//! Diagonal bilinear forms, their invariants, and isometry decision.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::classes::SquareClass;
use crate::error::{Error, Result};
use crate::fields::{FieldElem, FieldTower, RealEmbedding};
use crate::localsymbols::{hilbert_int, legendre, relevant_places, Place};

/// Three-valued answer. `True` doubles as "equal", `False` as "not equal".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TriBool {
    True,
    False,
    Unknown,
}

impl TriBool {
    pub fn from_bool(b: bool) -> TriBool {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }

    pub fn is_true(self) -> bool {
        self == TriBool::True
    }

    pub fn is_false(self) -> bool {
        self == TriBool::False
    }

    pub fn and(self, o: TriBool) -> TriBool {
        match (self, o) {
            (TriBool::False, _) | (_, TriBool::False) => TriBool::False,
            (TriBool::True, TriBool::True) => TriBool::True,
            _ => TriBool::Unknown,
        }
    }

    /// `Some(bool)` when decided.
    pub fn known(self) -> Option<bool> {
        match self {
            TriBool::True => Some(true),
            TriBool::False => Some(false),
            TriBool::Unknown => None,
        }
    }
}

impl std::ops::Not for TriBool {
    type Output = TriBool;

    fn not(self) -> TriBool {
        match self {
            TriBool::True => TriBool::False,
            TriBool::False => TriBool::True,
            TriBool::Unknown => TriBool::Unknown,
        }
    }
}

impl fmt::Display for TriBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TriBool::True => "true",
            TriBool::False => "false",
            TriBool::Unknown => "unknown",
        };
        write!(f, "{s}")
    }
}

/// A non-degenerate diagonal form ⟨a₁, …, a_n⟩.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagForm {
    pub tower: FieldTower,
    pub entries: Vec<FieldElem>,
}

impl DiagForm {
    pub fn new(tower: &FieldTower, entries: Vec<FieldElem>) -> Result<DiagForm> {
        for e in &entries {
            if e.tower != *tower {
                return Err(Error::TowerMismatch);
            }
            if e.is_zero() {
                return Err(Error::DegenerateForm);
            }
        }
        Ok(DiagForm { tower: tower.clone(), entries })
    }

    pub fn from_ints(tower: &FieldTower, entries: &[i64]) -> Result<DiagForm> {
        Self::new(tower, entries.iter().map(|n| tower.int(*n)).collect())
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub(crate) fn classes(&self) -> Vec<(SquareClass, u64)> {
        let mut out: Vec<(SquareClass, u64)> = Vec::new();
        for e in &self.entries {
            let c = SquareClass::of(e).unwrap();
            match out.iter_mut().find(|(k, _)| k.same_class(&c, &self.tower)) {
                Some((_, n)) => *n += 1,
                None => out.push((c, 1)),
            }
        }
        out
    }

    pub fn invariants(&self) -> FormInvariants {
        weighted_invariants(&self.tower, &self.classes())
    }

    pub fn isometric(&self, o: &DiagForm) -> Result<TriBool> {
        if self.tower != o.tower {
            return Err(Error::TowerMismatch);
        }
        Ok(decide(&self.tower, &self.classes(), &o.classes()))
    }
}

impl fmt::Display for DiagForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "<{}>", v.join(", "))
    }
}

/// Diagonalizes a symmetric Gram matrix by symmetric elimination.
pub fn diagonalize(g: &[Vec<FieldElem>]) -> Result<DiagForm> {
    let n = g.len();
    if n == 0 || g.iter().any(|r| r.len() != n) {
        return Err(Error::BadMatrix);
    }
    let t = g[0][0].tower.clone();
    for i in 0..n {
        for j in 0..n {
            if g[i][j].tower != t {
                return Err(Error::TowerMismatch);
            }
            if g[i][j] != g[j][i] {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut a: Vec<Vec<FieldElem>> = g.to_vec();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if let Some(i) = (k..n).find(|&i| !a[i][i].is_zero()) {
            a.swap(i, k);
            for row in a.iter_mut() {
                row.swap(i, k);
            }
        } else {
            let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) else {
                return Err(Error::DegenerateForm);
            };
            for c in 0..n {
                let v = &a[k][c] + &a[j][c];
                a[k][c] = v;
            }
            for r in 0..n {
                let v = &a[r][k] + &a[r][j];
                a[r][k] = v;
            }
        }
        let p = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for c in 0..n {
                let v = &a[i][c] - &(&f * &a[k][c]);
                a[i][c] = v;
            }
            for r in 0..n {
                let v = &a[r][i] - &(&f * &a[r][k]);
                a[r][i] = v;
            }
        }
        out.push(p);
    }
    DiagForm::new(&t, out)
}

/// Dimension, signed discriminant, Hasse symbols (ℚ only) and signatures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormInvariants {
    pub dim: i64,
    pub disc: SquareClass,
    pub hasse: Vec<(Place, i32)>,
    pub signatures: Vec<(RealEmbedding, i64)>,
}

impl FormInvariants {
    /// `{"dim":..,"disc":..,"hasse":[[p,s],..],"sig":[..]}`; only finite places are listed.
    pub fn to_json(&self, t: &FieldTower) -> serde_json::Value {
        let hasse: Vec<serde_json::Value> = self
            .hasse
            .iter()
            .filter(|(p, _)| *p != Place::Real)
            .map(|(p, s)| serde_json::json!([p.to_string(), s]))
            .collect();
        serde_json::json!({
            "dim": self.dim,
            "disc": self.disc.display(t).to_string(),
            "hasse": hasse,
            "sig": self.signatures.iter().map(|(_, s)| *s).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn det_class(t: &FieldTower, items: &[(SquareClass, u64)]) -> SquareClass {
    let mut d = SquareClass::one(t);
    for (a, c) in items {
        if c % 2 == 1 {
            d = d.mul(a, t);
        }
    }
    d
}

fn total_dim(items: &[(SquareClass, u64)]) -> u64 {
    items.iter().map(|(_, c)| c).sum()
}

pub(crate) fn signed_disc(t: &FieldTower, items: &[(SquareClass, u64)]) -> SquareClass {
    let n = total_dim(items);
    let d = det_class(t, items);
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        d.mul(&SquareClass::from_int(t, -1), t)
    } else {
        d
    }
}

/// Hasse symbol ∏_{i<j}(aᵢ,aⱼ)_v of a form over ℚ given by squarefree keys with counts.
pub(crate) fn hasse_q(items: &[(BigInt, u64)], v: &Place) -> i32 {
    let mut s = 1;
    let mut d = BigInt::one();
    for (a, c) in items {
        if c % 2 == 1 {
            s *= hilbert_int(&d, a, v).unwrap();
        }
        if c % 4 >= 2 {
            s *= hilbert_int(a, &BigInt::from(-1), v).unwrap();
        }
        if c % 2 == 1 {
            let g = d.gcd(a);
            d = (&d / &g) * (a / &g);
        }
    }
    s
}

fn rational_items(t: &FieldTower, items: &[(SquareClass, u64)]) -> Option<Vec<(BigInt, u64)>> {
    items.iter().map(|(k, c)| k.rational(t).map(|r| (r, *c))).collect()
}

pub(crate) fn signatures(t: &FieldTower, items: &[(SquareClass, u64)]) -> Vec<(RealEmbedding, i64)> {
    t.real_embeddings()
        .into_iter()
        .map(|e| {
            let s = items.iter().map(|(k, c)| k.sign(t, &e.signs) as i64 * *c as i64).sum();
            (e, s)
        })
        .collect()
}

pub(crate) fn weighted_invariants(t: &FieldTower, items: &[(SquareClass, u64)]) -> FormInvariants {
    let hasse = if !t.is_finite() && t.height() == 0 {
        let q = rational_items(t, items).unwrap();
        relevant_places(q.iter().map(|(a, _)| a))
            .into_iter()
            .map(|v| {
                let s = hasse_q(&q, &v);
                (v, s)
            })
            .collect()
    } else {
        Vec::new()
    };
    FormInvariants {
        dim: total_dim(items) as i64,
        disc: signed_disc(t, items),
        hasse,
        signatures: signatures(t, items),
    }
}

/// Is the squarefree integer `d` a square in ℚ_p?
fn square_in_qp(d: &BigInt, p: &BigInt) -> bool {
    if *p == BigInt::from(2) {
        d.mod_floor(&BigInt::from(8)) == BigInt::one()
    } else {
        !(d % p == BigInt::from(0)) && legendre(d, p) == 1
    }
}

/// Isometry decision for two weighted diagonal forms over the same tower.
pub(crate) fn decide(t: &FieldTower, p: &[(SquareClass, u64)], m: &[(SquareClass, u64)]) -> TriBool {
    if total_dim(p) != total_dim(m) {
        return TriBool::False;
    }
    if !det_class(t, p).mul(&det_class(t, m), t).is_one(t) {
        return TriBool::False;
    }
    if t.is_finite() {
        return TriBool::True;
    }
    if signatures(t, p).iter().zip(signatures(t, m)).any(|(a, b)| a.1 != b.1) {
        return TriBool::False;
    }
    let (Some(qp), Some(qm)) = (rational_items(t, p), rational_items(t, m)) else {
        return witness_search(t, p, m);
    };
    let steps: Option<Vec<BigInt>> = (1..=t.height())
        .map(|i| t.step(i).as_rational().map(|r| crate::localsymbols::square_class_q(&r).unwrap()))
        .collect();
    let Some(steps) = steps else {
        return witness_search(t, p, m);
    };
    let places = relevant_places(qp.iter().chain(qm.iter()).map(|(a, _)| a));
    for v in places {
        let Place::Finite(pr) = &v else { continue };
        if steps.iter().all(|d| square_in_qp(d, pr)) && hasse_q(&qp, &v) != hasse_q(&qm, &v) {
            return TriBool::False;
        }
    }
    TriBool::True
}

const WITNESS_BUDGET: usize = 4000;
const WITNESS_MAX_DIM: u64 = 12;

/// Searches for a chain of binary isometries ⟨a,b⟩ ≅ ⟨c, abc⟩ with c = ax² + by².
fn witness_search(t: &FieldTower, p: &[(SquareClass, u64)], m: &[(SquareClass, u64)]) -> TriBool {
    if total_dim(p) > WITNESS_MAX_DIM {
        return TriBool::Unknown;
    }
    let expand = |items: &[(SquareClass, u64)]| -> Vec<FieldElem> {
        items.iter().flat_map(|(k, c)| std::iter::repeat_n(k.elem(t), *c as usize)).collect()
    };
    let mut scalars = vec![t.zero(), t.one(), t.int(-1), t.int(2)];
    for i in 1..=t.height() {
        let g = t.sqrt_gen(i).unwrap();
        scalars.push(g.clone());
        scalars.push(&g + &t.one());
    }
    let mut budget = WITNESS_BUDGET;
    if search(t, expand(p), expand(m), &scalars, &mut budget) {
        TriBool::True
    } else {
        TriBool::Unknown
    }
}

fn same(_t: &FieldTower, a: &FieldElem, b: &FieldElem) -> bool {
    (a * b).is_square().unwrap()
}

fn cancel(t: &FieldTower, p: &mut Vec<FieldElem>, m: &mut Vec<FieldElem>) {
    let mut i = 0;
    while i < p.len() {
        if let Some(j) = m.iter().position(|b| same(t, &p[i], b)) {
            p.remove(i);
            m.remove(j);
        } else {
            i += 1;
        }
    }
}

fn search(t: &FieldTower, mut p: Vec<FieldElem>, mut m: Vec<FieldElem>, sc: &[FieldElem], budget: &mut usize) -> bool {
    cancel(t, &mut p, &mut m);
    if p.is_empty() {
        return true;
    }
    for (lhs, rhs) in [(&p, &m), (&m, &p)] {
        for i in 0..lhs.len() {
            for j in i + 1..lhs.len() {
                for x in sc {
                    for y in sc {
                        if *budget == 0 {
                            return false;
                        }
                        *budget -= 1;
                        let (a, b) = (&lhs[i], &lhs[j]);
                        let c = &(&(a * x) * x) + &(&(b * y) * y);
                        if c.is_zero() || same(t, &c, a) || same(t, &c, b) {
                            continue;
                        }
                        if rhs.iter().any(|r| same(t, &c, r)) {
                            let mut l2: Vec<FieldElem> = lhs.clone();
                            let abc = &(a * b) * &c;
                            l2[i] = c;
                            l2[j] = abc;
                            let r2 = rhs.clone();
                            let ok = if std::ptr::eq(lhs, &p) {
                                search(t, l2, r2, sc, budget)
                            } else {
                                search(t, r2, l2, sc, budget)
                            };
                            if ok {
                                return true;
                            }
                        }
                    }
                }
            }
        }
    }
    false
}

/// Weighted class multiset with merged duplicate classes.
pub(crate) fn merge(t: &FieldTower, items: impl IntoIterator<Item = (SquareClass, u64)>) -> Vec<(SquareClass, u64)> {
    let mut out: Vec<(SquareClass, u64)> = Vec::new();
    let mut exact: BTreeMap<SquareClass, usize> = BTreeMap::new();
    for (k, c) in items {
        if c == 0 {
            continue;
        }
        if let Some(&i) = exact.get(&k) {
            out[i].1 += c;
            continue;
        }
        match out.iter().position(|(j, _)| j.same_class(&k, t)) {
            Some(i) => out[i].1 += c,
            None => {
                exact.insert(k.clone(), out.len());
                out.push((k, c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldTower {
        FieldTower::rationals()
    }

    #[test]
    fn diagonalize_examples() {
        let t = q();
        let m = |r: &[[i64; 2]; 2]| -> Vec<Vec<FieldElem>> {
            r.iter().map(|row| row.iter().map(|x| t.int(*x)).collect()).collect()
        };
        let h = diagonalize(&m(&[[0, 1], [1, 0]])).unwrap();
        assert!(h.isometric(&DiagForm::from_ints(&t, &[1, -1]).unwrap()).unwrap().is_true());
        let d = diagonalize(&m(&[[2, 0], [0, 10]])).unwrap();
        assert_eq!(d, DiagForm::from_ints(&t, &[2, 10]).unwrap());
        let c = diagonalize(&m(&[[1, 1], [1, 2]])).unwrap();
        assert!(c.isometric(&DiagForm::from_ints(&t, &[1, 1]).unwrap()).unwrap().is_true());
        assert_eq!(diagonalize(&m(&[[1, 1], [1, 1]])), Err(Error::DegenerateForm));
        assert_eq!(diagonalize(&m(&[[1, 2], [1, 1]])), Err(Error::NotSymmetric));
    }

    #[test]
    fn invariants_of_examples() {
        let t = q();
        let inv = DiagForm::from_ints(&t, &[2, 10]).unwrap().invariants();
        assert_eq!(inv.dim, 2);
        assert_eq!(inv.disc, SquareClass::from_int(&t, -5));
        assert_eq!(inv.signatures[0].1, 2);
        let h = DiagForm::from_ints(&t, &[1, -1]).unwrap().invariants();
        assert_eq!(h.disc, SquareClass::one(&t));
        assert!(h.hasse.iter().all(|(_, s)| *s == 1));
        let e = DiagForm::from_ints(&t, &[]).unwrap().invariants();
        assert_eq!((e.dim, e.signatures[0].1), (0, 0));
        assert_eq!(e.disc, SquareClass::one(&t));
    }

    #[test]
    fn hasse_product_formula_on_forms() {
        let t = q();
        let f = DiagForm::from_ints(&t, &[3, -7, 10, 5, -6]).unwrap().invariants();
        assert_eq!(f.hasse.iter().map(|(_, s)| s).product::<i32>(), 1);
    }

    #[test]
    fn isometry_examples() {
        let t = q();
        let f = |v: &[i64]| DiagForm::from_ints(&t, v).unwrap();
        assert!(f(&[1, 1]).isometric(&f(&[2, 2])).unwrap().is_true());
        assert!(f(&[1, -1]).isometric(&f(&[5, -5])).unwrap().is_true());
        assert!(f(&[1, 1]).isometric(&f(&[1, -1])).unwrap().is_false());
        assert!(f(&[1, 1]).isometric(&f(&[3, 3])).unwrap().is_false());
    }

    #[test]
    fn tower_decisions() {
        let t = q().extend_int(2).unwrap();
        let f = |v: &[i64]| DiagForm::from_ints(&t, v).unwrap();
        assert!(f(&[1, 1]).isometric(&f(&[3, 1])).unwrap().is_false());
        assert!(f(&[1]).isometric(&f(&[2])).unwrap().is_true());
        assert!(f(&[1, 1]).isometric(&f(&[3, 3])).unwrap().is_true());
        assert!(f(&[1, 1]).isometric(&f(&[7, 7])).unwrap().is_false());
        let k = q().extend_int(5).unwrap();
        let g = |v: &[i64]| DiagForm::from_ints(&k, v).unwrap();
        // ⟨3,3⟩ ≇ ⟨1,1⟩ over ℚ, but √5 generates even local degree at 2 and 3.
        assert!(g(&[1, 1]).isometric(&g(&[3, 3])).unwrap().is_true());
        let s = k.sqrt_gen(1).unwrap();
        let a = &k.one() + &s;
        let x = DiagForm::new(&k, vec![a.clone(), a.clone()]).unwrap();
        let y = DiagForm::new(&k, vec![&a * &k.int(4), &a * &k.int(9)]).unwrap();
        assert!(x.isometric(&y).unwrap().is_true());
    }
}

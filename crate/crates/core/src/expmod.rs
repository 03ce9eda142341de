//! The GW(k)-module structure on GW^×(k): x^y with x^{tr(A)} = N_{A/k}(x|_A).

use rand::Rng;

use crate::classes::SquareClass;
use crate::error::{Error, Result};
use crate::etale::{restrict, rost_norm, transfer, EtaleAlgebra, GwOverAlgebra};
use crate::fields::{FieldElem, FieldTower};
use crate::forms::TriBool;
use crate::gw::GwElem;

/// y = Σ mᵢ·tr(Aᵢ) + c.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceDecomposition {
    pub base: FieldTower,
    pub terms: Vec<(EtaleAlgebra, i64)>,
    pub constant: i64,
}

impl TraceDecomposition {
    fn empty(k: &FieldTower) -> Self {
        TraceDecomposition { base: k.clone(), terms: Vec::new(), constant: 0 }
    }

    fn push(&mut self, a: EtaleAlgebra, m: i64) {
        if m == 0 {
            return;
        }
        match self.terms.iter_mut().find(|(b, _)| *b == a) {
            Some((_, n)) => *n += m,
            None => self.terms.push((a, m)),
        }
        self.terms.retain(|(_, n)| *n != 0);
    }

    fn absorb(&mut self, o: TraceDecomposition, m: i64) {
        for (a, n) in o.terms {
            self.push(a, n * m);
        }
        self.constant += o.constant * m;
    }

    /// Folds the integer constant into copies of tr(k × k) = 2, leaving c ∈ {0, 1}.
    fn finish(mut self) -> Self {
        let c = self.constant.rem_euclid(2);
        let q = (self.constant - c) / 2;
        self.push(EtaleAlgebra::split(&self.base, 2), q);
        self.constant = c;
        self
    }

    /// Σ mᵢ·tr(Aᵢ) + c.
    pub fn evaluate(&self) -> GwElem {
        self.terms
            .iter()
            .fold(GwElem::int(&self.base, self.constant), |acc, (a, m)| &acc + &a.trace_form().scale(*m))
    }
}

/// ⟨a⟩ as a signed combination of trace forms, by the deterministic rule.
fn decompose_class(k: &FieldTower, a: &SquareClass) -> Result<TraceDecomposition> {
    let mut d = TraceDecomposition::empty(k);
    if a.is_one(k) {
        d.constant = 1;
        return Ok(d);
    }
    let two = SquareClass::from_int(k, 2);
    let two_square = two.is_one(k);
    let decompose_two = |d: &mut TraceDecomposition, m: i64| -> Result<()> {
        if two_square {
            d.constant += m;
        } else {
            d.push(EtaleAlgebra::quadratic(&k.int(2))?, m);
            d.constant -= m;
        }
        Ok(())
    };
    if a.mul(&two, k).is_one(k) {
        decompose_two(&mut d, 1)?;
        return Ok(d);
    }
    let ae = a.elem(k);
    d.push(EtaleAlgebra::quadratic(&(&ae * &k.int(2)))?, 1);
    decompose_two(&mut d, -1)?;
    Ok(d)
}

/// The deterministic decomposition of y.
pub fn trace_decompose(y: &GwElem) -> Result<TraceDecomposition> {
    let k = y.tower();
    let mut d = TraceDecomposition::empty(k);
    for (a, m) in y.terms() {
        d.absorb(decompose_class(k, a)?, m);
    }
    Ok(d.finish())
}

fn random_scalar(k: &FieldTower, rng: &mut impl Rng) -> FieldElem {
    loop {
        let n = rng.gen_range(-7i64..=7);
        if n == 0 {
            continue;
        }
        let x = k.int(n);
        if x.is_zero() {
            continue;
        }
        if k.height() == 0 || rng.gen_bool(0.5) {
            return x;
        }
        let g = k.sqrt_gen(rng.gen_range(1..=k.height())).unwrap();
        let y = &x + &(&g * &k.int(rng.gen_range(-3i64..=3)));
        if !y.is_zero() {
            return y;
        }
    }
}

/// An alternative decomposition chosen at random among equivalent rewrites.
pub fn trace_decompose_random(y: &GwElem, rng: &mut impl Rng) -> Result<TraceDecomposition> {
    let k = y.tower();
    let mut d = TraceDecomposition::empty(k);
    for (a, m) in y.terms() {
        let choice = rng.gen_range(0..4);
        let ae = a.elem(k);
        match choice {
            1 => {
                // ⟨a⟩ = ⟨a r²⟩.
                let r = random_scalar(k, rng);
                let b = SquareClass::of(&(&ae * &(&r * &r)))?;
                d.absorb(decompose_class(k, &b)?, m);
            }
            2 => {
                // add ⟨b⟩ + ⟨−b⟩ − 1 − ⟨−1⟩ = 0.
                let b = random_scalar(k, rng);
                d.absorb(decompose_class(k, a)?, m);
                for (n, s) in [(b.clone(), 1i64), (-&b, 1), (k.one(), -1), (k.int(-1), -1)] {
                    d.absorb(decompose_class(k, &SquareClass::of(&n)?)?, s * m);
                }
            }
            3 if k.height() + 2 <= k.height_limit() && !a.is_one(k) => {
                // tr(k(√b, √a)) = 1 + ⟨b⟩ + ⟨a⟩ + ⟨ab⟩.
                let b = random_scalar(k, rng);
                let lb = if b.is_square()? { None } else { Some(k.extend(&b)?) };
                let ok = lb.as_ref().map(|l| !ae.embed_into(l).unwrap().is_square().unwrap());
                if let (Some(l), Some(true)) = (lb, ok) {
                    let big = l.extend(&ae.embed_into(&l)?)?;
                    d.push(EtaleAlgebra::new(k, vec![big])?, m);
                    d.constant -= m;
                    d.absorb(decompose_class(k, &SquareClass::of(&b)?)?, -m);
                    d.absorb(decompose_class(k, &SquareClass::of(&(&ae * &b))?)?, -m);
                } else {
                    d.absorb(decompose_class(k, a)?, m);
                }
            }
            _ => d.absorb(decompose_class(k, a)?, m),
        }
    }
    Ok(d.finish())
}

fn require_unit(x: &GwElem) -> Result<()> {
    match x.is_unit() {
        TriBool::True => Ok(()),
        TriBool::False => Err(Error::NotAUnit),
        TriBool::Unknown => Err(Error::Undecided("unit test".into())),
    }
}

fn power(x: &GwElem, xinv: &GwElem, n: i64) -> GwElem {
    if n >= 0 {
        x.pow(n as u32)
    } else {
        xinv.pow(n.unsigned_abs() as u32)
    }
}

/// x^y along a given decomposition of y.
pub fn exp_with(x: &GwElem, d: &TraceDecomposition) -> Result<GwElem> {
    require_unit(x)?;
    if x.tower() != &d.base {
        return Err(Error::TowerMismatch);
    }
    let xinv = x.unit_inverse()?;
    let mut r = power(x, &xinv, d.constant);
    for (a, m) in &d.terms {
        let base = if *m >= 0 { x } else { &xinv };
        let n = rost_norm(&restrict(base, a)?);
        r = (&r * &n.pow(m.unsigned_abs() as u32)).reduced();
    }
    Ok(r)
}

/// x^y for a unit x.
pub fn exp(x: &GwElem, y: &GwElem) -> Result<GwElem> {
    require_unit(x)?;
    if x.tower() != y.tower() {
        return Err(Error::TowerMismatch);
    }
    exp_with(x, &trace_decompose(y)?)
}

/// x^⟨a⟩.
pub fn exp_by_square_class(x: &GwElem, a: &FieldElem) -> Result<GwElem> {
    require_unit(x)?;
    exp_with(x, &decompose_class(x.tower(), &SquareClass::of(a)?)?.finish())
}

/// Componentwise x^y over an étale algebra.
pub fn exp_over(x: &GwOverAlgebra, y: &GwOverAlgebra) -> Result<GwOverAlgebra> {
    if x.algebra != y.algebra {
        return Err(Error::TowerMismatch);
    }
    let parts = x.parts.iter().zip(&y.parts).map(|(a, b)| exp(a, b)).collect::<Result<Vec<_>>>()?;
    GwOverAlgebra::new(&x.algebra, parts)
}

/// tr_{A/k} applied to an exponent, for the projection formulas.
pub fn transfer_exponent(y: &GwOverAlgebra) -> GwElem {
    transfer(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldTower {
        FieldTower::rationals()
    }

    #[test]
    fn decomposition_examples() {
        let k = q();
        let a = EtaleAlgebra::quadratic(&k.int(3)).unwrap();
        let d = trace_decompose(&a.trace_form()).unwrap();
        assert!(d.evaluate().equals(&a.trace_form()).unwrap().is_true());
        let one = trace_decompose(&GwElem::one(&k)).unwrap();
        assert!(one.terms.is_empty() && one.constant == 1);
        let two = trace_decompose(&GwElem::int(&k, 2)).unwrap();
        assert_eq!(two.terms, vec![(EtaleAlgebra::split(&k, 2), 1)]);
        assert_eq!(two.constant, 0);
        let y = &GwElem::form_ints(&k, &[2, -3, 5, 6]) - &GwElem::form_ints(&k, &[7, 1, 1]);
        assert_eq!(trace_decompose(&y).unwrap().evaluate(), y);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let r = trace_decompose_random(&y, &mut rng).unwrap();
            assert!(r.evaluate().equals(&y).unwrap().is_true());
        }
    }

    #[test]
    fn exp_examples() {
        let k = q();
        let m1 = GwElem::int(&k, -1);
        let x = &GwElem::one(&k) + &(&(&GwElem::class_int(&k, 2) - &GwElem::one(&k)) * &(&GwElem::class_int(&k, 5) - &GwElem::one(&k)));
        assert!(exp(&x, &GwElem::one(&k)).unwrap().equals(&x).unwrap().is_true());
        let a = EtaleAlgebra::quadratic(&k.int(7)).unwrap();
        let t = a.trace_form();
        assert!(exp(&m1, &t).unwrap().equals(&(&t - &GwElem::one(&k))).unwrap().is_true());
        let c3 = GwElem::class_int(&k, 3);
        let y = GwElem::form_ints(&k, &[2, 5, -1]);
        assert!(exp(&c3, &y).unwrap().equals(&c3.pow(3)).unwrap().is_true());
        assert_eq!(exp(&GwElem::int(&k, 2), &y), Err(Error::NotAUnit));
        assert!(exp_by_square_class(&x, &k.int(4)).unwrap().equals(&x).unwrap().is_true());
        assert!(exp_by_square_class(&c3, &k.int(6)).unwrap().equals(&c3).unwrap().is_true());
    }

    #[test]
    fn finite_field_exp() {
        let k = FieldTower::prime_field(5);
        let m1 = GwElem::int(&k, -1);
        let y = &GwElem::class_int(&k, 2) - &GwElem::one(&k);
        let e = exp(&m1, &y).unwrap();
        // (−1)^y ≡ 1 + y mod I², and I² = 0 over a finite field.
        assert_eq!(e, &GwElem::one(&k) + &y);
    }
}

//! The presentation of GW^×(k) by −1 and F₂, and the exact sequence
//! 0 → I²/2I → GW/2 ⊕ I²_tor → GW^× → 1.

use crate::error::{Error, Result};
use crate::expmod::exp;
use crate::fields::FieldTower;
use crate::forms::TriBool;
use crate::gw::GwElem;
use crate::report::{run_cases, Check, Report};
use crate::sampling;

fn require_unit(x: &GwElem) -> Result<()> {
    match x.is_unit() {
        TriBool::True => Ok(()),
        TriBool::False => Err(Error::NotAUnit),
        TriBool::Unknown => Err(Error::Undecided("unit test".into())),
    }
}

/// Writes a unit as x = (−1)^y · z with z ∈ F₂, and verifies the result.
pub fn decompose_unit(x: &GwElem) -> Result<(GwElem, GwElem)> {
    require_unit(x)?;
    let k = x.tower();
    let one = GwElem::one(k);
    let m1 = GwElem::int(k, -1);
    let n = if x.dim() == 1 { 0 } else { 1 };
    let z1 = if n == 0 { x.clone() } else { -x };
    // [z₁ − 1] ∈ I/I² is the class ⟨d⟩ − 1; t = 1 − ⟨d⟩ represents its negative.
    let d = (&z1 - &one).disc();
    let t = &one - &GwElem::from_class(k, d);
    let y = &GwElem::int(k, n) - &t;
    let z = (&exp(&m1, &t)? * &z1).reduced();
    if !z.in_fn(2).is_true() {
        return Err(Error::ExtractionMismatch("z is not in F_2".into()));
    }
    let back = &exp(&m1, &y)? * &z;
    if !back.equals(x)?.is_true() {
        return Err(Error::ExtractionMismatch("(−1)^y·z does not reassemble x".into()));
    }
    Ok((y.reduced(), z))
}

/// x ∈ 2GW + I², decided as dim x even and x − dim(x) ∈ I².
pub fn in_2gw_plus_i2(x: &GwElem) -> bool {
    let d = x.dim();
    d % 2 == 0 && (x - &GwElem::int(x.tower(), d)).disc().is_one(x.tower())
}

fn is_one(x: &GwElem) -> Result<TriBool> {
    x.equals(&GwElem::one(x.tower()))
}

/// Sampled checks of I² → GW/2 ⊕ F₂ → GW^× → 1.
pub fn check_presentation(k: &FieldTower, samples: usize, seed: u64) -> Report {
    let mut report = Report::new("presentation", "GW^×(k) is generated by −1 and F₂GW^×(k); exactness of I² → GW/2 ⊕ F₂ → GW^×", Some(k), samples, seed);
    let two_square = GwElem::class_int(k, 2).equals(&GwElem::one(k)).map(|b| b.is_true()).unwrap_or(false);
    let m1 = GwElem::int(k, -1);
    let cases = run_cases("presentation", samples, seed, |i, rng| {
        let mut out = Vec::new();
        if i == 0 {
            let a = sampling::random_scalar(k, rng);
            let x = GwElem::class(&a).unwrap().scale(2);
            out.push(Check::new("(-1)^(2<a>) = 1", x.to_string(), || is_one(&exp(&m1, &x)?)));
            if let Some(a) = (0..50).map(|_| sampling::random_scalar(k, rng)).find(|a| !a.is_square().unwrap()) {
                let x = &GwElem::class(&a).unwrap() - &GwElem::one(k);
                out.push(Check::new("(-1)^(<a>-1) not in F2", x.to_string(), || Ok(!exp(&m1, &x)?.in_fn(2))));
            }
        }
        let u = sampling::random_unit(k, rng);
        out.push(Check::new("surjectivity witness", u.to_string(), || decompose_unit(&u).map(|_| TriBool::True)));
        let v = sampling::random_gw(k, rng);
        out.push(Check::new("r is defined on GW/2", v.to_string(), || is_one(&exp(&m1, &v.scale(2))?)));
        let w = sampling::random_in(k, rng, 2);
        out.push(Check::new("q lands in F2", w.to_string(), || Ok(exp(&m1, &w)?.in_fn(2))));
        if two_square {
            out.push(Check::new("(-1)^w = 1 when 2 is a square", w.to_string(), || is_one(&exp(&m1, &w)?)));
        }
        let x = sampling::random_exactness_candidate(k, rng);
        out.push(Check::new("middle exactness", x.to_string(), || {
            let lhs = exp(&m1, &x)?.in_fn(2);
            let rhs = in_2gw_plus_i2(&x);
            Ok(match lhs.known() {
                Some(b) => TriBool::from_bool(b == rhs),
                None => TriBool::Unknown,
            })
        }));
        out
    });
    report.cases = cases;
    report
}

/// Sampled checks of 0 → I²/2I → GW/2 ⊕ I²_tor → GW^× → 1 with
/// x ↦ (x mod 2, (⟨2⟩−1)x) and (w, v) ↦ (−1)^w·(1+v)⁻¹.
pub fn check_t0_sequence(k: &FieldTower, samples: usize, seed: u64) -> Report {
    let mut report = Report::new("presentation-t0", "exactness of 0 → I²/2I → GW/2 ⊕ I²_tor → GW^× → 1; (−1)^x = 1 + (⟨2⟩−1)x on I²", Some(k), samples, seed);
    let one = GwElem::one(k);
    let m1 = GwElem::int(k, -1);
    let eta = &GwElem::class_int(k, 2) - &one;
    let cases = run_cases("presentation-t0", samples, seed, |i, rng| {
        let mut out = Vec::new();
        if i == 0 {
            let zero = GwElem::zero(k);
            out.push(Check::new("(0, 0) maps to 1", "0".into(), || is_one(&exp(&m1, &zero)?)));
        }
        let x = sampling::random_in(k, rng, 2);
        let ex = &one + &(&eta * &x);
        out.push(Check::new("(-1)^x = 1 + (<2>-1)x on I2", x.to_string(), || exp(&m1, &x)?.equals(&ex)));
        out.push(Check::new("composite is 1", x.to_string(), || {
            let v = &eta * &x;
            if !(v.in_in(2).is_true() && v.is_torsion().is_true()) {
                return Ok(TriBool::False);
            }
            is_one(&(&exp(&m1, &x)? * &(&one + &v).unit_inverse()?))
        }));
        let u = sampling::random_unit(k, rng);
        out.push(Check::new("surjectivity witness", u.to_string(), || {
            let (y, z) = decompose_unit(&u)?;
            let v = &z.unit_inverse()? - &one;
            if !(v.in_in(2).is_true() && v.is_torsion().is_true()) {
                return Ok(TriBool::False);
            }
            (&exp(&m1, &y)? * &(&one + &v).unit_inverse()?).equals(&u)
        }));
        // An element of I² ∩ 2GW is 2u with dim u = 0, hence lies in 2I; the
        // second component must then vanish as well.
        let h = sampling::random_in(k, rng, 1);
        let x2 = h.scale(2);
        out.push(Check::new("2I maps to zero", x2.to_string(), || {
            let in_i2 = x2.in_in(2);
            let in_2i = h.in_in(1);
            Ok(in_i2.and(in_2i).and((&eta * &x2).is_zero()))
        }));
        out
    });
    report.cases = cases;
    report
}

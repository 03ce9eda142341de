//! The named property suites behind `gwlab check`.
//!
//! Every suite is deterministic in its seed, runs its cases in parallel, and
//! reports each assertion separately. Equality is always decided over ℚ or
//! over a finite tower, where it is complete.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::etale::{
    check_distributivity, norm_restricted, norm_step, norm_step_entries, norm_to, restrict, rost_norm, transfer,
    transfer_step, transfer_to, EtaleAlgebra, GwOverAlgebra,
};
use crate::expmod::{exp, exp_over, exp_with, trace_decompose_random};
use crate::fields::{FieldElem, FieldTower};
use crate::forms::{diagonalize, DiagForm, TriBool};
use crate::gw::GwElem;
use crate::laurent::{gr_exp, gr_norm, log, log_m, stable_vars, GrElem};
use crate::localsymbols::{hilbert, relevant_places};
use crate::oracle::{counting_isometric, direct_norm, direct_transfer};
use crate::presentation::{check_presentation, check_t0_sequence};
use crate::report::{run_cases, Check, Report};
use crate::sampling::{self, nonsquares};

pub const SUITES: &[&str] = &[
    "wittkop",
    "structure",
    "module-axioms",
    "projection",
    "norm-ideals",
    "arason",
    "technical",
    "log",
    "presentation",
    "tambara",
    "cross-norm",
    "equality-oracle",
    "hilbert",
];

/// Runs a suite by name. `field` restricts suites that accept one field.
pub fn run_suite(name: &str, samples: usize, seed: u64, field: Option<&FieldTower>) -> Result<Report> {
    let q = FieldTower::rationals();
    Ok(match name {
        "wittkop" => wittkop(samples, seed),
        "structure" => structure(samples, seed),
        "module-axioms" => module_axioms(samples, seed),
        "projection" => projection(samples, seed),
        "norm-ideals" => norm_ideals(samples, seed),
        "arason" => arason(samples, seed),
        "technical" => technical(samples, seed),
        "log" => log_suite(field.unwrap_or(&q), samples, seed)?,
        "presentation" => match field {
            Some(k) => presentation(std::slice::from_ref(k), samples, seed),
            None => presentation(&[q, FieldTower::prime_field(7)], samples, seed),
        },
        "tambara" => tambara(samples, seed),
        "cross-norm" => cross_norm(samples, seed),
        "equality-oracle" => equality_oracle(samples, seed),
        "hilbert" => hilbert_suite(samples, seed),
        "all" => {
            let parts = SUITES.iter().map(|s| run_suite(s, samples, seed, None)).collect::<Result<Vec<_>>>()?;
            Report::combine("all", "every suite", samples, seed, parts)
        }
        other => return Err(Error::Syntax { pos: 0, msg: format!("unknown suite `{other}`") }),
    })
}

fn eq(a: &GwElem, b: &GwElem) -> Result<TriBool> {
    a.equals(b)
}

fn test_fields() -> Vec<FieldTower> {
    vec![FieldTower::rationals(), FieldTower::prime_field(3), FieldTower::prime_field(5), FieldTower::prime_field(13)]
}

/// k × k and k(√d) for up to three nonsquares d.
fn degree_two_algebras(k: &FieldTower) -> Vec<EtaleAlgebra> {
    let mut out = vec![EtaleAlgebra::split(k, 2)];
    for d in nonsquares(k, 3) {
        out.push(EtaleAlgebra::quadratic(&d).expect("nonsquare"));
    }
    out
}

fn random_over(a: &EtaleAlgebra, rng: &mut ChaCha8Rng, genuine: bool) -> GwOverAlgebra {
    let parts = a
        .components()
        .iter()
        .map(|c| if genuine { sampling::random_form(c, rng, 3) } else { sampling::random_gw(c, rng) })
        .collect();
    GwOverAlgebra::new(a, parts).expect("parts match components")
}

fn entries_of(x: &GwElem) -> Vec<FieldElem> {
    let t = x.tower();
    x.terms().flat_map(|(a, m)| std::iter::repeat_n(a.elem(t), m.max(0) as usize)).collect()
}

fn wittkop(samples: usize, seed: u64) -> Report {
    let mut parts = Vec::new();
    for k in test_fields() {
        for a in degree_two_algebras(&k) {
            let tag = format!("wittkop/{k}/{a}");
            let mut r = Report::new(&tag, "Wittkop's formula N(x+y) = N(x) + N(y) + tr(x·ȳ)", Some(&k), samples, seed);
            let finite = k.is_finite();
            r.cases = run_cases(&tag, samples, seed, |_, rng| {
                let x = random_over(&a, rng, finite);
                let y = random_over(&a, rng, finite);
                let input = format!("x = {:?}, y = {:?}", x.parts, y.parts);
                let mut out = Vec::new();
                let rhs = || -> Result<GwElem> {
                    Ok(&(&rost_norm(&x) + &rost_norm(&y)) + &transfer(&x.mul(&y.conj()?)?))
                };
                let s = x.add(&y).unwrap();
                let scrambled = sampling::scrambled_entries(&s.parts[0], rng);
                // The left side folds a shuffled, redundant entry list one entry at a time.
                out.push(Check::new("N(x+y) = N(x) + N(y) + tr(x conj(y))", input.clone(), || {
                    let lhs = if a.is_split_pair() {
                        &s.parts[0] * &s.parts[1]
                    } else {
                        norm_step_entries(&a.components()[0], &scrambled)?
                    };
                    eq(&lhs, &rhs()?)
                }));
                if finite && !a.is_split_pair() {
                    out.push(Check::new("fold agrees with tensor induction", input, || {
                        eq(&direct_norm(&entries_of(&s.parts[0]), &k)?, &rhs()?)
                    }));
                }
                out
            });
            parts.push(r);
        }
    }
    Report::combine("wittkop", "Wittkop's formula N(x+y) = N(x) + N(y) + tr(x·ȳ)", samples, seed, parts)
}

/// 𝔽_p ⊂ 𝔽_p(√d) ⊂ 𝔽_p(√d)(√e).
fn finite_tower(p: u64) -> (FieldTower, FieldTower, FieldTower) {
    let k = FieldTower::prime_field(p);
    let l1 = k.extend(&k.nonsquare()).unwrap();
    let l2 = l1.extend(&l1.nonsquare()).unwrap();
    (k, l1, l2)
}

fn structure(samples: usize, seed: u64) -> Report {
    let anchor = "norms and transfers: transitivity, base change, independence of the fold order";
    let mut r = Report::new("structure", anchor, None, samples, seed);
    r.cases = run_cases("structure", samples, seed, |_, rng| {
        let p = *[3u64, 5, 7, 13].choose(rng).unwrap();
        let (k, l1, l2) = finite_tower(p);
        let mut out = Vec::new();
        let x = sampling::random_form(&l2, rng, 3);
        let entries = entries_of(&x);
        out.push(Check::new(format!("F{p}: norm transitivity"), x.to_string(), || {
            eq(&norm_to(&norm_to(&x, &l1)?, &k)?, &direct_norm(&entries, &k)?)
        }));
        out.push(Check::new(format!("F{p}: transfer transitivity"), x.to_string(), || {
            eq(&transfer_to(&transfer_to(&x, &l1)?, &k)?, &direct_transfer(&x, &k)?)
        }));
        // Base change along B/k for A/k of degree 2, with k = 𝔽_p or 𝔽_p(√d).
        let (base, top) = if rng.gen_bool(0.5) { (k.clone(), l1.clone()) } else { (l1.clone(), l2.clone()) };
        let alg = if rng.gen_bool(0.3) {
            EtaleAlgebra::split(&base, 2)
        } else {
            EtaleAlgebra::new(&base, vec![top.clone()]).unwrap()
        };
        let b = if rng.gen_bool(0.5) { top.clone() } else { base.extend(&base.int(-1)).unwrap_or(top.clone()) };
        let y = random_over(&alg, rng, false);
        let input = format!("{alg} over {base}, B = {b}, y = {:?}", y.parts);
        out.push(Check::new(format!("F{p}: norm base change"), input.clone(), || {
            let lhs = rost_norm(&y).base_change(&b)?;
            eq(&lhs, &rost_norm(&y.base_change(&b)?))
        }));
        out.push(Check::new(format!("F{p}: transfer base change"), input, || {
            let lhs = transfer(&y).base_change(&b)?;
            eq(&lhs, &transfer(&y.base_change(&b)?))
        }));
        // Fold order, over ℚ and over 𝔽_p.
        for l in [FieldTower::rationals().extend_int(*[2i64, 3, -1, 5].choose(rng).unwrap()).unwrap(), l1.clone()] {
            let z = sampling::random_gw(&l, rng);
            let scrambled = sampling::scrambled_entries(&z, rng);
            out.push(Check::new(format!("{l}: fold order"), z.to_string(), || {
                eq(&norm_step(&z)?, &norm_step_entries(&l, &scrambled)?)
            }));
        }
        out
    });
    r
}

fn quadratic_q(rng: &mut impl Rng) -> FieldTower {
    let d = *[-1i64, 2, 3, -2, 5, -3, 6, 7, -5].choose(rng).unwrap();
    FieldTower::rationals().extend_int(d).unwrap()
}

fn arason(samples: usize, seed: u64) -> Report {
    let q = FieldTower::rationals();
    let mut r = Report::new("arason", "Arason: tr(Iⁿ(A)) ⊂ Iⁿ(k)", Some(&q), samples, seed);
    r.cases = run_cases("arason", samples, seed, |_, rng| {
        let l = quadratic_q(rng);
        (1..=2)
            .map(|n| {
                let x = sampling::random_in(&l, rng, n);
                Check::new(format!("{l}: tr(I^{n}) in I^{n}"), x.to_string(), || Ok(transfer_to(&x, &q)?.in_in(n)))
            })
            .collect()
    });
    r
}

fn norm_ideals(samples: usize, seed: u64) -> Report {
    let q = FieldTower::rationals();
    let anchor = "degree-2 norms: N(Iⁿ) ⊂ I²ⁿ, N(Fₙ) ⊂ Fₙ, and α_n(N x) = tr(α_n x) mod I²ⁿ";
    let mut r = Report::new("norm-ideals", anchor, Some(&q), samples, seed);
    r.cases = run_cases("norm-ideals", samples, seed, |_, rng| {
        let l = quadratic_q(rng);
        let one = GwElem::one(&l);
        let mut out = Vec::new();
        for n in 1..=2u32 {
            let x = sampling::random_in(&l, rng, n);
            out.push(Check::new(format!("{l}: N(I^{n}) in I^{}", 2 * n), x.to_string(), || Ok(norm_to(&x, &q)?.in_in(2 * n))));
            let u = if n == 1 { l1_unit(&l, rng) } else { l2_unit(&l, rng) };
            out.push(Check::new(format!("{l}: N(F_{n}) in F_{n}"), u.to_string(), || Ok(norm_to(&u, &q)?.in_fn(n))));
            out.push(Check::new(format!("{l}: alpha_{n} square"), u.to_string(), || {
                let lhs = &norm_to(&u, &q)? - &GwElem::one(&q);
                let rhs = transfer_to(&(&u - &one), &q)?;
                Ok((&lhs - &rhs).in_in(2 * n))
            }));
        }
        out
    });
    r
}

/// ⟨a⟩ with a ∈ L arbitrary, times an F₂ element with rational entries.
fn l1_unit(l: &FieldTower, rng: &mut ChaCha8Rng) -> GwElem {
    let a = GwElem::class(&sampling::random_scalar(l, rng)).unwrap();
    if rng.gen_bool(0.5) {
        a
    } else {
        &a * &l2_unit(l, rng)
    }
}

/// 1 + z with z = Σ ±(⟨a⟩−1)(⟨b⟩−1), a > 0 rational and b ∈ L arbitrary.
fn l2_unit(l: &FieldTower, rng: &mut ChaCha8Rng) -> GwElem {
    let one = GwElem::one(l);
    let mut z = GwElem::zero(l);
    for _ in 0..rng.gen_range(1..=2) {
        let a = &GwElem::class(&sampling::random_positive(l, rng)).unwrap() - &one;
        let b = &GwElem::class(&sampling::random_scalar(l, rng)).unwrap() - &one;
        z = if rng.gen_bool(0.5) { &z + &(&a * &b) } else { &z - &(&a * &b) };
    }
    &one + &z
}

fn module_axioms(samples: usize, seed: u64) -> Report {
    let anchor = "GW(k)-module structure on GW^×(k): well-definedness, module axioms, Fₙ submodules";
    let parts = [FieldTower::rationals(), FieldTower::prime_field(5)]
        .into_iter()
        .map(|k| {
            let tag = format!("module-axioms/{k}");
            let mut r = Report::new(&tag, anchor, Some(&k), samples, seed);
            r.cases = run_cases(&tag, samples, seed, |_, rng| {
                let x1 = sampling::random_unit(&k, rng);
                let x2 = sampling::random_unit(&k, rng);
                let y1 = sampling::random_gw(&k, rng);
                let y2 = sampling::random_gw(&k, rng);
                let f2 = sampling::random_f2(&k, rng);
                let input = format!("x1 = {x1}, x2 = {x2}, y1 = {y1}, y2 = {y2}");
                let d = trace_decompose_random(&y1, rng);
                vec![
                    Check::new("decomposition independence", input.clone(), || eq(&exp_with(&x1, &d?)?, &exp(&x1, &y1)?)),
                    Check::new("(x1 x2)^y = x1^y x2^y", input.clone(), || {
                        eq(&exp(&(&x1 * &x2), &y1)?, &(&exp(&x1, &y1)? * &exp(&x2, &y1)?))
                    }),
                    Check::new("x^(y1+y2) = x^y1 x^y2", input.clone(), || {
                        eq(&exp(&x1, &(&y1 + &y2))?, &(&exp(&x1, &y1)? * &exp(&x1, &y2)?))
                    }),
                    Check::new("x^(y1 y2) = (x^y1)^y2", input.clone(), || {
                        eq(&exp(&x1, &(&y1 * &y2))?, &exp(&exp(&x1, &y1)?, &y2)?)
                    }),
                    Check::new("x^1 = x", input.clone(), || eq(&exp(&x1, &GwElem::one(&k))?, &x1)),
                    Check::new("F_2 is a submodule", format!("{f2}, {y1}"), || Ok(exp(&f2, &y1)?.in_fn(2))),
                ]
            });
            r
        })
        .collect();
    Report::combine("module-axioms", anchor, samples, seed, parts)
}

fn projection(samples: usize, seed: u64) -> Report {
    let anchor = "projection formulas N(x₁^{y₂|A}) = N(x₁)^{y₂} and N((x₂|A)^{y₁}) = x₂^{tr(y₁)}";
    let parts = [FieldTower::rationals(), FieldTower::prime_field(5)]
        .into_iter()
        .map(|k| {
            let tag = format!("projection/{k}");
            let mut r = Report::new(&tag, anchor, Some(&k), samples, seed);
            r.cases = run_cases(&tag, samples, seed, |_, rng| {
                let algs = degree_two_algebras(&k);
                let a = algs.choose(rng).unwrap().clone();
                let units: Vec<GwElem> = a.components().iter().map(|c| small_unit(c, &k, rng)).collect();
                let x1 = GwOverAlgebra::new(&a, units).unwrap();
                let y2 = sampling::random_short_gw(&k, rng);
                let x2 = small_unit(&k, &k, rng);
                let parts = a.components().iter().map(|c| sampling::random_short_gw(c, rng)).collect();
                let y1 = GwOverAlgebra::new(&a, parts).unwrap();
                vec![
                    Check::new(format!("{a}: N(x1^(y2|A)) = N(x1)^y2"), format!("x1 = {:?}, y2 = {y2}", x1.parts), || {
                        let lhs = rost_norm(&exp_over(&x1, &restrict(&y2, &a)?)?);
                        eq(&lhs, &exp(&rost_norm(&x1), &y2)?)
                    }),
                    Check::new(format!("{a}: N((x2|A)^y1) = x2^tr(y1)"), format!("x2 = {x2}, y1 = {:?}", y1.parts), || {
                        let lhs = rost_norm(&exp_over(&restrict(&x2, &a)?, &y1)?);
                        eq(&lhs, &exp(&x2, &transfer(&y1))?)
                    }),
                ]
            });
            r
        })
        .collect();
    Report::combine("projection", anchor, samples, seed, parts)
}

/// A unit over a component of A: ±⟨a⟩ for a in the component, times a short
/// F₂ element of k. Products over number fields have no canonical reduction and
/// grow quadratically, so these stay small.
fn small_unit(c: &FieldTower, k: &FieldTower, rng: &mut ChaCha8Rng) -> GwElem {
    let a = GwElem::class(&sampling::random_scalar(c, rng)).unwrap();
    let f = sampling::random_short_f2(k, rng).base_change(c).unwrap();
    let u = &a * &f;
    if rng.gen_bool(0.5) {
        -u
    } else {
        u
    }
}

fn f_n_unit(k: &FieldTower, n: u32, rng: &mut ChaCha8Rng) -> GwElem {
    match n {
        0 => sampling::random_unit(k, rng),
        1 => sampling::random_f1(k, rng),
        _ => sampling::random_f2(k, rng),
    }
}

fn technical(samples: usize, seed: u64) -> Report {
    let anchor = "exponentiation rules (α_n linearity, (−1)^{tr A} = tr A − 1, filtration), \
                  intro rules, norms in the group-ring model";
    let mut r = Report::new("technical", anchor, None, samples, seed);
    r.cases = run_cases("technical", samples, seed, |i, rng| {
        let q = FieldTower::rationals();
        let k = [q.clone(), FieldTower::prime_field(5), FieldTower::prime_field(13), FieldTower::prime_field(3)][i % 4].clone();
        let one = GwElem::one(&k);
        let m1 = GwElem::int(&k, -1);
        let mut out = Vec::new();
        // α_n is GW-linear: (1+x)^y ≡ 1 + xy mod I²ⁿ.
        for n in 1..=2u32 {
            let u = f_n_unit(&q, n, rng);
            let y = sampling::random_gw(&q, rng);
            out.push(Check::new(format!("(1+x)^y = 1+xy mod I^{}, n = {n}", 2 * n), format!("{u}, {y}"), || {
                let x = &u - &GwElem::one(&q);
                Ok((&(&exp(&u, &y)? - &GwElem::one(&q)) - &(&x * &y)).in_in(2 * n))
            }));
        }
        let a = degree_two_algebras(&k).choose(rng).unwrap().clone();
        let ta = a.trace_form();
        out.push(Check::new(format!("{k}: (-1)^tr(A) = tr(A) - 1"), a.to_string(), || eq(&exp(&m1, &ta)?, &(&ta - &one))));
        let y = sampling::random_in(&q, rng, 1);
        out.push(Check::new("(-1)^y = 1 + y mod I^2 on I", y.to_string(), || {
            Ok((&(&exp(&GwElem::int(&q, -1), &y)? - &GwElem::one(&q)) - &y).in_in(2))
        }));
        let n = rng.gen_range(0..=2u32);
        let m = rng.gen_range(0..=3 - n);
        let u = f_n_unit(&q, n, rng);
        let y = if m == 0 { sampling::random_gw(&q, rng) } else { sampling::random_in(&q, rng, m) };
        out.push(Check::new(format!("(F_{n})^(I^{m}) in F_{}", n + m), format!("{u}, {y}"), || Ok(exp(&u, &y)?.in_fn(n + m))));
        // Intro rules.
        let x = sampling::random_gw(&k, rng);
        let z = sampling::random_gw(&k, rng);
        out.push(Check::new(format!("{k}: (x+y)^tr(A) expansion"), format!("{a}: {x}, {z}"), || {
            let n = |v: &GwElem| -> Result<GwElem> { Ok(rost_norm(&restrict(v, &a)?)) };
            eq(&n(&(&x + &z))?, &(&(&n(&x)? + &n(&z)?) + &(&ta * &(&x * &z))))
        }));
        let c = GwElem::class(&sampling::random_scalar(&k, rng)).unwrap();
        out.push(Check::new(format!("{k}: <a>^x = <a>^dim x"), format!("{c}, {x}"), || {
            eq(&exp(&c, &x)?, &c.pow(x.dim().rem_euclid(2) as u32))
        }));
        // The quadratic extension L'/L with L = k.
        let d = nonsquares(&k, 3).choose(rng).unwrap().clone();
        let lp = k.extend(&d).unwrap();
        let tr = transfer_step(&GwElem::one(&lp)).unwrap();
        out.push(Check::new(format!("{lp}: N(<t>-1) = -tr(L')(<t>-1)"), String::new(), || {
            let t1 = GrElem::var(&lp, 1, 1)?.checked_sub(&GrElem::one(&lp, 1)?)?;
            let want = GrElem::var(&k, 1, 1)?.checked_sub(&GrElem::one(&k, 1)?)?.scale(&-&tr)?;
            gr_norm(&t1)?.equals(&want)
        }));
        out.push(Check::new(format!("{lp}: tr(L')^2 = 2 tr(L')"), String::new(), || eq(&(&tr * &tr), &tr.scale(2))));
        out.push(Check::new(format!("{lp}: xi (6 - xi) = 8"), String::new(), || {
            let xi = norm_step(&GwElem::int(&lp, 2))?;
            eq(&(&xi * &(&GwElem::int(&k, 6) - &xi)), &GwElem::int(&k, 8))
        }));
        let m = rng.gen_range(1..=4usize);
        out.push(Check::new(format!("{lp}: N(P_{m}) = (-1)^m 2^(m-1) tr(L') P_m"), String::new(), || {
            let c = tr.scale((if m % 2 == 0 { 1 } else { -1 }) << (m - 1));
            eq_gr(&gr_norm(&GrElem::p_m(&lp, m, m)?)?, &GrElem::p_m(&k, m, m)?.scale(&c)?)
        }));
        out
    });
    r
}

fn eq_gr(a: &GrElem, b: &GrElem) -> Result<TriBool> {
    a.equals(b)
}

fn log_suite(k: &FieldTower, samples: usize, seed: u64) -> Result<Report> {
    let anchor = "logarithm F₂GW^× → I²_tor: stability, homomorphism, GW-linearity, norms to transfers, log(−1)^y = (⟨2⟩−1)y";
    if k.height() != 0 {
        return Err(Error::Undecided("the log suite runs over ℚ or 𝔽_p".into()));
    }
    let k = k.clone();
    let mut r = Report::new("log", anchor, Some(&k), samples, seed);
    r.cases = run_cases("log", samples, seed, |i, rng| {
        let one = GwElem::one(&k);
        let m1 = GwElem::int(&k, -1);
        let eta = &GwElem::class_int(&k, 2) - &one;
        let mut out = Vec::new();
        let x = sampling::random_f2(&k, rng);
        let y = sampling::random_f2(&k, rng);
        out.push(Check::new("log_(3r+1) = log_(3r+2)", x.to_string(), || {
            let m = stable_vars((&x - &one).torsion_exponent()?);
            eq(&log_m(&x, m)?, &log_m(&x, m + 1)?)
        }));
        out.push(Check::new("log(xy) = log x + log y", format!("{x}, {y}"), || eq(&log(&(&x * &y))?, &(&log(&x)? + &log(&y)?))));
        let z = sampling::random_gw(&k, rng);
        out.push(Check::new("log(x^z) = z log x", format!("{x}, {z}"), || eq(&log(&exp(&x, &z)?)?, &(&z * &log(&x)?))));
        let l = if k.is_finite() {
            k.extend(&k.nonsquare()).unwrap()
        } else {
            let ds = nonsquares(&k, 3);
            k.extend(&ds[i % ds.len()]).unwrap()
        };
        // Entries stay rational so that equality over L is decided exactly.
        let w = sampling::random_f2(&k, rng).base_change(&l).unwrap();
        out.push(Check::new(format!("{l}: log N(w) = tr log w"), w.to_string(), || {
            eq(&log(&norm_to(&w, &k)?)?, &transfer_to(&log(&w)?, &k)?)
        }));
        let v = sampling::random_in(&k, rng, 2);
        out.push(Check::new("log (-1)^y = (<2>-1) y", v.to_string(), || eq(&log(&exp(&m1, &v)?)?, &(&eta * &v))));
        if i < 3 {
            // (−1)^{(⟨a⟩−1)(⟨b⟩−1)P_m} = 1 + (⟨2⟩−1)(⟨a⟩−1)(⟨b⟩−1)P_m.
            let m = i;
            let ab = sampling::random_pfister(&k, rng, 2);
            out.push(Check::new(format!("closed form of (-1)^(ab P_{m})"), ab.to_string(), || {
                let pm = GrElem::p_m(&k, m, m)?;
                let lhs = gr_exp(&m1, &pm.scale(&ab)?)?;
                let rhs = GrElem::one(&k, m)?.checked_add(&pm.scale(&(&eta * &ab))?)?;
                eq_gr(&lhs, &rhs)
            }));
        }
        out
    });
    Ok(r)
}

fn presentation(fields: &[FieldTower], samples: usize, seed: u64) -> Report {
    let mut parts = Vec::new();
    for k in fields {
        parts.push(check_presentation(k, samples, seed));
        parts.push(check_t0_sequence(k, samples, seed));
    }
    Report::combine("presentation", "presentation of GW^× and the sequence I²/2I → GW/2 ⊕ I²_tor → GW^×", samples, seed, parts)
}

fn tambara(samples: usize, seed: u64) -> Report {
    let anchor = "distributivity N(x + y) = N(x) + N(y) + tr(x·ȳ) for degree-2 algebras";
    let q = FieldTower::rationals();
    let f5 = FieldTower::prime_field(5);
    let (_, f25, f625) = finite_tower(5);
    let shapes = vec![
        EtaleAlgebra::split(&q, 2),
        EtaleAlgebra::quadratic(&q.int(-3)).unwrap(),
        EtaleAlgebra::split(&f5, 2),
        EtaleAlgebra::quadratic(&f5.int(2)).unwrap(),
        EtaleAlgebra::split(&f25, 2),
        EtaleAlgebra::new(&f25, vec![f625]).unwrap(),
    ];
    let parts = shapes
        .into_iter()
        .map(|a| {
            let tag = format!("tambara/{}/{a}", a.base());
            let mut r = Report::new(&tag, anchor, Some(a.base()), samples, seed);
            r.cases = run_cases(&tag, samples, seed, |_, rng| {
                let x = random_over(&a, rng, false);
                let y = random_over(&a, rng, false);
                vec![Check::new("distributivity", format!("{:?}, {:?}", x.parts, y.parts), || check_distributivity(&x, &y))]
            });
            r
        })
        .collect();
    Report::combine("tambara", anchor, samples, seed, parts)
}

fn cross_norm(samples: usize, seed: u64) -> Report {
    let anchor = "N_{E/k}(x|_E) = x² − 2λ²(x) + λ²(x)·tr(E) against the Wittkop fold";
    let parts = [FieldTower::rationals(), FieldTower::prime_field(5)]
        .into_iter()
        .map(|k| {
            let tag = format!("cross-norm/{k}");
            let mut r = Report::new(&tag, anchor, Some(&k), samples, seed);
            r.cases = run_cases(&tag, samples, seed, |_, rng| {
                let a = degree_two_algebras(&k).choose(rng).unwrap().clone();
                let x = sampling::random_gw(&k, rng);
                vec![Check::new(format!("{a}"), x.to_string(), || {
                    eq(&rost_norm(&restrict(&x, &a)?), &norm_restricted(&x, &a.trace_form())?)
                })]
            });
            r
        })
        .collect();
    Report::combine("cross-norm", anchor, samples, seed, parts)
}

fn random_int_entries(rng: &mut impl Rng, n: usize) -> Vec<i64> {
    (0..n)
        .map(|_| loop {
            let v = rng.gen_range(-30i64..=30);
            if v != 0 {
                break v;
            }
        })
        .collect()
}

fn equality_oracle(samples: usize, seed: u64) -> Report {
    let anchor = "isometry decisions against point counting over 𝔽_p and change of basis over ℚ";
    let mut r = Report::new("equality-oracle", anchor, None, samples, seed);
    r.cases = run_cases("equality-oracle", samples, seed, |i, rng| {
        let mut out = Vec::new();
        // Over 𝔽_p: verdicts against counting representations.
        let p = [3u64, 5, 7][i % 3];
        let fp = FieldTower::prime_field(p);
        let dim = rng.gen_range(1..=3);
        let f: Vec<FieldElem> = (0..dim).map(|_| sampling::random_scalar(&fp, rng)).collect();
        let g: Vec<FieldElem> = (0..dim).map(|_| sampling::random_scalar(&fp, rng)).collect();
        out.push(Check::new(format!("F{p}: verdict matches counting"), format!("{f:?} vs {g:?}"), || {
            let v = DiagForm::new(&fp, f.clone())?.isometric(&DiagForm::new(&fp, g.clone())?)?;
            Ok(TriBool::from_bool(v.known() == Some(counting_isometric(&f, &g)?)))
        }));
        // Over ℚ: congruent Gram matrices are equal.
        let q = FieldTower::rationals();
        let n = rng.gen_range(2..=4);
        let d = random_int_entries(rng, n);
        let pm = loop {
            let m: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3i64..=3)).collect()).collect();
            if det(&m) != 0 {
                break m;
            }
        };
        out.push(Check::new("Q: change of basis preserves the class", format!("{d:?}, P = {pm:?}"), || {
            let g: Vec<Vec<FieldElem>> = (0..n)
                .map(|a| (0..n).map(|b| q.int((0..n).map(|c| pm[c][a] * d[c] * pm[c][b]).sum())).collect())
                .collect();
            let h = diagonalize(&g)?;
            eq(&GwElem::form_ints(&q, &d), &GwElem::from_form(&h))
        }));
        // Over ℚ: forms with different invariants are different.
        let (a, b) = loop {
            let a = DiagForm::from_ints(&q, &random_int_entries(rng, n)).unwrap();
            let b = DiagForm::from_ints(&q, &random_int_entries(rng, n)).unwrap();
            if a.invariants() != b.invariants() {
                break (a, b);
            }
        };
        out.push(Check::new("Q: distinct invariants are not equal", format!("{a} vs {b}"), || Ok(!a.isometric(&b)?)));
        out
    });
    r
}

fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn hilbert_suite(samples: usize, seed: u64) -> Report {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let mut r = Report::new("hilbert", "Hilbert reciprocity ∏_v (a,b)_v = 1", None, samples, seed);
    r.cases = run_cases("hilbert", samples, seed, |_, rng| {
        let mut pick = || loop {
            let v = rng.gen_range(-500i64..=500);
            if v != 0 {
                break BigInt::from(v);
            }
        };
        let (a, b) = (pick(), pick());
        vec![Check::new("product formula", format!("({a}, {b})"), || {
            let (ra, rb) = (BigRational::from_integer(a.clone()), BigRational::from_integer(b.clone()));
            let mut prod = 1;
            for v in relevant_places([&a, &b]) {
                prod *= hilbert(&ra, &rb, &v)?;
            }
            Ok(TriBool::from_bool(prod == 1))
        })]
    });
    r
}

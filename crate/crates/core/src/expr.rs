//! Text grammar for fields, field elements, algebras and GW expressions.
//!
//! ```text
//! field   := ("Q" | "F" p) ("[" "sqrt" elem "]")*
//! algebra := field ("x" field)*
//! elem    := sums/products/quotients/powers of rationals, `sqrt`, `sqrt1`..`sqrtN`
//! gw      := "<" elem ("," elem)* ">" | "H" | integer | "<t1>" | "P(m)"
//!          | "tr(" algebra ")" | "exp(" gw ";" gw ")" | gw ("+"|"-"|"*") gw | "(" gw ")"
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::etale::EtaleAlgebra;
use crate::fields::{BaseField, FieldElem, FieldTower};
use crate::gw::GwElem;
use crate::laurent::{gr_exp, GrElem};

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigInt),
    Sym(String),
    /// `<a, b, ...>`
    Form(Vec<Ast>),
    /// `<t1 t3>`: the class of a monomial in the Laurent variables.
    Mono(u32),
    /// `tr(...)` with the raw algebra text.
    Trace(String),
    Call(String, Vec<Ast>),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
}

pub(crate) struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            if c.is_ascii_alphabetic() || c == '_' || (i > 0 && c.is_ascii_digit()) {
                end = i + c.len_utf8();
            } else {
                break;
            }
        }
        if end == 0 {
            return None;
        }
        self.pos += end;
        Some(rest[..end].to_string())
    }

    fn number(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if end == 0 {
            return None;
        }
        self.pos += end;
        rest[..end].parse().ok()
    }

    fn peek_ident(&mut self) -> Option<String> {
        let save = self.pos;
        let r = self.ident();
        self.pos = save;
        r
    }

    /// Raw text up to the parenthesis closing an already consumed `(`.
    fn raw_until_close(&mut self) -> Result<String> {
        let start = self.pos;
        let mut depth = 1;
        for (i, c) in self.src[start..].char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos = start + i + 1;
                        return Ok(self.src[start..start + i].trim().to_string());
                    }
                }
                _ => {}
            }
        }
        self.err("unbalanced parenthesis")
    }

    pub(crate) fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.peek() == Some('-') {
                self.pos += 1;
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let Some(n) = self.number() else {
                return self.err("expected integer exponent");
            };
            let Some(n) = n.to_i64() else {
                return self.err("exponent too large");
            };
            return Ok(Ast::Pow(Box::new(base), if neg { -n } else { n }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('<') => {
                self.pos += 1;
                if let Some(id) = self.peek_ident() {
                    if id.starts_with('t') && id[1..].parse::<u32>().is_ok() {
                        let mut mask = 0u32;
                        while let Some(id) = self.peek_ident() {
                            let Some(i) = id.strip_prefix('t').and_then(|s| s.parse::<u32>().ok()) else {
                                break;
                            };
                            if i == 0 || i > 31 {
                                return self.err("variable index out of range");
                            }
                            self.ident();
                            mask ^= 1 << (i - 1);
                            self.eat('*');
                        }
                        self.expect('>')?;
                        return Ok(Ast::Mono(mask));
                    }
                }
                let mut entries = Vec::new();
                if !self.eat('>') {
                    loop {
                        entries.push(self.expr()?);
                        if self.eat('>') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                Ok(Ast::Form(entries))
            }
            Some(c) if c.is_ascii_digit() => Ok(Ast::Num(self.number().unwrap())),
            Some(c) if c.is_ascii_alphabetic() => {
                let id = self.ident().unwrap();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    if id == "tr" {
                        return Ok(Ast::Trace(self.raw_until_close()?));
                    }
                    let mut args = Vec::new();
                    if !self.eat(')') {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(')') {
                                break;
                            }
                            if !self.eat(';') {
                                self.expect(',')?;
                            }
                        }
                    }
                    return Ok(Ast::Call(id, args));
                }
                Ok(Ast::Sym(id))
            }
            Some(c) => self.err(format!("unexpected `{c}`")),
        }
    }

    fn field(&mut self) -> Result<FieldTower> {
        let Some(id) = self.ident() else {
            return self.err("expected field name");
        };
        let mut t = if id == "Q" {
            FieldTower::rationals()
        } else if let Some(p) = id.strip_prefix('F').and_then(|s| s.parse::<u64>().ok()) {
            FieldTower::new(BaseField::prime(p)?)
        } else {
            return Err(Error::UnknownField(id));
        };
        while self.eat('[') {
            if self.ident().as_deref() != Some("sqrt") {
                return self.err("expected `sqrt`");
            }
            let e = self.expr()?;
            self.expect(']')?;
            let d = eval_elem(&t, &e)?;
            t = t.extend(&d)?;
        }
        Ok(t)
    }
}

pub fn parse_expr(s: &str) -> Result<Ast> {
    let mut p = Parser::new(s);
    let e = p.expr()?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    Ok(e)
}

pub fn parse_field(s: &str) -> Result<FieldTower> {
    let mut p = Parser::new(s);
    let t = p.field()?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    Ok(t)
}

/// Components of an algebra written `K1 x K2 x ...`.
pub fn parse_algebra_components(s: &str) -> Result<Vec<FieldTower>> {
    let mut p = Parser::new(s);
    let mut out = vec![p.field()?];
    while !p.at_end() {
        if p.ident().as_deref() != Some("x") {
            return p.err("expected `x` between algebra factors");
        }
        out.push(p.field()?);
    }
    Ok(out)
}

pub fn parse_elem(t: &FieldTower, s: &str) -> Result<FieldElem> {
    eval_elem(t, &parse_expr(s)?)
}

fn sym_elem(t: &FieldTower, s: &str) -> Result<FieldElem> {
    if s == "sqrt" {
        return t.sqrt_gen(t.height()).map_err(|_| Error::Syntax {
            pos: 0,
            msg: "`sqrt` used over a field without square roots".into(),
        });
    }
    if let Some(i) = s.strip_prefix("sqrt").and_then(|r| r.parse::<usize>().ok()) {
        return t.sqrt_gen(i);
    }
    Err(Error::Syntax { pos: 0, msg: format!("unknown symbol `{s}`") })
}

pub fn eval_elem(t: &FieldTower, e: &Ast) -> Result<FieldElem> {
    Ok(match e {
        Ast::Num(n) => t.rational(&BigRational::from_integer(n.clone()))?,
        Ast::Sym(s) => sym_elem(t, s)?,
        Ast::Neg(a) => -eval_elem(t, a)?,
        Ast::Add(a, b) => eval_elem(t, a)?.checked_add(&eval_elem(t, b)?)?,
        Ast::Sub(a, b) => eval_elem(t, a)?.checked_sub(&eval_elem(t, b)?)?,
        Ast::Mul(a, b) => eval_elem(t, a)?.checked_mul(&eval_elem(t, b)?)?,
        Ast::Div(a, b) => eval_elem(t, a)?.checked_div(&eval_elem(t, b)?)?,
        Ast::Pow(a, n) => eval_elem(t, a)?.pow(*n)?,
        _ => return Err(Error::Syntax { pos: 0, msg: "not a field element".into() }),
    })
}

/// True when the integer literal is zero; used by evaluators to special-case `0`.
pub fn is_zero_literal(e: &Ast) -> bool {
    matches!(e, Ast::Num(n) if n.is_zero())
}

/// Parses and evaluates a GW expression over `t`.
pub fn parse_gw(t: &FieldTower, s: &str) -> Result<GwElem> {
    eval_gw(t, &parse_expr(s)?)
}

fn gw_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Syntax { pos: 0, msg: msg.into() })
}

pub fn eval_gw(t: &FieldTower, e: &Ast) -> Result<GwElem> {
    Ok(match e {
        Ast::Num(n) => match n.to_i64() {
            Some(n) => GwElem::int(t, n),
            None => return gw_err("integer too large"),
        },
        Ast::Sym(s) if s == "H" => GwElem::hyperbolic(t),
        Ast::Form(entries) => {
            let mut out = GwElem::zero(t);
            for a in entries {
                out = &out + &GwElem::class(&eval_elem(t, a)?)?;
            }
            out
        }
        Ast::Trace(raw) => EtaleAlgebra::parse(t, raw)?.trace_form(),
        Ast::Call(f, args) if f == "exp" && args.len() == 2 => {
            crate::expmod::exp(&eval_gw(t, &args[0])?, &eval_gw(t, &args[1])?)?
        }
        Ast::Neg(a) => -&eval_gw(t, a)?,
        Ast::Add(a, b) => eval_gw(t, a)?.checked_add(&eval_gw(t, b)?)?,
        Ast::Sub(a, b) => eval_gw(t, a)?.checked_sub(&eval_gw(t, b)?)?,
        Ast::Mul(a, b) => eval_gw(t, a)?.checked_mul(&eval_gw(t, b)?)?,
        Ast::Pow(a, n) if *n >= 0 => eval_gw(t, a)?.pow(*n as u32),
        Ast::Pow(a, n) => eval_gw(t, a)?.unit_inverse()?.pow(n.unsigned_abs() as u32),
        Ast::Mono(_) => return gw_err("Laurent classes need `--vars`"),
        Ast::Sym(s) => return gw_err(format!("unknown symbol `{s}`")),
        Ast::Call(f, _) => return gw_err(format!("unknown function `{f}`")),
        Ast::Div(..) => return gw_err("division is not defined on GW"),
    })
}

/// Parses and evaluates an expression in the group-ring model with `vars` variables.
pub fn parse_gr(t: &FieldTower, vars: usize, s: &str) -> Result<GrElem> {
    eval_gr(t, vars, &parse_expr(s)?)
}

pub fn eval_gr(t: &FieldTower, vars: usize, e: &Ast) -> Result<GrElem> {
    Ok(match e {
        Ast::Mono(mask) => {
            if vars < 32 && *mask >> vars != 0 {
                return Err(Error::IndexOutOfRange(32 - mask.leading_zeros() as usize));
            }
            GrElem::monomial(&GwElem::one(t), *mask, vars)?
        }
        Ast::Call(f, args) if f == "P" && args.len() == 1 => match &args[0] {
            Ast::Num(m) => GrElem::p_m(t, m.to_usize().ok_or(Error::IndexOutOfRange(usize::MAX))?, vars)?,
            _ => return gw_err("P takes an integer"),
        },
        Ast::Call(f, args) if f == "exp" && args.len() == 2 => gr_exp(&eval_gw(t, &args[0])?, &eval_gr(t, vars, &args[1])?)?,
        Ast::Neg(a) => eval_gr(t, vars, a)?.neg(),
        Ast::Add(a, b) => eval_gr(t, vars, a)?.checked_add(&eval_gr(t, vars, b)?)?,
        Ast::Sub(a, b) => eval_gr(t, vars, a)?.checked_sub(&eval_gr(t, vars, b)?)?,
        Ast::Mul(a, b) => eval_gr(t, vars, a)?.checked_mul(&eval_gr(t, vars, b)?)?,
        Ast::Pow(a, n) if *n >= 0 => eval_gr(t, vars, a)?.pow(*n as u32),
        other => GrElem::constant(&eval_gw(t, other)?, vars)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_parse_and_print() {
        for s in ["Q", "F7", "Q[sqrt 5]", "Q[sqrt 2][sqrt -3]", "F7[sqrt 3]", "Q[sqrt 2][sqrt 1 + sqrt1]"] {
            let t = parse_field(s).unwrap();
            assert_eq!(parse_field(&t.to_string()).unwrap(), t);
        }
        assert_eq!(parse_field("Q[sqrt 2][sqrt -3]").unwrap().height(), 2);
        assert!(matches!(parse_field("F9"), Err(Error::NotOddPrime(9))));
        assert!(matches!(parse_field("R"), Err(Error::UnknownField(_))));
        assert!(matches!(parse_field("Q[sqrt 4]"), Err(Error::SquareAdjoined(_))));
    }

    #[test]
    fn elements_round_trip() {
        let t = parse_field("Q[sqrt 2][sqrt 3]").unwrap();
        for s in ["1/2", "1 + 2*sqrt", "sqrt1*sqrt2 - 3/4", "(1+sqrt1)^3", "(1+sqrt2)^-1"] {
            let x = parse_elem(&t, s).unwrap();
            assert_eq!(parse_elem(&t, &x.to_string()).unwrap(), x, "{s} -> {x}");
        }
        let q5 = parse_field("Q[sqrt 5]").unwrap();
        assert_eq!(parse_elem(&q5, "(1+sqrt)*(1-sqrt)").unwrap(), q5.int(-4));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_expr("<1, 2") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("1 +").is_err());
    }

    #[test]
    fn algebra_components() {
        let c = parse_algebra_components("Q[sqrt 2] x Q x Q[sqrt 5]").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[1].height(), 0);
    }

    #[test]
    fn gw_expressions() {
        let q = FieldTower::rationals();
        let x = parse_gw(&q, "<2, 3> - 1 + H").unwrap();
        assert_eq!(x.dim(), 3);
        let e = parse_gw(&q, "exp(-1; tr(Q[sqrt 5]))").unwrap();
        let t = parse_gw(&q, "<2> + <10> - 1").unwrap();
        assert!(e.equals(&t).unwrap().is_true());
        // ⟨−1⟩ is a class of rank one, so its power is ⟨−1⟩^dim = 1.
        assert_eq!(parse_gw(&q, "exp(<-1>; tr(Q[sqrt 5]))").unwrap(), GwElem::one(&q));
        assert!(matches!(parse_expr("exp(<-1>; tr(Q[sqrt 5]))").unwrap(), Ast::Call(ref f, ref a) if f == "exp" && a.len() == 2));
        assert!(parse_gw(&q, "<t1>").is_err());
        assert!(parse_gw(&q, "<0>").is_err());
    }

    #[test]
    fn group_ring_expressions() {
        let q = FieldTower::rationals();
        let x = parse_gr(&q, 2, "P(2) * <t1>").unwrap();
        let want = parse_gr(&q, 2, "(<t1> - 1)*(<t2> - 1)*<t1>").unwrap();
        assert!(x.equals(&want).unwrap().is_true());
        assert!(parse_gr(&q, 1, "<t2>").is_err());
        let e = parse_gr(&q, 1, "exp(-1; (<3> - 1)*(<t1> - 1))").unwrap();
        let f = parse_gr(&q, 1, "1 + (<2> - 1)*(<3> - 1)*(<t1> - 1)").unwrap();
        assert!(e.equals(&f).unwrap().is_true());
    }
}

//! Integer helpers: primality, factorization, squarefree parts.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const TRIAL_BOUND: u64 = 1000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_prime_big(n: &BigUint) -> bool {
    if let Some(s) = n.to_u64() {
        return is_prime_u64(s);
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn rho_big(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn split_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_prime_big(&n) {
        out.push(n);
        return;
    }
    let d = match n.to_u64() {
        Some(s) => BigUint::from(rho_u64(s)),
        None => rho_big(&n),
    };
    let q = &n / &d;
    split_into(d, out);
    split_into(q, out);
}

fn factor_uncached(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut n = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_BOUND {
        let bp = BigUint::from(p);
        if (&bp * &bp) > n {
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut rest = Vec::new();
    split_into(n, &mut rest);
    rest.sort();
    for q in rest {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out.sort();
    out
}

fn cache() -> &'static Mutex<HashMap<BigUint, Vec<(BigUint, u32)>>> {
    static CACHE: OnceLock<Mutex<HashMap<BigUint, Vec<(BigUint, u32)>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Prime factorization of a positive integer, sorted by prime.
pub fn factor(n: &BigUint) -> Vec<(BigUint, u32)> {
    if n.is_zero() || n.is_one() {
        return Vec::new();
    }
    if let Some(f) = cache().lock().unwrap().get(n) {
        return f.clone();
    }
    let f = factor_uncached(n);
    let mut c = cache().lock().unwrap();
    if c.len() > 1 << 16 {
        c.clear();
    }
    c.insert(n.clone(), f.clone());
    f
}

/// Distinct primes dividing `n` (sign ignored).
pub fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    factor(n.magnitude())
        .into_iter()
        .map(|(p, _)| BigInt::from(p))
        .collect()
}

/// Splits `n ≠ 0` as `sign · s · f²` with `s` squarefree; returns `(sign·s, f)`.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigUint) {
    let mut s = BigUint::one();
    let mut f = BigUint::one();
    for (p, e) in factor(n.magnitude()) {
        if e % 2 == 1 {
            s *= &p;
        }
        f *= p.pow(e / 2);
    }
    let sign = if n.sign() == Sign::Minus { Sign::Minus } else { Sign::Plus };
    (BigInt::from_biguint(sign, s), f)
}

pub fn squarefree_part(n: &BigInt) -> BigInt {
    squarefree_decompose(n).0
}

/// Exact square root of a non-negative integer, if it exists.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    // Most non-squares are already non-residues modulo one of these.
    for m in [64u32, 63, 65, 11] {
        let r = (n.magnitude() % m).to_u32_digits().first().copied().unwrap_or(0);
        if !(0..m).any(|x| x * x % m == r) {
            return None;
        }
    }
    let r = n.magnitude().sqrt();
    if &r * &r == *n.magnitude() {
        Some(BigInt::from(r))
    } else {
        None
    }
}

/// Square root modulo an odd prime (Tonelli–Shanks). `a` must be a residue.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..5000 {
            assert_eq!(is_prime_u64(n), naive_prime(n), "{n}");
        }
        assert!(is_prime_u64(18446744073709551557));
        assert!(!is_prime_u64(3215031751));
    }

    #[test]
    fn factor_roundtrip() {
        for n in [1u64, 2, 12, 360, 9999991 * 7, 600851475143, 18446744073709551615] {
            let f = factor(&BigUint::from(n));
            let prod = f.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
            assert_eq!(prod, BigUint::from(n));
            assert!(f.iter().all(|(p, _)| is_prime_big(p)));
        }
        let big = BigUint::from(18446744073709551557u64) * BigUint::from(1000000007u64);
        assert_eq!(factor(&big).len(), 2);
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(&BigInt::from(-72)), BigInt::from(-2));
        assert_eq!(squarefree_part(&BigInt::from(1)), BigInt::from(1));
        assert_eq!(squarefree_decompose(&BigInt::from(50)).1, BigUint::from(5u32));
    }

    #[test]
    fn tonelli_shanks() {
        for p in [3u64, 5, 7, 13, 17, 41, 97, 257] {
            for a in 1..p {
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert!((1..p).all(|x| x * x % p != a)),
                }
            }
        }
    }
}

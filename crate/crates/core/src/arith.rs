//! Integer and rational helpers shared by every module.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    BigInt::from(n)
}

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn vp_int(n: &Int, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut k = 0;
    // Fast path on small word sizes is handled by num-bigint's division.
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(k);
        }
        m = q;
        k += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn vp_rat(r: &Rat, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let a = vp_int(r.numer(), p)? as i64;
    let b = vp_int(r.denom(), p)? as i64;
    Some(a - b)
}

/// Removes all factors of `p`, returning `(k, n / p^k)`.
pub fn split_p(n: &Int, p: u64) -> (u32, Int) {
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut k = 0;
    if m.is_zero() {
        return (0, m);
    }
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (k, m);
        }
        m = q;
        k += 1;
    }
}

pub fn is_square_int(n: &Int) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

/// Exact square test in Q.
pub fn is_square_rat(r: &Rat) -> bool {
    is_square_int(r.numer()) && is_square_int(r.denom())
}

pub fn sqrt_int_exact(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    // Deterministic Miller-Rabin for 64-bit inputs.
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
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

/// Primes strictly below `bound`.
pub fn primes_below(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
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

/// Inverse modulo a prime `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Reduces an integer into `[0, p)`.
pub fn mod_u64(n: &Int, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

pub fn rat_mod_p(r: &Rat, p: u64) -> Option<u64> {
    let d = mod_u64(r.denom(), p);
    if d == 0 {
        return None;
    }
    Some(mul_mod(mod_u64(r.numer(), p), inv_mod(d, p), p))
}

/// Legendre symbol for odd prime `p`; 0 when `p | a`.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Least positive quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| legendre(a, p) == -1).expect("odd prime")
}

/// Square test for a p-adic unit `u` modulo `p^j` (j >= 0).
pub fn is_unit_square_mod_pk(u: &Int, p: u64, j: u32) -> bool {
    if j == 0 {
        return true;
    }
    if p == 2 {
        let r = mod_u64(u, 8);
        match j {
            1 => true,
            2 => r % 4 == 1,
            _ => r == 1,
        }
    } else {
        legendre(mod_u64(u, p), p) == 1
    }
}

/// Square test in Q_p for an integer; zero counts as a square.
pub fn is_qp_square_int(n: &Int, p: u64) -> bool {
    if n.is_zero() {
        return true;
    }
    let (k, u) = split_p(n, p);
    k % 2 == 0 && is_unit_square_mod_pk(&u, p, 3)
}

pub fn is_qp_square_rat(r: &Rat, p: u64) -> bool {
    if r.is_zero() {
        return true;
    }
    // r = n/d has the same class as n*d.
    is_qp_square_int(&(r.numer() * r.denom()), p)
}

/// Trial division by primes below `bound`; returns the factors found and the cofactor.
pub fn trial_factor(n: &Int, bound: u64) -> (Vec<(u64, u32)>, Int) {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return (out, m);
    }
    for p in primes_below(bound) {
        if m.is_one() {
            break;
        }
        let (k, rest) = split_p(&m, p);
        if k > 0 {
            out.push((p, k));
            m = rest;
        }
    }
    (out, m)
}

/// Complete factorization of a nonzero integer whose prime factors are small
/// enough for trial division plus a primality check on the cofactor.
pub fn factor_int(n: &Int) -> Option<Vec<(Int, u32)>> {
    let (small, rest) = trial_factor(n, 1 << 16);
    let mut out: Vec<(Int, u32)> = small.into_iter().map(|(p, k)| (BigInt::from(p), k)).collect();
    if rest.is_one() {
        return Some(out);
    }
    let r64 = rest.to_u64()?;
    if is_prime_u64(r64) {
        out.push((rest, 1));
        return Some(out);
    }
    None
}

/// Squarefree part of a nonzero rational, as a signed squarefree integer
/// together with the primes in its support.
pub fn squarefree_class(r: &Rat) -> Option<Int> {
    let n = r.numer() * r.denom();
    let fac = factor_int(&n)?;
    let mut s = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for (p, k) in fac {
        if k % 2 == 1 {
            s *= p;
        }
    }
    Some(s)
}

pub fn gcd_int(a: &Int, b: &Int) -> Int {
    a.gcd(b)
}

pub fn lcm_int(a: &Int, b: &Int) -> Int {
    a.lcm(b)
}

pub fn sign_of(n: &Int) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn pow_int(p: u64, k: u32) -> Int {
    num_traits::pow(BigInt::from(p), k as usize)
}

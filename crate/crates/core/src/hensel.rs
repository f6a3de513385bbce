//! Multifactor Hensel lifting over Z/p^k.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{inv_mod, mod_u64, pow_int, Int};
use crate::fp::FpPoly;
use crate::poly::ZPoly;

fn reduce(f: &ZPoly, m: &Int) -> ZPoly {
    f.reduce_mod(m)
}

/// Lifts `f = g * h (mod p)` with `g` monic to `f = G * H (mod p^k)`, `G` monic.
pub fn lift_pair(f: &ZPoly, g: &FpPoly, h: &FpPoly, p: u64, k: u32) -> (ZPoly, ZPoly) {
    let (one, s, t) = g.xgcd(h, p);
    debug_assert_eq!(one, FpPoly::one(), "factors must be coprime mod p");
    let _ = s;
    let mut big_g = g.to_zpoly();
    let mut big_h = h.to_zpoly();
    let pb = BigInt::from(p);
    let mut pj = pb.clone();
    for _ in 1..k {
        let diff = f.sub(&big_g.mul(&big_h));
        let e_z = ZPoly::new(diff.coeffs().iter().map(|c| c.div_floor(&pj)).collect());
        debug_assert!(diff.coeffs().iter().all(|c| c.mod_floor(&pj).is_zero()));
        let e = FpPoly::from_zpoly(&e_z, p);
        let dg = t.mul(&e, p).rem(g, p);
        let (dh, r) = e.sub(&h.mul(&dg, p), p).divrem(g, p);
        debug_assert!(r.is_zero());
        big_g = big_g.add(&dg.to_zpoly().scale(&pj));
        big_h = big_h.add(&dh.to_zpoly().scale(&pj));
        pj = &pj * &pb;
        big_g = reduce(&big_g, &pj);
        big_h = reduce(&big_h, &pj);
    }
    (big_g, big_h)
}

/// Lifts a factorization `f = lc(f) * prod g_i (mod p)` with monic pairwise coprime
/// `g_i` to monic factors modulo `p^k`.
pub fn multifactor_lift(f: &ZPoly, factors: &[FpPoly], p: u64, k: u32) -> Vec<ZPoly> {
    let m = pow_int(p, k);
    if factors.len() == 1 {
        let a = f.lc();
        let inv = inv_mod_pk(&a, p, k);
        return vec![reduce(&f.scale(&inv), &m)];
    }
    let mid = factors.len() / 2;
    let mut g = FpPoly::one();
    for q in &factors[..mid] {
        g = g.mul(q, p);
    }
    let mut h = FpPoly::new(vec![mod_u64(&f.lc(), p)]);
    for q in &factors[mid..] {
        h = h.mul(q, p);
    }
    let (big_g, big_h) = lift_pair(f, &g, &h, p, k);
    let mut out = multifactor_lift(&big_g, &factors[..mid], p, k);
    out.extend(multifactor_lift(&big_h, &factors[mid..], p, k));
    out
}

/// Inverse of a p-adic unit modulo `p^k` by Newton iteration.
pub fn inv_mod_pk(a: &Int, p: u64, k: u32) -> Int {
    let m = pow_int(p, k);
    let a0 = mod_u64(a, p);
    let mut x = BigInt::from(inv_mod(a0, p));
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let mm = pow_int(p, prec);
        let two = BigInt::from(2);
        x = (&x * (two - a * &x)).mod_floor(&mm);
    }
    let r = x.mod_floor(&m);
    debug_assert!((a * &r).mod_floor(&m).is_one() || m.is_one());
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::factor_squarefree;

    #[test]
    fn lift_cyclotomic_split() {
        // x^4 + 1 splits mod 17 into linear factors.
        let f = ZPoly::from_i64(&[1, 0, 0, 0, 1]);
        let p = 17;
        let fs = factor_squarefree(&FpPoly::from_zpoly(&f, p), p);
        assert_eq!(fs.len(), 4);
        let k = 6;
        let lifted = multifactor_lift(&f, &fs, p, k);
        let m = pow_int(p, k);
        let mut prod = ZPoly::one();
        for g in &lifted {
            prod = prod.mul(g).reduce_mod(&m);
        }
        assert_eq!(prod, f.reduce_mod(&m));
    }

    #[test]
    fn lift_nonmonic() {
        // 6x^3 + x^2 - 4x + 1 = (2x - 1)(3x^2 + 2x - 1), mod 5.
        let f = ZPoly::from_i64(&[1, -4, 1, 6]);
        let p = 5;
        let fs = factor_squarefree(&FpPoly::from_zpoly(&f, p), p);
        let k = 8;
        let lifted = multifactor_lift(&f, &fs, p, k);
        let m = pow_int(p, k);
        let mut prod = ZPoly::constant(f.lc());
        for g in &lifted {
            prod = prod.mul(g).reduce_mod(&m);
        }
        assert_eq!(prod, f.reduce_mod(&m));
    }

    #[test]
    fn inverse_mod_prime_power() {
        let a = BigInt::from(7);
        let inv = inv_mod_pk(&a, 2, 20);
        assert_eq!((a * inv).mod_floor(&pow_int(2, 20)), BigInt::one());
    }
}

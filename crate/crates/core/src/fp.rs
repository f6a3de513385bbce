//! Polynomials over a prime field F_p, with factorization.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{inv_mod, mul_mod, Int};
use crate::poly::ZPoly;

/// Polynomial over F_p with ascending coefficients in `[0, p)`, normalized.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn new(mut c: Vec<u64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { c }
    }

    pub fn zero() -> Self {
        FpPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        FpPoly { c: vec![1] }
    }

    pub fn x() -> Self {
        FpPoly { c: vec![0, 1] }
    }

    pub fn from_zpoly(f: &ZPoly, p: u64) -> Self {
        Self::new(f.coeffs().iter().map(|a| crate::arith::mod_u64(a, p)).collect())
    }

    pub fn to_zpoly(&self) -> ZPoly {
        ZPoly::new(self.c.iter().map(|&a| Int::from(a)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lc(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn coeff(&self, k: usize) -> u64 {
        *self.c.get(k).unwrap_or(&0)
    }

    pub fn eval(&self, x: u64, p: u64) -> u64 {
        let mut acc = 0;
        for &a in self.c.iter().rev() {
            acc = (mul_mod(acc, x, p) + a) % p;
        }
        acc
    }

    pub fn add(&self, o: &Self, p: u64) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|k| (self.coeff(k) + o.coeff(k)) % p).collect())
    }

    pub fn sub(&self, o: &Self, p: u64) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|k| (self.coeff(k) + p - o.coeff(k)) % p).collect())
    }

    pub fn scale(&self, a: u64, p: u64) -> Self {
        Self::new(self.c.iter().map(|&b| mul_mod(a, b, p)).collect())
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        Self::new(out)
    }

    pub fn monic(&self, p: u64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(inv_mod(self.lc(), p), p)
    }

    pub fn divrem(&self, d: &Self, p: u64) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero in F_p[x]");
        if self.c.len() < d.c.len() {
            return (Self::zero(), self.clone());
        }
        let mut r = self.c.clone();
        let m = d.c.len();
        let inv = inv_mod(d.lc(), p);
        let mut q = vec![0u64; r.len() - m + 1];
        for k in (0..q.len()).rev() {
            let t = r[k + m - 1];
            if t == 0 {
                continue;
            }
            let qq = mul_mod(t, inv, p);
            q[k] = qq;
            for (j, &dc) in d.c.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mul_mod(qq, dc, p)) % p;
            }
        }
        r.truncate(m - 1);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self, p: u64) -> Self {
        self.divrem(d, p).1
    }

    pub fn gcd(&self, o: &Self, p: u64) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b, p);
            a = b;
            b = r;
        }
        a.monic(p)
    }

    /// Returns `(g, s, t)` with `s*self + t*o = g` and `g` monic.
    pub fn xgcd(&self, o: &Self, p: u64) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1, p);
            r0 = r1;
            r1 = r;
            let s2 = s0.sub(&q.mul(&s1, p), p);
            s0 = s1;
            s1 = s2;
            let t2 = t0.sub(&q.mul(&t1, p), p);
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = inv_mod(r0.lc(), p);
        (r0.scale(inv, p), s0.scale(inv, p), t0.scale(inv, p))
    }

    pub fn derivative(&self, p: u64) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(k, &a)| mul_mod(a, k as u64 % p, p)).collect())
    }

    pub fn mulmod(&self, o: &Self, m: &Self, p: u64) -> Self {
        self.mul(o, p).rem(m, p)
    }

    pub fn powmod(&self, e: &Int, m: &Self, p: u64) -> Self {
        let mut result = Self::one().rem(m, p);
        let mut base = self.rem(m, p);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = result.mulmod(&base, m, p);
            }
            if i + 1 < bits {
                base = base.mulmod(&base, m, p);
            }
        }
        result
    }

    /// Inverse modulo `m`, if it exists.
    pub fn invmod(&self, m: &Self, p: u64) -> Option<Self> {
        let (g, s, _) = self.xgcd(m, p);
        if g.deg() != 0 || g.is_zero() {
            return None;
        }
        Some(s.rem(m, p))
    }

    /// p-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self, p: u64) -> Self {
        let pu = p as usize;
        Self::new(self.c.iter().step_by(pu).copied().collect())
    }
}

/// Squarefree factorization of a monic polynomial: pairs `(g, e)` with
/// `f = prod g^e` and each `g` squarefree, monic, nonconstant.
pub fn squarefree_factorization(f: &FpPoly, p: u64) -> Vec<(FpPoly, u32)> {
    let mut out = Vec::new();
    sff_rec(&f.monic(p), p, 1, &mut out);
    out
}

fn sff_rec(f: &FpPoly, p: u64, mult: u32, out: &mut Vec<(FpPoly, u32)>) {
    if f.deg() == 0 {
        return;
    }
    let df = f.derivative(p);
    if df.is_zero() {
        sff_rec(&f.pth_root(p), p, mult * p as u32, out);
        return;
    }
    let mut c = f.gcd(&df, p);
    let mut w = f.divrem(&c, p).0;
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(&c, p);
        let z = w.divrem(&y, p).0;
        if z.deg() > 0 {
            out.push((z, i * mult));
        }
        w = y;
        c = c.divrem(&w, p).0;
        i += 1;
    }
    if c.deg() > 0 {
        sff_rec(&c.pth_root(p), p, mult * p as u32, out);
    }
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn distinct_degree(f: &FpPoly, p: u64) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x();
    let pe = Int::from(p);
    let mut h = x.rem(&rest, p);
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(&pe, &rest, p);
        let g = h.sub(&x, p).gcd(&rest, p);
        if g.deg() > 0 {
            rest = rest.divrem(&g, p).0;
            h = h.rem(&rest, p);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let dd = rest.deg();
        out.push((rest, dd));
    }
    out
}

/// Splits a monic squarefree polynomial whose irreducible factors all have degree `d`.
pub fn equal_degree(f: &FpPoly, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.deg();
    if n == d {
        return vec![f.clone()];
    }
    loop {
        let a = FpPoly::new((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        let g0 = a.gcd(f, p);
        let candidate = if g0.deg() > 0 {
            g0
        } else if p == 2 {
            // Trace map a + a^2 + ... + a^(2^(d-1)).
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..d {
                s = s.mulmod(&s, f, p);
                t = t.add(&s, p);
            }
            t.gcd(f, p)
        } else {
            let e = (num_traits::pow(Int::from(p), d) - 1u32) / 2u32;
            let b = a.powmod(&e, f, p).sub(&FpPoly::one(), p);
            b.gcd(f, p)
        };
        if candidate.deg() > 0 && candidate.deg() < n {
            let other = f.divrem(&candidate, p).0;
            let mut out = equal_degree(&candidate, d, p, rng);
            out.extend(equal_degree(&other, d, p, rng));
            return out;
        }
    }
}

/// Full factorization into monic irreducibles with multiplicities, sorted.
pub fn factor(f: &FpPoly, p: u64) -> Vec<(FpPoly, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p);
    let mut out = Vec::new();
    for (g, e) in squarefree_factorization(f, p) {
        for (h, d) in distinct_degree(&g, p) {
            for q in equal_degree(&h, d, p, &mut rng) {
                out.push((q, e));
            }
        }
    }
    out.sort_by(|a, b| (a.0.deg(), &a.0.c).cmp(&(b.0.deg(), &b.0.c)));
    out
}

/// Factorization of a squarefree polynomial, monic factors only.
pub fn factor_squarefree(f: &FpPoly, p: u64) -> Vec<FpPoly> {
    factor(f, p).into_iter().map(|(g, _)| g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(fs: &[(FpPoly, u32)], p: u64) -> FpPoly {
        let mut acc = FpPoly::one();
        for (g, e) in fs {
            for _ in 0..*e {
                acc = acc.mul(g, p);
            }
        }
        acc
    }

    #[test]
    fn factor_small() {
        // x^4 - 1 over F_5 splits completely.
        let f = FpPoly::new(vec![4, 0, 0, 0, 1]);
        let fs = factor(&f, 5);
        assert_eq!(fs.len(), 4);
        assert!(fs.iter().all(|(g, e)| g.deg() == 1 && *e == 1));
        // x^2 + 1 over F_3 is irreducible.
        assert_eq!(factor(&FpPoly::new(vec![1, 0, 1]), 3).len(), 1);
    }

    #[test]
    fn factor_with_powers() {
        // (x+1)^4 (x^2+x+1) over F_2: (x+1)^4 = x^4+1.
        let p = 2;
        let f = FpPoly::new(vec![1, 0, 0, 0, 1]).mul(&FpPoly::new(vec![1, 1, 1]), p);
        let fs = factor(&f, p);
        assert_eq!(fs, vec![(FpPoly::new(vec![1, 1]), 4), (FpPoly::new(vec![1, 1, 1]), 1)]);
        // x^10 + 3 over F_5 = (x^2 + 3)^5.
        let g = FpPoly::new(vec![3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        let gs = factor(&g, 5);
        assert_eq!(product(&gs, 5), g);
        assert!(gs.iter().all(|(_, e)| *e == 5));
    }

    #[test]
    fn factor_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &p in &[2u64, 3, 7, 101] {
            for _ in 0..30 {
                let n = rng.gen_range(1..12);
                let mut c: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
                c.push(1);
                let f = FpPoly::new(c);
                let fs = factor(&f, p);
                assert_eq!(product(&fs, p), f);
                for (g, _) in &fs {
                    // Irreducible: no roots over F_p for small degree sanity, and gcd with x^(p^k)-x trivial below degree.
                    let x = FpPoly::x();
                    let mut h = x.clone();
                    for _ in 0..g.deg() / 2 {
                        h = h.powmod(&Int::from(p), g, p);
                        assert_eq!(h.sub(&x, p).gcd(g, p).deg(), 0);
                    }
                }
            }
        }
    }
}

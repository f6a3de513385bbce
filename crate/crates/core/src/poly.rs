//! Dense univariate polynomials over Z and Q.
//!
//! Coefficients are stored in ascending order and kept normalized (no
//! trailing zeros), so the zero polynomial is the empty vector.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::arith::{Int, Rat};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type ZPoly = Poly<Int>;
pub type QPoly = Poly<Rat>;

impl<T: Clone + Num + Neg<Output = T>> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: T, k: usize) -> Self {
        let mut v = vec![T::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `x - a`.
    pub fn linear_root(a: T) -> Self {
        Self::new(vec![-a, T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = T::one();
        for c in self.coeffs.iter().skip(1) {
            out.push(c.clone() * k.clone());
            k = k + T::one();
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - other.coeff(k));
        }
        Self::new(out)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![T::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    /// `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(other).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// `x^deg * self(1/x)` for the given formal degree.
    pub fn reverse(&self, deg: usize) -> Self {
        let mut v = vec![T::zero(); deg + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[deg - k] = c.clone();
        }
        Self::new(v)
    }

    pub fn map<U: Clone + Num + Neg<Output = U>>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl ZPoly {
    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&a| BigInt::from(a)).collect())
    }

    pub fn content(&self) -> Int {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn to_q(&self) -> QPoly {
        self.map(|c| BigRational::from_integer(c.clone()))
    }

    pub fn eval_int(&self, x: &Int) -> Int {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn norm_sq(&self) -> Int {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn max_abs(&self) -> Int {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero)
    }

    /// Exact division over Z, returning `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.deg();
        let m = d.deg();
        if n < m {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); n - m + 1];
        let lc = d.lc();
        for k in (0..=n - m).rev() {
            let top = &rem[k + m];
            if top.is_zero() {
                continue;
            }
            let (qq, r) = top.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &qq * dc;
            }
            q[k] = qq;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(q))
    }

    /// Coefficientwise reduction into the symmetric range modulo `m`.
    pub fn symmetric_mod(&self, m: &Int) -> Self {
        let half = m / 2;
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let r = c.mod_floor(m);
                    if r > half {
                        r - m
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }

    pub fn reduce_mod(&self, m: &Int) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mod_floor(m)).collect())
    }
}

impl QPoly {
    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&a| BigRational::from_integer(BigInt::from(a))).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lc = self.lc();
        Self::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let n = self.coeffs.len();
        let m = d.coeffs.len();
        if n < m {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); n - m + 1];
        let inv = BigRational::one() / d.lc();
        for k in (0..=n - m).rev() {
            let top = rem[k + m - 1].clone();
            if top.is_zero() {
                continue;
            }
            let qq = &top * &inv;
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &qq * dc;
            }
            q[k] = qq;
        }
        rem.truncate(m - 1);
        (Self::new(q), Self::new(rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = r1;
            r1 = r;
            let s2 = s0.sub(&q.mul(&s1));
            s0 = s1;
            s1 = s2;
            let t2 = t0.sub(&q.mul(&t1));
            t0 = t1;
            t1 = t2;
        }
        let lc = r0.lc();
        let inv = BigRational::one() / lc;
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Least common multiple of the denominators.
    pub fn denominator(&self) -> Int {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        l
    }

    /// Primitive integer polynomial proportional to `self` with positive leading coefficient,
    /// together with the rational scalar `c` such that `self = c * result`.
    pub fn primitive_with_content(&self) -> (Rat, ZPoly) {
        if self.is_zero() {
            return (BigRational::zero(), ZPoly::zero());
        }
        let d = self.denominator();
        let z = ZPoly::new(self.coeffs.iter().map(|c| (c * BigRational::from_integer(d.clone())).to_integer()).collect());
        let mut g = z.content();
        if z.lc().is_negative() {
            g = -g;
        }
        let pp = ZPoly::new(z.coeffs().iter().map(|c| c / &g).collect());
        (BigRational::new(g, d), pp)
    }

    /// Squarefree decomposition `self = lc * prod a_i^i` (Yun), returned as `(i, a_i)` pairs
    /// with monic nonconstant `a_i`.
    pub fn squarefree_decomposition(&self) -> Vec<(u32, QPoly)> {
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.divrem(&a).0;
        let mut c = df.divrem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.deg() > 0 {
                out.push((i, g.clone()));
            }
            b = b.divrem(&g).0;
            if b.deg() == 0 {
                break;
            }
            c = d.divrem(&g).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }
}

impl<T: fmt::Display> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            let s = c.to_string();
            if s == "0" {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", s)?,
                1 => write!(f, "({})*x", s)?,
                _ => write!(f, "({})*x^{}", s, k)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = ZPoly::from_i64(&[1, 1]);
        let b = ZPoly::from_i64(&[-1, 1]);
        assert_eq!(a.mul(&b), ZPoly::from_i64(&[-1, 0, 1]));
        assert_eq!(a.pow(3), ZPoly::from_i64(&[1, 3, 3, 1]));
        assert_eq!(a.mul(&b).div_exact(&a), Some(b.clone()));
        assert_eq!(ZPoly::from_i64(&[1, 0, 1]).div_exact(&a), None);
        assert_eq!(ZPoly::from_i64(&[1, 2, 3]).derivative(), ZPoly::from_i64(&[2, 6]));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = QPoly::from_ints(&[-1, 0, 1]);
        let b = QPoly::from_ints(&[1, 2, 1]);
        assert_eq!(a.gcd(&b), QPoly::from_ints(&[1, 1]));
        // (x+1)^2 (x-2)
        let f = QPoly::from_ints(&[1, 1]).pow(2).mul(&QPoly::from_ints(&[-2, 1]));
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(1, QPoly::from_ints(&[-2, 1])), (2, QPoly::from_ints(&[1, 1]))]);
        assert!(!f.is_squarefree());
    }

    #[test]
    fn xgcd_identity() {
        let a = QPoly::from_ints(&[3, 0, 1, 5]);
        let b = QPoly::from_ints(&[1, 4, 2]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn content() {
        let q = QPoly::new(vec![crate::arith::rat_frac(-1, 2), crate::arith::rat(3)]);
        let (c, p) = q.primitive_with_content();
        assert_eq!(p, ZPoly::from_i64(&[-1, 6]));
        assert_eq!(c, crate::arith::rat_frac(1, 2));
    }
}

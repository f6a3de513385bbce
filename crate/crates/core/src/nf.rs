//! Number fields `K = Q[x]/(m)`, their elements and binary forms over them.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rat, parse_rat, Int, Rat};
use crate::error::{Error, Result};
use crate::factor::is_irreducible;
use crate::form::{sylvester_resultant, BinaryForm};
use crate::poly::{QPoly, ZPoly};
use crate::realroots::{isolate_real_roots, sign_at_root, RealRoot};

/// Element of `K`, as a polynomial of degree `< [K:Q]` in the generator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NfElem {
    pub c: Vec<Rat>,
}

impl NfElem {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    pub fn as_poly(&self) -> QPoly {
        QPoly::new(self.c.clone())
    }

    /// The rational number this element equals, if it lies in Q.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.c.iter().skip(1).all(|a| a.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn denominator(&self) -> Int {
        self.c.iter().fold(BigInt::one(), |l, a| l.lcm(a.denom()))
    }

    pub fn is_integral_coeffs(&self) -> bool {
        self.c.iter().all(|a| a.is_integer())
    }

    /// Integer coefficients of `d * self` where `d` is the denominator.
    pub fn integral_numerator(&self) -> (Int, ZPoly) {
        let d = self.denominator();
        let dq = BigRational::from_integer(d.clone());
        (d, ZPoly::new(self.c.iter().map(|a| (a * &dq).to_integer()).collect()))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.c.iter().map(fmt_rat).collect()
    }
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c.iter().map(fmt_rat).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone)]
pub struct NumberField {
    pub name: String,
    m: ZPoly,
    mq: QPoly,
    disc: Int,
    real_roots: Vec<RealRoot>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({}: {:?})", self.name, self.m)
    }
}

impl NumberField {
    /// Builds `Q[x]/(m)` for monic irreducible integral `m`.
    pub fn new(name: &str, m: ZPoly) -> Result<Arc<Self>> {
        if m.deg() == 0 || !m.lc().is_one() {
            return Err(Error::Invalid("defining polynomial must be monic of positive degree".into()));
        }
        let mq = m.to_q();
        if m.deg() > 1 && !is_irreducible(&mq) {
            return Err(Error::Invalid(format!("defining polynomial {:?} is reducible", m)));
        }
        let disc = if m.deg() == 1 {
            BigInt::one()
        } else {
            BinaryForm::from_poly(&mq, m.deg()).discriminant()?.to_integer()
        };
        let real_roots = isolate_real_roots(&mq);
        Ok(Arc::new(NumberField { name: name.to_string(), m, mq, disc, real_roots }))
    }

    /// Q as the degenerate field `Q[x]/(x)`.
    pub fn rational() -> Arc<Self> {
        Self::new("Q", ZPoly::from_i64(&[0, 1])).expect("x is irreducible")
    }

    pub fn from_i64(name: &str, m: &[i64]) -> Result<Arc<Self>> {
        Self::new(name, ZPoly::from_i64(m))
    }

    pub fn degree(&self) -> usize {
        self.m.deg()
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn poly(&self) -> &ZPoly {
        &self.m
    }

    pub fn poly_disc(&self) -> &Int {
        &self.disc
    }

    /// Whether `p^2 | disc(m)`, in which case `Z[theta]` may fail to be maximal at `p`.
    pub fn is_index_warning_prime(&self, p: u64) -> bool {
        let p2 = BigInt::from(p * p);
        (&self.disc % p2).is_zero()
    }

    pub fn real_places(&self) -> usize {
        self.real_roots.len()
    }

    pub fn complex_places(&self) -> usize {
        (self.degree() - self.real_roots.len()) / 2
    }

    pub fn real_roots(&self) -> &[RealRoot] {
        &self.real_roots
    }

    pub fn elem(&self, c: Vec<Rat>) -> NfElem {
        self.reduce(&QPoly::new(c))
    }

    pub fn elem_i64(&self, c: &[i64]) -> NfElem {
        self.elem(c.iter().map(|&a| BigRational::from_integer(a.into())).collect())
    }

    pub fn parse_elem(&self, c: &[String]) -> Result<NfElem> {
        let v = c
            .iter()
            .map(|s| parse_rat(s).ok_or_else(|| Error::Parse(format!("bad rational {:?}", s))))
            .collect::<Result<Vec<_>>>()?;
        if v.len() > self.degree() {
            return Err(Error::Parse(format!("element has {} coefficients, field degree {}", v.len(), self.degree())));
        }
        Ok(self.elem(v))
    }

    pub fn from_rat(&self, a: &Rat) -> NfElem {
        let mut c = vec![Rat::zero(); self.degree()];
        c[0] = a.clone();
        NfElem { c }
    }

    pub fn from_int(&self, a: &Int) -> NfElem {
        self.from_rat(&BigRational::from_integer(a.clone()))
    }

    pub fn zero(&self) -> NfElem {
        NfElem { c: vec![Rat::zero(); self.degree()] }
    }

    pub fn one(&self) -> NfElem {
        self.from_rat(&Rat::one())
    }

    pub fn theta(&self) -> NfElem {
        self.reduce(&QPoly::from_ints(&[0, 1]))
    }

    pub fn reduce(&self, p: &QPoly) -> NfElem {
        let r = if p.deg() >= self.degree() && !p.is_zero() { p.rem(&self.mq) } else { p.clone() };
        let mut c = r.into_coeffs();
        c.resize(self.degree(), Rat::zero());
        NfElem { c }
    }

    pub fn add(&self, a: &NfElem, b: &NfElem) -> NfElem {
        NfElem { c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, a: &NfElem, b: &NfElem) -> NfElem {
        NfElem { c: a.c.iter().zip(&b.c).map(|(x, y)| x - y).collect() }
    }

    pub fn neg(&self, a: &NfElem) -> NfElem {
        NfElem { c: a.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, a: &NfElem, r: &Rat) -> NfElem {
        NfElem { c: a.c.iter().map(|x| x * r).collect() }
    }

    pub fn mul(&self, a: &NfElem, b: &NfElem) -> NfElem {
        if self.is_rational() {
            return NfElem { c: vec![&a.c[0] * &b.c[0]] };
        }
        self.reduce(&a.as_poly().mul(&b.as_poly()))
    }

    pub fn pow(&self, a: &NfElem, e: u32) -> NfElem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &NfElem) -> Result<NfElem> {
        if a.is_zero() {
            return Err(Error::Invalid("inverse of zero".into()));
        }
        if self.is_rational() {
            return Ok(NfElem { c: vec![Rat::one() / &a.c[0]] });
        }
        let (g, s, _) = a.as_poly().xgcd(&self.mq);
        debug_assert_eq!(g.deg(), 0);
        Ok(self.reduce(&s))
    }

    pub fn div(&self, a: &NfElem, b: &NfElem) -> Result<NfElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Evaluates a polynomial with rational coefficients at an element.
    pub fn eval_qpoly(&self, p: &QPoly, x: &NfElem) -> NfElem {
        let mut acc = self.zero();
        for c in p.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.from_rat(c));
        }
        acc
    }

    /// Norm `N_{K/Q}(a) = Res(m, a)`.
    pub fn norm(&self, a: &NfElem) -> Rat {
        if self.is_rational() {
            return a.c[0].clone();
        }
        let p = a.as_poly();
        if p.is_zero() {
            return Rat::zero();
        }
        let (d, num) = a.integral_numerator();
        let num = ZPoly::new(num.into_coeffs());
        let mc: Vec<Int> = self.m.coeffs().to_vec();
        let ac: Vec<Int> = num.coeffs().to_vec();
        let r = sylvester_resultant(&mc, &ac);
        BigRational::new(r, num_traits::pow(d, self.degree()))
    }

    /// Trace of the multiplication-by-`a` map.
    pub fn trace(&self, a: &NfElem) -> Rat {
        let th = self.theta();
        let mut t = Rat::zero();
        let mut basis = self.one();
        for i in 0..self.degree() {
            t += &self.mul(a, &basis).c[i];
            basis = self.mul(&basis, &th);
        }
        t
    }

    /// Elementary symmetric functions `e_0..e_n` of the conjugates of `x` (Newton's identities).
    pub fn char_poly_elementary(&self, x: &NfElem) -> Vec<Rat> {
        let n = self.degree();
        let mut p = Vec::with_capacity(n);
        let mut pw = x.clone();
        for _ in 0..n {
            p.push(self.trace(&pw));
            pw = self.mul(&pw, x);
        }
        let mut e = vec![Rat::one()];
        for j in 1..=n {
            let mut s = Rat::zero();
            for i in 1..=j {
                let t = &e[j - i] * &p[i - 1];
                if i % 2 == 1 {
                    s += t;
                } else {
                    s -= t;
                }
            }
            e.push(s / BigRational::from_integer(BigInt::from(j)));
        }
        e
    }

    /// Sign of `a` under the `idx`-th real embedding (ordered by the real root).
    pub fn real_sign(&self, a: &NfElem, idx: usize) -> i32 {
        if self.is_rational() {
            return crate::realroots::sign(&a.c[0]);
        }
        sign_at_root(&a.as_poly(), &self.mq, &self.real_roots[idx])
    }

    pub fn real_signs(&self, a: &NfElem) -> Vec<i32> {
        (0..self.real_places()).map(|i| self.real_sign(a, i)).collect()
    }
}

/// Binary form with coefficients in a number field; coefficient `k` multiplies `u^k v^(n-k)`.
#[derive(Clone)]
pub struct NfForm {
    pub field: Arc<NumberField>,
    pub coeffs: Vec<NfElem>,
}

impl fmt::Debug for NfForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NfForm[{}]{:?}", self.degree(), self.coeffs)
    }
}

impl PartialEq for NfForm {
    fn eq(&self, o: &Self) -> bool {
        self.same_field(o) && self.coeffs == o.coeffs
    }
}

impl NfForm {
    pub fn new(field: Arc<NumberField>, coeffs: Vec<NfElem>) -> Self {
        assert!(!coeffs.is_empty());
        NfForm { field, coeffs }
    }

    pub fn from_rational(field: Arc<NumberField>, f: &BinaryForm) -> Self {
        let coeffs = f.coeffs().iter().map(|c| field.from_rat(c)).collect();
        NfForm { field, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn same_field(&self, o: &NfForm) -> bool {
        Arc::ptr_eq(&self.field, &o.field) || self.field.poly() == o.field.poly()
    }

    pub fn mul(&self, o: &NfForm) -> NfForm {
        let k = &self.field;
        let mut c = vec![k.zero(); self.degree() + o.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = k.add(&c[i + j], &k.mul(a, b));
            }
        }
        NfForm { field: k.clone(), coeffs: c }
    }

    pub fn scale(&self, r: &Rat) -> NfForm {
        let k = &self.field;
        NfForm { field: k.clone(), coeffs: self.coeffs.iter().map(|a| k.scale(a, r)).collect() }
    }

    pub fn eval(&self, u: &Rat, v: &Rat) -> NfElem {
        let k = &self.field;
        let n = self.degree();
        let mut acc = k.zero();
        let mut upow = Rat::one();
        let mut vpows = vec![Rat::one(); n + 1];
        for i in 1..=n {
            vpows[i] = &vpows[i - 1] * v;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            acc = k.add(&acc, &k.scale(c, &(&upow * &vpows[n - i])));
            upow = &upow * u;
        }
        acc
    }

    /// Coefficient lists over Z of each coefficient after scaling by a common integer;
    /// returns `(d, G)` with `self = G / d`.
    pub fn clear_denominators(&self) -> (Int, Vec<ZPoly>) {
        let d = self.coeffs.iter().fold(BigInt::one(), |l, a| l.lcm(&a.denominator()));
        let dq = BigRational::from_integer(d.clone());
        let zs = self
            .coeffs
            .iter()
            .map(|a| ZPoly::new(a.c.iter().map(|x| (x * &dq).to_integer()).collect()))
            .collect();
        (d, zs)
    }

    /// Resultant over `K` by a Bareiss determinant of the Sylvester matrix.
    pub fn resultant(&self, o: &NfForm) -> Result<NfElem> {
        if self.is_zero() || o.is_zero() {
            return Err(Error::Invalid("resultant of a zero form".into()));
        }
        if !self.same_field(o) {
            return Err(Error::Invalid("forms over different fields".into()));
        }
        let k = &self.field;
        let n = self.degree();
        let m = o.degree();
        let size = n + m;
        if size == 0 {
            return Ok(k.one());
        }
        let lead = |f: &NfForm| !f.coeffs[f.degree()].is_zero();
        if lead(self) && lead(o) {
            return euclid_resultant(k, self.coeffs[..=n].to_vec(), o.coeffs[..=m].to_vec());
        }
        let mut mat = vec![vec![k.zero(); size]; size];
        for r in 0..m {
            for (j, c) in self.coeffs.iter().rev().enumerate() {
                mat[r][r + j] = c.clone();
            }
        }
        for r in 0..n {
            for (j, c) in o.coeffs.iter().rev().enumerate() {
                mat[m + r][r + j] = c.clone();
            }
        }
        Ok(det_bareiss_nf(k, mat))
    }
}

/// Resultant of two polynomials over `K` with nonzero leading coefficients, by Euclidean
/// remainders.
fn euclid_resultant(k: &NumberField, mut a: Vec<NfElem>, mut b: Vec<NfElem>) -> Result<NfElem> {
    let mut acc = k.one();
    loop {
        let n = a.len() - 1;
        let m = b.len() - 1;
        if m == 0 {
            return Ok(k.mul(&acc, &k.pow(&b[0], n as u32)));
        }
        let lb = b[m].clone();
        let inv = k.inv(&lb)?;
        while a.len() > m && !a.is_empty() {
            let top = a.len() - 1;
            let q = k.mul(&a[top], &inv);
            for j in 0..=m {
                let t = k.mul(&q, &b[j]);
                a[top - m + j] = k.sub(&a[top - m + j], &t);
            }
            a.pop();
            while a.last().is_some_and(|c| c.is_zero()) {
                a.pop();
            }
        }
        if a.is_empty() {
            return Ok(k.zero());
        }
        let r = a.len() - 1;
        acc = k.mul(&acc, &k.pow(&lb, (n - r) as u32));
        if n * m % 2 == 1 {
            acc = k.neg(&acc);
        }
        a = std::mem::replace(&mut b, a);
    }
}

/// Bareiss determinant over a number field.
pub fn det_bareiss_nf(k: &NumberField, mut m: Vec<Vec<NfElem>>) -> NfElem {
    let n = m.len();
    let mut negate = false;
    let mut prev = k.one();
    for c in 0..n {
        if m[c][c].is_zero() {
            match (c + 1..n).find(|&i| !m[i][c].is_zero()) {
                Some(i) => {
                    m.swap(i, c);
                    negate = !negate;
                }
                None => return k.zero(),
            }
        }
        if c + 1 == n {
            break;
        }
        let prev_inv = k.inv(&prev).expect("nonzero pivot");
        for i in c + 1..n {
            for j in c + 1..n {
                let t = k.sub(&k.mul(&m[i][j], &m[c][c]), &k.mul(&m[i][c], &m[c][j]));
                m[i][j] = k.mul(&t, &prev_inv);
            }
        }
        prev = m[c][c].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        k.neg(&d)
    } else {
        d
    }
}

/// `c * prod factors == F` over `K`.
pub fn verify_factorization_nf(f: &BinaryForm, c: &Rat, factors: &[NfForm]) -> Result<bool> {
    let Some(first) = factors.first() else {
        return Ok(f.degree() == 0 && f.coeff(0) == c);
    };
    let k = first.field.clone();
    if factors.iter().any(|g| !g.same_field(first)) {
        return Err(Error::Invalid("factors over mixed coefficient fields".into()));
    }
    let mut acc = NfForm::new(k.clone(), vec![k.from_rat(c)]);
    for g in factors {
        acc = acc.mul(g);
    }
    Ok(acc == NfForm::from_rational(k, f))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NfFormJson {
    pub degree: usize,
    pub coeffs: Vec<Vec<String>>,
}

impl NfForm {
    pub fn to_json(&self) -> NfFormJson {
        NfFormJson { degree: self.degree(), coeffs: self.coeffs.iter().map(|c| c.to_strings()).collect() }
    }

    pub fn from_json(field: Arc<NumberField>, j: &NfFormJson) -> Result<Self> {
        if j.coeffs.len() != j.degree + 1 {
            return Err(Error::Parse(format!("form of degree {} needs {} coefficients", j.degree, j.degree + 1)));
        }
        let coeffs = j.coeffs.iter().map(|c| field.parse_elem(c)).collect::<Result<Vec<_>>>()?;
        Ok(NfForm { field, coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_frac};

    #[test]
    fn gaussian_integers() {
        let k = NumberField::from_i64("Q(i)", &[1, 0, 1]).unwrap();
        let i = k.theta();
        assert_eq!(k.mul(&i, &i), k.from_rat(&rat(-1)));
        let a = k.elem_i64(&[3, 4]);
        assert_eq!(k.norm(&a), rat(25));
        let inv = k.inv(&a).unwrap();
        assert_eq!(k.mul(&a, &inv), k.one());
        assert_eq!(k.trace(&a), rat(6));
        assert_eq!(k.real_places(), 0);
        assert_eq!(k.complex_places(), 1);
    }

    #[test]
    fn quintic_basics() {
        let k = NumberField::from_i64("K1", &[-6, -15, -10, 0, 0, 1]).unwrap();
        assert_eq!(k.degree(), 5);
        assert_eq!(k.real_places(), 1);
        let th = k.theta();
        // N(theta) = -m(0) * (-1)^5 = 6.
        assert_eq!(k.norm(&th), rat(6));
        let x = k.elem(vec![rat_frac(1, 2), rat(0), rat(3)]);
        let y = k.inv(&x).unwrap();
        assert_eq!(k.norm(&x) * k.norm(&y), rat(1));
        assert!(k.is_index_warning_prime(2));
        assert!(!k.is_index_warning_prime(7));
    }

    #[test]
    fn resultant_over_field_matches_rational() {
        let q = NumberField::rational();
        let f = BinaryForm::from_ints(&[1, 0, 3]);
        let g = BinaryForm::from_ints(&[-2, 5, 1]);
        let r = NfForm::from_rational(q.clone(), &f).resultant(&NfForm::from_rational(q.clone(), &g)).unwrap();
        assert_eq!(r.c[0], f.resultant(&g).unwrap());
        let k = NumberField::from_i64("Q(sqrt2)", &[-2, 0, 1]).unwrap();
        let rk = NfForm::from_rational(k.clone(), &f).resultant(&NfForm::from_rational(k.clone(), &g)).unwrap();
        assert_eq!(rk, k.from_rat(&f.resultant(&g).unwrap()));
    }

    #[test]
    fn euclidean_resultant_matches_sylvester() {
        let k = NumberField::from_i64("K1", &[-6, -15, -10, 0, 0, 1]).unwrap();
        let t = k.theta();
        let a = NfForm::new(k.clone(), vec![k.one(), k.neg(&t), k.elem_i64(&[0, 0, 2]), k.elem_i64(&[3, 1])]);
        let b = NfForm::new(k.clone(), vec![t.clone(), k.elem_i64(&[-1, 0, 0, 1]), k.one(), k.zero(), k.elem_i64(&[5])]);
        let (n, m) = (a.degree(), b.degree());
        let mut mat = vec![vec![k.zero(); n + m]; n + m];
        for r in 0..m {
            for (j, c) in a.coeffs.iter().rev().enumerate() {
                mat[r][r + j] = c.clone();
            }
        }
        for r in 0..n {
            for (j, c) in b.coeffs.iter().rev().enumerate() {
                mat[m + r][r + j] = c.clone();
            }
        }
        assert_eq!(a.resultant(&b).unwrap(), det_bareiss_nf(&k, mat));
    }

    #[test]
    fn factorization_over_field() {
        // u^2 - 2 v^2 = (u - sqrt2 v)(u + sqrt2 v)
        let k = NumberField::from_i64("Q(sqrt2)", &[-2, 0, 1]).unwrap();
        let f = BinaryForm::from_ints(&[-2, 0, 1]);
        let t = k.theta();
        let a = NfForm::new(k.clone(), vec![k.neg(&t), k.one()]);
        let b = NfForm::new(k.clone(), vec![t.clone(), k.one()]);
        assert!(verify_factorization_nf(&f, &rat(1), &[a.clone(), b.clone()]).unwrap());
        assert!(!verify_factorization_nf(&f, &rat(1), &[a]).unwrap());
        assert_eq!(k.real_signs(&t), vec![-1, 1]);
    }
}

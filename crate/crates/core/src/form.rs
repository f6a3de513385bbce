//! Binary forms over Q.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{fmt_rat, parse_rat, Int, Rat};
use crate::error::{Error, Result};
use crate::factor::factor_q;
use crate::poly::{QPoly, ZPoly};

/// Homogeneous form `sum_k coeffs[k] u^k v^(degree-k)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    degree: usize,
    coeffs: Vec<Rat>,
}

pub fn binomial(n: usize, k: usize) -> Int {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a form needs degree + 1 coefficients");
        BinaryForm { degree: coeffs.len() - 1, coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&a| BigRational::from_integer(a.into())).collect())
    }

    pub fn from_int_vec(c: Vec<Int>) -> Self {
        Self::new(c.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm { degree, coeffs: vec![Rat::zero(); degree + 1] }
    }

    /// `c * u^i * v^(degree - i)`.
    pub fn monomial(degree: usize, i: usize, c: Rat) -> Self {
        let mut f = Self::zero(degree);
        f.coeffs[i] = c;
        f
    }

    pub fn u() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn v() -> Self {
        Self::from_ints(&[1, 0])
    }

    /// Degree-12 form `sum C(12,i) alpha_i u^i v^(12-i)`.
    pub fn from_alpha(alpha: &[Rat; 13]) -> Self {
        Self::new(
            alpha
                .iter()
                .enumerate()
                .map(|(i, a)| a * BigRational::from_integer(binomial(12, i)))
                .collect(),
        )
    }

    /// Homogenizes a univariate polynomial to the given degree.
    pub fn from_poly(f: &QPoly, degree: usize) -> Self {
        assert!(f.deg() <= degree || f.is_zero());
        let mut c = vec![Rat::zero(); degree + 1];
        for (k, a) in f.coeffs().iter().enumerate() {
            c[k] = a.clone();
        }
        Self::new(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rat {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficient of `u^degree`.
    pub fn leading(&self) -> &Rat {
        &self.coeffs[self.degree]
    }

    pub fn dehomogenize(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    /// `F(1, x) = sum c_k x^(degree-k)`.
    pub fn dehomogenize_u(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn eval(&self, u: &Rat, v: &Rat) -> Rat {
        let mut acc = Rat::zero();
        let mut upow = Rat::one();
        let mut vpows = vec![Rat::one(); self.degree + 1];
        for k in 1..=self.degree {
            vpows[k] = &vpows[k - 1] * v;
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += c * &upow * &vpows[self.degree - k];
            upow = &upow * u;
        }
        acc
    }

    pub fn eval_int(&self, u: &Int, v: &Int) -> Rat {
        self.eval(&BigRational::from_integer(u.clone()), &BigRational::from_integer(v.clone()))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree, o.degree, "adding forms of different degree");
        Self::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.degree, o.degree, "subtracting forms of different degree");
        Self::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![Rat::zero(); self.degree + o.degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_ints(&[1]);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn du(&self) -> Self {
        if self.degree == 0 {
            return Self::zero(0);
        }
        Self::new((1..=self.degree).map(|k| &self.coeffs[k] * BigRational::from_integer(k.into())).collect())
    }

    pub fn dv(&self) -> Self {
        if self.degree == 0 {
            return Self::zero(0);
        }
        let n = self.degree;
        Self::new((0..n).map(|k| &self.coeffs[k] * BigRational::from_integer((n - k).into())).collect())
    }

    /// `F(v, u)`.
    pub fn swap(&self) -> Self {
        Self::new(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn int_coeffs(&self) -> Option<Vec<Int>> {
        if !self.is_integral() {
            return None;
        }
        Some(self.coeffs.iter().map(|c| c.to_integer()).collect())
    }

    /// Clears denominators: returns `(d, G)` with `F = G / d`, `G` integral.
    pub fn clear_denominators(&self) -> (Int, Vec<Int>) {
        let mut d = BigInt::one();
        for c in &self.coeffs {
            d = d.lcm(c.denom());
        }
        let dd = BigRational::from_integer(d.clone());
        (d, self.coeffs.iter().map(|c| (c * &dd).to_integer()).collect())
    }

    /// `(h_uu h_vv - h_uv^2) / 132^2`.
    pub fn hessian_covariant(&self) -> Self {
        let huu = self.du().du();
        let hvv = self.dv().dv();
        let huv = self.du().dv();
        let s = BigRational::new(BigInt::one(), BigInt::from(132 * 132));
        huu.mul(&hvv).sub(&huv.mul(&huv)).scale(&s)
    }

    /// `(h_u g_v - h_v g_u) / 240`.
    pub fn jacobian_covariant(&self, g: &Self) -> Self {
        let s = BigRational::new(BigInt::one(), BigInt::from(240));
        self.du().mul(&g.dv()).sub(&self.dv().mul(&g.du())).scale(&s)
    }

    /// Resultant via the Sylvester determinant of the full coefficient vectors.
    pub fn resultant(&self, o: &Self) -> Result<Rat> {
        if self.is_zero() || o.is_zero() {
            return Err(Error::Invalid("resultant of a zero form".into()));
        }
        let (d1, a) = self.clear_denominators();
        let (d2, b) = o.clear_denominators();
        let r = sylvester_resultant(&a, &b);
        let den = num_traits::pow(d1, o.degree) * num_traits::pow(d2, self.degree);
        Ok(BigRational::new(r, den))
    }

    /// `(-1)^(n(n-1)/2) Res(F_u, F_v) / n^(n-2)`; agrees with the usual discriminant of
    /// `F(x, 1)` when the leading coefficient is nonzero.
    pub fn discriminant(&self) -> Result<Rat> {
        let n = self.degree;
        if n == 0 {
            return Err(Error::Invalid("discriminant of a constant form".into()));
        }
        if n == 1 {
            return Ok(Rat::one());
        }
        let fu = self.du();
        let fv = self.dv();
        if fu.is_zero() || fv.is_zero() {
            return Ok(Rat::zero());
        }
        let r = fu.resultant(&fv)?;
        let sign = if (n * (n - 1) / 2) % 2 == 1 { -Rat::one() } else { Rat::one() };
        let nn = BigRational::from_integer(num_traits::pow(BigInt::from(n), n - 2));
        Ok(sign * r / nn)
    }

    pub fn is_squarefree(&self) -> bool {
        self.discriminant().map(|d| !d.is_zero()).unwrap_or(false)
    }

    /// Irreducible factorization over Q.
    pub fn factor_over_rationals(&self) -> Result<RationalFactorization> {
        if self.is_zero() {
            return Err(Error::Invalid("factorization of the zero form".into()));
        }
        let f = self.dehomogenize();
        let vmult = self.degree - f.deg();
        let fac = factor_q(&f);
        let mut factors: Vec<(BinaryForm, u32)> = fac
            .factors
            .iter()
            .map(|(g, e)| (BinaryForm::from_poly(&g.to_q(), g.deg()), *e))
            .collect();
        if vmult > 0 {
            factors.push((BinaryForm::v(), vmult as u32));
        }
        factors.sort_by(|a, b| {
            a.0.degree
                .cmp(&b.0.degree)
                .then_with(|| a.0.coeffs.cmp(&b.0.coeffs))
                .then_with(|| a.1.cmp(&b.1))
        });
        Ok(RationalFactorization { content: fac.content, factors })
    }

    pub fn to_json(&self) -> FormJson {
        FormJson { degree: self.degree, coeffs: self.coeffs.iter().map(fmt_rat).collect() }
    }

    pub fn from_json(j: &FormJson) -> Result<Self> {
        if j.coeffs.len() != j.degree + 1 {
            return Err(Error::Parse(format!(
                "form of degree {} needs {} coefficients, got {}",
                j.degree,
                j.degree + 1,
                j.coeffs.len()
            )));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| parse_rat(s).ok_or_else(|| Error::Parse(format!("bad rational {:?}", s))))
            .collect::<Result<Vec<_>>>()?;
        Ok(BinaryForm { degree: j.degree, coeffs })
    }

    /// Integer polynomial `F(x, 1)` scaled to be primitive, when `F` is integral.
    pub fn to_zpoly(&self) -> Option<ZPoly> {
        Some(ZPoly::new(self.int_coeffs()?))
    }

    /// Sign of `F(u, v)`.
    pub fn sign_at(&self, u: &Rat, v: &Rat) -> i32 {
        let x = self.eval(u, v);
        if x.is_positive() {
            1
        } else if x.is_negative() {
            -1
        } else {
            0
        }
    }
}

/// `F = content * prod factors^mult`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFactorization {
    pub content: Rat,
    pub factors: Vec<(BinaryForm, u32)>,
}

impl RationalFactorization {
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = Vec::new();
        for (g, e) in &self.factors {
            for _ in 0..*e {
                d.push(g.degree());
            }
        }
        d.sort();
        d
    }

    pub fn expand(&self) -> BinaryForm {
        let mut acc = BinaryForm::new(vec![self.content.clone()]);
        for (g, e) in &self.factors {
            acc = acc.mul(&g.pow(*e));
        }
        acc
    }
}

/// `c * prod factors == F` over Q.
pub fn verify_factorization(f: &BinaryForm, c: &Rat, factors: &[BinaryForm]) -> bool {
    let mut acc = BinaryForm::new(vec![c.clone()]);
    for g in factors {
        acc = acc.mul(g);
    }
    acc == *f
}

/// Bareiss fraction-free determinant.
pub fn det_bareiss(mut m: Vec<Vec<Int>>) -> Int {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester resultant of forms given by ascending coefficient vectors
/// (`a[k]` multiplies `u^k v^(n-k)`).
pub fn sylvester_resultant(a: &[Int], b: &[Int]) -> Int {
    let n = a.len() - 1;
    let m = b.len() - 1;
    let size = n + m;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for r in 0..m {
        for (k, c) in a.iter().rev().enumerate() {
            mat[r][r + k] = c.clone();
        }
    }
    for r in 0..n {
        for (k, c) in b.iter().rev().enumerate() {
            mat[m + r][r + k] = c.clone();
        }
    }
    det_bareiss(mat)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FormJson {
    pub degree: usize,
    pub coeffs: Vec<String>,
}

impl Serialize for BinaryForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BinaryForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FormJson::deserialize(d)?;
        BinaryForm::from_json(&j).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let n = self.degree;
        for k in (0..=n).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let mono = match (k, n - k) {
                (0, 0) => String::new(),
                (a, 0) => pow_str("u", a),
                (0, b) => pow_str("v", b),
                (a, b) => format!("{}*{}", pow_str("u", a), pow_str("v", b)),
            };
            let neg = c.is_negative();
            let abs = fmt_rat(&c.abs());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{}", abs)?;
            } else if abs == "1" {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", abs, mono)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn pow_str(x: &str, e: usize) -> String {
    if e == 1 {
        x.to_string()
    } else {
        format!("{}^{}", x, e)
    }
}

impl fmt::Debug for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryForm[{}]({})", self.degree, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_frac};

    #[test]
    fn linear_resultant() {
        let f = BinaryForm::from_ints(&[3, 2]); // 2u + 3v
        let g = BinaryForm::from_ints(&[7, 5]); // 5u + 7v
        assert_eq!(f.resultant(&g).unwrap(), rat(2 * 7 - 3 * 5));
    }

    #[test]
    fn resultant_with_v_factor() {
        // Res(v, u^2 + v^2): substituting v = 0 gives u^2, coefficient 1 up to sign.
        let v = BinaryForm::v();
        let g = BinaryForm::from_ints(&[1, 0, 1]);
        assert_eq!(v.resultant(&g).unwrap().abs(), rat(1));
        let h = BinaryForm::from_ints(&[1, 0, 0]);
        assert_eq!(v.resultant(&h).unwrap(), rat(0));
    }

    #[test]
    fn discriminants() {
        assert_ne!(BinaryForm::from_ints(&[0, 1, 0]).discriminant().unwrap(), rat(0));
        assert_eq!(BinaryForm::from_ints(&[0, 0, 1]).discriminant().unwrap(), rat(0));
        // x^3 - x has discriminant 4.
        assert_eq!(BinaryForm::from_ints(&[0, -1, 0, 1]).discriminant().unwrap(), rat(4));
        // x^2 + x + 1 has discriminant -3.
        assert_eq!(BinaryForm::from_ints(&[1, 1, 1]).discriminant().unwrap(), rat(-3));
        // 2x^3 + 3 : -27 * 4 * 9 = -972 ... disc(a x^3 + d) = -27 a^2 d^2.
        assert_eq!(BinaryForm::from_ints(&[3, 0, 0, 2]).discriminant().unwrap(), rat(-27 * 4 * 9));
    }

    #[test]
    fn covariants_of_monomials() {
        let h = BinaryForm::monomial(12, 6, rat(1));
        let g = h.hessian_covariant();
        assert_eq!(g, BinaryForm::monomial(20, 10, rat_frac(-1, 44)));
        assert!(h.jacobian_covariant(&g).is_zero());
        let h12 = BinaryForm::monomial(12, 12, rat(1));
        assert!(h12.hessian_covariant().is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let f = BinaryForm::new(vec![rat_frac(-144, 7), rat(0), rat(5)]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"degree":2,"coeffs":["-144/7","0","5"]}"#);
        let back: BinaryForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<BinaryForm>(r#"{"degree":3,"coeffs":["1"]}"#).is_err());
    }

    #[test]
    fn factor_with_v_and_content() {
        // -6 v^2 u (u^2 + 2 v^2)
        let g = BinaryForm::v()
            .pow(2)
            .mul(&BinaryForm::u())
            .mul(&BinaryForm::from_ints(&[2, 0, 1]))
            .scale(&rat(-6));
        let fac = g.factor_over_rationals().unwrap();
        assert_eq!(fac.content, rat(-6));
        assert_eq!(fac.degrees(), vec![1, 1, 1, 2]);
        assert_eq!(fac.expand(), g);
    }
}

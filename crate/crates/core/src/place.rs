//! Finite places of number fields: local rings, valuations and local square classes.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{pow_int, split_p, vp_int, Int};
use crate::error::{Error, Result};
use crate::fp::{factor, FpPoly};
use crate::hensel::multifactor_lift;
use crate::nf::{NfElem, NumberField};
use crate::poly::ZPoly;

/// Working precision (in p-adic digits) of the local ring attached to each place.
pub const BASE_PRECISION: u32 = 96;

/// Remainder of an integer polynomial modulo a monic integer polynomial.
pub fn rem_monic(a: &ZPoly, m: &ZPoly) -> ZPoly {
    let d = m.deg();
    if a.is_zero() || a.deg() < d {
        return a.clone();
    }
    let mut r: Vec<Int> = a.coeffs().to_vec();
    for k in (d..r.len()).rev() {
        let t = r[k].clone();
        if t.is_zero() {
            continue;
        }
        for (j, mc) in m.coeffs().iter().enumerate() {
            r[k - d + j] -= &t * mc;
        }
    }
    r.truncate(d);
    ZPoly::new(r)
}

/// Element of `O_p / p^N`, coefficients on the power basis of the local generator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Le(pub Vec<Int>);

impl fmt::Debug for Le {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Le{:?}", self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

/// `Z_p[x]/(M) mod p^N` where `M` is the Hensel lift of the factor `g^e` of the defining polynomial.
#[derive(Clone)]
pub struct LocalRing {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub prec: u32,
    pub modulus: Int,
    mm: ZPoly,
    ghat: ZPoly,
    gbar: FpPoly,
    pi: Le,
    rho: Le,
    omega: Le,
}

impl LocalRing {
    fn build(p: u64, e: u32, f: u32, prec: u32, mm: ZPoly, gbar: FpPoly) -> Result<Self> {
        let modulus = pow_int(p, prec);
        let ghat = gbar.to_zpoly();
        let d = (e * f) as usize;
        let mut ring = LocalRing {
            p,
            e,
            f,
            prec,
            modulus,
            mm,
            ghat: ghat.clone(),
            gbar,
            pi: Le(vec![BigInt::zero(); d]),
            rho: Le(vec![BigInt::zero(); d]),
            omega: Le(vec![BigInt::zero(); d]),
        };
        let one = ring.one();
        if e == 1 {
            ring.pi = ring.from_int(&BigInt::from(p));
            ring.rho = one.clone();
            ring.omega = one;
        } else {
            // M = ghat^e + p r, and r(theta) must be a unit for Z_p[theta] to be maximal.
            let diff = ring.mm.sub(&ghat.pow(e));
            let r = ZPoly::new(diff.coeffs().iter().map(|c| c / BigInt::from(p)).collect());
            let rl = ring.reduce(&r);
            if ring.residue(&rl).is_zero() {
                return Err(Error::Unsupported(format!(
                    "Z[theta] is not maximal at {}; needs integral basis data",
                    p
                )));
            }
            let rinv = ring.unit_inv(&rl);
            ring.pi = ring.reduce(&ghat);
            ring.omega = ring.neg(&rinv);
            let gpow = ring.pow(&ring.pi.clone(), e - 1);
            ring.rho = ring.mul(&gpow, &ring.omega.clone());
        }
        Ok(ring)
    }

    pub fn dim(&self) -> usize {
        (self.e * self.f) as usize
    }

    pub fn reduce(&self, z: &ZPoly) -> Le {
        let r = rem_monic(z, &self.mm);
        let mut c: Vec<Int> = r.coeffs().iter().map(|a| a.mod_floor(&self.modulus)).collect();
        c.resize(self.dim(), BigInt::zero());
        Le(c)
    }

    fn norm_le(&self, mut c: Vec<Int>) -> Le {
        for a in c.iter_mut() {
            *a = a.mod_floor(&self.modulus);
        }
        Le(c)
    }

    pub fn from_int(&self, a: &Int) -> Le {
        let mut c = vec![BigInt::zero(); self.dim()];
        c[0] = a.mod_floor(&self.modulus);
        Le(c)
    }

    pub fn one(&self) -> Le {
        self.from_int(&BigInt::one())
    }

    pub fn zero(&self) -> Le {
        Le(vec![BigInt::zero(); self.dim()])
    }

    pub fn pi(&self) -> &Le {
        &self.pi
    }

    pub fn add(&self, a: &Le, b: &Le) -> Le {
        self.norm_le(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &Le, b: &Le) -> Le {
        self.norm_le(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &Le) -> Le {
        self.norm_le(a.0.iter().map(|x| -x).collect())
    }

    pub fn mul(&self, a: &Le, b: &Le) -> Le {
        let d = self.dim();
        if d == 1 {
            return Le(vec![(&a.0[0] * &b.0[0]).mod_floor(&self.modulus)]);
        }
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce(&ZPoly::new(prod))
    }

    pub fn mul_int(&self, a: &Le, k: &Int) -> Le {
        self.norm_le(a.0.iter().map(|x| x * k).collect())
    }

    pub fn pow(&self, a: &Le, mut e: u32) -> Le {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, a: &Le) -> bool {
        a.0.iter().all(|c| c.is_zero())
    }

    /// Image in the residue field `F_p[x]/(gbar)`.
    pub fn residue(&self, a: &Le) -> FpPoly {
        let fp = FpPoly::new(a.0.iter().map(|c| crate::arith::mod_u64(c, self.p)).collect());
        fp.rem(&self.gbar, self.p)
    }

    pub fn lift_residue(&self, r: &FpPoly) -> Le {
        self.reduce(&r.to_zpoly())
    }

    pub fn residue_field_poly(&self) -> &FpPoly {
        &self.gbar
    }

    /// Exact division by `p`, if every coefficient is divisible.
    pub fn div_p(&self, a: &Le) -> Option<Le> {
        let pb = BigInt::from(self.p);
        let mut out = Vec::with_capacity(a.0.len());
        for c in &a.0 {
            let (q, r) = c.div_rem(&pb);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Le(out))
    }

    /// Division by the uniformizer, if `a` lies in the maximal ideal.
    pub fn div_pi(&self, a: &Le) -> Option<Le> {
        if self.e == 1 {
            return self.div_p(a);
        }
        let (q, s) = divrem_monic(&ZPoly::new(a.0.clone()), &self.ghat);
        let pb = BigInt::from(self.p);
        let mut sp = Vec::new();
        for c in s.coeffs() {
            let (qq, r) = c.div_rem(&pb);
            if !r.is_zero() {
                return None;
            }
            sp.push(qq);
        }
        let s1 = self.reduce(&ZPoly::new(sp));
        Some(self.add(&self.reduce(&q), &self.mul(&s1, &self.rho)))
    }

    /// Inverse of a unit by Newton iteration from the residue inverse.
    pub fn unit_inv(&self, a: &Le) -> Le {
        let r = self.residue(a);
        let rinv = r.invmod(&self.gbar, self.p).expect("unit has invertible residue");
        let mut x = self.lift_residue(&rinv);
        let two = self.from_int(&BigInt::from(2));
        let mut prec = 1u32;
        while prec < self.prec {
            x = self.mul(&x, &self.sub(&two, &self.mul(a, &x)));
            prec *= 2;
        }
        x
    }

    /// Splits `a = pi^v * u` with `u` a unit. Returns `(v, u, valid_digits)` where
    /// `valid_digits` is the p-adic precision left in `u`; `None` when `a` vanishes to
    /// the working precision.
    pub fn split(&self, a: &Le) -> Option<(u32, Le, u32)> {
        let mut x = a.clone();
        let mut k = 0u32;
        let mut lost = 0u32;
        while let Some(y) = self.div_p(&x) {
            if self.is_zero(&x) || lost + 1 >= self.prec {
                return None;
            }
            x = y;
            k += 1;
            lost += 1;
        }
        let mut s = 0u32;
        while self.residue(&x).is_zero() {
            x = self.div_pi(&x)?;
            s += 1;
            lost += 1;
        }
        let u = if k > 0 && self.e > 1 { self.mul(&x, &self.pow(&self.omega, k)) } else { x };
        Some((k * self.e + s, u, self.prec.saturating_sub(lost)))
    }

    /// `u^(q/2)`-type Frobenius power in the residue field.
    fn residue_pow(&self, r: &FpPoly, e: &Int) -> FpPoly {
        r.powmod(e, &self.gbar, self.p)
    }

    pub fn residue_size(&self) -> Int {
        pow_int(self.p, self.f)
    }

    /// Square root in a residue field of characteristic 2.
    fn sqrt_char2(&self, r: &FpPoly) -> FpPoly {
        let half = self.residue_size() / 2u32;
        self.residue_pow(r, &half)
    }

    fn trace_char2(&self, r: &FpPoly) -> u8 {
        let mut t = FpPoly::zero();
        let mut x = r.clone();
        for _ in 0..self.f {
            t = t.add(&x, 2);
            x = x.mul(&x, 2).rem(&self.gbar, 2);
        }
        debug_assert!(t.deg() == 0);
        t.coeff(0) as u8
    }

    /// Canonical normal form of the square class of a unit (residue characteristic 2):
    /// the odd-level digits and the final trace bit.
    pub fn unit_key_2(&self, u: &Le) -> Vec<u8> {
        assert_eq!(self.p, 2);
        let e = self.e;
        let one = self.one();
        let r = self.residue(u);
        let s = self.sqrt_char2(&r);
        let sl = self.lift_residue(&s);
        let si = self.unit_inv(&sl);
        let mut u = self.mul(u, &self.mul(&si, &si));
        let mut key = Vec::with_capacity((e * self.f + 1) as usize);
        for j in 1..2 * e {
            let mut w = self.sub(&u, &one);
            for _ in 0..j {
                w = self.div_pi(&w).expect("digit extraction stays in the maximal ideal");
            }
            let d = self.residue(&w);
            if j % 2 == 0 {
                if !d.is_zero() {
                    let z = self.sqrt_char2(&d);
                    let y = self.add(&one, &self.mul(&self.pow(&self.pi, j / 2), &self.lift_residue(&z)));
                    let yi = self.unit_inv(&y);
                    u = self.mul(&u, &self.mul(&yi, &yi));
                }
            } else {
                for i in 0..self.f as usize {
                    key.push(d.coeff(i) as u8);
                }
                if !d.is_zero() {
                    let y = self.add(&one, &self.mul(&self.pow(&self.pi, j), &self.lift_residue(&d)));
                    u = self.mul(&u, &self.unit_inv(&y));
                }
            }
        }
        let w = self.sub(&u, &one);
        let w = self.div_p(&w).and_then(|x| self.div_p(&x)).expect("unit is 1 mod 4 after normalization");
        key.push(self.trace_char2(&self.residue(&w)));
        key
    }

    /// Whether a unit is a square modulo `pi^j`.
    pub fn unit_square_mod_pi(&self, u: &Le, j: u32) -> bool {
        if j == 0 {
            return true;
        }
        if self.p != 2 {
            return self.unit_char_odd(u) == 0;
        }
        if j == 1 {
            return true;
        }
        let e = self.e;
        let one = self.one();
        let s = self.sqrt_char2(&self.residue(u));
        let si = self.unit_inv(&self.lift_residue(&s));
        let mut u = self.mul(u, &self.mul(&si, &si));
        for l in 1..j.min(2 * e) {
            let mut w = self.sub(&u, &one);
            for _ in 0..l {
                w = self.div_pi(&w).expect("digit extraction stays in the maximal ideal");
            }
            let d = self.residue(&w);
            if d.is_zero() {
                continue;
            }
            if l % 2 == 1 {
                return false;
            }
            let z = self.sqrt_char2(&d);
            let y = self.add(&one, &self.mul(&self.pow(&self.pi, l / 2), &self.lift_residue(&z)));
            let yi = self.unit_inv(&y);
            u = self.mul(&u, &self.mul(&yi, &yi));
        }
        if j <= 2 * e {
            return true;
        }
        let w = self.sub(&u, &one);
        let w = self.div_p(&w).and_then(|x| self.div_p(&x)).expect("unit is 1 mod 4 after normalization");
        self.trace_char2(&self.residue(&w)) == 0
    }

    /// Quadratic character of a unit for odd residue characteristic: 0 if square, 1 otherwise.
    pub fn unit_char_odd(&self, u: &Le) -> u8 {
        let r = self.residue(u);
        let e = (self.residue_size() - 1u32) / 2u32;
        let t = self.residue_pow(&r, &e);
        if t == FpPoly::one() {
            0
        } else {
            1
        }
    }
}

fn divrem_monic(a: &ZPoly, m: &ZPoly) -> (ZPoly, ZPoly) {
    let d = m.deg();
    if a.is_zero() || a.deg() < d {
        return (ZPoly::zero(), a.clone());
    }
    let mut r: Vec<Int> = a.coeffs().to_vec();
    let mut q = vec![BigInt::zero(); r.len() - d];
    for k in (d..r.len()).rev() {
        let t = r[k].clone();
        if t.is_zero() {
            continue;
        }
        q[k - d] = t.clone();
        for (j, mc) in m.coeffs().iter().enumerate() {
            r[k - d + j] -= &t * mc;
        }
    }
    r.truncate(d);
    (ZPoly::new(q), ZPoly::new(r))
}

/// JSON descriptor of a place: the residue factor of the defining polynomial mod p.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaceDescriptor {
    pub p: u64,
    pub poly_factor: Vec<u64>,
    pub e: u32,
    pub f: u32,
}

impl fmt::Display for PlaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly_factor.len() <= 2 && self.e == 1 && self.f == 1 && self.poly_factor == vec![0, 1] {
            return write!(f, "{}", self.p);
        }
        write!(f, "({}, {:?}, e={}, f={})", self.p, self.poly_factor, self.e, self.f)
    }
}

enum ClassMap {
    Odd,
    Two { table: HashMap<Vec<u8>, u128> },
}

/// A prime of `K` above a rational prime `p`, with its completion data.
pub struct PrimePlace {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub residue_poly: FpPoly,
    field: Arc<NumberField>,
    lift_factors: Vec<FpPoly>,
    lift_index: usize,
    ring: LocalRing,
    classes: ClassMap,
    cache: Mutex<Vec<LocalRing>>,
}

impl fmt::Debug for PrimePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

impl NumberField {
    /// Places above `p`, certified by the Dedekind criterion.
    pub fn primes_above(self: &Arc<Self>, p: u64) -> Result<Vec<PrimePlace>> {
        let m = self.poly();
        let mbar = FpPoly::from_zpoly(m, p);
        let fac = factor(&mbar, p);
        // Dedekind: m = prod ghat^e + p F; maximal iff no repeated ghat divides F mod p.
        let mut prod = ZPoly::one();
        for (g, e) in &fac {
            prod = prod.mul(&g.to_zpoly().pow(*e));
        }
        let diff = m.sub(&prod);
        let fz = ZPoly::new(diff.coeffs().iter().map(|c| c / BigInt::from(p)).collect());
        let fbar = FpPoly::from_zpoly(&fz, p);
        for (g, e) in &fac {
            if *e >= 2 && fbar.rem(g, p).is_zero() {
                return Err(Error::Unsupported(format!(
                    "{}: Z[theta] is not maximal at p = {}; needs integral basis data",
                    self.name, p
                )));
            }
        }
        let lift_factors: Vec<FpPoly> = fac
            .iter()
            .map(|(g, e)| {
                let mut acc = FpPoly::one();
                for _ in 0..*e {
                    acc = acc.mul(g, p);
                }
                acc
            })
            .collect();
        let lifts = multifactor_lift(m, &lift_factors, p, BASE_PRECISION);
        let mut out = Vec::new();
        for (idx, ((g, e), mm)) in fac.iter().zip(lifts).enumerate() {
            let ring = LocalRing::build(p, *e, g.deg() as u32, BASE_PRECISION, mm, g.clone())?;
            let mut place = PrimePlace {
                p,
                e: *e,
                f: g.deg() as u32,
                residue_poly: g.clone(),
                field: self.clone(),
                lift_factors: lift_factors.clone(),
                lift_index: idx,
                ring,
                classes: ClassMap::Odd,
                cache: Mutex::new(Vec::new()),
            };
            if p == 2 {
                place.classes = ClassMap::Two { table: place.build_table_2() };
            }
            out.push(place);
        }
        Ok(out)
    }

    /// The place with the given descriptor.
    pub fn place_from_descriptor(self: &Arc<Self>, d: &PlaceDescriptor) -> Result<PrimePlace> {
        self.primes_above(d.p)?
            .into_iter()
            .find(|pl| pl.residue_poly.c == d.poly_factor)
            .ok_or_else(|| Error::Invalid(format!("no place {} in {}", d, self.name)))
    }
}

impl PrimePlace {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }

    pub fn descriptor(&self) -> PlaceDescriptor {
        PlaceDescriptor { p: self.p, poly_factor: self.residue_poly.c.clone(), e: self.e, f: self.f }
    }

    /// Dimension of `K_p^x / (K_p^x)^2` over F_2.
    pub fn class_dim(&self) -> usize {
        if self.p == 2 {
            (self.e * self.f + 2) as usize
        } else {
            2
        }
    }

    /// Local ring at (at least) the requested precision.
    pub fn ring_with_precision(&self, digits: u32) -> LocalRing {
        if digits <= self.ring.prec {
            return self.ring.clone();
        }
        let mut cache = self.cache.lock().expect("ring cache");
        if let Some(r) = cache.iter().filter(|r| r.prec >= digits).min_by_key(|r| r.prec) {
            return r.clone();
        }
        let digits = digits.max(2 * self.ring.prec);
        let lifts = multifactor_lift(self.field.poly(), &self.lift_factors, self.p, digits);
        let r = LocalRing::build(self.p, self.e, self.f, digits, lifts[self.lift_index].clone(), self.residue_poly.clone())
            .expect("maximality already certified");
        cache.push(r.clone());
        r
    }

    fn build_table_2(&self) -> HashMap<Vec<u8>, u128> {
        let r = &self.ring;
        let one = r.one();
        let mut basis: Vec<Le> = Vec::new();
        for j in (1..2 * self.e).step_by(2) {
            let pij = r.pow(r.pi(), j);
            for i in 0..self.f as usize {
                let mut c = vec![0u64; i + 1];
                c[i] = 1;
                let w = r.lift_residue(&FpPoly::new(c));
                basis.push(r.add(&one, &r.mul(&pij, &w)));
            }
        }
        // 1 + 4 s with Tr(s) = 1.
        let s0 = (0..self.f as usize)
            .map(|i| {
                let mut c = vec![0u64; i + 1];
                c[i] = 1;
                FpPoly::new(c)
            })
            .find(|s| r.trace_char2(s) == 1)
            .expect("trace is surjective");
        let four = r.from_int(&BigInt::from(4));
        basis.push(r.add(&one, &r.mul(&four, &r.lift_residue(&s0))));
        let t = basis.len();
        let mut table = HashMap::new();
        for mask in 0u128..(1u128 << t) {
            let mut x = one.clone();
            for (i, b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    x = r.mul(&x, b);
                }
            }
            let key = r.unit_key_2(&x);
            let prev = table.insert(key, mask);
            assert!(prev.is_none(), "2-adic unit basis is dependent modulo squares");
        }
        table
    }

    /// Unit square-class bits (without the valuation bit).
    fn unit_bits(&self, ring: &LocalRing, u: &Le) -> u128 {
        match &self.classes {
            ClassMap::Odd => ring.unit_char_odd(u) as u128,
            ClassMap::Two { table } => *table.get(&ring.unit_key_2(u)).expect("key table is complete"),
        }
    }

    /// Square class of a local element: bit 0 is the valuation parity, higher bits the unit class.
    /// `None` if the element vanishes to working precision.
    pub fn class_of_local(&self, ring: &LocalRing, a: &Le) -> Option<(u32, u128)> {
        let (v, u, valid) = ring.split(a)?;
        if valid < 2 * self.e + 4 {
            return None;
        }
        Some((v, (v as u128 & 1) | (self.unit_bits(ring, &u) << 1)))
    }

    fn precision_for(&self, a: &ZPoly) -> u32 {
        if self.field.is_rational() {
            let v = vp_int(&a.coeff(0), self.p).unwrap_or(0);
            return v + 2 * self.e + 8;
        }
        let k = &self.field;
        let elem = k.elem(a.coeffs().iter().map(|c| num_rational::BigRational::from_integer(c.clone())).collect());
        let n = k.norm(&elem);
        let v = vp_int(n.numer(), self.p).unwrap_or(0);
        v + 2 * self.e + 8
    }

    /// Valuation and square class of a nonzero element of `K`.
    pub fn class_and_valuation(&self, x: &NfElem) -> Result<(i64, u128)> {
        if x.is_zero() {
            return Err(Error::Invalid("square class of zero".into()));
        }
        let (d, a) = x.integral_numerator();
        let ring = self.ring_with_precision(self.precision_for(&a));
        let la = ring.reduce(&a);
        let (va, ca) = self.class_of_local(&ring, &la).ok_or_else(|| Error::Invalid("precision exhausted".into()))?;
        let (vd, cd) = if d.is_one() {
            (0, 0)
        } else {
            let (k, _) = split_p(&d, self.p);
            let ringd = self.ring_with_precision(k + 2 * self.e + 8);
            let ld = ringd.from_int(&d);
            let (vd, cd) = self.class_of_local(&ringd, &ld).expect("nonzero integer");
            (vd, cd)
        };
        Ok((va as i64 - vd as i64, ca ^ cd))
    }

    pub fn valuation(&self, x: &NfElem) -> Option<i64> {
        if x.is_zero() {
            return None;
        }
        Some(self.class_and_valuation(x).expect("nonzero").0)
    }

    /// Square class bits of a nonzero element.
    pub fn square_class(&self, x: &NfElem) -> u128 {
        self.class_and_valuation(x).expect("nonzero element").1
    }

    pub fn is_local_square(&self, x: &NfElem) -> bool {
        self.square_class(x) == 0
    }

    /// Class of a rational integer.
    pub fn square_class_int(&self, a: &Int) -> u128 {
        let (k, _) = split_p(a, self.p);
        let ring = self.ring_with_precision(k + 2 * self.e + 8);
        self.class_of_local(&ring, &ring.from_int(a)).expect("nonzero integer").1
    }

    /// Reduction of an integral element to the residue field.
    pub fn residue_of(&self, a: &ZPoly) -> FpPoly {
        self.ring.residue(&self.ring.reduce(a))
    }
}

//! Partial 2-descent: fake Selmer sets of `y^2 = f(u,v)` cut out by local conditions,
//! for a factorization of `f` over `Q` or over a number field.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rat, is_square_int, least_nonresidue, parse_rat, primes_below, vp_rat, Int, Rat};
use crate::arithdata::{square_class_group_k, verify_arithmetic_data, ArithmeticDataFile, VerifiedArithmetic};
use crate::error::{Error, Result};
use crate::f2::{kernel, solve, Echelon};
use crate::form::BinaryForm;
use crate::local::{
    decide_prop, patch_nf, patch_poly, prime_support, real_image, HyperellipticCurve, LocalFn, LocalPoly, Patch, Place,
    PropInstance, Verdict, Witness,
};
use crate::nf::{NfElem, NfForm, NumberField};
use crate::place::{PlaceDescriptor, PrimePlace};
use crate::sqclass::{rational_label, square_class_group_q, SquareClassGroup};

pub const DEFAULT_DEPTH_CAP: u32 = 40;

/// Incidence vectors of consecutive root blocks of the given sizes.
pub fn block_incidence(degrees: &[usize]) -> Vec<u128> {
    let mut out = Vec::new();
    let mut off = 0;
    for &d in degrees {
        out.push(((1u128 << d) - 1) << off);
        off += d;
    }
    out
}

/// Order of the covering group: the span of the vectors, intersected with the even-weight
/// subspace, modulo the all-ones vector.
pub fn covering_group_order(incidence: &[u128], n: usize) -> u64 {
    assert!(n > 0 && n <= 128);
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut span = Echelon::new();
    for &v in incidence {
        span.insert(v & all, 0);
    }
    let mut d = span.rank();
    if incidence.iter().any(|v| (v & all).count_ones() % 2 == 1) {
        d -= 1;
    }
    if span.contains(all) {
        d -= 1;
    }
    1u64 << d
}

/// Genus of the covering curves, `#G (g - 1) + 1`, for `g >= 1`.
pub fn cover_genus(order: u64, g: u64) -> u64 {
    assert!(g >= 1, "genus at least one");
    order * (g - 1) + 1
}

/// Rational primes `p` with `iota(p)` in the candidate group, describing
/// `L(S,2) ∩ Im(iota)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TSet {
    /// Every prime belongs to `T` (no odd-degree factor).
    pub all_primes: bool,
    /// The finitely many members otherwise.
    pub support: Vec<u64>,
}

impl TSet {
    pub fn contains(&self, p: u64) -> bool {
        self.all_primes || self.support.contains(&p)
    }
}

/// How the candidate coordinates determine the factor classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentKind {
    /// `K = Q`: one independent class per factor.
    Split,
    /// `f` irreducible over `Q`, `f = c F1 F2` over `K` with the conjugates of `F1` partitioning the
    /// roots: the second class is `c * beta_1`.
    Conjugate,
}

pub struct DescentSetup {
    pub label: String,
    pub curve: HyperellipticCurve,
    pub field: Arc<NumberField>,
    pub c: Rat,
    /// Odd degrees first.
    pub factors: Vec<NfForm>,
    pub odd: usize,
    pub kind: DescentKind,
    pub s_sets: Vec<Vec<PlaceDescriptor>>,
    pub t: TSet,
    /// `K(S_j,2)` for the free components (one per factor, or just the first when conjugate).
    pub groups: Vec<SquareClassGroup>,
    pub cover_order: u64,
    offsets: Vec<usize>,
    iota: Echelon,
    rational: Vec<BinaryForm>,
}

impl std::fmt::Debug for DescentSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DescentSetup({}, {:?}, degrees {:?})", self.label, self.kind, self.degrees())
    }
}

/// Bit vector of the class of a nonzero rational in `Q(P,2)`: bit 0 for the sign, bit `i+1`
/// for the parity of `v_{P[i]}`. `None` if another prime occurs to an odd power.
pub fn rational_class(x: &Rat, primes: &[u64]) -> Option<u128> {
    if x.is_zero() {
        return None;
    }
    let mut bits = u128::from(x.is_negative());
    let mut rest = x.numer().abs() * x.denom();
    for (i, &p) in primes.iter().enumerate() {
        let v = vp_rat(x, p).expect("nonzero");
        if v.rem_euclid(2) == 1 {
            bits |= 1u128 << (i + 1);
        }
        let (_, r) = crate::arith::split_p(&rest, p);
        rest = r;
    }
    is_square_int(&rest).then_some(bits)
}

fn rational_place(p: u64) -> PlaceDescriptor {
    PlaceDescriptor { p, poly_factor: vec![0, 1], e: 1, f: 1 }
}

impl DescentSetup {
    /// Setup over `Q` from the factorization of `f` into irreducibles.
    pub fn over_rationals(label: &str, curve: HyperellipticCurve) -> Result<Self> {
        let fac = curve.f.factor_over_rationals()?;
        let mut forms = Vec::new();
        for (g, e) in &fac.factors {
            if *e != 1 {
                return Err(Error::Invalid("form is not squarefree".into()));
            }
            forms.push(g.clone());
        }
        forms.sort_by_key(|g| g.degree() % 2 == 0);
        let c = fac.content.clone();
        let odd = forms.iter().filter(|g| g.degree() % 2 == 1).count();
        let c_primes = prime_support(&c, 1 << 16)?;
        let mut s_sets = Vec::new();
        for (j, g) in forms.iter().enumerate() {
            let mut rest = BinaryForm::new(vec![Rat::one()]);
            for (k, h) in forms.iter().enumerate() {
                if k != j {
                    rest = rest.mul(h);
                }
            }
            let r = g.resultant(&rest)?;
            if r.is_zero() {
                return Err(Error::Invalid("factors share a root".into()));
            }
            let mut ps: BTreeSet<u64> = prime_support(&r, 1 << 16)?.into_iter().collect();
            ps.extend(c_primes.iter().copied());
            s_sets.push(ps.into_iter().map(rational_place).collect::<Vec<_>>());
        }
        let t = if odd == 0 {
            TSet { all_primes: true, support: Vec::new() }
        } else {
            let mut common: Option<BTreeSet<u64>> = None;
            for s in &s_sets[..odd] {
                let ps: BTreeSet<u64> = s.iter().map(|d| d.p).collect();
                common = Some(match common {
                    None => ps,
                    Some(c) => c.intersection(&ps).copied().collect(),
                });
            }
            TSet { all_primes: false, support: common.unwrap_or_default().into_iter().collect() }
        };
        let groups: Vec<SquareClassGroup> = s_sets
            .iter()
            .map(|s| square_class_group_q(&s.iter().map(|d| d.p).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let k = NumberField::rational();
        let factors = forms.iter().map(|g| NfForm::from_rational(k.clone(), g)).collect();
        let degrees: Vec<usize> = forms.iter().map(|g| g.degree()).collect();
        let cover_order = covering_group_order(&block_incidence(&degrees), curve.f.degree());
        let mut setup = DescentSetup {
            label: label.to_string(),
            curve,
            field: k,
            c,
            factors,
            odd,
            kind: DescentKind::Split,
            s_sets,
            t,
            groups,
            cover_order,
            offsets: Vec::new(),
            iota: Echelon::new(),
            rational: forms,
        };
        setup.finish()?;
        Ok(setup)
    }

    /// Setup over a number field for `f = c F1 F2` with `deg F1 * [K:Q] = deg f`, `f` irreducible
    /// over `Q`; `cover_order` is supplied by the caller.
    pub fn over_field(
        label: &str,
        curve: HyperellipticCurve,
        arith: &VerifiedArithmetic,
        c: Rat,
        factors: Vec<NfForm>,
        cover_order: u64,
    ) -> Result<Self> {
        let k = arith.field.clone();
        if !cover_order.is_power_of_two() {
            return Err(Error::Invalid(format!("covering group order {} is not a power of 2", cover_order)));
        }
        if factors.len() != 2 {
            return Err(Error::Unsupported("number-field descent needs exactly two factors".into()));
        }
        let n = k.degree();
        let (f1, f2) = (&factors[0], &factors[1]);
        if f1.degree() * n != curve.f.degree() || f1.degree() + f2.degree() != curve.f.degree() {
            return Err(Error::Invalid("factor degrees do not match the norm structure".into()));
        }
        if f1.degree() % 2 == 1 || f2.degree() % 2 == 1 {
            return Err(Error::Unsupported("odd-degree factors over a number field".into()));
        }
        let fk = NfForm::from_rational(k.clone(), &curve.f);
        if f1.mul(f2).scale(&c) != fk {
            return Err(Error::Verification("c * F1 * F2 != f".into()));
        }
        if curve.f.factor_over_rationals()?.factors.len() != 1 {
            return Err(Error::Invalid("f must be irreducible over Q".into()));
        }
        // F1 is not defined over Q (K has prime degree, so no intermediate field either).
        let lead = f1.coeffs.iter().rev().find(|a| !a.is_zero()).expect("nonzero form");
        let inv = k.inv(lead)?;
        if f1.coeffs.iter().all(|a| k.mul(a, &inv).as_rational().is_some()) && n > 1 {
            return Err(Error::Invalid("F1 is defined over Q".into()));
        }
        let r = f1.resultant(f2)?;
        if r.is_zero() {
            return Err(Error::Invalid("factors share a root".into()));
        }
        let mut ps: BTreeSet<u64> = prime_support(&k.norm(&r), 1 << 16)?.into_iter().collect();
        ps.extend(prime_support(&c, 1 << 16)?);
        let cf = k.from_rat(&c);
        let mut s = Vec::new();
        for p in ps {
            for pl in k.primes_above(p)? {
                let vr = pl.valuation(&r).expect("nonzero");
                let vc = pl.valuation(&cf).expect("nonzero");
                if vr != 0 || vc != 0 {
                    s.push(pl.descriptor());
                }
            }
        }
        s.sort();
        let group = square_class_group_k(arith, &s)?;
        let mut setup = DescentSetup {
            label: label.to_string(),
            curve,
            field: k,
            c,
            factors,
            odd: 0,
            kind: DescentKind::Conjugate,
            s_sets: vec![s.clone(), s],
            t: TSet { all_primes: true, support: Vec::new() },
            groups: vec![group],
            cover_order,
            offsets: Vec::new(),
            iota: Echelon::new(),
            rational: Vec::new(),
        };
        setup.finish()?;
        Ok(setup)
    }

    fn finish(&mut self) -> Result<()> {
        let mut off = 0;
        self.offsets.clear();
        for g in &self.groups {
            self.offsets.push(off);
            off += g.dim();
        }
        if off > 128 {
            return Err(Error::Unsupported("candidate group exceeds 128 bits".into()));
        }
        self.iota = Echelon::new();
        if self.kind == DescentKind::Split && self.odd > 0 {
            let mut gens = vec![-BigInt::one()];
            gens.extend(self.t.support.iter().map(|&p| BigInt::from(p)));
            for a in gens {
                let x = self.field.from_int(&a);
                let mut v = 0u128;
                for j in 0..self.odd {
                    let m = self.groups[j]
                        .dlog(&x)
                        .ok_or_else(|| Error::Invalid(format!("iota({}) outside K(S_{},2)", a, j + 1)))?;
                    v |= m << self.offsets[j];
                }
                self.iota.insert(v, 0);
            }
        }
        Ok(())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|g| g.degree()).collect()
    }

    pub fn total_bits(&self) -> usize {
        self.groups.iter().map(|g| g.dim()).sum()
    }

    /// Mask of component `j` inside a candidate.
    fn component(&self, mask: u128, j: usize) -> u128 {
        let d = self.groups[j].dim();
        
        if d == 0 { 0 } else { (mask >> self.offsets[j]) & ((1u128 << d) - 1) }
    }

    /// The factor classes `beta_1, ..., beta_r` of a candidate.
    pub fn classes(&self, mask: u128) -> Vec<NfElem> {
        match self.kind {
            DescentKind::Split => {
                (0..self.groups.len()).map(|j| self.groups[j].element(self.component(mask, j))).collect()
            }
            DescentKind::Conjugate => {
                let b1 = self.groups[0].element(self.component(mask, 0));
                let b2 = self.field.scale(&b1, &self.c);
                vec![b1, b2]
            }
        }
    }

    /// Printable class labels: squarefree integers over `Q`, generator products otherwise.
    pub fn labels(&self, mask: u128) -> Vec<String> {
        match self.kind {
            DescentKind::Split => self.classes(mask).iter().map(rational_label).collect(),
            DescentKind::Conjugate => {
                let m = self.component(mask, 0);
                let b1 = gen_word(m);
                let cl = if self.c.is_one() { b1.clone() } else { format!("{}*{}", fmt_rat(&self.c), b1) };
                vec![b1, cl]
            }
        }
    }

    /// Canonical representative modulo `iota(Q(T,2))`.
    pub fn canonical(&self, mask: u128) -> u128 {
        self.iota.canonical(mask)
    }

    pub fn iota_rank(&self) -> usize {
        self.iota.rank()
    }

    /// Coordinates of a tuple of factor classes, if it lies in the candidate group.
    pub fn dlog(&self, classes: &[NfElem]) -> Option<u128> {
        match self.kind {
            DescentKind::Split => {
                let mut v = 0u128;
                for (j, x) in classes.iter().enumerate() {
                    v |= self.groups[j].dlog(x)? << self.offsets[j];
                }
                Some(v)
            }
            DescentKind::Conjugate => self.groups[0].dlog(&classes[0]),
        }
    }

    /// Class of `N(beta)` (norm condition) for each candidate bit, over the given primes.
    fn norm_classes(&self, primes: &[u64]) -> Result<Vec<u128>> {
        let mut out = Vec::new();
        for g in &self.groups {
            for x in &g.gens {
                let nx = self.field.norm(x);
                out.push(
                    rational_class(&nx, primes)
                        .ok_or_else(|| Error::Invalid("generator norm outside the prime set".into()))?,
                );
            }
        }
        Ok(out)
    }

    fn norm_primes(&self) -> Result<Vec<u64>> {
        let mut ps: BTreeSet<u64> = prime_support(&self.c, 1 << 16)?.into_iter().collect();
        for g in &self.groups {
            for x in &g.gens {
                ps.extend(prime_support(&self.field.norm(x), 1 << 16)?);
            }
        }
        Ok(ps.into_iter().collect())
    }

    /// `c * prod N(beta_j)` is a rational square.
    pub fn norm_condition(&self, mask: u128) -> bool {
        let mut acc = self.c.clone();
        match self.kind {
            DescentKind::Split => {
                for x in self.classes(mask) {
                    acc *= self.field.norm(&x);
                }
            }
            DescentKind::Conjugate => acc *= self.field.norm(&self.classes(mask)[0]),
        }
        crate::arith::is_square_rat(&acc)
    }

    /// Default place set: infinity, the primes below 100 and the primes dividing `c` or the
    /// leading coefficient of `f`.
    pub fn default_places(&self) -> Result<Vec<Place>> {
        self.places_below(100)
    }

    /// Infinity, the primes below `bound`, and the primes dividing `c` or the leading coefficient.
    pub fn places_below(&self, bound: u64) -> Result<Vec<Place>> {
        let mut ps: BTreeSet<u64> = primes_below(bound).into_iter().collect();
        ps.extend(prime_support(&self.c, 1 << 16)?);
        if let Some(lc) = self.curve.f.coeffs().iter().rev().find(|a| !a.is_zero()) {
            ps.extend(prime_support(lc, 1 << 16)?);
        }
        let mut out = vec![Place::Infinity];
        out.extend(ps.into_iter().map(Place::Prime));
        Ok(out)
    }
}

fn gen_word(m: u128) -> String {
    if m == 0 {
        return "1".into();
    }
    (0..128).filter(|i| m >> i & 1 == 1).map(|i| format!("g{}", i)).collect::<Vec<_>>().join("*")
}

/// Primes of `S` sets, `T` and the candidate list, as computed for a setup.
pub fn compute_s_sets(setup: &DescentSetup) -> Vec<Vec<PlaceDescriptor>> {
    setup.s_sets.clone()
}

pub fn compute_t(setup: &DescentSetup) -> TSet {
    setup.t.clone()
}

/// All candidates modulo `iota(Q(T,2))` satisfying the norm condition, as canonical masks in
/// increasing order.
pub fn enumerate_candidates(setup: &DescentSetup) -> Result<Vec<u128>> {
    let primes = setup.norm_primes()?;
    let phi = setup.norm_classes(&primes)?;
    let target = rational_class(&setup.c, &primes).expect("c is supported on its own primes");
    let Some(p0) = solve(&phi, target) else { return Ok(Vec::new()) };
    let p0 = setup.canonical(p0);
    let mut basis = Echelon::new();
    let mut dirs = Vec::new();
    for k in kernel(&phi) {
        let r = setup.canonical(k);
        if r != 0 && basis.insert(r, 0).is_none() {
            dirs.push(r);
        }
    }
    if dirs.len() > 26 {
        return Err(Error::Unsupported(format!("2^{} candidates", dirs.len())));
    }
    let mut out = Vec::with_capacity(1 << dirs.len());
    for sub in 0u64..(1u64 << dirs.len()) {
        let mut v = p0;
        for (i, d) in dirs.iter().enumerate() {
            if sub >> i & 1 == 1 {
                v ^= d;
            }
        }
        out.push(setup.canonical(v));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Outcome of the local condition at one place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalOutcome {
    pub place: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl LocalOutcome {
    pub fn holds(&self) -> bool {
        self.verdict != Verdict::Insoluble
    }
}

/// Representatives of `Q_p^x / (Q_p^x)^2`.
pub fn twist_representatives(p: u64) -> Vec<Int> {
    if p == 2 {
        [1i64, -1, 2, -2, 5, -5, 10, -10].iter().map(|&a| BigInt::from(a)).collect()
    } else {
        let u = least_nonresidue(p);
        [1, u, p, u * p].iter().map(|&a| BigInt::from(a)).collect()
    }
}

fn twist_basis(p: u64) -> Vec<Int> {
    if p == 2 {
        vec![BigInt::from(-1), BigInt::from(2), BigInt::from(5)]
    } else {
        vec![BigInt::from(least_nonresidue(p)), BigInt::from(p)]
    }
}

/// Decides whether the candidate lies in the local image at a finite prime.
pub fn local_condition(setup: &DescentSetup, mask: u128, p: u64, depth_cap: u32) -> Result<LocalOutcome> {
    let betas = setup.classes(mask);
    let places: Vec<Arc<PrimePlace>> = match setup.kind {
        DescentKind::Split => Vec::new(),
        DescentKind::Conjugate => setup.field.primes_above(p)?.into_iter().map(Arc::new).collect(),
    };
    let twists = if setup.odd > 0 { twist_representatives(p) } else { vec![BigInt::one()] };
    let mut verdict = Verdict::Insoluble;
    for a in &twists {
        for patch in [Patch::Affine, Patch::Infinity] {
            let f = patch_poly(&setup.curve.f, patch, p);
            let mut aux = Vec::new();
            match setup.kind {
                DescentKind::Split => {
                    for (j, g) in setup.rational.iter().enumerate() {
                        let mut s = betas[j].as_rational().expect("rational class");
                        if j < setup.odd {
                            s *= Rat::from_integer(a.clone());
                        }
                        aux.push(LocalFn::rational(patch_poly(&g.scale(&s), patch, p), p));
                    }
                }
                DescentKind::Conjugate => {
                    for (j, g) in setup.factors.iter().enumerate() {
                        let k = &setup.field;
                        let scaled = NfForm::new(k.clone(), g.coeffs.iter().map(|c| k.mul(c, &betas[j])).collect());
                        let coeffs = patch_nf(&scaled, patch, p);
                        for pl in &places {
                            aux.push(LocalFn::Nf(LocalPoly::new(pl.clone(), &coeffs, depth_cap)?));
                        }
                    }
                }
            }
            let inst = PropInstance::new(p, f, aux);
            let r = decide_prop(&inst, depth_cap);
            if r.verdict == Verdict::Soluble {
                let mut w = r.witness.expect("soluble has a witness");
                w.patch = patch.name().into();
                if setup.odd > 0 {
                    w.twist = Some(a.to_string());
                }
                return Ok(LocalOutcome { place: p.to_string(), verdict: Verdict::Soluble, witness: Some(w) });
            }
            verdict = verdict.or(r.verdict);
        }
    }
    Ok(LocalOutcome { place: p.to_string(), verdict, witness: None })
}

/// Local class data of the candidate group at a finite prime.
struct LocalKeys {
    gen_vec: Vec<u128>,
    twist: Echelon,
}

impl LocalKeys {
    fn new(setup: &DescentSetup, p: u64) -> Result<Self> {
        let places: Vec<PrimePlace> = setup.field.primes_above(p)?;
        let mut gen_vec = Vec::new();
        let widths: Vec<usize> = places.iter().map(|pl| pl.class_dim()).collect();
        let per_comp: usize = widths.iter().sum();
        let ncomp = setup.groups.len();
        if per_comp * ncomp > 128 {
            return Err(Error::Unsupported("local class vector exceeds 128 bits".into()));
        }
        let class_vec = |x: &NfElem, j: usize| -> u128 {
            let mut v = 0u128;
            let mut off = j * per_comp;
            for (pl, w) in places.iter().zip(&widths) {
                v |= pl.square_class(x) << off;
                off += w;
            }
            v
        };
        for (j, g) in setup.groups.iter().enumerate() {
            for x in &g.gens {
                gen_vec.push(class_vec(x, j));
            }
        }
        let mut twist = Echelon::new();
        if setup.odd > 0 {
            for a in twist_basis(p) {
                let x = setup.field.from_int(&a);
                let mut v = 0u128;
                for j in 0..setup.odd {
                    v |= class_vec(&x, j);
                }
                twist.insert(v, 0);
            }
        }
        Ok(LocalKeys { gen_vec, twist })
    }

    fn key(&self, mask: u128) -> u128 {
        let mut v = 0u128;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            v ^= self.gen_vec[i];
            m &= m - 1;
        }
        self.twist.canonical(v)
    }
}

/// Real image check: sign patterns of the classes against those of the factor values.
struct RealKeys {
    gen_sign: Vec<u128>,
    allowed: BTreeSet<u128>,
}

impl RealKeys {
    fn new(setup: &DescentSetup) -> Self {
        let k = &setup.field;
        let r1 = k.real_places().max(1);
        let mut gen_sign = Vec::new();
        for (j, g) in setup.groups.iter().enumerate() {
            for x in &g.gens {
                let mut v = 0u128;
                for (e, s) in k.real_signs(x).into_iter().enumerate() {
                    if s < 0 {
                        v |= 1u128 << (j * r1 + e);
                    }
                }
                gen_sign.push(v);
            }
        }
        let forms: Vec<NfForm> = match setup.kind {
            DescentKind::Split => setup.factors.clone(),
            DescentKind::Conjugate => vec![setup.factors[0].clone()],
        };
        let mut odd_mask = 0u128;
        for j in 0..setup.odd {
            for e in 0..r1 {
                odd_mask |= 1u128 << (j * r1 + e);
            }
        }
        let mut allowed = BTreeSet::new();
        for t in real_image(&setup.curve.f, &forms) {
            let mut v = 0u128;
            for (i, s) in t.into_iter().enumerate() {
                if s < 0 {
                    v |= 1u128 << i;
                }
            }
            allowed.insert(v);
            if setup.odd > 0 {
                allowed.insert(v ^ odd_mask);
            }
        }
        RealKeys { gen_sign, allowed }
    }

    fn holds(&self, mask: u128) -> bool {
        let mut v = 0u128;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            v ^= self.gen_sign[i];
            m &= m - 1;
        }
        self.allowed.contains(&v)
    }
}

/// The local condition at infinity for one candidate.
pub fn real_condition(setup: &DescentSetup, mask: u128) -> bool {
    RealKeys::new(setup).holds(mask)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStatus {
    Survives,
    /// Never refuted, but some place was left undecided.
    Undecided { places: Vec<String> },
    FailedAt { failed_at: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlaceStats {
    pub place: String,
    pub tested: usize,
    pub local_keys: usize,
    pub eliminated: usize,
    pub undecided_keys: usize,
    #[serde(skip)]
    pub seconds: f64,
}

pub struct FakeSelmerSet {
    pub label: String,
    pub field: String,
    pub places: Vec<Place>,
    /// Order in which places were applied; the audit trail refers to the first failure in it.
    pub order: Vec<Place>,
    pub candidates: Vec<u128>,
    pub status: Vec<CandidateStatus>,
    pub stats: Vec<PlaceStats>,
}

impl FakeSelmerSet {
    /// Candidates never refuted (including undecided ones).
    pub fn survivors(&self) -> Vec<u128> {
        self.candidates
            .iter()
            .zip(&self.status)
            .filter(|(_, s)| !matches!(s, CandidateStatus::FailedAt { .. }))
            .map(|(m, _)| *m)
            .collect()
    }

    pub fn undecided(&self) -> usize {
        self.status.iter().filter(|s| matches!(s, CandidateStatus::Undecided { .. })).count()
    }

    /// Emptiness with every elimination definite; implies the curve has no rational points.
    pub fn certified_empty(&self) -> bool {
        self.survivors().is_empty()
    }

    pub fn contains(&self, mask: u128) -> bool {
        self.survivors().contains(&mask)
    }

    /// JSON report; rejected candidates are listed individually up to `audit_limit`.
    pub fn to_json(&self, setup: &DescentSetup, audit_limit: usize) -> serde_json::Value {
        let mut cands = Vec::new();
        let mut rejected = Vec::new();
        for (m, s) in self.candidates.iter().zip(&self.status) {
            let entry = |status: serde_json::Value| serde_json::json!({"classes": setup.labels(*m), "status": status});
            match s {
                CandidateStatus::Survives => cands.push(entry(serde_json::json!("survives"))),
                CandidateStatus::Undecided { places } => {
                    cands.push(entry(serde_json::json!({"undecided": places})))
                }
                CandidateStatus::FailedAt { failed_at } => {
                    if rejected.len() < audit_limit {
                        rejected.push(entry(serde_json::json!({"failed_at": failed_at})));
                    }
                }
            }
        }
        let n_rej = self.status.iter().filter(|s| matches!(s, CandidateStatus::FailedAt { .. })).count();
        let mut by_place: BTreeMap<String, usize> = BTreeMap::new();
        for s in &self.status {
            if let CandidateStatus::FailedAt { failed_at } = s {
                *by_place.entry(failed_at.clone()).or_default() += 1;
            }
        }
        let gens: Vec<Vec<Vec<String>>> =
            setup.groups.iter().map(|g| g.gens.iter().map(|x| x.to_strings()).collect()).collect();
        serde_json::json!({
            "curve": self.label,
            "field": self.field,
            "A": self.places.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "order": self.order.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "degrees": setup.degrees(),
            "c": fmt_rat(&setup.c),
            "cover_group_order": setup.cover_order,
            "generators": gens,
            "candidates": cands,
            "rejected": {"count": n_rej, "by_place": by_place, "listed": rejected},
            "stats": self.stats,
        })
    }
}

/// Evaluation order: infinity, good odd primes, bad odd primes, then 2.
fn evaluation_order(setup: &DescentSetup, places: &[Place]) -> Vec<Place> {
    let bad: BTreeSet<u64> = setup.s_sets.iter().flatten().map(|d| d.p).collect();
    let mut v: Vec<Place> = places.to_vec();
    v.sort_by_key(|pl| match pl {
        Place::Infinity => (0, 0),
        Place::Prime(2) => (3, 2),
        Place::Prime(p) if bad.contains(p) => (2, *p),
        Place::Prime(p) => (1, *p),
    });
    v.dedup();
    v
}

/// Candidates filtered by the local conditions at every place of `places`.
pub fn fake_selmer_set(setup: &DescentSetup, places: &[Place], depth_cap: u32) -> Result<FakeSelmerSet> {
    let candidates = enumerate_candidates(setup)?;
    sieve_candidates(setup, candidates, places, depth_cap)
}

/// Local sieve on a given candidate list.
pub fn sieve_candidates(
    setup: &DescentSetup,
    candidates: Vec<u128>,
    places: &[Place],
    depth_cap: u32,
) -> Result<FakeSelmerSet> {
    let order = evaluation_order(setup, places);
    let mut status = vec![CandidateStatus::Survives; candidates.len()];
    let mut stats = Vec::new();
    for place in &order {
        let t0 = std::time::Instant::now();
        let live: Vec<usize> =
            (0..candidates.len()).filter(|&i| !matches!(status[i], CandidateStatus::FailedAt { .. })).collect();
        if live.is_empty() {
            break;
        }
        let name = place.to_string();
        let (keys, eliminated, undecided_keys) = match place {
            Place::Infinity => {
                let rk = RealKeys::new(setup);
                let mut n = 0;
                for &i in &live {
                    if !rk.holds(candidates[i]) {
                        status[i] = CandidateStatus::FailedAt { failed_at: name.clone() };
                        n += 1;
                    }
                }
                (rk.allowed.len(), n, 0)
            }
            Place::Prime(p) => {
                let lk = LocalKeys::new(setup, *p)?;
                let mut reps: HashMap<u128, u128> = HashMap::new();
                let live_keys: Vec<u128> = live.iter().map(|&i| lk.key(candidates[i])).collect();
                for (&i, &k) in live.iter().zip(&live_keys) {
                    reps.entry(k).or_insert(candidates[i]);
                }
                let mut todo: Vec<(u128, u128)> = reps.into_iter().collect();
                todo.sort_unstable();
                let verdicts: Vec<(u128, Result<LocalOutcome>)> = todo
                    .par_iter()
                    .map(|&(k, m)| (k, local_condition(setup, m, *p, depth_cap)))
                    .collect();
                let mut table: HashMap<u128, Verdict> = HashMap::new();
                for (k, r) in verdicts {
                    table.insert(k, r?.verdict);
                }
                let mut n = 0;
                for (&i, k) in live.iter().zip(&live_keys) {
                    match table[k] {
                        Verdict::Soluble => {}
                        Verdict::Insoluble => {
                            status[i] = CandidateStatus::FailedAt { failed_at: name.clone() };
                            n += 1;
                        }
                        Verdict::DepthExceeded => match &mut status[i] {
                            CandidateStatus::Undecided { places } => places.push(name.clone()),
                            s => *s = CandidateStatus::Undecided { places: vec![name.clone()] },
                        },
                    }
                }
                let und = table.values().filter(|v| **v == Verdict::DepthExceeded).count();
                (table.len(), n, und)
            }
        };
        stats.push(PlaceStats {
            place: name,
            tested: live.len(),
            local_keys: keys,
            eliminated,
            undecided_keys,
            seconds: t0.elapsed().as_secs_f64(),
        });
    }
    Ok(FakeSelmerSet {
        label: setup.label.clone(),
        field: setup.field.name.clone(),
        places: places.to_vec(),
        order,
        candidates,
        status,
        stats,
    })
}

/// Image of a rational point under the descent map, as a canonical candidate.
pub fn delta_map(setup: &DescentSetup, u0: &Int, v0: &Int, y0: &Int) -> Result<u128> {
    let (u, v) = (Rat::from_integer(u0.clone()), Rat::from_integer(v0.clone()));
    let fv = setup.curve.f.eval(&u, &v);
    if fv != Rat::from_integer(y0 * y0) {
        return Err(Error::Invalid(format!("({} : {} : {}) is not on the curve", u0, v0, y0)));
    }
    let k = &setup.field;
    let mut vals: Vec<NfElem> = setup.factors.iter().map(|g| g.eval(&u, &v)).collect();
    let zeros: Vec<usize> = (0..vals.len()).filter(|&j| vals[j].is_zero()).collect();
    match zeros.as_slice() {
        [] => {}
        [z] => {
            // The vanishing factor takes the class forced by c * prod F_j = y^2 near the point.
            let mut acc = k.from_rat(&setup.c);
            for (j, x) in vals.iter().enumerate() {
                if j != *z {
                    acc = k.mul(&acc, x);
                }
            }
            vals[*z] = acc;
        }
        _ => return Err(Error::Invalid("two factors vanish at the point".into())),
    }
    let m = setup
        .dlog(&vals)
        .ok_or_else(|| Error::Invalid("point image outside the candidate group".into()))?;
    Ok(setup.canonical(m))
}

/// Factorization of `f_i` over a quintic field, as shipped in `data/factorizations`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationFile {
    pub index: usize,
    pub field: String,
    pub c: String,
    pub factors: Vec<Vec<Vec<String>>>,
    pub cover_group_order: u64,
}

pub fn factorization_path(data_dir: &Path, i: usize) -> std::path::PathBuf {
    data_dir.join("factorizations").join(format!("f{}.json", i))
}

pub fn arithmetic_path(data_dir: &Path, field: &str) -> std::path::PathBuf {
    data_dir.join("arithmetic_data").join(format!("{}.json", field))
}

fn read_required(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("missing arithmetic data: {} ({})", path.display(), e)))
}

/// Loads and verifies the shipped data for a number-field descent on `curve`.
pub fn setup_from_data(label: &str, curve: HyperellipticCurve, data_dir: &Path, i: usize) -> Result<DescentSetup> {
    let fpath = factorization_path(data_dir, i);
    let ff: FactorizationFile = serde_json::from_str(&read_required(&fpath)?)?;
    let apath = arithmetic_path(data_dir, &ff.field);
    let ad: ArithmeticDataFile = serde_json::from_str(&read_required(&apath)?)?;
    let arith = verify_arithmetic_data(&ad)?;
    let k = arith.field.clone();
    let c = parse_rat(&ff.c).ok_or_else(|| Error::Parse(format!("{}: bad c", fpath.display())))?;
    let factors = ff
        .factors
        .iter()
        .map(|cs| -> Result<NfForm> {
            Ok(NfForm::new(k.clone(), cs.iter().map(|a| k.parse_elem(a)).collect::<Result<_>>()?))
        })
        .collect::<Result<Vec<_>>>()?;
    DescentSetup::over_field(label, curve, &arith, c, factors, ff.cover_group_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn covering_orders() {
        assert_eq!(covering_group_order(&block_incidence(&[30]), 30), 1);
        assert_eq!(covering_group_order(&block_incidence(&[10, 20]), 30), 2);
        assert_eq!(cover_genus(2, 14), 27);
        assert_eq!(cover_genus(16, 14), 209);
        assert_eq!(cover_genus(1, 7), 7);
    }

    #[test]
    fn rational_classes() {
        let ps = [2, 3, 5];
        assert_eq!(rational_class(&rat(-12), &ps), Some(0b0101));
        assert_eq!(rational_class(&rat(49), &ps), Some(0));
        assert_eq!(rational_class(&rat(7), &ps), None);
    }

    #[test]
    fn small_descent() {
        // y^2 = (u^2 + v^2)(u^2 - 2 v^2)(u^2 + 2 v^2): three even factors over Q.
        let f = BinaryForm::from_ints(&[1, 0, 1]).mul(&BinaryForm::from_ints(&[-2, 0, 1])).mul(&BinaryForm::from_ints(&[2, 0, 1]));
        let s = DescentSetup::over_rationals("t", HyperellipticCurve::new(f).unwrap()).unwrap();
        assert_eq!(s.odd, 0);
        assert!(s.t.all_primes);
        let cands = enumerate_candidates(&s).unwrap();
        assert!(cands.iter().all(|&m| s.norm_condition(m)));
        let set = fake_selmer_set(&s, &s.default_places().unwrap(), 20).unwrap();
        // (1 : 0 : 1) is a point, so its image survives.
        let d = delta_map(&s, &int(1), &int(0), &int(1)).unwrap();
        assert!(set.contains(d));
    }
}

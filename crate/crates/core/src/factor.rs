//! Factorization of integer and rational polynomials (Zassenhaus).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_prime_u64, pow_int, Int, Rat};
use crate::fp::{factor_squarefree, FpPoly};
use crate::hensel::multifactor_lift;
use crate::poly::{QPoly, ZPoly};

/// Irreducible factorization of a rational polynomial:
/// `f = content * prod g_i^{e_i}` with `g_i` primitive, positive leading coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub content: Rat,
    pub factors: Vec<(ZPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> QPoly {
        let mut acc = QPoly::constant(self.content.clone());
        for (g, e) in &self.factors {
            acc = acc.mul(&g.to_q().pow(*e));
        }
        acc
    }
}

/// Factors a nonzero polynomial over Q.
pub fn factor_q(f: &QPoly) -> Factorization {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let (content, _) = f.primitive_with_content();
    let mut factors = Vec::new();
    for (e, part) in f.squarefree_decomposition() {
        let (_, prim) = part.primitive_with_content();
        for g in factor_squarefree_z(&prim) {
            factors.push((g, e));
        }
    }
    sort_factors(&mut factors);
    Factorization { content, factors }
}

pub fn factor_z(f: &ZPoly) -> Factorization {
    factor_q(&f.to_q())
}

/// Deterministic order: by degree, then lexicographically on ascending coefficients.
pub fn sort_factors(fs: &mut [(ZPoly, u32)]) {
    fs.sort_by(|a, b| {
        a.0.deg()
            .cmp(&b.0.deg())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
            .then_with(|| a.1.cmp(&b.1))
    });
}

struct PrimeChoice {
    p: u64,
    factors: Vec<FpPoly>,
}

fn good_primes(f: &ZPoly, want: usize) -> Vec<PrimeChoice> {
    let mut out = Vec::new();
    let lc = f.lc();
    let mut p = 2u64;
    while out.len() < want {
        p += 1;
        if !is_prime_u64(p) || (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fb = FpPoly::from_zpoly(f, p);
        if fb.gcd(&fb.derivative(p), p).deg() != 0 {
            continue;
        }
        let factors = factor_squarefree(&fb, p);
        out.push(PrimeChoice { p, factors });
        if out.last().unwrap().factors.len() == 1 {
            break;
        }
    }
    out
}

/// Degrees of possible factors compatible with every modular factorization.
fn compatible_degrees(choices: &[PrimeChoice], n: usize) -> Vec<bool> {
    let mut ok = vec![true; n + 1];
    for c in choices {
        let mut reach = vec![false; n + 1];
        reach[0] = true;
        for g in &c.factors {
            let d = g.deg();
            for s in (d..=n).rev() {
                if reach[s - d] {
                    reach[s] = true;
                }
            }
        }
        for s in 0..=n {
            ok[s] &= reach[s];
        }
    }
    ok
}

/// Irreducible factors of a primitive squarefree integer polynomial.
pub fn factor_squarefree_z(f: &ZPoly) -> Vec<ZPoly> {
    let f = f.primitive_part();
    let n = f.deg();
    if n <= 1 {
        return if n == 1 { vec![f] } else { Vec::new() };
    }
    let choices = good_primes(&f, 6);
    let degs = compatible_degrees(&choices, n);
    if (1..n).all(|d| !degs[d]) {
        return vec![f];
    }
    let best = choices.iter().min_by_key(|c| c.factors.len()).unwrap();
    let p = best.p;

    // Factor coefficient bound: lc * 2^n * ||f||_2.
    let norm = f.norm_sq().sqrt() + 1u32;
    let lc_abs = f.lc().abs();
    let bound = &lc_abs * (BigInt::one() << n) * norm;
    let target = bound * 2u32 * &lc_abs;
    let mut k = 1u32;
    while pow_int(p, k) <= target {
        k += 1;
    }
    let m = pow_int(p, k);
    let lifted = multifactor_lift(&f, &best.factors, p, k);
    recombine(f, lifted, &m, &degs)
}

fn recombine(f: ZPoly, mut pool: Vec<ZPoly>, m: &Int, degs: &[bool]) -> Vec<ZPoly> {
    let mut out = Vec::new();
    let mut rest = f;
    let mut s = 1;
    'outer: while 2 * s <= pool.len() {
        let r = pool.len();
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            let d: usize = idx.iter().map(|&i| pool[i].deg()).sum();
            if degs.get(d).copied().unwrap_or(true) {
                let lc = rest.lc();
                let mut g = ZPoly::constant(lc.clone());
                for &i in &idx {
                    g = g.mul(&pool[i]).symmetric_mod(m);
                }
                let g = g.primitive_part();
                if let Some(q) = rest.div_exact(&g) {
                    out.push(g);
                    rest = q.primitive_part();
                    let mut keep = Vec::new();
                    for (i, h) in pool.into_iter().enumerate() {
                        if !idx.contains(&i) {
                            keep.push(h);
                        }
                    }
                    pool = keep;
                    continue 'outer;
                }
            }
            // Next combination of size s from r.
            let mut i = s;
            loop {
                if i == 0 {
                    s += 1;
                    continue 'outer;
                }
                i -= 1;
                if idx[i] < r - s + i {
                    idx[i] += 1;
                    for j in i + 1..s {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
    if rest.deg() > 0 {
        out.push(rest);
    }
    out
}

/// Irreducibility test over Q for a polynomial of positive degree.
pub fn is_irreducible(f: &QPoly) -> bool {
    let fac = factor_q(f);
    fac.factors.len() == 1 && fac.factors[0].1 == 1
}

/// Rational roots of a nonzero polynomial.
pub fn rational_roots(f: &QPoly) -> Vec<Rat> {
    factor_q(f)
        .factors
        .iter()
        .filter(|(g, _)| g.deg() == 1)
        .map(|(g, _)| Rat::new(-g.coeff(0), g.coeff(1)))
        .collect()
}

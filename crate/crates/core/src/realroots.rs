//! Exact real-root isolation by Sturm sequences and rational bisection.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{sign_of, Rat};
use crate::poly::QPoly;

/// A real root either known exactly or isolated in an open interval `(lo, hi)`
/// containing no other root.
#[derive(Clone, Debug, PartialEq)]
pub enum RealRoot {
    Exact(Rat),
    Interval(Rat, Rat),
}

impl RealRoot {
    pub fn lo(&self) -> &Rat {
        match self {
            RealRoot::Exact(r) => r,
            RealRoot::Interval(a, _) => a,
        }
    }

    pub fn hi(&self) -> &Rat {
        match self {
            RealRoot::Exact(r) => r,
            RealRoot::Interval(_, b) => b,
        }
    }
}

pub fn sign(x: &Rat) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm sequence of a polynomial, stored as primitive integer polynomials.
pub struct Sturm {
    chain: Vec<Vec<BigInt>>,
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for c in v.iter() {
        g = g.gcd(c);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() {
        for c in v.iter_mut() {
            *c = &*c / &g;
        }
    }
}

/// Pseudo-remainder of `a` by `b`, scaled by a positive constant.
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    let ab = lb.abs();
    let neg = lb.is_negative();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let k = dr - db;
        for c in r.iter_mut() {
            *c *= &ab;
        }
        for (i, bc) in b.iter().enumerate() {
            let t = &lr * bc;
            if neg {
                r[i + k] += t;
            } else {
                r[i + k] -= t;
            }
        }
        trim(&mut r);
        make_primitive(&mut r);
    }
    r
}

/// Sign of `f(a/b)` for `b > 0`, via the homogenized integer value.
fn sign_hom(f: &[BigInt], a: &BigInt, b: &BigInt) -> i32 {
    let mut acc = BigInt::zero();
    let mut bp = BigInt::one();
    for c in f.iter().rev() {
        acc = acc * a + c * &bp;
        bp *= b;
    }
    sign_of(&acc)
}

fn sign_rat(f: &[BigInt], x: &Rat) -> i32 {
    sign_hom(f, x.numer(), x.denom())
}

fn int_coeffs(f: &QPoly) -> Vec<BigInt> {
    let (_, z) = f.primitive_with_content();
    let mut v = z.coeffs().to_vec();
    trim(&mut v);
    v
}

fn chain_of(f: Vec<BigInt>) -> Vec<Vec<BigInt>> {
    let df: Vec<BigInt> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let mut chain = vec![f, df];
    while chain.last().unwrap().len() > 1 {
        let n = chain.len();
        let mut r = prem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        for c in r.iter_mut() {
            *c = -&*c;
        }
        chain.push(r);
    }
    chain
}

impl Sturm {
    pub fn new(f: &QPoly) -> Self {
        Sturm { chain: chain_of(int_coeffs(f)) }
    }

    fn variations_at(&self, x: &Rat) -> usize {
        let mut count = 0;
        let mut last = 0;
        for p in &self.chain {
            let s = sign_rat(p, x);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct roots in `(a, b]`.
    pub fn count(&self, a: &Rat, b: &Rat) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    fn vanishes_at(&self, x: &Rat) -> bool {
        sign_rat(&self.chain[0], x) == 0
    }
}

/// Power-of-two bound on the absolute values of the roots.
pub fn root_bound(f: &QPoly) -> Rat {
    let z = int_coeffs(f);
    let n = z.len() - 1;
    let ln = z[n].bits() as i64;
    let mut k = 0i64;
    for (i, c) in z[..n].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = c.bits() as i64 - ln + 1;
        let d = (n - i) as i64;
        k = k.max(e.div_euclid(d) + i64::from(e.rem_euclid(d) != 0));
    }
    Rat::from_integer(BigInt::one() << (k + 1) as usize)
}

/// Isolates all real roots of a nonzero polynomial of positive degree, in increasing order.
pub fn isolate_real_roots(f: &QPoly) -> Vec<RealRoot> {
    if f.deg() == 0 {
        return Vec::new();
    }
    let mut st = Sturm::new(f);
    // Pass to the squarefree part so the Sturm count is of distinct roots.
    let g = st.chain.last().unwrap();
    if g.len() > 1 {
        let gq = QPoly::new(g.iter().map(|c| Rat::from_integer(c.clone())).collect());
        st = Sturm::new(&f.divrem(&gq).0);
    }
    let sf = QPoly::new(st.chain[0].iter().map(|c| Rat::from_integer(c.clone())).collect());
    let b = root_bound(&sf);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = st.count(&lo, &hi);
        if n == 0 {
            continue;
        }
        if st.vanishes_at(&hi) {
            if n == 1 {
                out.push(RealRoot::Exact(hi.clone()));
                continue;
            }
            // The exact root is rediscovered as an endpoint of the right half.
            let mid = (&lo + &hi) / Rat::from_integer(BigInt::from(2));
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
            continue;
        }
        if n == 1 {
            out.push(RealRoot::Interval(lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / Rat::from_integer(BigInt::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| (a.lo(), a.hi()).cmp(&(b.lo(), b.hi())));
    // Refine until consecutive roots are separated by a gap.
    let mut res: Vec<RealRoot> = Vec::with_capacity(out.len());
    for r in out {
        let mut r = match r {
            RealRoot::Interval(lo, hi) => shrink(&st, lo, hi, 4),
            e => e,
        };
        while let Some(prev) = res.last() {
            if prev.hi() < r.lo() {
                break;
            }
            r = match r {
                RealRoot::Interval(lo, hi) => shrink(&st, lo, hi, 1),
                e => e,
            };
        }
        res.push(r);
    }
    res
}

fn shrink(st: &Sturm, lo: Rat, hi: Rat, steps: usize) -> RealRoot {
    let (lo, hi) = tighten(st, lo, hi, steps);
    if lo == hi {
        RealRoot::Exact(lo)
    } else {
        RealRoot::Interval(lo, hi)
    }
}

fn tighten(st: &Sturm, mut lo: Rat, mut hi: Rat, steps: usize) -> (Rat, Rat) {
    let two = Rat::from_integer(BigInt::from(2));
    for _ in 0..steps {
        let mid = (&lo + &hi) / &two;
        if st.vanishes_at(&mid) {
            return (mid.clone(), mid);
        }
        if st.count(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Refines an isolating interval of a root of `f` by bisection.
pub fn refine(f: &QPoly, lo: &Rat, hi: &Rat) -> RealRoot {
    let two = Rat::from_integer(BigInt::from(2));
    let mid = (lo + hi) / &two;
    let fm = f.eval(&mid);
    if fm.is_zero() {
        return RealRoot::Exact(mid);
    }
    let flo = f.eval(lo);
    if !flo.is_zero() && sign(&flo) != sign(&fm) {
        RealRoot::Interval(lo.clone(), mid)
    } else {
        RealRoot::Interval(mid, hi.clone())
    }
}

/// Rational sample points: one in each open interval cut out by the real roots,
/// including the two unbounded ones.
pub fn sample_points(f: &QPoly) -> Vec<Rat> {
    let roots = isolate_real_roots(f);
    let one = Rat::one();
    let two = Rat::from_integer(BigInt::from(2));
    if roots.is_empty() {
        return vec![Rat::zero()];
    }
    let mut pts = vec![roots[0].lo() - &one];
    for w in roots.windows(2) {
        pts.push((w[0].hi() + w[1].lo()) / &two);
    }
    pts.push(roots.last().unwrap().hi() + &one);
    pts
}

/// Sign of `p(theta)` for the real root `theta` of `m` isolated by `root`,
/// refining until interval arithmetic settles it. `p` must not vanish at `theta`.
pub fn sign_at_root(p: &QPoly, m: &QPoly, root: &RealRoot) -> i32 {
    let (mut lo, mut hi) = match root {
        RealRoot::Exact(r) => return sign(&p.eval(r)),
        RealRoot::Interval(a, b) => (a.clone(), b.clone()),
    };
    loop {
        let (a, b) = interval_eval(p, &lo, &hi);
        if a.is_positive() {
            return 1;
        }
        if b.is_negative() {
            return -1;
        }
        match refine(m, &lo, &hi) {
            RealRoot::Exact(r) => return sign(&p.eval(&r)),
            RealRoot::Interval(a, b) => {
                lo = a;
                hi = b;
            }
        }
    }
}

/// Enclosure of `p` over `[lo, hi]` by Horner evaluation in interval arithmetic.
pub fn interval_eval(p: &QPoly, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    let mut a = Rat::zero();
    let mut b = Rat::zero();
    for c in p.coeffs().iter().rev() {
        let cands = [&a * lo, &a * hi, &b * lo, &b * hi];
        let mn = cands.iter().min().unwrap().clone();
        let mx = cands.iter().max().unwrap().clone();
        a = mn + c;
        b = mx + c;
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn isolates_roots() {
        // (x^2 - 2)(x - 3)(x + 1/2) has roots -sqrt2, -1/2, sqrt2, 3.
        let f = QPoly::from_ints(&[-2, 0, 1])
            .mul(&QPoly::from_ints(&[-3, 1]))
            .mul(&QPoly::from_ints(&[1, 2]));
        let roots = isolate_real_roots(&f);
        assert_eq!(roots.len(), 4);
        for w in roots.windows(2) {
            assert!(w[0].hi() < w[1].lo());
        }
        assert!(roots.contains(&RealRoot::Exact(rat(3))));
        assert!(isolate_real_roots(&QPoly::from_ints(&[1, 0, 1])).is_empty());
        // An exact root at the left end of another isolating interval.
        let g = QPoly::from_ints(&[1, 1]).mul(&QPoly::from_ints(&[1, 10]));
        let roots = isolate_real_roots(&g);
        assert_eq!(roots.len(), 2);
        assert!(roots[0].hi() < roots[1].lo());
    }

    #[test]
    fn samples_and_signs() {
        let f = QPoly::from_ints(&[-1, 0, 1]);
        let pts = sample_points(&f);
        let signs: Vec<i32> = pts.iter().map(|x| sign(&f.eval(x))).collect();
        assert_eq!(signs, vec![1, -1, 1]);
        // sqrt(2) - 1.4142 > 0 and 3/2 - sqrt(2) > 0.
        let m = QPoly::from_ints(&[-2, 0, 1]);
        let roots = isolate_real_roots(&m);
        let pos = roots.iter().find(|r| r.lo() >= &rat(0)).unwrap();
        let p = QPoly::new(vec![Rat::new((-14142).into(), 10000.into()), rat(1)]);
        assert_eq!(sign_at_root(&p, &m, pos), 1);
        let q = QPoly::new(vec![Rat::new(3.into(), 2.into()), rat(-1)]);
        assert_eq!(sign_at_root(&q, &m, pos), 1);
    }
}

//! Square-class groups `K(S,2)`: finite subgroups of `K^x / (K^x)^2` with even valuation outside `S`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor_int, Int};
use crate::error::{Error, Result};
use crate::f2::Echelon;
use crate::nf::{NfElem, NumberField};
use crate::place::{PlaceDescriptor, PrimePlace};

/// Primes at which `x` can have nonzero valuation.
pub fn support_primes(k: &NumberField, x: &NfElem) -> Result<Vec<u64>> {
    let (d, _) = x.integral_numerator();
    let n = k.norm(x);
    if n.is_zero() {
        return Err(Error::Invalid("zero has no support".into()));
    }
    let mut ps: Vec<u64> = Vec::new();
    let norm_part = n.numer() * n.denom();
    for m in [n.numer().clone(), n.denom().clone(), d] {
        let fac = factor_int(&m).ok_or_else(|| Error::Unsupported(format!("cannot factor {}", m)))?;
        for (p, _) in fac {
            let p = p.to_u64().ok_or_else(|| Error::Unsupported(format!("prime {} too large", p)))?;
            ps.push(p);
        }
    }
    ps.sort_unstable();
    ps.dedup();
    // A p-integral element of p-unit norm is a unit at every place above p.
    let cp = if ps.is_empty() { Vec::new() } else { k.char_poly_elementary(x) };
    ps.retain(|&p| {
        let pb = BigInt::from(p);
        norm_part.is_multiple_of(&pb) || cp.iter().any(|c| c.denom().is_multiple_of(&pb))
    });
    Ok(ps)
}

/// Checks that `v_p(x)` is even for every finite place outside `s`; returns the first offending place.
pub fn odd_place_outside(k: &Arc<NumberField>, x: &NfElem, s: &[PlaceDescriptor]) -> Result<Option<PlaceDescriptor>> {
    for p in support_primes(k, x)? {
        for pl in k.primes_above(p)? {
            let d = pl.descriptor();
            if s.contains(&d) {
                continue;
            }
            if pl.valuation(x).expect("nonzero") % 2 != 0 {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

/// Where a character bit comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharSource {
    Real(usize),
    Finite(PlaceDescriptor),
}

/// `K(S,2)` presented by generators independent modulo squares.
pub struct SquareClassGroup {
    pub field: Arc<NumberField>,
    pub s: Vec<PlaceDescriptor>,
    pub gens: Vec<NfElem>,
    places: Vec<Arc<PrimePlace>>,
    sources: Vec<CharSource>,
    chars: Vec<u128>,
    echelon: Echelon,
}

impl std::fmt::Debug for SquareClassGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "K(S,2) over {} with {} generators", self.field.name, self.gens.len())
    }
}

impl SquareClassGroup {
    /// Builds the group and certifies its invariants: even valuations outside `S`
    /// and independence modulo squares via local characters.
    pub fn new(field: Arc<NumberField>, s: Vec<PlaceDescriptor>, gens: Vec<NfElem>) -> Result<Self> {
        if gens.len() > 120 {
            return Err(Error::Unsupported("too many generators".into()));
        }
        for (i, g) in gens.iter().enumerate() {
            if g.is_zero() {
                return Err(Error::Verification(format!("generator {} is zero", i)));
            }
            if let Some(bad) = odd_place_outside(&field, g, &s)? {
                return Err(Error::Verification(format!("generator {} has odd valuation at {} outside S", i, bad)));
            }
        }
        let mut grp = SquareClassGroup {
            field: field.clone(),
            s: s.clone(),
            gens,
            places: Vec::new(),
            sources: Vec::new(),
            chars: Vec::new(),
            echelon: Echelon::new(),
        };
        grp.chars = vec![0; grp.gens.len()];
        for i in 0..field.real_places() {
            grp.add_source(CharSource::Real(i), None)?;
        }
        let mut s_primes: Vec<u64> = s.iter().map(|d| d.p).collect();
        s_primes.dedup();
        for d in &s {
            let pl = field.place_from_descriptor(d)?;
            grp.add_source(CharSource::Finite(d.clone()), Some(pl))?;
        }
        let mut q = 2u64;
        while grp.echelon_rank() < grp.gens.len() {
            q += 1;
            if q > 2000 {
                return Err(Error::Verification("generators are not independent modulo squares".into()));
            }
            if !crate::arith::is_prime_u64(q) || s_primes.contains(&q) {
                continue;
            }
            let Ok(pls) = field.primes_above(q) else { continue };
            for pl in pls {
                if grp.echelon_rank() == grp.gens.len() {
                    break;
                }
                let d = pl.descriptor();
                grp.add_source(CharSource::Finite(d), Some(pl))
                    .map_err(|_| Error::Verification("generators are not independent modulo squares".into()))?;
            }
        }
        Ok(grp)
    }

    fn echelon_rank(&self) -> usize {
        self.echelon.rank()
    }

    fn char_bits(&self, src: &CharSource, pl: Option<&PrimePlace>, x: &NfElem) -> Vec<bool> {
        match src {
            CharSource::Real(i) => vec![self.field.real_sign(x, *i) < 0],
            CharSource::Finite(_) => {
                let pl = pl.expect("finite source has a place");
                let c = pl.square_class(x);
                (0..pl.class_dim()).map(|b| c >> b & 1 == 1).collect()
            }
        }
    }

    fn add_source(&mut self, src: CharSource, pl: Option<PrimePlace>) -> Result<()> {
        let pl = pl.map(Arc::new);
        let bits: Vec<Vec<bool>> = self.gens.iter().map(|g| self.char_bits(&src, pl.as_deref(), g)).collect();
        let width = match (&src, &pl) {
            (CharSource::Real(_), _) => 1,
            (_, Some(p)) => p.class_dim(),
            _ => unreachable!(),
        };
        let offset: usize = self.total_width();
        if offset + width > 128 {
            return Err(Error::Unsupported("character vector exceeds 128 bits".into()));
        }
        for (i, b) in bits.iter().enumerate() {
            for (j, &bit) in b.iter().enumerate() {
                if bit {
                    self.chars[i] |= 1u128 << (offset + j);
                }
            }
        }
        self.sources.push(src);
        if let Some(p) = pl {
            self.places.push(p);
        }
        let mut e = Echelon::new();
        for (i, &c) in self.chars.iter().enumerate() {
            e.insert(c, 1u128 << i);
        }
        self.echelon = e;
        Ok(())
    }

    fn total_width(&self) -> usize {
        let mut w = 0;
        let mut pi = 0;
        for s in &self.sources {
            match s {
                CharSource::Real(_) => w += 1,
                CharSource::Finite(_) => {
                    w += self.places[pi].class_dim();
                    pi += 1;
                }
            }
        }
        w
    }

    /// Character vector of an arbitrary nonzero element.
    pub fn characters(&self, x: &NfElem) -> u128 {
        let mut out = 0u128;
        let mut off = 0;
        let mut pi = 0;
        for s in &self.sources {
            let pl = match s {
                CharSource::Real(_) => None,
                CharSource::Finite(_) => {
                    pi += 1;
                    Some(&*self.places[pi - 1])
                }
            };
            for (j, b) in self.char_bits(s, pl, x).into_iter().enumerate() {
                if b {
                    out |= 1u128 << (off + j);
                }
            }
            off += match pl {
                None => 1,
                Some(p) => p.class_dim(),
            };
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn order(&self) -> u128 {
        1u128 << self.gens.len()
    }

    /// The element `prod gens[i]^(mask_i)`.
    pub fn element(&self, mask: u128) -> NfElem {
        let mut acc = self.field.one();
        for (i, g) in self.gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = self.field.mul(&acc, g);
            }
        }
        acc
    }

    pub fn masks(&self) -> impl Iterator<Item = u128> {
        0..self.order()
    }

    /// Coordinates of `x` in the generator basis, if `x` lies in the group modulo squares.
    pub fn dlog(&self, x: &NfElem) -> Option<u128> {
        if x.is_zero() {
            return None;
        }
        let (r, tag) = self.echelon.reduce(self.characters(x));
        if r != 0 {
            return None;
        }
        // The character map is injective on the group; confirm the support condition too.
        match odd_place_outside(&self.field, x, &self.s) {
            Ok(None) => Some(tag),
            _ => None,
        }
    }

    /// Certified places used as independence witnesses.
    pub fn witness_sources(&self) -> &[CharSource] {
        &self.sources
    }

    /// Subgroup `K(S',2)` for `S' ⊆ S`.
    pub fn restrict(&self, s_new: &[PlaceDescriptor]) -> Result<SquareClassGroup> {
        for d in s_new {
            if !self.s.contains(d) {
                return Err(Error::Invalid(format!("place {} not covered by S", d)));
            }
        }
        let removed: Vec<&PlaceDescriptor> = self.s.iter().filter(|d| !s_new.contains(d)).collect();
        let mut parity = vec![0u128; self.gens.len()];
        for (j, d) in removed.iter().enumerate() {
            let pl = self.field.place_from_descriptor(d)?;
            for (i, g) in self.gens.iter().enumerate() {
                if pl.valuation(g).expect("nonzero").rem_euclid(2) == 1 {
                    parity[i] |= 1u128 << j;
                }
            }
        }
        let gens = crate::f2::kernel(&parity).into_iter().map(|m| self.element(m)).collect();
        SquareClassGroup::new(self.field.clone(), s_new.to_vec(), gens)
    }
}

/// `Q(S,2)` for `S = {inf} ∪ primes`: generators `-1` and the primes.
pub fn square_class_group_q(primes: &[u64]) -> Result<SquareClassGroup> {
    let q = NumberField::rational();
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    let mut gens = vec![q.from_int(&-BigInt::one())];
    let mut s = Vec::new();
    for &p in &ps {
        gens.push(q.from_int(&BigInt::from(p)));
        s.push(PlaceDescriptor { p, poly_factor: vec![0, 1], e: 1, f: 1 });
    }
    SquareClassGroup::new(q, s, gens)
}

/// Squarefree integer representing the rational element of a square class.
pub fn squarefree_rep(x: &NfElem) -> Option<Int> {
    let r = x.as_rational()?;
    crate::arith::squarefree_class(&r)
}

/// Sign-and-squarefree labels for rational group elements, e.g. `"-6"`.
pub fn rational_label(x: &NfElem) -> String {
    match squarefree_rep(x) {
        Some(n) => n.to_string(),
        None => format!("{:?}", x),
    }
}

pub fn is_negative_rat(x: &NfElem) -> bool {
    x.as_rational().map(|r| r.is_negative()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn rational_groups() {
        let g = square_class_group_q(&[]).unwrap();
        assert_eq!(g.order(), 2);
        let g = square_class_group_q(&[2, 5]).unwrap();
        assert_eq!(g.order(), 8);
        let labels: std::collections::BTreeSet<String> = g.masks().map(|m| rational_label(&g.element(m))).collect();
        let want: std::collections::BTreeSet<String> =
            ["1", "-1", "2", "-2", "5", "-5", "10", "-10"].iter().map(|s| s.to_string()).collect();
        assert_eq!(labels, want);
        assert_eq!(square_class_group_q(&[2, 3, 5]).unwrap().order(), 16);
        let q = NumberField::rational();
        assert_eq!(g.dlog(&q.from_int(&int(-40))), Some(0b111));
        assert_eq!(g.dlog(&q.from_int(&int(3))), None);
    }

    #[test]
    fn squares_are_rejected() {
        let q = NumberField::rational();
        let s = vec![PlaceDescriptor { p: 3, poly_factor: vec![0, 1], e: 1, f: 1 }];
        let r = SquareClassGroup::new(q.clone(), s.clone(), vec![q.from_int(&int(-1)), q.from_int(&int(9))]);
        assert!(r.is_err());
        let r = SquareClassGroup::new(q.clone(), vec![], vec![q.from_int(&int(3))]);
        assert!(r.is_err());
    }

    #[test]
    fn restriction() {
        let g = square_class_group_q(&[2, 3, 5]).unwrap();
        let s = vec![PlaceDescriptor { p: 2, poly_factor: vec![0, 1], e: 1, f: 1 }];
        let h = g.restrict(&s).unwrap();
        assert_eq!(h.order(), 4);
    }

    #[test]
    fn even_valuation_outside_s_exhaustive() {
        let g = square_class_group_q(&[2, 7]).unwrap();
        let q = NumberField::rational();
        for m in g.masks() {
            let x = g.element(m);
            for p in [3u64, 5, 11, 13] {
                let pl = &q.primes_above(p).unwrap()[0];
                assert_eq!(pl.valuation(&x).unwrap() % 2, 0);
            }
        }
    }
}

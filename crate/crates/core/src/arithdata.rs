//! Ingested arithmetic data for number fields (units, class-group witnesses, `K(S,2)` generators)
//! and its verification.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime_u64, pow_int, Int, Rat};
use crate::error::{Error, Result};
use crate::nf::{NfElem, NumberField};
use crate::place::PlaceDescriptor;
use crate::poly::{QPoly, ZPoly};
use crate::sqclass::SquareClassGroup;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldJson {
    pub poly: Vec<i64>,
}

/// A root of another polynomial, written in the generator of this field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsomorphismJson {
    pub poly: Vec<i64>,
    pub root: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    pub place: PlaceDescriptor,
    pub generator: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
pub struct ClassGroupJson {
    pub invariants: Vec<u64>,
    pub witnesses: Vec<WitnessJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
pub struct SelmerGensJson {
    #[serde(rename = "S")]
    pub s: Vec<PlaceDescriptor>,
    pub gens: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArithmeticDataFile {
    #[serde(default)]
    pub name: String,
    pub field: FieldJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isomorphism: Option<IsomorphismJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral_basis: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub units: Vec<Vec<String>>,
    #[serde(default)]
    pub class_group: ClassGroupJson,
    #[serde(default)]
    pub selmer_generators: SelmerGensJson,
}

impl ArithmeticDataFile {
    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&s)?)
    }

    /// Trivial data for `Q` with `S = {inf} ∪ primes`.
    pub fn rational(primes: &[u64]) -> Self {
        let mut gens = vec![vec!["-1".to_string()]];
        let mut s = Vec::new();
        for &p in primes {
            gens.push(vec![p.to_string()]);
            s.push(PlaceDescriptor { p, poly_factor: vec![0, 1], e: 1, f: 1 });
        }
        ArithmeticDataFile {
            name: "Q".into(),
            field: FieldJson { poly: vec![0, 1] },
            isomorphism: None,
            integral_basis: None,
            units: Vec::new(),
            class_group: ClassGroupJson::default(),
            selmer_generators: SelmerGensJson { s, gens },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckLine {
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArithmeticReport {
    pub field: String,
    pub checks: Vec<CheckLine>,
}

impl ArithmeticReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Data that passed verification, with the certified group for the declared `S`.
pub struct VerifiedArithmetic {
    pub field: Arc<NumberField>,
    pub report: ArithmeticReport,
    pub group: SquareClassGroup,
    pub isomorphism: Option<(ZPoly, NfElem)>,
}

/// True iff `x` is an algebraic integer (integral characteristic polynomial).
pub fn is_algebraic_integer(k: &NumberField, x: &NfElem) -> bool {
    k.char_poly_elementary(x).iter().all(|c| c.is_integer())
}

fn det_rat(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else { return Rat::zero() };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

/// Discriminant `det(Tr(b_i b_j))` of a family of elements.
pub fn basis_discriminant(k: &NumberField, b: &[NfElem]) -> Rat {
    let m: Vec<Vec<Rat>> = b.iter().map(|x| b.iter().map(|y| k.trace(&k.mul(x, y))).collect()).collect();
    det_rat(m)
}

/// `floor` of an upper bound for the Minkowski bound `n!/n^n (4/pi)^r2 sqrt|d|`.
pub fn minkowski_bound(n: usize, r2: usize, disc_abs: &Int) -> Int {
    let mut fact = BigInt::one();
    for i in 1..=n {
        fact *= i;
    }
    let nn = num_traits::pow(BigInt::from(n), n);
    // 4/pi < 12733/10000.
    let c = BigRational::new(fact.clone() * &fact, nn.clone() * &nn)
        * num_traits::pow(BigRational::new(BigInt::from(12733), BigInt::from(10000)), 2 * r2)
        * BigRational::from_integer(disc_abs.clone());
    c.floor().to_integer().sqrt()
}

fn parse_elems(k: &NumberField, what: &str, v: &[Vec<String>]) -> Result<Vec<NfElem>> {
    v.iter()
        .enumerate()
        .map(|(i, c)| k.parse_elem(c).map_err(|e| Error::Verification(format!("{}[{}]: {}", what, i, e))))
        .collect()
}

/// Verifies ingested arithmetic data; any failure names the offending entry.
pub fn verify_arithmetic_data(data: &ArithmeticDataFile) -> Result<VerifiedArithmetic> {
    let mut checks = Vec::new();
    let mut push = |check: &str, detail: String| {
        checks.push(CheckLine { check: check.into(), ok: true, detail });
    };
    let name = if data.name.is_empty() { "K".to_string() } else { data.name.clone() };
    let k = NumberField::new(&name, ZPoly::from_i64(&data.field.poly))
        .map_err(|e| Error::Verification(format!("field: {}", e)))?;
    let n = k.degree();
    let (r1, r2) = (k.real_places(), k.complex_places());
    push("field", format!("degree {}, signature ({}, {})", n, r1, r2));

    let iso = match &data.isomorphism {
        None => None,
        Some(j) => {
            let g = ZPoly::from_i64(&j.poly);
            let r = k.parse_elem(&j.root).map_err(|e| Error::Verification(format!("isomorphism.root: {}", e)))?;
            if g.deg() != n || !k.eval_qpoly(&g.to_q(), &r).is_zero() {
                return Err(Error::Verification("isomorphism: root does not satisfy the polynomial".into()));
            }
            push("isomorphism", format!("root of {:?} verified", g));
            Some((g, r))
        }
    };

    let basis = match &data.integral_basis {
        None => {
            let th = k.theta();
            (0..n as u32).map(|i| k.pow(&th, i)).collect()
        }
        Some(b) => {
            let b = parse_elems(&k, "integral_basis", b)?;
            if b.len() != n {
                return Err(Error::Verification("integral_basis: wrong length".into()));
            }
            for (i, x) in b.iter().enumerate() {
                if !is_algebraic_integer(&k, x) {
                    return Err(Error::Verification(format!("integral_basis[{}] is not integral", i)));
                }
            }
            b
        }
    };
    let disc_b = basis_discriminant(&k, &basis);
    if disc_b.is_zero() || !disc_b.is_integer() {
        return Err(Error::Verification("integral_basis: degenerate discriminant".into()));
    }
    let disc_abs = disc_b.to_integer().abs();
    push("integral_basis", format!("|disc| <= {}", disc_abs));

    // Class number: every prime of norm below the Minkowski bound is principal.
    if !data.class_group.invariants.is_empty() {
        return Err(Error::Unsupported(format!(
            "class_group: nontrivial invariants {:?} are not supported",
            data.class_group.invariants
        )));
    }
    let mb = minkowski_bound(n, r2, &disc_abs);
    let mb_u = mb.to_u64().ok_or_else(|| Error::Unsupported("Minkowski bound too large".into()))?;
    let mut nw = 0;
    for p in 2..=mb_u {
        if !is_prime_u64(p) {
            continue;
        }
        for pl in k.primes_above(p).map_err(|e| Error::Verification(format!("class_group: {}", e)))? {
            let np = pow_int(p, pl.f);
            if np > mb {
                continue;
            }
            let d = pl.descriptor();
            let w = data
                .class_group
                .witnesses
                .iter()
                .find(|w| w.place == d)
                .ok_or_else(|| Error::Verification(format!("class_group: no witness for place {}", d)))?;
            let a = k.parse_elem(&w.generator).map_err(|e| Error::Verification(format!("witness {}: {}", d, e)))?;
            if !is_algebraic_integer(&k, &a) {
                return Err(Error::Verification(format!("witness {}: generator not integral", d)));
            }
            let nm = k.norm(&a);
            if nm.abs() != BigRational::from_integer(np.clone()) {
                return Err(Error::Verification(format!("witness {}: norm {} != {}", d, nm, np)));
            }
            if pl.valuation(&a) != Some(1) {
                return Err(Error::Verification(format!("witness {}: valuation is not 1", d)));
            }
            nw += 1;
        }
    }
    push("class_group", format!("trivial: {} prime ideals below Minkowski bound {} are principal", nw, mb));

    let units = parse_elems(&k, "units", &data.units)?;
    for (i, u) in units.iter().enumerate() {
        if !is_algebraic_integer(&k, u) || k.norm(u).abs() != Rat::one() {
            return Err(Error::Verification(format!("units[{}]: not a unit", i)));
        }
    }
    if units.len() + 1 > r1 + r2 {
        return Err(Error::Verification("units: more units than the unit rank allows".into()));
    }
    // With a real place the torsion is {+-1}, so -1 joins the independence check.
    let mut ug = if r1 > 0 { vec![k.from_int(&-BigInt::one())] } else { Vec::new() };
    ug.extend(units.iter().cloned());
    SquareClassGroup::new(k.clone(), Vec::new(), ug).map_err(|e| Error::Verification(format!("units: {}", e)))?;
    push("units", format!("{} units of norm +-1, independent modulo squares", units.len()));

    let s = data.selmer_generators.s.clone();
    for d in &s {
        let pl = k.place_from_descriptor(d).map_err(|e| Error::Verification(format!("S: {}", e)))?;
        if pl.e != d.e || pl.f != d.f {
            return Err(Error::Verification(format!("S: descriptor {} has wrong e, f", d)));
        }
    }
    let gens = parse_elems(&k, "selmer_generators.gens", &data.selmer_generators.gens)?;
    let expect = r1 + r2 + s.len();
    if gens.len() != expect {
        return Err(Error::Verification(format!(
            "selmer_generators: {} generators, expected r1 + r2 + #S = {}",
            gens.len(),
            expect
        )));
    }
    let group = SquareClassGroup::new(k.clone(), s.clone(), gens)
        .map_err(|e| Error::Verification(format!("selmer_generators: {}", e)))?;
    push(
        "selmer_generators",
        format!("{} generators: even valuations outside S, independent modulo squares, complete", group.dim()),
    );
    Ok(VerifiedArithmetic { field: k, report: ArithmeticReport { field: name, checks }, group, isomorphism: iso })
}

/// `K(S,2)` for `S` covered by verified data.
pub fn square_class_group_k(v: &VerifiedArithmetic, s: &[PlaceDescriptor]) -> Result<SquareClassGroup> {
    let mut s = s.to_vec();
    s.sort();
    s.dedup();
    v.group.restrict(&s)
}

impl VerifiedArithmetic {
    /// Maps a polynomial in the original generator (of the isomorphism entry) into this field.
    pub fn from_original(&self, c: &[Rat]) -> Result<NfElem> {
        let (_, r) = self.isomorphism.as_ref().ok_or_else(|| Error::Invalid("no isomorphism entry".into()))?;
        Ok(self.field.eval_qpoly(&QPoly::new(c.to_vec()), r))
    }
}

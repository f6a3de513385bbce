//! The 49 parametrizing triples `(f, g, h)` with `f^2 + g^3 + h^5 = 0`, and the
//! local/mod-`2^8` elimination pipeline over them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{fmt_rat, parse_rat, Rat};
use crate::error::{Error, Result};
use crate::form::BinaryForm;
use crate::selmer::{setup_from_data, DescentSetup};
use crate::local::{curve_locally_soluble, local_test_prime_set, HyperellipticCurve, LocalReport, Place, Verdict};

/// Table of the 27 coefficient vectors, as shipped.
pub const TABLE1_JSON: &str = include_str!("../data/table1.json");

/// SHA-256 prefixes of `"a0,a1,...,a12"` for each row, guarding the transcription.
pub const ROW_CHECKSUMS: [&str; 27] = [
    "87c2d266fa4c3e0f", "8888e87dfd74a45c", "8811df110b4aff71", "25e0877266d817c7", "3c6388efeed98594",
    "aca86619d75c5ab3", "5942d3bdf99499c1", "8940895097bcb6cf", "7a9c05a68bbf2dbe", "ca9e0103d269f0f9",
    "36a1d3241cf6172c", "17d119e6e9fc31bd", "6c96edcbc8220802", "17fd9c152ca55373", "fbfd5507120af6a0",
    "55ab756106752382", "5dba4bfe272abaaf", "f93113b557f671e7", "a51a5aa2b7831642", "480e39e282b01fcc",
    "a0c7d97b0ab87dcb", "c62aa5ebb4d41175", "08f8e49e10cb89f6", "2e0f55750bb29ebd", "8138e0c97c00d681",
    "80fb600d2d9734f2", "1dce753cd9564abe",
];

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TableRow {
    index: usize,
    alpha: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TableFile {
    #[serde(default)]
    description: String,
    rows: Vec<TableRow>,
}

pub type AlphaVector = [Rat; 13];

/// Parses and checks a table file: 27 rows, 13 entries each, per-row checksums, and
/// integrality of the resulting forms.
pub fn parse_table(json: &str) -> Result<Vec<AlphaVector>> {
    let t: TableFile = serde_json::from_str(json)?;
    if t.rows.len() != 27 {
        return Err(Error::Verification(format!("table has {} rows, expected 27", t.rows.len())));
    }
    let mut out = Vec::with_capacity(27);
    for (pos, row) in t.rows.iter().enumerate() {
        let name = format!("h_{}", pos + 1);
        if row.index != pos + 1 {
            return Err(Error::Verification(format!("{}: row labelled {}", name, row.index)));
        }
        if row.alpha.len() != 13 {
            return Err(Error::Verification(format!("{}: {} entries, expected 13", name, row.alpha.len())));
        }
        let vals: Vec<Rat> = row
            .alpha
            .iter()
            .map(|s| parse_rat(s).ok_or_else(|| Error::Parse(format!("{}: bad entry {:?}", name, s))))
            .collect::<Result<_>>()?;
        let canon = vals.iter().map(fmt_rat).collect::<Vec<_>>().join(",");
        let found = hex::encode(Sha256::digest(canon.as_bytes()))[..16].to_string();
        if found != ROW_CHECKSUMS[pos] {
            return Err(Error::Checksum { name, expected: ROW_CHECKSUMS[pos].into(), found });
        }
        let alpha: AlphaVector = vals.try_into().expect("13 entries");
        if !BinaryForm::from_alpha(&alpha).is_integral() {
            return Err(Error::Verification(format!("{}: form has non-integral coefficients", name)));
        }
        out.push(alpha);
    }
    Ok(out)
}

pub fn load_table(path: &Path) -> Result<Vec<AlphaVector>> {
    parse_table(&std::fs::read_to_string(path)?)
}

/// SHA-256 of a data file's contents.
pub fn file_checksum(contents: &str) -> String {
    hex::encode(Sha256::digest(contents.as_bytes()))
}

#[derive(Clone, Debug)]
pub struct ParametrizationTriple {
    pub index: usize,
    pub f: BinaryForm,
    pub g: BinaryForm,
    pub h: BinaryForm,
    pub provenance: String,
}

/// Source row and sign of `f` for index `i`: `f_i = sign * f_row`.
pub fn source_row(i: usize) -> Result<(usize, i32)> {
    match i {
        1..=27 => Ok((i, 1)),
        28..=29 => Ok((i - 27, -1)),
        30..=41 => Ok((i - 25, -1)),
        42..=49 => Ok((i - 23, -1)),
        _ => Err(Error::Invalid(format!("index {} outside 1..=49", i))),
    }
}

/// Builds the triple for a row vector: `g` the Hessian covariant, `f` the Jacobian covariant.
pub fn triple_from_alpha(index: usize, alpha: &AlphaVector) -> ParametrizationTriple {
    let h = BinaryForm::from_alpha(alpha);
    let g = h.hessian_covariant();
    let f = h.jacobian_covariant(&g);
    ParametrizationTriple { index, f, g, h, provenance: format!("row {}", index) }
}

/// The full corpus built from a table.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub triples: Vec<ParametrizationTriple>,
    pub table_checksum: String,
}

impl Corpus {
    pub fn from_table_json(json: &str) -> Result<Self> {
        let rows = parse_table(json)?;
        let base: Vec<ParametrizationTriple> =
            rows.par_iter().enumerate().map(|(i, a)| triple_from_alpha(i + 1, a)).collect();
        let mut triples = base.clone();
        for i in 28..=49 {
            let (src, _) = source_row(i)?;
            let b = &base[src - 1];
            triples.push(ParametrizationTriple {
                index: i,
                f: b.f.neg(),
                g: b.g.clone(),
                h: b.h.clone(),
                provenance: format!("(-f, g, h) of index {}", src),
            });
        }
        Ok(Corpus { triples, table_checksum: file_checksum(json) })
    }

    /// Corpus from the shipped table.
    pub fn builtin() -> Self {
        Self::from_table_json(TABLE1_JSON).expect("shipped table verifies")
    }

    pub fn load(data_dir: &Path) -> Result<Self> {
        Self::from_table_json(&std::fs::read_to_string(data_dir.join("table1.json"))?)
    }

    pub fn get(&self, i: usize) -> Result<&ParametrizationTriple> {
        source_row(i)?;
        Ok(&self.triples[i - 1])
    }

    pub fn curve(&self, i: usize) -> Result<HyperellipticCurve> {
        HyperellipticCurve::new(self.get(i)?.f.clone())
    }
}

/// The triple for index `i` from the shipped table.
pub fn parametrization(i: usize) -> Result<ParametrizationTriple> {
    source_row(i)?;
    let rows = parse_table(TABLE1_JSON)?;
    let (src, sign) = source_row(i)?;
    let mut t = triple_from_alpha(src, &rows[src - 1]);
    if sign < 0 {
        t.f = t.f.neg();
        t.provenance = format!("(-f, g, h) of index {}", src);
    }
    t.index = i;
    Ok(t)
}

/// `f^2 + g^3 + h^5 = 0` as forms.
pub fn verify_identity(t: &ParametrizationTriple) -> bool {
    t.f.pow(2).add(&t.g.pow(3)).add(&t.h.pow(5)).is_zero()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CorpusCheck {
    pub index: usize,
    pub identity: bool,
    pub integral: bool,
    pub degrees: (usize, usize, usize),
    pub squarefree: bool,
}

impl CorpusCheck {
    pub fn ok(&self) -> bool {
        self.identity && self.integral && self.degrees == (30, 20, 12) && self.squarefree
    }
}

pub fn check_triple(t: &ParametrizationTriple) -> CorpusCheck {
    CorpusCheck {
        index: t.index,
        identity: verify_identity(t),
        integral: t.f.is_integral() && t.g.is_integral() && t.h.is_integral(),
        degrees: (t.f.degree(), t.g.degree(), t.h.degree()),
        squarefree: t.f.is_squarefree(),
    }
}

/// Reduces an integral form modulo `m`.
fn coeffs_mod(f: &BinaryForm, m: u64) -> Vec<u64> {
    let mb = num_bigint::BigInt::from(m);
    f.int_coeffs()
        .expect("integral form")
        .iter()
        .map(|c| {
            use num_integer::Integer;
            c.mod_floor(&mb).to_u64().expect("small residue")
        })
        .collect()
}

fn eval_mod(c: &[u64], u: u64, v: u64, m: u64) -> u64 {
    let n = c.len() - 1;
    let mut vp = vec![1u64; n + 1];
    for k in 1..=n {
        vp[k] = vp[k - 1] * v % m;
    }
    let mut acc = 0u64;
    let mut up = 1u64;
    for (k, &a) in c.iter().enumerate() {
        acc = (acc + a * up % m * vp[n - k]) % m;
        up = up * u % m;
    }
    acc
}

/// `U = {(u,v) mod m : f(u,v) is a square mod m and (f,g,h)(u,v) not all in 2(Z/m)}`.
pub fn primitivity_sieve(t: &ParametrizationTriple, modulus: u64) -> Vec<(u64, u64)> {
    let m = modulus;
    let sq: BTreeSet<u64> = (0..m).map(|w| w * w % m).collect();
    let doubles: BTreeSet<u64> = (0..m).map(|w| 2 * w % m).collect();
    let (cf, cg, ch) = (coeffs_mod(&t.f, m), coeffs_mod(&t.g, m), coeffs_mod(&t.h, m));
    let mut out = Vec::new();
    for u in 0..m {
        for v in 0..m {
            let fv = eval_mod(&cf, u, v, m);
            if !sq.contains(&fv) {
                continue;
            }
            if doubles.contains(&fv)
                && doubles.contains(&eval_mod(&cg, u, v, m))
                && doubles.contains(&eval_mod(&ch, u, v, m))
            {
                continue;
            }
            out.push((u, v));
        }
    }
    out
}

/// Places tested by the fast elimination suite.
pub fn fast_places() -> Vec<Place> {
    vec![Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Prime(7)]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IndexStatus {
    Eliminated { by: String, report: Option<LocalReport> },
    Undecided { place: String },
    Survives,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexResult {
    pub index: usize,
    #[serde(flatten)]
    pub status: IndexStatus,
    pub places_tested: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub results: Vec<IndexResult>,
    pub eliminated_by_place: BTreeMap<String, Vec<usize>>,
    pub eliminated_by_sieve: Vec<usize>,
    pub undecided: Vec<usize>,
    pub final_set: Vec<usize>,
}

impl PipelineReport {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("index\tstatus\tdetail\n");
        for r in &self.results {
            let (st, d) = match &r.status {
                IndexStatus::Eliminated { by, .. } => ("eliminated", by.clone()),
                IndexStatus::Undecided { place } => ("undecided", place.clone()),
                IndexStatus::Survives => ("survives", String::new()),
            };
            s.push_str(&format!("{}\t{}\t{}\n", r.index, st, d));
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct EliminationConfig {
    pub places: PlaceSelection,
    pub depth_cap: u32,
    pub modulus: u64,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum PlaceSelection {
    /// `{inf, 2, 3, 5, 7}`.
    Fast,
    /// `{inf} ∪ {p < 4g^2} ∪ {p | disc f}`.
    Full,
    Explicit(Vec<Place>),
}

impl Default for EliminationConfig {
    fn default() -> Self {
        EliminationConfig { places: PlaceSelection::Fast, depth_cap: 40, modulus: 256, indices: (1..=49).collect() }
    }
}

/// Local tests over the chosen places (stopping at the first insoluble one), then the sieve.
pub fn eliminate_indices(corpus: &Corpus, cfg: &EliminationConfig) -> Result<PipelineReport> {
    let results: Vec<IndexResult> = cfg
        .indices
        .par_iter()
        .map(|&i| -> Result<IndexResult> {
            let c = corpus.curve(i)?;
            let places = match &cfg.places {
                PlaceSelection::Fast => fast_places(),
                PlaceSelection::Full => local_test_prime_set(&c)?,
                PlaceSelection::Explicit(v) => v.clone(),
            };
            let mut undecided = None;
            for (n, &pl) in places.iter().enumerate() {
                let r = curve_locally_soluble(&c, pl, cfg.depth_cap);
                match r.verdict {
                    Verdict::Insoluble => {
                        return Ok(IndexResult {
                            index: i,
                            status: IndexStatus::Eliminated { by: pl.to_string(), report: Some(r) },
                            places_tested: n + 1,
                        })
                    }
                    Verdict::DepthExceeded => undecided = undecided.or(Some(pl.to_string())),
                    Verdict::Soluble => {}
                }
            }
            if let Some(place) = undecided {
                return Ok(IndexResult { index: i, status: IndexStatus::Undecided { place }, places_tested: places.len() });
            }
            let u = primitivity_sieve(corpus.get(i)?, cfg.modulus);
            let status = if u.is_empty() {
                IndexStatus::Eliminated { by: format!("sieve{}", cfg.modulus), report: None }
            } else {
                IndexStatus::Survives
            };
            Ok(IndexResult { index: i, status, places_tested: places.len() })
        })
        .collect::<Result<_>>()?;
    let mut by_place: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut by_sieve = Vec::new();
    let mut undecided = Vec::new();
    let mut fin = Vec::new();
    for r in &results {
        match &r.status {
            IndexStatus::Eliminated { by, report: Some(_) } => by_place.entry(by.clone()).or_default().push(r.index),
            IndexStatus::Eliminated { .. } => by_sieve.push(r.index),
            IndexStatus::Undecided { .. } => {
                undecided.push(r.index);
                fin.push(r.index);
            }
            IndexStatus::Survives => fin.push(r.index),
        }
    }
    Ok(PipelineReport {
        results,
        eliminated_by_place: by_place,
        eliminated_by_sieve: by_sieve,
        undecided,
        final_set: fin,
    })
}

/// Degrees of the irreducible factors over Q (with multiplicity), grouped by type.
pub fn factorization_type_census(corpus: &Corpus, indices: &[usize]) -> Result<BTreeMap<Vec<usize>, Vec<usize>>> {
    let types: Vec<(usize, Vec<usize>)> = indices
        .par_iter()
        .map(|&i| -> Result<(usize, Vec<usize>)> {
            let fac = corpus.get(i)?.f.factor_over_rationals()?;
            Ok((i, fac.degrees()))
        })
        .collect::<Result<_>>()?;
    let mut out: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, d) in types {
        out.entry(d).or_default().push(i);
    }
    Ok(out)
}

/// Descent setup for `C_i`: over `Q` when `f_i` is reducible, otherwise from the shipped
/// number-field factorization in `data_dir`.
pub fn descent_setup(corpus: &Corpus, i: usize, data_dir: &Path) -> Result<DescentSetup> {
    let curve = corpus.curve(i)?;
    let label = format!("f{}", i);
    if curve.f.factor_over_rationals()?.factors.len() > 1 {
        DescentSetup::over_rationals(&label, curve)
    } else {
        setup_from_data(&label, curve, data_dir, i)
    }
}

/// Directory of the shipped data files.
pub fn default_data_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// Content-normalized comparison: equal up to a nonzero rational scalar.
pub fn proportional(a: &BinaryForm, b: &BinaryForm) -> bool {
    if a.degree() != b.degree() {
        return false;
    }
    let Some(k) = (0..=a.degree()).find(|&k| !a.coeff(k).is_zero()) else { return b.is_zero() };
    if b.coeff(k).is_zero() {
        return false;
    }
    let r: BigRational = b.coeff(k) / a.coeff(k);
    a.scale(&r) == *b
}

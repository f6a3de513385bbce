//! Primitive residue pairs `(u, v)` modulo powers of 2 surviving the congruence conditions.
//! Curves without 2-adic points also come out empty here.

use pdescent::edwards::{primitivity_sieve, Corpus};

fn main() -> pdescent::error::Result<()> {
    let corpus = Corpus::builtin();
    for modulus in [16u64, 64, 256] {
        let empty: Vec<usize> =
            (1..=49).filter(|&i| primitivity_sieve(corpus.get(i).unwrap(), modulus).is_empty()).collect();
        println!("mod {:>3}: empty for {:?}", modulus, empty);
    }
    let t = corpus.get(2)?;
    println!("f2 mod 256 keeps {} pairs", primitivity_sieve(t, 256).len());
    Ok(())
}

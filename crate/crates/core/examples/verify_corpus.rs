//! Builds the 49 triples and checks the identity, integrality, degrees and squarefreeness.

use pdescent::edwards::{check_triple, Corpus};
use rayon::prelude::*;

fn main() {
    let t0 = std::time::Instant::now();
    let corpus = Corpus::builtin();
    let checks: Vec<_> = corpus.triples.par_iter().map(check_triple).collect();
    for c in &checks {
        println!(
            "f_{:<2} identity={} integral={} degrees={:?} squarefree={}",
            c.index, c.identity, c.integral, c.degrees, c.squarefree
        );
    }
    let ok = checks.iter().filter(|c| c.ok()).count();
    println!("{}/49 triples pass ({:.1?})", ok, t0.elapsed());
}

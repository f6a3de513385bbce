//! Runs the local-solubility and mod-256 elimination over all 49 curves.
//! Pass `--full` to test every place up to the genus bound and the discriminant primes.

use pdescent::edwards::{eliminate_indices, Corpus, EliminationConfig, PlaceSelection};

fn main() -> pdescent::error::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let corpus = Corpus::builtin();
    let cfg = EliminationConfig {
        places: if full { PlaceSelection::Full } else { PlaceSelection::Fast },
        ..Default::default()
    };
    let t0 = std::time::Instant::now();
    let report = eliminate_indices(&corpus, &cfg)?;
    for (place, idx) in &report.eliminated_by_place {
        println!("no points at {}: {:?}", place, idx);
    }
    println!("U empty mod 256: {:?}", report.eliminated_by_sieve);
    println!("undecided: {:?}", report.undecided);
    println!("remaining ({}): {:?}", report.final_set.len(), report.final_set);
    println!("elapsed {:.1?}", t0.elapsed());
    Ok(())
}

//! Fake 2-Selmer sets of the surviving curves.
//!
//! `cargo run --release --example selmer -- 28 2 3 15`

use std::path::Path;
use std::time::Instant;

use pdescent::edwards::Corpus;
use pdescent::selmer::{fake_selmer_set, setup_from_data, DescentSetup, DEFAULT_DEPTH_CAP};

fn main() -> pdescent::error::Result<()> {
    let corpus = Corpus::builtin();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let indices = if args.is_empty() { vec![28, 2] } else { args };
    for i in indices {
        let t0 = Instant::now();
        let curve = corpus.curve(i)?;
        let label = format!("f{}", i);
        let setup = if curve.f.factor_over_rationals()?.factors.len() == 1 {
            setup_from_data(&label, curve, &data, i)?
        } else {
            DescentSetup::over_rationals(&label, curve)?
        };
        let places = setup.default_places()?;
        let set = fake_selmer_set(&setup, &places, DEFAULT_DEPTH_CAP)?;
        println!(
            "{}: field {}, degrees {:?}, |G| = {}, {} candidates, {} survive ({} undecided), {:.2}s",
            label,
            set.field,
            setup.degrees(),
            setup.cover_order,
            set.candidates.len(),
            set.survivors().len(),
            set.undecided(),
            t0.elapsed().as_secs_f64()
        );
        for m in set.survivors() {
            println!("    {:?}", setup.labels(m));
        }
        for s in &set.stats {
            if s.eliminated > 0 || s.seconds > 1.0 {
                println!("    {:>4}: -{} of {} ({} keys, {:.2}s)", s.place, s.eliminated, s.tested, s.local_keys, s.seconds);
            }
        }
    }
    Ok(())
}

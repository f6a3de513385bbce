//! Local solubility of `y^2 = f(u,v)` at a few places for chosen indices.
//!
//! Usage: `cargo run --release --example local_scan -- 1 7 36`

use pdescent::edwards::{fast_places, Corpus};
use pdescent::local::curve_locally_soluble;
use pdescent::selmer::DEFAULT_DEPTH_CAP;

fn main() -> pdescent::error::Result<()> {
    let corpus = Corpus::builtin();
    let mut idx: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if idx.is_empty() {
        idx = vec![1, 36, 46, 2];
    }
    for i in idx {
        let c = corpus.curve(i)?;
        let line: Vec<String> = fast_places()
            .into_iter()
            .map(|pl| {
                let r = curve_locally_soluble(&c, pl, DEFAULT_DEPTH_CAP);
                match r.witness {
                    Some(w) => format!("{}: {:?} at x = {}", pl, r.verdict, w.x),
                    None => format!("{}: {:?}", pl, r.verdict),
                }
            })
            .collect();
        println!("f{}\n  {}", i, line.join("\n  "));
    }
    Ok(())
}

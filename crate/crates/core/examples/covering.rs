//! Order of the covering group and genus of the 2-covers for each factorization type.

use pdescent::edwards::{default_data_dir, descent_setup, Corpus};
use pdescent::selmer::{block_incidence, cover_genus, covering_group_order};

fn main() -> pdescent::error::Result<()> {
    let corpus = Corpus::builtin();
    let g = 14;
    for degrees in [vec![30], vec![10, 20], vec![6, 12, 12], vec![1, 1, 4, 4, 4, 8, 8]] {
        let vs = block_incidence(&degrees);
        let n: usize = degrees.iter().sum();
        let order = covering_group_order(&vs, n);
        println!("{:?}: order {}, cover genus {}", degrees, order, cover_genus(order, g));
    }
    let s = descent_setup(&corpus, 15, &default_data_dir())?;
    println!("f15 over {}: order {}, cover genus {}", s.field.name, s.cover_order, cover_genus(s.cover_order, g));
    Ok(())
}

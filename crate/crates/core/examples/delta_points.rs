//! Images of the known rational points under the descent map.

use num_bigint::BigInt;
use pdescent::arith::int;
use pdescent::edwards::{default_data_dir, descent_setup, Corpus};

fn main() -> pdescent::error::Result<()> {
    let corpus = Corpus::builtin();
    let cases: [(usize, &[(i64, i64, i64)]); 3] = [
        (28, &[(0, 1, 1), (0, 1, -1), (1, 0, 2985984)]),
        (2, &[(0, 1, 1), (0, 1, -1)]),
        (3, &[(1, 0, 0), (0, 1, 0)]),
    ];
    for (i, pts) in cases {
        let s = descent_setup(&corpus, i, &default_data_dir())?;
        for &(u, v, y) in pts {
            let m = pdescent::selmer::delta_map(&s, &int(u), &int(v), &BigInt::from(y))?;
            println!("f{} ({}:{}:{}) -> {:?}", i, u, v, y, s.labels(m));
        }
    }
    Ok(())
}

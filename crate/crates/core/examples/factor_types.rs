//! Factorization types over Q of the forms f_i that survive the local stage.

use pdescent::edwards::{eliminate_indices, factorization_type_census, Corpus, EliminationConfig};

fn main() -> pdescent::error::Result<()> {
    let corpus = Corpus::builtin();
    let report = eliminate_indices(&corpus, &EliminationConfig::default())?;
    let census = factorization_type_census(&corpus, &report.final_set)?;
    for (degrees, idx) in &census {
        println!("{:?}  x{}  {:?}", degrees, idx.len(), idx);
    }
    for i in [28, 2, 3] {
        let fac = corpus.get(i)?.f.factor_over_rationals()?;
        println!("f_{} = {} *", i, pdescent::arith::fmt_rat(&fac.content));
        for (g, e) in &fac.factors {
            println!("    {}^{}", g, e);
        }
    }
    Ok(())
}

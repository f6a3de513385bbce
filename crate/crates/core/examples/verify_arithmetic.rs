//! Verifies the shipped arithmetic data for the quintic fields: integral basis, units,
//! class number one via Minkowski witnesses, and the `K(S,2)` generators.

use std::path::PathBuf;

use pdescent::arithdata::{verify_arithmetic_data, ArithmeticDataFile};

fn main() -> pdescent::error::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/arithmetic_data");
    let mut names: Vec<PathBuf> = std::fs::read_dir(&dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    names.sort();
    for path in names {
        let t0 = std::time::Instant::now();
        let data = ArithmeticDataFile::load(&path)?;
        let v = verify_arithmetic_data(&data)?;
        println!("{} ({:.1?})", v.report.field, t0.elapsed());
        for c in &v.report.checks {
            println!("  [{}] {}: {}", if c.ok { "ok" } else { "FAIL" }, c.check, c.detail);
        }
        println!("  K(S,2) has order {}", v.group.order());
    }
    Ok(())
}

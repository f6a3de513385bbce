use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pdescent::edwards::{
    check_triple, default_data_dir, descent_setup, eliminate_indices, factorization_type_census, fast_places,
    primitivity_sieve, Corpus, EliminationConfig, PlaceSelection,
};
use pdescent::error::Result;
use pdescent::local::{curve_locally_soluble, Place, Verdict};
use pdescent::selmer::{fake_selmer_set, DEFAULT_DEPTH_CAP};

#[derive(Parser, Debug)]
#[command(name = "pdescent", version, about = "Partial 2-descent and the x^3 + y^4 + z^5 = 0 pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Restrict to these indices (repeatable).
    #[arg(long, global = true)]
    index: Vec<usize>,
    /// Local places to test (`inf` or a prime; repeatable).
    #[arg(long, global = true)]
    place: Vec<String>,
    /// Finite primes below this bound join the Selmer place set.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..))]
    prime_bound: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH_CAP, value_parser = clap::value_parser!(u32).range(1..))]
    depth_cap: u32,
    #[arg(long, global = true, default_value_t = 256)]
    modulus: u64,
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Identity, integrality, degrees and squarefreeness of all 49 triples.
    VerifyCorpus,
    /// Local solubility of the curves at the chosen places.
    LocalScan,
    /// The mod-2^k primitivity sieve.
    Sieve256,
    /// Local tests followed by the sieve.
    Eliminate {
        /// Test every place up to 4g^2 and the discriminant primes.
        #[arg(long)]
        full: bool,
    },
    /// Factorization types over Q.
    FactorTypes,
    /// Fake 2-Selmer set of one or more curves.
    Selmer,
    /// Everything in order.
    Pipeline {
        #[arg(long)]
        full: bool,
    },
}

struct Outcome {
    report: Value,
    tsv: String,
    undecided: bool,
    failed: bool,
}

impl Outcome {
    fn ok(report: Value, tsv: String) -> Self {
        Outcome { report, tsv, undecided: false, failed: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.report).expect("serializable")),
                Format::Tsv => print!("{}", out.tsv),
            }
            if out.failed {
                ExitCode::from(1)
            } else if out.undecided {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}

fn data_dir(cli: &Cli) -> PathBuf {
    cli.data_dir.clone().unwrap_or_else(default_data_dir)
}

fn config(cli: &Cli, corpus: &Corpus) -> Value {
    json!({
        "index": cli.index,
        "place": cli.place,
        "prime_bound": cli.prime_bound,
        "depth_cap": cli.depth_cap,
        "modulus": cli.modulus,
        "data_dir": data_dir(cli).display().to_string(),
        "table_sha256": corpus.table_checksum,
    })
}

fn indices(cli: &Cli, default: Vec<usize>) -> Vec<usize> {
    if cli.index.is_empty() {
        default
    } else {
        cli.index.clone()
    }
}

fn places(cli: &Cli) -> Result<Option<Vec<Place>>> {
    if cli.place.is_empty() {
        return Ok(None);
    }
    cli.place.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>().map(Some)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let corpus = Corpus::load(&data_dir(cli))?;
    let mut out = match &cli.command {
        Command::VerifyCorpus => verify_corpus(cli, &corpus),
        Command::LocalScan => local_scan(cli, &corpus)?,
        Command::Sieve256 => sieve(cli, &corpus)?,
        Command::Eliminate { full } => eliminate(cli, &corpus, *full)?,
        Command::FactorTypes => factor_types(cli, &corpus)?,
        Command::Selmer => selmer(cli, &corpus)?,
        Command::Pipeline { full } => {
            let parts = [
                ("verify_corpus", verify_corpus(cli, &corpus)),
                ("eliminate", eliminate(cli, &corpus, *full)?),
                ("factor_types", factor_types(cli, &corpus)?),
                ("selmer", selmer(cli, &corpus)?),
            ];
            let mut report = serde_json::Map::new();
            let mut tsv = String::new();
            let (mut und, mut failed) = (false, false);
            for (name, o) in parts {
                report.insert(name.into(), o.report);
                tsv.push_str(&format!("# {}\n{}", name, o.tsv));
                und |= o.undecided;
                failed |= o.failed;
            }
            Outcome { report: Value::Object(report), tsv, undecided: und, failed }
        }
    };
    if let Value::Object(m) = &mut out.report {
        m.insert("config".into(), config(cli, &corpus));
    }
    Ok(out)
}

fn verify_corpus(cli: &Cli, corpus: &Corpus) -> Outcome {
    let checks: Vec<_> = indices(cli, (1..=49).collect())
        .into_iter()
        .map(|i| corpus.get(i).map(check_triple))
        .collect();
    let mut rows = Vec::new();
    let mut tsv = String::from("index\tidentity\tintegral\tdegrees\tsquarefree\n");
    let mut failed = false;
    for c in checks {
        match c {
            Ok(c) => {
                failed |= !c.ok();
                tsv.push_str(&format!(
                    "{}\t{}\t{}\t{:?}\t{}\n",
                    c.index, c.identity, c.integral, c.degrees, c.squarefree
                ));
                rows.push(json!(c));
            }
            Err(e) => {
                failed = true;
                rows.push(json!({"error": e.to_string()}));
            }
        }
    }
    Outcome { report: json!({"checks": rows, "ok": !failed}), tsv, undecided: false, failed }
}

fn local_scan(cli: &Cli, corpus: &Corpus) -> Result<Outcome> {
    let explicit = places(cli)?;
    let mut rows = Vec::new();
    let mut tsv = String::from("index\tplace\tverdict\n");
    let mut undecided = false;
    for i in indices(cli, (1..=49).collect()) {
        let c = corpus.curve(i)?;
        let ps = explicit.clone().unwrap_or_else(fast_places);
        for pl in ps {
            let r = curve_locally_soluble(&c, pl, cli.depth_cap);
            undecided |= r.verdict == Verdict::DepthExceeded;
            tsv.push_str(&format!("{}\t{}\t{:?}\n", i, pl, r.verdict));
            rows.push(json!({"index": i, "report": r}));
        }
    }
    Ok(Outcome { report: json!({"scan": rows}), tsv, undecided, failed: false })
}

fn sieve(cli: &Cli, corpus: &Corpus) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut empty = Vec::new();
    let mut tsv = String::from("index\tsize\n");
    for i in indices(cli, (1..=49).collect()) {
        let u = primitivity_sieve(corpus.get(i)?, cli.modulus);
        if u.is_empty() {
            empty.push(i);
        }
        tsv.push_str(&format!("{}\t{}\n", i, u.len()));
        rows.push(json!({"index": i, "size": u.len()}));
    }
    Ok(Outcome::ok(json!({"modulus": cli.modulus, "sizes": rows, "empty": empty}), tsv))
}

fn eliminate(cli: &Cli, corpus: &Corpus, full: bool) -> Result<Outcome> {
    let cfg = EliminationConfig {
        places: match places(cli)? {
            Some(v) => PlaceSelection::Explicit(v),
            None if full => PlaceSelection::Full,
            None => PlaceSelection::Fast,
        },
        depth_cap: cli.depth_cap,
        modulus: cli.modulus,
        indices: indices(cli, (1..=49).collect()),
    };
    let report = eliminate_indices(corpus, &cfg)?;
    let undecided = !report.undecided.is_empty();
    Ok(Outcome { tsv: report.to_tsv(), report: json!(report), undecided, failed: false })
}

/// Survivors of the fast elimination, or the requested indices.
fn survivors(cli: &Cli, corpus: &Corpus) -> Result<Vec<usize>> {
    if !cli.index.is_empty() {
        return Ok(cli.index.clone());
    }
    Ok(eliminate_indices(corpus, &EliminationConfig::default())?.final_set)
}

fn factor_types(cli: &Cli, corpus: &Corpus) -> Result<Outcome> {
    let census = factorization_type_census(corpus, &survivors(cli, corpus)?)?;
    let mut tsv = String::from("type\tcount\tindices\n");
    let mut rows = Vec::new();
    for (d, idx) in &census {
        tsv.push_str(&format!("{:?}\t{}\t{:?}\n", d, idx.len(), idx));
        rows.push(json!({"type": d, "indices": idx}));
    }
    Ok(Outcome::ok(json!({"census": rows}), tsv))
}

fn selmer(cli: &Cli, corpus: &Corpus) -> Result<Outcome> {
    let dir = data_dir(cli);
    let explicit = places(cli)?;
    let mut reports = Vec::new();
    let mut tsv = String::from("index\tfield\tcandidates\tsurvivors\tundecided\n");
    let mut undecided = false;
    for i in survivors(cli, corpus)? {
        let setup = descent_setup(corpus, i, &dir)?;
        let ps = match &explicit {
            Some(v) => v.clone(),
            None => setup.places_below(cli.prime_bound)?,
        };
        let set = fake_selmer_set(&setup, &ps, cli.depth_cap)?;
        undecided |= set.undecided() > 0;
        tsv.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            i,
            set.field,
            set.candidates.len(),
            set.survivors().len(),
            set.undecided()
        ));
        reports.push(set.to_json(&setup, 4096));
    }
    let report = if reports.len() == 1 { reports.pop().expect("one report") } else { json!({"sets": reports}) };
    Ok(Outcome { report, tsv, undecided, failed: false })
}

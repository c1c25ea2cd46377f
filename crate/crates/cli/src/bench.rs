//! `subiso bench`: generated instances times algorithms, one CSV row each.
//!
//! ```toml
//! quantity = "sub"
//! algorithms = ["mitm", "polyspace"]
//! seed = 1
//!
//! [[instance]]
//! family = "path"      # path | cycle | tree | grid
//! sizes = [3, 4, 5]
//! n = 10
//! p = 0.5
//! repeats = 1
//! ```

use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use subiso::count::{count, Algorithm, CountOptions, Quantity};
use subiso::gen::{random_graph, PatternFamily};

const MAX_HOST: usize = 64;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_quantity")]
    quantity: String,
    algorithms: Vec<String>,
    #[serde(default)]
    seed: u64,
    #[serde(default, rename = "instance")]
    instances: Vec<RawInstance>,
}

fn default_quantity() -> String {
    "sub".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    family: String,
    sizes: Vec<usize>,
    n: usize,
    p: f64,
    #[serde(default = "one")]
    repeats: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug)]
pub struct Config {
    quantity: Quantity,
    algorithms: Vec<Algorithm>,
    seed: u64,
    instances: Vec<(PatternFamily, RawInstance)>,
}

impl Config {
    /// Parses and validates; every problem here is a configuration error.
    pub fn parse(text: &str) -> Result<Config> {
        let raw: RawConfig = toml::from_str(text).context("malformed bench config")?;
        let quantity: Quantity = raw.quantity.parse().map_err(anyhow::Error::msg)?;
        if raw.algorithms.is_empty() {
            bail!("bench config lists no algorithms");
        }
        let mut algorithms = Vec::new();
        for name in &raw.algorithms {
            let a: Algorithm = name.parse().map_err(anyhow::Error::msg)?;
            if !a.supports(quantity) {
                bail!("algorithm `{a}` cannot count `{quantity}`");
            }
            algorithms.push(a);
        }
        let mut instances = Vec::new();
        for inst in raw.instances {
            let family: PatternFamily = inst.family.parse().map_err(anyhow::Error::msg)?;
            if !(0.0..=1.0).contains(&inst.p) {
                bail!("edge probability {} outside [0, 1]", inst.p);
            }
            if inst.n > MAX_HOST {
                bail!("host order {} above {MAX_HOST}", inst.n);
            }
            instances.push((family, inst));
        }
        Ok(Config {
            quantity,
            algorithms,
            seed: raw.seed,
            instances,
        })
    }
}

const HEADER: [&str; 16] = [
    "row",
    "family",
    "k",
    "n",
    "p",
    "repeat",
    "edges",
    "quantity",
    "algorithm",
    "value",
    "elapsed_ms",
    "anchors",
    "hom_evaluations",
    "gate_visits",
    "peak_table_entries",
    "agrees",
];

/// Writes the CSV; returns whether every instance's algorithms agreed.
pub fn run(config: &Config, opts: &CountOptions, out: impl Write) -> Result<bool> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut row = 0usize;
    let mut all_agree = true;
    for (family, inst) in &config.instances {
        for &k in &inst.sizes {
            for repeat in 0..inst.repeats {
                let pattern = family.build(k, &mut rng).map_err(anyhow::Error::msg)?;
                let host = random_graph(inst.n, inst.p, &mut rng);
                let mut first = None;
                for &algorithm in &config.algorithms {
                    let start = Instant::now();
                    let result = count(config.quantity, algorithm, &pattern, &host, None, opts)
                        .with_context(|| {
                            format!("{} k={k} n={} with {algorithm}", inst.family, inst.n)
                        })?;
                    let elapsed = start.elapsed().as_millis();
                    let agrees = first.get_or_insert_with(|| result.value.clone()) == &result.value;
                    all_agree &= agrees;
                    w.write_record([
                        row.to_string(),
                        inst.family.clone(),
                        k.to_string(),
                        inst.n.to_string(),
                        inst.p.to_string(),
                        repeat.to_string(),
                        host.edge_count().to_string(),
                        config.quantity.to_string(),
                        algorithm.to_string(),
                        result.value.to_string(),
                        elapsed.to_string(),
                        result.stats.anchors.to_string(),
                        result.stats.hom_evaluations.to_string(),
                        result.stats.gate_visits.to_string(),
                        result.stats.peak_table_entries.to_string(),
                        agrees.to_string(),
                    ])?;
                    row += 1;
                }
            }
        }
    }
    w.flush()?;
    Ok(all_agree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_text(text: &str) -> (String, bool) {
        let cfg = Config::parse(text).unwrap();
        let mut buf = Vec::new();
        let ok = run(&cfg, &CountOptions::default(), &mut buf).unwrap();
        (String::from_utf8(buf).unwrap(), ok)
    }

    #[test]
    fn empty_instance_list_is_header_only() {
        let (csv, ok) = run_text("algorithms = [\"mitm\"]\n");
        assert!(ok);
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("row,family,k,n"));
    }

    #[test]
    fn paired_rows_agree() {
        let (csv, ok) = run_text(
            "algorithms = [\"mitm\", \"polyspace\"]\nseed = 3\n\
             [[instance]]\nfamily = \"path\"\nsizes = [3, 4, 5]\nn = 10\np = 0.5\n",
        );
        assert!(ok);
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    }

    #[test]
    fn config_errors() {
        assert!(Config::parse("algorithms = [\"quantum\"]").is_err());
        assert!(Config::parse("algorithms = []").is_err());
        assert!(Config::parse("quantity = \"hom\"\nalgorithms = [\"mitm\"]").is_err());
        assert!(Config::parse("algorithms = [\"dp\"\n").is_err());
        assert!(Config::parse(
            "algorithms = [\"mitm\"]\n[[instance]]\nfamily = \"star\"\nsizes = [3]\nn = 5\np = 0.5\n"
        )
        .is_err());
        assert!(Config::parse(
            "algorithms = [\"mitm\"]\n[[instance]]\nfamily = \"path\"\nsizes = [3]\nn = 5\np = 1.5\n"
        )
        .is_err());
    }
}

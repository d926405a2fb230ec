//! Command-line front end: distance measures between channel files, random
//! benchmark distributions, self-check suites, the measurement-based
//! estimator, and family constructors.

use clap::{Parser, Subcommand};
use qchan::bench::{run_bench, write_csv, BenchConfig};
use qchan::circuit::{estimate_superfidelity, ShotPlan};
use qchan::spec_file::{load_channel, ChannelSpec};
use qchan::verify::{run_suite_sized, SuiteReport, SUITES};
use qchan::{
    dephasing_qubit, depolarizing, pauli_channel, process_metrics, process_metrics_unvalidated,
    werner_holevo, QchanError, RandomSource, C64,
};
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qchan",
    version,
    about = "Quantum channel representations and superfidelity-based distance measures"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text (including on errors).
    #[arg(long, global = true)]
    json: bool,
    /// Base seed for every randomized command.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Skip the CP/TP validation of parsed channels where possible.
    #[arg(long, global = true)]
    no_validate: bool,
    /// Write the primary output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute every distance measure between two channel files.
    Metric { a: PathBuf, b: PathBuf },
    /// Sample the distance distributions over random state pairs and write
    /// summaries as CSV (see `--out`).
    Bench {
        /// Dimensions to run: a range like "2-9" and/or comma-separated values.
        #[arg(long, default_value = "2-9")]
        dims: String,
        /// Random pairs per dimension.
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        /// Wishart rank of the sampled states (default: full rank).
        #[arg(long)]
        rank: Option<usize>,
        /// Run the large preset of 10^6 pairs per dimension.
        #[arg(long)]
        full_scale: bool,
    },
    /// Run a named self-check suite, or `all`.
    Verify {
        suite: String,
        /// Override the number of sampled instances per suite.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Estimate the superfidelity of two channel files from simulated
    /// measurement counts (three interference stages).
    Circuit {
        a: PathBuf,
        b: PathBuf,
        /// Shots per stage; 0 reproduces the exact values.
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
    },
    /// Build a parametric family member and print its canonical Kraus JSON.
    Family {
        #[command(subcommand)]
        which: FamilyCmd,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Depolarizing channel: identity with weight p, maximal mixing otherwise.
    Depolarizing { d: usize, p: f64 },
    /// Transpose variant of the depolarizing channel (restricted p-range).
    WernerHolevo { d: usize, p: f64 },
    /// Mixed discrete-Weyl channel; probs is d*d comma-separated weights
    /// for X^i Z^j in row-major (i, j) order.
    Pauli { d: usize, probs: String },
    /// Qubit dephasing with off-diagonal factor f, written like "0.5+0.5i".
    Dephasing { f: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let payload =
                    serde_json::json!({ "error": e.to_string(), "exit_code": code });
                println!("{payload}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &QchanError) -> u8 {
    match e {
        QchanError::Parse(_)
        | QchanError::InvalidParameter { .. }
        | QchanError::NotDistribution(_) => 2,
        QchanError::Validation(_) | QchanError::NotPositive { .. } | QchanError::NotHermitian { .. } => 3,
        QchanError::DimMismatch { .. } => 4,
        _ => 1,
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), QchanError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(Into::into),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, QchanError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| QchanError::Io(e.to_string()))
}

fn run(cli: &Cli) -> Result<u8, QchanError> {
    match &cli.cmd {
        Cmd::Metric { a, b } => {
            let a = load_channel(a)?;
            let b = load_channel(b)?;
            let report = if cli.no_validate {
                process_metrics_unvalidated(&a, &b)?
            } else {
                process_metrics(&a, &b)?
            };
            let text = if cli.json {
                to_json(&report)?
            } else {
                report.to_text()
            };
            emit(cli, &text)?;
            Ok(0)
        }
        Cmd::Bench {
            dims,
            pairs,
            rank,
            full_scale,
        } => {
            let dims = parse_dims(dims)?;
            let pairs = if *full_scale { 1_000_000 } else { *pairs };
            let cfg = BenchConfig {
                dims,
                pairs,
                rank: *rank,
                seed: cli.seed,
            };
            eprintln!(
                "bench: {} dims × {} pairs each (rank {}), seed {} — {} samples total",
                cfg.dims.len(),
                cfg.pairs,
                cfg.rank.map_or("full".to_string(), |r| r.to_string()),
                cfg.seed,
                cfg.dims.len() * cfg.pairs
            );
            let stats = run_bench(&cfg)?;
            match (&cli.out, cli.json) {
                (Some(path), _) => {
                    let file = std::fs::File::create(path)?;
                    let mut w = std::io::BufWriter::new(file);
                    write_csv(&mut w, &stats)?;
                    w.flush()?;
                }
                (None, true) => print!("{}", to_json(&stats)?),
                (None, false) => {
                    return Err(QchanError::InvalidParameter {
                        name: "--out".into(),
                        value: "missing".into(),
                        bound: "a CSV path (or --json for stdout summaries)".into(),
                    })
                }
            }
            Ok(0)
        }
        Cmd::Verify { suite, n } => {
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let reports = names
                .iter()
                .map(|name| run_suite_sized(name, cli.seed, *n))
                .collect::<Result<Vec<SuiteReport>, _>>()?;
            let text = if cli.json {
                to_json(&reports)?
            } else {
                reports.iter().map(|r| r.to_text()).collect::<String>()
            };
            emit(cli, &text)?;
            Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
        }
        Cmd::Circuit { a, b, shots } => {
            let a = load_channel(a)?;
            let b = load_channel(b)?;
            let mut rng = RandomSource::new(cli.seed).rng();
            let report = estimate_superfidelity(&a, &b, &ShotPlan::uniform(*shots), &mut rng)?;
            let text = if cli.json {
                to_json(&report)?
            } else {
                report.to_text()
            };
            emit(cli, &text)?;
            Ok(0)
        }
        Cmd::Family { which } => {
            let channel = match which {
                FamilyCmd::Depolarizing { d, p } => depolarizing(*d, *p)?,
                FamilyCmd::WernerHolevo { d, p } => werner_holevo(*d, *p)?,
                FamilyCmd::Pauli { d, probs } => pauli_channel(*d, &parse_floats(probs)?)?,
                FamilyCmd::Dephasing { f } => dephasing_qubit(parse_complex(f)?)?,
            };
            let spec = ChannelSpec::canonical_kraus(&channel)?;
            let text = to_json(&spec)?;
            emit(cli, &text)?;
            Ok(0)
        }
    }
}

/// Parses a dimension list: comma-separated entries, each a value or an
/// inclusive range like "3-5". The benchmark supports dimensions 2 through 9.
fn parse_dims(s: &str) -> Result<Vec<usize>, QchanError> {
    let bad = |token: &str| QchanError::InvalidParameter {
        name: "--dims".into(),
        value: token.into(),
        bound: "values or ranges within 2..=9, e.g. \"2-9\" or \"2,3,5\"".into(),
    };
    let mut dims = Vec::new();
    for token in s.split(',') {
        let token = token.trim();
        if let Some((lo, hi)) = token.split_once('-') {
            let lo: usize = lo.trim().parse().map_err(|_| bad(token))?;
            let hi: usize = hi.trim().parse().map_err(|_| bad(token))?;
            if lo > hi {
                return Err(bad(token));
            }
            dims.extend(lo..=hi);
        } else {
            dims.push(token.parse().map_err(|_| bad(token))?);
        }
    }
    if dims.is_empty() || dims.iter().any(|&d| !(2..=9).contains(&d)) {
        return Err(bad(s));
    }
    Ok(dims)
}

fn parse_floats(s: &str) -> Result<Vec<f64>, QchanError> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| {
                QchanError::Parse(format!("not a number: {t:?}"))
            })
        })
        .collect()
}

/// Parses a complex literal like "0.5", "-0.3i", "0.5+0.5i" or "1e-2-3e-4i".
fn parse_complex(s: &str) -> Result<C64, QchanError> {
    let bad = || QchanError::Parse(format!("not a complex number: {s:?}"));
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err(bad());
    }
    let imag_coeff = |c: &str| -> Result<f64, QchanError> {
        match c {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            other => other.parse().map_err(|_| bad()),
        }
    };
    if let Some(body) = t.strip_suffix('i') {
        // Split at the last sign that is not leading and not an exponent sign.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(idx, ch)| {
                (ch == '+' || ch == '-')
                    && !matches!(body.as_bytes()[idx - 1], b'e' | b'E')
            })
            .map(|(idx, _)| idx)
            .last();
        match split {
            Some(idx) => {
                let re: f64 = body[..idx].parse().map_err(|_| bad())?;
                Ok(C64::new(re, imag_coeff(&body[idx..])?))
            }
            None => Ok(C64::new(0.0, imag_coeff(body)?)),
        }
    } else {
        Ok(C64::new(t.parse().map_err(|_| bad())?, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parser_handles_ranges_and_lists() {
        assert_eq!(parse_dims("2-4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_dims("2,5,9").unwrap(), vec![2, 5, 9]);
        assert_eq!(parse_dims("2-3,7").unwrap(), vec![2, 3, 7]);
        assert!(parse_dims("1-3").is_err());
        assert!(parse_dims("10").is_err());
        assert!(parse_dims("4-2").is_err());
        assert!(parse_dims("").is_err());
    }

    #[test]
    fn complex_parser_covers_the_documented_forms() {
        let close = |z: C64, re: f64, im: f64| (z.re - re).abs() < 1e-15 && (z.im - im).abs() < 1e-15;
        assert!(close(parse_complex("0.5").unwrap(), 0.5, 0.0));
        assert!(close(parse_complex("-0.3i").unwrap(), 0.0, -0.3));
        assert!(close(parse_complex("0.5+0.5i").unwrap(), 0.5, 0.5));
        assert!(close(parse_complex("1e-2-3e-4i").unwrap(), 1e-2, -3e-4));
        assert!(close(parse_complex("i").unwrap(), 0.0, 1.0));
        assert!(close(parse_complex("-i").unwrap(), 0.0, -1.0));
        assert!(close(parse_complex("2E3+1E-1i").unwrap(), 2e3, 0.1));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("fish").is_err());
        assert!(parse_complex("1+2j").is_err());
    }

    #[test]
    fn float_list_parser_reports_the_offender() {
        assert_eq!(parse_floats("0.5, 0.5").unwrap(), vec![0.5, 0.5]);
        assert!(parse_floats("0.5,x").is_err());
    }
}

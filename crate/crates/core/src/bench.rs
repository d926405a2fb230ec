//! Distribution benchmarks of the distance measures over random state pairs.
//!
//! Sampling is organized into fixed-size blocks, each driven by a child
//! stream derived from `(seed, dim, block index)`, so results are
//! byte-identical regardless of thread count, of which other dimensions are
//! in the run, and of how work is scheduled. Summaries are computed over the
//! sorted sample (including the mean, folded in sorted order), which makes
//! the emitted CSV reproducible byte for byte.

use crate::error::{QchanError, Result};
use crate::metrics::MetricReport;
use crate::random::{random_density_with_rank, RandomSource};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

/// Metrics reported by the benchmark, in column order.
pub const BENCH_METRICS: [&str; 6] = [
    "fidelity",
    "superfidelity",
    "trace_distance",
    "root_infidelity_cf",
    "root_superinfidelity_cg",
    "angle_ag2",
];

pub const HISTOGRAM_BINS: usize = 100;
const BLOCK_SIZE: usize = 256;

/// What to sample: state dimensions, pairs per dimension, Wishart rank
/// (`None` = full rank) and the base seed.
#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub dims: Vec<usize>,
    pub pairs: usize,
    pub rank: Option<usize>,
    pub seed: u64,
}

/// Summary of one metric's sample at one dimension.
#[derive(Debug, Clone, Serialize)]
pub struct SampleStats {
    pub metric: &'static str,
    pub dim: usize,
    pub rank: usize,
    pub seed: u64,
    pub n_pairs: usize,
    pub mean: f64,
    pub p5: f64,
    pub p95: f64,
    /// Support of the histogram (metric-dependent).
    pub lo: f64,
    pub hi: f64,
    pub histogram: Vec<u64>,
}

fn metric_range(metric: &str) -> (f64, f64) {
    if metric == "angle_ag2" {
        (0.0, std::f64::consts::FRAC_PI_2)
    } else {
        (0.0, 1.0)
    }
}

/// Nearest-rank percentile of an ascending sample: entry `⌈q·n⌉` (1-based).
pub fn nearest_rank_percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    assert!(q > 0.0 && q <= 1.0, "quantile must lie in (0, 1]");
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Uniform histogram over `[lo, hi)` with a closed last bin; stray values are
/// clamped into the boundary bins.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    assert!(bins > 0 && hi > lo, "degenerate histogram layout");
    let mut counts = vec![0u64; bins];
    let scale = bins as f64 / (hi - lo);
    for &v in values {
        let idx = (((v - lo) * scale).floor() as isize).clamp(0, bins as isize - 1);
        counts[idx as usize] += 1;
    }
    counts
}

fn with_pool<T, F>(f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match std::env::var("QCHAN_THREADS") {
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| QchanError::InvalidParameter {
                name: "QCHAN_THREADS".into(),
                value: raw.clone(),
                bound: "a positive integer".into(),
            })?;
            if n == 0 {
                return Err(QchanError::InvalidParameter {
                    name: "QCHAN_THREADS".into(),
                    value: raw,
                    bound: "a positive integer".into(),
                });
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| QchanError::Numerical(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

fn sample_block(source: RandomSource, dim: usize, rank: usize, count: usize) -> Result<Vec<[f64; 6]>> {
    let mut rng = source.rng();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let rho = random_density_with_rank(&mut rng, dim, rank);
        let sigma = random_density_with_rank(&mut rng, dim, rank);
        let rep = MetricReport::between_states(&rho, &sigma)?;
        out.push([
            rep.fidelity,
            rep.superfidelity,
            rep.trace_distance,
            rep.root_infidelity_cf,
            rep.root_superinfidelity_cg,
            rep.angle_ag2,
        ]);
    }
    Ok(out)
}

/// Runs the benchmark and returns one [`SampleStats`] per (dimension, metric),
/// dimensions in the order given, metrics in [`BENCH_METRICS`] order.
///
/// Honors the `QCHAN_THREADS` environment variable (read at call time) for
/// the worker count; the output does not depend on it.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<SampleStats>> {
    if cfg.dims.is_empty() {
        return Err(QchanError::InvalidParameter {
            name: "dims".into(),
            value: "[]".into(),
            bound: "at least one dimension".into(),
        });
    }
    for &d in &cfg.dims {
        if d < 2 {
            return Err(QchanError::InvalidParameter {
                name: "dims".into(),
                value: format!("{d}"),
                bound: "every dimension ≥ 2".into(),
            });
        }
    }
    if cfg.pairs == 0 {
        return Err(QchanError::InvalidParameter {
            name: "pairs".into(),
            value: "0".into(),
            bound: "≥ 1".into(),
        });
    }
    if let Some(r) = cfg.rank {
        if r == 0 {
            return Err(QchanError::InvalidParameter {
                name: "rank".into(),
                value: "0".into(),
                bound: "≥ 1".into(),
            });
        }
    }

    let mut out = Vec::with_capacity(cfg.dims.len() * BENCH_METRICS.len());
    for &dim in &cfg.dims {
        let rank = cfg.rank.unwrap_or(dim);
        let base = RandomSource::new(cfg.seed).derive(dim as u64);
        let n_blocks = cfg.pairs.div_ceil(BLOCK_SIZE);
        let blocks: Vec<Result<Vec<[f64; 6]>>> = with_pool(|| {
            (0..n_blocks)
                .into_par_iter()
                .map(|b| {
                    let count = BLOCK_SIZE.min(cfg.pairs - b * BLOCK_SIZE);
                    sample_block(base.derive(b as u64), dim, rank, count)
                })
                .collect()
        })?;

        let mut per_metric: Vec<Vec<f64>> =
            (0..BENCH_METRICS.len()).map(|_| Vec::with_capacity(cfg.pairs)).collect();
        for block in blocks {
            for row in block? {
                for (vec, &v) in per_metric.iter_mut().zip(row.iter()) {
                    vec.push(v);
                }
            }
        }

        for (values, &metric) in per_metric.iter_mut().zip(BENCH_METRICS.iter()) {
            values.sort_by(f64::total_cmp);
            let mean = values.iter().fold(0.0, |acc, &x| acc + x) / values.len() as f64;
            let (lo, hi) = metric_range(metric);
            out.push(SampleStats {
                metric,
                dim,
                rank,
                seed: cfg.seed,
                n_pairs: cfg.pairs,
                mean,
                p5: nearest_rank_percentile(values, 0.05),
                p95: nearest_rank_percentile(values, 0.95),
                lo,
                hi,
                histogram: histogram(values, lo, hi, HISTOGRAM_BINS),
            });
        }
    }
    Ok(out)
}

/// Writes the stats as CSV: a `#` provenance comment, a header, then one row
/// per (metric, dimension). Numbers use shortest round-trip formatting, so
/// identical runs produce identical bytes.
pub fn write_csv<W: Write>(mut w: W, stats: &[SampleStats]) -> Result<()> {
    writeln!(
        w,
        "# qchan {} | percentiles: nearest-rank, entry ceil(q*n) of the sorted sample | \
         histogram: {} uniform bins over [0,1] ([0,pi/2] for angle_ag2), half-open with \
         closed last bin",
        env!("CARGO_PKG_VERSION"),
        HISTOGRAM_BINS
    )?;
    write!(w, "metric,dim,k,seed,n_pairs,mean,p5,p95")?;
    for b in 0..HISTOGRAM_BINS {
        write!(w, ",bin_{b}")?;
    }
    writeln!(w)?;
    for s in stats {
        write!(
            w,
            "{},{},{},{},{},{},{},{}",
            s.metric, s.dim, s.rank, s.seed, s.n_pairs, s.mean, s.p5, s.p95
        )?;
        for c in &s.histogram {
            write!(w, ",{c}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    // Serializes tests that touch the QCHAN_THREADS environment variable.
    static ENV_LOCK: Mutex<()> = Mutex::new(());

    fn tiny_config() -> BenchConfig {
        BenchConfig {
            dims: vec![2],
            pairs: 600,
            rank: None,
            seed: 7,
        }
    }

    #[test]
    fn percentile_follows_the_nearest_rank_rule() {
        let sorted = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(nearest_rank_percentile(&sorted, 0.05), 1.0);
        assert_eq!(nearest_rank_percentile(&sorted, 0.5), 2.0);
        assert_eq!(nearest_rank_percentile(&sorted, 0.95), 4.0);
        assert_eq!(nearest_rank_percentile(&sorted, 1.0), 4.0);
        assert_eq!(nearest_rank_percentile(&[5.0], 0.05), 5.0);
    }

    #[test]
    fn histogram_bins_are_half_open_with_closed_end() {
        let counts = histogram(&[0.0, 0.0049, 0.995, 1.0], 0.0, 1.0, 100);
        assert_eq!(counts[0], 2);
        assert_eq!(counts[99], 2);
        assert_eq!(counts.iter().sum::<u64>(), 4);
        let mid = histogram(&[0.01], 0.0, 1.0, 100);
        assert_eq!(mid[1], 1);
    }

    #[test]
    fn bench_is_deterministic_and_thread_count_independent() {
        let _guard = ENV_LOCK.lock().unwrap_or_else(|e| e.into_inner());
        let cfg = tiny_config();
        std::env::remove_var("QCHAN_THREADS");
        let a = run_bench(&cfg).unwrap();
        std::env::set_var("QCHAN_THREADS", "2");
        let b = run_bench(&cfg).unwrap();
        std::env::set_var("QCHAN_THREADS", "1");
        let c = run_bench(&cfg).unwrap();
        std::env::remove_var("QCHAN_THREADS");
        for ((x, y), z) in a.iter().zip(&b).zip(&c) {
            assert_eq!(x.mean.to_bits(), y.mean.to_bits());
            assert_eq!(x.mean.to_bits(), z.mean.to_bits());
            assert_eq!(x.p5.to_bits(), y.p5.to_bits());
            assert_eq!(x.histogram, y.histogram);
            assert_eq!(x.histogram, z.histogram);
        }
    }

    #[test]
    fn rows_do_not_depend_on_which_other_dims_run() {
        let _guard = ENV_LOCK.lock().unwrap_or_else(|e| e.into_inner());
        std::env::remove_var("QCHAN_THREADS");
        let full = run_bench(&BenchConfig {
            dims: vec![2, 3],
            pairs: 300,
            rank: None,
            seed: 11,
        })
        .unwrap();
        let solo = run_bench(&BenchConfig {
            dims: vec![3],
            pairs: 300,
            rank: None,
            seed: 11,
        })
        .unwrap();
        let full_d3: Vec<_> = full.iter().filter(|s| s.dim == 3).collect();
        assert_eq!(full_d3.len(), solo.len());
        for (x, y) in full_d3.iter().zip(&solo) {
            assert_eq!(x.metric, y.metric);
            assert_eq!(x.mean.to_bits(), y.mean.to_bits());
            assert_eq!(x.histogram, y.histogram);
        }
    }

    #[test]
    fn superfidelity_dominates_fidelity_in_the_sample_means() {
        let _guard = ENV_LOCK.lock().unwrap_or_else(|e| e.into_inner());
        std::env::remove_var("QCHAN_THREADS");
        let stats = run_bench(&BenchConfig {
            dims: vec![2, 3],
            pairs: 400,
            rank: None,
            seed: 13,
        })
        .unwrap();
        let mean_of = |dim: usize, metric: &str| {
            stats
                .iter()
                .find(|s| s.dim == dim && s.metric == metric)
                .unwrap()
                .mean
        };
        // Qubits: superfidelity coincides with fidelity.
        assert!((mean_of(2, "superfidelity") - mean_of(2, "fidelity")).abs() < 1e-9);
        // Higher dimensions: strictly above.
        assert!(mean_of(3, "superfidelity") > mean_of(3, "fidelity") + 1e-4);
    }

    #[test]
    fn csv_layout_is_schema_stable() {
        let _guard = ENV_LOCK.lock().unwrap_or_else(|e| e.into_inner());
        std::env::remove_var("QCHAN_THREADS");
        let cfg = tiny_config();
        let stats = run_bench(&cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &stats).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        let comment = lines.next().unwrap();
        assert!(comment.starts_with("# qchan "));
        let header = lines.next().unwrap();
        assert_eq!(header.split(',').count(), 8 + HISTOGRAM_BINS);
        assert!(header.starts_with("metric,dim,k,seed,n_pairs,mean,p5,p95,bin_0"));
        let rows: Vec<_> = lines.collect();
        assert_eq!(rows.len(), BENCH_METRICS.len());
        for row in &rows {
            assert_eq!(row.split(',').count(), 8 + HISTOGRAM_BINS);
        }
        // Byte stability across a repeated identical run.
        let mut again = Vec::new();
        write_csv(&mut again, &run_bench(&cfg).unwrap()).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        assert!(run_bench(&BenchConfig {
            dims: vec![],
            pairs: 10,
            rank: None,
            seed: 0
        })
        .is_err());
        assert!(run_bench(&BenchConfig {
            dims: vec![1],
            pairs: 10,
            rank: None,
            seed: 0
        })
        .is_err());
        assert!(run_bench(&BenchConfig {
            dims: vec![2],
            pairs: 0,
            rank: None,
            seed: 0
        })
        .is_err());
        assert!(run_bench(&BenchConfig {
            dims: vec![2],
            pairs: 10,
            rank: Some(0),
            seed: 0
        })
        .is_err());
    }
}

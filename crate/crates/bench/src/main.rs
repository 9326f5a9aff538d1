use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ips4o::SortConfig;
use ips4o_bench::runner::{read_csv, selftest, write_csv};
use ips4o_bench::stats::{aggregate, AggregateOptions};
use ips4o_bench::{run_benchmark, Algorithm, DataType, Distribution, RunConfig};

#[derive(Parser)]
#[command(name = "ips4o-bench", version, about = "Benchmark harness for the ips4o sorters")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Time sorters on generated inputs and write one CSV row per repetition.
    ///
    /// Every list option takes comma-separated values and all combinations
    /// are run, one cell at a time. s4o-oop and stdsort are sequential and
    /// are recorded with threads=1.
    Run {
        /// ips4o, ips2ra, s4o-oop, stdsort
        #[arg(long, value_delimiter = ',', default_value = "ips4o")]
        algo: Vec<Algorithm>,
        /// uniform, exponential, zipf, rootdup, twodup, eightdup,
        /// almostsorted, sorted, reversesorted, zero
        #[arg(long, value_delimiter = ',', default_value = "uniform")]
        dist: Vec<Distribution>,
        /// u32, u64, f64, pair, quartet, 100b
        #[arg(long, value_delimiter = ',', default_value = "u64")]
        dtype: Vec<DataType>,
        #[arg(long, value_delimiter = ',', default_value = "1048576")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        threads: Vec<usize>,
        /// Timed repetitions per cell.
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Keep the first run of each cell instead of discarding it as a
        /// warm-up.
        #[arg(long)]
        no_warmup: bool,
        /// Disable voluntary work sharing between threads.
        #[arg(long)]
        no_work_sharing: bool,
        /// Write CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average slowdowns and performance profiles from `run` output.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Drop inputs smaller than this many bytes.
        #[arg(long, default_value_t = 1 << 18)]
        min_bytes: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,1.1,1.25,1.5,2,3,4,8")]
        tau_grid: Vec<f64>,
        /// Drop Sorted, ReverseSorted and Zero.
        #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
        exclude_easy: bool,
    },
    /// Compare every sorter against a reference sort on all distributions,
    /// types and a range of sizes.
    Selftest {
        #[arg(long, value_delimiter = ',', default_value = "1,4")]
        threads: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Run {
            algo,
            dist,
            dtype,
            n,
            threads,
            reps,
            seed,
            no_warmup,
            no_work_sharing,
            out,
        } => {
            let cfg = RunConfig {
                algos: algo,
                dists: dist,
                dtypes: dtype,
                sizes: n,
                threads,
                reps,
                seed,
                warmup: !no_warmup,
                sort: SortConfig {
                    work_sharing: !no_work_sharing,
                    ..SortConfig::default()
                },
            };
            let records = match run_benchmark(&cfg) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let written = match out {
                Some(p) => File::create(&p).map_err(csv::Error::from).and_then(|f| write_csv(&records, f)),
                None => write_csv(&records, io::stdout().lock()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
            let failed = records.iter().filter(|r| !r.success).count();
            if failed > 0 {
                eprintln!("{failed} run(s) failed validation");
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Cmd::Aggregate {
            input,
            min_bytes,
            mut tau_grid,
            exclude_easy,
        } => {
            let records = match File::open(&input).map_err(csv::Error::from).and_then(|f| read_csv(BufReader::new(f))) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}: {e}", input.display());
                    return ExitCode::FAILURE;
                }
            };
            tau_grid.sort_by(f64::total_cmp);
            let report = aggregate(
                &records,
                &AggregateOptions {
                    min_bytes,
                    exclude_easy,
                    tau_grid,
                },
            );
            let _ = io::stdout().write_all(report.to_csv().as_bytes());
            ExitCode::SUCCESS
        }
        Cmd::Selftest { threads, seed } => {
            let failures = selftest(&threads, &[seed, seed + 1], &SortConfig::default());
            for f in &failures {
                eprintln!("FAIL {f}");
            }
            if failures.is_empty() {
                println!("selftest passed");
                ExitCode::SUCCESS
            } else {
                println!("selftest: {} failure(s)", failures.len());
                ExitCode::FAILURE
            }
        }
    }
}

//! Slowdown factors, their geometric mean and performance profiles.

use std::collections::{BTreeMap, BTreeSet};

use crate::gen::Distribution;
use crate::runner::RunRecord;
use crate::types::DataType;

/// `times[a][i]` is the time of algorithm `a` on input `i`, `None` if it
/// failed. Each factor is the ratio to the best time on that input; failures
/// stay `None`. An input nobody sorted yields `None` everywhere.
pub fn slowdown_factors(times: &[Vec<Option<f64>>]) -> Vec<Vec<Option<f64>>> {
    let inputs = times.iter().map(Vec::len).max().unwrap_or(0);
    let best: Vec<Option<f64>> = (0..inputs)
        .map(|i| {
            times
                .iter()
                .filter_map(|row| row.get(i).copied().flatten())
                .reduce(f64::min)
        })
        .collect();
    times
        .iter()
        .map(|row| {
            row.iter()
                .zip(&best)
                .map(|(t, b)| match (t, b) {
                    (Some(t), Some(b)) => Some(t / b),
                    _ => None,
                })
                .collect()
        })
        .collect()
}

/// Geometric mean over the inputs that were sorted; `None` if none were.
pub fn average_slowdown(factors: &[Option<f64>]) -> Option<f64> {
    let ok: Vec<f64> = factors.iter().flatten().copied().collect();
    if ok.is_empty() {
        return None;
    }
    let mean_log = ok.iter().map(|f| f.ln()).sum::<f64>() / ok.len() as f64;
    Some(mean_log.exp())
}

/// Fraction of inputs sorted within a factor `τ` of the best, for each `τ`
/// of the ascending `grid`. Failures count in the denominator only.
pub fn performance_profile(factors: &[Option<f64>], grid: &[f64]) -> Vec<f64> {
    if factors.is_empty() {
        return vec![0.0; grid.len()];
    }
    let total = factors.len() as f64;
    grid.iter()
        .map(|&tau| factors.iter().filter(|f| matches!(f, Some(x) if *x <= tau)).count() as f64 / total)
        .collect()
}

#[derive(Debug, Clone)]
pub struct AggregateOptions {
    /// Inputs smaller than this many bytes are dropped.
    pub min_bytes: u64,
    /// Drop Sorted, ReverseSorted and Zero.
    pub exclude_easy: bool,
    pub tau_grid: Vec<f64>,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        AggregateOptions {
            min_bytes: 1 << 18,
            exclude_easy: true,
            tau_grid: vec![1.0, 1.1, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassSlowdown {
    pub algo: String,
    /// A distribution name, or `all`.
    pub class: String,
    pub inputs: usize,
    /// `None` when every input of the class failed.
    pub slowdown: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub algo: String,
    pub tau: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateReport {
    pub slowdowns: Vec<ClassSlowdown>,
    pub profiles: Vec<Profile>,
    /// Inputs left after filtering.
    pub inputs: usize,
}

type InputKey = (String, String, u64, usize);

/// Averages the repetitions of every cell and compares algorithms input by
/// input. An input is a `(dist, dtype, n, threads)` cell; algorithms that did
/// not run on an input are not charged for it.
pub fn aggregate(records: &[RunRecord], opts: &AggregateOptions) -> AggregateReport {
    let keep = |r: &RunRecord| {
        let bytes = r.dtype.parse::<DataType>().map(|d| d.size_bytes() as u64).unwrap_or(1);
        let easy = r.dist.parse::<Distribution>().map(|d| d.is_easy()).unwrap_or(false);
        r.n.saturating_mul(bytes) >= opts.min_bytes && !(opts.exclude_easy && easy)
    };
    // (input, algo) -> (sum of nanos, reps, any failure)
    let mut cells: BTreeMap<(InputKey, String), (f64, usize, bool)> = BTreeMap::new();
    for r in records.iter().filter(|r| keep(r)) {
        let key = ((r.dist.clone(), r.dtype.clone(), r.n, r.threads), r.algo.clone());
        let c = cells.entry(key).or_insert((0.0, 0, false));
        match (r.success, r.nanos) {
            (true, Some(ns)) => {
                c.0 += ns as f64;
                c.1 += 1;
            }
            _ => c.2 = true,
        }
    }
    let algos: BTreeSet<String> = cells.keys().map(|(_, a)| a.clone()).collect();
    let inputs: BTreeSet<InputKey> = cells.keys().map(|(i, _)| i.clone()).collect();
    let algos: Vec<String> = algos.into_iter().collect();

    // per algorithm: (distribution, factor) over the inputs it ran on
    let mut factors: BTreeMap<&str, Vec<(&str, Option<f64>)>> = BTreeMap::new();
    for input in &inputs {
        let present: Vec<&String> = algos.iter().filter(|a| cells.contains_key(&(input.clone(), (*a).clone()))).collect();
        let times: Vec<Vec<Option<f64>>> = present
            .iter()
            .map(|a| {
                let (sum, reps, failed) = cells[&(input.clone(), (*a).clone())];
                vec![if failed || reps == 0 { None } else { Some(sum / reps as f64) }]
            })
            .collect();
        for (a, f) in present.iter().zip(slowdown_factors(&times)) {
            factors.entry(a.as_str()).or_default().push((input.0.as_str(), f[0]));
        }
    }

    let mut report = AggregateReport {
        inputs: inputs.len(),
        ..Default::default()
    };
    for (algo, fs) in &factors {
        let classes: BTreeSet<&str> = fs.iter().map(|(d, _)| *d).collect();
        for class in std::iter::once("all").chain(classes) {
            let sel: Vec<Option<f64>> =
                fs.iter().filter(|(d, _)| class == "all" || *d == class).map(|(_, f)| *f).collect();
            report.slowdowns.push(ClassSlowdown {
                algo: algo.to_string(),
                class: class.to_string(),
                inputs: sel.len(),
                slowdown: average_slowdown(&sel),
            });
        }
        let all: Vec<Option<f64>> = fs.iter().map(|(_, f)| *f).collect();
        report.profiles.push(Profile {
            algo: algo.to_string(),
            tau: opts.tau_grid.clone(),
            p: performance_profile(&all, &opts.tau_grid),
        });
    }
    report
}

impl AggregateReport {
    /// Two CSV tables separated by a blank line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("algo,class,inputs,avg_slowdown\n");
        for c in &self.slowdowns {
            let v = c.slowdown.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"));
            s += &format!("{},{},{},{}\n", c.algo, c.class, c.inputs, v);
        }
        s += "\nalgo,tau,profile\n";
        for p in &self.profiles {
            for (t, v) in p.tau.iter().zip(&p.p) {
                s += &format!("{},{},{:.6}\n", p.algo, t, v);
            }
        }
        s
    }

    pub fn slowdown(&self, algo: &str, class: &str) -> Option<f64> {
        self.slowdowns
            .iter()
            .find(|c| c.algo == algo && c.class == class)
            .and_then(|c| c.slowdown)
    }
}

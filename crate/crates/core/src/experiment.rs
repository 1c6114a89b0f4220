//! Sweep runner: every point × trial × algorithm becomes one CSV row.
//!
//! Trials are independent (each has its own derived seed), so they may run on
//! a worker pool; rows are always emitted in (point, trial, algorithm) order.

use std::fmt::Write as _;
use std::io;
use std::time::Instant;

use crate::algorithms::{self, AlgorithmId};
use crate::metrics::verify_coverage;
use crate::netfile::format_real;
use crate::scenario::{generate_trial, ExperimentPlan, PRNG_NAME};

pub const CSV_HEADER: &str = "setup,param_name,param_value,algorithm,trial,seed,detected,writes,coverage_violated,uncovered_count,runtime_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub setup: String,
    pub param_name: &'static str,
    pub param_value: f64,
    pub algorithm: AlgorithmId,
    pub trial: usize,
    pub seed: u64,
    pub detected: usize,
    pub writes: u64,
    pub coverage_violated: bool,
    pub uncovered_count: usize,
    /// Wall-clock time of the run; only recorded when timing is enabled,
    /// since it would otherwise make the CSV non-reproducible.
    pub runtime_ms: Option<f64>,
}

impl ResultRow {
    pub fn to_csv(&self) -> String {
        let runtime = self
            .runtime_ms
            .map_or_else(|| "na".to_string(), |ms| format!("{ms:.3}"));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.setup,
            self.param_name,
            format_real(self.param_value),
            self.algorithm,
            self.trial,
            self.seed,
            self.detected,
            self.writes,
            u8::from(self.coverage_violated),
            self.uncovered_count,
            runtime
        )
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; 0 uses the pool default, 1 runs serially.
    pub workers: usize,
    pub timing: bool,
}

pub fn run_trial(plan: &ExperimentPlan, point: usize, trial: usize, timing: bool) -> Vec<ResultRow> {
    let config = plan.trial_config(point, trial);
    let (net, order) = generate_trial(&config).expect("plan configs are validated");
    AlgorithmId::ALL
        .iter()
        .map(|&alg| {
            let start = Instant::now();
            let result = algorithms::run(alg, &net, &order).expect("order matches network");
            let elapsed = start.elapsed().as_secs_f64() * 1000.0;
            let verdict = verify_coverage(&net, &result.redundant).expect("ids in range");
            ResultRow {
                setup: plan.label.clone(),
                param_name: plan.param.name(),
                param_value: plan.param_value(point),
                algorithm: alg,
                trial,
                seed: config.seed,
                detected: result.redundant.len(),
                writes: result.writes_total,
                coverage_violated: !verdict.preserved,
                uncovered_count: verdict.uncovered.len(),
                runtime_ms: timing.then_some(elapsed),
            }
        })
        .collect()
}

fn jobs(plan: &ExperimentPlan) -> Vec<(usize, usize)> {
    (0..plan.sweep.len())
        .flat_map(|p| (0..plan.trials_per_point).map(move |t| (p, t)))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn run_plan(plan: &ExperimentPlan, options: RunOptions) -> Vec<ResultRow> {
    use rayon::prelude::*;

    let jobs = jobs(plan);
    if options.workers == 1 {
        return jobs
            .into_iter()
            .flat_map(|(p, t)| run_trial(plan, p, t, options.timing))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .expect("thread pool");
    let per_trial: Vec<Vec<ResultRow>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, t)| run_trial(plan, p, t, options.timing))
            .collect()
    });
    per_trial.into_iter().flatten().collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_plan(plan: &ExperimentPlan, options: RunOptions) -> Vec<ResultRow> {
    jobs(plan)
        .into_iter()
        .flat_map(|(p, t)| run_trial(plan, p, t, options.timing))
        .collect()
}

pub fn write_csv<W: io::Write>(mut out: W, rows: &[ResultRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    out.flush()
}

pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

/// Per (point, algorithm) means over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub param_value: f64,
    pub algorithm: AlgorithmId,
    pub trials: usize,
    pub mean_detected: f64,
    pub mean_writes: f64,
    pub violation_trials: usize,
}

pub fn summarize(rows: &[ResultRow]) -> Vec<PointSummary> {
    let mut out: Vec<PointSummary> = Vec::new();
    for row in rows {
        let slot = out
            .iter_mut()
            .find(|s| s.param_value == row.param_value && s.algorithm == row.algorithm);
        let slot = match slot {
            Some(s) => s,
            None => {
                out.push(PointSummary {
                    param_value: row.param_value,
                    algorithm: row.algorithm,
                    trials: 0,
                    mean_detected: 0.0,
                    mean_writes: 0.0,
                    violation_trials: 0,
                });
                out.last_mut().expect("just pushed")
            }
        };
        slot.trials += 1;
        slot.mean_detected += row.detected as f64;
        slot.mean_writes += row.writes as f64;
        slot.violation_trials += usize::from(row.coverage_violated);
    }
    for s in &mut out {
        s.mean_detected /= s.trials as f64;
        s.mean_writes /= s.trials as f64;
    }
    out
}

/// A gnuplot script drawing mean detected readers and mean writes against the
/// swept parameter, one line per algorithm, from the CSV at `csv_path`.
pub fn plot_script(csv_path: &str, output_stem: &str, plan: &ExperimentPlan) -> String {
    let algos: Vec<&str> = AlgorithmId::ALL.iter().map(|a| a.as_str()).collect();
    let algos = algos.join(" ");
    let mut s = String::new();
    let _ = writeln!(s, "# setup {} sweep over {}", plan.label, plan.param.name());
    let _ = writeln!(
        s,
        "# master_seed={} trials={} prng={PRNG_NAME}",
        plan.master_seed, plan.trials_per_point
    );
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal svg size 900,540");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set xlabel '{}'", plan.param.name());
    for (suffix, column, ylabel) in [
        ("detected", 7, "redundant readers detected (mean)"),
        ("writes", 8, "write-to-tag operations (mean)"),
    ] {
        let _ = writeln!(s, "set output '{output_stem}_{suffix}.svg'");
        let _ = writeln!(s, "set title 'Setup {} ({suffix})'", plan.label);
        let _ = writeln!(s, "set ylabel '{ylabel}'");
        let _ = writeln!(
            s,
            "plot for [a in \"{algos}\"] '{csv_path}' every ::1 \
             using 3:(strcol(4) eq a ? ${column} : NaN) smooth unique with linespoints title a"
        );
    }
    s
}

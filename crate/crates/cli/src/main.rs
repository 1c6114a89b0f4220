//! `rre`: build networks, run detection schemes, compute metrics and run
//! seeded experiment sweeps.
//!
//! Exit codes: 0 success, 1 usage, 2 parse/validation, 3 guard refusal,
//! 4 fixture mismatch.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rre_core::algorithms::{self, AlgorithmId};
use rre_core::experiment::{self, RunOptions};
use rre_core::metrics::{self, MetricsError};
use rre_core::netfile;
use rre_core::scenario::{self, ScenarioConfig, Setup};
use rre_core::{fixtures, ExecutionOrder, RfidNetwork};

#[derive(Parser)]
#[command(name = "rre", version, about = "Redundant RFID reader elimination simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random geometric deployment
    Gen {
        #[arg(long)]
        nr: usize,
        #[arg(long)]
        nt: usize,
        #[arg(long, default_value_t = scenario::DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long, default_value_t = scenario::DEFAULT_AREA_SIDE)]
        area: f64,
        #[arg(long)]
        seed: u64,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one detection scheme and print the run result
    Run {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        algo: String,
        /// Comma-separated reader ids, e.g. 1,0,2
        #[arg(long, conflicts_with = "order_seed")]
        order: Option<String>,
        /// Draw a random execution order from this seed
        #[arg(long)]
        order_seed: Option<u64>,
    },
    /// POD/PRD over every execution order (at most 8 readers)
    Metrics {
        #[arg(long)]
        net: PathBuf,
        /// Restrict to one scheme (all six by default)
        #[arg(long)]
        algo: Option<String>,
        #[arg(long)]
        pod: bool,
        #[arg(long)]
        prd: bool,
        /// Print CSV rows instead of key=value lines
        #[arg(long)]
        csv: bool,
    },
    /// Exact optimum and structural oracles for a network
    Oracle {
        #[arg(long)]
        net: PathBuf,
        /// Report the greedy lower bound when the exact search is refused
        #[arg(long)]
        greedy: bool,
    },
    /// Run a parameter sweep and write one CSV row per point, trial and scheme
    Experiment {
        /// I, II, III or IV
        #[arg(long)]
        setup: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Master seed (required: runs are never seeded from the clock)
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a gnuplot script next to the CSV
        #[arg(long, requires = "out")]
        plot: bool,
        /// Worker threads (0 = all cores)
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Record wall-clock runtime per run (makes the CSV non-reproducible)
        #[arg(long)]
        timing: bool,
    },
    /// Check the built-in fixtures against their expected tables
    Examples {
        /// Also write the fixture networks into this directory
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Invalid(String),
    Guard(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Guard(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Guard(m) | Failure::Mismatch(m) => m,
        }
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::GuardExceeded { .. } => Failure::Guard(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Invalid(format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<RfidNetwork, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    netfile::parse(&text)
        .map(|f| f.network)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Invalid(e.to_string())),
    }
}

fn parse_algo(name: &str) -> Result<AlgorithmId, Failure> {
    name.parse().map_err(|e| Failure::Usage(format!("{e}")))
}

fn cmd_gen(
    nr: usize,
    nt: usize,
    radius: f64,
    area: f64,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let config = ScenarioConfig {
        area_side: area,
        reader_count: nr,
        tag_count: nt,
        radius,
        seed,
    };
    let net = scenario::generate(&config).map_err(invalid)?;
    write_out(out, &netfile::to_text(&net, &[config.echo()]))
}

fn cmd_run(
    net: &Path,
    algo: &str,
    order: Option<&str>,
    order_seed: Option<u64>,
) -> Result<(), Failure> {
    let alg = parse_algo(algo)?;
    let net = load(net)?;
    let m = net.reader_count();
    let order = match (order, order_seed) {
        (Some(text), _) => ExecutionOrder::parse(text, m).map_err(invalid)?,
        (None, Some(seed)) => scenario::random_order(m, seed),
        (None, None) => ExecutionOrder::ascending(m),
    };
    let result = algorithms::run(alg, &net, &order).map_err(invalid)?;
    write_out(None, &result.to_text())
}

fn cmd_metrics(
    net: &Path,
    algo: Option<&str>,
    pod: bool,
    prd: bool,
    csv: bool,
) -> Result<(), Failure> {
    let algs = match algo {
        Some(name) => vec![parse_algo(name)?],
        None => AlgorithmId::ALL.to_vec(),
    };
    let label = net
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let network = load(net)?;
    let mut out = String::new();
    if csv {
        out.push_str(metrics::MetricsReport::CSV_HEADER);
        out.push('\n');
    }
    let (show_pod, show_prd) = if pod || prd { (pod, prd) } else { (true, true) };
    for alg in algs {
        let r = metrics::metrics(&network, alg)?;
        if csv {
            out.push_str(&r.to_csv_row(&label));
        } else {
            out.push_str(alg.as_str());
            if show_pod {
                out.push_str(&format!(" pod={:.3}", r.pod));
            }
            if show_prd {
                out.push_str(&format!(" prd={:.3}", r.prd));
            }
            if !(pod || prd) {
                out.push_str(&format!(
                    " optimal={} orders={} violation_orders={}",
                    r.optimal, r.orders_evaluated, r.violation_orders
                ));
            }
        }
        out.push('\n');
    }
    write_out(None, &out)
}

fn id_list(ids: impl IntoIterator<Item = usize>) -> String {
    ids.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_oracle(net: &Path, greedy: bool) -> Result<(), Failure> {
    let net = load(net)?;
    let mut out = format!(
        "readers {}\ntags {}\ncovered {}\ntype1 {}\n",
        net.reader_count(),
        net.tag_count(),
        net.covered_tag_count(),
        id_list(net.type1_tags())
    );
    match metrics::optimal_redundant_count(&net) {
        Ok(n) => out.push_str(&format!("optimal {n}\n")),
        Err(MetricsError::GuardExceeded { .. }) if greedy => {
            out.push_str(&format!(
                "greedy_lower_bound {}\n",
                metrics::greedy_redundant_count(&net)
            ));
        }
        Err(e) => return Err(e.into()),
    }
    out.push_str(&format!(
        "oa_characterization {}\n",
        id_list(metrics::oa_characterization(&net))
    ));
    write_out(None, &out.replace(" \n", "\n"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    setup: &str,
    trials: usize,
    seed: Option<u64>,
    out: Option<&Path>,
    plot: bool,
    workers: usize,
    timing: bool,
) -> Result<(), Failure> {
    let setup: Setup = setup.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
    let seed = seed.ok_or_else(|| {
        Failure::Usage("--seed is required: experiments are never seeded from the clock".into())
    })?;
    let plan = scenario::plan(setup, trials, seed).map_err(|e| Failure::Usage(e.to_string()))?;
    let rows = experiment::run_plan(&plan, RunOptions { workers, timing });
    let csv = experiment::csv_string(&rows);
    write_out(out, &csv)?;

    if let (true, Some(path)) = (plot, out) {
        let stem = path.with_extension("");
        let script_path = path.with_extension("gp");
        let script = experiment::plot_script(
            &path.display().to_string(),
            &stem.display().to_string(),
            &plan,
        );
        fs::write(&script_path, script).map_err(|e| io_failure(&script_path, e))?;
        eprintln!("plot script: {}", script_path.display());
    }
    for s in experiment::summarize(&rows) {
        eprintln!(
            "{}={} {:<8} detected={:.2} writes={:.1} violated_trials={}",
            plan.param.name(),
            s.param_value,
            s.algorithm.as_str(),
            s.mean_detected,
            s.mean_writes,
            s.violation_trials
        );
    }
    Ok(())
}

fn cmd_examples(emit: Option<&Path>) -> Result<(), Failure> {
    if let Some(dir) = emit {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        for name in fixtures::NAMES {
            let net = fixtures::by_name(name).expect("known fixture");
            let path = dir.join(format!("{name}.net"));
            fs::write(&path, netfile::to_text(&net, &[format!("fixture {name}")]))
                .map_err(|e| io_failure(&path, e))?;
        }
    }
    let checks = fixtures::verify_all();
    let mut failed = 0;
    for c in &checks {
        if c.passed {
            println!("PASS {}", c.name);
        } else {
            failed += 1;
            println!("FAIL {}: {}", c.name, c.detail);
        }
    }
    println!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        Err(Failure::Mismatch(format!("{failed} fixture checks failed")))
    } else {
        Ok(())
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen {
            nr,
            nt,
            radius,
            area,
            seed,
            out,
        } => cmd_gen(nr, nt, radius, area, seed, out.as_deref()),
        Command::Run {
            net,
            algo,
            order,
            order_seed,
        } => cmd_run(&net, &algo, order.as_deref(), order_seed),
        Command::Metrics {
            net,
            algo,
            pod,
            prd,
            csv,
        } => cmd_metrics(&net, algo.as_deref(), pod, prd, csv),
        Command::Oracle { net, greedy } => cmd_oracle(&net, greedy),
        Command::Experiment {
            setup,
            trials,
            seed,
            out,
            plot,
            workers,
            timing,
        } => cmd_experiment(&setup, trials, seed, out.as_deref(), plot, workers, timing),
        Command::Examples { emit } => cmd_examples(emit.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rre: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

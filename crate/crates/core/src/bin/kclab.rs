use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use kclab::budget::{Budget, DEFAULT_NODE_CAP};
use kclab::cnf::{brute_force_count, emit_dimacs, generate_instance, parse_dimacs, ratio_grid, CnfFormula, GenParams};
use kclab::dfa::compile_cnf_to_dfa;
use kclab::dnnf::{compile_with, DnnfOptions};
use kclab::harness::{
    emit_plots, growth_from_rows, peak_from_rows, read_sweep_csv, run_sweep, write_sweep_csv, Language, PlotData,
    PlotKind, SweepConfig, SWEEP_SCHEMA,
};
use kclab::obdd::{ObddManager, VarOrder};
use kclab::pathstruct::{phase_experiment, read_phase_csv, write_phase_csv, PhaseExperimentConfig, PHASE_SCHEMA};

/// Compile random k-SAT instances to OBDDs, leveled DFAs and decision-DNNF.
#[derive(Parser)]
#[command(name = "kclab", version)]
struct Cli {
    /// Master seed for instance generation.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Node cap per compilation.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    /// Time cap per compilation, in seconds.
    #[arg(long, global = true, value_name = "SECS")]
    time_cap: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Instance {
    /// DIMACS file to read (`-` for stdin); otherwise an instance is generated.
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    n: Option<usize>,
    /// Clause/variable ratio.
    #[arg(long, default_value_t = 0.0)]
    r: f64,
}

#[derive(Args)]
struct Grid {
    #[arg(long, default_value_t = 0.2)]
    r_start: f64,
    #[arg(long, default_value_t = 4.2)]
    r_stop: f64,
    #[arg(long, default_value_t = 0.2)]
    r_step: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a random instance in DIMACS format.
    Gen {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
    },
    /// Compile one instance and print its size and model count.
    Compile {
        #[arg(long, default_value = "dnnf")]
        lang: Language,
        #[command(flatten)]
        instance: Instance,
    },
    /// Model count by enumerating all assignments.
    Count {
        #[command(flatten)]
        instance: Instance,
    },
    /// Size sweep over a ratio grid; writes CSV.
    Sweep {
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Comma-separated variable counts.
        #[arg(long, value_delimiter = ',', default_value = "20")]
        n: Vec<usize>,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        /// Comma-separated languages.
        #[arg(long, value_delimiter = ',', default_value = "dnnf")]
        lang: Vec<Language>,
        /// Record mean compile times (makes the output nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Multi-interchangeable-path transition over a ratio grid; writes CSV.
    Paths {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 18)]
        n: usize,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[arg(long, default_value_t = 50)]
        threshold: usize,
    },
    /// Semilog and loglog growth fits for every (k, r, language) series of a sweep CSV.
    Fit { csv: PathBuf },
    /// Peak location for every (k, n, language) series of a sweep CSV.
    Peak { csv: PathBuf },
    /// Print a plotting script for a sweep or phase CSV.
    Plot {
        csv: PathBuf,
        /// size-vs-r, log-size-vs-n, loglog-size-vs-n or phase-fraction-vs-r.
        #[arg(long)]
        kind: PlotKind,
    },
}

/// Configuration problems exit with 1, everything else with 2.
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<kclab::Error>() {
            Some(kclab::Error::InvalidParams(_)) => Failure::Usage(format!("{e:#}")),
            _ => Failure::Runtime(e),
        }
    }
}

impl From<kclab::Error> for Failure {
    fn from(e: kclab::Error) -> Self {
        Failure::from(anyhow::Error::from(e))
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(path)
            .with_context(|| format!("opening {}", path.display()))?
            .read_to_string(&mut text)?;
    }
    Ok(text)
}

fn load_instance(inst: &Instance, seed: u64) -> Result<CnfFormula, Failure> {
    match (&inst.input, inst.n) {
        (Some(path), None) => Ok(parse_dimacs(&read_input(path)?).with_context(|| format!("parsing {}", path.display()))?),
        (None, Some(n)) => Ok(generate_instance(&GenParams::from_ratio(inst.k, n, inst.r, seed))?),
        (Some(_), Some(_)) => usage("--input and --n are mutually exclusive"),
        (None, None) => usage("give either --input or --n"),
    }
}

fn grid(g: &Grid) -> Result<Vec<f64>, Failure> {
    let points = ratio_grid(g.r_start, g.r_stop, g.r_step);
    if points.is_empty() {
        return usage("empty ratio grid (need r-step > 0 and r-stop ≥ r-start)");
    }
    Ok(points)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let time_cap = match cli.time_cap {
        Some(s) if !(s > 0.0 && s.is_finite()) => return usage("--time-cap must be positive"),
        s => s.map(Duration::from_secs_f64),
    };
    let budget = Budget::new(cli.node_cap, time_cap);
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let io = |e: io::Error| Failure::Runtime(e.into());

    match cli.cmd {
        Cmd::Gen { k, n, r } => {
            let f = generate_instance(&GenParams::from_ratio(k, n, r, cli.seed))?;
            out.write_all(emit_dimacs(&f).as_bytes()).map_err(io)?;
        }
        Cmd::Compile { lang, instance } => {
            let f = load_instance(&instance, cli.seed)?;
            let n = f.num_vars();
            if n >= 128 {
                return usage("model counts need n < 128");
            }
            let (nodes, edges, models) = match lang {
                Language::Obdd => {
                    let mut m = ObddManager::with_budget(VarOrder::natural(n), budget);
                    let root = m.compile(&f)?;
                    let s = m.node_count(root);
                    (s.nodes, s.edges, m.model_count(root, n))
                }
                Language::Dfa => {
                    let d = compile_cnf_to_dfa(&f, &VarOrder::natural(n), budget)?;
                    (d.state_count(), d.transition_count(), d.accepting_path_count())
                }
                Language::Dnnf => {
                    let d = compile_with(&f, DnnfOptions { budget, ..Default::default() })?;
                    let s = d.node_count();
                    (s.nodes, s.edges, d.model_count(n)?)
                }
            };
            writeln!(out, "language: {lang}\nnodes: {nodes}\nedges: {edges}\nmodels: {models}").map_err(io)?;
        }
        Cmd::Count { instance } => {
            let f = load_instance(&instance, cli.seed)?;
            writeln!(out, "{}", brute_force_count(&f)?).map_err(io)?;
        }
        Cmd::Sweep { k, n, grid: g, instances, lang, timing } => {
            let cfg = SweepConfig {
                k,
                ns: n,
                r_grid: grid(&g)?,
                instances_per_point: instances,
                languages: lang,
                seed: cli.seed,
                node_cap: cli.node_cap,
                time_cap,
                jobs: cli.jobs,
                timing,
            };
            write_sweep_csv(&mut out, &run_sweep(&cfg)?)?;
        }
        Cmd::Paths { k, n, grid: g, instances, probes, threshold } => {
            let cfg = PhaseExperimentConfig {
                k,
                n,
                r_grid: grid(&g)?,
                instances_per_r: instances,
                probe_clauses: probes,
                threshold,
                seed: cli.seed,
                node_cap: cli.node_cap,
                time_cap,
            };
            cfg.validate()?;
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(j) = cli.jobs {
                pool = pool.num_threads(j);
            }
            let pool = pool.build().map_err(|e| Failure::Runtime(e.into()))?;
            let rows = pool.install(|| phase_experiment(&cfg))?;
            for r in rows.iter().filter(|r| r.skipped > 0) {
                eprintln!("r = {}: {} instances skipped at the caps", r.r, r.skipped);
            }
            write_phase_csv(&mut out, &rows)?;
        }
        Cmd::Fit { csv } => {
            let rows = read_sweep_csv(read_input(&csv)?.as_bytes())?;
            let mut series: Vec<(usize, f64, Language)> = rows.iter().map(|r| (r.k, r.r, r.language)).collect();
            series.sort_by(|a, b| a.0.cmp(&b.0).then(a.2.cmp(&b.2)).then(a.1.total_cmp(&b.1)));
            series.dedup();
            writeln!(out, "k,language,r,semilog_slope,semilog_r2,loglog_slope,loglog_r2").map_err(io)?;
            for (k, r, lang) in series {
                match growth_from_rows(&rows, k, r, lang) {
                    Ok(g) => writeln!(
                        out,
                        "{k},{lang},{r},{:.6},{:.6},{:.6},{:.6}",
                        g.semilog_slope, g.semilog_r2, g.loglog_slope, g.loglog_r2
                    )
                    .map_err(io)?,
                    Err(e) => eprintln!("k = {k}, {lang}, r = {r}: {e}"),
                }
            }
        }
        Cmd::Peak { csv } => {
            let rows = read_sweep_csv(read_input(&csv)?.as_bytes())?;
            let mut series: Vec<(usize, usize, Language)> = rows.iter().map(|r| (r.k, r.n, r.language)).collect();
            series.sort();
            series.dedup();
            writeln!(out, "k,n,language,raw_r,smoothed_r").map_err(io)?;
            for (k, n, lang) in series {
                match peak_from_rows(&rows, k, n, lang) {
                    Ok(kclab::harness::Peak::At { raw_r, smoothed_r }) => {
                        writeln!(out, "{k},{n},{lang},{raw_r},{smoothed_r}").map_err(io)?
                    }
                    Ok(kclab::harness::Peak::NoPeak) => writeln!(out, "{k},{n},{lang},,").map_err(io)?,
                    Err(e) => eprintln!("k = {k}, n = {n}, {lang}: {e}"),
                }
            }
        }
        Cmd::Plot { csv, kind } => {
            let text = read_input(&csv)?;
            let first = text.lines().next().unwrap_or_default();
            let path = csv.to_string_lossy();
            let script = if first.ends_with(SWEEP_SCHEMA) {
                emit_plots(PlotData::Sweep(&read_sweep_csv(text.as_bytes())?), kind, &path)?
            } else if first.ends_with(PHASE_SCHEMA) {
                emit_plots(PlotData::Phase(&read_phase_csv(text.as_bytes())?), kind, &path)?
            } else {
                return Err(Failure::Runtime(anyhow::anyhow!("{}: not a sweep or phase CSV", csv.display())));
            };
            out.write_all(script.as_bytes()).map_err(io)?;
        }
    }
    out.flush().map_err(io)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

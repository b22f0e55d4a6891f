use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tscp_core::datagen::{generate_dataset, NoiseSpec};
use tscp_core::models::RegressorSpec;
use tscp_harness::bench::{run_benchmark, write_outputs, write_rows};
use tscp_harness::lab::theory_report;
use tscp_harness::price::{read_price_csv, run_price_pipeline, standin_records, write_price_csv, write_price_outputs};
use tscp_harness::registry::parse_methods;
use tscp_harness::{emit_plot, ExperimentConfig, PlotKind, PlotOptions, PriceConfig, Result, Table};
use tscp_theory::SweepConfig;

#[derive(Parser)]
#[command(name = "tscp", version, about = "Adaptive conformal prediction for time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one synthetic Friedman + ARMA dataset as CSV.
    Simulate {
        #[arg(long, default_value_t = 0.9)]
        phi: f64,
        #[arg(long, default_value_t = 0.9)]
        theta: f64,
        #[arg(long, default_value_t = 10.0)]
        variance: f64,
        #[arg(long, default_value_t = 200)]
        t0: usize,
        #[arg(long, default_value_t = 100)]
        t1: usize,
        #[arg(long, default_value_t = 6)]
        features: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the benchmark grid and write results.csv and summary.csv.
    Bench {
        /// TOML configuration; defaults to the standard ARMA grid.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        repetitions: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write validity_efficiency.svg.
        #[arg(long)]
        plot: bool,
    },
    /// Sweep the ACI learning rate on AR(1) residuals.
    GammaSweep {
        /// 100 learning rates, 25 repetitions, 10⁶ steps.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, value_delimiter = ',')]
        phis: Option<Vec<f64>>,
        #[arg(long)]
        repetitions: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Compare simulated, exact and expanded lengths of the exchangeable chain.
    Theory {
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.03,0.05")]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        steps: usize,
        /// Largest attainable score.
        #[arg(long, default_value_t = 4.0)]
        cap: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Per-hour price forecasting with prediction intervals.
    Price {
        /// Price CSV; the synthetic stand-in is used when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write the stand-in data to this file.
        #[arg(long)]
        save_standin: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1095)]
        window_days: usize,
        #[arg(long, default_value_t = 365)]
        test_days: usize,
        /// Use bagged trees with this many trees instead of ridge regression.
        #[arg(long)]
        trees: Option<usize>,
        #[arg(long, default_value = "price_results")]
        out: PathBuf,
    },
    /// Draw an SVG figure from a CSV table.
    Plot {
        /// validity_efficiency, gamma_sweep or series_with_intervals.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long)]
        method: Option<String>,
        #[arg(long, default_value = "median_length")]
        length_column: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn plot_to(table_path: &Path, kind: PlotKind, opts: &PlotOptions, out: &Path) -> Result<()> {
    emit_plot(&Table::from_path(table_path)?, kind, opts, out)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate {
            phi,
            theta,
            variance,
            t0,
            t1,
            features,
            seed,
            out,
        } => {
            let d = generate_dataset(features, t0, t1, &NoiseSpec::new(phi, theta, variance)?, seed)?;
            let mut w = csv::Writer::from_path(&out)?;
            let mut head: Vec<String> = (0..features).map(|j| format!("x{j}")).collect();
            head.push("y".into());
            w.write_record(&head)?;
            for i in 0..d.len() {
                let mut rec: Vec<String> = d.row(i).iter().map(f64::to_string).collect();
                rec.push(d.target(i).to_string());
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        Command::Bench {
            config,
            seed,
            alpha,
            repetitions,
            methods,
            out,
            plot,
        } => {
            let mut cfg = match config {
                Some(p) => ExperimentConfig::load(&p)?,
                None => ExperimentConfig::paper_default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(a) = alpha {
                cfg.alpha = a;
            }
            if let Some(r) = repetitions {
                cfg.repetitions = r;
            }
            if let Some(m) = methods {
                cfg.methods = m;
            }
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            cfg.validate()?;
            let rows = run_benchmark(&cfg)?;
            write_outputs(&rows, &cfg.output_dir)?;
            std::fs::write(cfg.output_dir.join("config.toml"), cfg.to_toml())?;
            if plot {
                let opts = PlotOptions {
                    alpha: cfg.alpha,
                    ..PlotOptions::default()
                };
                plot_to(
                    &cfg.output_dir.join("results.csv"),
                    PlotKind::ValidityEfficiency,
                    &opts,
                    &cfg.output_dir.join("validity_efficiency.svg"),
                )?;
            }
            println!("{} rows written to {}", rows.len(), cfg.output_dir.join("results.csv").display());
        }
        Command::GammaSweep {
            full,
            alpha,
            phis,
            repetitions,
            seed,
            out,
        } => {
            let mut cfg = if full { SweepConfig::full() } else { SweepConfig::desk() };
            cfg.alpha = alpha;
            cfg.seed = seed;
            if let Some(p) = phis {
                cfg.phis = p;
            }
            if let Some(r) = repetitions {
                cfg.reps = r;
            }
            let table = tscp_theory::sweep_gamma(&cfg)?;
            std::fs::create_dir_all(&out)?;
            let csv_path = out.join("gamma_sweep.csv");
            table.write_csv(std::fs::File::create(&csv_path)?)?;
            plot_to(&csv_path, PlotKind::GammaSweep, &PlotOptions::default(), &out.join("gamma_sweep.svg"))?;
            for phi in table.phis() {
                println!("phi = {phi}: gamma* = {:?}", table.gamma_star(phi));
            }
        }
        Command::Theory {
            alpha,
            gammas,
            steps,
            cap,
            seed,
        } => {
            let rows = theory_report(alpha, &gammas, steps, cap, seed)?;
            write_rows(&rows, std::io::stdout())?;
        }
        Command::Price {
            input,
            save_standin,
            alpha,
            methods,
            seed,
            window_days,
            test_days,
            trees,
            out,
        } => {
            let records = match &input {
                Some(p) => read_price_csv(std::fs::File::open(p)?)?,
                None => standin_records(window_days + test_days + 1, seed),
            };
            if let Some(p) = save_standin {
                write_price_csv(&records, std::fs::File::create(p)?)?;
            }
            let mut cfg = PriceConfig {
                alpha,
                seed,
                window_days,
                test_days,
                ..PriceConfig::default()
            };
            if let Some(m) = methods {
                cfg.methods = parse_methods(&m)?;
            }
            if let Some(n) = trees {
                cfg.model = RegressorSpec::bagged_trees(n);
            }
            let result = run_price_pipeline(&records, &cfg)?;
            write_price_outputs(&result, &out)?;
            write_rows(&result.summary, std::io::stdout())?;
        }
        Command::Plot {
            kind,
            input,
            out,
            alpha,
            method,
            length_column,
        } => {
            let opts = PlotOptions {
                alpha,
                method,
                length_column,
                ..PlotOptions::default()
            };
            plot_to(&input, kind.parse()?, &opts, &out)?;
        }
    }
    Ok(())
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pshgeo::harness::{
    emit_csv, load_config, run_geodesic, run_suite, resolve_function, ExperimentConfig, FunctionRef,
    Suite,
};
use pshgeo::rooftop::connectivity;
use pshgeo::Result;

#[derive(Parser)]
#[command(name = "pshgeo", version, about = "Toric psh geodesics, capacities and rooftop envelopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Suite to run; repeatable. Defaults to the config's `suites`.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Directory for CSV profiles and the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute one geodesic and write its profile.
    Geodesic {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        u0: String,
        #[arg(long)]
        u1: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Connectivity verdict for two functions.
    Connectivity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        u0: String,
        #[arg(long)]
        u1: String,
    },
}

fn out_dir(cfg: &ExperimentConfig, out: Option<PathBuf>) -> Option<PathBuf> {
    out.or_else(|| cfg.output.clone())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, suites, out } => {
            let cfg = load_config(&config)?;
            let suites: Vec<Suite> = if suites.is_empty() {
                cfg.suites.clone()
            } else {
                suites.iter().map(|s| s.parse()).collect::<Result<_>>()?
            };
            if suites.is_empty() {
                return Err(pshgeo::Error::Empty("no suites requested".into()));
            }
            let dir = out_dir(&cfg, out);
            let mut all_passed = true;
            let mut text = String::new();
            for suite in suites {
                let report = run_suite(&cfg, suite)?;
                print!("{}", report.render());
                text.push_str(&report.render());
                all_passed &= report.passed();
                if let Some(dir) = &dir {
                    report.write_profiles(dir)?;
                }
            }
            if let Some(dir) = &dir {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("report.txt"), text)?;
            }
            println!("{}", if all_passed { "all checks passed" } else { "some checks FAILED" });
            Ok(all_passed)
        }
        Command::Geodesic { config, u0, u1, out } => {
            let cfg = load_config(&config)?;
            let (_, profile) = run_geodesic(&cfg, &u0, &u1)?;
            println!("t,m_t,energy,gap0,gap1");
            for r in &profile.rows {
                println!("{:.6},{:.6e},{:.6e},{:.6e},{:.6e}", r.t, r.m_t, r.energy, r.gap0, r.gap1);
            }
            if let Some(dir) = out_dir(&cfg, out) {
                std::fs::create_dir_all(&dir)?;
                let path = dir.join(format!("geodesic-{}.csv", profile.label));
                emit_csv(&profile, &path)?;
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Connectivity { config, u0, u1 } => {
            let cfg = load_config(&config)?;
            let Ok(r0) = u0.parse::<FunctionRef>();
            let Ok(r1) = u1.parse::<FunctionRef>();
            let f0 = resolve_function(&cfg, &r0, &cfg.grid)?;
            let f1 = resolve_function(&cfg, &r1, &cfg.grid)?;
            let r = connectivity(&f0, &f1)?;
            println!("verdict: {}", r.verdict);
            println!("residual gap: {:.6e} (tau_res = {:.6e})", r.residual_gap, r.tau_res);
            println!("defects: {:.6e} {:.6e}", r.defect0, r.defect1);
            println!("endpoint gaps: {:.6e} {:.6e}", r.endpoint_gaps.0, r.endpoint_gaps.1);
            println!("stabilized: {}", r.stabilized);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    pshgeo::parallel::init_from_env();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

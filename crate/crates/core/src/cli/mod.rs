//! Command-line front end: `run`, `validate`, `list-nuclides` and
//! `list-lattices`.

pub mod config;
pub mod run;
pub mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::{validate_config, ConfigErrors, ConfigIssue, DataContext, Scenario, ScenarioConfig};
pub use run::{run_scenario, write_outputs, RunInfo, ScenarioOutput};
pub use table::ResultTable;

/// Environment variable naming a directory with extra `nuclides.kv` and
/// `lattices.kv` files.
pub const DATA_DIR_ENV: &str = "NUCSP_DATA_DIR";

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "nucsp", version, about = "Coherent gamma-ray emission from nuclei excited by fast charged particles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write its CSV tables.
    Run {
        config: PathBuf,
        /// Output directory; relative output paths are resolved against it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        threads: Option<u16>,
        /// Seed recorded with the results.
        #[arg(long, default_value_t = config::DEFAULT_SEED)]
        seed: u64,
    },
    /// Check a config and print its resolved form.
    Validate { config: PathBuf },
    /// List the known nuclides.
    ListNuclides,
    /// List the known lattice presets.
    ListLattices,
}

fn data_context() -> crate::Result<DataContext> {
    let dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
    DataContext::with_data_dir(dir.as_deref())
}

fn read_config(path: &Path) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INVALID
    })
}

fn load(path: &Path) -> Result<(String, ScenarioConfig), u8> {
    let text = read_config(path)?;
    let ctx = data_context().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })?;
    match validate_config(&text, &ctx) {
        Ok(cfg) => Ok((text, cfg)),
        Err(errs) => {
            for issue in &errs.0 {
                eprintln!("error: {issue}");
            }
            Err(EXIT_INVALID)
        }
    }
}

fn default_output_name(cfg: &ScenarioConfig) -> PathBuf {
    PathBuf::from(format!("{}.csv", cfg.scenario.name()))
}

fn run_command(config: &Path, out: Option<&Path>, threads: Option<u16>, seed: u64) -> Result<(), u8> {
    let (text, cfg) = load(config)?;
    let mut primary = cfg.output.path.clone().unwrap_or_else(|| default_output_name(&cfg));
    if let Some(dir) = out {
        if primary.is_relative() {
            primary = dir.join(primary);
        }
        std::fs::create_dir_all(dir).map_err(|e| {
            eprintln!("error: cannot create {}: {e}", dir.display());
            EXIT_RUNTIME
        })?;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k as usize);
    }
    let pool = builder.build().map_err(|e| {
        eprintln!("error: cannot start worker pool: {e}");
        EXIT_RUNTIME
    })?;
    let info = RunInfo {
        config_text: text,
        seed,
    };
    let result = pool
        .install(|| run_scenario(&cfg, &info))
        .and_then(|output| write_outputs(&output, &primary));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            Ok(())
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(EXIT_RUNTIME)
        }
    }
}

fn validate_command(config: &Path) -> Result<(), u8> {
    let (_, cfg) = load(config)?;
    println!("{cfg:#?}");
    Ok(())
}

fn list_nuclides() -> Result<(), u8> {
    let ctx = data_context().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })?;
    println!("name\te0_keV\tlifetime_s\talpha_ic\tjg\tje");
    for r in ctx.nuclides.records() {
        println!(
            "{}\t{}\t{}\t{}\t{}/2\t{}/2",
            r.name, r.e0_kev, r.lifetime_s, r.alpha_ic, r.jg2, r.je2
        );
    }
    Ok(())
}

fn list_lattices() -> Result<(), u8> {
    let ctx = data_context().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })?;
    println!("preset\ta_nm\tb_par_nm\tb_z_nm\td_nm");
    for f in ctx.lattices.films() {
        println!(
            "{}\t{}\t({}, {})\t{}\t{}",
            f.preset,
            f.a_nm,
            f.b_par_nm[0],
            f.b_par_nm[1],
            f.b_z_nm,
            f.z_period()
        );
    }
    Ok(())
}

/// Runs the parsed command line and maps failures to exit codes.
pub fn execute(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Run {
            config,
            out,
            threads,
            seed,
        } => run_command(&config, out.as_deref(), threads, seed),
        Command::Validate { config } => validate_command(&config),
        Command::ListNuclides => list_nuclides(),
        Command::ListLattices => list_lattices(),
    };
    ExitCode::from(result.err().unwrap_or(EXIT_OK))
}

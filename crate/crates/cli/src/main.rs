use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cavity_tmm::config::{Format, JobConfig, OutputKind, Preset};
use cavity_tmm::job::{run, JobOutput};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod output;

const EXIT_CONFIG: u8 = 1;
const EXIT_COMPUTATION: u8 = 2;

/// Resonances, linewidths and couplings of multi-element 1D resonators.
#[derive(Debug, Parser)]
#[command(name = "cavity-tmm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON job description.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file. With several CSV tables, `<stem>.<table>.csv` files are
    /// written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Scan density, overriding the config.
    #[arg(long, global = true)]
    samples_per_fsr: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmission and |m22|² on the scan grid.
    Spectrum,
    /// Refined resonances with linewidths and overlap flags.
    Resonances,
    /// Field amplitudes per region at each resonance (or `fields_at`).
    Fields,
    /// Optomechanical and emitter couplings with cooperativities.
    Couplings,
    /// Runs a built-in parameter set: fig3, fig_tunnel, fig4, fig6, fig7.
    Preset {
        name: String,
        /// Print the preset's job description instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Fixed-total-length sweep described by the config's `sweep` section.
    Sweep,
}

enum Failure {
    Config(String),
    Computation(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("computation error: {msg}");
            ExitCode::from(EXIT_COMPUTATION)
        }
    }
}

fn load_config(path: &Path) -> Result<JobConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    JobConfig::from_json(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let common = cli.common;
    let mut config = match &cli.command {
        Command::Preset { name, print_config } => {
            let preset = Preset::from_name(name).map_err(|e| Failure::Config(e.to_string()))?;
            if common.config.is_some() {
                return Err(Failure::Config("`preset` does not take --config".into()));
            }
            let config = preset.config();
            if *print_config {
                let mut text = serde_json::to_string_pretty(&config).expect("config serializes");
                text.push('\n');
                return write_text(common.out.as_deref(), &text);
            }
            config
        }
        _ => {
            let path = common
                .config
                .as_deref()
                .ok_or_else(|| Failure::Config("--config <path> is required for this command".into()))?;
            load_config(path)?
        }
    };

    let only = |kind: OutputKind, mut c: JobConfig| {
        c.outputs = vec![kind];
        c.sweep = None;
        c
    };
    config = match cli.command {
        Command::Spectrum => only(OutputKind::Spectrum, config),
        Command::Resonances => only(OutputKind::Resonances, config),
        Command::Fields => only(OutputKind::Fields, config),
        Command::Couplings => only(OutputKind::Couplings, config),
        Command::Sweep => {
            if config.sweep.is_none() {
                return Err(Failure::Config("the config has no `sweep` section".into()));
            }
            config.outputs.clear();
            config
        }
        Command::Preset { .. } => config,
    };
    if let Some(n) = common.samples_per_fsr {
        config.samples_per_fsr = n;
    }
    if let Some(f) = common.format {
        config.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    let config = config.validated().map_err(|e| Failure::Config(e.to_string()))?;
    if config.outputs.is_empty() && config.sweep.is_none() {
        return Err(Failure::Config("nothing to compute: `outputs` is empty and there is no `sweep`".into()));
    }

    let result = run(&config).map_err(|e| Failure::Computation(format!("{}: {e}", e.name())))?;
    let out = common.out.or_else(|| config.out.as_ref().map(PathBuf::from));
    emit(&result, config.format, out.as_deref())
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let written = match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    written.map_err(|e| Failure::Computation(format!("writing output: {e}")))
}

fn emit(result: &JobOutput, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Computation(format!("writing output: {e}"));
    match format {
        Format::Json => write_text(out, &output::render_json(result)),
        Format::Csv => {
            let tables = output::tables(result);
            match out {
                Some(path) if tables.len() == 1 => {
                    let mut f = io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
                    output::write_csv_table(&mut f, result, &tables[0]).map_err(io_err)?;
                    f.flush().map_err(io_err)
                }
                Some(path) => {
                    for t in &tables {
                        let p = table_path(path, t.name);
                        let mut f = io::BufWriter::new(fs::File::create(&p).map_err(io_err)?);
                        output::write_csv_table(&mut f, result, t).map_err(io_err)?;
                        f.flush().map_err(io_err)?;
                    }
                    Ok(())
                }
                None => {
                    let mut w = io::BufWriter::new(io::stdout().lock());
                    for (i, t) in tables.iter().enumerate() {
                        if i > 0 {
                            writeln!(w).map_err(io_err)?;
                        }
                        output::write_csv_table(&mut w, result, t).map_err(io_err)?;
                    }
                    w.flush().map_err(io_err)
                }
            }
        }
    }
}

/// `dir/run.csv` with table `spectrum` becomes `dir/run.spectrum.csv`.
fn table_path(path: &Path, table: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}.{table}.csv"))
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lovecap::kernel::{assemble, Separation};
use lovecap::run::{resolve_threads, run, Mode, OutputFormat, RunConfig, TruncSpec};
use lovecap::verify::{verify, Level};
use lovecap::Error;

#[derive(Parser)]
#[command(
    name = "lovecap",
    version,
    about = "Capacitance of the circular parallel-plate capacitor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for one or more separations and print a table.
    Solve {
        /// Separations d/a, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        kappa: Vec<f64>,
        /// Truncation N, or one per separation (comma separated).
        /// In heuristic mode, the budget per step.
        #[arg(long, value_delimiter = ',', required = true)]
        trunc: Vec<usize>,
        #[arg(long, default_value = "power")]
        mode: Mode,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads [env: LOVECAP_THREADS]
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check the closed forms against the quadrature oracles.
    Verify {
        #[arg(long, default_value = "fast")]
        level: Level,
    },
    /// Write the assembled kernel matrix in binary form.
    DumpKernel {
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        trunc: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn solve(
    kappa: Vec<f64>,
    trunc: Vec<usize>,
    mode: Mode,
    format: OutputFormat,
    out: Option<PathBuf>,
    threads: Option<usize>,
) -> Result<ExitCode, Error> {
    let kappas = kappa
        .into_iter()
        .map(Separation::new)
        .collect::<Result<Vec<_>, _>>()?;
    let trunc = match trunc.as_slice() {
        [n] => TruncSpec::Uniform(*n),
        list => TruncSpec::PerKappa(list.to_vec()),
    };
    let config = RunConfig {
        kappas,
        trunc,
        mode,
        fit_rule: Default::default(),
        output_format: format,
        output_path: out,
        thread_count: resolve_threads(threads)?,
    };
    let report = run(&config)?;
    let mut w = output(config.output_path.as_ref())?;
    report.write(format, &mut w)?;
    w.flush()?;
    Ok(if report.has_errors() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            kappa,
            trunc,
            mode,
            format,
            out,
            threads,
        } => solve(kappa, trunc, mode, format, out, threads),
        Command::Verify { level } => {
            let report = verify(level);
            println!("{report}");
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::DumpKernel { kappa, trunc, out } => (|| {
            let m = assemble(Separation::new(kappa)?, trunc)?;
            let mut w = BufWriter::new(File::create(&out)?);
            m.write_to(&mut w)?;
            w.flush()?;
            log::info!(
                "wrote {} entries to {}",
                m.lower_triangle().len(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        })(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

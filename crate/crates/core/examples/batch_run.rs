//! A small batch through the same driver the CLI uses, printed as CSV.

use lovecap::kernel::Separation;
use lovecap::run::{run, Mode, OutputFormat, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kappas = [0.1, 0.05, 0.02]
        .map(Separation::new)
        .into_iter()
        .collect::<lovecap::Result<Vec<_>>>()?;
    for mode in [Mode::Raw, Mode::Power] {
        let report = run(&RunConfig::new(kappas.clone(), 90, mode))?;
        report.write(OutputFormat::Csv, std::io::stdout())?;
    }
    Ok(())
}

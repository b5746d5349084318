//! f0(N) against truncation at kappa = 0.01, plus one power-law estimate.

use lovecap::extrapolate::{fit_series, FitRule};
use lovecap::kernel::Separation;
use lovecap::solver::GalerkinSystem;

fn main() -> lovecap::Result<()> {
    let kappa = Separation::new(0.01)?;
    let sys = GalerkinSystem::assemble(kappa, 300)?;
    let curve = sys.curve(&[0, 10, 20, 50, 100, 150, 200, 300])?;
    println!("{:>5} {:>6} {:>16}", "N", "N*k", "f0");
    for (n, f0) in &curve.samples {
        println!("{n:>5} {:>6.2} {f0:>16.9}", *n as f64 * kappa.value());
    }
    let fit = fit_series(&sys, 300, FitRule::default())?;
    println!("extrapolated C = {:.9}", fit.c_hat);

    let res = sys.solve(300)?;
    println!(
        "condition ~ {:.2e}, residual {:.2e}",
        res.condition_estimate, res.residual
    );
    Ok(())
}

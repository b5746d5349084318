//! Carry the truncation residual from kappa = 0.02 down to 0.005 with a
//! fixed size budget, and compare with direct fits.

use lovecap::extrapolate::{fit_series, run_chain, FitRule};
use lovecap::kernel::{max_trunc, Separation};
use lovecap::solver::GalerkinSystem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget = 400;
    let kappas = [0.02, 0.01, 0.005]
        .map(Separation::new)
        .into_iter()
        .collect::<lovecap::Result<Vec<_>>>()?;

    let seed_n = budget.min(max_trunc(kappas[0]));
    let seed_sys = GalerkinSystem::assemble(kappas[0], seed_n)?;
    let seed = fit_series(&seed_sys, seed_n, FitRule::default())?;
    let chain = run_chain(&kappas, budget, &seed, seed_sys)?;

    println!(
        "{:>7} {:>5} {:>14} {:>14} {:>10}",
        "kappa", "N", "f0", "C_tilde", "dC"
    );
    for s in &chain.steps {
        println!(
            "{:>7} {:>5} {:>14.7} {:>14.7} {:>10.2e}",
            s.kappa.value(),
            s.trunc,
            s.f0,
            s.c_tilde,
            s.delta_c
        );
    }

    let last = chain.last();
    let n = (3.0 / last.kappa.value()) as usize;
    let direct = fit_series(
        &GalerkinSystem::assemble(last.kappa, n)?,
        n,
        FitRule::default(),
    )?;
    println!(
        "direct fit at N = {n}: {:.7} (chain off by {:.1e})",
        direct.c_hat,
        last.c_tilde - direct.c_hat
    );
    Ok(())
}

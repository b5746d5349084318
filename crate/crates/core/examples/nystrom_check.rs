//! Independent Nystrom solution of the integral equation against the
//! Galerkin result, and quadrature of single matrix entries.

use lovecap::extrapolate::{fit_series, FitRule};
use lovecap::kernel::{assemble, Separation};
use lovecap::oracle::{kernel_entry_quadrature, nystrom_solve, QuadratureRule};
use lovecap::solver::GalerkinSystem;

fn main() -> lovecap::Result<()> {
    let kappa = Separation::new(0.1)?;
    for m in [10, 20, 40, 80, 200] {
        let c = nystrom_solve(kappa, &QuadratureRule::gauss_legendre(m))?;
        println!("Nystrom M = {m:>3}: {c:.12}");
    }
    let sys = GalerkinSystem::assemble(kappa, 95)?;
    let fit = fit_series(&sys, 95, FitRule::default())?;
    println!("Galerkin N = 95 : {:.12}", fit.c_hat);

    let small = Separation::new(0.01)?;
    let c = nystrom_solve(small, &QuadratureRule::graded(small, 60, 12))?;
    println!("graded Nystrom at kappa = 0.01: {c:.8}");

    let k = assemble(kappa, 30)?;
    for (m, n) in [(0, 0), (0, 7), (3, 3), (12, 29)] {
        let q = kernel_entry_quadrature(kappa, m, n)?;
        println!(
            "K[{m}][{n}] closed {:+.15e} quadrature {:+.15e}",
            k.get(m, n),
            q
        );
    }
    Ok(())
}

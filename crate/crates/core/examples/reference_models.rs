//! Closed-form small-gap values next to the computed capacitance.

use lovecap::extrapolate::{fit_series, FitRule};
use lovecap::kernel::Separation;
use lovecap::reference::{excess_over_geometric, kirchhoff_ignatowsky_gap, ReferenceSet};
use lovecap::solver::GalerkinSystem;

fn main() -> lovecap::Result<()> {
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12} {:>10}",
        "kappa", "geometric", "Kirchhoff", "lower bnd", "computed", "excess"
    );
    for k in [0.5, 0.2, 0.1, 0.05, 0.02, 0.01] {
        let kappa = Separation::new(k)?;
        let n = (3.0 / k).round() as usize;
        let c = fit_series(&GalerkinSystem::assemble(kappa, n)?, n, FitRule::default())?.c_hat;
        let r = ReferenceSet::new(kappa);
        println!(
            "{k:>6} {:>12.6} {:>12.6} {:>12.6} {c:>12.6} {:>10.5}",
            r.c_geometric,
            r.c_kirchhoff,
            r.c_ignatowsky,
            excess_over_geometric(c, kappa)
        );
        assert!(r.above_lower_bound(c));
    }
    println!(
        "Kirchhoff - lower bound = {:.6}",
        kirchhoff_ignatowsky_gap()
    );
    Ok(())
}

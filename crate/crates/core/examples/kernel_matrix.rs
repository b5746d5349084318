//! Assemble the Galerkin matrix at one separation and look at its entries.

use lovecap::kernel::{assemble, check_guard, k00, k0n, max_trunc, Separation};

fn main() -> lovecap::Result<()> {
    let kappa = Separation::new(0.05)?;
    let n = 40;
    let product = check_guard(kappa, n)?;
    println!("kappa = {kappa}, N = {n}, N*pi*kappa = {product:.3}");
    println!("largest admissible N here: {}", max_trunc(kappa));

    let k = assemble(kappa, n)?;
    println!("K00 = {:.15} (closed form {:.15})", k.get(0, 0), k00(kappa));
    for j in [1, 2, 5, 10, 40] {
        println!(
            "K0{j:<3} = {:+.6e}  direct {:+.6e}",
            k.get(0, j),
            k0n(kappa, j)?
        );
    }
    println!("diagonal:");
    for j in [1, 2, 5, 10, 20, 40] {
        println!("  K[{j}][{j}] = {:.10}", k.get(j, j));
    }
    k.check_bound()?;
    println!("max |K| = {:.6}, bound holds", k.max_abs());
    Ok(())
}

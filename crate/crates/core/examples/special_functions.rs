//! Si and Ci at a few complex points, and the scaled E1 the kernel uses.

use lovecap::specfun::{ci, e1_scaled, si, si_ci};
use num_complex::Complex64;

fn main() -> lovecap::Result<()> {
    let points = [
        Complex64::new(1.0, 0.0),
        Complex64::new(3.0, 2.0),
        Complex64::new(-5.0, 0.5),
        Complex64::new(40.0, -10.0),
    ];
    println!("{:>18} {:>36} {:>36}", "z", "Si(z)", "Ci(z)");
    for z in points {
        let (s, c) = si_ci(z)?;
        println!("{z:>18} {s:>36.15} {c:>36.15}");
    }

    // Si(x) -> pi/2 along the real axis, with 1/x oscillations
    for x in [10.0, 100.0, 1000.0] {
        let s = si(Complex64::new(x, 0.0))?;
        println!(
            "Si({x}) - pi/2 = {:.3e}",
            s.re - std::f64::consts::FRAC_PI_2
        );
    }
    let c = ci(Complex64::new(1e-3, 0.0))?;
    println!("Ci(1e-3) = {:.15}", c.re);

    // e^w E1(w) stays O(1/|w|) where E1 alone would over- or underflow
    for w in [
        Complex64::new(800.0, 0.0),
        Complex64::new(-700.0, 0.0),
        Complex64::new(3.0, -60.0),
    ] {
        let v = e1_scaled(w)?;
        println!("e^w E1({w}) = {:.15} {:+.3e}i", v.re, v.im);
    }
    Ok(())
}

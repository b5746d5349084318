//! Si/Ci against an extended-precision Maclaurin series evaluated with
//! 320-bit floats, plus the symmetry and derivative properties.

use std::f64::consts::PI;

mod common;

use astro_float::Consts;
use common::{grid, oracle_ci, oracle_si, rel};
use lovecap::specfun::{ci, si};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn oracle_series_reproduces_known_real_values() {
    let mut cc = Consts::new().unwrap();
    let s = oracle_si(Complex64::new(1.0, 0.0), &mut cc);
    assert!((s.re - 0.946_083_070_367_183_0).abs() < 1e-16);
    let c = oracle_ci(Complex64::new(1.0, 0.0), &mut cc);
    assert!((c.re - 0.337_403_922_900_968_1).abs() < 1e-16);
}

#[test]
fn si_ci_match_extended_precision_series_on_grid() {
    let mut cc = Consts::new().unwrap();
    let mut worst_si = (0.0, Complex64::new(0.0, 0.0));
    let mut worst_ci = (0.0, Complex64::new(0.0, 0.0));
    for z in grid() {
        let es = rel(si(z).unwrap(), oracle_si(z, &mut cc));
        let ec = rel(ci(z).unwrap(), oracle_ci(z, &mut cc));
        if es > worst_si.0 {
            worst_si = (es, z);
        }
        if ec > worst_ci.0 {
            worst_ci = (ec, z);
        }
    }
    println!("worst Si rel err {:e} at {}", worst_si.0, worst_si.1);
    println!("worst Ci rel err {:e} at {}", worst_ci.0, worst_ci.1);
    assert!(
        worst_si.0 <= 1e-13,
        "Si worst {:e} at {}",
        worst_si.0,
        worst_si.1
    );
    assert!(
        worst_ci.0 <= 1e-13,
        "Ci worst {:e} at {}",
        worst_ci.0,
        worst_ci.1
    );
}

#[test]
fn kernel_argument_families_match_oracle() {
    // Arguments of the form kπ(1+iκ), kπ(2+iκ), ikπκ with |z| ≤ 20.
    let mut cc = Consts::new().unwrap();
    for &kappa in &[0.01, 0.1, 0.5] {
        for k in 1..=3 {
            let kf = k as f64 * PI;
            for z in [
                Complex64::new(kf, kf * kappa),
                Complex64::new(2.0 * kf, kf * kappa),
                Complex64::new(0.0, kf * kappa),
            ] {
                assert!(
                    rel(si(z).unwrap(), oracle_si(z, &mut cc)) <= 1e-13,
                    "Si {z}"
                );
                assert!(
                    rel(ci(z).unwrap(), oracle_ci(z, &mut cc)) <= 1e-13,
                    "Ci {z}"
                );
            }
        }
    }
}

proptest! {
    #[test]
    fn si_is_odd(re in -60.0f64..60.0, im in -40.0f64..40.0) {
        prop_assume!(re != 0.0 || im != 0.0);
        let z = Complex64::new(re, im);
        let a = si(z).unwrap();
        let b = si(-z).unwrap();
        prop_assert!((a.re + b.re).abs() <= 2.0 * f64::EPSILON * a.re.abs());
        prop_assert!((a.im + b.im).abs() <= 2.0 * f64::EPSILON * a.im.abs());
    }

    #[test]
    fn conjugation_holds_off_the_negative_axis(re in -60.0f64..60.0, im in -40.0f64..40.0) {
        prop_assume!(im != 0.0);
        let z = Complex64::new(re, im);
        prop_assert_eq!(si(z.conj()).unwrap(), si(z).unwrap().conj());
        prop_assert_eq!(ci(z.conj()).unwrap(), ci(z).unwrap().conj());
    }

    #[test]
    fn ci_reflection(re in -60.0f64..60.0, im in 1e-3f64..40.0) {
        let z = Complex64::new(re, im);
        let c = ci(z).unwrap();
        let d = ci(-z).unwrap() - c + Complex64::new(0.0, PI);
        prop_assert!(d.norm() <= 1e-13 * (c.norm() + 1.0));
    }
}

#[test]
fn derivatives_match_finite_differences() {
    // Central difference with h = 1e-5. The rounding floor of the difference
    // quotient is ~eps·|f|/h, so the tolerance is 1e-8 scaled by max(1, |f'|).
    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 300 {
        let z = Complex64::new(rng.gen_range(-30.0..30.0), rng.gen_range(-10.0..10.0));
        let r = z.norm();
        if !(0.5..=30.0).contains(&r) {
            continue;
        }
        checked += 1;
        let hz = Complex64::new(h, 0.0);
        let ds = (si(z + hz).unwrap() - si(z - hz).unwrap()) / (2.0 * h);
        let want_s = z.sin() / z;
        assert!(
            (ds - want_s).norm() <= 1e-8 * want_s.norm().max(1.0),
            "Si' at {z}: {ds} vs {want_s}"
        );
        // keep the difference stencil off the branch cut of Ci
        if z.re < 0.0 && z.im.abs() < 2.0 * h {
            continue;
        }
        let dc = (ci(z + hz).unwrap() - ci(z - hz).unwrap()) / (2.0 * h);
        let want_c = z.cos() / z;
        assert!(
            (dc - want_c).norm() <= 1e-8 * want_c.norm().max(1.0),
            "Ci' at {z}: {dc} vs {want_c}"
        );
    }
}

/// Large-modulus arguments out of reach of the series oracle; reference
/// values from a 40-digit evaluation (mpmath) at the same binary inputs.
const FAR_FIELD: &[(f64, f64, f64, f64, f64, f64)] = &[
    (
        1884.9555921538758,
        9.42477796076938,
        -1.7161237786002174409,
        0.014690827987200651655,
        0.014690827750433291252,
        3.2869200625840117992,
    ),
    (
        4712.38898038469,
        9.42477796076938,
        0.256005911989856199,
        0.0023505734548094166265,
        0.0023505734169256370659,
        1.3147903976801554962,
    ),
    (
        18849.55592153876,
        18.84955592153876,
        -4071.5436555449139381,
        3.8570289942950163847,
        3.8570289942950160209,
        4073.1144518717084892,
    ),
    (
        50.0,
        30.0,
        -89323899148.610963924,
        23746987600.909013121,
        23746987600.909013121,
        89323899150.181760251,
    ),
    (
        25.0,
        49.0,
        -10143016822801780835.0,
        14413694447101833986.0,
        14413694447101833986.0,
        10143016822801780837.0,
    ),
    (
        100000.0,
        1.0,
        1.5708117477366707294,
        4.200835360352049164e-7,
        5.5166954303342589658e-7,
        -0.000011744501452507825457,
    ),
    (
        123.456,
        -7.5,
        5.6043034753037092341,
        6.0988813518335209922,
        -6.0988847537251567141,
        4.0335042501688865811,
    ),
    (
        -400.0,
        9.0,
        -6.7169813224005090847,
        -8.7217073231507486594,
        -8.7217075814655567896,
        8.2877774806718405881,
    ),
    (
        30.0,
        0.0,
        1.566756540030351111,
        0.0,
        -0.033032417282071143779,
        0.0,
    ),
    (
        4.5,
        0.1,
        1.6541328598691985801,
        -0.021759001305969310656,
        -0.19463006935423805954,
        -0.004675286727001616301,
    ),
];

#[test]
fn far_field_values() {
    for &(re, im, sr, sim, cr, cim) in FAR_FIELD {
        let z = Complex64::new(re, im);
        let s = si(z).unwrap();
        let c = ci(z).unwrap();
        let es = rel(s, Complex64::new(sr, sim));
        let ec = rel(c, Complex64::new(cr, cim));
        assert!(es <= 1e-13, "Si({z}) rel err {es:e}");
        assert!(ec <= 1e-13, "Ci({z}) rel err {ec:e}");
    }
}

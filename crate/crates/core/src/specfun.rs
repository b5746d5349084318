//! Sine and Cosine integrals of complex argument.
//!
//! `Si(z) = ∫₀ᶻ sin t / t dt` and the principal branch of
//! `Ci(z) = γ + ln z + ∫₀ᶻ (cos t − 1) / t dt`.
//!
//! Evaluation always happens on the first-quadrant representative
//! `w = |Re z| + i |Im z|` and is mapped back through the conjugation,
//! odd-symmetry and reflection identities, so those identities hold by
//! construction rather than by accident of rounding.
//!
//! Two regimes cover the first quadrant:
//!
//! * the Maclaurin series, used for small `|w|` and near the imaginary axis,
//!   where the terms do not cancel (`|w| − Im w` small);
//! * the exponential integral `E₁(±iw)` via its continued fraction
//!   everywhere else, with
//!   `Si(w) = (E₁(iw) − E₁(−iw)) / 2i + π/2` and
//!   `Ci(w) = −(E₁(iw) + E₁(−iw)) / 2`, valid for `Re w > 0`.
//!
//! [`e1_scaled`] and [`ei_scaled`] expose the exponentially scaled
//! `e^w E₁(w)` and `e^{−x} Ei(x)`, which stay O(1/|w|) where `E₁` and `Ei`
//! over- or underflow.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// A complex number in double precision.
pub type ComplexValue = Complex64;

/// Largest `|Im z|` accepted by [`si`] and [`ci`].
pub const IM_LIMIT: f64 = 50.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this modulus the series is always used.
const SERIES_RADIUS: f64 = 4.0;
/// The series is also used while `|w| − Im w` stays below this; the
/// cancellation loss is roughly `exp(|w| − Im w)`.
const SERIES_SLACK: f64 = 3.0;

const MAX_SERIES_TERMS: usize = 1000;
/// Near the negative real axis, `e^w E₁(w)` switches from the power series
/// to its asymptotic series beyond this modulus.
const E1_ASYMPTOTIC_RADIUS: f64 = 40.0;
/// `Ei` switches from its series to the asymptotic expansion here.
const EI_SERIES_LIMIT: f64 = 50.0;
const MAX_CF_ITERATIONS: usize = 20_000;
const CF_EPS: f64 = 1e-17;
const CF_TINY: f64 = 1e-300;

fn check_region(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() || z.im.abs() > IM_LIMIT {
        return Err(Error::AccuracyRegion(z));
    }
    Ok(())
}

/// Sine integral `Si(z)`.
pub fn si(z: ComplexValue) -> Result<ComplexValue> {
    check_region(z)?;
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(z);
    }
    let (s, _) = first_quadrant(Complex64::new(z.re.abs(), z.im.abs()));
    Ok(map_si(z, s))
}

/// Cosine integral `Ci(z)` on the principal branch `−π < arg z ≤ π`.
pub fn ci(z: ComplexValue) -> Result<ComplexValue> {
    check_region(z)?;
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Singularity);
    }
    let (_, c) = first_quadrant(Complex64::new(z.re.abs(), z.im.abs()));
    Ok(map_ci(z, c))
}

/// `(Si(z), Ci(z))` sharing a single evaluation.
pub fn si_ci(z: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
    check_region(z)?;
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Singularity);
    }
    let (s, c) = first_quadrant(Complex64::new(z.re.abs(), z.im.abs()));
    Ok((map_si(z, s), map_ci(z, c)))
}

/// Evaluates `(si(p), ci(p))` for every point, preserving order.
///
/// The first failing point (lowest index) is reported with its index.
pub fn si_ci_batch(points: &[ComplexValue]) -> Result<Vec<(ComplexValue, ComplexValue)>> {
    points
        .par_iter()
        .enumerate()
        .map(|(index, &z)| {
            si_ci(z).map_err(|e| Error::Batch {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn map_si(z: Complex64, s: Complex64) -> Complex64 {
    match (z.re < 0.0, z.im < 0.0) {
        (false, false) => s,
        (false, true) => s.conj(),
        (true, false) => -s.conj(),
        (true, true) => -s,
    }
}

fn map_ci(z: Complex64, c: Complex64) -> Complex64 {
    // Left half plane: Ci(z) = Ci(−z) ± iπ, sign following Im z (upper side
    // on the negative real axis itself).
    match (z.re < 0.0, z.im < 0.0) {
        (false, false) => c,
        (false, true) => c.conj(),
        (true, false) => Complex64::new(c.re, -c.im + PI),
        (true, true) => Complex64::new(c.re, c.im - PI),
    }
}

/// `(Si(w), Ci(w))` for `Re w ≥ 0`, `Im w ≥ 0`, `w ≠ 0`.
fn first_quadrant(w: Complex64) -> (Complex64, Complex64) {
    let r = w.norm();
    if r <= SERIES_RADIUS || r - w.im <= SERIES_SLACK {
        series(w)
    } else {
        via_exponential_integral(w)
    }
}

fn series(w: Complex64) -> (Complex64, Complex64) {
    let r = w.norm();
    let w2 = -(w * w);
    // Si: Σ t_k / (2k+1), t_k = (−1)^k w^{2k+1} / (2k+1)!
    // Ci − γ − ln w: Σ u_k / (2k), u_k = (−1)^k w^{2k} / (2k)!
    let mut t = w;
    let mut u = Complex64::new(1.0, 0.0);
    let mut sum_s = w;
    let mut sum_c = Complex64::new(0.0, 0.0);
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        u = u * w2 / ((2.0 * kf - 1.0) * (2.0 * kf));
        t = t * w2 / ((2.0 * kf) * (2.0 * kf + 1.0));
        let dc = u / (2.0 * kf);
        let ds = t / (2.0 * kf + 1.0);
        sum_c += dc;
        sum_s += ds;
        if 2.0 * kf > r
            && ds.norm() <= 1e-17 * sum_s.norm()
            && dc.norm() <= 1e-17 * (sum_c.norm() + 1e-300)
        {
            break;
        }
    }
    let ci = sum_c + w.ln() + EULER_GAMMA;
    (sum_s, ci)
}

fn via_exponential_integral(w: Complex64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let e_plus = e1_continued_fraction(i * w);
    let e_minus = e1_continued_fraction(-i * w);
    let si = (e_plus - e_minus) / (2.0 * i) + FRAC_PI_2;
    let ci = -(e_plus + e_minus) * 0.5;
    (si, ci)
}

/// `e^w E₁(w)` on the principal branch (upper side on the negative real
/// axis). Bounded like `1/w` for large `|w|` in every direction, which is
/// what makes it useful where `E₁` itself over- or underflows.
pub fn e1_scaled(w: ComplexValue) -> Result<ComplexValue> {
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::AccuracyRegion(w));
    }
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::Singularity);
    }
    let r = w.norm();
    // the series loses about exp(|w| + Re w); the fraction stalls near the
    // negative real axis
    if r <= 2.0 || (w.re < 0.0 && r + w.re <= SERIES_SLACK) {
        if r > E1_ASYMPTOTIC_RADIUS {
            return Ok(e1_scaled_asymptotic(w));
        }
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..MAX_SERIES_TERMS {
            let kf = k as f64;
            term = -term * w / kf;
            let d = term / kf;
            sum += d;
            if kf > r && d.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        Ok((-(w.ln()) - EULER_GAMMA - sum) * w.exp())
    } else {
        Ok(e1_continued_fraction_scaled(w))
    }
}

/// `e^{−x} Ei(x)` for `x > 0`, with `Ei` the principal-value exponential
/// integral.
pub fn ei_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "ei_scaled needs finite x > 0, got {x}"
        )));
    }
    if x <= EI_SERIES_LIMIT {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..MAX_SERIES_TERMS {
            let kf = k as f64;
            term *= x / kf;
            let d = term / kf;
            sum += d;
            if kf > x && d <= 1e-17 * sum {
                break;
            }
        }
        Ok((EULER_GAMMA + x.ln() + sum) * (-x).exp())
    } else {
        // asymptotic: (1/x) Σ k!/x^k, stopped at the smallest term
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..MAX_SERIES_TERMS {
            let next = term * k as f64 / x;
            if next >= term || next <= 1e-17 * sum {
                break;
            }
            term = next;
            sum += term;
        }
        Ok(sum / x)
    }
}

/// `E₁(x)` from `e^{−x} / (x + 1 − 1²/(x + 3 − 2²/(x + 5 − …)))`, modified
/// Lentz evaluation. Converges off the negative real axis.
/// `(1/w) Σ (−1)^k k!/w^k`, stopped at the smallest term. The neglected
/// `iπ e^w` is far below roundoff once `Re w < −E1_ASYMPTOTIC_RADIUS + 3`.
fn e1_scaled_asymptotic(w: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..MAX_SERIES_TERMS {
        let next = -term * k as f64 / w;
        if next.norm() >= term.norm() || next.norm() <= 1e-17 * sum.norm() {
            break;
        }
        term = next;
        sum += term;
    }
    sum / w
}

fn e1_continued_fraction(x: Complex64) -> Complex64 {
    e1_continued_fraction_scaled(x) * (-x).exp()
}

fn e1_continued_fraction_scaled(x: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut b = x + 1.0;
    let mut c = Complex64::new(1.0 / CF_TINY, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..MAX_CF_ITERATIONS {
        let an = -((i * i) as f64);
        b += 2.0;
        let mut den = d * an + b;
        if den.norm() < CF_TINY {
            den = Complex64::new(CF_TINY, 0.0);
        }
        d = one / den;
        c = b + c.inv() * an;
        if c.norm() < CF_TINY {
            c = Complex64::new(CF_TINY, 0.0);
        }
        let del = c * d;
        h *= del;
        if (del - one).norm() < CF_EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn si_of_zero_is_zero() {
        assert_eq!(si(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn ci_of_zero_is_singular() {
        assert_eq!(ci(c(0.0, 0.0)), Err(Error::Singularity));
        assert_eq!(si_ci(c(0.0, 0.0)), Err(Error::Singularity));
    }

    #[test]
    fn outside_region_is_rejected() {
        let z = c(1.0, 50.5);
        assert_eq!(si(z), Err(Error::AccuracyRegion(z)));
        assert!(ci(c(1.0, -51.0)).is_err());
        assert!(si(c(f64::NAN, 0.0)).is_err());
        assert!(si(c(1.0, 50.0)).is_ok());
    }

    #[test]
    fn real_axis_values() {
        // Reference digits from the 50-term Maclaurin series in exact arithmetic.
        let s = si(c(1.0, 0.0)).unwrap();
        assert!((s.re - 0.946_083_070_367_183_0).abs() < 1e-15);
        assert_eq!(s.im, 0.0);
        let k = ci(c(1.0, 0.0)).unwrap();
        assert!((k.re - 0.337_403_922_900_968_1).abs() < 1e-15);
    }

    #[test]
    fn negative_real_axis_uses_upper_side() {
        let k = ci(c(-2.0, 0.0)).unwrap();
        let kp = ci(c(2.0, 0.0)).unwrap();
        assert_eq!(k.re, kp.re);
        assert!((k.im - PI).abs() < 1e-15);
    }

    #[test]
    fn odd_symmetry_is_exact() {
        let z = c(1.0, 2.0);
        assert_eq!(si(z).unwrap(), -si(-z).unwrap());
    }

    #[test]
    fn conjugation_is_exact() {
        let z = c(2.0, 3.0);
        assert_eq!(ci(z.conj()).unwrap(), ci(z).unwrap().conj());
        assert_eq!(si(z.conj()).unwrap(), si(z).unwrap().conj());
    }

    #[test]
    fn reflection_identity() {
        let z = c(1.0, 1.0);
        let d = ci(-z).unwrap() - (ci(z).unwrap() - c(0.0, PI));
        assert!(d.norm() < 1e-15);
    }

    #[test]
    fn pure_imaginary_matches_hyperbolic_integrals() {
        // Si(iy) = i Shi(y), Ci(iy) = Chi(y) + iπ/2
        let (s, k) = si_ci(c(0.0, 2.0)).unwrap();
        assert!(s.re.abs() < 1e-15);
        assert!((s.im - 2.501_567_433_354_975_6).abs() < 1e-14);
        assert!((k.re - 2.452_666_922_646_914_5).abs() < 1e-14);
        assert!((k.im - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn regimes_agree_at_the_boundary() {
        for &z in &[c(4.0, 0.5), c(6.0, 4.0), c(10.0, 20.0), c(3.5, 1.0)] {
            let a = series(z);
            let b = via_exponential_integral(z);
            assert!((a.0 - b.0).norm() <= 1e-13 * a.0.norm(), "Si at {z}");
            assert!((a.1 - b.1).norm() <= 1e-13 * a.1.norm(), "Ci at {z}");
        }
    }

    #[test]
    fn large_real_part() {
        // Si(x) → π/2 − cos x / x, Ci(x) → sin x / x for large x.
        let x = 1.0e5;
        let (s, k) = si_ci(c(x, 0.0)).unwrap();
        let f = 1.0 / x;
        assert!((s.re - (FRAC_PI_2 - x.cos() * f - x.sin() * f * f)).abs() < 1e-14);
        assert!((k.re - (x.sin() * f - x.cos() * f * f)).abs() < 1e-14);
    }

    #[test]
    fn batch_preserves_order_and_reports_index() {
        assert!(si_ci_batch(&[]).unwrap().is_empty());
        let pts = [c(1.0, 0.0), c(2.0, 3.0), c(2.0, -3.0)];
        let out = si_ci_batch(&pts).unwrap();
        assert_eq!(out[0], (si(pts[0]).unwrap(), ci(pts[0]).unwrap()));
        assert_eq!(out[2].0, out[1].0.conj());
        assert_eq!(out[2].1, out[1].1.conj());
        let bad = [c(1.0, 0.0), c(0.0, 0.0), c(1.0, 99.0)];
        match si_ci_batch(&bad) {
            Err(Error::Batch { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scaled_exponential_integrals_match_reference() {
        // 40-digit reference values; the negative real axis takes the
        // upper side
        let e1_table = [
            (0.5, 0.0, 0.92291063248373046883, 0.0),
            (1e-05, 0.0, 10.935829157788483783, 0.0),
            (2.0, 0.0, 0.3613286168882225847, 0.0),
            (7.3, 0.0, 0.1219578319914612419, 0.0),
            (31.4, 0.0, 0.030892003709404643683, 0.0),
            (0.3, 0.4, 0.8387539990401675948, -0.50206681886181046014),
            (-0.9, 1.2, -0.051144234547765599547, -0.63737858179952450357),
            (
                -30.0,
                -TAU,
                -0.032969241257721185405,
                0.0071613301154638157359,
            ),
            (-3.0, -TAU, -0.044060904895868482625, 0.14183237066301483385),
            (0.094, -TAU, 0.02466874788339996496, 0.1520042504791193544),
            (
                -0.094,
                -TAU,
                0.020428110147600770822,
                0.15322773688557153113,
            ),
            (
                2.5,
                -62.83185307179586,
                0.00088302987851231306945,
                0.015862341580248191458,
            ),
            (
                -9.42,
                -18.84955592153876,
                -0.019648902062295157605,
                0.044180398090593842324,
            ),
            (-1.5, 0.0, -0.73661635096001288683, -0.70098407191662119982),
            (
                -40.0,
                0.5,
                -0.025654630638226375264,
                -0.00032937696897122839135,
            ),
            (
                150.0,
                -3.0,
                0.0066201895909823920325,
                0.00013153825716318548572,
            ),
            (
                -25.0,
                -200.0,
                -0.00059144083961677460584,
                0.0049289069678035866256,
            ),
            (800.0, 0.0, 0.0012484413916743503273, 0.0),
            (-700.0, 0.0, -0.0014306181009351634011, 0.0),
            (-41.0, 0.0, -0.025016506856911832092, 0.0),
            (
                -45.0,
                1.0,
                -0.022727834432372576594,
                -0.00051711683877248785003,
            ),
            (
                -300.0,
                -2.0,
                -0.0033443696262811555307,
                0.000022370870938672486207,
            ),
            (
                3.0,
                -60.0,
                0.0011051393338540841111,
                0.016588463449387223606,
            ),
        ];
        for &(x, y, re, im) in &e1_table {
            let got = e1_scaled(c(x, y)).unwrap();
            let want = c(re, im);
            assert!(
                (got - want).norm() <= 1e-14 * want.norm(),
                "E1 at ({x}, {y}): {got} vs {want}"
            );
        }
        let ei_table = [
            (1e-06, -13.238280654775217371),
            (0.01, -3.9779503992615576755),
            (0.5, 0.27549829855127026213),
            (3.0, 0.49457640134864123503),
            (12.0, 0.091914545408896589389),
            (49.0, 0.020842791788506797178),
            (51.0, 0.020008352011977153547),
            (80.0, 0.0126603105540328843),
            (300.0, 0.0033445192693037826333),
        ];
        for &(x, want) in &ei_table {
            let got = ei_scaled(x).unwrap();
            assert!(
                (got - want).abs() <= 1e-14 * want.abs(),
                "Ei at {x}: {got} vs {want}"
            );
        }
        assert!(e1_scaled(c(0.0, 0.0)).is_err());
        assert!(ei_scaled(0.0).is_err());
    }
}

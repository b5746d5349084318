//! Self-check of the closed forms against the quadrature oracles.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extrapolate::{fit_series, FitRule};
use crate::kernel::{self, assemble, i1, i2, i3, i4, k00, k0n, DirectSource, Separation};
use crate::oracle::{
    i_integrand_quadrature, kernel_entry_quadrature, nystrom_solve, IntegralSpec, QuadratureRule,
};
use crate::solver::GalerkinSystem;
use crate::specfun::{ci, si};

const ENTRY_TOL: f64 = 1e-8;
const INTEGRAL_TOL: f64 = 1e-9;
const NYSTROM_TOL: f64 = 1e-5;
/// Parameter draws keep `β·|Im z|` at or below this.
const ADMISSIBLE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::Config(format!("unknown level '{s}' (fast, full)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub level: Level,
    pub cases: Vec<Case>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut suites: Vec<&str> = Vec::new();
        for c in &self.cases {
            if !suites.contains(&c.suite) {
                suites.push(c.suite);
            }
        }
        for s in suites {
            let (n, bad) = self
                .cases
                .iter()
                .filter(|c| c.suite == s)
                .fold((0, 0), |(n, b), c| (n + 1, b + usize::from(!c.passed)));
            writeln!(
                f,
                "{:<5} {s}: {}/{n} cases",
                if bad == 0 { "PASS" } else { "FAIL" },
                n - bad
            )?;
        }
        for c in self.failures() {
            writeln!(f, "  failed {} / {}: {}", c.suite, c.name, c.detail)?;
        }
        write!(
            f,
            "{} in {:.1?}",
            if self.passed() {
                "verify passed"
            } else {
                "verify FAILED"
            },
            self.elapsed
        )
    }
}

fn record(
    cases: &mut Vec<Case>,
    suite: &'static str,
    name: String,
    outcome: Result<(f64, f64)>,
    tol: f64,
) {
    let case = match outcome {
        Ok((got, want)) => {
            let err = (got - want).abs();
            Case {
                suite,
                name,
                passed: err <= tol,
                detail: format!(
                    "closed form {got:.15e}, oracle {want:.15e}, |diff| {err:.2e} (tol {tol:.0e})"
                ),
            }
        }
        Err(e) => Case {
            suite,
            name,
            passed: false,
            detail: e.to_string(),
        },
    };
    cases.push(case);
}

fn sep(k: f64) -> Separation {
    Separation::new(k).expect("positive literal")
}

/// Entry `(m, n)` from the closed forms.
fn analytic_entry(kappa: Separation, m: usize, n: usize) -> Result<f64> {
    let (m, n) = (m.max(n), m.min(n));
    match (m, n) {
        (0, 0) => Ok(k00(kappa)),
        (m, 0) => k0n(kappa, m),
        _ => kernel::kmn(kappa, m, n, &DirectSource(kappa)),
    }
}

fn kernel_suite<F>(level: Level, entry: F, cases: &mut Vec<Case>)
where
    F: Fn(Separation, usize, usize) -> Result<f64>,
{
    let (kappas, top): (&[f64], usize) = match level {
        Level::Fast => (&[0.1], 5),
        Level::Full => (&[0.1, 0.01], 12),
    };
    for &k in kappas {
        let kappa = sep(k);
        for m in 0..=top {
            for n in 0..=m {
                let outcome = entry(kappa, m, n)
                    .and_then(|a| kernel_entry_quadrature(kappa, m, n).map(|q| (a, q)));
                record(
                    cases,
                    "kernel entries",
                    format!("K({m},{n}) at kappa = {k}"),
                    outcome,
                    ENTRY_TOL,
                );
            }
        }
    }
}

/// Deterministic points of the additive golden-ratio sequence in `[0, 1)`.
fn spread(count: usize, salt: f64) -> impl Iterator<Item = f64> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    (1..=count).map(move |j| (salt + j as f64 * phi).fract())
}

fn integral_suite(level: Level, cases: &mut Vec<Case>) {
    let count = match level {
        Level::Fast => 4,
        Level::Full => 20,
    };
    let lerp = |t: f64, a: f64, b: f64| a + t * (b - a);
    for (j, t) in spread(count, 0.1).enumerate() {
        let beta = lerp(t, 0.5, 25.0);
        let k = lerp((t * 7.0).fract(), 0.01, (ADMISSIBLE / beta).min(1.0));
        let alpha = lerp((t * 13.0).fract(), -1.5, 1.5);
        let spec = IntegralSpec::I1 {
            beta,
            kappa: k,
            alpha,
        };
        let out =
            i1(beta, sep(k), alpha).and_then(|a| i_integrand_quadrature(spec).map(|q| (a, q.re)));
        record(
            cases,
            "I1",
            format!("draw {j}: beta {beta:.4}, kappa {k:.4}, alpha {alpha:.4}"),
            out,
            INTEGRAL_TOL,
        );
        let spec = IntegralSpec::I2 {
            beta,
            kappa: k,
            alpha,
        };
        let out =
            i2(beta, sep(k), alpha).and_then(|a| i_integrand_quadrature(spec).map(|q| (a, q.re)));
        record(
            cases,
            "I2",
            format!("draw {j}: beta {beta:.4}, kappa {k:.4}, alpha {alpha:.4}"),
            out,
            INTEGRAL_TOL,
        );
    }
    for (j, t) in spread(count, 0.3).enumerate() {
        let beta = lerp(t, 0.5, 15.0);
        let k = lerp((t * 7.0).fract(), 0.03, (ADMISSIBLE / beta).min(1.0));
        let mut gamma = lerp((t * 11.0).fract(), -15.0, 15.0);
        if (gamma.abs() - beta).abs() < 0.2 || gamma.abs() < 0.2 {
            gamma += 0.5;
        }
        let spec = IntegralSpec::I3 {
            beta,
            kappa: k,
            gamma,
        };
        let out =
            i3(beta, sep(k), gamma).and_then(|a| i_integrand_quadrature(spec).map(|q| (a, q.re)));
        record(
            cases,
            "I3",
            format!("draw {j}: beta {beta:.4}, kappa {k:.4}, gamma {gamma:.4}"),
            out,
            INTEGRAL_TOL,
        );
    }
    for (j, t) in spread(count, 0.7).enumerate() {
        let beta = lerp(t, 0.5, 15.0);
        let mut q = lerp((t * 5.0).fract(), -15.0, 15.0);
        if q.abs() < 0.2 || (q - beta).abs() < 0.2 {
            q += 0.5;
        }
        let lim = (ADMISSIBLE / beta).min(0.3);
        let z1 = Complex64::new(
            lerp((t * 3.0).fract(), -1.0, 1.0),
            lerp((t * 17.0).fract(), -lim, lim),
        );
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let z2 = Complex64::new(
            lerp((t * 19.0).fract(), -2.0, 1.0),
            sign * lerp((t * 23.0).fract(), 0.05, 1.0) * lim,
        );
        let spec = IntegralSpec::I4 { q, beta, z1, z2 };
        let out = i4(q, beta, z1, z2).and_then(|a| {
            let o = i_integrand_quadrature(spec)?;
            // compare on a common scale so the distance is the complex one
            let scale = o.norm().max(1.0);
            Ok(((a - o).norm() / scale, 0.0))
        });
        record(
            cases,
            "I4",
            format!("draw {j}: q {q:.4}, beta {beta:.4}, z1 {z1:.3}, z2 {z2:.3}"),
            out,
            INTEGRAL_TOL,
        );
    }
}

fn specfun_suite(cases: &mut Vec<Case>) {
    let pts = [
        Complex64::new(0.7, 0.2),
        Complex64::new(-3.0, 1.5),
        Complex64::new(12.0, -4.0),
        Complex64::new(40.0, 9.0),
        Complex64::new(0.0, 6.0),
    ];
    for z in pts {
        let out = (|| -> Result<(f64, f64)> {
            let odd = (si(-z)? + si(z)?).norm();
            let conj =
                (si(z.conj())? - si(z)?.conj()).norm() + (ci(z.conj())? - ci(z)?.conj()).norm();
            let shift = if z.im > 0.0 { -PI } else { PI };
            let refl = (ci(-z)? - ci(z)? - Complex64::new(0.0, shift)).norm();
            Ok((odd + conj + refl, 0.0))
        })();
        record(
            cases,
            "specfun identities",
            format!("z = {z}"),
            out,
            1e-13 * (1.0 + z.norm()),
        );
    }
}

fn matrix_suite(cases: &mut Vec<Case>) {
    for &k in &[1.0, 0.1, 0.02] {
        let kappa = sep(k);
        let trunc = kernel::max_trunc(kappa).min(400);
        let (passed, detail) = match assemble(kappa, trunc) {
            Ok(m) => {
                let ratio = m.max_abs() / m.get(0, 0);
                (ratio <= 2.0, format!("max|K|/K00 = {ratio:.4}"))
            }
            Err(e) => (false, e.to_string()),
        };
        cases.push(Case {
            suite: "matrix bound",
            name: format!("kappa = {k}, N = {trunc}"),
            passed,
            detail,
        });
    }
    let (passed, detail) = match assemble(sep(1.0), 100) {
        Err(e @ Error::PrecisionGuard { .. }) => (true, e.to_string()),
        Err(e) => (false, format!("unexpected error: {e}")),
        Ok(_) => (false, "assembly at N*pi*kappa = 314 was accepted".into()),
    };
    cases.push(Case {
        suite: "matrix bound",
        name: "guard at kappa = 1, N = 100".into(),
        passed,
        detail,
    });
}

fn nystrom_suite(level: Level, cases: &mut Vec<Case>) {
    let kappas: &[f64] = match level {
        Level::Fast => &[0.1],
        Level::Full => &[0.1, 0.05],
    };
    for &k in kappas {
        let kappa = sep(k);
        let out = (|| -> Result<(f64, f64)> {
            let n = kernel::max_trunc(kappa);
            let system = GalerkinSystem::assemble(kappa, n)?;
            let c = fit_series(&system, n, FitRule::default())?.c_hat;
            let ny = nystrom_solve(kappa, &QuadratureRule::graded(kappa, 40, 12))?;
            Ok(((c - ny).abs() / ny, 0.0))
        })();
        record(
            cases,
            "nystrom vs galerkin",
            format!("relative difference at kappa = {k}"),
            out,
            NYSTROM_TOL,
        );
    }
}

fn run_suites<F>(level: Level, entry: F) -> Report
where
    F: Fn(Separation, usize, usize) -> Result<f64>,
{
    let start = Instant::now();
    let mut cases = Vec::new();
    specfun_suite(&mut cases);
    kernel_suite(level, entry, &mut cases);
    integral_suite(level, &mut cases);
    matrix_suite(&mut cases);
    nystrom_suite(level, &mut cases);
    Report {
        level,
        cases,
        elapsed: start.elapsed(),
    }
}

/// Runs every oracle suite at `level`.
pub fn verify(level: Level) -> Report {
    run_suites(level, analytic_entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{knn_generic_parts, IndexTerms};

    #[test]
    fn fast_level_passes() {
        let r = verify(Level::Fast);
        assert!(r.passed(), "{r}");
        assert!(r.cases.len() > 30);
    }

    #[test]
    fn sign_flip_in_diagonal_moment_is_caught() {
        let mutated = |kappa: Separation, m: usize, n: usize| -> Result<f64> {
            if m == n && m > 0 {
                let t = IndexTerms::compute(kappa, n)?;
                Ok(2.0 * t.cos + t.first - t.sin / (n as f64 * PI))
            } else {
                analytic_entry(kappa, m, n)
            }
        };
        let r = run_suites(Level::Fast, mutated);
        assert!(!r.passed());
        let bad: Vec<&Case> = r.failures().collect();
        assert!(bad
            .iter()
            .all(|c| c.suite == "kernel entries" && diagonal(&c.name)));
        assert!(r.to_string().contains("failed kernel entries / K(1,1)"));
    }

    #[test]
    fn sign_flip_in_si_ci_sinh_term_is_caught() {
        // the Si/Ci diagonal is accurate at the fast level's small products
        let mutated = |kappa: Separation, m: usize, n: usize| -> Result<f64> {
            if m == n && m > 0 {
                let (pair, sinh_part, cosh_part) = knn_generic_parts(kappa, n)?;
                Ok(-(pair - sinh_part + cosh_part).im / PI)
            } else {
                analytic_entry(kappa, m, n)
            }
        };
        let r = run_suites(Level::Fast, mutated);
        let bad: Vec<&Case> = r.failures().collect();
        assert!(!bad.is_empty());
        assert!(bad
            .iter()
            .all(|c| c.suite == "kernel entries" && diagonal(&c.name)));
    }

    fn diagonal(name: &str) -> bool {
        let inner = name.trim_start_matches("K(").split(')').next().unwrap();
        let (m, n) = inner.split_once(',').unwrap();
        m == n
    }

    #[test]
    fn levels_parse() {
        assert_eq!("full".parse::<Level>().unwrap(), Level::Full);
        assert!("quick".parse::<Level>().is_err());
    }
}

//! `N → ∞` extrapolation: the three-point power law
//! `f₀(N) = Ĉ − β (Nκ)^(−α)` and the transfer of the residual
//! `h(Nκ) = f₀(N) − C` from one separation to the next.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{check_guard, Separation};
use crate::solver::GalerkinSystem;

const ALPHA_LO: f64 = 0.05;
const ALPHA_HI: f64 = 10.0;
const ALPHA_TOL: f64 = 1e-12;
/// Fraction of the extrapolation amount reported as `ΔC`.
pub const DELTA_C_FRACTION: f64 = 0.1;

/// Divisors giving the second and third fit truncations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitRule {
    pub second: f64,
    pub third: f64,
}

impl Default for FitRule {
    fn default() -> Self {
        FitRule {
            second: 2.0,
            third: 3.0,
        }
    }
}

impl FitRule {
    /// `[N, round(N/second), round(N/third)]`, rounding to nearest.
    pub fn points(&self, trunc: usize) -> [usize; 3] {
        let r = |d: f64| (trunc as f64 / d).round() as usize;
        [trunc, r(self.second), r(self.third)]
    }
}

/// `[N, round(N/2), round(N/3)]`.
pub fn fit_points(trunc: usize) -> [usize; 3] {
    FitRule::default().points(trunc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub kappa: Separation,
    pub c_hat: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Fit inputs, largest `N` first.
    pub inputs: [(usize, f64); 3],
}

impl PowerLawFit {
    /// Model value at truncation `trunc`.
    pub fn model(&self, trunc: usize) -> f64 {
        self.c_hat - self.beta * (trunc as f64 * self.kappa.value()).powf(-self.alpha)
    }

    /// Largest truncation used in the fit.
    pub fn trunc(&self) -> usize {
        self.inputs[0].0
    }

    /// Raw `f₀` at the largest truncation.
    pub fn f0(&self) -> f64 {
        self.inputs[0].1
    }
}

/// Collocates the power law through three `(N, f₀)` samples.
///
/// `α` is found by bisection from the ratio of successive differences,
/// then `β` and `Ĉ` follow directly. The actual (rounded) `N` values are
/// used, not the nominal fractions.
pub fn power_law_fit(kappa: Separation, samples: [(usize, f64); 3]) -> Result<PowerLawFit> {
    let mut s = samples;
    s.sort_by(|a, b| b.0.cmp(&a.0));
    let [(n1, f1), (n2, f2), (n3, f3)] = s;
    if n1 == n2 || n2 == n3 || n3 == 0 {
        return Err(Error::DegenerateFit(format!(
            "need three distinct positive truncations, got {n1}, {n2}, {n3}"
        )));
    }
    if !(f1 > f2 && f2 > f3) {
        return Err(Error::DegenerateFit(format!(
            "f0 not strictly increasing in N: f0({n3}) = {f3}, f0({n2}) = {f2}, f0({n1}) = {f1}"
        )));
    }
    let ratio = (f1 - f2) / (f2 - f3);
    let (r1, r2) = (n1 as f64 / n3 as f64, n2 as f64 / n3 as f64);
    // Model ratio in terms of u = (N/N₃)^(−α), u₃ = 1.
    let g = |alpha: f64| {
        let u1 = r1.powf(-alpha);
        let u2 = r2.powf(-alpha);
        (u2 - u1) / (1.0 - u2) - ratio
    };
    let (mut lo, mut hi) = (ALPHA_LO, ALPHA_HI);
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo.signum() != ghi.signum()) {
        return Err(Error::FitFailure(format!(
            "difference ratio {ratio} not reachable for alpha in [{ALPHA_LO}, {ALPHA_HI}]"
        )));
    }
    while hi - lo > ALPHA_TOL {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let x = |n: usize| (n as f64 * kappa.value()).powf(-alpha);
    let beta = (f1 - f2) / (x(n2) - x(n1));
    let c_hat = f1 + beta * x(n1);
    Ok(PowerLawFit {
        kappa,
        c_hat,
        alpha,
        beta,
        inputs: s,
    })
}

/// `f₀` as a function of truncation at one separation.
pub trait TruncationSeries {
    fn kappa(&self) -> Separation;
    fn max_trunc(&self) -> usize;
    fn f0(&self, trunc: usize) -> Result<f64>;
}

impl TruncationSeries for GalerkinSystem {
    fn kappa(&self) -> Separation {
        GalerkinSystem::kappa(self)
    }
    fn max_trunc(&self) -> usize {
        GalerkinSystem::max_trunc(self)
    }
    fn f0(&self, trunc: usize) -> Result<f64> {
        GalerkinSystem::f0(self, trunc)
    }
}

/// Power-law fit from samples of `series` at `rule.points(trunc)`.
pub fn fit_series<S: TruncationSeries + ?Sized>(
    series: &S,
    trunc: usize,
    rule: FitRule,
) -> Result<PowerLawFit> {
    let pts = rule.points(trunc);
    let mut samples = [(0, 0.0); 3];
    for (slot, &n) in samples.iter_mut().zip(&pts) {
        *slot = (n, series.f0(n)?);
    }
    power_law_fit(series.kappa(), samples)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStep {
    pub kappa: Separation,
    pub trunc: usize,
    pub f0: f64,
    pub c_tilde: f64,
    /// `n = (κᵢ/κᵢ₋₁) Nᵢ`, absent for the seed.
    pub n_prev: Option<f64>,
    /// Interpolated `f₀,ᵢ₋₁(n)`, absent for the seed.
    pub f0_prev_interp: Option<f64>,
    pub delta_c: f64,
}

impl ChainStep {
    /// The chain's starting point taken from a power-law fit.
    pub fn seed(fit: &PowerLawFit) -> Self {
        ChainStep {
            kappa: fit.kappa,
            trunc: fit.trunc(),
            f0: fit.f0(),
            c_tilde: fit.c_hat,
            n_prev: None,
            f0_prev_interp: None,
            delta_c: DELTA_C_FRACTION * (fit.c_hat - fit.f0()).abs(),
        }
    }

    /// `h = f₀(N) − C̃` at this step.
    pub fn h(&self) -> f64 {
        self.f0 - self.c_tilde
    }
}

/// Linear interpolation of `series` at real truncation `n`, solving at
/// both neighbouring integers.
pub fn interpolate_f0<S: TruncationSeries + ?Sized>(series: &S, n: f64) -> Result<f64> {
    let lo = n.floor();
    let hi = n.ceil();
    if lo < 0.0 || hi as usize > series.max_trunc() {
        return Err(Error::ChainPrecondition(format!(
            "n = {n} outside the available truncations 0..={}",
            series.max_trunc()
        )));
    }
    let flo = series.f0(lo as usize)?;
    if lo == hi {
        return Ok(flo);
    }
    let fhi = series.f0(hi as usize)?;
    Ok(flo + (n - lo) * (fhi - flo))
}

/// Snaps `n` to an integer when it is one up to rounding in `κᵢ/κᵢ₋₁`.
fn transfer_point(kappa_prev: Separation, kappa: Separation, trunc: usize) -> f64 {
    let n = kappa.value() / kappa_prev.value() * trunc as f64;
    let r = n.round();
    if (n - r).abs() <= 1e-9 * r.max(1.0) {
        r
    } else {
        n
    }
}

/// `C̃ᵢ = f₀ᵢ(Nᵢ) + (C̃ᵢ₋₁ − f₀,ᵢ₋₁(n))` with `n = (κᵢ/κᵢ₋₁) Nᵢ`.
pub fn heuristic_step<S: TruncationSeries + ?Sized>(
    prev: &ChainStep,
    prev_series: &S,
    kappa: Separation,
    trunc: usize,
    f0: f64,
) -> Result<ChainStep> {
    if prev_series.kappa() != prev.kappa {
        return Err(Error::Contract(format!(
            "series at kappa = {} passed for step at kappa = {}",
            prev_series.kappa(),
            prev.kappa
        )));
    }
    if kappa > prev.kappa {
        return Err(Error::ChainPrecondition(format!(
            "kappa must not increase along the chain: {} -> {kappa}",
            prev.kappa
        )));
    }
    let n = transfer_point(prev.kappa, kappa, trunc);
    if n > prev.trunc as f64 {
        return Err(Error::ChainPrecondition(format!(
            "n = {n} exceeds the previous truncation {}",
            prev.trunc
        )));
    }
    let f0_prev = interpolate_f0(prev_series, n)?;
    let c_tilde = f0 + (prev.c_tilde - f0_prev);
    Ok(ChainStep {
        kappa,
        trunc,
        f0,
        c_tilde,
        n_prev: Some(n),
        f0_prev_interp: Some(f0_prev),
        delta_c: DELTA_C_FRACTION * (c_tilde - f0).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicChain {
    pub seed: PowerLawFit,
    /// `steps[0]` is the seed.
    pub steps: Vec<ChainStep>,
    pub warnings: Vec<String>,
}

impl HeuristicChain {
    pub fn last(&self) -> &ChainStep {
        self.steps.last().expect("chain holds at least its seed")
    }
}

/// A chain that stopped early, with the steps completed before the error.
#[derive(Debug, Clone)]
pub struct ChainFailure {
    pub completed: HeuristicChain,
    pub failed_kappa: Separation,
    pub error: Error,
}

impl std::fmt::Display for ChainFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "chain stopped at kappa = {} after {} step(s): {}",
            self.failed_kappa,
            self.completed.steps.len(),
            self.error
        )
    }
}

impl std::error::Error for ChainFailure {}

/// Warnings attached to a seed fit below `Nκ = 1`.
pub fn seed_warnings(fit: &PowerLawFit) -> Vec<String> {
    let nk = fit.trunc() as f64 * fit.kappa.value();
    if nk < 1.0 {
        let amount = fit.c_hat - fit.f0();
        vec![format!(
            "seed fit at N*kappa = {nk:.3} < 1: the power law tends to overshoot; \
             up to one third of the extrapolation amount ({:.3e}) may be excess",
            amount / 3.0
        )]
    } else {
        Vec::new()
    }
}

/// Chains [`heuristic_step`] over `kappas`, starting from `seed_fit` at
/// `kappas[0]`. Step `i` uses `Nᵢ = min(budget, ⌊Nᵢ₋₁ κᵢ₋₁/κᵢ⌋)`,
/// so that `n` never exceeds `Nᵢ₋₁`.
///
/// `seed_series` must cover the seed fit's truncation at `kappas[0]`;
/// later separations are assembled here.
pub fn run_chain(
    kappas: &[Separation],
    trunc_budget: usize,
    seed_fit: &PowerLawFit,
    seed_series: GalerkinSystem,
) -> std::result::Result<HeuristicChain, Box<ChainFailure>> {
    run_chain_with(kappas, trunc_budget, seed_fit, seed_series, |k, n| {
        GalerkinSystem::assemble(k, n)
    })
}

/// [`run_chain`] over any [`TruncationSeries`] built by `build(κ, N)`.
pub fn run_chain_with<S, B>(
    kappas: &[Separation],
    trunc_budget: usize,
    seed_fit: &PowerLawFit,
    seed_series: S,
    mut build: B,
) -> std::result::Result<HeuristicChain, Box<ChainFailure>>
where
    S: TruncationSeries,
    B: FnMut(Separation, usize) -> Result<S>,
{
    let mut chain = HeuristicChain {
        seed: seed_fit.clone(),
        steps: vec![ChainStep::seed(seed_fit)],
        warnings: seed_warnings(seed_fit),
    };
    for w in &chain.warnings {
        log::warn!("{w}");
    }
    let fail = |chain: &HeuristicChain, kappa: Separation, error: Error| {
        Box::new(ChainFailure {
            completed: chain.clone(),
            failed_kappa: kappa,
            error,
        })
    };
    let Some(&first) = kappas.first() else {
        return Err(fail(
            &chain,
            seed_fit.kappa,
            Error::ChainPrecondition("empty separation list".into()),
        ));
    };
    if first != seed_fit.kappa {
        return Err(fail(
            &chain,
            first,
            Error::ChainPrecondition(format!(
                "seed fit at kappa = {} but the chain starts at {first}",
                seed_fit.kappa
            )),
        ));
    }
    if seed_series.kappa() != first || seed_series.max_trunc() < seed_fit.trunc() {
        return Err(fail(
            &chain,
            first,
            Error::Contract("seed series does not cover the seed fit".into()),
        ));
    }
    let mut prev_series = seed_series;
    for &kappa in &kappas[1..] {
        let prev = chain.last().clone();
        let outcome = (|| -> Result<(ChainStep, S)> {
            if !(kappa < prev.kappa) {
                return Err(Error::ChainPrecondition(format!(
                    "separations must strictly decrease: {} then {kappa}",
                    prev.kappa
                )));
            }
            let by_ratio =
                (prev.trunc as f64 * prev.kappa.value() / kappa.value()).floor() as usize;
            let trunc = trunc_budget.min(by_ratio);
            check_guard(kappa, trunc)?;
            let series = build(kappa, trunc)?;
            let f0 = series.f0(trunc)?;
            let step = heuristic_step(&prev, &prev_series, kappa, trunc, f0)?;
            Ok((step, series))
        })();
        match outcome {
            Ok((step, series)) => {
                chain.steps.push(step);
                prev_series = series;
            }
            Err(e) => return Err(fail(&chain, kappa, e)),
        }
    }
    Ok(chain)
}

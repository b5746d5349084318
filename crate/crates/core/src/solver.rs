//! Solution of the truncated system `(I − K) f = e₀`.
//!
//! `f₀` is the normalized capacitance `C / 4ε₀a` at truncation `N`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{assemble, KernelMatrix, Separation};
use crate::lu::LuFactorization;

/// Condition estimates above this carry a warning.
pub const CONDITION_WARN: f64 = 1e12;
/// Condition estimates above this are rejected.
pub const CONDITION_FAIL: f64 = 1e15;
const RESIDUAL_FACTOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub kappa: Separation,
    pub trunc: usize,
    pub f0: f64,
    pub coeffs: Option<Vec<f64>>,
    pub condition_estimate: f64,
    /// `‖(I − K) f − e₀‖∞`
    pub residual: f64,
    pub warnings: Vec<String>,
}

/// Solves the full system held by `matrix`.
pub fn solve_f0(matrix: &KernelMatrix, keep_coeffs: bool) -> Result<SolveResult> {
    solve_leading(matrix, matrix.trunc(), keep_coeffs)
}

/// Solves the system truncated at `trunc ≤ matrix.trunc()`, using the
/// leading `(trunc+1)×(trunc+1)` block.
pub fn solve_leading(
    matrix: &KernelMatrix,
    trunc: usize,
    keep_coeffs: bool,
) -> Result<SolveResult> {
    if trunc > matrix.trunc() {
        return Err(Error::Contract(format!(
            "truncation {trunc} exceeds assembled N = {}",
            matrix.trunc()
        )));
    }
    let d = trunc + 1;
    let a = matrix.identity_minus_leading(trunc);
    let lu = LuFactorization::new(a, d)?;
    let mut rhs = vec![0.0; d];
    rhs[0] = 1.0;
    let f = lu.solve(&rhs);
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular { pivot: d });
    }

    let residual = (0..d)
        .map(|m| {
            let r: f64 = (0..d).map(|n| -matrix.get(m, n) * f[n]).sum::<f64>() + f[m];
            (r - rhs[m]).abs()
        })
        .fold(0.0, f64::max);
    let fmax = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let bound = RESIDUAL_FACTOR * (1.0 + fmax);
    if residual > bound {
        return Err(Error::Residual { residual, bound });
    }

    let condition = lu.condition_estimate();
    let mut warnings = Vec::new();
    if condition > CONDITION_FAIL {
        return Err(Error::IllConditioned { condition });
    }
    if condition > CONDITION_WARN {
        let msg = format!("condition estimate {condition:e} above {CONDITION_WARN:e}");
        log::warn!("kappa = {}, N = {trunc}: {msg}", matrix.kappa());
        warnings.push(msg);
    }
    Ok(SolveResult {
        kappa: matrix.kappa(),
        trunc,
        f0: f[0],
        coeffs: keep_coeffs.then_some(f.clone()),
        condition_estimate: condition,
        residual,
        warnings,
    })
}

/// Sampled `N ↦ f₀(N)` at fixed κ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceCurve {
    pub kappa: Separation,
    /// Strictly increasing in `N`.
    pub samples: Vec<(usize, f64)>,
}

impl ConvergenceCurve {
    pub fn f0_at(&self, trunc: usize) -> Option<f64> {
        self.samples
            .binary_search_by_key(&trunc, |s| s.0)
            .ok()
            .map(|i| self.samples[i].1)
    }
}

/// One assembled matrix from which `f₀` can be read at any truncation up
/// to its own.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    matrix: KernelMatrix,
}

impl GalerkinSystem {
    pub fn assemble(kappa: Separation, trunc: usize) -> Result<Self> {
        Ok(GalerkinSystem {
            matrix: assemble(kappa, trunc)?,
        })
    }

    pub fn from_matrix(matrix: KernelMatrix) -> Self {
        GalerkinSystem { matrix }
    }

    pub fn matrix(&self) -> &KernelMatrix {
        &self.matrix
    }

    pub fn kappa(&self) -> Separation {
        self.matrix.kappa()
    }

    pub fn max_trunc(&self) -> usize {
        self.matrix.trunc()
    }

    pub fn solve(&self, trunc: usize) -> Result<SolveResult> {
        solve_leading(&self.matrix, trunc, false).map_err(|e| Error::AtTruncation {
            trunc,
            source: Box::new(e),
        })
    }

    pub fn f0(&self, trunc: usize) -> Result<f64> {
        self.solve(trunc).map(|r| r.f0)
    }

    /// `f₀` at every requested truncation, each from a fresh factorization
    /// of the leading block.
    pub fn curve(&self, trunc_list: &[usize]) -> Result<ConvergenceCurve> {
        check_increasing(trunc_list)?;
        let samples = trunc_list
            .iter()
            .map(|&n| self.f0(n).map(|f| (n, f)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConvergenceCurve {
            kappa: self.kappa(),
            samples,
        })
    }
}

fn check_increasing(trunc_list: &[usize]) -> Result<()> {
    if trunc_list.is_empty() {
        return Err(Error::Contract("empty truncation list".into()));
    }
    if trunc_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract(
            "truncation list must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Assembles once at the largest requested `N` and solves leading blocks.
pub fn convergence_curve(kappa: Separation, trunc_list: &[usize]) -> Result<ConvergenceCurve> {
    check_increasing(trunc_list)?;
    let max = *trunc_list.last().unwrap();
    let system = GalerkinSystem::assemble(kappa, max).map_err(|e| Error::AtTruncation {
        trunc: max,
        source: Box::new(e),
    })?;
    system.curve(trunc_list)
}

//! Closed-form comparison values, in units of `4ε₀a`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::kernel::Separation;

/// `π/(4κ)`, the parallel-plate value without fringing.
pub fn geometric(kappa: Separation) -> f64 {
    PI / (4.0 * kappa.value())
}

/// Kirchhoff's small-gap formula `π/(4κ) + ¼ ln(1/κ) + ¼ (ln 16π − 1)`,
/// without its `o(1)` remainder.
pub fn kirchhoff(kappa: Separation) -> f64 {
    geometric(kappa) - 0.25 * kappa.value().ln() + 0.25 * ((16.0 * PI).ln() - 1.0)
}

/// Ignatowsky's lower bound: Kirchhoff's form with constant `(ln 8 − ½)/4`.
pub fn ignatowsky(kappa: Separation) -> f64 {
    geometric(kappa) - 0.25 * kappa.value().ln() + 0.25 * (8.0f64.ln() - 0.5)
}

/// `kirchhoff − ignatowsky = ¼ (ln 2π − ½)`, independent of κ.
pub fn kirchhoff_ignatowsky_gap() -> f64 {
    0.25 * ((16.0 * PI).ln() - 1.0) - 0.25 * (8.0f64.ln() - 0.5)
}

/// `(c − π/4κ) / (π/4κ)`.
pub fn excess_over_geometric(c: f64, kappa: Separation) -> f64 {
    let g = geometric(kappa);
    (c - g) / g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceSet {
    pub kappa: Separation,
    pub c_geometric: f64,
    pub c_kirchhoff: f64,
    pub c_ignatowsky: f64,
}

impl ReferenceSet {
    pub fn new(kappa: Separation) -> Self {
        ReferenceSet {
            kappa,
            c_geometric: geometric(kappa),
            c_kirchhoff: kirchhoff(kappa),
            c_ignatowsky: ignatowsky(kappa),
        }
    }

    /// Whether `c` respects the Ignatowsky lower bound.
    pub fn above_lower_bound(&self, c: f64) -> bool {
        c > self.c_ignatowsky
    }
}

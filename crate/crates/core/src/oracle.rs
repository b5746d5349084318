//! Independent numerical routes used to validate the closed forms.
//!
//! Nothing here touches the Fourier-cosine machinery: the Nyström solver
//! discretizes the Love equation directly, and the entry quadratures
//! integrate the defining integrals with adaptive Gauss–Legendre rules.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::Separation;
use crate::lu::LuFactorization;
use crate::specfun::si_ci;

/// Nodes and weights on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// `m`-point Gauss–Legendre rule mapped to `[0, 1]`.
    pub fn gauss_legendre(m: usize) -> Self {
        let (x, w) = gauss_legendre_nodes(m);
        QuadratureRule {
            nodes: x.iter().map(|&x| 0.5 * (x + 1.0)).collect(),
            weights: w.iter().map(|&w| 0.5 * w).collect(),
        }
    }

    /// `panels` equal panels, each carrying an `order`-point Gauss–Legendre rule.
    pub fn composite(panels: usize, order: usize) -> Self {
        let edges: Vec<f64> = (0..=panels).map(|i| i as f64 / panels as f64).collect();
        Self::on_panels(&edges, order)
    }

    /// Panels refined geometrically towards `s = 1`, where the solution of
    /// the Love equation has its edge layer of width ~κ.
    pub fn graded(kappa: Separation, uniform_panels: usize, order: usize) -> Self {
        let k = kappa.value();
        let mut edges: Vec<f64> = Vec::new();
        let edge_zone = (4.0 * k).min(0.25);
        let interior = 1.0 - edge_zone;
        for i in 0..=uniform_panels {
            edges.push(interior * i as f64 / uniform_panels as f64);
        }
        let mut w = edge_zone;
        let mut x = interior;
        while w > 1e-3 * k {
            w *= 0.5;
            x += w;
            edges.push(x);
        }
        edges.push(1.0);
        edges.dedup();
        Self::on_panels(&edges, order)
    }

    fn on_panels(edges: &[f64], order: usize) -> Self {
        let (x, w) = gauss_legendre_nodes(order);
        let mut nodes = Vec::with_capacity((edges.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let h = 0.5 * (b - a);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + h * (xi + 1.0));
                weights.push(h * wi);
            }
        }
        QuadratureRule { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]` by Newton
/// iteration on `P_m`.
pub fn gauss_legendre_nodes(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "rule needs at least one node");
    if m == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..(m + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = mf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

/// Values that adaptive quadrature can accumulate.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

const BASE_ORDER: usize = 10;
const MAX_DEPTH: usize = 50;
/// Panel differences below this relative size are treated as rounding noise.
const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

/// Adaptive Gauss–Legendre integrator on finite intervals.
///
/// Each interval's 10-point estimate is compared with the sum over its two
/// halves; the interval is accepted when they agree to its share of the
/// absolute tolerance.
#[derive(Debug, Clone)]
pub struct Adaptive {
    x: Vec<f64>,
    w: Vec<f64>,
    tol: f64,
    max_evals: usize,
}

impl Adaptive {
    pub fn new(tol: f64, max_evals: usize) -> Self {
        let (x, w) = gauss_legendre_nodes(BASE_ORDER);
        Adaptive {
            x,
            w,
            tol,
            max_evals,
        }
    }

    fn panel<T: Integrand, F: FnMut(f64) -> Result<T>>(
        &self,
        f: &mut F,
        a: f64,
        b: f64,
    ) -> Result<T> {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut acc = T::zero();
        for (xi, wi) in self.x.iter().zip(&self.w) {
            acc = acc + f(c + h * xi)? * (wi * h);
        }
        Ok(acc)
    }

    /// `∫ₐᵇ f` over consecutive breakpoints.
    pub fn integrate<T, F>(&self, mut f: F, breakpoints: &[f64]) -> Result<T>
    where
        T: Integrand,
        F: FnMut(f64) -> Result<T>,
    {
        let total_len = breakpoints.last().unwrap() - breakpoints[0];
        let mut evals = 0usize;
        let mut result = T::zero();
        for pair in breakpoints.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b <= a {
                continue;
            }
            let whole = self.panel(&mut f, a, b)?;
            evals += BASE_ORDER;
            let mut stack = vec![(a, b, whole, 0usize)];
            while let Some((a, b, whole, depth)) = stack.pop() {
                let m = 0.5 * (a + b);
                let left = self.panel(&mut f, a, m)?;
                let right = self.panel(&mut f, m, b)?;
                evals += 2 * BASE_ORDER;
                if evals > self.max_evals {
                    return Err(Error::QuadratureBudget(format!(
                        "more than {} evaluations",
                        self.max_evals
                    )));
                }
                let refined = left + right;
                let share = (self.tol * (b - a) / total_len).max(ROUNDOFF * refined.magnitude());
                if (refined - whole).magnitude() <= share {
                    result = result + refined;
                } else if depth >= MAX_DEPTH {
                    return Err(Error::QuadratureBudget(format!(
                        "interval [{a}, {b}] did not converge"
                    )));
                } else {
                    stack.push((a, m, left, depth + 1));
                    stack.push((m, b, right, depth + 1));
                }
            }
        }
        Ok(result)
    }
}

/// `K(s, t)` of the Love equation.
pub fn love_kernel(kappa: f64, s: f64, t: f64) -> f64 {
    let k2 = kappa * kappa;
    let d = s - t;
    let p = s + t;
    kappa / PI * (1.0 / (k2 + d * d) + 1.0 / (k2 + p * p))
}

fn basis(m: usize, s: f64) -> f64 {
    if m == 0 {
        1.0
    } else {
        std::f64::consts::SQRT_2 * (m as f64 * PI * s).cos()
    }
}

/// Nyström discretization `fᵢ − Σⱼ wⱼ K(sᵢ, tⱼ) fⱼ = 1`, returning
/// `Σᵢ wᵢ fᵢ`, the normalized capacitance.
pub fn nystrom_solve(kappa: Separation, rule: &QuadratureRule) -> Result<f64> {
    let m = rule.order();
    if m < 2 {
        return Err(Error::Contract(
            "Nystrom rule needs at least 2 nodes".into(),
        ));
    }
    let k = kappa.value();
    let (s, w) = (rule.nodes(), rule.weights());
    let mut a = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            a[i * m + j] = -w[j] * love_kernel(k, s[i], s[j]);
        }
        a[i * m + i] += 1.0;
    }
    let lu = LuFactorization::new(a, m)?;
    let f = lu.solve(&vec![1.0; m]);
    Ok(f.iter().zip(w).map(|(fi, wi)| fi * wi).sum())
}

/// `Kₘₙ` by iterated adaptive quadrature of `∬ K(s,t) ψₘ(s) ψₙ(t) ds dt`.
///
/// The inner integral over `s` is split at the crest `s = t`. Absolute
/// tolerance 1e−10 on the result.
pub fn kernel_entry_quadrature(kappa: Separation, m: usize, n: usize) -> Result<f64> {
    let k = kappa.value();
    if k < 0.01 {
        return Err(Error::Domain(format!(
            "entry quadrature is only supported for kappa >= 0.01, got {k}"
        )));
    }
    let inner = Adaptive::new(1e-13, 2_000_000);
    let outer = Adaptive::new(1e-11, 400_000);
    let edge = (4.0 * k).min(0.25);
    outer.integrate(
        |t| {
            let v: f64 =
                inner.integrate(|s| Ok(love_kernel(k, s, t) * basis(m, s)), &[0.0, t, 1.0])?;
            Ok(v * basis(n, t))
        },
        &[0.0, edge, 1.0 - edge, 1.0],
    )
}

/// Defining integrals of the closed-form building blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralSpec {
    /// `∫₀¹ cos(βt) atan((t+α)/κ) dt`
    I1 { beta: f64, kappa: f64, alpha: f64 },
    /// `∫₀¹ κ cos(βt) / (κ² + (t+α)²) dt`
    I2 { beta: f64, kappa: f64, alpha: f64 },
    /// `∫₀¹ [I₂(β,κ,−s) + I₂(β,κ,s)] cos(γs) ds`, inner `I₂` by quadrature too
    I3 { beta: f64, kappa: f64, gamma: f64 },
    /// `∫₀¹ [sin(qs + βz₁) Si(βs + βz₂) + cos(qs + βz₁) Ci(βs + βz₂)] ds`
    I4 {
        q: f64,
        beta: f64,
        z1: Complex64,
        z2: Complex64,
    },
}

/// Adaptive quadrature of one of the defining integrals, absolute
/// tolerance 1e−11. Real-valued integrals come back with zero imaginary part.
pub fn i_integrand_quadrature(spec: IntegralSpec) -> Result<Complex64> {
    let quad = Adaptive::new(1e-11, 2_000_000);
    match spec {
        IntegralSpec::I1 { beta, kappa, alpha } => {
            let v: f64 = quad.integrate(
                |t| Ok((beta * t).cos() * ((t + alpha) / kappa).atan()),
                &crest(-alpha),
            )?;
            Ok(Complex64::new(v, 0.0))
        }
        IntegralSpec::I2 { beta, kappa, alpha } => {
            Ok(Complex64::new(i2_quad(&quad, beta, kappa, alpha)?, 0.0))
        }
        IntegralSpec::I3 { beta, kappa, gamma } => {
            let inner = Adaptive::new(1e-13, 2_000_000);
            let v: f64 = quad.integrate(
                |s| {
                    let a = i2_quad(&inner, beta, kappa, -s)?;
                    let b = i2_quad(&inner, beta, kappa, s)?;
                    Ok((a + b) * (gamma * s).cos())
                },
                &[0.0, 1.0],
            )?;
            Ok(Complex64::new(v, 0.0))
        }
        IntegralSpec::I4 { q, beta, z1, z2 } => quad.integrate(
            |s| {
                let (sv, cv) = si_ci((z2 + s) * beta)?;
                let ph = z1 * beta + q * s;
                Ok(ph.sin() * sv + ph.cos() * cv)
            },
            &[0.0, 1.0],
        ),
    }
}

fn crest(at: f64) -> Vec<f64> {
    if at > 0.0 && at < 1.0 {
        vec![0.0, at, 1.0]
    } else {
        vec![0.0, 1.0]
    }
}

fn i2_quad(quad: &Adaptive, beta: f64, kappa: f64, alpha: f64) -> Result<f64> {
    quad.integrate(
        |t| {
            let d = t + alpha;
            Ok(kappa * (beta * t).cos() / (kappa * kappa + d * d))
        },
        &crest(-alpha),
    )
}

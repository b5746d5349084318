//! Fourier-cosine coefficients of the Love kernel.
//!
//! With `ψ₀ = 1`, `ψₘ(s) = √2 cos(mπs)` and
//! `K(s,t) = g(s−t) + g(s+t)`, `g(u) = κ / π(κ² + u²)`, folding the square
//! along `u = s − t` reduces every coefficient `Kₘₙ = ∬ K ψₘ ψₙ` to three
//! one-index moments of `g` over `[0, 2]`:
//!
//! ```text
//! Sₖ = ∫₀² g(u) sin(kπu) du    Cₖ = ∫₀² g(u) cos(kπu) du    Uₖ = ∫₀² u g(u) cos(kπu) du
//!
//! K₀ₙ = −√2 (−1)ⁿ Sₙ / nπ
//! Kₙₙ = 2Cₙ − Uₙ − Sₙ / nπ
//! Kₘₙ = (−1)^{m+n} [ (Sₙ − Sₘ) / (m−n)π − (Sₙ + Sₘ) / (m+n)π ]
//! ```
//!
//! The moments are closed forms in `e^w E₁(w)` and `e^{−x} Ei(x)` (see
//! [`IndexTerms::compute`]), none of which grow with `kπκ`. [`SpecfunCache`]
//! evaluates them once per index, so an `(N+1)×(N+1)` matrix needs O(N)
//! special-function calls.
//!
//! The same coefficients written with Si/Ci of complex argument (the `I₄`
//! combination, [`kmn_generic`]) carry terms of size `exp(2 max(m,n) πκ)`
//! that cancel down to `|Kₘₙ| ≤ 2K₀₀`; they serve as an independent check
//! where that product is small. [`assemble`] refuses `Nπκ` beyond
//! [`GUARD_LIMIT`] and verifies the bound on every result.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::{ci, e1_scaled, ei_scaled, si, si_ci};

/// Hard limit on `N·π·κ` for assembly.
pub const GUARD_LIMIT: f64 = 30.0;
/// Above this `N·π·κ` assembly succeeds but logs a warning.
pub const GUARD_WARN: f64 = 10.0;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Normalized plate separation `κ = d/a`, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Separation(f64);

impl Separation {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_finite() && kappa > 0.0 {
            Ok(Separation(kappa))
        } else {
            Err(Error::Domain(format!(
                "separation must be finite and positive, got {kappa}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Separation {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Separation::new(v)
    }
}

impl From<Separation> for f64 {
    fn from(s: Separation) -> f64 {
        s.0
    }
}

impl fmt::Display for Separation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `K₀₀ = [4 atan(2/κ) − κ ln(1 + 4/κ²)] / 2π`.
pub fn k00(kappa: Separation) -> f64 {
    let k = kappa.value();
    (4.0 * (2.0 / k).atan() - k * (4.0 / (k * k)).ln_1p()) / (2.0 * PI)
}

/// Moments of `g` at frequency `kπ` shared by row and column `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexTerms {
    /// `Sₖ`
    pub sin: f64,
    /// `Cₖ`
    pub cos: f64,
    /// `Uₖ`
    pub first: f64,
    /// `(−1)^k`
    pub parity: f64,
}

impl IndexTerms {
    /// Evaluates the moments at index `k ≥ 1`.
    ///
    /// With `β = kπ`, `x = βκ` and `ẽ(w) = e^w E₁(w)`, the integrals of
    /// `e^{iβu} / (u ∓ iκ)` over `[0, 2]` are
    ///
    /// ```text
    /// F₊ = e^{−x} (iπ − Ei(x)) − ẽ(−x − 2iβ)
    /// F₋ = ẽ(x) − ẽ(x − 2iβ)
    /// ```
    ///
    /// (`e^{2iβ} = 1` has been used), and `C + iS = (F₊ − F₋) / 2πi`,
    /// `U = κ Re(F₊ + F₋) / 2π`.
    pub fn compute(kappa: Separation, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Contract("index families start at k = 1".into()));
        }
        let beta = k as f64 * PI;
        let x = beta * kappa.value();
        let plus = Complex64::new(-ei_scaled(x)?, PI * (-x).exp())
            - e1_scaled(Complex64::new(-x, -2.0 * beta))?;
        let minus = e1_scaled(Complex64::new(x, 0.0))? - e1_scaled(Complex64::new(x, -2.0 * beta))?;
        let e = (plus - minus) / (2.0 * PI * I);
        Ok(IndexTerms {
            sin: e.im,
            cos: e.re,
            first: kappa.value() * (plus + minus).re / (2.0 * PI),
            parity: if k % 2 == 0 { 1.0 } else { -1.0 },
        })
    }
}

/// Source of per-index terms: either precomputed or evaluated on demand.
pub trait FamilySource {
    fn kappa(&self) -> Separation;
    fn terms(&self, k: usize) -> Result<IndexTerms>;
}

/// Per-index terms for `k = 1..=max_index`, evaluated once.
#[derive(Debug, Clone)]
pub struct SpecfunCache {
    kappa: Separation,
    terms: Vec<IndexTerms>,
}

impl SpecfunCache {
    pub fn new(kappa: Separation, max_index: usize) -> Result<Self> {
        let terms = (1..=max_index)
            .into_par_iter()
            .map(|k| IndexTerms::compute(kappa, k))
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(SpecfunCache { kappa, terms })
    }

    pub fn max_index(&self) -> usize {
        self.terms.len()
    }
}

impl FamilySource for SpecfunCache {
    fn kappa(&self) -> Separation {
        self.kappa
    }

    fn terms(&self, k: usize) -> Result<IndexTerms> {
        if k == 0 || k > self.terms.len() {
            return Err(Error::Contract(format!(
                "index {k} outside cache range 1..={}",
                self.terms.len()
            )));
        }
        Ok(self.terms[k - 1])
    }
}

/// Evaluates terms with fresh special-function calls on every request.
#[derive(Debug, Clone, Copy)]
pub struct DirectSource(pub Separation);

impl FamilySource for DirectSource {
    fn kappa(&self) -> Separation {
        self.0
    }

    fn terms(&self, k: usize) -> Result<IndexTerms> {
        IndexTerms::compute(self.0, k)
    }
}

/// Ingredients of the `I₄` closed form
///
/// ```text
/// I₄(q, β, z₁, z₂) = ∫₀¹ [sin(qs + βz₁) Si(βs + βz₂) + cos(qs + βz₁) Ci(βs + βz₂)] ds
///   = (1/q) [ sin(βz₁+q) Ci(β(1+z₂)) − cos(βz₁+q) Si(β(1+z₂))
///           − sin(βz₁) Ci(βz₂) + cos(βz₁) Si(βz₂)
///           + cos(βz₁−qz₂) (Si((β−q)(1+z₂)) − Si((β−q)z₂))
///           − sin(βz₁−qz₂) (Ci((β−q)(1+z₂)) − Ci((β−q)z₂)) ]
/// ```
struct I4Parts {
    sin_shift: Complex64,
    cos_shift: Complex64,
    sin_base: Complex64,
    cos_base: Complex64,
    cos_cross: Complex64,
    sin_cross: Complex64,
    /// `(Si, Ci)` at `β(1+z₂)`, `βz₂`, `(β−q)(1+z₂)`, `(β−q)z₂`.
    upper: (Complex64, Complex64),
    lower: (Complex64, Complex64),
    shifted_upper: (Complex64, Complex64),
    shifted_lower: (Complex64, Complex64),
}

impl I4Parts {
    fn eval(&self, q: f64) -> Complex64 {
        let bracket = self.sin_shift * self.upper.1
            - self.cos_shift * self.upper.0
            - self.sin_base * self.lower.1
            + self.cos_base * self.lower.0
            + self.cos_cross * (self.shifted_upper.0 - self.shifted_lower.0)
            - self.sin_cross * (self.shifted_upper.1 - self.shifted_lower.1);
        bracket / q
    }
}

/// Closed form of `I₄(q, β, z₁, z₂)` for general parameters.
///
/// Requires `q ≠ 0`, `β > 0` and `q ≠ β` (otherwise `Ci(0)` appears).
pub fn i4(q: f64, beta: f64, z1: Complex64, z2: Complex64) -> Result<Complex64> {
    if q == 0.0 {
        return Err(Error::Contract(
            "I4 requires q != 0; the diagonal entries take the q -> 0 limit separately".into(),
        ));
    }
    if !(beta > 0.0) {
        return Err(Error::Contract(format!("I4 requires beta > 0, got {beta}")));
    }
    let bz1 = z1 * beta;
    let cross = bz1 - z2 * q;
    let parts = I4Parts {
        sin_shift: (bz1 + q).sin(),
        cos_shift: (bz1 + q).cos(),
        sin_base: bz1.sin(),
        cos_base: bz1.cos(),
        cos_cross: cross.cos(),
        sin_cross: cross.sin(),
        upper: (si((z2 + 1.0) * beta)?, ci((z2 + 1.0) * beta)?),
        lower: (si(z2 * beta)?, ci(z2 * beta)?),
        shifted_upper: (si((z2 + 1.0) * (beta - q))?, ci((z2 + 1.0) * (beta - q))?),
        shifted_lower: (si(z2 * (beta - q))?, ci(z2 * (beta - q))?),
    };
    Ok(parts.eval(q))
}

/// Closed form of `I₁(β, κ, α) = ∫₀¹ cos(βt) atan((t+α)/κ) dt`, `β ≠ 0`.
pub fn i1(beta: f64, kappa: Separation, alpha: f64) -> Result<f64> {
    if beta == 0.0 {
        return Err(Error::Contract("I1 requires beta != 0".into()));
    }
    let k = kappa.value();
    let a = Complex64::new(alpha, k) * beta;
    let b = Complex64::new(alpha + 1.0, k) * beta;
    let (sa, ca) = si_ci(a)?;
    let (sb, cb) = si_ci(b)?;
    let im = (a.sin() * (ca - cb) - a.cos() * (sa - sb)).im;
    Ok(beta.sin() / beta * ((1.0 + alpha) / k).atan() + im / beta)
}

/// Closed form of `I₂(β, κ, α) = ∫₀¹ κ cos(βt) / (κ² + (t+α)²) dt`, `β ≠ 0`.
pub fn i2(beta: f64, kappa: Separation, alpha: f64) -> Result<f64> {
    if beta == 0.0 {
        return Err(Error::Contract("I2 requires beta != 0".into()));
    }
    let k = kappa.value();
    let a = Complex64::new(alpha, k) * beta;
    let b = Complex64::new(alpha + 1.0, k) * beta;
    let (sa, ca) = si_ci(a)?;
    let (sb, cb) = si_ci(b)?;
    Ok((a.sin() * (sa - sb) + a.cos() * (ca - cb)).im)
}

/// Closed form of `I₃(β, κ, γ) = ∫₀¹ [I₂(β,κ,−s) + I₂(β,κ,s)] cos(γs) ds`
/// as the four-term `I₄` combination. Requires `β > 0` and `γ ≠ ±β`,
/// `γ ≠ 0`.
pub fn i3(beta: f64, kappa: Separation, gamma: f64) -> Result<f64> {
    let jk = Complex64::new(0.0, kappa.value());
    let one = Complex64::new(1.0, 0.0);
    let sum = i4(beta + gamma, beta, jk, one + jk)?
        + i4(beta + gamma, beta, -jk, -one - jk)?
        + i4(beta - gamma, beta, jk, one + jk)?
        + i4(beta - gamma, beta, -jk, -one - jk)?;
    Ok(-0.5 * sum.im)
}

/// `K₀ₙ` for `n ≥ 1`.
pub fn k0n(kappa: Separation, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Contract("k0n requires n >= 1; use k00".into()));
    }
    Ok(k0n_from(&DirectSource(kappa).terms(n)?, n))
}

fn k0n_from(t: &IndexTerms, n: usize) -> f64 {
    -SQRT_2 * t.parity * t.sin / (n as f64 * PI)
}

fn kmn_from(tn: &IndexTerms, tm: &IndexTerms, m: usize, n: usize) -> f64 {
    if m == n {
        2.0 * tn.cos - tn.first - tn.sin / (n as f64 * PI)
    } else {
        let (mf, nf) = (m as f64, n as f64);
        tn.parity
            * tm.parity
            * ((tn.sin - tm.sin) / ((mf - nf) * PI) - (tn.sin + tm.sin) / ((mf + nf) * PI))
    }
}

/// `Kₘₙ` for `m, n ≥ 1`, reading Si/Ci values from `source`.
pub fn kmn<S: FamilySource + ?Sized>(
    kappa: Separation,
    m: usize,
    n: usize,
    source: &S,
) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Contract("kmn requires m, n >= 1".into()));
    }
    if source.kappa() != kappa {
        return Err(Error::Contract(format!(
            "cache built for kappa = {} used with kappa = {kappa}",
            source.kappa()
        )));
    }
    let tn = source.terms(n)?;
    let tm = if m == n { tn } else { source.terms(m)? };
    Ok(kmn_from(&tn, &tm, m, n))
}

/// `Kₘₙ` (`m, n ≥ 1`) from the Si/Ci closed form: two `I₄` pairs off the
/// diagonal, and on it the `q = 2nπ` pair plus the `q → 0` limit.
///
/// Exact in exact arithmetic, but the terms reach `exp(2 max(m,n) πκ)`,
/// so in double precision only small products are trustworthy.
pub fn kmn_generic(kappa: Separation, m: usize, n: usize) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Contract("kmn_generic requires m, n >= 1".into()));
    }
    let beta = n as f64 * PI;
    let k = kappa.value();
    let jk = Complex64::new(0.0, k);
    let one = Complex64::new(1.0, 0.0);
    let pair = |q: f64| -> Result<Complex64> {
        Ok(i4(q, beta, jk, one + jk)? + i4(q, beta, -jk, -one - jk)?)
    };
    if m != n {
        let sum = pair((n + m) as f64 * PI)? + pair((n as f64 - m as f64) * PI)?;
        return Ok(-sum.im / PI);
    }
    let (pair, sinh_part, cosh_part) = knn_generic_parts(kappa, n)?;
    Ok(-(pair + sinh_part + cosh_part).im / PI)
}

/// Diagonal pieces of the Si/Ci form: the `q = 2nπ` pair and the `q → 0`
/// limit (`sinh` part, `cosh` part); `Kₙₙ = −Im(sum) / π`.
pub(crate) fn knn_generic_parts(
    kappa: Separation,
    n: usize,
) -> Result<(Complex64, Complex64, Complex64)> {
    let beta = n as f64 * PI;
    let k = kappa.value();
    let jk = Complex64::new(0.0, k);
    let one = Complex64::new(1.0, 0.0);
    let q = 2.0 * beta;
    let pair = i4(q, beta, jk, one + jk)? + i4(q, beta, -jk, -one - jk)?;
    let y = beta * k;
    let w = Complex64::new(2.0, k);
    let (s2, c2) = si_ci(beta * w)?;
    let (s0, c0) = si_ci(jk * beta)?;
    let sinh_part = I * y.sinh() * (w * s2 - jk * s0);
    let cosh_part = y.cosh() * (w * c2 - jk * c0 - I * PI);
    Ok((pair, sinh_part, cosh_part))
}

/// Symmetric `(N+1)×(N+1)` matrix of kernel coefficients, lower triangle
/// stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    kappa: Separation,
    trunc: usize,
    lower: Vec<f64>,
    guard_product: f64,
}

fn tri(m: usize, n: usize) -> usize {
    let (r, c) = if m >= n { (m, n) } else { (n, m) };
    r * (r + 1) / 2 + c
}

impl KernelMatrix {
    pub fn kappa(&self) -> Separation {
        self.kappa
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Matrix dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.trunc + 1
    }

    /// `N·π·κ` recorded at assembly.
    pub fn guard_product(&self) -> f64 {
        self.guard_product
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        assert!(m <= self.trunc && n <= self.trunc, "index out of range");
        self.lower[tri(m, n)]
    }

    /// Row-major lower triangle, `(m, 0..=m)` for `m = 0..=N`.
    pub fn lower_triangle(&self) -> &[f64] {
        &self.lower
    }

    /// Largest `|Kₘₙ|` over all entries.
    pub fn max_abs(&self) -> f64 {
        self.lower.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Dense `(n+1)×(n+1)` leading block of `I − K`, row-major.
    pub fn identity_minus_leading(&self, n: usize) -> Vec<f64> {
        assert!(n <= self.trunc, "block larger than matrix");
        let d = n + 1;
        let mut a = vec![0.0; d * d];
        for m in 0..d {
            let row = &self.lower[m * (m + 1) / 2..m * (m + 1) / 2 + m + 1];
            for (j, &v) in row.iter().enumerate() {
                a[m * d + j] = -v;
                a[j * d + m] = -v;
            }
            a[m * d + m] += 1.0;
        }
        a
    }

    /// Checks `|Kₘₙ| ≤ 2K₀₀` and `0 < K₀₀ < 1`.
    pub fn check_bound(&self) -> Result<()> {
        let k00 = self.lower[0];
        if !(k00 > 0.0 && k00 < 1.0) {
            return Err(Error::BoundViolation {
                m: 0,
                n: 0,
                value: k00,
                bound: 1.0,
            });
        }
        let bound = 2.0 * k00;
        for m in 0..=self.trunc {
            for n in 0..=m {
                let v = self.lower[tri(m, n)];
                if !(v.abs() <= bound) {
                    return Err(Error::BoundViolation {
                        m,
                        n,
                        value: v,
                        bound,
                    });
                }
            }
        }
        Ok(())
    }

    const MAGIC: &'static [u8; 8] = b"LOVEKMAT";
    const VERSION: u64 = 1;

    /// Binary dump: magic `LOVEKMAT`, format version (u64), κ (f64),
    /// N (u64), then the row-major lower triangle as f64; all little-endian.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&Self::VERSION.to_le_bytes())?;
        w.write_all(&self.kappa.value().to_le_bytes())?;
        w.write_all(&(self.trunc as u64).to_le_bytes())?;
        for v in &self.lower {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::Format("not a kernel matrix dump".into()));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let version = u64::from_le_bytes(word);
        if version != Self::VERSION {
            return Err(Error::Format(format!("unsupported dump version {version}")));
        }
        r.read_exact(&mut word)?;
        let kappa = Separation::new(f64::from_le_bytes(word))?;
        r.read_exact(&mut word)?;
        let trunc = usize::try_from(u64::from_le_bytes(word))
            .map_err(|_| Error::Format("truncation does not fit usize".into()))?;
        let len = (trunc + 1)
            .checked_mul(trunc + 2)
            .map(|x| x / 2)
            .ok_or_else(|| Error::Format("truncation too large".into()))?;
        let mut lower = Vec::with_capacity(len);
        for _ in 0..len {
            r.read_exact(&mut word)?;
            lower.push(f64::from_le_bytes(word));
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after matrix data".into()));
        }
        Ok(KernelMatrix {
            kappa,
            trunc,
            guard_product: trunc as f64 * PI * kappa.value(),
            lower,
        })
    }
}

/// Largest truncation passing the guard at `kappa`.
pub fn max_trunc(kappa: Separation) -> usize {
    (GUARD_LIMIT / (PI * kappa.value())).floor() as usize
}

/// Checks the `N·π·κ` precision guard.
pub fn check_guard(kappa: Separation, trunc: usize) -> Result<f64> {
    let product = trunc as f64 * PI * kappa.value();
    if product > GUARD_LIMIT {
        return Err(Error::PrecisionGuard {
            product,
            threshold: GUARD_LIMIT,
        });
    }
    if product > GUARD_WARN {
        log::warn!("N*pi*kappa = {product:.2} above {GUARD_WARN}");
    }
    Ok(product)
}

/// Assembles `K` for `0 ≤ m, n ≤ N`.
pub fn assemble(kappa: Separation, trunc: usize) -> Result<KernelMatrix> {
    let guard_product = check_guard(kappa, trunc)?;
    let cache = SpecfunCache::new(kappa, trunc)?;
    assemble_with(kappa, trunc, &cache, guard_product)
}

/// Same as [`assemble`] but fetching per-index terms from any source.
pub fn assemble_from<S: FamilySource + Sync + ?Sized>(
    kappa: Separation,
    trunc: usize,
    source: &S,
) -> Result<KernelMatrix> {
    let guard_product = check_guard(kappa, trunc)?;
    assemble_with(kappa, trunc, source, guard_product)
}

fn assemble_with<S: FamilySource + Sync + ?Sized>(
    kappa: Separation,
    trunc: usize,
    source: &S,
    guard_product: f64,
) -> Result<KernelMatrix> {
    if source.kappa() != kappa {
        return Err(Error::Contract(
            "family source built for another kappa".into(),
        ));
    }
    let rows: Vec<Vec<f64>> = (0..=trunc)
        .into_par_iter()
        .map(|m| -> Result<Vec<f64>> {
            if m == 0 {
                return Ok(vec![k00(kappa)]);
            }
            let tm = source.terms(m)?;
            let mut row = Vec::with_capacity(m + 1);
            row.push(k0n_from(&tm, m));
            for n in 1..=m {
                let tn = if n == m { tm } else { source.terms(n)? };
                row.push(kmn_from(&tn, &tm, m, n));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let lower: Vec<f64> = rows.into_iter().flatten().collect();
    let matrix = KernelMatrix {
        kappa,
        trunc,
        lower,
        guard_product,
    };
    matrix.check_bound()?;
    Ok(matrix)
}

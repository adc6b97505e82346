//! Entire functions of finite order presented by their Hadamard data.
//!
//! A [`FiniteOrderFunction`] stores
//!
//! ```text
//! f(z) = a z^m exp(W(z)) prod_j F(z / z_j)^{mult_j}
//! ```
//!
//! where `W(z) = c_1 z + ... + c_q z^q` and `F` is either the Weierstrass
//! primary factor `G(w, p) = (1 - w) exp(w + w^2/2 + ... + w^p/p)` with `p`
//! the genus ([`ProductForm::Primary`]) or the plain factor `1 - w`
//! ([`ProductForm::Plain`]). The zero list is a finite truncation; every
//! quantity computed here is exact for that truncation.
//!
//! All products are accumulated in log space (or as a scaled mantissa and
//! binary exponent), so moderate-modulus evaluations never overflow.

use crate::error::{Error, Result};
use crate::numeric::{
    linear_fit, pairwise_sum_c, periodic_max, poly_no_const, truncated_log_series, wrap_angle, ScaledComplex,
};
use num_complex::Complex64;

/// Points of the complex plane.
pub type ComplexPoint = Complex64;

/// Largest real part of a log-value for which [`FiniteOrderFunction::eval`]
/// reconstructs the value itself.
pub const RECONSTRUCT_LOG_LIMIT: f64 = 700.0;

/// Samples used on the unit circle when computing `sup |W|`.
const DEGREE_SUP_SAMPLES: usize = 1024;
const DEGREE_SUP_KEEP: usize = 8;
const DEGREE_SUP_TOL: f64 = 1e-10;

fn check_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be finite, got {z}")))
    }
}

/// A nonzero zero location together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEntry {
    location: Complex64,
    multiplicity: u32,
}

impl ZeroEntry {
    pub fn new(location: Complex64, multiplicity: u32) -> Result<Self> {
        check_finite(location, "zero location")?;
        if location.norm() == 0.0 {
            return Err(Error::invalid("zeros at the origin belong in origin_mult"));
        }
        if multiplicity == 0 {
            return Err(Error::invalid("zero multiplicity must be at least 1"));
        }
        Ok(ZeroEntry { location, multiplicity })
    }

    pub fn simple(location: Complex64) -> Result<Self> {
        Self::new(location, 1)
    }

    pub fn location(&self) -> Complex64 {
        self.location
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    pub fn modulus(&self) -> f64 {
        self.location.norm()
    }
}

/// Which factor multiplies out the stored zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductForm {
    /// Weierstrass primary factors `G(z/z_j, genus)`.
    #[default]
    Primary,
    /// Plain factors `1 - z/z_j`; the convergence exponentials live in `expoly`.
    Plain,
}

/// Hadamard data of an entire function of finite order.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOrderFunction {
    leading: Complex64,
    origin_mult: u32,
    expoly: Vec<Complex64>,
    genus: u32,
    zeros: Vec<ZeroEntry>,
    form: ProductForm,
    identically_zero: bool,
}

impl FiniteOrderFunction {
    /// Builds `a z^m exp(W) prod G(z/z_j, genus)`.
    ///
    /// `expoly` holds `c_1..c_q` of `W`; `q <= genus + 1` and genus zero
    /// forces `W = 0`.
    pub fn new(
        leading: Complex64,
        origin_mult: u32,
        expoly: Vec<Complex64>,
        genus: u32,
        zeros: Vec<ZeroEntry>,
    ) -> Result<Self> {
        Self::with_form(leading, origin_mult, expoly, genus, zeros, ProductForm::Primary)
    }

    /// Same as [`new`](Self::new) with an explicit product form.
    pub fn with_form(
        leading: Complex64,
        origin_mult: u32,
        expoly: Vec<Complex64>,
        genus: u32,
        zeros: Vec<ZeroEntry>,
        form: ProductForm,
    ) -> Result<Self> {
        check_finite(leading, "leading coefficient")?;
        if leading.norm() == 0.0 {
            return Err(Error::invalid(
                "leading coefficient must be nonzero (use FiniteOrderFunction::zero)",
            ));
        }
        for c in &expoly {
            check_finite(*c, "exponential polynomial coefficient")?;
        }
        if expoly.len() > genus as usize + 1 {
            return Err(Error::invalid(format!(
                "exponential polynomial degree {} exceeds genus + 1 = {}",
                expoly.len(),
                genus + 1
            )));
        }
        if genus == 0 && !expoly.is_empty() {
            return Err(Error::invalid("genus zero functions carry no exponential factor"));
        }
        Ok(FiniteOrderFunction {
            leading,
            origin_mult,
            expoly,
            genus,
            zeros,
            form,
            identically_zero: false,
        })
    }

    /// `a z^m prod (1 - z/z_j)`.
    pub fn genus_zero(leading: Complex64, origin_mult: u32, zeros: Vec<ZeroEntry>) -> Result<Self> {
        Self::new(leading, origin_mult, Vec::new(), 0, zeros)
    }

    /// Polynomial `a prod (1 - z/r)` over the given roots (roots at the
    /// origin are folded into the origin multiplicity).
    pub fn from_roots(leading: Complex64, roots: &[Complex64]) -> Result<Self> {
        let mut origin = 0;
        let mut zeros = Vec::new();
        for &r in roots {
            if r.norm() == 0.0 {
                origin += 1;
            } else {
                zeros.push(ZeroEntry::simple(r)?);
            }
        }
        Self::genus_zero(leading, origin, zeros)
    }

    pub fn constant(a: Complex64) -> Result<Self> {
        Self::genus_zero(a, 0, Vec::new())
    }

    /// `a z^m`.
    pub fn monomial(a: Complex64, m: u32) -> Result<Self> {
        Self::genus_zero(a, m, Vec::new())
    }

    /// `z^k f(z)`.
    pub fn times_monomial(&self, k: u32) -> FiniteOrderFunction {
        let mut g = self.clone();
        if !g.identically_zero {
            g.origin_mult += k;
        }
        g
    }

    /// The identically zero function.
    pub fn zero() -> Self {
        FiniteOrderFunction {
            leading: Complex64::new(0.0, 0.0),
            origin_mult: 0,
            expoly: Vec::new(),
            genus: 0,
            zeros: Vec::new(),
            form: ProductForm::Primary,
            identically_zero: true,
        }
    }

    pub fn leading(&self) -> Complex64 {
        self.leading
    }
    pub fn origin_mult(&self) -> u32 {
        self.origin_mult
    }
    pub fn expoly(&self) -> &[Complex64] {
        &self.expoly
    }
    pub fn genus(&self) -> u32 {
        self.genus
    }
    pub fn zeros(&self) -> &[ZeroEntry] {
        &self.zeros
    }
    pub fn form(&self) -> ProductForm {
        self.form
    }
    pub fn is_identically_zero(&self) -> bool {
        self.identically_zero
    }

    /// Sum of stored multiplicities (origin excluded).
    pub fn total_multiplicity(&self) -> u64 {
        self.zeros.iter().map(|z| z.multiplicity as u64).sum()
    }

    /// Degree `p` of the polynomial inside each factor's exponential.
    pub fn factor_degree(&self) -> u32 {
        match self.form {
            ProductForm::Primary => self.genus,
            ProductForm::Plain => 0,
        }
    }

    /// `W(z)`.
    pub fn exponent_poly(&self, z: Complex64) -> Complex64 {
        poly_no_const(&self.expoly, z)
    }

    /// Evaluates `f(z)` together with `log|f(z)|`.
    ///
    /// `log_abs` is a sum of `log|.|` terms and equals `-inf` exactly when
    /// `z` is a stored zero (or the origin with `m >= 1`). The value itself is
    /// only reconstructed when `log_abs <= 700`.
    pub fn eval(&self, z: Complex64) -> Evaluation {
        if self.identically_zero {
            return Evaluation::zero();
        }
        let mut log_abs = self.leading.norm().ln();
        let mut arg = self.leading.arg();
        let mut prod = ScaledComplex::new(self.leading);
        if self.origin_mult > 0 {
            if z.norm() == 0.0 {
                return Evaluation::zero();
            }
            let m = self.origin_mult as f64;
            log_abs += m * z.norm().ln();
            arg += m * z.arg();
            prod.mul_pow(z, self.origin_mult);
        }
        let p = self.factor_degree();
        let mut shift = self.exponent_poly(z);
        let mut poly_terms = Vec::new();
        for zero in &self.zeros {
            let zj = zero.location;
            let one_minus = (zj - z) / zj;
            if one_minus.re == 0.0 && one_minus.im == 0.0 {
                return Evaluation::zero();
            }
            let k = zero.multiplicity as f64;
            log_abs += k * one_minus.norm().ln();
            arg += k * one_minus.arg();
            prod.mul_pow(one_minus, zero.multiplicity);
            if p > 0 {
                poly_terms.push(truncated_log_series(z / zj, p) * k);
            }
        }
        shift += pairwise_sum_c(&poly_terms);
        log_abs += shift.re;
        arg = wrap_angle(arg + wrap_angle(shift.im));
        let value = if log_abs <= RECONSTRUCT_LOG_LIMIT {
            Some(prod.to_complex_with_exp(shift))
        } else {
            None
        };
        Evaluation { value, log_abs, arg }
    }

    /// Number of stored zeros with `0 < |z_j| <= radius`, counted with
    /// multiplicity. The comparison is exact on the stored data.
    pub fn zero_count(&self, radius: f64) -> u64 {
        self.zeros
            .iter()
            .filter(|z| z.modulus() <= radius)
            .map(|z| z.multiplicity as u64)
            .sum()
    }

    /// The degree `d*`:
    /// `m + sup_{|z|<=1}|W| + sum_{|z_j|<=1} 1/|z_j|^p + sum_{|z_j|>1} 1/|z_j|^{p+1}`
    /// with multiplicities, `p` the declared genus. The stored zero list is
    /// taken to be the full zero set.
    pub fn hadamard_degree(&self) -> f64 {
        if self.identically_zero {
            return 0.0;
        }
        let p = self.genus as i32;
        let w_sup = if self.expoly.iter().all(|c| c.norm() == 0.0) {
            0.0
        } else {
            let (_, v) = periodic_max(
                |t| self.exponent_poly(Complex64::from_polar(1.0, t)).norm(),
                DEGREE_SUP_SAMPLES,
                DEGREE_SUP_KEEP,
                DEGREE_SUP_TOL,
            );
            v
        };
        let zero_sum: f64 = self
            .zeros
            .iter()
            .map(|z| {
                let r = z.modulus();
                let k = z.multiplicity as f64;
                if r <= 1.0 {
                    k / r.powi(p)
                } else {
                    k / r.powi(p + 1)
                }
            })
            .sum();
        self.origin_mult as f64 + w_sup + zero_sum
    }

    /// Rewrites the function with plain factors `1 - z/z_j`, moving every
    /// primary-factor exponential into the exponential polynomial.
    pub fn to_plain_form(&self) -> FiniteOrderFunction {
        absorb_zeros(self, f64::INFINITY)
    }

    /// Taylor coefficients `a_0 .. a_{len-1}` at the origin.
    pub fn taylor_coefficients(&self, len: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        if self.identically_zero || len == 0 {
            return out;
        }
        let plain = self.to_plain_form();
        // exp(W) via h' = W' h.
        let mut h = vec![Complex64::new(0.0, 0.0); len];
        h[0] = Complex64::new(1.0, 0.0);
        for k in 1..len {
            let terms: Vec<Complex64> = (1..=k.min(plain.expoly.len()))
                .map(|j| plain.expoly[j - 1] * j as f64 * h[k - j])
                .collect();
            h[k] = pairwise_sum_c(&terms) / k as f64;
        }
        for zero in &plain.zeros {
            let inv = 1.0 / zero.location;
            for _ in 0..zero.multiplicity {
                for k in (1..len).rev() {
                    let prev = h[k - 1];
                    h[k] -= prev * inv;
                }
            }
        }
        let m = plain.origin_mult as usize;
        for k in m..len {
            out[k] = plain.leading * h[k - m];
        }
        out
    }
}

impl FiniteOrderFunction {
    /// Removes the zeros selected by `pred`. Their primary-factor
    /// exponentials stay behind in `W`, so `self` equals the returned function
    /// times `prod (1 - z/z_j)^{mult_j}` over the removed zeros.
    pub(crate) fn split_zeros<P: Fn(&ZeroEntry) -> bool>(&self, pred: P) -> (FiniteOrderFunction, Vec<ZeroEntry>) {
        let (removed, kept): (Vec<ZeroEntry>, Vec<ZeroEntry>) = self.zeros.iter().copied().partition(|z| pred(z));
        let p = self.factor_degree() as usize;
        let mut expoly = self.expoly.clone();
        if p > 0 && !removed.is_empty() {
            expoly.resize(expoly.len().max(p), Complex64::new(0.0, 0.0));
            for (k, slot) in expoly.iter_mut().enumerate().take(p) {
                let power = (k + 1) as i32;
                let terms: Vec<Complex64> = removed
                    .iter()
                    .map(|z| z.location.powi(-power) * (z.multiplicity as f64 / power as f64))
                    .collect();
                *slot += pairwise_sum_c(&terms);
            }
        }
        let reduced = FiniteOrderFunction {
            expoly,
            zeros: kept,
            ..self.clone()
        };
        (reduced, removed)
    }
}

/// Moves `sum mult_j (z/z_j + ... + z^p/(p z_j^p))` for zeros with
/// `|z_j| <= cut` into the exponential polynomial and keeps only those zeros,
/// as plain factors.
pub(crate) fn absorb_zeros(f: &FiniteOrderFunction, cut: f64) -> FiniteOrderFunction {
    if f.identically_zero {
        return f.clone();
    }
    let p = f.factor_degree() as usize;
    let kept: Vec<ZeroEntry> = f.zeros.iter().copied().filter(|z| z.modulus() <= cut).collect();
    let len = f.expoly.len().max(if kept.is_empty() { 0 } else { p });
    let mut expoly = f.expoly.clone();
    expoly.resize(len, Complex64::new(0.0, 0.0));
    for (k, slot) in expoly.iter_mut().enumerate().take(p) {
        let power = (k + 1) as i32;
        let terms: Vec<Complex64> = kept
            .iter()
            .map(|z| z.location.powi(-power) * (z.multiplicity as f64 / power as f64))
            .collect();
        *slot += pairwise_sum_c(&terms);
    }
    FiniteOrderFunction {
        leading: f.leading,
        origin_mult: f.origin_mult,
        expoly,
        genus: f.genus,
        zeros: kept,
        form: if f.genus == 0 {
            ProductForm::Primary
        } else {
            ProductForm::Plain
        },
        identically_zero: false,
    }
}

/// Result of [`FiniteOrderFunction::eval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// `f(z)`, or `None` when `log_abs` exceeds [`RECONSTRUCT_LOG_LIMIT`].
    pub value: Option<Complex64>,
    /// `log|f(z)|`, `-inf` at zeros.
    pub log_abs: f64,
    /// `arg f(z)` in `(-pi, pi]`, accumulated factor by factor.
    pub arg: f64,
}

impl Evaluation {
    fn zero() -> Self {
        Evaluation {
            value: Some(Complex64::new(0.0, 0.0)),
            log_abs: f64::NEG_INFINITY,
            arg: 0.0,
        }
    }

    /// True when the value was not reconstructed.
    pub fn out_of_range(&self) -> bool {
        self.value.is_none()
    }

    /// `log f(z)` with the accumulated argument.
    pub fn log_value(&self) -> Complex64 {
        Complex64::new(self.log_abs, self.arg)
    }
}

/// Weierstrass primary factor `G(z, p)`; `G(z, 0) = 1 - z`.
pub fn primary_factor(z: Complex64, p: u32) -> Result<Complex64> {
    let one_minus = Complex64::new(1.0, 0.0) - z;
    if one_minus.re == 0.0 && one_minus.im == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let exponent = truncated_log_series(z, p);
    if exponent.re + one_minus.norm().ln() > RECONSTRUCT_LOG_LIMIT {
        return Err(Error::Range {
            exponent_re: exponent.re,
        });
    }
    Ok(one_minus * exponent.exp())
}

/// Principal-branch `log G(z, p) = Log(1 - z) + z + ... + z^p/p`, continuous
/// from `z = 0` inside the unit disk.
pub fn primary_factor_log(z: Complex64, p: u32) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z).ln() + truncated_log_series(z, p)
}

/// `lambda_p = 1 + (1 + 1/2 + ... + 1/p)`, with `lambda_0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicConstant {
    pub p: u32,
    pub lambda_p: f64,
}

impl HarmonicConstant {
    pub fn new(p: u32) -> Self {
        let harmonic: f64 = (1..=p).map(|j| 1.0 / j as f64).sum();
        HarmonicConstant {
            p,
            lambda_p: 1.0 + harmonic,
        }
    }

    /// `exp(lambda_p |z|^p)`, the bound on `|G(z, p)|` for `|z| >= 1`.
    pub fn weierstrass_bound(&self, z: Complex64) -> f64 {
        (self.lambda_p * z.norm().powi(self.p as i32)).exp()
    }
}

/// Taylor coefficients `a_0..a_M` at the origin.
///
/// Moduli are also kept as logarithms so windows such as `1/n!` up to
/// `n = 200` stay meaningful after the values underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientWindow {
    coeffs: Vec<Complex64>,
    log_abs: Vec<f64>,
}

impl CoefficientWindow {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::invalid("coefficient window needs M >= 2"));
        }
        for c in &coeffs {
            check_finite(*c, "Taylor coefficient")?;
        }
        let log_abs = coeffs.iter().map(|c| c.norm().ln()).collect();
        Ok(CoefficientWindow { coeffs, log_abs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Real positive coefficients given by `log a_n` (`-inf` for `a_n = 0`).
    pub fn from_log_abs(log_abs: Vec<f64>) -> Result<Self> {
        if log_abs.len() < 3 {
            return Err(Error::invalid("coefficient window needs M >= 2"));
        }
        if log_abs.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
            return Err(Error::invalid("log-coefficients must be finite or -inf"));
        }
        let coeffs = log_abs.iter().map(|l| Complex64::new(l.exp(), 0.0)).collect();
        Ok(CoefficientWindow { coeffs, log_abs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `log|a_n|`.
    pub fn log_abs(&self) -> &[f64] {
        &self.log_abs
    }
}

/// Finite-sample order estimate from Taylor coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    /// `1/slope` of the fit `log(1/|a_n|)/n ~ slope * log n + c` over the
    /// trailing window.
    pub order: f64,
    /// `max n log n / log(1/|a_n|)` over the same window (the raw ratio).
    pub raw_ratio_max: f64,
    /// Indices that entered the estimate.
    pub indices_used: usize,
    /// Set when the window has no nonzero coefficient (polynomial tail).
    pub polynomial_tail: bool,
}

/// Estimates the order from a coefficient window.
///
/// The raw ratio `n log n / log(1/|a_n|)` approaches the order only like
/// `1/log n`; the reported `order` instead fits
/// `log(1/|a_n|)/n = (1/rho) log n + c`, which absorbs the type term.
/// `window_fraction` in `(0, 1]` selects the trailing share of indices `>= 2`.
pub fn order_estimate(w: &CoefficientWindow, window_fraction: f64) -> Result<OrderEstimate> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::invalid("window fraction must lie in (0, 1]"));
    }
    let m = w.coeffs.len() - 1;
    let span = ((m - 1) as f64 * window_fraction).ceil() as usize;
    let start = (m + 1 - span.max(1)).max(2);
    let window = start..=m;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut raw = 0.0f64;
    let mut any_nonzero = false;
    for n in window {
        let la = w.log_abs[n];
        if la > f64::NEG_INFINITY {
            any_nonzero = true;
        }
        if la > f64::NEG_INFINITY && la < 0.0 {
            let nf = n as f64;
            let l = -la;
            raw = raw.max(nf * nf.ln() / l);
            xs.push(nf.ln());
            ys.push(l / nf);
        }
    }
    if !any_nonzero {
        return Ok(OrderEstimate {
            order: 0.0,
            raw_ratio_max: 0.0,
            indices_used: 0,
            polynomial_tail: true,
        });
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate(
            "fewer than two coefficients with 0 < |a_n| < 1 in the window".into(),
        ));
    }
    let (slope, _) =
        linear_fit(&xs, &ys).ok_or_else(|| Error::Degenerate("coefficient window has a single index".into()))?;
    let order = if slope > 0.0 { 1.0 / slope } else { f64::INFINITY };
    Ok(OrderEstimate {
        order,
        raw_ratio_max: raw,
        indices_used: xs.len(),
        polynomial_tail: false,
    })
}

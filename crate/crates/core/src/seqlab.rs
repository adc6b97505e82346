//! Sequence-level quantities for a family `(P_n, k_n)`: ring constants,
//! tail power sums of the zeros, the two-way tail classifier, the
//! capacity growth bound, power sums from the Taylor series of `log f`, the
//! finite-order reduction and the sign of `Re W` along lines.
//!
//! Every `limsup`/`liminf` over `n` is replaced by a max/min over the
//! trailing half of the indices; limits in `R` are read off the supplied
//! grid. Results are finite-sample evidence, never proofs.

use crate::efun::{absorb_zeros, CoefficientWindow, FiniteOrderFunction};
use crate::error::{Error, Result};
use crate::growth::{log_mean, sup_norm, CircleQuadrature};
use crate::numeric::{linear_fit, pairwise_sum, pairwise_sum_c, trailing_window};
use crate::report::{csv_table, fmt_f64};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::ops::Range;

/// A finite family `P_1..P_N` with normalisers `k_n` and analysis grids.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    functions: Vec<FiniteOrderFunction>,
    k: Vec<f64>,
    r_grid: Vec<f64>,
    r_witness: Option<Vec<f64>>,
}

fn strictly_increasing_positive(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite() && *x > 0.0) && xs.windows(2).all(|w| w[0] < w[1])
}

impl SequenceSpec {
    pub fn new(
        functions: Vec<FiniteOrderFunction>,
        k: Vec<f64>,
        r_grid: Vec<f64>,
        r_witness: Option<Vec<f64>>,
    ) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::invalid("sequence needs at least one function"));
        }
        if functions.len() != k.len() {
            return Err(Error::invalid(format!(
                "{} functions but {} normalisers k_n",
                functions.len(),
                k.len()
            )));
        }
        if !k.iter().all(|x| x.is_finite() && *x > 0.0) {
            return Err(Error::invalid("every k_n must be positive and finite"));
        }
        if r_grid.is_empty() || !strictly_increasing_positive(&r_grid) {
            return Err(Error::invalid(
                "R grid must be a nonempty strictly increasing list of positive reals",
            ));
        }
        if let Some(w) = &r_witness {
            if w.len() != functions.len() || !strictly_increasing_positive(w) {
                return Err(Error::invalid(
                    "witness radii must be strictly increasing, positive, one per function",
                ));
            }
        }
        Ok(SequenceSpec {
            functions,
            k,
            r_grid,
            r_witness,
        })
    }

    pub fn functions(&self) -> &[FiniteOrderFunction] {
        &self.functions
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn r_grid(&self) -> &[f64] {
        &self.r_grid
    }

    pub fn r_witness(&self) -> Option<&[f64]> {
        self.r_witness.as_deref()
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Zero-based indices standing in for `n -> infinity`.
    pub fn window(&self) -> Range<usize> {
        trailing_window(self.len())
    }

    fn caveat(&self) -> String {
        let w = self.window();
        format!(
            "finite-sample estimate: limsup/liminf over n = {}..={} of N = {}",
            w.start + 1,
            w.end,
            self.len()
        )
    }

    fn function(&self, n: usize) -> Result<(&FiniteOrderFunction, f64)> {
        if n == 0 || n > self.len() {
            return Err(Error::invalid(format!("index n = {n} outside 1..={}", self.len())));
        }
        Ok((&self.functions[n - 1], self.k[n - 1]))
    }
}

/// Estimates of `C_0`, `C_0^*` and `eta(R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthStats {
    pub c0_est: f64,
    pub c0_star_est: f64,
    /// `(R, max_n eta(P_n,R)/k_n)` for each grid radius.
    pub eta_scaled: Vec<(f64, f64)>,
    pub note: String,
}

pub fn ring_constants(s: &SequenceSpec, q: &CircleQuadrature) -> Result<GrowthStats> {
    let window = s.window();
    let scaled: Vec<f64> = window
        .clone()
        .into_par_iter()
        .map(|i| log_mean(&s.functions[i], 1.0, q).map(|lm| (lm.value / s.k[i]).exp()))
        .collect::<Result<_>>()?;
    let c0_est = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c0_star_est = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let eta_scaled = s
        .r_grid
        .iter()
        .map(|&r| {
            let v = window
                .clone()
                .map(|i| s.functions[i].zero_count(r) as f64 / s.k[i])
                .fold(0.0, f64::max);
            (r, v)
        })
        .collect();
    Ok(GrowthStats {
        c0_est,
        c0_star_est,
        eta_scaled,
        note: s.caveat(),
    })
}

fn abs_tail(f: &FiniteOrderFunction, k: f64, radius: f64, m: u32) -> f64 {
    let terms: Vec<f64> = f
        .zeros()
        .iter()
        .filter(|z| z.modulus() >= radius)
        .map(|z| z.multiplicity() as f64 / z.modulus().powi(m as i32))
        .collect();
    pairwise_sum(&terms) / k
}

fn signed_tail(f: &FiniteOrderFunction, k: f64, radius: f64, l: u32) -> Complex64 {
    let terms: Vec<Complex64> = f
        .zeros()
        .iter()
        .filter(|z| z.modulus() >= radius)
        .map(|z| z.location().powi(-(l as i32)) * z.multiplicity() as f64)
        .collect();
    pairwise_sum_c(&terms) / k
}

/// `(1/k_n) sum_{|z_{n,j}| >= R} mult_j / |z_{n,j}|^m`, `n` one-based.
pub fn tail_powersum_abs(s: &SequenceSpec, n: usize, radius: f64, m: u32) -> Result<f64> {
    let (f, k) = s.function(n)?;
    check_power(m)?;
    Ok(abs_tail(f, k, radius, m))
}

/// `beta_{n,l} = -(1/k_n) sum_{|z_{n,j}| >= R} 1/(l z_{n,j}^l)` in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta {
    pub magnitude: f64,
    /// Argument in `[0, 2pi)`.
    pub argument: f64,
}

impl Beta {
    fn from_signed(sum: Complex64, l: u32) -> Self {
        let b = -sum / l as f64;
        Beta {
            magnitude: b.norm(),
            argument: if b.norm() == 0.0 { 0.0 } else { b.arg().rem_euclid(TAU) },
        }
    }
}

/// Magnitude of the signed tail `(1/k_n)|sum_{|z_{n,j}| >= R} mult_j / z_{n,j}^l|`
/// together with the matching `beta_{n,l}`.
pub fn tail_powersum_signed(s: &SequenceSpec, n: usize, radius: f64, l: u32) -> Result<(f64, Beta)> {
    let (f, k) = s.function(n)?;
    check_power(l)?;
    let sum = signed_tail(f, k, radius, l);
    Ok((sum.norm(), Beta::from_signed(sum, l)))
}

fn check_power(m: u32) -> Result<()> {
    if m == 0 {
        Err(Error::invalid("power index must be at least 1"))
    } else {
        Ok(())
    }
}

/// All tails for `n = 1..N`, every grid radius and powers `1..=m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSums {
    pub r_grid: Vec<f64>,
    pub m_max: u32,
    /// `s[n-1][r][m-1]`, absolute tails.
    pub s: Vec<Vec<Vec<f64>>>,
    /// `t[n-1][r][l-1]`, signed-tail magnitudes.
    pub t: Vec<Vec<Vec<f64>>>,
    /// `beta[n-1][l-1]` at the cut radius of each `n`.
    pub beta: Vec<Vec<Beta>>,
    /// Cut radius used for `beta`: the witness radius `R_n` when supplied,
    /// otherwise the largest grid radius.
    pub beta_radius: Vec<f64>,
}

/// `(S rows, T rows, beta, cut radius)` for one `n`.
type TailRow = (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Beta>, f64);

pub fn tail_sums(s: &SequenceSpec, m_max: u32) -> Result<TailSums> {
    check_power(m_max)?;
    let rows: Vec<TailRow> = (0..s.len())
        .into_par_iter()
        .map(|i| {
            let (f, k) = (&s.functions[i], s.k[i]);
            let abs: Vec<Vec<f64>> = s
                .r_grid
                .iter()
                .map(|&r| (1..=m_max).map(|m| abs_tail(f, k, r, m)).collect())
                .collect();
            let signed: Vec<Vec<f64>> = s
                .r_grid
                .iter()
                .map(|&r| (1..=m_max).map(|l| signed_tail(f, k, r, l).norm()).collect())
                .collect();
            let cut = match &s.r_witness {
                Some(w) => w[i],
                None => *s.r_grid.last().expect("grid is nonempty"),
            };
            let beta = (1..=m_max)
                .map(|l| Beta::from_signed(signed_tail(f, k, cut, l), l))
                .collect();
            (abs, signed, beta, cut)
        })
        .collect();
    let mut out = TailSums {
        r_grid: s.r_grid.clone(),
        m_max,
        s: Vec::with_capacity(rows.len()),
        t: Vec::with_capacity(rows.len()),
        beta: Vec::with_capacity(rows.len()),
        beta_radius: Vec::with_capacity(rows.len()),
    };
    for (abs, signed, beta, cut) in rows {
        out.s.push(abs);
        out.t.push(signed);
        out.beta.push(beta);
        out.beta_radius.push(cut);
    }
    Ok(out)
}

impl TailSums {
    /// Tidy CSV `n,R,m,S,T`.
    pub fn to_csv(&self) -> String {
        let mut rows = Vec::new();
        for (i, (s_n, t_n)) in self.s.iter().zip(&self.t).enumerate() {
            for (ri, r) in self.r_grid.iter().enumerate() {
                for m in 0..self.m_max as usize {
                    rows.push(vec![
                        (i + 1).to_string(),
                        fmt_f64(*r),
                        (m + 1).to_string(),
                        fmt_f64(s_n[ri][m]),
                        fmt_f64(t_n[ri][m]),
                    ]);
                }
            }
        }
        csv_table(&["n", "R", "m", "S", "T"], &rows)
    }
}

/// Which alternative of the tail dichotomy the finite data supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// Absolute tails blow up for every `m`.
    One,
    /// Absolute tails vanish for some `m`.
    Two,
    Inconclusive,
}

impl Alternative {
    pub fn as_str(&self) -> &'static str {
        match self {
            Alternative::One => "one",
            Alternative::Two => "two",
            Alternative::Inconclusive => "inconclusive",
        }
    }
}

/// Thresholds of [`dichotomy_classify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    pub tol_zero: f64,
    pub tol_inf: f64,
    /// The `n -> infinity` extrapolation is evaluated at `horizon_factor * N`.
    pub horizon_factor: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            tol_zero: 1e-3,
            tol_inf: 1e3,
            horizon_factor: 1e3,
        }
    }
}

/// Trend of one tail sequence `n -> v_n` over the trailing window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailTrend {
    pub radius: f64,
    pub power: u32,
    /// Max over the window.
    pub window_max: f64,
    /// Exponent `alpha` of the fit `v_n ~ A n^alpha` (0 when not fitted).
    pub exponent: f64,
    /// Fitted value at the horizon, or the window max when no fit exists.
    pub extrapolated: f64,
    /// Strictly increasing across the window.
    pub monotone_growth: bool,
}

/// Power-law fit over the window; zero entries are skipped by the fit and
/// an all-zero window extrapolates to 0.
pub(crate) fn trend(values: &[f64], window: Range<usize>, horizon: f64, radius: f64, power: u32) -> TailTrend {
    let w = &values[window.clone()];
    let window_max = w.iter().copied().fold(0.0, f64::max);
    let monotone_growth = w.len() >= 2 && w.windows(2).all(|p| p[1] > p[0]);
    let (xs, ys): (Vec<f64>, Vec<f64>) = window
        .clone()
        .zip(w)
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| (((i + 1) as f64).ln(), v.ln()))
        .unzip();
    let (exponent, extrapolated) = if window_max == 0.0 {
        (0.0, 0.0)
    } else {
        match linear_fit(&xs, &ys) {
            Some((a, b)) if xs.len() == w.len() => (a, (a * horizon.ln() + b).exp()),
            _ => (0.0, window_max),
        }
    };
    TailTrend {
        radius,
        power,
        window_max,
        exponent,
        extrapolated,
        monotone_growth,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyVerdict {
    pub alternative: Alternative,
    pub witness_m: Option<u32>,
    /// Absolute-tail trends for every `(m, R)`.
    pub evidence: Vec<TailTrend>,
    /// Signed-tail trends at the largest radius for `l < witness_m`.
    pub signed_evidence: Vec<TailTrend>,
    /// Whether every signed tail with `l < witness_m` extrapolates below
    /// `tol_zero` (vacuously true for `witness_m = 1`); `None` unless the
    /// verdict is [`Alternative::Two`].
    pub signed_decay: Option<bool>,
    pub caveat: String,
}

/// Extrapolates each absolute tail in `n` at fixed `R`, then reads the
/// trend in `R`: alternative two with the smallest `m` whose extrapolated
/// tail is below `tol_zero` at the two largest radii; alternative one when
/// for every `m` the tail at the largest radius exceeds `tol_inf` or grows
/// monotonically in `n`.
pub fn dichotomy_classify(s: &SequenceSpec, m_max: u32, cfg: &ClassifierConfig) -> Result<DichotomyVerdict> {
    if s.r_grid.len() < 4 {
        return Err(Error::invalid("classifier needs at least 4 grid radii"));
    }
    if s.len() < 8 {
        return Err(Error::invalid("classifier needs at least 8 functions"));
    }
    let tails = tail_sums(s, m_max)?;
    let window = s.window();
    let horizon = cfg.horizon_factor * s.len() as f64;
    let nr = s.r_grid.len();
    let mut evidence = Vec::new();
    for m in 0..m_max as usize {
        for (ri, &r) in s.r_grid.iter().enumerate() {
            let series: Vec<f64> = tails.s.iter().map(|row| row[ri][m]).collect();
            evidence.push(trend(&series, window.clone(), horizon, r, m as u32 + 1));
        }
    }
    let at = |m: usize, ri: usize| &evidence[m * nr + ri];
    let witness = (0..m_max as usize)
        .find(|&m| at(m, nr - 1).extrapolated < cfg.tol_zero && at(m, nr - 2).extrapolated < cfg.tol_zero)
        .map(|m| m as u32 + 1);
    let all_blow_up = (0..m_max as usize).all(|m| {
        let e = at(m, nr - 1);
        e.extrapolated > cfg.tol_inf || e.monotone_growth
    });
    let (alternative, signed_evidence, signed_decay) = match witness {
        Some(wm) => {
            let largest = s.r_grid[nr - 1];
            let signed: Vec<TailTrend> = (1..wm)
                .map(|l| {
                    let series: Vec<f64> = tails.t.iter().map(|row| row[nr - 1][l as usize - 1]).collect();
                    trend(&series, window.clone(), horizon, largest, l)
                })
                .collect();
            let decay = signed.iter().all(|t| t.extrapolated < cfg.tol_zero);
            (Alternative::Two, signed, Some(decay))
        }
        None if all_blow_up => (Alternative::One, Vec::new(), None),
        None => (Alternative::Inconclusive, Vec::new(), None),
    };
    Ok(DichotomyVerdict {
        alternative,
        witness_m: witness,
        evidence,
        signed_evidence,
        signed_decay,
        caveat: format!("{}; power-law extrapolation to n = {horizon}", s.caveat()),
    })
}

/// `beta` (capacity growth exponent of the test set), `gamma` (growth
/// exponent of the pointwise bound) and `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionParams {
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
}

impl RegionParams {
    pub fn new(beta: f64, gamma: f64, tau: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(format!("beta must be positive, got {beta}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0 && tau.is_finite() && tau >= 0.0) {
            return Err(Error::invalid("gamma and tau must be finite and nonnegative"));
        }
        Ok(RegionParams { beta, gamma, tau })
    }
}

/// Finite-sample evidence for the hypotheses under which the bound holds.
/// The bound is supported when the witness count is bounded and either the
/// degree set (`degree_dominated` and `first_moment_tail_vanishes`) or the
/// tail set (`absolute_tail_vanishes`, which includes signed-tail decay)
/// holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypothesisFlags {
    /// `k_n >= d*(P_n)` on the whole family.
    pub degree_dominated: bool,
    /// Signed first-power tail extrapolates below `tol_zero` at the largest radius.
    pub first_moment_tail_vanishes: bool,
    /// `max eta(P_n, R_n)/k_n <= tol_inf` over the window; `None` without witness radii.
    pub witness_count_bounded: Option<bool>,
    /// Classifier found alternative two with decaying signed tails; `None`
    /// when the classifier preconditions fail.
    pub absolute_tail_vanishes: Option<bool>,
}

impl HypothesisFlags {
    pub fn supported(&self) -> bool {
        let degree_set = self.degree_dominated && self.first_moment_tail_vanishes;
        let tail_set = self.absolute_tail_vanishes == Some(true);
        self.witness_count_bounded == Some(true) && (degree_set || tail_set)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub radius: f64,
    pub bound: f64,
    /// Max over the window of `||P_n||_R^{1/k_n}`.
    pub empirical: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthBoundReport {
    pub rows: Vec<BoundRow>,
    pub hypotheses: HypothesisFlags,
    pub caveat: String,
}

pub const SUP_SAMPLES: usize = 1024;

/// Compares `C0 (1+R)^{gamma/beta}` with the empirical normalised maximum
/// modulus at every grid radius.
pub fn growth_bound_check(s: &SequenceSpec, params: &RegionParams, c0: f64) -> Result<GrowthBoundReport> {
    if !(c0.is_finite() && c0 >= 0.0) {
        return Err(Error::invalid(format!("C0 must be finite and nonnegative, got {c0}")));
    }
    let window = s.window();
    let exponent = params.gamma / params.beta;
    let rows = s
        .r_grid
        .par_iter()
        .map(|&r| {
            let mut empirical = 0.0f64;
            for i in window.clone() {
                let sup = sup_norm(&s.functions[i], r, SUP_SAMPLES)?;
                empirical = empirical.max((sup.log_value / s.k[i]).exp());
            }
            let bound = c0 * (1.0 + r).powf(exponent);
            Ok(BoundRow {
                radius: r,
                bound,
                empirical,
                margin: bound - empirical,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthBoundReport {
        rows,
        hypotheses: hypothesis_flags(s, &ClassifierConfig::default())?,
        caveat: s.caveat(),
    })
}

pub fn hypothesis_flags(s: &SequenceSpec, cfg: &ClassifierConfig) -> Result<HypothesisFlags> {
    let window = s.window();
    let degree_dominated = s.functions.iter().zip(&s.k).all(|(f, k)| *k >= f.hadamard_degree());
    let largest = *s.r_grid.last().expect("grid is nonempty");
    let first: Vec<f64> = s
        .functions
        .iter()
        .zip(&s.k)
        .map(|(f, k)| signed_tail(f, *k, largest, 1).norm())
        .collect();
    let horizon = cfg.horizon_factor * s.len() as f64;
    let first_moment_tail_vanishes = trend(&first, window.clone(), horizon, largest, 1).extrapolated < cfg.tol_zero;
    let witness_count_bounded = s.r_witness.as_ref().map(|w| {
        window
            .clone()
            .map(|i| s.functions[i].zero_count(w[i]) as f64 / s.k[i])
            .fold(0.0, f64::max)
            <= cfg.tol_inf
    });
    let absolute_tail_vanishes = if s.r_grid.len() >= 4 && s.len() >= 8 {
        let v = dichotomy_classify(s, 1, cfg)?;
        Some(v.alternative == Alternative::Two && v.signed_decay == Some(true))
    } else {
        None
    };
    Ok(HypothesisFlags {
        degree_dominated,
        first_moment_tail_vanishes,
        witness_count_bounded,
        absolute_tail_vanishes,
    })
}

/// Input to [`powersums_from_logderiv`].
#[derive(Debug, Clone, Copy)]
pub enum PowerSumSource<'a> {
    /// Taylor coefficients are synthesised from the zero data.
    Function(&'a FiniteOrderFunction),
    /// Taylor coefficients `a_0, a_1, ...` of a genus-zero `a prod (1 - z/z_j)`.
    Coefficients(&'a CoefficientWindow),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums {
    /// `s_l = sum_j mult_j / z_j^l` for `l = 1..=l_max`.
    pub sums: Vec<Complex64>,
    /// `|f(0)| < 1e-12`: the recursion divides by `f(0)`.
    pub precision_warning: bool,
}

/// Number of Taylor coefficients synthesised per requested power sum.
pub const TAYLOR_OVERSAMPLING: usize = 4;

/// Power sums of the zeros from the Taylor coefficients of `log f` at 0.
///
/// With `f = sum a_k z^k` and `g = log f`, `f' = g' f` gives
/// `k a_0 g_k = k a_k - sum_{j<k} j g_j a_{k-j}`. For
/// `f = a e^{W} prod (1 - z/z_j)^{mult_j}` (plain factors) the coefficient
/// `g_l` equals `w_l - s_l / l`.
pub fn powersums_from_logderiv(source: PowerSumSource<'_>, l_max: usize) -> Result<PowerSums> {
    if l_max == 0 {
        return Err(Error::invalid("l_max must be at least 1"));
    }
    let (coeffs, w): (Vec<Complex64>, Vec<Complex64>) = match source {
        PowerSumSource::Function(f) => {
            if f.is_identically_zero() {
                return Err(Error::Degenerate("power sums of the zero function".into()));
            }
            if f.origin_mult() > 0 {
                return Err(Error::OriginZero(f.origin_mult()));
            }
            let plain = f.to_plain_form();
            (
                f.taylor_coefficients(TAYLOR_OVERSAMPLING * l_max),
                plain.expoly().to_vec(),
            )
        }
        PowerSumSource::Coefficients(win) => {
            if win.coeffs().len() <= l_max {
                return Err(Error::invalid(format!(
                    "need more than {l_max} Taylor coefficients, got {}",
                    win.coeffs().len()
                )));
            }
            let c = win.coeffs();
            if c[0].norm() == 0.0 {
                return Err(Error::OriginZero(
                    c.iter().take_while(|a| a.norm() == 0.0).count() as u32
                ));
            }
            (c.to_vec(), Vec::new())
        }
    };
    let a0 = coeffs[0];
    let mut g = vec![Complex64::new(0.0, 0.0); l_max + 1];
    for k in 1..=l_max {
        let terms: Vec<Complex64> = (1..k).map(|j| g[j] * coeffs[k - j] * j as f64).collect();
        g[k] = (coeffs[k] * k as f64 - pairwise_sum_c(&terms)) / (a0 * k as f64);
    }
    let sums = (1..=l_max)
        .map(|l| {
            let wl = w.get(l - 1).copied().unwrap_or_default();
            -(g[l] - wl) * l as f64
        })
        .collect();
    Ok(PowerSums {
        sums,
        precision_warning: a0.norm() < 1e-12,
    })
}

/// Keeps the zeros with `|z_j| <= R_cut` as plain factors and folds their
/// primary-factor polynomials into `W`. The genus is unchanged; on genus-0
/// input this is plain truncation.
pub fn finite_order_reduce(f: &FiniteOrderFunction, r_cut: f64) -> Result<FiniteOrderFunction> {
    if r_cut.is_nan() || r_cut <= 0.0 {
        return Err(Error::invalid(format!("R_cut must be positive, got {r_cut}")));
    }
    Ok(absorb_zeros(f, r_cut))
}

/// Behaviour of `Re W(r e^{i phi})` as `r -> infinity` along one ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaySign {
    PlusInfinity,
    MinusInfinity,
    Bounded,
}

impl RaySign {
    pub fn as_str(&self) -> &'static str {
        match self {
            RaySign::PlusInfinity => "plus_infinity",
            RaySign::MinusInfinity => "minus_infinity",
            RaySign::Bounded => "bounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineGrowth {
    /// Ray `r e^{i theta}`, `r > 0`.
    pub positive_ray: RaySign,
    /// Ray `r e^{i (theta + pi)}`, `r > 0`.
    pub negative_ray: RaySign,
    /// The input polynomial was identically zero.
    pub zero_polynomial: bool,
}

fn ray_sign(w: &[Complex64], phi: f64) -> RaySign {
    for (k, c) in w.iter().enumerate().rev() {
        let power = (k + 1) as f64;
        let re = (c * Complex64::from_polar(1.0, power * phi)).re;
        // Roundoff in e^{i k phi} is not a genuine real part.
        if re.abs() > 1e-12 * c.norm() {
            return if re > 0.0 {
                RaySign::PlusInfinity
            } else {
                RaySign::MinusInfinity
            };
        }
    }
    RaySign::Bounded
}

/// Sign of `Re W` at infinity along both rays of the line through 0 at
/// angle `theta`. `w[k-1]` is the coefficient of `z^k`; the highest power
/// with a nonvanishing real contribution decides each ray.
pub fn line_growth_sign(w: &[Complex64], theta: f64) -> Result<LineGrowth> {
    if !theta.is_finite() || w.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::invalid("angle and coefficients must be finite"));
    }
    Ok(LineGrowth {
        positive_ray: ray_sign(w, theta),
        negative_ray: ray_sign(w, theta + std::f64::consts::PI),
        zero_polynomial: w.iter().all(|c| c.norm() == 0.0),
    })
}

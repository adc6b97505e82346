//! Circle growth indicators: the geometric mean `C(f,R)` (as its logarithm),
//! the maximum modulus `||f||_R`, and a winding-number zero count.
//!
//! All three work on the circle `|z| = R` only. The maximum over the disk is
//! attained on the boundary, so no interior point is ever sampled.

use crate::efun::{FiniteOrderFunction, ZeroEntry};
use crate::error::{Error, Result};
use crate::numeric::{is_power_of_two, pairwise_sum, periodic_max, wrap_angle};
use crate::report::{csv_table, fmt_f64};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, TAU};

pub const DEFAULT_NODES: usize = 4096;
pub const MAX_NODES: usize = 1 << 20;
const MIN_NODES: usize = 64;
const MIN_SUP_SAMPLES: usize = 256;
/// Grid offsets, in units of the node spacing, tried in order when a node
/// lands on a zero.
const ROTATIONS: [f64; 4] = [0.0, 0.5, 0.25, 0.75];
const PARALLEL_THRESHOLD: usize = 1 << 13;

/// Equal-weight trapezoid rule on a circle.
///
/// Zeros whose modulus lies within `ring_band * R` of the radius are taken
/// out of the integrand and contribute their exact circle mean
/// `log+(R/|z_j|)`; everything else is integrated numerically. A band of 0
/// leaves every zero to the quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleQuadrature {
    nodes: usize,
    ring_band: f64,
    tolerance: f64,
}

impl Default for CircleQuadrature {
    fn default() -> Self {
        CircleQuadrature {
            nodes: DEFAULT_NODES,
            ring_band: 0.01,
            tolerance: 1e-12,
        }
    }
}

impl CircleQuadrature {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES || !is_power_of_two(nodes) || nodes > MAX_NODES {
            return Err(Error::invalid(format!(
                "quadrature nodes must be a power of two in [{MIN_NODES}, {MAX_NODES}], got {nodes}"
            )));
        }
        Ok(CircleQuadrature {
            nodes,
            ..Default::default()
        })
    }

    pub fn with_ring_band(mut self, band: f64) -> Result<Self> {
        if !(band.is_finite() && (0.0..0.5).contains(&band)) {
            return Err(Error::invalid(format!("ring band must lie in [0, 0.5), got {band}")));
        }
        self.ring_band = band;
        Ok(self)
    }

    /// Target for `|I_N - I_{N/2}|`, relative to `max(1, |I_N|)`.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
        }
        self.tolerance = tol;
        Ok(self)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn ring_band(&self) -> f64 {
        self.ring_band
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// Outcome of [`log_mean`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMean {
    /// `log C(f,R)`.
    pub value: f64,
    pub nodes_used: usize,
    /// Grid offset (in node spacings) that avoided every zero.
    pub offset: f64,
    /// `|I_N - I_{N/2}|` at the final node count.
    pub achieved_error: f64,
    /// Zeros (with multiplicity) whose circle mean was taken in closed form.
    pub ring_zeros: u64,
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "radius must be positive and finite, got {radius}"
        )))
    }
}

fn log_abs_on_circle(f: &FiniteOrderFunction, radius: f64, ts: &[f64]) -> Vec<f64> {
    let eval = |t: &f64| f.eval(Complex64::from_polar(radius, *t)).log_abs;
    if ts.len() >= PARALLEL_THRESHOLD {
        ts.par_iter().map(eval).collect()
    } else {
        ts.iter().map(eval).collect()
    }
}

/// `(1/2pi) * integral of log|f(R e^{it})| dt`.
///
/// Starts at `q.nodes()` and doubles (reusing earlier nodes) until the
/// halved-grid estimate agrees to the quadrature tolerance or `2^20` nodes
/// are reached; the last difference is reported either way.
pub fn log_mean(f: &FiniteOrderFunction, radius: f64, q: &CircleQuadrature) -> Result<LogMean> {
    check_radius(radius)?;
    if f.is_identically_zero() {
        return Err(Error::Degenerate("log mean of the zero function is -inf".into()));
    }
    let band = q.ring_band * radius;
    let on_ring = |z: &ZeroEntry| q.ring_band > 0.0 && (z.modulus() - radius).abs() <= band;
    let (reduced, ring) = f.split_zeros(on_ring);
    let ring_terms: Vec<f64> = ring
        .iter()
        .map(|z| z.multiplicity() as f64 * (radius / z.modulus()).ln().max(0.0))
        .collect();
    let ring_mean = pairwise_sum(&ring_terms);
    let ring_zeros = ring.iter().map(|z| z.multiplicity() as u64).sum();

    for &offset in ROTATIONS.iter() {
        if let Some(mut out) = trapezoid(&reduced, radius, q, offset) {
            out.value += ring_mean;
            out.ring_zeros = ring_zeros;
            return Ok(out);
        }
    }
    Err(Error::SingularNode {
        radius,
        rotations: ROTATIONS.len() - 1,
    })
}

/// Returns `None` as soon as some node evaluates to `-inf`.
fn trapezoid(f: &FiniteOrderFunction, radius: f64, q: &CircleQuadrature, offset: f64) -> Option<LogMean> {
    let mut n = q.nodes;
    let h = TAU / n as f64;
    let ts: Vec<f64> = (0..n).map(|k| (k as f64 + offset) * h).collect();
    let vals = log_abs_on_circle(f, radius, &ts);
    if vals.contains(&f64::NEG_INFINITY) {
        return None;
    }
    // Even-indexed nodes form the halved grid.
    let evens: Vec<f64> = vals.iter().step_by(2).copied().collect();
    let mut sum = pairwise_sum(&vals);
    let mut estimate = sum / n as f64;
    let mut error = (estimate - pairwise_sum(&evens) / (n / 2) as f64).abs();
    while error > q.tolerance * estimate.abs().max(1.0) && n < MAX_NODES {
        let h = TAU / n as f64;
        let mids: Vec<f64> = (0..n).map(|k| (k as f64 + offset + 0.5) * h).collect();
        let new_vals = log_abs_on_circle(f, radius, &mids);
        if new_vals.contains(&f64::NEG_INFINITY) {
            return None;
        }
        let previous = sum / n as f64;
        sum += pairwise_sum(&new_vals);
        n *= 2;
        estimate = sum / n as f64;
        error = (estimate - previous).abs();
    }
    Some(LogMean {
        value: estimate,
        nodes_used: n,
        offset,
        achieved_error: error,
        ring_zeros: 0,
    })
}

/// Outcome of [`sup_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNorm {
    /// `||f||_R` (may be `inf` when only the logarithm is representable).
    pub value: f64,
    pub log_value: f64,
    /// Angle of the maximiser.
    pub argmax: f64,
    /// One-sided bound: the true maximum is at most `value + error_bound`.
    pub error_bound: f64,
}

/// Maximum of `|f|` on `|z| = R` by dense sampling of `log|f|` and
/// golden-section refinement around the best samples.
///
/// The error bound uses a global Lipschitz constant `L` for `t -> log|f|`
/// derived from the zero data: a maximiser lies within half a sample
/// spacing `h` of some sample, so `max <= sampled * exp(L h / 2)`.
pub fn sup_norm(f: &FiniteOrderFunction, radius: f64, samples: usize) -> Result<SupNorm> {
    check_radius(radius)?;
    if samples < MIN_SUP_SAMPLES {
        return Err(Error::invalid(format!(
            "sup_norm needs at least {MIN_SUP_SAMPLES} samples, got {samples}"
        )));
    }
    if f.is_identically_zero() {
        return Ok(SupNorm {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
            argmax: 0.0,
            error_bound: 0.0,
        });
    }
    let (argmax, log_value) = periodic_max(|t| f.eval(Complex64::from_polar(radius, t)).log_abs, samples, 8, 1e-12);
    let value = log_value.exp();
    let lipschitz = log_lipschitz(f, radius);
    let h = TAU / samples as f64;
    let error_bound = if lipschitz.is_finite() {
        value * (lipschitz * h / 2.0).exp_m1()
    } else {
        f64::INFINITY
    };
    Ok(SupNorm {
        value,
        log_value,
        argmax,
        error_bound,
    })
}

/// Upper bound for `|d/dt log|f(R e^{it})||` over the whole circle, from
/// `|z f'/f| <= m + R|W'| + sum mult R (R/|z_j|)^p / ||z_j| - R|`.
fn log_lipschitz(f: &FiniteOrderFunction, radius: f64) -> f64 {
    let mut bound = f.origin_mult() as f64;
    let mut rk = radius;
    for (k, c) in f.expoly().iter().enumerate() {
        bound += (k + 1) as f64 * c.norm() * rk;
        rk *= radius;
    }
    let p = f.factor_degree() as i32;
    let terms: Vec<f64> = f
        .zeros()
        .iter()
        .map(|z| {
            let gap = (z.modulus() - radius).abs();
            z.multiplicity() as f64 * radius * (radius / z.modulus()).powi(p) / gap
        })
        .collect();
    bound + pairwise_sum(&terms)
}

/// Outcome of [`argument_principle_count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArgumentCount {
    /// Winding number of `f` around 0 along `|z| = R`.
    pub total: u64,
    /// `total` minus the origin multiplicity; comparable with `eta(f,R)`.
    pub eta_comparable: u64,
    pub nodes_used: usize,
}

/// Zero count inside `|z| < R` by phase accrual, doubling the grid until
/// every phase increment is below `pi/2`.
pub fn argument_principle_count(f: &FiniteOrderFunction, radius: f64, q: &CircleQuadrature) -> Result<ArgumentCount> {
    check_radius(radius)?;
    if f.is_identically_zero() {
        return Err(Error::Degenerate("winding number of the zero function".into()));
    }
    if let Some(z) = f.zeros().iter().find(|z| (z.modulus() - radius).abs() <= 1e-6 * radius) {
        return Err(Error::ZeroOnContour(format!(
            "zero {} lies within 1e-6 R of |z| = {radius}",
            z.location()
        )));
    }
    let mut n = q.nodes;
    loop {
        let ts: Vec<f64> = (0..n).map(|k| k as f64 * TAU / n as f64).collect();
        let args: Vec<f64> = if n >= PARALLEL_THRESHOLD {
            ts.par_iter()
                .map(|t| f.eval(Complex64::from_polar(radius, *t)).arg)
                .collect()
        } else {
            ts.iter()
                .map(|t| f.eval(Complex64::from_polar(radius, *t)).arg)
                .collect()
        };
        let increments: Vec<f64> = (0..n).map(|k| wrap_angle(args[(k + 1) % n] - args[k])).collect();
        let largest = increments.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let winding = pairwise_sum(&increments) / TAU;
        let rounded = winding.round();
        if largest < FRAC_PI_2 && (winding - rounded).abs() < 1e-6 {
            if rounded < 0.0 {
                return Err(Error::NonConvergence {
                    op: "argument_principle_count",
                    detail: format!("negative winding number {rounded}"),
                });
            }
            let total = rounded as u64;
            return Ok(ArgumentCount {
                total,
                eta_comparable: total.saturating_sub(f.origin_mult() as u64),
                nodes_used: n,
            });
        }
        if n >= MAX_NODES {
            return Err(Error::NonConvergence {
                op: "argument_principle_count",
                detail: format!("largest phase step {largest:.3} rad at {n} nodes"),
            });
        }
        n *= 2;
    }
}

/// One report row: `(R, log C(f,R), ||f||_R, eta(f,R))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthIndicators {
    pub radius: f64,
    pub log_mean: f64,
    pub sup_norm: f64,
    pub zero_count: u64,
}

pub fn indicators(
    f: &FiniteOrderFunction,
    radius: f64,
    q: &CircleQuadrature,
    sup_samples: usize,
) -> Result<GrowthIndicators> {
    let lm = log_mean(f, radius, q)?;
    let sup = sup_norm(f, radius, sup_samples)?;
    Ok(GrowthIndicators {
        radius,
        log_mean: lm.value,
        sup_norm: sup.value,
        zero_count: f.zero_count(radius),
    })
}

pub const CSV_HEADER: [&str; 4] = ["R", "log_mean", "sup_norm", "eta"];

pub fn indicators_csv(rows: &[GrowthIndicators]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.radius),
                fmt_f64(r.log_mean),
                fmt_f64(r.sup_norm),
                r.zero_count.to_string(),
            ]
        })
        .collect();
    csv_table(&CSV_HEADER, &cells)
}

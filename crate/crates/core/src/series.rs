//! Grouped power series `s(z) = sum_n z^{k_n} P_n(z)`: partial sums, the
//! uniform-convergence region from capacity-type constants, and a desk-scale
//! check that pointwise convergence on a large set upgrades to uniform
//! convergence on compacts.

use crate::efun::FiniteOrderFunction;
use crate::error::{Error, Result};
use crate::growth::{sup_norm, CircleQuadrature};
use crate::numeric::{pairwise_sum_c, trailing_window};
use crate::potential::ThinnessVerdict;
use crate::seqlab::SequenceSpec;
use num_complex::Complex64;
use rayon::prelude::*;

/// Log-magnitude above which a term is not reconstructed.
pub const OVERFLOW_LOG: f64 = 700.0;
/// Number of trailing term magnitudes kept for diagnostics.
pub const TAIL_TREND_LEN: usize = 10;

/// `sum_n z^{k_n} P_n(z)` with integer exponents `1 <= k_1 < k_2 < ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSeries {
    spec: SequenceSpec,
    exponents: Vec<u32>,
}

impl GroupedSeries {
    pub fn new(functions: Vec<FiniteOrderFunction>, exponents: Vec<u32>, r_grid: Vec<f64>) -> Result<Self> {
        let k = exponents.iter().map(|&e| e as f64).collect();
        Self::from_spec(SequenceSpec::new(functions, k, r_grid, None)?)
    }

    /// Uses the normalisers of `spec` as exponents; they must be strictly
    /// increasing integers.
    pub fn from_spec(spec: SequenceSpec) -> Result<Self> {
        let mut exponents = Vec::with_capacity(spec.len());
        for &k in spec.k() {
            if k.fract() != 0.0 || k < 1.0 || k > u32::MAX as f64 {
                return Err(Error::invalid(format!("series exponent {k} is not a positive integer")));
            }
            exponents.push(k as u32);
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("series exponents must be strictly increasing"));
        }
        Ok(GroupedSeries { spec, exponents })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// `Q_n = z^{k_n} P_n`, zero-based.
    pub fn term(&self, i: usize) -> FiniteOrderFunction {
        self.spec.functions()[i].times_monomial(self.exponents[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialSum {
    /// `None` once any term overflowed.
    pub value: Option<Complex64>,
    /// `log|z^{k_n} P_n(z)|` for `n = 1..=N`.
    pub term_log_magnitudes: Vec<f64>,
    /// The last (up to) ten term magnitudes.
    pub tail_trend: Vec<f64>,
    pub overflow: bool,
    /// Trailing magnitudes are nondecreasing and at least one.
    pub divergence: bool,
}

/// `sum_{n <= N} z^{k_n} P_n(z)`.
pub fn partial_sum(s: &GroupedSeries, z: Complex64, n_terms: usize) -> Result<PartialSum> {
    if n_terms > s.len() {
        return Err(Error::invalid(format!(
            "asked for {n_terms} terms, series has {}",
            s.len()
        )));
    }
    let (terms, logs) = term_values(s, z, n_terms);
    let overflow = terms.iter().any(Option::is_none);
    let value = if overflow {
        None
    } else {
        Some(pairwise_sum_c(&terms.iter().flatten().copied().collect::<Vec<_>>()))
    };
    let tail_trend: Vec<f64> = logs[n_terms.saturating_sub(TAIL_TREND_LEN)..]
        .iter()
        .map(|l| l.exp())
        .collect();
    let divergence = overflow
        || (tail_trend.len() >= 3
            && tail_trend.windows(2).all(|w| w[1] >= w[0])
            && tail_trend.last().is_some_and(|&m| m >= 1.0));
    Ok(PartialSum {
        value,
        term_log_magnitudes: logs,
        tail_trend,
        overflow,
        divergence,
    })
}

fn term_values(s: &GroupedSeries, z: Complex64, n_terms: usize) -> (Vec<Option<Complex64>>, Vec<f64>) {
    (0..n_terms)
        .map(|i| {
            if z.norm() == 0.0 {
                // Every exponent is at least one.
                return (Some(Complex64::new(0.0, 0.0)), f64::NEG_INFINITY);
            }
            let e = s.term(i).eval(z);
            if e.log_abs > OVERFLOW_LOG {
                (None, e.log_abs)
            } else {
                (Some(e.value.unwrap_or_else(|| e.log_value().exp())), e.log_abs)
            }
        })
        .unzip()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionRadius {
    Finite(f64),
    /// The whole plane.
    Infinite,
    /// No region is guaranteed.
    Empty,
}

/// Disk `|z - z_0| < radius` of guaranteed uniform convergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRegion {
    pub center: Complex64,
    pub radius: RegionRadius,
}

impl ConvergenceRegion {
    pub fn contains(&self, z: Complex64) -> bool {
        match self.radius {
            RegionRadius::Finite(r) => (z - self.center).norm() < r,
            RegionRadius::Infinite => true,
            RegionRadius::Empty => false,
        }
    }
}

/// Radius `rho0 (C^{-beta/gamma} - 1)` about `z0`, the whole plane when
/// `gamma = 0` (or `C = 0`), empty when `C >= 1`.
pub fn convergence_region(c: f64, beta: f64, gamma: f64, z0: Complex64, rho0: f64) -> Result<ConvergenceRegion> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::invalid(format!("C must be finite and nonnegative, got {c}")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(format!("beta must be positive, got {beta}")));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::invalid(format!("gamma must be nonnegative, got {gamma}")));
    }
    if !(rho0.is_finite() && rho0 > 0.0) {
        return Err(Error::invalid(format!("rho0 must be positive, got {rho0}")));
    }
    if !(z0.re.is_finite() && z0.im.is_finite()) {
        return Err(Error::invalid("centre must be finite"));
    }
    let radius = if c >= 1.0 {
        RegionRadius::Empty
    } else if gamma == 0.0 || c == 0.0 {
        RegionRadius::Infinite
    } else {
        let r = rho0 * (-(beta / gamma) * c.ln()).exp_m1();
        if r.is_finite() {
            RegionRadius::Finite(r)
        } else {
            RegionRadius::Infinite
        }
    };
    Ok(ConvergenceRegion { center: z0, radius })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    /// Slack on the `1/(2k_n)`-power scale.
    pub tol: f64,
    /// Relative Cauchy gap accepted as pointwise convergence.
    pub cauchy_tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            tol: 0.05,
            cauchy_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleEvidence {
    pub z: Complex64,
    /// Max over the trailing window of `|Q_n(z)|^{1/(2k_n)}`.
    pub root_max: f64,
    /// `max |S_N - S_j| / max(1, |S_N|)` over the last quarter of `j`.
    pub cauchy_gap: f64,
    pub converges: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeRow {
    pub n: usize,
    pub k: u32,
    pub d_star: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformRow {
    pub n: usize,
    pub radius: f64,
    /// `||P_n||_R^{1/(2k_n)}`.
    pub p_root: f64,
    /// `R^{-1/2} + tol`.
    pub bound: f64,
    /// `||Q_n||_R^{1/(2k_n)}`.
    pub q_root: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    /// Pointwise hypothesis on the samples plus the transferred tail conditions.
    pub stage_a: bool,
    pub samples: Vec<SampleEvidence>,
    /// Window max of `|sum_{|z| >= R} 1/z| / (2k_n)` at the largest grid radius.
    pub first_moment_tail: f64,
    /// Window max of `eta(Q_n, R) / (2k_n)` at the largest grid radius.
    pub eta_ratio: f64,
    /// The samples cannot witness a set that is large at infinity.
    pub e_sample_insufficient: bool,
    pub stage_b: bool,
    pub degrees: Vec<DegreeRow>,
    pub stage_c: bool,
    pub uniform: Vec<UniformRow>,
    /// `(R, ||Q_n||_R^{1/(2k_n)}` nonincreasing over the window and ending below `tol`).
    pub q_decay: Vec<(f64, bool)>,
    pub caveat: String,
}

/// Runs the three stages on `Q_n = z^{k_n} P_n` with normalisers `2k_n`:
/// (a) pointwise evidence on `e_samples`, (b) `k_n >= d*(P_n)`, (c) the
/// sup-norm chain on the series' R grid. The quadrature's node count sets
/// the sup-norm sampling. A supplied thinness verdict for the sample set
/// overrides the dyadic-spread heuristic for `e_sample_insufficient`.
pub fn pointwise_to_uniform_check(
    s: &GroupedSeries,
    e_samples: &[Complex64],
    q: &CircleQuadrature,
    thinness: Option<ThinnessVerdict>,
    cfg: &CheckConfig,
) -> Result<UniformityReport> {
    if e_samples.is_empty() {
        return Err(Error::invalid("need at least one sample point"));
    }
    if e_samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::invalid("sample points must be finite"));
    }
    if s.len() < 8 {
        return Err(Error::invalid(format!("need at least 8 terms, got {}", s.len())));
    }
    let n_total = s.len();
    let window = trailing_window(n_total);
    let two_k: Vec<f64> = s.exponents().iter().map(|&k| 2.0 * k as f64).collect();

    let samples: Vec<SampleEvidence> = e_samples
        .par_iter()
        .map(|&z| {
            let (terms, logs) = term_values(s, z, n_total);
            let root_max = window.clone().map(|i| (logs[i] / two_k[i]).exp()).fold(0.0, f64::max);
            let (cauchy_gap, converges) = if terms.iter().any(Option::is_none) {
                (f64::INFINITY, false)
            } else {
                let vals: Vec<Complex64> = terms.into_iter().flatten().collect();
                let mut partial = Vec::with_capacity(n_total);
                let mut acc = Complex64::new(0.0, 0.0);
                for v in &vals {
                    acc += v;
                    partial.push(acc);
                }
                let last = partial[n_total - 1];
                let start = n_total - (n_total / 4).max(1);
                let gap = partial[start..].iter().map(|p| (last - p).norm()).fold(0.0, f64::max) / last.norm().max(1.0);
                (gap, gap <= cfg.cauchy_tol)
            };
            SampleEvidence {
                z,
                root_max,
                cauchy_gap,
                converges,
            }
        })
        .collect();

    let r_top = *s.spec().r_grid().last().expect("grid is nonempty");
    let mut first_moment_tail: f64 = 0.0;
    let mut eta_ratio: f64 = 0.0;
    for i in window.clone() {
        let q_n = s.term(i);
        let tail: Vec<Complex64> = q_n
            .zeros()
            .iter()
            .filter(|z| z.modulus() >= r_top)
            .map(|z| z.multiplicity() as f64 / z.location())
            .collect();
        first_moment_tail = first_moment_tail.max(pairwise_sum_c(&tail).norm() / two_k[i]);
        eta_ratio = eta_ratio.max(q_n.zero_count(r_top) as f64 / two_k[i]);
    }
    let stage_a = samples.iter().all(|e| e.converges && e.root_max <= 1.0 + cfg.tol) && first_moment_tail <= cfg.tol;
    let e_sample_insufficient = match thinness {
        Some(ThinnessVerdict::NonthinTrend) => false,
        Some(ThinnessVerdict::ThinTrend) => true,
        _ => dyadic_spread(e_samples) < 2,
    };

    let degrees: Vec<DegreeRow> = s
        .spec()
        .functions()
        .iter()
        .zip(s.exponents())
        .enumerate()
        .map(|(i, (f, &k))| {
            let d_star = f.hadamard_degree();
            DegreeRow {
                n: i + 1,
                k,
                d_star,
                ok: k as f64 >= d_star,
            }
        })
        .collect();
    let stage_b = degrees.iter().all(|d| d.ok);

    let grid = s.spec().r_grid();
    let jobs: Vec<(usize, f64)> = window.clone().flat_map(|i| grid.iter().map(move |&r| (i, r))).collect();
    let uniform: Vec<UniformRow> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let p = sup_norm(&s.spec().functions()[i], r, q.nodes())?;
            let qs = sup_norm(&s.term(i), r, q.nodes())?;
            let p_root = (p.log_value / two_k[i]).exp();
            let bound = r.powf(-0.5) + cfg.tol;
            Ok(UniformRow {
                n: i + 1,
                radius: r,
                p_root,
                bound,
                q_root: (qs.log_value / two_k[i]).exp(),
                ok: p_root <= bound,
            })
        })
        .collect::<Result<_>>()?;
    let q_decay: Vec<(f64, bool)> = grid
        .iter()
        .map(|&r| {
            let seq: Vec<f64> = uniform.iter().filter(|u| u.radius == r).map(|u| u.q_root).collect();
            let monotone = seq.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
            (r, monotone && seq.last().is_some_and(|&v| v <= cfg.tol))
        })
        .collect();
    let stage_c = uniform.iter().all(|u| u.ok) && q_decay.iter().all(|(_, d)| *d);

    Ok(UniformityReport {
        stage_a,
        samples,
        first_moment_tail,
        eta_ratio,
        e_sample_insufficient,
        stage_b,
        degrees,
        stage_c,
        uniform,
        q_decay,
        caveat: format!(
            "desk-scale evidence on {} samples over n = {}..={} of N = {}; finitely many samples never establish non-thinness",
            e_samples.len(),
            window.start + 1,
            window.end,
            n_total
        ),
    })
}

/// Number of distinct dyadic annuli `2^j < |z| <= 2^{j+1}`, `j >= 0`, hit by
/// the samples.
fn dyadic_spread(samples: &[Complex64]) -> usize {
    let mut shells: Vec<i64> = samples
        .iter()
        .filter(|z| z.norm() > 1.0)
        .map(|z| z.norm().log2().ceil() as i64)
        .collect();
    shells.sort_unstable();
    shells.dedup();
    shells.len()
}

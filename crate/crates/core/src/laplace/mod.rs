//! Truncated Laplace transforms `Phi_n(z) = int_0^n e^{zt} phi(t) dt` of
//! real kernels vanishing on `t <= 0`: evaluation, support parameters, zeros,
//! the first-moment identity and the zero-tail conditions that rule out
//! locally uniform convergence of `Phi_n`.

mod kernel;
mod zeros;

pub use kernel::{support_params, Kernel, KernelRepr, SupportParams, OVERFLOW_EXPONENT};
pub use zeros::{
    moment_identity_residual, zeros_in_disk, MomentIdentity, TransformZeroData, MAX_DEPTH, MOMENT_SEARCH_TOL,
    NEWTON_STEPS, NEWTON_TOL,
};

use crate::error::{Error, Result};
use crate::numeric::{linear_fit, pairwise_sum, pairwise_sum_c, trailing_window};
use crate::seqlab::{trend, ClassifierConfig, TailTrend};
use num_complex::Complex64;

/// The three zero-tail sums at one `(n, R)`, each divided by `mu_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstructionRow {
    /// One-based index into the sequence.
    pub n: usize,
    pub radius: f64,
    /// `sum_{|z| >= R} |Re(1/z)|`.
    pub cond1: f64,
    /// `|sum_{|z| >= R} 1/z|`.
    pub cond2: f64,
    /// `sum_{|z| >= R} 1/|z|^q`.
    pub cond3: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub q: f64,
    pub rows: Vec<ObstructionRow>,
    /// Trends in `n` per condition (`power` holds the condition number) and radius.
    pub trends: Vec<TailTrend>,
    /// Condition 1 extrapolates below `tol_inf` at every radius.
    pub cond1_bounded: bool,
    /// Condition 2 is zero, or strictly decreasing in `R` with a negative
    /// log-log slope.
    pub cond2_vanishes: bool,
    pub cond3_bounded: bool,
    /// All three patterns hold: evidence (not proof) that `Phi_n` has no
    /// nonzero locally uniform limit.
    pub pattern_holds: bool,
    pub caveat: String,
}

/// Evaluates the three zero-tail conditions for a sequence of truncations.
pub fn obstruction_conditions(
    seq: &[TransformZeroData],
    mu: &[f64],
    q: f64,
    r_grid: &[f64],
    cfg: &ClassifierConfig,
) -> Result<ObstructionReport> {
    if seq.len() != mu.len() || seq.is_empty() {
        return Err(Error::invalid("need one mu_n per zero set, at least one"));
    }
    if mu.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(Error::invalid("every mu_n must be positive"));
    }
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::invalid(format!("q must lie in (1, 2), got {q}")));
    }
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[0] >= w[1]) || r_grid[0] <= 0.0 {
        return Err(Error::invalid(
            "R grid must be nonempty, positive and strictly increasing",
        ));
    }
    let mut rows = Vec::with_capacity(seq.len() * r_grid.len());
    for (i, (data, m)) in seq.iter().zip(mu).enumerate() {
        for &r in r_grid {
            let tail: Vec<(Complex64, f64)> = data
                .zeros
                .iter()
                .filter(|z| z.modulus() >= r)
                .map(|z| (1.0 / z.location(), z.multiplicity() as f64))
                .collect();
            let c1: Vec<f64> = tail.iter().map(|(w, k)| k * w.re.abs()).collect();
            let c2: Vec<Complex64> = tail.iter().map(|(w, k)| w * k).collect();
            let c3: Vec<f64> = tail.iter().map(|(w, k)| k * w.norm().powf(q)).collect();
            rows.push(ObstructionRow {
                n: i + 1,
                radius: r,
                cond1: pairwise_sum(&c1) / m,
                cond2: pairwise_sum_c(&c2).norm() / m,
                cond3: pairwise_sum(&c3) / m,
            });
        }
    }
    let window = trailing_window(seq.len());
    let horizon = cfg.horizon_factor * seq.len() as f64;
    let nr = r_grid.len();
    let mut trends = Vec::with_capacity(3 * nr);
    for cond in 1..=3u32 {
        for (ri, &r) in r_grid.iter().enumerate() {
            let series: Vec<f64> = (0..seq.len())
                .map(|i| {
                    let row = &rows[i * nr + ri];
                    match cond {
                        1 => row.cond1,
                        2 => row.cond2,
                        _ => row.cond3,
                    }
                })
                .collect();
            trends.push(trend(&series, window.clone(), horizon, r, cond));
        }
    }
    let of = |cond: usize| &trends[(cond - 1) * nr..cond * nr];
    let bounded = |cond: usize| of(cond).iter().all(|t| t.extrapolated <= cfg.tol_inf);
    let cond1_bounded = bounded(1);
    let cond3_bounded = bounded(3);
    let c2: Vec<f64> = of(2).iter().map(|t| t.extrapolated).collect();
    let cond2_vanishes = c2.iter().all(|v| *v == 0.0) || {
        let decreasing = c2.windows(2).all(|w| w[1] < w[0]);
        let (xs, ys): (Vec<f64>, Vec<f64>) = r_grid
            .iter()
            .zip(&c2)
            .filter(|(_, v)| **v > 0.0)
            .map(|(r, v)| (r.ln(), v.ln()))
            .unzip();
        decreasing && linear_fit(&xs, &ys).is_some_and(|(s, _)| s < 0.0)
    };
    Ok(ObstructionReport {
        q,
        rows,
        trends,
        cond1_bounded,
        cond2_vanishes,
        cond3_bounded,
        pattern_holds: cond1_bounded && cond2_vanishes && cond3_bounded,
        caveat: format!(
            "finite-sample evidence: limsup over n = {}..={} of N = {}, R-limit read from the grid",
            window.start + 1,
            window.end,
            seq.len()
        ),
    })
}

//! Logarithmic capacity of plane sets given as point clouds, the capacity
//! growth exponent `beta`, and a dyadic Wiener-type thinness probe.
//!
//! Capacity is normalised as the transfinite diameter: a disk of radius `r`
//! has capacity `r`, a segment of length `L` has capacity `L/4`.

use crate::error::{Error, Result};
use crate::numeric::{linear_fit, pairwise_sum, trailing_window};
use num_complex::Complex64;
use rayon::prelude::*;

/// Points closer than this (relative to the cloud scale) are merged.
const DEDUP_TOL: f64 = 1e-14;
/// Relative slack under which two greedy scores count as tied.
const TIE_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_N: usize = 64;

/// A finite sample of a plane set; points are distinct, order is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Complex64>,
    label: String,
}

impl PointCloud {
    /// Drops later copies of points within `1e-14 * max(1, max|p|)` of an
    /// earlier point.
    pub fn new(points: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("point cloud is empty"));
        }
        if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::invalid("point cloud contains a non-finite point"));
        }
        let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
        let tol = DEDUP_TOL * scale;
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].re.total_cmp(&points[b].re).then(a.cmp(&b)));
        let mut keep = vec![true; points.len()];
        for (pos, &i) in order.iter().enumerate() {
            for &j in order[..pos].iter().rev() {
                if points[i].re - points[j].re > tol {
                    break;
                }
                if keep[j] && (points[i] - points[j]).norm() <= tol {
                    // The earlier index survives.
                    if j < i {
                        keep[i] = false;
                    } else {
                        keep[j] = false;
                    }
                    break;
                }
            }
        }
        let points = points
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(p, _)| p)
            .collect();
        Ok(PointCloud {
            points,
            label: label.into(),
        })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `c * cloud + w`.
    pub fn affine(&self, c: Complex64, w: Complex64) -> Result<PointCloud> {
        PointCloud::new(self.points.iter().map(|p| c * p + w).collect(), self.label.clone())
    }

    /// `n = min(64, |cloud|/4)`, at least 2.
    pub fn default_n(&self) -> usize {
        (self.len() / 4).clamp(2, DEFAULT_MAX_N)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityEstimate {
    pub n_used: usize,
    pub leja_points: Vec<Complex64>,
    /// Indices of the Leja points in the cloud.
    pub leja_indices: Vec<usize>,
    /// `d_n = (prod_{i<j} |p_i - p_j|)^{2/(n(n-1))}`.
    pub diameter: f64,
    /// `d_n * n^{-1/(n-1)}`; exact for equispaced points on a circle, where
    /// `d_n = n^{1/(n-1)} r`.
    pub cap: f64,
}

/// Greedy Leja selection of `n` cloud points. The first point is the one
/// farthest from the centroid; each next maximises the sum of log
/// distances to those chosen. Near-ties go to the smallest index.
pub fn leja_indices(cloud: &PointCloud, n: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    let pts = cloud.points();
    if pts.len() < 2 {
        return Err(Error::Degenerate(format!(
            "cloud '{}' has a single distinct point; its capacity is 0",
            cloud.label
        )));
    }
    if n < 2 || n > pts.len() {
        return Err(Error::invalid(format!(
            "need 2 <= n <= |cloud| = {}, got n = {n}",
            pts.len()
        )));
    }
    let centroid = pts.iter().sum::<Complex64>() / pts.len() as f64;
    let spread: Vec<f64> = pts.iter().map(|p| (p - centroid).norm()).collect();
    let first = argmax_with_ties(&spread, &vec![false; pts.len()]);
    let mut chosen = vec![first];
    let mut taken = vec![false; pts.len()];
    taken[first] = true;
    let mut score = vec![0.0f64; pts.len()];
    // Sum of log distances from each new point to its predecessors.
    let mut step_logs = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let last = pts[*chosen.last().expect("nonempty")];
        for (s, p) in score.iter_mut().zip(pts) {
            *s += (p - last).norm().ln();
        }
        let next = argmax_with_ties(&score, &taken);
        step_logs.push(score[next]);
        chosen.push(next);
        taken[next] = true;
    }
    Ok((chosen, step_logs))
}

fn argmax_with_ties(values: &[f64], taken: &[bool]) -> usize {
    let best = values
        .iter()
        .zip(taken)
        .filter(|(_, t)| !**t)
        .map(|(v, _)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let slack = TIE_TOL * best.abs().max(1.0);
    values
        .iter()
        .zip(taken)
        .position(|(v, t)| !*t && *v >= best - slack)
        .expect("at least one untaken point")
}

pub fn capacity_estimate(cloud: &PointCloud, n: usize) -> Result<CapacityEstimate> {
    let (idx, step_logs) = leja_indices(cloud, n)?;
    let pairs = (n * (n - 1)) as f64 / 2.0;
    let log_prod = pairwise_sum(&step_logs);
    let diameter = (log_prod / pairs).exp();
    let cap = diameter * (n as f64).powf(-1.0 / (n as f64 - 1.0));
    Ok(CapacityEstimate {
        n_used: n,
        leja_points: idx.iter().map(|&i| cloud.points()[i]).collect(),
        leja_indices: idx,
        diameter,
        cap,
    })
}

/// One radius of a [`beta_exponent`] family.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaRow {
    pub radius: f64,
    /// `None` when `E_R` was empty or a single point.
    pub cap: Option<f64>,
    /// `log cap(E_R) / log R`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaEstimate {
    /// Least-squares slope of `log cap(E_R)` against `log R`.
    pub beta: f64,
    /// Max of `log cap/log R` over the trailing half of usable radii. This
    /// is biased by `log(const)/log R` at finite `R`.
    pub max_ratio: f64,
    pub rows: Vec<BetaRow>,
    /// Radii skipped because `E_R` had fewer than two points.
    pub skipped: Vec<f64>,
}

/// Growth exponent of `cap(E_R)` from clouds of `E_R = E ∩ {|z| <= R}`.
/// Each cloud uses `min(n, |cloud|)` Leja points.
pub fn beta_exponent(family: &[(f64, Option<PointCloud>)], n: usize) -> Result<BetaEstimate> {
    if family.len() < 4 {
        return Err(Error::invalid("beta estimate needs at least 4 radii"));
    }
    if family.iter().any(|(r, _)| !(r.is_finite() && *r > 1.0)) {
        return Err(Error::invalid("radii must be finite and > 1"));
    }
    if family.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    let rows: Vec<BetaRow> = family
        .par_iter()
        .map(|(r, cloud)| {
            let cap = match cloud {
                Some(c) if c.len() >= 2 => Some(capacity_estimate(c, n.min(c.len()))?.cap),
                _ => None,
            };
            Ok(BetaRow {
                radius: *r,
                cap,
                ratio: cap.map(|c| c.ln() / r.ln()),
            })
        })
        .collect::<Result<_>>()?;
    let usable: Vec<&BetaRow> = rows.iter().filter(|r| r.cap.is_some()).collect();
    let skipped = rows.iter().filter(|r| r.cap.is_none()).map(|r| r.radius).collect();
    let xs: Vec<f64> = usable.iter().map(|r| r.radius.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.cap.expect("usable").ln()).collect();
    let (beta, _) =
        linear_fit(&xs, &ys).ok_or_else(|| Error::Degenerate("fewer than two radii with a usable cloud".into()))?;
    let max_ratio = usable[trailing_window(usable.len())]
        .iter()
        .map(|r| r.ratio.expect("usable"))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BetaEstimate {
        beta,
        max_ratio,
        rows,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThinnessVerdict {
    NonthinTrend,
    ThinTrend,
    Inconclusive,
}

impl ThinnessVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThinnessVerdict::NonthinTrend => "nonthin_trend",
            ThinnessVerdict::ThinTrend => "thin_trend",
            ThinnessVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WienerTerm {
    pub depth: u32,
    /// Capacity of the annulus piece scaled by `2^-depth` (0 if empty or a point).
    pub cap: f64,
    pub term: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThinnessReport {
    pub partial_sums: Vec<WienerTerm>,
    pub verdict: ThinnessVerdict,
    /// Log-log slope of the cumulative sum against depth beyond depth 8.
    pub growth_exponent: Option<f64>,
}

const WIENER_EPS: f64 = 1e-12;
/// Depth after which the trend is read.
const TREND_START: u32 = 8;
/// Cumulative growth faster than `depth^1.2` counts as superlinear.
const SUPERLINEAR: f64 = 1.2;
/// Consecutive positive terms must shrink at least by this factor.
const GEOMETRIC_RATIO: f64 = 0.9;

/// Dyadic sum `sum_k k / log(1/cap_k)` where `cap_k` is the capacity of
/// `E ∩ {2^k <= |z| <= 2^{k+1}}` scaled by `2^{-k}`. `pieces[k-1]` holds the
/// piece at depth `k`; `None` or single-point pieces have capacity 0.
pub fn wiener_partial_sums(pieces: &[Option<PointCloud>], depth_max: u32) -> Result<ThinnessReport> {
    if depth_max == 0 || pieces.len() < depth_max as usize {
        return Err(Error::invalid(format!(
            "need annulus pieces for depths 1..={depth_max}, got {}",
            pieces.len()
        )));
    }
    let caps: Vec<f64> = pieces[..depth_max as usize]
        .par_iter()
        .enumerate()
        .map(|(i, piece)| match piece {
            Some(c) if c.len() >= 2 => {
                let scaled = c.affine(Complex64::new(0.5f64.powi(i as i32 + 1), 0.0), Complex64::new(0.0, 0.0))?;
                Ok(capacity_estimate(&scaled, scaled.default_n())?.cap)
            }
            _ => Ok(0.0),
        })
        .collect::<Result<_>>()?;
    let mut cumulative = 0.0;
    let partial_sums: Vec<WienerTerm> = caps
        .iter()
        .enumerate()
        .map(|(i, &cap)| {
            let depth = i as u32 + 1;
            let term = if cap == 0.0 {
                0.0
            } else {
                depth as f64 / (1.0 / cap).ln().max(WIENER_EPS)
            };
            cumulative += term;
            WienerTerm {
                depth,
                cap,
                term,
                cumulative,
            }
        })
        .collect();
    let (verdict, growth_exponent) = wiener_verdict(&partial_sums);
    Ok(ThinnessReport {
        partial_sums,
        verdict,
        growth_exponent,
    })
}

fn wiener_verdict(sums: &[WienerTerm]) -> (ThinnessVerdict, Option<f64>) {
    let tail: Vec<&WienerTerm> = sums.iter().filter(|t| t.depth >= TREND_START).collect();
    if tail.len() < 3 {
        return (ThinnessVerdict::Inconclusive, None);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = tail
        .iter()
        .filter(|t| t.cumulative > 0.0)
        .map(|t| ((t.depth as f64).ln(), t.cumulative.ln()))
        .unzip();
    let growth = linear_fit(&xs, &ys).map(|(s, _)| s);
    let decaying = tail
        .windows(2)
        .all(|w| w[1].term == 0.0 || (w[0].term > 0.0 && w[1].term <= GEOMETRIC_RATIO * w[0].term));
    let verdict = if decaying {
        ThinnessVerdict::ThinTrend
    } else if growth.is_some_and(|g| g > SUPERLINEAR) {
        ThinnessVerdict::NonthinTrend
    } else {
        ThinnessVerdict::Inconclusive
    };
    (verdict, growth)
}

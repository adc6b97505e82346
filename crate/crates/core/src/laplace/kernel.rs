use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, pairwise_sum_c};
use num_complex::Complex64;

/// Largest admissible `Re(z) * mu_n` in [`Kernel::transform`].
pub const OVERFLOW_EXPONENT: f64 = 700.0;
const BISECTION_STEPS: usize = 200;

/// How `phi` is stored. Both forms are piecewise linear on `[0, inf)` and
/// vanish outside their first and last abscissa.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelRepr {
    /// `phi = values[i]` on `[breaks[i], breaks[i+1])`.
    PiecewiseConstant { breaks: Vec<f64>, values: Vec<f64> },
    /// Linear interpolation of `(t[i], phi[i])`.
    Sampled { t: Vec<f64>, phi: Vec<f64> },
}

/// A real kernel `phi` with `phi(t) = 0` for `t <= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    repr: KernelRepr,
    support_hint: Option<(f64, f64)>,
}

/// One linear piece `phi(a + s) = alpha + beta s`, `0 <= s <= h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub a: f64,
    pub h: f64,
    pub alpha: f64,
    pub beta: f64,
}

fn increasing_nonnegative(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.first().is_some_and(|x| *x >= 0.0) && xs.windows(2).all(|w| w[0] < w[1])
}

impl Kernel {
    pub fn piecewise_constant(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 || values.len() + 1 != breaks.len() {
            return Err(Error::invalid("piecewise kernel needs k+1 breaks for k values, k >= 1"));
        }
        if !increasing_nonnegative(&breaks) {
            return Err(Error::invalid(
                "breaks must be finite, strictly increasing and start at t >= 0",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("kernel values must be finite"));
        }
        Ok(Kernel {
            repr: KernelRepr::PiecewiseConstant { breaks, values },
            support_hint: None,
        })
    }

    pub fn sampled(t: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != phi.len() {
            return Err(Error::invalid(
                "sampled kernel needs at least two (t, phi) pairs of equal length",
            ));
        }
        if !increasing_nonnegative(&t) {
            return Err(Error::invalid(
                "sample abscissae must be finite, strictly increasing and start at t >= 0",
            ));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("kernel values must be finite"));
        }
        Ok(Kernel {
            repr: KernelRepr::Sampled { t, phi },
            support_hint: None,
        })
    }

    /// `phi = 1` on `[a, b]`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Kernel::piecewise_constant(vec![a, b], vec![1.0])
    }

    /// Samples `f` at `samples` equispaced points of `[a, b]`.
    pub fn from_fn(a: f64, b: f64, samples: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::invalid("need at least two samples"));
        }
        let t: Vec<f64> = (0..samples)
            .map(|i| a + (b - a) * i as f64 / (samples - 1) as f64)
            .collect();
        let phi = t.iter().map(|&x| f(x)).collect();
        Kernel::sampled(t, phi)
    }

    pub fn with_support_hint(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return Err(Error::invalid("support hint must satisfy 0 <= lo <= hi"));
        }
        self.support_hint = Some((lo, hi));
        Ok(self)
    }

    pub fn repr(&self) -> &KernelRepr {
        &self.repr
    }

    pub fn support_hint(&self) -> Option<(f64, f64)> {
        self.support_hint
    }

    /// Right end of the stored representation.
    pub fn extent(&self) -> f64 {
        match &self.repr {
            KernelRepr::PiecewiseConstant { breaks, .. } => *breaks.last().expect("validated"),
            KernelRepr::Sampled { t, .. } => *t.last().expect("validated"),
        }
    }

    /// Linear pieces restricted to `[0, n]`.
    pub(crate) fn pieces(&self, n: f64) -> Vec<Piece> {
        let mut out = Vec::new();
        let mut push = |a: f64, b: f64, alpha: f64, beta: f64| {
            let end = b.min(n);
            if end > a {
                out.push(Piece {
                    a,
                    h: end - a,
                    alpha,
                    beta,
                });
            }
        };
        match &self.repr {
            KernelRepr::PiecewiseConstant { breaks, values } => {
                for (w, v) in breaks.windows(2).zip(values) {
                    push(w[0], w[1], *v, 0.0);
                }
            }
            KernelRepr::Sampled { t, phi } => {
                for (tw, pw) in t.windows(2).zip(phi.windows(2)) {
                    push(tw[0], tw[1], pw[0], (pw[1] - pw[0]) / (tw[1] - tw[0]));
                }
            }
        }
        out
    }

    /// `phi(t)` (right-continuous at breaks of a piecewise-constant kernel).
    pub fn value(&self, t: f64) -> f64 {
        match &self.repr {
            KernelRepr::PiecewiseConstant { breaks, values } => {
                if t < breaks[0] || t >= *breaks.last().expect("validated") {
                    return 0.0;
                }
                let i = breaks.partition_point(|b| *b <= t) - 1;
                values[i]
            }
            KernelRepr::Sampled { t: ts, phi } => {
                if t < ts[0] || t > *ts.last().expect("validated") {
                    return 0.0;
                }
                let i = (ts.partition_point(|x| *x <= t)).clamp(1, ts.len() - 1);
                let (t0, t1) = (ts[i - 1], ts[i]);
                phi[i - 1] + (phi[i] - phi[i - 1]) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// `Phi_n(z) = integral_0^n e^{zt} phi(t) dt` (the kernel vanishes on `t <= 0`).
    pub fn transform(&self, z: Complex64, n: f64) -> Result<Complex64> {
        check_n(n)?;
        let mu = self.essential_support(n).map(|(_, hi)| hi).unwrap_or(0.0);
        if z.re * mu > OVERFLOW_EXPONENT {
            return Err(Error::Range { exponent_re: z.re * mu });
        }
        Ok(self.shifted_moments(z, n, 0.0).0)
    }

    /// `(integral e^{z(t - c)} phi, integral t e^{z(t - c)} phi)` over `[0, n]`:
    /// the transform and its derivative, both scaled by `e^{-zc}`.
    pub(crate) fn shifted_moments(&self, z: Complex64, n: f64, c: f64) -> (Complex64, Complex64) {
        piece_moments(&self.pieces(n), z, c)
    }

    /// `integral_0^n t^k phi(t) dt`.
    pub fn moment(&self, k: u32, n: f64) -> f64 {
        let terms: Vec<f64> = self
            .pieces(n)
            .iter()
            .map(|p| {
                // integral_0^h (a+s)^k (alpha + beta s) ds, expanded binomially.
                let mut acc = 0.0;
                let mut binom = 1.0;
                for i in 0..=k {
                    let a_pow = p.a.powi((k - i) as i32);
                    let s0 = p.h.powi(i as i32 + 1) / (i as f64 + 1.0);
                    let s1 = p.h.powi(i as i32 + 2) / (i as f64 + 2.0);
                    acc += binom * a_pow * (p.alpha * s0 + p.beta * s1);
                    binom = binom * (k - i) as f64 / (i + 1) as f64;
                }
                acc
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// `integral_0^a |phi|`, exact for the piecewise-linear representation.
    pub fn cumulative_abs(&self, a: f64) -> f64 {
        let terms: Vec<f64> = self.pieces(a).iter().map(abs_piece_integral).collect();
        pairwise_sum(&terms)
    }

    /// `integral e^{s|t|} |phi(t)| dt` over `[0, n]` by closed forms on the
    /// sign-definite parts of each piece.
    pub fn exponential_moment_abs(&self, s: f64, n: f64) -> f64 {
        let terms: Vec<f64> = self
            .pieces(n)
            .iter()
            .flat_map(split_sign)
            .map(|p| {
                let [e0, e1, _] = unit_moments(Complex64::new(s * p.h, 0.0));
                let v = (s * p.a).exp() * (e0.re * p.h * p.alpha + e1.re * p.h * p.h * p.beta);
                v.abs()
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Closure of the set where `phi != 0` on `[0, n]`, read from the
    /// representation. `None` when `phi` vanishes identically there.
    pub fn essential_support(&self, n: f64) -> Option<(f64, f64)> {
        let parts: Vec<Piece> = self.pieces(n).iter().flat_map(split_sign).collect();
        let nonzero: Vec<&Piece> = parts.iter().filter(|p| p.alpha != 0.0 || p.beta != 0.0).collect();
        let first = nonzero.first()?;
        let last = nonzero.last()?;
        Some((first.a, last.a + last.h))
    }
}

/// `(integral e^{z(t - c)} phi, integral t e^{z(t - c)} phi)` summed over
/// `pieces`: the transform and its derivative, both scaled by `e^{-zc}`.
pub(crate) fn piece_moments(pieces: &[Piece], z: Complex64, c: f64) -> (Complex64, Complex64) {
    piece_moments_shifted(pieces, z, c, 0.0)
}

/// [`piece_moments`] times `e^{-shift}`. A common real factor leaves the
/// phase and the log-derivative alone, so callers that only need those can
/// pick `shift` to keep both parts in range.
pub(crate) fn piece_moments_shifted(pieces: &[Piece], z: Complex64, c: f64, shift: f64) -> (Complex64, Complex64) {
    let mut f = Vec::with_capacity(pieces.len());
    let mut df = Vec::with_capacity(pieces.len());
    for p in pieces {
        let s = z * (p.a - c) - shift;
        let [e0, e1, e2] = scaled_unit_moments(z * p.h, s);
        let (j0, j1, j2) = (e0 * p.h, e1 * (p.h * p.h), e2 * (p.h * p.h * p.h));
        f.push(j0 * p.alpha + j1 * p.beta);
        df.push(j0 * (p.a * p.alpha) + j1 * (p.alpha + p.a * p.beta) + j2 * p.beta);
    }
    (pairwise_sum_c(&f), pairwise_sum_c(&df))
}

pub(crate) fn check_n(n: f64) -> Result<()> {
    if n.is_finite() && n > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("truncation n must be positive, got {n}")))
    }
}

/// Splits a linear piece at an interior sign change so that each part is
/// sign-definite.
fn split_sign(p: &Piece) -> Vec<Piece> {
    let end = p.alpha + p.beta * p.h;
    if p.beta != 0.0 && p.alpha * end < 0.0 {
        let s = -p.alpha / p.beta;
        vec![
            Piece {
                a: p.a,
                h: s,
                alpha: p.alpha,
                beta: p.beta,
            },
            Piece {
                a: p.a + s,
                h: p.h - s,
                alpha: 0.0,
                beta: p.beta,
            },
        ]
    } else {
        vec![*p]
    }
}

fn abs_piece_integral(p: &Piece) -> f64 {
    split_sign(p)
        .iter()
        .map(|q| (q.alpha * q.h + 0.5 * q.beta * q.h * q.h).abs())
        .sum()
}

/// `E_k(w) = integral_0^1 u^k e^{wu} du` for `k = 0, 1, 2`.
pub(crate) fn unit_moments(w: Complex64) -> [Complex64; 3] {
    scaled_unit_moments(w, Complex64::new(0.0, 0.0))
}

/// `e^s E_k(w)`, with the scale folded into the exponent so that a huge
/// `e^w` against a tiny `e^s` never overflows on the way.
fn scaled_unit_moments(w: Complex64, s: Complex64) -> [Complex64; 3] {
    if w.norm() < 1.0 {
        // E_k(w) = sum_m w^m / (m! (m + k + 1)).
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let mut term = Complex64::new(1.0, 0.0);
        for m in 0..30 {
            for (k, slot) in out.iter_mut().enumerate() {
                *slot += term / (m + k + 1) as f64;
            }
            term *= w / (m + 1) as f64;
        }
        let es = s.exp();
        out.map(|e| e * es)
    } else {
        let ew = (w + s).exp();
        let e0 = (ew - s.exp()) / w;
        let e1 = (ew - e0) / w;
        let e2 = (ew - e1 * 2.0) / w;
        [e0, e1, e2]
    }
}

/// `sigma <= mu_n`: where the mass of `|phi|` on `[0, n]` starts and ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportParams {
    pub sigma: f64,
    pub mu_n: f64,
}

/// `sigma` is the largest `a` with `int_0^a |phi| < tol * int_0^n |phi|`,
/// `mu_n` the smallest `a` with `int_a^n |phi| < tol * int_0^n |phi|`, both
/// by bisection on the cumulative integral.
pub fn support_params(kernel: &Kernel, n: f64, tol: f64) -> Result<SupportParams> {
    check_n(n)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    let total = kernel.cumulative_abs(n);
    if total == 0.0 {
        return Err(Error::Degenerate(format!("phi vanishes almost everywhere on [0, {n}]")));
    }
    let threshold = tol * total;
    // F(a) < threshold on [0, sigma), F(a) > total - threshold on (mu, n].
    let bisect = |pred: &dyn Fn(f64) -> bool| {
        let (mut lo, mut hi) = (0.0f64, n);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if pred(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    };
    let (sigma, _) = bisect(&|a| kernel.cumulative_abs(a) < threshold);
    let (_, mu_n) = bisect(&|a| total - kernel.cumulative_abs(a) >= threshold);
    Ok(SupportParams {
        sigma,
        mu_n: mu_n.max(sigma),
    })
}

//! Small numeric helpers shared by the kernels: compensated sums, an
//! overflow-free complex product, circle maximisation and log-log fits.

use num_complex::Complex64;
use std::f64::consts::{LN_2, PI, TAU};

/// Pairwise (cascade) summation; error grows like O(log n) instead of O(n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_c(xs: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// Complex number kept as `mantissa * 2^exponent` so long products neither
/// overflow nor underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    mantissa: Complex64,
    exponent: i64,
}

impl ScaledComplex {
    pub fn new(z: Complex64) -> Self {
        let mut s = ScaledComplex {
            mantissa: z,
            exponent: 0,
        };
        s.normalize();
        s
    }

    pub fn one() -> Self {
        ScaledComplex {
            mantissa: Complex64::new(1.0, 0.0),
            exponent: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    fn normalize(&mut self) {
        let big = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if big == 0.0 || !big.is_finite() {
            return;
        }
        let e = big.log2().floor() as i32;
        if e != 0 {
            self.mantissa *= pow2(-e);
            self.exponent += e as i64;
        }
    }

    pub fn mul(&mut self, z: Complex64) {
        self.mantissa *= z;
        self.normalize();
    }

    /// Multiply by `z^k` using binary powering with renormalisation.
    pub fn mul_pow(&mut self, z: Complex64, mut k: u32) {
        let mut base = ScaledComplex::new(z);
        while k > 0 {
            if k & 1 == 1 {
                self.mantissa *= base.mantissa;
                self.exponent += base.exponent;
                self.normalize();
            }
            k >>= 1;
            if k > 0 {
                base.mantissa = base.mantissa * base.mantissa;
                base.exponent *= 2;
                base.normalize();
            }
        }
    }

    /// Reconstruct `self * exp(shift)` as an ordinary complex number.
    pub fn to_complex_with_exp(&self, shift: Complex64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        if shift.re.abs() < 600.0 && self.exponent.abs() < 1000 {
            let v = if shift == Complex64::new(0.0, 0.0) {
                self.mantissa
            } else {
                self.mantissa * shift.exp()
            };
            let half = (self.exponent / 2) as i32;
            let rest = (self.exponent - half as i64) as i32;
            v * pow2(half) * pow2(rest)
        } else {
            let total = shift + Complex64::new(self.exponent as f64 * LN_2, 0.0);
            self.mantissa * total.exp()
        }
    }
}

fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

/// Horner evaluation of `sum_{k=1}^{q} c_k z^k` (no constant term).
pub fn poly_no_const(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = (acc + c) * z;
    }
    acc
}

/// `sum_{k=1}^{p} z^k / k`, the exponent of the Weierstrass primary factor.
pub fn truncated_log_series(z: Complex64, p: u32) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (1..=p).rev() {
        acc = (acc + 1.0 / k as f64) * z;
    }
    acc
}

/// Maximise a 2pi-periodic function by dense sampling followed by
/// golden-section refinement around the `keep` best samples.
///
/// Returns `(argmax, max)`.
pub fn periodic_max<F: Fn(f64) -> f64>(f: F, samples: usize, keep: usize, tol: f64) -> (f64, f64) {
    let h = TAU / samples as f64;
    let mut vals: Vec<(f64, f64)> = (0..samples)
        .map(|k| {
            let t = k as f64 * h;
            (t, f(t))
        })
        .collect();
    let (mut best_t, mut best_v) =
        vals.iter()
            .copied()
            .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    vals.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.total_cmp(&b.0)));
    for &(t0, _) in vals.iter().take(keep) {
        let (t, v) = golden_max(&f, t0 - h, t0 + h, tol);
        if v > best_v {
            best_v = v;
            best_t = t.rem_euclid(TAU);
        }
    }
    (best_t, best_v)
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a).abs() > tol && iter < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Ordinary least-squares fit `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Indices of the trailing window used as the finite-sample stand-in for
/// limsup/liminf: the last half of `0..len` (at least one index).
pub fn trailing_window(len: usize) -> std::ops::Range<usize> {
    if len == 0 {
        return 0..0;
    }
    (len / 2).min(len - 1)..len
}

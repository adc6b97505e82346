use super::kernel::{check_n, piece_moments_shifted, Kernel, Piece};
use crate::efun::{FiniteOrderFunction, ZeroEntry};
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum_c, wrap_angle};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_4, TAU};

pub const MAX_DEPTH: u32 = 60;
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_STEPS: usize = 50;
/// Split positions inside a rectangle, as fractions of its sides. Kept off
/// 1/2 so that symmetric zero sets (conjugate pairs, the imaginary axis)
/// never sit on an internal edge; the second pair is the retry.
const SPLITS: [(f64, f64); 2] = [(0.4871, 0.5173), (0.4627, 0.5391)];
/// Relative growths of the search box tried when a zero sits on its boundary.
const BOX_PERTURBATIONS: [f64; 6] = [0.0, 0.002, 0.004, 0.006, 0.008, 0.01];

/// `Psi(z) = e^{-cz} Phi_n(z)`, which has the zeros of `Phi_n` but is
/// balanced in size across the search box when `c` is the support centre.
struct Balanced {
    pieces: Vec<Piece>,
    centre: f64,
    /// Longest edge step accepted without refinement.
    max_step: f64,
}

impl Balanced {
    fn new(pieces: Vec<Piece>, centre: f64) -> Self {
        // `Psi` is a sum of `e^{z(t - c)}` over the support, so along a step
        // of length `pi / (4 tau)` no component turns by more than `pi/4`.
        // Endpoint log-derivatives alone can miss a pair of zeros beside a
        // long step, where their contributions cancel at both ends.
        let tau = pieces
            .iter()
            .filter(|p| p.alpha != 0.0 || p.beta != 0.0)
            .flat_map(|p| [p.a, p.a + p.h])
            .map(|t| (t - centre).abs())
            .fold(0.0, f64::max);
        let max_step = if tau > 0.0 { FRAC_PI_4 / tau } else { f64::INFINITY };
        Balanced {
            pieces,
            centre,
            max_step,
        }
    }

    /// `(Psi e^{-K}, Psi'/Psi)` with `K` the largest real exponent met over
    /// the support, so the first part stays in floating-point range.
    fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let shift = self
            .pieces
            .iter()
            .flat_map(|p| [p.a, p.a + p.h])
            .map(|t| z.re * (t - self.centre))
            .fold(f64::NEG_INFINITY, f64::max);
        let (f, df) = piece_moments_shifted(&self.pieces, z, self.centre, shift);
        (f, df / f - self.centre)
    }

    /// Phase change of `Psi` along the segment `a -> b`, refined until each
    /// step turns by less than `pi/4` both by phase difference and by the
    /// log-derivative at its ends. The modulus of `L dz` is used: its
    /// imaginary part alone misses a zero passing beside a long segment.
    fn edge_phase(&self, a: Complex64, b: Complex64, scale: f64) -> Result<f64> {
        let mut total = Vec::new();
        let mut stack = vec![(a, self.eval(a), b, self.eval(b))];
        while let Some((za, (fa, la), zb, (fb, lb))) = stack.pop() {
            if fa.norm() == 0.0 || fb.norm() == 0.0 || !(fa.norm().is_finite() && fb.norm().is_finite()) {
                return Err(Error::ZeroOnContour(format!(
                    "transform vanishes or overflows near {za}"
                )));
            }
            let dz = zb - za;
            let dphase = wrap_angle(fb.arg() - fa.arg());
            let smooth = dz.norm() <= self.max_step
                && dphase.abs() < FRAC_PI_4
                && (la * dz).norm() < FRAC_PI_4
                && (lb * dz).norm() < FRAC_PI_4;
            if smooth {
                total.push(Complex64::new(dphase, 0.0));
                continue;
            }
            if dz.norm() < 1e-13 * scale {
                return Err(Error::ZeroOnContour(format!(
                    "zero within {:.1e} of the segment at {za}",
                    dz.norm()
                )));
            }
            let zm = 0.5 * (za + zb);
            let vm = self.eval(zm);
            // Pushed so that the first half is processed first.
            stack.push((zm, vm, zb, (fb, lb)));
            stack.push((za, (fa, la), zm, vm));
        }
        Ok(pairwise_sum_c(&total).re)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn centre(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn diameter(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.x0 - slack && z.re <= self.x1 + slack && z.im >= self.y0 - slack && z.im <= self.y1 + slack
    }

    fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.x0 + fx * (self.x1 - self.x0);
        let ym = self.y0 + fy * (self.y1 - self.y0);
        [
            Rect {
                x0: self.x0,
                x1: xm,
                y0: self.y0,
                y1: ym,
            },
            Rect {
                x0: xm,
                x1: self.x1,
                y0: self.y0,
                y1: ym,
            },
            Rect {
                x0: self.x0,
                x1: xm,
                y0: ym,
                y1: self.y1,
            },
            Rect {
                x0: xm,
                x1: self.x1,
                y0: ym,
                y1: self.y1,
            },
        ]
    }
}

struct Search<'a> {
    f: &'a Balanced,
    tol: f64,
    scale: f64,
}

impl Search<'_> {
    /// Zeros inside `r` counted with multiplicity, by the argument principle.
    fn count(&self, r: &Rect) -> Result<u32> {
        let corners = [
            Complex64::new(r.x0, r.y0),
            Complex64::new(r.x1, r.y0),
            Complex64::new(r.x1, r.y1),
            Complex64::new(r.x0, r.y1),
        ];
        let mut phase = 0.0;
        for i in 0..4 {
            phase += self.f.edge_phase(corners[i], corners[(i + 1) % 4], self.scale)?;
        }
        let winding = phase / TAU;
        let rounded = winding.round();
        if (winding - rounded).abs() > 0.1 || rounded < 0.0 {
            return Err(Error::NonConvergence {
                op: "zeros_in_disk",
                detail: format!("winding number {winding:.3} is not a nonnegative integer"),
            });
        }
        Ok(rounded as u32)
    }

    /// Newton iteration on `Psi` for a zero of multiplicity `m`.
    fn newton(&self, start: Complex64, m: u32) -> Option<Complex64> {
        let mut z = start;
        for _ in 0..NEWTON_STEPS {
            let (f, l) = self.f.eval(z);
            if f.norm() == 0.0 {
                return Some(z);
            }
            let step = m as f64 / l;
            if !(step.re.is_finite() && step.im.is_finite()) {
                return None;
            }
            z -= step;
            if step.norm() <= NEWTON_TOL * z.norm().max(1.0) {
                return Some(z);
            }
        }
        None
    }

    fn locate(&self, r: Rect, count: u32, depth: u32, out: &mut Vec<(Complex64, u32)>) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        if depth > MAX_DEPTH {
            return Err(Error::NonConvergence {
                op: "zeros_in_disk",
                detail: format!("subdivision deeper than {MAX_DEPTH} near {}", r.centre()),
            });
        }
        let diam = r.diameter();
        if diam <= self.tol {
            let z = self
                .newton(r.centre(), count)
                .filter(|z| r.contains(*z, diam))
                .unwrap_or(r.centre());
            out.push((z, count));
            return Ok(());
        }
        if count == 1 {
            if let Some(z) = self.newton(r.centre(), 1) {
                if r.contains(z, 1e-12 * self.scale) {
                    out.push((z, 1));
                    return Ok(());
                }
            }
        }
        let mut last_err = None;
        for (fx, fy) in SPLITS {
            let children = r.split(fx, fy);
            let counts: Result<Vec<u32>> = children.par_iter().map(|c| self.count(c)).collect();
            match counts {
                Ok(cs) if cs.iter().sum::<u32>() == count => {
                    for (c, k) in children.iter().zip(cs) {
                        self.locate(*c, k, depth + 1, out)?;
                    }
                    return Ok(());
                }
                Ok(cs) => {
                    last_err = Some(Error::NonConvergence {
                        op: "zeros_in_disk",
                        detail: format!(
                            "children count {cs:?} for a rectangle holding {count} near {}",
                            r.centre()
                        ),
                    })
                }
                Err(e) => last_err = Some(e),
            }
        }
        // A zero of multiplicity m cannot be resolved closer than about
        // eps^(1/m): past that the transform is rounding noise on every edge.
        let floor = f64::EPSILON.powf(1.0 / count as f64) * 1e3 * r.centre().norm().max(1.0);
        if matches!(last_err, Some(Error::ZeroOnContour(_))) && diam <= floor {
            let z = self
                .newton(r.centre(), count)
                .filter(|z| r.contains(*z, diam))
                .unwrap_or(r.centre());
            out.push((z, count));
            return Ok(());
        }
        Err(last_err.expect("at least one split attempted"))
    }
}

/// Zeros of `Phi_n` with `|z| <= R`, the constant and origin order of
/// `Phi_n(z) = C_n e^{zc} z^{alpha_n} prod (1 - z/z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformZeroData {
    /// Nonzero zeros, conjugate-symmetric, sorted by imaginary then real part.
    pub zeros: Vec<ZeroEntry>,
    /// `C_n = int t^{alpha_n} phi / alpha_n!`.
    pub c_n: Complex64,
    pub alpha_n: u32,
    /// `c = (sigma + mu_n)/2` from the essential support.
    pub centre: f64,
    pub radius: f64,
    /// Half-width of the search box actually used (`>= radius`).
    pub search_half_width: f64,
}

impl TransformZeroData {
    /// `sum_j mult_j / z_j` over the stored zeros.
    pub fn reciprocal_sum(&self) -> Complex64 {
        let terms: Vec<Complex64> = self
            .zeros
            .iter()
            .map(|z| z.multiplicity() as f64 / z.location())
            .collect();
        pairwise_sum_c(&terms)
    }

    /// The truncated product as genus-one zero data:
    /// `C_n z^alpha exp((c - sum 1/z_j) z) prod G(z/z_j, 1)`.
    pub fn to_function(&self) -> Result<FiniteOrderFunction> {
        let w = Complex64::new(self.centre, 0.0) - self.reciprocal_sum();
        FiniteOrderFunction::new(self.c_n, self.alpha_n, vec![w], 1, self.zeros.clone())
    }
}

/// Locates the zeros of `Phi_n` in `|z| <= R` by recursive subdivision of
/// the bounding box `[-R, R]^2` with argument-principle counts, polishing
/// each isolated zero by Newton's method. Rectangles are refined until they
/// hold one Newton-confirmed zero or their diameter drops to `tol`.
pub fn zeros_in_disk(kernel: &Kernel, n: f64, radius: f64, tol: f64) -> Result<TransformZeroData> {
    check_n(n)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(format!("search radius must be positive, got {radius}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let (sigma, mu) = kernel
        .essential_support(n)
        .ok_or_else(|| Error::Degenerate(format!("phi vanishes on [0, {n}]")))?;
    let f = Balanced::new(kernel.pieces(n), 0.5 * (sigma + mu));
    let mut last_err = None;
    for grow in BOX_PERTURBATIONS {
        let half = radius * (1.0 + grow);
        let search = Search {
            f: &f,
            tol,
            scale: half,
        };
        let root = Rect {
            x0: -half,
            x1: half,
            y0: -half,
            y1: half,
        };
        let attempt = search.count(&root).and_then(|count| {
            let mut found = Vec::new();
            search.locate(root, count, 0, &mut found).map(|_| found)
        });
        match attempt {
            Ok(found) => return Ok(assemble(kernel, n, radius, half, f.centre, found, tol)),
            Err(e @ Error::ZeroOnContour(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one box tried"))
}

fn assemble(
    kernel: &Kernel,
    n: f64,
    radius: f64,
    half: f64,
    centre: f64,
    found: Vec<(Complex64, u32)>,
    tol: f64,
) -> TransformZeroData {
    let origin_slack = tol.max(1e-10);
    let alpha_n: u32 = found
        .iter()
        .filter(|(z, _)| z.norm() <= origin_slack)
        .map(|(_, m)| *m)
        .sum();
    let nonzero: Vec<(Complex64, u32)> = found.into_iter().filter(|(z, _)| z.norm() > origin_slack).collect();
    let mut zeros: Vec<(Complex64, u32)> = conjugate_symmetrize(nonzero)
        .into_iter()
        .filter(|(z, _)| z.norm() <= radius)
        .collect();
    zeros.sort_by(|a, b| a.0.im.total_cmp(&b.0.im).then(a.0.re.total_cmp(&b.0.re)));
    let factorial: f64 = (1..=alpha_n).map(|k| k as f64).product();
    TransformZeroData {
        zeros: zeros
            .into_iter()
            .map(|(z, m)| ZeroEntry::new(z, m).expect("nonzero finite zero"))
            .collect(),
        c_n: Complex64::new(kernel.moment(alpha_n, n) / factorial, 0.0),
        alpha_n,
        centre,
        radius,
        search_half_width: half,
    }
}

/// Pairs each zero in the upper half plane with its nearest partner below
/// and replaces both by the averaged conjugate pair; near-real zeros become
/// real. Unpaired zeros gain their conjugate.
fn conjugate_symmetrize(zs: Vec<(Complex64, u32)>) -> Vec<(Complex64, u32)> {
    let mut used = vec![false; zs.len()];
    let mut out = Vec::with_capacity(zs.len());
    for i in 0..zs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let (z, m) = zs[i];
        let scale = z.norm().max(1.0);
        if z.im.abs() <= 1e-9 * scale {
            out.push((Complex64::new(z.re, 0.0), m));
            continue;
        }
        let target = z.conj();
        let partner = (0..zs.len())
            .filter(|&j| !used[j] && zs[j].0.im * z.im < 0.0)
            .min_by(|&a, &b| (zs[a].0 - target).norm().total_cmp(&(zs[b].0 - target).norm()))
            .filter(|&j| (zs[j].0 - target).norm() <= 1e-6 * scale);
        let (upper, mult) = match partner {
            Some(j) => {
                used[j] = true;
                let avg = 0.5 * (z + zs[j].0.conj());
                (if avg.im > 0.0 { avg } else { avg.conj() }, m.max(zs[j].1))
            }
            None => (if z.im > 0.0 { z } else { z.conj() }, m),
        };
        out.push((upper, mult));
        out.push((upper.conj(), mult));
    }
    out
}

/// Both sides of `sum 1/z_j = (sigma + mu)/2 - int t phi / int phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentIdentity {
    /// Truncated `sum_{|z_j| <= R} mult_j / z_j`.
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub zeros_used: usize,
}

/// Rectangle tolerance used by [`moment_identity_residual`].
pub const MOMENT_SEARCH_TOL: f64 = 1e-8;

pub fn moment_identity_residual(kernel: &Kernel, r_trunc: f64) -> Result<MomentIdentity> {
    let n = kernel.extent();
    let mass = kernel.moment(0, n);
    if mass == 0.0 {
        return Err(Error::Degenerate(
            "Phi(0) = int phi = 0; the identity divides by it".into(),
        ));
    }
    let (sigma, mu) = kernel
        .essential_support(n)
        .ok_or_else(|| Error::Degenerate("phi vanishes identically".into()))?;
    let rhs = Complex64::new(0.5 * (sigma + mu) - kernel.moment(1, n) / mass, 0.0);
    let data = zeros_in_disk(kernel, n, r_trunc, MOMENT_SEARCH_TOL)?;
    let lhs = data.reciprocal_sum();
    Ok(MomentIdentity {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        zeros_used: data.zeros.iter().map(|z| z.multiplicity() as usize).sum(),
    })
}

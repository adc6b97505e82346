//! Randomised invariants across the modules. Kept as a unit-test module so
//! they run even when an earlier integration target fails.

use crate::efun::{primary_factor_log, FiniteOrderFunction, HarmonicConstant, ZeroEntry};
use crate::growth::{argument_principle_count, log_mean, sup_norm, CircleQuadrature};
use crate::laplace::{zeros_in_disk, Kernel};
use crate::potential::{capacity_estimate, PointCloud};
use crate::seqlab::{finite_order_reduce, powersums_from_logderiv, tail_sums, PowerSumSource, SequenceSpec};
use crate::series::{
    convergence_region, partial_sum, pointwise_to_uniform_check, CheckConfig, GroupedSeries, RegionRadius,
};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn polar() -> impl Strategy<Value = (f64, f64)> {
    (0.0..1.0f64, 0.0..TAU)
}

/// Zeros with moduli in `[lo, hi)` and multiplicity 1 or 2.
fn zeros(lo: f64, hi: f64, max: usize) -> impl Strategy<Value = Vec<ZeroEntry>> {
    prop::collection::vec((lo..hi, 0.0..TAU, 1u32..=2), 1..=max).prop_map(|v| {
        v.into_iter()
            .map(|(r, t, m)| ZeroEntry::new(Complex64::from_polar(r, t), m).unwrap())
            .collect()
    })
}

fn genus_zero(max: usize) -> impl Strategy<Value = FiniteOrderFunction> {
    (zeros(0.2, 8.0, max), 0.5..2.0f64, 0.0..TAU)
        .prop_map(|(zs, r, t)| FiniteOrderFunction::genus_zero(Complex64::from_polar(r, t), 0, zs).unwrap())
}

fn off_ring(f: &FiniteOrderFunction, r: f64, gap: f64) -> bool {
    f.zeros().iter().all(|z| (z.modulus() - r).abs() > gap * r)
}

fn cloud(max: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 12..=max)
        .prop_map(|v| PointCloud::new(v.into_iter().map(|(x, y)| c(x, y)).collect(), "random").unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn primary_log_matches_taylor_tail((s, t) in polar(), p in 0u32..=6) {
        let z = Complex64::from_polar(0.9 * s, t);
        let j_max = 40;
        let tail: Complex64 = (p + 1..=j_max).map(|j| z.powu(j) / j as f64).sum();
        let r = z.norm();
        let bound = r.powi(j_max as i32 + 1) / ((j_max + 1) as f64 * (1.0 - r));
        let residual = (primary_factor_log(z, p) + tail).norm();
        // Rounding in the two sums is the only extra slack.
        prop_assert!(residual <= bound + 8.0 * f64::EPSILON * (1.0 + tail.norm()), "{residual} > {bound}");
    }

    #[test]
    fn weierstrass_bound_for_positive_genus(r in 1.0..10.0f64, t in 0.0..TAU, p in 1u32..=6) {
        let z = Complex64::from_polar(r, t);
        let lambda = HarmonicConstant::new(p).lambda_p;
        prop_assert!(primary_factor_log(z, p).re <= lambda * r.powi(p as i32) + 1e-12);
    }

    #[test]
    fn eval_log_abs_matches_value(f in genus_zero(12), (s, t) in polar()) {
        let z = Complex64::from_polar(12.0 * s, t);
        let e = f.eval(z);
        if let Some(v) = e.value {
            if v.norm() > 0.0 && e.log_abs.abs() <= 300.0 {
                let direct = v.norm().ln();
                prop_assert!((direct - e.log_abs).abs() <= 1e-10 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn zero_count_is_monotone_and_matches_winding(f in genus_zero(10), r in 0.3..10.0f64) {
        prop_assert!(f.zero_count(r) <= f.zero_count(1.3 * r));
        prop_assume!(off_ring(&f, r, 1e-3));
        let q = CircleQuadrature::new(1024).unwrap();
        let ap = argument_principle_count(&f, r, &q).unwrap();
        prop_assert_eq!(ap.eta_comparable, f.zero_count(r));
    }

    #[test]
    fn degree_never_exceeds_polynomial_degree(f in genus_zero(15)) {
        prop_assert!(f.hadamard_degree() <= f.total_multiplicity() as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn log_mean_is_monotone_and_below_sup(f in genus_zero(10), r0 in 0.3..4.0f64) {
        let q = CircleQuadrature::new(2048).unwrap();
        let mut last = f64::NEG_INFINITY;
        for r in [r0, 1.5 * r0, 2.25 * r0] {
            let lm = log_mean(&f, r, &q).unwrap().value;
            let sup = sup_norm(&f, r, 1024).unwrap().log_value;
            prop_assert!(lm <= sup + 1e-9, "{lm} > {sup} at {r}");
            prop_assert!(lm >= last - 1e-9, "{lm} < {last} at {r}");
            last = lm;
        }
    }

    #[test]
    fn tail_sums_are_ordered(fs in prop::collection::vec(genus_zero(8), 2..=5)) {
        let n = fs.len();
        let k: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let grid = vec![0.5, 1.0, 2.0, 4.0, 8.0];
        let spec = SequenceSpec::new(fs, k, grid.clone(), None).unwrap();
        let t = tail_sums(&spec, 4).unwrap();
        for i in 0..n {
            for (ri, &r) in grid.iter().enumerate() {
                for m in 0..4 {
                    prop_assert!(t.t[i][ri][m] <= t.s[i][ri][m] + 1e-12);
                    if ri + 1 < grid.len() {
                        prop_assert!(t.s[i][ri + 1][m] <= t.s[i][ri][m]);
                    }
                    if r >= 1.0 && m + 1 < 4 {
                        prop_assert!(t.s[i][ri][m + 1] <= t.s[i][ri][m]);
                    }
                }
            }
        }
    }

    #[test]
    fn power_sums_match_direct_sums(zs in zeros(0.5, 4.0, 30)) {
        let f = FiniteOrderFunction::genus_zero(c(1.0, 0.0), 0, zs).unwrap();
        let ps = powersums_from_logderiv(PowerSumSource::Function(&f), 4).unwrap();
        for (l, got) in ps.sums.iter().enumerate() {
            let direct: Complex64 =
                f.zeros().iter().map(|z| z.multiplicity() as f64 / z.location().powu(l as u32 + 1)).sum();
            let scale: f64 =
                f.zeros().iter().map(|z| z.multiplicity() as f64 / z.modulus().powi(l as i32 + 1)).sum();
            prop_assert!((got - direct).norm() <= 1e-10 * scale, "l={} {} vs {}", l + 1, got, direct);
        }
    }

    #[test]
    fn reduce_drops_exactly_the_outer_primary_factors(
        zs in zeros(0.3, 6.0, 10),
        genus in 0u32..=2,
        r_cut in 0.5..5.0f64,
        (s, t) in polar(),
    ) {
        let f = FiniteOrderFunction::new(c(1.3, -0.4), 1, vec![], genus, zs).unwrap();
        let q = finite_order_reduce(&f, r_cut).unwrap();
        let z = Complex64::from_polar(3.0 * s + 0.05, t);
        let dropped: f64 = f
            .zeros()
            .iter()
            .filter(|w| w.modulus() > r_cut)
            .map(|w| w.multiplicity() as f64 * primary_factor_log(z / w.location(), genus).re)
            .sum();
        let (lf, lq) = (f.eval(z).log_abs, q.eval(z).log_abs);
        prop_assume!(lf.is_finite() && lq.is_finite() && lf.abs() < 300.0);
        prop_assert!((lf - lq - dropped).abs() <= 1e-9 * lf.abs().max(1.0), "{lf} {lq} {dropped}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn capacity_scales_and_translates(cl in cloud(60), (s, t) in polar(), wx in -5.0..5.0f64, wy in -5.0..5.0f64) {
        let n = 10;
        let base = capacity_estimate(&cl, n).unwrap().cap;
        let a = Complex64::from_polar(0.2 + 3.0 * s, t);
        let scaled = capacity_estimate(&cl.affine(a, c(0.0, 0.0)).unwrap(), n).unwrap().cap;
        let moved = capacity_estimate(&cl.affine(c(1.0, 0.0), c(wx, wy)).unwrap(), n).unwrap().cap;
        prop_assert!((scaled - a.norm() * base).abs() <= 1e-10 * a.norm() * base);
        prop_assert!((moved - base).abs() <= 1e-10 * base);
    }

    #[test]
    fn capacity_grows_with_the_set(cl in cloud(60), extra in cloud(40)) {
        let n = 10;
        let small = capacity_estimate(&cl, n).unwrap().cap;
        let mut all = cl.points().to_vec();
        all.extend(extra.points().iter().map(|p| 2.0 * p));
        let big = capacity_estimate(&PointCloud::new(all, "union").unwrap(), n).unwrap().cap;
        prop_assert!(small <= big * 1.05, "{small} > {big}");
    }

    #[test]
    fn piecewise_constant_transform_at_origin_is_the_integral(
        steps in prop::collection::vec((0.05..1.0f64, -2.0..2.0f64), 1..=6),
    ) {
        let mut breaks = vec![0.0];
        for (h, _) in &steps {
            breaks.push(breaks.last().unwrap() + h);
        }
        let values: Vec<f64> = steps.iter().map(|(_, v)| *v).collect();
        let n = *breaks.last().unwrap();
        let integral: f64 = steps.iter().map(|(h, v)| h * v).sum();
        let k = Kernel::piecewise_constant(breaks, values).unwrap();
        prop_assert!((k.transform(c(0.0, 0.0), n).unwrap().re - integral).abs() <= 1e-12);
        let h = 1e-4;
        let dq = (k.transform(c(h, 0.0), n).unwrap() - k.transform(c(-h, 0.0), n).unwrap()) / (2.0 * h);
        // Central difference error is h^2/6 times the third moment.
        let third: f64 = k.moment(3, n).abs().max(1.0);
        prop_assert!((dq.re - k.moment(1, n)).abs() <= h * h * third + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn real_kernel_zeros_are_conjugate_symmetric(
        values in prop::collection::vec(0.2..2.0f64, 2..=4),
    ) {
        let breaks: Vec<f64> = (0..=values.len()).map(|i| i as f64 * 0.5).collect();
        let n = *breaks.last().unwrap();
        let k = Kernel::piecewise_constant(breaks, values).unwrap();
        let d = zeros_in_disk(&k, n, 15.0, 1e-9).unwrap();
        for z in &d.zeros {
            let w = z.location().conj();
            let nearest = d.zeros.iter().map(|y| (y.location() - w).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest <= 1e-8, "{} has no conjugate partner", z.location());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn geometric_series_tail_bound((s, t) in polar(), terms in 1usize..=40) {
        let ones = GroupedSeries::new(
            vec![FiniteOrderFunction::constant(c(1.0, 0.0)).unwrap(); 40],
            (1..=40).collect(),
            vec![1.0],
        )
        .unwrap();
        let z = Complex64::from_polar(0.9 * s, t);
        let got = partial_sum(&ones, z, terms).unwrap().value.unwrap();
        let r = z.norm();
        let bound = r.powi(terms as i32 + 1) / (1.0 - r);
        prop_assert!((got - z / (1.0 - z)).norm() <= bound * (1.0 + 1e-9) + 1e-15);
        prop_assert_eq!(partial_sum(&ones, c(0.0, 0.0), terms).unwrap().value.unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn region_radius_decreases_in_c(c1 in 0.01..0.99f64, dc in 0.001..0.5f64, beta in 0.2..3.0f64, gamma in 0.2..3.0f64) {
        let c2 = (c1 + dc).min(0.999);
        prop_assume!(c2 > c1);
        let radius = |cc: f64| match convergence_region(cc, beta, gamma, c(0.0, 0.0), 1.0).unwrap().radius {
            RegionRadius::Finite(r) => r,
            other => panic!("expected a finite radius, got {other:?}"),
        };
        prop_assert!(radius(c2) < radius(c1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stage_c_roots_follow_exponent_arithmetic(zs in zeros(0.5, 3.0, 4), n_terms in 8usize..=12) {
        let p = FiniteOrderFunction::genus_zero(c(0.7, 0.2), 0, zs).unwrap();
        let k: Vec<u32> = (1..=n_terms as u32).map(|i| 2 * i).collect();
        let grid = vec![1.5, 3.0];
        let s = GroupedSeries::new(vec![p.clone(); n_terms], k.clone(), grid).unwrap();
        let q = CircleQuadrature::new(1024).unwrap();
        let report =
            pointwise_to_uniform_check(&s, &[c(0.3, 0.1)], &q, None, &CheckConfig::default()).unwrap();
        for row in &report.uniform {
            let kn = k[row.n - 1] as f64;
            let sup = sup_norm(&p, row.radius, q.nodes()).unwrap().log_value;
            let root_k = (sup / kn).exp();
            prop_assert!(row.p_root <= root_k.sqrt() * (1.0 + 1e-12) + 1e-300);
            // Q_n = z^{k_n} P_n has sup norm R^{k_n} ||P_n||_R.
            prop_assert!((row.q_root - row.radius.sqrt() * row.p_root).abs() <= 1e-9 * row.q_root);
        }
    }
}

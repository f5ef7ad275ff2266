use modhilbert::fourier::{
    classical_hilbert_of_extension, ht_inverse, ht_transform, kernel_apply_inverse, kernel_apply_vp, CosineSeries,
    NormKind, Parity, SineSeries,
};
use modhilbert::func::FnTime;
use modhilbert::quad::{gauss_rule, QuadratureSpec};
use proptest::prelude::*;
use std::f64::consts::PI;

const T: f64 = 2.0;

fn l2_quad(f: impl Fn(f64) -> f64) -> f64 {
    let r = gauss_rule(48);
    (0..8).map(|p| r.integrate(p as f64 * T / 8.0, (p + 1) as f64 * T / 8.0, &f)).sum()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..12)
}

proptest! {
    #[test]
    fn parseval(c in coeffs()) {
        let s = SineSeries::new(T, c.clone());
        let quad = l2_quad(|t| s.eval(t).powi(2)).sqrt();
        prop_assert!((s.norm(NormKind::L2) - quad).abs() <= 1e-12 * (1.0 + quad));
        let k = CosineSeries::new(T, c);
        let quad = l2_quad(|t| k.eval(t).powi(2)).sqrt();
        prop_assert!((k.norm(NormKind::L2) - quad).abs() <= 1e-12 * (1.0 + quad));
    }

    #[test]
    fn isometry(c in coeffs()) {
        let s = SineSeries::new(T, c);
        let hs = ht_transform(&s);
        let a = l2_quad(|t| s.eval(t).powi(2));
        let b = l2_quad(|t| hs.eval(t).powi(2));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
        prop_assert_eq!(ht_inverse(&hs), s);
    }

    #[test]
    fn adjoint_is_inverse(a in coeffs(), b in coeffs()) {
        let u = SineSeries::new(T, a);
        let w = CosineSeries::new(T, b);
        let hu = ht_transform(&u);
        let hw = ht_inverse(&w);
        let lhs = l2_quad(|t| hu.eval(t) * w.eval(t));
        let rhs = l2_quad(|t| u.eval(t) * hw.eval(t));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        prop_assert!((lhs - hu.inner(&w)).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
}

#[test]
fn kernel_matches_series_at_sample_points() {
    let c: Vec<f64> = (0..10).map(|k| (0.7f64).powi(k) * if k % 3 == 1 { -1.0 } else { 1.0 }).collect();
    let s = SineSeries::new(T, c.clone());
    let hs = ht_transform(&s);
    let k = CosineSeries::new(T, c);
    let hk = ht_inverse(&k);
    let q = QuadratureSpec::default();
    let fs = FnTime(|t| s.eval(t));
    let fk = FnTime(|t| k.eval(t));
    for i in 0..20 {
        let t = T * (i as f64 + 0.5) / 20.0;
        let forward = kernel_apply_vp(&fs, t, T, &q).unwrap();
        assert!((forward - hs.eval(t)).abs() < 1e-8, "t={t}: {forward} vs {}", hs.eval(t));
        let back = kernel_apply_inverse(&fk, t, T, &q).unwrap();
        assert!((back - hk.eval(t)).abs() < 1e-8, "t={t}: {back} vs {}", hk.eval(t));
    }
}

#[test]
fn inverse_of_quarter_sine_has_log_factor() {
    let q = QuadratureSpec::default();
    let u = FnTime(|t: f64| (PI * t / 4.0).sin());
    for t in [1e-6, 1e-3, 0.3, 1.0, 1.7, 2.0 - 1e-3, 2.0 - 1e-6] {
        let lt = if t < 1.0 { (PI * t / 4.0).tan().ln() } else { -(PI * (2.0 - t) / 4.0).tan().ln() };
        let exact = 2.0 / PI * (PI * t / 4.0).sin() * lt;
        let got = kernel_apply_inverse(&u, t, T, &q).unwrap();
        assert!((got - exact).abs() < 1e-10 * (1.0 + exact.abs()), "t={t}: {got} vs {exact}");
    }
}

#[test]
fn periodic_hilbert_agrees_with_kernels() {
    let q = QuadratureSpec::default();
    let v = FnTime(|t: f64| t * (T - t) + 0.3 * t);
    for t in [0.1, 0.77, 1.5, 1.93] {
        let direct = kernel_apply_vp(&v, t, T, &q).unwrap();
        let ext = classical_hilbert_of_extension(&v, Parity::Odd, t, T, &q).unwrap();
        assert!((direct + ext).abs() < 1e-9, "t={t}");
        let inv = kernel_apply_inverse(&v, t, T, &q).unwrap();
        let ext = classical_hilbert_of_extension(&v, Parity::Even, t, T, &q).unwrap();
        assert!((inv - ext).abs() < 1e-9, "t={t}");
    }
}

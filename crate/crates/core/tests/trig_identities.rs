use modhilbert::analysis::{norm_equivalence_check, pwc_cos_coeffs, pwc_sin_coeffs, xk};
use modhilbert::fourier::lambda;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn discrete_orthogonality() {
    for n in [1usize, 2, 3, 7, 16, 64, 255, 256] {
        let nf = n as f64;
        for k in 0..n {
            for l in 0..n {
                let s: f64 = (1..=n).map(|i| {
                    let m = (2 * i - 1) as f64;
                    (m * xk(k, n)).sin() * (m * xk(l, n)).sin()
                }).sum();
                let expected = if k == l { nf / 2.0 } else { 0.0 };
                assert!((s - expected).abs() <= 1e-11, "n={n} k={k} l={l}: {s}");
            }
        }
    }
}

/// `m x_k` reduced modulo `2π` in integer arithmetic: `m(2k+1)π/(4n)`.
fn phase(m: usize, k: usize, n: usize) -> f64 {
    let r = (m * (2 * k + 1)) % (8 * n);
    r as f64 * std::f64::consts::PI / (4 * n) as f64
}

#[test]
fn cosine_square_sum() {
    for n in [1usize, 2, 5, 32, 128, 256] {
        for k in 0..=4 * n {
            let s: f64 = (1..=n).map(|i| phase(2 * i - 1, k, n).cos().powi(2)).sum();
            assert!((s - n as f64 / 2.0).abs() <= 1e-11, "n={n} k={k}: {s}");
        }
    }
}

#[test]
fn interior_cosine_orthogonality() {
    for n in [2usize, 3, 8, 33, 128, 256] {
        for i in 1..n {
            for j in 1..n {
                let s: f64 = (0..n).map(|k| (2.0 * i as f64 * xk(k, n)).cos() * (2.0 * j as f64 * xk(k, n)).cos()).sum();
                let expected = if i == j { n as f64 / 2.0 } else { 0.0 };
                assert!((s - expected).abs() <= 1e-11, "n={n} i={i} j={j}: {s}");
            }
        }
    }
}

fn random_steps(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// `(2/T)∫ u_h cos(λ_k t)` cell by cell.
fn cos_coeff_direct(x: &[f64], k: usize, horizon: f64) -> f64 {
    let n = x.len();
    let h = horizon / n as f64;
    let lam = lambda(k, horizon);
    let s: f64 = x
        .iter()
        .enumerate()
        .map(|(i, u)| u * ((lam * (i + 1) as f64 * h).sin() - (lam * i as f64 * h).sin()) / lam)
        .sum();
    2.0 / horizon * s
}

fn sin_coeff_direct(x: &[f64], k: usize, horizon: f64) -> f64 {
    let n = x.len();
    let h = horizon / n as f64;
    let lam = lambda(k, horizon);
    let s: f64 = x
        .iter()
        .enumerate()
        .map(|(i, u)| u * ((lam * i as f64 * h).cos() - (lam * (i + 1) as f64 * h).cos()) / lam)
        .sum();
    2.0 / horizon * s
}

#[test]
fn step_coefficients_match_cellwise_integrals() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.gen_range(1..40);
        let x = random_steps(&mut rng, n);
        for k in 0..3 * n {
            assert!((pwc_cos_coeffs(&x, k) - cos_coeff_direct(&x, k, 2.0)).abs() < 1e-12);
            assert!((pwc_sin_coeffs(&x, k) - sin_coeff_direct(&x, k, 2.0)).abs() < 1e-12);
        }
    }
}

#[test]
fn coefficient_recurrences() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.gen_range(1..33);
        let x = random_steps(&mut rng, n);
        for k in 0..2 * n {
            let base = pwc_cos_coeffs(&x, k);
            for mu in 1..4 {
                let lifted = pwc_cos_coeffs(&x, k + 2 * mu * n);
                let ratio = (2 * k + 1) as f64 / (2 * k + 1 + 4 * mu * n) as f64;
                assert!((lifted - ratio * base).abs() <= 1e-12, "n={n} k={k} mu={mu}");
            }
        }
        for k in 0..n {
            let mirrored = pwc_cos_coeffs(&x, 2 * n - 1 - k);
            let ratio = (2 * k + 1) as f64 / (4 * n - 1 - 2 * k) as f64;
            assert!((mirrored + ratio * pwc_cos_coeffs(&x, k)).abs() <= 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn norm_equivalence_on_random_steps() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.gen_range(1..40);
        let x = random_steps(&mut rng, n);
        let report = norm_equivalence_check(&x, 2.0);
        report.check().unwrap_or_else(|e| panic!("n={n}: {e}"));
    }
}

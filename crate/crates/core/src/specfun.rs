//! Hurwitz-type tail sums `Σ_{μ≥0} (a+μ)^{-p}`.
//!
//! These appear whenever Fourier modes `k` and `k + 2μn` are folded onto the
//! same index: the aliased contributions differ only by a power of
//! `(2k+1+4μn)`, and the infinite sum over `μ` is a Hurwitz zeta value.

use crate::error::{domain, Result};

const EXPLICIT_TERMS: usize = 32;

// B_{2j}/(2j)! for j = 1..4
const BERNOULLI_OVER_FACTORIAL: [f64; 4] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
];

/// Hurwitz zeta `ζ(p, a) = Σ_{μ≥0} (a+μ)^{-p}` for integer `p ≥ 2`, `a > 0`.
///
/// The first 32 terms are summed explicitly (compensated), the remainder
/// uses a four-term Euler–Maclaurin expansion at `a + 32`.
pub fn hurwitz_zeta(p: u32, a: f64) -> Result<f64> {
    if p < 2 {
        return domain(format!("hurwitz_zeta: order {p} < 2 diverges"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("hurwitz_zeta: offset {a} must be positive"));
    }
    Ok(hurwitz_unchecked(p, a))
}

pub(crate) fn hurwitz_unchecked(p: u32, a: f64) -> f64 {
    let pi = p as i32;
    let mut sum = 0.0;
    let mut comp = 0.0;
    // add small terms first
    for mu in (0..EXPLICIT_TERMS).rev() {
        let term = (a + mu as f64).powi(-pi);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let z = a + EXPLICIT_TERMS as f64;
    let pf = p as f64;
    let zp = z.powi(-pi);
    let mut tail = z * zp / (pf - 1.0) + 0.5 * zp;
    // rising factorial (p)_{2j-1} and power z^{-p-2j+1}
    let mut rising = pf;
    let mut zpow = zp / z;
    let zinv2 = 1.0 / (z * z);
    for (j, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let m = (2 * j) as f64;
            rising *= (pf + m - 1.0) * (pf + m);
            zpow *= zinv2;
        }
        tail += coef * rising * zpow;
    }
    sum + tail
}

/// The tail sum `Σ_{μ≥0} (a+μ)^{-p}` restricted to the orders that occur in
/// the folding formulas, `p ∈ {2,3,4}`.
pub fn hurwitz_tail(p: u32, a: f64) -> Result<f64> {
    if !(2..=4).contains(&p) {
        return domain(format!("hurwitz_tail: order {p} not in {{2,3,4}}"));
    }
    hurwitz_zeta(p, a)
}

/// `a^p ζ(p, a) = Σ_{μ≥0} (a/(a+μ))^p`; equals 1 plus the aliasing correction.
pub fn scaled_tail(p: u32, a: f64) -> Result<f64> {
    Ok(a.powi(p as i32) * hurwitz_zeta(p, a)?)
}

/// Folding factor `γ(k,n) = Σ_{μ≥0} (2k+1)²/(2k+1+4μn)²` for `0 ≤ k < 2n`.
pub fn gamma_kn(k: usize, n: usize) -> Result<f64> {
    if n == 0 {
        return domain("gamma_kn: n must be positive");
    }
    if k >= 2 * n {
        return domain(format!("gamma_kn: k = {k} outside [0, {}]", 2 * n - 1));
    }
    let a = (2 * k + 1) as f64 / (4 * n) as f64;
    scaled_tail(2, a)
}

//! Sine/cosine series on `(0, T)` in the modes `sin(λ_k t)`, `cos(λ_k t)`
//! with `λ_k = (π/2 + kπ)/T`, the transforms `H_T`, `H_T^{-1}`, and
//! pointwise kernel evaluations used as independent oracles.

use crate::error::{domain, Result};
use crate::func::TimeFunction;
use crate::quad::{tanh_sinh_floor, tanh_sinh, QuadratureSpec};
use std::f64::consts::PI;

/// Frequency `λ_k = (π/2 + kπ)/T`.
#[inline]
pub fn lambda(k: usize, horizon: f64) -> f64 {
    (0.5 + k as f64) * PI / horizon
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Sine,
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    L2,
    /// Weight `λ_k^{2s}`, `s ∈ [0, 2]`.
    Primal(f64),
    /// Weight `λ_k^{-1}`.
    DualHalf,
}

fn weighted_norm(coeffs: &[f64], horizon: f64, kind: NormKind) -> f64 {
    let mut s = 0.0;
    for (k, c) in coeffs.iter().enumerate().rev() {
        let w = match kind {
            NormKind::L2 => 1.0,
            NormKind::Primal(p) => lambda(k, horizon).powf(2.0 * p),
            NormKind::DualHalf => 1.0 / lambda(k, horizon),
        };
        s += w * c * c;
    }
    (0.5 * horizon * s).sqrt()
}

fn inner(a: &[f64], b: &[f64], horizon: f64) -> f64 {
    0.5 * horizon * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

macro_rules! series_type {
    ($name:ident, $trig:ident) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            pub horizon: f64,
            pub coeffs: Vec<f64>,
        }

        impl $name {
            pub fn new(horizon: f64, coeffs: Vec<f64>) -> Self {
                $name { horizon, coeffs }
            }

            pub fn len(&self) -> usize {
                self.coeffs.len()
            }

            pub fn is_empty(&self) -> bool {
                self.coeffs.is_empty()
            }

            pub fn eval(&self, t: f64) -> f64 {
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * (lambda(k, self.horizon) * t).$trig())
                    .sum()
            }

            pub fn norm(&self, kind: NormKind) -> f64 {
                weighted_norm(&self.coeffs, self.horizon, kind)
            }

            /// `L²(0,T)` inner product via Parseval.
            pub fn inner(&self, other: &Self) -> f64 {
                inner(&self.coeffs, &other.coeffs, self.horizon)
            }
        }
    };
}

series_type!(SineSeries, sin);
series_type!(CosineSeries, cos);

/// `H_T`: sine mode `k` goes to cosine mode `k`.
pub fn ht_transform(x: &SineSeries) -> CosineSeries {
    CosineSeries::new(x.horizon, x.coeffs.clone())
}

/// `H_T^{-1}`: cosine mode `k` goes to sine mode `k`.
pub fn ht_inverse(x: &CosineSeries) -> SineSeries {
    SineSeries::new(x.horizon, x.coeffs.clone())
}

/// `∫₀ᵀ sin(λ_k t) cos(λ_l t) dt`, the only coupling between the two bases.
pub fn sine_cosine_overlap(k: usize, l: usize, horizon: f64) -> f64 {
    let (a, b) = (lambda(k, horizon), lambda(l, horizon));
    // sin(λ T) = (-1)^k, cos(λ T) = 0
    let sk = if k % 2 == 0 { 1.0 } else { -1.0 };
    let sl = if l % 2 == 0 { 1.0 } else { -1.0 };
    if k == l {
        return 1.0 / (2.0 * a);
    }
    // ∫ sin(a t)cos(b t) = [-cos((a+b)t)/(2(a+b)) - cos((a-b)t)/(2(a-b))]
    let plus = a + b;
    let minus = a - b;
    let cos_plus = -sk * sl; // cos((a+b)T) = -sin(aT)sin(bT)
    let cos_minus = sk * sl;
    (1.0 - cos_plus) / (2.0 * plus) + (1.0 - cos_minus) / (2.0 * minus)
}

/// Fourier coefficients `(2/T)∫₀ᵀ f(t) φ_k(t) dt`, `k < modes`.
///
/// The integral is computed twice, with `q.points_per_oscillation` and
/// with 1.5 times as many nodes per half-period; the larger rule is
/// refined until both agree within `q.tolerance`.
pub fn fourier_coeffs(
    f: &dyn TimeFunction,
    basis: Basis,
    horizon: f64,
    modes: usize,
    q: &QuadratureSpec,
) -> Result<Vec<f64>> {
    q.validate()?;
    if modes == 0 {
        return domain("fourier_coeffs: need at least one mode");
    }
    if !(horizon > 0.0) {
        return domain("fourier_coeffs: horizon must be positive");
    }
    let omega = lambda(modes - 1, horizon);
    let ends = f.singular_ends();
    let sing = match q.map {
        crate::quad::EndpointMap::None => (ends.left, ends.right),
        _ => (false, false),
    };
    let breaks = f.breakpoints();
    let project = |ppo: usize| -> Vec<f64> {
        let spec = QuadratureSpec { points_per_oscillation: ppo, ..*q };
        let set = spec.nodes(horizon, omega, &breaks, sing);
        let fv: Vec<f64> = set.x.iter().zip(&set.w).map(|(&x, &w)| w * f.value(x)).collect();
        (0..modes)
            .map(|k| {
                let lam = lambda(k, horizon);
                let s: f64 = set
                    .x
                    .iter()
                    .zip(&fv)
                    .map(|(&x, &g)| {
                        g * match basis {
                            Basis::Sine => (lam * x).sin(),
                            Basis::Cosine => (lam * x).cos(),
                        }
                    })
                    .sum();
                2.0 / horizon * s
            })
            .collect()
    };
    let mut ppo = q.points_per_oscillation;
    let mut coarse = project(ppo);
    let mut est = f64::INFINITY;
    for _ in 0..4 {
        let fine = project(ppo * 3 / 2);
        est = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if est <= q.tolerance {
            return Ok(fine);
        }
        ppo = ppo * 3 / 2;
        coarse = fine;
    }
    Err(crate::Error::Quadrature { estimate: est, tolerance: q.tolerance })
}

pub fn sine_coeffs(f: &dyn TimeFunction, horizon: f64, modes: usize, q: &QuadratureSpec) -> Result<SineSeries> {
    Ok(SineSeries::new(horizon, fourier_coeffs(f, Basis::Sine, horizon, modes, q)?))
}

pub fn cosine_coeffs(f: &dyn TimeFunction, horizon: f64, modes: usize, q: &QuadratureSpec) -> Result<CosineSeries> {
    Ok(CosineSeries::new(horizon, fourier_coeffs(f, Basis::Cosine, horizon, modes, q)?))
}

/// `v.p. ∫₀ᵀ ds / sin(c(s - t))` with `c = π/(2T)`.
pub fn pv_cosecant_integral(t: f64, horizon: f64) -> f64 {
    let c = 0.5 * PI / horizon;
    ((0.5 * c * (horizon - t)).tan().ln() - (0.5 * c * t).tan().ln()) / c
}

/// `(1/2T) v.p.∫₀ᵀ [1/sin(c(s+t)) + σ/sin(c(s-t))] v(s) ds`.
fn cosecant_kernel(v: &dyn TimeFunction, t: f64, horizon: f64, sigma: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0 && t < horizon) {
        return domain(format!("kernel evaluation point {t} outside (0, {horizon})"));
    }
    let c = 0.5 * PI / horizon;
    let vt = v.value(t);
    let (st, ct) = (c * t).sin_cos();
    let ct = if 2.0 * t > horizon { (c * (horizon - t)).sin() } else { ct };
    let dt = horizon - t;
    // integrand at s = t + r = T - q; all three coordinates are passed so
    // that whichever one is exact near a singular point is used there;
    // `g` is subtracted in the `1/sin(c(s - t))` term: `v(t)` on pieces
    // anchored at `t`, the one-sided limit of `v` at the anchor elsewhere,
    // so that a jump close to `t` leaves a bounded integrand
    let integrand = |s: f64, r: f64, q: f64, g: f64, anchor: f64| {
        let ss = (c * s).sin();
        let cs = if 2.0 * s > horizon { (c * q).sin() } else { (c * s).cos() };
        let plus = if s + t > horizon { (c * (dt + q)).sin() } else { (c * (s + t)).sin() };
        let minus = (c * r).sin();
        // k2 + σ k1 in product form, free of cancellation for t ≪ s
        let num = if sigma > 0.0 { 2.0 * ss * ct } else { -2.0 * cs * st };
        // nodes that round onto a jump take the limit from inside the piece
        let vs = if s == anchor { g } else { v.value(s) };
        if r.abs() < 1e-3 * horizon {
            vs / plus + sigma * (vs - g) / minus
        } else {
            vs * num / (plus * minus) - sigma * g / minus
        }
    };
    let mut cuts: Vec<f64> = v.breakpoints().into_iter().filter(|&b| b > 0.0 && b < horizon && b != t).collect();
    cuts.extend([0.0, t, horizon]);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let vmax = (1..8)
        .map(|i| horizon * i as f64 / 8.0)
        .chain(cuts.windows(2).map(|w| 0.5 * (w[0] + w[1])))
        .map(|s| v.value(s).abs())
        .fold(0.0, f64::max);
    // each window is halved and each half integrated in the distance p from
    // its outer cut, so that s, s - t and T - s stay exact near every cut
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        pieces.push((a, 1.0, half));
        pieces.push((b, -1.0, half));
    }
    pieces.sort_by(|x, y| y.2.partial_cmp(&x.2).unwrap());
    let closed = sigma * vt * pv_cosecant_integral(t, horizon);
    let mut total = closed;
    let mut scale = closed.abs() + vmax;
    // ∫ dr / sin(c r) over [r1, r2] on one side of 0
    let log_tan = |r: f64| (0.5 * c * r).tan().abs().ln();
    for (anchor, dir, len) in pieces {
        let (ra, qa) = (anchor - t, horizon - anchor);
        let g = if anchor == t { vt } else { v.one_sided(anchor, dir > 0.0) };
        if g != vt {
            let rb = ra + dir * len;
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            let part = sigma * (g - vt) * (log_tan(hi) - log_tan(lo)) / c;
            total += part;
            scale += part.abs();
        }
        let e = tanh_sinh_floor(
            |p| integrand(anchor + dir * p, ra + dir * p, qa - dir * p, g, anchor),
            0.0,
            len,
            tol,
            tol * scale,
        )?;
        total += e.value;
        scale += e.value.abs();
    }
    Ok(total / (2.0 * horizon))
}

/// `(H_T v)(t)` from the principal-value kernel representation.
pub fn kernel_apply_vp(v: &dyn TimeFunction, t: f64, horizon: f64, q: &QuadratureSpec) -> Result<f64> {
    cosecant_kernel(v, t, horizon, 1.0, q.tolerance)
}

/// `(H_T^{-1} u)(t)` from its kernel representation.
pub fn kernel_apply_inverse(u: &dyn TimeFunction, t: f64, horizon: f64, q: &QuadratureSpec) -> Result<f64> {
    cosecant_kernel(u, t, horizon, -1.0, q.tolerance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// odd about 0, even about T
    Odd,
    /// even about 0, odd about T
    Even,
}

/// The `4T`-periodic extension of `v` used with the classical Hilbert transform.
pub fn periodic_extension(v: &dyn TimeFunction, parity: Parity, s: f64, horizon: f64) -> f64 {
    let period = 4.0 * horizon;
    let mut x = (s + 2.0 * horizon).rem_euclid(period) - 2.0 * horizon;
    let mut sign = 1.0;
    if x < 0.0 {
        x = -x;
        if parity == Parity::Odd {
            sign = -sign;
        }
    }
    if x > horizon {
        x = 2.0 * horizon - x;
        if parity == Parity::Even {
            sign = -sign;
        }
    }
    sign * v.value(x)
}

/// Classical periodic Hilbert transform of the extension of `v`, evaluated
/// at `t ∈ (0, T)`. With odd parity the result is `-(H_T v)(t)`; with even
/// parity it equals `(H_T^{-1} v)(t)`.
pub fn classical_hilbert_of_extension(
    v: &dyn TimeFunction,
    parity: Parity,
    t: f64,
    horizon: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if !(t > 0.0 && t < horizon) {
        return domain(format!("evaluation point {t} outside (0, {horizon})"));
    }
    let tt = horizon;
    let a = PI / (4.0 * tt);
    let phi_t = periodic_extension(v, parity, t, tt);
    // the cotangent has zero mean over a period, so subtracting φ(t) is free
    let integrand = |s: f64| (periodic_extension(v, parity, s, tt) - phi_t) / (a * (t - s)).tan();
    let mut cuts = vec![-2.0 * tt, -tt, 0.0, t, tt, 2.0 * tt];
    for b in v.breakpoints() {
        if b > 0.0 && b < tt {
            cuts.extend([b, -b, 2.0 * tt - b, b - 2.0 * tt]);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15 * tt);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += tanh_sinh(integrand, w[0], w[1], q.tolerance)?.value;
    }
    Ok(total / (4.0 * tt))
}

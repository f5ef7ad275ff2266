//! Quadrature rules: Gauss–Legendre, tanh-sinh, adaptive Gauss and
//! geometrically graded rules for endpoint singularities.

use crate::error::{domain, Error, Result};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let mf = m as f64;
        for i in 0..(m + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + r * x);
        }
        s * r
    }
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared, cached Gauss–Legendre rule with `m` nodes.
pub fn gauss_rule(m: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(m)
        .or_insert_with(|| Arc::new(GaussRule::new(m)))
        .clone()
}

/// A flat list of quadrature points on some interval.
#[derive(Debug, Clone, Default)]
pub struct NodeSet {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl NodeSet {
    pub fn gauss(a: f64, b: f64, m: usize) -> Self {
        let rule = gauss_rule(m);
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        NodeSet {
            x: rule.nodes.iter().map(|x| c + r * x).collect(),
            w: rule.weights.iter().map(|w| r * w).collect(),
        }
    }

    /// Gauss rules on a geometric mesh refined towards `a` (`toward_left`) or `b`.
    ///
    /// Subintervals have lengths `(1-σ)σ^j (b-a)`; the innermost one keeps a
    /// plain rule. Pieces below rounding resolution are dropped.
    pub fn graded(a: f64, b: f64, toward_left: bool, sigma: f64, levels: usize, m: usize) -> Self {
        let len = b - a;
        let mut breaks = Vec::with_capacity(levels + 2);
        breaks.push(0.0);
        for j in (1..=levels).rev() {
            breaks.push(sigma.powi(j as i32));
        }
        breaks.push(1.0);
        let mut out = NodeSet::default();
        for win in breaks.windows(2) {
            let (lo, hi) = if toward_left {
                (a + win[0] * len, a + win[1] * len)
            } else {
                (b - win[1] * len, b - win[0] * len)
            };
            let anchor = if toward_left { a } else { b };
            if hi - lo <= 8.0 * f64::EPSILON * anchor.abs() {
                continue;
            }
            out.extend(&NodeSet::gauss(lo, hi, m));
        }
        out
    }

    pub fn extend(&mut self, other: &NodeSet) {
        self.x.extend_from_slice(&other.x);
        self.w.extend_from_slice(&other.w);
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.x.iter().zip(&self.w).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Value and error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const TS_MAX_LEVEL: usize = 10;
const TS_TMAX: f64 = 6.5;

/// Double-exponential (tanh-sinh) quadrature on `[a, b]`.
///
/// The integrand receives the abscissa; nodes never coincide with the
/// endpoints, so integrable endpoint singularities are fine. Refinement
/// halves the step until successive sums agree to `tol` relative to the
/// integral of `|f|`.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    tanh_sinh_floor(f, a, b, tol, 0.0)
}

/// [`tanh_sinh`] that also accepts an absolute error below `floor`, for
/// pieces of a larger integral.
pub fn tanh_sinh_floor<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, floor: f64) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if !(a < b) {
        return domain(format!("tanh_sinh: bad interval [{a}, {b}]"));
    }
    let half = 0.5 * (b - a);
    let f0 = f(0.5 * (a + b));
    // weighted values at ±t; a side drops out once its node reaches the endpoint
    let mut pair = |t: f64| -> Option<(f64, f64)> {
        let u = 0.5 * PI * t.sinh();
        let e = (2.0 * u).exp();
        let d = (b - a) / (1.0 + e);
        if !(d > 0.0) || !e.is_finite() {
            return None;
        }
        let cu = u.cosh();
        let w = half * 0.5 * PI * t.cosh() / (cu * cu);
        let (xl, xr) = (a + d, b - d);
        let (mut v, mut va) = (0.0, 0.0);
        let mut inside = false;
        if xl > a {
            let fl = f(xl);
            v += fl;
            va += fl.abs();
            inside = true;
        }
        if xr < b {
            let fr = f(xr);
            v += fr;
            va += fr.abs();
            inside = true;
        }
        inside.then_some((w * v, w * va))
    };
    // sums over the nodes j·h for j ≡ start (mod stride), t > 0
    let mut sweep = |h: f64, start: usize, stride: usize, scale: f64| -> (f64, f64) {
        let mut s = 0.0;
        let mut sa = 0.0;
        let mut j = start;
        loop {
            let t = j as f64 * h;
            if t > TS_TMAX {
                break;
            }
            match pair(t) {
                Some((v, va)) => {
                    s += v;
                    sa += va;
                    if t > 3.0 && va <= 1e-18 * scale.max(sa) {
                        break;
                    }
                }
                None => break,
            }
            j += stride;
        }
        (s, sa)
    };
    let w0 = half * 0.5 * PI;
    let mut h = 0.5;
    let (s, sa) = sweep(h, 1, 1, (w0 * f0).abs());
    let mut sum = w0 * f0 + s;
    let mut abs = (w0 * f0).abs() + sa;
    let mut prev = sum * h;
    let mut err = f64::INFINITY;
    for _ in 1..TS_MAX_LEVEL {
        h *= 0.5;
        let (s, sa) = sweep(h, 1, 2, abs);
        sum += s;
        abs += sa;
        let cur = sum * h;
        err = (cur - prev).abs();
        let scale = (abs * h).max(f64::MIN_POSITIVE);
        if err <= (tol * scale).max(floor) {
            return Ok(Estimate { value: cur, error: err });
        }
        prev = cur;
    }
    let scale = abs * h;
    if err <= (1e3 * tol * scale).max(floor) {
        return Ok(Estimate { value: prev, error: err });
    }
    Err(Error::Quadrature { estimate: err, tolerance: tol * scale })
}

/// Adaptive bisection with Gauss–Legendre rules (`m` nodes per panel),
/// absolute tolerance `tol`. Gives up after `ADAPTIVE_MAX_PANELS` panels.
pub fn adaptive_gauss<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, m: usize) -> Result<Estimate> {
    let rule = gauss_rule(m);
    let whole = rule.integrate(a, b, &mut f);
    let floor = 4.0 * f64::EPSILON * rule.integrate(a, b, |x| f(x).abs());
    let mut stack = vec![(a, b, whole)];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0usize;
    let total = b - a;
    while let Some((lo, hi, est)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        let diff = (left + right - est).abs();
        let width = (hi - lo) / total;
        panels += 1;
        if diff <= (tol * width).max(floor * width) || mid <= lo || mid >= hi {
            value += left + right;
            error += diff;
            continue;
        }
        if panels > ADAPTIVE_MAX_PANELS {
            return Err(Error::Quadrature { estimate: diff, tolerance: tol });
        }
        stack.push((lo, mid, left));
        stack.push((mid, hi, right));
    }
    if error > 10.0 * tol {
        return Err(Error::Quadrature { estimate: error, tolerance: tol });
    }
    Ok(Estimate { value, error })
}

pub const ADAPTIVE_MAX_PANELS: usize = 1 << 18;

/// Maps `[0,1]` onto itself, clustering points near an endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EndpointMap {
    #[default]
    None,
    /// `t = τ^{1/α}` near the left endpoint.
    PowerLeft(f64),
    /// `t = 1 - (1-τ)^{1/α}` near the right endpoint.
    PowerRight(f64),
}

/// Settings for oscillatory integrals on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub points_per_oscillation: usize,
    pub tolerance: f64,
    pub map: EndpointMap,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { points_per_oscillation: 16, tolerance: 1e-13, map: EndpointMap::None }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_oscillation < 8 {
            return domain("quadrature: need at least 8 points per oscillation");
        }
        if !(self.tolerance > 0.0) {
            return domain("quadrature: tolerance must be positive");
        }
        match self.map {
            EndpointMap::PowerLeft(a) | EndpointMap::PowerRight(a) if !(a > 0.0 && a <= 1.0) => {
                domain(format!("quadrature: map exponent {a} not in (0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Nodes on `[0, T]` with `points_per_oscillation` Gauss points per
    /// half-period of `sin(omega t)`, split at `breaks` and graded towards
    /// singular endpoints.
    pub fn nodes(&self, horizon: f64, omega: f64, breaks: &[f64], singular: (bool, bool)) -> NodeSet {
        let mut cuts = vec![0.0];
        cuts.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < horizon));
        cuts.push(horizon);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let wavelength = PI / omega.max(1e-300);
        let mut out = NodeSet::default();
        let last = cuts.len() - 2;
        for (i, win) in cuts.windows(2).enumerate() {
            let (lo, hi) = (win[0], win[1]);
            let panels = (((hi - lo) / wavelength).ceil() as usize).max(1);
            let step = (hi - lo) / panels as f64;
            let m = self.points_per_oscillation;
            for p in 0..panels {
                let a = lo + p as f64 * step;
                let b = if p + 1 == panels { hi } else { a + step };
                let left_sing = i == 0 && p == 0 && singular.0;
                let right_sing = i == last && p + 1 == panels && singular.1;
                let set = if left_sing {
                    NodeSet::graded(a, b, true, 0.15, 24, m)
                } else if right_sing {
                    NodeSet::graded(a, b, false, 0.15, 24, m)
                } else {
                    NodeSet::gauss(a, b, m)
                };
                out.extend(&set);
            }
        }
        match self.map {
            EndpointMap::None => out,
            EndpointMap::PowerLeft(alpha) => remap(out, horizon, alpha, true),
            EndpointMap::PowerRight(alpha) => remap(out, horizon, alpha, false),
        }
    }
}

fn remap(set: NodeSet, horizon: f64, alpha: f64, left: bool) -> NodeSet {
    let inv = 1.0 / alpha;
    let mut x = Vec::with_capacity(set.len());
    let mut w = Vec::with_capacity(set.len());
    for (&xi, &wi) in set.x.iter().zip(&set.w) {
        let tau = xi / horizon;
        let (t, jac) = if left {
            (tau.powf(inv), inv * tau.powf(inv - 1.0))
        } else {
            let r = 1.0 - tau;
            (1.0 - r.powf(inv), inv * r.powf(inv - 1.0))
        };
        x.push(t * horizon);
        w.push(wi * jac);
    }
    NodeSet { x, w }
}

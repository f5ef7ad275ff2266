//! Uniform meshes on `(0, T)`, the spaces of piecewise polynomials of
//! degree `ν ∈ {0,1,2}` vanishing at `t = 0` for `ν ≥ 1`, mass matrices,
//! `L²` projection and error norms.

use crate::error::{domain, Error, Result};
use crate::fourier::lambda;
use crate::func::{EndpointBehaviour, TimeFunction};
use crate::linalg::{Cholesky, DenseMatrix};
use crate::quad::{gauss_rule, NodeSet};
use std::f64::consts::PI;

pub const MAX_LOCAL_DEGREE: usize = 3;

/// Local polynomial `Σ_d c_d s^d`, `s = t - t_e` on element `e`.
pub type LocalPoly = [f64; MAX_LOCAL_DEGREE + 1];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    n: usize,
    horizon: f64,
}

impl Mesh {
    pub fn new(n: usize, horizon: f64) -> Result<Self> {
        if n == 0 {
            return domain("mesh needs at least one element");
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return domain(format!("horizon {horizon} must be positive"));
        }
        Ok(Mesh { n, horizon })
    }

    pub fn elements(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn h(&self) -> f64 {
        self.horizon / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.horizon
        } else {
            i as f64 * self.h()
        }
    }

    /// Element containing `t` (right-continuous, last element closed).
    pub fn locate(&self, t: f64) -> usize {
        ((t / self.h()).floor().max(0.0) as usize).min(self.n - 1)
    }

    /// Quadrature on element `e` with `m` Gauss points, geometrically
    /// graded on elements touching a singular endpoint.
    pub fn element_rule(&self, e: usize, ends: EndpointBehaviour, m: usize) -> NodeSet {
        let (a, b) = (self.node(e), self.node(e + 1));
        if e == 0 && ends.left {
            NodeSet::graded(a, b, true, 0.15, 24, m)
        } else if e + 1 == self.n && ends.right {
            NodeSet::graded(a, b, false, 0.15, 24, m)
        } else {
            NodeSet::gauss(a, b, m)
        }
    }
}

/// Evaluate `p^{(d)}(s)`.
pub fn local_derivative(p: &LocalPoly, d: usize, s: f64) -> f64 {
    let mut acc = 0.0;
    for j in (d..=MAX_LOCAL_DEGREE).rev() {
        let mut fac = 1.0;
        for r in 0..d {
            fac *= (j - r) as f64;
        }
        acc = acc * s + fac * p[j];
    }
    acc
}

/// Derivative jump `left - right` of order `order` at mesh node `node`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub node: usize,
    pub order: usize,
    pub value: f64,
}

/// Sine/cosine moments `∫₀ʰ s^d cos(λs) ds`, `∫₀ʰ s^d sin(λs) ds` of one
/// mode on a mesh element.
#[derive(Debug, Clone, Copy)]
pub struct ModeMoments {
    pub lambda: f64,
    pub cos: LocalPoly,
    pub sin: LocalPoly,
}

impl ModeMoments {
    pub fn new(lam: f64, h: f64) -> Self {
        let z = lam * h;
        let mut jc = [0.0; 4];
        let mut js = [0.0; 4];
        if z <= 12.0 {
            let rule = gauss_rule(24);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let s = 0.5 * (1.0 + x);
                let (sn, cs) = (z * s).sin_cos();
                let mut p = 0.5 * w;
                for d in 0..4 {
                    jc[d] += p * cs;
                    js[d] += p * sn;
                    p *= s;
                }
            }
        } else {
            let (sz, cz) = z.sin_cos();
            jc[0] = sz / z;
            js[0] = (1.0 - cz) / z;
            for d in 1..4 {
                let df = d as f64;
                jc[d] = sz / z - df / z * js[d - 1];
                js[d] = -cz / z + df / z * jc[d - 1];
            }
        }
        let mut hp = h;
        for d in 0..4 {
            jc[d] *= hp;
            js[d] *= hp;
            hp *= h;
        }
        ModeMoments { lambda: lam, cos: jc, sin: js }
    }
}

/// `sin`/`cos` of `λ_k t_e = π(2k+1)e/(2n)` with exact argument reduction.
#[inline]
pub fn node_phase(k: usize, e: usize, n: usize) -> (f64, f64) {
    let four_n = 4 * n as u64;
    let r = ((2 * k as u64 + 1) % four_n) * (e as u64 % four_n) % four_n;
    (PI * r as f64 / (2 * n) as f64).sin_cos()
}

/// A piecewise polynomial of degree ≤ 3 supported on consecutive elements.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    pub mesh: Mesh,
    pub first: usize,
    pub pieces: Vec<LocalPoly>,
}

impl PiecewisePoly {
    pub fn zero(mesh: Mesh) -> Self {
        PiecewisePoly { mesh, first: 0, pieces: Vec::new() }
    }

    fn piece(&self, e: usize) -> Option<&LocalPoly> {
        e.checked_sub(self.first).and_then(|i| self.pieces.get(i))
    }

    pub fn support(&self) -> std::ops::Range<usize> {
        self.first..self.first + self.pieces.len()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    pub fn derivative(&self, d: usize, t: f64) -> f64 {
        let e = self.mesh.locate(t);
        self.piece(e).map_or(0.0, |p| local_derivative(p, d, t - self.mesh.node(e)))
    }

    /// `∫₀ᵀ p q dt`, exact.
    pub fn l2_inner(&self, other: &PiecewisePoly) -> f64 {
        let h = self.mesh.h();
        let mut s = 0.0;
        for e in self.support() {
            if let (Some(p), Some(q)) = (self.piece(e), other.piece(e)) {
                for (a, pa) in p.iter().enumerate() {
                    for (b, qb) in q.iter().enumerate() {
                        s += pa * qb * h.powi((a + b + 1) as i32) / (a + b + 1) as f64;
                    }
                }
            }
        }
        s
    }

    pub fn integral(&self) -> f64 {
        let h = self.mesh.h();
        self.pieces
            .iter()
            .map(|p| p.iter().enumerate().map(|(d, c)| c * h.powi(d as i32 + 1) / (d + 1) as f64).sum::<f64>())
            .sum()
    }

    /// The antiderivative vanishing at `t = 0`; raises the degree by one.
    pub fn antiderivative(&self) -> Result<PiecewisePoly> {
        let h = self.mesh.h();
        let mut pieces = Vec::with_capacity(self.mesh.elements() - self.first);
        let mut acc = 0.0;
        for e in self.first..self.mesh.elements() {
            let mut out = [0.0; 4];
            out[0] = acc;
            if let Some(p) = self.piece(e) {
                if p[3] != 0.0 {
                    return domain("antiderivative would exceed degree 3");
                }
                for d in 0..3 {
                    out[d + 1] = p[d] / (d + 1) as f64;
                }
                acc += p.iter().enumerate().map(|(d, c)| c * h.powi(d as i32 + 1) / (d + 1) as f64).sum::<f64>();
            }
            pieces.push(out);
        }
        Ok(PiecewisePoly { mesh: self.mesh, first: self.first, pieces })
    }

    /// Nonzero derivative jumps `p^{(d)}(t_m⁻) - p^{(d)}(t_m⁺)` at nodes
    /// `0..=n`, with `p ≡ 0` outside `(0, T)`.
    pub fn jumps(&self) -> Vec<Jump> {
        let h = self.mesh.h();
        let n = self.mesh.elements();
        let zero = [0.0; 4];
        let lo = self.first;
        let hi = (self.first + self.pieces.len()).min(n);
        let mut out = Vec::new();
        for m in lo..=hi {
            let left = if m == 0 { &zero } else { self.piece(m - 1).unwrap_or(&zero) };
            let right = if m == n { &zero } else { self.piece(m).unwrap_or(&zero) };
            for d in 0..=MAX_LOCAL_DEGREE {
                let v = local_derivative(left, d, h) - local_derivative(right, d, 0.0);
                if v != 0.0 {
                    out.push(Jump { node: m, order: d, value: v });
                }
            }
        }
        out
    }

    /// `(sine, cosine)` Fourier coefficients of mode `k`, from element moments.
    pub fn mode_coeffs(&self, k: usize, moments: &ModeMoments) -> (f64, f64) {
        let n = self.mesh.elements();
        let mut s = 0.0;
        let mut c = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let e = self.first + i;
            let (sn, cs) = node_phase(k, e, n);
            let mut pc = 0.0;
            let mut ps = 0.0;
            for d in 0..4 {
                pc += p[d] * moments.cos[d];
                ps += p[d] * moments.sin[d];
            }
            s += sn * pc + cs * ps;
            c += cs * pc - sn * ps;
        }
        let scale = 2.0 / self.mesh.horizon();
        (scale * s, scale * c)
    }

    /// `(sine, cosine)` coefficients of mode `k` from the node jumps alone.
    pub fn mode_coeffs_from_jumps(&self, k: usize, jumps: &[Jump]) -> (f64, f64) {
        let n = self.mesh.elements();
        let lam = lambda(k, self.mesh.horizon());
        let mut s = 0.0;
        let mut c = 0.0;
        for j in jumps {
            let (sn, cs) = node_phase(k, j.node, n);
            let p = j.value / lam.powi(j.order as i32 + 1);
            match j.order {
                0 => {
                    s -= p * cs;
                    c += p * sn;
                }
                1 => {
                    s += p * sn;
                    c += p * cs;
                }
                2 => {
                    s += p * cs;
                    c -= p * sn;
                }
                _ => {
                    s -= p * sn;
                    c -= p * cs;
                }
            }
        }
        let scale = 2.0 / self.mesh.horizon();
        (scale * s, scale * c)
    }
}

impl TimeFunction for PiecewisePoly {
    fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let n = self.mesh.elements();
        let end = (self.first + self.pieces.len()).min(n);
        (self.first.max(1)..=end.min(n - 1)).map(|i| self.mesh.node(i)).collect()
    }

    fn one_sided(&self, t: f64, right: bool) -> f64 {
        let n = self.mesh.elements();
        let x = t / self.mesh.h();
        let i = x.round();
        let e = if (x - i).abs() < 1e-9 {
            let i = i as usize;
            if right {
                i.min(n - 1)
            } else {
                i.max(1) - 1
            }
        } else {
            self.mesh.locate(t)
        };
        self.eval_on(e, t)
    }

    fn antiderivative(&self, t: f64) -> Option<f64> {
        PiecewisePoly::antiderivative(self).ok().map(|a| a.eval(t))
    }
}

/// The space of piecewise polynomials of degree `ν` on a uniform mesh.
///
/// Degrees of freedom (0-based):
/// * `ν = 0`: indicator of element `i`;
/// * `ν = 1`: hat function at node `t_{i+1}` (half hat at `T`);
/// * `ν = 2`: Lagrange functions, even index `2e` at the midpoint of element
///   `e`, odd index `2e+1` at node `t_{e+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeSpace {
    mesh: Mesh,
    degree: usize,
}

impl FeSpace {
    pub fn new(mesh: Mesh, degree: usize) -> Result<Self> {
        if degree > 2 {
            return domain(format!("degree {degree} not supported"));
        }
        Ok(FeSpace { mesh, degree })
    }

    pub fn uniform(n: usize, horizon: f64, degree: usize) -> Result<Self> {
        Self::new(Mesh::new(n, horizon)?, degree)
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dof(&self) -> usize {
        if self.degree == 2 {
            2 * self.mesh.elements()
        } else {
            self.mesh.elements()
        }
    }

    pub fn basis(&self, i: usize) -> Result<PiecewisePoly> {
        if i >= self.dof() {
            return Err(Error::Domain(format!("basis index {i} out of range (dof {})", self.dof())));
        }
        let mesh = self.mesh;
        let n = mesh.elements();
        let h = mesh.h();
        let (first, pieces) = match self.degree {
            0 => (i, vec![[1.0, 0.0, 0.0, 0.0]]),
            1 => {
                let rise = [0.0, 1.0 / h, 0.0, 0.0];
                if i + 1 < n {
                    (i, vec![rise, [1.0, -1.0 / h, 0.0, 0.0]])
                } else {
                    (i, vec![rise])
                }
            }
            _ => {
                let e = i / 2;
                let h2 = h * h;
                if i % 2 == 0 {
                    (e, vec![[0.0, 4.0 / h, -4.0 / h2, 0.0]])
                } else {
                    let rise = [0.0, -1.0 / h, 2.0 / h2, 0.0];
                    if e + 1 < n {
                        (e, vec![rise, [1.0, -3.0 / h, 2.0 / h2, 0.0]])
                    } else {
                        (e, vec![rise])
                    }
                }
            }
        };
        Ok(PiecewisePoly { mesh, first, pieces })
    }

    pub fn basis_all(&self) -> Vec<PiecewisePoly> {
        (0..self.dof()).map(|i| self.basis(i).expect("index in range")).collect()
    }

    pub fn basis_eval(&self, i: usize, t: f64) -> Result<f64> {
        if !(0.0..=self.mesh.horizon()).contains(&t) {
            return domain(format!("t = {t} outside [0, {}]", self.mesh.horizon()));
        }
        Ok(self.basis(i)?.eval(t))
    }

    /// Interpolation nodes of the degrees of freedom (`ν ≥ 1`) or element
    /// midpoints (`ν = 0`).
    pub fn dof_points(&self) -> Vec<f64> {
        let h = self.mesh.h();
        match self.degree {
            0 => (0..self.dof()).map(|i| (i as f64 + 0.5) * h).collect(),
            1 => (0..self.dof()).map(|i| self.mesh.node(i + 1)).collect(),
            _ => (0..self.dof())
                .map(|i| if i % 2 == 0 { (i / 2) as f64 * h + 0.5 * h } else { self.mesh.node(i / 2 + 1) })
                .collect(),
        }
    }

    /// `Σ_i x_i ψ_i` as a piecewise polynomial.
    pub fn combine(&self, x: &[f64]) -> PiecewisePoly {
        let n = self.mesh.elements();
        let mut pieces = vec![[0.0; 4]; n];
        for (i, xi) in x.iter().enumerate() {
            let b = self.basis(i).expect("index in range");
            for (k, p) in b.pieces.iter().enumerate() {
                for d in 0..4 {
                    pieces[b.first + k][d] += xi * p[d];
                }
            }
        }
        PiecewisePoly { mesh: self.mesh, first: 0, pieces }
    }

    pub fn mass_matrix(&self) -> DenseMatrix {
        let dof = self.dof();
        let basis = self.basis_all();
        let reach = if self.degree == 2 { 3 } else { 1 };
        let mut m = DenseMatrix::zeros(dof, dof);
        for i in 0..dof {
            for j in i.saturating_sub(reach)..(i + reach + 1).min(dof) {
                m[(i, j)] = basis[i].l2_inner(&basis[j]);
            }
        }
        m
    }

    /// `L²` projection onto the space.
    pub fn l2_project(&self, u: &dyn TimeFunction) -> Result<DofVector> {
        let n = self.mesh.elements();
        if self.degree == 0 {
            if u.antiderivative(0.0).is_some() {
                let h = self.mesh.h();
                let vals = (0..n)
                    .map(|e| {
                        let a = u.antiderivative(self.mesh.node(e)).unwrap_or(0.0);
                        let b = u.antiderivative(self.mesh.node(e + 1)).unwrap_or(0.0);
                        (b - a) / h
                    })
                    .collect();
                return Ok(DofVector::new(*self, vals));
            }
        }
        let b = self.load_l2(u);
        let x = Cholesky::new(&self.mass_matrix())?.solve(&b);
        Ok(DofVector::new(*self, x))
    }

    /// `b_i = ∫ u ψ_i` by element quadrature.
    pub fn load_l2(&self, u: &dyn TimeFunction) -> Vec<f64> {
        let ends = u.singular_ends();
        let mut b = vec![0.0; self.dof()];
        let basis = self.basis_all();
        for e in 0..self.mesh.elements() {
            let rule = self.mesh.element_rule(e, ends, 20);
            let uw: Vec<f64> = rule.x.iter().zip(&rule.w).map(|(&x, &w)| w * u.value(x)).collect();
            for i in self.element_dofs(e) {
                let p = &basis[i];
                b[i] += rule.x.iter().zip(&uw).map(|(&x, g)| g * p.eval_on(e, x)).sum::<f64>();
            }
        }
        b
    }

    /// Degrees of freedom whose support meets element `e`.
    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        let dof = self.dof();
        match self.degree {
            0 => vec![e],
            1 => [e.checked_sub(1), Some(e)].into_iter().flatten().filter(|&i| i < dof).collect(),
            _ => [e.checked_sub(1).map(|p| 2 * p + 1), Some(2 * e), Some(2 * e + 1)]
                .into_iter()
                .flatten()
                .collect(),
        }
    }

    /// `‖u - Σ x_i ψ_i‖_{L²(0,T)}` by element quadrature.
    pub fn l2_error(&self, u: &dyn TimeFunction, x: &[f64]) -> f64 {
        let uh = self.combine(x);
        let ends = u.singular_ends();
        let mut s = 0.0;
        for e in 0..self.mesh.elements() {
            let rule = self.mesh.element_rule(e, ends, 20);
            s += rule.integrate(|t| {
                let d = u.value(t) - uh.eval_on(e, t);
                d * d
            });
        }
        s.sqrt()
    }
}

impl PiecewisePoly {
    /// Evaluate using the polynomial of element `e` (no lookup).
    pub fn eval_on(&self, e: usize, t: f64) -> f64 {
        self.piece(e).map_or(0.0, |p| local_derivative(p, 0, t - self.mesh.node(e)))
    }
}

/// Coefficients of a finite element function.
#[derive(Debug, Clone, PartialEq)]
pub struct DofVector {
    pub space: FeSpace,
    pub values: Vec<f64>,
}

impl DofVector {
    pub fn new(space: FeSpace, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), space.dof(), "dof vector length mismatch");
        DofVector { space, values }
    }

    pub fn to_poly(&self) -> PiecewisePoly {
        self.space.combine(&self.values)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.to_poly().eval(t)
    }

    pub fn l2_norm(&self) -> f64 {
        let p = self.to_poly();
        p.l2_inner(&p).sqrt()
    }

    pub fn l2_error(&self, u: &dyn TimeFunction) -> f64 {
        self.space.l2_error(u, &self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::FnTime;

    #[test]
    fn basis_lagrange_property() {
        for nu in 0..=2 {
            let sp = FeSpace::uniform(5, 2.0, nu).unwrap();
            let pts = sp.dof_points();
            for i in 0..sp.dof() {
                for (j, &t) in pts.iter().enumerate() {
                    let v = sp.basis_eval(i, t).unwrap();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-14, "nu={nu} i={i} j={j} v={v}");
                }
                if nu > 0 {
                    assert_eq!(sp.basis_eval(i, 0.0).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn mass_matrix_entries() {
        let sp = FeSpace::uniform(4, 2.0, 1).unwrap();
        let m = sp.mass_matrix();
        let h = 0.5;
        assert!((m[(1, 1)] - 4.0 * h / 6.0).abs() < 1e-15);
        assert!((m[(1, 2)] - h / 6.0).abs() < 1e-15);
        assert!((m[(3, 3)] - h / 3.0).abs() < 1e-15);
        let sp0 = FeSpace::uniform(4, 2.0, 0).unwrap();
        assert!(sp0.mass_matrix().max_abs_diff(&{
            let mut i = DenseMatrix::identity(4);
            i.scale(h);
            i
        }) < 1e-15);
    }

    // ∫_0^h s^d g(λs) ds with one Gauss rule per period of θ = λs, so g only
    // sees arguments in [0, 2π)
    fn period_moment(lam: f64, h: f64, d: usize, g: fn(f64) -> f64) -> f64 {
        let z = lam * h;
        let tau = 2.0 * PI;
        let full = (z / tau).floor() as usize;
        let rule = crate::quad::gauss_rule(40);
        let mut acc = 0.0;
        for j in 0..=full {
            let base = j as f64 * tau;
            let top = if j == full { z - base } else { tau };
            if top <= 0.0 {
                continue;
            }
            acc += rule.integrate(0.0, top, |p| (base + p).powi(d as i32) * g(p));
        }
        acc * lam.powi(-(d as i32) - 1)
    }

    #[test]
    fn moments_against_quadrature() {
        for &(lam, h) in &[(0.3, 0.5), (7.0, 1.0), (40.0, 0.5), (1234.5, 0.01), (1e5, 0.3)] {
            let m = ModeMoments::new(lam, h);
            for d in 0..4 {
                let ec = period_moment(lam, h, d, f64::cos);
                let es = period_moment(lam, h, d, f64::sin);
                let scale = h.powi(d as i32 + 1);
                assert!((m.cos[d] - ec).abs() < 1e-13 * scale, "lam={lam} d={d}");
                assert!((m.sin[d] - es).abs() < 1e-13 * scale, "lam={lam} d={d}");
            }
        }
    }

    #[test]
    fn jump_coefficients_match_moments() {
        for nu in 0..=2 {
            let sp = FeSpace::uniform(6, 2.0, nu).unwrap();
            for i in 0..sp.dof() {
                let b = sp.basis(i).unwrap();
                let jumps = b.jumps();
                for k in [0usize, 1, 5, 11, 12, 40, 999] {
                    let mm = ModeMoments::new(lambda(k, 2.0), sp.mesh().h());
                    let (s1, c1) = b.mode_coeffs(k, &mm);
                    let (s2, c2) = b.mode_coeffs_from_jumps(k, &jumps);
                    assert!((s1 - s2).abs() < 1e-13 && (c1 - c2).abs() < 1e-13, "nu={nu} i={i} k={k}");
                }
            }
        }
    }

    #[test]
    fn piecewise_constant_closed_form() {
        let n = 8;
        let sp = FeSpace::uniform(n, 2.0, 0).unwrap();
        for i in 0..n {
            let b = sp.basis(i).unwrap();
            for k in 0..1000 {
                let x = (0.5 + k as f64) * PI / (2 * n) as f64;
                let a = 2.0 / n as f64 * x.sin() / x;
                let phase = (2 * i + 1) as f64 * x;
                let mm = ModeMoments::new(lambda(k, 2.0), sp.mesh().h());
                let (s, c) = b.mode_coeffs(k, &mm);
                assert!((s - a * phase.sin()).abs() < 1e-14, "i={i} k={k}");
                assert!((c - a * phase.cos()).abs() < 1e-14, "i={i} k={k}");
            }
        }
    }

    #[test]
    fn projection_examples() {
        let sp = FeSpace::uniform(2, 2.0, 0).unwrap();
        let u = crate::func::TestFunction::new(crate::func::TestKind::Pow23, 2.0);
        let x = sp.l2_project(&u).unwrap();
        assert!((x.values[0] - 0.6).abs() < 1e-15);
        let lin = FnTime(|t| t);
        let x = sp.l2_project(&lin).unwrap();
        assert!((x.values[0] - 0.5).abs() < 1e-14 && (x.values[1] - 1.5).abs() < 1e-14);
        assert!((x.l2_error(&lin) - (2.0f64 / 12.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn projection_reproduces_space() {
        for nu in 0..=2 {
            let sp = FeSpace::uniform(7, 3.0, nu).unwrap();
            let x: Vec<f64> = (0..sp.dof()).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect();
            let p = sp.combine(&x);
            let y = sp.l2_project(&p).unwrap();
            for (a, b) in x.iter().zip(&y.values) {
                assert!((a - b).abs() < 1e-13, "nu={nu}");
            }
            assert!(sp.l2_error(&p, &x) < 1e-14);
        }
    }

    #[test]
    fn antiderivative_is_exact() {
        let sp = FeSpace::uniform(5, 2.0, 2).unwrap();
        for i in 0..sp.dof() {
            let b = sp.basis(i).unwrap();
            let a = b.antiderivative().unwrap();
            assert_eq!(a.eval(0.0), 0.0);
            for j in 0..50 {
                let t = 0.0137 + 1.97 * j as f64 / 50.0;
                assert!((a.derivative(1, t) - b.eval(t)).abs() < 1e-13);
            }
            assert!((a.eval(2.0) - b.integral()).abs() < 1e-14);
        }
    }
}

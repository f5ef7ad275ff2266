//! Inf-sup constants, the piecewise-constant Fourier machinery, the
//! `H_T`-based projection and the residual `Q_h H_T^{-1}(u - Q_h u)`.

use crate::assembly::{hilbert_matrix, pairing_matrix, AssemblyMethod, LoadSampler};
use crate::error::{domain, Error, Result};
use crate::fem::{DofVector, FeSpace, Mesh, PiecewisePoly};
use crate::func::{Differentiable, TimeFunction};
use crate::linalg::{min_generalized_singular, DenseMatrix, LuSolver};
use crate::specfun::{gamma_kn, hurwitz_unchecked};
use std::f64::consts::PI;

/// `x_k = (π/2 + kπ)/(2n)`
#[inline]
pub fn xk(k: usize, n: usize) -> f64 {
    (0.5 + k as f64) * PI / (2 * n) as f64
}

/// Limit `2√3/π²` of `c_S(u_h)` for a fixed cut-off index.
pub fn cs_limit() -> f64 {
    2.0 * 3f64.sqrt() / (PI * PI)
}

/// Lower bound `(1/2)(2√3/π²)(8/(2+1/n)²)` for `c_S/h` at `T = 2`.
pub fn cs_floor_over_h(n: usize) -> f64 {
    let q = 2.0 + 1.0 / n as f64;
    0.5 * cs_limit() * 8.0 / (q * q)
}

#[derive(Debug, Clone)]
pub struct InfSupReport {
    pub n: usize,
    pub nu: usize,
    pub horizon: f64,
    pub c_s: f64,
    pub c_s_over_h: f64,
    pub u_min: DofVector,
}

/// Hilbert matrix with the cheapest exact route for the degree.
pub fn assemble(space: &FeSpace) -> Result<DenseMatrix> {
    let method = if space.degree() == 0 { AssemblyMethod::FoldedGamma } else { AssemblyMethod::Folded };
    hilbert_matrix(space, method)
}

/// Discrete inf-sup constant of `⟨u_h, H_T v_h⟩` on `S_h^ν × S_h^ν`.
pub fn infsup_constant(nu: usize, n: usize, horizon: f64) -> Result<InfSupReport> {
    let space = FeSpace::uniform(n, horizon, nu)?;
    let b = assemble(&space)?;
    infsup_from_matrix(&space, &b)
}

pub fn infsup_from_matrix(space: &FeSpace, b: &DenseMatrix) -> Result<InfSupReport> {
    let g = min_generalized_singular(b, &space.mass_matrix())?;
    let h = space.mesh().h();
    Ok(InfSupReport {
        n: space.mesh().elements(),
        nu: space.degree(),
        horizon: space.mesh().horizon(),
        c_s: g.sigma,
        c_s_over_h: g.sigma / h,
        u_min: DofVector::new(*space, g.vector),
    })
}

/// Cosine coefficient `ū_k = (2/n)(sin x_k/x_k) Σ_i u_i cos((2i-1)x_k)` of a
/// piecewise constant function.
pub fn pwc_cos_coeffs(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    let xk = xk(k, n);
    let s: f64 = x.iter().enumerate().map(|(i, u)| u * crate::fem::node_phase(k, 2 * i + 1, 2 * n).1).sum();
    2.0 / n as f64 * xk.sin() / xk * s
}

/// Sine coefficient `(2/n)(sin x_k/x_k) Σ_i u_i sin((2i-1)x_k)`.
pub fn pwc_sin_coeffs(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    let xk = xk(k, n);
    let s: f64 = x.iter().enumerate().map(|(i, u)| u * crate::fem::node_phase(k, 2 * i + 1, 2 * n).0).sum();
    2.0 / n as f64 * xk.sin() / xk * s
}

fn pwc_norm_sq(x: &[f64], horizon: f64) -> f64 {
    horizon / x.len() as f64 * x.iter().map(|v| v * v).sum::<f64>()
}

/// Partial Parseval sums for a piecewise constant function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEquivalence {
    /// `‖u_h‖²`
    pub norm_sq: f64,
    /// `(T/2) Σ_{k≤n²} ū_k²`
    pub lower_sum: f64,
    /// `(T/2)(π²/3) Σ_{k≤n-1} ū_k²`
    pub upper_sum: f64,
}

impl NormEquivalence {
    /// Checks `S ≤ ‖u‖² ≤ 2S` and `‖u‖² ≤ S'`, naming the first failure.
    pub fn check(&self) -> Result<()> {
        let slack = 1e-12 * self.norm_sq;
        if self.lower_sum > self.norm_sq + slack {
            return domain(format!("partial sum {} exceeds the norm {}", self.lower_sum, self.norm_sq));
        }
        if self.norm_sq > 2.0 * self.lower_sum + slack {
            return domain(format!("norm {} exceeds twice the partial sum {}", self.norm_sq, self.lower_sum));
        }
        if self.norm_sq > self.upper_sum + slack {
            return domain(format!("norm {} exceeds the π²/3 bound {}", self.norm_sq, self.upper_sum));
        }
        Ok(())
    }
}

pub fn norm_equivalence_check(x: &[f64], horizon: f64) -> NormEquivalence {
    let n = x.len();
    let mut lower = 0.0;
    let mut upper = 0.0;
    for k in (0..=n * n).rev() {
        let c = pwc_cos_coeffs(x, k);
        lower += c * c;
        if k < n {
            upper += c * c;
        }
    }
    NormEquivalence {
        norm_sq: pwc_norm_sq(x, horizon),
        lower_sum: 0.5 * horizon * lower,
        upper_sum: 0.5 * horizon * PI * PI / 3.0 * upper,
    }
}

/// `c_S(u_h)` from the cut-off index `M`.
pub fn cs_from_cutoff(n: usize, m: usize) -> f64 {
    let nf = n as f64;
    let q = (2 * m + 1) as f64;
    cs_limit() * (16.0 * nf * nf - 8.0 * nf * q) / (4.0 * nf - q).powi(2)
}

/// Smallest `M` with `‖u_h‖² ≤ (T/2)(π²/3) Σ_{k≤M} ū_k²` and the constant
/// `c_S(u_h)`.
pub fn minimal_m_and_cs(x: &[f64], horizon: f64) -> Result<(usize, f64)> {
    let n = x.len();
    let norm_sq = pwc_norm_sq(x, horizon);
    if norm_sq == 0.0 {
        return domain("c_S(u_h) is undefined for u_h = 0");
    }
    let factor = 0.5 * horizon * PI * PI / 3.0;
    let mut acc = 0.0;
    for m in 0..n {
        let c = pwc_cos_coeffs(x, m);
        acc += c * c;
        if norm_sq <= factor * acc * (1.0 + 1e-13) {
            return Ok((m, cs_from_cutoff(n, m)));
        }
    }
    Ok((n - 1, cs_from_cutoff(n, n - 1)))
}

/// `w_h = Q_h H_T^{-1} u_h` for piecewise constant `u_h`, through the
/// folded closed form with `γ(k, n)`.
pub fn qh_ht_inverse_closed(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let xk = xk(k, n);
        let r = (2 * k + 1) as f64 / (4 * n - 1 - 2 * k) as f64;
        let fold = gamma_kn(k, n)? - gamma_kn(2 * n - 1 - k, n)? * r * r;
        weights.push(pwc_cos_coeffs(x, k) * fold * xk.sin() / xk);
    }
    Ok((0..n)
        .map(|j| weights.iter().enumerate().map(|(k, w)| w * crate::fem::node_phase(k, 2 * j + 1, 2 * n).0).sum())
        .collect())
}

/// `Q_h H_T^{-1} u_h = B x / h` for piecewise constant `u_h`.
pub fn qh_ht_inverse_matrix(b: &DenseMatrix, x: &[f64], h: f64) -> Vec<f64> {
    b.matvec(x).into_iter().map(|v| v / h).collect()
}

pub fn pwc_norm(x: &[f64], horizon: f64) -> f64 {
    pwc_norm_sq(x, horizon).sqrt()
}

/// Galerkin solver for `⟨u_h, H_T v_h⟩ = ⟨u, H_T v_h⟩` on a fixed space.
pub struct HilbertProjector {
    space: FeSpace,
    matrix: DenseMatrix,
    lu: LuSolver,
}

#[derive(Debug, Clone)]
pub struct Projection {
    pub uh: DofVector,
    pub error: f64,
}

impl HilbertProjector {
    pub fn new(space: FeSpace) -> Result<Self> {
        let matrix = assemble(&space)?;
        Self::with_matrix(space, matrix)
    }

    pub fn with_matrix(space: FeSpace, matrix: DenseMatrix) -> Result<Self> {
        let lu = LuSolver::new(&matrix)?;
        Ok(HilbertProjector { space, matrix, lu })
    }

    pub fn space(&self) -> &FeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Solves for the coefficients given a precomputed `H_T^{-1} u` sampler.
    pub fn solve_with(&self, sampler: &LoadSampler) -> Result<Vec<f64>> {
        if sampler.mesh() != self.space.mesh() {
            return Err(Error::Dimension("load sampler built on a different mesh".into()));
        }
        let f = sampler.load(&self.space.basis_all());
        self.lu.solve(&f)
    }

    pub fn project(&self, u: &dyn TimeFunction) -> Result<Projection> {
        let sampler = LoadSampler::new(u, self.space.mesh())?;
        self.project_with(u, &sampler)
    }

    pub fn project_with(&self, u: &dyn TimeFunction, sampler: &LoadSampler) -> Result<Projection> {
        let x = self.solve_with(sampler)?;
        let error = self.space.l2_error(u, &x);
        Ok(Projection { uh: DofVector::new(self.space, x), error })
    }
}

/// `H_T`-based projection of `u` onto `S_h^ν` and its `L²` error.
pub fn ht_project(u: &dyn TimeFunction, nu: usize, n: usize, horizon: f64) -> Result<Projection> {
    HilbertProjector::new(FeSpace::uniform(n, horizon, nu)?)?.project(u)
}

/// `w_h = Q_h H_T^{-1}(u - Q_h u)` for piecewise constants, computed as
/// `(f - B q)/h` with `f_j = ⟨u, H_T ψ_j⟩` and `q` the cell averages of `u`.
pub fn qh_ht_inverse_residual(b: &DenseMatrix, sampler: &LoadSampler, q: &[f64]) -> Vec<f64> {
    let mesh = sampler.mesh();
    let h = mesh.h();
    let space = FeSpace::new(mesh, 0).expect("degree 0");
    let f = sampler.load(&space.basis_all());
    let bq = b.matvec(q);
    f.iter().zip(&bq).map(|(a, b)| (a - b) / h).collect()
}

/// Residual quantities for piecewise constants.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub n: usize,
    /// `‖Q_h H_T^{-1}(u - Q_h u)‖`
    pub wh_norm: f64,
    /// `‖u_h - Q_h u‖`
    pub diff_norm: f64,
    /// `‖w_h‖/‖u_h - Q_h u‖`, the constant realised by this `u_h - Q_h u`
    pub cs_ratio: f64,
    /// cut-off index and `c_S(u_h - Q_h u)` from the closed formula
    pub cutoff: usize,
    pub cs_formula: f64,
    /// `‖u - u_h‖`
    pub error: f64,
}

/// Runs the `ν = 0` projection and the residual analysis for `u`.
pub fn cs_of_residual(projector: &HilbertProjector, u: &dyn TimeFunction, sampler: &LoadSampler) -> Result<ResidualReport> {
    let space = *projector.space();
    if space.degree() != 0 {
        return domain("residual analysis is defined for piecewise constants");
    }
    let horizon = space.mesh().horizon();
    let proj = projector.project_with(u, sampler)?;
    let q = space.l2_project(u)?.values;
    let w = qh_ht_inverse_residual(projector.matrix(), sampler, &q);
    let diff: Vec<f64> = proj.uh.values.iter().zip(&q).map(|(a, b)| a - b).collect();
    let wh_norm = pwc_norm(&w, horizon);
    let diff_norm = pwc_norm(&diff, horizon);
    let (cutoff, cs_formula) = minimal_m_and_cs(&diff, horizon)?;
    Ok(ResidualReport {
        n: space.mesh().elements(),
        wh_norm,
        diff_norm,
        cs_ratio: wh_norm / diff_norm,
        cutoff,
        cs_formula,
        error: proj.error,
    })
}

/// The splitting `u - Q_h u = u¹ + u²` on each element.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub mesh: Mesh,
    /// `∂_t u(t_{i-1})`, `i = 1..n`
    pub slopes: Vec<f64>,
    pub d0: f64,
    pub u1: PiecewisePoly,
    pub u1_norm: f64,
    pub u2_norm: f64,
    /// `(1/3) h² ‖∂_tt u‖`
    pub u2_bound: f64,
    pub d2_norm: f64,
}

/// `G̃(s, t)` on the element `[a, b]` containing `t`.
fn green_tilde(s: f64, t: f64, a: f64, b: f64) -> f64 {
    let h = b - a;
    if s < t {
        (s - a).powi(2) - h * (2.0 * t - a - b)
    } else {
        (s - b).powi(2)
    }
}

impl SplitResult {
    /// `u²(t) = -(1/(2h)) ∫ G̃(s,t) ∂_tt u(s) ds` over the element of `t`.
    pub fn u2(&self, u: &dyn Differentiable, t: f64) -> f64 {
        let e = self.mesh.locate(t);
        let (a, b) = (self.mesh.node(e), self.mesh.node(e + 1));
        let g = |s: f64| green_tilde(s, t, a, b) * u.second_derivative(s);
        let r = crate::quad::gauss_rule(20);
        let v = r.integrate(a, t, g) + r.integrate(t, b, g);
        -v / (2.0 * self.mesh.h())
    }
}

pub fn split_u1_u2(u: &dyn Differentiable, n: usize, horizon: f64) -> Result<SplitResult> {
    let mesh = Mesh::new(n, horizon)?;
    let h = mesh.h();
    let slopes: Vec<f64> = (0..n).map(|i| u.derivative(mesh.node(i))).collect();
    let pieces = slopes.iter().map(|d| [-0.5 * h * d, *d, 0.0, 0.0]).collect();
    let u1 = PiecewisePoly { mesh, first: 0, pieces };
    let u1_norm = u1.l2_inner(&u1).sqrt();
    let mut split = SplitResult {
        mesh,
        d0: slopes[0],
        slopes,
        u1,
        u1_norm,
        u2_norm: 0.0,
        u2_bound: 0.0,
        d2_norm: 0.0,
    };
    let mut u2sq = 0.0;
    let mut d2sq = 0.0;
    let ends = u.singular_ends();
    for e in 0..n {
        let rule = mesh.element_rule(e, ends, 12);
        u2sq += rule.integrate(|t| split.u2(u, t).powi(2));
        d2sq += rule.integrate(|t| u.second_derivative(t).powi(2));
    }
    split.u2_norm = u2sq.sqrt();
    split.d2_norm = d2sq.sqrt();
    split.u2_bound = h * h * split.d2_norm / 3.0;
    Ok(split)
}

/// `x cos x - sin x`, accurate for small `x`.
fn xcos_minus_sin(x: f64) -> f64 {
    if x.abs() > 0.5 {
        return x * x.cos() - x.sin();
    }
    // Σ_{k≥1} (-1)^k 2k x^{2k+1}/(2k+1)!
    let x2 = x * x;
    let mut term = x * x2 / 6.0; // x^{2k+1}/(2k+1)! for k = 1
    let mut s = 0.0;
    for k in 1..20 {
        let kf = k as f64;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        s += sign * 2.0 * kf * term;
        term *= x2 / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
    }
    s
}

/// `F(x)` of the representation `w_i¹ = Σ_k F(x_k) ū_k¹ sin((2i-1)x_k)`.
pub fn f_kernel(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 0.5 * PI) {
        return domain(format!("F(x) needs 0 < x ≤ π/2, got {x}"));
    }
    let (s, c) = x.sin_cos();
    let a = x / PI;
    let pi2 = PI * PI;
    let pi3 = pi2 * PI;
    let plus = c * hurwitz_unchecked(2, 1.0 + a) / pi2 - s * hurwitz_unchecked(3, 1.0 + a) / pi3;
    let minus = c * hurwitz_unchecked(2, 1.0 - a) / pi2 + s * hurwitz_unchecked(3, 1.0 - a) / pi3;
    let ratio = x.powi(3) / xcos_minus_sin(x);
    Ok((1.0 + ratio * (plus - minus)) * s / x)
}

/// `[F(x)/x (cos x - sin x/x)]² - (2/(3π)) x²`, nonpositive on `(0, π/2]`.
pub fn f_bound_gap(x: f64) -> Result<f64> {
    let f = f_kernel(x)?;
    let lhs = (f / x * xcos_minus_sin(x) / x).powi(2);
    Ok(lhs - 2.0 / (3.0 * PI) * x * x)
}

/// `ū_k¹` of the piecewise linear part `u¹`.
pub fn u1_cos_coeffs(slopes: &[f64], horizon: f64, k: usize) -> f64 {
    let n = slopes.len();
    let h = horizon / n as f64;
    let x = xk(k, n);
    let s: f64 = slopes.iter().enumerate().map(|(i, d)| d * crate::fem::node_phase(k, 2 * i + 1, 2 * n).0).sum();
    h / n as f64 * xcos_minus_sin(x) / (x * x) * s
}

/// `‖w_h¹‖²` for `w_h¹ = Q_h H_T^{-1} u¹` and the bound
/// `(π/96) h⁴ ‖∂_tt u‖² + (π/48) h³ (∂_t u(0))²`.
#[derive(Debug, Clone)]
pub struct Wh1 {
    pub coeffs: Vec<f64>,
    pub norm_sq: f64,
    pub bound: f64,
}

pub fn wh1_norm(split: &SplitResult) -> Result<Wh1> {
    let n = split.mesh.elements();
    let horizon = split.mesh.horizon();
    let h = split.mesh.h();
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        weights.push(f_kernel(xk(k, n))? * u1_cos_coeffs(&split.slopes, horizon, k));
    }
    let coeffs: Vec<f64> = (0..n)
        .map(|i| weights.iter().enumerate().map(|(k, w)| w * crate::fem::node_phase(k, 2 * i + 1, 2 * n).0).sum())
        .collect();
    let norm_sq = h * coeffs.iter().map(|v| v * v).sum::<f64>();
    let bound = PI / 96.0 * h.powi(4) * split.d2_norm.powi(2) + PI / 48.0 * h.powi(3) * split.d0 * split.d0;
    Ok(Wh1 { coeffs, norm_sq, bound })
}

/// `Q_h H_T^{-1} u¹` by exact folding of `⟨H_T ψ_i, u¹⟩`, an independent
/// route to [`wh1_norm`].
pub fn wh1_by_pairing(split: &SplitResult) -> Result<Vec<f64>> {
    let space = FeSpace::new(split.mesh, 0)?;
    let p = pairing_matrix(&space.basis_all(), std::slice::from_ref(&split.u1))?;
    Ok((0..p.rows()).map(|i| p[(i, 0)] / split.mesh.h()).collect())
}

/// `eoc_r = log2(v_{r-1}/v_r)`.
pub fn eoc(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return domain("eoc needs at least two values");
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return domain(format!("eoc needs positive values, got {v}"));
    }
    Ok(values.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

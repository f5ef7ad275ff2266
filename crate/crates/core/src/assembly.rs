//! Galerkin matrices and load vectors for `H_T` on piecewise polynomial
//! spaces.
//!
//! Entries are `(T/2) Σ_k s_k(ψ_j) c_k(ψ_i)` over all Fourier modes. The
//! modes `k < 2n` are summed directly from exact element moments. For
//! `k ≥ 2n` the coefficients are written through the derivative jumps of
//! the basis functions, whose node phases repeat with period `2n` in `k`;
//! the remaining sums over `μ` in `k = k₀ + 2μn` are Hurwitz zeta values.

use crate::error::{domain, Error, Result};
use crate::fem::{node_phase, FeSpace, Jump, Mesh, ModeMoments, PiecewisePoly};
use crate::fourier::{fourier_coeffs, kernel_apply_inverse, lambda, Basis};
use crate::func::TimeFunction;
use crate::linalg::DenseMatrix;
use crate::quad::{NodeSet, QuadratureSpec};
use crate::specfun::{gamma_kn, hurwitz_unchecked};
use faer::Mat;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::{Read, Write};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum AssemblyMethod {
    /// Exact folding of all modes, any degree.
    #[default]
    Folded,
    /// Closed form for piecewise constants through `γ(k, n)`.
    FoldedGamma,
    /// Direct mode sum, doubling the number of modes until the largest
    /// entry change drops below `tolerance`.
    Truncated { tolerance: f64, start_modes: usize, max_modes: usize },
}

/// Scaled coefficients `(T/2) s_k` or `(T/2) c_k` as combinations of node
/// phases: `Σ σ Δ trig(λ_k t_m) / λ_k^{r+1}`.
#[derive(Debug, Clone, Copy)]
struct Atom {
    node: usize,
    power: u32,
    weight: f64,
    is_sin: bool,
}

fn sine_atoms(jumps: &[Jump]) -> Vec<Atom> {
    jumps
        .iter()
        .map(|j| {
            let (sign, is_sin) = match j.order {
                0 => (-1.0, false),
                1 => (1.0, true),
                2 => (1.0, false),
                _ => (-1.0, true),
            };
            Atom { node: j.node, power: j.order as u32 + 1, weight: sign * j.value, is_sin }
        })
        .collect()
}

fn cosine_atoms(jumps: &[Jump]) -> Vec<Atom> {
    jumps
        .iter()
        .map(|j| {
            let (sign, is_sin) = match j.order {
                0 => (1.0, true),
                1 => (1.0, false),
                2 => (-1.0, true),
                _ => (-1.0, false),
            };
            Atom { node: j.node, power: j.order as u32 + 1, weight: sign * j.value, is_sin }
        })
        .collect()
}

/// `Σ_{k₀<2n} trig(q π(2k₀+1)/(2n)) Σ_{μ≥1} λ_{k₀+2μn}^{-p}` for `q ∈ [0, 2n]`.
struct TailTables {
    min_power: u32,
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

impl TailTables {
    fn new(n: usize, horizon: f64, min_power: u32, max_power: u32) -> Self {
        let modes = 2 * n;
        let base = horizon / (2.0 * PI * n as f64);
        let mut z = vec![vec![0.0; modes]; (max_power - min_power + 1) as usize];
        for k0 in 0..modes {
            let a = (2 * k0 + 1) as f64 / (4 * n) as f64;
            for p in min_power..=max_power {
                z[(p - min_power) as usize][k0] = base.powi(p as i32) * hurwitz_unchecked(p, 1.0 + a);
            }
        }
        let phases: Vec<(f64, f64)> = (0..4 * n).map(|r| (PI * r as f64 / (2 * n) as f64).sin_cos()).collect();
        let per_q = |q: usize| -> (Vec<f64>, Vec<f64>) {
            let mut c = vec![0.0; z.len()];
            let mut s = vec![0.0; z.len()];
            for k0 in 0..modes {
                let r = (q * (2 * k0 + 1)) % (4 * n);
                let (sn, cs) = phases[r];
                for (pi, zp) in z.iter().enumerate() {
                    c[pi] += cs * zp[k0];
                    s[pi] += sn * zp[k0];
                }
            }
            (c, s)
        };
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..=2 * n).into_par_iter().map(per_q).collect();
        let np = z.len();
        let mut cos = vec![vec![0.0; 2 * n + 1]; np];
        let mut sin = vec![vec![0.0; 2 * n + 1]; np];
        for (q, (c, s)) in rows.into_iter().enumerate() {
            for pi in 0..np {
                cos[pi][q] = c[pi];
                sin[pi][q] = s[pi];
            }
        }
        TailTables { min_power, cos, sin }
    }

    #[inline]
    fn gc(&self, p: u32, q: i64) -> f64 {
        self.cos[(p - self.min_power) as usize][q.unsigned_abs() as usize]
    }

    #[inline]
    fn gs(&self, p: u32, q: i64) -> f64 {
        let v = self.sin[(p - self.min_power) as usize][q.unsigned_abs() as usize];
        if q < 0 {
            -v
        } else {
            v
        }
    }

    /// `Σ_{k₀} trig_a(m_a) trig_b(m_b) Z_p(k₀)`
    fn pair(&self, a: &Atom, b: &Atom) -> f64 {
        let p = a.power + b.power;
        let (ma, mb) = (a.node as i64, b.node as i64);
        let (dif, sum) = (ma - mb, ma + mb);
        0.5 * match (a.is_sin, b.is_sin) {
            (false, false) => self.gc(p, dif) + self.gc(p, sum),
            (true, true) => self.gc(p, dif) - self.gc(p, sum),
            (true, false) => self.gs(p, sum) + self.gs(p, dif),
            (false, true) => self.gs(p, sum) - self.gs(p, dif),
        }
    }
}

/// Scaled sine/cosine coefficients of modes `lo..hi` for a set of functions,
/// as `(modes × functions)` matrices.
fn coefficient_blocks(funcs: &[PiecewisePoly], mesh: &Mesh, lo: usize, hi: usize) -> (Mat<f64>, Mat<f64>) {
    let half = 0.5 * mesh.horizon();
    let cols: Vec<Vec<(f64, f64)>> = (lo..hi)
        .into_par_iter()
        .map(|k| {
            let mm = ModeMoments::new(lambda(k, mesh.horizon()), mesh.h());
            funcs
                .iter()
                .map(|f| {
                    let (s, c) = f.mode_coeffs(k, &mm);
                    (half * s, half * c)
                })
                .collect()
        })
        .collect();
    let s = Mat::from_fn(hi - lo, funcs.len(), |k, j| cols[k][j].0);
    let c = Mat::from_fn(hi - lo, funcs.len(), |k, j| cols[k][j].1);
    (s, c)
}

/// `P[j, i] = ⟨trial_i, H_T test_j⟩` by exact mode folding.
pub fn pairing_matrix(tests: &[PiecewisePoly], trials: &[PiecewisePoly]) -> Result<DenseMatrix> {
    let mesh = match tests.first().or(trials.first()) {
        Some(f) => f.mesh,
        None => return Ok(DenseMatrix::zeros(tests.len(), trials.len())),
    };
    if tests.iter().chain(trials).any(|f| f.mesh != mesh) {
        return Err(Error::Dimension("functions live on different meshes".into()));
    }
    let n = mesh.elements();
    let horizon = mesh.horizon();
    let (s_head, _) = coefficient_blocks(tests, &mesh, 0, 2 * n);
    let (_, c_head) = coefficient_blocks(trials, &mesh, 0, 2 * n);
    let head = s_head.transpose() * &c_head;

    let s_atoms: Vec<Vec<Atom>> = tests.iter().map(|f| sine_atoms(&f.jumps())).collect();
    let c_atoms: Vec<Vec<Atom>> = trials.iter().map(|f| cosine_atoms(&f.jumps())).collect();
    let max_order = s_atoms.iter().chain(&c_atoms).flatten().map(|a| a.power).max().unwrap_or(1);
    let tables = TailTables::new(n, horizon, 2, 2 * max_order);

    let scale = 2.0 / horizon;
    let rows: Vec<Vec<f64>> = (0..tests.len())
        .into_par_iter()
        .map(|j| {
            (0..trials.len())
                .map(|i| {
                    let mut tail = 0.0;
                    for a in &s_atoms[j] {
                        for b in &c_atoms[i] {
                            tail += a.weight * b.weight * tables.pair(a, b);
                        }
                    }
                    scale * (head[(j, i)] + tail)
                })
                .collect()
        })
        .collect();
    DenseMatrix::from_vec(tests.len(), trials.len(), rows.concat())
}

/// `B[j, i] = ⟨ψ_i, H_T ψ_j⟩`.
pub fn hilbert_matrix(space: &FeSpace, method: AssemblyMethod) -> Result<DenseMatrix> {
    match method {
        AssemblyMethod::Folded => {
            let basis = space.basis_all();
            pairing_matrix(&basis, &basis)
        }
        AssemblyMethod::FoldedGamma => hilbert_matrix_gamma(space),
        AssemblyMethod::Truncated { tolerance, start_modes, max_modes } => {
            let basis = space.basis_all();
            truncated_pairing(&basis, &basis, tolerance, start_modes, max_modes)
        }
    }
}

/// Piecewise constants: `B[j,i] = (2T/n²) Σ_{k<2n} γ(k,n) (sin x_k/x_k)²
/// sin((2j+1)x_k) cos((2i+1)x_k)` with `x_k = (π/2+kπ)/(2n)`.
pub fn hilbert_matrix_gamma(space: &FeSpace) -> Result<DenseMatrix> {
    if space.degree() != 0 {
        return domain("closed-form folding is only available for piecewise constants");
    }
    let mesh = space.mesh();
    let n = mesh.elements();
    let mut weight = vec![0.0; 2 * n];
    for (k, w) in weight.iter_mut().enumerate() {
        let x = (0.5 + k as f64) * PI / (2 * n) as f64;
        let sinc = x.sin() / x;
        *w = gamma_kn(k, n)? * sinc * sinc;
    }
    // g(q) = Σ_k w_k sin(2 q x_k), q ∈ [-(n-1), 2n-1]
    let g = |q: i64| -> f64 {
        let qa = q.unsigned_abs() as usize;
        let s: f64 = weight.iter().enumerate().map(|(k, w)| w * node_phase(k, qa, n).0).sum();
        if q < 0 {
            -s
        } else {
            s
        }
    };
    let gtab: Vec<f64> = (-(n as i64)..(2 * n as i64)).map(g).collect();
    let at = |q: i64| gtab[(q + n as i64) as usize];
    let scale = 0.5 * mesh.horizon() * 4.0 / (n * n) as f64 * 0.5;
    Ok(DenseMatrix::from_fn(n, n, |j, i| {
        let (j, i) = (j as i64, i as i64);
        scale * (at(i + j + 1) + at(j - i))
    }))
}

/// Direct mode sum with doubling truncation.
pub fn truncated_pairing(
    tests: &[PiecewisePoly],
    trials: &[PiecewisePoly],
    tolerance: f64,
    start_modes: usize,
    max_modes: usize,
) -> Result<DenseMatrix> {
    let mesh = tests.first().or(trials.first()).map(|f| f.mesh).ok_or_else(|| Error::Dimension("empty basis".into()))?;
    let scale = 2.0 / mesh.horizon();
    let mut acc = Mat::<f64>::zeros(tests.len(), trials.len());
    let mut lo = 0;
    let mut hi = start_modes.max(1);
    loop {
        let (s, _) = coefficient_blocks(tests, &mesh, lo, hi);
        let (_, c) = coefficient_blocks(trials, &mesh, lo, hi);
        let block = s.transpose() * &c;
        let mut change = 0.0f64;
        for j in 0..tests.len() {
            for i in 0..trials.len() {
                change = change.max(scale * block[(j, i)].abs());
            }
        }
        acc += &block;
        if change < tolerance && lo > 0 {
            break;
        }
        if hi >= max_modes {
            return Err(Error::Truncation { change, modes: hi });
        }
        lo = hi;
        hi = (2 * hi).min(max_modes);
    }
    Ok(DenseMatrix::from_fn(tests.len(), trials.len(), |j, i| scale * acc[(j, i)]))
}

/// Petrov–Galerkin system with test functions `ω_j = ∫₀ᵗ ψ_j`:
/// matrix `[j, i] = ⟨ψ_i, H_T ω_j⟩` and the test functions.
pub fn petrov_system(space: &FeSpace) -> Result<(DenseMatrix, Vec<PiecewisePoly>)> {
    let basis = space.basis_all();
    let omegas = basis.iter().map(|b| b.antiderivative()).collect::<Result<Vec<_>>>()?;
    Ok((pairing_matrix(&omegas, &basis)?, omegas))
}

/// Samples of `w = H_T^{-1} u` on element quadrature rules, reusable for
/// load vectors `⟨u, H_T φ⟩ = ⟨w, φ⟩` of any test functions on the mesh.
pub struct LoadSampler {
    mesh: Mesh,
    rules: Vec<NodeSet>,
    values: Vec<Vec<f64>>,
}

const INTERIOR_POINTS: usize = 16;

impl LoadSampler {
    pub fn new(u: &dyn TimeFunction, mesh: Mesh) -> Result<Self> {
        let n = mesh.elements();
        let horizon = mesh.horizon();
        let breaks = u.breakpoints();
        let near = |t: f64| breaks.iter().any(|b| (b - t).abs() < 1e-12 * horizon);
        let rules: Vec<NodeSet> = (0..n)
            .map(|e| {
                let (a, b) = (mesh.node(e), mesh.node(e + 1));
                let left = e == 0 || near(a);
                let right = e + 1 == n || near(b);
                match (left, right) {
                    (false, false) => NodeSet::gauss(a, b, INTERIOR_POINTS),
                    (true, false) => NodeSet::graded(a, b, true, 0.15, 20, INTERIOR_POINTS),
                    (false, true) => NodeSet::graded(a, b, false, 0.15, 20, INTERIOR_POINTS),
                    (true, true) => {
                        let m = 0.5 * (a + b);
                        let mut s = NodeSet::graded(a, m, true, 0.15, 20, INTERIOR_POINTS);
                        s.extend(&NodeSet::graded(m, b, false, 0.15, 20, INTERIOR_POINTS));
                        s
                    }
                }
            })
            .collect();
        let q = QuadratureSpec { tolerance: 1e-13, ..QuadratureSpec::default() };
        let values = rules
            .par_iter()
            .map(|r| r.x.iter().map(|&t| kernel_apply_inverse(u, t, horizon, &q)).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(LoadSampler { mesh, rules, values })
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    /// `⟨w, φ⟩` for a piecewise polynomial `φ`.
    pub fn pair(&self, phi: &PiecewisePoly) -> f64 {
        phi.support()
            .filter(|&e| e < self.mesh.elements())
            .map(|e| {
                let r = &self.rules[e];
                r.x.iter().zip(&r.w).zip(&self.values[e]).map(|((&x, &w), &v)| w * v * phi.eval_on(e, x)).sum::<f64>()
            })
            .sum()
    }

    pub fn load(&self, tests: &[PiecewisePoly]) -> Vec<f64> {
        tests.iter().map(|p| self.pair(p)).collect()
    }

    /// `‖Q_h^0 w‖`-type cell averages `(1/h)∫_{cell} w`.
    pub fn cell_averages(&self) -> Vec<f64> {
        let h = self.mesh.h();
        self.rules.iter().zip(&self.values).map(|(r, v)| r.w.iter().zip(v).map(|(w, x)| w * x).sum::<f64>() / h).collect()
    }
}

/// `f_j = ⟨u, H_T ψ_j⟩` through the kernel of `H_T^{-1}`.
pub fn hilbert_rhs(u: &dyn TimeFunction, space: &FeSpace) -> Result<Vec<f64>> {
    Ok(LoadSampler::new(u, space.mesh())?.load(&space.basis_all()))
}

/// `f_j = (T/2) Σ_k s_k(ψ_j) ū_k` with quadrature cosine coefficients of `u`,
/// doubling the number of modes until the largest change is below `tolerance`.
pub fn hilbert_rhs_spectral(
    u: &dyn TimeFunction,
    space: &FeSpace,
    tolerance: f64,
    start_modes: usize,
    q: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let mesh = space.mesh();
    let basis = space.basis_all();
    let half = 0.5 * mesh.horizon();
    let mut modes = start_modes.max(8);
    let mut prev: Option<Vec<f64>> = None;
    let mut change = f64::INFINITY;
    for _ in 0..=5 {
        let ubar = fourier_coeffs(u, Basis::Cosine, mesh.horizon(), modes, q)?;
        let mut f = vec![0.0; basis.len()];
        for (k, uk) in ubar.iter().enumerate() {
            let mm = ModeMoments::new(lambda(k, mesh.horizon()), mesh.h());
            for (fj, b) in f.iter_mut().zip(&basis) {
                *fj += half * b.mode_coeffs(k, &mm).0 * uk;
            }
        }
        if let Some(p) = &prev {
            change = p.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if change < tolerance {
                return Ok(f);
            }
        }
        prev = Some(f);
        modes *= 2;
    }
    Err(Error::Truncation { change, modes })
}

/// Writes `B` as an 8-byte header (`n`, `ν` as little-endian `u32`)
/// followed by the row-major entries as little-endian `f64`.
pub fn write_matrix_dump<W: Write>(mut w: W, n: u32, nu: u32, b: &DenseMatrix) -> std::io::Result<()> {
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&nu.to_le_bytes())?;
    for v in b.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_matrix_dump<R: Read>(mut r: R) -> std::io::Result<(u32, u32, DenseMatrix)> {
    let mut head = [0u8; 8];
    r.read_exact(&mut head)?;
    let n = u32::from_le_bytes(head[..4].try_into().unwrap());
    let nu = u32::from_le_bytes(head[4..].try_into().unwrap());
    let dof = if nu == 2 { 2 * n as usize } else { n as usize };
    let mut bytes = vec![0u8; dof * dof * 8];
    r.read_exact(&mut bytes)?;
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let m = DenseMatrix::from_vec(dof, dof, data).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
    Ok((n, nu, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_catalan() {
        let sp = FeSpace::uniform(1, 2.0, 0).unwrap();
        let catalan = 0.915_965_594_177_219_015;
        let want = 8.0 * catalan * 2.0 / (PI * PI);
        for m in [AssemblyMethod::Folded, AssemblyMethod::FoldedGamma] {
            let b = hilbert_matrix(&sp, m).unwrap();
            assert!((b[(0, 0)] - want).abs() < 1e-14, "{m:?} {}", b[(0, 0)]);
        }
    }

    #[test]
    fn folded_routes_agree_for_constants() {
        for n in [2usize, 5, 16] {
            let sp = FeSpace::uniform(n, 2.0, 0).unwrap();
            let a = hilbert_matrix(&sp, AssemblyMethod::Folded).unwrap();
            let b = hilbert_matrix(&sp, AssemblyMethod::FoldedGamma).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-14, "n={n} {}", a.max_abs_diff(&b));
        }
    }

    #[test]
    fn dump_round_trip() {
        let sp = FeSpace::uniform(3, 2.0, 2).unwrap();
        let b = hilbert_matrix(&sp, AssemblyMethod::Folded).unwrap();
        let mut buf = Vec::new();
        write_matrix_dump(&mut buf, 3, 2, &b).unwrap();
        assert_eq!(buf.len(), 8 + 36 * 8);
        let (n, nu, c) = read_matrix_dump(&buf[..]).unwrap();
        assert_eq!((n, nu), (3, 2));
        assert_eq!(b, c);
    }
}

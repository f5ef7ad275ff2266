//! Dense linear algebra: row-major matrices, banded Cholesky, Jacobi
//! eigensolver, LU solves with refinement and the generalized smallest
//! singular value.
//!
//! LU, large symmetric eigenproblems and matrix products go through `faer`;
//! the Cholesky factorisation and the Jacobi solver are local.

use crate::error::{Error, Result};
use faer::prelude::*;
use faer::{Mat, MatRef, Side};
use std::ops::{Index, IndexMut};

/// Above this size symmetric eigenproblems use `faer` instead of Jacobi.
pub const JACOBI_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec: dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Aᵀ x`
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec_t: dimension mismatch");
        let mut y = vec![0.0; self.cols];
        for (i, xi) in x.iter().enumerate() {
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a * xi;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: dimension mismatch");
        DenseMatrix::from_faer((self.to_faer() * other.to_faer()).as_ref())
    }

    /// `(A + Aᵀ)/2`
    pub fn symmetric_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// Largest `|i - j|` with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        let mut b = 0;
        for i in 0..self.rows {
            for (j, v) in self.row(i).iter().enumerate() {
                if *v != 0.0 {
                    b = b.max(i.abs_diff(j));
                }
            }
        }
        b
    }

    pub fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub fn from_faer(m: MatRef<'_, f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dot product with error-free products and compensated summation.
pub fn dot_compensated(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for (x, y) in a.iter().zip(b) {
        let p = x * y;
        let pe = x.mul_add(*y, -p);
        let t = s + p;
        let z = t - s;
        c += (s - (t - z)) + (p - z) + pe;
        s = t;
    }
    s + c
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Cholesky factor `A = L Lᵀ` exploiting the band structure of `A`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    band: usize,
    l: DenseMatrix,
}

impl Cholesky {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("Cholesky of a non-square matrix".into()));
        }
        let n = a.rows();
        let band = a.bandwidth();
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let lo = j.saturating_sub(band);
            let mut d = a[(j, j)];
            for k in lo..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { index: j });
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..(j + band + 1).min(n) {
                let mut s = a[(i, j)];
                for k in i.saturating_sub(band).max(lo)..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Cholesky { band, l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn factor(&self) -> &DenseMatrix {
        &self.l
    }

    /// In place `x ← L⁻¹ x`.
    pub fn solve_lower(&self, x: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(self.band)..i {
                s -= self.l[(i, k)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
    }

    /// In place `x ← L⁻ᵀ x`.
    pub fn solve_upper(&self, x: &mut [f64]) {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..(i + self.band + 1).min(n) {
                s -= self.l[(k, i)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_lower(&mut x);
        self.solve_upper(&mut x);
        x
    }

    /// `L⁻¹ B L⁻ᵀ`
    pub fn congruence(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.dim();
        // rows of t are the columns of L⁻¹B
        let mut t = b.transpose();
        for j in 0..n {
            self.solve_lower(t.row_mut(j));
        }
        // row i of (L⁻¹B)L⁻ᵀ is L⁻¹ applied to row i of L⁻¹B
        let mut c = t.transpose();
        for i in 0..n {
            self.solve_lower(c.row_mut(i));
        }
        c
    }
}

/// LU factorisation with partial pivoting and one step of iterative
/// refinement per solve.
pub struct LuSolver {
    a: DenseMatrix,
    lu: faer::linalg::solvers::PartialPivLu<f64>,
}

impl LuSolver {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("LU of a non-square matrix".into()));
        }
        let lu = a.to_faer().partial_piv_lu();
        let u = lu.U();
        let n = a.rows();
        let umax = (0..n).fold(0.0f64, |m, i| m.max(u[(i, i)].abs()));
        for i in 0..n {
            let p = u[(i, i)].abs();
            if !(p > n as f64 * f64::EPSILON * umax) || !p.is_finite() {
                return Err(Error::Singular { index: i });
            }
        }
        Ok(LuSolver { a: a.clone(), lu })
    }

    fn raw_solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.a.rows() {
            return Err(Error::Dimension(format!("rhs of length {} for order {}", b.len(), self.a.rows())));
        }
        let mut x = self.raw_solve(b);
        let r: Vec<f64> = (0..b.len()).map(|i| b[i] - dot_compensated(self.a.row(i), &x)).collect();
        let dx = self.raw_solve(&r);
        x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
        Ok(x)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }
}

pub fn solve_dense(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    LuSolver::new(a)?.solve(b)
}

/// Eigenvalues in ascending order and orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

const JACOBI_SWEEPS: usize = 30;

fn check_symmetric(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension("eigenproblem for a non-square matrix".into()));
    }
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..a.rows() {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Domain(format!("matrix not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Cyclic Jacobi eigensolver.
pub fn sym_eig(a: &DenseMatrix) -> Result<SymEig> {
    check_symmetric(a)?;
    let n = a.rows();
    let mut m = a.symmetric_part();
    let mut v = DenseMatrix::identity(n);
    let norm = m.frobenius();
    let off = |m: &DenseMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut converged = off(&m) <= 1e-13 * norm;
    let mut sweep = 0;
    while !converged && sweep < JACOBI_SWEEPS {
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        sweep += 1;
        converged = off(&m) <= 1e-13 * norm;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: JACOBI_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEig { values, vectors })
}

/// Symmetric eigensolver: Jacobi up to [`JACOBI_LIMIT`], `faer` beyond.
pub fn sym_eig_auto(a: &DenseMatrix) -> Result<SymEig> {
    if a.rows() <= JACOBI_LIMIT {
        return sym_eig(a);
    }
    check_symmetric(a)?;
    let evd = a
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence { sweeps: 0 })?;
    let s = evd.S().column_vector();
    let values = (0..a.rows()).map(|i| s[i]).collect();
    Ok(SymEig { values, vectors: DenseMatrix::from_faer(evd.U()) })
}

/// Eigenvalues only, ascending.
pub fn sym_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.rows() <= JACOBI_LIMIT {
        return Ok(sym_eig(a)?.values);
    }
    check_symmetric(a)?;
    a.to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence { sweeps: 0 })
}

/// Smallest eigenvalue of `(B + Bᵀ)/2`.
pub fn min_eig_symmetric_part(b: &DenseMatrix) -> Result<f64> {
    Ok(sym_eigenvalues(&b.symmetric_part())?[0])
}

/// Smallest generalized singular value and its right singular vector.
#[derive(Debug, Clone)]
pub struct GeneralizedSingular {
    pub sigma: f64,
    /// normalised to `uᵀ M u = 1`, largest-magnitude entry positive
    pub vector: Vec<f64>,
}

/// `min_u max_v vᵀ B u / (‖u‖_M ‖v‖_M)` for SPD `M`.
///
/// Uses `C = L⁻¹ B L⁻ᵀ` with `M = L Lᵀ`, which has the same singular values
/// as `M^{-1/2} B M^{-1/2}`; `σ_min² ` is the smallest eigenvalue of `CᵀC`.
pub fn min_generalized_singular(b: &DenseMatrix, m: &DenseMatrix) -> Result<GeneralizedSingular> {
    if !b.is_square() || b.rows() != m.rows() || !m.is_square() {
        return Err(Error::Dimension("generalized singular values need square B, M of equal order".into()));
    }
    let chol = Cholesky::new(m)?;
    let c = chol.congruence(b);
    let cf = c.to_faer();
    let g = DenseMatrix::from_faer((cf.transpose() * &cf).as_ref()).symmetric_part();
    let eig = sym_eig_auto(&g)?;
    let sigma = eig.values[0].max(0.0).sqrt();
    let mut u = eig.vectors.column(0);
    chol.solve_upper(&mut u);
    let (imax, _) = u
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
    if u[imax] < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(GeneralizedSingular { sigma, vector: u })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize, seed: u64) -> DenseMatrix {
        let mut state = seed;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = DenseMatrix::from_fn(n, n, |_, _| rnd());
        let mut s = a.transpose().matmul(&a);
        for i in 0..n {
            s[(i, i)] += n as f64;
        }
        s
    }

    #[test]
    fn small_solves() {
        let a = DenseMatrix::from_vec(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let x = solve_dense(&a, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        let id = DenseMatrix::identity(3);
        assert_eq!(solve_dense(&id, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let sing = DenseMatrix::from_vec(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(solve_dense(&sing, &[1.0, 1.0]), Err(Error::Singular { .. })));
    }

    #[test]
    fn spd_solve_recovers_ones() {
        let a = spd(100, 7);
        let b = a.matvec(&vec![1.0; 100]);
        let x = solve_dense(&a, &b).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let xc = Cholesky::new(&a).unwrap().solve(&b);
        assert!(xc.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn jacobi_basics() {
        let a = DenseMatrix::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = sym_eig(&a).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        let d = DenseMatrix::diagonal(&[3.0, -1.0, 2.0]);
        let e = sym_eig(&d).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn jacobi_residual_and_orthogonality() {
        let a = spd(50, 3);
        let e = sym_eig(&a).unwrap();
        for (i, lam) in e.values.iter().enumerate() {
            let v = e.vectors.column(i);
            let av = a.matvec(&v);
            let r: f64 = av.iter().zip(&v).map(|(x, y)| (x - lam * y).powi(2)).sum::<f64>().sqrt();
            assert!(r < 1e-11 * a.frobenius());
        }
        let qtq = e.vectors.transpose().matmul(&e.vectors);
        assert!(qtq.max_abs_diff(&DenseMatrix::identity(50)) < 1e-11);
    }

    #[test]
    fn faer_and_jacobi_agree() {
        let a = spd(300, 11);
        let big = sym_eig_auto(&a).unwrap();
        let small = sym_eig(&a).unwrap();
        for (x, y) in big.values.iter().zip(&small.values) {
            assert!((x - y).abs() < 1e-10 * x.abs());
        }
    }

    #[test]
    fn banded_cholesky_congruence() {
        let n = 12;
        let m = DenseMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 4.0,
            1 => 1.0,
            _ => 0.0,
        });
        let ch = Cholesky::new(&m).unwrap();
        let l = ch.factor();
        assert!(l.matmul(&l.transpose()).max_abs_diff(&m) < 1e-14);
        let b = spd(n, 5);
        let c = ch.congruence(&b);
        let back = l.matmul(&c).matmul(&l.transpose());
        assert!(back.max_abs_diff(&b) < 1e-12 * b.max_abs());
    }

    #[test]
    fn generalized_singular_trivial() {
        let id = DenseMatrix::identity(3);
        let r = min_generalized_singular(&id, &id).unwrap();
        assert!((r.sigma - 1.0).abs() < 1e-14);
        let b = DenseMatrix::diagonal(&[3.0, 2.0]);
        let r = min_generalized_singular(&b, &DenseMatrix::identity(2)).unwrap();
        assert!((r.sigma - 2.0).abs() < 1e-14);
        assert!((r.vector[1] - 1.0).abs() < 1e-14);
    }
}

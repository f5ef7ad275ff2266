use modhilbert::analysis::assemble;
use modhilbert::assembly::{hilbert_matrix, hilbert_rhs, hilbert_rhs_spectral, truncated_pairing, AssemblyMethod, LoadSampler};
use modhilbert::fem::{FeSpace, PiecewisePoly};
use modhilbert::fourier::kernel_apply_vp;
use modhilbert::func::{FnTime, TestFunction, TestKind, TimeFunction};
use modhilbert::linalg::min_eig_symmetric_part;
use modhilbert::quad::{NodeSet, QuadratureSpec};
use rayon::prelude::*;

const T: f64 = 2.0;

#[test]
fn folded_matches_truncated_for_constants() {
    for n in [1usize, 2, 4, 8, 16, 32, 64] {
        let sp = FeSpace::uniform(n, T, 0).unwrap();
        let basis = sp.basis_all();
        let folded = hilbert_matrix(&sp, AssemblyMethod::FoldedGamma).unwrap();
        let truncated = truncated_pairing(&basis, &basis, 1e-10, 64, 1 << 21).unwrap();
        let d = folded.max_abs_diff(&truncated);
        assert!(d <= 1e-9, "n={n}: {d:e}");
    }
}

#[test]
fn folded_matches_truncated_for_higher_degrees() {
    for nu in [1usize, 2] {
        for n in [1usize, 3, 8] {
            let sp = FeSpace::uniform(n, T, nu).unwrap();
            let basis = sp.basis_all();
            let folded = hilbert_matrix(&sp, AssemblyMethod::Folded).unwrap();
            let truncated = truncated_pairing(&basis, &basis, 2e-10, 64, 1 << 18).unwrap();
            let d = folded.max_abs_diff(&truncated);
            assert!(d <= 1e-9, "nu={nu} n={n}: {d:e}");
        }
    }
}

/// Nodes on every element, graded towards both element ends.
fn element_nodes(sp: &FeSpace, levels: usize, m: usize) -> NodeSet {
    let mesh = sp.mesh();
    let mut set = NodeSet::default();
    for e in 0..mesh.elements() {
        let (a, b) = (mesh.node(e), mesh.node(e + 1));
        let mid = 0.5 * (a + b);
        set.extend(&NodeSet::graded(a, mid, true, 0.15, levels, m));
        set.extend(&NodeSet::graded(mid, b, false, 0.15, levels, m));
    }
    set
}

/// Row `j` of `B` from `H_T ψ_j` evaluated by the principal-value kernel.
fn kernel_row(psi_j: &PiecewisePoly, basis: &[PiecewisePoly], nodes: &NodeSet) -> Vec<f64> {
    let q = QuadratureSpec::default();
    let g: Vec<f64> = nodes.x.par_iter().map(|&t| kernel_apply_vp(psi_j, t, T, &q).unwrap()).collect();
    basis
        .iter()
        .map(|psi_i| nodes.x.iter().zip(&nodes.w).zip(&g).map(|((&t, &w), &gt)| w * gt * psi_i.eval(t)).sum())
        .collect()
}

#[test]
fn folded_matches_principal_value_kernel() {
    for nu in 0..=2usize {
        for n in [1usize, 2, 4, 8, 16, 32] {
            let sp = FeSpace::uniform(n, T, nu).unwrap();
            let basis = sp.basis_all();
            let b = assemble(&sp).unwrap();
            let nodes = element_nodes(&sp, 14, 10);
            let dof = sp.dof();
            let rows: Vec<usize> = if n <= 8 { (0..dof).collect() } else { vec![0, 1, dof / 2, dof - 2, dof - 1] };
            for j in rows {
                let row = kernel_row(&basis[j], &basis, &nodes);
                for (i, v) in row.iter().enumerate() {
                    let d = (v - b[(j, i)]).abs();
                    assert!(d <= 1e-7, "nu={nu} n={n} ({j},{i}): {v} vs {}", b[(j, i)]);
                }
            }
        }
    }
}

#[test]
fn scaling_in_the_horizon() {
    for nu in 0..=2usize {
        let b2 = assemble(&FeSpace::uniform(6, 2.0, nu).unwrap()).unwrap();
        for horizon in [0.5, 3.0, 10.0] {
            let mut scaled = b2.clone();
            scaled.scale(horizon / 2.0);
            let bt = assemble(&FeSpace::uniform(6, horizon, nu).unwrap()).unwrap();
            assert!(bt.max_abs_diff(&scaled) <= 1e-13 * horizon, "nu={nu} T={horizon}");
        }
    }
}

/// The symmetric part is a Hilbert-type Gram matrix whose smallest
/// eigenvalue decays geometrically in `n`; it is resolved in double
/// precision up to `n = 16` (`ν ≤ 1`) and `n = 8` (`ν = 2`).
#[test]
fn symmetric_part_is_positive_while_resolved() {
    for (nu, nmax) in [(0usize, 16usize), (1, 16), (2, 8)] {
        let mut n = 1;
        let mut last = f64::INFINITY;
        while n <= nmax {
            let b = assemble(&FeSpace::uniform(n, T, nu).unwrap()).unwrap();
            let m = min_eig_symmetric_part(&b).unwrap();
            assert!(m > 0.0 && m < last, "nu={nu} n={n}: {m}");
            last = m;
            n *= 2;
        }
    }
}

#[test]
fn symmetric_part_is_never_clearly_negative() {
    for nu in 0..=2usize {
        for n in [32usize, 64, 128] {
            let b = assemble(&FeSpace::uniform(n, T, nu).unwrap()).unwrap();
            let m = min_eig_symmetric_part(&b).unwrap();
            assert!(m > -1e-14 * b.max_abs(), "nu={nu} n={n}: {m}");
        }
    }
}

/// `⟨u, H_T ψ_j⟩` with the forward kernel, against the default load route
/// `⟨H_T^{-1} u, ψ_j⟩`.
#[test]
fn load_vector_by_forward_kernel() {
    let q = QuadratureSpec::default();
    for kind in [TestKind::SinPi4, TestKind::Pow23] {
        let u = TestFunction::new(kind, T);
        for nu in 0..=2usize {
            let sp = FeSpace::uniform(2, T, nu).unwrap();
            let f = hilbert_rhs(&u, &sp).unwrap();
            let nodes = element_nodes(&sp, 20, 16);
            for (j, psi) in sp.basis_all().iter().enumerate() {
                let g: Vec<f64> = nodes.x.par_iter().map(|&t| kernel_apply_vp(psi, t, T, &q).unwrap()).collect();
                let forward: f64 = nodes.x.iter().zip(&nodes.w).zip(&g).map(|((&t, &w), &gt)| w * gt * u.value(t)).sum();
                assert!((forward - f[j]).abs() < 1e-9, "{kind} nu={nu} j={j}: {forward} vs {}", f[j]);
            }
        }
    }
}

#[test]
fn load_vector_by_truncated_series() {
    // vanishes to second order at both ends, so the cosine series converges fast
    let u = FnTime(|t: f64| t * t * (T - t) * (T - t));
    let q = QuadratureSpec { tolerance: 1e-12, ..Default::default() };
    for nu in 0..=2usize {
        let sp = FeSpace::uniform(4, T, nu).unwrap();
        let f = hilbert_rhs(&u, &sp).unwrap();
        let g = hilbert_rhs_spectral(&u, &sp, 1e-11, 64, &q).unwrap();
        for (a, b) in f.iter().zip(&g) {
            assert!((a - b).abs() < 1e-10, "nu={nu}: {a} vs {b}");
        }
    }
}

#[test]
fn sampler_is_reusable_across_degrees() {
    let u = TestFunction::new(TestKind::BubblePow23, T);
    let sampler = LoadSampler::new(&u, FeSpace::uniform(8, T, 0).unwrap().mesh()).unwrap();
    for nu in 0..=2usize {
        let sp = FeSpace::uniform(8, T, nu).unwrap();
        let direct = hilbert_rhs(&u, &sp).unwrap();
        assert_eq!(sampler.load(&sp.basis_all()), direct);
    }
}

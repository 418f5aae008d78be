use alloc::vec;
use alloc::vec::Vec;

// f64 math methods come from the trait when building without std
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float as _;
use num_complex::Complex64;

use crate::error::CoreError;

use super::factor::null_space;
use super::matrix::{c_dot, ComplexMatrix, ComplexVector};
use super::poly::{char_poly, poly_roots};

/// Default relative clustering tolerance; resolves branches for loop radii
/// down to 1e-5 around an EP.
pub const CLUSTER_TOL_DEFAULT: f64 = 1e-6;
/// Default relative rank tolerance for kernel extraction.
pub const RANK_TOL_DEFAULT: f64 = 1e-8;
/// Guard against c-normalizing a near-self-orthogonal vector:
/// when |u^T u| < SELF_ORTH_GUARD * u^H u the vector is returned
/// Hermitian-normalized with the `self_orthogonal` flag set instead.
pub const SELF_ORTH_GUARD: f64 = 1e-10;

/// One eigenvalue cluster: indices into `Spectrum::values` plus the kernel
/// dimension found at the cluster mean.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub indices: Vec<usize>,
    pub mean: Complex64,
    pub geometric_multiplicity: usize,
}

/// An eigenvector slot of a [`Spectrum`].
#[derive(Debug, Clone)]
pub struct EigVector {
    pub vector: ComplexVector,
    /// Set when |u^T u| fell below the self-orthogonality guard; the vector
    /// is then Hermitian-normalized instead of c-normalized.
    pub self_orthogonal: bool,
}

/// Eigendecomposition with degeneracy clustering.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues with multiplicity, sorted by (re, im).
    pub values: Vec<Complex64>,
    /// Per-value eigenvector where one is available; defective clusters
    /// carry fewer vectors than values.
    pub vectors: Vec<Option<EigVector>>,
    pub clusters: Vec<Cluster>,
    /// Backward-error norms ||H u - lambda u|| / ||u|| for each returned pair.
    pub residuals: Vec<Option<f64>>,
    /// Per-cluster: geometric multiplicity < algebraic multiplicity.
    pub defect_flags: Vec<bool>,
}

impl Spectrum {
    pub fn min_pairwise_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..self.values.len() {
            for j in 0..i {
                gap = gap.min((self.values[i] - self.values[j]).norm());
            }
        }
        gap
    }

    pub fn any_defective(&self) -> bool {
        self.defect_flags.iter().any(|&f| f)
    }
}

/// Full eigendecomposition of a small dense complex matrix: characteristic
/// polynomial roots, proximity clustering (union-find, relative tolerance
/// `cluster_tol * (1 + ||m||)`), kernel extraction per cluster, and
/// c-normalization of simple-cluster eigenvectors.
pub fn eig(m: &ComplexMatrix, cluster_tol: f64) -> Result<Spectrum, CoreError> {
    let n = m.dim();
    let p = char_poly(m)?;
    let mut values = poly_roots(&p, 1e-12)?;
    let scale = 1.0 + m.norm();
    let tol = cluster_tol * scale;

    // union-find on the proximity graph; label = smallest member index
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for i in 0..n {
        for j in 0..i {
            if (values[i] - values[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }

    // replace clustered values by their mean so multiplicities are exact
    for group in groups.iter().filter(|g| g.len() > 1) {
        let mean = group.iter().map(|&i| values[i]).sum::<Complex64>() / (group.len() as f64);
        for &i in group {
            values[i] = mean;
        }
    }

    let mut vectors: Vec<Option<EigVector>> = vec![None; n];
    let mut residuals: Vec<Option<f64>> = vec![None; n];
    let mut clusters = Vec::new();
    let mut defect_flags = Vec::new();
    for group in groups.iter().filter(|g| !g.is_empty()) {
        let mean = values[group[0]];
        let kernel = null_space(&m.shifted(mean), RANK_TOL_DEFAULT);
        let geo = kernel.len().min(group.len());
        for (slot, vec_raw) in group.iter().zip(kernel.into_iter().take(geo)) {
            let normalized = c_normalize(&vec_raw, m.is_symmetric());
            let res = m.mul_vec(&normalized.vector).sub(&normalized.vector.scale(mean)).norm()
                / normalized.vector.norm();
            residuals[*slot] = Some(res);
            vectors[*slot] = Some(normalized);
        }
        defect_flags.push(geo < group.len());
        clusters.push(Cluster { indices: group.clone(), mean, geometric_multiplicity: geo });
    }

    Ok(Spectrum { values, vectors, clusters, residuals, defect_flags })
}

/// c-normalize `u` so that `u^T u = 1`, unless it is near-self-orthogonal,
/// in which case it is returned Hermitian-normalized and flagged. A
/// deterministic sign gauge (first nonzero entry has nonnegative real part)
/// is applied either way.
pub(crate) fn c_normalize(u: &ComplexVector, symmetric_source: bool) -> EigVector {
    let hnorm_sqr = u.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
    let ctc = c_dot(u, u).expect("same length");
    if symmetric_source && ctc.norm() >= SELF_ORTH_GUARD * hnorm_sqr {
        let scale = ctc.sqrt().inv();
        let v = sign_gauge(&u.scale(scale));
        EigVector { vector: v, self_orthogonal: false }
    } else {
        let v = sign_gauge(&u.scale(Complex64::new(1.0 / hnorm_sqr.sqrt(), 0.0)));
        EigVector { vector: v, self_orthogonal: true }
    }
}

/// Flip the overall sign so the first entry of magnitude above 1e-12 of the
/// vector's max has nonnegative real part; when that real part is at
/// rounding level (a purely imaginary entry computed two ways can land on
/// either side of zero) the imaginary part decides instead.
pub(crate) fn sign_gauge(u: &ComplexVector) -> ComplexVector {
    let max_mag = u.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in u.as_slice() {
        if z.norm() > 1e-12 * max_mag {
            let flip = if z.re.abs() > 1e-9 * max_mag { z.re < 0.0 } else { z.im < 0.0 };
            return if flip { u.scale(Complex64::new(-1.0, 0.0)) } else { u.clone() };
        }
    }
    u.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eig_diagonal() {
        let m = ComplexMatrix::diag(&[z(1.0, 0.0), z(2.0, 0.0), z(3.0, 0.0)]);
        let s = eig(&m, CLUSTER_TOL_DEFAULT).unwrap();
        assert_eq!(s.values.len(), 3);
        for (k, expected) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert!((s.values[k] - z(*expected, 0.0)).norm() < 1e-10);
            assert!(s.vectors[k].is_some());
        }
        assert!(!s.any_defective());
    }

    #[test]
    fn eig_waveguide_ep3_cluster() {
        let m = crate::models::waveguide(&crate::models::WaveguideParams {
            gamma: 1.0,
            v: 1.0,
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        });
        let s = eig(&m, CLUSTER_TOL_DEFAULT).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert_eq!(s.clusters[0].indices.len(), 3);
        assert_eq!(s.clusters[0].geometric_multiplicity, 1);
        assert!(s.defect_flags[0]);
        for v in &s.values {
            assert!(v.norm() < 1e-6);
        }
    }

    #[test]
    fn eig_symmetric_ep2() {
        // [[i, 1], [1, -i]]: trace 0, det 0, rank 1 -> defective double zero
        let m = ComplexMatrix::from_rows(
            2,
            &[z(0.0, 1.0), z(1.0, 0.0), z(1.0, 0.0), z(0.0, -1.0)],
        )
        .unwrap();
        let s = eig(&m, CLUSTER_TOL_DEFAULT).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert_eq!(s.clusters[0].indices.len(), 2);
        assert_eq!(s.clusters[0].geometric_multiplicity, 1);
        assert!(s.defect_flags[0]);
    }

    #[test]
    fn trace_matches_value_sum() {
        let m = ComplexMatrix::from_rows(
            3,
            &[
                z(0.3, -0.2),
                z(0.1, 0.4),
                z(-0.5, 0.0),
                z(0.1, 0.4),
                z(0.9, 0.1),
                z(0.2, -0.7),
                z(-0.5, 0.0),
                z(0.2, -0.7),
                z(-0.4, 0.6),
            ],
        )
        .unwrap();
        let s = eig(&m, CLUSTER_TOL_DEFAULT).unwrap();
        let sum: Complex64 = s.values.iter().sum();
        assert!((sum - m.trace()).norm() <= 1e-10 * (1.0 + m.norm()));
    }

    #[test]
    fn simple_vectors_are_c_normalized() {
        let m = ComplexMatrix::from_rows(
            2,
            &[z(0.3, -0.2), z(0.1, 0.4), z(0.1, 0.4), z(0.9, 0.1)],
        )
        .unwrap();
        let s = eig(&m, CLUSTER_TOL_DEFAULT).unwrap();
        for v in s.vectors.iter().flatten() {
            assert!(!v.self_orthogonal);
            let ctc = c_dot(&v.vector, &v.vector).unwrap();
            assert!((ctc - z(1.0, 0.0)).norm() < 1e-8);
        }
    }
}

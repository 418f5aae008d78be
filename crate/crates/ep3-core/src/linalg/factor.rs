use alloc::vec::Vec;

// f64 math methods come from the trait when building without std
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float as _;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::CoreError;

use super::matrix::{ComplexMatrix, ComplexVector};

/// Householder QR with column pivoting of a square complex matrix.
/// Reflectors are stored explicitly; `n <= 16` keeps that cheap.
pub(crate) struct Qrcp {
    n: usize,
    r: ComplexMatrix,
    reflectors: Vec<(usize, ComplexVector, f64)>, // (offset k, v, tau)
    perm: Vec<usize>,                             // column k of R is column perm[k] of A
}

impl Qrcp {
    pub fn new(a: &ComplexMatrix) -> Qrcp {
        let n = a.dim();
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(n);
        for k in 0..n {
            // pivot on the trailing column with the largest remaining norm
            let mut best = k;
            let mut best_norm = 0.0;
            for j in k..n {
                let s: f64 = (k..n).map(|i| r[(i, j)].norm_sqr()).sum();
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            if best != k {
                for i in 0..n {
                    let t = r[(i, k)];
                    r[(i, k)] = r[(i, best)];
                    r[(i, best)] = t;
                }
                perm.swap(k, best);
            }
            let xnorm = best_norm.sqrt();
            if xnorm == 0.0 {
                continue;
            }
            let x0 = r[(k, k)];
            let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
            let alpha = -phase * xnorm;
            let mut v = ComplexVector::zeros(n - k);
            for i in k..n {
                v[i - k] = r[(i, k)];
            }
            v[0] -= alpha;
            let vnorm_sqr: f64 = v.as_slice().iter().map(|z| z.norm_sqr()).sum();
            if vnorm_sqr == 0.0 {
                continue;
            }
            let tau = 2.0 / vnorm_sqr;
            for j in k..n {
                let mut dot = Complex64::zero();
                for i in k..n {
                    dot += v[i - k].conj() * r[(i, j)];
                }
                let f = dot * tau;
                for i in k..n {
                    let vv = v[i - k];
                    r[(i, j)] -= vv * f;
                }
            }
            r[(k, k)] = alpha;
            for i in (k + 1)..n {
                r[(i, k)] = Complex64::zero();
            }
            reflectors.push((k, v, tau));
        }
        Qrcp { n, r, reflectors, perm }
    }

    /// Numerical rank: diagonal entries of R above `rank_tol` relative to
    /// the largest one.
    pub fn rank(&self, rank_tol: f64) -> usize {
        let top = self.r[(0, 0)].norm();
        if top == 0.0 {
            return 0;
        }
        (0..self.n).take_while(|&k| self.r[(k, k)].norm() > rank_tol * top).count()
    }

    /// Apply `Q^H` to a vector.
    pub fn apply_qh(&self, b: &ComplexVector) -> ComplexVector {
        let mut y = b.clone();
        for (k, v, tau) in &self.reflectors {
            let mut dot = Complex64::zero();
            for i in *k..self.n {
                dot += v[i - k].conj() * y[i];
            }
            let f = dot * *tau;
            for i in *k..self.n {
                let vv = v[i - k];
                y[i] -= vv * f;
            }
        }
        y
    }

    /// Basic least-squares solution with free variables set to zero.
    pub fn lstsq_basic(&self, b: &ComplexVector, rank_tol: f64) -> ComplexVector {
        let rank = self.rank(rank_tol);
        let c = self.apply_qh(b);
        let mut y = ComplexVector::zeros(self.n);
        for k in (0..rank).rev() {
            let mut acc = c[k];
            for j in (k + 1)..rank {
                acc -= self.r[(k, j)] * y[j];
            }
            y[k] = acc / self.r[(k, k)];
        }
        let mut x = ComplexVector::zeros(self.n);
        for k in 0..self.n {
            x[self.perm[k]] = y[k];
        }
        x
    }

    /// Orthonormal (Hermitian) basis of the numerical kernel.
    pub fn kernel(&self, rank_tol: f64) -> Vec<ComplexVector> {
        let rank = self.rank(rank_tol);
        let mut basis = Vec::with_capacity(self.n - rank);
        for free in rank..self.n {
            // solve R11 y_b = -R12 e_free by back substitution
            let mut y = ComplexVector::zeros(self.n);
            y[free] = Complex64::new(1.0, 0.0);
            for k in (0..rank).rev() {
                let mut acc = -self.r[(k, free)];
                for j in (k + 1)..rank {
                    acc -= self.r[(k, j)] * y[j];
                }
                y[k] = acc / self.r[(k, k)];
            }
            let mut x = ComplexVector::zeros(self.n);
            for k in 0..self.n {
                x[self.perm[k]] = y[k];
            }
            basis.push(x);
        }
        // modified Gram-Schmidt under the Hermitian product
        let mut ortho: Vec<ComplexVector> = Vec::with_capacity(basis.len());
        for mut v in basis {
            for _ in 0..2 {
                for q in &ortho {
                    let proj = q.hdot(&v);
                    v = v.sub(&q.scale(proj));
                }
            }
            let norm = v.norm();
            if norm > 0.0 {
                ortho.push(v.scale(Complex64::new(1.0 / norm, 0.0)));
            }
        }
        ortho
    }
}

/// Orthonormal basis (Hermitian inner product) of the numerical kernel of
/// `m`. Kernel directions are those below `rank_tol` relative to the largest
/// pivot scale; an empty result means full rank.
pub fn null_space(m: &ComplexMatrix, rank_tol: f64) -> Vec<ComplexVector> {
    Qrcp::new(m).kernel(rank_tol)
}

/// Solution of a pivoted linear solve together with a crude condition
/// estimate (pivot-ratio based).
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub x: ComplexVector,
    pub condition_estimate: f64,
}

/// Solve `m x = b` by LU with partial pivoting plus one step of iterative
/// refinement.
pub fn solve_linear(m: &ComplexMatrix, b: &ComplexVector) -> Result<LinearSolution, CoreError> {
    let n = m.dim();
    if b.len() != n {
        return Err(CoreError::InvalidInput("right-hand side dimension mismatch"));
    }
    if !m.is_finite() || !b.is_finite() {
        return Err(CoreError::InvalidInput("inputs must be finite"));
    }
    let lu = LuFactors::new(m)?;
    let mut x = lu.solve(b);
    // one refinement pass
    let resid = b.sub(&m.mul_vec(&x));
    let corr = lu.solve(&resid);
    x = x.add(&corr);
    Ok(LinearSolution { x, condition_estimate: lu.condition_estimate() })
}

pub(crate) struct LuFactors {
    n: usize,
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(m: &ComplexMatrix) -> Result<LuFactors, CoreError> {
        let n = m.dim();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = 1e-13 * (1.0 + m.norm());
        for k in 0..n {
            let mut best = k;
            let mut best_mag = lu[(k, k)].norm();
            for i in (k + 1)..n {
                let mag = lu[(i, k)].norm();
                if mag > best_mag {
                    best_mag = mag;
                    best = i;
                }
            }
            if best_mag < threshold {
                return Err(CoreError::Singular { pivot: best_mag });
            }
            if best != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(best, j)];
                    lu[(best, j)] = t;
                }
                perm.swap(k, best);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let f = factor * lu[(k, j)];
                    lu[(i, j)] -= f;
                }
            }
        }
        Ok(LuFactors { n, lu, perm })
    }

    pub fn solve(&self, b: &ComplexVector) -> ComplexVector {
        let n = self.n;
        let mut y = ComplexVector::zeros(n);
        for i in 0..n {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        let mut x = ComplexVector::zeros(n);
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn condition_estimate(&self) -> f64 {
        let mut max_p = 0.0_f64;
        let mut min_p = f64::INFINITY;
        for k in 0..self.n {
            let mag = self.lu[(k, k)].norm();
            max_p = max_p.max(mag);
            min_p = min_p.min(mag);
        }
        if min_p == 0.0 {
            f64::INFINITY
        } else {
            max_p / min_p
        }
    }
}

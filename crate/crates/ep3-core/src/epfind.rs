//! Newton search for exceptional-point parameter values of a matrix family,
//! driven by simultaneous multiple-root conditions of the characteristic
//! polynomial: `p(lambda) = p'(lambda) = ... = p^(order-1)(lambda) = 0`.
//!
//! Gap minimization cannot tell an EP from a diabolic point, so the solver
//! works on polynomial derivatives and verifies defectiveness afterwards.

use alloc::vec;
use alloc::vec::Vec;

// f64 math methods come from the trait when building without std
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float as _;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::jordan;
use crate::linalg::{self, char_poly, ComplexMatrix, ComplexVector};
use crate::models::FamilyDef;

/// A search problem: the family, the requested degeneracy order, and an
/// initial guess for the eigenvalue and parameters.
#[derive(Debug, Clone)]
pub struct EpSearchProblem {
    pub family: FamilyDef,
    pub order: usize,
    pub guess_lambda: Complex64,
    pub guess_params: Vec<Complex64>,
}

/// A converged and verified EP location.
#[derive(Debug, Clone)]
pub struct EpResult {
    pub lambda0: Complex64,
    pub params: Vec<Complex64>,
    pub residual: f64,
    /// Degeneracy order found by chain detection at the solution; reported
    /// honestly even when it differs from the requested order.
    pub verified_order: usize,
}

const FD_STEP_REL: f64 = 1e-6;
const MAX_DAMPING_HALVINGS: usize = 20;

/// The multiple-root condition vector `[p, p', p''][..order]` at
/// `(lambda, params)`.
fn condition_vector(
    family: &FamilyDef,
    order: usize,
    lambda: Complex64,
    params: &[Complex64],
) -> Result<Vec<Complex64>, CoreError> {
    let m = family.evaluate(params)?;
    let mut p = char_poly(&m)?;
    let mut out = Vec::with_capacity(order);
    for _ in 0..order {
        out.push(p.eval(lambda));
        p = p.derivative();
    }
    Ok(out)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Locate an EP by damped Newton iteration on the condition vector, with a
/// central-finite-difference Jacobian in all complex unknowns. On
/// convergence the defectiveness of the solution is verified via the
/// spectrum's cluster structure.
pub fn find_ep(
    problem: &EpSearchProblem,
    tol: f64,
    max_iter: usize,
) -> Result<EpResult, CoreError> {
    let nparams = problem.guess_params.len();
    if nparams != problem.family.nparams() {
        return Err(CoreError::InvalidInput("guess has the wrong parameter count"));
    }
    if problem.order < 2 || problem.order > 3 {
        return Err(CoreError::InvalidInput("EP order must be 2 or 3"));
    }
    if problem.order - 1 > nparams {
        return Err(CoreError::InvalidInput(
            "not enough parameters for the requested order (codimension)",
        ));
    }

    let order = problem.order;
    let unknowns = 1 + nparams;
    let mut x: Vec<Complex64> = Vec::with_capacity(unknowns);
    x.push(problem.guess_lambda);
    x.extend_from_slice(&problem.guess_params);

    let mut f = condition_vector(&problem.family, order, x[0], &x[1..])?;
    let mut fnorm = norm(&f);
    let mut iterations = 0;
    while fnorm > tol {
        iterations += 1;
        if iterations > max_iter {
            return Err(CoreError::NonConvergence { iterations: max_iter, residual: fnorm });
        }
        // central finite differences; the family is holomorphic in each
        // complex unknown, so a real step suffices
        let mut jac = vec![vec![Complex64::new(0.0, 0.0); unknowns]; order];
        for col in 0..unknowns {
            let h = FD_STEP_REL * (1.0 + x[col].norm());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[col] += Complex64::new(h, 0.0);
            xm[col] -= Complex64::new(h, 0.0);
            let fp = condition_vector(&problem.family, order, xp[0], &xp[1..])?;
            let fm = condition_vector(&problem.family, order, xm[0], &xm[1..])?;
            for row in 0..order {
                jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        let step = solve_newton_step(&jac, &f, order, unknowns)?;

        // damping: halve until the residual decreases
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_DAMPING_HALVINGS {
            let trial: Vec<Complex64> =
                x.iter().zip(&step).map(|(xi, si)| xi - si * alpha).collect();
            let ftrial = condition_vector(&problem.family, order, trial[0], &trial[1..])?;
            let fnorm_trial = norm(&ftrial);
            if fnorm_trial < fnorm {
                x = trial;
                f = ftrial;
                fnorm = fnorm_trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(CoreError::NonConvergence { iterations, residual: fnorm });
        }
    }

    let lambda0 = x[0];
    let params = x[1..].to_vec();
    let m = problem.family.evaluate(&params)?;
    // residual tol on [p, p', p''] leaves the coalescing roots spread over
    // roughly tol^(1/order), so the verification must cluster at that scale
    let cluster_tol =
        (10.0 * fnorm.max(tol).powf(1.0 / order as f64)).max(linalg::CLUSTER_TOL_DEFAULT);
    let verified_order = verify_order(&m, lambda0, cluster_tol)?;
    if verified_order < order {
        return Err(CoreError::WrongOrder { requested: order, found: verified_order });
    }
    // genuine order: the next derivative must not vanish as well
    let p_next = condition_vector(&problem.family, order + 1, lambda0, &params)?;
    let scale = 1.0 + m.norm();
    if p_next[order].norm() <= 10.0 * tol * scale {
        return Err(CoreError::WrongOrder { requested: order, found: verified_order });
    }
    Ok(EpResult { lambda0, params, residual: fnorm, verified_order })
}

/// Least-squares / exact Newton step `J s = f`. Square systems go through
/// the pivoted solver; underdetermined ones take the minimum-norm solution
/// via `J^H (J J^H)^{-1} f`.
fn solve_newton_step(
    jac: &[Vec<Complex64>],
    f: &[Complex64],
    rows: usize,
    cols: usize,
) -> Result<Vec<Complex64>, CoreError> {
    if rows == cols {
        let mut entries = Vec::with_capacity(rows * cols);
        for row in jac {
            entries.extend_from_slice(row);
        }
        let m = ComplexMatrix::from_rows(rows, &entries)?;
        let sol = linalg::solve_linear(&m, &ComplexVector::from_slice(f))?;
        return Ok(sol.x.as_slice().to_vec());
    }
    // J J^H y = f, s = J^H y
    let mut gram = Vec::with_capacity(rows * rows);
    for i in 0..rows {
        for j in 0..rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..cols {
                acc += jac[i][k] * jac[j][k].conj();
            }
            gram.push(acc);
        }
    }
    let g = ComplexMatrix::from_rows(rows, &gram)?;
    let y = linalg::solve_linear(&g, &ComplexVector::from_slice(f))?.x;
    let mut s = vec![Complex64::new(0.0, 0.0); cols];
    for (k, sk) in s.iter_mut().enumerate() {
        for i in 0..rows {
            *sk += jac[i][k].conj() * y[i];
        }
    }
    Ok(s)
}

/// Algebraic multiplicity of the cluster containing `lambda0`, provided the
/// cluster carries a single Jordan block.
fn verify_order(
    m: &ComplexMatrix,
    lambda0: Complex64,
    cluster_tol: f64,
) -> Result<usize, CoreError> {
    let spectrum = linalg::eig(m, cluster_tol)?;
    let records = jordan::records_from_spectrum(&spectrum)?;
    let record = records
        .iter()
        .min_by(|a, b| {
            (a.lambda0 - lambda0)
                .norm()
                .partial_cmp(&(b.lambda0 - lambda0).norm())
                .expect("finite eigenvalues")
        })
        .ok_or(CoreError::InvalidInput("empty spectrum"))?;
    Ok(record.algebraic_multiplicity)
}

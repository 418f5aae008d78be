use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::CoreError;

use super::matrix::ComplexMatrix;

/// Complex polynomial, coefficients in ascending order with a nonzero
/// leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, CoreError> {
        match coeffs.last() {
            None => Err(CoreError::InvalidInput("polynomial needs at least one coefficient")),
            Some(lead) if lead.norm() == 0.0 => {
                Err(CoreError::InvalidInput("leading coefficient must be nonzero"))
            }
            _ => Ok(Polynomial { coeffs }),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Ascending coefficients, constant term first.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial { coeffs: vec![Complex64::zero()] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * (k as f64))
            .collect();
        Polynomial { coeffs }
    }

    /// Scale of `p` at magnitude `r`: `sum_k |c_k| r^k`. Used for relative
    /// residual thresholds in root finding.
    pub fn scale_at(&self, r: f64) -> f64 {
        let mut rk = 1.0;
        let mut s = 0.0;
        for c in &self.coeffs {
            s += c.norm() * rk;
            rk *= r;
        }
        s
    }
}

/// Characteristic polynomial `det(lambda I - m)` as a monic polynomial,
/// computed by the Faddeev-LeVerrier trace recurrence (no divisions by
/// matrix entries, only by integer step counts).
pub fn char_poly(m: &ComplexMatrix) -> Result<Polynomial, CoreError> {
    if !m.is_finite() {
        return Err(CoreError::InvalidInput("matrix entries must be finite"));
    }
    if m.dim() > super::MAX_DIM {
        return Err(CoreError::InvalidInput("matrix dimension exceeds supported cap"));
    }
    let n = m.dim();
    // p(lambda) = lambda^n + c[n-1] lambda^(n-1) + ... + c[0]
    let mut coeffs = vec![Complex64::zero(); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = m.clone(); // M_1 = A
    for k in 1..=n {
        let ck = -mk.trace() / (k as f64);
        coeffs[n - k] = ck;
        if k < n {
            let mut shifted = mk;
            for i in 0..n {
                shifted[(i, i)] += ck;
            }
            mk = m.mul_mat(&shifted);
        }
    }
    // snap coefficients that are pure cancellation noise; keeps exact
    // multiple roots (EPs constructed analytically) exactly multiple
    let norm = m.norm().max(1.0);
    let mut thr = 4.0 * f64::EPSILON * (n as f64);
    for k in 1..=n {
        thr *= norm;
        if coeffs[n - k].norm() <= thr {
            coeffs[n - k] = Complex64::zero();
        }
    }
    Polynomial::new(coeffs)
}

/// All roots with multiplicity by Aberth-Ehrlich simultaneous iteration,
/// started from a perturbed circle of radius given by the Cauchy bound.
/// Deterministic for identical inputs. Each returned root `r` satisfies
/// `|p(r)| <= tol * scale_at(|r|)`; one Newton polish pass is applied to
/// the converged set.
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>, CoreError> {
    poly_roots_max_iter(p, tol, 200)
}

pub fn poly_roots_max_iter(
    p: &Polynomial,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>, CoreError> {
    let deg = p.degree();
    if deg == 0 {
        return Err(CoreError::InvalidInput("cannot take roots of a constant"));
    }
    let dp = p.derivative();
    let lead = p.coeffs()[deg].norm();

    // Cauchy bound: 1 + max |c_k / c_deg|
    let radius = 1.0
        + p.coeffs()[..deg]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max);

    // perturbed-circle initial guesses; the irrational angle offset avoids
    // symmetric stalling configurations
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = core::f64::consts::TAU * (k as f64) / (deg as f64) + 0.3618;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    // iterate to a fixed point of the displacement rather than stopping on
    // the residual: multiple roots satisfy |p| <= tol long before the
    // iterates have contracted onto the root cluster
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let mut max_step = 0.0_f64;
        for i in 0..deg {
            let zi = roots[i];
            let pv = p.eval(zi);
            if pv.is_zero() {
                continue;
            }
            let dv = dp.eval(zi);
            let newton = if dv.is_zero() { Complex64::new(1e-12, 0.0) } else { pv / dv };
            let mut repulsion = Complex64::zero();
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    let diff = zi - zj;
                    if diff.norm() > 0.0 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() < 1e-300 { newton } else { newton / denom };
            roots[i] = zi - step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= 1e-15 * radius.max(1.0) {
            break;
        }
    }

    // residual relative to the polynomial's scale on the containment disc;
    // normalizing per-root by scale_at(|r|) would read exactly 1 for a
    // multiple root at the origin no matter how close the iterates are
    let disc_scale = p.scale_at(radius).max(f64::MIN_POSITIVE);
    let residual = roots
        .iter()
        .map(|&r| p.eval(r).norm() / disc_scale)
        .fold(0.0, f64::max);
    if residual > tol {
        return Err(CoreError::NonConvergence { iterations, residual });
    }

    // single Newton polish pass; skipped where the derivative is tiny
    // (multiple roots, where Newton would amplify noise)
    for r in roots.iter_mut() {
        let dv = dp.eval(*r);
        let pv = p.eval(*r);
        if dv.norm() > 1e-8 * p.scale_at(r.norm()) {
            let next = *r - pv / dv;
            if p.eval(next).norm() <= pv.norm() {
                *r = next;
            }
        }
    }

    // deterministic output order
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ComplexMatrix;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn char_poly_identity_2x2() {
        // lambda^2 - 2 lambda + 1
        let p = char_poly(&ComplexMatrix::identity(2)).unwrap();
        let c = p.coeffs();
        assert!((c[0] - z(1.0, 0.0)).norm() < 1e-14);
        assert!((c[1] - z(-2.0, 0.0)).norm() < 1e-14);
        assert!((c[2] - z(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn char_poly_nilpotent() {
        let m = ComplexMatrix::from_rows(2, &[z(0.0, 0.0), z(1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0)])
            .unwrap();
        let p = char_poly(&m).unwrap();
        assert!(p.coeffs()[0].norm() < 1e-15);
        assert!(p.coeffs()[1].norm() < 1e-15);
        assert!((p.coeffs()[2] - z(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn char_poly_waveguide_ep3_is_lambda_cubed() {
        let m = crate::models::waveguide(&crate::models::WaveguideParams {
            gamma: 1.0,
            v: 1.0,
            a: Complex64::zero(),
            b: Complex64::zero(),
        });
        let p = char_poly(&m).unwrap();
        for k in 0..3 {
            assert!(p.coeffs()[k].norm() < 1e-12, "coefficient {k} should vanish");
        }
        assert!((p.coeffs()[3] - z(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn roots_quadratic() {
        let p = Polynomial::new(vec![z(-1.0, 0.0), z(0.0, 0.0), z(1.0, 0.0)]).unwrap();
        let roots = poly_roots(&p, 1e-12).unwrap();
        assert!((roots[0] - z(-1.0, 0.0)).norm() < 1e-10);
        assert!((roots[1] - z(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn roots_triple_zero() {
        let p = Polynomial::new(vec![
            z(0.0, 0.0),
            z(0.0, 0.0),
            z(0.0, 0.0),
            z(1.0, 0.0),
        ])
        .unwrap();
        let roots = poly_roots(&p, 1e-12).unwrap();
        for r in roots {
            assert!(r.norm() < 1e-4, "triple root should cluster at 0, got {r}");
        }
    }

    #[test]
    fn roots_cube_roots_of_small_number() {
        // lambda^3 = 1e-3: three distinct roots of magnitude 0.1
        let p = Polynomial::new(vec![
            z(-1e-3, 0.0),
            z(0.0, 0.0),
            z(0.0, 0.0),
            z(1.0, 0.0),
        ])
        .unwrap();
        let roots = poly_roots(&p, 1e-14).unwrap();
        for r in &roots {
            assert!((r.norm() - 0.1).abs() < 1e-10);
        }
        for i in 0..3 {
            for j in 0..i {
                assert!((roots[i] - roots[j]).norm() > 0.05);
            }
        }
    }

    #[test]
    fn roots_are_deterministic() {
        let p = Polynomial::new(vec![z(2.0, -1.0), z(0.5, 0.3), z(-1.0, 2.0), z(1.0, 0.0)])
            .unwrap();
        let a = poly_roots(&p, 1e-12).unwrap();
        let b = poly_roots(&p, 1e-12).unwrap();
        assert_eq!(a, b);
    }
}

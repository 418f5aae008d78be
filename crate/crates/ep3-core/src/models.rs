//! Built-in matrix families: the three-waveguide Hamiltonian and polynomial
//! families assembled from explicit coefficient matrices.

use alloc::string::String;
use alloc::vec::Vec;

// f64 math methods come from the trait when building without std
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float as _;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::linalg::ComplexMatrix;

/// Parameters of the three coupled wave guides: gain/loss strength `gamma`,
/// coupling `v`, and the two outer-guide detunings `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideParams {
    pub gamma: f64,
    pub v: f64,
    pub a: Complex64,
    pub b: Complex64,
}

/// The 3x3 symmetric waveguide Hamiltonian
///
/// ```text
/// [ a - 2i*gamma   sqrt(2) v        0        ]
/// [ sqrt(2) v          0        sqrt(2) v    ]
/// [     0          sqrt(2) v   b + 2i*gamma  ]
/// ```
///
/// It has an EP3 at `lambda = 0` for `gamma = v`, `a = b = 0`.
pub fn waveguide(p: &WaveguideParams) -> ComplexMatrix {
    let c = Complex64::new(2.0_f64.sqrt() * p.v, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let entries = [
        p.a + Complex64::new(0.0, -2.0 * p.gamma),
        c,
        z,
        c,
        z,
        c,
        z,
        c,
        p.b + Complex64::new(0.0, 2.0 * p.gamma),
    ];
    ComplexMatrix::from_rows(3, &entries).expect("waveguide entries are finite")
}

/// A parameter-to-matrix family.
#[derive(Debug, Clone)]
pub enum FamilyDef {
    /// Waveguide with `a = b = z`, one complex parameter.
    WaveguideAbEqual { gamma: f64, v: f64 },
    /// Waveguide with `a = -b = z`, one complex parameter.
    WaveguideAbOpposite { gamma: f64, v: f64 },
    /// Waveguide over independent `(a, b)`, two complex parameters
    /// (restricted to real values for two-real-parameter loops).
    WaveguideAbPair { gamma: f64, v: f64 },
    /// `H(z) = sum_k z^k H_k`, one complex parameter; all `H_k` symmetric
    /// and of equal dimension and `d >= 1`.
    Polynomial { name: String, matrices: Vec<ComplexMatrix> },
}

impl FamilyDef {
    /// Build a polynomial family, validating symmetry and dimensions.
    pub fn polynomial(name: String, matrices: Vec<ComplexMatrix>) -> Result<FamilyDef, CoreError> {
        if matrices.len() < 2 {
            return Err(CoreError::InvalidInput("polynomial family needs degree >= 1"));
        }
        let dim = matrices[0].dim();
        for m in &matrices {
            if m.dim() != dim {
                return Err(CoreError::InvalidInput("family matrices must share one dimension"));
            }
            if !m.is_symmetric() {
                return Err(CoreError::InvalidInput("family matrices must be symmetric"));
            }
        }
        Ok(FamilyDef::Polynomial { name, matrices })
    }

    pub fn dim(&self) -> usize {
        match self {
            FamilyDef::Polynomial { matrices, .. } => matrices[0].dim(),
            _ => 3,
        }
    }

    /// Number of complex parameters.
    pub fn nparams(&self) -> usize {
        match self {
            FamilyDef::WaveguideAbPair { .. } => 2,
            _ => 1,
        }
    }

    /// Evaluate the family at a parameter vector.
    pub fn evaluate(&self, params: &[Complex64]) -> Result<ComplexMatrix, CoreError> {
        if params.len() != self.nparams() {
            return Err(CoreError::InvalidInput("parameter count does not match family"));
        }
        Ok(match self {
            FamilyDef::WaveguideAbEqual { gamma, v } => waveguide(&WaveguideParams {
                gamma: *gamma,
                v: *v,
                a: params[0],
                b: params[0],
            }),
            FamilyDef::WaveguideAbOpposite { gamma, v } => waveguide(&WaveguideParams {
                gamma: *gamma,
                v: *v,
                a: params[0],
                b: -params[0],
            }),
            FamilyDef::WaveguideAbPair { gamma, v } => waveguide(&WaveguideParams {
                gamma: *gamma,
                v: *v,
                a: params[0],
                b: params[1],
            }),
            FamilyDef::Polynomial { matrices, .. } => {
                let z = params[0];
                let mut acc = matrices[0].clone();
                let mut zk = Complex64::new(1.0, 0.0);
                for h in &matrices[1..] {
                    zk *= z;
                    acc = acc.add(&h.scale(zk));
                }
                acc
            }
        })
    }

    /// Evaluate a one-complex-parameter family at `z`.
    pub fn evaluate_one(&self, z: Complex64) -> Result<ComplexMatrix, CoreError> {
        self.evaluate(&[z])
    }

    /// The linear perturbation direction `H_1 = dH/dz` at `z = 0` for
    /// one-parameter families.
    pub fn derivative_at_zero(&self) -> Result<ComplexMatrix, CoreError> {
        Ok(match self {
            FamilyDef::WaveguideAbEqual { .. } => ComplexMatrix::diag(&[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ]),
            FamilyDef::WaveguideAbOpposite { .. } => ComplexMatrix::diag(&[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ]),
            FamilyDef::WaveguideAbPair { .. } => {
                return Err(CoreError::InvalidInput(
                    "two-parameter family has no single perturbation direction",
                ))
            }
            FamilyDef::Polynomial { matrices, .. } => matrices[1].clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn waveguide_ep3_values() {
        let m = waveguide(&WaveguideParams { gamma: 1.0, v: 1.0, a: z(0.0, 0.0), b: z(0.0, 0.0) });
        let s2 = 2.0_f64.sqrt();
        assert_eq!(m[(0, 0)], z(0.0, -2.0));
        assert_eq!(m[(0, 1)], z(s2, 0.0));
        assert_eq!(m[(0, 2)], z(0.0, 0.0));
        assert_eq!(m[(1, 1)], z(0.0, 0.0));
        assert_eq!(m[(2, 2)], z(0.0, 2.0));
        assert!(m.is_symmetric());
    }

    #[test]
    fn waveguide_decoupled_is_diagonal() {
        let m = waveguide(&WaveguideParams { gamma: 0.0, v: 0.0, a: z(1.0, 0.0), b: z(2.0, 0.0) });
        assert_eq!(m[(0, 0)], z(1.0, 0.0));
        assert_eq!(m[(1, 1)], z(0.0, 0.0));
        assert_eq!(m[(2, 2)], z(2.0, 0.0));
        assert_eq!(m[(0, 1)], z(0.0, 0.0));
    }

    #[test]
    fn waveguide_trace_is_a_plus_b() {
        // the +-2i gamma terms cancel exactly
        for (gamma, v, a, b) in [
            (0.7, 1.3, z(0.2, -0.4), z(-1.0, 0.9)),
            (2.0, 0.0, z(0.0, 1.0), z(3.0, 0.0)),
        ] {
            let m = waveguide(&WaveguideParams { gamma, v, a, b });
            assert_eq!(m.trace(), a + b);
        }
    }

    #[test]
    fn waveguide_symmetric_for_all_params() {
        let m = waveguide(&WaveguideParams { gamma: -0.3, v: 2.1, a: z(1.0, 2.0), b: z(-0.5, 0.1) });
        assert!(m.is_symmetric());
    }

    #[test]
    fn polynomial_family_linear_in_z() {
        let h0 = ComplexMatrix::zeros(2);
        let h1 = ComplexMatrix::identity(2);
        let fam = FamilyDef::polynomial("lin".to_string(), vec![h0.clone(), h1]).unwrap();
        let z1 = z(0.3, -0.7);
        let z2 = z(-1.1, 0.2);
        let lhs = fam.evaluate_one(z1).unwrap().add(&fam.evaluate_one(z2).unwrap()).sub(&h0);
        let rhs = fam.evaluate_one(z1 + z2).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn polynomial_family_identity_perturbation() {
        let fam = FamilyDef::polynomial(
            "id".to_string(),
            vec![ComplexMatrix::zeros(2), ComplexMatrix::identity(2)],
        )
        .unwrap();
        let m = fam.evaluate_one(z(2.0, 0.0)).unwrap();
        assert_eq!(m, ComplexMatrix::identity(2).scale(z(2.0, 0.0)));
    }

    #[test]
    fn derivative_directions() {
        let eq = FamilyDef::WaveguideAbEqual { gamma: 1.0, v: 1.0 };
        let op = FamilyDef::WaveguideAbOpposite { gamma: 1.0, v: 1.0 };
        assert_eq!(eq.derivative_at_zero().unwrap()[(2, 2)], z(1.0, 0.0));
        assert_eq!(op.derivative_at_zero().unwrap()[(2, 2)], z(-1.0, 0.0));
    }

    #[test]
    fn nonsymmetric_file_matrix_rejected() {
        let mut bad = ComplexMatrix::zeros(2);
        bad[(0, 1)] = z(1.0, 0.0);
        let r = FamilyDef::polynomial("bad".to_string(), vec![ComplexMatrix::zeros(2), bad]);
        assert!(r.is_err());
    }
}

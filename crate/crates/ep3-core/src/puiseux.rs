//! Classification of the leading perturbation behaviour of `H0 + z H1`
//! around an EP2/EP3 and numerical estimation of Puiseux exponents.
//!
//! At an EP3 the scalar `c = u0^T H1 u0` decides between the third-root
//! scenario (all three eigenvalues are branches of one z^(1/3) expansion)
//! and, when `c` vanishes, the square-root-plus-Taylor scenario with
//! coefficients built from the chain and the invertible operator
//! `G = H0 - lambda0 I - u0 u2^T`.

use alloc::vec;
use alloc::vec::Vec;

// f64 math methods come from the trait when building without std
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float as _;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::jordan::JordanChain;
use crate::linalg::{c_dot, solve_linear, ComplexMatrix, ComplexVector};
use crate::models::FamilyDef;
use crate::tracking::{self, LoopPath, LoopSpec};

/// A linear matrix family `H(z) = h0 + z h1` pinned at an EP of `h0`.
#[derive(Debug, Clone)]
pub struct LinearFamily {
    pub h0: ComplexMatrix,
    pub h1: ComplexMatrix,
}

impl LinearFamily {
    pub fn new(h0: ComplexMatrix, h1: ComplexMatrix) -> Result<Self, CoreError> {
        if h0.dim() != h1.dim() {
            return Err(CoreError::InvalidInput("family matrices must share one dimension"));
        }
        if !h0.is_symmetric() || !h1.is_symmetric() {
            return Err(CoreError::InvalidInput("family matrices must be symmetric"));
        }
        Ok(LinearFamily { h0, h1 })
    }

    pub fn at(&self, z: Complex64) -> ComplexMatrix {
        self.h0.add(&self.h1.scale(z))
    }
}

/// Classified leading-order perturbation scenario.
#[derive(Debug, Clone)]
pub enum PuiseuxClass {
    /// EP3, `u0^T H1 u0 != 0`: three branches of one cube-root expansion.
    /// `branches` holds `lambda1 * e^{2 pi i k/3}`, principal value first,
    /// counterclockwise.
    ThirdRoot { lambda1: Complex64, branches: [Complex64; 3] },
    /// EP3, `u0^T H1 u0 = 0` but `2 u1^T H1 u0 != 0`: a square-root pair
    /// plus one Taylor branch. `taylor_vector_correction` is `G^{-1} H1 u0`.
    SquareRootPlusTaylor {
        sqrt_coeff: Complex64,
        taylor_coeff: Complex64,
        taylor_vector_correction: ComplexVector,
    },
    /// EP2 with `u0^T H1 u0 != 0`.
    SquareRoot { lambda1: Complex64 },
    /// EP2 whose leading square-root coefficient vanishes; the branch is an
    /// ordinary power series whose coefficients are not computed here.
    TaylorOnly,
    /// Outside the two generic EP3 scenarios; no prediction is attempted.
    DegenerateOther,
}

impl PuiseuxClass {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PuiseuxClass::ThirdRoot { .. } => "ThirdRoot",
            PuiseuxClass::SquareRootPlusTaylor { .. } => "SquareRootPlusTaylor",
            PuiseuxClass::SquareRoot { .. } => "SquareRoot",
            PuiseuxClass::TaylorOnly => "TaylorOnly",
            PuiseuxClass::DegenerateOther => "DegenerateOther",
        }
    }
}

/// Relative vanishing threshold for the classification scalars: the chain
/// vectors are not unit-norm under the Hermitian norm, so the scale is
/// quadratic in them.
pub fn scalar_tol(h1: &ComplexMatrix, chain: &JordanChain) -> f64 {
    let chain_scale = chain.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    1e-8 * (1.0 + h1.norm()) * chain_scale * chain_scale
}

fn bil(a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    c_dot(a, b).expect("dimensions checked on entry")
}

/// Classify the EP3 scenario of `h0 + z h1` at the chain's eigenvalue.
pub fn classify_ep3(
    h0: &ComplexMatrix,
    chain: &JordanChain,
    h1: &ComplexMatrix,
    tol: f64,
) -> Result<PuiseuxClass, CoreError> {
    if chain.length() != 3 {
        return Err(CoreError::InvalidInput("classify_ep3 needs a length-3 chain"));
    }
    if h1.dim() != chain.vectors[0].len() || h0.dim() != h1.dim() {
        return Err(CoreError::InvalidInput("dimension mismatch"));
    }
    if !h1.is_symmetric() {
        return Err(CoreError::InvalidInput("perturbation must be symmetric"));
    }
    let u0 = &chain.vectors[0];
    let u1 = &chain.vectors[1];
    let u2 = &chain.vectors[2];
    let h1u0 = h1.mul_vec(u0);
    let c = bil(u0, &h1u0);
    if c.norm() > tol {
        let lambda1 = c.cbrt();
        let rot = Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI / 3.0);
        return Ok(PuiseuxClass::ThirdRoot {
            lambda1,
            branches: [lambda1, lambda1 * rot, lambda1 * rot * rot],
        });
    }
    let d = 2.0 * bil(u1, &h1u0);
    if d.norm() > tol {
        // reduced resolvent: H0 - lambda0 I is nilpotent on the chain
        // (u0 -> 0, u1 -> u0, u2 -> u1); the rank-one completion -u2 u2^T
        // sends u0 -> -u2, which makes the operator invertible and its
        // inverse act as the shift-up u0 -> u1 -> u2 on the chain span,
        // exactly the particular solution second-order perturbation
        // theory singles out (no component along u0)
        let g = h0
            .shifted(chain.lambda0)
            .sub(&ComplexMatrix::outer(u2, u2));
        let ginv_h1u0 = solve_linear(&g, &h1u0)?.x;
        let numerator = bil(&h1u0, &ginv_h1u0);
        let taylor_coeff = numerator / d;
        return Ok(PuiseuxClass::SquareRootPlusTaylor {
            sqrt_coeff: d.sqrt(),
            taylor_coeff,
            taylor_vector_correction: ginv_h1u0,
        });
    }
    Ok(PuiseuxClass::DegenerateOther)
}

/// Classify the EP2 scenario: square root when `u0^T H1 u0` survives,
/// otherwise an (uncomputed) Taylor branch.
pub fn classify_ep2(
    chain: &JordanChain,
    h1: &ComplexMatrix,
    tol: f64,
) -> Result<PuiseuxClass, CoreError> {
    if chain.length() != 2 {
        return Err(CoreError::InvalidInput("classify_ep2 needs a length-2 chain"));
    }
    if h1.dim() != chain.vectors[0].len() {
        return Err(CoreError::InvalidInput("dimension mismatch"));
    }
    if !h1.is_symmetric() {
        return Err(CoreError::InvalidInput("perturbation must be symmetric"));
    }
    let u0 = &chain.vectors[0];
    let c = bil(u0, &h1.mul_vec(u0));
    if c.norm() > tol {
        Ok(PuiseuxClass::SquareRoot { lambda1: c.sqrt() })
    } else {
        Ok(PuiseuxClass::TaylorOnly)
    }
}

/// Leading-order eigenvalue prediction per branch at perturbation `z`.
/// Fractional powers use the principal branch (log cut on the negative
/// real axis).
pub fn predict_eigenvalues(
    class: &PuiseuxClass,
    lambda0: Complex64,
    z: Complex64,
) -> Result<Vec<Complex64>, CoreError> {
    match class {
        PuiseuxClass::ThirdRoot { branches, .. } => {
            let z13 = z.cbrt();
            Ok(branches.iter().map(|&b| lambda0 + b * z13).collect())
        }
        PuiseuxClass::SquareRootPlusTaylor { sqrt_coeff, taylor_coeff, .. } => {
            let z12 = z.sqrt();
            Ok(vec![
                lambda0 + sqrt_coeff * z12,
                lambda0 - sqrt_coeff * z12,
                lambda0 + taylor_coeff * z,
            ])
        }
        PuiseuxClass::SquareRoot { lambda1 } => {
            let z12 = z.sqrt();
            Ok(vec![lambda0 + lambda1 * z12, lambda0 - lambda1 * z12])
        }
        PuiseuxClass::TaylorOnly | PuiseuxClass::DegenerateOther => {
            Err(CoreError::InvalidInput("no leading-order prediction for this class"))
        }
    }
}

/// Leading-order (unnormalized) eigenvector prediction per branch at `z`;
/// branch order matches [`predict_eigenvalues`].
pub fn predict_eigenvectors(
    class: &PuiseuxClass,
    chain: &JordanChain,
    z: Complex64,
) -> Result<Vec<ComplexVector>, CoreError> {
    let u0 = &chain.vectors[0];
    let u1 = &chain.vectors[1];
    match class {
        PuiseuxClass::ThirdRoot { branches, .. } => {
            let z13 = z.cbrt();
            Ok(branches.iter().map(|&b| u0.add(&u1.scale(b * z13))).collect())
        }
        PuiseuxClass::SquareRootPlusTaylor {
            sqrt_coeff,
            taylor_coeff,
            taylor_vector_correction,
        } => {
            let z12 = z.sqrt();
            let taylor = u0.add(
                &u1.scale(*taylor_coeff)
                    .sub(taylor_vector_correction)
                    .scale(z),
            );
            Ok(vec![
                u0.add(&u1.scale(*sqrt_coeff * z12)),
                u0.sub(&u1.scale(*sqrt_coeff * z12)),
                taylor,
            ])
        }
        PuiseuxClass::SquareRoot { lambda1 } => {
            let z12 = z.sqrt();
            Ok(vec![
                u0.add(&u1.scale(*lambda1 * z12)),
                u0.sub(&u1.scale(*lambda1 * z12)),
            ])
        }
        PuiseuxClass::TaylorOnly | PuiseuxClass::DegenerateOther => {
            Err(CoreError::InvalidInput("no leading-order prediction for this class"))
        }
    }
}

/// Least-squares fit of one monodromy cycle group of eigenvalue branches.
#[derive(Debug, Clone)]
pub struct BranchGroupFit {
    /// Number of branches in the monodromy cycle (the Puiseux denominator).
    pub branch_count: usize,
    /// log-log slope of mean |lambda - lambda0| against radius; +infinity
    /// when the branch sits at the noise floor (see `below_floor`).
    pub slope: f64,
    /// Mean modulus per radius, in the order the radii were given.
    pub mean_moduli: Vec<f64>,
    /// Set when every mean modulus is at the numerical noise floor
    /// (<= 1e-12): the branch does not move at any measurable order, so a
    /// slope fitted through roundoff would be meaningless and `slope` is
    /// reported as +infinity instead.
    pub below_floor: bool,
}

/// Mean-modulus level treated as "the branch never left the EP value".
const FIT_NOISE_FLOOR: f64 = 1e-12;

/// Estimate Puiseux exponents numerically: diagonalize on circles of the
/// given radii around the EP (parameter origin), group branches by
/// monodromy cycle, and fit log mean-modulus against log radius. Expected
/// slopes are `1/k` for a cycle of `k` branches.
pub fn fit_exponents(
    family: &FamilyDef,
    lambda0: Complex64,
    radii: &[f64],
    phases_per_circle: usize,
) -> Result<Vec<BranchGroupFit>, CoreError> {
    if radii.is_empty() || radii.iter().any(|&r| !(r >= 1e-8)) {
        return Err(CoreError::InvalidInput("radii must be positive and >= 1e-8"));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CoreError::InvalidInput("radii must be strictly descending"));
    }
    let mut per_radius: Vec<Vec<(usize, f64)>> = Vec::new(); // (cycle_len, mean) per group
    let mut reference_structure: Option<Vec<usize>> = None;
    for (ri, &r) in radii.iter().enumerate() {
        let spec = LoopSpec {
            path: LoopPath::ComplexCircle { center: Complex64::new(0.0, 0.0), radius: r },
            steps_per_cycle: phases_per_circle.max(64),
            cycles: 1,
            reversed: false,
        };
        let report = tracking::track_loop(family, &spec)?;
        let orbits = tracking::permutation_cycles(&report.permutations[0]);
        let mut groups: Vec<(usize, f64)> = orbits
            .iter()
            .map(|orbit| {
                let mut acc = 0.0;
                let mut count = 0usize;
                for sample in &report.samples {
                    for &b in orbit {
                        acc += (sample.values[b] - lambda0).norm();
                        count += 1;
                    }
                }
                (orbit.len(), acc / count as f64)
            })
            .collect();
        // deterministic group order: larger cycles first, then by modulus
        groups.sort_by(|a, b| {
            b.0.cmp(&a.0).then(a.1.partial_cmp(&b.1).expect("finite moduli"))
        });
        let structure: Vec<usize> = groups.iter().map(|g| g.0).collect();
        match &reference_structure {
            None => reference_structure = Some(structure),
            Some(s) if *s != structure => {
                return Err(CoreError::InconsistentCycles { radius_index: ri })
            }
            _ => {}
        }
        per_radius.push(groups);
    }
    let structure = reference_structure.expect("at least one radius");
    let fits = structure
        .iter()
        .enumerate()
        .map(|(gi, &len)| {
            let moduli: Vec<f64> = per_radius.iter().map(|g| g[gi].1).collect();
            let below_floor = moduli.iter().all(|&m| m <= FIT_NOISE_FLOOR);
            let slope = if below_floor {
                f64::INFINITY
            } else {
                log_log_slope(radii, &moduli)
            };
            BranchGroupFit { branch_count: len, slope, mean_moduli: moduli, below_floor }
        })
        .collect();
    Ok(fits)
}

/// Least-squares slope of ln(y) against ln(x).
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.max(1e-300).ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        num += (a - mx) * (b - my);
        den += (a - mx) * (a - mx);
    }
    num / den
}

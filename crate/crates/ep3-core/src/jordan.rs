//! Detection of defective eigenvalues and construction of Jordan chains of
//! length 2 and 3 with the bilinear normalization
//!
//! length 2:  u0^T u0 = 0,  u0^T u1 = 1,  u1^T u1 = 0
//! length 3:  u0^T u0 = 0,  u0^T u1 = 0,  u0^T u2 = u1^T u1 = 1,
//!            u2^T u1 = 0,  u2^T u2 = 0
//!
//! where the first group holds automatically for a symmetric matrix at the
//! EP and the second is imposed through the residual gauge freedom of the
//! chain.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::CoreError;
use crate::linalg::{self, c_dot, ComplexMatrix, ComplexVector, Spectrum};

/// Relative tolerance for "chain condition satisfied".
pub const CONDITION_TOL: f64 = 1e-8;

/// One degenerate (or simple) eigenvalue cluster with its multiplicities.
#[derive(Debug, Clone)]
pub struct EpRecord {
    pub lambda0: Complex64,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
}

impl EpRecord {
    /// An EP-N record: N >= 2 coalescing eigenvalues with a single
    /// eigenvector (one Jordan block of length N).
    pub fn is_ep(&self) -> bool {
        self.algebraic_multiplicity >= 2 && self.geometric_multiplicity == 1
    }
}

/// Named residuals of the chain and normalization conditions.
#[derive(Debug, Clone, Default)]
pub struct ConditionReport {
    pub entries: Vec<(String, f64)>,
}

impl ConditionReport {
    fn push(&mut self, name: &str, value: f64) {
        self.entries.push((String::from(name), value));
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}

/// A normalized Jordan chain at a degenerate eigenvalue.
#[derive(Debug, Clone)]
pub struct JordanChain {
    pub lambda0: Complex64,
    /// `[u0, u1]` or `[u0, u1, u2]`.
    pub vectors: Vec<ComplexVector>,
    pub condition_report: ConditionReport,
}

impl JordanChain {
    pub fn length(&self) -> usize {
        self.vectors.len()
    }
}

/// Unnormalized chain from the minimum-norm particular solves, kept around
/// so normalization can be tested separately.
#[derive(Debug, Clone)]
pub struct RawChain {
    pub lambda0: Complex64,
    pub vectors: Vec<ComplexVector>,
    /// `||(H - lambda0) u_j - u_{j-1}||` per solve (first entry is the
    /// kernel residual).
    pub residuals: Vec<f64>,
}

/// Cluster the spectrum of a symmetric matrix and report multiplicities.
/// Fails with `AmbiguousStructure` when a degenerate cluster has geometric
/// multiplicity strictly between 1 and its size (not a single Jordan block).
pub fn detect_ep(m: &ComplexMatrix, cluster_tol: f64) -> Result<Vec<EpRecord>, CoreError> {
    if !m.is_symmetric() {
        return Err(CoreError::InvalidInput("detect_ep requires a symmetric matrix"));
    }
    let spectrum = linalg::eig(m, cluster_tol)?;
    records_from_spectrum(&spectrum)
}

pub(crate) fn records_from_spectrum(spectrum: &Spectrum) -> Result<Vec<EpRecord>, CoreError> {
    let mut records = Vec::new();
    for cluster in &spectrum.clusters {
        let alg = cluster.indices.len();
        let geo = cluster.geometric_multiplicity;
        if alg >= 2 && geo != 1 && geo != alg {
            return Err(CoreError::AmbiguousStructure { algebraic: alg, geometric: geo });
        }
        records.push(EpRecord {
            lambda0: cluster.mean,
            algebraic_multiplicity: alg,
            geometric_multiplicity: geo,
        });
    }
    Ok(records)
}

/// Build the raw (unnormalized) Jordan chain of the requested length:
/// `u0` spans the kernel of `H - lambda0`, and each following vector is the
/// minimum-norm particular solution of `(H - lambda0) x = u_{j-1}`.
pub fn build_chain(
    m: &ComplexMatrix,
    lambda0: Complex64,
    length: usize,
) -> Result<RawChain, CoreError> {
    if length != 2 && length != 3 {
        return Err(CoreError::InvalidInput("chain length must be 2 or 3"));
    }
    let shifted = m.shifted(lambda0);
    let scale = 1.0 + m.norm();
    let kernel = linalg::null_space(&shifted, linalg::RANK_TOL_DEFAULT);
    if kernel.len() != 1 {
        return Err(CoreError::AmbiguousStructure {
            algebraic: length,
            geometric: kernel.len(),
        });
    }
    let qr = crate::linalg::Qrcp::new(&shifted);
    let mut vectors = vec![kernel.into_iter().next().expect("one kernel vector")];
    let mut residuals = vec![shifted.mul_vec(&vectors[0]).norm()];
    for j in 1..length {
        let rhs = vectors[j - 1].clone();
        let mut x = qr.lstsq_basic(&rhs, linalg::RANK_TOL_DEFAULT);
        let residual = shifted.mul_vec(&x).sub(&rhs).norm();
        if residual > CONDITION_TOL * scale * rhs.norm().max(1.0) {
            return Err(CoreError::ChainBreaks { solved_up_to: j - 1, residual });
        }
        // remove the kernel component for a deterministic minimum-norm
        // particular solution
        let proj = vectors[0].hdot(&x) / vectors[0].hdot(&vectors[0]);
        x = x.sub(&vectors[0].scale(proj));
        vectors.push(x);
        residuals.push(residual);
    }
    Ok(RawChain { lambda0, vectors, residuals })
}

/// Apply the full gauge freedom `u0 -> s u0~`, `u1 -> s u1~ + c1 u0~`,
/// `u2 -> s u2~ + c1 u1~ + c2 u0~` and solve for `(s, c1, c2)` so that the
/// normalization conditions hold. The sign of `s` is fixed by requiring a
/// nonnegative real part in the first nonzero entry of `u0`.
pub fn normalize_chain(m: &ComplexMatrix, raw: &RawChain) -> Result<JordanChain, CoreError> {
    match raw.vectors.len() {
        2 => normalize_len2(m, raw),
        3 => normalize_len3(m, raw),
        _ => Err(CoreError::InvalidInput("chain length must be 2 or 3")),
    }
}

fn bil(a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    c_dot(a, b).expect("chain vectors share a dimension")
}

fn normalize_len2(m: &ComplexMatrix, raw: &RawChain) -> Result<JordanChain, CoreError> {
    let (u0r, u1r) = (&raw.vectors[0], &raw.vectors[1]);
    let scale = u0r.norm() * u1r.norm();
    let t = bil(u0r, u1r);
    if t.norm() < 1e-12 * scale.max(1e-300) {
        return Err(CoreError::DegenerateNormalization {
            scalar: "u0^T u1",
            magnitude: t.norm(),
        });
    }
    // u0^T u1 = s^2 t = 1
    let s = t.inv().sqrt();
    // u1^T u1 = s^2 q + 2 s c1 t = 0
    let q = bil(u1r, u1r);
    let c1 = -(s * q) / (2.0 * t);
    let u0 = u0r.scale(s);
    let u1 = u1r.scale(s).add(&u0r.scale(c1));
    finish_chain(m, raw.lambda0, vec![u0, u1])
}

fn normalize_len3(m: &ComplexMatrix, raw: &RawChain) -> Result<JordanChain, CoreError> {
    let (u0r, u1r, u2r) = (&raw.vectors[0], &raw.vectors[1], &raw.vectors[2]);
    let scale = u0r.norm() * u2r.norm();
    // automatic identities: u0^T u0 = 0, u0^T u1 = 0, u0^T u2 = u1^T u1
    let w = bil(u0r, u2r);
    let w1 = bil(u1r, u1r);
    if w.norm() < 1e-12 * scale.max(1e-300) {
        return Err(CoreError::DegenerateNormalization {
            scalar: "u0^T u2",
            magnitude: w.norm(),
        });
    }
    // u0^T u2 = s^2 w = 1
    let s = w.inv().sqrt();
    // u2^T u1 = s^2 m21 + s c1 (w + w1) = 0
    let m21 = bil(u2r, u1r);
    let c1 = -(s * m21) / (w + w1);
    // u2^T u2 = s^2 m22 + c1^2 w1 + 2 s c1 m21 + 2 s c2 w = 0
    let m22 = bil(u2r, u2r);
    let c2 = -(s * s * m22 + c1 * c1 * w1 + 2.0 * s * c1 * m21) / (2.0 * s * w);
    let u0 = u0r.scale(s);
    let u1 = u1r.scale(s).add(&u0r.scale(c1));
    let u2 = u2r.scale(s).add(&u1r.scale(c1)).add(&u0r.scale(c2));
    finish_chain(m, raw.lambda0, vec![u0, u1, u2])
}

/// Apply the deterministic sign gauge and compile the condition report.
fn finish_chain(
    m: &ComplexMatrix,
    lambda0: Complex64,
    mut vectors: Vec<ComplexVector>,
) -> Result<JordanChain, CoreError> {
    // flipping s flips every chain vector simultaneously
    let gauged = crate::linalg::sign_gauge(&vectors[0]);
    if gauged != vectors[0] {
        for v in vectors.iter_mut() {
            *v = v.scale(Complex64::new(-1.0, 0.0));
        }
    }

    let shifted = m.shifted(lambda0);
    let mut report = ConditionReport::default();
    report.push("(H-l0)u0", shifted.mul_vec(&vectors[0]).norm());
    for j in 1..vectors.len() {
        let r = shifted.mul_vec(&vectors[j]).sub(&vectors[j - 1]).norm();
        report.push(if j == 1 { "(H-l0)u1-u0" } else { "(H-l0)u2-u1" }, r);
    }
    let one = Complex64::new(1.0, 0.0);
    match vectors.len() {
        2 => {
            report.push("u0.u0", bil(&vectors[0], &vectors[0]).norm());
            report.push("u0.u1-1", (bil(&vectors[0], &vectors[1]) - one).norm());
            report.push("u1.u1", bil(&vectors[1], &vectors[1]).norm());
        }
        3 => {
            report.push("u0.u0", bil(&vectors[0], &vectors[0]).norm());
            report.push("u0.u1", bil(&vectors[0], &vectors[1]).norm());
            report.push("u0.u2-1", (bil(&vectors[0], &vectors[2]) - one).norm());
            report.push("u1.u1-1", (bil(&vectors[1], &vectors[1]) - one).norm());
            report.push("u2.u1", bil(&vectors[2], &vectors[1]).norm());
            report.push("u2.u2", bil(&vectors[2], &vectors[2]).norm());
        }
        _ => unreachable!(),
    }
    Ok(JordanChain { lambda0, vectors, condition_report: report })
}

/// Convenience pipeline: detect the EP of order `length` nearest to the
/// dominant degeneracy, build and normalize its chain.
pub fn chain_at_ep(m: &ComplexMatrix, length: usize) -> Result<JordanChain, CoreError> {
    let records = detect_ep(m, linalg::CLUSTER_TOL_DEFAULT)?;
    let record = records
        .iter()
        .find(|r| r.is_ep() && r.algebraic_multiplicity == length)
        .ok_or(CoreError::InvalidInput("no EP of the requested order found"))?;
    let raw = build_chain(m, record.lambda0, length)?;
    normalize_chain(m, &raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CLUSTER_TOL_DEFAULT;
    use crate::models::{waveguide, WaveguideParams};

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ep2_matrix() -> ComplexMatrix {
        ComplexMatrix::from_rows(2, &[z(0.0, 1.0), z(1.0, 0.0), z(1.0, 0.0), z(0.0, -1.0)])
            .unwrap()
    }

    fn ep3_matrix() -> ComplexMatrix {
        waveguide(&WaveguideParams { gamma: 1.0, v: 1.0, a: z(0.0, 0.0), b: z(0.0, 0.0) })
    }

    #[test]
    fn detect_simple_spectrum() {
        let m = ComplexMatrix::diag(&[z(1.0, 0.0), z(2.0, 0.0), z(3.0, 0.0)]);
        let recs = detect_ep(&m, CLUSTER_TOL_DEFAULT).unwrap();
        assert_eq!(recs.len(), 3);
        assert!(recs.iter().all(|r| r.algebraic_multiplicity == 1
            && r.geometric_multiplicity == 1
            && !r.is_ep()));
    }

    #[test]
    fn detect_waveguide_ep3() {
        let recs = detect_ep(&ep3_matrix(), CLUSTER_TOL_DEFAULT).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].is_ep());
        assert_eq!(recs[0].algebraic_multiplicity, 3);
        assert_eq!(recs[0].geometric_multiplicity, 1);
        assert!(recs[0].lambda0.norm() < 1e-8);
    }

    #[test]
    fn detect_symmetric_ep2() {
        let recs = detect_ep(&ep2_matrix(), CLUSTER_TOL_DEFAULT).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].is_ep());
        assert_eq!(recs[0].algebraic_multiplicity, 2);
        assert!(recs[0].lambda0.norm() < 1e-10);
    }

    #[test]
    fn detect_rejects_nonsymmetric() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = z(1.0, 0.0);
        assert!(matches!(
            detect_ep(&m, CLUSTER_TOL_DEFAULT),
            Err(CoreError::InvalidInput(_))
        ));
    }

    #[test]
    fn raw_chain_ep2() {
        let m = ep2_matrix();
        let raw = build_chain(&m, z(0.0, 0.0), 2).unwrap();
        // u0 proportional to (1, -i)
        let ratio = raw.vectors[0][1] / raw.vectors[0][0];
        assert!((ratio - z(0.0, -1.0)).norm() < 1e-10);
        // (H - 0) u1 = u0
        let r = m.mul_vec(&raw.vectors[1]).sub(&raw.vectors[0]).norm();
        assert!(r < 1e-10);
    }

    #[test]
    fn raw_chain_waveguide_ep3() {
        let m = ep3_matrix();
        let raw = build_chain(&m, z(0.0, 0.0), 3).unwrap();
        for j in 1..3 {
            let r = m.mul_vec(&raw.vectors[j]).sub(&raw.vectors[j - 1]).norm();
            assert!(r < 1e-9, "chain equation residual {r} at step {j}");
        }
    }

    #[test]
    fn chain_break_on_impossible_length() {
        // a 2x2 EP2 cannot support a length-3 chain
        let r = build_chain(&ep2_matrix(), z(0.0, 0.0), 3);
        assert!(matches!(r, Err(CoreError::ChainBreaks { .. })));
    }

    #[test]
    fn normalized_ep2_conditions() {
        let m = ep2_matrix();
        let raw = build_chain(&m, z(0.0, 0.0), 2).unwrap();
        let chain = normalize_chain(&m, &raw).unwrap();
        assert!(chain.condition_report.max_residual() < 1e-10);
        // u0 = e^{i pi/4} (1, -i) / sqrt(2) direction, sign-gauged
        let u0 = &chain.vectors[0];
        assert!((bil(u0, u0)).norm() < 1e-10);
    }

    #[test]
    fn normalized_ep3_conditions() {
        let m = ep3_matrix();
        let raw = build_chain(&m, z(0.0, 0.0), 3).unwrap();
        let chain = normalize_chain(&m, &raw).unwrap();
        assert!(
            chain.condition_report.max_residual() < 1e-10,
            "worst residual {:e}",
            chain.condition_report.max_residual()
        );
    }

    #[test]
    fn sign_flip_gauges_to_same_chain() {
        let m = ep3_matrix();
        let raw = build_chain(&m, z(0.0, 0.0), 3).unwrap();
        let flipped = RawChain {
            lambda0: raw.lambda0,
            vectors: raw.vectors.iter().map(|v| v.scale(z(-1.0, 0.0))).collect(),
            residuals: raw.residuals.clone(),
        };
        let a = normalize_chain(&m, &raw).unwrap();
        let b = normalize_chain(&m, &flipped).unwrap();
        for (va, vb) in a.vectors.iter().zip(&b.vectors) {
            assert!(va.sub(vb).norm() < 1e-10);
        }
    }
}

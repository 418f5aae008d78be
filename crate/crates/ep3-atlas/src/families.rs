//! Family selection: built-in waveguide parameterizations by name, or a
//! polynomial family loaded from a JSON file (`file:<path>` or a bare
//! `.json` path).

use ep3_core::linalg::ComplexMatrix;
use ep3_core::models::FamilyDef;
use ep3_core::Complex64;
use serde::Deserialize;

use crate::CliError;

/// On-disk polynomial family: `H(z) = sum_k z^k H_k`, matrices as nested
/// `[re, im]` pair arrays, all symmetric and of one dimension.
#[derive(Deserialize)]
struct FamilyFile {
    name: String,
    degree: usize,
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix, CliError> {
    let n = rows.len();
    let mut entries = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(CliError::usage("family file: matrices must be square"));
        }
        for &[re, im] in row {
            entries.push(Complex64::new(re, im));
        }
    }
    ComplexMatrix::from_rows(n, &entries).map_err(CliError::computation)
}

fn load_family_file(path: &str) -> Result<FamilyDef, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read family file {path}: {e}")))?;
    let file: FamilyFile = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("family file {path} is not valid JSON: {e}")))?;
    if file.matrices.len() != file.degree + 1 {
        return Err(CliError::usage(format!(
            "family file {path}: degree {} needs {} matrices, found {}",
            file.degree,
            file.degree + 1,
            file.matrices.len()
        )));
    }
    let matrices = file
        .matrices
        .iter()
        .map(|rows| matrix_from_pairs(rows))
        .collect::<Result<Vec<_>, _>>()?;
    FamilyDef::polynomial(file.name, matrices).map_err(CliError::computation)
}

/// Resolve a `--family` selector. `gamma` and `v` feed the built-in
/// waveguide parameterizations and are ignored for file families.
pub fn resolve(selector: &str, gamma: f64, v: f64) -> Result<FamilyDef, CliError> {
    match selector {
        "waveguide-ab-equal" => Ok(FamilyDef::WaveguideAbEqual { gamma, v }),
        "waveguide-ab-opposite" => Ok(FamilyDef::WaveguideAbOpposite { gamma, v }),
        "waveguide-2param" => Ok(FamilyDef::WaveguideAbPair { gamma, v }),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                load_family_file(path)
            } else if other.ends_with(".json") {
                load_family_file(other)
            } else {
                Err(CliError::usage(format!(
                    "unknown family '{other}' (expected waveguide-ab-equal, \
                     waveguide-ab-opposite, waveguide-2param, or file:<path>)"
                )))
            }
        }
    }
}

/// Display name for reports.
pub fn family_name(family: &FamilyDef) -> String {
    match family {
        FamilyDef::WaveguideAbEqual { .. } => "waveguide-ab-equal".into(),
        FamilyDef::WaveguideAbOpposite { .. } => "waveguide-ab-opposite".into(),
        FamilyDef::WaveguideAbPair { .. } => "waveguide-2param".into(),
        FamilyDef::Polynomial { name, .. } => name.clone(),
    }
}

use serde::{Deserialize, Serialize};

use super::LoopKind;
use crate::algebra::basis_table;
use crate::chart::{LoopChart, LoopPoint};
use crate::error::{check_dim, Error, Result};
use crate::malcev::{structure_constants, structure_functions, TensorEntry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportKind {
    MulTable,
    StructureConstants,
    StructureFunctions,
}

/// Tensor export of `c(g)` together with its base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureFunctionsExport {
    pub r: usize,
    pub at: Vec<f64>,
    pub entries: Vec<TensorEntry>,
}

fn chart(kind: LoopKind) -> LoopChart {
    LoopChart::new(kind.level()).expect("shipped loops have valid levels")
}

/// Signed basis multiplication table of the ambient algebra.
pub fn export_mul_table(kind: LoopKind) -> Result<String> {
    Ok(basis_table(kind.level())?.to_json())
}

pub fn export_structure_constants(kind: LoopKind) -> Result<String> {
    let c = structure_constants(&chart(kind))?;
    Ok(serde_json::to_string_pretty(&c.tensor.export()).expect("tensor serialization"))
}

pub fn export_structure_functions(kind: LoopKind, at: &[f64]) -> Result<String> {
    let chart = chart(kind);
    check_dim(chart.dim(), at.len())?;
    if at.iter().any(|v| !v.is_finite()) {
        return Err(Error::ChartDomain(format!("non-finite coordinates {at:?}")));
    }
    let cg = structure_functions(&chart, &LoopPoint(at.to_vec()))?;
    let export = cg.tensor.export();
    let out = StructureFunctionsExport {
        r: export.r,
        at: at.to_vec(),
        entries: export.entries,
    };
    Ok(serde_json::to_string_pretty(&out).expect("tensor serialization"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BasisTable;
    use crate::malcev::{Tensor3, TensorExport};

    #[test]
    fn mul_table_sizes() {
        let t: BasisTable = serde_json::from_str(&export_mul_table(LoopKind::Octonion).unwrap()).unwrap();
        assert_eq!(t.entries.len(), 64);
    }

    #[test]
    fn circle_constants_empty() {
        let e: TensorExport =
            serde_json::from_str(&export_structure_constants(LoopKind::Circle).unwrap()).unwrap();
        assert_eq!((e.r, e.entries.len()), (1, 0));
    }

    #[test]
    fn quaternion_functions_constant() {
        let c: TensorExport =
            serde_json::from_str(&export_structure_constants(LoopKind::Quaternion).unwrap()).unwrap();
        let f: StructureFunctionsExport =
            serde_json::from_str(&export_structure_functions(LoopKind::Quaternion, &[0.1, 0.0, 0.0]).unwrap())
                .unwrap();
        let fg = Tensor3::from_export(&TensorExport { r: f.r, entries: f.entries });
        assert!(fg.max_abs_diff(&Tensor3::from_export(&c)) <= 1e-9);
    }

    #[test]
    fn out_of_chart() {
        assert!(matches!(
            export_structure_functions(LoopKind::Quaternion, &[1.2, 0.0, 0.0]),
            Err(Error::ChartDomain(_))
        ));
        assert!(matches!(
            export_structure_functions(LoopKind::Quaternion, &[0.1, 0.0]),
            Err(Error::Dimension { .. })
        ));
    }
}

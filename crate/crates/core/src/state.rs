use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{eig_hermitian, ComplexMatrix, HermitianOperator, MatrixFile, C64, EIG_TOL, HERMITICITY_TOL};

/// Trace tolerance for a density operator.
pub const TRACE_TOL: f64 = 1e-10;

/// A positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    /// Accepts `m` iff it is Hermitian, PSD and has unit trace within the
    /// default tolerances.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m, HERMITICITY_TOL, EIG_TOL, TRACE_TOL)
    }

    pub fn with_tolerances(m: ComplexMatrix, herm_tol: f64, eig_tol: f64, trace_tol: f64) -> Result<Self> {
        let op = HermitianOperator::with_tol(m, herm_tol)?;
        let min = eig_hermitian(&op)?.eigenvalues[0];
        if min < -eig_tol {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let trace = op.trace();
        if (trace - 1.0).abs() > trace_tol {
            return Err(Error::BadTrace { trace });
        }
        Ok(DensityOperator { op })
    }

    /// Diagonal (classical) state from a probability vector.
    pub fn diag(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag(p))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator { op: HermitianOperator::diag(&vec![1.0 / dim as f64; dim]) }
    }

    /// `|k⟩⟨k|`
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut p = vec![0.0; dim];
        p[k] = 1.0;
        DensityOperator { op: HermitianOperator::diag(&p) }
    }

    pub(crate) fn from_op_unchecked(op: HermitianOperator) -> Self {
        DensityOperator { op }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Convex mixture `w·self + (1−w)·other`.
    pub fn mix(&self, other: &DensityOperator, w: f64) -> Result<DensityOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim(), other.dim())));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::BadParameter(format!("mixture weight {w} outside [0,1]")));
        }
        let m = &self.matrix().scale_real(w) + &other.matrix().scale_real(1.0 - w);
        Ok(DensityOperator { op: HermitianOperator::from_hermitian_unchecked(m) })
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile::from_matrix(self.matrix(), Some("density"))
    }

    pub fn from_file(file: MatrixFile) -> Result<Self> {
        if let Some(kind) = &file.kind {
            if kind != "density" {
                return Err(Error::Parse(format!("expected kind \"density\", found \"{kind}\"")));
            }
        }
        Self::new(file.into_matrix()?)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Self::from_file(MatrixFile::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// A normalized vector `|ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vector: Vec<C64>,
}

impl PureState {
    pub fn new(vector: Vec<C64>) -> Result<Self> {
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vector.is_empty() || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::BadParameter(format!("pure state must have unit norm, got {norm}")));
        }
        Ok(PureState { vector })
    }

    /// Normalizes `vector` (which must be non-zero).
    pub fn normalized(vector: Vec<C64>) -> Result<Self> {
        let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::BadParameter("cannot normalize a zero vector".into()));
        }
        Ok(PureState { vector: vector.into_iter().map(|z| z / norm).collect() })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[k] = C64::new(1.0, 0.0);
        PureState { vector: v }
    }

    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.vector.iter().zip(&other.vector).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_op_unchecked(HermitianOperator::from_hermitian_unchecked(ComplexMatrix::outer(
            &self.vector,
            &self.vector,
        )))
    }
}

/// Validates `m` as a density operator.
pub fn validate_density(m: ComplexMatrix) -> Result<DensityOperator> {
    DensityOperator::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        assert!(validate_density(ComplexMatrix::diag(&[0.5, 0.5])).is_ok());
        assert!(matches!(validate_density(ComplexMatrix::diag(&[0.6, 0.5])), Err(Error::BadTrace { .. })));
        let m = ComplexMatrix::from_real_rows(&[vec![0.5, 0.6], vec![0.6, 0.5]]).unwrap();
        match validate_density(m) {
            Err(Error::NotPsd { min_eigenvalue }) => assert!((min_eigenvalue + 0.1).abs() < 1e-14),
            other => panic!("expected NotPsd, got {other:?}"),
        }
        let m = ComplexMatrix::from_real_rows(&[vec![0.5, 0.1], vec![0.0, 0.5]]).unwrap();
        assert!(matches!(validate_density(m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn state_file_has_kind_tag() {
        let rho = DensityOperator::diag(&[0.6, 0.4]).unwrap();
        let s = serde_json::to_string(&rho).unwrap();
        assert!(s.contains("\"kind\":\"density\""));
        let back: DensityOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rho);
        // untagged matrices are accepted as states too
        let plain = r#"{"dim": 2, "entries": [[0.5,0],[0,0],[0,0],[0.5,0]]}"#;
        assert!(serde_json::from_str::<DensityOperator>(plain).is_ok());
        let wrong = r#"{"kind": "channel", "dim": 1, "entries": [[1,0]]}"#;
        assert!(serde_json::from_str::<DensityOperator>(wrong).is_err());
    }

    #[test]
    fn pure_state_normalization() {
        assert!(PureState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        let psi = PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let rho = psi.density();
        assert!((rho.op().trace() - 1.0).abs() < 1e-15);
        assert!((rho.matrix()[(0, 1)] - C64::new(0.0, -0.5)).norm() < 1e-15);
    }
}

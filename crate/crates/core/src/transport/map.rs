use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grassmann::{Dims, GradedMatrix, Grassmann, Parity};

/// Even Λ_N-linear automorphism of `Λ_N ⊗ R^{p|q}`; the value of SP or PS.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportMap {
    matrix: GradedMatrix,
}

impl TransportMap {
    /// Wraps a square even matrix whose body is invertible.
    pub fn new(matrix: GradedMatrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::Dimension(format!("transport map of shape {} x {}", matrix.rows(), matrix.cols())));
        }
        if matrix.declared_parity() != Parity::Even {
            return Err(Error::Parity("transport maps are even".into()));
        }
        matrix.check()?;
        let r = matrix.rows().total();
        let body = matrix.body();
        let m = DMatrix::from_fn(r, r, |i, j| body[i][j]);
        let svd = m.svd(false, false);
        let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
        if r > 0 && !(smin > 1e-13 * smax.max(1.0)) {
            return Err(Error::Domain(format!("transport map body is singular (σ_min = {smin:.3e})")));
        }
        Ok(TransportMap { matrix })
    }

    pub fn identity(n: usize, rank: Dims) -> Self {
        TransportMap { matrix: GradedMatrix::identity(n, rank) }
    }

    pub fn matrix(&self) -> &GradedMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> GradedMatrix {
        self.matrix
    }

    pub fn rank(&self) -> Dims {
        self.matrix.rows()
    }

    pub fn n_generators(&self) -> usize {
        self.matrix.n_generators()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TransportMap) -> Result<TransportMap> {
        let m = self.matrix.try_mul(&other.matrix)?;
        Ok(TransportMap { matrix: m })
    }

    /// Image of a column vector (or a block of columns).
    pub fn apply(&self, v: &GradedMatrix) -> Result<GradedMatrix> {
        self.matrix.try_mul(v)
    }

    /// Largest coefficient deviation from another map.
    pub fn distance(&self, other: &TransportMap) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Largest coefficient deviation from the identity.
    pub fn distance_to_identity(&self) -> f64 {
        self.matrix.max_abs_diff(&GradedMatrix::identity(self.n_generators(), self.rank()))
    }

    /// Applies `f` to every entry, e.g. an algebra substitution.
    pub fn map_entries(&self, n: usize, f: impl Fn(&Grassmann) -> Grassmann) -> Result<TransportMap> {
        let entries = self.matrix.entries().iter().map(f).collect();
        let m = GradedMatrix::from_entries(n, self.rank(), self.rank(), entries, Parity::Even)?;
        Ok(TransportMap { matrix: m })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "TransportMap",
            "rank": self.rank(),
            "N": self.n_generators(),
            "matrix": self.matrix.to_json(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        if v.get("kind").and_then(|k| k.as_str()) != Some("TransportMap") {
            return Err(Error::Config("not a TransportMap object".into()));
        }
        let m = v.get("matrix").ok_or_else(|| Error::Config("TransportMap without matrix".into()))?;
        let map = Self::new(GradedMatrix::from_json(m)?)?;
        let rank: Dims = serde_json::from_value(v.get("rank").cloned().unwrap_or_default())
            .map_err(|e| Error::Config(format!("TransportMap rank: {e}")))?;
        if rank != map.rank() {
            return Err(Error::Config(format!("declared rank {rank} but matrix has rank {}", map.rank())));
        }
        Ok(map)
    }
}

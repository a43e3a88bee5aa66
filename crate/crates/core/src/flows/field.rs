use crate::error::{Error, Result};
use crate::geometry::SuperFunction;
use crate::grassmann::{Dims, Grassmann, Parity};

/// Vector field `X = Σ a_i ∂_{x^i}` on R^{p|q} with left partial derivatives.
#[derive(Debug, Clone)]
pub struct SuperVectorField {
    dims: Dims,
    parity: Parity,
    coeffs: Vec<SuperFunction>,
}

impl SuperVectorField {
    pub fn new(dims: Dims, parity: Parity, coeffs: Vec<SuperFunction>) -> Result<Self> {
        if coeffs.len() != dims.total() {
            return Err(Error::Dimension(format!("{} coefficients for a field on {dims}", coeffs.len())));
        }
        for (i, a) in coeffs.iter().enumerate() {
            if a.dims() != dims {
                return Err(Error::Dimension(format!("coefficient {} lives on {}", i + 1, a.dims())));
            }
            let want = parity + dims.parity_of(i);
            if !a.has_parity(want) {
                return Err(Error::Parity(format!(
                    "coefficient of ∂_{} must be {want:?} for a {parity:?} field",
                    i + 1
                )));
            }
        }
        Ok(SuperVectorField { dims, parity, coeffs })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn coeffs(&self) -> &[SuperFunction] {
        &self.coeffs
    }

    /// `X(f) = Σ a_i ∂_i f`.
    pub fn apply(&self, f: &SuperFunction) -> SuperFunction {
        let mut acc = SuperFunction::zero(self.dims);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            acc = acc.add(&a.mul(&f.derivative(i)));
        }
        acc
    }

    /// `X² = ½[X, X] = Σ_i X(a_i) ∂_i` for odd `X`.
    pub fn square(&self) -> Result<SuperVectorField> {
        if self.parity != Parity::Odd {
            return Err(Error::Parity("only odd fields square to a vector field".into()));
        }
        let coeffs = self.coeffs.iter().map(|a| self.apply(a)).collect();
        SuperVectorField::new(self.dims, Parity::Even, coeffs)
    }

    pub fn eval(&self, point: &[Grassmann]) -> Result<Vec<Grassmann>> {
        self.coeffs.iter().map(|a| a.eval(point)).collect()
    }

    pub(crate) fn check_point(&self, point: &[Grassmann]) -> Result<usize> {
        if point.len() != self.dims.total() {
            return Err(Error::Dimension(format!("{} coordinates for a point of {}", point.len(), self.dims)));
        }
        let n = point[0].n_generators();
        for (i, x) in point.iter().enumerate() {
            if x.n_generators() != n {
                return Err(Error::Dimension(format!("coordinate {} lives in Λ_{}", i + 1, x.n_generators())));
            }
            if !x.has_parity(self.dims.parity_of(i)) {
                return Err(Error::Parity(format!("coordinate {} has the wrong parity", i + 1)));
            }
        }
        Ok(n)
    }
}

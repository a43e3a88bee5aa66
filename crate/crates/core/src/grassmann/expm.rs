use crate::error::{Error, Result};
use crate::grassmann::element::Parity;
use crate::grassmann::matrix::GradedMatrix;

const TAYLOR_DEGREE: usize = 18;

/// Exponential of an even square graded matrix over Λ_N.
///
/// Scaling and squaring over the full Grassmann matrix. Body and soul are
/// not assumed to commute, so the soul is never split off.
pub fn mat_exp(a: &GradedMatrix) -> Result<GradedMatrix> {
    if a.rows() != a.cols() {
        return Err(Error::Dimension(format!("exponential of non-square {} x {} matrix", a.rows(), a.cols())));
    }
    if a.declared_parity() != Parity::Even {
        return Err(Error::Parity("exponential needs an even operator".into()));
    }
    a.check()?;
    let norm = a.op_norm();
    if !norm.is_finite() {
        return Err(Error::Domain("non-finite matrix entries".into()));
    }
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a.scale(0.5f64.powi(squarings as i32));

    let id = GradedMatrix::identity(a.n_generators(), a.rows());
    let mut acc = id.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = id.add(&scaled.mul(&acc).scale(1.0 / k as f64));
    }
    for _ in 0..squarings {
        acc = acc.mul(&acc);
    }
    Ok(acc.with_declared(Parity::Even))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::element::Grassmann;
    use crate::grassmann::matrix::Dims;

    #[test]
    fn scalar_exponential() {
        let d = Dims::new(1, 0);
        let a = GradedMatrix::endo_from_real(0, d, &[vec![3.0]], Parity::Even).unwrap();
        let e = mat_exp(&a).unwrap();
        assert!((e.get(0, 0).body() - 3.0f64.exp()).abs() < 1e-12 * 3.0f64.exp());
    }

    #[test]
    fn nilpotent_soul_exponential() {
        // exp(x + θ1θ2) = e^x (1 + θ1θ2)
        let n = 2;
        let d = Dims::new(1, 0);
        let th12 = &Grassmann::generator(n, 1) * &Grassmann::generator(n, 2);
        let x = &Grassmann::scalar(n, 0.7) + &th12;
        let a = GradedMatrix::from_entries(n, d, d, vec![x], Parity::Even).unwrap();
        let e = mat_exp(&a).unwrap();
        let expect = (&Grassmann::one(n) + &th12).scale(0.7f64.exp());
        assert!(e.get(0, 0).max_abs_diff(&expect) < 1e-13);
    }

    #[test]
    fn rotation_generator() {
        let d = Dims::new(2, 0);
        let t = 1.3;
        let a = GradedMatrix::endo_from_real(0, d, &[vec![0.0, -t], vec![t, 0.0]], Parity::Even).unwrap();
        let e = mat_exp(&a).unwrap().body();
        assert!((e[0][0] - t.cos()).abs() < 1e-13);
        assert!((e[1][0] - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn odd_input_rejected() {
        let d = Dims::new(1, 1);
        let a = GradedMatrix::endo_from_real(0, d, &[vec![0.0, 1.0], vec![1.0, 0.0]], Parity::Odd).unwrap();
        assert!(matches!(mat_exp(&a), Err(Error::Parity(_))));
    }
}

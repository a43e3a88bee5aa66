use crate::error::{Error, Result};
use crate::flows::nilpotent_step_ok;
use crate::geometry::Variant;
use crate::grassmann::{GradedMatrix, Grassmann, Parity};
use crate::superfield::SuperPoint;
use crate::transport::coefficient::CoefficientField;

/// Step control for the half-order solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest RK4 step on the body of the time interval.
    pub h: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { h: 1e-3 }
    }
}

/// Generator `K(t)` of the reduced linear system `a′ = K a`.
///
/// With `b = −C a`, the D-equation gives `a′ = ε(C)C a − 𝔇 a`; for Q the
/// signs of both terms flip.
fn generator(field: &dyn CoefficientField, t: &Grassmann, variant: Variant) -> Result<(GradedMatrix, GradedMatrix)> {
    let (c, d) = field.eval(t)?;
    if !c.is_consistent() || !d.is_consistent() {
        return Err(Error::Parity("coefficient breaks the odd + θ∘even pattern".into()));
    }
    let cc = c.epsilon().mul(&c);
    let k = match variant {
        Variant::D => cc.sub(&d),
        Variant::Q => d.sub(&cc),
    };
    Ok((k.with_declared(Parity::Even), c))
}

/// One RK4 step of size `h` from `t`; `k_start` is the generator at `t`.
/// Returns the new state and the generator at `t + h`.
fn rk4(
    field: &dyn CoefficientField,
    variant: Variant,
    t: &Grassmann,
    a: &GradedMatrix,
    h: &Grassmann,
    k_start: &GradedMatrix,
) -> Result<(GradedMatrix, GradedMatrix)> {
    let half = h.scale(0.5);
    let k1 = k_start.mul(a);
    let km = generator(field, &(t + &half), variant)?.0;
    let k2 = km.mul(&a.add(&k1.scale_left(&half)));
    let k3 = km.mul(&a.add(&k2.scale_left(&half)));
    let k_end = generator(field, &(t + h), variant)?.0;
    let k4 = k_end.mul(&a.add(&k3.scale_left(h)));
    let incr = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4);
    Ok((a.add(&incr.scale_left(&h.scale(1.0 / 6.0))).with_declared(a.declared_parity()), k_end))
}

/// Solves `(∂_D + 𝔄)ψ = 0` (or its Q analogue) with `ψ(0, 0) = ψ0` and
/// returns `ψ` at `end`.
///
/// `ψ0` may carry several columns; they are transported together. The body
/// of the end time is reached by fixed RK4 steps of size at most `opts.h`,
/// a nilpotent soul by one more RK4 step whose size is that soul.
pub fn solve_d(
    field: &dyn CoefficientField,
    psi0: &GradedMatrix,
    end: &SuperPoint,
    variant: Variant,
    opts: SolverOptions,
) -> Result<GradedMatrix> {
    let n = field.n_generators();
    if psi0.n_generators() != n || end.n_generators() != n {
        return Err(Error::Dimension(format!(
            "coefficient over Λ_{n}, initial value over Λ_{}, end point over Λ_{}",
            psi0.n_generators(),
            end.n_generators()
        )));
    }
    if psi0.rows() != field.rank() {
        return Err(Error::Dimension(format!("initial value has {} rows, bundle rank is {}", psi0.rows(), field.rank())));
    }
    psi0.check()?;
    if !(opts.h > 0.0 && opts.h.is_finite()) {
        return Err(Error::Resolution(format!("step size {} is not positive", opts.h)));
    }
    let body = end.body();
    let (lo, hi) = field.domain();
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if !(lo - slack <= 0.0_f64.min(body) && 0.0_f64.max(body) <= hi + slack) {
        return Err(Error::Domain(format!("interval from 0 to {body} leaves the coefficient window [{lo}, {hi}]")));
    }
    let soul = end.t().soul();
    if !nilpotent_step_ok(&soul) {
        return Err(Error::Capability("end time soul has non-vanishing fifth power".into()));
    }

    let steps = ((body.abs() / opts.h).ceil() as usize).max(1);
    let h = body / steps as f64;
    let hg = Grassmann::scalar(n, h);
    let mut a = psi0.clone();
    let mut t = Grassmann::zero(n);
    let mut k = generator(field, &t, variant)?.0;
    if body != 0.0 {
        for step in 0..steps {
            (a, k) = rk4(field, variant, &t, &a, &hg, &k)?;
            t = Grassmann::scalar(n, (step + 1) as f64 * h);
        }
    }
    t = Grassmann::scalar(n, body);
    if !soul.is_zero() {
        a = rk4(field, variant, &t, &a, &soul, &k)?.0;
    }
    if a.dense_non_finite() {
        return Err(Error::Domain("transport blew up".into()));
    }
    let (_, c) = generator(field, end.t(), variant)?;
    let b = c.mul(&a).neg();
    Ok(a.add(&b.scale_left(end.theta())).with_declared(psi0.declared_parity()))
}

trait NonFinite {
    fn dense_non_finite(&self) -> bool;
}

impl NonFinite for GradedMatrix {
    fn dense_non_finite(&self) -> bool {
        self.entries().iter().any(|e| e.dense().iter().any(|c| !c.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{mat_exp, Dims};
    use crate::transport::coefficient::PolyField;

    fn odd_a(n: usize) -> GradedMatrix {
        let d = Dims::new(1, 1);
        GradedMatrix::endo_from_real(n, d, &[vec![0.0, 0.7], vec![-1.3, 0.0]], Parity::Odd).unwrap()
    }

    #[test]
    fn zero_coefficient_is_identity() {
        let n = 2;
        let d = Dims::new(1, 1);
        let z = PolyField::constant(GradedMatrix::zeros(n, d, d, Parity::Odd), GradedMatrix::zeros(n, d, d, Parity::Even))
            .unwrap();
        let id = GradedMatrix::identity(n, d);
        let end = SuperPoint::with_generator(n, 0.8, 2);
        let out = solve_d(&z, &id, &end, Variant::D, SolverOptions::default()).unwrap();
        assert_eq!(out, id);
    }

    #[test]
    fn point_case_closed_form() {
        let n = 2;
        let a = odd_a(n);
        let d = Dims::new(1, 1);
        let field = PolyField::constant(a.neg(), GradedMatrix::zeros(n, d, d, Parity::Even)).unwrap();
        let end = SuperPoint::with_generator(n, 1.0, 1);
        let out = solve_d(&field, &GradedMatrix::identity(n, d), &end, Variant::D, SolverOptions::default()).unwrap();
        let a2 = a.mul(&a);
        let expo = a2.scale_left(end.t()).neg().add(&a.scale_left(end.theta()));
        let closed = mat_exp(&expo.with_declared(Parity::Even)).unwrap();
        assert!(out.max_abs_diff(&closed) < 1e-10, "{}", out.max_abs_diff(&closed));
    }

    #[test]
    fn nilpotent_end_time() {
        let n = 3;
        let a = odd_a(n);
        let d = Dims::new(1, 1);
        let field = PolyField::constant(a.neg(), GradedMatrix::zeros(n, d, d, Parity::Even)).unwrap();
        let end = SuperPoint::new(
            Grassmann::from_terms(n, &[(vec![], 0.6), (vec![2, 3], 0.9)]),
            Grassmann::generator(n, 1),
        )
        .unwrap();
        let out = solve_d(&field, &GradedMatrix::identity(n, d), &end, Variant::D, SolverOptions::default()).unwrap();
        let a2 = a.mul(&a);
        let expo = a2.scale_left(end.t()).neg().add(&a.scale_left(end.theta()));
        let closed = mat_exp(&expo.with_declared(Parity::Even)).unwrap();
        assert!(out.max_abs_diff(&closed) < 1e-10);
    }

    #[test]
    fn window_enforced() {
        let n = 1;
        let d = Dims::new(1, 1);
        let field = PolyField::new(
            (0.0, 1.0),
            vec![GradedMatrix::zeros(n, d, d, Parity::Odd)],
            vec![GradedMatrix::zeros(n, d, d, Parity::Even)],
        )
        .unwrap();
        let end = SuperPoint::real(n, 2.0);
        let r = solve_d(&field, &GradedMatrix::identity(n, d), &end, Variant::D, SolverOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}

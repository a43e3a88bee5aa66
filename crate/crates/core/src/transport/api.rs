use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Connection, SuperPath, Superconnection, Variant};
use crate::grassmann::{gr_taylor_eval, GradedMatrix, Grassmann, Partial, Polynomial, SmoothFn};
use crate::superfield::SuperPoint;
use crate::transport::coefficient::{PathCoefficient, Source};
use crate::transport::map::TransportMap;
use crate::transport::solve::{solve_d, SolverOptions};

/// Fraction of the second window used as the gluing overlap by [`glue`].
pub const DEFAULT_OVERLAP_FRACTION: f64 = 1e-2;

/// Transport of the full frame along `c` to `end` for either derivation.
pub fn transport(c: &SuperPath, source: &Source, end: &SuperPoint, variant: Variant, opts: SolverOptions) -> Result<TransportMap> {
    let field = PathCoefficient::new(c.clone(), source.clone(), variant)?;
    let n = c.n_generators();
    let psi = solve_d(&field, &GradedMatrix::identity(n, source.rank()), end, variant, opts)?;
    TransportMap::new(psi)
}

/// `SP(c)` for a superconnection `(∇, A)` on an ordinary chart.
pub fn sp(c: &SuperPath, sc: &Superconnection, end: &SuperPoint, opts: SolverOptions) -> Result<TransportMap> {
    let source = if sc.forms().is_empty() {
        Source::Connection(sc.connection().clone())
    } else {
        Source::Superconnection(sc.clone())
    };
    transport(c, &source, end, Variant::D, opts)
}

/// `SP(c)` for a plain connection, possibly on a chart with odd coordinates.
pub fn sp_connection(c: &SuperPath, conn: &Connection, end: &SuperPoint, opts: SolverOptions) -> Result<TransportMap> {
    transport(c, &Source::Connection(conn.clone()), end, Variant::D, opts)
}

/// `PS(c)`: the Q-parallel transport, used along reversed paths.
pub fn ps(c: &SuperPath, source: &Source, end: &SuperPoint, opts: SolverOptions) -> Result<TransportMap> {
    transport(c, source, end, Variant::Q, opts)
}

/// `c′·c` joined at `joint`, with an overlap of 1 % of the window of `c′`.
pub fn glue(c: &SuperPath, next: &SuperPath, joint: &SuperPoint) -> Result<SuperPath> {
    let (a, b) = next.window();
    let overlap = DEFAULT_OVERLAP_FRACTION * (b - a);
    c.glue(next, joint, overlap)
}

/// `c̄` for the endpoint `end`; `c̄` runs back to the start of `c` when
/// transported to the same `end`.
pub fn reverse(c: &SuperPath, end: &SuperPoint) -> Result<SuperPath> {
    c.reverse(end)
}

/// `c ∘ φ` for `φ(u, η) = (r(u), √r′(u)·η)`, on the window `[0, u1]`.
///
/// `r` must fix the origin so the reparametrized path starts where `c` does.
pub fn reparametrize(c: &SuperPath, r: SmoothFn, u1: f64) -> Result<SuperPath> {
    let r0 = r.value(&[0.0])?;
    if r0.abs() > 1e-12 {
        return Err(Error::Domain(format!("reparametrization moves the origin to {r0}")));
    }
    c.reparametrize(r, (0.0, u1))
}

/// `c ∘ φ_λ` with `φ_λ(u, η) = (u/λ, η/√λ)`.
pub fn rescale(c: &SuperPath, lambda: f64) -> Result<SuperPath> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("rescaling factor {lambda} is not positive")));
    }
    let (w0, w1) = c.window();
    let r: SmoothFn = Arc::new(Polynomial::univariate(&[0.0, 1.0 / lambda]));
    c.reparametrize(r, (lambda * w0, lambda * w1))
}

/// `w^α` for even `w` with positive body, by the binomial series in the soul.
fn even_powf(w: &Grassmann, alpha: f64) -> Result<Grassmann> {
    let b = w.body();
    if !(b > 0.0) {
        return Err(Error::Domain(format!("power of an element with body {b}")));
    }
    let n = w.n_generators();
    let x = w.soul().scale(1.0 / b);
    let mut term = Grassmann::one(n);
    let mut acc = Grassmann::one(n);
    let mut coef = 1.0;
    for k in 1..=n / 2 + 1 {
        term = &term * &x;
        if term.is_zero() {
            break;
        }
        coef *= (alpha - (k - 1) as f64) / k as f64;
        acc += &term.scale(coef);
    }
    Ok(acc.scale(b.powf(alpha)))
}

/// The point `(u, η)` with `φ(u, η) = end` for `φ(u, η) = (r(u), √r′(u)·η)`,
/// searching the body of `u` in `[0, u1]`.
pub fn pulled_back_end(r: &SmoothFn, u1: f64, end: &SuperPoint) -> Result<SuperPoint> {
    let n = end.n_generators();
    let target = end.body();
    let f = |u: f64| -> Result<f64> { Ok(r.value(&[u])? - target) };
    let (mut lo, mut hi) = (0.0, u1);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(Error::Domain(format!("end time {target} is not reached on [0, {u1}]")));
    }
    let rising = fhi > flo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let dr: SmoothFn = Arc::new(Partial { inner: r.clone(), var: 0 });
    let mut u = Grassmann::scalar(n, 0.5 * (lo + hi));
    for _ in 0..=n {
        let resid = &gr_taylor_eval(r.as_ref(), std::slice::from_ref(&u))? - end.t();
        let slope = gr_taylor_eval(dr.as_ref(), std::slice::from_ref(&u))?;
        u -= &(&resid * &even_powf(&slope, -1.0)?);
    }
    let slope = gr_taylor_eval(dr.as_ref(), std::slice::from_ref(&u))?;
    let eta = end.theta() * &even_powf(&slope, -0.5)?;
    SuperPoint::new(u, eta)
}

/// Image of `end` under `φ_λ^{-1}`: `(λt, √λ θ)`.
pub fn rescaled_end(end: &SuperPoint, lambda: f64) -> Result<SuperPoint> {
    SuperPoint::new(end.t().scale(lambda), end.theta().scale(lambda.sqrt()))
}

/// One row of an adiabatic sweep.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub lambda: f64,
    pub map: TransportMap,
    /// Coefficient distance to the `λ = 0` (plain connection) transport.
    pub distance: f64,
}

impl SweepEntry {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "lambda": self.lambda, "map": self.map.to_json(), "distance": self.distance })
    }
}

/// `SP` with the forms scaled by `√λ` for every `λ` in `lambdas`, in input
/// order. `λ = 0` gives the plain-connection transport.
pub fn adiabatic_sweep(
    c: &SuperPath,
    sc: &Superconnection,
    end: &SuperPoint,
    lambdas: &[f64],
    opts: SolverOptions,
) -> Result<Vec<SweepEntry>> {
    if let Some(l) = lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(Error::Domain(format!("adiabatic parameter {l} must be positive")));
    }
    let limit = sp(c, &sc.without_forms(), end, opts)?;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let map = if lambda == 0.0 { limit.clone() } else { sp(c, &sc.with_scaled_forms(lambda.sqrt()), end, opts)? };
            let distance = map.distance(&limit);
            Ok(SweepEntry { lambda, map, distance })
        })
        .collect()
}

use std::fmt;

use crate::error::{Error, Result};
use crate::grassmann::{Grassmann, Parity};

/// An S-point `(t, θ)` of R^{1|1} with S = R^{0|N}.
#[derive(Clone, PartialEq)]
pub struct SuperPoint {
    t: Grassmann,
    theta: Grassmann,
}

impl SuperPoint {
    pub fn new(t: Grassmann, theta: Grassmann) -> Result<Self> {
        if t.n_generators() != theta.n_generators() {
            return Err(Error::Dimension(format!(
                "t in Λ_{} but θ in Λ_{}",
                t.n_generators(),
                theta.n_generators()
            )));
        }
        if !t.has_parity(Parity::Even) {
            return Err(Error::Parity(format!("t-component {t} is not even")));
        }
        if !theta.has_parity(Parity::Odd) {
            return Err(Error::Parity(format!("θ-component {theta} is not odd")));
        }
        if !t.body().is_finite() {
            return Err(Error::Domain("t-component has non-finite body".into()));
        }
        Ok(SuperPoint { t, theta })
    }

    pub fn origin(n: usize) -> Self {
        SuperPoint { t: Grassmann::zero(n), theta: Grassmann::zero(n) }
    }

    /// `(t, 0)` with real `t`.
    pub fn real(n: usize, t: f64) -> Self {
        SuperPoint { t: Grassmann::scalar(n, t), theta: Grassmann::zero(n) }
    }

    /// `(t, θ_k)` with real `t` and a single generator.
    pub fn with_generator(n: usize, t: f64, k: usize) -> Self {
        SuperPoint { t: Grassmann::scalar(n, t), theta: Grassmann::generator(n, k) }
    }

    pub fn t(&self) -> &Grassmann {
        &self.t
    }

    pub fn theta(&self) -> &Grassmann {
        &self.theta
    }

    pub fn n_generators(&self) -> usize {
        self.t.n_generators()
    }

    pub fn body(&self) -> f64 {
        self.t.body()
    }

    pub fn map(&self, f: impl Fn(&Grassmann) -> Grassmann) -> SuperPoint {
        SuperPoint { t: f(&self.t), theta: f(&self.theta) }
    }

    pub fn max_abs_diff(&self, other: &SuperPoint) -> f64 {
        self.t.max_abs_diff(&other.t).max(self.theta.max_abs_diff(&other.theta))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "t": serde_json::Value::Object(self.t.to_json_map()),
            "theta": serde_json::Value::Object(self.theta.to_json_map()),
        })
    }

    pub fn from_json(v: &serde_json::Value, n: usize) -> Result<Self> {
        let t = v.get("t").ok_or_else(|| Error::Config("super point needs \"t\"".into()))?;
        let th = v.get("theta").ok_or_else(|| Error::Config("super point needs \"theta\"".into()))?;
        Self::new(Grassmann::from_json(t, n)?, Grassmann::from_json(th, n)?)
    }
}

impl fmt::Debug for SuperPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.t, self.theta)
    }
}

/// `(t, θ)(t′, θ′) = (t + t′ + θθ′, θ + θ′)`.
pub fn group_mul(p: &SuperPoint, q: &SuperPoint) -> Result<SuperPoint> {
    let tt = p.theta.try_mul(&q.theta)?;
    Ok(SuperPoint { t: &(&p.t + &q.t) + &tt, theta: &p.theta + &q.theta })
}

pub fn group_inv(p: &SuperPoint) -> SuperPoint {
    SuperPoint { t: -&p.t, theta: -&p.theta }
}

/// `p < q` iff `q p^{-1}` lies in R^{1|1}_+, a condition on the body alone.
pub fn super_lt(p: &SuperPoint, q: &SuperPoint) -> bool {
    match group_mul(q, &group_inv(p)) {
        Ok(d) => d.t.body() > 0.0,
        Err(_) => false,
    }
}

use crate::error::{Error, Result};
use crate::grassmann::{GradedMatrix, Grassmann, Parity};

/// Which derivation on R^{1|1} to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivation {
    /// `D = ∂_θ + θ∂_t`, right-invariant.
    D,
    /// `Q = ∂_θ − θ∂_t`, left-invariant.
    Q,
    Dt,
}

/// Matrix-valued function `ψ(t, θ) = a(t) + θ∘b(t)` sampled on a uniform grid.
///
/// `a` and `b` are stored at the nodes `t0 + i·h`. Off-grid values come from
/// the quartic Lagrange interpolant through the five nearest nodes, which
/// also makes evaluation at a Grassmann time with nilpotent soul exact for
/// that interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperField {
    t0: f64,
    h: f64,
    a: Vec<GradedMatrix>,
    b: Vec<GradedMatrix>,
    parity: Parity,
}

const MIN_NODES: usize = 5;

impl SuperField {
    pub fn new(t0: f64, h: f64, a: Vec<GradedMatrix>, b: Vec<GradedMatrix>, parity: Parity) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::Dimension(format!("component grids have {} and {} nodes", a.len(), b.len())));
        }
        if !(h > 0.0 && h.is_finite() && t0.is_finite()) {
            return Err(Error::Domain(format!("bad grid t0 = {t0}, h = {h}")));
        }
        let (rows, cols, n) = (a[0].rows(), a[0].cols(), a[0].n_generators());
        for m in a.iter().chain(&b) {
            if m.rows() != rows || m.cols() != cols || m.n_generators() != n {
                return Err(Error::Dimension("grid nodes disagree in shape or N".into()));
            }
        }
        let a: Vec<_> = a.into_iter().map(|m| m.with_declared(parity)).collect();
        let b: Vec<_> = b.into_iter().map(|m| m.with_declared(parity + Parity::Odd)).collect();
        if let Some(m) = a.iter().chain(&b).find(|m| !m.is_consistent()) {
            return Err(Error::Parity(format!(
                "node violates the block pattern for a field of parity {parity:?}: {m:?}"
            )));
        }
        Ok(SuperField { t0, h, a, b, parity })
    }

    /// Samples `f` at `nodes` equally spaced points of `[t_min, t_max]`.
    pub fn sample(
        t_min: f64,
        t_max: f64,
        nodes: usize,
        parity: Parity,
        f: impl Fn(f64) -> Result<(GradedMatrix, GradedMatrix)>,
    ) -> Result<Self> {
        if nodes < 2 || t_max <= t_min {
            return Err(Error::Resolution(format!("cannot sample [{t_min}, {t_max}] with {nodes} nodes")));
        }
        let h = (t_max - t_min) / (nodes - 1) as f64;
        let (mut a, mut b) = (Vec::with_capacity(nodes), Vec::with_capacity(nodes));
        for i in 0..nodes {
            let (x, y) = f(t_min + i as f64 * h)?;
            a.push(x);
            b.push(y);
        }
        Self::new(t_min, h, a, b, parity)
    }

    pub fn t_min(&self) -> f64 {
        self.t0
    }

    pub fn t_max(&self) -> f64 {
        self.t0 + self.h * (self.a.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn a_nodes(&self) -> &[GradedMatrix] {
        &self.a
    }

    pub fn b_nodes(&self) -> &[GradedMatrix] {
        &self.b
    }

    pub fn n_generators(&self) -> usize {
        self.a[0].n_generators()
    }

    pub fn apply_derivation(&self, which: Derivation) -> Result<SuperField> {
        let da = fd4(&self.a, self.h)?;
        let (a, b, parity) = match which {
            Derivation::D => (self.b.clone(), da, self.parity + Parity::Odd),
            Derivation::Q => (self.b.clone(), da.iter().map(|m| m.neg()).collect(), self.parity + Parity::Odd),
            Derivation::Dt => (da, fd4(&self.b, self.h)?, self.parity),
        };
        SuperField::new(self.t0, self.h, a, b, parity)
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let (lo, hi) = (self.t_min(), self.t_max());
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::Domain(format!("t = {t} outside the sampled window [{lo}, {hi}]")));
        }
        if self.len() < MIN_NODES {
            return Err(Error::Resolution(format!("{} grid nodes, quartic interpolation needs {MIN_NODES}", self.len())));
        }
        let centre = ((t - self.t0) / self.h).round() as isize;
        Ok((centre - 2).clamp(0, (self.len() - MIN_NODES) as isize) as usize)
    }

    /// `(a(t), b(t))` at a possibly Grassmann-valued even time.
    pub fn eval(&self, t: &Grassmann) -> Result<(GradedMatrix, GradedMatrix)> {
        let first = self.locate(t.body())?;
        let n = t.n_generators();
        if n != self.n_generators() {
            return Err(Error::Dimension(format!("time in Λ_{n}, field over Λ_{}", self.n_generators())));
        }
        let nodes: Vec<f64> = (first..first + MIN_NODES).map(|i| self.node(i)).collect();
        let mut a = GradedMatrix::zeros(n, self.a[0].rows(), self.a[0].cols(), self.parity);
        let mut b = GradedMatrix::zeros(n, self.a[0].rows(), self.a[0].cols(), self.parity + Parity::Odd);
        for k in 0..MIN_NODES {
            let mut w = Grassmann::one(n);
            for (j, &tj) in nodes.iter().enumerate() {
                if j != k {
                    w = &w * &(t - &Grassmann::scalar(n, tj)).scale(1.0 / (nodes[k] - tj));
                }
            }
            a = a.add(&self.a[first + k].scale_left(&w));
            b = b.add(&self.b[first + k].scale_left(&w));
        }
        Ok((a.with_declared(self.parity), b.with_declared(self.parity + Parity::Odd)))
    }

    pub fn eval_real(&self, t: f64) -> Result<(GradedMatrix, GradedMatrix)> {
        self.eval(&Grassmann::scalar(self.n_generators(), t))
    }

    /// `ψ(t, θ) = a(t) + θ∘b(t)`.
    pub fn at(&self, t: &Grassmann, theta: &Grassmann) -> Result<GradedMatrix> {
        let (a, b) = self.eval(t)?;
        Ok(a.add(&b.scale_left(theta)).with_declared(self.parity))
    }

    /// Precomposition with the right translation `(u, η) ↦ (u, η)(t, θ)` for real `t`.
    ///
    /// Expanding `ψ(u + t + ηθ, η + θ)` in η gives the pair
    /// `(a + θ∘b, b + θ∘a′)` evaluated at `u + t`.
    pub fn right_translate(&self, t: f64, theta: &Grassmann) -> Result<SuperField> {
        if !theta.has_parity(Parity::Odd) {
            return Err(Error::Parity("translation θ must be odd".into()));
        }
        let da = fd4(&self.a, self.h)?;
        let a = self.a.iter().zip(&self.b).map(|(a, b)| a.add(&b.scale_left(theta))).collect();
        let b = self.b.iter().zip(&da).map(|(b, d)| b.add(&d.scale_left(theta))).collect();
        SuperField::new(self.t0 - t, self.h, a, b, self.parity)
    }

    /// Precomposition with the inversion `(u, η) ↦ (−u, −η)`.
    pub fn invert(&self) -> SuperField {
        let a = self.a.iter().rev().cloned().collect();
        let b = self.b.iter().rev().map(|m| m.neg()).collect();
        SuperField { t0: -self.t_max(), h: self.h, a, b, parity: self.parity }
    }

    pub fn neg(&self) -> SuperField {
        SuperField {
            t0: self.t0,
            h: self.h,
            a: self.a.iter().map(|m| m.neg()).collect(),
            b: self.b.iter().map(|m| m.neg()).collect(),
            parity: self.parity,
        }
    }

    /// Largest coefficient difference over the nodes of two fields on the same grid.
    pub fn max_abs_diff(&self, other: &SuperField) -> Result<f64> {
        let same = self.len() == other.len()
            && (self.t0 - other.t0).abs() <= 1e-12 * (1.0 + self.t0.abs())
            && (self.h - other.h).abs() <= 1e-14 * self.h;
        if !same {
            return Err(Error::Dimension("fields live on different grids".into()));
        }
        let d = self
            .a
            .iter()
            .zip(&other.a)
            .chain(self.b.iter().zip(&other.b))
            .fold(0.0, |m, (x, y)| f64::max(m, x.max_abs_diff(y)));
        Ok(d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "t_min": self.t0,
            "step": self.h,
            "parity": self.parity,
            "a": self.a.iter().map(GradedMatrix::to_json).collect::<Vec<_>>(),
            "b": self.b.iter().map(GradedMatrix::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Fourth-order finite-difference derivative of a uniformly sampled sequence.
pub(crate) fn fd4(f: &[GradedMatrix], h: f64) -> Result<Vec<GradedMatrix>> {
    let n = f.len();
    if n < MIN_NODES {
        return Err(Error::Resolution(format!("{n} grid nodes, fourth-order differences need {MIN_NODES}")));
    }
    let combo = |idx: [usize; 5], w: [f64; 5]| {
        let mut acc = f[idx[0]].scale(w[0]);
        for k in 1..5 {
            acc = acc.add(&f[idx[k]].scale(w[k]));
        }
        acc.scale(1.0 / (12.0 * h))
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = if i == 0 {
            combo([0, 1, 2, 3, 4], [-25.0, 48.0, -36.0, 16.0, -3.0])
        } else if i == 1 {
            combo([0, 1, 2, 3, 4], [-3.0, -10.0, 18.0, -6.0, 1.0])
        } else if i == n - 2 {
            combo([n - 1, n - 2, n - 3, n - 4, n - 5], [3.0, 10.0, -18.0, 6.0, -1.0])
        } else if i == n - 1 {
            combo([n - 1, n - 2, n - 3, n - 4, n - 5], [25.0, -48.0, 36.0, -16.0, 3.0])
        } else {
            combo([i - 2, i - 1, i, i + 1, i + 2], [1.0, -8.0, 0.0, 8.0, -1.0])
        };
        out.push(d.with_declared(f[i].declared_parity()));
    }
    Ok(out)
}

/// Residuals `max|DDψ − ∂_tψ|` and `max|QQψ + ∂_tψ|` over the grid.
pub fn dd_identity_check(psi: &SuperField) -> Result<(f64, f64)> {
    let dt = psi.apply_derivation(Derivation::Dt)?;
    let dd = psi.apply_derivation(Derivation::D)?.apply_derivation(Derivation::D)?;
    let qq = psi.apply_derivation(Derivation::Q)?.apply_derivation(Derivation::Q)?;
    Ok((dd.max_abs_diff(&dt)?, qq.max_abs_diff(&dt.neg())?))
}

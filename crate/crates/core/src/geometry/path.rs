use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::{Dims, Grassmann, Parity, Polynomial, SmoothFn, Substitution};
use crate::superfield::{group_mul, SuperPoint};

/// Derivatives `0..=order` of one coordinate pair: `c^♯x^i = x(t) + θη(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordJet {
    pub x: Vec<Grassmann>,
    pub eta: Vec<Grassmann>,
}

/// Chart-level description of a superpath through its component jets.
pub trait PathModel: Send + Sync + Debug {
    fn dims(&self) -> Dims;
    fn n_generators(&self) -> usize;
    /// Closed interval of real times on which the jets are available.
    fn window(&self) -> (f64, f64);
    fn jet(&self, t: f64, order: usize) -> Result<Vec<CoordJet>>;
}

/// Component values of a superpath at one (possibly Grassmann) time.
#[derive(Debug, Clone, PartialEq)]
pub struct PathValues {
    pub n: usize,
    pub x: Vec<Grassmann>,
    pub eta: Vec<Grassmann>,
    pub xdot: Vec<Grassmann>,
}

/// A superpath `c: S×R^{1|1} → R^{p|q}` with `c^♯x^i = x^i(t) + θη^i(t)`.
#[derive(Debug, Clone)]
pub struct SuperPath {
    model: Arc<dyn PathModel>,
}

fn window_slack(w: (f64, f64)) -> f64 {
    1e-12 * (1.0 + w.0.abs().max(w.1.abs()))
}

fn check_in_window(w: (f64, f64), t: f64) -> Result<()> {
    let s = window_slack(w);
    if t >= w.0 - s && t <= w.1 + s {
        Ok(())
    } else {
        Err(Error::Domain(format!("time {t} outside path window [{}, {}]", w.0, w.1)))
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl SuperPath {
    pub fn from_model(model: Arc<dyn PathModel>) -> Self {
        SuperPath { model }
    }

    pub fn dims(&self) -> Dims {
        self.model.dims()
    }

    pub fn n_generators(&self) -> usize {
        self.model.n_generators()
    }

    pub fn window(&self) -> (f64, f64) {
        self.model.window()
    }

    pub fn jet(&self, t: f64, order: usize) -> Result<Vec<CoordJet>> {
        check_in_window(self.window(), t)?;
        self.model.jet(t, order)
    }

    /// Jets at an even Grassmann time, by the terminating Taylor series in its soul.
    pub fn jet_at(&self, t: &Grassmann, order: usize) -> Result<Vec<CoordJet>> {
        if !t.has_parity(Parity::Even) {
            return Err(Error::Parity("path time must be even".into()));
        }
        let soul = t.soul();
        if soul.is_zero() {
            return self.jet(t.body(), order);
        }
        let mut powers = vec![Grassmann::one(t.n_generators())];
        loop {
            let next = powers.last().unwrap() * &soul;
            if next.is_zero() {
                break;
            }
            powers.push(next);
        }
        let extra = powers.len() - 1;
        let base = self.jet(t.body(), order + extra)?;
        let shift = |series: &[Grassmann]| -> Vec<Grassmann> {
            (0..=order)
                .map(|d| {
                    let mut acc = series[d].clone();
                    for (k, p) in powers.iter().enumerate().skip(1) {
                        acc += &(&series[d + k] * p).scale(1.0 / factorial(k));
                    }
                    acc
                })
                .collect()
        };
        Ok(base.iter().map(|j| CoordJet { x: shift(&j.x), eta: shift(&j.eta) }).collect())
    }

    pub fn values(&self, t: &Grassmann) -> Result<PathValues> {
        let jets = self.jet_at(t, 1)?;
        Ok(PathValues {
            n: self.n_generators(),
            x: jets.iter().map(|j| j.x[0].clone()).collect(),
            eta: jets.iter().map(|j| j.eta[0].clone()).collect(),
            xdot: jets.iter().map(|j| j.x[1].clone()).collect(),
        })
    }

    pub fn values_real(&self, t: f64) -> Result<PathValues> {
        self.values(&Grassmann::scalar(self.n_generators(), t))
    }

    /// Path whose components are finite sums `Σ g_m(t) κ_m` of univariate
    /// smooth functions times Grassmann constants.
    pub fn from_components(
        dims: Dims,
        n: usize,
        window: (f64, f64),
        x: Vec<Component>,
        eta: Vec<Component>,
    ) -> Result<Self> {
        let model = ComponentPath::new(dims, n, window, x, eta)?;
        Ok(SuperPath { model: Arc::new(model) })
    }

    /// Polynomial components: `x^i(t) = Σ_k x_coeffs[i][k] t^k`, same for η.
    pub fn polynomial(
        dims: Dims,
        n: usize,
        window: (f64, f64),
        x_coeffs: Vec<Vec<Grassmann>>,
        eta_coeffs: Vec<Vec<Grassmann>>,
    ) -> Result<Self> {
        let x = x_coeffs.into_iter().map(Component::polynomial).collect();
        let eta = eta_coeffs.into_iter().map(Component::polynomial).collect();
        Self::from_components(dims, n, window, x, eta)
    }

    /// `x(t) = x0 + t·v` with constant odd partners `η`.
    pub fn line(
        dims: Dims,
        n: usize,
        window: (f64, f64),
        x0: Vec<Grassmann>,
        v: Vec<Grassmann>,
        eta: Vec<Grassmann>,
    ) -> Result<Self> {
        let xc = x0.into_iter().zip(v).map(|(a, b)| vec![a, b]).collect();
        let ec = eta.into_iter().map(|e| vec![e]).collect();
        Self::polynomial(dims, n, window, xc, ec)
    }

    /// Precomposition with the right translation by `p = (t, θ)`.
    pub fn right_translate(&self, p: &SuperPoint) -> Result<SuperPath> {
        if p.n_generators() != self.n_generators() {
            return Err(Error::Dimension("translation and path over different algebras".into()));
        }
        Ok(SuperPath { model: Arc::new(RightTranslated { inner: self.clone(), point: p.clone() }) })
    }

    /// Precomposition with the inversion `(u, η) ↦ (−u, −η)`.
    pub fn invert(&self) -> SuperPath {
        SuperPath { model: Arc::new(Inverted { inner: self.clone() }) }
    }

    /// `c̄(u, η) = c((u, η)^{-1}(t, θ))` for the endpoint `end = (t, θ)`.
    pub fn reverse(&self, end: &SuperPoint) -> Result<SuperPath> {
        Ok(self.right_translate(end)?.invert())
    }

    /// Pushes the path data through an algebra map Λ_{N′} → Λ_N.
    pub fn substitute(&self, map: &Substitution) -> Result<SuperPath> {
        if map.source_n() != self.n_generators() {
            return Err(Error::Dimension(format!(
                "substitution from Λ_{} applied to a path over Λ_{}",
                map.source_n(),
                self.n_generators()
            )));
        }
        Ok(SuperPath { model: Arc::new(Substituted { inner: self.clone(), map: map.clone() }) })
    }

    /// Path over Λ_{N+1} with every generator index shifted up by one,
    /// leaving θ_1 free.
    pub fn shift_generators(&self) -> Result<SuperPath> {
        let n = self.n_generators();
        let images = (1..=n).map(|i| Grassmann::generator(n + 1, i + 1)).collect();
        self.substitute(&Substitution::new(n + 1, images)?)
    }

    /// `c ∘ φ` for `φ(u, η) = (r(u), √r′(u)·η)` on the window `[u0, u1]`.
    pub fn reparametrize(&self, r: SmoothFn, window: (f64, f64)) -> Result<SuperPath> {
        Reparametrized::new(self.clone(), r, window).map(|m| SuperPath { model: Arc::new(m) })
    }

    /// Concatenation `c′·c` joined at `joint = (t, θ)` on `c`.
    ///
    /// Requires `c′ = c ∘ R_{(t,θ)}` on `[0, overlap]`, checked on 16 samples
    /// of the components to 1e-9. The joined path is `c` up to the joint and
    /// `c′ ∘ R_{(t,θ)^{-1}}` after it.
    pub fn glue(&self, next: &SuperPath, joint: &SuperPoint, overlap: f64) -> Result<SuperPath> {
        if self.dims() != next.dims() || self.n_generators() != next.n_generators() {
            return Err(Error::Dimension("glued paths live in different charts or algebras".into()));
        }
        let tb = joint.body();
        let (w0, w1) = self.window();
        if tb < w0 || tb > w1 {
            return Err(Error::Domain(format!("joint body {tb} outside the first window [{w0}, {w1}]")));
        }
        let shifted = self.right_translate(joint)?;
        let (s0, s1) = shifted.window();
        let (n0, n1) = next.window();
        if overlap <= 0.0 || s0 > 0.0 || n0 > 0.0 || s1 < overlap || n1 < overlap {
            return Err(Error::Compatibility(format!(
                "no common window of width {overlap} after the joint"
            )));
        }
        for k in 0..16 {
            let u = overlap * k as f64 / 15.0;
            let a = shifted.jet(u, 0)?;
            let b = next.jet(u, 0)?;
            for (ja, jb) in a.iter().zip(&b) {
                let d = ja.x[0].max_abs_diff(&jb.x[0]).max(ja.eta[0].max_abs_diff(&jb.eta[0]));
                if d > 1e-9 {
                    return Err(Error::Compatibility(format!(
                        "second path differs from the translated first by {d:.3e} at u = {u}"
                    )));
                }
            }
        }
        let back = SuperPoint::new(-joint.t(), -joint.theta())?;
        let tail = next.right_translate(&back)?;
        Ok(SuperPath { model: Arc::new(Glued { head: self.clone(), tail, split: tb }) })
    }
}

/// Endpoint of `c′·c` from the endpoints of its pieces.
pub fn glued_endpoint(joint: &SuperPoint, next_end: &SuperPoint) -> Result<SuperPoint> {
    group_mul(next_end, joint)
}

/// `Σ g_m(t) κ_m` with univariate `g_m`.
#[derive(Debug, Clone)]
pub struct Component {
    pub terms: Vec<(SmoothFn, Grassmann)>,
}

impl Component {
    pub fn polynomial(coeffs: Vec<Grassmann>) -> Self {
        Component {
            terms: coeffs
                .into_iter()
                .enumerate()
                .map(|(k, c)| {
                    let mut mono = vec![0.0; k + 1];
                    mono[k] = 1.0;
                    (Arc::new(Polynomial::univariate(&mono)) as SmoothFn, c)
                })
                .collect(),
        }
    }

    pub fn constant(c: Grassmann) -> Self {
        Self::polynomial(vec![c])
    }

    fn derivative(&self, n: usize, t: f64, d: usize) -> Result<Grassmann> {
        let mut acc = Grassmann::zero(n);
        for (g, k) in &self.terms {
            let v = g.partial(&[t], &[d])?;
            if v != 0.0 {
                acc += &k.scale(v);
            }
        }
        Ok(acc)
    }

    fn check(&self, n: usize, p: Parity, what: &str) -> Result<()> {
        for (g, k) in &self.terms {
            if g.arity() != 1 {
                return Err(Error::Dimension(format!("{what}: component function of arity {}", g.arity())));
            }
            if k.n_generators() != n {
                return Err(Error::Dimension(format!("{what}: coefficient in Λ_{}, expected Λ_{n}", k.n_generators())));
            }
            if !k.has_parity(p) {
                return Err(Error::Parity(format!("{what}: coefficient {k} should be {p:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
struct ComponentPath {
    dims: Dims,
    n: usize,
    window: (f64, f64),
    x: Vec<Component>,
    eta: Vec<Component>,
}

impl ComponentPath {
    fn new(dims: Dims, n: usize, window: (f64, f64), x: Vec<Component>, eta: Vec<Component>) -> Result<Self> {
        if x.len() != dims.total() || eta.len() != dims.total() {
            return Err(Error::Dimension(format!("path into {dims} needs {} components", dims.total())));
        }
        if !(window.0 < window.1) {
            return Err(Error::Domain(format!("empty path window {window:?}")));
        }
        for i in 0..dims.total() {
            let p = dims.parity_of(i);
            x[i].check(n, p, &format!("x^{}", i + 1))?;
            eta[i].check(n, p + Parity::Odd, &format!("η^{}", i + 1))?;
        }
        Ok(ComponentPath { dims, n, window, x, eta })
    }
}

impl PathModel for ComponentPath {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn n_generators(&self) -> usize {
        self.n
    }

    fn window(&self) -> (f64, f64) {
        self.window
    }

    fn jet(&self, t: f64, order: usize) -> Result<Vec<CoordJet>> {
        (0..self.dims.total())
            .map(|i| {
                Ok(CoordJet {
                    x: (0..=order).map(|d| self.x[i].derivative(self.n, t, d)).collect::<Result<_>>()?,
                    eta: (0..=order).map(|d| self.eta[i].derivative(self.n, t, d)).collect::<Result<_>>()?,
                })
            })
            .collect()
    }
}

#[derive(Debug)]
struct RightTranslated {
    inner: SuperPath,
    point: SuperPoint,
}

impl PathModel for RightTranslated {
    fn dims(&self) -> Dims {
        self.inner.dims()
    }

    fn n_generators(&self) -> usize {
        self.inner.n_generators()
    }

    fn window(&self) -> (f64, f64) {
        let (a, b) = self.inner.window();
        let t = self.point.body();
        (a - t, b - t)
    }

    fn jet(&self, u: f64, order: usize) -> Result<Vec<CoordJet>> {
        let n = self.n_generators();
        let at = &Grassmann::scalar(n, u) + self.point.t();
        let base = self.inner.jet_at(&at, order + 1)?;
        let th = self.point.theta();
        Ok(base
            .into_iter()
            .map(|j| CoordJet {
                x: (0..=order).map(|d| &j.x[d] + &(th * &j.eta[d])).collect(),
                eta: (0..=order).map(|d| &j.eta[d] + &(th * &j.x[d + 1])).collect(),
            })
            .collect())
    }
}

#[derive(Debug)]
struct Inverted {
    inner: SuperPath,
}

impl PathModel for Inverted {
    fn dims(&self) -> Dims {
        self.inner.dims()
    }

    fn n_generators(&self) -> usize {
        self.inner.n_generators()
    }

    fn window(&self) -> (f64, f64) {
        let (a, b) = self.inner.window();
        (-b, -a)
    }

    fn jet(&self, u: f64, order: usize) -> Result<Vec<CoordJet>> {
        let base = self.inner.jet(-u, order)?;
        let sign = |d: usize| if d % 2 == 0 { 1.0 } else { -1.0 };
        Ok(base
            .into_iter()
            .map(|j| CoordJet {
                x: j.x.iter().enumerate().map(|(d, v)| v.scale(sign(d))).collect(),
                eta: j.eta.iter().enumerate().map(|(d, v)| v.scale(-sign(d))).collect(),
            })
            .collect())
    }
}

#[derive(Debug)]
struct Substituted {
    inner: SuperPath,
    map: Substitution,
}

impl PathModel for Substituted {
    fn dims(&self) -> Dims {
        self.inner.dims()
    }

    fn n_generators(&self) -> usize {
        self.map.target_n()
    }

    fn window(&self) -> (f64, f64) {
        self.inner.window()
    }

    fn jet(&self, t: f64, order: usize) -> Result<Vec<CoordJet>> {
        Ok(self
            .inner
            .jet(t, order)?
            .into_iter()
            .map(|j| CoordJet {
                x: j.x.iter().map(|v| self.map.apply(v)).collect(),
                eta: j.eta.iter().map(|v| self.map.apply(v)).collect(),
            })
            .collect())
    }
}

#[derive(Debug)]
struct Glued {
    head: SuperPath,
    tail: SuperPath,
    split: f64,
}

impl PathModel for Glued {
    fn dims(&self) -> Dims {
        self.head.dims()
    }

    fn n_generators(&self) -> usize {
        self.head.n_generators()
    }

    fn window(&self) -> (f64, f64) {
        (self.head.window().0, self.tail.window().1)
    }

    fn jet(&self, u: f64, order: usize) -> Result<Vec<CoordJet>> {
        if u <= self.split {
            self.head.jet(u, order)
        } else {
            self.tail.jet(u, order)
        }
    }
}

#[derive(Debug)]
struct Reparametrized {
    inner: SuperPath,
    r: SmoothFn,
    window: (f64, f64),
}

impl Reparametrized {
    fn new(inner: SuperPath, r: SmoothFn, window: (f64, f64)) -> Result<Self> {
        if r.arity() != 1 {
            return Err(Error::Dimension("reparametrization must be a function of one variable".into()));
        }
        if !(window.0 < window.1) {
            return Err(Error::Domain(format!("empty reparametrization window {window:?}")));
        }
        let iw = inner.window();
        for k in 0..=64 {
            let u = window.0 + (window.1 - window.0) * k as f64 / 64.0;
            let slope = r.partial(&[u], &[1])?;
            if !(slope > 0.0) {
                return Err(Error::Orientation(format!("r′({u}) = {slope} is not positive")));
            }
            check_in_window(iw, r.value(&[u])?)?;
        }
        Ok(Reparametrized { inner, r, window })
    }
}

/// Truncated power-series product `a·b` up to `order`.
fn series_mul(a: &[f64], b: &[f64], order: usize) -> Vec<f64> {
    (0..=order).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

impl PathModel for Reparametrized {
    fn dims(&self) -> Dims {
        self.inner.dims()
    }

    fn n_generators(&self) -> usize {
        self.inner.n_generators()
    }

    fn window(&self) -> (f64, f64) {
        self.window
    }

    fn jet(&self, u: f64, order: usize) -> Result<Vec<CoordJet>> {
        let n = self.n_generators();
        // Taylor coefficients of r around u, one order higher for r′
        let r: Vec<f64> =
            (0..=order + 1).map(|k| Ok(self.r.partial(&[u], &[k])? / factorial(k))).collect::<Result<_>>()?;
        let mut delta = r[..=order].to_vec();
        delta[0] = 0.0;
        let mut delta_pows = vec![{
            let mut one = vec![0.0; order + 1];
            one[0] = 1.0;
            one
        }];
        for m in 1..=order {
            let next = series_mul(&delta_pows[m - 1], &delta, order);
            delta_pows.push(next);
        }
        let q: Vec<f64> = (0..=order).map(|k| (k + 1) as f64 * r[k + 1]).collect();
        let mut s = vec![0.0; order + 1];
        s[0] = q[0].sqrt();
        for k in 1..=order {
            let cross: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (q[k] - cross) / (2.0 * s[0]);
        }
        let base = self.inner.jet(r[0], order)?;
        let compose = |inner: &[Grassmann]| -> Vec<Grassmann> {
            (0..=order)
                .map(|k| {
                    let mut acc = Grassmann::zero(n);
                    for (m, dp) in delta_pows.iter().enumerate() {
                        if dp[k] != 0.0 {
                            acc += &inner[m].scale(dp[k] / factorial(m));
                        }
                    }
                    acc
                })
                .collect()
        };
        Ok(base
            .iter()
            .map(|j| {
                let xs = compose(&j.x);
                let hs = compose(&j.eta);
                let es: Vec<Grassmann> = (0..=order)
                    .map(|k| {
                        let mut acc = Grassmann::zero(n);
                        for i in 0..=k {
                            acc += &hs[k - i].scale(s[i]);
                        }
                        acc
                    })
                    .collect();
                CoordJet {
                    x: xs.iter().enumerate().map(|(k, v)| v.scale(factorial(k))).collect(),
                    eta: es.iter().enumerate().map(|(k, v)| v.scale(factorial(k))).collect(),
                }
            })
            .collect())
    }
}

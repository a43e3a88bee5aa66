//! Versioned JSON run configuration: chart, bundle, superconnection, path,
//! end point, flow and sweep settings.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::flows::SuperVectorField;
use crate::geometry::{Component, Connection, DifferentialForm, MatrixFunction, PolyTerm, SuperFunction, SuperPath, Superconnection};
use crate::grassmann::{Dims, Elementary, Grassmann, Parity, Polynomial, SmoothFn, MAX_GENERATORS};
use crate::superfield::SuperPoint;
use crate::transport::{SolverOptions, Source};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsSpec {
    pub p: usize,
    #[serde(default)]
    pub q: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub rank_even: usize,
    pub rank_odd: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormComponentSpec {
    pub index: Vec<usize>,
    pub terms: Vec<PolyTerm>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub degree: usize,
    pub components: Vec<FormComponentSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PathSpec {
    Line { x0: Vec<Value>, v: Vec<Value>, eta: Vec<Value> },
    Circle { center: [f64; 2], radius: f64, omega: f64, eta: Vec<Value> },
    Polynomial { x: Vec<Vec<Value>>, eta: Vec<Vec<Value>> },
    /// Samples at uniform times, interpolated by one polynomial per component.
    Table { t0: f64, dt: f64, x: Vec<Vec<Value>>, eta: Vec<Vec<Value>> },
}

/// `coeff · x^exponents ζ^odd` in a scalar super function.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarTerm {
    pub exponents: Vec<u32>,
    #[serde(default)]
    pub odd: Vec<usize>,
    pub coeff: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    /// `[p, q]` of the flow's chart; defaults to the main chart.
    #[serde(default)]
    pub chart: Option<(usize, usize)>,
    pub parity: Parity,
    /// One list of terms per chart coordinate.
    pub field: Vec<Vec<ScalarTerm>>,
    pub initial: Vec<Value>,
    pub t_end: f64,
    #[serde(default)]
    pub theta: Option<Value>,
    #[serde(default = "default_flow_steps")]
    pub steps: usize,
}

fn default_flow_steps() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndSpec {
    pub t: Value,
    #[serde(default)]
    pub theta: Option<Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub lambdas: Vec<f64>,
}

fn default_window() -> (f64, f64) {
    (-0.5, 2.0)
}

fn default_h() -> f64 {
    1e-3
}

/// The raw configuration document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u64,
    pub dims: DimsSpec,
    /// One polynomial per chart coordinate; missing entries are zero.
    #[serde(default)]
    pub connection: Vec<Vec<PolyTerm>>,
    #[serde(default)]
    pub forms: Vec<FormSpec>,
    pub path: Option<PathSpec>,
    #[serde(default = "default_window")]
    pub window: (f64, f64),
    pub end: Option<EndSpec>,
    #[serde(default = "default_h")]
    pub h: f64,
    pub flow: Option<FlowSpec>,
    pub sweep: Option<SweepSpec>,
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl Config {
    pub fn from_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| cfg(format!("invalid JSON: {e}")))?;
        match v.get("schema").and_then(Value::as_u64) {
            Some(SCHEMA_VERSION) => {}
            Some(other) => return Err(cfg(format!("unsupported schema version {other}"))),
            None => return Err(cfg("missing \"schema\": 1")),
        }
        let c: Config = serde_json::from_value(v).map_err(|e| cfg(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg(format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dims;
        if d.n > MAX_GENERATORS - 2 {
            return Err(cfg(format!("N = {} exceeds {}", d.n, MAX_GENERATORS - 2)));
        }
        if d.rank_even + d.rank_odd == 0 {
            return Err(cfg("bundle rank is zero"));
        }
        if self.connection.len() > d.p + d.q {
            return Err(cfg(format!("{} connection coefficients on a chart of dimension {}", self.connection.len(), d.p + d.q)));
        }
        if !self.forms.is_empty() && d.q > 0 {
            return Err(cfg("superconnection forms need an ordinary chart (q = 0)"));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(cfg(format!("step size {} is not positive", self.h)));
        }
        if !(self.window.0 <= 0.0 && self.window.0 < self.window.1) {
            return Err(cfg(format!("window {:?} must contain 0", self.window)));
        }
        // build everything once so schema errors surface as config errors
        let as_cfg = |e: Error| match e {
            Error::Config(m) => Error::Config(m),
            other => Error::Config(other.to_string()),
        };
        self.source().map_err(as_cfg)?;
        if self.path.is_some() {
            self.superpath().map_err(as_cfg)?;
        }
        if self.end.is_some() {
            self.end_point().map_err(as_cfg)?;
        }
        if self.flow.is_some() {
            self.flow_field().map_err(as_cfg)?;
            self.flow_initial().map_err(as_cfg)?;
            self.flow_theta().map_err(as_cfg)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.dims.n
    }

    pub fn chart(&self) -> Dims {
        Dims::new(self.dims.p, self.dims.q)
    }

    pub fn rank(&self) -> Dims {
        Dims::new(self.dims.rank_even, self.dims.rank_odd)
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions { h: self.h }
    }

    pub fn grassmann(&self, v: &Value) -> Result<Grassmann> {
        Grassmann::from_json(v, self.n())
    }

    pub fn connection(&self) -> Result<Connection> {
        let (chart, rank) = (self.chart(), self.rank());
        let mut coeffs = Vec::with_capacity(chart.total());
        for i in 0..chart.total() {
            let coeff = match self.connection.get(i) {
                Some(terms) => MatrixFunction::polynomial(chart, rank, chart.parity_of(i), terms)?,
                None => MatrixFunction::zero(chart, rank, rank, chart.parity_of(i)),
            };
            coeffs.push(coeff);
        }
        Connection::new(chart, rank, coeffs)
    }

    pub fn forms(&self) -> Result<Vec<DifferentialForm>> {
        let (p, rank) = (self.dims.p, self.rank());
        let chart = Dims::new(p, 0);
        self.forms
            .iter()
            .map(|f| {
                let end = if f.degree % 2 == 0 { Parity::Odd } else { Parity::Even };
                let sparse = f
                    .components
                    .iter()
                    .map(|c| Ok((c.index.clone(), MatrixFunction::polynomial(chart, rank, end, &c.terms)?)))
                    .collect::<Result<Vec<_>>>()?;
                DifferentialForm::new(p, f.degree, rank, end, sparse)
            })
            .collect()
    }

    /// The superconnection on an ordinary chart; a config error otherwise.
    pub fn superconnection(&self) -> Result<Superconnection> {
        if self.dims.q > 0 {
            return Err(cfg("a superconnection needs q = 0"));
        }
        Superconnection::new(self.connection()?, self.forms()?)
    }

    /// Transport data: the plain connection if there are no forms.
    pub fn source(&self) -> Result<Source> {
        if self.forms.is_empty() {
            Ok(Source::Connection(self.connection()?))
        } else {
            Ok(Source::Superconnection(self.superconnection()?))
        }
    }

    fn values(&self, vs: &[Value], what: &str, len: usize) -> Result<Vec<Grassmann>> {
        if vs.len() != len {
            return Err(cfg(format!("{what}: expected {len} entries, got {}", vs.len())));
        }
        vs.iter().map(|v| self.grassmann(v)).collect()
    }

    pub fn superpath(&self) -> Result<SuperPath> {
        let spec = self.path.as_ref().ok_or_else(|| cfg("config has no \"path\""))?;
        let (chart, n, window) = (self.chart(), self.n(), self.window);
        let dim = chart.total();
        match spec {
            PathSpec::Line { x0, v, eta } => SuperPath::line(
                chart,
                n,
                window,
                self.values(x0, "path.x0", dim)?,
                self.values(v, "path.v", dim)?,
                self.values(eta, "path.eta", dim)?,
            ),
            PathSpec::Circle { center, radius, omega, eta } => {
                if chart != Dims::new(2, 0) {
                    return Err(cfg("circle paths need the chart R^2"));
                }
                let eta = self.values(eta, "path.eta", 2)?;
                let wave = |cos: bool| -> SmoothFn {
                    if cos {
                        Arc::new(Elementary::Cos { amplitude: *radius, rate: *omega, phase: 0.0 })
                    } else {
                        Arc::new(Elementary::Sin { amplitude: *radius, rate: *omega, phase: 0.0 })
                    }
                };
                let one: SmoothFn = Arc::new(Polynomial::constant(1, 1.0));
                let x = (0..2)
                    .map(|i| Component {
                        terms: vec![(one.clone(), Grassmann::scalar(n, center[i])), (wave(i == 0), Grassmann::one(n))],
                    })
                    .collect();
                let eta = eta.into_iter().map(Component::constant).collect();
                SuperPath::from_components(chart, n, window, x, eta)
            }
            PathSpec::Polynomial { x, eta } => {
                if x.len() != dim || eta.len() != dim {
                    return Err(cfg(format!("polynomial path needs {dim} x and η components")));
                }
                let xs = x.iter().map(|c| self.values(c, "path.x", c.len())).collect::<Result<Vec<_>>>()?;
                let es = eta.iter().map(|c| self.values(c, "path.eta", c.len())).collect::<Result<Vec<_>>>()?;
                SuperPath::polynomial(chart, n, window, xs, es)
            }
            PathSpec::Table { t0, dt, x, eta } => {
                if x.len() != dim || eta.len() != dim {
                    return Err(cfg(format!("table path needs {dim} x and η sample rows")));
                }
                let fit = |rows: &Vec<Vec<Value>>, what: &str| -> Result<Vec<Vec<Grassmann>>> {
                    rows.iter()
                        .map(|row| interpolate(*t0, *dt, &self.values(row, what, row.len())?))
                        .collect()
                };
                SuperPath::polynomial(chart, n, window, fit(x, "path.x")?, fit(eta, "path.eta")?)
            }
        }
    }

    pub fn end_point(&self) -> Result<SuperPoint> {
        let e = self.end.as_ref().ok_or_else(|| cfg("config has no \"end\""))?;
        let t = self.grassmann(&e.t)?;
        let theta = match &e.theta {
            Some(v) => self.grassmann(v)?,
            None => Grassmann::zero(self.n()),
        };
        SuperPoint::new(t, theta)
    }

    pub fn flow_field(&self) -> Result<SuperVectorField> {
        let f = self.flow.as_ref().ok_or_else(|| cfg("config has no \"flow\""))?;
        let chart = self.flow_chart();
        if f.field.len() != chart.total() {
            return Err(cfg(format!("flow field needs {} coefficients", chart.total())));
        }
        let coeffs = f
            .field
            .iter()
            .map(|terms| {
                let mut g = SuperFunction::zero(chart);
                for t in terms {
                    let poly: SmoothFn = Arc::new(Polynomial::new(chart.even, vec![(t.exponents.clone(), t.coeff)])?);
                    g = g.with_term(&t.odd, poly)?;
                }
                Ok(g)
            })
            .collect::<Result<Vec<_>>>()?;
        SuperVectorField::new(chart, f.parity, coeffs)
    }

    pub fn flow_initial(&self) -> Result<Vec<Grassmann>> {
        let f = self.flow.as_ref().ok_or_else(|| cfg("config has no \"flow\""))?;
        self.values(&f.initial, "flow.initial", self.flow_chart().total())
    }

    pub fn flow_chart(&self) -> Dims {
        match self.flow.as_ref().and_then(|f| f.chart) {
            Some((p, q)) => Dims::new(p, q),
            None => self.chart(),
        }
    }

    /// Odd time coordinate of an odd flow; zero when absent.
    pub fn flow_theta(&self) -> Result<Grassmann> {
        match self.flow.as_ref().and_then(|f| f.theta.as_ref()) {
            Some(v) => self.grassmann(v),
            None => Ok(Grassmann::zero(self.n())),
        }
    }
}

/// Monomial coefficients of the polynomial through `(t0 + k·dt, y_k)`.
fn interpolate(t0: f64, dt: f64, ys: &[Grassmann]) -> Result<Vec<Grassmann>> {
    let m = ys.len();
    if m == 0 || m > 10 {
        return Err(cfg(format!("table rows need 1 to 10 samples, got {m}")));
    }
    if !(dt > 0.0) {
        return Err(cfg("table spacing must be positive"));
    }
    let n = ys[0].n_generators();
    let vander = DMatrix::from_fn(m, m, |i, j| (t0 + i as f64 * dt).powi(j as i32));
    let lu = vander.lu();
    let mut coeffs = vec![vec![0.0; 1 << n]; m];
    for c in 0..(1usize << n) {
        let rhs = DVector::from_fn(m, |i, _| ys[i].dense()[c]);
        let sol = lu.solve(&rhs).ok_or_else(|| cfg("table interpolation is singular"))?;
        for (k, v) in sol.iter().enumerate() {
            coeffs[k][c] = *v;
        }
    }
    coeffs.into_iter().map(|c| Grassmann::from_dense(n, c)).collect()
}

/// Built-in configuration: a superconnection on R^2 with `A₀`, `A₁` and `A₂`
/// terms, a quadratic path and an end point with odd time coordinate.
pub const DEFAULT_CONFIG: &str = r#"{
  "schema": 1,
  "dims": {"p": 2, "q": 0, "N": 2, "rank_even": 1, "rank_odd": 1},
  "connection": [
    [{"exponents": [0, 0], "matrix": [[0.3, 0.0], [0.0, -0.2]]},
     {"exponents": [0, 1], "matrix": [[0.1, 0.0], [0.0, 0.4]]}],
    [{"exponents": [1, 0], "matrix": [[-0.25, 0.0], [0.0, 0.15]]}]
  ],
  "forms": [
    {"degree": 0, "components": [{"index": [], "terms": [
      {"exponents": [0, 0], "matrix": [[0.0, 0.6], [0.4, 0.0]]},
      {"exponents": [1, 0], "matrix": [[0.0, 0.2], [-0.1, 0.0]]}]}]},
    {"degree": 1, "components": [{"index": [0], "terms": [
      {"exponents": [0, 0], "matrix": [[0.2, 0.0], [0.0, 0.1]]}]}]},
    {"degree": 2, "components": [{"index": [0, 1], "terms": [
      {"exponents": [0, 0], "matrix": [[0.0, 0.3], [0.5, 0.0]]}]}]}
  ],
  "path": {"kind": "polynomial",
    "x": [[0.1, 1.0, {"": 0.2, "1|2": 0.3}], [-0.2, 0.5, 0.1]],
    "eta": [[{"1": 0.5}, {"2": 0.2}], [{"2": -0.4}]]},
  "window": [-0.5, 2.0],
  "end": {"t": 1.0, "theta": {"1": 1.0}},
  "h": 0.001,
  "flow": {"chart": [1, 1], "parity": "odd",
    "field": [[{"exponents": [0], "odd": [0], "coeff": 1.0}, {"exponents": [2], "odd": [0], "coeff": 0.5}],
              [{"exponents": [0], "coeff": 1.0}]],
    "initial": [0.2, {"2": 0.3}], "t_end": 1.0, "theta": {"1": 1.0}, "steps": 200},
  "sweep": {"lambdas": [0.0, 1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625]}
}"#;

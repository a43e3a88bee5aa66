use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    index_sets, superconnection_coefficient_at, Connection, DifferentialForm, MatrixFunction, Pair, SuperPath,
    Superconnection, Variant,
};
use crate::grassmann::{Dims, GradedMatrix, Grassmann, Parity};
use crate::superfield::SuperPoint;
use crate::transport::map::TransportMap;

/// Anything that transports along a superpath to an end point.
pub trait TransportOracle: Sync {
    fn transport(&self, path: &SuperPath, end: &SuperPoint) -> Result<TransportMap>;
}

impl<F> TransportOracle for F
where
    F: Fn(&SuperPath, &SuperPoint) -> Result<TransportMap> + Sync,
{
    fn transport(&self, path: &SuperPath, end: &SuperPoint) -> Result<TransportMap> {
        self(path, end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoverOptions {
    /// Central-difference step for `a′(0)`.
    pub fd_step: f64,
    /// Relative singular-value threshold below which the probe set counts as
    /// rank deficient.
    pub rank_tol: f64,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        RecoverOptions { fd_step: 1e-4, rank_tol: 1e-10 }
    }
}

/// A straight probe `x(t) = x0 + t·ẋ`, `η(t) = η` through the base point.
#[derive(Debug, Clone)]
pub struct Probe {
    pub eta: Vec<Grassmann>,
    pub xdot: Vec<f64>,
}

impl Probe {
    fn is_real(&self) -> bool {
        self.eta.iter().all(|e| e.is_zero())
    }

    pub fn path(&self, x0: &[f64], n: usize) -> Result<SuperPath> {
        let p = x0.len();
        if self.eta.len() != p || self.xdot.len() != p {
            return Err(Error::Dimension(format!("probe does not match a chart of dimension {p}")));
        }
        SuperPath::line(
            Dims::new(p, 0),
            n,
            (-0.5, 0.5),
            x0.iter().map(|&x| Grassmann::scalar(n, x)).collect(),
            self.xdot.iter().map(|&v| Grassmann::scalar(n, v)).collect(),
            self.eta.clone(),
        )
    }
}

/// `(η = 0, ẋ = e_i)` for every direction, plus one probe with `η^i = θ_i`.
pub fn default_probes(p: usize, n: usize) -> Result<Vec<Probe>> {
    if n < p {
        return Err(Error::Underdetermined(format!("{p} odd directions need at least {p} generators, got {n}")));
    }
    let mut probes: Vec<Probe> = (0..p)
        .map(|i| Probe {
            eta: vec![Grassmann::zero(n); p],
            xdot: (0..p).map(|j| if i == j { 1.0 } else { 0.0 }).collect(),
        })
        .collect();
    probes.push(Probe { eta: (1..=p).map(|i| Grassmann::generator(n, i)).collect(), xdot: vec![0.0; p] });
    Ok(probes)
}

/// Stage 1: `𝔄(0) = C(0) + θ∘𝔇(0)` along `path` from transports near the start.
///
/// `C(0)` is read off the θ-coefficient of the transport to `(0, θ_x)` for an
/// auxiliary generator θ_x. `𝔇(0)` follows from the central difference of
/// the transport to `(±δ, 0)`.
pub fn coefficient_at_start(oracle: &dyn TransportOracle, path: &SuperPath, opts: RecoverOptions) -> Result<Pair> {
    let n = path.n_generators();
    let delta = opts.fd_step;
    let shifted = path.shift_generators()?;
    let probe_end = SuperPoint::new(Grassmann::zero(n + 1), Grassmann::generator(n + 1, 1))?;
    let raw = oracle.transport(&shifted, &probe_end)?.into_matrix();
    let rank = raw.rows();
    let mut c_entries = Vec::with_capacity(rank.total() * rank.total());
    for i in 0..rank.total() {
        let s = rank.parity_of(i).sign();
        for j in 0..rank.total() {
            let (_, e1) = raw.get(i, j).split_generator(1);
            c_entries.push(e1.shift_down().scale(-s));
        }
    }
    let c = GradedMatrix::from_entries(n, rank, rank, c_entries, Parity::Odd)?;

    let fwd = oracle.transport(path, &SuperPoint::real(n, delta))?.into_matrix();
    let bwd = oracle.transport(path, &SuperPoint::real(n, -delta))?.into_matrix();
    let a_dot = fwd.sub(&bwd).scale(0.5 / delta);
    let d = c.epsilon().mul(&c).sub(&a_dot).with_declared(Parity::Even);
    Ok((c, d))
}

/// Real-valued coefficients of a superconnection at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCoefficients {
    pub rank: Dims,
    /// `a_i(x0)` for `i = 0..p`.
    pub a: Vec<Vec<Vec<f64>>>,
    /// `A_I(x0)` keyed by strictly increasing index sets.
    pub forms: BTreeMap<Vec<usize>, Vec<Vec<f64>>>,
}

impl PointCoefficients {
    /// Values of `sc` at the real point `x0`, for the form degrees listed.
    pub fn of(sc: &Superconnection, x0: &[f64], degrees: &[usize]) -> Result<Self> {
        let n = 0;
        let point: Vec<Grassmann> = x0.iter().map(|&x| Grassmann::scalar(n, x)).collect();
        let body = |f: &MatrixFunction| -> Result<Vec<Vec<f64>>> { Ok(f.eval_in(n, &point)?.body()) };
        let a = sc.connection().coeffs().iter().map(body).collect::<Result<Vec<_>>>()?;
        let mut forms = BTreeMap::new();
        for &d in degrees {
            for idx in index_sets(x0.len(), d) {
                forms.insert(idx, vec![vec![0.0; sc.rank().total()]; sc.rank().total()]);
            }
        }
        for form in sc.forms() {
            if !degrees.contains(&form.degree()) {
                return Err(Error::Degree(format!("superconnection has a {}-form outside {degrees:?}", form.degree())));
            }
            for (idx, f) in form.components() {
                let v = body(f)?;
                let slot = forms.get_mut(idx).expect("index set of a listed degree");
                for (row, vrow) in slot.iter_mut().zip(v) {
                    for (x, y) in row.iter_mut().zip(vrow) {
                        *x += y;
                    }
                }
            }
        }
        Ok(PointCoefficients { rank: sc.rank(), a, forms })
    }

    /// Largest entrywise difference; infinite if the shapes differ.
    pub fn max_abs_diff(&self, other: &PointCoefficients) -> f64 {
        if self.rank != other.rank || self.a.len() != other.a.len() || self.forms.len() != other.forms.len() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        let mats = self.a.iter().zip(&other.a).chain(self.forms.values().zip(other.forms.values()));
        for (x, y) in mats {
            for (rx, ry) in x.iter().zip(y) {
                for (a, b) in rx.iter().zip(ry) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        if self.forms.keys().ne(other.forms.keys()) {
            return f64::INFINITY;
        }
        worst
    }
}

/// One real unknown: an entry of `a_i` or of `A_I`.
#[derive(Debug, Clone)]
enum Unknown {
    Conn { i: usize, r: usize, s: usize },
    Form { idx: Vec<usize>, r: usize, s: usize },
}

fn unknowns(p: usize, rank: Dims, degrees: &[usize]) -> Vec<Unknown> {
    let k = rank.total();
    let mut out = Vec::new();
    for i in 0..p {
        for r in 0..k {
            for s in 0..k {
                if rank.parity_of(r) == rank.parity_of(s) {
                    out.push(Unknown::Conn { i, r, s });
                }
            }
        }
    }
    for &d in degrees {
        let end = if d % 2 == 0 { Parity::Odd } else { Parity::Even };
        for idx in index_sets(p, d) {
            for r in 0..k {
                for s in 0..k {
                    if rank.parity_of(r) + rank.parity_of(s) == end {
                        out.push(Unknown::Form { idx: idx.clone(), r, s });
                    }
                }
            }
        }
    }
    out
}

fn unit_superconnection(p: usize, rank: Dims, u: &Unknown) -> Result<Superconnection> {
    let k = rank.total();
    let domain = Dims::new(p, 0);
    let mut data = vec![vec![0.0; k]; k];
    match u {
        Unknown::Conn { i, r, s } => {
            data[*r][*s] = 1.0;
            let mut coeffs = vec![MatrixFunction::zero(domain, rank, rank, Parity::Even); p];
            coeffs[*i] = MatrixFunction::constant(domain, rank, Parity::Even, &data)?;
            Superconnection::new(Connection::new(domain, rank, coeffs)?, Vec::new())
        }
        Unknown::Form { idx, r, s } => {
            data[*r][*s] = 1.0;
            let end = if idx.len() % 2 == 0 { Parity::Odd } else { Parity::Even };
            let f = MatrixFunction::constant(domain, rank, end, &data)?;
            let form = DifferentialForm::new(p, idx.len(), rank, end, vec![(idx.clone(), f)])?;
            Superconnection::new(Connection::trivial(domain, rank), vec![form])
        }
    }
}

fn flatten(m: &GradedMatrix, out: &mut Vec<f64>) {
    for e in m.entries() {
        out.extend_from_slice(e.dense());
    }
}

/// Recovers `a_i(x0)` and the form components `A_I(x0)` of the listed
/// degrees from transports along the probe paths.
///
/// Stage 1 runs [`coefficient_at_start`] on every probe. Stage 2 solves the
/// linear system relating those values to the unknown real matrices in the
/// least-squares sense, rejecting probe sets that do not pin them down.
pub fn recover(
    oracle: &dyn TransportOracle,
    x0: &[f64],
    rank: Dims,
    n: usize,
    degrees: &[usize],
    probes: &[Probe],
    opts: RecoverOptions,
) -> Result<PointCoefficients> {
    let p = x0.len();
    if let Some(&d) = degrees.iter().find(|&&d| d > p) {
        return Err(Error::Degree(format!("{d}-forms on a {p}-dimensional chart")));
    }
    let measured = probes
        .par_iter()
        .map(|probe| -> Result<(Probe, Pair)> {
            let path = probe.path(x0, n)?;
            Ok((probe.clone(), coefficient_at_start(oracle, &path, opts)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let unknowns = unknowns(p, rank, degrees);
    let units = unknowns.iter().map(|u| unit_superconnection(p, rank, u)).collect::<Result<Vec<_>>>()?;
    let mut rhs = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); unknowns.len()];
    for (probe, (c, d)) in &measured {
        let values = probe.path(x0, n)?.values_real(0.0)?;
        flatten(c, &mut rhs);
        if probe.is_real() {
            flatten(d, &mut rhs);
        }
        for (col, sc) in columns.iter_mut().zip(&units) {
            let (uc, ud) = superconnection_coefficient_at(&values, sc, Variant::D)?;
            flatten(&uc, col);
            if probe.is_real() {
                flatten(&ud, col);
            }
        }
    }
    let (m, k) = (rhs.len(), unknowns.len());
    if m < k {
        return Err(Error::Underdetermined(format!("{m} equations for {k} unknowns")));
    }
    let a = DMatrix::from_fn(m, k, |i, j| columns[j][i]);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if k > 0 && !(smin > opts.rank_tol * smax.max(1.0)) {
        return Err(Error::Underdetermined(format!(
            "probe set determines the coefficients only up to rank deficiency (σ_min/σ_max = {:.3e})",
            smin / smax.max(f64::MIN_POSITIVE)
        )));
    }
    let x = if k == 0 {
        DVector::zeros(0)
    } else {
        svd.solve(&DVector::from_vec(rhs), 0.0).map_err(|e| Error::Underdetermined(e.to_string()))?
    };

    let dim = rank.total();
    let mut out = PointCoefficients { rank, a: vec![vec![vec![0.0; dim]; dim]; p], forms: BTreeMap::new() };
    for &d in degrees {
        for idx in index_sets(p, d) {
            out.forms.insert(idx, vec![vec![0.0; dim]; dim]);
        }
    }
    for (u, v) in unknowns.iter().zip(x.iter()) {
        match u {
            Unknown::Conn { i, r, s } => out.a[*i][*r][*s] = *v,
            Unknown::Form { idx, r, s } => out.forms.get_mut(idx).expect("listed index set")[*r][*s] = *v,
        }
    }
    Ok(out)
}

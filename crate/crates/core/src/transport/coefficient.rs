use crate::error::{Error, Result};
use crate::geometry::{
    connection_coeff_at, superconnection_coefficient_at, Connection, Pair, SuperPath, Superconnection, Variant,
};
use crate::grassmann::{Dims, GradedMatrix, Grassmann, Parity};
use crate::superfield::SuperField;

/// `𝔄(t) = C(t) + θ∘𝔇(t)` with odd `C` and even `𝔇`, evaluable at even
/// Grassmann times.
pub trait CoefficientField: Send + Sync {
    fn rank(&self) -> Dims;
    fn n_generators(&self) -> usize;
    /// Real interval of times on which `eval` is defined.
    fn domain(&self) -> (f64, f64);
    fn eval(&self, t: &Grassmann) -> Result<Pair>;
}

impl CoefficientField for SuperField {
    fn rank(&self) -> Dims {
        self.a_nodes()[0].rows()
    }

    fn n_generators(&self) -> usize {
        SuperField::n_generators(self)
    }

    fn domain(&self) -> (f64, f64) {
        (self.t_min(), self.t_max())
    }

    fn eval(&self, t: &Grassmann) -> Result<Pair> {
        if self.parity() != Parity::Odd {
            return Err(Error::Parity("a transport coefficient must be an odd field".into()));
        }
        SuperField::eval(self, t)
    }
}

/// `C(t) = Σ t^k C_k`, `𝔇(t) = Σ t^k 𝔇_k` with Λ_N matrix coefficients.
#[derive(Debug, Clone)]
pub struct PolyField {
    rank: Dims,
    n: usize,
    domain: (f64, f64),
    c: Vec<GradedMatrix>,
    d: Vec<GradedMatrix>,
}

impl PolyField {
    pub fn new(domain: (f64, f64), c: Vec<GradedMatrix>, d: Vec<GradedMatrix>) -> Result<Self> {
        let first = c.first().or(d.first()).ok_or_else(|| Error::Dimension("polynomial field without terms".into()))?;
        let (rank, n) = (first.rows(), first.n_generators());
        let c: Vec<_> = c.into_iter().map(|m| m.with_declared(Parity::Odd)).collect();
        let d: Vec<_> = d.into_iter().map(|m| m.with_declared(Parity::Even)).collect();
        for m in c.iter().chain(&d) {
            if m.rows() != rank || m.cols() != rank || m.n_generators() != n {
                return Err(Error::Dimension("polynomial field terms disagree in shape or N".into()));
            }
            m.check()?;
        }
        Ok(PolyField { rank, n, domain, c, d })
    }

    /// Constant coefficient `𝔄 = C + θ∘𝔇` on all of R.
    pub fn constant(c: GradedMatrix, d: GradedMatrix) -> Result<Self> {
        Self::new((f64::NEG_INFINITY, f64::INFINITY), vec![c], vec![d])
    }

    pub fn c_terms(&self) -> &[GradedMatrix] {
        &self.c
    }

    pub fn d_terms(&self) -> &[GradedMatrix] {
        &self.d
    }
}

fn horner(terms: &[GradedMatrix], t: &Grassmann, rank: Dims, parity: Parity) -> GradedMatrix {
    let mut acc = GradedMatrix::zeros(t.n_generators(), rank, rank, parity);
    for m in terms.iter().rev() {
        acc = acc.scale_left(t).add(m).with_declared(parity);
    }
    acc
}

impl CoefficientField for PolyField {
    fn rank(&self) -> Dims {
        self.rank
    }

    fn n_generators(&self) -> usize {
        self.n
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn eval(&self, t: &Grassmann) -> Result<Pair> {
        Ok((horner(&self.c, t, self.rank, Parity::Odd), horner(&self.d, t, self.rank, Parity::Even)))
    }
}

/// What a path coefficient is built from.
#[derive(Debug, Clone)]
pub enum Source {
    Connection(Connection),
    Superconnection(Superconnection),
}

impl Source {
    pub fn rank(&self) -> Dims {
        match self {
            Source::Connection(c) => c.rank(),
            Source::Superconnection(s) => s.rank(),
        }
    }
}

/// The coefficient of the parallel-section equation along a superpath,
/// evaluated exactly from the path jets at every requested time.
#[derive(Debug, Clone)]
pub struct PathCoefficient {
    path: SuperPath,
    source: Source,
    variant: Variant,
}

impl PathCoefficient {
    pub fn new(path: SuperPath, source: Source, variant: Variant) -> Result<Self> {
        let chart = match &source {
            Source::Connection(c) => c.domain(),
            Source::Superconnection(s) => Dims::new(s.chart_dim(), 0),
        };
        if chart.total() > 0 && path.dims() != chart {
            return Err(Error::Dimension(format!("path into {} for data on {chart}", path.dims())));
        }
        Ok(PathCoefficient { path, source, variant })
    }
}

impl CoefficientField for PathCoefficient {
    fn rank(&self) -> Dims {
        self.source.rank()
    }

    fn n_generators(&self) -> usize {
        self.path.n_generators()
    }

    fn domain(&self) -> (f64, f64) {
        self.path.window()
    }

    fn eval(&self, t: &Grassmann) -> Result<Pair> {
        let v = self.path.values(t)?;
        match &self.source {
            Source::Connection(c) => connection_coeff_at(&v, c, self.variant),
            Source::Superconnection(s) => superconnection_coefficient_at(&v, s, self.variant),
        }
    }
}

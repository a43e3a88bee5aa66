use crate::error::{Error, Result};
use crate::geometry::function::MatrixFunction;
use crate::grassmann::{Dims, Parity};

/// All strictly increasing index sets of length `k` in `0..p`, in lexicographic order.
pub fn index_sets(p: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, p: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..p {
            cur.push(i);
            rec(i + 1, p, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, p, k, &mut Vec::new(), &mut out);
    out
}

/// End-valued k-form `Σ_I ω_I dx^I` on a chart of R^p, stored in the coordinate frame.
#[derive(Debug, Clone)]
pub struct DifferentialForm {
    p: usize,
    degree: usize,
    rank: Dims,
    end_parity: Parity,
    components: Vec<(Vec<usize>, MatrixFunction)>,
}

impl DifferentialForm {
    /// Builds a form from sparse components; missing index sets are zero.
    pub fn new(
        p: usize,
        degree: usize,
        rank: Dims,
        end_parity: Parity,
        sparse: Vec<(Vec<usize>, MatrixFunction)>,
    ) -> Result<Self> {
        if degree > p {
            return Err(Error::Degree(format!("{degree}-form on a {p}-dimensional chart")));
        }
        let domain = Dims::new(p, 0);
        let sets = index_sets(p, degree);
        let mut components: Vec<(Vec<usize>, MatrixFunction)> = sets
            .iter()
            .map(|i| (i.clone(), MatrixFunction::zero(domain, rank, rank, end_parity)))
            .collect();
        for (idx, f) in sparse {
            let slot = sets.iter().position(|s| *s == idx).ok_or_else(|| {
                Error::Degree(format!("{idx:?} is not a strictly increasing index set of length {degree} below {p}"))
            })?;
            if f.domain() != domain || f.rows() != rank || f.cols() != rank {
                return Err(Error::Dimension(format!("component {idx:?} has the wrong shape")));
            }
            if !f.is_zero() && f.parity() != end_parity {
                return Err(Error::Parity(format!("component {idx:?} is not {end_parity:?}")));
            }
            components[slot].1 = components[slot].1.add(&f)?;
        }
        Ok(DifferentialForm { p, degree, rank, end_parity, components })
    }

    /// 0-form `f`.
    pub fn function(f: MatrixFunction) -> Result<Self> {
        let p = f.domain().even;
        Self::new(p, 0, f.rows(), f.parity(), vec![(vec![], f)])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn chart_dim(&self) -> usize {
        self.p
    }

    pub fn rank(&self) -> Dims {
        self.rank
    }

    pub fn end_parity(&self) -> Parity {
        self.end_parity
    }

    /// `(degree + endomorphism parity) mod 2`.
    pub fn total_parity(&self) -> Parity {
        self.end_parity + Parity::from_bits(self.degree as u32)
    }

    pub fn components(&self) -> &[(Vec<usize>, MatrixFunction)] {
        &self.components
    }

    pub fn scale(&self, s: f64) -> DifferentialForm {
        DifferentialForm {
            components: self.components.iter().map(|(i, f)| (i.clone(), f.scale(s))).collect(),
            ..self.clone()
        }
    }
}

/// Connection `d + Σ dx^i a_i` on the trivial bundle of rank `rank` over a chart of R^{p|q}.
#[derive(Debug, Clone)]
pub struct Connection {
    domain: Dims,
    rank: Dims,
    coeffs: Vec<MatrixFunction>,
}

impl Connection {
    pub fn new(domain: Dims, rank: Dims, coeffs: Vec<MatrixFunction>) -> Result<Self> {
        if coeffs.len() != domain.total() {
            return Err(Error::Dimension(format!("{} connection coefficients on {domain}", coeffs.len())));
        }
        for (i, a) in coeffs.iter().enumerate() {
            if a.domain() != domain || a.rows() != rank || a.cols() != rank {
                return Err(Error::Dimension(format!("connection coefficient {} has the wrong shape", i + 1)));
            }
            if !a.is_zero() && a.parity() != domain.parity_of(i) {
                return Err(Error::Parity(format!(
                    "coefficient of dx^{} must be a {:?} endomorphism",
                    i + 1,
                    domain.parity_of(i)
                )));
            }
        }
        Ok(Connection { domain, rank, coeffs })
    }

    pub fn trivial(domain: Dims, rank: Dims) -> Self {
        let coeffs = (0..domain.total()).map(|i| MatrixFunction::zero(domain, rank, rank, domain.parity_of(i))).collect();
        Connection { domain, rank, coeffs }
    }

    pub fn domain(&self) -> Dims {
        self.domain
    }

    pub fn rank(&self) -> Dims {
        self.rank
    }

    pub fn coeffs(&self) -> &[MatrixFunction] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.is_zero())
    }
}

/// Quillen superconnection `∇ + A` over a chart of R^p.
#[derive(Debug, Clone)]
pub struct Superconnection {
    connection: Connection,
    forms: Vec<DifferentialForm>,
}

impl Superconnection {
    pub fn new(connection: Connection, forms: Vec<DifferentialForm>) -> Result<Self> {
        let domain = connection.domain();
        if domain.odd != 0 {
            return Err(Error::Dimension(format!("superconnections live on an ordinary chart, got {domain}")));
        }
        for (k, a) in connection.coeffs().iter().enumerate() {
            let r = a.rows();
            let off_diagonal_zero = (0..r.total()).all(|i| {
                (0..r.total()).all(|j| r.parity_of(i) == r.parity_of(j) || a.cell(i, j).is_zero())
            });
            if !off_diagonal_zero {
                return Err(Error::Parity(format!("∇ must preserve the grading, dx^{} coefficient mixes it", k + 1)));
            }
        }
        for f in &forms {
            if f.chart_dim() != domain.even || f.rank() != connection.rank() {
                return Err(Error::Dimension("form does not match the connection's chart or rank".into()));
            }
            if f.total_parity() != Parity::Odd {
                return Err(Error::Parity(format!(
                    "{}-form with {:?} endomorphisms has even total parity",
                    f.degree(),
                    f.end_parity()
                )));
            }
        }
        Ok(Superconnection { connection, forms })
    }

    pub fn connection(&self) -> &Connection {
        &self.connection
    }

    pub fn forms(&self) -> &[DifferentialForm] {
        &self.forms
    }

    pub fn rank(&self) -> Dims {
        self.connection.rank()
    }

    pub fn chart_dim(&self) -> usize {
        self.connection.domain().even
    }

    /// Same ∇ with `A` replaced by `s·A`.
    pub fn with_scaled_forms(&self, s: f64) -> Superconnection {
        Superconnection { connection: self.connection.clone(), forms: self.forms.iter().map(|f| f.scale(s)).collect() }
    }

    pub fn without_forms(&self) -> Superconnection {
        Superconnection { connection: self.connection.clone(), forms: Vec::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_set_counts() {
        assert_eq!(index_sets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(index_sets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(index_sets(4, 2).len(), 6);
    }

    #[test]
    fn degree_above_dimension() {
        let r = Dims::new(1, 1);
        assert!(matches!(DifferentialForm::new(1, 2, r, Parity::Odd, vec![]), Err(Error::Degree(_))));
    }

    #[test]
    fn even_total_parity_rejected() {
        let dom = Dims::new(1, 0);
        let r = Dims::new(1, 1);
        let f = MatrixFunction::constant(dom, r, Parity::Even, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let form = DifferentialForm::function(f).unwrap();
        let res = Superconnection::new(Connection::trivial(dom, r), vec![form]);
        assert!(matches!(res, Err(Error::Parity(_))));
    }
}

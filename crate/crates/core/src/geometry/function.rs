use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::{
    derivative_of, gr_taylor_eval, reorder_sign, Dims, GradedMatrix, Grassmann, Parity, Polynomial, Product, Scaled,
    SmoothFn,
};

/// Function on R^{p|q}: `Σ_J f_J(x) ζ^J` with `f_J` smooth in the even
/// coordinates and `ζ^J` a sorted monomial in the odd ones.
#[derive(Debug, Clone)]
pub struct SuperFunction {
    dims: Dims,
    terms: Vec<(u32, SmoothFn)>,
}

fn mask_of(dims: Dims, odd: &[usize]) -> Result<(u32, f64)> {
    let mut mask = 0u32;
    let mut sign = 1.0;
    for &j in odd {
        if j >= dims.odd {
            return Err(Error::Dimension(format!("odd coordinate {j} out of range for {dims}")));
        }
        let bit = 1u32 << j;
        if mask & bit != 0 {
            return Ok((0, 0.0));
        }
        sign *= reorder_sign(mask, bit);
        mask |= bit;
    }
    Ok((mask, sign))
}

impl SuperFunction {
    pub fn zero(dims: Dims) -> Self {
        SuperFunction { dims, terms: Vec::new() }
    }

    pub fn constant(dims: Dims, c: f64) -> Self {
        Self::smooth(dims, Arc::new(Polynomial::constant(dims.even, c)))
    }

    /// Purely even function `f(x)`.
    pub fn smooth(dims: Dims, f: SmoothFn) -> Self {
        SuperFunction { dims, terms: vec![(0, f)] }
    }

    /// Coordinate function (0-based over `x^1..x^p, ζ^1..ζ^q`).
    pub fn coordinate(dims: Dims, i: usize) -> Self {
        if i < dims.even {
            Self::smooth(dims, Arc::new(Polynomial::coordinate(dims.even, i)))
        } else {
            SuperFunction {
                dims,
                terms: vec![(1 << (i - dims.even), Arc::new(Polynomial::constant(dims.even, 1.0)))],
            }
        }
    }

    /// Adds `f(x) ζ^{odd[0]} ζ^{odd[1]} ...` (indices 0-based, any order).
    pub fn with_term(mut self, odd: &[usize], f: SmoothFn) -> Result<Self> {
        if f.arity() != self.dims.even {
            return Err(Error::Dimension(format!("term of arity {} on {}", f.arity(), self.dims)));
        }
        let (mask, sign) = mask_of(self.dims, odd)?;
        if sign == 0.0 {
            return Ok(self);
        }
        let f: SmoothFn = if sign < 0.0 { Arc::new(Scaled(-1.0, f)) } else { f };
        self.terms.push((mask, f));
        Ok(self)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn terms(&self) -> &[(u32, SmoothFn)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parity of the odd-monomial content; `None` if mixed, even when empty.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.iter().map(|(m, _)| Parity::from_bits(m.count_ones()));
        match it.next() {
            None => Some(Parity::Even),
            Some(p) => it.all(|q| q == p).then_some(p),
        }
    }

    pub fn has_parity(&self, p: Parity) -> bool {
        self.terms.iter().all(|(m, _)| Parity::from_bits(m.count_ones()) == p)
    }

    pub fn add(&self, other: &SuperFunction) -> SuperFunction {
        assert_eq!(self.dims, other.dims, "super functions on different domains");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SuperFunction { dims: self.dims, terms }
    }

    pub fn scale(&self, s: f64) -> SuperFunction {
        SuperFunction {
            dims: self.dims,
            terms: self.terms.iter().map(|(m, f)| (*m, Arc::new(Scaled(s, f.clone())) as SmoothFn)).collect(),
        }
    }

    pub fn mul(&self, other: &SuperFunction) -> SuperFunction {
        assert_eq!(self.dims, other.dims, "super functions on different domains");
        let mut terms = Vec::new();
        for (ma, fa) in &self.terms {
            for (mb, fb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let prod: SmoothFn = Arc::new(Product(fa.clone(), fb.clone()));
                let s = reorder_sign(*ma, *mb);
                terms.push((ma | mb, if s < 0.0 { Arc::new(Scaled(-1.0, prod)) as SmoothFn } else { prod }));
            }
        }
        SuperFunction { dims: self.dims, terms }
    }

    /// Left partial derivative `∂/∂x^k` (0-based over all coordinates).
    pub fn derivative(&self, k: usize) -> SuperFunction {
        let dims = self.dims;
        assert!(k < dims.total(), "coordinate {k} out of range for {dims}");
        let terms = if k < dims.even {
            self.terms
                .iter()
                .map(|(m, f)| (*m, derivative_of(f, k)))
                .collect()
        } else {
            let bit = 1u32 << (k - dims.even);
            self.terms
                .iter()
                .filter(|(m, _)| m & bit != 0)
                .map(|(m, f)| {
                    let before = (m & (bit - 1)).count_ones();
                    let f = if before % 2 == 1 { Arc::new(Scaled(-1.0, f.clone())) as SmoothFn } else { f.clone() };
                    (m & !bit, f)
                })
                .collect()
        };
        SuperFunction { dims, terms }
    }

    /// Value at a Grassmann point (even coordinates even, odd coordinates odd).
    pub fn eval(&self, point: &[Grassmann]) -> Result<Grassmann> {
        let n = point
            .first()
            .map(|g| g.n_generators())
            .ok_or_else(|| Error::Dimension("empty point on R^{0|0}; use eval_in".into()))?;
        self.eval_in(n, point)
    }

    /// Value at a point with coordinates in Λ_n (needed when there are none).
    pub fn eval_in(&self, n: usize, point: &[Grassmann]) -> Result<Grassmann> {
        let dims = self.dims;
        if point.len() != dims.total() {
            return Err(Error::Dimension(format!("{} coordinates given for {dims}", point.len())));
        }
        for (i, x) in point.iter().enumerate() {
            if x.n_generators() != n {
                return Err(Error::Dimension(format!("coordinate {i} lives in Λ_{}", x.n_generators())));
            }
            if !x.has_parity(dims.parity_of(i)) {
                return Err(Error::Parity(format!("coordinate {i} has the wrong parity")));
            }
        }
        let (even, odd) = point.split_at(dims.even);
        let mut acc = Grassmann::zero(n);
        for (mask, f) in &self.terms {
            let value = if dims.even == 0 {
                Grassmann::scalar(n, f.value(&[])?)
            } else {
                gr_taylor_eval(f.as_ref(), even)?
            };
            let mut mono = Grassmann::one(n);
            let mut rest = *mask;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                mono = &mono * &odd[j];
                rest &= rest - 1;
            }
            acc += &(&value * &mono);
        }
        Ok(acc)
    }
}

/// Matrix of [`SuperFunction`] entries; evaluates to a [`GradedMatrix`].
#[derive(Debug, Clone)]
pub struct MatrixFunction {
    domain: Dims,
    rows: Dims,
    cols: Dims,
    parity: Parity,
    cells: Vec<SuperFunction>,
}

/// One term `x^exponents ζ^odd · matrix` of a polynomial matrix function.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    #[serde(default)]
    pub odd: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
}

impl MatrixFunction {
    pub fn new(domain: Dims, rows: Dims, cols: Dims, parity: Parity, cells: Vec<SuperFunction>) -> Result<Self> {
        if cells.len() != rows.total() * cols.total() {
            return Err(Error::Dimension(format!("{} cells for a {rows} x {cols} matrix", cells.len())));
        }
        for (k, c) in cells.iter().enumerate() {
            if c.dims() != domain {
                return Err(Error::Dimension(format!("cell {k} defined on {} instead of {domain}", c.dims())));
            }
            let (i, j) = (k / cols.total(), k % cols.total());
            if !c.has_parity(parity + rows.parity_of(i) + cols.parity_of(j)) {
                return Err(Error::Parity(format!(
                    "cell ({i}, {j}) breaks the block pattern of a {parity:?} matrix"
                )));
            }
        }
        Ok(MatrixFunction { domain, rows, cols, parity, cells })
    }

    pub fn zero(domain: Dims, rows: Dims, cols: Dims, parity: Parity) -> Self {
        MatrixFunction { domain, rows, cols, parity, cells: vec![SuperFunction::zero(domain); rows.total() * cols.total()] }
    }

    /// Constant real matrix.
    pub fn constant(domain: Dims, rank: Dims, parity: Parity, data: &[Vec<f64>]) -> Result<Self> {
        Self::polynomial(domain, rank, parity, &[PolyTerm { exponents: vec![0; domain.even], odd: vec![], matrix: data.to_vec() }])
    }

    /// `Σ x^e ζ^J M` over the given terms, for square matrices of rank `rank`.
    pub fn polynomial(domain: Dims, rank: Dims, parity: Parity, terms: &[PolyTerm]) -> Result<Self> {
        let r = rank.total();
        let mut merged: Vec<Vec<(Vec<usize>, Vec<(Vec<u32>, f64)>)>> = vec![Vec::new(); r * r];
        for t in terms {
            if t.exponents.len() != domain.even {
                return Err(Error::Dimension(format!("exponents {:?} on {domain}", t.exponents)));
            }
            if t.matrix.len() != r || t.matrix.iter().any(|row| row.len() != r) {
                return Err(Error::Dimension(format!("term matrix is not {r} x {r}")));
            }
            for i in 0..r {
                for j in 0..r {
                    let c = t.matrix[i][j];
                    if c == 0.0 {
                        continue;
                    }
                    let slot = &mut merged[i * r + j];
                    match slot.iter_mut().find(|(odd, _)| *odd == t.odd) {
                        Some((_, mono)) => mono.push((t.exponents.clone(), c)),
                        None => slot.push((t.odd.clone(), vec![(t.exponents.clone(), c)])),
                    }
                }
            }
        }
        let mut cells = Vec::with_capacity(r * r);
        for groups in merged {
            let mut cell = SuperFunction::zero(domain);
            for (odd, mono) in groups {
                cell = cell.with_term(&odd, Arc::new(Polynomial::new(domain.even, mono)?))?;
            }
            cells.push(cell);
        }
        Self::new(domain, rank, rank, parity, cells)
    }

    pub fn domain(&self) -> Dims {
        self.domain
    }

    pub fn rows(&self) -> Dims {
        self.rows
    }

    pub fn cols(&self) -> Dims {
        self.cols
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn cell(&self, i: usize, j: usize) -> &SuperFunction {
        &self.cells[i * self.cols.total() + j]
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &MatrixFunction) -> Result<MatrixFunction> {
        if self.rows != other.rows || self.cols != other.cols || self.domain != other.domain {
            return Err(Error::Dimension("matrix functions of different shapes".into()));
        }
        let cells = self.cells.iter().zip(&other.cells).map(|(a, b)| a.add(b)).collect();
        let parity = if self.is_zero() { other.parity } else { self.parity };
        Self::new(self.domain, self.rows, self.cols, parity, cells)
    }

    pub fn scale(&self, s: f64) -> MatrixFunction {
        MatrixFunction { cells: self.cells.iter().map(|c| c.scale(s)).collect(), ..self.clone() }
    }

    pub fn derivative(&self, k: usize) -> MatrixFunction {
        let parity = self.parity + self.domain.parity_of(k);
        MatrixFunction { cells: self.cells.iter().map(|c| c.derivative(k)).collect(), parity, ..self.clone() }
    }

    pub fn eval(&self, point: &[Grassmann]) -> Result<GradedMatrix> {
        let n = point
            .first()
            .map(|g| g.n_generators())
            .ok_or_else(|| Error::Dimension("empty point on R^{0|0}; use eval_in".into()))?;
        self.eval_in(n, point)
    }

    pub fn eval_in(&self, n: usize, point: &[Grassmann]) -> Result<GradedMatrix> {
        let entries = self.cells.iter().map(|c| c.eval_in(n, point)).collect::<Result<Vec<_>>>()?;
        GradedMatrix::from_entries(n, self.rows, self.cols, entries, self.parity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_derivative_sign() {
        // ∂/∂ζ2 (ζ1 ζ2) = -ζ1
        let d = Dims::new(0, 2);
        let f = SuperFunction::coordinate(d, 0).mul(&SuperFunction::coordinate(d, 1));
        let g = f.derivative(1);
        let pt = [Grassmann::generator(2, 1), Grassmann::generator(2, 2)];
        assert_eq!(g.eval(&pt).unwrap(), -Grassmann::generator(2, 1));
    }

    #[test]
    fn product_evaluates_to_product() {
        let d = Dims::new(1, 2);
        let x = SuperFunction::coordinate(d, 0);
        let z1 = SuperFunction::coordinate(d, 1);
        let z2 = SuperFunction::coordinate(d, 2);
        let f = x.mul(&z2).add(&z1);
        let g = z1.mul(&x).add(&z2);
        let n = 3;
        let pt = [
            Grassmann::from_terms(n, &[(vec![], 0.5), (vec![1, 2], 1.0)]),
            Grassmann::generator(n, 1),
            Grassmann::from_terms(n, &[(vec![2], 1.0), (vec![3], 2.0)]),
        ];
        let lhs = f.mul(&g).eval(&pt).unwrap();
        let rhs = &f.eval(&pt).unwrap() * &g.eval(&pt).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn block_pattern_enforced() {
        let dom = Dims::new(1, 0);
        let rank = Dims::new(1, 1);
        let ok = MatrixFunction::constant(dom, rank, Parity::Even, &[vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert!(ok.is_ok());
        let bad = MatrixFunction::constant(dom, rank, Parity::Even, &[vec![1.0, 1.0], vec![0.0, 2.0]]);
        assert!(matches!(bad, Err(Error::Parity(_))));
    }
}

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::element::{Grassmann, Parity};

/// Graded dimension `p|q`: `p` even basis vectors followed by `q` odd ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub even: usize,
    pub odd: usize,
}

impl Dims {
    pub const fn new(even: usize, odd: usize) -> Self {
        Dims { even, odd }
    }

    pub fn total(self) -> usize {
        self.even + self.odd
    }

    pub fn parity_of(self, i: usize) -> Parity {
        if i < self.even {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.even, self.odd)
    }
}

/// Matrix over Λ_N between graded spaces, in right coordinates.
///
/// A vector is `Σ e_i v^i` with the scalar to the right of the basis vector,
/// so composition of Λ_N-linear maps is plain matrix multiplication. The
/// price is that left multiplication by an odd scalar λ picks up the row
/// signs `(-1)^{p(i)}`; see [`scale_left`](Self::scale_left).
#[derive(Clone, PartialEq)]
pub struct GradedMatrix {
    n: usize,
    rows: Dims,
    cols: Dims,
    entries: Vec<Grassmann>,
    declared: Parity,
}

impl GradedMatrix {
    pub fn zeros(n: usize, rows: Dims, cols: Dims, declared: Parity) -> Self {
        GradedMatrix {
            n,
            rows,
            cols,
            entries: vec![Grassmann::zero(n); rows.total() * cols.total()],
            declared,
        }
    }

    pub fn identity(n: usize, dims: Dims) -> Self {
        let mut m = Self::zeros(n, dims, dims, Parity::Even);
        for i in 0..dims.total() {
            m.entries[i * dims.total() + i] = Grassmann::one(n);
        }
        m
    }

    pub fn from_entries(n: usize, rows: Dims, cols: Dims, entries: Vec<Grassmann>, declared: Parity) -> Result<Self> {
        if entries.len() != rows.total() * cols.total() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows.total(),
                cols.total(),
                rows.total() * cols.total(),
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.n_generators() != n) {
            return Err(Error::Dimension(format!("entry lives in Λ_{}, expected Λ_{n}", e.n_generators())));
        }
        Ok(GradedMatrix { n, rows, cols, entries, declared })
    }

    /// Real matrix (row-major rows) promoted to Λ_N.
    pub fn from_real(n: usize, rows: Dims, cols: Dims, data: &[Vec<f64>], declared: Parity) -> Result<Self> {
        if data.len() != rows.total() || data.iter().any(|r| r.len() != cols.total()) {
            return Err(Error::Dimension(format!("real matrix shape does not match {rows} x {cols}")));
        }
        let entries = data.iter().flat_map(|r| r.iter().map(|&x| Grassmann::scalar(n, x))).collect();
        Self::from_entries(n, rows, cols, entries, declared)
    }

    /// Square endomorphism from a real matrix.
    pub fn endo_from_real(n: usize, dims: Dims, data: &[Vec<f64>], declared: Parity) -> Result<Self> {
        Self::from_real(n, dims, dims, data, declared)
    }

    pub fn n_generators(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Dims {
        self.rows
    }

    pub fn cols(&self) -> Dims {
        self.cols
    }

    pub fn declared_parity(&self) -> Parity {
        self.declared
    }

    pub fn with_declared(mut self, p: Parity) -> Self {
        self.declared = p;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> &Grassmann {
        &self.entries[i * self.cols.total() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Grassmann) {
        assert_eq!(value.n_generators(), self.n);
        let c = self.cols.total();
        self.entries[i * c + j] = value;
    }

    pub fn entries(&self) -> &[Grassmann] {
        &self.entries
    }

    /// Parity an entry must have for the declared parity to hold.
    pub fn expected_entry_parity(&self, i: usize, j: usize) -> Parity {
        self.declared + self.rows.parity_of(i) + self.cols.parity_of(j)
    }

    /// Block check: even-declared matrices have even diagonal blocks and odd
    /// off-diagonal blocks; odd-declared ones the reverse.
    pub fn is_consistent(&self) -> bool {
        (0..self.rows.total()).all(|i| {
            (0..self.cols.total()).all(|j| self.get(i, j).has_parity(self.expected_entry_parity(i, j)))
        })
    }

    /// Same as [`is_consistent`](Self::is_consistent) up to coefficients of size `tol`.
    pub fn is_consistent_within(&self, tol: f64) -> bool {
        (0..self.rows.total()).all(|i| {
            (0..self.cols.total()).all(|j| {
                let e = self.get(i, j);
                let wrong = match self.expected_entry_parity(i, j) {
                    Parity::Even => e.odd_part(),
                    Parity::Odd => e.even_part(),
                };
                wrong.norm_inf() <= tol
            })
        })
    }

    pub fn check(&self) -> Result<()> {
        if self.is_consistent() {
            Ok(())
        } else {
            Err(Error::Parity(format!(
                "matrix declared {:?} violates the block parity pattern",
                self.declared
            )))
        }
    }

    pub fn try_mul(&self, rhs: &GradedMatrix) -> Result<GradedMatrix> {
        if self.n != rhs.n || self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} (Λ_{}) by {}x{} (Λ_{})",
                self.rows, self.cols, self.n, rhs.rows, rhs.cols, rhs.n
            )));
        }
        let (r, k, c) = (self.rows.total(), self.cols.total(), rhs.cols.total());
        let mut entries = vec![Grassmann::zero(self.n); r * c];
        for i in 0..r {
            for l in 0..k {
                let a = &self.entries[i * k + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..c {
                    let b = &rhs.entries[l * c + j];
                    if b.is_zero() {
                        continue;
                    }
                    entries[i * c + j] += &(a * b);
                }
            }
        }
        Ok(GradedMatrix { n: self.n, rows: self.rows, cols: rhs.cols, entries, declared: self.declared + rhs.declared })
    }

    pub fn mul(&self, rhs: &GradedMatrix) -> GradedMatrix {
        self.try_mul(rhs).expect("graded matrix product shape mismatch")
    }

    fn zip_with(&self, rhs: &GradedMatrix, f: impl Fn(&Grassmann, &Grassmann) -> Grassmann) -> GradedMatrix {
        assert!(
            self.n == rhs.n && self.rows == rhs.rows && self.cols == rhs.cols,
            "graded matrix shape mismatch"
        );
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| f(a, b)).collect();
        // a zero summand carries no parity information
        let declared = if self.is_zero() { rhs.declared } else { self.declared };
        GradedMatrix { n: self.n, rows: self.rows, cols: self.cols, entries, declared }
    }

    pub fn add(&self, rhs: &GradedMatrix) -> GradedMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &GradedMatrix) -> GradedMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> GradedMatrix {
        self.map_entries(|e| e.scale(s))
    }

    pub fn neg(&self) -> GradedMatrix {
        self.scale(-1.0)
    }

    pub fn map_entries(&self, f: impl Fn(&Grassmann) -> Grassmann) -> GradedMatrix {
        let entries: Vec<Grassmann> = self.entries.iter().map(f).collect();
        let n = entries.first().map(|e| e.n_generators()).unwrap_or(self.n);
        GradedMatrix { n, rows: self.rows, cols: self.cols, entries, declared: self.declared }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Matrix of the composite `λ ∘ M` (left multiplication by the scalar λ
    /// after applying M). Odd parts of λ pick up the row parity sign.
    pub fn scale_left(&self, lambda: &Grassmann) -> GradedMatrix {
        let even = lambda.even_part();
        let odd = lambda.odd_part();
        let c = self.cols.total();
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..self.rows.total() {
            let sign = self.rows.parity_of(i).sign();
            for j in 0..c {
                let e = &self.entries[i * c + j];
                let mut v = &even * e;
                if !odd.is_zero() {
                    v += &(&odd * e).scale(sign);
                }
                entries.push(v);
            }
        }
        let declared = self.declared + lambda.parity().unwrap_or(Parity::Even);
        GradedMatrix { n: self.n, rows: self.rows, cols: self.cols, entries, declared }
    }

    /// Grading automorphism on operators, `ε(M) = P ε_Λ(M) P` with `P` the
    /// parity operator. Equals `(-1)^{|M|} M` on homogeneous matrices.
    pub fn epsilon(&self) -> GradedMatrix {
        let c = self.cols.total();
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..self.rows.total() {
            for j in 0..c {
                let s = (self.rows.parity_of(i) + self.cols.parity_of(j)).sign();
                entries.push(self.entries[i * c + j].epsilon().scale(s));
            }
        }
        GradedMatrix { n: self.n, rows: self.rows, cols: self.cols, entries, declared: self.declared }
    }

    pub fn body(&self) -> Vec<Vec<f64>> {
        let c = self.cols.total();
        (0..self.rows.total()).map(|i| (0..c).map(|j| self.entries[i * c + j].body()).collect()).collect()
    }

    pub fn max_abs_diff(&self, other: &GradedMatrix) -> f64 {
        assert!(self.rows == other.rows && self.cols == other.cols, "shape mismatch");
        self.entries.iter().zip(&other.entries).fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.norm_inf()))
    }

    /// Induced ∞-norm with the l1 Grassmann norm on entries (submultiplicative).
    pub fn op_norm(&self) -> f64 {
        let c = self.cols.total();
        (0..self.rows.total())
            .map(|i| (0..c).map(|j| self.entries[i * c + j].norm_l1()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn column(&self, j: usize) -> GradedMatrix {
        let entries = (0..self.rows.total()).map(|i| self.get(i, j).clone()).collect();
        let declared = self.declared + self.cols.parity_of(j);
        GradedMatrix { n: self.n, rows: self.rows, cols: Dims::new(1, 0), entries, declared }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let c = self.cols.total();
        let rows: Vec<serde_json::Value> = (0..self.rows.total())
            .map(|i| {
                serde_json::Value::Array(
                    (0..c).map(|j| serde_json::Value::Object(self.get(i, j).to_json_map())).collect(),
                )
            })
            .collect();
        serde_json::json!({
            "N": self.n,
            "rows": self.rows,
            "cols": self.cols,
            "parity": self.declared,
            "entries": rows,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |what: &str| Error::Config(format!("graded matrix JSON: {what}"));
        let n = v.get("N").and_then(|x| x.as_u64()).ok_or_else(|| bad("missing N"))? as usize;
        let rows: Dims = serde_json::from_value(v.get("rows").cloned().ok_or_else(|| bad("missing rows"))?)
            .map_err(|e| bad(&e.to_string()))?;
        let cols: Dims = serde_json::from_value(v.get("cols").cloned().ok_or_else(|| bad("missing cols"))?)
            .map_err(|e| bad(&e.to_string()))?;
        let declared: Parity = serde_json::from_value(v.get("parity").cloned().ok_or_else(|| bad("missing parity"))?)
            .map_err(|e| bad(&e.to_string()))?;
        let rows_v = v.get("entries").and_then(|x| x.as_array()).ok_or_else(|| bad("missing entries"))?;
        let mut entries = Vec::new();
        for r in rows_v {
            for e in r.as_array().ok_or_else(|| bad("row is not an array"))? {
                entries.push(Grassmann::from_json(e, n)?);
            }
        }
        Self::from_entries(n, rows, cols, entries, declared)
    }
}

impl fmt::Debug for GradedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GradedMatrix[{} x {}, {:?}, Λ_{}]", self.rows, self.cols, self.declared, self.n)?;
        let c = self.cols.total();
        for i in 0..self.rows.total() {
            let row: Vec<String> = (0..c).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_times_even_is_consistent() {
        let n = 2;
        let d = Dims::new(1, 1);
        let th1 = Grassmann::generator(n, 1);
        let th2 = Grassmann::generator(n, 2);
        let a = GradedMatrix::from_entries(
            n,
            d,
            d,
            vec![Grassmann::scalar(n, 2.0), th1.clone(), th2.clone(), &Grassmann::one(n) + &(&th1 * &th2)],
            Parity::Even,
        )
        .unwrap();
        assert!(a.is_consistent());
        let b = a.mul(&a);
        assert_eq!(b.declared_parity(), Parity::Even);
        assert!(b.is_consistent());
    }

    #[test]
    fn odd_real_matrix_epsilon_flips_sign() {
        let d = Dims::new(1, 1);
        let a = GradedMatrix::endo_from_real(2, d, &[vec![0.0, 1.0], vec![2.0, 0.0]], Parity::Odd).unwrap();
        assert!(a.is_consistent());
        assert_eq!(a.epsilon(), a.neg());
        let e = GradedMatrix::identity(2, d);
        assert_eq!(e.epsilon(), e);
    }

    #[test]
    fn scale_left_anticommutes_with_odd_operator() {
        // A ∘ θ = -θ ∘ A for odd A, i.e. A·(θ∘I) = -(θ∘A)
        let n = 1;
        let d = Dims::new(1, 1);
        let a = GradedMatrix::endo_from_real(n, d, &[vec![0.0, 1.0], vec![3.0, 0.0]], Parity::Odd).unwrap();
        let th = Grassmann::generator(n, 1);
        let lhs = a.mul(&GradedMatrix::identity(n, d).scale_left(&th));
        let rhs = a.scale_left(&th).neg();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_round_trip() {
        let d = Dims::new(1, 1);
        let a = GradedMatrix::endo_from_real(2, d, &[vec![0.1, 1.0 / 3.0], vec![2.0, 0.0]], Parity::Even)
            .unwrap()
            .scale_left(&Grassmann::generator(2, 2));
        let back = GradedMatrix::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
    }
}

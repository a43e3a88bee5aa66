use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported number of odd generators (4096 real components).
pub const MAX_GENERATORS: usize = 12;

/// The Z/2 grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bits(bits: u32) -> Self {
        if bits % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// `(-1)^p`.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn bit(self) -> u32 {
        self as u32
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bits(self.bit() + rhs.bit())
    }
}

/// Sign picked up when the sorted monomials `a` and `b` are multiplied as
/// `θ_a θ_b` and brought into increasing order.
#[inline]
pub(crate) fn reorder_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        swaps += (a >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// An element of the Grassmann algebra Λ_N on `N` odd generators θ_1..θ_N.
///
/// Coefficients are stored densely, indexed by a bitmask whose bit `i - 1`
/// marks the presence of θ_i. Every monomial is kept in strictly increasing
/// generator order, so the bitmask is a canonical key.
#[derive(Clone, PartialEq)]
pub struct Grassmann {
    n: usize,
    coeffs: Vec<f64>,
}

impl Grassmann {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators are supported, got {n}");
        Grassmann { n, coeffs: vec![0.0; 1 << n] }
    }

    pub fn scalar(n: usize, value: f64) -> Self {
        let mut g = Self::zero(n);
        g.coeffs[0] = value;
        g
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// The generator θ_i, 1-based.
    pub fn generator(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "generator index {i} out of range 1..={n}");
        let mut g = Self::zero(n);
        g.coeffs[1 << (i - 1)] = 1.0;
        g
    }

    /// `c · θ_{i1} θ_{i2} ...` for an arbitrary (not necessarily sorted) index list.
    pub fn monomial(n: usize, indices: &[usize], c: f64) -> Self {
        let mut g = Self::zero(n);
        if let Some((mask, sign)) = canonical_key(n, indices) {
            g.coeffs[mask as usize] = sign * c;
        }
        g
    }

    /// Builds an element from `(index list, coefficient)` pairs, normalising signs.
    pub fn from_terms(n: usize, terms: &[(Vec<usize>, f64)]) -> Self {
        let mut g = Self::zero(n);
        for (idx, c) in terms {
            if let Some((mask, sign)) = canonical_key(n, idx) {
                g.coeffs[mask as usize] += sign * c;
            }
        }
        g
    }

    pub fn from_dense(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n > MAX_GENERATORS || coeffs.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "expected {} coefficients for N = {n}, got {}",
                1usize << n.min(MAX_GENERATORS),
                coeffs.len()
            )));
        }
        Ok(Grassmann { n, coeffs })
    }

    pub fn n_generators(&self) -> usize {
        self.n
    }

    pub fn dense(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u32) -> f64 {
        self.coeffs[mask as usize]
    }

    pub fn set_coeff(&mut self, mask: u32, value: f64) {
        self.coeffs[mask as usize] = value;
    }

    /// Coefficient of the monomial with the given (sorted) 1-based indices.
    pub fn coeff_of(&self, indices: &[usize]) -> f64 {
        match canonical_key(self.n, indices) {
            Some((mask, sign)) => sign * self.coeffs[mask as usize],
            None => 0.0,
        }
    }

    pub fn body(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn soul(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = 0.0;
        s
    }

    pub fn even_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 0)
    }

    pub fn odd_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 1)
    }

    fn filter(&self, keep: impl Fn(u32) -> bool) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| if keep(m as u32) { c } else { 0.0 })
            .collect();
        Grassmann { n: self.n, coeffs }
    }

    /// Parity of a homogeneous element; `None` for mixed elements. Zero is even.
    pub fn parity(&self) -> Option<Parity> {
        let has_even = self.coeffs.iter().enumerate().any(|(m, &c)| c != 0.0 && (m as u32).count_ones() % 2 == 0);
        let has_odd = self.coeffs.iter().enumerate().any(|(m, &c)| c != 0.0 && (m as u32).count_ones() % 2 == 1);
        match (has_even, has_odd) {
            (_, false) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            (true, true) => None,
        }
    }

    /// Whether the element is homogeneous of parity `p` (zero has every parity).
    pub fn has_parity(&self, p: Parity) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(m, &c)| c == 0.0 || Parity::from_bits((m as u32).count_ones()) == p)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Grading automorphism: fixes the even part, negates the odd part.
    pub fn epsilon(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| if (m as u32).count_ones() % 2 == 1 { -c } else { c })
            .collect();
        Grassmann { n: self.n, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Grassmann { n: self.n, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn try_mul(&self, rhs: &Grassmann) -> Result<Grassmann> {
        if self.n != rhs.n {
            return Err(Error::Dimension(format!(
                "cannot multiply elements of Λ_{} and Λ_{}",
                self.n, rhs.n
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Grassmann) -> Grassmann {
        let mut out = vec![0.0; self.coeffs.len()];
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            let a = a as u32;
            for (b, &cb) in rhs.coeffs.iter().enumerate() {
                let b = b as u32;
                if cb == 0.0 || a & b != 0 {
                    continue;
                }
                out[(a | b) as usize] += reorder_sign(a, b) * ca * cb;
            }
        }
        Grassmann { n: self.n, coeffs: out }
    }

    pub fn powi(&self, k: usize) -> Grassmann {
        let mut acc = Grassmann::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Max-abs over all coefficients.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Sum of absolute coefficients; submultiplicative.
    pub fn norm_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Non-zero monomials as (sorted 1-based indices, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(m, &c)| (mask_indices(m as u32), c))
    }

    /// Embeds into Λ_{n} for `n ≥ N`, keeping θ_i ↦ θ_i.
    pub fn extend(&self, n: usize) -> Grassmann {
        assert!(n >= self.n);
        let mut g = Grassmann::zero(n);
        g.coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        g
    }

    /// Projects Λ_N → Λ_n (n ≤ N) by sending θ_i ↦ 0 for i > n.
    pub fn truncate(&self, n: usize) -> Grassmann {
        assert!(n <= self.n);
        Grassmann { n, coeffs: self.coeffs[..1 << n].to_vec() }
    }

    /// Writes `self = a + θ_k b` with `a, b` free of θ_k (θ_k to the left of `b`).
    pub fn split_generator(&self, k: usize) -> (Grassmann, Grassmann) {
        assert!(k >= 1 && k <= self.n);
        let bit = 1u32 << (k - 1);
        let mut a = Grassmann::zero(self.n);
        let mut b = Grassmann::zero(self.n);
        for (m, &c) in self.coeffs.iter().enumerate() {
            let m = m as u32;
            if c == 0.0 {
                continue;
            }
            if m & bit == 0 {
                a.coeffs[m as usize] = c;
            } else {
                let rest = m & !bit;
                // θ_k θ_rest sorted equals reorder_sign(bit, rest) times the canonical monomial
                b.coeffs[rest as usize] = c * reorder_sign(bit, rest);
            }
        }
        (a, b)
    }

    /// Inserts a new generator in front: θ_i ↦ θ_{i+1}, result lives in Λ_{N+1}.
    pub fn shift_up(&self) -> Grassmann {
        let mut g = Grassmann::zero(self.n + 1);
        for (m, &c) in self.coeffs.iter().enumerate() {
            g.coeffs[m << 1] = c;
        }
        g
    }

    /// Inverse of [`shift_up`](Self::shift_up) on elements free of θ_1.
    pub fn shift_down(&self) -> Grassmann {
        let mut g = Grassmann::zero(self.n - 1);
        for (m, &c) in self.coeffs.iter().enumerate() {
            if m & 1 == 0 {
                g.coeffs[m >> 1] = c;
            }
        }
        g
    }

    pub fn max_abs_diff(&self, other: &Grassmann) -> f64 {
        assert_eq!(self.n, other.n);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// JSON map form: `""` keys the body, `"1|3"` keys θ_1θ_3.
    pub fn to_json_map(&self) -> serde_json::Map<String, serde_json::Value> {
        let mut map = serde_json::Map::new();
        for (m, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                map.insert(mask_key(m as u32), serde_json::Value::from(c));
            }
        }
        map
    }

    pub fn from_json(value: &serde_json::Value, n: usize) -> Result<Self> {
        let map = match value {
            serde_json::Value::Object(m) => m,
            serde_json::Value::Number(x) => {
                return Ok(Grassmann::scalar(n, x.as_f64().unwrap_or(f64::NAN)));
            }
            other => return Err(Error::Config(format!("expected a Grassmann object, got {other}"))),
        };
        let mut g = Grassmann::zero(n);
        for (k, v) in map {
            let c = v
                .as_f64()
                .ok_or_else(|| Error::Config(format!("coefficient of \"{k}\" is not a number")))?;
            let idx = parse_key(k)?;
            if idx.iter().any(|&i| i == 0 || i > n) {
                return Err(Error::Config(format!("key \"{k}\" refers to a generator outside 1..={n}")));
            }
            match canonical_key(n, &idx) {
                Some((mask, sign)) => g.coeffs[mask as usize] += sign * c,
                None => return Err(Error::Config(format!("key \"{k}\" repeats a generator"))),
            }
        }
        Ok(g)
    }

    /// Largest generator index referenced by a JSON map (useful to infer N).
    pub fn json_max_index(value: &serde_json::Value) -> usize {
        match value {
            serde_json::Value::Object(m) => m
                .keys()
                .filter_map(|k| parse_key(k).ok())
                .flat_map(|v| v.into_iter())
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }
}

fn mask_indices(m: u32) -> Vec<usize> {
    (0..32).filter(|b| m & (1 << b) != 0).map(|b| b as usize + 1).collect()
}

fn mask_key(m: u32) -> String {
    mask_indices(m).iter().map(|i| i.to_string()).collect::<Vec<_>>().join("|")
}

fn parse_key(k: &str) -> Result<Vec<usize>> {
    if k.is_empty() {
        return Ok(vec![]);
    }
    k.split('|')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("malformed Grassmann key \"{k}\"")))
        })
        .collect()
}

/// Sorts an index list, returning its bitmask and the permutation sign, or
/// `None` when an index repeats (the monomial vanishes).
fn canonical_key(n: usize, indices: &[usize]) -> Option<(u32, f64)> {
    let mut v = indices.to_vec();
    let mut sign = 1.0;
    // bubble sort keeps track of the transposition count
    for i in 0..v.len() {
        for j in 0..v.len().saturating_sub(i + 1) {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    let mut mask = 0u32;
    for &i in &v {
        assert!(i >= 1 && i <= n, "generator index {i} out of range 1..={n}");
        let bit = 1u32 << (i - 1);
        if mask & bit != 0 {
            return None;
        }
        mask |= bit;
    }
    Some((mask, sign))
}

/// Checked product, the library-level entry point for Grassmann multiplication.
pub fn gr_mul(u: &Grassmann, v: &Grassmann) -> Result<Grassmann> {
    u.try_mul(v)
}

pub fn gr_epsilon(u: &Grassmann) -> Grassmann {
    u.epsilon()
}

impl fmt::Debug for Grassmann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ{}", self.n)?;
        f.debug_map().entries(self.terms().map(|(k, c)| (k, c))).finish()
    }
}

impl fmt::Display for Grassmann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if idx.is_empty() {
                write!(f, "{c}")?;
            } else {
                let t: Vec<String> = idx.iter().map(|i| format!("θ{i}")).collect();
                write!(f, "{c}·{}", t.join(""))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for Grassmann {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let nz: Vec<(u32, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(m, &c)| (m as u32, c))
            .collect();
        let mut map = serializer.serialize_map(Some(nz.len()))?;
        for (m, c) in nz {
            map.serialize_entry(&mask_key(m), &c)?;
        }
        map.end()
    }
}

/// Parity-preserving algebra map Λ_{N'} → Λ_N determined by the images of
/// the generators (each image must be odd).
#[derive(Debug, Clone)]
pub struct Substitution {
    images: Vec<Grassmann>,
    target_n: usize,
}

impl Substitution {
    pub fn new(target_n: usize, images: Vec<Grassmann>) -> Result<Self> {
        for (i, g) in images.iter().enumerate() {
            if g.n_generators() != target_n {
                return Err(Error::Dimension(format!("image of θ{} lives in the wrong algebra", i + 1)));
            }
            if !g.has_parity(Parity::Odd) {
                return Err(Error::Parity(format!("image of θ{} must be odd", i + 1)));
            }
        }
        Ok(Substitution { images, target_n })
    }

    pub fn source_n(&self) -> usize {
        self.images.len()
    }

    pub fn target_n(&self) -> usize {
        self.target_n
    }

    pub fn apply(&self, u: &Grassmann) -> Grassmann {
        assert_eq!(u.n_generators(), self.images.len(), "substitution source mismatch");
        let mut out = Grassmann::zero(self.target_n);
        for (m, &c) in u.dense().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut term = Grassmann::scalar(self.target_n, c);
            for i in mask_indices(m as u32) {
                term = &term * &self.images[i - 1];
            }
            out += &term;
        }
        out
    }
}

impl<'a> Mul<&'a Grassmann> for &'a Grassmann {
    type Output = Grassmann;
    fn mul(self, rhs: &'a Grassmann) -> Grassmann {
        assert_eq!(self.n, rhs.n, "Grassmann generator count mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Mul<f64> for &Grassmann {
    type Output = Grassmann;
    fn mul(self, rhs: f64) -> Grassmann {
        self.scale(rhs)
    }
}

impl<'a> Add<&'a Grassmann> for &'a Grassmann {
    type Output = Grassmann;
    fn add(self, rhs: &'a Grassmann) -> Grassmann {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Grassmann> for &'a Grassmann {
    type Output = Grassmann;
    fn sub(self, rhs: &'a Grassmann) -> Grassmann {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&Grassmann> for Grassmann {
    fn add_assign(&mut self, rhs: &Grassmann) {
        assert_eq!(self.n, rhs.n, "Grassmann generator count mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&Grassmann> for Grassmann {
    fn sub_assign(&mut self, rhs: &Grassmann) {
        assert_eq!(self.n, rhs.n, "Grassmann generator count mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Neg for &Grassmann {
    type Output = Grassmann;
    fn neg(self) -> Grassmann {
        self.scale(-1.0)
    }
}

impl Neg for Grassmann {
    type Output = Grassmann;
    fn neg(self) -> Grassmann {
        self.scale(-1.0)
    }
}

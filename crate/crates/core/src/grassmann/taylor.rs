//! Smooth real functions with derivative oracles and their Grassmann-analytic
//! extension.
//!
//! A [`TaylorFunction`] supplies every mixed partial at a real point. That is
//! all that is needed to evaluate it on even Grassmann arguments: with
//! `x = body + soul` the Taylor series in the soul terminates by nilpotency.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::element::{Grassmann, Parity};

pub trait TaylorFunction: Send + Sync + Debug {
    fn arity(&self) -> usize;

    /// `∂^alpha f (x)`; `alpha.len() == arity()`.
    fn partial(&self, x: &[f64], alpha: &[usize]) -> Result<f64>;

    /// Highest total derivative order the oracle can supply, `None` if unbounded.
    fn max_order(&self) -> Option<usize> {
        None
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.partial(x, &vec![0; self.arity()])
    }

    /// Direct evaluation on validated even Grassmann arguments, when the
    /// function knows a cheaper route than the Taylor expansion.
    fn gr_eval(&self, _x: &[Grassmann]) -> Option<Result<Grassmann>> {
        None
    }

    /// `∂_{x_var} f` in closed form, when available.
    fn derivative_fn(&self, _var: usize) -> Option<SmoothFn> {
        None
    }
}

/// `∂_{x_var} f`, closed form if the function offers one.
pub fn derivative_of(f: &SmoothFn, var: usize) -> SmoothFn {
    f.derivative_fn(var).unwrap_or_else(|| Arc::new(Partial { inner: f.clone(), var }))
}

pub type SmoothFn = Arc<dyn TaylorFunction>;

/// Multivariate polynomial with real coefficients; derivatives are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    arity: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl Polynomial {
    pub fn new(arity: usize, terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        if let Some((e, _)) = terms.iter().find(|(e, _)| e.len() != arity) {
            return Err(Error::Dimension(format!(
                "exponent vector {e:?} does not match arity {arity}"
            )));
        }
        Ok(Polynomial { arity, terms })
    }

    pub fn constant(arity: usize, c: f64) -> Self {
        Polynomial { arity, terms: vec![(vec![0; arity], c)] }
    }

    /// The coordinate function `x_i` (0-based).
    pub fn coordinate(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        Polynomial { arity, terms: vec![(e, 1.0)] }
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(coeffs: &[f64]) -> Self {
        Polynomial {
            arity: 1,
            terms: coeffs.iter().enumerate().map(|(k, &c)| (vec![k as u32], c)).collect(),
        }
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }
}

impl TaylorFunction for Polynomial {
    fn arity(&self) -> usize {
        self.arity
    }

    fn partial(&self, x: &[f64], alpha: &[usize]) -> Result<f64> {
        check_point(self.arity, x, alpha)?;
        let mut total = 0.0;
        'terms: for (e, c) in &self.terms {
            let mut v = *c;
            for i in 0..self.arity {
                let (ei, ai) = (e[i] as usize, alpha[i]);
                if ai > ei {
                    continue 'terms;
                }
                for k in 0..ai {
                    v *= (ei - k) as f64;
                }
                v *= x[i].powi((ei - ai) as i32);
            }
            total += v;
        }
        Ok(total)
    }

    fn gr_eval(&self, x: &[Grassmann]) -> Option<Result<Grassmann>> {
        let n = x[0].n_generators();
        let mut powers: Vec<Vec<Grassmann>> = x.iter().map(|_| vec![Grassmann::one(n)]).collect();
        let mut acc = Grassmann::zero(n);
        for (e, c) in &self.terms {
            let mut mono = Grassmann::scalar(n, *c);
            for (i, &ei) in e.iter().enumerate() {
                while powers[i].len() <= ei as usize {
                    let next = powers[i].last().unwrap() * &x[i];
                    powers[i].push(next);
                }
                if ei > 0 {
                    mono = &mono * &powers[i][ei as usize];
                }
            }
            acc += &mono;
        }
        Some(Ok(acc))
    }

    fn derivative_fn(&self, var: usize) -> Option<SmoothFn> {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] > 0)
            .map(|(e, c)| {
                let mut d = e.clone();
                d[var] -= 1;
                (d, c * e[var] as f64)
            })
            .collect();
        Some(Arc::new(Polynomial { arity: self.arity, terms }))
    }
}

/// Elementary univariate functions `amplitude · g(rate · t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Sin { amplitude: f64, rate: f64, phase: f64 },
    Cos { amplitude: f64, rate: f64, phase: f64 },
    Exp { amplitude: f64, rate: f64 },
}

impl TaylorFunction for Elementary {
    fn arity(&self) -> usize {
        1
    }

    fn partial(&self, x: &[f64], alpha: &[usize]) -> Result<f64> {
        check_point(1, x, alpha)?;
        let k = alpha[0] as i32;
        let t = x[0];
        Ok(match *self {
            Elementary::Sin { amplitude, rate, phase } => {
                amplitude * rate.powi(k) * (rate * t + phase + k as f64 * std::f64::consts::FRAC_PI_2).sin()
            }
            Elementary::Cos { amplitude, rate, phase } => {
                amplitude * rate.powi(k) * (rate * t + phase + k as f64 * std::f64::consts::FRAC_PI_2).cos()
            }
            Elementary::Exp { amplitude, rate } => amplitude * rate.powi(k) * (rate * t).exp(),
        })
    }
}

/// Sum of functions of equal arity.
#[derive(Debug, Clone)]
pub struct Sum(pub Vec<SmoothFn>);

impl TaylorFunction for Sum {
    fn arity(&self) -> usize {
        self.0.first().map(|f| f.arity()).unwrap_or(0)
    }

    fn partial(&self, x: &[f64], alpha: &[usize]) -> Result<f64> {
        self.0.iter().map(|f| f.partial(x, alpha)).sum()
    }

    fn max_order(&self) -> Option<usize> {
        self.0.iter().filter_map(|f| f.max_order()).min()
    }
}

/// Pointwise product, differentiated by the multivariate Leibniz rule.
#[derive(Debug, Clone)]
pub struct Product(pub SmoothFn, pub SmoothFn);

impl TaylorFunction for Product {
    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn partial(&self, x: &[f64], alpha: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for beta in sub_multi_indices(alpha) {
            let rest: Vec<usize> = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
            let binom: f64 = alpha.iter().zip(&beta).map(|(&a, &b)| binomial(a, b)).product();
            total += binom * self.0.partial(x, &beta)? * self.1.partial(x, &rest)?;
        }
        Ok(total)
    }

    fn gr_eval(&self, x: &[Grassmann]) -> Option<Result<Grassmann>> {
        let a = self.0.gr_eval(x)?;
        let b = self.1.gr_eval(x)?;
        Some(a.and_then(|a| b.map(|b| &a * &b)))
    }

    fn max_order(&self) -> Option<usize> {
        match (self.0.max_order(), self.1.max_order()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// `∂_{x_j} f` as a function in its own right.
#[derive(Debug, Clone)]
pub struct Partial {
    pub inner: SmoothFn,
    pub var: usize,
}

impl TaylorFunction for Partial {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn partial(&self, x: &[f64], alpha: &[usize]) -> Result<f64> {
        let mut a = alpha.to_vec();
        a[self.var] += 1;
        self.inner.partial(x, &a)
    }

    fn max_order(&self) -> Option<usize> {
        self.inner.max_order().map(|k| k.saturating_sub(1))
    }
}

/// `scale · f`.
#[derive(Debug, Clone)]
pub struct Scaled(pub f64, pub SmoothFn);

impl TaylorFunction for Scaled {
    fn arity(&self) -> usize {
        self.1.arity()
    }

    fn partial(&self, x: &[f64], alpha: &[usize]) -> Result<f64> {
        Ok(self.0 * self.1.partial(x, alpha)?)
    }

    fn gr_eval(&self, x: &[Grassmann]) -> Option<Result<Grassmann>> {
        self.1.gr_eval(x).map(|r| r.map(|g| g.scale(self.0)))
    }

    fn derivative_fn(&self, var: usize) -> Option<SmoothFn> {
        self.1.derivative_fn(var).map(|d| Arc::new(Scaled(self.0, d)) as SmoothFn)
    }

    fn max_order(&self) -> Option<usize> {
        self.1.max_order()
    }
}

/// Wraps a function and caps the derivative orders it will report.
#[derive(Debug, Clone)]
pub struct Truncated {
    pub inner: SmoothFn,
    pub order: usize,
}

impl TaylorFunction for Truncated {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn partial(&self, x: &[f64], alpha: &[usize]) -> Result<f64> {
        let k: usize = alpha.iter().sum();
        if k > self.order {
            return Err(Error::Capability(format!("derivative of order {k} requested, oracle supplies {}", self.order)));
        }
        self.inner.partial(x, alpha)
    }

    fn max_order(&self) -> Option<usize> {
        Some(self.order)
    }
}

fn check_point(arity: usize, x: &[f64], alpha: &[usize]) -> Result<()> {
    if x.len() != arity || alpha.len() != arity {
        return Err(Error::Dimension(format!(
            "function of {arity} variables evaluated with {} coordinates / {} orders",
            x.len(),
            alpha.len()
        )));
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

fn sub_multi_indices(alpha: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &a in alpha {
        let mut next = Vec::with_capacity(out.len() * (a + 1));
        for prefix in &out {
            for b in 0..=a {
                let mut v = prefix.clone();
                v.push(b);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Grassmann-analytic extension `f(body + soul) = Σ ∂^α f(body) soul^α / α!`.
///
/// Every argument must be even so that the souls commute. The sum is exact:
/// only multi-indices with a non-vanishing soul monomial are visited.
pub fn gr_taylor_eval(f: &dyn TaylorFunction, x: &[Grassmann]) -> Result<Grassmann> {
    if x.len() != f.arity() {
        return Err(Error::Dimension(format!("function of {} variables given {} arguments", f.arity(), x.len())));
    }
    let n = match x.first() {
        Some(g) => g.n_generators(),
        None => return Err(Error::Dimension("zero-argument function needs an explicit algebra".into())),
    };
    for (i, xi) in x.iter().enumerate() {
        if xi.n_generators() != n {
            return Err(Error::Dimension(format!("argument {i} lives in Λ_{}, expected Λ_{n}", xi.n_generators())));
        }
        if !xi.has_parity(Parity::Even) {
            return Err(Error::Parity(format!("argument {i} of a smooth function must be even")));
        }
    }
    if let Some(direct) = f.gr_eval(x) {
        return direct;
    }
    let body: Vec<f64> = x.iter().map(|g| g.body()).collect();
    // soul powers, truncated at the first vanishing one
    let powers: Vec<Vec<Grassmann>> = x
        .iter()
        .map(|g| {
            let s = g.soul();
            let mut p = vec![Grassmann::one(n)];
            loop {
                let next = p.last().unwrap() * &s;
                if next.is_zero() {
                    break;
                }
                p.push(next);
            }
            p
        })
        .collect();

    let mut acc = Grassmann::zero(n);
    let mut alpha = vec![0usize; x.len()];
    let mut needed = 0usize;
    visit(f, &body, &powers, 0, &mut alpha, Grassmann::one(n), 1.0, &mut acc, &mut needed)?;
    if let Some(m) = f.max_order() {
        if m < needed {
            return Err(Error::Capability(format!(
                "evaluation needs derivatives up to order {needed}, oracle supplies {m}"
            )));
        }
    }
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn visit(
    f: &dyn TaylorFunction,
    body: &[f64],
    powers: &[Vec<Grassmann>],
    var: usize,
    alpha: &mut Vec<usize>,
    prod: Grassmann,
    factorial: f64,
    acc: &mut Grassmann,
    needed: &mut usize,
) -> Result<()> {
    if var == powers.len() {
        let order: usize = alpha.iter().sum();
        if let Some(m) = f.max_order() {
            if order > m {
                *needed = (*needed).max(order);
                return Ok(());
            }
        }
        *needed = (*needed).max(order);
        let d = f.partial(body, alpha)?;
        if d != 0.0 {
            *acc += &prod.scale(d / factorial);
        }
        return Ok(());
    }
    for (k, pk) in powers[var].iter().enumerate() {
        let next = if k == 0 { prod.clone() } else { &prod * pk };
        if k > 0 && next.is_zero() {
            break;
        }
        alpha[var] = k;
        let fact = factorial * (1..=k).map(|i| i as f64).product::<f64>();
        visit(f, body, powers, var + 1, alpha, next, fact, acc, needed)?;
    }
    alpha[var] = 0;
    Ok(())
}

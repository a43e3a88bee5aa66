use crate::error::{Error, Result};
use crate::geometry::forms::{Connection, DifferentialForm, Superconnection};
use crate::geometry::function::{MatrixFunction, SuperFunction};
use crate::geometry::path::{PathValues, SuperPath};
use crate::grassmann::{Dims, GradedMatrix, Grassmann, Parity, MAX_GENERATORS};
use crate::superfield::SuperField;

/// Operator pair `(X, Y)` standing for `X + θ∘Y`.
pub type Pair = (GradedMatrix, GradedMatrix);

/// Which derivation the coefficient is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    D,
    Q,
}

/// Coordinates `x^i + θη^i` of `c^♯`, in Λ_{N+1} with θ = θ_1.
fn lifted_point(v: &PathValues) -> Result<Vec<Grassmann>> {
    let n = v.n;
    if n + 1 > MAX_GENERATORS {
        return Err(Error::Dimension(format!("Λ_{n} leaves no room for the θ generator")));
    }
    let th = Grassmann::generator(n + 1, 1);
    Ok(v.x.iter().zip(&v.eta).map(|(x, e)| &x.shift_up() + &(&th * &e.shift_up())).collect())
}

/// Splits a raw Λ_{N+1} matrix `E0 + θ E1` (entrywise, θ = θ_1) into the
/// operator pair `(E0, P·E1)`.
fn split_theta(raw: &GradedMatrix, n: usize) -> Result<Pair> {
    let (rows, cols) = (raw.rows(), raw.cols());
    let mut e0 = Vec::with_capacity(rows.total() * cols.total());
    let mut e1 = Vec::with_capacity(rows.total() * cols.total());
    for i in 0..rows.total() {
        let s = rows.parity_of(i).sign();
        for j in 0..cols.total() {
            let (a, b) = raw.get(i, j).split_generator(1);
            e0.push(a.shift_down());
            e1.push(b.shift_down().scale(s));
        }
    }
    let p = raw.declared_parity();
    Ok((
        GradedMatrix::from_entries(n, rows, cols, e0, p)?,
        GradedMatrix::from_entries(n, rows, cols, e1, p + Parity::Odd)?,
    ))
}

/// `c^♯f` for a matrix function, as the pair `(f(x), ∂-correction)`.
pub fn pull_matrix(f: &MatrixFunction, v: &PathValues) -> Result<Pair> {
    let raw = f.eval_in(v.n + 1, &lifted_point(v)?)?;
    split_theta(&raw, v.n)
}

/// `c^♯f` for a scalar super function, as `(a, b)` with `c^♯f = a + θb`.
pub fn pull_function(f: &SuperFunction, v: &PathValues) -> Result<(Grassmann, Grassmann)> {
    let raw = f.eval_in(v.n + 1, &lifted_point(v)?)?;
    let (a, b) = raw.split_generator(1);
    Ok((a.shift_down(), b.shift_down()))
}

fn check_path(v: &PathValues, domain: Dims) -> Result<usize> {
    if v.x.len() != domain.total() {
        return Err(Error::Dimension(format!("path with {} coordinates on a chart of {domain}", v.x.len())));
    }
    Ok(v.n)
}

/// `(c*a)(D)` or `(c*a)(Q)` at one time: `Σ_i D(c^♯x^i) ∘ c^♯(a_i)` with
/// `D(c^♯x^i) = η^i + θẋ^i` (and `η^i − θẋ^i` for Q).
pub fn connection_coeff_at(v: &PathValues, conn: &Connection, variant: Variant) -> Result<Pair> {
    let rank = conn.rank();
    let n = check_path(v, conn.domain())?;
    let mut c = GradedMatrix::zeros(n, rank, rank, Parity::Odd);
    let mut d = GradedMatrix::zeros(n, rank, rank, Parity::Even);
    let sign = match variant {
        Variant::D => 1.0,
        Variant::Q => -1.0,
    };
    for (i, a) in conn.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let (m0, m1) = pull_matrix(a, v)?;
        let s0 = &v.eta[i];
        let s1 = v.xdot[i].scale(sign);
        c = c.add(&m0.scale_left(s0));
        d = d.add(&m1.scale_left(&s0.epsilon())).add(&m0.scale_left(&s1));
    }
    Ok((c.with_declared(Parity::Odd), d.with_declared(Parity::Even)))
}

/// `c̃^♯ω = ĉ^♯ω + θ∘ĉ^♯(dω)` at one time, with `ĉ^♯` sending
/// `f ↦ f(x(t))` and `dx^i ↦ η^i(t)`.
pub fn lift_pullback_at(v: &PathValues, form: &DifferentialForm) -> Result<Pair> {
    let p = form.chart_dim();
    if v.x.len() != p {
        return Err(Error::Dimension(format!("path with {} coordinates for a form on R^{p}", v.x.len())));
    }
    let n = v.n;
    let rank = form.rank();
    let par = form.total_parity();
    let mut a = GradedMatrix::zeros(n, rank, rank, par);
    let mut b = GradedMatrix::zeros(n, rank, rank, par + Parity::Odd);
    for (idx, f) in form.components() {
        if f.is_zero() {
            continue;
        }
        let mut eta_i = Grassmann::one(n);
        for &i in idx {
            eta_i = &eta_i * &v.eta[i];
        }
        a = a.add(&f.eval_in(n, &v.x)?.scale_left(&eta_i));
        for j in 0..p {
            let ej = &v.eta[j] * &eta_i;
            if ej.is_zero() {
                continue;
            }
            b = b.add(&f.derivative(j).eval_in(n, &v.x)?.scale_left(&ej));
        }
    }
    Ok((a.with_declared(par), b.with_declared(par + Parity::Odd)))
}

/// Coefficient `𝔄` of the parallel-section equation `∂ψ + 𝔄ψ = 0`.
///
/// For D this is `(c*a)(D) − c̃^♯A`; for Q the connection term is taken on Q
/// and the lifted forms enter with a plus sign.
pub fn superconnection_coefficient_at(v: &PathValues, sc: &Superconnection, variant: Variant) -> Result<Pair> {
    let (mut c, mut d) = connection_coeff_at(v, sc.connection(), variant)?;
    let sign = match variant {
        Variant::D => -1.0,
        Variant::Q => 1.0,
    };
    for form in sc.forms() {
        let (x, y) = lift_pullback_at(v, form)?;
        c = c.add(&x.scale(sign));
        d = d.add(&y.scale(sign));
    }
    Ok((c.with_declared(Parity::Odd), d.with_declared(Parity::Even)))
}

fn sample_field(c: &SuperPath, nodes: usize, parity: Parity, f: impl Fn(&PathValues) -> Result<Pair>) -> Result<SuperField> {
    let (t0, t1) = c.window();
    SuperField::sample(t0, t1, nodes, parity, |t| f(&c.values_real(t)?))
}

/// `(c*a)(D)` sampled on `nodes` points of the path window.
pub fn connection_coeff_d(c: &SuperPath, conn: &Connection, nodes: usize) -> Result<SuperField> {
    sample_field(c, nodes, Parity::Odd, |v| connection_coeff_at(v, conn, Variant::D))
}

/// `c̃^♯ω` sampled on `nodes` points of the path window.
pub fn lift_pullback(c: &SuperPath, form: &DifferentialForm, nodes: usize) -> Result<SuperField> {
    sample_field(c, nodes, form.total_parity(), |v| lift_pullback_at(v, form))
}

/// `𝔄 = (c*a)(D) − c̃^♯A` sampled on `nodes` points of the path window.
pub fn superconnection_coefficient(c: &SuperPath, sc: &Superconnection, nodes: usize) -> Result<SuperField> {
    sample_field(c, nodes, Parity::Odd, |v| superconnection_coefficient_at(v, sc, Variant::D))
}

/// Largest deviation between the lift of a 0-form and its direct pullback
/// `f(x + θη)`, over the given functions and sample times.
pub fn chart_claim_check(c: &SuperPath, functions: &[MatrixFunction], times: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for f in functions {
        let form = DifferentialForm::function(f.clone())?;
        for &t in times {
            let v = c.values_real(t)?;
            let (la, lb) = lift_pullback_at(&v, &form)?;
            let (da, db) = pull_matrix(f, &v)?;
            worst = worst.max(la.max_abs_diff(&da)).max(lb.max_abs_diff(&db));
        }
    }
    Ok(worst)
}

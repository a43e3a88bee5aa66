//! Identity suite run by the `verify` subcommand: each check computes both
//! sides of an identity and reports the residual against a tolerance.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::flows::{flow_odd, odd_flow_residual, SuperVectorField};
use crate::geometry::{chart_claim_check, glued_endpoint, DifferentialForm, MatrixFunction, SuperFunction, Variant};
use crate::grassmann::{mat_exp, Dims, GradedMatrix, Grassmann, Parity, Polynomial, SmoothFn};
use crate::superfield::{dd_identity_check, group_inv, group_mul, SuperField, SuperPoint};
use crate::transport::{
    glue, ps, pulled_back_end, reparametrize, rescale, rescaled_end, reverse, solve_d, sp_connection, transport,
    PolyField, Source, TransportMap,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Seed of the random instance, when the check draws one.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

impl Report {
    /// Plain-text table of residuals and tolerances.
    pub fn tolerance_table(&self) -> String {
        let mut out = format!("{:<48} {:>12} {:>10}  result  seed\n", "check", "residual", "tolerance");
        for c in &self.checks {
            out += &format!(
                "{:<48} {:>12.3e} {:>10.0e}  {:<6}  {}\n",
                c.name,
                c.residual,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" },
                c.seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into())
            );
        }
        out
    }
}

fn record(name: &str, residual: f64, tolerance: f64, seed: Option<u64>) -> CheckResult {
    CheckResult { name: name.into(), residual, tolerance, pass: residual <= tolerance, seed }
}

fn random_soul(r: &mut ChaCha8Rng, n: usize, parity: Parity) -> Grassmann {
    let coeffs = (0..1usize << n)
        .map(|m| if m != 0 && (m.count_ones() % 2 == 1) == parity.is_odd() { r.gen_range(-1.0..1.0) } else { 0.0 })
        .collect();
    Grassmann::from_dense(n, coeffs).expect("length 2^n")
}

fn random_point(r: &mut ChaCha8Rng, n: usize) -> SuperPoint {
    let t = &Grassmann::scalar(n, r.gen_range(-1.0..1.0)) + &random_soul(r, n, Parity::Even);
    SuperPoint::new(t, random_soul(r, n, Parity::Odd)).expect("valid parities")
}

fn random_odd_endo(r: &mut ChaCha8Rng, n: usize, rank: Dims) -> GradedMatrix {
    let k = rank.total();
    let data: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if rank.parity_of(i) != rank.parity_of(j) { r.gen_range(-1.0..1.0) } else { 0.0 }).collect())
        .collect();
    GradedMatrix::endo_from_real(n, rank, &data, Parity::Odd).expect("block pattern respected")
}

/// `e^{−tA² + θA}`.
fn point_exp(a: &GradedMatrix, p: &SuperPoint) -> Result<GradedMatrix> {
    let a2 = a.mul(a);
    mat_exp(&a2.scale_left(p.t()).neg().add(&a.scale_left(p.theta())).with_declared(Parity::Even))
}

fn derivation_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = 2;
    let rank = Dims::new(1, 1);
    let coeffs: Vec<(GradedMatrix, GradedMatrix)> = (0..4)
        .map(|_| {
            let a = random_odd_endo(&mut r, n, rank);
            let b = random_odd_endo(&mut r, n, rank).scale_left(&random_soul(&mut r, n, Parity::Odd));
            (a, b.with_declared(Parity::Even))
        })
        .collect();
    let field = SuperField::sample(0.0, 1.0, 41, Parity::Odd, |t| {
        let mut a = GradedMatrix::zeros(n, rank, rank, Parity::Odd);
        let mut b = GradedMatrix::zeros(n, rank, rank, Parity::Even);
        for (k, (ca, cb)) in coeffs.iter().enumerate() {
            a = a.add(&ca.scale(t.powi(k as i32)));
            b = b.add(&cb.scale(t.powi(k as i32)));
        }
        Ok((a.with_declared(Parity::Odd), b.with_declared(Parity::Even)))
    })?;
    let (d, q) = dd_identity_check(&field)?;
    Ok(vec![
        record("derivation D∘D = ∂t (cubic field)", d, 1e-8, Some(seed)),
        record("derivation Q∘Q = −∂t (cubic field)", q, 1e-8, Some(seed)),
    ])
}

fn group_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = 4;
    let (mut assoc, mut inv) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let (p, q, s) = (random_point(&mut r, n), random_point(&mut r, n), random_point(&mut r, n));
        let lhs = group_mul(&group_mul(&p, &q)?, &s)?;
        let rhs = group_mul(&p, &group_mul(&q, &s)?)?;
        assoc = assoc.max(lhs.max_abs_diff(&rhs));
        inv = inv.max(group_mul(&p, &group_inv(&p))?.max_abs_diff(&SuperPoint::origin(n)));
    }
    Ok(vec![
        record("group law associativity on R^{1|1}", assoc, 1e-13, Some(seed)),
        record("group inverse on R^{1|1}", inv, 1e-13, Some(seed)),
    ])
}

fn flow_checks(cfg: &Config, seed: u64) -> Result<Vec<CheckResult>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = 3;
    let d = Dims::new(1, 1);
    let dfield = SuperVectorField::new(d, Parity::Odd, vec![SuperFunction::coordinate(d, 1), SuperFunction::constant(d, 1.0)])?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (start, end) = (random_point(&mut r, n), random_point(&mut r, n));
        let a = flow_odd(&dfield, &[start.t().clone(), start.theta().clone()], &end, 8)?;
        let m = group_mul(&end, &start)?;
        worst = worst.max(a[0].max_abs_diff(m.t())).max(a[1].max_abs_diff(m.theta()));
    }
    let mut out = vec![record("odd flow of the D-analog field is the group law", worst, 1e-12, Some(seed))];
    if let Some(f) = &cfg.flow {
        if f.parity == Parity::Odd {
            let x = cfg.flow_field()?;
            let res = odd_flow_residual(&x, &cfg.flow_initial()?, f.t_end, f.steps.max(200))?;
            out.push(record("odd flow vs flow of X² (configured field)", res, 1e-7, None));
        }
    }
    Ok(out)
}

fn point_case_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = 2;
    let rank = Dims::new(1, 1);
    let (mut hom, mut closed) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let a = random_odd_endo(&mut r, n, rank);
        let (p, q) = (random_point(&mut r, n), random_point(&mut r, n));
        let lhs = point_exp(&a, &p)?.mul(&point_exp(&a, &q)?);
        hom = hom.max(lhs.max_abs_diff(&point_exp(&a, &group_mul(&p, &q)?)?));
        let field = PolyField::constant(a.neg(), GradedMatrix::zeros(n, rank, rank, Parity::Even))?;
        let end = SuperPoint::with_generator(n, 1.0, 1);
        let psi = solve_d(&field, &GradedMatrix::identity(n, rank), &end, Variant::D, Default::default())?;
        closed = closed.max(psi.max_abs_diff(&point_exp(&a, &end)?));
    }
    Ok(vec![
        record("e^{−tA²+θA} is a supergroup homomorphism", hom, 1e-12, Some(seed)),
        record("point-case transport vs e^{−tA²+θA}", closed, 1e-8, Some(seed)),
    ])
}

/// The part of the configured data for which `PS` along the reversed path
/// inverts `SP`: forms of odd degree change sign under `(u, η) ↦ (−u, −η)`,
/// and an end point with odd time partner leaves only the 0-forms natural.
fn inversion_source(cfg: &Config, end: &SuperPoint) -> Result<Source> {
    match cfg.source()? {
        Source::Superconnection(sc) => {
            let keep = |f: &&DifferentialForm| if end.theta().is_zero() { f.degree() % 2 == 0 } else { f.degree() == 0 };
            let forms: Vec<DifferentialForm> = sc.forms().iter().filter(keep).cloned().collect();
            Ok(Source::Superconnection(crate::geometry::Superconnection::new(sc.connection().clone(), forms)?))
        }
        s => Ok(s),
    }
}

fn transport_checks(cfg: &Config) -> Result<Vec<CheckResult>> {
    let c = cfg.superpath()?;
    let end = cfg.end_point()?;
    let opts = cfg.solver();
    let source = cfg.source()?;
    let n = cfg.n();
    let tb = end.body();
    let mut out = Vec::new();

    let joint = SuperPoint::real(n, 0.4 * tb);
    let next = c.right_translate(&joint)?;
    let next_end = SuperPoint::new(end.t() - joint.t(), end.theta().clone())?;
    let glued = glue(&c, &next, &joint)?;
    let whole = transport(&glued, &source, &glued_endpoint(&joint, &next_end)?, Variant::D, opts)?;
    let parts = transport(&next, &source, &next_end, Variant::D, opts)?
        .compose(&transport(&c, &source, &joint, Variant::D, opts)?)?;
    out.push(record("gluing: SP(c′·c) = SP(c′)∘SP(c)", whole.distance(&parts), 1e-7, None));

    let inv_source = inversion_source(cfg, &end)?;
    let fwd = transport(&c, &inv_source, &end, Variant::D, opts)?;
    let back = ps(&reverse(&c, &end)?, &inv_source, &end, opts)?;
    out.push(record("inverse: PS(c̄)∘SP(c) = I (natural forms)", back.compose(&fwd)?.distance_to_identity(), 1e-7, None));

    let conn = cfg.connection()?;
    let base = sp_connection(&c, &conn, &end, opts)?;
    let (_, w1) = c.window();
    let r: SmoothFn = Arc::new(Polynomial::univariate(&[0.0, 2.0, 1.0]));
    let u1 = -1.0 + (1.0 + w1).sqrt();
    let cr = reparametrize(&c, r.clone(), u1)?;
    let moved = sp_connection(&cr, &conn, &pulled_back_end(&r, u1, &end)?, opts)?;
    out.push(record("reparametrization r(t) = t² + 2t", moved.distance(&base), 1e-7, None));
    let lambda = 0.5;
    let scaled = sp_connection(&rescale(&c, lambda)?, &conn, &rescaled_end(&end, lambda)?, opts)?;
    out.push(record("rescaling φ_λ, λ = 1/2", scaled.distance(&base), 1e-7, None));

    if cfg.dims.q == 0 {
        let mut funcs: Vec<MatrixFunction> = conn.coeffs().to_vec();
        if let Source::Superconnection(sc) = &source {
            funcs.extend(sc.forms().iter().filter(|f| f.degree() == 0).map(|f| f.components()[0].1.clone()));
        }
        let times: Vec<f64> = (0..5).map(|k| tb * k as f64 / 4.0).collect();
        out.push(record("lift of 0-forms equals direct pullback", chart_claim_check(&c, &funcs, &times)?, 1e-12, None));
    }

    let text = serde_json::to_string(&whole.to_json()).map_err(|e| Error::Config(e.to_string()))?;
    let back = TransportMap::from_json(&serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?)?;
    out.push(record("TransportMap JSON round trip (bit-exact)", if back == whole { 0.0 } else { 1.0 }, 0.0, None));
    Ok(out)
}

/// Runs the suite on the configured data plus seeded random instances.
pub fn run(cfg: &Config, seed: u64) -> Result<Report> {
    let seeds: Vec<u64> = {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        (0..4).map(|_| r.gen()).collect()
    };
    let mut checks = Vec::new();
    checks.extend(derivation_checks(seeds[0])?);
    checks.extend(group_checks(seeds[1])?);
    checks.extend(flow_checks(cfg, seeds[2])?);
    checks.extend(point_case_checks(seeds[3])?);
    checks.extend(transport_checks(cfg)?);
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(Report { seed, checks, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DEFAULT_CONFIG;

    #[test]
    fn default_suite_passes() {
        let cfg = Config::from_str(DEFAULT_CONFIG).unwrap();
        let report = run(&cfg, 7).unwrap();
        println!("{}", report.tolerance_table());
        assert!(report.checks.len() >= 10);
        assert!(report.all_pass);
    }
}

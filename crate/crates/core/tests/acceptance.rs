//! Acceptance suite: one line per criterion with the worst residual, the
//! pinned tolerance and the seed of the random instances.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use supertransport::flows::{flow_even, flow_odd, flow_odd_trajectory, odd_flow_residual, SuperVectorField};
use supertransport::geometry::{glued_endpoint, SuperFunction, Superconnection, Variant};
use supertransport::grassmann::{mat_exp, Dims, GradedMatrix, Grassmann, Parity, Polynomial, SmoothFn};
use supertransport::superfield::{dd_identity_check, group_mul, SuperField, SuperPoint};
use supertransport::transport::{
    adiabatic_sweep, default_probes, glue, ps, pulled_back_end, recover, reparametrize, rescale, rescaled_end,
    reverse, solve_d, sp, sp_connection, PointCoefficients, PolyField, RecoverOptions, SolverOptions, Source,
};

const OPTS: SolverOptions = SolverOptions { h: 1e-3 };

struct Outcome {
    residual: f64,
    pass: bool,
    detail: String,
}

fn within(residual: f64, tol: f64) -> Outcome {
    Outcome { residual, pass: residual <= tol, detail: format!("max residual {residual:.3e} <= {tol:.0e}") }
}

/// Operator of the given parity with Grassmann entries of matching parity.
fn random_op(r: &mut ChaCha8Rng, n: usize, rank: Dims, parity: Parity, s: f64) -> GradedMatrix {
    let k = rank.total();
    let mut m = GradedMatrix::zeros(n, rank, rank, parity);
    for i in 0..k {
        for j in 0..k {
            let e = if (rank.parity_of(i) + rank.parity_of(j) + parity).is_odd() {
                random_soul(r, n, Parity::Odd, s)
            } else {
                random_even(r, n, s, s)
            };
            m.set(i, j, e);
        }
    }
    m
}

fn point_exp(a: &GradedMatrix, t: &Grassmann, theta: &Grassmann) -> GradedMatrix {
    let expo = a.mul(a).scale_left(t).neg().add(&a.scale_left(theta));
    mat_exp(&expo.with_declared(Parity::Even)).unwrap()
}

fn random_point(r: &mut ChaCha8Rng, n: usize) -> SuperPoint {
    let t = random_even(r, n, 1.0, 1.0);
    SuperPoint::new(t, random_soul(r, n, Parity::Odd, 1.0)).unwrap()
}

// ---------------------------------------------------------------- C1, C11

fn criterion1_instances(seed: u64) -> Vec<GradedMatrix> {
    let mut r = rng(seed);
    (0..10)
        .map(|k| {
            let rank = if k % 2 == 0 { Dims::new(1, 1) } else { Dims::new(2, 2) };
            random_odd_matrix(&mut r, 2, rank, 1.0)
        })
        .collect()
}

fn point_case_error(a: &GradedMatrix, h: f64) -> f64 {
    let n = a.n_generators();
    let rank = a.rows();
    let field = PolyField::constant(a.neg(), GradedMatrix::zeros(n, rank, rank, Parity::Even)).unwrap();
    let end = SuperPoint::with_generator(n, 1.0, 1);
    let psi = solve_d(&field, &GradedMatrix::identity(n, rank), &end, Variant::D, SolverOptions { h }).unwrap();
    psi.max_abs_diff(&point_exp(a, end.t(), end.theta()))
}

fn c1(seed: u64) -> Outcome {
    let worst = criterion1_instances(seed).iter().map(|a| point_case_error(a, 1e-3)).fold(0.0, f64::max);
    within(worst, 1e-8)
}

/// Errors below this are dominated by rounding and give no order information.
const ROUNDOFF_FLOOR: f64 = 1e-13;

fn c11(seed: u64) -> Outcome {
    let steps = [0.5, 0.25, 0.125, 0.0625, 0.03125];
    let mut ratios = Vec::new();
    let mut unresolved = 0;
    for a in criterion1_instances(seed) {
        let e: Vec<f64> = steps.iter().map(|&h| point_case_error(&a, h)).collect();
        let usable: Vec<f64> = e.windows(2).filter(|w| w[1] >= ROUNDOFF_FLOOR).map(|w| w[0] / w[1]).collect();
        if usable.is_empty() {
            unresolved += 1;
        }
        ratios.extend(usable);
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let pass = unresolved == 0 && ratios.iter().all(|q| (q - 16.0).abs() <= 3.0);
    Outcome {
        residual: (lo - 16.0).abs().max((hi - 16.0).abs()),
        pass,
        detail: format!("{} ratios in [{lo:.2}, {hi:.2}], need 16 ± 3", ratios.len()),
    }
}

// ---------------------------------------------------------------- C2

fn c2(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let n = 4;
    let mut worst = 0.0f64;
    for k in 0..10 {
        let rank = if k % 2 == 0 { Dims::new(1, 1) } else { Dims::new(2, 2) };
        let a = random_odd_matrix(&mut r, n, rank, 0.7);
        let (p, q) = (random_point(&mut r, n), random_point(&mut r, n));
        let lhs = point_exp(&a, p.t(), p.theta()).mul(&point_exp(&a, q.t(), q.theta()));
        let t = &(p.t() + q.t()) + &(p.theta() * q.theta());
        let theta = p.theta() + q.theta();
        worst = worst.max(lhs.max_abs_diff(&point_exp(&a, &t, &theta)));
    }
    within(worst, 1e-12)
}

// ---------------------------------------------------------------- C3

/// `Σ_j c_j t^j` and its derivative for matrix coefficients.
fn poly_at(coeffs: &[GradedMatrix], t: f64) -> (GradedMatrix, GradedMatrix) {
    let mut v = coeffs[0].scale(0.0);
    let mut dv = v.clone();
    for (j, c) in coeffs.iter().enumerate() {
        v = v.add(&c.scale(t.powi(j as i32)));
        if j > 0 {
            dv = dv.add(&c.scale(j as f64 * t.powi(j as i32 - 1)));
        }
    }
    (v, dv)
}

fn c3(seed: u64) -> Outcome {
    use supertransport::superfield::Derivation;
    let mut r = rng(seed);
    let (mut identity, mut exact) = (0.0f64, 0.0f64);
    for k in 0..20 {
        let n = 2 + k % 2;
        let rank = if k % 3 == 0 { Dims::new(2, 1) } else { Dims::new(1, 1) };
        let parity = if k % 2 == 0 { Parity::Odd } else { Parity::Even };
        let degree = 1 + k % 4;
        let a: Vec<GradedMatrix> = (0..=degree).map(|_| random_op(&mut r, n, rank, parity, 1.0)).collect();
        let b: Vec<GradedMatrix> = (0..=degree).map(|_| random_op(&mut r, n, rank, parity + Parity::Odd, 1.0)).collect();
        let field = SuperField::sample(-0.5, 1.5, 41, parity, |t| {
            Ok((poly_at(&a, t).0.with_declared(parity), poly_at(&b, t).0.with_declared(parity + Parity::Odd)))
        })
        .unwrap();
        let (d, q) = dd_identity_check(&field).unwrap();
        identity = identity.max(d).max(q);

        let df = field.apply_derivation(Derivation::D).unwrap();
        let ddf = df.apply_derivation(Derivation::D).unwrap();
        let qf = field.apply_derivation(Derivation::Q).unwrap();
        let qqf = qf.apply_derivation(Derivation::Q).unwrap();
        for t in [-0.37, 0.013, 0.61, 1.27] {
            let ((_, da), (bb, db)) = (poly_at(&a, t), poly_at(&b, t));
            let (d0, d1) = df.eval_real(t).unwrap();
            let (dd0, dd1) = ddf.eval_real(t).unwrap();
            let (q0, q1) = qf.eval_real(t).unwrap();
            let (qq0, qq1) = qqf.eval_real(t).unwrap();
            exact = exact
                .max(d0.max_abs_diff(&bb))
                .max(d1.max_abs_diff(&da))
                .max(q0.max_abs_diff(&bb))
                .max(q1.max_abs_diff(&da.neg()))
                .max(dd0.max_abs_diff(&da))
                .max(dd1.max_abs_diff(&db))
                .max(qq0.max_abs_diff(&da.neg()))
                .max(qq1.max_abs_diff(&db.neg()));
        }
    }
    Outcome {
        residual: identity.max(exact),
        pass: identity <= 1e-8 && exact <= 1e-8,
        detail: format!("grid identities {identity:.3e}, off-grid vs exact derivatives {exact:.3e}, both <= 1e-8"),
    }
}

// ---------------------------------------------------------------- C4

fn poly(r: &mut ChaCha8Rng, s: f64) -> SmoothFn {
    let c: Vec<f64> = (0..3).map(|_| r.gen_range(-s..s)).collect();
    Arc::new(Polynomial::univariate(&c))
}

fn random_odd_field(r: &mut ChaCha8Rng) -> SuperVectorField {
    let d = Dims::new(1, 2);
    let ax = SuperFunction::zero(d).with_term(&[0], poly(r, 0.8)).unwrap().with_term(&[1], poly(r, 0.8)).unwrap();
    let az = |r: &mut ChaCha8Rng| SuperFunction::smooth(d, poly(r, 0.8)).with_term(&[0, 1], poly(r, 0.8)).unwrap();
    let (a1, a2) = (az(r), az(r));
    SuperVectorField::new(d, Parity::Odd, vec![ax, a1, a2]).unwrap()
}

fn c4(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let n = 3;
    let d = Dims::new(1, 1);
    let dfield = SuperVectorField::new(d, Parity::Odd, vec![SuperFunction::coordinate(d, 1), SuperFunction::constant(d, 1.0)])
        .unwrap();
    let mut group = 0.0f64;
    for _ in 0..10 {
        let (start, end) = (random_point(&mut r, n), random_point(&mut r, n));
        let a = flow_odd(&dfield, &[start.t().clone(), start.theta().clone()], &end, 16).unwrap();
        let m = group_mul(&end, &start).unwrap();
        group = group.max(a[0].max_abs_diff(m.t())).max(a[1].max_abs_diff(m.theta()));
    }
    let mut traj = 0.0f64;
    for _ in 0..5 {
        let x = random_odd_field(&mut r);
        let x2 = SuperVectorField::new(x.dims(), Parity::Even, x.coeffs().iter().map(|a| x.apply(a)).collect()).unwrap();
        let init = vec![random_even(&mut r, n, 0.3, 0.3), random_soul(&mut r, n, Parity::Odd, 0.5), random_soul(&mut r, n, Parity::Odd, 0.5)];
        let (t_end, steps) = (0.5, 400);
        let alpha0 = flow_odd_trajectory(&x, &init, &Grassmann::zero(n), t_end, steps).unwrap();
        let g = flow_even(&x2, &init, t_end, steps).unwrap();
        for (p, q) in alpha0.points.iter().zip(&g.points) {
            for (u, v) in p.iter().zip(q) {
                traj = traj.max(u.max_abs_diff(v));
            }
        }
        traj = traj.max(odd_flow_residual(&x, &init, t_end, steps).unwrap());
    }
    Outcome {
        residual: group.max(traj),
        pass: group <= 1e-12 && traj <= 1e-7,
        detail: format!("group law {group:.3e} <= 1e-12, α₀ vs flow of X² {traj:.3e} <= 1e-7"),
    }
}

// ---------------------------------------------------------------- C5 oracle

/// Grassmann elements as plain `2^N` coefficient vectors.
mod real {
    pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if i & j != 0 || y == 0.0 {
                    continue;
                }
                let mut swaps = 0;
                for bit in 0..usize::BITS {
                    if j >> bit & 1 == 1 {
                        swaps += (i >> (bit + 1)).count_ones();
                    }
                }
                out[i | j] += if swaps % 2 == 0 { x * y } else { -x * y };
            }
        }
        out
    }

    pub fn axpy(y: &[f64], s: f64, x: &[f64]) -> Vec<f64> {
        y.iter().zip(x).map(|(a, b)| a + s * b).collect()
    }

    pub fn grade_flip(a: &[f64]) -> Vec<f64> {
        a.iter().enumerate().map(|(m, &c)| if m.count_ones() % 2 == 1 { -c } else { c }).collect()
    }

    /// Square operator matrix of Grassmann entries, row-major.
    pub type Op = Vec<Vec<f64>>;

    pub fn op_mul(a: &[Vec<f64>], b: &[Vec<f64>], k: usize, cols: usize) -> Op {
        let len = a[0].len();
        let mut out = vec![vec![0.0; len]; k * cols];
        for i in 0..k {
            for j in 0..cols {
                for l in 0..k {
                    let p = mul(&a[i * k + l], &b[l * cols + j]);
                    for (o, v) in out[i * cols + j].iter_mut().zip(p) {
                        *o += v;
                    }
                }
            }
        }
        out
    }

    pub fn horner(coeffs: &[f64], x: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; x.len()];
        for &c in coeffs.iter().rev() {
            acc = mul(&acc, x);
            acc[0] += c;
        }
        acc
    }
}

fn to_real(m: &GradedMatrix) -> real::Op {
    m.entries().iter().map(|e| e.dense().to_vec()).collect()
}

fn oracle_solve(c: &[GradedMatrix], d: &[GradedMatrix], theta: &Grassmann, t_end: f64, steps: usize) -> real::Op {
    let rank = c[0].rows();
    let k = rank.total();
    let sign = |i: usize, j: usize| rank.parity_of(i).sign() * rank.parity_of(j).sign();
    let (cr, dr): (Vec<_>, Vec<_>) = (c.iter().map(to_real).collect(), d.iter().map(to_real).collect());
    let at = |terms: &[real::Op], t: f64| -> real::Op {
        let mut acc = vec![vec![0.0; terms[0][0].len()]; k * k];
        for (p, m) in terms.iter().enumerate() {
            for (a, e) in acc.iter_mut().zip(m) {
                *a = real::axpy(a, t.powi(p as i32), e);
            }
        }
        acc
    };
    let generator = |t: f64| -> real::Op {
        let cm = at(&cr, t);
        let eps: real::Op = (0..k * k).map(|ij| real::grade_flip(&cm[ij]).iter().map(|v| v * sign(ij / k, ij % k)).collect()).collect();
        let cc = real::op_mul(&eps, &cm, k, k);
        let dm = at(&dr, t);
        cc.iter().zip(&dm).map(|(x, y)| real::axpy(x, -1.0, y)).collect()
    };
    let add = |a: &real::Op, s: f64, b: &real::Op| -> real::Op { a.iter().zip(b).map(|(x, y)| real::axpy(x, s, y)).collect() };
    let len = cr[0][0].len();
    let mut a: real::Op = (0..k * k).map(|ij| { let mut v = vec![0.0; len]; if ij / k == ij % k { v[0] = 1.0; } v }).collect();
    let h = t_end / steps as f64;
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = real::op_mul(&generator(t), &a, k, k);
        let gm = generator(t + h / 2.0);
        let k2 = real::op_mul(&gm, &add(&a, h / 2.0, &k1), k, k);
        let k3 = real::op_mul(&gm, &add(&a, h / 2.0, &k2), k, k);
        let k4 = real::op_mul(&generator(t + h), &add(&a, h, &k3), k, k);
        let incr = add(&add(&add(&k1, 2.0, &k2), 2.0, &k3), 1.0, &k4);
        a = add(&a, h / 6.0, &incr);
    }
    let cm = at(&cr, t_end);
    let b = real::op_mul(&cm, &a, k, k);
    let th = theta.dense();
    (0..k * k)
        .map(|ij| {
            let tb = real::mul(th, &b[ij]);
            real::axpy(&a[ij], -rank.parity_of(ij / k).sign(), &tb)
        })
        .collect()
}

fn op_diff(m: &GradedMatrix, o: &real::Op) -> f64 {
    m.entries().iter().zip(o).flat_map(|(e, v)| e.dense().iter().zip(v).map(|(x, y)| (x - y).abs())).fold(0.0, f64::max)
}

struct EvenField {
    f: Vec<f64>,
    h: Vec<f64>,
    g: [[Vec<f64>; 2]; 2],
}

impl EvenField {
    fn random(r: &mut ChaCha8Rng) -> Self {
        let mut p = || (0..3).map(|_| r.gen_range(-0.5..0.5)).collect::<Vec<f64>>();
        EvenField { f: p(), h: p(), g: [[p(), p()], [p(), p()]] }
    }

    fn library(&self) -> SuperVectorField {
        let d = Dims::new(1, 2);
        let u = |c: &Vec<f64>| -> SmoothFn { Arc::new(Polynomial::univariate(c)) };
        let ax = SuperFunction::smooth(d, u(&self.f)).with_term(&[0, 1], u(&self.h)).unwrap();
        let az = |row: &[Vec<f64>; 2]| {
            SuperFunction::zero(d).with_term(&[0], u(&row[0])).unwrap().with_term(&[1], u(&row[1])).unwrap()
        };
        SuperVectorField::new(d, Parity::Even, vec![ax, az(&self.g[0]), az(&self.g[1])]).unwrap()
    }

    fn rhs(&self, y: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let (x, z0, z1) = (&y[0], &y[1], &y[2]);
        let hx = real::horner(&self.h, x);
        let ax = real::axpy(&real::horner(&self.f, x), 1.0, &real::mul(&real::mul(&hx, z0), z1));
        let az = |row: &[Vec<f64>; 2]| real::axpy(&real::mul(&real::horner(&row[0], x), z0), 1.0, &real::mul(&real::horner(&row[1], x), z1));
        vec![ax, az(&self.g[0]), az(&self.g[1])]
    }

    fn oracle_flow(&self, init: &[Vec<f64>], t_end: f64, steps: usize) -> Vec<Vec<f64>> {
        let h = t_end / steps as f64;
        let add = |a: &[Vec<f64>], s: f64, b: &[Vec<f64>]| -> Vec<Vec<f64>> { a.iter().zip(b).map(|(x, y)| real::axpy(x, s, y)).collect() };
        let mut y = init.to_vec();
        for _ in 0..steps {
            let k1 = self.rhs(&y);
            let k2 = self.rhs(&add(&y, h / 2.0, &k1));
            let k3 = self.rhs(&add(&y, h / 2.0, &k2));
            let k4 = self.rhs(&add(&y, h, &k3));
            let incr = add(&add(&add(&k1, 2.0, &k2), 2.0, &k3), 1.0, &k4);
            y = add(&y, h / 6.0, &incr);
        }
        y
    }
}

fn c5(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let mut solve = 0.0f64;
    let ranks = [Dims::new(1, 1), Dims::new(2, 1), Dims::new(1, 2), Dims::new(2, 2), Dims::new(1, 1)];
    for (k, &rank) in ranks.iter().enumerate() {
        let n = 1 + k % 3;
        let c: Vec<_> = (0..2).map(|_| random_op(&mut r, n, rank, Parity::Odd, 0.6)).collect();
        let d: Vec<_> = (0..2).map(|_| random_op(&mut r, n, rank, Parity::Even, 0.6)).collect();
        let field = PolyField::new((-1.0, 2.0), c.clone(), d.clone()).unwrap();
        let end = random_odd_endpoint(&mut r, n, 0.9, 1.0);
        let psi = solve_d(&field, &GradedMatrix::identity(n, rank), &end, Variant::D, OPTS).unwrap();
        solve = solve.max(op_diff(&psi, &oracle_solve(&c, &d, end.theta(), 0.9, 3600)));
    }
    let mut flow = 0.0f64;
    for k in 0..5 {
        let n = 1 + k % 3;
        let ef = EvenField::random(&mut r);
        let init = vec![random_even(&mut r, n, 0.5, 0.5), random_soul(&mut r, n, Parity::Odd, 0.5), random_soul(&mut r, n, Parity::Odd, 0.5)];
        let lib = flow_even(&ef.library(), &init, 0.8, 400).unwrap();
        let dense: Vec<Vec<f64>> = init.iter().map(|g| g.dense().to_vec()).collect();
        let want = ef.oracle_flow(&dense, 0.8, 1600);
        for (g, w) in lib.last().iter().zip(&want) {
            flow = flow.max(g.dense().iter().zip(w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    Outcome {
        residual: solve.max(flow),
        pass: solve <= 1e-9 && flow <= 1e-9,
        detail: format!("solve_D {solve:.3e}, flow_even {flow:.3e}, both <= 1e-9"),
    }
}

// ---------------------------------------------------------------- C6, C7

fn c6(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let n = 2;
    let mut worst = 0.0f64;
    for k in 0..10 {
        let rank = if k % 2 == 0 { Dims::new(1, 1) } else { Dims::new(2, 1) };
        let sc = random_superconnection(&mut r, 2, rank, &[0, 1, 2], 0.5);
        let c = random_path(&mut r, 2, n, (-0.3, 1.5), 0.3);
        let joint = SuperPoint::real(n, r.gen_range(0.2..0.7));
        let next = c.right_translate(&joint).unwrap();
        let glued = glue(&c, &next, &joint).unwrap();
        let t_next = r.gen_range(0.2..0.6);
        let next_end = random_odd_endpoint(&mut r, n, t_next, 0.5);
        let whole = sp(&glued, &sc, &glued_endpoint(&joint, &next_end).unwrap(), OPTS).unwrap();
        let parts = sp(&next, &sc, &next_end, OPTS).unwrap().compose(&sp(&c, &sc, &joint, OPTS).unwrap()).unwrap();
        worst = worst.max(whole.distance(&parts));
    }
    within(worst, 1e-7)
}

fn c7(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let n = 3;
    let mut worst = 0.0f64;
    for k in 0..10 {
        let rank = if k % 4 < 2 { Dims::new(1, 1) } else { Dims::new(2, 1) };
        let (degrees, end): (&[usize], SuperPoint) = if k % 2 == 0 {
            (&[0], random_odd_endpoint(&mut r, n, 0.7, 0.5))
        } else {
            (&[0, 2], SuperPoint::real(n, 0.7))
        };
        let sc: Superconnection = random_superconnection(&mut r, 2, rank, degrees, 0.5);
        let c = random_path(&mut r, 2, n, (-0.3, 1.5), 0.3);
        let fwd = sp(&c, &sc, &end, OPTS).unwrap();
        let back = ps(&reverse(&c, &end).unwrap(), &Source::Superconnection(sc), &end, OPTS).unwrap();
        worst = worst.max(back.compose(&fwd).unwrap().distance_to_identity());
    }
    within(worst, 1e-7)
}

// ---------------------------------------------------------------- C8

fn c8(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let n = 3;
    let rank = Dims::new(1, 1);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let conn = random_connection(&mut r, 2, rank, 0.5);
        let c = random_path(&mut r, 2, n, (-0.3, 1.5), 0.3);
        let end = random_odd_endpoint(&mut r, n, 0.8, 0.5);
        let base = sp_connection(&c, &conn, &end, OPTS).unwrap();

        let coeffs = [0.0, r.gen_range(0.5..2.0), r.gen_range(0.0..1.0), r.gen_range(0.0..0.5)];
        let rf: SmoothFn = Arc::new(Polynomial::univariate(&coeffs));
        let value = |u: f64| coeffs[1] * u + coeffs[2] * u * u + coeffs[3] * u * u * u;
        let (mut lo, mut hi) = (0.0, 2.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if value(mid) < 1.4 { lo = mid } else { hi = mid }
        }
        let cr = reparametrize(&c, rf.clone(), lo).unwrap();
        let er = pulled_back_end(&rf, lo, &end).unwrap();
        worst = worst.max(sp_connection(&cr, &conn, &er, OPTS).unwrap().distance(&base));

        let lambda = r.gen_range(0.2..3.0);
        let cl = rescale(&c, lambda).unwrap();
        let el = rescaled_end(&end, lambda).unwrap();
        worst = worst.max(sp_connection(&cl, &conn, &el, SolverOptions { h: 1e-3 * lambda.min(1.0) }).unwrap().distance(&base));
    }
    within(worst, 1e-7)
}

// ---------------------------------------------------------------- C9

fn c9(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let n = 2;
    let lambdas: Vec<f64> = (0..7).map(|k| 0.5f64.powi(k)).collect();
    let (mut lo, mut hi, mut monotone) = (f64::INFINITY, 0.0f64, true);
    for k in 0..5 {
        let rank = if k % 2 == 0 { Dims::new(1, 1) } else { Dims::new(2, 1) };
        let sc = random_superconnection(&mut r, 2, rank, &[0, 1, 2], 0.5);
        let c = random_path(&mut r, 2, n, (-0.3, 1.5), 0.3);
        let end = SuperPoint::with_generator(n, 1.0, 1);
        let rows = adiabatic_sweep(&c, &sc, &end, &lambdas, OPTS).unwrap();
        for w in rows.windows(2) {
            monotone &= w[1].distance < w[0].distance;
            let q = w[0].distance / w[1].distance;
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    let pass = monotone && lo >= 1.2 && hi <= 1.7;
    Outcome {
        residual: (1.2 - lo).max(hi - 1.7).max(0.0),
        pass,
        detail: format!("monotone: {monotone}, halving ratios in [{lo:.3}, {hi:.3}], need within [1.2, 1.7]"),
    }
}

// ---------------------------------------------------------------- C10

fn c10(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let (p, n) = (3, 3);
    let x0 = [0.1, -0.2, 0.3];
    let probes = default_probes(p, n).unwrap();
    let mut worst = 0.0f64;
    let mut recovered = Vec::new();
    for k in 0..5 {
        let rank = if k % 2 == 0 { Dims::new(1, 1) } else { Dims::new(2, 1) };
        let sc = random_superconnection(&mut r, p, rank, &[0, 2], 0.5);
        let oracle = |c: &supertransport::geometry::SuperPath, e: &SuperPoint| sp(c, &sc, e, OPTS);
        let got = recover(&oracle, &x0, rank, n, &[0, 2], &probes, RecoverOptions::default()).unwrap();
        let want = PointCoefficients::of(&sc, &x0, &[0, 2]).unwrap();
        worst = worst.max(got.max_abs_diff(&want));
        recovered.push(got);
    }
    let mut separation = f64::INFINITY;
    for i in 0..recovered.len() {
        for j in i + 1..recovered.len() {
            if recovered[i].rank == recovered[j].rank {
                separation = separation.min(recovered[i].max_abs_diff(&recovered[j]));
            }
        }
    }
    Outcome {
        residual: worst,
        pass: worst <= 1e-4 && separation > 1e-4,
        detail: format!("recovery {worst:.3e} <= 1e-4, distinct inputs separated by {separation:.3e}"),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(u64) -> Outcome, u64); 11] = [
        ("C1  closed-form point transport", c1, 101),
        ("C2  supergroup homomorphism", c2, 102),
        ("C3  DD = ∂t and QQ = −∂t", c3, 103),
        ("C4  odd flows", c4, 104),
        ("C5  oracle equivalence (2^N expansion)", c5, 105),
        ("C6  gluing", c6, 106),
        ("C7  inverse", c7, 107),
        ("C8  reparametrization and rescaling", c8, 108),
        ("C9  adiabatic limit", c9, 109),
        ("C10 recovery and injectivity", c10, 110),
        ("C11 fourth-order convergence", c11, 101),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, run, seed) in criteria {
        let t = Instant::now();
        let o = run(seed);
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name:<40} {} (residual {:.3e}, seed {seed}, {:.2}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            o.residual,
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of 11 criteria passed in {:.1}s", 11 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

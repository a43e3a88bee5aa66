use crate::error::{Error, Result};
use crate::flows::field::SuperVectorField;
use crate::geometry::{pull_function, PathValues};
use crate::grassmann::{Dims, Grassmann, Parity};
use crate::superfield::SuperPoint;

/// Flow sampled at the integrator's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dims: Dims,
    pub times: Vec<f64>,
    pub points: Vec<Vec<Grassmann>>,
}

impl Trajectory {
    pub fn last(&self) -> &[Grassmann] {
        self.points.last().expect("trajectory has at least its initial point")
    }

    /// Column names `x1[]`, `x1[1|2]`, ... for every coordinate and every
    /// Grassmann key of the given parity class, followed by one row per time.
    pub fn table(&self) -> (Vec<String>, Vec<Vec<f64>>) {
        let n = self.points[0][0].n_generators();
        let mut cols: Vec<(usize, u32)> = Vec::new();
        for i in 0..self.dims.total() {
            let p = self.dims.parity_of(i);
            for mask in 0..(1u32 << n) {
                if Parity::from_bits(mask.count_ones()) == p {
                    cols.push((i, mask));
                }
            }
        }
        let names = cols
            .iter()
            .map(|&(i, mask)| {
                let key: Vec<String> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| (b + 1).to_string()).collect();
                let name = if i < self.dims.even { format!("x{}", i + 1) } else { format!("z{}", i + 1 - self.dims.even) };
                format!("{name}[{}]", key.join("|"))
            })
            .collect();
        let rows = self
            .times
            .iter()
            .zip(&self.points)
            .map(|(t, pt)| std::iter::once(*t).chain(cols.iter().map(|&(i, m)| pt[i].coeff(m))).collect())
            .collect();
        (names, rows)
    }
}

fn axpy(y: &[Grassmann], h: &Grassmann, k: &[Grassmann]) -> Vec<Grassmann> {
    y.iter().zip(k).map(|(a, b)| a + &(h * b)).collect()
}

/// One classical RK4 step with an even (possibly nilpotent) step size.
fn rk4_step(x: &SuperVectorField, y: &[Grassmann], h: &Grassmann) -> Result<Vec<Grassmann>> {
    let half = h.scale(0.5);
    let k1 = x.eval(y)?;
    let k2 = x.eval(&axpy(y, &half, &k1))?;
    let k3 = x.eval(&axpy(y, &half, &k2))?;
    let k4 = x.eval(&axpy(y, h, &k3))?;
    let sixth = h.scale(1.0 / 6.0);
    Ok(y.iter()
        .enumerate()
        .map(|(i, yi)| {
            let s = &(&(&k1[i] + &k2[i].scale(2.0)) + &k3[i].scale(2.0)) + &k4[i];
            yi + &(&sixth * &s)
        })
        .collect())
}

fn check_finite(y: &[Grassmann], t: f64) -> Result<()> {
    if y.iter().all(|g| g.dense().iter().all(|c| c.is_finite())) {
        Ok(())
    } else {
        Err(Error::Domain(format!("flow left the representable range before t = {t}")))
    }
}

/// Flow of an even field from `init` over `[0, t_end]` with `steps` RK4 steps
/// in Grassmann arithmetic.
pub fn flow_even(x: &SuperVectorField, init: &[Grassmann], t_end: f64, steps: usize) -> Result<Trajectory> {
    if x.parity() != Parity::Even {
        return Err(Error::Parity("flow_even needs an even vector field".into()));
    }
    if steps < 2 {
        return Err(Error::Resolution(format!("{steps} integration steps, need at least 2")));
    }
    if !t_end.is_finite() {
        return Err(Error::Domain("non-finite integration time".into()));
    }
    let n = x.check_point(init)?;
    let h = t_end / steps as f64;
    let hg = Grassmann::scalar(n, h);
    let mut times = vec![0.0];
    let mut points = vec![init.to_vec()];
    let mut y = init.to_vec();
    for k in 1..=steps {
        y = rk4_step(x, &y, &hg)?;
        let t = k as f64 * h;
        check_finite(&y, t)?;
        times.push(t);
        points.push(y.clone());
    }
    Ok(Trajectory { dims: x.dims(), times, points })
}

/// Steps of the RK4 truncation error vanish once the step's fifth power does.
pub(crate) fn nilpotent_step_ok(soul: &Grassmann) -> bool {
    soul.powi(5).is_zero()
}

/// Flow of an even field at an even Grassmann time: integrate to the body,
/// then take a single RK4 step of nilpotent size equal to the soul.
pub fn flow_even_at(x: &SuperVectorField, init: &[Grassmann], t: &Grassmann, steps: usize) -> Result<Vec<Grassmann>> {
    let soul = t.soul();
    if !nilpotent_step_ok(&soul) {
        return Err(Error::Capability(
            "time soul has non-vanishing fifth power; the nilpotent step would not be exact".into(),
        ));
    }
    let body = t.body();
    let y = if body == 0.0 { init.to_vec() } else { flow_even(x, init, body, steps)?.last().to_vec() };
    if soul.is_zero() {
        Ok(y)
    } else {
        rk4_step(x, &y, &soul)
    }
}

/// `α(end)` for an odd field: `G` is the flow of `X²`, `H = a(G)` and the
/// answer is `G + θ·H` at the end point.
pub fn flow_odd(x: &SuperVectorField, init: &[Grassmann], end: &SuperPoint, steps: usize) -> Result<Vec<Grassmann>> {
    if x.parity() != Parity::Odd {
        return Err(Error::Parity("flow_odd needs an odd vector field".into()));
    }
    let n = x.check_point(init)?;
    if end.n_generators() != n {
        return Err(Error::Dimension("end point and initial data over different algebras".into()));
    }
    let y = x.square()?;
    let g = flow_even_at(&y, init, end.t(), steps)?;
    let h = x.eval(&g)?;
    Ok(g.iter().zip(&h).map(|(gi, hi)| gi + &(end.theta() * hi)).collect())
}

/// `α` at `(t, θ)` for the nodes `t` of an RK4 run of `X²` to `t_end`.
pub fn flow_odd_trajectory(
    x: &SuperVectorField,
    init: &[Grassmann],
    theta: &Grassmann,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    let y = x.square()?;
    let mut traj = flow_even(&y, init, t_end, steps)?;
    for p in traj.points.iter_mut() {
        let h = x.eval(p)?;
        *p = p.iter().zip(&h).map(|(gi, hi)| gi + &(theta * hi)).collect();
    }
    Ok(traj)
}

/// Residual of `D∘α^♯ = α^♯∘X` on the nodes of an odd flow.
///
/// `D(G + θH) = H + θĠ` is compared with `a(G + θH)` expanded in θ; `Ġ` comes
/// from fourth-order differences of the sampled `G`.
pub fn odd_flow_residual(x: &SuperVectorField, init: &[Grassmann], t_end: f64, steps: usize) -> Result<f64> {
    let y = x.square()?;
    let traj = flow_even(&y, init, t_end, steps)?;
    let h = t_end / steps as f64;
    let g = &traj.points;
    let m = g.len();
    if m < 5 {
        return Err(Error::Resolution("odd-flow residual needs at least 4 steps".into()));
    }
    let mut worst = 0.0f64;
    for k in 2..m - 2 {
        let hk = x.eval(&g[k])?;
        let v = PathValues { n: g[k][0].n_generators(), x: g[k].clone(), eta: hk.clone(), xdot: hk.clone() };
        for (i, a) in x.coeffs().iter().enumerate() {
            let gdot = (&(&g[k - 2][i] - &g[k - 1][i].scale(8.0)) + &(&g[k + 1][i].scale(8.0) - &g[k + 2][i]))
                .scale(1.0 / (12.0 * h));
            let (a0, a1) = pull_function(a, &v)?;
            worst = worst.max(a0.max_abs_diff(&hk[i])).max(a1.max_abs_diff(&gdot));
        }
    }
    Ok(worst)
}

//! Random instance builders shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use supertransport::geometry::{Connection, DifferentialForm, MatrixFunction, PolyTerm, SuperPath, Superconnection};
use supertransport::grassmann::{Dims, GradedMatrix, Grassmann, Parity};
use supertransport::superfield::SuperPoint;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Element of the given parity with zero body, coefficients in `[-s, s]`.
pub fn random_soul(r: &mut ChaCha8Rng, n: usize, parity: Parity, s: f64) -> Grassmann {
    let mut coeffs = vec![0.0; 1 << n];
    for (mask, c) in coeffs.iter_mut().enumerate().skip(1) {
        if (mask.count_ones() % 2 == 1) == parity.is_odd() {
            *c = r.gen_range(-s..s);
        }
    }
    Grassmann::from_dense(n, coeffs).unwrap()
}

/// Even element with body in `[-half, half]`.
pub fn random_even(r: &mut ChaCha8Rng, n: usize, half: f64, s: f64) -> Grassmann {
    let body = r.gen_range(-half..half);
    &Grassmann::scalar(n, body) + &random_soul(r, n, Parity::Even, s)
}

/// Real square matrix whose entries respect the block pattern of `parity`.
pub fn random_block(r: &mut ChaCha8Rng, rank: Dims, parity: Parity, s: f64) -> Vec<Vec<f64>> {
    let k = rank.total();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if rank.parity_of(i) + rank.parity_of(j) == parity {
                        r.gen_range(-s..s)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Odd endomorphism with Grassmann entries over Λ_n.
pub fn random_odd_matrix(r: &mut ChaCha8Rng, n: usize, rank: Dims, s: f64) -> GradedMatrix {
    let k = rank.total();
    let mut m = GradedMatrix::zeros(n, rank, rank, Parity::Odd);
    for i in 0..k {
        for j in 0..k {
            let p = rank.parity_of(i) + rank.parity_of(j) + Parity::Odd;
            let e = if p.is_odd() {
                random_soul(r, n, Parity::Odd, s)
            } else {
                random_even(r, n, s, s)
            };
            m.set(i, j, e);
        }
    }
    m
}

/// Random real odd endomorphism (off-diagonal blocks only).
pub fn random_real_odd(r: &mut ChaCha8Rng, n: usize, rank: Dims, s: f64) -> GradedMatrix {
    GradedMatrix::endo_from_real(n, rank, &random_block(r, rank, Parity::Odd, s), Parity::Odd).unwrap()
}

/// Polynomial matrix function of degree ≤ 1 on R^p with the given block pattern.
pub fn random_affine(r: &mut ChaCha8Rng, p: usize, rank: Dims, parity: Parity, s: f64) -> MatrixFunction {
    let mut terms = vec![PolyTerm { exponents: vec![0; p], odd: vec![], matrix: random_block(r, rank, parity, s) }];
    for i in 0..p {
        let mut e = vec![0; p];
        e[i] = 1;
        terms.push(PolyTerm { exponents: e, odd: vec![], matrix: random_block(r, rank, parity, s) });
    }
    MatrixFunction::polynomial(Dims::new(p, 0), rank, parity, &terms).unwrap()
}

pub fn random_connection(r: &mut ChaCha8Rng, p: usize, rank: Dims, s: f64) -> Connection {
    let coeffs = (0..p).map(|_| random_affine(r, p, rank, Parity::Even, s)).collect();
    Connection::new(Dims::new(p, 0), rank, coeffs).unwrap()
}

/// Random form of the given degree whose total parity is odd.
pub fn random_form(r: &mut ChaCha8Rng, p: usize, rank: Dims, degree: usize, s: f64) -> DifferentialForm {
    let end = if degree % 2 == 0 { Parity::Odd } else { Parity::Even };
    let sparse = supertransport::geometry::index_sets(p, degree)
        .into_iter()
        .map(|idx| (idx, random_affine(r, p, rank, end, s)))
        .collect();
    DifferentialForm::new(p, degree, rank, end, sparse).unwrap()
}

pub fn random_superconnection(r: &mut ChaCha8Rng, p: usize, rank: Dims, degrees: &[usize], s: f64) -> Superconnection {
    let conn = random_connection(r, p, rank, s);
    let forms = degrees.iter().map(|&d| random_form(r, p, rank, d, s)).collect();
    Superconnection::new(conn, forms).unwrap()
}

/// Quadratic path in R^{p|0} over Λ_n with Grassmann coefficients.
pub fn random_path(r: &mut ChaCha8Rng, p: usize, n: usize, window: (f64, f64), s: f64) -> SuperPath {
    let x = (0..p)
        .map(|_| {
            vec![
                random_even(r, n, 0.5, s),
                random_even(r, n, 1.0, s),
                random_even(r, n, 0.5, s),
            ]
        })
        .collect();
    let eta = (0..p)
        .map(|_| vec![random_soul(r, n, Parity::Odd, s), random_soul(r, n, Parity::Odd, s)])
        .collect();
    SuperPath::polynomial(Dims::new(p, 0), n, window, x, eta).unwrap()
}

/// Point with real time `t` and random odd part.
pub fn random_odd_endpoint(r: &mut ChaCha8Rng, n: usize, t: f64, s: f64) -> SuperPoint {
    SuperPoint::new(Grassmann::scalar(n, t), random_soul(r, n, Parity::Odd, s)).unwrap()
}

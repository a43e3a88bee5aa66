mod common;

use common::*;
use proptest::prelude::*;
use supertransport::geometry::glued_endpoint;
use supertransport::grassmann::{mat_exp, Dims, GradedMatrix, Parity, Substitution};
use supertransport::superfield::SuperPoint;
use supertransport::transport::{default_probes, glue, sp, SolverOptions, TransportMap};

const OPTS: SolverOptions = SolverOptions { h: 1e-3 };

fn rank_of(k: u8) -> Dims {
    if k == 0 {
        Dims::new(1, 1)
    } else {
        Dims::new(2, 1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn transport_commutes_with_left_scalars(seed in any::<u64>(), k in 0u8..2) {
        let mut r = rng(seed);
        let n = 3;
        let rank = rank_of(k);
        let sc = random_superconnection(&mut r, 2, rank, &[0, 1, 2], 0.5);
        let c = random_path(&mut r, 2, n, (-0.3, 1.5), 0.3);
        let end = random_odd_endpoint(&mut r, n, 0.6, 0.5);
        let map = sp(&c, &sc, &end, OPTS).unwrap();
        let v = random_odd_matrix(&mut r, n, rank, 1.0).column(0);
        for parity in [Parity::Even, Parity::Odd] {
            let lambda = match parity {
                Parity::Even => random_even(&mut r, n, 1.0, 1.0),
                Parity::Odd => random_soul(&mut r, n, Parity::Odd, 1.0),
            };
            let lhs = map.apply(&v.scale_left(&lambda)).unwrap();
            let rhs = map.apply(&v).unwrap().scale_left(&lambda);
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            let sum = map.apply(&v.add(&v.scale_left(&lambda))).unwrap();
            prop_assert!(sum.max_abs_diff(&map.apply(&v).unwrap().add(&rhs)) < 1e-12);
        }
    }

    #[test]
    fn transport_is_natural_under_substitution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (2, 4);
        let rank = Dims::new(1, 1);
        let sc = random_superconnection(&mut r, 2, rank, &[0, 1, 2], 0.5);
        let c = random_path(&mut r, 2, n, (-0.3, 1.5), 0.3);
        let end = random_odd_endpoint(&mut r, n, 0.7, 0.5);
        let images = (0..n).map(|_| random_soul(&mut r, m, Parity::Odd, 1.0)).collect();
        let sigma = Substitution::new(m, images).unwrap();
        let pushed = sp(&c.substitute(&sigma).unwrap(), &sc, &end.map(|g| sigma.apply(g)), OPTS).unwrap();
        let mapped = sp(&c, &sc, &end, OPTS).unwrap().map_entries(m, |g| sigma.apply(g)).unwrap();
        let d = pushed.distance(&mapped);
        prop_assert!(d < 1e-10, "naturality defect {d:e}");
    }

    #[test]
    fn gluing_is_associative(seed in any::<u64>(), s1 in 0.1f64..0.4, s2 in 0.1f64..0.4) {
        let mut r = rng(seed);
        let n = 2;
        let sc = random_superconnection(&mut r, 2, Dims::new(1, 1), &[0, 1, 2], 0.5);
        let c1 = random_path(&mut r, 2, n, (-0.3, 2.0), 0.3);
        let (j1, j2) = (SuperPoint::real(n, s1), SuperPoint::real(n, s2));
        let c2 = c1.right_translate(&j1).unwrap();
        let c3 = c2.right_translate(&j2).unwrap();
        let e3 = random_odd_endpoint(&mut r, n, 0.4, 0.5);

        let left = glue(&glue(&c1, &c2, &j1).unwrap(), &c3, &SuperPoint::real(n, s1 + s2)).unwrap();
        let right = glue(&c1, &glue(&c2, &c3, &j2).unwrap(), &j1).unwrap();
        let end_left = glued_endpoint(&SuperPoint::real(n, s1 + s2), &e3).unwrap();
        let end_right = glued_endpoint(&j1, &glued_endpoint(&j2, &e3).unwrap()).unwrap();
        prop_assert!(end_left.max_abs_diff(&end_right) < 1e-14);

        let a = sp(&left, &sc, &end_left, OPTS).unwrap();
        let b = sp(&right, &sc, &end_right, OPTS).unwrap();
        let pieces = sp(&c3, &sc, &e3, OPTS).unwrap()
            .compose(&sp(&c2, &sc, &j2, OPTS).unwrap()).unwrap()
            .compose(&sp(&c1, &sc, &j1, OPTS).unwrap()).unwrap();
        prop_assert!(a.distance(&b) < 1e-7);
        prop_assert!(a.distance(&pieces) < 1e-7);
    }
}

#[test]
fn distinct_superconnections_give_distinct_transports() {
    let mut r = rng(21);
    let (p, n) = (2, 2);
    let rank = Dims::new(1, 1);
    let x0 = [0.05, -0.1];
    let probes = default_probes(p, n).unwrap();
    let end = SuperPoint::with_generator(n, 0.4, 1);
    for _ in 0..20 {
        let s1 = random_superconnection(&mut r, p, rank, &[0, 2], 0.5);
        let s2 = random_superconnection(&mut r, p, rank, &[0, 2], 0.5);
        let gap = probes
            .iter()
            .map(|pr| {
                let c = pr.path(&x0, n).unwrap();
                sp(&c, &s1, &end, OPTS).unwrap().distance(&sp(&c, &s2, &end, OPTS).unwrap())
            })
            .fold(0.0, f64::max);
        assert!(gap > 1e-6, "transports of distinct data agree to {gap:e}");
    }
}

fn point_case_error(a: &GradedMatrix, n: usize, h: f64) -> f64 {
    use supertransport::geometry::{Connection, DifferentialForm, MatrixFunction, PolyTerm, SuperPath, Superconnection};
    let rank = a.rows();
    let body = a.body();
    let term = PolyTerm { exponents: vec![], odd: vec![], matrix: body };
    let f = MatrixFunction::polynomial(Dims::new(0, 0), rank, Parity::Odd, &[term]).unwrap();
    let form = DifferentialForm::new(0, 0, rank, Parity::Odd, vec![(vec![], f)]).unwrap();
    let sc = Superconnection::new(Connection::trivial(Dims::new(0, 0), rank), vec![form]).unwrap();
    let c = SuperPath::polynomial(Dims::new(0, 0), n, (-0.5, 2.0), vec![], vec![]).unwrap();
    let end = SuperPoint::with_generator(n, 1.0, 1);
    let got = sp(&c, &sc, &end, SolverOptions { h }).unwrap();
    let expo = a.mul(a).scale_left(end.t()).neg().add(&a.scale_left(end.theta()));
    let closed = TransportMap::new(mat_exp(&expo.with_declared(Parity::Even)).unwrap()).unwrap();
    got.distance(&closed)
}

#[test]
fn solver_converges_at_fourth_order() {
    let mut r = rng(22);
    for rank in [Dims::new(1, 1), Dims::new(2, 2)] {
        let a = random_real_odd(&mut r, 2, rank, 1.0);
        let errs: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&h| point_case_error(&a, 2, h)).collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 16.0).abs() <= 3.0, "ratio {ratio} from errors {errs:?}");
        }
    }
}

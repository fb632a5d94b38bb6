mod common;

use common::*;
use hypertv::fixtures;
use hypertv::learning::{conjugate_gradient, ssl_solve, SparseMatrix};
use hypertv::pdhg::{solve, DataTerm, PdhgConfig, Power};
use hypertv::ratiodca::{
    balanced_cut, ratio_dca, recursive_partition, BalanceFunction, BalanceKind, RatioDcaConfig,
    SplitRule,
};
use hypertv::{Hypergraph, Partition};
use rand::Rng;

fn tight() -> PdhgConfig {
    PdhgConfig {
        epsilon: 1e-12,
        ..PdhgConfig::default()
    }
}

#[test]
fn pdhg_matches_subgradient_oracle() {
    let mut r = rng(77);
    for _ in 0..20 {
        let n = r.gen_range(4..=20);
        let m = r.gen_range(1..=12);
        let h = random_hypergraph(&mut r, n, m, 5);
        let y = random_labels(&mut r, n, 0.4);
        let lambda = 10f64.powf(r.gen_range(-2.0..0.5));
        for power in [Power::One, Power::Two] {
            let data = DataTerm::Ssl { y: y.clone() };
            let rep = solve(&h, &data, lambda, power, &PdhgConfig::default()).unwrap();
            assert!(rep.converged && rep.rel_gap < 1e-6);
            let direct = ssl_objective(&h, &y, lambda, power.exponent(), &rep.f);
            assert!((direct - rep.objective).abs() <= 1e-9 * (1.0 + direct));
            let oracle = subgradient_oracle(&h, &y, lambda, power.exponent(), 50_000);
            assert!(rep.objective <= oracle + 1e-3, "{} vs {oracle}", rep.objective);
        }
    }
}

#[test]
fn ssl_output_bounded_by_labels() {
    let mut r = rng(5);
    for _ in 0..20 {
        let n = r.gen_range(4..=15);
        let h = random_hypergraph(&mut r, n, 10, 4);
        let y = random_labels(&mut r, n, 0.5);
        let bound = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for power in [Power::One, Power::Two] {
            let f = ssl_solve(&h, &y, power, 0.3, &tight()).unwrap().f;
            assert!(f.iter().all(|v| v.abs() <= bound + 1e-6), "{f:?}");
        }
    }
}

#[test]
fn regularization_path_monotone() {
    let mut r = rng(12);
    for _ in 0..10 {
        let n = r.gen_range(4..=10);
        let h = random_hypergraph(&mut r, n, 6, 4);
        let y = random_labels(&mut r, n, 0.6);
        for power in [Power::One, Power::Two] {
            let p = power.exponent();
            let mut prev = f64::INFINITY;
            for lambda in [0.01, 0.05, 0.2, 1.0, 5.0] {
                let f = ssl_solve(&h, &y, power, lambda, &tight()).unwrap().f;
                let omega = h.omega(&f, p).unwrap();
                assert!(omega <= prev + 1e-6, "{p} {lambda}: {omega} > {prev}");
                prev = omega;
            }
        }
    }
}

#[test]
fn graph_quadratic_matches_linear_system() {
    let mut r = rng(40);
    for _ in 0..10 {
        let n = r.gen_range(3..=12);
        let h = random_uniform(&mut r, n, 2 * n, 2);
        let y = random_labels(&mut r, n, 0.5);
        let lambda = 0.7;
        let f = ssl_solve(&h, &y, Power::Two, lambda, &tight()).unwrap().f;
        // ½‖f − y‖² + λ Σ w (f_i − f_j)² is stationary where (I + 2λL) f = y
        let mut trip = Vec::new();
        for e in h.edges() {
            let (i, j, w) = (e.vertices[0], e.vertices[1], e.weight);
            trip.extend([(i, i, w), (j, j, w), (i, j, -w), (j, i, -w)]);
        }
        let l = SparseMatrix::from_triplets(n, trip);
        let apply = |x: &[f64], out: &mut [f64]| {
            l.mul_into(x, out);
            for k in 0..n {
                out[k] = x[k] + 2.0 * lambda * out[k];
            }
        };
        let exact = conjugate_gradient(apply, &y, 1e-14, 1000).unwrap();
        for k in 0..n {
            assert!((f[k] - exact[k]).abs() <= 1e-6, "{f:?} {exact:?}");
        }
    }
}

fn brute_ratio(h: &Hypergraph, b: &BalanceFunction) -> f64 {
    brute_force_min(h.n_vertices(), |c| balanced_cut(h, b, c).unwrap()).1
}

#[test]
fn ratio_dca_bounded_below_by_optimum() {
    let mut r = rng(3);
    for t in 0..12 {
        let n = r.gen_range(5..=10);
        let h = random_hypergraph(&mut r, n, n + 3, 4);
        let b = BalanceFunction::new(&h, BalanceKind::ALL[t % 4]);
        let res = ratio_dca(&h, &b, &RatioDcaConfig::default()).unwrap();
        let opt = brute_ratio(&h, &b);
        assert!(res.cut_value >= opt - 1e-12);
        assert!(res.cut_value <= res.eigenvalue + 1e-10);
        assert!((balanced_cut(&h, &b, &res.partition).unwrap() - res.cut_value).abs() < 1e-12);
        for trace in &res.all_traces {
            assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-6));
        }
    }
}

#[test]
fn disjoint_pair_reaches_zero_ncut() {
    let h = fixtures::disjoint_pair();
    let b = BalanceFunction::new(&h, BalanceKind::NormalizedCut);
    let res = ratio_dca(&h, &b, &RatioDcaConfig::default()).unwrap();
    assert_eq!(res.cut_value, 0.0);
    let p = &res.partition;
    assert!(*p == Partition::from_indices(4, &[0, 1]).unwrap() || *p == Partition::from_indices(4, &[2, 3]).unwrap());
}

#[test]
fn bias_fixture_ncut_matches_brute_force() {
    let h = fixtures::bias_example();
    let b = BalanceFunction::new(&h, BalanceKind::NormalizedCut);
    let (best, opt) = brute_force_min(6, |c| balanced_cut(&h, &b, c).unwrap());
    let res = ratio_dca(&h, &b, &RatioDcaConfig::default()).unwrap();
    assert!((res.cut_value - opt).abs() < 1e-12);
    assert!(res.partition == best || res.partition == best.complement());
}

#[test]
fn recursive_split_of_disjoint_groups() {
    let h = Hypergraph::new(
        8,
        vec![
            (1.0, vec![0, 1, 2]),
            (1.0, vec![1, 2, 3]),
            (1.0, vec![0, 3]),
            (1.0, vec![4, 5, 6]),
            (1.0, vec![5, 6, 7]),
            (1.0, vec![4, 7]),
        ],
    )
    .unwrap();
    let c = recursive_partition(&h, BalanceKind::NormalizedCut, 2, &RatioDcaConfig::default(), SplitRule::SmallestRatio)
        .unwrap();
    assert_eq!(c.labels, vec![0, 0, 0, 0, 1, 1, 1, 1]);
    assert_eq!(c.splits[0].value, 0.0);
}

#[test]
fn ratio_dca_threads_do_not_change_result() {
    let mut r = rng(90);
    let h = random_hypergraph(&mut r, 12, 15, 4);
    let b = BalanceFunction::new(&h, BalanceKind::NormalizedCut);
    let one = ratio_dca(&h, &b, &RatioDcaConfig::default()).unwrap();
    let four = ratio_dca(&h, &b, &RatioDcaConfig { threads: 4, ..RatioDcaConfig::default() }).unwrap();
    assert_eq!(one, four);
}

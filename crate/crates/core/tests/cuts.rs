mod common;

use common::*;
use hypertv::ratiodca::{balance_value, BalanceFunction, BalanceKind};
use hypertv::{lovasz_extension, Partition};
use rand::Rng;

#[test]
fn exhaustive_cut_identities() {
    let mut r = rng(2024);
    for _ in 0..20 {
        let n = r.gen_range(2..=10);
        let m = r.gen_range(1..=12);
        let h = random_hypergraph(&mut r, n, m, 5);
        let ce = h.clique_expansion();
        for bits in 0..(1u64 << n) {
            let c = Partition::from_bits(n, bits);
            let cut = h.cut(&c).unwrap();
            assert!((cut - brute_cut(&h, &c)).abs() <= 1e-12);
            assert!((h.total_variation(&c.indicator()).unwrap() - cut).abs() <= 1e-12);
            assert!((lovasz_extension(&h, &c.indicator()).unwrap() - cut).abs() <= 1e-12);
            let direct: f64 = h
                .edges()
                .iter()
                .map(|e| {
                    let k = e.vertices.iter().filter(|&&v| c.contains(v)).count() as f64;
                    e.weight / e.len() as f64 * k * (e.len() as f64 - k)
                })
                .sum();
            let cce = h.clique_expansion_cut(&c).unwrap();
            assert!((cce - direct).abs() <= 1e-12);
            assert!((ce.cut(&c).unwrap() - cce).abs() <= 1e-12);
            assert_eq!(cut, h.cut(&c.complement()).unwrap());
        }
    }
}

#[test]
fn three_uniform_equivalence_exhaustive() {
    let mut r = rng(31);
    for _ in 0..10 {
        let n = r.gen_range(3..=10);
        let m = r.gen_range(1..=15);
        let h = random_uniform(&mut r, n, m, 3);
        let g = h.three_uniform_graph().unwrap();
        for bits in 0..(1u64 << n) {
            let c = Partition::from_bits(n, bits);
            assert!((h.cut(&c).unwrap() - g.cut(&c).unwrap()).abs() <= 1e-12);
        }
        for _ in 0..50 {
            let f: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
            let tv = h.total_variation(&f).unwrap();
            assert!((tv - g.p_variation(&f, 1.0).unwrap()).abs() <= 1e-12 * (1.0 + tv));
        }
    }
}

#[test]
fn balance_functions_symmetric() {
    let mut r = rng(8);
    for _ in 0..5 {
        let n = r.gen_range(2..=10);
        let h = random_hypergraph(&mut r, n, 8, 4);
        for kind in BalanceKind::ALL {
            let b = BalanceFunction::new(&h, kind);
            for bits in 0..(1u64 << n) {
                let c = Partition::from_bits(n, bits);
                let v = balance_value(&b, &c).unwrap();
                let w = balance_value(&b, &c.complement()).unwrap();
                assert!((v - w).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }
    }
}

#[test]
fn balance_functions_submodular_sampled() {
    let mut r = rng(9);
    let n = 9;
    let h = random_hypergraph(&mut r, n, 12, 4);
    for kind in BalanceKind::ALL {
        let b = BalanceFunction::new(&h, kind);
        for _ in 0..2000 {
            let a = Partition::from_bits(n, r.gen_range(0..1u64 << n));
            let c = Partition::from_bits(n, r.gen_range(0..1u64 << n));
            let union = Partition::new((0..n).map(|i| a.contains(i) || c.contains(i)).collect());
            let inter = Partition::new((0..n).map(|i| a.contains(i) && c.contains(i)).collect());
            let lhs = balance_value(&b, &a).unwrap() + balance_value(&b, &c).unwrap();
            let rhs = balance_value(&b, &union).unwrap() + balance_value(&b, &inter).unwrap();
            assert!(lhs >= rhs - 1e-9, "{kind:?}");
        }
    }
}

mod common;

use common::{matching_min, pair, rel_close};
use eucopt::energy::edge_energy_constants;
use eucopt::geometry::PointCloud;
use eucopt::matching::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_equals_enumeration(seed in any::<u64>(), n in 1usize..7, d in 1usize..4, p in 1.0..4.0f64) {
        let (x, y) = pair(n, d, seed, 0);
        let sol = solve_matching_exact(&x, &y, p).unwrap();
        prop_assert!(rel_close(sol.cost, matching_min(&x, &y, p), 1e-9));
        prop_assert!(rel_close(sol.cost, matching_cost(&x, &y, &sol.matching, p).unwrap(), 1e-12));
        prop_assert!(verify_matching_two_opt(&x, &y, &sol.matching, p).unwrap().is_empty());
    }

    #[test]
    fn halving_scales_cost_and_keeps_optimizer(seed in any::<u64>(), n in 2usize..8, p in 1.0..4.0f64) {
        let (x, y) = pair(n, 2, seed, 1);
        let sol = solve_matching_exact(&x, &y, p).unwrap();
        let (hx, hy) = (x.scaled(0.5).unwrap(), y.scaled(0.5).unwrap());
        let half = matching_cost(&hx, &hy, &sol.matching, p).unwrap();
        prop_assert!(rel_close(half, sol.cost * 0.5f64.powf(p), 1e-12));
        let resolved = solve_matching_exact(&hx, &hy, p).unwrap();
        prop_assert!(rel_close(resolved.cost, half, 1e-9));
    }

    #[test]
    fn local_edge_energy_holds_on_optimizers(seed in any::<u64>(), n in 2usize..40, p in 1.05..6.0f64) {
        let (x, y) = pair(n, 3, seed, 2);
        let sol = solve_matching_exact(&x, &y, p).unwrap();
        let rep = verify_local_edge_energy(&x, &y, &sol.matching, p, &edge_energy_constants(p).unwrap()).unwrap();
        prop_assert!(rep.holds, "worst slack {}", rep.worst_slack);
        prop_assert!(rep.pairs_hold());
    }

    #[test]
    fn matching_text_round_trip(seed in any::<u64>(), n in 1usize..20) {
        let (x, y) = pair(n, 2, seed, 3);
        let m = solve_matching_exact(&x, &y, 1.0).unwrap().matching;
        prop_assert_eq!(Matching::from_text(&m.to_text()).unwrap(), m);
    }
}

#[test]
fn crossed_instance_has_violation_at_zero_one() {
    let x = PointCloud::from_points(&[vec![0.0], vec![1.0]]).unwrap();
    let y = PointCloud::from_points(&[vec![0.9], vec![0.1]]).unwrap();
    let v = verify_matching_two_opt(&x, &y, &Matching::identity(2), 1.0).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!((v[0].i, v[0].j), (0, 1));
    let sol = solve_matching_exact(&x, &y, 1.0).unwrap();
    assert_eq!(sol.matching.as_slice(), &[1, 0]);
    assert!((sol.cost - 0.2).abs() < 1e-12);
}

#[test]
fn gradient_matches_central_differences() {
    let p = 3.0;
    let (x, y) = pair(5, 2, 77, 0);
    let m = solve_matching_exact(&x, &y, p).unwrap().matching;
    let (gx, _) = matching_cost_gradient(&x, &y, &m, p).unwrap();
    let h = 1e-6;
    for i in 0..x.len() {
        for k in 0..2 {
            let shift = |s: f64| {
                let mut flat = x.as_flat().to_vec();
                flat[i * 2 + k] += s;
                PointCloud::from_flat(2, flat).unwrap()
            };
            let fd = (solve_matching_exact(&shift(h), &y, p).unwrap().cost
                - solve_matching_exact(&shift(-h), &y, p).unwrap().cost)
                / (2.0 * h);
            assert!((fd - gx[i][k]).abs() <= 1e-5 * (1.0 + gx[i][k].abs()), "{fd} vs {}", gx[i][k]);
        }
    }
}

#[test]
fn mismatched_clouds_are_rejected() {
    let (x, _) = pair(3, 2, 1, 0);
    let (_, y) = pair(4, 2, 1, 0);
    assert!(solve_matching_exact(&x, &y, 1.0).is_err());
    let (_, y3) = pair(3, 3, 1, 0);
    assert!(solve_matching_exact(&x, &y3, 1.0).is_err());
    let (x11, y11) = pair(11, 1, 1, 0);
    assert!(brute_force_matching(&x11, &y11, 1.0).is_err());
}

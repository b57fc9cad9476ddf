mod common;

use common::*;
use mrwtv::decompose_l1::{l1_energy, solve_l1};
use mrwtv::decompose_l2::{rof_energy, solve_rof};
use mrwtv::geometry::{coarea_profile, integral, perimeter, perimeter_by_inner_interaction, total_variation};
use mrwtv::io::{node_function_csv, parse_node_function, space_from_json, space_to_json};
use mrwtv::maxflow::FlowNetwork;
use mrwtv::mincut::{geometric_energy, solve_geometric};
use mrwtv::thresholds::scale_space;
use mrwtv::{rat, Rational};
use proptest::prelude::*;
use rand::Rng;

fn rationals(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-12i64..=12, 1i64..=4), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| rat(a, b)).collect())
}

fn positive_part_integral(space: &mrwtv::RandomWalkSpace<Rational>, a: &[Rational], b: &[Rational]) -> Rational {
    let d: Vec<Rational> = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let v = x - y;
            if v > rat(0, 1) {
                v
            } else {
                rat(0, 1)
            }
        })
        .collect();
    integral(space, &d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn max_flow_equals_brute_force_min_cut(
        n in 2usize..8,
        caps in prop::collection::vec(0i64..6, 64),
    ) {
        let (s, t) = (0, n - 1);
        let mut net = FlowNetwork::new(n);
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                let c = caps[(u * 8 + v) % caps.len()];
                if u != v && c > 0 {
                    net.add_arc(u, v, rat(c, 1));
                    arcs.push((u, v, c));
                }
            }
        }
        let flow = net.max_flow(s, t);
        let mut best = i64::MAX;
        for mask in 0..1u64 << n {
            if mask & 1 == 0 || mask >> t & 1 == 1 {
                continue;
            }
            let cut: i64 = arcs
                .iter()
                .filter(|(u, v, _)| mask >> u & 1 == 1 && mask >> v & 1 == 0)
                .map(|a| a.2)
                .sum();
            best = best.min(cut);
        }
        prop_assert_eq!(flow, rat(best, 1));
        let side = net.reachable_from(s);
        prop_assert!(side[s] && !side[t]);
    }

    #[test]
    fn geometric_solver_matches_enumeration(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.4, 0.3);
        let space = g.space();
        let f = random_set(&mut r, n);
        let (p, q) = random_lambda(&mut r, 3);
        let sol = solve_geometric(&space, &f, &rat(p, q)).unwrap();
        let bf = brute_geometric(&g, &f, p, q);
        prop_assert_eq!(&sol.energy, &bf.energy);
        prop_assert_eq!(&sol.minimal, &bf.minimal);
        prop_assert_eq!(&sol.maximal, &bf.maximal);
        prop_assert_eq!(sol.unique, bf.count == 1);
    }

    #[test]
    fn l1_solver_matches_enumeration(seed in any::<u64>(), n in 2usize..7) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.4, 0.3);
        let space = g.space();
        let f_int: Vec<i64> = (0..n).map(|_| r.gen_range(0..4)).collect();
        let f: Vec<Rational> = f_int.iter().map(|v| rat(*v, 1)).collect();
        let (p, q) = random_lambda(&mut r, 2);
        let lambda = rat(p, q);
        let sol = solve_l1(&space, &f, &lambda).unwrap();
        let (best, _) = brute_l1(&g, &f_int, p, q);
        let best = Rational::new((best as i64).into(), (q * WEIGHT_DEN).into());
        prop_assert_eq!(&sol.energy, &best);
        prop_assert_eq!(l1_energy(&space, &sol.maximal_u, &f, &lambda), best);
        prop_assert!(sol.certificate.unwrap().feasible);
        prop_assert!(sol.minimal_u.iter().zip(&sol.maximal_u).all(|(a, b)| a <= b));
    }

    #[test]
    fn coarea_and_perimeter_identities_are_exact(
        seed in any::<u64>(),
        n in 2usize..10,
        u in rationals(10),
    ) {
        let mut r = rng(seed);
        let space = random_graph(&mut r, n, 0.4, 0.3).space();
        let u = &u[..n];
        prop_assert_eq!(total_variation(&space, u), coarea_profile(&space, u).integral);
        let e = random_set(&mut r, n);
        prop_assert_eq!(perimeter(&space, &e), perimeter_by_inner_interaction(&space, &e));
        prop_assert_eq!(perimeter(&space, &e), perimeter(&space, &e.complement()));
    }

    #[test]
    fn rof_is_an_l1_contraction_and_keeps_the_mean(
        seed in any::<u64>(),
        n in 2usize..8,
        f1 in rationals(8),
        f2 in rationals(8),
        lam in (1i64..=20, 1i64..=4),
    ) {
        let mut r = rng(seed);
        let space = random_graph(&mut r, n, 0.4, 0.3).space();
        let (f1, f2) = (&f1[..n], &f2[..n]);
        let lambda = rat(lam.0, lam.1);
        let u1 = solve_rof(&space, f1, &lambda).unwrap();
        let u2 = solve_rof(&space, f2, &lambda).unwrap();
        prop_assert!(u1.certificate.as_ref().unwrap().feasible);
        prop_assert!(
            positive_part_integral(&space, &u1.u, &u2.u) <= positive_part_integral(&space, f1, f2)
        );
        prop_assert_eq!(integral(&space, &u1.u), integral(&space, f1));
        let base = rof_energy(&space, &u1.u, f1, &lambda);
        for x in 0..n {
            for step in [rat(1, 7), rat(-1, 7)] {
                let mut w = u1.u.clone();
                w[x] += step;
                prop_assert!(rof_energy(&space, &w, f1, &lambda) >= base);
            }
        }
    }

    #[test]
    fn scale_space_transitions_match_solves(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let space = random_graph(&mut r, n, 0.4, 0.2).space();
        let omega = random_proper_set(&mut r, n);
        let transitions = scale_space(&space, &omega).unwrap();
        prop_assert!(!transitions.is_empty());
        prop_assert!(transitions.windows(2).all(|w| w[0].lambda < w[1].lambda));
        for t in &transitions {
            let below = t.lambda.clone() * rat(999, 1000);
            let above = t.lambda.clone() * rat(1001, 1000);
            let at = solve_geometric(&space, &omega, &t.lambda).unwrap();
            prop_assert_eq!(
                geometric_energy(&space, &t.below, &omega, &t.lambda),
                at.energy.clone()
            );
            prop_assert_eq!(
                geometric_energy(&space, &t.above, &omega, &t.lambda),
                at.energy
            );
            let lo = solve_geometric(&space, &omega, &below).unwrap();
            let hi = solve_geometric(&space, &omega, &above).unwrap();
            prop_assert_eq!(lo.energy, geometric_energy(&space, &t.below, &omega, &below));
            prop_assert_eq!(hi.energy, geometric_energy(&space, &t.above, &omega, &above));
        }
        let last = transitions.last().unwrap();
        prop_assert_eq!(&last.above, &omega);
    }

    #[test]
    fn formats_round_trip(seed in any::<u64>(), n in 2usize..9, u in rationals(9)) {
        let mut r = rng(seed);
        let space = random_graph(&mut r, n, 0.4, 0.3).space();
        let back: mrwtv::RandomWalkSpace<Rational> = space_from_json(&space_to_json(&space)).unwrap();
        prop_assert_eq!(back.measure(), space.measure());
        prop_assert_eq!(back.jump(), space.jump());
        prop_assert_eq!(back.states(), space.states());
        let u = &u[..n];
        let csv = node_function_csv(&space, u).unwrap();
        prop_assert_eq!(parse_node_function(&space, &csv).unwrap(), u.to_vec());
    }
}

#[test]
fn minimizers_grow_with_the_datum() {
    let mut r = rng(11);
    for _ in 0..20 {
        let n = r.gen_range(3..9);
        let g = random_graph(&mut r, n, 0.4, 0.2);
        let space = g.space();
        let small = random_set(&mut r, n);
        let big = small.union(&random_set(&mut r, n));
        let lambda = rat(r.gen_range(1..20), 10);
        let a = solve_geometric(&space, &small, &lambda).unwrap();
        let b = solve_geometric(&space, &big, &lambda).unwrap();
        assert!(a.minimal.is_subset_of(&b.minimal));
        assert!(a.maximal.is_subset_of(&b.maximal));
    }
}


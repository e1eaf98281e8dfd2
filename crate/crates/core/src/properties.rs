//! Property tests over the public API.

use proptest::prelude::*;

use crate::analysis::{
    deviation_report, equilibrium_census, payment_stabilize, verify_approx_strong,
    welfare_lower_bound, CensusOptions, StrategyCount,
};
use crate::dynamics::{
    default_step_cap, maximal_improving_coalition, one_shot_alpha_br, one_shot_stability_bound,
    run_dynamics, strong_two, Termination,
};
use crate::generalized::{
    alpha_for_r, hypergraph_cc_recover, lex_compare, parse_generalized, parse_hypergraph,
    parse_omega, serialize_generalized, serialize_hypergraph, serialize_omega, HypergraphPotential,
};
use crate::generators::{
    random, random_cc, random_hypergraph_cc, random_omega, random_supermodular, random_symmetric,
    WeightRange,
};
use crate::io::{parse_instance, serialize_instance};
use crate::model::{player_utility, welfare};
use crate::numeric::{format_rational, int, parse_rational, rat, to_f64, Extended, Num, Threshold};
use crate::potentials::{
    cc_recover, certificate_matches, symmetric_potential, PairwisePotential, Potential,
    PotentialCertificate,
};
use crate::{Exec, Game, Profile, ProfileSpace};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn profile_for(n: usize, m: usize, code: u64) -> Profile {
    let space = ProfileSpace::new(n, m, u64::MAX).unwrap();
    space.decode(code % space.size())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn rationals_round_trip(p in -10_000i64..10_000, q in 1i64..500) {
        let x = rat(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn profile_codes_round_trip(n in 1usize..7, m in 1usize..5, code in any::<u64>()) {
        let space = ProfileSpace::new(n, m, u64::MAX).unwrap();
        let p = space.decode(code % space.size());
        prop_assert_eq!(space.encode(&p), code % space.size());
        let text = p.to_one_based();
        prop_assert_eq!(Profile::parse_one_based(&text, n, m).unwrap(), p);
    }

    #[test]
    fn utility_splits_into_intrinsic_and_coordination(
        n in 1usize..7, m in 1usize..4, seed in any::<u64>(), code in any::<u64>(),
    ) {
        let g = random(n, m, WeightRange::default(), false, seed).unwrap();
        let s = profile_for(n, m, code);
        let mut total = Num::from_integer(0.into());
        for i in 0..n {
            let u = player_utility(&g, &s, i).unwrap();
            prop_assert_eq!(&u.intrinsic + &u.coordination, u.total.clone());
            prop_assert_eq!(u.total.clone(), g.utility(&s, i));
            total += u.total;
        }
        let w = welfare(&g, &s).unwrap();
        prop_assert_eq!(&w.intrinsic, &g.intrinsic_welfare(&s));
        prop_assert_eq!(&w.coordination, &g.coordination_welfare(&s));
        prop_assert_eq!(&w.intrinsic + &w.coordination, total.clone());
        prop_assert_eq!(g.social_welfare(&s), total);
    }

    #[test]
    fn instance_json_round_trips(n in 1usize..6, m in 1usize..4, seed in any::<u64>()) {
        let g = random(n, m, WeightRange::default(), false, seed).unwrap();
        let text = serialize_instance(&g);
        prop_assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text);
    }

    #[test]
    fn generalized_json_round_trips(seed in any::<u64>(), n in 2usize..5, m in 1usize..3) {
        let h = random_hypergraph_cc(n, m, seed).unwrap().0;
        let text = serialize_hypergraph(&h);
        prop_assert_eq!(serialize_hypergraph(&parse_hypergraph(&text).unwrap()), text);
        let o = random_omega(n, m, &rat(1, 2), seed).unwrap();
        let text = serialize_omega(&o);
        prop_assert_eq!(serialize_omega(&parse_omega(&text).unwrap()), text);
        let t = random_supermodular(n, m, &int(2), seed).unwrap();
        let text = serialize_generalized(&t);
        prop_assert_eq!(serialize_generalized(&parse_generalized(&text).unwrap()), text);
    }

    /// Output of one-shot α-BR is a max(α, 1/α+1)-approximate equilibrium,
    /// and only players on the start strategy move, each at most once.
    #[test]
    fn one_shot_is_stable_and_moves_once(
        n in 1usize..7, m in 1usize..4, seed in any::<u64>(), k0 in 0usize..3, a in prop::sample::select(vec![(1, 1), (3, 2), (2, 1), (5, 2)]),
    ) {
        let k0 = k0 % m;
        let alpha = rat(a.0, a.1);
        let g = random(n, m, WeightRange::default(), false, seed).unwrap();
        let (s, trace) = one_shot_alpha_br(&g, k0, &alpha).unwrap();
        let bound = one_shot_stability_bound(&alpha);
        prop_assert!(deviation_report(&g, &s).within(&Threshold::Rational(bound)));
        let mut seen = vec![false; n];
        for mv in &trace.moves {
            prop_assert_eq!(mv.from, k0);
            prop_assert!(!seen[mv.player]);
            seen[mv.player] = true;
            prop_assert!(mv.new_utility >= &alpha * &mv.old_utility && mv.new_utility > mv.old_utility);
        }
        for i in 0..n {
            prop_assert_eq!(s[i] != k0, seen[i]);
        }
    }

    /// The coalition returned is improving and no candidate outside it can
    /// join without some member (or itself) failing to improve strictly.
    #[test]
    fn improving_coalition_is_a_fixed_point(n in 1usize..7, seed in any::<u64>(), code in any::<u64>()) {
        let g = random(n, 2, WeightRange::default(), false, seed).unwrap();
        let s = profile_for(n, 2, code);
        let candidates = s.coalition(0);
        let c = maximal_improving_coalition(&g, &s, &candidates, 1);
        let mut moved = s.clone();
        for &i in &c {
            prop_assert!(candidates.contains(&i));
            moved.set(i, 1);
        }
        for &i in &c {
            prop_assert!(g.utility(&moved, i) > g.utility(&s, i));
        }
        // Supersets within the candidates never improve everyone.
        for &extra in candidates.iter().filter(|i| !c.contains(i)) {
            let bigger = moved.with(extra, 1);
            let all = c.iter().chain(std::iter::once(&extra));
            prop_assert!(!all.into_iter().all(|&i| g.utility(&bigger, i) > g.utility(&s, i)));
        }
    }

    #[test]
    fn strong_two_is_strong(n in 1usize..6, seed in any::<u64>()) {
        let g = random(n, 2, WeightRange::default(), false, seed).unwrap();
        let s = strong_two(&g).unwrap();
        prop_assert!(verify_approx_strong(&g, &s, &int(1), 1 << 20, Exec::Sequential).unwrap().is_stable());
    }

    #[test]
    fn pairwise_delta_matches_value_difference(
        n in 1usize..7, m in 1usize..4, seed in any::<u64>(), code in any::<u64>(), i in 0usize..7, k in 0usize..4,
    ) {
        let (g, _) = random_cc(n, m, 4, seed).unwrap();
        let cert = cc_recover(&g).unwrap();
        let pot = PairwisePotential::new(&g, &cert).unwrap();
        let s = profile_for(n, m, code);
        let (i, k) = (i % n, k % m);
        prop_assert_eq!(pot.delta(&s, i, k), pot.value(&s.with(i, k)) - pot.value(&s));
    }

    #[test]
    fn hypergraph_delta_matches_value_difference(
        n in 2usize..6, m in 1usize..4, seed in any::<u64>(), code in any::<u64>(), i in 0usize..6, k in 0usize..4,
    ) {
        let (h, _) = random_hypergraph_cc(n, m, seed).unwrap();
        let cert = hypergraph_cc_recover(&h).unwrap();
        let pot = HypergraphPotential::new(&h, &cert).unwrap();
        let s = profile_for(n, m, code);
        let (i, k) = (i % n, k % m);
        prop_assert_eq!(pot.delta(&s, i, k), pot.value(&s.with(i, k)) - pot.value(&s));
        let du = h.utility_if(&s, i, k) - h.utility(&s, i);
        let zero = Num::from_integer(0.into());
        prop_assert_eq!(du.cmp(&zero), pot.delta(&s, i, k).cmp(&zero));
    }

    /// Recovery finds the generating influence weights up to scale within
    /// each connected component.
    #[test]
    fn cc_recovery_round_trips(n in 1usize..8, m in 1usize..4, seed in any::<u64>()) {
        let (g, gamma) = random_cc(n, m, 5, seed).unwrap();
        let cert = cc_recover(&g).unwrap();
        prop_assert!(certificate_matches(&g, &cert));
        prop_assert!(certificate_matches(&g, &PotentialCertificate::from_gamma(gamma.clone())));
        for e in g.positive_edges() {
            prop_assert_eq!(&cert.gamma[e.i] / &cert.gamma[e.j], &gamma[e.i] / &gamma[e.j]);
        }
        let cert2 = PotentialCertificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(cert2.gamma, cert.gamma);
    }

    #[test]
    fn symmetric_potential_is_exact(
        n in 1usize..7, m in 1usize..4, seed in any::<u64>(), code in any::<u64>(), i in 0usize..7, k in 0usize..4,
    ) {
        let g = random_symmetric(n, m, seed).unwrap();
        let s = profile_for(n, m, code);
        let (i, k) = (i % n, k % m);
        let t = s.with(i, k);
        prop_assert_eq!(
            g.utility(&t, i) - g.utility(&s, i),
            symmetric_potential(&g, &t) - symmetric_potential(&g, &s)
        );
    }

    #[test]
    fn dynamics_converge_on_cc_games(n in 1usize..7, m in 1usize..4, seed in any::<u64>(), code in any::<u64>()) {
        let (g, _) = random_cc(n, m, 4, seed).unwrap();
        let start = profile_for(n, m, code);
        let trace = run_dynamics(&g, &start, &Threshold::rational(int(1)), default_step_cap(n, m)).unwrap();
        prop_assert_eq!(trace.reason, Termination::Converged);
        prop_assert!(deviation_report(&g, &trace.terminal).within(&Threshold::rational(int(1))));
    }

    #[test]
    fn payments_neutralize_every_deviation(n in 1usize..6, m in 1usize..4, seed in any::<u64>(), code in any::<u64>()) {
        let g = random(n, m, WeightRange::default(), false, seed).unwrap();
        let s = profile_for(n, m, code);
        let plan = payment_stabilize(&g, &s, &int(1)).unwrap();
        prop_assert_eq!(plan.post_max_factor, Extended::one());
        prop_assert!(plan.payments.iter().all(|p| p >= &Num::from_integer(0.into())));
    }

    #[test]
    fn welfare_bound_is_monotone(a in 1618i64..=2000, da in 1i64..50, g in 1i64..40, m in 2usize..12) {
        let lo = rat(a, 1000);
        let hi = rat((a + da).min(2000), 1000);
        let gamma = Extended::Finite(int(g));
        let gamma_up = Extended::Finite(int(g + 1));
        let m = StrategyCount::Finite(m);
        let b = welfare_lower_bound(&lo, &gamma, m).unwrap();
        prop_assert!(b > Num::from_integer(0.into()) && b < int(1));
        prop_assert!(welfare_lower_bound(&hi, &gamma, m).unwrap() >= b);
        prop_assert!(welfare_lower_bound(&lo, &gamma_up, m).unwrap() <= b);
        prop_assert!(welfare_lower_bound(&lo, &gamma, StrategyCount::Infinite).unwrap() <= b);
    }

    #[test]
    fn alpha_for_r_keeps_the_bound_below_r_plus_one(p in 1i64..60, q in 1i64..12) {
        let r = int(1) + rat(p, q) - rat(1, q);
        let alpha = alpha_for_r(&r).unwrap();
        let bound = {
            let other = &r * (int(1) + int(1) / &alpha);
            if alpha >= other { alpha.clone() } else { other }
        };
        prop_assert!(bound < &r + int(1));
        // One step down the grid breaks the quadratic condition.
        let below = &alpha - rat(1, 1_000_000);
        let f = int(2) * &below - &r;
        prop_assert!(f < Num::from_integer(0.into()) || &f * &f < &r * (&r + int(4)));
    }

    #[test]
    fn lex_compare_is_antisymmetric(xs in prop::collection::vec(0i64..6, 1..6), ys in prop::collection::vec(0i64..6, 1..6)) {
        let a: Vec<Num> = xs.iter().map(|&x| int(x)).collect();
        let b: Vec<Num> = ys.iter().map(|&y| int(y)).collect();
        prop_assert_eq!(lex_compare(&a, &b), lex_compare(&b, &a).reverse());
        let mut c = a.clone();
        c.reverse();
        prop_assert_eq!(lex_compare(&a, &c), std::cmp::Ordering::Equal);
    }

    #[test]
    fn sqrt2_threshold_agrees_with_floats(p in 1i64..100_000, q in 1i64..100_000) {
        let x = rat(p, q);
        let f = to_f64(&x);
        prop_assume!((f - std::f64::consts::SQRT_2).abs() > 1e-9);
        prop_assert_eq!(Threshold::Sqrt2.admits(&Extended::Finite(x)), f <= std::f64::consts::SQRT_2);
    }

    #[test]
    fn census_is_schedule_independent(n in 1usize..6, m in 1usize..4, seed in any::<u64>()) {
        let g = random(n, m, WeightRange::default(), false, seed).unwrap();
        let run = |exec| {
            let options = CensusOptions { exec, strong: true, all_rows: true, ..CensusOptions::default() };
            equilibrium_census(&g, &rat(3, 2), options).unwrap()
        };
        prop_assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
    }
}

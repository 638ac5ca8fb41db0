mod common;

use common::*;
use lfree::bounds::{construct_large_lfree, epsilon_instance, lambda_of, lfree_interval};
use lfree::count::{count_exact, count_fptras, count_multicolour, ApproxParams};
use lfree::equation::LinearEquation;
use lfree::gadget::{build_gadget, lfree_of_independent_set, normalize_to_contain_adp};
use lfree::hypergraph::{
    enumerate_hitting_sets, to_hitting_set_instance, CountStrategy, HittingSetSearch, Hypergraph,
};
use lfree::setcore::{brute_force_count_lfree, brute_force_max_lfree, IntegerSet, SubsetOracle};
use lfree::solve;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

const SOLVER_EQS: [&str; 5] = ["sum-free", "1,1,-2=0", "1,1,-3=0", "1,-2=0", "1,1=10"];

fn coeffs(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], len)
}

fn small_set(max_len: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntegerSet> {
    prop::collection::btree_set(lo..=hi, 0..=max_len).prop_map(|s| set(&s.into_iter().collect::<Vec<_>>()))
}

fn hypergraph(max_n: usize, max_m: usize, d_max: usize) -> impl Strategy<Value = Hypergraph> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::btree_set(1..=n, 1..=d_max.min(n)), 0..=max_m)
            .prop_map(move |es| Hypergraph::new(n, es.into_iter().map(|e| e.into_iter().collect()).collect()).unwrap())
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = Hypergraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        prop::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(&(u, v), _)| vec![u, v]).collect();
            Hypergraph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triviality_matches_partition_definition(c in coeffs(2..=4), xs in prop::collection::vec(-3i64..=3, 4)) {
        let eq = LinearEquation::from_i64(&c, 0).unwrap();
        let tuple: Vec<BigInt> = xs[..c.len()].iter().map(|&x| BigInt::from(x)).collect();
        prop_assert_eq!(eq.is_trivial(&tuple).unwrap(), trivial_by_partitions(&eq, &tuple));
    }

    #[test]
    fn translation_invariant_constant_tuples_are_trivial(c in coeffs(1..=3), t in -20i64..=20) {
        let mut c = c;
        c.push(-c.iter().sum::<i64>());
        if let Ok(eq) = LinearEquation::from_i64(&c, 0) {
            prop_assert!(eq.is_translation_invariant());
            let tuple = vec![BigInt::from(t); c.len()];
            prop_assert!(eq.is_trivial(&tuple).unwrap());
        }
    }

    #[test]
    fn lfree_iff_no_nontrivial_solution(c in coeffs(2..=4), b in -4i64..=4, a in small_set(8, -6, 12)) {
        let eq = LinearEquation::from_i64(&c, b).unwrap();
        prop_assert_eq!(eq.is_l_free(&a), eq.enumerate_nontrivial_solutions(&a).is_empty());
    }

    #[test]
    fn lfree_is_antitone(i in 0..SOLVER_EQS.len(), a in small_set(10, 1, 24), mask in any::<u64>()) {
        let eq = eq(SOLVER_EQS[i]);
        let b = a.select(mask);
        if eq.is_l_free(&a) {
            prop_assert!(eq.is_l_free(&b));
        }
    }

    #[test]
    fn oracle_count_is_indicator_sum_and_max_is_last_nonzero(i in 0..SOLVER_EQS.len(), a in small_set(10, -5, 20)) {
        let eq = eq(SOLVER_EQS[i]);
        let counts = brute_lfree_counts(&eq, &a, &IntegerSet::empty());
        for (k, &c) in counts.iter().enumerate() {
            prop_assert_eq!(brute_force_count_lfree(&eq, &a, k, 20).unwrap(), BigUint::from(c));
        }
        let (size, witness) = brute_force_max_lfree(&eq, &a, 20).unwrap();
        prop_assert_eq!(Some(size), counts.iter().rposition(|&c| c > 0));
        prop_assert!(eq.is_l_free(&witness) && witness.len() == size && witness.is_subset(&a));
    }

    #[test]
    fn complement_bijection_with_hitting_sets(i in 0..SOLVER_EQS.len(), a in small_set(12, -4, 25)) {
        let eq = eq(SOLVER_EQS[i]);
        let (h, map) = to_hitting_set_instance(&eq, &a);
        let oracle = SubsetOracle::new(&eq, &a, 20).unwrap();
        for k in 0..=a.len() {
            let hits = enumerate_hitting_sets(&h, a.len() - k, &[]).unwrap();
            let mut images: Vec<IntegerSet> = hits.iter().map(|hs| map.complement_of(hs)).collect();
            prop_assert!(images.iter().all(|s| s.len() == k && eq.is_l_free(s)));
            images.sort_by(|x, y| x.as_slice().cmp(y.as_slice()));
            images.dedup();
            prop_assert_eq!(BigUint::from(images.len()), oracle.count(k));
        }
    }

    #[test]
    fn hitting_set_counts_match_brute_force(h in hypergraph(10, 8, 4), f in prop::collection::btree_set(1usize..=10, 0..=2)) {
        let forbidden: Vec<usize> = f.into_iter().filter(|&v| v <= h.n()).collect();
        for s in 0..=h.n() {
            let brute = brute_hitting_sets(&h, s, &forbidden);
            let bound = (h.d_max().max(1) as u64).saturating_pow(s as u32).saturating_mul(h.n() as u64 + 1);
            for strategy in [CountStrategy::SearchTree, CountStrategy::InclusionExclusion, CountStrategy::Components, CountStrategy::Auto] {
                let mut search = HittingSetSearch::new(&h);
                prop_assert_eq!(search.count(s, &forbidden, strategy).unwrap(), BigUint::from(brute.len()));
                if strategy == CountStrategy::SearchTree {
                    prop_assert!(search.stats().nodes <= bound, "{} nodes > {}", search.stats().nodes, bound);
                }
            }
            let listed = enumerate_hitting_sets(&h, s, &forbidden).unwrap();
            prop_assert!(listed.iter().all(|e| h.is_hitting_set(e)));
            prop_assert_eq!(&listed, &brute);
            let mut search = HittingSetSearch::new(&h);
            let found = search.decide(s).unwrap();
            prop_assert!(search.stats().nodes <= bound);
            prop_assert_eq!(found.is_some(), !brute_hitting_sets(&h, s, &[]).is_empty());
        }
    }

    #[test]
    fn normalization_keeps_size_and_adds_edge_numbers(g in graph(5), mask in any::<u64>(), which in 0..2usize) {
        let eq = eq(["sum-free", "1,2,-3=0"][which]);
        let gad = build_gadget(&eq, &g).unwrap();
        // Any subset of an L-free set is a valid input.
        let all = gad.union();
        let s = all.select(mask);
        if eq.is_l_free(&s) {
            let out = normalize_to_contain_adp(&gad, &s).unwrap();
            prop_assert!(eq.is_l_free(&out));
            prop_assert!(gad.a_doubleprime().is_subset(&out));
            prop_assert!(out.len() >= s.len());
        }
        let empty = lfree_of_independent_set(&gad, &[]).unwrap();
        prop_assert_eq!(&empty, gad.a_doubleprime());
    }

    #[test]
    fn extractor_beats_density(i in 0..3usize, z in prop::collection::btree_set(prop_oneof![-10_000i64..=-1, 1i64..=10_000], 8..=30), seed in any::<Option<u64>>()) {
        let eq = eq(["sum-free", "1,1,-3=0", "1,1,1,-1=0"][i]);
        let z = set(&z.into_iter().collect::<Vec<_>>());
        let lambda = lambda_of(&eq).unwrap().lambda;
        let out = construct_large_lfree(&eq, &z, seed).unwrap();
        prop_assert!(out.is_subset(&z) && eq.is_l_free(&out));
        prop_assert!(BigRational::from_integer(out.len().into()) > lambda * BigRational::from_integer(z.len().into()));
    }

    #[test]
    fn epsilon_instance_preserves_answer(a in small_set(8, 1, 30), i in 0..2usize, e in 0..4usize, kk in 0..9usize) {
        let eq = eq(["sum-free", "1,1,-2=0"][i]);
        let eps = [(1, 4), (1, 3), (1, 2), (2, 3)][e];
        let eps = BigRational::new(eps.0.into(), eps.1.into());
        let k = kk.min(a.len());
        prop_assume!(!a.is_empty());
        prop_assume!(BigRational::from_integer(k.into()) <= &eps * BigRational::from_integer(a.len().into()));
        let inst = epsilon_instance(&eq, &a, k, &eps, None, 20).unwrap();
        prop_assume!(inst.set.len() <= 18);
        let lhs = brute_force_count_lfree(&eq, &a, k, 20).unwrap() > BigUint::from(0u32);
        let (best, _) = brute_force_max_lfree(&eq, &inst.set, 20).unwrap();
        let need = (&eps * BigRational::from_integer(inst.set.len().into())).ceil().to_integer().to_usize().unwrap();
        prop_assert_eq!(lhs, best >= need);
    }

    #[test]
    fn solvers_agree_with_oracles(i in 0..SOLVER_EQS.len(), a in small_set(9, -3, 22), bmask in any::<u64>()) {
        let eq = eq(SOLVER_EQS[i]);
        let counts = brute_lfree_counts(&eq, &a, &IntegerSet::empty());
        let max = counts.iter().rposition(|&c| c > 0).unwrap();
        let b = a.select(bmask & 0b111_0101);
        let with_b = brute_lfree_counts(&eq, &a, &b);
        prop_assert_eq!(solve::max_lfree(&eq, &a).unwrap().size, max);
        for k in 0..=a.len() {
            let d = solve::decide(&eq, &a, k).unwrap();
            prop_assert_eq!(d.answer, counts[k] > 0);
            prop_assert_eq!(d.answer, max >= k);
            check_witness(&eq, &d, k, &IntegerSet::empty())?;
            if lambda_of(&eq).is_ok() {
                let f = solve::decide_fpt_by_k(&eq, &a, k).unwrap();
                prop_assert_eq!(f.answer, counts[k] > 0);
                check_witness(&eq, &f, k, &IntegerSet::empty())?;
            }
            if eq.arity() == 2 {
                let t = solve::decide_two_variable(&eq, &a, k).unwrap();
                prop_assert_eq!(t.answer, counts[k] > 0);
                check_witness(&eq, &t, k, &IntegerSet::empty())?;
            }
            let x = solve::decide_extension(&eq, &a, &b, k).unwrap();
            prop_assert_eq!(x.answer, with_b[k] > 0);
            check_witness(&eq, &x, k, &b)?;
            if eq.arity() == 3 && lambda_of(&eq).is_ok() {
                let y = solve::extension_fpt_by_k(&eq, &a, &b, k).unwrap();
                prop_assert_eq!(y.answer, x.answer);
                check_witness(&eq, &y, k, &b)?;
            }
            let c = count_exact(&eq, &a, k, &b).unwrap();
            prop_assert_eq!(c.exact_value().unwrap(), &BigUint::from(with_b[k]));
        }
    }

    #[test]
    fn multicolour_matches_transversals(
        parts in prop::collection::vec(prop::collection::btree_set(1i64..=40, 0..=4), 0..=3),
        i in 0..3usize,
    ) {
        let eq = eq(["sum-free", "1,1,-2=0", "1,1,-3=0"][i]);
        let mut seen = std::collections::BTreeSet::new();
        let parts: Vec<IntegerSet> = parts
            .into_iter()
            .map(|p| set(&p.into_iter().filter(|x| seen.insert(*x)).collect::<Vec<_>>()))
            .collect();
        let got = count_multicolour(&eq, &parts).unwrap();
        prop_assert_eq!(got.exact_value().unwrap(), &BigUint::from(brute_colourful(&eq, &parts)));
    }
}

fn check_witness(eq: &LinearEquation, out: &solve::SolveOutcome, k: usize, b: &IntegerSet) -> Result<(), TestCaseError> {
    match &out.witness {
        Some(w) => {
            prop_assert!(out.answer);
            prop_assert_eq!(w.len(), k);
            prop_assert!(eq.is_l_free(w));
            prop_assert!(b.is_subset(w));
        }
        None => prop_assert!(!out.answer),
    }
    Ok(())
}

#[test]
fn interval_is_lfree_up_to_200() {
    for text in ["sum-free", "1,1,-3=0", "1,1,1,-1=0", "1,-2=0", "2,3,-1=0"] {
        let eq = eq(text);
        for n in 1..=200u64 {
            let i = lfree_interval(&eq, n).unwrap();
            assert!(eq.is_l_free(&i), "{text} n={n}");
        }
    }
}

#[test]
fn count_exact_matches_oracle_on_intervals() {
    for text in ["sum-free", "1,1,-2=0", "1,1,-3=0"] {
        let eq = eq(text);
        for n in 0..=12u64 {
            let a = IntegerSet::interval(n);
            for k in 0..=a.len() {
                assert_eq!(
                    count_exact(&eq, &a, k, &IntegerSet::empty()).unwrap().exact_value().unwrap(),
                    &brute_force_count_lfree(&eq, &a, k, 20).unwrap(),
                    "{text} n={n} k={k}"
                );
            }
        }
    }
}

#[test]
fn sampler_mean_concentrates() {
    let eq = LinearEquation::sum_free();
    let mut r = rng(11);
    for _ in 0..3 {
        let a = random_set(&mut r, 12, 1, 30);
        let n = count_exact(&eq, &a, 3, &IntegerSet::empty()).unwrap().as_rational().to_f64().unwrap();
        let eps = BigRational::new(1.into(), 4.into());
        let delta = BigRational::new(1.into(), 10.into());
        let mean: f64 = (0..20)
            .map(|seed| {
                let p = ApproxParams::new(eps.clone(), delta.clone(), seed).unwrap().with_samples(100_000);
                count_fptras(&eq, &a, 3, &p).unwrap().as_rational().to_f64().unwrap()
            })
            .sum::<f64>()
            / 20.0;
        assert!((mean - n).abs() <= 0.05 * n, "mean {mean} vs exact {n} on {a}");
    }
}

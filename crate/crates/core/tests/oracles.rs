//! Library results compared against brute-force oracles from `common`.

mod common;

use common::*;
use hyperbasis::freealg::{free_semigroup, is_associative, search_models, FreeConfig};
use hyperbasis::hyper::builtin;
use hyperbasis::rewrite::{
    check_proof, derive_with, one_step_rewrites, Budget, Outcome, Strategy, WordIdentity,
};
use hyperbasis::term::{left_comb, parse_identity, Identity};
use hyperbasis::typesys::{lower_covers, type_leq};
use hyperbasis::witness::{instance_census, t_family, two_op_type};
use hyperbasis::words::{square_factors, ternary_squarefree, thue_morse};
use rand::Rng;
use rayon::prelude::*;

#[test]
fn type_order_matches_cover_closure() {
    let types = small_types();
    for s in &types {
        let closure = below(s);
        for t in &types {
            let mut key = t.arities();
            key.sort_unstable_by(|a, b| b.cmp(a));
            assert_eq!(type_leq(t, s), closure.contains(&key), "{t:?} vs {s:?}");
        }
    }
}

#[test]
fn lower_covers_are_strictly_below() {
    for t in small_types() {
        for c in lower_covers(&t) {
            assert!(type_leq(&c, &t) && !type_leq(&t, &c));
        }
    }
}

#[test]
fn squares_match_naive_scan() {
    let mut r = rng(11);
    for _ in 0..300 {
        let len = r.gen_range(0..40);
        let k = r.gen_range(1..=3u8);
        let w: Vec<u8> = (0..len).map(|_| r.gen_range(0..k)).collect();
        assert_eq!(square_factors(&w), naive_squares(&w));
    }
    assert_eq!(
        square_factors(&thue_morse(200)),
        naive_squares(&thue_morse(200))
    );
    assert!(naive_squares(ternary_squarefree(600).as_bytes()).is_empty());
}

#[test]
fn census_matches_naive_matcher() {
    let tau = two_op_type();
    let e = builtin("hyperassociativity", &[]).unwrap();
    let mut r = rng(5);
    for i in 0..150 {
        let ops = r.gen_range(0..=12);
        let host = random_term(&mut r, &tau, 3, ops);
        let proj = i % 3 == 0;
        let fast: Vec<_> = instance_census(&host, &e, &tau, 2, proj)
            .into_iter()
            .map(|c| (c.position, c.side, c.hypersubstitution))
            .collect();
        assert_eq!(fast, naive_census(&host, &e, &tau, 2, proj), "host {host}");
    }
    // a tower host too
    let host = t_family(1, 2, true).unwrap();
    let fast: Vec<_> = instance_census(&host, &e, &tau, 2, true)
        .into_iter()
        .map(|c| (c.position, c.side, c.hypersubstitution))
        .collect();
    assert_eq!(fast, naive_census(&host, &e, &tau, 2, true));
}

#[test]
fn model_search_matches_brute_force() {
    let cases: Vec<Vec<WordIdentity>> = vec![
        vec![],
        vec![word_law("xx=xxxx")],
        vec![word_law("xyxzxyx=xyzyx")],
        vec![word_law("xy=yx")],
        vec![word_law("xxyyz=xxyxxyz"), word_law("xyyzz=xyzzyzz")],
        vec![word_law("xx=x")],
    ];
    for laws in &cases {
        for n in 1..=3 {
            let mut fast = search_models(laws, n).unwrap();
            let mut slow = brute_force_models(laws, n);
            fast.sort();
            slow.sort();
            assert_eq!(fast, slow, "{laws:?} at size {n}");
        }
    }
}

#[test]
fn five_law_table_is_an_associative_model() {
    let laws: Vec<WordIdentity> = ["xyxzxyx=xyzyx", "xx=xxxx", "xxyyz=xxyxxyz", "xyyzz=xyzzyzz"]
        .iter()
        .map(|s| word_law(s))
        .collect();
    let r = free_semigroup(&laws, 2, &FreeConfig::default()).unwrap();
    assert_eq!(r.cardinality(), Some(94));
    let t = r.multiplication.as_ref().unwrap();
    let cayley = t.cayley();
    // exhaustive triple check, written out here rather than trusting the table's own
    let n = cayley.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                assert_eq!(cayley[cayley[a][b]][c], cayley[a][cayley[b][c]]);
            }
        }
    }
    assert!(is_associative(&cayley));
    let m: Vec<Vec<u8>> = cayley
        .iter()
        .map(|row| row.iter().map(|&x| x as u8).collect())
        .collect();
    for law in &laws {
        let vars = law.lhs.iter().chain(&law.rhs).copied().max().unwrap() as usize;
        for a in assignments(n, vars) {
            assert_eq!(eval_word(&m, &law.lhs, &a), eval_word(&m, &law.rhs, &a));
        }
    }
}

#[test]
fn word_route_and_tree_route_agree_on_xxyyz_steps() {
    let g = semigroup();
    let f = g.symbols()[0].clone();
    let law = word_law("xxyyz=xxyxxyz");
    let axioms = vec![
        parse_identity("(xy)z = x(yz)", &g).unwrap(),
        parse_identity("xxyyz = xxyxxyz", &g).unwrap(),
    ];
    let mut goals = Vec::new();
    for len in 1..=8u32 {
        for code in 0..(1u32 << len) {
            let w: Vec<u32> = (0..len).map(|i| 1 + ((code >> i) & 1)).collect();
            for (v, _) in one_step_rewrites(std::slice::from_ref(&law), &w, &[1, 2], 8) {
                if v != w {
                    goals.push((w.clone(), v));
                }
            }
        }
    }
    assert!(!goals.is_empty());
    let results: Vec<(bool, bool)> = goals
        .par_iter()
        .map(|(u, v)| {
            let goal = Identity::new(left_comb(&f, u), left_comb(&f, v));
            let budget = Budget::for_goal(&goal);
            let run = |s| match derive_with(&axioms, &goal, &budget, s) {
                Outcome::Derived(p) => {
                    assert!(check_proof(&axioms, &goal, &p));
                    true
                }
                Outcome::Unknown { .. } => false,
            };
            (run(Strategy::Auto), run(Strategy::Tree))
        })
        .collect();
    for ((u, v), (a, t)) in goals.iter().zip(&results) {
        assert_eq!(a, t, "{u:?} = {v:?}");
        assert!(a, "{u:?} = {v:?} not derived");
    }
}

//! Property tests for the invariants of each module.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use hyperbasis::freealg::{
    closure, free_semigroup, paper_reductions, search_models, FreeConfig, GenWord,
};
use hyperbasis::hyper::{builtin, expand, ExpansionMode};
use hyperbasis::rewrite::{
    check_proof, check_word_proof, derive_bounded, word_derive_bounded, Budget, Outcome,
    WordIdentity,
};
use hyperbasis::term::{
    apply_hypersubstitution, enumerate_terms, format_term, parse_term, substitute,
    FunctionVariable, HyperTerm, Hypersubstitution, Identity, Subst, Term,
};
use hyperbasis::typesys::{lower_covers, parse_type, type_leq, Symbol};
use hyperbasis::witness::{dual, instance_census, t_family, two_op_type, CIRC, DOT};
use hyperbasis::words::{is_square_free, ternary_squarefree, thue_morse, word_to_unary_term};
use proptest::prelude::*;

fn arb_term(sig: &'static str, vars: u32, max_ops: usize) -> impl Strategy<Value = Term> {
    (any::<u64>(), 0..=max_ops).prop_map(move |(seed, ops)| {
        let tau = parse_type(sig).unwrap();
        random_term(&mut rng(seed), &tau, vars, ops)
    })
}

fn arb_word(k: u8, max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..k, 1..=max_len)
}

// typesys

#[test]
fn type_order_is_a_partial_order() {
    let types = small_types();
    for a in &types {
        assert!(type_leq(a, a));
        for b in &types {
            if type_leq(a, b) && type_leq(b, a) {
                assert_eq!(a.arities(), b.arities());
            }
            for c in &types {
                if type_leq(a, b) && type_leq(b, c) {
                    assert!(type_leq(a, c));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covers_are_strict(arities in prop::collection::vec(1usize..=4, 1..=4)) {
        let t = hyperbasis::typesys::SimilarityType::from_arities(&arities).unwrap();
        for c in lower_covers(&t) {
            prop_assert!(type_leq(&c, &t));
            prop_assert!(!type_leq(&t, &c));
        }
    }

    // term

    #[test]
    fn format_parse_round_trip(t in arb_term("f:2", 4, 10)) {
        let g = semigroup();
        prop_assert_eq!(parse_term(&format_term(&t, &g), &g).unwrap(), t);
    }

    #[test]
    fn format_parse_round_trip_mixed(t in arb_term("f:2,g:1,h:3", 3, 8)) {
        let g = parse_type("f:2,g:1,h:3").unwrap();
        prop_assert_eq!(parse_term(&format_term(&t, &g), &g).unwrap(), t);
    }

    #[test]
    fn substitution_op_count(t in arb_term("f:2,g:1", 3, 8), seed in any::<u64>()) {
        let tau = parse_type("f:2,g:1").unwrap();
        let mut r = rng(seed);
        let images: Subst = (1..=3).map(|v| {
            let ops = rand::Rng::gen_range(&mut r, 0..=4);
            (v, random_term(&mut r, &tau, 3, ops))
        }).collect();
        let out = substitute(&t, &images).unwrap();
        fn occurrences(t: &Term, out: &mut Vec<u32>) {
            match t {
                Term::Var(v) => out.push(*v),
                Term::App(_, cs) => cs.iter().for_each(|c| occurrences(c, out)),
            }
        }
        let mut occ = Vec::new();
        occurrences(&t, &mut occ);
        let extra: usize = occ.iter().map(|v| images[v].op_count()).sum();
        prop_assert_eq!(out.op_count(), t.op_count() + extra);
    }

    #[test]
    fn own_symbol_hypersubstitution_is_identity(t in arb_term("f:2", 3, 10)) {
        let f = semigroup().symbols()[0].clone();
        let h = HyperTerm::symbols_as_variables(&t);
        let mut s = Hypersubstitution::new();
        let fv = FunctionVariable::new(&f.name, 2);
        s.insert(fv, Term::App(f, vec![Term::Var(1), Term::Var(2)])).unwrap();
        prop_assert_eq!(apply_hypersubstitution(&h, &s).unwrap(), t);
    }
}

#[test]
fn enumeration_is_duplicate_free_and_downward_closed() {
    for sig in ["f:2", "f:2,g:1", "f:1,g:1,h:1", "f:3"] {
        let tau = parse_type(sig).unwrap();
        for n in 1..=3 {
            let all = enumerate_terms(&tau, n, 4, true);
            let set: BTreeSet<&Term> = all.iter().collect();
            assert_eq!(set.len(), all.len());
            assert!(all.windows(2).all(|w| w[0].op_count() <= w[1].op_count()));
            let smaller: BTreeSet<Term> = enumerate_terms(&tau, n, 3, true).into_iter().collect();
            let expected: BTreeSet<Term> =
                all.iter().filter(|t| t.op_count() <= 3).cloned().collect();
            assert_eq!(smaller, expected);
            // every proper subterm is also enumerated
            for t in &all {
                if let Term::App(_, cs) = t {
                    assert!(cs.iter().all(|c| set.contains(c)));
                }
            }
        }
    }
}

// hyper

fn holds_in_semilattice(e: &Identity) -> bool {
    let table = vec![vec![0u8, 1], vec![1, 1]];
    let n = e.lhs.max_var().max(e.rhs.max_var()) as usize;
    assignments(2, n)
        .iter()
        .all(|a| eval_binary(&table, &e.lhs, a) == eval_binary(&table, &e.rhs, a))
}

#[test]
fn expansion_is_sound_monotone_and_deduplicated() {
    let g = semigroup();
    let e = builtin("hyperassociativity", &[]).unwrap();
    let mut previous: Option<BTreeSet<Identity>> = None;
    for b in 0..=3 {
        let taylor = expand(&e, &g, &ExpansionMode::Taylor, b).unwrap();
        assert!(taylor.iter().all(holds_in_semilattice));
        let set: BTreeSet<Identity> = taylor.iter().cloned().collect();
        assert_eq!(set.len(), taylor.len());
        assert!(taylor
            .iter()
            .all(|i| i.canonical() == *i && !i.is_reflexive()));
        let pre: BTreeSet<Identity> = expand(&e, &g, &ExpansionMode::Prehyper, b)
            .unwrap()
            .into_iter()
            .collect();
        assert!(pre.is_subset(&set));
        if let Some(p) = &previous {
            assert!(p.is_subset(&set));
        }
        previous = Some(set);
    }
}

#[test]
fn mode_containment_for_other_identities() {
    for (name, sig) in [
        ("hypermediality", "f:2"),
        ("hypercommutativity", "f:2,g:1"),
        ("hyperidempotency", "f:1,g:1"),
    ] {
        let tau = parse_type(sig).unwrap();
        let e = builtin(name, &[]).unwrap();
        for b in 0..=2 {
            let t: BTreeSet<Identity> = expand(&e, &tau, &ExpansionMode::Taylor, b)
                .unwrap()
                .into_iter()
                .collect();
            let p: BTreeSet<Identity> = expand(&e, &tau, &ExpansionMode::Prehyper, b)
                .unwrap()
                .into_iter()
                .collect();
            assert!(p.is_subset(&t), "{name} at {b}");
        }
    }
}

// rewrite

fn models_of(laws: &[WordIdentity]) -> Vec<Vec<Vec<u8>>> {
    (1..=3)
        .flat_map(|n| search_models(laws, n).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derived_proofs_check_and_are_sound(t in arb_term("f:2", 2, 3)) {
        let axioms = five_laws();
        let (l, r) = hyperbasis::witness::assoc_instance(&t).unwrap();
        let goal = Identity::new(l, r);
        let budget = Budget::for_goal(&goal);
        let out = derive_bounded(&axioms, &goal, &budget);
        if let Outcome::Derived(p) = &out {
            prop_assert!(check_proof(&axioms, &goal, p));
            let laws: Vec<WordIdentity> = ["xyxzxyx=xyzyx", "xx=xxxx", "xxyyz=xxyxxyz", "xyyzz=xyzzyzz"].iter().map(|s| word_law(s)).collect();
            for m in models_of(&laws) {
                for a in assignments(m.len(), 3) {
                    prop_assert_eq!(eval_binary(&m, &goal.lhs, &a), eval_binary(&m, &goal.rhs, &a));
                }
            }
        }
        // the reversed goal succeeds exactly when the forward one does
        let back = derive_bounded(&axioms, &goal.flipped(), &budget);
        prop_assert_eq!(out.is_derived(), back.is_derived());
        if let Outcome::Derived(p) = &back {
            prop_assert!(check_proof(&axioms, &goal.flipped(), p));
        }
    }

    #[test]
    fn word_derivation_symmetry(u in arb_word(2, 7), v in arb_word(2, 7)) {
        let axioms = [word_law("xxyyz=xxyxxyz")];
        let to_vars = |w: &[u8]| w.iter().map(|&c| c as u32 + 1).collect::<Vec<_>>();
        let goal = WordIdentity::new(to_vars(&u), to_vars(&v));
        let budget = Budget::new(10, 20_000, 20);
        let a = word_derive_bounded(&axioms, &goal, &budget);
        let b = word_derive_bounded(&axioms, &goal.flipped(), &budget);
        prop_assert_eq!(a.is_derived(), b.is_derived());
        if let Outcome::Derived(p) = &a {
            prop_assert!(check_word_proof(&axioms, &goal, p));
        }
        if let Outcome::Derived(p) = &b {
            prop_assert!(check_word_proof(&axioms, &goal.flipped(), p));
        }
    }
}

// freealg

#[test]
fn merges_are_sound_in_small_models() {
    let cases = [
        vec![word_law("xyxzxyx=xyzyx")],
        vec![word_law("xx=xxxx")],
        vec![word_law("xxyyz=xxyxxyz"), word_law("xyyzz=xyzzyzz")],
    ];
    for laws in &cases {
        let models = models_of(laws);
        let p = closure(laws, 2, 7, FreeConfig::DEFAULT_MAX_WORDS).unwrap();
        let mut classes: BTreeMap<GenWord, Vec<Vec<u8>>> = BTreeMap::new();
        for len in 1..=7u32 {
            for code in 0..(1u32 << len) {
                let w: Vec<u8> = (0..len).map(|i| ((code >> i) & 1) as u8).collect();
                classes
                    .entry(p.representative(&w).unwrap())
                    .or_default()
                    .push(w);
            }
        }
        for members in classes.values() {
            for m in &models {
                for gens in assignments(m.len(), 2) {
                    let v = eval_gen_word(m, &members[0], &gens);
                    assert!(members.iter().all(|w| eval_gen_word(m, w, &gens) == v));
                }
            }
        }
    }
}

#[test]
fn merges_persist_when_the_bound_grows() {
    let laws = [word_law("xxyyz=xxyxxyz")];
    for l in 7..=11 {
        let small = closure(&laws, 2, l, FreeConfig::DEFAULT_MAX_WORDS).unwrap();
        let big = closure(&laws, 2, l + 1, FreeConfig::DEFAULT_MAX_WORDS).unwrap();
        for len in 1..=l as u32 {
            for code in 0..(1u32 << len) {
                let w: Vec<u8> = (0..len).map(|i| ((code >> i) & 1) as u8).collect();
                let rep = small.representative(&w).unwrap();
                assert_eq!(big.representative(&w), big.representative(&rep.0));
            }
        }
    }
}

#[test]
fn stable_counts_reproduce_at_larger_bounds() {
    let five: Vec<WordIdentity> = ["xyxzxyx=xyzyx", "xx=xxxx", "xxyyz=xxyxxyz", "xyyzz=xyzzyzz"]
        .iter()
        .map(|s| word_law(s))
        .collect();
    for (laws, n) in [(five, 94), (vec![word_law("xyxzxyx=xyzyx")], 298)] {
        let r = free_semigroup(&laws, 2, &FreeConfig::default()).unwrap();
        assert_eq!(r.cardinality(), Some(n));
        let again = free_semigroup(
            &laws,
            2,
            &FreeConfig {
                bound: Some(r.bound + 2),
                ..FreeConfig::default()
            },
        )
        .unwrap();
        assert_eq!(again.cardinality(), Some(n));
        assert_eq!(again.classes, r.classes);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reductions_are_certified(w in arb_word(2, 14)) {
        let r = paper_reductions(&GenWord(w.clone())).unwrap();
        prop_assert!(r.output.len() <= w.len());
        let law = [word_law("xxyyz=xxyxxyz")];
        let goal = WordIdentity::new(GenWord(w).to_vars(), r.output.to_vars());
        prop_assert!(check_word_proof(&law, &goal, &r.proof));
    }
}

// words

#[test]
fn thue_morse_recurrences_and_overlap_freeness() {
    let t = thue_morse(1000);
    for i in 0..500 {
        assert_eq!(t[2 * i], t[i]);
        assert_eq!(t[2 * i + 1], 1 - t[i]);
    }
    // no factor a v a v a
    for s in 0..t.len() {
        for p in 1..=(t.len() - s - 1) / 2 {
            let overlap = (0..=p).all(|i| t[s + i] == t[s + p + i]) && s + 2 * p < t.len();
            assert!(!overlap, "overlap at {s} with period {p}");
        }
    }
}

#[test]
fn ternary_prefixes_are_square_free() {
    let w = ternary_squarefree(2000);
    assert!(naive_squares(w.as_bytes()).is_empty());
    for n in [0, 1, 7, 50, 333, 1999] {
        assert_eq!(ternary_squarefree(n), w[..n]);
        assert!(is_square_free(&w.as_bytes()[..n]));
    }
}

fn letter_map() -> BTreeMap<char, Symbol> {
    [
        ('a', Symbol::new("f", 1)),
        ('b', Symbol::new("g", 1)),
        ('c', Symbol::new("h", 1)),
    ]
    .into()
}

proptest! {
    #[test]
    fn unary_bridge_is_injective(u in "[abc]{0,10}", v in "[abc]{0,10}") {
        let m = letter_map();
        let (s, t) = (word_to_unary_term(&u, &m).unwrap(), word_to_unary_term(&v, &m).unwrap());
        prop_assert_eq!(u == v, s == t);
        prop_assert_eq!(s.op_count(), u.len());
    }

    #[test]
    fn unary_bridge_is_a_homomorphism(u in "[abc]{0,10}", v in "[abc]{0,10}") {
        let m = letter_map();
        let uv = word_to_unary_term(&format!("{u}{v}"), &m).unwrap();
        let inner = word_to_unary_term(&v, &m).unwrap();
        let outer = substitute(&word_to_unary_term(&u, &m).unwrap(), &Subst::from([(1, inner)])).unwrap();
        prop_assert_eq!(uv, outer);
    }

    // witness

    #[test]
    fn dual_is_an_involution(t in arb_term("dot:2,circ:2", 3, 20)) {
        prop_assert_eq!(dual(&dual(&t).unwrap()).unwrap(), t);
    }

    #[test]
    fn projections_only_add_census_entries(t in arb_term("dot:2,circ:2", 3, 10)) {
        let tau = two_op_type();
        let e = builtin("hyperassociativity", &[]).unwrap();
        let without: BTreeSet<_> = instance_census(&t, &e, &tau, 2, false).into_iter().map(|c| (c.position, c.side, c.hypersubstitution)).collect();
        let with: BTreeSet<_> = instance_census(&t, &e, &tau, 2, true).into_iter().map(|c| (c.position, c.side, c.hypersubstitution)).collect();
        prop_assert!(without.is_subset(&with));
    }
}

#[test]
fn tower_sizes_and_block_alternation() {
    for n in 0..=6usize {
        for k in 0..4 {
            for starred in [false, true] {
                let t = t_family(n, k, starred).unwrap();
                assert_eq!(t.op_count(), 2 * 3usize.pow(n as u32) - 1);
                assert_eq!(t.leaf_count(), 2 * 3usize.pow(n as u32));
                if (1..=4).contains(&n) {
                    let (top, inner) = if starred { (CIRC, DOT) } else { (DOT, CIRC) };
                    let Term::App(root, cs) = &t else { panic!() };
                    assert_eq!(&*root.name, top);
                    // a · (b · c) with a, b, c from the level below
                    let Term::App(s, gs) = &cs[1] else { panic!() };
                    assert_eq!(&*s.name, top);
                    let blocks = [&cs[0], &gs[0], &gs[1]];
                    assert!(blocks
                        .iter()
                        .all(|b| b.root_symbol().map(|s| &*s.name) == Some(inner)));
                }
            }
        }
    }
}

#[test]
fn lone_application_of_projections_hits_every_variable() {
    // F(x1, F(x2, x3)) with F a projection matches any subterm, variables included
    let tau = two_op_type();
    let e = builtin("hyperassociativity", &[]).unwrap();
    let host = t_family(1, 0, false).unwrap();
    let census = instance_census(&host, &e, &tau, 0, true);
    let positions: BTreeSet<_> = census.iter().map(|c| c.position.clone()).collect();
    for (pos, sub) in hyperbasis::term::subterm_occurrences(&host) {
        if sub.is_var() {
            assert!(positions.contains(&pos));
        }
    }
}

//! Test-side oracles and generators, written independently of the library's
//! algorithms.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use hyperbasis::hyper::Hyperidentity;
use hyperbasis::rewrite::WordIdentity;
use hyperbasis::term::{
    apply_hypersubstitution, enumerate_terms, parse_identity, FunctionVariable, HyperTerm,
    Hypersubstitution, Identity, Position, Subst, Term,
};
use hyperbasis::typesys::{lower_covers, parse_type, SimilarityType};
use hyperbasis::witness::Side;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn semigroup() -> SimilarityType {
    parse_type("f:2").unwrap()
}

pub const FIVE_LAWS: [&str; 5] = [
    "(xy)z = x(yz)",
    "xx = xxxx",
    "xyxzxyx = xyzyx",
    "xxyyz = xxyxxyz",
    "xyyzz = xyzzyzz",
];

pub fn five_laws() -> Vec<Identity> {
    let g = semigroup();
    FIVE_LAWS
        .iter()
        .map(|s| parse_identity(s, &g).unwrap())
        .collect()
}

pub fn word_law(s: &str) -> WordIdentity {
    WordIdentity::parse(s).unwrap()
}

/// A uniformly shaped random term with exactly `ops` operation symbols.
pub fn random_term(r: &mut StdRng, sig: &SimilarityType, vars: u32, ops: usize) -> Term {
    if ops == 0 {
        return Term::Var(r.gen_range(1..=vars));
    }
    let syms = sig.symbols();
    let f = syms[r.gen_range(0..syms.len())].clone();
    let mut budget = vec![0usize; f.arity];
    for _ in 0..ops - 1 {
        let i = r.gen_range(0..f.arity);
        budget[i] += 1;
    }
    let children = budget
        .into_iter()
        .map(|b| random_term(r, sig, vars, b))
        .collect();
    Term::App(f, children)
}

/// Downward closure of `tau` under repeated lower covers.
pub fn below(tau: &SimilarityType) -> BTreeSet<Vec<usize>> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([tau.clone()]);
    while let Some(t) = queue.pop_front() {
        let mut key = t.arities();
        key.sort_unstable_by(|a, b| b.cmp(a));
        if !seen.insert(key) {
            continue;
        }
        queue.extend(lower_covers(&t));
    }
    seen
}

/// All types with 1..=3 symbols and arities 1..=3, as descending arity lists.
pub fn small_types() -> Vec<SimilarityType> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let mut a = vec![1usize; n];
        loop {
            if a.windows(2).all(|w| w[0] >= w[1]) {
                out.push(SimilarityType::from_arities(&a).unwrap());
            }
            let mut j = n;
            while j > 0 && a[j - 1] == 3 {
                a[j - 1] = 1;
                j -= 1;
            }
            if j == 0 {
                break;
            }
            a[j - 1] += 1;
        }
    }
    out
}

/// Every (start, root length) with `w[s..s+p] == w[s+p..s+2p]`, by brute force.
pub fn naive_squares<T: PartialEq>(w: &[T]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in 0..w.len() {
        for p in 1..=(w.len() - s) / 2 {
            if w[s..s + p] == w[s + p..s + 2 * p] {
                out.push((s, p));
            }
        }
    }
    out.sort_unstable();
    out
}

/// First-order matching written directly: does `pattern` instantiate to `t`?
pub fn matches(pattern: &Term, t: &Term, sub: &mut Subst) -> bool {
    match pattern {
        Term::Var(i) => match sub.get(i) {
            Some(b) => b == t,
            None => {
                sub.insert(*i, t.clone());
                true
            }
        },
        Term::App(f, ps) => match t {
            Term::App(g, ts) if f == g => ps.iter().zip(ts).all(|(p, s)| matches(p, s, sub)),
            _ => false,
        },
    }
}

fn function_variables_of(h: &HyperTerm, out: &mut BTreeSet<FunctionVariable>) {
    match h {
        HyperTerm::Var(_) => {}
        HyperTerm::App(_, cs) => cs.iter().for_each(|c| function_variables_of(c, out)),
        HyperTerm::Fun(fv, cs) => {
            out.insert(fv.clone());
            cs.iter().for_each(|c| function_variables_of(c, out));
        }
    }
}

fn preorder(t: &Term, pos: &mut Position, out: &mut Vec<(Position, Term)>) {
    out.push((pos.clone(), t.clone()));
    if let Term::App(_, cs) = t {
        for (i, c) in cs.iter().enumerate() {
            pos.push(i);
            preorder(c, pos, out);
            pos.pop();
        }
    }
}

/// Census by generating every bounded instance of each side and trying it
/// against every subterm.
pub fn naive_census(
    host: &Term,
    e: &Hyperidentity,
    tau: &SimilarityType,
    max_ops: usize,
    include_projections: bool,
) -> Vec<(Position, Side, Hypersubstitution)> {
    let mut subterms = Vec::new();
    preorder(host, &mut Vec::new(), &mut subterms);
    let mut sides = Vec::new();
    for (side, h) in [(Side::L, &e.lhs), (Side::R, &e.rhs)] {
        let mut fvs = BTreeSet::new();
        function_variables_of(h, &mut fvs);
        let fvs: Vec<FunctionVariable> = fvs.into_iter().collect();
        let pools: Vec<Vec<Term>> = fvs
            .iter()
            .map(|fv| enumerate_terms(tau, fv.arity as u32, max_ops, include_projections))
            .collect();
        let mut all: Vec<Hypersubstitution> = vec![Hypersubstitution::new()];
        for (fv, pool) in fvs.iter().zip(&pools) {
            all = all
                .into_iter()
                .flat_map(|s| {
                    pool.iter().map(move |t| {
                        let mut s2 = s.clone();
                        s2.0.insert(fv.clone(), t.clone());
                        s2
                    })
                })
                .collect();
        }
        let instances: Vec<(Hypersubstitution, Term)> = all
            .into_iter()
            .map(|s| {
                let t = apply_hypersubstitution(h, &s).unwrap();
                (s, t)
            })
            .collect();
        sides.push((side, instances));
    }
    let mut out = Vec::new();
    for (pos, sub) in &subterms {
        for (side, instances) in &sides {
            for (s, inst) in instances {
                if matches(inst, sub, &mut Subst::new()) {
                    out.push((pos.clone(), *side, s.clone()));
                }
            }
        }
    }
    out
}

/// Value of a term over a single binary operation given by `table`.
pub fn eval_binary(table: &[Vec<u8>], t: &Term, assignment: &[u8]) -> u8 {
    match t {
        Term::Var(i) => assignment[*i as usize - 1],
        Term::App(_, cs) => {
            let a = eval_binary(table, &cs[0], assignment);
            let b = eval_binary(table, &cs[1], assignment);
            table[a as usize][b as usize]
        }
    }
}

/// Every assignment of `vars` variables into `0..n`.
pub fn assignments(n: usize, vars: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..vars {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..n as u8).map(move |v| {
                    let mut b = a.clone();
                    b.push(v);
                    b
                })
            })
            .collect();
    }
    out
}

/// All associative tables of size `n` satisfying the word laws, by trying
/// every table.
pub fn brute_force_models(laws: &[WordIdentity], n: usize) -> Vec<Vec<Vec<u8>>> {
    let cells = n * n;
    let total = n.pow(cells as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut flat = vec![0u8; cells];
        for slot in flat.iter_mut().rev() {
            *slot = (c % n) as u8;
            c /= n;
        }
        let t: Vec<Vec<u8>> = flat.chunks(n).map(|r| r.to_vec()).collect();
        let assoc = (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|d| t[t[a][b] as usize][d] == t[a][t[b][d] as usize]))
        });
        if !assoc {
            continue;
        }
        let ok = laws.iter().all(|e| {
            let vars = e.lhs.iter().chain(&e.rhs).copied().max().unwrap() as usize;
            assignments(n, vars)
                .iter()
                .all(|a| eval_word(&t, &e.lhs, a) == eval_word(&t, &e.rhs, a))
        });
        if ok {
            out.push(t);
        }
    }
    out
}

pub fn eval_word(t: &[Vec<u8>], w: &[u32], a: &[u8]) -> u8 {
    let mut acc = a[w[0] as usize - 1];
    for &v in &w[1..] {
        acc = t[acc as usize][a[v as usize - 1] as usize];
    }
    acc
}

/// Value of a generator word (letters 0, 1, …) under an assignment of the
/// generators.
pub fn eval_gen_word(t: &[Vec<u8>], w: &[u8], gens: &[u8]) -> u8 {
    let mut acc = gens[w[0] as usize];
    for &g in &w[1..] {
        acc = t[acc as usize][gens[g as usize] as usize];
    }
    acc
}

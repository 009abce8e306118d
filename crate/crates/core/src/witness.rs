//! Alternating towers of terms over two binary operations, and censuses of
//! small hyperidentity instances inside a host term.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyper::Hyperidentity;
use crate::term::{
    enumerate_terms, substitute, subterm_occurrences, FunctionVariable, HyperTerm,
    Hypersubstitution, Position, Subst, Term,
};
use crate::typesys::{SimilarityType, Symbol};

pub const DOT: &str = "dot";
pub const CIRC: &str = "circ";

pub fn dot() -> Symbol {
    Symbol::new(DOT, 2)
}

pub fn circ() -> Symbol {
    Symbol::new(CIRC, 2)
}

/// The type with the two binary symbols `dot` (·) and `circ` (∘).
pub fn two_op_type() -> SimilarityType {
    SimilarityType::new(vec![dot(), circ()]).expect("two distinct binary symbols")
}

/// Index triples combining level `n` terms into level `n + 1`.
const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// The level `n` tower term of index `k`; the starred family is rooted at ∘.
pub fn t_family(n: usize, k: usize, starred: bool) -> Result<Term> {
    if k > 3 {
        return Err(Error::BadParam(format!("tower index {k} is not in 0..=3")));
    }
    Ok(t_level(n, starred).swap_remove(k))
}

/// All four terms of level `n`.
pub fn t_level(n: usize, starred: bool) -> Vec<Term> {
    let (x, y) = (Term::Var(1), Term::Var(2));
    let base = |op: Symbol| -> Vec<Term> {
        [(&x, &x), (&x, &y), (&y, &x), (&y, &y)]
            .into_iter()
            .map(|(a, b)| Term::App(op.clone(), vec![a.clone(), b.clone()]))
            .collect()
    };
    let mut plain = base(dot());
    let mut star = base(circ());
    for _ in 0..n {
        let grow = |op: Symbol, from: &[Term]| -> Vec<Term> {
            TRIPLES
                .iter()
                .map(|&[a, b, c]| {
                    let inner = Term::App(op.clone(), vec![from[b].clone(), from[c].clone()]);
                    Term::App(op.clone(), vec![from[a].clone(), inner])
                })
                .collect()
        };
        let next_plain = grow(dot(), &star);
        let next_star = grow(circ(), &plain);
        plain = next_plain;
        star = next_star;
    }
    if starred {
        star
    } else {
        plain
    }
}

/// Swaps `dot` and `circ`.
pub fn dual(t: &Term) -> Result<Term> {
    Ok(match t {
        Term::Var(i) => Term::Var(*i),
        Term::App(f, cs) => {
            let g = match &*f.name {
                DOT if f.arity == 2 => circ(),
                CIRC if f.arity == 2 => dot(),
                _ => return Err(Error::UnknownSymbol(f.to_string())),
            };
            Term::App(g, cs.iter().map(dual).collect::<Result<_>>()?)
        }
    })
}

/// `(t(x1, t(x2, x3)), t(t(x1, x2), x3))` for a binary term `t` in `x1, x2`.
pub fn assoc_instance(t: &Term) -> Result<(Term, Term)> {
    if let Some(&v) = t.vars().iter().find(|&&v| v > 2) {
        return Err(Error::BadParam(format!(
            "x{v} is not allowed in a binary term"
        )));
    }
    let x = Term::Var;
    let at = |a: Term, b: Term| substitute(t, &Subst::from([(1, a), (2, b)]));
    let lhs = at(x(1), at(x(2), x(3))?)?;
    let rhs = at(at(x(1), x(2))?, x(3))?;
    Ok((lhs, rhs))
}

/// Infix printing with `·` and `∘`, variables `x, y, z`, outermost
/// application unbracketed.
pub fn format_two_op(t: &Term) -> String {
    struct Show<'a>(&'a Term, bool);
    impl fmt::Display for Show<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match self.0 {
                Term::Var(i) => match *i {
                    1 => write!(f, "x"),
                    2 => write!(f, "y"),
                    3 => write!(f, "z"),
                    _ => write!(f, "x{i}"),
                },
                Term::App(s, cs) if cs.len() == 2 => {
                    let op = match &*s.name {
                        DOT => "·",
                        CIRC => "∘",
                        other => other,
                    };
                    if !self.1 {
                        write!(f, "(")?;
                    }
                    write!(f, "{} {} {}", Show(&cs[0], false), op, Show(&cs[1], false))?;
                    if !self.1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                other => write!(f, "{other}"),
            }
        }
    }
    Show(t, true).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    L,
    R,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub position: Position,
    pub side: Side,
    pub images: BTreeMap<String, String>,
    #[serde(skip)]
    pub hypersubstitution: Hypersubstitution,
}

/// Candidate images for every function variable, in enumeration order.
struct Pools {
    vars: Vec<FunctionVariable>,
    terms: Vec<Vec<Term>>,
}

impl Pools {
    fn new(
        vars: Vec<FunctionVariable>,
        tau: &SimilarityType,
        max_ops: usize,
        include_projections: bool,
    ) -> Self {
        let terms = vars
            .iter()
            .map(|fv| enumerate_terms(tau, fv.arity as u32, max_ops, include_projections))
            .collect();
        Pools { vars, terms }
    }

    fn slot(&self, fv: &FunctionVariable) -> usize {
        self.vars
            .iter()
            .position(|v| v == fv)
            .expect("pools cover the side")
    }

    fn to_hypersubstitution(&self, choice: &[usize]) -> Hypersubstitution {
        let mut h = Hypersubstitution::new();
        for (i, &c) in choice.iter().enumerate() {
            h.0.insert(self.vars[i].clone(), self.terms[i][c].clone());
        }
        h
    }
}

enum Goal<'a> {
    Hyper(&'a HyperTerm, &'a Term),
    /// Image term of a function variable against a subject; image variable
    /// `x_j` stands for the `j`-th argument hyperterm.
    Image(&'a Term, &'a [HyperTerm], &'a Term),
}

struct Matcher<'a> {
    pools: &'a Pools,
    choice: Vec<Option<usize>>,
    binding: BTreeMap<u32, &'a Term>,
    found: BTreeSet<Vec<usize>>,
}

impl<'a> Matcher<'a> {
    fn solve(&mut self, stack: &mut Vec<Goal<'a>>) {
        let Some(goal) = stack.pop() else {
            self.found.insert(
                self.choice
                    .iter()
                    .map(|c| c.expect("every variable chosen"))
                    .collect(),
            );
            return;
        };
        match goal {
            Goal::Hyper(HyperTerm::Var(i), t) => match self.binding.get(i) {
                Some(&b) => {
                    if b == t {
                        self.solve(stack);
                    }
                }
                None => {
                    self.binding.insert(*i, t);
                    self.solve(stack);
                    self.binding.remove(i);
                }
            },
            Goal::Hyper(HyperTerm::App(f, hs), t) => {
                if let Term::App(g, ts) = t {
                    if f == g {
                        let mark = stack.len();
                        stack.extend(hs.iter().zip(ts).rev().map(|(h, s)| Goal::Hyper(h, s)));
                        self.solve(stack);
                        stack.truncate(mark);
                    }
                }
            }
            Goal::Hyper(HyperTerm::Fun(fv, hs), t) => {
                let slot = self.pools.slot(fv);
                match self.choice[slot] {
                    Some(c) => {
                        stack.push(Goal::Image(&self.pools.terms[slot][c], hs, t));
                        self.solve(stack);
                        stack.pop();
                    }
                    None => {
                        let ops = t.op_count();
                        for (c, p) in self.pools.terms[slot].iter().enumerate() {
                            let fits = match (p, t) {
                                (Term::Var(_), _) => true,
                                (Term::App(f, _), Term::App(g, _)) => f == g && p.op_count() <= ops,
                                _ => false,
                            };
                            if !fits {
                                continue;
                            }
                            self.choice[slot] = Some(c);
                            stack.push(Goal::Image(p, hs, t));
                            self.solve(stack);
                            stack.pop();
                        }
                        self.choice[slot] = None;
                    }
                }
            }
            Goal::Image(Term::Var(j), args, t) => {
                stack.push(Goal::Hyper(&args[*j as usize - 1], t));
                self.solve(stack);
                stack.pop();
            }
            Goal::Image(Term::App(f, ps), args, t) => {
                if let Term::App(g, ts) = t {
                    if f == g {
                        let mark = stack.len();
                        stack.extend(
                            ps.iter()
                                .zip(ts)
                                .rev()
                                .map(|(p, s)| Goal::Image(p, args, s)),
                        );
                        self.solve(stack);
                        stack.truncate(mark);
                    }
                }
            }
        }
        stack.push(goal);
    }
}

fn side_variables(h: &HyperTerm, out: &mut BTreeSet<FunctionVariable>) {
    match h {
        HyperTerm::Var(_) => {}
        HyperTerm::App(_, cs) => cs.iter().for_each(|c| side_variables(c, out)),
        HyperTerm::Fun(fv, cs) => {
            out.insert(fv.clone());
            cs.iter().for_each(|c| side_variables(c, out));
        }
    }
}

/// Every subterm occurrence of `host` that is an instance of a side of `e`
/// under a hypersubstitution with images of at most `max_ops` operations
/// (at least one unless `include_projections`), followed by a substitution
/// of terms for the individual variables. Only the function variables of the
/// matched side are assigned. Ordered by position (preorder), side, then
/// hypersubstitution in candidate order.
pub fn instance_census(
    host: &Term,
    e: &Hyperidentity,
    tau: &SimilarityType,
    max_ops: usize,
    include_projections: bool,
) -> Vec<CensusEntry> {
    let sides: Vec<(Side, &HyperTerm, Pools)> = [(Side::L, &e.lhs), (Side::R, &e.rhs)]
        .into_iter()
        .map(|(side, h)| {
            let mut fvs = BTreeSet::new();
            side_variables(h, &mut fvs);
            (
                side,
                h,
                Pools::new(fvs.into_iter().collect(), tau, max_ops, include_projections),
            )
        })
        .collect();
    let occurrences = subterm_occurrences(host);
    occurrences
        .par_iter()
        .map(|(pos, sub)| {
            let mut out = Vec::new();
            for (side, h, pools) in &sides {
                let mut m = Matcher {
                    pools,
                    choice: vec![None; pools.vars.len()],
                    binding: BTreeMap::new(),
                    found: BTreeSet::new(),
                };
                let mut stack = vec![Goal::Hyper(h, sub)];
                m.solve(&mut stack);
                for choice in m.found {
                    let hs = pools.to_hypersubstitution(&choice);
                    out.push(CensusEntry {
                        position: pos.clone(),
                        side: *side,
                        images: hs
                            .iter()
                            .map(|(fv, t)| (fv.name.to_string(), t.to_string()))
                            .collect(),
                        hypersubstitution: hs,
                    });
                }
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Smallest image size over all census entries for each host, searching
/// image sizes up to `max_ops`; `None` when nothing matches.
pub fn census_minimum(
    host: &Term,
    e: &Hyperidentity,
    tau: &SimilarityType,
    max_ops: usize,
    include_projections: bool,
) -> Option<usize> {
    instance_census(host, e, tau, max_ops, include_projections)
        .iter()
        .map(|c| {
            c.hypersubstitution
                .iter()
                .map(|(_, t)| t.op_count())
                .max()
                .unwrap_or(0)
        })
        .min()
}

//! Bounded equational derivation.
//!
//! Identities are used as rewrite rules in both directions at every position.
//! [`derive_bounded`] runs a breadth-first search between the two sides of a
//! goal and returns a replayable [`Proof`]; [`check_proof`] replays one.
//! When the axioms contain associativity of a single binary symbol, the
//! search runs over flat words (see [`word`]) and the resulting word proof is
//! lifted back to an ordinary term proof with explicit re-bracketing steps.

mod lift;
mod search;
pub mod word;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{substitute, Identity, Position, Subst, Term};

pub use word::{
    check_word_proof, one_step_rewrites, word_apply_step, word_budget, word_derive_bounded, Word,
    WordIdentity, WordProof, WordStep,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "L->R")]
    LeftToRight,
    #[serde(rename = "R->L")]
    RightToLeft,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::LeftToRight, Direction::RightToLeft];

    pub fn flip(self) -> Self {
        match self {
            Direction::LeftToRight => Direction::RightToLeft,
            Direction::RightToLeft => Direction::LeftToRight,
        }
    }

    /// (source, target) sides of `rule` in this direction.
    pub fn sides(self, rule: &Identity) -> (&Term, &Term) {
        match self {
            Direction::LeftToRight => (&rule.lhs, &rule.rhs),
            Direction::RightToLeft => (&rule.rhs, &rule.lhs),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::LeftToRight => "L->R",
            Direction::RightToLeft => "R->L",
        })
    }
}

/// Search limits. `max_term_ops` bounds every intermediate term,
/// `max_visited` the number of distinct terms explored, `max_depth` the
/// proof length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_term_ops: usize,
    pub max_visited: usize,
    pub max_depth: usize,
}

impl Budget {
    pub const DEFAULT_SLACK: usize = 8;
    pub const DEFAULT_MAX_VISITED: usize = 2_000_000;
    pub const DEFAULT_MAX_DEPTH: usize = 40;

    pub fn new(max_term_ops: usize, max_visited: usize, max_depth: usize) -> Self {
        Budget {
            max_term_ops,
            max_visited,
            max_depth,
        }
    }

    /// Defaults: goal size plus eight, two million terms, depth forty.
    pub fn for_goal(goal: &Identity) -> Self {
        Budget::new(
            goal.lhs.op_count().max(goal.rhs.op_count()) + Self::DEFAULT_SLACK,
            Self::DEFAULT_MAX_VISITED,
            Self::DEFAULT_MAX_DEPTH,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_term_ops == 0 || self.max_visited == 0 || self.max_depth == 0 {
            return Err(Error::BadParam("budget fields must be positive".into()));
        }
        Ok(())
    }
}

/// One replacement: axiom `axiom` used in direction `dir` at `pos`, with the
/// substitution for every variable of the axiom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub axiom: usize,
    pub dir: Direction,
    pub pos: Position,
    pub sub: Subst,
}

impl Step {
    pub fn inverse(&self) -> Step {
        Step {
            dir: self.dir.flip(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Proof {
    pub steps: Vec<Step>,
}

impl Proof {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The proof of the flipped goal: steps in reverse order, directions flipped.
    pub fn reversed(&self) -> Proof {
        Proof {
            steps: self.steps.iter().rev().map(Step::inverse).collect(),
        }
    }

    /// Intermediate terms, starting with `start`.
    pub fn replay(
        &self,
        axioms: &[Identity],
        start: &Term,
    ) -> std::result::Result<Vec<Term>, ProofError> {
        let mut cur = start.clone();
        let mut out = vec![cur.clone()];
        for (i, step) in self.steps.iter().enumerate() {
            cur =
                apply_step(&cur, axioms, step).map_err(|reason| ProofError { step: i, reason })?;
            out.push(cur.clone());
        }
        Ok(out)
    }
}

/// First failing step of a proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofError {
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for ProofError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<P> {
    Derived(P),
    /// Budget exhausted without a proof. Not a refutation.
    Unknown {
        visited: usize,
    },
}

impl<P> Outcome<P> {
    pub fn is_derived(&self) -> bool {
        matches!(self, Outcome::Derived(_))
    }

    pub fn proof(&self) -> Option<&P> {
        match self {
            Outcome::Derived(p) => Some(p),
            Outcome::Unknown { .. } => None,
        }
    }
}

/// How [`derive_with`] searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Word search modulo associativity when it is an axiom, tree search otherwise.
    #[default]
    Auto,
    /// Always search over terms.
    Tree,
}

/// First-order matching of `pattern` against `t`, extending `sub`.
pub fn match_term(pattern: &Term, t: &Term, sub: &mut Subst) -> bool {
    match pattern {
        Term::Var(v) => match sub.get(v) {
            Some(bound) => bound == t,
            None => {
                sub.insert(*v, t.clone());
                true
            }
        },
        Term::App(f, ps) => match t {
            Term::App(g, ts) if f == g => ps.iter().zip(ts).all(|(p, u)| match_term(p, u, sub)),
            _ => false,
        },
    }
}

/// Rewrites the subterm at `pos` with `rule` in direction `dir`, if the
/// source side matches there. Target-only variables stay as themselves.
pub fn apply_rule_at(
    t: &Term,
    rule: &Identity,
    dir: Direction,
    pos: &[usize],
) -> Result<Option<Term>> {
    let sub_t = t
        .subterm_at(pos)
        .ok_or_else(|| Error::InvalidPosition(pos.to_vec()))?;
    let (src, tgt) = dir.sides(rule);
    let mut sub = Subst::new();
    if !match_term(src, sub_t, &mut sub) {
        return Ok(None);
    }
    for v in tgt.vars() {
        sub.entry(v).or_insert(Term::Var(v));
    }
    let replacement = substitute(tgt, &sub).expect("all target variables bound");
    Ok(t.replace_at(pos, replacement))
}

/// Applies one proof step; the recorded substitution must agree with the
/// match and supplies target-only variables.
pub fn apply_step(t: &Term, axioms: &[Identity], step: &Step) -> std::result::Result<Term, String> {
    let rule = axioms
        .get(step.axiom)
        .ok_or_else(|| format!("axiom index {} out of range", step.axiom))?;
    let sub_t = t
        .subterm_at(&step.pos)
        .ok_or_else(|| format!("position {:?} not in term", step.pos))?;
    let (src, tgt) = step.dir.sides(rule);
    let mut sub = Subst::new();
    if !match_term(src, sub_t, &mut sub) {
        return Err(format!(
            "axiom {} {} does not match at {:?}",
            step.axiom, step.dir, step.pos
        ));
    }
    for (v, image) in &sub {
        if let Some(recorded) = step.sub.get(v) {
            if recorded != image {
                return Err(format!("recorded image of x{v} disagrees with the match"));
            }
        }
    }
    for v in tgt.vars() {
        sub.entry(v)
            .or_insert_with(|| step.sub.get(&v).cloned().unwrap_or(Term::Var(v)));
    }
    let replacement = substitute(tgt, &sub).map_err(|e| e.to_string())?;
    t.replace_at(&step.pos, replacement)
        .ok_or_else(|| format!("position {:?} not in term", step.pos))
}

/// Replays `proof` from `goal.lhs`; `Ok` iff it ends at `goal.rhs`.
pub fn verify_proof(
    axioms: &[Identity],
    goal: &Identity,
    proof: &Proof,
) -> std::result::Result<(), ProofError> {
    let terms = proof.replay(axioms, &goal.lhs)?;
    if terms.last() == Some(&goal.rhs) {
        Ok(())
    } else {
        Err(ProofError {
            step: proof.len(),
            reason: "proof does not end at the goal's right-hand side".into(),
        })
    }
}

pub fn check_proof(axioms: &[Identity], goal: &Identity, proof: &Proof) -> bool {
    verify_proof(axioms, goal, proof).is_ok()
}

/// Breadth-first derivation search with the default strategy.
pub fn derive_bounded(axioms: &[Identity], goal: &Identity, budget: &Budget) -> Outcome<Proof> {
    derive_with(axioms, goal, budget, Strategy::Auto)
}

pub fn derive_with(
    axioms: &[Identity],
    goal: &Identity,
    budget: &Budget,
    strategy: Strategy,
) -> Outcome<Proof> {
    if goal.lhs == goal.rhs {
        return Outcome::Derived(Proof::default());
    }
    if axioms.is_empty() {
        return Outcome::Unknown { visited: 0 };
    }
    if strategy == Strategy::Auto {
        if let Some(ctx) = lift::AssocContext::detect(axioms, goal) {
            return ctx.derive(axioms, goal, budget);
        }
    }
    tree_search(axioms, goal, budget)
}

struct CompiledRule<'a> {
    axiom: usize,
    dir: Direction,
    src: &'a Term,
    tgt: &'a Term,
    extras: Vec<u32>,
}

fn compile_rules(axioms: &[Identity]) -> Vec<CompiledRule<'_>> {
    let mut out = Vec::new();
    for (i, rule) in axioms.iter().enumerate() {
        for dir in Direction::BOTH {
            let (src, tgt) = dir.sides(rule);
            let src_vars = src.vars();
            let extras = tgt
                .vars()
                .into_iter()
                .filter(|v| !src_vars.contains(v))
                .collect();
            out.push(CompiledRule {
                axiom: i,
                dir,
                src,
                tgt,
                extras,
            });
        }
    }
    out
}

/// Every way of binding `extras` to the given filler terms.
fn extra_bindings(extras: &[u32], fillers: &[Term]) -> Vec<Subst> {
    let mut out = vec![Subst::new()];
    for &v in extras {
        out = out
            .into_iter()
            .flat_map(|s| {
                fillers.iter().map(move |f| {
                    let mut s = s.clone();
                    s.insert(v, f.clone());
                    s
                })
            })
            .collect();
    }
    out
}

fn tree_search(axioms: &[Identity], goal: &Identity, budget: &Budget) -> Outcome<Proof> {
    let rules = compile_rules(axioms);
    let fillers: Vec<Term> = goal
        .vars()
        .into_iter()
        .map(Term::Var)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let max_ops = budget.max_term_ops;
    let neighbors = |t: &Term, out: &mut Vec<(Term, Step)>| {
        for rule in &rules {
            for pos in t.positions() {
                let here = t.subterm_at(&pos).expect("valid position");
                let mut sub = Subst::new();
                if !match_term(rule.src, here, &mut sub) {
                    continue;
                }
                for extra in extra_bindings(&rule.extras, &fillers) {
                    let mut full = sub.clone();
                    full.extend(extra);
                    let replacement =
                        substitute(rule.tgt, &full).expect("all target variables bound");
                    let grown = replacement.op_count() as isize - here.op_count() as isize;
                    if (t.op_count() as isize + grown) as usize > max_ops {
                        continue;
                    }
                    let next = t.replace_at(&pos, replacement).expect("valid position");
                    out.push((
                        next,
                        Step {
                            axiom: rule.axiom,
                            dir: rule.dir,
                            pos: pos.clone(),
                            sub: full,
                        },
                    ));
                }
            }
        }
    };
    let (found, visited) = search::bidirectional(
        goal.lhs.clone(),
        goal.rhs.clone(),
        budget,
        neighbors,
        Step::inverse,
    );
    match found {
        Some(steps) => Outcome::Derived(Proof { steps }),
        None => Outcome::Unknown { visited },
    }
}

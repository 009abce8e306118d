//! Search modulo associativity for a single binary symbol.
//!
//! The goal and the non-associativity axioms are flattened to words, the word
//! engine finds a proof, and every word step is turned into term steps: the
//! current term is re-bracketed (through the right comb, using the
//! associativity axiom) until the rewritten factor is a subterm shaped like
//! the axiom side, then the axiom is applied there.

use std::collections::BTreeMap;

use super::word::{word_derive_bounded, WordIdentity, WordProof};
use super::{match_term, Budget, Direction, Outcome, Proof, Step};
use crate::term::{right_comb, right_comb_terms, substitute, Identity, Position, Subst, Term};
use crate::typesys::Symbol;

pub(crate) struct AssocContext {
    op: Symbol,
    assoc: usize,
    /// Direction of the associativity axiom that turns `(ab)c` into `a(bc)`.
    rotate: Direction,
    /// Word axioms and the index of the term axiom each came from.
    words: Vec<(WordIdentity, usize)>,
}

fn single_binary(terms: &[&Term]) -> Option<Symbol> {
    let mut op: Option<Symbol> = None;
    for t in terms {
        for s in t.symbols() {
            if s.arity != 2 {
                return None;
            }
            match &op {
                None => op = Some(s),
                Some(o) if *o == s => {}
                Some(_) => return None,
            }
        }
    }
    op
}

impl AssocContext {
    pub(crate) fn detect(axioms: &[Identity], goal: &Identity) -> Option<Self> {
        let mut all: Vec<&Term> = vec![&goal.lhs, &goal.rhs];
        for a in axioms {
            all.push(&a.lhs);
            all.push(&a.rhs);
        }
        let op = single_binary(&all)?;
        let x = Term::Var;
        let left = Term::App(
            op.clone(),
            vec![Term::App(op.clone(), vec![x(1), x(2)]), x(3)],
        );
        let right = Term::App(
            op.clone(),
            vec![x(1), Term::App(op.clone(), vec![x(2), x(3)])],
        );
        let assoc_law = Identity::new(left.clone(), right).canonical();
        let assoc = axioms.iter().position(|a| a.canonical() == assoc_law)?;
        let rotate = if match_term(&axioms[assoc].lhs, &left, &mut Subst::new()) {
            Direction::LeftToRight
        } else {
            Direction::RightToLeft
        };
        if goal.lhs.max_var() > 255 || goal.rhs.max_var() > 255 {
            return None;
        }
        let mut words = Vec::new();
        for (i, a) in axioms.iter().enumerate() {
            let (l, r) = (a.lhs.leaf_word()?, a.rhs.leaf_word()?);
            if l != r {
                words.push((WordIdentity::new(l, r), i));
            }
        }
        Some(AssocContext {
            op,
            assoc,
            rotate,
            words,
        })
    }

    pub(crate) fn derive(
        &self,
        axioms: &[Identity],
        goal: &Identity,
        budget: &Budget,
    ) -> Outcome<Proof> {
        let wl = goal.lhs.leaf_word().expect("checked in detect");
        let wr = goal.rhs.leaf_word().expect("checked in detect");
        let word_proof = if wl == wr {
            WordProof::default()
        } else {
            let word_axioms: Vec<WordIdentity> =
                self.words.iter().map(|(w, _)| w.clone()).collect();
            match word_derive_bounded(&word_axioms, &WordIdentity::new(wl, wr), budget) {
                Outcome::Derived(p) => p,
                Outcome::Unknown { visited } => return Outcome::Unknown { visited },
            }
        };
        Outcome::Derived(self.lift(axioms, goal, &word_proof))
    }

    fn step(
        &self,
        axioms: &[Identity],
        t: &Term,
        axiom: usize,
        dir: Direction,
        pos: &[usize],
        extras: &Subst,
    ) -> (Term, Step) {
        let (src, tgt) = dir.sides(&axioms[axiom]);
        let here = t.subterm_at(pos).expect("lifted position exists");
        let mut sub = Subst::new();
        assert!(match_term(src, here, &mut sub), "lifted step must match");
        for v in tgt.vars() {
            sub.entry(v)
                .or_insert_with(|| extras.get(&v).cloned().unwrap_or(Term::Var(v)));
        }
        let next = t
            .replace_at(pos, substitute(tgt, &sub).expect("bound"))
            .expect("lifted position exists");
        (
            next,
            Step {
                axiom,
                dir,
                pos: pos.to_vec(),
                sub,
            },
        )
    }

    /// Rotates `t` into the right comb of its leaves.
    fn to_right_comb(&self, axioms: &[Identity], t: &Term) -> (Term, Vec<Step>) {
        let mut cur = t.clone();
        let mut steps = Vec::new();
        let mut cursor: Position = Vec::new();
        loop {
            match cur.subterm_at(&cursor).expect("cursor stays inside") {
                Term::App(_, cs) if !cs[0].is_var() => {
                    let (next, st) = self.step(
                        axioms,
                        &cur,
                        self.assoc,
                        self.rotate,
                        &cursor,
                        &Subst::new(),
                    );
                    cur = next;
                    steps.push(st);
                }
                Term::App(..) => cursor.push(1),
                Term::Var(_) => break,
            }
        }
        (cur, steps)
    }

    /// Steps turning `from` into `to`; both must have the same leaf word.
    fn rebracket(&self, axioms: &[Identity], from: &Term, to: &Term) -> Vec<Step> {
        let (comb_a, mut steps) = self.to_right_comb(axioms, from);
        let (comb_b, back) = self.to_right_comb(axioms, to);
        debug_assert_eq!(comb_a, comb_b);
        steps.extend(back.iter().rev().map(Step::inverse));
        steps
    }

    fn lift(&self, axioms: &[Identity], goal: &Identity, word_proof: &WordProof) -> Proof {
        let mut steps = Vec::new();
        let mut cur = goal.lhs.clone();
        let mut word = cur.leaf_word().expect("binary term");
        for ws in &word_proof.steps {
            let (_, axiom) = &self.words[ws.axiom];
            let (src, _) = ws.dir.sides(&axioms[*axiom]);
            let as_terms: BTreeMap<u32, Term> = ws
                .sub
                .iter()
                .map(|(&v, w)| (v, right_comb(&self.op, w)))
                .collect();
            let block = substitute(src, &as_terms).expect("word step binds every source variable");
            let block_len = block.leaf_count();
            let prefix = &word[..ws.start];
            let suffix = &word[ws.start + block_len..];
            let mut items: Vec<Term> = prefix.iter().map(|&v| Term::Var(v)).collect();
            items.push(block);
            items.extend(suffix.iter().map(|&v| Term::Var(v)));
            let last = items.len() - 1;
            let shaped = right_comb_terms(&self.op, items);
            let mut pos: Position = vec![1; ws.start];
            if ws.start < last {
                pos.push(0);
            }
            steps.extend(self.rebracket(axioms, &cur, &shaped));
            let (next, st) = self.step(axioms, &shaped, *axiom, ws.dir, &pos, &as_terms);
            steps.push(st);
            cur = next;
            word = cur.leaf_word().expect("binary term");
        }
        steps.extend(self.rebracket(axioms, &cur, &goal.rhs));
        Proof { steps }
    }
}

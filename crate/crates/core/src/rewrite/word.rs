//! Derivations over flat semigroup words.
//!
//! Associativity is implicit: a word is a sequence of letters and a rule
//! instance rewrites one factor. Variables of the axioms range over nonempty
//! words.

use std::collections::BTreeMap;

use super::search;
use super::{Budget, Direction, Outcome};

/// Letters are small positive integers (variable indices of the goal).
pub type Word = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordIdentity {
    pub lhs: Word,
    pub rhs: Word,
}

impl WordIdentity {
    pub fn new(lhs: Word, rhs: Word) -> Self {
        WordIdentity { lhs, rhs }
    }

    /// Reads `xxyyz=xxyxxyz`: letters become variables 1, 2, … by first
    /// appearance across both sides; `^k` repeats the preceding letter.
    pub fn parse(text: &str) -> Option<Self> {
        let (l, r) = text.split_once(['=', '≈'])?;
        let mut letters = Vec::new();
        let lhs = parse_letters(l, &mut letters)?;
        let rhs = parse_letters(r, &mut letters)?;
        Some(WordIdentity { lhs, rhs })
    }

    pub fn flipped(&self) -> Self {
        WordIdentity::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn sides(&self, dir: Direction) -> (&Word, &Word) {
        match dir {
            Direction::LeftToRight => (&self.lhs, &self.rhs),
            Direction::RightToLeft => (&self.rhs, &self.lhs),
        }
    }
}

/// Parses a letter word with optional `^k` exponents, extending the shared
/// letter table. Returns `None` on anything else.
pub fn parse_letters(text: &str, letters: &mut Vec<char>) -> Option<Word> {
    let mut out = Vec::new();
    let mut chars = text.chars().filter(|c| !c.is_whitespace()).peekable();
    while let Some(c) = chars.next() {
        if !c.is_alphabetic() {
            return None;
        }
        let v = match letters.iter().position(|&l| l == c) {
            Some(i) => i as u32 + 1,
            None => {
                letters.push(c);
                letters.len() as u32
            }
        };
        let mut k = 1usize;
        if chars.peek() == Some(&'^') {
            chars.next();
            let mut digits = String::new();
            while let Some(d) = chars.peek().copied().filter(char::is_ascii_digit) {
                digits.push(d);
                chars.next();
            }
            k = digits.parse().ok().filter(|&k| k >= 1)?;
        }
        out.extend(std::iter::repeat_n(v, k));
    }
    (!out.is_empty()).then_some(out)
}

/// Rewrites the factor starting at `start` using axiom `axiom` in `dir`
/// with the recorded substitution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WordStep {
    pub axiom: usize,
    pub dir: Direction,
    pub start: usize,
    pub sub: BTreeMap<u32, Word>,
}

impl WordStep {
    pub fn inverse(&self) -> WordStep {
        WordStep {
            dir: self.dir.flip(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordProof {
    pub steps: Vec<WordStep>,
}

impl WordProof {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn reversed(&self) -> WordProof {
        WordProof {
            steps: self.steps.iter().rev().map(WordStep::inverse).collect(),
        }
    }

    /// Intermediate words starting from `start`, or `None` at the first bad step.
    pub fn replay(&self, axioms: &[WordIdentity], start: &[u32]) -> Option<Vec<Word>> {
        let mut cur = start.to_vec();
        let mut out = vec![cur.clone()];
        for st in &self.steps {
            cur = word_apply_step(&cur, axioms, st)?;
            out.push(cur.clone());
        }
        Some(out)
    }

    /// Shifts every step right by `offset` letters (the proof under a left
    /// context of that length).
    pub fn shifted(&self, offset: usize) -> WordProof {
        WordProof {
            steps: self
                .steps
                .iter()
                .map(|s| WordStep {
                    start: s.start + offset,
                    ..s.clone()
                })
                .collect(),
        }
    }
}

fn instantiate(pattern: &[u32], sub: &BTreeMap<u32, Word>) -> Option<Word> {
    let mut out = Vec::new();
    for v in pattern {
        let image = sub.get(v)?;
        if image.is_empty() {
            return None;
        }
        out.extend_from_slice(image);
    }
    Some(out)
}

/// Replays one step: the source side instantiated by `sub` must occur at
/// `start`; it is replaced by the instantiated target side.
pub fn word_apply_step(w: &[u32], axioms: &[WordIdentity], step: &WordStep) -> Option<Word> {
    let rule = axioms.get(step.axiom)?;
    let (src, tgt) = rule.sides(step.dir);
    let from = instantiate(src, &step.sub)?;
    let to = instantiate(tgt, &step.sub)?;
    let end = step.start.checked_add(from.len())?;
    if end > w.len() || w[step.start..end] != from[..] {
        return None;
    }
    let mut out = Vec::with_capacity(w.len() - from.len() + to.len());
    out.extend_from_slice(&w[..step.start]);
    out.extend_from_slice(&to);
    out.extend_from_slice(&w[end..]);
    Some(out)
}

pub fn check_word_proof(axioms: &[WordIdentity], goal: &WordIdentity, proof: &WordProof) -> bool {
    proof
        .replay(axioms, &goal.lhs)
        .is_some_and(|ws| ws.last() == Some(&goal.rhs))
}

/// One side of a rule, with variables renumbered `0..n` in order of first
/// appearance in the source.
struct CompiledSide {
    axiom: usize,
    dir: Direction,
    src: Vec<usize>,
    tgt: Vec<usize>,
    /// Original variable index for each compact id.
    names: Vec<u32>,
    /// Compact ids `src_vars..names.len()` occur only in the target.
    src_vars: usize,
}

fn compile(axioms: &[WordIdentity]) -> Vec<CompiledSide> {
    let mut out = Vec::new();
    for (i, rule) in axioms.iter().enumerate() {
        for dir in Direction::BOTH {
            let (src, tgt) = rule.sides(dir);
            let mut names: Vec<u32> = Vec::new();
            let id = |v: u32, names: &mut Vec<u32>| match names.iter().position(|&n| n == v) {
                Some(k) => k,
                None => {
                    names.push(v);
                    names.len() - 1
                }
            };
            let s: Vec<usize> = src.iter().map(|&v| id(v, &mut names)).collect();
            let src_vars = names.len();
            let t: Vec<usize> = tgt.iter().map(|&v| id(v, &mut names)).collect();
            out.push(CompiledSide {
                axiom: i,
                dir,
                src: s,
                tgt: t,
                names,
                src_vars,
            });
        }
    }
    out
}

/// Calls `found(end, bindings)` for every way `pattern` matches a factor of
/// `w` starting at `start`; bindings are `(offset, len)` into `w`.
#[allow(clippy::type_complexity)]
fn match_at(
    pattern: &[usize],
    w: &[u8],
    pos: usize,
    binds: &mut [(usize, usize)],
    found: &mut dyn FnMut(usize, &[(usize, usize)]),
) {
    let Some((&v, rest)) = pattern.split_first() else {
        found(pos, binds);
        return;
    };
    let (off, len) = binds[v];
    if len > 0 {
        if pos + len <= w.len() && w[off..off + len] == w[pos..pos + len] {
            match_at(rest, w, pos + len, binds, found);
        }
        return;
    }
    // Each remaining pattern letter needs at least one text letter.
    let room = w.len().saturating_sub(pos + rest.len());
    for l in 1..=room {
        binds[v] = (pos, l);
        match_at(rest, w, pos + l, binds, found);
    }
    binds[v] = (0, 0);
}

/// All single-step rewrites of `w`, in deterministic order (rule, direction,
/// start, then binding lengths).
fn word_neighbors(
    rules: &[CompiledSide],
    fillers: &[u8],
    max_len: usize,
    w: &[u8],
    out: &mut Vec<(Vec<u8>, WordStep)>,
) {
    for rule in rules {
        let extra = rule.names.len() - rule.src_vars;
        let mut binds = vec![(0usize, 0usize); rule.names.len()];
        for start in 0..w.len() {
            let mut emit = |end: usize, b: &[(usize, usize)]| {
                let mut extra_choices: Vec<Vec<u8>> = vec![Vec::new()];
                for _ in 0..extra {
                    extra_choices = extra_choices
                        .into_iter()
                        .flat_map(|c| {
                            fillers.iter().map(move |&f| {
                                let mut c = c.clone();
                                c.push(f);
                                c
                            })
                        })
                        .collect();
                }
                for choice in extra_choices {
                    let seg = |k: usize| -> &[u8] {
                        if k < rule.src_vars {
                            let (o, l) = b[k];
                            &w[o..o + l]
                        } else {
                            std::slice::from_ref(&choice[k - rule.src_vars])
                        }
                    };
                    let tgt_len: usize = rule.tgt.iter().map(|&k| seg(k).len()).sum();
                    let new_len = w.len() - (end - start) + tgt_len;
                    if new_len > max_len || new_len == 0 {
                        continue;
                    }
                    let mut next = Vec::with_capacity(new_len);
                    next.extend_from_slice(&w[..start]);
                    for &k in &rule.tgt {
                        next.extend_from_slice(seg(k));
                    }
                    next.extend_from_slice(&w[end..]);
                    let sub = (0..rule.names.len())
                        .map(|k| (rule.names[k], seg(k).iter().map(|&c| c as u32).collect()))
                        .collect();
                    out.push((
                        next,
                        WordStep {
                            axiom: rule.axiom,
                            dir: rule.dir,
                            start,
                            sub,
                        },
                    ));
                }
            };
            match_at(&rule.src, w, start, &mut binds, &mut emit);
        }
    }
}

fn to_bytes(w: &[u32]) -> Option<Vec<u8>> {
    w.iter().map(|&c| u8::try_from(c).ok()).collect()
}

/// Word analogue of [`super::derive_bounded`]. `budget.max_term_ops` bounds
/// the number of multiplications, i.e. word length minus one.
pub fn word_derive_bounded(
    axioms: &[WordIdentity],
    goal: &WordIdentity,
    budget: &Budget,
) -> Outcome<WordProof> {
    if goal.lhs == goal.rhs {
        return Outcome::Derived(WordProof::default());
    }
    let (Some(lhs), Some(rhs)) = (to_bytes(&goal.lhs), to_bytes(&goal.rhs)) else {
        return Outcome::Unknown { visited: 0 };
    };
    if axioms.is_empty() || lhs.is_empty() || rhs.is_empty() {
        return Outcome::Unknown { visited: 0 };
    }
    let rules = compile(axioms);
    let mut fillers: Vec<u8> = lhs.iter().chain(&rhs).copied().collect();
    fillers.sort_unstable();
    fillers.dedup();
    let max_len = budget.max_term_ops + 1;
    let neighbors = |w: &Vec<u8>, out: &mut Vec<(Vec<u8>, WordStep)>| {
        word_neighbors(&rules, &fillers, max_len, w, out)
    };
    let (found, visited) = search::bidirectional(lhs, rhs, budget, neighbors, WordStep::inverse);
    match found {
        Some(steps) => Outcome::Derived(WordProof { steps }),
        None => Outcome::Unknown { visited },
    }
}

/// Default budget for a word goal: longer side's multiplications plus eight.
pub fn word_budget(goal: &WordIdentity) -> Budget {
    Budget::new(
        goal.lhs.len().max(goal.rhs.len()) - 1 + Budget::DEFAULT_SLACK,
        Budget::DEFAULT_MAX_VISITED,
        Budget::DEFAULT_MAX_DEPTH,
    )
}

/// All one-step rewrites of `w` with factor length and result within
/// `max_len` letters, as (result, step).
pub fn one_step_rewrites(
    axioms: &[WordIdentity],
    w: &[u32],
    fillers: &[u32],
    max_len: usize,
) -> Vec<(Word, WordStep)> {
    let rules = compile(axioms);
    let (Some(wb), Some(fb)) = (to_bytes(w), to_bytes(fillers)) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    word_neighbors(&rules, &fb, max_len, &wb, &mut out);
    out.into_iter()
        .map(|(n, s)| (n.into_iter().map(u32::from).collect(), s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wi(s: &str) -> WordIdentity {
        WordIdentity::parse(s).unwrap()
    }

    #[test]
    fn parse_words() {
        assert_eq!(
            wi("xxyyz=xxyxxyz"),
            WordIdentity::new(vec![1, 1, 2, 2, 3], vec![1, 1, 2, 1, 1, 2, 3])
        );
        assert_eq!(wi("x^2y^3z = x^2y^5z").rhs, vec![1, 1, 2, 2, 2, 2, 2, 3]);
        assert!(WordIdentity::parse("x1=x").is_none());
        assert!(WordIdentity::parse("xx").is_none());
    }

    #[test]
    fn consequences_of_xxyyz() {
        let ax = vec![wi("xxyyz=xxyxxyz")];
        for goal in ["x^2y^2x^2z = x^2y^2x^4z", "x^2y^3z = x^2y^5z"] {
            let g = wi(goal);
            let out = word_derive_bounded(&ax, &g, &word_budget(&g));
            let p = out.proof().unwrap_or_else(|| panic!("{goal} not derived"));
            assert!(check_word_proof(&ax, &g, p));
            assert!(check_word_proof(&ax, &g.flipped(), &p.reversed()));
        }
    }

    #[test]
    fn reflexive_goal_has_empty_proof() {
        let g = wi("xyx=xyx");
        assert_eq!(
            word_derive_bounded(&[], &g, &word_budget(&g)),
            Outcome::Derived(WordProof::default())
        );
    }

    #[test]
    fn nonempty_substitutions_only() {
        // z ↦ ε would turn xyzyx into xyyx; such a rewrite must not appear.
        let ax = vec![wi("xyxzxyx=xyzyx")];
        let rewrites = one_step_rewrites(&ax, &[1, 2, 2, 1], &[1, 2], 12);
        assert!(rewrites.is_empty());
    }

    #[test]
    fn replay_rejects_mismatch() {
        let ax = vec![wi("xx=xxxx")];
        let step = WordStep {
            axiom: 0,
            dir: Direction::LeftToRight,
            start: 0,
            sub: [(1, vec![2])].into(),
        };
        assert_eq!(word_apply_step(&[1, 1], &ax, &step), None);
        assert_eq!(word_apply_step(&[2, 2], &ax, &step), Some(vec![2, 2, 2, 2]));
    }
}

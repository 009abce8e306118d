//! First-order terms, hyperterms, identities and hypersubstitutions.
//!
//! Variables are numbered from 1 and print as `x1, x2, …`. Applications carry
//! their [`Symbol`], so a term is meaningful without its signature; the
//! signature is only consulted when parsing and for the compact printing of
//! single-binary-operation terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::typesys::{SimilarityType, Symbol};

/// Child-index path from the root; the root is the empty path.
pub type Position = Vec<usize>;

/// Variable assignment used by [`substitute`].
pub type Subst = BTreeMap<u32, Term>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(i: u32) -> Term {
        Term::Var(i)
    }

    pub fn app(symbol: &Symbol, children: Vec<Term>) -> Term {
        debug_assert_eq!(symbol.arity, children.len());
        Term::App(symbol.clone(), children)
    }

    /// Number of operation-symbol occurrences.
    pub fn op_count(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, cs) => 1 + cs.iter().map(Term::op_count).sum::<usize>(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, cs) => cs.iter().map(Term::leaf_count).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, cs) => 1 + cs.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn root_symbol(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::App(_, cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Variables in order of first (left-to-right) occurrence.
    pub fn vars_in_order(&self, out: &mut Vec<u32>) {
        match self {
            Term::Var(i) => {
                if !out.contains(i) {
                    out.push(*i);
                }
            }
            Term::App(_, cs) => cs.iter().for_each(|c| c.vars_in_order(out)),
        }
    }

    pub fn max_var(&self) -> u32 {
        self.vars().into_iter().next_back().unwrap_or(0)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        fn go(t: &Term, out: &mut BTreeSet<Symbol>) {
            if let Term::App(f, cs) = t {
                out.insert(f.clone());
                cs.iter().for_each(|c| go(c, out));
            }
        }
        go(self, &mut out);
        out
    }

    pub fn subterm_at(&self, pos: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in pos {
            match cur {
                Term::App(_, cs) if i < cs.len() => cur = &cs[i],
                _ => return None,
            }
        }
        Some(cur)
    }

    /// Copy of `self` with the subterm at `pos` replaced.
    pub fn replace_at(&self, pos: &[usize], new: Term) -> Option<Term> {
        match pos.split_first() {
            None => Some(new),
            Some((&i, rest)) => match self {
                Term::App(f, cs) if i < cs.len() => {
                    let mut cs = cs.clone();
                    cs[i] = cs[i].replace_at(rest, new)?;
                    Some(Term::App(f.clone(), cs))
                }
                _ => None,
            },
        }
    }

    /// All positions in preorder.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
            out.push(path.clone());
            if let Term::App(_, cs) = t {
                for (i, c) in cs.iter().enumerate() {
                    path.push(i);
                    go(c, path, out);
                    path.pop();
                }
            }
        }
        go(self, &mut path, &mut out);
        out
    }

    /// Applies `f` to every variable.
    pub fn map_vars(&self, f: &impl Fn(u32) -> Term) -> Term {
        match self {
            Term::Var(i) => f(*i),
            Term::App(s, cs) => Term::App(s.clone(), cs.iter().map(|c| c.map_vars(f)).collect()),
        }
    }

    /// Renames symbols via `f`, keeping arities.
    pub fn map_symbols(&self, f: &impl Fn(&Symbol) -> Symbol) -> Term {
        match self {
            Term::Var(i) => Term::Var(*i),
            Term::App(s, cs) => Term::App(f(s), cs.iter().map(|c| c.map_symbols(f)).collect()),
        }
    }

    /// Leaf sequence of a term built from binary applications; `None` if
    /// some symbol is not binary.
    pub fn leaf_word(&self) -> Option<Vec<u32>> {
        let mut out = Vec::new();
        fn go(t: &Term, out: &mut Vec<u32>) -> bool {
            match t {
                Term::Var(i) => {
                    out.push(*i);
                    true
                }
                Term::App(f, cs) => f.arity == 2 && cs.iter().all(|c| go(c, out)),
            }
        }
        go(self, &mut out).then_some(out)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(s, cs) => {
                write!(f, "{}(", s.name)?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Left-associated product of the given variables, e.g. `[1,1,2]` ↦ `(x1·x1)·x2`.
pub fn left_comb(op: &Symbol, word: &[u32]) -> Term {
    let mut it = word.iter();
    let mut acc = Term::Var(*it.next().expect("nonempty word"));
    for &v in it {
        acc = Term::App(op.clone(), vec![acc, Term::Var(v)]);
    }
    acc
}

/// Right-associated product of the given terms.
pub fn right_comb_terms(op: &Symbol, mut items: Vec<Term>) -> Term {
    let mut acc = items.pop().expect("nonempty item list");
    while let Some(t) = items.pop() {
        acc = Term::App(op.clone(), vec![t, acc]);
    }
    acc
}

/// Right-associated product of the given variables.
pub fn right_comb(op: &Symbol, word: &[u32]) -> Term {
    right_comb_terms(op, word.iter().map(|&v| Term::Var(v)).collect())
}

/// Homomorphic replacement of variables. Every variable of `t` needs an image.
pub fn substitute(t: &Term, a: &Subst) -> Result<Term> {
    match t {
        Term::Var(i) => a.get(i).cloned().ok_or(Error::MissingAssignment(*i)),
        Term::App(f, cs) => Ok(Term::App(
            f.clone(),
            cs.iter().map(|c| substitute(c, a)).collect::<Result<_>>()?,
        )),
    }
}

/// Preorder listing of every subterm together with its position.
pub fn subterm_occurrences(t: &Term) -> Vec<(Position, Term)> {
    t.positions()
        .into_iter()
        .map(|p| {
            let s = t.subterm_at(&p).expect("position from positions()").clone();
            (p, s)
        })
        .collect()
}

/// All terms over `signature` in variables `x1..xn` with at most `max_ops`
/// operation symbols, ordered by op count and then by printed form. Bare
/// variables are included only with `include_projections`.
pub fn enumerate_terms(
    signature: &SimilarityType,
    n: u32,
    max_ops: usize,
    include_projections: bool,
) -> Vec<Term> {
    let levels = terms_by_op_count(signature, n, max_ops);
    levels
        .into_iter()
        .enumerate()
        .filter(|(c, _)| include_projections || *c > 0)
        .flat_map(|(_, level)| level)
        .collect()
}

/// `levels[c]` holds all terms with exactly `c` operation symbols, sorted by
/// printed form.
pub fn terms_by_op_count(signature: &SimilarityType, n: u32, max_ops: usize) -> Vec<Vec<Term>> {
    let mut levels: Vec<Vec<Term>> = vec![(1..=n).map(Term::Var).collect()];
    for c in 1..=max_ops {
        let mut level = Vec::new();
        for f in signature.symbols() {
            for split in compositions(c - 1, f.arity) {
                let mut partial: Vec<Vec<Term>> = vec![Vec::with_capacity(f.arity)];
                for &k in &split {
                    let mut next = Vec::with_capacity(partial.len() * levels[k].len());
                    for p in &partial {
                        for t in &levels[k] {
                            let mut q = p.clone();
                            q.push(t.clone());
                            next.push(q);
                        }
                    }
                    partial = next;
                }
                level.extend(partial.into_iter().map(|cs| Term::App(f.clone(), cs)));
            }
        }
        sort_by_print(&mut level);
        levels.push(level);
    }
    levels
}

fn sort_by_print(v: &mut Vec<Term>) {
    let mut keyed: Vec<(String, Term)> = v.drain(..).map(|t| (t.to_string(), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    v.extend(keyed.into_iter().map(|(_, t)| t));
}

/// Ordered ways to write `total` as a sum of `parts` nonnegative integers.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Hyperterms

/// A second-order variable standing for an operation of fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunctionVariable {
    pub name: Arc<str>,
    pub arity: usize,
}

impl FunctionVariable {
    pub fn new(name: &str, arity: usize) -> Self {
        FunctionVariable {
            name: Arc::from(name),
            arity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HyperTerm {
    Var(u32),
    App(Symbol, Vec<HyperTerm>),
    Fun(FunctionVariable, Vec<HyperTerm>),
}

impl HyperTerm {
    pub fn fun(name: &str, children: Vec<HyperTerm>) -> HyperTerm {
        HyperTerm::Fun(FunctionVariable::new(name, children.len()), children)
    }

    /// Function variables with their arities, checking that each name is used
    /// with a single arity.
    pub fn function_variables(&self) -> Result<BTreeMap<Arc<str>, usize>> {
        let mut out = BTreeMap::new();
        self.collect_fvars(&mut out)?;
        Ok(out)
    }

    fn collect_fvars(&self, out: &mut BTreeMap<Arc<str>, usize>) -> Result<()> {
        match self {
            HyperTerm::Var(_) => Ok(()),
            HyperTerm::App(_, cs) => cs.iter().try_for_each(|c| c.collect_fvars(out)),
            HyperTerm::Fun(fv, cs) => {
                if let Some(&a) = out.get(&fv.name) {
                    if a != fv.arity {
                        return Err(Error::InconsistentArity {
                            name: fv.name.to_string(),
                            first: a,
                            second: fv.arity,
                        });
                    }
                } else {
                    out.insert(fv.name.clone(), fv.arity);
                }
                cs.iter().try_for_each(|c| c.collect_fvars(out))
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        fn go(h: &HyperTerm, out: &mut BTreeSet<u32>) {
            match h {
                HyperTerm::Var(i) => {
                    out.insert(*i);
                }
                HyperTerm::App(_, cs) | HyperTerm::Fun(_, cs) => cs.iter().for_each(|c| go(c, out)),
            }
        }
        go(self, &mut out);
        out
    }

    /// Plain term, if no function variable occurs.
    pub fn to_term(&self) -> Option<Term> {
        match self {
            HyperTerm::Var(i) => Some(Term::Var(*i)),
            HyperTerm::App(f, cs) => Some(Term::App(
                f.clone(),
                cs.iter().map(HyperTerm::to_term).collect::<Option<_>>()?,
            )),
            HyperTerm::Fun(..) => None,
        }
    }

    pub fn from_term(t: &Term) -> HyperTerm {
        match t {
            Term::Var(i) => HyperTerm::Var(*i),
            Term::App(f, cs) => {
                HyperTerm::App(f.clone(), cs.iter().map(HyperTerm::from_term).collect())
            }
        }
    }

    /// Reads every signature symbol of `t` as a function variable of the same
    /// name and arity (hypersubstitutions acting on signature symbols).
    pub fn symbols_as_variables(t: &Term) -> HyperTerm {
        match t {
            Term::Var(i) => HyperTerm::Var(*i),
            Term::App(f, cs) => HyperTerm::Fun(
                FunctionVariable {
                    name: f.name.clone(),
                    arity: f.arity,
                },
                cs.iter().map(HyperTerm::symbols_as_variables).collect(),
            ),
        }
    }

    /// Replaces variables by hyperterms.
    pub fn substitute_vars(&self, a: &BTreeMap<u32, HyperTerm>) -> HyperTerm {
        match self {
            HyperTerm::Var(i) => a.get(i).cloned().unwrap_or(HyperTerm::Var(*i)),
            HyperTerm::App(f, cs) => {
                HyperTerm::App(f.clone(), cs.iter().map(|c| c.substitute_vars(a)).collect())
            }
            HyperTerm::Fun(fv, cs) => HyperTerm::Fun(
                fv.clone(),
                cs.iter().map(|c| c.substitute_vars(a)).collect(),
            ),
        }
    }
}

impl fmt::Display for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, cs): (&str, &[HyperTerm]) = match self {
            HyperTerm::Var(i) => return write!(f, "x{i}"),
            HyperTerm::App(s, cs) => (&s.name, cs),
            HyperTerm::Fun(fv, cs) => (&fv.name, cs),
        };
        write!(f, "{name}(")?;
        for (i, c) in cs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Map from function variables (or, read as variables, signature symbols) to
/// terms whose variables fit the source arity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypersubstitution(pub BTreeMap<FunctionVariable, Term>);

impl Hypersubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an image, checking that it only mentions `x1..x{arity}`.
    pub fn insert(&mut self, fv: FunctionVariable, image: Term) -> Result<()> {
        if let Some(&v) = image
            .vars()
            .iter()
            .find(|&&v| v as usize > fv.arity || v == 0)
        {
            return Err(Error::ImageArity {
                name: fv.name.to_string(),
                var: v,
                arity: fv.arity,
            });
        }
        self.0.insert(fv, image);
        Ok(())
    }

    pub fn get(&self, fv: &FunctionVariable) -> Option<&Term> {
        self.0.get(fv)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FunctionVariable, &Term)> {
        self.0.iter()
    }
}

impl fmt::Display for Hypersubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {}", k.name, v)?;
        }
        write!(f, "}}")
    }
}

/// Replaces each function-variable node `F(u1,…,un)` by `s(F)` with `xi := ui'`,
/// where the `ui'` are the already-translated arguments.
pub fn apply_hypersubstitution(h: &HyperTerm, s: &Hypersubstitution) -> Result<Term> {
    match h {
        HyperTerm::Var(i) => Ok(Term::Var(*i)),
        HyperTerm::App(f, cs) => Ok(Term::App(
            f.clone(),
            cs.iter()
                .map(|c| apply_hypersubstitution(c, s))
                .collect::<Result<_>>()?,
        )),
        HyperTerm::Fun(fv, cs) => {
            let image = s
                .get(fv)
                .ok_or_else(|| Error::MissingImage(fv.name.to_string()))?;
            if let Some(&v) = image.vars().iter().find(|&&v| v as usize > fv.arity) {
                return Err(Error::ImageArity {
                    name: fv.name.to_string(),
                    var: v,
                    arity: fv.arity,
                });
            }
            let mut a = Subst::new();
            for (i, c) in cs.iter().enumerate() {
                a.insert(i as u32 + 1, apply_hypersubstitution(c, s)?);
            }
            substitute(image, &a)
        }
    }
}

// ---------------------------------------------------------------------------
// Identities

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Identity { lhs, rhs }
    }

    pub fn is_reflexive(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn flipped(&self) -> Identity {
        Identity::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    /// Renames variables by first occurrence in `lhs·rhs` and orients the
    /// sides so the smaller one (by op count, then printed form) is on the left.
    pub fn canonical(&self) -> Identity {
        let a = Identity::new(self.lhs.clone(), self.rhs.clone()).renamed();
        let b = Identity::new(self.rhs.clone(), self.lhs.clone()).renamed();
        let ka = a.sort_key();
        let kb = b.sort_key();
        if ka <= kb {
            a
        } else {
            b
        }
    }

    fn renamed(self) -> Identity {
        let mut order = Vec::new();
        self.lhs.vars_in_order(&mut order);
        self.rhs.vars_in_order(&mut order);
        let map: BTreeMap<u32, u32> = order
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32 + 1))
            .collect();
        let f = |v: u32| Term::Var(map[&v]);
        Identity::new(self.lhs.map_vars(&f), self.rhs.map_vars(&f))
    }

    fn sort_key(&self) -> (usize, String, usize, String) {
        (
            self.lhs.op_count(),
            self.lhs.to_string(),
            self.rhs.op_count(),
            self.rhs.to_string(),
        )
    }

    /// Key used for ordering identity sets deterministically.
    pub fn print_key(&self) -> (usize, String, usize, String) {
        self.sort_key()
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

// ---------------------------------------------------------------------------
// Parsing and printing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    Comma,
    Star,
    Caret,
}

fn lex(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            s.push(c);
            chars.next();
            // `x` followed by digits is a complete variable token, so `x1x2` lexes as two.
            let var_token = c == 'x' && chars.peek().is_some_and(char::is_ascii_digit);
            while let Some(&d) = chars.peek() {
                let ok = if var_token {
                    d.is_ascii_digit()
                } else {
                    d.is_alphanumeric() || d == '_'
                };
                if !ok {
                    break;
                }
                s.push(d);
                chars.next();
            }
            out.push(Tok::Ident(s));
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Tok::Num(
                s.parse()
                    .map_err(|_| Error::Parse(format!("number `{s}`")))?,
            ));
        } else {
            chars.next();
            out.push(match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '*' | '·' | '.' => Tok::Star,
                '^' => Tok::Caret,
                _ => return Err(Error::Parse(format!("unexpected character `{c}`"))),
            });
        }
    }
    Ok(out)
}

fn var_index(ident: &str) -> Option<u32> {
    let digits = ident.strip_prefix('x')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&i| i > 0)
}

/// Whether `text` should be read as semigroup shorthand (letters are
/// variables, juxtaposition is the binary operation).
fn is_shorthand(toks: &[Tok], sig: Option<&SimilarityType>) -> bool {
    if toks.contains(&Tok::Comma) {
        return false;
    }
    for (i, t) in toks.iter().enumerate() {
        if let Tok::Ident(s) = t {
            if var_index(s).is_some() {
                return false;
            }
            let applied = toks.get(i + 1) == Some(&Tok::LParen);
            let capital = s.chars().next().is_some_and(char::is_uppercase);
            let known = sig.is_some_and(|g| g.symbol(s).is_some());
            if applied && (capital || known) {
                return false;
            }
        }
    }
    toks.iter().any(|t| matches!(t, Tok::Ident(_)))
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    sig: Option<&'a SimilarityType>,
    /// Shorthand letter → variable index; shared across the sides of an identity.
    letters: &'a mut Vec<char>,
    shorthand: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(ref u) if *u == t => Ok(()),
            other => Err(Error::Parse(format!("expected {t:?}, found {other:?}"))),
        }
    }

    fn binary(&self) -> Result<Symbol> {
        self.sig
            .and_then(SimilarityType::sole_binary)
            .cloned()
            .ok_or_else(|| {
                Error::Parse("juxtaposition needs exactly one binary symbol in the type".into())
            })
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::LParen))
    }

    fn product(&mut self) -> Result<HyperTerm> {
        let mut acc = self.power()?;
        loop {
            if self.peek() == Some(&Tok::Star) {
                self.next();
            } else if !self.starts_atom() {
                break;
            }
            let op = self.binary()?;
            let rhs = self.power()?;
            acc = HyperTerm::App(op, vec![acc, rhs]);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<HyperTerm> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.next();
            let k = match self.next() {
                Some(Tok::Num(k)) if k >= 1 => k,
                other => return Err(Error::Parse(format!("bad exponent {other:?}"))),
            };
            let op = self.binary()?;
            let mut acc = base.clone();
            for _ in 1..k {
                acc = HyperTerm::App(op.clone(), vec![acc, base.clone()]);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn letter_var(&mut self, c: char) -> HyperTerm {
        let idx = match self.letters.iter().position(|&l| l == c) {
            Some(i) => i,
            None => {
                self.letters.push(c);
                self.letters.len() - 1
            }
        };
        HyperTerm::Var(idx as u32 + 1)
    }

    fn atom(&mut self) -> Result<HyperTerm> {
        match self.next() {
            Some(Tok::LParen) => {
                let t = self.product()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(s)) if self.shorthand => {
                // Each letter is its own variable; the run is a left-associated product.
                let mut acc: Option<HyperTerm> = None;
                let chars: Vec<char> = s.chars().collect();
                for (i, c) in chars.iter().enumerate() {
                    if !c.is_alphabetic() {
                        return Err(Error::Parse(format!("unexpected `{c}` in word `{s}`")));
                    }
                    let v = self.letter_var(*c);
                    // `^` binds to the last letter of a run only.
                    let v = if i + 1 == chars.len() && self.peek() == Some(&Tok::Caret) {
                        self.next();
                        let k = match self.next() {
                            Some(Tok::Num(k)) if k >= 1 => k,
                            other => return Err(Error::Parse(format!("bad exponent {other:?}"))),
                        };
                        let op = self.binary()?;
                        let mut p = v.clone();
                        for _ in 1..k {
                            p = HyperTerm::App(op.clone(), vec![p, v.clone()]);
                        }
                        p
                    } else {
                        v
                    };
                    acc = Some(match acc {
                        None => v,
                        Some(a) => HyperTerm::App(self.binary()?, vec![a, v]),
                    });
                }
                acc.ok_or(Error::EmptyInput)
            }
            Some(Tok::Ident(s)) => {
                if let Some(i) = var_index(&s) {
                    return Ok(HyperTerm::Var(i));
                }
                if self.peek() != Some(&Tok::LParen) {
                    return Err(Error::UnknownSymbol(s));
                }
                self.next();
                let mut args = Vec::new();
                if self.peek() != Some(&Tok::RParen) {
                    loop {
                        args.push(self.product()?);
                        if self.peek() == Some(&Tok::Comma) {
                            self.next();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                if s.chars().next().is_some_and(char::is_uppercase) {
                    if args.is_empty() {
                        return Err(Error::BadArity(s));
                    }
                    return Ok(HyperTerm::fun(&s, args));
                }
                let sym = self
                    .sig
                    .and_then(|g| g.symbol(&s))
                    .ok_or_else(|| Error::UnknownSymbol(s.clone()))?;
                if sym.arity != args.len() {
                    return Err(Error::WrongChildCount {
                        name: s,
                        expected: sym.arity,
                        got: args.len(),
                    });
                }
                Ok(HyperTerm::App(sym.clone(), args))
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn parse_with(
    text: &str,
    sig: Option<&SimilarityType>,
    letters: &mut Vec<char>,
) -> Result<HyperTerm> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::EmptyInput);
    }
    let shorthand = is_shorthand(&toks, sig);
    let mut p = Parser {
        toks,
        pos: 0,
        sig,
        letters,
        shorthand,
    };
    let t = p.product()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    t.function_variables()?;
    Ok(t)
}

/// Parses a term: `x<k>` variables, `name(arg,…)` applications, and for types
/// with exactly one binary symbol also juxtaposition/`*`/`·` products and
/// `^k` powers (left-associated). A word of plain letters such as `xxyyz` is
/// semigroup shorthand: letters become `x1, x2, …` by first appearance.
pub fn parse_term(text: &str, signature: &SimilarityType) -> Result<Term> {
    let mut letters = Vec::new();
    let h = parse_with(text, Some(signature), &mut letters)?;
    h.to_term().ok_or_else(|| {
        Error::Parse("function variables are not allowed in a first-order term".into())
    })
}

/// Parses `lhs = rhs`; shorthand letters are shared between the sides.
pub fn parse_identity(text: &str, signature: &SimilarityType) -> Result<Identity> {
    let (l, r) = split_equation(text)?;
    let mut letters = Vec::new();
    let lhs = parse_with(l, Some(signature), &mut letters)?;
    let rhs = parse_with(r, Some(signature), &mut letters)?;
    match (lhs.to_term(), rhs.to_term()) {
        (Some(lhs), Some(rhs)) => Ok(Identity::new(lhs, rhs)),
        _ => Err(Error::Parse(
            "function variables are not allowed in a first-order identity".into(),
        )),
    }
}

pub fn parse_hyperterm(text: &str, signature: Option<&SimilarityType>) -> Result<HyperTerm> {
    let mut letters = Vec::new();
    parse_with(text, signature, &mut letters)
}

/// Parses both sides of a hyperidentity written `lhs = rhs`.
pub fn parse_hyper_sides(
    text: &str,
    signature: Option<&SimilarityType>,
) -> Result<(HyperTerm, HyperTerm)> {
    let (l, r) = split_equation(text)?;
    let mut letters = Vec::new();
    Ok((
        parse_with(l, signature, &mut letters)?,
        parse_with(r, signature, &mut letters)?,
    ))
}

fn split_equation(text: &str) -> Result<(&str, &str)> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let parts: Vec<&str> = text.split(['=', '≈']).collect();
    match parts.as_slice() {
        [l, r] if !l.trim().is_empty() && !r.trim().is_empty() => Ok((l, r)),
        _ => Err(Error::Parse(format!("expected `lhs = rhs`, got `{text}`"))),
    }
}

/// Canonical printing: minimal parentheses and juxtaposition when the type is
/// a single binary symbol, full prefix form otherwise.
pub fn format_term(t: &Term, signature: &SimilarityType) -> String {
    if signature.len() == 1 && signature.sole_binary().is_some() {
        let mut s = String::new();
        write_juxtaposed(t, &mut s);
        s
    } else {
        t.to_string()
    }
}

fn write_juxtaposed(t: &Term, out: &mut String) {
    match t {
        Term::Var(i) => out.push_str(&format!("x{i}")),
        Term::App(f, cs) if f.arity == 2 => {
            write_juxtaposed(&cs[0], out);
            if cs[1].is_var() {
                write_juxtaposed(&cs[1], out);
            } else {
                out.push('(');
                write_juxtaposed(&cs[1], out);
                out.push(')');
            }
        }
        other => out.push_str(&other.to_string()),
    }
}

pub fn format_identity(e: &Identity, signature: &SimilarityType) -> String {
    format!(
        "{} = {}",
        format_term(&e.lhs, signature),
        format_term(&e.rhs, signature)
    )
}

/// Prints a binary-operation term as a letter word (`x1 ↦ x`, `x2 ↦ y`, …,
/// falling back to `x<k>` past the fourth variable) ignoring bracketing.
pub fn word_string(word: &[u32]) -> String {
    const LETTERS: [char; 4] = ['x', 'y', 'z', 'w'];
    let mut s = String::new();
    let mut i = 0;
    while i < word.len() {
        let v = word[i];
        let mut j = i;
        while j < word.len() && word[j] == v {
            j += 1;
        }
        let run = j - i;
        match LETTERS.get(v as usize - 1) {
            Some(c) => s.push(*c),
            None => s.push_str(&format!("x{v}")),
        }
        if run > 1 {
            s.push('^');
            s.push_str(&run.to_string());
        }
        i = j;
    }
    s
}

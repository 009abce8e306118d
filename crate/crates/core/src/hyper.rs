//! Hyperidentities and their expansion into first-order identity sets.
//!
//! A hyperidentity pairs two hyperterms. Given a similarity type and a range
//! for the function variables (the [`ExpansionMode`]), every assignment of
//! same-arity terms to the function variables yields one identity. The full
//! set is infinite, so expansion is cut off by the op count of the assigned
//! terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rewrite::{self, Budget, Direction, Outcome, Proof, Step};
use crate::term::{
    apply_hypersubstitution, enumerate_terms, parse_hyper_sides, FunctionVariable, HyperTerm,
    Hypersubstitution, Identity, Subst, Term,
};
use crate::typesys::SimilarityType;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperidentity {
    pub lhs: HyperTerm,
    pub rhs: HyperTerm,
    pub function_variables: Vec<FunctionVariable>,
}

impl Hyperidentity {
    pub fn new(lhs: HyperTerm, rhs: HyperTerm) -> Result<Self> {
        let mut fvars = lhs.function_variables()?;
        for (name, arity) in rhs.function_variables()? {
            if let Some(&a) = fvars.get(&name) {
                if a != arity {
                    return Err(Error::InconsistentArity {
                        name: name.to_string(),
                        first: a,
                        second: arity,
                    });
                }
            }
            fvars.insert(name, arity);
        }
        Ok(Hyperidentity {
            lhs,
            rhs,
            function_variables: fvars
                .into_iter()
                .map(|(name, arity)| FunctionVariable { name, arity })
                .collect(),
        })
    }

    /// Parses `F(x1,F(x2,x3)) = F(F(x1,x2),x3)`; capitalized names applied to
    /// arguments are function variables.
    pub fn parse(text: &str, signature: Option<&SimilarityType>) -> Result<Self> {
        let (l, r) = parse_hyper_sides(text, signature)?;
        Self::new(l, r)
    }

    /// Reads an identity over `tau` as a hyperidentity whose function
    /// variables are the signature symbols (hypersubstitutions replace the
    /// fundamental operations themselves).
    pub fn from_signature_identity(e: &Identity) -> Result<Self> {
        Self::new(
            HyperTerm::symbols_as_variables(&e.lhs),
            HyperTerm::symbols_as_variables(&e.rhs),
        )
    }

    /// The converse reading: function variables become the symbols of `tau`.
    /// Variables and symbols are paired in (arity descending, name) order;
    /// the counts and arities must agree.
    pub fn to_signature_identity(&self, tau: &SimilarityType) -> Result<Identity> {
        let mut fvars = self.function_variables.clone();
        fvars.sort_by(|a, b| b.arity.cmp(&a.arity).then_with(|| a.name.cmp(&b.name)));
        let arities: Vec<usize> = fvars.iter().map(|f| f.arity).collect();
        if arities != tau.arities() {
            return Err(Error::BadParam(format!(
                "function variables of arities {arities:?} do not match the type {tau}"
            )));
        }
        let mut s = Hypersubstitution::new();
        for (fv, sym) in fvars.iter().zip(tau.symbols()) {
            let image = Term::App(sym.clone(), (1..=sym.arity as u32).map(Term::Var).collect());
            s.insert(fv.clone(), image)?;
        }
        Ok(Identity::new(
            apply_hypersubstitution(&self.lhs, &s)?,
            apply_hypersubstitution(&self.rhs, &s)?,
        ))
    }

    pub fn instantiate(&self, s: &Hypersubstitution) -> Result<Identity> {
        Ok(Identity::new(
            apply_hypersubstitution(&self.lhs, s)?,
            apply_hypersubstitution(&self.rhs, s)?,
        ))
    }
}

impl fmt::Display for Hyperidentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Named hyperidentities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Hyperassociativity,
    Hyperidempotency,
    Hypermediality,
    /// `n×n` entropic law: `F` of the `G`-rows equals `G` of the `F`-columns.
    Entropic(usize),
    Hypercommutativity,
    /// `F^p(x) = F^q(x)` for a unary `F`.
    UnaryPower(usize, usize),
    /// `F^n(x) = F(x)`.
    Burnside(usize),
}

impl Builtin {
    pub const NAMES: [&'static str; 7] = [
        "hyperassociativity",
        "hyperidempotency",
        "hypermediality",
        "entropic",
        "hypercommutativity",
        "unary_power",
        "burnside",
    ];

    /// Looks up a builtin by name and numeric parameters.
    pub fn from_name(name: &str, params: &[usize]) -> Result<Self> {
        let need = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::BadParam(format!(
                    "`{name}` takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let b = match name {
            "hyperassociativity" => {
                need(0)?;
                Builtin::Hyperassociativity
            }
            "hyperidempotency" => {
                need(0)?;
                Builtin::Hyperidempotency
            }
            "hypermediality" => {
                need(0)?;
                Builtin::Hypermediality
            }
            "hypercommutativity" => {
                need(0)?;
                Builtin::Hypercommutativity
            }
            "entropic" => {
                need(1)?;
                Builtin::Entropic(params[0])
            }
            "unary_power" => {
                need(2)?;
                Builtin::UnaryPower(params[0], params[1])
            }
            "burnside" => {
                need(1)?;
                Builtin::Burnside(params[0])
            }
            other => return Err(Error::BadParam(format!("unknown hyperidentity `{other}`"))),
        };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Builtin::Entropic(n) | Builtin::Burnside(n) if n < 2 => Err(Error::BadParam(format!(
                "parameter must be at least 2, got {n}"
            ))),
            Builtin::UnaryPower(p, q) if p == q || p == 0 || q == 0 => Err(Error::BadParam(
                format!("powers must be distinct and positive, got {p},{q}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn hyperidentity(&self) -> Result<Hyperidentity> {
        self.validate()?;
        let x = HyperTerm::Var;
        let f = |cs: Vec<HyperTerm>| HyperTerm::fun("F", cs);
        let g = |cs: Vec<HyperTerm>| HyperTerm::fun("G", cs);
        let unary_power = |k: usize| (0..k).fold(x(1), |acc, _| f(vec![acc]));
        let (lhs, rhs) = match *self {
            Builtin::Hyperassociativity => (
                f(vec![x(1), f(vec![x(2), x(3)])]),
                f(vec![f(vec![x(1), x(2)]), x(3)]),
            ),
            Builtin::Hyperidempotency => (f(vec![x(1)]), x(1)),
            Builtin::Hypermediality => (
                f(vec![g(vec![x(1), x(2)]), g(vec![x(3), x(4)])]),
                g(vec![f(vec![x(1), x(3)]), f(vec![x(2), x(4)])]),
            ),
            Builtin::Entropic(n) => {
                let v = |i: usize, j: usize| x((i * n + j + 1) as u32);
                (
                    f((0..n)
                        .map(|i| g((0..n).map(|j| v(i, j)).collect()))
                        .collect()),
                    g((0..n)
                        .map(|j| f((0..n).map(|i| v(i, j)).collect()))
                        .collect()),
                )
            }
            Builtin::Hypercommutativity => (f(vec![x(1), x(2)]), f(vec![x(2), x(1)])),
            Builtin::UnaryPower(p, q) => (unary_power(p), unary_power(q)),
            Builtin::Burnside(n) => (unary_power(n), unary_power(1)),
        };
        Hyperidentity::new(lhs, rhs)
    }
}

impl FromStr for Builtin {
    type Err = Error;

    /// `name` or `name:p1,p2`, e.g. `unary_power:2,3`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (
                n.trim(),
                p.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::BadParam(format!("bad parameter `{x}`")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => (s.trim(), Vec::new()),
        };
        Builtin::from_name(name, &params)
    }
}

/// Catalog lookup by name and parameters.
pub fn builtin(name: &str, params: &[usize]) -> Result<Hyperidentity> {
    Builtin::from_name(name, params)?.hyperidentity()
}

/// Range of the function variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpansionMode {
    /// All terms of the type, projections included.
    Taylor,
    /// All terms except bare variables.
    Prehyper,
    /// Explicit allowed terms per arity.
    Restricted(BTreeMap<usize, Vec<Term>>),
}

impl ExpansionMode {
    pub fn includes_projections(&self) -> bool {
        matches!(self, ExpansionMode::Taylor)
    }

    /// Candidate images for a function variable of arity `arity`.
    pub fn candidates(
        &self,
        tau: &SimilarityType,
        arity: usize,
        max_ops: usize,
    ) -> Result<Vec<Term>> {
        match self {
            ExpansionMode::Taylor => Ok(enumerate_terms(tau, arity as u32, max_ops, true)),
            ExpansionMode::Prehyper => Ok(enumerate_terms(tau, arity as u32, max_ops, false)),
            ExpansionMode::Restricted(lists) => {
                let list = lists.get(&arity).map(Vec::as_slice).unwrap_or(&[]);
                for t in list {
                    if let Some(&v) = t.vars().iter().find(|&&v| v as usize > arity) {
                        return Err(Error::ImageArity {
                            name: format!("<restricted arity {arity}>"),
                            var: v,
                            arity,
                        });
                    }
                    if let Some(bad) = t
                        .symbols()
                        .into_iter()
                        .find(|s| tau.symbol(&s.name) != Some(s))
                    {
                        return Err(Error::UnknownSymbol(bad.name.to_string()));
                    }
                }
                Ok(list
                    .iter()
                    .filter(|t| t.op_count() <= max_ops)
                    .cloned()
                    .collect())
            }
        }
    }
}

/// All hypersubstitutions assigning each function variable of `e` a candidate
/// term; assignments are listed in lexicographic candidate order.
pub fn hypersubstitutions(
    e: &Hyperidentity,
    tau: &SimilarityType,
    mode: &ExpansionMode,
    max_ops: usize,
) -> Result<Vec<Hypersubstitution>> {
    let pools: Vec<(FunctionVariable, Vec<Term>)> = e
        .function_variables
        .iter()
        .map(|fv| Ok((fv.clone(), mode.candidates(tau, fv.arity, max_ops)?)))
        .collect::<Result<_>>()?;
    let mut out = vec![Hypersubstitution::new()];
    for (fv, pool) in &pools {
        let mut next = Vec::with_capacity(out.len() * pool.len());
        for s in &out {
            for t in pool {
                let mut s2 = s.clone();
                s2.0.insert(fv.clone(), t.clone());
                next.push(s2);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Expands `⟨e, tau⟩` under `mode`, with every substituted term having at
/// most `max_ops` operation symbols. The result is canonicalized,
/// deduplicated, free of reflexive identities, and sorted.
pub fn expand(
    e: &Hyperidentity,
    tau: &SimilarityType,
    mode: &ExpansionMode,
    max_ops: usize,
) -> Result<Vec<Identity>> {
    let subs = hypersubstitutions(e, tau, mode, max_ops)?;
    let found: BTreeSet<((usize, String, usize, String), Identity)> = subs
        .par_iter()
        .map(|s| e.instantiate(s).map(|id| id.canonical()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|id| !id.is_reflexive())
        .map(|id| (id.print_key(), id))
        .collect();
    Ok(found.into_iter().map(|(_, id)| id).collect())
}

/// Outcome of [`triviality_probe`].
#[derive(Debug, Clone)]
pub enum Triviality {
    /// `x1 = x2` follows; the proof is relative to `axioms`.
    Trivial { axioms: Vec<Identity>, proof: Proof },
    /// Nothing found at these bounds. Not a claim of nontriviality.
    Unknown { axioms: usize, visited: usize },
}

impl Triviality {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Triviality::Trivial { .. })
    }
}

/// The identity `x1 = x2`.
pub fn trivial_goal() -> Identity {
    Identity::new(Term::Var(1), Term::Var(2))
}

/// Semi-decides triviality: looks for `x1 = x2` in the bounded expansion,
/// then searches for a derivation from it.
pub fn triviality_probe(
    e: &Hyperidentity,
    tau: &SimilarityType,
    mode: &ExpansionMode,
    expansion_bound: usize,
    budget: &Budget,
) -> Result<Triviality> {
    let axioms = expand(e, tau, mode, expansion_bound)?;
    let goal = trivial_goal();
    if let Some(i) = axioms.iter().position(|a| *a == goal) {
        let sub: Subst = [(1, Term::Var(1)), (2, Term::Var(2))].into();
        let proof = Proof {
            steps: vec![Step {
                axiom: i,
                dir: Direction::LeftToRight,
                pos: vec![],
                sub,
            }],
        };
        return Ok(Triviality::Trivial { axioms, proof });
    }
    if axioms.is_empty() {
        return Ok(Triviality::Unknown {
            axioms: 0,
            visited: 0,
        });
    }
    match rewrite::derive_bounded(&axioms, &goal, budget) {
        Outcome::Derived(proof) => Ok(Triviality::Trivial { axioms, proof }),
        Outcome::Unknown { visited } => Ok(Triviality::Unknown {
            axioms: axioms.len(),
            visited,
        }),
    }
}

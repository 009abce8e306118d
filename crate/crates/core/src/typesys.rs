//! Nice similarity types and the order generated by symbol deletion and
//! arity decrement.
//!
//! A type is a finite list of function symbols, each of arity at least one.
//! Types are kept in canonical form: symbols sorted by arity (descending),
//! then by name. The order only looks at the arity multiset; names are
//! labels.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A function symbol: a name and a positive arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub name: Arc<str>,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        Symbol {
            name: Arc::from(name),
            arity,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimilarityType {
    symbols: Vec<Symbol>,
}

impl SimilarityType {
    /// Builds a type from symbols, validating and canonicalizing.
    pub fn new(mut symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if s.arity == 0 {
                return Err(Error::BadArity(s.to_string()));
            }
            if !seen.insert(s.name.clone()) {
                return Err(Error::DuplicateName(s.name.to_string()));
            }
        }
        symbols.sort_by(|a, b| b.arity.cmp(&a.arity).then_with(|| a.name.cmp(&b.name)));
        Ok(SimilarityType { symbols })
    }

    /// Type with auto-named symbols `f1, f2, …` for the given arities.
    pub fn from_arities(arities: &[usize]) -> Result<Self> {
        Self::new(
            arities
                .iter()
                .enumerate()
                .map(|(i, &a)| Symbol::new(&format!("f{}", i + 1), a))
                .collect(),
        )
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Arities in canonical (descending) order.
    pub fn arities(&self) -> Vec<usize> {
        self.symbols.iter().map(|s| s.arity).collect()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.iter().find(|s| &*s.name == name)
    }

    pub fn symbols_of_arity(&self, arity: usize) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(move |s| s.arity == arity)
    }

    /// The unique binary symbol, if the type has exactly one.
    pub fn sole_binary(&self) -> Option<&Symbol> {
        let mut it = self.symbols_of_arity(2);
        match (it.next(), it.next()) {
            (Some(s), None) => Some(s),
            _ => None,
        }
    }

    pub fn is_all_unary(&self) -> bool {
        self.symbols.iter().all(|s| s.arity == 1)
    }
}

impl fmt::Display for SimilarityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s.arity)?;
        }
        write!(f, ">")
    }
}

/// Parses `2,1` or `f:2,g:1` (mixing allowed). Unnamed symbols are called
/// `f1, f2, …` by their position in the input.
pub fn parse_type(text: &str) -> Result<SimilarityType> {
    let body = text
        .trim()
        .trim_start_matches('<')
        .trim_end_matches('>')
        .trim();
    if body.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut symbols = Vec::new();
    for (i, entry) in body.split(',').enumerate() {
        let entry = entry.trim();
        let (name, arity_text) = match entry.split_once(':') {
            Some((n, a)) => (n.trim().to_string(), a.trim()),
            None => (format!("f{}", i + 1), entry),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(Error::Parse(format!("bad symbol name in `{entry}`")));
        }
        let arity: i64 = arity_text
            .parse()
            .map_err(|_| Error::Parse(format!("bad arity in `{entry}`")))?;
        if arity <= 0 {
            return Err(Error::BadArity(entry.to_string()));
        }
        symbols.push(Symbol::new(&name, arity as usize));
    }
    SimilarityType::new(symbols)
}

/// Immediate predecessors under the generating moves: delete one symbol
/// (keeping at least one) or lower one arity by one (keeping it positive).
/// Results are deduplicated by arity multiset.
pub fn lower_covers(tau: &SimilarityType) -> Vec<SimilarityType> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |t: SimilarityType| {
        if seen.insert(t.arities()) {
            out.push(t);
        }
    };
    for i in 0..tau.symbols.len() {
        if tau.symbols.len() >= 2 {
            let mut syms = tau.symbols.clone();
            syms.remove(i);
            push(SimilarityType::new(syms).expect("deletion keeps validity"));
        }
        if tau.symbols[i].arity >= 2 {
            let mut syms = tau.symbols.clone();
            syms[i].arity -= 1;
            push(SimilarityType::new(syms).expect("decrement keeps validity"));
        }
    }
    out
}

/// `sigma ⪯ tau`: some injection of sigma's symbols into tau's never lowers
/// arity. Pairing both arity lists sorted descending is optimal, so the check
/// is a single zip.
pub fn type_leq(sigma: &SimilarityType, tau: &SimilarityType) -> bool {
    sigma.len() <= tau.len()
        && sigma
            .symbols
            .iter()
            .zip(&tau.symbols)
            .all(|(s, t)| s.arity <= t.arity)
}

/// Strict part of [`type_leq`]: below and with a different arity multiset.
pub fn strict_lt(sigma: &SimilarityType, tau: &SimilarityType) -> bool {
    type_leq(sigma, tau) && sigma.arities() != tau.arities()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> SimilarityType {
        parse_type(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        let t = ty("2");
        assert_eq!(t.symbols(), &[Symbol::new("f1", 2)]);
        let t = ty("2,1");
        assert_eq!(t.symbols(), &[Symbol::new("f1", 2), Symbol::new("f2", 1)]);
        assert_eq!(ty("1,2").to_string(), "<2,1>");
        assert_eq!(ty("g:1,f:3").symbols()[0], Symbol::new("f", 3));
        assert!(matches!(parse_type("0"), Err(Error::BadArity(_))));
        assert!(matches!(parse_type("-1"), Err(Error::BadArity(_))));
        assert!(matches!(parse_type(""), Err(Error::EmptyInput)));
        assert!(matches!(
            parse_type("f:2,f:1"),
            Err(Error::DuplicateName(_))
        ));
        assert!(parse_type("2,x").is_err());
    }

    #[test]
    fn covers_examples() {
        let arities = |t: &str| {
            let mut v: Vec<_> = lower_covers(&ty(t)).iter().map(|s| s.arities()).collect();
            v.sort();
            v
        };
        assert_eq!(arities("2,2"), vec![vec![2], vec![2, 1]]);
        assert!(arities("1").is_empty());
        assert_eq!(arities("3"), vec![vec![2]]);
    }

    #[test]
    fn leq_examples() {
        assert!(type_leq(&ty("2"), &ty("2,2")));
        assert!(type_leq(&ty("1"), &ty("2")));
        assert!(!type_leq(&ty("2,1"), &ty("1,1,1")));
        assert!(!type_leq(&ty("1,1,1"), &ty("2,1")));
        let t = ty("3,1");
        assert!(type_leq(&t, &t));
        assert!(!strict_lt(&t, &t));
        assert!(strict_lt(&ty("2"), &ty("2,2")));
    }
}

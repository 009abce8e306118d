//! Thue–Morse and square-free words, square detection, and the bridge from
//! words to unary composition terms.
//!
//! Words here are plain letter sequences and may be empty.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::term::Term;
use crate::typesys::Symbol;

/// First `n` letters of the Thue–Morse sequence: the parity of the binary
/// digit sum of each index.
pub fn thue_morse(n: usize) -> Vec<u8> {
    (0..n).map(|i| (i.count_ones() & 1) as u8).collect()
}

/// First `n` letters of the fixed point of `a → abc, b → ac, c → b`.
pub fn ternary_squarefree(n: usize) -> String {
    let mut w = vec![b'a'];
    while w.len() < n {
        w = w
            .iter()
            .flat_map(|&c| match c {
                b'a' => &b"abc"[..],
                b'b' => &b"ac"[..],
                _ => &b"b"[..],
            })
            .copied()
            .collect();
    }
    w.truncate(n);
    String::from_utf8(w).expect("ascii")
}

/// Every square factor `vv` as (start, root length), ordered by start then
/// root length.
pub fn square_factors<T: PartialEq>(w: &[T]) -> Vec<(usize, usize)> {
    let n = w.len();
    let mut out = Vec::new();
    for p in 1..=n / 2 {
        // run = number of consecutive positions i with w[i] == w[i + p]
        // ending at the current index
        let mut run = 0;
        for i in 0..n - p {
            if w[i] == w[i + p] {
                run += 1;
                if run >= p {
                    out.push((i + 1 - p, p));
                }
            } else {
                run = 0;
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_square_free<T: PartialEq>(w: &[T]) -> bool {
    let n = w.len();
    for p in 1..=n / 2 {
        let mut run = 0;
        for i in 0..n - p {
            if w[i] == w[i + p] {
                run += 1;
                if run >= p {
                    return false;
                }
            } else {
                run = 0;
            }
        }
    }
    true
}

/// Reads `w` as a composition of unary symbols, first letter outermost, and
/// applies it to `x1`.
pub fn word_to_unary_term(w: &str, letter_map: &BTreeMap<char, Symbol>) -> Result<Term> {
    let mut t = Term::Var(1);
    for c in w.chars().rev() {
        let s = letter_map
            .get(&c)
            .ok_or_else(|| Error::UnknownSymbol(c.to_string()))?;
        if s.arity != 1 {
            return Err(Error::BadArity(format!(
                "{} has arity {}, expected 1",
                s.name, s.arity
            )));
        }
        t = Term::App(s.clone(), vec![t]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thue_morse_prefix() {
        assert_eq!(thue_morse(8), vec![0, 1, 1, 0, 1, 0, 0, 1]);
        assert!(thue_morse(0).is_empty());
    }

    #[test]
    fn ternary_prefix() {
        assert_eq!(ternary_squarefree(6), "abcacb");
        assert_eq!(ternary_squarefree(1), "a");
        assert_eq!(ternary_squarefree(0), "");
    }

    #[test]
    fn squares() {
        assert_eq!(square_factors(b"aa"), vec![(0, 1)]);
        assert!(!is_square_free(b"aa"));
        assert!(is_square_free(b"abcacb"));
        assert_eq!(square_factors(b"abcabc"), vec![(0, 3)]);
        assert!(is_square_free::<u8>(&[]));
    }

    #[test]
    fn unary_bridge() {
        let f = Symbol::new("f", 1);
        let g = Symbol::new("g", 1);
        let map: BTreeMap<char, Symbol> = [('a', f.clone()), ('b', g.clone())].into();
        let t = word_to_unary_term("ab", &map).unwrap();
        assert_eq!(t, Term::App(f, vec![Term::App(g, vec![Term::Var(1)])]));
        assert_eq!(word_to_unary_term("", &map).unwrap(), Term::Var(1));
        assert!(word_to_unary_term("c", &map).is_err());
        let bad: BTreeMap<char, Symbol> = [('a', Symbol::new("h", 2))].into();
        assert!(matches!(
            word_to_unary_term("a", &bad),
            Err(Error::BadArity(_))
        ));
    }
}

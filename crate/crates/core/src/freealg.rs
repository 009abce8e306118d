//! Relatively free semigroups by bounded congruence closure over words.
//!
//! Words over the generators `a, b, …` up to a length bound are numbered in
//! shortlex order, so a union-find that always keeps the smaller index as
//! root has the shortlex-minimal member of every class as its root. Bare
//! instances of the identities seed the union-find and a worklist closes it
//! under one-letter contexts on both sides.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rewrite::{
    word_budget, word_derive_bounded, Budget, Outcome, WordIdentity, WordProof, WordStep,
};

/// A nonempty word over the generators; letter `0` is `a`.
/// Ordered shortlex: by length, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenWord(pub Vec<u8>);

impl Ord for GenWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}

impl PartialOrd for GenWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl GenWord {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        for c in text.chars().filter(|c| !c.is_whitespace()) {
            if !c.is_ascii_lowercase() {
                return Err(Error::Parse(format!(
                    "generator words use letters a-z, got {c:?}"
                )));
            }
            out.push(c as u8 - b'a');
        }
        if out.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(GenWord(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letters as variables `1, 2, …` for the word engine.
    pub fn to_vars(&self) -> Vec<u32> {
        self.0.iter().map(|&l| l as u32 + 1).collect()
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{}", (b'a' + l) as char)?;
        }
        Ok(())
    }
}

impl Serialize for GenWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Prints a word identity with letters `x, y, z, …`.
pub fn identity_string(e: &WordIdentity) -> String {
    let side = |w: &[u32]| -> String {
        w.iter()
            .map(|&v| {
                const NAMES: &[u8] = b"xyzuvwst";
                match NAMES.get(v as usize - 1) {
                    Some(&c) => (c as char).to_string(),
                    None => format!("x{v}"),
                }
            })
            .collect()
    };
    format!("{}={}", side(&e.lhs), side(&e.rhs))
}

fn check_identities(identities: &[WordIdentity]) -> Result<()> {
    if identities.is_empty() {
        return Err(Error::EmptyInput);
    }
    for e in identities {
        if e.lhs.is_empty() || e.rhs.is_empty() {
            return Err(Error::BadParam(
                "identity sides must be nonempty words".into(),
            ));
        }
        if e.lhs.iter().chain(&e.rhs).any(|&v| v == 0) {
            return Err(Error::BadParam("word variables are numbered from 1".into()));
        }
    }
    Ok(())
}

/// Shortlex numbering of all words of length `1..=max_len` over `k` letters.
#[derive(Debug, Clone)]
struct Space {
    k: usize,
    max_len: usize,
    /// `offsets[n]` is the index of the first word of length `n`; the last
    /// entry is the total count.
    offsets: Vec<usize>,
    pows: Vec<usize>,
}

impl Space {
    fn new(k: usize, max_len: usize, limit: usize) -> Option<Self> {
        let mut offsets = vec![0usize, 0];
        let mut pows = vec![1usize];
        for n in 1..=max_len {
            let p = pows[n - 1].checked_mul(k)?;
            pows.push(p);
            let next = offsets[n].checked_add(p)?;
            if next > limit {
                return None;
            }
            offsets.push(next);
        }
        Some(Space {
            k,
            max_len,
            offsets,
            pows,
        })
    }

    fn total(&self) -> usize {
        self.offsets[self.max_len + 1]
    }

    fn index(&self, w: &[u8]) -> usize {
        let mut v = 0;
        for &l in w {
            v = v * self.k + l as usize;
        }
        self.offsets[w.len()] + v
    }

    fn len_of(&self, idx: usize) -> usize {
        self.offsets.partition_point(|&o| o <= idx) - 1
    }

    fn word(&self, idx: usize) -> Vec<u8> {
        let n = self.len_of(idx);
        let mut v = idx - self.offsets[n];
        let mut out = vec![0u8; n];
        for slot in out.iter_mut().rev() {
            *slot = (v % self.k) as u8;
            v /= self.k;
        }
        out
    }

    fn append(&self, idx: usize, n: usize, a: usize) -> usize {
        self.offsets[n + 1] + (idx - self.offsets[n]) * self.k + a
    }

    fn prepend(&self, a: usize, idx: usize, n: usize) -> usize {
        self.offsets[n + 1] + a * self.pows[n] + (idx - self.offsets[n])
    }
}

/// The closed partition of all words up to one length bound.
#[derive(Debug, Clone)]
pub struct Partition {
    space: Space,
    parent: Vec<u32>,
}

impl Partition {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let gp = self.parent[self.parent[x] as usize];
            self.parent[x] = gp;
            x = gp as usize;
        }
        x
    }

    fn root(&self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            x = self.parent[x] as usize;
        }
        x
    }

    /// Closes under instances of `identities` and one-letter contexts.
    fn close(&mut self, identities: &[WordIdentity]) {
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        for e in identities {
            for_each_instance(e, self.space.k, self.space.max_len, |l, r| {
                queue.push_back((self.space.index(l), self.space.index(r)));
            });
        }
        self.propagate(queue);
    }

    /// Unions every queued pair and the one-letter contexts of every merge.
    fn propagate(&mut self, mut queue: VecDeque<(usize, usize)>) {
        let (k, max_len) = (self.space.k, self.space.max_len);
        while let Some((u, v)) = queue.pop_front() {
            let (ru, rv) = (self.find(u), self.find(v));
            if ru == rv {
                continue;
            }
            let (keep, gone) = (ru.min(rv), ru.max(rv));
            self.parent[gone] = keep as u32;
            // Every member's contexts were already tied to its old root's,
            // so tying the two roots' contexts suffices. `gone` is the longer.
            let (nk, ng) = (self.space.len_of(keep), self.space.len_of(gone));
            if ng < max_len {
                for a in 0..k {
                    queue.push_back((
                        self.space.append(keep, nk, a),
                        self.space.append(gone, ng, a),
                    ));
                    queue.push_back((
                        self.space.prepend(a, keep, nk),
                        self.space.prepend(a, gone, ng),
                    ));
                }
            }
        }
        for x in 0..self.parent.len() {
            let r = self.root(x) as u32;
            self.parent[x] = r;
        }
    }

    fn roots(&self) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&x| self.parent[x] as usize == x)
            .collect()
    }

    /// Shortlex-minimal representative of the class of `w`, if `w` is within
    /// the bound.
    pub fn representative(&self, w: &[u8]) -> Option<GenWord> {
        if w.is_empty()
            || w.len() > self.space.max_len
            || w.iter().any(|&l| l as usize >= self.space.k)
        {
            return None;
        }
        Some(GenWord(self.space.word(self.root(self.space.index(w)))))
    }

    pub fn bound(&self) -> usize {
        self.space.max_len
    }
}

/// Calls `f(lhs σ, rhs σ)` for every substitution σ of nonempty words over
/// `k` letters with both sides of length at most `max_len`.
fn for_each_instance(e: &WordIdentity, k: usize, max_len: usize, mut f: impl FnMut(&[u8], &[u8])) {
    let mut vars: Vec<u32> = e.lhs.iter().chain(&e.rhs).copied().collect();
    vars.sort_unstable();
    vars.dedup();
    let count = |side: &[u32], v: u32| side.iter().filter(|&&x| x == v).count();
    let cl: Vec<usize> = vars.iter().map(|&v| count(&e.lhs, v)).collect();
    let cr: Vec<usize> = vars.iter().map(|&v| count(&e.rhs, v)).collect();
    // Smallest contribution of the variables after position i.
    let mut rest_l = vec![0; vars.len() + 1];
    let mut rest_r = vec![0; vars.len() + 1];
    for i in (0..vars.len()).rev() {
        rest_l[i] = rest_l[i + 1] + cl[i];
        rest_r[i] = rest_r[i + 1] + cr[i];
    }
    let slot = |v: u32| vars.binary_search(&v).expect("collected above");
    let mut images: Vec<Vec<u8>> = vec![Vec::new(); vars.len()];
    let (mut l, mut r) = (Vec::new(), Vec::new());

    #[allow(clippy::too_many_arguments, clippy::type_complexity)]
    fn go(
        i: usize,
        used_l: usize,
        used_r: usize,
        ctx: &mut (
            &WordIdentity,
            usize,
            usize,
            &[usize],
            &[usize],
            &[usize],
            &[usize],
        ),
        images: &mut Vec<Vec<u8>>,
        slot: &dyn Fn(u32) -> usize,
        l: &mut Vec<u8>,
        r: &mut Vec<u8>,
        f: &mut dyn FnMut(&[u8], &[u8]),
    ) {
        let (e, k, max_len, cl, cr, rest_l, rest_r) = *ctx;
        if i == images.len() {
            l.clear();
            r.clear();
            for &v in &e.lhs {
                l.extend_from_slice(&images[slot(v)]);
            }
            for &v in &e.rhs {
                r.extend_from_slice(&images[slot(v)]);
            }
            f(l, r);
            return;
        }
        let mut n = 1;
        while used_l + cl[i] * n + rest_l[i + 1] <= max_len
            && used_r + cr[i] * n + rest_r[i + 1] <= max_len
        {
            let mut w = vec![0u8; n];
            loop {
                images[i] = w.clone();
                go(
                    i + 1,
                    used_l + cl[i] * n,
                    used_r + cr[i] * n,
                    ctx,
                    images,
                    slot,
                    l,
                    r,
                    f,
                );
                // next word of length n in lexicographic order
                let mut j = n;
                while j > 0 && w[j - 1] as usize == k - 1 {
                    w[j - 1] = 0;
                    j -= 1;
                }
                if j == 0 {
                    break;
                }
                w[j - 1] += 1;
            }
            n += 1;
        }
    }

    let mut ctx = (e, k, max_len, &cl[..], &cr[..], &rest_l[..], &rest_r[..]);
    go(
        0,
        0,
        0,
        &mut ctx,
        &mut images,
        &slot,
        &mut l,
        &mut r,
        &mut f,
    );
}

/// Every pair of words of length at most `max_len` over `k` letters that
/// differ by replacing one factor by its counterpart in an instance of an
/// identity (left side first), deduplicated and sorted.
pub fn instance_merges(
    identities: &[WordIdentity],
    k: usize,
    max_len: usize,
) -> Result<Vec<(GenWord, GenWord)>> {
    check_identities(identities)?;
    if k == 0 {
        return Err(Error::BadParam("at least one generator is required".into()));
    }
    let longest = identities
        .iter()
        .map(|e| e.lhs.len().max(e.rhs.len()))
        .max()
        .unwrap_or(0);
    if max_len < longest {
        return Err(Error::BadParam(format!(
            "bound {max_len} is below the longest identity side {longest}"
        )));
    }
    let mut bare = Vec::new();
    for e in identities {
        for_each_instance(e, k, max_len, |l, r| bare.push((l.to_vec(), r.to_vec())));
    }
    let mut out = BTreeSet::new();
    for (l, r) in &bare {
        let room = max_len - l.len().max(r.len());
        for left in 0..=room {
            for right in 0..=room - left {
                for_each_word(k, left, |p| {
                    for_each_word(k, right, |s| {
                        let u = [p, l.as_slice(), s].concat();
                        let v = [p, r.as_slice(), s].concat();
                        out.insert((GenWord(u), GenWord(v)));
                    })
                });
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Calls `f` on every word of length `n` (including the empty word for 0).
fn for_each_word(k: usize, n: usize, mut f: impl FnMut(&[u8])) {
    let mut w = vec![0u8; n];
    loop {
        f(&w);
        let mut j = n;
        while j > 0 && w[j - 1] as usize == k - 1 {
            w[j - 1] = 0;
            j -= 1;
        }
        if j == 0 {
            return;
        }
        w[j - 1] += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FreeStatus {
    Stable { cardinality: usize },
    BoundExceeded { census: usize },
}

/// Length bound and memory budget for [`free_semigroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeConfig {
    /// Fixed bound; `None` escalates from twice the longest identity side.
    pub bound: Option<usize>,
    /// Largest number of words a single partition may hold.
    pub max_words: usize,
}

impl FreeConfig {
    pub const DEFAULT_MAX_WORDS: usize = 1 << 24;
}

impl Default for FreeConfig {
    fn default() -> Self {
        FreeConfig {
            bound: None,
            max_words: Self::DEFAULT_MAX_WORDS,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FreeAlgebraReport {
    pub identities: Vec<String>,
    pub generators: usize,
    pub bound: usize,
    /// Shortlex-minimal representatives in shortlex order.
    pub classes: Vec<GenWord>,
    pub status: FreeStatus,
    pub multiplication: Option<MultiplicationTable>,
    #[serde(skip)]
    partition: Option<Partition>,
}

impl FreeAlgebraReport {
    pub fn is_stable(&self) -> bool {
        matches!(self.status, FreeStatus::Stable { .. })
    }

    pub fn cardinality(&self) -> Option<usize> {
        match self.status {
            FreeStatus::Stable { cardinality } => Some(cardinality),
            FreeStatus::BoundExceeded { .. } => None,
        }
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    /// Class number of `w`. Words within the bound are looked up directly;
    /// longer words are folded through the multiplication table.
    pub fn class_of(&self, w: &[u8]) -> Option<usize> {
        if let Some(rep) = self.partition.as_ref().and_then(|p| p.representative(w)) {
            return self.classes.binary_search(&rep).ok();
        }
        let table = self.multiplication.as_ref()?;
        table.evaluate(w)
    }
}

/// Class × generator → class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicationTable {
    pub generators: usize,
    pub classes: Vec<GenWord>,
    pub right: Vec<Vec<usize>>,
}

impl MultiplicationTable {
    /// Class of a nonempty word, folding from the class of its first letter.
    pub fn evaluate(&self, w: &[u8]) -> Option<usize> {
        let (&first, rest) = w.split_first()?;
        let mut c = self.classes.iter().position(|r| r.0 == [first])?;
        for &g in rest {
            c = *self.right.get(c)?.get(g as usize)?;
        }
        Some(c)
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.classes[j]
            .0
            .iter()
            .fold(i, |c, &g| self.right[c][g as usize])
    }

    /// Full class × class products.
    pub fn cayley(&self) -> Vec<Vec<usize>> {
        (0..self.classes.len())
            .map(|i| {
                (0..self.classes.len())
                    .map(|j| self.product(i, j))
                    .collect()
            })
            .collect()
    }

    pub fn is_associative(&self) -> bool {
        is_associative(&self.cayley())
    }

    /// Plain-text Cayley table: a header of representatives, then one row per
    /// class giving the representative of each product.
    pub fn to_text(&self) -> String {
        let cay = self.cayley();
        let width = self.classes.iter().map(GenWord::len).max().unwrap_or(1);
        let mut out = String::new();
        out.push_str(&format!("{:>width$} |", ""));
        for c in &self.classes {
            out.push_str(&format!(" {:>width$}", c.to_string()));
        }
        out.push('\n');
        for (i, row) in cay.iter().enumerate() {
            out.push_str(&format!("{:>width$} |", self.classes[i].to_string()));
            for &j in row {
                out.push_str(&format!(" {:>width$}", self.classes[j].to_string()));
            }
            out.push('\n');
        }
        out
    }
}

pub fn is_associative(table: &[Vec<usize>]) -> bool {
    let n = table.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| table[table[a][b]][c] == table[a][table[b][c]])))
}

fn closed_partition(
    identities: &[WordIdentity],
    k: usize,
    max_len: usize,
    max_words: usize,
) -> Option<Partition> {
    let space = Space::new(k, max_len, max_words)?;
    let parent = (0..space.total() as u32).collect();
    let mut p = Partition { space, parent };
    p.close(identities);
    Some(p)
}

/// Plain bounded closure: all words up to `max_len` over `k` letters,
/// partitioned by instances of `identities` in one-letter contexts.
pub fn closure(
    identities: &[WordIdentity],
    k: usize,
    max_len: usize,
    max_words: usize,
) -> Result<Partition> {
    check_identities(identities)?;
    if k == 0 || k > 26 {
        return Err(Error::BadParam("between 1 and 26 generators".into()));
    }
    closed_partition(identities, k, max_len, max_words)
        .ok_or_else(|| Error::BadParam(format!("bound {max_len} exceeds the word budget")))
}

/// Repeatedly builds the class table and merges the classes it shows must
/// coincide, until the table is a model or some class has no
/// representative below the bound.
fn complete(
    identities: &[WordIdentity],
    mut p: Partition,
) -> (Partition, Option<MultiplicationTable>) {
    const PER_ROUND: usize = 4096;
    let (k, bound) = (p.space.k, p.space.max_len);
    loop {
        let roots = p.roots();
        if roots.iter().any(|&r| p.space.len_of(r) >= bound) {
            return (p, None);
        }
        let classes: Vec<GenWord> = roots.iter().map(|&r| GenWord(p.space.word(r))).collect();
        let table = MultiplicationTable {
            generators: k,
            right: right_action(&classes, k, &p),
            classes,
        };
        let forced = model_violations(&table, identities, PER_ROUND);
        if forced.is_empty() {
            return (p, Some(table));
        }
        let queue = forced
            .into_iter()
            .map(|(a, b)| (roots[a], roots[b]))
            .collect();
        p.propagate(queue);
    }
}

enum Attempt {
    Stable(Partition, MultiplicationTable),
    Unstable(Partition),
    TooLarge,
}

fn attempt(identities: &[WordIdentity], k: usize, bound: usize, max_words: usize) -> Attempt {
    let run =
        |b: usize| closed_partition(identities, k, b, max_words).map(|p| complete(identities, p));
    if bound < 2 {
        return match run(bound) {
            Some((p, _)) => Attempt::Unstable(p),
            None => Attempt::TooLarge,
        };
    }
    let (below, at) = rayon::join(|| run(bound - 1), || run(bound));
    match (below, at) {
        (Some((_, Some(low))), Some((p, Some(table))))
            if low.classes.len() == table.classes.len() =>
        {
            Attempt::Stable(p, table)
        }
        (Some(_), Some((p, _))) => Attempt::Unstable(p),
        _ => Attempt::TooLarge,
    }
}

fn right_action(classes: &[GenWord], k: usize, p: &Partition) -> Vec<Vec<usize>> {
    classes
        .iter()
        .map(|rep| {
            (0..k)
                .map(|g| {
                    let mut w = rep.0.clone();
                    w.push(g as u8);
                    let r = p
                        .representative(&w)
                        .expect("representatives are below the bound");
                    classes.binary_search(&r).expect("roots are classes")
                })
                .collect()
        })
        .collect()
}

/// Pairs of classes the table wrongly separates, at most `limit` of them.
/// Associativity is tested by Light's test over the generators, identities
/// by evaluation under every assignment. A variable standing alone at the
/// start (or end) of both sides only needs generator values, since every
/// element is a product ending (or starting) with a generator. Each pair
/// holds two evaluations of one word (or of the two sides of one instance),
/// so merging them is sound.
fn model_violations(
    table: &MultiplicationTable,
    identities: &[WordIdentity],
    limit: usize,
) -> Vec<(usize, usize)> {
    let n = table.classes.len();
    let cay = table.cayley();
    let mut out = BTreeSet::new();
    let mut note = |a: usize, b: usize| {
        if a != b {
            out.insert((a.min(b), a.max(b)));
        }
    };
    let gens: Vec<usize> = (0..table.generators)
        .map(|g| {
            table
                .evaluate(&[g as u8])
                .expect("single letters are within the bound")
        })
        .collect();
    for &g in &gens {
        for x in 0..n {
            let xg = cay[x][g];
            for z in 0..n {
                note(cay[xg][z], cay[x][cay[g][z]]);
            }
        }
    }
    if !out.is_empty() {
        return out.into_iter().take(limit).collect();
    }
    let all: Vec<usize> = (0..n).collect();
    for e in identities {
        let vars = e.lhs.iter().chain(&e.rhs).copied().max().unwrap_or(0) as usize;
        let occurs = |v: u32| e.lhs.iter().chain(&e.rhs).filter(|&&x| x == v).count();
        let domains: Vec<&[usize]> = (1..=vars as u32)
            .map(|v| {
                let edge = (e.lhs[0] == v && e.rhs[0] == v)
                    || (e.lhs.last() == Some(&v) && e.rhs.last() == Some(&v));
                if edge && occurs(v) == 2 {
                    &gens[..]
                } else {
                    &all[..]
                }
            })
            .collect();
        let eval = |w: &[u32], a: &[usize]| {
            let mut it = w.iter().map(|&v| a[v as usize - 1]);
            let first = it.next().expect("nonempty side");
            it.fold(first, |acc, x| cay[acc][x])
        };
        let mut digits = vec![0usize; vars];
        let mut a: Vec<usize> = domains.iter().map(|d| d[0]).collect();
        loop {
            let (l, r) = (eval(&e.lhs, &a), eval(&e.rhs, &a));
            if l != r {
                out.insert((l.min(r), l.max(r)));
                if out.len() >= limit {
                    return out.into_iter().collect();
                }
            }
            let mut j = vars;
            while j > 0 && digits[j - 1] + 1 == domains[j - 1].len() {
                digits[j - 1] = 0;
                a[j - 1] = domains[j - 1][0];
                j -= 1;
            }
            if j == 0 {
                break;
            }
            digits[j - 1] += 1;
            a[j - 1] = domains[j - 1][digits[j - 1]];
        }
    }
    out.into_iter().collect()
}

fn report_from(
    identities: &[WordIdentity],
    k: usize,
    p: Partition,
    table: Option<MultiplicationTable>,
) -> FreeAlgebraReport {
    let classes: Vec<GenWord> = p
        .roots()
        .into_iter()
        .map(|r| GenWord(p.space.word(r)))
        .collect();
    let status = if table.is_some() {
        FreeStatus::Stable {
            cardinality: classes.len(),
        }
    } else {
        FreeStatus::BoundExceeded {
            census: classes.len(),
        }
    };
    FreeAlgebraReport {
        identities: identities.iter().map(identity_string).collect(),
        generators: k,
        bound: p.space.max_len,
        classes,
        status,
        multiplication: table,
        partition: Some(p),
    }
}

/// The `k`-generated relatively free semigroup of the variety defined by
/// `identities`, as far as a bounded closure can certify it.
pub fn free_semigroup(
    identities: &[WordIdentity],
    k: usize,
    config: &FreeConfig,
) -> Result<FreeAlgebraReport> {
    check_identities(identities)?;
    if k == 0 {
        return Err(Error::BadParam("at least one generator is required".into()));
    }
    if k > 26 {
        return Err(Error::BadParam("at most 26 generators".into()));
    }
    let longest = identities
        .iter()
        .map(|e| e.lhs.len().max(e.rhs.len()))
        .max()
        .unwrap_or(1);
    if let Some(bound) = config.bound {
        if bound < longest {
            return Err(Error::BadParam(format!(
                "bound {bound} is below the longest identity side {longest}"
            )));
        }
        return Ok(match attempt(identities, k, bound, config.max_words) {
            Attempt::Stable(p, t) => report_from(identities, k, p, Some(t)),
            Attempt::Unstable(p) => report_from(identities, k, p, None),
            Attempt::TooLarge => {
                return Err(Error::BadParam(format!(
                    "bound {bound} exceeds the word budget"
                )));
            }
        });
    }
    let mut bound = 2 * longest;
    let mut last = None;
    loop {
        match attempt(identities, k, bound, config.max_words) {
            Attempt::Stable(p, t) => return Ok(report_from(identities, k, p, Some(t))),
            Attempt::Unstable(p) => last = Some(p),
            Attempt::TooLarge => break,
        }
        bound += 2;
    }
    match last {
        Some(p) => Ok(report_from(identities, k, p, None)),
        None => Err(Error::BadParam(
            "the word budget does not fit the starting bound".into(),
        )),
    }
}

/// Class × generator products of a stable report.
pub fn multiplication_table(report: &FreeAlgebraReport) -> Result<MultiplicationTable> {
    match (&report.status, &report.multiplication) {
        (FreeStatus::Stable { .. }, Some(t)) => Ok(t.clone()),
        _ => Err(Error::NotStable),
    }
}

/// A finite semigroup as its multiplication table.
pub type ModelTable = Vec<Vec<u8>>;

/// Value of a word under an assignment of its variables (1-based) to elements.
pub fn eval_word(table: &ModelTable, w: &[u32], assignment: &[u8]) -> u8 {
    let mut it = w.iter().map(|&v| assignment[v as usize - 1]);
    let first = it.next().expect("nonempty word");
    it.fold(first, |acc, x| table[acc as usize][x as usize])
}

pub fn model_satisfies(table: &ModelTable, e: &WordIdentity) -> bool {
    let n = table.len();
    let vars = e.lhs.iter().chain(&e.rhs).copied().max().unwrap_or(0) as usize;
    let mut a = vec![0u8; vars];
    loop {
        if eval_word(table, &e.lhs, &a) != eval_word(table, &e.rhs, &a) {
            return false;
        }
        let mut j = vars;
        while j > 0 && a[j - 1] as usize == n - 1 {
            a[j - 1] = 0;
            j -= 1;
        }
        if j == 0 {
            return true;
        }
        a[j - 1] += 1;
    }
}

/// All associative `n × n` tables satisfying every identity, in
/// lexicographic order of their row-major entries.
pub fn search_models(identities: &[WordIdentity], n: usize) -> Result<Vec<ModelTable>> {
    if n == 0 || n > 4 {
        return Err(Error::BadParam("model size must be between 1 and 4".into()));
    }
    for e in identities {
        if e.lhs.is_empty() || e.rhs.is_empty() || e.lhs.iter().chain(&e.rhs).any(|&v| v == 0) {
            return Err(Error::BadParam(
                "identity sides must be nonempty words".into(),
            ));
        }
    }
    let mut cells: Vec<Option<u8>> = vec![None; n * n];
    let mut out = Vec::new();

    fn consistent(cells: &[Option<u8>], n: usize) -> bool {
        let at = |a: usize, b: usize| cells[a * n + b].map(|v| v as usize);
        for a in 0..n {
            for b in 0..n {
                let Some(ab) = at(a, b) else { continue };
                for c in 0..n {
                    let (Some(l), Some(bc)) = (at(ab, c), at(b, c)) else {
                        continue;
                    };
                    if let Some(r) = at(a, bc) {
                        if l != r {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn fill(
        i: usize,
        cells: &mut Vec<Option<u8>>,
        n: usize,
        ids: &[WordIdentity],
        out: &mut Vec<ModelTable>,
    ) {
        if i == cells.len() {
            let table: ModelTable = cells
                .chunks(n)
                .map(|row| row.iter().map(|c| c.expect("filled")).collect())
                .collect();
            if ids.iter().all(|e| model_satisfies(&table, e)) {
                out.push(table);
            }
            return;
        }
        for v in 0..n as u8 {
            cells[i] = Some(v);
            if consistent(cells, n) {
                fill(i + 1, cells, n, ids, out);
            }
        }
        cells[i] = None;
    }

    fill(0, &mut cells, n, identities, &mut out);
    Ok(out)
}

/// Output of [`paper_reductions`] with a word proof from input to output
/// under [`xxyyz_law`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub input: GenWord,
    pub output: GenWord,
    pub proof: WordProof,
}

/// `xxyyz = xxyxxyz`.
pub fn xxyyz_law() -> WordIdentity {
    WordIdentity::parse("xxyyz=xxyxxyz").expect("literal")
}

fn runs(w: &[u8]) -> Vec<(u8, usize)> {
    let mut out: Vec<(u8, usize)> = Vec::new();
    for &l in w {
        match out.last_mut() {
            Some((c, n)) if *c == l => *n += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

/// Candidate shortenings of `w` as (start of rewritten suffix, new suffix),
/// leftmost first.
fn reduction_candidates(w: &[u8]) -> Vec<(usize, Vec<u8>)> {
    let mut out = Vec::new();
    for p in 0..w.len() {
        for (x, y) in [(0u8, 1u8), (1, 0)] {
            for pattern in [vec![x, x, y, y, y], vec![x, x, y, y, x, x]] {
                if !w[p..].starts_with(&pattern) || w.len() == p + pattern.len() {
                    continue;
                }
                let z = &w[p + pattern.len()..];
                let zr = runs(z);
                let mut offset = 0;
                for (i, &(_, n)) in zr.iter().enumerate() {
                    if i + 1 < zr.len() && n >= 2 {
                        let mut suffix = pattern.clone();
                        suffix.extend_from_slice(&z[..offset]);
                        suffix.extend_from_slice(&z[offset + 2..]);
                        out.push((p, suffix));
                    }
                    offset += n;
                }
            }
            let collapse = [x, x, y, y, y, y, y];
            if w[p..].starts_with(&collapse) && w.len() > p + collapse.len() {
                let mut suffix = vec![x, x, y, y, y];
                suffix.extend_from_slice(&w[p + collapse.len()..]);
                out.push((p, suffix));
            }
        }
    }
    out
}

fn to_vars(w: &[u8]) -> Vec<u32> {
    w.iter().map(|&l| l as u32 + 1).collect()
}

/// Shortens a two-letter word by the mod-2 power reductions after an
/// `x²y³` or `x²y²x²` factor and by `x²y⁵z → x²y³z`, until none applies.
/// Each step is kept only if the word engine proves it from `xxyyz=xxyxxyz`.
pub fn paper_reductions(w: &GenWord) -> Result<Reduction> {
    if w.is_empty() {
        return Err(Error::EmptyInput);
    }
    if w.0.iter().any(|&l| l > 1) {
        return Err(Error::BadParam(
            "reductions are defined over the letters a and b".into(),
        ));
    }
    let axioms = [xxyyz_law()];
    let mut cur = w.0.clone();
    let mut steps: Vec<WordStep> = Vec::new();
    'outer: loop {
        for (start, suffix) in reduction_candidates(&cur) {
            let goal = WordIdentity::new(to_vars(&cur[start..]), to_vars(&suffix));
            let base = word_budget(&goal);
            let budget = Budget::new(base.max_term_ops, 200_000, base.max_depth);
            if let Outcome::Derived(proof) = word_derive_bounded(&axioms, &goal, &budget) {
                steps.extend(proof.shifted(start).steps);
                cur.truncate(start);
                cur.extend(suffix);
                continue 'outer;
            }
        }
        break;
    }
    Ok(Reduction {
        input: w.clone(),
        output: GenWord(cur),
        proof: WordProof { steps },
    })
}

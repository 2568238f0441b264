//! Rankings of `q` candidates and their pairwise-comparison images.
//!
//! A [`Permutation`] stores `π(i)`, the rank of candidate `i`. Smaller rank
//! means more preferred. The inversion embedding maps a ranking to the
//! `±1` vector of its pairwise comparisons, indexed by the pairs `(i, j)`,
//! `i < j`, in lexicographic order:
//!
//! ```text
//! q = 4:  (1,2) (1,3) (1,4) (2,3) (2,4) (3,4)
//!           0     1     2     3     4     5
//! ```
//!
//! Entry `(i, j)` is `+1` when `i` is ranked ahead of `j`. Every module in
//! the crate uses this layout. With it, inner products of embeddings
//! measure agreement: `⟨φ(a), φ(b)⟩ = C(q,2) − 2·d_τ(a, b)`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};

/// Largest `q` for which exhaustive enumeration of rankings is allowed.
pub const ENUMERATION_CAP: usize = 10;

/// Number of unordered candidate pairs, `C(q, 2)`.
#[inline]
pub const fn num_pairs(q: usize) -> usize {
    q * (q.saturating_sub(1)) / 2
}

/// Lexicographic index of the pair `(i, j)` with `i < j < q` (0-based).
#[inline]
pub fn pair_index(i: usize, j: usize, q: usize) -> usize {
    debug_assert!(i < j && j < q);
    i * (2 * q - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)`, `i < j`, in the shared lexicographic order.
pub fn pairs(q: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..q).flat_map(move |i| (i + 1..q).map(move |j| (i, j)))
}

/// Recovers `q` from a pair-indexed vector length, if it is triangular.
pub fn candidates_for_len(len: usize) -> Option<usize> {
    let mut q = 2;
    while num_pairs(q) < len {
        q += 1;
    }
    (num_pairs(q) == len).then_some(q)
}

/// `q!` as a `u128`, saturating.
pub fn factorial(q: usize) -> u128 {
    (1..=q as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// A ranking of `q` candidates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    ranks: Vec<u8>,
}

impl Permutation {
    /// Builds a permutation from 0-based ranks, `ranks[i] = π(i) − 1`.
    pub fn from_ranks(ranks: Vec<u8>) -> Result<Self> {
        let q = ranks.len();
        if q < 2 {
            return Err(argument(format!("a ranking needs at least 2 candidates, got {q}")));
        }
        if q > u8::MAX as usize {
            return Err(argument("too many candidates"));
        }
        let mut seen = vec![false; q];
        for &r in &ranks {
            let r = r as usize;
            if r >= q || seen[r] {
                return Err(argument(format!("{ranks:?} is not a bijection of 0..{q}")));
            }
            seen[r] = true;
        }
        Ok(Self { ranks })
    }

    /// Builds a permutation from one-line notation with values in `1..=q`,
    /// e.g. `[2, 1, 3]` ranks candidate 2 first.
    pub fn from_one_line(values: &[usize]) -> Result<Self> {
        let ranks = values
            .iter()
            .map(|&v| {
                if v == 0 || v > u8::MAX as usize {
                    Err(argument(format!("one-line values must lie in 1..=q, got {v}")))
                } else {
                    Ok((v - 1) as u8)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_ranks(ranks)
    }

    pub fn identity(q: usize) -> Self {
        Self { ranks: (0..q as u8).collect() }
    }

    /// The reversed ranking: every pair is inverted.
    pub fn reversal(q: usize) -> Self {
        Self { ranks: (0..q as u8).rev().collect() }
    }

    pub fn q(&self) -> usize {
        self.ranks.len()
    }

    /// 0-based rank of candidate `i` (0-based).
    #[inline]
    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i] as usize
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    /// One-line notation with values in `1..=q`.
    pub fn one_line(&self) -> Vec<usize> {
        self.ranks.iter().map(|&r| r as usize + 1).collect()
    }

    /// Candidates from most to least preferred (0-based).
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.q()];
        for (cand, &r) in self.ranks.iter().enumerate() {
            order[r as usize] = cand;
        }
        order
    }

    /// Relabels candidates: candidate `i` becomes `relabel[i]`.
    pub fn relabel(&self, relabel: &[usize]) -> Self {
        let mut ranks = vec![0u8; self.q()];
        for (i, &r) in self.ranks.iter().enumerate() {
            ranks[relabel[i]] = r;
        }
        Self { ranks }
    }

    /// Position of this permutation in lexicographic order of one-line
    /// notation (the Lehmer code read as a factorial-base number).
    pub fn lex_index(&self) -> usize {
        let q = self.q();
        let mut index = 0usize;
        for i in 0..q {
            let smaller_later = self.ranks[i + 1..].iter().filter(|&&r| r < self.ranks[i]).count();
            index = index * (q - i) + smaller_later;
        }
        index
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.q() > 9 { "," } else { "" };
        let parts: Vec<String> = self.one_line().iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

/// The `±1` pairwise-comparison image of a ranking.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InversionVector {
    q: usize,
    entries: Vec<i8>,
}

impl InversionVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        let q = candidates_for_len(entries.len())
            .ok_or_else(|| argument(format!("length {} is not C(q,2) for any q", entries.len())))?;
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(argument("inversion vector entries must be ±1"));
        }
        Ok(Self { q, entries })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn dot(&self, other: &Self) -> i64 {
        dot_i8(&self.entries, &other.entries)
    }
}

/// A triple in `NAE₃`: `±1` entries, not all equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NaeVector([i8; 3]);

impl NaeVector {
    pub fn new(entries: [i8; 3]) -> Result<Self> {
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(argument("NAE entries must be ±1"));
        }
        if entries[0] == entries[1] && entries[1] == entries[2] {
            return Err(Error::Domain(format!("{entries:?} is all-equal, not in NAE3")));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> [i8; 3] {
        self.0
    }

    /// The six members of `NAE₃`.
    pub fn all() -> [NaeVector; 6] {
        [
            NaeVector([1, 1, -1]),
            NaeVector([1, -1, 1]),
            NaeVector([-1, 1, 1]),
            NaeVector([-1, -1, 1]),
            NaeVector([-1, 1, -1]),
            NaeVector([1, -1, -1]),
        ]
    }
}

#[inline]
pub(crate) fn dot_i8(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| (x as i64) * (y as i64)).sum()
}

/// Number of pairs ordered oppositely by `a` and `b`.
pub fn kendall_tau(a: &Permutation, b: &Permutation) -> Result<usize> {
    if a.q() != b.q() {
        return Err(argument(format!("rankings over {} and {} candidates", a.q(), b.q())));
    }
    let q = a.q();
    Ok(pairs(q)
        .filter(|&(i, j)| (a.rank(i) < a.rank(j)) != (b.rank(i) < b.rank(j)))
        .count())
}

/// The inversion embedding: entry `(i, j)` is `(−1)^{1[π(i) > π(j)]}`.
pub fn embed(p: &Permutation) -> InversionVector {
    let q = p.q();
    InversionVector { q, entries: embed_entries(p) }
}

fn embed_entries(p: &Permutation) -> Vec<i8> {
    pairs(p.q()).map(|(i, j)| if p.rank(i) > p.rank(j) { -1 } else { 1 }).collect()
}

/// The three-candidate embedding onto `NAE₃`:
/// `((−1)^{1[π(1)<π(2)]}, (−1)^{1[π(2)<π(3)]}, (−1)^{1[π(3)<π(1)]})`.
pub fn embed_nae(p: &Permutation) -> Result<NaeVector> {
    if p.q() != 3 {
        return Err(argument(format!("NAE3 embedding needs q = 3, got {}", p.q())));
    }
    let sign = |less: bool| if less { -1 } else { 1 };
    Ok(NaeVector([
        sign(p.rank(0) < p.rank(1)),
        sign(p.rank(1) < p.rank(2)),
        sign(p.rank(2) < p.rank(0)),
    ]))
}

/// Re-expresses a lexicographic `(12, 13, 23)` triple in the `NAE₃`
/// coordinates `(−v₁₂, −v₂₃, v₁₃)`. Linear, so it also maps sums of
/// embeddings to sums of `NAE₃` vectors.
#[inline]
pub fn to_nae_coords<T: Copy + std::ops::Neg<Output = T>>(v: [T; 3]) -> [T; 3] {
    [-v[0], -v[2], v[1]]
}

/// Inverse of [`to_nae_coords`].
#[inline]
pub fn from_nae_coords<T: Copy + std::ops::Neg<Output = T>>(w: [T; 3]) -> [T; 3] {
    [-w[0], w[2], -w[1]]
}

/// All `q!` rankings in lexicographic order of one-line notation.
pub fn enumerate_permutations(q: usize) -> Result<Vec<Permutation>> {
    if q < 2 {
        return Err(argument(format!("need q >= 2, got {q}")));
    }
    if q > ENUMERATION_CAP {
        return Err(Error::Capacity {
            what: "candidates",
            requested: q as u128,
            limit: ENUMERATION_CAP as u128,
        });
    }
    let mut current: Vec<u8> = (0..q as u8).collect();
    let mut out = Vec::with_capacity(factorial(q) as usize);
    loop {
        out.push(Permutation { ranks: current.clone() });
        if !next_lex(&mut current) {
            return Ok(out);
        }
    }
}

fn next_lex(v: &mut [u8]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Scores of a tournament given as a pair-indexed `±1` vector: entry `a` is
/// the number of candidates that `a` beats.
pub fn tournament_scores(v: &[i8]) -> Result<Vec<usize>> {
    let q = candidates_for_len(v.len())
        .ok_or_else(|| argument(format!("length {} is not C(q,2) for any q", v.len())))?;
    let mut scores = vec![0usize; q];
    for ((i, j), &e) in pairs(q).zip(v) {
        match e {
            1 => scores[i] += 1,
            -1 => scores[j] += 1,
            _ => return Err(argument("outcome entries must be ±1")),
        }
    }
    Ok(scores)
}

/// Whether a pairwise outcome vector is the embedding of some ranking.
///
/// A tournament is acyclic exactly when its score sequence is a permutation
/// of `0..q`.
pub fn is_transitive(v: &[i8]) -> Result<bool> {
    let scores = tournament_scores(v)?;
    let mut seen = vec![false; scores.len()];
    for s in scores {
        if seen[s] {
            return Ok(false);
        }
        seen[s] = true;
    }
    Ok(true)
}

/// The candidate beating every other candidate, if there is one.
pub fn condorcet_winner(v: &[i8]) -> Result<Option<usize>> {
    let scores = tournament_scores(v)?;
    let q = scores.len();
    Ok(scores.iter().position(|&s| s == q - 1))
}

/// Inverse of [`embed`] on transitive outcome vectors.
pub fn ranking_from_transitive(v: &[i8]) -> Result<Permutation> {
    let scores = tournament_scores(v)?;
    if !is_transitive(v)? {
        return Err(Error::Domain(format!("{v:?} is intransitive")));
    }
    let q = scores.len();
    Ok(Permutation {
        ranks: scores.iter().map(|&s| (q - 1 - s) as u8).collect(),
    })
}

/// Every ranking of `q` candidates with its embedding, built once per `q`.
pub struct PermTable {
    q: usize,
    pairs: usize,
    perms: Vec<Permutation>,
    embeddings: Vec<i8>,
}

impl fmt::Debug for PermTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermTable").field("q", &self.q).field("len", &self.perms.len()).finish()
    }
}

impl PermTable {
    fn build(q: usize) -> Result<Self> {
        let perms = enumerate_permutations(q)?;
        let mut embeddings = Vec::with_capacity(perms.len() * num_pairs(q));
        for p in &perms {
            embeddings.extend(embed_entries(p));
        }
        Ok(Self { q, pairs: num_pairs(q), perms, embeddings })
    }

    /// Shared table for `q` candidates (`2 ≤ q ≤ ENUMERATION_CAP`).
    pub fn get(q: usize) -> Result<&'static PermTable> {
        static TABLES: [OnceLock<PermTable>; ENUMERATION_CAP + 1] = [const { OnceLock::new() }; ENUMERATION_CAP + 1];
        if !(2..=ENUMERATION_CAP).contains(&q) {
            // Produces the right error variant.
            enumerate_permutations(q)?;
        }
        Ok(TABLES[q].get_or_init(|| PermTable::build(q).expect("q checked above")))
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn perm(&self, index: usize) -> &Permutation {
        &self.perms[index]
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// Embedding of the permutation at `index`.
    #[inline]
    pub fn embedding(&self, index: usize) -> &[i8] {
        &self.embeddings[index * self.pairs..(index + 1) * self.pairs]
    }

    pub fn index_of(&self, p: &Permutation) -> usize {
        debug_assert_eq!(p.q(), self.q);
        p.lex_index()
    }
}

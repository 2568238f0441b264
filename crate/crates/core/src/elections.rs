//! IIA constitutions, paradox probabilities and closeness to the
//! paradox-free class.
//!
//! A [`Constitution`] holds one rule per candidate pair, in lexicographic
//! pair order. Each rule reads only the voters' comparisons on its own pair.
//! Outcomes use the inversion-vector convention: `+1` on pair `(a, b)`,
//! `a < b`, means society ranks `a` above `b`.
//!
//! Voters are numbered in profile order. For matching models that order is
//! `X₁, Y₁, X₂, Y₂, …`, so `dict:1` is `X₁` and `dict:2` is `Y₁`.
//!
//! # Text form
//!
//! A constitution is written as comma-separated rules, one per pair, or a
//! single rule applied to every pair:
//!
//! | rule | meaning |
//! |------|---------|
//! | `maj` | majority |
//! | `dict:i` | voter `i` (1-based) |
//! | `anti:i` | the reverse of voter `i` |
//! | `const:+1`, `const:-1` | fixed outcome |
//! | `table:b₀b₁…` | truth table; bit `k` (`0` for −1, `1` for +1) is the outcome when voter `v` prefers the lower-numbered candidate exactly for the set bits `v` of `k` |
//!
//! ```
//! use correlated_voters::elections::Constitution;
//!
//! let c: Constitution = "const:+1,const:+1,maj".parse().unwrap();
//! assert_eq!(c.to_string(), "const:+1,const:+1,maj");
//! ```

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::models::{enumerate_exact, estimate_from_units, profile_mean, sampled_units, ModelSpec, Moments, Profile};
use crate::numeric::NeumaierSum;
use crate::perm::{embed, is_transitive, num_pairs, pairs, InversionVector, PermTable};
use crate::stats::{Estimate, Method};

/// Largest voter count a truth table may read.
pub const TRUTH_TABLE_MAX_VOTERS: usize = 20;

/// How one pair's societal preference is decided.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairRule {
    Majority,
    /// Voter index, 0-based.
    Dictator(usize),
    AntiDictator(usize),
    /// `+1` or `−1`.
    Constant(i8),
    /// Outcome for each pattern of voter comparisons; see the module docs.
    TruthTable(Vec<i8>),
}

impl PairRule {
    fn validate(&self) -> Result<()> {
        match self {
            PairRule::Constant(s) if s.abs() != 1 => Err(argument(format!("constant must be ±1, got {s}"))),
            PairRule::TruthTable(t) => {
                if t.is_empty() || !t.len().is_power_of_two() || t.len() > 1 << TRUTH_TABLE_MAX_VOTERS {
                    return Err(argument(format!("truth table length {} is not 2^voters", t.len())));
                }
                if t.iter().any(|x| x.abs() != 1) {
                    return Err(argument("truth table entries must be ±1"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Voter count this rule needs, if it constrains it.
    fn check_voters(&self, voters: usize) -> Result<()> {
        match self {
            PairRule::Dictator(i) | PairRule::AntiDictator(i) if *i >= voters => {
                Err(argument(format!("voter {} does not exist among {voters}", i + 1)))
            }
            PairRule::TruthTable(t) if t.len() != 1usize.checked_shl(voters as u32).unwrap_or(0) => Err(argument(
                format!("truth table of length {} does not match {voters} voters", t.len()),
            )),
            _ => Ok(()),
        }
    }

    /// Applies the rule to the comparisons `col` of one pair. Majority ties
    /// go to `rng`, or fail without one.
    fn apply(&self, col: impl Iterator<Item = i8>, rng: &mut Option<&mut dyn RngCore>) -> Result<(i8, u64)> {
        let mut col = col;
        Ok(match self {
            PairRule::Majority => {
                let (s, n) = col.fold((0i64, 0usize), |(s, n), x| (s + x as i64, n + 1));
                match s.signum() {
                    0 => match rng {
                        Some(r) => (if r.gen::<bool>() { 1 } else { -1 }, 1),
                        None => return Err(Error::Tie { pair: 0, voters: n }),
                    },
                    v => (v as i8, 0),
                }
            }
            PairRule::Dictator(i) => (col.nth(*i).expect("checked voter"), 0),
            PairRule::AntiDictator(i) => (-col.nth(*i).expect("checked voter"), 0),
            PairRule::Constant(s) => (*s, 0),
            PairRule::TruthTable(t) => {
                let k = col.enumerate().fold(0usize, |k, (v, x)| k | ((x > 0) as usize) << v);
                (t[k], 0)
            }
        })
    }
}

impl fmt::Display for PairRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairRule::Majority => f.write_str("maj"),
            PairRule::Dictator(i) => write!(f, "dict:{}", i + 1),
            PairRule::AntiDictator(i) => write!(f, "anti:{}", i + 1),
            PairRule::Constant(s) => write!(f, "const:{}", if *s > 0 { "+1" } else { "-1" }),
            PairRule::TruthTable(t) => {
                f.write_str("table:")?;
                t.iter().try_for_each(|&x| f.write_str(if x > 0 { "1" } else { "0" }))
            }
        }
    }
}

impl FromStr for PairRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let voter = |v: &str| -> Result<usize> {
            match v.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i - 1),
                _ => Err(argument(format!("voter numbers start at 1, got '{v}'"))),
            }
        };
        let rule = match s.split_once(':') {
            None if s == "maj" => PairRule::Majority,
            Some(("dict", v)) => PairRule::Dictator(voter(v)?),
            Some(("anti", v)) => PairRule::AntiDictator(voter(v)?),
            Some(("const", "+1" | "1")) => PairRule::Constant(1),
            Some(("const", "-1")) => PairRule::Constant(-1),
            Some(("table", bits)) => PairRule::TruthTable(
                bits.chars()
                    .map(|c| match c {
                        '0' => Ok(-1),
                        '1' => Ok(1),
                        _ => Err(argument(format!("truth table bit '{c}' is not 0 or 1"))),
                    })
                    .collect::<Result<_>>()?,
            ),
            _ => return Err(argument(format!("unknown rule '{s}'"))),
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// Maps a profile to a societal outcome vector.
pub trait Aggregator: Sync {
    fn q(&self) -> usize;

    /// Checks that the rule can read `voters` ballots.
    fn check_voters(&self, voters: usize) -> Result<()>;

    /// Writes the outcome for `ballots` (inversion vectors in voter order)
    /// into `out` and returns the number of majority ties given to `rng`.
    /// Without an `rng`, a tie is an error.
    fn aggregate(&self, ballots: &[&[i8]], out: &mut [i8], rng: Option<&mut dyn RngCore>) -> Result<u64>;
}

/// One [`PairRule`] per candidate pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constitution {
    q: usize,
    rules: Vec<PairRule>,
}

impl Constitution {
    pub fn new(q: usize, rules: Vec<PairRule>) -> Result<Self> {
        if q < 2 {
            return Err(argument(format!("need at least two candidates, got {q}")));
        }
        if rules.len() != num_pairs(q) {
            return Err(argument(format!("{} rules given for {} pairs", rules.len(), num_pairs(q))));
        }
        rules.iter().try_for_each(PairRule::validate)?;
        Ok(Self { q, rules })
    }

    pub fn uniform(q: usize, rule: PairRule) -> Result<Self> {
        Self::new(q, vec![rule; num_pairs(q)])
    }

    pub fn majority(q: usize) -> Self {
        Self::uniform(q, PairRule::Majority).expect("valid")
    }

    pub fn dictator(q: usize, voter: usize) -> Self {
        Self::uniform(q, PairRule::Dictator(voter)).expect("valid")
    }

    pub fn anti_dictator(q: usize, voter: usize) -> Self {
        Self::uniform(q, PairRule::AntiDictator(voter)).expect("valid")
    }

    /// Candidate `c` always first (`top`) or always last, with `rest` on the
    /// pairs not involving `c`.
    pub fn fixed(q: usize, c: usize, top: bool, rest: PairRule) -> Result<Self> {
        if c >= q {
            return Err(argument(format!("candidate {} does not exist among {q}", c + 1)));
        }
        let w = if top { 1 } else { -1 };
        let rules = pairs(q)
            .map(|(a, b)| {
                if a == c {
                    PairRule::Constant(w)
                } else if b == c {
                    PairRule::Constant(-w)
                } else {
                    rest.clone()
                }
            })
            .collect();
        Self::new(q, rules)
    }

    /// Parses the text form for `q` candidates; a single rule is applied to
    /// every pair.
    pub fn parse(q: usize, s: &str) -> Result<Self> {
        let rules: Vec<PairRule> = s.split(',').map(str::parse).collect::<Result<_>>()?;
        if rules.len() == 1 {
            Self::uniform(q, rules.into_iter().next().expect("one rule"))
        } else {
            Self::new(q, rules)
        }
    }

    pub fn rules(&self) -> &[PairRule] {
        &self.rules
    }

    fn uses_majority(&self) -> bool {
        self.rules.contains(&PairRule::Majority)
    }
}

/// Parses a per-pair list, inferring `q` from its length.
impl FromStr for Constitution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let count = s.split(',').count();
        let q = crate::perm::candidates_for_len(count)
            .ok_or_else(|| argument(format!("{count} rules is not C(q, 2) for any q")))?;
        Self::parse(q, s)
    }
}

impl fmt::Display for Constitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.rules.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl Aggregator for Constitution {
    fn q(&self) -> usize {
        self.q
    }

    fn check_voters(&self, voters: usize) -> Result<()> {
        self.rules.iter().try_for_each(|r| r.check_voters(voters))
    }

    fn aggregate(&self, ballots: &[&[i8]], out: &mut [i8], mut rng: Option<&mut dyn RngCore>) -> Result<u64> {
        let mut ties = 0;
        for (k, (rule, o)) in self.rules.iter().zip(out.iter_mut()).enumerate() {
            let (v, t) = rule.apply(ballots.iter().map(|b| b[k]), &mut rng).map_err(|e| match e {
                Error::Tie { voters, .. } => Error::Tie { pair: k, voters },
                e => e,
            })?;
            *o = v;
            ties += t;
        }
        Ok(ties)
    }
}

/// `base`, except on one profile where the outcome is replaced. Not IIA in
/// general; useful for measuring distances.
#[derive(Clone, Debug)]
pub struct Override<A> {
    pub base: A,
    /// Ballots (inversion vectors) of the overridden profile.
    pub ballots: Vec<Vec<i8>>,
    pub outcome: Vec<i8>,
}

impl<A: Aggregator> Aggregator for Override<A> {
    fn q(&self) -> usize {
        self.base.q()
    }

    fn check_voters(&self, voters: usize) -> Result<()> {
        self.base.check_voters(voters)
    }

    fn aggregate(&self, ballots: &[&[i8]], out: &mut [i8], rng: Option<&mut dyn RngCore>) -> Result<u64> {
        if ballots.len() == self.ballots.len() && ballots.iter().zip(&self.ballots).all(|(a, b)| *a == &b[..]) {
            out.copy_from_slice(&self.outcome);
            return Ok(0);
        }
        self.base.aggregate(ballots, out, rng)
    }
}

/// Outcome of `c` on `p`. Majority ties are an error.
pub fn evaluate<A: Aggregator + ?Sized>(c: &A, p: &Profile) -> Result<InversionVector> {
    let votes = p.flatten();
    if votes.iter().any(|v| v.q() != c.q()) {
        return Err(argument(format!("profile rankings do not have {} candidates", c.q())));
    }
    c.check_voters(votes.len())?;
    let emb: Vec<InversionVector> = votes.iter().map(|v| embed(v)).collect();
    let ballots: Vec<&[i8]> = emb.iter().map(|e| e.entries()).collect();
    let mut out = vec![0i8; num_pairs(c.q())];
    c.aggregate(&ballots, &mut out, None)?;
    InversionVector::new(out)
}

/// Exact enumeration or sampling, for [`paradox_probability`] and
/// [`distance_to_class`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ElectionMethod {
    Exact,
    MonteCarlo { samples: u64 },
}

/// Probability of an intransitive outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParadoxEstimate {
    pub probability: f64,
    /// Zero for exact results.
    pub standard_error: f64,
    pub method: Method,
    pub samples: u64,
    /// Majority ties resolved by a fair coin.
    pub ties_broken: u64,
}

impl From<Estimate> for ParadoxEstimate {
    fn from(e: Estimate) -> Self {
        Self {
            probability: e.value,
            standard_error: e.std_error,
            method: e.method,
            samples: e.samples,
            ties_broken: e.ties_broken,
        }
    }
}

fn check<A: Aggregator + ?Sized>(c: &A, spec: &ModelSpec) -> Result<()> {
    if c.q() != spec.q() {
        return Err(argument(format!("constitution has {} candidates, model has {}", c.q(), spec.q())));
    }
    c.check_voters(spec.num_voters())
}

/// Runs `f(p, outcome)` over every profile of `spec` with probability `p`.
fn exact_outcomes<A, F>(c: &A, spec: &ModelSpec, mut f: F) -> Result<()>
where
    A: Aggregator + ?Sized,
    F: FnMut(f64, &[u32], &[i8]),
{
    let d = enumerate_exact(spec)?;
    let table = PermTable::get(spec.q())?;
    let mut out = vec![0i8; num_pairs(spec.q())];
    let mut ballots: Vec<&[i8]> = Vec::with_capacity(spec.num_voters());
    let mut err = None;
    d.for_each(|p, idx| {
        if err.is_some() {
            return;
        }
        ballots.clear();
        ballots.extend(idx.iter().map(|&i| table.embedding(i as usize)));
        match c.aggregate(&ballots, &mut out, None) {
            Ok(_) => f(p, idx, &out),
            Err(e) => err = Some(e),
        }
    });
    err.map_or(Ok(()), Err)
}

/// Probability that `c` produces an intransitive outcome under `spec`.
///
/// Exact enumeration rejects majority rules with an even voter count;
/// sampling breaks their ties with a fair coin and reports the count.
pub fn paradox_probability<A: Aggregator + ?Sized>(
    c: &A,
    spec: &ModelSpec,
    method: ElectionMethod,
    seed: u64,
) -> Result<ParadoxEstimate> {
    check(c, spec)?;
    match method {
        ElectionMethod::Exact => {
            let mut acc = NeumaierSum::new();
            exact_outcomes(c, spec, |p, _, out| {
                if !is_transitive(out).expect("valid length") {
                    acc.add(p);
                }
            })?;
            Ok(Estimate::exact(acc.total().clamp(0.0, 1.0), Method::ExactEnum).into())
        }
        ElectionMethod::MonteCarlo { samples } => {
            let table = PermTable::get(spec.q())?;
            let k = num_pairs(spec.q());
            profile_mean(spec, samples, seed, |idx, rng| {
                let ballots: Vec<&[i8]> = idx.iter().map(|&i| table.embedding(i as usize)).collect();
                let mut out = vec![0i8; k];
                let ties = c.aggregate(&ballots, &mut out, Some(rng)).expect("checked voters");
                ((!is_transitive(&out).expect("valid length")) as u8 as f64, ties)
            })
            .map(Into::into)
        }
    }
}

/// The restricted three-candidate paradox-free family: every dictator and
/// anti-dictator, and every fixed top or bottom candidate with the
/// remaining pair decided by majority, a dictator or a constant.
pub fn f3_family(voters: usize) -> Vec<Constitution> {
    let mut out = Vec::new();
    for i in 0..voters {
        out.push(Constitution::dictator(3, i));
        out.push(Constitution::anti_dictator(3, i));
    }
    let mut rest = vec![PairRule::Majority, PairRule::Constant(1), PairRule::Constant(-1)];
    rest.extend((0..voters).map(PairRule::Dictator));
    for c in 0..3 {
        for top in [true, false] {
            for r in &rest {
                out.push(Constitution::fixed(3, c, top, r.clone()).expect("valid"));
            }
        }
    }
    out
}

/// Distance from a constitution to the paradox-free class, `min P(F ≠ G)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassDistance {
    /// Minimum over [`f3_family`]; an upper bound on the distance to the
    /// whole class.
    pub distance: f64,
    pub standard_error: f64,
    /// A minimizing member of the restricted family.
    pub nearest: String,
    /// Minimum over the whole class, computed by exact enumeration only.
    pub full_class: Option<f64>,
    pub method: Method,
}

/// Distance from `c` to the three-candidate paradox-free class under
/// `spec`'s measure. See [`ClassDistance`].
///
/// The whole class consists of functions of a single voter whose outcome is
/// always transitive, and of rules fixing one candidate at the top or the
/// bottom with an arbitrary rule on the remaining pair. Exact enumeration
/// minimizes over all of it.
pub fn distance_to_class<A: Aggregator + ?Sized>(
    c: &A,
    spec: &ModelSpec,
    method: ElectionMethod,
    seed: u64,
) -> Result<ClassDistance> {
    if spec.q() != 3 {
        return Err(argument("distance to the paradox-free class is implemented for three candidates"));
    }
    check(c, spec)?;
    let voters = spec.num_voters();
    let family = f3_family(voters);
    let table = PermTable::get(3)?;
    let family_out = |idx: &[u32], g: &Constitution, out: &mut [i8]| {
        let ballots: Vec<&[i8]> = idx.iter().map(|&i| table.embedding(i as usize)).collect();
        g.aggregate(&ballots, out, None)
    };
    match method {
        ElectionMethod::Exact => {
            // Majority members would tie with an even voter count.
            let members: Vec<&Constitution> =
                family.iter().filter(|g| !(g.uses_majority() && voters.is_multiple_of(2))).collect();
            let mut miss = vec![NeumaierSum::new(); members.len()];
            let mut full = FullClass::new(voters);
            let mut g_out = [0i8; 3];
            exact_outcomes(c, spec, |p, idx, out| {
                for (m, g) in miss.iter_mut().zip(&members) {
                    family_out(idx, g, &mut g_out).expect("odd voters or no majority");
                    if g_out != out {
                        m.add(p);
                    }
                }
                full.add(p, idx, table, out);
            })?;
            let (best, d) = argmin(miss.iter().map(|m| m.total()));
            Ok(ClassDistance {
                distance: d.max(0.0),
                standard_error: 0.0,
                nearest: members[best].to_string(),
                full_class: Some(full.distance()),
                method: Method::ExactEnum,
            })
        }
        ElectionMethod::MonteCarlo { samples } => {
            let m = family.len();
            let (method, units) = sampled_units(
                spec,
                samples,
                seed,
                || vec![Moments::default(); m],
                |acc, idx, rng| {
                    let ballots: Vec<&[i8]> = idx.iter().map(|&i| table.embedding(i as usize)).collect();
                    let mut out = [0i8; 3];
                    let mut g_out = [0i8; 3];
                    let ties = c.aggregate(&ballots, &mut out, Some(&mut *rng)).expect("checked voters");
                    acc[0].ties += ties;
                    for (a, g) in acc.iter_mut().zip(&family) {
                        a.ties += g.aggregate(&ballots, &mut g_out, Some(&mut *rng)).expect("checked voters");
                        a.push((g_out != out) as u8 as f64);
                    }
                },
            )?;
            let estimates: Vec<Estimate> = (0..m)
                .map(|j| {
                    let per: Vec<(Moments, u64)> = units.iter().map(|(a, n)| (a[j].clone(), *n)).collect();
                    estimate_from_units(method, &per)
                })
                .collect();
            let (best, d) = argmin(estimates.iter().map(|e| e.value));
            Ok(ClassDistance {
                distance: d,
                standard_error: estimates[best].std_error,
                nearest: family[best].to_string(),
                full_class: None,
                method,
            })
        }
    }
}

fn argmin(xs: impl Iterator<Item = f64>) -> (usize, f64) {
    xs.enumerate().fold((0, f64::INFINITY), |b, (i, x)| if x < b.1 { (i, x) } else { b })
}

/// Accumulators for the exact distance to the whole class.
struct FullClass {
    voters: usize,
    /// Transitive per-pair rule choices `{x, −x, +1, −1}` for one voter.
    single: Vec<[u8; 3]>,
    /// Disagreement mass per voter and choice.
    single_miss: Vec<NeumaierSum>,
    /// For each (fixed candidate, top/bottom): mass disagreeing on the two
    /// fixed pairs, and the remaining mass split by the comparison pattern
    /// on the other pair and by the outcome there.
    fixed_miss: Vec<(NeumaierSum, Vec<[f64; 2]>)>,
}

impl FullClass {
    fn new(voters: usize) -> Self {
        let mut single = Vec::new();
        for code in 0..64u8 {
            let ch = [code & 3, (code >> 2) & 3, (code >> 4) & 3];
            // Transitive for every ranking of the chosen voter.
            let ok = PermTable::get(3).expect("q = 3").perms().iter().all(|p| {
                let e = embed(p);
                let out: Vec<i8> = (0..3).map(|k| Self::rule(ch[k], e.entries()[k])).collect();
                is_transitive(&out).expect("three pairs")
            });
            if ok {
                single.push(ch);
            }
        }
        let patterns = 1usize << voters;
        Self {
            voters,
            single_miss: vec![NeumaierSum::new(); voters * single.len()],
            single,
            fixed_miss: vec![(NeumaierSum::new(), vec![[0.0; 2]; patterns]); 6],
        }
    }

    fn rule(choice: u8, x: i8) -> i8 {
        match choice {
            0 => x,
            1 => -x,
            2 => 1,
            _ => -1,
        }
    }

    fn add(&mut self, p: f64, idx: &[u32], table: &PermTable, out: &[i8]) {
        let s = self.single.len();
        for (v, &i) in idx.iter().enumerate() {
            let e = table.embedding(i as usize);
            for (j, ch) in self.single.iter().enumerate() {
                if (0..3).any(|k| Self::rule(ch[k], e[k]) != out[k]) {
                    self.single_miss[v * s + j].add(p);
                }
            }
        }
        for c in 0..3 {
            // The pair without c, and the two pairs with it.
            let (other, a, b) = match c {
                0 => (2, 0, 1),
                1 => (1, 0, 2),
                _ => (0, 1, 2),
            };
            let pattern = idx
                .iter()
                .enumerate()
                .fold(0usize, |k, (v, &i)| k | ((table.embedding(i as usize)[other] > 0) as usize) << v);
            for (t, top) in [true, false].into_iter().enumerate() {
                let w: i8 = if top { 1 } else { -1 };
                // c is the lower-numbered candidate on its first pair unless c = 2.
                let (fa, fb) = match c {
                    0 => (w, w),
                    1 => (-w, w),
                    _ => (-w, -w),
                };
                let (outside, split) = &mut self.fixed_miss[2 * c + t];
                if out[a] == fa && out[b] == fb {
                    split[pattern][(out[other] > 0) as usize] += p;
                } else {
                    outside.add(p);
                }
            }
        }
    }

    fn distance(&self) -> f64 {
        let s = self.single.len();
        let single = (0..self.voters * s).map(|j| self.single_miss[j].total()).fold(1.0, f64::min);
        let fixed = self
            .fixed_miss
            .iter()
            .map(|(outside, split)| {
                let mut m = *outside;
                split.iter().for_each(|x| m.add(x[0].min(x[1])));
                m.total()
            })
            .fold(1.0, f64::min);
        single.min(fixed).max(0.0)
    }
}

/// One row of a [`qa_probe`] report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub constitution: String,
    /// Distance to the restricted family.
    pub distance: f64,
    /// Distance to the whole class.
    pub full_class: f64,
    pub paradox: f64,
    /// At least `epsilon` from the whole class, yet paradox below `floor`.
    pub flagged: bool,
}

/// Exact distance and paradox probability for each constitution, flagging
/// any that is far from the paradox-free class but rarely paradoxical.
pub fn qa_probe(spec: &ModelSpec, family: &[Constitution], epsilon: f64, floor: f64) -> Result<Vec<ProbeRow>> {
    if spec.num_voters() > 8 {
        return Err(Error::Capacity { what: "probe voters", requested: spec.num_voters() as u128, limit: 8 });
    }
    family
        .iter()
        .map(|c| {
            let d = distance_to_class(c, spec, ElectionMethod::Exact, 0)?;
            let p = paradox_probability(c, spec, ElectionMethod::Exact, 0)?.probability;
            let full = d.full_class.expect("exact");
            Ok(ProbeRow {
                constitution: c.to_string(),
                distance: d.distance,
                full_class: full,
                paradox: p,
                flagged: full >= epsilon && p < floor,
            })
        })
        .collect()
}

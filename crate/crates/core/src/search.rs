//! Exact maximum-weight search over families with a hereditary property.
//!
//! The engine is a depth-first branch and bound over a fixed branch order
//! (include before exclude). Pairwise constraints become conflict sets;
//! larger forbidden patterns are re-checked only through the element just
//! added. The first `split_depth` decisions are expanded into independent
//! tasks that never share bounds, so the value, the witness and the node
//! count do not depend on the number of threads.
//!
//! Witness rule: among optimal families, the one whose membership vector
//! (read in branch order) is lexicographically greatest, i.e. the first
//! optimum met by the include-first traversal. Elements that cannot
//! contribute to the objective are not branched on and never appear in
//! the witness.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{binomial, gaussian, ElementId, Family, Ground, LatticeError};
use crate::poset::{contains_copy_using, find_embedding, for_each_copy, PosetSpec};

pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("weight vector has {got} entries, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("weight {0} is negative")]
    NegativeWeight(String),
    #[error("cannot parse weight `{0}`")]
    BadWeight(String),
    #[error("scaled objective exceeds 128-bit range")]
    Overflow,
    #[error("node cap of {0} reached before the optimum was proven")]
    NodeCapExceeded(u64),
    #[error("{0}")]
    OutOfRange(String),
}

/// Required relation between every two distinct members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairFilter {
    /// Meet rank at least one: a shared element, or a shared line.
    Intersecting,
}

impl FromStr for PairFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "intersecting" => Ok(PairFilter::Intersecting),
            other => Err(format!("unknown pair filter `{other}`")),
        }
    }
}

impl fmt::Display for PairFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("intersecting")
    }
}

/// A hereditary property: no forbidden pattern, plus an optional pairwise filter.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertySpec {
    pub forbidden: Vec<PosetSpec>,
    pub pair_filter: Option<PairFilter>,
}

impl PropertySpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn forbid(forbidden: impl IntoIterator<Item = PosetSpec>) -> Self {
        PropertySpec { forbidden: forbidden.into_iter().collect(), pair_filter: None }
    }

    pub fn intersecting() -> Self {
        PropertySpec { forbidden: Vec::new(), pair_filter: Some(PairFilter::Intersecting) }
    }

    pub fn with_pair_filter(mut self, filter: Option<PairFilter>) -> Self {
        self.pair_filter = filter;
        self
    }

    /// Whether `f` has the property.
    pub fn admits(&self, f: &Family<'_>) -> bool {
        let g = f.ground();
        if self.forbidden.iter().any(|p| find_embedding(g, f.members(), p).is_some()) {
            return false;
        }
        match self.pair_filter {
            None => true,
            Some(PairFilter::Intersecting) => {
                let ids = f.ids();
                ids.iter().enumerate().all(|(i, &a)| ids[i + 1..].iter().all(|&b| g.meet_rank(a, b) >= 1))
            }
        }
    }

    /// The smallest `k` such that the property forbids a chain of `k + 1`
    /// members, if a chain is forbidden at all.
    pub fn chain_bound(&self) -> Option<usize> {
        self.forbidden.iter().filter(|p| p.is_chain()).map(|p| p.size() - 1).min()
    }
}

/// Exact nonnegative per-level weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVec(Vec<BigRational>);

impl WeightVec {
    pub fn new(weights: Vec<BigRational>) -> Result<Self, SearchError> {
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(SearchError::NegativeWeight(w.to_string()));
        }
        Ok(WeightVec(weights))
    }

    pub fn unit(n: usize) -> Self {
        WeightVec(vec![BigRational::one(); n + 1])
    }

    pub fn from_integers<I: Into<BigInt>>(ws: impl IntoIterator<Item = I>) -> Result<Self, SearchError> {
        Self::new(ws.into_iter().map(|w| BigRational::from_integer(w.into())).collect())
    }

    /// Parses `1,2/3,0` style lists.
    pub fn parse(s: &str) -> Result<Self, SearchError> {
        let ws = s
            .split(',')
            .map(str::trim)
            .map(|t| parse_rational(t).ok_or_else(|| SearchError::BadWeight(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ws)
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, level: usize) -> &BigRational {
        &self.0[level]
    }

    /// Total weight of `f`.
    pub fn weight_of(&self, f: &Family<'_>) -> BigRational {
        f.iter().map(|e| self.0[f.ground().level(e)].clone()).sum()
    }

    fn check_len(&self, g: &Ground) -> Result<(), SearchError> {
        if self.0.len() != g.n() + 1 {
            return Err(SearchError::WeightLength { expected: g.n() + 1, got: self.0.len() });
        }
        Ok(())
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{int}{frac}").parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(digits, den));
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Formats a rational as `p` or `p/q`.
pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Weights for the copy-count objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CopyWeights {
    /// Every copy counts one.
    Unit,
    /// A copy is weighted by the sorted list of its members' levels;
    /// missing keys weigh zero.
    ByLevels(BTreeMap<Vec<usize>, BigRational>),
}

/// What the search maximizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    /// Sum of per-level weights of the members.
    Linear(WeightVec),
    /// Weighted number of copies of `pattern` among the members.
    Copies { pattern: PosetSpec, weights: CopyWeights },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    pub node_cap: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { node_cap: DEFAULT_NODE_CAP, threads: None }
    }
}

impl SearchOptions {
    pub fn with_threads(threads: usize) -> Self {
        SearchOptions { threads: Some(threads), ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult<'g> {
    pub value: BigRational,
    pub witness: Family<'g>,
    pub nodes_explored: u64,
    pub proven_optimal: bool,
}

impl SearchResult<'_> {
    /// The value as an integer, when it is one.
    pub fn integer_value(&self) -> Option<BigUint> {
        if self.value.is_integer() {
            self.value.numer().to_biguint()
        } else {
            None
        }
    }
}

/// Maximum `w`-weight of a family with property `t`.
pub fn max_weight_family<'g>(
    g: &'g Ground,
    t: &PropertySpec,
    w: &WeightVec,
    opts: &SearchOptions,
) -> Result<SearchResult<'g>, SearchError> {
    max_weight_within(&Family::full(g), t, w, opts)
}

/// Maximum `w`-weight of a subfamily of `domain` with property `t`.
pub fn max_weight_within<'g>(
    domain: &Family<'g>,
    t: &PropertySpec,
    w: &WeightVec,
    opts: &SearchOptions,
) -> Result<SearchResult<'g>, SearchError> {
    maximize(domain, t, &Objective::Linear(w.clone()), opts)
}

/// Maximum of a general objective over subfamilies of `domain` with property `t`.
pub fn maximize<'g>(
    domain: &Family<'g>,
    t: &PropertySpec,
    objective: &Objective,
    opts: &SearchOptions,
) -> Result<SearchResult<'g>, SearchError> {
    let problem = Problem::new(domain, t, objective)?;
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("thread pool construction");
            pool.install(|| problem.solve(opts.node_cap))
        }
        None => problem.solve(opts.node_cap),
    }
}

/// Largest family free of every pattern in `forbidden`.
pub fn la<'g>(g: &'g Ground, forbidden: &[PosetSpec], opts: &SearchOptions) -> Result<SearchResult<'g>, SearchError> {
    max_weight_family(g, &PropertySpec::forbid(forbidden.iter().cloned()), &WeightVec::unit(g.n()), opts)
}

/// `La(n, P)` or `La_q(n, P)` as an exact integer; fails if the node cap
/// stops the search before the optimum is proven.
pub fn la_value(g: &Ground, forbidden: &[PosetSpec]) -> Result<BigUint, SearchError> {
    let r = la(g, forbidden, &SearchOptions::default())?;
    if !r.proven_optimal {
        return Err(SearchError::NodeCapExceeded(DEFAULT_NODE_CAP));
    }
    Ok(r.integer_value().expect("unit weights give integer values"))
}

/// Largest number of copies of `q_pat` in a family free of `forbidden`.
pub fn max_copies<'g>(
    g: &'g Ground,
    forbidden: &[PosetSpec],
    q_pat: &PosetSpec,
    opts: &SearchOptions,
) -> Result<SearchResult<'g>, SearchError> {
    let objective = Objective::Copies { pattern: q_pat.clone(), weights: CopyWeights::Unit };
    maximize(&Family::full(g), &PropertySpec::forbid(forbidden.iter().cloned()), &objective, opts)
}

/// Levels of the `k` middle levels used by `Σ(n, k)`. When `n - k` is even
/// there are two equally large middle windows; `alt` selects the lower one.
pub fn middle_window(n: usize, k: usize, alt: bool) -> Result<Vec<usize>, SearchError> {
    if k > n + 1 {
        return Err(SearchError::OutOfRange(format!("k={k} exceeds n+1={}", n + 1)));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    // floor((n-k)/2) + 1, with n - k possibly -1
    let mut start = (n + 2 - k) / 2;
    if alt && (n - k) % 2 == 0 && start > 0 && k <= n {
        start -= 1;
    }
    Ok((start..start + k).collect())
}

/// `Σ(n, k)` (no `q`) or `Σ_q(n, k)`.
pub fn sigma_value(n: usize, k: usize, q: Option<u64>, alt_window: bool) -> Result<BigUint, SearchError> {
    let levels = middle_window(n, k, alt_window)?;
    let mut total = BigUint::zero();
    for i in levels {
        total += match q {
            None => binomial(n as u64, i as u64),
            Some(q) => gaussian(n, i, q)?,
        };
    }
    Ok(total)
}

/// The three closed forms for generalized counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropCase {
    /// Forbid `∨`, count `∧_r`.
    I,
    /// Forbid the butterfly, count `D_r`.
    Ii,
    /// Forbid a chain, count `∧_r`.
    Iii,
}

impl FromStr for PropCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "i" => Ok(PropCase::I),
            "ii" => Ok(PropCase::Ii),
            "iii" => Ok(PropCase::Iii),
            other => Err(format!("unknown case `{other}`, expected i, ii or iii")),
        }
    }
}

pub fn prop_predict(which: PropCase, n: usize, q: u64, r: usize) -> Result<BigUint, SearchError> {
    let choose = |m: &BigUint, r: usize| -> BigUint {
        let mut acc = BigUint::one();
        for i in 0..r {
            if *m < BigUint::from(i + 1) {
                return BigUint::zero();
            }
            acc = acc * (m - BigUint::from(i)) / BigUint::from(i + 1);
        }
        acc
    };
    match which {
        PropCase::I | PropCase::Ii => Ok(choose(&gaussian(n, n / 2, q)?, r)),
        PropCase::Iii => {
            let mut best = BigUint::zero();
            for k in 0..=n {
                let v = gaussian(n, k, q)? * choose(&gaussian(k, k / 2, q)?, r);
                best = best.max(v);
            }
            Ok(best)
        }
    }
}

// ---------------------------------------------------------------------------
// Engine

struct CopyObjective {
    pattern: PosetSpec,
    /// `None` means unit weights.
    weights: Option<HashMap<Vec<usize>, u128>>,
}

struct Problem<'g> {
    g: &'g Ground,
    /// Element indices in branch order.
    order: Vec<usize>,
    /// Scaled weight per element index (linear objective only).
    linear: Option<Vec<u128>>,
    /// `suffix[d]` = total weight of `order[d..]` (linear objective only).
    suffix: Vec<u128>,
    copies: Option<CopyObjective>,
    /// Per element, the candidates it cannot coexist with.
    conflicts: Option<Vec<FixedBitSet>>,
    /// Patterns checked by embedding search (three or more elements).
    patterns: Vec<PosetSpec>,
    /// A one-element pattern is forbidden, so only the empty family qualifies.
    only_empty: bool,
    scale: BigInt,
}

struct State {
    members: FixedBitSet,
    dead: Vec<u32>,
    value: u128,
}

struct TaskOutcome {
    best: Option<(u128, FixedBitSet)>,
    nodes: u64,
}

/// Seed families: the greedy family and feasible windows of consecutive levels.
struct Seed {
    value: u128,
    members: FixedBitSet,
}

const FLUSH_EVERY: u64 = 1 << 12;

struct Budget {
    cap: u64,
    used: AtomicU64,
    exhausted: AtomicBool,
}

impl Budget {
    fn charge(&self, nodes: u64) -> bool {
        let total = self.used.fetch_add(nodes, Ordering::Relaxed) + nodes;
        if total > self.cap {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        !self.exhausted.load(Ordering::Relaxed)
    }
}

fn scale_of<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    values.fold(BigInt::one(), |acc, w| acc.lcm(w.denom()))
}

fn scaled(w: &BigRational, scale: &BigInt) -> Result<u128, SearchError> {
    let v = w * BigRational::from_integer(scale.clone());
    debug_assert!(v.is_integer());
    v.to_integer().to_u128().ok_or(SearchError::Overflow)
}

impl<'g> Problem<'g> {
    fn new(domain: &Family<'g>, t: &PropertySpec, objective: &Objective) -> Result<Self, SearchError> {
        let g = domain.ground();
        let mut candidates: Vec<usize> = domain.members().ones().collect();
        let (linear, copies, scale) = match objective {
            Objective::Linear(w) => {
                w.check_len(g)?;
                let scale = scale_of(w.as_slice().iter());
                let per_level = w.as_slice().iter().map(|x| scaled(x, &scale)).collect::<Result<Vec<_>, _>>()?;
                let per_elem: Vec<u128> = (0..g.len()).map(|e| per_level[g.level(ElementId(e))]).collect();
                candidates.retain(|&e| per_elem[e] > 0);
                // Descending weight, then index.
                candidates.sort_by(|&a, &b| per_elem[b].cmp(&per_elem[a]).then(a.cmp(&b)));
                let total = candidates.iter().try_fold(0u128, |acc, &e| acc.checked_add(per_elem[e]));
                total.ok_or(SearchError::Overflow)?;
                (Some(per_elem), None, scale)
            }
            Objective::Copies { pattern, weights } => match weights {
                CopyWeights::Unit => {
                    (None, Some(CopyObjective { pattern: pattern.clone(), weights: None }), BigInt::one())
                }
                CopyWeights::ByLevels(map) => {
                    let scale = scale_of(map.values());
                    let mut table = HashMap::new();
                    let mut useful = vec![false; g.n() + 1];
                    for (levels, w) in map {
                        let s = scaled(w, &scale)?;
                        if s > 0 {
                            for &l in levels {
                                if l <= g.n() {
                                    useful[l] = true;
                                }
                            }
                            table.insert(levels.clone(), s);
                        }
                    }
                    candidates.retain(|&e| useful[g.level(ElementId(e))]);
                    (None, Some(CopyObjective { pattern: pattern.clone(), weights: Some(table) }), scale)
                }
            },
        };

        let mut suffix = vec![0u128; candidates.len() + 1];
        if let Some(lin) = &linear {
            for d in (0..candidates.len()).rev() {
                suffix[d] = suffix[d + 1] + lin[candidates[d]];
            }
        }

        let mut pair_tests: Vec<Box<dyn Fn(usize, usize) -> bool + '_>> = Vec::new();
        let mut patterns = Vec::new();
        let mut only_empty = false;
        for p in &t.forbidden {
            match p.size() {
                0 | 1 => only_empty = true,
                2 if p.is_chain() => pair_tests.push(Box::new(|a, b| g.comparable(ElementId(a), ElementId(b)))),
                // Weak containment: two incomparable pattern elements fit any pair.
                2 => pair_tests.push(Box::new(|_, _| true)),
                _ => patterns.push(p.clone()),
            }
        }
        if t.pair_filter == Some(PairFilter::Intersecting) {
            pair_tests.push(Box::new(|a, b| g.meet_rank(ElementId(a), ElementId(b)) == 0));
        }
        let conflicts = if pair_tests.is_empty() {
            None
        } else {
            let mut c = vec![FixedBitSet::with_capacity(g.len()); g.len()];
            for (i, &a) in candidates.iter().enumerate() {
                for &b in &candidates[i + 1..] {
                    if pair_tests.iter().any(|test| test(a, b)) {
                        c[a].insert(b);
                        c[b].insert(a);
                    }
                }
            }
            Some(c)
        };
        drop(pair_tests);

        Ok(Problem { g, order: candidates, linear, suffix, copies, conflicts, patterns, only_empty, scale })
    }

    fn fresh_state(&self) -> State {
        State { members: FixedBitSet::with_capacity(self.g.len()), dead: vec![0; self.g.len()], value: 0 }
    }

    fn copy_weight(&self, obj: &CopyObjective, image: &[usize]) -> u128 {
        match &obj.weights {
            None => 1,
            Some(table) => {
                let levels: Vec<usize> = image.iter().map(|&x| self.g.level(ElementId(x))).collect();
                table.get(&levels).copied().unwrap_or(0)
            }
        }
    }

    fn copies_value(&self, obj: &CopyObjective, members: &FixedBitSet, using: Option<usize>) -> Option<u128> {
        let mut total = Some(0u128);
        for_each_copy(self.g, members, &obj.pattern, using, &mut |img| {
            total = total.and_then(|t| t.checked_add(self.copy_weight(obj, img)));
        });
        total
    }

    /// Adds `x` if the property allows it; returns the value increment.
    fn try_include(&self, st: &mut State, x: usize) -> Result<Option<u128>, SearchError> {
        if self.only_empty || st.dead[x] > 0 {
            return Ok(None);
        }
        st.members.insert(x);
        if self.patterns.iter().any(|p| contains_copy_using(self.g, &st.members, p, x)) {
            st.members.set(x, false);
            return Ok(None);
        }
        let inc = match (&self.linear, &self.copies) {
            (Some(lin), _) => lin[x],
            (None, Some(obj)) => self.copies_value(obj, &st.members, Some(x)).ok_or(SearchError::Overflow)?,
            (None, None) => unreachable!("objective is always set"),
        };
        st.value = st.value.checked_add(inc).ok_or(SearchError::Overflow)?;
        if let Some(c) = &self.conflicts {
            for y in c[x].ones() {
                st.dead[y] += 1;
            }
        }
        Ok(Some(inc))
    }

    fn undo_include(&self, st: &mut State, x: usize, inc: u128) {
        st.members.set(x, false);
        st.value -= inc;
        if let Some(c) = &self.conflicts {
            for y in c[x].ones() {
                st.dead[y] -= 1;
            }
        }
    }

    /// Upper bound on the value of any completion of `st` from `depth`.
    fn bound(&self, st: &State, depth: usize) -> u128 {
        let alive = |d: &usize| st.dead[self.order[*d]] == 0;
        match (&self.linear, &self.copies) {
            (Some(lin), _) => match &self.conflicts {
                None => st.value + self.suffix[depth],
                Some(_) => st.value + (depth..self.order.len()).filter(alive).map(|d| lin[self.order[d]]).sum::<u128>(),
            },
            (None, Some(obj)) => {
                if depth == self.order.len() {
                    return st.value;
                }
                let mut union = st.members.clone();
                union.extend((depth..self.order.len()).filter(alive).map(|d| self.order[d]));
                self.copies_value(obj, &union, None).unwrap_or(u128::MAX)
            }
            (None, None) => unreachable!(),
        }
    }

    /// Value of a whole family, or `None` if it lacks the property.
    fn evaluate(&self, members: &FixedBitSet) -> Option<u128> {
        if self.only_empty && members.count_ones(..) > 0 {
            return None;
        }
        if let Some(c) = &self.conflicts {
            if members.ones().any(|x| !c[x].is_disjoint(members)) {
                return None;
            }
        }
        if self.patterns.iter().any(|p| find_embedding(self.g, members, p).is_some()) {
            return None;
        }
        match (&self.linear, &self.copies) {
            (Some(lin), _) => Some(members.ones().map(|x| lin[x]).sum()),
            (None, Some(obj)) => self.copies_value(obj, members, None),
            (None, None) => unreachable!(),
        }
    }

    fn seed(&self) -> Result<Seed, SearchError> {
        // Greedy: the first leaf of the include-first traversal.
        let mut st = self.fresh_state();
        for &x in &self.order {
            self.try_include(&mut st, x)?;
        }
        let mut best = Seed { value: st.value, members: st.members };
        let n = self.g.n();
        let mut in_order = FixedBitSet::with_capacity(self.g.len());
        in_order.extend(self.order.iter().copied());
        for lo in 0..=n {
            for hi in lo..=n {
                let mut m = FixedBitSet::with_capacity(self.g.len());
                m.insert_range(self.g.level_range(lo).start..self.g.level_range(hi).end);
                m.intersect_with(&in_order);
                if let Some(v) = self.evaluate(&m) {
                    if v > best.value {
                        best = Seed { value: v, members: m };
                    }
                }
            }
        }
        Ok(best)
    }

    fn split_depth(&self) -> usize {
        let n = self.order.len();
        if n <= 16 {
            0
        } else {
            (n / 4).min(8)
        }
    }

    /// Include/exclude prefixes of length `split_depth`, in traversal order.
    fn prefixes(&self, depth: usize, seed: u128, nodes: &mut u64) -> Result<Vec<Vec<bool>>, SearchError> {
        fn rec(
            p: &Problem<'_>,
            st: &mut State,
            path: &mut Vec<bool>,
            depth: usize,
            seed: u128,
            nodes: &mut u64,
            out: &mut Vec<Vec<bool>>,
        ) -> Result<(), SearchError> {
            *nodes += 1;
            if p.bound(st, path.len()) < seed {
                return Ok(());
            }
            if path.len() == depth {
                out.push(path.clone());
                return Ok(());
            }
            let x = p.order[path.len()];
            if let Some(inc) = p.try_include(st, x)? {
                path.push(true);
                rec(p, st, path, depth, seed, nodes, out)?;
                path.pop();
                p.undo_include(st, x, inc);
            }
            path.push(false);
            rec(p, st, path, depth, seed, nodes, out)?;
            path.pop();
            Ok(())
        }
        let mut out = Vec::new();
        let mut st = self.fresh_state();
        rec(self, &mut st, &mut Vec::new(), depth, seed, nodes, &mut out)?;
        Ok(out)
    }

    fn run_task(&self, prefix: &[bool], seed: u128, budget: &Budget) -> Result<TaskOutcome, SearchError> {
        let mut st = self.fresh_state();
        for (d, &inc) in prefix.iter().enumerate() {
            if inc {
                let added = self.try_include(&mut st, self.order[d])?;
                debug_assert!(added.is_some());
            }
        }
        let n = self.order.len();
        let mut best: Option<(u128, FixedBitSet)> = None;
        let mut nodes = 0u64;
        let mut pending = 0u64;
        // (depth, phase, increment): phase 0 = enter, 1 = include branch done, 2 = both done
        let mut stack: Vec<(usize, u8, u128)> = vec![(prefix.len(), 0, 0)];
        while let Some(&(depth, phase, inc)) = stack.last() {
            match phase {
                0 => {
                    nodes += 1;
                    pending += 1;
                    if pending == FLUSH_EVERY {
                        pending = 0;
                        if !budget.charge(FLUSH_EVERY) {
                            break;
                        }
                    }
                    let b = self.bound(&st, depth);
                    if b < seed || best.as_ref().is_some_and(|(v, _)| b <= *v) {
                        stack.pop();
                        continue;
                    }
                    if depth == n {
                        best = Some((st.value, st.members.clone()));
                        stack.pop();
                        continue;
                    }
                    let x = self.order[depth];
                    let top = stack.len() - 1;
                    match self.try_include(&mut st, x)? {
                        Some(added) => stack[top] = (depth, 1, added),
                        None => stack[top] = (depth, 2, 0),
                    }
                    stack.push((depth + 1, 0, 0));
                }
                1 => {
                    self.undo_include(&mut st, self.order[depth], inc);
                    let top = stack.len() - 1;
                    stack[top] = (depth, 2, 0);
                    stack.push((depth + 1, 0, 0));
                }
                _ => {
                    stack.pop();
                }
            }
        }
        budget.charge(pending);
        Ok(TaskOutcome { best, nodes })
    }

    fn solve(&self, node_cap: u64) -> Result<SearchResult<'g>, SearchError> {
        let seed = self.seed()?;
        let mut nodes = 0u64;
        let prefixes = self.prefixes(self.split_depth(), seed.value, &mut nodes)?;
        let budget = Budget { cap: node_cap, used: AtomicU64::new(nodes), exhausted: AtomicBool::new(nodes > node_cap) };
        let outcomes: Vec<TaskOutcome> = prefixes
            .par_iter()
            .map(|p| self.run_task(p, seed.value, &budget))
            .collect::<Result<_, _>>()?;
        let mut best: Option<(u128, FixedBitSet)> = None;
        for o in outcomes {
            nodes += o.nodes;
            if let Some((v, m)) = o.best {
                if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                    best = Some((v, m));
                }
            }
        }
        let proven = !budget.exhausted.load(Ordering::Relaxed);
        let (value, members) = match best {
            Some((v, m)) if v >= seed.value => (v, m),
            _ => {
                debug_assert!(!proven, "the optimum is never pruned");
                (seed.value, seed.members)
            }
        };
        Ok(SearchResult {
            value: BigRational::new(BigInt::from(value), self.scale.clone()),
            witness: Family::from_bits(self.g, members),
            nodes_explored: nodes,
            proven_optimal: proven,
        })
    }
}

//! Small pattern posets and their weak embeddings into families.
//!
//! A family contains a pattern `P` if some injection `f` from `P` into the
//! family satisfies `x <_P y => f(x) < f(y)`. Extra relations among the
//! images are allowed. A copy is identified with its image set.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use thiserror::Error;

use crate::lattice::{build_boolean, ElementId, Family, Ground};

/// Largest pattern accepted by the containment search.
pub const MAX_PATTERN_SIZE: usize = 8;
pub const MAX_E_OF_POSET_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("cannot parse poset `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("relations contain a cycle through element {0}")]
    CycleDetected(usize),
    #[error("pattern has {0} elements, at most {MAX_PATTERN_SIZE} are supported")]
    TooLarge(usize),
    #[error("n_max={0} exceeds {MAX_E_OF_POSET_N}")]
    HorizonTooLarge(usize),
}

/// A finite strict partial order on `0..size`, transitively closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PosetSpec {
    size: usize,
    /// `above[i]` has bit `j` set iff `i < j`.
    above: Vec<u16>,
    name: Option<String>,
}

impl PosetSpec {
    /// Builds the transitive closure of `relations` (pairs `(i, j)` meaning `i < j`).
    pub fn from_relations(size: usize, relations: &[(usize, usize)]) -> Result<Self, PosetError> {
        if size > MAX_PATTERN_SIZE {
            return Err(PosetError::TooLarge(size));
        }
        let mut above = vec![0u16; size];
        for &(i, j) in relations {
            if i >= size || j >= size {
                return Err(PosetError::Parse {
                    input: format!("{i}<{j}"),
                    reason: format!("element out of range for size {size}"),
                });
            }
            above[i] |= 1 << j;
        }
        // Warshall
        for k in 0..size {
            for i in 0..size {
                if above[i] >> k & 1 == 1 {
                    above[i] |= above[k];
                }
            }
        }
        if let Some(i) = (0..size).find(|&i| above[i] >> i & 1 == 1) {
            return Err(PosetError::CycleDetected(i));
        }
        Ok(PosetSpec { size, above, name: None })
    }

    fn named(mut self, name: String) -> Self {
        self.name = Some(name);
        self
    }

    /// `P_k`: a total order on `k` elements.
    pub fn chain(k: usize) -> Result<Self, PosetError> {
        let rels: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Ok(Self::from_relations(k, &rels)?.named(format!("chain:{k}")))
    }

    /// `∨_v`: one element below `v` others.
    pub fn fork(v: usize) -> Result<Self, PosetError> {
        let rels: Vec<_> = (1..=v).map(|i| (0, i)).collect();
        Ok(Self::from_relations(v + 1, &rels)?.named(format!("fork:{v}")))
    }

    /// `∧_u`: `u` elements below one.
    pub fn broom(u: usize) -> Result<Self, PosetError> {
        let rels: Vec<_> = (0..u).map(|i| (i, u)).collect();
        Ok(Self::from_relations(u + 1, &rels)?.named(format!("broom:{u}")))
    }

    pub fn vee() -> Self {
        Self::from_relations(3, &[(0, 1), (0, 2)]).unwrap().named("vee".into())
    }

    pub fn wedge() -> Self {
        Self::from_relations(3, &[(0, 2), (1, 2)]).unwrap().named("wedge".into())
    }

    /// `a, b < c, d`.
    pub fn butterfly() -> Self {
        Self::from_relations(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap().named("butterfly".into())
    }

    /// `D_r`: `a < b_i < c` for `r` middle elements.
    pub fn diamond(r: usize) -> Result<Self, PosetError> {
        let top = r + 1;
        let rels: Vec<_> = (1..=r).flat_map(|i| [(0, i), (i, top)]).collect();
        Ok(Self::from_relations(r + 2, &rels)?.named(format!("diamond:{r}")))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn less(&self, i: usize, j: usize) -> bool {
        self.above[i] >> j & 1 == 1
    }

    pub fn relations(&self) -> Vec<(usize, usize)> {
        (0..self.size).flat_map(|i| (0..self.size).filter(move |&j| self.less(i, j)).map(move |j| (i, j))).collect()
    }

    /// True when every pair of elements is comparable.
    pub fn is_chain(&self) -> bool {
        (0..self.size).all(|i| (i + 1..self.size).all(|j| self.less(i, j) || self.less(j, i)))
    }

    /// Elements ordered so that every element comes after everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.size).collect();
        order.sort_by_key(|&i| (self.height_below(i), i));
        order
    }

    /// Length of the longest chain strictly below `i`.
    pub fn height_below(&self, i: usize) -> usize {
        (0..self.size).filter(|&j| self.less(j, i)).map(|j| self.height_below(j) + 1).max().unwrap_or(0)
    }

    /// Length of the longest chain strictly above `i`.
    pub fn height_above(&self, i: usize) -> usize {
        (0..self.size).filter(|&j| self.less(i, j)).map(|j| self.height_above(j) + 1).max().unwrap_or(0)
    }

    /// Canonical spec string (the name, or a `custom:` listing).
    pub fn spec_string(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        let mut parts: Vec<String> = self.relations().iter().map(|(i, j)| format!("{i}<{j}")).collect();
        for i in 0..self.size {
            let touched = (0..self.size).any(|j| self.less(i, j) || self.less(j, i));
            if !touched {
                parts.push(i.to_string());
            }
        }
        format!("custom:{}", parts.join(";"))
    }
}

impl fmt::Display for PosetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

impl FromStr for PosetSpec {
    type Err = PosetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poset(s)
    }
}

/// Parses `chain:k | vee | wedge | fork:v | broom:u | butterfly | diamond:r | custom:...`.
///
/// The custom form lists `;`-separated items, each either a chain of
/// relations `i<j<...` or a lone element index.
pub fn parse_poset(spec: &str) -> Result<PosetSpec, PosetError> {
    let err = |reason: &str| PosetError::Parse { input: spec.to_string(), reason: reason.to_string() };
    let s = spec.trim();
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (s, None),
    };
    let count = |arg: Option<&str>, min: usize| -> Result<usize, PosetError> {
        let a = arg.ok_or_else(|| err("missing size argument"))?;
        let v: usize = a.parse().map_err(|_| err("size argument is not a nonnegative integer"))?;
        if v < min {
            return Err(err(&format!("size argument must be at least {min}")));
        }
        Ok(v)
    };
    let no_arg = |arg: Option<&str>| match arg {
        Some(_) => Err(err("this pattern takes no argument")),
        None => Ok(()),
    };
    match head {
        "chain" => PosetSpec::chain(count(arg, 1)?),
        "fork" => PosetSpec::fork(count(arg, 1)?),
        "broom" => PosetSpec::broom(count(arg, 1)?),
        "diamond" => PosetSpec::diamond(count(arg, 1)?),
        "vee" => no_arg(arg).map(|_| PosetSpec::vee()),
        "wedge" => no_arg(arg).map(|_| PosetSpec::wedge()),
        "butterfly" => no_arg(arg).map(|_| PosetSpec::butterfly()),
        "custom" => {
            let body = arg.ok_or_else(|| err("custom needs relations"))?;
            let mut rels = Vec::new();
            let mut max = None::<usize>;
            for item in body.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                let idx: Vec<usize> = item
                    .split('<')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| err(&format!("bad item `{item}`"))))
                    .collect::<Result<_, _>>()?;
                max = idx.iter().copied().chain(max).max();
                rels.extend(idx.windows(2).map(|w| (w[0], w[1])));
            }
            let size = max.map(|m| m + 1).ok_or_else(|| err("custom needs at least one element"))?;
            if size > MAX_PATTERN_SIZE {
                return Err(PosetError::TooLarge(size));
            }
            PosetSpec::from_relations(size, &rels)
        }
        _ => Err(err("unknown pattern name")),
    }
}

/// Parses a comma-separated list of pattern specs. Commas inside a
/// `custom:` body are not allowed, so the split is unambiguous.
pub fn parse_poset_list(list: &str) -> Result<Vec<PosetSpec>, PosetError> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse_poset).collect()
}

/// An injection from pattern elements to ground elements.
pub type Embedding = Vec<ElementId>;

/// Backtracking matcher for one pattern inside one member set.
pub(crate) struct Matcher<'a> {
    ground: &'a Ground,
    members: &'a FixedBitSet,
    pattern: &'a PosetSpec,
    order: Vec<usize>,
    /// Admissible index range per pattern element, from level bounds.
    window: Vec<(usize, usize)>,
}

impl<'a> Matcher<'a> {
    pub(crate) fn new(ground: &'a Ground, members: &'a FixedBitSet, pattern: &'a PosetSpec) -> Self {
        let n = ground.n();
        let window = (0..pattern.size())
            .map(|v| {
                let lo = pattern.height_below(v);
                let hi_level = n as isize - pattern.height_above(v) as isize;
                if hi_level < lo as isize {
                    (0, 0)
                } else {
                    (ground.level_range(lo).start, ground.level_range(hi_level as usize).end)
                }
            })
            .collect();
        Matcher { ground, members, pattern, order: pattern.linear_extension(), window }
    }

    /// Calls `visit` with every embedding (optionally with `pin = (v, x)`
    /// forcing pattern element `v` onto `x`). Stops when `visit` returns
    /// true; returns whether it stopped.
    pub(crate) fn run(&self, pin: Option<(usize, usize)>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let size = self.pattern.size();
        if size == 0 {
            return visit(&[]);
        }
        let mut seq = Vec::with_capacity(size);
        if let Some((v, x)) = pin {
            let (lo, hi) = self.window[v];
            if x < lo || x >= hi || !self.members.contains(x) {
                return false;
            }
            seq.push(v);
        }
        seq.extend(self.order.iter().copied().filter(|&u| pin.map_or(true, |(v, _)| u != v)));
        let mut image = vec![usize::MAX; size];
        let mut used = FixedBitSet::with_capacity(self.ground.len());
        if let Some((v, x)) = pin {
            image[v] = x;
            used.insert(x);
        }
        let start = usize::from(pin.is_some());
        let mut scratch = vec![FixedBitSet::with_capacity(self.ground.len()); size];
        self.step(&seq, start, &mut image, &mut used, &mut scratch, visit)
    }

    fn step(
        &self,
        seq: &[usize],
        pos: usize,
        image: &mut [usize],
        used: &mut FixedBitSet,
        scratch: &mut [FixedBitSet],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if pos == seq.len() {
            return visit(image);
        }
        let v = seq[pos];
        let (lo, hi) = self.window[v];
        if lo >= hi {
            return false;
        }
        let (head, tail) = scratch.split_at_mut(pos + 1);
        let _ = tail;
        let cand = &mut head[pos];
        cand.clone_from(self.members);
        cand.difference_with(used);
        for &u in &seq[..pos] {
            let img = ElementId(image[u]);
            if self.pattern.less(u, v) {
                cand.intersect_with(&self.ground.up(img));
            } else if self.pattern.less(v, u) {
                cand.intersect_with(&self.ground.down(img));
            }
        }
        let candidates: Vec<usize> = cand.ones().skip_while(|&x| x < lo).take_while(|&x| x < hi).collect();
        for x in candidates {
            image[v] = x;
            used.insert(x);
            let stop = self.step(seq, pos + 1, image, used, scratch, visit);
            used.set(x, false);
            if stop {
                image[v] = usize::MAX;
                return true;
            }
        }
        image[v] = usize::MAX;
        false
    }
}

pub(crate) fn find_embedding(ground: &Ground, members: &FixedBitSet, pattern: &PosetSpec) -> Option<Embedding> {
    let mut found = None;
    Matcher::new(ground, members, pattern).run(None, &mut |img| {
        found = Some(img.iter().map(|&x| ElementId(x)).collect());
        true
    });
    found
}

/// Whether `members` contains a copy of `pattern` that uses `x`.
pub(crate) fn contains_copy_using(ground: &Ground, members: &FixedBitSet, pattern: &PosetSpec, x: usize) -> bool {
    let m = Matcher::new(ground, members, pattern);
    (0..pattern.size()).any(|v| m.run(Some((v, x)), &mut |_| true))
}

/// Visits each distinct copy (image set, sorted) once. With `using = Some(x)`
/// only copies containing `x` are visited.
pub(crate) fn for_each_copy(
    ground: &Ground,
    members: &FixedBitSet,
    pattern: &PosetSpec,
    using: Option<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    let m = Matcher::new(ground, members, pattern);
    let chain = pattern.is_chain();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut handle = |img: &[usize]| {
        let mut set = img.to_vec();
        set.sort_unstable();
        // A chain's image set determines the injection, so no dedup needed.
        if chain || seen.insert(set.clone()) {
            visit(&set);
        }
        false
    };
    match using {
        None => {
            m.run(None, &mut handle);
        }
        Some(x) => {
            for v in 0..pattern.size() {
                m.run(Some((v, x)), &mut handle);
            }
        }
    }
}

/// Finds a copy of `p` in `f`, returning the embedding if there is one.
pub fn contains_copy(f: &Family<'_>, p: &PosetSpec) -> Option<Embedding> {
    find_embedding(f.ground(), f.members(), p)
}

/// Number of distinct member subsets that are images of an order-preserving
/// injection of `pattern`.
pub fn count_copies(f: &Family<'_>, pattern: &PosetSpec) -> BigUint {
    let mut count = 0u64;
    for_each_copy(f.ground(), f.members(), pattern, None, &mut |_| count += 1);
    BigUint::from(count)
}

/// Outcome of the consecutive-levels test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsecutiveLevelsBound {
    /// Largest `m` such that every `m` consecutive levels of `2^[n]` are
    /// `P`-free for all checked `n`.
    pub m: usize,
    /// Every `n <= certified_up_to` was checked; larger `n` were not.
    pub certified_up_to: usize,
}

/// Largest number of consecutive Boolean levels that never host `p`,
/// certified for `n <= n_max`.
pub fn e_of_poset(p: &PosetSpec, n_max: usize) -> Result<ConsecutiveLevelsBound, PosetError> {
    if n_max > MAX_E_OF_POSET_N {
        return Err(PosetError::HorizonTooLarge(n_max));
    }
    let grounds: Vec<Ground> = (0..=n_max).map(|n| build_boolean(n).expect("n within cap")).collect();
    // Containing P is monotone in the window width, so grow m until some
    // window of width m hosts a copy.
    for m in 1..=n_max + 1 {
        for g in &grounds {
            let n = g.n();
            if m > n + 1 {
                continue;
            }
            for start in 0..=n + 1 - m {
                let levels: Vec<usize> = (start..start + m).collect();
                if contains_copy(&Family::levels(g, &levels), p).is_some() {
                    return Ok(ConsecutiveLevelsBound { m: m - 1, certified_up_to: n_max });
                }
            }
        }
    }
    Ok(ConsecutiveLevelsBound { m: n_max + 1, certified_up_to: n_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_subspace, Descriptor};
    use proptest::prelude::*;

    #[test]
    fn parse_named_patterns() {
        let b = parse_poset("butterfly").unwrap();
        assert_eq!(b.size(), 4);
        assert_eq!(b.relations(), vec![(0, 2), (0, 3), (1, 2), (1, 3)]);

        let c = parse_poset("chain:3").unwrap();
        assert!(c.is_chain());
        assert!(c.less(0, 2));

        let d = parse_poset("diamond:2").unwrap();
        assert_eq!(d.relations(), vec![(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]);

        assert_eq!(parse_poset("vee").unwrap().relations(), vec![(0, 1), (0, 2)]);
        assert_eq!(parse_poset("wedge").unwrap().relations(), vec![(0, 2), (1, 2)]);
        assert_eq!(parse_poset("broom:2").unwrap().relations(), parse_poset("wedge").unwrap().relations());
        assert_eq!(parse_poset("fork:2").unwrap().relations(), parse_poset("vee").unwrap().relations());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_poset("custom:0<1;1<0"), Err(PosetError::CycleDetected(0)));
        assert!(matches!(parse_poset("broom:nope"), Err(PosetError::Parse { .. })));
        assert!(matches!(parse_poset("octopus"), Err(PosetError::Parse { .. })));
        assert!(matches!(parse_poset("vee:2"), Err(PosetError::Parse { .. })));
        assert!(matches!(parse_poset("chain:0"), Err(PosetError::Parse { .. })));
        assert_eq!(parse_poset("chain:9"), Err(PosetError::TooLarge(9)));
        assert_eq!(parse_poset("custom:0<8"), Err(PosetError::TooLarge(9)));
    }

    #[test]
    fn custom_round_trip() {
        let p = parse_poset("custom:0<1<2;3").unwrap();
        assert_eq!(p.size(), 4);
        assert!(p.less(0, 2));
        let again = parse_poset(&p.spec_string()).unwrap();
        assert_eq!(again.relations(), p.relations());
        assert_eq!(again.size(), p.size());
    }

    #[test]
    fn closure_is_idempotent() {
        for s in ["butterfly", "diamond:3", "custom:0<1;1<2;2<3;4<2", "broom:4", "chain:8"] {
            let p = parse_poset(s).unwrap();
            let again = PosetSpec::from_relations(p.size(), &p.relations()).unwrap();
            assert_eq!(again.relations(), p.relations(), "{s}");
            assert!((0..p.size()).all(|i| !p.less(i, i)));
        }
    }

    #[test]
    fn containment_examples() {
        let g = build_boolean(2).unwrap();
        let f = Family::from_ids(
            &g,
            [Descriptor::Set(0), Descriptor::Set(0b01), Descriptor::Set(0b11)].iter().map(|d| g.find(d).unwrap()),
        );
        let emb = contains_copy(&f, &PosetSpec::chain(3).unwrap()).unwrap();
        assert!(g.lt(emb[0], emb[1]) && g.lt(emb[1], emb[2]));

        let g4 = build_boolean(4).unwrap();
        assert!(contains_copy(&Family::levels(&g4, &[1, 2]), &PosetSpec::butterfly()).is_none());
        assert!(contains_copy(&Family::levels(&g4, &[1, 2, 3]), &PosetSpec::butterfly()).is_some());

        let single = Family::from_ids(&g4, [ElementId(3)]);
        assert!(contains_copy(&single, &PosetSpec::chain(2).unwrap()).is_none());
        assert!(contains_copy(&single, &PosetSpec::chain(1).unwrap()).is_some());
    }

    #[test]
    fn count_examples() {
        let g = build_boolean(2).unwrap();
        assert_eq!(count_copies(&Family::full(&g), &PosetSpec::chain(2).unwrap()), BigUint::from(5u32));

        let s = build_subspace(2, 2).unwrap();
        let lines_and_top = Family::levels(&s, &[1, 2]);
        assert_eq!(count_copies(&lines_and_top, &PosetSpec::wedge()), BigUint::from(3u32));
        assert_eq!(count_copies(&lines_and_top, &PosetSpec::chain(1).unwrap()), BigUint::from(4u32));
        // All five elements: three 0 < l < V chains.
        assert_eq!(count_copies(&Family::full(&s), &PosetSpec::diamond(1).unwrap()), BigUint::from(3u32));
    }

    #[test]
    fn consecutive_levels() {
        assert_eq!(e_of_poset(&PosetSpec::butterfly(), 8).unwrap(), ConsecutiveLevelsBound { m: 2, certified_up_to: 8 });
        assert_eq!(e_of_poset(&PosetSpec::vee(), 8).unwrap().m, 1);
        for k in 1..=4 {
            assert_eq!(e_of_poset(&PosetSpec::chain(k).unwrap(), 6).unwrap().m, k - 1);
        }
        assert!(matches!(e_of_poset(&PosetSpec::vee(), 11), Err(PosetError::HorizonTooLarge(11))));
    }

    // Brute-force oracle: all ordered tuples of distinct members.
    fn brute_copies(f: &Family<'_>, p: &PosetSpec) -> usize {
        let ids = f.ids();
        let g = f.ground();
        let mut sets = HashSet::new();
        fn rec(
            g: &Ground,
            ids: &[ElementId],
            p: &PosetSpec,
            acc: &mut Vec<ElementId>,
            sets: &mut HashSet<Vec<ElementId>>,
        ) {
            if acc.len() == p.size() {
                let mut s = acc.clone();
                s.sort();
                sets.insert(s);
                return;
            }
            let v = acc.len();
            for &x in ids {
                if acc.contains(&x) {
                    continue;
                }
                let ok = (0..v).all(|u| {
                    (!p.less(u, v) || g.lt(acc[u], x)) && (!p.less(v, u) || g.lt(x, acc[u]))
                });
                if ok {
                    acc.push(x);
                    rec(g, ids, p, acc, sets);
                    acc.pop();
                }
            }
        }
        rec(g, &ids, p, &mut Vec::new(), &mut sets);
        sets.len()
    }

    fn comparable_pairs_oracle(f: &Family<'_>) -> usize {
        let ids = f.ids();
        let g = f.ground();
        let mut c = 0;
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if g.lt(a, b) || g.lt(b, a) {
                    c += 1;
                }
            }
        }
        c
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn chain2_count_is_comparable_pairs(which in 0usize..4, bits in proptest::collection::vec(any::<bool>(), 100)) {
            let g = match which {
                0 => build_boolean(4).unwrap(),
                1 => build_subspace(3, 2).unwrap(),
                2 => build_boolean(6).unwrap(),
                _ => build_subspace(2, 5).unwrap(),
            };
            let f = Family::from_ids(&g, g.ids().filter(|e| bits[e.0 % bits.len()] ^ (e.0 >= bits.len())));
            prop_assert_eq!(count_copies(&f, &PosetSpec::chain(2).unwrap()), BigUint::from(comparable_pairs_oracle(&f)));
        }

        #[test]
        fn counts_match_brute_force(pat in 0usize..6, bits in proptest::collection::vec(any::<bool>(), 16)) {
            let g = build_subspace(3, 2).unwrap();
            let p = [
                PosetSpec::butterfly(), PosetSpec::vee(), PosetSpec::wedge(),
                PosetSpec::diamond(2).unwrap(), PosetSpec::chain(3).unwrap(), PosetSpec::broom(3).unwrap(),
            ][pat].clone();
            let f = Family::from_ids(&g, g.ids().filter(|e| bits[e.0]));
            let n = count_copies(&f, &p);
            prop_assert_eq!(n.clone(), BigUint::from(brute_copies(&f, &p)));
            prop_assert_eq!(contains_copy(&f, &p).is_some(), n > BigUint::from(0u32));
        }

        #[test]
        fn containment_is_monotone(pat in 0usize..4, bits in proptest::collection::vec(any::<bool>(), 16), extra in 0usize..16) {
            let g = build_boolean(4).unwrap();
            let p = [PosetSpec::butterfly(), PosetSpec::vee(), PosetSpec::diamond(2).unwrap(), PosetSpec::chain(3).unwrap()][pat].clone();
            let f = Family::from_ids(&g, g.ids().filter(|e| bits[e.0]));
            let mut sup = f.clone();
            sup.insert(ElementId(extra));
            if contains_copy(&f, &p).is_some() {
                prop_assert!(contains_copy(&sup, &p).is_some());
            }
        }
    }
}

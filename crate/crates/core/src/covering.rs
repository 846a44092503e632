//! Coverings of a ground by subfamilies, the weighted covering bound and
//! LYM-type sums.
//!
//! A covering `Γ` is a multiset of subfamilies such that each element of
//! level `i` lies in exactly `t_i` of them. If every member of `Γ` carries
//! at most `x` of the weight `w/t` on its property-`T` subfamilies, then
//! every property-`T` family has `w`-weight at most `|Γ| x`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lattice::{
    basis_count, bases, factorial, sublattice_from_raw, ElementId, Family, Ground, GroundKind, LatticeError,
};
use crate::poset::{for_each_copy, PosetSpec};
use crate::search::{max_weight_within, PropertySpec, SearchError, SearchOptions, SearchResult, WeightVec};

/// Largest `n` for the permutation-based coverings (`n!` members).
pub const MAX_PERMUTATION_N: usize = 6;
/// Largest number of bases for the sublattice covering.
pub const MAX_SUBLATTICE_BASES: u64 = 10_000;
/// Largest number of chains `chain_tuple_cover` will enumerate.
pub const MAX_TUPLE_CHAINS: u64 = 1_000_000;
pub const MAX_TUPLE_LENGTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoveringError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("level tuple {0:?} is not strictly increasing within the ground's levels")]
    InvalidTuple(Vec<usize>),
    #[error("level {0} has multiplicity zero but positive weight")]
    ZeroMultiplicity(usize),
    #[error("multiplicity vector has {got} entries, expected {expected}")]
    MultiplicityLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoveringMethod {
    /// All maximal chains of `2^[n]`.
    Chains,
    /// All images of the cyclic intervals (with `∅` and `[n]`) under permutations.
    Cycle,
    /// One Boolean sublattice per unordered basis of `F_q^n`.
    BooleanSublattices,
    /// Supplied by the caller.
    Custom,
}

impl fmt::Display for CoveringMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoveringMethod::Chains => "chains",
            CoveringMethod::Cycle => "cycle",
            CoveringMethod::BooleanSublattices => "boolean_sublattices",
            CoveringMethod::Custom => "custom",
        })
    }
}

impl std::str::FromStr for CoveringMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chains" => Ok(CoveringMethod::Chains),
            "cycle" => Ok(CoveringMethod::Cycle),
            "boolean_sublattices" | "sublattices" => Ok(CoveringMethod::BooleanSublattices),
            other => Err(format!("unknown covering method `{other}`")),
        }
    }
}

/// A multiset of subfamilies with the claimed per-level multiplicities.
#[derive(Debug, Clone)]
pub struct CoveringSpec<'g> {
    ground: &'g Ground,
    /// Distinct members with their repetition counts.
    members: Vec<(Family<'g>, BigUint)>,
    t: Vec<BigUint>,
    method: CoveringMethod,
}

impl<'g> CoveringSpec<'g> {
    pub fn custom(
        ground: &'g Ground,
        members: Vec<(Family<'g>, BigUint)>,
        t: Vec<BigUint>,
    ) -> Result<Self, CoveringError> {
        if t.len() != ground.n() + 1 {
            return Err(CoveringError::MultiplicityLength { expected: ground.n() + 1, got: t.len() });
        }
        Ok(CoveringSpec { ground, members, t, method: CoveringMethod::Custom })
    }

    pub fn ground(&self) -> &'g Ground {
        self.ground
    }

    pub fn method(&self) -> CoveringMethod {
        self.method
    }

    pub fn t(&self) -> &[BigUint] {
        &self.t
    }

    /// Distinct members with multiplicities.
    pub fn members(&self) -> &[(Family<'g>, BigUint)] {
        &self.members
    }

    /// `|Γ|`, counted with multiplicity.
    pub fn size(&self) -> BigUint {
        self.members.iter().map(|(_, m)| m).sum()
    }

    /// Removes one copy of the `i`-th distinct member.
    pub fn without_one(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.members[i].1 -= 1u32;
        if out.members[i].1.is_zero() {
            out.members.remove(i);
        }
        out
    }

    /// `w / t` per level; zero where both vanish.
    pub fn normalized_weights(&self, w: &WeightVec) -> Result<WeightVec, CoveringError> {
        if w.len() != self.t.len() {
            return Err(SearchError::WeightLength { expected: self.t.len(), got: w.len() }.into());
        }
        let ws = w
            .as_slice()
            .iter()
            .zip(&self.t)
            .enumerate()
            .map(|(i, (w, t))| {
                if t.is_zero() {
                    if w.is_zero() {
                        Ok(BigRational::zero())
                    } else {
                        Err(CoveringError::ZeroMultiplicity(i))
                    }
                } else {
                    Ok(w / BigRational::from_integer(BigInt::from(t.clone())))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WeightVec::new(ws)?)
    }
}

fn require_boolean(g: &Ground) -> Result<usize, CoveringError> {
    match g.kind() {
        GroundKind::Boolean { n } if n <= MAX_PERMUTATION_N => Ok(n),
        GroundKind::Boolean { n } => Err(LatticeError::TooLarge(format!("{n}! permutations")).into()),
        _ => Err(LatticeError::WrongGroundKind { expected: "boolean" }.into()),
    }
}

fn set_id(g: &Ground, bits: impl IntoIterator<Item = usize>) -> ElementId {
    let mask = bits.into_iter().fold(0u32, |m, b| m | 1 << b);
    g.find(&crate::lattice::Descriptor::Set(mask)).expect("every subset is an element")
}

/// Multiset of families keyed by sorted member indices.
fn collect_multiset<'g>(g: &'g Ground, fams: impl Iterator<Item = Vec<usize>>) -> Vec<(Family<'g>, BigUint)> {
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for mut f in fams {
        f.sort_unstable();
        *counts.entry(f).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(ids, m)| (Family::from_ids(g, ids.into_iter().map(ElementId)), BigUint::from(m)))
        .collect()
}

/// The multiplicity of level `i` under the sublattice covering of `F_q^n`.
pub fn sublattice_multiplicity(n: usize, i: usize, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let pow = |e: usize| num_traits::pow(q.clone(), e);
    let mut num = BigUint::one();
    for j in 0..i {
        num *= pow(i) - pow(j);
    }
    for j in i..n {
        num *= pow(n) - pow(j);
    }
    num / (factorial(i as u64) * factorial((n - i) as u64))
}

pub fn build_covering(g: &Ground, method: CoveringMethod) -> Result<CoveringSpec<'_>, CoveringError> {
    match method {
        CoveringMethod::Chains => {
            let n = require_boolean(g)?;
            let fams = (0..n).permutations(n).map(|perm| (0..=n).map(|len| set_id(g, perm[..len].iter().copied()).0).collect());
            let t = (0..=n).map(|i| factorial(i as u64) * factorial((n - i) as u64)).collect();
            Ok(CoveringSpec { ground: g, members: collect_multiset(g, fams), t, method })
        }
        CoveringMethod::Cycle => {
            let n = require_boolean(g)?;
            // Cyclic intervals of 0..n in their natural cyclic order, plus ∅ and [n].
            let mut base: BTreeSet<Vec<usize>> = BTreeSet::new();
            base.insert(Vec::new());
            base.insert((0..n).collect());
            for len in 1..n {
                for start in 0..n {
                    base.insert((0..len).map(|j| (start + j) % n).collect());
                }
            }
            let fams = (0..n)
                .permutations(n)
                .map(|perm| base.iter().map(|iv| set_id(g, iv.iter().map(|&x| perm[x])).0).collect::<Vec<_>>());
            let t = (0..=n)
                .map(|i| {
                    let gi = if i == 0 || i == n { 1u64 } else { n as u64 };
                    BigUint::from(gi) * factorial(i as u64) * factorial((n - i) as u64)
                })
                .collect();
            Ok(CoveringSpec { ground: g, members: collect_multiset(g, fams), t, method })
        }
        CoveringMethod::BooleanSublattices => {
            let (n, q) = match g.kind() {
                GroundKind::Subspace { n, q } => (n, q as u64),
                _ => return Err(LatticeError::WrongGroundKind { expected: "subspace" }.into()),
            };
            let count = basis_count(n, q);
            if count > BigUint::from(MAX_SUBLATTICE_BASES) {
                return Err(LatticeError::TooLarge(format!("{count} bases of F_{q}^{n}")).into());
            }
            let field = g.field().expect("subspace ground has a field");
            let mut fams = Vec::new();
            for basis in bases(n, q)? {
                let raw: Vec<Vec<u8>> = basis.iter().map(|v| v.iter().map(|e| e.0).collect()).collect();
                let sub = sublattice_from_raw(g, field, &raw)?;
                fams.push(sub.family.members().ones().collect::<Vec<_>>());
            }
            let t = (0..=n).map(|i| sublattice_multiplicity(n, i, q)).collect();
            Ok(CoveringSpec { ground: g, members: collect_multiset(g, fams.into_iter()), t, method })
        }
        CoveringMethod::Custom => Ok(CoveringSpec {
            ground: g,
            members: vec![(Family::full(g), BigUint::one())],
            t: vec![BigUint::one(); g.n() + 1],
            method,
        }),
    }
}

/// An element whose observed multiplicity differs from `t` at its level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub element: ElementId,
    pub observed: BigUint,
    pub expected: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverCheck {
    pub ok: bool,
    /// The first violating element in ground order.
    pub violation: Option<Violation>,
}

/// Per-element membership counts over `Γ`, with multiplicity.
pub fn membership_counts(c: &CoveringSpec<'_>) -> Vec<BigUint> {
    let mut counts = vec![BigUint::zero(); c.ground.len()];
    for (f, m) in &c.members {
        for x in f.members().ones() {
            counts[x] += m;
        }
    }
    counts
}

pub fn verify_covering(c: &CoveringSpec<'_>) -> CoverCheck {
    let counts = membership_counts(c);
    let violation = c.ground.ids().find_map(|e| {
        let expected = &c.t[c.ground.level(e)];
        (counts[e.0] != *expected)
            .then(|| Violation { element: e, observed: counts[e.0].clone(), expected: expected.clone() })
    });
    CoverCheck { ok: violation.is_none(), violation }
}

/// Range of covering counts over the concrete chains of one level tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleStat {
    pub chains: u64,
    pub min: BigUint,
    pub max: BigUint,
}

impl TupleStat {
    pub fn is_uniform(&self) -> bool {
        self.min == self.max
    }
}

/// For each strictly increasing level tuple, how many members of `Γ`
/// contain a chain with exactly those levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainTupleCover {
    pub l: usize,
    pub table: BTreeMap<Vec<usize>, TupleStat>,
}

impl ChainTupleCover {
    pub fn uniform(&self) -> bool {
        self.table.values().all(TupleStat::is_uniform)
    }

    /// Statistic for one tuple; rejects tuples that are not strictly
    /// increasing or do not have length `l`.
    pub fn get(&self, tuple: &[usize]) -> Result<&TupleStat, CoveringError> {
        if tuple.len() != self.l || tuple.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoveringError::InvalidTuple(tuple.to_vec()));
        }
        self.table.get(tuple).ok_or_else(|| CoveringError::InvalidTuple(tuple.to_vec()))
    }
}

/// Number of chains with one element on each level of `tuple`.
pub(crate) fn chains_on(g: &Ground, tuple: &[usize]) -> BigUint {
    // Chains through levels i_1 < ... < i_l: pick the bottom, then each
    // step up; every element at level a sits below the same number of
    // level-b elements, so the count factorizes.
    let Some(&first) = tuple.first() else {
        return BigUint::one();
    };
    let mut total = g.level_sizes()[first].clone();
    for w in tuple.windows(2) {
        let lo = ElementId(g.level_range(w[0]).start);
        let above = g.up(lo).ones().filter(|&y| g.level(ElementId(y)) == w[1]).count();
        total *= above;
    }
    total
}

pub fn chain_tuple_cover(c: &CoveringSpec<'_>, l: usize) -> Result<ChainTupleCover, CoveringError> {
    let g = c.ground;
    if l == 0 || l > MAX_TUPLE_LENGTH || l > g.n() + 1 {
        return Err(LatticeError::OutOfRange(format!("chain length {l}")).into());
    }
    let total: BigUint = (0..=g.n()).combinations(l).map(|t| chains_on(g, &t)).sum();
    if total > BigUint::from(MAX_TUPLE_CHAINS) {
        return Err(LatticeError::TooLarge(format!("{total} chains of length {l}")).into());
    }
    // containing[x] = indices of distinct members containing x
    let mut containing = vec![FixedBitSet::with_capacity(c.members.len()); g.len()];
    for (i, (f, _)) in c.members.iter().enumerate() {
        for x in f.members().ones() {
            containing[x].insert(i);
        }
    }
    let mut table: BTreeMap<Vec<usize>, TupleStat> = BTreeMap::new();
    let chain = PosetSpec::chain(l).expect("l is small");
    let mut all = FixedBitSet::with_capacity(g.len());
    all.insert_range(..);
    for_each_copy(g, &all, &chain, None, &mut |img| {
        let mut common = containing[img[0]].clone();
        for &x in &img[1..] {
            common.intersect_with(&containing[x]);
        }
        let count: BigUint = common.ones().map(|i| &c.members[i].1).sum();
        let levels: Vec<usize> = img.iter().map(|&x| g.level(ElementId(x))).collect();
        table
            .entry(levels)
            .and_modify(|s| {
                s.chains += 1;
                if count < s.min {
                    s.min = count.clone();
                }
                if count > s.max {
                    s.max = count.clone();
                }
            })
            .or_insert(TupleStat { chains: 1, min: count.clone(), max: count });
    });
    Ok(ChainTupleCover { l, table })
}

/// The covering bound `|Γ| x` together with the normalized weights `w/t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaBound {
    pub bound: BigRational,
    pub normalized: WeightVec,
}

pub fn lemma_bound(c: &CoveringSpec<'_>, w: &WeightVec, inner_max: &BigRational) -> Result<LemmaBound, CoveringError> {
    let normalized = c.normalized_weights(w)?;
    let size = BigRational::from_integer(BigInt::from(c.size()));
    Ok(LemmaBound { bound: size * inner_max, normalized })
}

/// The inner maximum `x`: the best `w/t` weight of a property-`t`
/// subfamily of the first member of `Γ`.
pub fn inner_maximum<'g>(
    c: &CoveringSpec<'g>,
    t: &PropertySpec,
    w: &WeightVec,
    opts: &SearchOptions,
) -> Result<SearchResult<'g>, CoveringError> {
    let normalized = c.normalized_weights(w)?;
    let domain = c.members.first().map(|(f, _)| f.clone()).unwrap_or_else(|| Family::empty(c.ground));
    Ok(max_weight_within(&domain, t, &normalized, opts)?)
}

/// Per level `i`, the pair `(t_i |F ∩ S_i|, Σ_G |G ∩ F ∩ S_i|)`; the two
/// agree for every `F` exactly when `Γ` is a valid covering.
pub fn level_incidences(c: &CoveringSpec<'_>, f: &Family<'_>) -> Vec<(BigUint, BigUint)> {
    let g = c.ground;
    let mut rhs = vec![BigUint::zero(); g.n() + 1];
    for (member, m) in &c.members {
        for x in member.members().intersection(f.members()) {
            rhs[g.level(ElementId(x))] += m;
        }
    }
    (0..=g.n()).map(|i| (&c.t[i] * f.count_on_level(i), rhs[i].clone())).collect()
}

/// `Σ_{F ∈ f} 1 / |S_{level(F)}|`.
pub fn lym_sum(g: &Ground, f: &Family<'_>) -> BigRational {
    (0..=g.n())
        .filter(|&i| f.count_on_level(i) > 0)
        .map(|i| BigRational::new(BigInt::from(f.count_on_level(i)), BigInt::from(g.level_sizes()[i].clone())))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_boolean, build_subspace};
    use crate::search::sigma_value;

    fn ints(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn chain_covering_boolean3() {
        let g = build_boolean(3).unwrap();
        let c = build_covering(&g, CoveringMethod::Chains).unwrap();
        assert_eq!(c.size(), BigUint::from(6u32));
        assert_eq!(c.t(), ints(&[6, 2, 2, 6]).as_slice());
        assert!(verify_covering(&c).ok);
    }

    #[test]
    fn cycle_covering_boolean4() {
        let g = build_boolean(4).unwrap();
        let c = build_covering(&g, CoveringMethod::Cycle).unwrap();
        assert_eq!(c.t(), ints(&[24, 24, 16, 24, 24]).as_slice());
        assert_eq!(c.size(), BigUint::from(24u32));
        assert!(verify_covering(&c).ok);
        for n in 0..=5 {
            let g = build_boolean(n).unwrap();
            assert!(verify_covering(&build_covering(&g, CoveringMethod::Cycle).unwrap()).ok, "n={n}");
            assert!(verify_covering(&build_covering(&g, CoveringMethod::Chains).unwrap()).ok, "n={n}");
        }
    }

    #[test]
    fn sublattice_covering_subspace32() {
        let g = build_subspace(3, 2).unwrap();
        let c = build_covering(&g, CoveringMethod::BooleanSublattices).unwrap();
        assert_eq!(c.size(), BigUint::from(28u32));
        assert_eq!(c.t(), ints(&[28, 12, 12, 28]).as_slice());
        assert!(verify_covering(&c).ok);
        // Over GF(2) each sublattice comes from exactly one basis.
        assert!(c.members().iter().all(|(_, m)| m.is_one()));
    }

    #[test]
    fn sublattice_covering_with_repeats() {
        // Over GF(3) the (q-1)^n rescalings of a basis give the same sublattice.
        let g = build_subspace(2, 3).unwrap();
        let c = build_covering(&g, CoveringMethod::BooleanSublattices).unwrap();
        assert_eq!(c.size(), BigUint::from(24u32));
        assert!(c.members().iter().all(|(_, m)| *m == BigUint::from(4u32)));
        assert!(verify_covering(&c).ok);
    }

    #[test]
    fn wrong_kind_and_caps() {
        let b = build_boolean(3).unwrap();
        assert!(matches!(
            build_covering(&b, CoveringMethod::BooleanSublattices),
            Err(CoveringError::Lattice(LatticeError::WrongGroundKind { .. }))
        ));
        let s = build_subspace(2, 2).unwrap();
        assert!(matches!(build_covering(&s, CoveringMethod::Chains), Err(CoveringError::Lattice(LatticeError::WrongGroundKind { .. }))));
        let b7 = build_boolean(7).unwrap();
        assert!(matches!(build_covering(&b7, CoveringMethod::Cycle), Err(CoveringError::Lattice(LatticeError::TooLarge(_)))));
    }

    #[test]
    fn broken_covering_is_caught() {
        let g = build_boolean(3).unwrap();
        let c = build_covering(&g, CoveringMethod::Chains).unwrap().without_one(0);
        let check = verify_covering(&c);
        assert!(!check.ok);
        let v = check.violation.unwrap();
        assert_eq!(v.element, ElementId(0));
        assert_eq!(v.observed, BigUint::from(5u32));
        assert_eq!(v.expected, BigUint::from(6u32));

        let whole = CoveringSpec::custom(&g, vec![(Family::full(&g), BigUint::one())], ints(&[1, 1, 1, 1])).unwrap();
        assert!(verify_covering(&whole).ok);
    }

    #[test]
    fn tuple_cover_subspace32() {
        let g = build_subspace(3, 2).unwrap();
        let c = build_covering(&g, CoveringMethod::BooleanSublattices).unwrap();
        let tc = chain_tuple_cover(&c, 2).unwrap();
        assert!(tc.uniform());
        assert_eq!(tc.get(&[1, 2]).unwrap().min, BigUint::from(8u32));
        assert_eq!(tc.get(&[1, 2]).unwrap().chains, 21);
        assert_eq!(tc.get(&[0, 3]).unwrap().max, BigUint::from(28u32));
        assert!(matches!(tc.get(&[1, 1]), Err(CoveringError::InvalidTuple(_))));
        assert!(matches!(tc.get(&[2, 1]), Err(CoveringError::InvalidTuple(_))));
        for l in 1..=3 {
            assert!(chain_tuple_cover(&c, l).unwrap().uniform(), "l={l}");
        }
        // l = 1 recovers t.
        let t1 = chain_tuple_cover(&c, 1).unwrap();
        for i in 0..=3 {
            assert_eq!(t1.get(&[i]).unwrap().min, c.t()[i]);
        }
    }

    #[test]
    fn lemma_bound_examples() {
        let g = build_subspace(3, 2).unwrap();
        let c = build_covering(&g, CoveringMethod::BooleanSublattices).unwrap();
        let w = WeightVec::new(c.t().iter().map(|t| BigRational::from_integer(BigInt::from(t.clone()))).collect()).unwrap();
        let six = BigRational::from_integer(6.into());
        let lb = lemma_bound(&c, &w, &six).unwrap();
        assert_eq!(lb.bound, BigRational::from_integer(168.into()));
        assert!(lb.normalized.as_slice().iter().all(|x| x.is_one()));
        let middle = Family::levels(&g, &[1, 2]);
        assert_eq!(w.weight_of(&middle), lb.bound);
        assert_eq!(lb.bound / BigRational::from_integer(12.into()), BigRational::from_integer(sigma_value(3, 2, Some(2), false).unwrap().into()));

        // The inner maximum is found by search on one sublattice.
        let x = inner_maximum(&c, &PropertySpec::forbid([PosetSpec::butterfly()]), &w, &SearchOptions::default()).unwrap();
        assert_eq!(x.value, six);

        let b4 = build_boolean(4).unwrap();
        let chains = build_covering(&b4, CoveringMethod::Chains).unwrap();
        let w = WeightVec::new(chains.t().iter().map(|t| BigRational::from_integer(BigInt::from(t.clone()))).collect()).unwrap();
        let lb = lemma_bound(&chains, &w, &BigRational::one()).unwrap();
        assert_eq!(lb.bound, BigRational::from_integer(24.into()));
        assert!(lemma_bound(&chains, &w, &BigRational::zero()).unwrap().bound.is_zero());

        let zero_t = CoveringSpec::custom(&b4, Vec::new(), ints(&[0, 1, 1, 1, 1])).unwrap();
        assert_eq!(lemma_bound(&zero_t, &WeightVec::unit(4), &BigRational::one()), Err(CoveringError::ZeroMultiplicity(0)));
    }

    #[test]
    fn lym_examples() {
        let g = build_boolean(4).unwrap();
        assert!(lym_sum(&g, &Family::levels(&g, &[2])).is_one());
        assert!(lym_sum(&g, &Family::empty(&g)).is_zero());
        let s = build_subspace(3, 2).unwrap();
        assert_eq!(lym_sum(&s, &Family::levels(&s, &[1, 2])), BigRational::from_integer(2.into()));
    }

    #[test]
    fn counting_identity_on_coverings() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let b4 = build_boolean(4).unwrap();
        let s32 = build_subspace(3, 2).unwrap();
        let coverings = [
            build_covering(&b4, CoveringMethod::Chains).unwrap(),
            build_covering(&b4, CoveringMethod::Cycle).unwrap(),
            build_covering(&s32, CoveringMethod::BooleanSublattices).unwrap(),
        ];
        for c in &coverings {
            for _ in 0..100 {
                let g = c.ground();
                let f = Family::from_ids(g, g.ids().filter(|_| rng.random_bool(0.5)));
                for (lhs, rhs) in level_incidences(c, &f) {
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

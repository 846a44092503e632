//! Profile vectors, l-chain profiles, direction scans of profile polytopes
//! and canonical partitions of k-Sperner families.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::covering::chains_on;
use crate::lattice::{ElementId, Family, Ground, LatticeError};
use crate::poset::{contains_copy, for_each_copy, PosetSpec};
use crate::search::{maximize, CopyWeights, Objective, PropertySpec, SearchError, SearchOptions, WeightVec};

pub const MAX_CHAIN_LENGTH: usize = 4;
pub const MAX_PROFILE_CHAINS: u64 = 10_000_000;
/// Random direction entries are drawn from `0..=RANDOM_WEIGHT_MAX`.
pub const RANDOM_WEIGHT_MAX: u64 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("family contains a chain of {} members", .0.len())]
    NotKSperner(Vec<ElementId>),
    #[error("{0}")]
    OutOfRange(String),
}

/// Members per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileVector(pub Vec<BigUint>);

impl ProfileVector {
    pub fn total(&self) -> BigUint {
        self.0.iter().sum()
    }
}

pub fn profile_vec(g: &Ground, f: &Family<'_>) -> ProfileVector {
    ProfileVector((0..=g.n()).map(|i| BigUint::from(f.count_on_level(i))).collect())
}

/// Number of `l`-chains with one member on each level of each strictly
/// increasing level tuple; every tuple is present, possibly with count 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LChainProfile {
    pub l: usize,
    pub counts: BTreeMap<Vec<usize>, BigUint>,
}

impl LChainProfile {
    /// Counts in coordinate order (lexicographic tuples).
    pub fn as_vec(&self) -> Vec<BigUint> {
        self.counts.values().cloned().collect()
    }

    pub fn dot(&self, direction: &[BigUint]) -> BigUint {
        self.counts.values().zip(direction).map(|(a, b)| a * b).sum()
    }
}

/// The level tuples indexing `l`-chain profiles, in lexicographic order.
pub fn level_tuples(n: usize, l: usize) -> Vec<Vec<usize>> {
    (0..=n).combinations(l).collect()
}

fn check_l(g: &Ground, l: usize) -> Result<(), ProfileError> {
    if l == 0 || l > MAX_CHAIN_LENGTH || l > g.n() + 1 {
        return Err(ProfileError::OutOfRange(format!("chain length {l} must be in 1..={}", MAX_CHAIN_LENGTH.min(g.n() + 1))));
    }
    Ok(())
}

pub fn lchain_profile(g: &Ground, f: &Family<'_>, l: usize) -> Result<LChainProfile, ProfileError> {
    check_l(g, l)?;
    let total: BigUint = level_tuples(g.n(), l).iter().map(|t| chains_on(g, t)).sum();
    if total > BigUint::from(MAX_PROFILE_CHAINS) {
        return Err(LatticeError::TooLarge(format!("{total} chains of length {l}")).into());
    }
    Ok(lchain_profile_unchecked(g, f, l))
}

fn lchain_profile_unchecked(g: &Ground, f: &Family<'_>, l: usize) -> LChainProfile {
    let mut counts: BTreeMap<Vec<usize>, BigUint> =
        level_tuples(g.n(), l).into_iter().map(|t| (t, BigUint::zero())).collect();
    let chain = PosetSpec::chain(l).expect("l is small");
    for_each_copy(g, f.members(), &chain, None, &mut |img| {
        let levels: Vec<usize> = img.iter().map(|&x| g.level(ElementId(x))).collect();
        *counts.get_mut(&levels).expect("chain levels increase") += 1u32;
    });
    LChainProfile { l, counts }
}

/// One scanned direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionReport {
    pub index: usize,
    pub direction: Vec<BigUint>,
    pub value: BigRational,
    /// `l`-chain profile of the search witness.
    pub profile: Vec<BigUint>,
    /// Whether a property-satisfying union of at most `k` full levels
    /// attains the optimum.
    pub is_union_of_levels: bool,
    /// Such a union (the witness itself when it qualifies).
    pub witness_levels: Option<Vec<usize>>,
    pub proven_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub l: usize,
    pub coordinates: Vec<Vec<usize>>,
    /// The `k` of the property's chain bound, if it forbids a chain.
    pub k: Option<usize>,
    pub directions: Vec<DirectionReport>,
}

impl ScanReport {
    /// True when every tested direction is maximized by a union of levels.
    pub fn all_unions_of_levels(&self) -> bool {
        self.directions.iter().all(|d| d.is_union_of_levels)
    }
}

/// The scanned directions: zero, each coordinate indicator, all-ones, then
/// seeded random integer vectors until `count` directions are listed.
pub fn scan_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<BigUint>> {
    let mut dirs = vec![vec![BigUint::zero(); dim]];
    for i in 0..dim {
        dirs.push((0..dim).map(|j| BigUint::from(u8::from(i == j))).collect());
    }
    dirs.push(vec![BigUint::from(1u32); dim]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < count {
        dirs.push((0..dim).map(|_| BigUint::from(rng.random_range(0..=RANDOM_WEIGHT_MAX))).collect());
    }
    dirs
}

struct LevelUnion {
    levels: Vec<usize>,
    profile: LChainProfile,
}

pub fn extreme_point_scan(
    g: &Ground,
    t: &PropertySpec,
    l: usize,
    directions: usize,
    seed: u64,
    opts: &SearchOptions,
) -> Result<ScanReport, ProfileError> {
    check_l(g, l)?;
    if directions == 0 {
        return Err(ProfileError::OutOfRange("at least one direction is required".into()));
    }
    let coordinates = level_tuples(g.n(), l);
    let dirs = scan_directions(coordinates.len(), directions, seed);
    let k = t.chain_bound();
    let max_levels = k.unwrap_or(g.n() + 1);

    // Property-satisfying unions of at most k levels, by size then lexicographically.
    let unions: Vec<LevelUnion> = (0..=max_levels.min(g.n() + 1))
        .flat_map(|s| (0..=g.n()).combinations(s))
        .filter_map(|levels| {
            let f = Family::levels(g, &levels);
            t.admits(&f).then(|| LevelUnion { profile: lchain_profile_unchecked(g, &f, l), levels })
        })
        .collect();

    let pattern = PosetSpec::chain(l).expect("l is small");
    let run = |(index, direction): (usize, &Vec<BigUint>)| -> Result<DirectionReport, ProfileError> {
        let objective = if l == 1 {
            Objective::Linear(WeightVec::new(direction.iter().map(|w| BigRational::from_integer(BigInt::from(w.clone()))).collect())?)
        } else {
            let map = coordinates
                .iter()
                .zip(direction)
                .filter(|(_, w)| !w.is_zero())
                .map(|(c, w)| (c.clone(), BigRational::from_integer(BigInt::from(w.clone()))))
                .collect();
            Objective::Copies { pattern: pattern.clone(), weights: CopyWeights::ByLevels(map) }
        };
        let r = maximize(&Family::full(g), t, &objective, opts)?;
        let profile = lchain_profile_unchecked(g, &r.witness, l);
        let value = BigRational::from_integer(BigInt::from(profile.dot(direction)));
        debug_assert_eq!(value, r.value);
        let own = r.witness.as_union_of_levels().filter(|ls| ls.len() <= max_levels);
        let witness_levels = own.or_else(|| {
            unions
                .iter()
                .find(|u| BigRational::from_integer(BigInt::from(u.profile.dot(direction))) == r.value)
                .map(|u| u.levels.clone())
        });
        Ok(DirectionReport {
            index,
            direction: direction.clone(),
            value: r.value,
            profile: profile.as_vec(),
            is_union_of_levels: witness_levels.is_some(),
            witness_levels,
            proven_optimal: r.proven_optimal,
        })
    };
    let reports = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool construction")
            .install(|| dirs.par_iter().enumerate().map(run).collect::<Result<Vec<_>, _>>()),
        None => dirs.par_iter().enumerate().map(run).collect::<Result<Vec<_>, _>>(),
    }?;
    Ok(ScanReport { l, coordinates, k, directions: reports })
}

/// Splits a `k`-Sperner family into `k` antichains by repeatedly removing
/// the minimal members. Trailing parts may be empty.
pub fn canonical_partition<'g>(f: &Family<'g>, k: usize) -> Result<Vec<Family<'g>>, ProfileError> {
    let g = f.ground();
    if let Some(chain) = PosetSpec::chain(k + 1).ok().and_then(|c| contains_copy(f, &c)) {
        return Err(ProfileError::NotKSperner(chain));
    }
    if k + 1 > crate::poset::MAX_PATTERN_SIZE {
        // Long chains cannot be tested directly; the height check below covers it.
        let height = longest_chain(f);
        if height > k {
            return Err(ProfileError::OutOfRange(format!("family has a chain of {height} members, more than k={k}")));
        }
    }
    let mut rest = f.clone();
    let mut parts = Vec::with_capacity(k);
    for _ in 0..k {
        let minimal: Vec<ElementId> =
            rest.iter().filter(|&x| !rest.iter().any(|y| g.lt(y, x))).collect();
        let part = Family::from_ids(g, minimal.iter().copied());
        for x in minimal {
            rest.remove(x);
        }
        parts.push(part);
    }
    debug_assert!(rest.is_empty());
    Ok(parts)
}

fn longest_chain(f: &Family<'_>) -> usize {
    let g = f.ground();
    let ids = f.ids();
    // ids are in level order, so a single forward pass suffices
    let mut best = vec![1usize; ids.len()];
    for i in 0..ids.len() {
        for j in 0..i {
            if g.lt(ids[j], ids[i]) {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

//! The two graded grounds: the Boolean lattice `2^[n]` and the lattice of
//! subspaces of `F_q^n`.
//!
//! Every element carries its set of atoms (singletons, or 1-dimensional
//! subspaces). Both lattices are atomistic, so `a <= b` iff the atoms of `a`
//! are a subset of the atoms of `b`, and the rank of `a ∧ b` is read off the
//! number of shared atoms. Elements are ordered by level, then by canonical
//! descriptor, so each level occupies a contiguous index range.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ffield::{rref_in_place, FieldElem, FieldError, FieldSpec};

pub const MAX_BOOLEAN_N: usize = 16;
pub const MAX_SUBSPACE_ELEMENTS: u64 = 200_000;
/// Grounds up to this many elements keep the strict order as two dense bit
/// matrices; larger ones answer up/down-set queries from the atom sets.
pub const DENSE_RELATION_CAP: usize = 1 << 14;
/// Cap on materialized bases.
pub const MAX_MATERIALIZED_BASES: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("vectors are not a basis of F_q^{0}")]
    NotABasis(usize),
    #[error("operation needs a {expected} ground")]
    WrongGroundKind { expected: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub usize);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroundKind {
    Boolean { n: usize },
    Subspace { n: usize, q: u8 },
}

/// Canonical identity of a ground element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Descriptor {
    /// Bit `i` set means `i + 1` is in the set.
    Set(u32),
    /// Rows of the reduced row echelon basis.
    Span(Vec<Vec<u8>>),
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Set(mask) => {
                let items: Vec<String> =
                    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            Descriptor::Span(rows) => {
                let rows: Vec<String> = rows
                    .iter()
                    .map(|r| r.iter().map(|&d| char::from_digit(d as u32, 16).unwrap()).collect())
                    .collect();
                write!(f, "<{}>", rows.join(","))
            }
        }
    }
}

/// Result of comparing two ground elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relation {
    /// `a < b` strictly.
    pub leq: bool,
    /// `a > b` strictly.
    pub geq: bool,
    /// `|a ∩ b|` or `dim(a ∩ b)`.
    pub meet_rank: usize,
}

/// A graded inclusion structure with its strict order precomputed.
pub struct Ground {
    kind: GroundKind,
    field: Option<FieldSpec>,
    elements: Vec<Descriptor>,
    level_of: Vec<usize>,
    level_start: Vec<usize>,
    level_sizes: Vec<BigUint>,
    atoms: Vec<FixedBitSet>,
    index: HashMap<Descriptor, usize>,
    up: Option<Vec<FixedBitSet>>,
    down: Option<Vec<FixedBitSet>>,
}

impl fmt::Debug for Ground {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ground")
            .field("kind", &self.kind)
            .field("elements", &self.elements.len())
            .field("level_sizes", &self.level_sizes)
            .finish()
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// The Gaussian binomial: the number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian(n: usize, k: usize, q: u64) -> Result<BigUint, LatticeError> {
    if k > n {
        return Err(LatticeError::OutOfRange(format!("k={k} exceeds n={n}")));
    }
    if q < 2 {
        return Err(LatticeError::OutOfRange(format!("q={q} must be at least 2")));
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    Ok(quot)
}

/// Number of unordered bases of `F_q^n`: `prod_{i<n} (q^n - q^i) / n!`.
pub fn basis_count(n: usize, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let qn = q.pow(n as u32);
    let ordered = (0..n).fold(BigUint::one(), |acc, i| acc * (&qn - q.pow(i as u32)));
    ordered / factorial(n as u64)
}

/// Builds `2^[n]`.
pub fn build_boolean(n: usize) -> Result<Ground, LatticeError> {
    if n > MAX_BOOLEAN_N {
        return Err(LatticeError::TooLarge(format!(
            "boolean ground with n={n} exceeds n<={MAX_BOOLEAN_N}"
        )));
    }
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    // Lexicographic order on the sorted member lists, within a level.
    masks.sort_by_key(|&m| {
        let members: Vec<u32> = (0..n as u32).filter(|i| m >> i & 1 == 1).collect();
        (m.count_ones(), members)
    });
    let mut pos = vec![0usize; 1 << n];
    for (i, &m) in masks.iter().enumerate() {
        pos[m as usize] = i;
    }
    let total = masks.len();
    let elements: Vec<Descriptor> = masks.iter().map(|&m| Descriptor::Set(m)).collect();
    let level_of: Vec<usize> = masks.iter().map(|m| m.count_ones() as usize).collect();
    let atoms = masks
        .iter()
        .map(|&m| {
            let mut b = FixedBitSet::with_capacity(n);
            (0..n).filter(|i| m >> i & 1 == 1).for_each(|i| b.insert(i));
            b
        })
        .collect();
    let level_sizes = (0..=n).map(|i| binomial(n as u64, i as u64)).collect();

    let (up, down) = if total <= DENSE_RELATION_CAP {
        let mut up = vec![FixedBitSet::with_capacity(total); total];
        let mut down = vec![FixedBitSet::with_capacity(total); total];
        let full = (1u32 << n) - 1;
        for &a in &masks {
            let comp = full & !a;
            // Nonzero submasks of the complement give the strict supersets.
            let mut s = comp;
            while s != 0 {
                let b = a | s;
                up[pos[a as usize]].insert(pos[b as usize]);
                down[pos[b as usize]].insert(pos[a as usize]);
                s = (s - 1) & comp;
            }
        }
        (Some(up), Some(down))
    } else {
        (None, None)
    };
    Ok(Ground::assemble(GroundKind::Boolean { n }, None, elements, level_of, level_sizes, atoms, up, down))
}

/// Encodes a vector as an integer, first coordinate most significant.
pub(crate) fn vector_code(v: &[u8], q: u8) -> u64 {
    v.iter().fold(0u64, |acc, &d| acc * q as u64 + d as u64)
}

pub(crate) fn vector_decode(mut code: u64, n: usize, q: u8) -> Vec<u8> {
    let mut v = vec![0u8; n];
    for slot in v.iter_mut().rev() {
        *slot = (code % q as u64) as u8;
        code /= q as u64;
    }
    v
}

/// All reduced row echelon matrices of rank `k` in `n` columns.
fn rref_matrices(f: &FieldSpec, n: usize, k: usize) -> Vec<Vec<Vec<u8>>> {
    let q = f.order();
    let mut out = Vec::new();
    for pivots in itertools::Itertools::combinations(0..n, k) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| {
                let pivots = &pivots;
                (pc + 1..n).filter(move |c| !pivots.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let count = (q as u64).pow(free.len() as u32);
        for fill in 0..count {
            let mut rows = vec![vec![0u8; n]; k];
            for (r, &pc) in pivots.iter().enumerate() {
                rows[r][pc] = 1;
            }
            let mut rest = fill;
            for &(r, c) in free.iter().rev() {
                rows[r][c] = (rest % q as u64) as u8;
                rest /= q as u64;
            }
            out.push(rows);
        }
    }
    out.sort();
    out
}

/// Builds the lattice of subspaces of `F_q^n`.
pub fn build_subspace(n: usize, q: u64) -> Result<Ground, LatticeError> {
    let field = FieldSpec::new(q)?;
    let total: BigUint = (0..=n).map(|k| gaussian(n, k, q).unwrap()).sum();
    if total > BigUint::from(MAX_SUBSPACE_ELEMENTS) {
        return Err(LatticeError::TooLarge(format!(
            "subspace ground (n={n}, q={q}) has {total} elements, cap is {MAX_SUBSPACE_ELEMENTS}"
        )));
    }
    let qb = field.order();
    let mut elements = Vec::new();
    let mut level_of = Vec::new();
    for k in 0..=n {
        for rows in rref_matrices(&field, n, k) {
            elements.push(Descriptor::Span(rows));
            level_of.push(k);
        }
    }
    let total = elements.len();

    // Atoms are the 1-dimensional subspaces, keyed by their normalized vector.
    let atom_index: HashMap<u64, usize> = elements
        .iter()
        .zip(&level_of)
        .filter(|(_, &l)| l == 1)
        .enumerate()
        .map(|(i, (d, _))| match d {
            Descriptor::Span(rows) => (vector_code(&rows[0], qb), i),
            Descriptor::Set(_) => unreachable!(),
        })
        .collect();
    let atom_count = atom_index.len();
    let atoms: Vec<FixedBitSet> = elements
        .iter()
        .map(|d| {
            let Descriptor::Span(rows) = d else { unreachable!() };
            let mut set = FixedBitSet::with_capacity(atom_count);
            let k = rows.len();
            // Combinations whose first nonzero coefficient is 1 yield each
            // normalized vector of the span exactly once.
            let combos = (qb as u64).pow(k as u32);
            for c in 1..combos {
                let coeffs = vector_decode(c, k, qb);
                if coeffs.iter().find(|&&x| x != 0) != Some(&1) {
                    continue;
                }
                let mut v = vec![0u8; n];
                for (coef, row) in coeffs.iter().zip(rows) {
                    if *coef == 0 {
                        continue;
                    }
                    for (slot, &x) in v.iter_mut().zip(row) {
                        *slot = field.add_raw(*slot, field.mul_raw(*coef, x));
                    }
                }
                set.insert(atom_index[&vector_code(&v, qb)]);
            }
            set
        })
        .collect();
    let level_sizes = (0..=n).map(|k| gaussian(n, k, q).unwrap()).collect();

    let (up, down) = if total <= DENSE_RELATION_CAP {
        let mut up = vec![FixedBitSet::with_capacity(total); total];
        let mut down = vec![FixedBitSet::with_capacity(total); total];
        for a in 0..total {
            for b in a + 1..total {
                if level_of[a] < level_of[b] && atoms[a].is_subset(&atoms[b]) {
                    up[a].insert(b);
                    down[b].insert(a);
                }
            }
        }
        (Some(up), Some(down))
    } else {
        (None, None)
    };
    Ok(Ground::assemble(
        GroundKind::Subspace { n, q: qb },
        Some(field),
        elements,
        level_of,
        level_sizes,
        atoms,
        up,
        down,
    ))
}

impl Ground {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: GroundKind,
        field: Option<FieldSpec>,
        elements: Vec<Descriptor>,
        level_of: Vec<usize>,
        level_sizes: Vec<BigUint>,
        atoms: Vec<FixedBitSet>,
        up: Option<Vec<FixedBitSet>>,
        down: Option<Vec<FixedBitSet>>,
    ) -> Ground {
        let n = level_sizes.len() - 1;
        let mut level_start = vec![0usize; n + 2];
        for &l in &level_of {
            level_start[l + 1] += 1;
        }
        for i in 1..level_start.len() {
            level_start[i] += level_start[i - 1];
        }
        let index = elements.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        Ground { kind, field, elements, level_of, level_start, level_sizes, atoms, index, up, down }
    }

    pub fn kind(&self) -> GroundKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        match self.kind {
            GroundKind::Boolean { n } | GroundKind::Subspace { n, .. } => n,
        }
    }

    pub fn q(&self) -> Option<u8> {
        match self.kind {
            GroundKind::Subspace { q, .. } => Some(q),
            GroundKind::Boolean { .. } => None,
        }
    }

    pub fn field(&self) -> Option<&FieldSpec> {
        self.field.as_ref()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> {
        (0..self.len()).map(ElementId)
    }

    pub fn descriptor(&self, e: ElementId) -> &Descriptor {
        &self.elements[e.0]
    }

    pub fn find(&self, d: &Descriptor) -> Option<ElementId> {
        self.index.get(d).copied().map(ElementId)
    }

    /// Looks up the subspace spanned by `vectors`.
    pub fn find_span(&self, vectors: &[Vec<FieldElem>]) -> Option<ElementId> {
        let field = self.field.as_ref()?;
        let n = self.n();
        if vectors.iter().any(|v| v.len() != n) {
            return None;
        }
        let mut rows: Vec<Vec<u8>> = vectors.iter().map(|v| v.iter().map(|e| e.0).collect()).collect();
        rref_in_place(field, &mut rows, n);
        self.find(&Descriptor::Span(rows))
    }

    pub fn level(&self, e: ElementId) -> usize {
        self.level_of[e.0]
    }

    /// Index range of the elements on level `i`.
    pub fn level_range(&self, i: usize) -> Range<usize> {
        self.level_start[i]..self.level_start[i + 1]
    }

    pub fn level_sizes(&self) -> &[BigUint] {
        &self.level_sizes
    }

    pub fn level_size(&self, i: usize) -> usize {
        self.level_start[i + 1] - self.level_start[i]
    }

    pub fn atoms(&self, e: ElementId) -> &FixedBitSet {
        &self.atoms[e.0]
    }

    pub fn has_dense_relation(&self) -> bool {
        self.up.is_some()
    }

    /// Strict order: `a < b`.
    pub fn lt(&self, a: ElementId, b: ElementId) -> bool {
        match &self.up {
            Some(up) => up[a.0].contains(b.0),
            None => self.level_of[a.0] < self.level_of[b.0] && self.atoms[a.0].is_subset(&self.atoms[b.0]),
        }
    }

    pub fn comparable(&self, a: ElementId, b: ElementId) -> bool {
        self.lt(a, b) || self.lt(b, a)
    }

    /// Rank of the meet: `|a ∩ b|` or `dim(a ∩ b)`.
    pub fn meet_rank(&self, a: ElementId, b: ElementId) -> usize {
        let shared = self.atoms[a.0].intersection_count(&self.atoms[b.0]);
        match self.kind {
            GroundKind::Boolean { .. } => shared,
            GroundKind::Subspace { q, .. } => {
                // shared = (q^d - 1) / (q - 1)
                let (mut d, mut count, mut step) = (0, 0usize, 1usize);
                while count < shared {
                    count += step;
                    step *= q as usize;
                    d += 1;
                }
                debug_assert_eq!(count, shared);
                d
            }
        }
    }

    pub fn relations(&self, a: ElementId, b: ElementId) -> Relation {
        Relation { leq: self.lt(a, b), geq: self.lt(b, a), meet_rank: self.meet_rank(a, b) }
    }

    /// Elements strictly above `a`.
    pub fn up(&self, a: ElementId) -> Cow<'_, FixedBitSet> {
        match &self.up {
            Some(up) => Cow::Borrowed(&up[a.0]),
            None => Cow::Owned(self.scan(|b| self.lt(a, ElementId(b)))),
        }
    }

    /// Elements strictly below `a`.
    pub fn down(&self, a: ElementId) -> Cow<'_, FixedBitSet> {
        match &self.down {
            Some(down) => Cow::Borrowed(&down[a.0]),
            None => Cow::Owned(self.scan(|b| self.lt(ElementId(b), a))),
        }
    }

    fn scan(&self, pred: impl Fn(usize) -> bool) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        (0..self.len()).filter(|&b| pred(b)).for_each(|b| out.insert(b));
        out
    }

    /// Number of strictly comparable ordered pairs.
    pub fn comparable_pairs(&self) -> u64 {
        self.ids().map(|a| self.up(a).count_ones(..) as u64).sum()
    }

    pub fn kind_label(&self) -> String {
        match self.kind {
            GroundKind::Boolean { n } => format!("boolean(n={n})"),
            GroundKind::Subspace { n, q } => format!("subspace(n={n}, q={q})"),
        }
    }
}

/// A set of ground elements.
#[derive(Clone)]
pub struct Family<'g> {
    ground: &'g Ground,
    members: FixedBitSet,
}

impl PartialEq for Family<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.ground, other.ground) && self.members == other.members
    }
}

impl Eq for Family<'_> {}

impl fmt::Debug for Family<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| self.ground.descriptor(e).to_string())).finish()
    }
}

impl<'g> Family<'g> {
    pub fn empty(ground: &'g Ground) -> Self {
        Family { ground, members: FixedBitSet::with_capacity(ground.len()) }
    }

    pub fn full(ground: &'g Ground) -> Self {
        let mut members = FixedBitSet::with_capacity(ground.len());
        members.insert_range(..);
        Family { ground, members }
    }

    /// Union of full levels.
    pub fn levels(ground: &'g Ground, levels: &[usize]) -> Self {
        let mut members = FixedBitSet::with_capacity(ground.len());
        for &l in levels {
            if l <= ground.n() {
                members.insert_range(ground.level_range(l));
            }
        }
        Family { ground, members }
    }

    /// Panics on an id outside the ground.
    pub fn from_ids(ground: &'g Ground, ids: impl IntoIterator<Item = ElementId>) -> Self {
        let mut fam = Family::empty(ground);
        for id in ids {
            fam.insert(id);
        }
        fam
    }

    pub fn try_from_indices(ground: &'g Ground, ids: &[usize]) -> Option<Self> {
        ids.iter().all(|&i| i < ground.len()).then(|| Family::from_ids(ground, ids.iter().map(|&i| ElementId(i))))
    }

    pub(crate) fn from_bits(ground: &'g Ground, members: FixedBitSet) -> Self {
        debug_assert_eq!(members.len(), ground.len());
        Family { ground, members }
    }

    pub fn ground(&self) -> &'g Ground {
        self.ground
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn insert(&mut self, e: ElementId) {
        assert!(e.0 < self.ground.len(), "element {e} outside ground");
        self.members.insert(e.0);
    }

    pub fn remove(&mut self, e: ElementId) {
        self.members.set(e.0, false);
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.members.contains(e.0)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.members.ones().map(ElementId)
    }

    pub fn ids(&self) -> Vec<ElementId> {
        self.iter().collect()
    }

    pub fn is_subfamily_of(&self, other: &Family<'_>) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &Family<'g>) -> Family<'g> {
        let mut members = self.members.clone();
        members.union_with(&other.members);
        Family { ground: self.ground, members }
    }

    pub fn intersection(&self, other: &Family<'g>) -> Family<'g> {
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Family { ground: self.ground, members }
    }

    /// Members on level `i`.
    pub fn count_on_level(&self, i: usize) -> usize {
        self.members.count_ones(self.ground.level_range(i))
    }

    /// Levels that are fully contained, if the family is a union of full levels.
    pub fn as_union_of_levels(&self) -> Option<Vec<usize>> {
        let g = self.ground;
        let mut levels = Vec::new();
        for i in 0..=g.n() {
            match self.count_on_level(i) {
                0 => {}
                c if c == g.level_size(i) => levels.push(i),
                _ => return None,
            }
        }
        Some(levels)
    }

    pub fn descriptors(&self) -> Vec<String> {
        self.iter().map(|e| self.ground.descriptor(e).to_string()).collect()
    }
}

/// The image of `2^[n]` under `H -> span{v_x : x in H}` for a basis `v`.
#[derive(Debug, Clone)]
pub struct BooleanSublattice<'g> {
    pub family: Family<'g>,
    /// Image of each subset of `[n]`, indexed by bitmask.
    pub images: Vec<ElementId>,
}

pub fn boolean_sublattice<'g>(
    ground: &'g Ground,
    basis: &[Vec<FieldElem>],
) -> Result<BooleanSublattice<'g>, LatticeError> {
    let field = ground.field().ok_or(LatticeError::WrongGroundKind { expected: "subspace" })?;
    let n = ground.n();
    let raw: Vec<Vec<u8>> = basis.iter().map(|v| v.iter().map(|e| e.0).collect()).collect();
    if raw.len() != n || raw.iter().any(|v| v.len() != n || v.iter().any(|&x| x >= field.order())) {
        return Err(LatticeError::NotABasis(n));
    }
    let mut check = raw.clone();
    if rref_in_place(field, &mut check, n) != n {
        return Err(LatticeError::NotABasis(n));
    }
    sublattice_from_raw(ground, field, &raw)
}

pub(crate) fn sublattice_from_raw<'g>(
    ground: &'g Ground,
    field: &FieldSpec,
    raw: &[Vec<u8>],
) -> Result<BooleanSublattice<'g>, LatticeError> {
    let n = ground.n();
    let mut family = Family::empty(ground);
    let mut images = Vec::with_capacity(1 << n);
    for mask in 0u32..1 << n {
        let mut rows: Vec<Vec<u8>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| raw[i].clone()).collect();
        rref_in_place(field, &mut rows, n);
        let id = ground.find(&Descriptor::Span(rows)).ok_or(LatticeError::NotABasis(n))?;
        family.insert(id);
        images.push(id);
    }
    Ok(BooleanSublattice { family, images })
}

/// Unordered bases of `F_q^n`, each exactly once.
///
/// A basis is emitted as its vectors in increasing code order (first
/// coordinate most significant).
pub struct Bases {
    field: FieldSpec,
    n: usize,
    space: u64,
    chosen: Vec<u64>,
    spans: Vec<FixedBitSet>,
    cursor: Vec<u64>,
    done: bool,
}

pub fn bases(n: usize, q: u64) -> Result<Bases, LatticeError> {
    let field = FieldSpec::new(q)?;
    let count = basis_count(n, q);
    if count > BigUint::from(MAX_MATERIALIZED_BASES) {
        return Err(LatticeError::TooLarge(format!("{count} bases of F_{q}^{n}")));
    }
    let space = q.pow(n as u32);
    let mut zero = FixedBitSet::with_capacity(space as usize);
    zero.insert(0);
    Ok(Bases { field, n, space, chosen: Vec::new(), spans: vec![zero], cursor: vec![1; n + 1], done: false })
}

impl Bases {
    fn extend_span(&self, span: &FixedBitSet, v: u64) -> FixedBitSet {
        let q = self.field.order();
        let vd = vector_decode(v, self.n, q);
        let mut out = span.clone();
        for s in span.ones() {
            let sd = vector_decode(s as u64, self.n, q);
            for c in 1..q {
                let w: Vec<u8> =
                    sd.iter().zip(&vd).map(|(&a, &b)| self.field.add_raw(a, self.field.mul_raw(c, b))).collect();
                out.insert(vector_code(&w, q) as usize);
            }
        }
        out
    }

    fn emit(&self) -> Vec<Vec<FieldElem>> {
        let q = self.field.order();
        self.chosen.iter().map(|&c| vector_decode(c, self.n, q).into_iter().map(FieldElem).collect()).collect()
    }
}

impl Iterator for Bases {
    type Item = Vec<Vec<FieldElem>>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            let depth = self.chosen.len();
            if depth == self.n {
                let out = self.emit();
                if depth == 0 {
                    self.done = true;
                } else {
                    self.chosen.pop();
                    self.spans.pop();
                }
                return Some(out);
            }
            let span = &self.spans[depth];
            let next = (self.cursor[depth]..self.space).find(|&c| !span.contains(c as usize));
            match next {
                Some(c) => {
                    self.cursor[depth] = c + 1;
                    let extended = self.extend_span(&self.spans[depth], c);
                    self.chosen.push(c);
                    self.spans.push(extended);
                    self.cursor[depth + 1] = c + 1;
                }
                None => {
                    if depth == 0 {
                        self.done = true;
                        return None;
                    }
                    self.chosen.pop();
                    self.spans.pop();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::MatrixGF;
    use num_traits::ToPrimitive;

    fn fe(v: &[u8]) -> Vec<FieldElem> {
        v.iter().map(|&x| FieldElem(x)).collect()
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian(4, 2, 2).unwrap(), BigUint::from(35u32));
        assert_eq!(gaussian(3, 1, 2).unwrap(), BigUint::from(7u32));
        for n in 0..6 {
            assert_eq!(gaussian(n, 0, 3).unwrap(), BigUint::one());
        }
        assert!(matches!(gaussian(2, 3, 2), Err(LatticeError::OutOfRange(_))));
        assert!(matches!(gaussian(2, 1, 1), Err(LatticeError::OutOfRange(_))));
    }

    #[test]
    fn boolean_small() {
        let g = build_boolean(3).unwrap();
        assert_eq!(g.len(), 8);
        let sizes: Vec<u32> = g.level_sizes().iter().map(|s| s.to_u32().unwrap()).collect();
        assert_eq!(sizes, vec![1, 3, 3, 1]);

        let g2 = build_boolean(2).unwrap();
        assert_eq!(g2.comparable_pairs(), 5);

        let g0 = build_boolean(0).unwrap();
        assert_eq!(g0.len(), 1);
        assert_eq!(g0.comparable_pairs(), 0);

        assert!(matches!(build_boolean(17), Err(LatticeError::TooLarge(_))));
    }

    #[test]
    fn boolean_relations() {
        let g = build_boolean(3).unwrap();
        let one = g.find(&Descriptor::Set(0b001)).unwrap();
        let one_two = g.find(&Descriptor::Set(0b011)).unwrap();
        let r = g.relations(one, one_two);
        assert!(r.leq && !r.geq);
        assert_eq!(r.meet_rank, 1);
        assert_eq!(g.descriptor(one_two).to_string(), "{1,2}");
    }

    #[test]
    fn boolean_order_is_lexicographic_within_levels() {
        let g = build_boolean(4).unwrap();
        let level2: Vec<String> = g.level_range(2).map(|i| g.descriptor(ElementId(i)).to_string()).collect();
        assert_eq!(level2, ["{1,2}", "{1,3}", "{1,4}", "{2,3}", "{2,4}", "{3,4}"]);
    }

    #[test]
    fn subspace_small() {
        let g = build_subspace(3, 2).unwrap();
        assert_eq!(g.len(), 16);
        let sizes: Vec<u32> = g.level_sizes().iter().map(|s| s.to_u32().unwrap()).collect();
        assert_eq!(sizes, vec![1, 7, 7, 1]);

        let g = build_subspace(2, 3).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!((0..=2).map(|i| g.level_size(i)).collect::<Vec<_>>(), vec![1, 4, 1]);

        let g = build_subspace(2, 2).unwrap();
        for a in g.level_range(1) {
            for b in g.level_range(1) {
                assert!(!g.comparable(ElementId(a), ElementId(b)));
            }
        }
        assert!(matches!(build_subspace(2, 6), Err(LatticeError::Field(FieldError::NotPrimePower(6)))));
        assert!(matches!(build_subspace(9, 2), Err(LatticeError::TooLarge(_))));
    }

    #[test]
    fn subspace_relations() {
        let g = build_subspace(2, 2).unwrap();
        let a = g.find_span(&[fe(&[1, 0])]).unwrap();
        let b = g.find_span(&[fe(&[1, 1])]).unwrap();
        assert_eq!(g.relations(a, b), Relation { leq: false, geq: false, meet_rank: 0 });

        let g = build_subspace(4, 2).unwrap();
        let e12 = g.find_span(&[fe(&[1, 0, 0, 0]), fe(&[0, 1, 0, 0])]).unwrap();
        let e23 = g.find_span(&[fe(&[0, 1, 0, 0]), fe(&[0, 0, 1, 0])]).unwrap();
        assert_eq!(g.meet_rank(e12, e23), 1);
        let whole = ElementId(g.len() - 1);
        assert_eq!(g.meet_rank(e12, whole), 2);
        assert!(g.lt(e12, whole));
    }

    #[test]
    fn level_sizes_match_gaussian() {
        for (n, q) in [(1, 2), (2, 2), (3, 2), (4, 2), (5, 2), (2, 3), (3, 3), (2, 4), (2, 5), (3, 4)] {
            let g = build_subspace(n, q).unwrap();
            for k in 0..=n {
                assert_eq!(BigUint::from(g.level_size(k)), gaussian(n, k, q).unwrap(), "n={n} q={q} k={k}");
            }
        }
    }

    #[test]
    fn containment_agrees_with_rank_criterion() {
        // a <= b iff rank(stack(a, b)) == rank(b)
        for (n, q) in [(3, 2), (2, 3), (3, 3)] {
            let g = build_subspace(n, q).unwrap();
            let f = g.field().unwrap();
            let rows = |e: ElementId| match g.descriptor(e) {
                Descriptor::Span(r) => r.clone(),
                _ => unreachable!(),
            };
            for a in g.ids() {
                for b in g.ids() {
                    let (ra, rb) = (rows(a), rows(b));
                    let stacked: Vec<Vec<u8>> = ra.iter().chain(&rb).cloned().collect();
                    let rank_ab = MatrixGF::from_values(f, n, &stacked).unwrap().rank(f);
                    let contained = rank_ab == rb.len();
                    assert_eq!(g.lt(a, b), contained && a != b);
                    // dim(a ∩ b) = dim a + dim b - dim(a + b)
                    assert_eq!(g.meet_rank(a, b), ra.len() + rb.len() - rank_ab);
                }
            }
        }
    }

    #[test]
    fn order_axioms() {
        let grounds = [build_boolean(4).unwrap(), build_subspace(3, 2).unwrap(), build_subspace(2, 3).unwrap()];
        for g in &grounds {
            for a in g.ids() {
                assert!(!g.lt(a, a));
                for b in g.ids() {
                    if g.lt(a, b) {
                        assert!(!g.lt(b, a));
                        assert!(g.level(a) < g.level(b));
                        for c in g.ids() {
                            if g.lt(b, c) {
                                assert!(g.lt(a, c));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_counts() {
        assert_eq!(basis_count(2, 2), BigUint::from(3u32));
        assert_eq!(basis_count(3, 2), BigUint::from(28u32));
        assert_eq!(basis_count(4, 2), BigUint::from(840u32));
        for (n, q) in [(2, 2), (3, 2), (2, 3), (0, 2), (1, 3)] {
            let all: Vec<_> = bases(n, q).unwrap().collect();
            assert_eq!(BigUint::from(all.len()), basis_count(n, q), "n={n} q={q}");
            let distinct: std::collections::HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            let f = FieldSpec::new(q).unwrap();
            for b in &all {
                assert_eq!(MatrixGF::new(n, b.clone()).unwrap().rank(&f), n);
            }
        }
    }

    #[test]
    fn sublattice_of_standard_basis() {
        let g = build_subspace(3, 2).unwrap();
        let basis = vec![fe(&[1, 0, 0]), fe(&[0, 1, 0]), fe(&[0, 0, 1])];
        let sub = boolean_sublattice(&g, &basis).unwrap();
        assert_eq!(sub.family.len(), 8);
        let img = sub.images[0b101];
        assert_eq!(g.level(img), 2);
        assert_eq!(Some(img), g.find_span(&[fe(&[1, 0, 0]), fe(&[0, 0, 1])]));

        let dependent = vec![fe(&[1, 0, 0]), fe(&[0, 1, 0]), fe(&[1, 1, 0])];
        assert_eq!(boolean_sublattice(&g, &dependent).unwrap_err(), LatticeError::NotABasis(3));

        let b = build_boolean(3).unwrap();
        assert!(matches!(boolean_sublattice(&b, &basis), Err(LatticeError::WrongGroundKind { .. })));
    }

    #[test]
    fn sublattice_order_isomorphic_to_boolean() {
        // Every basis of F_2^3 and a sample of F_2^4.
        for n in [3usize, 4] {
            let g = build_subspace(n, 2).unwrap();
            let b = build_boolean(n).unwrap();
            for basis in bases(n, 2).unwrap().step_by(if n == 3 { 1 } else { 17 }).take(50) {
                let sub = boolean_sublattice(&g, &basis).unwrap();
                for h1 in 0u32..1 << n {
                    for h2 in 0u32..1 << n {
                        let bh1 = b.find(&Descriptor::Set(h1)).unwrap();
                        let bh2 = b.find(&Descriptor::Set(h2)).unwrap();
                        let (s1, s2) = (sub.images[h1 as usize], sub.images[h2 as usize]);
                        assert_eq!(b.lt(bh1, bh2), g.lt(s1, s2));
                        assert_eq!(b.meet_rank(bh1, bh2), g.meet_rank(s1, s2));
                    }
                    assert_eq!(g.level(sub.images[h1 as usize]), h1.count_ones() as usize);
                }
            }
        }
    }

    #[test]
    fn family_level_helpers() {
        let g = build_boolean(3).unwrap();
        let f = Family::levels(&g, &[1, 2]);
        assert_eq!(f.len(), 6);
        assert_eq!(f.as_union_of_levels(), Some(vec![1, 2]));
        let mut f2 = f.clone();
        f2.remove(ElementId(1));
        assert_eq!(f2.as_union_of_levels(), None);
        assert!(f2.is_subfamily_of(&f));
    }
}

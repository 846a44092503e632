//! Exact tools for forbidden subposet problems on the Boolean lattice and
//! on the lattice of subspaces of a finite vector space.

pub mod ffield;
pub mod lattice;
pub mod poset;
pub mod search;
pub mod covering;
pub mod profile;
pub mod repro;

pub use ffield::{FieldElem, FieldError, FieldSpec, MatrixGF};
pub use lattice::{
    basis_count, bases, binomial, boolean_sublattice, build_boolean, build_subspace, gaussian, Descriptor, ElementId,
    Family, Ground, GroundKind, LatticeError,
};
pub use poset::{contains_copy, count_copies, e_of_poset, parse_poset, PosetError, PosetSpec};
pub use search::{
    la, la_value, max_copies, max_weight_family, max_weight_within, maximize, prop_predict, sigma_value, CopyWeights,
    Objective, PairFilter, PropCase, PropertySpec, SearchError, SearchOptions, SearchResult, WeightVec,
};
pub use covering::{
    build_covering, chain_tuple_cover, lemma_bound, lym_sum, verify_covering, ChainTupleCover, CoverCheck,
    CoveringError, CoveringMethod, CoveringSpec,
};
pub use profile::{
    canonical_partition, extreme_point_scan, lchain_profile, profile_vec, LChainProfile, ProfileError, ProfileVector,
    ScanReport,
};

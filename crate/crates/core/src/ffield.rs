//! Arithmetic in GF(q) for prime powers `q <= 16`, and row reduction over it.
//!
//! Elements are indexed by the base-`p` digits of their polynomial
//! representation: the constant coefficient is the least significant digit.
//! Extension fields use fixed Conway polynomials so that the indexing is the
//! same on every run.

use std::fmt;

use thiserror::Error;

/// Largest field order supported.
pub const MAX_ORDER: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power in 2..={MAX_ORDER}")]
    NotPrimePower(u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u8),
    #[error("matrix rows have inconsistent lengths")]
    Ragged,
    #[error("entry {value} is not an element of GF({q})")]
    BadEntry { value: u8, q: u8 },
}

/// An element of some GF(q), by index in `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(transparent)]
pub struct FieldElem(pub u8);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn value(self) -> u8 {
        self.0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Monic Conway polynomials, coefficients from the constant term upward.
fn conway(p: u8, k: u32) -> Vec<u8> {
    match (p, k) {
        (_, 1) => vec![0, 1],
        (2, 2) => vec![1, 1, 1],
        (2, 3) => vec![1, 1, 0, 1],
        (2, 4) => vec![1, 1, 0, 0, 1],
        (3, 2) => vec![2, 2, 1],
        _ => unreachable!("no prime power p^k <= 16 with p={p}, k={k}"),
    }
}

/// A finite field with complete operation tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldSpec {
    q: u8,
    p: u8,
    k: u32,
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Splits `q` into `(p, k)` with `q = p^k`, `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

impl FieldSpec {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if q > MAX_ORDER {
            return Err(FieldError::NotPrimePower(q));
        }
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        let (q, p) = (q as u8, p as u8);
        let modulus = conway(p, k);
        let digits = |mut e: u8| -> Vec<u8> {
            (0..k)
                .map(|_| {
                    let d = e % p;
                    e /= p;
                    d
                })
                .collect()
        };
        let undigits = |ds: &[u8]| ds.iter().rev().fold(0u8, |acc, &d| acc * p + d);

        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u8> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = undigits(&sum);

                // Schoolbook product, then reduce by the monic modulus.
                let mut prod = vec![0u16; 2 * k as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + *x as u16 * *y as u16) % p as u16;
                    }
                }
                for deg in (k as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    let shift = deg - k as usize;
                    for (i, m) in modulus.iter().enumerate() {
                        let slot = &mut prod[shift + i];
                        *slot = (*slot + (p as u16 - c) * *m as u16) % p as u16;
                    }
                }
                let reduced: Vec<u8> = prod[..k as usize].iter().map(|&c| c as u8).collect();
                mul[a as usize * qs + b as usize] = undigits(&reduced);
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a as usize * qs + b as usize] == 0).unwrap())
            .collect();
        let mut inv = vec![0u8; qs];
        for a in 1..q {
            inv[a as usize] = (1..q)
                .find(|&b| mul[a as usize * qs + b as usize] == 1)
                .expect("Conway modulus is irreducible");
        }
        Ok(FieldSpec { q, p, k, modulus, add, mul, neg, inv })
    }

    pub fn order(&self) -> u8 {
        self.q
    }

    pub fn characteristic(&self) -> u8 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Modulus coefficients, constant term first; monic of degree `k`.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn element(&self, value: u8) -> Option<FieldElem> {
        (value < self.q).then_some(FieldElem(value))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add_raw(a.0, b.0))
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add_raw(a.0, self.neg[b.0 as usize]))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul_raw(a.0, b.0))
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero(self.q));
        }
        Ok(FieldElem(self.inv[a.0 as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub(crate) fn inv_raw(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }
}

/// A rectangular matrix over some GF(q).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixGF {
    cols: usize,
    rows: Vec<Vec<FieldElem>>,
}

impl MatrixGF {
    pub fn new(cols: usize, rows: Vec<Vec<FieldElem>>) -> Result<Self, FieldError> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(FieldError::Ragged);
        }
        Ok(MatrixGF { cols, rows })
    }

    /// Builds a matrix from raw element indices, checking them against `f`.
    pub fn from_values(f: &FieldSpec, cols: usize, rows: &[Vec<u8>]) -> Result<Self, FieldError> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| f.element(v).ok_or(FieldError::BadEntry { value: v, q: f.order() }))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(cols, rows)
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { FieldElem::ONE } else { FieldElem::ZERO }).collect())
            .collect();
        MatrixGF { cols: n, rows }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixGF { cols, rows: vec![vec![FieldElem::ZERO; cols]; rows] }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<FieldElem>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<FieldElem>> {
        self.rows
    }

    /// Reduced row echelon form with zero rows dropped, and the rank.
    ///
    /// Two matrices have the same row space iff their reduced forms are equal.
    pub fn rref(&self, f: &FieldSpec) -> (MatrixGF, usize) {
        let mut raw: Vec<Vec<u8>> =
            self.rows.iter().map(|r| r.iter().map(|e| e.0).collect()).collect();
        let rank = rref_in_place(f, &mut raw, self.cols);
        let rows = raw.into_iter().map(|r| r.into_iter().map(FieldElem).collect()).collect();
        (MatrixGF { cols: self.cols, rows }, rank)
    }

    pub fn rank(&self, f: &FieldSpec) -> usize {
        self.rref(f).1
    }
}

/// Gauss-Jordan elimination on raw rows. Leaves exactly `rank` rows.
pub(crate) fn rref_in_place(f: &FieldSpec, rows: &mut Vec<Vec<u8>>, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let scale = f.inv_raw(rows[rank][col]);
        for v in rows[rank].iter_mut() {
            *v = f.mul_raw(*v, scale);
        }
        for r in 0..rows.len() {
            if r == rank || rows[r][col] == 0 {
                continue;
            }
            let factor = f.neg_raw(rows[r][col]);
            let pivot = rows[rank].clone();
            for (x, &p) in rows[r][col..cols].iter_mut().zip(&pivot[col..cols]) {
                *x = f.add_raw(*x, f.mul_raw(factor, p));
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(v: u8) -> FieldElem {
        FieldElem(v)
    }

    #[test]
    fn gf2_characteristic_two() {
        let f = FieldSpec::new(2).unwrap();
        assert_eq!(f.add(e(1), e(1)), e(0));
        assert_eq!(f.characteristic(), 2);
    }

    #[test]
    fn gf4_generator_squares_to_successor() {
        let f = FieldSpec::new(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let a = e(2);
        assert_eq!(f.mul(a, a), e(3));
        assert_eq!(f.add(a, e(1)), e(3));
        assert_eq!(f.inv(a).unwrap(), e(3));
    }

    #[test]
    fn rejects_non_prime_powers() {
        for q in [0, 1, 6, 10, 12, 14, 15, 17, 25, 32] {
            assert_eq!(FieldSpec::new(q), Err(FieldError::NotPrimePower(q)), "q={q}");
        }
    }

    #[test]
    fn gf3_multiplication() {
        let f = FieldSpec::new(3).unwrap();
        assert_eq!(f.mul(e(2), e(2)), e(1));
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = FieldSpec::new(5).unwrap();
        assert_eq!(f.inv(e(0)), Err(FieldError::DivisionByZero(5)));
    }

    // Independent oracle: polynomial arithmetic over GF(p) done directly on
    // digit vectors, compared against the lookup tables.
    fn poly_mul_oracle(p: u64, modulus: &[u8], a: u64, b: u64) -> u64 {
        let k = modulus.len() - 1;
        let da: Vec<u64> = (0..k).map(|i| a / p.pow(i as u32) % p).collect();
        let db: Vec<u64> = (0..k).map(|i| b / p.pow(i as u32) % p).collect();
        let mut prod = vec![0u64; 2 * k];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] += da[i] * db[j];
            }
        }
        for deg in (k..2 * k).rev() {
            let c = prod[deg] % p;
            for (i, &m) in modulus.iter().enumerate() {
                prod[deg - k + i] += (p - c) * m as u64;
            }
        }
        (0..k).map(|i| (prod[i] % p) * p.pow(i as u32)).sum()
    }

    #[test]
    fn tables_match_polynomial_oracle() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = FieldSpec::new(q).unwrap();
            for a in 0..q {
                for b in 0..q {
                    let got = f.mul(e(a as u8), e(b as u8)).0 as u64;
                    let want = poly_mul_oracle(f.characteristic() as u64, f.modulus(), a, b);
                    assert_eq!(got, want, "GF({q}): {a}*{b}");
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in 2..=16u64 {
            let Ok(f) = FieldSpec::new(q) else { continue };
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), FieldElem::ZERO);
                assert_eq!(f.add(a, FieldElem::ZERO), a);
                assert_eq!(f.mul(a, FieldElem::ONE), a);
                if a != FieldElem::ZERO {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn rref_examples() {
        let f = FieldSpec::new(2).unwrap();
        let id = MatrixGF::identity(4);
        assert_eq!(id.rref(&f), (id.clone(), 4));

        let m = MatrixGF::from_values(&f, 3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        let (r, rank) = m.rref(&f);
        assert_eq!(rank, 2);
        let want = MatrixGF::from_values(&f, 3, &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(r, want);

        let (z, rank) = MatrixGF::zero(3, 4).rref(&f);
        assert_eq!(rank, 0);
        assert!(z.rows().is_empty());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert_eq!(MatrixGF::new(2, vec![vec![FieldElem::ONE]]), Err(FieldError::Ragged));
    }

    // Oracle: the explicit set of vectors spanned by the rows.
    fn span_set(f: &FieldSpec, cols: usize, rows: &[Vec<u8>]) -> std::collections::BTreeSet<Vec<u8>> {
        let mut set = std::collections::BTreeSet::new();
        set.insert(vec![0u8; cols]);
        for r in rows {
            let current: Vec<Vec<u8>> = set.iter().cloned().collect();
            for v in current {
                for c in f.elements() {
                    let w: Vec<u8> = v
                        .iter()
                        .zip(r)
                        .map(|(&a, &b)| f.add(FieldElem(a), f.mul(c, FieldElem(b))).value())
                        .collect();
                    set.insert(w);
                }
            }
        }
        set
    }

    fn row_set(q: u8, n: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
        proptest::collection::vec(proptest::collection::vec(0..q, n), 0..=n + 1)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn span_canonicality(
            (q, n, a, b) in (prop_oneof![Just(2u8), Just(3u8)], 1usize..=5)
                .prop_flat_map(|(q, n)| (Just(q), Just(n), row_set(q, n), row_set(q, n)))
        ) {
            let f = FieldSpec::new(q as u64).unwrap();
            let ra = MatrixGF::from_values(&f, n, &a).unwrap().rref(&f).0;
            let rb = MatrixGF::from_values(&f, n, &b).unwrap().rref(&f).0;
            prop_assert_eq!(ra == rb, span_set(&f, n, &a) == span_set(&f, n, &b));
        }

        #[test]
        fn equal_spans_share_rref(
            (q, n, a, mix) in (prop_oneof![Just(2u8), Just(3u8)], 1usize..=5)
                .prop_flat_map(|(q, n)| (Just(q), Just(n), row_set(q, n), proptest::collection::vec(0..q, 36)))
        ) {
            // Rows of b are random combinations of rows of a plus a itself,
            // so both span the same space.
            let f = FieldSpec::new(q as u64).unwrap();
            let mut b: Vec<Vec<u8>> = a.iter().rev().cloned().collect();
            for (i, _) in a.iter().enumerate() {
                let mut v = vec![0u8; n];
                for (j, r) in a.iter().enumerate() {
                    let c = FieldElem(mix[(i * 6 + j) % mix.len()]);
                    for (x, &y) in v.iter_mut().zip(r) {
                        *x = f.add(FieldElem(*x), f.mul(c, FieldElem(y))).value();
                    }
                }
                b.push(v);
            }
            let ra = MatrixGF::from_values(&f, n, &a).unwrap().rref(&f);
            let rb = MatrixGF::from_values(&f, n, &b).unwrap().rref(&f);
            prop_assert_eq!(ra, rb);
        }

        #[test]
        fn rref_idempotent(
            (q, n, a) in (prop_oneof![Just(2u8), Just(3u8), Just(4u8), Just(9u8)], 1usize..=6)
                .prop_flat_map(|(q, n)| (Just(q), Just(n), row_set(q, n)))
        ) {
            let f = FieldSpec::new(q as u64).unwrap();
            let (r, rank) = MatrixGF::from_values(&f, n, &a).unwrap().rref(&f);
            prop_assert_eq!(r.rref(&f), (r.clone(), rank));
            prop_assert_eq!(r.rows().len(), rank);
        }
    }
}

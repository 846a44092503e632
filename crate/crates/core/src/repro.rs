//! The reproduction suite: every headline number re-derived through the
//! public API, with a pass/fail verdict and timing per check.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::covering::{
    build_covering, chain_tuple_cover, level_incidences, lym_sum, verify_covering, CoveringMethod,
};
use crate::lattice::{basis_count, binomial, build_boolean, build_subspace, gaussian, Family, Ground};
use crate::poset::{contains_copy, contains_copy_using, parse_poset, PosetSpec};
use crate::profile::extreme_point_scan;
use crate::search::{
    la_value, max_copies, max_weight_family, max_weight_within, middle_window, prop_predict, sigma_value, PropCase,
    PropertySpec, SearchOptions, WeightVec,
};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

type Check = fn(&SearchOptions) -> Result<String, String>;

const CHECKS: [(u32, &str, u64, Check); 12] = [
    (1, "level counts", 10, level_counts),
    (2, "covering exactness", 60, covering_exactness),
    (3, "middle-level identity", 10, middle_identity),
    (4, "Sperner and k-Sperner", 60, sperner),
    (5, "butterfly", 300, butterfly),
    (6, "vee and wedge", 60, vee_wedge),
    (7, "generalized counts", 60, generalized_counts),
    (8, "LYM", 60, lym),
    (9, "covering bound", 120, covering_bound),
    (10, "extreme points", 300, extreme_points),
    (11, "intersecting planes", 60, intersecting),
    (12, "naive enumeration", 300, naive),
];

/// Identifiers and names of all checks.
pub fn list() -> Vec<(u32, &'static str)> {
    CHECKS.iter().map(|(id, name, ..)| (*id, *name)).collect()
}

/// Runs the checks whose ids are in `only` (all when empty).
pub fn run(only: &[u32], opts: &SearchOptions) -> Vec<Outcome> {
    CHECKS
        .iter()
        .filter(|(id, ..)| only.is_empty() || only.contains(id))
        .map(|&(id, name, limit, check)| {
            let start = Instant::now();
            let result = catch_unwind(AssertUnwindSafe(|| check(opts)))
                .unwrap_or_else(|_| Err("check panicked".to_string()));
            let elapsed = start.elapsed();
            let limit = Duration::from_secs(limit);
            let (passed, detail) = match result {
                Ok(d) if elapsed <= limit => (true, d),
                Ok(d) => (false, format!("{d}; exceeded {}s", limit.as_secs())),
                Err(e) => (false, e),
            };
            Outcome { id, name, passed, detail, elapsed, limit }
        })
        .collect()
}

pub fn run_all(opts: &SearchOptions) -> Vec<Outcome> {
    run(&[], opts)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn level_counts(_: &SearchOptions) -> Result<String, String> {
    let mut checked = 0;
    for (q, max_n) in [(2u64, 5usize), (3, 4)] {
        for n in 0..=max_n {
            let g = build_subspace(n, q).map_err(err)?;
            for i in 0..=n {
                let want = gaussian(n, i, q).map_err(err)?;
                ensure(BigUint::from(g.level_size(i)) == want, || format!("q={q} n={n} level {i}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} levels match"))
}

fn covering_exactness(_: &SearchOptions) -> Result<String, String> {
    let mut sizes = Vec::new();
    for n in 2..=4 {
        let g = build_subspace(n, 2).map_err(err)?;
        let c = build_covering(&g, CoveringMethod::BooleanSublattices).map_err(err)?;
        ensure(c.size() == basis_count(n, 2), || format!("n={n}: |Γ|={}", c.size()))?;
        let check = verify_covering(&c);
        ensure(check.ok, || format!("n={n}: {:?}", check.violation))?;
        sizes.push(c.size().to_string());
        if n == 3 {
            let t: Vec<String> = c.t().iter().map(ToString::to_string).collect();
            ensure(t == ["28", "12", "12", "28"], || format!("t={t:?}"))?;
        }
    }
    Ok(format!("|Γ| = {}", sizes.join(", ")))
}

fn middle_identity(_: &SearchOptions) -> Result<String, String> {
    let mut checked = 0;
    for n in 2..=4 {
        let g = build_subspace(n, 2).map_err(err)?;
        let c = build_covering(&g, CoveringMethod::BooleanSublattices).map_err(err)?;
        for k in 1..=n {
            let levels = middle_window(n, k, false).map_err(err)?;
            let weight: BigUint = levels.iter().map(|&i| &c.t()[i] * g.level_size(i)).sum();
            let want = c.size() * sigma_value(n, k, None, false).map_err(err)?;
            ensure(weight == want, || format!("n={n} k={k}: {weight} != {want}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (n, k) pairs"))
}

fn sperner(_: &SearchOptions) -> Result<String, String> {
    for n in 0..=5 {
        let g = build_boolean(n).map_err(err)?;
        let v = la_value(&g, &[PosetSpec::chain(2).map_err(err)?]).map_err(err)?;
        ensure(v == binomial(n as u64, n as u64 / 2), || format!("n={n}: {v}"))?;
    }
    for n in 0..=4 {
        let g = build_boolean(n).map_err(err)?;
        for k in 1..=3 {
            let v = la_value(&g, &[PosetSpec::chain(k + 1).map_err(err)?]).map_err(err)?;
            let want = sigma_value(n, k.min(n + 1), None, false).map_err(err)?;
            ensure(v == want, || format!("n={n} k={k}: {v} != {want}"))?;
        }
    }
    Ok("antichains n<=5, k-Sperner n<=4 k<=3".into())
}

fn butterfly(_: &SearchOptions) -> Result<String, String> {
    let b = PosetSpec::butterfly();
    let mut vals = Vec::new();
    for n in [3, 4] {
        let g = build_boolean(n).map_err(err)?;
        let v = la_value(&g, std::slice::from_ref(&b)).map_err(err)?;
        ensure(v == sigma_value(n, 2, None, false).map_err(err)?, || format!("n={n}: {v}"))?;
        vals.push(v.to_string());
    }
    let s = build_subspace(3, 2).map_err(err)?;
    let v = la_value(&s, &[b]).map_err(err)?;
    ensure(v == sigma_value(3, 2, Some(2), false).map_err(err)?, || format!("subspace(3,2): {v}"))?;
    vals.push(v.to_string());
    Ok(format!("values {}", vals.join(", ")))
}

fn vee_wedge(_: &SearchOptions) -> Result<String, String> {
    let mut vals = Vec::new();
    for n in [2, 3] {
        let g = build_subspace(n, 2).map_err(err)?;
        let v = la_value(&g, &[PosetSpec::vee(), PosetSpec::wedge()]).map_err(err)?;
        ensure(v == gaussian(n, n / 2, 2).map_err(err)?, || format!("n={n}: {v}"))?;
        vals.push(v.to_string());
    }
    Ok(format!("values {}", vals.join(", ")))
}

fn generalized_counts(opts: &SearchOptions) -> Result<String, String> {
    let g = build_subspace(2, 2).map_err(err)?;
    let p = |s: &str| parse_poset(s).map_err(err);
    let cases = [
        ("vee", "broom:2", Some((PropCase::I, 2)), 3u32),
        ("butterfly", "diamond:1", Some((PropCase::Ii, 1)), 3),
        ("chain:3", "broom:3", Some((PropCase::Iii, 3)), 1),
    ];
    let mut vals = Vec::new();
    for (forbid, count, predict, want) in cases {
        let r = max_copies(&g, &[p(forbid)?], &p(count)?, opts).map_err(err)?;
        let v = r.integer_value().ok_or("non-integer count")?;
        ensure(r.proven_optimal && v == BigUint::from(want), || format!("{forbid}/{count}: {v}"))?;
        if let Some((case, r)) = predict {
            let predicted = prop_predict(case, 2, 2, r).map_err(err)?;
            ensure(predicted == v, || format!("{forbid}/{count}: predicted {predicted}"))?;
        }
        vals.push(v.to_string());
    }
    Ok(format!("values {}", vals.join(", ")))
}

fn lym(_: &SearchOptions) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grounds: Vec<Ground> = (1..=8).map(|n| build_boolean(n).expect("small")).collect();
    let mut equal = 0;
    for _ in 0..1000 {
        let g = &grounds[rng.random_range(0..grounds.len())];
        let f = random_antichain(g, &mut rng);
        let s = lym_sum(g, &f);
        ensure(s <= BigRational::one(), || format!("sum {s} > 1"))?;
        if s.is_one() {
            ensure(f.as_union_of_levels().is_some_and(|l| l.len() == 1), || "equality off a full level".into())?;
            equal += 1;
        }
    }
    let s = build_subspace(3, 2).map_err(err)?;
    let f = Family::levels(&s, &[1, 2]);
    ensure(contains_copy(&f, &PosetSpec::butterfly()).is_none(), || "levels 1,2 contain a butterfly".into())?;
    let sum = lym_sum(&s, &f);
    ensure(sum == BigRational::from_integer(2.into()), || format!("subspace sum {sum}"))?;
    Ok(format!("1000 antichains ({equal} full levels); subspace sum 2"))
}

/// A random antichain: visit elements in random order, keep those
/// incomparable to everything kept so far.
pub(crate) fn random_antichain<'g>(g: &'g Ground, rng: &mut impl Rng) -> Family<'g> {
    let mut order: Vec<_> = g.ids().collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let keep = rng.random_range(1..=order.len());
    let mut f = Family::empty(g);
    for x in order.into_iter().take(keep) {
        if f.iter().all(|y| !g.comparable(x, y)) {
            f.insert(x);
        }
    }
    f
}

fn covering_bound(opts: &SearchOptions) -> Result<String, String> {
    let names = ["chain:2", "chain:3", "vee", "wedge", "butterfly", "diamond:2", "broom:3"];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grounds = [build_boolean(3).map_err(err)?, build_boolean(4).map_err(err)?];
    let coverings = [
        build_covering(&grounds[0], CoveringMethod::Chains).map_err(err)?,
        build_covering(&grounds[1], CoveringMethod::Chains).map_err(err)?,
    ];
    for case in 0..50 {
        let c = &coverings[case % 2];
        let g = c.ground();
        let t = PropertySpec::forbid([parse_poset(names[rng.random_range(0..names.len())]).map_err(err)?]);
        let w = WeightVec::from_integers((0..=g.n()).map(|_| rng.random_range(0..=6u32))).map_err(err)?;
        let best = max_weight_family(g, &t, &w, opts).map_err(err)?;
        let x = crate::covering::inner_maximum(c, &t, &w, opts).map_err(err)?;
        let bound = crate::covering::lemma_bound(c, &w, &x.value).map_err(err)?.bound;
        ensure(best.value <= bound, || format!("case {case}: {} > {bound}", best.value))?;
    }
    for c in &coverings {
        for _ in 0..100 {
            let g = c.ground();
            let f = Family::from_ids(g, g.ids().filter(|_| rng.random_bool(0.5)));
            ensure(level_incidences(c, &f).iter().all(|(a, b)| a == b), || "counting identity".into())?;
        }
    }
    Ok("50 bound instances, 200 counting identities".into())
}

fn extreme_points(opts: &SearchOptions) -> Result<String, String> {
    let b4 = build_boolean(4).map_err(err)?;
    let anti = PropertySpec::forbid([PosetSpec::chain(2).map_err(err)?]);
    let rep = extreme_point_scan(&b4, &anti, 1, 200, 10, opts).map_err(err)?;
    ensure(
        rep.directions.iter().all(|d| d.witness_levels.as_ref().is_some_and(|l| l.len() <= 1)),
        || "antichain optimum off a full level".into(),
    )?;
    let s = build_subspace(3, 2).map_err(err)?;
    let two = PropertySpec::forbid([PosetSpec::chain(3).map_err(err)?]);
    for l in [1, 2] {
        let rep = extreme_point_scan(&s, &two, l, 100, 10 + l as u64, opts).map_err(err)?;
        ensure(
            rep.directions.iter().all(|d| d.witness_levels.as_ref().is_some_and(|lv| lv.len() <= 2)),
            || format!("l={l}: optimum off the unions of two levels"),
        )?;
    }
    let c = build_covering(&s, CoveringMethod::BooleanSublattices).map_err(err)?;
    let tc = chain_tuple_cover(&c, 2).map_err(err)?;
    let stat = tc.get(&[1, 2]).map_err(err)?;
    ensure(tc.uniform() && stat.min == BigUint::from(8u32), || format!("tuple (1,2): {stat:?}"))?;
    Ok("200 + 2x100 directions; (1,2) covered 8 times".into())
}

fn intersecting(opts: &SearchOptions) -> Result<String, String> {
    let g = build_subspace(4, 2).map_err(err)?;
    let r = max_weight_within(&Family::levels(&g, &[2]), &PropertySpec::intersecting(), &WeightVec::unit(4), opts)
        .map_err(err)?;
    let want = BigRational::from_integer(BigInt::from(gaussian(3, 1, 2).map_err(err)?));
    ensure(r.proven_optimal && r.value == want, || format!("value {}", r.value))?;
    Ok(format!("value {} in {} nodes", r.value, r.nodes_explored))
}

fn naive(opts: &SearchOptions) -> Result<String, String> {
    let grounds = [
        build_boolean(3).map_err(err)?,
        build_boolean(4).map_err(err)?,
        build_subspace(2, 3).map_err(err)?,
        build_subspace(3, 2).map_err(err)?,
        build_subspace(2, 7).map_err(err)?,
    ];
    let names = ["chain:2", "chain:3", "vee", "wedge", "butterfly", "diamond:1", "diamond:2", "fork:3", "broom:3"];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..50 {
        let g = &grounds[case % grounds.len()];
        let count = rng.random_range(1..=2);
        let forbidden: Vec<PosetSpec> =
            (0..count).map(|_| parse_poset(names[rng.random_range(0..names.len())])).collect::<Result<_, _>>().map_err(err)?;
        let w: Vec<u32> = (0..=g.n()).map(|_| rng.random_range(0..=5)).collect();
        let t = PropertySpec::forbid(forbidden);
        let wv = WeightVec::from_integers(w.iter().copied()).map_err(err)?;
        let r = max_weight_family(g, &t, &wv, opts).map_err(err)?;
        // Every family: F is admissible iff F minus its top element is and
        // no forbidden copy runs through that top element.
        let n = g.len();
        let level_w: Vec<u64> = (0..n).map(|i| u64::from(w[g.level(crate::ElementId(i))])).collect();
        let mut ok = vec![false; 1 << n];
        let mut value = vec![0u64; 1 << n];
        ok[0] = true;
        let mut best = 0u64;
        for mask in 1usize..1 << n {
            let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
            let rest = mask & !(1 << top);
            if !ok[rest] {
                continue;
            }
            let mut bits = fixedbitset::FixedBitSet::with_capacity(n);
            bits.extend((0..n).filter(|&i| mask >> i & 1 == 1));
            if t.forbidden.iter().any(|p| contains_copy_using(g, &bits, p, top)) {
                continue;
            }
            ok[mask] = true;
            value[mask] = value[rest] + level_w[top];
            best = best.max(value[mask]);
        }
        let best = BigRational::from_integer(best.into());
        ensure(r.value == best, || format!("case {case}: search {} vs naive {best}", r.value))?;
    }
    Ok("50 instances agree".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_antichains_are_antichains() {
        let g = build_boolean(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let f = random_antichain(&g, &mut rng);
            assert!(!f.is_empty());
            assert!(contains_copy(&f, &PosetSpec::chain(2).unwrap()).is_none());
        }
    }

    #[test]
    fn listing_is_complete() {
        let ids: Vec<u32> = list().into_iter().map(|(id, _)| id).collect();
        assert_eq!(ids, (1..=12).collect::<Vec<_>>());
    }
}

use num_rational::BigRational;
use serde_json::{json, Value};
use subposet_core::covering::{
    build_covering, chain_tuple_cover, inner_maximum, lemma_bound, lym_sum, verify_covering, CoveringMethod,
    CoveringSpec,
};
use subposet_core::ffield::FieldElem;
use subposet_core::lattice::{build_boolean, build_subspace, gaussian, Descriptor, Family, Ground};
use subposet_core::poset::{e_of_poset, parse_poset, parse_poset_list, PosetSpec};
use subposet_core::profile::{canonical_partition, extreme_point_scan, lchain_profile, profile_vec};
use subposet_core::repro;
use subposet_core::search::{
    max_copies, max_weight_within, middle_window, parse_rational, prop_predict, rational_string, sigma_value,
    PairFilter, PropCase, PropertySpec, SearchOptions, SearchResult, WeightVec,
};

use crate::error::{CliError, EXIT_NODE_CAP};
use crate::{
    CaseChoice, Command, CoveringAction, FamilyArgs, GroundArgs, GroundChoice, MethodChoice, PropertyArgs,
};

/// A finished command: its payload and the exit code to report with it.
pub struct Done {
    pub result: Value,
    pub exit_code: u8,
}

impl From<Value> for Done {
    fn from(result: Value) -> Self {
        Done { result, exit_code: 0 }
    }
}

type Outcome = Result<Done, CliError>;

fn s(x: impl ToString) -> Value {
    Value::String(x.to_string())
}

fn strings<T: ToString>(xs: impl IntoIterator<Item = T>) -> Value {
    Value::Array(xs.into_iter().map(s).collect())
}

fn tuple_label(t: &[usize]) -> String {
    t.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn exit_for(proven: bool) -> u8 {
    if proven {
        0
    } else {
        EXIT_NODE_CAP
    }
}

fn build_ground(a: &GroundArgs) -> Result<Ground, CliError> {
    match a.ground {
        GroundChoice::Boolean => {
            if a.q.is_some() {
                return Err(CliError::usage("--q only applies to --ground subspace"));
            }
            Ok(build_boolean(a.n)?)
        }
        GroundChoice::Subspace => Ok(build_subspace(a.n, a.q.unwrap_or(2))?),
    }
}

fn forbidden(list: Option<&str>) -> Result<Vec<PosetSpec>, CliError> {
    match list {
        Some(l) => Ok(parse_poset_list(l)?),
        None => Ok(Vec::new()),
    }
}

fn property(a: &PropertyArgs) -> Result<PropertySpec, CliError> {
    let filter = a.pair_filter.map(|_| PairFilter::Intersecting);
    Ok(PropertySpec::forbid(forbidden(a.forbid.as_deref())?).with_pair_filter(filter))
}

fn check_levels(g: &Ground, levels: &[usize]) -> Result<(), CliError> {
    match levels.iter().find(|&&l| l > g.n()) {
        Some(l) => Err(CliError::usage(format!("level {l} exceeds n={}", g.n()))),
        None => Ok(()),
    }
}

/// Parses `{1,3}` (Boolean) or `<101,011>` (subspace, rows of base-q digits).
fn parse_member(g: &Ground, text: &str) -> Result<usize, CliError> {
    let text = text.trim();
    let bad = |why: &str| CliError::usage(format!("member `{text}`: {why}"));
    let id = if let Some(inner) = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
        if g.field().is_some() {
            return Err(bad("sets need a boolean ground"));
        }
        let mut mask = 0u32;
        for item in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let i: usize = item.parse().map_err(|_| bad("not a number"))?;
            if i == 0 || i > g.n() {
                return Err(bad("element out of range"));
            }
            mask |= 1 << (i - 1);
        }
        g.find(&Descriptor::Set(mask))
    } else if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        let field = g.field().ok_or_else(|| bad("spans need a subspace ground"))?;
        let rows = inner
            .split(',')
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(|r| {
                r.chars()
                    .map(|c| {
                        c.to_digit(16)
                            .and_then(|d| field.element(d as u8))
                            .ok_or_else(|| bad("digit is not a field element"))
                    })
                    .collect::<Result<Vec<FieldElem>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        g.find_span(&rows)
    } else {
        return Err(bad("expected {..} or <..>"));
    };
    id.map(|e| e.0).ok_or_else(|| bad("not an element of the ground"))
}

fn build_family<'g>(g: &'g Ground, a: &FamilyArgs) -> Result<Family<'g>, CliError> {
    if a.levels.is_none() && a.members.is_none() {
        return Err(CliError::usage("give --levels and/or --members"));
    }
    let mut f = Family::empty(g);
    if let Some(levels) = &a.levels {
        check_levels(g, levels)?;
        f = f.union(&Family::levels(g, levels));
    }
    if let Some(members) = &a.members {
        let ids = members
            .split(';')
            .filter(|m| !m.trim().is_empty())
            .map(|m| parse_member(g, m))
            .collect::<Result<Vec<_>, _>>()?;
        f = f.union(&Family::try_from_indices(g, &ids).expect("ids come from the ground"));
    }
    Ok(f)
}

fn search_json(r: &SearchResult<'_>) -> Value {
    json!({
        "value": rational_string(&r.value),
        "proven_optimal": r.proven_optimal,
        "nodes_explored": s(r.nodes_explored),
        "witness_size": s(r.witness.len()),
        "witness": r.witness.descriptors(),
    })
}

fn method(m: MethodChoice) -> CoveringMethod {
    match m {
        MethodChoice::Chains => CoveringMethod::Chains,
        MethodChoice::Cycle => CoveringMethod::Cycle,
        MethodChoice::BooleanSublattices => CoveringMethod::BooleanSublattices,
    }
}

fn covering_summary(c: &CoveringSpec<'_>) -> Value {
    json!({
        "method": c.method().to_string(),
        "t": strings(c.t()),
        "size": s(c.size()),
        "distinct_members": s(c.members().len()),
    })
}

pub fn run(cmd: &Command, opts: &SearchOptions) -> Outcome {
    match cmd {
        Command::Gauss { n, k, q } => Ok(json!({ "value": s(gaussian(*n, *k, *q)?) }).into()),
        Command::Ground { ground, list } => {
            let g = build_ground(ground)?;
            let mut out = json!({
                "kind": g.kind_label(),
                "elements": s(g.len()),
                "level_sizes": strings(g.level_sizes()),
                "comparable_pairs": s(g.comparable_pairs()),
            });
            if *list {
                out["members"] = Family::full(&g).descriptors().into();
            }
            Ok(out.into())
        }
        Command::La { ground, property: p, weights, levels } => {
            let g = build_ground(ground)?;
            let t = property(p)?;
            let w = match weights {
                Some(w) => WeightVec::parse(w)?,
                None => WeightVec::unit(g.n()),
            };
            let domain = match levels {
                Some(ls) => {
                    check_levels(&g, ls)?;
                    Family::levels(&g, ls)
                }
                None => Family::full(&g),
            };
            let r = max_weight_within(&domain, &t, &w, opts)?;
            Ok(Done { result: search_json(&r), exit_code: exit_for(r.proven_optimal) })
        }
        Command::Sigma { n, k, q, alt_window } => {
            let value = sigma_value(*n, *k, *q, *alt_window)?;
            let window = middle_window(*n, *k, *alt_window)?;
            Ok(json!({ "value": s(value), "levels": strings(window) }).into())
        }
        Command::CountMax { ground, forbid, pattern } => {
            let g = build_ground(ground)?;
            let r = max_copies(&g, &forbidden(forbid.as_deref())?, &parse_poset(pattern)?, opts)?;
            Ok(Done { result: search_json(&r), exit_code: exit_for(r.proven_optimal) })
        }
        Command::PropPredict { which, n, q, r, search } => prop(*which, *n, *q, *r, *search, opts),
        Command::Covering { action } => covering(action, opts),
        Command::Lym { ground, family } => {
            let g = build_ground(ground)?;
            let f = build_family(&g, family)?;
            Ok(json!({ "value": rational_string(&lym_sum(&g, &f)), "size": s(f.len()) }).into())
        }
        Command::Profile { ground, family, l } => {
            let g = build_ground(ground)?;
            let f = build_family(&g, family)?;
            if *l == 1 {
                let p = profile_vec(&g, &f);
                Ok(json!({ "l": "1", "profile": strings(&p.0), "total": s(p.total()) }).into())
            } else {
                let p = lchain_profile(&g, &f, *l)?;
                Ok(json!({
                    "l": s(l),
                    "coordinates": strings(p.counts.keys().map(|t| tuple_label(t))),
                    "profile": strings(p.counts.values()),
                })
                .into())
            }
        }
        Command::ExtremeScan { ground, property: p, l, directions, seed } => {
            let g = build_ground(ground)?;
            let t = property(p)?;
            let report = extreme_point_scan(&g, &t, *l, *directions, *seed, opts)?;
            let dirs: Vec<Value> = report
                .directions
                .iter()
                .map(|d| {
                    json!({
                        "index": s(d.index),
                        "direction": strings(&d.direction),
                        "value": rational_string(&d.value),
                        "profile": strings(&d.profile),
                        "is_union_of_levels": d.is_union_of_levels,
                        "witness_levels": d.witness_levels.as_ref().map(strings),
                        "proven_optimal": d.proven_optimal,
                    })
                })
                .collect();
            let proven = report.directions.iter().all(|d| d.proven_optimal);
            let result = json!({
                "l": s(report.l),
                "k": report.k.map(s),
                "coordinates": strings(report.coordinates.iter().map(|t| tuple_label(t))),
                "all_unions_of_levels": report.all_unions_of_levels(),
                "proven_optimal": proven,
                "directions": dirs,
            });
            Ok(Done { result, exit_code: exit_for(proven) })
        }
        Command::CanonPartition { ground, family, k } => {
            let g = build_ground(ground)?;
            let f = build_family(&g, family)?;
            let parts = canonical_partition(&f, *k)?;
            Ok(json!({
                "k": s(k),
                "sizes": strings(parts.iter().map(Family::len)),
                "parts": parts.iter().map(Family::descriptors).collect::<Vec<_>>(),
            })
            .into())
        }
        Command::EOfPoset { pattern, n } => {
            let p = parse_poset(pattern)?;
            let b = e_of_poset(&p, *n)?;
            Ok(json!({
                "pattern": p.spec_string(),
                "value": s(b.m),
                "certified_up_to": s(b.certified_up_to),
            })
            .into())
        }
        Command::Repro { only } => {
            let outcomes = repro::run(only.as_deref().unwrap_or(&[]), opts);
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            let checks: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "id": s(o.id),
                        "name": o.name,
                        "passed": o.passed,
                        "detail": o.detail,
                        "elapsed_ms": s(o.elapsed.as_millis()),
                        "limit_ms": s(o.limit.as_millis()),
                    })
                })
                .collect();
            let result = json!({
                "passed": s(outcomes.len() - failed),
                "failed": s(failed),
                "checks": checks,
            });
            Ok(Done { result, exit_code: u8::from(failed > 0) })
        }
    }
}

fn prop(which: CaseChoice, n: usize, q: u64, r: usize, search: bool, opts: &SearchOptions) -> Outcome {
    let case = match which {
        CaseChoice::I => PropCase::I,
        CaseChoice::Ii => PropCase::Ii,
        CaseChoice::Iii => PropCase::Iii,
    };
    let mut result = json!({ "prediction": s(prop_predict(case, n, q, r)?) });
    if !search {
        return Ok(result.into());
    }
    // Case iii has two readings of the forbidden chain; both are searched.
    let runs: Vec<(String, String)> = match case {
        PropCase::I => vec![("vee".into(), format!("broom:{r}"))],
        PropCase::Ii => vec![("butterfly".into(), format!("diamond:{r}"))],
        PropCase::Iii => vec![("chain:3".into(), format!("broom:{r}")), (format!("chain:{r}"), format!("broom:{r}"))],
    };
    let g = build_subspace(n, q)?;
    let mut proven = true;
    let mut searches = Vec::new();
    for (forbid, count) in runs {
        let res = max_copies(&g, &[parse_poset(&forbid)?], &parse_poset(&count)?, opts)?;
        proven &= res.proven_optimal;
        let mut v = search_json(&res);
        v["forbid"] = forbid.into();
        v["pattern"] = count.into();
        searches.push(v);
    }
    result["searches"] = searches.into();
    Ok(Done { result, exit_code: exit_for(proven) })
}

fn covering(action: &CoveringAction, opts: &SearchOptions) -> Outcome {
    match action {
        CoveringAction::Build { ground, method: m, list } => {
            let g = build_ground(ground)?;
            let c = build_covering(&g, method(*m))?;
            let mut out = covering_summary(&c);
            if *list {
                out["members"] = c
                    .members()
                    .iter()
                    .map(|(f, mult)| json!({ "members": f.descriptors(), "multiplicity": s(mult) }))
                    .collect::<Vec<_>>()
                    .into();
            }
            Ok(out.into())
        }
        CoveringAction::Verify { ground, method: m, drop_member } => {
            let g = build_ground(ground)?;
            let mut c = build_covering(&g, method(*m))?;
            if let Some(i) = drop_member {
                if *i >= c.members().len() {
                    return Err(CliError::usage(format!(
                        "--drop-member {i} out of range, the covering has {} distinct members",
                        c.members().len()
                    )));
                }
                c = c.without_one(*i);
            }
            let check = verify_covering(&c);
            let mut out = covering_summary(&c);
            out["ok"] = check.ok.into();
            if let Some(v) = check.violation {
                out["violation"] = json!({
                    "element": g.descriptor(v.element).to_string(),
                    "observed": s(v.observed),
                    "expected": s(v.expected),
                });
            }
            Ok(out.into())
        }
        CoveringAction::TupleCover { ground, method: m, l, tuple } => {
            let g = build_ground(ground)?;
            let c = build_covering(&g, method(*m))?;
            let cover = chain_tuple_cover(&c, *l)?;
            let stat = |t: &[usize], st: &subposet_core::covering::TupleStat| {
                json!({
                    "tuple": tuple_label(t),
                    "chains": s(st.chains),
                    "min": s(&st.min),
                    "max": s(&st.max),
                })
            };
            let rows: Vec<Value> = match tuple {
                Some(text) => {
                    let t = text
                        .split(',')
                        .map(|x| x.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| CliError::usage(format!("cannot parse tuple `{text}`")))?;
                    vec![stat(&t, cover.get(&t)?)]
                }
                None => cover.table.iter().map(|(t, st)| stat(t, st)).collect(),
            };
            Ok(json!({ "l": s(l), "uniform": cover.uniform(), "tuples": rows }).into())
        }
        CoveringAction::Bound { ground, method: m, property: p, weights, inner_max } => {
            let g = build_ground(ground)?;
            let c = build_covering(&g, method(*m))?;
            let t = property(p)?;
            let w = match weights {
                Some(w) => WeightVec::parse(w)?,
                None => WeightVec::new(c.t().iter().map(|x| BigRational::from_integer(x.clone().into())).collect())?,
            };
            let (x, proven, nodes) = match inner_max {
                Some(text) => {
                    let x = parse_rational(text)
                        .ok_or_else(|| CliError::usage(format!("cannot parse inner maximum `{text}`")))?;
                    (x, true, None)
                }
                None => {
                    let r = inner_maximum(&c, &t, &w, opts)?;
                    (r.value, r.proven_optimal, Some(r.nodes_explored))
                }
            };
            let b = lemma_bound(&c, &w, &x)?;
            let mut out = covering_summary(&c);
            out["inner_max"] = rational_string(&x).into();
            out["bound"] = rational_string(&b.bound).into();
            out["normalized_weights"] = strings(b.normalized.as_slice().iter().map(rational_string));
            out["proven_optimal"] = proven.into();
            if let Some(nodes) = nodes {
                out["nodes_explored"] = s(nodes);
            }
            Ok(Done { result: out, exit_code: exit_for(proven) })
        }
    }
}

//! Canonical JSON documents for every artifact the pipeline produces or
//! consumes.
//!
//! One envelope, six payload kinds. Saving always emits the canonical form:
//! keys sorted, item arrays sorted, fractions reduced, compact separators,
//! one trailing newline — byte-identical across runs. Loading re-validates
//! semantics by routing everything through the public constructors, and
//! every error names the offending field by its `$.path`.
//!
//! Exact numbers survive the trip: naturals are JSON integers, fractions
//! are `{"num","den"}` decimal strings, and unbounded naturals (witness
//! multipliers) are decimal strings.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::games::{GameKind, GameTranscript};
use crate::items::ItemSet;
use crate::matroid::{verify_axioms, Matroid};
use crate::reduction::{CompatibilityWitness, Construction, Provenance, SadpInstance};
use crate::solvers::{Menu, MenuEntry};
use crate::transforms;
use crate::valuation::{Cnf, TypeDistribution, Valuation};
use crate::{Rational, DEFAULT_ENUM_CAP};

/// Envelope version tag; bump on breaking layout changes.
pub const SCHEMA_VERSION: &str = "mdd/1";

/// A tagged artifact: the unit of all file I/O.
#[derive(Clone, Debug)]
pub enum InstanceDocument {
    Valuation(Valuation),
    Distribution(TypeDistribution),
    SadpInstance(SadpInstance),
    Menu(Menu),
    Witness(CompatibilityWitness),
    Transcript(GameTranscript),
}

impl InstanceDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceDocument::Valuation(_) => "valuation",
            InstanceDocument::Distribution(_) => "distribution",
            InstanceDocument::SadpInstance(_) => "sadp-instance",
            InstanceDocument::Menu(_) => "menu",
            InstanceDocument::Witness(_) => "witness",
            InstanceDocument::Transcript(_) => "transcript",
        }
    }

    pub fn into_valuation(self) -> Result<Valuation> {
        match self {
            InstanceDocument::Valuation(v) => Ok(v),
            other => Err(wrong_kind("valuation", &other)),
        }
    }

    pub fn into_distribution(self) -> Result<TypeDistribution> {
        match self {
            InstanceDocument::Distribution(d) => Ok(d),
            other => Err(wrong_kind("distribution", &other)),
        }
    }

    pub fn into_sadp_instance(self) -> Result<SadpInstance> {
        match self {
            InstanceDocument::SadpInstance(i) => Ok(i),
            other => Err(wrong_kind("sadp-instance", &other)),
        }
    }

    pub fn into_menu(self) -> Result<Menu> {
        match self {
            InstanceDocument::Menu(m) => Ok(m),
            other => Err(wrong_kind("menu", &other)),
        }
    }

    pub fn into_witness(self) -> Result<CompatibilityWitness> {
        match self {
            InstanceDocument::Witness(w) => Ok(w),
            other => Err(wrong_kind("witness", &other)),
        }
    }

    pub fn into_transcript(self) -> Result<GameTranscript> {
        match self {
            InstanceDocument::Transcript(t) => Ok(t),
            other => Err(wrong_kind("transcript", &other)),
        }
    }
}

fn wrong_kind(expected: &str, got: &InstanceDocument) -> Error {
    Error::invalid(format!(
        "expected a {expected} document, found {}",
        got.kind()
    ))
}

/// Serializes to canonical bytes. Infallible: every in-memory document has a
/// canonical form.
pub fn save_document(doc: &InstanceDocument) -> Vec<u8> {
    let payload = match doc {
        InstanceDocument::Valuation(v) => valuation_value(v),
        InstanceDocument::Distribution(d) => distribution_value(d),
        InstanceDocument::SadpInstance(i) => instance_value(i),
        InstanceDocument::Menu(m) => menu_value(m),
        InstanceDocument::Witness(w) => witness_value(w),
        InstanceDocument::Transcript(t) => transcript_value(t),
    };
    let envelope = json!({
        "kind": doc.kind(),
        "payload": payload,
        "schema": SCHEMA_VERSION,
    });
    let mut bytes = serde_json::to_vec(&envelope).expect("JSON serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

/// Parses and semantically re-validates a document.
pub fn load_document(bytes: &[u8]) -> Result<InstanceDocument> {
    let text = std::str::from_utf8(bytes).map_err(|e| err("$", format!("not UTF-8: {e}")))?;
    let root: Value =
        serde_json::from_str(text).map_err(|e| err("$", format!("invalid JSON: {e}")))?;
    let map = as_object(&root, "$")?;
    for key in map.keys() {
        if key != "kind" && key != "payload" && key != "schema" {
            return Err(err("$", format!("unexpected envelope field {key:?}")));
        }
    }
    let schema = as_str(get(map, "schema", "$")?, "$.schema")?;
    if schema != SCHEMA_VERSION {
        return Err(err(
            "$.schema",
            format!("unsupported schema {schema:?}, expected {SCHEMA_VERSION:?}"),
        ));
    }
    let kind = as_str(get(map, "kind", "$")?, "$.kind")?;
    let payload = get(map, "payload", "$")?;
    let path = "$.payload";
    match kind {
        "valuation" => Ok(InstanceDocument::Valuation(parse_valuation(payload, path)?)),
        "distribution" => Ok(InstanceDocument::Distribution(parse_distribution(
            payload, path,
        )?)),
        "sadp-instance" => Ok(InstanceDocument::SadpInstance(parse_instance(
            payload, path,
        )?)),
        "menu" => Ok(InstanceDocument::Menu(parse_menu(payload, path)?)),
        "witness" => Ok(InstanceDocument::Witness(parse_witness(payload, path)?)),
        "transcript" => Ok(InstanceDocument::Transcript(parse_transcript(
            payload, path,
        )?)),
        other => Err(err("$.kind", format!("unknown document kind {other:?}"))),
    }
}

/// Writes canonical bytes atomically: temp file in the target directory,
/// then rename.
pub fn save_to_path(doc: &InstanceDocument, path: &Path) -> Result<()> {
    let bytes = save_document(doc);
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "document".to_string());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, &bytes).map_err(|e| Error::Io(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io(format!("renaming into {}: {e}", path.display()))
    })
}

pub fn load_from_path(path: &Path) -> Result<InstanceDocument> {
    let bytes =
        fs::read(path).map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
    load_document(&bytes)
}

// ---- serialization ----

fn rational_value(r: &Rational) -> Value {
    json!({"den": r.denom().to_string(), "num": r.numer().to_string()})
}

fn itemset_value(s: &ItemSet) -> Value {
    json!(s.members())
}

fn mask_members(mask: u64, ground: usize) -> Vec<usize> {
    (0..ground).filter(|i| mask >> i & 1 == 1).collect()
}

fn matroid_value(m: &Matroid) -> Value {
    match m {
        Matroid::ExplicitIndependent {
            ground_size,
            independent,
        } => {
            let sets: Vec<Vec<usize>> = independent
                .iter()
                .map(|&mask| mask_members(mask, *ground_size))
                .collect();
            json!({"ground_size": ground_size, "independent": sets, "type": "explicit"})
        }
        Matroid::Uniform { ground_size, rank } => {
            json!({"ground_size": ground_size, "rank": rank, "type": "uniform"})
        }
        Matroid::Partition {
            ground_size,
            blocks,
            caps,
        } => json!({"blocks": blocks, "caps": caps, "ground_size": ground_size, "type": "partition"}),
        Matroid::Truncated { y, inner } => {
            json!({"inner": matroid_value(inner), "type": "truncated", "y": y})
        }
    }
}

fn valuation_value(v: &Valuation) -> Value {
    match v {
        Valuation::Additive { weights } => json!({"type": "additive", "weights": weights}),
        Valuation::CDemand { c, weights } => {
            json!({"c": c, "type": "cdemand", "weights": weights})
        }
        Valuation::Oxs { weights } => json!({"type": "oxs", "weights": weights}),
        Valuation::MatroidBased { matroid, weights } => {
            json!({"matroid": matroid_value(matroid), "type": "matroid-based", "weights": weights})
        }
        Valuation::ExplicitTable { values, .. } => {
            json!({"type": "explicit-table", "values": values})
        }
        Valuation::SatPerturbed {
            base,
            cnf,
            num_vars,
        } => {
            json!({"base": valuation_value(base), "clauses": cnf.clauses, "num_vars": num_vars, "type": "sat-perturbed"})
        }
        Valuation::Scaled { factor, inner } => {
            json!({"factor": factor, "inner": valuation_value(inner), "type": "scaled"})
        }
        Valuation::DisjointUnion { parts } => {
            let parts: Vec<Value> = parts.iter().map(valuation_value).collect();
            json!({"parts": parts, "type": "disjoint-union"})
        }
        Valuation::ItemTruncated { y, inner } => {
            json!({"inner": valuation_value(inner), "type": "item-truncated", "y": y})
        }
        Valuation::ValueTruncated { x, inner } => {
            json!({"inner": valuation_value(inner), "type": "value-truncated", "x": x})
        }
    }
}

fn distribution_value(d: &TypeDistribution) -> Value {
    let types: Vec<Value> = d
        .entries()
        .iter()
        .map(|(v, p)| json!({"probability": rational_value(p), "valuation": valuation_value(v)}))
        .collect();
    json!({ "types": types })
}

fn construction_tag(c: Construction) -> &'static str {
    match c {
        Construction::ItemTruncation => "item-truncation",
        Construction::ValueTruncation => "value-truncation",
    }
}

fn instance_value(inst: &SadpInstance) -> Value {
    let valuations: Vec<Value> = inst.valuations().iter().map(valuation_value).collect();
    let provenance = match inst.provenance() {
        Some(p) => json!({
            "construction": construction_tag(p.construction),
            "truncation": p.truncation,
            "v": valuation_value(&p.v),
            "w": valuation_value(&p.w),
        }),
        None => Value::Null,
    };
    json!({"provenance": provenance, "valuations": valuations})
}

fn menu_value(menu: &Menu) -> Value {
    let canonical = menu.clone().canonical();
    let entries: Vec<Value> = canonical
        .entries()
        .iter()
        .map(|entry| {
            let lottery: Vec<Value> = entry
                .lottery
                .iter()
                .map(|(set, p)| json!({"probability": rational_value(p), "set": itemset_value(set)}))
                .collect();
            json!({"lottery": lottery, "price": rational_value(&entry.price)})
        })
        .collect();
    json!({"entries": entries, "ground_size": canonical.ground_size()})
}

fn witness_value(w: &CompatibilityWitness) -> Value {
    let ground = w.allocations[0].ground_size();
    let allocations: Vec<Value> = w.allocations.iter().map(itemset_value).collect();
    let multipliers: Vec<String> = w.multipliers.iter().map(|m| m.to_string()).collect();
    json!({
        "allocations": allocations,
        "c": w.c,
        "c1": w.c1.to_string(),
        "ground_size": ground,
        "multipliers": multipliers,
    })
}

fn transcript_value(t: &GameTranscript) -> Value {
    json!({
        "algorithm": t.algorithm,
        "bound": rational_value(&t.bound),
        "budget": t.budget,
        "game": t.game.to_string(),
        "hidden_ranks": t.hidden_ranks,
        "m": t.m,
        "query_counts": t.query_counts,
        "seed": t.seed,
        "successes": t.successes,
        "trials": t.trials,
        "voided": t.voided,
        "x": t.x,
    })
}

// ---- parsing ----

fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::invalid(format!("{path}: {msg}"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| err(path, "expected a string"))
}

fn as_u64(v: &Value, path: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| err(path, "expected a non-negative integer"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    usize::try_from(as_u64(v, path)?).map_err(|_| err(path, "integer too large"))
}

fn get<'a>(map: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    map.get(key)
        .ok_or_else(|| err(path, format!("missing field {key:?}")))
}

fn parse_u64_vec(v: &Value, path: &str) -> Result<Vec<u64>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_u64(x, &format!("{path}[{i}]")))
        .collect()
}

fn parse_usize_vec(v: &Value, path: &str) -> Result<Vec<usize>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_usize(x, &format!("{path}[{i}]")))
        .collect()
}

fn parse_bigint(v: &Value, path: &str) -> Result<BigInt> {
    if let Some(s) = v.as_str() {
        return BigInt::from_str(s).map_err(|_| err(path, format!("not an integer: {s:?}")));
    }
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    if let Some(u) = v.as_u64() {
        return Ok(BigInt::from(u));
    }
    Err(err(path, "expected an integer or a decimal string"))
}

fn parse_biguint(v: &Value, path: &str) -> Result<BigUint> {
    if let Some(s) = v.as_str() {
        return BigUint::from_str(s)
            .map_err(|_| err(path, format!("not a non-negative integer: {s:?}")));
    }
    if let Some(u) = v.as_u64() {
        return Ok(BigUint::from(u));
    }
    Err(err(path, "expected a non-negative integer or decimal string"))
}

fn parse_rational(v: &Value, path: &str) -> Result<Rational> {
    let map = as_object(v, path)?;
    let num = parse_bigint(get(map, "num", path)?, &format!("{path}.num"))?;
    let den = parse_bigint(get(map, "den", path)?, &format!("{path}.den"))?;
    if den.is_zero() {
        return Err(err(path, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

fn parse_itemset(v: &Value, ground: usize, path: &str) -> Result<ItemSet> {
    let members = parse_usize_vec(v, path)?;
    ItemSet::new(members, ground).map_err(|e| err(path, e))
}

fn parse_matroid(v: &Value, path: &str) -> Result<Matroid> {
    let map = as_object(v, path)?;
    let ty = as_str(get(map, "type", path)?, &format!("{path}.type"))?;
    match ty {
        "explicit" => {
            let ground = as_usize(
                get(map, "ground_size", path)?,
                &format!("{path}.ground_size"),
            )?;
            let sets_value = get(map, "independent", path)?;
            let sets_path = format!("{path}.independent");
            let sets: Vec<Vec<usize>> = as_array(sets_value, &sets_path)?
                .iter()
                .enumerate()
                .map(|(i, s)| parse_usize_vec(s, &format!("{sets_path}[{i}]")))
                .collect::<Result<_>>()?;
            let matroid = Matroid::explicit(ground, sets).map_err(|e| err(path, e))?;
            if ground <= DEFAULT_ENUM_CAP {
                let report = verify_axioms(&matroid, DEFAULT_ENUM_CAP).map_err(|e| err(path, e))?;
                if let Some(violation) = report.violation {
                    return Err(err(path, format!("matroid axioms violated: {violation:?}")));
                }
            }
            Ok(matroid)
        }
        "uniform" => {
            let ground = as_usize(
                get(map, "ground_size", path)?,
                &format!("{path}.ground_size"),
            )?;
            let rank = as_usize(get(map, "rank", path)?, &format!("{path}.rank"))?;
            Matroid::uniform(ground, rank).map_err(|e| err(path, e))
        }
        "partition" => {
            let ground = as_usize(
                get(map, "ground_size", path)?,
                &format!("{path}.ground_size"),
            )?;
            let blocks_path = format!("{path}.blocks");
            let blocks: Vec<Vec<usize>> = as_array(get(map, "blocks", path)?, &blocks_path)?
                .iter()
                .enumerate()
                .map(|(i, b)| parse_usize_vec(b, &format!("{blocks_path}[{i}]")))
                .collect::<Result<_>>()?;
            let caps = parse_usize_vec(get(map, "caps", path)?, &format!("{path}.caps"))?;
            Matroid::partition(ground, blocks, caps).map_err(|e| err(path, e))
        }
        "truncated" => {
            let y = as_usize(get(map, "y", path)?, &format!("{path}.y"))?;
            let inner = parse_matroid(get(map, "inner", path)?, &format!("{path}.inner"))?;
            Matroid::truncated(y, inner).map_err(|e| err(path, e))
        }
        other => Err(err(
            &format!("{path}.type"),
            format!("unknown matroid type {other:?}"),
        )),
    }
}

fn parse_valuation(v: &Value, path: &str) -> Result<Valuation> {
    let map = as_object(v, path)?;
    let ty = as_str(get(map, "type", path)?, &format!("{path}.type"))?;
    match ty {
        "additive" => {
            let weights = parse_u64_vec(get(map, "weights", path)?, &format!("{path}.weights"))?;
            Valuation::additive(weights).map_err(|e| err(path, e))
        }
        "cdemand" => {
            let c = as_usize(get(map, "c", path)?, &format!("{path}.c"))?;
            let weights = parse_u64_vec(get(map, "weights", path)?, &format!("{path}.weights"))?;
            Valuation::cdemand(c, weights).map_err(|e| err(path, e))
        }
        "oxs" => {
            let rows_path = format!("{path}.weights");
            let rows: Vec<Vec<u64>> = as_array(get(map, "weights", path)?, &rows_path)?
                .iter()
                .enumerate()
                .map(|(i, r)| parse_u64_vec(r, &format!("{rows_path}[{i}]")))
                .collect::<Result<_>>()?;
            Valuation::oxs(rows).map_err(|e| err(path, e))
        }
        "matroid-based" => {
            let matroid = parse_matroid(get(map, "matroid", path)?, &format!("{path}.matroid"))?;
            let weights = parse_u64_vec(get(map, "weights", path)?, &format!("{path}.weights"))?;
            Valuation::matroid_based(matroid, weights).map_err(|e| err(path, e))
        }
        "explicit-table" => {
            let values = parse_u64_vec(get(map, "values", path)?, &format!("{path}.values"))?;
            let table = Valuation::explicit_table(values).map_err(|e| err(path, e))?;
            if table.ground_size() <= DEFAULT_ENUM_CAP {
                let report = table
                    .check_properties(DEFAULT_ENUM_CAP)
                    .map_err(|e| err(path, e))?;
                if !report.normalized {
                    return Err(err(&format!("{path}.values"), "not normalized"));
                }
                if let Some(w) = report.monotone_witness {
                    return Err(err(
                        &format!("{path}.values"),
                        format!("not monotone: {} exceeds {}", w.subset, w.superset),
                    ));
                }
            }
            Ok(table)
        }
        "sat-perturbed" => {
            let base = parse_valuation(get(map, "base", path)?, &format!("{path}.base"))?;
            let num_vars = as_usize(get(map, "num_vars", path)?, &format!("{path}.num_vars"))?;
            let clauses_path = format!("{path}.clauses");
            let clauses: Vec<Vec<i32>> = as_array(get(map, "clauses", path)?, &clauses_path)?
                .iter()
                .enumerate()
                .map(|(i, clause)| {
                    let cpath = format!("{clauses_path}[{i}]");
                    as_array(clause, &cpath)?
                        .iter()
                        .enumerate()
                        .map(|(j, lit)| {
                            let lpath = format!("{cpath}[{j}]");
                            let lit = lit.as_i64().ok_or_else(|| err(&lpath, "expected an integer"))?;
                            i32::try_from(lit).map_err(|_| err(&lpath, "literal out of range"))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            let cnf = Cnf::new(clauses, num_vars).map_err(|e| err(&clauses_path, e))?;
            Valuation::sat_perturbed(base, cnf, num_vars).map_err(|e| err(path, e))
        }
        "scaled" => {
            let factor = as_u64(get(map, "factor", path)?, &format!("{path}.factor"))?;
            let inner = parse_valuation(get(map, "inner", path)?, &format!("{path}.inner"))?;
            transforms::scale(inner, factor).map_err(|e| err(path, e))
        }
        "disjoint-union" => {
            let parts_path = format!("{path}.parts");
            let parts: Vec<Valuation> = as_array(get(map, "parts", path)?, &parts_path)?
                .iter()
                .enumerate()
                .map(|(i, p)| parse_valuation(p, &format!("{parts_path}[{i}]")))
                .collect::<Result<_>>()?;
            transforms::disjoint_union(parts).map_err(|e| err(path, e))
        }
        "item-truncated" => {
            let y = as_usize(get(map, "y", path)?, &format!("{path}.y"))?;
            let inner = parse_valuation(get(map, "inner", path)?, &format!("{path}.inner"))?;
            transforms::item_truncate(inner, y).map_err(|e| err(path, e))
        }
        "value-truncated" => {
            let x = as_u64(get(map, "x", path)?, &format!("{path}.x"))?;
            let inner = parse_valuation(get(map, "inner", path)?, &format!("{path}.inner"))?;
            transforms::value_truncate(inner, x).map_err(|e| err(path, e))
        }
        other => Err(err(
            &format!("{path}.type"),
            format!("unknown valuation type {other:?}"),
        )),
    }
}

fn parse_distribution(v: &Value, path: &str) -> Result<TypeDistribution> {
    let map = as_object(v, path)?;
    let types_path = format!("{path}.types");
    let entries: Vec<(Valuation, Rational)> = as_array(get(map, "types", path)?, &types_path)?
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let epath = format!("{types_path}[{i}]");
            let emap = as_object(entry, &epath)?;
            let valuation = parse_valuation(
                get(emap, "valuation", &epath)?,
                &format!("{epath}.valuation"),
            )?;
            let probability = parse_rational(
                get(emap, "probability", &epath)?,
                &format!("{epath}.probability"),
            )?;
            Ok((valuation, probability))
        })
        .collect::<Result<_>>()?;
    TypeDistribution::new(entries).map_err(|e| err(&types_path, e))
}

fn parse_construction(v: &Value, path: &str) -> Result<Construction> {
    match as_str(v, path)? {
        "item-truncation" => Ok(Construction::ItemTruncation),
        "value-truncation" => Ok(Construction::ValueTruncation),
        other => Err(err(path, format!("unknown construction {other:?}"))),
    }
}

fn parse_instance(v: &Value, path: &str) -> Result<SadpInstance> {
    let map = as_object(v, path)?;
    let vals_path = format!("{path}.valuations");
    let valuations: Vec<Valuation> = as_array(get(map, "valuations", path)?, &vals_path)?
        .iter()
        .enumerate()
        .map(|(i, v)| parse_valuation(v, &format!("{vals_path}[{i}]")))
        .collect::<Result<_>>()?;
    let prov_value = get(map, "provenance", path)?;
    if prov_value.is_null() {
        return SadpInstance::new(valuations).map_err(|e| err(path, e));
    }
    let ppath = format!("{path}.provenance");
    let pmap = as_object(prov_value, &ppath)?;
    let construction = parse_construction(
        get(pmap, "construction", &ppath)?,
        &format!("{ppath}.construction"),
    )?;
    let truncation = as_u64(
        get(pmap, "truncation", &ppath)?,
        &format!("{ppath}.truncation"),
    )?;
    let v = parse_valuation(get(pmap, "v", &ppath)?, &format!("{ppath}.v"))?;
    let w = parse_valuation(get(pmap, "w", &ppath)?, &format!("{ppath}.w"))?;
    SadpInstance::with_provenance(
        valuations,
        Provenance {
            v,
            w,
            construction,
            truncation,
        },
    )
    .map_err(|e| err(path, e))
}

fn parse_menu(v: &Value, path: &str) -> Result<Menu> {
    let map = as_object(v, path)?;
    let ground = as_usize(
        get(map, "ground_size", path)?,
        &format!("{path}.ground_size"),
    )?;
    let entries_path = format!("{path}.entries");
    let entries: Vec<MenuEntry> = as_array(get(map, "entries", path)?, &entries_path)?
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let epath = format!("{entries_path}[{i}]");
            let emap = as_object(entry, &epath)?;
            let lottery_path = format!("{epath}.lottery");
            let lottery: Vec<(ItemSet, Rational)> =
                as_array(get(emap, "lottery", &epath)?, &lottery_path)?
                    .iter()
                    .enumerate()
                    .map(|(j, outcome)| {
                        let opath = format!("{lottery_path}[{j}]");
                        let omap = as_object(outcome, &opath)?;
                        let set =
                            parse_itemset(get(omap, "set", &opath)?, ground, &format!("{opath}.set"))?;
                        let probability = parse_rational(
                            get(omap, "probability", &opath)?,
                            &format!("{opath}.probability"),
                        )?;
                        Ok((set, probability))
                    })
                    .collect::<Result<_>>()?;
            let price = parse_rational(get(emap, "price", &epath)?, &format!("{epath}.price"))?;
            Ok(MenuEntry { lottery, price })
        })
        .collect::<Result<_>>()?;
    Menu::new(ground, entries).map_err(|e| err(path, e))
}

fn parse_witness(v: &Value, path: &str) -> Result<CompatibilityWitness> {
    let map = as_object(v, path)?;
    let ground = as_usize(
        get(map, "ground_size", path)?,
        &format!("{path}.ground_size"),
    )?;
    let allocs_path = format!("{path}.allocations");
    let allocations: Vec<ItemSet> = as_array(get(map, "allocations", path)?, &allocs_path)?
        .iter()
        .enumerate()
        .map(|(i, a)| parse_itemset(a, ground, &format!("{allocs_path}[{i}]")))
        .collect::<Result<_>>()?;
    let mults_path = format!("{path}.multipliers");
    let multipliers: Vec<BigUint> = as_array(get(map, "multipliers", path)?, &mults_path)?
        .iter()
        .enumerate()
        .map(|(i, m)| parse_biguint(m, &format!("{mults_path}[{i}]")))
        .collect::<Result<_>>()?;
    let c = as_u64(get(map, "c", path)?, &format!("{path}.c"))?;
    let c1 = parse_biguint(get(map, "c1", path)?, &format!("{path}.c1"))?;
    CompatibilityWitness::new(allocations, multipliers, c, c1).map_err(|e| err(path, e))
}

fn parse_game_kind(v: &Value, path: &str) -> Result<GameKind> {
    match as_str(v, path)? {
        "value" => Ok(GameKind::Value),
        "demand" => Ok(GameKind::Demand),
        other => Err(err(path, format!("unknown game kind {other:?}"))),
    }
}

fn parse_transcript(v: &Value, path: &str) -> Result<GameTranscript> {
    let map = as_object(v, path)?;
    let game = parse_game_kind(get(map, "game", path)?, &format!("{path}.game"))?;
    let algorithm = as_str(get(map, "algorithm", path)?, &format!("{path}.algorithm"))?.to_string();
    let m = as_usize(get(map, "m", path)?, &format!("{path}.m"))?;
    let x = as_u64(get(map, "x", path)?, &format!("{path}.x"))?;
    let budget = as_usize(get(map, "budget", path)?, &format!("{path}.budget"))?;
    let trials = as_usize(get(map, "trials", path)?, &format!("{path}.trials"))?;
    let successes = as_usize(get(map, "successes", path)?, &format!("{path}.successes"))?;
    let voided = as_usize(get(map, "voided", path)?, &format!("{path}.voided"))?;
    let query_counts = parse_u64_vec(
        get(map, "query_counts", path)?,
        &format!("{path}.query_counts"),
    )?
    .into_iter()
    .map(|c| c as usize)
    .collect::<Vec<_>>();
    let hidden_ranks = parse_u64_vec(
        get(map, "hidden_ranks", path)?,
        &format!("{path}.hidden_ranks"),
    )?;
    let seed = as_u64(get(map, "seed", path)?, &format!("{path}.seed"))?;
    let bound = parse_rational(get(map, "bound", path)?, &format!("{path}.bound"))?;
    if successes > trials {
        return Err(err(
            &format!("{path}.successes"),
            "successes exceed trials",
        ));
    }
    if query_counts.len() != trials || hidden_ranks.len() != trials {
        return Err(err(path, "per-trial arrays must have one entry per trial"));
    }
    if let Some(bad) = query_counts.iter().position(|&c| c > budget) {
        return Err(err(
            &format!("{path}.query_counts[{bad}]"),
            "query count exceeds the budget",
        ));
    }
    if let Some(bad) = hidden_ranks.iter().position(|&r| r < 1 || r > x) {
        return Err(err(
            &format!("{path}.hidden_ranks[{bad}]"),
            "rank outside 1..=x",
        ));
    }
    Ok(GameTranscript {
        game,
        algorithm,
        m,
        x,
        budget,
        trials,
        successes,
        voided,
        query_counts,
        hidden_ranks,
        seed,
        bound,
    })
}

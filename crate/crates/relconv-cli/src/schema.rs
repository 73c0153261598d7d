//! The JSON definition-file format.
//!
//! A definition file names the carrier elements and gives the structure
//! either as explicit relation triples (`L` plus the involution `I`) or as
//! a group multiplication table with a normal subgroup (`group`), from
//! which `L` and `I` are derived. Optional sections attach a relational
//! Haar system (`haar`) and named algebra elements (`functions`).
//!
//! All weights and coefficients are exact fraction strings such as
//! `"1/8"` or `"-3"`; floating point never enters a definition file.
//! Unknown keys are rejected. [`canonical`] re-serializes a parsed file
//! with sorted map keys and reduced fractions, and is idempotent.

use std::collections::BTreeMap;

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use relconv_core::haar::{Measure, RelationalHaarSystem};
use relconv_core::scalar::fmt_crat;
use relconv_core::{CRat, FiniteSet, GroupoidTable, Rat, Relation, RelationalGroupoid};

/// Errors surfaced while reading a definition file. Every variant maps to
/// exit code 2: the input, not the mathematics, is at fault.
#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> SchemaError {
    SchemaError::Invalid(msg.into())
}

/// The raw document, mirroring the JSON layout one-to-one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefinitionFile {
    /// Element labels, in index order.
    pub carrier: Vec<String>,
    /// Structure relation as label triples.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<[String; 3]>>,
    /// Alternative structure source: group table plus normal subgroup.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSection>,
    /// Involution as label pairs; required with `L`, derived with `group`.
    #[serde(rename = "I", default, skip_serializing_if = "Option::is_none")]
    pub i: Option<Vec<[String; 2]>>,
    /// Per-element fiber measures: `g -> [[h, k, weight], ...]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<BTreeMap<String, Vec<[String; 3]>>>,
    /// Named algebra elements: `name -> label -> [re, im]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<BTreeMap<String, BTreeMap<String, [String; 2]>>>,
}

/// A one-object group given by its multiplication table (row `a`, column
/// `b` holds the label of `a·b`, rows and columns in carrier order) and
/// the labels of a normal subgroup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub table: Vec<Vec<String>>,
    pub subgroup: Vec<String>,
}

/// A definition file resolved against the library types.
#[derive(Debug)]
pub struct ResolvedFile {
    pub groupoid: RelationalGroupoid,
    /// Present when the file used the `group` form; kept so canonical
    /// serialization preserves the input's structure source.
    pub group_form: Option<(GroupoidTable, Vec<usize>)>,
    pub haar: Option<RelationalHaarSystem>,
    pub functions: BTreeMap<String, Vec<CRat>>,
}

/// Parses an exact fraction string: an optional sign, an integer, and an
/// optional `/denominator`. Zero denominators are rejected.
pub fn parse_fraction(text: &str, context: &str) -> Result<Rat, SchemaError> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let bad = || invalid(format!("{context}: bad fraction `{text}`"));
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(invalid(format!(
            "{context}: bad fraction `{text}` (zero denominator)"
        )));
    }
    Ok(Rat::new(num, den))
}

/// Parses the JSON text of a definition file.
pub fn parse(text: &str) -> Result<DefinitionFile, SchemaError> {
    serde_json::from_str(text).map_err(|e| SchemaError::Json {
        line: e.line(),
        column: e.column(),
        message: {
            // serde_json appends its own position; strip it since we
            // report line/column structurally.
            let full = e.to_string();
            match full.find(" at line ") {
                Some(pos) => full[..pos].to_string(),
                None => full,
            }
        },
    })
}

/// Resolves labels against the carrier and builds the library objects.
/// Structural axiom violations are *not* errors here: `check` must be able
/// to load a broken structure and report the failing axiom.
pub fn resolve(def: &DefinitionFile) -> Result<ResolvedFile, SchemaError> {
    let carrier = FiniteSet::new(def.carrier.iter().cloned())
        .map_err(|e| invalid(format!("carrier: {e}")))?;
    let look = |label: &str, context: &str| {
        carrier
            .index_of(label)
            .ok_or_else(|| invalid(format!("{context}: unknown label `{label}`")))
    };

    let (groupoid, group_form) = match (&def.l, &def.group, &def.i) {
        (Some(_), Some(_), _) => {
            return Err(invalid("give exactly one of `L` and `group`, not both"))
        }
        (None, None, _) => return Err(invalid("give exactly one of `L` and `group`")),
        (Some(_), None, None) => {
            return Err(invalid("the `L` form requires an involution section `I`"))
        }
        (None, Some(_), Some(_)) => {
            return Err(invalid(
                "`I` may not be given with `group`; the involution is the group inverse",
            ))
        }
        (Some(l), None, Some(i)) => {
            let mut tuples = Vec::with_capacity(l.len());
            for (pos, [a, b, c]) in l.iter().enumerate() {
                let ctx = format!("L[{pos}]");
                tuples.push(vec![look(a, &ctx)?, look(b, &ctx)?, look(c, &ctx)?]);
            }
            let rel = Relation::from_tuples(
                vec![carrier.clone(), carrier.clone()],
                vec![carrier.clone()],
                tuples,
            )
            .map_err(|e| invalid(format!("L: {e}")))?;
            let mut inv: Vec<Option<usize>> = vec![None; carrier.len()];
            for (pos, [from, to]) in i.iter().enumerate() {
                let ctx = format!("I[{pos}]");
                let f = look(from, &ctx)?;
                if inv[f].replace(look(to, &ctx)?).is_some() {
                    return Err(invalid(format!("{ctx}: label `{from}` mapped twice")));
                }
            }
            let inv: Vec<usize> = inv
                .into_iter()
                .enumerate()
                .map(|(e, v)| {
                    v.ok_or_else(|| {
                        invalid(format!("I: no image for label `{}`", carrier.label(e)))
                    })
                })
                .collect::<Result<_, _>>()?;
            let g = RelationalGroupoid::new_unchecked(carrier.clone(), rel, inv)
                .map_err(|e| invalid(format!("structure: {e}")))?;
            (g, None)
        }
        (None, Some(section), None) => {
            let n = carrier.len();
            if section.table.len() != n || section.table.iter().any(|row| row.len() != n) {
                return Err(invalid(format!(
                    "group.table must be {n}x{n} to match the carrier"
                )));
            }
            let mut table = vec![vec![0usize; n]; n];
            for (a, row) in section.table.iter().enumerate() {
                for (b, label) in row.iter().enumerate() {
                    table[a][b] = look(label, &format!("group.table[{a}][{b}]"))?;
                }
            }
            let group = GroupoidTable::one_object_group(carrier.clone(), &table)
                .map_err(|e| invalid(format!("group.table: {e}")))?;
            let subgroup: Vec<usize> = section
                .subgroup
                .iter()
                .map(|label| look(label, "group.subgroup"))
                .collect::<Result<_, _>>()?;
            let g = RelationalGroupoid::from_group_and_normal_subgroup(&group, &subgroup)
                .map_err(|e| invalid(format!("group: {e}")))?;
            (g, Some((group, subgroup)))
        }
    };

    let haar = match &def.haar {
        None => None,
        Some(map) => {
            let mut measures = vec![Measure::zero(); groupoid.len()];
            for (base_label, entries) in map {
                let base = look(base_label, "haar")?;
                let mut weights = Vec::with_capacity(entries.len());
                for (pos, [h, k, w]) in entries.iter().enumerate() {
                    let ctx = format!("haar.{base_label}[{pos}]");
                    weights.push((
                        (look(h, &ctx)?, look(k, &ctx)?),
                        parse_fraction(w, &ctx)?,
                    ));
                }
                measures[base] = Measure::from_weights(weights)
                    .map_err(|e| invalid(format!("haar.{base_label}: {e}")))?;
            }
            let sys = RelationalHaarSystem::new(&groupoid, measures)
                .map_err(|e| invalid(format!("haar: {e}")))?;
            Some(sys)
        }
    };

    let mut functions = BTreeMap::new();
    if let Some(map) = &def.functions {
        for (name, values) in map {
            let mut f = vec![CRat::zero(); groupoid.len()];
            for (label, [re, im]) in values {
                let ctx = format!("functions.{name}.{label}");
                let e = look(label, &ctx)?;
                f[e] = CRat::new(parse_fraction(re, &ctx)?, parse_fraction(im, &ctx)?);
            }
            functions.insert(name.clone(), f);
        }
    }

    Ok(ResolvedFile { groupoid, group_form, haar, functions })
}

/// Reads and resolves a definition file from disk.
pub fn load(path: &std::path::Path) -> Result<(DefinitionFile, ResolvedFile), SchemaError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let def = parse(&text)?;
    let resolved = resolve(&def)?;
    Ok((def, resolved))
}

fn fraction_string(r: &Rat) -> String {
    r.to_string()
}

/// Rebuilds a definition document from resolved data: labels in carrier
/// order, map keys sorted, fractions reduced, zero entries dropped.
pub fn to_definition(r: &ResolvedFile) -> DefinitionFile {
    let carrier = r.groupoid.carrier();
    let labels: Vec<String> = carrier.labels().to_vec();
    let label = |i: usize| carrier.label(i).to_string();

    let (l, group, i) = match &r.group_form {
        Some((table, subgroup)) => {
            let n = carrier.len();
            let rows = (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| label(table.compose(a, b).expect("group elements compose")))
                        .collect()
                })
                .collect();
            let mut sub: Vec<usize> = subgroup.clone();
            sub.sort_unstable();
            sub.dedup();
            let section = GroupSection {
                table: rows,
                subgroup: sub.into_iter().map(label).collect(),
            };
            (None, Some(section), None)
        }
        None => {
            let triples = r
                .groupoid
                .structure()
                .tuples()
                .map(|t| [label(t[0]), label(t[1]), label(t[2])])
                .collect();
            let pairs = r
                .groupoid
                .involution()
                .iter()
                .enumerate()
                .map(|(e, &v)| [label(e), label(v)])
                .collect();
            (Some(triples), None, Some(pairs))
        }
    };

    let haar = r.haar.as_ref().map(|sys| {
        (0..r.groupoid.len())
            .filter(|&g| !sys.measure(g).is_zero())
            .map(|g| {
                let entries = sys
                    .measure(g)
                    .support()
                    .map(|(&(h, k), w)| [label(h), label(k), fraction_string(w)])
                    .collect();
                (label(g), entries)
            })
            .collect()
    });

    let functions = if r.functions.is_empty() {
        None
    } else {
        Some(
            r.functions
                .iter()
                .map(|(name, f)| {
                    let values = f
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(e, v)| {
                            (label(e), [fraction_string(&v.re), fraction_string(&v.im)])
                        })
                        .collect();
                    (name.clone(), values)
                })
                .collect(),
        )
    };

    DefinitionFile { carrier: labels, l, group, i, haar, functions }
}

/// Canonical serialization: parse → resolve → re-serialize. Idempotent,
/// key-sorted, fractions reduced.
pub fn canonical(text: &str) -> Result<String, SchemaError> {
    let def = parse(text)?;
    let resolved = resolve(&def)?;
    let out = to_definition(&resolved);
    let mut s = serde_json::to_string_pretty(&out).expect("definition files serialize");
    s.push('\n');
    Ok(s)
}

/// Renders a complex rational for reports: `1/8`, `1/2-1/3i`, `0`.
pub fn value_string(v: &CRat) -> String {
    fmt_crat(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "carrier": ["e", "g"],
        "L": [["e","e","e"], ["e","g","g"], ["g","e","g"], ["g","g","e"]],
        "I": [["e","e"], ["g","g"]],
        "haar": {
            "e": [["e","e","2/4"], ["g","g","1/2"]],
            "g": [["e","g","1/2"], ["g","e","1/2"]]
        },
        "functions": {"d0": {"e": ["1", "0"]}, "zero": {}}
    }"#;

    #[test]
    fn fractions_reduce_and_reject_zero_denominators() {
        assert_eq!(parse_fraction("2/4", "t").unwrap(), relconv_core::scalar::rat(1, 2));
        assert_eq!(parse_fraction("-3", "t").unwrap(), relconv_core::scalar::rat(-3, 1));
        assert!(parse_fraction("1/0", "t").is_err());
        assert!(parse_fraction("a/b", "t").is_err());
    }

    #[test]
    fn canonical_serialization_is_idempotent_and_reduces() {
        let once = canonical(MINIMAL).unwrap();
        assert!(once.contains("\"1/2\""), "2/4 should reduce: {once}");
        assert!(!once.contains("2/4"));
        let twice = canonical(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn unknown_keys_and_missing_sections_are_rejected() {
        assert!(matches!(
            parse(r#"{"carrier": [], "extra": 1}"#),
            Err(SchemaError::Json { .. })
        ));
        let no_struct = parse(r#"{"carrier": ["e"]}"#).unwrap();
        assert!(resolve(&no_struct).is_err());
        let both = parse(
            r#"{"carrier": ["e"], "L": [], "I": [["e","e"]],
                "group": {"table": [["e"]], "subgroup": ["e"]}}"#,
        )
        .unwrap();
        assert!(resolve(&both).is_err());
    }

    #[test]
    fn group_form_round_trips_through_group_section() {
        let text = r#"{
            "carrier": ["0", "1", "2", "3"],
            "group": {
                "table": [["0","1","2","3"],["1","2","3","0"],["2","3","0","1"],["3","0","1","2"]],
                "subgroup": ["0", "2"]
            }
        }"#;
        let out = canonical(text).unwrap();
        assert!(out.contains("\"group\""));
        assert!(!out.contains("\"L\""));
        let (_, resolved) = (parse(&out).unwrap(), resolve(&parse(&out).unwrap()).unwrap());
        assert_eq!(resolved.groupoid.len(), 4);
        assert!(resolved.groupoid.check_axioms().all_passed());
    }

    #[test]
    fn labels_resolve_or_error_with_context() {
        let bad = parse(
            r#"{"carrier": ["e"], "L": [["e","e","x"]], "I": [["e","e"]]}"#,
        )
        .unwrap();
        let err = resolve(&bad).unwrap_err();
        assert!(err.to_string().contains("L[0]"), "{err}");
        assert!(err.to_string().contains('x'), "{err}");
    }
}

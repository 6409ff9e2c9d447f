//! JSON input and output: model files naming groups, subgroups, SFTs and
//! homomorphisms, plus the self-contained serializations used for
//! certificates and digests.
//!
//! Elements are written per backend: integers (or arrays) for Z^d, words
//! like "abA" for free groups, element names for finite groups, and
//! three-entry arrays for the Heisenberg group. serde_json's map keeps keys
//! sorted, so every serialization here is byte deterministic.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::coset::{CosetTable, SubgroupEmbedding};
use crate::error::{Error, Result};
use crate::group::{Backend, FiniteGroup, GroupContext, GroupElement};
use crate::hom::Homomorphism;
use crate::shift::{Alphabet, Pattern, PartialConfiguration, PeriodicConfiguration, SftDescription};
use crate::solvers::{Certificate, CertificateBody, Provenance};

fn obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::InvalidModel(format!("{what} must be an object")))
}

fn field<'a>(o: &'a Map<String, Value>, k: &str, what: &str) -> Result<&'a Value> {
    o.get(k).ok_or_else(|| Error::InvalidModel(format!("{what} is missing field {k:?}")))
}

fn str_field<'a>(o: &'a Map<String, Value>, k: &str, what: &str) -> Result<&'a str> {
    field(o, k, what)?
        .as_str()
        .ok_or_else(|| Error::InvalidModel(format!("field {k:?} of {what} must be a string")))
}

fn arr_field<'a>(o: &'a Map<String, Value>, k: &str, what: &str) -> Result<&'a Vec<Value>> {
    field(o, k, what)?
        .as_array()
        .ok_or_else(|| Error::InvalidModel(format!("field {k:?} of {what} must be an array")))
}

fn int_from(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::InvalidModel(format!("{what} must be an integer")))
}

pub fn element_to_json(ctx: &GroupContext, g: &GroupElement) -> Value {
    match g {
        GroupElement::Vector(v) => {
            if v.len() == 1 {
                json!(v[0])
            } else {
                json!(v)
            }
        }
        GroupElement::Word(_) | GroupElement::Index(_) => json!(ctx.render(g)),
        GroupElement::Triple(t) => json!(t.to_vec()),
    }
}

pub fn element_from_json(ctx: &GroupContext, v: &Value) -> Result<GroupElement> {
    let g = match (ctx.backend(), v) {
        (Backend::FreeAbelian { rank }, Value::Number(_)) if *rank == 1 => {
            GroupElement::Vector(vec![int_from(v, "element")?])
        }
        (Backend::FreeAbelian { .. }, Value::Array(items)) => GroupElement::Vector(
            items.iter().map(|x| int_from(x, "coordinate")).collect::<Result<_>>()?,
        ),
        (Backend::FreeGroup { .. }, Value::String(s)) => ctx.parse(s)?,
        (Backend::Finite(_), Value::String(s)) => ctx.parse(s)?,
        (Backend::Heisenberg, Value::Array(items)) => {
            if items.len() != 3 {
                return Err(Error::InvalidModel("Heisenberg element needs 3 coordinates".into()));
            }
            GroupElement::Triple([
                int_from(&items[0], "coordinate")?,
                int_from(&items[1], "coordinate")?,
                int_from(&items[2], "coordinate")?,
            ])
        }
        _ => {
            return Err(Error::InvalidModel(format!(
                "element {v} does not fit the backend of {}",
                ctx.name()
            )))
        }
    };
    ctx.validate_elem(&g)?;
    Ok(g)
}

/// Backend structure without the context name; used inline in files and as
/// the group part of digests.
pub fn group_to_json(ctx: &GroupContext) -> Value {
    match ctx.backend() {
        Backend::FreeAbelian { rank } => json!({"backend": "free-abelian", "rank": rank}),
        Backend::FreeGroup { rank } => json!({"backend": "free-group", "rank": rank}),
        Backend::Finite(fin) => json!({
            "backend": "finite",
            "elements": fin.names(),
            "table": fin.table(),
            "generators": fin.generator_indices().iter().map(|&g| fin.names()[g].clone()).collect::<Vec<_>>(),
        }),
        Backend::Heisenberg => json!({"backend": "heisenberg"}),
    }
}

pub fn group_from_json(name: &str, v: &Value) -> Result<GroupContext> {
    let o = obj(v, "group")?;
    match str_field(o, "backend", "group")? {
        "free-abelian" => {
            let rank = field(o, "rank", "group")?
                .as_u64()
                .ok_or_else(|| Error::InvalidModel("rank must be a positive integer".into()))?;
            GroupContext::free_abelian(name, rank as usize)
        }
        "free-group" => {
            let rank = field(o, "rank", "group")?
                .as_u64()
                .ok_or_else(|| Error::InvalidModel("rank must be a positive integer".into()))?;
            GroupContext::free_group(name, rank as usize)
        }
        "finite" => {
            let names: Vec<String> = arr_field(o, "elements", "group")?
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(String::from)
                        .ok_or_else(|| Error::InvalidModel("element names must be strings".into()))
                })
                .collect::<Result<_>>()?;
            let table: Vec<Vec<usize>> = arr_field(o, "table", "group")?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| Error::InvalidModel("table rows must be arrays".into()))?
                        .iter()
                        .map(|x| {
                            x.as_u64()
                                .map(|u| u as usize)
                                .ok_or_else(|| Error::InvalidModel("table entries must be indices".into()))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            let generators: Vec<usize> = arr_field(o, "generators", "group")?
                .iter()
                .map(|x| {
                    let s = x
                        .as_str()
                        .ok_or_else(|| Error::InvalidModel("generators must be element names".into()))?;
                    names
                        .iter()
                        .position(|n| n == s)
                        .ok_or_else(|| Error::InvalidModel(format!("unknown generator {s:?}")))
                })
                .collect::<Result<_>>()?;
            Ok(GroupContext::finite(name, FiniteGroup::new(names, table, generators)?))
        }
        "heisenberg" => Ok(GroupContext::heisenberg(name)),
        other => Err(Error::InvalidModel(format!("unknown backend {other:?}"))),
    }
}

pub fn pattern_to_json(ctx: &GroupContext, alphabet: &Alphabet, p: &Pattern) -> Value {
    json!({
        "support": p.support().iter().map(|g| element_to_json(ctx, g)).collect::<Vec<_>>(),
        "letters": p.letters().iter().map(|&l| alphabet.name(l)).collect::<Vec<_>>(),
    })
}

pub fn pattern_from_json(ctx: &GroupContext, alphabet: &Alphabet, v: &Value) -> Result<Pattern> {
    let o = obj(v, "pattern")?;
    let support: Vec<GroupElement> = arr_field(o, "support", "pattern")?
        .iter()
        .map(|x| element_from_json(ctx, x))
        .collect::<Result<_>>()?;
    let letters: Vec<u32> = arr_field(o, "letters", "pattern")?
        .iter()
        .map(|x| {
            let s = x
                .as_str()
                .ok_or_else(|| Error::InvalidModel("letters must be strings".into()))?;
            alphabet
                .id(s)
                .ok_or_else(|| Error::InvalidModel(format!("unknown letter {s:?}")))
        })
        .collect::<Result<_>>()?;
    Pattern::new(ctx, support, letters)
}

/// Canonical JSON of an SFT description (group structure, alphabet,
/// canonical forbidden list); input of the digest.
pub fn sft_to_canonical_json(sft: &SftDescription) -> String {
    let v = json!({
        "group": group_to_json(sft.group()),
        "alphabet": sft.alphabet().letters(),
        "forbidden": sft
            .forbidden()
            .iter()
            .map(|p| pattern_to_json(sft.group(), sft.alphabet(), p))
            .collect::<Vec<_>>(),
    });
    v.to_string()
}

/// SFT serialization with the group inline, reloadable on its own.
pub fn sft_to_json(sft: &SftDescription) -> Value {
    json!({
        "group": group_to_json(sft.group()),
        "alphabet": sft.alphabet().letters(),
        "forbidden": sft
            .forbidden()
            .iter()
            .map(|p| pattern_to_json(sft.group(), sft.alphabet(), p))
            .collect::<Vec<_>>(),
    })
}

fn resolve_group(
    v: &Value,
    groups: &BTreeMap<String, Arc<GroupContext>>,
    what: &str,
) -> Result<Arc<GroupContext>> {
    match v {
        Value::String(name) => groups
            .get(name)
            .cloned()
            .ok_or_else(|| Error::InvalidModel(format!("{what} references unknown group {name:?}"))),
        Value::Object(_) => Ok(Arc::new(group_from_json("inline", v)?)),
        _ => Err(Error::InvalidModel(format!("{what} group must be a name or an inline object"))),
    }
}

pub fn sft_from_json(v: &Value, groups: &BTreeMap<String, Arc<GroupContext>>) -> Result<SftDescription> {
    let o = obj(v, "sft")?;
    let group = resolve_group(field(o, "group", "sft")?, groups, "sft")?;
    let alphabet = Alphabet::new(
        arr_field(o, "alphabet", "sft")?
            .iter()
            .map(|x| {
                x.as_str()
                    .map(String::from)
                    .ok_or_else(|| Error::InvalidModel("alphabet letters must be strings".into()))
            })
            .collect::<Result<_>>()?,
    )?;
    let forbidden: Vec<Pattern> = arr_field(o, "forbidden", "sft")?
        .iter()
        .map(|x| pattern_from_json(&group, &alphabet, x))
        .collect::<Result<_>>()?;
    SftDescription::new(group, alphabet, forbidden)
}

/// A named subgroup from a model file: always a coset table, and an abstract
/// embedding when the backend (or the file) provides one.
#[derive(Debug, Clone)]
pub enum SubgroupDef {
    Embedded(SubgroupEmbedding),
    TableOnly(CosetTable),
}

impl SubgroupDef {
    pub fn table(&self) -> &CosetTable {
        match self {
            SubgroupDef::Embedded(e) => e.table(),
            SubgroupDef::TableOnly(t) => t,
        }
    }

    pub fn embedding(&self) -> Result<&SubgroupEmbedding> {
        match self {
            SubgroupDef::Embedded(e) => Ok(e),
            SubgroupDef::TableOnly(_) => Err(Error::Unsupported(
                "this subgroup has no abstract embedding; supply sub and sub_generators".into(),
            )),
        }
    }
}

pub fn subgroup_from_json(
    name: &str,
    v: &Value,
    groups: &BTreeMap<String, Arc<GroupContext>>,
) -> Result<SubgroupDef> {
    let o = obj(v, "subgroup")?;
    let group = resolve_group(field(o, "group", "subgroup")?, groups, "subgroup")?;
    match str_field(o, "kind", "subgroup")? {
        "sublattice" => {
            let basis: Vec<Vec<i64>> = arr_field(o, "basis", "subgroup")?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| Error::InvalidModel("basis rows must be arrays".into()))?
                        .iter()
                        .map(|x| int_from(x, "basis entry"))
                        .collect()
                })
                .collect::<Result<_>>()?;
            Ok(SubgroupDef::Embedded(SubgroupEmbedding::sublattice(&group, &basis)?))
        }
        "generated" => {
            let gens: Vec<GroupElement> = arr_field(o, "generators", "subgroup")?
                .iter()
                .map(|x| element_from_json(&group, x))
                .collect::<Result<_>>()?;
            Ok(SubgroupDef::Embedded(SubgroupEmbedding::finite_subgroup(&group, &gens)?))
        }
        "table" => {
            let action = obj(field(o, "action", "subgroup")?, "action")?;
            let mut fwd = Vec::new();
            let gens = group.generators();
            if action.len() != gens.len() {
                return Err(Error::InvalidModel(format!(
                    "action must list exactly the generators of {}",
                    group.name()
                )));
            }
            for (gname, _) in &gens {
                let perm = action
                    .get(gname)
                    .ok_or_else(|| Error::InvalidModel(format!("action is missing generator {gname:?}")))?
                    .as_array()
                    .ok_or_else(|| Error::InvalidModel("actions must be arrays".into()))?;
                fwd.push(
                    perm.iter()
                        .map(|x| {
                            x.as_u64()
                                .map(|u| u as u32)
                                .ok_or_else(|| Error::InvalidModel("actions must hold coset indices".into()))
                        })
                        .collect::<Result<Vec<u32>>>()?,
                );
            }
            let transversal = match o.get("transversal") {
                Some(t) => Some(
                    t.as_array()
                        .ok_or_else(|| Error::InvalidModel("transversal must be an array".into()))?
                        .iter()
                        .map(|x| element_from_json(&group, x))
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            let table = CosetTable::from_action(&group, fwd, transversal)?;
            if let Some(idx) = o.get("index") {
                let idx = idx
                    .as_u64()
                    .ok_or_else(|| Error::InvalidModel("index must be a positive integer".into()))?;
                if idx as usize != table.index() {
                    return Err(Error::InvalidModel(format!(
                        "declared index {idx} but the table has {} cosets",
                        table.index()
                    )));
                }
            }
            match (o.get("sub"), o.get("sub_generators")) {
                (Some(sub), Some(imgs)) => {
                    let sub_ctx = Arc::new(group_from_json(&format!("{name}^sub"), sub)?);
                    let gen_images: Vec<GroupElement> = imgs
                        .as_array()
                        .ok_or_else(|| Error::InvalidModel("sub_generators must be an array".into()))?
                        .iter()
                        .map(|x| element_from_json(&group, x))
                        .collect::<Result<_>>()?;
                    Ok(SubgroupDef::Embedded(SubgroupEmbedding::custom(table, sub_ctx, gen_images)?))
                }
                (None, None) => Ok(SubgroupDef::TableOnly(table)),
                _ => Err(Error::InvalidModel(
                    "sub and sub_generators must be given together".into(),
                )),
            }
        }
        other => Err(Error::InvalidModel(format!("unknown subgroup kind {other:?}"))),
    }
}

pub fn hom_from_json(v: &Value, groups: &BTreeMap<String, Arc<GroupContext>>) -> Result<Homomorphism> {
    let o = obj(v, "homomorphism")?;
    let source = resolve_group(field(o, "source", "homomorphism")?, groups, "homomorphism")?;
    let target = resolve_group(field(o, "target", "homomorphism")?, groups, "homomorphism")?;
    let images: Vec<GroupElement> = arr_field(o, "images", "homomorphism")?
        .iter()
        .map(|x| element_from_json(&target, x))
        .collect::<Result<_>>()?;
    let kernel_generators = match o.get("kernel_generators") {
        Some(k) => Some(
            k.as_array()
                .ok_or_else(|| Error::InvalidModel("kernel_generators must be an array".into()))?
                .iter()
                .map(|x| element_from_json(&source, x))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Homomorphism::new(source, target, images, kernel_generators)
}

pub fn hom_to_json(hom: &Homomorphism) -> Value {
    let mut o = Map::new();
    o.insert("source".into(), group_to_json(hom.source()));
    o.insert("target".into(), group_to_json(hom.target()));
    o.insert(
        "images".into(),
        json!(hom.images().iter().map(|g| element_to_json(hom.target(), g)).collect::<Vec<_>>()),
    );
    if let Some(ker) = hom.kernel_generators() {
        o.insert(
            "kernel_generators".into(),
            json!(ker.iter().map(|g| element_to_json(hom.source(), g)).collect::<Vec<_>>()),
        );
    }
    Value::Object(o)
}

pub fn config_to_json(x: &PeriodicConfiguration) -> Value {
    json!({
        "quotient": {
            "target": group_to_json(x.quotient().target()),
            "images": x
                .quotient()
                .images()
                .iter()
                .map(|g| element_to_json(x.quotient().target(), g))
                .collect::<Vec<_>>(),
        },
        "labeling": x.labeling().iter().map(|&l| x.alphabet().name(l)).collect::<Vec<_>>(),
    })
}

pub fn config_from_json(
    group: &Arc<GroupContext>,
    alphabet: &Alphabet,
    v: &Value,
) -> Result<PeriodicConfiguration> {
    let o = obj(v, "configuration")?;
    let q = obj(field(o, "quotient", "configuration")?, "quotient")?;
    let target = Arc::new(group_from_json("quotient", field(q, "target", "quotient")?)?);
    let images: Vec<GroupElement> = arr_field(q, "images", "quotient")?
        .iter()
        .map(|x| element_from_json(&target, x))
        .collect::<Result<_>>()?;
    let hom = Homomorphism::new(Arc::clone(group), target, images, None)?;
    let labeling: Vec<u32> = arr_field(o, "labeling", "configuration")?
        .iter()
        .map(|x| {
            let s = x
                .as_str()
                .ok_or_else(|| Error::InvalidModel("labeling entries must be letters".into()))?;
            alphabet
                .id(s)
                .ok_or_else(|| Error::InvalidModel(format!("unknown letter {s:?}")))
        })
        .collect::<Result<_>>()?;
    PeriodicConfiguration::new(hom, labeling, alphabet.clone())
}

pub fn partial_to_json(ctx: &GroupContext, alphabet: &Alphabet, partial: &PartialConfiguration) -> Value {
    json!({
        "domain": partial.domain().iter().map(|g| element_to_json(ctx, g)).collect::<Vec<_>>(),
        "letters": partial.letters().iter().map(|&l| alphabet.name(l)).collect::<Vec<_>>(),
    })
}

pub fn partial_from_json(ctx: &GroupContext, alphabet: &Alphabet, v: &Value) -> Result<PartialConfiguration> {
    let o = obj(v, "partial configuration")?;
    let domain: Vec<GroupElement> = arr_field(o, "domain", "partial configuration")?
        .iter()
        .map(|x| element_from_json(ctx, x))
        .collect::<Result<_>>()?;
    let letters: Vec<u32> = arr_field(o, "letters", "partial configuration")?
        .iter()
        .map(|x| {
            let s = x
                .as_str()
                .ok_or_else(|| Error::InvalidModel("letters must be strings".into()))?;
            alphabet
                .id(s)
                .ok_or_else(|| Error::InvalidModel(format!("unknown letter {s:?}")))
        })
        .collect::<Result<_>>()?;
    PartialConfiguration::new(ctx, domain, letters)
}

pub fn certificate_to_json(sft: &SftDescription, cert: &Certificate) -> Value {
    let group = sft.group();
    let alphabet = sft.alphabet();
    let body = match &cert.body {
        CertificateBody::PeriodicPoint { config, stabilizer_index } => json!({
            "kind": "periodic-point",
            "config": config_to_json(config),
            "stabilizer_index": stabilizer_index,
        }),
        CertificateBody::EmptyAtRadius { radius, nodes_searched } => json!({
            "kind": "empty-at-radius",
            "radius": radius,
            "nodes_searched": nodes_searched,
        }),
        CertificateBody::LegalBall { radius, partial } => json!({
            "kind": "legal-ball",
            "radius": radius,
            "partial": partial_to_json(group, alphabet, partial),
        }),
        CertificateBody::GInvariantBall { radius, invariant, partial } => json!({
            "kind": "g-invariant-ball",
            "radius": radius,
            "invariant": element_to_json(group, invariant),
            "partial": partial_to_json(group, alphabet, partial),
        }),
    };
    json!({
        "sft_digest": cert.sft_digest,
        "body": body,
        "provenance": {
            "pipeline": cert.provenance.pipeline,
            "params": cert.provenance.params,
        },
    })
}

pub fn certificate_from_json(sft: &SftDescription, v: &Value) -> Result<Certificate> {
    let o = obj(v, "certificate")?;
    let sft_digest = str_field(o, "sft_digest", "certificate")?.to_string();
    let body_o = obj(field(o, "body", "certificate")?, "certificate body")?;
    let kind = str_field(body_o, "kind", "certificate body")?;
    let group = sft.group();
    let alphabet = sft.alphabet();
    let body = match kind {
        "periodic-point" => {
            let config =
                config_from_json(group, alphabet, field(body_o, "config", "certificate")?)?;
            let stabilizer_index =
                int_from(field(body_o, "stabilizer_index", "certificate")?, "stabilizer index")?;
            if stabilizer_index < 1 {
                return Err(Error::InvalidModel("stabilizer index must be positive".into()));
            }
            CertificateBody::PeriodicPoint { config, stabilizer_index: stabilizer_index as usize }
        }
        "empty-at-radius" => CertificateBody::EmptyAtRadius {
            radius: int_from(field(body_o, "radius", "certificate")?, "radius")? as usize,
            nodes_searched: int_from(field(body_o, "nodes_searched", "certificate")?, "nodes")?
                as u64,
        },
        "legal-ball" => CertificateBody::LegalBall {
            radius: int_from(field(body_o, "radius", "certificate")?, "radius")? as usize,
            partial: partial_from_json(group, alphabet, field(body_o, "partial", "certificate")?)?,
        },
        "g-invariant-ball" => CertificateBody::GInvariantBall {
            radius: int_from(field(body_o, "radius", "certificate")?, "radius")? as usize,
            invariant: element_from_json(group, field(body_o, "invariant", "certificate")?)?,
            partial: partial_from_json(group, alphabet, field(body_o, "partial", "certificate")?)?,
        },
        other => {
            return Err(Error::InvalidModel(format!("unknown certificate kind {other:?}")))
        }
    };
    let mut provenance = Provenance::new("unknown");
    if let Some(p) = o.get("provenance") {
        let p = obj(p, "provenance")?;
        provenance.pipeline = str_field(p, "pipeline", "provenance")?.to_string();
        if let Some(params) = p.get("params") {
            for (k, val) in obj(params, "params")? {
                let s = val
                    .as_str()
                    .ok_or_else(|| Error::InvalidModel("params must be strings".into()))?;
                provenance.params.insert(k.clone(), s.to_string());
            }
        }
    }
    Ok(Certificate { sft_digest, body, provenance })
}

/// A parsed model file: named groups, subgroups, SFTs and homomorphisms.
#[derive(Debug, Clone, Default)]
pub struct Model {
    pub groups: BTreeMap<String, Arc<GroupContext>>,
    pub subgroups: BTreeMap<String, SubgroupDef>,
    pub sfts: BTreeMap<String, SftDescription>,
    pub homs: BTreeMap<String, Homomorphism>,
}

pub fn parse_model(text: &str) -> Result<Model> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(format!("bad JSON: {e}")))?;
    let o = obj(&v, "model")?;
    let mut model = Model::default();
    if let Some(groups) = o.get("groups") {
        for (name, def) in obj(groups, "groups")? {
            model.groups.insert(name.clone(), Arc::new(group_from_json(name, def)?));
        }
    }
    if let Some(subs) = o.get("subgroups") {
        for (name, def) in obj(subs, "subgroups")? {
            model.subgroups.insert(name.clone(), subgroup_from_json(name, def, &model.groups)?);
        }
    }
    if let Some(sfts) = o.get("sfts") {
        for (name, def) in obj(sfts, "sfts")? {
            model.sfts.insert(name.clone(), sft_from_json(def, &model.groups)?);
        }
    }
    if let Some(homs) = o.get("homs") {
        for (name, def) in obj(homs, "homs")? {
            model.homs.insert(name.clone(), hom_from_json(def, &model.groups)?);
        }
    }
    Ok(model)
}

//! Input plumbing: models from files or stdin, section words, window
//! elements, and monodromy words from JSON payloads.
//!
//! Every parse failure is reported as a plain string destined for stderr;
//! syntactic JSON errors keep serde_json's line/column positions.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use gpd_core::{
    AdmissibleSection, FiniteGroupoid, GroupoidMorphism, Model, MonodromyWord, OpenSet1D,
    PLFunction, Pregroupoid, QuotientBundleModel, Rat, SectionWord, SmoothnessClass, WElement,
};

pub fn read_stdin() -> Result<String, String> {
    let mut buffer = String::new();
    std::io::stdin()
        .read_to_string(&mut buffer)
        .map_err(|e| format!("reading stdin: {e}"))?;
    Ok(buffer)
}

fn read_source(path: &Path) -> Result<String, String> {
    if path.as_os_str() == "-" {
        read_stdin()
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
    }
}

/// Loads a model from `--model PATH` (or stdin when the flag is absent)
/// and applies an optional smoothness override to bundle models.
pub fn load_model(path: Option<&PathBuf>, smoothness: Option<u8>) -> Result<Model, String> {
    let text = match path {
        Some(p) => read_source(p)?,
        None => read_stdin()?,
    };
    let model: Model =
        serde_json::from_str(&text).map_err(|e| format!("model does not parse: {e}"))?;
    apply_smoothness(model, smoothness)
}

/// Loads a model strictly from a file, for commands whose stdin carries a
/// payload instead.
pub fn load_model_file(path: Option<&PathBuf>, smoothness: Option<u8>) -> Result<Model, String> {
    let path = path.ok_or_else(|| {
        "this command reads its payload from stdin; pass the model with --model FILE".to_owned()
    })?;
    if path.as_os_str() == "-" {
        return Err(
            "this command reads its payload from stdin; pass the model with --model FILE"
                .to_owned(),
        );
    }
    let text = read_source(path)?;
    let model: Model =
        serde_json::from_str(&text).map_err(|e| format!("model does not parse: {e}"))?;
    apply_smoothness(model, smoothness)
}

pub fn smoothness_class(flag: u8) -> Result<SmoothnessClass, String> {
    match flag {
        0 => Ok(SmoothnessClass::C0),
        1 => Ok(SmoothnessClass::C1),
        other => Err(format!("smoothness must be 0 or 1, got {other}")),
    }
}

fn apply_smoothness(model: Model, smoothness: Option<u8>) -> Result<Model, String> {
    let Some(flag) = smoothness else {
        return Ok(model);
    };
    let class = smoothness_class(flag)?;
    match model {
        Model::QuotientBundle(b) => {
            let rebuilt = QuotientBundleModel::new(
                b.profile().clone(),
                b.window_lo().clone(),
                b.window_hi().clone(),
                class,
            )
            .map_err(|e| format!("reinterpreting smoothness: {e}"))?;
            Ok(Model::QuotientBundle(rebuilt))
        }
        other => Err(format!(
            "--smoothness applies to bundle models, not {} models",
            other.family()
        )),
    }
}

pub fn parse_json(text: &str) -> Result<Value, String> {
    serde_json::from_str(text).map_err(|e| format!("payload does not parse: {e}"))
}

pub fn parse_rat(text: &str) -> Result<Rat, String> {
    text.parse::<Rat>()
        .map_err(|e| format!("not a rational (want \"p/q\"): {e}"))
}

fn rat_value(v: &Value) -> Result<Rat, String> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => n
            .as_i64()
            .map(Rat::int)
            .ok_or_else(|| format!("not an exact rational: {n}")),
        other => Err(format!("not a rational: {other}")),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CacheEntry {
    #[serde(default)]
    domain: Option<OpenSet1D>,
    f: PLFunction,
    #[serde(default)]
    pow: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransportEntry {
    chart_edge: String,
    #[serde(default)]
    restrict: Option<OpenSet1D>,
    #[serde(default)]
    reversed: bool,
    #[serde(default)]
    pow: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdentityEntry {
    identity: OpenSet1D,
    #[serde(default)]
    pow: Option<u32>,
}

/// One letter of a section word, as it appears in payload JSON.
pub enum SectionEntry {
    Cache(CacheEntryData),
    Transport(TransportEntryData),
    Identity(IdentityEntryData),
}

pub struct CacheEntryData {
    pub domain: Option<OpenSet1D>,
    pub f: PLFunction,
    pub pow: Option<u32>,
}

pub struct TransportEntryData {
    pub chart_edge: String,
    pub restrict: OpenSet1D,
    pub reversed: bool,
    pub pow: Option<u32>,
}

pub struct IdentityEntryData {
    pub domain: OpenSet1D,
    pub pow: Option<u32>,
}

fn parse_entry(v: Value, index: usize) -> Result<SectionEntry, String> {
    let Value::Object(keys) = &v else {
        return Err(format!("entry {index}: expected a JSON object"));
    };
    if keys.contains_key("chart_edge") {
        let e: TransportEntry =
            serde_json::from_value(v).map_err(|e| format!("entry {index}: {e}"))?;
        Ok(SectionEntry::Transport(TransportEntryData {
            chart_edge: e.chart_edge,
            restrict: e.restrict.unwrap_or_else(OpenSet1D::line),
            reversed: e.reversed,
            pow: e.pow,
        }))
    } else if keys.contains_key("f") {
        let e: CacheEntry = serde_json::from_value(v).map_err(|e| format!("entry {index}: {e}"))?;
        Ok(SectionEntry::Cache(CacheEntryData {
            domain: e.domain,
            f: e.f,
            pow: e.pow,
        }))
    } else if keys.contains_key("identity") {
        let e: IdentityEntry =
            serde_json::from_value(v).map_err(|e| format!("entry {index}: {e}"))?;
        Ok(SectionEntry::Identity(IdentityEntryData {
            domain: e.identity,
            pow: e.pow,
        }))
    } else {
        Err(format!(
            "entry {index}: expected one of the keys \"f\" (cache section), \
             \"chart_edge\" (transport section), or \"identity\""
        ))
    }
}

/// Parses a word payload: a single entry object or an array of entries.
pub fn parse_entries(v: Value) -> Result<Vec<SectionEntry>, String> {
    match v {
        Value::Array(items) => {
            if items.is_empty() {
                return Err("empty section payload".to_owned());
            }
            items
                .into_iter()
                .enumerate()
                .map(|(i, item)| parse_entry(item, i))
                .collect()
        }
        other => Ok(vec![parse_entry(other, 0)?]),
    }
}

/// Builds one admissible section (before any `pow`) from an entry.
pub fn build_section(
    model: &Model,
    entry: &SectionEntry,
) -> Result<(AdmissibleSection, Option<u32>), String> {
    match entry {
        SectionEntry::Cache(e) => {
            let domain = e.domain.clone().unwrap_or_else(|| e.f.domain().clone());
            let section =
                AdmissibleSection::cache(domain, &e.f).map_err(|err| err.to_string())?;
            Ok((section, e.pow))
        }
        SectionEntry::Transport(e) => {
            let chart_model = model.as_chart_complex().ok_or_else(|| {
                "transport entries need a chart-complex model".to_owned()
            })?;
            let section =
                AdmissibleSection::transport(chart_model, &e.chart_edge, &e.restrict)
                    .map_err(|err| err.to_string())?;
            let section = if e.reversed { section.inverse() } else { section };
            Ok((section, e.pow))
        }
        SectionEntry::Identity(e) => {
            let section =
                AdmissibleSection::identity(e.domain.clone()).map_err(|err| err.to_string())?;
            Ok((section, e.pow))
        }
    }
}

/// Builds the product word of all entries, left to right.
pub fn build_word(model: &Model, entries: &[SectionEntry]) -> Result<SectionWord, String> {
    let mut word: Option<SectionWord> = None;
    for (i, entry) in entries.iter().enumerate() {
        let (section, pow) = build_section(model, entry).map_err(|e| format!("entry {i}: {e}"))?;
        let mut w = SectionWord::from_section(section);
        if let Some(n) = pow {
            w = w.pow(n).map_err(|e| format!("entry {i}: pow {n}: {e}"))?;
        }
        word = Some(match word {
            None => w,
            Some(acc) => acc
                .product(&w)
                .map_err(|e| format!("product up to entry {i}: {e}"))?,
        });
    }
    word.ok_or_else(|| "empty section payload".to_owned())
}

/// Parses one word payload (entry or entry array) into a section word.
pub fn word_from_value(model: &Model, v: Value) -> Result<SectionWord, String> {
    let entries = parse_entries(v)?;
    build_word(model, &entries)
}

/// Parses a payload of exactly two words: `[word, word]`.
pub fn two_words(model: &Model, v: Value) -> Result<(SectionWord, SectionWord), String> {
    let Value::Array(items) = v else {
        return Err("expected a two-element array [word, word]".to_owned());
    };
    let [a, b]: [Value; 2] = items
        .try_into()
        .map_err(|_| "expected exactly two words".to_owned())?;
    Ok((word_from_value(model, a)?, word_from_value(model, b)?))
}

/// Parses a window element: the tagged form with `"family"`, or the bare
/// forms `{"x","t"}` (bundle) and `{"edge","x"}` (chart).
pub fn welement_from_value(v: Value) -> Result<WElement, String> {
    let Value::Object(keys) = &v else {
        return Err("window element: expected a JSON object".to_owned());
    };
    if keys.contains_key("family") {
        return serde_json::from_value(v).map_err(|e| format!("window element: {e}"));
    }
    if keys.contains_key("edge") {
        let edge = keys
            .get("edge")
            .and_then(Value::as_str)
            .ok_or_else(|| "window element: \"edge\" must be a string".to_owned())?
            .to_owned();
        let x = rat_value(
            keys.get("x")
                .ok_or_else(|| "window element: missing \"x\"".to_owned())?,
        )?;
        return Ok(WElement::Chart { edge, x });
    }
    if keys.contains_key("t") {
        let x = rat_value(
            keys.get("x")
                .ok_or_else(|| "window element: missing \"x\"".to_owned())?,
        )?;
        let t = rat_value(keys.get("t").expect("checked"))?;
        return Ok(WElement::Bundle { x, t });
    }
    Err("window element: expected {\"x\",\"t\"}, {\"edge\",\"x\"}, or a tagged form".to_owned())
}

/// Parses a monodromy word contextually for the pregroupoid's family:
/// `{"base","letters"}` with rationals for bundles, strings for finite
/// carriers, and `{"chart","base","letters"}` for chart complexes.
pub fn mono_word_from_value(pre: &Pregroupoid, v: &Value) -> Result<MonodromyWord, String> {
    let Value::Object(keys) = v else {
        return Err("word: expected a JSON object with \"base\" and \"letters\"".to_owned());
    };
    let base = keys
        .get("base")
        .ok_or_else(|| "word: missing \"base\"".to_owned())?;
    let letters = keys
        .get("letters")
        .and_then(Value::as_array)
        .ok_or_else(|| "word: missing \"letters\" array".to_owned())?;
    if pre.groupoid().is_some() {
        let base = base
            .as_str()
            .ok_or_else(|| "word: \"base\" must name an object".to_owned())?;
        let ids: Vec<String> = letters
            .iter()
            .map(|l| {
                l.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| "word: letters must be arrow ids".to_owned())
            })
            .collect::<Result<_, _>>()?;
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        return Ok(MonodromyWord::finite(base, &refs));
    }
    match pre.model() {
        Some(Model::QuotientBundle(_)) => {
            let base = rat_value(base)?;
            let shifts: Vec<Rat> = letters.iter().map(rat_value).collect::<Result<_, _>>()?;
            Ok(MonodromyWord::bundle(base, shifts))
        }
        Some(Model::ChartComplex(_)) => {
            let chart = keys
                .get("chart")
                .and_then(Value::as_str)
                .ok_or_else(|| "word: chart-family words need a \"chart\" key".to_owned())?;
            let base = rat_value(base)?;
            let ids: Vec<String> = letters
                .iter()
                .map(|l| {
                    l.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| "word: letters must be edge ids".to_owned())
                })
                .collect::<Result<_, _>>()?;
            let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
            Ok(MonodromyWord::chart(chart, base, &refs))
        }
        None => Err("word: pregroupoid has no model".to_owned()),
    }
}

/// A finite pregroupoid given inline: `{"groupoid","carrier", ...}`.
#[derive(Deserialize)]
pub struct FinitePayload {
    pub groupoid: FiniteGroupoid,
    pub carrier: BTreeSet<String>,
    #[serde(default)]
    pub target: Option<FiniteGroupoid>,
    #[serde(default)]
    pub arrows: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub word: Option<Value>,
    #[serde(default)]
    pub first: Option<Value>,
    #[serde(default)]
    pub second: Option<Value>,
    #[serde(default)]
    pub object: Option<String>,
}

/// The lift payload: ambient groupoid, image groupoid, partial morphism,
/// window, and window embedding.
#[derive(Deserialize)]
pub struct LiftPayload {
    pub a: FiniteGroupoid,
    pub h: FiniteGroupoid,
    pub xi: GroupoidMorphism,
    pub window: BTreeSet<String>,
    pub embed: BTreeMap<String, String>,
}

#[derive(Deserialize)]
pub struct ChartApplyPayload {
    pub f: Value,
    pub w: Value,
}

#[derive(Deserialize)]
pub struct TransitionPayload {
    pub f: Value,
    pub g: Value,
    pub w: Value,
}

#[derive(Deserialize)]
pub struct WordPairPayload {
    pub first: Value,
    pub second: Value,
}

//! Tolerant fielded-response parsing with German/English label alias
//! normalization. The parser owns the alias tables; everything downstream
//! works with canonical values only.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::{Aspect, Sentiment};

/// Canonical field keys a response can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Field {
    Relevant,
    Explanation,
    Summary,
    DirectEsg,
    FinalRelevant,
    Sentiment,
    Aspect,
    Score,
    Keywords,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Relevant => "Relevant",
            Field::Explanation => "Explanation",
            Field::Summary => "Summary",
            Field::DirectEsg => "DirectESG",
            Field::FinalRelevant => "FinalRelevant",
            Field::Sentiment => "Sentiment",
            Field::Aspect => "Aspekt",
            Field::Score => "Score",
            Field::Keywords => "Keywords",
        }
    }
}

/// Label aliases, matched on the lowercased letters of the label (anything
/// non-alphanumeric stripped).
fn field_for_label(label: &str) -> Option<Field> {
    let key: String = label
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(|c| c.to_lowercase())
        .collect();
    match key.as_str() {
        "relevant" | "relevanz" | "relevance" | "relevancy" => Some(Field::Relevant),
        "explanation" | "begruendung" | "begründung" | "erklaerung" | "erklärung" => {
            Some(Field::Explanation)
        }
        "summary" | "zusammenfassung" => Some(Field::Summary),
        "directesg" | "esgdirect" | "direkt" => Some(Field::DirectEsg),
        "finalrelevant" | "finalerelevanz" | "finalrelevance" => Some(Field::FinalRelevant),
        "sentiment" | "stimmung" => Some(Field::Sentiment),
        "aspect" | "aspekt" => Some(Field::Aspect),
        "score" | "relevancescore" | "relevanzwert" | "punktzahl" => Some(Field::Score),
        "keywords" | "keyword" | "stichwoerter" | "stichwörter" | "schlagwoerter"
        | "schlagwörter" => Some(Field::Keywords),
        _ => None,
    }
}

/// Alias → canonical sentiment. Exposed so the alias table itself is
/// testable exhaustively.
pub fn sentiment_aliases() -> &'static [(&'static str, Sentiment)] {
    &[
        ("positive", Sentiment::Positive),
        ("positiv", Sentiment::Positive),
        ("pos", Sentiment::Positive),
        ("neutral", Sentiment::Neutral),
        ("neu", Sentiment::Neutral),
        ("negative", Sentiment::Negative),
        ("negativ", Sentiment::Negative),
        ("neg", Sentiment::Negative),
    ]
}

/// Alias → canonical aspect.
pub fn aspect_aliases() -> &'static [(&'static str, Aspect)] {
    &[
        ("e", Aspect::E),
        ("env", Aspect::E),
        ("environment", Aspect::E),
        ("environmental", Aspect::E),
        ("umwelt", Aspect::E),
        ("s", Aspect::S),
        ("soc", Aspect::S),
        ("social", Aspect::S),
        ("sozial", Aspect::S),
        ("soziales", Aspect::S),
        ("g", Aspect::G),
        ("gov", Aspect::G),
        ("governance", Aspect::G),
        ("unternehmensführung", Aspect::G),
        ("unternehmensfuehrung", Aspect::G),
    ]
}

/// Alias → boolean.
pub fn bool_aliases() -> &'static [(&'static str, bool)] {
    &[
        ("yes", true),
        ("ja", true),
        ("true", true),
        ("y", true),
        ("relevant", true),
        ("no", false),
        ("nein", false),
        ("false", false),
        ("n", false),
        ("irrelevant", false),
        ("not relevant", false),
        ("nicht relevant", false),
    ]
}

pub fn parse_sentiment(value: &str) -> Result<Sentiment> {
    let v = value.trim().to_lowercase();
    sentiment_aliases()
        .iter()
        .find(|(alias, _)| *alias == v)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::Parse(format!("unknown sentiment value `{value}`")))
}

pub fn parse_aspect(value: &str) -> Result<Aspect> {
    let v = value.trim().to_lowercase();
    aspect_aliases()
        .iter()
        .find(|(alias, _)| *alias == v)
        .map(|(_, a)| *a)
        .ok_or_else(|| Error::Parse(format!("unknown aspect value `{value}`")))
}

pub fn parse_bool(value: &str) -> Result<bool> {
    let v = value.trim().trim_end_matches(['.', '!']).to_lowercase();
    bool_aliases()
        .iter()
        .find(|(alias, _)| *alias == v)
        .map(|(_, b)| *b)
        .ok_or_else(|| Error::Parse(format!("unknown yes/no value `{value}`")))
}

pub fn parse_score(value: &str) -> Result<u8> {
    let v = value.trim().trim_end_matches(['.', '!']);
    let n: i64 = v
        .parse()
        .map_err(|_| Error::Parse(format!("relevance score `{value}` is not an integer")))?;
    if !(1..=10).contains(&n) {
        return Err(Error::Parse(format!("relevance score {n} outside 1-10")));
    }
    Ok(n as u8)
}

pub fn parse_keywords(value: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for part in value.split([',', ';']) {
        let k = part.trim();
        if !k.is_empty() && !out.iter().any(|e| e == k) {
            out.push(k.to_string());
        }
    }
    out
}

/// Raw field values extracted from a response. Multi-line values run until
/// the next recognized label line.
#[derive(Debug, Default, Clone)]
pub struct ParsedFields {
    values: BTreeMap<Field, String>,
}

impl ParsedFields {
    pub fn get(&self, field: Field) -> Option<&str> {
        self.values.get(&field).map(|s| s.as_str())
    }

    pub fn require(&self, field: Field) -> Result<&str> {
        self.get(field)
            .ok_or_else(|| Error::Parse(format!("missing mandatory field `{}`", field.name())))
    }
}

/// Extract labeled fields from a raw response, tolerating surrounding
/// prose, markdown bold markers and unknown lines.
pub fn parse_structured_response(raw: &str, required: &[Field]) -> Result<ParsedFields> {
    let mut parsed = ParsedFields::default();
    let mut current: Option<Field> = None;
    for line in raw.lines() {
        let trimmed = line.trim().trim_start_matches("**");
        if let Some((label, value)) = trimmed.split_once(':') {
            if let Some(field) = field_for_label(label) {
                let value = value.trim().trim_matches('*').trim().to_string();
                parsed.values.entry(field).or_insert(value);
                current = Some(field);
                continue;
            }
        }
        // Continuation lines extend free-text fields only; scalar fields
        // never span lines.
        if let Some(field) = current {
            if matches!(field, Field::Summary | Field::Explanation) && !trimmed.is_empty() {
                let entry = parsed.values.get_mut(&field).expect("current field present");
                if !entry.is_empty() {
                    entry.push(' ');
                }
                entry.push_str(trimmed);
            }
        }
    }
    for field in required {
        if parsed.get(*field).map(|v| v.is_empty()).unwrap_or(true) {
            return Err(Error::Parse(format!(
                "missing mandatory field `{}`",
                field.name()
            )));
        }
    }
    Ok(parsed)
}

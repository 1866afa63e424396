//! Scene descriptions of the form "Start. <event sentence>. ... End." turned
//! into objects and ordinal-frame events.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use crcg_core::model::{Attribute, Event, EventKind, Frame, ObjectId, ObjectRecord, Scene, Trace};
use regex::Regex;
use thiserror::Error;

pub const GROUND_ID: ObjectId = ObjectId(95);
pub const BASKET_ID: ObjectId = ObjectId(97);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescriptionError {
    #[error("description must start with `Start.` and end with `End.`")]
    Frame,
    #[error("sentence {index} is not an event: `{sentence}`")]
    Sentence { index: usize, sentence: String },
}

/// Canonical size word; `None` if `word` is not a size.
pub fn normalize_size(word: &str) -> Option<&'static str> {
    match word.to_ascii_lowercase().as_str() {
        "small" | "tiny" => Some("small"),
        "large" | "big" => Some("large"),
        _ => None,
    }
}

/// Canonical fixture name for ground and basket synonyms.
pub fn normalize_fixture(word: &str) -> Option<&'static str> {
    match word.to_ascii_lowercase().as_str() {
        "basket" | "bucket" | "container" => Some("basket"),
        "ground" | "floor" => Some("ground"),
        _ => None,
    }
}

/// Size, color and shape of a described object, already normalized.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phrase {
    pub size: String,
    pub color: String,
    pub shape: String,
}

impl Phrase {
    pub fn values(&self) -> Vec<String> {
        vec![self.size.clone(), self.color.clone(), self.shape.clone()]
    }
}

/// Feature values of the ground or basket fixture.
pub fn fixture_values(name: &str) -> Vec<String> {
    vec!["large".into(), "black".into(), name.into()]
}

fn fixture(id: ObjectId, name: &str) -> ObjectRecord {
    ObjectRecord::new(id.0)
        .with(Attribute::Size, "large")
        .with(Attribute::Color, "black")
        .with(Attribute::Shape, name)
}

const OBJECT: &str = r"(?i:(small|tiny|large|big))\s+([a-z]+)\s+([a-z]+)";

static COLLIDES: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"^(?i:{OBJECT})\s+collides\s+with\s+(?:the\s+)?(?:{OBJECT}|(basket|bucket|container|ground|floor))$"
    ))
    .expect("valid pattern")
});

static ENTERS: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(r"^(?i:{OBJECT})\s+enters\s+(?:the\s+)?(basket|bucket|container)$")).expect("valid pattern")
});

fn phrase(size: &str, color: &str, shape: &str) -> Phrase {
    Phrase {
        size: normalize_size(size).expect("pattern restricts sizes").to_string(),
        color: color.to_ascii_lowercase(),
        shape: shape.to_ascii_lowercase(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Target {
    Object(Phrase),
    Fixture(&'static str),
}

struct Sentence {
    kind: EventKind,
    subject: Phrase,
    target: Target,
}

fn parse_sentence(text: &str) -> Option<Sentence> {
    if let Some(c) = COLLIDES.captures(text) {
        let subject = phrase(&c[1], &c[2], &c[3]);
        let target = match c.get(7) {
            Some(f) => Target::Fixture(normalize_fixture(f.as_str()).expect("pattern restricts fixtures")),
            None => Target::Object(phrase(&c[4], &c[5], &c[6])),
        };
        return Some(Sentence {
            kind: EventKind::Collide,
            subject,
            target,
        });
    }
    let c = ENTERS.captures(text)?;
    Some(Sentence {
        kind: EventKind::Enter,
        subject: phrase(&c[1], &c[2], &c[3]),
        target: Target::Fixture("basket"),
    })
}

/// Objects and events of a description.
///
/// Ids go to sentence subjects in order of appearance, then to the remaining
/// mentioned objects; ground and basket always get 95 and 97. The frame of an
/// event is the 0-based position of its sentence. Collisions are listed
/// before entries, each group in sentence order.
pub fn parse_description(text: &str) -> Result<Scene, DescriptionError> {
    let body = text.trim();
    let body = body.strip_prefix("Start.").ok_or(DescriptionError::Frame)?;
    let body = body.trim_end().strip_suffix("End.").ok_or(DescriptionError::Frame)?;
    let sentences: Vec<&str> = body.split('.').map(str::trim).filter(|s| !s.is_empty()).collect();
    let parsed = sentences
        .iter()
        .enumerate()
        .map(|(index, s)| {
            parse_sentence(s).ok_or_else(|| DescriptionError::Sentence {
                index,
                sentence: s.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut ids: BTreeMap<Phrase, ObjectId> = BTreeMap::new();
    let mut order: Vec<Phrase> = Vec::new();
    let mut assign = |p: &Phrase| {
        if !ids.contains_key(p) {
            ids.insert(p.clone(), ObjectId(order.len() as u32));
            order.push(p.clone());
        }
    };
    for s in &parsed {
        assign(&s.subject);
    }
    for s in &parsed {
        if let Target::Object(p) = &s.target {
            assign(p);
        }
    }

    let mut objects: Vec<ObjectRecord> = order
        .iter()
        .map(|p| {
            ObjectRecord::new(ids[p].0)
                .with(Attribute::Size, p.size.as_str())
                .with(Attribute::Color, p.color.as_str())
                .with(Attribute::Shape, p.shape.as_str())
        })
        .collect();
    if !parsed.is_empty() {
        objects.push(fixture(GROUND_ID, "ground"));
        objects.push(fixture(BASKET_ID, "basket"));
    }

    let mut collisions = Vec::new();
    let mut entries = Vec::new();
    for (frame, s) in parsed.iter().enumerate() {
        let a = ids[&s.subject];
        let b = match &s.target {
            Target::Object(p) => ids[p],
            Target::Fixture("ground") => GROUND_ID,
            Target::Fixture(_) => BASKET_ID,
        };
        let event = Event {
            kind: s.kind,
            a,
            b,
            frame: frame as Frame,
        };
        match s.kind {
            EventKind::Collide => collisions.push(event),
            EventKind::Enter => entries.push(event),
        }
    }
    collisions.extend(entries);
    Ok(Scene {
        objects,
        max_v: parsed.len() as Frame,
        traces: Trace::new(),
        events: collisions,
    })
}

//! The six counterfactual question templates: removal of one object or of
//! any other object, asking about entering the basket or hitting the ground,
//! either for one object or as a count.

use std::sync::LazyLock;

use crcg_core::model::{EventKind, Intervention, Query, QueryVariant, Selector};
use regex::{Captures, Regex};
use thiserror::Error;

use crate::description::{fixture_values, normalize_size, Phrase};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unsupported question: `{0}`")]
pub struct UnsupportedQuestion(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Ends up in the basket.
    Enter,
    /// Hits the ground.
    Ground,
}

impl Outcome {
    pub fn kind(self) -> EventKind {
        match self {
            Outcome::Enter => EventKind::Enter,
            Outcome::Ground => EventKind::Collide,
        }
    }

    pub fn fixture(self) -> &'static str {
        match self {
            Outcome::Enter => "basket",
            Outcome::Ground => "ground",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuestionForm {
    /// Does `subject` reach the outcome once `removed` is gone?
    Single { subject: Phrase, removed: Phrase },
    /// How many objects reach the outcome once `removed` is gone?
    Count { removed: Phrase },
    /// Does `subject` reach the outcome if any single other object is gone?
    AnyRemoved { subject: Phrase },
}

/// A parsed question. The subject phrase and verb phrase are kept verbatim
/// for rephrasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CraftQuestion {
    pub text: String,
    pub form: QuestionForm,
    pub outcome: Outcome,
    subject_text: Option<String>,
    verb_phrase: String,
}

const NP: &str = r"the\s+(?:small|tiny|large|big)\s+[a-z]+\s+[a-z]+";
const ENTER_VP: &str =
    r"(?:fall|falls|end\s+up|ends\s+up|get|gets|go|goes|land|lands)\s+(?:in|into)\s+the\s+(?:basket|bucket|container)|enters?\s+the\s+(?:basket|bucket|container)";
const GROUND_VP: &str = r"(?:hit|hits)\s+the\s+(?:ground|floor)|(?:fall|falls)\s+(?:to|onto|on)\s+the\s+(?:ground|floor)";
const ANY: &str = r"any\s+(?:one\s+)?of\s+the\s+other\s+objects\s+(?:are|is)\s+removed";

fn vp() -> String {
    format!("(?P<vp>{ENTER_VP}|{GROUND_VP})")
}

static TEMPLATES: LazyLock<Vec<(Regex, Shape)>> = LazyLock::new(|| {
    let vp = vp();
    let t = |pattern: String| Regex::new(&format!("(?i)^{pattern}\\?$")).expect("valid template");
    vec![
        (t(format!(r"will\s+(?P<s>{NP})\s+{vp}\s+if\s+(?P<r>{NP})\s+is\s+removed")), Shape::Single),
        (t(format!(r"if\s+(?P<r>{NP})\s+is\s+removed,\s*will\s+(?P<s>{NP})\s+{vp}")), Shape::Single),
        (t(format!(r"how\s+many\s+objects\s+{vp}\s+if\s+(?P<r>{NP})\s+is\s+removed")), Shape::Count),
        (t(format!(r"if\s+(?P<r>{NP})\s+is\s+removed,\s*how\s+many\s+objects\s+{vp}")), Shape::Count),
        (t(format!(r"will\s+(?P<s>{NP})\s+{vp}\s+if\s+{ANY}")), Shape::Any),
        (t(format!(r"if\s+{ANY},\s*will\s+(?P<s>{NP})\s+{vp}")), Shape::Any),
    ]
});

static ENTER: LazyLock<Regex> = LazyLock::new(|| Regex::new(&format!("(?i)^(?:{ENTER_VP})$")).expect("valid"));

#[derive(Debug, Clone, Copy)]
enum Shape {
    Single,
    Count,
    Any,
}

fn phrase_of(np: &str) -> Phrase {
    let words: Vec<String> = np.split_whitespace().skip(1).map(str::to_ascii_lowercase).collect();
    Phrase {
        size: normalize_size(&words[0]).expect("template restricts sizes").to_string(),
        color: words[1].clone(),
        shape: words[2].clone(),
    }
}

fn named(c: &Captures<'_>, name: &str) -> Option<String> {
    c.name(name).map(|m| m.as_str().split_whitespace().collect::<Vec<_>>().join(" "))
}

pub fn parse_question(text: &str) -> Result<CraftQuestion, UnsupportedQuestion> {
    let trimmed = text.trim();
    for (re, shape) in TEMPLATES.iter() {
        let Some(c) = re.captures(trimmed) else {
            continue;
        };
        let verb_phrase = named(&c, "vp").expect("every template has a verb phrase");
        let outcome = if ENTER.is_match(&verb_phrase) {
            Outcome::Enter
        } else {
            Outcome::Ground
        };
        let subject_text = named(&c, "s");
        let removed = named(&c, "r").map(|r| phrase_of(&r));
        let subject = subject_text.as_deref().map(phrase_of);
        let form = match shape {
            Shape::Single => QuestionForm::Single {
                subject: subject.expect("single template names a subject"),
                removed: removed.expect("single template names a removal"),
            },
            Shape::Count => QuestionForm::Count {
                removed: removed.expect("count template names a removal"),
            },
            Shape::Any => QuestionForm::AnyRemoved {
                subject: subject.expect("any template names a subject"),
            },
        };
        return Ok(CraftQuestion {
            text: trimmed.to_string(),
            form,
            outcome,
            subject_text,
            verb_phrase,
        });
    }
    Err(UnsupportedQuestion(trimmed.to_string()))
}

fn past_tense(vp: &str) -> String {
    let mut words = vp.split(' ');
    let verb = words.next().unwrap_or_default();
    let past = match verb.to_ascii_lowercase().as_str() {
        "fall" | "falls" => "fell".to_string(),
        "get" | "gets" => "got".into(),
        "go" | "goes" => "went".into(),
        "hit" | "hits" => "hit".into(),
        "end" | "ends" => "ended".into(),
        "land" | "lands" => "landed".into(),
        "enter" | "enters" => "entered".into(),
        other => other.to_string(),
    };
    std::iter::once(past.as_str()).chain(words).collect::<Vec<_>>().join(" ")
}

fn base_form(vp: &str) -> String {
    let mut words = vp.split(' ');
    let verb = words.next().unwrap_or_default().to_ascii_lowercase();
    let base = match verb.as_str() {
        "falls" => "fall",
        "gets" => "get",
        "goes" => "go",
        "hits" => "hit",
        "ends" => "end",
        "lands" => "land",
        "enters" => "enter",
        other => other,
    };
    std::iter::once(base).chain(words).collect::<Vec<_>>().join(" ")
}

impl CraftQuestion {
    pub fn query(&self) -> Query {
        let fixture = Selector::Features(fixture_values(self.outcome.fixture()));
        let kind = self.outcome.kind();
        match &self.form {
            QuestionForm::Single { subject, removed } => Query {
                interventions: vec![Intervention::remove(Selector::Features(removed.values()))],
                variant: QueryVariant::PairEvent {
                    subject: Selector::Features(subject.values()),
                    kind,
                    object: fixture,
                },
                negated: false,
            },
            QuestionForm::Count { removed } => Query {
                interventions: vec![Intervention::remove(Selector::Features(removed.values()))],
                variant: QueryVariant::Counting { kind, target: fixture },
                negated: false,
            },
            QuestionForm::AnyRemoved { subject } => Query {
                interventions: Vec::new(),
                variant: QueryVariant::RemoveAny {
                    subject: Selector::Features(subject.values()),
                    kind,
                    object: fixture,
                },
                negated: false,
            },
        }
    }

    pub fn is_counting(&self) -> bool {
        matches!(self.form, QuestionForm::Count { .. })
    }

    /// The same question asked about what the description reports, with the
    /// intervention dropped: "Will X fall to the ground if Y is removed?"
    /// becomes "Did X fall to the ground?".
    pub fn perception_question(&self) -> String {
        match &self.subject_text {
            Some(subject) => format!("Did {} {}?", lower_article(subject), base_form(&self.verb_phrase)),
            None => format!("How many objects {}?", past_tense(&self.verb_phrase)),
        }
    }
}

fn lower_article(np: &str) -> String {
    let mut words = np.split(' ');
    let first = words.next().unwrap_or_default().to_ascii_lowercase();
    std::iter::once(first.as_str()).chain(words).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_other_questions() {
        assert!(parse_question("What color is the cube?").is_err());
        assert!(parse_question("Will the big red cube hit the ground?").is_err());
    }

    #[test]
    fn rephrasing_drops_the_intervention() {
        let q = parse_question("Will the small purple circle fall to the ground if the big gray circle is removed?").unwrap();
        assert_eq!(q.perception_question(), "Did the small purple circle fall to the ground?");
        let q = parse_question("How many objects go into the bucket if the tiny gray circle is removed?").unwrap();
        assert_eq!(q.perception_question(), "How many objects went into the bucket?");
    }
}

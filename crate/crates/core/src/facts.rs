//! Line-oriented logic-fact text: object features, events and the query
//! block (`counterfact`, `feature(qobj(..))`, `option`, `query`).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    Attribute, Event, EventKind, Intervention, ObjectId, ObjectRecord, Query, QueryVariant, Scene, Selector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("query uses qobj({0}) without any feature")]
    MissingFeatures(u32),
    #[error("fact program cannot express this query: {0}")]
    Unsupported(String),
}

/// Layout of emitted facts. Spaced separates facts on a line with a space
/// and puts a blank line between objects and events; compact does neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactStyle {
    /// `color(0,yellow). material(0,rubber).`
    #[default]
    Spaced,
    /// `size(0,large).color(0,cyan).`
    Compact,
}

impl FactStyle {
    fn join(self) -> &'static str {
        match self {
            FactStyle::Spaced => " ",
            FactStyle::Compact => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterfact {
    Remove(Vec<Vec<String>>),
    RemoveAny,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactOption {
    pub index: u32,
    pub subject: Vec<String>,
    pub kind: EventKind,
    pub object: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactCounting {
    pub kind: EventKind,
    pub target: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactQuestion {
    pub counterfact: Option<Counterfact>,
    pub options: Vec<FactOption>,
    pub counting: Option<FactCounting>,
    pub negated: bool,
}

impl FactQuestion {
    fn is_empty(&self) -> bool {
        self.counterfact.is_none() && self.options.is_empty() && self.counting.is_none() && !self.negated
    }

    /// One query per option, or a single counting query.
    pub fn queries(&self) -> Vec<(u32, Query)> {
        let (interventions, remove_any) = match &self.counterfact {
            Some(Counterfact::Remove(targets)) => (
                targets
                    .iter()
                    .map(|t| Intervention::remove(Selector::Features(t.clone())))
                    .collect(),
                false,
            ),
            Some(Counterfact::RemoveAny) => (Vec::new(), true),
            None => (Vec::new(), false),
        };
        let mut out: Vec<(u32, Query)> = self
            .options
            .iter()
            .map(|opt| {
                let subject = Selector::Features(opt.subject.clone());
                let object = Selector::Features(opt.object.clone());
                let variant = if remove_any {
                    QueryVariant::RemoveAny {
                        subject,
                        kind: opt.kind,
                        object,
                    }
                } else {
                    QueryVariant::PairEvent {
                        subject,
                        kind: opt.kind,
                        object,
                    }
                };
                (
                    opt.index,
                    Query {
                        interventions: interventions.clone(),
                        variant,
                        negated: self.negated,
                    },
                )
            })
            .collect();
        if let Some(c) = &self.counting {
            out.push((
                0,
                Query {
                    interventions,
                    variant: QueryVariant::Counting {
                        kind: c.kind,
                        target: Selector::Features(c.target.clone()),
                    },
                    negated: self.negated,
                },
            ));
        }
        out
    }
}

/// Objects, events in supplied order, and an optional question block.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactProgram {
    pub objects: Vec<ObjectRecord>,
    pub events: Vec<Event>,
    pub question: Option<FactQuestion>,
}

fn selector_values(selector: &Selector, objects: &[ObjectRecord]) -> Result<Vec<String>, FactError> {
    match selector {
        Selector::Features(values) => Ok(values.clone()),
        Selector::Id(id) => objects
            .iter()
            .find(|o| o.id == *id)
            .map(|o| Attribute::ALL.iter().filter_map(|a| o.feature(*a)).map(str::to_string).collect())
            .ok_or_else(|| FactError::Unsupported(format!("unknown object {id}"))),
    }
}

impl FactProgram {
    pub fn from_scene(scene: &Scene, query: Option<&Query>) -> Result<Self, FactError> {
        let question = query.map(|q| Self::question_of(q, &scene.objects)).transpose()?;
        Ok(Self {
            objects: scene.objects.clone(),
            events: scene.events.clone(),
            question,
        })
    }

    fn question_of(query: &Query, objects: &[ObjectRecord]) -> Result<FactQuestion, FactError> {
        let mut q = FactQuestion {
            negated: query.negated,
            ..FactQuestion::default()
        };
        let targets = query
            .interventions
            .iter()
            .map(|i| match i.kind {
                crate::model::InterventionKind::Remove => selector_values(&i.target, objects),
                crate::model::InterventionKind::Replace => {
                    Err(FactError::Unsupported("replace interventions".into()))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        match &query.variant {
            QueryVariant::PairEvent {
                subject,
                kind,
                object,
            } => {
                if !targets.is_empty() {
                    q.counterfact = Some(Counterfact::Remove(targets));
                }
                q.options.push(FactOption {
                    index: 1,
                    subject: selector_values(subject, objects)?,
                    kind: *kind,
                    object: selector_values(object, objects)?,
                });
            }
            QueryVariant::RemoveAny {
                subject,
                kind,
                object,
            } => {
                q.counterfact = Some(Counterfact::RemoveAny);
                q.options.push(FactOption {
                    index: 1,
                    subject: selector_values(subject, objects)?,
                    kind: *kind,
                    object: selector_values(object, objects)?,
                });
            }
            QueryVariant::Counting { kind, target } => {
                if !targets.is_empty() {
                    q.counterfact = Some(Counterfact::Remove(targets));
                }
                q.counting = Some(FactCounting {
                    kind: *kind,
                    target: selector_values(target, objects)?,
                });
            }
        }
        Ok(q)
    }

    pub fn emit(&self) -> String {
        self.emit_with(FactStyle::Spaced)
    }

    pub fn emit_with(&self, style: FactStyle) -> String {
        let mut blocks: Vec<String> = Vec::new();
        if !self.objects.is_empty() {
            let mut block = String::new();
            for object in &self.objects {
                let facts: Vec<String> = object
                    .features
                    .iter()
                    .map(|(attr, value)| format!("{}({},{}).", attr.name(), object.id, value))
                    .collect();
                if !facts.is_empty() {
                    block.push_str(&facts.join(style.join()));
                    block.push('\n');
                }
            }
            blocks.push(block);
        }
        if !self.events.is_empty() {
            let mut block = String::new();
            for e in &self.events {
                let head = match e.kind {
                    EventKind::Collide => "collision",
                    EventKind::Enter => "enter",
                };
                let _ = writeln!(block, "{head}({},{},{}).", e.a, e.b, e.frame);
            }
            match (style, self.objects.is_empty()) {
                (FactStyle::Compact, false) => blocks.last_mut().expect("object block").push_str(&block),
                _ => blocks.push(block),
            }
        }
        if let Some(q) = self.question.as_ref().filter(|q| !q.is_empty()) {
            blocks.extend(emit_question(q, style));
        }
        blocks.join("\n")
    }
}

fn feature_line(qobj: u32, values: &[String], style: FactStyle) -> String {
    let facts: Vec<String> = values.iter().map(|v| format!("feature(qobj({qobj}),{v}).")).collect();
    facts.join(style.join())
}

fn emit_question(q: &FactQuestion, style: FactStyle) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut next = 0u32;
    let mut head = String::new();
    match &q.counterfact {
        Some(Counterfact::Remove(targets)) => {
            for target in targets {
                let _ = writeln!(head, "counterfact(remove,qobj({next})).");
                for v in target {
                    let _ = writeln!(head, "feature(qobj({next}),{v}).");
                }
                next += 1;
            }
        }
        Some(Counterfact::RemoveAny) => head.push_str("counterfact(remove,any).\n"),
        None => {}
    }
    if q.negated {
        head.push_str("query(negated).\n");
    }
    if let Some(c) = &q.counting {
        let _ = writeln!(head, "query(counting,{},qobj({next})).", c.kind.name());
        let _ = writeln!(head, "{}", feature_line(next, &c.target, style));
        next += 1;
    }
    if !head.is_empty() {
        blocks.push(head);
    }
    for opt in &q.options {
        let (s, o) = (next, next + 1);
        next += 2;
        let mut block = String::new();
        let _ = writeln!(block, "option({}, qobj({s}), {}, qobj({o})).", opt.index, opt.kind.name());
        let _ = writeln!(block, "{}", feature_line(s, &opt.subject, style));
        let _ = writeln!(block, "{}", feature_line(o, &opt.object, style));
        blocks.push(block);
    }
    blocks
}

pub fn emit_facts(scene: &Scene, query: Option<&Query>) -> Result<String, FactError> {
    Ok(FactProgram::from_scene(scene, query)?.emit())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Term {
    Atom(String),
    Int(u32),
    Compound(String, Vec<Term>),
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> TermParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected `{}` at column {}", c as char, self.pos + 1))
        }
    }

    fn term(&mut self) -> Result<Term, String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected a term at column {}", self.pos + 1));
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let mut args = vec![self.term()?];
            loop {
                self.skip_ws();
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                        args.push(self.term()?);
                    }
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(format!("unterminated arguments at column {}", self.pos + 1)),
                }
            }
            return Ok(Term::Compound(word.to_string(), args));
        }
        if word.bytes().all(|c| c.is_ascii_digit()) {
            return word
                .parse()
                .map(Term::Int)
                .map_err(|_| format!("number `{word}` out of range"));
        }
        Ok(Term::Atom(word.to_string()))
    }
}

fn parse_line(line: &str) -> Result<Vec<Term>, String> {
    let mut p = TermParser {
        src: line.as_bytes(),
        pos: 0,
    };
    let mut facts = Vec::new();
    loop {
        p.skip_ws();
        if p.pos >= p.src.len() || p.src[p.pos] == b'%' {
            return Ok(facts);
        }
        facts.push(p.term()?);
        p.expect(b'.')?;
    }
}

fn int(t: &Term) -> Result<u32, String> {
    match t {
        Term::Int(n) => Ok(*n),
        other => Err(format!("expected a number, found {other:?}")),
    }
}

fn atom(t: &Term) -> Result<&str, String> {
    match t {
        Term::Atom(a) => Ok(a),
        Term::Int(_) => Err("expected a name, found a number".into()),
        Term::Compound(name, _) => Err(format!("expected a name, found `{name}(..)`")),
    }
}

fn qobj(t: &Term) -> Result<u32, String> {
    match t {
        Term::Compound(name, args) if name == "qobj" && args.len() == 1 => int(&args[0]),
        _ => Err("expected qobj(N)".into()),
    }
}

#[derive(Default)]
struct QueryParts {
    removed: Vec<u32>,
    remove_any: bool,
    features: BTreeMap<u32, Vec<String>>,
    options: Vec<(u32, u32, EventKind, u32)>,
    counting: Option<(EventKind, u32)>,
    negated: bool,
    seen: bool,
}

impl QueryParts {
    fn values(&self, q: u32) -> Result<Vec<String>, FactError> {
        self.features
            .get(&q)
            .cloned()
            .ok_or(FactError::MissingFeatures(q))
    }

    fn finish(self) -> Result<Option<FactQuestion>, FactError> {
        if !self.seen {
            return Ok(None);
        }
        let counterfact = if self.remove_any {
            Some(Counterfact::RemoveAny)
        } else if self.removed.is_empty() {
            None
        } else {
            Some(Counterfact::Remove(
                self.removed.iter().map(|q| self.values(*q)).collect::<Result<_, _>>()?,
            ))
        };
        let options = self
            .options
            .iter()
            .map(|&(index, s, kind, o)| {
                Ok(FactOption {
                    index,
                    subject: self.values(s)?,
                    kind,
                    object: self.values(o)?,
                })
            })
            .collect::<Result<_, FactError>>()?;
        let counting = self
            .counting
            .map(|(kind, q)| Ok::<_, FactError>(FactCounting { kind, target: self.values(q)? }))
            .transpose()?;
        Ok(Some(FactQuestion {
            counterfact,
            options,
            counting,
            negated: self.negated,
        }))
    }
}

/// Parses fact text. Besides the emitted form this accepts the multiple-choice
/// shorthand `question(yes|no,F).` / `choice(C,I,F).`, where the question
/// features describe the removed object and choice `C` asks whether objects
/// `qobj(C*10+1)` and `qobj(C*10+2)` collide.
pub fn parse_facts(text: &str) -> Result<FactProgram, FactError> {
    let mut objects: BTreeMap<ObjectId, ObjectRecord> = BTreeMap::new();
    let mut object_order: Vec<ObjectId> = Vec::new();
    let mut events = Vec::new();
    let mut parts = QueryParts::default();
    let mut choice_slots: BTreeMap<u32, ()> = BTreeMap::new();

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| FactError::Syntax {
            line: line_no,
            message,
        };
        for fact in parse_line(line).map_err(err)? {
            let Term::Compound(name, args) = &fact else {
                return Err(err(format!("expected a fact, found {fact:?}")));
            };
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("`{name}` takes {n} arguments, found {}", args.len())))
                }
            };
            match name.as_str() {
                "size" | "color" | "material" | "shape" => {
                    arity(2)?;
                    let id = ObjectId(int(&args[0]).map_err(err)?);
                    let value = match &args[1] {
                        Term::Int(n) => n.to_string(),
                        t => atom(t).map_err(err)?.to_string(),
                    };
                    let attr: Attribute = name.parse().expect("matched attribute name");
                    let record = objects.entry(id).or_insert_with(|| {
                        object_order.push(id);
                        ObjectRecord {
                            id,
                            features: BTreeMap::new(),
                        }
                    });
                    record.features.insert(attr, value);
                }
                "collision" | "enter" => {
                    arity(3)?;
                    let a = int(&args[0]).map_err(err)?;
                    let b = int(&args[1]).map_err(err)?;
                    let f = int(&args[2]).map_err(err)?;
                    if a == b {
                        return Err(err(format!("object {a} interacts with itself")));
                    }
                    events.push(if name == "collision" {
                        Event::collide(a, b, f)
                    } else {
                        Event::enter(a, b, f)
                    });
                }
                "counterfact" => {
                    arity(2)?;
                    if atom(&args[0]).map_err(err)? != "remove" {
                        return Err(err("only `remove` counterfacts are supported".into()));
                    }
                    parts.seen = true;
                    match &args[1] {
                        Term::Atom(a) if a == "any" => parts.remove_any = true,
                        t => parts.removed.push(qobj(t).map_err(err)?),
                    }
                }
                "feature" => {
                    arity(2)?;
                    let q = qobj(&args[0]).map_err(err)?;
                    let v = atom(&args[1]).map_err(err)?.to_string();
                    parts.seen = true;
                    parts.features.entry(q).or_default().push(v);
                }
                "option" => {
                    arity(4)?;
                    let idx = int(&args[0]).map_err(err)?;
                    let s = qobj(&args[1]).map_err(err)?;
                    let kind = atom(&args[2]).map_err(err)?.parse().map_err(|e| err(format!("{e}")))?;
                    let o = qobj(&args[3]).map_err(err)?;
                    parts.seen = true;
                    parts.options.push((idx, s, kind, o));
                }
                "query" => {
                    parts.seen = true;
                    match args.as_slice() {
                        [Term::Atom(a)] if a == "negated" => parts.negated = true,
                        [Term::Atom(a), kind, target] if a == "counting" => {
                            let kind = atom(kind).map_err(err)?.parse().map_err(|e| err(format!("{e}")))?;
                            parts.counting = Some((kind, qobj(target).map_err(err)?));
                        }
                        _ => return Err(err("unrecognized query fact".into())),
                    }
                }
                "question" => {
                    arity(2)?;
                    match atom(&args[0]).map_err(err)? {
                        "yes" => {}
                        "no" => parts.negated = true,
                        other => return Err(err(format!("question polarity `{other}`"))),
                    }
                    parts.seen = true;
                    if !parts.removed.contains(&0) {
                        parts.removed.push(0);
                    }
                    let v = atom(&args[1]).map_err(err)?.to_string();
                    parts.features.entry(0).or_default().push(v);
                }
                "choice" => {
                    arity(3)?;
                    let c = int(&args[0]).map_err(err)?;
                    let slot = int(&args[1]).map_err(err)?;
                    if !(1..=2).contains(&slot) {
                        return Err(err(format!("choice slot {slot} is not 1 or 2")));
                    }
                    let v = atom(&args[2]).map_err(err)?.to_string();
                    parts.seen = true;
                    parts.features.entry(c * 10 + slot).or_default().push(v);
                    if choice_slots.insert(c, ()).is_none() {
                        parts.options.push((c, c * 10 + 1, EventKind::Collide, c * 10 + 2));
                    }
                }
                other => return Err(err(format!("unknown fact `{other}`"))),
            }
        }
    }
    Ok(FactProgram {
        objects: object_order.into_iter().map(|id| objects.remove(&id).expect("recorded id")).collect(),
        events,
        question: parts.finish()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const REFERENCE_OBJECTS: &str = "\
color(0,yellow). material(0,rubber). shape(0,cylinder).
color(1,blue). material(1,metal). shape(1,cylinder).
color(2,green). material(2,rubber). shape(2,cylinder).
color(3,red). material(3,metal). shape(3,cylinder).
color(4,red). material(4,rubber). shape(4,sphere).

collision(0,1,16).
collision(0,2,46).
collision(3,0,155).
";

    #[test]
    fn empty_program_emits_nothing() {
        assert_eq!(FactProgram::default().emit(), "");
    }

    #[test]
    fn object_block_round_trips_byte_for_byte() {
        let program = parse_facts(REFERENCE_OBJECTS).unwrap();
        assert_eq!(program.objects.len(), 5);
        assert_eq!(program.events[2], Event::collide(3, 0, 155));
        assert_eq!(program.emit(), REFERENCE_OBJECTS);
    }

    #[test]
    fn multiple_choice_shorthand() {
        let text = "question(yes,green).question(yes,cylinder).\n\
                    choice(1, 1, yellow).choice(1, 1, cylinder).\n\
                    choice(1, 2, blue).\n";
        let q = parse_facts(text).unwrap().question.unwrap();
        assert_eq!(
            q.counterfact,
            Some(Counterfact::Remove(vec![vec!["green".into(), "cylinder".into()]]))
        );
        assert_eq!(q.options.len(), 1);
        assert_eq!(q.options[0].subject, vec!["yellow".to_string(), "cylinder".to_string()]);
        assert_eq!(q.options[0].kind, EventKind::Collide);
        assert!(!q.negated);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_facts("color(0,red).\ncolor(1 blue).\n").unwrap_err();
        assert!(matches!(err, FactError::Syntax { line: 2, .. }), "{err:?}");
        let err = parse_facts("collision(1,1,3).").unwrap_err();
        assert!(matches!(err, FactError::Syntax { line: 1, .. }));
    }

    #[test]
    fn query_block_layout() {
        let program = FactProgram {
            objects: vec![],
            events: vec![],
            question: Some(FactQuestion {
                counterfact: Some(Counterfact::Remove(vec![vec!["large".into(), "cyan".into()]])),
                options: vec![FactOption {
                    index: 1,
                    subject: vec!["small".into(), "purple".into()],
                    kind: EventKind::Enter,
                    object: vec!["basket".into()],
                }],
                counting: None,
                negated: false,
            }),
        };
        let want = "counterfact(remove,qobj(0)).\nfeature(qobj(0),large).\nfeature(qobj(0),cyan).\n\n\
                    option(1, qobj(1), enter, qobj(2)).\nfeature(qobj(1),small).feature(qobj(1),purple).\n\
                    feature(qobj(2),basket).\n";
        assert_eq!(program.emit_with(FactStyle::Compact), want);
        assert_eq!(parse_facts(want).unwrap(), program);
    }

    fn arb_program() -> impl Strategy<Value = FactProgram> {
        const COLORS: [&str; 4] = ["red", "blue", "green", "gray"];
        const SHAPES: [&str; 3] = ["cube", "sphere", "cylinder"];
        let objects = prop::collection::vec((prop::option::of(0usize..4), prop::option::of(0usize..3)), 0..7);
        let events = prop::collection::vec((0u32..7, 1u32..7, 0u32..200, any::<bool>()), 0..6);
        let question = prop::option::of((
            prop::collection::vec(prop::collection::vec(0usize..4, 1..3), 0..3),
            any::<bool>(),
            prop::collection::vec((1u32..5, 0usize..4, 0usize..3, any::<bool>()), 0..4),
            prop::option::of((any::<bool>(), 0usize..3)),
            any::<bool>(),
        ));
        (objects, events, question).prop_map(|(objs, evs, q)| {
            let objects = objs
                .into_iter()
                .enumerate()
                .map(|(i, (c, s))| {
                    let mut o = ObjectRecord::new(i as u32);
                    if let Some(c) = c {
                        o = o.with(Attribute::Color, COLORS[c]);
                    }
                    if let Some(s) = s {
                        o = o.with(Attribute::Shape, SHAPES[s]);
                    }
                    o
                })
                .filter(|o| !o.features.is_empty())
                .collect();
            let events = evs
                .into_iter()
                .map(|(a, d, f, enter)| {
                    let b = (a + d) % 8;
                    if enter {
                        Event::enter(a, b, f)
                    } else {
                        Event::collide(a, b, f)
                    }
                })
                .filter(|e| e.a != e.b)
                .collect();
            let question = q.map(|(removed, any, opts, counting, negated)| {
                let counterfact = if any {
                    Some(Counterfact::RemoveAny)
                } else if removed.is_empty() {
                    None
                } else {
                    Some(Counterfact::Remove(
                        removed
                            .into_iter()
                            .map(|vs| vs.into_iter().map(|v| COLORS[v].to_string()).collect())
                            .collect(),
                    ))
                };
                let options = opts
                    .into_iter()
                    .map(|(index, c, s, enter)| FactOption {
                        index,
                        subject: vec![COLORS[c].to_string()],
                        kind: if enter { EventKind::Enter } else { EventKind::Collide },
                        object: vec![SHAPES[s].to_string(), COLORS[(c + 1) % 4].to_string()],
                    })
                    .collect();
                let counting = counting.map(|(enter, s)| FactCounting {
                    kind: if enter { EventKind::Enter } else { EventKind::Collide },
                    target: vec![SHAPES[s].to_string()],
                });
                FactQuestion {
                    counterfact,
                    options,
                    counting,
                    negated,
                }
            });
            FactProgram {
                objects,
                events,
                question: question.filter(|q| !q.is_empty()),
            }
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_emit(program in arb_program(), compact in any::<bool>()) {
            let style = if compact { FactStyle::Compact } else { FactStyle::Spaced };
            let text = program.emit_with(style);
            prop_assert_eq!(parse_facts(&text).unwrap(), program);
        }
    }
}

//! Scene vocabulary shared by the graph, the simulators and the answering
//! stages: objects, per-frame states, events and counterfactual queries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Video frame index. Perception frames start at 1; CRAFT description
/// ordinals start at 0.
pub type Frame = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub u32);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("malformed event: object {object} interacts with itself at frame {frame}")]
    MalformedEvent { object: ObjectId, frame: Frame },
    #[error("no object matches selector {0}")]
    NoReferent(String),
    #[error("selector {selector} matches several objects: {matches:?}")]
    AmbiguousReferent {
        selector: String,
        matches: Vec<ObjectId>,
    },
    #[error("subject and object of the query both resolve to {0}")]
    SameReferent(ObjectId),
    #[error("duplicate object id {0}")]
    DuplicateObject(ObjectId),
    #[error("event references unknown object {0}")]
    UnknownObject(ObjectId),
    #[error("frame {frame} of object {object} is not after the previous state")]
    NonMonotonicFrame { object: ObjectId, frame: Frame },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("scene document: {0}")]
    Document(String),
}

/// Object attributes that appear in the fact format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Size,
    Color,
    Material,
    Shape,
}

impl Attribute {
    /// Canonical emission order.
    pub const ALL: [Attribute; 4] = [
        Attribute::Size,
        Attribute::Color,
        Attribute::Material,
        Attribute::Shape,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Size => "size",
            Attribute::Color => "color",
            Attribute::Material => "material",
            Attribute::Shape => "shape",
        }
    }
}

impl FromStr for Attribute {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "size" => Ok(Attribute::Size),
            "color" => Ok(Attribute::Color),
            "material" => Ok(Attribute::Material),
            "shape" => Ok(Attribute::Shape),
            other => Err(ModelError::UnknownAttribute(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub id: ObjectId,
    #[serde(default)]
    pub features: BTreeMap<Attribute, String>,
}

impl ObjectRecord {
    pub fn new(id: u32) -> Self {
        Self {
            id: ObjectId(id),
            features: BTreeMap::new(),
        }
    }

    pub fn with(mut self, attribute: Attribute, value: impl Into<String>) -> Self {
        self.features.insert(attribute, value.into());
        self
    }

    pub fn feature(&self, attribute: Attribute) -> Option<&str> {
        self.features.get(&attribute).map(String::as_str)
    }

    /// Baskets and the ground never move and never propagate causation.
    pub fn is_immovable(&self) -> bool {
        matches!(self.feature(Attribute::Shape), Some("basket" | "ground"))
    }

    pub fn has_value(&self, value: &str) -> bool {
        self.features.values().any(|v| v == value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// State of one object at one frame. Perceived states may lack a velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjState {
    pub frame: Frame,
    pub pos: Vec2,
    pub vel: Option<Vec2>,
}

impl ObjState {
    pub fn at(frame: Frame, pos: Vec2) -> Self {
        Self {
            frame,
            pos,
            vel: None,
        }
    }

    pub fn moving(frame: Frame, pos: Vec2, vel: Vec2) -> Self {
        Self {
            frame,
            pos,
            vel: Some(vel),
        }
    }
}

/// Per-object state sequences with strictly increasing frames.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    tracks: BTreeMap<ObjectId, Vec<ObjState>>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, object: ObjectId, state: ObjState) -> Result<(), ModelError> {
        let track = self.tracks.entry(object).or_default();
        if let Some(last) = track.last() {
            if state.frame <= last.frame {
                return Err(ModelError::NonMonotonicFrame {
                    object,
                    frame: state.frame,
                });
            }
        }
        track.push(state);
        Ok(())
    }

    pub fn from_tracks(tracks: BTreeMap<ObjectId, Vec<ObjState>>) -> Result<Self, ModelError> {
        let mut trace = Trace::new();
        for (object, states) in tracks {
            trace.tracks.entry(object).or_default();
            for state in states {
                trace.push(object, state)?;
            }
        }
        Ok(trace)
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.tracks.keys().copied()
    }

    pub fn track(&self, object: ObjectId) -> Option<&[ObjState]> {
        self.tracks.get(&object).map(Vec::as_slice)
    }

    pub fn tracks(&self) -> &BTreeMap<ObjectId, Vec<ObjState>> {
        &self.tracks
    }

    pub fn state_at(&self, object: ObjectId, frame: Frame) -> Option<&ObjState> {
        let track = self.tracks.get(&object)?;
        track
            .binary_search_by_key(&frame, |s| s.frame)
            .ok()
            .map(|i| &track[i])
    }

    /// Same positions with every velocity dropped, as a position-only
    /// perception model would report them.
    pub fn without_velocities(&self) -> Trace {
        let mut out = self.clone();
        for s in out.tracks.values_mut().flatten() {
            s.vel = None;
        }
        out
    }

    pub fn last_frame(&self, object: ObjectId) -> Option<Frame> {
        self.tracks.get(&object)?.last().map(|s| s.frame)
    }

    /// True when `object` has exactly one state for every frame in `1..=max`.
    pub fn is_dense(&self, object: ObjectId, max: Frame) -> bool {
        self.tracks.get(&object).is_some_and(|track| {
            track.len() == max as usize
                && track.iter().enumerate().all(|(i, s)| s.frame == i as Frame + 1)
        })
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.values().all(Vec::is_empty)
    }

    /// Keep only the listed objects.
    pub fn restricted(&self, keep: &BTreeSet<ObjectId>) -> Trace {
        Trace {
            tracks: self
                .tracks
                .iter()
                .filter(|(id, _)| keep.contains(id))
                .map(|(id, t)| (*id, t.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Collide,
    Enter,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Collide => "collide",
            EventKind::Enter => "enter",
        }
    }
}

impl FromStr for EventKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "collide" | "collision" => Ok(EventKind::Collide),
            "enter" => Ok(EventKind::Enter),
            other => Err(ModelError::Document(format!("unknown event kind `{other}`"))),
        }
    }
}

/// A collision or an enter event. Enter events are directed: `a` enters `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub a: ObjectId,
    pub b: ObjectId,
    pub frame: Frame,
}

impl Event {
    pub fn collide(a: u32, b: u32, frame: Frame) -> Self {
        Self {
            kind: EventKind::Collide,
            a: ObjectId(a),
            b: ObjectId(b),
            frame,
        }
    }

    pub fn enter(a: u32, b: u32, frame: Frame) -> Self {
        Self {
            kind: EventKind::Enter,
            a: ObjectId(a),
            b: ObjectId(b),
            frame,
        }
    }

    /// Whether this is an event of `kind` from `x` to `y`; collisions match
    /// in either orientation.
    pub fn matches(&self, kind: EventKind, x: ObjectId, y: ObjectId) -> bool {
        if self.kind != kind {
            return false;
        }
        (self.a == x && self.b == y) || (kind == EventKind::Collide && self.a == y && self.b == x)
    }

    pub fn involves(&self, object: ObjectId) -> bool {
        self.a == object || self.b == object
    }

    fn canonical(mut self) -> Self {
        if self.kind == EventKind::Collide && self.a > self.b {
            std::mem::swap(&mut self.a, &mut self.b);
        }
        self
    }

    fn sort_key(&self) -> (Frame, ObjectId, ObjectId, EventKind) {
        (self.frame, self.a, self.b, self.kind)
    }
}

/// Normalized events: collisions stored once with `a < b`, sorted by frame
/// then pair, no duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct EventSet {
    events: Vec<Event>,
}

impl EventSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Event> {
        self.events.iter()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn as_slice(&self) -> &[Event] {
        &self.events
    }

    /// Any frame at which `kind` happens between `x` and `y`.
    pub fn contains_pair(&self, kind: EventKind, x: ObjectId, y: ObjectId) -> bool {
        self.events.iter().any(|e| e.matches(kind, x, y))
    }

    pub fn frames_of(&self, kind: EventKind, x: ObjectId, y: ObjectId) -> Vec<Frame> {
        self.events
            .iter()
            .filter(|e| e.matches(kind, x, y))
            .map(|e| e.frame)
            .collect()
    }

    /// Union of two normalized sets.
    pub fn merged(&self, other: &EventSet) -> EventSet {
        let mut all = self.events.clone();
        all.extend_from_slice(&other.events);
        normalize_events(&all).expect("inputs were already normalized")
    }

    pub fn filtered(&self, mut keep: impl FnMut(&Event) -> bool) -> EventSet {
        EventSet {
            events: self.events.iter().copied().filter(|e| keep(e)).collect(),
        }
    }
}

impl<'a> IntoIterator for &'a EventSet {
    type Item = &'a Event;
    type IntoIter = std::slice::Iter<'a, Event>;
    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}

pub fn normalize_events(events: &[Event]) -> Result<EventSet, ModelError> {
    let mut out = Vec::with_capacity(events.len());
    for event in events {
        if event.a == event.b {
            return Err(ModelError::MalformedEvent {
                object: event.a,
                frame: event.frame,
            });
        }
        out.push(event.canonical());
    }
    out.sort_by_key(Event::sort_key);
    out.dedup();
    Ok(EventSet { events: out })
}

/// Refers to a scene object either directly or by a conjunction of feature
/// values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Selector {
    Id(ObjectId),
    Features(Vec<String>),
}

impl Selector {
    pub fn features<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Selector::Features(values.into_iter().map(Into::into).collect())
    }

    fn matches(&self, object: &ObjectRecord) -> bool {
        match self {
            Selector::Id(id) => object.id == *id,
            Selector::Features(values) => values.iter().all(|v| object.has_value(v)),
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Id(id) => write!(f, "#{id}"),
            Selector::Features(values) => write!(f, "{{{}}}", values.join(", ")),
        }
    }
}

impl FromStr for Selector {
    type Err = ModelError;

    /// `#3` selects object 3; anything else is a whitespace-separated list of
    /// feature values.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(id) = s.strip_prefix('#') {
            return id
                .parse()
                .map(|n| Selector::Id(ObjectId(n)))
                .map_err(|_| ModelError::Document(format!("bad object id `{s}`")));
        }
        Ok(Selector::features(s.split_whitespace()))
    }
}

pub fn resolve_selector(selector: &Selector, objects: &[ObjectRecord]) -> Result<ObjectId, ModelError> {
    let matches: Vec<ObjectId> = objects
        .iter()
        .filter(|o| selector.matches(o))
        .map(|o| o.id)
        .collect();
    match matches.as_slice() {
        [] => Err(ModelError::NoReferent(selector.to_string())),
        [only] => Ok(*only),
        _ => Err(ModelError::AmbiguousReferent {
            selector: selector.to_string(),
            matches,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterventionKind {
    Remove,
    Replace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intervention {
    pub target: Selector,
    pub kind: InterventionKind,
}

impl Intervention {
    pub fn remove(target: Selector) -> Self {
        Self {
            target,
            kind: InterventionKind::Remove,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryVariant {
    /// Does `kind` happen between `subject` and `object`?
    PairEvent {
        subject: Selector,
        kind: EventKind,
        object: Selector,
    },
    /// Same question, asked for the removal of any single other object.
    RemoveAny {
        subject: Selector,
        kind: EventKind,
        object: Selector,
    },
    /// How many objects take part in `kind` with `target`?
    Counting { kind: EventKind, target: Selector },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    #[serde(default)]
    pub interventions: Vec<Intervention>,
    pub variant: QueryVariant,
    #[serde(default)]
    pub negated: bool,
}

impl Query {
    pub fn remove_pair(removed: Selector, subject: Selector, kind: EventKind, object: Selector) -> Self {
        Self {
            interventions: vec![Intervention::remove(removed)],
            variant: QueryVariant::PairEvent {
                subject,
                kind,
                object,
            },
            negated: false,
        }
    }

    pub fn resolve(&self, objects: &[ObjectRecord]) -> Result<ResolvedQuery, ModelError> {
        let mut intervened = BTreeSet::new();
        let mut removed = BTreeSet::new();
        for intervention in &self.interventions {
            let id = resolve_selector(&intervention.target, objects)?;
            intervened.insert(id);
            if intervention.kind == InterventionKind::Remove {
                removed.insert(id);
            }
        }
        let pair = |subject: &Selector, object: &Selector| -> Result<(ObjectId, ObjectId), ModelError> {
            let s = resolve_selector(subject, objects)?;
            let o = resolve_selector(object, objects)?;
            if s == o {
                return Err(ModelError::SameReferent(s));
            }
            Ok((s, o))
        };
        let variant = match &self.variant {
            QueryVariant::PairEvent {
                subject,
                kind,
                object,
            } => {
                let (subject, object) = pair(subject, object)?;
                ResolvedVariant::Pair {
                    subject,
                    kind: *kind,
                    object,
                }
            }
            QueryVariant::RemoveAny {
                subject,
                kind,
                object,
            } => {
                let (subject, object) = pair(subject, object)?;
                ResolvedVariant::RemoveAny {
                    subject,
                    kind: *kind,
                    object,
                }
            }
            QueryVariant::Counting { kind, target } => ResolvedVariant::Counting {
                kind: *kind,
                target: resolve_selector(target, objects)?,
            },
        };
        Ok(ResolvedQuery {
            intervened,
            removed,
            variant,
            negated: self.negated,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolvedVariant {
    Pair {
        subject: ObjectId,
        kind: EventKind,
        object: ObjectId,
    },
    RemoveAny {
        subject: ObjectId,
        kind: EventKind,
        object: ObjectId,
    },
    Counting {
        kind: EventKind,
        target: ObjectId,
    },
}

/// A query with every selector bound to a scene object. `removed` is always a
/// subset of `intervened`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedQuery {
    pub intervened: BTreeSet<ObjectId>,
    pub removed: BTreeSet<ObjectId>,
    pub variant: ResolvedVariant,
    pub negated: bool,
}

impl ResolvedQuery {
    pub fn pair(removed: &[u32], subject: u32, kind: EventKind, object: u32) -> Self {
        let removed: BTreeSet<ObjectId> = removed.iter().map(|&i| ObjectId(i)).collect();
        Self {
            intervened: removed.clone(),
            removed,
            variant: ResolvedVariant::Pair {
                subject: ObjectId(subject),
                kind,
                object: ObjectId(object),
            },
            negated: false,
        }
    }

    pub fn is_remove_any(&self) -> bool {
        matches!(self.variant, ResolvedVariant::RemoveAny { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Determination {
    Yes,
    No,
    Undetermined,
}

impl Determination {
    pub fn is_determined(self) -> bool {
        self != Determination::Undetermined
    }
}

/// A yes/no prediction from an external model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prediction {
    Yes,
    No,
}

impl Prediction {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Prediction::Yes
        } else {
            Prediction::No
        }
    }

    pub fn as_bool(self) -> bool {
        self == Prediction::Yes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    Count(u32),
    Undetermined,
}

impl Answer {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Answer::Yes => Some(true),
            Answer::No => Some(false),
            _ => None,
        }
    }

    /// Flip yes/no; counts and undetermined answers are unchanged.
    pub fn negate_if(self, negated: bool) -> Self {
        match (self, negated) {
            (Answer::Yes, true) => Answer::No,
            (Answer::No, true) => Answer::Yes,
            (other, _) => other,
        }
    }
}

impl From<Prediction> for Answer {
    fn from(p: Prediction) -> Self {
        Answer::from_bool(p.as_bool())
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Yes => f.write_str("yes"),
            Answer::No => f.write_str("no"),
            Answer::Count(n) => write!(f, "{n}"),
            Answer::Undetermined => f.write_str("undetermined"),
        }
    }
}

impl Serialize for Answer {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Answer::Count(n) => serializer.serialize_u32(*n),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Answer {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u32),
            Word(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Count(n) => Ok(Answer::Count(n)),
            Raw::Word(w) => match w.as_str() {
                "yes" => Ok(Answer::Yes),
                "no" => Ok(Answer::No),
                "undetermined" | "tbd" => Ok(Answer::Undetermined),
                other => Err(de::Error::custom(format!("unknown answer `{other}`"))),
            },
        }
    }
}

/// A perceived scene: objects, their trajectories and the detected events.
///
/// `events` keeps the orientation and order in which events were supplied;
/// reasoning code works on [`normalize_events`] of it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene {
    pub objects: Vec<ObjectRecord>,
    pub max_v: Frame,
    pub traces: Trace,
    pub events: Vec<Event>,
}

#[derive(Serialize, Deserialize)]
struct SceneDocument {
    objects: Vec<ObjectRecord>,
    max_v: Frame,
    #[serde(default)]
    traces: BTreeMap<ObjectId, Vec<(Frame, f64, f64)>>,
    #[serde(default)]
    events: Vec<Event>,
}

impl Scene {
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = BTreeSet::new();
        for object in &self.objects {
            if !seen.insert(object.id) {
                return Err(ModelError::DuplicateObject(object.id));
            }
        }
        for event in &self.events {
            for id in [event.a, event.b] {
                if !seen.contains(&id) {
                    return Err(ModelError::UnknownObject(id));
                }
            }
        }
        for id in self.traces.objects() {
            if !seen.contains(&id) {
                return Err(ModelError::UnknownObject(id));
            }
        }
        normalize_events(&self.events).map(|_| ())
    }

    pub fn normalized_events(&self) -> Result<EventSet, ModelError> {
        normalize_events(&self.events)
    }

    pub fn object(&self, id: ObjectId) -> Option<&ObjectRecord> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn object_ids(&self) -> BTreeSet<ObjectId> {
        self.objects.iter().map(|o| o.id).collect()
    }

    pub fn to_json(&self) -> String {
        let doc = SceneDocument {
            objects: self.objects.clone(),
            max_v: self.max_v,
            traces: self
                .traces
                .tracks()
                .iter()
                .map(|(id, states)| {
                    (
                        *id,
                        states.iter().map(|s| (s.frame, s.pos.x, s.pos.y)).collect(),
                    )
                })
                .collect(),
            events: self.events.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("scene documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: SceneDocument =
            serde_json::from_str(text).map_err(|e| ModelError::Document(e.to_string()))?;
        let tracks = doc
            .traces
            .into_iter()
            .map(|(id, rows)| {
                let states = rows
                    .into_iter()
                    .map(|(frame, x, y)| ObjState::at(frame, Vec2::new(x, y)))
                    .collect();
                (id, states)
            })
            .collect();
        let scene = Scene {
            objects: doc.objects,
            max_v: doc.max_v,
            traces: Trace::from_tracks(tracks)?,
            events: doc.events,
        };
        scene.validate()?;
        Ok(scene)
    }
}

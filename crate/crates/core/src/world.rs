//! Ground-truth 2D world of equal-mass discs: exact stepping, counterfactual
//! re-simulation, degraded perception and a randomized scene generator.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    normalize_events, Attribute, Event, EventKind, EventSet, Frame, ObjState, ObjectId, ObjectRecord, Trace, Vec2,
};
use crate::sps::{detect_collisions, CollisionDetector, DEFAULT_MAX_V};

pub const DEFAULT_RADIUS: f64 = 11.5;
/// Frames after a contact during which the same pair cannot report again.
pub const CONTACT_DEBOUNCE: Frame = 5;
pub const MAX_BODIES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("bodies {0} and {1} overlap at frame 1")]
    Overlap(ObjectId, ObjectId),
    #[error("a world holds 1 to {MAX_BODIES} bodies, got {0}")]
    BodyCount(usize),
    #[error("body {0} starts outside the arena")]
    OutOfArena(ObjectId),
    #[error("duplicate body id {0}")]
    DuplicateBody(ObjectId),
    #[error("invalid noise setting: {0}")]
    InvalidNoise(String),
    #[error("no state with velocity for object {object} at frame {frame}")]
    IncompleteState { object: ObjectId, frame: Frame },
    #[error("simulator has no parameters for object {0}")]
    UnknownBody(ObjectId),
    #[error("scene generation gave up after {0} attempts")]
    GenerationExhausted(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub width: f64,
    pub height: f64,
}

impl Default for Arena {
    fn default() -> Self {
        Self {
            width: 480.0,
            height: 320.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub id: ObjectId,
    #[serde(default)]
    pub features: BTreeMap<Attribute, String>,
    pub radius: f64,
    pub position: Vec2,
    pub velocity: Vec2,
    /// Deceleration per frame; the product of gravity and the friction
    /// coefficient.
    pub friction: f64,
}

impl BodySpec {
    pub fn new(id: u32, position: Vec2, velocity: Vec2) -> Self {
        Self {
            id: ObjectId(id),
            features: BTreeMap::new(),
            radius: DEFAULT_RADIUS,
            position,
            velocity,
            friction: 0.0,
        }
    }

    pub fn record(&self) -> ObjectRecord {
        ObjectRecord {
            id: self.id,
            features: self.features.clone(),
        }
    }

    fn params(&self) -> BodyParams {
        BodyParams {
            radius: self.radius,
            friction: self.friction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub arena: Arena,
    pub bodies: Vec<BodySpec>,
    pub max_v: Frame,
    pub seed: u64,
}

impl WorldConfig {
    pub fn new(arena: Arena, bodies: Vec<BodySpec>) -> Self {
        Self {
            arena,
            bodies,
            max_v: DEFAULT_MAX_V,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        if self.bodies.is_empty() || self.bodies.len() > MAX_BODIES {
            return Err(WorldError::BodyCount(self.bodies.len()));
        }
        let mut ids = BTreeSet::new();
        for b in &self.bodies {
            if !ids.insert(b.id) {
                return Err(WorldError::DuplicateBody(b.id));
            }
            let p = b.position;
            if p.x < 0.0 || p.y < 0.0 || p.x > self.arena.width || p.y > self.arena.height {
                return Err(WorldError::OutOfArena(b.id));
            }
        }
        for (i, a) in self.bodies.iter().enumerate() {
            for b in &self.bodies[i + 1..] {
                if a.position.distance(b.position) < a.radius + b.radius {
                    return Err(WorldError::Overlap(a.id.min(b.id), a.id.max(b.id)));
                }
            }
        }
        Ok(())
    }

    pub fn objects(&self) -> Vec<ObjectRecord> {
        let mut out: Vec<ObjectRecord> = self.bodies.iter().map(BodySpec::record).collect();
        out.sort_by_key(|o| o.id);
        out
    }

    pub fn initial_states(&self, exclude: &BTreeSet<ObjectId>) -> BTreeMap<ObjectId, ObjState> {
        self.bodies
            .iter()
            .filter(|b| !exclude.contains(&b.id))
            .map(|b| (b.id, ObjState::moving(1, b.position, b.velocity)))
            .collect()
    }

    pub fn body_params(&self) -> BTreeMap<ObjectId, BodyParams> {
        self.bodies.iter().map(|b| (b.id, b.params())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Gaussian position noise of perceived states, in scene units.
    pub sigma_p: f64,
    /// Probability that a perceived state is missing.
    pub p_drop: f64,
    /// Scale of the per-step perturbation of heading, speed and friction in
    /// the simulator.
    pub sigma_s: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub const ZERO: NoiseConfig = NoiseConfig {
        sigma_p: 0.0,
        p_drop: 0.0,
        sigma_s: 0.0,
        seed: 0,
    };

    pub fn validate(&self) -> Result<(), WorldError> {
        let finite = [self.sigma_p, self.p_drop, self.sigma_s].iter().all(|v| v.is_finite());
        if !finite || self.sigma_p < 0.0 || self.sigma_s < 0.0 {
            return Err(WorldError::InvalidNoise("sigma values must be finite and non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.p_drop) {
            return Err(WorldError::InvalidNoise(format!("p_drop {} is outside [0, 1)", self.p_drop)));
        }
        Ok(())
    }

    pub fn is_perception_exact(&self) -> bool {
        self.sigma_p == 0.0 && self.p_drop == 0.0
    }
}

/// Heading jitter in radians per unit of `sigma_s`.
pub const HEADING_JITTER: f64 = 0.01;
/// Relative speed jitter per unit of `sigma_s`.
pub const SPEED_JITTER: f64 = 0.01;
/// Relative friction jitter per unit of `sigma_s`.
pub const FRICTION_JITTER: f64 = 0.25;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for a named purpose and index under one seed.
pub fn substream(seed: u64, name: &str, index: u64) -> ChaCha8Rng {
    let tag = name.bytes().fold(0xCBF2_9CE4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ tag));
    rng.set_stream(index);
    rng
}

/// One frame of a simulator: states at `frame` in, states at `frame + 1`
/// and the collisions at `frame` out.
pub trait FrameSimulator {
    fn step(
        &mut self,
        frame: Frame,
        states: &BTreeMap<ObjectId, ObjState>,
    ) -> Result<(BTreeMap<ObjectId, ObjState>, Vec<Event>), WorldError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyParams {
    pub radius: f64,
    pub friction: f64,
}

/// Fixed-step integrator: wall reflection, pairwise elastic contact in id
/// order, friction, then motion. The velocity stored at frame `t + 1` is the
/// displacement from `t` to `t + 1`.
pub struct Stepper {
    arena: Arena,
    bodies: BTreeMap<ObjectId, BodyParams>,
    sigma_s: f64,
    rng: ChaCha8Rng,
    last_contact: BTreeMap<(ObjectId, ObjectId), Frame>,
}

impl Stepper {
    pub fn exact(arena: Arena, bodies: BTreeMap<ObjectId, BodyParams>) -> Self {
        Self::noisy(arena, bodies, 0.0, substream(0, "sim-noise", 0))
    }

    pub fn noisy(arena: Arena, bodies: BTreeMap<ObjectId, BodyParams>, sigma_s: f64, rng: ChaCha8Rng) -> Self {
        Self {
            arena,
            bodies,
            sigma_s,
            rng,
            last_contact: BTreeMap::new(),
        }
    }

    pub fn for_world(config: &WorldConfig) -> Self {
        Self::exact(config.arena, config.body_params())
    }

    fn params(&self, id: ObjectId) -> Result<BodyParams, WorldError> {
        self.bodies.get(&id).copied().ok_or(WorldError::UnknownBody(id))
    }
}

impl FrameSimulator for Stepper {
    fn step(
        &mut self,
        frame: Frame,
        states: &BTreeMap<ObjectId, ObjState>,
    ) -> Result<(BTreeMap<ObjectId, ObjState>, Vec<Event>), WorldError> {
        let ids: Vec<ObjectId> = states.keys().copied().collect();
        let mut pos = Vec::with_capacity(ids.len());
        let mut vel = Vec::with_capacity(ids.len());
        let mut params = Vec::with_capacity(ids.len());
        for &id in &ids {
            let s = states[&id];
            let v = s.vel.ok_or(WorldError::IncompleteState { object: id, frame })?;
            if s.frame != frame {
                return Err(WorldError::IncompleteState { object: id, frame });
            }
            pos.push(s.pos);
            vel.push(v);
            params.push(self.params(id)?);
        }

        for i in 0..ids.len() {
            let (p, r, v) = (pos[i], params[i].radius, &mut vel[i]);
            if (p.x - r < 0.0 && v.x < 0.0) || (p.x + r > self.arena.width && v.x > 0.0) {
                v.x = -v.x;
            }
            if (p.y - r < 0.0 && v.y < 0.0) || (p.y + r > self.arena.height && v.y > 0.0) {
                v.y = -v.y;
            }
        }

        let mut events = Vec::new();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                let d = pos[j] - pos[i];
                let dist = d.norm();
                if dist >= params[i].radius + params[j].radius || dist == 0.0 {
                    continue;
                }
                let n = d * (1.0 / dist);
                if (vel[j] - vel[i]).dot(n) >= 0.0 {
                    continue;
                }
                let (ui, uj) = (vel[i].dot(n), vel[j].dot(n));
                vel[i] += n * (uj - ui);
                vel[j] += n * (ui - uj);
                let key = (ids[i], ids[j]);
                if self.last_contact.get(&key).is_none_or(|&f| frame - f > CONTACT_DEBOUNCE) {
                    events.push(Event {
                        kind: EventKind::Collide,
                        a: ids[i],
                        b: ids[j],
                        frame,
                    });
                }
                self.last_contact.insert(key, frame);
            }
        }

        let mut next = BTreeMap::new();
        for i in 0..ids.len() {
            let mut v = vel[i];
            let mut friction = params[i].friction;
            if self.sigma_s > 0.0 {
                let turn: f64 = StandardNormal.sample(&mut self.rng);
                let stretch: f64 = StandardNormal.sample(&mut self.rng);
                let drag: f64 = StandardNormal.sample(&mut self.rng);
                let angle = self.sigma_s * HEADING_JITTER * turn;
                let (sin, cos) = angle.sin_cos();
                v = Vec2::new(v.x * cos - v.y * sin, v.x * sin + v.y * cos)
                    * (1.0 + self.sigma_s * SPEED_JITTER * stretch).max(0.0);
                friction = (friction * (1.0 + self.sigma_s * FRICTION_JITTER * drag)).max(0.0);
            }
            let speed = v.norm();
            if speed > 0.0 {
                v = v * ((speed - friction).max(0.0) / speed);
            }
            next.insert(ids[i], ObjState::moving(frame + 1, pos[i] + v, v));
        }
        Ok((next, events))
    }
}

/// Exact trajectories on `1..=horizon` and the collisions at frames
/// `1..=horizon`, with the `remove`d bodies absent from the start.
pub fn simulate_truth(
    config: &WorldConfig,
    remove: &BTreeSet<ObjectId>,
    horizon: Frame,
) -> Result<(Trace, EventSet), WorldError> {
    config.validate()?;
    let mut stepper = Stepper::for_world(config);
    run_stepper(&mut stepper, config.initial_states(remove), horizon)
}

/// Drives any frame simulator from frame 1 without perception.
pub fn run_stepper(
    sim: &mut dyn FrameSimulator,
    initial: BTreeMap<ObjectId, ObjState>,
    horizon: Frame,
) -> Result<(Trace, EventSet), WorldError> {
    let mut trace = Trace::new();
    let mut events = Vec::new();
    let mut current = initial;
    for t in 1..=horizon {
        for (id, s) in &current {
            trace.push(*id, *s).expect("frames advance by one");
        }
        let (next, found) = sim.step(t, &current)?;
        events.extend(found);
        current = next;
    }
    Ok((trace, normalize_events(&events).expect("stepper pairs are distinct")))
}

/// Degrades an exact trace into a perceived one: Gaussian position noise,
/// dropped frames, no velocities, and events re-detected from the noisy
/// positions of every frame. Zero noise returns the input unchanged.
pub fn perceive(
    truth: &Trace,
    events: &EventSet,
    noise: &NoiseConfig,
    stream: u64,
    detector: &CollisionDetector,
) -> (Trace, EventSet) {
    if noise.is_perception_exact() {
        return (truth.clone(), events.clone());
    }
    let mut rng = substream(noise.seed, "perception-noise", stream);
    let mut noisy = BTreeMap::new();
    let mut tracks = BTreeMap::new();
    for (&id, states) in truth.tracks() {
        let mut all: Vec<ObjState> = Vec::with_capacity(states.len());
        let mut kept: Vec<ObjState> = Vec::with_capacity(states.len());
        for s in states {
            let dropped = rng.random::<f64>() < noise.p_drop;
            let nx: f64 = StandardNormal.sample(&mut rng);
            let ny: f64 = StandardNormal.sample(&mut rng);
            let seen = ObjState::at(s.frame, s.pos + Vec2::new(nx, ny) * noise.sigma_p);
            all.push(seen);
            if !dropped {
                kept.push(seen);
            }
        }
        if kept.len() < 2 && states.len() >= 2 {
            let ends = [states[0], states[states.len() - 1]];
            for end in ends {
                if !kept.iter().any(|k| k.frame == end.frame) {
                    kept.push(ObjState::at(end.frame, end.pos));
                }
            }
            kept.sort_by_key(|s| s.frame);
        }
        noisy.insert(id, all);
        tracks.insert(id, kept);
    }
    // Events come from every frame; dropout only thins the reported tracks.
    let events = detect_collisions(&Trace::from_tracks(noisy).expect("same frames as truth"), detector);
    let trace = Trace::from_tracks(tracks).expect("subset of increasing frames");
    (trace, events)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventScores {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Greedy one-to-one matching of same-pair events whose frames differ by at
/// most `tolerance`. Empty sets on both sides score 1.
pub fn event_scores(predicted: &EventSet, truth: &EventSet, tolerance: Frame) -> EventScores {
    let mut used = vec![false; predicted.len()];
    let mut tp = 0;
    for t in truth {
        let hit = predicted.iter().enumerate().position(|(i, p)| {
            !used[i] && p.kind == t.kind && p.a == t.a && p.b == t.b && p.frame.abs_diff(t.frame) <= tolerance
        });
        if let Some(i) = hit {
            used[i] = true;
            tp += 1;
        }
    }
    let fp = predicted.len() - tp;
    let fneg = truth.len() - tp;
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fneg);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    EventScores {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fneg,
        precision,
        recall,
        f1,
    }
}

pub const COLORS: [&str; 8] = ["gray", "red", "blue", "green", "brown", "purple", "cyan", "yellow"];
pub const SHAPES: [&str; 3] = ["sphere", "cube", "cylinder"];
pub const MATERIALS: [&str; 2] = ["rubber", "metal"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub arena: Arena,
    pub min_bodies: usize,
    pub max_bodies: usize,
    pub min_speed: f64,
    pub max_speed: f64,
    pub max_friction: f64,
    /// Probability that a body starts at rest.
    pub p_rest: f64,
    /// Minimum number of in-video collisions.
    pub min_events: usize,
    pub max_v: Frame,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            arena: Arena::default(),
            min_bodies: 5,
            max_bodies: 7,
            min_speed: 1.0,
            max_speed: 2.5,
            max_friction: 0.01,
            p_rest: 0.2,
            min_events: 2,
            max_v: DEFAULT_MAX_V,
        }
    }
}

const GENERATION_ATTEMPTS: usize = 500;

/// Random scene with unique colors whose exact simulation has at least
/// `min_events` collisions within the video.
pub fn generate_world(gen: &GeneratorConfig, seed: u64, index: u64) -> Result<WorldConfig, WorldError> {
    let mut rng = substream(seed, "scene-gen", index);
    for _ in 0..GENERATION_ATTEMPTS {
        let candidate = sample_world(gen, &mut rng, seed);
        if candidate.validate().is_err() {
            continue;
        }
        let (_, events) = simulate_truth(&candidate, &BTreeSet::new(), candidate.max_v)?;
        if events.len() >= gen.min_events {
            return Ok(candidate);
        }
    }
    Err(WorldError::GenerationExhausted(GENERATION_ATTEMPTS))
}

fn sample_world(gen: &GeneratorConfig, rng: &mut ChaCha8Rng, seed: u64) -> WorldConfig {
    let n = rng.random_range(gen.min_bodies..=gen.max_bodies);
    let margin = 2.0 * DEFAULT_RADIUS;
    let mut positions: Vec<Vec2> = Vec::with_capacity(n);
    while positions.len() < n {
        let p = Vec2::new(
            rng.random_range(margin..gen.arena.width - margin),
            rng.random_range(margin..gen.arena.height - margin),
        );
        if positions.iter().all(|q| q.distance(p) > 2.0 * DEFAULT_RADIUS + 10.0) {
            positions.push(p);
        }
    }
    let mut palette: Vec<usize> = (0..COLORS.len()).collect();
    for i in (1..palette.len()).rev() {
        palette.swap(i, rng.random_range(0..=i));
    }
    let mut bodies = Vec::with_capacity(n);
    for i in 0..n {
        let speed = if rng.random::<f64>() < gen.p_rest {
            0.0
        } else {
            rng.random_range(gen.min_speed..gen.max_speed)
        };
        let heading = if n > 1 && rng.random::<f64>() < 0.75 {
            let mut target = rng.random_range(0..n - 1);
            if target >= i {
                target += 1;
            }
            let d = positions[target] - positions[i];
            let jitter: f64 = StandardNormal.sample(rng);
            d.y.atan2(d.x) + 0.12 * jitter
        } else {
            rng.random_range(0.0..std::f64::consts::TAU)
        };
        let velocity = Vec2::new(heading.cos(), heading.sin()) * speed;
        let mut features = BTreeMap::new();
        features.insert(Attribute::Color, COLORS[palette[i]].to_string());
        features.insert(Attribute::Shape, SHAPES[rng.random_range(0..SHAPES.len())].to_string());
        features.insert(Attribute::Material, MATERIALS[rng.random_range(0..MATERIALS.len())].to_string());
        bodies.push(BodySpec {
            id: ObjectId(i as u32),
            features,
            radius: DEFAULT_RADIUS,
            position: positions[i],
            velocity,
            friction: rng.random_range(0.0..=gen.max_friction),
        });
    }
    WorldConfig {
        arena: gen.arena,
        bodies,
        max_v: gen.max_v,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world(bodies: Vec<BodySpec>) -> WorldConfig {
        WorldConfig::new(
            Arena {
                width: 1000.0,
                height: 1000.0,
            },
            bodies,
        )
    }

    #[test]
    fn uniform_motion() {
        let cfg = world(vec![BodySpec::new(0, Vec2::new(100.0, 500.0), Vec2::new(1.0, 0.0))]);
        let (trace, events) = simulate_truth(&cfg, &BTreeSet::new(), 100).unwrap();
        for s in trace.track(ObjectId(0)).unwrap() {
            assert_eq!(s.pos, Vec2::new(100.0 + (s.frame - 1) as f64, 500.0));
        }
        assert!(events.is_empty());
    }

    #[test]
    fn head_on_exchange() {
        let cfg = world(vec![
            BodySpec::new(0, Vec2::new(100.0, 500.0), Vec2::new(1.0, 0.0)),
            BodySpec::new(1, Vec2::new(200.0, 500.0), Vec2::new(-2.0, 0.0)),
        ]);
        let (trace, events) = simulate_truth(&cfg, &BTreeSet::new(), 60).unwrap();
        assert_eq!(events.len(), 1);
        let after = events.as_slice()[0].frame + 2;
        assert_eq!(trace.state_at(ObjectId(0), after).unwrap().vel, Some(Vec2::new(-2.0, 0.0)));
        assert_eq!(trace.state_at(ObjectId(1), after).unwrap().vel, Some(Vec2::new(1.0, 0.0)));
    }

    #[test]
    fn overlap_is_invalid() {
        let cfg = world(vec![
            BodySpec::new(0, Vec2::new(100.0, 100.0), Vec2::ZERO),
            BodySpec::new(1, Vec2::new(110.0, 100.0), Vec2::ZERO),
        ]);
        assert_eq!(
            simulate_truth(&cfg, &BTreeSet::new(), 10).unwrap_err(),
            WorldError::Overlap(ObjectId(0), ObjectId(1))
        );
    }

    #[test]
    fn missing_velocity_is_incomplete() {
        let cfg = world(vec![BodySpec::new(0, Vec2::new(1.0, 1.0), Vec2::ZERO)]);
        let mut stepper = Stepper::for_world(&cfg);
        let states = BTreeMap::from([(ObjectId(0), ObjState::at(1, Vec2::ZERO))]);
        assert_eq!(
            stepper.step(1, &states).unwrap_err(),
            WorldError::IncompleteState {
                object: ObjectId(0),
                frame: 1
            }
        );
    }

    #[test]
    fn walls_reflect() {
        let cfg = WorldConfig::new(
            Arena {
                width: 100.0,
                height: 100.0,
            },
            vec![BodySpec::new(0, Vec2::new(80.0, 50.0), Vec2::new(2.0, 0.0))],
        );
        let (trace, _) = simulate_truth(&cfg, &BTreeSet::new(), 40).unwrap();
        assert!(trace.track(ObjectId(0)).unwrap().iter().all(|s| s.pos.x < 100.0));
        assert_eq!(trace.state_at(ObjectId(0), 40).unwrap().vel, Some(Vec2::new(-2.0, 0.0)));
    }

    #[test]
    fn zero_noise_perception_is_identity() {
        let cfg = generate_world(&GeneratorConfig::default(), 3, 0).unwrap();
        let (trace, events) = simulate_truth(&cfg, &BTreeSet::new(), cfg.max_v).unwrap();
        let (seen, seen_events) = perceive(&trace, &events, &NoiseConfig::ZERO, 0, &CollisionDetector::default());
        assert_eq!(seen, trace);
        assert_eq!(seen_events, events);
    }

    #[test]
    fn noise_validation() {
        let bad = NoiseConfig {
            p_drop: 1.0,
            ..NoiseConfig::ZERO
        };
        assert!(bad.validate().is_err());
        let bad = NoiseConfig {
            sigma_p: -0.1,
            ..NoiseConfig::ZERO
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn substreams_differ_by_name_and_index() {
        let a: u64 = substream(1, "scene-gen", 0).random();
        let b: u64 = substream(1, "scene-gen", 1).random();
        let c: u64 = substream(1, "sim-noise", 0).random();
        let again: u64 = substream(1, "scene-gen", 0).random();
        assert_eq!(a, again);
        assert!(a != b && a != c && b != c);
    }

    #[test]
    fn generated_scenes_are_valid_and_eventful() {
        let gen = GeneratorConfig::default();
        for i in 0..10 {
            let cfg = generate_world(&gen, 11, i).unwrap();
            cfg.validate().unwrap();
            let colors: BTreeSet<&str> = cfg.bodies.iter().map(|b| b.features[&Attribute::Color].as_str()).collect();
            assert_eq!(colors.len(), cfg.bodies.len());
            let (_, events) = simulate_truth(&cfg, &BTreeSet::new(), cfg.max_v).unwrap();
            assert!(events.len() >= gen.min_events);
        }
    }

    #[test]
    fn scores_with_tolerance() {
        let truth = normalize_events(&[Event::collide(0, 1, 10), Event::collide(1, 2, 50)]).unwrap();
        let pred = normalize_events(&[Event::collide(1, 0, 11), Event::collide(0, 2, 50)]).unwrap();
        let s = event_scores(&pred, &truth, 2);
        assert_eq!((s.true_positives, s.false_positives, s.false_negatives), (1, 1, 1));
        assert!((s.f1 - 0.5).abs() < 1e-12);
    }
}

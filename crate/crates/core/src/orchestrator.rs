//! Enhanced simulation: objects ride their perceived states until the causal
//! graph or the simulation itself says they can no longer, then continue in
//! the frame simulator. Also the answer stages built on top of it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{determine_pair, DerivedRelations};
use crate::model::{
    normalize_events, Answer, Determination, Event, EventKind, EventSet, Frame, ObjState, ObjectId, ObjectRecord,
    Prediction, Trace,
};
use crate::sps::{estimate_velocity, DEFAULT_MAX_S, DEFAULT_MAX_V};
use crate::world::{FrameSimulator, WorldError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrchestratorError {
    #[error("perception trace of object {object} is missing frame {frame}; smooth it first")]
    DenseTraceRequired { object: ObjectId, frame: Frame },
    #[error("sim node of object {object} at frame {frame} lies beyond the simulation horizon {max_s}")]
    SimNodeBeyondHorizon { object: ObjectId, frame: Frame, max_s: Frame },
    #[error("the query is undetermined and no baseline prediction was supplied")]
    MissingBaseline,
    #[error("simulation horizon {max_s} ends before the video ({max_v})")]
    HorizonTooShort { max_v: Frame, max_s: Frame },
    #[error(transparent)]
    Simulator(#[from] WorldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    /// Perceived states replace simulated ones until each object's handoff.
    Full,
    /// Every object is simulated from frame 1.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnhancedConfig {
    pub max_v: Frame,
    pub max_s: Frame,
    pub mode: SimMode,
    /// Frames spanned by the finite difference that supplies a velocity when
    /// a perceived state lacks one.
    pub velocity_window: u32,
}

impl Default for EnhancedConfig {
    fn default() -> Self {
        Self {
            max_v: DEFAULT_MAX_V,
            max_s: DEFAULT_MAX_S,
            mode: SimMode::Full,
            velocity_window: 1,
        }
    }
}

/// Frame after which each object's states come from the simulator.
pub type SimPlan = BTreeMap<ObjectId, Frame>;

#[derive(Debug, Clone, PartialEq)]
pub struct EnhancedRun {
    /// States on `1..=max_s` for every active object.
    pub traces: Trace,
    /// Collisions found while simulating plus perceived collisions between
    /// objects still riding perception.
    pub events: EventSet,
    pub handoff: SimPlan,
}

impl EnhancedRun {
    /// Whether the state of `object` at `frame` was taken from perception.
    pub fn is_perceived(&self, object: ObjectId, frame: Frame) -> bool {
        self.handoff.get(&object).is_some_and(|&h| frame <= h)
    }
}

fn perceived_state(
    perception: &Trace,
    object: ObjectId,
    frame: Frame,
    config: &EnhancedConfig,
) -> Result<ObjState, OrchestratorError> {
    let state = *perception
        .state_at(object, frame)
        .ok_or(OrchestratorError::DenseTraceRequired { object, frame })?;
    if state.vel.is_some() {
        return Ok(state);
    }
    let w = config.velocity_window.max(1).min(config.max_v.saturating_sub(1).max(1));
    let lo = if frame > w { frame - w } else { 1 };
    let hi = (lo + w).min(config.max_v);
    let vel = if hi > lo {
        estimate_velocity(perception, object, lo, hi - lo).map_err(|_| OrchestratorError::DenseTraceRequired {
            object,
            frame: hi,
        })?
    } else {
        crate::model::Vec2::ZERO
    };
    Ok(ObjState {
        vel: Some(vel),
        ..state
    })
}

/// Runs the simulator over `1..=max_s` for the `active` objects.
///
/// Each frame the simulator advances every active object. An object keeps
/// riding perception while it has not reached `max_v`, has not reached its
/// sim node, and has not collided in this frame's simulated events with an
/// object that is already simulated. Objects that leave in the same frame
/// can cause each other to leave.
pub fn enhanced_simulate(
    sim_nodes: &BTreeMap<ObjectId, Frame>,
    simulator: &mut dyn FrameSimulator,
    perception: &Trace,
    perception_events: &EventSet,
    active: &BTreeSet<ObjectId>,
    config: &EnhancedConfig,
) -> Result<EnhancedRun, OrchestratorError> {
    if config.max_s < config.max_v {
        return Err(OrchestratorError::HorizonTooShort {
            max_v: config.max_v,
            max_s: config.max_s,
        });
    }
    for (&object, &frame) in sim_nodes {
        if active.contains(&object) && frame > config.max_s {
            return Err(OrchestratorError::SimNodeBeyondHorizon {
                object,
                frame,
                max_s: config.max_s,
            });
        }
    }

    let mut current = BTreeMap::new();
    for &o in active {
        current.insert(o, perceived_state(perception, o, 1, config)?);
    }
    let mut riding: BTreeSet<ObjectId> = match config.mode {
        SimMode::Full => active.clone(),
        SimMode::Naive => BTreeSet::new(),
    };
    let mut handoff: SimPlan = active.iter().map(|&o| (o, 1)).collect();
    let mut trace = Trace::new();
    let mut found: Vec<Event> = Vec::new();

    for t in 1..=config.max_s {
        for (&o, s) in &current {
            trace.push(o, *s).expect("one state per frame");
        }
        let (mut next, events) = simulator.step(t, &current)?;

        let mut leaving: BTreeSet<ObjectId> = riding
            .iter()
            .copied()
            .filter(|o| t == config.max_v || sim_nodes.get(o) == Some(&t))
            .collect();
        loop {
            let simulated = |o: &ObjectId| !riding.contains(o) || leaving.contains(o);
            let more: Vec<ObjectId> = riding
                .iter()
                .copied()
                .filter(|o| !leaving.contains(o))
                .filter(|&o| {
                    events.iter().any(|e| {
                        e.involves(o) && {
                            let other = if e.a == o { e.b } else { e.a };
                            active.contains(&other) && simulated(&other)
                        }
                    })
                })
                .collect();
            if more.is_empty() {
                break;
            }
            leaving.extend(more);
        }
        for o in &leaving {
            riding.remove(o);
            handoff.insert(*o, t);
        }
        found.extend(events);
        found.extend(
            perception_events
                .iter()
                .filter(|e| e.frame == t && riding.contains(&e.a) && riding.contains(&e.b)),
        );
        for &o in &riding {
            next.insert(o, perceived_state(perception, o, t + 1, config)?);
            handoff.insert(o, t + 1);
        }
        current = next;
    }
    Ok(EnhancedRun {
        traces: trace,
        events: normalize_events(&found).expect("events come from distinct pairs"),
        handoff,
    })
}

/// Yes iff the queried event is among `events`, flipped for negated queries.
pub fn answer_pair(events: &EventSet, subject: ObjectId, kind: EventKind, object: ObjectId, negated: bool) -> Answer {
    Answer::from_bool(events.contains_pair(kind, subject, object)).negate_if(negated)
}

/// A determined result overrides the baseline; otherwise the baseline
/// prediction is returned unchanged.
pub fn approx_answer(
    determination: Determination,
    negated: bool,
    baseline: Option<Prediction>,
) -> Result<Answer, OrchestratorError> {
    match determination {
        Determination::Yes => Ok(Answer::Yes.negate_if(negated)),
        Determination::No => Ok(Answer::No.negate_if(negated)),
        Determination::Undetermined => baseline.map(Answer::from).ok_or(OrchestratorError::MissingBaseline),
    }
}

/// Remove-any question: determined from the graph where possible, otherwise
/// answered by removing each other movable object in turn through
/// `per_removal` and asking whether any single removal makes the event
/// happen.
pub fn answer_remove_any(
    objects: &[ObjectRecord],
    events: &EventSet,
    subject: ObjectId,
    kind: EventKind,
    object: ObjectId,
    negated: bool,
    mut per_removal: impl FnMut(ObjectId) -> Result<bool, OrchestratorError>,
) -> Result<(Answer, Determination), OrchestratorError> {
    let derived = DerivedRelations::compute(objects, events, &BTreeSet::new(), &BTreeSet::new(), true);
    let determination = determine_pair(subject, kind, object, &BTreeSet::new(), events, &derived.affected);
    let answer = match determination {
        Determination::Yes => true,
        Determination::No => false,
        Determination::Undetermined => {
            let mut any = false;
            for o in objects.iter().filter(|o| !o.is_immovable() && o.id != subject && o.id != object) {
                if per_removal(o.id)? {
                    any = true;
                    break;
                }
            }
            any
        }
    };
    Ok((Answer::from_bool(answer).negate_if(negated), determination))
}

/// Number of objects still present that take part in `kind` with `target`,
/// available only when the intervention creates no sim node at all.
pub fn answer_counting(
    events: &EventSet,
    kind: EventKind,
    target: ObjectId,
    removed: &BTreeSet<ObjectId>,
    sim_nodes: &BTreeMap<ObjectId, Frame>,
) -> Answer {
    if !sim_nodes.is_empty() {
        return Answer::Undetermined;
    }
    let counted: BTreeSet<ObjectId> = events
        .iter()
        .filter(|e| e.kind == kind)
        .filter_map(|e| {
            if e.b == target {
                Some(e.a)
            } else if kind == EventKind::Collide && e.a == target {
                Some(e.b)
            } else {
                None
            }
        })
        .filter(|o| !removed.contains(o) && *o != target)
        .collect();
    Answer::Count(counted.len() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vec2;
    use crate::world::{Arena, BodySpec, Stepper, WorldConfig};

    fn still_world() -> WorldConfig {
        WorldConfig::new(
            Arena {
                width: 500.0,
                height: 500.0,
            },
            vec![
                BodySpec::new(0, Vec2::new(100.0, 100.0), Vec2::new(1.0, 0.0)),
                BodySpec::new(1, Vec2::new(100.0, 300.0), Vec2::new(0.0, 0.0)),
            ],
        )
    }

    #[test]
    fn approx_overrides_and_passes_through() {
        assert_eq!(approx_answer(Determination::Yes, false, Some(Prediction::No)), Ok(Answer::Yes));
        assert_eq!(approx_answer(Determination::Undetermined, false, Some(Prediction::No)), Ok(Answer::No));
        assert_eq!(approx_answer(Determination::Yes, true, None), Ok(Answer::No));
        assert_eq!(
            approx_answer(Determination::Undetermined, false, None),
            Err(OrchestratorError::MissingBaseline)
        );
    }

    #[test]
    fn negation_flips_pair_answers() {
        let events = normalize_events(&[Event::collide(0, 1, 5)]).unwrap();
        assert_eq!(answer_pair(&events, ObjectId(1), EventKind::Collide, ObjectId(0), false), Answer::Yes);
        assert_eq!(answer_pair(&events, ObjectId(1), EventKind::Collide, ObjectId(0), true), Answer::No);
        assert_eq!(answer_pair(&events, ObjectId(2), EventKind::Collide, ObjectId(0), false), Answer::No);
    }

    #[test]
    fn sparse_perception_is_rejected() {
        let cfg = still_world();
        let (truth, events) = crate::world::simulate_truth(&cfg, &BTreeSet::new(), 20).unwrap();
        let mut tracks = truth.tracks().clone();
        tracks.get_mut(&ObjectId(0)).unwrap().remove(5);
        let holey = Trace::from_tracks(tracks).unwrap();
        let mut sim = Stepper::for_world(&cfg);
        let config = EnhancedConfig {
            max_v: 20,
            max_s: 30,
            ..EnhancedConfig::default()
        };
        let err = enhanced_simulate(&BTreeMap::new(), &mut sim, &holey, &events, &cfg.objects().iter().map(|o| o.id).collect(), &config)
            .unwrap_err();
        assert_eq!(
            err,
            OrchestratorError::DenseTraceRequired {
                object: ObjectId(0),
                frame: 6
            }
        );
    }

    #[test]
    fn no_intervention_rides_perception_to_the_end_of_the_video() {
        let cfg = still_world();
        let (truth, events) = crate::world::simulate_truth(&cfg, &BTreeSet::new(), 40).unwrap();
        let mut sim = Stepper::for_world(&cfg);
        let config = EnhancedConfig {
            max_v: 20,
            max_s: 40,
            ..EnhancedConfig::default()
        };
        let active = cfg.objects().iter().map(|o| o.id).collect();
        let run = enhanced_simulate(&BTreeMap::new(), &mut sim, &truth, &events, &active, &config).unwrap();
        assert_eq!(run.handoff, BTreeMap::from([(ObjectId(0), 20), (ObjectId(1), 20)]));
        assert_eq!(run.traces, truth);
    }

    #[test]
    fn counting_needs_no_sim_node() {
        let events = normalize_events(&[
            Event::collide(0, 95, 3),
            Event::collide(1, 95, 4),
            Event::collide(95, 2, 6),
            Event::collide(0, 1, 1),
        ])
        .unwrap();
        let removed = BTreeSet::from([ObjectId(4)]);
        assert_eq!(
            answer_counting(&events, EventKind::Collide, ObjectId(95), &removed, &BTreeMap::new()),
            Answer::Count(3)
        );
        let sim = BTreeMap::from([(ObjectId(1), 1)]);
        assert_eq!(
            answer_counting(&events, EventKind::Collide, ObjectId(95), &removed, &sim),
            Answer::Undetermined
        );
    }

    #[test]
    fn remove_any_enumerates_only_when_undetermined() {
        let objects: Vec<ObjectRecord> = (0..3).map(ObjectRecord::new).collect();
        // Each colliding node has the other object's node as ancestor.
        let events = normalize_events(&[Event::collide(0, 1, 10)]).unwrap();
        let mut tried = Vec::new();
        let (answer, det) = answer_remove_any(&objects, &events, ObjectId(0), EventKind::Collide, ObjectId(1), false, |o| {
            tried.push(o);
            Ok(true)
        })
        .unwrap();
        assert_eq!((answer, det), (Answer::Yes, Determination::Undetermined));
        assert_eq!(tried, vec![ObjectId(2)]);
        let (answer, det) =
            answer_remove_any(&objects, &EventSet::new(), ObjectId(0), EventKind::Collide, ObjectId(2), true, |_| {
                panic!("determined queries never simulate")
            })
            .unwrap();
        assert_eq!((answer, det), (Answer::Yes, Determination::No));
    }
}

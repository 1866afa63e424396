//! Straight-line kinematics with constant frictional deceleration, and
//! distance-threshold collision detection.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{normalize_events, Event, EventSet, Frame, ObjState, ObjectId, Trace, Vec2};

pub const DEFAULT_COLLIDE_THRESHOLD: f64 = 23.0;
pub const DEFAULT_MAX_V: Frame = 127;
pub const DEFAULT_MAX_S: Frame = 185;
pub const DEFAULT_DEBOUNCE: Frame = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpsError {
    #[error("object {object} has no sample at frame {frame}")]
    MissingSample { object: ObjectId, frame: Frame },
    #[error("temporal resolution must be 1 or 5, got {0}")]
    InvalidResolution(u32),
}

/// Frames between consecutive position samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct TemporalResolution(u32);

impl TemporalResolution {
    pub const DENSE: TemporalResolution = TemporalResolution(1);
    pub const SPARSE: TemporalResolution = TemporalResolution(5);

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for TemporalResolution {
    type Error = SpsError;

    fn try_from(t: u32) -> Result<Self, SpsError> {
        match t {
            1 | 5 => Ok(TemporalResolution(t)),
            other => Err(SpsError::InvalidResolution(other)),
        }
    }
}

impl From<TemporalResolution> for u32 {
    fn from(t: TemporalResolution) -> u32 {
        t.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicEstimate {
    pub v: Vec2,
    pub g_sigma: f64,
    pub t_res: TemporalResolution,
}

fn sample(trace: &Trace, object: ObjectId, frame: Frame) -> Result<Vec2, SpsError> {
    trace
        .state_at(object, frame)
        .map(|s| s.pos)
        .ok_or(SpsError::MissingSample { object, frame })
}

/// Per-frame velocity from the displacement between frames `i` and `i + t`.
pub fn estimate_velocity(trace: &Trace, object: ObjectId, i: Frame, t: u32) -> Result<Vec2, SpsError> {
    if t == 0 {
        return Err(SpsError::InvalidResolution(0));
    }
    let from = sample(trace, object, i)?;
    let to = sample(trace, object, i + t)?;
    Ok((to - from) * (1.0 / t as f64))
}

/// Deceleration from the last two displacement samples of the object,
/// clamped at zero.
pub fn estimate_friction(trace: &Trace, object: ObjectId, t_res: TemporalResolution) -> Result<f64, SpsError> {
    let t = t_res.get();
    let last = trace
        .last_frame(object)
        .ok_or(SpsError::MissingSample { object, frame: 0 })?;
    if last <= 2 * t {
        return Err(SpsError::MissingSample {
            object,
            frame: last.saturating_sub(2 * t),
        });
    }
    let penultimate = estimate_velocity(trace, object, last - 2 * t, t)?;
    let final_v = estimate_velocity(trace, object, last - t, t)?;
    Ok(((penultimate.norm() - final_v.norm()) / t as f64).max(0.0))
}

/// Velocity at the object's last frame and its deceleration.
pub fn estimate(trace: &Trace, object: ObjectId, t_res: TemporalResolution) -> Result<KinematicEstimate, SpsError> {
    let t = t_res.get();
    let last = trace
        .last_frame(object)
        .ok_or(SpsError::MissingSample { object, frame: 0 })?;
    let v = estimate_velocity(trace, object, last.saturating_sub(t), t)?;
    Ok(KinematicEstimate {
        v,
        g_sigma: estimate_friction(trace, object, t_res)?,
        t_res,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub pos: Vec2,
    pub speed: f64,
}

/// Positions for the `frames` frames after `start`. The speed after `k`
/// frames is `max(0, |v| - k * g_sigma)`; each frame moves by that speed
/// along the initial heading.
pub fn predict_linear(start: Vec2, v: Vec2, g_sigma: f64, frames: u32) -> Vec<KinematicSample> {
    let speed0 = v.norm();
    let dir = if speed0 > 0.0 { v * (1.0 / speed0) } else { Vec2::ZERO };
    let mut travelled = 0.0;
    (1..=frames)
        .map(|k| {
            let speed = (speed0 - g_sigma * k as f64).max(0.0);
            travelled += speed;
            KinematicSample {
                pos: start + dir * travelled,
                speed,
            }
        })
        .collect()
}

/// One event per contact episode: the first frame at which the pair is
/// closer than `threshold`, ignoring episodes starting within `debounce`
/// frames of the previous event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionDetector {
    pub threshold: f64,
    pub debounce: Frame,
}

impl Default for CollisionDetector {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_COLLIDE_THRESHOLD,
            debounce: DEFAULT_DEBOUNCE,
        }
    }
}

impl CollisionDetector {
    pub fn with_threshold(threshold: f64) -> Self {
        Self {
            threshold,
            ..Self::default()
        }
    }
}

/// Contact episodes between every pair, evaluated on the frames both objects
/// were observed.
pub fn detect_collisions(trace: &Trace, detector: &CollisionDetector) -> EventSet {
    let ids: Vec<ObjectId> = trace.objects().collect();
    let mut events = Vec::new();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            let (ta, tb) = (trace.track(a).unwrap_or(&[]), trace.track(b).unwrap_or(&[]));
            let (mut x, mut y) = (0, 0);
            let mut touching = false;
            let mut last_event: Option<Frame> = None;
            while x < ta.len() && y < tb.len() {
                match ta[x].frame.cmp(&tb[y].frame) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => {
                        let frame = ta[x].frame;
                        let close = ta[x].pos.distance(tb[y].pos) < detector.threshold;
                        if close && !touching && last_event.is_none_or(|f| frame - f > detector.debounce) {
                            events.push(Event {
                                kind: crate::model::EventKind::Collide,
                                a,
                                b,
                                frame,
                            });
                            last_event = Some(frame);
                        }
                        touching = close;
                        x += 1;
                        y += 1;
                    }
                }
            }
        }
    }
    normalize_events(&events).expect("pairs are distinct")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpsConfig {
    pub t_res: TemporalResolution,
    pub detector: CollisionDetector,
    pub max_v: Frame,
    pub max_s: Frame,
}

impl Default for SpsConfig {
    fn default() -> Self {
        Self {
            t_res: TemporalResolution::DENSE,
            detector: CollisionDetector::default(),
            max_v: DEFAULT_MAX_V,
            max_s: DEFAULT_MAX_S,
        }
    }
}

/// Extrapolates every object in a straight line from `max_v` to `max_s` and
/// returns the collisions first detected after the video ends.
pub fn post_video_events(trace: &Trace, config: &SpsConfig) -> Result<EventSet, SpsError> {
    let horizon = config.max_s.saturating_sub(config.max_v);
    let mut tracks: BTreeMap<ObjectId, Vec<ObjState>> = BTreeMap::new();
    for object in trace.objects() {
        let start = sample(trace, object, config.max_v)?;
        let t = config.t_res.get();
        let v = estimate_velocity(trace, object, config.max_v.saturating_sub(t), t)?;
        let g_sigma = estimate_friction(&trace_until(trace, object, config.max_v), object, config.t_res)?;
        let mut states = vec![ObjState::at(config.max_v, start)];
        states.extend(
            predict_linear(start, v, g_sigma, horizon)
                .into_iter()
                .enumerate()
                .map(|(k, s)| ObjState::at(config.max_v + 1 + k as Frame, s.pos)),
        );
        tracks.insert(object, states);
    }
    let extended = Trace::from_tracks(tracks).expect("frames are increasing by construction");
    Ok(detect_collisions(&extended, &config.detector).filtered(|e| e.frame > config.max_v))
}

fn trace_until(trace: &Trace, object: ObjectId, last: Frame) -> Trace {
    let states: Vec<ObjState> = trace
        .track(object)
        .unwrap_or(&[])
        .iter()
        .copied()
        .filter(|s| s.frame <= last)
        .collect();
    Trace::from_tracks(BTreeMap::from([(object, states)])).expect("subset of a valid track")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(object: u32, frames: std::ops::RangeInclusive<Frame>, f: impl Fn(Frame) -> Vec2) -> Trace {
        let states = frames.map(|t| ObjState::at(t, f(t))).collect();
        Trace::from_tracks(BTreeMap::from([(ObjectId(object), states)])).unwrap()
    }

    #[test]
    fn uniform_motion_velocity() {
        let trace = line(0, 1..=20, |t| Vec2::new(t as f64, 0.0));
        assert_eq!(estimate_velocity(&trace, ObjectId(0), 10, 1).unwrap(), Vec2::new(1.0, 0.0));
        assert_eq!(estimate_velocity(&trace, ObjectId(0), 10, 5).unwrap(), Vec2::new(1.0, 0.0));
    }

    #[test]
    fn stationary_velocity() {
        let trace = line(0, 1..=20, |_| Vec2::new(3.0, 4.0));
        assert_eq!(estimate_velocity(&trace, ObjectId(0), 3, 1).unwrap(), Vec2::ZERO);
        assert_eq!(estimate_friction(&trace, ObjectId(0), TemporalResolution::DENSE).unwrap(), 0.0);
    }

    #[test]
    fn missing_sample() {
        let trace = line(0, 1..=5, |t| Vec2::new(t as f64, 0.0));
        assert_eq!(
            estimate_velocity(&trace, ObjectId(0), 5, 1),
            Err(SpsError::MissingSample {
                object: ObjectId(0),
                frame: 6
            })
        );
    }

    #[test]
    fn resolution_must_be_one_or_five() {
        assert!(TemporalResolution::try_from(5).is_ok());
        assert_eq!(TemporalResolution::try_from(2), Err(SpsError::InvalidResolution(2)));
    }

    #[test]
    fn frictionless_trace_has_zero_friction() {
        let trace = line(0, 1..=30, |t| Vec2::new(2.0 * t as f64, -(t as f64)));
        assert_eq!(estimate_friction(&trace, ObjectId(0), TemporalResolution::SPARSE).unwrap(), 0.0);
    }

    #[test]
    fn noisy_tail_clamps_to_zero() {
        // The final displacement is longer than the one before it.
        let trace = line(0, 1..=10, |t| Vec2::new(if t == 10 { 10.5 } else { t as f64 }, 0.0));
        assert_eq!(estimate_friction(&trace, ObjectId(0), TemporalResolution::DENSE).unwrap(), 0.0);
    }

    #[test]
    fn constant_speed_prediction() {
        let out = predict_linear(Vec2::ZERO, Vec2::new(2.0, 0.0), 0.0, 50);
        for (k, s) in out.iter().enumerate() {
            assert_eq!(s.pos, Vec2::new(2.0 * (k + 1) as f64, 0.0));
        }
    }

    #[test]
    fn decelerating_prediction_stops() {
        let out = predict_linear(Vec2::ZERO, Vec2::new(0.0, 1.0), 0.1, 15);
        let stop = out.iter().position(|s| s.speed == 0.0).unwrap() + 1;
        assert_eq!(stop, 10);
        let expected: f64 = (1..10).map(|k| 1.0 - 0.1 * k as f64).sum();
        assert!((out[14].pos.y - expected).abs() < 1e-12);
        assert_eq!(out[14].pos.x, 0.0);
    }

    #[test]
    fn converging_pair_detected_at_first_close_frame() {
        let mut tracks = BTreeMap::new();
        tracks.insert(
            ObjectId(0),
            (1..=60).map(|t| ObjState::at(t, Vec2::new(0.0, 0.0))).collect(),
        );
        // Distance is 62.9 - t, first below 23 at t = 40 (22.9).
        tracks.insert(
            ObjectId(1),
            (1..=60)
                .map(|t| ObjState::at(t, Vec2::new(62.9 - t as f64, 0.0)))
                .collect(),
        );
        let trace = Trace::from_tracks(tracks).unwrap();
        let events = detect_collisions(&trace, &CollisionDetector::default());
        assert_eq!(events.as_slice(), &[Event::collide(0, 1, 40)]);
    }

    #[test]
    fn parallel_tracks_never_collide() {
        let mut tracks = BTreeMap::new();
        tracks.insert(ObjectId(0), (1..=50).map(|t| ObjState::at(t, Vec2::new(t as f64, 0.0))).collect());
        tracks.insert(ObjectId(1), (1..=50).map(|t| ObjState::at(t, Vec2::new(t as f64, 50.0))).collect());
        let trace = Trace::from_tracks(tracks).unwrap();
        assert!(detect_collisions(&trace, &CollisionDetector::default()).is_empty());
    }

    #[test]
    fn default_threshold() {
        assert_eq!(CollisionDetector::default().threshold, 23.0);
        let dump = serde_json::to_value(SpsConfig::default()).unwrap();
        assert_eq!(dump["detector"]["threshold"], 23.0);
        assert_eq!(dump["max_s"], 185);
    }

    #[test]
    fn post_video_collision_course() {
        let mut tracks = BTreeMap::new();
        tracks.insert(ObjectId(0), (1..=127).map(|t| ObjState::at(t, Vec2::new(t as f64, 100.0))).collect());
        tracks.insert(
            ObjectId(1),
            (1..=127).map(|t| ObjState::at(t, Vec2::new(300.0 - t as f64, 100.0))).collect(),
        );
        let trace = Trace::from_tracks(tracks).unwrap();
        let events = post_video_events(&trace, &SpsConfig::default()).unwrap();
        assert_eq!(events.len(), 1);
        // Gap at frame 127 is 46; closing at 2/frame drops below 23 at 139.
        assert_eq!(events.as_slice()[0], Event::collide(0, 1, 139));
    }

    #[test]
    fn stopped_objects_have_no_post_video_events() {
        let mut tracks = BTreeMap::new();
        tracks.insert(ObjectId(0), (1..=127).map(|t| ObjState::at(t, Vec2::new(0.0, 0.0))).collect());
        tracks.insert(ObjectId(1), (1..=127).map(|t| ObjState::at(t, Vec2::new(40.0, 0.0))).collect());
        let trace = Trace::from_tracks(tracks).unwrap();
        assert!(post_video_events(&trace, &SpsConfig::default()).unwrap().is_empty());
    }
}

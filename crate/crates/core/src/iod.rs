//! Gap filling and light smoothing of perceived trajectories.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Frame, ObjState, ObjectId, Trace, Vec2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IodError {
    #[error("object {object} has {observed} observation(s); at least 2 are needed")]
    InsufficientObservations { object: ObjectId, observed: usize },
    #[error("smoothing window must be odd and at least 1, got {0}")]
    InvalidWindow(usize),
}

/// Centered moving-average width; 1 disables smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothingConfig {
    window: usize,
}

impl SmoothingConfig {
    pub fn new(window: usize) -> Result<Self, IodError> {
        if window % 2 == 1 {
            Ok(Self { window })
        } else {
            Err(IodError::InvalidWindow(window))
        }
    }

    pub fn window(self) -> usize {
        self.window
    }
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self { window: 1 }
    }
}

fn lerp(a: Vec2, b: Vec2, w: f64) -> Vec2 {
    a + (b - a) * w
}

fn fill(object: ObjectId, observed: &[ObjState], max_v: Frame) -> Result<Vec<ObjState>, IodError> {
    if observed.len() < 2 {
        return Err(IodError::InsufficientObservations {
            object,
            observed: observed.len(),
        });
    }
    let first = observed[0];
    let last = *observed.last().expect("at least two observations");
    let mut out = Vec::with_capacity(max_v as usize);
    let mut next = 0;
    for frame in 1..=max_v {
        while next < observed.len() && observed[next].frame < frame {
            next += 1;
        }
        let state = if frame <= first.frame {
            ObjState { frame, ..first }
        } else if frame >= last.frame {
            ObjState { frame, ..last }
        } else if observed[next].frame == frame {
            observed[next]
        } else {
            let (lo, hi) = (observed[next - 1], observed[next]);
            let w = (frame - lo.frame) as f64 / (hi.frame - lo.frame) as f64;
            ObjState {
                frame,
                pos: lerp(lo.pos, hi.pos, w),
                vel: lo.vel.zip(hi.vel).map(|(a, b)| lerp(a, b, w)),
            }
        };
        out.push(state);
    }
    Ok(out)
}

fn moving_average(states: &mut [ObjState], window: usize) {
    if window <= 1 {
        return;
    }
    let half = window / 2;
    let raw: Vec<Vec2> = states.iter().map(|s| s.pos).collect();
    for (i, state) in states.iter_mut().enumerate() {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(raw.len() - 1);
        let sum = raw[lo..=hi].iter().fold(Vec2::ZERO, |acc, p| acc + *p);
        state.pos = sum * (1.0 / (hi - lo + 1) as f64);
    }
}

/// Dense trace on `1..=max_v`: interior gaps linearly interpolated, leading
/// and trailing gaps held at the nearest observation, then averaged over a
/// centered window truncated at the ends.
pub fn smooth(trace: &Trace, max_v: Frame, config: SmoothingConfig) -> Result<Trace, IodError> {
    let mut tracks = BTreeMap::new();
    for (&object, states) in trace.tracks() {
        let observed: Vec<ObjState> = states.iter().copied().filter(|s| (1..=max_v).contains(&s.frame)).collect();
        let mut dense = fill(object, &observed, max_v)?;
        moving_average(&mut dense, config.window);
        tracks.insert(object, dense);
    }
    Ok(Trace::from_tracks(tracks).expect("dense frames are increasing"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_of(rows: &[(Frame, f64, f64)]) -> Trace {
        let states = rows.iter().map(|&(f, x, y)| ObjState::at(f, Vec2::new(x, y))).collect();
        Trace::from_tracks(BTreeMap::from([(ObjectId(0), states)])).unwrap()
    }

    #[test]
    fn midpoint() {
        let out = smooth(&trace_of(&[(1, 0.0, 0.0), (3, 2.0, 2.0)]), 3, SmoothingConfig::default()).unwrap();
        assert_eq!(out.state_at(ObjectId(0), 2).unwrap().pos, Vec2::new(1.0, 1.0));
    }

    #[test]
    fn dense_input_is_unchanged() {
        let rows: Vec<_> = (1..=10).map(|f| (f, f as f64 * 0.3, 7.0 - f as f64)).collect();
        let trace = trace_of(&rows);
        assert_eq!(smooth(&trace, 10, SmoothingConfig::default()).unwrap(), trace);
    }

    #[test]
    fn ends_are_held_constant() {
        let out = smooth(&trace_of(&[(3, 1.0, 1.0), (5, 3.0, 1.0)]), 7, SmoothingConfig::default()).unwrap();
        assert!(out.is_dense(ObjectId(0), 7));
        assert_eq!(out.state_at(ObjectId(0), 1).unwrap().pos, Vec2::new(1.0, 1.0));
        assert_eq!(out.state_at(ObjectId(0), 7).unwrap().pos, Vec2::new(3.0, 1.0));
    }

    #[test]
    fn single_observation_is_rejected() {
        let err = smooth(&trace_of(&[(4, 0.0, 0.0)]), 10, SmoothingConfig::default()).unwrap_err();
        assert_eq!(
            err,
            IodError::InsufficientObservations {
                object: ObjectId(0),
                observed: 1
            }
        );
    }

    #[test]
    fn window_must_be_odd() {
        assert_eq!(SmoothingConfig::new(4), Err(IodError::InvalidWindow(4)));
        assert_eq!(SmoothingConfig::new(0), Err(IodError::InvalidWindow(0)));
        assert_eq!(SmoothingConfig::new(5).unwrap().window(), 5);
    }

    #[test]
    fn moving_average_preserves_lines_away_from_ends() {
        let rows: Vec<_> = (1..=20).map(|f| (f, 2.0 * f as f64, 0.0)).collect();
        let out = smooth(&trace_of(&rows), 20, SmoothingConfig::new(5).unwrap()).unwrap();
        for f in 3..=18 {
            assert!((out.state_at(ObjectId(0), f).unwrap().pos.x - 2.0 * f as f64).abs() < 1e-12);
        }
    }
}

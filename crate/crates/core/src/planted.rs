//! Hand-built frictionless scenes with known collision schedules.

use std::collections::BTreeMap;

use crate::model::{Attribute, Vec2};
use crate::world::{Arena, BodySpec, WorldConfig, DEFAULT_RADIUS};

const PLANTED_ARENA: Arena = Arena {
    width: 480.0,
    height: 400.0,
};

fn body(id: u32, color: &str, position: (f64, f64), velocity: (f64, f64)) -> BodySpec {
    BodySpec {
        id: crate::model::ObjectId(id),
        features: BTreeMap::from([
            (Attribute::Color, color.to_string()),
            (Attribute::Shape, "sphere".to_string()),
        ]),
        radius: DEFAULT_RADIUS,
        position: Vec2::new(position.0, position.1),
        velocity: Vec2::new(velocity.0, velocity.1),
        friction: 0.0,
    }
}

/// Ids of the five-object scene.
pub mod five {
    pub const ORANGE: u32 = 0;
    pub const PURPLE: u32 = 1;
    pub const CYAN: u32 = 2;
    pub const GREEN: u32 = 3;
    pub const BLUE: u32 = 4;
}

/// Cyan hits green at 30, green hits blue at 55, purple hits cyan at 100.
/// Without blue, green keeps moving and hits orange at 90 instead.
pub fn five_object_scene() -> WorldConfig {
    use five::*;
    WorldConfig::new(
        PLANTED_ARENA,
        vec![
            body(ORANGE, "orange", (282.9, 311.9), (0.0, -1.0)),
            body(PURPLE, "purple", (130.0, 78.1), (0.0, 1.0)),
            body(CYAN, "cyan", (171.0, 200.0), (1.0, 0.0)),
            body(GREEN, "green", (251.9, 200.0), (-1.0, 0.0)),
            body(BLUE, "blue", (247.9, 276.9), (0.0, -1.0)),
        ],
    )
}

/// Ids of the deflection scene.
pub mod deflection {
    pub const PURPLE: u32 = 0;
    pub const CYAN: u32 = 1;
    pub const GREEN: u32 = 2;
    pub const BLUE: u32 = 3;
}

/// Blue stops green at 30; purple later hits cyan at 90. Without blue,
/// green reaches cyan first and knocks it off purple's path.
pub fn deflection_scene() -> WorldConfig {
    use deflection::*;
    WorldConfig::new(
        PLANTED_ARENA,
        vec![
            body(PURPLE, "purple", (118.1, 192.9), (1.0, 0.0)),
            body(CYAN, "cyan", (230.0, 281.9), (0.0, -1.0)),
            body(GREEN, "green", (171.0, 200.0), (1.0, 0.0)),
            body(BLUE, "blue", (200.0, 251.9), (0.0, -1.0)),
        ],
    )
}

//! Counterfactual question answering over 2D collision scenes guided by a
//! temporal causal graph.

pub mod bench;
pub mod facts;
pub mod graph;
pub mod iod;
pub mod model;
pub mod orchestrator;
pub mod planted;
pub mod sps;
pub mod world;

pub use model::{
    normalize_events, resolve_selector, Answer, Determination, Event, EventKind, EventSet, Frame, ObjState,
    ObjectId, ObjectRecord, Prediction, Query, Scene, Selector, Trace, Vec2,
};

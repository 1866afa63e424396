//! Brute-force reading of the causal-graph definitions, written directly
//! against the event list and shared by integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use crcg_core::model::{Determination, Event, EventKind, Frame, ObjectId, ObjectRecord};

pub type Node = (ObjectId, Frame);

pub struct Oracle {
    pub nodes: Vec<Node>,
    pub reach: BTreeSet<(Node, Node)>,
}

fn movable(objects: &[ObjectRecord], id: ObjectId) -> bool {
    objects.iter().any(|o| o.id == id && !o.is_immovable())
}

impl Oracle {
    pub fn new(objects: &[ObjectRecord], events: &[Event]) -> Self {
        let frames: BTreeSet<Frame> = events.iter().map(|e| e.frame).collect();
        let nodes: Vec<Node> = objects
            .iter()
            .flat_map(|o| frames.iter().map(move |&t| (o.id, t)))
            .collect();
        let mut edges: BTreeSet<(Node, Node)> = BTreeSet::new();
        for e in events {
            if e.kind == EventKind::Collide && movable(objects, e.a) && movable(objects, e.b) {
                edges.insert(((e.a, e.frame), (e.b, e.frame)));
                edges.insert(((e.b, e.frame), (e.a, e.frame)));
            }
        }
        let frames: Vec<Frame> = frames.into_iter().collect();
        for o in objects.iter().filter(|o| !o.is_immovable()) {
            for w in frames.windows(2) {
                edges.insert(((o.id, w[0]), (o.id, w[1])));
            }
        }
        let mut reach = BTreeSet::new();
        for &s in &nodes {
            let mut stack = vec![s];
            let mut seen = BTreeSet::new();
            while let Some(n) = stack.pop() {
                for (_, m) in edges.range((n, (ObjectId(0), 0))..).take_while(|(a, _)| *a == n) {
                    if seen.insert(*m) {
                        stack.push(*m);
                    }
                }
            }
            seen.remove(&s);
            reach.extend(seen.into_iter().map(|m| (s, m)));
        }
        Self { nodes, reach }
    }

    pub fn affected(&self, intervened: &BTreeSet<ObjectId>, remove_any: bool) -> BTreeSet<Node> {
        self.nodes
            .iter()
            .copied()
            .filter(|&(o, t)| {
                intervened.contains(&o)
                    || self.reach.iter().any(|&(a, b)| {
                        b == (o, t) && (intervened.contains(&a.0) || (remove_any && a.0 != o))
                    })
            })
            .collect()
    }

    pub fn sim(affected: &BTreeSet<Node>, removed: &BTreeSet<ObjectId>) -> BTreeMap<ObjectId, Frame> {
        let mut out: BTreeMap<ObjectId, Frame> = BTreeMap::new();
        for &(o, t) in affected.iter().filter(|n| !removed.contains(&n.0)) {
            let e = out.entry(o).or_insert(t);
            *e = (*e).min(t);
        }
        out
    }

    pub fn determine(
        events: &[Event],
        affected: &BTreeSet<Node>,
        removed: &BTreeSet<ObjectId>,
        s: ObjectId,
        kind: EventKind,
        o: ObjectId,
    ) -> Determination {
        if removed.contains(&s) || removed.contains(&o) {
            return Determination::No;
        }
        let hits: Vec<Frame> = events
            .iter()
            .filter(|e| {
                e.kind == kind && ((e.a == s && e.b == o) || (kind == EventKind::Collide && e.a == o && e.b == s))
            })
            .map(|e| e.frame)
            .collect();
        if hits.iter().any(|&t| !affected.contains(&(s, t)) && !affected.contains(&(o, t))) {
            return Determination::Yes;
        }
        if hits.is_empty() && !affected.iter().any(|n| n.0 == s || n.0 == o) {
            return Determination::No;
        }
        Determination::Undetermined
    }
}

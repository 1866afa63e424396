//! Temporal causal graph over event frames and the relations derived from it.
//!
//! Nodes are `(object, frame)` for every object and every frame at which some
//! event happens. Collisions between movable objects add horizontal edges in
//! both directions; each movable object gets a vertical edge between
//! consecutive event frames. Enter events contribute frames only.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::model::{
    Determination, EventKind, EventSet, Frame, ObjectId, ObjectRecord, ResolvedQuery, ResolvedVariant,
};

pub type Node = (ObjectId, Frame);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalGraph {
    objects: Vec<ObjectId>,
    immovable: BTreeSet<ObjectId>,
    frames: Vec<Frame>,
    horizontal: Vec<(ObjectId, ObjectId, Frame)>,
    vertical: Vec<(Node, Node)>,
}

pub fn build_graph(objects: &[ObjectRecord], events: &EventSet) -> CausalGraph {
    let mut ids: Vec<ObjectId> = objects.iter().map(|o| o.id).collect();
    ids.sort();
    ids.dedup();
    let immovable: BTreeSet<ObjectId> = objects.iter().filter(|o| o.is_immovable()).map(|o| o.id).collect();
    let frames: Vec<Frame> = events
        .iter()
        .map(|e| e.frame)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let horizontal = events
        .iter()
        .filter(|e| e.kind == EventKind::Collide)
        .filter(|e| !immovable.contains(&e.a) && !immovable.contains(&e.b))
        .map(|e| (e.a, e.b, e.frame))
        .collect();
    let mut vertical = Vec::new();
    for &id in ids.iter().filter(|id| !immovable.contains(id)) {
        for w in frames.windows(2) {
            vertical.push(((id, w[0]), (id, w[1])));
        }
    }
    CausalGraph {
        objects: ids,
        immovable,
        frames,
        horizontal,
        vertical,
    }
}

impl CausalGraph {
    pub fn objects(&self) -> &[ObjectId] {
        &self.objects
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn horizontal_edges(&self) -> &[(ObjectId, ObjectId, Frame)] {
        &self.horizontal
    }

    pub fn vertical_edges(&self) -> &[(Node, Node)] {
        &self.vertical
    }

    pub fn is_immovable(&self, id: ObjectId) -> bool {
        self.immovable.contains(&id)
    }

    pub fn node_count(&self) -> usize {
        self.objects.len() * self.frames.len()
    }

    /// Nodes in (object, frame) order; a node's position is its index.
    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        self.objects
            .iter()
            .flat_map(move |&o| self.frames.iter().map(move |&t| (o, t)))
    }

    pub fn index_of(&self, node: Node) -> Option<usize> {
        let oi = self.objects.binary_search(&node.0).ok()?;
        let ti = self.frames.binary_search(&node.1).ok()?;
        Some(oi * self.frames.len() + ti)
    }

    fn node_at(&self, index: usize) -> Node {
        let k = self.frames.len();
        (self.objects[index / k], self.frames[index % k])
    }

    /// Directed successor lists; horizontal edges appear in both directions.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        let mut link = |from: Node, to: Node| {
            let (f, t) = (self.index_of(from), self.index_of(to));
            if let (Some(f), Some(t)) = (f, t) {
                adj[f].push(t);
            }
        };
        for &(a, b, t) in &self.horizontal {
            link((a, t), (b, t));
            link((b, t), (a, t));
        }
        for &(from, to) in &self.vertical {
            link(from, to);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

/// Fixed-width bitset rows; row `i` holds the descendants of node `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ancestry {
    graph_nodes: Vec<Node>,
    words: usize,
    rows: Vec<u64>,
}

impl Ancestry {
    fn empty(graph: &CausalGraph) -> Self {
        let n = graph.node_count();
        let words = n.div_ceil(64).max(1);
        Self {
            graph_nodes: graph.nodes().collect(),
            words,
            rows: vec![0; n * words],
        }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    fn test(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Sets the bit and reports whether it was newly set.
    fn set(&mut self, i: usize, j: usize) -> bool {
        let word = &mut self.rows[i * self.words + j / 64];
        let mask = 1u64 << (j % 64);
        let fresh = *word & mask == 0;
        *word |= mask;
        fresh
    }

    fn index(&self, node: Node) -> Option<usize> {
        self.graph_nodes.binary_search(&node).ok()
    }

    pub fn is_ancestor(&self, from: Node, to: Node) -> bool {
        match (self.index(from), self.index(to)) {
            (Some(i), Some(j)) => self.test(i, j),
            _ => false,
        }
    }

    pub fn descendants(&self, from: Node) -> Vec<Node> {
        let Some(i) = self.index(from) else {
            return Vec::new();
        };
        (0..self.graph_nodes.len())
            .filter(|&j| self.test(i, j))
            .map(|j| self.graph_nodes[j])
            .collect()
    }

    pub fn pairs(&self) -> BTreeSet<(Node, Node)> {
        let n = self.graph_nodes.len();
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                if self.test(i, j) {
                    out.insert((self.graph_nodes[i], self.graph_nodes[j]));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|w| *w == 0)
    }
}

/// Transitive closure of the edge relation without self pairs, by semi-naive
/// evaluation: each round joins only the pairs derived in the previous round
/// with the base edges.
pub fn ancestors(graph: &CausalGraph) -> Ancestry {
    let adj = graph.successors();
    let mut rel = Ancestry::empty(graph);
    let mut delta: Vec<(usize, usize)> = Vec::new();
    for (i, succ) in adj.iter().enumerate() {
        for &j in succ {
            if i != j && rel.set(i, j) {
                delta.push((i, j));
            }
        }
    }
    while !delta.is_empty() {
        let mut next = Vec::new();
        for (i, mid) in delta {
            for &j in &adj[mid] {
                if i != j && rel.set(i, j) {
                    next.push((i, j));
                }
            }
        }
        delta = next;
    }
    rel
}

/// Nodes affected by the intervention. An intervened object is affected at
/// every frame of the graph. With `remove_any`, a node is affected as soon as
/// a node of some other object reaches it.
pub fn affected(
    graph: &CausalGraph,
    ancestry: &Ancestry,
    intervened: &BTreeSet<ObjectId>,
    remove_any: bool,
) -> BTreeSet<Node> {
    let mut out = BTreeSet::new();
    for &o in intervened {
        if graph.objects.binary_search(&o).is_ok() {
            out.extend(graph.frames.iter().map(|&t| (o, t)));
        }
    }
    for i in 0..graph.node_count() {
        let source = graph.node_at(i);
        if !(intervened.contains(&source.0) || remove_any) {
            continue;
        }
        for (j, word) in ancestry.row(i).iter().enumerate() {
            let mut bits = *word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let target = graph.node_at(j * 64 + b);
                if intervened.contains(&source.0) || target.0 != source.0 {
                    out.insert(target);
                }
            }
        }
    }
    out
}

/// Earliest affected frame of each object that is not removed.
pub fn sim_nodes(affected: &BTreeSet<Node>, removed: &BTreeSet<ObjectId>) -> BTreeMap<ObjectId, Frame> {
    let mut out = BTreeMap::new();
    for &(o, t) in affected {
        if !removed.contains(&o) {
            out.entry(o).or_insert(t);
        }
    }
    out
}

/// Reads the answer off the perceived events when the intervention provably
/// leaves the queried nodes alone. Negation is not applied here.
pub fn determine_pair(
    subject: ObjectId,
    kind: EventKind,
    object: ObjectId,
    removed: &BTreeSet<ObjectId>,
    events: &EventSet,
    affected: &BTreeSet<Node>,
) -> Determination {
    if removed.contains(&subject) || removed.contains(&object) {
        return Determination::No;
    }
    let frames = events.frames_of(kind, subject, object);
    if frames
        .iter()
        .any(|&t| !affected.contains(&(subject, t)) && !affected.contains(&(object, t)))
    {
        return Determination::Yes;
    }
    let touched = |o: ObjectId| affected.iter().any(|n| n.0 == o);
    if frames.is_empty() && !touched(subject) && !touched(object) {
        return Determination::No;
    }
    Determination::Undetermined
}

/// Graph, ancestry and intervention-specific relations for one query.
#[derive(Debug, Clone)]
pub struct DerivedRelations {
    pub graph: CausalGraph,
    pub ancestry: Ancestry,
    pub affected: BTreeSet<Node>,
    pub sim: BTreeMap<ObjectId, Frame>,
    pub elapsed: Duration,
}

impl DerivedRelations {
    pub fn compute(
        objects: &[ObjectRecord],
        events: &EventSet,
        intervened: &BTreeSet<ObjectId>,
        removed: &BTreeSet<ObjectId>,
        remove_any: bool,
    ) -> Self {
        let start = Instant::now();
        let graph = build_graph(objects, events);
        let ancestry = ancestors(&graph);
        let affected = affected(&graph, &ancestry, intervened, remove_any);
        let sim = sim_nodes(&affected, removed);
        let elapsed = start.elapsed();
        Self {
            graph,
            ancestry,
            affected,
            sim,
            elapsed,
        }
    }

    pub fn for_query(objects: &[ObjectRecord], events: &EventSet, query: &ResolvedQuery) -> Self {
        Self::compute(
            objects,
            events,
            &query.intervened,
            &query.removed,
            query.is_remove_any(),
        )
    }
}

/// Determination for a resolved query. Counting queries are never determined
/// by this rule.
pub fn determine(query: &ResolvedQuery, events: &EventSet, derived: &DerivedRelations) -> Determination {
    match query.variant {
        ResolvedVariant::Pair {
            subject,
            kind,
            object,
        } => determine_pair(subject, kind, object, &query.removed, events, &derived.affected),
        ResolvedVariant::RemoveAny {
            subject,
            kind,
            object,
        } => determine_pair(subject, kind, object, &BTreeSet::new(), events, &derived.affected),
        ResolvedVariant::Counting { .. } => Determination::Undetermined,
    }
}

/// Flat summary for reports and CLI output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationSummary {
    pub affected: Vec<Node>,
    pub sim: Vec<Node>,
}

impl From<&DerivedRelations> for RelationSummary {
    fn from(d: &DerivedRelations) -> Self {
        Self {
            affected: d.affected.iter().copied().collect(),
            sim: d.sim.iter().map(|(o, t)| (*o, *t)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{normalize_events, Attribute, Event};
    use std::collections::VecDeque;

    const ORANGE: u32 = 0;
    const PURPLE: u32 = 1;
    const CYAN: u32 = 2;
    const GREEN: u32 = 3;
    const BLUE: u32 = 4;

    fn example_one() -> (Vec<ObjectRecord>, EventSet) {
        let objects = (0..5).map(ObjectRecord::new).collect();
        let events = normalize_events(&[
            Event::collide(CYAN, GREEN, 30),
            Event::collide(GREEN, BLUE, 55),
            Event::collide(PURPLE, CYAN, 100),
        ])
        .unwrap();
        (objects, events)
    }

    fn n(o: u32, t: Frame) -> Node {
        (ObjectId(o), t)
    }

    fn set(ids: &[u32]) -> BTreeSet<ObjectId> {
        ids.iter().map(|&i| ObjectId(i)).collect()
    }

    fn bfs_pairs(graph: &CausalGraph) -> BTreeSet<(Node, Node)> {
        let adj = graph.successors();
        let nodes: Vec<Node> = graph.nodes().collect();
        let mut out = BTreeSet::new();
        for s in 0..nodes.len() {
            let mut seen = vec![false; nodes.len()];
            let mut queue: VecDeque<usize> = adj[s].iter().copied().collect();
            while let Some(v) = queue.pop_front() {
                if std::mem::replace(&mut seen[v], true) {
                    continue;
                }
                queue.extend(adj[v].iter().copied());
            }
            for (v, hit) in seen.iter().enumerate() {
                if *hit && v != s {
                    out.insert((nodes[s], nodes[v]));
                }
            }
        }
        out
    }

    #[test]
    fn example_one_shape() {
        let (objects, events) = example_one();
        let g = build_graph(&objects, &events);
        assert_eq!(g.node_count(), 15);
        assert_eq!(g.horizontal_edges().len(), 3);
        assert_eq!(g.vertical_edges().len(), 10);
        assert_eq!(g.frames(), &[30, 55, 100]);
    }

    #[test]
    fn empty_events_give_empty_graph() {
        let g = build_graph(&[ObjectRecord::new(0)], &EventSet::new());
        assert_eq!(g.node_count(), 0);
        assert!(ancestors(&g).is_empty());
    }

    #[test]
    fn blue_thirty_reaches_later_blue_and_green() {
        let (objects, events) = example_one();
        let g = build_graph(&objects, &events);
        let a = ancestors(&g);
        let got: BTreeSet<Node> = a.descendants(n(BLUE, 30)).into_iter().collect();
        let want: BTreeSet<Node> =
            [n(BLUE, 55), n(BLUE, 100), n(GREEN, 55), n(GREEN, 100)].into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn same_frame_collision_is_mutual() {
        let (objects, events) = example_one();
        let a = ancestors(&build_graph(&objects, &events));
        assert!(a.is_ancestor(n(CYAN, 30), n(GREEN, 30)));
        assert!(a.is_ancestor(n(GREEN, 30), n(CYAN, 30)));
        assert!(!a.is_ancestor(n(CYAN, 30), n(CYAN, 30)));
    }

    #[test]
    fn removing_blue() {
        let (objects, events) = example_one();
        let d = DerivedRelations::compute(&objects, &events, &set(&[BLUE]), &set(&[BLUE]), false);
        let want: BTreeSet<Node> = [
            n(BLUE, 30),
            n(BLUE, 55),
            n(BLUE, 100),
            n(GREEN, 55),
            n(GREEN, 100),
        ]
        .into_iter()
        .collect();
        assert_eq!(d.affected, want);
        assert_eq!(d.sim, BTreeMap::from([(ObjectId(GREEN), 55)]));
        let q = ResolvedQuery::pair(&[BLUE], PURPLE, EventKind::Collide, CYAN);
        assert_eq!(determine(&q, &events, &d), Determination::Yes);
    }

    #[test]
    fn nothing_intervened() {
        let (objects, events) = example_one();
        let d = DerivedRelations::compute(&objects, &events, &BTreeSet::new(), &BTreeSet::new(), false);
        assert!(d.affected.is_empty());
        assert!(d.sim.is_empty());
    }

    #[test]
    fn remove_any_reaches_green_from_two_sides() {
        let (objects, events) = example_one();
        let g = build_graph(&objects, &events);
        let a = ancestors(&g);
        assert!(a.is_ancestor(n(BLUE, 30), n(GREEN, 55)));
        assert!(a.is_ancestor(n(CYAN, 30), n(GREEN, 55)));
        let hit = affected(&g, &a, &BTreeSet::new(), true);
        assert!(hit.contains(&n(GREEN, 55)));
        // Orange never interacts, so nothing of another object reaches it.
        assert!(!hit.iter().any(|node| node.0 == ObjectId(ORANGE)));
        let q = ResolvedQuery {
            intervened: BTreeSet::new(),
            removed: BTreeSet::new(),
            variant: ResolvedVariant::RemoveAny {
                subject: ObjectId(GREEN),
                kind: EventKind::Collide,
                object: ObjectId(BLUE),
            },
            negated: false,
        };
        let d = DerivedRelations::for_query(&objects, &events, &q);
        assert_eq!(determine(&q, &events, &d), Determination::Undetermined);
    }

    #[test]
    fn removed_subject_is_no() {
        let (objects, events) = example_one();
        let d = DerivedRelations::compute(&objects, &events, &set(&[BLUE]), &set(&[BLUE]), false);
        let q = ResolvedQuery::pair(&[BLUE], BLUE, EventKind::Collide, GREEN);
        assert_eq!(determine(&q, &events, &d), Determination::No);
    }

    #[test]
    fn immovable_objects_have_no_edges() {
        let objects = vec![
            ObjectRecord::new(0),
            ObjectRecord::new(1),
            ObjectRecord::new(2),
            ObjectRecord::new(95).with(Attribute::Shape, "ground"),
            ObjectRecord::new(97).with(Attribute::Shape, "basket"),
        ];
        let events = normalize_events(&[
            Event::collide(0, 2, 0),
            Event::collide(0, 2, 2),
            Event::collide(1, 97, 3),
            Event::enter(1, 97, 1),
        ])
        .unwrap();
        let g = build_graph(&objects, &events);
        assert_eq!(g.frames(), &[0, 1, 2, 3]);
        assert_eq!(g.horizontal_edges(), &[(ObjectId(0), ObjectId(2), 0), (ObjectId(0), ObjectId(2), 2)]);
        let movers: BTreeSet<ObjectId> = g.vertical_edges().iter().map(|(a, _)| a.0).collect();
        assert_eq!(movers, set(&[0, 1, 2]));
        let d = DerivedRelations::compute(&objects, &events, &set(&[0]), &set(&[0]), false);
        assert_eq!(d.sim, BTreeMap::from([(ObjectId(2), 0)]));
        let q = ResolvedQuery::pair(&[0], 1, EventKind::Enter, 97);
        assert_eq!(determine(&q, &events, &d), Determination::Yes);
    }

    #[test]
    fn semi_naive_matches_bfs_on_example() {
        let (objects, events) = example_one();
        let g = build_graph(&objects, &events);
        assert_eq!(ancestors(&g).pairs(), bfs_pairs(&g));
    }
}

//! Pipeline ablations over generated scenes: naive simulation from frame 1,
//! determination-override of the naive answer, and graph-guided enhanced
//! simulation, scored against the exact counterfactual world.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::Duration;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{determine_pair, DerivedRelations};
use crate::iod::{smooth, IodError, SmoothingConfig};
use crate::model::{
    Determination, EventKind, EventSet, Frame, ModelError, ObjectId, Scene, Trace, Vec2,
};
use crate::orchestrator::{enhanced_simulate, EnhancedConfig, EnhancedRun, OrchestratorError, SimMode};
use crate::sps::{CollisionDetector, DEFAULT_MAX_S};
use crate::world::{
    generate_world, perceive, simulate_truth, substream, GeneratorConfig, NoiseConfig, Stepper, WorldConfig,
    WorldError,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("scene {scene}: {source}")]
    World { scene: usize, source: WorldError },
    #[error("scene {scene}: {source}")]
    Orchestrator { scene: usize, source: OrchestratorError },
    #[error("scene {scene}: {source}")]
    Iod { scene: usize, source: IodError },
    #[error("scene {scene}: {source}")]
    Model { scene: usize, source: ModelError },
    #[error("cannot score scene {0}: no ground-truth sidecar")]
    CannotScore(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Naive,
    Approx,
    Full,
}

impl Pipeline {
    pub const ALL: [Pipeline; 3] = [Pipeline::Naive, Pipeline::Approx, Pipeline::Full];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Naive => "naive",
            Pipeline::Approx => "approx",
            Pipeline::Full => "full",
        }
    }
}

/// Noise defaults for the ordering experiment: perception is much closer to
/// the truth than free-running simulation.
pub const DEFAULT_NOISE: NoiseConfig = NoiseConfig {
    sigma_p: 0.1,
    p_drop: 0.05,
    sigma_s: 2.0,
    seed: 0,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub scenes: usize,
    pub seed: u64,
    pub generator: GeneratorConfig,
    pub noise: NoiseConfig,
    pub max_s: Frame,
    pub detector: CollisionDetector,
    pub iod_window: usize,
    pub velocity_window: u32,
    pub options_per_question: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            scenes: 200,
            seed: 7,
            generator: GeneratorConfig::default(),
            noise: DEFAULT_NOISE,
            max_s: DEFAULT_MAX_S,
            detector: CollisionDetector::default(),
            iod_window: 5,
            velocity_window: 5,
            options_per_question: 4,
        }
    }
}

impl BenchConfig {
    pub fn zero_noise(scenes: usize, seed: u64) -> Self {
        Self {
            scenes,
            seed,
            noise: NoiseConfig {
                seed,
                ..NoiseConfig::ZERO
            },
            iod_window: 1,
            velocity_window: 1,
            ..Self::default()
        }
    }

    fn enhanced(&self, mode: SimMode) -> EnhancedConfig {
        EnhancedConfig {
            max_v: self.generator.max_v,
            max_s: self.max_s,
            mode,
            velocity_window: self.velocity_window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchOption {
    pub subject: ObjectId,
    pub object: ObjectId,
    /// Whether the pair collides in the exact counterfactual world.
    pub truth: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchQuestion {
    pub removed: ObjectId,
    pub options: Vec<BenchOption>,
}

/// Ground truth kept beside a perceived scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSidecar {
    pub index: usize,
    pub world: WorldConfig,
    pub factual_events: Vec<crate::model::Event>,
    pub questions: Vec<BenchQuestion>,
}

/// A perceived scene with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchScene {
    pub perceived: Scene,
    pub truth: TruthSidecar,
}

/// Generates scene `index`: exact world, degraded perception (positions
/// only), and one removal question with up to `options_per_question` pairs.
pub fn prepare_scene(config: &BenchConfig, index: usize) -> Result<BenchScene, BenchError> {
    let world_err = |source| BenchError::World { scene: index, source };
    let mut world = generate_world(&config.generator, config.seed, index as u64).map_err(world_err)?;
    world.seed = config.seed;
    let max_v = world.max_v;
    let (trace, events) = simulate_truth(&world, &BTreeSet::new(), max_v).map_err(world_err)?;
    let (seen, seen_events) = perceive(&trace, &events, &config.noise, index as u64, &config.detector);
    let perceived = Scene {
        objects: world.objects(),
        max_v,
        traces: seen.without_velocities(),
        events: seen_events.as_slice().to_vec(),
    };
    let (_, long_events) = simulate_truth(&world, &BTreeSet::new(), config.max_s).map_err(world_err)?;

    let mut rng = substream(config.seed, "question-gen", index as u64);
    let involved: Vec<ObjectId> = events
        .iter()
        .flat_map(|e| [e.a, e.b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let removed = involved[rng.random_range(0..involved.len())];
    let remove = BTreeSet::from([removed]);
    let (_, cf_events) = simulate_truth(&world, &remove, config.max_s).map_err(world_err)?;

    let ids: Vec<ObjectId> = world.objects().iter().map(|o| o.id).filter(|&o| o != removed).collect();
    let mut pairs = Vec::new();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            pairs.push((a, b));
        }
    }
    let interesting = |&(a, b): &(ObjectId, ObjectId)| {
        cf_events.contains_pair(EventKind::Collide, a, b) || long_events.contains_pair(EventKind::Collide, a, b)
    };
    let (mut hot, mut cold): (Vec<_>, Vec<_>) = pairs.into_iter().partition(interesting);
    shuffle(&mut hot, &mut rng);
    shuffle(&mut cold, &mut rng);
    let want = config.options_per_question;
    let hot_take = hot.len().min(want);
    let mut chosen: Vec<(ObjectId, ObjectId)> = hot.drain(..hot_take).collect();
    chosen.extend(cold.into_iter().chain(hot).take(want - chosen.len().min(want)));
    let options = chosen
        .into_iter()
        .map(|(a, b)| BenchOption {
            subject: a,
            object: b,
            truth: cf_events.contains_pair(EventKind::Collide, a, b),
        })
        .collect();

    Ok(BenchScene {
        perceived,
        truth: TruthSidecar {
            index,
            world,
            factual_events: events.as_slice().to_vec(),
            questions: vec![BenchQuestion { removed, options }],
        },
    })
}

fn shuffle<T>(items: &mut [T], rng: &mut impl Rng) {
    for i in (1..items.len()).rev() {
        items.swap(i, rng.random_range(0..=i));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OptionOutcome {
    pub truth: bool,
    pub determination: Determination,
    pub naive: bool,
    pub approx: bool,
    pub full: bool,
}

impl OptionOutcome {
    pub fn answer(&self, pipeline: Pipeline) -> bool {
        match pipeline {
            Pipeline::Naive => self.naive,
            Pipeline::Approx => self.approx,
            Pipeline::Full => self.full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionOutcome {
    pub removed: ObjectId,
    pub sim_nodes: BTreeMap<ObjectId, Frame>,
    pub options: Vec<OptionOutcome>,
    #[serde(skip)]
    pub fixpoint: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneOutcome {
    pub index: usize,
    pub questions: Vec<QuestionOutcome>,
}

/// Dense perception used by every pipeline: trajectory gaps filled and
/// smoothed, events taken as perceived.
pub fn processed_perception(scene: &Scene, config: &BenchConfig, index: usize) -> Result<(Trace, EventSet), BenchError> {
    let window = SmoothingConfig::new(config.iod_window).map_err(|source| BenchError::Iod { scene: index, source })?;
    let dense = smooth(&scene.traces, scene.max_v, window).map_err(|source| BenchError::Iod { scene: index, source })?;
    let events = scene
        .normalized_events()
        .map_err(|source| BenchError::Model { scene: index, source })?;
    Ok((dense, events))
}

fn sim_stream(config: &BenchConfig, scene: usize, question: usize, slot: u64) -> rand_chacha::ChaCha8Rng {
    substream(config.noise.seed, "sim-noise", ((scene as u64) << 16) | ((question as u64) << 4) | slot)
}

fn simulator(config: &BenchConfig, world: &WorldConfig, scene: usize, question: usize, slot: u64) -> Stepper {
    Stepper::noisy(
        world.arena,
        world.body_params(),
        config.noise.sigma_s,
        sim_stream(config, scene, question, slot),
    )
}

const FACTUAL_SLOT: u64 = 0;
const NAIVE_SLOT: u64 = 1;
const FULL_SLOT: u64 = 2;

/// In-video perceived events plus the post-video collisions of a factual
/// enhanced run, which together form the graph's event facts.
pub fn graph_events(
    scene: &BenchScene,
    dense: &Trace,
    events: &EventSet,
    config: &BenchConfig,
) -> Result<EventSet, BenchError> {
    let index = scene.truth.index;
    let active: BTreeSet<ObjectId> = scene.perceived.object_ids();
    let mut sim = simulator(config, &scene.truth.world, index, usize::MAX >> 48, FACTUAL_SLOT);
    let run = enhanced_simulate(&BTreeMap::new(), &mut sim, dense, events, &active, &config.enhanced(SimMode::Full))
        .map_err(|source| BenchError::Orchestrator { scene: index, source })?;
    let max_v = scene.perceived.max_v;
    Ok(events.merged(&run.events.filtered(|e| e.frame > max_v)))
}

/// Answers every option of every question of one scene with all three
/// pipelines.
pub fn score_scene(scene: &BenchScene, config: &BenchConfig) -> Result<SceneOutcome, BenchError> {
    let index = scene.truth.index;
    let orch = |source| BenchError::Orchestrator { scene: index, source };
    let (dense, events) = processed_perception(&scene.perceived, config, index)?;
    let facts = graph_events(scene, &dense, &events, config)?;
    let objects = &scene.perceived.objects;
    let mut questions = Vec::new();
    for (qi, q) in scene.truth.questions.iter().enumerate() {
        let removed = BTreeSet::from([q.removed]);
        let active: BTreeSet<ObjectId> = objects.iter().map(|o| o.id).filter(|o| *o != q.removed).collect();

        let mut naive_sim = simulator(config, &scene.truth.world, index, qi, NAIVE_SLOT);
        let naive = enhanced_simulate(&BTreeMap::new(), &mut naive_sim, &dense, &events, &active, &config.enhanced(SimMode::Naive))
            .map_err(orch)?;

        let derived = DerivedRelations::compute(objects, &facts, &removed, &removed, false);
        let mut full_sim = simulator(config, &scene.truth.world, index, qi, FULL_SLOT);
        let full = enhanced_simulate(&derived.sim, &mut full_sim, &dense, &events, &active, &config.enhanced(SimMode::Full))
            .map_err(orch)?;

        let options = q
            .options
            .iter()
            .map(|opt| {
                let determination =
                    determine_pair(opt.subject, EventKind::Collide, opt.object, &removed, &facts, &derived.affected);
                let naive_yes = naive.events.contains_pair(EventKind::Collide, opt.subject, opt.object);
                let approx = match determination {
                    Determination::Yes => true,
                    Determination::No => false,
                    Determination::Undetermined => naive_yes,
                };
                OptionOutcome {
                    truth: opt.truth,
                    determination,
                    naive: naive_yes,
                    approx,
                    full: full.events.contains_pair(EventKind::Collide, opt.subject, opt.object),
                }
            })
            .collect();
        questions.push(QuestionOutcome {
            removed: q.removed,
            sim_nodes: derived.sim.clone(),
            options,
            fixpoint: derived.elapsed,
        });
    }
    Ok(SceneOutcome { index, questions })
}

/// Enhanced run for one question of a scene, for figures.
pub fn trajectory_run(scene: &BenchScene, config: &BenchConfig, question: usize, mode: SimMode) -> Result<EnhancedRun, BenchError> {
    let index = scene.truth.index;
    let (dense, events) = processed_perception(&scene.perceived, config, index)?;
    let facts = graph_events(scene, &dense, &events, config)?;
    let removed = BTreeSet::from([scene.truth.questions[question].removed]);
    let active: BTreeSet<ObjectId> = scene.perceived.object_ids().difference(&removed).copied().collect();
    let derived = DerivedRelations::compute(&scene.perceived.objects, &facts, &removed, &removed, false);
    let slot = if mode == SimMode::Full { FULL_SLOT } else { NAIVE_SLOT };
    let mut sim = simulator(config, &scene.truth.world, index, question, slot);
    enhanced_simulate(&derived.sim, &mut sim, &dense, &events, &active, &config.enhanced(mode))
        .map_err(|source| BenchError::Orchestrator { scene: index, source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Tally {
    pub total: usize,
    pub correct: usize,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.total += 1;
        self.correct += ok as usize;
    }

    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.correct as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub pipeline: Pipeline,
    pub per_option: Tally,
    pub per_question: Tally,
    pub determined: Tally,
    pub not_determined: Tally,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingStats {
    pub fixpoint_median_ms: f64,
    pub fixpoint_max_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub scenes: usize,
    pub questions: usize,
    pub options: usize,
    pub pipelines: Vec<PipelineReport>,
    #[serde(skip)]
    pub timing: TimingStats,
}

impl BenchReport {
    pub fn pipeline(&self, p: Pipeline) -> &PipelineReport {
        self.pipelines.iter().find(|r| r.pipeline == p).expect("every pipeline is reported")
    }

    pub fn from_outcomes(outcomes: &[SceneOutcome]) -> Self {
        let mut pipelines: Vec<PipelineReport> = Pipeline::ALL
            .iter()
            .map(|&pipeline| PipelineReport {
                pipeline,
                per_option: Tally::default(),
                per_question: Tally::default(),
                determined: Tally::default(),
                not_determined: Tally::default(),
            })
            .collect();
        let mut questions = 0;
        let mut options = 0;
        let mut times: Vec<f64> = Vec::new();
        for q in outcomes.iter().flat_map(|s| &s.questions) {
            questions += 1;
            options += q.options.len();
            times.push(q.fixpoint.as_secs_f64() * 1e3);
            for report in &mut pipelines {
                let mut all = true;
                for opt in &q.options {
                    let ok = opt.answer(report.pipeline) == opt.truth;
                    all &= ok;
                    report.per_option.add(ok);
                    if opt.determination.is_determined() {
                        report.determined.add(ok);
                    } else {
                        report.not_determined.add(ok);
                    }
                }
                report.per_question.add(all);
            }
        }
        times.sort_by(f64::total_cmp);
        let timing = TimingStats {
            fixpoint_median_ms: times.get(times.len() / 2).copied().unwrap_or(0.0),
            fixpoint_max_ms: times.last().copied().unwrap_or(0.0),
        };
        Self {
            scenes: outcomes.len(),
            questions,
            options,
            pipelines,
            timing,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scenes {}  questions {}  options {}",
            self.scenes, self.questions, self.options
        );
        let _ = writeln!(
            out,
            "{:<8} {:>10} {:>10} {:>16} {:>16}",
            "pipeline", "option %", "question %", "determined %", "not determined %"
        );
        for r in &self.pipelines {
            let _ = writeln!(
                out,
                "{:<8} {:>10.2} {:>10.2} {:>9.2} ({:>4}) {:>9.2} ({:>4})",
                r.pipeline.name(),
                r.per_option.accuracy(),
                r.per_question.accuracy(),
                r.determined.accuracy(),
                r.determined.total,
                r.not_determined.accuracy(),
                r.not_determined.total,
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "pipeline,options,option_correct,questions,question_correct,determined,determined_correct,not_determined,not_determined_correct\n",
        );
        for r in &self.pipelines {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.pipeline.name(),
                r.per_option.total,
                r.per_option.correct,
                r.per_question.total,
                r.per_question.correct,
                r.determined.total,
                r.determined.correct,
                r.not_determined.total,
                r.not_determined.correct
            );
        }
        out
    }
}

/// Scores already prepared scenes in parallel; results are reduced in input
/// order.
pub fn score_scenes(scenes: &[BenchScene], config: &BenchConfig) -> Result<Vec<SceneOutcome>, BenchError> {
    scenes.par_iter().map(|s| score_scene(s, config)).collect()
}

/// Generates and scores `config.scenes` scenes.
pub fn run_bench(config: &BenchConfig) -> Result<(BenchReport, Vec<SceneOutcome>), BenchError> {
    let outcomes: Vec<SceneOutcome> = (0..config.scenes)
        .into_par_iter()
        .map(|i| prepare_scene(config, i).and_then(|s| score_scene(&s, config)))
        .collect::<Result<_, _>>()?;
    Ok((BenchReport::from_outcomes(&outcomes), outcomes))
}

const SVG_PALETTE: [&str; 8] = ["#7f7f7f", "#d62728", "#1f77b4", "#2ca02c", "#8c564b", "#9467bd", "#17becf", "#bcbd22"];

fn color_for(scene: &Scene, id: ObjectId) -> &'static str {
    let named = scene
        .object(id)
        .and_then(|o| o.feature(crate::model::Attribute::Color))
        .and_then(|c| crate::world::COLORS.iter().position(|k| *k == c));
    SVG_PALETTE[named.unwrap_or(id.0 as usize % SVG_PALETTE.len())]
}

fn polyline(points: &[Vec2], color: &str, dashed: bool) -> String {
    let coords: Vec<String> = points.iter().map(|p| format!("{:.2},{:.2}", p.x, p.y)).collect();
    let dash = if dashed { " stroke-dasharray=\"4 3\"" } else { "" };
    format!(
        "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>\n",
        coords.join(" ")
    )
}

/// SVG with one polyline per object (solid where perceived, dashed where
/// simulated) and a labeled marker per collision, plus the matching CSV rows
/// `object,frame,x,y,source`.
pub fn dump_trajectories(scene: &Scene, run: Option<&EnhancedRun>) -> (String, String) {
    let trace = run.map_or(&scene.traces, |r| &r.traces);
    let events: Vec<crate::model::Event> = match run {
        Some(r) => r.events.as_slice().to_vec(),
        None => scene.events.clone(),
    };
    let perceived = |o: ObjectId, f: Frame| run.is_none_or(|r| r.is_perceived(o, f));
    let mut csv = String::from("object,frame,x,y,source\n");
    let (mut max_x, mut max_y) = (0.0f64, 0.0f64);
    for (&id, states) in trace.tracks() {
        for s in states {
            max_x = max_x.max(s.pos.x);
            max_y = max_y.max(s.pos.y);
            let source = if perceived(id, s.frame) { "perception" } else { "simulated" };
            let _ = writeln!(csv, "{},{},{:.3},{:.3},{}", id, s.frame, s.pos.x, s.pos.y, source);
        }
    }
    let (w, h) = (max_x.ceil() + 20.0, max_y.ceil() + 20.0);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    for (&id, states) in trace.tracks() {
        let color = color_for(scene, id);
        let split = states.iter().position(|s| !perceived(id, s.frame)).unwrap_or(states.len());
        let seen: Vec<Vec2> = states[..split].iter().map(|s| s.pos).collect();
        if seen.len() > 1 {
            svg.push_str(&polyline(&seen, color, false));
        }
        let from = split.saturating_sub(1);
        let simulated: Vec<Vec2> = states[from..].iter().map(|s| s.pos).collect();
        if split < states.len() && simulated.len() > 1 {
            svg.push_str(&polyline(&simulated, color, true));
        }
    }
    for e in &events {
        let (Some(a), Some(b)) = (trace.state_at(e.a, e.frame), trace.state_at(e.b, e.frame)) else {
            continue;
        };
        let m = (a.pos + b.pos) * 0.5;
        let _ = writeln!(
            svg,
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\">{}</text>",
            m.x,
            m.y,
            m.x + 6.0,
            m.y - 6.0,
            e.frame
        );
    }
    svg.push_str("</svg>\n");
    (svg, csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_scene_gives_empty_canvas() {
        let (svg, csv) = dump_trajectories(&Scene::default(), None);
        assert!(svg.starts_with("<svg"));
        assert!(!svg.contains("polyline"));
        assert_eq!(csv, "object,frame,x,y,source\n");
    }

    #[test]
    fn prepared_scenes_have_four_distinct_options() {
        let config = BenchConfig::default();
        for i in 0..5 {
            let scene = prepare_scene(&config, i).unwrap();
            let q = &scene.truth.questions[0];
            assert_eq!(q.options.len(), 4);
            let pairs: BTreeSet<_> = q.options.iter().map(|o| (o.subject, o.object)).collect();
            assert_eq!(pairs.len(), 4);
            assert!(q.options.iter().all(|o| o.subject != q.removed && o.object != q.removed));
        }
    }

    #[test]
    fn tallies_split_by_determination() {
        let outcome = SceneOutcome {
            index: 0,
            questions: vec![QuestionOutcome {
                removed: ObjectId(0),
                sim_nodes: BTreeMap::new(),
                options: vec![
                    OptionOutcome {
                        truth: true,
                        determination: Determination::Yes,
                        naive: false,
                        approx: true,
                        full: true,
                    },
                    OptionOutcome {
                        truth: false,
                        determination: Determination::Undetermined,
                        naive: false,
                        approx: false,
                        full: true,
                    },
                ],
                fixpoint: Duration::ZERO,
            }],
        };
        let report = BenchReport::from_outcomes(&[outcome]);
        let naive = report.pipeline(Pipeline::Naive);
        assert_eq!(naive.per_option, Tally { total: 2, correct: 1 });
        assert_eq!(naive.per_question, Tally { total: 1, correct: 0 });
        let approx = report.pipeline(Pipeline::Approx);
        assert_eq!(approx.per_question, Tally { total: 1, correct: 1 });
        let full = report.pipeline(Pipeline::Full);
        assert_eq!(full.determined, Tally { total: 1, correct: 1 });
        assert_eq!(full.not_determined, Tally { total: 1, correct: 0 });
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::anyhow;
use clap::{Args, ValueEnum};
use crcg_core::bench::TruthSidecar;
use crcg_core::graph::{determine, DerivedRelations};
use crcg_core::iod::{smooth, SmoothingConfig};
use crcg_core::model::{
    Answer, Determination, EventKind, EventSet, Intervention, ObjectId, Prediction, Query, QueryVariant,
    ResolvedQuery, ResolvedVariant, Scene, Selector, Trace,
};
use crcg_core::orchestrator::{
    answer_counting, answer_pair, answer_remove_any, approx_answer, enhanced_simulate, EnhancedConfig,
    OrchestratorError, SimMode,
};
use crcg_core::sps::{estimate_friction, TemporalResolution, DEFAULT_MAX_S};
use crcg_core::world::{substream, Arena, BodyParams, Stepper, DEFAULT_RADIUS};
use serde::Serialize;

use crate::io::{load_scene, load_sidecar};
use crate::{CmdResult, Failure, OutputFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PipelineArg {
    /// Answer only what the causal graph determines.
    Determine,
    /// Determinations override a supplied prediction.
    Approx,
    /// Graph-guided simulation.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredictArg {
    Yes,
    No,
}

#[derive(Debug, Args)]
pub struct AnswerArgs {
    /// Scene document (`.json`) or fact program (`.lp`, may carry the question).
    #[arg(long)]
    scene: PathBuf,
    /// Object to remove; repeatable.
    #[arg(long)]
    remove: Vec<String>,
    /// Ask about removing any single other object.
    #[arg(long, conflicts_with = "remove")]
    remove_any: bool,
    /// Object the event is asked about, as `#id` or feature values.
    #[arg(long, requires = "object")]
    subject: Option<String>,
    /// Other party of the event.
    #[arg(long)]
    object: Option<String>,
    /// Count objects taking part in `--kind` with this target.
    #[arg(long, conflicts_with_all = ["subject", "object", "remove_any"])]
    count: Option<String>,
    /// `collide` or `enter`.
    #[arg(long, default_value = "collide")]
    kind: EventKind,
    /// Ask whether the event does not happen.
    #[arg(long)]
    negate: bool,
    #[arg(long, value_enum, default_value_t = PipelineArg::Determine)]
    pipeline: PipelineArg,
    /// Baseline prediction used by `approx` when nothing is determined.
    #[arg(long, value_enum)]
    predict: Option<PredictArg>,
    /// Ground-truth sidecar supplying body parameters for simulation.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Last simulated frame.
    #[arg(long, default_value_t = DEFAULT_MAX_S)]
    max_s: u32,
    /// Smoothing window applied to perceived trajectories.
    #[arg(long, default_value_t = 1)]
    iod_window: usize,
    /// Frames spanned when estimating a handoff velocity.
    #[arg(long, default_value_t = 1)]
    velocity_window: u32,
    /// Simulator noise scale.
    #[arg(long, default_value_t = 0.0)]
    sigma_s: f64,
    /// Seed of the simulator noise stream.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct OptionAnswer {
    option: u32,
    determination: Option<Determination>,
    sim: Vec<(ObjectId, u32)>,
    answer: Answer,
}

fn flag_query(args: &AnswerArgs) -> Result<Query, Failure> {
    let sel = |s: &str| s.parse::<Selector>().map_err(Failure::config);
    let interventions = args
        .remove
        .iter()
        .map(|s| sel(s).map(Intervention::remove))
        .collect::<Result<Vec<_>, _>>()?;
    let variant = match (&args.count, &args.subject, &args.object) {
        (Some(target), _, _) => QueryVariant::Counting {
            kind: args.kind,
            target: sel(target)?,
        },
        (None, Some(s), Some(o)) if args.remove_any => QueryVariant::RemoveAny {
            subject: sel(s)?,
            kind: args.kind,
            object: sel(o)?,
        },
        (None, Some(s), Some(o)) => QueryVariant::PairEvent {
            subject: sel(s)?,
            kind: args.kind,
            object: sel(o)?,
        },
        _ => return Err(Failure::Config(anyhow!("give --subject and --object, or --count"))),
    };
    Ok(Query {
        interventions,
        variant,
        negated: args.negate,
    })
}

/// Perception, simulator and event facts for one scene.
struct Setting<'a> {
    scene: &'a Scene,
    dense: Option<Trace>,
    perceived: EventSet,
    facts: EventSet,
    arena: Arena,
    bodies: BTreeMap<ObjectId, BodyParams>,
    config: EnhancedConfig,
    sigma_s: f64,
    seed: u64,
}

impl<'a> Setting<'a> {
    fn new(scene: &'a Scene, args: &AnswerArgs, truth: Option<&TruthSidecar>) -> Result<Self, Failure> {
        let perceived = scene.normalized_events().map_err(Failure::config)?;
        let config = EnhancedConfig {
            max_v: scene.max_v,
            max_s: args.max_s,
            mode: SimMode::Full,
            velocity_window: args.velocity_window,
        };
        let dense = if scene.traces.is_empty() {
            None
        } else {
            let window = SmoothingConfig::new(args.iod_window).map_err(Failure::config)?;
            Some(smooth(&scene.traces, scene.max_v, window).map_err(Failure::config)?)
        };
        let movable = scene.objects.iter().filter(|o| !o.is_immovable()).map(|o| o.id);
        let (arena, bodies) = match (truth, &dense) {
            (Some(t), _) => (t.world.arena, t.world.body_params()),
            (None, Some(trace)) => (
                Arena::default(),
                movable
                    .map(|o| {
                        let friction = estimate_friction(trace, o, TemporalResolution::DENSE).unwrap_or(0.0);
                        (o, BodyParams { radius: DEFAULT_RADIUS, friction })
                    })
                    .collect(),
            ),
            (None, None) => (Arena::default(), BTreeMap::new()),
        };
        let mut setting = Self {
            scene,
            perceived: perceived.clone(),
            facts: perceived,
            dense,
            arena,
            bodies,
            config,
            sigma_s: args.sigma_s,
            seed: args.seed,
        };
        if setting.dense.is_some() && args.max_s > scene.max_v {
            let run = setting.simulate(&BTreeMap::new(), &BTreeSet::new(), 0)?;
            let max_v = scene.max_v;
            setting.facts = setting.perceived.merged(&run.filtered(|e| e.frame > max_v));
        }
        Ok(setting)
    }

    fn simulate(
        &self,
        sim: &BTreeMap<ObjectId, u32>,
        removed: &BTreeSet<ObjectId>,
        slot: u64,
    ) -> Result<EventSet, Failure> {
        let dense = self
            .dense
            .as_ref()
            .ok_or_else(|| Failure::Config(anyhow!("simulation needs a scene with trajectories")))?;
        let active: BTreeSet<ObjectId> = self.bodies.keys().copied().filter(|o| !removed.contains(o)).collect();
        let mut stepper = Stepper::noisy(self.arena, self.bodies.clone(), self.sigma_s, substream(self.seed, "sim-noise", slot));
        enhanced_simulate(sim, &mut stepper, dense, &self.perceived, &active, &self.config)
            .map(|run| run.events)
            .map_err(|e: OrchestratorError| Failure::scoring(e))
    }

    fn answer(&self, q: &ResolvedQuery, pipeline: PipelineArg, predict: Option<PredictArg>) -> Result<OptionAnswer, Failure> {
        let derived = DerivedRelations::for_query(&self.scene.objects, &self.facts, q);
        let sim = derived.sim.iter().map(|(o, t)| (*o, *t)).collect();
        let determination = match q.variant {
            ResolvedVariant::Counting { .. } => None,
            _ => Some(determine(q, &self.facts, &derived)),
        };
        let answer = match (q.variant, pipeline) {
            (ResolvedVariant::Counting { kind, target }, PipelineArg::Full) => {
                let events = self.simulate(&derived.sim, &q.removed, 1)?;
                answer_counting(&events, kind, target, &q.removed, &BTreeMap::new())
            }
            (ResolvedVariant::Counting { kind, target }, _) => {
                answer_counting(&self.facts, kind, target, &q.removed, &derived.sim)
            }
            (ResolvedVariant::Pair { subject, kind, object }, PipelineArg::Full) => {
                let events = self.simulate(&derived.sim, &q.removed, 1)?;
                answer_pair(&events, subject, kind, object, q.negated)
            }
            (ResolvedVariant::RemoveAny { subject, kind, object }, PipelineArg::Full) => {
                let mut slot = 1;
                answer_remove_any(&self.scene.objects, &self.facts, subject, kind, object, q.negated, |r| {
                    let removed = BTreeSet::from([r]);
                    let d = DerivedRelations::compute(&self.scene.objects, &self.facts, &removed, &removed, false);
                    slot += 1;
                    let events = self
                        .simulate(&d.sim, &removed, slot)
                        .map_err(|_| OrchestratorError::MissingBaseline)?;
                    Ok(events.contains_pair(kind, subject, object))
                })
                .map_err(Failure::scoring)?
                .0
            }
            (_, PipelineArg::Approx) => {
                let baseline = predict.map(|p| Prediction::from_bool(p == PredictArg::Yes));
                approx_answer(determination.expect("non-counting"), q.negated, baseline)
                    .map_err(|_| Failure::Config(anyhow!("nothing is determined; pass --predict")))?
            }
            (_, PipelineArg::Determine) => match determination.expect("non-counting") {
                Determination::Yes => Answer::Yes.negate_if(q.negated),
                Determination::No => Answer::No.negate_if(q.negated),
                Determination::Undetermined => Answer::Undetermined,
            },
        };
        Ok(OptionAnswer {
            option: 0,
            determination,
            sim,
            answer,
        })
    }
}

pub fn run(args: AnswerArgs) -> CmdResult {
    let (scene, question) = load_scene(&args.scene)?;
    let queries: Vec<(u32, Query)> = match (&question, args.subject.is_some() || args.count.is_some()) {
        (_, true) => vec![(1, flag_query(&args)?)],
        (Some(q), false) => q.queries(),
        (None, false) => return Err(Failure::Config(anyhow!("no query: give --subject/--object or --count"))),
    };
    let truth = args.truth.as_deref().map(load_sidecar).transpose()?;
    let setting = Setting::new(&scene, &args, truth.as_ref())?;
    let mut answers = Vec::new();
    for (option, query) in queries {
        let resolved = query.resolve(&scene.objects).map_err(Failure::scoring)?;
        let mut a = setting.answer(&resolved, args.pipeline, args.predict)?;
        a.option = option;
        answers.push(a);
    }
    let text = match args.format {
        OutputFormat::Json => serde_json::to_string_pretty(&answers).expect("answers serialize") + "\n",
        OutputFormat::Text => {
            let mut out = String::new();
            for a in &answers {
                let det = a.determination.map_or("-".to_string(), |d| format!("{d:?}").to_lowercase());
                let sim = a.sim.iter().map(|(o, t)| format!("({o},{t})")).collect::<Vec<_>>().join(" ");
                let _ = writeln!(out, "option {}  determined {det}  sim [{sim}]  answer {}", a.option, a.answer);
            }
            out
        }
    };
    crate::write_out(args.out.as_ref(), &text)
}

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use crcg_core::facts::{FactProgram, FactStyle};
use crcg_core::graph::DerivedRelations;
use crcg_core::model::{resolve_selector, ObjectId, Selector};
use serde::Serialize;

use crate::io::load_scene;
use crate::{CmdResult, Failure, OutputFormat};

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Scene document (`.json`) or fact program (`.lp`).
    #[arg(long)]
    scene: PathBuf,
    /// Object to remove, as `#id` or feature values; repeatable.
    #[arg(long)]
    remove: Vec<String>,
    /// Mark nodes reachable from any other object instead.
    #[arg(long, conflicts_with = "remove")]
    remove_any: bool,
    /// Print the scene as facts instead of the graph.
    #[arg(long)]
    facts: bool,
    /// Join facts about one object without spaces.
    #[arg(long, requires = "facts")]
    compact: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct GraphReport {
    nodes: usize,
    frames: Vec<u32>,
    horizontal: Vec<(ObjectId, ObjectId, u32)>,
    vertical: usize,
    ancestor_pairs: usize,
    removed: Vec<ObjectId>,
    affected: Vec<(ObjectId, u32)>,
    sim: Vec<(ObjectId, u32)>,
}

pub fn resolve_all(selectors: &[String], objects: &[crcg_core::model::ObjectRecord]) -> Result<BTreeSet<ObjectId>, Failure> {
    selectors
        .iter()
        .map(|s| {
            let sel: Selector = s.parse().map_err(Failure::config)?;
            resolve_selector(&sel, objects)
                .with_context(|| format!("--remove {s}"))
                .map_err(Failure::Config)
        })
        .collect()
}

pub fn run(args: GraphArgs) -> CmdResult {
    let (scene, _) = load_scene(&args.scene)?;
    if args.facts {
        let style = if args.compact { FactStyle::Compact } else { FactStyle::Spaced };
        let program = FactProgram::from_scene(&scene, None).map_err(Failure::config)?;
        return crate::write_out(args.out.as_ref(), &program.emit_with(style));
    }
    let events = scene.normalized_events().map_err(Failure::config)?;
    let removed = resolve_all(&args.remove, &scene.objects)?;
    let d = DerivedRelations::compute(&scene.objects, &events, &removed, &removed, args.remove_any);
    let report = GraphReport {
        nodes: d.graph.node_count(),
        frames: d.graph.frames().to_vec(),
        horizontal: d.graph.horizontal_edges().to_vec(),
        vertical: d.graph.vertical_edges().len(),
        ancestor_pairs: d.ancestry.len(),
        removed: removed.iter().copied().collect(),
        affected: d.affected.iter().copied().collect(),
        sim: d.sim.iter().map(|(o, t)| (*o, *t)).collect(),
    };
    let text = match args.format {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        OutputFormat::Text => {
            let nodes = |ns: &[(ObjectId, u32)]| ns.iter().map(|(o, t)| format!("({o},{t})")).collect::<Vec<_>>().join(" ");
            let mut out = String::new();
            let _ = writeln!(out, "nodes      {}", report.nodes);
            let _ = writeln!(out, "frames     {:?}", report.frames);
            let _ = writeln!(
                out,
                "horizontal {}",
                report.horizontal.iter().map(|(a, b, t)| format!("{a}-{b}@{t}")).collect::<Vec<_>>().join(" ")
            );
            let _ = writeln!(out, "vertical   {}", report.vertical);
            let _ = writeln!(out, "ancestors  {}", report.ancestor_pairs);
            let _ = writeln!(out, "affected   {}", nodes(&report.affected));
            let _ = writeln!(out, "sim        {}", nodes(&report.sim));
            out
        }
    };
    crate::write_out(args.out.as_ref(), &text)
}

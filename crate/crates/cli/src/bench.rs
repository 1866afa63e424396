use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::Args;
use crcg_core::bench::{dump_trajectories, prepare_scene, score_scenes, trajectory_run, BenchReport, BenchScene};
use crcg_core::orchestrator::SimMode;

use crate::io::{bench_config, load_scene, load_sidecar, scene_name, sidecar_path};
use crate::{CmdResult, Failure, NoiseArgs, OutputFormat};

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 200)]
    scenes: usize,
    /// Ignored with `--scenes-dir`, which uses the seed recorded in the sidecars.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Score scenes written by `gen` instead of generating them; every scene
    /// needs its truth sidecar.
    #[arg(long)]
    scenes_dir: Option<PathBuf>,
    /// Write the report here; `.csv` selects CSV, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Leave fixpoint timings off stderr.
    #[arg(long)]
    no_timing: bool,
    /// Write trajectory SVG and CSV for the first scenes here.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long, default_value_t = 3, requires = "dump")]
    dump_count: usize,
}

fn load_dir(dir: &Path) -> Result<Vec<BenchScene>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::config(anyhow!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .filter(|p| !p.to_string_lossy().ends_with(".truth.json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Config(anyhow!("{}: no scene documents", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let (perceived, _) = load_scene(p)?;
            let side = sidecar_path(p);
            if !side.exists() {
                return Err(Failure::Scoring(anyhow!(
                    "cannot score {}: missing {}",
                    p.display(),
                    side.display()
                )));
            }
            Ok(BenchScene {
                perceived,
                truth: load_sidecar(&side)?,
            })
        })
        .collect()
}

pub fn run(args: BenchArgs) -> CmdResult {
    let (scenes, mut config) = match &args.scenes_dir {
        Some(dir) => {
            let scenes = load_dir(dir)?;
            // Simulator noise is keyed by the seed the scenes were generated with.
            let seed = scenes[0].truth.world.seed;
            if let Some(s) = scenes.iter().find(|s| s.truth.world.seed != seed) {
                return Err(Failure::Scoring(anyhow!(
                    "scene {} was generated with seed {}, others with {seed}",
                    s.truth.index,
                    s.truth.world.seed
                )));
            }
            let config = bench_config(scenes.len(), seed, &args.noise)?;
            (scenes, config)
        }
        None => {
            let config = bench_config(args.scenes, args.seed, &args.noise)?;
            let scenes = (0..args.scenes)
                .map(|i| prepare_scene(&config, i).map_err(Failure::scoring))
                .collect::<Result<Vec<_>, _>>()?;
            (scenes, config)
        }
    };
    config.scenes = scenes.len();
    let outcomes = score_scenes(&scenes, &config).map_err(Failure::scoring)?;
    let report = BenchReport::from_outcomes(&outcomes);

    if !args.no_timing {
        eprintln!(
            "fixpoint median {:.4} ms  max {:.4} ms",
            report.timing.fixpoint_median_ms, report.timing.fixpoint_max_ms
        );
    }
    if let Some(dir) = &args.dump {
        std::fs::create_dir_all(dir).map_err(|e| Failure::config(anyhow!("{}: {e}", dir.display())))?;
        for (i, scene) in scenes.iter().take(args.dump_count).enumerate() {
            let run = if scene.truth.questions.is_empty() {
                None
            } else {
                Some(trajectory_run(scene, &config, 0, SimMode::Full).map_err(Failure::scoring)?)
            };
            let (svg, csv) = dump_trajectories(&scene.perceived, run.as_ref());
            let name = scene_name(scene.truth.index.max(i));
            for (ext, text) in [("svg", svg), ("csv", csv)] {
                let path = dir.join(format!("{name}.{ext}"));
                std::fs::write(&path, text).map_err(|e| Failure::config(anyhow!("{}: {e}", path.display())))?;
            }
        }
    }

    let json = || serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Some(path) = &args.out {
        let text = if path.extension().is_some_and(|e| e == "csv") {
            report.to_csv()
        } else {
            json()
        };
        crate::write_out(Some(path), &text)?;
    }
    let text = match args.format {
        OutputFormat::Text => report.to_text(),
        OutputFormat::Json => json(),
    };
    crate::write_out(None, &text)
}

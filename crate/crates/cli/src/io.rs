use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use crcg_core::bench::{BenchConfig, TruthSidecar};
use crcg_core::facts::{parse_facts, FactQuestion};
use crcg_core::model::{Scene, Trace};
use crcg_core::world::NoiseConfig;

use crate::{Failure, NoiseArgs};

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Config)
}

/// A scene document (`.json`) or a fact program (`.lp`), with the question
/// a fact program may carry.
pub fn load_scene(path: &Path) -> Result<(Scene, Option<FactQuestion>), Failure> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "lp") {
        let program = parse_facts(&text)
            .with_context(|| path.display().to_string())
            .map_err(Failure::Config)?;
        let max_v = program.events.iter().map(|e| e.frame).max().map_or(0, |f| f + 1);
        let scene = Scene {
            objects: program.objects,
            max_v,
            traces: Trace::new(),
            events: program.events,
        };
        return Ok((scene, program.question));
    }
    let scene = Scene::from_json(&text)
        .with_context(|| path.display().to_string())
        .map_err(Failure::Config)?;
    Ok((scene, None))
}

pub fn sidecar_path(scene: &Path) -> PathBuf {
    let stem = scene.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    scene.with_file_name(format!("{stem}.truth.json"))
}

pub fn load_sidecar(path: &Path) -> Result<TruthSidecar, Failure> {
    let text = read(path)?;
    serde_json::from_str(&text)
        .with_context(|| path.display().to_string())
        .map_err(Failure::Config)
}

pub fn scene_name(index: usize) -> String {
    format!("scene-{index:04}")
}

pub fn noise(args: &NoiseArgs, seed: u64) -> Result<NoiseConfig, Failure> {
    let base = if args.exact {
        NoiseConfig::ZERO
    } else {
        crcg_core::bench::DEFAULT_NOISE
    };
    let config = NoiseConfig {
        sigma_p: args.sigma_p.unwrap_or(base.sigma_p),
        p_drop: args.p_drop.unwrap_or(base.p_drop),
        sigma_s: args.sigma_s.unwrap_or(base.sigma_s),
        seed,
    };
    config
        .validate()
        .map_err(|e| Failure::Config(anyhow!("noise settings: {e}")))?;
    Ok(config)
}

/// Bench settings for `scenes` scenes; exact noise also turns off smoothing
/// and velocity averaging.
pub fn bench_config(scenes: usize, seed: u64, args: &NoiseArgs) -> Result<BenchConfig, Failure> {
    let noise = noise(args, seed)?;
    let base = if args.exact {
        BenchConfig::zero_noise(scenes, seed)
    } else {
        BenchConfig {
            scenes,
            seed,
            ..BenchConfig::default()
        }
    };
    Ok(BenchConfig { noise, ..base })
}

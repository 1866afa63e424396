use std::path::PathBuf;

use clap::Args;
use crcg_core::bench::prepare_scene;

use crate::io::{bench_config, scene_name};
use crate::{CmdResult, Failure, NoiseArgs};

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 20)]
    scenes: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Directory for `scene-NNNN.json` and `scene-NNNN.truth.json`.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    noise: NoiseArgs,
}

pub fn run(args: GenArgs) -> CmdResult {
    let config = bench_config(args.scenes, args.seed, &args.noise)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Failure::config(anyhow::anyhow!("{}: {e}", args.out.display())))?;
    for i in 0..args.scenes {
        let scene = prepare_scene(&config, i).map_err(Failure::scoring)?;
        let name = scene_name(i);
        let write = |file: String, text: String| {
            let path = args.out.join(file);
            std::fs::write(&path, text).map_err(|e| Failure::config(anyhow::anyhow!("{}: {e}", path.display())))
        };
        write(format!("{name}.json"), scene.perceived.to_json() + "\n")?;
        let truth = serde_json::to_string_pretty(&scene.truth).expect("sidecar serializes");
        write(format!("{name}.truth.json"), truth + "\n")?;
    }
    println!("wrote {} scenes to {}", args.scenes, args.out.display());
    Ok(())
}

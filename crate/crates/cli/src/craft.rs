use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use crcg_core::facts::{FactProgram, FactStyle};
use crcg_craft::{parse_description, parse_question, CompletionCache, CraftCase, CraftSetting, ServiceClient, ServiceConfig};

use crate::io::read;
use crate::{CmdResult, Failure};

/// Text given inline, or `@path` to read it from a file.
fn text_arg(value: &str) -> Result<String, Failure> {
    match value.strip_prefix('@') {
        Some(path) => read(std::path::Path::new(path)),
        None => Ok(value.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Scene description, or `@file`.
    #[arg(long)]
    description: String,
    /// Question about the scene, or `@file`.
    #[arg(long)]
    question: Option<String>,
    /// Use the spaced fact layout.
    #[arg(long)]
    spaced: bool,
}

pub fn parse(args: ParseArgs) -> CmdResult {
    let scene = parse_description(&text_arg(&args.description)?).map_err(Failure::config)?;
    let query = match &args.question {
        Some(q) => Some(parse_question(text_arg(q)?.trim()).map_err(Failure::config)?.query()),
        None => None,
    };
    let program = FactProgram::from_scene(&scene, query.as_ref()).map_err(Failure::scoring)?;
    let style = if args.spaced { FactStyle::Spaced } else { FactStyle::Compact };
    let mut text = program.emit_with(style);
    if !text.ends_with('\n') {
        text.push('\n');
    }
    crate::write_out(None, &text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SettingArg {
    Baseline,
    Approx,
    Guided,
}

#[derive(Debug, Args)]
pub struct AnswerArgs {
    #[arg(long)]
    description: String,
    #[arg(long)]
    question: String,
    #[arg(long, value_enum, default_value_t = SettingArg::Guided)]
    setting: SettingArg,
    /// Directory of cached completions.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Answer from the cache alone; a miss is an error.
    #[arg(long, requires = "cache")]
    replay_only: bool,
    /// Model name; overrides the environment.
    #[arg(long)]
    model: Option<String>,
}

pub fn answer(args: AnswerArgs) -> CmdResult {
    let case = CraftCase::new(&text_arg(&args.description)?, text_arg(&args.question)?.trim()).map_err(Failure::config)?;
    let setting = match args.setting {
        SettingArg::Baseline => CraftSetting::Baseline,
        SettingArg::Approx => CraftSetting::Approx,
        SettingArg::Guided => CraftSetting::Guided,
    };
    let cache = args
        .cache
        .as_ref()
        .map(CompletionCache::open)
        .transpose()
        .map_err(Failure::config)?;
    let client = if args.replay_only {
        let model = args
            .model
            .clone()
            .ok_or_else(|| Failure::Config(anyhow!("--replay-only needs --model")))?;
        ServiceClient::replay_only(model, cache.expect("required by clap"))
    } else {
        let mut config = ServiceConfig::from_env().map_err(Failure::config)?;
        if let Some(m) = &args.model {
            config.model = m.clone();
        }
        ServiceClient::new(config, cache).map_err(Failure::config)?
    };
    let result = case.answer(setting, &client).map_err(Failure::scoring)?;
    let text = serde_json::to_string_pretty(&result).expect("answer serializes") + "\n";
    crate::write_out(None, &text)
}

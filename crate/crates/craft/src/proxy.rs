//! Completion-service client used as a stand-in simulator, with an on-disk
//! cache keyed by the hash of model and prompt.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use crcg_core::model::Prediction;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const URL_VAR: &str = "COMPLETION_API_URL";
pub const KEY_VAR: &str = "COMPLETION_API_KEY";
pub const MODEL_VAR: &str = "COMPLETION_MODEL";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("service returned status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response body: {0}")]
    Malformed(String),
    #[error("no cached completion for prompt {0} in replay-only mode")]
    CacheMiss(String),
    #[error("completion is neither yes nor no: `{0}`")]
    Ambiguous(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error("configuration: {0}")]
    Config(String),
}

impl CompletionError {
    /// Whether sending the same request again may succeed.
    pub fn is_retryable(&self) -> bool {
        match self {
            CompletionError::Transport(_) => true,
            CompletionError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
    pub attempts: u32,
    pub max_in_flight: usize,
}

impl ServiceConfig {
    pub fn new(url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            api_key: None,
            model: model.into(),
            timeout: Duration::from_secs(60),
            attempts: 3,
            max_in_flight: 4,
        }
    }

    /// Reads the endpoint, key and model from the environment. The key is
    /// optional; the url and model are not.
    pub fn from_env() -> Result<Self, CompletionError> {
        let var = |name: &str| std::env::var(name).ok().filter(|v| !v.is_empty());
        let url = var(URL_VAR).ok_or_else(|| CompletionError::Config(format!("{URL_VAR} is not set")))?;
        let model = var(MODEL_VAR).ok_or_else(|| CompletionError::Config(format!("{MODEL_VAR} is not set")))?;
        Ok(Self {
            api_key: var(KEY_VAR),
            ..Self::new(url, model)
        })
    }
}

pub fn cache_key(model: &str, prompt: &str) -> String {
    let mut h = Sha256::new();
    h.update(model.as_bytes());
    h.update([0u8]);
    h.update(prompt.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub model: String,
    pub prompt: String,
    pub completion: String,
}

/// One JSON file per prompt. Reads may run concurrently; writes go through a
/// temporary file and a rename, one at a time.
#[derive(Debug)]
pub struct CompletionCache {
    dir: PathBuf,
    writer: Mutex<()>,
}

impl CompletionCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, CompletionError> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir).map_err(|e| CompletionError::Cache(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir,
            writer: Mutex::new(()),
        })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, model: &str, prompt: &str) -> Result<Option<String>, CompletionError> {
        let path = self.path(&cache_key(model, prompt));
        let text = match std::fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(CompletionError::Cache(format!("{}: {e}", path.display()))),
        };
        let entry: CacheEntry =
            serde_json::from_str(&text).map_err(|e| CompletionError::Cache(format!("{}: {e}", path.display())))?;
        Ok((entry.model == model && entry.prompt == prompt).then_some(entry.completion))
    }

    pub fn put(&self, model: &str, prompt: &str, completion: &str) -> Result<(), CompletionError> {
        let entry = CacheEntry {
            model: model.to_string(),
            prompt: prompt.to_string(),
            completion: completion.to_string(),
        };
        let io = |e: std::io::Error| CompletionError::Cache(e.to_string());
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        let body = serde_json::to_vec_pretty(&entry).expect("entry serializes");
        tmp.write_all(&body).map_err(io)?;
        tmp.persist(self.path(&cache_key(model, prompt))).map_err(|e| io(e.error))?;
        Ok(())
    }
}

/// Anything that turns a prompt into a completion.
pub trait Completion: Sync {
    fn complete(&self, prompt: &str) -> Result<String, CompletionError>;
}

#[derive(Debug)]
pub struct ServiceClient {
    model: String,
    service: Option<(ServiceConfig, reqwest::blocking::Client)>,
    cache: Option<CompletionCache>,
    replay_only: bool,
    max_in_flight: usize,
    requests: AtomicUsize,
}

impl ServiceClient {
    pub fn new(config: ServiceConfig, cache: Option<CompletionCache>) -> Result<Self, CompletionError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| CompletionError::Config(e.to_string()))?;
        Ok(Self {
            model: config.model.clone(),
            max_in_flight: config.max_in_flight.max(1),
            service: Some((config, http)),
            cache,
            replay_only: false,
            requests: AtomicUsize::new(0),
        })
    }

    /// Serves completions from `cache` only; a miss is an error.
    pub fn replay_only(model: impl Into<String>, cache: CompletionCache) -> Self {
        Self {
            model: model.into(),
            service: None,
            cache: Some(cache),
            replay_only: true,
            max_in_flight: 4,
            requests: AtomicUsize::new(0),
        }
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    /// Requests actually sent to the service.
    pub fn requests_sent(&self) -> usize {
        self.requests.load(Ordering::Relaxed)
    }

    fn request(&self, prompt: &str) -> Result<String, CompletionError> {
        let (config, http) = self
            .service
            .as_ref()
            .ok_or_else(|| CompletionError::Config("no completion service configured".into()))?;
        let body = serde_json::json!({
            "model": config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        });
        let mut last = CompletionError::Transport("no attempt made".into());
        for _ in 0..config.attempts.max(1) {
            self.requests.fetch_add(1, Ordering::Relaxed);
            let mut req = http.post(&config.url).json(&body);
            if let Some(key) = &config.api_key {
                req = req.bearer_auth(key);
            }
            let result = req
                .send()
                .map_err(|e| CompletionError::Transport(e.to_string()))
                .and_then(|resp| {
                    let status = resp.status();
                    let text = resp.text().map_err(|e| CompletionError::Transport(e.to_string()))?;
                    if !status.is_success() {
                        return Err(CompletionError::Status {
                            status: status.as_u16(),
                            body: text,
                        });
                    }
                    completion_text(&text)
                });
            match result {
                Err(e) if e.is_retryable() => last = e,
                other => return other,
            }
        }
        Err(last)
    }

    /// Completions for every prompt, in order, with at most
    /// `max_in_flight` requests outstanding.
    pub fn complete_all(&self, prompts: &[String]) -> Vec<Result<String, CompletionError>> {
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<String, CompletionError>>>> =
            prompts.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..self.max_in_flight.min(prompts.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(prompt) = prompts.get(i) else { break };
                    *slots[i].lock().expect("slot lock") = Some(self.complete(prompt));
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.into_inner().expect("slot lock").expect("every slot is filled"))
            .collect()
    }
}

impl Completion for ServiceClient {
    fn complete(&self, prompt: &str) -> Result<String, CompletionError> {
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.get(&self.model, prompt)? {
                return Ok(hit);
            }
        }
        if self.replay_only {
            return Err(CompletionError::CacheMiss(cache_key(&self.model, prompt)));
        }
        let completion = self.request(prompt)?;
        if let Some(cache) = &self.cache {
            cache.put(&self.model, prompt, &completion)?;
        }
        Ok(completion)
    }
}

/// Text of the first choice of a chat or plain completion response.
fn completion_text(body: &str) -> Result<String, CompletionError> {
    let value: serde_json::Value = serde_json::from_str(body).map_err(|_| CompletionError::Malformed(body.into()))?;
    let choice = &value["choices"][0];
    choice["message"]["content"]
        .as_str()
        .or_else(|| choice["text"].as_str())
        .map(str::to_string)
        .ok_or_else(|| CompletionError::Malformed(body.into()))
}

fn leading_word(completion: &str) -> String {
    completion
        .trim_start_matches(|c: char| c.is_whitespace() || c.is_ascii_punctuation())
        .chars()
        .take_while(|c| c.is_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

/// Leading "yes" or "no", ignoring case, surrounding whitespace and
/// punctuation.
pub fn parse_yes_no(completion: &str) -> Result<Prediction, CompletionError> {
    match leading_word(completion).as_str() {
        "yes" => Ok(Prediction::Yes),
        "no" => Ok(Prediction::No),
        _ => Err(CompletionError::Ambiguous(completion.to_string())),
    }
}

/// Leading count, as digits or a small number word.
pub fn parse_count(completion: &str) -> Result<u32, CompletionError> {
    const WORDS: [&str; 11] = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"];
    let word = leading_word(completion);
    word.parse()
        .ok()
        .or_else(|| WORDS.iter().position(|w| *w == word).map(|n| n as u32))
        .ok_or_else(|| CompletionError::Ambiguous(completion.to_string()))
}

/// Asks the service and reads a yes/no answer from the completion.
pub fn proxy_simulate(client: &dyn Completion, prompt: &str) -> Result<Prediction, CompletionError> {
    parse_yes_no(&client.complete(prompt)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yes_no_prefixes() {
        assert_eq!(parse_yes_no("No"), Ok(Prediction::No));
        assert_eq!(parse_yes_no("Yes, it will."), Ok(Prediction::Yes));
        assert_eq!(parse_yes_no("  \"yes\""), Ok(Prediction::Yes));
        assert!(matches!(parse_yes_no("Maybe"), Err(CompletionError::Ambiguous(_))));
        assert!(matches!(parse_yes_no("Yesterday"), Err(CompletionError::Ambiguous(_))));
        assert!(matches!(parse_yes_no(""), Err(CompletionError::Ambiguous(_))));
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("2"), Ok(2));
        assert_eq!(parse_count("Three objects."), Ok(3));
        assert!(parse_count("several").is_err());
    }

    #[test]
    fn keys_depend_on_model_and_prompt() {
        assert_eq!(cache_key("m", "p"), cache_key("m", "p"));
        assert_ne!(cache_key("m", "p"), cache_key("n", "p"));
        assert_ne!(cache_key("mp", ""), cache_key("m", "p"));
        assert_eq!(cache_key("m", "p").len(), 64);
    }

    #[test]
    fn retry_policy() {
        assert!(CompletionError::Transport("x".into()).is_retryable());
        assert!(CompletionError::Status { status: 503, body: String::new() }.is_retryable());
        assert!(!CompletionError::Status { status: 401, body: String::new() }.is_retryable());
        assert!(!CompletionError::Ambiguous("x".into()).is_retryable());
    }
}

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use crcg_core::model::{Answer, Prediction};
use crcg_craft::proxy::{proxy_simulate, CompletionError};
use crcg_craft::{Completion, CompletionCache, CraftCase, CraftSetting, ServiceClient, ServiceConfig};

struct Recorded {
    bodies: Vec<serde_json::Value>,
    auth: Vec<Option<String>>,
}

/// Serves chat-completion responses; `reply` maps the prompt to a status
/// and completion text.
fn serve(reply: fn(&str) -> (u16, String)) -> (String, Arc<Mutex<Recorded>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let log = Arc::new(Mutex::new(Recorded {
        bodies: Vec::new(),
        auth: Vec::new(),
    }));
    let sink = Arc::clone(&log);
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let sink = Arc::clone(&sink);
            std::thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let (mut length, mut auth) = (0usize, None);
                loop {
                    let mut line = String::new();
                    if reader.read_line(&mut line).unwrap() == 0 || line == "\r\n" {
                        break;
                    }
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        length = v.trim().parse().unwrap();
                    }
                    if lower.starts_with("authorization:") {
                        auth = Some(line["authorization:".len()..].trim().to_string());
                    }
                }
                let mut body = vec![0; length];
                reader.read_exact(&mut body).unwrap();
                let json: serde_json::Value = serde_json::from_slice(&body).unwrap();
                let prompt = json["messages"][0]["content"].as_str().unwrap_or_default().to_string();
                {
                    let mut log = sink.lock().unwrap();
                    log.bodies.push(json);
                    log.auth.push(auth);
                }
                let (status, text) = reply(&prompt);
                let payload = serde_json::json!({"choices": [{"message": {"role": "assistant", "content": text}}]}).to_string();
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{payload}",
                    payload.len()
                );
            });
        }
    });
    (url, log)
}

fn config(url: &str) -> ServiceConfig {
    ServiceConfig {
        api_key: Some("secret".into()),
        timeout: Duration::from_secs(10),
        ..ServiceConfig::new(url, "test-model")
    }
}

#[test]
fn request_shape_and_answer_parsing() {
    let (url, log) = serve(|p| (200, if p.contains("purple") { "Yes, it will.".into() } else { "No".into() }));
    let client = ServiceClient::new(config(&url), None).unwrap();
    assert_eq!(proxy_simulate(&client, "is purple there?").unwrap(), Prediction::Yes);
    assert_eq!(proxy_simulate(&client, "is red there?").unwrap(), Prediction::No);
    let log = log.lock().unwrap();
    assert_eq!(log.bodies[0]["temperature"], 0);
    assert_eq!(log.bodies[0]["model"], "test-model");
    assert_eq!(log.auth[0].as_deref(), Some("Bearer secret"));
}

#[test]
fn cache_serves_repeats_and_replays_offline() {
    let dir = tempfile::tempdir().unwrap();
    let (url, log) = serve(|_| (200, "No".into()));
    let client = ServiceClient::new(config(&url), Some(CompletionCache::open(dir.path()).unwrap())).unwrap();
    let prompts: Vec<String> = (0..6).map(|i| format!("prompt {i}")).collect();
    let first: Vec<String> = client.complete_all(&prompts).into_iter().map(Result::unwrap).collect();
    let again: Vec<String> = client.complete_all(&prompts).into_iter().map(Result::unwrap).collect();
    assert_eq!(first, again);
    assert_eq!(client.requests_sent(), 6);
    assert_eq!(log.lock().unwrap().bodies.len(), 6);

    let offline = ServiceClient::replay_only("test-model", CompletionCache::open(dir.path()).unwrap());
    let replayed: Vec<String> = offline.complete_all(&prompts).into_iter().map(Result::unwrap).collect();
    assert_eq!(replayed, first);
    assert!(matches!(offline.complete("never asked"), Err(CompletionError::CacheMiss(_))));
    let other_model = ServiceClient::replay_only("other-model", CompletionCache::open(dir.path()).unwrap());
    assert!(matches!(other_model.complete("prompt 0"), Err(CompletionError::CacheMiss(_))));
}

#[test]
fn server_errors_are_retried_and_auth_errors_are_not() {
    let (url, log) = serve(|p| if p == "deny" { (401, "no".into()) } else { (503, "busy".into()) });
    let client = ServiceClient::new(config(&url), None).unwrap();
    let err = client.complete("flaky").unwrap_err();
    assert!(matches!(err, CompletionError::Status { status: 503, .. }));
    assert_eq!(log.lock().unwrap().bodies.len(), 3);
    let err = client.complete("deny").unwrap_err();
    assert!(matches!(err, CompletionError::Status { status: 401, .. }));
    assert_eq!(log.lock().unwrap().bodies.len(), 4);
}

#[test]
fn unreachable_service_is_a_retryable_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let client = ServiceClient::new(
        ServiceConfig {
            attempts: 1,
            ..config(&format!("http://127.0.0.1:{port}/"))
        },
        None,
    )
    .unwrap();
    let err = client.complete("x").unwrap_err();
    assert!(err.is_retryable(), "{err}");
}

const DESCRIPTION: &str = "Start. Large cyan circle collides with small yellow circle. Small purple triangle enters basket. Large cyan circle collides with small yellow circle. Small purple triangle collides with basket. End.";

#[test]
fn settings_choose_between_service_and_graph() {
    // The service always says no, as the baseline did on this example.
    let (url, log) = serve(|_| (200, "No".into()));
    let client = ServiceClient::new(config(&url), None).unwrap();
    let case = CraftCase::new(
        DESCRIPTION,
        "Will the tiny purple triangle end up in the basket if the large cyan circle is removed?",
    )
    .unwrap();
    let baseline = case.answer(CraftSetting::Baseline, &client).unwrap();
    assert_eq!(baseline.answer, Answer::No);
    let approx = case.answer(CraftSetting::Approx, &client).unwrap();
    assert_eq!((approx.answer, approx.prompt), (Answer::Yes, None));
    let guided = case.answer(CraftSetting::Guided, &client).unwrap();
    assert!(guided.prompt.unwrap().contains("According to the scene description, did"));
    assert_eq!(log.lock().unwrap().bodies.len(), 2);
}

#[test]
fn ambiguous_completions_are_reported() {
    let (url, _) = serve(|_| (200, "It depends.".into()));
    let client = ServiceClient::new(config(&url), None).unwrap();
    assert!(matches!(proxy_simulate(&client, "q"), Err(CompletionError::Ambiguous(_))));
}

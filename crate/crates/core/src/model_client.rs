//! Client for a chart-extraction model endpoint: raster image in, spec out.
//!
//! Live mode sends one multipart POST with an `image` part and a `prompt`
//! part, and reads a spec document from the response body. Fixture mode
//! replays `<sha256-of-image>.response.json` from a directory.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::sha256_hex;
use crate::ingest::{parse_spec, SpecParseError};
use crate::model::ChartSpec;

pub const PROMPT_VERSION: &str = "extract-v1";

pub const PROMPT: &str = "\
You are given a raster image of an x-y chart (line, bar, scatter or error-bar).
Return only a JSON document with these fields:
  chart_type: one of \"line\", \"bar\", \"scatter\", \"error_bar\"
  title: the chart title
  x_axis, y_axis: {\"title\", \"encoding\" (int, float, fraction, datetime or text),
    \"domain\": {\"lo\", \"hi\"} or {\"categories\": [...]}}
  legend_title: present only when there is more than one series
  series: [{\"name\", \"points\": [[x, y], ...], \"y_err\": [...] for error bars}]
Dates are written YYYY-MM-DD. Category x values are written as the category name.
Do not add commentary or fields beyond these.";

pub const AUTH_TOKEN_ENV: &str = "TACTOGRAPH_ENDPOINT_TOKEN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Live,
    Fixture(PathBuf),
}

#[derive(Clone, PartialEq)]
pub struct EndpointConfig {
    pub base_url: String,
    pub timeout_s: f64,
    pub auth_token: Option<String>,
    pub mode: Mode,
}

impl std::fmt::Debug for EndpointConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EndpointConfig")
            .field("base_url", &self.base_url)
            .field("timeout_s", &self.timeout_s)
            .field("auth_token", &self.auth_token.as_ref().map(|_| "<redacted>"))
            .field("mode", &self.mode)
            .finish()
    }
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "http://127.0.0.1:8080/extract".into(),
            timeout_s: 60.0,
            auth_token: None,
            mode: Mode::Live,
        }
    }
}

impl EndpointConfig {
    pub fn fixture(dir: impl Into<PathBuf>) -> Self {
        Self {
            mode: Mode::Fixture(dir.into()),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ExtractError> {
        if !(self.timeout_s.is_finite() && self.timeout_s > 0.0) {
            return Err(ExtractError::Config(format!("timeout must be positive, got {}", self.timeout_s)));
        }
        match &self.mode {
            Mode::Fixture(dir) => {
                if fs::read_dir(dir).is_err() {
                    return Err(ExtractError::Config(format!(
                        "fixture directory {} is not readable",
                        dir.display()
                    )));
                }
            }
            Mode::Live => {
                if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
                    return Err(ExtractError::Config(format!("not an http(s) URL: {}", self.base_url)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    pub spec: ChartSpec,
    pub raw_response: String,
    pub prompt_version: &'static str,
}

/// Sidecar written next to a recorded response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureMeta {
    pub image_sha256: String,
    pub media_type: String,
    pub prompt_version: String,
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("empty image")]
    EmptyImage,
    #[error("endpoint config: {0}")]
    Config(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("timed out after {0} s")]
    Timeout(f64),
    #[error("endpoint answered {status}")]
    Status { status: u16, body: String },
    #[error("response is not a valid spec: {source}")]
    Parse {
        source: SpecParseError,
        raw_response: String,
    },
    #[error("no recorded response for image {hash} in {}", dir.display())]
    FixtureMissing { hash: String, dir: PathBuf },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl ExtractError {
    pub fn raw_response(&self) -> Option<&str> {
        match self {
            ExtractError::Parse { raw_response, .. } => Some(raw_response),
            ExtractError::Status { body, .. } => Some(body),
            _ => None,
        }
    }
}

pub fn fixture_paths(dir: &Path, image: &[u8]) -> (PathBuf, PathBuf) {
    let hash = sha256_hex(image);
    (
        dir.join(format!("{hash}.response.json")),
        dir.join(format!("{hash}.meta.json")),
    )
}

/// Stores `raw_response` as the recorded answer for `image`.
pub fn record_fixture(dir: &Path, image: &[u8], media_type: &str, raw_response: &str) -> Result<(), ExtractError> {
    let (resp, meta) = fixture_paths(dir, image);
    let sidecar = FixtureMeta {
        image_sha256: sha256_hex(image),
        media_type: media_type.to_string(),
        prompt_version: PROMPT_VERSION.to_string(),
    };
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExtractError::Io { path, source }
    };
    fs::write(&resp, raw_response).map_err(io(&resp))?;
    let mut json = serde_json::to_string_pretty(&sidecar).expect("meta serializes");
    json.push('\n');
    fs::write(&meta, json).map_err(io(&meta))?;
    Ok(())
}

fn parse_response(raw_response: String) -> Result<ExtractionResult, ExtractError> {
    match parse_spec(raw_response.as_bytes()) {
        Ok(spec) => Ok(ExtractionResult {
            spec,
            raw_response,
            prompt_version: PROMPT_VERSION,
        }),
        Err(source) => Err(ExtractError::Parse { source, raw_response }),
    }
}

pub fn extract_metadata(image: &[u8], media_type: &str, cfg: &EndpointConfig) -> Result<ExtractionResult, ExtractError> {
    if image.is_empty() {
        return Err(ExtractError::EmptyImage);
    }
    cfg.validate()?;
    let result = match &cfg.mode {
        Mode::Fixture(dir) => {
            let (path, _) = fixture_paths(dir, image);
            let raw = match fs::read(&path) {
                Ok(b) => String::from_utf8_lossy(&b).into_owned(),
                Err(e) if e.kind() == io::ErrorKind::NotFound => {
                    return Err(ExtractError::FixtureMissing {
                        hash: sha256_hex(image),
                        dir: dir.clone(),
                    })
                }
                Err(source) => return Err(ExtractError::Io { path, source }),
            };
            parse_response(raw)
        }
        Mode::Live => live(image, media_type, cfg),
    };
    if let Ok(r) = &result {
        log::info!(
            "extracted {} chart with {} series (prompt {})",
            r.spec.chart_type(),
            r.spec.series().len(),
            r.prompt_version
        );
    }
    result
}

fn live(image: &[u8], media_type: &str, cfg: &EndpointConfig) -> Result<ExtractionResult, ExtractError> {
    use reqwest::blocking::{multipart, Client};

    let transport = |e: reqwest::Error| {
        if e.is_timeout() {
            ExtractError::Timeout(cfg.timeout_s)
        } else {
            ExtractError::Transport(e.to_string())
        }
    };
    let client = Client::builder()
        .timeout(Duration::from_secs_f64(cfg.timeout_s))
        .build()
        .map_err(transport)?;
    let image_part = multipart::Part::bytes(image.to_vec())
        .file_name("chart")
        .mime_str(media_type)
        .map_err(|e| ExtractError::Config(format!("media type `{media_type}`: {e}")))?;
    let form = multipart::Form::new()
        .part("image", image_part)
        .text("prompt", PROMPT);
    let mut req = client
        .post(&cfg.base_url)
        .header("X-Prompt-Version", PROMPT_VERSION)
        .multipart(form);
    if let Some(token) = &cfg.auth_token {
        req = req.bearer_auth(token);
    }
    let resp = req.send().map_err(transport)?;
    let status = resp.status();
    let body = resp.text().map_err(transport)?;
    if !status.is_success() {
        return Err(ExtractError::Status {
            status: status.as_u16(),
            body,
        });
    }
    parse_response(body)
}

/// Media type from a file extension, defaulting to PNG.
pub fn media_type_for(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("gif") => "image/gif",
        Some("webp") => "image/webp",
        Some("bmp") => "image/bmp",
        Some("svg") => "image/svg+xml",
        _ => "image/png",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::thread;

    const SPEC: &str = r#"{"chart_type":"line","title":"t","x_axis":{"title":"x","encoding":"int","domain":{"lo":0,"hi":2}},"y_axis":{"title":"y","encoding":"float","domain":{"lo":0,"hi":1}},"series":[{"name":"a","points":[[0,0.5],[2,1]]}]}"#;

    /// One-shot HTTP server; returns its URL and the captured request.
    fn serve(status: &'static str, body: &'static str, delay_ms: u64) -> (String, thread::JoinHandle<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/extract", listener.local_addr().unwrap());
        let handle = thread::spawn(move || {
            let (mut s, _) = listener.accept().unwrap();
            s.set_read_timeout(Some(Duration::from_millis(500))).unwrap();
            let mut req = Vec::new();
            let mut buf = [0u8; 4096];
            while let Ok(n) = s.read(&mut buf) {
                if n == 0 {
                    break;
                }
                req.extend_from_slice(&buf[..n]);
                let text = String::from_utf8_lossy(&req);
                if let Some((head, rest)) = text.split_once("\r\n\r\n") {
                    let len = head
                        .lines()
                        .find_map(|l| l.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse::<usize>().unwrap()))
                        .unwrap_or(0);
                    if rest.len() >= len {
                        break;
                    }
                }
            }
            thread::sleep(Duration::from_millis(delay_ms));
            let _ = write!(s, "HTTP/1.1 {status}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len());
            String::from_utf8_lossy(&req).into_owned()
        });
        (url, handle)
    }

    fn live_cfg(url: String) -> EndpointConfig {
        EndpointConfig {
            base_url: url,
            timeout_s: 5.0,
            auth_token: Some("secret".into()),
            mode: Mode::Live,
        }
    }

    #[test]
    fn live_posts_multipart_and_parses() {
        let (url, h) = serve("200 OK", SPEC, 0);
        let r = extract_metadata(b"PNGDATA", "image/png", &live_cfg(url)).unwrap();
        assert_eq!(r.spec.series()[0].points.len(), 2);
        assert_eq!(r.raw_response, SPEC);
        let req = h.join().unwrap();
        assert!(req.starts_with("POST /extract"));
        assert!(req.contains("name=\"image\""));
        assert!(req.contains("name=\"prompt\""));
        assert!(req.contains("PNGDATA"));
        assert!(req.to_ascii_lowercase().contains("authorization: bearer secret"));
    }

    #[test]
    fn malformed_body_keeps_raw_response() {
        let (url, _h) = serve("200 OK", "{\"chart_type\": \"pie\"}", 0);
        let e = extract_metadata(b"x", "image/png", &live_cfg(url)).unwrap_err();
        assert!(matches!(e, ExtractError::Parse { .. }));
        assert_eq!(e.raw_response(), Some("{\"chart_type\": \"pie\"}"));
    }

    #[test]
    fn error_status() {
        let (url, _h) = serve("503 Service Unavailable", "busy", 0);
        let e = extract_metadata(b"x", "image/png", &live_cfg(url)).unwrap_err();
        assert!(matches!(e, ExtractError::Status { status: 503, .. }), "{e:?}");
    }

    #[test]
    fn slow_endpoint_times_out() {
        let (url, _h) = serve("200 OK", SPEC, 1500);
        let mut cfg = live_cfg(url);
        cfg.timeout_s = 0.3;
        let e = extract_metadata(b"x", "image/png", &cfg).unwrap_err();
        assert!(matches!(e, ExtractError::Timeout(_)), "{e:?}");
    }

    #[test]
    fn unreachable_endpoint_is_transport_error() {
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let e = extract_metadata(b"x", "image/png", &live_cfg(format!("http://127.0.0.1:{port}/"))).unwrap_err();
        assert!(matches!(e, ExtractError::Transport(_)), "{e:?}");
    }

    #[test]
    fn fixture_replay_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        record_fixture(dir.path(), b"img", "image/png", SPEC).unwrap();
        let cfg = EndpointConfig::fixture(dir.path());
        let a = extract_metadata(b"img", "image/png", &cfg).unwrap();
        let b = extract_metadata(b"img", "image/png", &cfg).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            extract_metadata(b"other", "image/png", &cfg),
            Err(ExtractError::FixtureMissing { .. })
        ));
        assert!(matches!(extract_metadata(b"", "image/png", &cfg), Err(ExtractError::EmptyImage)));
    }

    #[test]
    fn config_checks() {
        assert!(EndpointConfig::fixture("/nonexistent/dir").validate().is_err());
        let cfg = EndpointConfig {
            timeout_s: 0.0,
            ..EndpointConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert!(!format!("{:?}", live_cfg("http://x".into())).contains("secret"));
    }
}

//! Encyclopedia extracts with an on-disk cache.
//!
//! A query asks a MediaWiki-style API for the plain-text intro of the page
//! titled after a structure. Answers are cached per (language, normalized
//! name) as one text file:
//!
//! ```text
//! hit <url>
//! <extract>
//! ```
//!
//! or the single line `miss`. Transport errors are never cached. In
//! offline mode only the cache is consulted.
//!
//! Endpoint templates carry `{lang}` and `{title}` placeholders. A
//! `file://` template reads recorded responses from disk instead of the
//! network.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use molecumentary_core::foraging::{DescriptionProvider, ProviderOutcome};
use molecumentary_core::graph::{Description, TypeNode};
use molecumentary_core::text::normalize_name;
use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde_json::Value;

pub const DEFAULT_ENDPOINT: &str = "https://{lang}.wikipedia.org/w/api.php?action=query&prop=extracts&exintro=1&explaintext=1&redirects=1&format=json&titles={title}";
/// Article link recorded with each hit, `{lang}` and `{title}` filled in.
pub const DEFAULT_PAGE_URL: &str = "https://{lang}.wikipedia.org/wiki/{title}";
pub const ENDPOINT_ENV: &str = "MOLECUMENTARY_ENDPOINT";
pub const CACHE_DIR_ENV: &str = "MOLECUMENTARY_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".molecumentary-cache";
pub const REPOSITORY: &str = "wikipedia";
pub const DEFAULT_JOBS: usize = 4;

const TITLE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.');

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    pub endpoint_template: String,
    pub page_url_template: String,
    pub language: String,
    pub timeout: Duration,
    pub cache_dir: PathBuf,
    pub offline: bool,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            endpoint_template: DEFAULT_ENDPOINT.into(),
            page_url_template: DEFAULT_PAGE_URL.into(),
            language: "en".into(),
            timeout: Duration::from_secs(10),
            cache_dir: PathBuf::from(DEFAULT_CACHE_DIR),
            offline: false,
        }
    }
}

impl RemoteConfig {
    /// Defaults with the endpoint and cache directory taken from the
    /// environment when set.
    pub fn from_env() -> Self {
        let mut config = RemoteConfig::default();
        if let Ok(endpoint) = std::env::var(ENDPOINT_ENV) {
            if !endpoint.trim().is_empty() {
                config.endpoint_template = endpoint;
            }
        }
        if let Ok(dir) = std::env::var(CACHE_DIR_ENV) {
            if !dir.trim().is_empty() {
                config.cache_dir = PathBuf::from(dir);
            }
        }
        config
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.timeout.is_zero() {
            return Err("timeout must be positive".into());
        }
        if self.language.trim().is_empty() {
            return Err("language must not be blank".into());
        }
        if !self.endpoint_template.contains("{title}") {
            return Err("endpoint template lacks a {title} placeholder".into());
        }
        Ok(())
    }

    /// Request URL for a page title.
    pub fn url_for(&self, title: &str) -> String {
        self.endpoint_template
            .replace("{lang}", &self.language)
            .replace("{title}", &utf8_percent_encode(title, TITLE).to_string())
    }

    /// Article link for a page title, spaces as underscores.
    pub fn page_url(&self, title: &str) -> String {
        let title = title.replace(' ', "_");
        self.page_url_template
            .replace("{lang}", &self.language)
            .replace("{title}", &utf8_percent_encode(&title, TITLE).to_string())
    }

    fn cache_path(&self, name: &str) -> PathBuf {
        let key = utf8_percent_encode(&normalize_name(name), TITLE).to_string();
        self.cache_dir.join(&self.language).join(format!("{key}.txt"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchResult {
    Hit { text: String, url: String },
    Miss,
    TransportError(String),
}

/// Fetches a response body.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str, timeout: Duration) -> Result<String, String>;
}

/// Blocking HTTP.
#[derive(Debug, Default)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn get(&self, url: &str, timeout: Duration) -> Result<String, String> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .user_agent(concat!("molecumentary/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        let mut response = agent.get(url).call().map_err(|e| e.to_string())?;
        response.body_mut().read_to_string().map_err(|e| e.to_string())
    }
}

/// Reads `file://` URLs. A missing file is a transport error.
#[derive(Debug, Default)]
pub struct FileTransport;

impl Transport for FileTransport {
    fn get(&self, url: &str, _timeout: Duration) -> Result<String, String> {
        let path = url
            .strip_prefix("file://")
            .ok_or_else(|| format!("not a file URL: {url}"))?;
        let path = percent_decode_str(path).decode_utf8_lossy().into_owned();
        fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))
    }
}

/// Picks the transport matching the endpoint scheme.
pub fn transport_for(config: &RemoteConfig) -> Box<dyn Transport> {
    if config.endpoint_template.starts_with("file://") {
        Box::new(FileTransport)
    } else {
        Box::new(HttpTransport)
    }
}

/// Client with cache. Shareable across threads.
pub struct RemoteClient {
    config: RemoteConfig,
    transport: Box<dyn Transport>,
    requests: AtomicUsize,
}

impl std::fmt::Debug for RemoteClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteClient")
            .field("config", &self.config)
            .field("requests", &self.requests)
            .finish()
    }
}

impl RemoteClient {
    pub fn new(config: RemoteConfig) -> Self {
        let transport = transport_for(&config);
        RemoteClient::with_transport(config, transport)
    }

    pub fn with_transport(config: RemoteConfig, transport: Box<dyn Transport>) -> Self {
        RemoteClient {
            config,
            transport,
            requests: AtomicUsize::new(0),
        }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    /// Requests handed to the transport so far.
    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    /// Cache first, then (unless offline) the transport.
    pub fn fetch(&self, name: &str) -> FetchResult {
        let name = name.trim();
        if name.is_empty() {
            return FetchResult::Miss;
        }
        let path = self.config.cache_path(name);
        match read_cache(&path) {
            Ok(Some(cached)) => return cached,
            Ok(None) => {}
            Err(e) => log::warn!("unreadable cache entry {}: {e}", path.display()),
        }
        if self.config.offline {
            return FetchResult::Miss;
        }

        let url = self.config.url_for(name);
        self.requests.fetch_add(1, Ordering::SeqCst);
        let result = match self.transport.get(&url, self.config.timeout) {
            Ok(body) => match parse_extract(&body) {
                Ok(Some(extract)) => FetchResult::Hit {
                    url: self.config.page_url(extract.title.as_deref().unwrap_or(name)),
                    text: extract.text,
                },
                Ok(None) => FetchResult::Miss,
                Err(e) => FetchResult::TransportError(e),
            },
            Err(e) => FetchResult::TransportError(e),
        };
        if !matches!(result, FetchResult::TransportError(_)) {
            if let Err(e) = write_cache(&path, &result) {
                log::warn!("could not cache {}: {e}", path.display());
            }
        }
        result
    }

    /// Fetches every name with up to `jobs` requests in flight. The map
    /// does not depend on completion order.
    pub fn prefetch<'n>(&self, names: impl IntoIterator<Item = &'n str>, jobs: usize) -> BTreeMap<String, FetchResult> {
        let mut names: Vec<&str> = names.into_iter().collect();
        names.sort_unstable();
        names.dedup();
        let next = AtomicUsize::new(0);
        let results = Mutex::new(BTreeMap::new());
        std::thread::scope(|scope| {
            for _ in 0..jobs.clamp(1, names.len().max(1)) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(name) = names.get(i) else { break };
                    let result = self.fetch(name);
                    results
                        .lock()
                        .expect("no worker panics")
                        .insert(name.to_string(), result);
                });
            }
        });
        results.into_inner().expect("no worker panics")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extract {
    /// Page title after redirects.
    pub title: Option<String>,
    pub text: String,
}

/// First page with a non-blank extract; `None` when the page is missing or
/// empty.
pub fn parse_extract(body: &str) -> Result<Option<Extract>, String> {
    let value: Value = serde_json::from_str(body).map_err(|e| format!("malformed response: {e}"))?;
    let pages = value
        .get("query")
        .and_then(|q| q.get("pages"))
        .ok_or_else(|| "response has no query.pages".to_string())?;
    let pages: Vec<&Value> = match pages {
        Value::Object(map) => map.values().collect(),
        Value::Array(list) => list.iter().collect(),
        _ => return Err("query.pages is neither an object nor an array".into()),
    };
    Ok(pages
        .into_iter()
        .filter(|p| p.get("missing").is_none() && p.get("invalid").is_none())
        .filter_map(|p| {
            let text = p.get("extract").and_then(Value::as_str)?.trim();
            (!text.is_empty()).then(|| Extract {
                title: p.get("title").and_then(Value::as_str).map(String::from),
                text: text.into(),
            })
        })
        .next())
}

fn read_cache(path: &Path) -> io::Result<Option<FetchResult>> {
    let content = match fs::read_to_string(path) {
        Ok(c) => c,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e),
    };
    let (head, body) = content.split_once('\n').unwrap_or((&content, ""));
    if head == "miss" {
        return Ok(Some(FetchResult::Miss));
    }
    match head.strip_prefix("hit ") {
        Some(url) if !body.trim().is_empty() => Ok(Some(FetchResult::Hit {
            text: body.to_string(),
            url: url.to_string(),
        })),
        _ => Err(io::Error::new(io::ErrorKind::InvalidData, "bad cache header")),
    }
}

fn write_cache(path: &Path, result: &FetchResult) -> io::Result<()> {
    let content = match result {
        FetchResult::Hit { text, url } => format!("hit {url}\n{text}"),
        FetchResult::Miss => "miss\n".to_string(),
        FetchResult::TransportError(_) => return Ok(()),
    };
    let dir = path.parent().expect("cache path has a directory");
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Serves prefetched results to foraging, keyed by node display name.
#[derive(Debug, Clone, Default)]
pub struct PrefetchedProvider {
    pub results: BTreeMap<String, FetchResult>,
    pub language: String,
}

impl DescriptionProvider for PrefetchedProvider {
    fn name(&self) -> &str {
        REPOSITORY
    }

    fn describe(&self, node: &TypeNode) -> ProviderOutcome {
        match self.results.get(node.name()) {
            Some(FetchResult::Hit { text, url }) => match Description::remote(text, REPOSITORY, url, &self.language) {
                Some(d) => ProviderOutcome::Hit(d),
                None => ProviderOutcome::Miss,
            },
            Some(FetchResult::TransportError(e)) => ProviderOutcome::Failed(e.clone()),
            Some(FetchResult::Miss) | None => ProviderOutcome::Miss,
        }
    }
}

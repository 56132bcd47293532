#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use molecumentary::remote::{FileTransport, RemoteConfig, Transport};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn fixture_endpoint() -> String {
    format!("file://{}/remote/{{lang}}/{{title}}.json", fixtures().display())
}

pub fn fixture_config(cache: &Path) -> RemoteConfig {
    RemoteConfig {
        endpoint_template: fixture_endpoint(),
        cache_dir: cache.to_path_buf(),
        ..Default::default()
    }
}

/// Recorded responses from the fixture directory, counting requests.
#[derive(Debug, Clone, Default)]
pub struct Recorded {
    pub calls: Arc<AtomicUsize>,
}

impl Recorded {
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Transport for Recorded {
    fn get(&self, url: &str, timeout: Duration) -> Result<String, String> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        FileTransport.get(url, timeout)
    }
}

/// Fails the test on any request.
#[derive(Debug, Default)]
pub struct NoNetwork;

impl Transport for NoNetwork {
    fn get(&self, url: &str, _timeout: Duration) -> Result<String, String> {
        panic!("network access in offline mode: {url}");
    }
}

pub fn cli(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_molecumentary"));
    cmd.args(args)
        .env_remove("MOLECUMENTARY_ENDPOINT")
        .env_remove("MOLECUMENTARY_CACHE_DIR")
        .env_remove("RUST_LOG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Compares against a checked-in file; `UPDATE_GOLDEN=1` rewrites it.
pub fn assert_golden(name: &str, actual: &[u8]) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == actual, "{} differs from the golden file", path.display());
}

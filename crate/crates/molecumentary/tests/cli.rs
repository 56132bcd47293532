mod common;

use std::path::Path;

use common::{assert_golden, cli, fixture_endpoint, fixtures, path_str};
use molecumentary::graph_doc::parse_graph;
use molecumentary::narration::timestamp;
use molecumentary::timeline_doc::TimelineDocument;

fn ok(args: &[&str], env: &[(&str, &str)]) -> Vec<u8> {
    let out = cli(args, env);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn forage(cache: &Path, extra: &[&str]) -> Vec<u8> {
    forage_from(&fixture_endpoint(), cache, extra)
}

fn forage_from(endpoint: &str, cache: &Path, extra: &[&str]) -> Vec<u8> {
    let model = fixtures().join("hiv.json");
    let mut args = vec![
        "forage",
        "--model",
        path_str(&model),
        "--cache-dir",
        path_str(cache),
        "--endpoint",
        endpoint,
    ];
    args.extend_from_slice(extra);
    ok(&args, &[])
}

/// Forages the fixture model into `dir/graph.json`.
fn graph_in(dir: &Path) -> std::path::PathBuf {
    let graph = dir.join("graph.json");
    std::fs::write(&graph, forage(&dir.join("cache"), &[])).unwrap();
    graph
}

fn synthesize(graph: &Path, seed: &str, extra: &[&str]) -> Vec<u8> {
    let model = fixtures().join("hiv.json");
    let mut args = vec![
        "synthesize",
        "--graph",
        path_str(graph),
        "--model",
        path_str(&model),
        "--seed",
        seed,
        "--fps",
        "2",
    ];
    args.extend_from_slice(extra);
    ok(&args, &[])
}

#[test]
fn forage_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let graph = forage(dir.path(), &[]);
    assert_golden("hiv_graph.json", &graph);
    let parsed = parse_graph(&graph).unwrap();
    assert_eq!(parsed.nodes().len(), 6);
}

#[test]
fn forage_replays_cache_offline() {
    let dir = tempfile::tempdir().unwrap();
    let online = forage(dir.path(), &[]);
    let offline = forage_from("http://unreachable.invalid/{lang}/{title}", dir.path(), &["--offline"]);
    assert_eq!(online, offline);
}

#[test]
fn offline_cold_cache_falls_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = forage(dir.path(), &["--offline"]);
    let graph = parse_graph(&out).unwrap();
    for node in graph.nodes() {
        let first = &node.descriptions()[0];
        if node.id == "capsid" {
            assert!(!first.is_fallback());
        } else {
            assert!(first.is_fallback(), "{}", node.id);
        }
    }
    assert!(std::fs::read_dir(dir.path()).map(|d| d.count() == 0).unwrap_or(true));
}

#[test]
fn endpoint_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let model = fixtures().join("hiv.json");
    let cache = dir.path().join("cache");
    let endpoint = fixture_endpoint();
    let from_env = ok(
        &["forage", "--model", path_str(&model)],
        &[
            ("MOLECUMENTARY_ENDPOINT", &endpoint),
            ("MOLECUMENTARY_CACHE_DIR", path_str(&cache)),
        ],
    );
    assert_eq!(from_env, forage(&dir.path().join("other"), &[]));
    assert!(cache.join("en").is_dir());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(
        cli(&["forage", "--model", path_str(&missing), "--offline"], &[])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cli(&["frobnicate"], &[]).status.code(), Some(2));
    assert_eq!(cli(&["--help"], &[]).status.code(), Some(0));

    let cycle = dir.path().join("cycle.json");
    std::fs::write(
        &cycle,
        r#"{"types":[{"id":"a","name":"A","parent":"b"},{"id":"b","name":"B","parent":"a"}],"instances":[]}"#,
    )
    .unwrap();
    let out = cli(&["forage", "--model", path_str(&cycle), "--offline"], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let graph = graph_in(dir.path());
    let text = dir.path().join("plain.txt");
    std::fs::write(&text, "Nothing here is a structure. Neither is this.").unwrap();
    let model = fixtures().join("hiv.json");
    let out = cli(
        &[
            "synthesize",
            "--mode",
            "from-text",
            "--graph",
            path_str(&graph),
            "--model",
            path_str(&model),
            "--text",
            path_str(&text),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn self_guided_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let graph = graph_in(dir.path());
    let timeline = synthesize(&graph, "42", &[]);
    assert_golden("hiv_self_guided.json", &timeline);

    let path = dir.path().join("timeline.json");
    std::fs::write(&path, &timeline).unwrap();
    let text = ok(&["narrate", path_str(&path)], &[]);
    assert_golden("hiv_self_guided.txt", &text);
}

#[test]
fn from_text_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let graph = graph_in(dir.path());
    let script = fixtures().join("script.txt");
    let timeline = synthesize(&graph, "42", &["--mode", "from-text", "--text", path_str(&script)]);
    assert_golden("hiv_from_text.json", &timeline);

    let path = dir.path().join("timeline.json");
    std::fs::write(&path, &timeline).unwrap();
    let ssml = ok(&["narrate", path_str(&path), "--format", "ssml"], &[]);
    assert_golden("hiv_from_text.ssml", &ssml);
    let doc = roxmltree::Document::parse(std::str::from_utf8(&ssml).unwrap()).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "speak");
    let marks = doc.descendants().filter(|n| n.has_tag_name("mark")).count();
    assert_eq!(marks, TimelineDocument::parse(&timeline).unwrap().scene_count);
}

#[test]
fn narration_stamps_follow_durations() {
    let dir = tempfile::tempdir().unwrap();
    let graph = graph_in(dir.path());
    let path = dir.path().join("timeline.json");
    std::fs::write(&path, synthesize(&graph, "7", &[])).unwrap();
    let doc = TimelineDocument::parse(&std::fs::read(&path).unwrap()).unwrap();
    let text = String::from_utf8(ok(&["narrate", path_str(&path)], &[])).unwrap();
    let mut start = 0.0;
    for (line, scene) in text.lines().zip(doc.scenes.scenes()) {
        assert!(line.starts_with(&format!("[{}]", timestamp(start))), "{line}");
        start += scene.duration;
    }
    assert_eq!(text.lines().count(), doc.scene_count);
}

#[test]
fn empty_timeline_narrates_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let graph = graph_in(dir.path());
    let full = TimelineDocument::parse(&synthesize(&graph, "42", &[])).unwrap();
    let empty = TimelineDocument::new(full.mode, full.config, Default::default(), Vec::new());
    let path = dir.path().join("empty.json");
    std::fs::write(&path, empty.to_json()).unwrap();
    assert!(ok(&["narrate", path_str(&path)], &[]).is_empty());
}

#[test]
fn output_flag_and_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let graph = graph_in(dir.path());
    let out = dir.path().join("t.json");
    let stdout = synthesize(&graph, "42", &["-o", path_str(&out)]);
    assert!(stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), synthesize(&graph, "42", &[]));

    for path in [fixtures().join("hiv.json"), graph, out] {
        let report = ok(&["inspect", path_str(&path)], &[]);
        assert!(!report.is_empty());
    }
}

#[test]
fn full_runs_are_byte_identical() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let graph = graph_in(dir.path());
        let timeline = synthesize(&graph, "1234", &[]);
        (std::fs::read(&graph).unwrap(), timeline)
    };
    assert_eq!(run(), run());
}

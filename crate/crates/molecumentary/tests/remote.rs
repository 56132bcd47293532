mod common;

use common::{fixture_config, fixtures, NoNetwork, Recorded};
use molecumentary::model_doc::parse_model;
use molecumentary::remote::{FetchResult, PrefetchedProvider, RemoteClient, RemoteConfig};
use molecumentary_core::foraging::{build_skeleton, forage_descriptions, forage_functional_edges};
use molecumentary_core::graph::DescriptionSource;

fn client(config: RemoteConfig) -> (RemoteClient, Recorded) {
    let t = Recorded::default();
    (RemoteClient::with_transport(config, Box::new(t.clone())), t)
}

#[test]
fn hit_is_cached_and_replayed_offline() {
    let dir = tempfile::tempdir().unwrap();
    let (c, t) = client(fixture_config(dir.path()));
    let first = c.fetch("Albumin");
    let FetchResult::Hit { text, url } = &first else {
        panic!("{first:?}")
    };
    assert!(text.starts_with("Albumin is a family of globular proteins"));
    assert_eq!(url, "https://en.wikipedia.org/wiki/Albumin");
    assert_eq!(c.fetch("albumin"), first);
    assert_eq!(t.calls(), 1);

    let offline = RemoteClient::with_transport(
        RemoteConfig {
            offline: true,
            ..fixture_config(dir.path())
        },
        Box::new(NoNetwork),
    );
    assert_eq!(offline.fetch("Albumin"), first);
}

#[test]
fn misses_are_cached() {
    let dir = tempfile::tempdir().unwrap();
    let (c, t) = client(fixture_config(dir.path()));
    assert_eq!(c.fetch("Zzxqy"), FetchResult::Miss);
    assert_eq!(c.fetch("Zzxqy"), FetchResult::Miss);
    assert_eq!(t.calls(), 1);
    let cached = std::fs::read_to_string(dir.path().join("en/zzxqy.txt")).unwrap();
    assert_eq!(cached, "miss\n");
}

#[test]
fn transport_errors_are_not_cached() {
    let dir = tempfile::tempdir().unwrap();
    let (c, t) = client(fixture_config(dir.path()));
    assert!(matches!(c.fetch("No Such Recording"), FetchResult::TransportError(_)));
    assert!(matches!(c.fetch("No Such Recording"), FetchResult::TransportError(_)));
    assert_eq!(t.calls(), 2);
    assert!(matches!(c.fetch("Broken response"), FetchResult::TransportError(_)));
    assert!(!dir.path().join("en/broken%20response.txt").exists());
}

#[test]
fn offline_cold_cache_never_calls_out() {
    let dir = tempfile::tempdir().unwrap();
    let c = RemoteClient::with_transport(
        RemoteConfig {
            offline: true,
            ..fixture_config(dir.path())
        },
        Box::new(NoNetwork),
    );
    for name in ["Albumin", "HIV", "Zzxqy"] {
        assert_eq!(c.fetch(name), FetchResult::Miss);
    }
    assert_eq!(c.requests(), 0);
}

#[test]
fn language_separates_cache_entries() {
    let dir = tempfile::tempdir().unwrap();
    let (en, _) = client(fixture_config(dir.path()));
    assert!(matches!(en.fetch("Albumin"), FetchResult::Hit { .. }));
    let (de, _) = client(RemoteConfig {
        language: "de".into(),
        ..fixture_config(dir.path())
    });
    assert!(matches!(de.fetch("Albumin"), FetchResult::TransportError(_)));
}

#[test]
fn prefetch_does_not_depend_on_parallelism() {
    let names = [
        "HIV",
        "Capsid",
        "RNA",
        "Reverse Transcriptase",
        "Blood plasma",
        "Zzxqy",
        "Missing One",
    ];
    let a_dir = tempfile::tempdir().unwrap();
    let b_dir = tempfile::tempdir().unwrap();
    let (a, _) = client(fixture_config(a_dir.path()));
    let (b, _) = client(fixture_config(b_dir.path()));
    let serial = a.prefetch(names, 1);
    let parallel = b.prefetch(names, 8);
    assert_eq!(serial, parallel);
    assert_eq!(serial.len(), names.len());
}

#[test]
fn forage_hiv_with_recorded_responses() {
    let dir = tempfile::tempdir().unwrap();
    let (c, _) = client(fixture_config(dir.path()));
    let model = parse_model(&std::fs::read(fixtures().join("hiv.json")).unwrap())
        .unwrap()
        .model;
    let mut graph = build_skeleton(&model);
    let names: Vec<String> = graph.nodes().iter().map(|n| n.name().to_string()).collect();
    let provider = PrefetchedProvider {
        results: c.prefetch(names.iter().map(String::as_str), 4),
        language: "en".into(),
    };
    let report = forage_descriptions(&mut graph, &[&provider]);
    assert_eq!(report.remote_hits, 5);
    assert_eq!(report.fallbacks, 1);
    assert!(report.failures.is_empty());

    let capsid = graph.node("capsid").unwrap().descriptions();
    assert_eq!(capsid[0].source, DescriptionSource::Local);
    assert!(matches!(capsid[1].source, DescriptionSource::Remote { .. }));
    assert!(graph.node("hiv-plasma").unwrap().descriptions()[0].is_fallback());

    assert!(forage_functional_edges(&mut graph) >= 1);
    assert!(graph.functional_edges().any(|e| e.from == "capsid" && e.to == "rna"));
}

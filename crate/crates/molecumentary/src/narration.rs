//! Narration scripts: timestamped text lines, or SSML for a speech engine.

use std::fmt::Write;

use molecumentary_core::commentary::estimate_duration;
use molecumentary_core::synthesis::Timeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Ssml,
}

/// `mm:ss.mmm`; minutes keep growing past 59.
pub fn timestamp(seconds: f64) -> String {
    let millis = (seconds * 1000.0).round() as u64;
    format!("{:02}:{:02}.{:03}", millis / 60_000, millis / 1000 % 60, millis % 1000)
}

/// One `[mm:ss.mmm] commentary` line per scene, stamped with its start.
pub fn to_text(timeline: &Timeline) -> String {
    let mut out = String::new();
    for (start, scene) in timeline.start_times().into_iter().zip(timeline.scenes()) {
        let stamp = timestamp(start);
        if scene.commentary.is_empty() {
            writeln!(out, "[{stamp}]").unwrap();
        } else {
            writeln!(out, "[{stamp}] {}", scene.commentary).unwrap();
        }
    }
    out
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// SSML document with a mark and paragraph per scene. Each scene ends with
/// a break covering the part of its duration not taken by speech at `wpm`.
pub fn to_ssml(timeline: &Timeline, wpm: f64) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<speak version=\"1.1\" xmlns=\"http://www.w3.org/2001/10/synthesis\" xml:lang=\"en\">\n");
    for (i, (start, scene)) in timeline.start_times().into_iter().zip(timeline.scenes()).enumerate() {
        writeln!(out, "  <mark name=\"scene-{i}-{}\"/>", timestamp(start)).unwrap();
        if !scene.commentary.is_empty() {
            writeln!(out, "  <p>{}</p>", escape(&scene.commentary)).unwrap();
        }
        let spoken = if scene.commentary.is_empty() {
            0.0
        } else {
            estimate_duration(&scene.commentary, wpm, 0.0)
        };
        let pause = ((scene.duration - spoken).max(0.0) * 1000.0).round() as u64;
        writeln!(out, "  <break time=\"{pause}ms\"/>").unwrap();
    }
    out.push_str("</speak>\n");
    out
}

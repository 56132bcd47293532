//! `molecumentary forage | synthesize | narrate | inspect`.
//!
//! Documents go to `--output` or stdout; summaries and warnings go to
//! stderr. Exit status: 0 on success, 1 for invalid input or nothing to
//! narrate, 2 for I/O and usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use molecumentary_core::commentary::{TemplateSet, DEFAULT_MIN_SCENE_SECONDS, DEFAULT_WPM};
use molecumentary_core::foraging::{build_skeleton, forage_descriptions, forage_functional_edges};
use molecumentary_core::graph::{DescriptionSource, StoryGraph};
use molecumentary_core::model::StructuralModel;
use molecumentary_core::synthesis::{generate_from_text, generate_self_guided, SynthesisConfig, SynthesisError};
use serde_json::Value;

use crate::graph_doc::{parse_graph, serialize_graph};
use crate::model_doc::parse_model;
use crate::narration::{self, Format};
use crate::remote::{PrefetchedProvider, RemoteClient, RemoteConfig, CACHE_DIR_ENV, DEFAULT_ENDPOINT, ENDPOINT_ENV};
use crate::timeline_doc::{Mode, TimelineDocument};
use crate::DocError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "molecumentary",
    version,
    about = "Narrated camera tours of hierarchical 3D models"
)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Seed for traversal, template choice and orbit directions
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Language of remote descriptions
    #[arg(long, global = true, default_value = "en")]
    pub lang: String,
    /// Directory of cached remote descriptions
    #[arg(long, global = true, env = CACHE_DIR_ENV, default_value = crate::remote::DEFAULT_CACHE_DIR)]
    pub cache_dir: PathBuf,
    /// Use cached descriptions only; never touch the network
    #[arg(long, global = true)]
    pub offline: bool,
    /// Endpoint template with {lang} and {title} placeholders
    #[arg(long, global = true, env = ENDPOINT_ENV, default_value = DEFAULT_ENDPOINT, hide_default_value = true)]
    pub endpoint: String,
    /// Remote request timeout in seconds
    #[arg(long, global = true, default_value_t = 10.0)]
    pub timeout: f64,
    /// Remote requests in flight while foraging
    #[arg(long, global = true, default_value_t = crate::remote::DEFAULT_JOBS)]
    pub jobs: usize,
    /// Self-guided target length in seconds
    #[arg(long, global = true, default_value_t = molecumentary_core::synthesis::DEFAULT_TARGET_DURATION)]
    pub duration: f64,
    /// Template file with [structural] and [navigational] sections
    #[arg(long, global = true)]
    pub templates: Option<PathBuf>,
    /// Traversal priority of leaf nodes
    #[arg(long, global = true, default_value_t = 1.0)]
    pub p_lower: f64,
    /// Traversal priority of inner nodes
    #[arg(long, global = true, default_value_t = 2.0)]
    pub p_higher: f64,
    /// Per-node priority as id=value, repeatable
    #[arg(long = "priority-override", global = true, value_name = "ID=VALUE", value_parser = parse_override)]
    pub priority_overrides: Vec<(String, f64)>,
    /// Narration speed in words per minute
    #[arg(long, global = true, default_value_t = DEFAULT_WPM)]
    pub wpm: f64,
    /// Shortest scene in seconds
    #[arg(long, global = true, default_value_t = DEFAULT_MIN_SCENE_SECONDS)]
    pub min_scene: f64,
    /// Camera keyframes per second
    #[arg(long, global = true, default_value_t = molecumentary_core::camera::DEFAULT_FPS)]
    pub fps: f64,
    /// Camera distance in target radii
    #[arg(long, global = true, default_value_t = molecumentary_core::camera::DEFAULT_DISTANCE_FACTOR)]
    pub distance_factor: f64,
    /// Orbit speed in degrees per second
    #[arg(long, global = true, default_value_t = molecumentary_core::camera::DEFAULT_ANGULAR_SPEED)]
    pub angular_speed: f64,
    /// Field of view in degrees
    #[arg(long, global = true, default_value_t = molecumentary_core::camera::DEFAULT_FOV)]
    pub fov: f64,
    /// Output file; stdout when absent
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Build a story graph from a model and remote descriptions
    Forage {
        /// Model document
        #[arg(long)]
        model: PathBuf,
    },
    /// Generate a timeline of scenes
    Synthesize {
        #[arg(long, value_enum, default_value_t = Mode::SelfGuided)]
        mode: Mode,
        /// Story-graph document from `forage`
        #[arg(long)]
        graph: PathBuf,
        /// Model document the graph was foraged from
        #[arg(long)]
        model: PathBuf,
        /// Input narrative for --mode from-text
        #[arg(long, required_if_eq("mode", "from-text"))]
        text: Option<PathBuf>,
        /// Indented JSON
        #[arg(long)]
        pretty: bool,
    },
    /// Export the narration of a timeline
    Narrate {
        /// Timeline document from `synthesize`
        timeline: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Summarize a model, story-graph or timeline document
    Inspect { path: PathBuf },
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (id, value) = s.split_once('=').ok_or("expected ID=VALUE")?;
    let id = id.trim();
    if id.is_empty() {
        return Err("empty node id".into());
    }
    let value: f64 = value.trim().parse().map_err(|e| format!("bad priority: {e}"))?;
    Ok((id.into(), value))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

fn doc_error(path: &Path, e: DocError) -> CliError {
    CliError::Domain(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_model(path: &Path, err: &mut dyn Write) -> Result<StructuralModel, CliError> {
    let parsed = parse_model(&read(path)?).map_err(|e| doc_error(path, e))?;
    for w in &parsed.warnings {
        let _ = writeln!(err, "warning: {}: {w}", path.display());
    }
    Ok(parsed.model)
}

fn read_graph(path: &Path) -> Result<StoryGraph, CliError> {
    parse_graph(&read(path)?).map_err(|e| doc_error(path, e))
}

impl RunArgs {
    pub fn synthesis_config(&self) -> SynthesisConfig {
        SynthesisConfig {
            target_duration: self.duration,
            seed: self.seed,
            p_lower: self.p_lower,
            p_higher: self.p_higher,
            priority_overrides: self.priority_overrides.iter().cloned().collect::<BTreeMap<_, _>>(),
            wpm: self.wpm,
            min_scene_seconds: self.min_scene,
            fps: self.fps,
            distance_factor: self.distance_factor,
            angular_speed: self.angular_speed,
            fov: self.fov,
            ..Default::default()
        }
    }

    pub fn remote_config(&self) -> Result<RemoteConfig, CliError> {
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return Err(CliError::Domain("timeout must be positive".into()));
        }
        let config = RemoteConfig {
            endpoint_template: self.endpoint.clone(),
            page_url_template: crate::remote::DEFAULT_PAGE_URL.into(),
            language: self.lang.clone(),
            timeout: Duration::from_secs_f64(self.timeout),
            cache_dir: self.cache_dir.clone(),
            offline: self.offline,
        };
        config.validate().map_err(CliError::Domain)?;
        Ok(config)
    }

    fn templates(&self) -> Result<TemplateSet, CliError> {
        match &self.templates {
            None => Ok(TemplateSet::default()),
            Some(path) => {
                let text =
                    String::from_utf8(read(path)?).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
                TemplateSet::parse(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
            }
        }
    }

    fn emit(&self, content: &str, out: &mut dyn Write) -> Result<(), CliError> {
        match &self.output {
            Some(path) => fs::write(path, content).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => out
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}"))),
        }
    }
}

/// Runs one invocation and returns its exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let run = &cli.run;
    match &cli.command {
        Command::Forage { model } => forage(run, model, out, err),
        Command::Synthesize {
            mode,
            graph,
            model,
            text,
            pretty,
        } => synthesize(run, *mode, graph, model, text.as_deref(), *pretty, out, err),
        Command::Narrate { timeline, format } => narrate(run, timeline, *format, out),
        Command::Inspect { path } => inspect(run, path, out),
    }
}

fn forage(run: &RunArgs, model_path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let config = run.remote_config()?;
    let model = read_model(model_path, err)?;
    let mut graph = build_skeleton(&model);

    let client = RemoteClient::new(config.clone());
    let names: Vec<String> = graph.nodes().iter().map(|n| n.name().to_string()).collect();
    let results = client.prefetch(names.iter().map(String::as_str), run.jobs);
    let provider = PrefetchedProvider {
        results,
        language: config.language.clone(),
    };
    let report = forage_descriptions(&mut graph, &[&provider]);
    let functional = forage_functional_edges(&mut graph);

    for f in &report.failures {
        let _ = writeln!(
            err,
            "warning: {} lookup for `{}` failed: {}",
            f.provider, f.node, f.detail
        );
    }
    run.emit(&serialize_graph(&graph), out)?;
    let _ = writeln!(
        err,
        "{} nodes, {} structural edges, {} functional edges; descriptions: {} local, {} remote, {} missed, {} fallback, {} failed",
        graph.nodes().len(),
        graph.structural_edges().count(),
        functional,
        report.with_local,
        report.remote_hits,
        report.misses,
        report.fallbacks,
        report.failures.len(),
    );
    Ok(())
}

fn synthesis_error(e: SynthesisError) -> CliError {
    CliError::Domain(e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn synthesize(
    run: &RunArgs,
    mode: Mode,
    graph_path: &Path,
    model_path: &Path,
    text_path: Option<&Path>,
    pretty: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let model = read_model(model_path, err)?;
    let graph = read_graph(graph_path)?;
    if let Some(n) = graph.nodes().iter().find(|n| !model.contains_type(&n.id)) {
        return Err(CliError::Domain(format!(
            "story graph node `{}` is not a type of {}",
            n.id,
            model_path.display()
        )));
    }
    let templates = run.templates()?;
    let config = run.synthesis_config();
    let synthesis = match mode {
        Mode::SelfGuided => generate_self_guided(&graph, &model, &templates, &config),
        Mode::FromText => {
            let path = text_path.ok_or_else(|| CliError::Domain("--text is required with --mode from-text".into()))?;
            let text =
                String::from_utf8(read(path)?).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
            generate_from_text(&graph, &model, &text, &templates, &config)
        }
    }
    .map_err(synthesis_error)?;

    for w in &synthesis.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let doc = TimelineDocument::new(mode, config, synthesis.timeline, synthesis.warnings);
    let json = if pretty { doc.to_json_pretty() } else { doc.to_json() };
    run.emit(&json, out)?;
    let _ = writeln!(err, "{} scenes, {:.3} s", doc.scene_count, doc.total_duration);
    Ok(())
}

fn read_timeline(path: &Path) -> Result<TimelineDocument, CliError> {
    TimelineDocument::parse(&read(path)?).map_err(|e| doc_error(path, e))
}

fn narrate(run: &RunArgs, path: &Path, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let doc = read_timeline(path)?;
    let script = match format {
        Format::Text => narration::to_text(&doc.scenes),
        Format::Ssml => narration::to_ssml(&doc.scenes, doc.config.wpm),
    };
    run.emit(&script, out)
}

fn inspect(run: &RunArgs, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let bytes = read(path)?;
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| doc_error(path, e.into()))?;
    let report = if value.get("scenes").is_some() {
        describe_timeline(&read_timeline(path)?)
    } else if value.get("nodes").is_some() {
        describe_graph(&read_graph(path)?)
    } else if value.get("types").is_some() {
        let mut sink = Vec::new();
        let model = read_model(path, &mut sink)?;
        describe_model(&model)
    } else {
        return Err(CliError::Domain(format!(
            "{}: not a model, story-graph or timeline document",
            path.display()
        )));
    };
    run.emit(&report, out)
}

fn describe_model(model: &StructuralModel) -> String {
    let mut s = format!(
        "model: {} types, {} instances, root `{}`\n",
        model.types().len(),
        model.instances().len(),
        model.root_id()
    );
    fn walk(model: &StructuralModel, id: &str, depth: usize, s: &mut String) {
        let t = model.get_type(id).expect("listed type exists");
        let count = model.instances_of(id).count();
        s.push_str(&format!("{}{} ({}) x{}\n", "  ".repeat(depth + 1), t.name, id, count));
        for c in model.children_of(id) {
            walk(model, c, depth + 1, s);
        }
    }
    walk(model, model.root_id(), 0, &mut s);
    s
}

fn describe_graph(graph: &StoryGraph) -> String {
    let functional: Vec<_> = graph.functional_edges().collect();
    let mut s = format!(
        "story graph: {} nodes, {} structural edges, {} functional edges, root `{}`\n",
        graph.nodes().len(),
        graph.structural_edges().count(),
        functional.len(),
        graph.root_id()
    );
    for n in graph.nodes() {
        let sources: Vec<&str> = n
            .descriptions()
            .iter()
            .map(|d| match d.source {
                DescriptionSource::Local => "local",
                DescriptionSource::Remote { .. } => "remote",
                DescriptionSource::Fallback => "fallback",
            })
            .collect();
        s.push_str(&format!("  {} `{}`: {}\n", n.name(), n.id, sources.join(", ")));
    }
    for e in functional {
        s.push_str(&format!(
            "  {} -> {}: {}\n",
            e.from,
            e.to,
            e.evidence().unwrap_or_default()
        ));
    }
    s
}

fn describe_timeline(doc: &TimelineDocument) -> String {
    let mut s = format!(
        "timeline: {} scenes, {:.3} s, seed {}\n",
        doc.scene_count, doc.total_duration, doc.seed
    );
    for (start, scene) in doc.scenes.start_times().into_iter().zip(doc.scenes.scenes()) {
        let kind = match scene.kind {
            molecumentary_core::synthesis::SceneKind::Focus => "focus".to_string(),
            molecumentary_core::synthesis::SceneKind::Overview => "overview".to_string(),
            molecumentary_core::synthesis::SceneKind::Transition(k) => format!("transition {k:?}"),
        };
        s.push_str(&format!(
            "  [{}] {:<30} {} ({:.3} s)\n",
            narration::timestamp(start),
            kind,
            scene.subject,
            scene.duration
        ));
    }
    s
}

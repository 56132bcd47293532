//! Scenes, the timeline and the two narrative generators.
//!
//! A timeline is a FIFO of focus, overview and transition scenes. Every
//! focus or overview scene is entered through a transition, and each
//! transition ends exactly where the following scene's camera starts.
//!
//! [`generate_self_guided`] walks the story graph with the narratory
//! traversal. [`generate_from_text`] follows the structures named in an
//! input text, one fresh keyword per sentence.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::camera::{
    self, curved_transition_keyframes, direct_fly_keyframes, focus_target, in_view_cone, is_aggregate, orbit_keyframes,
    overview_viewpoint, CameraError, CameraKeyframe, CameraTarget, OrbitDirection, OrbitParams, Pose,
};
use crate::commentary::{
    descriptive_commentary, estimate_duration, navigational_commentary, structural_commentary, CommentaryError,
    CommentaryKind, TemplateSet,
};
use crate::graph::{GraphError, StoryGraph};
use crate::model::{Instance, Sphere, StructuralModel};
use crate::occlusion::{
    focus_cut, interpolate_planes, overview_cut, CuttingPlane, OcclusionError, VisibilityDirective,
};
use crate::text::{detect_keywords, split_sentences, KeywordIndex};
use crate::traversal::{advance, select_next, TraversalConfig, TraversalError, TraversalState};
use crate::{seeded_rng, SceneRng, Vec3};

pub const DEFAULT_TARGET_DURATION: f64 = 120.0;
/// Plane keyframes per transition, endpoints included.
pub const PLANE_SAMPLES: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TransitionKind {
    SiblingsToSibling,
    FocusToOverview,
    OverviewToFocus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SceneKind {
    Focus,
    Overview,
    Transition(TransitionKind),
}

impl SceneKind {
    pub fn is_transition(self) -> bool {
        matches!(self, SceneKind::Transition(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Label {
    pub instance: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlaneKeyframe {
    pub time: f64,
    pub plane: CuttingPlane,
}

/// Cutting plane travelling from the outgoing to the incoming placement.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlaneTrack {
    pub from: CuttingPlane,
    pub to: CuttingPlane,
    pub keyframes: Vec<PlaneKeyframe>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scene {
    pub kind: SceneKind,
    pub subject: String,
    /// Where a transition comes from.
    pub secondary_subject: Option<String>,
    pub duration: f64,
    pub camera: Vec<CameraKeyframe>,
    /// For transitions this already carries the exemptions of the scene
    /// that follows.
    pub visibility: VisibilityDirective,
    pub interpolation: Option<PlaneTrack>,
    pub commentary: String,
    pub commentary_kind: CommentaryKind,
    pub labels: Vec<Label>,
}

impl Scene {
    fn first_pose(&self) -> Pose {
        self.camera.first().expect("scene camera is never empty").pose()
    }

    fn last_pose(&self) -> Pose {
        self.camera.last().expect("scene camera is never empty").pose()
    }

    /// Appends narration, stretching the scene with a held final keyframe
    /// when the longer text needs more time.
    fn extend_commentary(&mut self, text: &str, config: &SynthesisConfig) {
        if self.commentary.is_empty() {
            self.commentary = text.into();
        } else {
            self.commentary.push(' ');
            self.commentary.push_str(text);
        }
        let duration = estimate_duration(&self.commentary, config.wpm, config.min_scene_seconds);
        if duration > self.duration {
            let mut hold = *self.camera.last().expect("scene camera is never empty");
            hold.time = duration;
            self.camera.push(hold);
            self.duration = duration;
        }
    }
}

/// Scenes in playback order. Pushed at the back, popped from the front.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Timeline {
    scenes: VecDeque<Scene>,
}

impl Timeline {
    pub fn new() -> Self {
        Timeline::default()
    }

    pub fn push(&mut self, scene: Scene) {
        self.scenes.push_back(scene);
    }

    pub fn pop(&mut self) -> Option<Scene> {
        self.scenes.pop_front()
    }

    pub fn len(&self) -> usize {
        self.scenes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenes.is_empty()
    }

    pub fn scenes(&self) -> impl ExactSizeIterator<Item = &Scene> + DoubleEndedIterator {
        self.scenes.iter()
    }

    pub fn last(&self) -> Option<&Scene> {
        self.scenes.back()
    }

    fn last_mut(&mut self) -> Option<&mut Scene> {
        self.scenes.back_mut()
    }

    /// Sum of scene durations.
    pub fn total_duration(&self) -> f64 {
        self.scenes.iter().map(|s| s.duration).sum()
    }

    /// Start time of every scene.
    pub fn start_times(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.scenes
            .iter()
            .map(|s| {
                let start = t;
                t += s.duration;
                start
            })
            .collect()
    }
}

impl FromIterator<Scene> for Timeline {
    fn from_iter<I: IntoIterator<Item = Scene>>(iter: I) -> Self {
        Timeline {
            scenes: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthesisConfig {
    /// Self-guided mode stops once the timeline is at least this long.
    pub target_duration: f64,
    pub seed: u64,
    pub p_lower: f64,
    pub p_higher: f64,
    pub priority_overrides: alloc::collections::BTreeMap<String, f64>,
    pub wpm: f64,
    pub min_scene_seconds: f64,
    pub fps: f64,
    pub distance_factor: f64,
    pub angular_speed: f64,
    pub fov: f64,
    /// Outward bow of curved transitions; half the chord when unset.
    pub zoom_out_offset: Option<f64>,
    /// Traversal steps before self-guided mode gives up.
    pub max_iterations: usize,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            target_duration: DEFAULT_TARGET_DURATION,
            seed: 0,
            p_lower: 1.0,
            p_higher: 2.0,
            priority_overrides: Default::default(),
            wpm: crate::commentary::DEFAULT_WPM,
            min_scene_seconds: crate::commentary::DEFAULT_MIN_SCENE_SECONDS,
            fps: camera::DEFAULT_FPS,
            distance_factor: camera::DEFAULT_DISTANCE_FACTOR,
            angular_speed: camera::DEFAULT_ANGULAR_SPEED,
            fov: camera::DEFAULT_FOV,
            zoom_out_offset: None,
            max_iterations: 10_000,
        }
    }
}

impl SynthesisConfig {
    pub fn traversal(&self) -> TraversalConfig {
        TraversalConfig {
            p_lower: self.p_lower,
            p_higher: self.p_higher,
            seed: self.seed,
            overrides: self.priority_overrides.clone(),
        }
    }

    fn orbit(&self, direction: OrbitDirection) -> OrbitParams {
        OrbitParams {
            distance_factor: self.distance_factor,
            angular_speed: self.angular_speed,
            direction,
        }
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(self.target_duration >= 0.0 && self.target_duration.is_finite()) {
            return Err(SynthesisError::Config(
                "target duration must be finite and non-negative",
            ));
        }
        if !positive(self.wpm) {
            return Err(SynthesisError::Config("words per minute must be positive"));
        }
        if !positive(self.min_scene_seconds) {
            return Err(SynthesisError::Config("minimum scene length must be positive"));
        }
        if !positive(self.fps) {
            return Err(SynthesisError::Config("frame rate must be positive"));
        }
        if !(self.fov > 0.0 && self.fov < 180.0) {
            return Err(SynthesisError::Config("field of view must be in (0, 180) degrees"));
        }
        if let Some(offset) = self.zoom_out_offset {
            if !(offset >= 0.0 && offset.is_finite()) {
                return Err(SynthesisError::Config("zoom-out offset must be non-negative"));
            }
        }
        self.orbit(OrbitDirection::CounterClockwise).validate()?;
        self.traversal().validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthesisError {
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("`{0}` has no instance to show")]
    NoRepresentative(String),
    #[error("`{0}` has no children to give an overview of")]
    NotComposite(String),
    #[error("no narratable content: the text names no structure of the model")]
    NoNarratableContent,
    #[error(transparent)]
    Camera(#[from] CameraError),
    #[error(transparent)]
    Occlusion(#[from] OcclusionError),
    #[error(transparent)]
    Commentary(#[from] CommentaryError),
    #[error(transparent)]
    Traversal(#[from] TraversalError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Timeline plus the warnings collected on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub timeline: Timeline,
    pub warnings: Vec<String>,
}

/// Read-only inputs shared by every scene of a run.
#[derive(Debug, Clone, Copy)]
pub struct SceneContext<'a> {
    pub graph: &'a StoryGraph,
    pub model: &'a StructuralModel,
    pub templates: &'a TemplateSet,
    pub config: &'a SynthesisConfig,
}

impl SceneContext<'_> {
    fn name(&self, id: &str) -> String {
        self.graph
            .node(id)
            .map(|n| String::from(n.name()))
            .unwrap_or_else(|| id.into())
    }

    fn duration_for(&self, text: &str) -> f64 {
        estimate_duration(text, self.config.wpm, self.config.min_scene_seconds)
    }

    /// Types whose instances a representative stands for.
    fn represented_types(&self, rep: &Instance) -> Vec<String> {
        let mut types = alloc::vec![rep.type_id.clone()];
        if is_aggregate(rep) {
            types.extend(self.model.descendants(&rep.type_id).into_iter().map(String::from));
        }
        types
    }
}

/// Camera pose that frames every instance of the model from +Z.
pub fn initial_pose(model: &StructuralModel, fov: f64) -> Result<Pose, SynthesisError> {
    let root = model.root_id();
    let sphere = model
        .type_sphere(root)
        .map_err(|_| SynthesisError::NoRepresentative(root.into()))?;
    let rep = Instance::new(camera::aggregate_id(root), root, sphere.center, sphere.radius);
    Ok(overview_viewpoint(&[rep], None, fov)?.pose())
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> OrbitDirection {
    if rng.random_bool(0.5) {
        OrbitDirection::CounterClockwise
    } else {
        OrbitDirection::Clockwise
    }
}

/// Where a focus scene on `node` would start, before any narration.
struct FocusPlan {
    rep: Instance,
    target: CameraTarget,
    start: Pose,
    visibility: VisibilityDirective,
}

fn plan_focus(node: &str, ctx: &SceneContext<'_>, camera: &Pose) -> Result<FocusPlan, SynthesisError> {
    let (rep, target) = focus_target(node, ctx.model, camera.position).map_err(|e| match e {
        CameraError::NoInstances(n) => SynthesisError::NoRepresentative(n),
        other => other.into(),
    })?;
    let away = (camera.position - target.center).normalized().unwrap_or(Vec3::Z);
    let start = Pose::new(
        target.center + away * (ctx.config.distance_factor * target.radius),
        target.center,
    );
    let mut visibility = focus_cut(node, &rep, &CameraKeyframe::new(0.0, start.position, start.look_at))?;
    visibility.exempt_types.extend(ctx.represented_types(&rep));
    Ok(FocusPlan {
        rep,
        target,
        start,
        visibility,
    })
}

fn focus_scene_with<R: Rng + ?Sized>(
    node: &str,
    ctx: &SceneContext<'_>,
    camera: &Pose,
    rng: &mut R,
    text: Option<String>,
) -> Result<Scene, SynthesisError> {
    let plan = plan_focus(node, ctx, camera)?;
    let commentary = match text {
        Some(t) => t,
        None => descriptive_commentary(node, ctx.graph, ctx.templates, rng)?,
    };
    let duration = ctx.duration_for(&commentary);
    let params = ctx.config.orbit(random_direction(rng));
    let frames = orbit_keyframes(&plan.target, &params, duration, plan.start.position, ctx.config.fps)?;
    Ok(Scene {
        kind: SceneKind::Focus,
        subject: node.into(),
        secondary_subject: None,
        duration,
        camera: frames,
        visibility: plan.visibility,
        interpolation: None,
        commentary,
        commentary_kind: CommentaryKind::Descriptive,
        labels: alloc::vec![Label {
            instance: plan.rep.id,
            text: ctx.name(node),
        }],
    })
}

/// Orbit around the representative of `node` nearest to the camera,
/// narrated with its best description.
pub fn make_focus_scene<R: Rng + ?Sized>(
    node: &str,
    ctx: &SceneContext<'_>,
    camera: &Pose,
    rng: &mut R,
) -> Result<Scene, SynthesisError> {
    focus_scene_with(node, ctx, camera, rng, None)
}

struct OverviewPlan {
    reps: Vec<(String, Instance)>,
    start: CameraKeyframe,
    visibility: VisibilityDirective,
}

fn plan_overview(node: &str, ctx: &SceneContext<'_>, camera: &Pose) -> Result<OverviewPlan, SynthesisError> {
    let children = ctx.graph.skeleton_children(node)?;
    if children.is_empty() {
        return Err(SynthesisError::NotComposite(node.into()));
    }
    let mut reps = Vec::new();
    for child in children {
        match focus_target(child, ctx.model, camera.position) {
            Ok((rep, _)) => reps.push((String::from(child), rep)),
            Err(CameraError::NoInstances(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if reps.is_empty() {
        return Err(SynthesisError::NoRepresentative(node.into()));
    }
    let instances: Vec<Instance> = reps.iter().map(|(_, r)| r.clone()).collect();
    let spheres: Vec<Sphere> = instances.iter().map(Instance::sphere).collect();
    let fit = Sphere::enclosing(&spheres).ok_or(CameraError::EmptyGroup)?;
    let back = (camera.position - fit.center).normalized();
    let start = overview_viewpoint(&instances, back, ctx.config.fov)?;
    let mut visibility = overview_cut(&reps, &start)?;
    for (_, rep) in &reps {
        if is_aggregate(rep) {
            visibility.exempt_types.extend(ctx.represented_types(rep));
        }
    }
    Ok(OverviewPlan {
        reps,
        start,
        visibility,
    })
}

fn overview_scene_with<R: Rng + ?Sized>(
    node: &str,
    ctx: &SceneContext<'_>,
    camera: &Pose,
    rng: &mut R,
    text: Option<String>,
) -> Result<Scene, SynthesisError> {
    let plan = plan_overview(node, ctx, camera)?;
    let commentary = match text {
        Some(t) => t,
        None => structural_commentary(node, ctx.graph, ctx.templates, rng)?,
    };
    let duration = ctx.duration_for(&commentary);
    let center = plan.start.look_at;
    let distance = plan.start.position.distance(center);
    let pivot = CameraTarget {
        center,
        radius: distance / ctx.config.distance_factor,
    };
    let params = ctx.config.orbit(random_direction(rng));
    let frames = orbit_keyframes(&pivot, &params, duration, plan.start.position, ctx.config.fps)?;
    let labels = plan
        .reps
        .iter()
        .map(|(child, rep)| Label {
            instance: rep.id.clone(),
            text: ctx.name(child),
        })
        .collect();
    Ok(Scene {
        kind: SceneKind::Overview,
        subject: node.into(),
        secondary_subject: None,
        duration,
        camera: frames,
        visibility: plan.visibility,
        interpolation: None,
        commentary,
        commentary_kind: CommentaryKind::Structural,
        labels,
    })
}

/// Orbit around the fitted sphere of one representative per child of
/// `node`, narrated with structural commentary.
pub fn make_overview_scene<R: Rng + ?Sized>(
    node: &str,
    ctx: &SceneContext<'_>,
    camera: &Pose,
    rng: &mut R,
) -> Result<Scene, SynthesisError> {
    overview_scene_with(node, ctx, camera, rng, None)
}

/// Where the camera and the cutting plane have to arrive.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEnd {
    pub pose: Pose,
    pub visibility: VisibilityDirective,
}

impl TransitionEnd {
    pub fn of(scene: &Scene) -> Self {
        TransitionEnd {
            pose: scene.first_pose(),
            visibility: scene.visibility.clone(),
        }
    }
}

/// Connective scene from the camera's current pose to `end`.
///
/// A target already inside the view cone is reached by direct flight, any
/// other by the curved, zoomed-out path. The cutting plane travels from
/// `outgoing` (or stays put without one) to the placement of the following
/// scene, whose exemptions apply from the start. `commentary` replaces the
/// generated navigational text when given.
#[allow(clippy::too_many_arguments)]
pub fn make_transition_scene<R: Rng + ?Sized>(
    kind: TransitionKind,
    from: &str,
    to: &str,
    ctx: &SceneContext<'_>,
    camera: &Pose,
    outgoing: Option<&VisibilityDirective>,
    end: &TransitionEnd,
    rng: &mut R,
    commentary: Option<String>,
) -> Result<Scene, SynthesisError> {
    for id in [from, to] {
        if !ctx.graph.contains(id) {
            return Err(GraphError::UnknownNode(id.into()).into());
        }
    }
    let commentary = match commentary {
        Some(t) => t,
        None => navigational_commentary(to, Some(from), ctx.graph, ctx.templates, rng)?,
    };
    let duration = ctx.duration_for(&commentary);
    let fps = ctx.config.fps;
    let direct = camera.view_dir().is_some() && in_view_cone(camera, end.pose.look_at, ctx.config.fov);
    let frames = if direct {
        direct_fly_keyframes(camera, &end.pose, duration, fps)?
    } else {
        curved_transition_keyframes(camera, &end.pose, ctx.config.zoom_out_offset, duration, fps)?
    };

    let to_plane = end.visibility.plane;
    let from_plane = outgoing.map_or(to_plane, |d| d.plane);
    let keyframes = (0..PLANE_SAMPLES)
        .map(|i| {
            let u = i as f64 / (PLANE_SAMPLES - 1) as f64;
            PlaneKeyframe {
                time: duration * u,
                plane: interpolate_planes(&from_plane, &to_plane, u),
            }
        })
        .collect();

    Ok(Scene {
        kind: SceneKind::Transition(kind),
        subject: to.into(),
        secondary_subject: Some(from.into()),
        duration,
        camera: frames,
        visibility: end.visibility.clone(),
        interpolation: Some(PlaneTrack {
            from: from_plane,
            to: to_plane,
            keyframes,
        }),
        commentary,
        commentary_kind: CommentaryKind::Navigational,
        labels: Vec::new(),
    })
}

/// Appends scenes while tracking the camera and cutting plane.
struct Director<'a> {
    ctx: SceneContext<'a>,
    rng: SceneRng,
    timeline: Timeline,
    camera: Pose,
    warnings: Vec<String>,
}

impl<'a> Director<'a> {
    fn new(ctx: SceneContext<'a>) -> Result<Self, SynthesisError> {
        ctx.config.validate()?;
        let mut rng = seeded_rng(ctx.config.seed);
        rng.set_stream(1);
        let camera = initial_pose(ctx.model, ctx.config.fov)?;
        Ok(Director {
            ctx,
            rng,
            timeline: Timeline::new(),
            camera,
            warnings: Vec::new(),
        })
    }

    fn outgoing(&self) -> Option<VisibilityDirective> {
        self.timeline.last().map(|s| s.visibility.clone())
    }

    fn push(&mut self, scene: Scene) {
        self.camera = scene.last_pose();
        self.timeline.push(scene);
    }

    fn transition(
        &mut self,
        kind: TransitionKind,
        from: &str,
        to: &str,
        end: &TransitionEnd,
        commentary: Option<String>,
    ) -> Result<(), SynthesisError> {
        let outgoing = self.outgoing();
        let scene = make_transition_scene(
            kind,
            from,
            to,
            &self.ctx,
            &self.camera,
            outgoing.as_ref(),
            end,
            &mut self.rng,
            commentary,
        )?;
        self.push(scene);
        Ok(())
    }

    /// Transition followed by the scene it leads into. The scene is planned
    /// first so the transition can end on its first keyframe.
    fn enter(
        &mut self,
        kind: TransitionKind,
        from: &str,
        scene: Scene,
        transition_text: Option<String>,
    ) -> Result<(), SynthesisError> {
        let end = TransitionEnd::of(&scene);
        let to = scene.subject.clone();
        self.transition(kind, from, &to, &end, transition_text)?;
        self.push(scene);
        Ok(())
    }

    fn focus(&mut self, node: &str, text: Option<String>) -> Result<Scene, SynthesisError> {
        focus_scene_with(node, &self.ctx, &self.camera, &mut self.rng, text)
    }

    fn overview(&mut self, node: &str, text: Option<String>) -> Result<Scene, SynthesisError> {
        overview_scene_with(node, &self.ctx, &self.camera, &mut self.rng, text)
    }

    fn warn(&mut self, message: String) {
        self.warnings.push(message);
    }

    fn finish(self) -> Synthesis {
        Synthesis {
            timeline: self.timeline,
            warnings: self.warnings,
        }
    }
}

fn skippable(e: &SynthesisError) -> bool {
    matches!(e, SynthesisError::NoRepresentative(_))
}

/// Self-guided narrative.
///
/// Until the timeline reaches the target duration: draw the next node,
/// enter it through a transition (from the overview if the last scene was
/// one, otherwise sideways), focus on it, and if it is a composite dive in
/// with a second transition and an overview. Nodes without any instance to
/// show are passed over with a warning.
pub fn generate_self_guided(
    graph: &StoryGraph,
    model: &StructuralModel,
    templates: &TemplateSet,
    config: &SynthesisConfig,
) -> Result<Synthesis, SynthesisError> {
    let ctx = SceneContext {
        graph,
        model,
        templates,
        config,
    };
    let mut director = Director::new(ctx)?;
    let mut state = TraversalState::init(graph, config.traversal())?;
    let mut skipped = BTreeSet::new();
    let mut iterations = 0;

    while director.timeline.total_duration() < config.target_duration {
        if iterations == config.max_iterations {
            director.warn(alloc::format!(
                "stopped after {iterations} traversal steps short of the target duration"
            ));
            break;
        }
        iterations += 1;

        let current = String::from(state.top());
        let next = match select_next(graph, &mut state) {
            Ok(n) => n,
            Err(TraversalError::EmptyPool) => {
                if director.timeline.is_empty() {
                    let scene = director.focus(&current, None)?;
                    director.enter(TransitionKind::SiblingsToSibling, &current, scene, None)?;
                }
                director.warn(alloc::format!(
                    "`{current}` has nowhere to go; the target duration cannot be reached"
                ));
                break;
            }
            Err(e) => return Err(e.into()),
        };
        advance(graph, &mut state, &next)?;

        let kind = match director.timeline.last().map(|s| s.kind) {
            Some(SceneKind::Overview) => TransitionKind::OverviewToFocus,
            _ => TransitionKind::SiblingsToSibling,
        };
        let focus = match director.focus(&next, None) {
            Ok(scene) => scene,
            Err(e) if skippable(&e) => {
                if skipped.insert(next.clone()) {
                    director.warn(alloc::format!("skipping `{next}`: {e}"));
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        director.enter(kind, &current, focus, None)?;

        if !graph.is_leaf(&next)? {
            let overview = director.overview(&next, None)?;
            director.enter(TransitionKind::FocusToOverview, &next, overview, None)?;
        }
    }
    Ok(director.finish())
}

/// Text-to-molecumentary.
///
/// Each sentence is narrated on the scene of the first structure it names
/// that was not used before. Composites get an overview, leaves a focus
/// scene, and the last sentence closes with an overview of the root's first
/// child. The sentences themselves are the narration; transitions stay
/// silent. A sentence naming nothing new lengthens the previous scene.
pub fn generate_from_text(
    graph: &StoryGraph,
    model: &StructuralModel,
    text: &str,
    templates: &TemplateSet,
    config: &SynthesisConfig,
) -> Result<Synthesis, SynthesisError> {
    let ctx = SceneContext {
        graph,
        model,
        templates,
        config,
    };
    let mut director = Director::new(ctx)?;
    let index = KeywordIndex::from_graph(graph);
    let sentences = split_sentences(text);
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut previous: Option<String> = None;
    let mut pending = String::new();

    let silent = || Some(String::new());

    for (i, sentence) in sentences.iter().enumerate() {
        let keyword = detect_keywords(sentence, &index)
            .into_iter()
            .find(|k| !used.contains(k));
        let Some(current) = keyword else {
            match director.timeline.last_mut() {
                Some(scene) => scene.extend_commentary(sentence, config),
                None => {
                    if !pending.is_empty() {
                        pending.push(' ');
                    }
                    pending.push_str(sentence);
                }
            }
            continue;
        };
        let narration = if pending.is_empty() {
            sentence.clone()
        } else {
            let joined = alloc::format!("{pending} {sentence}");
            pending.clear();
            joined
        };

        let outcome = if i + 1 == sentences.len() {
            closing_overview(&mut director, &narration)
        } else if !graph.is_leaf(&current)? {
            director
                .overview(&current, Some(narration.clone()))
                .and_then(|scene| director.enter(TransitionKind::FocusToOverview, &current, scene, silent()))
        } else {
            let current_parent = graph.skeleton_parent(&current)?;
            let previous_parent = match &previous {
                Some(p) => graph.skeleton_parent(p)?,
                None => None,
            };
            let from = if previous.is_none() || previous_parent != current_parent {
                current_parent.unwrap_or(&current)
            } else {
                &current
            };
            let from = String::from(from);
            director
                .focus(&current, Some(narration.clone()))
                .and_then(|scene| director.enter(TransitionKind::SiblingsToSibling, &from, scene, silent()))
        };
        match outcome {
            Ok(()) => {}
            Err(e) if skippable(&e) => {
                director.warn(alloc::format!("nothing to show for `{current}`: {e}"));
                match director.timeline.last_mut() {
                    Some(scene) => scene.extend_commentary(&narration, config),
                    None => pending = narration,
                }
            }
            Err(e) => return Err(e),
        }
        used.insert(current.clone());
        previous = Some(current);
    }

    if used.is_empty() {
        return Err(SynthesisError::NoNarratableContent);
    }
    if !pending.is_empty() {
        director.warn(String::from("trailing text was not attached to any scene"));
    }
    Ok(director.finish())
}

/// Last sentence: swing to the first child of the story-graph root, then
/// back out to its overview.
fn closing_overview(director: &mut Director<'_>, narration: &str) -> Result<(), SynthesisError> {
    let graph = director.ctx.graph;
    let root = graph.root_id();
    let child = graph.skeleton_children(root)?.first().copied().unwrap_or(root);
    let child = String::from(child);
    if graph.is_leaf(&child)? {
        let scene = director.focus(&child, Some(narration.into()))?;
        return director.enter(TransitionKind::OverviewToFocus, &child, scene, Some(String::new()));
    }

    let plan = plan_focus(&child, &director.ctx, &director.camera)?;
    let end = TransitionEnd {
        pose: plan.start,
        visibility: plan.visibility,
    };
    director.transition(
        TransitionKind::OverviewToFocus,
        &child,
        &child,
        &end,
        Some(String::new()),
    )?;
    let scene = director.overview(&child, Some(narration.into()))?;
    director.enter(TransitionKind::FocusToOverview, &child, scene, Some(String::new()))
}

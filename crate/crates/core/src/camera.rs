//! Camera targets and keyframe generation.
//!
//! Three motions: anchored orbiting around a target, direct flying along a
//! straight line with fixed orientation, and a curved transition along a
//! quadratic Bézier that bows outward from the straight path. Motions are
//! sampled at a fixed frame rate; players interpolate linearly in between.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geom::{smoothstep, Vec3};
use crate::model::{Instance, ModelError, Sphere, StructuralModel};

/// Default stand-off, in target radii.
pub const DEFAULT_DISTANCE_FACTOR: f64 = 3.0;
pub const DEFAULT_ANGULAR_SPEED: f64 = 12.0;
pub const DEFAULT_FPS: f64 = 30.0;
pub const DEFAULT_FOV: f64 = 60.0;
/// Extra room around the fitted sphere in overview shots.
pub const OVERVIEW_MARGIN: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CameraError {
    #[error("type `{0}` has no instances to look at")]
    NoInstances(String),
    #[error("camera position coincides with its target")]
    DegeneratePose,
    #[error("duration must be positive, got {0}")]
    InvalidDuration(f64),
    #[error("frame rate must be positive, got {0}")]
    InvalidFps(f64),
    #[error("invalid camera parameter: {0}")]
    InvalidParams(&'static str),
    #[error("no representatives to frame")]
    EmptyGroup,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// What the camera frames: a bounding sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CameraTarget {
    pub center: Vec3,
    pub radius: f64,
}

impl From<Sphere> for CameraTarget {
    fn from(s: Sphere) -> Self {
        CameraTarget {
            center: s.center,
            radius: s.radius,
        }
    }
}

/// Where the camera is and what it looks at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    pub look_at: Vec3,
}

impl Pose {
    pub fn new(position: Vec3, look_at: Vec3) -> Self {
        Pose { position, look_at }
    }

    /// Unit vector from the camera towards its target.
    pub fn view_dir(&self) -> Option<Vec3> {
        (self.look_at - self.position).normalized()
    }

    /// Unit vector from the target back to the camera.
    pub fn back(&self) -> Option<Vec3> {
        self.view_dir().map(|d| -d)
    }
}

/// One sampled camera state. `time` is seconds from the start of the scene.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CameraKeyframe {
    pub time: f64,
    pub position: Vec3,
    pub look_at: Vec3,
    pub up: Vec3,
}

impl CameraKeyframe {
    /// Keyframe with world up made orthogonal to the view direction.
    pub fn new(time: f64, position: Vec3, look_at: Vec3) -> Self {
        CameraKeyframe {
            time,
            position,
            look_at,
            up: up_for(look_at - position),
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.position, self.look_at)
    }
}

fn up_for(view: Vec3) -> Vec3 {
    match view.normalized() {
        Some(d) => (Vec3::Y - d * Vec3::Y.dot(d))
            .normalized()
            .unwrap_or_else(|| d.any_orthogonal()),
        None => Vec3::Y,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OrbitDirection {
    Clockwise,
    CounterClockwise,
}

impl OrbitDirection {
    /// Sign of the rotation about +Y.
    fn sign(self) -> f64 {
        match self {
            OrbitDirection::CounterClockwise => 1.0,
            OrbitDirection::Clockwise => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitParams {
    /// Camera distance in target radii.
    pub distance_factor: f64,
    /// Degrees per second.
    pub angular_speed: f64,
    pub direction: OrbitDirection,
}

impl Default for OrbitParams {
    fn default() -> Self {
        OrbitParams {
            distance_factor: DEFAULT_DISTANCE_FACTOR,
            angular_speed: DEFAULT_ANGULAR_SPEED,
            direction: OrbitDirection::CounterClockwise,
        }
    }
}

impl OrbitParams {
    pub fn validate(&self) -> Result<(), CameraError> {
        if !(self.distance_factor > 1.0 && self.distance_factor.is_finite()) {
            return Err(CameraError::InvalidParams("distance factor must exceed 1"));
        }
        if !(self.angular_speed > 0.0 && self.angular_speed.is_finite()) {
            return Err(CameraError::InvalidParams("angular speed must be positive"));
        }
        Ok(())
    }
}

/// Sample times `0, .., duration`, the last one exact.
fn sample_times(duration: f64, fps: f64) -> Result<Vec<f64>, CameraError> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(CameraError::InvalidDuration(duration));
    }
    if !(fps > 0.0 && fps.is_finite()) {
        return Err(CameraError::InvalidFps(fps));
    }
    let frames = libm::ceil(duration * fps).max(1.0) as usize;
    Ok((0..=frames)
        .map(|i| {
            if i == frames {
                duration
            } else {
                duration * i as f64 / frames as f64
            }
        })
        .collect())
}

/// Representative of `node` for a camera at `camera_pos`: its nearest own
/// instance (ties broken by id), or, for a composite without instances, a
/// synthetic instance enclosing the representatives of its children.
pub fn focus_target(
    node: &str,
    model: &StructuralModel,
    camera_pos: Vec3,
) -> Result<(Instance, CameraTarget), CameraError> {
    if !model.contains_type(node) {
        return Err(ModelError::UnknownType(node.into()).into());
    }
    let rep = representative(node, model, camera_pos).ok_or_else(|| CameraError::NoInstances(node.into()))?;
    let target = CameraTarget::from(rep.sphere());
    Ok((rep, target))
}

fn representative(node: &str, model: &StructuralModel, camera_pos: Vec3) -> Option<Instance> {
    let nearest = model.instances_of(node).min_by(|a, b| {
        a.center
            .distance(camera_pos)
            .total_cmp(&b.center.distance(camera_pos))
            .then_with(|| a.id.cmp(&b.id))
    });
    if let Some(inst) = nearest {
        return Some(inst.clone());
    }
    let parts: Vec<Sphere> = model
        .children_of(node)
        .into_iter()
        .filter_map(|c| representative(c, model, camera_pos))
        .map(|i| i.sphere())
        .collect();
    let sphere = Sphere::enclosing(&parts)?;
    Some(Instance::new(aggregate_id(node), node, sphere.center, sphere.radius))
}

/// Id given to synthetic representatives of composite types.
pub fn aggregate_id(node: &str) -> String {
    format!("{node}@aggregate")
}

pub fn is_aggregate(instance: &Instance) -> bool {
    instance.id == aggregate_id(&instance.type_id)
}

/// Pose at `factor` radii from the target, looking along `view_dir`.
pub fn standoff_pose(target: &CameraTarget, view_dir: Vec3, factor: f64) -> Pose {
    let dir = view_dir.normalized().unwrap_or(-Vec3::Z);
    Pose::new(target.center - dir * (factor * target.radius), target.center)
}

/// Anchored orbit about the vertical axis through the target center.
///
/// The start position is projected onto the orbit radius
/// (`distance_factor × radius`); the camera then keeps that distance and
/// always looks at the center. Counter-clockwise is positive rotation about
/// +Y.
pub fn orbit_keyframes(
    target: &CameraTarget,
    params: &OrbitParams,
    duration: f64,
    start_pos: Vec3,
    fps: f64,
) -> Result<Vec<CameraKeyframe>, CameraError> {
    params.validate()?;
    if target.radius.is_nan() || target.radius <= 0.0 {
        return Err(CameraError::InvalidParams("target radius must be positive"));
    }
    let times = sample_times(duration, fps)?;
    let dir = (start_pos - target.center)
        .normalized()
        .ok_or(CameraError::DegeneratePose)?;
    let offset = dir * (params.distance_factor * target.radius);
    let rate = params.direction.sign() * params.angular_speed.to_radians();
    Ok(times
        .into_iter()
        .map(|t| {
            let (s, c) = libm::sincos(rate * t);
            let rotated = Vec3::new(offset.x * c + offset.z * s, offset.y, -offset.x * s + offset.z * c);
            CameraKeyframe::new(t, target.center + rotated, target.center)
        })
        .collect())
}

/// Straight flight from one pose to another with the orientation of the
/// first pose held throughout.
pub fn direct_fly_keyframes(
    from: &Pose,
    to: &Pose,
    duration: f64,
    fps: f64,
) -> Result<Vec<CameraKeyframe>, CameraError> {
    let times = sample_times(duration, fps)?;
    let dir = from.view_dir().ok_or(CameraError::DegeneratePose)?;
    let near = from.position.distance(from.look_at);
    let far = to.position.distance(to.look_at);
    Ok(times
        .into_iter()
        .map(|t| {
            let u = t / duration;
            let position = from.position.lerp(to.position, u);
            let reach = near + (far - near) * u;
            let look_at = if u == 0.0 { from.look_at } else { position + dir * reach };
            CameraKeyframe {
                time: t,
                position,
                look_at,
                up: up_for(dir),
            }
        })
        .collect())
}

/// `(1−t)²P0 + 2t(1−t)P1 + t²P2`.
pub fn quadratic_bezier(p0: Vec3, p1: Vec3, p2: Vec3, t: f64) -> Vec3 {
    let s = 1.0 - t;
    p0 * (s * s) + p1 * (2.0 * t * s) + p2 * (t * t)
}

/// Control point that bows the path outward, away from the two targets.
///
/// `mid(P0, P2) + offset · normalize(mid(P0, P2) − mid(from_center, to_center))`,
/// with `offset` defaulting to half the chord length.
pub fn transition_control_point(
    p0: Vec3,
    p2: Vec3,
    from_center: Vec3,
    to_center: Vec3,
    zoom_out_offset: Option<f64>,
) -> Vec3 {
    let mid = p0.midpoint(p2);
    let offset = zoom_out_offset.unwrap_or(0.5 * p0.distance(p2));
    let outward = (mid - from_center.midpoint(to_center))
        .normalized()
        .or_else(|| (p0 - from_center).normalized())
        .or_else(|| (p2 - p0).normalized().map(Vec3::any_orthogonal))
        .unwrap_or(Vec3::Y);
    mid + outward * offset
}

/// Curved flight from `from` to `to`: positions on the quadratic Bézier with
/// the outward control point, look-at blended between the two targets by
/// smoothstep.
pub fn curved_transition_keyframes(
    from: &Pose,
    to: &Pose,
    zoom_out_offset: Option<f64>,
    duration: f64,
    fps: f64,
) -> Result<Vec<CameraKeyframe>, CameraError> {
    let times = sample_times(duration, fps)?;
    let p0 = from.position;
    let p2 = to.position;
    let p1 = transition_control_point(p0, p2, from.look_at, to.look_at, zoom_out_offset);
    let mut frames = Vec::with_capacity(times.len());
    for t in times {
        let u = t / duration;
        let position = quadratic_bezier(p0, p1, p2, u);
        let look_at = from.look_at.lerp(to.look_at, smoothstep(u));
        let look_at = if look_at == position {
            // passes through the focus point; keep looking ahead
            position + (p2 - p0).normalized().unwrap_or(-Vec3::Z)
        } else {
            look_at
        };
        frames.push(CameraKeyframe::new(t, position, look_at));
    }
    Ok(frames)
}

/// Pose that shows every representative: the camera backs off from the
/// fitted sphere along `back` (default +Z) by `radius / sin(fov/2)` plus a
/// 10% margin.
pub fn overview_viewpoint(
    representatives: &[Instance],
    back: Option<Vec3>,
    fov_degrees: f64,
) -> Result<CameraKeyframe, CameraError> {
    if !(fov_degrees > 0.0 && fov_degrees < 180.0) {
        return Err(CameraError::InvalidParams("field of view must be in (0, 180) degrees"));
    }
    let spheres: Vec<Sphere> = representatives.iter().map(Instance::sphere).collect();
    let fit = Sphere::enclosing(&spheres).ok_or(CameraError::EmptyGroup)?;
    let distance = overview_distance(fit.radius, fov_degrees);
    let back = back.and_then(Vec3::normalized).unwrap_or(Vec3::Z);
    Ok(CameraKeyframe::new(0.0, fit.center + back * distance, fit.center))
}

pub fn overview_distance(radius: f64, fov_degrees: f64) -> f64 {
    radius / libm::sin((fov_degrees * 0.5).to_radians()) * OVERVIEW_MARGIN
}

/// True when `point` lies within half the field of view of the view axis.
pub fn in_view_cone(pose: &Pose, point: Vec3, fov_degrees: f64) -> bool {
    let (Some(axis), Some(to_point)) = (pose.view_dir(), (point - pose.position).normalized()) else {
        return false;
    };
    let cos = axis.dot(to_point).clamp(-1.0, 1.0);
    libm::acos(cos) <= (fov_degrees * 0.5).to_radians()
}

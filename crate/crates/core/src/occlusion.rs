//! Traveling cutting plane.
//!
//! A single plane culls every instance whose center lies on the camera side
//! of it, except for exempt types and instances. Culling happens in world
//! space by instance center, never by image-space fading, so an instance
//! straddling the plane is classified by its center alone.

use alloc::collections::BTreeSet;
use alloc::string::String;

use crate::camera::CameraKeyframe;
use crate::geom::Vec3;
use crate::model::Instance;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OcclusionError {
    #[error("camera position coincides with its look-at point")]
    DegenerateCamera,
    #[error("no representatives to place the plane against")]
    EmptyGroup,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CuttingPlane {
    pub point: Vec3,
    /// Unit normal pointing towards the camera side.
    pub normal: Vec3,
}

impl CuttingPlane {
    /// Positive on the camera side.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p - self.point)
    }
}

/// Plane plus the ids that are never cut.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VisibilityDirective {
    pub plane: CuttingPlane,
    pub exempt_types: BTreeSet<String>,
    pub exempt_instances: BTreeSet<String>,
}

impl VisibilityDirective {
    pub fn is_exempt(&self, instance: &Instance) -> bool {
        self.exempt_instances.contains(&instance.id) || self.exempt_types.contains(&instance.type_id)
    }
}

fn camera_back(camera: &CameraKeyframe) -> Result<Vec3, OcclusionError> {
    (camera.position - camera.look_at)
        .normalized()
        .ok_or(OcclusionError::DegenerateCamera)
}

/// Focus scenes: plane through the representative's center, parallel to the
/// view plane, with every instance of the focused type exempt.
pub fn focus_cut(
    node: &str,
    representative: &Instance,
    camera: &CameraKeyframe,
) -> Result<VisibilityDirective, OcclusionError> {
    Ok(VisibilityDirective {
        plane: CuttingPlane {
            point: representative.center,
            normal: camera_back(camera)?,
        },
        exempt_types: [String::from(node)].into_iter().collect(),
        exempt_instances: BTreeSet::new(),
    })
}

/// Overview scenes: every child representative exempt, plane through the
/// representative farthest from the camera so none of them sits behind
/// kept geometry.
pub fn overview_cut(
    children_reps: &[(String, Instance)],
    camera: &CameraKeyframe,
) -> Result<VisibilityDirective, OcclusionError> {
    let normal = camera_back(camera)?;
    let farthest = children_reps
        .iter()
        .map(|(_, inst)| inst)
        .max_by(|a, b| {
            a.center
                .distance(camera.position)
                .total_cmp(&b.center.distance(camera.position))
                .then_with(|| b.id.cmp(&a.id))
        })
        .ok_or(OcclusionError::EmptyGroup)?;
    Ok(VisibilityDirective {
        plane: CuttingPlane {
            point: farthest.center,
            normal,
        },
        exempt_types: BTreeSet::new(),
        exempt_instances: children_reps.iter().map(|(_, i)| i.id.clone()).collect(),
    })
}

/// True when the instance is removed from view.
pub fn is_culled(instance: &Instance, directive: &VisibilityDirective, _camera_pos: Vec3) -> bool {
    if directive.is_exempt(instance) {
        return false;
    }
    directive.plane.signed_distance(instance.center) > 0.0
}

/// Plane between two directives: point lerped, normal slerped.
///
/// Opposite normals have no unique great circle; the turn then goes through
/// a fixed perpendicular of the starting normal.
pub fn plane_interpolation(from: &VisibilityDirective, to: &VisibilityDirective, t: f64) -> CuttingPlane {
    interpolate_planes(&from.plane, &to.plane, t)
}

pub fn interpolate_planes(a: &CuttingPlane, b: &CuttingPlane, t: f64) -> CuttingPlane {
    if t <= 0.0 {
        return *a;
    }
    if t >= 1.0 {
        return *b;
    }
    CuttingPlane {
        point: a.point.lerp(b.point, t),
        normal: slerp(a.normal, b.normal, t),
    }
}

fn slerp(a: Vec3, b: Vec3, t: f64) -> Vec3 {
    let cos = a.dot(b).clamp(-1.0, 1.0);
    if cos > 1.0 - 1e-12 {
        return a.lerp(b, t).normalized().unwrap_or(a);
    }
    if cos < -1.0 + 1e-12 {
        let perp = a.any_orthogonal();
        let angle = core::f64::consts::PI * t;
        return (a * libm::cos(angle) + perp * libm::sin(angle))
            .normalized()
            .unwrap_or(a);
    }
    let omega = libm::acos(cos);
    let sin = libm::sin(omega);
    let v = a * (libm::sin((1.0 - t) * omega) / sin) + b * (libm::sin(t * omega) / sin);
    v.normalized().unwrap_or(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn cam(z: f64) -> CameraKeyframe {
        CameraKeyframe::new(0.0, Vec3::new(0.0, 0.0, z), Vec3::ZERO)
    }

    fn inst(id: &str, ty: &str, z: f64) -> Instance {
        Instance::new(id, ty, Vec3::new(0.0, 0.0, z), 1.0)
    }

    #[test]
    fn focus_plane_faces_camera() {
        let rep = inst("rt-1", "rt", 0.0);
        let d = focus_cut("rt", &rep, &cam(10.0)).unwrap();
        assert_eq!(d.plane.point, Vec3::ZERO);
        assert_eq!(d.plane.normal, Vec3::Z);
        assert!(d.exempt_types.contains("rt"));

        let behind = inst("rt-2", "rt", 5.0);
        assert!(!is_culled(&behind, &d, Vec3::new(0.0, 0.0, 10.0)));
    }

    #[test]
    fn degenerate_camera_is_rejected() {
        let c = CameraKeyframe::new(0.0, Vec3::ZERO, Vec3::ZERO);
        assert_eq!(
            focus_cut("x", &inst("a", "x", 0.0), &c),
            Err(OcclusionError::DegenerateCamera)
        );
    }

    #[test]
    fn overview_plane_at_farthest_rep() {
        let reps = vec![
            ("a".into(), inst("a-1", "a", 2.0)),
            ("b".into(), inst("b-1", "b", -4.0)),
        ];
        let d = overview_cut(&reps, &cam(10.0)).unwrap();
        assert_eq!(d.plane.point, Vec3::new(0.0, 0.0, -4.0));
        for (_, r) in &reps {
            assert!(d.plane.signed_distance(r.center) >= 0.0);
            assert!(!is_culled(r, &d, Vec3::new(0.0, 0.0, 10.0)));
        }
        let single = overview_cut(&reps[..1], &cam(10.0)).unwrap();
        assert_eq!(single.plane.point, Vec3::new(0.0, 0.0, 2.0));
        assert_eq!(overview_cut(&[], &cam(10.0)), Err(OcclusionError::EmptyGroup));
    }

    #[test]
    fn culling_by_signed_distance() {
        let d = VisibilityDirective {
            plane: CuttingPlane {
                point: Vec3::ZERO,
                normal: Vec3::Z,
            },
            exempt_types: BTreeSet::new(),
            exempt_instances: ["keep".into()].into_iter().collect(),
        };
        let camera = Vec3::new(0.0, 0.0, 10.0);
        assert!(is_culled(&inst("x", "t", 4.0), &d, camera));
        assert!(!is_culled(&inst("y", "t", -3.0), &d, camera));
        assert!(!is_culled(&inst("keep", "t", 4.0), &d, camera));
    }

    #[test]
    fn interpolation_endpoints_and_midpoints() {
        let a = VisibilityDirective {
            plane: CuttingPlane {
                point: Vec3::ZERO,
                normal: Vec3::Z,
            },
            exempt_types: BTreeSet::new(),
            exempt_instances: BTreeSet::new(),
        };
        let b = VisibilityDirective {
            plane: CuttingPlane {
                point: Vec3::new(0.0, 0.0, -4.0),
                normal: Vec3::X,
            },
            ..a.clone()
        };
        assert_eq!(plane_interpolation(&a, &b, 0.0), a.plane);
        assert_eq!(plane_interpolation(&a, &b, 1.0), b.plane);
        let mid = plane_interpolation(&a, &b, 0.5);
        assert_eq!(mid.point, Vec3::new(0.0, 0.0, -2.0));
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!(mid.normal.distance(Vec3::new(h, 0.0, h)) < 1e-12);
    }

    #[test]
    fn opposite_normals_still_rotate() {
        let a = CuttingPlane {
            point: Vec3::ZERO,
            normal: Vec3::Z,
        };
        let b = CuttingPlane {
            point: Vec3::ZERO,
            normal: -Vec3::Z,
        };
        let mid = interpolate_planes(&a, &b, 0.5);
        assert!((mid.normal.length() - 1.0).abs() < 1e-12);
        assert!(mid.normal.dot(Vec3::Z).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn exempting_never_hides(
            zs in proptest::collection::vec(-10.0f64..10.0, 1..20),
            extra in 0usize..20,
        ) {
            let instances: Vec<Instance> =
                zs.iter().enumerate().map(|(i, z)| inst(&alloc::format!("i{i}"), "t", *z)).collect();
            let base = VisibilityDirective {
                plane: CuttingPlane { point: Vec3::ZERO, normal: Vec3::Z },
                exempt_types: BTreeSet::new(),
                exempt_instances: BTreeSet::new(),
            };
            let mut more = base.clone();
            more.exempt_instances.insert(alloc::format!("i{}", extra % instances.len()));
            for i in &instances {
                if !is_culled(i, &base, Vec3::Z * 20.0) {
                    prop_assert!(!is_culled(i, &more, Vec3::Z * 20.0));
                }
            }
        }
    }
}

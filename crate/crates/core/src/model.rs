//! Structural model: a tree of structure types plus positioned instances.
//!
//! Composite types may carry instances of their own. When they do not, their
//! extent is aggregated from descendant instances (see
//! [`StructuralModel::subtree_instances`]).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::geom::Vec3;

/// One kind of structure in the model hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureType {
    pub id: String,
    /// Display and keyword name.
    pub name: String,
    /// Further names, e.g. database identifiers.
    pub alt_names: Vec<String>,
    pub parent_id: Option<String>,
    /// Author-supplied texts, possibly empty.
    pub local_descriptions: Vec<String>,
}

impl StructureType {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        StructureType {
            id: id.into(),
            name: name.into(),
            alt_names: Vec::new(),
            parent_id: None,
            local_descriptions: Vec::new(),
        }
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parent_id = Some(parent.into());
        self
    }

    pub fn with_description(mut self, text: impl Into<String>) -> Self {
        self.local_descriptions.push(text.into());
        self
    }

    pub fn with_alt_name(mut self, name: impl Into<String>) -> Self {
        self.alt_names.push(name.into());
        self
    }
}

/// A positioned occurrence of a structure type, approximated by a sphere.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Instance {
    pub id: String,
    pub type_id: String,
    pub center: Vec3,
    pub radius: f64,
}

impl Instance {
    pub fn new(id: impl Into<String>, type_id: impl Into<String>, center: Vec3, radius: f64) -> Self {
        Instance {
            id: id.into(),
            type_id: type_id.into(),
            center,
            radius,
        }
    }

    pub fn sphere(&self) -> Sphere {
        Sphere {
            center: self.center,
            radius: self.radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64) -> Self {
        Sphere { center, radius }
    }

    /// True when `other` lies inside `self`, up to `tol`.
    pub fn contains_sphere(&self, other: &Sphere, tol: f64) -> bool {
        self.center.distance(other.center) + other.radius <= self.radius + tol
    }

    /// Ritter-style enclosing sphere of a set of spheres.
    ///
    /// Two passes: seed with the pair found by two farthest-point sweeps,
    /// then grow for every sphere that still sticks out. A final sweep widens
    /// the radius to absorb rounding so containment is exact.
    pub fn enclosing(spheres: &[Sphere]) -> Option<Sphere> {
        let first = spheres.first()?;
        let farthest_from = |p: Vec3| {
            spheres
                .iter()
                .max_by(|a, b| {
                    let da = a.center.distance(p) + a.radius;
                    let db = b.center.distance(p) + b.radius;
                    da.total_cmp(&db)
                })
                .copied()
                .unwrap_or(*first)
        };
        let a = farthest_from(first.center);
        let b = farthest_from(a.center);

        let mut bound = a;
        bound.grow_to(&b);
        for s in spheres {
            bound.grow_to(s);
        }
        for s in spheres {
            let reach = bound.center.distance(s.center) + s.radius;
            if reach > bound.radius {
                bound.radius = reach;
            }
        }
        Some(bound)
    }

    fn grow_to(&mut self, s: &Sphere) {
        let offset = s.center - self.center;
        let dist = offset.length();
        if dist + s.radius <= self.radius {
            return;
        }
        if self.radius + dist <= s.radius {
            *self = *s;
            return;
        }
        let new_radius = 0.5 * (self.radius + dist + s.radius);
        if let Some(dir) = offset.normalized() {
            self.center += dir * (new_radius - self.radius);
        }
        self.radius = new_radius;
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("model contains no structure types")]
    Empty,
    #[error("blank id on {0}")]
    BlankId(&'static str),
    #[error("duplicate type id `{0}`")]
    DuplicateType(String),
    #[error("duplicate instance id `{0}`")]
    DuplicateInstance(String),
    #[error("type `{type_id}` names unknown parent `{parent}`")]
    DanglingParent { type_id: String, parent: String },
    #[error("instance `{instance}` refers to unknown type `{type_id}`")]
    DanglingInstanceType { instance: String, type_id: String },
    #[error("parent links form a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("no root type (every type has a parent)")]
    NoRoot,
    #[error("more than one root type: {}", .0.join(", "))]
    MultipleRoots(Vec<String>),
    #[error("instance `{0}` has a non-positive or non-finite radius")]
    InvalidRadius(String),
    #[error("instance `{0}` has a non-finite center")]
    InvalidCenter(String),
    #[error("cannot fit a sphere to an empty group")]
    EmptyGroup,
    #[error("unknown type `{0}`")]
    UnknownType(String),
}

/// Validated hierarchy of types with their instances.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralModel {
    types: Vec<StructureType>,
    index: BTreeMap<String, usize>,
    children: Vec<Vec<usize>>,
    instances: Vec<Instance>,
    instances_by_type: Vec<Vec<usize>>,
    root: usize,
}

impl StructuralModel {
    /// Validates and indexes a model. Types keep their given order, which
    /// fixes sibling order everywhere downstream.
    pub fn new(types: Vec<StructureType>, instances: Vec<Instance>) -> Result<Self, ModelError> {
        if types.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, t) in types.iter().enumerate() {
            if t.id.trim().is_empty() {
                return Err(ModelError::BlankId("type"));
            }
            if index.insert(t.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateType(t.id.clone()));
            }
        }

        let mut parent_of = Vec::with_capacity(types.len());
        for t in &types {
            match &t.parent_id {
                Some(p) => match index.get(p) {
                    Some(&pi) => parent_of.push(Some(pi)),
                    None => {
                        return Err(ModelError::DanglingParent {
                            type_id: t.id.clone(),
                            parent: p.clone(),
                        })
                    }
                },
                None => parent_of.push(None),
            }
        }

        if let Some(cycle) = find_cycle(&parent_of) {
            return Err(ModelError::Cycle(
                cycle.into_iter().map(|i| types[i].id.clone()).collect(),
            ));
        }

        let roots: Vec<usize> = (0..types.len()).filter(|&i| parent_of[i].is_none()).collect();
        let root = match roots.as_slice() {
            [] => return Err(ModelError::NoRoot),
            [r] => *r,
            many => {
                return Err(ModelError::MultipleRoots(
                    many.iter().map(|&i| types[i].id.clone()).collect(),
                ))
            }
        };

        let mut children = alloc::vec![Vec::new(); types.len()];
        for (i, p) in parent_of.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(i);
            }
        }

        let mut seen = BTreeSet::new();
        let mut instances_by_type = alloc::vec![Vec::new(); types.len()];
        for (k, inst) in instances.iter().enumerate() {
            if inst.id.trim().is_empty() {
                return Err(ModelError::BlankId("instance"));
            }
            if !seen.insert(inst.id.as_str()) {
                return Err(ModelError::DuplicateInstance(inst.id.clone()));
            }
            if !(inst.radius > 0.0 && inst.radius.is_finite()) {
                return Err(ModelError::InvalidRadius(inst.id.clone()));
            }
            if !inst.center.is_finite() {
                return Err(ModelError::InvalidCenter(inst.id.clone()));
            }
            match index.get(&inst.type_id) {
                Some(&ti) => instances_by_type[ti].push(k),
                None => {
                    return Err(ModelError::DanglingInstanceType {
                        instance: inst.id.clone(),
                        type_id: inst.type_id.clone(),
                    })
                }
            }
        }

        Ok(StructuralModel {
            types,
            index,
            children,
            instances,
            instances_by_type,
            root,
        })
    }

    pub fn root_id(&self) -> &str {
        &self.types[self.root].id
    }

    /// Types in document order.
    pub fn types(&self) -> &[StructureType] {
        &self.types
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn get_type(&self, id: &str) -> Option<&StructureType> {
        self.index.get(id).map(|&i| &self.types[i])
    }

    pub fn contains_type(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Child type ids in document order.
    pub fn children_of(&self, id: &str) -> Vec<&str> {
        match self.index.get(id) {
            Some(&i) => self.children[i].iter().map(|&c| self.types[c].id.as_str()).collect(),
            None => Vec::new(),
        }
    }

    /// Instances whose type is exactly `type_id`.
    pub fn instances_of(&self, type_id: &str) -> impl Iterator<Item = &Instance> + '_ {
        let slots: &[usize] = match self.index.get(type_id) {
            Some(&i) => &self.instances_by_type[i],
            None => &[],
        };
        slots.iter().map(move |&k| &self.instances[k])
    }

    /// Instances of `type_id` and of every type below it, in depth-first
    /// document order.
    pub fn subtree_instances(&self, type_id: &str) -> Vec<&Instance> {
        let mut out = Vec::new();
        let Some(&start) = self.index.get(type_id) else {
            return out;
        };
        let mut stack = alloc::vec![start];
        while let Some(t) = stack.pop() {
            out.extend(self.instances_by_type[t].iter().map(|&k| &self.instances[k]));
            stack.extend(self.children[t].iter().rev().copied());
        }
        out
    }

    /// Type ids strictly below `type_id`.
    pub fn descendants(&self, type_id: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let Some(&start) = self.index.get(type_id) else {
            return out;
        };
        let mut stack: Vec<usize> = self.children[start].iter().rev().copied().collect();
        while let Some(t) = stack.pop() {
            out.push(self.types[t].id.as_str());
            stack.extend(self.children[t].iter().rev().copied());
        }
        out
    }

    /// Bounding sphere of a type: its own instances if it has any, otherwise
    /// the instances of its whole subtree.
    pub fn type_sphere(&self, type_id: &str) -> Result<Sphere, ModelError> {
        if !self.contains_type(type_id) {
            return Err(ModelError::UnknownType(type_id.into()));
        }
        let own: Vec<Instance> = self.instances_of(type_id).cloned().collect();
        if !own.is_empty() {
            return group_bounding_sphere(&own);
        }
        let subtree: Vec<Instance> = self.subtree_instances(type_id).into_iter().cloned().collect();
        group_bounding_sphere(&subtree)
    }
}

/// Returns the first cycle found in a parent array, listed from the entry
/// point back to itself.
fn find_cycle(parent_of: &[Option<usize>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = alloc::vec![0u8; parent_of.len()];
    for start in 0..parent_of.len() {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = Some(start);
        while let Some(c) = cur {
            match state[c] {
                0 => {
                    state[c] = 1;
                    path.push(c);
                    cur = parent_of[c];
                }
                1 => {
                    let pos = path.iter().position(|&p| p == c).unwrap_or(0);
                    let mut cycle: Vec<usize> = path[pos..].to_vec();
                    cycle.push(c);
                    return Some(cycle);
                }
                _ => break,
            }
        }
        for p in path {
            state[p] = 2;
        }
    }
    None
}

/// Sphere containing every instance sphere of the group. Not minimal.
pub fn group_bounding_sphere(instances: &[Instance]) -> Result<Sphere, ModelError> {
    let spheres: Vec<Sphere> = instances.iter().map(Instance::sphere).collect();
    Sphere::enclosing(&spheres).ok_or(ModelError::EmptyGroup)
}

//! Story graph: type nodes joined by structural and functional edges.
//!
//! Structural edges form the skeleton, a tree rooted at [`StoryGraph::root_id`].
//! Functional edges are free: any direction, any multiplicity.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DescriptionSource {
    /// Supplied with the model.
    Local,
    /// Fetched from an online repository.
    Remote {
        repository: String,
        url: String,
        language: String,
    },
    /// No text anywhere; structural commentary is generated instead.
    Fallback,
}

impl DescriptionSource {
    /// Lower ranks are preferred.
    pub fn rank(&self) -> u8 {
        match self {
            DescriptionSource::Local => 0,
            DescriptionSource::Remote { .. } => 1,
            DescriptionSource::Fallback => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Description {
    pub text: String,
    pub source: DescriptionSource,
}

impl Description {
    /// Trimmed local text, `None` when blank.
    pub fn local(text: &str) -> Option<Self> {
        let text = text.trim();
        (!text.is_empty()).then(|| Description {
            text: text.into(),
            source: DescriptionSource::Local,
        })
    }

    pub fn remote(text: &str, repository: &str, url: &str, language: &str) -> Option<Self> {
        let text = text.trim();
        (!text.is_empty()).then(|| Description {
            text: text.into(),
            source: DescriptionSource::Remote {
                repository: repository.into(),
                url: url.into(),
                language: language.into(),
            },
        })
    }

    pub fn fallback() -> Self {
        Description {
            text: String::new(),
            source: DescriptionSource::Fallback,
        }
    }

    pub fn is_fallback(&self) -> bool {
        self.source == DescriptionSource::Fallback
    }
}

/// A node per structure type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeNode {
    pub id: String,
    names: Vec<String>,
    descriptions: Vec<Description>,
}

impl TypeNode {
    /// Blank names are dropped; returns `None` if nothing is left.
    pub fn new<I, S>(id: impl Into<String>, names: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut kept: Vec<String> = Vec::new();
        for n in names {
            let n = n.as_ref().trim();
            if !n.is_empty() && !kept.iter().any(|k| k == n) {
                kept.push(n.into());
            }
        }
        (!kept.is_empty()).then(|| TypeNode {
            id: id.into(),
            names: kept,
            descriptions: Vec::new(),
        })
    }

    /// Display name.
    pub fn name(&self) -> &str {
        &self.names[0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Descriptions, best source first.
    pub fn descriptions(&self) -> &[Description] {
        &self.descriptions
    }

    /// Inserts after every description of the same or better rank.
    pub fn add_description(&mut self, d: Description) {
        let rank = d.source.rank();
        let at = self
            .descriptions
            .iter()
            .position(|e| e.source.rank() > rank)
            .unwrap_or(self.descriptions.len());
        self.descriptions.insert(at, d);
    }

    /// Drops every description that is not [`DescriptionSource::Local`].
    pub fn clear_foraged(&mut self) {
        self.descriptions.retain(|d| d.source == DescriptionSource::Local);
    }

    pub fn has_text(&self) -> bool {
        self.descriptions.iter().any(|d| !d.is_fallback())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeKind {
    Structural,
    /// Derived from a sentence in `source_node`'s descriptions.
    Functional {
        evidence: String,
        source_node: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationshipEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
}

impl RelationshipEdge {
    pub fn structural(parent: impl Into<String>, child: impl Into<String>) -> Self {
        RelationshipEdge {
            from: parent.into(),
            to: child.into(),
            kind: EdgeKind::Structural,
        }
    }

    /// Functional edge owned by `from`: the sentence came from `from`'s texts.
    pub fn functional(from: impl Into<String>, to: impl Into<String>, evidence: impl Into<String>) -> Self {
        let from = from.into();
        RelationshipEdge {
            kind: EdgeKind::Functional {
                evidence: evidence.into(),
                source_node: from.clone(),
            },
            from,
            to: to.into(),
        }
    }

    pub fn is_structural(&self) -> bool {
        self.kind == EdgeKind::Structural
    }

    pub fn evidence(&self) -> Option<&str> {
        match &self.kind {
            EdgeKind::Functional { evidence, .. } => Some(evidence),
            EdgeKind::Structural => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("structural self-loop on `{0}`")]
    SelfLoop(String),
    #[error("node `{0}` has more than one structural parent")]
    MultipleParents(String),
    #[error("structural edge into the root `{0}`")]
    EdgeIntoRoot(String),
    #[error("skeleton has a cycle through `{0}`")]
    SkeletonCycle(String),
    #[error("node `{0}` is not reachable from the root")]
    Unreachable(String),
    #[error("functional edge {from} -> {to} has blank evidence")]
    BlankEvidence { from: String, to: String },
}

/// Multigraph of type nodes. Node order is insertion order and drives every
/// listing, so traversals are reproducible under a fixed seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoryGraph {
    nodes: Vec<TypeNode>,
    index: BTreeMap<String, usize>,
    edges: Vec<RelationshipEdge>,
    root: usize,
}

impl StoryGraph {
    /// A graph holding only its root.
    pub fn new(root: TypeNode) -> Self {
        let mut index = BTreeMap::new();
        index.insert(root.id.clone(), 0);
        StoryGraph {
            nodes: alloc::vec![root],
            index,
            edges: Vec::new(),
            root: 0,
        }
    }

    /// Rebuilds a graph from stored parts, checking every invariant.
    pub fn from_parts(nodes: Vec<TypeNode>, edges: Vec<RelationshipEdge>, root_id: &str) -> Result<Self, GraphError> {
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
        }
        let root = *index
            .get(root_id)
            .ok_or_else(|| GraphError::UnknownNode(root_id.into()))?;
        let mut graph = StoryGraph {
            nodes,
            index,
            edges: Vec::new(),
            root,
        };
        for e in edges {
            graph.add_edge(e)?;
        }
        graph.check_skeleton()?;
        Ok(graph)
    }

    pub fn root_id(&self) -> &str {
        &self.nodes[self.root].id
    }

    pub fn nodes(&self) -> &[TypeNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[RelationshipEdge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&TypeNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn node_mut(&mut self, id: &str) -> Option<&mut TypeNode> {
        self.index.get(id).map(|&i| &mut self.nodes[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    fn require(&self, id: &str) -> Result<(), GraphError> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(id.into()))
        }
    }

    /// Adds a node with no edges. Attach it with [`StoryGraph::add_edge`].
    pub fn add_node(&mut self, node: TypeNode) -> Result<(), GraphError> {
        if self.contains(&node.id) {
            return Err(GraphError::DuplicateNode(node.id));
        }
        self.index.insert(node.id.clone(), self.nodes.len());
        self.nodes.push(node);
        Ok(())
    }

    /// Adds an edge. Structural edges keep the skeleton a tree: no
    /// self-loops, no second parent, nothing into the root.
    pub fn add_edge(&mut self, edge: RelationshipEdge) -> Result<(), GraphError> {
        self.require(&edge.from)?;
        self.require(&edge.to)?;
        match &edge.kind {
            EdgeKind::Structural => {
                if edge.from == edge.to {
                    return Err(GraphError::SelfLoop(edge.from));
                }
                if edge.to == self.root_id() {
                    return Err(GraphError::EdgeIntoRoot(edge.to));
                }
                if self.skeleton_parent_unchecked(&edge.to).is_some() {
                    return Err(GraphError::MultipleParents(edge.to));
                }
            }
            EdgeKind::Functional { evidence, source_node } => {
                if evidence.trim().is_empty() {
                    return Err(GraphError::BlankEvidence {
                        from: edge.from,
                        to: edge.to,
                    });
                }
                self.require(source_node)?;
            }
        }
        self.edges.push(edge);
        Ok(())
    }

    /// Children along outgoing structural edges, in insertion order.
    pub fn skeleton_children(&self, id: &str) -> Result<Vec<&str>, GraphError> {
        self.require(id)?;
        Ok(self
            .edges
            .iter()
            .filter(|e| e.is_structural() && e.from == id)
            .map(|e| e.to.as_str())
            .collect())
    }

    pub fn skeleton_parent(&self, id: &str) -> Result<Option<&str>, GraphError> {
        self.require(id)?;
        Ok(self.skeleton_parent_unchecked(id))
    }

    fn skeleton_parent_unchecked(&self, id: &str) -> Option<&str> {
        self.edges
            .iter()
            .find(|e| e.is_structural() && e.to == id)
            .map(|e| e.from.as_str())
    }

    /// Nodes sharing the parent of `id`, excluding `id` itself.
    pub fn skeleton_siblings(&self, id: &str) -> Result<Vec<&str>, GraphError> {
        Ok(match self.skeleton_parent(id)? {
            Some(p) => self.skeleton_children(p)?.into_iter().filter(|&c| c != id).collect(),
            None => Vec::new(),
        })
    }

    /// A node without skeleton children.
    pub fn is_leaf(&self, id: &str) -> Result<bool, GraphError> {
        self.require(id)?;
        Ok(!self.edges.iter().any(|e| e.is_structural() && e.from == id))
    }

    /// Nodes joined to `id` by a functional edge in either direction,
    /// deduplicated, in edge order.
    pub fn functional_neighbors(&self, id: &str) -> Result<Vec<&str>, GraphError> {
        self.require(id)?;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for e in self.edges.iter().filter(|e| !e.is_structural()) {
            let other = if e.from == id {
                e.to.as_str()
            } else if e.to == id {
                e.from.as_str()
            } else {
                continue;
            };
            if other != id && seen.insert(other) {
                out.push(other);
            }
        }
        Ok(out)
    }

    pub fn functional_edges(&self) -> impl Iterator<Item = &RelationshipEdge> {
        self.edges.iter().filter(|e| !e.is_structural())
    }

    pub fn structural_edges(&self) -> impl Iterator<Item = &RelationshipEdge> {
        self.edges.iter().filter(|e| e.is_structural())
    }

    /// Root-first chain of ancestors ending at `id`.
    pub fn ancestor_path(&self, id: &str) -> Result<Vec<&str>, GraphError> {
        self.require(id)?;
        let mut path = alloc::vec![self.nodes[self.index[id]].id.as_str()];
        let mut cur = id;
        while let Some(p) = self.skeleton_parent_unchecked(cur) {
            if path.len() > self.nodes.len() {
                return Err(GraphError::SkeletonCycle(id.into()));
            }
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Kahn's algorithm over structural edges.
    pub fn topological_order(&self) -> Result<Vec<&str>, GraphError> {
        let mut indegree = alloc::vec![0usize; self.nodes.len()];
        for e in self.structural_edges() {
            indegree[self.index[&e.to]] += 1;
        }
        let mut ready: Vec<usize> = (0..self.nodes.len()).filter(|&i| indegree[i] == 0).rev().collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = ready.pop() {
            order.push(self.nodes[i].id.as_str());
            for e in self.structural_edges().filter(|e| e.from == self.nodes[i].id) {
                let j = self.index[&e.to];
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
        match indegree.iter().position(|&d| d > 0) {
            Some(i) => Err(GraphError::SkeletonCycle(self.nodes[i].id.clone())),
            None => Ok(order),
        }
    }

    /// The skeleton must be acyclic and span every node from the root.
    pub fn check_skeleton(&self) -> Result<(), GraphError> {
        self.topological_order()?;
        for n in &self.nodes {
            if self.ancestor_path(&n.id)?[0] != self.root_id() {
                return Err(GraphError::Unreachable(n.id.clone()));
            }
        }
        Ok(())
    }
}

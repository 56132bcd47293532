//! Story-graph foraging in three steps.
//!
//! 1. [`build_skeleton`]: one node per structure type, one structural edge
//!    per parent link, local texts attached.
//! 2. [`forage_descriptions`]: ask description providers (remote
//!    repositories) for more text; nodes left without any get a fallback
//!    marker.
//! 3. [`forage_functional_edges`]: split every text into sentences and add
//!    an edge from the text's owner to every other structure it names.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::{Description, DescriptionSource, EdgeKind, RelationshipEdge, StoryGraph, TypeNode};
use crate::model::{StructuralModel, StructureType};
use crate::text::{detect_keywords, split_sentences, KeywordIndex};

/// Model-supplied texts of a type, trimmed, blanks dropped.
pub fn local_lookup(structure: &StructureType) -> Vec<String> {
    structure
        .local_descriptions
        .iter()
        .map(|d| d.trim())
        .filter(|d| !d.is_empty())
        .map(String::from)
        .collect()
}

fn node_for(structure: &StructureType) -> TypeNode {
    let names = core::iter::once(structure.name.as_str()).chain(structure.alt_names.iter().map(String::as_str));
    let mut node = TypeNode::new(structure.id.clone(), names)
        .or_else(|| TypeNode::new(structure.id.clone(), [structure.id.as_str()]))
        .expect("type id is never blank");
    for text in local_lookup(structure) {
        node.add_description(Description::local(&text).expect("non-blank"));
    }
    node
}

/// Nodes follow the model's type order; structural edges are added
/// parent-first so children keep document order.
pub fn build_skeleton(model: &StructuralModel) -> StoryGraph {
    let root = model.get_type(model.root_id()).expect("model root exists");
    let mut graph = StoryGraph::new(node_for(root));
    for t in model.types() {
        if t.id != model.root_id() {
            graph.add_node(node_for(t)).expect("type ids are unique");
        }
    }
    let mut stack = alloc::vec![model.root_id()];
    while let Some(parent) = stack.pop() {
        let children = model.children_of(parent);
        for child in &children {
            graph
                .add_edge(RelationshipEdge::structural(parent, *child))
                .expect("model parent relation is a tree");
        }
        stack.extend(children.into_iter().rev());
    }
    graph
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProviderOutcome {
    Hit(Description),
    Miss,
    /// Transport trouble; the node falls through to the next provider.
    Failed(String),
}

/// A source of descriptions for story nodes, consulted in priority order.
pub trait DescriptionProvider {
    fn name(&self) -> &str;
    fn describe(&self, node: &TypeNode) -> ProviderOutcome;
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProviderFailure {
    pub node: String,
    pub provider: String,
    pub detail: String,
}

/// What step 2 did, for summaries and logs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForagingReport {
    pub with_local: usize,
    pub remote_hits: usize,
    pub misses: usize,
    pub fallbacks: usize,
    pub failures: Vec<ProviderFailure>,
}

/// Every node is offered to the providers in order and keeps the
/// first hit. Previously foraged entries are replaced, local ones kept.
/// Afterwards every node has at least one description.
pub fn forage_descriptions(graph: &mut StoryGraph, providers: &[&dyn DescriptionProvider]) -> ForagingReport {
    let mut report = ForagingReport::default();
    let ids: Vec<String> = graph.nodes().iter().map(|n| n.id.clone()).collect();
    for id in ids {
        let node = graph.node_mut(&id).expect("id taken from graph");
        node.clear_foraged();
        if node.has_text() {
            report.with_local += 1;
        }
        let mut hit = None;
        for provider in providers {
            match provider.describe(node) {
                ProviderOutcome::Hit(d) => {
                    hit = Some(d);
                    break;
                }
                ProviderOutcome::Miss => report.misses += 1,
                ProviderOutcome::Failed(detail) => report.failures.push(ProviderFailure {
                    node: id.clone(),
                    provider: provider.name().into(),
                    detail,
                }),
            }
        }
        if let Some(d) = hit {
            report.remote_hits += 1;
            node.add_description(d);
        }
        if !node.has_text() {
            report.fallbacks += 1;
            node.add_description(Description::fallback());
        }
    }
    report
}

/// For each node, each sentence of its local and remote texts, and
/// each other node named there, adds `owner -> named` with the sentence as
/// evidence. Repeated (owner, named, sentence) triples are skipped, so a
/// second run adds nothing. Returns the number of edges added.
pub fn forage_functional_edges(graph: &mut StoryGraph) -> usize {
    let index = KeywordIndex::from_graph(graph);
    let mut seen: BTreeSet<(String, String, String)> = graph
        .functional_edges()
        .map(|e| (e.from.clone(), e.to.clone(), e.evidence().unwrap_or_default().into()))
        .collect();

    let mut pending = Vec::new();
    for node in graph.nodes() {
        for d in node.descriptions() {
            if !matches!(d.source, DescriptionSource::Local | DescriptionSource::Remote { .. }) {
                continue;
            }
            for sentence in split_sentences(&d.text) {
                for target in detect_keywords(&sentence, &index) {
                    if target == node.id {
                        continue;
                    }
                    let key = (node.id.clone(), target, sentence.clone());
                    if seen.insert(key.clone()) {
                        pending.push(key);
                    }
                }
            }
        }
    }

    let added = pending.len();
    for (from, to, evidence) in pending {
        graph
            .add_edge(RelationshipEdge {
                kind: EdgeKind::Functional {
                    evidence,
                    source_node: from.clone(),
                },
                from,
                to,
            })
            .expect("endpoints come from the graph");
    }
    added
}

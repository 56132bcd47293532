//! Story-graph document: `nodes`, `edges` and `root`.

use molecumentary_core::graph::{Description, DescriptionSource, EdgeKind, RelationshipEdge, StoryGraph, TypeNode};
use serde::{Deserialize, Serialize};

use crate::DocError;

#[derive(Debug, Serialize, Deserialize)]
struct GraphDoc {
    root: String,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: String,
    names: Vec<String>,
    #[serde(default)]
    descriptions: Vec<DescriptionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
enum DescriptionDoc {
    Local {
        text: String,
    },
    Remote {
        text: String,
        repository: String,
        url: String,
        language: String,
    },
    Fallback,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum EdgeKindDoc {
    Structural,
    Functional,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    from: String,
    to: String,
    kind: EdgeKindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    evidence: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source_node: Option<String>,
}

pub fn serialize_graph(graph: &StoryGraph) -> String {
    let doc = GraphDoc {
        root: graph.root_id().into(),
        nodes: graph
            .nodes()
            .iter()
            .map(|n| NodeDoc {
                id: n.id.clone(),
                names: n.names().to_vec(),
                descriptions: n
                    .descriptions()
                    .iter()
                    .map(|d| match &d.source {
                        DescriptionSource::Local => DescriptionDoc::Local { text: d.text.clone() },
                        DescriptionSource::Remote {
                            repository,
                            url,
                            language,
                        } => DescriptionDoc::Remote {
                            text: d.text.clone(),
                            repository: repository.clone(),
                            url: url.clone(),
                            language: language.clone(),
                        },
                        DescriptionSource::Fallback => DescriptionDoc::Fallback,
                    })
                    .collect(),
            })
            .collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| match &e.kind {
                EdgeKind::Structural => EdgeDoc {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    kind: EdgeKindDoc::Structural,
                    evidence: None,
                    source_node: None,
                },
                EdgeKind::Functional { evidence, source_node } => EdgeDoc {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    kind: EdgeKindDoc::Functional,
                    evidence: Some(evidence.clone()),
                    source_node: Some(source_node.clone()),
                },
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("graph serializes");
    out.push('\n');
    out
}

pub fn parse_graph(bytes: &[u8]) -> Result<StoryGraph, DocError> {
    let doc: GraphDoc = serde_json::from_slice(bytes)?;
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for n in doc.nodes {
        let mut node = TypeNode::new(n.id.clone(), &n.names)
            .ok_or_else(|| DocError::Invalid(format!("node `{}` has no usable name", n.id)))?;
        for d in n.descriptions {
            let description = match d {
                DescriptionDoc::Local { text } => Description::local(&text),
                DescriptionDoc::Remote {
                    text,
                    repository,
                    url,
                    language,
                } => Description::remote(&text, &repository, &url, &language),
                DescriptionDoc::Fallback => Some(Description::fallback()),
            }
            .ok_or_else(|| DocError::Invalid(format!("node `{}` has a blank description", n.id)))?;
            node.add_description(description);
        }
        nodes.push(node);
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in doc.edges {
        let edge = match e.kind {
            EdgeKindDoc::Structural => RelationshipEdge::structural(e.from, e.to),
            EdgeKindDoc::Functional => {
                let evidence = e.evidence.unwrap_or_default();
                let source_node = e.source_node.unwrap_or_else(|| e.from.clone());
                RelationshipEdge {
                    from: e.from,
                    to: e.to,
                    kind: EdgeKind::Functional { evidence, source_node },
                }
            }
        };
        edges.push(edge);
    }
    StoryGraph::from_parts(nodes, edges, &doc.root).map_err(|e| DocError::Invalid(e.to_string()))
}

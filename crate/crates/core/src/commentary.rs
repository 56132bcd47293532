//! Template commentary.
//!
//! Structural commentary describes what a composite is made of, descriptive
//! commentary reads a node's best description, navigational commentary
//! narrates a transition. Templates use five variables: `$name`,
//! `$siblings`, `$children`, `$parent` and `$previous`.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::{GraphError, StoryGraph};

/// Names listed before a long list is cut short with "and others".
pub const LIST_LIMIT: usize = 3;
pub const DEFAULT_WPM: f64 = 150.0;
pub const DEFAULT_MIN_SCENE_SECONDS: f64 = 4.0;

const DEFAULT_TEMPLATES: &str = include_str!("../data/templates.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CommentaryKind {
    Structural,
    Descriptive,
    Navigational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommentaryError {
    #[error("unknown template variable `${0}`")]
    UnknownVariable(String),
    #[error("variable `${0}` has no value here")]
    Unresolvable(&'static str),
    #[error("line {line}: {reason}")]
    TemplateFile { line: usize, reason: String },
    #[error("template section `{0}` is empty")]
    EmptySection(&'static str),
    #[error("no {0} template can be resolved")]
    NoTemplate(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variable {
    Name,
    Siblings,
    Children,
    Parent,
    Previous,
}

impl Variable {
    fn parse(word: &str) -> Option<Self> {
        Some(match word {
            "name" => Variable::Name,
            "siblings" => Variable::Siblings,
            "children" => Variable::Children,
            "parent" => Variable::Parent,
            "previous" => Variable::Previous,
            _ => return None,
        })
    }

    fn label(self) -> &'static str {
        match self {
            Variable::Name => "name",
            Variable::Siblings => "siblings",
            Variable::Children => "children",
            Variable::Parent => "parent",
            Variable::Previous => "previous",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece<'a> {
    Text(&'a str),
    Var(Variable),
}

fn parse_template(template: &str) -> Result<Vec<Piece<'_>>, CommentaryError> {
    let mut pieces = Vec::new();
    let mut rest = template;
    while let Some(at) = rest.find('$') {
        if at > 0 {
            pieces.push(Piece::Text(&rest[..at]));
        }
        let after = &rest[at + 1..];
        let len = after
            .find(|c: char| !(c.is_ascii_lowercase() || c == '_'))
            .unwrap_or(after.len());
        let word = &after[..len];
        let var = Variable::parse(word).ok_or_else(|| CommentaryError::UnknownVariable(word.into()))?;
        pieces.push(Piece::Var(var));
        rest = &after[len..];
    }
    if !rest.is_empty() {
        pieces.push(Piece::Text(rest));
    }
    Ok(pieces)
}

/// Values for the template variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplateContext {
    pub name: String,
    /// Other children of the parent, never the node itself.
    pub siblings: Vec<String>,
    pub children: Vec<String>,
    pub parent: Option<String>,
    pub previous: Option<String>,
}

impl TemplateContext {
    /// Hierarchy around `node`, display names throughout.
    pub fn for_node(graph: &StoryGraph, node: &str) -> Result<Self, GraphError> {
        let name_of = |id: &str| graph.node(id).map(|n| String::from(n.name())).unwrap_or_default();
        Ok(TemplateContext {
            name: name_of(node),
            siblings: graph.skeleton_siblings(node)?.into_iter().map(name_of).collect(),
            children: graph.skeleton_children(node)?.into_iter().map(name_of).collect(),
            parent: graph.skeleton_parent(node)?.map(name_of),
            previous: None,
        })
    }

    fn resolvable(&self, var: Variable) -> bool {
        match var {
            Variable::Name => !self.name.is_empty(),
            Variable::Siblings => !self.siblings.is_empty(),
            Variable::Children => !self.children.is_empty(),
            Variable::Parent => self.parent.is_some(),
            Variable::Previous => self.previous.is_some(),
        }
    }
}

/// Parsed template sections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    pub structural: Vec<String>,
    pub navigational: Vec<String>,
}

impl Default for TemplateSet {
    fn default() -> Self {
        TemplateSet::parse(DEFAULT_TEMPLATES).expect("bundled templates parse")
    }
}

impl TemplateSet {
    /// Reads the plain-text format: `[structural]` and `[navigational]`
    /// section headers, one template per line, `#` comments, blank lines
    /// ignored.
    pub fn parse(text: &str) -> Result<Self, CommentaryError> {
        #[derive(Clone, Copy)]
        enum Section {
            None,
            Structural,
            Navigational,
        }
        let mut section = Section::None;
        let mut set = TemplateSet {
            structural: Vec::new(),
            navigational: Vec::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                section = match line {
                    "[structural]" => Section::Structural,
                    "[navigational]" => Section::Navigational,
                    other => {
                        return Err(CommentaryError::TemplateFile {
                            line: i + 1,
                            reason: alloc::format!("unknown section {other}"),
                        })
                    }
                };
                continue;
            }
            parse_template(line).map_err(|e| CommentaryError::TemplateFile {
                line: i + 1,
                reason: alloc::format!("{e}"),
            })?;
            match section {
                Section::Structural => set.structural.push(line.into()),
                Section::Navigational => set.navigational.push(line.into()),
                Section::None => {
                    return Err(CommentaryError::TemplateFile {
                        line: i + 1,
                        reason: "template outside of a section".into(),
                    })
                }
            }
        }
        if set.structural.is_empty() {
            return Err(CommentaryError::EmptySection("structural"));
        }
        if set.navigational.is_empty() {
            return Err(CommentaryError::EmptySection("navigational"));
        }
        Ok(set)
    }
}

/// Joins names as `A`, `A and B` or `A, B, and C`.
fn join_names(names: &[&str]) -> String {
    match names {
        [] => String::new(),
        [a] => String::from(*a),
        [a, b] => alloc::format!("{a} and {b}"),
        [init @ .., last] => alloc::format!("{}, and {last}", init.join(", ")),
    }
}

/// Lists up to three names. Longer lists name a random pair, in list order,
/// and close with "and others".
fn expand_list<R: Rng + ?Sized>(items: &[String], rng: &mut R) -> String {
    if items.len() <= LIST_LIMIT {
        let names: Vec<&str> = items.iter().map(String::as_str).collect();
        return join_names(&names);
    }
    let keep = LIST_LIMIT - 1;
    let mut order: Vec<usize> = (0..items.len()).collect();
    for i in 0..keep {
        let j = rng.random_range(i..order.len());
        order.swap(i, j);
    }
    let mut picked = order[..keep].to_vec();
    picked.sort_unstable();
    let names: Vec<&str> = picked.iter().map(|&i| items[i].as_str()).collect();
    alloc::format!("{} and others", join_names(&names))
}

/// Substitutes every variable. A template ending in a variable gets a
/// closing period; anything else is kept verbatim.
pub fn expand_template<R: Rng + ?Sized>(
    template: &str,
    ctx: &TemplateContext,
    rng: &mut R,
) -> Result<String, CommentaryError> {
    let pieces = parse_template(template)?;
    if let Some(var) = pieces.iter().find_map(|p| match p {
        Piece::Var(v) if !ctx.resolvable(*v) => Some(*v),
        _ => None,
    }) {
        return Err(CommentaryError::Unresolvable(var.label()));
    }
    let mut out = String::new();
    for piece in &pieces {
        match piece {
            Piece::Text(t) => out.push_str(t),
            Piece::Var(Variable::Name) => out.push_str(&ctx.name),
            Piece::Var(Variable::Parent) => out.push_str(ctx.parent.as_deref().unwrap_or_default()),
            Piece::Var(Variable::Previous) => out.push_str(ctx.previous.as_deref().unwrap_or_default()),
            Piece::Var(Variable::Children) => out.push_str(&expand_list(&ctx.children, rng)),
            Piece::Var(Variable::Siblings) => out.push_str(&expand_list(&ctx.siblings, rng)),
        }
    }
    if matches!(pieces.last(), Some(Piece::Var(_))) {
        out.push('.');
    }
    Ok(out)
}

fn is_resolvable(template: &str, ctx: &TemplateContext) -> bool {
    parse_template(template).is_ok_and(|pieces| {
        pieces.iter().all(|p| match p {
            Piece::Var(v) => ctx.resolvable(*v),
            Piece::Text(_) => true,
        })
    })
}

/// Picks uniformly among the templates `ctx` can fill, then expands it.
pub fn expand_random<R: Rng + ?Sized>(
    templates: &[String],
    ctx: &TemplateContext,
    rng: &mut R,
    section: &'static str,
) -> Result<String, CommentaryError> {
    let usable: Vec<&String> = templates.iter().filter(|t| is_resolvable(t, ctx)).collect();
    if usable.is_empty() {
        return Err(CommentaryError::NoTemplate(section));
    }
    let pick = usable[rng.random_range(0..usable.len())];
    expand_template(pick, ctx, rng)
}

/// What `node` is made of, or where it belongs.
pub fn structural_commentary<R: Rng + ?Sized>(
    node: &str,
    graph: &StoryGraph,
    templates: &TemplateSet,
    rng: &mut R,
) -> Result<String, CommentaryError> {
    let ctx = TemplateContext::for_node(graph, node)?;
    expand_random(&templates.structural, &ctx, rng, "structural")
}

/// The node's best description verbatim, or structural commentary when it
/// only has a fallback marker.
pub fn descriptive_commentary<R: Rng + ?Sized>(
    node: &str,
    graph: &StoryGraph,
    templates: &TemplateSet,
    rng: &mut R,
) -> Result<String, CommentaryError> {
    let n = graph.node(node).ok_or_else(|| GraphError::UnknownNode(node.into()))?;
    match n.descriptions().first() {
        Some(d) if !d.is_fallback() => Ok(d.text.clone()),
        _ => structural_commentary(node, graph, templates, rng),
    }
}

/// Narration for a move from `previous` (if any) to `node`.
pub fn navigational_commentary<R: Rng + ?Sized>(
    node: &str,
    previous: Option<&str>,
    graph: &StoryGraph,
    templates: &TemplateSet,
    rng: &mut R,
) -> Result<String, CommentaryError> {
    let mut ctx = TemplateContext::for_node(graph, node)?;
    ctx.previous = match previous {
        Some(p) if p != node => Some(
            graph
                .node(p)
                .ok_or_else(|| GraphError::UnknownNode(p.into()))?
                .name()
                .into(),
        ),
        _ => None,
    };
    expand_random(&templates.navigational, &ctx, rng, "navigational")
}

/// Speaking time of `text` at `wpm`, never below `min_seconds`.
pub fn estimate_duration(text: &str, wpm: f64, min_seconds: f64) -> f64 {
    let words = text.split_whitespace().count() as f64;
    (words / wpm * 60.0).max(min_seconds)
}

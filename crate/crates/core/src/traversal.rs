//! Narratory traversal: a stack of skeleton nodes plus an options pool.
//!
//! The top of the stack is the current level in the hierarchy. The pool
//! holds its parent, its children and its functional neighbours. The next
//! node is drawn among the least recently visited pool members, weighted by
//! a priority that favours inner nodes over leaves.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::{GraphError, StoryGraph};
use crate::{seeded_rng, SceneRng};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraversalConfig {
    /// Priority of skeleton leaves.
    pub p_lower: f64,
    /// Priority of inner nodes.
    pub p_higher: f64,
    pub seed: u64,
    /// Manual per-node priorities, replacing the leaf/inner rule.
    #[cfg_attr(feature = "serde", serde(default))]
    pub overrides: BTreeMap<String, f64>,
}

impl Default for TraversalConfig {
    fn default() -> Self {
        TraversalConfig {
            p_lower: 1.0,
            p_higher: 2.0,
            seed: 0,
            overrides: BTreeMap::new(),
        }
    }
}

impl TraversalConfig {
    pub fn validate(&self) -> Result<(), TraversalError> {
        let ok = |p: f64| p > 0.0 && p.is_finite();
        if !ok(self.p_lower) {
            return Err(TraversalError::InvalidPriority("p_lower".into(), self.p_lower));
        }
        if !ok(self.p_higher) {
            return Err(TraversalError::InvalidPriority("p_higher".into(), self.p_higher));
        }
        for (id, &p) in &self.overrides {
            if !ok(p) {
                return Err(TraversalError::InvalidPriority(id.clone(), p));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraversalError {
    #[error("priority `{0}` must be positive and finite, got {1}")]
    InvalidPriority(String, f64),
    #[error("options pool is empty")]
    EmptyPool,
    #[error("`{0}` is not in the current options pool")]
    NotInPool(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Mutable walk state, owned by one synthesis run.
#[derive(Debug, Clone)]
pub struct TraversalState {
    stack: Vec<String>,
    visited_times: BTreeMap<String, u64>,
    clock: u64,
    rng: SceneRng,
    config: TraversalConfig,
}

impl PartialEq for TraversalState {
    fn eq(&self, other: &Self) -> bool {
        self.stack == other.stack
            && self.visited_times == other.visited_times
            && self.clock == other.clock
            && self.rng == other.rng
            && self.config == other.config
    }
}

impl TraversalState {
    /// Stack holds the root, nothing has been visited, clock at zero.
    pub fn init(graph: &StoryGraph, config: TraversalConfig) -> Result<Self, TraversalError> {
        config.validate()?;
        Ok(TraversalState {
            stack: alloc::vec![graph.root_id().into()],
            visited_times: graph.nodes().iter().map(|n| (n.id.clone(), 0)).collect(),
            clock: 0,
            rng: seeded_rng(config.seed),
            config,
        })
    }

    /// Bottom to top.
    pub fn stack(&self) -> &[String] {
        &self.stack
    }

    pub fn top(&self) -> &str {
        self.stack.last().expect("stack always holds the root")
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    /// Step at which `id` was last selected; 0 means never.
    pub fn visit_time(&self, id: &str) -> u64 {
        self.visited_times.get(id).copied().unwrap_or(0)
    }

    pub fn visited_times(&self) -> &BTreeMap<String, u64> {
        &self.visited_times
    }

    /// Marks every node as never visited. The clock and generator keep going.
    pub fn reset_visits(&mut self) {
        for t in self.visited_times.values_mut() {
            *t = 0;
        }
    }

    pub fn config(&self) -> &TraversalConfig {
        &self.config
    }

    pub fn priority(&self, graph: &StoryGraph, id: &str) -> Result<f64, TraversalError> {
        if let Some(&p) = self.config.overrides.get(id) {
            return Ok(p);
        }
        Ok(if graph.is_leaf(id)? {
            self.config.p_lower
        } else {
            self.config.p_higher
        })
    }
}

/// Parent, then children, then functional neighbours of the stack top,
/// without repeats and without the top itself.
pub fn options_pool(graph: &StoryGraph, state: &TraversalState) -> Result<Vec<String>, TraversalError> {
    let top = state.top();
    let mut pool: Vec<String> = Vec::new();
    let parent = graph.skeleton_parent(top)?;
    let children = graph.skeleton_children(top)?;
    let functional = graph.functional_neighbors(top)?;
    for id in parent.into_iter().chain(children).chain(functional) {
        if id != top && !pool.iter().any(|p| p == id) {
            pool.push(id.into());
        }
    }
    Ok(pool)
}

/// Picks the next node among the least recently visited pool members with
/// probability proportional to priority, then stamps it with the advanced
/// clock. Draws exactly one number from the generator.
pub fn select_next(graph: &StoryGraph, state: &mut TraversalState) -> Result<String, TraversalError> {
    let pool = options_pool(graph, state)?;
    let oldest = pool
        .iter()
        .map(|id| state.visit_time(id))
        .min()
        .ok_or(TraversalError::EmptyPool)?;
    let candidates: Vec<&String> = pool.iter().filter(|id| state.visit_time(id) == oldest).collect();

    let mut priorities = Vec::with_capacity(candidates.len());
    for c in &candidates {
        priorities.push(state.priority(graph, c)?);
    }
    let range: f64 = priorities.iter().sum();

    // uniform on (0, range]
    let draw = range * (1.0 - state.rng.random::<f64>());
    let mut chosen = candidates[candidates.len() - 1];
    let mut sum = 0.0;
    for (c, p) in candidates.iter().zip(&priorities) {
        let (low, high) = (sum, sum + p);
        sum = high;
        if low < draw && draw <= high {
            chosen = c;
            break;
        }
    }

    state.clock += 1;
    state.visited_times.insert(chosen.clone(), state.clock);
    Ok(chosen.clone())
}

/// Updates the stack after `selected` was shown: selecting the parent of the
/// top pops (backtracking), selecting an inner node dives into it, selecting
/// a leaf leaves the stack alone.
///
/// An inner node reached sideways through a functional edge replaces the
/// stack with its own ancestor chain, so the stack always stays a root path.
pub fn advance(graph: &StoryGraph, state: &mut TraversalState, selected: &str) -> Result<(), TraversalError> {
    let pool = options_pool(graph, state)?;
    if !pool.iter().any(|p| p == selected) {
        return Err(TraversalError::NotInPool(selected.into()));
    }
    let top = state.top();
    if graph.skeleton_parent(top)? == Some(selected) {
        state.stack.pop();
    } else if !graph.is_leaf(selected)? {
        if graph.skeleton_parent(selected)? == Some(top) {
            state.stack.push(selected.into());
        } else {
            state.stack = graph.ancestor_path(selected)?.into_iter().map(String::from).collect();
        }
    }
    Ok(())
}

/// [`select_next`] followed by [`advance`].
pub fn step(graph: &StoryGraph, state: &mut TraversalState) -> Result<String, TraversalError> {
    let next = select_next(graph, state)?;
    advance(graph, state, &next)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{RelationshipEdge, TypeNode};
    use crate::sample;
    use alloc::vec;

    fn node(id: &str) -> TypeNode {
        TypeNode::new(id, [id]).unwrap()
    }

    /// root -> {a (leaf), b (inner) -> b1, c (leaf)}
    fn abc_graph() -> StoryGraph {
        let mut g = StoryGraph::new(node("root"));
        for id in ["a", "b", "c", "b1"] {
            g.add_node(node(id)).unwrap();
        }
        for (p, c) in [("root", "a"), ("root", "b"), ("root", "c"), ("b", "b1")] {
            g.add_edge(RelationshipEdge::structural(p, c)).unwrap();
        }
        g
    }

    #[test]
    fn init_on_hiv() {
        let g = sample::hiv_skeleton();
        let s = TraversalState::init(&g, TraversalConfig::default()).unwrap();
        assert_eq!(s.stack(), ["hiv-plasma"]);
        assert_eq!(s.visited_times().len(), 6);
        assert!(s.visited_times().values().all(|&t| t == 0));
        assert_eq!(s.clock(), 0);
        assert_eq!(s, TraversalState::init(&g, TraversalConfig::default()).unwrap());
    }

    #[test]
    fn init_rejects_bad_priorities() {
        let g = sample::hiv_skeleton();
        let cfg = TraversalConfig {
            p_lower: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            TraversalState::init(&g, cfg),
            Err(TraversalError::InvalidPriority(..))
        ));
    }

    #[test]
    fn pool_unions_parent_children_and_functional() {
        let mut g = sample::hiv_skeleton();
        g.add_edge(RelationshipEdge::functional(
            "capsid",
            "rna",
            "The capsid protects the RNA.",
        ))
        .unwrap();
        let mut s = TraversalState::init(&g, TraversalConfig::default()).unwrap();
        s.stack = vec!["hiv-plasma".into(), "hiv".into(), "capsid".into()];
        assert_eq!(options_pool(&g, &s).unwrap(), vec!["hiv", "rna", "rt"]);

        s.stack = vec!["hiv-plasma".into()];
        assert_eq!(options_pool(&g, &s).unwrap(), vec!["hiv", "plasma"]);
    }

    #[test]
    fn isolated_leaf_sees_only_root() {
        let mut g = StoryGraph::new(node("r"));
        g.add_node(node("x")).unwrap();
        g.add_edge(RelationshipEdge::structural("r", "x")).unwrap();
        let mut s = TraversalState::init(&g, TraversalConfig::default()).unwrap();
        s.stack.push("x".into());
        assert_eq!(options_pool(&g, &s).unwrap(), vec!["r"]);
    }

    #[test]
    fn single_option_is_taken_and_stamped() {
        let mut g = StoryGraph::new(node("r"));
        g.add_node(node("x")).unwrap();
        g.add_edge(RelationshipEdge::structural("r", "x")).unwrap();
        let mut s = TraversalState::init(&g, TraversalConfig::default()).unwrap();
        assert_eq!(select_next(&g, &mut s).unwrap(), "x");
        assert_eq!(s.visit_time("x"), 1);
        assert_eq!(s.clock(), 1);
    }

    #[test]
    fn empty_pool_is_an_error() {
        let g = StoryGraph::new(node("alone"));
        let mut s = TraversalState::init(&g, TraversalConfig::default()).unwrap();
        assert_eq!(select_next(&g, &mut s), Err(TraversalError::EmptyPool));
    }

    #[test]
    fn recently_visited_option_is_filtered() {
        let g = abc_graph();
        let mut s = TraversalState::init(&g, TraversalConfig::default()).unwrap();
        s.clock = 5;
        s.visited_times.insert("c".into(), 3);
        let n = 100_000;
        let mut inner = 0;
        for _ in 0..n {
            let pick = select_next(&g, &mut s).unwrap();
            assert_ne!(pick, "c");
            if pick == "b" {
                inner += 1;
            }
            for id in ["a", "b"] {
                s.visited_times.insert(id.into(), 0);
            }
            s.visited_times.insert("c".into(), 3);
        }
        let freq = inner as f64 / n as f64;
        assert!((0.65..=0.68).contains(&freq), "inner frequency {freq}");
    }

    #[test]
    fn overrides_replace_leaf_rule() {
        let g = abc_graph();
        let cfg = TraversalConfig {
            overrides: [("a".into(), 7.5)].into_iter().collect(),
            ..Default::default()
        };
        let s = TraversalState::init(&g, cfg).unwrap();
        assert_eq!(s.priority(&g, "a").unwrap(), 7.5);
        assert_eq!(s.priority(&g, "c").unwrap(), 1.0);
        assert_eq!(s.priority(&g, "b").unwrap(), 2.0);
    }

    #[test]
    fn advance_pushes_pops_and_ignores_leaves() {
        let g = sample::hiv_skeleton();
        let mut s = TraversalState::init(&g, TraversalConfig::default()).unwrap();
        advance(&g, &mut s, "hiv").unwrap();
        assert_eq!(s.stack(), ["hiv-plasma", "hiv"]);
        advance(&g, &mut s, "hiv-plasma").unwrap();
        assert_eq!(s.stack(), ["hiv-plasma"]);

        s.stack = vec!["hiv-plasma".into(), "hiv".into(), "capsid".into()];
        advance(&g, &mut s, "rna").unwrap();
        assert_eq!(s.stack(), ["hiv-plasma", "hiv", "capsid"]);

        assert_eq!(
            advance(&g, &mut s, "plasma"),
            Err(TraversalError::NotInPool("plasma".into()))
        );
    }

    #[test]
    fn sideways_jump_to_inner_node_keeps_root_path() {
        let mut g = sample::hiv_skeleton();
        g.add_edge(RelationshipEdge::functional(
            "plasma",
            "capsid",
            "Plasma surrounds the capsid.",
        ))
        .unwrap();
        let mut s = TraversalState::init(&g, TraversalConfig::default()).unwrap();
        s.stack = vec!["hiv-plasma".into(), "plasma".into()];
        advance(&g, &mut s, "capsid").unwrap();
        assert_eq!(s.stack(), ["hiv-plasma", "hiv", "capsid"]);
    }

    #[test]
    fn same_seed_same_walk() {
        let g = sample::hiv_skeleton();
        let walk = |seed| {
            let mut s = TraversalState::init(
                &g,
                TraversalConfig {
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            (0..50).map(|_| step(&g, &mut s).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(walk(9), walk(9));
    }

    #[test]
    fn selected_node_was_among_the_oldest() {
        let g = sample::hiv_skeleton();
        let mut s = TraversalState::init(
            &g,
            TraversalConfig {
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap();
        for _ in 0..200 {
            let before = s.clone();
            let pool = options_pool(&g, &s).unwrap();
            let oldest = pool.iter().map(|p| before.visit_time(p)).min().unwrap();
            let next = select_next(&g, &mut s).unwrap();
            assert_eq!(before.visit_time(&next), oldest);
            assert_eq!(s.visit_time(&next), before.clock() + 1);
            advance(&g, &mut s, &next).unwrap();
        }
    }
}

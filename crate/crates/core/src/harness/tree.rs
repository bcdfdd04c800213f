//! Computation trees and an upward-only message-passing evaluator on them.
//!
//! Levels are counted from the root: variable nodes sit on even levels
//! `0, 2, ..., 2L` and check nodes on odd levels. For a tree of depth `L`
//! (check layers), the root's a-posteriori value after `L` iterations only
//! depends on upward messages, so downward messages are never computed. A
//! variable node on level `2k` contributes its message of iteration `L - k`.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::HarnessError;
use crate::code::TannerGraph;
use crate::decoder::{apply_correction, check_update_ms, check_update_sp, scms_filter, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Variable,
    Check,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub kind: NodeKind,
    /// Graph node this copies (variable or check index).
    pub origin: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Check layers between this node and the root.
    pub layer: usize,
    /// Channel LLR; 0 for check nodes.
    pub llr: f64,
}

/// Rooted tree stored as an arena; node 0 is the root variable node and
/// children always have larger indices than their parent.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputationTree {
    nodes: Vec<TreeNode>,
    depth: usize,
}

impl ComputationTree {
    pub fn root_only(origin: usize, llr: f64) -> Self {
        Self {
            nodes: vec![TreeNode {
                kind: NodeKind::Variable,
                origin,
                parent: None,
                children: Vec::new(),
                layer: 0,
                llr,
            }],
            depth: 0,
        }
    }

    fn push(&mut self, parent: usize, kind: NodeKind, origin: usize, llr: f64) -> usize {
        let layer = self.nodes[parent].layer + usize::from(kind == NodeKind::Check);
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            kind,
            origin,
            parent: Some(parent),
            children: Vec::new(),
            layer,
            llr,
        });
        self.nodes[parent].children.push(id);
        self.depth = self.depth.max(layer);
        id
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of iterations the tree represents.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Overrides the number of iterations; pruning may leave the deepest
    /// layers empty without changing which iteration the root reads.
    fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn root_llr(&self) -> f64 {
        self.nodes[0].llr
    }

    /// Sets every variable node's LLR from its origin.
    pub fn assign_llrs(&mut self, gamma: &[f64]) {
        for node in &mut self.nodes {
            if node.kind == NodeKind::Variable {
                node.llr = gamma[node.origin];
            }
        }
    }

    /// Root and leaves are variable nodes, and kinds alternate.
    pub fn is_well_formed(&self) -> bool {
        let alternate = self.nodes.iter().enumerate().all(|(id, n)| {
            n.children.iter().all(|&c| {
                let child = &self.nodes[c];
                c > id && child.kind != n.kind && child.parent == Some(id)
            })
        });
        let leaves_ok = self
            .nodes
            .iter()
            .all(|n| !n.children.is_empty() || n.kind == NodeKind::Variable);
        self.nodes[0].kind == NodeKind::Variable && alternate && leaves_ok
    }
}

/// Unrolls `graph` from variable `root` for `depth` iterations. With
/// `exclude = Some(m)` the root's edge to check `m` is left out, giving the
/// tree of the message from `root` to `m`; otherwise the tree of the
/// a-posteriori value. Children follow the graph's adjacency order.
pub fn unroll_tree(
    graph: &TannerGraph,
    root: usize,
    exclude: Option<usize>,
    depth: usize,
    gamma: &[f64],
) -> Result<ComputationTree, HarnessError> {
    if root >= graph.n() || gamma.len() != graph.n() {
        return Err(HarnessError::InvalidRequest(format!(
            "root {root} or LLR length {} does not fit a graph with {} variables",
            gamma.len(),
            graph.n()
        )));
    }
    let mut tree = ComputationTree::root_only(root, gamma[root]);
    // (tree id, graph variable, check to skip)
    let mut frontier = vec![(0usize, root, exclude)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (vid, v, skip) in frontier {
            for &c in graph.var_neighbors(v) {
                if Some(c) == skip {
                    continue;
                }
                let cid = tree.push(vid, NodeKind::Check, c, 0.0);
                for &w in graph.chk_neighbors(c) {
                    if w == v {
                        continue;
                    }
                    let wid = tree.push(cid, NodeKind::Variable, w, gamma[w]);
                    next.push((wid, w, Some(c)));
                }
            }
        }
        frontier = next;
    }
    Ok(tree.with_depth(depth))
}

/// Upward messages of a tree run. `alpha[t][id]` is variable node `id`'s
/// message to its parent after iteration `t` (`t = 0` is the channel LLR);
/// `beta[t][id]` is check node `id`'s message at iteration `t`. Entries for
/// nodes of the other kind are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeRun {
    pub root: f64,
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
}

fn check_message(incoming: &[f64], variant: &Variant) -> f64 {
    match variant {
        Variant::SumProduct => check_update_sp(incoming, 30.0).expect("nonempty"),
        _ => apply_correction(check_update_ms(incoming).expect("nonempty"), variant),
    }
}

/// Runs the decoder on the tree for `tree.depth()` iterations and returns
/// the root's a-posteriori value with all upward messages.
pub fn tree_run(tree: &ComputationTree, variant: &Variant) -> TreeRun {
    let l = tree.depth();
    let size = tree.len();
    let scms = *variant == Variant::SelfCorrected;
    let mut alpha = vec![vec![0.0; size]; l + 1];
    let mut beta = vec![vec![0.0; size]; l + 1];
    for (id, node) in tree.nodes.iter().enumerate() {
        if node.kind == NodeKind::Variable {
            alpha[0][id] = node.llr;
        }
    }
    let mut incoming = Vec::new();
    for t in 1..=l {
        // children have larger ids, but every message of iteration t only
        // reads iteration t - 1 or the check layer below, so walk bottom-up
        for id in (0..size).rev() {
            let node = &tree.nodes[id];
            match node.kind {
                NodeKind::Check => {
                    incoming.clear();
                    incoming.extend(node.children.iter().map(|&c| alpha[t - 1][c]));
                    beta[t][id] = if incoming.is_empty() {
                        0.0
                    } else {
                        check_message(&incoming, variant)
                    };
                }
                NodeKind::Variable if id != 0 => {
                    let tmp = node.children.iter().fold(node.llr, |acc, &c| acc + beta[t][c]);
                    alpha[t][id] = if scms { scms_filter(tmp, alpha[t - 1][id]) } else { tmp };
                }
                NodeKind::Variable => {}
            }
        }
    }
    let root = tree.nodes[0]
        .children
        .iter()
        .fold(tree.root_llr(), |acc, &c| acc + beta[l][c]);
    TreeRun { root, alpha, beta }
}

/// Root a-posteriori value after `tree.depth()` iterations.
pub fn tree_decode(tree: &ComputationTree, variant: &Variant) -> f64 {
    tree_run(tree, variant).root
}

/// Drops every check node (with its subtree) that has a child whose message,
/// at the iteration the root actually uses, was erased.
pub fn prune_erased(tree: &ComputationTree, run: &TreeRun) -> ComputationTree {
    let l = tree.depth();
    let mut out = ComputationTree::root_only(tree.nodes[0].origin, tree.root_llr());
    // (old id, new id)
    let mut stack = vec![(0usize, 0usize)];
    while let Some((old, new)) = stack.pop() {
        for &c in &tree.nodes[old].children {
            let check = &tree.nodes[c];
            // children of a layer-k check are variables used at iteration L - k
            let t = l - check.layer;
            if check.children.iter().any(|&w| run.alpha[t][w] == 0.0) {
                continue;
            }
            let nc = out.push(new, NodeKind::Check, check.origin, 0.0);
            for &w in &check.children {
                let wn = out.push(nc, NodeKind::Variable, tree.nodes[w].origin, tree.nodes[w].llr);
                stack.push((w, wn));
            }
        }
    }
    out.with_depth(l)
}

/// Random tree for the pruning oracle: depth in `1..=max_depth`, at most
/// `max_nodes` nodes, 1 or 2 children per node below the root (1 to 3 at the
/// root), every leaf on the deepest variable layer and LLRs drawn from a
/// symmetric Gaussian with mean `mean` (variance `2 mean`). Origins are
/// unique node labels.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, max_depth: usize, max_nodes: usize, mean: f64) -> ComputationTree {
    let llr = Normal::new(mean, (2.0 * mean).sqrt()).expect("positive variance");
    loop {
        let depth = rng.random_range(1..=max_depth.max(1));
        let mut tree = ComputationTree::root_only(0, llr.sample(rng));
        let mut frontier = vec![0usize];
        let mut too_big = false;
        for _ in 0..depth {
            let mut next = Vec::new();
            for &v in &frontier {
                let checks = if v == 0 { rng.random_range(1..=3) } else { rng.random_range(1..=2) };
                for _ in 0..checks {
                    let origin = tree.len();
                    let c = tree.push(v, NodeKind::Check, origin, 0.0);
                    for _ in 0..rng.random_range(1..=2) {
                        let origin = tree.len();
                        let w = tree.push(c, NodeKind::Variable, origin, llr.sample(rng));
                        next.push(w);
                    }
                }
            }
            frontier = next;
            if tree.len() > max_nodes {
                too_big = true;
                break;
            }
        }
        if !too_big {
            return tree.with_depth(depth);
        }
    }
}

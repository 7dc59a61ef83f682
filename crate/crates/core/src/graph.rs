//! Directed acyclic graphs over named variables: edit moves, expert edge
//! constraints and the structural Hamming distance used for clustering.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable DAG. Node order is canonicalized by name so serialized
/// adjacency structures are comparable across runs. Edges are stored as
/// (parent, child) index pairs into the sorted node list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DagRepr", into = "DagRepr")]
pub struct Dag {
    nodes: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
}

/// On-disk form: {"nodes": [...], "edges": [["parent","child"], ...]}.
#[derive(Serialize, Deserialize)]
struct DagRepr {
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
}

impl From<Dag> for DagRepr {
    fn from(g: Dag) -> Self {
        let edges = g
            .edges
            .iter()
            .map(|&(p, c)| (g.nodes[p].clone(), g.nodes[c].clone()))
            .collect();
        DagRepr {
            nodes: g.nodes,
            edges,
        }
    }
}

impl TryFrom<DagRepr> for Dag {
    type Error = Error;
    fn try_from(r: DagRepr) -> Result<Self> {
        let mut g = Dag::new(r.nodes)?;
        for (p, c) in &r.edges {
            g = g.apply_move(&Move::Add(g.edge(p, c)?))?;
        }
        Ok(g)
    }
}

/// A single-edge edit considered by the structure search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Move {
    Add((usize, usize)),
    Delete((usize, usize)),
    Reverse((usize, usize)),
}

impl Dag {
    /// Empty graph over the given variable names (sorted internally).
    pub fn new(mut nodes: Vec<String>) -> Result<Self> {
        nodes.sort();
        for w in nodes.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Config(format!("duplicate node '{}'", w[0])));
            }
        }
        Ok(Dag {
            nodes,
            edges: BTreeSet::new(),
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.nodes
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| Error::UnknownVariable(name.to_string()))
    }

    /// Resolves an edge given by names into an index pair.
    pub fn edge(&self, parent: &str, child: &str) -> Result<(usize, usize)> {
        Ok((self.node_index(parent)?, self.node_index(child)?))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.edges.contains(&(parent, child))
    }

    pub fn parents(&self, child: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(_, c)| c == child)
            .map(|&(p, _)| p)
            .collect()
    }

    pub fn children(&self, parent: usize) -> Vec<usize> {
        self.edges
            .range((parent, 0)..=(parent, usize::MAX))
            .map(|&(_, c)| c)
            .collect()
    }

    /// True if a directed path from `from` to `to` exists.
    pub fn has_path(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut stack = vec![from];
        let mut seen = vec![false; self.nodes.len()];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            for v in self.children(u) {
                if v == to {
                    return true;
                }
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    }

    /// Applies an edit, returning a new graph. Cycle-creating or otherwise
    /// invalid moves yield an error so the search can skip them.
    pub fn apply_move(&self, m: &Move) -> Result<Dag> {
        let mut out = self.clone();
        match *m {
            Move::Add((p, c)) => {
                if p == c {
                    return Err(Error::Config("self-loop".into()));
                }
                if p >= self.nodes.len() || c >= self.nodes.len() {
                    return Err(Error::Config("edge endpoint out of range".into()));
                }
                if self.has_edge(p, c) {
                    return Err(Error::Config("edge already present".into()));
                }
                if self.has_path(c, p) {
                    return Err(Error::Config("move would create a cycle".into()));
                }
                out.edges.insert((p, c));
            }
            Move::Delete((p, c)) => {
                if !out.edges.remove(&(p, c)) {
                    return Err(Error::Config("edge not present".into()));
                }
            }
            Move::Reverse((p, c)) => {
                if !out.edges.remove(&(p, c)) {
                    return Err(Error::Config("edge not present".into()));
                }
                if out.has_path(p, c) {
                    return Err(Error::Config("reversal would create a cycle".into()));
                }
                out.edges.insert((c, p));
            }
        }
        Ok(out)
    }

    /// Nodes in a topological order (stable across runs: among ready nodes,
    /// the smallest index goes first).
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        for &(_, c) in &self.edges {
            indegree[c] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&u) = ready.iter().next() {
            ready.remove(&u);
            order.push(u);
            for v in self.children(u) {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    ready.insert(v);
                }
            }
        }
        debug_assert_eq!(order.len(), n, "graph contains a cycle");
        order
    }

    /// Structural Hamming distance: the size of the symmetric difference of
    /// the directed edge sets (a reversal counts 2). Both graphs must be
    /// over the same node set.
    pub fn hamming(&self, other: &Dag) -> Result<usize> {
        if self.nodes != other.nodes {
            return Err(Error::IncomparableGraphs);
        }
        Ok(self.edges.symmetric_difference(&other.edges).count())
    }
}

/// Expert constraints: edges that must appear and edges that may not.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeConstraints {
    #[serde(default)]
    pub required: BTreeSet<(String, String)>,
    #[serde(default)]
    pub forbidden: BTreeSet<(String, String)>,
}

impl EdgeConstraints {
    pub fn is_empty(&self) -> bool {
        self.required.is_empty() && self.forbidden.is_empty()
    }

    /// Checks internal consistency: no edge both required and forbidden,
    /// and the required set itself acyclic.
    pub fn validate(&self, node_names: &[String]) -> Result<()> {
        if let Some((p, c)) = self.required.intersection(&self.forbidden).next() {
            return Err(Error::BadConstraints(format!(
                "edge {p}->{c} both required and forbidden"
            )));
        }
        let known: HashMap<&str, ()> = node_names.iter().map(|n| (n.as_str(), ())).collect();
        for (p, c) in self.required.iter().chain(self.forbidden.iter()) {
            for name in [p, c] {
                if !known.contains_key(name.as_str()) {
                    return Err(Error::BadConstraints(format!("unknown variable '{name}'")));
                }
            }
        }
        let mut g = Dag::new(node_names.to_vec())?;
        for (p, c) in &self.required {
            let e = g.edge(p, c)?;
            g = g
                .apply_move(&Move::Add(e))
                .map_err(|_| Error::BadConstraints("required edges contain a cycle".into()))?;
        }
        Ok(())
    }

    pub fn is_required(&self, g: &Dag, p: usize, c: usize) -> bool {
        self.required
            .contains(&(g.nodes()[p].clone(), g.nodes()[c].clone()))
    }

    pub fn is_forbidden(&self, g: &Dag, p: usize, c: usize) -> bool {
        self.forbidden
            .contains(&(g.nodes()[p].clone(), g.nodes()[c].clone()))
    }
}

/// True iff the graph contains every required edge and no forbidden one.
pub fn satisfies(g: &Dag, c: &EdgeConstraints) -> bool {
    let has = |p: &str, ch: &str| match g.edge(p, ch) {
        Ok((pi, ci)) => g.has_edge(pi, ci),
        Err(_) => false,
    };
    c.required.iter().all(|(p, ch)| has(p, ch)) && !c.forbidden.iter().any(|(p, ch)| has(p, ch))
}

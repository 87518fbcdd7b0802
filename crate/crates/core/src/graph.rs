//! Communication topologies and the structural detections the protocol
//! generators rely on: spanning trees, Hamiltonian paths, hub pairs covering
//! a `K_{2,n-2}` subgraph, and balanced complete-bipartite partitions.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::epistemic::{agents, AgentId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("expected an undirected graph")]
    ExpectedUndirected,
    #[error("expected a directed graph")]
    ExpectedDirected,
    #[error("self-loop on agent {0}")]
    SelfLoop(AgentId),
    #[error("agent {agent} out of range 1..={n}")]
    OutOfRange { agent: u16, n: u16 },
}

/// A communication topology over agents `1..=n`. Undirected edges are stored
/// once, in normalized `(min, max)` order; directed graphs store arcs as
/// given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommGraph {
    n: u16,
    directed: bool,
    edges: BTreeSet<(AgentId, AgentId)>,
}

impl CommGraph {
    pub fn undirected(n: u16) -> CommGraph {
        assert!(n >= 1);
        CommGraph { n, directed: false, edges: BTreeSet::new() }
    }

    pub fn directed(n: u16) -> CommGraph {
        assert!(n >= 1);
        CommGraph { n, directed: true, edges: BTreeSet::new() }
    }

    pub fn add_edge(&mut self, a: AgentId, b: AgentId) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        for x in [a, b] {
            if x.get() > self.n {
                return Err(GraphError::OutOfRange { agent: x.get(), n: self.n });
            }
        }
        if self.directed {
            self.edges.insert((a, b));
        } else {
            self.edges.insert((a.min(b), a.max(b)));
        }
        Ok(())
    }

    pub fn from_edges(
        n: u16,
        directed: bool,
        edges: impl IntoIterator<Item = (u16, u16)>,
    ) -> Result<CommGraph, GraphError> {
        let mut g = if directed { CommGraph::directed(n) } else { CommGraph::undirected(n) };
        for (a, b) in edges {
            g.add_edge(AgentId::new(a), AgentId::new(b))?;
        }
        Ok(g)
    }

    /// Complete undirected graph `K_n`.
    pub fn complete(n: u16) -> CommGraph {
        let mut g = CommGraph::undirected(n);
        for i in agents(n) {
            for j in agents(n) {
                if i < j {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    }

    /// Complete digraph: both arcs between every pair.
    pub fn complete_digraph(n: u16) -> CommGraph {
        let mut g = CommGraph::directed(n);
        for i in agents(n) {
            for j in agents(n) {
                if i != j {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    }

    /// Path graph `1 - 2 - … - n`.
    pub fn path(n: u16) -> CommGraph {
        let mut g = CommGraph::undirected(n);
        for i in 1..n {
            g.add_edge(AgentId::new(i), AgentId::new(i + 1)).unwrap();
        }
        g
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: AgentId, b: AgentId) -> bool {
        if self.directed {
            self.edges.contains(&(a, b))
        } else {
            self.edges.contains(&(a.min(b), a.max(b)))
        }
    }

    /// Neighbors in an undirected graph, ascending.
    pub fn neighbors(&self, v: AgentId) -> Vec<AgentId> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            if a == v {
                out.push(b);
            } else if b == v {
                out.push(a);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Successors along directed arcs, ascending.
    pub fn successors(&self, v: AgentId) -> Vec<AgentId> {
        let mut out: Vec<AgentId> =
            self.edges.iter().filter(|&&(a, _)| a == v).map(|&(_, b)| b).collect();
        out.sort();
        out
    }

    /// Connected components of an undirected graph, each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<AgentId>> {
        assert!(!self.directed);
        let n = self.n as usize;
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in agents(self.n) {
            if seen[start.index()] {
                continue;
            }
            let mut comp = vec![start];
            seen[start.index()] = true;
            let mut queue = vec![start];
            while let Some(v) = queue.pop() {
                for w in self.neighbors(v) {
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        comp.push(w);
                        queue.push(w);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Whether every vertex reaches and is reached from vertex 1.
    pub fn is_strongly_connected(&self) -> Result<bool, GraphError> {
        if !self.directed {
            return Err(GraphError::ExpectedDirected);
        }
        let forward = self.reachable_from(AgentId::new(1), false);
        let backward = self.reachable_from(AgentId::new(1), true);
        Ok(forward.len() == self.n as usize && backward.len() == self.n as usize)
    }

    fn reachable_from(&self, start: AgentId, reversed: bool) -> BTreeSet<AgentId> {
        let mut seen = BTreeSet::new();
        seen.insert(start);
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            for &(a, b) in &self.edges {
                let (from, to) = if reversed { (b, a) } else { (a, b) };
                if from == v && seen.insert(to) {
                    queue.push(to);
                }
            }
        }
        seen
    }

    /// The undirected graph of mutually-directed pairs: an edge `{i,j}`
    /// exactly when both arcs `(i,j)` and `(j,i)` are present.
    pub fn mirror(&self) -> Result<CommGraph, GraphError> {
        if !self.directed {
            return Err(GraphError::ExpectedUndirected);
        }
        let mut g = CommGraph::undirected(self.n);
        for &(a, b) in &self.edges {
            if a < b && self.edges.contains(&(b, a)) {
                g.add_edge(a, b).unwrap();
            }
        }
        Ok(g)
    }
}

impl fmt::Display for CommGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} agents,", self.n)?;
        for (a, b) in self.edges() {
            write!(f, " {}{}{}", a, if self.directed { "->" } else { "-" }, b)?;
        }
        Ok(())
    }
}

/// A spanning tree rooted at agent 1 with one child of the root singled out;
/// the designated child's subtree and the rest of the tree are swept
/// separately by the tree protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    n: u16,
    /// `parent[v.index()]`; the root has none.
    parent: Vec<Option<AgentId>>,
    /// Children of each vertex, ascending.
    children: Vec<Vec<AgentId>>,
    designated_child: AgentId,
}

impl RootedTree {
    pub fn root(&self) -> AgentId {
        AgentId::new(1)
    }

    pub fn n(&self) -> u16 {
        self.n
    }

    pub fn designated_child(&self) -> AgentId {
        self.designated_child
    }

    pub fn parent(&self, v: AgentId) -> Option<AgentId> {
        self.parent[v.index()]
    }

    pub fn children(&self, v: AgentId) -> &[AgentId] {
        &self.children[v.index()]
    }

    /// Depth of each vertex (root has depth 0).
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.n as usize];
        let mut queue = vec![self.root()];
        while let Some(v) = queue.pop() {
            for &c in self.children(v) {
                depth[c.index()] = depth[v.index()] + 1;
                queue.push(c);
            }
        }
        depth
    }

    /// Vertices of the subtree rooted at `v`, sorted.
    pub fn subtree(&self, v: AgentId) -> Vec<AgentId> {
        let mut out = vec![v];
        let mut queue = vec![v];
        while let Some(u) = queue.pop() {
            for &c in self.children(u) {
                out.push(c);
                queue.push(c);
            }
        }
        out.sort();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }

    /// Checks parent/children coherence; guards protocol generators against
    /// hand-built trees.
    pub fn is_well_formed(&self) -> bool {
        if self.parent.len() != self.n as usize || self.children.len() != self.n as usize {
            return false;
        }
        if self.parent[0].is_some() || self.edge_count() != self.n as usize - 1 {
            return false;
        }
        if self.parent(self.designated_child) != Some(self.root()) {
            return false;
        }
        for v in agents(self.n) {
            for &c in self.children(v) {
                if self.parent(c) != Some(v) {
                    return false;
                }
            }
        }
        // every vertex reachable from the root
        self.subtree(self.root()).len() == self.n as usize
    }
}

/// Breadth-first spanning tree rooted at agent 1, or `None` if the graph is
/// disconnected. The designated child is the least neighbor of the root.
pub fn spanning_tree(g: &CommGraph) -> Result<Option<RootedTree>, GraphError> {
    if g.is_directed() {
        return Err(GraphError::ExpectedUndirected);
    }
    let n = g.n() as usize;
    let root = AgentId::new(1);
    let mut parent: Vec<Option<AgentId>> = vec![None; n];
    let mut children: Vec<Vec<AgentId>> = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    seen[root.index()] = true;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if !seen[w.index()] {
                seen[w.index()] = true;
                parent[w.index()] = Some(v);
                children[v.index()].push(w);
                queue.push_back(w);
                reached += 1;
            }
        }
    }
    if reached < n {
        return Ok(None);
    }
    if n == 1 {
        // degenerate: no child to designate; callers need n >= 2
        return Ok(None);
    }
    let designated_child = children[root.index()][0];
    Ok(Some(RootedTree { n: g.n(), parent, children, designated_child }))
}

/// Exhaustive backtracking search for a Hamiltonian path, branching from
/// low-degree endpoints first. Returns the path as a vertex sequence.
pub fn hamiltonian_path(g: &CommGraph) -> Option<Vec<AgentId>> {
    assert!(!g.is_directed(), "hamiltonian_path expects an undirected graph");
    let n = g.n() as usize;
    if n == 1 {
        return Some(vec![AgentId::new(1)]);
    }
    if !g.is_connected() {
        return None;
    }
    let adjacency: Vec<Vec<AgentId>> = agents(g.n())
        .map(|v| {
            let mut nb = g.neighbors(v);
            // low-degree neighbors first prunes faster
            nb.sort_by_key(|w| (g.neighbors(*w).len(), *w));
            nb
        })
        .collect();
    let mut starts: Vec<AgentId> = agents(g.n()).collect();
    starts.sort_by_key(|v| (adjacency[v.index()].len(), *v));

    fn extend(
        adjacency: &[Vec<AgentId>],
        path: &mut Vec<AgentId>,
        used: &mut Vec<bool>,
        n: usize,
    ) -> bool {
        if path.len() == n {
            return true;
        }
        let last = *path.last().unwrap();
        for &next in &adjacency[last.index()] {
            if !used[next.index()] {
                used[next.index()] = true;
                path.push(next);
                if extend(adjacency, path, used, n) {
                    return true;
                }
                path.pop();
                used[next.index()] = false;
            }
        }
        false
    }

    for start in starts {
        let mut path = vec![start];
        let mut used = vec![false; n];
        used[start.index()] = true;
        if extend(&adjacency, &mut path, &mut used, n) {
            return Some(path);
        }
    }
    None
}

/// Least pair `{i,j}` such that every other vertex is adjacent to both, i.e.
/// the graph contains `K_{2,n-2}` with parts `{i,j}` and the rest.
pub fn detect_k2_bipartite(g: &CommGraph) -> Option<(AgentId, AgentId)> {
    assert!(!g.is_directed());
    if g.n() < 4 {
        return None;
    }
    for i in agents(g.n()) {
        for j in agents(g.n()) {
            if i >= j {
                continue;
            }
            let covers =
                agents(g.n()).filter(|v| *v != i && *v != j).all(|v| g.has_edge(i, v) && g.has_edge(j, v));
            if covers {
                return Some((i, j));
            }
        }
    }
    None
}

/// Partition into parts of sizes `ceil(n/2)` and `floor(n/2)` with all cross
/// edges present, or `None`.
///
/// Vertices not joined by an edge must share a part, so the parts are unions
/// of connected components of the complement graph; a subset-sum scan over
/// the component sizes finds a balanced union. Returns the lexicographically
/// least large part (components greedily taken in order of smallest member).
pub fn detect_balanced_bipartite(g: &CommGraph) -> Option<(Vec<AgentId>, Vec<AgentId>)> {
    assert!(!g.is_directed());
    let n = g.n();
    let target = (n as usize + 1) / 2;
    let complement = {
        let mut c = CommGraph::undirected(n);
        for i in agents(n) {
            for j in agents(n) {
                if i < j && !g.has_edge(i, j) {
                    c.add_edge(i, j).unwrap();
                }
            }
        }
        c
    };
    let comps = complement.components(); // ordered by smallest member
    let sizes: Vec<usize> = comps.iter().map(|c| c.len()).collect();

    // reachable[k][s]: can components k.. sum to s
    let mut reachable = vec![vec![false; target + 1]; comps.len() + 1];
    reachable[comps.len()][0] = true;
    for k in (0..comps.len()).rev() {
        for s in 0..=target {
            reachable[k][s] =
                reachable[k + 1][s] || (s >= sizes[k] && reachable[k + 1][s - sizes[k]]);
        }
    }
    if !reachable[0][target] {
        return None;
    }
    let mut big: Vec<AgentId> = Vec::new();
    let mut need = target;
    for (k, comp) in comps.iter().enumerate() {
        // prefer taking the earliest components: lexicographically least part
        if need >= sizes[k] && reachable[k + 1][need - sizes[k]] {
            big.extend(comp.iter().copied());
            need -= sizes[k];
        }
    }
    debug_assert_eq!(need, 0);
    let mut small: Vec<AgentId> = agents(n).filter(|v| !big.contains(v)).collect();
    big.sort();
    small.sort();
    Some((big, small))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(id: u16) -> AgentId {
        AgentId::new(id)
    }

    /// K_{2,m} with hub vertices 1,2 and leaves 3..=(m+2).
    fn k2_star(n: u16) -> CommGraph {
        let mut g = CommGraph::undirected(n);
        for hub in [1, 2] {
            for v in 3..=n {
                g.add_edge(a(hub), a(v)).unwrap();
            }
        }
        g
    }

    fn cycle(n: u16) -> CommGraph {
        let mut g = CommGraph::path(n);
        g.add_edge(a(n), a(1)).unwrap();
        g
    }

    #[test]
    fn spanning_tree_of_path_roots_at_one() {
        let t = spanning_tree(&CommGraph::path(3)).unwrap().unwrap();
        assert_eq!(t.root(), a(1));
        assert_eq!(t.designated_child(), a(2));
        assert_eq!(t.parent(a(3)), Some(a(2)));
        assert!(t.is_well_formed());
    }

    #[test]
    fn spanning_tree_absent_when_disconnected() {
        let g = CommGraph::from_edges(2, false, []).unwrap();
        assert_eq!(spanning_tree(&g).unwrap(), None);
    }

    #[test]
    fn spanning_tree_of_complete_graph_has_n_minus_1_edges() {
        let t = spanning_tree(&CommGraph::complete(4)).unwrap().unwrap();
        assert_eq!(t.edge_count(), 3);
        assert_eq!(t.subtree(a(1)).len(), 4);
        assert!(t.is_well_formed());
    }

    #[test]
    fn spanning_tree_rejects_directed() {
        let g = CommGraph::complete_digraph(3);
        assert_eq!(spanning_tree(&g), Err(GraphError::ExpectedUndirected));
    }

    #[test]
    fn hamiltonian_path_on_path_graph() {
        let p = hamiltonian_path(&CommGraph::path(4)).unwrap();
        assert_eq!(p, vec![a(1), a(2), a(3), a(4)]);
    }

    #[test]
    fn hamiltonian_path_absent_on_star() {
        // K_{1,3}: center 1, leaves 2..4
        let g = CommGraph::from_edges(4, false, [(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(hamiltonian_path(&g), None);
    }

    #[test]
    fn hamiltonian_path_exists_in_k2_star() {
        let g = k2_star(6);
        let p = hamiltonian_path(&g).unwrap();
        assert_eq!(p.len(), 6);
        for w in p.windows(2) {
            assert!(g.has_edge(w[0], w[1]), "non-edge {}-{}", w[0], w[1]);
        }
    }

    /// Permutation-enumeration oracle for Hamiltonian path existence.
    fn hamiltonian_exists_oracle(g: &CommGraph) -> bool {
        fn rec(g: &CommGraph, path: &mut Vec<AgentId>, rest: &mut Vec<AgentId>) -> bool {
            if rest.is_empty() {
                return true;
            }
            for idx in 0..rest.len() {
                let v = rest[idx];
                if path.last().map_or(true, |&last| g.has_edge(last, v)) {
                    rest.swap_remove(idx);
                    path.push(v);
                    if rec(g, path, rest) {
                        return true;
                    }
                    path.pop();
                    rest.push(v);
                    let n = rest.len();
                    rest.swap(idx, n - 1);
                }
            }
            false
        }
        rec(g, &mut Vec::new(), &mut agents(g.n()).collect())
    }

    #[test]
    fn hamiltonian_agrees_with_permutation_oracle() {
        // all graphs on 4 vertices plus a sample on 5
        for n in [4u16, 5] {
            let pairs: Vec<(u16, u16)> =
                (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
            let step = if n == 4 { 1usize } else { 7 };
            for mask in (0..(1u32 << pairs.len())).step_by(step) {
                let edges: Vec<(u16, u16)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let g = CommGraph::from_edges(n, false, edges).unwrap();
                let found = hamiltonian_path(&g);
                assert_eq!(found.is_some(), hamiltonian_exists_oracle(&g), "mask {mask:b}");
                if let Some(p) = found {
                    assert_eq!(p.len(), n as usize);
                    for w in p.windows(2) {
                        assert!(g.has_edge(w[0], w[1]));
                    }
                }
            }
        }
    }

    #[test]
    fn k2_detection_finds_hub_pair() {
        assert_eq!(detect_k2_bipartite(&k2_star(6)), Some((a(1), a(2))));
        assert_eq!(detect_k2_bipartite(&CommGraph::complete(5)), Some((a(1), a(2))));
        assert_eq!(detect_k2_bipartite(&cycle(5)), None);
    }

    /// Bitset-row oracle: pair {i,j} works iff the common-neighbor rows of i
    /// and j cover all other vertices.
    fn k2_oracle(g: &CommGraph) -> Option<(AgentId, AgentId)> {
        if g.n() < 4 {
            return None;
        }
        let row = |v: AgentId| -> u32 {
            g.neighbors(v).into_iter().fold(0u32, |acc, w| acc | 1 << w.index())
        };
        for i in agents(g.n()) {
            for j in agents(g.n()) {
                if i >= j {
                    continue;
                }
                let others = (0..g.n() as u32).fold(0u32, |acc, k| acc | 1 << k)
                    & !(1 << i.index())
                    & !(1 << j.index());
                if row(i) & row(j) & others == others {
                    return Some((i, j));
                }
            }
        }
        None
    }

    #[test]
    fn k2_detection_agrees_with_bitset_oracle() {
        for n in [4u16, 5, 6] {
            let pairs: Vec<(u16, u16)> =
                (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
            let step = if n <= 5 { 1usize } else { 11 };
            for mask in (0..(1u64 << pairs.len())).step_by(step) {
                let edges: Vec<(u16, u16)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let g = CommGraph::from_edges(n, false, edges).unwrap();
                assert_eq!(detect_k2_bipartite(&g), k2_oracle(&g));
            }
        }
    }

    #[test]
    fn balanced_bipartite_on_complete_bipartite_graph() {
        // K_{3,3} with parts {1,2,3}, {4,5,6}
        let mut g = CommGraph::undirected(6);
        for i in 1..=3 {
            for j in 4..=6 {
                g.add_edge(a(i), a(j)).unwrap();
            }
        }
        let (big, small) = detect_balanced_bipartite(&g).unwrap();
        assert_eq!(big, vec![a(1), a(2), a(3)]);
        assert_eq!(small, vec![a(4), a(5), a(6)]);
    }

    #[test]
    fn balanced_bipartite_on_complete_graph() {
        let (big, small) = detect_balanced_bipartite(&CommGraph::complete(7)).unwrap();
        assert_eq!(big, vec![a(1), a(2), a(3), a(4)]);
        assert_eq!(small, vec![a(5), a(6), a(7)]);
    }

    #[test]
    fn balanced_bipartite_absent_for_indivisible_components() {
        // complete tripartite K_{3,3,3}: complement components have sizes
        // {3,3,3}, whose subset sums {0,3,6,9} cannot hit ceil(9/2) = 5
        let block = |v: u16| (v - 1) / 3;
        let edges = (1..=9u16)
            .flat_map(|i| (i + 1..=9).map(move |j| (i, j)))
            .filter(|&(i, j)| block(i) != block(j));
        let g = CommGraph::from_edges(9, false, edges).unwrap();
        assert_eq!(detect_balanced_bipartite(&g), None);
    }

    /// Brute-force bipartition oracle for balanced complete-bipartite
    /// subgraphs.
    fn balanced_oracle(g: &CommGraph) -> bool {
        let n = g.n() as usize;
        let target = (n + 1) / 2;
        'outer: for mask in 0u32..(1 << n) {
            if (mask.count_ones() as usize) != target {
                continue;
            }
            for i in agents(g.n()) {
                for j in agents(g.n()) {
                    let in_i = mask >> i.index() & 1 == 1;
                    let in_j = mask >> j.index() & 1 == 1;
                    if i < j && in_i != in_j && !g.has_edge(i, j) {
                        continue 'outer;
                    }
                }
            }
            return true;
        }
        false
    }

    #[test]
    fn balanced_bipartite_agrees_with_enumeration_oracle() {
        for n in [2u16, 3, 4, 5] {
            let pairs: Vec<(u16, u16)> =
                (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
            for mask in 0..(1u64 << pairs.len()) {
                let edges: Vec<(u16, u16)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let g = CommGraph::from_edges(n, false, edges).unwrap();
                let found = detect_balanced_bipartite(&g);
                assert_eq!(found.is_some(), balanced_oracle(&g), "n={n} mask={mask:b}");
                if let Some((big, small)) = found {
                    assert_eq!(big.len(), (n as usize + 1) / 2);
                    assert_eq!(small.len(), n as usize / 2);
                    for &i in &big {
                        for &j in &small {
                            assert!(g.has_edge(i, j));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mirror_keeps_reciprocated_arcs_only() {
        let g = CommGraph::from_edges(3, true, [(1, 2), (2, 1), (2, 3)]).unwrap();
        let m = g.mirror().unwrap();
        assert_eq!(m.edges().collect::<Vec<_>>(), vec![(a(1), a(2))]);

        let full = CommGraph::complete_digraph(3).mirror().unwrap();
        assert_eq!(full.edge_count(), 3);

        let one_way = CommGraph::from_edges(3, true, [(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(one_way.mirror().unwrap().edge_count(), 0);
    }

    #[test]
    fn strong_connectivity() {
        let cycle3 = CommGraph::from_edges(3, true, [(1, 2), (2, 3), (3, 1)]).unwrap();
        assert!(cycle3.is_strongly_connected().unwrap());
        let chain = CommGraph::from_edges(3, true, [(1, 2), (2, 3)]).unwrap();
        assert!(!chain.is_strongly_connected().unwrap());
        assert!(CommGraph::complete_digraph(4).is_strongly_connected().unwrap());
        assert!(CommGraph::complete(3).is_strongly_connected().is_err());
    }
}

//! Plan generators for full gossip goals: tree sweeps, path scans, hub fans,
//! one-way scans, and logarithmic parallel rounds. Each generator emits a
//! plan whose length matches its closed-form bound exactly.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::epistemic::{agents, Action, AgentId, ParallelStep};
use crate::graph::{detect_balanced_bipartite, detect_k2_bipartite, hamiltonian_path, spanning_tree, RootedTree};
use crate::planner::ProblemInstance;

/// Communication regime of an instance or plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    TwoWay,
    OneWay,
    Parallel,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::TwoWay => write!(f, "two-way"),
            Mode::OneWay => write!(f, "one-way"),
            Mode::Parallel => write!(f, "parallel"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanItems {
    Sequential(Vec<Action>),
    Parallel(Vec<ParallelStep>),
}

/// A solution plan: a sequence of actions, or of parallel steps. Pass
/// boundaries and the proof-numbering of the generator that produced it are
/// kept as metadata for auditing and instrumented tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub mode: Mode,
    pub items: PlanItems,
    /// Cumulative item count at the end of each generator pass; empty for
    /// hand-written plans.
    pub pass_ends: Vec<usize>,
    /// Proof position → actual agent, when the generator renumbered.
    pub relabeling: Option<BTreeMap<u16, AgentId>>,
}

impl Plan {
    pub fn sequential(mode: Mode, actions: Vec<Action>) -> Plan {
        assert!(mode != Mode::Parallel);
        Plan { mode, items: PlanItems::Sequential(actions), pass_ends: Vec::new(), relabeling: None }
    }

    pub fn parallel(steps: Vec<ParallelStep>) -> Plan {
        Plan {
            mode: Mode::Parallel,
            items: PlanItems::Parallel(steps),
            pass_ends: Vec::new(),
            relabeling: None,
        }
    }

    /// Number of actions (sequential) or steps (parallel).
    pub fn len(&self) -> usize {
        match &self.items {
            PlanItems::Sequential(a) => a.len(),
            PlanItems::Parallel(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn actions(&self) -> Option<&[Action]> {
        match &self.items {
            PlanItems::Sequential(a) => Some(a),
            PlanItems::Parallel(_) => None,
        }
    }

    pub fn steps(&self) -> Option<&[ParallelStep]> {
        match &self.items {
            PlanItems::Parallel(s) => Some(s),
            PlanItems::Sequential(_) => None,
        }
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.items {
            PlanItems::Sequential(actions) => {
                for a in actions {
                    writeln!(f, "{}", a)?;
                }
            }
            PlanItems::Parallel(steps) => {
                for s in steps {
                    writeln!(f, "{}", s)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("protocol needs at least {0} agents")]
    TooFewAgents(u16),
    #[error("malformed tree")]
    MalformedTree,
    #[error("vertex sequence is not a permutation of the agents")]
    InvalidPath,
    #[error("invalid part structure: {0}")]
    InvalidParts(String),
    #[error("instance goals are not the full positive goal set for its depth cap")]
    NotFullGossipGoals,
    #[error("no applicable protocol: {0}")]
    NoProtocol(String),
}

fn ceil_log2(n: u32) -> u32 {
    debug_assert!(n >= 1);
    n.next_power_of_two().trailing_zeros()
}

fn floor_log2(n: u32) -> u32 {
    debug_assert!(n >= 1);
    31 - n.leading_zeros()
}

/// `d(2n-3)`: length of the spanning-tree protocol.
pub fn spanning_tree_length(n: u16, d: usize) -> usize {
    d * (2 * n as usize - 3)
}

/// `1 + (d+1)(n-2)`: length of the Hamiltonian-path protocol.
pub fn hamiltonian_length(n: u16, d: usize) -> usize {
    1 + (d + 1) * (n as usize - 2)
}

/// `(d+1)(n-2)`: length of the hub-pair protocol.
pub fn bipartite_length(n: u16, d: usize) -> usize {
    (d + 1) * (n as usize - 2)
}

/// `(d+1)(n-1)`: length of the one-way scan protocol.
pub fn directional_length(n: u16, d: usize) -> usize {
    (d + 1) * (n as usize - 1)
}

/// Steps of the parallel protocol: `d(ceil(lg n) - 1) + 1` for even `n`,
/// `d ceil(lg n) + 1` for odd `n` (and 1 for the trivial `n = 2`).
pub fn parallel_step_count(n: u16, d: usize) -> usize {
    let lg = ceil_log2(n as u32) as usize;
    if n % 2 == 0 {
        d * (lg - 1) + 1
    } else {
        d * lg + 1
    }
}

/// Tree-sweep protocol: `2d` passes alternating leaf-to-root gathers (ending
/// with a root/designated-child call) and root-to-leaf broadcasts. After pass
/// `2m` every depth-`m` fluent holds, so `2d` passes reach depth `d`.
pub fn spanning_tree_protocol(tree: &RootedTree, d: usize) -> Result<Plan, ProtocolError> {
    if d == 0 {
        return Err(ProtocolError::ZeroDepth);
    }
    if tree.n() < 2 {
        return Err(ProtocolError::TooFewAgents(2));
    }
    if !tree.is_well_formed() {
        return Err(ProtocolError::MalformedTree);
    }
    let root = tree.root();
    let child = tree.designated_child();
    let depths = tree.depths();
    let in_child_side: Vec<AgentId> = tree.subtree(child);
    let is_child_side = |v: AgentId| in_child_side.binary_search(&v).is_ok();

    // edges (v, parent(v)) of each side, deepest child first for gathering
    let mut side_edges: [Vec<AgentId>; 2] = [Vec::new(), Vec::new()];
    for v in agents(tree.n()) {
        if v == root || v == child {
            continue;
        }
        side_edges[usize::from(is_child_side(v))].push(v);
    }
    for side in &mut side_edges {
        side.sort_by_key(|v| (std::cmp::Reverse(depths[v.index()]), *v));
    }

    let mut actions = Vec::new();
    let mut pass_ends = Vec::new();
    for _ in 0..d {
        // gather pass
        for side in &side_edges {
            for &v in side {
                actions.push(Action::two_way(v, tree.parent(v).unwrap()));
            }
        }
        actions.push(Action::two_way(root, child));
        pass_ends.push(actions.len());
        // broadcast pass
        for side in &side_edges {
            for &v in side.iter().rev() {
                actions.push(Action::two_way(tree.parent(v).unwrap(), v));
            }
        }
        pass_ends.push(actions.len());
    }
    debug_assert_eq!(actions.len(), spanning_tree_length(tree.n(), d));
    Ok(Plan { mode: Mode::TwoWay, items: PlanItems::Sequential(actions), pass_ends, relabeling: None })
}

/// Path-scan protocol along a Hamiltonian path: a down-and-up first pass,
/// then one alternating scan per additional depth level.
pub fn hamiltonian_protocol(path: &[AgentId], d: usize) -> Result<Plan, ProtocolError> {
    if d == 0 {
        return Err(ProtocolError::ZeroDepth);
    }
    let n = path.len();
    if n < 3 {
        return Err(ProtocolError::TooFewAgents(3));
    }
    if !is_permutation(path) {
        return Err(ProtocolError::InvalidPath);
    }
    let call = |i: usize| Action::two_way(path[i], path[i + 1]);
    let mut actions = Vec::new();
    let mut pass_ends = Vec::new();
    // first pass: scan n..1 then 1..n
    for i in (0..n - 1).rev() {
        actions.push(call(i));
    }
    for i in 1..n - 1 {
        actions.push(call(i));
    }
    pass_ends.push(actions.len());
    for pass in 2..=d {
        if pass % 2 == 0 {
            for i in (0..n - 2).rev() {
                actions.push(call(i));
            }
        } else {
            for i in 1..n - 1 {
                actions.push(call(i));
            }
        }
        pass_ends.push(actions.len());
    }
    debug_assert_eq!(actions.len(), hamiltonian_length(n as u16, d));
    let relabeling = Some(path.iter().enumerate().map(|(k, &v)| (k as u16 + 1, v)).collect());
    Ok(Plan { mode: Mode::TwoWay, items: PlanItems::Sequential(actions), pass_ends, relabeling })
}

/// Hub-fan protocol on a `K_{2,n-2}` subgraph with hub pair `(h1, h2)` and a
/// split of the remaining vertices into nonempty `left`/`right`. Odd passes
/// fan `h1` over `left` then `h2` over `right` (ascending); even passes fan
/// `h1` over `right` then `h2` over `left` (descending). `d + 1` passes of
/// `n - 2` calls each.
pub fn bipartite_protocol(
    hubs: (AgentId, AgentId),
    left: &[AgentId],
    right: &[AgentId],
    d: usize,
) -> Result<Plan, ProtocolError> {
    if d == 0 {
        return Err(ProtocolError::ZeroDepth);
    }
    let (h1, h2) = hubs;
    if left.is_empty() || right.is_empty() {
        return Err(ProtocolError::InvalidParts("left/right split must be nonempty".into()));
    }
    let all: Vec<AgentId> = [h1, h2]
        .into_iter()
        .chain(left.iter().copied())
        .chain(right.iter().copied())
        .collect();
    if !is_permutation(&all) {
        return Err(ProtocolError::InvalidParts("hubs and split must cover each agent once".into()));
    }
    let n = all.len();
    let mut left = left.to_vec();
    let mut right = right.to_vec();
    left.sort();
    right.sort();

    let mut actions = Vec::new();
    let mut pass_ends = Vec::new();
    for pass in 1..=d + 1 {
        if pass % 2 == 1 {
            for &x in &left {
                actions.push(Action::two_way(h1, x));
            }
            for &y in &right {
                actions.push(Action::two_way(h2, y));
            }
        } else {
            for &y in right.iter().rev() {
                actions.push(Action::two_way(h1, y));
            }
            for &x in left.iter().rev() {
                actions.push(Action::two_way(h2, x));
            }
        }
        pass_ends.push(actions.len());
    }
    debug_assert_eq!(actions.len(), bipartite_length(n as u16, d));
    let relabeling = Some(
        [h1, h2]
            .into_iter()
            .chain(left.iter().copied())
            .chain(right.iter().copied())
            .enumerate()
            .map(|(k, v)| (k as u16 + 1, v))
            .collect(),
    );
    Ok(Plan { mode: Mode::TwoWay, items: PlanItems::Sequential(actions), pass_ends, relabeling })
}

/// One-way scan protocol along a Hamiltonian path of the mirror graph: odd
/// passes send up the path, even passes send back down; `d + 1` passes of
/// `n - 1` sends.
pub fn directional_protocol(path: &[AgentId], d: usize) -> Result<Plan, ProtocolError> {
    if d == 0 {
        return Err(ProtocolError::ZeroDepth);
    }
    let n = path.len();
    if n < 2 {
        return Err(ProtocolError::TooFewAgents(2));
    }
    if !is_permutation(path) {
        return Err(ProtocolError::InvalidPath);
    }
    let mut actions = Vec::new();
    let mut pass_ends = Vec::new();
    for pass in 1..=d + 1 {
        if pass % 2 == 1 {
            for i in 0..n - 1 {
                actions.push(Action::one_way(path[i], path[i + 1]));
            }
        } else {
            for i in (0..n - 1).rev() {
                actions.push(Action::one_way(path[i + 1], path[i]));
            }
        }
        pass_ends.push(actions.len());
    }
    debug_assert_eq!(actions.len(), directional_length(n as u16, d));
    let relabeling = Some(path.iter().enumerate().map(|(k, &v)| (k as u16 + 1, v)).collect());
    Ok(Plan { mode: Mode::OneWay, items: PlanItems::Sequential(actions), pass_ends, relabeling })
}

/// Parallel doubling protocol on a balanced complete-bipartite subgraph.
///
/// Agents are placed on ring positions `1..=n` with `part_a` on odd and
/// `part_b` on even positions, so every emitted call crosses the parts. For
/// even `n`, each step `s` pairs position `2i+1` with `2i+2^s`; later passes
/// reuse the final pairing of the previous pass as their first step by
/// relabeling even positions, saving one step per pass. For odd `n`, the
/// largest power-of-two prefix doubles internally while the leftover agents
/// are served by a fixed injective pairing, one extra step per pass plus one
/// preliminary step.
pub fn parallel_protocol(
    part_a: &[AgentId],
    part_b: &[AgentId],
    d: usize,
) -> Result<Plan, ProtocolError> {
    if d == 0 {
        return Err(ProtocolError::ZeroDepth);
    }
    let n = part_a.len() + part_b.len();
    if n < 2 {
        return Err(ProtocolError::TooFewAgents(2));
    }
    if part_a.len() != (n + 1) / 2 {
        return Err(ProtocolError::InvalidParts(format!(
            "first part must have ceil(n/2) = {} agents, got {}",
            (n + 1) / 2,
            part_a.len()
        )));
    }
    let mut v1 = part_a.to_vec();
    let mut v2 = part_b.to_vec();
    v1.sort();
    v2.sort();
    let combined: Vec<AgentId> = v1.iter().chain(v2.iter()).copied().collect();
    if !is_permutation(&combined) {
        return Err(ProtocolError::InvalidParts("parts must cover each agent once".into()));
    }

    // ring labels: odd positions from part_a, even from part_b
    let mut label: Vec<AgentId> = vec![AgentId::new(1); n + 1];
    for (k, &v) in v1.iter().enumerate() {
        label[2 * k + 1] = v;
    }
    for (k, &v) in v2.iter().enumerate() {
        label[2 * k + 2] = v;
    }
    let relabeling = Some((1..=n).map(|p| (p as u16, label[p])).collect());

    let pos = |x: usize, modulus: usize| -> usize { (x - 1) % modulus + 1 };
    let mut steps: Vec<ParallelStep> = Vec::new();
    let mut pass_ends = Vec::new();

    if n % 2 == 0 {
        let lg = ceil_log2(n as u32) as usize;
        let doubling_step = |label: &[AgentId], s: usize| -> ParallelStep {
            let calls = (0..n / 2)
                .map(|i| (label[pos(2 * i + 1, n)], label[pos(2 * i + (1 << s), n)]));
            ParallelStep::new(calls).expect("doubling steps are matchings")
        };
        for s in 1..=lg {
            steps.push(doubling_step(&label, s));
        }
        pass_ends.push(steps.len());
        for _ in 2..=d {
            // the final pairing of the previous pass becomes step 1
            let old = label.clone();
            for i in 0..n / 2 {
                label[pos(2 * i + 2, n)] = old[pos(2 * i + (1 << lg), n)];
            }
            for s in 2..=lg {
                steps.push(doubling_step(&label, s));
            }
            pass_ends.push(steps.len());
        }
    } else {
        let first = 1usize << floor_log2(n as u32); // 2^floor(lg n)
        // fixed pairing: each leftover position gets the least unused
        // opposite-parity position in the power-of-two prefix
        let mut used = vec![false; first + 1];
        let mut pairing: Vec<(usize, usize)> = Vec::new();
        for q in first + 1..=n {
            let partner = (1..=first)
                .find(|p| p % 2 != q % 2 && !used[*p])
                .expect("prefix has room for every leftover agent");
            used[partner] = true;
            pairing.push((q, partner));
        }
        let pairing_step = |label: &[AgentId]| -> ParallelStep {
            ParallelStep::new(pairing.iter().map(|&(q, p)| (label[q], label[p])))
                .expect("pairing is injective")
        };
        steps.push(pairing_step(&label));
        pass_ends.push(steps.len());
        let lg_first = floor_log2(n as u32) as usize;
        for _ in 1..=d {
            for s in 1..=lg_first {
                let calls = (0..first / 2)
                    .map(|i| (label[pos(2 * i + 1, first)], label[pos(2 * i + (1 << s), first)]));
                steps.push(ParallelStep::new(calls).expect("doubling steps are matchings"));
            }
            steps.push(pairing_step(&label));
            pass_ends.push(steps.len());
        }
    }
    debug_assert_eq!(steps.len(), parallel_step_count(n as u16, d));
    Ok(Plan { mode: Mode::Parallel, items: PlanItems::Parallel(steps), pass_ends, relabeling })
}

fn is_permutation(ids: &[AgentId]) -> bool {
    let n = ids.len();
    let mut seen = vec![false; n];
    for v in ids {
        let idx = v.index();
        if idx >= n || seen[idx] {
            return false;
        }
        seen[idx] = true;
    }
    true
}

/// Picks the cheapest generator applicable to an instance whose goal set is
/// the full positive goal set `goal_t(n, depth_cap)`.
pub fn auto_select(instance: &ProblemInstance) -> Result<Plan, ProtocolError> {
    let n = instance.graph.n();
    let cap = instance.depth_cap;
    if cap < 2 || instance.goals != crate::epistemic::goal_t(n, cap) {
        return Err(ProtocolError::NotFullGossipGoals);
    }
    if n == 1 {
        // nothing to communicate
        return Ok(match instance.mode {
            Mode::Parallel => Plan::parallel(Vec::new()),
            mode => Plan::sequential(mode, Vec::new()),
        });
    }
    let d = cap - 1;
    match instance.mode {
        Mode::TwoWay => {
            if let Some((h1, h2)) = detect_k2_bipartite(&instance.graph) {
                let rest: Vec<AgentId> =
                    agents(n).filter(|v| *v != h1 && *v != h2).collect();
                let mid = rest.len().div_ceil(2);
                return bipartite_protocol((h1, h2), &rest[..mid], &rest[mid..], d);
            }
            if n >= 3 {
                if let Some(path) = hamiltonian_path(&instance.graph) {
                    return hamiltonian_protocol(&path, d);
                }
            }
            match spanning_tree(&instance.graph).expect("two-way graphs are undirected") {
                Some(tree) => spanning_tree_protocol(&tree, d),
                None => Err(ProtocolError::NoProtocol("graph is disconnected".into())),
            }
        }
        Mode::OneWay => {
            let mirror = instance.graph.mirror().map_err(|_| {
                ProtocolError::NoProtocol("one-way instances need a directed graph".into())
            })?;
            match hamiltonian_path(&mirror) {
                Some(path) => directional_protocol(&path, d),
                None => Err(ProtocolError::NoProtocol(
                    "mirror graph has no Hamiltonian path".into(),
                )),
            }
        }
        Mode::Parallel => match detect_balanced_bipartite(&instance.graph) {
            Some((big, small)) => parallel_protocol(&big, &small, d),
            None => Err(ProtocolError::NoProtocol(
                "graph has no balanced complete-bipartite subgraph".into(),
            )),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CommGraph;

    fn a(id: u16) -> AgentId {
        AgentId::new(id)
    }

    fn ids(v: std::ops::RangeInclusive<u16>) -> Vec<AgentId> {
        v.map(AgentId::new).collect()
    }

    #[test]
    fn spanning_tree_lengths_match_formula() {
        for (n, d, want) in [(5u16, 1usize, 7usize), (6, 2, 18), (2, 3, 3)] {
            let tree = spanning_tree(&CommGraph::path(n)).unwrap().unwrap();
            let plan = spanning_tree_protocol(&tree, d).unwrap();
            assert_eq!(plan.len(), want, "n={n} d={d}");
            assert_eq!(plan.len(), spanning_tree_length(n, d));
            assert_eq!(plan.pass_ends.len(), 2 * d);
        }
    }

    #[test]
    fn spanning_tree_degenerate_two_agents() {
        // each gather pass is just the root/child call; broadcast passes are empty
        let tree = spanning_tree(&CommGraph::path(2)).unwrap().unwrap();
        let plan = spanning_tree_protocol(&tree, 3).unwrap();
        let expected = vec![Action::two_way(a(1), a(2)); 3];
        assert_eq!(plan.actions().unwrap(), &expected[..]);
    }

    #[test]
    fn hamiltonian_lengths_match_formula() {
        for (n, d) in [(5u16, 1usize), (5, 2), (3, 1), (8, 4)] {
            let path = ids(1..=n);
            let plan = hamiltonian_protocol(&path, d).unwrap();
            assert_eq!(plan.len(), hamiltonian_length(n, d), "n={n} d={d}");
        }
        assert_eq!(hamiltonian_length(5, 1), 7);
        assert_eq!(hamiltonian_length(5, 2), 10);
        assert_eq!(hamiltonian_length(3, 1), 3);
    }

    #[test]
    fn hamiltonian_first_pass_scans_down_then_up() {
        let plan = hamiltonian_protocol(&ids(1..=4), 1).unwrap();
        let want = vec![
            Action::two_way(a(3), a(4)),
            Action::two_way(a(2), a(3)),
            Action::two_way(a(1), a(2)),
            Action::two_way(a(2), a(3)),
            Action::two_way(a(3), a(4)),
        ];
        assert_eq!(plan.actions().unwrap(), &want[..]);
    }

    #[test]
    fn bipartite_lengths_match_formula() {
        for (n, d, want) in [(6u16, 1usize, 8usize), (6, 2, 12), (4, 1, 4)] {
            let rest = ids(3..=n);
            let mid = rest.len().div_ceil(2);
            let plan =
                bipartite_protocol((a(1), a(2)), &rest[..mid], &rest[mid..], d).unwrap();
            assert_eq!(plan.len(), want);
            assert_eq!(plan.len(), bipartite_length(n, d));
            assert_eq!(plan.pass_ends.len(), d + 1);
        }
    }

    #[test]
    fn bipartite_rejects_empty_split() {
        let err = bipartite_protocol((a(1), a(2)), &[], &ids(3..=4), 1).unwrap_err();
        assert!(matches!(err, ProtocolError::InvalidParts(_)));
    }

    #[test]
    fn directional_lengths_match_formula() {
        for (n, d, want) in [(4u16, 1usize, 6usize), (3, 2, 6), (2, 1, 2)] {
            let plan = directional_protocol(&ids(1..=n), d).unwrap();
            assert_eq!(plan.len(), want);
            assert_eq!(plan.len(), directional_length(n, d));
        }
        let plan = directional_protocol(&ids(1..=2), 1).unwrap();
        let want = vec![Action::one_way(a(1), a(2)), Action::one_way(a(2), a(1))];
        assert_eq!(plan.actions().unwrap(), &want[..]);
    }

    #[test]
    fn parallel_step_counts_match_formula() {
        for (n, d, want) in
            [(8u16, 1usize, 3usize), (8, 2, 5), (13, 1, 5), (2, 1, 1), (2, 3, 1), (4, 2, 3), (7, 2, 7)]
        {
            let v1: Vec<AgentId> = (1..=n).filter(|x| x % 2 == 1).map(AgentId::new).collect();
            let v2: Vec<AgentId> = (1..=n).filter(|x| x % 2 == 0).map(AgentId::new).collect();
            let plan = parallel_protocol(&v1, &v2, d).unwrap();
            assert_eq!(plan.len(), want, "n={n} d={d}");
            assert_eq!(plan.len(), parallel_step_count(n, d));
            for step in plan.steps().unwrap() {
                for &(x, y) in step.calls() {
                    assert!(
                        (x.get() % 2) != (y.get() % 2),
                        "call {x}-{y} stays within a part"
                    );
                }
            }
        }
    }

    #[test]
    fn parallel_rejects_unbalanced_parts() {
        let err = parallel_protocol(&ids(1..=1), &ids(2..=4), 1).unwrap_err();
        assert!(matches!(err, ProtocolError::InvalidParts(_)));
    }

    #[test]
    fn generators_reject_zero_depth() {
        assert_eq!(hamiltonian_protocol(&ids(1..=3), 0), Err(ProtocolError::ZeroDepth));
        assert_eq!(directional_protocol(&ids(1..=3), 0), Err(ProtocolError::ZeroDepth));
    }
}

//! Plan execution and verification, feasibility screening, exhaustive
//! optimal search with minimality certificates, and the bounded planner for
//! goal sets with negations.

mod search;

pub use search::{
    min_parallel_steps, min_parallel_steps_with, search_optimal, search_optimal_with, solve_neg,
    solve_neg_with, AbsenceBound, NegSearchResult, SearchConfig, SearchOutcome,
};

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::epistemic::{
    agents, goal_t, initial_state, Action, AgentId, Fluent, KnowledgeState, Sign, SignedGoal,
};
use crate::graph::CommGraph;
use crate::protocols::{Mode, Plan, PlanItems};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("one-way instances need a directed graph; other modes an undirected one")]
    GraphDirectionMismatch,
    #[error("goal {goal} exceeds the depth cap {cap}")]
    GoalTooDeep { goal: String, cap: usize },
    #[error("goal {goal} mentions an agent beyond {n}")]
    GoalAgentOutOfRange { goal: String, n: u16 },
}

/// A gossip planning problem: topology, communication regime, signed goals,
/// tracked depth, and whether secret changes are permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    pub graph: CommGraph,
    pub mode: Mode,
    pub goals: BTreeSet<SignedGoal>,
    pub depth_cap: usize,
    pub allow_change: bool,
}

impl ProblemInstance {
    pub fn new(
        graph: CommGraph,
        mode: Mode,
        goals: BTreeSet<SignedGoal>,
        depth_cap: usize,
        allow_change: bool,
    ) -> Result<ProblemInstance, InstanceError> {
        assert!(depth_cap >= 1);
        if graph.is_directed() != (mode == Mode::OneWay) {
            return Err(InstanceError::GraphDirectionMismatch);
        }
        for g in &goals {
            if g.fluent.depth() > depth_cap {
                return Err(InstanceError::GoalTooDeep { goal: g.to_string(), cap: depth_cap });
            }
            let max = g
                .fluent
                .knowers()
                .iter()
                .map(|a| a.get())
                .max()
                .unwrap_or(0)
                .max(g.fluent.secret().get());
            if max > graph.n() {
                return Err(InstanceError::GoalAgentOutOfRange { goal: g.to_string(), n: graph.n() });
            }
        }
        Ok(ProblemInstance { graph, mode, goals, depth_cap, allow_change })
    }

    /// The full-gossip instance: every positive goal up to depth `d` on the
    /// given graph, tracked at cap `d + 1`.
    pub fn full_gossip(graph: CommGraph, mode: Mode, d: usize) -> ProblemInstance {
        assert!(d >= 1);
        let n = graph.n();
        ProblemInstance::new(graph, mode, goal_t(n, d + 1), d + 1, false)
            .expect("full gossip goals are well formed")
    }

    pub fn n(&self) -> u16 {
        self.graph.n()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("plan mode {plan} does not match instance mode {instance}")]
    ModeMismatch { plan: Mode, instance: Mode },
    #[error("item {index}: {action} is not a {mode} action")]
    WrongActionKind { index: usize, action: String, mode: Mode },
    #[error("item {index}: call {a} {b} uses a non-edge")]
    IllegalEdge { index: usize, a: AgentId, b: AgentId },
    #[error("item {index}: change actions are not allowed by this instance")]
    ChangeNotAllowed { index: usize },
}

/// Outcome of checking a plan against an instance's goals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub success: bool,
    /// First goal (in canonical order) that fails, when unsuccessful.
    pub failing_goal: Option<SignedGoal>,
    /// Stored-truth count after each action or step, when tracing.
    pub state_trace: Option<Vec<usize>>,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.success {
            write!(f, "success")?;
        } else {
            match &self.failing_goal {
                Some(g) => write!(f, "failure: goal {} not satisfied", g)?,
                None => write!(f, "failure")?,
            }
        }
        if let Some(trace) = &self.state_trace {
            write!(f, "; truths per item:")?;
            for t in trace {
                write!(f, " {}", t)?;
            }
        }
        Ok(())
    }
}

fn check_action(instance: &ProblemInstance, index: usize, action: &Action) -> Result<(), ExecError> {
    match *action {
        Action::TwoWay(i, j) => {
            if instance.mode != Mode::TwoWay {
                return Err(ExecError::WrongActionKind {
                    index,
                    action: action.to_string(),
                    mode: instance.mode,
                });
            }
            if !instance.graph.has_edge(i, j) {
                return Err(ExecError::IllegalEdge { index, a: i, b: j });
            }
        }
        Action::OneWay { from, to } => {
            if instance.mode != Mode::OneWay {
                return Err(ExecError::WrongActionKind {
                    index,
                    action: action.to_string(),
                    mode: instance.mode,
                });
            }
            if !instance.graph.has_edge(from, to) {
                return Err(ExecError::IllegalEdge { index, a: from, b: to });
            }
        }
        Action::Change(_) => {
            if !instance.allow_change {
                return Err(ExecError::ChangeNotAllowed { index });
            }
        }
    }
    Ok(())
}

/// Runs a plan from the initial state, checking every call against the
/// instance graph. Optionally records the stored-truth count after each item.
pub fn execute_traced(
    instance: &ProblemInstance,
    plan: &Plan,
    trace: bool,
) -> Result<(KnowledgeState, Option<Vec<usize>>), ExecError> {
    if plan.mode != instance.mode {
        return Err(ExecError::ModeMismatch { plan: plan.mode, instance: instance.mode });
    }
    let mut st = initial_state(instance.n(), instance.depth_cap);
    let mut counts = trace.then(Vec::new);
    match &plan.items {
        PlanItems::Sequential(actions) => {
            for (index, action) in actions.iter().enumerate() {
                check_action(instance, index, action)?;
                st = st.apply(action);
                if let Some(c) = counts.as_mut() {
                    c.push(st.truth_count());
                }
            }
        }
        PlanItems::Parallel(steps) => {
            for (index, step) in steps.iter().enumerate() {
                for &(i, j) in step.calls() {
                    if !instance.graph.has_edge(i, j) {
                        return Err(ExecError::IllegalEdge { index, a: i, b: j });
                    }
                }
                st = st.apply_parallel_step(step);
                if let Some(c) = counts.as_mut() {
                    c.push(st.truth_count());
                }
            }
        }
    }
    Ok((st, counts))
}

pub fn execute(instance: &ProblemInstance, plan: &Plan) -> Result<KnowledgeState, ExecError> {
    execute_traced(instance, plan, false).map(|(st, _)| st)
}

/// Executes the plan and evaluates every goal on the final state.
pub fn verify(instance: &ProblemInstance, plan: &Plan) -> Result<VerificationReport, ExecError> {
    verify_traced(instance, plan, false)
}

pub fn verify_traced(
    instance: &ProblemInstance,
    plan: &Plan,
    trace: bool,
) -> Result<VerificationReport, ExecError> {
    let (st, state_trace) = execute_traced(instance, plan, trace)?;
    for goal in &instance.goals {
        let ok = st.satisfies(goal).expect("instance validation bounds goal depth");
        if !ok {
            return Ok(VerificationReport { success: false, failing_goal: Some(goal.clone()), state_trace });
        }
    }
    Ok(VerificationReport { success: true, failing_goal: None, state_trace })
}

/// A cheap, sound (not complete) unsatisfiability screen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// A negated self-evident fluent can never be satisfied.
    NegatedSelfEvident(SignedGoal),
    /// A positive goal whose agents cannot be linked by any call sequence.
    UnreachablePositiveGoal(SignedGoal),
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfeasibleReason::NegatedSelfEvident(g) => {
                write!(f, "goal {} negates a self-evident fluent", g)
            }
            InfeasibleReason::UnreachablePositiveGoal(g) => {
                write!(f, "goal {} needs a connecting walk the graph does not have", g)
            }
        }
    }
}

/// Flags goals that cannot be satisfied on this topology: negated
/// self-evident fluents, and positive goals whose knowledge walk cannot
/// exist. For purely positive goal sets the walk condition is exact.
pub fn quick_infeasible(instance: &ProblemInstance) -> Option<InfeasibleReason> {
    for g in &instance.goals {
        if g.sign == Sign::Negative && g.fluent.is_self_evident() {
            return Some(InfeasibleReason::NegatedSelfEvident(g.clone()));
        }
    }
    let reach = reachability(&instance.graph);
    for g in &instance.goals {
        if g.sign != Sign::Positive || g.fluent.is_self_evident() {
            continue;
        }
        // the secret must reach the innermost knower, then each enclosing one
        let mut stations: Vec<AgentId> = vec![g.fluent.secret()];
        stations.extend(g.fluent.knowers().iter().rev());
        let connected = stations
            .windows(2)
            .all(|w| reach[w[0].index()][w[1].index()]);
        if !connected {
            return Some(InfeasibleReason::UnreachablePositiveGoal(g.clone()));
        }
    }
    None
}

/// reach[a][b]: a call chain can carry knowledge from `a` to `b`.
fn reachability(graph: &CommGraph) -> Vec<Vec<bool>> {
    let n = graph.n() as usize;
    let mut reach = vec![vec![false; n]; n];
    for v in agents(graph.n()) {
        reach[v.index()][v.index()] = true;
        let mut queue = vec![v];
        while let Some(u) = queue.pop() {
            let next =
                if graph.is_directed() { graph.successors(u) } else { graph.neighbors(u) };
            for w in next {
                if !reach[v.index()][w.index()] {
                    reach[v.index()][w.index()] = true;
                    queue.push(w);
                }
            }
        }
    }
    reach
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("hierarchy needs at least one agent")]
    Empty,
    #[error("agents must be numbered 1..=n without gaps")]
    NonContiguousAgents,
}

/// Builds the upward-information hierarchy instance and its sweep plan: each
/// level in turn calls every agent one level up, after which the upper level
/// changes its secrets. Upward knowledge goals are positive, downward ones
/// negative; same-level knowledge is unconstrained.
pub fn hierarchy_demo(
    levels: &BTreeMap<AgentId, u32>,
) -> Result<(ProblemInstance, Plan), HierarchyError> {
    if levels.is_empty() {
        return Err(HierarchyError::Empty);
    }
    let n = levels.len() as u16;
    for (expected, actual) in agents(n).zip(levels.keys()) {
        if expected != *actual {
            return Err(HierarchyError::NonContiguousAgents);
        }
    }
    let mut ranks: Vec<u32> = levels.values().copied().collect();
    ranks.sort_unstable();
    ranks.dedup();
    let tier = |a: AgentId| ranks.binary_search(&levels[&a]).unwrap();
    let members = |t: usize| -> Vec<AgentId> { agents(n).filter(|a| tier(*a) == t).collect() };

    let mut graph = CommGraph::undirected(n);
    let mut goals = BTreeSet::new();
    for i in agents(n) {
        for j in agents(n) {
            match tier(i).cmp(&tier(j)) {
                std::cmp::Ordering::Less => {
                    if tier(j) == tier(i) + 1 {
                        graph.add_edge(i, j).unwrap();
                    }
                    goals.insert(SignedGoal::positive(Fluent::new([j], i)));
                    goals.insert(SignedGoal::negative(Fluent::new([i], j)));
                }
                _ => {}
            }
        }
    }

    let mut actions = Vec::new();
    for t in 0..ranks.len().saturating_sub(1) {
        for i in members(t) {
            for j in members(t + 1) {
                actions.push(Action::two_way(i, j));
            }
        }
        for j in members(t + 1) {
            actions.push(Action::change(j));
        }
    }

    let instance = ProblemInstance::new(graph, Mode::TwoWay, goals, 1, true)
        .expect("hierarchy goals are depth 1");
    let plan = Plan::sequential(Mode::TwoWay, actions);
    Ok((instance, plan))
}

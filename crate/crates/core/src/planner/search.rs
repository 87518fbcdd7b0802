//! Iterative-deepening exhaustive plan search.
//!
//! One engine serves three fronts: shortest sequential plans with a
//! minimality certificate, shortest parallel schedules over matchings, and
//! the bounded planner for goal sets with negations. States are memoized
//! with the largest remaining budget already proven fruitless, actions that
//! leave the state unchanged are skipped, states that can no longer avoid a
//! violated negative goal are cut, and an admissible distance bound prunes
//! branches that cannot finish in time. Disabling pruning degenerates to
//! plain exhaustive enumeration.

use std::hash::{Hash, Hasher};

use rustc_hash::{FxHashMap, FxHasher};

use crate::epistemic::{
    agents, initial_state, Action, AgentId, Fluent, KnowledgeState, ParallelStep, Sign,
};
use crate::graph::CommGraph;
use crate::planner::{quick_infeasible, ProblemInstance};
use crate::protocols::{Mode, Plan};

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Node expansions before giving up; `None` is unlimited.
    pub max_nodes: Option<u64>,
    /// Worker threads fanning out over top-level branches. Results are
    /// identical for any worker count.
    pub threads: usize,
    /// Disable to fall back to unpruned exhaustive enumeration.
    pub pruning: bool,
    /// Visit actions in reverse order; a tie-breaking knob for exploring
    /// alternative optimal plans.
    pub reverse_actions: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig { max_nodes: None, threads: 1, pruning: true, reverse_actions: false }
    }
}

/// How much of the length spectrum an unsuccessful search covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsenceBound {
    /// No plan with at most this many items exists.
    UpTo(usize),
    /// The search tree bottomed out: no plan of any length exists.
    AnyLength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A shortest plan; every length below `exhausted_below` was proven
    /// empty, certifying minimality.
    Found { plan: Plan, exhausted_below: usize },
    Absent(AbsenceBound),
    /// Node budget ran out; lengths up to `proven_absent_up_to` were settled
    /// before that.
    BudgetExceeded { proven_absent_up_to: Option<usize> },
}

impl SearchOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            SearchOutcome::Found { plan, .. } => Some(plan),
            _ => None,
        }
    }
}

/// Outcome of the bounded planner together with the bound it ran to. An
/// `Absent` outcome within the bound is a proof of unsolvability; for
/// parallel instances the bound is carried over from the sequential analysis
/// and flagged as conjectural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegSearchResult {
    pub outcome: SearchOutcome,
    pub bound: usize,
    pub bound_is_conjectural: bool,
}

enum Assessment {
    /// No completion from here can ever succeed.
    DeadEnd,
    /// Any completion needs at least this many more items.
    AtLeast(usize),
}

trait Space: Sync {
    type St: Clone + Eq + Hash + Send + Sync;

    fn start(&self) -> Self::St;
    fn item_count(&self) -> usize;
    fn apply(&self, st: &Self::St, idx: usize) -> Self::St;
    fn satisfied(&self, st: &Self::St) -> bool;
    fn assess(&self, st: &Self::St) -> Assessment;
}

const NEVER: u32 = u32::MAX;

struct Engine<'a, S: Space> {
    space: &'a S,
    pruning: bool,
    order: &'a [usize],
    /// state → largest remaining budget fully explored without success;
    /// `NEVER` marks states with no successful completion of any length.
    memo: FxHashMap<S::St, u32>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl<'a, S: Space> Engine<'a, S> {
    fn new(space: &'a S, order: &'a [usize], pruning: bool, budget: u64) -> Engine<'a, S> {
        Engine { space, pruning, order, memo: FxHashMap::default(), nodes: 0, budget, aborted: false }
    }

    /// Depth-first exploration; returns (found, cut_by_depth). A subtree
    /// with no depth cut is exhausted for good, independent of the limit.
    fn dfs(&mut self, st: &S::St, remaining: u32, plan: &mut Vec<usize>) -> (bool, bool) {
        if self.space.satisfied(st) {
            return (true, false);
        }
        if self.pruning {
            match self.space.assess(st) {
                Assessment::DeadEnd => return (false, false),
                Assessment::AtLeast(k) => {
                    if k as u64 > remaining as u64 {
                        return (false, true);
                    }
                }
            }
        }
        if remaining == 0 {
            return (false, true);
        }
        if self.pruning {
            if let Some(&rec) = self.memo.get(st) {
                if rec == NEVER {
                    return (false, false);
                }
                if rec >= remaining {
                    return (false, true);
                }
            }
        }
        if self.aborted {
            return (false, true);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return (false, true);
        }
        let mut cut = false;
        for pos in 0..self.order.len() {
            let idx = self.order[pos];
            let next = self.space.apply(st, idx);
            if self.pruning && next == *st {
                continue; // goals see only the final state, so no-ops can go
            }
            plan.push(idx);
            let (found, sub_cut) = self.dfs(&next, remaining - 1, plan);
            if found {
                return (true, false);
            }
            plan.pop();
            cut |= sub_cut;
        }
        if self.pruning && !self.aborted {
            let value = if cut { remaining } else { NEVER };
            let entry = self.memo.entry(st.clone()).or_insert(0);
            if *entry != NEVER && (value == NEVER || value > *entry) {
                *entry = value;
            }
        }
        (false, cut)
    }
}

enum RawOutcome {
    Found { indices: Vec<usize>, exhausted_below: usize },
    Absent(AbsenceBound),
    Budget { proven_absent_up_to: Option<usize> },
}

/// Iterative deepening over the item space, fanning out across top-level
/// branches when more than one worker is configured. Memo tables persist
/// across depth limits, so each iteration pays mostly for new territory.
fn run<S: Space>(space: &S, cfg: &SearchConfig, max_len: usize) -> RawOutcome {
    let start = space.start();
    if space.satisfied(&start) {
        return RawOutcome::Found { indices: Vec::new(), exhausted_below: 0 };
    }
    if cfg.pruning {
        if let Assessment::DeadEnd = space.assess(&start) {
            return RawOutcome::Absent(AbsenceBound::AnyLength);
        }
    }
    let mut order: Vec<usize> = (0..space.item_count()).collect();
    if cfg.reverse_actions {
        order.reverse();
    }
    let workers = cfg.threads.max(1).min(order.len().max(1));
    let budget_each = cfg.max_nodes.map_or(u64::MAX, |b| (b / workers as u64).max(1));
    let mut engines: Vec<Engine<S>> =
        (0..workers).map(|_| Engine::new(space, &order, cfg.pruning, budget_each)).collect();

    for limit in 1..=max_len {
        // each worker owns the top-level branches congruent to its index
        let explore = |worker: usize, eng: &mut Engine<S>| {
            let mut found: Option<(usize, Vec<usize>)> = None;
            let mut cut = false;
            for (rank, &idx) in order.iter().enumerate() {
                if rank % workers != worker {
                    continue;
                }
                let next = space.apply(&start, idx);
                if cfg.pruning && next == start {
                    continue;
                }
                let mut plan = vec![idx];
                let (hit, sub_cut) = eng.dfs(&next, limit as u32 - 1, &mut plan);
                cut |= sub_cut;
                if hit {
                    found = Some((rank, plan));
                    break;
                }
            }
            (found, cut)
        };

        let results: Vec<(Option<(usize, Vec<usize>)>, bool)> = if workers == 1 {
            vec![explore(0, &mut engines[0])]
        } else {
            let explore = &explore;
            std::thread::scope(|scope| {
                let handles: Vec<_> = engines
                    .iter_mut()
                    .enumerate()
                    .map(|(w, eng)| scope.spawn(move || explore(w, eng)))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
            })
        };

        let best = results.iter().filter_map(|(f, _)| f.clone()).min_by_key(|(rank, _)| *rank);
        if let Some((_, indices)) = best {
            return RawOutcome::Found { indices, exhausted_below: limit };
        }
        if engines.iter().any(|e| e.aborted) {
            return RawOutcome::Budget { proven_absent_up_to: Some(limit - 1) };
        }
        if !results.iter().any(|(_, cut)| *cut) {
            return RawOutcome::Absent(AbsenceBound::AnyLength);
        }
    }
    RawOutcome::Absent(AbsenceBound::UpTo(max_len))
}

/// Transport distances: `dist[a][b]` is the least number of calls (or
/// parallel steps) needed to carry knowledge from `a` to `b`.
fn transport_distances(graph: &CommGraph) -> Vec<Vec<u32>> {
    let n = graph.n() as usize;
    let mut dist = vec![vec![u32::MAX; n]; n];
    for v in agents(graph.n()) {
        let row = &mut dist[v.index()];
        row[v.index()] = 0;
        let mut queue = std::collections::VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let next = if graph.is_directed() { graph.successors(u) } else { graph.neighbors(u) };
            for w in next {
                if row[w.index()] == u32::MAX {
                    row[w.index()] = row[u.index()] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    dist
}

/// Sequential action set of an instance in the canonical search order:
/// lexicographic by (min endpoint, max endpoint, kind), calls before the
/// change action on the same agent pair position.
fn sequential_actions(instance: &ProblemInstance) -> Vec<Action> {
    let mut acts: Vec<Action> = Vec::new();
    match instance.mode {
        Mode::TwoWay => {
            for (a, b) in instance.graph.edges() {
                acts.push(Action::two_way(a, b));
            }
        }
        Mode::OneWay => {
            for (a, b) in instance.graph.edges() {
                acts.push(Action::one_way(a, b));
            }
        }
        Mode::Parallel => unreachable!("sequential actions requested for parallel mode"),
    }
    if instance.allow_change {
        for a in agents(instance.n()) {
            acts.push(Action::change(a));
        }
    }
    acts.sort_by_key(|a| match *a {
        Action::TwoWay(i, j) => (i.get(), j.get(), 0u8, 0u16),
        Action::OneWay { from, to } => {
            (from.get().min(to.get()), from.get().max(to.get()), 0, from.get())
        }
        Action::Change(i) => (i.get(), i.get(), 1, 0),
    });
    acts
}

/// All nonempty matchings of an undirected graph, in lexicographic order
/// over the sorted edge list.
fn all_matchings(graph: &CommGraph) -> Vec<ParallelStep> {
    let edges: Vec<(AgentId, AgentId)> = graph.edges().collect();
    let mut out = Vec::new();
    let mut current: Vec<(AgentId, AgentId)> = Vec::new();
    fn rec(
        edges: &[(AgentId, AgentId)],
        from: usize,
        current: &mut Vec<(AgentId, AgentId)>,
        out: &mut Vec<ParallelStep>,
    ) {
        for k in from..edges.len() {
            let (a, b) = edges[k];
            let clash = current.iter().any(|&(x, y)| x == a || x == b || y == a || y == b);
            if clash {
                continue;
            }
            current.push((a, b));
            out.push(ParallelStep::new(current.iter().copied()).expect("disjoint by construction"));
            rec(edges, k + 1, current, out);
            current.pop();
        }
    }
    rec(&edges, 0, &mut current, &mut out);
    out
}

/// Knowledge state with an order-independent hash, usable as a memo key.
#[derive(Clone, PartialEq, Eq)]
struct StateKey(KnowledgeState);

impl Hash for StateKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u16(self.0.n());
        state.write_usize(self.0.depth_cap());
        state.write_usize(self.0.truth_count());
        let mut acc: u64 = 0;
        for f in self.0.truths() {
            let mut h = FxHasher::default();
            f.hash(&mut h);
            acc ^= h.finish();
        }
        state.write_u64(acc);
    }
}

/// Shared goal bookkeeping for the knowledge-state spaces.
struct GoalEval {
    /// Positive goals, with vacuous (self-evident) ones dropped.
    pos: Vec<Fluent>,
    neg: Vec<Fluent>,
    allow_change: bool,
    dist: Vec<Vec<u32>>,
}

impl GoalEval {
    fn new(instance: &ProblemInstance) -> GoalEval {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for g in &instance.goals {
            match g.sign {
                Sign::Positive => {
                    if !g.fluent.is_self_evident() {
                        pos.push(g.fluent.clone());
                    }
                }
                Sign::Negative => neg.push(g.fluent.clone()),
            }
        }
        GoalEval {
            pos,
            neg,
            allow_change: instance.allow_change,
            dist: transport_distances(&instance.graph),
        }
    }

    fn satisfied(&self, st: &KnowledgeState) -> bool {
        self.pos.iter().all(|f| st.is_true(f).expect("goal depth within cap"))
            && !self.neg.iter().any(|f| st.is_true(f).expect("goal depth within cap"))
    }

    fn assess(&self, st: &KnowledgeState) -> Assessment {
        let n = st.n() as usize;
        // who currently knows each secret (depth-1 knowledge only)
        let mut holders: Vec<Vec<bool>> = Vec::new();
        let needs_holders = self.pos.iter().any(|f| f.depth() == 1);
        if needs_holders {
            holders = vec![vec![false; n]; n];
            for (s, row) in holders.iter_mut().enumerate() {
                row[s] = true;
            }
            for t in st.truths() {
                if t.depth() == 1 {
                    holders[t.secret().index()][t.knowers()[0].index()] = true;
                }
            }
        }
        let mut calls_needed = 0usize;
        for f in &self.pos {
            if st.is_true(f).expect("goal depth within cap") {
                continue;
            }
            let need = if f.depth() == 1 {
                let target = f.knowers()[0].index();
                let secret = f.secret().index();
                (0..n)
                    .filter(|&k| holders[secret][k])
                    .map(|k| self.dist[k][target])
                    .min()
                    .unwrap_or(u32::MAX)
            } else {
                1
            };
            if need == u32::MAX {
                return Assessment::DeadEnd; // no walk can deliver this secret
            }
            calls_needed = calls_needed.max(need as usize);
        }
        let mut polluted = 0usize;
        let mut seen_secret = vec![false; n];
        for f in &self.neg {
            if st.is_true(f).expect("goal depth within cap") {
                if !self.allow_change {
                    return Assessment::DeadEnd; // positive fluents never decay
                }
                if !seen_secret[f.secret().index()] {
                    seen_secret[f.secret().index()] = true;
                    polluted += 1; // one change per tainted secret, at minimum
                }
            }
        }
        Assessment::AtLeast(calls_needed + polluted)
    }
}

struct FluentSpace<'a> {
    instance: &'a ProblemInstance,
    actions: Vec<Action>,
    eval: GoalEval,
}

impl<'a> FluentSpace<'a> {
    fn new(instance: &'a ProblemInstance) -> FluentSpace<'a> {
        FluentSpace { instance, actions: sequential_actions(instance), eval: GoalEval::new(instance) }
    }
}

impl Space for FluentSpace<'_> {
    type St = StateKey;

    fn start(&self) -> StateKey {
        StateKey(initial_state(self.instance.n(), self.instance.depth_cap))
    }

    fn item_count(&self) -> usize {
        self.actions.len()
    }

    fn apply(&self, st: &StateKey, idx: usize) -> StateKey {
        StateKey(st.0.clone().apply(&self.actions[idx]))
    }

    fn satisfied(&self, st: &StateKey) -> bool {
        self.eval.satisfied(&st.0)
    }

    fn assess(&self, st: &StateKey) -> Assessment {
        self.eval.assess(&st.0)
    }
}

struct MatchingSpace<'a> {
    instance: &'a ProblemInstance,
    steps: Vec<ParallelStep>,
    eval: GoalEval,
}

impl<'a> MatchingSpace<'a> {
    fn new(instance: &'a ProblemInstance) -> MatchingSpace<'a> {
        MatchingSpace {
            instance,
            steps: all_matchings(&instance.graph),
            eval: GoalEval::new(instance),
        }
    }
}

impl Space for MatchingSpace<'_> {
    type St = StateKey;

    fn start(&self) -> StateKey {
        StateKey(initial_state(self.instance.n(), self.instance.depth_cap))
    }

    fn item_count(&self) -> usize {
        self.steps.len()
    }

    fn apply(&self, st: &StateKey, idx: usize) -> StateKey {
        StateKey(st.0.clone().apply_parallel_step(&self.steps[idx]))
    }

    fn satisfied(&self, st: &StateKey) -> bool {
        self.eval.satisfied(&st.0)
    }

    fn assess(&self, st: &StateKey) -> Assessment {
        self.eval.assess(&st.0)
    }
}

/// Bit-row state for depth-cap-1 instances on at most 32 agents: one secret
/// bitmask per agent, own secret always present. Behaviorally identical to
/// the fluent-set space at cap 1, at a fraction of the cost.
struct DenseSpace {
    n: usize,
    actions: Vec<Action>,
    pos: Vec<(usize, usize)>,
    neg: Vec<(usize, usize)>,
    allow_change: bool,
    dist: Vec<Vec<u32>>,
}

impl DenseSpace {
    fn applies_to(instance: &ProblemInstance) -> bool {
        instance.depth_cap == 1 && instance.n() <= 32 && instance.mode != Mode::Parallel
    }

    fn new(instance: &ProblemInstance) -> DenseSpace {
        assert!(DenseSpace::applies_to(instance));
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for g in &instance.goals {
            let pair = (g.fluent.knowers()[0].index(), g.fluent.secret().index());
            match g.sign {
                Sign::Positive => {
                    if !g.fluent.is_self_evident() {
                        pos.push(pair);
                    }
                }
                Sign::Negative => neg.push(pair),
            }
        }
        DenseSpace {
            n: instance.n() as usize,
            actions: sequential_actions(instance),
            pos,
            neg,
            allow_change: instance.allow_change,
            dist: transport_distances(&instance.graph),
        }
    }
}

impl Space for DenseSpace {
    type St = Vec<u32>;

    fn start(&self) -> Vec<u32> {
        (0..self.n).map(|i| 1u32 << i).collect()
    }

    fn item_count(&self) -> usize {
        self.actions.len()
    }

    fn apply(&self, st: &Vec<u32>, idx: usize) -> Vec<u32> {
        let mut next = st.clone();
        match self.actions[idx] {
            Action::TwoWay(i, j) => {
                let merged = next[i.index()] | next[j.index()];
                next[i.index()] = merged;
                next[j.index()] = merged;
            }
            Action::OneWay { from, to } => {
                next[to.index()] |= next[from.index()];
            }
            Action::Change(c) => {
                let bit = 1u32 << c.index();
                for (k, row) in next.iter_mut().enumerate() {
                    if k != c.index() {
                        *row &= !bit;
                    }
                }
            }
        }
        next
    }

    fn satisfied(&self, st: &Vec<u32>) -> bool {
        self.pos.iter().all(|&(k, s)| st[k] >> s & 1 == 1)
            && !self.neg.iter().any(|&(k, s)| st[k] >> s & 1 == 1)
    }

    fn assess(&self, st: &Vec<u32>) -> Assessment {
        let mut calls_needed = 0usize;
        for &(target, secret) in &self.pos {
            if st[target] >> secret & 1 == 1 {
                continue;
            }
            let need = (0..self.n)
                .filter(|&k| st[k] >> secret & 1 == 1)
                .map(|k| self.dist[k][target])
                .min()
                .unwrap_or(u32::MAX);
            if need == u32::MAX {
                return Assessment::DeadEnd;
            }
            calls_needed = calls_needed.max(need as usize);
        }
        let mut polluted_mask = 0u32;
        for &(k, s) in &self.neg {
            if st[k] >> s & 1 == 1 {
                if !self.allow_change {
                    return Assessment::DeadEnd;
                }
                polluted_mask |= 1 << s;
            }
        }
        Assessment::AtLeast(calls_needed + polluted_mask.count_ones() as usize)
    }
}

fn sequential_outcome(
    raw: RawOutcome,
    mode: Mode,
    actions: &[Action],
) -> SearchOutcome {
    match raw {
        RawOutcome::Found { indices, exhausted_below } => {
            let plan =
                Plan::sequential(mode, indices.into_iter().map(|i| actions[i].clone()).collect());
            SearchOutcome::Found { plan, exhausted_below }
        }
        RawOutcome::Absent(bound) => SearchOutcome::Absent(bound),
        RawOutcome::Budget { proven_absent_up_to } => {
            SearchOutcome::BudgetExceeded { proven_absent_up_to }
        }
    }
}

/// Shortest sequential plan for the instance, up to `max_len` actions, with
/// the exhausted shorter lengths as a minimality certificate.
pub fn search_optimal(instance: &ProblemInstance, max_len: usize) -> SearchOutcome {
    search_optimal_with(instance, max_len, &SearchConfig::default())
}

pub fn search_optimal_with(
    instance: &ProblemInstance,
    max_len: usize,
    cfg: &SearchConfig,
) -> SearchOutcome {
    assert!(instance.mode != Mode::Parallel, "search_optimal handles sequential modes");
    if DenseSpace::applies_to(instance) {
        let space = DenseSpace::new(instance);
        let raw = run(&space, cfg, max_len);
        sequential_outcome(raw, instance.mode, &space.actions)
    } else {
        let space = FluentSpace::new(instance);
        let raw = run(&space, cfg, max_len);
        sequential_outcome(raw, instance.mode, &space.actions)
    }
}

/// Fewest parallel steps for the instance, searching over all matchings of
/// the graph per step.
pub fn min_parallel_steps(instance: &ProblemInstance, max_steps: usize) -> SearchOutcome {
    min_parallel_steps_with(instance, max_steps, &SearchConfig::default())
}

pub fn min_parallel_steps_with(
    instance: &ProblemInstance,
    max_steps: usize,
    cfg: &SearchConfig,
) -> SearchOutcome {
    assert!(instance.mode == Mode::Parallel, "min_parallel_steps needs a parallel instance");
    let space = MatchingSpace::new(instance);
    match run(&space, cfg, max_steps) {
        RawOutcome::Found { indices, exhausted_below } => {
            let plan =
                Plan::parallel(indices.into_iter().map(|i| space.steps[i].clone()).collect());
            SearchOutcome::Found { plan, exhausted_below }
        }
        RawOutcome::Absent(bound) => SearchOutcome::Absent(bound),
        RawOutcome::Budget { proven_absent_up_to } => {
            SearchOutcome::BudgetExceeded { proven_absent_up_to }
        }
    }
}

/// Complete bounded planner for mixed-sign goal sets: iterative deepening up
/// to `m·d·(n−1)` actions (`n + m·d·(n−1)` when secret changes are allowed),
/// which suffices to settle solvability outright for sequential instances.
pub fn solve_neg(instance: &ProblemInstance) -> NegSearchResult {
    solve_neg_with(instance, &SearchConfig::default())
}

pub fn solve_neg_with(instance: &ProblemInstance, cfg: &SearchConfig) -> NegSearchResult {
    let m = instance.goals.len();
    let d = instance.goals.iter().map(|g| g.fluent.depth()).max().unwrap_or(0);
    let mut bound = m * d * (instance.n() as usize).saturating_sub(1);
    if instance.allow_change {
        bound += instance.n() as usize;
    }
    let conjectural = instance.mode == Mode::Parallel;
    if quick_infeasible(instance).is_some() {
        return NegSearchResult {
            outcome: SearchOutcome::Absent(AbsenceBound::AnyLength),
            bound,
            bound_is_conjectural: conjectural,
        };
    }
    let outcome = match instance.mode {
        Mode::Parallel => min_parallel_steps_with(instance, bound, cfg),
        _ => search_optimal_with(instance, bound, cfg),
    };
    NegSearchResult { outcome, bound, bound_is_conjectural: conjectural }
}

//! Depth-bounded epistemic gossip: who knows what, who knows who knows what,
//! and how few calls it takes to get there.
//!
//! The library models nested knowledge of agent secrets up to a depth cap,
//! applies two-way calls, one-way sends, parallel call rounds, and secret
//! changes, generates the optimal protocol families for each communication
//! regime, searches exhaustively for shortest plans with minimality
//! certificates at small scale, plans for goal sets that mix required and
//! forbidden knowledge, and reduces SAT to the negative-goal problem.

pub mod epistemic;
pub mod graph;
pub mod planner;
pub mod protocols;
pub mod reduction;

pub use epistemic::{
    agents, goal_t, initial_state, Action, AgentId, EpistemicError, Fluent, KnowledgeState,
    ParallelStep, Sign, SignedGoal,
};
pub use graph::{
    detect_balanced_bipartite, detect_k2_bipartite, hamiltonian_path, spanning_tree, CommGraph,
    GraphError, RootedTree,
};
pub use planner::{
    execute, hierarchy_demo, min_parallel_steps, min_parallel_steps_with, quick_infeasible,
    search_optimal, search_optimal_with, solve_neg, solve_neg_with, verify, verify_traced,
    AbsenceBound, ExecError, InfeasibleReason, NegSearchResult, ProblemInstance, SearchConfig,
    SearchOutcome, VerificationReport,
};
pub use protocols::{
    auto_select, bipartite_protocol, directional_protocol, hamiltonian_protocol,
    parallel_protocol, spanning_tree_protocol, Mode, Plan, PlanItems, ProtocolError,
};
pub use reduction::{
    extract_assignment, parse_dimacs, sat_oracle, sat_to_gossip, CnfFormula, ReductionMap,
};

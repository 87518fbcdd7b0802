//! SAT to gossip-with-negative-goals reduction.
//!
//! Each propositional variable `x` becomes a four-node gadget: literal nodes
//! for `x` and `¬x` bridged by a marker agent (whose secret must reach the
//! monitor agent through exactly one literal side) and a monitor agent that
//! must never learn the source secret. Clause agents hang off their literal
//! nodes and must learn the source secret without picking up any marker
//! secret. Solution plans then correspond exactly to satisfying assignments:
//! the source secret travels through a literal node if and only if that
//! literal is true.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::epistemic::{Action, AgentId, Fluent, SignedGoal};
use crate::graph::CommGraph;
use crate::planner::ProblemInstance;
use crate::protocols::{Mode, Plan, PlanItems};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("literal {0} is out of range for the declared variable count")]
    LiteralOutOfRange(i32),
    #[error("literal 0 is reserved as the clause terminator")]
    ZeroLiteral,
}

/// A CNF formula over variables `1..=var_count`, as signed DIMACS-style
/// literals. Construction normalizes: duplicate literals collapse and
/// tautological clauses (containing both `x` and `¬x`) are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    var_count: u32,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(var_count: u32, clauses: Vec<Vec<i32>>) -> Result<CnfFormula, CnfError> {
        let mut normalized = Vec::new();
        for (idx, clause) in clauses.into_iter().enumerate() {
            if clause.is_empty() {
                return Err(CnfError::EmptyClause(idx));
            }
            let mut lits = clause;
            for &lit in &lits {
                if lit == 0 {
                    return Err(CnfError::ZeroLiteral);
                }
                if lit.unsigned_abs() > var_count {
                    return Err(CnfError::LiteralOutOfRange(lit));
                }
            }
            lits.sort_by_key(|l| (l.unsigned_abs(), l.is_negative()));
            lits.dedup();
            let tautological =
                lits.windows(2).any(|w| w[0].unsigned_abs() == w[1].unsigned_abs());
            if !tautological {
                normalized.push(lits);
            }
        }
        Ok(CnfFormula { var_count, clauses: normalized })
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assert_eq!(assignment.len(), self.var_count as usize);
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| assignment[(lit.unsigned_abs() - 1) as usize] == (lit > 0))
        })
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.var_count, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in clause {
                write!(f, "{} ", lit)?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {0}: expected 'p cnf <vars> <clauses>' header")]
    BadHeader(usize),
    #[error("no 'p cnf' header found")]
    MissingHeader,
    #[error("line {line}: cannot parse literal {token:?}")]
    BadLiteral { line: usize, token: String },
    #[error("last clause is missing its terminating 0")]
    UnterminatedClause,
    #[error("header declares {declared} clauses but {found} were given")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// Standard DIMACS CNF: `c` comment lines, one `p cnf V C` header,
/// whitespace-separated signed literals with 0 terminating each clause. A
/// `%` line ends the input early.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    'lines: for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] => v.parse::<u32>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some(h) if header.is_none() => header = Some(h),
                _ => return Err(DimacsError::BadHeader(lineno + 1)),
            }
            continue;
        }
        if header.is_none() {
            return Err(DimacsError::MissingHeader);
        }
        for token in line.split_whitespace() {
            if token == "%" {
                break 'lines;
            }
            let lit: i32 = token
                .parse()
                .map_err(|_| DimacsError::BadLiteral { line: lineno + 1, token: token.into() })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    let (vars, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCountMismatch { declared, found: clauses.len() });
    }
    Ok(CnfFormula::new(vars, clauses)?)
}

/// Agents of one variable gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableGadget {
    /// Literal node for `x`.
    pub positive: AgentId,
    /// Literal node for `¬x`.
    pub negative: AgentId,
    /// Its secret must reach the monitor through exactly one literal node.
    pub marker: AgentId,
    /// Must learn the marker secret but never the source secret.
    pub monitor: AgentId,
}

/// Agent roles of a reduced instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionMap {
    pub source: AgentId,
    pub variables: Vec<VariableGadget>,
    pub clause_nodes: Vec<AgentId>,
}

impl ReductionMap {
    pub fn agent_count(&self) -> u16 {
        1 + 4 * self.variables.len() as u16 + self.clause_nodes.len() as u16
    }

    pub fn literal_node(&self, lit: i32) -> AgentId {
        let gadget = &self.variables[(lit.unsigned_abs() - 1) as usize];
        if lit > 0 {
            gadget.positive
        } else {
            gadget.negative
        }
    }

    /// Which variable (zero-based) and polarity a literal node stands for.
    pub fn literal_of_node(&self, agent: AgentId) -> Option<(usize, bool)> {
        self.variables.iter().enumerate().find_map(|(k, g)| {
            if g.positive == agent {
                Some((k, true))
            } else if g.negative == agent {
                Some((k, false))
            } else {
                None
            }
        })
    }
}

/// Builds the gossip instance equivalent to the formula: agents are the
/// source, four per variable, one per clause; goals route the source secret
/// to every clause while the gadgets forbid using both polarities of any
/// variable. Depth cap 1, two-way calls, no secret changes.
pub fn sat_to_gossip(cnf: &CnfFormula) -> (ProblemInstance, ReductionMap) {
    let v = cnf.var_count() as u16;
    let c = cnf.clauses().len() as u16;
    let n = 1 + 4 * v + c;
    let source = AgentId::new(1);
    let variables: Vec<VariableGadget> = (0..v)
        .map(|k| VariableGadget {
            positive: AgentId::new(2 + 4 * k),
            negative: AgentId::new(3 + 4 * k),
            marker: AgentId::new(4 + 4 * k),
            monitor: AgentId::new(5 + 4 * k),
        })
        .collect();
    let clause_nodes: Vec<AgentId> = (0..c).map(|j| AgentId::new(1 + 4 * v + j + 1)).collect();
    let map = ReductionMap { source, variables, clause_nodes };

    let mut graph = CommGraph::undirected(n);
    for g in &map.variables {
        graph.add_edge(source, g.positive).unwrap();
        graph.add_edge(source, g.negative).unwrap();
        graph.add_edge(g.marker, g.positive).unwrap();
        graph.add_edge(g.marker, g.negative).unwrap();
        graph.add_edge(g.positive, g.monitor).unwrap();
        graph.add_edge(g.negative, g.monitor).unwrap();
    }
    for (j, clause) in cnf.clauses().iter().enumerate() {
        for &lit in clause {
            graph.add_edge(map.clause_nodes[j], map.literal_node(lit)).unwrap();
        }
    }

    let know = |who: AgentId, whose: AgentId| Fluent::new([who], whose);
    let mut goals: BTreeSet<SignedGoal> = BTreeSet::new();
    for &cj in &map.clause_nodes {
        goals.insert(SignedGoal::positive(know(cj, source)));
    }
    for g in &map.variables {
        goals.insert(SignedGoal::positive(know(g.monitor, g.marker)));
        goals.insert(SignedGoal::negative(know(g.monitor, source)));
    }
    for (j, clause) in cnf.clauses().iter().enumerate() {
        for &lit in clause {
            let g = &map.variables[(lit.unsigned_abs() - 1) as usize];
            goals.insert(SignedGoal::negative(know(map.clause_nodes[j], g.marker)));
        }
    }

    let instance = ProblemInstance::new(graph, Mode::TwoWay, goals, 1, false)
        .expect("reduction goals are depth 1 on a matching graph");
    (instance, map)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("brute-force oracle handles at most 20 variables, got {0}")]
    TooManyVariables(u32),
}

/// Exhaustive truth-table search; returns the least satisfying assignment.
pub fn sat_oracle(cnf: &CnfFormula) -> Result<Option<Vec<bool>>, OracleError> {
    let v = cnf.var_count();
    if v > 20 {
        return Err(OracleError::TooManyVariables(v));
    }
    for mask in 0u32..1 << v {
        let assignment: Vec<bool> = (0..v).map(|k| mask >> k & 1 == 1).collect();
        if cnf.is_satisfied_by(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("source secret transited both literal nodes of variable {0}")]
    AmbiguousTransit(u32),
    #[error("plan contains {0}, which a reduced instance cannot execute")]
    ForeignAction(String),
    #[error("a clause agent was informed by {0}, which is not a literal node")]
    NonLiteralInformer(AgentId),
}

/// Reads the assignment off a successful plan: a variable is true iff some
/// clause agent first learned the source secret from its positive literal
/// node, false iff from its negative one, and defaults to false when the
/// plan routed around it entirely.
pub fn extract_assignment(plan: &Plan, map: &ReductionMap) -> Result<Vec<bool>, ExtractError> {
    let n = map.agent_count() as usize;
    let actions = match &plan.items {
        PlanItems::Sequential(actions) => actions,
        PlanItems::Parallel(_) => return Err(ExtractError::ForeignAction("parallel step".into())),
    };
    let mut knows_source = vec![false; n];
    knows_source[map.source.index()] = true;
    let is_clause = |x: AgentId| map.clause_nodes.contains(&x);
    let mut informer: Vec<Option<AgentId>> = vec![None; n];
    for action in actions {
        let (i, j) = match *action {
            Action::TwoWay(i, j) => (i, j),
            ref other => return Err(ExtractError::ForeignAction(other.to_string())),
        };
        let either = knows_source[i.index()] || knows_source[j.index()];
        for (this, other) in [(i, j), (j, i)] {
            if either && !knows_source[this.index()] && is_clause(this) {
                informer[this.index()] = Some(other);
            }
        }
        knows_source[i.index()] = either;
        knows_source[j.index()] = either;
    }

    let mut assignment = vec![false; map.variables.len()];
    let mut pinned = vec![false; map.variables.len()];
    for &cj in &map.clause_nodes {
        let Some(via) = informer[cj.index()] else { continue };
        let Some((var, positive)) = map.literal_of_node(via) else {
            return Err(ExtractError::NonLiteralInformer(via));
        };
        if pinned[var] && assignment[var] != positive {
            return Err(ExtractError::AmbiguousTransit(var as u32 + 1));
        }
        pinned[var] = true;
        assignment[var] = positive;
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{solve_neg, solve_neg_with, verify, SearchConfig, SearchOutcome};

    fn cnf(vars: u32, clauses: &[&[i32]]) -> CnfFormula {
        CnfFormula::new(vars, clauses.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn normalization_dedups_and_drops_tautologies() {
        let f = cnf(2, &[&[1, 1, -2], &[1, -1], &[2]]);
        assert_eq!(f.clauses(), &[vec![1, -2], vec![2]]);
        assert_eq!(
            CnfFormula::new(1, vec![vec![]]),
            Err(CnfError::EmptyClause(0))
        );
        assert_eq!(
            CnfFormula::new(1, vec![vec![2]]),
            Err(CnfError::LiteralOutOfRange(2))
        );
    }

    #[test]
    fn oracle_finds_least_assignment() {
        let f = cnf(2, &[&[1, 2], &[-1]]);
        assert_eq!(sat_oracle(&f).unwrap(), Some(vec![false, true]));
        let f = cnf(1, &[&[1], &[-1]]);
        assert_eq!(sat_oracle(&f).unwrap(), None);
        let f = cnf(2, &[]);
        assert_eq!(sat_oracle(&f).unwrap(), Some(vec![false, false]));
    }

    #[test]
    fn reduction_sizes_are_linear() {
        let f = cnf(1, &[&[1]]);
        let (inst, map) = sat_to_gossip(&f);
        assert_eq!(inst.n(), 6); // 1 + 4v + c
        assert_eq!(map.agent_count(), 6);
        assert_eq!(inst.graph.edge_count(), 7); // 2v + 4v + sum of clause sizes
        assert_eq!(inst.goals.len(), 4);

        let f = cnf(3, &[&[1, -2, 3], &[2], &[-1, -3]]);
        let (inst, _) = sat_to_gossip(&f);
        assert_eq!(inst.n() as usize, 1 + 4 * 3 + 3);
        assert_eq!(inst.graph.edge_count(), 2 * 3 + 4 * 3 + (3 + 1 + 2));
        // goals: c positives + 2v gadget goals + one negative per (clause, mentioned var)
        assert_eq!(inst.goals.len(), 3 + 2 * 3 + (3 + 1 + 2));
    }

    #[test]
    fn single_positive_clause_forces_true() {
        let f = cnf(1, &[&[1]]);
        let (inst, map) = sat_to_gossip(&f);
        let result = solve_neg(&inst);
        let plan = result.outcome.plan().expect("satisfiable formula must yield a plan");
        assert!(verify(&inst, plan).unwrap().success);
        assert_eq!(extract_assignment(plan, &map).unwrap(), vec![true]);
    }

    #[test]
    fn single_negative_clause_forces_false() {
        let f = cnf(1, &[&[-1]]);
        let (inst, map) = sat_to_gossip(&f);
        let result = solve_neg(&inst);
        let plan = result.outcome.plan().expect("satisfiable formula must yield a plan");
        assert!(verify(&inst, plan).unwrap().success);
        assert_eq!(extract_assignment(plan, &map).unwrap(), vec![false]);
    }

    #[test]
    fn contradiction_is_unsolvable() {
        let f = cnf(1, &[&[1], &[-1]]);
        let (inst, _) = sat_to_gossip(&f);
        let result = solve_neg(&inst);
        assert!(matches!(result.outcome, SearchOutcome::Absent(_)), "{:?}", result.outcome);
    }

    #[test]
    fn tie_breaking_reaches_distinct_assignments() {
        let f = cnf(2, &[&[1, 2]]);
        let (inst, map) = sat_to_gossip(&f);

        let forward = solve_neg(&inst);
        let p1 = forward.outcome.plan().expect("satisfiable");
        assert!(verify(&inst, p1).unwrap().success);
        let a1 = extract_assignment(p1, &map).unwrap();
        assert!(f.is_satisfied_by(&a1));

        let cfg = SearchConfig { reverse_actions: true, ..SearchConfig::default() };
        let backward = solve_neg_with(&inst, &cfg);
        let p2 = backward.outcome.plan().expect("satisfiable");
        assert!(verify(&inst, p2).unwrap().success);
        let a2 = extract_assignment(p2, &map).unwrap();
        assert!(f.is_satisfied_by(&a2));

        assert_ne!(a1, a2, "opposite tie-breaking should route through different literals");
    }

    #[test]
    fn change_actions_do_not_rescue_or_break_reductions() {
        for (formula, satisfiable) in
            [(cnf(1, &[&[1]]), true), (cnf(1, &[&[1], &[-1]]), false)]
        {
            let (mut inst, _) = sat_to_gossip(&formula);
            inst.allow_change = true;
            let result = solve_neg(&inst);
            assert_eq!(
                matches!(result.outcome, SearchOutcome::Found { .. }),
                satisfiable,
                "changes must not alter solvability of {formula}"
            );
        }
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c sample\np cnf 3 2\n1 -2 0\n2 3 0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.var_count(), 3);
        assert_eq!(f.clauses(), &[vec![1, -2], vec![2, 3]]);
        let reparsed = parse_dimacs(&f.to_string()).unwrap();
        assert_eq!(f, reparsed);
    }

    #[test]
    fn dimacs_accepts_percent_terminator_and_multiline_clauses() {
        let text = "p cnf 2 1\n1\n2 0\n%\n0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.clauses(), &[vec![1, 2]]);
    }

    #[test]
    fn dimacs_rejects_malformed_input() {
        assert_eq!(parse_dimacs("1 2 0\n"), Err(DimacsError::MissingHeader));
        assert_eq!(parse_dimacs("p cnf x 1\n1 0\n"), Err(DimacsError::BadHeader(1)));
        assert_eq!(
            parse_dimacs("p cnf 2 2\n1 0\n"),
            Err(DimacsError::ClauseCountMismatch { declared: 2, found: 1 })
        );
        assert_eq!(parse_dimacs("p cnf 2 1\n1 2\n"), Err(DimacsError::UnterminatedClause));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\nfoo 0\n"),
            Err(DimacsError::BadLiteral { .. })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\n5 0\n"),
            Err(DimacsError::Cnf(CnfError::LiteralOutOfRange(5)))
        ));
    }

    #[test]
    fn extraction_rejects_foreign_actions() {
        let f = cnf(1, &[&[1]]);
        let (_, map) = sat_to_gossip(&f);
        let plan = Plan::sequential(Mode::TwoWay, vec![Action::change(AgentId::new(1))]);
        assert!(matches!(
            extract_assignment(&plan, &map),
            Err(ExtractError::ForeignAction(_))
        ));
    }
}

//! Directed graphs over variables: parents, reachability, arrow deletion and
//! evaluation distance.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::value::Variable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0} -> {1} mentions an undeclared vertex")]
    UndeclaredVertex(Variable, Variable),
    #[error("unknown variable {0}")]
    UnknownVariable(Variable),
    #[error("graph has a directed cycle")]
    CyclicGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CausalGraph {
    vertices: BTreeSet<Variable>,
    edges: BTreeSet<(Variable, Variable)>,
}

impl CausalGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = Variable>,
        edges: impl IntoIterator<Item = (Variable, Variable)>,
    ) -> Result<Self, GraphError> {
        let vertices: BTreeSet<Variable> = vertices.into_iter().collect();
        let mut set = BTreeSet::new();
        for (from, to) in edges {
            if !vertices.contains(&from) || !vertices.contains(&to) {
                return Err(GraphError::UndeclaredVertex(from, to));
            }
            set.insert((from, to));
        }
        Ok(CausalGraph {
            vertices,
            edges: set,
        })
    }

    pub fn vertices(&self) -> &BTreeSet<Variable> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(Variable, Variable)> {
        &self.edges
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, from: &Variable, to: &Variable) -> bool {
        self.edges.contains(&(from.clone(), to.clone()))
    }

    /// `PA_X`, alphabetically ordered.
    pub fn parents(&self, x: &Variable) -> Vec<Variable> {
        self.edges
            .iter()
            .filter(|(_, to)| to == x)
            .map(|(from, _)| from.clone())
            .collect()
    }

    pub fn children(&self, x: &Variable) -> Vec<Variable> {
        self.edges
            .iter()
            .filter(|(from, _)| from == x)
            .map(|(_, to)| to.clone())
            .collect()
    }

    fn successors(&self) -> BTreeMap<&Variable, Vec<&Variable>> {
        let mut out: BTreeMap<&Variable, Vec<&Variable>> =
            self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for (from, to) in &self.edges {
            out.get_mut(from)
                .expect("edge endpoints are vertices")
                .push(to);
        }
        out
    }

    /// Kahn's algorithm; ties broken alphabetically. `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<Variable>> {
        let succ = self.successors();
        let mut indegree: BTreeMap<&Variable, usize> =
            self.vertices.iter().map(|v| (v, 0)).collect();
        for (_, to) in &self.edges {
            *indegree.get_mut(to).expect("vertex") += 1;
        }
        let mut ready: BTreeSet<&Variable> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(v, _)| *v)
            .collect();
        let mut order = Vec::with_capacity(self.vertices.len());
        while let Some(v) = ready.pop_first() {
            order.push(v.clone());
            for w in &succ[v] {
                let d = indegree.get_mut(w).expect("vertex");
                *d -= 1;
                if *d == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == self.vertices.len()).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// `G_{-X}`: every arrow pointing into a member of `xs` removed.
    pub fn without_arrows_into(&self, xs: &BTreeSet<Variable>) -> CausalGraph {
        CausalGraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .filter(|(_, to)| !xs.contains(to))
                .cloned()
                .collect(),
        }
    }

    /// Vertices reachable from `x` by a non-empty directed path.
    pub fn descendants(&self, x: &Variable) -> Result<BTreeSet<Variable>, GraphError> {
        if !self.contains(x) {
            return Err(GraphError::UnknownVariable(x.clone()));
        }
        let succ = self.successors();
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&Variable> = succ[x].iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            if seen.insert(v.clone()) {
                queue.extend(succ[v].iter().copied());
            }
        }
        Ok(seen)
    }

    /// Vertices other than `x` with no directed path from `x`.
    pub fn nondescendants(&self, x: &Variable) -> Result<BTreeSet<Variable>, GraphError> {
        let desc = self.descendants(x)?;
        Ok(self
            .vertices
            .iter()
            .filter(|v| *v != x && !desc.contains(*v))
            .cloned()
            .collect())
    }

    /// Evaluation distance of every vertex from `xs`: the longest directed
    /// path in `G_{-xs}` from a member of `xs`, `0` for members of `xs`,
    /// `-1` when unreachable.
    pub fn evaluation_distances(
        &self,
        xs: &BTreeSet<Variable>,
    ) -> Result<BTreeMap<Variable, i64>, GraphError> {
        for x in xs {
            if !self.contains(x) {
                return Err(GraphError::UnknownVariable(x.clone()));
            }
        }
        let cut = self.without_arrows_into(xs);
        let order = cut
            .topological_order()
            .filter(|_| self.is_acyclic())
            .ok_or(GraphError::CyclicGraph)?;
        let mut dist: BTreeMap<Variable, i64> = self
            .vertices
            .iter()
            .map(|v| (v.clone(), if xs.contains(v) { 0 } else { -1 }))
            .collect();
        let succ = cut.successors();
        for v in &order {
            let d = dist[v];
            if d < 0 {
                continue;
            }
            for w in &succ[v] {
                let entry = dist.get_mut(*w).expect("vertex");
                *entry = (*entry).max(d + 1);
            }
        }
        Ok(dist)
    }

    pub fn evaluation_distance(
        &self,
        xs: &BTreeSet<Variable>,
        y: &Variable,
    ) -> Result<i64, GraphError> {
        if !self.contains(y) {
            return Err(GraphError::UnknownVariable(y.clone()));
        }
        Ok(self.evaluation_distances(xs)?[y])
    }
}

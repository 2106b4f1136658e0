//! Corpus-wide inheritance graph.
//!
//! Base names resolve to a contract in the same file first, then to a
//! corpus-wide unique name. Missing or ambiguous names stay unresolved and
//! act as terminal ancestors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::{ContractDef, SourceUnit};

/// A contract identified by its file and name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContractId {
    pub file: String,
    pub name: String,
}

impl ContractId {
    pub fn new(file: impl Into<String>, name: impl Into<String>) -> Self {
        ContractId { file: file.into(), name: name.into() }
    }
}

impl fmt::Display for ContractId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("inheritance cycle: {}", .cycle.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> "))]
pub struct CycleError {
    /// Contracts on the cycle; the first entry is repeated at the end.
    pub cycle: Vec<ContractId>,
}

#[derive(Debug, Clone)]
pub struct InheritanceGraph {
    nodes: Vec<ContractId>,
    index: BTreeMap<ContractId, usize>,
    /// Direct resolved bases, in declaration order.
    bases: Vec<Vec<usize>>,
    /// Direct base names that did not resolve.
    unresolved: Vec<Vec<String>>,
    depth: Vec<u64>,
    ancestors: Vec<BTreeSet<usize>>,
    /// Unresolved names reachable through the contract or any resolved ancestor.
    ancestor_unresolved: Vec<BTreeSet<String>>,
    descendants: Vec<BTreeSet<usize>>,
}

pub fn build_inheritance_graph(corpus: &[SourceUnit]) -> Result<InheritanceGraph, CycleError> {
    InheritanceGraph::build(corpus.iter().flat_map(|u| u.contracts.iter().map(move |c| (u.path.as_str(), c))))
}

impl InheritanceGraph {
    pub fn build<'a>(contracts: impl IntoIterator<Item = (&'a str, &'a ContractDef)>) -> Result<Self, CycleError> {
        let contracts: Vec<(&str, &ContractDef)> = contracts.into_iter().collect();
        let nodes: Vec<ContractId> = contracts.iter().map(|(f, c)| ContractId::new(*f, &c.name)).collect();
        let mut index = BTreeMap::new();
        let mut by_name: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, id) in nodes.iter().enumerate() {
            index.entry(id.clone()).or_insert(i);
            by_name.entry(id.name.as_str()).or_default().push(i);
        }

        let mut bases = vec![Vec::new(); nodes.len()];
        let mut unresolved = vec![Vec::new(); nodes.len()];
        for (i, (file, contract)) in contracts.iter().enumerate() {
            for base in &contract.base_names {
                let same_file = index.get(&ContractId::new(*file, base)).copied();
                let target = same_file.or_else(|| match by_name.get(base.as_str()) {
                    Some(candidates) if candidates.len() == 1 => Some(candidates[0]),
                    _ => None,
                });
                match target {
                    Some(t) if !bases[i].contains(&t) => bases[i].push(t),
                    Some(_) => {}
                    None if !unresolved[i].contains(base) => unresolved[i].push(base.clone()),
                    None => {}
                }
            }
        }

        let mut graph = InheritanceGraph {
            depth: vec![0; nodes.len()],
            ancestors: vec![BTreeSet::new(); nodes.len()],
            ancestor_unresolved: vec![BTreeSet::new(); nodes.len()],
            descendants: vec![BTreeSet::new(); nodes.len()],
            nodes,
            index,
            bases,
            unresolved,
        };
        graph.close()?;
        Ok(graph)
    }

    /// Computes depth and transitive closures, failing on a cycle.
    fn close(&mut self) -> Result<(), CycleError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let n = self.nodes.len();
        let mut marks = vec![Mark::New; n];
        let mut stack: Vec<usize> = Vec::new();

        fn visit(g: &mut InheritanceGraph, v: usize, marks: &mut [Mark], stack: &mut Vec<usize>) -> Result<(), CycleError> {
            match marks[v] {
                Mark::Done => return Ok(()),
                Mark::Active => {
                    let from = stack.iter().position(|&s| s == v).unwrap_or(0);
                    let mut cycle: Vec<ContractId> = stack[from..].iter().map(|&s| g.nodes[s].clone()).collect();
                    cycle.push(g.nodes[v].clone());
                    return Err(CycleError { cycle });
                }
                Mark::New => {}
            }
            marks[v] = Mark::Active;
            stack.push(v);
            let bases = g.bases[v].clone();
            let mut depth = u64::from(!g.unresolved[v].is_empty());
            let mut ancestors = BTreeSet::new();
            let mut names: BTreeSet<String> = g.unresolved[v].iter().cloned().collect();
            for b in bases {
                visit(g, b, marks, stack)?;
                depth = depth.max(g.depth[b] + 1);
                ancestors.insert(b);
                ancestors.extend(g.ancestors[b].iter().copied());
                names.extend(g.ancestor_unresolved[b].iter().cloned());
            }
            g.depth[v] = depth;
            g.ancestors[v] = ancestors;
            g.ancestor_unresolved[v] = names;
            stack.pop();
            marks[v] = Mark::Done;
            Ok(())
        }

        for v in 0..n {
            visit(self, v, &mut marks, &mut stack)?;
        }
        for v in 0..n {
            for a in self.ancestors[v].clone() {
                self.descendants[a].insert(v);
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[ContractId] {
        &self.nodes
    }

    pub fn contains(&self, id: &ContractId) -> bool {
        self.index.contains_key(id)
    }

    /// Derived-to-base edges.
    pub fn edges(&self) -> Vec<(ContractId, ContractId)> {
        let mut out = Vec::new();
        for (i, bases) in self.bases.iter().enumerate() {
            for &b in bases {
                out.push((self.nodes[i].clone(), self.nodes[b].clone()));
            }
        }
        out
    }

    pub fn unresolved_bases(&self) -> BTreeSet<(ContractId, String)> {
        self.unresolved
            .iter()
            .enumerate()
            .flat_map(|(i, names)| names.iter().map(move |n| (self.nodes[i].clone(), n.clone())))
            .collect()
    }

    /// Depth of inheritance: the longest ancestor path, an unresolved base
    /// counting as one terminal step.
    pub fn dit(&self, id: &ContractId) -> Option<u64> {
        self.index.get(id).map(|&i| self.depth[i])
    }

    /// Distinct resolved ancestors plus distinct unresolved names reachable from `id`.
    pub fn noa(&self, id: &ContractId) -> Option<u64> {
        self.index.get(id).map(|&i| (self.ancestors[i].len() + self.ancestor_unresolved[i].len()) as u64)
    }

    /// Distinct resolved descendants in the corpus.
    pub fn nod(&self, id: &ContractId) -> Option<u64> {
        self.index.get(id).map(|&i| self.descendants[i].len() as u64)
    }
}

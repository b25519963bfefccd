//! Cycle detection over the vulnerability abstraction graph.
//!
//! The abstraction relation (child vulnerability to the higher-abstraction
//! vulnerabilities it manifests) must form a DAG. Validation runs a full
//! strongly-connected-components pass; mutation uses a targeted
//! reachability check on the edge being inserted.

use std::collections::BTreeSet;

use crate::entity::DesignModel;
use crate::id::EntityId;

/// Groups of vulnerability ids that participate in an abstraction cycle:
/// every SCC with more than one member, plus single nodes carrying a
/// self-edge. Edges to ids that do not resolve are ignored here (they are
/// reported as dangling references instead).
pub(crate) fn cycle_groups(model: &DesignModel) -> Vec<BTreeSet<EntityId>> {
    let nodes: Vec<&EntityId> = model.vulnerabilities.keys().collect();
    let index_of = |id: &EntityId| nodes.binary_search(&id).ok();
    let adjacency: Vec<Vec<usize>> = nodes
        .iter()
        .map(|id| {
            model.vulnerabilities[*id]
                .avulns
                .iter()
                .filter_map(index_of)
                .collect()
        })
        .collect();

    tarjan_sccs(&adjacency)
        .into_iter()
        .filter(|scc| scc.len() > 1 || adjacency[scc[0]].contains(&scc[0]))
        .map(|scc| scc.into_iter().map(|i| nodes[i].clone()).collect())
        .collect()
}

/// Whether `target` is reachable from `start` along abstraction edges,
/// counting `start == target` as reachable. Adding the edge
/// `child -> parent` creates a cycle exactly when the child is reachable
/// from the parent.
pub(crate) fn reaches(model: &DesignModel, start: &EntityId, target: &EntityId) -> bool {
    if start == target {
        return true;
    }
    let mut seen: BTreeSet<&EntityId> = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(id) = stack.pop() {
        if !seen.insert(id) {
            continue;
        }
        let Some(vuln) = model.vulnerabilities.get(id) else {
            continue;
        };
        for parent in &vuln.avulns {
            if parent == target {
                return true;
            }
            stack.push(parent);
        }
    }
    false
}

// Iterative Tarjan; the catalogue graph is shallow but recursion depth
// should not depend on input data.
fn tarjan_sccs(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adjacency.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut sccs = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(frame) = frames.last_mut() {
            let (node, child_pos) = (frame.0, frame.1);
            if child_pos == 0 {
                index[node] = next_index;
                low[node] = next_index;
                next_index += 1;
                stack.push(node);
                on_stack[node] = true;
            }
            if let Some(&child) = adjacency[node].get(child_pos) {
                frame.1 += 1;
                if index[child] == UNVISITED {
                    frames.push((child, 0));
                } else if on_stack[child] {
                    low[node] = low[node].min(index[child]);
                }
            } else {
                frames.pop();
                if let Some(parent) = frames.last() {
                    low[parent.0] = low[parent.0].min(low[node]);
                }
                if low[node] == index[node] {
                    let mut scc = Vec::new();
                    loop {
                        let member = stack.pop().expect("tarjan stack underflow");
                        on_stack[member] = false;
                        scc.push(member);
                        if member == node {
                            break;
                        }
                    }
                    sccs.push(scc);
                }
            }
        }
    }
    sccs
}

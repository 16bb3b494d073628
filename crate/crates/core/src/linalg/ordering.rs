use std::collections::VecDeque;

use super::CsMatrix;

/// Symmetric adjacency of `A + Aᵀ`, diagonal excluded, neighbors sorted.
fn symmetric_adjacency(a: &CsMatrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    let mut adj = vec![Vec::new(); n];
    for j in 0..n {
        for p in a.col_ptr()[j]..a.col_ptr()[j + 1] {
            let i = a.row_idx()[p];
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for nb in &mut adj {
        nb.sort_unstable();
        nb.dedup();
    }
    adj
}

/// BFS levels from `root` over unvisited-in-component nodes.
fn level_structure(adj: &[Vec<usize>], root: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    seen[root] = true;
    let mut levels = vec![vec![root]];
    loop {
        let mut next = Vec::new();
        for &u in levels.last().unwrap() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

/// George–Liu style pseudo-peripheral node search.
fn pseudo_peripheral(adj: &[Vec<usize>], start: usize) -> usize {
    let mut root = start;
    let mut depth = level_structure(adj, root).len();
    for _ in 0..8 {
        let levels = level_structure(adj, root);
        let candidate = *levels
            .last()
            .unwrap()
            .iter()
            .min_by_key(|&&v| adj[v].len())
            .unwrap();
        let d = level_structure(adj, candidate).len();
        if d <= depth {
            break;
        }
        depth = d;
        root = candidate;
    }
    root
}

/// Reverse Cuthill–McKee permutation of the structure of `A + Aᵀ`.
///
/// `perm[k]` is the original index placed at position `k`.
pub fn reverse_cuthill_mckee(a: &CsMatrix) -> Vec<usize> {
    let n = a.dim();
    let adj = symmetric_adjacency(a);
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    while order.len() < n {
        let start = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| adj[v].len())
            .unwrap();
        let root = pseudo_peripheral(&adj, start);
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = adj[u].iter().copied().filter(|&v| !visited[v]).collect();
            nbrs.sort_by_key(|&v| (adj[v].len(), v));
            for v in nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

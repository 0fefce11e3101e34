//! Reverse Cuthill–McKee ordering for envelope reduction.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// Returns `order` such that `order[k]` is the original vertex placed at
/// position `k`. Every connected component is handled; ties are broken by
/// vertex index so the result is deterministic.
pub fn reverse_cuthill_mckee(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    // Components are seeded in order of their lowest-degree vertex.
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&v| (degree[v], v));

    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(adjacency, &degree, seed);
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adjacency[v]
                .iter()
                .copied()
                .filter(|&w| !visited[w])
                .collect();
            next.sort_by_key(|&w| (degree[w], w));
            next.dedup();
            for w in next {
                if !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order.reverse();
    order
}

/// Inverse of a permutation given as `order[new] = old`.
pub fn inverse_permutation(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (new, &old) in order.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

fn bfs_levels(adjacency: &[Vec<usize>], start: usize) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut levels = Vec::new();
    let mut current = vec![start];
    seen[start] = true;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &v in &current {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        levels.push(current);
        current = next;
    }
    levels
}

fn pseudo_peripheral(adjacency: &[Vec<usize>], degree: &[usize], seed: usize) -> usize {
    let mut start = seed;
    let mut depth = bfs_levels(adjacency, start).len();
    for _ in 0..8 {
        let levels = bfs_levels(adjacency, start);
        let last = levels.last().expect("at least the start level");
        let candidate = *last
            .iter()
            .min_by_key(|&&v| (degree[v], v))
            .expect("non-empty level");
        let cand_depth = bfs_levels(adjacency, candidate).len();
        if cand_depth > depth {
            depth = cand_depth;
            start = candidate;
        } else {
            break;
        }
    }
    start
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bandwidth(adjacency: &[Vec<usize>], order: &[usize]) -> usize {
        let pos = inverse_permutation(order);
        let mut bw = 0;
        for (v, nbrs) in adjacency.iter().enumerate() {
            for &w in nbrs {
                bw = bw.max(pos[v].abs_diff(pos[w]));
            }
        }
        bw
    }

    #[test]
    fn permutation_covers_all_vertices() {
        let adj = vec![vec![1], vec![0, 2], vec![1], vec![], vec![5], vec![4]];
        let mut order = reverse_cuthill_mckee(&adj);
        order.sort_unstable();
        assert_eq!(order, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn shrinks_bandwidth_of_shuffled_path() {
        // Path 0-5-1-4-2-3 stored under scrambled labels.
        let edges = [(0, 5), (5, 1), (1, 4), (4, 2), (2, 3)];
        let mut adj = vec![Vec::new(); 6];
        for (a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let identity: Vec<usize> = (0..6).collect();
        let order = reverse_cuthill_mckee(&adj);
        assert!(bandwidth(&adj, &order) < bandwidth(&adj, &identity));
        assert_eq!(bandwidth(&adj, &order), 1);
    }
}

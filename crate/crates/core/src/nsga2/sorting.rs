use alloc::vec;
use alloc::vec::Vec;

/// `a` dominates `b` when it is no worse in every objective and strictly
/// better in one. All objectives are minimized.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            better = true;
        }
    }
    better
}

/// Result of [`non_dominated_sort`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    /// Indices per front, best first. Individuals with a NaN objective form
    /// the last front on their own.
    pub fronts: Vec<Vec<usize>>,
    /// Zero-based front index of every individual.
    pub rank: Vec<usize>,
    /// Individuals that had a NaN objective.
    pub invalid: Vec<usize>,
}

/// Fast non-dominated sorting with the O(m·n²) domination count scheme.
pub fn non_dominated_sort(objectives: &[Vec<f64>]) -> Ranking {
    let n = objectives.len();
    let invalid: Vec<usize> = (0..n)
        .filter(|&i| objectives[i].iter().any(|v| v.is_nan()))
        .collect();
    let mut is_invalid = vec![false; n];
    for &i in &invalid {
        is_invalid[i] = true;
    }
    let valid: Vec<usize> = (0..n).filter(|&i| !is_invalid[i]).collect();

    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for (a, &i) in valid.iter().enumerate() {
        for &j in &valid[a + 1..] {
            if dominates(&objectives[i], &objectives[j]) {
                dominated_by_me[i].push(j);
                count[j] += 1;
            } else if dominates(&objectives[j], &objectives[i]) {
                dominated_by_me[j].push(i);
                count[i] += 1;
            }
        }
    }

    let mut rank = vec![0usize; n];
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = valid.iter().copied().filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = fronts.len();
            for &j in &dominated_by_me[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    if !invalid.is_empty() {
        for &i in &invalid {
            rank[i] = fronts.len();
        }
        fronts.push(invalid.clone());
    }
    Ranking {
        fronts,
        rank,
        invalid,
    }
}

/// Crowding distance of each member of one front, in front order.
///
/// Per objective the members are ordered by value; the two ends get an
/// infinite distance and the others the gap between their neighbours
/// divided by the objective's range. An objective with zero range adds
/// nothing, not even the boundary infinities.
pub fn crowding_distance(front: &[&[f64]]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| front[a][k].total_cmp(&front[b][k]).then(a.cmp(&b)));
        let lo = front[order[0]][k];
        let hi = front[order[n - 1]][k];
        let range = hi - lo;
        if !(range > 0.0) || !range.is_finite() {
            continue;
        }
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let gap = front[order[w + 1]][k] - front[order[w - 1]][k];
            distance[order[w]] += gap / range;
        }
    }
    distance
}

#[cfg(test)]
mod tests {
    use super::*;

    fn objs(points: &[(f64, f64)]) -> Vec<Vec<f64>> {
        points.iter().map(|&(a, b)| vec![a, b]).collect()
    }

    #[test]
    fn small_example() {
        let r = non_dominated_sort(&objs(&[(1.0, 2.0), (2.0, 1.0), (3.0, 3.0)]));
        assert_eq!(r.fronts, vec![vec![0, 1], vec![2]]);
        assert_eq!(r.rank, vec![0, 0, 1]);
    }

    #[test]
    fn identical_points_share_one_front() {
        let r = non_dominated_sort(&objs(&[(1.0, 1.0); 5]));
        assert_eq!(r.fronts.len(), 1);
    }

    #[test]
    fn nan_goes_last_and_is_flagged() {
        let r = non_dominated_sort(&objs(&[(5.0, 5.0), (f64::NAN, 0.0), (1.0, 1.0)]));
        assert_eq!(r.fronts, vec![vec![2], vec![0], vec![1]]);
        assert_eq!(r.invalid, vec![1]);
        assert_eq!(r.rank[1], 2);
    }

    #[test]
    fn crowding_examples() {
        let a = [0.0, 1.0];
        let b = [1.0, 0.0];
        assert!(crowding_distance(&[&a, &b]).iter().all(|d| d.is_infinite()));

        let p = [[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]];
        let refs: Vec<&[f64]> = p.iter().map(|v| v.as_slice()).collect();
        let d = crowding_distance(&refs);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert_eq!(d[1], 2.0);

        // Second objective constant: only the first one counts.
        let q = [[0.0, 3.0], [1.0, 3.0], [3.0, 3.0], [4.0, 3.0]];
        let refs: Vec<&[f64]> = q.iter().map(|v| v.as_slice()).collect();
        let d = crowding_distance(&refs);
        assert_eq!(d[1], 0.75);
        assert_eq!(d[2], 0.75);
    }
}

//! Pareto dominance, fast non-dominated sorting and crowding distance, all
//! in maximize space.

/// `a` dominates `b`: no worse everywhere and strictly better somewhere.
#[inline]
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

/// Indices of the points no other point dominates, in input order.
pub fn non_dominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|q| dominates(q, &points[i])))
        .collect()
}

/// Partitions point indices into successive non-dominated fronts. Indices
/// inside a front are ascending.
pub fn fast_nondominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each point of one front. Extreme points of every
/// objective with a non-zero range get infinity; objectives whose values are
/// all equal contribute nothing.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= 2 {
        let distinct = n == 1 || front[0] != front[1];
        return vec![if distinct { f64::INFINITY } else { 0.0 }; n];
    }
    let m = front[0].len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    #[allow(clippy::needless_range_loop)]
    for obj in 0..m {
        order.sort_by(|&a, &b| front[a][obj].total_cmp(&front[b][obj]).then(a.cmp(&b)));
        let lo = front[order[0]][obj];
        let hi = front[order[n - 1]][obj];
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let gap = front[order[w + 1]][obj] - front[order[w - 1]][obj];
            distance[order[w]] += gap / range;
        }
    }
    distance
}

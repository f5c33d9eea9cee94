//! Dense linear assignment by shortest augmenting paths.
//!
//! Column reduction seeds the duals, then every free row is routed to a free
//! column along a Dijkstra shortest path in reduced costs. Each augmentation
//! is O(n^2), so the whole solve is O(n^3) in the worst case.

/// Minimum-cost perfect assignment for a dense row-major `n x n` matrix.
/// Returns `col_for_row`.
pub fn solve(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    const NONE: usize = usize::MAX;
    if n == 0 {
        return Vec::new();
    }

    let mut u = vec![0.0f64; n];
    let mut v = vec![f64::INFINITY; n];
    let mut argmin = vec![0usize; n];
    for (i, row) in cost.chunks_exact(n).enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c < v[j] {
                v[j] = c;
                argmin[j] = i;
            }
        }
    }

    let mut col4row = vec![NONE; n];
    let mut row4col = vec![NONE; n];
    for j in 0..n {
        let i = argmin[j];
        if col4row[i] == NONE {
            col4row[i] = j;
            row4col[j] = i;
        }
    }

    let mut shortest = vec![f64::INFINITY; n];
    let mut path = vec![NONE; n];
    let mut row_seen = vec![false; n];
    let mut col_done = vec![false; n];
    let mut remaining = vec![0usize; n];
    let mut seen_rows = Vec::with_capacity(n);

    for cur_row in 0..n {
        if col4row[cur_row] != NONE {
            continue;
        }
        shortest.fill(f64::INFINITY);
        path.fill(NONE);
        col_done.fill(false);
        for &r in &seen_rows {
            row_seen[r] = false;
        }
        seen_rows.clear();
        for (it, slot) in remaining.iter_mut().enumerate() {
            *slot = n - 1 - it;
        }
        let mut num_remaining = n;

        let mut min_val = 0.0;
        let mut i = cur_row;
        let sink = loop {
            row_seen[i] = true;
            seen_rows.push(i);
            let row = &cost[i * n..(i + 1) * n];
            let ui = u[i];
            let mut index = NONE;
            let mut lowest = f64::INFINITY;
            for (it, &j) in remaining[..num_remaining].iter().enumerate() {
                let r = min_val + row[j] - ui - v[j];
                if r < shortest[j] {
                    path[j] = i;
                    shortest[j] = r;
                }
                if shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == NONE) {
                    lowest = shortest[j];
                    index = it;
                }
            }
            assert!(index != NONE, "assignment problem is infeasible");
            min_val = lowest;
            let j = remaining[index];
            col_done[j] = true;
            num_remaining -= 1;
            remaining[index] = remaining[num_remaining];
            if row4col[j] == NONE {
                break j;
            }
            i = row4col[j];
        };

        u[cur_row] += min_val;
        for &r in &seen_rows {
            if r != cur_row {
                u[r] += min_val - shortest[col4row[r]];
            }
        }
        for j in 0..n {
            if col_done[j] {
                v[j] -= min_val - shortest[j];
            }
        }

        let mut j = sink;
        loop {
            let i = path[j];
            row4col[j] = i;
            std::mem::swap(&mut col4row[i], &mut j);
            if i == cur_row {
                break;
            }
        }
    }
    col4row
}

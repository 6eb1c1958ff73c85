//! Label agreement up to relabeling.

use crate::error::{Error, Result};

/// Fraction of points on which `predicted` and `truth` agree under the best
/// one-to-one matching of predicted labels to true labels. Label values are
/// arbitrary; the matching is found with the Hungarian algorithm on the
/// contingency table.
pub fn label_agreement(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::Input(format!(
            "{} predicted labels vs {} true labels",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::Input("no labels to compare".into()));
    }
    let (p_ids, p_idx) = compress(predicted);
    let (t_ids, t_idx) = compress(truth);
    let size = p_ids.max(t_ids);
    let mut table = vec![vec![0i64; size]; size];
    for (a, b) in p_idx.iter().zip(&t_idx) {
        table[*a][*b] += 1;
    }
    let matched = max_weight_matching(&table);
    Ok(matched as f64 / predicted.len() as f64)
}

fn compress(labels: &[usize]) -> (usize, Vec<usize>) {
    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let idx = labels
        .iter()
        .map(|l| distinct.binary_search(l).expect("present"))
        .collect();
    (distinct.len(), idx)
}

/// Maximum total weight of a perfect matching in a square matrix
/// (Kuhn-Munkres with potentials, O(m^3)).
pub fn max_weight_matching(weights: &[Vec<i64>]) -> i64 {
    let m = weights.len();
    if m == 0 {
        return 0;
    }
    let max = weights.iter().flatten().copied().max().unwrap_or(0);
    // Minimize cost = max - weight; 1-based arrays with a sentinel column 0.
    let cost = |i: usize, j: usize| max - weights[i - 1][j - 1];
    let mut u = vec![0i64; m + 1];
    let mut v = vec![0i64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=m {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=m).map(|j| weights[owner[j] - 1][j - 1]).sum()
}

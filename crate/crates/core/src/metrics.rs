//! External clustering evaluation: accuracy under an optimal one-to-one
//! cluster/class matching, normalized mutual information, and the
//! class-weighted F-measure. All three read off a shared contingency table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Co-occurrence counts between produced clusters (rows) and ground-truth
/// classes (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    cluster_sizes: Vec<usize>,
    class_sizes: Vec<usize>,
    n: usize,
}

impl ContingencyTable {
    /// Builds a table directly from counts. Rows must be equal length and the
    /// total must be positive.
    pub fn from_counts(counts: Vec<Vec<usize>>) -> Result<Self> {
        let k = counts.len();
        if k == 0 {
            return Err(Error::InvalidConfig("contingency table needs rows".into()));
        }
        let m = counts[0].len();
        if m == 0 || counts.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidConfig(
                "contingency table rows must be nonempty and equal length".into(),
            ));
        }
        let cluster_sizes: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
        let class_sizes: Vec<usize> =
            (0..m).map(|p| counts.iter().map(|r| r[p]).sum()).collect();
        let n = cluster_sizes.iter().sum();
        if n == 0 {
            return Err(Error::InvalidConfig("contingency table is all zeros".into()));
        }
        Ok(ContingencyTable {
            counts,
            cluster_sizes,
            class_sizes,
            n,
        })
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn m(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn count(&self, cluster: usize, class: usize) -> usize {
        self.counts[cluster][class]
    }

    pub fn cluster_sizes(&self) -> &[usize] {
        &self.cluster_sizes
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Swaps the cluster/class roles.
    pub fn transposed(&self) -> ContingencyTable {
        let counts: Vec<Vec<usize>> = (0..self.m())
            .map(|p| (0..self.k()).map(|c| self.counts[c][p]).collect())
            .collect();
        ContingencyTable::from_counts(counts).expect("transpose preserves validity")
    }
}

/// Counts cluster/class co-occurrences for two equal-length label sequences.
pub fn contingency(labels: &[usize], truth: &[usize]) -> Result<ContingencyTable> {
    if labels.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: truth.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::InvalidConfig("cannot evaluate zero objects".into()));
    }
    let k = labels.iter().copied().max().unwrap() + 1;
    let m = truth.iter().copied().max().unwrap() + 1;
    let mut counts = vec![vec![0usize; m]; k];
    for (&c, &p) in labels.iter().zip(truth.iter()) {
        counts[c][p] += 1;
    }
    ContingencyTable::from_counts(counts)
}

/// Normalized mutual information with natural logarithms. Zero-count cells
/// contribute nothing. When either marginal entropy vanishes the ratio is
/// undefined; a 1x1 table scores 1 (the clustering trivially matches), any
/// other such table scores 0.
pub fn nmi(table: &ContingencyTable) -> f64 {
    let n = table.n() as f64;
    let cluster_term: f64 = table
        .cluster_sizes()
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| s as f64 * (s as f64 / n).ln())
        .sum();
    let class_term: f64 = table
        .class_sizes()
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| s as f64 * (s as f64 / n).ln())
        .sum();
    if cluster_term == 0.0 || class_term == 0.0 {
        return if table.k() == 1 && table.m() == 1 { 1.0 } else { 0.0 };
    }
    let mut numerator = 0.0;
    for c in 0..table.k() {
        for p in 0..table.m() {
            let joint = table.count(c, p);
            if joint == 0 {
                continue;
            }
            let joint = joint as f64;
            let nc = table.cluster_sizes()[c] as f64;
            let np = table.class_sizes()[p] as f64;
            numerator += joint * ((n * joint) / (nc * np)).ln();
        }
    }
    numerator / (cluster_term * class_term).sqrt()
}

/// Class-weighted F-measure: each class takes its best F score over clusters
/// (harmonic mean of precision `n_cp/n_c` and recall `n_cp/n_p`), weighted by
/// class size.
pub fn f_measure(table: &ContingencyTable) -> f64 {
    let mut weighted = 0.0;
    for p in 0..table.m() {
        let np = table.class_sizes()[p];
        if np == 0 {
            continue;
        }
        let mut best = 0.0f64;
        for c in 0..table.k() {
            let joint = table.count(c, p) as f64;
            let nc = table.cluster_sizes()[c] as f64;
            if nc == 0.0 {
                continue;
            }
            let precision = joint / nc;
            let recall = joint / np as f64;
            if precision + recall > 0.0 {
                let f = 2.0 * precision * recall / (precision + recall);
                if f > best {
                    best = f;
                }
            }
        }
        weighted += np as f64 * best;
    }
    weighted / table.n() as f64
}

/// Accuracy under the optimal one-to-one cluster/class matching: the matched
/// co-occurrence total divided by n. Rectangular tables are padded with
/// zero-count dummies, so surplus clusters (or classes) simply go unmatched.
/// Returns the accuracy and, per real cluster, the class it was matched to
/// (`None` for dummy matches).
pub fn accuracy(table: &ContingencyTable) -> (f64, Vec<Option<usize>>) {
    let k = table.k();
    let m = table.m();
    let size = k.max(m);
    // Maximize matched counts == minimize negated counts.
    let cost: Vec<Vec<i64>> = (0..size)
        .map(|c| {
            (0..size)
                .map(|p| {
                    if c < k && p < m {
                        -(table.count(c, p) as i64)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let assignment = hungarian_min(&cost);
    let mut matched = 0usize;
    let mut matching = Vec::with_capacity(k);
    for (c, &p) in assignment.iter().enumerate().take(k) {
        if p < m {
            matched += table.count(c, p);
            matching.push(Some(p));
        } else {
            matching.push(None);
        }
    }
    (matched as f64 / table.n() as f64, matching)
}

/// Exact minimum-cost assignment on a square matrix via the O(n^3)
/// potential/augmenting-path formulation. Returns the column assigned to each
/// row.
fn hungarian_min(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = i64::MAX / 4;
    // 1-based arrays; index 0 is the virtual start column.
    let mut potential_row = vec![0i64; n + 1];
    let mut potential_col = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut min_value = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - potential_row[i0] - potential_col[j];
                if reduced < min_value[j] {
                    min_value[j] = reduced;
                    way[j] = j0;
                }
                if min_value[j] < delta {
                    delta = min_value[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    potential_row[matched_row[j]] += delta;
                    potential_col[j] -= delta;
                } else {
                    min_value[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            assignment[matched_row[j] - 1] = j - 1;
        }
    }
    assignment
}

/// All three external criteria for one labeling against the ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub accuracy: f64,
    pub nmi: f64,
    pub f_measure: f64,
    /// Cluster-to-class assignment used by the accuracy score.
    pub matching: Vec<Option<usize>>,
}

/// Convenience wrapper: contingency table plus all three metrics.
pub fn evaluate(labels: &[usize], truth: &[usize]) -> Result<EvaluationReport> {
    let table = contingency(labels, truth)?;
    let (acc, matching) = accuracy(&table);
    Ok(EvaluationReport {
        accuracy: acc,
        nmi: nmi(&table),
        f_measure: f_measure(&table),
        matching,
    })
}

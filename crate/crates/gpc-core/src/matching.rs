//! Exact 1-Wasserstein distance between persistence diagrams.
//!
//! Diagrams are matched through a minimum-cost perfect assignment on the
//! diagonal-augmented point sets: a `(n+m) x (n+m)` matrix pairs every
//! point of `C` with every point of `D` at `L_inf` ground cost, gives each
//! point a diagonal escape at half its lifespan (the distance to its
//! nearest diagonal point), and lets diagonal slots pair with each other
//! for free. The solver is the `O(n^3)` shortest-augmenting-path method
//! with potentials; its row-major, lowest-index-first scan order makes the
//! returned matching deterministic when several optima exist.

use thiserror::Error;

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::util::neumaier_sum;

/// Point-count cap of the brute-force oracle.
pub const BRUTE_FORCE_CAP: usize = 8;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("brute force handles at most {cap} points total, got {size}")]
    TooLarge { size: usize, cap: usize },
    #[error("invalid matching: {reason}")]
    InvalidMatching { reason: String },
}

/// An explicit bijection between two diagrams augmented with diagonal
/// projections, together with its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `(index into C, index into D)` for directly matched points.
    pub pairs: Vec<(usize, usize)>,
    /// Indices of `C` points sent to the diagonal.
    pub c_to_diagonal: Vec<usize>,
    /// Indices of `D` points sent to the diagonal.
    pub d_to_diagonal: Vec<usize>,
    /// Total transport cost.
    pub cost: f64,
}

impl Matching {
    /// Recompute the cost from the pairing structure; equals `self.cost`
    /// up to summation order.
    pub fn recompute_cost(&self, c: &PersistenceDiagram, d: &PersistenceDiagram) -> f64 {
        let cp = c.points();
        let dp = d.points();
        neumaier_sum(
            self.pairs
                .iter()
                .map(|&(i, j)| linf(&cp[i], &dp[j]))
                .chain(self.c_to_diagonal.iter().map(|&i| 0.5 * cp[i].lifespan()))
                .chain(self.d_to_diagonal.iter().map(|&j| 0.5 * dp[j].lifespan())),
        )
    }
}

/// The `C'/D'/E` decomposition induced by a matching: matched points of
/// `C`, their images in `D`, and everything either diagram sends to the
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchPartition {
    /// Matched `(C point, D point)` pairs in matching order.
    pub pairs: Vec<(DiagramPoint, DiagramPoint)>,
    /// Matched points of `C`, as a diagram.
    pub c_prime: PersistenceDiagram,
    /// Their images in `D`, as a diagram.
    pub d_prime: PersistenceDiagram,
    /// All diagonal-matched points of both diagrams.
    pub e: PersistenceDiagram,
}

fn linf(p: &DiagramPoint, q: &DiagramPoint) -> f64 {
    (p.birth() - q.birth())
        .abs()
        .max((p.death() - q.death()).abs())
}

/// Minimum-cost perfect assignment on a dense square matrix
/// (Jonker–Volgenant style augmenting paths with potentials).
/// Returns the column assigned to each row.
fn solve_assignment<F: Fn(usize, usize) -> f64>(n: usize, cost: F) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    // column n is a virtual column holding the row currently being placed
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![n; n + 1]; // row matched to each column; n = free
    let mut way = vec![n; n + 1];

    for i in 0..n {
        row_of[n] = i;
        let mut j0 = n;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = n;
            for j in 0..n {
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
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == n {
                break;
            }
        }
        while j0 != n {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
        }
    }

    let mut assignment = vec![n; n];
    for j in 0..n {
        if row_of[j] != n {
            assignment[row_of[j]] = j;
        }
    }
    assignment
}

/// Exact 1-Wasserstein distance and one optimal matching.
///
/// Symmetric, zero exactly on equal multisets, and satisfies the triangle
/// inequality; empty diagrams send every point of the other side to the
/// diagonal.
pub fn wasserstein1(c: &PersistenceDiagram, d: &PersistenceDiagram) -> (f64, Matching) {
    let cp = c.points();
    let dp = d.points();
    let n = cp.len();
    let m = dp.len();
    if n + m == 0 {
        return (
            0.0,
            Matching {
                pairs: Vec::new(),
                c_to_diagonal: Vec::new(),
                d_to_diagonal: Vec::new(),
                cost: 0.0,
            },
        );
    }
    // rows: C points then m diagonal slots; columns: D points then n
    // diagonal slots. Diagonal escapes cost half the lifespan regardless
    // of which slot is used (the diagonal has infinite multiplicity).
    let size = n + m;
    let cost_matrix: Vec<f64> = (0..size * size)
        .map(|idx| {
            let (i, j) = (idx / size, idx % size);
            match (i < n, j < m) {
                (true, true) => linf(&cp[i], &dp[j]),
                (true, false) => 0.5 * cp[i].lifespan(),
                (false, true) => 0.5 * dp[j].lifespan(),
                (false, false) => 0.0,
            }
        })
        .collect();
    let assignment = solve_assignment(size, |i, j| cost_matrix[i * size + j]);

    let mut pairs = Vec::new();
    let mut c_to_diagonal = Vec::new();
    let mut d_to_diagonal = Vec::new();
    for (i, &j) in assignment.iter().enumerate().take(n) {
        if j < m {
            pairs.push((i, j));
        } else {
            c_to_diagonal.push(i);
        }
    }
    for (row, &j) in assignment.iter().enumerate().skip(n) {
        debug_assert!(row >= n);
        if j < m {
            d_to_diagonal.push(j);
        }
    }
    d_to_diagonal.sort_unstable();

    let mut matching = Matching {
        pairs,
        c_to_diagonal,
        d_to_diagonal,
        cost: 0.0,
    };
    matching.cost = matching.recompute_cost(c, d);
    (matching.cost, matching)
}

/// Exhaustive minimum over all matchings; the oracle for the assignment
/// solver. Every point of `C` either pairs with an unused point of `D` or
/// goes to the diagonal; leftover `D` points go to the diagonal.
pub fn wasserstein1_bruteforce(
    c: &PersistenceDiagram,
    d: &PersistenceDiagram,
) -> Result<f64, MatchError> {
    let size = c.len() + d.len();
    if size > BRUTE_FORCE_CAP {
        return Err(MatchError::TooLarge {
            size,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let cp = c.points();
    let dp = d.points();

    fn explore(i: usize, cp: &[DiagramPoint], dp: &[DiagramPoint], used: &mut [bool]) -> f64 {
        if i == cp.len() {
            return dp
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(q, _)| 0.5 * q.lifespan())
                .sum();
        }
        let mut best = 0.5 * cp[i].lifespan() + explore(i + 1, cp, dp, used);
        for j in 0..dp.len() {
            if !used[j] {
                used[j] = true;
                let cand = linf(&cp[i], &dp[j]) + explore(i + 1, cp, dp, used);
                used[j] = false;
                if cand < best {
                    best = cand;
                }
            }
        }
        best
    }

    let mut used = vec![false; dp.len()];
    Ok(explore(0, cp, dp, &mut used))
}

/// Split the diagrams along a matching into the `C'/D'/E` partition.
pub fn partition(
    c: &PersistenceDiagram,
    d: &PersistenceDiagram,
    matching: &Matching,
) -> Result<MatchPartition, MatchError> {
    let mut c_seen = vec![false; c.len()];
    let mut d_seen = vec![false; d.len()];
    let mark = |seen: &mut [bool], idx: usize, side: &str| -> Result<(), MatchError> {
        if idx >= seen.len() {
            return Err(MatchError::InvalidMatching {
                reason: format!("{side} index {idx} out of range"),
            });
        }
        if seen[idx] {
            return Err(MatchError::InvalidMatching {
                reason: format!("{side} index {idx} used twice"),
            });
        }
        seen[idx] = true;
        Ok(())
    };
    for &(i, j) in &matching.pairs {
        mark(&mut c_seen, i, "C")?;
        mark(&mut d_seen, j, "D")?;
    }
    for &i in &matching.c_to_diagonal {
        mark(&mut c_seen, i, "C")?;
    }
    for &j in &matching.d_to_diagonal {
        mark(&mut d_seen, j, "D")?;
    }
    if let Some(idx) = c_seen.iter().position(|&s| !s) {
        return Err(MatchError::InvalidMatching {
            reason: format!("C index {idx} unassigned"),
        });
    }
    if let Some(idx) = d_seen.iter().position(|&s| !s) {
        return Err(MatchError::InvalidMatching {
            reason: format!("D index {idx} unassigned"),
        });
    }

    let cp = c.points();
    let dp = d.points();
    let pairs: Vec<(DiagramPoint, DiagramPoint)> = matching
        .pairs
        .iter()
        .map(|&(i, j)| (cp[i], dp[j]))
        .collect();
    let c_prime = PersistenceDiagram::new(pairs.iter().map(|&(p, _)| p).collect());
    let d_prime = PersistenceDiagram::new(pairs.iter().map(|&(_, q)| q).collect());
    let e = PersistenceDiagram::new(
        matching
            .c_to_diagonal
            .iter()
            .map(|&i| cp[i])
            .chain(matching.d_to_diagonal.iter().map(|&j| dp[j]))
            .collect(),
    );
    Ok(MatchPartition {
        pairs,
        c_prime,
        d_prime,
        e,
    })
}

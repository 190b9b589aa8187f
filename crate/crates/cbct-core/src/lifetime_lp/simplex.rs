//! Dense two-phase simplex with Bland's rule.
//!
//! Sized for desk-scale instances (hundreds of variables): the full tableau
//! is kept dense and every pivot touches all of it. Bland's rule (smallest
//! eligible index enters, smallest basis index leaves on ties) guarantees
//! termination through degeneracy at the cost of speed, and makes the
//! pivot sequence, and therefore the returned basis, deterministic.

use std::fmt;

/// Row sense of a constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rel: Relation,
    pub rhs: f64,
}

/// `maximize objective . x` subject to the rows and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<Constraint>,
    /// One name per structural variable, for the human-readable dump.
    pub names: Vec<String>,
}

impl LpProblem {
    /// Human-readable rendering of the rows, one constraint per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let term = |coeff: f64, name: &str| format!("{coeff} {name}");
        let row_text = |coeffs: &[f64]| {
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(j, &v)| term(v, &self.names[j]))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        out.push_str(&format!("maximize: {}\n", row_text(&self.objective)));
        for (i, row) in self.rows.iter().enumerate() {
            let rel = match row.rel {
                Relation::Le => "<=",
                Relation::Eq => "=",
            };
            out.push_str(&format!("r{i}: {} {rel} {}\n", row_text(&row.coeffs), row.rhs));
        }
        out.push_str("all variables >= 0\n");
        out
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Structural variable values at the optimal basic solution.
    pub x: Vec<f64>,
    /// Objective value (in the maximize sense).
    pub objective: f64,
    /// Reduced costs of the structural variables in the minimize form;
    /// all `>= -PIVOT_TOL` at optimality.
    pub reduced_costs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum SolveStatus {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveStatus::Optimal(s) => write!(f, "optimal (objective {})", s.objective),
            SolveStatus::Infeasible => write!(f, "infeasible"),
            SolveStatus::Unbounded => write!(f, "unbounded"),
        }
    }
}

pub const PIVOT_TOL: f64 = 1e-9;

struct Tableau {
    /// m rows by (ncols + 1); last column is the RHS.
    rows: Vec<Vec<f64>>,
    /// Cost row with the same layout; entry `j` holds `z_j - c_j` and the
    /// last entry the current objective value of the minimize form.
    cost: Vec<f64>,
    basis: Vec<usize>,
    n_struct: usize,
    n_slack: usize,
    n_art: usize,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.n_struct + self.n_slack + self.n_art
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in &mut self.rows[row] {
            *v /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
        }
        self.basis[row] = col;
    }

    /// Bland iteration on the current cost row. `allowed` filters columns
    /// that may enter. Returns false when the loop detected unboundedness.
    fn iterate<F: Fn(usize) -> bool>(&mut self, allowed: F) -> bool {
        let ncols = self.ncols();
        let rhs = ncols;
        loop {
            let entering = (0..ncols).find(|&j| allowed(j) && self.cost[j] > PIVOT_TOL);
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rows[i][rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - PIVOT_TOL
                                || ((ratio - br).abs() <= PIVOT_TOL
                                    && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Solves the problem with the two-phase method.
///
/// Rows are normalized to nonnegative right-hand sides; `<=` rows get a
/// slack, flipped rows a surplus, and equalities (plus flipped rows) an
/// artificial variable that phase 1 drives to zero.
pub fn solve(problem: &LpProblem) -> SolveStatus {
    let n_struct = problem.objective.len();
    debug_assert!(problem
        .rows
        .iter()
        .all(|r| r.coeffs.len() == n_struct));

    // normalized senses: (coeffs, rhs, needs_slack_sign, needs_artificial)
    enum RowKind {
        Slack,       // a . x + s = b
        SurplusArt,  // a . x - s + t = b
        Art,         // a . x + t = b
    }
    let mut norm: Vec<(Vec<f64>, f64, RowKind)> = Vec::with_capacity(problem.rows.len());
    for row in &problem.rows {
        let flip = row.rhs < 0.0;
        let coeffs: Vec<f64> = if flip {
            row.coeffs.iter().map(|v| -v).collect()
        } else {
            row.coeffs.clone()
        };
        let rhs = row.rhs.abs();
        let kind = match (row.rel, flip) {
            (Relation::Le, false) => RowKind::Slack,
            (Relation::Le, true) => RowKind::SurplusArt,
            (Relation::Eq, _) => RowKind::Art,
        };
        norm.push((coeffs, rhs, kind));
    }
    let n_slack = norm
        .iter()
        .filter(|(_, _, k)| matches!(k, RowKind::Slack | RowKind::SurplusArt))
        .count();
    let n_art = norm
        .iter()
        .filter(|(_, _, k)| matches!(k, RowKind::Art | RowKind::SurplusArt))
        .count();
    let ncols = n_struct + n_slack + n_art;

    let mut rows = Vec::with_capacity(norm.len());
    let mut basis = Vec::with_capacity(norm.len());
    let mut slack_at = 0usize;
    let mut art_at = 0usize;
    for (coeffs, rhs, kind) in &norm {
        let mut r = vec![0.0; ncols + 1];
        r[..n_struct].copy_from_slice(coeffs);
        r[ncols] = *rhs;
        match kind {
            RowKind::Slack => {
                r[n_struct + slack_at] = 1.0;
                basis.push(n_struct + slack_at);
                slack_at += 1;
            }
            RowKind::SurplusArt => {
                r[n_struct + slack_at] = -1.0;
                r[n_struct + n_slack + art_at] = 1.0;
                basis.push(n_struct + n_slack + art_at);
                slack_at += 1;
                art_at += 1;
            }
            RowKind::Art => {
                r[n_struct + n_slack + art_at] = 1.0;
                basis.push(n_struct + n_slack + art_at);
                art_at += 1;
            }
        }
        rows.push(r);
    }

    let mut t = Tableau {
        rows,
        cost: vec![0.0; ncols + 1],
        basis,
        n_struct,
        n_slack,
        n_art,
    };

    // Phase 1: minimize the artificial sum. cost[j] = z_j - c_j with c = 1
    // on artificials; artificials start basic, so z_j sums their rows.
    if n_art > 0 {
        let art_range = n_struct + n_slack..ncols;
        for j in art_range.clone() {
            t.cost[j] = -1.0;
        }
        let basic_art_rows: Vec<usize> = (0..t.rows.len())
            .filter(|&i| art_range.contains(&t.basis[i]))
            .collect();
        for i in basic_art_rows {
            let row = t.rows[i].clone();
            for (v, rv) in t.cost.iter_mut().zip(&row) {
                *v += rv;
            }
        }
        if !t.iterate(|_| true) {
            // the artificial sum is bounded below; ending here means a
            // numerically broken instance
            return SolveStatus::Infeasible;
        }
        if t.cost[ncols] > 1e-7 {
            return SolveStatus::Infeasible;
        }
        // pivot leftover artificials out of the basis where possible
        let art_start = n_struct + n_slack;
        for i in 0..t.rows.len() {
            if t.basis[i] >= art_start {
                if let Some(col) =
                    (0..art_start).find(|&j| t.rows[i][j].abs() > PIVOT_TOL)
                {
                    t.pivot(i, col);
                }
            }
        }
        // any row still basic in an artificial is redundant and zero
        let keep: Vec<usize> = (0..t.rows.len())
            .filter(|&i| t.basis[i] < art_start)
            .collect();
        if keep.len() != t.rows.len() {
            t.rows = keep.iter().map(|&i| t.rows[i].clone()).collect();
            t.basis = keep.iter().map(|&i| t.basis[i]).collect();
        }
    }

    // Phase 2: minimize -objective, artificial columns banned.
    let art_start = n_struct + n_slack;
    t.cost = vec![0.0; ncols + 1];
    for j in 0..n_struct {
        t.cost[j] = problem.objective[j];
    }
    // express z_j - c_j over the current basis: add c_b times each row
    let adjustments: Vec<(usize, f64)> = (0..t.rows.len())
        .filter_map(|i| {
            let b = t.basis[i];
            let c_b = if b < n_struct {
                -problem.objective[b]
            } else {
                0.0
            };
            (c_b != 0.0).then_some((i, c_b))
        })
        .collect();
    for (i, c_b) in adjustments {
        let row = t.rows[i].clone();
        for (v, rv) in t.cost.iter_mut().zip(&row) {
            *v += c_b * rv;
        }
    }
    if !t.iterate(|j| j < art_start) {
        return SolveStatus::Unbounded;
    }

    let mut x = vec![0.0; n_struct];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n_struct {
            x[b] = t.rows[i][ncols];
        }
    }
    let reduced_costs = (0..n_struct).map(|j| -t.cost[j]).collect();
    SolveStatus::Optimal(Solution {
        x,
        objective: -t.cost[ncols],
        reduced_costs,
    })
}

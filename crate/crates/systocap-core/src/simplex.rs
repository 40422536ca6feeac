//! Dense two-phase simplex for standard-form linear programs.
//!
//! Solves `min c.x  subject to  A x = b, x >= 0`. One solver serves both
//! polytope gauge evaluations:
//!
//! * V-form gauge: `f(x) = min { sum lambda_i | V lambda = x, lambda >= 0 }`,
//!   the convex-hull (Minkowski) gauge of the vertex set;
//! * H-form support function: `h_K(p) = min { b.y | A^T y = p, y >= 0 }` by
//!   LP duality, which equals the dual gauge for symmetric bodies.
//!
//! Bland's rule everywhere (lowest eligible index enters, lowest basis index
//! breaks ratio ties), which prevents cycling on the degenerate, highly
//! symmetric polytopes this crate feeds it and makes runs deterministic. The
//! final basic solution is re-solved against the original data with Gaussian
//! elimination, so accumulated tableau drift does not leak into certificate
//! tolerances. Problem sizes here are tiny (m <= 8 rows).

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;
use crate::linalg::{solve_gauss, MatF};
use crate::{Error, Result};

/// `min costs.x  s.t.  constraints x = rhs, x >= 0`.
#[derive(Debug, Clone)]
pub struct StandardFormLp {
    pub constraints: MatF,
    pub rhs: Vec<f64>,
    pub costs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

const EPS_PIVOT: f64 = 1e-10;
const EPS_COST: f64 = 1e-10;
const MAX_ITERS: usize = 50_000;

struct Tableau {
    // rows of [B^-1 A | B^-1 b], artificial columns appended after the real ones
    rows: usize,
    cols: usize, // real + artificial
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, x: f64) {
        self.t[i * (self.cols + 1) + j] = x;
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.at(row, col);
        let width = self.cols + 1;
        for j in 0..width {
            let v = self.t[row * width + j] / piv;
            self.t[row * width + j] = v;
        }
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let factor = self.at(i, col);
            if factor == 0.0 {
                continue;
            }
            for j in 0..width {
                let v = self.t[i * width + j] - factor * self.t[row * width + j];
                self.t[i * width + j] = v;
            }
            self.set(i, col, 0.0);
        }
        self.set(row, col, 1.0);
        self.basis[row] = col;
    }

    /// Reduced cost of column j under the cost vector `c` (length cols).
    fn reduced_cost(&self, c: &[f64], j: usize) -> f64 {
        let mut r = c[j];
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                r -= cb * self.at(i, j);
            }
        }
        r
    }

    /// One simplex phase under cost vector `c`, entering columns restricted
    /// to `0..limit`. Returns false on unboundedness.
    fn run_phase(&mut self, c: &[f64], limit: usize) -> Result<bool> {
        for _ in 0..MAX_ITERS {
            // Bland: lowest index with negative reduced cost enters.
            let entering = (0..limit)
                .find(|&j| !self.basis.contains(&j) && self.reduced_cost(c, j) < -EPS_COST);
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, col);
                if a > EPS_PIVOT {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-15
                                || (fmath::abs(ratio - lr) <= 1e-15
                                    && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Ok(false),
            }
        }
        Err(Error::Domain("simplex iteration limit exceeded".to_string()))
    }
}

/// Solve a standard-form LP.
pub fn solve(lp: &StandardFormLp) -> Result<LpSolution> {
    let m = lp.constraints.rows();
    let real = lp.constraints.cols();
    if lp.rhs.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: lp.rhs.len() });
    }
    if lp.costs.len() != real {
        return Err(Error::DimensionMismatch { expected: real, got: lp.costs.len() });
    }

    // Normalized copies with nonnegative right-hand sides.
    let mut a = lp.constraints.clone();
    let mut b = lp.rhs.clone();
    for i in 0..m {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for j in 0..real {
                a.set(i, j, -a.get(i, j));
            }
        }
    }

    let cols = real + m;
    let width = cols + 1;
    let mut t = vec![0.0f64; m * width];
    for i in 0..m {
        for j in 0..real {
            t[i * width + j] = a.get(i, j);
        }
        t[i * width + real + i] = 1.0;
        t[i * width + cols] = b[i];
    }
    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        basis: (real..real + m).collect(),
    };

    // Phase 1: minimize the sum of artificial variables.
    let mut phase1_cost = vec![0.0f64; cols];
    for j in real..cols {
        phase1_cost[j] = 1.0;
    }
    if !tab.run_phase(&phase1_cost, cols)? {
        // The phase-1 objective is bounded below by zero; unboundedness here
        // means numerical breakdown.
        return Err(Error::Domain("phase 1 reported unbounded".to_string()));
    }
    let scale = 1.0 + b.iter().fold(0.0f64, |acc, &x| acc.max(fmath::abs(x)));
    let infeasibility: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= real)
        .map(|(i, _)| tab.rhs(i))
        .sum();
    if infeasibility > 1e-8 * scale {
        return Ok(LpSolution::Infeasible);
    }

    // Drive remaining artificial variables out of the basis; rows without a
    // real pivot entry are redundant constraints and are dropped.
    let mut drop_rows: Vec<usize> = Vec::new();
    for i in 0..m {
        if tab.basis[i] < real {
            continue;
        }
        let col = (0..real)
            .find(|&j| fmath::abs(tab.at(i, j)) > EPS_PIVOT && !tab.basis.contains(&j));
        match col {
            Some(j) => tab.pivot(i, j),
            None => drop_rows.push(i),
        }
    }
    if !drop_rows.is_empty() {
        let keep: Vec<usize> = (0..m).filter(|i| !drop_rows.contains(i)).collect();
        let mut t2 = Vec::with_capacity(keep.len() * width);
        let mut basis2 = Vec::with_capacity(keep.len());
        for &i in &keep {
            t2.extend_from_slice(&tab.t[i * width..(i + 1) * width]);
            basis2.push(tab.basis[i]);
        }
        tab.t = t2;
        tab.basis = basis2;
        tab.rows = keep.len();
    }

    // Phase 2 over the real columns only.
    let mut phase2_cost = vec![0.0f64; cols];
    phase2_cost[..real].copy_from_slice(&lp.costs);
    if !tab.run_phase(&phase2_cost, real)? {
        return Ok(LpSolution::Unbounded);
    }

    // Refine: re-solve the final basis against the original data.
    let rows_kept: Vec<usize> = {
        // Rows were possibly dropped; recover which original rows remain by
        // index bookkeeping above (drop_rows were removed in order).
        let mut kept: Vec<usize> = (0..m).collect();
        for &d in drop_rows.iter().rev() {
            kept.remove(d);
        }
        kept
    };
    let k = tab.rows;
    let mut x = vec![0.0f64; real];
    let mut refined = false;
    if tab.basis.iter().all(|&j| j < real) && k > 0 {
        let mut bmat = MatF::zeros(k, k);
        let mut bvec = vec![0.0f64; k];
        for (ri, &orig_row) in rows_kept.iter().enumerate() {
            for (ci, &col) in tab.basis.iter().enumerate() {
                bmat.set(ri, ci, a.get(orig_row, col));
            }
            bvec[ri] = b[orig_row];
        }
        if let Ok(xb) = solve_gauss(&bmat, &bvec) {
            if xb.iter().all(|&v| v > -1e-7) {
                for (ci, &col) in tab.basis.iter().enumerate() {
                    x[col] = xb[ci].max(0.0);
                }
                refined = true;
            }
        }
    }
    if !refined {
        for (i, &j) in tab.basis.iter().enumerate() {
            if j < real {
                x[j] = tab.rhs(i).max(0.0);
            }
        }
    }
    let value = dot_cost(&lp.costs, &x);
    Ok(LpSolution::Optimal { x, value })
}

fn dot_cost(c: &[f64], x: &[f64]) -> f64 {
    c.iter().zip(x).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn lp(rows: &[Vec<f64>], rhs: &[f64], costs: &[f64]) -> StandardFormLp {
        StandardFormLp {
            constraints: MatF::from_rows(rows).unwrap(),
            rhs: rhs.to_vec(),
            costs: costs.to_vec(),
        }
    }

    #[test]
    fn simple_equality_program() {
        // min x1 + x2 with x1 + x2 = 1
        let p = lp(&[vec![1.0, 1.0]], &[1.0], &[1.0, 1.0]);
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn hull_gauge_of_cross_polytope() {
        // vertices +-e1, +-e2; gauge of (0.5, 0.5) is the l1 norm, 1.
        let p = lp(
            &[
                vec![1.0, -1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, -1.0],
            ],
            &[0.5, 0.5],
            &[1.0, 1.0, 1.0, 1.0],
        );
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, x } => {
                assert!((value - 1.0).abs() < 1e-12);
                let reconstructed = [x[0] - x[1], x[2] - x[3]];
                assert!((reconstructed[0] - 0.5).abs() < 1e-12);
                assert!((reconstructed[1] - 0.5).abs() < 1e-12);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn support_function_of_cube() {
        // cube [-1,1]^2 as A v <= 1 with rows +-e_k; support at p = (3,4) is 7.
        // dual program: min 1.y  s.t.  A^T y = p, y >= 0
        let p = lp(
            &[
                vec![1.0, -1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, -1.0],
            ],
            &[3.0, 4.0],
            &[1.0, 1.0, 1.0, 1.0],
        );
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, .. } => assert!((value - 7.0).abs() < 1e-12),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_program() {
        // x1 = -1 with x1 >= 0
        let p = lp(&[vec![1.0]], &[-1.0], &[1.0]);
        assert_eq!(solve(&p).unwrap(), LpSolution::Infeasible);
    }

    #[test]
    fn detects_unbounded_program() {
        // min -x1 with x1 - x2 = 0
        let p = lp(&[vec![1.0, -1.0]], &[0.0], &[-1.0, 0.0]);
        assert_eq!(solve(&p).unwrap(), LpSolution::Unbounded);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // duplicated constraint row
        let p = lp(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 1.0], &[2.0, 1.0]);
        match solve(&p).unwrap() {
            LpSolution::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            other => panic!("expected optimum, got {other:?}"),
        }
    }
}

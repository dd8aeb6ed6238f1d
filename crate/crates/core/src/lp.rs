//! Dense two-phase simplex for small linear programs.
//!
//! Solves `min cᵀx  s.t.  A_eq x = b_eq,  A_ub x ≤ b_ub,  x ≥ 0`. Intended for
//! desk-scale problems (a few hundred rows); the tableau is stored densely.
//! Dantzig pricing is used until a run of degenerate pivots, after which
//! Bland's rule takes over to rule out cycling.

use crate::error::{Result, TroError};

const EPS: f64 = 1e-10;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>, // each row: coefficients.., rhs
    obj: Vec<f64>,       // reduced costs.., -objective
    basis: Vec<usize>,
    ncols: usize,
    allowed: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&prow) {
                        *v -= f * pv;
                    }
                    row[c] = 0.0;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn run(&mut self, max_iter: usize) -> Result<()> {
        let rhs = self.ncols;
        let mut degenerate_streak = 0usize;
        for _ in 0..max_iter {
            let bland = degenerate_streak > 50;
            let mut enter = None;
            let mut best = -EPS;
            for j in 0..self.ncols {
                if !self.allowed[j] {
                    continue;
                }
                let rc = self.obj[j];
                if rc < -EPS {
                    if bland {
                        enter = Some(j);
                        break;
                    }
                    if rc < best {
                        best = rc;
                        enter = Some(j);
                    }
                }
            }
            let Some(c) = enter else {
                return Ok(());
            };
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a > EPS {
                    let ratio = row[rhs] / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio - 1e-12
                                || (ratio <= best_ratio + 1e-12 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(TroError::LinearProgram("unbounded"));
            };
            if best_ratio.abs() < 1e-12 {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            self.pivot(r, c);
        }
        Err(TroError::LinearProgram("not solved within the iteration cap"))
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.c.len();
    let m_eq = lp.a_eq.len();
    let m_ub = lp.a_ub.len();
    if lp.b_eq.len() != m_eq || lp.b_ub.len() != m_ub {
        return Err(TroError::InvalidParameter("LP row/rhs length mismatch".into()));
    }
    if lp.a_eq.iter().chain(&lp.a_ub).any(|r| r.len() != n) {
        return Err(TroError::InvalidParameter("LP row width mismatch".into()));
    }
    let m = m_eq + m_ub;
    // columns: original n, slacks m_ub, artificials m
    let n_slack = m_ub;
    let art0 = n + n_slack;
    let ncols = art0 + m;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; ncols + 1];
        let (coeffs, b, slack) = if i < m_eq {
            (&lp.a_eq[i], lp.b_eq[i], None)
        } else {
            (&lp.a_ub[i - m_eq], lp.b_ub[i - m_eq], Some(n + i - m_eq))
        };
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        for (j, &a) in coeffs.iter().enumerate() {
            row[j] = sign * a;
        }
        if let Some(s) = slack {
            row[s] = sign;
        }
        row[ncols] = sign * b;
        match slack {
            Some(s) if sign > 0.0 => basis.push(s),
            _ => {
                row[art0 + i] = 1.0;
                basis.push(art0 + i);
            }
        }
        rows.push(row);
    }
    let mut allowed = vec![true; ncols];
    // phase 1 objective: sum of artificials that are basic
    let mut obj = vec![0.0; ncols + 1];
    for (i, &b) in basis.iter().enumerate() {
        if b >= art0 {
            obj[b] = 1.0;
            let _ = i;
        }
    }
    // unused artificials must never enter
    for i in 0..m {
        if basis[i] != art0 + i {
            allowed[art0 + i] = false;
        }
    }
    for (i, &b) in basis.iter().enumerate() {
        if b >= art0 {
            for (v, rv) in obj.iter_mut().zip(&rows[i]) {
                *v -= rv;
            }
        }
    }
    let mut t = Tableau {
        rows,
        obj,
        basis,
        ncols,
        allowed,
    };
    let cap = 50 * (ncols + m) + 1000;
    t.run(cap)?;
    let bnorm: f64 = lp.b_eq.iter().chain(&lp.b_ub).map(|b| b.abs()).sum::<f64>();
    if -t.obj[ncols] > 1e-8 * (1.0 + bnorm) {
        return Err(TroError::LinearProgram("infeasible"));
    }
    // drive artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= art0 {
            let col = (0..art0).find(|&j| t.rows[r][j].abs() > 1e-9);
            match col {
                Some(j) => {
                    t.pivot(r, j);
                    r += 1;
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }
    for j in art0..ncols {
        t.allowed[j] = false;
    }
    // phase 2 objective
    let mut obj = vec![0.0; ncols + 1];
    obj[..n].copy_from_slice(&lp.c);
    for (i, &b) in t.basis.iter().enumerate() {
        let cb = obj[b];
        if cb != 0.0 {
            for (v, rv) in obj.iter_mut().zip(&t.rows[i]) {
                *v -= cb * rv;
            }
        }
    }
    t.obj = obj;
    t.run(cap)?;
    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rows[i][ncols].max(0.0);
        }
    }
    let objective = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_max_problem() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let lp = LinearProgram {
            c: vec![-3.0, -5.0],
            a_ub: vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            b_ub: vec![4.0, 12.0, 18.0],
            ..Default::default()
        };
        let s = solve(&lp).unwrap();
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_with_redundant_row() {
        // transportation 2x2 with redundant balance row
        let lp = LinearProgram {
            c: vec![0.0, 1.0, 1.0, 0.0],
            a_eq: vec![
                vec![1.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0, 0.0],
                vec![0.0, 1.0, 0.0, 1.0],
            ],
            b_eq: vec![0.5, 0.5, 0.3, 0.7],
            ..Default::default()
        };
        let s = solve(&lp).unwrap();
        assert!((s.objective - 0.2).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let infeasible = LinearProgram {
            c: vec![1.0],
            a_ub: vec![vec![1.0]],
            b_ub: vec![-1.0],
            ..Default::default()
        };
        assert!(solve(&infeasible).is_err());
        let unbounded = LinearProgram {
            c: vec![-1.0],
            a_ub: vec![vec![-1.0]],
            b_ub: vec![1.0],
            ..Default::default()
        };
        assert_eq!(solve(&unbounded).unwrap_err(), TroError::LinearProgram("unbounded"));
    }
}

//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Sized for the small, highly degenerate programs that arise in cone
//! membership tests (a few hundred columns at most). All variables are
//! nonnegative; callers split free variables themselves.

use thiserror::Error;

/// Pivot and optimality threshold.
const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row has {got} coefficients, program has {expected} variables")]
    Shape { expected: usize, got: usize },
    #[error("non-finite value in program data")]
    NonFinite,
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal {
        x: Vec<f64>,
        value: f64,
    },
    Infeasible,
    /// `x` is feasible and `x + t·ray` stays feasible for all `t ≥ 0` while
    /// the objective decreases without bound.
    Unbounded {
        x: Vec<f64>,
        ray: Vec<f64>,
    },
}

/// `minimize c·x` subject to linear rows and `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    /// Always the minimized objective; `maximize` stores it negated.
    objective: Vec<f64>,
    maximize: bool,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> Self {
        Self {
            objective,
            maximize: false,
            rows: Vec::new(),
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self {
            maximize: true,
            ..Self::minimize(objective.into_iter().map(|c| -c).collect())
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars() {
            return Err(LpError::Shape {
                expected: self.num_vars(),
                got: coeffs.len(),
            });
        }
        self.rows.push((coeffs, relation, rhs));
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let finite = self.objective.iter().all(|c| c.is_finite())
            && self
                .rows
                .iter()
                .all(|(a, _, b)| b.is_finite() && a.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(LpError::NonFinite);
        }
        let sol = Tableau::build(self).run(&self.objective)?;
        Ok(match sol {
            LpSolution::Optimal { x, value } if self.maximize => {
                LpSolution::Optimal { x, value: -value }
            }
            other => other,
        })
    }
}

struct Tableau {
    n: usize,
    cols: usize,
    /// Columns `>= first_artificial` are artificial.
    first_artificial: usize,
    /// Row-major `m × (cols + 1)`, rhs in the last column.
    a: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    limit: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        // normalize to b ≥ 0
        let rows: Vec<(Vec<f64>, Relation, f64)> = lp
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if *b < 0.0 {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|x| -x).collect(), flipped, -b)
                } else {
                    (a.clone(), *rel, *b)
                }
            })
            .collect();
        let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let first_artificial = n + slacks;
        let cols = first_artificial + artificials;
        let m = rows.len();
        let mut a = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (n, first_artificial);
        for (coeffs, rel, b) in rows {
            let mut row = vec![0.0; cols + 1];
            row[..n].copy_from_slice(&coeffs);
            row[cols] = b;
            match rel {
                Relation::Le => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            a.push(row);
        }
        Self {
            n,
            cols,
            first_artificial,
            a,
            obj: vec![0.0; cols + 1],
            basis,
            pivots: 0,
            limit: 20_000 + 50 * (m + cols),
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        self.a[r].iter_mut().for_each(|x| *x /= p);
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (x, &y) in self.obj.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Load reduced costs for `cost` (length `cols`) against the current basis.
    fn set_objective(&mut self, cost: &[f64]) {
        self.obj = cost.to_vec();
        self.obj.push(0.0);
        for (i, &j) in self.basis.iter().enumerate() {
            let cj = cost[j];
            if cj != 0.0 {
                for (x, &y) in self.obj.iter_mut().zip(&self.a[i]) {
                    *x -= cj * y;
                }
            }
        }
    }

    /// Bland-rule simplex over columns `< allowed`. Returns the entering
    /// column of an unbounded direction, if any.
    fn optimize(&mut self, allowed: usize) -> Result<Option<usize>, LpError> {
        loop {
            if self.pivots > self.limit {
                return Err(LpError::IterationLimit(self.limit));
            }
            let Some(c) = (0..allowed).find(|&j| self.obj[j] < -EPS) else {
                return Ok(None);
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if row[c] > EPS {
                    let ratio = row[self.cols] / row[c];
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-12
                                || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Ok(Some(c)),
            }
        }
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                x[j] = self.a[i][self.cols].max(0.0);
            }
        }
        x
    }

    fn run(mut self, objective: &[f64]) -> Result<LpSolution, LpError> {
        if self.first_artificial < self.cols {
            let mut cost = vec![0.0; self.cols];
            cost[self.first_artificial..]
                .iter_mut()
                .for_each(|c| *c = 1.0);
            self.set_objective(&cost);
            self.optimize(self.cols)?;
            let infeasibility = -self.obj[self.cols];
            let scale = 1.0
                + self
                    .a
                    .iter()
                    .map(|r| r[self.cols].abs())
                    .fold(0.0, f64::max);
            if infeasibility > 1e-9 * scale {
                return Ok(LpSolution::Infeasible);
            }
            self.drive_out_artificials();
        }
        let mut cost = vec![0.0; self.cols];
        cost[..self.n].copy_from_slice(objective);
        self.set_objective(&cost);
        match self.optimize(self.first_artificial)? {
            None => {
                let x = self.primal();
                let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
                Ok(LpSolution::Optimal { x, value })
            }
            Some(c) => {
                let mut ray = vec![0.0; self.n];
                if c < self.n {
                    ray[c] = 1.0;
                }
                for (i, &j) in self.basis.iter().enumerate() {
                    if j < self.n {
                        ray[j] = -self.a[i][c];
                    }
                }
                Ok(LpSolution::Unbounded {
                    x: self.primal(),
                    ray,
                })
            }
        }
    }

    /// After phase 1, pivot zero-level artificials out of the basis; rows
    /// where that is impossible are linearly dependent and are dropped.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&j| self.a[i][j].abs() > EPS);
                match col {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(s: LpSolution) -> (Vec<f64>, f64) {
        match s {
            LpSolution::Optimal { x, value } => (x, value),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = LinearProgram::maximize(vec![3.0, 5.0]);
        lp.add(vec![1.0, 0.0], Relation::Le, 4.0).unwrap();
        lp.add(vec![0.0, 2.0], Relation::Le, 12.0).unwrap();
        lp.add(vec![3.0, 2.0], Relation::Le, 18.0).unwrap();
        let (x, v) = optimal(lp.solve().unwrap());
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
        assert!((v - 36.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y, x + y = 2, x ≥ 0.5, y - x ≥ -1
        let mut lp = LinearProgram::minimize(vec![1.0, 2.0]);
        lp.add(vec![1.0, 1.0], Relation::Eq, 2.0).unwrap();
        lp.add(vec![1.0, 0.0], Relation::Ge, 0.5).unwrap();
        lp.add(vec![-1.0, 1.0], Relation::Ge, -1.0).unwrap();
        let (x, v) = optimal(lp.solve().unwrap());
        assert!((x[0] - 1.5).abs() < 1e-9 && (x[1] - 0.5).abs() < 1e-9);
        assert!((v - 2.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_program() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        lp.add(vec![1.0], Relation::Ge, 2.0).unwrap();
        lp.add(vec![1.0], Relation::Le, 1.0).unwrap();
        assert_eq!(lp.solve().unwrap(), LpSolution::Infeasible);
    }

    #[test]
    fn unbounded_ray_is_feasible_direction() {
        // min -x - y, x - y ≤ 1
        let mut lp = LinearProgram::minimize(vec![-1.0, -1.0]);
        lp.add(vec![1.0, -1.0], Relation::Le, 1.0).unwrap();
        match lp.solve().unwrap() {
            LpSolution::Unbounded { ray, .. } => {
                assert!(ray.iter().all(|&r| r >= -1e-12));
                assert!(ray[0] - ray[1] <= 1e-12);
                assert!(-ray[0] - ray[1] < 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::minimize(vec![1.0, 1.0]);
        lp.add(vec![1.0, 1.0], Relation::Eq, 1.0).unwrap();
        lp.add(vec![2.0, 2.0], Relation::Eq, 2.0).unwrap();
        let (_, v) = optimal(lp.solve().unwrap());
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_cone_program_terminates() {
        // min -x1 over the cone x1 ≤ x2, x2 ≤ x3, x3 ≤ x1 with x1 ≤ 1
        let mut lp = LinearProgram::minimize(vec![-1.0, 0.0, 0.0]);
        lp.add(vec![1.0, -1.0, 0.0], Relation::Le, 0.0).unwrap();
        lp.add(vec![0.0, 1.0, -1.0], Relation::Le, 0.0).unwrap();
        lp.add(vec![-1.0, 0.0, 1.0], Relation::Le, 0.0).unwrap();
        lp.add(vec![1.0, 0.0, 0.0], Relation::Le, 1.0).unwrap();
        let (x, v) = optimal(lp.solve().unwrap());
        assert!((v + 1.0).abs() < 1e-9);
        assert!(x.iter().all(|&xi| (xi - 1.0).abs() < 1e-9));
    }

    #[test]
    fn shape_and_finiteness_errors() {
        let mut lp = LinearProgram::minimize(vec![1.0]);
        assert!(lp.add(vec![1.0, 2.0], Relation::Le, 1.0).is_err());
        lp.add(vec![1.0], Relation::Le, f64::INFINITY).unwrap();
        assert_eq!(lp.solve(), Err(LpError::NonFinite));
    }
}

//! Dense two-phase primal simplex, generic over the scalar so the same code
//! runs in exact rational arithmetic and in floating point. Bland's rule
//! throughout, so it terminates without perturbation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Scalar abstraction: exact rationals compare exactly, floats compare with a
/// fixed tolerance.
pub trait LpNum: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Strictly positive beyond tolerance.
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool {
        self.neg().is_positive()
    }
    fn is_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }
    fn lt(&self, o: &Self) -> bool {
        o.sub(self).is_positive()
    }
}

impl LpNum for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
}

const F64_TOL: f64 = 1e-9;

impl LpNum for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_positive(&self) -> bool {
        *self > F64_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
}

/// maximize objective · x subject to the rows, x >= 0. Right-hand sides must
/// be nonnegative.
#[derive(Debug, Clone)]
pub struct LpProblem<T> {
    pub objective: Vec<T>,
    pub rows: Vec<(Vec<T>, RowSense, T)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub objective: T,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("right-hand sides must be nonnegative")]
    NegativeRhs,
    #[error("simplex did not converge within the pivot budget")]
    NoConvergence,
}

struct Tableau<T> {
    /// rows[i][j], last column is the RHS
    rows: Vec<Vec<T>>,
    /// basis[i] = column basic in row i
    basis: Vec<usize>,
    /// reduced-cost row; last entry is minus the objective value
    obj: Vec<T>,
    ncols: usize,
    banned: Vec<bool>,
}

#[allow(clippy::needless_range_loop)] // lockstep row operations over two vectors
impl<T: LpNum> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col].clone();
        for x in self.rows[row].iter_mut() {
            *x = x.div(&piv);
        }
        let pivot_row = self.rows[row].clone();
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..=self.ncols {
                self.rows[i][j] = self.rows[i][j].sub(&factor.mul(&pivot_row[j]));
            }
        }
        let factor = self.obj[col].clone();
        if !factor.is_zero() {
            for j in 0..=self.ncols {
                self.obj[j] = self.obj[j].sub(&factor.mul(&pivot_row[j]));
            }
        }
        self.basis[row] = col;
    }

    /// Entering column: largest reduced cost normally, smallest index once
    /// the anti-cycling fallback is active.
    fn entering(&self, bland: bool) -> Option<usize> {
        if bland {
            return (0..self.ncols).find(|&j| !self.banned[j] && self.obj[j].is_positive());
        }
        let mut best: Option<usize> = None;
        for j in 0..self.ncols {
            if self.banned[j] || !self.obj[j].is_positive() {
                continue;
            }
            match best {
                None => best = Some(j),
                Some(b) if self.obj[b].lt(&self.obj[j]) => best = Some(j),
                _ => {}
            }
        }
        best
    }

    /// Ratio test; smallest basis variable breaks ties (Bland-compatible).
    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(T, usize)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][col];
            if !a.is_positive() {
                continue;
            }
            let ratio = self.rows[i][self.ncols].div(a);
            let better = match &best {
                None => true,
                Some((r, bi)) => {
                    ratio.lt(r) || (!r.lt(&ratio) && self.basis[i] < self.basis[*bi])
                }
            };
            if better {
                best = Some((ratio, i));
            }
        }
        best.map(|(_, i)| i)
    }

    fn run(&mut self) -> Result<(), LpError> {
        // Dantzig pivoting; after a long degenerate stall, switch to Bland's
        // rule, which cannot cycle.
        let stall_limit = 2 * (self.rows.len() + self.ncols) + 16;
        let mut stalled = 0usize;
        let mut bland = false;
        let mut pivots = 0usize;
        loop {
            let Some(col) = self.entering(bland) else { return Ok(()) };
            let Some(row) = self.leaving(col) else { return Err(LpError::Unbounded) };
            let before = self.obj[self.ncols].clone();
            self.pivot(row, col);
            pivots += 1;
            if pivots > 4_000_000 {
                return Err(LpError::NoConvergence);
            }
            if self.obj[self.ncols].sub(&before).is_zero() {
                stalled += 1;
                if stalled > stall_limit {
                    bland = true;
                }
            } else {
                stalled = 0;
            }
        }
    }
}

#[allow(clippy::needless_range_loop)] // lockstep row operations over two vectors
pub fn solve<T: LpNum>(problem: &LpProblem<T>) -> Result<LpSolution<T>, LpError> {
    let nvars = problem.objective.len();
    let m = problem.rows.len();
    for (coeffs, _, rhs) in &problem.rows {
        assert_eq!(coeffs.len(), nvars, "row width mismatch");
        if rhs.is_negative() {
            return Err(LpError::NegativeRhs);
        }
    }
    let nslack = problem.rows.iter().filter(|(_, s, _)| *s == RowSense::Le).count();
    let nart = m - nslack;
    let ncols = nvars + nslack + nart;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack_at = nvars;
    let mut art_at = nvars + nslack;
    let mut art_cols = Vec::new();
    for (coeffs, sense, rhs) in &problem.rows {
        let mut row: Vec<T> = Vec::with_capacity(ncols + 1);
        row.extend(coeffs.iter().cloned());
        row.resize(ncols, T::zero());
        row.push(rhs.clone());
        match sense {
            RowSense::Le => {
                row[slack_at] = T::one();
                basis.push(slack_at);
                slack_at += 1;
            }
            RowSense::Eq => {
                row[art_at] = T::one();
                basis.push(art_at);
                art_cols.push(art_at);
                art_at += 1;
            }
        }
        rows.push(row);
    }

    let mut banned = vec![false; ncols];
    let mut tab = Tableau { rows, basis, obj: vec![T::zero(); ncols + 1], ncols, banned: banned.clone() };

    if nart > 0 {
        // Phase 1: maximize minus the sum of artificials.
        let mut obj = vec![T::zero(); ncols + 1];
        for &c in &art_cols {
            obj[c] = T::from_i64(-1);
        }
        // Price out the basic artificials.
        for i in 0..m {
            if art_cols.contains(&tab.basis[i]) {
                for j in 0..=ncols {
                    obj[j] = obj[j].add(&tab.rows[i][j]);
                }
            }
        }
        tab.obj = obj;
        tab.run()?;
        // obj rhs slot holds minus the phase-1 objective = sum of artificials.
        if tab.obj[ncols].is_positive() {
            return Err(LpError::Infeasible);
        }
        // Drive remaining artificials out of the basis.
        for i in 0..m {
            if art_cols.contains(&tab.basis[i]) {
                if let Some(col) =
                    (0..nvars + nslack).find(|&j| !tab.rows[i][j].is_zero())
                {
                    tab.pivot(i, col);
                }
            }
        }
        for &c in &art_cols {
            banned[c] = true;
        }
        tab.banned = banned;
    }

    // Phase 2: true objective, priced out over the current basis.
    let mut obj = vec![T::zero(); ncols + 1];
    obj[..nvars].clone_from_slice(&problem.objective);
    for i in 0..m {
        let b = tab.basis[i];
        if b < nvars && !problem.objective[b].is_zero() {
            let factor = problem.objective[b].clone();
            for j in 0..=ncols {
                obj[j] = obj[j].sub(&factor.mul(&tab.rows[i][j]));
            }
        }
    }
    tab.obj = obj;
    tab.run()?;

    let mut values = vec![T::zero(); nvars];
    for i in 0..m {
        if tab.basis[i] < nvars {
            values[tab.basis[i]] = tab.rows[i][ncols].clone();
        }
    }
    Ok(LpSolution { objective: tab.obj[ncols].neg(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_max_problem() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6 -> x=4, y=0, obj 12
        let p = LpProblem {
            objective: vec![rat(3, 1), rat(2, 1)],
            rows: vec![
                (vec![rat(1, 1), rat(1, 1)], RowSense::Le, rat(4, 1)),
                (vec![rat(1, 1), rat(3, 1)], RowSense::Le, rat(6, 1)),
            ],
        };
        let s = solve(&p).unwrap();
        assert_eq!(s.objective, rat(12, 1));
        assert_eq!(s.values, vec![rat(4, 1), rat(0, 1)]);
    }

    #[test]
    fn equality_constraints_via_phase_one() {
        // max x + y s.t. x + y = 1, x - y <= 0 -> optimum 1
        let p = LpProblem {
            objective: vec![rat(1, 1), rat(1, 1)],
            rows: vec![
                (vec![rat(1, 1), rat(1, 1)], RowSense::Eq, rat(1, 1)),
                (vec![rat(1, 1), rat(-1, 1)], RowSense::Le, rat(0, 1)),
            ],
        };
        let s = solve(&p).unwrap();
        assert_eq!(s.objective, rat(1, 1));
    }

    #[test]
    fn detects_infeasible() {
        // x = 2 with x <= 1
        let p = LpProblem {
            objective: vec![rat(1, 1)],
            rows: vec![
                (vec![rat(1, 1)], RowSense::Eq, rat(2, 1)),
                (vec![rat(1, 1)], RowSense::Le, rat(1, 1)),
            ],
        };
        assert_eq!(solve(&p).unwrap_err(), LpError::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let p = LpProblem {
            objective: vec![rat(1, 1)],
            rows: vec![(vec![rat(-1, 1)], RowSense::Le, rat(1, 1))],
        };
        assert_eq!(solve(&p).unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn float_instantiation_agrees() {
        let p = LpProblem {
            objective: vec![3.0, 2.0],
            rows: vec![
                (vec![1.0, 1.0], RowSense::Le, 4.0),
                (vec![1.0, 3.0], RowSense::Le, 6.0),
            ],
        };
        let s = solve(&p).unwrap();
        assert!((s.objective - 12.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling-prone instance; Bland's rule must terminate.
        let p = LpProblem {
            objective: vec![rat(10, 1), rat(-57, 1), rat(-9, 1), rat(-24, 1)],
            rows: vec![
                (
                    vec![rat(1, 2), rat(-11, 2), rat(-5, 2), rat(9, 1)],
                    RowSense::Le,
                    rat(0, 1),
                ),
                (
                    vec![rat(1, 2), rat(-3, 2), rat(-1, 2), rat(1, 1)],
                    RowSense::Le,
                    rat(0, 1),
                ),
                (vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)], RowSense::Le, rat(1, 1)),
            ],
        };
        let s = solve(&p).unwrap();
        assert_eq!(s.objective, rat(1, 1));
    }
}

//! Exact two-phase simplex over the rationals (Bland's rule, so it cannot
//! cycle). Sizes here are desk scale: a few dozen variables at most.

use num_traits::{Signed, Zero};

use super::{rat, Rational};

/// `minimize cost·x  subject to  a·x = b,  x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub cost: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn solution(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

struct Tableau {
    // rows: constraints, last column is rhs
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    nvars: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for v in self.t[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex for `cost` over columns `allowed`; false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> bool {
        let rhs = self.nvars;
        loop {
            // reduced costs
            let mut entering = None;
            for j in 0..self.nvars {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &bv) in self.basis.iter().enumerate() {
                    if !self.t[i][j].is_zero() {
                        rc -= &cost[bv] * &self.t[i][j];
                    }
                }
                if rc.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                if self.t[i][c].is_positive() {
                    let ratio = &self.t[i][rhs] / &self.t[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

impl LinearProgram {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>, cost: Vec<Rational>) -> Self {
        Self { a, b, cost }
    }

    /// Pure feasibility problem (zero objective).
    pub fn feasibility(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Self {
        let n = a.first().map_or(0, Vec::len);
        Self::new(a, b, vec![rat(0); n])
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn solve(&self) -> LpOutcome {
        let m = self.a.len();
        let n = self.num_vars();
        let total = n + m;
        let mut t = Vec::with_capacity(m);
        for (row, bi) in self.a.iter().zip(&self.b) {
            assert_eq!(row.len(), n, "constraint row length");
            let flip = bi.is_negative();
            let mut r: Vec<Rational> = row
                .iter()
                .map(|x| if flip { -x.clone() } else { x.clone() })
                .collect();
            r.extend((0..m).map(|_| rat(0)));
            r.push(if flip { -bi.clone() } else { bi.clone() });
            t.push(r);
        }
        for (i, r) in t.iter_mut().enumerate() {
            r[n + i] = rat(1);
        }
        let mut tab = Tableau {
            t,
            basis: (n..total).collect(),
            nvars: total,
        };

        // phase 1: minimize the sum of artificials
        let mut phase1 = vec![rat(0); total];
        for c in phase1.iter_mut().skip(n) {
            *c = rat(1);
        }
        tab.optimize(&phase1, &|_| true);
        let infeas: Rational = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &bv)| bv >= n)
            .map(|(i, _)| tab.t[i][total].clone())
            .sum();
        if infeas.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= n {
                match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        // phase 2 over the original columns only
        let mut cost = self.cost.clone();
        cost.extend((0..m).map(|_| rat(0)));
        if !tab.optimize(&cost, &|j| j < n) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![rat(0); n];
        for (i, &bv) in tab.basis.iter().enumerate() {
            if bv < n {
                x[bv] = tab.t[i][total].clone();
            }
        }
        let value = x.iter().zip(&self.cost).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

/// Some `x ≥ 0` with `a·x = b`, if any.
pub(crate) fn nonnegative_solution(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    if a.is_empty() {
        return Some(Vec::new()).filter(|_| b.is_empty());
    }
    LinearProgram::feasibility(a.to_vec(), b.to_vec())
        .solve()
        .solution()
        .map(<[Rational]>::to_vec)
}

/// Some `x > 0` (strictly) with `a·x = b`, if any, where `a` has `n` columns.
///
/// Maximizes `s` subject to `x_k ≥ s`, `s ≤ 1`; strict feasibility holds
/// exactly when the optimum is positive.
pub(crate) fn strictly_positive_solution(
    a: &[Vec<Rational>],
    b: &[Rational],
    n: usize,
) -> Option<Vec<Rational>> {
    if n == 0 {
        return b.iter().all(Zero::is_zero).then(Vec::new);
    }
    // variables: x (n), s, slack_k (n), slack0
    let nv = 2 * n + 2;
    let s = n;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (row, bi) in a.iter().zip(b) {
        let mut r = vec![rat(0); nv];
        r[..n].clone_from_slice(row);
        rows.push(r);
        rhs.push(bi.clone());
    }
    for k in 0..n {
        let mut r = vec![rat(0); nv];
        r[k] = rat(1);
        r[s] = rat(-1);
        r[s + 1 + k] = rat(-1);
        rows.push(r);
        rhs.push(rat(0));
    }
    let mut r = vec![rat(0); nv];
    r[s] = rat(1);
    r[nv - 1] = rat(1);
    rows.push(r);
    rhs.push(rat(1));
    let mut cost = vec![rat(0); nv];
    cost[s] = rat(-1);
    match LinearProgram::new(rows, rhs, cost).solve() {
        LpOutcome::Optimal { x, .. } if x[s].is_positive() => Some(x[..n].to_vec()),
        _ => None,
    }
}

/// Some `h` (free sign) with `⟨h, v_k⟩ ≥ 1` for every given vector `v_k`.
pub(crate) fn positive_functional(vectors: &[Vec<Rational>], dim: usize) -> Option<Vec<Rational>> {
    // h = h⁺ − h⁻ ; ⟨h, v_k⟩ − s_k = 1
    let k = vectors.len();
    let nv = 2 * dim + k;
    let rows: Vec<Vec<Rational>> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut r = vec![rat(0); nv];
            for j in 0..dim {
                r[j] = v[j].clone();
                r[dim + j] = -v[j].clone();
            }
            r[2 * dim + i] = rat(-1);
            r
        })
        .collect();
    if rows.is_empty() {
        return None;
    }
    let x = nonnegative_solution(&rows, &vec![rat(1); k])?;
    Some((0..dim).map(|j| &x[j] - &x[dim + j]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::ratio;

    fn rv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn simple_optimum() {
        // min -x - y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let lp = LinearProgram::new(
            vec![rv(&[1, 2, 1, 0]), rv(&[3, 1, 0, 1])],
            rv(&[4, 6]),
            rv(&[-1, -1, 0, 0]),
        );
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x[0], ratio(8, 5));
                assert_eq!(x[1], ratio(6, 5));
                assert_eq!(value, ratio(-14, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram::feasibility(vec![rv(&[1, 1])], rv(&[-1]));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let lp = LinearProgram::new(vec![rv(&[1, -1])], rv(&[0]), rv(&[-1, 0]));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let lp = LinearProgram::feasibility(vec![rv(&[1, 1]), rv(&[2, 2])], rv(&[1, 2]));
        assert!(lp.solve().solution().is_some());
    }

    #[test]
    fn strict_positivity() {
        // x1 + x2 = 1 admits x > 0
        assert!(strictly_positive_solution(&[rv(&[1, 1])], &rv(&[1]), 2).is_some());
        // x1 - x2 = 1, x1 + x2 = 1 forces x2 = 0
        assert!(strictly_positive_solution(&[rv(&[1, -1]), rv(&[1, 1])], &rv(&[1, 1]), 2).is_none());
    }

    #[test]
    fn positive_functional_examples() {
        assert!(positive_functional(&[rv(&[1]), rv(&[1]), rv(&[1])], 1).is_some());
        assert!(positive_functional(&[rv(&[1]), rv(&[-1])], 1).is_none());
        let h = positive_functional(&[rv(&[1, 1]), rv(&[1, -1])], 2).unwrap();
        assert!(&h[0] + &h[1] >= rat(1) && &h[0] - &h[1] >= rat(1));
    }
}

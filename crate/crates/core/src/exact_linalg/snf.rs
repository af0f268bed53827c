use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntegerMatrix;
use crate::error::{Error, Result};

/// `u · m · v = d` with `u`, `v` unimodular and `d` diagonal, `d_1 | d_2 | …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// Nonzero invariant factors, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn swap_rows(m: &mut IntegerMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let t = m[(a, j)].clone();
        m[(a, j)] = m[(b, j)].clone();
        m[(b, j)] = t;
    }
}

fn swap_cols(m: &mut IntegerMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let t = m[(i, a)].clone();
        m[(i, a)] = m[(i, b)].clone();
        m[(i, b)] = t;
    }
}

/// row[dst] += f · row[src]
fn add_row(m: &mut IntegerMatrix, dst: usize, src: usize, f: &BigInt) {
    for j in 0..m.cols() {
        let v = f * &m[(src, j)];
        m[(dst, j)] += v;
    }
}

/// col[dst] += f · col[src]
fn add_col(m: &mut IntegerMatrix, dst: usize, src: usize, f: &BigInt) {
    for i in 0..m.rows() {
        let v = f * &m[(i, src)];
        m[(i, dst)] += v;
    }
}

fn negate_row(m: &mut IntegerMatrix, r: usize) {
    for j in 0..m.cols() {
        let v = -m[(r, j)].clone();
        m[(r, j)] = v;
    }
}

/// Smith normal form by repeated pivoting on the smallest entry.
///
/// Row operations are mirrored into `u`, column operations into `v`; the
/// result is checked exactly before returning.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, d, v, m);
            };
            swap_rows(&mut d, t, pi);
            swap_rows(&mut u, t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);

            let mut dirty = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                add_row(&mut d, i, t, &q);
                add_row(&mut u, i, t, &q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                add_col(&mut d, j, t, &q);
                add_col(&mut v, j, t, &q);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let piv = d[(t, t)].clone();
            let offending = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !d[(i, j)].is_multiple_of(&piv)));
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    add_row(&mut d, t, i, &one);
                    add_row(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    finish(u, d, v, m)
}

fn finish(u: IntegerMatrix, d: IntegerMatrix, v: IntegerMatrix, m: &IntegerMatrix) -> SmithForm {
    debug_assert_eq!(
        u.mul(m).and_then(|um| um.mul(&v)).expect("shapes agree"),
        d,
        "U·M·V must equal D"
    );
    SmithForm { u, d, v }
}

/// True iff `x` lies in the lattice generated by the rows of `gens`.
pub fn lattice_contains(gens: &IntegerMatrix, x: &[BigInt]) -> Result<bool> {
    if x.len() != gens.cols() {
        return Err(Error::dim(gens.cols(), x.len()));
    }
    // x = y·G  <=>  x·V = y'·D  for U·G·V = D
    let snf = smith_normal_form(gens);
    let xv = snf.v.transpose().mul_vec(x)?;
    let factors = snf.invariant_factors();
    for (i, c) in xv.iter().enumerate() {
        match factors.get(i) {
            Some(f) if c.is_multiple_of(f) => {}
            Some(_) => return Ok(false),
            None if c.is_zero() => {}
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// True iff the rows of `subset` and the rows of `full` generate the same
/// lattice in ℤ^d.
pub fn sublattice_equals_lattice(subset: &IntegerMatrix, full: &IntegerMatrix) -> Result<bool> {
    if subset.cols() != full.cols() {
        return Err(Error::dim(full.cols(), subset.cols()));
    }
    for i in 0..full.rows() {
        if !lattice_contains(subset, full.row(i))? {
            return Ok(false);
        }
    }
    for i in 0..subset.rows() {
        if !lattice_contains(full, subset.row(i))? {
            return Ok(false);
        }
    }
    Ok(true)
}

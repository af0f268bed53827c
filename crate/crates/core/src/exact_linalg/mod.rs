//! Exact integer and rational linear algebra.
//!
//! Everything here is arbitrary precision; nothing touches floating point.
//! Gale duals, lattice comparisons and the LP feasibility tests used by the
//! polytope and quadric modules are all decided with these routines.

pub(crate) mod lp;
mod snf;

pub use lp::{LinearProgram, LpOutcome};
pub use snf::{lattice_contains, smith_normal_form, sublattice_equals_lattice, SmithForm};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Dense row-major matrix of exact rationals.
///
/// `num_rational` keeps every entry reduced with a positive denominator, so
/// equality of matrices is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

/// Which nullspace [`rational_nullspace`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullspaceSide {
    /// Rows `x` with `M xᵗ = 0`.
    Right,
    /// Rows `y` with `y M = 0`.
    Left,
}

macro_rules! matrix_common {
    ($ty:ident, $elem:ty) => {
        impl $ty {
            pub fn zeros(rows: usize, cols: usize) -> Self {
                Self {
                    rows,
                    cols,
                    data: vec![<$elem>::zero(); rows * cols],
                }
            }

            pub fn identity(n: usize) -> Self {
                let mut m = Self::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = <$elem>::one();
                }
                m
            }

            pub fn from_rows(rows: Vec<Vec<$elem>>) -> Result<Self> {
                let cols = rows.first().map_or(0, Vec::len);
                Self::from_rows_with_cols(rows, cols)
            }

            /// Like [`Self::from_rows`] but fixes the column count, so a
            /// zero-row matrix still knows its width.
            pub fn from_rows_with_cols(rows: Vec<Vec<$elem>>, cols: usize) -> Result<Self> {
                let n = rows.len();
                let mut data = Vec::with_capacity(n * cols);
                for row in rows {
                    if row.len() != cols {
                        return Err(Error::dim(cols, row.len()));
                    }
                    data.extend(row);
                }
                Ok(Self { rows: n, cols, data })
            }

            pub fn rows(&self) -> usize {
                self.rows
            }

            pub fn cols(&self) -> usize {
                self.cols
            }

            pub fn row(&self, i: usize) -> &[$elem] {
                &self.data[i * self.cols..(i + 1) * self.cols]
            }

            pub fn column(&self, j: usize) -> Vec<$elem> {
                (0..self.rows).map(|i| self[(i, j)].clone()).collect()
            }

            pub fn row_vecs(&self) -> Vec<Vec<$elem>> {
                (0..self.rows).map(|i| self.row(i).to_vec()).collect()
            }

            pub fn transpose(&self) -> Self {
                let mut t = Self::zeros(self.cols, self.rows);
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        t[(j, i)] = self[(i, j)].clone();
                    }
                }
                t
            }

            pub fn mul(&self, other: &Self) -> Result<Self> {
                if self.cols != other.rows {
                    return Err(Error::dim(self.cols, other.rows));
                }
                let mut out = Self::zeros(self.rows, other.cols);
                for i in 0..self.rows {
                    for k in 0..self.cols {
                        let a = &self[(i, k)];
                        if a.is_zero() {
                            continue;
                        }
                        for j in 0..other.cols {
                            let prod = a * &other[(k, j)];
                            out[(i, j)] += prod;
                        }
                    }
                }
                Ok(out)
            }

            pub fn mul_vec(&self, v: &[$elem]) -> Result<Vec<$elem>> {
                if self.cols != v.len() {
                    return Err(Error::dim(self.cols, v.len()));
                }
                Ok((0..self.rows)
                    .map(|i| {
                        self.row(i)
                            .iter()
                            .zip(v)
                            .fold(<$elem>::zero(), |acc, (a, b)| acc + a * b)
                    })
                    .collect())
            }

            /// Sub-matrix made of the listed columns, in the given order.
            pub fn select_columns(&self, cols: &[usize]) -> Self {
                let mut out = Self::zeros(self.rows, cols.len());
                for i in 0..self.rows {
                    for (jj, &j) in cols.iter().enumerate() {
                        out[(i, jj)] = self[(i, j)].clone();
                    }
                }
                out
            }

            pub fn select_rows(&self, rows: &[usize]) -> Self {
                let mut out = Self::zeros(rows.len(), self.cols);
                for (ii, &i) in rows.iter().enumerate() {
                    for j in 0..self.cols {
                        out[(ii, j)] = self[(i, j)].clone();
                    }
                }
                out
            }

            /// Rows of `self` followed by rows of `other`.
            pub fn stack(&self, other: &Self) -> Result<Self> {
                if self.cols != other.cols {
                    return Err(Error::dim(self.cols, other.cols));
                }
                let mut data = self.data.clone();
                data.extend(other.data.iter().cloned());
                Ok(Self {
                    rows: self.rows + other.rows,
                    cols: self.cols,
                    data,
                })
            }

            pub fn is_zero(&self) -> bool {
                self.data.iter().all(Zero::is_zero)
            }

            pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
                (0..self.rows)
                    .map(|i| self.row(i).iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
                    .collect()
            }
        }

        impl std::ops::Index<(usize, usize)> for $ty {
            type Output = $elem;
            fn index(&self, (i, j): (usize, usize)) -> &$elem {
                assert!(i < self.rows && j < self.cols, "index out of bounds");
                &self.data[i * self.cols + j]
            }
        }

        impl std::ops::IndexMut<(usize, usize)> for $ty {
            fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut $elem {
                assert!(i < self.rows && j < self.cols, "index out of bounds");
                &mut self.data[i * self.cols + j]
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}x{} [", self.rows, self.cols)?;
                for i in 0..self.rows {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
                    write!(f, "{}", row.join(" "))?;
                }
                write!(f, "]")
            }
        }
    };
}

matrix_common!(RationalMatrix, Rational);
matrix_common!(IntegerMatrix, BigInt);

impl IntegerMatrix {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().cloned().map(BigRational::from_integer).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.to_rational().rank()
    }

    /// Determinant of a square integer matrix (Bareiss fraction-free
    /// elimination).
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::dim(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * a[(n - 1, n - 1)].clone())
    }
}

impl RationalMatrix {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..a.cols {
                    a.data.swap(p * a.cols + j, r * a.cols + j);
                }
            }
            let inv = a[(r, c)].recip();
            for j in c..a.cols {
                let v = &a[(r, j)] * &inv;
                a[(r, j)] = v;
            }
            for i in 0..a.rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in c..a.cols {
                    let v = &f * &a[(r, j)];
                    a[(i, j)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn determinant(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::dim(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = rat(1);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
                return Ok(rat(0));
            };
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = &a[(i, c)] / &piv;
                for j in c..n {
                    let v = &f * &a[(c, j)];
                    a[(i, j)] -= v;
                }
            }
        }
        Ok(det)
    }

    /// Solves the square system `self · x = rhs`; `None` when singular.
    pub fn solve(&self, rhs: &[Rational]) -> Result<Option<Vec<Rational>>> {
        if self.rows != self.cols {
            return Err(Error::dim(self.rows, self.cols));
        }
        if rhs.len() != self.rows {
            return Err(Error::dim(self.rows, rhs.len()));
        }
        let n = self.rows;
        let mut aug = RationalMatrix::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n)] = rhs[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Ok(None);
        }
        Ok(Some((0..n).map(|i| r[(i, n)].clone()).collect()))
    }

    /// Exact inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Result<Option<RationalMatrix>> {
        if self.rows != self.cols {
            return Err(Error::dim(self.rows, self.cols));
        }
        let n = self.rows;
        let mut aug = RationalMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = rat(1);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[..n].iter().enumerate().any(|(i, &p)| p != i) {
            return Ok(None);
        }
        let mut inv = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Ok(Some(inv))
    }
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in ints.iter_mut() {
            *x = -&*x;
        }
    }
    ints
}

/// Exact basis of a nullspace of `m`, canonicalized.
///
/// Rows come from the free-variable basis of the reduced row echelon form,
/// each scaled to a primitive integer vector with positive leading entry, so
/// the result is reproducible bit for bit.
pub fn rational_nullspace(m: &RationalMatrix, side: NullspaceSide) -> IntegerMatrix {
    let m = match side {
        NullspaceSide::Right => m.clone(),
        NullspaceSide::Left => m.transpose(),
    };
    let n = m.cols();
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let rows: Vec<Vec<BigInt>> = free
        .iter()
        .map(|&f| {
            let mut x = vec![rat(0); n];
            x[f] = rat(1);
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r[(i, f)].clone();
            }
            primitive_integer_vector(&x)
        })
        .collect();
    IntegerMatrix::from_rows_with_cols(rows, n).expect("uniform row length")
}

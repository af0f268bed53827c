//! Polytopes given by facet inequalities `⟨a_i, x⟩ + b_i ≥ 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::lp::{nonnegative_solution, LinearProgram};
use crate::exact_linalg::{rat, IntegerMatrix, Rational, RationalMatrix};

/// The pair `(A, b)`: `m` primitive integer normals in `ℤ^n` and rational
/// offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopePresentation {
    normals: Vec<Vec<BigInt>>,
    offsets: Vec<Rational>,
    dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub point: Vec<Rational>,
    /// Every facet whose inequality is tight at `point`, ascending.
    pub active: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    pub vertices: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimplicityVerdict {
    Simple,
    NotSimple { vertex: Vertex },
}

impl SimplicityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SimplicityVerdict::Simple)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelzantVerdict {
    Delzant,
    NotDelzant { vertex: Vertex, determinant: BigInt },
}

impl DelzantVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, DelzantVerdict::Delzant)
    }
}

impl PolytopePresentation {
    /// Builds `P(A, b)`, rescaling each normal to a primitive vector (and its
    /// offset by the same factor). Fails when `m < n`, when the normals do
    /// not span `ℝ^n`, or when the region is empty.
    pub fn new(normals: Vec<Vec<BigInt>>, offsets: Vec<Rational>) -> Result<Self> {
        let m = normals.len();
        if offsets.len() != m {
            return Err(Error::dim(m, offsets.len()));
        }
        let dim = normals.first().map_or(0, Vec::len);
        if let Some(bad) = normals.iter().find(|a| a.len() != dim) {
            return Err(Error::dim(dim, bad.len()));
        }
        if m < dim {
            return Err(Error::InvalidPresentation(format!(
                "{m} facets cannot bound a polytope in dimension {dim}"
            )));
        }
        let mut prim = Vec::with_capacity(m);
        let mut offs = Vec::with_capacity(m);
        for (a, b) in normals.into_iter().zip(offsets) {
            let g = a.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if g.is_zero() {
                return Err(Error::InvalidPresentation("zero facet normal".into()));
            }
            offs.push(b / BigRational::from_integer(g.clone()));
            prim.push(a.into_iter().map(|x| x / &g).collect());
        }
        let p = Self {
            normals: prim,
            offsets: offs,
            dim,
        };
        if p.normal_matrix().rank() != dim {
            return Err(Error::InvalidPresentation(
                "facet normals do not span the ambient space".into(),
            ));
        }
        if !p.is_feasible() {
            return Err(Error::Empty);
        }
        Ok(p)
    }

    pub fn from_i64(normals: &[&[i64]], offsets: &[Rational]) -> Result<Self> {
        Self::new(
            normals
                .iter()
                .map(|a| a.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            offsets.to_vec(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[Vec<BigInt>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[Rational] {
        &self.offsets
    }

    /// The `n × m` matrix `A` whose columns are the normals.
    pub fn a_matrix(&self) -> IntegerMatrix {
        IntegerMatrix::from_rows_with_cols(self.normals.clone(), self.dim)
            .expect("uniform normals")
            .transpose()
    }

    /// `m × n`, rows are the normals (that is, `Aᵗ`).
    fn normal_matrix(&self) -> RationalMatrix {
        IntegerMatrix::from_rows_with_cols(self.normals.clone(), self.dim)
            .expect("uniform normals")
            .to_rational()
    }

    fn slack(&self, i: usize, x: &[Rational]) -> Rational {
        self.normals[i]
            .iter()
            .zip(x)
            .fold(self.offsets[i].clone(), |acc, (a, xi)| {
                acc + BigRational::from_integer(a.clone()) * xi
            })
    }

    fn is_feasible(&self) -> bool {
        // a_i·(x⁺ − x⁻) − s_i = −b_i, all variables ≥ 0
        let (m, n) = (self.num_facets(), self.dim);
        let rows: Vec<Vec<Rational>> = (0..m)
            .map(|i| {
                let mut r = vec![rat(0); 2 * n + m];
                for j in 0..n {
                    let a = BigRational::from_integer(self.normals[i][j].clone());
                    r[j] = a.clone();
                    r[n + j] = -a;
                }
                r[2 * n + i] = rat(-1);
                r
            })
            .collect();
        let rhs: Vec<Rational> = self.offsets.iter().map(|b| -b.clone()).collect();
        nonnegative_solution(&rows, &rhs).is_some()
    }

    /// Bounded iff the recession cone `{x : Aᵗx ≥ 0}` is `{0}`, which (the
    /// normals spanning) holds iff some `y > 0` has `Σ y_i a_i = 0`.
    pub fn is_bounded(&self) -> bool {
        let (m, n) = (self.num_facets(), self.dim);
        if n == 0 {
            return true;
        }
        // y = 1 + y', y' ≥ 0 :  A y' = −A·1
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|j| {
                (0..m)
                    .map(|i| BigRational::from_integer(self.normals[i][j].clone()))
                    .collect()
            })
            .collect();
        let rhs: Vec<Rational> = rows.iter().map(|r| -r.iter().cloned().sum::<Rational>()).collect();
        LinearProgram::feasibility(rows, rhs).solve().solution().is_some()
    }

    /// `i_{A,b}(x) = Aᵗx + b`.
    pub fn embed_point(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.dim {
            return Err(Error::dim(self.dim, x.len()));
        }
        Ok((0..self.num_facets()).map(|i| self.slack(i, x)).collect())
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim && (0..self.num_facets()).all(|i| !self.slack(i, x).is_negative())
    }

    /// All vertices, by solving every `n`-subset of facet equalities.
    pub fn enumerate_vertices(&self) -> Result<VertexSet> {
        if !self.is_bounded() {
            return Err(Error::Unbounded);
        }
        let (m, n) = (self.num_facets(), self.dim);
        let nm = self.normal_matrix();
        let mut vertices: Vec<Vertex> = Vec::new();
        for subset in combinations(m, n) {
            let sub = nm.select_rows(&subset);
            let rhs: Vec<Rational> = subset.iter().map(|&i| -self.offsets[i].clone()).collect();
            let Some(x) = sub.solve(&rhs)? else {
                continue;
            };
            if !self.contains(&x) || vertices.iter().any(|v| v.point == x) {
                continue;
            }
            let active = (0..m).filter(|&i| self.slack(i, &x).is_zero()).collect();
            vertices.push(Vertex { point: x, active });
        }
        if vertices.is_empty() {
            return Err(Error::Empty);
        }
        vertices.sort_by(|a, b| a.point.cmp(&b.point));
        Ok(VertexSet { vertices })
    }

    pub fn is_simple(&self) -> Result<SimplicityVerdict> {
        let vs = self.enumerate_vertices()?;
        Ok(match vs.vertices.into_iter().find(|v| v.active.len() != self.dim) {
            Some(vertex) => SimplicityVerdict::NotSimple { vertex },
            None => SimplicityVerdict::Simple,
        })
    }

    /// Delzant: simple, and at each vertex the active normals have
    /// determinant `±1`.
    pub fn is_delzant(&self) -> Result<DelzantVerdict> {
        let vs = self.enumerate_vertices()?;
        if let Some(v) = vs.vertices.iter().find(|v| v.active.len() != self.dim) {
            return Err(Error::NotSimple {
                vertex: v.point.iter().map(ToString::to_string).collect(),
                active: v.active.len(),
            });
        }
        for v in vs.vertices {
            let rows: Vec<Vec<BigInt>> = v.active.iter().map(|&i| self.normals[i].clone()).collect();
            let det = IntegerMatrix::from_rows_with_cols(rows, self.dim)?.determinant()?;
            if !det.abs().is_one() {
                return Ok(DelzantVerdict::NotDelzant {
                    vertex: v,
                    determinant: det,
                });
            }
        }
        Ok(DelzantVerdict::Delzant)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

//! Intersections of Hermitian (or real) quadrics `Σ_k γ_jk |z_k|² = c_j`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::lp::{nonnegative_solution, positive_functional};
use crate::exact_linalg::{
    rat, rat_to_f64, rational_nullspace, smith_normal_form, IntegerMatrix, NullspaceSide,
    Rational,
};
use crate::polytope::{combinations, PolytopePresentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadricMode {
    /// `R_Γ ⊂ ℝ^m`
    Real,
    /// `Z_Γ ⊂ ℂ^m`
    Complex,
}

/// `(Γ, c, mode)`. Rows of `gamma` are the quadrics; its columns are the
/// Gale vectors `γ_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricConfiguration {
    gamma: IntegerMatrix,
    c: Vec<Rational>,
    mode: QuadricMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NondegeneracyReport {
    /// `c` lies in the cone spanned by all `γ_k`.
    pub cond_a: bool,
    /// `c` is not in the cone of fewer than `m − n` of the `γ_k`.
    pub cond_b: bool,
    /// The `γ_k` generate a lattice of full rank.
    pub cond_c: bool,
    /// Coefficients `λ ≥ 0` with `Σ λ_k γ_k = c` when (a) holds.
    pub cone_coefficients: Option<Vec<Rational>>,
    /// A column subset of size `< m − n` whose cone contains `c`.
    pub small_support: Option<Vec<usize>>,
    pub lattice_rank: usize,
}

impl NondegeneracyReport {
    pub fn all(&self) -> bool {
        self.cond_a && self.cond_b && self.cond_c
    }
}

/// Result of the canonical two-quadric search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoQuadricForm {
    pub p: usize,
    pub q: usize,
    /// Integer `2 × 2` row transform `M` (invertible over ℚ).
    pub transform: [[i64; 2]; 2],
    /// Column order putting the `p` positive entries of row 2 first.
    pub column_order: Vec<usize>,
    /// `M·Γ` with columns permuted by `column_order`.
    pub gamma: IntegerMatrix,
    /// `M·c`; second entry is zero.
    pub c: Vec<Rational>,
}

impl TwoQuadricForm {
    /// Row 1 positive with positive right-hand side (an ellipsoid), row 2
    /// `p` positives then `q` negatives with zero right-hand side (a cone
    /// over a product of two ellipsoids).
    pub fn splits_as_sphere_and_cone(&self) -> bool {
        let r1 = self.gamma.row(0);
        let r2 = self.gamma.row(1);
        r1.iter().all(Signed::is_positive)
            && self.c[0].is_positive()
            && self.c[1].is_zero()
            && r2[..self.p].iter().all(Signed::is_positive)
            && r2[self.p..].iter().all(Signed::is_negative)
    }

    /// When both rows are proportional on each block, rational combinations
    /// of the two equations separate into one equation per block; returns
    /// `(α, ρ_α, β, ρ_β)` with `Σ_{k≤p} α_k u_k² = ρ_α` and
    /// `Σ_{k>p} β_k u_k² = ρ_β`.
    pub fn separate_blocks(&self) -> Option<(Vec<Rational>, Rational, Vec<Rational>, Rational)> {
        let r1: Vec<Rational> = self.gamma.row(0).iter().cloned().map(BigRational::from_integer).collect();
        let r2: Vec<Rational> = self.gamma.row(1).iter().cloned().map(BigRational::from_integer).collect();
        let p = self.p;
        // r1 = s·r2 on each block?
        let s_pos = &r1[0] / &r2[0];
        let s_neg = &r1[p] / &r2[p];
        if (0..p).any(|k| r1[k] != &s_pos * &r2[k]) || (p..r1.len()).any(|k| r1[k] != &s_neg * &r2[k]) {
            return None;
        }
        if s_pos == s_neg {
            return None;
        }
        // (r1 − s_neg r2) vanishes on the negative block, (r1 − s_pos r2) on the positive one
        let alpha: Vec<Rational> = (0..p).map(|k| &r1[k] - &s_neg * &r2[k]).collect();
        let beta: Vec<Rational> = (p..r1.len()).map(|k| &r1[k] - &s_pos * &r2[k]).collect();
        let rho_a = &self.c[0] - &s_neg * &self.c[1];
        let rho_b = &self.c[0] - &s_pos * &self.c[1];
        Some((alpha, rho_a, beta, rho_b))
    }
}

pub const DEFAULT_CANONICAL_BOUND: i64 = 8;

impl QuadricConfiguration {
    pub fn new(gamma: IntegerMatrix, c: Vec<Rational>, mode: QuadricMode) -> Result<Self> {
        if c.len() != gamma.rows() {
            return Err(Error::dim(gamma.rows(), c.len()));
        }
        if gamma.rank() != gamma.rows() {
            return Err(Error::Precondition(format!(
                "quadric matrix has rank {} < {} rows",
                gamma.rank(),
                gamma.rows()
            )));
        }
        Ok(Self { gamma, c, mode })
    }

    pub fn from_i64(gamma: &[&[i64]], c: &[Rational], mode: QuadricMode) -> Result<Self> {
        Self::new(IntegerMatrix::from_i64_rows(gamma)?, c.to_vec(), mode)
    }

    /// Scales each rational row (and its right-hand side) by the lcm of the
    /// row's denominators.
    pub fn from_rational_rows(rows: &[Vec<Rational>], c: &[Rational], mode: QuadricMode) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        let mut int_rows = Vec::with_capacity(rows.len());
        let mut cs = Vec::with_capacity(rows.len());
        for (row, cj) in rows.iter().zip(c) {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let lr = BigRational::from_integer(l);
            int_rows.push(row.iter().map(|x| (x * &lr).to_integer()).collect());
            cs.push(cj * &lr);
        }
        if c.len() != rows.len() {
            return Err(Error::dim(rows.len(), c.len()));
        }
        Self::new(IntegerMatrix::from_rows_with_cols(int_rows, m)?, cs, mode)
    }

    /// Gale dual of a polytope: `Γ` spans `{y : y Aᵗ = 0}` (canonical
    /// basis) and `c = Γ b`.
    pub fn gale_dual(p: &PolytopePresentation) -> Self {
        let a = p.a_matrix().to_rational();
        let gamma = rational_nullspace(&a, NullspaceSide::Right);
        let c = gamma
            .to_rational()
            .mul_vec(p.offsets())
            .expect("gamma has m columns");
        Self {
            gamma,
            c,
            mode: QuadricMode::Complex,
        }
    }

    pub fn with_mode(&self, mode: QuadricMode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn gamma(&self) -> &IntegerMatrix {
        &self.gamma
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn mode(&self) -> QuadricMode {
        self.mode
    }

    /// Number of quadrics, `m − n`.
    pub fn num_quadrics(&self) -> usize {
        self.gamma.rows()
    }

    /// Ambient dimension `m`.
    pub fn ambient_dim(&self) -> usize {
        self.gamma.cols()
    }

    pub fn gamma_f64(&self) -> Vec<Vec<f64>> {
        self.gamma.to_f64_rows()
    }

    pub fn c_f64(&self) -> Vec<f64> {
        self.c.iter().map(rat_to_f64).collect()
    }

    /// The Gale vectors `γ_k` as rows of an `m × (m−n)` matrix.
    pub fn gale_vectors(&self) -> IntegerMatrix {
        self.gamma.transpose()
    }

    /// Rows `Γ` stacked over `other`'s rows, right-hand sides concatenated.
    pub fn stacked_with(&self, other: &QuadricConfiguration) -> Result<Self> {
        let gamma = self.gamma.stack(&other.gamma)?;
        let mut c = self.c.clone();
        c.extend(other.c.iter().cloned());
        Self::new(gamma, c, self.mode)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.ambient_dim() {
            return Err(Error::dim(self.ambient_dim(), got));
        }
        Ok(())
    }

    fn residual_of_squares(&self, sq: &[f64]) -> f64 {
        let g = self.gamma_f64();
        g.iter()
            .zip(self.c_f64())
            .map(|(row, cj)| (row.iter().zip(sq).map(|(a, s)| a * s).sum::<f64>() - cj).abs())
            .fold(0.0, f64::max)
    }

    /// `max_j |Σ_k γ_jk |z_k|² − c_j|`. In real mode the point must be real.
    pub fn membership_residual(&self, z: &[Complex64]) -> Result<f64> {
        self.check_len(z.len())?;
        if self.mode == QuadricMode::Real && z.iter().any(|w| w.im != 0.0) {
            return Err(Error::Precondition("real-mode configuration given a non-real point".into()));
        }
        let sq: Vec<f64> = z.iter().map(|w| w.norm_sqr()).collect();
        Ok(self.residual_of_squares(&sq))
    }

    pub fn membership_residual_real(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u.len())?;
        let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
        Ok(self.residual_of_squares(&sq))
    }

    /// `μ_Γ(z) = Γ·(|z_1|², …, |z_m|²)`.
    pub fn moment_map(&self, z: &[Complex64]) -> Result<Vec<f64>> {
        self.check_len(z.len())?;
        if self.mode != QuadricMode::Complex {
            return Err(Error::Precondition("moment map needs a complex-mode configuration".into()));
        }
        Ok(self
            .gamma_f64()
            .iter()
            .map(|row| row.iter().zip(z).map(|(g, w)| g * w.norm_sqr()).sum())
            .collect())
    }

    fn gale_vectors_rational(&self) -> Vec<Vec<Rational>> {
        (0..self.ambient_dim())
            .map(|k| {
                self.gamma
                    .column(k)
                    .into_iter()
                    .map(BigRational::from_integer)
                    .collect()
            })
            .collect()
    }

    /// Some `h` with `⟨h, γ_k⟩ > 0` for all `k`, when one exists. Then
    /// `Σ⟨h,γ_k⟩|z_k|² = ⟨h,c⟩` bounds every coordinate.
    pub fn bounding_functional(&self) -> Option<Vec<Rational>> {
        positive_functional(&self.gale_vectors_rational(), self.num_quadrics())
    }

    pub fn boundedness_check(&self) -> bool {
        self.bounding_functional().is_some()
    }

    /// Upper bounds `|z_k|² ≤ ⟨h,c⟩ / ⟨h,γ_k⟩` from a bounding functional.
    pub fn coordinate_bounds(&self) -> Option<Vec<f64>> {
        let h = self.bounding_functional()?;
        let hc: Rational = h.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        Some(
            self.gale_vectors_rational()
                .iter()
                .map(|g| {
                    let hg: Rational = h.iter().zip(g).map(|(a, b)| a * b).sum();
                    rat_to_f64(&(&hc / &hg))
                })
                .collect(),
        )
    }

    /// Columns `S` with `c` in the nonnegative span of `{γ_k : k ∈ S}`.
    fn cone_contains_c(&self, subset: &[usize]) -> Option<Vec<Rational>> {
        let k = self.num_quadrics();
        if subset.is_empty() {
            return self.c.iter().all(Zero::is_zero).then(Vec::new);
        }
        let rows: Vec<Vec<Rational>> = (0..k)
            .map(|j| {
                subset
                    .iter()
                    .map(|&col| BigRational::from_integer(self.gamma[(j, col)].clone()))
                    .collect()
            })
            .collect();
        if k == 0 {
            return Some(vec![rat(0); subset.len()]);
        }
        nonnegative_solution(&rows, &self.c)
    }

    pub fn nondegeneracy_check(&self) -> NondegeneracyReport {
        let m = self.ambient_dim();
        let k = self.num_quadrics();
        let all: Vec<usize> = (0..m).collect();
        let cone_coefficients = self.cone_contains_c(&all);
        let small_support = (0..k)
            .flat_map(|size| combinations(m, size))
            .find(|s| self.cone_contains_c(s).is_some());
        let lattice_rank = smith_normal_form(&self.gale_vectors()).rank();
        NondegeneracyReport {
            cond_a: cone_coefficients.is_some(),
            cond_b: small_support.is_none(),
            cond_c: lattice_rank == k,
            cone_coefficients,
            small_support,
            lattice_rank,
        }
    }

    /// Searches integer row transforms with entries in `[-bound, bound]` for
    /// the canonical two-quadric sign pattern.
    pub fn two_quadrics_canonical(&self, bound: i64) -> Result<TwoQuadricForm> {
        if self.num_quadrics() != 2 {
            return Err(Error::Precondition(format!(
                "canonical form needs exactly two quadrics, got {}",
                self.num_quadrics()
            )));
        }
        let m = self.ambient_dim();
        let g: Vec<Vec<i64>> = (0..2)
            .map(|j| {
                self.gamma
                    .row(j)
                    .iter()
                    .map(|x| x.to_i64().ok_or_else(|| Error::Precondition("entry too large".into())))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;

        let mut candidates: Vec<[i64; 4]> = Vec::new();
        for a in -bound..=bound {
            for b in -bound..=bound {
                for c in -bound..=bound {
                    for d in -bound..=bound {
                        if a * d - b * c != 0 {
                            candidates.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        // smallest entries first; at equal magnitude prefer positive entries
        let key = |m: &[i64; 4]| {
            let l1: i64 = m.iter().map(|x| x.abs()).sum();
            let shape: Vec<(i64, bool)> = m.iter().map(|&x| (x.abs(), x < 0)).collect();
            (l1, shape)
        };
        candidates.sort_by_key(key);

        for [a, b, cc, d] in candidates {
            let r1: Vec<i64> = (0..m).map(|k| a * g[0][k] + b * g[1][k]).collect();
            let r2: Vec<i64> = (0..m).map(|k| cc * g[0][k] + d * g[1][k]).collect();
            let c1 = &self.c[0] * rat(a) + &self.c[1] * rat(b);
            let c2 = &self.c[0] * rat(cc) + &self.c[1] * rat(d);
            if !c1.is_positive() || !c2.is_zero() {
                continue;
            }
            if r1.iter().any(|&x| x <= 0) || r2.iter().any(|&x| x == 0) {
                continue;
            }
            let pos: Vec<usize> = (0..m).filter(|&k| r2[k] > 0).collect();
            let neg: Vec<usize> = (0..m).filter(|&k| r2[k] < 0).collect();
            if pos.is_empty() || neg.is_empty() {
                continue;
            }
            let order: Vec<usize> = pos.iter().chain(&neg).copied().collect();
            let gamma = IntegerMatrix::from_rows(vec![
                order.iter().map(|&k| BigInt::from(r1[k])).collect(),
                order.iter().map(|&k| BigInt::from(r2[k])).collect(),
            ])?;
            return Ok(TwoQuadricForm {
                p: pos.len(),
                q: neg.len(),
                transform: [[a, b], [cc, d]],
                column_order: order,
                gamma,
                c: vec![c1, c2],
            });
        }
        Err(Error::NoCanonicalForm { bound })
    }
}

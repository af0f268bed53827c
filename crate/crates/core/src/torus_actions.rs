//! The torus `T_Γ = ℝ^{m−n}/L*` acting on `ℂ^m` by
//! `φ ↦ (e^{2πi⟨γ_1,φ⟩}, …, e^{2πi⟨γ_m,φ⟩})`, its 2-torsion `D_Γ`, and
//! freeness of the action on `Z_Γ`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::exact_linalg::lp::strictly_positive_solution;
use crate::exact_linalg::{
    rat_to_f64, smith_normal_form, sublattice_equals_lattice, IntegerMatrix, RationalMatrix,
    Rational,
};
use crate::polytope::combinations;
use crate::quadric_config::{QuadricConfiguration, QuadricMode};

/// `L = ℤ⟨γ_1,…,γ_m⟩` together with a basis of `L*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusSubgroup {
    /// Rows form a basis of `L`.
    lattice_basis: IntegerMatrix,
    /// Rows `b*_j` with `⟨b*_j, b_i⟩ = δ_ij`.
    dual_basis: RationalMatrix,
    gale: IntegerMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreenessVerdict {
    pub free: bool,
    /// First realizable support (by size, then lexicographic) whose Gale
    /// vectors generate a proper sublattice of `L`.
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitData {
    pub base: Vec<Complex64>,
    pub generators: Vec<Vec<Complex64>>,
    pub gram: Vec<Vec<f64>>,
}

impl TorusSubgroup {
    pub fn new(q: &QuadricConfiguration) -> Result<Self> {
        let gale = q.gale_vectors();
        let k = q.num_quadrics();
        let snf = smith_normal_form(&gale);
        if snf.rank() != k {
            return Err(Error::RankDeficient {
                rank: snf.rank(),
                expected: k,
            });
        }
        // G = U⁻¹ D V⁻¹, so the rows d_i·(V⁻¹)_i span the same lattice
        let vinv = snf
            .v
            .to_rational()
            .inverse()?
            .expect("unimodular matrices are invertible");
        let factors = snf.invariant_factors();
        let rows: Vec<Vec<BigInt>> = (0..k)
            .map(|i| {
                vinv.row(i)
                    .iter()
                    .map(|x| (x * BigRational::from_integer(factors[i].clone())).to_integer())
                    .collect()
            })
            .collect();
        let lattice_basis = IntegerMatrix::from_rows_with_cols(rows, k)?;
        let dual_basis = lattice_basis
            .to_rational()
            .inverse()?
            .expect("basis of a full-rank lattice")
            .transpose();
        Ok(Self {
            lattice_basis,
            dual_basis,
            gale,
        })
    }

    pub fn dim(&self) -> usize {
        self.lattice_basis.rows()
    }

    pub fn lattice_basis(&self) -> &IntegerMatrix {
        &self.lattice_basis
    }

    pub fn dual_basis(&self) -> &RationalMatrix {
        &self.dual_basis
    }

    /// Volume of a fundamental domain of `L*`, i.e. `1/|det B|`.
    pub fn dual_covolume(&self) -> Rational {
        self.dual_basis
            .determinant()
            .expect("square")
            .abs()
    }

    pub fn dual_basis_f64(&self) -> Vec<Vec<f64>> {
        self.dual_basis
            .row_vecs()
            .iter()
            .map(|r| r.iter().map(rat_to_f64).collect())
            .collect()
    }

    /// `½L*/L*` as phase vectors `φ = ½ Σ ε_j b*_j`, `ε ∈ {0,1}^{m−n}`.
    pub fn d_gamma_phases(&self) -> Vec<Vec<Rational>> {
        let k = self.dim();
        let half = BigRational::new(1.into(), 2.into());
        (0..1usize << k)
            .map(|mask| {
                (0..k)
                    .map(|i| {
                        (0..k)
                            .filter(|j| mask >> j & 1 == 1)
                            .map(|j| &self.dual_basis[(j, i)] * &half)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Each element of `D_Γ` as the sign vector `(e^{2πi⟨γ_k,φ⟩})_k`.
    ///
    /// `⟨γ_k, b*_j⟩` is an integer because `γ_k ∈ L`, so every entry is ±1.
    pub fn d_gamma_signs(&self) -> Vec<Vec<i8>> {
        self.d_gamma_phases()
            .iter()
            .map(|phi| {
                (0..self.gale.rows())
                    .map(|k| {
                        let twice: Rational = self
                            .gale
                            .row(k)
                            .iter()
                            .zip(phi)
                            .map(|(g, p)| BigRational::from_integer(g.clone()) * p)
                            .sum::<Rational>()
                            * BigRational::from_integer(2.into());
                        assert!(twice.is_integer(), "D_Γ element off the lattice");
                        if twice.to_integer().to_i64().expect("small") % 2 == 0 {
                            1
                        } else {
                            -1
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Orbit volume `sqrt(det Gram)·covol(L*)`.
    pub fn orbit_volume(&self, q: &QuadricConfiguration, z: &[Complex64]) -> Result<f64> {
        let data = orbit_data(q, z)?;
        let det = det_spd(&data.gram);
        let scale: f64 = data.gram.iter().enumerate().map(|(i, r)| r[i]).product();
        if !(det > 1e-12 * scale.max(f64::MIN_POSITIVE)) || scale == 0.0 {
            return Err(Error::SingularGram { det });
        }
        Ok(det.sqrt() * rat_to_f64(&self.dual_covolume()))
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det_spd(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 1.0;
    }
    nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j]).determinant()
}

fn check_complex(q: &QuadricConfiguration, z: &[Complex64]) -> Result<()> {
    if q.mode() != QuadricMode::Complex {
        return Err(Error::Precondition("torus action needs a complex-mode configuration".into()));
    }
    if z.len() != q.ambient_dim() {
        return Err(Error::dim(q.ambient_dim(), z.len()));
    }
    Ok(())
}

/// Generator `j` at `z`: `2π·(iγ_{j1}z_1, …, iγ_{jm}z_m)`.
pub fn orbit_generators(q: &QuadricConfiguration, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
    check_complex(q, z)?;
    Ok(q.gamma_f64()
        .iter()
        .map(|row| {
            row.iter()
                .zip(z)
                .map(|(g, w)| Complex64::new(0.0, 2.0 * PI * g) * w)
                .collect()
        })
        .collect())
}

pub fn orbit_data(q: &QuadricConfiguration, z: &[Complex64]) -> Result<OrbitData> {
    let generators = orbit_generators(q, z)?;
    let gram = generators
        .iter()
        .map(|x| {
            generators
                .iter()
                .map(|y| x.iter().zip(y).map(|(a, b)| (a.conj() * b).re).sum())
                .collect()
        })
        .collect();
    Ok(OrbitData {
        base: z.to_vec(),
        generators,
        gram,
    })
}

pub fn orbit_volume(q: &QuadricConfiguration, z: &[Complex64]) -> Result<f64> {
    TorusSubgroup::new(q)?.orbit_volume(q, z)
}

/// `φ · z = (e^{2πi⟨γ_k,φ⟩} z_k)_k`.
pub fn torus_act(q: &QuadricConfiguration, phi: &[f64], z: &[Complex64]) -> Result<Vec<Complex64>> {
    check_complex(q, z)?;
    if phi.len() != q.num_quadrics() {
        return Err(Error::dim(q.num_quadrics(), phi.len()));
    }
    let g = q.gamma_f64();
    Ok(z.iter()
        .enumerate()
        .map(|(k, w)| {
            let angle: f64 = (0..phi.len()).map(|j| g[j][k] * phi[j]).sum();
            Complex64::from_polar(1.0, 2.0 * PI * angle) * w
        })
        .collect())
}

pub fn conjugate(z: &[Complex64]) -> Vec<Complex64> {
    z.iter().map(Complex64::conj).collect()
}

/// The action of `T_Γ` on `Z_Γ` is free iff every realizable support `S`
/// (some point of `Z_Γ` has `z_k ≠ 0` exactly for `k ∈ S`) has
/// `ℤ⟨γ_k : k ∈ S⟩ = L`.
pub fn freeness_check(q: &QuadricConfiguration) -> Result<FreenessVerdict> {
    let gale = q.gale_vectors();
    let k = q.num_quadrics();
    let rank = smith_normal_form(&gale).rank();
    if rank != k {
        return Err(Error::Precondition(format!(
            "Gale vectors generate a lattice of rank {rank} < {k}"
        )));
    }
    let m = q.ambient_dim();
    for size in 1..=m {
        for s in combinations(m, size) {
            if sublattice_equals_lattice(&gale.select_rows(&s), &gale)? {
                continue;
            }
            let rows: Vec<Vec<Rational>> = (0..k)
                .map(|j| {
                    s.iter()
                        .map(|&col| BigRational::from_integer(q.gamma()[(j, col)].clone()))
                        .collect()
                })
                .collect();
            if strictly_positive_solution(&rows, q.c(), s.len()).is_some() {
                return Ok(FreenessVerdict {
                    free: false,
                    witness: Some(s),
                });
            }
        }
    }
    Ok(FreenessVerdict {
        free: true,
        witness: None,
    })
}

//! Floating-point differential geometry of `R_Γ`, `Z_Γ` and
//! `N = R_Γ ×_{D_Γ} T_Γ`.
//!
//! Points of `ℂ^m` are handled as real vectors `(x_1, y_1, …, x_m, y_m)`
//! in the chart code; the flat metric is the dot product there.

mod charts;
mod geometry;
mod hamiltonian;
mod project;
mod quadrature;
mod sampling;
mod variation;

pub use charts::{
    ChartPoint, CircleChart, EllipseChart, GraphChart, NChart, ProductTorusChart,
    SphereAngularChart, SubmanifoldChart,
};
pub use geometry::{
    frame_constraint_residual, hminimality_residual, lagrangian_residual, mean_curvature_ambient,
    metric_tensor, minimality_residual_in_z, normal_projection, orthonormal_complement, orthonormalize, tangent_frame,
    z_tangent_frame, TangentFrame,
};
pub use hamiltonian::{hamiltonian_field, hamiltonian_field_real, noether_drift, Hamiltonian, RealPolynomial};
pub use project::{newton_project, project_to_quadrics};
pub use quadrature::{bump, bump_derivative, gauss_legendre, Axis, Node, Patch};
pub use sampling::{interior_weights, sample_chart_point, sample_real_point, Sampler};
pub use variation::{
    coarea_orbit_volume_check, first_variation_companion, hamiltonian_stationarity,
    hamiltonian_variation_field, normal_variation_field, patch_volume_derivative, position_variation_field, AmbientGeometry,
    FlatSpace, StationarityReport, VariationResult,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// `ω(u, v) = κ·Im Σ ū_k v_k`. With `κ = −2` this is `−i Σ dz_k ∧ dz̄_k`,
/// for which the unit-speed rotation `z ↦ e^{iθ}z` has Hamiltonian `|z|²`.
pub const OMEGA_SCALE: f64 = -2.0;

pub fn omega(u: &[Complex64], v: &[Complex64]) -> f64 {
    OMEGA_SCALE * u.iter().zip(v).map(|(a, b)| (a.conj() * b).im).sum::<f64>()
}

/// Real part of the Hermitian product: the flat Riemannian metric.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a.conj() * b).re).sum()
}

pub fn norm(u: &[Complex64]) -> f64 {
    inner(u, u).sqrt()
}

/// Matrix of `ω` in interleaved real coordinates of `ℂ^m`.
pub fn omega_matrix(m: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        o[(2 * k, 2 * k + 1)] = OMEGA_SCALE;
        o[(2 * k + 1, 2 * k)] = -OMEGA_SCALE;
    }
    o
}

pub fn to_real(z: &[Complex64]) -> DVector<f64> {
    DVector::from_iterator(2 * z.len(), z.iter().flat_map(|w| [w.re, w.im]))
}

pub fn to_complex(w: &DVector<f64>) -> Vec<Complex64> {
    w.as_slice()
        .chunks(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect()
}

/// Entries uniform in the unit square.
pub fn random_tangent_z<R: Rng>(rng: &mut R, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub membership: f64,
    pub frame: f64,
    pub lagrangian: f64,
    pub curvature: f64,
    pub variation: f64,
    pub noether: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            membership: 1e-10,
            frame: 1e-10,
            lagrangian: 1e-8,
            curvature: 1e-4,
            variation: 1e-3,
            noether: 1e-8,
        }
    }
}

/// Conventions and tolerances shared by the numeric checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSpec {
    pub omega_scale: f64,
    /// `n` in the conformal factor `Vo^{2/n}`.
    pub base_dim: usize,
    pub tol: Tolerances,
    /// Finite-difference step.
    pub step: f64,
}

impl MetricSpec {
    pub fn new(base_dim: usize) -> Self {
        Self {
            omega_scale: OMEGA_SCALE,
            base_dim,
            tol: Tolerances::default(),
            step: 1e-4,
        }
    }

    /// `Vo^{2/n}`, the factor of the metric `g̃ = Vo^{2/n} g` on the base.
    pub fn conformal_factor(&self, vo: f64) -> f64 {
        vo.powf(2.0 / self.base_dim as f64)
    }
}

use nalgebra::{DMatrix, DVector};

use super::charts::{NChart, SubmanifoldChart};
use super::geometry::{mean_curvature_ambient, metric_tensor};
use super::hamiltonian::{hamiltonian_field_real, Hamiltonian};
use super::quadrature::{Axis, Patch};
use super::omega_matrix;
use crate::error::{Error, Result};
use crate::quadric_config::QuadricConfiguration;
use crate::torus_actions::TorusSubgroup;

const FIELD_STEP: f64 = 1e-5;

/// Riemannian metric and symplectic form on (an open set of) `ℝ^D`.
pub trait AmbientGeometry {
    fn dim(&self) -> usize;
    fn metric(&self, w: &DVector<f64>) -> Result<DMatrix<f64>>;
    fn omega(&self, w: &DVector<f64>) -> Result<DMatrix<f64>>;
}

/// Flat `ℂ^m` in interleaved real coordinates.
#[derive(Debug, Clone, Copy)]
pub struct FlatSpace {
    pub m: usize,
}

impl AmbientGeometry for FlatSpace {
    fn dim(&self) -> usize {
        2 * self.m
    }

    fn metric(&self, _w: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(DMatrix::identity(2 * self.m, 2 * self.m))
    }

    fn omega(&self, _w: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(omega_matrix(self.m))
    }
}

/// A variation field along the chart, `x ↦ X(w(x))`.
pub type Field<'a> = dyn Fn(&[f64]) -> Result<DVector<f64>> + 'a;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationResult {
    /// `d/dt Vol(w + tX)` at `t = 0`.
    pub dvol_dt: f64,
    /// `∫ |div X| dvol`, the same integrand without cancellation.
    pub divergence_l1: f64,
    pub volume: f64,
}

fn volume_density(geom: &dyn AmbientGeometry, w: &DVector<f64>, j: &DMatrix<f64>) -> Result<f64> {
    let g = j.transpose() * geom.metric(w)? * j;
    let det = g.determinant();
    if !(det >= 0.0) {
        return Err(Error::SingularGram { det });
    }
    Ok(det.sqrt())
}

/// First variation of the patch volume under the free deformation
/// `w ↦ w + tX` (no re-projection), by a central difference in `t`.
pub fn patch_volume_derivative(
    chart: &dyn SubmanifoldChart,
    geom: &dyn AmbientGeometry,
    patch: &Patch,
    field: &Field,
    tau: f64,
) -> Result<VariationResult> {
    if chart.dim() != patch.dim() {
        return Err(Error::dim(chart.dim(), patch.dim()));
    }
    let mut out = VariationResult {
        dvol_dt: 0.0,
        divergence_l1: 0.0,
        volume: 0.0,
    };
    for node in patch.nodes() {
        if node.weight == 0.0 {
            continue;
        }
        let x = &node.x;
        let w = chart.point(x)?;
        let j = chart.jacobian(x)?;
        let xf = field(x)?;
        let mut jx = DMatrix::zeros(w.len(), x.len());
        let mut y = x.clone();
        for a in 0..x.len() {
            y[a] = x[a] + FIELD_STEP;
            let p = field(&y)?;
            y[a] = x[a] - FIELD_STEP;
            let m = field(&y)?;
            y[a] = x[a];
            jx.set_column(a, &((p - m) / (2.0 * FIELD_STEP)));
        }
        let vp = volume_density(geom, &(&w + &xf * tau), &(&j + &jx * tau))?;
        let vm = volume_density(geom, &(&w - &xf * tau), &(&j - &jx * tau))?;
        let density = (vp - vm) / (2.0 * tau);
        out.dvol_dt += node.weight * density;
        out.divergence_l1 += node.weight * density.abs();
        out.volume += node.weight * volume_density(geom, &w, &j)?;
    }
    Ok(out)
}

/// `−∫ ⟨H, X⟩ dvol` over the patch in flat space.
pub fn first_variation_companion(
    chart: &dyn SubmanifoldChart,
    patch: &Patch,
    field: &Field,
    h: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for node in patch.nodes() {
        if node.weight == 0.0 {
            continue;
        }
        let hv = mean_curvature_ambient(chart, &node.x, h)?;
        let j = chart.jacobian(&node.x)?;
        let sqrt_g = metric_tensor(&j).determinant().sqrt();
        total -= node.weight * hv.dot(&field(&node.x)?) * sqrt_g;
    }
    Ok(total)
}

/// `ψ·Y^⊥`: the normal part of a constant vector `Y`, cut off by the patch
/// bump.
pub fn normal_variation_field<'a>(
    chart: &'a dyn SubmanifoldChart,
    geom: &'a dyn AmbientGeometry,
    patch: &'a Patch,
    y: DVector<f64>,
) -> impl Fn(&[f64]) -> Result<DVector<f64>> + 'a {
    move |x: &[f64]| normal_part(chart, geom, patch, x, &y)
}

/// `ψ·w^⊥` for the position vector `w`.
pub fn position_variation_field<'a>(
    chart: &'a dyn SubmanifoldChart,
    geom: &'a dyn AmbientGeometry,
    patch: &'a Patch,
) -> impl Fn(&[f64]) -> Result<DVector<f64>> + 'a {
    move |x: &[f64]| normal_part(chart, geom, patch, x, &chart.point(x)?)
}

fn normal_part(
    chart: &dyn SubmanifoldChart,
    geom: &dyn AmbientGeometry,
    patch: &Patch,
    x: &[f64],
    y: &DVector<f64>,
) -> Result<DVector<f64>> {
    let w = chart.point(x)?;
    let j = chart.jacobian(x)?;
    let gm = geom.metric(&w)?;
    let g = j.transpose() * &gm * &j;
    let coef = g
        .cholesky()
        .ok_or(Error::SingularGram { det: 0.0 })?
        .solve(&(j.transpose() * &gm * y));
    Ok((y - &j * coef) * patch.weight(x))
}

/// Hamiltonian field of `ψ̃ f`, where `ψ̃` extends the patch bump `ψ` with
/// `dψ̃ = 0` on the normal space: `ψ X_f + f X_ψ̃`. Its normal part is that
/// of any compactly supported Hamiltonian agreeing with `ψ f` on the patch.
pub fn hamiltonian_variation_field<'a>(
    chart: &'a dyn SubmanifoldChart,
    geom: &'a dyn AmbientGeometry,
    patch: &'a Patch,
    f: &'a dyn Hamiltonian,
) -> impl Fn(&[f64]) -> Result<DVector<f64>> + 'a {
    move |x: &[f64]| {
        let w = chart.point(x)?;
        let j = chart.jacobian(x)?;
        let gm = geom.metric(&w)?;
        let om = geom.omega(&w)?;
        let xf = hamiltonian_field_real(&om, &f.gradient(w.as_slice()))?;
        let g = j.transpose() * &gm * &j;
        let dpsi = DVector::from_vec(patch.weight_gradient(x));
        let sharp = g
            .cholesky()
            .ok_or(Error::SingularGram { det: 0.0 })?
            .solve(&dpsi);
        let covector = &gm * &j * sharp;
        let xpsi = hamiltonian_field_real(&om, &covector)?;
        Ok(xf * patch.weight(x) + xpsi * f.value(w.as_slice()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityReport {
    pub dvol_dt: f64,
    /// Largest `|dVol/dt|` over the normal baseline fields.
    pub baseline: f64,
    pub denominator: f64,
    /// The baseline vanished (totally geodesic patch) and `∫|div X|` of the
    /// Hamiltonian variation was used instead.
    pub used_l1: bool,
    pub ratio: f64,
}

/// `|dVol/dt|` of the Hamiltonian variation of each `f`, relative to the
/// volume response to normal variations along `baseline_dirs` and the
/// position vector.
pub fn hamiltonian_stationarity(
    chart: &dyn SubmanifoldChart,
    geom: &dyn AmbientGeometry,
    patch: &Patch,
    fs: &[&dyn Hamiltonian],
    baseline_dirs: &[DVector<f64>],
    tau: f64,
) -> Result<Vec<StationarityReport>> {
    let pf = position_variation_field(chart, geom, patch);
    let mut baseline = patch_volume_derivative(chart, geom, patch, &pf, tau)?.dvol_dt.abs();
    for y in baseline_dirs {
        let nf = normal_variation_field(chart, geom, patch, y.clone());
        baseline = baseline.max(patch_volume_derivative(chart, geom, patch, &nf, tau)?.dvol_dt.abs());
    }
    fs.iter()
        .map(|&f| {
            let field = hamiltonian_variation_field(chart, geom, patch, f);
            let res = patch_volume_derivative(chart, geom, patch, &field, tau)?;
            let used_l1 = baseline < 1e-6 * res.volume;
            let denominator = if used_l1 { res.divergence_l1 } else { baseline };
            Ok(StationarityReport {
                dvol_dt: res.dvol_dt,
                baseline,
                denominator,
                used_l1,
                ratio: res.dvol_dt.abs() / denominator.max(f64::MIN_POSITIVE),
            })
        })
        .collect()
}

/// Volume of `real-patch × T_Γ` inside `N`, against `∫ Vo` over the real
/// patch. The torus factor runs over a fundamental domain of `L*`.
pub fn coarea_orbit_volume_check(
    q: &QuadricConfiguration,
    real: Box<dyn SubmanifoldChart + Send + Sync>,
    real_axes: &[Axis],
    phase_nodes: usize,
) -> Result<(f64, f64)> {
    if real_axes.len() != real.dim() {
        return Err(Error::dim(real.dim(), real_axes.len()));
    }
    let torus = TorusSubgroup::new(q)?;
    // φ = Σ s_i b*_i; phase row i is (⟨b*_i, γ_k⟩)_k
    let dual = torus.dual_basis_f64();
    let gam = q.gamma_f64();
    let rows: Vec<Vec<f64>> = dual
        .iter()
        .map(|b| (0..q.ambient_dim()).map(|k| b.iter().zip(&gam).map(|(bi, g)| bi * g[k]).sum()).collect())
        .collect();

    let chart = NChart::new(real, rows)?;
    let mut axes = real_axes.to_vec();
    axes.extend((0..q.num_quadrics()).map(|_| Axis::Periodic { lo: 0.0, hi: 1.0, n: phase_nodes }));
    let up_patch = Patch::new(axes);
    let mut upstairs = 0.0;
    for node in up_patch.nodes() {
        if node.weight == 0.0 {
            continue;
        }
        upstairs += node.weight * metric_tensor(&chart.jacobian(&node.x)?).determinant().sqrt();
    }

    let base_patch = Patch::new(real_axes.to_vec());
    let mut fiber = 0.0;
    for node in base_patch.nodes() {
        if node.weight == 0.0 {
            continue;
        }
        let u = chart.real_chart().point(&node.x)?;
        let z: Vec<_> = u.iter().map(|&x| num_complex::Complex64::new(x, 0.0)).collect();
        let vo = torus.orbit_volume(q, &z)?;
        let ju = chart.real_chart().jacobian(&node.x)?;
        fiber += node.weight * vo * metric_tensor(&ju).determinant().sqrt();
    }
    Ok((upstairs, fiber))
}

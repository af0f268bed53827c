use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::charts::SubmanifoldChart;
use super::{omega_matrix, to_real};
use crate::error::{Error, Result};
use crate::quadric_config::QuadricConfiguration;

/// An orthonormal basis (columns of `basis`) of the tangent space at `point`.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    pub point: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    pub basis: DMatrix<f64>,
}

impl TangentFrame {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `max |⟨e_i, e_j⟩ − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.basis.transpose() * &self.basis;
        (g - DMatrix::identity(self.dim(), self.dim())).amax()
    }
}

fn push_orthogonal(basis: &mut Vec<DVector<f64>>, v: &DVector<f64>, rel_tol: f64) -> bool {
    let scale = v.norm();
    if scale == 0.0 {
        return false;
    }
    let mut w = v.clone();
    for _ in 0..2 {
        for b in basis.iter() {
            w -= b * b.dot(&w);
        }
    }
    let n = w.norm();
    if n > rel_tol * scale {
        basis.push(w / n);
        true
    } else {
        false
    }
}

/// Orthonormal bases of the column span of `a` and of its orthogonal
/// complement.
pub(crate) fn orthonormal_split(a: &DMatrix<f64>, rel_tol: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = a.nrows();
    let mut basis = Vec::new();
    for col in a.column_iter() {
        push_orthogonal(&mut basis, &col.into_owned(), rel_tol);
    }
    let r = basis.len();
    // complete greedily with the least-covered coordinate direction
    while basis.len() < d {
        let best = (0..d)
            .map(|i| {
                let e = DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 });
                let covered: f64 = basis.iter().map(|b| b[i] * b[i]).sum();
                (1.0 - covered, e)
            })
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, e)| e)
            .expect("d > 0");
        if !push_orthogonal(&mut basis, &best, 1e-8) {
            break;
        }
    }
    let span = DMatrix::from_columns(&basis[..r]);
    let comp = if basis.len() > r {
        DMatrix::from_columns(&basis[r..])
    } else {
        DMatrix::zeros(d, 0)
    };
    (fix_empty(span, d), comp)
}

/// `orthonormal_split` with the default tolerance.
pub fn orthonormal_complement(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    orthonormal_split(a, 1e-9)
}

fn fix_empty(m: DMatrix<f64>, rows: usize) -> DMatrix<f64> {
    if m.ncols() == 0 { DMatrix::zeros(rows, 0) } else { m }
}

/// Orthonormal basis of the column span; errors when the columns are
/// dependent.
pub fn orthonormalize(j: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut basis = Vec::new();
    for col in j.column_iter() {
        if !push_orthogonal(&mut basis, &col.into_owned(), 1e-9) {
            return Err(Error::RankDeficient {
                rank: basis.len(),
                expected: j.ncols(),
            });
        }
    }
    Ok(fix_empty(DMatrix::from_columns(&basis), j.nrows()))
}

pub fn metric_tensor(j: &DMatrix<f64>) -> DMatrix<f64> {
    j.transpose() * j
}

/// `w − J g⁻¹ Jᵗ w`: the flat-normal part of `w`.
pub fn normal_projection(j: &DMatrix<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
    let g = metric_tensor(j);
    let y = g
        .cholesky()
        .ok_or(Error::SingularGram { det: 0.0 })?
        .solve(&(j.transpose() * w));
    Ok(w - j * y)
}

pub fn tangent_frame(chart: &dyn SubmanifoldChart, x: &[f64]) -> Result<TangentFrame> {
    let jacobian = chart.jacobian(x)?;
    let basis = orthonormalize(&jacobian)?;
    Ok(TangentFrame {
        point: chart.point(x)?,
        jacobian,
        basis,
    })
}

/// Real normals `γ_j ⊙ z` of `Z_Γ` at `z`, as columns.
fn z_normals(q: &QuadricConfiguration, z: &[Complex64]) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = q
        .gamma_f64()
        .iter()
        .map(|row| {
            let v: Vec<Complex64> = row.iter().zip(z).map(|(g, w)| w * *g).collect();
            to_real(&v)
        })
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(2 * z.len(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Frame of `T_z Z_Γ` (the orthogonal complement of the quadric normals).
pub fn z_tangent_frame(q: &QuadricConfiguration, z: &[Complex64]) -> Result<TangentFrame> {
    if z.len() != q.ambient_dim() {
        return Err(Error::dim(q.ambient_dim(), z.len()));
    }
    let normals = z_normals(q, z);
    let (span, comp) = orthonormal_split(&normals, 1e-9);
    if span.ncols() != q.num_quadrics() {
        return Err(Error::RankDeficient {
            rank: span.ncols(),
            expected: q.num_quadrics(),
        });
    }
    Ok(TangentFrame {
        point: to_real(z),
        jacobian: comp.clone(),
        basis: comp,
    })
}

/// `max_{i<j} |ω(e_i, e_j)|` under the flat form on `ℂ^m`.
pub fn lagrangian_residual(frame: &TangentFrame) -> f64 {
    let m = frame.point.len() / 2;
    let om = frame.basis.transpose() * omega_matrix(m) * &frame.basis;
    om.amax()
}

/// `max |⟨γ_j ⊙ z, e⟩|` over frame vectors and quadrics.
pub fn frame_constraint_residual(q: &QuadricConfiguration, frame: &TangentFrame) -> f64 {
    let z = super::to_complex(&frame.point);
    let n = z_normals(q, &z);
    if n.ncols() == 0 {
        return 0.0;
    }
    (n.transpose() * &frame.basis).amax()
}

fn check_step(x: &[f64], h: f64) -> Result<()> {
    if !(h > 1e-12) || x.iter().any(|&xi| xi + h == xi) {
        return Err(Error::StepUnderflow(h));
    }
    Ok(())
}

fn shifted(x: &[f64], a: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[a] += h;
    y
}

/// `H = g^{ab} (∂_a∂_b w)^⊥`, the trace of the second fundamental form in
/// the flat ambient space; second derivatives by central differences of
/// the chart Jacobian.
pub fn mean_curvature_ambient(chart: &dyn SubmanifoldChart, x: &[f64], h: f64) -> Result<DVector<f64>> {
    check_step(x, h)?;
    let d = chart.dim();
    let j = chart.jacobian(x)?;
    let diffs: Vec<DMatrix<f64>> = (0..d)
        .map(|b| Ok((chart.jacobian(&shifted(x, b, h))? - chart.jacobian(&shifted(x, b, -h))?) / (2.0 * h)))
        .collect::<Result<_>>()?;
    let ginv = metric_tensor(&j)
        .try_inverse()
        .ok_or(Error::SingularGram { det: 0.0 })?;
    let mut trace = DVector::zeros(j.nrows());
    for a in 0..d {
        for b in 0..d {
            let s = (diffs[b].column(a) + diffs[a].column(b)) * 0.5;
            trace += s * ginv[(a, b)];
        }
    }
    normal_projection(&j, &trace)
}

/// Norm of the part of `H` tangent to `Z_Γ`: the mean curvature of the
/// submanifold inside `Z_Γ`.
pub fn minimality_residual_in_z(
    q: &QuadricConfiguration,
    chart: &dyn SubmanifoldChart,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    let hv = mean_curvature_ambient(chart, x, h)?;
    let z = super::to_complex(&chart.point(x)?);
    if z.len() != q.ambient_dim() {
        return Err(Error::dim(q.ambient_dim(), z.len()));
    }
    let n = z_normals(q, &z);
    let in_z = if n.ncols() == 0 {
        hv
    } else {
        let y = (n.transpose() * &n)
            .lu()
            .solve(&(n.transpose() * &hv))
            .ok_or(Error::SingularGram { det: 0.0 })?;
        &hv - &n * y
    };
    let j = chart.jacobian(x)?;
    Ok(normal_projection(&j, &in_z)?.norm())
}

/// `√g · g⁻¹ α` with `α_b = ω(H, ∂_b w)`.
fn densitized_sharp(chart: &dyn SubmanifoldChart, x: &[f64], h: f64) -> Result<DVector<f64>> {
    let hv = mean_curvature_ambient(chart, x, h)?;
    let j = chart.jacobian(x)?;
    let om = omega_matrix(j.nrows() / 2);
    let alpha = (hv.transpose() * om * &j).transpose();
    let g = metric_tensor(&j);
    let sqrt_g = g.determinant().sqrt();
    let w = g
        .cholesky()
        .ok_or(Error::SingularGram { det: 0.0 })?
        .solve(&alpha);
    Ok(w * sqrt_g)
}

/// `|δ(i_H ω)|` at `x`, with `δα = −(1/√g) ∂_a(√g g^{ab} α_b)`.
pub fn hminimality_residual(chart: &dyn SubmanifoldChart, x: &[f64], h: f64) -> Result<f64> {
    check_step(x, h)?;
    if chart.ambient_dim() % 2 != 0 {
        return Err(Error::Unsupported("symplectic residual needs a complex ambient space".into()));
    }
    let mut div = 0.0;
    for a in 0..chart.dim() {
        let p = densitized_sharp(chart, &shifted(x, a, h), h)?;
        let m = densitized_sharp(chart, &shifted(x, a, -h), h)?;
        div += (p[a] - m[a]) / (2.0 * h);
    }
    let sqrt_g = metric_tensor(&chart.jacobian(x)?).determinant().sqrt();
    Ok((div / sqrt_g).abs())
}

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{to_complex, to_real};
use crate::error::{Error, Result};
use crate::quadric_config::{QuadricConfiguration, QuadricMode};

/// `F_j(w) = Σ_d g_jd w_d² − c_j`.
pub(crate) fn quadric_values(g: &DMatrix<f64>, c: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
    g * w.map(|x| x * x) - c
}

/// Rows `∂F_j/∂w = 2 g_jd w_d`.
pub(crate) fn quadric_jacobian(g: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut j = g.clone();
    for (d, mut col) in j.column_iter_mut().enumerate() {
        col *= 2.0 * w[d];
    }
    j
}

/// The quadric system of `q` on `ℝ^m` (real mode) or on `ℝ^{2m}`
/// (complex mode, interleaved coordinates).
pub(crate) fn quadric_system(q: &QuadricConfiguration, mode: QuadricMode) -> (DMatrix<f64>, DVector<f64>) {
    let gam = q.gamma_f64();
    let (k, m) = (q.num_quadrics(), q.ambient_dim());
    let c = DVector::from_vec(q.c_f64());
    let g = match mode {
        QuadricMode::Real => DMatrix::from_fn(k, m, |j, d| gam[j][d]),
        QuadricMode::Complex => DMatrix::from_fn(k, 2 * m, |j, d| gam[j][d / 2]),
    };
    (g, c)
}

/// Least-norm Newton iteration `w ← w − Jᵗ(JJᵗ)⁻¹F(w)` onto `F = 0`.
pub fn newton_project(
    g: &DMatrix<f64>,
    c: &DVector<f64>,
    start: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let mut w = start.clone();
    let mut res = f64::INFINITY;
    for _ in 0..max_iter {
        let f = quadric_values(g, c, &w);
        res = f.amax();
        if res <= tol {
            // one more step lands on the roundoff floor
            if let Some(step) = least_norm_step(g, &w, &f) {
                let next = &w - step;
                if quadric_values(g, c, &next).amax() <= res {
                    w = next;
                }
            }
            return Ok(w);
        }
        let Some(step) = least_norm_step(g, &w, &f) else {
            return Err(Error::NonConvergence { iterations: max_iter, residual: res });
        };
        w -= step;
    }
    let f = quadric_values(g, c, &w);
    if f.amax() <= tol {
        return Ok(w);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: res.min(f.amax()),
    })
}

fn least_norm_step(g: &DMatrix<f64>, w: &DVector<f64>, f: &DVector<f64>) -> Option<DVector<f64>> {
    let j = quadric_jacobian(g, w);
    let jjt = &j * j.transpose();
    let y = jjt.lu().solve(f)?;
    Some(j.transpose() * y)
}

/// Newton retraction onto `R_Γ` or `Z_Γ` (per `q.mode()`); a real-mode
/// configuration expects a real point.
pub fn project_to_quadrics(
    q: &QuadricConfiguration,
    point: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>> {
    if point.len() != q.ambient_dim() {
        return Err(Error::dim(q.ambient_dim(), point.len()));
    }
    match q.mode() {
        QuadricMode::Complex => {
            let (g, c) = quadric_system(q, QuadricMode::Complex);
            let w = newton_project(&g, &c, &to_real(point), tol, max_iter)?;
            Ok(to_complex(&w))
        }
        QuadricMode::Real => {
            if point.iter().any(|z| z.im != 0.0) {
                return Err(Error::Precondition("real-mode projection of a non-real point".into()));
            }
            let (g, c) = quadric_system(q, QuadricMode::Real);
            let u = DVector::from_iterator(point.len(), point.iter().map(|z| z.re));
            let w = newton_project(&g, &c, &u, tol, max_iter)?;
            Ok(w.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        }
    }
}

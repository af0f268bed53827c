use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::geometry::orthonormal_split;
use super::project::{quadric_jacobian, quadric_system, quadric_values};
use super::to_real;
use crate::error::{Error, Result};
use crate::quadric_config::{QuadricConfiguration, QuadricMode};

const FD_STEP: f64 = 1e-6;

/// A parametrized submanifold `x ↦ w(x)` of a real vector space.
pub trait SubmanifoldChart {
    fn dim(&self) -> usize;
    /// Real dimension of the ambient space.
    fn ambient_dim(&self) -> usize;
    fn point(&self, x: &[f64]) -> Result<DVector<f64>>;
    /// Columns `∂w/∂x_a`. Central differences unless overridden.
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let mut j = DMatrix::zeros(self.ambient_dim(), self.dim());
        let mut y = x.to_vec();
        for a in 0..self.dim() {
            y[a] = x[a] + FD_STEP;
            let p = self.point(&y)?;
            y[a] = x[a] - FD_STEP;
            let m = self.point(&y)?;
            y[a] = x[a];
            j.set_column(a, &((p - m) / (2.0 * FD_STEP)));
        }
        Ok(j)
    }
}

/// Implicit-function chart of `{u : Σ_d g_jd u_d² = c_j}` over the tangent
/// plane at `u0`: `u(v) = u0 + E v + N w(v)` with `w` found by Newton.
#[derive(Debug, Clone)]
pub struct GraphChart {
    g: DMatrix<f64>,
    c: DVector<f64>,
    u0: DVector<f64>,
    e: DMatrix<f64>,
    n: DMatrix<f64>,
}

impl GraphChart {
    pub fn new(g: DMatrix<f64>, c: DVector<f64>, u0: DVector<f64>) -> Result<Self> {
        let j0 = quadric_jacobian(&g, &u0);
        let (n, e) = orthonormal_split(&j0.transpose(), 1e-10);
        if n.ncols() != g.nrows() {
            return Err(Error::RankDeficient {
                rank: n.ncols(),
                expected: g.nrows(),
            });
        }
        Ok(Self { g, c, u0, e, n })
    }

    /// Chart of the real variety `R_q` at `u0`.
    pub fn for_config(q: &QuadricConfiguration, u0: &[f64], tol: f64) -> Result<Self> {
        let (g, c) = quadric_system(q, QuadricMode::Real);
        let u0 = DVector::from_column_slice(u0);
        let res = quadric_values(&g, &c, &u0).amax();
        if res > tol {
            return Err(Error::Precondition(format!(
                "base point off the real variety (residual {res:.3e})"
            )));
        }
        Self::new(g, c, u0)
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.u0
    }

    fn solve(&self, v: &[f64]) -> Result<DVector<f64>> {
        let lin = &self.u0 + &self.e * DVector::from_column_slice(v);
        let mut w = DVector::zeros(self.n.ncols());
        let mut res = f64::INFINITY;
        for _ in 0..60 {
            let u = &lin + &self.n * &w;
            let f = quadric_values(&self.g, &self.c, &u);
            res = f.amax();
            let a = quadric_jacobian(&self.g, &u) * &self.n;
            let Some(step) = a.lu().solve(&f) else {
                break;
            };
            w -= &step;
            // quadratic convergence: the error after this step is far below eps
            if step.norm() <= 1e-10 * (1.0 + w.norm()) {
                let u = &lin + &self.n * &w;
                return Ok(u);
            }
        }
        let u = &lin + &self.n * &w;
        let fin = quadric_values(&self.g, &self.c, &u).amax();
        if fin < 1e-12 {
            return Ok(u);
        }
        Err(Error::NonConvergence {
            iterations: 60,
            residual: res.min(fin),
        })
    }
}

impl SubmanifoldChart for GraphChart {
    fn dim(&self) -> usize {
        self.e.ncols()
    }

    fn ambient_dim(&self) -> usize {
        self.u0.len()
    }

    fn point(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::dim(self.dim(), x.len()));
        }
        self.solve(x)
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let u = self.point(x)?;
        let jf = quadric_jacobian(&self.g, &u);
        let a = &jf * &self.n;
        let b = &jf * &self.e;
        let wv = a.lu().solve(&(-b)).ok_or(Error::SingularGram { det: 0.0 })?;
        Ok(&self.e + &self.n * wv)
    }
}

/// Hyperspherical coordinates on the round sphere `S^{m−1}_ρ ⊂ ℝ^m`.
#[derive(Debug, Clone, Copy)]
pub struct SphereAngularChart {
    pub radius: f64,
    pub m: usize,
}

impl SphereAngularChart {
    // u_j = ρ Π_{i<j} sin x_i · cos x_j (last coordinate: no cosine)
    fn factor(&self, j: usize, i: usize, x: &[f64], diff: bool) -> f64 {
        let last = self.m - 1;
        if i < j {
            if diff { x[i].cos() } else { x[i].sin() }
        } else if i == j && j < last {
            if diff { -x[i].sin() } else { x[i].cos() }
        } else {
            f64::NAN
        }
    }

    fn factors(&self, j: usize) -> usize {
        if j + 1 == self.m { j } else { j + 1 }
    }
}

impl SubmanifoldChart for SphereAngularChart {
    fn dim(&self) -> usize {
        self.m - 1
    }

    fn ambient_dim(&self) -> usize {
        self.m
    }

    fn point(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::dim(self.dim(), x.len()));
        }
        Ok(DVector::from_fn(self.m, |j, _| {
            self.radius * (0..self.factors(j)).map(|i| self.factor(j, i, x, false)).product::<f64>()
        }))
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if x.len() != self.dim() {
            return Err(Error::dim(self.dim(), x.len()));
        }
        Ok(DMatrix::from_fn(self.m, self.dim(), |j, a| {
            if a >= self.factors(j) {
                return 0.0;
            }
            self.radius
                * (0..self.factors(j))
                    .map(|i| self.factor(j, i, x, i == a))
                    .product::<f64>()
        }))
    }
}

/// `(v, φ) ↦ (e^{2πi Σ_j φ_j ρ_jk} u_k(v))_k` for a real chart `u` and
/// phase rows `ρ_j` (the rows of `Γ` for `N`, of `Δ` for the lift of `Ñ`).
pub struct NChart {
    real: Box<dyn SubmanifoldChart + Send + Sync>,
    phases: Vec<Vec<f64>>,
}

impl NChart {
    pub fn new(real: Box<dyn SubmanifoldChart + Send + Sync>, phases: Vec<Vec<f64>>) -> Result<Self> {
        let m = real.ambient_dim();
        if let Some(r) = phases.iter().find(|r| r.len() != m) {
            return Err(Error::dim(m, r.len()));
        }
        Ok(Self { real, phases })
    }

    /// Chart of `N` around `u0 ∈ R_Γ`, with the real part a graph chart.
    pub fn for_config(q: &QuadricConfiguration, u0: &[f64], tol: f64) -> Result<Self> {
        let real = GraphChart::for_config(q, u0, tol)?;
        Self::new(Box::new(real), q.gamma_f64())
    }

    pub fn real_dim(&self) -> usize {
        self.real.dim()
    }

    pub fn num_phases(&self) -> usize {
        self.phases.len()
    }

    pub fn m(&self) -> usize {
        self.real.ambient_dim()
    }

    pub fn real_chart(&self) -> &dyn SubmanifoldChart {
        self.real.as_ref()
    }

    fn phase_factors(&self, phi: &[f64]) -> Vec<Complex64> {
        (0..self.m())
            .map(|k| {
                let a: f64 = self.phases.iter().zip(phi).map(|(r, p)| r[k] * p).sum();
                Complex64::from_polar(1.0, 2.0 * PI * a)
            })
            .collect()
    }

    fn split<'a>(&self, x: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        if x.len() != self.dim() {
            return Err(Error::dim(self.dim(), x.len()));
        }
        Ok(x.split_at(self.real.dim()))
    }

    pub fn point_complex(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let (v, phi) = self.split(x)?;
        let u = self.real.point(v)?;
        Ok(self
            .phase_factors(phi)
            .iter()
            .zip(u.iter())
            .map(|(e, &uk)| e * uk)
            .collect())
    }
}

impl SubmanifoldChart for NChart {
    fn dim(&self) -> usize {
        self.real.dim() + self.phases.len()
    }

    fn ambient_dim(&self) -> usize {
        2 * self.m()
    }

    fn point(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(to_real(&self.point_complex(x)?))
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let (v, phi) = self.split(x)?;
        let u = self.real.point(v)?;
        let ju = self.real.jacobian(v)?;
        let e = self.phase_factors(phi);
        let z: Vec<Complex64> = e.iter().zip(u.iter()).map(|(a, &b)| a * b).collect();
        let mut j = DMatrix::zeros(2 * self.m(), self.dim());
        for a in 0..self.real.dim() {
            let col: Vec<Complex64> = (0..self.m()).map(|k| e[k] * ju[(k, a)]).collect();
            j.set_column(a, &to_real(&col));
        }
        for (jj, row) in self.phases.iter().enumerate() {
            let col: Vec<Complex64> = (0..self.m())
                .map(|k| Complex64::new(0.0, 2.0 * PI * row[k]) * z[k])
                .collect();
            j.set_column(self.real.dim() + jj, &to_real(&col));
        }
        Ok(j)
    }
}

/// A point on `N` with its chart parameters `x = (v, φ)`.
pub struct ChartPoint {
    pub chart: NChart,
    pub v: Vec<f64>,
    pub phi: Vec<f64>,
}

impl ChartPoint {
    /// `chart_N(Q, u0, (v, φ))`.
    pub fn new(q: &QuadricConfiguration, u0: &[f64], v: &[f64], phi: &[f64], tol: f64) -> Result<Self> {
        let chart = NChart::for_config(q, u0, tol)?;
        Self::with_chart(chart, v, phi)
    }

    pub fn with_chart(chart: NChart, v: &[f64], phi: &[f64]) -> Result<Self> {
        if v.len() != chart.real_dim() {
            return Err(Error::dim(chart.real_dim(), v.len()));
        }
        if phi.len() != chart.num_phases() {
            return Err(Error::dim(chart.num_phases(), phi.len()));
        }
        Ok(Self {
            chart,
            v: v.to_vec(),
            phi: phi.to_vec(),
        })
    }

    pub fn x(&self) -> Vec<f64> {
        self.v.iter().chain(&self.phi).copied().collect()
    }

    pub fn z(&self) -> Result<Vec<Complex64>> {
        self.chart.point_complex(&self.x())
    }

    pub fn base(&self) -> Result<DVector<f64>> {
        self.chart.real.point(&vec![0.0; self.v.len()])
    }
}

/// `θ ↦ r e^{iθ}` in `ℂ`.
#[derive(Debug, Clone, Copy)]
pub struct CircleChart {
    pub r: f64,
}

impl SubmanifoldChart for CircleChart {
    fn dim(&self) -> usize {
        1
    }

    fn ambient_dim(&self) -> usize {
        2
    }

    fn point(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(DVector::from_vec(vec![self.r * x[0].cos(), self.r * x[0].sin()]))
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(DMatrix::from_vec(2, 1, vec![-self.r * x[0].sin(), self.r * x[0].cos()]))
    }
}

/// `t ↦ a cos t + i b sin t` in `ℂ`.
#[derive(Debug, Clone, Copy)]
pub struct EllipseChart {
    pub a: f64,
    pub b: f64,
}

impl SubmanifoldChart for EllipseChart {
    fn dim(&self) -> usize {
        1
    }

    fn ambient_dim(&self) -> usize {
        2
    }

    fn point(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(DVector::from_vec(vec![self.a * x[0].cos(), self.b * x[0].sin()]))
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(DMatrix::from_vec(2, 1, vec![-self.a * x[0].sin(), self.b * x[0].cos()]))
    }
}

/// `(θ_1, θ_2) ↦ (a e^{iθ_1}, b e^{iθ_2})` in `ℂ²`.
#[derive(Debug, Clone, Copy)]
pub struct ProductTorusChart {
    pub a: f64,
    pub b: f64,
}

impl SubmanifoldChart for ProductTorusChart {
    fn dim(&self) -> usize {
        2
    }

    fn ambient_dim(&self) -> usize {
        4
    }

    fn point(&self, x: &[f64]) -> Result<DVector<f64>> {
        let z = [
            Complex64::from_polar(self.a, x[0]),
            Complex64::from_polar(self.b, x[1]),
        ];
        Ok(to_real(&z))
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let i = Complex64::i();
        let c1 = [i * Complex64::from_polar(self.a, x[0]), Complex64::new(0.0, 0.0)];
        let c2 = [Complex64::new(0.0, 0.0), i * Complex64::from_polar(self.b, x[1])];
        Ok(DMatrix::from_columns(&[to_real(&c1), to_real(&c2)]))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rat;

    fn q(g: &[&[i64]], c: &[i64]) -> QuadricConfiguration {
        let c: Vec<_> = c.iter().map(|&x| rat(x)).collect();
        QuadricConfiguration::from_i64(g, &c, QuadricMode::Complex).unwrap()
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    fn check_jacobian(chart: &dyn SubmanifoldChart, x: &[f64]) {
        let analytic = chart.jacobian(x).unwrap();
        let mut fd = DMatrix::zeros(chart.ambient_dim(), chart.dim());
        let h = 1e-6;
        for a in 0..chart.dim() {
            let mut y = x.to_vec();
            y[a] += h;
            let p = chart.point(&y).unwrap();
            y[a] -= 2.0 * h;
            let m = chart.point(&y).unwrap();
            fd.set_column(a, &((p - m) / (2.0 * h)));
        }
        assert!((analytic - fd).amax() < 1e-8);
    }

    #[test]
    fn chart_examples() {
        let r = 0.5f64.sqrt();
        let c = q(&[&[1, 1]], &[1]);
        let p = ChartPoint::new(&c, &[r, r], &[0.0], &[0.25], 1e-12).unwrap();
        assert!(close(&p.z().unwrap(), &[Complex64::new(0.0, r), Complex64::new(0.0, r)], 1e-15));
        let p = ChartPoint::new(&c, &[r, r], &[0.0], &[0.0], 1e-12).unwrap();
        assert!(close(&p.z().unwrap(), &[Complex64::new(r, 0.0), Complex64::new(r, 0.0)], 1e-15));
        let s = q(&[&[1, 1, 1]], &[1]);
        let p = ChartPoint::new(&s, &[1.0, 0.0, 0.0], &[0.0, 0.0], &[0.5], 1e-12).unwrap();
        assert!(close(&p.z().unwrap(), &[Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)], 1e-15));
    }

    #[test]
    fn base_must_lie_on_variety() {
        let s = q(&[&[1, 1, 1]], &[1]);
        assert!(matches!(
            NChart::for_config(&s, &[1.0, 1.0, 0.0], 1e-10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn graph_chart_stays_on_variety() {
        let s = q(&[&[1, 1, 1], &[1, 1, 2]], &[2, 3]);
        let chart = GraphChart::for_config(&s, &[0.6, 0.8, 1.0], 1e-12).unwrap();
        for v in [-0.3, 0.0, 0.2, 0.5] {
            let u = chart.point(&[v]).unwrap();
            let z: Vec<_> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            assert!(s.membership_residual(&z).unwrap() < 1e-14);
        }
        check_jacobian(&chart, &[0.3]);
    }

    #[test]
    fn analytic_jacobians() {
        check_jacobian(&SphereAngularChart { radius: 1.3, m: 4 }, &[0.4, 1.1, 2.0]);
        check_jacobian(&SphereAngularChart { radius: 0.7, m: 2 }, &[0.4]);
        check_jacobian(&ProductTorusChart { a: 0.6, b: 0.8 }, &[0.4, 1.1]);
        check_jacobian(&EllipseChart { a: 1.0, b: 0.5 }, &[0.7]);
        check_jacobian(&CircleChart { r: 2.0 }, &[0.7]);
        let s = q(&[&[1, 1, 1]], &[1]);
        let n = NChart::for_config(&s, &[0.6, 0.0, 0.8], 1e-12).unwrap();
        check_jacobian(&n, &[0.1, -0.2, 0.3]);
    }

    #[test]
    fn sphere_chart_on_sphere() {
        let ch = SphereAngularChart { radius: 1.5, m: 3 };
        let u = ch.point(&[0.4, 2.2]).unwrap();
        assert!((u.norm() - 1.5).abs() < 1e-15);
    }
}

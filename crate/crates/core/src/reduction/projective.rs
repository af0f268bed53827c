//! `V_Γ = ℂP^{m−1}` for one quadric with equal coefficients, in the affine
//! chart `w_k = z_k / z_i`. Metric and symplectic form come from the
//! horizontal lifts of the Hopf-type submersion `Z_Γ → V_Γ`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::double::DoubleConfiguration;
use crate::error::{Error, Result};
use crate::exact_linalg::rat_to_f64;
use crate::numerics::{
    hamiltonian_stationarity, omega_matrix, Hamiltonian, to_real, AmbientGeometry, Axis, NChart, Patch,
    RealPolynomial, Sampler, SubmanifoldChart,
};
use crate::report::{CheckRecord, VerificationReport};

/// Real `2×2` block of multiplication by `a`.
fn mul_block(d: &mut DMatrix<f64>, row: usize, col: usize, a: Complex64) {
    d[(2 * row, 2 * col)] += a.re;
    d[(2 * row, 2 * col + 1)] -= a.im;
    d[(2 * row + 1, 2 * col)] += a.im;
    d[(2 * row + 1, 2 * col + 1)] += a.re;
}

/// Index of the largest-modulus coordinate, lowest index on ties.
pub(crate) fn chart_index(z: &[Complex64]) -> usize {
    let mut best = 0;
    for (k, w) in z.iter().enumerate() {
        if w.norm() > z[best].norm() {
            best = k;
        }
    }
    best
}

/// `ℂP^{m−1} = S_a / S¹` with `S_a = {Σ|z_k|² = a}`, in the chart `z_i ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpGeometry {
    pub m: usize,
    /// Squared radius of the sphere upstairs.
    pub a: f64,
    pub index: usize,
}

impl CpGeometry {
    /// `V_Γ` for `Γ = (γ, …, γ)`, `c > 0`.
    pub fn for_gamma(gamma: &crate::quadric_config::QuadricConfiguration, index: usize) -> Result<Self> {
        let rows = gamma.gamma_f64();
        if rows.len() != 1 {
            return Err(Error::Unsupported(format!(
                "projective chart needs one quadric, got {}",
                rows.len()
            )));
        }
        let g = rows[0][0];
        if g <= 0.0 || rows[0].iter().any(|&x| x != g) {
            return Err(Error::Precondition("projective chart needs equal positive coefficients".into()));
        }
        let c = rat_to_f64(&gamma.c()[0]);
        if c <= 0.0 {
            return Err(Error::Precondition("right-hand side must be positive".into()));
        }
        let m = gamma.ambient_dim();
        if index >= m {
            return Err(Error::dim(m, index));
        }
        Ok(Self { m, a: c / g, index })
    }

    /// Affine coordinates of a point of `ℂ^m`.
    pub fn project(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let zi = z[self.index];
        if zi.norm() == 0.0 {
            return Err(Error::Precondition(format!("coordinate {} vanishes", self.index + 1)));
        }
        Ok((0..self.m).filter(|&k| k != self.index).map(|k| z[k] / zi).collect())
    }

    /// Real `2(m−1) × 2m` matrix of the differential of [`Self::project`].
    pub fn project_differential(&self, z: &[Complex64]) -> DMatrix<f64> {
        let i = self.index;
        let zi = z[i];
        let mut d = DMatrix::zeros(2 * (self.m - 1), 2 * self.m);
        for (row, k) in (0..self.m).filter(|&k| k != i).enumerate() {
            mul_block(&mut d, row, k, 1.0 / zi);
            mul_block(&mut d, row, i, -z[k] / (zi * zi));
        }
        d
    }

    /// The point `√a ŵ/|ŵ|` of the fiber over `w`.
    pub fn lift(&self, w: &DVector<f64>) -> Vec<Complex64> {
        let mut hat = Vec::with_capacity(self.m);
        let mut it = w.as_slice().chunks(2);
        for k in 0..self.m {
            if k == self.index {
                hat.push(Complex64::new(1.0, 0.0));
            } else {
                let p = it.next().expect("2(m−1) coordinates");
                hat.push(Complex64::new(p[0], p[1]));
            }
        }
        let n = hat.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        hat.iter().map(|x| x * (self.a.sqrt() / n)).collect()
    }

    /// Orthonormal basis `B` of the horizontal space `{z, iz}^⊥` and the
    /// matrix `M = dΦ·B` taking horizontal coordinates to chart vectors.
    fn horizontal(&self, w: &DVector<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let z = self.lift(w);
        let iz: Vec<Complex64> = z.iter().map(|x| x * Complex64::i()).collect();
        let vertical = DMatrix::from_columns(&[to_real(&z), to_real(&iz)]);
        let (_, b) = crate::numerics::orthonormal_complement(&vertical);
        let m = self.project_differential(&z) * &b;
        Ok((b, m))
    }
}

impl AmbientGeometry for CpGeometry {
    fn dim(&self) -> usize {
        2 * (self.m - 1)
    }

    fn metric(&self, w: &DVector<f64>) -> Result<DMatrix<f64>> {
        let (_, m) = self.horizontal(w)?;
        let minv = m.try_inverse().ok_or(Error::SingularGram { det: 0.0 })?;
        Ok(minv.transpose() * minv)
    }

    fn omega(&self, w: &DVector<f64>) -> Result<DMatrix<f64>> {
        let (b, m) = self.horizontal(w)?;
        let minv = m.try_inverse().ok_or(Error::SingularGram { det: 0.0 })?;
        let flat = b.transpose() * omega_matrix(self.m) * &b;
        Ok(minv.transpose() * flat * minv)
    }
}

/// `Ñ ⊂ ℂP^{m−1}` in affine coordinates: the lift chart followed by the
/// projection.
pub struct CpNtildeChart {
    pub lift: NChart,
    pub geom: CpGeometry,
}

impl SubmanifoldChart for CpNtildeChart {
    fn dim(&self) -> usize {
        self.lift.dim()
    }

    fn ambient_dim(&self) -> usize {
        self.geom.dim()
    }

    fn point(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(to_real(&self.geom.project(&self.lift.point_complex(x)?)?))
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let z = self.lift.point_complex(x)?;
        Ok(self.geom.project_differential(&z) * self.lift.jacobian(x)?)
    }
}

impl CpNtildeChart {
    /// Chart of `Ñ` around the lifted base point `u ∈ R_Γ ∩ R_Δ`, using the
    /// affine chart of its largest coordinate.
    pub fn new(d: &DoubleConfiguration, base: &[f64], tol: f64) -> Result<Self> {
        let z: Vec<Complex64> = base.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let geom = CpGeometry::for_gamma(d.gamma_cfg(), chart_index(&z))?;
        Ok(Self {
            lift: d.lift_chart(base, tol)?,
            geom,
        })
    }

    /// `max |ω_red(e_a, e_b)|` over a frame orthonormal for the reduced
    /// metric.
    pub fn lagrangian_residual(&self, x: &[f64]) -> Result<f64> {
        let w = self.point(x)?;
        let j = self.jacobian(x)?;
        let g = self.geom.metric(&w)?;
        let gram = j.transpose() * &g * &j;
        let l = gram.cholesky().ok_or(Error::SingularGram { det: 0.0 })?.l();
        let linv = l.try_inverse().ok_or(Error::SingularGram { det: 0.0 })?;
        let e = &j * linv.transpose();
        Ok((e.transpose() * self.geom.omega(&w)? * e).amax())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpVerifyOptions {
    pub seed: u64,
    pub lagrangian_samples: usize,
    pub hamiltonians: usize,
    pub baseline_dirs: usize,
    pub nodes: usize,
    /// Half-width of the bump on the real chart axes.
    pub real_half_width: f64,
    /// Half-width of the bump on the phase axes.
    pub phase_half_width: f64,
    pub tau: f64,
    pub tol_lagrangian: f64,
    pub tol_variation: f64,
}

impl Default for CpVerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            lagrangian_samples: 100,
            hamiltonians: 5,
            baseline_dirs: 3,
            nodes: 20,
            real_half_width: 0.15,
            phase_half_width: 0.2,
            tau: 1e-4,
            tol_lagrangian: 1e-8,
            tol_variation: 1e-3,
        }
    }
}

/// Lagrangian and Hamiltonian-stationarity checks of `Ñ` inside
/// `V_Γ = ℂP^{m−1}`.
pub fn cp_chart_verify(d: &DoubleConfiguration, opts: &CpVerifyOptions) -> Result<VerificationReport> {
    let sampler = Sampler::new(d.stacked())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let k = d.delta_cfg().num_quadrics();
    let mut report = VerificationReport::new();

    let mut worst: f64 = 0.0;
    for _ in 0..opts.lagrangian_samples {
        let u = sampler.real_point(&mut rng)?;
        let chart = CpNtildeChart::new(d, &u, 1e-10)?;
        let mut x = vec![0.0; chart.lift.real_dim()];
        x.extend((0..k).map(|_| rng.random::<f64>()));
        worst = worst.max(chart.lagrangian_residual(&x)?);
    }
    report.push(CheckRecord::new(
        "cp.lagrangian",
        worst,
        opts.tol_lagrangian,
        opts.lagrangian_samples,
        opts.seed,
    ));

    let u = sampler.real_point(&mut rng)?;
    let chart = CpNtildeChart::new(d, &u, 1e-10)?;
    let phi0: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let mut axes: Vec<Axis> = (0..chart.lift.real_dim())
        .map(|_| Axis::Bump {
            center: 0.0,
            half_width: opts.real_half_width,
            n: opts.nodes,
        })
        .collect();
    axes.extend(phi0.iter().map(|&c| Axis::Bump {
        center: c,
        half_width: opts.phase_half_width,
        n: opts.nodes,
    }));
    let mut patch = Patch::new(axes);
    patch.seed = opts.seed;
    let dim = chart.geom.dim();
    let dirs: Vec<DVector<f64>> = (0..opts.baseline_dirs)
        .map(|_| DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0)))
        .collect();
    let fs: Vec<RealPolynomial> = (0..opts.hamiltonians)
        .map(|_| RealPolynomial::random(&mut rng, dim, 3, 6))
        .collect();
    let refs: Vec<&dyn Hamiltonian> = fs.iter().map(|f| f as &dyn Hamiltonian).collect();
    let reps = hamiltonian_stationarity(&chart, &chart.geom, &patch, &refs, &dirs, opts.tau)?;
    let worst = reps.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let used_l1 = reps.iter().any(|s| s.used_l1);
    if used_l1 {
        report.note("normal variations do not move the volume; ratios are relative to ∫|div X|");
    }
    report.push(CheckRecord::new(
        "cp.hamiltonian_stationarity",
        worst,
        opts.tol_variation,
        opts.hamiltonians,
        opts.seed,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::{rat, IntegerMatrix};
    use crate::quadric_config::{QuadricConfiguration, QuadricMode};
    use crate::reduction::stack_double;

    fn q(g: &[&[i64]], c: &[i64]) -> QuadricConfiguration {
        let c: Vec<_> = c.iter().map(|&x| rat(x)).collect();
        QuadricConfiguration::from_i64(g, &c, QuadricMode::Complex).unwrap()
    }

    fn empty(m: usize) -> QuadricConfiguration {
        QuadricConfiguration::new(IntegerMatrix::from_rows_with_cols(vec![], m).unwrap(), vec![], QuadricMode::Complex)
            .unwrap()
    }

    #[test]
    fn chart_index_ties() {
        let z = [Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.5, 0.0)];
        assert_eq!(chart_index(&z), 0);
        let z = [Complex64::new(0.1, 0.0), Complex64::new(0.0, -1.0), Complex64::new(1.0, 0.0)];
        assert_eq!(chart_index(&z), 1);
    }

    #[test]
    fn fubini_study_at_origin() {
        // at w = 0 the horizontal space maps by ζ ↦ ζ/z_i with |z_i| = √a,
        // so both forms scale by a
        let g = CpGeometry { m: 3, a: 2.0, index: 0 };
        let w = DVector::zeros(4);
        let gm = g.metric(&w).unwrap();
        assert!((gm - DMatrix::identity(4, 4) * 2.0).amax() < 1e-12);
        let om = g.omega(&w).unwrap();
        assert!((om - omega_matrix(2) * 2.0).amax() < 1e-12);
    }

    #[test]
    fn fubini_study_closed_form() {
        // g(ξ,ξ) = a(|ξ|²(1+|w|²) − |⟨w,ξ⟩|²)/(1+|w|²)²
        let g = CpGeometry { m: 3, a: 1.5, index: 1 };
        let w = DVector::from_vec(vec![0.3, -0.2, 0.7, 0.4]);
        let xi = DVector::from_vec(vec![-0.5, 0.1, 0.2, 0.9]);
        let wc = crate::numerics::to_complex(&w);
        let xc = crate::numerics::to_complex(&xi);
        let n2: f64 = wc.iter().map(|x| x.norm_sqr()).sum();
        let x2: f64 = xc.iter().map(|x| x.norm_sqr()).sum();
        let ip: Complex64 = wc.iter().zip(&xc).map(|(a, b)| a.conj() * b).sum();
        let expected = g.a * (x2 * (1.0 + n2) - ip.norm_sqr()) / (1.0 + n2).powi(2);
        let got = (xi.transpose() * g.metric(&w).unwrap() * &xi)[0];
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn lift_projects_back() {
        let g = CpGeometry { m: 3, a: 2.0, index: 2 };
        let w = DVector::from_vec(vec![0.3, -0.2, 0.7, 0.4]);
        let z = g.lift(&w);
        assert!((z.iter().map(|x| x.norm_sqr()).sum::<f64>() - 2.0).abs() < 1e-14);
        assert!((to_real(&g.project(&z).unwrap()) - w).amax() < 1e-14);
    }

    #[test]
    fn torus_in_cp2() {
        let d = stack_double(&q(&[&[1, 1, 1]], &[2]), &q(&[&[1, 1, 2]], &[3])).unwrap();
        let opts = CpVerifyOptions {
            lagrangian_samples: 20,
            hamiltonians: 2,
            ..Default::default()
        };
        let r = cp_chart_verify(&d, &opts).unwrap();
        assert!(r.pass(), "{}", r.to_human());
        // the torus is not minimal, so normal variations give a real baseline
        assert!(r.notes.is_empty());
    }

    #[test]
    fn real_projective_plane() {
        let d = stack_double(&q(&[&[1, 1, 1]], &[1]), &empty(3)).unwrap();
        let opts = CpVerifyOptions {
            lagrangian_samples: 20,
            hamiltonians: 2,
            ..Default::default()
        };
        let r = cp_chart_verify(&d, &opts).unwrap();
        assert!(r.records[0].residual < 1e-10);
        assert!(r.pass(), "{}", r.to_human());
    }
}

use nalgebra::DVector;
use rand::Rng;

use super::charts::ChartPoint;
use super::project::{newton_project, quadric_system};
use crate::error::{Error, Result};
use crate::exact_linalg::lp::strictly_positive_solution;
use crate::exact_linalg::{rat_to_f64, rational_nullspace, NullspaceSide};
use crate::quadric_config::{QuadricConfiguration, QuadricMode};

/// Some `t > 0` with `Γt = c`, i.e. the squared coordinates of a point of
/// `R_Γ` with no vanishing coordinate.
pub fn interior_weights(q: &QuadricConfiguration) -> Result<Vec<f64>> {
    let rows: Vec<Vec<_>> = q.gamma().to_rational().row_vecs();
    let t = strictly_positive_solution(&rows, q.c(), q.ambient_dim()).ok_or_else(|| {
        Error::Precondition("no point of the variety has all coordinates nonzero".into())
    })?;
    Ok(t.iter().map(rat_to_f64).collect())
}

/// Random points of `R_Γ`: random `t` on a chord of `{t ≥ 0, Γt = c}`
/// through an interior point, then `u_k = ±√t_k`.
pub struct Sampler {
    q: QuadricConfiguration,
    interior: Vec<f64>,
    kernel: Vec<Vec<f64>>,
}

impl Sampler {
    pub fn new(q: &QuadricConfiguration) -> Result<Self> {
        let interior = interior_weights(q)?;
        let kernel = rational_nullspace(&q.gamma().to_rational(), NullspaceSide::Right).to_f64_rows();
        Ok(Self {
            q: q.with_mode(QuadricMode::Complex),
            interior,
            kernel,
        })
    }

    pub fn real_point<R: Rng>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let m = self.interior.len();
        let mut t = self.interior.clone();
        if !self.kernel.is_empty() {
            let dir: Vec<f64> = (0..m)
                .map(|k| self.kernel.iter().map(|r| r[k] * rng.random_range(-1.0..1.0)).sum())
                .collect();
            let reach = t
                .iter()
                .zip(&dir)
                .filter(|(_, &d)| d < 0.0)
                .map(|(ti, d)| ti / -d)
                .fold(f64::INFINITY, f64::min);
            let reach = if reach.is_finite() { reach } else { 1.0 };
            let s = 0.95 * reach * rng.random::<f64>();
            for (ti, d) in t.iter_mut().zip(&dir) {
                *ti = (*ti + s * d).max(0.0);
            }
        }
        let u: Vec<f64> = t
            .iter()
            .map(|ti| {
                let r = ti.sqrt();
                if rng.random::<bool>() { r } else { -r }
            })
            .collect();
        let (g, c) = quadric_system(&self.q, QuadricMode::Real);
        let w = newton_project(&g, &c, &DVector::from_vec(u), 1e-13, 50)?;
        Ok(w.iter().copied().collect())
    }

    /// A point of `N` at a random base point and random phase; the chart is
    /// centered there (`v = 0`).
    pub fn chart_point<R: Rng>(&self, rng: &mut R, tol: f64) -> Result<ChartPoint> {
        let u = self.real_point(rng)?;
        let phi: Vec<f64> = (0..self.q.num_quadrics()).map(|_| rng.random::<f64>()).collect();
        let dim = self.q.ambient_dim() - self.q.num_quadrics();
        ChartPoint::new(&self.q, &u, &vec![0.0; dim], &phi, tol)
    }
}

pub fn sample_real_point<R: Rng>(q: &QuadricConfiguration, rng: &mut R) -> Result<Vec<f64>> {
    Sampler::new(q)?.real_point(rng)
}

pub fn sample_chart_point<R: Rng>(q: &QuadricConfiguration, rng: &mut R, tol: f64) -> Result<ChartPoint> {
    Sampler::new(q)?.chart_point(rng, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(g: &[&[i64]], c: &[i64]) -> QuadricConfiguration {
        let c: Vec<_> = c.iter().map(|&x| rat(x)).collect();
        QuadricConfiguration::from_i64(g, &c, QuadricMode::Complex).unwrap()
    }

    #[test]
    fn samples_lie_on_variety() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for cfg in [
            q(&[&[1, 1, 1]], &[1]),
            q(&[&[1, 1, 1, 1], &[1, 1, -1, -1]], &[2, 0]),
            q(&[&[1, 1, 1], &[1, 1, 2]], &[2, 3]),
        ] {
            let s = Sampler::new(&cfg).unwrap();
            for _ in 0..20 {
                let p = s.chart_point(&mut rng, 1e-10).unwrap();
                assert!(cfg.membership_residual(&p.z().unwrap()).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn samples_are_seeded() {
        let cfg = q(&[&[1, 1, 1]], &[1]);
        let a = sample_real_point(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_real_point(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn no_interior_point() {
        let cfg = q(&[&[1, -1]], &[0]);
        assert!(interior_weights(&cfg).is_ok());
        let cfg = q(&[&[1, 1], &[1, -1]], &[1, 1]);
        assert!(matches!(interior_weights(&cfg), Err(Error::Precondition(_))));
    }
}

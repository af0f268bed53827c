use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::{to_complex, to_real, OMEGA_SCALE};
use crate::error::{Error, Result};
use crate::quadric_config::QuadricConfiguration;
use crate::torus_actions::torus_act;

/// A smooth function on a real vector space with its gradient.
pub trait Hamiltonian {
    fn nvars(&self) -> usize;
    fn value(&self, w: &[f64]) -> f64;
    fn gradient(&self, w: &[f64]) -> DVector<f64>;
}

/// Polynomial in real coordinates, stored as exponent vector → coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl RealPolynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn coordinate(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, 1.0);
        p
    }

    /// `|z_k|² = x_k² + y_k²` in interleaved coordinates of `ℂ^m`.
    pub fn abs_sq(m: usize, k: usize) -> Self {
        let x = Self::coordinate(2 * m, 2 * k);
        let y = Self::coordinate(2 * m, 2 * k + 1);
        x.mul(&x).add(&y.mul(&y))
    }

    /// `Re z_k`.
    pub fn re(m: usize, k: usize) -> Self {
        Self::coordinate(2 * m, 2 * k)
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: f64) {
        assert_eq!(exponents.len(), self.nvars);
        *self.terms.entry(exponents).or_insert(0.0) += c;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), *c);
        }
        p
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.terms.values_mut().for_each(|c| *c *= s);
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                p.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        p
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// `terms` monomials of total degree `1..=degree` with coefficients
    /// uniform in `[-1, 1]`.
    pub fn random<R: Rng>(rng: &mut R, nvars: usize, degree: u32, terms: usize) -> Self {
        let mut p = Self::zero(nvars);
        for _ in 0..terms {
            let deg = rng.random_range(1..=degree);
            let mut e = vec![0; nvars];
            for _ in 0..deg {
                e[rng.random_range(0..nvars)] += 1;
            }
            p.add_term(e, rng.random_range(-1.0..1.0));
        }
        p
    }
}

fn monomial(e: &[u32], w: &[f64]) -> f64 {
    e.iter().zip(w).map(|(&k, x)| x.powi(k as i32)).product()
}

impl Hamiltonian for RealPolynomial {
    fn nvars(&self) -> usize {
        self.nvars
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.terms.iter().map(|(e, c)| c * monomial(e, w)).sum()
    }

    fn gradient(&self, w: &[f64]) -> DVector<f64> {
        let mut g = DVector::zeros(self.nvars);
        for (e, c) in &self.terms {
            for i in 0..self.nvars {
                if e[i] == 0 {
                    continue;
                }
                let mut d = e.clone();
                d[i] -= 1;
                g[i] += c * f64::from(e[i]) * monomial(&d, w);
            }
        }
        g
    }
}

/// `X` with `ω(X, ·) = df` for a symplectic matrix `Ω`: `X = Ω^{−ᵗ}∇f`.
pub fn hamiltonian_field_real(omega: &DMatrix<f64>, grad: &DVector<f64>) -> Result<DVector<f64>> {
    omega
        .transpose()
        .lu()
        .solve(grad)
        .ok_or(Error::SingularGram { det: 0.0 })
}

/// Hamiltonian field of `f` on flat `ℂ^m`: `X = −i∇f/κ`.
pub fn hamiltonian_field(f: &dyn Hamiltonian, z: &[Complex64]) -> Result<Vec<Complex64>> {
    if f.nvars() != 2 * z.len() {
        return Err(Error::dim(2 * z.len(), f.nvars()));
    }
    let grad = to_complex(&f.gradient(to_real(z).as_slice()));
    Ok(grad
        .iter()
        .map(|g| Complex64::new(0.0, -1.0) * g / OMEGA_SCALE)
        .collect())
}

/// `max_j |d(μ_Γ)_j(X_f)|` at `z` by central differences, after spot-checking
/// `f(t·z) = f(z)` at `probes` random torus elements.
pub fn noether_drift<R: Rng>(
    q: &QuadricConfiguration,
    f: &dyn Hamiltonian,
    z: &[Complex64],
    rng: &mut R,
    probes: usize,
    h: f64,
) -> Result<f64> {
    let f0 = f.value(to_real(z).as_slice());
    let mut deviation: f64 = 0.0;
    for _ in 0..probes {
        let phi: Vec<f64> = (0..q.num_quadrics()).map(|_| rng.random::<f64>()).collect();
        let moved = torus_act(q, &phi, z)?;
        deviation = deviation.max((f.value(to_real(&moved).as_slice()) - f0).abs());
    }
    if deviation > 1e-9 * (1.0 + f0.abs()) {
        return Err(Error::InvarianceViolation { deviation });
    }
    let x = hamiltonian_field(f, z)?;
    let zp: Vec<Complex64> = z.iter().zip(&x).map(|(a, b)| a + b * h).collect();
    let zm: Vec<Complex64> = z.iter().zip(&x).map(|(a, b)| a - b * h).collect();
    let mp = q.moment_map(&zp)?;
    let mm = q.moment_map(&zm)?;
    Ok(mp
        .iter()
        .zip(&mm)
        .map(|(a, b)| ((a - b) / (2.0 * h)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rat;
    use crate::numerics::{omega, omega_matrix, random_tangent_z};
    use crate::quadric_config::QuadricMode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sphere3() -> QuadricConfiguration {
        QuadricConfiguration::from_i64(&[&[1, 1, 1]], &[rat(1)], QuadricMode::Complex).unwrap()
    }

    fn z0() -> Vec<Complex64> {
        vec![Complex64::new(0.6, 0.3), Complex64::new(-0.2, 0.5), Complex64::new(0.1, -0.5)]
    }

    #[test]
    fn field_of_re_z1() {
        let f = RealPolynomial::re(3, 0);
        let x = hamiltonian_field(&f, &z0()).unwrap();
        assert_eq!(x[0], Complex64::new(0.0, 0.5));
        assert!(x[1..].iter().all(|w| w.norm() == 0.0));
    }

    #[test]
    fn field_of_constant_vanishes() {
        let x = hamiltonian_field(&RealPolynomial::constant(6, 3.0), &z0()).unwrap();
        assert!(x.iter().all(|w| w.norm() == 0.0));
    }

    #[test]
    fn field_of_abs_sq_rotates() {
        let z = z0();
        let x = hamiltonian_field(&RealPolynomial::abs_sq(3, 0), &z).unwrap();
        assert!((x[0] - Complex64::i() * z[0]).norm() < 1e-15);
        assert!(x[1..].iter().all(|w| w.norm() == 0.0));
    }

    #[test]
    fn field_pairs_to_differential() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z = z0();
        for _ in 0..5 {
            let f = RealPolynomial::random(&mut rng, 6, 3, 6);
            let x = hamiltonian_field(&f, &z).unwrap();
            let v = random_tangent_z(&mut rng, 3);
            let df = f.gradient(to_real(&z).as_slice()).dot(&to_real(&v));
            assert!((omega(&x, &v) - df).abs() < 1e-12);
            let xr = hamiltonian_field_real(&omega_matrix(3), &f.gradient(to_real(&z).as_slice())).unwrap();
            assert!((xr - to_real(&x)).amax() < 1e-14);
        }
    }

    #[test]
    fn gradient_matches_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = RealPolynomial::random(&mut rng, 4, 3, 8);
        let w = [0.3, -0.7, 1.1, 0.2];
        let g = f.gradient(&w);
        for i in 0..4 {
            let mut p = w;
            p[i] += 1e-6;
            let mut m = w;
            m[i] -= 1e-6;
            assert!(((f.value(&p) - f.value(&m)) / 2e-6 - g[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn noether_examples() {
        let q = sphere3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let total = (0..3).fold(RealPolynomial::zero(6), |acc, k| acc.add(&RealPolynomial::abs_sq(3, k)));
        assert!(noether_drift(&q, &total, &z0(), &mut rng, 8, 1e-4).unwrap() < 1e-8);
        assert_eq!(noether_drift(&q, &RealPolynomial::constant(6, 1.0), &z0(), &mut rng, 8, 1e-4).unwrap(), 0.0);
        assert!(matches!(
            noether_drift(&q, &RealPolynomial::re(3, 0), &z0(), &mut rng, 8, 1e-4),
            Err(Error::InvarianceViolation { .. })
        ));
    }
}

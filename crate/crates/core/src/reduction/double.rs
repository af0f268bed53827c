use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact_linalg::{rational_nullspace, NullspaceSide};
use crate::numerics::{
    omega_matrix, to_real, z_tangent_frame, ChartPoint, GraphChart, NChart, SubmanifoldChart,
};
use crate::quadric_config::{NondegeneracyReport, QuadricConfiguration, QuadricMode};
use crate::torus_actions::{freeness_check, orbit_generators, FreenessVerdict};

/// Which of the three systems a check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Gamma,
    Delta,
    Stacked,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Gamma => "Γ",
            Part::Delta => "Δ",
            Part::Stacked => "stacked",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DoubleWitness {
    /// `λ` with `λᵗ (Γ; Δ) = 0`.
    DependentRows(Vec<BigInt>),
    Degenerate { part: Part, report: NondegeneracyReport },
    Unbounded(Part),
    NotFree { part: Part, support: Vec<usize> },
}

impl fmt::Display for DoubleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DoubleWitness::DependentRows(l) => {
                let l: Vec<String> = l.iter().map(ToString::to_string).collect();
                write!(f, "stacked rows are dependent: ({}) annihilates them", l.join(","))
            }
            DoubleWitness::Degenerate { part, report } => write!(
                f,
                "{part} is degenerate (a: {}, b: {}, c: {}, small support {:?})",
                report.cond_a, report.cond_b, report.cond_c, report.small_support
            ),
            DoubleWitness::Unbounded(part) => write!(f, "{part} is unbounded"),
            DoubleWitness::NotFree { part, support } => {
                let s: Vec<String> = support.iter().map(|k| (k + 1).to_string()).collect();
                write!(f, "{part} action not free on support {{{}}}", s.join(","))
            }
        }
    }
}

/// Outcome of every check on `Γ`, `Δ` and the stacked system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleVerdict {
    pub stacked_rank_witness: Option<Vec<BigInt>>,
    pub nondegeneracy: Vec<(Part, NondegeneracyReport)>,
    pub bounded: Vec<(Part, bool)>,
    pub freeness: Vec<(Part, FreenessVerdict)>,
}

impl DoubleVerdict {
    /// Failures that invalidate the construction. Freeness of `Δ` alone is
    /// reported but not required, and empty systems need no bound.
    pub fn failure(&self) -> Option<DoubleWitness> {
        if let Some(l) = &self.stacked_rank_witness {
            return Some(DoubleWitness::DependentRows(l.clone()));
        }
        if let Some((part, report)) = self.nondegeneracy.iter().find(|(_, r)| !r.all()) {
            return Some(DoubleWitness::Degenerate {
                part: *part,
                report: report.clone(),
            });
        }
        if let Some((part, _)) = self.bounded.iter().find(|(_, b)| !b) {
            return Some(DoubleWitness::Unbounded(*part));
        }
        self.freeness
            .iter()
            .find(|(part, v)| *part != Part::Delta && !v.free)
            .map(|(part, v)| DoubleWitness::NotFree {
                part: *part,
                support: v.witness.clone().unwrap_or_default(),
            })
    }

    /// Verdict of the checks on the stacked system alone; unchanged when
    /// `Γ` and `Δ` are swapped.
    pub fn stacked_valid(&self) -> bool {
        self.stacked_rank_witness.is_none()
            && self
                .nondegeneracy
                .iter()
                .filter(|(p, _)| *p == Part::Stacked)
                .all(|(_, r)| r.all())
            && self.bounded.iter().filter(|(p, _)| *p == Part::Stacked).all(|(_, b)| *b)
            && self.freeness.iter().filter(|(p, _)| *p == Part::Stacked).all(|(_, v)| v.free)
    }
}

/// `(Γ, c)` and `(Δ, d)` on the same `ℂ^m`, with the stacked system
/// defining `Z_Γ ∩ Z_Δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleConfiguration {
    gamma_cfg: QuadricConfiguration,
    delta_cfg: QuadricConfiguration,
    stacked: QuadricConfiguration,
    verdict: DoubleVerdict,
}

fn checks(part: Part, q: &QuadricConfiguration, v: &mut DoubleVerdict) -> Result<()> {
    let report = q.nondegeneracy_check();
    let ok = report.all();
    v.nondegeneracy.push((part, report));
    if q.num_quadrics() > 0 {
        v.bounded.push((part, q.boundedness_check()));
    }
    if ok {
        v.freeness.push((part, freeness_check(q)?));
    }
    Ok(())
}

/// Runs all checks without refusing anything.
pub fn check_double(gamma: &QuadricConfiguration, delta: &QuadricConfiguration) -> Result<DoubleVerdict> {
    if gamma.ambient_dim() != delta.ambient_dim() {
        return Err(Error::dim(gamma.ambient_dim(), delta.ambient_dim()));
    }
    let mut v = DoubleVerdict {
        stacked_rank_witness: None,
        nondegeneracy: Vec::new(),
        bounded: Vec::new(),
        freeness: Vec::new(),
    };
    checks(Part::Gamma, gamma, &mut v)?;
    checks(Part::Delta, delta, &mut v)?;
    let rows = gamma.gamma().stack(delta.gamma())?;
    if rows.rank() < rows.rows() {
        let left = rational_nullspace(&rows.to_rational(), NullspaceSide::Left);
        v.stacked_rank_witness = Some(left.row(0).to_vec());
    } else {
        checks(Part::Stacked, &gamma.stacked_with(delta)?, &mut v)?;
    }
    Ok(v)
}

/// Builds the double configuration, refusing it with the first failing
/// witness.
pub fn stack_double(gamma: &QuadricConfiguration, delta: &QuadricConfiguration) -> Result<DoubleConfiguration> {
    let verdict = check_double(gamma, delta)?;
    if let Some(w) = verdict.failure() {
        return Err(Error::InvalidDouble(w.to_string()));
    }
    let gamma_cfg = gamma.with_mode(QuadricMode::Complex);
    let delta_cfg = delta.with_mode(QuadricMode::Complex);
    let stacked = gamma_cfg.stacked_with(&delta_cfg)?;
    Ok(DoubleConfiguration {
        gamma_cfg,
        delta_cfg,
        stacked,
        verdict,
    })
}

impl DoubleConfiguration {
    pub fn gamma_cfg(&self) -> &QuadricConfiguration {
        &self.gamma_cfg
    }

    pub fn delta_cfg(&self) -> &QuadricConfiguration {
        &self.delta_cfg
    }

    pub fn stacked(&self) -> &QuadricConfiguration {
        &self.stacked
    }

    pub fn verdict(&self) -> &DoubleVerdict {
        &self.verdict
    }

    /// `dim Ñ = m − |Γ| − |Δ| + |Δ|`, half of `dim V_Γ`.
    pub fn ntilde_dim(&self) -> usize {
        self.stacked.ambient_dim() - self.gamma_cfg.num_quadrics()
    }

    /// `μ_Δ` at a lifted point.
    pub fn delta_moment(&self, z: &[Complex64]) -> Result<Vec<f64>> {
        self.delta_cfg.moment_map(z)
    }

    /// Chart `(v, φ_Δ) ↦ e^{2πi⟨δ,φ_Δ⟩} ⊙ u(v)` of the lift of `Ñ` to
    /// `Z_Γ`, with `u(v) ∈ R_Γ ∩ R_Δ` centered at `base`.
    pub fn lift_chart(&self, base: &[f64], tol: f64) -> Result<NChart> {
        let real = GraphChart::for_config(&self.stacked, base, tol)?;
        NChart::new(Box::new(real), self.delta_cfg.gamma_f64())
    }
}

/// A point of the lift of `Ñ`.
pub fn ntilde_chart(d: &DoubleConfiguration, base: &[f64], v: &[f64], phi_delta: &[f64], tol: f64) -> Result<ChartPoint> {
    ChartPoint::with_chart(d.lift_chart(base, tol)?, v, phi_delta)
}

/// Orthonormal basis of the part of `span(tangent)` orthogonal to the
/// `T_Γ` orbit at `z`.
pub fn horizontal_frame(gamma: &QuadricConfiguration, z: &[Complex64], tangent: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let gens = orbit_generators(gamma, z)?;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let push = |v: DVector<f64>, basis: &mut Vec<DVector<f64>>| -> bool {
        let scale = v.norm();
        let mut w = v;
        for _ in 0..2 {
            for b in basis.iter() {
                w -= b * b.dot(&w);
            }
        }
        let n = w.norm();
        if scale > 0.0 && n > 1e-9 * scale {
            basis.push(w / n);
            true
        } else {
            false
        }
    };
    for g in &gens {
        if !push(to_real(g), &mut basis) {
            return Err(Error::SingularGram { det: 0.0 });
        }
    }
    let k = basis.len();
    for col in tangent.column_iter() {
        push(col.into_owned(), &mut basis);
    }
    if basis.len() == k {
        return Ok(DMatrix::zeros(2 * z.len(), 0));
    }
    Ok(DMatrix::from_columns(&basis[k..]))
}

/// `max |ω(h_i, h_j)|` over an orthonormal horizontal frame.
pub fn horizontal_lagrangian_residual(
    gamma: &QuadricConfiguration,
    z: &[Complex64],
    tangent: &DMatrix<f64>,
) -> Result<f64> {
    let h = horizontal_frame(gamma, z, tangent)?;
    if h.ncols() == 0 {
        return Ok(0.0);
    }
    Ok((h.transpose() * omega_matrix(z.len()) * &h).amax())
}

/// Reduced-form Lagrangian residual of `Ñ` in `V_Γ` at a lifted chart
/// point.
pub fn ntilde_lagrangian_residual(d: &DoubleConfiguration, p: &ChartPoint) -> Result<f64> {
    let x = p.x();
    let z = p.chart.point_complex(&x)?;
    let j = p.chart.jacobian(&x)?;
    let h = horizontal_frame(&d.gamma_cfg, &z, &j)?;
    if h.ncols() != d.ntilde_dim() {
        return Err(Error::RankDeficient {
            rank: h.ncols(),
            expected: d.ntilde_dim(),
        });
    }
    horizontal_lagrangian_residual(&d.gamma_cfg, &z, &j)
}

/// The same residual for all of `T(Z_Γ ∩ Z_Δ)`; not Lagrangian when `Δ` is
/// nonempty.
pub fn intersection_control_residual(d: &DoubleConfiguration, z: &[Complex64]) -> Result<f64> {
    let frame = z_tangent_frame(&d.stacked, z)?;
    horizontal_lagrangian_residual(&d.gamma_cfg, z, &frame.basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rat;
    use crate::numerics::Sampler;
    use crate::torus_actions::torus_act;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(g: &[&[i64]], c: &[i64]) -> QuadricConfiguration {
        let c: Vec<_> = c.iter().map(|&x| rat(x)).collect();
        QuadricConfiguration::from_i64(g, &c, QuadricMode::Complex).unwrap()
    }

    fn empty(m: usize) -> QuadricConfiguration {
        QuadricConfiguration::new(
            crate::exact_linalg::IntegerMatrix::from_rows_with_cols(vec![], m).unwrap(),
            vec![],
            QuadricMode::Complex,
        )
        .unwrap()
    }

    fn cp2_torus() -> DoubleConfiguration {
        stack_double(&q(&[&[1, 1, 1]], &[2]), &q(&[&[1, 1, 2]], &[3])).unwrap()
    }

    #[test]
    fn torus_instance_is_valid() {
        let d = cp2_torus();
        let v = d.verdict();
        assert!(v.failure().is_none());
        // Δ alone is not free: |z_3|² = 3/2 has stabilizer ±1
        let delta_free = &v.freeness.iter().find(|(p, _)| *p == Part::Delta).unwrap().1;
        assert!(!delta_free.free);
        assert_eq!(delta_free.witness, Some(vec![2]));
        assert_eq!(d.ntilde_dim(), 2);
    }

    #[test]
    fn empty_delta_is_valid() {
        let d = stack_double(&q(&[&[1, 1, 1]], &[1]), &empty(3)).unwrap();
        assert_eq!(d.stacked(), &q(&[&[1, 1, 1]], &[1]));
    }

    #[test]
    fn parallel_rows_rejected() {
        let g = q(&[&[1, 1, 1]], &[2]);
        let v = check_double(&g, &q(&[&[1, 1, 1]], &[3])).unwrap();
        match v.failure() {
            Some(DoubleWitness::DependentRows(l)) => {
                assert_eq!(l.len(), 2);
                assert_eq!(&l[0] + &l[1], BigInt::from(0));
            }
            other => panic!("expected dependent rows, got {other:?}"),
        }
        assert!(matches!(stack_double(&g, &q(&[&[2, 2, 2]], &[3])), Err(Error::InvalidDouble(_))));
    }

    #[test]
    fn swap_symmetry() {
        let a = q(&[&[1, 1, 1]], &[2]);
        let b = q(&[&[1, 1, 2]], &[3]);
        let ab = check_double(&a, &b).unwrap();
        let ba = check_double(&b, &a).unwrap();
        assert_eq!(ab.stacked_valid(), ba.stacked_valid());
        assert!(ab.stacked_valid());
    }

    #[test]
    fn lift_chart_examples() {
        let d = cp2_torus();
        let p = ntilde_chart(&d, &[1.0, 0.0, 1.0], &[0.0], &[0.0], 1e-12).unwrap();
        let z = p.z().unwrap();
        assert_eq!(z, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let p = ntilde_chart(&d, &[1.0, 0.0, 1.0], &[0.0], &[0.5], 1e-12).unwrap();
        let z = p.z().unwrap();
        assert!((z[0] + 1.0).norm() < 1e-15);
        assert!((z[2] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn lift_is_horizontally_lagrangian() {
        let d = cp2_torus();
        let s = Sampler::new(d.stacked()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let u = s.real_point(&mut rng).unwrap();
            let v = [rng.random_range(-0.1..0.1)];
            let phi = [rng.random::<f64>()];
            let p = ntilde_chart(&d, &u, &v, &phi, 1e-10).unwrap();
            let z = p.z().unwrap();
            assert!(d.stacked().membership_residual(&z).unwrap() < 1e-10);
            let r = ntilde_lagrangian_residual(&d, &p).unwrap();
            assert!(r < 1e-8, "{r}");
            // moving along T_Γ changes nothing
            let t = [rng.random::<f64>()];
            let moved = torus_act(d.gamma_cfg(), &t, &z).unwrap();
            let e = torus_act(d.gamma_cfg(), &t, &[Complex64::new(1.0, 0.0); 3]).unwrap();
            let j = p.chart.jacobian(&p.x()).unwrap();
            let mut jm = j.clone();
            for mut col in jm.column_iter_mut() {
                let c: Vec<Complex64> = col.as_slice().chunks(2).map(|w| Complex64::new(w[0], w[1])).collect();
                let moved_col: Vec<Complex64> = c.iter().zip(&e).map(|(a, b)| a * b).collect();
                col.copy_from(&to_real(&moved_col));
            }
            let r2 = horizontal_lagrangian_residual(d.gamma_cfg(), &moved, &jm).unwrap();
            assert!((r - r2).abs() < 1e-10);
            assert!(intersection_control_residual(&d, &z).unwrap() > 0.1);
        }
    }

    #[test]
    fn real_locus_for_empty_delta() {
        let g = q(&[&[1, 1, 1]], &[1]);
        let d = stack_double(&g, &empty(3)).unwrap();
        let s = Sampler::new(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let u = s.real_point(&mut rng).unwrap();
            let p = ntilde_chart(&d, &u, &[0.05, -0.02], &[], 1e-10).unwrap();
            assert!(ntilde_lagrangian_residual(&d, &p).unwrap() < 1e-10);
        }
    }
}

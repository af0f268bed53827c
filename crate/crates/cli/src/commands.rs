use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadtoric::exact_linalg::{IntegerMatrix, Rational};
use quadtoric::numerics::{
    first_variation_companion, hamiltonian_stationarity, hminimality_residual, lagrangian_residual,
    minimality_residual_in_z, noether_drift, normal_projection, patch_volume_derivative, tangent_frame, Axis,
    ChartPoint, FlatSpace, Hamiltonian, Patch, RealPolynomial, Sampler, SubmanifoldChart, Tolerances,
};
use quadtoric::polytope::{DelzantVerdict, SimplicityVerdict, Vertex};
use quadtoric::quadric_config::QuadricConfiguration;
use quadtoric::reduction::{
    check_double, classify_n, cp_chart_verify, ntilde_chart, ntilde_lagrangian_residual, stack_double,
    CpVerifyOptions, DoubleConfiguration, Instance,
};
use quadtoric::report::{CheckRecord, VerificationReport};
use quadtoric::torus_actions::freeness_check;
use quadtoric::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Gale,
    CheckSimple,
    CheckDelzant,
    CheckFree,
    CheckNondeg,
    Classify,
    VerifyLagrangian,
    VerifyMinimal,
    VerifyHminimal,
    VerifyNoether,
    VerifyVariation,
    VerifyNtilde,
    ReportAll,
}

impl Command {
    pub const ALL: [Command; 13] = [
        Command::Gale,
        Command::CheckSimple,
        Command::CheckDelzant,
        Command::CheckFree,
        Command::CheckNondeg,
        Command::Classify,
        Command::VerifyLagrangian,
        Command::VerifyMinimal,
        Command::VerifyHminimal,
        Command::VerifyNoether,
        Command::VerifyVariation,
        Command::VerifyNtilde,
        Command::ReportAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Gale => "gale",
            Command::CheckSimple => "check-simple",
            Command::CheckDelzant => "check-delzant",
            Command::CheckFree => "check-free",
            Command::CheckNondeg => "check-nondeg",
            Command::Classify => "classify",
            Command::VerifyLagrangian => "verify-lagrangian",
            Command::VerifyMinimal => "verify-minimal",
            Command::VerifyHminimal => "verify-hminimal",
            Command::VerifyNoether => "verify-noether",
            Command::VerifyVariation => "verify-variation",
            Command::VerifyNtilde => "verify-ntilde",
            Command::ReportAll => "report-all",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

/// Resolved numeric settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    /// Sample points per pointwise check.
    pub samples: usize,
    /// Finite-difference step for curvature.
    pub step: f64,
    pub tol: Tolerances,
    /// The `l` of `N_l(p,q)`.
    pub l: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100,
            step: 1e-4,
            tol: Tolerances::default(),
            l: None,
        }
    }
}

impl Settings {
    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "membership" => &mut self.tol.membership,
            "frame" => &mut self.tol.frame,
            "lagrangian" => &mut self.tol.lagrangian,
            "curvature" => &mut self.tol.curvature,
            "variation" => &mut self.tol.variation,
            "noether" => &mut self.tol.noether,
            _ => return Err(Error::Precondition(format!("unknown tolerance '{name}'"))),
        };
        *slot = value;
        Ok(())
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

fn fmt_row(r: &[num_bigint::BigInt]) -> String {
    let parts: Vec<String> = r.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn fmt_rhs(v: &[Rational]) -> String {
    match v {
        [x] => x.to_string(),
        _ => format!("({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
    }
}

fn fmt_matrix(m: &IntegerMatrix) -> String {
    if m.rows() == 0 {
        return "()".into();
    }
    (0..m.rows()).map(|i| fmt_row(m.row(i))).collect::<Vec<_>>().join(",")
}

fn fmt_vertex(v: &Vertex) -> String {
    let p: Vec<String> = v.point.iter().map(ToString::to_string).collect();
    let a: Vec<String> = v.active.iter().map(|k| (k + 1).to_string()).collect();
    format!("({}) on facets {{{}}}", p.join(","), a.join(","))
}

fn fmt_support(s: &[usize]) -> String {
    let s: Vec<String> = s.iter().map(|k| (k + 1).to_string()).collect();
    format!("{{{}}}", s.join(","))
}

/// `Z` is a round sphere when there is one quadric with equal coefficients.
pub fn sphere_description(q: &QuadricConfiguration) -> Option<String> {
    if q.num_quadrics() != 1 {
        return None;
    }
    let row = q.gamma().row(0);
    let g = &row[0];
    if row.iter().any(|x| x != g) || g <= &num_bigint::BigInt::from(0) {
        return None;
    }
    let r2 = &q.c()[0] / Rational::from_integer(g.clone());
    Some(format!("Z is the sphere S^{} with |z|^2 = {r2}", 2 * q.ambient_dim() - 1))
}

fn gale(inst: &Instance) -> Result<VerificationReport> {
    let mut r = VerificationReport::new();
    match inst {
        Instance::Polytope(p) => {
            let q = QuadricConfiguration::gale_dual(p);
            r.note(format!("Γ = {}", fmt_matrix(q.gamma())));
            r.note(format!("c = {}", fmt_rhs(q.c())));
            let prod = q.gamma().mul(&p.a_matrix().transpose())?;
            r.push(CheckRecord::exact("gale.relations", prod.is_zero()));
            let gb = q.gamma().to_rational().mul_vec(p.offsets())?;
            r.push(CheckRecord::exact("gale.offsets", gb == q.c()));
            if let Some(s) = sphere_description(&q) {
                r.note(s);
            }
        }
        Instance::Quadrics { q, .. } => {
            r.note(format!("Γ = {}", fmt_matrix(q.gamma())));
            r.note(format!("c = {}", fmt_rhs(q.c())));
            if let Some(s) = sphere_description(q) {
                r.note(s);
            }
            r.push(CheckRecord::exact("gale.full_rank", q.gamma().rank() == q.num_quadrics()));
        }
        Instance::Double { gamma, delta } => {
            r.note(format!("Γ = {}", fmt_matrix(gamma.gamma())));
            r.note(format!("c = {}", fmt_rhs(gamma.c())));
            r.note(format!("Δ = {}", fmt_matrix(delta.gamma())));
            r.note(format!("d = {}", fmt_rhs(delta.c())));
            if let Some(s) = sphere_description(gamma) {
                r.note(s);
            }
            r.push(CheckRecord::exact("gale.full_rank", gamma.gamma().rank() == gamma.num_quadrics()));
        }
    }
    Ok(r)
}

fn polytope_of(inst: &Instance, cmd: Command) -> Result<&quadtoric::polytope::PolytopePresentation> {
    match inst {
        Instance::Polytope(p) => Ok(p),
        _ => Err(Error::Precondition(format!("{cmd} needs a polytope instance"))),
    }
}

fn check_simple(inst: &Instance) -> Result<VerificationReport> {
    let p = polytope_of(inst, Command::CheckSimple)?;
    let mut r = VerificationReport::new();
    let v = p.is_simple()?;
    if let SimplicityVerdict::NotSimple { vertex } = &v {
        r.note(format!("witness vertex {}", fmt_vertex(vertex)));
    }
    r.push(CheckRecord::exact("simple", v.holds()));
    Ok(r)
}

fn check_delzant(inst: &Instance) -> Result<VerificationReport> {
    let p = polytope_of(inst, Command::CheckDelzant)?;
    let mut r = VerificationReport::new();
    let holds = match p.is_delzant() {
        Ok(DelzantVerdict::Delzant) => true,
        Ok(DelzantVerdict::NotDelzant { vertex, determinant }) => {
            r.note(format!("witness vertex {} with determinant {determinant}", fmt_vertex(&vertex)));
            false
        }
        Err(Error::NotSimple { vertex, active }) => {
            r.note(format!("not simple: vertex ({}) lies on {active} facets", vertex.join(",")));
            false
        }
        Err(e) => return Err(e),
    };
    r.push(CheckRecord::exact("delzant", holds));
    Ok(r)
}

fn check_free(inst: &Instance) -> Result<VerificationReport> {
    let q = inst.quadrics()?;
    let v = freeness_check(&q)?;
    let mut r = VerificationReport::new();
    if let Some(w) = &v.witness {
        r.note(format!("witness support {}", fmt_support(w)));
    }
    r.push(CheckRecord::exact("free", v.free));
    Ok(r)
}

fn check_nondeg(inst: &Instance) -> Result<VerificationReport> {
    let mut r = VerificationReport::new();
    if let Instance::Double { gamma, delta } = inst {
        let v = check_double(gamma, delta)?;
        for (part, rep) in &v.nondegeneracy {
            let tag = part_tag(*part);
            r.push(CheckRecord::exact(format!("{tag}.cone"), rep.cond_a));
            r.push(CheckRecord::exact(format!("{tag}.support"), rep.cond_b));
            r.push(CheckRecord::exact(format!("{tag}.lattice"), rep.cond_c));
        }
        for (part, b) in &v.bounded {
            r.push(CheckRecord::exact(format!("{}.bounded", part_tag(*part)), *b));
        }
        if let Some(w) = &v.stacked_rank_witness {
            r.note(format!("stacked rows dependent: {}", fmt_row(w)));
        }
        r.push(CheckRecord::exact("stacked.rank", v.stacked_rank_witness.is_none()));
        for (part, f) in &v.freeness {
            if let Some(w) = &f.witness {
                r.note(format!("{} action not free on support {}", part_tag(*part), fmt_support(w)));
            }
        }
        return Ok(r);
    }
    let q = inst.quadrics()?;
    let rep = q.nondegeneracy_check();
    if let Some(s) = &rep.small_support {
        r.note(format!("c lies in the cone of {}", fmt_support(s)));
    }
    r.push(CheckRecord::exact("nondeg.cone", rep.cond_a));
    r.push(CheckRecord::exact("nondeg.support", rep.cond_b));
    r.push(CheckRecord::exact("nondeg.lattice", rep.cond_c));
    r.push(CheckRecord::exact("bounded", q.boundedness_check()));
    Ok(r)
}

fn part_tag(p: quadtoric::reduction::Part) -> &'static str {
    match p {
        quadtoric::reduction::Part::Gamma => "gamma",
        quadtoric::reduction::Part::Delta => "delta",
        quadtoric::reduction::Part::Stacked => "stacked",
    }
}

fn instance_l(inst: &Instance, s: &Settings) -> Option<usize> {
    match inst {
        Instance::Quadrics { l, .. } => s.l.or(*l),
        _ => s.l,
    }
}

fn classify(inst: &Instance, s: &Settings) -> Result<VerificationReport> {
    let q = inst.quadrics()?;
    let t = classify_n(&q, instance_l(inst, s))?;
    let mut r = VerificationReport::new();
    r.note(format!("N ≅ {}", t.name));
    for f in &t.facts {
        r.note(f.to_string());
    }
    r.push(CheckRecord::exact("classify", true));
    Ok(r)
}

/// Seeded sample points of `N` for the configured system.
fn sample_points(q: &QuadricConfiguration, s: &Settings, salt: u64, count: usize) -> Result<Vec<ChartPoint>> {
    let sampler = Sampler::new(q)?;
    let mut rng = s.rng(salt);
    (0..count).map(|_| sampler.chart_point(&mut rng, 1e-10)).collect()
}

fn verify_lagrangian(inst: &Instance, s: &Settings) -> Result<VerificationReport> {
    let q = inst.quadrics()?;
    let mut worst = [0.0f64; 3];
    for p in sample_points(&q, s, 1, s.samples)? {
        let frame = tangent_frame(&p.chart, &p.x())?;
        worst[0] = worst[0].max(lagrangian_residual(&frame));
        worst[1] = worst[1].max(frame.orthonormality_defect());
        worst[2] = worst[2].max(q.membership_residual(&p.z()?)?);
    }
    let mut r = VerificationReport::new();
    r.push(CheckRecord::new("lagrangian", worst[0], s.tol.lagrangian, s.samples, s.seed));
    r.push(CheckRecord::new("frame.orthonormality", worst[1], s.tol.frame, s.samples, s.seed));
    r.push(CheckRecord::new("membership", worst[2], s.tol.membership, s.samples, s.seed));
    Ok(r)
}

fn verify_minimal(inst: &Instance, s: &Settings) -> Result<VerificationReport> {
    let q = inst.quadrics()?;
    let mut worst: f64 = 0.0;
    for p in sample_points(&q, s, 2, s.samples)? {
        worst = worst.max(minimality_residual_in_z(&q, &p.chart, &p.x(), s.step)?);
    }
    let mut r = VerificationReport::new();
    r.push(CheckRecord::new("minimal_in_z", worst, s.tol.curvature, s.samples, s.seed));
    Ok(r)
}

const HMINIMAL_SAMPLES: usize = 20;

fn verify_hminimal(inst: &Instance, s: &Settings) -> Result<VerificationReport> {
    let q = inst.quadrics()?;
    let n = s.samples.min(HMINIMAL_SAMPLES);
    let mut worst: f64 = 0.0;
    for p in sample_points(&q, s, 3, n)? {
        worst = worst.max(hminimality_residual(&p.chart, &p.x(), s.step)?);
    }
    let mut r = VerificationReport::new();
    r.push(CheckRecord::new("hminimal", worst, s.tol.curvature, n, s.seed));
    Ok(r)
}

/// `Σ|z_k|²`, `|z_1|²|z_m|²` and a random polynomial in the `|z_k|²`.
pub fn invariant_hamiltonians<R: Rng>(m: usize, rng: &mut R) -> Vec<RealPolynomial> {
    let abs = |k| RealPolynomial::abs_sq(m, k);
    let mut total = RealPolynomial::zero(2 * m);
    for k in 0..m {
        total = total.add(&abs(k));
    }
    let mut random = RealPolynomial::constant(2 * m, rng.random_range(-1.0..1.0));
    for _ in 0..3 {
        let mut term = RealPolynomial::constant(2 * m, rng.random_range(-1.0..1.0));
        for _ in 0..rng.random_range(1..=2) {
            term = term.mul(&abs(rng.random_range(0..m)));
        }
        random = random.add(&term);
    }
    vec![total, abs(0).mul(&abs(m - 1)), random]
}

const NOETHER_SAMPLES: usize = 20;

fn verify_noether(inst: &Instance, s: &Settings) -> Result<VerificationReport> {
    let q = inst.quadrics()?;
    let m = q.ambient_dim();
    let mut rng = s.rng(4);
    let fs = invariant_hamiltonians(m, &mut rng);
    let n = s.samples.min(NOETHER_SAMPLES);
    let mut worst: f64 = 0.0;
    let points = sample_points(&q, s, 5, n)?;
    for p in &points {
        let z = p.z()?;
        for f in &fs {
            worst = worst.max(noether_drift(&q, f, &z, &mut rng, 4, 1e-6)?);
        }
    }
    let mut r = VerificationReport::new();
    r.push(CheckRecord::new("noether.drift", worst, s.tol.noether, n * fs.len(), s.seed));
    let z = points[0].z()?;
    let rejected = matches!(
        noether_drift(&q, &RealPolynomial::re(m, 0), &z, &mut rng, 8, 1e-6),
        Err(Error::InvarianceViolation { .. })
    );
    r.push(CheckRecord::exact("noether.rejects_noninvariant", rejected));
    Ok(r)
}

const PHASE_NODES: usize = 8;

/// Gauss nodes per real axis of a variation patch.
fn patch_nodes(real_dim: usize) -> usize {
    match real_dim {
        0 | 1 => 40,
        2 => 24,
        _ => 12,
    }
}

/// Above this many real axes the tangential part of a test field is
/// dropped: its integral vanishes only in the limit, and the coarse grid
/// leaves a residue that swamps the comparison.
const FULL_FIELD_MAX_REAL_DIM: usize = 2;

/// Bump in the real chart coordinates around `p`, full circles in the
/// phases.
pub fn variation_patch(p: &ChartPoint) -> Patch {
    let nodes = patch_nodes(p.v.len());
    let mut axes: Vec<Axis> = p
        .v
        .iter()
        .map(|&c| Axis::Bump { center: c, half_width: 0.15, n: nodes })
        .collect();
    axes.extend(p.phi.iter().map(|_| Axis::Periodic { lo: 0.0, hi: 1.0, n: PHASE_NODES }));
    Patch::new(axes)
}

const BUMP_FIELDS: usize = 5;
const HAMILTONIANS: usize = 5;

fn verify_variation(inst: &Instance, s: &Settings) -> Result<VerificationReport> {
    let q = inst.quadrics()?;
    let p = sample_points(&q, s, 6, 1)?.remove(0);
    let mut patch = variation_patch(&p);
    patch.seed = s.seed;
    let geom = FlatSpace { m: q.ambient_dim() };
    let dim = 2 * q.ambient_dim();
    let mut rng = s.rng(7);

    let normal_only = p.v.len() > FULL_FIELD_MAX_REAL_DIM;
    let mut mismatch: f64 = 0.0;
    for _ in 0..BUMP_FIELDS {
        // affine, so that the field does not average out over the orbits
        let y = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let b = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let field = |x: &[f64]| {
            let v = &y + &b * p.chart.point(x)?;
            let v = if normal_only { normal_projection(&p.chart.jacobian(x)?, &v)? } else { v };
            Ok(v * patch.weight(x))
        };
        let v = patch_volume_derivative(&p.chart, &geom, &patch, &field, 1e-4)?;
        let c = first_variation_companion(&p.chart, &patch, &field, s.step)?;
        mismatch = mismatch.max((v.dvol_dt - c).abs() / v.dvol_dt.abs().max(c.abs()));
    }

    let dirs: Vec<DVector<f64>> = (0..3)
        .map(|_| DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0)))
        .collect();
    let fs: Vec<RealPolynomial> = (0..HAMILTONIANS).map(|_| RealPolynomial::random(&mut rng, dim, 3, 6)).collect();
    let refs: Vec<&dyn Hamiltonian> = fs.iter().map(|f| f as &dyn Hamiltonian).collect();
    let reps = hamiltonian_stationarity(&p.chart, &geom, &patch, &refs, &dirs, 1e-4)?;
    let ratio = reps.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let used_l1 = reps.iter().any(|s| s.used_l1);
    let mut r = VerificationReport::new();
    if normal_only {
        r.note("first variation compared on the normal parts of the test fields");
    }
    if used_l1 {
        r.note("normal variations do not move the volume; ratios are relative to ∫|div X|");
    }
    r.push(CheckRecord::new("variation.first_formula", mismatch, s.tol.variation, BUMP_FIELDS, s.seed));
    r.push(CheckRecord::new("variation.hamiltonian", ratio, s.tol.variation, HAMILTONIANS, s.seed));
    Ok(r)
}

fn double_of(inst: &Instance) -> Result<DoubleConfiguration> {
    match inst {
        Instance::Double { gamma, delta } => stack_double(gamma, delta),
        _ => Err(Error::Precondition("verify-ntilde needs a double instance".into())),
    }
}

/// Whether `V_Γ` is a projective space handled by the affine-chart path.
fn projective_gamma(d: &DoubleConfiguration) -> bool {
    let g = d.gamma_cfg();
    g.num_quadrics() == 1 && {
        let row = g.gamma().row(0);
        row.iter().all(|x| x == &row[0])
    }
}

fn verify_ntilde(inst: &Instance, s: &Settings) -> Result<VerificationReport> {
    let d = double_of(inst)?;
    let sampler = Sampler::new(d.stacked())?;
    let mut rng = s.rng(8);
    let k = d.delta_cfg().num_quadrics();
    let real_dim = d.ntilde_dim() - k;
    let (mut lag, mut mem) = (0.0f64, 0.0f64);
    for _ in 0..s.samples {
        let u = sampler.real_point(&mut rng)?;
        let phi: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let p = ntilde_chart(&d, &u, &vec![0.0; real_dim], &phi, 1e-10)?;
        let z: Vec<Complex64> = p.z()?;
        mem = mem.max(d.stacked().membership_residual(&z)?);
        lag = lag.max(ntilde_lagrangian_residual(&d, &p)?);
    }
    let mut r = VerificationReport::new();
    r.push(CheckRecord::new("ntilde.membership", mem, s.tol.membership, s.samples, s.seed));
    r.push(CheckRecord::new("ntilde.lagrangian", lag, s.tol.lagrangian, s.samples, s.seed));
    if projective_gamma(&d) {
        let opts = CpVerifyOptions {
            seed: s.seed,
            lagrangian_samples: s.samples,
            tol_lagrangian: s.tol.lagrangian,
            tol_variation: s.tol.variation,
            ..Default::default()
        };
        r.extend(cp_chart_verify(&d, &opts)?.prefixed("ntilde"));
    }
    Ok(r)
}

/// Commands that make sense for the instance, in report order.
pub fn applicable(inst: &Instance, s: &Settings) -> Vec<Command> {
    let mut out = vec![Command::Gale];
    if matches!(inst, Instance::Polytope(_)) {
        out.extend([Command::CheckSimple, Command::CheckDelzant]);
        let simple = match inst {
            Instance::Polytope(p) => p.is_simple().map(|v| v.holds()).unwrap_or(false),
            _ => true,
        };
        if !simple {
            return out;
        }
    }
    out.extend([Command::CheckFree, Command::CheckNondeg]);
    let Ok(q) = inst.quadrics() else { return out };
    if q.num_quadrics() == 1 || (q.num_quadrics() == 2 && instance_l(inst, s).is_some()) {
        out.push(Command::Classify);
    }
    out.extend([
        Command::VerifyLagrangian,
        Command::VerifyMinimal,
        Command::VerifyHminimal,
        Command::VerifyNoether,
        Command::VerifyVariation,
    ]);
    if matches!(inst, Instance::Double { .. }) {
        out.push(Command::VerifyNtilde);
    }
    out
}

pub fn run_command(cmd: Command, inst: &Instance, s: &Settings) -> Result<VerificationReport> {
    match cmd {
        Command::Gale => gale(inst),
        Command::CheckSimple => check_simple(inst),
        Command::CheckDelzant => check_delzant(inst),
        Command::CheckFree => check_free(inst),
        Command::CheckNondeg => check_nondeg(inst),
        Command::Classify => classify(inst, s),
        Command::VerifyLagrangian => verify_lagrangian(inst, s),
        Command::VerifyMinimal => verify_minimal(inst, s),
        Command::VerifyHminimal => verify_hminimal(inst, s),
        Command::VerifyNoether => verify_noether(inst, s),
        Command::VerifyVariation => verify_variation(inst, s),
        Command::VerifyNtilde => verify_ntilde(inst, s),
        Command::ReportAll => {
            let mut all = VerificationReport::new();
            for c in applicable(inst, s) {
                let r = run_command(c, inst, s)?;
                for n in r.notes {
                    all.note(format!("[{c}] {n}"));
                }
                all.records.extend(r.records.into_iter().map(|mut rec| {
                    rec.name = format!("{c}.{}", rec.name);
                    rec
                }));
            }
            Ok(all)
        }
    }
}

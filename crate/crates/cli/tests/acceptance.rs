//! End-to-end acceptance checks, one line per criterion.

use std::f64::consts::PI;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadtoric::exact_linalg::ratio;
use quadtoric::numerics::{
    coarea_orbit_volume_check, first_variation_companion, hminimality_residual, lagrangian_residual,
    minimality_residual_in_z, patch_volume_derivative, tangent_frame, z_tangent_frame, Axis, CircleChart,
    EllipseChart, FlatSpace, Patch, ProductTorusChart, Sampler, SphereAngularChart, SubmanifoldChart,
};
use quadtoric::polytope::DelzantVerdict;
use quadtoric::quadric_config::{QuadricConfiguration, QuadricMode};
use quadtoric::reduction::{
    classify_n, classify_one, classify_two, cp_chart_verify, lookup, stack_double, CpVerifyOptions, Instance,
};
use quadtoric::report::VerificationReport;
use quadtoric::torus_actions::{conjugate, freeness_check, orbit_volume, torus_act, TorusSubgroup};
use quadtoric::Error;
use quadtoric_cli::{run_command, Command, Settings};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn one_quadric(m: usize) -> QuadricConfiguration {
    lookup(&format!("one-quadric:{m}")).unwrap().quadrics().unwrap()
}

fn polytope(name: &str) -> quadtoric::polytope::PolytopePresentation {
    match lookup(name).unwrap() {
        Instance::Polytope(p) => p,
        _ => panic!("{name} is not a polytope"),
    }
}

/// Worst record residual of a report, after checking every record passes.
fn passing(name: &str, r: &VerificationReport) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for rec in &r.records {
        ensure(rec.pass(), || format!("{name}: {} = {:.3e} > {:.1e}", rec.name, rec.residual, rec.tolerance))?;
        worst = worst.max(rec.residual);
    }
    Ok(worst)
}

fn record(r: &VerificationReport, name: &str) -> f64 {
    r.records.iter().find(|x| x.name == name).map_or(f64::NAN, |x| x.residual)
}

fn gale_exactness() -> Outcome {
    let names = [
        "triangle",
        "square",
        "simplex:1",
        "simplex:2",
        "simplex:3",
        "simplex:4",
        "simplex-product:2,2",
        "simplex-product:2,3",
        "simplex-product:3,2",
        "simplex-product:3,3",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for name in names {
        let p = polytope(name);
        let q = QuadricConfiguration::gale_dual(&p);
        ensure(q.gamma().mul(&p.a_matrix().transpose()).map_err(e)?.is_zero(), || format!("{name}: ΓAᵗ ≠ 0"))?;
        let g = q.gamma().to_rational();
        let gb = g.mul_vec(p.offsets()).map_err(e)?;
        for _ in 0..20 {
            let x: Vec<_> = (0..p.dim())
                .map(|_| ratio(rng.random_range(-50..50), rng.random_range(1..13)))
                .collect();
            let y = p.embed_point(&x).map_err(e)?;
            ensure(g.mul_vec(&y).map_err(e)? == gb, || format!("{name}: Γ·i(x) ≠ Γb"))?;
        }
        ensure(gb == q.c(), || format!("{name}: c ≠ Γb"))?;
    }
    Ok(format!("{} polytopes, 20 points each", names.len()))
}

fn triangle_pipeline() -> Outcome {
    let inst = lookup("triangle").map_err(e)?;
    let r = run_command(Command::Gale, &inst, &Settings::default()).map_err(e)?;
    passing("gale", &r)?;
    for want in ["Γ = (1,1,1)", "c = 1"] {
        ensure(r.notes.iter().any(|n| n == want), || format!("missing note {want:?} in {:?}", r.notes))?;
    }
    let sphere = r.notes.iter().find(|n| n.starts_with("Z is the sphere")).ok_or("sphere case not recognized")?;
    Ok(sphere.clone())
}

fn delzant_vs_freeness() -> Outcome {
    let names = ["triangle", "bad-triangle", "square", "simplex:3", "simplex-product:2,3", "simplex-product:3,3", "cube:3"];
    let mut failing = 0;
    for name in names {
        let p = polytope(name);
        let verdict = p.is_delzant().map_err(e)?;
        let free = freeness_check(&QuadricConfiguration::gale_dual(&p)).map_err(e)?.free;
        ensure(verdict.holds() == free, || format!("{name}: delzant {} vs free {free}", verdict.holds()))?;
        if let DelzantVerdict::NotDelzant { determinant, .. } = verdict {
            failing += 1;
            ensure(name == "bad-triangle" && determinant == (-2).into(), || format!("{name}: det {determinant}"))?;
        }
    }
    ensure(failing == 1, || "the det −2 triangle must be the failing case".into())?;
    Ok(format!("{} polytopes agree, one failing case with det −2", names.len()))
}

fn lagrangian_family() -> Vec<QuadricConfiguration> {
    let mut qs: Vec<_> = (2..=4).map(one_quadric).collect();
    qs.push(lookup("two-quadrics:2,2").unwrap().quadrics().unwrap());
    qs
}

fn lagrangian_on_samples() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut control = f64::INFINITY;
    for q in lagrangian_family() {
        let sampler = Sampler::new(&q).map_err(e)?;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = sampler.chart_point(&mut rng, 1e-10).map_err(e)?;
            let frame = tangent_frame(&p.chart, &p.x()).map_err(e)?;
            worst = worst.max(lagrangian_residual(&frame));
            let zf = z_tangent_frame(&q, &p.z().map_err(e)?).map_err(e)?;
            control = control.min(lagrangian_residual(&zf));
        }
    }
    ensure(worst < 1e-8, || format!("residual {worst:.3e}"))?;
    ensure(control > 0.1, || format!("Z-frame control only {control:.3e}"))?;
    Ok(format!("max residual {worst:.2e} over 400 points; Z-frame control ≥ {control:.2}"))
}

fn minimal_on_samples() -> Outcome {
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for q in lagrangian_family() {
        let sampler = Sampler::new(&q).map_err(e)?;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = sampler.chart_point(&mut rng, 1e-10).map_err(e)?;
            worst = worst.max(minimality_residual_in_z(&q, &p.chart, &p.x(), h).map_err(e)?);
        }
    }
    ensure(worst < 1e-4, || format!("residual {worst:.3e}"))?;
    // S^1(1) × S^1(1/2) inside the sphere |z|² = 5/4
    let q = QuadricConfiguration::from_i64(&[&[4, 4]], &[ratio(5, 1)], QuadricMode::Complex).map_err(e)?;
    let torus = ProductTorusChart { a: 1.0, b: 0.5 };
    let control = minimality_residual_in_z(&q, &torus, &[0.3, 1.1], h).map_err(e)?;
    ensure(control > 0.1, || format!("unequal torus control only {control:.3e}"))?;
    Ok(format!("max residual {worst:.2e}; unequal-radii torus {control:.2}"))
}

fn first_variation() -> Outcome {
    let r = 1.7;
    let circle = CircleChart { r };
    let patch = Patch::new(vec![Axis::Periodic { lo: 0.0, hi: 2.0 * PI, n: 64 }]);
    let field = |x: &[f64]| Ok(circle.point(x)? / r);
    let v = patch_volume_derivative(&circle, &FlatSpace { m: 1 }, &patch, &field, 1e-4).map_err(e)?;
    let c = first_variation_companion(&circle, &patch, &field, 1e-4).map_err(e)?;
    ensure((v.dvol_dt - 2.0 * PI).abs() < 1e-4, || format!("circle dVol/dt = {}", v.dvol_dt))?;
    ensure((c - 2.0 * PI).abs() < 1e-4, || format!("circle −∫⟨H,X⟩ = {c}"))?;

    let inst = lookup("one-quadric:2").map_err(e)?;
    let rep = run_command(Command::VerifyVariation, &inst, &Settings::default()).map_err(e)?;
    let mismatch = record(&rep, "variation.first_formula");
    let samples = rep.records.iter().find(|x| x.name == "variation.first_formula").map_or(0, |x| x.samples);
    ensure(samples == 5, || format!("{samples} bump fields"))?;
    ensure(mismatch < 1e-3, || format!("N(2) relative mismatch {mismatch:.3e}"))?;
    Ok(format!(
        "circle {:.2e}/{:.2e} off 2π; N(2) mismatch {mismatch:.2e}",
        (v.dvol_dt - 2.0 * PI).abs(),
        (c - 2.0 * PI).abs()
    ))
}

fn hminimal_on_samples() -> Outcome {
    let s = Settings::default();
    let mut ratio_worst: f64 = 0.0;
    let mut hres: f64 = 0.0;
    for m in [2, 3] {
        let inst = lookup(&format!("one-quadric:{m}")).map_err(e)?;
        let rep = run_command(Command::VerifyVariation, &inst, &s).map_err(e)?;
        let r = record(&rep, "variation.hamiltonian");
        ensure(r < 1e-3, || format!("N({m}) ratio {r:.3e}"))?;
        ratio_worst = ratio_worst.max(r);
        let rep = run_command(Command::VerifyHminimal, &inst, &s).map_err(e)?;
        ensure(rep.records[0].samples == 20, || "expected 20 points".into())?;
        let r = record(&rep, "hminimal");
        ensure(r < 1e-4, || format!("N({m}) hminimality {r:.3e}"))?;
        hres = hres.max(r);
    }
    let ellipse = EllipseChart { a: 2.0, b: 1.0 };
    let control = (0..20)
        .map(|i| hminimality_residual(&ellipse, &[0.1 + 0.3 * i as f64], 1e-4))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(control > 1e-2, || format!("ellipse control only {control:.3e}"))?;
    Ok(format!("ratio {ratio_worst:.2e}; residual {hres:.2e}; ellipse {control:.2}"))
}

fn noether() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in [2, 3, 4] {
        let inst = lookup(&format!("one-quadric:{m}")).map_err(e)?;
        let rep = run_command(Command::VerifyNoether, &inst, &Settings::default()).map_err(e)?;
        passing(&format!("N({m})"), &rep)?;
        ensure(record(&rep, "noether.rejects_noninvariant") == 0.0, || "non-invariant f accepted".into())?;
        worst = worst.max(record(&rep, "noether.drift"));
    }
    Ok(format!("max drift {worst:.2e}; Re z_1 rejected"))
}

fn symmetry_and_coarea() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["one-quadric:2", "one-quadric:3", "two-quadrics:2,2"] {
        let q = lookup(name).unwrap().quadrics().unwrap();
        let signs = TorusSubgroup::new(&q).map_err(e)?.d_gamma_signs();
        let sampler = Sampler::new(&q).map_err(e)?;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = sampler.chart_point(&mut rng, 1e-10).map_err(e)?;
            let z = p.z().map_err(e)?;
            let vo = orbit_volume(&q, &z).map_err(e)?;
            let phi: Vec<f64> = (0..q.num_quadrics()).map(|_| rng.random()).collect();
            let mut images = vec![conjugate(&z), torus_act(&q, &phi, &z).map_err(e)?];
            for s in &signs {
                images.push(z.iter().zip(s).map(|(w, &k)| w * f64::from(k)).collect::<Vec<Complex64>>());
            }
            for w in images {
                worst = worst.max((orbit_volume(&q, &w).map_err(e)? - vo).abs() / vo);
            }
        }
    }
    ensure(worst <= 1e-12, || format!("Vo symmetry off by {worst:.3e}"))?;
    let mut rel: f64 = 0.0;
    for m in [2usize, 3] {
        let axes: Vec<Axis> = (0..m - 1)
            .map(|i| Axis::Interval { lo: 0.2 + 0.1 * i as f64, hi: 1.2, n: 24 })
            .collect();
        let chart = SphereAngularChart { radius: 1.0, m };
        let (up, fiber) = coarea_orbit_volume_check(&one_quadric(m), Box::new(chart), &axes, 12).map_err(e)?;
        rel = rel.max((up - fiber).abs() / fiber);
    }
    ensure(rel < 1e-3, || format!("co-area mismatch {rel:.3e}"))?;
    Ok(format!("Vo(σz) rel {worst:.1e}; co-area rel {rel:.1e}"))
}

fn topology_table() -> Outcome {
    ensure(classify_one(2).name == "S^1 × S^1", || classify_one(2).name)?;
    ensure(classify_one(3).name == "K^3", || classify_one(3).name)?;
    let t = classify_two(2, 2, 0).map_err(e)?;
    ensure(t.name == "T^4", || t.name.clone())?;
    ensure(t.facts.iter().any(|f| f.base == "T^2" && f.fiber == "T^2" && f.trivial == Some(true)), || {
        format!("{:?}", t.facts)
    })?;
    let q = lookup("two-quadrics:2,2").unwrap().quadrics().unwrap();
    let t = classify_n(&q, Some(1)).map_err(e)?;
    let f = t.fact("T^2", "T^2").ok_or("no T^2-bundle over T^2")?;
    ensure(f.trivial == Some(false), || f.to_string())?;
    let line = f.to_string();
    ensure(line == "N_1(2,2) → T^2: nontrivial bundle with fiber T^2", || line.clone())?;
    Ok(format!("S^1 × S^1, K^3, T^4, {line}"))
}

fn double_pipeline() -> Outcome {
    let g = QuadricConfiguration::from_i64(&[&[1, 1, 1]], &[ratio(2, 1)], QuadricMode::Complex).map_err(e)?;
    let d = QuadricConfiguration::from_i64(&[&[1, 1, 2]], &[ratio(3, 1)], QuadricMode::Complex).map_err(e)?;
    stack_double(&g, &d).map_err(e)?;
    let par = QuadricConfiguration::from_i64(&[&[2, 2, 2]], &[ratio(4, 1)], QuadricMode::Complex).map_err(e)?;
    match stack_double(&g, &par) {
        Err(Error::InvalidDouble(w)) => ensure(!w.is_empty(), || "empty witness".into())?,
        other => return Err(format!("parallel rows accepted: {other:?}")),
    }

    let s = Settings::default();
    let tor = lookup("cp2-torus").map_err(e)?;
    let rep = run_command(Command::VerifyNtilde, &tor, &s).map_err(e)?;
    passing("cp2-torus", &rep)?;
    let lag = record(&rep, "ntilde.lagrangian");
    ensure(rep.records.iter().any(|r| r.name == "ntilde.lagrangian" && r.samples == 100), || "100 samples".into())?;

    let mut parts = vec![format!("Ñ residual {lag:.1e}")];
    for name in ["cp2-torus", "rp2"] {
        let Instance::Double { gamma, delta } = lookup(name).map_err(e)? else { unreachable!() };
        let dc = stack_double(&gamma, &delta).map_err(e)?;
        let r = cp_chart_verify(&dc, &CpVerifyOptions::default()).map_err(e)?;
        passing(name, &r)?;
        ensure(record(&r, "cp.lagrangian") < 1e-8, || "cp lagrangian".into())?;
        ensure(record(&r, "cp.hamiltonian_stationarity") < 1e-3, || "cp stationarity".into())?;
        parts.push(format!(
            "{name} {:.1e}/{:.1e}",
            record(&r, "cp.lagrangian"),
            record(&r, "cp.hamiltonian_stationarity")
        ));
    }
    Ok(parts.join("; "))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("quadtoric-acc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|x| x.to_string())?;
    let mut outs = Vec::new();
    for i in 0..2 {
        let path = dir.join(format!("run{i}.tsv"));
        let st = Process::new(env!("CARGO_BIN_EXE_quadtoric"))
            .args(["report-all", "--catalog", "cp2-torus", "--seed", "42", "--report"])
            .arg(&path)
            .output()
            .map_err(|x| x.to_string())?;
        ensure(st.status.code() == Some(0), || format!("exit {:?}", st.status.code()))?;
        outs.push(std::fs::read(&path).map_err(|x| x.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(!outs[0].is_empty() && outs[0] == outs[1], || "reports differ".into())?;
    let lines = outs[0].iter().filter(|&&b| b == b'\n').count();
    Ok(format!("{lines} records, identical bytes"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 12] = [
        ("Gale duality exactness", gale_exactness, Duration::from_secs(1)),
        ("triangle pipeline", triangle_pipeline, Duration::from_secs(1)),
        ("Delzant iff free", delzant_vs_freeness, Duration::from_secs(5)),
        ("Lagrangian", lagrangian_on_samples, Duration::from_secs(30)),
        ("minimal in Z", minimal_on_samples, Duration::from_secs(120)),
        ("first variation", first_variation, Duration::from_secs(60)),
        ("H-minimal", hminimal_on_samples, Duration::from_secs(120)),
        ("Noether", noether, Duration::from_secs(10)),
        ("symmetry and co-area", symmetry_and_coarea, Duration::from_secs(60)),
        ("topology table", topology_table, Duration::from_secs(1)),
        ("double reduction", double_pipeline, Duration::from_secs(180)),
        ("determinism", determinism, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let (verdict, detail) = match outcome {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over budget {budget:?}")),
            Err(d) => ("FAIL", d),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {verdict}  {name}: {detail} [{:.2}s]", i + 1, took.as_secs_f64());
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

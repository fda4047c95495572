use std::f64::consts::{FRAC_PI_2, TAU};
use std::process::{Command, ExitCode};

use rand::Rng;

use cslab::config_space::{
    build_config_complex, cn_graphs, components, has_n_cycle, hypothesis_report, sn_action_on_components, PointCloud,
    ReportOptions, DEFAULT_NODE_BUDGET,
};
use cslab::divided_diff::{
    boundedness_probe, circle_conj_oracle, iterated_delta, limit_probe, regularity_verdict, ProbeConfig, Regularity,
    TuplePoint, VerdictThresholds,
};
use cslab::frames::evert;
use cslab::harness::{
    collision_path_probe, cs_preserver_check, two_ray_jordan2, CollisionConfig, CollisionFamily, CsCheckConfig,
    Diagnosis, InputClass, MapName,
};
use cslab::linalg::{frame_distance, ComplexMatrix};
use cslab::operators::{exotic_evert, exotic_polar, SemisimpleOp, SpectralDomain, SpectrumVector};
use cslab::random::{random_frame, random_ortho_frame, rng_for};
use cslab::{Complex64, Exec};

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn eversion() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_ortho: f64 = 0.0;
    for n in 2..=6 {
        let mut rng = rng_for(1, n as u64);
        for _ in 0..100 {
            let f = random_frame(n, &mut rng);
            let twice = evert(&evert(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            worst = worst.max(frame_distance(&twice, &f).map_err(|e| e.to_string())?);
            let o = random_ortho_frame(n, &mut rng).into_frame();
            let e = evert(&o).map_err(|e| e.to_string())?;
            worst_ortho = worst_ortho.max(frame_distance(&e, &o).map_err(|e| e.to_string())?);
        }
    }
    ensure(worst <= 1e-9, format!("evert twice moved a frame by {worst:e}"))?;
    ensure(worst_ortho <= 1e-9, format!("an orthonormal frame moved by {worst_ortho:e}"))?;
    Ok(format!("500 frames, max involution error {worst:.1e}, max orthonormal drift {worst_ortho:.1e}"))
}

fn route_agreement() -> Outcome {
    let disk = SpectralDomain::unit_disk();
    let mut worst: f64 = 0.0;
    let mut rng = rng_for(2, 0);
    for i in 0..200 {
        let n = 2 + i % 4;
        let frame = random_frame(n, &mut rng);
        let spec = disk.sample_distinct(n, 0.1, &mut rng).ok_or("spectrum sampler failed")?;
        let op = SemisimpleOp::new(frame, SpectrumVector::new(spec).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let m = op.to_matrix().map_err(|e| e.to_string())?;
        let a = exotic_evert(&op).and_then(|o| o.to_matrix()).map_err(|e| e.to_string())?;
        let b = exotic_polar(&m).map_err(|e| e.to_string())?;
        let err = (a.as_matrix() - b.as_matrix()).norm() / a.frobenius().max(1.0);
        worst = worst.max(err);
    }
    ensure(worst <= 1e-8, format!("routes differ by {worst:e}"))?;
    Ok(format!("200 matrices, max relative route gap {worst:.1e}"))
}

fn phi_cs_check() -> Outcome {
    let domains = [SpectralDomain::unit_circle(), SpectralDomain::real_interval(-1.0, 1.0), SpectralDomain::unit_disk()];
    let mut worst_drift: f64 = 0.0;
    let mut worst_comm: f64 = 0.0;
    for x in &domains {
        for map in [MapName::Exotic, MapName::ExoticPolar] {
            let r = cs_preserver_check(&CsCheckConfig::new(map, x.clone(), InputClass::Semisimple, 3))
                .map_err(|e| e.to_string())?;
            ensure(r.pass && r.applicable == 200, format!("{} on {} failed: drift {:e} comm {:e}", r.map, r.domain, r.max_spectrum_drift, r.max_commutator_norm))?;
            worst_drift = worst_drift.max(r.max_spectrum_drift);
            worst_comm = worst_comm.max(r.max_commutator_norm);
        }
        for control in [MapName::Shift, MapName::InconsistentShuffle] {
            let r = cs_preserver_check(&CsCheckConfig::new(control, x.clone(), InputClass::Semisimple, 3))
                .map_err(|e| e.to_string())?;
            ensure(!r.pass, format!("negative control {} passed on {}", r.map, r.domain))?;
        }
    }
    Ok(format!("3 domains x 200 trials, max drift {worst_drift:.1e}, max commutator {worst_comm:.1e}; controls fail"))
}

fn divided_differences() -> Outcome {
    let mut rng = rng_for(4, 0);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 500 {
        let k = rng.random_range(1..=5);
        let pts: Vec<Complex64> = (0..=k).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..TAU))).collect();
        let Ok(t) = TuplePoint::new(pts.clone()) else { continue };
        let v = iterated_delta(|z: Complex64| z.conj(), &t);
        let oracle = circle_conj_oracle(&pts, k).map_err(|e| e.to_string())?;
        worst = worst.max((v - oracle).norm());
        done += 1;
    }
    ensure(worst <= 1e-9, format!("circle tuples off the closed form by {worst:e}"))?;

    let mut worst_real: f64 = 0.0;
    for _ in 0..200 {
        let pts: Vec<Complex64> = (0..3).map(|_| c(rng.random_range(-1.0..1.0), 0.0)).collect();
        let Ok(t) = TuplePoint::new(pts) else { continue };
        if t.min_separation() < 1e-2 {
            continue;
        }
        worst_real = worst_real.max(iterated_delta(|z: Complex64| z.conj(), &t).norm());
    }
    ensure(worst_real <= 1e-10, format!("real tuples give second difference {worst_real:e}"))?;

    let mut worst_poly: f64 = 0.0;
    let mut polys = 0;
    while polys < 200 {
        let k = rng.random_range(1..=6);
        let pts: Vec<Complex64> = (0..=k).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let Ok(t) = TuplePoint::new(pts) else { continue };
        if t.min_separation() < 0.2 {
            continue;
        }
        let coeffs: Vec<Complex64> = (0..k).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
        let p = |z: Complex64| coeffs.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * z + a);
        worst_poly = worst_poly.max(iterated_delta(p, &t).norm());
        polys += 1;
    }
    ensure(worst_poly <= 1e-9, format!("low-degree polynomials leave {worst_poly:e}"))?;
    Ok(format!("oracle gap {worst:.1e}, real {worst_real:.1e}, polynomial {worst_poly:.1e}"))
}

fn regularity() -> Outcome {
    let th = VerdictThresholds::default();
    let circle = SpectralDomain::unit_circle();
    let interval = SpectralDomain::real_interval(-1.0, 1.0);
    let disk = SpectralDomain::unit_disk();
    let verdict = |x: &SpectralDomain| regularity_verdict(x, 3, &th).map(|v| v.verdict).map_err(|e| e.to_string());
    let got = (verdict(&circle)?, verdict(&interval)?, verdict(&disk)?);
    ensure(
        got == (Regularity::C, Regularity::C, Regularity::NotB),
        format!("verdicts {} {} {}", got.0.as_str(), got.1.as_str(), got.2.as_str()),
    )?;

    let cfg = ProbeConfig::default();
    let conj = |z: Complex64| z.conj();
    let sup = boundedness_probe(conj, &disk, c(0.0, 0.0), 2, &cfg).map_err(|e| e.to_string())?;
    for (s, r) in sup.sup_values.iter().zip(&sup.radii) {
        ensure(*s >= (1.0 - 1e-12) / r, format!("disk sup {s:e} below 1/r at r = {r:e}"))?;
    }
    for r in [1e-1, 1e-2, 1e-3, 1e-4] {
        let w = TuplePoint::new(vec![c(-r, 0.0), c(0.0, r), c(r, 0.0)]).map_err(|e| e.to_string())?;
        let v = iterated_delta(conj, &w).norm();
        ensure((v * r - 1.0).abs() <= 1e-9, format!("witness gives {v:e} at r = {r:e}"))?;
    }
    let first = limit_probe(conj, &disk, c(0.0, 0.0), 1, &cfg).map_err(|e| e.to_string())?;
    ensure(first.sup_values.iter().all(|s| (s - 1.0).abs() <= 1e-12), "first difference sup is not 1 on the disk")?;
    ensure(first.limit_plausible == Some(false), "first difference looks convergent on the disk")?;
    let osc = first.oscillation_values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(format!("circle C, interval C, disk not_B; disk first-difference oscillation >= {osc:.3}"))
}

fn analyze(cloud: &PointCloud, n: usize) -> Result<(usize, bool, Vec<usize>, Vec<cslab::config_space::CnGraph>), String> {
    let cx = build_config_complex(cloud, n, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
    let d = components(&cx, Exec::default());
    let a = sn_action_on_components(&cx, &d).map_err(|e| e.to_string())?;
    let g = cn_graphs(&cx, &d, Exec::default()).map_err(|e| e.to_string())?;
    Ok((d.count(), a.transitive, a.isotropy.iter().map(Vec::len).collect(), g))
}

fn config_counts() -> Outcome {
    let circle = PointCloud::circle(48).map_err(|e| e.to_string())?;
    let interval = PointCloud::interval(40).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for (name, cloud, n, want, iso) in
        [("circle", &circle, 3, 2, 3), ("circle", &circle, 4, 6, 4), ("interval", &interval, 3, 6, 1), ("interval", &interval, 4, 24, 1)]
    {
        let (count, transitive, orders, _) = analyze(cloud, n)?;
        ensure(count == want, format!("{name} n = {n}: {count} components, expected {want}"))?;
        ensure(transitive, format!("{name} n = {n}: action not transitive"))?;
        ensure(orders.iter().all(|&o| o == iso), format!("{name} n = {n}: isotropy orders {orders:?}"))?;
        summary.push(format!("{name}/{n}={count}"));
    }
    Ok(summary.join(", "))
}

fn gamma_graphs() -> Outcome {
    let circle = PointCloud::circle(48).map_err(|e| e.to_string())?;
    let interval = PointCloud::interval(40).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for n in [3, 4] {
        for g in analyze(&circle, n)?.3 {
            ensure(g.is_cycle() && g.edges.len() == n, format!("circle n = {n}: graph {:?} is not an n-cycle", g.edges))?;
            ensure(has_n_cycle(&g).map_err(|e| e.to_string())?, "cycle search missed a circle cycle")?;
            checked += 1;
        }
        for g in analyze(&interval, n)?.3 {
            ensure(g.is_path() && g.edges.len() == n - 1, format!("interval n = {n}: graph {:?} is not a path", g.edges))?;
            ensure(!has_n_cycle(&g).map_err(|e| e.to_string())?, "cycle search found a cycle in a path")?;
            checked += 1;
        }
    }
    Ok(format!("{checked} component graphs"))
}

fn regime_reports() -> Outcome {
    let opts = ReportOptions::default();
    let report = |cloud: PointCloud, x: SpectralDomain| hypothesis_report(&cloud, &x, 3, &opts).map_err(|e| e.to_string());
    let circle = report(PointCloud::circle(48).map_err(|e| e.to_string())?, SpectralDomain::unit_circle())?;
    ensure(circle.hypotheses_hold && circle.theorems_applicable, format!("circle violated {:?}", circle.violated))?;
    ensure(circle.regularity == "C" && circle.phi_admissible_semisimple() && circle.phi_admissible_general(), "circle families")?;
    ensure(!circle.configuration_space_connected && circle.all_gamma_have_n_cycle, "circle configuration space")?;

    let disk = report(PointCloud::disk(60).map_err(|e| e.to_string())?, SpectralDomain::unit_disk())?;
    ensure(disk.regularity == "not_B", format!("disk regularity {}", disk.regularity))?;
    ensure(disk.configuration_space_connected && disk.components == 1, "disk configuration space is not connected")?;
    ensure(!disk.phi_admissible_semisimple() && !disk.phi_admissible_general(), "disk admits the exotic map")?;

    let interval = report(PointCloud::interval(40).map_err(|e| e.to_string())?, SpectralDomain::real_interval(-1.0, 1.0))?;
    ensure(interval.free && !interval.theorems_applicable && interval.families.is_none(), "interval report")?;
    ensure(!interval.all_gamma_have_n_cycle, "interval graphs have n-cycles")?;
    Ok(format!(
        "circle {} ({} comps), disk {} ({} comp), interval {} not applicable",
        circle.regularity, circle.components, disk.regularity, disk.components, interval.regularity
    ))
}

fn collision() -> Outcome {
    let cfg = CollisionConfig::new(CollisionFamily::Jordan2).with_rays(vec![0.0, 1.0, FRAC_PI_2, 2.5]);
    let r = collision_path_probe(&cfg).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for p in &r.paths {
        for (t, img) in p.t.iter().zip(&p.images) {
            let t = c(t[0], t[1]);
            let expect = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![t / t.conj(), t]]).map_err(|e| e.to_string())?;
            let got = ComplexMatrix::try_from(img).map_err(|e| e.to_string())?;
            worst = worst.max((got.as_matrix() - expect.as_matrix()).norm());
        }
    }
    ensure(worst <= 1e-10, format!("jordan2 images off the closed form by {worst:e}"))?;

    let real = collision_path_probe(&CollisionConfig::new(CollisionFamily::Jordan2)).map_err(|e| e.to_string())?;
    ensure(real.diagnosis == Diagnosis::Converges, format!("real ray: {}", real.diagnosis.as_str()))?;
    let lim = ComplexMatrix::try_from(real.limit.as_ref().ok_or("no limit")?).map_err(|e| e.to_string())?;
    let want = ComplexMatrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]).map_err(|e| e.to_string())?;
    let t_last = real.ladder[real.ladder.len() - 1];
    let off = (lim.as_matrix() - want.as_matrix()).norm();
    ensure(off <= t_last * (1.0 + 1e-9), format!("real-ray limit is {off:e} from [[0,0],[1,0]]"))?;
    let two = collision_path_probe(&two_ray_jordan2()).map_err(|e| e.to_string())?;
    ensure(two.diagnosis == Diagnosis::BoundedOscillates, format!("two rays: {}", two.diagnosis.as_str()))?;

    let j3 = collision_path_probe(&CollisionConfig::new(CollisionFamily::Jordan3Disk)).map_err(|e| e.to_string())?;
    ensure(j3.diagnosis == Diagnosis::Diverges, format!("jordan3-disk: {}", j3.diagnosis.as_str()))?;
    let norms = &j3.paths[0].norms;
    ensure(norms.windows(2).all(|w| w[1] > w[0]), "jordan3-disk norms not monotone")?;
    let span = (j3.ladder[0] / j3.ladder[j3.ladder.len() - 1]).log10();
    ensure(span >= 3.0 - 1e-9, format!("ladder spans only {span} decades"))?;
    Ok(format!(
        "jordan2 gap {worst:.1e}; real ray converges, two rays oscillate; jordan3-disk diverges over {span:.1} decades, exponent {:.3}",
        j3.growth_exponent
    ))
}

fn run_cli(args: &[&str]) -> Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cslab")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 8] = [
        &["evert", "--n", "4", "--seed", "3"],
        &["exotic", "--n", "3", "--seed", "3"],
        &["delta-probe", "--scenario", "disk", "--center", "0,0", "--k", "2"],
        &["config-analyze", "--scenario", "circle", "--n", "3"],
        &["cs-check", "--scenario", "interval", "--trials", "50"],
        &["collision-probe", "--family", "jordan2", "--rays", "0,1.5707963267948966"],
        &["report", "--scenario", "disk"],
        &["scenario", "--scenario", "circle", "--trials", "20"],
    ];
    for args in runs {
        let (a, code_a) = run_cli(args)?;
        let (b, code_b) = run_cli(args)?;
        ensure(code_a == code_b, format!("{}: exit codes {code_a} and {code_b}", args[0]))?;
        ensure(!a.is_empty() && a == b, format!("{}: output differs between runs", args[0]))?;
        serde_json::from_slice::<serde_json::Value>(&a).map_err(|e| format!("{}: invalid JSON: {e}", args[0]))?;
    }
    Ok(format!("{} subcommands byte-identical across two runs", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("eversion is an involution fixing orthonormal frames", eversion),
        ("eversion and polar routes agree", route_agreement),
        ("exotic map preserves spectra and commutativity", phi_cs_check),
        ("divided differences match closed forms", divided_differences),
        ("regularity trichotomy", regularity),
        ("configuration-space component counts", config_counts),
        ("coincidence graphs", gamma_graphs),
        ("regime reports", regime_reports),
        ("collision paths", collision),
        ("deterministic CLI output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

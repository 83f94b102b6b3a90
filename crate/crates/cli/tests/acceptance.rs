use std::f64::consts::PI;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfmetro::commands::run_command;
use tfmetro::config::{resolve, Command, Settings};
use tfmetro::output::{Cell, Payload, Table};
use tfmetro_core::metrology::*;
use tfmetro_core::superres::*;
use tfmetro_core::{build_basis, plunge_index, ProlateBasis, SlepianParams};

/// Ratio of the c = 20 to the c = 1 sup distance on the default 601-point grid.
const FIG1_RATIO: f64 = 0.08255031790183492;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn table(command: Command, settings: Settings) -> Table {
    match run_command(&resolve(command, settings).unwrap()).unwrap() {
        Payload::Table(t) => t,
        Payload::Document(_) => unreachable!(),
    }
}

fn float(cell: &Cell) -> f64 {
    match cell {
        Cell::Float(x) => *x,
        Cell::Int(i) => *i as f64,
        other => panic!("{other:?}"),
    }
}

fn ground_eigenvalue() -> Outcome {
    let p = SlepianParams::with_unit_window(5.0).unwrap();
    let b = ProlateBasis::new(p, 0).unwrap();
    let oracle = build_basis(p, 0, 10 * b.quad_order()).unwrap();
    let l = b.lambda(0);
    let diff = (l - oracle.lambda(0)).abs();
    check(
        (0.998..1.0).contains(&l) && diff < 1e-8,
        format!("lambda0(5) = {l:.12}, |default − 10x order| = {diff:.1e}"),
    )
}

fn double_orthogonality() -> Outcome {
    let (mut whole, mut window) = (0.0f64, 0.0f64);
    for c in [1.0, 2.0, 5.0, 10.0, 20.0] {
        let b = ProlateBasis::extendable_family(SlepianParams::with_unit_window(c).unwrap()).unwrap();
        let dim = plunge_index(c) + 5;
        let g = b.whole_line_gram(dim).unwrap();
        let w = b.window_gram(dim).unwrap();
        for n in 0..dim {
            for m in 0..dim {
                let delta = if n == m { 1.0 } else { 0.0 };
                whole = whole.max((g[n][m] - delta).abs());
                window = window.max((w[n][m] - delta * b.lambda(n)).abs());
            }
        }
    }
    check(
        whole < 1e-7 && window < 1e-9,
        format!("whole-line residual {whole:.1e}, window residual {window:.1e}"),
    )
}

fn plunge() -> Outcome {
    let grid = vec![2.5 * PI, 5.0 * PI, 10.0 * PI];
    let t = table(
        Command::Spectrum,
        Settings {
            c: Some(grid.clone()),
            ..Default::default()
        },
    );
    let mut ok = true;
    let mut spans = Vec::new();
    for &c in &grid {
        let k = plunge_index(c);
        let lam: Vec<f64> = t.rows.iter().filter(|r| float(&r[0]) == c).map(|r| float(&r[2])).collect();
        ok &= (0..=k - 4).all(|n| lam[n] > 0.9);
        ok &= (k + 4..lam.len()).all(|n| lam[n] < 0.1) && lam.len() > k + 4;
        let last_high = lam.iter().rposition(|&l| l > 0.9).unwrap();
        let first_low = lam.iter().position(|&l| l < 0.1).unwrap();
        let span = first_low - last_high;
        ok &= span <= 6;
        spans.push(format!("{k}: {span}"));
    }
    check(ok, format!("transition widths by plunge index {}", spans.join(", ")))
}

fn hermite_gauss_comparison() -> Outcome {
    let t = table(Command::Fig1, Settings::default());
    let mut sup: Vec<(f64, f64)> = Vec::new();
    for r in &t.rows {
        let (c, d) = (float(&r[0]), float(&r[4]));
        if sup.last().map(|s| s.0) != Some(c) {
            sup.push((c, d));
        }
    }
    let cs: Vec<f64> = sup.iter().map(|s| s.0).collect();
    let decreasing = sup.windows(2).all(|w| w[1].1 < w[0].1);
    let ratio = sup[3].1 / sup[0].1;
    check(
        cs == [1.0, 5.0, 10.0, 20.0] && decreasing && ratio < 0.1 && (ratio - FIG1_RATIO).abs() < 1e-9,
        format!(
            "sup distances {:?}, ratio {ratio:.6}",
            sup.iter().map(|s| format!("{:.4}", s.1)).collect::<Vec<_>>()
        ),
    )
}

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn orthonormal(rng: &mut ChaCha8Rng, k: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    while out.len() < k {
        let mut v = unit(rng, dim);
        for _ in 0..2 {
            for q in &out {
                let a: f64 = q.iter().zip(&v).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= a * y);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|x| x / n).collect());
    }
    out
}

fn probability_pipeline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut norm = 0.0f64;
    for trial in 0..100 {
        let c = [2.0, 4.0, 8.0][trial % 3];
        let dim = 5 + trial % 4;
        let b = ProlateBasis::new(SlepianParams::with_unit_window(c).unwrap(), dim - 1).unwrap();
        let k = 1 + trial % 3;
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let modes = (0..k).map(|_| unit(&mut rng, dim)).collect();
        let probe = ProbeState::new(raw.iter().map(|w| w / total).collect(), modes, false).unwrap();
        let elements = orthonormal(&mut rng, 1 + trial % 4, dim)
            .into_iter()
            .map(|v| PovmElement {
                terms: vec![(rng.gen_range(0.2..1.0), v)],
            })
            .collect();
        let povm = Povm::new(elements).unwrap();
        let direct = probabilities_limited(&probe, &povm, &b).unwrap();
        let via = probabilities_ideal(&probe, &time_limit_povm(&povm, &b).unwrap()).unwrap();
        let ideal = probabilities_ideal(&probe, &povm).unwrap();
        for (x, y) in direct.iter().zip(&via) {
            worst = worst.max((x - y).abs());
        }
        for p in [&direct, &via, &ideal] {
            norm = norm.max((p.iter().sum::<f64>() - 1.0).abs());
        }
    }
    check(
        worst < 1e-12 && norm < 1e-10,
        format!("max pipeline mismatch {worst:.1e}, max |Σp − 1| {norm:.1e}"),
    )
}

fn fisher_oracle() -> Outcome {
    let opts = FisherOptions::default();
    let q = 0.3;
    let bern = fisher_matrix(|t: &[f64]| Ok(vec![t[0], 1.0 - t[0]]), &[q], &["p"], &opts).unwrap();
    let e1 = (bern.get(0, 0) - 1.0 / (q * (1.0 - q))).abs();
    let (a, b) = (0.2, 0.5);
    let multi = fisher_matrix(
        |t: &[f64]| Ok(vec![t[0], t[1], 1.0 - t[0] - t[1]]),
        &[a, b],
        &["a", "b"],
        &opts,
    )
    .unwrap();
    let r = 1.0 / (1.0 - a - b);
    let want = [[1.0 / a + r, r], [r, 1.0 / b + r]];
    let mut e2 = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            e2 = e2.max((multi.get(i, j) - want[i][j]).abs());
        }
    }
    let diag = FisherMatrix {
        labels: vec!["x".into(), "y".into()],
        matrix: vec![vec![4.0, 0.0], vec![0.0, 0.25]],
        steps: vec![0.0, 0.0],
        excluded: vec![],
        include_leakage: true,
    };
    let bound = crb(&diag).unwrap();
    let exact = bound == vec![0.5, 2.0];
    check(
        e1 < 1e-6 && e2 < 1e-6 && exact,
        format!("Bernoulli error {e1:.1e}, multinomial error {e2:.1e}, diagonal crb {bound:?}"),
    )
}

fn random_sphere(rng: &mut ChaCha8Rng) -> MeasurementDesign {
    let free = FreeEntries {
        c2: [1.0, 0.0, 0.0, 0.0],
        ..Default::default()
    };
    loop {
        let (r1, r2) = (rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
        let (phi1, phi2) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
        if let Ok(d) = design_from_sphere(r1, phi1, r2, phi2, free) {
            if d.check_validity().is_ok() {
                return d;
            }
        }
    }
}

fn central_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let setups: Vec<(f64, ProlateBasis, DerivativeBasis)> = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|c| {
            let p = SlepianParams::with_unit_window(c).unwrap();
            let b = ProlateBasis::extendable_family(p).unwrap();
            let psf = Psf::gaussian_for(p, 0.5).unwrap();
            let w = psf.width();
            let model = TwoPulseModel::new(psf, w, 0.0, 0.5).unwrap();
            let d = gram_schmidt(&gamma_modes(&model, &b, 3).unwrap()).unwrap();
            (c, b, d)
        })
        .collect();
    let (mut ok, mut worst, mut gap) = (true, f64::NEG_INFINITY, 0.0f64);
    let n = 240;
    for i in 0..n {
        let (_, b, d) = &setups[i % setups.len()];
        let design = random_sphere(&mut rng);
        let a = efficiency_factor(&time_limited_design(&design, d, b).unwrap()).unwrap();
        let (bphi, blam) = efficiency_bounds(d, b).unwrap();
        ok &= a <= bphi + 1e-9 && bphi <= blam + 1e-9 && bphi < 1.0;
        worst = worst.max((a - bphi).max(bphi - blam));
        gap = gap.max(bphi);
    }
    check(
        ok,
        format!("{n} configurations, max violation margin {worst:.2e}, max Σ Φ₂ₙ²λₙ = {gap:.6}"),
    )
}

fn sphere_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (r1, r2) = (rng.gen_range(0.01..2.0), rng.gen_range(0.01..2.0));
        let (phi1, phi2) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
        let Ok(d) = design_from_sphere(r1, phi1, r2, phi2, FreeEntries::default()) else {
            continue;
        };
        let a = efficiency_factor(&d).unwrap();
        worst = worst.max((a - r2 * r2 * (phi1 - phi2).sin().powi(2)).abs());
    }
    check(worst < 1e-12, format!("max deviation {worst:.1e}"))
}

fn large_c_recovery() -> Outcome {
    let p = SlepianParams::with_unit_window(50.0).unwrap();
    let b = ProlateBasis::extendable_family(p).unwrap();
    let psf = Psf::gaussian_for(p, 0.5).unwrap();
    let sigma = psf.width();
    let model = TwoPulseModel::new(psf, sigma, 0.0, 0.5).unwrap();
    let d = gram_schmidt(&gamma_modes(&model, &b, 3).unwrap()).unwrap();
    let design = design_from_sphere(
        0.6,
        PI / 3.0,
        0.8,
        5.0 * PI / 6.0,
        FreeEntries {
            c2: [1.0, 0.0, 0.0, 0.0],
            ..Default::default()
        },
    )
    .unwrap();
    let povm = optimal_povm(&design, &d).unwrap();
    let probe = probe_from_model(&model, &b).unwrap();
    let pi = probabilities_ideal(&probe, &povm).unwrap();
    let pl = probabilities_limited(&probe, &povm, &b).unwrap();
    let prob_rel = pi.iter().zip(&pl).map(|(a, b)| (a - b).abs() / a.abs()).fold(0.0, f64::max);
    let fi = superres_fisher(&model, &povm, &b, Regime::Ideal).unwrap().get(0, 0);
    let fl = superres_fisher(&model, &povm, &b, Regime::Limited).unwrap().get(0, 0);
    let f_rel = (fi - fl).abs() / fi;
    check(
        prob_rel <= 0.01 && f_rel <= 0.01,
        format!("max relative probability change {prob_rel:.1e}, F_ττ {fi:.6} vs {fl:.6}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let bin = env!("CARGO_BIN_EXE_tfmetro");
    let status = Process::new(bin)
        .args(["superres", "--c", "1,5", "--tau", "0.3,0.6", "--out"])
        .arg(&first)
        .status()
        .unwrap();
    let manifest = tfmetro::output::manifest_path(&first);
    let rerun = Process::new(bin)
        .args(["superres", "--config"])
        .arg(&manifest)
        .arg("--out")
        .arg(&second)
        .status()
        .unwrap();
    let a = std::fs::read(&first).unwrap_or_default();
    let b = std::fs::read(&second).unwrap_or_default();
    let recorded: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    let hash = recorded["outputs"][0]["sha256"].as_str().unwrap_or_default().to_string();
    let same_hash = hash == tfmetro::output::sha256_hex(&b);
    check(
        status.success() && rerun.success() && !a.is_empty() && a == b && same_hash,
        format!("{} bytes, sha256 {}", a.len(), &hash[..hash.len().min(16)]),
    )
}

#[test]
fn acceptance() {
    type Criterion = (usize, &'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 10] = [
        (1, "ground eigenvalue at c = 5", ground_eigenvalue, Duration::from_secs(1)),
        (2, "double orthogonality", double_orthogonality, Duration::from_secs(30)),
        (3, "eigenvalue plunge", plunge, Duration::from_secs(10)),
        (4, "prolate vs Hermite–Gauss ψ₂", hermite_gauss_comparison, Duration::from_secs(5)),
        (5, "probability pipeline identity", probability_pipeline, Duration::from_secs(10)),
        (6, "Fisher closed forms", fisher_oracle, Duration::from_secs(1)),
        (7, "central efficiency bound", central_bound, Duration::from_secs(120)),
        (8, "sphere identity", sphere_identity, Duration::MAX),
        (9, "large-c recovery", large_c_recovery, Duration::from_secs(30)),
        (10, "manifest determinism", determinism, Duration::MAX),
    ];
    let mut failed = Vec::new();
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = outcome.ok && in_time;
        let budget = if limit == Duration::MAX {
            String::new()
        } else {
            format!(" / {:?}", limit)
        };
        println!(
            "criterion {id:2} {}: {name}: {} [{:.3?}{budget}]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed,
        );
        if !pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

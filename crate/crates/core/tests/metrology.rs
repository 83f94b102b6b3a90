use proptest::prelude::*;
use tfmetro_core::metrology::*;
use tfmetro_core::{ProlateBasis, SlepianParams};

fn orthonormalize(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut v = r.clone();
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

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

prop_compose! {
    fn setup(dim: usize)(
        raw_modes in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 1..4),
        raw_weights in prop::collection::vec(0.05f64..1.0, 3),
        raw_povm in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 1..5),
        scales in prop::collection::vec(0.1f64..1.0, 4),
    ) -> (ProbeState, Povm) {
        let k = raw_modes.len();
        let total: f64 = raw_weights[..k].iter().sum();
        let weights = raw_weights[..k].iter().map(|w| w / total).collect();
        let modes = raw_modes.into_iter().map(normalized).collect();
        let probe = ProbeState::new(weights, modes, false).unwrap();
        let elements = orthonormalize(&raw_povm)
            .into_iter()
            .zip(&scales)
            .map(|(v, &s)| PovmElement { terms: vec![(s, v)] })
            .collect();
        (probe, Povm::new(elements).unwrap())
    }
}

fn basis() -> ProlateBasis {
    ProlateBasis::new(SlepianParams::with_unit_window(4.0).unwrap(), 7).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn limiting_the_povm_matches_the_limited_regime((probe, povm) in setup(8)) {
        let b = basis();
        let direct = probabilities_limited(&probe, &povm, &b).unwrap();
        let via = probabilities_ideal(&probe, &time_limit_povm(&povm, &b).unwrap()).unwrap();
        for (x, y) in direct.iter().zip(&via) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        for p in [&direct, &via] {
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn probabilities_do_not_depend_on_the_mixture_decomposition((probe, povm) in setup(8)) {
        let b = basis();
        let eig = probe.to_eigendecomposition().unwrap();
        for regime in [Regime::Ideal, Regime::Limited, Regime::Truncated] {
            let a = probabilities(regime, &probe, &povm, &b).unwrap();
            let e = probabilities(regime, &eig, &povm, &b).unwrap();
            for (x, y) in a.iter().zip(&e) {
                prop_assert!((x - y).abs() < 1e-12, "{regime}: {} vs {}", x, y);
            }
        }
    }

    #[test]
    fn damped_monitored_mass_is_bounded((probe, povm) in setup(8)) {
        let b = basis();
        let limited = probabilities_limited(&probe, &povm, &b).unwrap();
        // Monitored mass after damping is bounded by the damped probe norm.
        let bound: f64 = probe
            .weights()
            .iter()
            .zip(probe.modes())
            .map(|(w, m)| w * m.iter().enumerate().map(|(n, x)| (b.lambda(n) * x).powi(2)).sum::<f64>())
            .sum();
        let monitored: f64 = limited[..povm.len()].iter().sum();
        prop_assert!(monitored <= bound + 1e-12);
    }
}

#[test]
fn regimes_converge_for_large_bandwidth() {
    let mode = normalized(vec![1.0, 0.3, -0.2, 0.1]);
    let probe = ProbeState::pure(mode).unwrap();
    let povm = Povm::projectors(vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]]).unwrap();
    let ideal = probabilities_ideal(&probe, &povm).unwrap();
    let mut last_gap = f64::INFINITY;
    for c in [2.0, 5.0, 10.0, 20.0] {
        let b = ProlateBasis::new(SlepianParams::with_unit_window(c).unwrap(), 3).unwrap();
        let limited = probabilities_limited(&probe, &povm, &b).unwrap();
        let gap = ideal.iter().zip(&limited).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < last_gap, "c={c}");
        last_gap = gap;
    }
    assert!(last_gap < 1e-6);
}

#[test]
fn bernoulli_and_multinomial_fisher() {
    let f = fisher_matrix(
        |t: &[f64]| Ok(vec![t[0], 1.0 - t[0]]),
        &[0.3],
        &["p"],
        &FisherOptions::default(),
    )
    .unwrap();
    assert!((f.get(0, 0) - 1.0 / (0.3 * 0.7)).abs() < 1e-6 / (0.3 * 0.7));

    // p = (a, b, 1 − a − b): F = diag(1/a, 1/b) + 1/(1−a−b).
    let (a, b) = (0.2, 0.5);
    let f = fisher_matrix(
        |t: &[f64]| Ok(vec![t[0], t[1], 1.0 - t[0] - t[1]]),
        &[a, b],
        &["a", "b"],
        &FisherOptions::default(),
    )
    .unwrap();
    let r = 1.0 / (1.0 - a - b);
    let want = [[1.0 / a + r, r], [r, 1.0 / b + r]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((f.get(i, j) - want[i][j]).abs() < 1e-6 * want[i][j].abs());
        }
    }
    let bound = crb(&f).unwrap();
    // F⁻¹ is the multinomial covariance, diagonal a(1−a), b(1−b).
    assert!((bound[0] - (a * (1.0 - a)).sqrt()).abs() < 1e-6);
    assert!((bound[1] - (b * (1.0 - b)).sqrt()).abs() < 1e-6);
}

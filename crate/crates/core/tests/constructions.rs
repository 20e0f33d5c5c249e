//! Example families: spectral pairs, oscillating level sets, reports.

use framedim::constructions::{
    build_digit_measure, counterexample_report, enumerate_spectrum, mixed_measure,
    oscillating_levelset,
};
use framedim::frame::{gram_matrix, identity_deviation};
use framedim::{Cell, LevelSet, Limits, MeasureSpec};

#[test]
fn spectral_pairs_up_to_1024_atoms() {
    for p in [2u32, 3] {
        for levels in [
            LevelSet::all(),
            LevelSet::evens(),
            LevelSet::explicit(vec![1, 4, 5, 9]).unwrap(),
        ] {
            let nu = build_digit_measure(p, levels.clone()).unwrap();
            for n in 1..=12u64 {
                if (p as u128).pow(levels.count_upto(n) as u32) > 1024 {
                    break;
                }
                let mu = nu.truncate_digit(n, &Limits::DEFAULT).unwrap();
                let lambda = enumerate_spectrum(p, levels.clone(), n, 0, &Limits::DEFAULT).unwrap();
                let g = gram_matrix(&mu, &lambda, 1e-13, &Limits::DEFAULT).unwrap();
                assert!(identity_deviation(&g) < 1e-9, "p={p} n={n}");
            }
        }
    }
}

#[test]
fn lebesgue_equivalent_cell_masses() {
    let nu = build_digit_measure(2, LevelSet::all()).unwrap();
    for k in 0..32 {
        let m = nu.cell_mass(&Cell::new(2, 5, vec![k]).unwrap()).unwrap();
        assert!((m - 1.0 / 32.0).abs() < 1e-15);
    }
}

#[test]
fn oscillating_window_bounds() {
    for n_max in [200u64, 400, 1000] {
        let o = oscillating_levelset(1.0 / 3.0, 2.0 / 3.0, 2.0, n_max).unwrap();
        assert!((o.window_min - 1.0 / 3.0).abs() <= 0.05);
        assert!((o.window_max - 2.0 / 3.0).abs() <= 0.05);
        let tail = &o.partial_densities[o.window_start as usize - 1..];
        assert!(tail.iter().all(|&d| d >= o.window_min && d <= o.window_max));
    }
}

#[test]
fn counterexample_verdicts() {
    let leb = counterexample_report(2, LevelSet::all(), 40, &Limits::DEFAULT).unwrap();
    assert!(!leb.disproves_conjecture1);
    assert!((leb.entropy_upper.value - 1.0).abs() < 0.05);
    assert!((leb.beurling.value - 1.0).abs() < 0.1);

    let osc = LevelSet::oscillating(1.0 / 3.0, 2.0 / 3.0, 2.0).unwrap();
    let mut seen_true = false;
    for n_max in [200u32, 400, 800] {
        let r = counterexample_report(2, osc.clone(), n_max, &Limits::DEFAULT).unwrap();
        if seen_true {
            assert!(
                r.disproves_conjecture1,
                "verdict flipped at n_max = {n_max}"
            );
        }
        seen_true |= r.disproves_conjecture1;
    }
    assert!(seen_true);
}

#[test]
fn mixed_measure_of_digit_measures() {
    let rho = mixed_measure(
        build_digit_measure(2, LevelSet::evens()).unwrap(),
        build_digit_measure(3, LevelSet::all()).unwrap(),
    )
    .unwrap();
    assert!((rho.fourier(&[0.0, 0.0], 1e-13).unwrap().re - 2.0).abs() < 1e-13);
    let mu = build_digit_measure(2, LevelSet::evens()).unwrap();
    let v = rho.fourier(&[1.3, 0.0], 1e-12).unwrap();
    let want = mu.fourier(&[1.3], 1e-13).unwrap() + 1.0;
    assert!((v - want).norm() < 2e-12);
    assert!(mixed_measure(MeasureSpec::zero(1), MeasureSpec::dirac_origin(1)).is_err());
}

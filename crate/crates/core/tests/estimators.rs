//! Dimension estimators on families with known answers.

use framedim::estimate::{
    ball_count, beurling_dim_estimate, digit_entropy_exact, entropy_dim_estimate,
    fourier_dim_estimate, lev_exponent_estimate, lev_integral, partition_entropy, sup_count,
    EntropyBound, FourierDimConfig, LevConfig,
};
use framedim::{Atom, LevelSet, Limits, MeasureSpec, Method, SpectrumSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn integer_window(n: i64) -> SpectrumSet {
    let pts: Vec<f64> = (0..n).map(|k| k as f64).collect();
    SpectrumSet::from_reals(&pts).unwrap()
}

#[test]
fn digit_entropy_formula_agrees_with_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let p = rng.random_range(2..=5u32);
        let levels: Vec<u64> = (1..=20).filter(|_| rng.random_bool(0.5)).collect();
        let set = LevelSet::explicit(levels).unwrap();
        let nu = MeasureSpec::digit(p, set.clone()).unwrap();
        let n = rng.random_range(1..=12u32);
        let exact = digit_entropy_exact(&set, p, n as u64);
        let part = partition_entropy(&nu, n, p).unwrap();
        assert!((exact - part).abs() < 1e-12, "p={p} n={n}");
    }
}

#[test]
fn entropy_of_atoms_counts_cells() {
    // Four equal atoms in distinct dyadic quarters: H = 2 bits from depth 2 on.
    let atoms = [0.1, 0.3, 0.6, 0.9]
        .map(|x| Atom::new(vec![x], 0.25))
        .to_vec();
    let mu = MeasureSpec::atomic(atoms).unwrap();
    assert!((partition_entropy(&mu, 1, 2).unwrap() - 1.0).abs() < 1e-15);
    for n in 2..10 {
        assert!((partition_entropy(&mu, n, 2).unwrap() - 2.0).abs() < 1e-15);
    }
    let est = entropy_dim_estimate(&mu, 40, EntropyBound::Upper, None).unwrap();
    assert!(est.value < 0.1);
}

#[test]
fn entropy_dimension_of_evens() {
    let nu = MeasureSpec::digit(2, LevelSet::evens()).unwrap();
    let up = entropy_dim_estimate(&nu, 40, EntropyBound::Upper, None).unwrap();
    let lo = entropy_dim_estimate(&nu, 40, EntropyBound::Lower, None).unwrap();
    assert!((0.48..=0.52).contains(&up.value));
    assert!(lo.value <= up.value);
    assert_eq!(up.curve.len(), 40);
}

#[test]
fn beurling_dimension_of_integer_window_is_one() {
    let est = beurling_dim_estimate(
        &integer_window(4096),
        None,
        Method::SlopeFit,
        &Limits::DEFAULT,
    )
    .unwrap();
    assert!((est.value - 1.0).abs() < 0.05, "{}", est.value);
}

#[test]
fn beurling_dimension_of_single_point_is_zero() {
    let est = beurling_dim_estimate(&integer_window(1), None, Method::SlopeFit, &Limits::DEFAULT)
        .unwrap();
    assert_eq!(est.value, 0.0);
}

#[test]
fn beurling_dimension_of_evens_spectrum() {
    let lambda = SpectrumSet::digit(2, LevelSet::evens(), 24, 0).unwrap();
    let est = beurling_dim_estimate(&lambda, None, Method::TailMax, &Limits::DEFAULT).unwrap();
    assert!((est.value - 0.5).abs() < 0.1, "{}", est.value);
}

#[test]
fn ball_count_brute_force_oracle() {
    let lambda = SpectrumSet::digit(3, LevelSet::odds(), 7, 0).unwrap();
    let pts: Vec<f64> = lambda
        .points(&Limits::DEFAULT)
        .unwrap()
        .into_iter()
        .map(|q| q[0])
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let t = rng.random_range(-50.0..800.0);
        let h = rng.random_range(0.5..300.0);
        let brute = pts.iter().filter(|&&x| (x - t).abs() <= h).count() as u128;
        assert_eq!(ball_count(&lambda, &[t], h).unwrap(), brute);
    }
}

#[test]
fn sup_count_is_exact_on_explicit_sets() {
    let set = SpectrumSet::from_reals(&[0.0, 1.0, 1.5, 2.0, 10.0]).unwrap();
    assert_eq!(sup_count(&set, 0.5, &Limits::DEFAULT).unwrap().count, 3);
    assert_eq!(sup_count(&set, 0.2, &Limits::DEFAULT).unwrap().count, 1);
}

#[test]
fn fourier_dimension_atomic_and_lebesgue() {
    let cfg = FourierDimConfig::default();
    let atoms =
        MeasureSpec::atomic(vec![Atom::new(vec![0.0], 0.5), Atom::new(vec![0.3], 0.5)]).unwrap();
    let a = fourier_dim_estimate(&atoms, &cfg).unwrap();
    assert_eq!(a.value, 0.0);
    let l = fourier_dim_estimate(&MeasureSpec::lebesgue(), &cfg).unwrap();
    assert!((0.9..=1.0).contains(&l.value), "{}", l.value);
}

#[test]
fn lev_integral_of_lebesgue_matches_closed_form_growth() {
    // Parseval: the full integral is ‖1_[0,1]‖² = 1; the tail beyond r is about 1/(π² r).
    let leb = MeasureSpec::lebesgue();
    let a = lev_integral(&leb, 64.0, 1e-8).unwrap();
    let b = lev_integral(&leb, 128.0, 1e-8).unwrap();
    assert!((a - 1.0).abs() < 0.01, "{a}");
    assert!((b - 1.0).abs() < 0.01, "{b}");
    let dirac = MeasureSpec::dirac_origin(1);
    assert!((lev_integral(&dirac, 10.0, 1e-8).unwrap() - 20.0).abs() < 1e-6);
}

#[test]
fn lev_exponents_of_extreme_cases() {
    let cfg = LevConfig::default();
    let d = lev_exponent_estimate(&MeasureSpec::dirac_origin(1), &cfg).unwrap();
    assert!(d.value.abs() <= 0.05, "{}", d.value);
    let l = lev_exponent_estimate(&MeasureSpec::lebesgue(), &cfg).unwrap();
    assert!((0.95..=1.05).contains(&l.value), "{}", l.value);
}

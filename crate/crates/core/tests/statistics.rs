//! Seeded finite-N reproductions of the construction and distribution examples.

use qcantor::constructions::{build, rebase, ConstructionSpec, Diagnostics, DigitSource};
use qcantor::distribution::{
    dyadic_hotspot_scan, empirical_vs_density, joint_cell_interval_stats, mass_of, star_discrepancy, OrbitSample,
    PiecewiseDensity,
};
use qcantor::expansion::{value_of, CantorReal};
use qcantor::rational::{rat, to_f64};
use qcantor::rng::SplitMix64;
use qcantor::windows::ExclusionSet;

#[test]
fn equispaced_discrepancy_is_half_over_n() {
    for n in 1..=100i64 {
        let s = OrbitSample::from_exact((1..=n).map(|k| rat(2 * k - 1, 2 * n)).collect()).unwrap();
        assert_eq!(star_discrepancy(&s).unwrap().value.to_rational().unwrap(), rat(1, 2 * n));
    }
}

#[test]
fn random_point_has_no_dyadic_hotspots() {
    let n = 1_000_000;
    let guard = 48;
    let bases: Vec<u64> = (0..n + guard).map(|i| 2 + (i % 2) as u64).collect();
    let mut rng = SplitMix64::new(2024);
    let digits: Vec<u64> = bases.iter().map(|&b| rng.below(b)).collect();
    let y = CantorReal::explicit(digits, bases).unwrap();
    let sample = OrbitSample::from_orbit(&y, n, &rat(1, 1 << 40)).unwrap();
    let scan = dyadic_hotspot_scan(&sample, 8, &rat(2, 1), &ExclusionSet::None).unwrap();
    assert!(scan.all_within, "{:?}", scan.levels);
}

#[test]
fn ex31_joint_table_deviates() {
    let c = build(&ConstructionSpec::Ex31 { y4: DigitSource::Champernowne, n: 200_000 }).unwrap();
    let sample = c.orbit_sample(&rat(1, 1 << 40)).unwrap();
    let n = 250_000;
    let halves = [(rat(0, 1), rat(1, 2)), (rat(1, 2), rat(1, 1))];
    let t = joint_cell_interval_stats(c.bases().unwrap(), &sample, 1, n, &halves).unwrap();
    // base 4 only follows a digit below 2, so that orbit point sits in [0, ½)
    assert_eq!(t.frequency(&[4], 1), Some(rat(0, 1)));
    assert!(t.sup_deviation > 0.1);
}

#[test]
fn ex32_split_ratio_and_density_fit() {
    let random = build(&ConstructionSpec::Ex32 { y4: DigitSource::Random { seed: 3 }, n: 1_000_000, c: None }).unwrap();
    let Diagnostics::Split(d) = &random.diagnostics else { panic!() };
    assert!((to_f64(&d.m_ratio.to_rational().unwrap()) - 1.25).abs() <= 0.02);
    let c = build(&ConstructionSpec::Ex32 { y4: DigitSource::Champernowne, n: 300_000, c: None }).unwrap();
    let sample = c.orbit_sample(&rat(1, 1 << 40)).unwrap();
    let fit = empirical_vs_density(&sample, &PiecewiseDensity::two_step(&rat(5, 4)).unwrap()).unwrap();
    assert!(fit.sup_error.decimal <= 0.05, "{:?}", fit.sup_error);
}

#[test]
fn ex35_digit_zero_and_unbiased_case() {
    let c = build(&ConstructionSpec::Ex35 { a: 2, b: 4, eps: rat(1, 4), seed: 1, n: 400_000 }).unwrap();
    let Diagnostics::Ex35(d) = &c.diagnostics else { panic!() };
    assert_eq!(d.digit0_target.to_rational().unwrap(), rat(3, 8));
    assert!((d.digit0_frequency.decimal - 0.375).abs() <= 0.005);
    let flat = build(&ConstructionSpec::Ex35 { a: 2, b: 4, eps: rat(0, 1), seed: 1, n: 400_000 }).unwrap();
    let Diagnostics::Ex35(d) = &flat.diagnostics else { panic!() };
    assert_eq!(d.orbit_low_target.to_rational().unwrap(), rat(1, 2));
    let low = mass_of(&flat.orbit_sample(&rat(1, 1 << 40)).unwrap(), &rat(0, 1), &rat(1, 2)).unwrap();
    assert!((to_f64(&low) - 0.5).abs() <= 0.01);
}

#[test]
fn ex36_variant_i_share_shrinks() {
    let c = build(&ConstructionSpec::Ex36i { g: 2, k_max: 1 << 16, seed: 8, n: 200_000 }).unwrap();
    let Diagnostics::Ex36(d) = &c.diagnostics else { panic!() };
    assert!(d.a1_share_decreasing);
    assert_eq!(d.a1_zero_frequency.as_ref().unwrap().to_rational().unwrap(), rat(1, 1));
    assert!(d.mean_drift);
}

#[test]
fn rebase_value_identity_seeded() {
    let mut rng = SplitMix64::new(6);
    let patterns: [(u64, &[u64]); 4] = [(6, &[2, 3]), (6, &[3, 2]), (12, &[2, 3, 2]), (30, &[5, 3, 2])];
    for _ in 0..1000 {
        let (g, pattern) = patterns[rng.below(4) as usize];
        let len = 1 + rng.below(40) as usize;
        let src: Vec<u64> = (0..len).map(|_| rng.below(g)).collect();
        let (bases, digits) = rebase(&src, g, pattern).unwrap();
        assert_eq!(value_of(&digits, &bases, digits.len()).unwrap(), value_of(&src, &vec![g; len], len).unwrap());
    }
    assert!(rebase(&[1], 6, &[2, 2]).is_err());
}

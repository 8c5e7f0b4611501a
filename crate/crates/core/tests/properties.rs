use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;
use qcantor::complexity::{block_entropy, determinism_check, distinct_blocks, p_eps, Verdict};
use qcantor::constructions::{rebase, rebase_digit};
use qcantor::distribution::{star_discrepancy, OrbitSample};
use qcantor::expansion::{digits_of, floor_times, orbit_point, value_of};
use qcantor::generators::{generate, GeneratorSpec};
use qcantor::normality::BlockStats;
use qcantor::rational::rat;
use qcantor::windows::{count_windows, ExclusionSet};
use qcantor::Rational;

fn int(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn bases_and_x(max_len: usize) -> impl Strategy<Value = (Vec<u64>, Rational)> {
    (prop::collection::vec(2u64..7, 1..max_len), 1u64..1_000_000)
        .prop_flat_map(|(q, den)| (Just(q), 0..den, Just(den)))
        .prop_map(|(q, num, den)| (q, rat(num as i64, den as i64)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_counts_conserve((q, x) in bases_and_x(400), ell in 1usize..4) {
        prop_assume!(q.len() >= ell);
        let n = q.len() - ell + 1;
        let d = digits_of(&x, &q, q.len()).unwrap();
        let stats = BlockStats::new(&q, &d, ell, n, &ExclusionSet::None).unwrap();
        let exp = stats.all_expectations();
        prop_assert_eq!(exp.values().sum::<Rational>(), int(n));
        prop_assert_eq!(stats.digit_block_counts().values().sum::<u64>(), n as u64);
        let bs: Vec<Vec<u64>> = stats.base_block_counts().into_keys().collect();
        for (block, e) in &exp {
            prop_assert_eq!(&bs.iter().map(|b| stats.expectation_db(block, b)).sum::<Rational>(), e);
            prop_assert_eq!(bs.iter().map(|b| stats.count_db(block, b)).sum::<u64>(), stats.count(block));
        }
    }

    #[test]
    fn merged_partials_match_whole((q, x) in bases_and_x(300), ell in 1usize..4, cut in 0usize..300) {
        prop_assume!(q.len() >= ell);
        let n = q.len() - ell + 1;
        let d = digits_of(&x, &q, q.len()).unwrap();
        let cut = cut.min(q.len());
        let none = ExclusionSet::None;
        let left = BlockStats::partial(&q[..cut], &d[..cut], ell, 1, &none);
        let right = BlockStats::partial(&q[cut..], &d[cut..], ell, cut + 1, &none);
        let merged = left.merge(right, &none);
        let whole = BlockStats::new(&q, &d, ell, n, &none).unwrap();
        prop_assert_eq!(merged.digit_block_counts(), whole.digit_block_counts());
        prop_assert_eq!(merged.all_expectations(), whole.all_expectations());
    }

    #[test]
    fn digits_value_orbit((q, x) in bases_and_x(200)) {
        let n = q.len();
        let d = digits_of(&x, &q, n).unwrap();
        let v = value_of(&d, &q, n).unwrap();
        let prod: BigInt = q.iter().map(|&b| BigInt::from(b)).product();
        let tail = orbit_point(&x, &q, n).unwrap() / Rational::from_integer(prod);
        prop_assert_eq!(v + tail, x.clone());
        for i in 0..n {
            prop_assert_eq!(floor_times(&orbit_point(&x, &q, i).unwrap(), q[i]), d[i]);
        }
    }

    #[test]
    fn finite_digits_round_trip(q in prop::collection::vec(2u64..12, 1..80), seed in any::<u64>()) {
        let mut s = seed;
        let digits: Vec<u64> = q.iter().map(|&b| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1); (s >> 33) % b }).collect();
        let v = value_of(&digits, &q, q.len()).unwrap();
        prop_assert_eq!(digits_of(&v, &q, q.len()).unwrap(), digits);
    }

    #[test]
    fn discrepancy_matches_brute_force(den in 1u64..40, raw in prop::collection::vec(any::<u64>(), 1..60)) {
        let points: Vec<Rational> = raw.iter().map(|r| rat((r % den) as i64, den as i64)).collect();
        let fast = star_discrepancy(&OrbitSample::from_exact(points.clone()).unwrap()).unwrap().value.to_rational().unwrap();
        let n = int(points.len());
        let mut best = rat(0, 1);
        for t in &points {
            for c in [points.iter().filter(|u| *u < t).count(), points.iter().filter(|u| *u <= t).count()] {
                let diff = int(c) / &n - t;
                let diff = if diff < rat(0, 1) { -diff } else { diff };
                if diff > best { best = diff; }
            }
        }
        prop_assert_eq!(&fast, &best);
        prop_assert!(fast >= rat(1, 2) / n);
    }

    #[test]
    fn greedy_p_eps_is_optimal(seq in prop::collection::vec(2u64..5, 1..16), k in 1usize..4, budget in 0usize..4) {
        prop_assume!(seq.len() >= k);
        let windows = seq.len() - k + 1;
        let greedy = p_eps(&seq, k, &rat(budget as i64, windows as i64), windows).unwrap();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << windows) {
            if mask.count_ones() as usize > budget { continue; }
            let kept: BTreeSet<&[u64]> = (0..windows).filter(|i| mask & (1 << i) == 0).map(|i| &seq[i..i + k]).collect();
            best = best.min(kept.len());
        }
        prop_assert_eq!(greedy, best);
    }

    #[test]
    fn p_eps_monotone_and_entropy_bounded(seq in prop::collection::vec(2u64..5, 20..200), k in 1usize..5) {
        let n = seq.len() - k + 1;
        let mut last = usize::MAX;
        for e in 0..=10 {
            let p = p_eps(&seq, k, &rat(e, 10), n).unwrap();
            prop_assert!(p <= last);
            last = p;
        }
        let p0 = distinct_blocks(&seq, k, n, &ExclusionSet::None).unwrap();
        prop_assert_eq!(p_eps(&seq, k, &rat(0, 1), n).unwrap(), p0);
        let h = block_entropy(&seq, k, n).unwrap().entropy;
        prop_assert!(h <= (p0 as f64).ln() + 1e-12);
    }

    #[test]
    fn rebase_preserves_value(raw in prop::collection::vec(any::<u64>(), 1..60), which in 0usize..3) {
        let (g, pattern): (u64, Vec<u64>) = [(6, vec![2, 3]), (12, vec![3, 2, 2]), (10, vec![5, 2])][which].clone();
        let src: Vec<u64> = raw.iter().map(|r| r % g).collect();
        let (bases, digits) = rebase(&src, g, &pattern).unwrap();
        let flat = vec![g; src.len()];
        prop_assert_eq!(value_of(&digits, &bases, digits.len()).unwrap(), value_of(&src, &flat, src.len()).unwrap());
        for &d in &src {
            let parts = rebase_digit(d, &pattern);
            prop_assert_eq!(parts.iter().zip(&pattern).fold(0, |acc, (&x, &b)| acc * b + x), d);
        }
    }

    #[test]
    fn window_counts_split_anywhere(data in prop::collection::vec(0u8..3, 5..200), k in 1usize..5, cut in 0usize..200) {
        prop_assume!(data.len() >= k);
        let n = data.len() - k + 1;
        let cut = cut.min(data.len());
        let excl = ExclusionSet::from_indices([2usize, 5, 9]);
        let whole = count_windows(&data, k, n, 1, &excl);
        let left = qcantor::windows::WindowCounter::from_slice(k, 1, &data[..cut], &excl);
        let right = qcantor::windows::WindowCounter::from_slice(k, cut + 1, &data[cut..], &excl);
        prop_assert_eq!(left.merge(right, &excl).sorted(), whole.sorted());
    }
}

#[test]
fn sturmian_has_k_plus_one_factors() {
    let s = generate(&GeneratorSpec::sturmian_golden(), 100_020).unwrap();
    for k in 1..=20 {
        assert_eq!(distinct_blocks(&s, k, 100_000, &ExclusionSet::None).unwrap(), k + 1);
    }
}

#[test]
fn thue_morse_factor_counts() {
    let s = generate(&GeneratorSpec::thue_morse(2, 3), (1 << 20) + 4).unwrap();
    assert_eq!(distinct_blocks(&s, 4, 1 << 20, &ExclusionSet::None).unwrap(), 10);
}

#[test]
fn verdicts_separate_zero_and_positive_entropy() {
    let eps = [rat(0, 1), rat(1, 10), rat(1, 5), rat(3, 10)];
    let n = 200_000;
    let tm = generate(&GeneratorSpec::thue_morse(2, 3), n + 20).unwrap();
    assert_eq!(determinism_check(&tm, n, &eps, 20).unwrap().verdict, Verdict::ConsistentWithDeterministic);
    let periodic = generate(&GeneratorSpec::Periodic { pattern: vec![2, 3, 3] }, n + 20).unwrap();
    assert_eq!(determinism_check(&periodic, n, &eps, 20).unwrap().verdict, Verdict::ConsistentWithDeterministic);
    let bern = generate(&GeneratorSpec::uniform_bernoulli(vec![2, 3], 5), n + 20).unwrap();
    let report = determinism_check(&bern, n, &eps, 12).unwrap();
    assert_eq!(report.verdict, Verdict::ConsistentWithPositiveEntropy);
    assert_eq!(report.p_eps(10, &rat(0, 1)), Some(1024));
    let short = generate(&GeneratorSpec::uniform_bernoulli(vec![2, 3], 5), 40).unwrap();
    assert_eq!(determinism_check(&short, 20, &eps, 10).unwrap().verdict, Verdict::Unresolved);
}

#[test]
fn block_entropy_nondecreasing_in_k() {
    let s = generate(&GeneratorSpec::uniform_bernoulli(vec![2, 3, 5], 1), 50_010).unwrap();
    let hs: Vec<f64> = (1..=6).map(|k| block_entropy(&s, k, 50_000).unwrap().entropy).collect();
    for w in hs.windows(2) {
        assert!(w[1] >= w[0]);
    }
}

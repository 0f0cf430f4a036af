use mlsd::sampling::{gen_a, gen_se};
use mlsd::{ParamSet, Ring, Seed256};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn ring() -> Ring {
    Ring::new(ParamSet::default()).unwrap()
}

fn binomial_coefficients(r: &Ring, samples: usize) -> Vec<i32> {
    let mut out = Vec::with_capacity(samples);
    let mut seed = 0u32;
    while out.len() < samples {
        let mut xi = [0u8; 32];
        xi[..4].copy_from_slice(&seed.to_le_bytes());
        for nonce in 0..=255u8 {
            out.extend(r.centered_coeffs(&gen_se(&Seed256(xi), nonce, r)));
        }
        seed += 1;
    }
    out.truncate(samples);
    out
}

fn choose(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn binomial_mean_and_variance() {
    let r = ring();
    let xs = binomial_coefficients(&r, 100_000);
    let n = xs.len() as f64;
    let mean = xs.iter().map(|&x| x as f64).sum::<f64>() / n;
    let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() < 3.0 * (8.0f64 / n).sqrt(), "mean {mean}");
    assert!((var - 8.0).abs() < 0.05 * 8.0, "variance {var}");
    assert!(xs.iter().all(|x| x.abs() <= 16));
}

#[test]
fn binomial_point_probabilities() {
    let r = ring();
    let xs = binomial_coefficients(&r, 1_000_000);
    let n = xs.len() as f64;
    let mut counts = [0u64; 33];
    for &x in &xs {
        counts[(x + 16) as usize] += 1;
    }
    // Exact count from an independent implementation of the same stream.
    assert_eq!(counts[16], 141_024);

    let mut excursions = Vec::new();
    for t in -16i32..=16 {
        let p = choose(32, (16 + t) as u64) / 2f64.powi(32);
        let observed = counts[(t + 16) as usize] as f64 / n;
        let se = (p * (1.0 - p) / n).sqrt();
        // the extreme tails have expected count far below one
        if p * n < 5.0 {
            assert!(counts[(t + 16) as usize] <= 10, "t = {t}");
            continue;
        }
        let z = (observed - p) / se;
        assert!(z.abs() < 4.0, "t = {t}: z = {z}");
        if z.abs() > 3.0 {
            excursions.push((t, z));
        }
    }
    // 25 tested points at 3 standard errors: one excursion is a ~7% event
    assert!(excursions.len() <= 1, "{excursions:?}");
}

#[test]
fn matrix_is_uniform() {
    let r = ring();
    let a = gen_a(&Seed256::default(), &r);
    let coeffs: Vec<u32> = a
        .entries()
        .iter()
        .flat_map(|e| e.evals().to_vec())
        .collect();
    let n = coeffs.len() as f64;
    let mean = coeffs.iter().map(|&c| c as f64).sum::<f64>() / n;
    let sigma = 12289.0 / (12.0 * n).sqrt();
    assert!((mean - 6144.0).abs() < 3.0 * sigma, "mean {mean}");

    let mut buckets = [0f64; 16];
    for &c in &coeffs {
        buckets[(c as usize * 16) / 12289] += 1.0;
    }
    let expected = |i: usize| {
        let lo = (i * 12289).div_ceil(16);
        let hi = ((i + 1) * 12289).div_ceil(16);
        n * (hi - lo) as f64 / 12289.0
    };
    let stat: f64 = (0..16)
        .map(|i| (buckets[i] - expected(i)).powi(2) / expected(i))
        .sum();
    let p = 1.0 - ChiSquared::new(15.0).unwrap().cdf(stat);
    assert!(p > 0.001, "chi-square {stat}, p = {p}");
}

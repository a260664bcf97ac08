use std::f64::consts::PI;

use kgeom::testbeds::{ellipsoid_sample, fibonacci_sphere, fill_distance, random_sphere, torus_rejection_sample};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi_square_p(observed: &[usize], expected: &[f64]) -> f64 {
    let stat: f64 = observed.iter().zip(expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

fn histogram(values: impl Iterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Vec<usize> {
    let mut h = vec![0; bins];
    for v in values {
        let b = (((v - lo) / (hi - lo)) * bins as f64).floor() as usize;
        h[b.min(bins - 1)] += 1;
    }
    h
}

#[test]
fn torus_rejection_sample_has_area_density_in_v() {
    let (r1, r2) = (2.0, 0.5);
    let m = 100_000;
    let cloud = torus_rejection_sample(m, r1, r2, 3).unwrap();
    let angles = cloud.iter().map(|p| {
        let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
        p[2].atan2(rho - r1).rem_euclid(2.0 * PI)
    });
    let bins = 36;
    let observed = histogram(angles, 0.0, 2.0 * PI, bins);
    // Density (R1 + R2 cos v) / (2 pi R1), integrated over each bin.
    let width = 2.0 * PI / bins as f64;
    let expected: Vec<f64> = (0..bins)
        .map(|k| {
            let (a, b) = (k as f64 * width, (k + 1) as f64 * width);
            m as f64 * (r1 * width + r2 * (b.sin() - a.sin())) / (2.0 * PI * r1)
        })
        .collect();
    let p = chi_square_p(&observed, &expected);
    assert!(p > 1e-3, "chi-square p-value {p}");

    let azimuth = cloud.iter().map(|p| p[1].atan2(p[0]).rem_euclid(2.0 * PI));
    let observed = histogram(azimuth, 0.0, 2.0 * PI, bins);
    let p = chi_square_p(&observed, &vec![m as f64 / bins as f64; bins]);
    assert!(p > 1e-3, "azimuth chi-square p-value {p}");
}

#[test]
fn random_sphere_heights_are_uniform() {
    let m = 20_000;
    let cloud = random_sphere(m, 9).unwrap();
    let observed = histogram(cloud.iter().map(|p| p[2]), -1.0, 1.0, 20);
    let p = chi_square_p(&observed, &[m as f64 / 20.0; 20]);
    assert!(p > 1e-3, "chi-square p-value {p}");
}

#[test]
fn ellipsoid_sample_fills_octants_evenly() {
    let m = 8_000;
    let cloud = ellipsoid_sample(m, 2.0, 0.5, 1.0, 4).unwrap();
    let mut counts = vec![0; 8];
    for p in cloud.iter() {
        let k = usize::from(p[0] > 0.0) + 2 * usize::from(p[1] > 0.0) + 4 * usize::from(p[2] > 0.0);
        counts[k] += 1;
        let r = (p[0] / 2.0).powi(2) + (p[1] / 0.5).powi(2) + p[2].powi(2);
        assert!((r - 1.0).abs() < 1e-12);
    }
    let p = chi_square_p(&counts, &[m as f64 / 8.0; 8]);
    assert!(p > 1e-3, "chi-square p-value {p}");
}

#[test]
fn fibonacci_fill_distance_halves_when_quadrupling() {
    let reference = random_sphere(20_000, 1).unwrap();
    for m in [100, 200] {
        let h = fill_distance(&fibonacci_sphere(m).unwrap(), &reference).unwrap();
        let h4 = fill_distance(&fibonacci_sphere(4 * m).unwrap(), &reference).unwrap();
        let ratio = h4 / h;
        assert!((0.4..=0.6).contains(&ratio), "m={m}: ratio {ratio}");
    }
}

//! Point sets in the open polydisk.
//!
//! Torus grids for supremum estimation live in [`crate::functionals`]; this
//! module covers interior samples used by the criteria and injectivity scans.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::series::ComplexPoint;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Tensor product over axes of the per-axis polar set `radii × angles`.
pub fn polar_sample(n: usize, radii: &[f64], angles: usize) -> Vec<ComplexPoint> {
    let axis: Vec<Complex64> = radii
        .iter()
        .flat_map(|&r| (0..angles).map(move |k| Complex64::from_polar(r, TAU * k as f64 / angles as f64)))
        .collect();
    tensor(n, &axis)
}

fn tensor(n: usize, axis: &[Complex64]) -> Vec<ComplexPoint> {
    let total = axis.len().pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut coords = Vec::with_capacity(n);
            for _ in 0..n {
                coords.push(axis[code % axis.len()]);
                code /= axis.len();
            }
            ComplexPoint::new(coords)
        })
        .collect()
}

/// Default interior sample for pointwise criteria.
pub fn default_polydisk_sample(n: usize) -> Vec<ComplexPoint> {
    match n {
        1 => polar_sample(1, &[0.0, 0.25, 0.5, 0.75, 0.9, 0.99], 64),
        2 => polar_sample(2, &[0.0, 0.3, 0.6, 0.9, 0.99], 12),
        3 => polar_sample(3, &[0.0, 0.5, 0.99], 6),
        _ => polar_sample(n, &[0.0, 0.99], 4),
    }
}

/// `k × k` Cartesian grid of `center + [-w, w]²`, keeping points with
/// `|z| ≤ limit`. Symmetric under `z ↦ 2·center − z` wherever both images
/// survive the cut.
pub fn centered_tensor_grid(center: Complex64, half_width: f64, k: usize, limit: f64) -> Vec<ComplexPoint> {
    assert!(k >= 2, "grid needs at least two nodes per side");
    let step = 2.0 * half_width / (k - 1) as f64;
    let mut out = Vec::new();
    for a in 0..k {
        for b in 0..k {
            // symmetric node placement: node a and node k-1-a are exact negatives
            let x = (2.0 * a as f64 - (k - 1) as f64) * step / 2.0;
            let y = (2.0 * b as f64 - (k - 1) as f64) * step / 2.0;
            let z = center + Complex64::new(x, y);
            if z.norm() <= limit {
                out.push(ComplexPoint::new(vec![z]));
            }
        }
    }
    out
}

/// `k × k` grid over the square `[-radius, radius]²` cut to the disk of that radius.
pub fn disk_tensor_grid(k: usize, radius: f64) -> Vec<ComplexPoint> {
    centered_tensor_grid(Complex64::new(0.0, 0.0), radius, k, radius)
}

/// Radical inverse of `index` in base `base`.
fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / f64::from(base);
    let mut factor = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % b) as f64 * factor;
        index /= b;
        factor *= inv;
    }
    acc
}

/// Halton points in the polydisk of the given radius, one (radius, angle)
/// pair of Halton coordinates per axis, with a seeded Cranley–Patterson shift.
pub fn halton_polydisk(n: usize, count: usize, radius: f64, seed: u64) -> Vec<ComplexPoint> {
    assert!(2 * n <= PRIMES.len(), "dimension too large for the Halton table");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<f64> = (0..2 * n).map(|_| rng.gen()).collect();
    (1..=count as u64)
        .map(|i| {
            let coords = (0..n)
                .map(|j| {
                    let u = (radical_inverse(i, PRIMES[2 * j]) + shifts[2 * j]).fract();
                    let v = (radical_inverse(i, PRIMES[2 * j + 1]) + shifts[2 * j + 1]).fract();
                    Complex64::from_polar(radius * u.sqrt(), TAU * v)
                })
                .collect();
            ComplexPoint::new(coords)
        })
        .collect()
}

/// Default point set for pairwise injectivity scans: a 61² disk grid for
/// `n = 1`, otherwise 2000 Halton points.
pub fn default_injectivity_points(n: usize, seed: u64) -> Vec<ComplexPoint> {
    if n == 1 {
        disk_tensor_grid(61, 0.99)
    } else {
        halton_polydisk(n, 2000, 0.99, seed)
    }
}

/// Default polydisk sample plus the real diagonal `(r, …, r)` at 50 radii,
/// where the growth envelopes are attained.
pub fn growth_sample(n: usize) -> Vec<ComplexPoint> {
    let mut out = default_polydisk_sample(n);
    out.extend(real_radii(50, 0.99).into_iter().map(|r| ComplexPoint::real(&vec![r; n])));
    out
}

/// `count` equally spaced radii in `(0, max]`.
pub fn real_radii(count: usize, max: f64) -> Vec<f64> {
    (1..=count).map(|i| max * i as f64 / count as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn halton_points_are_inside_and_reproducible() {
        let a = halton_polydisk(2, 500, 0.99, 7);
        let b = halton_polydisk(2, 500, 0.99, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.sup_norm() <= 0.99));
        assert_ne!(a, halton_polydisk(2, 500, 0.99, 8));
    }

    #[test]
    fn centered_grid_is_symmetric() {
        let c = Complex64::new(-0.5, 0.0);
        let pts = centered_tensor_grid(c, 0.45, 31, 0.99);
        for p in &pts {
            let mirror = 2.0 * c - p.coord(0);
            if mirror.norm() > 0.99 - 1e-12 {
                continue;
            }
            assert!(
                pts.iter().any(|q| (q.coord(0) - mirror).norm() < 1e-15),
                "no mirror for {p}"
            );
        }
    }

    #[test]
    fn sample_sizes() {
        assert_eq!(polar_sample(2, &[0.5, 0.9], 3).len(), 36);
        assert_eq!(default_injectivity_points(2, 0).len(), 2000);
        let disk = disk_tensor_grid(61, 0.99);
        assert!(disk.len() > 2800 && disk.len() < 3721);
        assert!(disk.iter().all(|p| p.in_open_polydisk()));
    }
}

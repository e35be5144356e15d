//! Seeded random generators for test fixtures and sweeps.
//!
//! Everything here takes an explicit RNG so suites stay reproducible.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::functionals::certified_upper_bound;
use crate::multiindex::enumerate;
use crate::series::{ComplexPoint, PluriharmonicMap, PolySeries};

pub fn random_complex<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
}

pub fn random_unimodular<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// Uniformly random point of the polydisk of radius `radius`.
pub fn random_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> ComplexPoint {
    ComplexPoint::new(
        (0..n)
            .map(|_| {
                let r = radius * rng.gen::<f64>().sqrt();
                Complex64::from_polar(r, rng.gen_range(0.0..TAU))
            })
            .collect(),
    )
}

/// Dense random series with every coefficient of degree `min_degree..=cap`
/// populated with probability 3/4.
pub fn random_series<R: Rng>(
    rng: &mut R,
    n: usize,
    cap: u32,
    min_degree: u32,
    scale: f64,
) -> PolySeries {
    let mut s = PolySeries::zero(n, cap);
    for m in min_degree..=cap {
        for alpha in enumerate(n, m) {
            if rng.gen_bool(0.75) {
                s.set(alpha, random_complex(rng, scale)).expect("within cap");
            }
        }
    }
    s
}

/// A map in `𝓗ₙ⁰`: `h = Σ z_j + (degree ≥ 2)`, `g = (degree ≥ 2)`.
pub fn random_normalized_map<R: Rng>(rng: &mut R, n: usize, cap: u32) -> PluriharmonicMap {
    let linear = PolySeries::coordinate_sum(n, cap);
    let h_tail = random_series(rng, n, cap, 2, 1.0);
    let g = random_series(rng, n, cap, 2, 1.0);
    let h = linear.add_scaled(&h_tail, 1.0.into()).expect("shared shape");
    PluriharmonicMap::new(h, g).expect("shared shape")
}

/// Scales the nonlinear parts of `f` so the coefficient majorant equals `target`.
pub fn rescale_majorant(f: &PluriharmonicMap, target: f64) -> PluriharmonicMap {
    let bound = certified_upper_bound(f);
    if bound == 0.0 {
        return f.clone();
    }
    let factor = Complex64::new(target / bound, 0.0);
    let n = f.dim();
    let linear = PolySeries::coordinate_sum(n, f.cap());
    let h_tail = f
        .h()
        .add_scaled(&linear, Complex64::new(-1.0, 0.0))
        .expect("shared shape");
    let h = linear
        .add_scaled(&h_tail, factor)
        .expect("shared shape");
    PluriharmonicMap::new(h, f.g().scale(factor)).expect("shared shape")
}

/// Random map whose coefficient majorant is `level·u`, `u ∈ [0.3, 1]`.
pub fn random_certified_member<R: Rng>(
    rng: &mut R,
    n: usize,
    cap: u32,
    level: f64,
) -> PluriharmonicMap {
    let f = random_normalized_map(rng, n, cap);
    let u = rng.gen_range(0.3..=1.0);
    rescale_majorant(&f, level * u)
}

/// Holomorphic variant of [`random_certified_member`].
pub fn random_certified_holomorphic<R: Rng>(
    rng: &mut R,
    n: usize,
    cap: u32,
    level: f64,
) -> PluriharmonicMap {
    let f = random_normalized_map(rng, n, cap);
    let hol = PluriharmonicMap::holomorphic(f.h().clone());
    let u = rng.gen_range(0.3..=1.0);
    rescale_majorant(&hol, level * u)
}

/// Nonnegative weights summing to one.
pub fn random_weights<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let head: f64 = w[..count - 1].iter().sum();
    w[count - 1] = (1.0 - head).max(0.0);
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn rescaled_majorant_hits_target() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let f = random_normalized_map(&mut rng, 2, 4);
            let g = rescale_majorant(&f, 0.95);
            assert!((certified_upper_bound(&g) - 0.95).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for count in 1..6 {
            let w = random_weights(&mut rng, count);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }
}

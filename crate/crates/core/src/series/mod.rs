//! Truncated power series on the unit polydisk and pluriharmonic maps built
//! from pairs of them.
//!
//! A [`PolySeries`] stores raw coefficients `a_α` of `Σ a_α z^α` (no factorial
//! normalization) in a sparse table keyed by [`MultiIndex`], up to an explicit
//! inclusive degree cap. A [`PluriharmonicMap`] is the pair `(h, g)` standing
//! for `f = h + conj(g)`.

mod io;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::multiindex::{enumerate, MultiIndex};

pub use io::{parse_map, read_map_file, render_map, write_map_file, MapFile, TermRecord};

/// Tolerance used when reading normalization conditions off coefficients.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A point of `ℂⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint(Vec<Complex64>);

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        assert!(!coords.is_empty(), "a point needs at least one coordinate");
        ComplexPoint(coords)
    }

    pub fn origin(n: usize) -> Self {
        ComplexPoint::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn real(coords: &[f64]) -> Self {
        ComplexPoint::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Point with the given modulus and argument on each axis.
    pub fn from_polar(radii: &[f64], angles: &[f64]) -> Self {
        assert_eq!(radii.len(), angles.len());
        ComplexPoint::new(
            radii
                .iter()
                .zip(angles)
                .map(|(&r, &t)| Complex64::from_polar(r, t))
                .collect(),
        )
    }

    /// Point `r·(e^{iθ_1}, …, e^{iθ_n})` on the torus of radius `r`.
    pub fn on_torus(r: f64, angles: &[f64]) -> Self {
        ComplexPoint::new(angles.iter().map(|&t| Complex64::from_polar(r, t)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn coord(&self, j: usize) -> Complex64 {
        self.0[j]
    }

    /// `‖z‖_∞ = max_j |z_j|`.
    pub fn sup_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ_l |z_l|`.
    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).sum()
    }

    pub fn sup_distance(&self, other: &ComplexPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn in_open_polydisk(&self) -> bool {
        self.sup_norm() < 1.0
    }

    pub fn polar(&self) -> Vec<(f64, f64)> {
        self.0.iter().map(|c| c.to_polar()).collect()
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (r, t)) in self.polar().into_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r:.6}∠{t:.6}")?;
        }
        write!(f, ")")
    }
}

/// Serialized as polar coordinates per axis: `[{"r": …, "theta": …}, …]`.
impl Serialize for ComplexPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Polar(f64, f64);
        impl Serialize for Polar {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut s = serializer.serialize_struct("Polar", 2)?;
                s.serialize_field("r", &self.0)?;
                s.serialize_field("theta", &self.1)?;
                s.end()
            }
        }
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for (r, t) in self.polar() {
            seq.serialize_element(&Polar(r, t))?;
        }
        seq.end()
    }
}

/// Powers `z_j^k` for every axis, shared by all series evaluated at one point.
#[derive(Debug, Clone)]
pub struct PowerTable {
    powers: Vec<Vec<Complex64>>,
}

impl PowerTable {
    pub fn new(z: &ComplexPoint, max_degree: u32) -> Self {
        let powers = z
            .coords()
            .iter()
            .map(|&c| {
                let mut p = Vec::with_capacity(max_degree as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                p.push(acc);
                for _ in 0..max_degree {
                    acc *= c;
                    p.push(acc);
                }
                p
            })
            .collect();
        PowerTable { powers }
    }

    pub fn dim(&self) -> usize {
        self.powers.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.powers[0].len() as u32 - 1
    }

    pub fn monomial(&self, alpha: &MultiIndex) -> Complex64 {
        alpha
            .as_slice()
            .iter()
            .zip(&self.powers)
            .map(|(&a, p)| p[a as usize])
            .product()
    }
}

/// Truncated holomorphic power series in `n` variables with degree cap `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySeries {
    n: usize,
    cap: u32,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl PolySeries {
    pub fn zero(n: usize, cap: u32) -> Self {
        assert!(n >= 1, "dimension must be positive");
        PolySeries {
            n,
            cap,
            coeffs: BTreeMap::new(),
        }
    }

    /// `Σ_j z_j`.
    pub fn coordinate_sum(n: usize, cap: u32) -> Self {
        assert!(cap >= 1, "degree cap must admit the linear part");
        let mut s = PolySeries::zero(n, cap);
        for j in 0..n {
            s.coeffs
                .insert(MultiIndex::unit(n, j), Complex64::new(1.0, 0.0));
        }
        s
    }

    /// Builds a series from terms; repeated indices are summed.
    pub fn from_terms<I>(n: usize, cap: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut s = PolySeries::zero(n, cap);
        for (alpha, c) in terms {
            s.add_term(alpha, c)?;
        }
        Ok(s)
    }

    /// Convenience constructor from `(exponents, re, im)` triples.
    pub fn from_real_parts(n: usize, cap: u32, terms: &[(&[u32], f64, f64)]) -> Result<Self> {
        PolySeries::from_terms(
            n,
            cap,
            terms
                .iter()
                .map(|(a, re, im)| (MultiIndex::new(a.to_vec()), Complex64::new(*re, *im))),
        )
    }

    fn check_index(&self, alpha: &MultiIndex) -> Result<()> {
        if alpha.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: alpha.dim(),
            });
        }
        if alpha.degree() > self.cap {
            return Err(Error::DegreeCap {
                degree: alpha.degree(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Sets a coefficient, removing the key when the value is exactly zero.
    pub fn set(&mut self, alpha: MultiIndex, c: Complex64) -> Result<()> {
        self.check_index(&alpha)?;
        if c == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&alpha);
        } else {
            self.coeffs.insert(alpha, c);
        }
        Ok(())
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Complex64) -> Result<()> {
        let current = self.coeff(&alpha);
        self.set(alpha, current + c)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs
            .get(alpha)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero terms of exact degree `m`; a contiguous slice of the table.
    pub fn terms_of_degree(&self, m: u32) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        let mut first = vec![0; self.n];
        first[0] = m;
        let mut last = vec![0; self.n];
        last[self.n - 1] = m;
        self.coeffs
            .range(MultiIndex::new(first)..=MultiIndex::new(last))
    }

    /// `Σ_{|α|=m} |a_α|`.
    pub fn abs_sum_of_degree(&self, m: u32) -> f64 {
        self.terms_of_degree(m).map(|(_, c)| c.norm()).sum()
    }

    /// Largest degree carrying a nonzero coefficient (0 for the zero series).
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().next_back().map_or(0, |a| a.degree())
    }

    /// Smallest degree carrying a nonzero coefficient; `None` for zero.
    pub fn zero_multiplicity(&self) -> Option<u32> {
        self.coeffs.keys().next().map(|a| a.degree())
    }

    fn check_point(&self, z: &ComplexPoint) -> Result<()> {
        if z.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.dim(),
            });
        }
        Ok(())
    }

    /// `Σ_α a_α z^α`, summed in graded-lex order.
    pub fn evaluate(&self, z: &ComplexPoint) -> Result<Complex64> {
        self.check_point(z)?;
        Ok(self.evaluate_with(&PowerTable::new(z, self.degree())))
    }

    /// Evaluation against a precomputed power table covering this series.
    pub fn evaluate_with(&self, table: &PowerTable) -> Complex64 {
        debug_assert_eq!(table.dim(), self.n);
        self.coeffs
            .iter()
            .map(|(alpha, c)| c * table.monomial(alpha))
            .sum()
    }

    /// Exact term-by-term `∂/∂z_j` (zero-based axis). The cap drops by one.
    pub fn partial(&self, j: usize) -> PolySeries {
        assert!(j < self.n, "axis {j} out of range for dimension {}", self.n);
        let mut out = PolySeries::zero(self.n, self.cap.saturating_sub(1));
        for (alpha, c) in &self.coeffs {
            let a = alpha.get(j);
            if a == 0 {
                continue;
            }
            let lowered = alpha.lowered(j).expect("a_j > 0");
            out.coeffs.insert(lowered, c * f64::from(a));
        }
        out
    }

    /// `∂²/∂z_j∂z_k`, symmetric in `(j, k)`.
    pub fn second_partial(&self, j: usize, k: usize) -> PolySeries {
        self.partial(j).partial(k)
    }

    pub fn scale(&self, c: Complex64) -> PolySeries {
        let mut out = PolySeries::zero(self.n, self.cap);
        for (alpha, v) in &self.coeffs {
            let w = v * c;
            if w != Complex64::new(0.0, 0.0) {
                out.coeffs.insert(alpha.clone(), w);
            }
        }
        out
    }

    fn check_compatible(&self, other: &PolySeries) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.cap != other.cap {
            return Err(Error::usage(format!(
                "degree caps differ: {} vs {}",
                self.cap, other.cap
            )));
        }
        Ok(())
    }

    /// `self + c·other` for series sharing `(n, D)`.
    pub fn add_scaled(&self, other: &PolySeries, c: Complex64) -> Result<PolySeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (alpha, v) in &other.coeffs {
            out.add_term(alpha.clone(), v * c)?;
        }
        Ok(out)
    }

    /// Exact product; fails if any product term would exceed the cap.
    pub(crate) fn mul(&self, other: &PolySeries) -> Result<PolySeries> {
        self.check_compatible(other)?;
        let mut out = PolySeries::zero(self.n, self.cap);
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                let sum: Vec<u32> = a
                    .as_slice()
                    .iter()
                    .zip(b.as_slice())
                    .map(|(p, q)| p + q)
                    .collect();
                out.add_term(MultiIndex::new(sum), x * y)?;
            }
        }
        Ok(out)
    }

    /// The same coefficients under a larger (or equal) cap.
    pub fn with_cap(&self, cap: u32) -> Result<PolySeries> {
        if cap < self.degree() {
            return Err(Error::DegreeCap {
                degree: self.degree(),
                cap,
            });
        }
        Ok(PolySeries {
            n: self.n,
            cap,
            coeffs: self.coeffs.clone(),
        })
    }
}

/// Free-function form of [`PolySeries::evaluate`].
pub fn evaluate(s: &PolySeries, z: &ComplexPoint) -> Result<Complex64> {
    s.evaluate(z)
}

/// Free-function form of [`PolySeries::partial`].
pub fn partial(s: &PolySeries, j: usize) -> PolySeries {
    s.partial(j)
}

/// Free-function form of [`PolySeries::second_partial`].
pub fn second_partial(s: &PolySeries, j: usize, k: usize) -> PolySeries {
    s.second_partial(j, k)
}

/// Normalization class read off the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Normalization {
    /// Fails `h(0) = g(0) = 0` or `∂h/∂z_j(0) = 1`.
    Unnormalized,
    /// `𝓗ₙ`: normalized, with a nonzero linear part in `g`.
    Hn,
    /// `𝓗ₙ⁰`: additionally `∂g/∂z_j(0) = 0` for every `j`.
    Hn0,
}

/// `f = h + conj(g)` with `h`, `g` sharing dimension and degree cap.
#[derive(Debug, Clone, PartialEq)]
pub struct PluriharmonicMap {
    h: PolySeries,
    g: PolySeries,
}

impl PluriharmonicMap {
    pub fn new(h: PolySeries, g: PolySeries) -> Result<Self> {
        h.check_compatible(&g)?;
        Ok(PluriharmonicMap { h, g })
    }

    /// A holomorphic map (`g ≡ 0`).
    pub fn holomorphic(h: PolySeries) -> Self {
        let g = PolySeries::zero(h.n, h.cap);
        PluriharmonicMap { h, g }
    }

    /// `h = Σ z_j`, `g ≡ 0`.
    pub fn identity(n: usize, cap: u32) -> Self {
        PluriharmonicMap::holomorphic(PolySeries::coordinate_sum(n, cap))
    }

    pub fn h(&self) -> &PolySeries {
        &self.h
    }

    pub fn g(&self) -> &PolySeries {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.h.n
    }

    pub fn cap(&self) -> u32 {
        self.h.cap
    }

    /// Largest degree present in either part.
    pub fn degree(&self) -> u32 {
        self.h.degree().max(self.g.degree())
    }

    pub fn is_holomorphic(&self) -> bool {
        self.g.is_empty()
    }

    pub fn normalization(&self) -> Normalization {
        let n = self.dim();
        let near = |a: Complex64, b: f64| (a - Complex64::new(b, 0.0)).norm() <= NORMALIZATION_TOL;
        let zero = MultiIndex::zero(n);
        if !near(self.h.coeff(&zero), 0.0) || !near(self.g.coeff(&zero), 0.0) {
            return Normalization::Unnormalized;
        }
        if !(0..n).all(|j| near(self.h.coeff(&MultiIndex::unit(n, j)), 1.0)) {
            return Normalization::Unnormalized;
        }
        if (0..n).all(|j| near(self.g.coeff(&MultiIndex::unit(n, j)), 0.0)) {
            Normalization::Hn0
        } else {
            Normalization::Hn
        }
    }

    /// `h(z) + conj(g(z))`.
    pub fn evaluate(&self, z: &ComplexPoint) -> Result<Complex64> {
        self.h.check_point(z)?;
        let table = PowerTable::new(z, self.degree());
        Ok(self.evaluate_with(&table))
    }

    pub fn evaluate_with(&self, table: &PowerTable) -> Complex64 {
        self.h.evaluate_with(table) + self.g.evaluate_with(table).conj()
    }

    /// `f_λ = h + λ·conj(g)`, stored as `(h, conj(λ)·g)`.
    pub fn rotate_co_part(&self, lambda: Complex64) -> PluriharmonicMap {
        PluriharmonicMap {
            h: self.h.clone(),
            g: self.g.scale(lambda.conj()),
        }
    }

    /// The holomorphic combination `F_ε = h + ε·g`.
    pub fn holomorphic_combination(&self, eps: Complex64) -> PolySeries {
        self.h
            .add_scaled(&self.g, eps)
            .expect("h and g share (n, D) by construction")
    }
}

/// Free-function form of [`PluriharmonicMap::evaluate`].
pub fn evaluate_map(f: &PluriharmonicMap, z: &ComplexPoint) -> Result<Complex64> {
    f.evaluate(z)
}

/// Coefficient-wise `Σ t_s f_s`.
pub fn convex_combine(maps: &[PluriharmonicMap], weights: &[f64]) -> Result<PluriharmonicMap> {
    if maps.is_empty() {
        return Err(Error::usage("convex combination of an empty family"));
    }
    if maps.len() != weights.len() {
        return Err(Error::usage(format!(
            "{} maps but {} weights",
            maps.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(Error::usage(format!("weight {w} outside [0, 1]")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::usage(format!("weights sum to {total}, not 1")));
    }
    let (n, cap) = (maps[0].dim(), maps[0].cap());
    let mut h = PolySeries::zero(n, cap);
    let mut g = PolySeries::zero(n, cap);
    for (f, &t) in maps.iter().zip(weights) {
        let t = Complex64::new(t, 0.0);
        h = h.add_scaled(&f.h, t)?;
        g = g.add_scaled(&f.g, t)?;
    }
    PluriharmonicMap::new(h, g)
}

/// Which part carries the degree-`m` tail of a sharpness map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Holomorphic,
    Antiholomorphic,
}

/// `Σ z_j + Σ_{|α|=m} c z^α` (or with the tail conjugated into `g`), where
/// `c = M / (n² m (m-1))` on every multi-index of degree `m`.
pub fn extremal_sharpness_map(n: usize, m: u32, level: f64, part: Part) -> Result<PluriharmonicMap> {
    if n == 0 || m < 2 || !(level > 0.0) {
        return Err(Error::usage("sharpness map needs n ≥ 1, m ≥ 2, M > 0"));
    }
    let c = level / ((n * n) as f64 * f64::from(m) * f64::from(m - 1));
    let mut tail = PolySeries::zero(n, m);
    for alpha in enumerate(n, m) {
        tail.set(alpha, Complex64::new(c, 0.0))?;
    }
    let linear = PolySeries::coordinate_sum(n, m);
    match part {
        Part::Holomorphic => PluriharmonicMap::new(linear.add_scaled(&tail, 1.0.into())?, PolySeries::zero(n, m)),
        Part::Antiholomorphic => PluriharmonicMap::new(linear, tail),
    }
}

/// `h = Σ z_j ± (M/2)(Σ z_j)²`, `g ≡ 0`, expanded into monomials.
pub fn extremal_growth_map(n: usize, level: f64, sign: i8) -> Result<PluriharmonicMap> {
    if n == 0 || !(level > 0.0) || (sign != 1 && sign != -1) {
        return Err(Error::usage("growth map needs n ≥ 1, M > 0, sign ±1"));
    }
    let linear = PolySeries::coordinate_sum(n, 2);
    let square = linear.mul(&linear)?;
    let h = linear.add_scaled(&square, Complex64::new(f64::from(sign) * level / 2.0, 0.0))?;
    Ok(PluriharmonicMap::holomorphic(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn idx(a: &[u32]) -> MultiIndex {
        MultiIndex::new(a.to_vec())
    }

    // Nested Horner in z2 then z1, independent of the table-driven path.
    fn horner2(s: &PolySeries, z1: Complex64, z2: Complex64) -> Complex64 {
        let d = s.cap();
        let mut outer = c(0.0, 0.0);
        for a1 in (0..=d).rev() {
            let mut inner = c(0.0, 0.0);
            for a2 in (0..=d - a1).rev() {
                inner = inner * z2 + s.coeff(&idx(&[a1, a2]));
            }
            outer = outer * z1 + inner;
        }
        outer
    }

    #[test]
    fn evaluate_examples() {
        let h = PolySeries::coordinate_sum(2, 2);
        let z = ComplexPoint::new(vec![c(0.5, 0.0), c(0.0, 0.5)]);
        assert_eq!(h.evaluate(&z).unwrap(), c(0.5, 0.5));

        let zero = PolySeries::zero(3, 4);
        let z3 = ComplexPoint::new(vec![c(0.3, -0.1), c(0.2, 0.2), c(-0.9, 0.0)]);
        assert_eq!(zero.evaluate(&z3).unwrap(), c(0.0, 0.0));

        let mut h = PolySeries::coordinate_sum(2, 2);
        h.set(idx(&[1, 1]), c(0.25, 0.0)).unwrap();
        let z = ComplexPoint::real(&[0.5, 0.5]);
        let oracle = horner2(&h, c(0.5, 0.0), c(0.5, 0.0));
        assert!((oracle - c(1.0625, 0.0)).norm() < 1e-15);
        assert!((h.evaluate(&z).unwrap() - oracle).norm() < 1e-15);
    }

    #[test]
    fn evaluate_rejects_dimension_mismatch() {
        let h = PolySeries::coordinate_sum(2, 2);
        let z = ComplexPoint::real(&[0.1]);
        assert_eq!(
            h.evaluate(&z),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn evaluate_map_examples() {
        let h = PolySeries::coordinate_sum(2, 2);
        let g = PolySeries::from_real_parts(2, 2, &[(&[1, 1], 1.0, 0.0)]).unwrap();
        let f = PluriharmonicMap::new(h.clone(), g).unwrap();
        let z = ComplexPoint::real(&[0.5, 0.5]);
        assert_eq!(f.evaluate(&z).unwrap(), c(1.25, 0.0));

        let hol = PluriharmonicMap::holomorphic(h.clone());
        for z in [
            ComplexPoint::new(vec![c(0.1, 0.7), c(-0.3, 0.2)]),
            ComplexPoint::new(vec![c(-0.9, 0.0), c(0.0, -0.4)]),
        ] {
            assert_eq!(hol.evaluate(&z).unwrap(), h.evaluate(&z).unwrap());
        }

        let h = PolySeries::coordinate_sum(1, 2);
        let g = PolySeries::from_real_parts(1, 2, &[(&[2], 0.25, 0.0)]).unwrap();
        let f = PluriharmonicMap::new(h, g).unwrap();
        let z = ComplexPoint::new(vec![c(0.0, 0.8)]);
        // hand oracle: z + conj(0.25 z²) with z = 0.8i
        let zc = c(0.0, 0.8);
        let oracle = zc + (c(0.25, 0.0) * zc * zc).conj();
        assert!((oracle - c(-0.16, 0.8)).norm() < 1e-15);
        assert!((f.evaluate(&z).unwrap() - oracle).norm() < 1e-15);
    }

    #[test]
    fn partial_examples() {
        let s = PolySeries::from_real_parts(2, 3, &[(&[2, 1], 1.0, 0.0)]).unwrap();
        let d = s.partial(0);
        assert_eq!(d.cap(), 2);
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&idx(&[1, 1])), c(2.0, 0.0));

        let s = PolySeries::from_real_parts(2, 1, &[(&[1, 0], 1.0, 0.0)]).unwrap();
        assert!(s.partial(1).is_empty());
    }

    #[test]
    fn partial_matches_finite_difference() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let s = crate::fixtures::random_series(&mut rng, 2, 4, 0, 1.0);
        let step = 1e-5;
        for _ in 0..50 {
            let z = crate::fixtures::random_point(&mut rng, 2, 0.95);
            for j in 0..2 {
                let exact = s.partial(j).evaluate(&z).unwrap();
                let mut plus = z.coords().to_vec();
                let mut minus = z.coords().to_vec();
                plus[j] += step;
                minus[j] -= step;
                let fd = (s.evaluate(&ComplexPoint::new(plus)).unwrap()
                    - s.evaluate(&ComplexPoint::new(minus)).unwrap())
                    / (2.0 * step);
                assert!((fd - exact).norm() < 1e-7, "axis {j}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn second_partial_examples() {
        let s = PolySeries::from_real_parts(2, 2, &[(&[1, 1], 1.0, 0.0)]).unwrap();
        let d = s.second_partial(0, 1);
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&idx(&[0, 0])), c(1.0, 0.0));

        // (M/2)(z1+z2)^2 = (M/2) z1^2 + M z1 z2 + (M/2) z2^2, so d²/dz1² = M
        let m = 0.7;
        let s = PolySeries::from_real_parts(
            2,
            2,
            &[(&[2, 0], m / 2.0, 0.0), (&[1, 1], m, 0.0), (&[0, 2], m / 2.0, 0.0)],
        )
        .unwrap();
        let d = s.second_partial(0, 0);
        assert_eq!(d.len(), 1);
        assert!((d.coeff(&idx(&[0, 0])) - c(m, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn set_enforces_cap_and_dimension() {
        let mut s = PolySeries::zero(2, 2);
        assert_eq!(
            s.set(idx(&[2, 1]), c(1.0, 0.0)),
            Err(Error::DegreeCap { degree: 3, cap: 2 })
        );
        assert!(s.set(idx(&[1]), c(1.0, 0.0)).is_err());
        s.set(idx(&[1, 1]), c(1.0, 0.0)).unwrap();
        s.set(idx(&[1, 1]), c(0.0, 0.0)).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn mul_fails_loudly_past_cap() {
        let s = PolySeries::coordinate_sum(2, 1);
        assert!(matches!(s.mul(&s), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn convex_combine_examples() {
        let f = extremal_sharpness_map(2, 3, 1.0, Part::Holomorphic).unwrap();
        assert_eq!(convex_combine(&[f.clone()], &[1.0]).unwrap(), f);
        let twice = convex_combine(&[f.clone(), f.clone()], &[0.5, 0.5]).unwrap();
        assert_eq!(twice, f);
        assert!(convex_combine(&[f.clone(), f.clone()], &[0.5, 0.6]).is_err());
        assert!(convex_combine(&[f.clone(), f.clone()], &[1.5, -0.5]).is_err());
        let other = PluriharmonicMap::identity(2, 2);
        assert!(convex_combine(&[f, other], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn sharpness_map_examples() {
        let f = extremal_sharpness_map(1, 2, 1.0, Part::Holomorphic).unwrap();
        assert_eq!(f.h().coeff(&idx(&[1])), c(1.0, 0.0));
        assert_eq!(f.h().coeff(&idx(&[2])), c(0.5, 0.0));
        assert!(f.g().is_empty());

        let f = extremal_sharpness_map(2, 2, 1.0, Part::Holomorphic).unwrap();
        for a in enumerate(2, 2) {
            assert_eq!(f.h().coeff(&a), c(0.125, 0.0));
        }
        let oracle: f64 = enumerate(2, 2).iter().map(|a| f.h().coeff(a).norm()).sum();
        assert_eq!(oracle, 0.375);
        assert_eq!(f.h().abs_sum_of_degree(2), 0.375);

        let f2 = extremal_sharpness_map(2, 2, 1.0, Part::Antiholomorphic).unwrap();
        assert_eq!(f2.g().abs_sum_of_degree(2), 0.375);
        assert_eq!(f2.normalization(), Normalization::Hn0);
        assert!(extremal_sharpness_map(2, 1, 1.0, Part::Holomorphic).is_err());
    }

    #[test]
    fn growth_map_examples() {
        let f = extremal_growth_map(1, 1.0, 1).unwrap();
        assert_eq!(f.h().coeff(&idx(&[1])), c(1.0, 0.0));
        assert_eq!(f.h().coeff(&idx(&[2])), c(0.5, 0.0));

        let f = extremal_growth_map(2, 1.0, 1).unwrap();
        let expected = PolySeries::from_real_parts(
            2,
            2,
            &[
                (&[1, 0], 1.0, 0.0),
                (&[0, 1], 1.0, 0.0),
                (&[2, 0], 0.5, 0.0),
                (&[1, 1], 1.0, 0.0),
                (&[0, 2], 0.5, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(f.h(), &expected);

        for n in 1..=3 {
            for sign in [1i8, -1] {
                let f = extremal_growth_map(n, 0.8, sign).unwrap();
                let r = 0.37;
                let z = ComplexPoint::real(&vec![r; n]);
                let nf = n as f64;
                let expected = nf * r + f64::from(sign) * 0.8 * nf * nf / 2.0 * r * r;
                assert!((f.evaluate(&z).unwrap().norm() - expected.abs()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn normalization_tags() {
        assert_eq!(PluriharmonicMap::identity(3, 2).normalization(), Normalization::Hn0);
        let g = PolySeries::from_real_parts(1, 2, &[(&[1], 0.2, 0.0)]).unwrap();
        let f = PluriharmonicMap::new(PolySeries::coordinate_sum(1, 2), g).unwrap();
        assert_eq!(f.normalization(), Normalization::Hn);
        let h = PolySeries::from_real_parts(1, 2, &[(&[1], 2.0, 0.0)]).unwrap();
        assert_eq!(
            PluriharmonicMap::holomorphic(h).normalization(),
            Normalization::Unnormalized
        );
    }

    #[test]
    fn terms_of_degree_is_a_slice() {
        let f = extremal_growth_map(3, 1.0, 1).unwrap();
        let deg2: Vec<_> = f.h().terms_of_degree(2).map(|(a, _)| a.clone()).collect();
        assert_eq!(deg2, enumerate(3, 2));
        assert_eq!(f.h().terms_of_degree(1).count(), 3);
        assert_eq!(f.h().terms_of_degree(0).count(), 0);
    }

    fn series_strategy() -> impl Strategy<Value = PolySeries> {
        (1usize..=3, 0u32..=5, any::<u64>()).prop_map(|(n, d, seed)| {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            crate::fixtures::random_series(&mut rng, n, d, 0, 1.0)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn finite_differences_match_partials(s in series_strategy(), seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let z = crate::fixtures::random_point(&mut rng, s.dim(), 0.9);
            let step = 1e-5;
            for j in 0..s.dim() {
                let exact = s.partial(j).evaluate(&z).unwrap();
                let mut plus = z.coords().to_vec();
                let mut minus = z.coords().to_vec();
                plus[j] += step;
                minus[j] -= step;
                let fd = (s.evaluate(&ComplexPoint::new(plus)).unwrap()
                    - s.evaluate(&ComplexPoint::new(minus)).unwrap()) / (2.0 * step);
                prop_assert!((fd - exact).norm() <= 1e-6 * exact.norm().max(1.0));
            }
        }

        #[test]
        fn mixed_partials_commute(s in series_strategy()) {
            for j in 0..s.dim() {
                for k in 0..s.dim() {
                    prop_assert_eq!(s.second_partial(j, k), s.second_partial(k, j));
                }
            }
        }

        #[test]
        fn convex_combination_keeps_normalization(seed in any::<u64>(), count in 2usize..=4) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=3);
            let maps: Vec<_> = (0..count)
                .map(|_| crate::fixtures::random_normalized_map(&mut rng, n, 4))
                .collect();
            let weights = crate::fixtures::random_weights(&mut rng, count);
            let f = convex_combine(&maps, &weights).unwrap();
            prop_assert_eq!(f.normalization(), Normalization::Hn0);
            prop_assert!(f.evaluate(&ComplexPoint::origin(n)).unwrap().norm() == 0.0);
        }
    }
}

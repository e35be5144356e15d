//! The class functional
//!
//! ```text
//! Λ_f(z) = Σ_l Σ_j Σ_k ( |z_l ∂²h/∂z_j∂z_k (z)| + |z_l ∂²g/∂z_j∂z_k (z)| )
//! ```
//!
//! and the two ways of bounding its supremum over the unit polydisk: sampling
//! on the distinguished boundary `r·Tⁿ` (a lower bound, able to refute
//! membership) and the coefficient majorant
//! `Σ_{m≥2} Σ_{|α|=m} n·m(m−1)·(|a_α| + |b_α|)` (an upper bound, able to
//! certify it).
//!
//! Each term of `Λ` is the modulus of a holomorphic function, so its maximum
//! over the closed polydisk of radius `r` sits on the torus `r·Tⁿ` and grows
//! with `r`. That is why the grid lives on a torus close to the unit one.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::series::{ComplexPoint, PluriharmonicMap, PolySeries, PowerTable};

/// Margin above `M` before a sampled supremum counts as a refutation.
pub const NOT_MEMBER_TOL: f64 = 1e-9;
/// Slack allowed when comparing the coefficient majorant against `M`.
pub const CERTIFIED_TOL: f64 = 1e-12;

const GOLDEN_ITERATIONS: usize = 64;
const REFINE_CANDIDATES: usize = 4;

/// Serializes non-finite floats as `null`.
pub(crate) fn finite_or_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

/// Lattice `z_j = r·exp(2πi·k_j / angles)` on the torus `r·Tⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusGrid {
    pub n: usize,
    pub r: f64,
    pub angles_per_dim: usize,
}

impl TorusGrid {
    pub fn new(n: usize, r: f64, angles_per_dim: usize) -> Result<Self> {
        if n == 0 || angles_per_dim == 0 {
            return Err(Error::usage("torus grid needs n ≥ 1 and at least one angle"));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::usage(format!("torus radius {r} outside (0, 1)")));
        }
        Ok(TorusGrid { n, r, angles_per_dim })
    }

    /// `r = 0.999` with 512 / 96 / 24 angles for `n = 1 / 2 / 3`.
    pub fn default_for(n: usize) -> Self {
        let angles = match n {
            1 => 512,
            2 => 96,
            3 => 24,
            _ => 12,
        };
        TorusGrid {
            n,
            r: 0.999,
            angles_per_dim: angles,
        }
    }

    pub fn with_radius(self, r: f64) -> Result<Self> {
        TorusGrid::new(self.n, r, self.angles_per_dim)
    }

    pub fn len(&self) -> usize {
        self.angles_per_dim.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        TAU / self.angles_per_dim as f64
    }

    pub fn angles(&self, mut index: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            out.push(self.step() * (index % self.angles_per_dim) as f64);
            index /= self.angles_per_dim;
        }
        out
    }

    pub fn point(&self, index: usize) -> ComplexPoint {
        ComplexPoint::on_torus(self.r, &self.angles(index))
    }

    pub fn points(&self) -> impl Iterator<Item = ComplexPoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

/// `Λ` with all second partials of `h` and `g` precomputed.
///
/// Mixed partials commute, so only `j ≤ k` is stored, with weight 2 off the
/// diagonal.
#[derive(Debug, Clone)]
pub struct LambdaFunctional {
    n: usize,
    degree: u32,
    hessian: Vec<(f64, PolySeries)>,
}

impl LambdaFunctional {
    pub fn new(f: &PluriharmonicMap) -> Self {
        let mut hessian = Vec::new();
        for part in [f.h(), f.g()] {
            push_hessian(&mut hessian, part);
        }
        LambdaFunctional {
            n: f.dim(),
            degree: f.degree(),
            hessian,
        }
    }

    /// The `g ≡ 0` functional of a holomorphic `φ`.
    pub fn holomorphic(phi: &PolySeries) -> Self {
        let mut hessian = Vec::new();
        push_hessian(&mut hessian, phi);
        LambdaFunctional {
            n: phi.dim(),
            degree: phi.degree(),
            hessian,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Σ_l |z_l|·Σ_{j,k} (|h_jk(z)| + |g_jk(z)|)`.
    pub fn value(&self, z: &ComplexPoint) -> Result<f64> {
        if z.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.dim(),
            });
        }
        Ok(self.value_unchecked(z))
    }

    fn value_unchecked(&self, z: &ComplexPoint) -> f64 {
        if self.hessian.is_empty() {
            return 0.0;
        }
        let table = PowerTable::new(z, self.degree.saturating_sub(2));
        let inner: f64 = self
            .hessian
            .iter()
            .map(|(w, s)| w * s.evaluate_with(&table).norm())
            .sum();
        z.l1_norm() * inner
    }

    /// Maximum of `Λ` over the torus grid, refined by coordinate-wise
    /// golden-section ascent around the best grid points. The result is a
    /// lower bound on the supremum over the polydisk.
    pub fn sup_estimate(&self, grid: &TorusGrid, refine_steps: usize) -> SupEstimate {
        assert_eq!(grid.n, self.n, "grid dimension mismatch");
        if self.hessian.is_empty() {
            return SupEstimate {
                value: 0.0,
                witness: grid.point(0),
            };
        }
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|i| self.value_unchecked(&grid.point(i)))
            .collect();
        let mut order: Vec<usize> = (0..values.len()).collect();
        // descending value, ascending index on ties
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

        let mut best = SupEstimate {
            value: values[order[0]],
            witness: grid.point(order[0]),
        };
        if refine_steps == 0 {
            return best;
        }
        for &start in order.iter().take(REFINE_CANDIDATES) {
            let (value, angles) = self.refine(grid, grid.angles(start), values[start], refine_steps);
            if value > best.value {
                best = SupEstimate {
                    value,
                    witness: ComplexPoint::on_torus(grid.r, &angles),
                };
            }
        }
        best
    }

    fn refine(&self, grid: &TorusGrid, mut angles: Vec<f64>, mut value: f64, steps: usize) -> (f64, Vec<f64>) {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let h = grid.step();
        for _ in 0..steps {
            for j in 0..self.n {
                let eval = |t: f64| {
                    let mut a = angles.clone();
                    a[j] = t;
                    self.value_unchecked(&ComplexPoint::on_torus(grid.r, &a))
                };
                let (mut lo, mut hi) = (angles[j] - h, angles[j] + h);
                let mut x1 = hi - phi * (hi - lo);
                let mut x2 = lo + phi * (hi - lo);
                let (mut f1, mut f2) = (eval(x1), eval(x2));
                for _ in 0..GOLDEN_ITERATIONS {
                    if f1 >= f2 {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - phi * (hi - lo);
                        f1 = eval(x1);
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + phi * (hi - lo);
                        f2 = eval(x2);
                    }
                }
                let (t, ft) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
                if ft > value {
                    value = ft;
                    angles[j] = t.rem_euclid(TAU);
                }
            }
        }
        (value, angles)
    }
}

fn push_hessian(out: &mut Vec<(f64, PolySeries)>, s: &PolySeries) {
    let n = s.dim();
    for j in 0..n {
        let dj = s.partial(j);
        for k in j..n {
            let djk = dj.partial(k);
            if !djk.is_empty() {
                out.push((if j == k { 1.0 } else { 2.0 }, djk));
            }
        }
    }
}

/// Best sampled value of `Λ` and where it was attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupEstimate {
    pub value: f64,
    pub witness: ComplexPoint,
}

/// `Λ_f(z)` for a pluriharmonic map.
pub fn lambda_value(f: &PluriharmonicMap, z: &ComplexPoint) -> Result<f64> {
    LambdaFunctional::new(f).value(z)
}

/// `Λ_φ(z)` for a holomorphic `φ` (the `g ≡ 0` case).
pub fn holo_lambda_value(phi: &PolySeries, z: &ComplexPoint) -> Result<f64> {
    LambdaFunctional::holomorphic(phi).value(z)
}

/// Sampled supremum of `Λ_f` over a torus grid; see [`LambdaFunctional::sup_estimate`].
pub fn sup_estimate(f: &PluriharmonicMap, grid: &TorusGrid, refine_steps: usize) -> Result<SupEstimate> {
    if grid.n != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: grid.n,
        });
    }
    Ok(LambdaFunctional::new(f).sup_estimate(grid, refine_steps))
}

/// Holomorphic-series counterpart of [`sup_estimate`].
pub fn holo_sup_estimate(phi: &PolySeries, grid: &TorusGrid, refine_steps: usize) -> Result<SupEstimate> {
    if grid.n != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            got: grid.n,
        });
    }
    Ok(LambdaFunctional::holomorphic(phi).sup_estimate(grid, refine_steps))
}

/// `Σ_{m=2}^{D} Σ_{|α|=m} n·m(m−1)·(|a_α| + |b_α|)`: an upper bound for `Λ_f`
/// on the open polydisk.
pub fn certified_upper_bound(f: &PluriharmonicMap) -> f64 {
    let n = f.dim() as f64;
    (2..=f.cap())
        .map(|m| {
            let weight = n * f64::from(m) * f64::from(m - 1);
            weight * (f.h().abs_sum_of_degree(m) + f.g().abs_sum_of_degree(m))
        })
        .sum()
}

/// Membership verdict for `𝓑_{𝓗ₙ⁰}(M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedMember,
    LikelyMember,
    NotMember,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub level: f64,
    pub sampled_sup: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub certified_upper: f64,
    pub witness: ComplexPoint,
    pub verdict: Verdict,
    pub margin: f64,
}

pub const DEFAULT_REFINE_STEPS: usize = 3;

/// Classifies `f` against level `M` using both the majorant and the sampled
/// supremum.
pub fn membership(f: &PluriharmonicMap, level: f64, grid: &TorusGrid) -> Result<MembershipReport> {
    if !(level > 0.0) || !level.is_finite() {
        return Err(Error::usage(format!("level M = {level} must be positive")));
    }
    let sup = sup_estimate(f, grid, DEFAULT_REFINE_STEPS)?;
    let certified = certified_upper_bound(f);
    let (verdict, margin) = if certified <= level + CERTIFIED_TOL {
        (Verdict::CertifiedMember, level - certified)
    } else if sup.value > level + NOT_MEMBER_TOL {
        (Verdict::NotMember, level - sup.value)
    } else {
        (Verdict::LikelyMember, level - sup.value)
    };
    Ok(MembershipReport {
        level,
        sampled_sup: sup.value,
        certified_upper: certified,
        witness: sup.witness,
        verdict,
        margin,
    })
}

impl MembershipReport {
    pub fn render_text(&self) -> String {
        let certified = if self.certified_upper.is_finite() {
            format!("{:.12}", self.certified_upper)
        } else {
            "unavailable".to_string()
        };
        format!(
            "membership at M = {}\n  verdict          {:?}\n  sampled sup      {:.12}\n  certified upper  {}\n  margin           {:.12}\n  witness          {}\n",
            self.level, self.verdict, self.sampled_sup, certified, self.margin, self.witness
        )
    }
}

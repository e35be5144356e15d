//! Pairwise injectivity scans, stable-univalence sweeps and the local
//! non-vanishing check.
//!
//! A scan compares every unordered pair of sample points. A pair collides
//! when the points are more than `η` apart in the sup norm while their images
//! are closer than `δ`. `NO_COLLISION` is evidence on the sample, never a
//! proof.
//!
//! A scalar map `ℂⁿ → ℂ` with `n ≥ 2` cannot be injective on an open set, so
//! scans in those dimensions only detect collisions the point set happens to
//! resolve.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{check_unimodular, CriterionReport, DetailRow, Witness};
use crate::error::{Error, Result};
use crate::functionals::finite_or_null;
use crate::series::{ComplexPoint, PluriharmonicMap, PolySeries, PowerTable};

pub const DEFAULT_DELTA: f64 = 1e-9;
pub const DEFAULT_ETA: f64 = 1e-3;
pub const DEFAULT_LAMBDA_COUNT: usize = 16;
/// Threshold below which a partial derivative counts as vanishing.
pub const VANISHING_TOL: f64 = 1e-12;

const NEWTON_ITERATIONS: usize = 60;
const NEWTON_STARTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScanStatus {
    NoCollision,
    Collision,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionPair {
    pub z: ComplexPoint,
    pub w: ComplexPoint,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityVerdict {
    pub status: ScanStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<CollisionPair>,
    /// Minimum image distance over pairs separated by more than `η`.
    #[serde(serialize_with = "finite_or_null")]
    pub min_image_gap: f64,
    pub pairs_examined: u64,
}

impl InjectivityVerdict {
    pub fn is_injective_on_sample(&self) -> bool {
        self.status == ScanStatus::NoCollision
    }
}

fn check_scan_args(points: &[ComplexPoint], delta: f64, eta: f64) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::usage("injectivity scan needs at least two points"));
    }
    if !(delta > 0.0 && eta > 0.0) {
        return Err(Error::usage(format!("delta = {delta} and eta = {eta} must be positive")));
    }
    Ok(())
}

/// Scan on precomputed images.
fn scan_images(points: &[ComplexPoint], images: &[Complex64], delta: f64, eta: f64) -> InjectivityVerdict {
    let rows: Vec<(f64, Option<(usize, f64)>)> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut min_gap = f64::INFINITY;
            let mut first = None;
            for j in i + 1..points.len() {
                if points[i].sup_distance(&points[j]) <= eta {
                    continue;
                }
                let gap = (images[i] - images[j]).norm();
                min_gap = min_gap.min(gap);
                if first.is_none() && gap < delta {
                    first = Some((j, gap));
                }
            }
            (min_gap, first)
        })
        .collect();
    let min_image_gap = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let pair = rows.iter().enumerate().find_map(|(i, r)| {
        r.1.map(|(j, gap)| CollisionPair {
            z: points[i].clone(),
            w: points[j].clone(),
            gap,
        })
    });
    let p = points.len() as u64;
    InjectivityVerdict {
        status: if pair.is_some() {
            ScanStatus::Collision
        } else {
            ScanStatus::NoCollision
        },
        pair,
        min_image_gap,
        pairs_examined: p * (p - 1) / 2,
    }
}

fn images<F: Fn(&PowerTable) -> Complex64 + Sync>(points: &[ComplexPoint], degree: u32, eval: F) -> Vec<Complex64> {
    points
        .par_iter()
        .map(|z| eval(&PowerTable::new(z, degree)))
        .collect()
}

pub fn injectivity_scan(
    f: &PluriharmonicMap,
    points: &[ComplexPoint],
    delta: f64,
    eta: f64,
) -> Result<InjectivityVerdict> {
    check_scan_args(points, delta, eta)?;
    check_dims(points, f.dim())?;
    let imgs = images(points, f.degree(), |t| f.evaluate_with(t));
    Ok(scan_images(points, &imgs, delta, eta))
}

/// [`injectivity_scan`] for a holomorphic series.
pub fn holo_injectivity_scan(
    phi: &PolySeries,
    points: &[ComplexPoint],
    delta: f64,
    eta: f64,
) -> Result<InjectivityVerdict> {
    check_scan_args(points, delta, eta)?;
    check_dims(points, phi.dim())?;
    let imgs = images(points, phi.degree(), |t| phi.evaluate_with(t));
    Ok(scan_images(points, &imgs, delta, eta))
}

fn check_dims(points: &[ComplexPoint], n: usize) -> Result<()> {
    match points.iter().find(|z| z.dim() != n) {
        Some(z) => Err(Error::DimensionMismatch {
            expected: n,
            got: z.dim(),
        }),
        None => Ok(()),
    }
}

/// `count` equally spaced unimodular values together with `±1, ±i`.
pub fn default_lambdas(count: usize) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = (0..count)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / count as f64))
        .collect();
    for extra in [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ] {
        if out.iter().all(|v| (v - extra).norm() > 1e-12) {
            out.push(extra);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexedVerdict {
    pub re: f64,
    pub im: f64,
    pub verdict: InjectivityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableScanReport {
    /// Scans of `f_λ = h + λ·conj(g)`.
    pub lambdas: Vec<IndexedVerdict>,
    /// Scans of `F_ε = h + ε·g` over the same unimodular values.
    pub epsilons: Vec<IndexedVerdict>,
    pub stable_pluriharmonic: bool,
    pub stable_holomorphic: bool,
    /// Whether the two stability verdicts agree on this sample.
    pub biconditional_holds: bool,
    /// Indices `k` where the `λ_k` scan and the `ε_k` scan disagree.
    pub index_disagreements: Vec<usize>,
}

impl StableScanReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4} {:>10} {:>10} {:>14} {:>14} {:>14}",
            "k", "re", "im", "f_lambda", "F_eps", "min gap f"
        );
        for (k, (l, e)) in self.lambdas.iter().zip(&self.epsilons).enumerate() {
            let _ = writeln!(
                out,
                "{:>4} {:>10.6} {:>10.6} {:>14} {:>14} {:>14.6e}",
                k,
                l.re,
                l.im,
                status_text(l.verdict.status),
                status_text(e.verdict.status),
                l.verdict.min_image_gap
            );
        }
        let _ = writeln!(out, "stable pluriharmonic on sample: {}", self.stable_pluriharmonic);
        let _ = writeln!(out, "stable holomorphic on sample:   {}", self.stable_holomorphic);
        let _ = writeln!(out, "biconditional holds on sample:  {}", self.biconditional_holds);
        if !self.index_disagreements.is_empty() {
            let _ = writeln!(out, "per-index disagreements at k = {:?}", self.index_disagreements);
        }
        out
    }
}

fn status_text(s: ScanStatus) -> &'static str {
    match s {
        ScanStatus::NoCollision => "NO_COLLISION",
        ScanStatus::Collision => "COLLISION",
    }
}

/// Scans `f_λ` and `F_ε` for every value in `lambdas` (used for both families).
pub fn stable_scan(
    f: &PluriharmonicMap,
    lambdas: &[Complex64],
    points: &[ComplexPoint],
    delta: f64,
    eta: f64,
) -> Result<StableScanReport> {
    check_unimodular(lambdas, "lambda")?;
    check_scan_args(points, delta, eta)?;
    check_dims(points, f.dim())?;
    let mut lam = Vec::with_capacity(lambdas.len());
    let mut eps = Vec::with_capacity(lambdas.len());
    for l in lambdas {
        lam.push(IndexedVerdict {
            re: l.re,
            im: l.im,
            verdict: injectivity_scan(&f.rotate_co_part(*l), points, delta, eta)?,
        });
        eps.push(IndexedVerdict {
            re: l.re,
            im: l.im,
            verdict: holo_injectivity_scan(&f.holomorphic_combination(*l), points, delta, eta)?,
        });
    }
    let stable_pluriharmonic = lam.iter().all(|v| v.verdict.is_injective_on_sample());
    let stable_holomorphic = eps.iter().all(|v| v.verdict.is_injective_on_sample());
    let index_disagreements = lam
        .iter()
        .zip(&eps)
        .enumerate()
        .filter(|(_, (a, b))| a.verdict.status != b.verdict.status)
        .map(|(k, _)| k)
        .collect();
    Ok(StableScanReport {
        lambdas: lam,
        epsilons: eps,
        stable_pluriharmonic,
        stable_holomorphic,
        biconditional_holds: stable_pluriharmonic == stable_holomorphic,
        index_disagreements,
    })
}

/// `|∂h/∂z_j(z)| > 1e-12` on every axis at every sample point.
///
/// The few sample points with the smallest modulus on each axis seed a
/// one-variable Newton iteration for `∂h/∂z_j` in `z_j`, so interior zeros
/// between sample points are still found.
pub fn local_nonvanishing(f: &PluriharmonicMap, points: &[ComplexPoint]) -> CriterionReport {
    let mut report = CriterionReport::new("local_nonvanishing");
    let n = f.dim();
    let degree = f.h().degree();
    for j in 0..n {
        let d = f.h().partial(j);
        let dd = d.partial(j);
        let mut moduli: Vec<(f64, usize)> = points
            .iter()
            .enumerate()
            .map(|(i, z)| (d.evaluate_with(&PowerTable::new(z, degree)).norm(), i))
            .collect();
        moduli.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best = moduli
            .first()
            .map(|&(m, i)| (m, points[i].clone()))
            .unwrap_or((f64::INFINITY, ComplexPoint::origin(n)));
        for &(_, i) in moduli.iter().take(NEWTON_STARTS) {
            if let Some((m, z)) = newton_polish(&d, &dd, &points[i], j) {
                if m < best.0 {
                    best = (m, z);
                }
            }
        }
        report
            .details
            .push(DetailRow::new(format!("axis {j} min |dh|"), best.0, VANISHING_TOL));
        if best.0 <= VANISHING_TOL {
            report.fail(Witness::at(best.1, &[("axis", j as f64), ("abs_dh", best.0)]));
        }
    }
    report
}

fn newton_polish(d: &PolySeries, dd: &PolySeries, start: &ComplexPoint, j: usize) -> Option<(f64, ComplexPoint)> {
    let mut coords = start.coords().to_vec();
    for _ in 0..NEWTON_ITERATIONS {
        let z = ComplexPoint::new(coords.clone());
        let table = PowerTable::new(&z, d.degree().max(1));
        let v = d.evaluate_with(&table);
        if v.norm() <= VANISHING_TOL * 1e-3 {
            break;
        }
        let slope = dd.evaluate_with(&table);
        if slope.norm() < 1e-300 {
            return None;
        }
        coords[j] -= v / slope;
        if coords[j].norm() >= 1.0 || !coords[j].is_finite() {
            return None;
        }
    }
    let z = ComplexPoint::new(coords);
    let m = d.evaluate(&z).ok()?.norm();
    Some((m, z))
}

//! Coefficient recovery through the discretized Cauchy integral on the torus
//! `r·Tⁿ`, and the polydisk Schwarz-lemma check.
//!
//! With `N` samples per axis, the average of `s(z)·exp(−iα·θ)` over the grid
//! equals `Σ_β a_β r^{|β|}` over all `β ≡ α (mod N)`. For a polynomial of
//! degree below `N` only `β = α` survives, so the recovery is exact up to
//! rounding.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{CriterionReport, DetailRow, Holds, Witness};
use crate::error::{Error, Result};
use crate::functionals::{membership, TorusGrid, Verdict};
use crate::multiindex::{enumerate_up_to, MultiIndex};
use crate::series::{ComplexPoint, PluriharmonicMap, PolySeries, PowerTable};

pub const SCHWARZ_TOL: f64 = 1e-9;
pub const DEFAULT_SCHWARZ_RADII: [f64; 4] = [0.25, 0.5, 0.75, 0.99];

/// Default samples per axis for a given recovery degree.
pub fn default_samples(m_max: u32) -> usize {
    2 * (m_max as usize + 1)
}

fn roots_of_unity(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / count as f64))
        .collect()
}

fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Per-axis angle indices of grid point `code`, axis 0 fastest.
fn decode(mut code: usize, n: usize, count: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(code % count);
        code /= count;
    }
    out
}

/// Grid average of `values[code]·conj(ω^{ν·k(code)})` with `ω = e^{2πi/N}`.
fn grid_average(values: &[Complex64], nu: &[i64], n: usize, roots: &[Complex64]) -> Complex64 {
    let count = roots.len();
    let terms: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(code, v)| {
            let k = decode(code, n, count);
            let phase: i64 = nu.iter().zip(&k).map(|(a, b)| a * *b as i64).sum();
            v * roots[phase.rem_euclid(count as i64) as usize].conj()
        })
        .collect();
    pairwise_sum(&terms) / values.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientEntry {
    pub alpha: MultiIndex,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub n: usize,
    pub r: f64,
    pub samples_per_dim: usize,
    pub m_max: u32,
    /// `N` exceeds the series degree, so no higher coefficient aliases.
    pub aliasing_free: bool,
    pub entries: Vec<CoefficientEntry>,
}

impl CoefficientTable {
    pub fn get(&self, alpha: &MultiIndex) -> Option<Complex64> {
        self.entries
            .iter()
            .find(|e| &e.alpha == alpha)
            .map(|e| Complex64::new(e.re, e.im))
    }

    /// Largest `|recovered − stored|` over the table.
    pub fn max_deviation(&self, s: &PolySeries) -> f64 {
        self.entries
            .iter()
            .map(|e| (Complex64::new(e.re, e.im) - s.coeff(&e.alpha)).norm())
            .fold(0.0, f64::max)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "r = {}, N = {}, m_max = {}, aliasing-free = {}",
            self.r, self.samples_per_dim, self.m_max, self.aliasing_free
        );
        let _ = writeln!(out, "{:<16} {:>22} {:>22} {:>22}", "alpha", "re", "im", "|value|");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{:<16} {:>22.15e} {:>22.15e} {:>22.15e}",
                e.alpha.to_string(),
                e.re,
                e.im,
                e.modulus
            );
        }
        out
    }
}

/// Recovers `a_α` for `|α| ≤ m_max` from samples of `s` on `r·Tⁿ`.
pub fn dft_coefficients(s: &PolySeries, r: f64, samples_per_dim: usize, m_max: u32) -> Result<CoefficientTable> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::usage(format!("radius {r} outside (0, 1)")));
    }
    if samples_per_dim <= m_max as usize {
        return Err(Error::usage(format!(
            "aliasing guard: {samples_per_dim} samples per axis must exceed m_max = {m_max}"
        )));
    }
    let n = s.dim();
    let total = samples_per_dim
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Overflow("grid size".into()))?;
    let roots = roots_of_unity(samples_per_dim);
    let degree = s.degree();
    let values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|code| {
            let coords = decode(code, n, samples_per_dim)
                .into_iter()
                .map(|k| roots[k] * r)
                .collect();
            s.evaluate_with(&PowerTable::new(&ComplexPoint::new(coords), degree))
        })
        .collect();
    let indices = enumerate_up_to(n, m_max);
    let entries = indices
        .into_par_iter()
        .map(|alpha| {
            let nu: Vec<i64> = alpha.as_slice().iter().map(|&a| i64::from(a)).collect();
            let avg = grid_average(&values, &nu, n, &roots);
            let c = avg * r.powi(-(alpha.degree() as i32));
            CoefficientEntry {
                alpha,
                re: c.re,
                im: c.im,
                modulus: c.norm(),
            }
        })
        .collect();
    Ok(CoefficientTable {
        n,
        r,
        samples_per_dim,
        m_max,
        aliasing_free: samples_per_dim as u32 > degree,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    pub n: usize,
    pub nu_max: u32,
    pub samples_per_dim: usize,
    pub zero_mode_average: f64,
    pub max_nonzero_modulus: f64,
    pub worst_nu: Vec<i64>,
    pub modes_checked: usize,
    pub passed: bool,
}

/// Grid averages of `exp(iν·θ)` for all `|ν_j| ≤ nu_max`.
pub fn orthogonality_selftest(n: usize, nu_max: u32, samples_per_dim: usize) -> Result<OrthogonalityReport> {
    if n == 0 {
        return Err(Error::usage("dimension must be at least 1"));
    }
    if samples_per_dim <= nu_max as usize {
        return Err(Error::usage(format!(
            "{samples_per_dim} samples per axis must exceed nu_max = {nu_max}"
        )));
    }
    let total = samples_per_dim.pow(n as u32);
    let roots = roots_of_unity(samples_per_dim);
    let ones = vec![Complex64::new(1.0, 0.0); total];
    let side = 2 * nu_max as usize + 1;
    let modes: Vec<Vec<i64>> = (0..side.pow(n as u32))
        .map(|code| {
            decode(code, n, side)
                .into_iter()
                .map(|k| k as i64 - i64::from(nu_max))
                .collect()
        })
        .collect();
    let averages: Vec<Complex64> = modes
        .par_iter()
        // grid_average conjugates the root, so pass −ν to average exp(+iν·θ)
        .map(|nu| {
            let neg: Vec<i64> = nu.iter().map(|v| -v).collect();
            grid_average(&ones, &neg, n, &roots)
        })
        .collect();
    let mut zero_mode_average = f64::NAN;
    let mut max_nonzero_modulus = 0.0;
    let mut worst_nu = vec![0; n];
    for (nu, avg) in modes.iter().zip(&averages) {
        if nu.iter().all(|&v| v == 0) {
            zero_mode_average = avg.re;
        } else if avg.norm() > max_nonzero_modulus {
            max_nonzero_modulus = avg.norm();
            worst_nu = nu.clone();
        }
    }
    Ok(OrthogonalityReport {
        n,
        nu_max,
        samples_per_dim,
        zero_mode_average,
        max_nonzero_modulus,
        worst_nu,
        modes_checked: modes.len(),
        passed: zero_mode_average == 1.0 && max_nonzero_modulus < 1e-12,
    })
}

/// Default angles per axis for [`schwarz_check`].
pub fn default_schwarz_angles(n: usize) -> usize {
    match n {
        1 => 64,
        2 => 16,
        3 => 8,
        _ => 4,
    }
}

/// `|ω_jk(z)| ≤ ‖z‖_∞` with `ω_jk = z_j ∂²φ/∂z_j∂z_k / M`, and the aggregate
/// `Σ_j |z_j ∂²φ/∂z_j∂z_k| ≤ nM‖z‖_∞`, on tori of the given radii.
pub fn schwarz_check(phi: &PolySeries, level: f64, radii: &[f64], angles: usize) -> Result<CriterionReport> {
    let mut report = CriterionReport::new("schwarz_check");
    let n = phi.dim();
    let member = membership(
        &PluriharmonicMap::holomorphic(phi.clone()),
        level,
        &TorusGrid::default_for(n),
    )?;
    let hess: Vec<Vec<PolySeries>> = (0..n)
        .map(|j| (0..n).map(|k| phi.second_partial(j, k)).collect())
        .collect();
    let degree = phi.degree();
    for &r in radii {
        let grid = TorusGrid::new(n, r, angles)?;
        let mut max_omega = 0.0f64;
        let mut max_aggregate = 0.0f64;
        for z in grid.points() {
            let norm = z.sup_norm();
            let table = PowerTable::new(&z, degree);
            let mut column = vec![0.0; n];
            for j in 0..n {
                for k in 0..n {
                    let t = (z.coord(j) * hess[j][k].evaluate_with(&table)).norm();
                    column[k] += t;
                    let omega = t / level;
                    max_omega = max_omega.max(omega);
                    if omega > norm + SCHWARZ_TOL {
                        report.fail(Witness::at(
                            z.clone(),
                            &[("j", j as f64), ("k", k as f64), ("abs_omega", omega), ("norm", norm)],
                        ));
                    }
                }
            }
            for (k, sum) in column.iter().enumerate() {
                let bound = n as f64 * level * norm;
                max_aggregate = max_aggregate.max(sum / (n as f64 * level));
                if *sum > bound + SCHWARZ_TOL {
                    report.fail(Witness::at(
                        z.clone(),
                        &[("k", k as f64), ("aggregate", *sum), ("bound", bound)],
                    ));
                }
            }
        }
        report
            .details
            .push(DetailRow::new(format!("r = {r} max |omega|"), max_omega, r).with_ratio());
        report.details.push(
            DetailRow::new(format!("r = {r} max aggregate / (nM)"), max_aggregate, r).with_ratio(),
        );
    }
    report.notes.push(format!("membership precondition: {:?}", member.verdict));
    if member.verdict == Verdict::NotMember {
        report.holds = Holds::Inconclusive;
    }
    Ok(report)
}

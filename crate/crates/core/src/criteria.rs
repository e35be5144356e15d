//! Checkers for the univalence, membership and coefficient criteria.
//!
//! Pointwise criteria run over caller-supplied samples and can only refute a
//! continuum claim or support it on the sample. Coefficient criteria
//! (`coefficient_audit`, `sufficient_condition`) are exact up to rounding.
//!
//! Two tolerance tiers are used: [`EXACT_TOL`] for algebraic identities on
//! coefficient sums and [`SAMPLED_TOL`] for sampled values.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{
    certified_upper_bound, holo_sup_estimate, membership, sup_estimate, TorusGrid, Verdict,
    CERTIFIED_TOL, DEFAULT_REFINE_STEPS,
};
use crate::multiindex::{monomial_count, MultiIndex};
use crate::series::{ComplexPoint, PluriharmonicMap, PolySeries, PowerTable};

pub const EXACT_TOL: f64 = 1e-12;
pub const SAMPLED_TOL: f64 = 1e-9;
/// Strict-inequality slack for the Noshiro–Warschawski check.
pub const NW_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Holds {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<ComplexPoint>,
    pub values: Vec<NamedValue>,
}

impl Witness {
    pub fn at(point: ComplexPoint, values: &[(&str, f64)]) -> Self {
        Witness {
            point: Some(point),
            values: named(values),
        }
    }

    pub fn values(values: &[(&str, f64)]) -> Self {
        Witness {
            point: None,
            values: named(values),
        }
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }
}

fn named(values: &[(&str, f64)]) -> Vec<NamedValue> {
    values
        .iter()
        .map(|(n, v)| NamedValue {
            name: n.to_string(),
            value: *v,
        })
        .collect()
}

/// One `(attained, bound)` line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetailRow {
    pub label: String,
    pub attained: f64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

impl DetailRow {
    pub fn new(label: impl Into<String>, attained: f64, bound: f64) -> Self {
        DetailRow {
            label: label.into(),
            attained,
            bound,
            ratio: None,
        }
    }

    pub fn with_ratio(mut self) -> Self {
        self.ratio = Some(if self.bound == 0.0 {
            0.0
        } else {
            self.attained / self.bound
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub name: String,
    pub holds: Holds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub details: Vec<DetailRow>,
    pub notes: Vec<String>,
}

impl CriterionReport {
    pub(crate) fn new(name: &str) -> Self {
        CriterionReport {
            name: name.to_string(),
            holds: Holds::Pass,
            witness: None,
            details: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn fail(&mut self, witness: Witness) {
        if self.holds != Holds::Fail {
            self.holds = Holds::Fail;
            self.witness = Some(witness);
        }
    }

    pub fn row(&self, label: &str) -> Option<&DetailRow> {
        self.details.iter().find(|r| r.label == label)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {:?}", self.name, self.holds);
        if let Some(w) = &self.witness {
            if let Some(p) = &w.point {
                let _ = writeln!(out, "  witness {p}");
            }
            for v in &w.values {
                let _ = writeln!(out, "    {:<24} {:.12}", v.name, v.value);
            }
        }
        if !self.details.is_empty() {
            let _ = writeln!(out, "  {:<36} {:>18} {:>18} {:>10}", "row", "attained", "bound", "ratio");
            for r in &self.details {
                let ratio = r.ratio.map_or(String::new(), |x| format!("{x:.6}"));
                let _ = writeln!(
                    out,
                    "  {:<36} {:>18.12} {:>18.12} {:>10}",
                    r.label, r.attained, r.bound, ratio
                );
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}

fn gradient(s: &PolySeries) -> Vec<PolySeries> {
    (0..s.dim()).map(|j| s.partial(j)).collect()
}

/// `Re(e^{iγ} ∂h/∂z_j) > |∂g/∂z_j|` for every axis at every sample point.
pub fn noshiro_warschawski(f: &PluriharmonicMap, gamma: f64, points: &[ComplexPoint]) -> CriterionReport {
    let mut report = CriterionReport::new("noshiro_warschawski");
    let n = f.dim();
    let rot = Complex64::from_polar(1.0, gamma);
    let dh = gradient(f.h());
    let dg = gradient(f.g());
    let mut min_slack = vec![f64::INFINITY; n];
    for z in points {
        let table = PowerTable::new(z, f.degree());
        for j in 0..n {
            let re = (rot * dh[j].evaluate_with(&table)).re;
            let dgj = dg[j].evaluate_with(&table).norm();
            let slack = re - dgj;
            min_slack[j] = min_slack[j].min(slack);
            if slack <= NW_SLACK {
                report.fail(Witness::at(
                    z.clone(),
                    &[
                        ("axis", j as f64),
                        ("re_rotated_dh", re),
                        ("abs_dg", dgj),
                        ("slack", slack),
                    ],
                ));
            }
        }
    }
    for (j, s) in min_slack.iter().enumerate() {
        report.details.push(DetailRow::new(format!("axis {j} min slack"), *s, 0.0));
    }
    report.notes.push(format!("gamma = {gamma}; {} sample points", points.len()));
    if report.holds == Holds::Pass {
        report
            .notes
            .push("PASS-sampled: the inequality holds on the sample only".to_string());
    }
    report
}

/// Sampled check that `F_ε = h + εg` lies in `𝓑ₙ(M)` for each `ε`.
pub fn epsilon_family_check(
    f: &PluriharmonicMap,
    level: f64,
    epsilons: &[Complex64],
    grid: &TorusGrid,
) -> Result<CriterionReport> {
    check_unimodular(epsilons, "epsilon")?;
    let mut report = CriterionReport::new("epsilon_family_check");
    if f.is_holomorphic() {
        let sup = holo_sup_estimate(f.h(), grid, DEFAULT_REFINE_STEPS)?;
        report.details.push(DetailRow::new("g = 0: single check of h", sup.value, level));
        if sup.value > level + SAMPLED_TOL {
            report.fail(Witness::at(sup.witness, &[("sup", sup.value)]));
        }
        return Ok(report);
    }
    for eps in epsilons {
        let sup = holo_sup_estimate(&f.holomorphic_combination(*eps), grid, DEFAULT_REFINE_STEPS)?;
        report.details.push(DetailRow::new(
            format!("eps = {:+.6}{:+.6}i", eps.re, eps.im),
            sup.value,
            level,
        ));
        if sup.value > level + SAMPLED_TOL {
            report.fail(Witness::at(
                sup.witness,
                &[("eps_re", eps.re), ("eps_im", eps.im), ("sup", sup.value)],
            ));
        }
    }
    // converse direction: report-only comparison with the pluriharmonic functional
    let full = sup_estimate(f, grid, DEFAULT_REFINE_STEPS)?;
    report
        .details
        .push(DetailRow::new("pluriharmonic functional (probe)", full.value, level));
    report.notes.push(format!("{} sampled epsilons", epsilons.len()));
    Ok(report)
}

pub(crate) fn check_unimodular(values: &[Complex64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::usage(format!("no {what} values supplied")));
    }
    for v in values {
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::usage(format!("{what} = {v} is not unimodular")));
        }
    }
    Ok(())
}

fn is_normalized_holomorphic(phi: &PolySeries) -> bool {
    let n = phi.dim();
    phi.coeff(&MultiIndex::zero(n)).norm() <= 1e-12
        && (0..n).all(|j| (phi.coeff(&MultiIndex::unit(n, j)) - Complex64::new(1.0, 0.0)).norm() <= 1e-12)
}

/// `1 − M < |∂φ/∂z_j(z)| < 1 + M` at every sample and axis.
pub fn derivative_band(phi: &PolySeries, level: f64, points: &[ComplexPoint]) -> CriterionReport {
    let mut report = CriterionReport::new("derivative_band");
    let n = phi.dim();
    let (lo, hi) = (1.0 - level, 1.0 + level);
    let d = gradient(phi);
    let mut min = vec![f64::INFINITY; n];
    let mut max = vec![0.0f64; n];
    for z in points {
        let table = PowerTable::new(z, phi.degree());
        for j in 0..n {
            let v = d[j].evaluate_with(&table).norm();
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
            if !(v > lo && v < hi) {
                report.fail(Witness::at(
                    z.clone(),
                    &[("axis", j as f64), ("abs_derivative", v), ("lower", lo), ("upper", hi)],
                ));
            }
        }
    }
    for j in 0..n {
        report.details.push(DetailRow::new(format!("axis {j} min |dphi|"), min[j], lo));
        report.details.push(DetailRow::new(format!("axis {j} max |dphi|"), max[j], hi));
    }
    if !is_normalized_holomorphic(phi) {
        report.notes.push("input is not normalized (phi(0) = 0, grad phi(0) = 1)".into());
        if report.holds == Holds::Pass {
            report.holds = Holds::Inconclusive;
        }
    }
    report
}

/// `C(m+n−1, n−1)·M / (n·m·(m−1))`.
pub fn coefficient_bound(n: usize, m: u32, level: f64) -> Result<f64> {
    assert!(m >= 2, "bound defined for m ≥ 2");
    let count = monomial_count(n, m)? as f64;
    Ok(count * level / (n as f64 * f64::from(m) * f64::from(m - 1)))
}

/// Per-degree audit of `Σ_{|α|=m}|a_α|` and `Σ_{|α|=m}|b_α|` against
/// [`coefficient_bound`], with attained/bound ratios.
pub fn coefficient_audit(f: &PluriharmonicMap, level: f64, m_max: u32) -> Result<CriterionReport> {
    let mut report = CriterionReport::new("coefficient_audit");
    let n = f.dim();
    for m in 2..=m_max {
        let bound = coefficient_bound(n, m, level)?;
        for (part, s) in [("a", f.h()), ("b", f.g())] {
            let attained = s.abs_sum_of_degree(m);
            report
                .details
                .push(DetailRow::new(format!("m = {m} sum |{part}|"), attained, bound).with_ratio());
            if attained > bound + EXACT_TOL {
                report.fail(Witness::values(&[
                    ("degree", f64::from(m)),
                    (if part == "a" { "sum_abs_a" } else { "sum_abs_b" }, attained),
                    ("bound", bound),
                ]));
            }
        }
    }
    if m_max > f.cap() {
        report
            .notes
            .push(format!("degrees above D = {} have zero coefficients", f.cap()));
    }
    Ok(report)
}

/// The coefficient majorant `≤ M` test; PASS implies a certified member.
pub fn sufficient_condition(f: &PluriharmonicMap, level: f64) -> CriterionReport {
    let mut report = CriterionReport::new("sufficient_condition");
    let n = f.dim() as f64;
    for m in 2..=f.cap() {
        let w = n * f64::from(m) * f64::from(m - 1);
        let part = w * (f.h().abs_sum_of_degree(m) + f.g().abs_sum_of_degree(m));
        if part > 0.0 {
            report
                .details
                .push(DetailRow::new(format!("m = {m} contribution"), part, level));
        }
    }
    let total = certified_upper_bound(f);
    report.details.push(DetailRow::new("majorant", total, level).with_ratio());
    if total <= level + CERTIFIED_TOL {
        report.notes.push("implies CERTIFIED_MEMBER".into());
    } else {
        report.fail(Witness::values(&[("majorant", total), ("level", level)]));
    }
    report
}

/// Envelope `n‖z‖ − (Mn²/2)‖z‖² ≤ |f(z)| ≤ n‖z‖ + (Mn²/2)‖z‖²` on the sample.
pub fn growth_check(f: &PluriharmonicMap, level: f64, points: &[ComplexPoint]) -> Result<CriterionReport> {
    let mut report = CriterionReport::new("growth_check");
    let n = f.dim() as f64;
    let quad = level * n * n / 2.0;

    let member = membership(f, level, &TorusGrid::default_for(f.dim()))?;
    report.notes.push(format!("membership precondition: {:?}", member.verdict));

    let mut min_upper = f64::INFINITY;
    let mut min_lower = f64::INFINITY;
    let mut equality_rows = Vec::new();
    for z in points {
        let s = z.sup_norm();
        let value = f.evaluate(z)?.norm();
        let upper = n * s + quad * s * s;
        let lower = n * s - quad * s * s;
        let (us, ls) = (upper - value, value - lower);
        min_upper = min_upper.min(us);
        min_lower = min_lower.min(ls);
        if us < -SAMPLED_TOL || ls < -SAMPLED_TOL {
            report.fail(Witness::at(
                z.clone(),
                &[("abs_f", value), ("lower", lower), ("upper", upper)],
            ));
        }
        if s > 0.0 && equality_rows.len() < 12 {
            if us.abs() <= EXACT_TOL {
                equality_rows.push(DetailRow::new(format!("upper equality at |z| = {s:.6}"), value, upper));
            } else if ls.abs() <= EXACT_TOL {
                equality_rows.push(DetailRow::new(format!("lower equality at |z| = {s:.6}"), value, lower));
            }
        }
    }
    report.details.push(DetailRow::new("min upper slack", min_upper, 0.0));
    report.details.push(DetailRow::new("min lower slack", min_lower, 0.0));
    report.details.extend(equality_rows);
    if member.verdict == Verdict::NotMember {
        report.holds = Holds::Inconclusive;
        report.notes.push("input is not a member at this level; envelope not claimed".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{default_polydisk_sample, polar_sample};
    use crate::series::{extremal_sharpness_map, Part};

    fn one_dim(h: &[(&[u32], f64, f64)], g: &[(&[u32], f64, f64)], cap: u32) -> PluriharmonicMap {
        PluriharmonicMap::new(
            PolySeries::from_real_parts(1, cap, h).unwrap(),
            PolySeries::from_real_parts(1, cap, g).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn nw_examples() {
        for n in 1..=3 {
            let r = noshiro_warschawski(&PluriharmonicMap::identity(n, 2), 0.0, &default_polydisk_sample(n));
            assert_eq!(r.holds, Holds::Pass);
        }
        let pts = default_polydisk_sample(1);
        let f = one_dim(&[(&[1], 1.0, 0.0)], &[(&[2], 0.4, 0.0)], 2);
        assert_eq!(noshiro_warschawski(&f, 0.0, &pts).holds, Holds::Pass);

        let f = one_dim(&[(&[1], 1.0, 0.0)], &[(&[2], 0.6, 0.0)], 2);
        let r = noshiro_warschawski(&f, 0.0, &pts);
        assert_eq!(r.holds, Holds::Fail);
        let w = r.witness.unwrap();
        assert!(w.point.unwrap().sup_norm() >= 5.0 / 6.0 - 1e-3);
    }

    #[test]
    fn epsilon_family_examples() {
        let grid = TorusGrid::default_for(1);
        let f = extremal_sharpness_map(1, 2, 1.0, Part::Holomorphic).unwrap();
        let r = epsilon_family_check(&f, 1.0, &[Complex64::new(1.0, 0.0)], &grid).unwrap();
        assert_eq!(r.holds, Holds::Pass);
        assert_eq!(r.details.len(), 1);

        let eps: Vec<Complex64> = (0..32)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 32.0))
            .collect();
        let member = crate::fixtures::rescale_majorant(
            &one_dim(&[(&[1], 1.0, 0.0), (&[2], 0.2, 0.1)], &[(&[3], -0.1, 0.05)], 3),
            1.0,
        );
        let r = epsilon_family_check(&member, 1.0, &eps, &grid).unwrap();
        assert_eq!(r.holds, Holds::Pass);

        let f = one_dim(&[(&[1], 1.0, 0.0), (&[2], 0.3, 0.0)], &[(&[2], 0.3, 0.0)], 2);
        let r = epsilon_family_check(&f, 1.0, &eps, &grid).unwrap();
        assert_eq!(r.holds, Holds::Fail);
        let plus = r.row("eps = +1.000000+0.000000i").unwrap();
        assert!((plus.attained - 1.2 * 0.999).abs() < 1e-9);
        let minus = r.row("eps = -1.000000+0.000000i").unwrap();
        assert!(minus.attained < 1e-9);
        let probe = r.row("pluriharmonic functional (probe)").unwrap();
        assert!((probe.attained - 1.2 * 0.999).abs() < 1e-9);

        assert!(epsilon_family_check(&f, 1.0, &[Complex64::new(1.1, 0.0)], &grid).is_err());
    }

    #[test]
    fn derivative_band_examples() {
        let pts = default_polydisk_sample(2);
        let r = derivative_band(&PolySeries::coordinate_sum(2, 2), 0.05, &pts);
        assert_eq!(r.holds, Holds::Pass);

        let phi = PolySeries::from_real_parts(1, 2, &[(&[1], 1.0, 0.0), (&[2], 0.45, 0.0)]).unwrap();
        let r = derivative_band(&phi, 0.9, &default_polydisk_sample(1));
        assert_eq!(r.holds, Holds::Pass);
        let hi = r.row("axis 0 max |dphi|").unwrap();
        assert!(hi.attained <= 1.0 + 0.9 * 0.99 + 1e-12);

        let bad = PolySeries::from_real_parts(1, 2, &[(&[1], 1.0, 0.0), (&[2], 0.6, 0.0)]).unwrap();
        let r = derivative_band(&bad, 0.9, &default_polydisk_sample(1));
        assert_eq!(r.holds, Holds::Fail);

        let unnormalized = PolySeries::from_real_parts(1, 2, &[(&[1], 1.0, 0.0), (&[0], 0.01, 0.0)]).unwrap();
        let r = derivative_band(&unnormalized, 0.9, &default_polydisk_sample(1));
        assert_eq!(r.holds, Holds::Inconclusive);
    }

    #[test]
    fn audit_examples() {
        let r = coefficient_audit(&PluriharmonicMap::identity(2, 4), 1.0, 4).unwrap();
        assert_eq!(r.holds, Holds::Pass);
        assert!(r.details.iter().all(|d| d.attained == 0.0));

        assert_eq!(coefficient_bound(1, 2, 1.0).unwrap(), 0.5);
        let f = extremal_sharpness_map(1, 2, 1.0, Part::Holomorphic).unwrap();
        let r = coefficient_audit(&f, 1.0, 2).unwrap();
        assert_eq!(r.holds, Holds::Pass);
        let row = r.row("m = 2 sum |a|").unwrap();
        assert!((row.attained - row.bound).abs() <= 1e-14);
        assert_eq!(row.ratio, Some(1.0));

        assert_eq!(coefficient_bound(2, 2, 1.0).unwrap(), 0.75);
        let f = extremal_sharpness_map(2, 2, 1.0, Part::Holomorphic).unwrap();
        let r = coefficient_audit(&f, 1.0, 2).unwrap();
        let row = r.row("m = 2 sum |a|").unwrap();
        assert_eq!(row.attained, 0.375);
        assert_eq!(row.ratio, Some(0.5));

        let big = one_dim(&[(&[1], 1.0, 0.0), (&[2], 0.6, 0.0)], &[], 2);
        let r = coefficient_audit(&big, 1.0, 2).unwrap();
        assert_eq!(r.holds, Holds::Fail);
        assert_eq!(r.witness.unwrap().value("degree"), Some(2.0));
    }

    #[test]
    fn sufficient_condition_examples() {
        assert_eq!(sufficient_condition(&PluriharmonicMap::identity(3, 2), 0.01).holds, Holds::Pass);
        let m = 1.0;
        let h = PolySeries::from_real_parts(
            2,
            2,
            &[(&[1, 0], 1.0, 0.0), (&[0, 1], 1.0, 0.0), (&[1, 1], m / 4.0, 0.0)],
        )
        .unwrap();
        let r = sufficient_condition(&PluriharmonicMap::holomorphic(h), m);
        assert_eq!(r.holds, Holds::Pass);
        assert_eq!(r.row("majorant").unwrap().attained, 1.0);

        let f = one_dim(&[(&[1], 1.0, 0.0), (&[2], 0.5, 0.0)], &[(&[3], 0.3, 0.0)], 3);
        let r = sufficient_condition(&f, 1.0);
        assert_eq!(r.holds, Holds::Fail);
        assert!((r.witness.unwrap().value("majorant").unwrap() - 2.8).abs() < 1e-15);
    }

    #[test]
    fn growth_examples() {
        let pts = polar_sample(1, &[0.1, 0.5, 0.9, 0.99], 16);
        let r = growth_check(&PluriharmonicMap::identity(1, 2), 1.0, &pts).unwrap();
        assert_eq!(r.holds, Holds::Pass);

        let reals: Vec<ComplexPoint> = (1..=20).map(|i| ComplexPoint::real(&[i as f64 * 0.049])).collect();
        let f1 = crate::series::extremal_growth_map(1, 1.0, 1).unwrap();
        let r = growth_check(&f1, 1.0, &reals).unwrap();
        assert_eq!(r.holds, Holds::Pass);
        assert!(r.details.iter().any(|d| d.label.starts_with("upper equality")));
        let f2 = crate::series::extremal_growth_map(1, 1.0, -1).unwrap();
        let r = growth_check(&f2, 1.0, &reals).unwrap();
        assert_eq!(r.holds, Holds::Pass);
        assert!(r.details.iter().any(|d| d.label.starts_with("lower equality")));

        let outside = one_dim(&[(&[1], 1.0, 0.0), (&[2], 2.0, 0.0)], &[], 2);
        let r = growth_check(&outside, 1.0, &reals).unwrap();
        assert_eq!(r.holds, Holds::Inconclusive);
    }

    #[test]
    fn sufficient_implies_certified() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for n in 1..=2 {
            for _ in 0..10 {
                let f = crate::fixtures::random_certified_member(&mut rng, n, 4, 1.0);
                assert_eq!(sufficient_condition(&f, 1.0).holds, Holds::Pass);
                let m = membership(&f, 1.0, &TorusGrid::default_for(n)).unwrap();
                assert_eq!(m.verdict, Verdict::CertifiedMember);
            }
        }
    }

    #[test]
    fn certified_members_pass_audit_at_n1() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(18);
        for level in [0.5, 1.0] {
            for _ in 0..50 {
                let f = crate::fixtures::random_certified_member(&mut rng, 1, 5, level);
                assert_eq!(coefficient_audit(&f, level, 5).unwrap().holds, Holds::Pass);
            }
        }
    }

    #[test]
    fn report_json_and_text() {
        let f = extremal_sharpness_map(2, 2, 1.0, Part::Holomorphic).unwrap();
        let r = coefficient_audit(&f, 1.0, 3).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["holds"], "PASS");
        assert_eq!(v["details"][0]["ratio"], 0.5);
        assert!(r.render_text().contains("m = 2 sum |a|"));
    }
}

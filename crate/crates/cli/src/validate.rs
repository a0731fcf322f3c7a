//! Analytic-versus-simulation validation reports.
//!
//! Probability campaigns compare each analytic point with its Monte Carlo
//! estimate; density campaigns additionally compute the Kolmogorov–Smirnov
//! distance of the raw draws from the analytic CDF. The verdict for each
//! variant uses the acceptance thresholds below, and the last line of the
//! report is a machine-readable summary.

use std::fmt::Write as _;

use mrtnet_core::mcsim::ks_statistic;

use crate::config::{Campaign, SweepSpec};
use crate::sweep::{self, reference_cdf, Route, SweepError, VariantResult};

/// Floor of the probability tolerance on the exact two-antenna route.
pub const EXACT_ABS_TOL: f64 = 0.01;
/// Absolute tolerance on the exponential-approximation route.
pub const APPROX_ABS_TOL: f64 = 0.03;
/// Floor of the probability tolerance when `R = I` (approximation exact).
pub const IDENTITY_ABS_TOL: f64 = 0.005;
/// Standard errors allowed on top of the floors above.
pub const SE_MULTIPLIER: f64 = 3.0;
pub const KS_EXACT_G: f64 = 0.01;
pub const KS_APPROX_G: f64 = 0.05;
pub const KS_QUOTIENT: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub text: String,
    pub passed: bool,
}

/// Which threshold applies to a variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// `|Δ| <= max(floor, 3·SE)` at every point.
    ProbabilityWithSe { floor: f64 },
    /// `|Δ| <= tol` at every point.
    ProbabilityAbs { tol: f64 },
    /// KS distance of the draws from the analytic CDF.
    Ks { tol: f64 },
}

pub fn criterion_for(campaign: Campaign, route: Route, rho: f64) -> Criterion {
    match campaign {
        Campaign::PsucVsThreshold | Campaign::AseVsDensity => {
            if rho == 0.0 {
                Criterion::ProbabilityWithSe { floor: IDENTITY_ABS_TOL }
            } else if route == Route::Approx {
                Criterion::ProbabilityAbs { tol: APPROX_ABS_TOL }
            } else {
                Criterion::ProbabilityWithSe { floor: EXACT_ABS_TOL }
            }
        }
        Campaign::PdfG if route == Route::Approx && rho > 0.0 => Criterion::Ks { tol: KS_APPROX_G },
        Campaign::PdfG => Criterion::Ks { tol: KS_EXACT_G },
        Campaign::RayleighQuotientPdf => Criterion::Ks { tol: KS_QUOTIENT },
    }
}

fn fmt_z(delta: f64, se: f64) -> String {
    if se > 0.0 {
        format!("{:+.3}", delta / se)
    } else if delta == 0.0 {
        "0.000".into()
    } else {
        "inf".into()
    }
}

/// Runs analytic and simulated curves side by side and grades them.
pub fn validate(spec: &SweepSpec) -> Result<ValidationReport, SweepError> {
    let Some(mc) = spec.mc else {
        return Err(SweepError::Config("validation needs simulation settings (set `mc.trials`)".into()));
    };
    let campaign = spec.campaign();
    let results = sweep::evaluate(spec)?;
    let column = sweep::swept_column(spec);
    let mut out = String::new();
    writeln!(out, "# validation report").unwrap();
    writeln!(
        out,
        "campaign={} trials={} seed={} variants={}",
        campaign.name(),
        mc.trials,
        mc.seed,
        results.len()
    )
    .unwrap();

    let mut failed = 0usize;
    let mut overall_max = 0.0f64;
    for r in &results {
        let (ok, max_delta) = grade_variant(&mut out, spec, campaign, column, r)?;
        overall_max = overall_max.max(max_delta);
        if !ok {
            failed += 1;
        }
    }
    let passed = failed == 0;
    writeln!(
        out,
        "SUMMARY status={} campaign={} variants={} failed={} max_abs_delta={:.6}",
        if passed { "PASS" } else { "FAIL" },
        campaign.name(),
        results.len(),
        failed,
        overall_max
    )
    .unwrap();
    Ok(ValidationReport { text: out, passed })
}

fn grade_variant(
    out: &mut String,
    spec: &SweepSpec,
    campaign: Campaign,
    column: &str,
    r: &VariantResult,
) -> Result<(bool, f64), SweepError> {
    let criterion = criterion_for(campaign, r.route, r.variant.rho);
    let mc = r.mc.as_ref().expect("simulation enabled");
    write!(out, "\nvariant {} route={}", r.variant, r.route.name()).unwrap();
    if let Some(w) = r.windows.first() {
        write!(out, " window_radius={w:.3}").unwrap();
    }
    writeln!(out).unwrap();

    let mut ok = true;
    let mut max_delta = 0.0f64;
    let mut reasons = Vec::new();
    for (i, p) in spec.points.iter().enumerate() {
        let est = mc[i];
        match &r.analytic[i] {
            Ok(a) => {
                let delta = a - est.mean;
                max_delta = max_delta.max(delta.abs());
                let point_ok = match criterion {
                    Criterion::ProbabilityWithSe { floor } => delta.abs() <= floor.max(SE_MULTIPLIER * est.std_error),
                    Criterion::ProbabilityAbs { tol } => delta.abs() <= tol,
                    Criterion::Ks { .. } => true,
                };
                let in_range = !matches!(campaign, Campaign::PsucVsThreshold | Campaign::AseVsDensity) || (0.0..=1.0).contains(a);
                if !in_range {
                    reasons.push(format!("analytic probability {a:.6} outside [0, 1] at {column}={}", p.display));
                }
                ok &= point_ok && in_range;
                writeln!(
                    out,
                    "  {column}={} analytic={a:.6} mc={:.6} se={:.6} delta={delta:+.6} z={}{}",
                    p.display,
                    est.mean,
                    est.std_error,
                    fmt_z(delta, est.std_error),
                    if point_ok { "" } else { " !" }
                )
                .unwrap();
            }
            Err(e) => {
                ok = false;
                reasons.push(format!("analytic value unavailable at {column}={}: {e}", p.display));
                writeln!(out, "  {column}={} analytic=error mc={:.6} se={:.6}", p.display, est.mean, est.std_error).unwrap();
            }
        }
    }

    let verdict_line = match criterion {
        Criterion::ProbabilityWithSe { floor } => format!("max_abs_delta={max_delta:.6} tolerance=max({floor}, {SE_MULTIPLIER}*SE)"),
        Criterion::ProbabilityAbs { tol } => format!("max_abs_delta={max_delta:.6} tolerance={tol}"),
        Criterion::Ks { tol } => {
            let samples = r.samples.as_ref().expect("density campaigns keep their draws");
            let cdf = reference_cdf(campaign, r.route, r.variant)?;
            let d = ks_statistic(samples, cdf)?;
            if d > tol {
                ok = false;
            }
            format!("max_abs_delta={max_delta:.6} ks={d:.6} tolerance={tol}")
        }
    };
    writeln!(out, "  {verdict_line} {}", if ok { "PASS" } else { "FAIL" }).unwrap();
    for reason in reasons {
        writeln!(out, "  reason: {reason}").unwrap();
    }
    Ok((ok, max_delta))
}

//! Estimators that read qualitative theory off computed fields: boundary
//! decay rates, logarithmic bracket checks, Hoelder exponents, weighted
//! Sobolev norms and truncated-energy divergence diagnostics.

use crate::analytic::Barrier;
use crate::error::{Error, Result};
use crate::solver::{DiscreteField, ProblemSpec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Innermost profile samples excluded from log-log fits: the discretization
/// error of the first few cells would otherwise pollute the slope.
pub const FIT_SKIP_CELLS: usize = 10;

/// Default logarithmic exponents for the two-sided bracket.
pub const DEFAULT_ETA: (f64, f64) = (0.5, 0.5);

/// Least-squares slope and intercept of y against x.
fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 3 || xs.len() != ys.len() {
        return Err(Error::InsufficientData(format!(
            "need at least 3 paired samples, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("degenerate abscissa in fit".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Result of fitting u ~ C d^alpha along a boundary-normal profile.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub alpha: f64,
    pub intercept: f64,
    /// Fit window in distance-to-boundary units.
    pub window: (f64, f64),
    pub samples: usize,
    pub correlation: f64,
}

/// Fits the boundary decay exponent alpha in u ~ C d^alpha from profile
/// samples in the strip d < sigma / 16, skipping the innermost
/// `FIT_SKIP_CELLS` samples. The window shrink keeps sub-leading terms of
/// u (regular away from the boundary) from biasing the slope.
pub fn boundary_rate_fit(field: &DiscreteField, sigma: f64) -> Result<RateReport> {
    let d_max = sigma / 16.0;
    let profile = field.boundary_profile();
    let mut inside: Vec<(f64, f64)> = profile
        .into_iter()
        .filter(|(d, u)| *d < d_max && *u > 0.0)
        .collect();
    inside.sort_by(|a, b| a.0.total_cmp(&b.0));
    if inside.len() <= FIT_SKIP_CELLS + 3 {
        return Err(Error::InsufficientData(format!(
            "only {} usable profile samples under {d_max}",
            inside.len()
        )));
    }
    let inside = &inside[FIT_SKIP_CELLS..];
    let xs: Vec<f64> = inside.iter().map(|(d, _)| d.ln()).collect();
    let ys: Vec<f64> = inside.iter().map(|(_, u)| u.ln()).collect();
    let (slope, intercept) = linear_fit(&xs, &ys)?;
    Ok(RateReport {
        alpha: slope,
        intercept,
        window: (inside[0].0, inside[inside.len() - 1].0),
        samples: inside.len(),
        correlation: correlation(&xs, &ys),
    })
}

/// Outcome of the two-sided logarithmic bracket test
/// D1 d^{1-beta} (-log d)^{-eta1} <= u <= D2 d^{1-beta} (-log d)^{eta2}.
#[derive(Debug, Clone, Serialize)]
pub struct BracketReport {
    pub beta: f64,
    pub eta: (f64, f64),
    /// Fitted constants: the max of u over the lower barrier and over the
    /// upper barrier, taken over the calibration half of the window.
    pub d1: f64,
    pub d2: f64,
    pub window: (f64, f64),
    pub holds: bool,
    /// Worst violation ratio; 1.0 means the bracket is tight, above 1 the
    /// bracket failed somewhere by that factor.
    pub worst_ratio: f64,
}

/// Checks the two-sided bracket on every interior node with d in the
/// window (d_min, sigma). Constants are calibrated on the outer half of
/// the window (d > sqrt(d_min * sigma)) and the bracket is then tested on
/// the inner half, so the verdict reflects propagation toward the
/// boundary rather than a tautological fit.
pub fn log_bracket_check(
    field: &DiscreteField,
    beta: f64,
    eta: (f64, f64),
    sigma: f64,
    d_min: f64,
) -> Result<BracketReport> {
    bracket_check(field, beta, eta, sigma, d_min, true)
}

/// Upper bound only: u <= D2 d^{1-beta} (-log d)^{eta2}. On domains with
/// corners the solution decays faster than d^{1-beta} along the corner
/// directions, so the lower half of the bracket is not expected there;
/// this check stays meaningful.
pub fn upper_bound_check(
    field: &DiscreteField,
    beta: f64,
    eta2: f64,
    sigma: f64,
    d_min: f64,
) -> Result<BracketReport> {
    bracket_check(field, beta, (0.0, eta2), sigma, d_min, false)
}

fn bracket_check(
    field: &DiscreteField,
    beta: f64,
    eta: (f64, f64),
    sigma: f64,
    d_min: f64,
    check_lower: bool,
) -> Result<BracketReport> {
    if !(d_min > 0.0 && d_min < sigma) {
        return Err(Error::Config(format!("need 0 < d_min < sigma, got {d_min}, {sigma}")));
    }
    let lower = Barrier::new(-eta.0, beta, sigma.min(crate::analytic::INV_E))?;
    let upper = Barrier::new(eta.1, beta, sigma.min(crate::analytic::INV_E))?;
    let samples: Vec<(f64, f64)> = field
        .all_nodes()
        .into_iter()
        .filter(|(d, _)| *d > d_min && *d < sigma.min(crate::analytic::INV_E))
        .collect();
    if samples.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "only {} nodes inside the bracket window",
            samples.len()
        )));
    }
    let split = (d_min * sigma).sqrt();
    let mut d1 = f64::INFINITY;
    let mut d2: f64 = 0.0;
    let mut calibrated = 0usize;
    for (d, u) in samples.iter().filter(|(d, _)| *d >= split) {
        if check_lower {
            d1 = d1.min(u / lower.eval(*d)?);
        }
        d2 = d2.max(u / upper.eval(*d)?);
        calibrated += 1;
    }
    if calibrated < 4 || (check_lower && !(d1 > 0.0)) || !(d2 > 0.0) {
        return Err(Error::InsufficientData(
            "calibration half of the bracket window is empty or u <= 0 there".into(),
        ));
    }
    let mut worst: f64 = 1.0;
    for (d, u) in samples.iter().filter(|(d, _)| *d < split) {
        if check_lower {
            let lo = d1 * lower.eval(*d)?;
            if *u < lo {
                worst = worst.max(lo / u.max(f64::MIN_POSITIVE));
            }
        }
        let hi = d2 * upper.eval(*d)?;
        if *u > hi {
            worst = worst.max(u / hi);
        }
    }
    Ok(BracketReport {
        beta,
        eta,
        d1: if check_lower { d1 } else { 0.0 },
        d2,
        window: (d_min, sigma),
        holds: worst <= 1.05,
        worst_ratio: worst,
    })
}

/// Hoelder regularity read off a field.
#[derive(Debug, Clone, Serialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    /// True when the quotients stay bounded at every tested scale, i.e.
    /// nothing below Lipschitz was detected.
    pub lipschitz_or_better: bool,
    pub scales: Vec<f64>,
    pub quotients: Vec<f64>,
}

/// Estimates the Hoelder exponent by maximizing |u(x)-u(y)| / |x-y|^t
/// proxies: for each dyadic scale h the worst quotient |u(x)-u(y)|/|x-y|
/// over node pairs at separation about h is recorded, and the growth of
/// that Lipschitz quotient as h -> 0 gives 1 - alpha. Pairs mix a
/// deterministic boundary-normal family (where the worst behavior lives)
/// with seeded random interior pairs.
pub fn holder_estimate(field: &DiscreteField, seed: u64) -> Result<HolderEstimate> {
    let mut profile = field.boundary_profile();
    profile.sort_by(|a, b| a.0.total_cmp(&b.0));
    // include the boundary node itself: u = 0 at d = 0
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    pts.extend(profile);
    if pts.len() < 16 {
        return Err(Error::InsufficientData(format!(
            "profile too short for scale scan: {} points",
            pts.len()
        )));
    }
    let span = pts[pts.len() - 1].0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scales = Vec::new();
    let mut quotients = Vec::new();
    // stop above the innermost cells, where discretization error of the
    // field is comparable to the signal and would pollute the quotients
    let h_floor = (span * 0.5f64.powi(20)).max(pts[1].0).max(1e-14);
    let mut k = 2u32;
    loop {
        let h = span * 0.5f64.powi(k as i32);
        if h < h_floor {
            break;
        }
        let mut worst: f64 = 0.0;
        // deterministic: every profile point against the point about h inward
        for (i, (d, u)) in pts.iter().enumerate() {
            let target = d + h;
            let j = match pts.binary_search_by(|p| p.0.total_cmp(&target)) {
                Ok(j) => j,
                Err(j) => j.min(pts.len() - 1),
            };
            if j > i {
                let (dj, uj) = pts[j];
                let sep = dj - d;
                if sep >= 0.5 * h && sep <= 2.0 * h {
                    worst = worst.max((uj - u).abs() / sep);
                }
            }
        }
        // randomized pairs at the same scale
        for _ in 0..2000 {
            let i = rng.gen_range(0..pts.len());
            let target = pts[i].0 + h * rng.gen_range(0.5..2.0);
            let j = match pts.binary_search_by(|p| p.0.total_cmp(&target)) {
                Ok(j) => j,
                Err(j) => j.min(pts.len() - 1),
            };
            if j != i {
                let sep = (pts[j].0 - pts[i].0).abs();
                if sep > 0.0 {
                    worst = worst.max((pts[j].1 - pts[i].1).abs() / sep);
                }
            }
        }
        if worst > 0.0 {
            scales.push(h);
            quotients.push(worst);
        }
        k += 1;
        if k > 60 {
            break;
        }
    }
    if scales.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "only {} usable scales for the Hoelder scan",
            scales.len()
        )));
    }
    let xs: Vec<f64> = scales.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = quotients.iter().map(|q| q.ln()).collect();
    let (slope, _) = linear_fit(&xs, &ys)?;
    // Lipschitz quotient grows like h^{alpha - 1}
    let alpha = (1.0 + slope).min(1.0);
    let lipschitz_or_better = slope >= -0.02;
    Ok(HolderEstimate {
        alpha: if lipschitz_or_better { 1.0 } else { alpha },
        lipschitz_or_better,
        scales,
        quotients,
    })
}

/// Weighted H^1 seminorm squared int |grad u|^2 d^beta, by midpoint
/// quadrature over the gradient faces.
pub fn weighted_sobolev_norm(spec: &ProblemSpec, field: &DiscreteField) -> Result<f64> {
    let mut total = 0.0;
    for face in field.faces() {
        let w = spec.weight.eval_at(face.d_mid, &face.mid_point)?;
        total += w * face.grad * face.grad * face.measure;
    }
    Ok(total)
}

/// Verdict of the truncated-energy scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SobolevVerdict {
    /// E(delta) converges: u is in the unweighted H^1.
    Finite,
    /// E(delta) grows like -log delta.
    LogDivergent,
    /// E(delta) grows like a power of 1/delta.
    PowerDivergent,
}

#[derive(Debug, Clone, Serialize)]
pub struct SobolevReport {
    pub beta: f64,
    pub verdict: SobolevVerdict,
    /// Slope of log2(energy increment) against log2(delta): about 0 for a
    /// logarithmic divergence, about 1 - 2 beta for a power divergence
    /// E ~ delta^{1-2 beta}, positive when the energy converges.
    pub power_slope: f64,
    /// Correlation of E against -log delta (near 1 for the log case).
    pub log_correlation: f64,
    pub deltas: Vec<f64>,
    pub energies: Vec<f64>,
}

/// Scans the unweighted truncated energy E(delta) = int_{d > delta}
/// |grad u|^2 over a dyadic ladder of cutoffs and classifies its growth.
/// The classification mirrors the membership threshold: finite below the
/// critical exponent, logarithmic at it, power growth with slope about
/// 1 - 2 beta above it.
pub fn truncated_energy_scan(field: &DiscreteField, beta: f64) -> Result<SobolevReport> {
    let faces = field.faces();
    let first = field.first_cell();
    let sigma = field.domain().default_sigma();
    // cutoffs from sigma/2 down to where the mesh stops resolving whole
    // octaves (at least 4 gradient samples per octave)
    let mut dmids: Vec<f64> = faces.iter().map(|f| f.d_mid).collect();
    dmids.sort_by(f64::total_cmp);
    let mut deltas = Vec::new();
    let mut delta = 0.5 * sigma;
    while delta > 4.0 * first {
        let lo = dmids.partition_point(|d| *d <= delta);
        let hi = dmids.partition_point(|d| *d <= 2.0 * delta);
        if hi - lo < 4 {
            break;
        }
        deltas.push(delta);
        delta *= 0.5;
    }
    if deltas.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "only {} cutoff scales between the mesh floor and sigma",
            deltas.len()
        )));
    }
    let energies: Vec<f64> = deltas
        .iter()
        .map(|&delta| {
            faces
                .iter()
                .filter(|f| f.d_mid > delta)
                .map(|f| f.grad * f.grad * f.measure)
                .sum::<f64>()
        })
        .collect();
    // increments per octave across the tail decide the verdict: they die
    // out for a convergent energy, stay constant for a log divergence and
    // grow geometrically (rate 2^{1-2 beta}) for a power divergence
    let tail = 6.min(deltas.len() - 1);
    let last = energies.len() - 1;
    let increments: Vec<f64> = (last - tail + 1..=last)
        .map(|i| (energies[i] - energies[i - 1]).max(f64::MIN_POSITIVE))
        .collect();
    let relative: Vec<f64> = (last - tail + 1..=last)
        .map(|i| (energies[i] - energies[i - 1]) / energies[i])
        .collect();
    let xs: Vec<f64> = deltas[last - tail..=last].iter().map(|d| -d.ln()).collect();
    let ys_log: Vec<f64> = energies[last - tail..=last].to_vec();
    let log_correlation = correlation(&xs, &ys_log);
    // successive increments live on halved delta scales, so log2(delta)
    // drops by one per entry
    let log_deltas: Vec<f64> = (0..increments.len()).map(|i| -(i as f64)).collect();
    let log_incs: Vec<f64> = increments.iter().map(|v| v.log2()).collect();
    let (power_slope, _) = linear_fit(&log_deltas, &log_incs)?;
    let verdict = if relative.iter().all(|r| r.abs() < 0.01) {
        SobolevVerdict::Finite
    } else if power_slope > -0.1 {
        SobolevVerdict::LogDivergent
    } else {
        SobolevVerdict::PowerDivergent
    };
    Ok(SobolevReport {
        beta,
        verdict,
        power_slope,
        log_correlation,
        deltas,
        energies,
    })
}

/// Rayleigh-type quotient int u'^2 dx / int (u/d)^2 dx on (0,1) for a
/// callable profile; at least 1/4 by the Hardy inequality.
pub fn hardy_quotient(u: &dyn Fn(f64) -> f64, du: &dyn Fn(f64) -> f64) -> Result<f64> {
    let num = crate::quad::adaptive_simpson(&|x| du(x) * du(x), 1e-9, 1.0 - 1e-9, 1e-10);
    let den = crate::quad::adaptive_simpson(
        &|x| {
            let d = x.min(1.0 - x);
            let v = u(x) / d;
            v * v
        },
        1e-9,
        1.0 - 1e-9,
        1e-10,
    );
    if !(den > 0.0) {
        return Err(Error::InsufficientData("vanishing Hardy denominator".into()));
    }
    Ok(num / den)
}

/// Quotient int u^2 / int u'^2 on (0,1); at most 1/pi^2 by the Poincare
/// inequality, with equality for the first Dirichlet eigenfunction.
pub fn poincare_quotient(u: &dyn Fn(f64) -> f64, du: &dyn Fn(f64) -> f64) -> Result<f64> {
    let num = crate::quad::adaptive_simpson(&|x| u(x) * u(x), 0.0, 1.0, 1e-10);
    let den = crate::quad::adaptive_simpson(&|x| du(x) * du(x), 0.0, 1.0, 1e-10);
    if !(den > 0.0) {
        return Err(Error::InsufficientData("vanishing Poincare denominator".into()));
    }
    Ok(num / den)
}

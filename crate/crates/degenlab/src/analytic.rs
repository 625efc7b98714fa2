//! Closed-form oracles: the barrier family d^{1-beta}(-log d)^eta with its
//! exact image under the weighted operator, two explicit radial solutions on
//! the unit ball, and a 1-D closed form, together with finite-difference
//! application of the operator for independent verification.

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::quad::{adaptive_simpson, integrate_singular_lower, SingularIntegral};

pub const INV_E: f64 = 0.36787944117144233; // 1/e

/// Comparison function v = d^{1-beta}(-log d)^eta on 0 < d < sigma <= 1/e.
///
/// The sigma cap keeps -log d >= 1 so fractional eta needs no branch cuts.
#[derive(Debug, Clone, Copy)]
pub struct Barrier {
    pub eta: f64,
    pub beta: f64,
    pub sigma: f64,
}

impl Barrier {
    pub fn new(eta: f64, beta: f64, sigma: f64) -> Result<Self> {
        if !(beta < 1.0) {
            return Err(Error::Config(format!("barrier requires beta < 1, got {beta}")));
        }
        if !(sigma > 0.0 && sigma <= INV_E + 1e-15) {
            return Err(Error::Config(format!("barrier requires 0 < sigma <= 1/e, got {sigma}")));
        }
        Ok(Barrier { eta, beta, sigma })
    }

    fn check_d(&self, d: f64) -> Result<()> {
        if !(d > 0.0 && d < self.sigma) {
            return Err(Error::DomainError(format!(
                "barrier defined on (0, {}), got d={d}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// v(d) = d^{1-beta} (-log d)^eta.
    pub fn eval(&self, d: f64) -> Result<f64> {
        self.check_d(d)?;
        Ok(d.powf(1.0 - self.beta) * (-d.ln()).powf(self.eta))
    }

    /// Exact image of the barrier under L_beta, with the Laplacian of the
    /// distance supplied as a parameter:
    ///
    ///   L_beta(v) = -lap_d * [(1-b)(-log d)^e - e (-log d)^{e-1}]
    ///             + d^{-1} * [(1-b) e (-log d)^{e-1} - e (e-1)(-log d)^{e-2}]
    pub fn l_beta(&self, d: f64, lap_d: f64) -> Result<f64> {
        self.check_d(d)?;
        let b = self.beta;
        let e = self.eta;
        let l = -d.ln();
        let geom = -lap_d * ((1.0 - b) * l.powf(e) - e * l.powf(e - 1.0));
        let sing = ((1.0 - b) * e * l.powf(e - 1.0) - e * (e - 1.0) * l.powf(e - 2.0)) / d;
        Ok(geom + sing)
    }

    /// Scans Gamma_sigma for the largest sigma' such that L_beta(v) keeps
    /// the sign of its leading term (1-beta)*eta/(d(-log d)^{1-eta})
    /// throughout (0, sigma'). Fails if no sign-definite neighborhood is
    /// found down to d = 1e-12.
    pub fn sign_radius(&self, dom: &Domain) -> Result<f64> {
        if self.eta == 0.0 {
            return Err(Error::Config("sign_radius requires eta != 0".into()));
        }
        let predicted = ((1.0 - self.beta) * self.eta).signum();
        let d_floor = 1e-12;
        let samples = 600usize;
        let ratio = (d_floor / self.sigma).powf(1.0 / samples as f64);
        // walk from just inside sigma down to the floor; remember the
        // smallest d at which the sign disagrees
        let mut bad_sup: Option<f64> = None;
        let mut d = self.sigma * ratio;
        for _ in 0..samples {
            let lap = laplacian_at_distance(dom, d)?;
            let val = self.l_beta(d, lap)?;
            if val.signum() != predicted {
                bad_sup = Some(d);
            }
            d *= ratio;
        }
        match bad_sup {
            None => Ok(self.sigma),
            Some(worst) if worst <= 10.0 * d_floor => Err(Error::CertificationFailure(format!(
                "sign of L_beta(v) disagrees with ({:+}) down to d={worst:.3e}",
                predicted
            ))),
            Some(worst) => Ok(worst),
        }
    }
}

/// Laplacian of the distance at a representative off-ridge point at
/// distance d from the boundary.
fn laplacian_at_distance(dom: &Domain, d: f64) -> Result<f64> {
    match dom {
        Domain::Interval { .. } | Domain::Rectangle { .. } => Ok(0.0),
        Domain::Ball { dim, radius } => {
            if !(d < *radius) {
                return Err(Error::DomainError(format!("d={d} >= radius {radius}")));
            }
            Ok(-((*dim as f64) - 1.0) / (radius - d))
        }
    }
}

/// Barycentric Chebyshev interpolant on [0, 1].
#[derive(Debug, Clone)]
struct ChebTable {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl ChebTable {
    fn build(m: usize, f: &dyn Fn(f64) -> f64) -> Self {
        let nodes: Vec<f64> = (0..=m)
            .map(|j| 0.5 * (1.0 + (std::f64::consts::PI * j as f64 / m as f64).cos()))
            .collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        ChebTable { nodes, values }
    }

    fn eval(&self, x: f64) -> f64 {
        let m = self.nodes.len() - 1;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..=m {
            let diff = x - self.nodes[j];
            if diff == 0.0 {
                return self.values[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == m {
                w *= 0.5;
            }
            let t = w / diff;
            num += t * self.values[j];
            den += t;
        }
        num / den
    }
}

/// Which closed-form solution a `RadialSolution` represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialKind {
    /// Solution of L_beta(u) = d^beta on the unit ball, beta in [0, 1).
    SourceDbeta,
    /// Solution of L_beta(u) = 1 on the unit ball, any beta < 1.
    SourceOne,
    /// 1-D analogue on (0, 1) with f = 1 and d = min(x, 1-x).
    OneD,
}

/// A positive solution vanishing on the boundary, given in closed form
/// (possibly via quadrature for the SourceDbeta kind).
pub struct RadialSolution {
    kind: RadialKind,
    beta: f64,
    dim: usize,
    inner: Option<ChebTable>,
    /// Table of J(s) = int_0^1 sigma^{N-1} (1 - s sigma)^beta d sigma on
    /// [0, 0.6], so that s^{1-N} I(s) = s J(s) can be evaluated near s = 0
    /// without catastrophic cancellation.
    inner_scaled: Option<ChebTable>,
}

impl RadialSolution {
    pub fn new(kind: RadialKind, beta: f64, dim: usize) -> Result<Self> {
        if !(beta < 1.0) {
            return Err(Error::DomainError(format!("requires beta < 1, got {beta}")));
        }
        match kind {
            RadialKind::SourceDbeta => {
                if beta < 0.0 {
                    return Err(Error::DomainError(format!(
                        "the d^beta-source example is stated for beta in [0,1), got {beta}"
                    )));
                }
                if dim < 2 {
                    return Err(Error::Config(format!("requires N >= 2, got {dim}")));
                }
                let nf = dim as f64;
                // inner integral I(s) = int_0^s t^{N-1}(1-t)^beta dt is smooth
                // on [0,1]; tabulate once on Chebyshev nodes
                let inner = ChebTable::build(64, &|s: f64| {
                    adaptive_simpson(&|t| t.powf(nf - 1.0) * (1.0 - t).powf(beta), 0.0, s, 1e-13)
                });
                let inner_scaled = ChebTable::build(48, &|x: f64| {
                    let s = 0.6 * x;
                    adaptive_simpson(
                        &|sig| sig.powf(nf - 1.0) * (1.0 - s * sig).powf(beta),
                        0.0,
                        1.0,
                        1e-13,
                    )
                });
                Ok(RadialSolution {
                    kind,
                    beta,
                    dim,
                    inner: Some(inner),
                    inner_scaled: Some(inner_scaled),
                })
            }
            RadialKind::SourceOne => {
                if dim < 2 {
                    return Err(Error::Config(format!("requires N >= 2, got {dim}")));
                }
                Ok(RadialSolution { kind, beta, dim, inner: None, inner_scaled: None })
            }
            RadialKind::OneD => Ok(RadialSolution { kind, beta, dim: 1, inner: None, inner_scaled: None }),
        }
    }

    pub fn kind(&self) -> RadialKind {
        self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The source term this solution solves against, as a function of the
    /// radial coordinate (or x for the 1-D kind).
    pub fn source(&self, r: f64) -> f64 {
        match self.kind {
            RadialKind::SourceDbeta => (1.0 - r).powf(self.beta),
            RadialKind::SourceOne | RadialKind::OneD => 1.0,
        }
    }

    /// Evaluates the solution at radius r (or coordinate x in 1-D).
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::DomainError(format!("r={r} outside [0,1]")));
        }
        match self.kind {
            RadialKind::SourceDbeta => Ok(self.eval_source_dbeta(r)),
            RadialKind::SourceOne => Ok(eval_source_one(self.beta, self.dim, r)),
            RadialKind::OneD => Ok(eval_1d_source_one(self.beta, r)),
        }
    }

    fn eval_source_dbeta(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let inner = self.inner.as_ref().expect("tabulated at construction");
        let scaled = self.inner_scaled.as_ref().expect("tabulated at construction");
        let nf = self.dim as f64;
        let beta = self.beta;
        let split = 0.5;
        let mut total = 0.0;
        if r < split {
            // s^{1-N} I(s) = s J(s): smooth through s = 0
            let g = move |s: f64| s * (1.0 - s).powf(-beta) * scaled.eval(s / 0.6);
            total += adaptive_simpson(&g, r, split, 1e-12);
        }
        // substitute s = 1 - t to put the (1-s)^{-beta} singularity at the
        // lower end of the t-interval
        let f = move |t: f64| {
            let s = 1.0 - t;
            s.powf(1.0 - nf) * t.powf(-beta) * inner.eval(s)
        };
        total += match integrate_singular_lower(&f, 0.0, 1.0 - r.max(split), 1e-11) {
            SingularIntegral::Finite(v) => v,
            SingularIntegral::Divergent => f64::INFINITY, // unreachable for beta < 1
        };
        total
    }
}

/// u(r) = (1 + (1-beta) r) / (N (1-beta)(2-beta)) * (1-r)^{1-beta},
/// solving L_beta(u) = 1 on the unit ball.
pub fn eval_source_one(beta: f64, dim: usize, r: f64) -> f64 {
    let nf = dim as f64;
    (1.0 + (1.0 - beta) * r) / (nf * (1.0 - beta) * (2.0 - beta)) * (1.0 - r).powf(1.0 - beta)
}

/// 1-D closed form for -(d^beta u')' = 1 on (0,1), d = min(x, 1-x):
/// on (0, 1/2], u = x^{1-beta}/(2(1-beta)) - x^{2-beta}/(2-beta), mirrored.
pub fn eval_1d_source_one(beta: f64, x: f64) -> f64 {
    let x = x.min(1.0 - x);
    if x <= 0.0 {
        return 0.0;
    }
    x.powf(1.0 - beta) / (2.0 * (1.0 - beta)) - x.powf(2.0 - beta) / (2.0 - beta)
}

/// Finite-difference application of L_beta = -(d^beta u')' on (0,1) with
/// d = min(x, 1-x), using half-point weights.
pub fn fd_lbeta_1d(u: &dyn Fn(f64) -> f64, beta: f64, x: f64, h: f64) -> Result<f64> {
    if x - h <= 0.0 || x + h >= 1.0 {
        return Err(Error::Stencil(format!("x={x}, h={h} reaches the boundary")));
    }
    let d = |y: f64| y.min(1.0 - y);
    let wl = d(x - 0.5 * h).powf(beta);
    let wr = d(x + 0.5 * h).powf(beta);
    Ok((wl * (u(x) - u(x - h)) + wr * (u(x) - u(x + h))) / (h * h))
}

/// Finite-difference application of the radial operator
/// -(1/r^{N-1}) (r^{N-1} d^beta u')' on the unit ball, d = 1 - r.
pub fn fd_lbeta_radial(u: &dyn Fn(f64) -> f64, beta: f64, dim: usize, r: f64, h: f64) -> Result<f64> {
    if r - h <= 0.0 || r + h >= 1.0 {
        return Err(Error::Stencil(format!("r={r}, h={h} reaches the boundary or the origin")));
    }
    let nf = dim as f64;
    let coef = |s: f64| s.powf(nf - 1.0) * (1.0 - s).powf(beta);
    let al = coef(r - 0.5 * h);
    let ar = coef(r + 0.5 * h);
    Ok((al * (u(r) - u(r - h)) + ar * (u(r) - u(r + h))) / (h * h) / r.powf(nf - 1.0))
}

/// Maximum residual |L_beta u - f| of a closed-form solution under the
/// finite-difference operator, over the given sample points.
pub fn verify_operator_identity(sol: &RadialSolution, samples: &[f64], h: f64) -> Result<f64> {
    let mut max_res: f64 = 0.0;
    match sol.kind {
        RadialKind::OneD => {
            let beta = sol.beta;
            let u = move |x: f64| eval_1d_source_one(beta, x);
            for &x in samples {
                let res = (fd_lbeta_1d(&u, beta, x, h)? - sol.source(x.min(1.0 - x))).abs();
                max_res = max_res.max(res);
            }
        }
        RadialKind::SourceOne | RadialKind::SourceDbeta => {
            for &r in samples {
                let ur = |s: f64| sol.eval(s).unwrap_or(0.0);
                let res = (fd_lbeta_radial(&ur, sol.beta, sol.dim, r, h)? - sol.source(r)).abs();
                max_res = max_res.max(res);
            }
        }
    }
    Ok(max_res)
}

/// Maximum deviation between the exact barrier image and the
/// finite-difference operator applied to the barrier, on the interval
/// domain (flat boundary, lap_d = 0), at distances `samples` < 1/2.
pub fn verify_barrier_identity(b: &Barrier, samples: &[f64], h: f64) -> Result<f64> {
    let beta = b.beta;
    let eta = b.eta;
    let v = move |x: f64| {
        let d = x.min(1.0 - x);
        d.powf(1.0 - beta) * (-d.ln()).powf(eta)
    };
    let mut max_dev: f64 = 0.0;
    for &d in samples {
        // three rounds of Richardson extrapolation on the second-order stencil
        let a1 = fd_lbeta_1d(&v, beta, d, h)?;
        let a2 = fd_lbeta_1d(&v, beta, d, 0.5 * h)?;
        let a3 = fd_lbeta_1d(&v, beta, d, 0.25 * h)?;
        let a4 = fd_lbeta_1d(&v, beta, d, 0.125 * h)?;
        let b1 = (4.0 * a2 - a1) / 3.0;
        let b2 = (4.0 * a3 - a2) / 3.0;
        let b3 = (4.0 * a4 - a3) / 3.0;
        let c1 = (16.0 * b2 - b1) / 15.0;
        let c2 = (16.0 * b3 - b2) / 15.0;
        let numeric = (64.0 * c2 - c1) / 63.0;
        let exact = b.l_beta(d, 0.0)?;
        let dev = (numeric - exact).abs() / exact.abs().max(1.0);
        max_dev = max_dev.max(dev);
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barrier_eval_closed_forms() {
        let b = Barrier::new(0.0, 0.5, INV_E).unwrap();
        assert!((b.eval(0.25).unwrap() - 0.5).abs() < 1e-14);
        let b = Barrier::new(1.0, 0.0, INV_E).unwrap();
        assert!((b.eval(INV_E * 0.999999).unwrap() - INV_E).abs() < 1e-5);
        let b = Barrier::new(-1.0, 0.0, INV_E).unwrap();
        let d = (-2.0f64).exp();
        assert!((b.eval(d).unwrap() - d / 2.0).abs() < 1e-14);
    }

    #[test]
    fn barrier_eval_domain_checks() {
        let b = Barrier::new(0.5, 0.5, 0.25).unwrap();
        assert!(b.eval(0.0).is_err());
        assert!(b.eval(0.3).is_err());
        assert!(Barrier::new(0.5, 1.0, 0.25).is_err());
        assert!(Barrier::new(0.5, 0.5, 0.5).is_err()); // sigma > 1/e
    }

    #[test]
    fn lbeta_eta_zero_is_minus_one_minus_beta_lapd() {
        // algebraic identity at random triples
        let mut state = 88172645463325252u64;
        let mut rnd = || {
            // xorshift
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let beta = -2.0 + 2.9 * rnd();
            let d = 1e-6 + 0.3 * rnd();
            let lap = -5.0 + 10.0 * rnd();
            let b = Barrier::new(0.0, beta, INV_E).unwrap();
            let got = b.l_beta(d, lap).unwrap();
            let want = -(1.0 - beta) * lap;
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "beta={beta} d={d} lap={lap}");
        }
    }

    #[test]
    fn lbeta_worked_example() {
        // eta=1, beta=0, d=1/e, lap_d=-2: the geometric bracket vanishes and
        // the singular bracket gives e
        let b = Barrier::new(1.0, 0.0, INV_E).unwrap();
        let got = b.l_beta(INV_E * (1.0 - 1e-12), -2.0).unwrap();
        assert!((got - std::f64::consts::E).abs() < 1e-6, "got {got}");
    }

    #[test]
    fn lbeta_eta_zero_interval_is_zero() {
        let b = Barrier::new(0.0, 0.3, INV_E).unwrap();
        assert_eq!(b.l_beta(0.1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn leading_term_law_on_interval() {
        // d (-log d)^{1-eta} L_beta(v) -> (1-beta) eta as d -> 0
        for (eta, beta) in [(-0.5, 0.5), (0.5, 0.5), (0.25, -1.0), (-1.5, 0.0)] {
            let b = Barrier::new(eta, beta, INV_E).unwrap();
            let mut prev_err = f64::INFINITY;
            for k in [8, 16, 32] {
                let d = 2.0f64.powi(-k);
                let scaled = d * (-d.ln()).powf(1.0 - eta) * b.l_beta(d, 0.0).unwrap();
                let err = (scaled - (1.0 - beta) * eta).abs();
                assert!(err < prev_err + 1e-12, "not improving at eta={eta} beta={beta}");
                prev_err = err;
            }
            assert!(prev_err < 0.2 * ((1.0 - beta) * eta).abs());
        }
    }

    #[test]
    fn sign_radius_on_interval_is_full() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let b = Barrier::new(-0.5, 0.5, 0.25).unwrap();
        assert_eq!(b.sign_radius(&dom).unwrap(), 0.25);
        let b = Barrier::new(0.5, 0.5, 0.25).unwrap();
        assert_eq!(b.sign_radius(&dom).unwrap(), 0.25);
    }

    #[test]
    fn sign_radius_on_ball_is_positive() {
        let dom = Domain::ball(2, 1.0).unwrap();
        let b = Barrier::new(-0.5, 0.5, 0.25).unwrap();
        let s = b.sign_radius(&dom).unwrap();
        assert!(s > 0.0 && s <= 0.25);
    }

    #[test]
    fn sign_radius_requires_nonzero_eta() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let b = Barrier::new(0.0, 0.5, 0.25).unwrap();
        assert!(b.sign_radius(&dom).is_err());
    }

    #[test]
    fn source_one_closed_form_values() {
        assert!((eval_source_one(0.0, 2, 0.0) - 0.25).abs() < 1e-15);
        assert!((eval_source_one(0.0, 2, 0.5) - 0.1875).abs() < 1e-15);
        assert!(eval_source_one(0.5, 2, 1.0).abs() < 1e-15);
    }

    #[test]
    fn source_one_beta_zero_is_classical() {
        for dim in [2usize, 3] {
            for k in 0..=10 {
                let r = k as f64 / 10.0;
                let classical = (1.0 - r * r) / (2.0 * dim as f64);
                assert!((eval_source_one(0.0, dim, r) - classical).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_d_closed_form_values() {
        assert!((eval_1d_source_one(0.0, 0.3) - 0.105).abs() < 1e-15);
        // beta=0.5, x=0.25: 0.5 - 0.125/1.5
        assert!((eval_1d_source_one(0.5, 0.25) - (0.5 - 0.125 / 1.5)).abs() < 1e-15);
        // symmetry
        for beta in [-1.0, 0.25, 0.75] {
            for x in [0.1, 0.3, 0.45] {
                assert!((eval_1d_source_one(beta, x) - eval_1d_source_one(beta, 1.0 - x)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn source_dbeta_collapses_at_beta_zero() {
        let sol = RadialSolution::new(RadialKind::SourceDbeta, 0.0, 2).unwrap();
        assert!((sol.eval(0.0).unwrap() - 0.25).abs() < 1e-8);
        assert!(sol.eval(1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn source_dbeta_rejects_negative_beta() {
        assert!(RadialSolution::new(RadialKind::SourceDbeta, -0.5, 2).is_err());
    }

    #[test]
    fn source_dbeta_boundary_rate() {
        let sol = RadialSolution::new(RadialKind::SourceDbeta, 0.5, 2).unwrap();
        let r1 = sol.eval(0.99).unwrap() / 0.01f64.powf(0.5);
        let r2 = sol.eval(0.999).unwrap() / 0.001f64.powf(0.5);
        assert!((r1 / r2 - 1.0).abs() < 0.1, "ratio drifted: {r1} vs {r2}");
    }

    #[test]
    fn boundary_decay_ratio_stabilizes() {
        // u / d^{1-beta} tends to a positive constant; <1% drift over the
        // last four dyadic samples
        for beta in [-1.0, -0.5, 0.0, 0.25, 0.5, 0.75] {
            let check = |eval: &dyn Fn(f64) -> f64| {
                let ratios: Vec<f64> = (6..=20)
                    .map(|k| {
                        let d = 2.0f64.powi(-k);
                        eval(d) / d.powf(1.0 - beta)
                    })
                    .collect();
                let last = &ratios[ratios.len() - 4..];
                let lo = last.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = last.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert!(lo > 0.0, "ratio not positive at beta={beta}");
                assert!((hi - lo) / lo < 0.01, "ratio drift {lo}..{hi} at beta={beta}");
            };
            check(&|d| eval_1d_source_one(beta, d));
            check(&|d| eval_source_one(beta, 2, 1.0 - d));
            if beta >= 0.0 {
                let sol = RadialSolution::new(RadialKind::SourceDbeta, beta, 2).unwrap();
                check(&|d| sol.eval(1.0 - d).unwrap());
            }
        }
    }

    #[test]
    fn operator_identity_source_one() {
        let sol = RadialSolution::new(RadialKind::SourceOne, 0.0, 2).unwrap();
        let samples: Vec<f64> = (1..9).map(|k| 0.1 * k as f64).collect();
        let res = verify_operator_identity(&sol, &samples, 1e-4).unwrap();
        assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn operator_identity_one_d() {
        let sol = RadialSolution::new(RadialKind::OneD, 0.5, 1).unwrap();
        let samples: Vec<f64> = (1..9).map(|k| 0.1 + 0.1 * k as f64).collect();
        let res = verify_operator_identity(&sol, &samples, 1e-5).unwrap();
        assert!(res < 1e-5, "residual {res}");
    }

    #[test]
    fn operator_identity_stencil_error_near_boundary() {
        let sol = RadialSolution::new(RadialKind::OneD, 0.5, 1).unwrap();
        assert!(matches!(
            verify_operator_identity(&sol, &[1e-6], 1e-4),
            Err(Error::Stencil(_))
        ));
    }

    #[test]
    fn barrier_identity_matches_fd() {
        let b = Barrier::new(0.7, 0.3, 0.25).unwrap();
        let dev = verify_barrier_identity(&b, &[0.05, 0.1, 0.2], 1e-3).unwrap();
        assert!(dev < 1e-8, "deviation {dev}");
    }
}

//! Distance-power weights d^beta, the general-weight interface for weights
//! behaving like the distance near the boundary, and Muckenhoupt A2
//! estimation over dyadic interval families.

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::quad::{adaptive_simpson, integrate_singular_lower, SingularIntegral};

/// The weight w(x) = d(x)^beta with beta < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerWeight {
    beta: f64,
}

impl PowerWeight {
    /// The whole theory assumes beta < 1; the constructor enforces it.
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta < 1.0) {
            return Err(Error::Config(format!("power weight requires beta < 1, got {beta}")));
        }
        Ok(PowerWeight { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Whether d^beta belongs to the Muckenhoupt class A2, i.e. beta in (-1, 1).
    pub fn in_a2(&self) -> bool {
        self.beta > -1.0 && self.beta < 1.0
    }

    /// Evaluates d^beta at distance d > 0. Never called on the boundary.
    pub fn eval(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::DomainError(format!("weight needs d > 0, got {d}")));
        }
        Ok(d.powf(self.beta))
    }

    /// A2 product over a boundary-touching interval (0, s) in the 1-D model
    /// d(t) = t. By the closed-form averages s^beta/(1+beta) and
    /// s^{-beta}/(1-beta) this equals 1/((1+beta)(1-beta)), independent of s.
    pub fn a2_product(&self, s: f64) -> Result<SingularIntegral> {
        if !(s > 0.0) {
            return Err(Error::Config(format!("interval length must be positive, got {s}")));
        }
        if self.beta.abs() >= 1.0 {
            // one of t^{+-beta} is not integrable at 0
            return Ok(SingularIntegral::Divergent);
        }
        Ok(SingularIntegral::Finite(1.0 / ((1.0 + self.beta) * (1.0 - self.beta))))
    }

    /// Estimates the A2 quantity of d^beta on a 1-D domain by maximizing the
    /// product of averages of d^beta and d^{-beta} over all dyadic
    /// subintervals down to scale 2^{-depth}. Averages are computed by
    /// adaptive quadrature; boundary-touching intervals get dyadic endpoint
    /// refinement so a non-integrable power is flagged divergent rather
    /// than mis-summed.
    pub fn a2_supremum_estimate(&self, dom: &Domain, depth: u32) -> Result<SingularIntegral> {
        let (a, b) = match dom {
            Domain::Interval { a, b } => (*a, *b),
            _ => return Err(Error::Config("A2 scan is defined on interval domains".into())),
        };
        if depth < 4 {
            return Err(Error::Config(format!("dyadic depth must be >= 4, got {depth}")));
        }
        if self.beta == 0.0 {
            return Ok(SingularIntegral::Finite(1.0));
        }
        let length = b - a;
        let mid = 0.5 * (a + b);
        // integral of d^p over [lo, hi], computed in offset coordinates so
        // boundary-touching cells see their singular endpoint exactly at 0
        let piece = |p: f64, t0: f64, t1: f64| -> SingularIntegral {
            if t1 <= t0 {
                return SingularIntegral::Finite(0.0);
            }
            let f = move |t: f64| t.powf(p);
            if t0 == 0.0 {
                integrate_singular_lower(&f, 0.0, t1, 1e-10)
            } else {
                SingularIntegral::Finite(adaptive_simpson(&f, t0, t1, 1e-12))
            }
        };
        let cell_integral = |p: f64, lo: f64, hi: f64| -> SingularIntegral {
            let mut total = 0.0;
            // part where d = x - a
            match piece(p, lo - a, hi.min(mid) - a) {
                SingularIntegral::Divergent => return SingularIntegral::Divergent,
                SingularIntegral::Finite(v) => total += v,
            }
            // part where d = b - x
            match piece(p, b - hi, b - lo.max(mid)) {
                SingularIntegral::Divergent => return SingularIntegral::Divergent,
                SingularIntegral::Finite(v) => total += v,
            }
            SingularIntegral::Finite(total)
        };
        let mut max_product = f64::NEG_INFINITY;
        for level in 0..=depth {
            let cells = 1u64 << level;
            let h = length / cells as f64;
            for j in 0..cells {
                let lo = a + j as f64 * h;
                let hi = if j == cells - 1 { b } else { lo + h };
                let mut product = 1.0;
                for sign in [1.0, -1.0] {
                    match cell_integral(sign * self.beta, lo, hi) {
                        SingularIntegral::Divergent => return Ok(SingularIntegral::Divergent),
                        SingularIntegral::Finite(v) => product *= v / h,
                    }
                }
                if product > max_product {
                    max_product = product;
                }
            }
        }
        Ok(SingularIntegral::Finite(max_product))
    }
}

/// A weight given as a black-box positive function behaving like the
/// distance near the boundary: no critical point on the boundary, so
/// 1/C <= |grad w|^2 <= C on a strip.
pub struct GeneralWeight {
    w: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    gradient_bound: (f64, f64),
}

impl GeneralWeight {
    pub fn new(w: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Config(format!("gradient bound constant must be positive, got {c}")));
        }
        Ok(GeneralWeight {
            w,
            gradient_bound: (1.0 / c, c),
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.w)(x)
    }

    pub fn gradient_bound(&self) -> (f64, f64) {
        self.gradient_bound
    }

    /// Samples a lattice of points in the strip {0 < d < sigma} and checks
    /// positivity of w and the two-sided gradient bound by centered
    /// differences, with tolerance 1e-8.
    pub fn verify_on(&self, dom: &Domain, sigma: f64, samples: usize) -> Result<()> {
        let (lo_bound, hi_bound) = self.gradient_bound;
        let tol = 1e-8;
        let fd = 1e-6 * sigma;
        for k in 1..=samples {
            let d = sigma * k as f64 / (samples as f64 + 1.0);
            for x in strip_points(dom, d) {
                let w0 = self.eval(&x);
                if !(w0 > 0.0) {
                    return Err(Error::Contract(format!("weight nonpositive at {x:?}: {w0}")));
                }
                let mut grad_sq = 0.0;
                for axis in 0..x.len() {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[axis] += fd;
                    xm[axis] -= fd;
                    let g = (self.eval(&xp) - self.eval(&xm)) / (2.0 * fd);
                    grad_sq += g * g;
                }
                if grad_sq < lo_bound - tol || grad_sq > hi_bound + tol {
                    return Err(Error::Contract(format!(
                        "|grad w|^2 = {grad_sq} outside [{lo_bound}, {hi_bound}] at {x:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A few off-ridge points at distance d from the boundary.
fn strip_points(dom: &Domain, d: f64) -> Vec<Vec<f64>> {
    match dom {
        Domain::Interval { a, b } => vec![vec![a + d], vec![b - d]],
        Domain::Ball { dim, radius } => {
            let mut p = vec![0.0; *dim];
            p[0] = radius - d;
            let mut q = vec![0.0; *dim];
            q[dim - 1] = -(radius - d);
            vec![p, q]
        }
        Domain::Rectangle { lx, ly } => vec![
            vec![d, 0.5 * ly],
            vec![lx - d, 0.5 * ly],
            vec![0.5 * lx, d],
            vec![0.5 * lx, ly - d],
        ],
    }
}

//! 1-D adaptive quadrature, including panels with an integrable endpoint
//! singularity handled by dyadic refinement toward the endpoint.

/// Outcome of integrating a function that may fail to be in L^1 near the
/// lower endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingularIntegral {
    Finite(f64),
    Divergent,
}

impl SingularIntegral {
    pub fn is_finite(&self) -> bool {
        matches!(self, SingularIntegral::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            SingularIntegral::Finite(v) => Some(*v),
            SingularIntegral::Divergent => None,
        }
    }
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

fn adaptive_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (left, lm, flm) = simpson(f, a, fa, m, fm);
    let (right, rm, frm) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        // a sample hit a pole; refining cannot help
        return left + right;
    }
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + adaptive_step(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of a smooth integrand on [a, b].
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    adaptive_step(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// Dyadic panels used when refining toward a singular lower endpoint.
const DYADIC_PANELS: usize = 53;
/// Absolute magnitude past which the partial integral is declared divergent.
const BLOWUP: f64 = 1e12;
/// Relative per-panel growth that still counts as "not settling down".
const GROWTH_BAND: f64 = 0.01;
/// Number of consecutive growing panels required for a divergence verdict.
const GROWTH_RUN: usize = 5;

/// Integrates `f` on (a, b] where `f` may blow up as x -> a+.
///
/// The interval is split into dyadic panels accumulating at `a`; each panel
/// is integrated with adaptive Simpson (never sampling `a` itself). The
/// integral is declared divergent when the running total exceeds `BLOWUP`,
/// or when the last `GROWTH_RUN` panels each still grew the total by more
/// than `GROWTH_BAND` relative - the signature of a log or power divergence.
pub fn integrate_singular_lower(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> SingularIntegral {
    assert!(b > a);
    let len = b - a;
    let mut total = 0.0;
    let mut growth_streak = 0usize;
    let panel_tol = tol / DYADIC_PANELS as f64;
    for k in 0..DYADIC_PANELS {
        let hi = a + len * 0.5f64.powi(k as i32);
        let lo = a + len * 0.5f64.powi(k as i32 + 1);
        if !(lo > a) || !(hi > lo) {
            // rounding floor of the panel ladder reached
            break;
        }
        let inc = adaptive_simpson(f, lo, hi, panel_tol);
        total += inc;
        if !total.is_finite() || total.abs() > BLOWUP {
            return SingularIntegral::Divergent;
        }
        if total != 0.0 && inc.abs() > GROWTH_BAND * total.abs() {
            growth_streak += 1;
        } else {
            growth_streak = 0;
        }
    }
    if growth_streak >= GROWTH_RUN {
        SingularIntegral::Divergent
    } else {
        SingularIntegral::Finite(total)
    }
}

//! Distance-to-boundary geometry for the supported domain kinds, with
//! exact level-set areas and coarea-based integration over tubular
//! neighborhoods of the boundary.

use crate::error::{Error, Result};
use crate::quad::{integrate_singular_lower, SingularIntegral};
use std::cell::Cell;
use std::fmt;

/// Relative tolerance used to detect medial-axis (ridge) points.
const RIDGE_TOL: f64 = 1e-12;

/// A bounded domain with piecewise-smooth boundary and a closed-form
/// distance function.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// The open interval (a, b).
    Interval { a: f64, b: f64 },
    /// The open ball of radius `radius` in `dim` dimensions, centered at 0.
    Ball { dim: usize, radius: f64 },
    /// The open rectangle (0, lx) x (0, ly).
    Rectangle { lx: f64, ly: f64 },
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Interval { a, b } => write!(f, "interval({a},{b})"),
            Domain::Ball { dim, radius } => write!(f, "ball({dim},{radius})"),
            Domain::Rectangle { lx, ly } => write!(f, "rectangle({lx},{ly})"),
        }
    }
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::Config(format!("interval requires b > a, got ({a}, {b})")));
        }
        Ok(Domain::Interval { a, b })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Config(format!("ball requires dimension >= 2, got {dim}")));
        }
        if !(radius > 0.0) {
            return Err(Error::Config(format!("ball requires radius > 0, got {radius}")));
        }
        Ok(Domain::Ball { dim, radius })
    }

    pub fn rectangle(lx: f64, ly: f64) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::Config(format!("rectangle requires positive sides, got ({lx}, {ly})")));
        }
        Ok(Domain::Rectangle { lx, ly })
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Ball { dim, .. } => *dim,
            Domain::Rectangle { .. } => 2,
        }
    }

    /// Radius of the largest ball inscribed in the domain.
    pub fn inradius(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => 0.5 * (b - a),
            Domain::Ball { radius, .. } => *radius,
            Domain::Rectangle { lx, ly } => 0.5 * lx.min(*ly),
        }
    }

    /// A length scale of the domain, used for relative tolerances.
    fn scale(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Rectangle { lx, ly } => lx.max(*ly),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::OutsideDomain(format!(
                "point has dimension {}, domain {} has dimension {}",
                x.len(),
                self,
                self.dimension()
            )));
        }
        let inside = match self {
            Domain::Interval { a, b } => x[0] >= *a && x[0] <= *b,
            Domain::Ball { radius, .. } => norm(x) <= *radius,
            Domain::Rectangle { lx, ly } => {
                x[0] >= 0.0 && x[0] <= *lx && x[1] >= 0.0 && x[1] <= *ly
            }
        };
        if inside {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!("{x:?} not in closure of {self}")))
        }
    }

    /// Euclidean distance from `x` to the boundary of the domain.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(match self {
            Domain::Interval { a, b } => (x[0] - a).min(b - x[0]),
            Domain::Ball { radius, .. } => radius - norm(x),
            Domain::Rectangle { lx, ly } => {
                (x[0].min(lx - x[0])).min(x[1].min(ly - x[1]))
            }
        })
    }

    /// Gradient of the distance function (the inward unit normal of the
    /// nearest boundary piece). Refused on the medial axis, where d is not
    /// differentiable.
    pub fn grad_distance(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let tol = RIDGE_TOL * self.scale();
        match self {
            Domain::Interval { a, b } => {
                let left = x[0] - a;
                let right = b - x[0];
                if (left - right).abs() <= tol {
                    Err(Error::MedialAxis(format!("x={} is equidistant from both endpoints", x[0])))
                } else if left < right {
                    Ok(vec![1.0])
                } else {
                    Ok(vec![-1.0])
                }
            }
            Domain::Ball { .. } => {
                let r = norm(x);
                if r <= tol {
                    return Err(Error::MedialAxis("center of the ball".into()));
                }
                Ok(x.iter().map(|xi| -xi / r).collect())
            }
            Domain::Rectangle { lx, ly } => {
                // candidate (distance, inward normal) per side
                let sides = [
                    (x[0], [1.0, 0.0]),
                    (lx - x[0], [-1.0, 0.0]),
                    (x[1], [0.0, 1.0]),
                    (ly - x[1], [0.0, -1.0]),
                ];
                let (dmin, normal) = sides
                    .iter()
                    .cloned()
                    .min_by(|p, q| p.0.partial_cmp(&q.0).unwrap())
                    .unwrap();
                let ties = sides.iter().filter(|(d, _)| (*d - dmin).abs() <= tol).count();
                if ties > 1 {
                    return Err(Error::MedialAxis(format!("{x:?} is equidistant from {ties} sides")));
                }
                Ok(normal.to_vec())
            }
        }
    }

    /// Laplacian of the distance function. Zero for flat boundaries,
    /// -(N-1)/|x| inside a ball; nonpositive on every convex domain.
    pub fn laplacian_distance(&self, x: &[f64]) -> Result<f64> {
        // reuse the ridge detection of grad_distance
        self.grad_distance(x)?;
        Ok(match self {
            Domain::Interval { .. } | Domain::Rectangle { .. } => 0.0,
            Domain::Ball { dim, .. } => -((*dim as f64) - 1.0) / norm(x),
        })
    }

    /// H^{N-1} measure of the level set {d = t}, in closed form.
    pub fn level_set_area(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t < self.inradius()) {
            return Err(Error::DomainError(format!(
                "level t={t} outside [0, inradius={})",
                self.inradius()
            )));
        }
        Ok(match self {
            Domain::Interval { .. } => 2.0,
            Domain::Ball { dim, radius } => unit_sphere_area(*dim) * (radius - t).powi(*dim as i32 - 1),
            Domain::Rectangle { lx, ly } => 2.0 * (lx - 2.0 * t) + 2.0 * (ly - 2.0 * t),
        })
    }

    /// Default tubular-neighborhood width: half the inradius, capped at 1/e
    /// so that -log d >= 1 throughout the neighborhood.
    pub fn default_sigma(&self) -> f64 {
        (0.5 * self.inradius()).min((-1.0f64).exp())
    }
}

/// Surface area of the unit sphere S^{n-1} in R^n.
pub fn unit_sphere_area(n: usize) -> f64 {
    // A_1 = 2, A_2 = 2*pi, A_n = 2*pi*A_{n-2}/(n-2)
    match n {
        0 => panic!("no sphere in dimension 0"),
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI * unit_sphere_area(n - 2) / (n as f64 - 2.0),
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// The boundary strip Gamma_sigma = {x in the closed domain : d(x) < sigma}.
#[derive(Debug, Clone)]
pub struct TubularNeighborhood {
    sigma: f64,
    parent: Domain,
}

impl TubularNeighborhood {
    /// `sigma` must be strictly below the inradius so that d is smooth on
    /// the strip (away from the boundary itself).
    pub fn new(parent: Domain, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < parent.inradius()) {
            return Err(Error::Config(format!(
                "sigma={sigma} must lie in (0, inradius={})",
                parent.inradius()
            )));
        }
        Ok(TubularNeighborhood { sigma, parent })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn parent(&self) -> &Domain {
        &self.parent
    }

    /// Integral over Gamma_sigma of g(d(x)) dx, reduced by the coarea
    /// formula to int_0^sigma g(t) * area{d = t} dt. Returns the divergent
    /// flag when g is not integrable near t = 0.
    pub fn tubular_integral(&self, g: &dyn Fn(f64) -> f64) -> Result<SingularIntegral> {
        let negative = Cell::new(false);
        let dom = self.parent.clone();
        let integrand = |t: f64| {
            let gv = g(t);
            if gv < 0.0 {
                negative.set(true);
            }
            gv * dom.level_set_area(t).unwrap_or(0.0)
        };
        let out = integrate_singular_lower(&integrand, 0.0, self.sigma, 1e-10);
        if negative.get() {
            return Err(Error::Contract("g must be nonnegative on (0, sigma)".into()));
        }
        Ok(out)
    }
}

/// A 1-D node set, possibly graded toward the boundary.
#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<f64>,
    n: usize,
    gamma: f64,
    domain_kind: String,
}

impl Mesh {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cell_count(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn domain_kind(&self) -> &str {
        &self.domain_kind
    }

    /// Plain-text dump: header line then one node coordinate per line.
    pub fn dump(&self) -> String {
        let mut out = format!("# mesh n={} gamma={} domain={}\n", self.n, self.gamma, self.domain_kind);
        for x in &self.nodes {
            out.push_str(&format!("{x:.17e}\n"));
        }
        out
    }
}

/// Mesh of (a, b) with `n` cells, nodes clustered at both endpoints:
/// on the left half node i sits at a + half*(2i/n)^gamma, mirrored on the
/// right. gamma = 1 gives the uniform mesh.
pub fn graded_mesh(dom: &Domain, n: usize, gamma: f64) -> Result<Mesh> {
    let (a, b) = match dom {
        Domain::Interval { a, b } => (*a, *b),
        _ => return Err(Error::Config("graded_mesh requires an interval domain".into())),
    };
    if n < 4 || n % 2 != 0 {
        return Err(Error::Config(format!("mesh needs an even cell count >= 4, got {n}")));
    }
    if !(gamma >= 1.0) {
        return Err(Error::Config(format!("grading exponent must be >= 1, got {gamma}")));
    }
    let half = 0.5 * (b - a);
    // cap the grading so the boundary cell stays a few ulps wide, else the
    // innermost mirrored nodes would collide with the endpoint
    let floor = 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
    let cap = (floor / half).ln() / (2.0 / n as f64).ln();
    let gamma = gamma.min(cap.max(1.0));
    let mut nodes = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = if 2 * i <= n {
            a + half * (2.0 * i as f64 / n as f64).powf(gamma)
        } else {
            b - half * (2.0 * (n - i) as f64 / n as f64).powf(gamma)
        };
        nodes.push(x);
    }
    debug_assert!(nodes.windows(2).all(|w| w[1] > w[0]));
    Ok(Mesh {
        nodes,
        n,
        gamma,
        domain_kind: dom.to_string(),
    })
}

/// Radial mesh of [0, R] with `n` cells clustered at r = R (the only
/// boundary of the ball).
pub fn radial_graded_mesh(dom: &Domain, n: usize, gamma: f64) -> Result<Mesh> {
    let radius = match dom {
        Domain::Ball { radius, .. } => *radius,
        _ => return Err(Error::Config("radial_graded_mesh requires a ball domain".into())),
    };
    if n < 4 {
        return Err(Error::Config(format!("mesh needs at least 4 cells, got {n}")));
    }
    if !(gamma >= 1.0) {
        return Err(Error::Config(format!("grading exponent must be >= 1, got {gamma}")));
    }
    // same node-collision cap as for interval meshes
    let floor = 4.0 * f64::EPSILON * radius.max(1.0);
    let cap = (floor / radius).ln() / (1.0 / n as f64).ln();
    let gamma = gamma.min(cap.max(1.0));
    let mut nodes = Vec::with_capacity(n + 1);
    for i in 0..=n {
        nodes.push(radius * (1.0 - ((n - i) as f64 / n as f64).powf(gamma)));
    }
    debug_assert!(nodes.windows(2).all(|w| w[1] > w[0]));
    Ok(Mesh {
        nodes,
        n,
        gamma,
        domain_kind: dom.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_closed_forms() {
        let i = Domain::interval(0.0, 1.0).unwrap();
        assert_eq!(i.distance(&[0.3]).unwrap(), 0.3);
        let b = Domain::ball(2, 1.0).unwrap();
        assert!((b.distance(&[0.6, 0.0]).unwrap() - 0.4).abs() < 1e-15);
        let r = Domain::rectangle(1.0, 1.0).unwrap();
        assert!((r.distance(&[0.3, 0.5]).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn distance_outside_domain_errors() {
        let i = Domain::interval(0.0, 1.0).unwrap();
        assert!(matches!(i.distance(&[1.5]), Err(Error::OutsideDomain(_))));
        let b = Domain::ball(2, 1.0).unwrap();
        assert!(matches!(b.distance(&[1.0, 1.0]), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn grad_distance_is_unit() {
        let i = Domain::interval(0.0, 1.0).unwrap();
        assert_eq!(i.grad_distance(&[0.1]).unwrap(), vec![1.0]);
        assert_eq!(i.grad_distance(&[0.9]).unwrap(), vec![-1.0]);
        let b = Domain::ball(2, 1.0).unwrap();
        let g = b.grad_distance(&[0.5, 0.0]).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-15 && g[1].abs() < 1e-15);
        let r = Domain::rectangle(1.0, 1.0).unwrap();
        assert!(matches!(r.grad_distance(&[0.5, 0.5]), Err(Error::MedialAxis(_))));
    }

    #[test]
    fn grad_norm_one_everywhere_off_ridge() {
        let doms = [
            Domain::interval(0.0, 1.0).unwrap(),
            Domain::ball(3, 1.0).unwrap(),
            Domain::rectangle(2.0, 1.0).unwrap(),
        ];
        for dom in &doms {
            let sigma = dom.default_sigma();
            for k in 1..20 {
                let d = sigma * k as f64 / 21.0;
                // a point at distance d from the boundary, off the ridge
                let x: Vec<f64> = match dom {
                    Domain::Interval { a, .. } => vec![a + d],
                    Domain::Ball { dim, radius } => {
                        let mut p = vec![0.0; *dim];
                        p[0] = radius - d;
                        p
                    }
                    Domain::Rectangle { ly, .. } => vec![d, 0.5 * ly],
                };
                let g = dom.grad_distance(&x).unwrap();
                let n: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn laplacian_distance_values() {
        let i = Domain::interval(0.0, 1.0).unwrap();
        assert_eq!(i.laplacian_distance(&[0.2]).unwrap(), 0.0);
        let b2 = Domain::ball(2, 1.0).unwrap();
        assert!((b2.laplacian_distance(&[0.5, 0.0]).unwrap() + 2.0).abs() < 1e-14);
        let b3 = Domain::ball(3, 1.0).unwrap();
        assert!((b3.laplacian_distance(&[0.5, 0.0, 0.0]).unwrap() + 4.0).abs() < 1e-14);
    }

    #[test]
    fn laplacian_nonpositive_on_convex_domains() {
        let b = Domain::ball(2, 1.0).unwrap();
        for k in 1..10 {
            let r = 0.95 * k as f64 / 10.0;
            assert!(b.laplacian_distance(&[r, 0.0]).unwrap() <= 0.0);
        }
        let r = Domain::rectangle(1.0, 2.0).unwrap();
        assert!(r.laplacian_distance(&[0.1, 1.3]).unwrap() <= 0.0);
    }

    #[test]
    fn tubular_integral_interval_constant() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let nb = TubularNeighborhood::new(dom, 0.25).unwrap();
        let v = nb.tubular_integral(&|_| 1.0).unwrap();
        assert!((v.value().unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn tubular_integral_ball_example() {
        // 2*pi * int_0^{1/4} t^{-1/2} (1 - t) dt = 2*pi*(11/12)
        let dom = Domain::ball(2, 1.0).unwrap();
        let nb = TubularNeighborhood::new(dom, 0.25).unwrap();
        let v = nb.tubular_integral(&|t| t.powf(-0.5)).unwrap();
        let exact = 2.0 * std::f64::consts::PI * (11.0 / 12.0);
        assert!((v.value().unwrap() - exact).abs() < 1e-6, "got {v:?}");
    }

    #[test]
    fn tubular_integral_divergent_flag() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let nb = TubularNeighborhood::new(dom, 0.25).unwrap();
        let v = nb.tubular_integral(&|t| 1.0 / t).unwrap();
        assert_eq!(v, SingularIntegral::Divergent);
    }

    #[test]
    fn tubular_integral_power_iff_integrable() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let nb = TubularNeighborhood::new(dom, 0.25).unwrap();
        for gamma in [-0.5, -0.9, 0.0, 1.0, 2.0] {
            let v = nb.tubular_integral(&move |t: f64| t.powf(gamma)).unwrap();
            assert!(v.is_finite(), "t^{gamma} should be integrable");
        }
        for gamma in [-1.0, -1.5, -2.0] {
            let v = nb.tubular_integral(&move |t: f64| t.powf(gamma)).unwrap();
            assert_eq!(v, SingularIntegral::Divergent, "t^{gamma} should diverge");
        }
    }

    #[test]
    fn tubular_integral_rejects_negative_g() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let nb = TubularNeighborhood::new(dom, 0.25).unwrap();
        assert!(matches!(
            nb.tubular_integral(&|t| t - 0.1),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn graded_mesh_uniform_and_quadratic() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let m = graded_mesh(&dom, 4, 1.0).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = graded_mesh(&dom, 4, 2.0).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.125, 0.5, 0.875, 1.0]);
    }

    #[test]
    fn graded_mesh_rejects_bad_config() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        assert!(graded_mesh(&dom, 4, 0.5).is_err());
        assert!(graded_mesh(&dom, 2, 1.0).is_err());
        assert!(graded_mesh(&dom, 5, 1.0).is_err());
    }

    #[test]
    fn graded_mesh_first_cell_scales_as_n_pow_gamma() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        for gamma in [1.0, 2.0, 4.0] {
            for n in [64usize, 256] {
                let m = graded_mesh(&dom, n, gamma).unwrap();
                let first = m.nodes()[1] - m.nodes()[0];
                let expected = 0.5 * (2.0 / n as f64).powf(gamma);
                assert!((first / expected - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn radial_mesh_endpoints_and_grading() {
        let dom = Domain::ball(2, 1.0).unwrap();
        let m = radial_graded_mesh(&dom, 128, 3.0).unwrap();
        assert_eq!(m.nodes()[0], 0.0);
        assert_eq!(*m.nodes().last().unwrap(), 1.0);
        let last = m.nodes()[128] - m.nodes()[127];
        let expected = (1.0f64 / 128.0).powf(3.0);
        assert!((last / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mesh_dump_header() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let m = graded_mesh(&dom, 4, 1.0).unwrap();
        let dump = m.dump();
        assert!(dump.starts_with("# mesh n=4 gamma=1 domain=interval(0,1)\n"));
        assert_eq!(dump.lines().count(), 6);
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
    }
}

//! Flux-conservative discretization and solution of L_beta(u) = f with
//! zero boundary data on intervals, balls (radial reduction) and
//! rectangles. Half-point weights keep the weight evaluation strictly
//! inside the domain, so every beta < 1 is runnable, including beta <= -1.

use crate::error::{Error, Result};
use crate::geometry::{graded_mesh, radial_graded_mesh, unit_sphere_area, Domain, Mesh};
use crate::weights::{GeneralWeight, PowerWeight};
use std::sync::Arc;

/// Source term f, as a function of the distance to the boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// f = 1.
    One,
    /// f = d^beta (the first sharp example's right-hand side).
    DBeta,
    /// Polynomial in d with the given coefficients, constant term first.
    Poly(Vec<f64>),
}

impl Source {
    pub fn eval(&self, d: f64, beta: f64) -> f64 {
        match self {
            Source::One => 1.0,
            Source::DBeta => d.powf(beta),
            Source::Poly(coeffs) => coeffs.iter().rev().fold(0.0, |acc, c| acc * d + c),
        }
    }
}

/// The weight in front of the gradient: either d^beta or a general
/// distance-like weight evaluated at a point.
#[derive(Clone)]
pub enum Weight {
    Power(PowerWeight),
    General(Arc<GeneralWeight>),
}

impl Weight {
    pub fn beta(&self) -> f64 {
        match self {
            Weight::Power(w) => w.beta(),
            Weight::General(_) => 0.0,
        }
    }

    pub fn eval_at(&self, d: f64, point: &[f64]) -> Result<f64> {
        match self {
            Weight::Power(w) => w.eval(d),
            Weight::General(w) => Ok(w.eval(point)),
        }
    }
}

/// Everything needed for one solve.
#[derive(Clone)]
pub struct ProblemSpec {
    pub domain: Domain,
    pub weight: Weight,
    pub source: Source,
    pub n: usize,
    pub gamma: f64,
}

/// Default grading that resolves the d^{1-beta} boundary layer.
pub fn default_gamma(beta: f64) -> f64 {
    (2.0 / (1.0 - beta)).max(1.0)
}

impl ProblemSpec {
    pub fn new(domain: Domain, weight: PowerWeight, source: Source, n: usize) -> Self {
        let gamma = default_gamma(weight.beta());
        ProblemSpec {
            domain,
            weight: Weight::Power(weight),
            source,
            n,
            gamma,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn beta(&self) -> f64 {
        self.weight.beta()
    }

    fn source_at(&self, d: f64) -> f64 {
        self.source.eval(d, self.beta())
    }
}

/// Symmetric tridiagonal system (1-D and radial discretizations).
#[derive(Debug, Clone)]
pub struct TriSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TriSystem {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Exact symmetry of the stored couplings.
    pub fn is_symmetric(&self) -> bool {
        (1..self.len()).all(|i| self.sub[i] == self.sup[i - 1])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.sub[i] * x[i - 1];
            }
            if i + 1 < n {
                v += self.sup[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }
}

/// Five-point (or general) sparse system in CSR form.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut v = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                v += self.val[k] * x[self.col[k]];
            }
            y[i] = v;
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col[k] == i {
                    d[i] = self.val[k];
                }
            }
        }
        d
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col[k] == j {
                return self.val[k];
            }
        }
        0.0
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col[k];
                if (self.val[k] - self.entry(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Assembled linear system of either structure.
pub enum LinearSystem {
    Tridiagonal(TriSystem),
    Sparse(SparseSystem),
}

/// Nodal values of u (or f) on a mesh, boundary nodes pinned to zero.
pub enum DiscreteField {
    /// 1-D interval field, one value per mesh node.
    Line {
        mesh: Mesh,
        domain: Domain,
        values: Vec<f64>,
    },
    /// Radial field on [0, R], one value per radial node.
    Radial {
        mesh: Mesh,
        domain: Domain,
        values: Vec<f64>,
    },
    /// Tensor-product field on a rectangle, row-major over (ix, iy).
    Tensor {
        mesh_x: Mesh,
        mesh_y: Mesh,
        domain: Domain,
        values: Vec<f64>,
    },
}

/// One quadrature face: gradient sample at a cell midpoint with its
/// distance to the boundary and the measure it represents.
pub struct Face {
    pub d_mid: f64,
    pub grad: f64,
    pub measure: f64,
    pub mid_point: Vec<f64>,
}

/// One dual cell around a node.
pub struct DualCell {
    pub d: f64,
    pub u: f64,
    pub measure: f64,
    pub boundary: bool,
}

impl DiscreteField {
    pub fn values(&self) -> &[f64] {
        match self {
            DiscreteField::Line { values, .. }
            | DiscreteField::Radial { values, .. }
            | DiscreteField::Tensor { values, .. } => values,
        }
    }

    pub fn domain(&self) -> &Domain {
        match self {
            DiscreteField::Line { domain, .. }
            | DiscreteField::Radial { domain, .. }
            | DiscreteField::Tensor { domain, .. } => domain,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Smallest cell width adjacent to the boundary.
    pub fn first_cell(&self) -> f64 {
        match self {
            DiscreteField::Line { mesh, .. } => {
                let nodes = mesh.nodes();
                let n = nodes.len();
                (nodes[1] - nodes[0]).min(nodes[n - 1] - nodes[n - 2])
            }
            DiscreteField::Radial { mesh, .. } => {
                let nodes = mesh.nodes();
                let n = nodes.len();
                nodes[n - 1] - nodes[n - 2]
            }
            DiscreteField::Tensor { mesh_x, mesh_y, .. } => {
                let fx = mesh_x.nodes()[1] - mesh_x.nodes()[0];
                let fy = mesh_y.nodes()[1] - mesh_y.nodes()[0];
                fx.min(fy)
            }
        }
    }

    /// All gradient faces with their measures (for quadrature of
    /// gradient-based integrals on the dual mesh).
    pub fn faces(&self) -> Vec<Face> {
        match self {
            DiscreteField::Line { mesh, domain, values } => {
                let nodes = mesh.nodes();
                (1..nodes.len())
                    .map(|i| {
                        let h = nodes[i] - nodes[i - 1];
                        let xm = 0.5 * (nodes[i] + nodes[i - 1]);
                        Face {
                            d_mid: domain.distance(&[xm]).unwrap(),
                            grad: (values[i] - values[i - 1]) / h,
                            measure: h,
                            mid_point: vec![xm],
                        }
                    })
                    .collect()
            }
            DiscreteField::Radial { mesh, domain, values } => {
                let nodes = mesh.nodes();
                let dim = domain.dimension();
                let area = unit_sphere_area(dim);
                (1..nodes.len())
                    .map(|i| {
                        let h = nodes[i] - nodes[i - 1];
                        let rm = 0.5 * (nodes[i] + nodes[i - 1]);
                        let mut p = vec![0.0; dim];
                        p[0] = rm;
                        Face {
                            d_mid: domain.distance(&p).unwrap(),
                            grad: (values[i] - values[i - 1]) / h,
                            measure: area * rm.powi(dim as i32 - 1) * h,
                            mid_point: p,
                        }
                    })
                    .collect()
            }
            DiscreteField::Tensor { mesh_x, mesh_y, domain, values } => {
                let xs = mesh_x.nodes();
                let ys = mesh_y.nodes();
                let nx = xs.len();
                let mut out = Vec::new();
                // x-faces: gradient in x, dual extent in y
                for iy in 0..ys.len() {
                    let wy = dual_width(ys, iy);
                    for ix in 1..nx {
                        let h = xs[ix] - xs[ix - 1];
                        let xm = 0.5 * (xs[ix] + xs[ix - 1]);
                        let p = vec![xm, ys[iy]];
                        out.push(Face {
                            d_mid: domain.distance(&p).unwrap(),
                            grad: (values[ix + iy * nx] - values[ix - 1 + iy * nx]) / h,
                            measure: h * wy,
                            mid_point: p,
                        });
                    }
                }
                // y-faces
                for iy in 1..ys.len() {
                    let h = ys[iy] - ys[iy - 1];
                    let ym = 0.5 * (ys[iy] + ys[iy - 1]);
                    for ix in 0..nx {
                        let wx = dual_width(xs, ix);
                        let p = vec![xs[ix], ym];
                        out.push(Face {
                            d_mid: domain.distance(&p).unwrap(),
                            grad: (values[ix + iy * nx] - values[ix + (iy - 1) * nx]) / h,
                            measure: h * wx,
                            mid_point: p,
                        });
                    }
                }
                out
            }
        }
    }

    /// Dual cells around every node.
    pub fn dual_cells(&self) -> Vec<DualCell> {
        match self {
            DiscreteField::Line { mesh, domain, values } => {
                let nodes = mesh.nodes();
                let last = nodes.len() - 1;
                (0..nodes.len())
                    .map(|i| DualCell {
                        d: domain.distance(&[nodes[i]]).unwrap(),
                        u: values[i],
                        measure: dual_width(nodes, i),
                        boundary: i == 0 || i == last,
                    })
                    .collect()
            }
            DiscreteField::Radial { mesh, domain, values } => {
                let nodes = mesh.nodes();
                let dim = domain.dimension();
                let area = unit_sphere_area(dim);
                let last = nodes.len() - 1;
                (0..nodes.len())
                    .map(|i| {
                        let lo = if i == 0 { 0.0 } else { 0.5 * (nodes[i - 1] + nodes[i]) };
                        let hi = if i == last {
                            nodes[last]
                        } else {
                            0.5 * (nodes[i] + nodes[i + 1])
                        };
                        let mut p = vec![0.0; dim];
                        p[0] = nodes[i];
                        DualCell {
                            d: domain.distance(&p).unwrap(),
                            u: values[i],
                            measure: area * (hi.powi(dim as i32) - lo.powi(dim as i32)) / dim as f64,
                            boundary: i == last,
                        }
                    })
                    .collect()
            }
            DiscreteField::Tensor { mesh_x, mesh_y, domain, values } => {
                let xs = mesh_x.nodes();
                let ys = mesh_y.nodes();
                let nx = xs.len();
                let mut out = Vec::with_capacity(values.len());
                for iy in 0..ys.len() {
                    let wy = dual_width(ys, iy);
                    for ix in 0..nx {
                        let wx = dual_width(xs, ix);
                        let boundary =
                            ix == 0 || ix == nx - 1 || iy == 0 || iy == ys.len() - 1;
                        out.push(DualCell {
                            d: domain.distance(&[xs[ix], ys[iy]]).unwrap(),
                            u: values[ix + iy * nx],
                            measure: wx * wy,
                            boundary,
                        });
                    }
                }
                out
            }
        }
    }

    /// (distance, u) samples along an inward normal line from the boundary,
    /// for boundary-rate fitting.
    pub fn boundary_profile(&self) -> Vec<(f64, f64)> {
        match self {
            DiscreteField::Line { mesh, domain, values } => {
                let nodes = mesh.nodes();
                let (a, b) = match domain {
                    Domain::Interval { a, b } => (*a, *b),
                    _ => unreachable!(),
                };
                let mid = 0.5 * (a + b);
                nodes
                    .iter()
                    .zip(values)
                    .filter(|(x, _)| **x > a && **x < mid)
                    .map(|(x, u)| (x - a, *u))
                    .collect()
            }
            DiscreteField::Radial { mesh, domain, values } => {
                let radius = match domain {
                    Domain::Ball { radius, .. } => *radius,
                    _ => unreachable!(),
                };
                mesh.nodes()
                    .iter()
                    .zip(values)
                    .filter(|(r, _)| **r > 0.0 && **r < radius)
                    .map(|(r, u)| (radius - r, *u))
                    .collect()
            }
            DiscreteField::Tensor { mesh_x, mesh_y, values, .. } => {
                // inward line from the bottom side at mid-width
                let xs = mesh_x.nodes();
                let ys = mesh_y.nodes();
                let nx = xs.len();
                let ix = nx / 2;
                let cap = xs[ix].min(xs[nx - 1] - xs[ix]).min(0.5 * ys[ys.len() - 1]);
                ys.iter()
                    .enumerate()
                    .filter(|(_, y)| **y > 0.0 && **y < cap)
                    .map(|(iy, y)| (*y, values[ix + iy * nx]))
                    .collect()
            }
        }
    }

    /// (distance, u) over all interior nodes (bracket checks use the whole
    /// boundary strip, not a single line).
    pub fn all_nodes(&self) -> Vec<(f64, f64)> {
        self.dual_cells()
            .into_iter()
            .filter(|c| !c.boundary)
            .map(|c| (c.d, c.u))
            .collect()
    }

    /// CSV dump `x[,y],u` with a header naming the run parameters.
    pub fn to_csv(&self, beta: f64) -> String {
        let mut out = String::new();
        match self {
            DiscreteField::Line { mesh, domain, values } => {
                out.push_str(&format!(
                    "# beta={beta} n={} gamma={} domain={domain}\nx,u\n",
                    mesh.cell_count(),
                    mesh.gamma()
                ));
                for (x, u) in mesh.nodes().iter().zip(values) {
                    out.push_str(&format!("{x:.17e},{u:.17e}\n"));
                }
            }
            DiscreteField::Radial { mesh, domain, values } => {
                out.push_str(&format!(
                    "# beta={beta} n={} gamma={} domain={domain}\nx,u\n",
                    mesh.cell_count(),
                    mesh.gamma()
                ));
                for (r, u) in mesh.nodes().iter().zip(values) {
                    out.push_str(&format!("{r:.17e},{u:.17e}\n"));
                }
            }
            DiscreteField::Tensor { mesh_x, mesh_y, domain, values } => {
                out.push_str(&format!(
                    "# beta={beta} n={} gamma={} domain={domain}\nx,y,u\n",
                    mesh_x.cell_count(),
                    mesh_x.gamma()
                ));
                let xs = mesh_x.nodes();
                for (iy, y) in mesh_y.nodes().iter().enumerate() {
                    for (ix, x) in xs.iter().enumerate() {
                        out.push_str(&format!("{x:.17e},{y:.17e},{:.17e}\n", values[ix + iy * xs.len()]));
                    }
                }
            }
        }
        out
    }
}

fn dual_width(nodes: &[f64], i: usize) -> f64 {
    let last = nodes.len() - 1;
    let lo = if i == 0 { nodes[0] } else { 0.5 * (nodes[i - 1] + nodes[i]) };
    let hi = if i == last { nodes[last] } else { 0.5 * (nodes[i] + nodes[i + 1]) };
    hi - lo
}

/// Flux-form tridiagonal assembly on a graded interval mesh. Boundary rows
/// are identity (strong Dirichlet); the couplings into boundary columns are
/// dropped symmetrically, which is exact for zero boundary data.
pub fn assemble_1d(spec: &ProblemSpec) -> Result<(TriSystem, Mesh)> {
    let mesh = graded_mesh(&spec.domain, spec.n, spec.gamma)?;
    let nodes = mesh.nodes();
    let n = nodes.len();
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 1.0;
    diag[n - 1] = 1.0;
    for i in 1..n - 1 {
        let hl = nodes[i] - nodes[i - 1];
        let hr = nodes[i + 1] - nodes[i];
        let xl = 0.5 * (nodes[i - 1] + nodes[i]);
        let xr = 0.5 * (nodes[i] + nodes[i + 1]);
        let dl = spec.domain.distance(&[xl])?;
        let dr = spec.domain.distance(&[xr])?;
        if dl <= 0.0 || dr <= 0.0 {
            return Err(Error::Contract(format!(
                "degenerate cell: half-point at distance {} from the boundary",
                dl.min(dr)
            )));
        }
        let wl = spec.weight.eval_at(dl, &[xl])?;
        let wr = spec.weight.eval_at(dr, &[xr])?;
        diag[i] = wl / hl + wr / hr;
        if i > 1 {
            sub[i] = -wl / hl;
        }
        if i < n - 2 {
            sup[i] = -wr / hr;
        }
        let di = spec.domain.distance(&[nodes[i]])?;
        rhs[i] = 0.5 * (hl + hr) * spec.source_at(di);
    }
    Ok((TriSystem { sub, diag, sup, rhs }, mesh))
}

/// Radial flux assembly -(r^{N-1} w u')' = r^{N-1} f on [0, R], with a
/// zero-flux mirror condition at the origin and strong Dirichlet at r = R.
pub fn assemble_radial(spec: &ProblemSpec) -> Result<(TriSystem, Mesh)> {
    let (dim, radius) = match spec.domain {
        Domain::Ball { dim, radius } => (dim, radius),
        _ => return Err(Error::Config("assemble_radial requires a ball domain".into())),
    };
    if dim < 2 {
        return Err(Error::Config(format!("radial reduction needs N >= 2, got {dim}")));
    }
    let mesh = radial_graded_mesh(&spec.domain, spec.n, spec.gamma)?;
    let nodes = mesh.nodes();
    let n = nodes.len();
    let nf = dim as f64;
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[n - 1] = 1.0;
    let face_coef = |rm: f64| -> Result<f64> {
        let d = radius - rm;
        if d <= 0.0 {
            return Err(Error::Contract("half-point on the boundary".into()));
        }
        let mut p = vec![0.0; dim];
        p[0] = rm;
        Ok(rm.powf(nf - 1.0) * spec.weight.eval_at(d, &p)?)
    };
    // exact integral of r^{N-1} over the dual cell [lo, hi]
    let dual_volume = |lo: f64, hi: f64| (hi.powf(nf) - lo.powf(nf)) / nf;
    for i in 0..n - 1 {
        let hr = nodes[i + 1] - nodes[i];
        let rr = 0.5 * (nodes[i] + nodes[i + 1]);
        let ar = face_coef(rr)?;
        diag[i] += ar / hr;
        if i + 1 < n - 1 {
            sup[i] = -ar / hr;
        }
        if i > 0 {
            let hl = nodes[i] - nodes[i - 1];
            let rl = 0.5 * (nodes[i - 1] + nodes[i]);
            let al = face_coef(rl)?;
            diag[i] += al / hl;
            sub[i] = -al / hl;
        }
        let lo = if i == 0 { 0.0 } else { 0.5 * (nodes[i - 1] + nodes[i]) };
        let di = radius - nodes[i];
        rhs[i] = dual_volume(lo, rr) * spec.source_at(di);
    }
    Ok((TriSystem { sub, diag, sup, rhs }, mesh))
}

/// Five-point flux assembly on a tensor mesh graded toward all four sides.
/// Unknowns are interior nodes; the returned system is symmetric positive
/// definite.
pub fn assemble_2d(spec: &ProblemSpec) -> Result<(SparseSystem, Mesh, Mesh)> {
    let (lx, ly) = match spec.domain {
        Domain::Rectangle { lx, ly } => (lx, ly),
        _ => return Err(Error::Config("assemble_2d requires a rectangle domain".into())),
    };
    let ax = Domain::interval(0.0, lx)?;
    let ay = Domain::interval(0.0, ly)?;
    let mesh_x = graded_mesh(&ax, spec.n, spec.gamma)?;
    let mesh_y = graded_mesh(&ay, spec.n, spec.gamma)?;
    let xs = mesh_x.nodes().to_vec();
    let ys = mesh_y.nodes().to_vec();
    let nx = xs.len();
    let ny = ys.len();
    let inx = nx - 2; // interior counts
    let iny = ny - 2;
    let idx = |ix: usize, iy: usize| (ix - 1) + (iy - 1) * inx;
    let n_unknowns = inx * iny;
    let weight_at = |p: &[f64]| -> Result<f64> {
        let d = spec.domain.distance(p)?;
        if d <= 0.0 {
            return Err(Error::Contract("face midpoint on the boundary".into()));
        }
        spec.weight.eval_at(d, p)
    };
    let mut row_ptr = Vec::with_capacity(n_unknowns + 1);
    let mut col = Vec::new();
    let mut val = Vec::new();
    let mut rhs = vec![0.0; n_unknowns];
    row_ptr.push(0);
    for iy in 1..ny - 1 {
        let wy = 0.5 * (ys[iy + 1] - ys[iy - 1]);
        for ix in 1..nx - 1 {
            let wx = 0.5 * (xs[ix + 1] - xs[ix - 1]);
            let hxw = xs[ix] - xs[ix - 1];
            let hxe = xs[ix + 1] - xs[ix];
            let hys = ys[iy] - ys[iy - 1];
            let hyn = ys[iy + 1] - ys[iy];
            let tw = weight_at(&[0.5 * (xs[ix - 1] + xs[ix]), ys[iy]])? * wy / hxw;
            let te = weight_at(&[0.5 * (xs[ix] + xs[ix + 1]), ys[iy]])? * wy / hxe;
            let ts = weight_at(&[xs[ix], 0.5 * (ys[iy - 1] + ys[iy])])? * wx / hys;
            let tn = weight_at(&[xs[ix], 0.5 * (ys[iy] + ys[iy + 1])])? * wx / hyn;
            // CSR row in column order: S, W, C, E, N
            if iy > 1 {
                col.push(idx(ix, iy - 1));
                val.push(-ts);
            }
            if ix > 1 {
                col.push(idx(ix - 1, iy));
                val.push(-tw);
            }
            col.push(idx(ix, iy));
            val.push(tw + te + ts + tn);
            if ix < nx - 2 {
                col.push(idx(ix + 1, iy));
                val.push(-te);
            }
            if iy < ny - 2 {
                col.push(idx(ix, iy + 1));
                val.push(-tn);
            }
            row_ptr.push(col.len());
            let d = spec.domain.distance(&[xs[ix], ys[iy]])?;
            rhs[idx(ix, iy)] = spec.source_at(d) * wx * wy;
        }
    }
    Ok((
        SparseSystem {
            n: n_unknowns,
            row_ptr,
            col,
            val,
            rhs,
        },
        mesh_x,
        mesh_y,
    ))
}

/// Thomas elimination with one round of iterative refinement.
pub fn solve_tridiagonal(sys: &TriSystem) -> Result<Vec<f64>> {
    let n = sys.len();
    let thomas = |rhs: &[f64]| -> Result<Vec<f64>> {
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        if sys.diag[0] == 0.0 {
            return Err(Error::SingularSystem("zero pivot at row 0".into()));
        }
        c[0] = sys.sup[0] / sys.diag[0];
        d[0] = rhs[0] / sys.diag[0];
        for i in 1..n {
            let pivot = sys.diag[i] - sys.sub[i] * c[i - 1];
            if pivot == 0.0 {
                return Err(Error::SingularSystem(format!("zero pivot at row {i}")));
            }
            if i + 1 < n {
                c[i] = sys.sup[i] / pivot;
            }
            d[i] = (rhs[i] - sys.sub[i] * d[i - 1]) / pivot;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        Ok(x)
    };
    let mut x = thomas(&sys.rhs)?;
    // one refinement pass knocks the residual down to rounding level
    for _ in 0..2 {
        let ax = sys.matvec(&x);
        let r: Vec<f64> = sys.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = thomas(&r)?;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
    Ok(x)
}

/// Jacobi-preconditioned conjugate gradients for SPD sparse systems.
/// Returns the solution and the iteration count.
pub fn solve_cg(sys: &SparseSystem, tol: f64, maxiter: usize) -> Result<(Vec<f64>, usize)> {
    let n = sys.n;
    let diag = sys.diag();
    if diag.iter().any(|&d| d <= 0.0) {
        return Err(Error::Contract("matrix is not positive definite (nonpositive diagonal)".into()));
    }
    let mut x = vec![0.0; n];
    let mut r = sys.rhs.clone();
    let bnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for iter in 1..=maxiter {
        sys.matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Contract(format!("matrix is not positive definite (p'Ap = {pap})")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= tol * bnorm {
            return Ok((x, iter));
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    Err(Error::NonConvergence {
        residual: rnorm / bnorm,
        iterations: maxiter,
    })
}

/// Outcome of one full solve.
pub struct Solution {
    pub field: DiscreteField,
    /// Infinity-norm residual of the assembled system at the solution.
    pub residual: f64,
    /// CG iteration count, when an iterative solve was used.
    pub iterations: Option<usize>,
}

/// Assembles and solves the problem on whichever domain kind the spec holds.
pub fn solve(spec: &ProblemSpec) -> Result<Solution> {
    match &spec.domain {
        Domain::Interval { .. } => {
            let (sys, mesh) = assemble_1d(spec)?;
            let values = solve_tridiagonal(&sys)?;
            let residual = inf_residual_tri(&sys, &values);
            Ok(Solution {
                field: DiscreteField::Line {
                    mesh,
                    domain: spec.domain.clone(),
                    values,
                },
                residual,
                iterations: None,
            })
        }
        Domain::Ball { .. } => {
            let (sys, mesh) = assemble_radial(spec)?;
            let values = solve_tridiagonal(&sys)?;
            let residual = inf_residual_tri(&sys, &values);
            Ok(Solution {
                field: DiscreteField::Radial {
                    mesh,
                    domain: spec.domain.clone(),
                    values,
                },
                residual,
                iterations: None,
            })
        }
        Domain::Rectangle { .. } => {
            let (sys, mesh_x, mesh_y) = assemble_2d(spec)?;
            let maxiter = 50 * (mesh_x.nodes().len() + mesh_y.nodes().len())
                + 20 * sys.n;
            let (interior, iters) = solve_cg(&sys, 1e-10, maxiter)?;
            let mut ax = vec![0.0; sys.n];
            sys.matvec(&interior, &mut ax);
            let residual = sys
                .rhs
                .iter()
                .zip(&ax)
                .fold(0.0f64, |m, (b, a)| m.max((b - a).abs()));
            // scatter interior unknowns into the full nodal grid
            let nx = mesh_x.nodes().len();
            let ny = mesh_y.nodes().len();
            let mut values = vec![0.0; nx * ny];
            for iy in 1..ny - 1 {
                for ix in 1..nx - 1 {
                    values[ix + iy * nx] = interior[(ix - 1) + (iy - 1) * (nx - 2)];
                }
            }
            Ok(Solution {
                field: DiscreteField::Tensor {
                    mesh_x,
                    mesh_y,
                    domain: spec.domain.clone(),
                    values,
                },
                residual,
                iterations: Some(iters),
            })
        }
    }
}

fn inf_residual_tri(sys: &TriSystem, x: &[f64]) -> f64 {
    sys.matvec(x)
        .iter()
        .zip(&sys.rhs)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

/// Discrete energy F(u) = 1/2 int |grad u|^2 w - int f u, evaluated by
/// midpoint quadrature on the dual mesh. The discrete solution minimizes
/// this among fields vanishing on the boundary.
pub fn energy(spec: &ProblemSpec, field: &DiscreteField) -> Result<f64> {
    let mut grad_term = 0.0;
    for face in field.faces() {
        let w = spec.weight.eval_at(face.d_mid, &face.mid_point)?;
        grad_term += w * face.grad * face.grad * face.measure;
    }
    let mut source_term = 0.0;
    for cell in field.dual_cells() {
        source_term += spec.source_at(cell.d) * cell.u * cell.measure;
    }
    Ok(0.5 * grad_term - source_term)
}

/// |int grad u . grad phi w - int f phi| for a test function given by its
/// nodal values, which must vanish on the boundary.
pub fn weak_residual(spec: &ProblemSpec, field: &DiscreteField, phi: &[f64]) -> Result<f64> {
    if phi.len() != field.values().len() {
        return Err(Error::Contract(format!(
            "test function has {} nodal values, field has {}",
            phi.len(),
            field.values().len()
        )));
    }
    let cells = field.dual_cells();
    for (cell, &p) in cells.iter().zip(phi) {
        if cell.boundary && p != 0.0 {
            return Err(Error::Contract("test function must vanish on boundary nodes".into()));
        }
    }
    let phi_field = clone_with_values(field, phi.to_vec());
    let mut bilinear = 0.0;
    for (fu, fp) in field.faces().iter().zip(phi_field.faces().iter()) {
        let w = spec.weight.eval_at(fu.d_mid, &fu.mid_point)?;
        bilinear += w * fu.grad * fp.grad * fu.measure;
    }
    let mut load = 0.0;
    for (cell, &p) in cells.iter().zip(phi) {
        load += spec.source_at(cell.d) * p * cell.measure;
    }
    Ok((bilinear - load).abs())
}

/// Same mesh and domain, different nodal values.
pub fn clone_with_values(field: &DiscreteField, values: Vec<f64>) -> DiscreteField {
    match field {
        DiscreteField::Line { mesh, domain, .. } => DiscreteField::Line {
            mesh: mesh.clone(),
            domain: domain.clone(),
            values,
        },
        DiscreteField::Radial { mesh, domain, .. } => DiscreteField::Radial {
            mesh: mesh.clone(),
            domain: domain.clone(),
            values,
        },
        DiscreteField::Tensor { mesh_x, mesh_y, domain, .. } => DiscreteField::Tensor {
            mesh_x: mesh_x.clone(),
            mesh_y: mesh_y.clone(),
            domain: domain.clone(),
            values,
        },
    }
}

/// Discrete maximum principle check: true iff every interior value clears
/// -1e-12 * max|u|.
pub fn positivity_check(field: &DiscreteField) -> bool {
    let floor = -1e-12 * field.max_abs();
    field.values().iter().all(|&v| v >= floor)
}

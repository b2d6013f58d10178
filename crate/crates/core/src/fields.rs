//! Space-time sampled fields on `B(x0, R) × [t0 - T, t0]` with finite-difference
//! derivatives up to third order and sup-reductions over subregions.

use std::io::Write;
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::geometry::{Domain, DomainKind};
use crate::nonlinearity::Nonlinearity;
use crate::stencil::{nonuniform_d1_end, nonuniform_d1_mid, nonuniform_d1_start};

/// Relative slack when resolving region boundaries onto grid nodes.
const REGION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceRegion {
    /// The closed ball `B(x0, R)`.
    Ball,
    /// `B(x0, R - ρ)`.
    Inner(f64),
    /// `B(x0, R) \ B(x0, R - ρ)`.
    Ring(f64),
    /// Closed ball of a given radius around `x0`.
    Within(f64),
    /// `∂B(x0, R)`.
    Lateral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeRegion {
    All,
    /// The slice `t = t0 - T`.
    Initial,
    /// `[t0 - T, t0 - T + δ)`.
    Early(f64),
    /// `[t0 - T + δ, t0]`.
    Late(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub space: SpaceRegion,
    pub time: TimeRegion,
}

impl Region {
    pub const fn new(space: SpaceRegion, time: TimeRegion) -> Self {
        Self { space, time }
    }

    pub const fn full() -> Self {
        Self::new(SpaceRegion::Ball, TimeRegion::All)
    }
}

/// Derivative data of a field at one node and time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    /// Gradient components in an orthonormal frame; radial fields use the
    /// radial direction first.
    pub grad: [f64; 2],
    pub grad_norm: f64,
    pub laplacian: f64,
    pub hess_norm: f64,
    pub d3_norm: f64,
    /// A third-derivative stencil fell back to first order.
    pub degraded: bool,
}

#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    domain: Arc<Domain>,
    times: Vec<f64>,
    slices: Vec<Vec<f64>>,
}

impl SpaceTimeField {
    pub fn new(domain: Arc<Domain>, times: Vec<f64>, slices: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != slices.len() {
            return Err(LabError::Domain(format!(
                "{} time nodes for {} slices",
                times.len(),
                slices.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LabError::Domain("time nodes must increase strictly".into()));
        }
        if slices.iter().any(|s| s.len() != domain.len()) {
            return Err(LabError::Domain(
                "slice length does not match the grid".into(),
            ));
        }
        Ok(Self {
            domain,
            times,
            slices,
        })
    }

    /// Samples `f(coords, t)` at every node and time.
    pub fn from_fn(
        domain: Arc<Domain>,
        times: Vec<f64>,
        f: impl Fn([f64; 2], f64) -> f64,
    ) -> Result<Self> {
        let slices = times
            .iter()
            .map(|&t| domain.nodes().iter().map(|n| f(n.coords, t)).collect())
            .collect();
        Self::new(domain, times, slices)
    }

    /// Same grid, values from `f(id, j)`.
    pub fn map_nodes(&self, f: impl Fn(usize, usize) -> Result<f64>) -> Result<Self> {
        let slices = (0..self.times.len())
            .map(|j| {
                (0..self.domain.len())
                    .map(|id| f(id, j))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.domain.clone(), self.times.clone(), slices)
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn slices(&self) -> &[Vec<f64>] {
        &self.slices
    }

    pub fn slice(&self, j: usize) -> &[f64] {
        &self.slices[j]
    }

    pub fn value(&self, id: usize, j: usize) -> f64 {
        self.slices[j][id]
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn span(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    /// Smallest time step.
    pub fn min_dt(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest time step.
    pub fn max_dt(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// All spatial derivative data at `(id, j)`.
    pub fn jet(&self, id: usize, j: usize) -> Result<Jet> {
        jet_of(&self.domain, &self.slices[j], id)
    }

    /// Gradient in the orthonormal frame, length `n`.
    pub fn gradient(&self, id: usize, j: usize) -> Result<Vec<f64>> {
        let jet = self.jet(id, j)?;
        let mut g = vec![0.0; self.domain.n()];
        g[0] = jet.grad[0];
        if self.domain.kind() == DomainKind::Cartesian2d {
            g[1] = jet.grad[1];
        }
        Ok(g)
    }

    /// Hessian in the orthonormal frame, `n × n`.
    pub fn hessian(&self, id: usize, j: usize) -> Result<Vec<Vec<f64>>> {
        let dom = &*self.domain;
        let n = dom.n();
        let s = &self.slices[j];
        let node = dom.node(id);
        let ax = dom.axis_x()?;
        let nx = dom.shape().0;
        let (ix, iy) = (node.ix, node.iy);
        let row = |i: usize| s[iy * nx + i];
        let mut hess = vec![vec![0.0; n]; n];
        match dom.kind() {
            DomainKind::Segment => hess[0][0] = ax.d2(ix, row),
            DomainKind::Radial => {
                let u2 = ax.d2(ix, row);
                let tangential = if ix == 0 {
                    u2
                } else {
                    dom.metric_ratio(node.dist) * ax.d1(ix, row)
                };
                hess[0][0] = u2;
                for (i, hrow) in hess.iter_mut().enumerate().skip(1) {
                    hrow[i] = tangential;
                }
            }
            DomainKind::Cartesian2d => {
                let ay = dom.axis_y()?;
                let at = |i: usize, jy: usize| s[jy * nx + i];
                let uxy = ay.d1(iy, |jy| ax.d1(ix, |i| at(i, jy)));
                hess[0][0] = ax.d2(ix, row);
                hess[1][1] = ay.d2(iy, |jy| at(ix, jy));
                hess[0][1] = uxy;
                hess[1][0] = uxy;
            }
        }
        Ok(hess)
    }

    /// Frobenius norm of the third covariant derivative and the degraded flag.
    pub fn third_derivative_norm(&self, id: usize, j: usize) -> Result<(f64, bool)> {
        let jet = self.jet(id, j)?;
        Ok((jet.d3_norm, jet.degraded))
    }

    /// Laplacian with one-sided stencils at the boundary.
    pub fn laplacian(&self, id: usize, j: usize) -> Result<f64> {
        self.domain.laplacian_any(&self.slices[j], id)
    }

    /// Time derivative: three-point differences on the (possibly nonuniform)
    /// time grid, one-sided at the two end slices.
    pub fn time_derivative(&self, id: usize, j: usize) -> Result<f64> {
        let nt = self.times.len();
        let t = &self.times;
        let f = |k: usize| self.slices[k][id];
        match nt {
            0 | 1 => Err(LabError::GridTooCoarse("a single time slice".into())),
            2 => Ok((f(1) - f(0)) / (t[1] - t[0])),
            _ => Ok(if j == 0 {
                nonuniform_d1_start([t[0], t[1], t[2]], [f(0), f(1), f(2)])
            } else if j == nt - 1 {
                nonuniform_d1_end([t[j - 2], t[j - 1], t[j]], [f(j - 2), f(j - 1), f(j)])
            } else {
                nonuniform_d1_mid([t[j - 1], t[j], t[j + 1]], [f(j - 1), f(j), f(j + 1)])
            }),
        }
    }

    fn check_positive_near(&self, id: usize, j: usize) -> Result<()> {
        let dom = &*self.domain;
        let (nx, ny) = dom.shape();
        let node = dom.node(id);
        let s = &self.slices[j];
        let reach = 3;
        let xs = node.ix.saturating_sub(reach)..=(node.ix + reach).min(nx - 1);
        let ys = node.iy.saturating_sub(reach)..=(node.iy + reach).min(ny - 1);
        for ix in xs {
            let k = dom.id(ix, node.iy);
            if !(s[k] > 0.0) {
                return Err(LabError::Positivity {
                    node: k,
                    slice: j,
                    value: s[k],
                });
            }
        }
        for iy in ys {
            let k = dom.id(node.ix, iy);
            if !(s[k] > 0.0) {
                return Err(LabError::Positivity {
                    node: k,
                    slice: j,
                    value: s[k],
                });
            }
        }
        Ok(())
    }

    /// `div(F'(u) ∇u) = F'(u) Δu + F''(u) |∇u|^2`.
    pub fn div_fprime_grad(&self, nl: &Nonlinearity, id: usize, j: usize) -> Result<f64> {
        self.check_positive_near(id, j)?;
        let jet = self.jet(id, j)?;
        Ok(div_fprime_grad_from_jet(nl, &jet))
    }

    /// Spatial node ids of a region.
    pub fn space_ids(&self, space: SpaceRegion) -> Result<Vec<usize>> {
        space_ids(&self.domain, space)
    }

    /// Time indices of a region.
    pub fn time_ids(&self, time: TimeRegion) -> Result<Vec<usize>> {
        time_ids(&self.times, time)
    }

    /// Maximum of `f(id, j)` over the grid nodes of `region`.
    pub fn sup_over(&self, region: Region, f: impl Fn(usize, usize) -> Result<f64>) -> Result<f64> {
        let ids = self.space_ids(region.space)?;
        let js = self.time_ids(region.time)?;
        let mut best = f64::NEG_INFINITY;
        for &j in &js {
            for &id in &ids {
                best = best.max(f(id, j)?);
            }
        }
        Ok(best)
    }

    /// Maximum of the field values over `region`.
    pub fn sup(&self, region: Region) -> Result<f64> {
        self.sup_over(region, |id, j| Ok(self.value(id, j)))
    }

    /// Minimum of the field values over the ball.
    pub fn inf(&self) -> f64 {
        let ball = self.domain.ball();
        self.slices
            .iter()
            .flat_map(|s| ball.iter().map(move |&id| s[id]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Writes ball nodes as CSV rows of coordinates, time and value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header = match self.domain.kind() {
            DomainKind::Segment => "x,t,value",
            DomainKind::Radial => "r,t,value",
            DomainKind::Cartesian2d => "x,y,t,value",
        };
        writeln!(out, "{header}")?;
        for (j, &t) in self.times.iter().enumerate() {
            for &id in self.domain.ball() {
                let c = self.domain.node(id).coords;
                let v = self.slices[j][id];
                match self.domain.kind() {
                    DomainKind::Cartesian2d => writeln!(out, "{},{},{t},{v}", c[0], c[1])?,
                    _ => writeln!(out, "{},{t},{v}", c[0])?,
                }
            }
        }
        Ok(())
    }
}

/// Spatial derivative data of one slice `s` at node `id`.
pub fn jet_of(dom: &Domain, s: &[f64], id: usize) -> Result<Jet> {
    let node = dom.node(id);
    let ax = dom.axis_x()?;
    let (ix, iy) = (node.ix, node.iy);
    let nx = dom.shape().0;
    let row = |i: usize| s[iy * nx + i];
    let mut jet = Jet {
        value: s[id],
        ..Jet::default()
    };
    match dom.kind() {
        DomainKind::Segment => {
            let (d3, degraded) = ax.d3(ix, row);
            let (d1, d2) = (ax.d1(ix, row), ax.d2(ix, row));
            jet.grad = [d1, 0.0];
            jet.grad_norm = d1.abs();
            jet.laplacian = d2;
            jet.hess_norm = d2.abs();
            jet.d3_norm = d3.abs();
            jet.degraded = degraded;
        }
        DomainKind::Radial => {
            let n = dom.n() as f64;
            let (u1, u2) = (ax.d1(ix, row), ax.d2(ix, row));
            let (u3, degraded) = ax.d3(ix, row);
            jet.degraded = degraded;
            if ix == 0 {
                jet.laplacian = n * u2;
                jet.hess_norm = n.sqrt() * u2.abs();
                jet.d3_norm = u3.abs();
            } else {
                let ratio = dom.metric_ratio(node.dist);
                let kc = dom.model_curvature();
                let m = n - 1.0;
                jet.grad = [u1, 0.0];
                jet.grad_norm = u1.abs();
                jet.laplacian = u2 + m * ratio * u1;
                jet.hess_norm = (u2 * u2 + m * (ratio * u1).powi(2)).sqrt();
                // derivative of u' c'/c, and the mixed radial-tangential term
                let a = u2 * ratio + u1 * (kc - ratio * ratio);
                let q = (u2 - u1 * ratio) * ratio;
                jet.d3_norm = (u3 * u3 + m * (a * a + 2.0 * q * q)).sqrt();
            }
        }
        DomainKind::Cartesian2d => {
            let ay = dom.axis_y()?;
            let col = |jy: usize| s[jy * nx + ix];
            let at = |i: usize, jy: usize| s[jy * nx + i];
            let ux = ax.d1(ix, row);
            let uy = ay.d1(iy, col);
            let uxx = ax.d2(ix, row);
            let uyy = ay.d2(iy, col);
            let uxy = ay.d1(iy, |jy| ax.d1(ix, |i| at(i, jy)));
            let (uxxx, dx) = ax.d3(ix, row);
            let (uyyy, dy) = ay.d3(iy, col);
            let uxxy = ay.d1(iy, |jy| ax.d2(ix, |i| at(i, jy)));
            let uxyy = ax.d1(ix, |i| ay.d2(iy, |jy| at(i, jy)));
            jet.grad = [ux, uy];
            jet.grad_norm = ux.hypot(uy);
            jet.laplacian = uxx + uyy;
            jet.hess_norm = (uxx * uxx + 2.0 * uxy * uxy + uyy * uyy).sqrt();
            jet.d3_norm =
                (uxxx * uxxx + 3.0 * uxxy * uxxy + 3.0 * uxyy * uxyy + uyyy * uyyy).sqrt();
            jet.degraded = dx || dy || !ax.centered(ix) || !ay.centered(iy);
        }
    }
    Ok(jet)
}

/// `F'(u) Δu + F''(u) |∇u|^2` from precomputed derivative data.
pub fn div_fprime_grad_from_jet(nl: &Nonlinearity, jet: &Jet) -> f64 {
    let u = jet.value;
    nl.df(u) * jet.laplacian + nl.d2f(u) * jet.grad_norm * jet.grad_norm
}

fn check_rho(dom: &Domain, rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < dom.radius()) {
        return Err(LabError::Domain(format!(
            "rho = {rho} must lie in (0, R) with R = {}",
            dom.radius()
        )));
    }
    Ok(())
}

pub fn space_ids(dom: &Domain, space: SpaceRegion) -> Result<Vec<usize>> {
    let r = dom.radius();
    let slack = REGION_SLACK * r;
    let ball = dom.ball().iter().copied();
    let ids: Vec<usize> = match space {
        SpaceRegion::Ball => ball.collect(),
        SpaceRegion::Lateral => dom.boundary().to_vec(),
        SpaceRegion::Inner(rho) => {
            check_rho(dom, rho)?;
            ball.filter(|&id| dom.node(id).dist <= r - rho + slack)
                .collect()
        }
        SpaceRegion::Ring(rho) => {
            check_rho(dom, rho)?;
            ball.filter(|&id| dom.node(id).dist > r - rho + slack)
                .collect()
        }
        SpaceRegion::Within(radius) => ball
            .filter(|&id| dom.node(id).dist <= radius + slack)
            .collect(),
    };
    if ids.is_empty() {
        return Err(LabError::Domain(format!(
            "region {space:?} has no grid nodes"
        )));
    }
    Ok(ids)
}

fn check_delta(span: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < span) {
        return Err(LabError::Domain(format!(
            "delta = {delta} must lie in (0, T) with T = {span}"
        )));
    }
    Ok(())
}

pub fn time_ids(times: &[f64], time: TimeRegion) -> Result<Vec<usize>> {
    let start = times[0];
    let span = times[times.len() - 1] - start;
    let slack = REGION_SLACK * span.max(f64::MIN_POSITIVE);
    let all = 0..times.len();
    let ids: Vec<usize> = match time {
        TimeRegion::All => all.collect(),
        TimeRegion::Initial => vec![0],
        TimeRegion::Early(delta) => {
            check_delta(span, delta)?;
            all.filter(|&j| times[j] < start + delta - slack).collect()
        }
        TimeRegion::Late(delta) => {
            check_delta(span, delta)?;
            all.filter(|&j| times[j] >= start + delta - slack).collect()
        }
    };
    if ids.is_empty() {
        return Err(LabError::Domain(format!(
            "time region {time:?} has no slices"
        )));
    }
    Ok(ids)
}

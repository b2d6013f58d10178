//! Spatial domains `B(x0, R)`: a segment, a radially symmetric model manifold
//! of constant curvature, and a Euclidean square grid in two dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::stencil::{Axis, Line};

/// Relative slack used when deciding ball membership on the grid.
const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Extra cells kept around the ball on Cartesian grids so that every ball node
/// has a full centred stencil.
const CARTESIAN_HALO: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Segment,
    Radial,
    Cartesian2d,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// Segment: `(x, 0)`; radial: `(r, 0)`; Cartesian: `(x, y)`.
    pub coords: [f64; 2],
    pub dist: f64,
    pub in_ball: bool,
    pub boundary: bool,
    pub ix: usize,
    pub iy: usize,
}

#[derive(Debug, Clone)]
pub struct Domain {
    kind: DomainKind,
    n: usize,
    radius: f64,
    k: f64,
    center: [f64; 2],
    h: f64,
    nx: usize,
    ny: usize,
    origin: [f64; 2],
    nodes: Vec<Node>,
    ball: Vec<usize>,
    boundary: Vec<usize>,
}

impl Domain {
    pub fn segment(center: f64, radius: f64, h: f64) -> Result<Self> {
        Self::new(DomainKind::Segment, 1, radius, 0.0, h, [center, 0.0])
    }

    pub fn radial(n: usize, radius: f64, k: f64, h: f64) -> Result<Self> {
        Self::new(DomainKind::Radial, n, radius, k, h, [0.0, 0.0])
    }

    pub fn cartesian(center: [f64; 2], radius: f64, h: f64) -> Result<Self> {
        Self::new(DomainKind::Cartesian2d, 2, radius, 0.0, h, center)
    }

    /// Builds the grid. The requested spacing is shrunk so that it divides the
    /// radius (or the diameter for the segment) exactly.
    pub fn new(
        kind: DomainKind,
        n: usize,
        radius: f64,
        k: f64,
        h: f64,
        center: [f64; 2],
    ) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(LabError::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(LabError::Domain(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if !k.is_finite() {
            return Err(LabError::Domain("curvature bound k must be finite".into()));
        }
        match kind {
            DomainKind::Segment if n != 1 => {
                return Err(LabError::Domain("segment domains have n = 1".into()))
            }
            DomainKind::Segment if k != 0.0 => {
                return Err(LabError::Domain("segment domains are flat (k = 0)".into()))
            }
            DomainKind::Cartesian2d if n != 2 || k != 0.0 => {
                return Err(LabError::Domain(
                    "cartesian2d domains have n = 2 and k = 0".into(),
                ))
            }
            DomainKind::Radial if n < 2 => {
                return Err(LabError::Domain("radial domains need n >= 2".into()))
            }
            DomainKind::Radial if k < 0.0 => {
                return Err(LabError::Domain(format!(
                    "negative k = {k} has no hyperbolic model manifold; only k >= 0 is supported"
                )))
            }
            _ => {}
        }

        let mut dom = Domain {
            kind,
            n,
            radius,
            k,
            center,
            h,
            nx: 0,
            ny: 1,
            origin: [0.0, 0.0],
            nodes: Vec::new(),
            ball: Vec::new(),
            boundary: Vec::new(),
        };
        match kind {
            DomainKind::Segment => {
                let cells = (2.0 * radius / h - 1e-9).ceil().max(1.0) as usize;
                dom.h = 2.0 * radius / cells as f64;
                dom.nx = cells + 1;
                dom.origin = [center[0] - radius, 0.0];
                for i in 0..dom.nx {
                    let x = if i == cells {
                        center[0] + radius
                    } else {
                        dom.origin[0] + i as f64 * dom.h
                    };
                    let dist = (x - center[0]).abs();
                    dom.nodes.push(Node {
                        coords: [x, 0.0],
                        dist,
                        in_ball: true,
                        boundary: i == 0 || i == cells,
                        ix: i,
                        iy: 0,
                    });
                }
            }
            DomainKind::Radial => {
                let cells = (radius / h - 1e-9).ceil().max(1.0) as usize;
                dom.h = radius / cells as f64;
                dom.nx = cells + 1;
                for i in 0..dom.nx {
                    let r = if i == cells { radius } else { i as f64 * dom.h };
                    dom.nodes.push(Node {
                        coords: [r, 0.0],
                        dist: r,
                        in_ball: true,
                        boundary: i == cells,
                        ix: i,
                        iy: 0,
                    });
                }
            }
            DomainKind::Cartesian2d => {
                let half = (radius / h - 1e-9).ceil().max(1.0) as usize;
                dom.h = radius / half as f64;
                let cells = 2 * (half + CARTESIAN_HALO);
                dom.nx = cells + 1;
                dom.ny = cells + 1;
                let offset = (half + CARTESIAN_HALO) as f64 * dom.h;
                dom.origin = [center[0] - offset, center[1] - offset];
                let limit = radius * (1.0 + MEMBERSHIP_SLACK);
                for iy in 0..dom.ny {
                    for ix in 0..dom.nx {
                        let x = dom.origin[0] + ix as f64 * dom.h;
                        let y = dom.origin[1] + iy as f64 * dom.h;
                        let dist = (x - center[0]).hypot(y - center[1]);
                        dom.nodes.push(Node {
                            coords: [x, y],
                            dist,
                            in_ball: dist <= limit,
                            boundary: false,
                            ix,
                            iy,
                        });
                    }
                }
                let inside = |ix: isize, iy: isize, d: &Domain| -> bool {
                    ix >= 0
                        && iy >= 0
                        && (ix as usize) < d.nx
                        && (iy as usize) < d.ny
                        && d.nodes[iy as usize * d.nx + ix as usize].in_ball
                };
                for id in 0..dom.nodes.len() {
                    if !dom.nodes[id].in_ball {
                        continue;
                    }
                    let (ix, iy) = (dom.nodes[id].ix as isize, dom.nodes[id].iy as isize);
                    let edge = [(1, 0), (-1, 0), (0, 1), (0, -1)]
                        .iter()
                        .any(|(dx, dy)| !inside(ix + dx, iy + dy, &dom));
                    dom.nodes[id].boundary = edge;
                }
            }
        }
        if dom.nx < crate::stencil::MIN_LINE_NODES {
            return Err(LabError::GridTooCoarse(format!(
                "only {} nodes across the domain",
                dom.nx
            )));
        }
        dom.ball = (0..dom.nodes.len())
            .filter(|&i| dom.nodes[i].in_ball)
            .collect();
        dom.boundary = (0..dom.nodes.len())
            .filter(|&i| dom.nodes[i].in_ball && dom.nodes[i].boundary)
            .collect();
        Ok(dom)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn k_plus(&self) -> f64 {
        self.k.max(0.0)
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node ids inside the closed ball.
    pub fn ball(&self) -> &[usize] {
        &self.ball
    }

    /// Node ids on the boundary sphere.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Same geometry on a grid with spacing `h`.
    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::new(self.kind, self.n, self.radius, self.k, h, self.center)
    }

    /// Same geometry with a new radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.kind, self.n, radius, self.k, self.h, self.center)
    }

    /// Model curvature `κ_c = k/(n-1)` of the radial manifold, so that `Ric = -k`.
    pub fn model_curvature(&self) -> f64 {
        match self.kind {
            DomainKind::Radial => self.k_plus() / (self.n - 1) as f64,
            _ => 0.0,
        }
    }

    /// Warping function `c(r)` of the radial metric `dr^2 + c(r)^2 dθ^2`.
    pub fn metric_factor(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(LabError::Domain(format!(
                "radius must be nonnegative, got {r}"
            )));
        }
        Ok(warp(self.model_curvature(), r))
    }

    /// `c'(r)/c(r)`; infinite at the origin.
    pub fn metric_ratio(&self, r: f64) -> f64 {
        warp_ratio(self.model_curvature(), r)
    }

    /// Node id of grid position `(ix, iy)`.
    pub fn id(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Index space of the first grid direction.
    pub fn axis_x(&self) -> Result<Axis> {
        Axis::new(self.nx, self.h, self.kind == DomainKind::Radial)
    }

    /// Index space of the second grid direction (Cartesian only).
    pub fn axis_y(&self) -> Result<Axis> {
        if self.kind != DomainKind::Cartesian2d {
            return Err(LabError::Domain("no second grid direction".into()));
        }
        Axis::new(self.ny, self.h, false)
    }

    /// Line through `id` along the first grid direction.
    pub fn line_x<'a>(&self, values: &'a [f64], id: usize) -> Result<(Line<'a>, usize)> {
        let node = &self.nodes[id];
        let line = Line::new(
            values,
            node.iy * self.nx,
            1,
            self.nx,
            self.h,
            self.kind == DomainKind::Radial,
        )?;
        Ok((line, node.ix))
    }

    /// Line through `id` along the second grid direction (Cartesian only).
    pub fn line_y<'a>(&self, values: &'a [f64], id: usize) -> Result<(Line<'a>, usize)> {
        if self.kind != DomainKind::Cartesian2d {
            return Err(LabError::Domain("no second grid direction".into()));
        }
        let node = &self.nodes[id];
        let line = Line::new(values, node.ix, self.nx, self.ny, self.h, false)?;
        Ok((line, node.iy))
    }

    /// True if every stencil used by [`Domain::laplacian`] is centred at `id`.
    pub fn has_centered_stencil(&self, values: &[f64], id: usize) -> bool {
        let Ok((lx, ix)) = self.line_x(values, id) else {
            return false;
        };
        if !lx.centered(ix) {
            return false;
        }
        match self.kind {
            DomainKind::Cartesian2d => match self.line_y(values, id) {
                Ok((ly, iy)) => ly.centered(iy),
                Err(_) => false,
            },
            _ => true,
        }
    }

    /// Second-order Laplace–Beltrami operator at an interior node.
    pub fn laplacian(&self, values: &[f64], id: usize) -> Result<f64> {
        if !self.has_centered_stencil(values, id) {
            return Err(LabError::Stencil {
                node: id,
                reason: "boundary node; use the one-sided variant".into(),
            });
        }
        self.laplacian_any(values, id)
    }

    /// Laplacian with one-sided stencils where the centred ones do not fit.
    pub fn laplacian_any(&self, values: &[f64], id: usize) -> Result<f64> {
        let (lx, ix) = self.line_x(values, id)?;
        match self.kind {
            DomainKind::Segment => Ok(lx.d2(ix)),
            DomainKind::Radial => {
                let r = self.nodes[id].dist;
                if ix == 0 {
                    Ok(self.n as f64 * lx.d2(0))
                } else {
                    Ok(lx.d2(ix) + (self.n - 1) as f64 * self.metric_ratio(r) * lx.d1(ix))
                }
            }
            DomainKind::Cartesian2d => {
                let (ly, iy) = self.line_y(values, id)?;
                Ok(lx.d2(ix) + ly.d2(iy))
            }
        }
    }

    /// Distance from the centre: `|x - x0|` or the radial coordinate.
    pub fn geodesic_distance(&self, coords: [f64; 2]) -> f64 {
        match self.kind {
            DomainKind::Segment => (coords[0] - self.center[0]).abs(),
            DomainKind::Radial => coords[0].abs(),
            DomainKind::Cartesian2d => {
                (coords[0] - self.center[0]).hypot(coords[1] - self.center[1])
            }
        }
    }

    /// `(n-1)/d + sqrt((n-1) k_+)`; `+∞` at `d = 0`.
    pub fn laplacian_comparison(&self, d: f64) -> f64 {
        laplacian_comparison(self.n, self.k, d)
    }
}

/// `(n-1)/d + sqrt((n-1) k_+)`; `+∞` at `d = 0`.
pub fn laplacian_comparison(n: usize, k: f64, d: f64) -> f64 {
    if d <= 0.0 {
        return f64::INFINITY;
    }
    let m = (n - 1) as f64;
    m / d + (m * k.max(0.0)).sqrt()
}

/// `sinh(√κ r)/√κ`, with a series near `√κ r = 0`.
pub fn warp(kappa: f64, r: f64) -> f64 {
    if kappa == 0.0 {
        return r;
    }
    let sq = kappa.sqrt();
    let s = sq * r;
    if s < 1e-3 {
        let s2 = s * s;
        r * (1.0 + s2 / 6.0 * (1.0 + s2 / 20.0))
    } else {
        s.sinh() / sq
    }
}

/// `c'/c = √κ coth(√κ r)`, with a series near `√κ r = 0`.
pub fn warp_ratio(kappa: f64, r: f64) -> f64 {
    if r == 0.0 {
        return f64::INFINITY;
    }
    if kappa == 0.0 {
        return 1.0 / r;
    }
    let sq = kappa.sqrt();
    let s = sq * r;
    if s < 1e-3 {
        let s2 = s * s;
        (1.0 + s2 / 3.0 - s2 * s2 / 45.0) / r
    } else {
        sq / s.tanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(dom: &Domain, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        dom.nodes().iter().map(|n| f(n.coords)).collect()
    }

    #[test]
    fn metric_factor_values() {
        let flat = Domain::radial(2, 1.0, 0.0, 0.1).unwrap();
        assert_eq!(flat.metric_factor(0.5).unwrap(), 0.5);
        let hyp = Domain::radial(2, 1.0, 1.0, 0.1).unwrap();
        assert_relative_eq!(
            hyp.metric_factor(1.0).unwrap(),
            1f64.sinh(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            hyp.metric_factor(1.0).unwrap(),
            1.175_201_193_643_801_4,
            epsilon = 1e-12
        );
        assert!(hyp.metric_factor(-0.1).is_err());
    }

    #[test]
    fn metric_factor_small_curvature_limit() {
        // c(1) = 1 + κ/6 + ... at κ = 1e-8
        assert!((warp(1e-8, 1.0) - 1.0).abs() <= 1e-8);
        let taylor = 1.0 + 1e-8 / 6.0;
        assert_relative_eq!(warp(1e-8, 1.0), taylor, max_relative = 1e-15);
    }

    #[test]
    fn series_branches_join_smoothly() {
        for kappa in [1e-2_f64, 1.0, 4.0] {
            let r = 1e-3 / kappa.sqrt();
            let below = warp(kappa, r * (1.0 - 1e-9));
            let above = warp(kappa, r * (1.0 + 1e-9));
            assert_relative_eq!(below, above, max_relative = 1e-8);
            let below = warp_ratio(kappa, r * (1.0 - 1e-9));
            let above = warp_ratio(kappa, r * (1.0 + 1e-9));
            assert_relative_eq!(below, above, max_relative = 1e-8);
        }
    }

    #[test]
    fn segment_laplacian_of_square() {
        let dom = Domain::segment(0.0, 1.0, 0.05).unwrap();
        let u = sample(&dom, |c| c[0] * c[0]);
        for id in 1..dom.len() - 1 {
            assert!((dom.laplacian(&u, id).unwrap() - 2.0).abs() < 1e-9);
        }
        assert!(matches!(
            dom.laplacian(&u, 0),
            Err(LabError::Stencil { .. })
        ));
        assert!(dom.laplacian_any(&u, 0).is_ok());
    }

    #[test]
    fn radial_euclidean_laplacian_of_r_squared() {
        let dom = Domain::radial(3, 1.0, 0.0, 0.05).unwrap();
        let u = sample(&dom, |c| c[0] * c[0]);
        for id in 0..dom.len() - 1 {
            assert!(
                (dom.laplacian(&u, id).unwrap() - 6.0).abs() < 1e-8,
                "node {id}"
            );
        }
    }

    #[test]
    fn radial_hyperbolic_laplacian_of_cosh() {
        let exact = 2.0 * 1f64.cosh();
        assert!((exact - 3.086_161_269_630_487_6).abs() < 1e-12);
        let mut errs = Vec::new();
        for h in [0.05, 0.025] {
            let dom = Domain::radial(2, 2.0, 1.0, h).unwrap();
            let u = sample(&dom, |c| c[0].cosh());
            let id = (1.0 / dom.h()).round() as usize;
            assert!((dom.node(id).dist - 1.0).abs() < 1e-12);
            errs.push((dom.laplacian(&u, id).unwrap() - exact).abs());
        }
        assert!(errs[0] < 5e-3);
        let ratio = errs[0] / errs[1];
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn affine_radial_field_at_origin() {
        // u = r has Δu = (n-1)/r away from the origin on flat space
        let dom = Domain::radial(2, 1.0, 0.0, 0.1).unwrap();
        let u = sample(&dom, |c| 3.0 + 0.0 * c[0]);
        for id in 0..dom.len() - 1 {
            assert!(dom.laplacian(&u, id).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn cartesian_five_point() {
        let dom = Domain::cartesian([0.0, 0.0], 1.0, 0.1).unwrap();
        let u = sample(&dom, |c| c[0] * c[0] + 3.0 * c[1] * c[1]);
        for &id in dom.ball() {
            assert!((dom.laplacian(&u, id).unwrap() - 8.0).abs() < 1e-9);
        }
        assert!(!dom.boundary().is_empty());
        for &id in dom.boundary() {
            let d = dom.node(id).dist;
            assert!(d > 1.0 - 2.0 * dom.h() && d <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn second_order_refinement() {
        let f = |x: f64| (x.sin()).exp();
        let lap = |x: f64| {
            let (s, c) = x.sin_cos();
            (s.exp()) * (c * c - s)
        };
        let errs: Vec<f64> = [0.02, 0.01]
            .iter()
            .map(|&h| {
                let dom = Domain::segment(0.0, 1.0, h).unwrap();
                let u = sample(&dom, |c| f(c[0]));
                let id = dom
                    .nodes()
                    .iter()
                    .position(|n| (n.coords[0] - 0.3).abs() < 1e-9)
                    .unwrap();
                (dom.laplacian(&u, id).unwrap() - lap(0.3)).abs()
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn comparison_values() {
        assert_eq!(laplacian_comparison(2, 0.0, 0.5), 2.0);
        assert_eq!(laplacian_comparison(2, 1.0, 1.0), 2.0);
        assert_eq!(laplacian_comparison(3, 1.0, 0.0), f64::INFINITY);
    }

    #[test]
    fn comparison_dominates_distance_laplacian() {
        let dom = Domain::radial(2, 3.0, 1.0, 0.01).unwrap();
        for d in [0.5_f64, 1.0, 2.0] {
            assert!(1.0 / d.tanh() < dom.laplacian_comparison(d));
        }
        let u = sample(&dom, |c| c[0]);
        for id in 0..dom.len() - 1 {
            let d = dom.node(id).dist;
            if d >= 2.0 * dom.h() {
                let lap = dom.laplacian(&u, id).unwrap();
                assert!(lap <= dom.laplacian_comparison(d) + 1e-9);
            }
        }
    }

    #[test]
    fn invalid_domains() {
        assert!(Domain::radial(1, 1.0, 0.0, 0.1).is_err());
        assert!(Domain::radial(2, 1.0, -1.0, 0.1).is_err());
        assert!(Domain::segment(0.0, -1.0, 0.1).is_err());
        assert!(matches!(
            Domain::radial(2, 1.0, 0.0, 0.5),
            Err(LabError::GridTooCoarse(_))
        ));
    }

    #[test]
    fn spacing_divides_radius() {
        let dom = Domain::segment(0.0, 1.0, 0.03).unwrap();
        assert!(dom.h() <= 0.03);
        assert_eq!(dom.node(dom.len() - 1).coords[0], 1.0);
        assert_eq!(dom.boundary(), &[0, dom.len() - 1]);
    }
}

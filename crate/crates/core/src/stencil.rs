//! One-dimensional finite-difference stencils on strided lines of a grid.

use crate::error::{LabError, Result};

/// Minimum number of nodes along a direction for the derivative stencils.
pub const MIN_LINE_NODES: usize = 4;

/// Index space of one grid direction: `len` nodes at spacing `h`, optionally
/// reflected evenly through index 0 (radial origin, `u'(0) = 0`).
#[derive(Debug, Clone, Copy)]
pub struct Axis {
    len: usize,
    h: f64,
    reflect_even: bool,
}

impl Axis {
    pub fn new(len: usize, h: f64, reflect_even: bool) -> Result<Self> {
        if len < MIN_LINE_NODES {
            return Err(LabError::GridTooCoarse(format!(
                "{len} nodes along a direction, need at least {MIN_LINE_NODES}"
            )));
        }
        Ok(Self {
            len,
            h,
            reflect_even,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    fn has(&self, j: isize) -> bool {
        (j >= 0 || (self.reflect_even && -j < self.len as isize)) && j < self.len as isize
    }

    fn fetch<G: Fn(usize) -> f64>(&self, get: &G, j: isize) -> f64 {
        get(j.unsigned_abs())
    }

    /// True when the centred second-order stencil fits at `i`.
    pub fn centered(&self, i: usize) -> bool {
        let i = i as isize;
        self.has(i - 1) && self.has(i + 1)
    }

    /// First derivative: centred inside, second-order one-sided at the ends.
    pub fn d1<G: Fn(usize) -> f64>(&self, i: usize, get: G) -> f64 {
        let j = i as isize;
        let h = self.h;
        let f = |k: isize| self.fetch(&get, k);
        if self.centered(i) {
            (f(j + 1) - f(j - 1)) / (2.0 * h)
        } else if !self.has(j - 1) {
            (-3.0 * f(j) + 4.0 * f(j + 1) - f(j + 2)) / (2.0 * h)
        } else {
            (3.0 * f(j) - 4.0 * f(j - 1) + f(j - 2)) / (2.0 * h)
        }
    }

    /// Second derivative: centred inside, second-order one-sided at the ends.
    pub fn d2<G: Fn(usize) -> f64>(&self, i: usize, get: G) -> f64 {
        let j = i as isize;
        let h2 = self.h * self.h;
        let f = |k: isize| self.fetch(&get, k);
        if self.centered(i) {
            (f(j + 1) - 2.0 * f(j) + f(j - 1)) / h2
        } else if !self.has(j - 1) {
            (2.0 * f(j) - 5.0 * f(j + 1) + 4.0 * f(j + 2) - f(j + 3)) / h2
        } else {
            (2.0 * f(j) - 5.0 * f(j - 1) + 4.0 * f(j - 2) - f(j - 3)) / h2
        }
    }

    /// Third derivative and a degraded-order flag. The 5-point centred stencil
    /// is second order; near an end it falls back to a first-order one-sided
    /// stencil.
    pub fn d3<G: Fn(usize) -> f64>(&self, i: usize, get: G) -> (f64, bool) {
        let j = i as isize;
        let h3 = self.h * self.h * self.h;
        let f = |k: isize| self.fetch(&get, k);
        if self.has(j - 2) && self.has(j + 2) {
            let v = (f(j + 2) - 2.0 * f(j + 1) + 2.0 * f(j - 1) - f(j - 2)) / (2.0 * h3);
            (v, false)
        } else if !self.has(j - 2) {
            (
                (f(j + 3) - 3.0 * f(j + 2) + 3.0 * f(j + 1) - f(j)) / h3,
                true,
            )
        } else {
            (
                (f(j) - 3.0 * f(j - 1) + 3.0 * f(j - 2) - f(j - 3)) / h3,
                true,
            )
        }
    }
}

/// A strided view of grid values along one coordinate direction.
#[derive(Debug, Clone, Copy)]
pub struct Line<'a> {
    data: &'a [f64],
    start: usize,
    stride: usize,
    axis: Axis,
}

impl<'a> Line<'a> {
    pub fn new(
        data: &'a [f64],
        start: usize,
        stride: usize,
        len: usize,
        h: f64,
        reflect_even: bool,
    ) -> Result<Self> {
        let axis = Axis::new(len, h, reflect_even)?;
        debug_assert!(start + (len - 1) * stride < data.len());
        Ok(Self {
            data,
            start,
            stride,
            axis,
        })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    fn value(&self, j: usize) -> f64 {
        self.data[self.start + j * self.stride]
    }

    pub fn centered(&self, i: usize) -> bool {
        self.axis.centered(i)
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.axis.d1(i, |j| self.value(j))
    }

    pub fn d2(&self, i: usize) -> f64 {
        self.axis.d2(i, |j| self.value(j))
    }

    pub fn d3(&self, i: usize) -> (f64, bool) {
        self.axis.d3(i, |j| self.value(j))
    }
}

/// Weights of the three-point first derivative at the middle of a nonuniform
/// stencil `(t0, t1, t2)`.
pub fn nonuniform_d1_mid(t: [f64; 3], f: [f64; 3]) -> f64 {
    let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
    (-h1 / (h0 * (h0 + h1))) * f[0]
        + ((h1 - h0) / (h0 * h1)) * f[1]
        + (h0 / (h1 * (h0 + h1))) * f[2]
}

/// Second-order one-sided first derivative at `t[0]` from three nonuniform nodes.
pub fn nonuniform_d1_start(t: [f64; 3], f: [f64; 3]) -> f64 {
    let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
    -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * f[0] + (h0 + h1) / (h0 * h1) * f[1]
        - h0 / (h1 * (h0 + h1)) * f[2]
}

/// Second-order one-sided first derivative at `t[2]` from three nonuniform nodes.
pub fn nonuniform_d1_end(t: [f64; 3], f: [f64; 3]) -> f64 {
    let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
    h1 / (h0 * (h0 + h1)) * f[0] - (h0 + h1) / (h0 * h1) * f[1]
        + (2.0 * h1 + h0) / (h1 * (h0 + h1)) * f[2]
}

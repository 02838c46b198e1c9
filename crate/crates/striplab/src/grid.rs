//! Interval and tensor-product grids with optional geometric refinement
//! toward x = 0.
//!
//! Grids store interior nodes only (homogeneous Dirichlet values are never
//! represented). A 1-D grid of n nodes has n + 1 cells; the lumped mass of
//! a node is the average of its two adjacent cell widths.

use crate::error::{Error, Result};
use crate::geometry::Profile;

/// x-direction node placement for [`build_grid2d`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Grading {
    Uniform,
    /// Cell widths shrink geometrically toward x = 0 by `ratio` per cell
    /// (outer-to-inner), mirrored about the center node at exactly 0.
    GeometricTowardZero { ratio: f64 },
}

/// Interior nodes of an interval with Dirichlet ends.
#[derive(Clone, Debug)]
pub struct Grid1D {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    spacing: Vec<f64>,
    zero_node: Option<usize>,
    desc: String,
}

impl Grid1D {
    /// n interior nodes, uniform spacing (b - a)/(n + 1).
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Grid1D> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::invalid("interval", format!("[{a}, {b}] is not a proper interval")));
        }
        if n < 2 {
            return Err(Error::invalid("node count", format!("{n} interior nodes; need at least 2")));
        }
        let h = (b - a) / (n + 1) as f64;
        let nodes: Vec<f64> = (1..=n).map(|i| a + i as f64 * h).collect();
        let spacing = vec![h; n + 1];
        let zero_node = nodes.iter().position(|&x| x == 0.0);
        Ok(Grid1D { a, b, nodes, spacing, zero_node, desc: "u".to_string() })
    }

    /// Symmetric grid on [-x_extent, x_extent] with a node exactly at 0 and
    /// geometric cell-width decay toward the center. `ratio = 1` gives a
    /// uniform symmetric grid. Requires an odd node count.
    pub fn geometric_symmetric(x_extent: f64, n: usize, ratio: f64) -> Result<Grid1D> {
        if !(x_extent.is_finite() && x_extent > 0.0) {
            return Err(Error::invalid("x extent", format!("{x_extent} must be positive")));
        }
        if !(ratio.is_finite() && ratio > 0.0 && ratio <= 1.0) {
            return Err(Error::invalid(
                "grading ratio",
                format!("{ratio} outside the admissible range (0, 1]"),
            ));
        }
        if n < 3 || n % 2 == 0 {
            return Err(Error::invalid(
                "node count",
                format!("{n} interior nodes; a symmetric grid with a center node needs an odd count >= 3"),
            ));
        }
        // m cells per half; widths proportional to ratio^(m-k) so the
        // smallest cell touches x = 0.
        let m = (n + 1) / 2;
        let mut widths = Vec::with_capacity(m);
        let mut w = 1.0f64;
        for _ in 0..m {
            widths.push(w);
            w /= ratio;
        }
        // widths[0] is innermost; order outward for the cumulative sum.
        let total: f64 = widths.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::invalid(
                "grading ratio",
                format!("{ratio} underflows the cell widths at n = {n}"),
            ));
        }
        let scale = x_extent / total;
        let half: Vec<f64> = widths.iter().map(|w| w * scale).collect();
        // Positive half-nodes: cumulative sums of innermost-first widths.
        let mut pos = Vec::with_capacity(m);
        let mut acc = 0.0;
        for wk in &half {
            acc += wk;
            pos.push(acc);
        }
        // Interior nodes exclude the boundary +-x_extent.
        let mut nodes = Vec::with_capacity(n);
        for k in (1..m).rev() {
            nodes.push(-pos[k - 1]);
        }
        nodes.push(0.0);
        for k in 1..m {
            nodes.push(pos[k - 1]);
        }
        let mut spacing = Vec::with_capacity(n + 1);
        for k in (0..m).rev() {
            spacing.push(half[k]);
        }
        for wk in half.iter().take(m) {
            spacing.push(*wk);
        }
        if spacing.iter().any(|&h| !(h.is_finite() && h > 0.0)) {
            return Err(Error::invalid(
                "grading ratio",
                format!("{ratio} produces degenerate cells at n = {n}"),
            ));
        }
        let zero_node = Some(m - 1);
        let desc = if ratio == 1.0 { "u0".to_string() } else { format!("g{ratio}") };
        Ok(Grid1D { a: -x_extent, b: x_extent, nodes, spacing, zero_node, desc })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cell widths; entry i is the cell left of node i, entry n is the
    /// rightmost cell.
    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Index of the node at exactly x = 0, when the construction placed one.
    pub fn zero_node(&self) -> Option<usize> {
        self.zero_node
    }

    /// Node coordinates including both Dirichlet endpoints.
    pub fn full_nodes(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nodes.len() + 2);
        out.push(self.a);
        out.extend_from_slice(&self.nodes);
        out.push(self.b);
        out
    }

    /// Diagonal of the discrete L2 inner product.
    pub fn lumped_mass(&self) -> Vec<f64> {
        (0..self.nodes.len())
            .map(|i| 0.5 * (self.spacing[i] + self.spacing[i + 1]))
            .collect()
    }

    /// Largest cell width among cells overlapping the open interval (lo, hi).
    pub fn max_spacing_intersecting(&self, lo: f64, hi: f64) -> f64 {
        let full = self.full_nodes();
        let mut m = 0.0f64;
        for e in 0..self.spacing.len() {
            if full[e + 1] > lo && full[e] < hi {
                m = m.max(self.spacing[e]);
            }
        }
        m
    }

    pub fn desc(&self) -> &str {
        &self.desc
    }
}

/// Tensor-product grid on [-x_extent, x_extent] x (0, d), z uniform.
#[derive(Clone, Debug)]
pub struct Grid2D {
    gx: Grid1D,
    gz: Grid1D,
    d: f64,
}

/// Build the 2-D grid used by the strip operators. `n_x` and `n_z` count
/// interior nodes and must both be at least 4; the geometric grading
/// requires an odd `n_x` and a ratio in (0, 1].
pub fn build_grid2d(x_extent: f64, n_x: usize, n_z: usize, d: f64, grading: Grading) -> Result<Grid2D> {
    if n_x < 4 {
        return Err(Error::invalid("node count", format!("n_x = {n_x}; need at least 4")));
    }
    if n_z < 4 {
        return Err(Error::invalid("node count", format!("n_z = {n_z}; need at least 4")));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid("strip width", format!("{d} must be finite and positive")));
    }
    let gx = match grading {
        Grading::Uniform => Grid1D::uniform(-x_extent, x_extent, n_x)?,
        Grading::GeometricTowardZero { ratio } => Grid1D::geometric_symmetric(x_extent, n_x, ratio)?,
    };
    let gz = Grid1D::uniform(0.0, d, n_z)?;
    Ok(Grid2D { gx, gz, d })
}

impl Grid2D {
    pub fn gx(&self) -> &Grid1D {
        &self.gx
    }

    pub fn gz(&self) -> &Grid1D {
        &self.gz
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn hz(&self) -> f64 {
        self.gz.spacing()[0]
    }

    pub fn n_unknowns(&self) -> usize {
        self.gx.n() * self.gz.n()
    }

    /// Flattened index with z fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.gz.n() + j
    }

    /// Diagonal of the 2-D discrete L2 inner product.
    pub fn lumped_mass_2d(&self) -> Vec<f64> {
        let mx = self.gx.lumped_mass();
        let hz = self.hz();
        let mut m = Vec::with_capacity(self.n_unknowns());
        for mi in &mx {
            for _ in 0..self.gz.n() {
                m.push(mi * hz);
            }
        }
        m
    }

    /// Largest scaling parameter s at which the rescaled slope, whose
    /// support shrinks like e^{-s/2}, is still resolved by at least 8
    /// cells of this grid. Infinite for unsheared profiles; -inf when even
    /// s = 0 is underresolved.
    pub fn max_admissible_s(&self, p: &Profile) -> f64 {
        if !p.is_sheared() {
            return f64::INFINITY;
        }
        let b = p.half_width();
        let admissible = |s: f64| {
            let w = b * (-0.5 * s).exp();
            self.gx.max_spacing_intersecting(-w, w) <= w / 4.0
        };
        if !admissible(0.0) {
            return f64::NEG_INFINITY;
        }
        // The center cell bounds any admissible s; scan then bisect.
        let h_min = self.gx.min_spacing();
        let cap = (2.0 * (b / (4.0 * h_min)).ln() + 1.0).clamp(1.0, 200.0);
        let ds = 0.01;
        let mut s_ok = 0.0;
        let mut s_bad = None;
        let mut s = ds;
        while s <= cap {
            if admissible(s) {
                s_ok = s;
            } else {
                s_bad = Some(s);
                break;
            }
            s += ds;
        }
        let Some(mut hi) = s_bad else {
            return s_ok;
        };
        for _ in 0..30 {
            let mid = 0.5 * (s_ok + hi);
            if admissible(mid) {
                s_ok = mid;
            } else {
                hi = mid;
            }
        }
        s_ok
    }

    /// Stable identifier for report rows and file names.
    pub fn id(&self) -> String {
        format!(
            "x{}-nx{}-{}-nz{}",
            self.gx.b(),
            self.gx.n(),
            self.gx.desc(),
            self.gz.n()
        )
    }
}

//! Discrete quadratic forms on strip grids.
//!
//! All operators are lumped-mass finite differences assembled from
//! quadrature-site rows, so each form is a sum of squares by construction:
//!
//! * the mapped Dirichlet form  ||d_x v - f' d_z v||^2 + ||d_z v||^2,
//! * the scaled family          ||d_y v - sigma_s d_z v||^2
//!                              + (1/16) ||y v||^2
//!                              + e^s (||d_z v||^2 - E1 ||v||^2),
//! * the half-line confinement operators -d^2/dy^2 + y^2/16.
//!
//! Using the *discrete* transverse ground energy E1h in the scaled family
//! keeps its e^s-block positive semidefinite on every grid; substituting
//! the continuum value (pi/d)^2 makes that block indefinite at large s.

use crate::error::{Error, Result};
use crate::geometry::{transverse_eigenvalue, Profile};
use crate::grid::{Grid1D, Grid2D};
use crate::operator::{SparseSymOp, Triplets};

/// Which transverse ground energy is subtracted in the scaled family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum E1Mode {
    /// Smallest eigenvalue of the discrete transverse stencil (grid-exact).
    Discrete,
    /// Continuum value (pi/d)^2; breaks discrete positivity at large s.
    Continuous,
}

/// Smallest eigenvalue (4/h^2) sin^2(pi h / (2 d)) of the discrete
/// transverse second difference on n_z interior nodes, h = d/(n_z + 1).
pub fn transverse_ground_discrete(d: f64, n_z: usize) -> f64 {
    let h = d / (n_z + 1) as f64;
    let s = (std::f64::consts::PI * h / (2.0 * d)).sin();
    4.0 / (h * h) * s * s
}

fn e1_value(g: &Grid2D, mode: E1Mode) -> f64 {
    match mode {
        E1Mode::Discrete => transverse_ground_discrete(g.d(), g.gz().n()),
        E1Mode::Continuous => transverse_eigenvalue(g.d(), 1).expect("grid carries a valid width"),
    }
}

/// Mixed-derivative term: one row per (x-edge, z-level) approximating
/// d_x v - sigma d_z v at the edge midpoint, weighted by the edge cell area.
/// The z-derivative is the average of the central differences at the two
/// x-endpoints of the edge (boundary endpoints contribute zero).
fn add_mixed_x_term(t: &mut Triplets, g: &Grid2D, sigma: impl Fn(f64) -> f64) {
    let gx = g.gx();
    let nx = gx.n();
    let nz = g.gz().n();
    let hz = g.hz();
    let xf = gx.full_nodes();
    let sp = gx.spacing();
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(6);
    for e in 0..=nx {
        let hx = sp[e];
        let sg = sigma(0.5 * (xf[e] + xf[e + 1]));
        let w = hx * hz;
        let inv = 1.0 / hx;
        let czp = -sg / (4.0 * hz);
        for j in 0..nz {
            row.clear();
            // x-difference across the edge; interior columns are e-1 and e.
            if e > 0 {
                row.push((g.index(e - 1, j), -inv));
            }
            if e < nx {
                row.push((g.index(e, j), inv));
            }
            if sg != 0.0 {
                for col in [e.wrapping_sub(1), e] {
                    if col < nx {
                        if j + 1 < nz {
                            row.push((g.index(col, j + 1), czp));
                        }
                        if j > 0 {
                            row.push((g.index(col, j - 1), -czp));
                        }
                    }
                }
            }
            t.add_quadratic_row(w, &row);
        }
    }
}

/// Transverse term: one row per (x-node, z-edge) approximating d_z v,
/// weighted by the node's x-mass times the z cell, scaled by `scale`.
fn add_z_term(t: &mut Triplets, g: &Grid2D, scale: f64) {
    let nz = g.gz().n();
    let hz = g.hz();
    let mx = g.gx().lumped_mass();
    let inv = 1.0 / hz;
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(2);
    for (i, mi) in mx.iter().enumerate() {
        let w = scale * mi * hz;
        for ez in 0..=nz {
            row.clear();
            if ez > 0 {
                row.push((g.index(i, ez - 1), -inv));
            }
            if ez < nz {
                row.push((g.index(i, ez), inv));
            }
            t.add_quadratic_row(w, &row);
        }
    }
}

/// Mapped Dirichlet form of the sheared strip on this grid.
pub fn assemble_h(g: &Grid2D, p: &Profile) -> SparseSymOp {
    let mut t = Triplets::new(g.n_unknowns());
    add_mixed_x_term(&mut t, g, |x| p.fprime(x));
    add_z_term(&mut t, g, 1.0);
    t.into_operator(g.lumped_mass_2d())
}

/// Mapped form with the discrete transverse ground energy removed:
/// H - E1h M. Nonnegative on every grid by construction.
pub fn assemble_h_minus_e1(g: &Grid2D, p: &Profile) -> SparseSymOp {
    let e1 = transverse_ground_discrete(g.d(), g.gz().n());
    let m = g.lumped_mass_2d();
    let mut t = Triplets::new(g.n_unknowns());
    add_mixed_x_term(&mut t, g, |x| p.fprime(x));
    add_z_term(&mut t, g, 1.0);
    for (idx, mi) in m.iter().enumerate() {
        t.add_diag(idx, -e1 * mi);
    }
    t.into_operator(m)
}

/// Diagonal weight matrix with entries rho(x_i)^2 * (quadrature weight).
pub fn assemble_rho_mass(g: &Grid2D) -> SparseSymOp {
    let m = g.lumped_mass_2d();
    let nx = g.gx().n();
    let nz = g.gz().n();
    let nodes = g.gx().nodes();
    let mut t = Triplets::new(g.n_unknowns());
    for i in 0..nx {
        let r = crate::geometry::weight_rho(nodes[i]);
        let r2 = r * r;
        for j in 0..nz {
            let idx = g.index(i, j);
            t.add_diag(idx, r2 * m[idx]);
        }
    }
    t.into_operator(m)
}

/// The e^s-scaled transverse block e^s (||d_z v||^2 - E1 ||v||^2) alone.
pub fn assemble_es_block(g: &Grid2D, s: f64, mode: E1Mode) -> SparseSymOp {
    let es = s.exp();
    let e1 = e1_value(g, mode);
    let m = g.lumped_mass_2d();
    let mut t = Triplets::new(g.n_unknowns());
    add_z_term(&mut t, g, es);
    for (idx, mi) in m.iter().enumerate() {
        t.add_diag(idx, -es * e1 * mi);
    }
    t.into_operator(m)
}

/// Scaled self-similar form at parameter s. Fails when the rescaled slope
/// sigma_s(y) = e^{s/2} f'(e^{s/2} y) oscillates below this grid's local
/// resolution.
pub fn assemble_ts(g: &Grid2D, p: &Profile, s: f64, mode: E1Mode) -> Result<SparseSymOp> {
    if !s.is_finite() {
        return Err(Error::invalid("scaling parameter", format!("s = {s} is not finite")));
    }
    let s_max = g.max_admissible_s(p);
    if s > s_max {
        return Err(Error::SigmaUnderresolved { s, s_max });
    }
    let es = s.exp();
    let es2 = (0.5 * s).exp();
    let e1 = e1_value(g, mode);
    let m = g.lumped_mass_2d();
    let nodes = g.gx().nodes();
    let nz = g.gz().n();
    let mut t = Triplets::new(g.n_unknowns());
    add_mixed_x_term(&mut t, g, |y| es2 * p.fprime(es2 * y));
    add_z_term(&mut t, g, es);
    for (i, &y) in nodes.iter().enumerate() {
        let pot = y * y / 16.0;
        for j in 0..nz {
            let idx = g.index(i, j);
            t.add_diag(idx, (pot - es * e1) * m[idx]);
        }
    }
    Ok(t.into_operator(m))
}

/// Confinement operator -d^2/dy^2 + y^2/16 on the grid's interval with
/// Dirichlet ends; optionally with an additional Dirichlet condition at
/// the center node y = 0 (whose row and column are removed). The paired
/// mass is the lumped mass of the surviving nodes.
pub fn assemble_oscillator(gx: &Grid1D, dirichlet_at_zero: bool) -> Result<SparseSymOp> {
    let n = gx.n();
    let removed = if dirichlet_at_zero {
        match gx.zero_node() {
            Some(i) => Some(i),
            None => {
                return Err(Error::invalid(
                    "oscillator grid",
                    "a Dirichlet condition at y = 0 needs a node exactly at 0".to_string(),
                ))
            }
        }
    } else {
        None
    };
    // Remap original node index -> reduced index (None = eliminated).
    let map: Vec<Option<usize>> = {
        let mut m = Vec::with_capacity(n);
        let mut next = 0usize;
        for i in 0..n {
            if Some(i) == removed {
                m.push(None);
            } else {
                m.push(Some(next));
                next += 1;
            }
        }
        m
    };
    let dim = if removed.is_some() { n - 1 } else { n };
    let sp = gx.spacing();
    let mass_full = gx.lumped_mass();
    let nodes = gx.nodes();
    let mut t = Triplets::new(dim);
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(2);
    for e in 0..=n {
        let h = sp[e];
        let inv = 1.0 / h;
        row.clear();
        if e > 0 {
            if let Some(k) = map[e - 1] {
                row.push((k, -inv));
            }
        }
        if e < n {
            if let Some(k) = map[e] {
                row.push((k, inv));
            }
        }
        t.add_quadratic_row(h, &row);
    }
    let mut mass = Vec::with_capacity(dim);
    for i in 0..n {
        if let Some(k) = map[i] {
            let y = nodes[i];
            t.add_diag(k, y * y / 16.0 * mass_full[i]);
            mass.push(mass_full[i]);
        }
    }
    Ok(t.into_operator(mass))
}

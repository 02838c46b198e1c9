//! Boundary profiles, the shear map and its induced metric, transverse
//! modes of the cross-section, and the confinement/decay weights.
//!
//! A profile describes how a straight strip of width `d` is sheared in the
//! longitudinal direction: the map (x, z) -> (x, f(x) + z) tilts each
//! vertical fiber by f(x). Only the slope f' enters the quadratic forms;
//! f itself is recovered by integration with f(-inf) = 0.

use crate::error::{Error, Result};
use std::f64::consts::{E, PI};

/// Default strip width used throughout the experiments.
pub const DEFAULT_STRIP_WIDTH: f64 = PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    /// No shear: f' = 0 everywhere.
    Straight,
    /// Smooth compactly supported slope a * exp(1 / ((x/b)^2 - 1)) on |x| < b.
    SmoothBump,
    /// Piecewise-constant slope: +a on (-b, 0), -a on (0, b).
    Tent,
}

/// A shear profile together with the strip width.
#[derive(Clone, Debug)]
pub struct Profile {
    kind: ProfileKind,
    amplitude: f64,
    half_width: f64,
    d: f64,
}

impl Profile {
    pub fn new(kind: ProfileKind, amplitude: f64, half_width: f64, d: f64) -> Result<Profile> {
        if !amplitude.is_finite() {
            return Err(Error::invalid("profile amplitude", format!("{amplitude} is not finite")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid(
                "profile half-width",
                format!("{half_width} must be finite and positive"),
            ));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::invalid(
                "strip width",
                format!("{d} must be finite and positive"),
            ));
        }
        Ok(Profile { kind, amplitude, half_width, d })
    }

    pub fn straight(d: f64) -> Result<Profile> {
        Profile::new(ProfileKind::Straight, 0.0, 1.0, d)
    }

    pub fn smooth_bump(amplitude: f64, half_width: f64, d: f64) -> Result<Profile> {
        Profile::new(ProfileKind::SmoothBump, amplitude, half_width, d)
    }

    pub fn tent(amplitude: f64, half_width: f64, d: f64) -> Result<Profile> {
        Profile::new(ProfileKind::Tent, amplitude, half_width, d)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Strip width.
    pub fn d(&self) -> f64 {
        self.d
    }

    /// Whether the profile actually shears the strip.
    pub fn is_sheared(&self) -> bool {
        self.kind != ProfileKind::Straight && self.amplitude != 0.0
    }

    /// Slope f'(x). Returns exactly 0.0 outside [-half_width, half_width].
    pub fn fprime(&self, x: f64) -> f64 {
        let b = self.half_width;
        match self.kind {
            ProfileKind::Straight => 0.0,
            ProfileKind::SmoothBump => self.amplitude * bump_kernel(x / b),
            ProfileKind::Tent => {
                if x > -b && x < 0.0 {
                    self.amplitude
                } else if x > 0.0 && x < b {
                    -self.amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// Displacement f(x) = integral of f' from -inf, so f = 0 left of the support.
    pub fn f(&self, x: f64) -> f64 {
        let b = self.half_width;
        match self.kind {
            ProfileKind::Straight => 0.0,
            ProfileKind::Tent => {
                if x <= -b || x >= b {
                    0.0
                } else {
                    self.amplitude * (b - x.abs())
                }
            }
            ProfileKind::SmoothBump => {
                if x <= -b {
                    0.0
                } else {
                    let upper = (x / b).min(1.0);
                    self.amplitude * b * adaptive_simpson(bump_kernel, -1.0, upper, 1e-13, 40)
                }
            }
        }
    }

    /// Closed-form sup |f'|.
    pub fn sup_fprime(&self) -> f64 {
        match self.kind {
            ProfileKind::Straight => 0.0,
            // The kernel peaks at x = 0 with value e^{-1}.
            ProfileKind::SmoothBump => self.amplitude.abs() / E,
            ProfileKind::Tent => self.amplitude.abs(),
        }
    }

    /// Support of f' when the profile is sheared.
    pub fn fprime_support(&self) -> Option<(f64, f64)> {
        if self.is_sheared() {
            Some((-self.half_width, self.half_width))
        } else {
            None
        }
    }

    /// Stable identifier for file names and report rows.
    pub fn id(&self) -> String {
        match self.kind {
            ProfileKind::Straight => format!("straight-d{:.6}", self.d),
            ProfileKind::SmoothBump => format!(
                "bump-a{}-b{}-d{:.6}",
                self.amplitude, self.half_width, self.d
            ),
            ProfileKind::Tent => format!(
                "tent-a{}-b{}-d{:.6}",
                self.amplitude, self.half_width, self.d
            ),
        }
    }
}

/// exp(1/(t^2 - 1)) on |t| < 1, identically 0 outside (smooth across t = ±1).
pub(crate) fn bump_kernel(t: f64) -> f64 {
    if t > -1.0 && t < 1.0 {
        (1.0 / (t * t - 1.0)).exp()
    } else {
        0.0
    }
}

/// (f(x), f'(x)) in one call.
pub fn eval_profile(p: &Profile, x: f64) -> (f64, f64) {
    (p.f(x), p.fprime(x))
}

/// The shear map (x, z) -> (x, f(x) + z); z must lie in [0, d].
pub fn shear_map(p: &Profile, x: f64, z: f64) -> Result<(f64, f64)> {
    if !(0.0..=p.d).contains(&z) {
        return Err(Error::invalid(
            "shear map input",
            format!("z = {z} outside the strip [0, {}]", p.d),
        ));
    }
    Ok((x, p.f(x) + z))
}

/// Pullback metric of the shear map: [[1 + f'^2, f'], [f', 1]].
/// Its determinant is identically 1 (the map is volume preserving).
pub fn metric(p: &Profile, x: f64) -> [[f64; 2]; 2] {
    let fp = p.fprime(x);
    [[1.0 + fp * fp, fp], [fp, 1.0]]
}

/// n-th Dirichlet eigenvalue (n pi / d)^2 of the cross-section, n >= 1.
pub fn transverse_eigenvalue(d: f64, n: u32) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid("strip width", format!("{d} must be finite and positive")));
    }
    if n < 1 {
        return Err(Error::invalid("transverse index", "n must be >= 1".to_string()));
    }
    let k = f64::from(n) * PI / d;
    Ok(k * k)
}

/// L2-normalized n-th Dirichlet mode sqrt(2/d) sin(n pi z / d); z must lie in [0, d].
pub fn transverse_mode(d: f64, n: u32, z: f64) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid("strip width", format!("{d} must be finite and positive")));
    }
    if n < 1 {
        return Err(Error::invalid("transverse index", "n must be >= 1".to_string()));
    }
    if !(0.0..=d).contains(&z) {
        return Err(Error::invalid(
            "transverse coordinate",
            format!("z = {z} outside [0, {d}]"),
        ));
    }
    Ok((2.0 / d).sqrt() * (f64::from(n) * PI * z / d).sin())
}

/// Gaussian confinement weight K(x) = exp(x^2 / 4); K >= 1, K(0) = 1.
pub fn weight_k(x: f64) -> f64 {
    (x * x / 4.0).exp()
}

/// Decay weight rho(x) = (1 + x^2)^{-1/2}; rho in (0, 1], rho(0) = 1.
pub fn weight_rho(x: f64) -> f64 {
    1.0 / (1.0 + x * x).sqrt()
}

/// Classic adaptive Simpson quadrature with an absolute tolerance.
fn adaptive_simpson(g: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        g: impl Fn(f64) -> f64 + Copy,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = g(lm);
        let frm = g(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            recurse(g, a, fa, m, fm, flm, left, 0.5 * eps, depth - 1)
                + recurse(g, m, fm, b, fb, frm, right, 0.5 * eps, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = g(a);
    let fb = g(b);
    let fm = g(0.5 * (a + b));
    let whole = simpson(a, fa, b, fb, fm);
    recurse(g, a, fa, b, fb, fm, whole, eps, depth)
}

//! Decay-rate extraction from recorded norm traces, and the spectral
//! envelope obtained by integrating the ground curve of the scaled family.
//!
//! The measured compensated norm is modeled as
//!     ||u(t)|| * e^{E1h t} ~ c * ||u0||_K * (1 + t)^{-gamma},
//! so an affine fit of log(norm / ||u0||_K) against log(1 + t) yields
//! gamma as minus the slope. The envelope counterpart integrates mu:
//!     bound(t) = exp( - int_0^{log(1+t)} mu(s) ds ).

use crate::eigen::MuCurve;
use crate::error::{Error, Result};
use crate::evolve::NormTrace;
use crate::tolerances::FIT_MIN_SAMPLES;

/// Power-law fit of a decay trace over a time window.
#[derive(Clone, Debug)]
pub struct DecayFit {
    /// Decay exponent (minus the fitted slope in log-log variables).
    pub gamma_hat: f64,
    /// Fitted prefactor of (1 + t)^{-gamma} relative to ||u0||_K.
    pub c_hat: f64,
    pub window: (f64, f64),
    /// Root-mean-square residual of the affine fit in log variables.
    pub rms_residual: f64,
}

/// Least-squares power-law fit over samples with t_min <= t <= t_max.
pub fn fit_decay(trace: &NormTrace, t_min: f64, t_max: f64) -> Result<DecayFit> {
    if !(t_min.is_finite() && t_max.is_finite() && t_min >= 0.0 && t_max > t_min) {
        return Err(Error::FitWindow(format!("[{t_min}, {t_max}] is not a proper window")));
    }
    if !(trace.initial_weighted_norm.is_finite() && trace.initial_weighted_norm > 0.0) {
        return Err(Error::FitWindow("initial weighted norm must be positive".to_string()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &nrm) in trace.times.iter().zip(&trace.shifted_norms) {
        if t < t_min || t > t_max {
            continue;
        }
        if !(nrm.is_finite() && nrm > 0.0) {
            return Err(Error::FitWindow(format!("nonpositive norm {nrm} at t = {t}")));
        }
        xs.push((1.0 + t).ln());
        ys.push((nrm / trace.initial_weighted_norm).ln());
    }
    if xs.len() < FIT_MIN_SAMPLES {
        return Err(Error::FitWindow(format!(
            "{} samples in [{t_min}, {t_max}]; need at least {FIT_MIN_SAMPLES}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return Err(Error::FitWindow("window collapses to a single abscissa".to_string()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (intercept + slope * x);
        ss += r * r;
    }
    Ok(DecayFit {
        gamma_hat: -slope,
        c_hat: intercept.exp(),
        window: (t_min, t_max),
        rms_residual: (ss / n).sqrt(),
    })
}

/// Envelope exp(-int_0^{log(1+t)} mu) evaluated at each requested time.
/// The curve must start at s = 0 and reach log(1 + t) for every t;
/// extrapolation is refused.
pub fn mu_integral_bound(curve: &MuCurve, times: &[f64]) -> Result<Vec<f64>> {
    let s = &curve.s_values;
    let m = &curve.mu_values;
    if s.len() < 2 {
        return Err(Error::invalid("bound curve", "needs at least two points".to_string()));
    }
    if s[0] > 1e-9 {
        return Err(Error::invalid(
            "bound curve",
            format!("must start at s = 0 to cover t = 0 (starts at {})", s[0]),
        ));
    }
    let s_last = *s.last().expect("nonempty");
    // Cumulative trapezoid of mu over the curve knots.
    let mut acc = Vec::with_capacity(s.len());
    acc.push(0.0);
    for k in 1..s.len() {
        let a = acc[k - 1] + 0.5 * (m[k] + m[k - 1]) * (s[k] - s[k - 1]);
        acc.push(a);
    }
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid("bound times", format!("t = {t} must be nonnegative")));
        }
        let st = t.ln_1p();
        if st > s_last + 1e-9 {
            return Err(Error::CurveExtrapolation { requested: st, max_s: s_last });
        }
        let st = st.min(s_last);
        // Locate the segment containing st.
        let k = match s.binary_search_by(|v| v.partial_cmp(&st).expect("finite s")) {
            Ok(k) => k.saturating_sub(1).min(s.len() - 2),
            Err(k) => k.saturating_sub(1).min(s.len() - 2),
        };
        let ds = st - s[k];
        let slope = (m[k + 1] - m[k]) / (s[k + 1] - s[k]);
        let integral = acc[k] + ds * (m[k] + 0.5 * slope * ds);
        out.push((-integral).exp());
    }
    Ok(out)
}

/// Decay exponent certified by the curve: min(mu) - 1/4. For nondecreasing
/// curves the minimum sits at the first point.
pub fn gamma_inf(curve: &MuCurve) -> f64 {
    curve.min_value() - 0.25
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::FIT_SYNTH_TOL;
    use proptest::prelude::*;

    fn synthetic_trace(gamma: f64, c: f64, u0k: f64, n: usize, t_max: f64) -> NormTrace {
        let times: Vec<f64> = (0..n).map(|k| k as f64 * t_max / (n - 1) as f64).collect();
        let shifted_norms: Vec<f64> =
            times.iter().map(|&t| c * u0k * (1.0 + t).powf(-gamma)).collect();
        NormTrace { times, shifted_norms, initial_weighted_norm: u0k }
    }

    fn flat_curve(mu0: f64, s_max: f64) -> MuCurve {
        MuCurve {
            s_values: vec![0.0, 0.5 * s_max, s_max],
            mu_values: vec![mu0; 3],
            residuals: vec![0.0; 3],
            iterations: vec![0; 3],
            s_max_admissible: f64::INFINITY,
            grid_id: "synthetic".to_string(),
        }
    }

    #[test]
    fn quarter_power_law_is_recovered_exactly() {
        let tr = synthetic_trace(0.25, 1.0, 2.0, 60, 40.0);
        let fit = fit_decay(&tr, 0.0, 40.0).unwrap();
        println!("gamma_hat = {:.15}, c_hat = {:.15}", fit.gamma_hat, fit.c_hat);
        assert!((fit.gamma_hat - 0.25).abs() < FIT_SYNTH_TOL);
        assert!((fit.c_hat - 1.0).abs() < FIT_SYNTH_TOL);
        assert!(fit.rms_residual < FIT_SYNTH_TOL);
        assert_eq!(fit.window, (0.0, 40.0));
    }

    #[test]
    fn window_subselection_counts_samples() {
        let tr = synthetic_trace(0.5, 2.0, 3.0, 200, 50.0);
        let fit = fit_decay(&tr, 5.0, 50.0).unwrap();
        assert!((fit.gamma_hat - 0.5).abs() < FIT_SYNTH_TOL);
        assert!((fit.c_hat - 2.0).abs() < 1e-9);
        // Too narrow a window: fewer than the minimum sample count.
        let err = fit_decay(&tr, 5.0, 6.0).err().unwrap();
        assert!(err.to_string().contains("samples"));
        // Degenerate windows are rejected outright.
        assert!(fit_decay(&tr, 7.0, 7.0).is_err());
        assert!(fit_decay(&tr, 10.0, 5.0).is_err());
        assert!(fit_decay(&tr, -1.0, 5.0).is_err());
    }

    #[test]
    fn flat_curves_give_closed_form_envelopes() {
        let times: Vec<f64> = (0..30).map(|k| k as f64).collect();
        // mu == 1/4: envelope (1+t)^(-1/4).
        let b = mu_integral_bound(&flat_curve(0.25, 30.0f64.ln_1p() + 0.1), &times).unwrap();
        for (&t, &bt) in times.iter().zip(&b) {
            assert!((bt - (1.0 + t).powf(-0.25)).abs() < 1e-12, "t = {t}");
        }
        // mu == 1: envelope (1+t)^(-1).
        let b = mu_integral_bound(&flat_curve(1.0, 30.0f64.ln_1p() + 0.1), &times).unwrap();
        for (&t, &bt) in times.iter().zip(&b) {
            assert!((bt - 1.0 / (1.0 + t)).abs() < 1e-12);
        }
    }

    #[test]
    fn piecewise_curve_integrates_by_trapezoid() {
        // mu rising linearly 0.25 -> 0.75 over s in [0, 2] has slope 1/4,
        // so the integral to s is 0.25 s + s^2/8 on that leg.
        let curve = MuCurve {
            s_values: vec![0.0, 2.0, 3.0],
            mu_values: vec![0.25, 0.75, 0.75],
            residuals: vec![0.0; 3],
            iterations: vec![0; 3],
            s_max_admissible: f64::INFINITY,
            grid_id: "synthetic".to_string(),
        };
        let t = (1.5f64).exp() - 1.0; // s = 1.5, inside the first leg
        let b = mu_integral_bound(&curve, &[t]).unwrap()[0];
        let exact = (-(0.25f64 * 1.5 + 1.5 * 1.5 / 8.0)).exp();
        assert!((b - exact).abs() < 1e-12);
        // Knot hit: s = 2 exactly.
        let t2 = (2.0f64).exp() - 1.0;
        let b2 = mu_integral_bound(&curve, &[t2]).unwrap()[0];
        assert!((b2 - (-(0.25f64 * 2.0 + 4.0 / 8.0)).exp()).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_is_refused() {
        let curve = flat_curve(0.25, 1.0);
        let t_over = (1.2f64).exp() - 1.0;
        match mu_integral_bound(&curve, &[t_over]) {
            Err(Error::CurveExtrapolation { requested, max_s }) => {
                assert!((requested - 1.2).abs() < 1e-9);
                assert!((max_s - 1.0).abs() < 1e-12);
            }
            other => panic!("expected extrapolation rejection, got {other:?}"),
        }
        // A curve starting past 0 cannot produce an envelope at all.
        let late = MuCurve {
            s_values: vec![0.5, 1.0],
            mu_values: vec![0.25, 0.25],
            residuals: vec![0.0; 2],
            iterations: vec![0; 2],
            s_max_admissible: f64::INFINITY,
            grid_id: "synthetic".to_string(),
        };
        assert!(mu_integral_bound(&late, &[0.1]).is_err());
    }

    #[test]
    fn certified_exponent_is_the_curve_minimum_offset() {
        assert!((gamma_inf(&flat_curve(0.25, 2.0)) - 0.0).abs() < 1e-15);
        assert!((gamma_inf(&flat_curve(0.75, 2.0)) - 0.5).abs() < 1e-15);
        let mixed = MuCurve {
            s_values: vec![0.0, 1.0, 2.0],
            mu_values: vec![0.30, 0.27, 0.60],
            residuals: vec![0.0; 3],
            iterations: vec![0; 3],
            s_max_admissible: f64::INFINITY,
            grid_id: "synthetic".to_string(),
        };
        assert!((gamma_inf(&mixed) - 0.02).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn synthetic_rates_are_recovered(
            gamma in 0.05f64..1.5,
            c in 0.1f64..10.0,
            u0k in 0.1f64..10.0,
        ) {
            let tr = synthetic_trace(gamma, c, u0k, 80, 60.0);
            let fit = fit_decay(&tr, 0.0, 60.0).unwrap();
            prop_assert!((fit.gamma_hat - gamma).abs() < 1e-8);
            prop_assert!((fit.c_hat - c).abs() / c < 1e-8);
        }

        #[test]
        fn envelope_is_monotone_for_positive_curves(
            mu0 in 0.05f64..1.0,
            t in 0.0f64..20.0,
        ) {
            let curve = flat_curve(mu0, 21.0f64.ln() + 0.5);
            let b = mu_integral_bound(&curve, &[t, t + 0.5]).unwrap();
            prop_assert!(b[1] < b[0]);
            prop_assert!(b[0] <= 1.0 + 1e-12);
        }
    }
}

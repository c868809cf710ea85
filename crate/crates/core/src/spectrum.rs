//! Frozen two-point spectra at `t_f` and their log-log index fits.

use serde::Serialize;

use crate::analytic::tau_of_t;
use crate::dynamics::ModeTrajectory;
use crate::model::{predicted_indices, PredictedIndices, SweepScenario};
use crate::{Error, Result};

pub const DEFAULT_EPS_FROZEN: f64 = 0.1;
pub const DEFAULT_EPS_ADIAB: f64 = 10.0;
pub const MIN_FIT_POINTS: usize = 8;

/// Power-law fit `p ∝ k^index` over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub index: f64,
    pub stderr: f64,
    /// `ln p` at `ln k = 0`
    pub intercept: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedIndices {
    pub phi: PowerLawFit,
    pub pi: PowerLawFit,
    pub grad: PowerLawFit,
}

/// Wavenumbers `k_lo < k < k_hi` that were adiabatic at `t_in` and are
/// frozen at `t_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitWindow {
    pub k_lo: f64,
    pub k_hi: f64,
}

impl FitWindow {
    pub fn contains(&self, k: f64) -> bool {
        k > self.k_lo && k < self.k_hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub t_f: f64,
    pub k_values: Vec<f64>,
    /// `|Φ_k|²`
    pub p_phi: Vec<f64>,
    /// `|Π_k|²`
    pub p_pi: Vec<f64>,
    /// `k²|Φ_k|²`
    pub p_grad: Vec<f64>,
    pub predicted: PredictedIndices,
    pub fit_window: Option<FitWindow>,
    pub fitted: Option<FittedIndices>,
}

/// Collect the final-state powers of every trajectory, sorted by `k`.
pub fn assemble(trajectories: &[ModeTrajectory], s: &SweepScenario) -> Result<SpectrumReport> {
    let predicted = predicted_indices(s.a(), s.b())?;
    let mut finals: Vec<_> = trajectories.iter().map(|tr| *tr.last()).collect();
    if let Some(first) = finals.first() {
        if let Some(other) = finals.iter().find(|m| m.t != first.t) {
            return Err(Error::InconsistentEndTimes(first.t, other.t));
        }
    }
    finals.sort_by(|x, y| x.k.total_cmp(&y.k));
    let t_f = finals.first().map_or(s.t_f(), |m| m.t);
    let k_values: Vec<f64> = finals.iter().map(|m| m.k).collect();
    let p_phi: Vec<f64> = finals.iter().map(|m| m.phi.norm_sqr()).collect();
    let p_pi = finals.iter().map(|m| m.pi.norm_sqr()).collect();
    let p_grad = k_values.iter().zip(&p_phi).map(|(k, p)| k * k * p).collect();
    Ok(SpectrumReport {
        t_f,
        k_values,
        p_phi,
        p_pi,
        p_grad,
        predicted,
        fit_window: None,
        fitted: None,
    })
}

impl SpectrumReport {
    pub fn in_window(&self) -> Vec<bool> {
        self.k_values
            .iter()
            .map(|&k| self.fit_window.is_some_and(|w| w.contains(k)))
            .collect()
    }

    /// Fit all three spectra over `window` and store the results.
    pub fn fit(&mut self, window: FitWindow) -> Result<&FittedIndices> {
        let phi = fit_power_law(&self.k_values, &self.p_phi, window)?;
        let pi = fit_power_law(&self.k_values, &self.p_pi, window)?;
        let grad = fit_power_law(&self.k_values, &self.p_grad, window)?;
        self.fit_window = Some(window);
        Ok(self.fitted.insert(FittedIndices { phi, pi, grad }))
    }
}

/// Window of modes with `k|τ(t_f)| < eps_frozen` and `k|τ(t_in)| > eps_adiab`.
/// Fails when the bounds cross or when no grid point falls between them.
pub fn fit_mask(s: &SweepScenario, eps_frozen: f64, eps_adiab: f64) -> Result<FitWindow> {
    if !(eps_frozen > 0.0 && eps_frozen < 1.0 && eps_adiab > 1.0 && eps_adiab.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < eps_frozen < 1 < eps_adiab, got {eps_frozen} and {eps_adiab}"
        )));
    }
    let tau_in = tau_of_t(s, s.t_in())?.abs();
    let tau_f = tau_of_t(s, s.t_f())?.abs();
    let window = FitWindow { k_lo: eps_adiab / tau_in, k_hi: eps_frozen / tau_f };
    if window.k_lo >= window.k_hi {
        return Err(Error::EmptyWindow(format!(
            "frozen bound k < {:.6e} (k|τ(t_f)| < {eps_frozen}) lies below adiabatic bound k > {:.6e} \
             (k|τ(t_in)| > {eps_adiab}); move t_f closer to 0 or t_in further away",
            window.k_hi, window.k_lo
        )));
    }
    let grid = s.k_grid();
    if !grid.iter().any(|&k| window.contains(k)) {
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        let which = if hi <= window.k_lo {
            format!("every grid k ≤ {hi:.6e} fails the adiabatic bound k > {:.6e}", window.k_lo)
        } else if lo >= window.k_hi {
            format!("every grid k ≥ {lo:.6e} fails the frozen bound k < {:.6e}", window.k_hi)
        } else {
            format!("no grid point between {:.6e} and {:.6e}", window.k_lo, window.k_hi)
        };
        return Err(Error::EmptyWindow(which));
    }
    Ok(window)
}

/// Ordinary least squares of `ln p` against `ln k` for `k` inside `window`.
pub fn fit_power_law(k: &[f64], p: &[f64], window: FitWindow) -> Result<PowerLawFit> {
    if k.len() != p.len() {
        return Err(Error::DegenerateFit(format!("{} wavenumbers but {} powers", k.len(), p.len())));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&ki, &pi) in k.iter().zip(p) {
        if !window.contains(ki) {
            continue;
        }
        if !(pi > 0.0 && pi.is_finite()) {
            return Err(Error::NonPositivePower { k: ki, value: pi });
        }
        xs.push(ki.ln());
        ys.push(pi.ln());
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "{n} points in ({:.6e}, {:.6e}), need at least {MIN_FIT_POINTS}",
            window.k_lo, window.k_hi
        )));
    }
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("all wavenumbers in the window coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(PowerLawFit { index: slope, stderr, intercept, points: n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyRecord {
    pub k: f64,
    /// `|Φ||Π|`
    pub dq_dp: f64,
    /// `|Φ|²|Π|² − Re(ΦΠ*)²`
    pub rs_invariant: f64,
}

/// Quadrature uncertainty product and Robertson–Schrödinger invariant of
/// each trajectory's final state.
pub fn uncertainty_products(trajectories: &[ModeTrajectory]) -> Vec<UncertaintyRecord> {
    trajectories
        .iter()
        .map(|tr| {
            let m = tr.last();
            UncertaintyRecord {
                k: m.k,
                dq_dp: m.uncertainty_product(),
                rs_invariant: m.robertson_schrodinger(),
            }
        })
        .collect()
}

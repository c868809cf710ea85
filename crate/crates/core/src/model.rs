//! Sweep scenarios and everything that follows from the exponents alone:
//! transition case, predicted spectral exponents, effective metric and
//! horizon geometry.
//!
//! Time convention: the critical point sits at `t = 0` and every sweep ends
//! strictly before it, `t_in < t_f < 0`. Coefficients are
//! `α(t) = α₀|t|^a`, `β(t) = β₀|t|^b`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::{Error, Result};

/// Exponents closer to zero than this are treated as zero when classifying.
pub const EXPONENT_ZERO_TOL: f64 = 1e-12;

pub const DEFAULT_T_IN: f64 = -10.0;
pub const DEFAULT_T_F: f64 = -1e-3;
pub const DEFAULT_K_MIN: f64 = 0.05;
pub const DEFAULT_K_MAX: f64 = 50.0;
pub const DEFAULT_POINTS_PER_DECADE: u32 = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepScenario {
    alpha0: f64,
    a: f64,
    beta0: f64,
    b: f64,
    t_in: f64,
    t_f: f64,
    k_grid: Vec<f64>,
}

impl SweepScenario {
    pub fn new(
        alpha0: f64,
        a: f64,
        beta0: f64,
        b: f64,
        t_in: f64,
        t_f: f64,
        k_grid: Vec<f64>,
    ) -> Result<Self> {
        let s = Self { alpha0, a, beta0, b, t_in, t_f, k_grid };
        match s.violations().into_iter().next() {
            Some(first) => Err(Error::InvalidParameter(first)),
            None => Ok(s),
        }
    }

    /// The violations [`SweepScenario::new`] would find, all of them.
    pub fn diagnose(alpha0: f64, a: f64, beta0: f64, b: f64, t_in: f64, t_f: f64, k_grid: &[f64]) -> Vec<String> {
        Self { alpha0, a, beta0, b, t_in, t_f, k_grid: k_grid.to_vec() }.violations()
    }

    /// Every violated invariant, as human-readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.alpha0.is_finite() && self.alpha0 > 0.0) {
            out.push(format!("alpha0 must be positive and finite, got {}", self.alpha0));
        }
        if !(self.beta0.is_finite() && self.beta0 > 0.0) {
            out.push(format!("beta0 must be positive and finite, got {}", self.beta0));
        }
        if !self.a.is_finite() || !self.b.is_finite() {
            out.push(format!("exponents must be finite, got a = {}, b = {}", self.a, self.b));
        } else if 2.0 + self.a + self.b <= 0.0 {
            out.push(format!("2+a+b ≤ 0 (got {}); conformal time does not exist", 2.0 + self.a + self.b));
        }
        if !self.t_in.is_finite() || !self.t_f.is_finite() {
            out.push("sweep times must be finite".to_string());
        } else {
            if self.t_f >= 0.0 {
                out.push("sweep must end strictly before the critical point (t_f < 0)".to_string());
            }
            if self.t_in >= self.t_f {
                out.push(format!("t_in = {} must be earlier than t_f = {}", self.t_in, self.t_f));
            }
        }
        if self.k_grid.is_empty() {
            out.push("k grid is empty".to_string());
        } else if self.k_grid.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            out.push("k grid entries must be positive and finite".to_string());
        } else if self.k_grid.windows(2).any(|w| w[1] <= w[0]) {
            out.push("k grid must be strictly increasing".to_string());
        }
        out
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn beta0(&self) -> f64 {
        self.beta0
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn t_in(&self) -> f64 {
        self.t_in
    }
    pub fn t_f(&self) -> f64 {
        self.t_f
    }
    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }

    pub fn with_k_grid(mut self, k_grid: Vec<f64>) -> Result<Self> {
        self.k_grid = k_grid;
        Self::new(self.alpha0, self.a, self.beta0, self.b, self.t_in, self.t_f, self.k_grid)
    }

    pub fn with_interval(self, t_in: f64, t_f: f64) -> Result<Self> {
        Self::new(self.alpha0, self.a, self.beta0, self.b, t_in, t_f, self.k_grid)
    }

    /// The scenario with the roles of `α` and `β` exchanged; its field is
    /// the conjugate momentum of this one.
    pub fn dual(&self) -> Self {
        Self {
            alpha0: self.beta0,
            a: self.b,
            beta0: self.alpha0,
            b: self.a,
            ..self.clone()
        }
    }

    pub fn alpha(&self, t: f64) -> f64 {
        self.alpha0 * t.abs().powf(self.a)
    }

    pub fn beta(&self, t: f64) -> f64 {
        self.beta0 * t.abs().powf(self.b)
    }

    /// `c(t) = √(α β)`.
    pub fn sound_speed(&self, t: f64) -> f64 {
        (self.alpha0 * self.beta0).sqrt() * t.abs().powf(0.5 * (self.a + self.b))
    }

    /// Instantaneous mode frequency `ω = k c(t)`.
    pub fn omega(&self, k: f64, t: f64) -> f64 {
        k * self.sound_speed(t)
    }

    /// `(g_tt, g_rr) = (√(α β³), √(β/α))`.
    pub fn effective_metric(&self, t: f64) -> (f64, f64) {
        let alpha = self.alpha(t);
        let beta = self.beta(t);
        ((alpha * beta.powi(3)).sqrt(), (beta / alpha).sqrt())
    }

    /// `s = (2 + a + b)/2`, the power of `|t|` in the conformal time.
    pub fn conformal_exponent(&self) -> f64 {
        0.5 * (2.0 + self.a + self.b)
    }

    pub fn case(&self) -> TransitionCase {
        TransitionCase::classify(self.a, self.b)
    }

    pub fn nu(&self) -> Result<f64> {
        predicted_nu(self.a, self.b)
    }

    /// Comoving distance `∫ c dt` travelled between `t_start` and `t_end`,
    /// in closed form.
    pub fn horizon_distance(&self, t_start: f64, t_end: f64) -> Result<f64> {
        if !(t_start.is_finite() && t_end.is_finite()) || t_start < self.t_in || t_start >= t_end || t_end > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "horizon interval [{t_start}, {t_end}] must satisfy t_in ≤ t_start < t_end ≤ 0"
            )));
        }
        let s = self.conformal_exponent();
        let amp = (self.alpha0 * self.beta0).sqrt() / s;
        Ok(amp * (t_start.abs().powf(s) - t_end.abs().powf(s)))
    }

    /// Time at which a mode of (reduced) wavelength `λ` leaves the horizon,
    /// i.e. `∫_{t*}^0 c dt = λ`. `None` unless the crossing happens strictly
    /// inside the sweep.
    pub fn crossing_time(&self, wavelength: f64) -> Option<f64> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return None;
        }
        let s = self.conformal_exponent();
        let amp = (self.alpha0 * self.beta0).sqrt() / s;
        let t_star = -(wavelength / amp).powf(1.0 / s);
        (t_star > self.t_in && t_star < self.t_f).then_some(t_star)
    }

    pub fn horizon_report(&self) -> Result<HorizonReport> {
        let crossing_times = self
            .k_grid
            .iter()
            .map(|&k| CrossingTime {
                k,
                wavelength: 1.0 / k,
                time: self.crossing_time(1.0 / k),
            })
            .collect();
        Ok(HorizonReport {
            total_distance: self.horizon_distance(self.t_in, self.t_f)?,
            distance_to_critical: self.horizon_distance(self.t_in, 0.0)?,
            crossing_times,
            converges_at_infinity: horizon_exists_at_infinite_time(self.a, self.b),
        })
    }
}

/// Which coefficient vanishes at the critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransitionCase {
    /// `α ↓ 0`, `β` finite: expanding universe.
    A,
    /// `β ↓ 0`, `α` finite: contracting universe.
    B,
    /// Both coefficients vanish.
    C,
    /// `a = b = 0`: nothing changes.
    #[serde(rename = "none")]
    Trivial,
    /// Any other exponent combination (divergent coefficients, de Sitter, ...).
    #[serde(rename = "other")]
    Other,
}

impl TransitionCase {
    pub fn classify(a: f64, b: f64) -> Self {
        let zero = |x: f64| x.abs() <= EXPONENT_ZERO_TOL;
        let pos = |x: f64| x > EXPONENT_ZERO_TOL;
        match (a, b) {
            (a, b) if zero(a) && zero(b) => TransitionCase::Trivial,
            (a, b) if pos(a) && zero(b) => TransitionCase::A,
            (a, b) if zero(a) && pos(b) => TransitionCase::B,
            (a, b) if pos(a) && pos(b) => TransitionCase::C,
            _ => TransitionCase::Other,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            TransitionCase::A => "A",
            TransitionCase::B => "B",
            TransitionCase::C => "C",
            TransitionCase::Trivial => "none",
            TransitionCase::Other => "other",
        }
    }
}

impl fmt::Display for TransitionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

fn check_exponents(a: f64, b: f64) -> Result<f64> {
    let d = 2.0 + a + b;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::SingularParameters(d));
    }
    Ok(d)
}

/// `ν = (1 + a)/(2 + a + b)`. Non-positive values are returned as-is; the
/// frozen-plateau interpretation only applies when `ν > 0`.
pub fn predicted_nu(a: f64, b: f64) -> Result<f64> {
    let d = check_exponents(a, b)?;
    Ok((1.0 + a) / d)
}

/// Spectral indices of the frozen two-point power spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedIndices {
    pub nu: f64,
    /// `ν` of the dual scenario, `1 − ν`.
    pub nu_dual: f64,
    /// `|Φ_k|² ∝ k^{−2ν}`
    pub phi: f64,
    /// `|Π_k|² ∝ k^{2 − 2ν'}`
    pub pi: f64,
    /// `k²|Φ_k|² ∝ k^{2 − 2ν}`
    pub grad: f64,
}

impl PredictedIndices {
    /// The field plateau exists only for `ν > 0`.
    pub fn field_freezes(&self) -> bool {
        self.nu > 0.0
    }

    /// The momentum freezes only when the dual exponent is positive
    /// (`ν < 1`); otherwise `Π_k` keeps decaying toward the critical point
    /// and its spectrum is not described by `pi`.
    pub fn momentum_freezes(&self) -> bool {
        self.nu_dual > 0.0
    }
}

pub fn predicted_indices(a: f64, b: f64) -> Result<PredictedIndices> {
    let nu = predicted_nu(a, b)?;
    let nu_dual = predicted_nu(b, a)?;
    Ok(PredictedIndices {
        nu,
        nu_dual,
        phi: -2.0 * nu,
        pi: 2.0 - 2.0 * nu_dual,
        grad: 2.0 - 2.0 * nu,
    })
}

/// Whether `∫^∞ t^{(a+b)/2} dt` converges, i.e. whether a horizon exists
/// even for a sweep that never reaches the critical point.
pub fn horizon_exists_at_infinite_time(a: f64, b: f64) -> bool {
    0.5 * (a + b) < -1.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingTime {
    pub k: f64,
    /// `1/k`
    pub wavelength: f64,
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonReport {
    /// `∫_{t_in}^{t_f} c dt`
    pub total_distance: f64,
    /// `∫_{t_in}^{0} c dt`, the horizon size seen from the start of the sweep.
    pub distance_to_critical: f64,
    pub crossing_times: Vec<CrossingTime>,
    pub converges_at_infinity: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Condensate phase fluctuations, `α = g`: `a = 1`, `b = 0`.
    Bec,
    /// Magnetically coupled linear medium, `1/μ = 1 − g²/Ω²`: `a = 0`, `b = 1`.
    EmMedium,
    /// Ferromagnet with a global coupling `g(t)`, `α = β = g`: `a = b = 1`.
    Heisenberg,
    /// Scale-invariant action, `α = t²`, `β = t⁻²`: `a = 2`, `b = −2`.
    #[serde(rename = "desitter")]
    DeSitter,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Bec, Preset::EmMedium, Preset::Heisenberg, Preset::DeSitter];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Bec => "bec",
            Preset::EmMedium => "em-medium",
            Preset::Heisenberg => "heisenberg",
            Preset::DeSitter => "desitter",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Preset::Bec => "Bose-Einstein condensate, coupling swept through zero (alpha = g)",
            Preset::EmMedium => "1+1D electromagnetic field in a magnetizable medium (1/mu = 1 - g^2/Omega^2)",
            Preset::Heisenberg => "Heisenberg ferromagnet with global coupling g(t) (alpha = beta = g)",
            Preset::DeSitter => "scale-invariant action (alpha = t^2, beta = t^-2), de Sitter geometry",
        }
    }

    /// `(a, b)`
    pub fn exponents(&self) -> (f64, f64) {
        match self {
            Preset::Bec => (1.0, 0.0),
            Preset::EmMedium => (0.0, 1.0),
            Preset::Heisenberg => (1.0, 1.0),
            Preset::DeSitter => (2.0, -2.0),
        }
    }

    /// Unit amplitudes with the default sweep interval and k grid.
    pub fn scenario(&self) -> SweepScenario {
        let (a, b) = self.exponents();
        let grid = log_spaced_grid(DEFAULT_K_MIN, DEFAULT_K_MAX, DEFAULT_POINTS_PER_DECADE)
            .expect("default grid is valid");
        SweepScenario::new(1.0, a, 1.0, b, DEFAULT_T_IN, DEFAULT_T_F, grid).expect("preset scenario is valid")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Logarithmically spaced wavenumbers from `k_min` to `k_max` inclusive,
/// with spacing as close as possible to `points_per_decade`. When the
/// range spans a whole number of grid steps neighbouring points differ by
/// exactly `10^{1/points_per_decade}`.
pub fn log_spaced_grid(k_min: f64, k_max: f64, points_per_decade: u32) -> Result<Vec<f64>> {
    if !(k_min.is_finite() && k_max.is_finite() && k_min > 0.0 && k_max > k_min) {
        return Err(Error::InvalidParameter(format!(
            "k range must satisfy 0 < k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }
    if points_per_decade == 0 {
        return Err(Error::InvalidParameter("points per decade must be positive".into()));
    }
    let decades = (k_max / k_min).log10();
    let intervals = ((decades * f64::from(points_per_decade)) - 1e-9).ceil().max(1.0) as usize;
    let step = (k_max / k_min).ln() / intervals as f64;
    let ln_min = k_min.ln();
    Ok((0..=intervals)
        .map(|i| match i {
            0 => k_min,
            i if i == intervals => k_max,
            i => (ln_min + step * i as f64).exp(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(a: f64, b: f64) -> SweepScenario {
        SweepScenario::new(1.0, a, 1.0, b, -10.0, -1e-3, vec![1.0]).unwrap()
    }

    #[test]
    fn case_labels() {
        assert_eq!(scenario(1.0, 0.0).case(), TransitionCase::A);
        assert_eq!(scenario(0.0, 1.0).case(), TransitionCase::B);
        assert_eq!(scenario(1.0, 1.0).case(), TransitionCase::C);
        assert_eq!(scenario(0.0, 0.0).case(), TransitionCase::Trivial);
        assert_eq!(scenario(1.0, 1e-13).case(), TransitionCase::A);
        assert_eq!(scenario(2.0, -2.0).case(), TransitionCase::Other);
        assert_eq!(Preset::Bec.scenario().case(), TransitionCase::A);
        assert_eq!(Preset::EmMedium.scenario().case(), TransitionCase::B);
        assert_eq!(Preset::Heisenberg.scenario().case(), TransitionCase::C);
    }

    #[test]
    fn nu_values() {
        assert_eq!(predicted_nu(1.0, 0.0).unwrap(), 2.0 / 3.0);
        assert_eq!(predicted_nu(0.0, 1.0).unwrap(), 1.0 / 3.0);
        assert_eq!(predicted_nu(0.0, 0.0).unwrap(), 0.5);
        assert_eq!(predicted_nu(2.0, -2.0).unwrap(), 1.5);
        assert!(matches!(predicted_nu(-1.0, -1.0), Err(Error::SingularParameters(_))));
        assert!(predicted_nu(-1.5, 0.0).unwrap() < 0.0);
    }

    #[test]
    fn indices() {
        let bec = predicted_indices(1.0, 0.0).unwrap();
        assert!((bec.phi + 4.0 / 3.0).abs() < 1e-15);
        assert!((bec.pi - 4.0 / 3.0).abs() < 1e-15);
        let em = predicted_indices(0.0, 1.0).unwrap();
        assert!((em.phi + 2.0 / 3.0).abs() < 1e-15);
        assert!((em.pi - 2.0 / 3.0).abs() < 1e-15);
        assert!((em.grad - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(predicted_indices(1.0, 1.0).unwrap().phi, -1.0);
        let ds = predicted_indices(2.0, -2.0).unwrap();
        assert_eq!(ds.phi, -3.0);
        assert!(!ds.momentum_freezes());
    }

    #[test]
    fn speed_and_metric() {
        assert_eq!(scenario(0.0, 0.0).sound_speed(-3.0), 1.0);
        assert!((scenario(1.0, 0.0).sound_speed(-0.25) - 0.5).abs() < 1e-15);
        let ds = SweepScenario::new(2.5, 2.0, 0.4, -2.0, -10.0, -1e-3, vec![1.0]).unwrap();
        for t in [-7.0, -0.3, -2e-3] {
            assert!((ds.sound_speed(t) - 1.0).abs() < 1e-14);
        }
        assert_eq!(scenario(0.0, 0.0).effective_metric(-2.0), (1.0, 1.0));
        let (gtt, grr) = scenario(2.0, -2.0).effective_metric(-0.5);
        assert!((gtt - 4.0).abs() < 1e-12 && (grr - 4.0).abs() < 1e-12);
        let (gtt, grr) = scenario(1.0, 1.0).effective_metric(-0.7);
        assert!((gtt - 0.49).abs() < 1e-14 && (grr - 1.0).abs() < 1e-14);
    }

    #[test]
    fn horizon_distances() {
        let flat = scenario(0.0, 0.0);
        assert!((flat.horizon_distance(-2.0, -1.0).unwrap() - 1.0).abs() < 1e-15);
        let bec = scenario(1.0, 0.0);
        assert!((bec.horizon_distance(-1.0, 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(bec.horizon_distance(-1.0, -2.0).is_err());
        assert!(bec.horizon_distance(-11.0, -2.0).is_err());
        assert!(bec.horizon_distance(-1.0, 0.5).is_err());
    }

    #[test]
    fn horizon_at_infinity() {
        assert!(horizon_exists_at_infinite_time(-3.0, 0.0));
        assert!(!horizon_exists_at_infinite_time(0.0, 0.0));
        assert!(!horizon_exists_at_infinite_time(-2.0, 0.0));
    }

    #[test]
    fn crossing_times() {
        let flat = scenario(0.0, 0.0);
        assert!((flat.crossing_time(0.5).unwrap() + 0.5).abs() < 1e-15);
        let bec = scenario(1.0, 0.0);
        assert!((bec.crossing_time(2.0 / 3.0).unwrap() + 1.0).abs() < 1e-14);
        let beyond = bec.horizon_distance(-10.0, 0.0).unwrap() * 1.01;
        assert_eq!(bec.crossing_time(beyond), None);
        // still inside the horizon when the sweep ends
        assert_eq!(bec.crossing_time(1e-9), None);
    }

    #[test]
    fn violations_are_listed() {
        let bad = SweepScenario {
            alpha0: -1.0,
            a: -1.0,
            beta0: 1.0,
            b: -1.0,
            t_in: -1.0,
            t_f: 0.0,
            k_grid: vec![2.0, 1.0],
        };
        let v = bad.violations();
        assert_eq!(v.len(), 4, "{v:?}");
        assert!(v.iter().any(|m| m.contains("2+a+b")));
        assert!(v.iter().any(|m| m.contains("strictly before the critical point")));
    }

    #[test]
    fn presets_parse() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!(matches!("foo".parse::<Preset>(), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn default_grid() {
        let g = log_spaced_grid(0.05, 50.0, 32).unwrap();
        assert_eq!(g.len(), 97);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[96], 50.0);
        let ratio = 10f64.powf(1.0 / 32.0);
        for w in g.windows(2) {
            assert!((w[1] / w[0] - ratio).abs() < 1e-12);
        }
        assert!(log_spaced_grid(1.0, 1.0, 32).is_err());
    }

    #[test]
    fn dual_swaps_coefficients() {
        let s = SweepScenario::new(2.0, 0.5, 3.0, -0.25, -5.0, -0.1, vec![1.0]).unwrap();
        let d = s.dual();
        for t in [-4.0, -0.2] {
            assert!((d.alpha(t) - s.beta(t)).abs() < 1e-15);
            assert!((d.beta(t) - s.alpha(t)).abs() < 1e-15);
        }
    }
}

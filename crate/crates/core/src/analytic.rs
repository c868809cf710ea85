//! Closed-form mode solutions.
//!
//! In the conformal time `τ = −(√(α₀β₀)/s)|t|^s`, `s = (2+a+b)/2`, the mode
//! equation becomes `Φ'' − ((2ν−1)/τ) Φ' + k² Φ = 0` with
//! `ν = (1+a)/(2+a+b)`. Substituting `τ ∝ |t|^s` into the original equation
//! only removes the explicit time dependence when `a + b + 2 − 2s = 0`,
//! which is why the exponent here is `(2+a+b)/2`.
//!
//! Its solutions are `|τ|^ν H_ν(k|τ|)`. With `z = k|τ|` and
//! `d(z^ν H_ν)/dz = z^ν H_{ν−1}` the conjugate momentum is
//! `Π = Φ̇/α = −(c/α) k |τ|^ν H_{ν−1}(z)`.
//!
//! Wronskian of `u = |τ|^ν H^(1)_ν(k|τ|)`:
//! `u Π_u* − u* Π_u = 4i (c/α) |τ|^{2ν−1} / π`, where
//! `g = (c/α)|τ|^{2ν−1}` does not depend on time. The normalized vacuum
//! mode is therefore `√(π/4g) · u`, with the phase chosen so that it
//! starts with zero accumulated phase at `t_in`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{adiabatic_init, ModeState};
use crate::model::SweepScenario;
use crate::specfun::hankel1_signed_order;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauCoordinate {
    /// `s = (2+a+b)/2`
    pub s_exp: f64,
    /// `√(α₀β₀)/s`
    pub scale: f64,
    /// `τ < 0`
    pub value: f64,
}

impl TauCoordinate {
    pub fn abs(&self) -> f64 {
        self.value.abs()
    }
}

fn tau_params(s: &SweepScenario) -> Result<(f64, f64)> {
    let s_exp = s.conformal_exponent();
    if s_exp.is_nan() || s_exp <= 0.0 {
        return Err(Error::SingularParameters(2.0 * s_exp));
    }
    Ok((s_exp, (s.alpha0() * s.beta0()).sqrt() / s_exp))
}

pub fn tau_of_t(s: &SweepScenario, t: f64) -> Result<TauCoordinate> {
    let (s_exp, scale) = tau_params(s)?;
    if !(t.is_finite() && t < 0.0) {
        return Err(Error::InvalidParameter(format!("conformal time needs t < 0, got {t}")));
    }
    Ok(TauCoordinate { s_exp, scale, value: -scale * t.abs().powf(s_exp) })
}

/// Inverse of [`tau_of_t`].
pub fn t_of_tau(s: &SweepScenario, tau: f64) -> Result<f64> {
    let (s_exp, scale) = tau_params(s)?;
    if !(tau.is_finite() && tau < 0.0) {
        return Err(Error::InvalidParameter(format!("τ must be negative, got {tau}")));
    }
    Ok(-(tau.abs() / scale).powf(1.0 / s_exp))
}

/// The Wronskian-normalized positive-frequency Hankel mode of one
/// wavenumber. Evaluate with [`VacuumMode::state`].
#[derive(Debug, Clone, Copy)]
pub struct VacuumMode {
    k: f64,
    nu: f64,
    /// `√(π/4g)·e^{iθ}`
    coefficient: Complex64,
    alpha0: f64,
    a: f64,
    beta0: f64,
    b: f64,
    s_exp: f64,
    scale: f64,
}

impl VacuumMode {
    pub fn new(s: &SweepScenario, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {k}")));
        }
        let nu = s.nu()?;
        if nu.is_nan() || nu <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "closed-form modes need ν > 0, got {nu}"
            )));
        }
        let (s_exp, scale) = tau_params(s)?;
        let t_ref = s.t_in();
        let tau_in = scale * t_ref.abs().powf(s_exp);
        let g = s.sound_speed(t_ref) / s.alpha(t_ref) * tau_in.powf(2.0 * nu - 1.0);
        let z_in = k * tau_in;
        let theta = -(z_in - 0.5 * nu * PI - 0.25 * PI);
        Ok(Self {
            k,
            nu,
            coefficient: Complex64::from_polar((PI / (4.0 * g)).sqrt(), theta),
            alpha0: s.alpha0(),
            a: s.a(),
            beta0: s.beta0(),
            b: s.b(),
            s_exp,
            scale,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `|N_k|`, the modulus of the normalization constant.
    pub fn norm(&self) -> f64 {
        self.coefficient.norm()
    }

    pub fn state(&self, t: f64) -> Result<ModeState> {
        if !(t.is_finite() && t < 0.0) {
            return Err(Error::InvalidParameter(format!("mode time must be negative, got {t}")));
        }
        let abs_t = t.abs();
        let abs_tau = self.scale * abs_t.powf(self.s_exp);
        let z = self.k * abs_tau;
        let c_over_alpha = (self.beta0 / self.alpha0).sqrt() * abs_t.powf(0.5 * (self.b - self.a));
        let envelope = abs_tau.powf(self.nu);
        let h_nu = hankel1_signed_order(self.nu, z)?;
        let h_lower = hankel1_signed_order(self.nu - 1.0, z)?;
        Ok(ModeState {
            k: self.k,
            t,
            phi: self.coefficient * envelope * h_nu,
            pi: -self.coefficient * (c_over_alpha * self.k * envelope) * h_lower,
        })
    }

    /// Leading small-`|τ|` modulus `|N_k| (Γ(ν)/π) (2/k)^ν` of the plateau.
    pub fn frozen_amplitude(&self) -> f64 {
        self.norm() * libm::tgamma(self.nu) / PI * (2.0 / self.k).powf(self.nu)
    }
}

/// Exact solution that starts from the same zeroth-order adiabatic state
/// as the numerical integration: `Φ = N u + M u*` with `u` the normalized
/// vacuum mode. `M` measures how far the adiabatic start is from the
/// exact vacuum and is `O(|ω̇|/ω²)` at `t_in`.
#[derive(Debug, Clone, Copy)]
pub struct ExactMode {
    vacuum: VacuumMode,
    pub positive: Complex64,
    pub negative: Complex64,
}

/// Conserved bilinear form `f_Φ g_Π − f_Π g_Φ`.
fn symplectic(f: &ModeState, g_phi: Complex64, g_pi: Complex64) -> Complex64 {
    f.phi * g_pi - f.pi * g_phi
}

impl ExactMode {
    /// Matched to [`adiabatic_init`] at `t_in`, the largest `k|τ|` of the sweep.
    pub fn matched(s: &SweepScenario, k: f64) -> Result<Self> {
        let vacuum = VacuumMode::new(s, k)?;
        let start = adiabatic_init(s, k)?;
        Self::through(vacuum, &start)
    }

    /// The exact solution passing through `state` at `state.t`.
    pub fn through(vacuum: VacuumMode, state: &ModeState) -> Result<Self> {
        let u = vacuum.state(state.t)?;
        // ω(u, u*) = i, ω(u*, u) = −i
        let positive = -Complex64::i() * symplectic(state, u.phi.conj(), u.pi.conj());
        let negative = Complex64::i() * symplectic(state, u.phi, u.pi);
        Ok(Self { vacuum, positive, negative })
    }

    pub fn vacuum(&self) -> &VacuumMode {
        &self.vacuum
    }

    /// `|N|² − |M|²`, equal to 1 when the matched state is canonically normalized.
    pub fn normalization(&self) -> f64 {
        self.positive.norm_sqr() - self.negative.norm_sqr()
    }

    pub fn state(&self, t: f64) -> Result<ModeState> {
        let u = self.vacuum.state(t)?;
        Ok(ModeState {
            k: u.k,
            t,
            phi: self.positive * u.phi + self.negative * u.phi.conj(),
            pi: self.positive * u.pi + self.negative * u.pi.conj(),
        })
    }
}

/// Closed-form counterpart of the numerically evolved mode at time `t`.
pub fn analytic_mode(s: &SweepScenario, k: f64, t: f64) -> Result<ModeState> {
    if t < s.t_in() {
        return Err(Error::InvalidParameter(format!("t = {t} precedes the sweep start {}", s.t_in())));
    }
    ExactMode::matched(s, k)?.state(t)
}

/// Plateau amplitude of the vacuum mode, `|N_k| (Γ(ν)/π) (2/k)^ν`.
pub fn frozen_amplitude(s: &SweepScenario, k: f64) -> Result<f64> {
    Ok(VacuumMode::new(s, k)?.frozen_amplitude())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Preset;

    fn scen(a: f64, b: f64) -> SweepScenario {
        SweepScenario::new(1.0, a, 1.0, b, -10.0, -1e-3, vec![1.0]).unwrap()
    }

    #[test]
    fn tau_examples() {
        assert!((tau_of_t(&scen(0.0, 0.0), -1.0).unwrap().value + 1.0).abs() < 1e-15);
        assert!((tau_of_t(&scen(1.0, 0.0), -1.0).unwrap().value + 2.0 / 3.0).abs() < 1e-15);
        let ds = scen(2.0, -2.0);
        for t in [-9.0, -0.4, -0.002] {
            let tau = tau_of_t(&ds, t).unwrap();
            assert_eq!(tau.s_exp, 1.0);
            assert!((tau.value - t).abs() < 1e-15);
        }
        assert!(tau_of_t(&ds, 0.0).is_err());
    }

    #[test]
    fn tau_roundtrip() {
        let s = scen(0.7, -0.3);
        for t in [-8.0, -1.0, -0.01] {
            let tau = tau_of_t(&s, t).unwrap().value;
            assert!((t_of_tau(&s, tau).unwrap() - t).abs() < 1e-13 * t.abs());
        }
    }

    #[test]
    fn vacuum_mode_is_canonical() {
        for (a, b) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, -2.0), (0.3, 0.9)] {
            let s = scen(a, b);
            let m = VacuumMode::new(&s, 1.7).unwrap();
            for t in [-10.0, -1.0, -0.01, -1e-3] {
                let st = m.state(t).unwrap();
                assert!((st.wronskian() - Complex64::i()).norm() < 1e-9, "a={a} b={b} t={t}");
                assert!((st.robertson_schrodinger() - 0.25).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn large_argument_matches_wkb_amplitude() {
        let s = scen(1.0, 0.0);
        let k = 30.0;
        let m = VacuumMode::new(&s, k).unwrap();
        for t in [-10.0, -5.0] {
            let tau = tau_of_t(&s, t).unwrap().abs();
            assert!(k * tau > 50.0);
            let wkb = (s.alpha(t) / (2.0 * s.omega(k, t))).sqrt();
            let st = m.state(t).unwrap();
            assert!((st.phi.norm() / wkb - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn de_sitter_elementary_form() {
        // ν = 3/2: H_{3/2}(z) = −√(2/(πz)) e^{iz} (1 + i/z), H_{1/2}(z) = −i√(2/(πz)) e^{iz}
        let s = Preset::DeSitter.scenario();
        let k = 2.0;
        let m = VacuumMode::new(&s, k).unwrap();
        let coef = m.coefficient;
        for t in [-9.5f64, -1.3, -0.01] {
            let tau = t.abs();
            let z = k * tau;
            let amp = (2.0 / (PI * z)).sqrt();
            let h32 = -amp * Complex64::from_polar(1.0, z) * Complex64::new(1.0, 1.0 / z);
            let h12 = Complex64::new(0.0, -amp) * Complex64::from_polar(1.0, z);
            let phi = coef * tau.powf(1.5) * h32;
            let c_over_alpha = 1.0 / (t * t);
            let pi = -coef * c_over_alpha * k * tau.powf(1.5) * h12;
            let st = m.state(t).unwrap();
            assert!((st.phi - phi).norm() <= 1e-9 * phi.norm());
            assert!((st.pi - pi).norm() <= 1e-9 * pi.norm());
        }
    }

    #[test]
    fn half_order_envelope_is_constant() {
        // |τ|^{1/2} |H_{1/2}(k|τ|)| = √(2/(πk))
        let s = scen(0.6, 0.6);
        let m = VacuumMode::new(&s, 3.0).unwrap();
        assert!((m.nu() - 0.5).abs() < 1e-15);
        let expected = m.norm() * (2.0 / (PI * 3.0)).sqrt();
        for t in [-10.0, -2.0, -0.05, -1e-3] {
            let st = m.state(t).unwrap();
            assert!((st.phi.norm() / expected - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn matched_mode_starts_at_adiabatic_state() {
        let s = Preset::Bec.scenario();
        let k = 3.0;
        let exact = ExactMode::matched(&s, k).unwrap();
        let start = adiabatic_init(&s, k).unwrap();
        let st = exact.state(s.t_in()).unwrap();
        assert!((st.phi - start.phi).norm() < 1e-12 * start.phi.norm());
        assert!((st.pi - start.pi).norm() < 1e-12 * start.pi.norm());
        assert!((exact.normalization() - 1.0).abs() < 1e-10);
        assert!(exact.negative.norm() < 0.05);
    }

    #[test]
    fn frozen_amplitude_scaling() {
        let s = Preset::Bec.scenario();
        let nu = 2.0 / 3.0;
        let r = frozen_amplitude(&s, 2.0).unwrap() / frozen_amplitude(&s, 1.0).unwrap();
        assert!((r - 2f64.powf(-nu)).abs() < 1e-14);
        // the plateau is what the vacuum mode actually reaches
        let m = VacuumMode::new(&s, 1.0).unwrap();
        let st = m.state(-1e-9).unwrap();
        assert!((st.phi.norm() / m.frozen_amplitude() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_nonpositive_nu() {
        let s = scen(-1.5, 0.0);
        assert!(VacuumMode::new(&s, 1.0).is_err());
    }
}

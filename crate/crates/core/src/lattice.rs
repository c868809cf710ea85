//! Brute-force cross-check: the same field equation discretized on a
//! periodic 1+1-dimensional lattice,
//!
//! `dΦ_j/dt = α Π_j`, `dΠ_j/dt = β (Φ_{j+1} − 2Φ_j + Φ_{j−1})/Δx²`,
//!
//! integrated with kick-drift-kick leapfrog. A plane wave `e^{ik_n x}` is an
//! exact eigenvector of the stencil with `k² → k_eff²`, so each lattice mode
//! should reproduce the per-mode ODE at `k_eff`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{adiabatic_init, evolve_mode, ModeState};
use crate::model::SweepScenario;
use crate::{Error, Result};

pub const MIN_SITES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    n_sites: usize,
    length: f64,
    dt_max: f64,
}

impl LatticeConfig {
    pub fn new(n_sites: usize, length: f64, dt_max: f64) -> Result<Self> {
        if n_sites < MIN_SITES || !n_sites.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "n_sites must be a power of two ≥ {MIN_SITES}, got {n_sites}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter(format!("length must be positive, got {length}")));
        }
        if !(dt_max > 0.0 && dt_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt_max must be positive, got {dt_max}")));
        }
        Ok(Self { n_sites, length, dt_max })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dt_max(&self) -> f64 {
        self.dt_max
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_sites as f64
    }

    /// `k_n = 2πn/L`
    pub fn wavenumber(&self, n: usize) -> Result<f64> {
        self.check_mode(n)?;
        Ok(2.0 * PI * n as f64 / self.length)
    }

    /// Largest stable step `Δx/(2c)` for sound speed `c`.
    pub fn cfl_bound(&self, c: f64) -> f64 {
        self.spacing() / (2.0 * c)
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.n_sites / 2 {
            return Err(Error::InvalidParameter(format!(
                "mode index must lie in 1..={}, got {n}",
                self.n_sites / 2
            )));
        }
        Ok(())
    }
}

/// Wavenumber seen by the nearest-neighbor Laplacian: `(2/Δx) sin(k_n Δx/2)`.
pub fn lattice_dispersion(cfg: &LatticeConfig, n: usize) -> Result<f64> {
    let k = cfg.wavenumber(n)?;
    let dx = cfg.spacing();
    Ok(2.0 / dx * (0.5 * k * dx).sin())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub t: f64,
    pub phi: Vec<Complex64>,
    pub pi: Vec<Complex64>,
}

impl LatticeState {
    /// `Φ_j = φ₀ e^{ik_n x_j}`, `Π_j = π₀ e^{ik_n x_j}` with `x_j = jΔx`.
    pub fn plane_wave(cfg: &LatticeConfig, n: usize, t: f64, phi0: Complex64, pi0: Complex64) -> Result<Self> {
        let k = cfg.wavenumber(n)?;
        let dx = cfg.spacing();
        let (phi, pi) = (0..cfg.n_sites)
            .map(|j| {
                let e = Complex64::from_polar(1.0, k * j as f64 * dx);
                (phi0 * e, pi0 * e)
            })
            .unzip();
        Ok(Self { t, phi, pi })
    }

    /// Fourier amplitudes `(φ_n, π_n)` of mode `n`, normalized so that a
    /// pure plane wave returns its `(φ₀, π₀)`.
    pub fn project(&self, cfg: &LatticeConfig, n: usize) -> Result<(Complex64, Complex64)> {
        let k = cfg.wavenumber(n)?;
        let dx = cfg.spacing();
        let norm = 1.0 / self.phi.len() as f64;
        let mut acc = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (j, (p, q)) in self.phi.iter().zip(&self.pi).enumerate() {
            let e = Complex64::from_polar(norm, -k * j as f64 * dx);
            acc.0 += p * e;
            acc.1 += q * e;
        }
        Ok(acc)
    }

    /// Cyclic shift by `m` sites: `Φ'_j = Φ_{j−m}`.
    pub fn shifted(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.phi.rotate_right(m % self.phi.len());
        out.pi.rotate_right(m % self.pi.len());
        out
    }

    /// `Σ (α|Π_j|² + β|Φ_{j+1} − Φ_j|²/Δx²) Δx/2` at the state's own time.
    pub fn energy(&self, cfg: &LatticeConfig, s: &SweepScenario) -> f64 {
        let dx = cfg.spacing();
        let (alpha, beta) = (s.alpha(self.t), s.beta(self.t));
        let n = self.phi.len();
        (0..n)
            .map(|j| {
                let grad = (self.phi[(j + 1) % n] - self.phi[j]) / dx;
                alpha * self.pi[j].norm_sqr() + beta * grad.norm_sqr()
            })
            .sum::<f64>()
            * dx
            / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeRun {
    pub state: LatticeState,
    pub steps: usize,
}

/// Evolve `init` from `init.t` to `s.t_f()` in the fewest equal steps no
/// longer than `dt_max`. Every step must respect the CFL bound at both of
/// its ends.
pub fn evolve_lattice(cfg: &LatticeConfig, s: &SweepScenario, init: &LatticeState) -> Result<LatticeRun> {
    let n = cfg.n_sites;
    if init.phi.len() != n || init.pi.len() != n {
        return Err(Error::InvalidParameter(format!(
            "initial field must have {n} sites, got {} / {}",
            init.phi.len(),
            init.pi.len()
        )));
    }
    let t_end = s.t_f();
    if !(init.t < t_end && init.t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "initial time {} must precede t_f = {t_end}",
            init.t
        )));
    }

    let inv_dx2 = 1.0 / (cfg.spacing() * cfg.spacing());
    let mut phi = init.phi.clone();
    let mut pi = init.pi.clone();
    let mut lap = vec![Complex64::new(0.0, 0.0); n];
    let span = t_end - init.t;
    let steps = ((span / cfg.dt_max) * (1.0 - 4.0 * f64::EPSILON)).ceil().max(1.0) as usize;
    let dt = span / steps as f64;

    let laplacian = |phi: &[Complex64], lap: &mut [Complex64]| {
        for j in 0..n {
            let l = phi[(j + n - 1) % n];
            let r = phi[(j + 1) % n];
            lap[j] = (l - 2.0 * phi[j] + r) * inv_dx2;
        }
    };

    laplacian(&phi, &mut lap);
    for i in 0..steps {
        let t = init.t + i as f64 * dt;
        let t1 = if i + 1 == steps { t_end } else { t + dt };
        let bound = cfg.cfl_bound(s.sound_speed(t)).min(cfg.cfl_bound(s.sound_speed(t1)));
        if dt > bound {
            return Err(Error::Cfl { dt, bound });
        }

        let half_kick0 = 0.5 * dt * s.beta(t);
        let drift = dt * s.alpha(0.5 * (t + t1));
        let half_kick1 = 0.5 * dt * s.beta(t1);

        for j in 0..n {
            pi[j] += half_kick0 * lap[j];
            phi[j] += drift * pi[j];
        }
        laplacian(&phi, &mut lap);
        for j in 0..n {
            pi[j] += half_kick1 * lap[j];
        }

        if phi.iter().chain(&pi).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { step: i + 1 });
        }
    }

    Ok(LatticeRun { state: LatticeState { t: t_end, phi, pi }, steps })
}

/// Final amplitudes of a lattice plane wave next to the per-mode ODE run
/// from the same initial amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveComparison {
    pub n: usize,
    pub k_n: f64,
    pub k_eff: f64,
    pub lattice: (Complex64, Complex64),
    /// ODE at `k_eff`
    pub ode_eff: (Complex64, Complex64),
    /// ODE at the continuum wavenumber `k_n`
    pub ode_continuum: (Complex64, Complex64),
    /// Norm of the final field outside mode `n`, relative to `|Φ_n|`.
    pub leakage: f64,
}

impl PlaneWaveComparison {
    /// Relative mismatch against the ODE at `k_eff`.
    pub fn error_eff(&self) -> f64 {
        rel_error(self.lattice, self.ode_eff)
    }

    pub fn error_continuum(&self) -> f64 {
        rel_error(self.lattice, self.ode_continuum)
    }
}

fn rel_error(x: (Complex64, Complex64), y: (Complex64, Complex64)) -> f64 {
    ((x.0 - y.0).norm() / y.0.norm()).max((x.1 - y.1).norm() / y.1.norm())
}

/// Start mode `n` in the adiabatic vacuum at `k_eff` and `t_in`, evolve it
/// on the lattice and with the ODE (tolerance `tol`) to `t_f`.
pub fn compare_plane_wave(cfg: &LatticeConfig, s: &SweepScenario, n: usize, tol: f64) -> Result<PlaneWaveComparison> {
    let k_n = cfg.wavenumber(n)?;
    let k_eff = lattice_dispersion(cfg, n)?;
    let start = adiabatic_init(s, k_eff)?;
    let init = LatticeState::plane_wave(cfg, n, start.t, start.phi, start.pi)?;
    let end = evolve_lattice(cfg, s, &init)?.state;

    let (phi_n, pi_n) = end.project(cfg, n)?;
    let clean = LatticeState::plane_wave(cfg, n, end.t, phi_n, pi_n)?;
    let residual = end.phi.iter().zip(&clean.phi).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
    let leakage = (residual / cfg.n_sites as f64).sqrt() / phi_n.norm();

    let ode = |k: f64| -> Result<(Complex64, Complex64)> {
        let last = *evolve_mode(s, &ModeState { k, ..start }, tol)?.last();
        Ok((last.phi, last.pi))
    };
    Ok(PlaneWaveComparison {
        n,
        k_n,
        k_eff,
        lattice: (phi_n, pi_n),
        ode_eff: ode(k_eff)?,
        ode_continuum: ode(k_n)?,
        leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn constant(t_in: f64, t_f: f64) -> SweepScenario {
        SweepScenario::new(1.0, 0.0, 1.0, 0.0, t_in, t_f, vec![1.0]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(LatticeConfig::new(32, 1.0, 0.1).is_err());
        assert!(LatticeConfig::new(96, 1.0, 0.1).is_err());
        assert!(LatticeConfig::new(64, 0.0, 0.1).is_err());
        assert!(LatticeConfig::new(64, 1.0, -0.1).is_err());
        let cfg = LatticeConfig::new(64, 2.0, 0.1).unwrap();
        assert_eq!(cfg.spacing(), 2.0 / 64.0);
        assert!(cfg.wavenumber(0).is_err());
        assert!(cfg.wavenumber(33).is_err());
    }

    #[test]
    fn dispersion_values() {
        let cfg = LatticeConfig::new(64, 64.0, 0.1).unwrap();
        let dx = cfg.spacing();
        assert!(close(lattice_dispersion(&cfg, 32).unwrap(), 2.0 / dx, 1e-12));
        assert!(close(lattice_dispersion(&cfg, 16).unwrap(), 2f64.sqrt() / dx, 1e-12));

        let fine = LatticeConfig::new(1 << 16, 1.0, 0.1).unwrap();
        let ratio = lattice_dispersion(&fine, 1).unwrap() / fine.wavenumber(1).unwrap();
        assert!(close(ratio, 1.0, 1e-8));
    }

    #[test]
    fn uniform_field_stays_uniform() {
        let cfg = LatticeConfig::new(64, 10.0, 1e-3).unwrap();
        let s = constant(-2.0, -1.0);
        let phi0 = Complex64::new(0.3, -0.2);
        let pi0 = Complex64::new(0.1, 0.4);
        let init = LatticeState { t: -2.0, phi: vec![phi0; 64], pi: vec![pi0; 64] };
        let out = evolve_lattice(&cfg, &s, &init).unwrap().state;
        let expect = phi0 + pi0;
        for j in 0..64 {
            assert!((out.phi[j] - expect).norm() < 1e-12);
            assert!((out.pi[j] - pi0).norm() < 1e-15);
        }
    }

    #[test]
    fn energy_conserved_with_constant_coefficients() {
        let cfg = LatticeConfig::new(64, 2.0 * PI, 1e-3).unwrap();
        let s = constant(-11.0, -1.0);
        let mut init = LatticeState::plane_wave(&cfg, 3, -11.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, -3.0)).unwrap();
        let other = LatticeState::plane_wave(&cfg, 7, -11.0, Complex64::new(0.2, 0.1), Complex64::new(0.0, 0.5)).unwrap();
        for j in 0..64 {
            init.phi[j] += other.phi[j];
            init.pi[j] += other.pi[j];
        }
        let run = evolve_lattice(&cfg, &s, &init).unwrap();
        assert_eq!(run.steps, 10_000);
        let (e0, e1) = (init.energy(&cfg, &s), run.state.energy(&cfg, &s));
        assert!(((e1 - e0) / e0).abs() < 1e-6, "{e0} → {e1}");
    }

    #[test]
    fn cfl_violation_is_reported() {
        let cfg = LatticeConfig::new(64, 1.0, 0.1).unwrap();
        let s = constant(-2.0, -1.0);
        let init = LatticeState { t: -2.0, phi: vec![Complex64::new(0.0, 0.0); 64], pi: vec![Complex64::new(0.0, 0.0); 64] };
        assert!(matches!(evolve_lattice(&cfg, &s, &init), Err(Error::Cfl { .. })));
    }

    #[test]
    fn wrong_size_rejected() {
        let cfg = LatticeConfig::new(64, 1.0, 1e-3).unwrap();
        let s = constant(-2.0, -1.0);
        let init = LatticeState { t: -2.0, phi: vec![Complex64::new(0.0, 0.0); 63], pi: vec![Complex64::new(0.0, 0.0); 63] };
        assert!(evolve_lattice(&cfg, &s, &init).is_err());
    }

    #[test]
    fn projection_recovers_amplitudes() {
        let cfg = LatticeConfig::new(64, 3.0, 1e-3).unwrap();
        let (p, q) = (Complex64::new(0.7, -0.1), Complex64::new(-0.2, 0.9));
        let st = LatticeState::plane_wave(&cfg, 5, 0.0, p, q).unwrap();
        let (pp, qq) = st.project(&cfg, 5).unwrap();
        assert!((pp - p).norm() < 1e-13 && (qq - q).norm() < 1e-13);
        let (p6, _) = st.project(&cfg, 6).unwrap();
        assert!(p6.norm() < 1e-13);
    }
}

//! Per-mode evolution of `dΦ/dt = α Π`, `dΠ/dt = −β k² Φ` from an
//! adiabatic vacuum at `t_in` to `t_f`.
//!
//! The canonical normalization `Φ Π* − Φ* Π = i` (ħ = 1) is conserved
//! exactly by the flow and is monitored along every trajectory.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::SweepScenario;
use crate::{Error, Result};

/// Ratio `|ω̇|/ω²` at `t_in` above which the initial state is flagged.
pub const ADIABATICITY_WARNING: f64 = 0.05;
pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-4;
/// Allowed Wronskian drift in units of the tolerance.
pub const DRIFT_FACTOR: f64 = 100.0;

const MAX_STEPS: usize = 20_000_000;
/// Per-step error target as a fraction of `tol`. Dormand–Prince damps the
/// Wronskian by a tiny amount every step, and over the ~10⁵ steps of a fast
/// mode that adds up; this keeps the accumulated drift well under
/// `DRIFT_FACTOR·tol`.
const LOCAL_ERROR_FRACTION: f64 = 1.0 / 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub k: f64,
    pub t: f64,
    pub phi: Complex64,
    /// `Π = Φ̇/α`
    pub pi: Complex64,
}

impl ModeState {
    /// `Φ Π* − Φ* Π`; equals `i` for a canonically normalized mode.
    pub fn wronskian(&self) -> Complex64 {
        self.phi * self.pi.conj() - self.phi.conj() * self.pi
    }

    /// `Im(Φ Π*)`, which should stay at 1/2.
    pub fn half_wronskian(&self) -> f64 {
        (self.phi * self.pi.conj()).im
    }

    /// `|Φ||Π|`, the product of quadrature uncertainties.
    pub fn uncertainty_product(&self) -> f64 {
        self.phi.norm() * self.pi.norm()
    }

    /// `|Φ|²|Π|² − Re(Φ Π*)²`, equal to 1/4 for a pure Gaussian state.
    /// Evaluated as the identical `Im(Φ Π*)²`: in a strongly squeezed mode
    /// the two terms of the difference are huge and cancel.
    pub fn robertson_schrodinger(&self) -> f64 {
        let w = self.half_wronskian();
        w * w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    pub k: f64,
    /// Recorded states, strictly increasing in `t`, first at the start time
    /// and last at `t_f`.
    pub states: Vec<ModeState>,
    /// Max over all accepted steps of `|Im(Φ Π*) − w₀|`, with `w₀` its
    /// initial value, rescaled so that a canonical mode (`w₀ = 1/2`) is
    /// measured as is.
    pub max_wronskian_drift: f64,
    /// Max over all accepted steps of `|RS − w₀²|`, rescaled the same way
    /// (`|RS − 1/4|` for a canonical mode).
    pub max_rs_deviation: f64,
    pub steps_taken: usize,
    pub steps_rejected: usize,
    /// `|ω̇|/ω²` at the start of the sweep.
    pub initial_adiabaticity: f64,
}

impl ModeTrajectory {
    pub fn initial(&self) -> &ModeState {
        &self.states[0]
    }

    pub fn last(&self) -> &ModeState {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn adiabatic_warning(&self) -> bool {
        self.initial_adiabaticity > ADIABATICITY_WARNING
    }
}

/// `|ω̇|/ω² = |a + b| / (2|t| ω(t))`.
pub fn adiabaticity_ratio(s: &SweepScenario, k: f64, t: f64) -> f64 {
    let exp_sum = s.a() + s.b();
    if exp_sum == 0.0 {
        return 0.0;
    }
    exp_sum.abs() / (2.0 * t.abs() * s.omega(k, t))
}

/// Zeroth-order WKB vacuum at `t_in`: `Φ = √(α/2ω)`, `Π = −i √(ω/2α)`.
pub fn adiabatic_init(s: &SweepScenario, k: f64) -> Result<ModeState> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {k}")));
    }
    let t = s.t_in();
    let alpha = s.alpha(t);
    let omega = s.omega(k, t);
    Ok(ModeState {
        k,
        t,
        phi: Complex64::new((alpha / (2.0 * omega)).sqrt(), 0.0),
        pi: Complex64::new(0.0, -(omega / (2.0 * alpha)).sqrt()),
    })
}

/// Integrate from `init.t` to `t_f`, recording only the two end points.
pub fn evolve_mode(s: &SweepScenario, init: &ModeState, tol: f64) -> Result<ModeTrajectory> {
    evolve_mode_at(s, init, tol, &[])
}

/// Integrate from `init.t` to `t_f`, recording the state at each of
/// `sample_times` (which must lie strictly between the two) as well as at
/// both ends. Steps are shortened to land on the sample times exactly.
pub fn evolve_mode_at(
    s: &SweepScenario,
    init: &ModeState,
    tol: f64,
    sample_times: &[f64],
) -> Result<ModeTrajectory> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must lie in [{MIN_TOL:e}, {MAX_TOL:e}], got {tol:e}"
        )));
    }
    let k = init.k;
    let t_start = init.t;
    let t_end = s.t_f();
    if !(t_start >= s.t_in() && t_start < t_end) {
        return Err(Error::InvalidParameter(format!(
            "initial time {t_start} must lie in [t_in, t_f) = [{}, {t_end})",
            s.t_in()
        )));
    }
    let mut targets: Vec<f64> = sample_times.to_vec();
    if targets.iter().any(|&t| !(t > t_start && t < t_end)) || targets.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "sample times must be strictly increasing and inside the sweep".into(),
        ));
    }
    targets.push(t_end);

    let failure = |reason: String| Error::NumericalFailure { k, reason };
    let system = ModeSystem { s, k };
    let mut y = pack(init);
    let mut t = t_start;
    let mut dydt = system.rhs(t, &y);

    let omega0 = s.omega(k, t);
    let mut h = (2.0 * PI / omega0).min(t.abs()) / 50.0;

    let mut states = Vec::with_capacity(targets.len() + 1);
    states.push(*init);
    let half_w0 = init.half_wronskian();
    let rs0 = init.robertson_schrodinger();
    // a state with vanishing Wronskian is measured against its own size
    let unit = match half_w0.abs() {
        w if w > 0.0 => w,
        _ => init.uncertainty_product().max(f64::MIN_POSITIVE),
    };
    let drift_of = |st: &ModeState| 0.5 * (st.half_wronskian() - half_w0).abs() / unit;
    let rs_dev_of = |st: &ModeState| 0.25 * (st.robertson_schrodinger() - rs0).abs() / (unit * unit);
    let mut max_drift = 0.0f64;
    let mut max_rs = 0.0f64;
    let mut steps_taken = 0usize;
    let mut steps_rejected = 0usize;

    for &target in &targets {
        while t < target {
            if steps_taken + steps_rejected >= MAX_STEPS {
                return Err(failure(format!("step budget exhausted at t = {t}")));
            }
            // coefficients vary on the scale |t|
            let mut h_try = h.min(0.5 * t.abs());
            let clamped = t + h_try >= target;
            if clamped {
                h_try = target - t;
            }
            if h_try <= 16.0 * f64::EPSILON * t.abs() {
                return Err(failure(format!("step size underflow at t = {t} (h = {h_try:e})")));
            }
            let step = dopri5_step(&system, t, &y, &dydt, h_try);
            let err = error_norm(&y, &step.y, &step.err, LOCAL_ERROR_FRACTION * tol);
            if err <= 1.0 {
                t = if clamped { target } else { t + h_try };
                y = step.y;
                dydt = step.dydt;
                steps_taken += 1;
                let state = unpack(k, t, &y);
                let drift = drift_of(&state);
                max_drift = max_drift.max(drift);
                max_rs = max_rs.max(rs_dev_of(&state));
                if !y.iter().all(|v| v.is_finite()) {
                    return Err(failure(format!("non-finite state at t = {t}")));
                }
                if drift > DRIFT_FACTOR * tol {
                    return Err(failure(format!(
                        "Wronskian drift {drift:e} exceeds {DRIFT_FACTOR}·tol at t = {t}"
                    )));
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a step shortened to hit a sample time says little about the next one
                h = if clamped { h.max(h_try * fac) } else { h_try * fac };
            } else {
                steps_rejected += 1;
                h = h_try * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        states.push(unpack(k, t, &y));
    }

    Ok(ModeTrajectory {
        k,
        states,
        max_wronskian_drift: max_drift,
        max_rs_deviation: max_rs,
        steps_taken,
        steps_rejected,
        initial_adiabaticity: adiabaticity_ratio(s, k, t_start),
    })
}

/// One trajectory per wavenumber of the scenario's grid, each started
/// from the adiabatic vacuum. Modes are evolved in parallel; the result is
/// ordered like the grid and independent of scheduling.
pub fn evolve_all(s: &SweepScenario, tol: f64) -> Result<Vec<ModeTrajectory>> {
    let results: Vec<Result<ModeTrajectory>> = s
        .k_grid()
        .par_iter()
        .map(|&k| adiabatic_init(s, k).and_then(|init| evolve_mode(s, &init, tol)))
        .collect();
    let mut out = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(traj) => out.push(traj),
            Err(e) => failures.push(e),
        }
    }
    if failures.is_empty() {
        Ok(out)
    } else {
        Err(Error::ModeFailures(failures))
    }
}

type State = [f64; 4];

fn pack(m: &ModeState) -> State {
    [m.phi.re, m.phi.im, m.pi.re, m.pi.im]
}

fn unpack(k: f64, t: f64, y: &State) -> ModeState {
    ModeState {
        k,
        t,
        phi: Complex64::new(y[0], y[1]),
        pi: Complex64::new(y[2], y[3]),
    }
}

struct ModeSystem<'a> {
    s: &'a SweepScenario,
    k: f64,
}

impl ModeSystem<'_> {
    fn rhs(&self, t: f64, y: &State) -> State {
        let alpha = self.s.alpha(t);
        let stiff = self.s.beta(t) * self.k * self.k;
        [alpha * y[2], alpha * y[3], -stiff * y[0], -stiff * y[1]]
    }
}

/// Mixed error measure: each complex component relative to its own size.
/// Neither `Φ` nor `Π` can vanish while the Wronskian is `i`.
fn error_norm(y: &State, y_new: &State, err: &State, tol: f64) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..2 {
        let (i, j) = (2 * c, 2 * c + 1);
        let scale = y[i].hypot(y[j]).max(y_new[i].hypot(y_new[j]));
        let e = err[i].hypot(err[j]);
        worst = worst.max(e / (tol * scale));
    }
    worst
}

struct Step {
    y: State,
    dydt: State,
    err: State,
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..4 {
            out[i] += h * coef * k[i];
        }
    }
    out
}

fn dopri5_step(sys: &ModeSystem<'_>, t: f64, y: &State, k1: &State, h: f64) -> Step {
    let k2 = sys.rhs(t + C2 * h, &combine(y, h, &[(A21, k1)]));
    let k3 = sys.rhs(t + C3 * h, &combine(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = sys.rhs(t + C4 * h, &combine(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = sys.rhs(
        t + C5 * h,
        &combine(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = sys.rhs(
        t + h,
        &combine(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = combine(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = sys.rhs(t + h, &y_new);
    let mut err = [0.0; 4];
    for i in 0..4 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Step { y: y_new, dydt: k7, err }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(t_in: f64, t_f: f64, k: f64) -> SweepScenario {
        SweepScenario::new(1.0, 0.0, 1.0, 0.0, t_in, t_f, vec![k]).unwrap()
    }

    #[test]
    fn robertson_schrodinger_matches_product_form() {
        let m = ModeState { k: 1.0, t: -1.0, phi: Complex64::new(0.3, -1.2), pi: Complex64::new(0.7, 0.4) };
        let cross = (m.phi * m.pi.conj()).re;
        let product = m.phi.norm_sqr() * m.pi.norm_sqr() - cross * cross;
        assert!((m.robertson_schrodinger() - product).abs() < 1e-14);
    }

    #[test]
    fn adiabatic_start_values() {
        let s = flat(-10.0, -1.0, 1.0);
        let m = adiabatic_init(&s, 1.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.phi - Complex64::new(r, 0.0)).norm() < 1e-15);
        assert!((m.pi - Complex64::new(0.0, -r)).norm() < 1e-15);
        assert!((m.wronskian() - Complex64::i()).norm() < 1e-15);

        let s = SweepScenario::new(4.0, 0.0, 1.0, 0.0, -10.0, -1.0, vec![1.0]).unwrap();
        let m = adiabatic_init(&s, 1.0).unwrap();
        assert!((m.phi - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((m.pi - Complex64::new(0.0, -0.5)).norm() < 1e-15);

        let s = SweepScenario::new(0.3, 1.7, 2.2, -0.4, -3.0, -1.0, vec![1.0]).unwrap();
        let m = adiabatic_init(&s, 7.5).unwrap();
        assert!((m.uncertainty_product() - 0.5).abs() < 1e-15);
        assert!(adiabatic_init(&s, 0.0).is_err());
    }

    #[test]
    fn adiabaticity() {
        let s = flat(-10.0, -1.0, 1.0);
        assert_eq!(adiabaticity_ratio(&s, 3.0, -2.0), 0.0);
        let bec = SweepScenario::new(1.0, 1.0, 1.0, 0.0, -10.0, -1e-3, vec![1.0]).unwrap();
        assert!((adiabaticity_ratio(&bec, 10.0, -1.0) - 0.05).abs() < 1e-15);
        assert!(adiabaticity_ratio(&bec, 10.0, -1e-8) > 1e3);
    }

    #[test]
    fn harmonic_oscillator_closed_form() {
        let k = 2.5;
        let s = flat(-10.0, -0.5, k);
        let init = adiabatic_init(&s, k).unwrap();
        let samples = [-8.0, -3.3, -1.0];
        let traj = evolve_mode_at(&s, &init, 1e-10, &samples).unwrap();
        assert_eq!(traj.states.len(), 5);
        for st in &traj.states {
            let want = Complex64::from_polar(1.0 / (2.0 * k).sqrt(), -k * (st.t + 10.0));
            assert!((st.phi - want).norm() < 1e-8, "t = {}", st.t);
        }
        assert_eq!(traj.last().t, -0.5);
        assert!(traj.max_wronskian_drift <= 100.0 * 1e-10);
    }

    #[test]
    fn rejects_bad_tolerance_and_times() {
        let s = flat(-10.0, -1.0, 1.0);
        let init = adiabatic_init(&s, 1.0).unwrap();
        assert!(evolve_mode(&s, &init, 1e-13).is_err());
        assert!(evolve_mode(&s, &init, 1e-3).is_err());
        assert!(evolve_mode_at(&s, &init, 1e-8, &[-0.5]).is_err());
        assert!(evolve_mode_at(&s, &init, 1e-8, &[-3.0, -4.0]).is_err());
    }

    #[test]
    fn evolve_all_matches_single_and_permutation() {
        let grid = vec![0.3, 1.0, 4.0];
        let s = SweepScenario::new(1.0, 1.0, 1.0, 0.0, -10.0, -1e-2, grid).unwrap();
        let all = evolve_all(&s, 1e-9).unwrap();
        for traj in &all {
            let single = evolve_mode(&s, &adiabatic_init(&s, traj.k).unwrap(), 1e-9).unwrap();
            assert_eq!(&single, traj);
        }
        let permuted = s.clone().with_k_grid(vec![0.3, 4.0]).unwrap();
        let sub = evolve_all(&permuted, 1e-9).unwrap();
        assert_eq!(sub[1], all[2]);
    }
}

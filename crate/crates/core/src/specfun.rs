//! Bessel functions `J_ν`, `Y_ν` and Hankel functions `H^(1,2)_ν` of real
//! order `ν ≥ 0` at real positive argument.
//!
//! Two evaluation regimes:
//! - `x ≤ 12` (or `ν > x`): ascending power series. `Y_ν` comes from
//!   `(J_ν cos νπ − J_{−ν}) / sin νπ`; within `1e-6` of an integer order it
//!   is interpolated from four nearby non-integer orders.
//! - `x > 12`: Hankel asymptotic expansion at the reduced orders
//!   `ν − ⌊ν⌋` and `ν − ⌊ν⌋ + 1`, then forward recurrence up to `ν`
//!   (stable for both kinds while the order stays below `x`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Argument above which the asymptotic expansion is used.
pub const ASYMPTOTIC_THRESHOLD: f64 = 12.0;

/// Distance to the nearest integer below which `Y_ν` comes from the
/// integer-order series plus a first-order correction in `ν − n`.
const NEAR_INTEGER: f64 = 1e-6;
/// Order offset of the central difference estimating `∂Y_ν/∂ν` at an integer.
const SLOPE_STEP: f64 = 1e-3;

const MAX_SERIES_TERMS: usize = 500;

/// A validated (order, argument) pair with `ν > 0` and `x > 0`, both finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedArg {
    order: f64,
    argument: f64,
}

impl OrderedArg {
    pub fn new(order: f64, argument: f64) -> Result<Self> {
        if !order.is_finite() || order <= 0.0 {
            return Err(Error::Domain(format!("order must be finite and positive, got {order}")));
        }
        if !argument.is_finite() || argument <= 0.0 {
            return Err(Error::Domain(format!(
                "argument must be finite and positive, got {argument}"
            )));
        }
        Ok(Self { order, argument })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn argument(&self) -> f64 {
        self.argument
    }

    pub fn hankel(&self, kind: HankelKind) -> Complex64 {
        let (j, y) = jy_unchecked(self.order, self.argument);
        kind.combine(j, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelKind {
    /// `J + iY`
    First,
    /// `J − iY`
    Second,
}

impl HankelKind {
    fn combine(self, j: f64, y: f64) -> Complex64 {
        match self {
            HankelKind::First => Complex64::new(j, y),
            HankelKind::Second => Complex64::new(j, -y),
        }
    }
}

fn check_order(order: f64) -> Result<()> {
    if !order.is_finite() || order < 0.0 {
        return Err(Error::Domain(format!("order must be finite and non-negative, got {order}")));
    }
    Ok(())
}

/// Bessel function of the first kind `J_ν(x)`, `ν ≥ 0`, `x ≥ 0`.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    check_order(order)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("J_ν requires finite x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if order == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(jy_unchecked(order, x).0)
}

/// Bessel function of the second kind `Y_ν(x)`, `ν ≥ 0`, `x > 0`.
pub fn bessel_y(order: f64, x: f64) -> Result<f64> {
    check_order(order)?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("Y_ν requires finite x > 0, got {x}")));
    }
    Ok(jy_unchecked(order, x).1)
}

/// Both kinds at once; cheaper than two separate calls.
pub fn bessel_jy(order: f64, x: f64) -> Result<(f64, f64)> {
    check_order(order)?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("J_ν, Y_ν require finite x > 0, got {x}")));
    }
    Ok(jy_unchecked(order, x))
}

/// Hankel function `H^(1)_ν = J_ν + iY_ν` or `H^(2)_ν = J_ν − iY_ν`.
pub fn hankel(kind: HankelKind, order: f64, x: f64) -> Result<Complex64> {
    let (j, y) = bessel_jy(order, x)?;
    Ok(kind.combine(j, y))
}

/// `H^(1)_ν(x)` for any real order, folding negative orders with
/// `H^(1)_{−μ} = e^{iμπ} H^(1)_μ`.
pub fn hankel1_signed_order(order: f64, x: f64) -> Result<Complex64> {
    if order >= 0.0 {
        return hankel(HankelKind::First, order, x);
    }
    let mu = -order;
    let h = hankel(HankelKind::First, mu, x)?;
    Ok(Complex64::from_polar(1.0, mu * PI) * h)
}

fn jy_unchecked(order: f64, x: f64) -> (f64, f64) {
    if x > ASYMPTOTIC_THRESHOLD && order <= x {
        jy_asymptotic_recurrence(order, x)
    } else {
        (j_series(order, x), y_series(order, x))
    }
}

/// Ascending series `Σ (−1)^m (x/2)^{2m+ν} / (m! Γ(m+ν+1))` for any real
/// order that is not a negative integer. Summed in double-double so the
/// cancellation between terms of size `~e^x` costs no accuracy up to x ≈ 25.
fn j_series(order: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -Dd::square(half);
    let lead = half.powf(order) / libm::tgamma(order + 1.0);
    let mut term = Dd::from(1.0);
    let mut sum = Dd::from(1.0);
    for m in 1..MAX_SERIES_TERMS {
        let mf = m as f64;
        term = term * q / (Dd::sum(mf, order) * mf);
        sum = sum + term;
        // The terms only decrease monotonically once m exceeds |order| and x/2.
        if mf > half && mf + order > half && term.hi.abs() <= 1e-33 * sum.hi.abs() {
            break;
        }
    }
    lead * sum.to_f64()
}

fn y_series(order: f64, x: f64) -> f64 {
    let nearest = order.round();
    let offset = order - nearest;
    if offset.abs() < NEAR_INTEGER {
        // Exact integer-order value plus a slope in the order taken from
        // two offset non-integer orders.
        let n = nearest as u32;
        let slope = (y_reflection(nearest + SLOPE_STEP, x)
            - y_reflection(nearest - SLOPE_STEP, x))
            / (2.0 * SLOPE_STEP);
        y_integer_series(n, x) + offset * slope
    } else {
        y_reflection(order, x)
    }
}

/// Integer-order limit of the reflection formula:
/// `Y_n = (2/π) J_n ln(x/2) − (1/π) Σ_{k<n} (n−k−1)!/k! (x/2)^{2k−n}
///        − (1/π) (x/2)^n Σ_k (ψ(k+1) + ψ(n+k+1)) (−x²/4)^k / (k! (n+k)!)`.
fn y_integer_series(n: u32, x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let half = 0.5 * x;
    let nf = f64::from(n);
    let jn = j_series(nf, x);

    let mut finite = 0.0;
    if n > 0 {
        // k = 0 term is (n−1)! (x/2)^{−n}; ratio to the next is (x/2)²/((k+1)(n−k−1)).
        let mut term = libm::tgamma(nf) * half.powi(-(n as i32));
        finite += term;
        for k in 0..n.saturating_sub(1) {
            let kf = f64::from(k);
            term *= half * half / ((kf + 1.0) * (nf - kf - 1.0));
            finite += term;
        }
    }

    let q = -Dd::square(half);
    let mut term = Dd::from(1.0);
    let mut psi_k = Dd::from(-EULER_GAMMA);
    let mut psi_nk = Dd::from(-EULER_GAMMA);
    for i in 1..=n {
        psi_nk = psi_nk + Dd::from(1.0) / f64::from(i);
    }
    let mut tail = psi_k + psi_nk;
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        term = term * q / (Dd::sum(kf, nf) * kf);
        psi_k = psi_k + Dd::from(1.0) / kf;
        psi_nk = psi_nk + Dd::from(1.0) / (kf + nf);
        let add = (psi_k + psi_nk) * term;
        tail = tail + add;
        if kf > half && add.hi.abs() <= 1e-33 * tail.hi.abs() {
            break;
        }
    }
    let tail = tail.to_f64() / libm::tgamma(nf + 1.0);

    (2.0 * jn * half.ln() - finite - half.powi(n as i32) * tail) / PI
}

/// `Y_ν = (J_ν cos νπ − J_{−ν}) / sin νπ` for non-integer `ν` of either sign.
fn y_reflection(order: f64, x: f64) -> f64 {
    let (s, c) = sin_cos_pi(order);
    (j_series(order, x) * c - j_series(-order, x)) / s
}

/// `sin(νπ)`, `cos(νπ)` with the argument reduced exactly.
fn sin_cos_pi(v: f64) -> (f64, f64) {
    let r = v - 2.0 * (0.5 * v).round();
    (r * PI).sin_cos()
}

fn jy_asymptotic_recurrence(order: f64, x: f64) -> (f64, f64) {
    let base = order.floor();
    let frac = order - base;
    let steps = base as usize;
    let (j0, y0) = jy_asymptotic(frac, x);
    if steps == 0 {
        return (j0, y0);
    }
    let (mut j1, mut y1) = jy_asymptotic(frac + 1.0, x);
    let (mut jp, mut yp) = (j0, y0);
    for n in 1..steps {
        let f = 2.0 * (frac + n as f64) / x;
        let (jn, yn) = (f * j1 - jp, f * y1 - yp);
        jp = j1;
        yp = y1;
        j1 = jn;
        y1 = yn;
    }
    (j1, y1)
}

/// Large-argument Hankel expansion with `P`, `Q` summed up to the smallest term.
fn jy_asymptotic(order: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * order * order;
    let mut p = 0.0f64;
    let mut q = 0.0f64;
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 0..200usize {
        let mag = term.abs();
        if k > 2 && mag > prev {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if mag == 0.0 || mag < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
        prev = mag;
        let odd = (2 * k + 1) as f64;
        term *= (mu - odd * odd) / (8.0 * (k + 1) as f64 * x);
    }
    let chi = x - (0.5 * order + 0.25) * PI;
    let (s, c) = chi.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// Unevaluated sum `hi + lo` carrying about 32 significant digits.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self { hi: s, lo: b - (s - a) }
    }

    fn sum(a: f64, b: f64) -> Self {
        Self::two_sum(a, b)
    }

    fn square(a: f64) -> Self {
        let p = a * a;
        Self { hi: p, lo: a.mul_add(a, -p) }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, rhs.hi);
        let t = Dd::two_sum(self.lo, rhs.lo);
        let s = Dd::quick_two_sum(s.hi, s.lo + t.hi);
        Dd::quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let p = self.hi * rhs.hi;
        let err = self.hi.mul_add(rhs.hi, -p);
        Dd::quick_two_sum(p, err + (self.hi * rhs.lo + self.lo * rhs.hi))
    }
}

impl std::ops::Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, rhs: f64) -> Dd {
        self * Dd::from(rhs)
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self + -(rhs * q1);
        let q2 = r.hi / rhs.hi;
        let r = r + -(rhs * q2);
        let q3 = r.hi / rhs.hi;
        Dd::quick_two_sum(q1, q2) + Dd::from(q3)
    }
}

impl std::ops::Div<f64> for Dd {
    type Output = Dd;
    fn div(self, rhs: f64) -> Dd {
        self / Dd::from(rhs)
    }
}

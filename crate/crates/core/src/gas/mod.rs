//! γ-law gas: pressure `v^{-γ}`, internal energy `v^{1-γ}/(γ-1)` and relative quantities.
//!
//! Viscosity is fixed to one throughout the crate and is not a parameter.

mod bounds;

pub use bounds::{
    calibrate_constants, verify_constants, BoundCheck, BoundConstants, BoundReport, Inequality,
    SweepBox, Violation,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GasError {
    #[error("adiabatic exponent must exceed 1, got {0}")]
    InvalidExponent(f64),
    #[error("specific volume must be positive and finite, got {0}")]
    NonPositiveVolume(f64),
}

/// Exponents with a cheaper evaluation path than `powf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PowPath {
    Two,
    Three,
    General,
}

/// Barotropic pressure law `p(v) = v^{-γ}` with `γ > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasLaw {
    gamma: f64,
    path: PowPath,
}

impl GasLaw {
    pub fn new(gamma: f64) -> Result<Self, GasError> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(GasError::InvalidExponent(gamma));
        }
        let path = if gamma == 2.0 {
            PowPath::Two
        } else if gamma == 3.0 {
            PowPath::Three
        } else {
            PowPath::General
        };
        Ok(Self { gamma, path })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Checked pressure.
    pub fn pressure(&self, v: f64) -> Result<f64, GasError> {
        check_volume(v).map(|v| self.pressure_at(v))
    }

    /// Checked internal energy.
    pub fn energy(&self, v: f64) -> Result<f64, GasError> {
        check_volume(v).map(|v| self.energy_at(v))
    }

    /// `v^{-γ}` without a domain check.
    #[inline]
    pub fn pressure_at(&self, v: f64) -> f64 {
        match self.path {
            PowPath::Two => 1.0 / (v * v),
            PowPath::Three => 1.0 / (v * v * v),
            PowPath::General => v.powf(-self.gamma),
        }
    }

    /// `p'(v) = -γ v^{-γ-1}` without a domain check.
    #[inline]
    pub fn pressure_slope_at(&self, v: f64) -> f64 {
        match self.path {
            PowPath::Two => -2.0 / (v * v * v),
            PowPath::Three => -3.0 / ((v * v) * (v * v)),
            PowPath::General => -self.gamma * self.pressure_at(v) / v,
        }
    }

    /// `p''(v) = γ(γ+1) v^{-γ-2}` without a domain check.
    #[inline]
    pub fn pressure_curvature_at(&self, v: f64) -> f64 {
        self.gamma * (self.gamma + 1.0) * self.pressure_at(v) / (v * v)
    }

    /// `Q(v) = v^{1-γ}/(γ-1)` without a domain check.
    #[inline]
    pub fn energy_at(&self, v: f64) -> f64 {
        v * self.pressure_at(v) / (self.gamma - 1.0)
    }

    /// Lagrangian sound speed `√(-p'(v))`.
    #[inline]
    pub fn sound_speed_at(&self, v: f64) -> f64 {
        (-self.pressure_slope_at(v)).sqrt()
    }

    /// `p(w + dv) - p(w)`, accurate to relative round-off even when `|dv| ≪ w`.
    #[inline]
    pub fn pressure_jump(&self, w: f64, dv: f64) -> f64 {
        // Closed forms are the binomial expansions cleared of denominators: one division.
        let v = w + dv;
        match self.path {
            PowPath::Two => -dv * (2.0 * w + dv) / ((w * v) * (w * v)),
            PowPath::Three => {
                -dv * (w * (3.0 * w + 3.0 * dv) + dv * dv) / ((w * v) * (w * v) * (w * v))
            }
            PowPath::General => self.pressure_at(w) * pow_m1(dv / w, -self.gamma),
        }
    }

    /// `p(w + dv | w)`, accurate for tiny `dv`.
    #[inline]
    pub fn pressure_excess(&self, w: f64, dv: f64) -> f64 {
        let v = w + dv;
        match self.path {
            PowPath::Two => dv * dv * (3.0 * w + 2.0 * dv) / (w * (w * v) * (w * v)),
            PowPath::Three => {
                dv * dv * (w * (6.0 * w + 8.0 * dv) + 3.0 * dv * dv)
                    / (w * (w * v) * (w * v) * (w * v))
            }
            PowPath::General => self.pressure_at(w) * pow_m1_lin(dv / w, -self.gamma),
        }
    }

    /// `Q(w + dv | w)`, accurate for tiny `dv`.
    #[inline]
    pub fn energy_excess(&self, w: f64, dv: f64) -> f64 {
        let v = w + dv;
        match self.path {
            PowPath::Two => dv * dv / (w * (w * v)),
            PowPath::Three => dv * dv * (3.0 * w + 2.0 * dv) / (2.0 * w * (w * v) * (w * v)),
            PowPath::General => self.energy_at(w) * pow_m1_lin(dv / w, 1.0 - self.gamma),
        }
    }

    /// Writes `p(v_i)` into `out`; returns false if some `v_i` is not a positive finite number.
    #[inline]
    pub fn fill_pressure(&self, v: &[f64], out: &mut [f64]) -> bool {
        let mut ok = true;
        match self.path {
            PowPath::Two => {
                for (p, &x) in out.iter_mut().zip(v) {
                    ok &= x > 0.0 && x < f64::INFINITY;
                    *p = 1.0 / (x * x);
                }
            }
            PowPath::Three => {
                for (p, &x) in out.iter_mut().zip(v) {
                    ok &= x > 0.0 && x < f64::INFINITY;
                    *p = 1.0 / (x * x * x);
                }
            }
            PowPath::General => {
                for (p, &x) in out.iter_mut().zip(v) {
                    ok &= x > 0.0 && x < f64::INFINITY;
                    *p = x.powf(-self.gamma);
                }
            }
        }
        ok
    }

    /// Checked `p(v|w)`.
    pub fn pressure_relative(&self, v: f64, w: f64) -> Result<f64, GasError> {
        check_volume(v)?;
        check_volume(w)?;
        Ok(self.pressure_excess(w, v - w))
    }

    /// Checked `Q(v|w)`.
    pub fn energy_relative(&self, v: f64, w: f64) -> Result<f64, GasError> {
        check_volume(v)?;
        check_volume(w)?;
        Ok(self.energy_excess(w, v - w))
    }
}

fn check_volume(v: f64) -> Result<f64, GasError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(GasError::NonPositiveVolume(v))
    }
}

/// `Σ_{j≥first} C(k, j) s^j` truncated where the next term is below round-off for `|s| < 1e-2`.
#[inline]
fn binomial_series(s: f64, k: f64, first: u32) -> f64 {
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for j in 1..=10u32 {
        coeff *= (k - f64::from(j) + 1.0) / f64::from(j);
        power *= s;
        if j >= first {
            sum += coeff * power;
        }
    }
    sum
}

/// `(1+s)^k - 1` without cancellation near `s = 0`.
#[inline]
fn pow_m1(s: f64, k: f64) -> f64 {
    if s.abs() < 1e-3 {
        binomial_series(s, k, 1)
    } else {
        (1.0 + s).powf(k) - 1.0
    }
}

/// `(1+s)^k - 1 - k s` without cancellation near `s = 0`.
#[inline]
pub(crate) fn pow_m1_lin(s: f64, k: f64) -> f64 {
    if s.abs() < 1e-2 {
        binomial_series(s, k, 2)
    } else {
        (1.0 + s).powf(k) - 1.0 - k * s
    }
}

/// A scalar function of specific volume with its derivative.
pub trait Potential {
    fn value(&self, v: f64) -> Result<f64, GasError>;
    fn slope(&self, v: f64) -> Result<f64, GasError>;
}

/// Pressure as a [`Potential`].
#[derive(Debug, Clone, Copy)]
pub struct Pressure(pub GasLaw);

/// Internal energy as a [`Potential`]; its slope is `-p`.
#[derive(Debug, Clone, Copy)]
pub struct Energy(pub GasLaw);

impl Potential for Pressure {
    fn value(&self, v: f64) -> Result<f64, GasError> {
        self.0.pressure(v)
    }
    fn slope(&self, v: f64) -> Result<f64, GasError> {
        check_volume(v).map(|v| self.0.pressure_slope_at(v))
    }
}

impl Potential for Energy {
    fn value(&self, v: f64) -> Result<f64, GasError> {
        self.0.energy(v)
    }
    fn slope(&self, v: f64) -> Result<f64, GasError> {
        self.0.pressure(v).map(|p| -p)
    }
}

/// `F(v|w) = F(v) - F(w) - F'(w)(v - w)` evaluated literally.
///
/// Prefer [`GasLaw::pressure_relative`] and [`GasLaw::energy_relative`] when `v ≈ w`.
pub fn relative_quantity<F: Potential>(f: &F, v: f64, w: f64) -> Result<f64, GasError> {
    Ok(f.value(v)? - f.value(w)? - f.slope(w)? * (v - w))
}

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Div, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex number stored as natural-log magnitude and phase, so products
/// of thousands of factors stay representable. Exact zero is a flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_mag: f64,
    pub phase: f64,
    pub is_zero: bool,
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_mag: f64::NEG_INFINITY,
        phase: 0.0,
        is_zero: true,
    };

    pub const ONE: LogComplex = LogComplex {
        log_mag: 0.0,
        phase: 0.0,
        is_zero: false,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            log_mag,
            phase: wrap_phase(phase),
            is_zero: false,
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            Self::new(z.norm().ln(), z.arg())
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// Back to an ordinary complex number; may overflow to infinity.
    pub fn to_complex(self) -> Complex64 {
        if self.is_zero {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.log_mag.exp(), self.phase)
        }
    }

    /// Base-10 log of the magnitude (`-inf` for zero).
    pub fn log10_mag(self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.log_mag / std::f64::consts::LN_10
        }
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln_abs(self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.log_mag
        }
    }

    pub fn powu(self, e: u64) -> Self {
        if e == 0 {
            return Self::ONE;
        }
        if self.is_zero {
            return Self::ZERO;
        }
        let ef = e as f64;
        Self::new(self.log_mag * ef, wrap_phase(self.phase) * ef)
    }

    pub fn recip(self) -> Self {
        if self.is_zero {
            Self {
                log_mag: f64::INFINITY,
                phase: 0.0,
                is_zero: false,
            }
        } else {
            Self::new(-self.log_mag, -self.phase)
        }
    }

    pub fn scale_ln(self, ln_factor: f64) -> Self {
        if self.is_zero {
            self
        } else {
            Self::new(self.log_mag + ln_factor, self.phase)
        }
    }

    /// Relative distance `|self/other - 1|`, both nonzero.
    pub fn relative_distance(self, other: Self) -> f64 {
        match (self.is_zero, other.is_zero) {
            (true, true) => 0.0,
            (true, false) | (false, true) => 1.0,
            _ => {
                let q = self / other;
                let z = Complex64::from_polar(q.log_mag.exp(), q.phase);
                (z - Complex64::new(1.0, 0.0)).norm()
            }
        }
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;

    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero || rhs.is_zero {
            LogComplex::ZERO
        } else {
            LogComplex::new(self.log_mag + rhs.log_mag, self.phase + rhs.phase)
        }
    }
}

impl Div for LogComplex {
    type Output = LogComplex;

    /// Division by zero yields `+inf` magnitude; `0/0` is reported as zero
    /// and must be screened by the caller.
    fn div(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero {
            LogComplex::ZERO
        } else {
            self * rhs.recip()
        }
    }
}

impl std::iter::Product for LogComplex {
    fn product<I: Iterator<Item = LogComplex>>(iter: I) -> LogComplex {
        iter.fold(LogComplex::ONE, |a, b| a * b)
    }
}

impl fmt::Display for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "zero")
        } else {
            write!(f, "10^{:.6} * exp({:.6} i)", self.log10_mag(), self.phase)
        }
    }
}

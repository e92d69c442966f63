use std::fmt;
use std::str::FromStr;

use super::RbfError;

/// Radial kernels φ(r) with shape parameter ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// Gaussian, `exp(-ε²r²)`.
    Ga,
    /// Multiquadric, `(1 + ε²r²)^½`.
    Mq,
    /// Inverse quadratic, `(1 + ε²r²)⁻¹`.
    Iq,
    /// Inverse multiquadric, `(1 + ε²r²)^-½`.
    Imq,
    /// Wendland C2, `(1 - r)₊⁴ (4r + 1)`; ignores ε.
    W13,
}

impl Kernel {
    pub const ALL: [Kernel; 5] = [Kernel::Ga, Kernel::Mq, Kernel::Iq, Kernel::Imq, Kernel::W13];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Ga => "ga",
            Kernel::Mq => "mq",
            Kernel::Iq => "iq",
            Kernel::Imq => "imq",
            Kernel::W13 => "w13",
        }
    }

    /// Panics if `r < 0`.
    pub fn eval(self, eps: f64, r: f64) -> f64 {
        assert!(r >= 0.0, "kernel radius must be non-negative, got {r}");
        let q = 1.0 + eps * eps * r * r;
        match self {
            Kernel::Ga => (-eps * eps * r * r).exp(),
            Kernel::Mq => q.sqrt(),
            Kernel::Iq => 1.0 / q,
            Kernel::Imq => 1.0 / q.sqrt(),
            Kernel::W13 => {
                if r >= 1.0 {
                    0.0
                } else {
                    (1.0 - r).powi(4) * (4.0 * r + 1.0)
                }
            }
        }
    }

    /// `d/dx φ(|x - c|)`.
    pub fn deriv_x(self, eps: f64, x: f64, c: f64) -> f64 {
        let d = x - c;
        let e2 = eps * eps;
        let q = 1.0 + e2 * d * d;
        match self {
            Kernel::Ga => -2.0 * e2 * d * (-e2 * d * d).exp(),
            Kernel::Mq => e2 * d / q.sqrt(),
            Kernel::Iq => -2.0 * e2 * d / (q * q),
            Kernel::Imq => -e2 * d / (q * q.sqrt()),
            Kernel::W13 => {
                let r = d.abs();
                if r >= 1.0 {
                    0.0
                } else {
                    -20.0 * d * (1.0 - r).powi(3)
                }
            }
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = RbfError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kernel::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| RbfError::UnknownKernel(s.to_string()))
    }
}

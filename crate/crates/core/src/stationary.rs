//! Stationary X-state of two identical detectors in a common thermal (Unruh)
//! bath, parameterized by the detector gap, the Unruh temperature and the
//! conserved correlation Delta0 = Tr[rho S], S = sum_i sigma_i (x) sigma_i.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::qstate::{TwoQubitOperator, C64};

const XSTATE_TOL: f64 = 1e-12;

/// tanh(omega / 2T); exactly 1 at T = 0.
pub fn gamma_from_temperature(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(domain("omega", omega, "omega > 0"));
    }
    if !(temperature >= 0.0) {
        return Err(domain("temperature", temperature, "T >= 0"));
    }
    if temperature == 0.0 {
        return Ok(1.0);
    }
    Ok((omega / (2.0 * temperature)).tanh())
}

/// Unruh temperature T = a / 2 pi.
pub fn temperature_from_acceleration(acceleration: f64) -> Result<f64> {
    if !(acceleration > 0.0) || !acceleration.is_finite() {
        return Err(domain("acceleration", acceleration, "a > 0"));
    }
    Ok(acceleration / (2.0 * PI))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnruhParams {
    pub omega: f64,
    pub temperature: f64,
    /// 1/T; infinite at T = 0.
    pub beta: f64,
    pub gamma: f64,
}

impl UnruhParams {
    pub fn new(omega: f64, temperature: f64) -> Result<Self> {
        let gamma = gamma_from_temperature(omega, temperature)?;
        if !temperature.is_finite() {
            return Err(domain("temperature", temperature, "finite"));
        }
        let beta = if temperature == 0.0 {
            f64::INFINITY
        } else {
            1.0 / temperature
        };
        Ok(Self {
            omega,
            temperature,
            beta,
            gamma,
        })
    }

    pub fn from_acceleration(omega: f64, acceleration: f64) -> Result<Self> {
        Self::new(omega, temperature_from_acceleration(acceleration)?)
    }
}

/// Delta0 = Tr[rho(0) S], restricted to its physical range [-3, 1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct InitialCorrelation(f64);

impl InitialCorrelation {
    pub const SINGLET: Self = Self(-3.0);
    pub const TRIPLET: Self = Self(1.0);

    pub fn new(delta0: f64) -> Result<Self> {
        if !(-3.0..=1.0).contains(&delta0) {
            return Err(domain("delta0", delta0, "[-3, 1]"));
        }
        Ok(Self(delta0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(domain("gamma", gamma, "[0, 1]"));
    }
    Ok(())
}

/// Pauli-basis components of the stationary state: u = <sigma_3 (x) I> =
/// <I (x) sigma_3>, w = <sigma_1 (x) sigma_1> = <sigma_2 (x) sigma_2>,
/// v = <sigma_3 (x) sigma_3>.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochComponents {
    pub u: f64,
    pub w: f64,
    pub v: f64,
}

impl BlochComponents {
    pub fn to_xstate(&self) -> XState {
        XState {
            x: (1.0 + 2.0 * self.u + self.v) / 4.0,
            y: (1.0 - self.v) / 4.0,
            z: (1.0 - 2.0 * self.u + self.v) / 4.0,
            d: self.w / 2.0,
        }
    }
}

pub fn bloch_components(delta0: InitialCorrelation, gamma: f64) -> Result<BlochComponents> {
    check_gamma(gamma)?;
    let (dl, g2) = (delta0.value(), gamma * gamma);
    let den = 3.0 + g2;
    Ok(BlochComponents {
        u: -(3.0 + dl) * gamma / den,
        w: (dl - g2) / den,
        v: (dl + (dl + 2.0) * g2) / den,
    })
}

/// Residuals of the three linear stationarity conditions on (u, w, v).
pub fn algebraic_residuals(c: &BlochComponents, delta0: f64, gamma: f64) -> [f64; 3] {
    let g2 = gamma * gamma;
    let den = 3.0 + g2;
    [
        den * c.u + (3.0 + delta0) * gamma,
        den * c.w - (delta0 - g2),
        den * c.v - (delta0 + (delta0 + 2.0) * g2),
    ]
}

/// The density matrix
///
/// ```text
/// | x 0 0 0 |
/// | 0 y d 0 |
/// | 0 d y 0 |
/// | 0 0 0 z |
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub d: f64,
}

impl XState {
    /// Validated constructor: unit trace, x, z >= 0 and y >= |d|, each to 1e-12.
    pub fn new(x: f64, y: f64, z: f64, d: f64) -> Result<Self> {
        let s = Self { x, y, z, d };
        s.check()?;
        Ok(s)
    }

    pub fn singlet() -> Self {
        Self {
            x: 0.0,
            y: 0.5,
            z: 0.0,
            d: -0.5,
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            x: 0.25,
            y: 0.25,
            z: 0.25,
            d: 0.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        let Self { x, y, z, d } = *self;
        if ![x, y, z, d].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidState("non-finite X-state coefficient".into()));
        }
        let trace = x + 2.0 * y + z;
        if (trace - 1.0).abs() > XSTATE_TOL {
            return Err(Error::InvalidState(format!("x + 2y + z = {trace}")));
        }
        if x < -XSTATE_TOL || z < -XSTATE_TOL || y - d.abs() < -XSTATE_TOL {
            return Err(Error::InvalidState(format!(
                "X-state not positive: x = {x}, z = {z}, y - |d| = {}",
                y - d.abs()
            )));
        }
        Ok(())
    }

    /// Spectrum {x, z, y + d, y - d}.
    pub fn eigenvalues(&self) -> [f64; 4] {
        [self.x, self.z, self.y + self.d, self.y - self.d]
    }

    /// Diagonal of either single-detector marginal: (x + y, y + z).
    pub fn marginal_populations(&self) -> (f64, f64) {
        (self.x + self.y, self.y + self.z)
    }

    pub fn to_bloch(&self) -> BlochComponents {
        BlochComponents {
            u: self.x - self.z,
            w: 2.0 * self.d,
            v: self.x - 2.0 * self.y + self.z,
        }
    }

    pub fn to_density(&self) -> TwoQubitOperator {
        xstate_to_density(self)
    }
}

pub fn stationary_xstate(delta0: InitialCorrelation, gamma: f64) -> Result<XState> {
    check_gamma(gamma)?;
    let (dl, g2) = (delta0.value(), gamma * gamma);
    let den = 3.0 + g2;
    let s = XState {
        x: (3.0 + dl) * (gamma - 1.0).powi(2) / (4.0 * den),
        y: (3.0 - dl - (dl + 1.0) * g2) / (4.0 * den),
        z: (3.0 + dl) * (gamma + 1.0).powi(2) / (4.0 * den),
        d: (dl - g2) / (2.0 * den),
    };
    s.check().map_err(|e| Error::Consistency(format!("stationary state: {e}")))?;
    Ok(s)
}

pub fn xstate_to_density(s: &XState) -> TwoQubitOperator {
    let mut m = Matrix4::<C64>::zeros();
    m[(0, 0)] = s.x.into();
    m[(1, 1)] = s.y.into();
    m[(2, 2)] = s.y.into();
    m[(3, 3)] = s.z.into();
    m[(1, 2)] = s.d.into();
    m[(2, 1)] = s.d.into();
    TwoQubitOperator::new(m)
}

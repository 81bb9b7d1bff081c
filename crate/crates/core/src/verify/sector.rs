//! Sector cones `V_{p pi}`, `V_{-p pi}` and their preservation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcalc::{analytic_calc, CalcPath};
use crate::matcore::Matrix;
use crate::repfun::FunctionSpec;
use crate::sampler::sector_margins;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorParams {
    pub p: f64,
}

impl SectorParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Constraint { field: "p".into(), message: format!("need 0 < p <= 1, got {p}") });
        }
        Ok(Self { p })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cone {
    /// `V_{p pi}`
    Positive,
    /// `V_{-p pi}`
    Negative,
}

impl Cone {
    pub fn opposite(self) -> Self {
        match self {
            Cone::Positive => Cone::Negative,
            Cone::Negative => Cone::Positive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Monotone,
    Decreasing,
}

/// Membership in `V_{p pi}` with margins `(psd_margin(Im X), psd_margin(-Im(e^{-i p pi} X)))`.
pub fn sector_membership(x: &Matrix<f64>, p: f64) -> Result<(bool, (f64, f64))> {
    SectorParams::new(p)?;
    let m = sector_margins(x, p)?;
    Ok((m.0 > 0.0 && m.1 > 0.0, m))
}

/// Membership in either cone; `V_{-p pi}` goes through the adjoint.
pub fn cone_membership(x: &Matrix<f64>, p: f64, cone: Cone) -> Result<(bool, (f64, f64))> {
    match cone {
        Cone::Positive => sector_membership(x, p),
        Cone::Negative => sector_membership(&x.adjoint(), p),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorOutcome {
    pub pass: bool,
    /// Membership margins of `f(X)` in the target cone.
    pub margins: (f64, f64),
    /// `f(X)` is a nonnegative multiple of the identity.
    pub escaped: bool,
    /// Frobenius norm of `f(X)`, the scale for the margins.
    pub scale: f64,
    pub value: Matrix<f64>,
}

impl SectorOutcome {
    /// Worst normalized margin, `0` on the constant escape.
    pub fn normalized(&self) -> f64 {
        if self.escaped {
            0.0
        } else {
            self.margins.0.min(self.margins.1) / (1.0 + self.scale)
        }
    }
}

/// Monotone `f` keeps `V_{+-p pi}`; decreasing `f` swaps the two cones.
pub fn check_sector_map(
    f: &FunctionSpec,
    x: &Matrix<f64>,
    p: f64,
    cone: Cone,
    direction: Direction,
    tau_rel: f64,
) -> Result<SectorOutcome> {
    let tags = &f.class_tags;
    let tagged = tags.nonnegative
        && match direction {
            Direction::Monotone => tags.monotone,
            Direction::Decreasing => tags.decreasing,
        };
    if !tagged {
        return Err(Error::Hypothesis(format!("function is not tagged nonnegative {direction:?}").to_lowercase()));
    }
    let (member, (m1, m2)) = cone_membership(x, p, cone)?;
    if !member {
        return Err(Error::Precondition { message: format!("X is not in the {cone:?} sector cone"), margin: m1.min(m2) });
    }
    let fx = analytic_calc(f, x, CalcPath::Auto)?.value;
    let target = match direction {
        Direction::Monotone => cone,
        Direction::Decreasing => cone.opposite(),
    };
    let (inside, margins) = cone_membership(&fx, p, target)?;
    let n = fx.dim();
    let scale = fx.norm_fro();
    let alpha = fx.trace().re / n as f64;
    let mut shifted = fx.clone();
    shifted.axpy(Complex64::new(-alpha, 0.0), &Matrix::identity(n));
    let tol = tau_rel * (1.0 + scale);
    let escaped = shifted.norm_fro() <= tol && alpha >= -tol;
    Ok(SectorOutcome { pass: inside || escaped, margins, escaped, scale, value: fx })
}


//! Executable forms of the k-tone, Pick, sector and sandwich statements,
//! plus seeded campaigns that aggregate them into reports.

mod campaign;
mod checks;
mod counter;
mod sector;

use serde::{Deserialize, Serialize};

pub use campaign::{
    run_campaign, run_trial, verdict, CampaignOptions, Check, CheckReport, TrialOutcome, Verdict, Worst, CROSS_CHECK_TOL,
    SPOT_CHECK_EVERY, TAU_REL,
};
pub use checks::{
    check_branch, check_derivative_sign, check_pick, check_pick_strict, check_sandwich, check_taylor_remainder, check_half_plane,
    expansion_order_probe, BranchOutcome, Flavor, ProbeReport, HalfPlanePart,
};
pub use counter::{counterexample_search, CounterKind, Witness};
pub use sector::{check_sector_map, cone_membership, sector_membership, Cone, Direction, SectorOutcome, SectorParams};

use crate::error::{Error, Result};
use crate::matcore::{max_eigenvalue, psd_margin, Hermitian};

/// Minimum eigenvalue of a tested matrix together with its size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub value: f64,
    /// Frobenius norm of the tested matrix.
    pub scale: f64,
}

impl Margin {
    pub fn of(h: &Hermitian<f64>) -> Result<Self> {
        Ok(Self { value: psd_margin(h)?, scale: h.norm_fro() })
    }

    /// `value / (1 + scale)`, comparable against a relative tolerance.
    pub fn normalized(&self) -> f64 {
        self.value / (1.0 + self.scale)
    }

    pub fn passes(&self, tau_rel: f64) -> bool {
        self.normalized() >= -tau_rel
    }

    pub fn refutes(&self, tau_rel: f64) -> bool {
        self.normalized() < -10.0 * tau_rel
    }
}

/// A tested matrix, already oriented so that PSD means the statement holds.
#[derive(Clone, Debug)]
pub struct Tested {
    pub label: &'static str,
    pub matrix: Hermitian<f64>,
    pub margin: Margin,
}

impl Tested {
    pub fn new(label: &'static str, matrix: Hermitian<f64>) -> Result<Self> {
        let margin = Margin::of(&matrix)?;
        Ok(Self { label, matrix, margin })
    }

    /// Worst normalized margin over a set of tested matrices.
    pub fn worst(all: &[Tested]) -> Option<f64> {
        all.iter().map(|t| t.margin.normalized()).reduce(f64::min)
    }
}

/// Inequality direction: `Le` means `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Le,
    Ge,
}

impl Order {
    /// Matrix that is PSD exactly when the inequality holds.
    pub fn adjust(self, lhs: &Hermitian<f64>, rhs: &Hermitian<f64>) -> Hermitian<f64> {
        match self {
            Order::Le => rhs.sub(lhs),
            Order::Ge => lhs.sub(rhs),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Order::Le => Order::Ge,
            Order::Ge => Order::Le,
        }
    }
}

/// Which part of `f(A+iB)` a branch constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Re,
    Im,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    B1,
    B2,
    B3,
    B4,
}

/// The inequality attached to operator k-tone functions, by `k mod 4`.
///
/// * `k = 4k'-2`: `Re f(A+iB) <= even[2k'-2]`
/// * `k = 4k'`: `Re f(A+iB) >= even[2k'-1]`
/// * `k = 4k'-3`: `Im f(A+iB) >= odd[2k'-2]`
/// * `k = 4k'-1`: `Im f(A+iB) <= odd[2k'-1]`
///
/// where `even[j]`, `odd[j]` are the alternating partial sums of
/// [`crate::frechet::TaylorSums`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToneBranch {
    pub k: usize,
    pub branch: Branch,
    pub k_prime: usize,
    pub part: Part,
    /// Index into `even` (Re) or `odd` (Im).
    pub sum_index: usize,
    /// Orientation of `part <= / >= sum`.
    pub order: Order,
}

impl ToneBranch {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Constraint { field: "k".into(), message: "tone order must be >= 1".into() });
        }
        let (branch, k_prime, part, sum_index, order) = match k % 4 {
            2 => {
                let kp = (k + 2) / 4;
                (Branch::B1, kp, Part::Re, 2 * kp - 2, Order::Le)
            }
            0 => {
                let kp = k / 4;
                (Branch::B2, kp, Part::Re, 2 * kp - 1, Order::Ge)
            }
            1 => {
                let kp = (k + 3) / 4;
                (Branch::B3, kp, Part::Im, 2 * kp - 2, Order::Ge)
            }
            _ => {
                let kp = (k + 1) / 4;
                (Branch::B4, kp, Part::Im, 2 * kp - 1, Order::Le)
            }
        };
        Ok(Self { k, branch, k_prime, part, sum_index, order })
    }

    /// Highest derivative order entering the truncated sum.
    pub fn max_order(&self) -> usize {
        match self.part {
            Part::Re => 2 * self.sum_index,
            Part::Im => (2 * self.sum_index).saturating_sub(1),
        }
    }

    /// Branches (1) and (2) also hold for Hermitian, not only PSD, directions.
    pub fn accepts_hermitian_direction(&self) -> bool {
        matches!(self.branch, Branch::B1 | Branch::B2)
    }
}

pub(crate) fn require_psd(b: &Hermitian<f64>, what: &str) -> Result<()> {
    let m = psd_margin(b)?;
    let tol = 1e-12 * (1.0 + b.norm_fro());
    if m < -tol {
        return Err(Error::Precondition { message: format!("{what} must be positive semidefinite"), margin: m });
    }
    Ok(())
}

pub(crate) fn require_pd(b: &Hermitian<f64>, what: &str) -> Result<()> {
    let m = psd_margin(b)?;
    if !(m > 0.0) {
        return Err(Error::Precondition { message: format!("{what} must be positive definite"), margin: m });
    }
    Ok(())
}

/// `psd_margin(-M) = -lambda_max(M)`: validates the sign adjustment of a branch.
pub(crate) fn duality_holds(m: &Hermitian<f64>, flipped: &Hermitian<f64>) -> Result<bool> {
    let lhs = psd_margin(flipped)?;
    let rhs = -max_eigenvalue(m)?;
    Ok((lhs - rhs).abs() <= 1e-12 * (1.0 + m.norm_fro()))
}

//! Optimal times and fields that bring the (1,3) 2-tangle to its maximum,
//! the coupling-ratio windows in which they apply, and validity diagnostics.
//!
//! The branch-1 formulas for the B2 class are evaluated exactly as stated
//! and checked afterwards; a plan whose diagnostics list is non-empty did
//! not pass those checks.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::model::{ChainParams, FieldParams};
use crate::propagator::StateClass;
use crate::tangle::tau13_closed;
use crate::{Error, Result};

/// Energy above which the second B2 branch exists.
pub const B2_BRANCH_ENERGY: f64 = 29.0 / 16.0;
/// Energy above which the GHZ window exists.
pub const GHZ_ENERGY: f64 = 1.5;

const ENERGY_TOL: f64 = 1e-12;
const TANGLE_TOL: f64 = 1e-10;
const DIVERGENCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub k1_plus: f64,
    pub k1_minus: f64,
    pub k2_plus: Option<f64>,
    pub k2_minus: Option<f64>,
    pub k_ghz_plus: Option<f64>,
    pub k_ghz_minus: Option<f64>,
}

/// `K1 = +-sqrt(w^2 - 1)`, `K2 = (13/4 +- sqrt(3 (w^2 - 29/16)))/4`,
/// `K_ghz = (-1 +- sqrt(2 w^2 - 3))/2`; entries with a negative radicand are `None`.
pub fn thresholds(omega_hat_sq: f64) -> Result<Thresholds> {
    if omega_hat_sq <= 1.0 {
        return Err(Error::InvalidEnergy { omega_hat_sq });
    }
    let k1 = (omega_hat_sq - 1.0).sqrt();
    let r2 = 3.0 * (omega_hat_sq - B2_BRANCH_ENERGY);
    let k2 = (r2 >= 0.0).then(|| r2.sqrt());
    let rg = 2.0 * omega_hat_sq - 3.0;
    let kg = (rg >= 0.0).then(|| rg.sqrt());
    Ok(Thresholds {
        k1_plus: k1,
        k1_minus: -k1,
        k2_plus: k2.map(|r| 0.25 * (3.25 + r)),
        k2_minus: k2.map(|r| 0.25 * (3.25 - r)),
        k_ghz_plus: kg.map(|r| 0.5 * (-1.0 + r)),
        k_ghz_minus: kg.map(|r| 0.5 * (-1.0 - r)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum B2Branch {
    /// `tau* = sqrt(3) pi / (4 |1 - K|)`.
    Branch1,
    /// `tau* = pi / sqrt(w^2 - 2K)` with a static transverse field.
    Branch2,
    OutOfRange,
}

impl B2Branch {
    pub fn name(&self) -> &'static str {
        match self {
            B2Branch::Branch1 => "Branch1",
            B2Branch::Branch2 => "Branch2",
            B2Branch::OutOfRange => "OutOfRange",
        }
    }
}

pub fn classify_b2(omega_hat_sq: f64, k_ratio: f64) -> Result<B2Branch> {
    let t = thresholds(omega_hat_sq)?;
    let k = k_ratio;
    let branch = if omega_hat_sq < B2_BRANCH_ENERGY {
        if k.abs() < t.k1_plus {
            B2Branch::Branch1
        } else {
            B2Branch::OutOfRange
        }
    } else if omega_hat_sq > B2_BRANCH_ENERGY {
        // Both K2 thresholds exist above 29/16.
        let (k2m, k2p) = (t.k2_minus.unwrap_or(f64::NAN), t.k2_plus.unwrap_or(f64::NAN));
        if k2m < k && k < k2p {
            B2Branch::Branch2
        } else if (t.k1_minus < k && k < k2m) || (k2p < k && k < t.k1_plus) {
            B2Branch::Branch1
        } else {
            B2Branch::OutOfRange
        }
    } else {
        B2Branch::OutOfRange
    };
    Ok(branch)
}

pub fn tau_star_b2(omega_hat_sq: f64, k_ratio: f64) -> Result<f64> {
    match classify_b2(omega_hat_sq, k_ratio)? {
        B2Branch::Branch1 => {
            let d = (1.0 - k_ratio).abs();
            if d < DIVERGENCE_TOL {
                return Err(Error::DivergentTime { k_ratio });
            }
            Ok(3.0f64.sqrt() * PI / (4.0 * d))
        }
        B2Branch::Branch2 => {
            let r = omega_hat_sq - 2.0 * k_ratio;
            if r <= 0.0 {
                return Err(Error::OutOfRange { k_ratio });
            }
            Ok(PI / r.sqrt())
        }
        B2Branch::OutOfRange => Err(Error::OutOfRange { k_ratio }),
    }
}

pub fn tau_star_ghz(omega_hat_sq: f64, k_ratio: f64) -> Result<f64> {
    let t = thresholds(omega_hat_sq)?;
    let (Some(lo), Some(hi)) = (t.k_ghz_minus, t.k_ghz_plus) else {
        return Err(Error::OutOfRange { k_ratio });
    };
    if omega_hat_sq <= GHZ_ENERGY {
        return Err(Error::OutOfRange { k_ratio });
    }
    if (1.0 + k_ratio).abs() < DIVERGENCE_TOL {
        return Err(Error::DivergentTime { k_ratio });
    }
    if !(lo < k_ratio && k_ratio < hi) {
        return Err(Error::OutOfRange { k_ratio });
    }
    Ok(ghz_time(k_ratio))
}

fn ghz_time(k_ratio: f64) -> f64 {
    2.0f64.sqrt() * PI / (4.0 * (1.0 + k_ratio).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanBranch {
    B2Branch1,
    B2Branch2,
    Ghz,
}

impl PlanBranch {
    pub fn name(&self) -> &'static str {
        match self {
            PlanBranch::B2Branch1 => "Branch1",
            PlanBranch::B2Branch2 => "Branch2",
            PlanBranch::Ghz => "GHZ",
        }
    }
}

/// A failed validity check on an emitted plan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Diagnostic {
    /// `B0^2 + Bz^2` differs from `omega_k^2`.
    EnergyIdentity { residual: f64 },
    /// The closed-form 2-tangle at `tau*` is not maximal for this field
    /// (`variant` 0 is the primary field, 1 the alternate sign choice).
    TangleNotMaximal { variant: u8, value: f64 },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EnergyIdentity { residual } => write!(f, "EnergyIdentity(residual={residual:e})"),
            Diagnostic::TangleNotMaximal { variant, value } => {
                write!(f, "TangleNotMaximal(variant={variant},tau13={value})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalPlan {
    pub branch: PlanBranch,
    pub tau_star: f64,
    /// Transverse amplitude `B0` (non-negative as emitted).
    pub b0: f64,
    /// Longitudinal component `Bz` (non-negative as emitted).
    pub bz: f64,
    pub field: FieldParams,
    /// Second sign choice of `Omega` (B2 branch 1 only).
    pub alt_field: Option<FieldParams>,
    pub diagnostics: Vec<Diagnostic>,
}

impl OptimalPlan {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }

    fn check(mut self, class: StateClass, p: &ChainParams) -> Result<Self> {
        let wk2 = p.omega_k_sq()?;
        let residual = self.b0 * self.b0 + self.bz * self.bz - wk2;
        if residual.abs() > ENERGY_TOL * (1.0 + wk2) {
            self.diagnostics.push(Diagnostic::EnergyIdentity { residual });
        }
        let fields = core::iter::once(self.field).chain(self.alt_field);
        for (variant, f) in fields.enumerate() {
            let value = tau13_closed(class, p, &f, self.tau_star)?;
            if (value - class.tangle_total()).abs() > TANGLE_TOL {
                self.diagnostics.push(Diagnostic::TangleNotMaximal {
                    variant: variant as u8,
                    value,
                });
            }
        }
        Ok(self)
    }
}

/// Optimal fields for the B2 class on `branch`.
pub fn optimal_fields_b2(omega_hat_sq: f64, k_ratio: f64, branch: B2Branch) -> Result<OptimalPlan> {
    let p = ChainParams::new(omega_hat_sq, k_ratio);
    let wk2 = p.omega_k_sq()?;
    let k = k_ratio;
    let plan = match branch {
        B2Branch::Branch2 => OptimalPlan {
            branch: PlanBranch::B2Branch2,
            tau_star: PI / (omega_hat_sq - 2.0 * k).sqrt(),
            b0: wk2.sqrt(),
            bz: 0.0,
            field: FieldParams::new(0.0, 0.0, 0.0),
            alt_field: None,
            diagnostics: Vec::new(),
        },
        B2Branch::Branch1 => {
            let b0 = 2.0 / 3.0f64.sqrt() * (k - 1.0).abs();
            let radicand = omega_hat_sq - 7.0 / 3.0 * k * k + 8.0 / 3.0 * k - 7.0 / 3.0;
            if radicand < 0.0 {
                return Err(Error::NegativeBzSquared { radicand });
            }
            let bz = radicand.sqrt();
            let d = (1.0 - k).abs();
            if d < DIVERGENCE_TOL {
                return Err(Error::DivergentTime { k_ratio });
            }
            OptimalPlan {
                branch: PlanBranch::B2Branch1,
                tau_star: 3.0f64.sqrt() * PI / (4.0 * d),
                b0,
                bz,
                field: FieldParams::from_components(b0, bz, 2.0 * (k - 1.0 + bz), 0.0),
                alt_field: Some(FieldParams::from_components(b0, bz, 2.0 * (k - 1.0 - bz), 0.0)),
                diagnostics: Vec::new(),
            }
        }
        B2Branch::OutOfRange => return Err(Error::OutOfRange { k_ratio }),
    };
    plan.check(StateClass::B2, &p)
}

/// Optimal fields for the GHZ class: `B0 = |1+K|`, `Bz = Omega/2 = sqrt(w^2 - 2(K^2+K+1))`.
pub fn optimal_fields_ghz(omega_hat_sq: f64, k_ratio: f64) -> Result<OptimalPlan> {
    let p = ChainParams::new(omega_hat_sq, k_ratio);
    let k = k_ratio;
    let radicand = omega_hat_sq - 2.0 * (k * k + k + 1.0);
    if radicand < 0.0 {
        return Err(Error::NegativeBzSquared { radicand });
    }
    if (1.0 + k).abs() < DIVERGENCE_TOL {
        return Err(Error::DivergentTime { k_ratio });
    }
    let b0 = (1.0 + k).abs();
    let bz = radicand.sqrt();
    OptimalPlan {
        branch: PlanBranch::Ghz,
        tau_star: ghz_time(k),
        b0,
        bz,
        field: FieldParams::from_components(b0, bz, 2.0 * bz, 0.0),
        alt_field: None,
        diagnostics: Vec::new(),
    }
    .check(StateClass::Ghz, &p)
}

/// Plan for a class: B2 and W share the B2 plan, GHZ has its own.
pub fn plan_for(class: StateClass, omega_hat_sq: f64, k_ratio: f64) -> Result<OptimalPlan> {
    match class {
        StateClass::B2 | StateClass::W => {
            let branch = classify_b2(omega_hat_sq, k_ratio)?;
            let mut plan = optimal_fields_b2(omega_hat_sq, k_ratio, branch)?;
            if class == StateClass::W {
                plan.diagnostics.clear();
                plan = plan.check(StateClass::W, &ChainParams::new(omega_hat_sq, k_ratio))?;
            }
            Ok(plan)
        }
        StateClass::Ghz => optimal_fields_ghz(omega_hat_sq, k_ratio),
        _ => Err(Error::UnsupportedClass),
    }
}

/// Which denominator to use in the inline B2 branch-2 law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum B2LawDenominator {
    /// `(w^2 - 2)^2`, as typeset alongside the branch-2 discussion.
    Printed,
    /// `(w^2 - 2K)^2`, obtained from the general expansion.
    Rederived,
}

/// `1 - 4 (1-K)^2 omega_k^2 sin^4(sqrt(w^2 - 2K) tau) / D^2` for the B2
/// class on the branch-2 field.
pub fn b2_branch2_law(p: &ChainParams, tau: f64, denominator: B2LawDenominator) -> Result<f64> {
    let wk2 = p.omega_k_sq()?;
    let k = p.k_ratio;
    let freq = (p.omega_hat_sq - 2.0 * k).sqrt();
    let d = match denominator {
        B2LawDenominator::Printed => p.omega_hat_sq - 2.0,
        B2LawDenominator::Rederived => p.omega_hat_sq - 2.0 * k,
    };
    Ok(1.0 - 4.0 * (1.0 - k).powi(2) * wk2 / (d * d) * (freq * tau).sin().powi(4))
}

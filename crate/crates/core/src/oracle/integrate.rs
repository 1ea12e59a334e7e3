//! Time-ordered product of midpoint exponentials with Richardson extrapolation.
//!
//! The Hamiltonian is rebuilt here from Pauli tensor products; nothing in
//! this file touches the analytic mode functions.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::linalg::{expm_neg_i, Mat8, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z};
use crate::model::{ChainParams, ControlField, FieldParams};
use crate::{Error, Result, Unitary8};

/// Default integration step in rescaled time.
pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    /// Upper bound on the step; each interval is split into equal steps no larger than this.
    pub step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { step: DEFAULT_STEP }
    }
}

impl IntegratorConfig {
    pub fn new(step: f64) -> Self {
        IntegratorConfig { step }
    }

    /// Largest admissible step, `0.01 / omega_hat`.
    pub fn step_limit(omega_hat_sq: f64) -> f64 {
        0.01 / omega_hat_sq.sqrt()
    }

    pub fn validate(&self, p: &ChainParams) -> Result<()> {
        let limit = Self::step_limit(p.omega_hat_sq);
        if !(self.step > 0.0 && self.step <= limit) {
            return Err(Error::StepTooLarge {
                step: self.step,
                limit,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integration {
    /// Richardson-extrapolated propagator `(4 U_{h/2} - U_h) / 3`.
    pub unitary: Unitary8,
    /// Plain midpoint product at the full step.
    pub coarse: Unitary8,
    /// Plain midpoint product at half the step.
    pub fine: Unitary8,
    /// `max |U_{h/2} - U_h|`.
    pub error_estimate: f64,
    pub steps: usize,
}

/// `Z1 Z2 + K Z2 Z3 + B . sigma_2`, with the tensor products built once.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PauliHamiltonian {
    coupling: Mat8,
    x2: Mat8,
    y2: Mat8,
    z2: Mat8,
    field: ControlField,
}

impl PauliHamiltonian {
    pub(crate) fn new(p: &ChainParams, f: &FieldParams) -> Result<Self> {
        let zz12 = Mat8::kron3(&PAULI_Z, &PAULI_Z, &PAULI_I);
        let zz23 = Mat8::kron3(&PAULI_I, &PAULI_Z, &PAULI_Z);
        Ok(PauliHamiltonian {
            coupling: zz12 + zz23.scale_re(p.k_ratio),
            x2: Mat8::kron3(&PAULI_I, &PAULI_X, &PAULI_I),
            y2: Mat8::kron3(&PAULI_I, &PAULI_Y, &PAULI_I),
            z2: Mat8::kron3(&PAULI_I, &PAULI_Z, &PAULI_I),
            field: f.resolve(p)?,
        })
    }

    pub(crate) fn at(&self, tau: f64) -> Mat8 {
        let (s, c) = (self.field.omega_big * tau + self.field.theta0).sin_cos();
        let b0 = self.field.b0;
        self.coupling + self.x2.scale_re(b0 * c) + self.y2.scale_re(b0 * s) + self.z2.scale_re(self.field.bz)
    }

    /// Ordered product of `exp(-i H(t_mid) h)` over `n` equal steps of `[t0, t1]`.
    pub(crate) fn midpoint_product(&self, t0: f64, t1: f64, n: usize) -> Mat8 {
        let h = (t1 - t0) / n as f64;
        let mut u = Mat8::identity();
        for k in 0..n {
            let mid = t0 + (k as f64 + 0.5) * h;
            u = expm_neg_i(&self.at(mid), h) * u;
        }
        u
    }

    /// Extrapolated propagator from `t0` to `t1`.
    pub(crate) fn segment(&self, t0: f64, t1: f64, step: f64) -> Integration {
        let len = t1 - t0;
        let n = if len > 0.0 { (len / step).ceil().max(1.0) as usize } else { 0 };
        if n == 0 {
            let id = Mat8::identity();
            return Integration {
                unitary: id,
                coarse: id,
                fine: id,
                error_estimate: 0.0,
                steps: 0,
            };
        }
        let coarse = self.midpoint_product(t0, t1, n);
        let fine = self.midpoint_product(t0, t1, 2 * n);
        let unitary = (fine.scale_re(4.0) - coarse).scale_re(1.0 / 3.0);
        Integration {
            unitary,
            coarse,
            fine,
            error_estimate: fine.max_abs_diff(&coarse),
            steps: n,
        }
    }
}

/// Numerically integrated `T exp(-i int_0^tau H dt)`.
pub fn integrate_u(p: &ChainParams, f: &FieldParams, tau: f64, cfg: &IntegratorConfig) -> Result<Integration> {
    cfg.validate(p)?;
    let h = PauliHamiltonian::new(p, f)?;
    Ok(h.segment(0.0, tau, cfg.step))
}

/// Plain (unextrapolated) midpoint product with exactly `n` steps.
pub fn midpoint_product(p: &ChainParams, f: &FieldParams, tau: f64, n: usize) -> Result<Unitary8> {
    let h = PauliHamiltonian::new(p, f)?;
    Ok(h.midpoint_product(0.0, tau, n.max(1)))
}

/// Propagator accumulated along increasing times, one extrapolated
/// segment per call.
#[derive(Clone, Debug)]
pub struct OracleTrajectory {
    h: PauliHamiltonian,
    step: f64,
    tau: f64,
    u: Unitary8,
    error_estimate: f64,
}

impl OracleTrajectory {
    pub fn new(p: &ChainParams, f: &FieldParams, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate(p)?;
        Ok(OracleTrajectory {
            h: PauliHamiltonian::new(p, f)?,
            step: cfg.step,
            tau: 0.0,
            u: Mat8::identity(),
            error_estimate: 0.0,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Sum of the per-segment step-halving estimates so far.
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    /// Advances to `tau` (ignored if not ahead of the current time).
    pub fn advance_to(&mut self, tau: f64) -> &Unitary8 {
        if tau > self.tau {
            let seg = self.h.segment(self.tau, tau, self.step);
            self.u = seg.unitary * self.u;
            self.error_estimate += seg.error_estimate;
            self.tau = tau;
        }
        &self.u
    }
}

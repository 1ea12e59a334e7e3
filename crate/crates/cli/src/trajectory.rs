use std::io::Write;

use qbtangle_core::oracle::integrate::DEFAULT_STEP;
use qbtangle_core::oracle::{IntegratorConfig, OracleTrajectory};
use qbtangle_core::optimal::plan_for;
use qbtangle_core::propagator::evolve_general;
use qbtangle_core::tangle::{closed_pair, tangles};
use qbtangle_core::{ChainParams, FieldParams, PureState3, StateClass, TanglePair};

use crate::config::{Mode, Settings};
use crate::error::CliError;
use crate::output::{csv_row, num};

pub const DEFAULT_STEPS: usize = 1001;

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRun {
    pub class: StateClass,
    pub params: ChainParams,
    pub field: FieldParams,
    pub tau_max: f64,
    pub steps: usize,
    pub mode: Mode,
    pub j12_hz: Option<f64>,
}

impl TrajectoryRun {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let class = Settings::require(s.class, "class")?;
        let params = ChainParams::new(Settings::require(s.omega_sq, "omega_sq")?, Settings::require(s.k, "k")?);
        params.omega_k_sq()?;
        let optimal = s.optimal.unwrap_or(false);
        let (field, default_tau_max) = if optimal {
            if s.phi.is_some() || s.omega_big.is_some() || s.theta0.is_some() {
                return Err(CliError::Usage("--optimal cannot be combined with phi, omega_big or theta0".into()));
            }
            let plan = plan_for(class, params.omega_hat_sq, params.k_ratio)?;
            for d in &plan.diagnostics {
                eprintln!("warning: plan diagnostic {d}");
            }
            (plan.field, Some(2.0 * plan.tau_star))
        } else {
            let f = FieldParams::new(s.phi.unwrap_or(0.0), s.omega_big.unwrap_or(0.0), s.theta0.unwrap_or(0.0));
            (f, None)
        };
        let tau_max = match s.tau_max.or(default_tau_max) {
            Some(t) => t,
            None => return Err(CliError::Usage("tau_max is required unless --optimal is given".into())),
        };
        if !(tau_max > 0.0) {
            return Err(CliError::Usage(format!("tau_max must be positive, got {tau_max}")));
        }
        let steps = s.steps.unwrap_or(DEFAULT_STEPS);
        if steps < 2 {
            return Err(CliError::Usage(format!("steps must be at least 2, got {steps}")));
        }
        if let Some(j) = s.j12_hz {
            if !(j > 0.0) {
                return Err(CliError::Usage(format!("j12_hz must be positive, got {j}")));
            }
        }
        Ok(TrajectoryRun {
            class,
            params,
            field,
            tau_max,
            steps,
            mode: s.mode.unwrap_or(Mode::Closed),
            j12_hz: s.j12_hz,
        })
    }

    /// Grid point `j`; the last one is exactly `tau_max`.
    pub fn tau_at(&self, j: usize) -> f64 {
        if j + 1 == self.steps {
            self.tau_max
        } else {
            self.tau_max * j as f64 / (self.steps - 1) as f64
        }
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> Result<(), CliError> {
        let mut header = vec!["tau".to_string(), "tau13".into(), "tau123".into()];
        if self.j12_hz.is_some() {
            header.push("t_seconds".into());
        }
        csv_row(w, &header)?;

        let psi0 = self.class.representative();
        let mut oracle = match self.mode {
            Mode::Oracle => {
                let step = DEFAULT_STEP.min(IntegratorConfig::step_limit(self.params.omega_hat_sq));
                Some(OracleTrajectory::new(&self.params, &self.field, &IntegratorConfig::new(step))?)
            }
            _ => None,
        };
        for j in 0..self.steps {
            let tau = self.tau_at(j);
            let t: TanglePair = match self.mode {
                Mode::Closed => closed_pair(self.class, &self.params, &self.field, tau)?,
                Mode::Chain => tangles(&evolve_general(&psi0, &self.params, &self.field, tau)?)?,
                Mode::Oracle => {
                    let u = oracle.as_mut().expect("oracle mode").advance_to(tau);
                    tangles(&PureState3::from_amplitudes(u.apply(psi0.amplitudes())))?
                }
            };
            let mut row = vec![num(tau), num(t.tau13), num(t.tau123)];
            if let Some(j12) = self.j12_hz {
                row.push(num(tau / j12));
            }
            csv_row(w, &row)?;
        }
        Ok(())
    }
}

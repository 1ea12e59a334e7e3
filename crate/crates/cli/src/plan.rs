use std::io::Write;

use qbtangle_core::optimal::{
    classify_b2, optimal_fields_b2, optimal_fields_ghz, tau_star_b2, tau_star_ghz, thresholds, B2Branch,
};
use qbtangle_core::{ChainParams, Error, OptimalPlan, StateClass};

use crate::config::Settings;
use crate::error::CliError;
use crate::output::num;

fn kv(w: &mut dyn Write, key: &str, value: impl AsRef<str>) -> std::io::Result<()> {
    writeln!(w, "{key}={}", value.as_ref())
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), num)
}

fn write_plan(w: &mut dyn Write, plan: &OptimalPlan) -> std::io::Result<()> {
    kv(w, "tau_star", num(plan.tau_star))?;
    kv(w, "B0", num(plan.b0))?;
    kv(w, "Bz", num(plan.bz))?;
    kv(w, "Omega", num(plan.field.omega_big))?;
    kv(w, "phi", num(plan.field.phi))?;
    kv(w, "theta0", num(plan.field.theta0))?;
    if let Some(alt) = plan.alt_field {
        kv(w, "Omega_alt", num(alt.omega_big))?;
    }
    if plan.diagnostics.is_empty() {
        kv(w, "diagnostics", "none")?;
    }
    for d in &plan.diagnostics {
        kv(w, "diagnostic", d.to_string())?;
    }
    Ok(())
}

fn write_error(w: &mut dyn Write, e: &Error) -> std::io::Result<()> {
    kv(w, "diagnostic", e.kind())?;
    match *e {
        Error::NegativeBzSquared { radicand } => kv(w, "radicand", num(radicand)),
        Error::InsufficientEnergy { omega_k_sq } => kv(w, "omega_k_sq", num(omega_k_sq)),
        _ => Ok(()),
    }
}

/// `key=value` record of the optimal time, fields and thresholds. Domain
/// failures are written into the record and then returned as errors.
pub fn run(s: &Settings, w: &mut dyn Write) -> Result<(), CliError> {
    let class = Settings::require(s.class, "class")?;
    let p = ChainParams::new(Settings::require(s.omega_sq, "omega_sq")?, Settings::require(s.k, "k")?);
    let (w2, k) = (p.omega_hat_sq, p.k_ratio);
    let t = thresholds(w2)?;
    kv(w, "class", class.name())?;
    kv(w, "omega_sq", num(w2))?;
    kv(w, "k", num(k))?;
    kv(w, "k1_plus", num(t.k1_plus))?;
    kv(w, "k1_minus", num(t.k1_minus))?;

    // Reported even when no field plan exists.
    let mut formula_tau = None;
    let outcome = match class {
        StateClass::B2 | StateClass::W => {
            kv(w, "k2_plus", opt(t.k2_plus))?;
            kv(w, "k2_minus", opt(t.k2_minus))?;
            let branch = classify_b2(w2, k)?;
            kv(w, "branch", branch.name())?;
            if branch == B2Branch::OutOfRange {
                Err(Error::OutOfRange { k_ratio: k })
            } else {
                formula_tau = tau_star_b2(w2, k).ok();
                optimal_fields_b2(w2, k, branch)
            }
        }
        StateClass::Ghz => {
            kv(w, "k_ghz_plus", opt(t.k_ghz_plus))?;
            kv(w, "k_ghz_minus", opt(t.k_ghz_minus))?;
            match tau_star_ghz(w2, k) {
                Ok(_) => {
                    kv(w, "branch", "GHZ")?;
                    optimal_fields_ghz(w2, k)
                }
                Err(e) => {
                    kv(w, "branch", "OutOfRange")?;
                    Err(e)
                }
            }
        }
        _ => Err(Error::UnsupportedClass),
    };
    match outcome {
        Ok(plan) => {
            write_plan(w, &plan)?;
            Ok(())
        }
        Err(e) => {
            if let Some(tau) = formula_tau {
                kv(w, "tau_star", num(tau))?;
            }
            write_error(w, &e)?;
            Err(e.into())
        }
    }
}

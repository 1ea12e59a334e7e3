use std::io::Write;

use qbtangle_core::optimal::{classify_b2, optimal_fields_b2, optimal_fields_ghz, tau_star_ghz, B2Branch};
use qbtangle_core::{Error, OptimalPlan, StateClass};

use crate::config::Settings;
use crate::error::CliError;
use crate::output::{csv_row, num};

pub const DEFAULT_K_STEPS: usize = 101;

/// Grid point `j` of `k_steps` on `[k_min, k_max]`, both ends exact.
pub fn k_at(k_min: f64, k_max: f64, k_steps: usize, j: usize) -> f64 {
    if j + 1 == k_steps {
        k_max
    } else {
        k_min + (k_max - k_min) * j as f64 / (k_steps - 1) as f64
    }
}

fn row(class: StateClass, w2: f64, k: f64) -> (String, Result<OptimalPlan, Error>) {
    match class {
        StateClass::B2 | StateClass::W => match classify_b2(w2, k) {
            Ok(B2Branch::OutOfRange) => ("OutOfRange".into(), Err(Error::OutOfRange { k_ratio: k })),
            Ok(b) => (b.name().into(), optimal_fields_b2(w2, k, b)),
            Err(e) => (e.kind().into(), Err(e)),
        },
        StateClass::Ghz => match tau_star_ghz(w2, k) {
            Ok(_) => ("GHZ".into(), optimal_fields_ghz(w2, k)),
            Err(e) => (e.kind().into(), Err(e)),
        },
        _ => ("UnsupportedClass".into(), Err(Error::UnsupportedClass)),
    }
}

/// `K,branch,tau_star,B0,Bz,Omega,valid` for every K on the grid. Rows whose
/// plan fails carry `nan` and `valid=0`.
pub fn run(s: &Settings, w: &mut dyn Write) -> Result<(), CliError> {
    let class = Settings::require(s.class, "class")?;
    if !matches!(class, StateClass::B2 | StateClass::W | StateClass::Ghz) {
        return Err(Error::UnsupportedClass.into());
    }
    let w2 = Settings::require(s.omega_sq, "omega_sq")?;
    let k_min = Settings::require(s.k_min, "k_min")?;
    let k_max = Settings::require(s.k_max, "k_max")?;
    let k_steps = s.k_steps.unwrap_or(DEFAULT_K_STEPS);
    if k_steps < 2 {
        return Err(CliError::Usage(format!("k_steps must be at least 2, got {k_steps}")));
    }
    if !(k_max > k_min) {
        return Err(CliError::Usage(format!("k_max ({k_max}) must exceed k_min ({k_min})")));
    }
    if w2 <= 1.0 {
        return Err(Error::InvalidEnergy { omega_hat_sq: w2 }.into());
    }

    let header = ["K", "branch", "tau_star", "B0", "Bz", "Omega", "valid"];
    csv_row(w, &header.map(String::from))?;
    for j in 0..k_steps {
        let k = k_at(k_min, k_max, k_steps, j);
        let (branch, plan) = row(class, w2, k);
        let cells = match plan {
            Ok(p) => vec![
                num(k),
                branch,
                num(p.tau_star),
                num(p.b0),
                num(p.bz),
                num(p.field.omega_big),
                if p.is_valid() { "1" } else { "0" }.to_string(),
            ],
            Err(_) => {
                let nan = num(f64::NAN);
                vec![num(k), branch, nan.clone(), nan.clone(), nan.clone(), nan, "0".into()]
            }
        };
        csv_row(w, &cells)?;
    }
    Ok(())
}

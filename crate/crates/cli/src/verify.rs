use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use qbtangle_core::oracle::{verify_report, CheckStatus, Scenario, Tolerances, VerificationReport};

use crate::config::{parse_class, parse_f64, parse_usize, read_entries, Entry};
use crate::error::CliError;
use crate::output::num;

/// Scenarios and tolerances from a `key = value` file. Without any
/// `scenario` line the default set is used.
pub fn parse_scenarios(entries: &[Entry], origin: &str) -> Result<(Vec<Scenario>, Tolerances), CliError> {
    let mut scenarios = Vec::new();
    let mut tol = Tolerances::default();
    for e in entries {
        let v = e.value.as_str();
        let r: Result<(), String> = (|| {
            match e.key.as_str() {
                "scenario" => scenarios.push(parse_scenario(v)?),
                "tol_propagator" => tol.propagator = positive(v)?,
                "tol_tangle" => tol.tangle = positive(v)?,
                "tol_search_tau" => tol.search_tau = positive(v)?,
                "tol_search_value" => tol.search_value = positive(v)?,
                "step" => tol.step = positive(v)?,
                "grid_points" => tol.grid_points = parse_usize(v)?.max(2),
                other => return Err(format!("unknown key {other:?}")),
            }
            Ok(())
        })();
        r.map_err(|msg| CliError::config(origin, e.line, format!("{}: {msg}", e.key)))?;
    }
    if scenarios.is_empty() {
        scenarios = Scenario::default_set();
    }
    Ok((scenarios, tol))
}

fn positive(v: &str) -> Result<f64, String> {
    let x = parse_f64(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a positive number, got {v:?}"))
    }
}

/// `class, omega_sq, k[, known-discrepancy]`
fn parse_scenario(v: &str) -> Result<Scenario, String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(format!("expected `class, omega_sq, k[, known-discrepancy]`, got {v:?}"));
    }
    let mut s = Scenario::new(parse_class(parts[0])?, parse_f64(parts[1])?, parse_f64(parts[2])?);
    if let Some(flag) = parts.get(3) {
        if !flag.eq_ignore_ascii_case("known-discrepancy") {
            return Err(format!("unknown scenario flag {flag:?}"));
        }
        s.known_discrepancy = true;
    }
    Ok(s)
}

fn status(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "PASS",
        CheckStatus::Fail => "FAIL",
        CheckStatus::Skipped => "SKIP",
    }
}

fn verdict(report: &qbtangle_core::oracle::ScenarioReport) -> &'static str {
    match (report.failed(), report.scenario.known_discrepancy) {
        (false, _) => "PASS",
        (true, true) => "KNOWN",
        (true, false) => "FAIL",
    }
}

/// Human-readable summary (`#` lines) followed by `[section]` blocks of `key=value` lines.
pub fn render(r: &VerificationReport) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "# qbtangle verification report");
    for (i, s) in r.scenarios.iter().enumerate() {
        let sc = &s.scenario;
        let failed: Vec<&str> = s
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name)
            .collect();
        let _ = write!(
            o,
            "# scenario {}: {} omega_sq={} K={} -> {}",
            i + 1,
            sc.class,
            sc.omega_hat_sq,
            sc.k_ratio,
            verdict(s)
        );
        if !failed.is_empty() {
            let _ = write!(o, " (failed: {})", failed.join(", "));
        }
        o.push('\n');
    }
    for d in &r.discrepancies {
        let vals: Vec<String> = d.values.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
        let _ = writeln!(o, "# discrepancy {}: {} -> adopted {}", d.key, vals.join(" "), d.adopted);
    }
    let _ = writeln!(o, "# overall: {}", if r.passed() { "PASS" } else { "FAIL" });
    o.push('\n');

    let t = &r.tolerances;
    let _ = writeln!(o, "[tolerances]");
    let _ = writeln!(o, "propagator={}", num(t.propagator));
    let _ = writeln!(o, "tangle={}", num(t.tangle));
    let _ = writeln!(o, "search_tau={}", num(t.search_tau));
    let _ = writeln!(o, "search_value={}", num(t.search_value));
    let _ = writeln!(o, "step={}", num(t.step));
    let _ = writeln!(o, "grid_points={}", t.grid_points);

    for (i, s) in r.scenarios.iter().enumerate() {
        let sc = &s.scenario;
        let _ = writeln!(o, "\n[scenario.{}]", i + 1);
        let _ = writeln!(o, "class={}", sc.class);
        let _ = writeln!(o, "omega_sq={}", num(sc.omega_hat_sq));
        let _ = writeln!(o, "k={}", num(sc.k_ratio));
        let _ = writeln!(o, "known_discrepancy={}", sc.known_discrepancy);
        match &s.plan {
            Ok(p) => {
                let _ = writeln!(o, "plan=ok");
                let _ = writeln!(o, "plan.branch={}", p.branch.name());
                let _ = writeln!(o, "plan.B0={}", num(p.b0));
                let _ = writeln!(o, "plan.Bz={}", num(p.bz));
                let _ = writeln!(o, "plan.Omega={}", num(p.field.omega_big));
                for d in &p.diagnostics {
                    let _ = writeln!(o, "plan.diagnostic={d}");
                }
            }
            Err(e) => {
                let _ = writeln!(o, "plan={}", e.kind());
            }
        }
        let _ = writeln!(o, "tau_star={}", s.tau_star.map_or_else(|| "none".into(), num));
        let _ = writeln!(o, "field_source={}", if s.field_from_plan { "plan" } else { "static_transverse" });
        let _ = writeln!(o, "integration_error_estimate={}", num(s.integration_error_estimate));
        if let Some(h) = &s.hessian {
            let _ = writeln!(o, "hessian.determinant={}", num(h.determinant));
            let g = h.gradient;
            let _ = writeln!(o, "hessian.gradient_norm={}", num((g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt()));
            let _ = writeln!(o, "hessian.d2_tau={}", num(h.matrix[0][0]));
        }
        if let Some(q) = &s.search {
            let _ = writeln!(o, "search.tau={}", num(q.tau_best));
            let _ = writeln!(o, "search.phi={}", num(q.phi_best));
            let _ = writeln!(o, "search.Omega={}", num(q.omega_big_best));
            let _ = writeln!(o, "search.value={}", num(q.value_best));
            let _ = writeln!(o, "search.target={}", num(q.target));
            let _ = writeln!(o, "search.excursion={}", q.excursion);
            let _ = writeln!(o, "search.evaluations={}", q.evaluations);
        }
        for c in &s.checks {
            let _ = writeln!(o, "check.{}={} value={} tol={}", c.name, status(c.status), num(c.value), num(c.tolerance));
        }
        let _ = writeln!(o, "status={}", verdict(s));
    }
    for d in &r.discrepancies {
        let _ = writeln!(o, "\n[discrepancy.{}]", d.key);
        for (k, v) in &d.values {
            let _ = writeln!(o, "{k}={}", num(*v));
        }
        let _ = writeln!(o, "adopted={}", d.adopted);
    }
    let _ = writeln!(o, "\n[summary]");
    let _ = writeln!(o, "result={}", if r.passed() { "PASS" } else { "FAIL" });
    o
}

pub fn run(config: Option<&Path>, w: &mut dyn Write) -> Result<(), CliError> {
    let (scenarios, tol) = match config {
        Some(path) => parse_scenarios(&read_entries(path)?, &path.display().to_string())?,
        None => (Scenario::default_set(), Tolerances::default()),
    };
    let report = verify_report(&scenarios, &tol)?;
    w.write_all(render(&report).as_bytes())?;
    w.flush()?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

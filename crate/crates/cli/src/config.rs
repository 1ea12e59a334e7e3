//! Flat `key = value` files with `#` comments.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qbtangle_core::StateClass;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub line: usize,
    /// Lower-cased, with `-` folded to `_`.
    pub key: String,
    pub value: String,
}

pub fn parse_entries(text: &str, origin: &str) -> Result<Vec<Entry>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(CliError::config(origin, line, format!("expected key=value, got {body:?}")));
        };
        let key = k.trim().to_ascii_lowercase().replace('-', "_");
        if key.is_empty() {
            return Err(CliError::config(origin, line, "empty key"));
        }
        out.push(Entry {
            line,
            key,
            value: v.trim().to_string(),
        });
    }
    Ok(out)
}

pub fn read_entries(path: &Path) -> Result<Vec<Entry>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_entries(&text, &path.display().to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Closed-form tangle expressions.
    Closed,
    /// Analytic propagator followed by the tangle definitions.
    Chain,
    /// Numerically integrated propagator followed by the tangle definitions.
    Oracle,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "closed" => Ok(Mode::Closed),
            "chain" => Ok(Mode::Chain),
            "oracle" => Ok(Mode::Oracle),
            other => Err(format!("unknown mode {other:?} (expected closed, chain or oracle)")),
        }
    }
}

pub fn parse_class(s: &str) -> Result<StateClass, String> {
    StateClass::parse(s).ok_or_else(|| format!("unknown class {s:?} (expected s, b1, b2, b3, w or ghz)"))
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(format!("expected a boolean, got {other:?}")),
    }
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("expected a number, got {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got {s:?}"))
    }
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|_| format!("expected a non-negative integer, got {s:?}"))
}

/// Every run setting; `None` means "not given".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub class: Option<StateClass>,
    pub omega_sq: Option<f64>,
    pub k: Option<f64>,
    pub phi: Option<f64>,
    pub omega_big: Option<f64>,
    pub theta0: Option<f64>,
    pub optimal: Option<bool>,
    pub tau_max: Option<f64>,
    pub steps: Option<usize>,
    pub mode: Option<Mode>,
    pub j12_hz: Option<f64>,
    pub out: Option<PathBuf>,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub k_steps: Option<usize>,
}

impl Settings {
    pub fn from_entries(entries: &[Entry], origin: &str) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for e in entries {
            let v = e.value.as_str();
            let r: Result<(), String> = (|| {
                match e.key.as_str() {
                    "class" => s.class = Some(parse_class(v)?),
                    "omega_sq" => s.omega_sq = Some(parse_f64(v)?),
                    "k" => s.k = Some(parse_f64(v)?),
                    "phi" => s.phi = Some(parse_f64(v)?),
                    "omega_big" => s.omega_big = Some(parse_f64(v)?),
                    "theta0" => s.theta0 = Some(parse_f64(v)?),
                    "optimal" => s.optimal = Some(parse_bool(v)?),
                    "tau_max" => s.tau_max = Some(parse_f64(v)?),
                    "steps" => s.steps = Some(parse_usize(v)?),
                    "mode" => s.mode = Some(v.parse()?),
                    "j12_hz" => s.j12_hz = Some(parse_f64(v)?),
                    "out" => s.out = Some(PathBuf::from(v)),
                    "k_min" => s.k_min = Some(parse_f64(v)?),
                    "k_max" => s.k_max = Some(parse_f64(v)?),
                    "k_steps" => s.k_steps = Some(parse_usize(v)?),
                    other => return Err(format!("unknown key {other:?}")),
                }
                Ok(())
            })();
            r.map_err(|msg| CliError::config(origin, e.line, format!("{}: {msg}", e.key)))?;
        }
        Ok(s)
    }

    /// Values present in `top` win.
    pub fn overlay(self, top: Settings) -> Settings {
        Settings {
            class: top.class.or(self.class),
            omega_sq: top.omega_sq.or(self.omega_sq),
            k: top.k.or(self.k),
            phi: top.phi.or(self.phi),
            omega_big: top.omega_big.or(self.omega_big),
            theta0: top.theta0.or(self.theta0),
            optimal: top.optimal.or(self.optimal),
            tau_max: top.tau_max.or(self.tau_max),
            steps: top.steps.or(self.steps),
            mode: top.mode.or(self.mode),
            j12_hz: top.j12_hz.or(self.j12_hz),
            out: top.out.or(self.out),
            k_min: top.k_min.or(self.k_min),
            k_max: top.k_max.or(self.k_max),
            k_steps: top.k_steps.or(self.k_steps),
        }
    }

    pub fn require<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::Usage(format!("missing required setting `{name}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_blank_lines_and_key_folding() {
        let text = "# header\n\nOmega-Sq = 6   # trailing\n  k=1.59\nclass = GHZ\n";
        let e = parse_entries(text, "t").unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!((e[0].line, e[0].key.as_str(), e[0].value.as_str()), (3, "omega_sq", "6"));
        let s = Settings::from_entries(&e, "t").unwrap();
        assert_eq!(s.omega_sq, Some(6.0));
        assert_eq!(s.class, Some(StateClass::Ghz));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_entries("k = 1\nbogus line\n", "f.conf").unwrap_err();
        assert!(err.to_string().contains("f.conf:2"), "{err}");
        let e = parse_entries("k = 1\nsteps = -3\n", "f.conf").unwrap();
        let err = Settings::from_entries(&e, "f.conf").unwrap_err();
        assert!(err.to_string().contains("f.conf:2") && err.to_string().contains("steps"), "{err}");
        let e = parse_entries("colour = red\n", "f.conf").unwrap();
        assert!(Settings::from_entries(&e, "f.conf").is_err());
    }

    #[test]
    fn overlay_prefers_top() {
        let file = Settings {
            k: Some(1.0),
            steps: Some(11),
            ..Default::default()
        };
        let cli = Settings {
            k: Some(1.59),
            ..Default::default()
        };
        let s = file.overlay(cli);
        assert_eq!((s.k, s.steps), (Some(1.59), Some(11)));
    }

    #[test]
    fn scalar_parsers() {
        assert!(parse_f64("nan").is_err());
        assert_eq!(parse_bool("Yes"), Ok(true));
        assert_eq!("ORACLE".parse::<Mode>(), Ok(Mode::Oracle));
        assert_eq!(parse_class("b1"), Ok(StateClass::B1));
        assert!(parse_class("x").is_err());
    }
}

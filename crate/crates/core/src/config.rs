//! Flat key/value experiment configuration with a typed schema. Unknown
//! keys are hard errors — a typo in a physics parameter must never run
//! silently. Run manifests use the same format, so any emitted manifest
//! parses back into the configuration that produced it.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    A,
    B,
    C,
    D,
}

impl CaseId {
    pub fn label(self) -> &'static str {
        match self {
            CaseId::A => "a",
            CaseId::B => "b",
            CaseId::C => "c",
            CaseId::D => "d",
        }
    }

    fn parse(s: &str) -> Result<CaseId> {
        match s {
            "a" => Ok(CaseId::A),
            "b" => Ok(CaseId::B),
            "c" => Ok(CaseId::C),
            "d" => Ok(CaseId::D),
            other => Err(Error::Config(format!("case must be one of a|b|c|d, got '{other}'"))),
        }
    }
}

/// All keys the schema accepts. `INFO_KEYS` are written into manifests for
/// the record (normalization, timing, version) and ignored on input.
const KEYS: &[&str] = &[
    "case", "n_x", "n_y", "dx", "dy", "omega_p", "lambda", "m", "tau", "r", "n_t", "u0", "b0",
    "epsilon", "k_x", "k_y", "renormalize", "engines", "sample_stride", "deterministic",
];
const INFO_KEYS: &[&str] = &["alpha", "code_version", "elapsed_seconds", "real_time_span"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub case: CaseId,
    /// Grid sizes; one entry except for the resolution sweep.
    pub n_x: Vec<usize>,
    pub n_y: Option<usize>,
    pub dx: f64,
    pub dy: f64,
    pub omega_p: f64,
    pub lambda: f64,
    /// Truncation orders; one entry except for the order sweep.
    pub m: Vec<u32>,
    pub tau: f64,
    pub r: usize,
    /// Step counts, aligned with the swept parameter.
    pub n_t: Vec<usize>,
    pub u0: Option<f64>,
    pub b0: Option<f64>,
    pub epsilon: Option<f64>,
    pub k_x: Option<f64>,
    pub k_y: Option<f64>,
    pub renormalize: bool,
    pub engines: Vec<String>,
    pub sample_stride: usize,
    pub deterministic: bool,
    /// Informational manifest entries, carried through verbatim.
    pub info: BTreeMap<String, String>,
}

fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
        }
    }
    Ok(map)
}

struct Schema {
    map: BTreeMap<String, String>,
}

impl Schema {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key).ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
    }

    fn f64(&mut self, key: &str) -> Result<f64> {
        let v = self.required(key)?;
        v.parse().map_err(|_| Error::Config(format!("key '{key}': '{v}' is not a number")))
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("key '{key}': '{v}' is not a number"))),
        }
    }

    fn usize_list(&mut self, key: &str) -> Result<Vec<usize>> {
        let v = self.required(key)?;
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("key '{key}': '{s}' is not an integer")))
            })
            .collect()
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(Error::Config(format!("key '{key}': expected true|false, got '{other}'"))),
            },
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut s = Schema { map: parse_kv(text)? };
        let case = CaseId::parse(&s.required("case")?)?;
        let n_x = s.usize_list("n_x")?;
        let n_y = s.take("n_y").map(|v| v.parse::<usize>()).transpose().map_err(|_| {
            Error::Config("key 'n_y': not an integer".into())
        })?;
        let dx = s.f64("dx")?;
        let dy = s.f64_opt("dy")?.unwrap_or(dx);
        let omega_p = s.f64("omega_p")?;
        let lambda = s.f64("lambda")?;
        let m: Vec<u32> = s.usize_list("m")?.into_iter().map(|v| v as u32).collect();
        let tau = s.f64("tau")?;
        let r = s.usize_list("r")?[0];
        let n_t = s.usize_list("n_t")?;
        let u0 = s.f64_opt("u0")?;
        let b0 = s.f64_opt("b0")?;
        let epsilon = s.f64_opt("epsilon")?;
        let k_x = s.f64_opt("k_x")?;
        let k_y = s.f64_opt("k_y")?;
        let renormalize = s.bool_or("renormalize", true)?;
        let engines = match s.take("engines") {
            None => vec!["kvn-qsvt".into(), "kvn-expm".into(), "classical-rk4".into()],
            Some(v) => v.split(',').map(|e| e.trim().to_string()).collect(),
        };
        let sample_stride = match s.take("sample_stride") {
            None => 1,
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config("key 'sample_stride': not an integer".into()))?,
        };
        let deterministic = s.bool_or("deterministic", false)?;
        let mut info = BTreeMap::new();
        for &k in INFO_KEYS {
            if let Some(v) = s.take(k) {
                info.insert(k.to_string(), v);
            }
        }
        if let Some((key, _)) = s.map.iter().next() {
            return Err(Error::Config(format!(
                "unknown key '{key}'; accepted keys: {}",
                KEYS.iter().chain(INFO_KEYS).cloned().collect::<Vec<_>>().join(", ")
            )));
        }
        let cfg = ExperimentConfig {
            case,
            n_x,
            n_y,
            dx,
            dy,
            omega_p,
            lambda,
            m,
            tau,
            r,
            n_t,
            u0,
            b0,
            epsilon,
            k_x,
            k_y,
            renormalize,
            engines,
            sample_stride,
            deterministic,
            info,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        ExperimentConfig::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.lambda < 1.0 {
            problems.push(format!("lambda must be >= 1, got {}", self.lambda));
        }
        if self.n_x.iter().any(|&n| n < 5) {
            problems.push("every n_x must be >= 5".into());
        }
        if !(self.tau.is_finite() && self.tau != 0.0) {
            problems.push(format!("tau must be finite and nonzero, got {}", self.tau));
        }
        if self.m.iter().any(|&m| m == 0) {
            problems.push("truncation orders must be >= 1".into());
        }
        if self.sample_stride == 0 {
            problems.push("sample_stride must be >= 1".into());
        }
        match self.case {
            CaseId::A => {
                if self.n_x.len() != 1 || self.m.len() != 1 || self.n_t.len() != 1 {
                    problems.push("case a takes single n_x, m, n_t values".into());
                }
            }
            CaseId::B => {
                if self.n_x.len() != 1 {
                    problems.push("case b takes a single n_x".into());
                }
                if self.m.len() != self.n_t.len() {
                    problems.push(format!(
                        "case b sweeps m with matching n_t: {} orders vs {} step counts",
                        self.m.len(),
                        self.n_t.len()
                    ));
                }
            }
            CaseId::C => {
                if self.m.len() != 1 {
                    problems.push("case c takes a single m".into());
                }
                if self.n_x.len() != self.n_t.len() {
                    problems.push(format!(
                        "case c sweeps n_x with matching n_t: {} grids vs {} step counts",
                        self.n_x.len(),
                        self.n_t.len()
                    ));
                }
            }
            CaseId::D => {
                if self.n_y.is_none() {
                    problems.push("case d requires n_y".into());
                }
                for (key, val) in [
                    ("u0", self.u0),
                    ("b0", self.b0),
                    ("epsilon", self.epsilon),
                    ("k_x", self.k_x),
                    ("k_y", self.k_y),
                ] {
                    if val.is_none() {
                        problems.push(format!("case d requires {key}"));
                    }
                }
                if self.n_x.len() != 1 || self.m.len() != 1 || self.n_t.len() != 1 {
                    problems.push("case d takes single n_x, m, n_t values".into());
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    /// Canonical key/value rendering; parsing it reproduces `self`.
    pub fn serialize(&self) -> String {
        fn fmt_f64(v: f64) -> String {
            // shortest representation that round-trips
            let s = format!("{v}");
            debug_assert_eq!(s.parse::<f64>().unwrap(), v);
            s
        }
        let mut out = String::new();
        let _ = writeln!(out, "case = {}", self.case.label());
        let _ = writeln!(
            out,
            "n_x = {}",
            self.n_x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        if let Some(n_y) = self.n_y {
            let _ = writeln!(out, "n_y = {n_y}");
        }
        let _ = writeln!(out, "dx = {}", fmt_f64(self.dx));
        let _ = writeln!(out, "dy = {}", fmt_f64(self.dy));
        let _ = writeln!(out, "omega_p = {}", fmt_f64(self.omega_p));
        let _ = writeln!(out, "lambda = {}", fmt_f64(self.lambda));
        let _ = writeln!(
            out,
            "m = {}",
            self.m.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        let _ = writeln!(out, "tau = {}", fmt_f64(self.tau));
        let _ = writeln!(out, "r = {}", self.r);
        let _ = writeln!(
            out,
            "n_t = {}",
            self.n_t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        for (key, val) in [
            ("u0", self.u0),
            ("b0", self.b0),
            ("epsilon", self.epsilon),
            ("k_x", self.k_x),
            ("k_y", self.k_y),
        ] {
            if let Some(v) = val {
                let _ = writeln!(out, "{key} = {}", fmt_f64(v));
            }
        }
        let _ = writeln!(out, "renormalize = {}", self.renormalize);
        let _ = writeln!(out, "engines = {}", self.engines.join(","));
        let _ = writeln!(out, "sample_stride = {}", self.sample_stride);
        let _ = writeln!(out, "deterministic = {}", self.deterministic);
        for (k, v) in &self.info {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

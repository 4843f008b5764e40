//! Run configuration: presets, a JSON config file and command-line flags,
//! merged in that order of increasing priority.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A single value, an explicit list, or `count` evenly spaced values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Value(f64),
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Value(v) => vec![*v],
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, count } => match count {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n).map(|i| start + (stop - start) * i as f64 / (*n - 1) as f64).collect(),
            },
        }
    }

    /// `x`, `x,y,z` or `start:stop:count`.
    pub fn parse(s: &str) -> Result<Grid, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        if let Some((a, rest)) = s.split_once(':') {
            let (b, n) = rest.split_once(':').ok_or_else(|| format!("range {s:?} must be start:stop:count"))?;
            let count = n.trim().parse::<usize>().map_err(|e| format!("bad count {n:?}: {e}"))?;
            return Ok(Grid::Range { start: num(a)?, stop: num(b)?, count });
        }
        if s.contains(',') {
            return s.split(',').map(num).collect::<Result<Vec<_>, _>>().map(Grid::List);
        }
        num(s).map(Grid::Value)
    }
}

/// Everything optional; see [`Settings`] for the resolved form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub p: Option<f64>,
    pub a: Option<Grid>,
    #[serde(rename = "E")]
    pub energy: Option<Grid>,
    pub c: Option<Grid>,
    pub tol: Option<f64>,
    pub kappa_max: Option<f64>,
    pub kappa_steps: Option<usize>,
    pub hill_n: Option<usize>,
    pub gamma: Option<Vec<f64>>,
    pub mu_max: Option<f64>,
    pub scan_nodes: Option<usize>,
    pub profile_nodes: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            preset: over.preset.or(self.preset),
            p: over.p.or(self.p),
            a: over.a.or(self.a),
            energy: over.energy.or(self.energy),
            c: over.c.or(self.c),
            tol: over.tol.or(self.tol),
            kappa_max: over.kappa_max.or(self.kappa_max),
            kappa_steps: over.kappa_steps.or(self.kappa_steps),
            hill_n: over.hill_n.or(self.hill_n),
            gamma: over.gamma.or(self.gamma),
            mu_max: over.mu_max.or(self.mu_max),
            scan_nodes: over.scan_nodes.or(self.scan_nodes),
            profile_nodes: over.profile_nodes.or(self.profile_nodes),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
        }
    }
}

pub struct Preset {
    pub name: &'static str,
    pub p: f64,
    pub point: [f64; 3],
    /// Grids for `sweep` when none are given.
    pub sweep: [Grid; 3],
}

pub fn presets() -> Vec<Preset> {
    let r = |start, stop, count| Grid::Range { start, stop, count };
    vec![
        Preset { name: "kdv", p: 1.0, point: [0.0, -0.1, 1.0], sweep: [Grid::Value(0.0), r(-0.16, -0.01, 6), Grid::Value(1.0)] },
        Preset { name: "mkdv", p: 2.0, point: [0.0, -0.1, 1.0], sweep: [Grid::Value(0.0), r(-0.24, -0.02, 6), Grid::Value(1.0)] },
        Preset {
            name: "p5-near-solitary",
            p: 5.0,
            point: [1e-4, -1e-6, 1.0],
            sweep: [r(0.0, 0.02, 5), r(-0.02, 0.0, 5), Grid::Value(1.0)],
        },
    ]
}

/// Fully resolved configuration; its canonical JSON is what gets hashed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub preset: Option<String>,
    pub p: f64,
    pub a: Vec<f64>,
    #[serde(rename = "E")]
    pub energy: Vec<f64>,
    pub c: Vec<f64>,
    pub tol: f64,
    pub kappa_max: f64,
    pub kappa_steps: usize,
    pub hill_n: usize,
    pub gamma: Vec<f64>,
    pub mu_max: Option<f64>,
    pub scan_nodes: usize,
    pub profile_nodes: usize,
    pub format: Format,
}

impl Settings {
    pub fn resolve(cfg: &RunConfig, sweep: bool) -> Result<Settings, String> {
        let preset = match &cfg.preset {
            Some(name) => Some(
                presets()
                    .into_iter()
                    .find(|p| p.name == name)
                    .ok_or_else(|| format!("unknown preset {name:?} (kdv, mkdv, p5-near-solitary)"))?,
            ),
            None => None,
        };
        let p = cfg.p.or(preset.as_ref().map(|x| x.p)).ok_or("no exponent: give --p or --preset")?;
        let grid = |g: &Option<Grid>, k: usize, name: &str| -> Result<Vec<f64>, String> {
            let v = match (g, &preset) {
                (Some(g), _) => g.values(),
                (None, Some(pr)) if sweep => pr.sweep[k].values(),
                (None, Some(pr)) => vec![pr.point[k]],
                (None, None) if k == 2 => vec![1.0],
                (None, None) => return Err(format!("no value for {name}")),
            };
            if !sweep && v.len() != 1 {
                return Err(format!("{name} needs exactly one value outside sweep, got {}", v.len()));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(format!("grid for {name} has a non-finite value"));
            }
            Ok(v)
        };
        let s = Settings {
            preset: cfg.preset.clone(),
            p,
            a: grid(&cfg.a, 0, "a")?,
            energy: grid(&cfg.energy, 1, "E")?,
            c: grid(&cfg.c, 2, "c")?,
            tol: cfg.tol.unwrap_or(1e-12),
            kappa_max: cfg.kappa_max.unwrap_or(0.2),
            kappa_steps: cfg.kappa_steps.unwrap_or(20),
            hill_n: cfg.hill_n.unwrap_or(crate::spectrum::DEFAULT_MODES),
            gamma: cfg.gamma.clone().unwrap_or_else(|| vec![0.05, 0.1, 0.2]),
            mu_max: cfg.mu_max,
            scan_nodes: cfg.scan_nodes.unwrap_or(crate::spectrum::REAL_SCAN_NODES),
            profile_nodes: cfg.profile_nodes.unwrap_or(0),
            format: cfg.format.unwrap_or(Format::Json),
        };
        let s = Settings { profile_nodes: if s.profile_nodes == 0 { (4 * s.hill_n).max(256) } else { s.profile_nodes }, ..s };
        if !(p > 0.0 && p.is_finite()) {
            return Err(format!("exponent p must be positive, got {p}"));
        }
        if !(s.tol > 0.0 && s.tol < 1e-3) {
            return Err(format!("tolerance must lie in (0, 1e-3), got {}", s.tol));
        }
        if !(s.kappa_max > 0.0 && s.kappa_max <= std::f64::consts::PI) || s.kappa_steps == 0 {
            return Err("kappa-max must lie in (0, pi] and kappa-steps be positive".into());
        }
        if s.hill_n < 32 {
            return Err(format!("hill-N must be at least 32, got {}", s.hill_n));
        }
        if s.gamma.iter().any(|g| !(g.abs() <= std::f64::consts::PI)) {
            return Err("gamma values must lie in [-pi, pi]".into());
        }
        if s.mu_max.is_some_and(|m| !(m > 0.0 && m.is_finite())) {
            return Err("mu-max must be positive".into());
        }
        if s.scan_nodes < 16 || s.profile_nodes < 64 {
            return Err("scan-nodes must be >= 16 and profile-nodes >= 64".into());
        }
        Ok(s)
    }

    /// The single point of a non-sweep run.
    pub fn point(&self) -> [f64; 3] {
        [self.a[0], self.energy[0], self.c[0]]
    }

    /// SHA-256 of the canonical JSON of these settings.
    pub fn hash(&self) -> String {
        let v = serde_json::to_value(self).expect("settings serialize");
        let digest = Sha256::digest(v.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(Grid::parse("-0.1").unwrap().values(), vec![-0.1]);
        assert_eq!(Grid::parse("1,2,3").unwrap().values(), vec![1.0, 2.0, 3.0]);
        assert_eq!(Grid::parse("0:1:5").unwrap().values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(Grid::parse("0:1").is_err());
        assert!(Grid::parse("x").is_err());
    }

    #[test]
    fn flags_override_file_and_preset() {
        let file = RunConfig { preset: Some("kdv".into()), energy: Some(Grid::Value(-0.05)), ..Default::default() };
        let flags = RunConfig { energy: Some(Grid::Value(-0.02)), ..Default::default() };
        let s = Settings::resolve(&file.overlay(flags), false).unwrap();
        assert_eq!((s.p, s.point()), (1.0, [0.0, -0.02, 1.0]));
        assert_eq!(s.profile_nodes, 512);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = |cfg: RunConfig| Settings::resolve(&cfg, false).is_err();
        assert!(bad(RunConfig::default()));
        assert!(bad(RunConfig { preset: Some("nope".into()), ..Default::default() }));
        assert!(bad(RunConfig { preset: Some("kdv".into()), tol: Some(-1.0), ..Default::default() }));
        assert!(bad(RunConfig { preset: Some("kdv".into()), hill_n: Some(8), ..Default::default() }));
        assert!(bad(RunConfig { preset: Some("kdv".into()), a: Some(Grid::List(vec![])), ..Default::default() }));
        assert!(bad(RunConfig { preset: Some("kdv".into()), a: Some(Grid::List(vec![0.0, 0.1])), ..Default::default() }));
        let empty = RunConfig { preset: Some("kdv".into()), a: Some(Grid::List(vec![])), ..Default::default() };
        assert!(Settings::resolve(&empty, true).unwrap().a.is_empty());
        let unknown: Result<RunConfig, _> = serde_json::from_str(r#"{"p": 1, "bogus": 2}"#);
        assert!(unknown.is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let cfg = RunConfig { preset: Some("kdv".into()), ..Default::default() };
        let s1 = Settings::resolve(&cfg, false).unwrap();
        let s2 = Settings::resolve(&cfg, false).unwrap();
        assert_eq!(s1.hash(), s2.hash());
        let s3 = Settings { tol: 1e-11, ..s1.clone() };
        assert_ne!(s1.hash(), s3.hash());
        assert_eq!(s1.hash().len(), 64);
    }
}

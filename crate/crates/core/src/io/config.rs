use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Vertex;

/// Named check tolerances, defaulting to the library's thresholds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

const DEFAULTS: [(&str, f64); 17] = [
    ("parameter", 0.0),
    ("labelling_involution", 1e-14),
    ("holom", 1e-12),
    ("flat_w", 1e-10),
    ("frame_det", 1e-10),
    ("frame_closure", 1e-10),
    ("gauss_cross_ratios", 1e-10),
    ("gauss_dyadic", 1e-10),
    ("front_invariants", 1e-10),
    ("lie_lifts", 1e-10),
    ("rodrigues", 1e-9),
    ("circularity", 1e-9),
    ("propagation", 1e-9),
    ("collinearity", 1e-9),
    ("curvature_spheres", 1e-9),
    ("mixed_area", 1e-10),
    ("curvature", 1e-9),
];

impl Default for Tolerances {
    fn default() -> Self {
        Self(DEFAULTS.iter().map(|&(k, v)| (k.to_string(), v)).collect())
    }
}

impl Tolerances {
    pub fn names() -> impl Iterator<Item = &'static str> {
        DEFAULTS.iter().map(|d| d.0)
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match self.0.get_mut(name) {
            Some(slot) if value.is_finite() && value >= 0.0 => {
                *slot = value;
                Ok(())
            }
            Some(_) => Err(Error::Config(format!("tolerance {name} must be finite and >= 0"))),
            None => Err(Error::Config(format!("unknown check {name:?}"))),
        }
    }

    /// Applies an override of the form `name=value`.
    pub fn apply(&mut self, arg: &str) -> Result<()> {
        let (name, value) = arg
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected name=value, got {arg:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad tolerance value in {arg:?}")))?;
        self.set(name.trim(), value)
    }
}

/// Paths, parameters, tolerances and root choices of one CLI run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub t: f64,
    pub s: Vec<f64>,
    pub tolerances: Tolerances,
    pub root: Vertex,
    pub w_root: Complex64,
    pub g_root: Complex64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            output: None,
            report: None,
            t: 0.5,
            s: Vec::new(),
            tolerances: Tolerances::default(),
            root: Vertex::new(0, 0),
            w_root: Complex64::new(1.0, 0.0),
            g_root: Complex64::new(0.0, 0.0),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let paths = [&self.input, &self.output, &self.report];
        for (i, p) in paths.iter().enumerate() {
            for q in &paths[i + 1..] {
                if p.is_some() && p == q {
                    return Err(Error::Config(format!("path {:?} used twice", p.as_ref().unwrap())));
                }
            }
        }
        if !self.t.is_finite() {
            return Err(Error::Config("t must be finite".into()));
        }
        if let Some(s) = self.s.iter().find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("s = {s} is not finite")));
        }
        if !(self.w_root.is_finite() && self.w_root.norm() > 0.0 && self.g_root.is_finite()) {
            return Err(Error::Config("root values must be finite, w_root nonzero".into()));
        }
        Ok(())
    }

    /// The requested parallel-family members; `[0]` when none are given.
    pub fn s_values(&self) -> Vec<f64> {
        if self.s.is_empty() {
            vec![0.0]
        } else {
            self.s.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let mut t = Tolerances::default();
        t.apply("holom=1e-6").unwrap();
        assert_eq!(t.get("holom"), 1e-6);
        assert!(t.apply("nonsense=1").is_err());
        assert!(t.apply("holom").is_err());
        assert!(t.apply("holom=-1").is_err());
    }

    #[test]
    fn config_checks() {
        let mut c = RunConfig::default();
        assert_eq!(c.s_values(), vec![0.0]);
        c.validate().unwrap();
        c.input = Some("a.json".into());
        c.output = Some("a.json".into());
        assert!(c.validate().is_err());
        c.output = None;
        c.s = vec![0.5, f64::NAN];
        assert!(c.validate().is_err());
    }
}

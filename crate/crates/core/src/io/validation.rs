use std::fmt::Display;

use serde::Serialize;

use super::Tolerances;
use crate::error::{Error, Result};
use crate::frame::{check_flat, check_parameter, BranchMode};
use crate::front::{
    front_invariants, lie_lift_check, local_circularity_check, local_collinearity_check,
    local_curvature_sphere_check, local_gauss_curvature, local_rodrigues_check, propagation_check,
    FlatFrontFamily,
};
use crate::gauss::{gauss_maps, pair_labelling, verify_local_pair_cross_ratios};
use crate::holo::{validate_holomorphic, HolomorphicMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Parallel-family member, for checks that depend on it.
    pub s: Option<f64>,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub status: CheckStatus,
    pub worst: Option<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rows: usize,
    pub cols: usize,
    pub t: f64,
    pub s: Vec<f64>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn get(&self, name: &str) -> impl Iterator<Item = &CheckResult> + '_ {
        let name = name.to_string();
        self.checks.iter().filter(move |c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> + '_ {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

struct Collector<'a> {
    tol: &'a Tolerances,
    checks: Vec<CheckResult>,
}

impl Collector<'_> {
    fn measured(&mut self, name: &str, s: Option<f64>, residual: f64, worst: Option<impl Display>) -> bool {
        let tolerance = self.tol.get(name);
        let ok = residual <= tolerance;
        self.checks.push(CheckResult {
            name: name.into(),
            s,
            max_residual: Some(residual),
            tolerance,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            worst: worst.map(|w| w.to_string()),
            note: None,
        });
        ok
    }

    fn failed(&mut self, name: &str, s: Option<f64>, note: String) {
        self.checks.push(CheckResult {
            name: name.into(),
            s,
            max_residual: None,
            tolerance: self.tol.get(name),
            status: CheckStatus::Fail,
            worst: None,
            note: Some(note),
        });
    }

    fn result<T>(&mut self, name: &str, s: Option<f64>, r: Result<T>, f: impl FnOnce(&mut Self, T) -> bool) -> bool {
        match r {
            Ok(v) => f(self, v),
            Err(e) => {
                self.failed(name, s, e.to_string());
                false
            }
        }
    }

    fn skip_rest(&mut self, s: &[f64]) {
        let done: Vec<String> = self.checks.iter().map(|c| c.name.clone()).collect();
        for name in Tolerances::names().filter(|n| !done.iter().any(|d| d == n)) {
            let per_s = PER_S.contains(&name);
            for s in if per_s { s.iter().map(|&s| Some(s)).collect() } else { vec![None] } {
                self.checks.push(CheckResult {
                    name: name.into(),
                    s,
                    max_residual: None,
                    tolerance: self.tol.get(name),
                    status: CheckStatus::Skipped,
                    worst: None,
                    note: Some("skipped".into()),
                });
            }
        }
    }
}

const PER_S: [&str; 9] = [
    "front_invariants",
    "lie_lifts",
    "rodrigues",
    "circularity",
    "propagation",
    "collinearity",
    "curvature_spheres",
    "mixed_area",
    "curvature",
];

fn worst_of<K>(xs: impl Iterator<Item = (K, f64)>) -> Option<(K, f64)> {
    xs.max_by(|a, b| a.1.total_cmp(&b.1))
}

/// Builds the family with `F = I` at `(0, 0)` and runs every check.
///
/// An empty `s` list means `s = 0`. When the parameter, labelling or
/// cross-ratio checks fail, everything downstream is reported as skipped.
/// Labels with `1 - t a < 0` are reported as a `flat_w` failure.
pub fn run_validation(h: &HolomorphicMap, t: f64, s: &[f64], tol: &Tolerances) -> ValidationReport {
    validate_with(h, t, s, tol, || FlatFrontFamily::build(h, t))
}

/// Runs every check on an already built family.
pub fn validate_family(family: &FlatFrontFamily, s: &[f64], tol: &Tolerances) -> ValidationReport {
    validate_with(family.holo(), family.t(), s, tol, || Ok(family.clone()))
}

fn validate_with(
    h: &HolomorphicMap,
    t: f64,
    s: &[f64],
    tol: &Tolerances,
    build: impl FnOnce() -> Result<FlatFrontFamily>,
) -> ValidationReport {
    let s: Vec<f64> = if s.is_empty() { vec![0.0] } else { s.to_vec() };
    let mut c = Collector { tol, checks: Vec::new() };
    let labels = h.labelling();

    let parameter = c.result("parameter", None, check_parameter(labels, t, BranchMode::Complex), |c, ()| {
        c.measured("parameter", None, 0.0, None::<String>)
    });
    let involution = labels
        .labels()
        .map(|a| pair_labelling(a, t).map(|b| ((1.0 - t * a) * (1.0 - t * b) - 1.0).abs()))
        .collect::<Result<Vec<f64>>>()
        .map(|r| r.into_iter().fold(0.0, f64::max));
    let involution = c.result("labelling_involution", None, involution, |c, r| {
        c.measured("labelling_involution", None, r, None::<String>)
    });
    let report = validate_holomorphic(h.g(), labels, tol.get("holom"));
    let holom = if report.passed() {
        c.measured("holom", None, report.max_residual, report.worst_face)
    } else {
        let note = if report.degenerate_edges.is_empty() && report.irregular_faces.is_empty() {
            None
        } else {
            Some(format!(
                "{} degenerate edges, {} irregular faces",
                report.degenerate_edges.len(),
                report.irregular_faces.len()
            ))
        };
        c.measured("holom", None, report.max_residual, report.worst_face);
        let last = c.checks.last_mut().expect("just pushed");
        last.status = CheckStatus::Fail;
        last.note = note;
        false
    };
    if !(parameter && involution && holom) {
        c.skip_rest(&s);
        return finish(h, t, s, c);
    }

    let family = match build() {
        Ok(family) => family,
        Err(Error::NotFlat { face, residual }) => {
            c.measured("flat_w", None, residual, Some(face));
            c.skip_rest(&s);
            return finish(h, t, s, c);
        }
        Err(e) => {
            c.failed("flat_w", None, e.to_string());
            c.skip_rest(&s);
            return finish(h, t, s, c);
        }
    };
    let flat = check_flat(family.connection());
    c.measured("flat_w", None, flat.max_residual, flat.worst_face);

    let d = *family.diagnostics();
    c.measured("frame_det", None, d.det_drift, None::<String>);
    c.measured("frame_closure", None, d.closure_residual.max(d.path_residual), None::<String>);

    let pair = verify_local_pair_cross_ratios(&family);
    let worst = worst_of(pair.face_plus.iter().chain(&pair.face_minus).map(|x| (x.0.to_string(), x.1)))
        .into_iter()
        .chain(worst_of(pair.edges.iter().map(|x| (x.0.to_string(), x.1))))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    if pair.min_separation > 0.0 {
        c.measured("gauss_cross_ratios", None, pair.max_residual(), worst.map(|w| w.0));
    } else {
        c.failed("gauss_cross_ratios", None, "h+ and h- coincide".into());
    }
    let maps = gauss_maps(&family).check();
    c.measured("gauss_dyadic", None, maps.lightlike.max(maps.dyadic), None::<String>);

    for &s in &s {
        let sample = family.eval(s);
        let at = Some(s);
        let inv = front_invariants(&sample);
        c.measured("front_invariants", at, inv.max_residual(), inv.worst_vertex);
        c.measured("lie_lifts", at, lie_lift_check(&sample).max_residual(), None::<String>);

        c.result("rodrigues", at, local_rodrigues_check(&family, s), |c, r| {
            let worst = worst_of(r.edges.iter().map(|e| (e.edge, e.residual())));
            c.measured("rodrigues", at, r.max_residual(), worst.map(|w| w.0))
        });
        let circ = local_circularity_check(&family, s);
        if let Some(face) = circ.untested().first() {
            c.failed("circularity", at, format!("cross ratio untestable on face {face}"));
        } else {
            let worst = worst_of(circ.faces.iter().map(|f| (f.face, f.circularity.residual())));
            c.measured("circularity", at, circ.max_residual(), worst.map(|w| w.0));
        }
        c.result("propagation", at, propagation_check(&family, s), |c, r| {
            c.measured("propagation", at, r.max_residual(), r.worst().map(|w| w.edge))
        });
        c.result("collinearity", at, local_collinearity_check(&family, s), |c, r| {
            c.measured("collinearity", at, r.max_residual(), r.worst().map(|w| w.edge))
        });
        c.result("curvature_spheres", at, local_curvature_sphere_check(&family, s), |c, r| {
            let worst = worst_of(r.edges.iter().map(|e| (e.edge, e.sphere.rank_residual)));
            c.measured("curvature_spheres", at, r.max_residual(), worst.map(|w| w.0))
        });
        let k = local_gauss_curvature(&family, s);
        let worst = worst_of(k.faces.iter().map(|f| (f.face, f.area_h_relative)));
        c.measured("mixed_area", at, k.max_area_h(), worst.map(|w| w.0));
        let worst = worst_of(k.faces.iter().filter_map(|f| f.k.map(|k| (f.face, (k - 1.0).abs()))));
        c.measured("curvature", at, k.max_k_deviation(), worst.map(|w| w.0));
        if !k.singular_faces().is_empty() {
            let last = c.checks.last_mut().expect("just pushed");
            last.note = Some(format!("{} singular faces excluded", k.singular_faces().len()));
        }
    }
    finish(h, t, s, c)
}

fn finish(h: &HolomorphicMap, t: f64, s: Vec<f64>, c: Collector<'_>) -> ValidationReport {
    let passed = c.checks.iter().all(|x| x.status != CheckStatus::Fail);
    ValidationReport {
        rows: h.grid().rows(),
        cols: h.grid().cols(),
        t,
        s,
        checks: c.checks,
        passed,
    }
}

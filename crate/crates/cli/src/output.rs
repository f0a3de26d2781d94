//! Serialization of toolkit results: CSV tables with pinned headers and
//! JSON mirrors with the same field names.
//!
//! Floats in CSV are printed at 17 significant digits so identical configs
//! produce byte-identical files.

use serde::Serialize;
use vaxdyn_core::{
    Diagram, EquilibriumSet, SurfaceSample, TangencyCurve, Trajectory, ValidationReport,
};

/// 17 significant digits, scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn equilibria_csv(set: &EquilibriumSet) -> String {
    let mut out = String::from("r,eps,P,f_prime,class\n");
    for e in &set.equilibria {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt17(set.params.r),
            fmt17(set.params.eps),
            fmt17(e.p),
            fmt17(e.f_prime),
            e.classification
        ));
    }
    out
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,P\n");
    for (t, p) in traj.times.iter().zip(traj.states.iter()) {
        out.push_str(&format!("{},{}\n", fmt17(*t), fmt17(*p)));
    }
    out
}

pub fn diagram_csv(d: &Diagram) -> String {
    let mut out = String::from("axis,fixed_value,param,P,class\n");
    for pt in &d.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            d.axis,
            fmt17(d.fixed_value),
            fmt17(pt.param),
            fmt17(pt.p),
            pt.classification
        ));
    }
    out
}

pub fn closed_form_csv(d: &Diagram) -> String {
    let mut out = String::from("axis,fixed_value,param,P,class\n");
    for pt in &d.closed_form {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            d.axis,
            fmt17(d.fixed_value),
            fmt17(pt.param),
            fmt17(pt.p),
            pt.classification
        ));
    }
    out
}

pub fn events_csv(d: &Diagram) -> String {
    let mut out = String::from("axis,fixed_value,param,P\n");
    for ev in &d.events {
        out.push_str(&format!(
            "{},{},{},{}\n",
            d.axis,
            fmt17(d.fixed_value),
            fmt17(ev.param),
            fmt17(ev.p)
        ));
    }
    out
}

pub fn tangency_csv(tc: &TangencyCurve) -> String {
    let mut out = String::from("P,eps,r,feasible\n");
    for pt in &tc.points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt17(pt.p),
            fmt17(pt.eps),
            fmt17(pt.r),
            pt.feasible
        ));
    }
    out
}

pub fn surface_csv(samples: &[SurfaceSample]) -> String {
    let mut out = String::from("P,eps,r\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt17(s.p),
            fmt17(s.eps),
            fmt17(s.r)
        ));
    }
    out
}

pub fn validate_csv(report: &ValidationReport) -> String {
    let mut out = String::from("assumption,passed,worst,at\n");
    for check in report.iter() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            check.name,
            check.passed,
            fmt17(check.worst),
            fmt17(check.at)
        ));
    }
    out
}

// JSON mirrors.

#[derive(Serialize)]
pub struct EquilibriumOut {
    #[serde(rename = "P")]
    pub p: f64,
    pub f_prime: f64,
    pub class: String,
}

#[derive(Serialize)]
pub struct EquilibriaOut {
    pub curve: String,
    pub r: f64,
    pub eps: f64,
    pub equilibria: Vec<EquilibriumOut>,
}

pub fn equilibria_json(set: &EquilibriumSet) -> EquilibriaOut {
    EquilibriaOut {
        curve: set.curve_label.clone(),
        r: set.params.r,
        eps: set.params.eps,
        equilibria: set
            .equilibria
            .iter()
            .map(|e| EquilibriumOut {
                p: e.p,
                f_prime: e.f_prime,
                class: e.classification.to_string(),
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct TrajectoryPointOut {
    pub t: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

#[derive(Serialize)]
pub struct TrajectoryOut {
    pub curve: String,
    pub r: f64,
    pub eps: f64,
    pub points: Vec<TrajectoryPointOut>,
}

pub fn trajectory_json(traj: &Trajectory) -> TrajectoryOut {
    TrajectoryOut {
        curve: traj.curve_label.clone(),
        r: traj.params.r,
        eps: traj.params.eps,
        points: traj
            .times
            .iter()
            .zip(traj.states.iter())
            .map(|(&t, &p)| TrajectoryPointOut { t, p })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct BranchPointOut {
    pub param: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub class: String,
}

#[derive(Serialize)]
pub struct ClosedFormPointOut {
    pub param: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub class: String,
    pub boundary: bool,
}

#[derive(Serialize)]
pub struct EventOut {
    pub param: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

#[derive(Serialize)]
pub struct DiagramOut {
    pub curve: String,
    pub axis: String,
    pub fixed_value: f64,
    pub points: Vec<BranchPointOut>,
    pub closed_form: Vec<ClosedFormPointOut>,
    pub events: Vec<EventOut>,
}

pub fn diagram_json(curve_label: &str, d: &Diagram) -> DiagramOut {
    DiagramOut {
        curve: curve_label.to_string(),
        axis: d.axis.to_string(),
        fixed_value: d.fixed_value,
        points: d
            .points
            .iter()
            .map(|pt| BranchPointOut {
                param: pt.param,
                p: pt.p,
                class: pt.classification.to_string(),
            })
            .collect(),
        closed_form: d
            .closed_form
            .iter()
            .map(|pt| ClosedFormPointOut {
                param: pt.param,
                p: pt.p,
                class: pt.classification.to_string(),
                boundary: pt.boundary,
            })
            .collect(),
        events: d
            .events
            .iter()
            .map(|ev| EventOut {
                param: ev.param,
                p: ev.p,
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct TangencyPointOut {
    #[serde(rename = "P")]
    pub p: f64,
    pub eps: f64,
    pub r: f64,
    pub feasible: bool,
}

#[derive(Serialize)]
pub struct TangencyOut {
    pub curve: String,
    pub skipped: usize,
    pub points: Vec<TangencyPointOut>,
}

pub fn tangency_json(curve_label: &str, tc: &TangencyCurve) -> TangencyOut {
    TangencyOut {
        curve: curve_label.to_string(),
        skipped: tc.skipped,
        points: tc
            .points
            .iter()
            .map(|pt| TangencyPointOut {
                p: pt.p,
                eps: pt.eps,
                r: pt.r,
                feasible: pt.feasible,
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct SurfaceSampleOut {
    #[serde(rename = "P")]
    pub p: f64,
    pub eps: f64,
    pub r: f64,
}

#[derive(Serialize)]
pub struct SurfaceOut {
    pub curve: String,
    pub samples: Vec<SurfaceSampleOut>,
}

pub fn surface_json(curve_label: &str, samples: &[SurfaceSample]) -> SurfaceOut {
    SurfaceOut {
        curve: curve_label.to_string(),
        samples: samples
            .iter()
            .map(|s| SurfaceSampleOut {
                p: s.p,
                eps: s.eps,
                r: s.r,
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct AssumptionOut {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub at: f64,
}

#[derive(Serialize)]
pub struct ValidateOut {
    pub curve: String,
    pub grid_n: usize,
    pub all_passed: bool,
    pub assumptions: Vec<AssumptionOut>,
}

pub fn validate_json(curve_label: &str, grid_n: usize, report: &ValidationReport) -> ValidateOut {
    ValidateOut {
        curve: curve_label.to_string(),
        grid_n,
        all_passed: report.all_passed(),
        assumptions: report
            .iter()
            .map(|c| AssumptionOut {
                name: c.name.to_string(),
                passed: c.passed,
                worst: c.worst,
                at: c.at,
            })
            .collect(),
    }
}

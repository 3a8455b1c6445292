//! Report schema, version 1: a stable, machine-readable echo of the instance
//! plus the candidate table, with optional waypoint and oracle sections.

use serde::Serialize;

use dubins_sphere::oracle::OracleResult;
use dubins_sphere::planner::Plan;

use crate::instance::Instance;

#[derive(Debug, Serialize)]
pub struct InstanceEcho {
    pub r: f64,
    pub target: [f64; 3],
    pub r0: [[f64; 3]; 3],
}

#[derive(Debug, Serialize)]
pub struct CandidateReport {
    pub path_type: String,
    pub phi1: f64,
    pub phi2: f64,
    pub length: f64,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct WaypointRow {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
    pub segment: usize,
    pub seg_type: &'static str,
}

#[derive(Debug, Serialize)]
pub struct OracleSection {
    pub length: f64,
    pub word: String,
    pub angles: Vec<f64>,
    pub residual: f64,
    pub resolution_bound: f64,
    pub chord_tolerance: f64,
    /// Planner optimum minus oracle length; certified to stay below the
    /// resolution bound.
    pub gap: f64,
    pub feasible: bool,
}

impl OracleSection {
    pub fn new(result: &OracleResult, plan_length: f64) -> Self {
        match &result.best {
            Some(best) => OracleSection {
                length: best.length,
                word: best.word.iter().map(|t| t.to_string()).collect(),
                angles: best.angles.clone(),
                residual: best.residual,
                resolution_bound: result.resolution_bound,
                chord_tolerance: result.chord_tolerance,
                gap: plan_length - best.length,
                feasible: true,
            },
            None => OracleSection {
                length: f64::INFINITY,
                word: String::new(),
                angles: Vec::new(),
                residual: f64::INFINITY,
                resolution_bound: result.resolution_bound,
                chord_tolerance: result.chord_tolerance,
                gap: f64::NEG_INFINITY,
                feasible: false,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PlanReport {
    pub format: u32,
    pub instance: InstanceEcho,
    pub candidates: Vec<CandidateReport>,
    pub optimal: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub waypoints: Option<Vec<WaypointRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

impl PlanReport {
    pub fn new(
        instance: &Instance,
        plan: &Plan,
        sorted: bool,
        waypoints: Option<Vec<WaypointRow>>,
        oracle: Option<OracleSection>,
    ) -> Self {
        let m = instance.r0.matrix();
        let mut rows: Vec<(usize, CandidateReport)> = plan
            .candidates
            .iter()
            .enumerate()
            .map(|(i, c)| {
                (
                    i,
                    CandidateReport {
                        path_type: c.path_type.label().to_string(),
                        phi1: c.phi1,
                        phi2: c.phi2,
                        length: c.length,
                        residual: c.residual,
                    },
                )
            })
            .collect();
        if sorted {
            rows.sort_by(|a, b| {
                a.1.length
                    .partial_cmp(&b.1.length)
                    .expect("lengths are finite")
            });
        }
        let optimal = rows
            .iter()
            .position(|(i, _)| *i == plan.optimal)
            .expect("optimal index present");
        PlanReport {
            format: 1,
            instance: InstanceEcho {
                r: instance.r.get(),
                target: [instance.target.x, instance.target.y, instance.target.z],
                r0: [
                    [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
                    [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
                    [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
                ],
            },
            candidates: rows.into_iter().map(|(_, c)| c).collect(),
            optimal,
            waypoints,
            oracle,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "instance: r={:.12} target=({:.12}, {:.12}, {:.12})\n",
            self.instance.r,
            self.instance.target[0],
            self.instance.target[1],
            self.instance.target[2]
        ));
        out.push_str(&format!("candidates: {}\n", self.candidates.len()));
        for (i, c) in self.candidates.iter().enumerate() {
            let marker = if i == self.optimal { "*" } else { " " };
            out.push_str(&format!(
                "{marker} {:<7} phi1={:.12} phi2={:.12} length={:.12} residual={:.3e}\n",
                c.path_type, c.phi1, c.phi2, c.length, c.residual
            ));
        }
        let best = &self.candidates[self.optimal];
        out.push_str(&format!(
            "optimal: {} length={:.12}\n",
            best.path_type, best.length
        ));
        if let Some(oracle) = &self.oracle {
            if oracle.feasible {
                out.push_str(&format!(
                    "oracle: word={} length={:.12} residual={:.3e} bound={:.6e} gap={:.6e}\n",
                    if oracle.word.is_empty() { "-" } else { &oracle.word },
                    oracle.length,
                    oracle.residual,
                    oracle.resolution_bound,
                    oracle.gap
                ));
            } else {
                out.push_str("oracle: infeasible at this resolution\n");
            }
        }
        if let Some(rows) = &self.waypoints {
            out.push_str("waypoints: s x y z tx ty tz segment type\n");
            for row in rows {
                out.push_str(&format!(
                    "{:.12} {:.12} {:.12} {:.12} {:.12} {:.12} {:.12} {} {}\n",
                    row.s, row.x, row.y, row.z, row.tx, row.ty, row.tz, row.segment, row.seg_type
                ));
            }
        }
        out
    }
}

//! JSON reports.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dynamics::Attractor;
use crate::network::NetworkDef;
use crate::pipeline::PipelineReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttractorJson {
    pub length: usize,
    pub states: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineJson {
    pub before: usize,
    pub after: usize,
    #[serde(rename = "T")]
    pub t: Vec<String>,
    pub h: BTreeMap<String, String>,
    pub rewrites: Vec<String>,
    pub verified: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportJson {
    pub network: String,
    pub nodes: Vec<String>,
    pub attractors: Vec<AttractorJson>,
    pub pipeline: Option<PipelineJson>,
}

fn attractor_list(width: usize, atts: &[Attractor]) -> Vec<AttractorJson> {
    atts.iter()
        .map(|a| AttractorJson {
            length: a.len(),
            states: a.bitstrings(width),
        })
        .collect()
}

impl ReportJson {
    pub fn attractors(net: &NetworkDef, atts: &[Attractor]) -> Self {
        ReportJson {
            network: net.name().to_string(),
            nodes: net.nodes().to_vec(),
            attractors: attractor_list(net.len(), atts),
            pipeline: None,
        }
    }

    /// Describes the optimized network; its attractor list is empty when
    /// they were not enumerated.
    pub fn pipeline(report: &PipelineReport) -> Self {
        let net = &report.optimized;
        ReportJson {
            network: net.name().to_string(),
            nodes: net.nodes().to_vec(),
            attractors: report
                .optimized_attractors
                .as_deref()
                .map(|a| attractor_list(net.len(), a))
                .unwrap_or_default(),
            pipeline: Some(PipelineJson {
                before: report.before(),
                after: report.after(),
                t: report.cut.clone(),
                h: report.h.clone(),
                rewrites: report.rewrites.iter().map(ToString::to_string).collect(),
                verified: report.verified,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

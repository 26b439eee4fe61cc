//! JSON report documents.

use std::collections::BTreeMap;
use std::time::Instant;

use lyapcert_core::criteria::{CertifiedRadius, KrasovskiiReport, RadiusSearch, StabilityVerdict};
use lyapcert_core::hopfield::HopfieldBetas;
use lyapcert_core::simulate::{ConvergenceSummary, IntegratorConfig};
use lyapcert_core::system::{BallRadius, JacobianMode};
use lyapcert_core::HopfieldNetwork;
use serde::Serialize;
use serde_json::Value;

use crate::file::LoadedSystem;
use crate::settings::Settings;

pub const TOOL_NAME: &str = "lyapcert";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self { name: TOOL_NAME, version: TOOL_VERSION }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemEcho {
    pub label: String,
    pub kind: &'static str,
    pub dimension: usize,
    pub ball_radius: BallRadius,
    pub jacobian_mode: JacobianMode,
    pub components: Vec<String>,
    pub file: Value,
}

impl SystemEcho {
    pub fn new(loaded: &LoadedSystem) -> Self {
        let s = &loaded.system;
        Self {
            label: s.label().to_string(),
            kind: loaded.kind,
            dimension: s.dim(),
            ball_radius: s.ball(),
            jacobian_mode: s.jacobian_mode(),
            components: s.components(),
            file: loaded.document.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfieldSection {
    pub network: HopfieldNetwork,
    /// Decay and connection split of β at the equilibrium.
    pub at_equilibrium: HopfieldBetas,
}

/// Wall-clock milliseconds per phase; the only non-deterministic part of a report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings(BTreeMap<&'static str, f64>);

impl Timings {
    pub fn time<T>(&mut self, phase: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.insert(phase, start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub tool: ToolInfo,
    pub command: &'static str,
    pub seed: u64,
    pub system: SystemEcho,
    pub settings: Settings,
    pub theorem2: StabilityVerdict,
    pub lakshmikantham: StabilityVerdict,
    pub krasovskii: KrasovskiiReport,
    pub certified_radius: CertifiedRadius,
    pub hopfield: Option<HopfieldSection>,
    pub simulation: Option<ConvergenceSummary>,
    pub timings: Timings,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub tool: ToolInfo,
    pub command: &'static str,
    pub seed: u64,
    pub system: SystemEcho,
    pub settings: Settings,
    pub search: RadiusSearch,
    pub timings: Timings,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub tool: ToolInfo,
    pub command: &'static str,
    pub seed: u64,
    pub system: SystemEcho,
    pub integrator: IntegratorConfig,
    pub summary: ConvergenceSummary,
    pub csv_files: Vec<String>,
    pub timings: Timings,
}

/// Pretty JSON followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Drops the `timings` member so two reports can be compared.
pub fn without_timings(report: &str) -> Option<Value> {
    let mut v: Value = serde_json::from_str(report).ok()?;
    v.as_object_mut()?.remove("timings");
    Some(v)
}

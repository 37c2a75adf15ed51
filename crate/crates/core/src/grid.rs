//! Grid data model: buses, lines, generators, demands and demand/WIP
//! scenarios, with a JSON loader and validator.
//!
//! Susceptance is stored per-unit on the file's MVA base; the loader derives
//! the MW/rad coefficient used by the DC flow constraints. Wildfire ignition
//! probabilities are stored raw and multiplied by the file's `wip_scale`
//! (the upstream index-to-probability conversion knob).

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type BusId = u32;
pub type LineId = u32;
pub type GenId = u32;
pub type DemandId = u32;
pub type ScenarioId = u32;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("duplicate {entity} id {id}")]
    DuplicateId { entity: &'static str, id: u32 },
    #[error("validation error on {entity} {id}, field {field}: {reason}")]
    Validation {
        entity: &'static str,
        id: u32,
        field: &'static str,
        reason: String,
    },
    #[error("validation error: {0}")]
    Structure(String),
}

fn invalid(
    entity: &'static str,
    id: u32,
    field: &'static str,
    reason: impl Into<String>,
) -> NetworkError {
    NetworkError::Validation {
        entity,
        id,
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub horizon: usize,
    pub mva_base: f64,
    #[serde(default = "default_theta_max")]
    pub theta_max: f64,
    #[serde(default = "default_wip_scale")]
    pub wip_scale: f64,
}

fn default_theta_max() -> f64 {
    0.6
}
fn default_wip_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: BusId,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub is_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Line {
    pub id: LineId,
    pub from_bus: BusId,
    pub to_bus: BusId,
    /// Per-unit susceptance magnitude on `meta.mva_base`.
    pub susceptance: f64,
    pub flow_min: f64,
    pub flow_max: f64,
    /// Baseline wildfire ignition probability (pre `wip_scale`).
    pub wip_base: f64,
    /// Ignition probability after de-energization; 1 models perfect PSPS.
    #[serde(default = "default_wip_deenergized")]
    pub wip_deenergized: f64,
    /// Social vulnerability weight of the line corridor, in [0, 1].
    #[serde(default)]
    pub svi: f64,
    /// Expected fire impact in acres.
    #[serde(default)]
    pub impact: f64,
}

fn default_wip_deenergized() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub id: GenId,
    pub bus: BusId,
    pub p_min: f64,
    pub p_max: f64,
    pub ramp_min: f64,
    pub ramp_max: f64,
    pub cost_marginal: f64,
    pub cost_up: f64,
    pub cost_dn: f64,
    pub min_up: usize,
    pub min_dn: usize,
    #[serde(default)]
    pub initial_status: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Demand {
    pub id: DemandId,
    pub bus: BusId,
    pub voll: f64,
    /// Per-scenario hourly MW profile, keyed by demand scenario id.
    pub profile: BTreeMap<ScenarioId, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandScenario {
    pub id: ScenarioId,
    pub probability: f64,
    /// Optional per-line WIP for this scenario (pre `wip_scale`); lines
    /// without an entry fall back to their `wip_base`.
    #[serde(default)]
    pub wip_overrides: BTreeMap<LineId, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub meta: Meta,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    pub demands: Vec<Demand>,
    pub demand_scenarios: Vec<DemandScenario>,
}

/// Validated, immutable network. Construction goes through
/// [`load_network`] / [`Network::from_file`], which check every invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    file: NetworkFile,
    reference_bus: BusId,
}

pub fn load_network(path: &Path) -> Result<Network, NetworkError> {
    let text = fs::read_to_string(path).map_err(|source| NetworkError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: NetworkFile =
        serde_json::from_str(&text).map_err(|e| NetworkError::Parse(e.to_string()))?;
    Network::from_file(file)
}

impl Network {
    pub fn from_file(file: NetworkFile) -> Result<Self, NetworkError> {
        validate(&file)?;
        let reference_bus = file
            .buses
            .iter()
            .find(|b| b.is_reference)
            .map(|b| b.id)
            .expect("validated");
        Ok(Network {
            file,
            reference_bus,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("network serializes")
    }

    pub fn horizon(&self) -> usize {
        self.file.meta.horizon
    }
    pub fn meta(&self) -> &Meta {
        &self.file.meta
    }
    pub fn theta_max(&self) -> f64 {
        self.file.meta.theta_max
    }
    pub fn buses(&self) -> &[Bus] {
        &self.file.buses
    }
    pub fn lines(&self) -> &[Line] {
        &self.file.lines
    }
    pub fn generators(&self) -> &[Generator] {
        &self.file.generators
    }
    pub fn demands(&self) -> &[Demand] {
        &self.file.demands
    }
    pub fn demand_scenarios(&self) -> &[DemandScenario] {
        &self.file.demand_scenarios
    }
    pub fn reference_bus(&self) -> BusId {
        self.reference_bus
    }

    pub fn line(&self, id: LineId) -> &Line {
        &self.file.lines[(id - 1) as usize]
    }

    /// DC flow coefficient in MW per radian: per-unit susceptance times base.
    pub fn flow_coefficient(&self, line: &Line) -> f64 {
        line.susceptance * self.file.meta.mva_base
    }

    /// Baseline WIP of a line after scaling, averaged over demand scenarios
    /// when per-scenario overrides are present.
    pub fn scaled_expected_wip(&self, line: &Line) -> f64 {
        let scale = self.file.meta.wip_scale;
        let mut p = 0.0;
        for sc in &self.file.demand_scenarios {
            let raw = sc.wip_overrides.get(&line.id).copied().unwrap_or(line.wip_base);
            p += sc.probability * raw;
        }
        p * scale
    }

    /// De-energized ignition probability (not subject to `wip_scale`; it is
    /// already a probability, 1 for perfect shut-offs).
    pub fn wip_deenergized(&self, line: &Line) -> f64 {
        line.wip_deenergized
    }
}

/// Expected hourly demand per load: entry `(d, t)` is the probability
/// weighted average over demand scenarios.
pub fn expected_demand(net: &Network) -> Vec<Vec<f64>> {
    let h = net.horizon();
    net.demands()
        .iter()
        .map(|d| {
            let mut row = vec![0.0; h];
            for sc in net.demand_scenarios() {
                let profile = &d.profile[&sc.id];
                for (t, slot) in row.iter_mut().enumerate() {
                    *slot += sc.probability * profile[t];
                }
            }
            row
        })
        .collect()
}

/// Expected (scaled) baseline WIP per line, in file order.
pub fn expected_wip(net: &Network) -> Vec<f64> {
    net.lines()
        .iter()
        .map(|l| {
            let p = net.scaled_expected_wip(l);
            debug_assert!((0.0..=1.0).contains(&p));
            p
        })
        .collect()
}

fn validate(file: &NetworkFile) -> Result<(), NetworkError> {
    let meta = &file.meta;
    if meta.horizon == 0 {
        return Err(invalid("meta", 0, "horizon", "must be at least 1"));
    }
    if !(meta.mva_base > 0.0) {
        return Err(invalid("meta", 0, "mva_base", "must be positive"));
    }
    if !(meta.theta_max > 0.0) {
        return Err(invalid("meta", 0, "theta_max", "must be positive"));
    }
    if !(meta.wip_scale >= 0.0) {
        return Err(invalid("meta", 0, "wip_scale", "must be nonnegative"));
    }

    // Buses: contiguous ids from 1, exactly one reference.
    let mut seen = HashSet::new();
    for b in &file.buses {
        if !seen.insert(b.id) {
            return Err(NetworkError::DuplicateId {
                entity: "bus",
                id: b.id,
            });
        }
    }
    let nb = file.buses.len() as u32;
    for b in &file.buses {
        if b.id == 0 || b.id > nb {
            return Err(invalid(
                "bus",
                b.id,
                "id",
                format!("ids must be contiguous 1..{nb}"),
            ));
        }
    }
    let n_ref = file.buses.iter().filter(|b| b.is_reference).count();
    if n_ref != 1 {
        return Err(NetworkError::Structure(format!(
            "exactly one reference bus required, found {n_ref}"
        )));
    }
    let bus_exists = |id: BusId| id >= 1 && id <= nb;

    // Lines: contiguous ids, endpoint sanity, probability and limit ranges.
    let mut seen = HashSet::new();
    for l in &file.lines {
        if !seen.insert(l.id) {
            return Err(NetworkError::DuplicateId {
                entity: "line",
                id: l.id,
            });
        }
    }
    let nl = file.lines.len() as u32;
    for l in &file.lines {
        if l.id == 0 || l.id > nl {
            return Err(invalid(
                "line",
                l.id,
                "id",
                format!("ids must be contiguous 1..{nl}"),
            ));
        }
        if !bus_exists(l.from_bus) {
            return Err(invalid("line", l.id, "from_bus", "references missing bus"));
        }
        if !bus_exists(l.to_bus) {
            return Err(invalid("line", l.id, "to_bus", "references missing bus"));
        }
        if l.from_bus == l.to_bus {
            return Err(invalid("line", l.id, "to_bus", "self-loop not allowed"));
        }
        if !(l.susceptance > 0.0) {
            return Err(invalid("line", l.id, "susceptance", "must be positive"));
        }
        if !(l.flow_min <= 0.0 && 0.0 <= l.flow_max) {
            return Err(invalid(
                "line",
                l.id,
                "flow_min",
                "flow_min <= 0 <= flow_max required",
            ));
        }
        let scaled = l.wip_base * meta.wip_scale;
        if !(0.0..=1.0).contains(&scaled) {
            return Err(invalid(
                "line",
                l.id,
                "wip_base",
                format!("scaled WIP {scaled} outside [0, 1]"),
            ));
        }
        if !(0.0..=1.0).contains(&l.wip_deenergized) {
            return Err(invalid(
                "line",
                l.id,
                "wip_deenergized",
                "must be a probability",
            ));
        }
        if scaled > l.wip_deenergized {
            return Err(invalid(
                "line",
                l.id,
                "wip_deenergized",
                format!(
                    "baseline WIP {scaled} exceeds de-energized WIP {}",
                    l.wip_deenergized
                ),
            ));
        }
        if !(0.0..=1.0).contains(&l.svi) {
            return Err(invalid("line", l.id, "svi", "must lie in [0, 1]"));
        }
        if !(l.impact >= 0.0) {
            return Err(invalid("line", l.id, "impact", "must be nonnegative"));
        }
    }

    // Generators.
    let mut seen = HashSet::new();
    for g in &file.generators {
        if !seen.insert(g.id) {
            return Err(NetworkError::DuplicateId {
                entity: "generator",
                id: g.id,
            });
        }
        if !bus_exists(g.bus) {
            return Err(invalid("generator", g.id, "bus", "references missing bus"));
        }
        if !(0.0 <= g.p_min && g.p_min <= g.p_max) {
            return Err(invalid(
                "generator",
                g.id,
                "p_min",
                "0 <= p_min <= p_max required",
            ));
        }
        if !(g.ramp_min <= 0.0 && 0.0 <= g.ramp_max) {
            return Err(invalid(
                "generator",
                g.id,
                "ramp_min",
                "ramp_min <= 0 <= ramp_max required",
            ));
        }
        if g.min_up < 1 || g.min_dn < 1 {
            return Err(invalid(
                "generator",
                g.id,
                "min_up",
                "min_up and min_dn must be at least 1",
            ));
        }
        if g.cost_marginal < 0.0 || g.cost_up < 0.0 || g.cost_dn < 0.0 {
            return Err(invalid(
                "generator",
                g.id,
                "cost_marginal",
                "costs must be nonnegative",
            ));
        }
    }

    // Demand scenarios: positive weights summing to one.
    let mut seen = HashSet::new();
    for sc in &file.demand_scenarios {
        if !seen.insert(sc.id) {
            return Err(NetworkError::DuplicateId {
                entity: "demand_scenario",
                id: sc.id,
            });
        }
        if !(sc.probability >= 0.0) {
            return Err(invalid(
                "demand_scenario",
                sc.id,
                "probability",
                "must be nonnegative",
            ));
        }
        for (&line_id, &p) in &sc.wip_overrides {
            if line_id == 0 || line_id > nl {
                return Err(invalid(
                    "demand_scenario",
                    sc.id,
                    "wip_overrides",
                    format!("references missing line {line_id}"),
                ));
            }
            let scaled = p * meta.wip_scale;
            if !(0.0..=1.0).contains(&scaled) {
                return Err(invalid(
                    "demand_scenario",
                    sc.id,
                    "wip_overrides",
                    format!("scaled WIP {scaled} for line {line_id} outside [0, 1]"),
                ));
            }
            let line = &file.lines[(line_id - 1) as usize];
            if scaled > line.wip_deenergized {
                return Err(invalid(
                    "demand_scenario",
                    sc.id,
                    "wip_overrides",
                    format!(
                        "scaled WIP {scaled} for line {line_id} exceeds its de-energized WIP"
                    ),
                ));
            }
        }
    }
    if file.demand_scenarios.is_empty() {
        return Err(NetworkError::Structure(
            "at least one demand scenario required".into(),
        ));
    }
    let total: f64 = file.demand_scenarios.iter().map(|s| s.probability).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(NetworkError::Structure(format!(
            "demand scenario probabilities sum to {total}, expected 1"
        )));
    }

    // Demands: bus refs, complete nonnegative profiles for every scenario.
    let mut seen = HashSet::new();
    for d in &file.demands {
        if !seen.insert(d.id) {
            return Err(NetworkError::DuplicateId {
                entity: "demand",
                id: d.id,
            });
        }
        if !bus_exists(d.bus) {
            return Err(invalid("demand", d.id, "bus", "references missing bus"));
        }
        for sc in &file.demand_scenarios {
            match d.profile.get(&sc.id) {
                None => {
                    return Err(invalid(
                        "demand",
                        d.id,
                        "profile",
                        format!("missing profile for scenario {}", sc.id),
                    ))
                }
                Some(p) => {
                    if p.len() != meta.horizon {
                        return Err(invalid(
                            "demand",
                            d.id,
                            "profile",
                            format!(
                                "scenario {} has {} entries, horizon is {}",
                                sc.id,
                                p.len(),
                                meta.horizon
                            ),
                        ));
                    }
                    if p.iter().any(|&x| !(x >= 0.0)) {
                        return Err(invalid(
                            "demand",
                            d.id,
                            "profile",
                            format!("scenario {} has a negative entry", sc.id),
                        ));
                    }
                }
            }
        }
        for key in d.profile.keys() {
            if !file.demand_scenarios.iter().any(|s| s.id == *key) {
                return Err(invalid(
                    "demand",
                    d.id,
                    "profile",
                    format!("profile references unknown scenario {key}"),
                ));
            }
        }
    }

    // Connectivity with every line energized (union-find).
    if nb > 0 {
        let mut parent: Vec<u32> = (0..nb).collect();
        fn find(parent: &mut Vec<u32>, x: u32) -> u32 {
            let mut r = x;
            while parent[r as usize] != r {
                parent[r as usize] = parent[parent[r as usize] as usize];
                r = parent[r as usize];
            }
            r
        }
        for l in &file.lines {
            let a = find(&mut parent, l.from_bus - 1);
            let b = find(&mut parent, l.to_bus - 1);
            if a != b {
                parent[a as usize] = b;
            }
        }
        let root = find(&mut parent, 0);
        for b in 1..nb {
            if find(&mut parent, b) != root {
                return Err(NetworkError::Structure(format!(
                    "network is disconnected: bus {} unreachable with all lines energized",
                    b + 1
                )));
            }
        }
    }

    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn tiny_file() -> NetworkFile {
        serde_json::from_str(
            r#"{
            "meta": {"horizon": 2, "mva_base": 1.0},
            "buses": [
                {"id": 1, "name": "a", "is_reference": true},
                {"id": 2, "name": "b", "is_reference": false}
            ],
            "lines": [{
                "id": 1, "from_bus": 1, "to_bus": 2, "susceptance": 10.0,
                "flow_min": -100.0, "flow_max": 100.0,
                "wip_base": 0.1, "wip_deenergized": 1.0, "svi": 0.5, "impact": 100.0
            }],
            "generators": [{
                "id": 1, "bus": 1, "p_min": 10.0, "p_max": 50.0,
                "ramp_min": -50.0, "ramp_max": 50.0,
                "cost_marginal": 10.0, "cost_up": 100.0, "cost_dn": 10.0,
                "min_up": 1, "min_dn": 1, "initial_status": false
            }],
            "demands": [{
                "id": 1, "bus": 2, "voll": 5000.0,
                "profile": {"1": [30.0, 40.0], "2": [20.0, 25.0]}
            }],
            "demand_scenarios": [
                {"id": 1, "probability": 0.5},
                {"id": 2, "probability": 0.5}
            ]
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn loads_and_roundtrips() {
        let net = Network::from_file(tiny_file()).unwrap();
        let json = net.to_json();
        let back: NetworkFile = serde_json::from_str(&json).unwrap();
        let net2 = Network::from_file(back).unwrap();
        assert_eq!(net, net2);
    }

    #[test]
    fn expected_demand_weights_scenarios() {
        let net = Network::from_file(tiny_file()).unwrap();
        let ed = expected_demand(&net);
        assert!((ed[0][0] - 25.0).abs() < 1e-12);
        assert!((ed[0][1] - 32.5).abs() < 1e-12);
    }

    #[test]
    fn expected_wip_mixes_overrides() {
        let mut file = tiny_file();
        file.demand_scenarios[0].wip_overrides.insert(1, 0.02);
        file.demand_scenarios[1].wip_overrides.insert(1, 0.04);
        let net = Network::from_file(file).unwrap();
        let w = expected_wip(&net);
        assert!((w[0] - 0.03).abs() < 1e-12);
    }

    #[test]
    fn rejects_wip_ordering_violation_naming_the_line() {
        let mut file = tiny_file();
        file.lines[0].wip_base = 0.5;
        file.lines[0].wip_deenergized = 0.2;
        let err = Network::from_file(file).unwrap_err();
        match err {
            NetworkError::Validation { entity, id, field, .. } => {
                assert_eq!(entity, "line");
                assert_eq!(id, 1);
                assert_eq!(field, "wip_deenergized");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_probability_sum_off_by_more_than_1e9() {
        let mut file = tiny_file();
        file.demand_scenarios[1].probability = 0.5001;
        assert!(Network::from_file(file).is_err());
    }

    #[test]
    fn rejects_disconnected_network() {
        let mut file = tiny_file();
        file.buses.push(Bus {
            id: 3,
            name: "island".into(),
            is_reference: false,
        });
        assert!(matches!(
            Network::from_file(file),
            Err(NetworkError::Structure(_))
        ));
    }

    #[test]
    fn rejects_duplicate_line_id() {
        let mut file = tiny_file();
        let mut extra = file.lines[0].clone();
        extra.from_bus = 2;
        extra.to_bus = 1;
        file.lines.push(extra);
        assert!(matches!(
            Network::from_file(file),
            Err(NetworkError::DuplicateId { entity: "line", .. })
        ));
    }

    #[test]
    fn rejects_short_profile() {
        let mut file = tiny_file();
        file.demands[0].profile.insert(2, vec![20.0]);
        assert!(Network::from_file(file).is_err());
    }

    #[test]
    fn wip_scale_applies_to_validation_and_expectation() {
        let mut file = tiny_file();
        file.meta.wip_scale = 1e4;
        file.lines[0].wip_base = 2.0e-6;
        let net = Network::from_file(file.clone()).unwrap();
        assert!((expected_wip(&net)[0] - 0.02).abs() < 1e-12);

        file.lines[0].wip_base = 2.0e-4; // scales above 1
        assert!(Network::from_file(file).is_err());
    }
}

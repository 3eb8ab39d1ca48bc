//! System state as a graph of components with timestamped parameter vectors
//! and named influence functions on the edges.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("{kind:?} expects {expected} parameters, got {got}")]
    SchemaMismatch { kind: ComponentKind, expected: usize, got: usize },
    #[error("unknown component {0}")]
    UnknownComponent(ComponentId),
    #[error("unknown influence function `{0}`")]
    UnknownFunction(String),
    #[error("influence function `{id}` expects {expected} arguments, got {got}")]
    FunctionArity { id: String, expected: usize, got: usize },
    #[error("self-loop on component {0}")]
    SelfLoop(ComponentId),
    #[error("binding {source_index}->{target_index} is out of range for the edge endpoints")]
    BadBinding { source_index: usize, target_index: usize },
    #[error("time step must be positive (got {0})")]
    BadTimeStep(f64),
    #[error("time may not move backwards (now {now}, requested {requested})")]
    TimeReversal { now: f64, requested: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentId(pub u32);

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Uav,
    MobileControl,
    CentralModule,
    Sensor,
    ComputeModule,
}

/// `(name, unit)` pairs of a kind's parameter vector.
pub type Schema = &'static [(&'static str, &'static str)];

impl ComponentKind {
    pub const ALL: [ComponentKind; 5] = [
        ComponentKind::Uav,
        ComponentKind::MobileControl,
        ComponentKind::CentralModule,
        ComponentKind::Sensor,
        ComponentKind::ComputeModule,
    ];

    pub fn schema(&self) -> Schema {
        match self {
            ComponentKind::Uav => &[("battery", "fraction"), ("x", "m"), ("y", "m"), ("z", "m"), ("speed", "m/s")],
            ComponentKind::MobileControl => &[
                ("fleet_battery", "fraction"),
                ("fleet_speed", "m/s"),
                ("relay_queue", "messages"),
                ("frames_relayed", "messages"),
                ("link_quality", "fraction"),
            ],
            ComponentKind::CentralModule => &[
                ("frames_stored", "frames"),
                ("defects_detected", "defects"),
                ("load", "fraction"),
                ("heartbeat_age", "s"),
            ],
            ComponentKind::Sensor => &[("fov", "deg"), ("range", "m"), ("base_detect_prob", "fraction"), ("captures", "frames")],
            ComponentKind::ComputeModule => &[("queue", "items"), ("processed", "items"), ("load", "fraction")],
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ComponentKind::Uav => "uav",
            ComponentKind::MobileControl => "mobile_control",
            ComponentKind::CentralModule => "central_module",
            ComponentKind::Sensor => "sensor",
            ComponentKind::ComputeModule => "compute_module",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Health {
    Operational,
    Degraded,
    Failed,
}

impl Health {
    pub const ALL: [Health; 3] = [Health::Operational, Health::Degraded, Health::Failed];

    pub fn as_str(&self) -> &'static str {
        match self {
            Health::Operational => "operational",
            Health::Degraded => "degraded",
            Health::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentState {
    pub id: ComponentId,
    pub name: String,
    pub kind: ComponentKind,
    pub params: Vec<f64>,
    pub timestamp: f64,
    pub health: Health,
}

impl ComponentState {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.kind.schema().iter().position(|(n, _)| *n == name).map(|i| self.params[i])
    }
}

/// Closed registry of pure influence functions, selected by id.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "function", rename_all = "snake_case")]
pub enum InfluenceFunction {
    /// target := source
    Copy,
    /// target := factor · source
    Scale { factor: f64 },
    /// target := clamp(source, lo, hi)
    Clamp { lo: f64, hi: f64 },
    /// target := Σ sources over every aggregating edge into the same parameter
    TelemetryAggregate,
    /// target relaxes toward source with rate `rate` (1/s)
    LatencyDecay { rate: f64 },
}

impl InfluenceFunction {
    pub const IDS: [&'static str; 5] = ["copy", "scale", "clamp", "telemetry_aggregate", "latency_decay"];

    pub fn from_id(id: &str, args: &[f64]) -> Result<Self, GraphError> {
        let arity = |expected: usize| {
            if args.len() == expected {
                Ok(())
            } else {
                Err(GraphError::FunctionArity { id: id.into(), expected, got: args.len() })
            }
        };
        match id {
            "copy" | "telemetry_copy" => arity(0).map(|_| InfluenceFunction::Copy),
            "scale" => arity(1).map(|_| InfluenceFunction::Scale { factor: args[0] }),
            "clamp" => arity(2).map(|_| InfluenceFunction::Clamp { lo: args[0], hi: args[1] }),
            "telemetry_aggregate" => arity(0).map(|_| InfluenceFunction::TelemetryAggregate),
            "latency_decay" => arity(1).map(|_| InfluenceFunction::LatencyDecay { rate: args[0] }),
            _ => Err(GraphError::UnknownFunction(id.into())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            InfluenceFunction::Copy => "copy",
            InfluenceFunction::Scale { .. } => "scale",
            InfluenceFunction::Clamp { .. } => "clamp",
            InfluenceFunction::TelemetryAggregate => "telemetry_aggregate",
            InfluenceFunction::LatencyDecay { .. } => "latency_decay",
        }
    }

    pub fn args(&self) -> Vec<f64> {
        match *self {
            InfluenceFunction::Copy | InfluenceFunction::TelemetryAggregate => Vec::new(),
            InfluenceFunction::Scale { factor } => vec![factor],
            InfluenceFunction::Clamp { lo, hi } => vec![lo, hi],
            InfluenceFunction::LatencyDecay { rate } => vec![rate],
        }
    }

    /// Value the edge asks the target parameter to take.
    fn apply(&self, source: f64, target: f64, dt: f64) -> f64 {
        match *self {
            InfluenceFunction::Copy | InfluenceFunction::TelemetryAggregate => source,
            InfluenceFunction::Scale { factor } => factor * source,
            InfluenceFunction::Clamp { lo, hi } => source.max(lo).min(hi),
            InfluenceFunction::LatencyDecay { rate } => target + (source - target) * (1.0 - math::exp(-rate * dt)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeInfluence {
    pub from: ComponentId,
    pub to: ComponentId,
    pub function: InfluenceFunction,
    /// `(source param index, target param index)` pairs.
    pub bindings: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeHandle(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PropagateReport {
    pub applied: usize,
    /// Edges skipped because an endpoint is Failed.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSnapshot {
    pub time: f64,
    pub states: Vec<ComponentState>,
    pub edges: Vec<EdgeInfluence>,
}

/// Per-kind counts indexed by [`Health`] order.
pub type HealthTally = BTreeMap<ComponentKind, [usize; 3]>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComponentGraph {
    vertices: BTreeMap<ComponentId, ComponentState>,
    edges: Vec<EdgeInfluence>,
    kind_sets: BTreeMap<ComponentKind, BTreeSet<ComponentId>>,
    time: f64,
    next_id: u32,
}

impl ComponentGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn register(&mut self, kind: ComponentKind, name: impl Into<String>, params: Vec<f64>) -> Result<ComponentId, GraphError> {
        let expected = kind.schema().len();
        if params.len() != expected {
            return Err(GraphError::SchemaMismatch { kind, expected, got: params.len() });
        }
        self.next_id += 1;
        let id = ComponentId(self.next_id);
        self.vertices.insert(
            id,
            ComponentState { id, name: name.into(), kind, params, timestamp: self.time, health: Health::Operational },
        );
        self.kind_sets.entry(kind).or_default().insert(id);
        Ok(id)
    }

    pub fn connect(
        &mut self,
        from: ComponentId,
        to: ComponentId,
        function: InfluenceFunction,
        bindings: Vec<(usize, usize)>,
    ) -> Result<EdgeHandle, GraphError> {
        if from == to {
            return Err(GraphError::SelfLoop(from));
        }
        let src = self.vertices.get(&from).ok_or(GraphError::UnknownComponent(from))?;
        let dst = self.vertices.get(&to).ok_or(GraphError::UnknownComponent(to))?;
        for &(k, l) in &bindings {
            if k >= src.params.len() || l >= dst.params.len() {
                return Err(GraphError::BadBinding { source_index: k, target_index: l });
            }
        }
        self.edges.push(EdgeInfluence { from, to, function, bindings });
        Ok(EdgeHandle(self.edges.len() - 1))
    }

    /// Like [`connect`](Self::connect) but resolves the function by registry id.
    pub fn connect_named(
        &mut self,
        from: ComponentId,
        to: ComponentId,
        function_id: &str,
        args: &[f64],
        bindings: Vec<(usize, usize)>,
    ) -> Result<EdgeHandle, GraphError> {
        let f = InfluenceFunction::from_id(function_id, args)?;
        self.connect(from, to, f, bindings)
    }

    pub fn get(&self, id: ComponentId) -> Option<&ComponentState> {
        self.vertices.get(&id)
    }

    pub fn find(&self, name: &str) -> Option<ComponentId> {
        self.vertices.values().find(|s| s.name == name).map(|s| s.id)
    }

    pub fn components(&self) -> impl Iterator<Item = &ComponentState> {
        self.vertices.values()
    }

    pub fn edges(&self) -> &[EdgeInfluence] {
        &self.edges
    }

    pub fn kind_set(&self, kind: ComponentKind) -> impl Iterator<Item = ComponentId> + '_ {
        self.kind_sets.get(&kind).into_iter().flatten().copied()
    }

    pub fn kind_sets(&self) -> &BTreeMap<ComponentKind, BTreeSet<ComponentId>> {
        &self.kind_sets
    }

    /// Directed reachability along edges.
    pub fn reachable(&self, from: ComponentId, to: ComponentId) -> bool {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for e in self.edges.iter().filter(|e| e.from == v) {
                if seen.insert(e.to) {
                    queue.push_back(e.to);
                }
            }
        }
        false
    }

    /// Overwrites a component's parameters, stamped with the current time.
    pub fn set_param(&mut self, id: ComponentId, index: usize, value: f64) -> Result<(), GraphError> {
        let time = self.time;
        let state = self.vertices.get_mut(&id).ok_or(GraphError::UnknownComponent(id))?;
        if index >= state.params.len() {
            return Err(GraphError::BadBinding { source_index: index, target_index: index });
        }
        state.params[index] = value;
        state.timestamp = time;
        Ok(())
    }

    /// Moves the clock to `t` without applying influence.
    pub fn advance_to(&mut self, t: f64) -> Result<(), GraphError> {
        if t < self.time {
            return Err(GraphError::TimeReversal { now: self.time, requested: t });
        }
        self.time = t;
        for s in self.vertices.values_mut() {
            s.timestamp = t;
        }
        Ok(())
    }

    /// One synchronous step of length `dt`.
    ///
    /// Every edge reads parameter values at time `t` and the results become
    /// the values at `t + dt`. Edges are applied in insertion order; when
    /// several set-style edges hit the same parameter the last one wins,
    /// while `telemetry_aggregate` edges sum their sources. A Failed endpoint
    /// disables the edge; a Degraded source moves the target only half way.
    pub fn propagate(&mut self, dt: f64) -> Result<PropagateReport, GraphError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(GraphError::BadTimeStep(dt));
        }
        let before = &self.vertices;
        let mut next: BTreeMap<ComponentId, Vec<f64>> =
            before.iter().map(|(id, s)| (*id, s.params.clone())).collect();
        let mut aggregated: BTreeSet<(ComponentId, usize)> = BTreeSet::new();
        let mut report = PropagateReport::default();
        for edge in &self.edges {
            let src = &before[&edge.from];
            let dst = &before[&edge.to];
            if src.health == Health::Failed || dst.health == Health::Failed {
                report.skipped += 1;
                continue;
            }
            let gain = if src.health == Health::Degraded { 0.5 } else { 1.0 };
            let out = next.get_mut(&edge.to).expect("edge endpoint exists");
            for &(k, l) in &edge.bindings {
                let s = src.params[k];
                let t = dst.params[l];
                match edge.function {
                    InfluenceFunction::TelemetryAggregate => {
                        let contribution = gain * s;
                        if aggregated.insert((edge.to, l)) {
                            out[l] = contribution;
                        } else {
                            out[l] += contribution;
                        }
                    }
                    f => {
                        let v = f.apply(s, t, dt);
                        out[l] = t + gain * (v - t);
                    }
                }
            }
            report.applied += 1;
        }
        self.time += dt;
        for (id, params) in next {
            let s = self.vertices.get_mut(&id).expect("same key set");
            s.params = params;
            s.timestamp = self.time;
        }
        Ok(report)
    }

    pub fn snapshot(&self) -> SystemSnapshot {
        SystemSnapshot { time: self.time, states: self.vertices.values().cloned().collect(), edges: self.edges.clone() }
    }

    pub fn mark_health(&mut self, id: ComponentId, health: Health) -> Result<Health, GraphError> {
        let s = self.vertices.get_mut(&id).ok_or(GraphError::UnknownComponent(id))?;
        Ok(core::mem::replace(&mut s.health, health))
    }

    pub fn health(&self, id: ComponentId) -> Option<Health> {
        self.vertices.get(&id).map(|s| s.health)
    }

    pub fn monitor_report(&self) -> HealthTally {
        let mut tally = HealthTally::new();
        for s in self.vertices.values() {
            tally.entry(s.kind).or_insert([0; 3])[s.health as usize] += 1;
        }
        tally
    }
}

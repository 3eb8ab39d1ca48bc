//! Discrete-event mission engine.
//!
//! UAVs fly their assigned zones and capture a frame at the end of every
//! dwell. Frames travel UAV → mobile control → active central module over
//! lossy links with bounded retransmission. The mobile control keeps every
//! frame it has received; when a failed central module is detected at a
//! heartbeat, it switches to the lowest-numbered working module after the
//! failover delay and resends its whole log there. Central modules ignore
//! duplicate frames. Reports are assessed from the active module's frames
//! once every UAV is done and nothing is in flight.

pub mod log;
pub mod time;

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::log::{replay, EventLog, LogKind, LogRecord, ReplayError, LOG_HEADER};
pub use self::time::SimTime;

use crate::fusion::{aggregate, assess_criticality, assessment_latency, detections, estimate_size, AssessError, DefectReport};
use crate::graph::{ComponentGraph, ComponentId, ComponentKind, Health, InfluenceFunction};
use crate::planner::{surface_coverage_of, transit_time, Waypoint};
use crate::rng::{derive_seed, stream_rng, SimRng};
use crate::scenario::{central_name, uav_name, Issue, LinkSpec, Prepared, Scenario, Target, MOBILE_CONTROL};
use crate::sensor::{capture, GroundTruthDefect, Modality, ObservationRecord, SensorMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MissionError {
    #[error("scenario is invalid ({} problem(s))", .0.len())]
    Invalid(Vec<Issue>),
    #[error("mission aborted at t = {0} s: every central module failed and none is due to recover")]
    Aborted(SimTime),
    #[error("event queue ran dry at t = {0} s before the mission completed")]
    Stalled(SimTime),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error(transparent)]
    Assess(#[from] AssessError),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ZoneOutcome {
    pub zone_id: u32,
    /// One-based UAV number.
    pub uav: u32,
    /// From arrival at the first waypoint to the last capture; `None` if the zone was not finished.
    pub duration_h: Option<f64>,
    pub coverage: f64,
    pub waypoints_flown: u32,
    pub completed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MessageStats {
    /// Distinct messages handed to a link.
    pub sent: u64,
    pub delivered: u64,
    /// Resends after a drop.
    pub retransmitted: u64,
    /// Messages abandoned after the last retry.
    pub dropped: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureEvent {
    Failed,
    Recovered,
    Detected,
    Failover,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub time: SimTime,
    pub component: String,
    pub event: FailureEvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthCount {
    pub kind: ComponentKind,
    pub health: Health,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MissionResult {
    pub seed: u64,
    pub uavs: u32,
    pub zones: Vec<ZoneOutcome>,
    /// Hours until the last UAV finished its last zone.
    pub makespan_h: f64,
    /// Hours until the last frame reached the central module.
    pub completion_h: f64,
    pub reports: Vec<DefectReport>,
    pub injected_defects: u32,
    /// Farm total of thresholded distinct-defect counts.
    pub aggregate: f64,
    pub messages: MessageStats,
    pub failures: Vec<FailureRecord>,
    /// Final health of every component, by kind.
    pub health: Vec<HealthCount>,
}

/// A full run: the result, its event log and the active central module's matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionRun {
    pub result: MissionResult,
    pub log: EventLog,
    pub matrices: Vec<SensorMatrix>,
}

pub fn run_mission(scenario: &Scenario) -> Result<MissionResult, MissionError> {
    simulate(scenario).map(|r| r.result)
}

pub fn simulate(scenario: &Scenario) -> Result<MissionRun, MissionError> {
    let prepared = scenario.prepare().map_err(MissionError::Invalid)?;
    simulate_prepared(&prepared)
}

pub fn simulate_prepared(prepared: &Prepared) -> Result<MissionRun, MissionError> {
    Engine::new(prepared).run()
}

/// Adds a failure (and optional recovery) of a named component.
pub fn inject_failure(scenario: &Scenario, component: &str, at: f64, recover_at: Option<f64>) -> Result<Scenario, MissionError> {
    if scenario.resolve_target(component).is_none() {
        return Err(MissionError::UnknownComponent(component.into()));
    }
    let mut s = scenario.clone();
    s.failures.push(crate::scenario::FailureSpec { component: component.into(), at, recover_at });
    let bad: Vec<Issue> = match s.validate() {
        Ok(()) => Vec::new(),
        Err(issues) => issues.into_iter().filter(|i| i.path.starts_with("failures[")).collect(),
    };
    if bad.is_empty() {
        Ok(s)
    } else {
        Err(MissionError::Invalid(bad))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Uav(usize),
    MobileControl,
    Central(usize),
}

impl Node {
    fn name(self) -> String {
        match self {
            Node::Uav(u) => uav_name(u),
            Node::MobileControl => MOBILE_CONTROL.into(),
            Node::Central(j) => central_name(j),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Payload {
    WaypointReached { uav: usize, zone: u32, index: usize, epoch: u32 },
    FrameCaptured { uav: usize, zone: u32, index: usize, epoch: u32 },
    MessageDelivered { msg: u64 },
    MessageDropped { msg: u64 },
    ComponentFailed(Target),
    ComponentRecovered(Target),
    FailureDetected { central: usize },
    FailoverCompleted,
    MissionComplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimEvent {
    time: SimTime,
    seq: u64,
    payload: Payload,
}

impl Ord for SimEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct ZoneSchedule {
    dwell: Vec<SimTime>,
    /// `legs[i]`: flight time from waypoint `i` to `i + 1`.
    legs: Vec<SimTime>,
}

struct UavState {
    route: Vec<u32>,
    /// Position in `route` of the zone being flown.
    leg: usize,
    next_wp: usize,
    failed: bool,
    done: bool,
    epoch: u32,
    flown_total: usize,
    route_waypoints: usize,
}

struct ZoneProgress {
    uav: usize,
    start: Option<SimTime>,
    end: Option<SimTime>,
    flown: Vec<usize>,
}

struct Frame {
    zone: u32,
    observations: Vec<ObservationRecord>,
}

struct Message {
    frame: u64,
    from: Node,
    to: Node,
    attempt: u32,
}

struct Link {
    spec: LinkSpec,
    rng: SimRng,
}

struct Central {
    failed: bool,
    stored: BTreeSet<u64>,
}

struct GraphIds {
    uavs: Vec<ComponentId>,
    sensors: Vec<Vec<ComponentId>>,
    mobile_control: ComponentId,
    centrals: Vec<ComponentId>,
}

struct Engine<'a> {
    p: &'a Prepared,
    queue: BinaryHeap<Reverse<SimEvent>>,
    seq: u64,
    now: SimTime,
    log: EventLog,
    schedules: Vec<ZoneSchedule>,
    uavs: Vec<UavState>,
    zones: Vec<ZoneProgress>,
    zone_truths: Vec<Vec<GroundTruthDefect>>,
    capture_rngs: Vec<Vec<SimRng>>,
    sensor_failed: BTreeSet<(usize, usize)>,
    links: BTreeMap<(Node, Node), Link>,
    messages: BTreeMap<u64, Message>,
    next_msg: u64,
    frames: Vec<Frame>,
    mc_failed: bool,
    mc_log: Vec<u64>,
    mc_seen: BTreeSet<u64>,
    centrals: Vec<Central>,
    active: Option<usize>,
    /// The active module has failed and the switch has not happened yet.
    failover_pending: bool,
    /// The mobile control knows about the failure and holds frames until the switch.
    failure_known: bool,
    pending_recovery: BTreeMap<Target, u32>,
    stats: MessageStats,
    failures: Vec<FailureRecord>,
    makespan: SimTime,
    complete_scheduled: bool,
    graph: ComponentGraph,
    ids: GraphIds,
}

fn ns(s: f64) -> SimTime {
    SimTime::from_secs(s)
}

impl<'a> Engine<'a> {
    fn new(p: &'a Prepared) -> Self {
        let master = p.master_seed;
        let schedules = p
            .paths
            .iter()
            .map(|path| ZoneSchedule {
                dwell: path.waypoints.iter().map(|w| ns(w.dwell)).collect(),
                legs: path.legs.iter().map(|l| ns(l / path.cruise_speed)).collect(),
            })
            .collect();
        let n_uavs = p.assignment.routes.len();
        let uavs = p
            .assignment
            .routes
            .iter()
            .map(|route| UavState {
                route: route.clone(),
                leg: 0,
                next_wp: 0,
                failed: false,
                done: route.is_empty(),
                epoch: 0,
                flown_total: 0,
                route_waypoints: route.iter().map(|z| p.paths[*z as usize - 1].waypoints.len()).sum(),
            })
            .collect();
        let zones = p
            .layout
            .zones()
            .iter()
            .map(|z| ZoneProgress { uav: p.assignment.uav_of(z.id).unwrap_or(0), start: None, end: None, flown: Vec::new() })
            .collect();
        let mut zone_truths = vec![Vec::new(); p.layout.len()];
        for t in &p.truths {
            zone_truths[t.zone_id as usize - 1].push(*t);
        }
        let capture_rngs = (0..n_uavs)
            .map(|u| {
                p.sensors
                    .iter()
                    .enumerate()
                    .map(|(k, s)| {
                        stream_rng(master, &format!("capture:{}:{}:{}:{}", uav_name(u), k, s.modality.as_str(), s.noise_seed))
                    })
                    .collect()
            })
            .collect();
        let centrals = (0..p.network.central_modules).map(|_| Central { failed: false, stored: BTreeSet::new() }).collect();
        let (graph, ids) = build_graph(p);
        Self {
            p,
            queue: BinaryHeap::new(),
            seq: 0,
            now: SimTime::ZERO,
            log: EventLog::default(),
            schedules,
            uavs,
            zones,
            zone_truths,
            capture_rngs,
            sensor_failed: BTreeSet::new(),
            links: BTreeMap::new(),
            messages: BTreeMap::new(),
            next_msg: 0,
            frames: Vec::new(),
            mc_failed: false,
            mc_log: Vec::new(),
            mc_seen: BTreeSet::new(),
            centrals,
            active: Some(0),
            failover_pending: false,
            failure_known: false,
            pending_recovery: BTreeMap::new(),
            stats: MessageStats::default(),
            failures: Vec::new(),
            makespan: SimTime::ZERO,
            complete_scheduled: false,
            graph,
            ids,
        }
    }

    fn schedule(&mut self, time: SimTime, payload: Payload) {
        debug_assert!(time >= self.now, "causality");
        self.queue.push(Reverse(SimEvent { time, seq: self.seq, payload }));
        self.seq += 1;
    }

    fn record(&mut self, seq: u64, kind: LogKind, subject: impl Into<String>, detail: impl Into<String>) {
        self.log.push(self.now, seq, kind, subject, detail);
    }

    fn run(mut self) -> Result<MissionRun, MissionError> {
        // failures first so a failure at t = 0 precedes the first waypoint
        for &(target, at, recover_at) in &self.p.failures {
            self.schedule(ns(at), Payload::ComponentFailed(target));
            if let Some(r) = recover_at {
                self.schedule(ns(r), Payload::ComponentRecovered(target));
                *self.pending_recovery.entry(target).or_insert(0) += 1;
            }
        }
        for u in 0..self.uavs.len() {
            if let Some(&zone) = self.uavs[u].route.first() {
                self.schedule(SimTime::ZERO, Payload::WaypointReached { uav: u, zone, index: 0, epoch: 0 });
            }
        }
        self.check_complete();
        while let Some(Reverse(ev)) = self.queue.pop() {
            if ev.time > self.now {
                let dt = (ev.time - self.now).secs();
                self.now = ev.time;
                let _ = self.graph.propagate(dt);
            }
            if self.handle(ev)? {
                return self.finish();
            }
            self.check_complete();
        }
        Err(MissionError::Stalled(self.now))
    }

    fn uavs_finished(&self) -> bool {
        self.uavs
            .iter()
            .enumerate()
            .all(|(u, s)| s.done || (s.failed && self.pending_recovery.get(&Target::Uav(u)).copied().unwrap_or(0) == 0))
    }

    fn quiescent(&self) -> bool {
        self.uavs_finished() && self.messages.is_empty() && !self.failover_pending && self.active.is_some()
    }

    fn check_complete(&mut self) {
        if !self.complete_scheduled && self.quiescent() {
            self.complete_scheduled = true;
            self.schedule(self.now, Payload::MissionComplete);
        }
    }

    /// Returns `true` once the mission is complete.
    fn handle(&mut self, ev: SimEvent) -> Result<bool, MissionError> {
        match ev.payload {
            Payload::WaypointReached { uav, zone, index, epoch } => {
                if !self.live(uav, epoch) {
                    return Ok(false);
                }
                let z = zone as usize - 1;
                if index == 0 && self.zones[z].start.is_none() {
                    self.zones[z].start = Some(self.now);
                }
                let w = self.p.paths[z].waypoints[index];
                let gid = self.ids.uavs[uav];
                for (k, v) in [(1, w.position.x), (2, w.position.y), (3, w.position.z), (4, 0.0)] {
                    let _ = self.graph.set_param(gid, k, v);
                }
                self.record(ev.seq, LogKind::WaypointReached, uav_name(uav), format!("zone={zone};index={index}"));
                let at = self.now + self.schedules[z].dwell[index];
                self.schedule(at, Payload::FrameCaptured { uav, zone, index, epoch });
            }
            Payload::FrameCaptured { uav, zone, index, epoch } => {
                if !self.live(uav, epoch) {
                    return Ok(false);
                }
                self.capture_frame(ev.seq, uav, zone, index);
            }
            Payload::MessageDelivered { msg } => {
                let (to, frame) = {
                    let m = &self.messages[&msg];
                    (m.to, m.frame)
                };
                if self.node_failed(to) {
                    self.drop_message(ev.seq, msg, "receiver-failed");
                } else {
                    let m = self.messages.remove(&msg).expect("in flight");
                    self.stats.delivered += 1;
                    let detail = format!("frame={frame};from={};to={};attempt={};outcome=delivered", m.from.name(), to.name(), m.attempt);
                    self.record(ev.seq, LogKind::MessageDelivered, format!("msg-{msg}"), detail);
                    self.receive(to, frame);
                }
            }
            Payload::MessageDropped { msg } => self.drop_message(ev.seq, msg, "link"),
            Payload::ComponentFailed(target) => {
                self.record(ev.seq, LogKind::ComponentFailed, self.target_name(target), "");
                self.failures.push(FailureRecord { time: self.now, component: self.target_name(target), event: FailureEvent::Failed });
                self.fail(target)?;
            }
            Payload::ComponentRecovered(target) => {
                if let Some(n) = self.pending_recovery.get_mut(&target) {
                    *n = n.saturating_sub(1);
                }
                self.record(ev.seq, LogKind::ComponentRecovered, self.target_name(target), "");
                self.failures.push(FailureRecord {
                    time: self.now,
                    component: self.target_name(target),
                    event: FailureEvent::Recovered,
                });
                self.recover(target);
            }
            Payload::FailureDetected { central } => {
                self.failure_known = true;
                let name = central_name(central);
                self.record(ev.seq, LogKind::FailureDetected, name.clone(), "via=heartbeat");
                self.failures.push(FailureRecord { time: self.now, component: name, event: FailureEvent::Detected });
                let at = self.now + ns(self.p.network.failover_delay);
                self.schedule(at, Payload::FailoverCompleted);
            }
            Payload::FailoverCompleted => {
                self.failover_pending = false;
                self.failure_known = false;
                let target = self.centrals.iter().position(|c| !c.failed);
                let subject = target.map(central_name).unwrap_or_else(|| "none".into());
                self.record(ev.seq, LogKind::FailoverCompleted, subject.clone(), format!("replayed={}", if target.is_some() { self.mc_log.len() } else { 0 }));
                self.failures.push(FailureRecord { time: self.now, component: subject, event: FailureEvent::Failover });
                self.active = target;
                match target {
                    Some(j) => self.replay_log_to(j),
                    None => self.check_abort()?,
                }
            }
            Payload::MissionComplete => {
                self.complete_scheduled = false;
                if self.quiescent() {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn live(&self, uav: usize, epoch: u32) -> bool {
        let s = &self.uavs[uav];
        !s.failed && !s.done && s.epoch == epoch
    }

    fn node_failed(&self, n: Node) -> bool {
        match n {
            Node::Uav(u) => self.uavs[u].failed,
            Node::MobileControl => self.mc_failed,
            Node::Central(j) => self.centrals[j].failed,
        }
    }

    fn target_name(&self, t: Target) -> String {
        match t {
            Target::Uav(u) => uav_name(u),
            Target::UavSensor(u, k) => format!("{}/{}", uav_name(u), self.p.sensors[k].modality.as_str()),
            Target::MobileControl => MOBILE_CONTROL.into(),
            Target::Central(j) => central_name(j),
        }
    }

    fn capture_frame(&mut self, seq: u64, uav: usize, zone: u32, index: usize) {
        let z = zone as usize - 1;
        let w: Waypoint = self.p.paths[z].waypoints[index];
        let t = self.now.secs();
        let mut observations = Vec::new();
        for (k, sensor) in self.p.sensors.iter().enumerate() {
            if self.sensor_failed.contains(&(uav, k)) {
                continue;
            }
            let obs = capture(&w, sensor, &self.zone_truths[z], t, &mut self.capture_rngs[uav][k]);
            let sid = self.ids.sensors[uav][k];
            let captures = self.graph.get(sid).map(|s| s.params[3]).unwrap_or(0.0);
            let _ = self.graph.set_param(sid, 3, captures + 1.0);
            observations.extend(obs);
        }
        let frame = self.frames.len() as u64;
        let n_obs = observations.len();
        self.frames.push(Frame { zone, observations });
        self.zones[z].flown.push(index);
        self.record(seq, LogKind::FrameCaptured, uav_name(uav), format!("zone={zone};index={index};frame={frame};observations={n_obs}"));

        let state = &mut self.uavs[uav];
        state.flown_total += 1;
        state.next_wp = index + 1;
        let battery = 1.0 - state.flown_total as f64 / state.route_waypoints.max(1) as f64;
        let gid = self.ids.uavs[uav];
        let _ = self.graph.set_param(gid, 0, battery);
        let _ = self.graph.set_param(gid, 4, self.p.paths[z].cruise_speed);

        self.send(Node::Uav(uav), Node::MobileControl, frame);

        if index + 1 < self.p.paths[z].waypoints.len() {
            let at = self.now + self.schedules[z].legs[index];
            let epoch = self.uavs[uav].epoch;
            self.schedule(at, Payload::WaypointReached { uav, zone, index: index + 1, epoch });
            return;
        }
        self.zones[z].end = Some(self.now);
        self.advance_route(uav);
    }

    fn advance_route(&mut self, uav: usize) {
        let from = self.uavs[uav].route[self.uavs[uav].leg];
        self.uavs[uav].leg += 1;
        self.uavs[uav].next_wp = 0;
        match self.uavs[uav].route.get(self.uavs[uav].leg).copied() {
            Some(next) => {
                let a = self.p.layout.zone(from).expect("assigned zone");
                let b = self.p.layout.zone(next).expect("assigned zone");
                let at = self.now + ns(transit_time(a, b, self.p.transit_speed));
                let epoch = self.uavs[uav].epoch;
                self.schedule(at, Payload::WaypointReached { uav, zone: next, index: 0, epoch });
            }
            None => {
                self.uavs[uav].done = true;
                self.makespan = self.makespan.max(self.now);
                let _ = self.graph.set_param(self.ids.uavs[uav], 4, 0.0);
            }
        }
    }

    fn link_spec(&self, from: Node, to: Node) -> LinkSpec {
        match (from, to) {
            (Node::Uav(_), _) => self.p.network.uplink,
            _ => self.p.network.backhaul,
        }
    }

    fn send(&mut self, from: Node, to: Node, frame: u64) {
        let id = self.next_msg;
        self.next_msg += 1;
        self.stats.sent += 1;
        self.messages.insert(id, Message { frame, from, to, attempt: 0 });
        self.transmit(id, self.now);
        self.update_relay_queue();
    }

    /// Two draws per attempt (drop, then jitter) keep each link's stream aligned.
    fn transmit(&mut self, msg: u64, at: SimTime) {
        let (from, to) = {
            let m = &self.messages[&msg];
            (m.from, m.to)
        };
        let spec = self.link_spec(from, to);
        let master = self.p.master_seed;
        let link = self
            .links
            .entry((from, to))
            .or_insert_with(|| Link { spec, rng: stream_rng(master, &format!("link:{}->{}", from.name(), to.name())) });
        let u_drop = link.rng.random::<f64>();
        let u_jitter = link.rng.random::<f64>();
        let latency = link.spec.latency_mean + (2.0 * u_jitter - 1.0) * link.spec.latency_jitter;
        let dropped = u_drop < link.spec.drop_prob;
        let t = at + ns(latency);
        self.schedule(t, if dropped { Payload::MessageDropped { msg } } else { Payload::MessageDelivered { msg } });
    }

    fn drop_message(&mut self, seq: u64, msg: u64, cause: &str) {
        let (from, to, frame, attempt) = {
            let m = &self.messages[&msg];
            (m.from, m.to, m.frame, m.attempt)
        };
        let retry = attempt < self.p.network.max_retries && !self.node_failed(from);
        let outcome = if retry { "retry" } else { "terminal" };
        let detail = format!("frame={frame};from={};to={};attempt={attempt};cause={cause};outcome={outcome}", from.name(), to.name());
        self.record(seq, LogKind::MessageDropped, format!("msg-{msg}"), detail);
        if retry {
            self.stats.retransmitted += 1;
            self.messages.get_mut(&msg).expect("in flight").attempt += 1;
            let at = self.now + ns(self.p.network.retry_backoff);
            self.transmit(msg, at);
        } else {
            self.stats.dropped += 1;
            self.messages.remove(&msg);
        }
        self.update_relay_queue();
    }

    fn receive(&mut self, to: Node, frame: u64) {
        match to {
            Node::MobileControl => {
                if self.mc_seen.insert(frame) {
                    self.mc_log.push(frame);
                    let _ = self.graph.set_param(self.ids.mobile_control, 3, self.mc_log.len() as f64);
                }
                if let (Some(j), false) = (self.active, self.failure_known) {
                    self.send(Node::MobileControl, Node::Central(j), frame);
                }
            }
            Node::Central(j) => {
                self.centrals[j].stored.insert(frame);
                let _ = self.graph.set_param(self.ids.centrals[j], 0, self.centrals[j].stored.len() as f64);
            }
            Node::Uav(_) => {}
        }
        self.update_relay_queue();
    }

    fn update_relay_queue(&mut self) {
        let _ = self.graph.set_param(self.ids.mobile_control, 2, self.messages.len() as f64);
    }

    fn replay_log_to(&mut self, j: usize) {
        let frames = self.mc_log.clone();
        for f in frames {
            self.send(Node::MobileControl, Node::Central(j), f);
        }
    }

    fn fail(&mut self, target: Target) -> Result<(), MissionError> {
        match target {
            Target::Uav(u) => {
                self.uavs[u].failed = true;
                self.uavs[u].epoch += 1;
                let _ = self.graph.mark_health(self.ids.uavs[u], Health::Failed);
            }
            Target::UavSensor(u, k) => {
                self.sensor_failed.insert((u, k));
                let _ = self.graph.mark_health(self.ids.sensors[u][k], Health::Failed);
                let _ = self.graph.mark_health(self.ids.uavs[u], Health::Degraded);
            }
            Target::MobileControl => {
                self.mc_failed = true;
                let _ = self.graph.mark_health(self.ids.mobile_control, Health::Failed);
            }
            Target::Central(j) => {
                self.centrals[j].failed = true;
                let _ = self.graph.mark_health(self.ids.centrals[j], Health::Failed);
                if self.active == Some(j) && !self.failover_pending {
                    self.failover_pending = true;
                    let at = self.now.ceil_to(ns(self.p.network.heartbeat_interval));
                    self.schedule(at, Payload::FailureDetected { central: j });
                }
                self.check_abort()?;
            }
        }
        Ok(())
    }

    fn check_abort(&self) -> Result<(), MissionError> {
        let any_alive = self.centrals.iter().any(|c| !c.failed);
        let any_returning =
            (0..self.centrals.len()).any(|j| self.pending_recovery.get(&Target::Central(j)).copied().unwrap_or(0) > 0);
        if any_alive || any_returning {
            Ok(())
        } else {
            Err(MissionError::Aborted(self.now))
        }
    }

    fn recover(&mut self, target: Target) {
        match target {
            Target::Uav(u) => {
                if !self.uavs[u].failed {
                    return;
                }
                self.uavs[u].failed = false;
                self.uavs[u].epoch += 1;
                let _ = self.graph.mark_health(self.ids.uavs[u], Health::Operational);
                if !self.uavs[u].done {
                    // resume at the first waypoint not yet captured
                    let s = &self.uavs[u];
                    let (zone, index, epoch) = (s.route[s.leg], s.next_wp, s.epoch);
                    self.schedule(self.now, Payload::WaypointReached { uav: u, zone, index, epoch });
                }
            }
            Target::UavSensor(u, k) => {
                self.sensor_failed.remove(&(u, k));
                let _ = self.graph.mark_health(self.ids.sensors[u][k], Health::Operational);
                if !self.sensor_failed.iter().any(|&(v, _)| v == u) && !self.uavs[u].failed {
                    let _ = self.graph.mark_health(self.ids.uavs[u], Health::Operational);
                }
            }
            Target::MobileControl => {
                self.mc_failed = false;
                let _ = self.graph.mark_health(self.ids.mobile_control, Health::Operational);
            }
            Target::Central(j) => {
                self.centrals[j].failed = false;
                let _ = self.graph.mark_health(self.ids.centrals[j], Health::Operational);
                if self.active.is_none() && !self.failover_pending {
                    self.active = Some(j);
                    self.replay_log_to(j);
                }
            }
        }
    }

    fn finish(mut self) -> Result<MissionRun, MissionError> {
        let p = self.p;
        let active = self.active.expect("completion requires an active central module");
        let mut matrices: Vec<SensorMatrix> = p
            .layout
            .zones()
            .iter()
            .map(|z| SensorMatrix::new(z, p.grid).expect("grid validated"))
            .collect();
        for &f in &self.centrals[active].stored {
            let frame = &self.frames[f as usize];
            for obs in &frame.observations {
                matrices[frame.zone as usize - 1].route(*obs);
            }
        }

        let coverage_sensor = p.sensors.iter().find(|s| s.modality == Modality::Visual).unwrap_or(&p.sensors[0]);
        let mut zones = Vec::new();
        for (z, zone) in p.layout.zones().iter().enumerate() {
            let progress = &self.zones[z];
            let flown: Vec<Waypoint> = progress.flown.iter().map(|&i| p.paths[z].waypoints[i]).collect();
            let seed = derive_seed(p.master_seed, &format!("coverage:zone-{}", zone.id));
            let coverage = surface_coverage_of(&flown, zone, coverage_sensor.fov, coverage_sensor.range, p.coverage_samples, seed);
            let completed = progress.end.is_some();
            zones.push(ZoneOutcome {
                zone_id: zone.id,
                uav: progress.uav as u32 + 1,
                duration_h: match (progress.start, progress.end) {
                    (Some(s), Some(e)) => Some((e - s).hours()),
                    _ => None,
                },
                coverage,
                waypoints_flown: progress.flown.len() as u32,
                completed,
            });
        }

        let truths: BTreeMap<u32, &GroundTruthDefect> = p.truths.iter().map(|t| (t.id, t)).collect();
        let mut reports = Vec::new();
        let mut total = 0.0;
        for m in &matrices {
            total += aggregate(m, p.threshold).value;
            for d in detections(m, p.threshold) {
                let truth = truths[&d.defect_id];
                let mut rng = stream_rng(p.master_seed, &format!("estimate:defect-{}", d.defect_id));
                let size = truth.size_cm.map(|s| estimate_size(s, &mut rng));
                let latency = assessment_latency(&mut rng);
                let criticality = assess_criticality(truth.kind, truth.component, size, truth.thermal_excess)?;
                reports.push(DefectReport {
                    defect_id: d.defect_id,
                    zone_id: truth.zone_id,
                    kind: truth.kind,
                    component: truth.component,
                    estimated_size_cm: size,
                    fused_confidence: d.fused_confidence,
                    criticality,
                    assessment_latency_h: latency,
                });
            }
        }

        let mut health = Vec::new();
        for (kind, counts) in self.graph.monitor_report() {
            for (h, c) in Health::ALL.into_iter().zip(counts) {
                health.push(HealthCount { kind, health: h, count: c as u32 });
            }
        }

        let result = MissionResult {
            seed: p.master_seed,
            uavs: self.uavs.len() as u32,
            zones,
            makespan_h: self.makespan.hours(),
            completion_h: self.now.hours(),
            reports,
            injected_defects: p.truths.len() as u32,
            aggregate: total,
            messages: self.stats,
            failures: core::mem::take(&mut self.failures),
            health,
        };

        let mut next = self.seq;
        for z in &result.zones {
            self.log.push(self.now, next, LogKind::ZoneSummary, format!("zone-{}", z.zone_id), log::zone_detail(z));
            next += 1;
        }
        for r in &result.reports {
            self.log.push(self.now, next, LogKind::DefectAssessed, format!("defect-{}", r.defect_id), log::report_detail(r));
            next += 1;
        }
        let records = self.log.len() + 1;
        self.log.push(self.now, next, LogKind::MissionComplete, "mission", log::complete_detail(&result, records));
        Ok(MissionRun { result, log: self.log, matrices })
    }
}

fn build_graph(p: &Prepared) -> (ComponentGraph, GraphIds) {
    let mut g = ComponentGraph::new();
    let mc = g
        .register(ComponentKind::MobileControl, MOBILE_CONTROL, vec![1.0, 0.0, 0.0, 0.0, 1.0])
        .expect("schema");
    let mut uavs = Vec::new();
    let mut sensors = Vec::new();
    for u in 0..p.assignment.routes.len() {
        let id = g.register(ComponentKind::Uav, uav_name(u), vec![1.0, 0.0, 0.0, 0.0, 0.0]).expect("schema");
        let mut ks = Vec::new();
        for s in &p.sensors {
            let sid = g
                .register(
                    ComponentKind::Sensor,
                    format!("{}/{}", uav_name(u), s.modality.as_str()),
                    vec![s.fov, s.range, s.base_detect_prob, 0.0],
                )
                .expect("schema");
            ks.push(sid);
        }
        g.connect(id, mc, InfluenceFunction::TelemetryAggregate, vec![(0, 0), (4, 1)]).expect("valid edge");
        uavs.push(id);
        sensors.push(ks);
    }
    let mut centrals = Vec::new();
    for j in 0..p.network.central_modules as usize {
        let id = g.register(ComponentKind::CentralModule, central_name(j), vec![0.0; 4]).expect("schema");
        g.connect(mc, id, InfluenceFunction::LatencyDecay { rate: 0.1 }, vec![(2, 2)]).expect("valid edge");
        centrals.push(id);
    }
    let composition = g.register(ComponentKind::ComputeModule, "composition", vec![0.0; 3]).expect("schema");
    let assessment = g.register(ComponentKind::ComputeModule, "criticality-assessment", vec![0.0; 3]).expect("schema");
    for &c in &centrals {
        g.connect(c, composition, InfluenceFunction::Copy, vec![(0, 0)]).expect("valid edge");
    }
    g.connect(composition, assessment, InfluenceFunction::Copy, vec![(0, 0)]).expect("valid edge");
    (g, GraphIds { uavs, sensors, mobile_control: mc, centrals })
}

#[cfg(test)]
mod tests;

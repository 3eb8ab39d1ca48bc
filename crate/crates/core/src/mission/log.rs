//! Line-delimited event log and replay of a mission result from it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;
use core::str::FromStr;

use thiserror::Error;

use super::time::SimTime;
use super::{FailureEvent, FailureRecord, HealthCount, MessageStats, MissionResult, ZoneOutcome};
use crate::fusion::DefectReport;
use crate::graph::{ComponentKind, Health};
use crate::sensor::DefectKind;
use crate::structure::StructurePart;

pub const LOG_HEADER: &str = "time,seq,kind,subject,detail";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogKind {
    WaypointReached,
    FrameCaptured,
    MessageDelivered,
    MessageDropped,
    ComponentFailed,
    ComponentRecovered,
    FailureDetected,
    FailoverCompleted,
    ZoneSummary,
    DefectAssessed,
    MissionComplete,
}

impl LogKind {
    const ALL: [LogKind; 11] = [
        LogKind::WaypointReached,
        LogKind::FrameCaptured,
        LogKind::MessageDelivered,
        LogKind::MessageDropped,
        LogKind::ComponentFailed,
        LogKind::ComponentRecovered,
        LogKind::FailureDetected,
        LogKind::FailoverCompleted,
        LogKind::ZoneSummary,
        LogKind::DefectAssessed,
        LogKind::MissionComplete,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LogKind::WaypointReached => "WaypointReached",
            LogKind::FrameCaptured => "FrameCaptured",
            LogKind::MessageDelivered => "MessageDelivered",
            LogKind::MessageDropped => "MessageDropped",
            LogKind::ComponentFailed => "ComponentFailed",
            LogKind::ComponentRecovered => "ComponentRecovered",
            LogKind::FailureDetected => "FailureDetected",
            LogKind::FailoverCompleted => "FailoverCompleted",
            LogKind::ZoneSummary => "ZoneSummary",
            LogKind::DefectAssessed => "DefectAssessed",
            LogKind::MissionComplete => "MissionComplete",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogRecord {
    pub time: SimTime,
    pub seq: u64,
    pub kind: LogKind,
    pub subject: String,
    /// `key=value` pairs separated by `;`.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EventLog {
    pub records: Vec<LogRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("log ends without a complete MissionComplete record")]
    Truncated,
}

impl EventLog {
    pub fn push(&mut self, time: SimTime, seq: u64, kind: LogKind, subject: impl Into<String>, detail: impl Into<String>) {
        self.records.push(LogRecord { time, seq, kind, subject: subject.into(), detail: detail.into() });
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(LOG_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{},{}", r.time, r.seq, r.kind.as_str(), r.subject, r.detail);
        }
        out
    }

    /// Parses [`to_csv`](Self::to_csv) output; the header line is optional.
    pub fn parse(text: &str) -> Result<Self, ReplayError> {
        let mut records = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            if line.is_empty() || (n == 0 && line == LOG_HEADER) {
                continue;
            }
            let corrupt = |m: &str| ReplayError::Corrupt { line: line_no, message: m.into() };
            let mut parts = line.splitn(5, ',');
            let mut next = |what: &str| parts.next().ok_or_else(|| corrupt(&format!("missing {what}")));
            let time = SimTime::from_str(next("time")?).map_err(|_| corrupt("bad time"))?;
            let seq = next("seq")?.parse().map_err(|_| corrupt("bad seq"))?;
            let kind = LogKind::parse(next("kind")?).ok_or_else(|| corrupt("unknown kind"))?;
            let subject = next("subject")?.into();
            let detail = next("detail")?.into();
            records.push(LogRecord { time, seq, kind, subject, detail });
        }
        Ok(Self { records })
    }
}

pub(crate) fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "none".into())
}

pub(crate) fn zone_detail(z: &ZoneOutcome) -> String {
    format!(
        "uav={};duration_h={};coverage={};flown={};completed={}",
        z.uav,
        opt_f64(z.duration_h),
        z.coverage,
        z.waypoints_flown,
        z.completed
    )
}

pub(crate) fn report_detail(r: &DefectReport) -> String {
    format!(
        "zone={};kind={};component={};size_cm={};confidence={};criticality={};latency_h={}",
        r.zone_id,
        r.kind.as_str(),
        r.component.as_str(),
        opt_f64(r.estimated_size_cm),
        r.fused_confidence,
        r.criticality,
        r.assessment_latency_h
    )
}

pub(crate) fn complete_detail(r: &MissionResult, records: usize) -> String {
    let health: Vec<String> =
        r.health.iter().map(|h| format!("{}:{}:{}", h.kind.as_str(), h.health.as_str(), h.count)).collect();
    format!(
        "seed={};uavs={};makespan_h={};completion_h={};injected={};aggregate={};sent={};delivered={};retransmitted={};dropped={};health={};records={}",
        r.seed,
        r.uavs,
        r.makespan_h,
        r.completion_h,
        r.injected_defects,
        r.aggregate,
        r.messages.sent,
        r.messages.delivered,
        r.messages.retransmitted,
        r.messages.dropped,
        health.join("|"),
        records
    )
}

struct Fields<'a> {
    map: BTreeMap<&'a str, &'a str>,
    line: usize,
}

impl<'a> Fields<'a> {
    fn new(detail: &'a str, line: usize) -> Self {
        let map = detail.split(';').filter_map(|kv| kv.split_once('=')).collect();
        Self { map, line }
    }

    fn err(&self, m: String) -> ReplayError {
        ReplayError::Corrupt { line: self.line, message: m }
    }

    fn raw(&self, key: &str) -> Result<&'a str, ReplayError> {
        self.map.get(key).copied().ok_or_else(|| self.err(format!("missing `{key}`")))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T, ReplayError> {
        let v = self.raw(key)?;
        v.parse().map_err(|_| self.err(format!("bad `{key}` value `{v}`")))
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, ReplayError> {
        match self.raw(key)? {
            "none" => Ok(None),
            _ => self.get(key).map(Some),
        }
    }
}

fn subject_id(subject: &str, prefix: &str, line: usize) -> Result<u32, ReplayError> {
    subject
        .strip_prefix(prefix)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ReplayError::Corrupt { line, message: format!("bad subject `{subject}`") })
}

fn parse_health(s: &str, line: usize) -> Result<Vec<HealthCount>, ReplayError> {
    let bad = || ReplayError::Corrupt { line, message: format!("bad health `{s}`") };
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('|')
        .map(|item| {
            let mut it = item.split(':');
            let kind = it.next().and_then(ComponentKind::parse).ok_or_else(bad)?;
            let health = it.next().and_then(|h| Health::ALL.into_iter().find(|x| x.as_str() == h)).ok_or_else(bad)?;
            let count = it.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
            Ok(HealthCount { kind, health, count })
        })
        .collect()
}

/// Rebuilds the mission result from its log. Message counts are recounted
/// from the per-message lines and must agree with the closing summary.
pub fn replay(log: &EventLog) -> Result<MissionResult, ReplayError> {
    if log.records.is_empty() {
        return Ok(MissionResult::default());
    }
    let last = log.records.last().expect("non-empty");
    if last.kind != LogKind::MissionComplete {
        return Err(ReplayError::Truncated);
    }
    let total = log.records.len();
    let summary = Fields::new(&last.detail, total);
    if summary.get::<usize>("records")? != total {
        return Err(ReplayError::Truncated);
    }

    let mut result = MissionResult::default();
    let mut messages = BTreeSet::new();
    let mut counted = MessageStats::default();
    for (i, r) in log.records.iter().enumerate() {
        let line = i + 1;
        let f = Fields::new(&r.detail, line);
        match r.kind {
            LogKind::MessageDelivered | LogKind::MessageDropped => {
                let id = subject_id(&r.subject, "msg-", line)?;
                if messages.insert(id) {
                    counted.sent += 1;
                }
                match (r.kind, f.raw("outcome")?) {
                    (LogKind::MessageDelivered, "delivered") => counted.delivered += 1,
                    (LogKind::MessageDropped, "retry") => counted.retransmitted += 1,
                    (LogKind::MessageDropped, "terminal") => counted.dropped += 1,
                    (_, other) => return Err(f.err(format!("bad outcome `{other}`"))),
                }
            }
            LogKind::ComponentFailed | LogKind::ComponentRecovered | LogKind::FailureDetected | LogKind::FailoverCompleted => {
                let event = match r.kind {
                    LogKind::ComponentFailed => FailureEvent::Failed,
                    LogKind::ComponentRecovered => FailureEvent::Recovered,
                    LogKind::FailureDetected => FailureEvent::Detected,
                    _ => FailureEvent::Failover,
                };
                result.failures.push(FailureRecord { time: r.time, component: r.subject.clone(), event });
            }
            LogKind::ZoneSummary => {
                result.zones.push(ZoneOutcome {
                    zone_id: subject_id(&r.subject, "zone-", line)?,
                    uav: f.get("uav")?,
                    duration_h: f.opt("duration_h")?,
                    coverage: f.get("coverage")?,
                    waypoints_flown: f.get("flown")?,
                    completed: f.get("completed")?,
                });
            }
            LogKind::DefectAssessed => {
                let kind = DefectKind::parse(f.raw("kind")?).ok_or_else(|| f.err("bad kind".into()))?;
                let component = StructurePart::parse(f.raw("component")?).ok_or_else(|| f.err("bad component".into()))?;
                result.reports.push(DefectReport {
                    defect_id: subject_id(&r.subject, "defect-", line)?,
                    zone_id: f.get("zone")?,
                    kind,
                    component,
                    estimated_size_cm: f.opt("size_cm")?,
                    fused_confidence: f.get("confidence")?,
                    criticality: f.get("criticality")?,
                    assessment_latency_h: f.get("latency_h")?,
                });
            }
            LogKind::MissionComplete if line != total => {
                return Err(f.err("MissionComplete before the end of the log".into()));
            }
            _ => {}
        }
    }
    result.seed = summary.get("seed")?;
    result.uavs = summary.get("uavs")?;
    result.makespan_h = summary.get("makespan_h")?;
    result.completion_h = summary.get("completion_h")?;
    result.injected_defects = summary.get("injected")?;
    result.aggregate = summary.get("aggregate")?;
    result.health = parse_health(summary.raw("health")?, total)?;
    result.messages = MessageStats {
        sent: summary.get("sent")?,
        delivered: summary.get("delivered")?,
        retransmitted: summary.get("retransmitted")?,
        dropped: summary.get("dropped")?,
    };
    if result.messages != counted {
        return Err(summary.err(format!("message counts {:?} disagree with the log {:?}", result.messages, counted)));
    }
    Ok(result)
}

use super::*;
use crate::scenario::{LinkSpec, Scenario};

fn fast(mut s: Scenario) -> Scenario {
    s.planner.ring_count = 4;
    s.planner.points_per_ring = 6;
    s.assessment.coverage_samples = 500;
    s
}

fn with_defects(mut s: Scenario, n: u32) -> Scenario {
    s.defects.count = n;
    s
}

#[test]
fn single_zone_completes() {
    let s = fast(with_defects(Scenario::single_turbine(3), 20));
    let run = simulate(&s).unwrap();
    let r = &run.result;
    assert_eq!(r.zones.len(), 1);
    assert!(r.zones[0].completed);
    assert_eq!(r.injected_defects, 20);
    assert_eq!(r.messages.sent, r.messages.delivered + r.messages.dropped);
    assert!(r.completion_h >= r.makespan_h);
    assert_eq!(run.log.records.last().unwrap().kind, LogKind::MissionComplete);
}

#[test]
fn lossless_completion_matches_closed_form() {
    let mut s = fast(Scenario::single_turbine(1));
    s.network.uplink = LinkSpec { latency_mean: 0.05, latency_jitter: 0.0, drop_prob: 0.0 };
    s.network.backhaul = LinkSpec { latency_mean: 0.02, latency_jitter: 0.0, drop_prob: 0.0 };
    let p = s.prepare().unwrap();
    let r = run_mission(&s).unwrap();
    let expect = (p.paths[0].est_duration + 0.07) / 3600.0;
    assert!((r.completion_h - expect).abs() < 1e-9, "{} vs {}", r.completion_h, expect);
    assert!((r.makespan_h - p.paths[0].est_duration / 3600.0).abs() < 1e-9);
}

#[test]
fn same_seed_same_log() {
    let s = fast(with_defects(Scenario::line_farm(9, 3, 400.0), 30));
    let a = simulate(&s).unwrap();
    let b = simulate(&s).unwrap();
    assert_eq!(a.log.to_csv(), b.log.to_csv());
    assert_eq!(a.result, b.result);
}

#[test]
fn replay_reproduces_result() {
    let mut s = fast(with_defects(Scenario::line_farm(5, 2, 400.0), 25));
    s.network.uplink.drop_prob = 0.2;
    s.failures.push(crate::scenario::FailureSpec { component: "central-1".into(), at: 300.0, recover_at: None });
    let run = simulate(&s).unwrap();
    let parsed = EventLog::parse(&run.log.to_csv()).unwrap();
    assert_eq!(replay(&parsed).unwrap(), run.result);
}

#[test]
fn lossy_links_retry_and_conserve() {
    let mut s = fast(with_defects(Scenario::single_turbine(2), 10));
    s.network.uplink.drop_prob = 0.4;
    s.network.max_retries = 1;
    let r = run_mission(&s).unwrap();
    assert!(r.messages.retransmitted > 0);
    assert!(r.messages.dropped > 0);
    assert_eq!(r.messages.sent, r.messages.delivered + r.messages.dropped);
}

#[test]
fn central_failover_keeps_every_frame() {
    let base = fast(with_defects(Scenario::single_turbine(4), 40));
    let clean = run_mission(&base).unwrap();
    let failed = inject_failure(&base, "central-1", 200.0, None).unwrap();
    let run = simulate(&failed).unwrap();
    let r = &run.result;
    let events: Vec<FailureEvent> = r.failures.iter().map(|f| f.event).collect();
    assert_eq!(events, [FailureEvent::Failed, FailureEvent::Detected, FailureEvent::Failover]);
    assert_eq!(r.failures[1].time, SimTime::from_secs(200.0));
    assert_eq!(r.failures[2].time, SimTime::from_secs(205.0));
    assert_eq!(r.failures[2].component, "central-2");
    let ids = |r: &MissionResult| r.reports.iter().map(|d| d.defect_id).collect::<Vec<_>>();
    assert_eq!(ids(r), ids(&clean));
    let failed_centrals = r
        .health
        .iter()
        .find(|h| h.kind == ComponentKind::CentralModule && h.health == Health::Failed)
        .unwrap();
    assert_eq!(failed_centrals.count, 1);
}

#[test]
fn all_centrals_down_aborts() {
    let s = fast(Scenario::single_turbine(1));
    let s = inject_failure(&s, "central-1", 10.0, None).unwrap();
    let s = inject_failure(&s, "central-2", 20.0, None).unwrap();
    assert!(matches!(run_mission(&s), Err(MissionError::Aborted(_))));
}

#[test]
fn central_returns_after_total_outage() {
    let s = fast(with_defects(Scenario::single_turbine(6), 15));
    let clean = run_mission(&s).unwrap();
    let s = inject_failure(&s, "central-1", 10.0, None).unwrap();
    let s = inject_failure(&s, "central-2", 12.0, Some(400.0)).unwrap();
    let r = run_mission(&s).unwrap();
    assert_eq!(r.reports.len(), clean.reports.len());
}

#[test]
fn uav_failure_without_recovery_leaves_zone_unfinished() {
    let s = fast(Scenario::single_turbine(1));
    let s = inject_failure(&s, "uav-1", 60.0, None).unwrap();
    let r = run_mission(&s).unwrap();
    assert!(!r.zones[0].completed);
    assert_eq!(r.zones[0].duration_h, None);
    assert!(r.zones[0].waypoints_flown > 0);
}

#[test]
fn uav_recovery_resumes_route() {
    let s = fast(Scenario::single_turbine(1));
    let clean = run_mission(&s).unwrap();
    let s = inject_failure(&s, "uav-1", 60.0, Some(160.0)).unwrap();
    let r = run_mission(&s).unwrap();
    assert!(r.zones[0].completed);
    assert_eq!(r.zones[0].waypoints_flown, clean.zones[0].waypoints_flown);
    assert!(r.makespan_h > clean.makespan_h);
}

#[test]
fn unknown_component_rejected() {
    let s = Scenario::single_turbine(1);
    assert_eq!(inject_failure(&s, "uav-7", 1.0, None), Err(MissionError::UnknownComponent("uav-7".into())));
    assert!(matches!(inject_failure(&s, "uav-1", 5.0, Some(2.0)), Err(MissionError::Invalid(_))));
}

#[test]
fn two_uavs_halve_four_zones() {
    let mut one = fast(Scenario::line_farm(1, 4, 400.0));
    one.fleet.transit_speed = f64::INFINITY;
    let mut two = one.clone();
    two.fleet.uavs = 2;
    let a = run_mission(&one).unwrap();
    let b = run_mission(&two).unwrap();
    assert_eq!(b.makespan_h / a.makespan_h, 0.5);
}

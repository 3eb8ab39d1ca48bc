use farm_sentinel_core::mission::{inject_failure, replay, run_mission, simulate, EventLog, LogKind, MissionResult};
use farm_sentinel_core::scenario::{LinkSpec, Scenario};
use proptest::prelude::*;

fn small(seed: u64, zones: u32, defects: u32) -> Scenario {
    let mut s = Scenario::line_farm(seed, zones, 400.0);
    s.planner.ring_count = 4;
    s.planner.points_per_ring = 6;
    s.assessment.coverage_samples = 400;
    s.defects.count = defects;
    s
}

fn lossless(mut s: Scenario) -> Scenario {
    s.network.uplink = LinkSpec { latency_mean: 0.05, latency_jitter: 0.0, drop_prob: 0.0 };
    s.network.backhaul = LinkSpec { latency_mean: 0.02, latency_jitter: 0.0, drop_prob: 0.0 };
    s
}

fn ids(r: &MissionResult) -> Vec<u32> {
    r.reports.iter().map(|d| d.defect_id).collect()
}

#[test]
fn only_uav_fails_at_start() {
    let s = inject_failure(&small(1, 1, 30), "uav-1", 0.0, None).unwrap();
    let r = run_mission(&s).unwrap();
    assert_eq!(r.zones[0].coverage, 0.0);
    assert_eq!(r.zones[0].waypoints_flown, 0);
    assert!(r.reports.is_empty());
    assert_eq!(r.messages.sent, 0);
}

#[test]
fn failing_a_finished_uav_changes_only_the_failure_record() {
    let mut s = small(4, 3, 30);
    s.fleet.uavs = 2;
    let clean = run_mission(&s).unwrap();
    let early = clean.zones.iter().filter(|z| z.uav == 2).map(|z| z.duration_h.unwrap()).sum::<f64>();
    // uav-2 flies one zone, uav-1 two
    assert!(early < clean.makespan_h);
    let at = (early * 3600.0 + clean.makespan_h * 3600.0) / 2.0;
    let mut failed = run_mission(&inject_failure(&s, "uav-2", at, None).unwrap()).unwrap();
    assert_eq!(failed.failures.len(), 1);
    failed.failures.clear();
    failed.health.clone_from(&clean.health);
    assert_eq!(failed, clean);
}

#[test]
fn empty_log_replays_to_empty_result() {
    assert_eq!(replay(&EventLog::default()).unwrap(), MissionResult::default());
}

#[test]
fn truncated_log_is_rejected() {
    let run = simulate(&small(2, 1, 10)).unwrap();
    let csv = run.log.to_csv();
    let cut: Vec<&str> = csv.lines().collect();
    let text = cut[..cut.len() - 1].join("\n");
    let parsed = EventLog::parse(&text).unwrap();
    assert!(replay(&parsed).is_err());
}

#[test]
fn per_zone_duration_independent_of_fleet_size() {
    let one = small(3, 4, 0);
    let mut two = one.clone();
    two.fleet.uavs = 2;
    let a = run_mission(&one).unwrap();
    let b = run_mission(&two).unwrap();
    for (x, y) in a.zones.iter().zip(&b.zones) {
        assert_eq!(x.duration_h, y.duration_h);
    }
    assert!(b.makespan_h < a.makespan_h);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn messages_reconcile(seed in any::<u64>(), up in 0.0..0.5f64, back in 0.0..0.5f64, retries in 0u32..4) {
        let mut s = small(seed, 1, 10);
        s.network.uplink.drop_prob = up;
        s.network.backhaul.drop_prob = back;
        s.network.max_retries = retries;
        let run = simulate(&s).unwrap();
        let m = run.result.messages;
        prop_assert_eq!(m.sent, m.delivered + m.dropped);
        prop_assert!(m.retransmitted <= m.sent * retries as u64);
        prop_assert_eq!(replay(&run.log).unwrap(), run.result);
    }

    #[test]
    fn log_is_causal_and_ends_complete(seed in any::<u64>(), uavs in 1u32..4) {
        let mut s = small(seed, 3, 15);
        s.fleet.uavs = uavs;
        let run = simulate(&s).unwrap();
        let recs = &run.log.records;
        prop_assert!(recs.windows(2).all(|w| w[0].time <= w[1].time));
        prop_assert_eq!(recs.last().unwrap().kind, LogKind::MissionComplete);
        let r = &run.result;
        for u in 1..=uavs {
            let own: f64 = r.zones.iter().filter(|z| z.uav == u).filter_map(|z| z.duration_h).sum();
            prop_assert!(r.makespan_h + 1e-12 >= own);
        }
    }

    #[test]
    fn failover_preserves_detections(seed in any::<u64>(), t1 in 1.0..1500.0f64, t2 in 1.0..1500.0f64) {
        let mut s = lossless(small(seed, 1, 25));
        s.network.central_modules = 3;
        let clean = run_mission(&s).unwrap();
        let s = inject_failure(&s, "central-1", t1, None).unwrap();
        let s = inject_failure(&s, "central-2", t2, None).unwrap();
        let r = run_mission(&s).unwrap();
        prop_assert_eq!(ids(&r), ids(&clean));
        prop_assert_eq!(r.aggregate, clean.aggregate);
    }

    #[test]
    fn same_seed_same_result(seed in any::<u64>()) {
        let s = small(seed, 2, 20);
        prop_assert_eq!(simulate(&s).unwrap(), simulate(&s).unwrap());
    }
}

//! Any scenario that validates must run without panicking downstream.

use farm_sentinel_core::mission::{run_mission, MissionError};
use farm_sentinel_core::scenario::{FailureSpec, KindMix, Scenario};
use proptest::prelude::*;

fn component() -> impl Strategy<Value = String> {
    prop_oneof![
        (1u32..4).prop_map(|i| format!("uav-{i}")),
        (1u32..4, prop_oneof![Just("visual"), Just("thermal")]).prop_map(|(i, m)| format!("uav-{i}/{m}")),
        Just("mobile-control".to_string()),
        (1u32..4).prop_map(|j| format!("central-{j}")),
    ]
}

fn failure() -> impl Strategy<Value = FailureSpec> {
    (component(), 0.0..2000.0f64, proptest::option::of(1.0..1500.0f64))
        .prop_map(|(component, at, d)| FailureSpec { component, at, recover_at: d.map(|d| at + d) })
}

prop_compose! {
    fn scenario()(
        seed in any::<u64>(),
        zones in 1u32..4,
        spacing in 20.0..600.0f64,
        uavs in 1u32..4,
        rings in 2u32..5,
        ppr in 4u32..8,
        standoff in 3.0..40.0f64,
        speed in 0.5..20.0f64,
        dwell in 0.0..10.0f64,
        fraction in 0.05..=1.0f64,
        transit in prop_oneof![Just(f64::INFINITY), 1.0..30.0f64],
        drop in 0.0..0.95f64,
        mean in 0.0..1.0f64,
        centrals in 1u32..4,
        retries in 0u32..5,
        heartbeat in 0.5..30.0f64,
        defects in 0u32..40,
        mix in proptest::option::of((0.0..1.0f64, 0.0..1.0f64, 0.01..1.0f64)),
        threshold in 0.05..0.95f64,
        failures in proptest::collection::vec(failure(), 0..4),
    ) -> Scenario {
        let mut s = Scenario::line_farm(seed, zones, spacing);
        s.fleet.uavs = uavs;
        s.fleet.transit_speed = transit;
        s.planner.ring_count = rings;
        s.planner.points_per_ring = ppr;
        s.planner.standoff = standoff;
        s.planner.cruise_speed = speed;
        s.planner.dwell = dwell;
        s.planner.rotor_ring_fraction = fraction;
        s.network.uplink.drop_prob = drop;
        s.network.uplink.latency_mean = mean;
        s.network.uplink.latency_jitter = mean / 2.0;
        s.network.central_modules = centrals;
        s.network.max_retries = retries;
        s.network.heartbeat_interval = heartbeat;
        s.defects.count = defects;
        s.defects.mix = mix.map(|(crack, corrosion, overheating)| KindMix { crack, corrosion, overheating });
        s.assessment.threshold = threshold;
        s.assessment.coverage_samples = 200;
        s.failures = failures;
        s
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn valid_scenarios_run(s in scenario()) {
        if s.validate().is_err() {
            return Ok(());
        }
        match run_mission(&s) {
            Ok(r) => {
                prop_assert_eq!(r.zones.len(), s.farm.zones.len());
                prop_assert_eq!(r.messages.sent, r.messages.delivered + r.messages.dropped);
            }
            Err(MissionError::Aborted(_)) => {
                prop_assert!(s.failures.iter().any(|f| f.component.starts_with("central-")));
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }
}

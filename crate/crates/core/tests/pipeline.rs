//! Cross-module properties: the monitor against the constraint translation,
//! synthesis round trips, and mining on generated data.

use tpo_core::constraints::{Optimum, Sense};
use tpo_core::gen::{self, TraceSampler};
use tpo_core::mining::{self, MiningConfig};
use tpo_core::monitor::check_trace;
use tpo_core::synthesis;
use tpo_core::{
    DifferenceConstraintSystem, EventId, Heuristic, PartialOrder, TimePoint, TimedTrace,
    ToleranceSpec, Tpo,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_heuristics() -> Vec<Heuristic> {
    vec![
        Heuristic::Nearest,
        Heuristic::Distant,
        Heuristic::Sound,
        Heuristic::Random { seed: 11 },
        Heuristic::Random { seed: 22 },
    ]
}

/// A trace is admitted by the monitor iff its time vector satisfies the
/// translated constraint system. Exercised on grid points (quarter steps)
/// around each model's feasible region plus sampled conforming traces.
#[test]
fn monitor_agrees_with_constraint_translation() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut compatible_seen = 0usize;
    let mut violating_seen = 0usize;
    for seed in 0..80u64 {
        let n = 2 + (seed % 4) as usize; // up to 5 events
        let order = gen::random_dag(n, 0.4, seed);
        let tpo = match gen::random_bounds(&order, 3, seed) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let sys = tpo.to_constraints().unwrap();
        let sampler = TraceSampler::new(&tpo).unwrap();

        for k in 0..40 {
            // Half the points perturb a conforming trace; half are snapped
            // to a coarse grid to probe boundary values exactly.
            let base = sampler.sample(seed * 100 + k).unwrap();
            let mut times: Vec<f64> = {
                let mut v = vec![0.0; n];
                for (e, t) in base.iter() {
                    v[e.0] = t;
                }
                v
            };
            if k % 2 == 0 {
                for t in times.iter_mut() {
                    *t = (*t * 2.0).round() / 2.0;
                }
            } else {
                let victim = rng.gen_range(0..n);
                times[victim] = (times[victim] + rng.gen_range(-10.0..10.0)).max(0.0);
                times[victim] = (times[victim] * 4.0).round() / 4.0;
            }

            // Rebuild a trace in time order (ties by topological rank) so
            // the sequence itself is well formed whenever a run exists.
            let ranks = tpo.order().topological_ranks();
            let mut events: Vec<usize> = (0..n).collect();
            events.sort_by(|&a, &b| {
                times[a]
                    .partial_cmp(&times[b])
                    .unwrap()
                    .then(ranks[a].cmp(&ranks[b]))
            });
            let trace =
                TimedTrace::new(events.iter().map(|&e| (EventId(e), times[e])).collect()).unwrap();

            let monitor_ok = check_trace(&tpo, &trace).is_ok();
            let constraints_ok = sys.satisfies(&times, 0.0);
            assert_eq!(
                monitor_ok, constraints_ok,
                "seed {seed} case {k}: monitor and translation disagree on {times:?}"
            );
            if monitor_ok {
                compatible_seen += 1;
            } else {
                violating_seen += 1;
            }
        }
    }
    assert!(compatible_seen > 200, "want coverage of accepts");
    assert!(violating_seen > 200, "want coverage of rejects");
}

/// Synthesis of an eliminated system admits exactly the original traces.
#[test]
fn synthesis_round_trip_preserves_semantics() {
    let tol = ToleranceSpec::absolute(1e-9);
    for seed in 0..60u64 {
        let n = 3 + (seed % 6) as usize; // up to 8 events
        let order = gen::random_dag(n, 0.35, seed ^ 0xabc);
        let tpo = match gen::random_bounds(&order, 4, seed) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let sys = tpo.to_constraints().unwrap();
        for h in all_heuristics() {
            let reduced = sys.eliminate_redundancy(h, tol).unwrap();
            let rebuilt = synthesis::synthesize(&reduced.system);
            assert!(rebuilt.is_race_free());
            let back = rebuilt.to_constraints().unwrap();
            assert!(
                back.equivalent(&sys, tol),
                "seed {seed} {h:?}: round trip changed the admitted traces"
            );
        }
    }
}

/// Candidate count never exceeds events + 1 and coloring respects the
/// greedy bound.
#[test]
fn allocation_bounds_hold_on_generated_systems() {
    for seed in 0..40u64 {
        let order = gen::random_dag(10, 0.3, seed);
        let tpo = match gen::random_bounds(&order, 5, seed) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let sys = tpo.to_constraints().unwrap();
        let graph = synthesis::allocate_clocks(&sys);
        assert!(graph.candidates().len() <= order.len() + 1);
        let coloring = synthesis::color(&graph);
        assert!(coloring.colors <= 1 + graph.max_degree());
        for (a, b) in graph.edges() {
            assert_ne!(coloring.assignment[a], coloring.assignment[b]);
        }
    }
}

fn sample_set(tpo: &Tpo, count: usize, seed: u64) -> Vec<TimedTrace> {
    gen::sample_traces(tpo, count, seed).expect("generated models are sampleable")
}

/// Every training trace conforms to the mined model, whatever the
/// heuristic or seed.
#[test]
fn mining_is_sound_on_generated_logs() {
    for seed in 0..12u64 {
        let order = gen::random_dag(8 + (seed as usize % 5), 0.3, seed);
        let tpo = match gen::random_bounds(&order, 3, seed) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let traces = sample_set(&tpo, 120, 1337 + seed);
        for h in all_heuristics() {
            let config = MiningConfig {
                heuristic: h,
                ..MiningConfig::default()
            };
            let mined = mining::mine(&traces, &config).unwrap();
            for (k, t) in traces.iter().enumerate() {
                assert_eq!(
                    check_trace(&mined.tpo, t),
                    Ok(()),
                    "seed {seed} {h:?}: training trace {k} rejected"
                );
            }
        }
    }
}

/// The mined order contains every pair the generator's order enforces.
#[test]
fn mined_order_covers_the_generating_order() {
    for seed in 0..10u64 {
        let order = gen::random_dag(9, 0.3, seed ^ 0x51);
        let tpo = match gen::random_bounds(&order, 3, seed) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let traces = sample_set(&tpo, 200, 7000 + seed);
        let mined = mining::identify_partial_order(&traces).unwrap();
        for (a, b) in order.pairs() {
            assert!(
                mined.precedes(a, b),
                "seed {seed}: generating pair {a} ≺ {b} lost"
            );
        }
    }
}

/// More data can only shrink the mined order and widen mined intervals.
#[test]
fn mining_is_monotone_in_the_data() {
    let order = gen::random_dag(8, 0.3, 77);
    let tpo = gen::random_bounds(&order, 3, 77).unwrap();
    let traces = sample_set(&tpo, 300, 42);
    let config = MiningConfig::default();

    let small_order = mining::identify_partial_order(&traces[..100]).unwrap();
    let big_order = mining::identify_partial_order(&traces).unwrap();
    for (a, b) in big_order.pairs() {
        assert!(small_order.precedes(a, b), "order grew with more data");
    }

    let small = mining::extract_bounds(&traces[..100], &big_order, &config).unwrap();
    let big = mining::extract_bounds(&traces, &big_order, &config).unwrap();
    for (s, b) in small.bounds().iter().zip(big.bounds().iter()) {
        assert_eq!(s.source, b.source);
        assert_eq!(s.target, b.target);
        assert_eq!(s.relation, b.relation);
        match s.relation {
            tpo_core::Relation::Ge => assert!(b.constant <= s.constant + 1e-12),
            tpo_core::Relation::Le => assert!(b.constant >= s.constant - 1e-12),
        }
    }
}

/// With inflation 0 every surviving guard constant is attained by some
/// training trace.
#[test]
fn surviving_bounds_touch_the_data() {
    let order = gen::random_dag(8, 0.35, 5);
    let tpo = gen::random_bounds(&order, 3, 5).unwrap();
    let traces = sample_set(&tpo, 150, 99);
    let mined = mining::mine(&traces, &MiningConfig::default()).unwrap();
    let times: Vec<Vec<f64>> = traces
        .iter()
        .map(|t| t.times_by_event(order.len()).unwrap())
        .collect();
    for b in mined.reduced.bounds() {
        let attained = times.iter().any(|t| {
            let diff = match b.source {
                TimePoint::Origin => t[b.target.0],
                TimePoint::Event(s) => t[b.target.0] - t[s.0],
            };
            (diff - b.constant).abs() < 1e-9
        });
        assert!(attained, "bound {b:?} does not touch the data");
    }
}

/// Mining traces of the known five-stage line model recovers bounds nested
/// inside the true ones.
#[test]
fn line_model_mining_stays_inside_truth() {
    let truth = tpo_core::samples::line_true_constraints();
    let sampler = TraceSampler::for_system(&truth).unwrap();
    let traces: Vec<TimedTrace> = (0..500)
        .map(|k| sampler.sample(1337 + k).unwrap())
        .collect();
    let order = mining::identify_partial_order(&traces).unwrap();
    let mined = mining::extract_bounds(&traces, &order, &MiningConfig::default()).unwrap();
    for tb in truth.bounds() {
        let source_ok = |b: &tpo_core::Bound| b.source == tb.source && b.target == tb.target;
        match tb.relation {
            tpo_core::Relation::Ge => {
                let got = mined
                    .bounds()
                    .iter()
                    .find(|b| source_ok(b) && b.relation == tpo_core::Relation::Ge)
                    .expect("pair mined");
                assert!(got.constant >= tb.constant - 1e-9);
            }
            tpo_core::Relation::Le => {
                let got = mined
                    .bounds()
                    .iter()
                    .find(|b| source_ok(b) && b.relation == tpo_core::Relation::Le)
                    .expect("pair mined");
                assert!(got.constant <= tb.constant + 1e-9);
            }
        }
    }
}

/// Windshield traces sampled from the reference model support mining the
/// full reference order.
#[test]
fn windshield_sampling_preserves_its_order() {
    let tpo = tpo_core::samples::windshield_tpo();
    let traces = sample_set(&tpo, 400, 1337);
    let mined = mining::identify_partial_order(&traces).unwrap();
    let reference = tpo_core::samples::windshield_order();
    for (a, b) in reference.pairs() {
        assert!(mined.precedes(a, b));
    }
    for t in &traces {
        assert_eq!(check_trace(&tpo, t), Ok(()));
    }
}

/// Feasibility of generated models is decided exactly by optimize.
#[test]
fn generated_systems_have_no_negative_cycles() {
    for seed in 0..20u64 {
        let order = gen::random_dag(12, 0.25, seed);
        let tpo = gen::random_bounds(&order, 3, seed).unwrap();
        let sys = tpo.to_constraints().unwrap();
        assert!(sys.check_feasible().is_ok());
        for (a, b) in sys.order().pairs().take(20) {
            let m = sys.optimize(TimePoint::Event(a), TimePoint::Event(b), Sense::Max);
            assert_ne!(m, Optimum::Infeasible);
        }
    }
}

/// A mined model over one trace is the trace's own total order.
#[test]
fn single_trace_round_trip() {
    let trace = TimedTrace::new(vec![
        (EventId(2), 0.0),
        (EventId(0), 1.5),
        (EventId(1), 4.0),
    ])
    .unwrap();
    let mined = mining::mine(std::slice::from_ref(&trace), &MiningConfig::default()).unwrap();
    assert_eq!(check_trace(&mined.tpo, &trace), Ok(()));
    assert_eq!(
        mined.tpo.order(),
        &PartialOrder::from_edges(3, [(EventId(2), EventId(0)), (EventId(0), EventId(1)),])
            .unwrap()
    );
}

/// The split pipeline composes with mining: an interleaved log of several
/// conforming runs splits back into traces the source model accepts.
#[test]
fn split_then_check_round_trip() {
    let tpo = tpo_core::samples::windshield_tpo();
    // Three runs, shifted so events interleave while each event's
    // occurrence order follows the run order.
    let runs: Vec<TimedTrace> = (0..3)
        .map(|k| {
            let offset = k as f64 * 8.0;
            TimedTrace::new(
                tpo_core::samples::windshield_tpo_reference_trace()
                    .iter()
                    .map(|&(e, t)| (e, t + offset))
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    let mut log: Vec<(EventId, f64)> = runs.iter().flat_map(|r| r.iter()).collect();
    log.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let split = mining::split_log(&log, 3).unwrap();
    assert_eq!(split.traces.len(), 3);
    for (k, t) in split.traces.iter().enumerate() {
        let trace = TimedTrace::new(t.clone()).unwrap();
        assert_eq!(trace, runs[k], "run {k} not recovered exactly");
        assert_eq!(check_trace(&tpo, &trace), Ok(()));
    }
}

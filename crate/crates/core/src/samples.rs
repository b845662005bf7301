//! Small ready-made models used in documentation and tests.

use crate::clock::ClockId;
use crate::constraints::{Bound, DifferenceConstraintSystem, Relation, TimePoint};
use crate::event::{Alphabet, EventId};
use crate::order::PartialOrder;
use crate::tpo::{Guard, GuardConjunct, Tpo};

fn e(i: usize) -> EventId {
    EventId(i)
}

/// Labels for the windshield installation workflow.
pub fn windshield_alphabet() -> Alphabet {
    Alphabet::from_labels([
        "car_arrived",
        "add_glue_primer",
        "grip_lift_window",
        "clean_dust",
        "place_window",
        "release_grippers",
    ])
    .expect("labels are distinct")
}

/// Precedence DAG of a windshield installation task: two branches
/// (priming/lifting and dust cleaning) joining at window placement.
pub fn windshield_order() -> PartialOrder {
    PartialOrder::from_edges(
        6,
        [
            (e(0), e(1)),
            (e(1), e(2)),
            (e(2), e(4)),
            (e(3), e(4)),
            (e(4), e(5)),
            (e(0), e(3)),
        ],
    )
    .expect("the windshield DAG is acyclic")
}

/// The two-clock windshield model: clock 0 is reset on arrival and caps the
/// cleaning start (<= 5s) and the end-to-end time (<= 100s); clock 1 is
/// reset at priming and again at placement, bounding primer-to-placement
/// (<= 40s) and the glue setting wait (>= 30s).
pub fn windshield_tpo() -> Tpo {
    let order = windshield_order();
    let c0 = ClockId(0);
    let c1 = ClockId(1);
    let mut guards = vec![Guard::always(); 6];
    guards[3] = Guard::new(vec![GuardConjunct {
        clock: c0,
        relation: Relation::Le,
        constant: 5.0,
    }]);
    guards[4] = Guard::new(vec![GuardConjunct {
        clock: c1,
        relation: Relation::Le,
        constant: 40.0,
    }]);
    guards[5] = Guard::new(vec![
        GuardConjunct {
            clock: c0,
            relation: Relation::Le,
            constant: 100.0,
        },
        GuardConjunct {
            clock: c1,
            relation: Relation::Ge,
            constant: 30.0,
        },
    ]);
    let mut resets = vec![Vec::new(); 6];
    resets[0] = vec![c0];
    resets[1] = vec![c1];
    resets[4] = vec![c1];
    Tpo::new(order, 2, guards, resets).expect("windshield model is well formed")
}

/// A conforming run of [`windshield_tpo`]: cleaning starts 4s after
/// arrival (within 5), placement 32s after priming (within 40), grippers
/// released 35s after placement (at least 30) and 70s after arrival
/// (within 100).
pub fn windshield_tpo_reference_trace() -> Vec<(EventId, f64)> {
    vec![
        (e(0), 0.0),
        (e(1), 3.0),
        (e(3), 4.0),
        (e(2), 20.0),
        (e(4), 35.0),
        (e(5), 70.0),
    ]
}

/// An interval-style timing specification over the windshield order, used
/// to exercise redundancy elimination: the bound `t_5 - t_3 <= 5` is implied
/// by `t_3 - t_1 >= 10` and `t_5 - t_1 <= 15`.
pub fn windshield_timing_constraints() -> DifferenceConstraintSystem {
    let order = windshield_order();
    let inf = f64::INFINITY;
    let pairs: [(usize, usize, f64, f64); 6] = [
        (0, 2, 10.0, inf),
        (0, 4, 0.0, 15.0),
        (2, 4, 0.0, 5.0),
        (4, 5, 0.0, 8.0),
        (3, 4, 5.0, inf),
        (3, 5, 4.0, 10.0),
    ];
    let mut bounds = Vec::new();
    for (i, j, lo, hi) in pairs {
        bounds.push(Bound::lower(TimePoint::Event(e(i)), e(j), lo));
        bounds.push(Bound::upper(TimePoint::Event(e(i)), e(j), hi));
    }
    DifferenceConstraintSystem::new(order, bounds).expect("bounds follow the order")
}

/// The irredundant form of [`windshield_timing_constraints`].
pub fn windshield_reduced_constraints() -> DifferenceConstraintSystem {
    let order = windshield_order();
    let bounds = vec![
        Bound::lower(TimePoint::Event(e(0)), e(2), 10.0),
        Bound::upper(TimePoint::Event(e(0)), e(4), 15.0),
        Bound::upper(TimePoint::Event(e(4)), e(5), 8.0),
        Bound::lower(TimePoint::Event(e(3)), e(4), 5.0),
        Bound::lower(TimePoint::Event(e(3)), e(5), 4.0),
        Bound::upper(TimePoint::Event(e(3)), e(5), 10.0),
    ];
    DifferenceConstraintSystem::new(order, bounds).expect("bounds follow the order")
}

/// Labels for the five-stage line model.
pub fn line_alphabet() -> Alphabet {
    Alphabet::from_labels(["intake", "prime", "lift", "clean", "mount"])
        .expect("labels are distinct")
}

/// A five-event production line with one side branch:
/// intake ≺ prime ≺ lift ≺ mount and intake ≺ clean ≺ mount.
pub fn line_order() -> PartialOrder {
    PartialOrder::from_edges(
        5,
        [
            (e(0), e(1)),
            (e(1), e(2)),
            (e(2), e(4)),
            (e(3), e(4)),
            (e(0), e(3)),
        ],
    )
    .expect("the line DAG is acyclic")
}

/// Ground-truth timing for the line model:
/// `t_intake ∈ [0, 1]`, `t_prime - t_intake ∈ [5, 15]`,
/// `t_lift - t_intake ∈ [15, 25]`, `t_clean - t_intake ∈ [0, 20]`,
/// `t_mount - t_lift ∈ [10, 11]`.
pub fn line_true_constraints() -> DifferenceConstraintSystem {
    let order = line_order();
    let bounds = vec![
        Bound::lower(TimePoint::Origin, e(0), 0.0),
        Bound::upper(TimePoint::Origin, e(0), 1.0),
        Bound::lower(TimePoint::Event(e(0)), e(1), 5.0),
        Bound::upper(TimePoint::Event(e(0)), e(1), 15.0),
        Bound::lower(TimePoint::Event(e(0)), e(2), 15.0),
        Bound::upper(TimePoint::Event(e(0)), e(2), 25.0),
        Bound::lower(TimePoint::Event(e(0)), e(3), 0.0),
        Bound::upper(TimePoint::Event(e(0)), e(3), 20.0),
        Bound::lower(TimePoint::Event(e(2)), e(4), 10.0),
        Bound::upper(TimePoint::Event(e(2)), e(4), 11.0),
    ];
    DifferenceConstraintSystem::new(order, bounds).expect("bounds follow the order")
}

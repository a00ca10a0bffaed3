//! Built-in desk-scale road network: a four-lane east-west arterial, one
//! signalized four-way intersection with a permissive left turn, and one
//! single-lane roundabout, joined into two closed circulation loops plus
//! open through routes.
//!
//! The map is synthetic and representative rather than a replica of any
//! physical facility; its purpose is to exercise the arterial, intersection
//! and roundabout location classes together on a loop an AV can lap.

use crate::geom::{pt, Point};
use crate::road::{
    ConflictZone, Lane, LaneId, LocationClass, Phase, Route, RoadNetwork, SignalPlan, SignalState,
};
use std::collections::BTreeMap;

const LANE_W: f64 = 3.5;
const ARTERIAL_SPEED: f64 = 13.4; // 30 mph
const MINOR_SPEED: f64 = 11.0;
const TURN_SPEED: f64 = 8.0;

/// Quadratic Bezier sampled as a polyline.
fn bezier(a: Point, c: Point, b: Point, n: usize) -> Vec<Point> {
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let u = 1.0 - t;
            pt(
                u * u * a.x + 2.0 * u * t * c.x + t * t * b.x,
                u * u * a.y + 2.0 * u * t * c.y + t * t * b.y,
            )
        })
        .collect()
}

/// Circle arc around `center`, radius `r`, from `a0` to `a1` degrees going
/// counter-clockwise.
fn circle_arc(center: Point, r: f64, a0: f64, a1: f64, step_deg: f64) -> Vec<Point> {
    let mut a1 = a1;
    while a1 <= a0 {
        a1 += 360.0;
    }
    let n = (((a1 - a0) / step_deg).ceil() as usize).max(2);
    (0..=n)
        .map(|i| {
            let th = (a0 + (a1 - a0) * i as f64 / n as f64).to_radians();
            pt(center.x + r * th.cos(), center.y + r * th.sin())
        })
        .collect()
}

struct LaneSpec {
    id: &'static str,
    pts: Vec<Point>,
    speed: f64,
    succ: Vec<&'static str>,
    left: Option<&'static str>,
    right: Option<&'static str>,
    class: LocationClass,
    movement: Option<&'static str>,
}

fn lane(spec: LaneSpec) -> Lane {
    Lane {
        id: LaneId::new(spec.id),
        centerline: spec.pts,
        width: LANE_W,
        speed_limit: spec.speed,
        successors: spec.succ.into_iter().map(LaneId::new).collect(),
        left_neighbor: spec.left.map(LaneId::new),
        right_neighbor: spec.right.map(LaneId::new),
        location_class: spec.class,
        signal_movement: spec.movement.map(str::to_string),
    }
}

/// Numeric conflict-zone extraction: arc intervals on both lanes where the
/// centerlines come within the sum of half-widths.
fn conflict_between(
    net_lanes: &[Lane],
    a: &str,
    b: &str,
    priority: &str,
    class: LocationClass,
) -> Option<ConflictZone> {
    let la = net_lanes.iter().find(|l| l.id.0 == a)?;
    let lb = net_lanes.iter().find(|l| l.id.0 == b)?;
    let pa = crate::geom::Polyline::new(la.centerline.clone());
    let pb = crate::geom::Polyline::new(lb.centerline.clone());
    let thresh = (la.width + lb.width) / 2.0;
    let step = 0.25;
    let mut ia: Option<(f64, f64)> = None;
    let mut ib: Option<(f64, f64)> = None;
    let na = (pa.length() / step).ceil() as usize;
    let nb = (pb.length() / step).ceil() as usize;
    for i in 0..=na {
        let sa = pa.length() * i as f64 / na as f64;
        let (qa, _) = pa.sample(sa);
        for j in 0..=nb {
            let sb = pb.length() * j as f64 / nb as f64;
            let (qb, _) = pb.sample(sb);
            if qa.dist(qb) < thresh {
                ia = Some(match ia {
                    None => (sa, sa),
                    Some((lo, hi)) => (lo.min(sa), hi.max(sa)),
                });
                ib = Some(match ib {
                    None => (sb, sb),
                    Some((lo, hi)) => (lo.min(sb), hi.max(sb)),
                });
            }
        }
    }
    let (mut ia, mut ib) = (ia?, ib?);
    // Widen degenerate intervals slightly so they are well-formed.
    if ia.1 - ia.0 < 0.5 {
        ia = ((ia.0 - 0.25).max(0.0), (ia.1 + 0.25).min(pa.length()));
    }
    if ib.1 - ib.0 < 0.5 {
        ib = ((ib.0 - 0.25).max(0.0), (ib.1 + 0.25).min(pb.length()));
    }
    Some(ConflictZone {
        lane_a: LaneId::new(a),
        interval_a: ia,
        lane_b: LaneId::new(b),
        interval_b: ib,
        priority: LaneId::new(priority),
        location_class: class,
    })
}

/// Build the desk network. Deterministic; no I/O.
pub fn desk_network() -> RoadNetwork {
    use LocationClass::*;
    let rb_c = pt(190.0, 130.0);
    let rb_r = 12.0;

    let lanes: Vec<Lane> = vec![
        // West-leg arterial, eastbound pair.
        lane(LaneSpec {
            id: "art_e_r",
            pts: vec![pt(12.0, -5.25), pt(180.0, -5.25)],
            speed: ARTERIAL_SPEED,
            succ: vec!["ix_e_thru_r"],
            left: Some("art_e_l"),
            right: None,
            class: Arterial,
            movement: Some("mv_e"),
        }),
        lane(LaneSpec {
            id: "art_e_l",
            pts: vec![pt(12.0, -1.75), pt(180.0, -1.75)],
            speed: ARTERIAL_SPEED,
            succ: vec!["ix_e_left", "ix_e_thru_l"],
            left: None,
            right: Some("art_e_r"),
            class: Arterial,
            movement: Some("mv_e"),
        }),
        // West-leg arterial, westbound pair.
        lane(LaneSpec {
            id: "art_w_l",
            pts: vec![pt(180.0, 1.75), pt(12.0, 1.75)],
            speed: ARTERIAL_SPEED,
            succ: vec![],
            left: None,
            right: Some("art_w_r"),
            class: Arterial,
            movement: None,
        }),
        lane(LaneSpec {
            id: "art_w_r",
            pts: vec![pt(180.0, 5.25), pt(12.0, 5.25)],
            speed: ARTERIAL_SPEED,
            succ: vec!["cn_ws"],
            left: Some("art_w_l"),
            right: None,
            class: Arterial,
            movement: None,
        }),
        // East leg.
        lane(LaneSpec {
            id: "e_eb_r",
            pts: vec![pt(200.0, -5.25), pt(280.0, -5.25)],
            speed: ARTERIAL_SPEED,
            succ: vec![],
            left: Some("e_eb_l"),
            right: None,
            class: Arterial,
            movement: None,
        }),
        lane(LaneSpec {
            id: "e_eb_l",
            pts: vec![pt(200.0, -1.75), pt(280.0, -1.75)],
            speed: ARTERIAL_SPEED,
            succ: vec![],
            left: None,
            right: Some("e_eb_r"),
            class: Arterial,
            movement: None,
        }),
        lane(LaneSpec {
            id: "e_wb_l",
            pts: vec![pt(280.0, 1.75), pt(200.0, 1.75)],
            speed: ARTERIAL_SPEED,
            succ: vec!["ix_w_thru_l"],
            left: None,
            right: Some("e_wb_r"),
            class: Arterial,
            movement: Some("mv_w"),
        }),
        lane(LaneSpec {
            id: "e_wb_r",
            pts: vec![pt(280.0, 5.25), pt(200.0, 5.25)],
            speed: ARTERIAL_SPEED,
            succ: vec!["ix_w_thru_r"],
            left: Some("e_wb_l"),
            right: None,
            class: Arterial,
            movement: Some("mv_w"),
        }),
        // North leg between intersection and roundabout.
        lane(LaneSpec {
            id: "n_nb",
            pts: vec![pt(191.75, 10.0), pt(191.75, 114.0)],
            speed: MINOR_SPEED,
            succ: vec!["rb_entry_s"],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
        lane(LaneSpec {
            id: "n_sb",
            pts: vec![pt(188.25, 114.0), pt(188.25, 10.0)],
            speed: MINOR_SPEED,
            succ: vec!["ix_n_right", "ix_n_thru"],
            left: None,
            right: None,
            class: Arterial,
            movement: Some("mv_n"),
        }),
        // South leg.
        lane(LaneSpec {
            id: "s_nb",
            pts: vec![pt(191.75, -90.0), pt(191.75, -10.0)],
            speed: MINOR_SPEED,
            succ: vec!["ix_s_thru"],
            left: None,
            right: None,
            class: Arterial,
            movement: Some("mv_s"),
        }),
        lane(LaneSpec {
            id: "s_sb",
            pts: vec![pt(188.25, -10.0), pt(188.25, -90.0)],
            speed: MINOR_SPEED,
            succ: vec![],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
        // Intersection internals.
        lane(LaneSpec {
            id: "ix_e_thru_r",
            pts: vec![pt(180.0, -5.25), pt(200.0, -5.25)],
            speed: ARTERIAL_SPEED,
            succ: vec!["e_eb_r"],
            left: None,
            right: None,
            class: Intersection,
            movement: None,
        }),
        lane(LaneSpec {
            id: "ix_e_thru_l",
            pts: vec![pt(180.0, -1.75), pt(200.0, -1.75)],
            speed: ARTERIAL_SPEED,
            succ: vec!["e_eb_l"],
            left: None,
            right: None,
            class: Intersection,
            movement: None,
        }),
        lane(LaneSpec {
            id: "ix_e_left",
            pts: bezier(pt(180.0, -1.75), pt(191.75, -1.75), pt(191.75, 10.0), 12),
            speed: TURN_SPEED,
            succ: vec!["n_nb"],
            left: None,
            right: None,
            class: Intersection,
            movement: None,
        }),
        lane(LaneSpec {
            id: "ix_w_thru_l",
            pts: vec![pt(200.0, 1.75), pt(180.0, 1.75)],
            speed: ARTERIAL_SPEED,
            succ: vec!["art_w_l"],
            left: None,
            right: None,
            class: Intersection,
            movement: None,
        }),
        lane(LaneSpec {
            id: "ix_w_thru_r",
            pts: vec![pt(200.0, 5.25), pt(180.0, 5.25)],
            speed: ARTERIAL_SPEED,
            succ: vec!["art_w_r"],
            left: None,
            right: None,
            class: Intersection,
            movement: None,
        }),
        lane(LaneSpec {
            id: "ix_n_right",
            pts: bezier(pt(188.25, 10.0), pt(188.25, 5.25), pt(180.0, 5.25), 10),
            speed: TURN_SPEED,
            succ: vec!["art_w_r"],
            left: None,
            right: None,
            class: Intersection,
            movement: None,
        }),
        lane(LaneSpec {
            id: "ix_n_thru",
            pts: vec![pt(188.25, 10.0), pt(188.25, -10.0)],
            speed: MINOR_SPEED,
            succ: vec!["s_sb"],
            left: None,
            right: None,
            class: Intersection,
            movement: None,
        }),
        lane(LaneSpec {
            id: "ix_s_thru",
            pts: vec![pt(191.75, -10.0), pt(191.75, 10.0)],
            speed: MINOR_SPEED,
            succ: vec!["n_nb"],
            left: None,
            right: None,
            class: Intersection,
            movement: None,
        }),
        // Roundabout circle, split at exit/entry attachment angles.
        // Circulation is counter-clockwise; angles grow counter-clockwise.
        lane(LaneSpec {
            id: "rb_1",
            pts: circle_arc(rb_c, rb_r, 135.0, 200.0, 5.0),
            speed: TURN_SPEED,
            succ: vec!["rb_2"],
            left: None,
            right: None,
            class: Roundabout,
            movement: None,
        }),
        lane(LaneSpec {
            id: "rb_2",
            pts: circle_arc(rb_c, rb_r, 200.0, 225.0, 5.0),
            speed: TURN_SPEED,
            succ: vec!["rb_3", "rb_exit_s"],
            left: None,
            right: None,
            class: Roundabout,
            movement: None,
        }),
        lane(LaneSpec {
            id: "rb_3",
            pts: circle_arc(rb_c, rb_r, 225.0, 315.0, 5.0),
            speed: TURN_SPEED,
            succ: vec!["rb_4"],
            left: None,
            right: None,
            class: Roundabout,
            movement: None,
        }),
        lane(LaneSpec {
            id: "rb_4",
            pts: circle_arc(rb_c, rb_r, 315.0, 135.0, 5.0),
            speed: TURN_SPEED,
            succ: vec!["rb_1", "rb_exit_w"],
            left: None,
            right: None,
            class: Roundabout,
            movement: None,
        }),
        // Roundabout connectors.
        lane(LaneSpec {
            id: "rb_entry_s",
            pts: bezier(
                pt(191.75, 114.0),
                pt(196.0, 117.0),
                pt(190.0 + rb_r * (315.0f64).to_radians().cos(), 130.0 + rb_r * (315.0f64).to_radians().sin()),
                8,
            ),
            speed: TURN_SPEED,
            succ: vec!["rb_4"],
            left: None,
            right: None,
            class: Roundabout,
            movement: None,
        }),
        lane(LaneSpec {
            id: "rb_entry_w",
            pts: bezier(
                pt(174.0, 128.25),
                pt(179.0, 127.0),
                pt(190.0 + rb_r * (200.0f64).to_radians().cos(), 130.0 + rb_r * (200.0f64).to_radians().sin()),
                8,
            ),
            speed: TURN_SPEED,
            succ: vec!["rb_2"],
            left: None,
            right: None,
            class: Roundabout,
            movement: None,
        }),
        lane(LaneSpec {
            id: "rb_exit_w",
            pts: bezier(
                pt(190.0 + rb_r * (135.0f64).to_radians().cos(), 130.0 + rb_r * (135.0f64).to_radians().sin()),
                pt(177.0, 134.0),
                pt(174.0, 131.75),
                8,
            ),
            speed: TURN_SPEED,
            succ: vec!["up_wb"],
            left: None,
            right: None,
            class: Roundabout,
            movement: None,
        }),
        lane(LaneSpec {
            id: "rb_exit_s",
            pts: bezier(
                pt(190.0 + rb_r * (225.0f64).to_radians().cos(), 130.0 + rb_r * (225.0f64).to_radians().sin()),
                pt(186.0, 117.5),
                pt(188.25, 114.0),
                8,
            ),
            speed: TURN_SPEED,
            succ: vec!["n_sb"],
            left: None,
            right: None,
            class: Roundabout,
            movement: None,
        }),
        // Upper road.
        lane(LaneSpec {
            id: "up_wb",
            pts: vec![pt(174.0, 131.75), pt(14.0, 131.75)],
            speed: MINOR_SPEED,
            succ: vec!["cn_nw"],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
        lane(LaneSpec {
            id: "up_eb",
            pts: vec![pt(14.0, 128.25), pt(174.0, 128.25)],
            speed: MINOR_SPEED,
            succ: vec!["rb_entry_w"],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
        // West road.
        lane(LaneSpec {
            id: "w_sb",
            pts: vec![pt(1.75, 119.0), pt(1.75, 12.0)],
            speed: MINOR_SPEED,
            succ: vec!["cn_sw"],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
        lane(LaneSpec {
            id: "w_nb",
            pts: vec![pt(5.25, 16.0), pt(5.25, 119.0)],
            speed: MINOR_SPEED,
            succ: vec!["cn_wn"],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
        // Corner connectors.
        lane(LaneSpec {
            id: "cn_nw",
            pts: bezier(pt(14.0, 131.75), pt(1.75, 131.75), pt(1.75, 119.0), 10),
            speed: TURN_SPEED,
            succ: vec!["w_sb"],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
        lane(LaneSpec {
            id: "cn_sw",
            pts: bezier(pt(1.75, 12.0), pt(1.75, -1.75), pt(12.0, -1.75), 10),
            speed: TURN_SPEED,
            succ: vec!["art_e_l"],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
        lane(LaneSpec {
            id: "cn_ws",
            pts: bezier(pt(12.0, 5.25), pt(5.25, 5.25), pt(5.25, 16.0), 10),
            speed: TURN_SPEED,
            succ: vec!["w_nb"],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
        lane(LaneSpec {
            id: "cn_wn",
            pts: bezier(pt(5.25, 119.0), pt(5.25, 128.25), pt(14.0, 128.25), 10),
            speed: TURN_SPEED,
            succ: vec!["up_eb"],
            left: None,
            right: None,
            class: Arterial,
            movement: None,
        }),
    ];

    // Conflict zones: permissive left against oncoming through, turn merges,
    // cross movements (reachable only by signal violation), roundabout
    // entries against circulating arcs, and the north-west corner crossover.
    let candidates: Vec<(&str, &str, &str, LocationClass)> = vec![
        ("ix_e_left", "ix_w_thru_l", "ix_w_thru_l", Intersection),
        ("ix_e_left", "ix_w_thru_r", "ix_w_thru_r", Intersection),
        ("ix_e_left", "ix_n_thru", "ix_e_left", Intersection),
        ("ix_e_left", "ix_s_thru", "ix_s_thru", Intersection),
        ("ix_n_right", "ix_w_thru_r", "ix_w_thru_r", Intersection),
        ("ix_n_thru", "ix_e_thru_l", "ix_e_thru_l", Intersection),
        ("ix_n_thru", "ix_e_thru_r", "ix_e_thru_r", Intersection),
        ("ix_s_thru", "ix_w_thru_l", "ix_w_thru_l", Intersection),
        ("ix_s_thru", "ix_w_thru_r", "ix_w_thru_r", Intersection),
        ("rb_entry_w", "rb_1", "rb_1", Roundabout),
        ("rb_entry_s", "rb_3", "rb_3", Roundabout),
        ("cn_wn", "cn_nw", "cn_nw", Arterial),
        ("cn_ws", "cn_sw", "cn_sw", Arterial),
    ];
    let zones: Vec<ConflictZone> = candidates
        .into_iter()
        .filter_map(|(a, b, pr, cl)| conflict_between(&lanes, a, b, pr, cl))
        .collect();

    let mk = |g: &[(&str, SignalState)]| -> BTreeMap<String, SignalState> {
        g.iter().map(|(m, s)| (m.to_string(), *s)).collect()
    };
    use SignalState::*;
    let plan = SignalPlan {
        id: "ix_main".into(),
        offset: 0.0,
        phases: vec![
            Phase {
                duration: 25.0,
                states: mk(&[("mv_e", Green), ("mv_w", Green), ("mv_n", Red), ("mv_s", Red)]),
            },
            Phase {
                duration: 3.0,
                states: mk(&[("mv_e", Yellow), ("mv_w", Yellow), ("mv_n", Red), ("mv_s", Red)]),
            },
            Phase {
                duration: 2.0,
                states: mk(&[("mv_e", Red), ("mv_w", Red), ("mv_n", Red), ("mv_s", Red)]),
            },
            Phase {
                duration: 15.0,
                states: mk(&[("mv_e", Red), ("mv_w", Red), ("mv_n", Green), ("mv_s", Green)]),
            },
            Phase {
                duration: 3.0,
                states: mk(&[("mv_e", Red), ("mv_w", Red), ("mv_n", Yellow), ("mv_s", Yellow)]),
            },
            Phase {
                duration: 2.0,
                states: mk(&[("mv_e", Red), ("mv_w", Red), ("mv_n", Red), ("mv_s", Red)]),
            },
        ],
    };

    let route = |id: &str, lanes: &[&str], cyclic: bool| Route {
        id: id.to_string(),
        lanes: lanes.iter().map(|s| LaneId::new(*s)).collect(),
        cyclic,
    };
    let cw = [
        "art_e_l", "ix_e_left", "n_nb", "rb_entry_s", "rb_4", "rb_exit_w", "up_wb", "cn_nw",
        "w_sb", "cn_sw",
    ];
    let ccw = [
        "w_nb", "cn_wn", "up_eb", "rb_entry_w", "rb_2", "rb_exit_s", "n_sb", "ix_n_right",
        "art_w_r", "cn_ws",
    ];
    let routes = vec![
        route("lap_cw", &cw, false),
        route("loop_cw", &cw, true),
        route("loop_ccw", &ccw, true),
        route("ew_through", &["e_wb_l", "ix_w_thru_l", "art_w_l"], false),
        route("ew_through_r", &["e_wb_r", "ix_w_thru_r", "art_w_r", "cn_ws"], false),
        route("ns_through", &["n_sb", "ix_n_thru", "s_sb"], false),
        route("sn_through", &["s_nb", "ix_s_thru", "n_nb", "rb_entry_s", "rb_4", "rb_exit_w", "up_wb"], false),
        route("eb_through", &["art_e_r", "ix_e_thru_r", "e_eb_r"], false),
        route("eb_through_l", &["art_e_l", "ix_e_thru_l", "e_eb_l"], false),
    ];

    RoadNetwork::from_parts(lanes, zones, vec![plan], routes)
        .expect("desk network is internally consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_builds_and_has_expected_structure() {
        let net = desk_network();
        assert!(net.lanes().count() >= 30);
        assert!(net.routes.len() >= 5);
        // Permissive left conflict exists.
        assert!(net
            .conflict_zones
            .iter()
            .any(|z| z.lane_a.0 == "ix_e_left" && z.lane_b.0 == "ix_w_thru_l"));
        // Roundabout entry yields to circulating arc.
        assert!(net
            .conflict_zones
            .iter()
            .any(|z| z.lane_a.0 == "rb_entry_w" && z.priority.0 == "rb_1"));
        // Signal is periodic with a 50 s cycle.
        let a = net.signal_state("mv_e", 12.0).unwrap();
        let b = net.signal_state("mv_e", 62.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn loop_routes_are_closed() {
        let net = desk_network();
        for id in ["loop_cw", "loop_ccw"] {
            let r = net.route(id).unwrap();
            assert!(r.cyclic);
            let last = net.lane(r.lanes.last().unwrap()).unwrap();
            assert!(last.successors.contains(&r.lanes[0]));
        }
    }
}

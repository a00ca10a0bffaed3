//! Lane-graph road network: lanes with polyline centerlines, neighbor and
//! successor relations, signal plans, conflict zones, and named routes.
//!
//! Networks are immutable after load and safe to share across parallel
//! episode workers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{pt, Point, Polyline, Pose};

pub const NETWORK_FORMAT_VERSION: u32 = 1;

#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct LaneId(pub String);

impl LaneId {
    pub fn new(s: impl Into<String>) -> LaneId {
        LaneId(s.into())
    }
}

impl std::fmt::Display for LaneId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocationClass {
    Arterial,
    Intersection,
    Roundabout,
    Crosswalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalState {
    Green,
    Yellow,
    Red,
}

#[derive(Debug, Error)]
pub enum RoadError {
    #[error("lane {0} not found")]
    UnknownLane(LaneId),
    #[error("route {0} not found")]
    UnknownRoute(String),
    #[error("movement {0} is not controlled by any signal plan")]
    UnknownMovement(String),
    #[error("arc position {arc} out of range for lane {lane} (length {len})")]
    ArcOutOfRange { lane: LaneId, arc: f64, len: f64 },
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("network parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lane {
    pub id: LaneId,
    /// Centerline vertices in meters; at least two, positive total length.
    pub centerline: Vec<Point>,
    pub width: f64,
    pub speed_limit: f64,
    #[serde(default)]
    pub successors: Vec<LaneId>,
    #[serde(default)]
    pub left_neighbor: Option<LaneId>,
    #[serde(default)]
    pub right_neighbor: Option<LaneId>,
    pub location_class: LocationClass,
    /// Movement governing exit past the end of this lane, when signalized.
    #[serde(default)]
    pub signal_movement: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConflictZone {
    pub lane_a: LaneId,
    /// Arc interval on lane_a, meters from lane start.
    pub interval_a: (f64, f64),
    pub lane_b: LaneId,
    pub interval_b: (f64, f64),
    /// Which of the two lanes holds right-of-way through the zone.
    pub priority: LaneId,
    pub location_class: LocationClass,
}

impl ConflictZone {
    /// Interval on the given lane, if the lane participates in this zone.
    pub fn interval_on(&self, lane: &LaneId) -> Option<(f64, f64)> {
        if &self.lane_a == lane {
            Some(self.interval_a)
        } else if &self.lane_b == lane {
            Some(self.interval_b)
        } else {
            None
        }
    }

    /// The opposing lane and its interval, given one participant.
    pub fn other(&self, lane: &LaneId) -> Option<(&LaneId, (f64, f64))> {
        if &self.lane_a == lane {
            Some((&self.lane_b, self.interval_b))
        } else if &self.lane_b == lane {
            Some((&self.lane_a, self.interval_a))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Phase {
    pub duration: f64,
    /// Signal state per controlled movement during this phase.
    pub states: BTreeMap<String, SignalState>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalPlan {
    pub id: String,
    pub phases: Vec<Phase>,
    #[serde(default)]
    pub offset: f64,
}

impl SignalPlan {
    pub fn cycle_length(&self) -> f64 {
        self.phases.iter().map(|p| p.duration).sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Route {
    pub id: String,
    pub lanes: Vec<LaneId>,
    /// Closed routes wrap from the last lane back to the first.
    #[serde(default)]
    pub cyclic: bool,
}

/// Immutable road network. Construct through [`RoadNetwork::from_parts`] or
/// the text format loader so the referential invariants are checked once.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    lanes: BTreeMap<LaneId, Lane>,
    geometry: BTreeMap<LaneId, Polyline>,
    pub conflict_zones: Vec<ConflictZone>,
    pub signal_plans: Vec<SignalPlan>,
    pub routes: BTreeMap<String, Route>,
}

impl RoadNetwork {
    pub fn from_parts(
        lanes: Vec<Lane>,
        conflict_zones: Vec<ConflictZone>,
        signal_plans: Vec<SignalPlan>,
        routes: Vec<Route>,
    ) -> Result<RoadNetwork, RoadError> {
        let mut lane_map = BTreeMap::new();
        let mut geometry = BTreeMap::new();
        for lane in lanes {
            if lane.centerline.len() < 2 {
                return Err(RoadError::Invalid(format!(
                    "lane {} has fewer than 2 centerline points",
                    lane.id
                )));
            }
            if lane.width <= 0.0 {
                return Err(RoadError::Invalid(format!(
                    "lane {} has non-positive width",
                    lane.id
                )));
            }
            let poly = Polyline::new(lane.centerline.clone());
            if poly.length() <= 0.0 {
                return Err(RoadError::Invalid(format!(
                    "lane {} has zero length",
                    lane.id
                )));
            }
            geometry.insert(lane.id.clone(), poly);
            if lane_map.insert(lane.id.clone(), lane).is_some() {
                return Err(RoadError::Invalid("duplicate lane id".into()));
            }
        }
        let net = RoadNetwork {
            lanes: lane_map,
            geometry,
            conflict_zones,
            signal_plans,
            routes: BTreeMap::new(),
        };
        net.check_references()?;
        let mut net = net;
        for route in routes {
            net.check_route(&route)?;
            net.routes.insert(route.id.clone(), route);
        }
        Ok(net)
    }

    fn check_references(&self) -> Result<(), RoadError> {
        for lane in self.lanes.values() {
            for succ in &lane.successors {
                if !self.lanes.contains_key(succ) {
                    return Err(RoadError::Invalid(format!(
                        "lane {} successor {} missing",
                        lane.id, succ
                    )));
                }
            }
            for (label, nb) in [("left", &lane.left_neighbor), ("right", &lane.right_neighbor)] {
                if let Some(nb) = nb {
                    let other = self
                        .lanes
                        .get(nb)
                        .ok_or_else(|| RoadError::Invalid(format!(
                            "lane {} {} neighbor {} missing",
                            lane.id, label, nb
                        )))?;
                    // Neighbor symmetry: A.left = B implies B.right = A.
                    let back = if label == "left" {
                        &other.right_neighbor
                    } else {
                        &other.left_neighbor
                    };
                    if back.as_ref() != Some(&lane.id) {
                        return Err(RoadError::Invalid(format!(
                            "asymmetric neighbor relation between {} and {}",
                            lane.id, nb
                        )));
                    }
                }
            }
        }
        for zone in &self.conflict_zones {
            if zone.lane_a == zone.lane_b {
                return Err(RoadError::Invalid(format!(
                    "conflict zone pairs lane {} with itself",
                    zone.lane_a
                )));
            }
            for (lane_id, iv) in [(&zone.lane_a, zone.interval_a), (&zone.lane_b, zone.interval_b)]
            {
                let len = self
                    .geometry
                    .get(lane_id)
                    .ok_or_else(|| RoadError::UnknownLane(lane_id.clone()))?
                    .length();
                if iv.0 < 0.0 || iv.1 > len + 1e-9 || iv.0 >= iv.1 {
                    return Err(RoadError::Invalid(format!(
                        "conflict interval ({}, {}) outside lane {} (length {len})",
                        iv.0, iv.1, lane_id
                    )));
                }
            }
            if zone.priority != zone.lane_a && zone.priority != zone.lane_b {
                return Err(RoadError::Invalid(
                    "conflict zone priority names a non-participant lane".into(),
                ));
            }
        }
        for plan in &self.signal_plans {
            if plan.phases.is_empty() {
                return Err(RoadError::Invalid(format!("signal plan {} has no phases", plan.id)));
            }
            let movements: Vec<&String> = plan.phases[0].states.keys().collect();
            for phase in &plan.phases {
                if phase.duration <= 0.0 {
                    return Err(RoadError::Invalid(format!(
                        "signal plan {} has non-positive phase duration",
                        plan.id
                    )));
                }
                let keys: Vec<&String> = phase.states.keys().collect();
                if keys != movements {
                    return Err(RoadError::Invalid(format!(
                        "signal plan {} phases control different movement sets",
                        plan.id
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_route(&self, route: &Route) -> Result<(), RoadError> {
        if route.lanes.is_empty() {
            return Err(RoadError::Invalid(format!("route {} is empty", route.id)));
        }
        let mut pairs: Vec<(&LaneId, &LaneId)> =
            route.lanes.windows(2).map(|w| (&w[0], &w[1])).collect();
        if route.cyclic && route.lanes.len() > 1 {
            pairs.push((route.lanes.last().unwrap(), &route.lanes[0]));
        }
        for (a, b) in pairs {
            let lane = self.lane(a)?;
            if !lane.successors.contains(b) {
                return Err(RoadError::Invalid(format!(
                    "route {}: lane {} does not have successor {}",
                    route.id, a, b
                )));
            }
        }
        Ok(())
    }

    pub fn lane(&self, id: &LaneId) -> Result<&Lane, RoadError> {
        self.lanes.get(id).ok_or_else(|| RoadError::UnknownLane(id.clone()))
    }

    pub fn lanes(&self) -> impl Iterator<Item = &Lane> {
        self.lanes.values()
    }

    pub fn lane_length(&self, id: &LaneId) -> Result<f64, RoadError> {
        Ok(self.geometry_of(id)?.length())
    }

    pub fn geometry_of(&self, id: &LaneId) -> Result<&Polyline, RoadError> {
        self.geometry
            .get(id)
            .ok_or_else(|| RoadError::UnknownLane(id.clone()))
    }

    pub fn route(&self, id: &str) -> Result<&Route, RoadError> {
        self.routes
            .get(id)
            .ok_or_else(|| RoadError::UnknownRoute(id.to_string()))
    }

    /// Arc position and signed lateral offset (left positive) of a point on
    /// a lane. Clamps beyond the lane endpoints.
    pub fn project_to_lane(&self, p: Point, lane: &LaneId) -> Result<(f64, f64), RoadError> {
        Ok(self.geometry_of(lane)?.project(p))
    }

    /// World pose at an arc position and lateral offset on a lane.
    pub fn pose_at(&self, lane: &LaneId, arc: f64, lateral: f64) -> Result<Pose, RoadError> {
        let geom = self.geometry_of(lane)?;
        if arc < -1e-9 || arc > geom.length() + 1e-9 {
            return Err(RoadError::ArcOutOfRange {
                lane: lane.clone(),
                arc,
                len: geom.length(),
            });
        }
        let (p, heading) = geom.sample(arc);
        let left = pt(-heading.sin(), heading.cos());
        let q = p.add(left.scale(lateral));
        Ok(Pose::new(q.x, q.y, heading))
    }

    /// Signal state for a movement at an absolute simulation time.
    pub fn signal_state(&self, movement: &str, time: f64) -> Result<SignalState, RoadError> {
        for plan in &self.signal_plans {
            if plan.phases[0].states.contains_key(movement) {
                let cycle = plan.cycle_length();
                let mut t = (time + plan.offset) % cycle;
                if t < 0.0 {
                    t += cycle;
                }
                for phase in &plan.phases {
                    if t < phase.duration {
                        return Ok(phase.states[movement]);
                    }
                    t -= phase.duration;
                }
                // Floating-point tail of the last phase.
                return Ok(plan.phases.last().unwrap().states[movement]);
            }
        }
        Err(RoadError::UnknownMovement(movement.to_string()))
    }

    /// Distance along a lane chain from an arc position on the first lane to
    /// an arc position on the last, following successors. Returns None when
    /// the chain is not connected.
    pub fn chain_distance(
        &self,
        from: (&LaneId, f64),
        to: (&LaneId, f64),
        via: &[LaneId],
    ) -> Option<f64> {
        let mut dist = -from.1;
        let mut cur = from.0.clone();
        for lane in via.iter().chain(std::iter::once(to.0)) {
            if *lane == cur {
                continue;
            }
            let cur_lane = self.lanes.get(&cur)?;
            if !cur_lane.successors.contains(lane) {
                return None;
            }
            dist += self.geometry.get(&cur).map(|g| g.length())?;
            cur = lane.clone();
        }
        Some(dist + to.1)
    }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct NetworkFile {
    format_version: u32,
    #[serde(default)]
    lanes: Vec<LaneRecord>,
    #[serde(default)]
    conflict_zones: Vec<ConflictZoneRecord>,
    #[serde(default)]
    signal_plans: Vec<SignalPlanRecord>,
    #[serde(default)]
    routes: Vec<Route>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LaneRecord {
    id: String,
    /// Flat [x0, y0, x1, y1, ...] vertex list.
    centerline: Vec<f64>,
    width: f64,
    speed_limit: f64,
    #[serde(default)]
    successors: Vec<String>,
    #[serde(default)]
    left_neighbor: Option<String>,
    #[serde(default)]
    right_neighbor: Option<String>,
    location_class: LocationClass,
    #[serde(default)]
    signal_movement: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConflictZoneRecord {
    lane_a: String,
    interval_a: (f64, f64),
    lane_b: String,
    interval_b: (f64, f64),
    priority: String,
    location_class: LocationClass,
}

#[derive(Debug, Serialize, Deserialize)]
struct SignalPlanRecord {
    id: String,
    #[serde(default)]
    offset: f64,
    phases: Vec<PhaseRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PhaseRecord {
    duration: f64,
    states: BTreeMap<String, SignalState>,
}

impl RoadNetwork {
    /// Load a network from the TOML text format.
    pub fn from_toml(text: &str) -> Result<RoadNetwork, RoadError> {
        let file: NetworkFile =
            toml::from_str(text).map_err(|e| RoadError::Parse(e.to_string()))?;
        if file.format_version != NETWORK_FORMAT_VERSION {
            return Err(RoadError::Parse(format!(
                "unsupported network format_version {} (expected {})",
                file.format_version, NETWORK_FORMAT_VERSION
            )));
        }
        let lanes = file
            .lanes
            .into_iter()
            .map(|r| {
                if r.centerline.len() % 2 != 0 {
                    return Err(RoadError::Parse(format!(
                        "lane {}: odd centerline coordinate count",
                        r.id
                    )));
                }
                Ok(Lane {
                    id: LaneId::new(r.id),
                    centerline: r
                        .centerline
                        .chunks(2)
                        .map(|c| pt(c[0], c[1]))
                        .collect(),
                    width: r.width,
                    speed_limit: r.speed_limit,
                    successors: r.successors.into_iter().map(LaneId::new).collect(),
                    left_neighbor: r.left_neighbor.map(LaneId::new),
                    right_neighbor: r.right_neighbor.map(LaneId::new),
                    location_class: r.location_class,
                    signal_movement: r.signal_movement,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let zones = file
            .conflict_zones
            .into_iter()
            .map(|r| ConflictZone {
                lane_a: LaneId::new(r.lane_a),
                interval_a: r.interval_a,
                lane_b: LaneId::new(r.lane_b),
                interval_b: r.interval_b,
                priority: LaneId::new(r.priority),
                location_class: r.location_class,
            })
            .collect();
        let plans = file
            .signal_plans
            .into_iter()
            .map(|r| SignalPlan {
                id: r.id,
                offset: r.offset,
                phases: r
                    .phases
                    .into_iter()
                    .map(|p| Phase { duration: p.duration, states: p.states })
                    .collect(),
            })
            .collect();
        RoadNetwork::from_parts(lanes, zones, plans, file.routes)
    }

    /// Serialize to the TOML text format.
    pub fn to_toml(&self) -> String {
        let file = NetworkFile {
            format_version: NETWORK_FORMAT_VERSION,
            lanes: self
                .lanes
                .values()
                .map(|l| LaneRecord {
                    id: l.id.0.clone(),
                    centerline: l
                        .centerline
                        .iter()
                        .flat_map(|p| [p.x, p.y])
                        .collect(),
                    width: l.width,
                    speed_limit: l.speed_limit,
                    successors: l.successors.iter().map(|s| s.0.clone()).collect(),
                    left_neighbor: l.left_neighbor.as_ref().map(|s| s.0.clone()),
                    right_neighbor: l.right_neighbor.as_ref().map(|s| s.0.clone()),
                    location_class: l.location_class,
                    signal_movement: l.signal_movement.clone(),
                })
                .collect(),
            conflict_zones: self
                .conflict_zones
                .iter()
                .map(|z| ConflictZoneRecord {
                    lane_a: z.lane_a.0.clone(),
                    interval_a: z.interval_a,
                    lane_b: z.lane_b.0.clone(),
                    interval_b: z.interval_b,
                    priority: z.priority.0.clone(),
                    location_class: z.location_class,
                })
                .collect(),
            signal_plans: self
                .signal_plans
                .iter()
                .map(|p| SignalPlanRecord {
                    id: p.id.clone(),
                    offset: p.offset,
                    phases: p
                        .phases
                        .iter()
                        .map(|ph| PhaseRecord { duration: ph.duration, states: ph.states.clone() })
                        .collect(),
                })
                .collect(),
            routes: self.routes.values().cloned().collect(),
        };
        toml::to_string(&file).expect("network serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desk;

    fn straight_lane(id: &str, len: f64) -> Lane {
        Lane {
            id: LaneId::new(id),
            centerline: vec![pt(0.0, 0.0), pt(len, 0.0)],
            width: 3.5,
            speed_limit: 13.4,
            successors: vec![],
            left_neighbor: None,
            right_neighbor: None,
            location_class: LocationClass::Arterial,
            signal_movement: None,
        }
    }

    fn single_lane_net() -> RoadNetwork {
        RoadNetwork::from_parts(vec![straight_lane("a", 100.0)], vec![], vec![], vec![]).unwrap()
    }

    #[test]
    fn project_on_straight_lane() {
        let net = single_lane_net();
        let id = LaneId::new("a");
        let (arc, off) = net.project_to_lane(pt(50.0, 0.0), &id).unwrap();
        assert_eq!((arc, off), (50.0, 0.0));
        let (arc, off) = net.project_to_lane(pt(50.0, 2.0), &id).unwrap();
        assert_eq!(arc, 50.0);
        assert!((off - 2.0).abs() < 1e-12);
        let (arc, _) = net.project_to_lane(pt(120.0, 0.0), &id).unwrap();
        assert_eq!(arc, 100.0);
    }

    #[test]
    fn pose_at_straight_and_offset() {
        let net = single_lane_net();
        let id = LaneId::new("a");
        let p = net.pose_at(&id, 10.0, 0.0).unwrap();
        assert!((p.x - 10.0).abs() < 1e-12 && p.y.abs() < 1e-12 && p.heading.abs() < 1e-12);
        let p = net.pose_at(&id, 10.0, 1.5).unwrap();
        assert!((p.y - 1.5).abs() < 1e-12);
        assert!(net.pose_at(&id, 150.0, 0.0).is_err());
    }

    #[test]
    fn quarter_circle_heading() {
        // Quarter circle of radius r sampled densely; heading at arc pi*r/4
        // is rotated 45 degrees from the start tangent.
        let r = 20.0;
        let n = 400;
        let pts: Vec<Point> = (0..=n)
            .map(|i| {
                let th = (i as f64 / n as f64) * std::f64::consts::FRAC_PI_2;
                pt(r * th.sin(), r * (1.0 - th.cos()))
            })
            .collect();
        let lane = Lane {
            id: LaneId::new("arc"),
            centerline: pts,
            width: 3.5,
            speed_limit: 8.0,
            successors: vec![],
            left_neighbor: None,
            right_neighbor: None,
            location_class: LocationClass::Roundabout,
            signal_movement: None,
        };
        let net = RoadNetwork::from_parts(vec![lane], vec![], vec![], vec![]).unwrap();
        let arc = std::f64::consts::PI * r / 4.0;
        let pose = net.pose_at(&LaneId::new("arc"), arc, 0.0).unwrap();
        let expect = std::f64::consts::FRAC_PI_4;
        assert!((pose.heading - expect).abs() < 1e-3, "heading {}", pose.heading);
    }

    #[test]
    fn projection_pose_roundtrip_property() {
        let net = desk::desk_network();
        for lane in net.lanes() {
            let len = net.lane_length(&lane.id).unwrap();
            for i in 1..10 {
                let arc = len * (i as f64) / 10.0;
                for off in [-lane.width / 2.0 * 0.9, 0.0, lane.width / 2.0 * 0.9] {
                    let pose = net.pose_at(&lane.id, arc, off).unwrap();
                    let (arc2, off2) = net.project_to_lane(pose.point(), &lane.id).unwrap();
                    let pose2 = net.pose_at(&lane.id, arc2, off2).unwrap();
                    let err = pose.point().dist(pose2.point());
                    assert!(err < 1e-6, "lane {} arc {arc} off {off}: err {err}", lane.id);
                }
            }
        }
    }

    #[test]
    fn signal_state_phases_and_periodicity() {
        let plan = SignalPlan {
            id: "p".into(),
            offset: 0.0,
            phases: vec![
                Phase {
                    duration: 30.0,
                    states: BTreeMap::from([("m".to_string(), SignalState::Green)]),
                },
                Phase {
                    duration: 3.0,
                    states: BTreeMap::from([("m".to_string(), SignalState::Yellow)]),
                },
                Phase {
                    duration: 27.0,
                    states: BTreeMap::from([("m".to_string(), SignalState::Red)]),
                },
            ],
        };
        let net =
            RoadNetwork::from_parts(vec![straight_lane("a", 50.0)], vec![], vec![plan], vec![])
                .unwrap();
        assert_eq!(net.signal_state("m", 10.0).unwrap(), SignalState::Green);
        assert_eq!(net.signal_state("m", 31.0).unwrap(), SignalState::Yellow);
        assert_eq!(net.signal_state("m", 70.0).unwrap(), SignalState::Green);
        for t in [0.0, 5.5, 31.2, 44.0] {
            assert_eq!(
                net.signal_state("m", t).unwrap(),
                net.signal_state("m", t + 60.0).unwrap()
            );
        }
        assert!(net.signal_state("nope", 0.0).is_err());
    }

    #[test]
    fn toml_roundtrip_desk() {
        let net = desk::desk_network();
        let text = net.to_toml();
        let net2 = RoadNetwork::from_toml(&text).unwrap();
        assert_eq!(net.lanes.len(), net2.lanes.len());
        assert_eq!(net.conflict_zones.len(), net2.conflict_zones.len());
        assert_eq!(net.routes.len(), net2.routes.len());
        for lane in net.lanes() {
            let other = net2.lane(&lane.id).unwrap();
            assert_eq!(lane.successors, other.successors);
            let la = net.lane_length(&lane.id).unwrap();
            let lb = net2.lane_length(&lane.id).unwrap();
            assert!((la - lb).abs() < 1e-9);
        }
    }

    #[test]
    fn asymmetric_neighbors_rejected() {
        let mut a = straight_lane("a", 100.0);
        let mut b = straight_lane("b", 100.0);
        b.centerline = vec![pt(0.0, 3.5), pt(100.0, 3.5)];
        a.left_neighbor = Some(LaneId::new("b"));
        // b.right_neighbor deliberately unset.
        let err = RoadNetwork::from_parts(vec![a, b], vec![], vec![], vec![]);
        assert!(err.is_err());
    }
}

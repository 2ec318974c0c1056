//! Visiting order for selected viewpoints: nearest-neighbour construction
//! followed by 2-opt segment reversal. Paths are open and start at a fixed
//! viewpoint.

use crate::geometry::{Aabb, Point3};
use crate::visibility::{AgentClass, Viewpoint};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// Moves must shorten the path by more than this to be applied.
pub const IMPROVEMENT_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TourError {
    #[error("no points to visit")]
    EmptyInput,
    #[error("start id {0} is not among the points")]
    UnknownStart(usize),
    #[error("id {0} appears more than once")]
    DuplicateId(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub agent_class: AgentClass,
    /// Viewpoint ids in visiting order.
    pub order: Vec<usize>,
    /// Open-path Euclidean length in meters.
    pub length: f64,
}

fn lookup(points: &[(usize, Point3)]) -> Result<HashMap<usize, Point3>, TourError> {
    let mut map = HashMap::with_capacity(points.len());
    for &(id, p) in points {
        if map.insert(id, p).is_some() {
            return Err(TourError::DuplicateId(id));
        }
    }
    Ok(map)
}

/// Sum of leg lengths along `order`.
pub fn path_length(order: &[usize], points: &[(usize, Point3)]) -> f64 {
    let map: HashMap<usize, Point3> = points.iter().copied().collect();
    order
        .windows(2)
        .map(|w| (map[&w[1]] - map[&w[0]]).norm())
        .sum()
}

/// Greedy chain from `start_id`, always moving to the closest unvisited
/// point (ties to the lowest id).
pub fn nn_tour(points: &[(usize, Point3)], start_id: usize, class: AgentClass) -> Result<Tour, TourError> {
    if points.is_empty() {
        return Err(TourError::EmptyInput);
    }
    let map = lookup(points)?;
    if !map.contains_key(&start_id) {
        return Err(TourError::UnknownStart(start_id));
    }
    let mut left: Vec<(usize, Point3)> = points.iter().copied().filter(|p| p.0 != start_id).collect();
    left.sort_by_key(|p| p.0);
    let mut order = vec![start_id];
    let mut here = map[&start_id];
    while !left.is_empty() {
        let (k, _) = left
            .iter()
            .enumerate()
            .map(|(k, (_, p))| (k, (p - here).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .unwrap();
        let (id, p) = left.remove(k);
        order.push(id);
        here = p;
    }
    let length = path_length(&order, points);
    Ok(Tour {
        agent_class: class,
        order,
        length,
    })
}

/// Length change from reversing `order[i..=j]`; the first point never moves.
fn reversal_delta(pos: &[Point3], i: usize, j: usize) -> f64 {
    let d = |a: usize, b: usize| (pos[a] - pos[b]).norm();
    let mut delta = d(i - 1, j) - d(i - 1, i);
    if j + 1 < pos.len() {
        delta += d(i, j + 1) - d(j, j + 1);
    }
    delta
}

fn best_move(pos: &[Point3]) -> Option<(usize, usize, f64)> {
    let n = pos.len();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 1..n {
        for j in i + 1..n {
            let delta = reversal_delta(pos, i, j);
            if delta < -IMPROVEMENT_EPS && best.is_none_or(|b| delta < b.2) {
                best = Some((i, j, delta));
            }
        }
    }
    best
}

/// True when some segment reversal would shorten the path by more than
/// [`IMPROVEMENT_EPS`].
pub fn has_improving_move(tour: &Tour, points: &[(usize, Point3)]) -> bool {
    let map: HashMap<usize, Point3> = points.iter().copied().collect();
    let pos: Vec<Point3> = tour.order.iter().map(|id| map[id]).collect();
    best_move(&pos).is_some()
}

/// Applies the best improving reversal until none is left.
pub fn two_opt(tour: &Tour, points: &[(usize, Point3)]) -> Tour {
    let map: HashMap<usize, Point3> = points.iter().copied().collect();
    let mut order = tour.order.clone();
    let mut pos: Vec<Point3> = order.iter().map(|id| map[id]).collect();
    while let Some((i, j, _)) = best_move(&pos) {
        order[i..=j].reverse();
        pos[i..=j].reverse();
    }
    let length = path_length(&order, points);
    Tour {
        agent_class: tour.agent_class,
        order,
        length,
    }
}

/// Where each class's path should begin. Unset depots default to the
/// minimum corner of the scene bounds, at floor height for ground agents
/// and at roof height for aerial ones.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Depots {
    pub ground: Option<Point3>,
    pub aerial: Option<Point3>,
}

impl Depots {
    pub fn resolve(&self, class: AgentClass, bounds: &Aabb) -> Point3 {
        match class {
            AgentClass::Ground => self.ground.unwrap_or(bounds.min),
            AgentClass::Aerial => self
                .aerial
                .unwrap_or(Point3::new(bounds.min.x, bounds.min.y, bounds.max.z)),
        }
    }
}

/// One tour per agent class that has any selected viewpoint, ground first.
pub fn plan_tours(selected: &[Viewpoint], bounds: &Aabb, depots: &Depots) -> Result<Vec<Tour>, TourError> {
    let mut tours = Vec::new();
    for class in [AgentClass::Ground, AgentClass::Aerial] {
        let points: Vec<(usize, Point3)> = selected
            .iter()
            .filter(|v| v.agent_class == class)
            .map(|v| (v.id, v.position))
            .collect();
        if points.is_empty() {
            continue;
        }
        let depot = depots.resolve(class, bounds);
        let start = points
            .iter()
            .min_by(|a, b| {
                (a.1 - depot)
                    .norm()
                    .total_cmp(&(b.1 - depot).norm())
                    .then(a.0.cmp(&b.0))
            })
            .unwrap()
            .0;
        let nn = nn_tour(&points, start, class)?;
        tours.push(two_opt(&nn, &points));
    }
    Ok(tours)
}

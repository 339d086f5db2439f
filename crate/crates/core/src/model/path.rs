//! Planar points and the rover's arc-length parameterised path.

use std::ops::{Add, Mul, Sub};
use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::MissionConfig;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Unit vector at `angle` radians.
    pub fn from_angle(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("rover path needs at least one waypoint")]
    Empty,
    #[error("waypoint {0} is not finite")]
    NonFinite(usize),
}

/// Polyline followed by the rover at constant speed.
///
/// Consecutive duplicate waypoints are dropped so that cumulative arc length
/// is strictly increasing. A single waypoint describes a parked rover.
#[derive(Debug)]
pub struct RoverPath {
    waypoints: Vec<Point>,
    cumulative: Vec<f64>,
    exhausted_logged: AtomicBool,
}

impl Clone for RoverPath {
    fn clone(&self) -> Self {
        Self {
            waypoints: self.waypoints.clone(),
            cumulative: self.cumulative.clone(),
            exhausted_logged: AtomicBool::new(self.exhausted_logged.load(Ordering::Relaxed)),
        }
    }
}

impl PartialEq for RoverPath {
    fn eq(&self, other: &Self) -> bool {
        self.waypoints == other.waypoints
    }
}

impl RoverPath {
    pub fn new(points: Vec<Point>) -> Result<Self, PathError> {
        if points.is_empty() {
            return Err(PathError::Empty);
        }
        if let Some(i) = points.iter().position(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(PathError::NonFinite(i));
        }
        let mut waypoints: Vec<Point> = Vec::with_capacity(points.len());
        let mut cumulative = Vec::with_capacity(points.len());
        for p in points {
            match waypoints.last() {
                None => {
                    waypoints.push(p);
                    cumulative.push(0.0);
                }
                Some(&last) => {
                    let seg = last.dist(p);
                    if seg > 0.0 {
                        cumulative.push(cumulative.last().copied().unwrap_or(0.0) + seg);
                        waypoints.push(p);
                    }
                }
            }
        }
        Ok(Self {
            waypoints,
            cumulative,
            exhausted_logged: AtomicBool::new(false),
        })
    }

    /// Straight segment of `length` metres from `start` along `heading` radians.
    pub fn straight(start: Point, heading: f64, length: f64) -> Self {
        Self::new(vec![start, start + Point::from_angle(heading) * length]).expect("finite straight path")
    }

    /// Counter-clockwise circle of `radius` around `center` starting at its
    /// eastmost point, approximated by `segments` chords, followed by a
    /// tangent line of `line_len` metres.
    pub fn circle_then_line(center: Point, radius: f64, segments: usize, line_len: f64) -> Self {
        let segments = segments.max(3);
        let mut pts: Vec<Point> = (0..=segments)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / segments as f64;
                center + Point::from_angle(a) * radius
            })
            .collect();
        // close the loop exactly on the start point
        pts[segments] = pts[0];
        let junction = pts[0];
        pts.push(junction + Point::new(0.0, line_len));
        Self::new(pts).expect("finite circle path")
    }

    pub fn waypoints(&self) -> &[Point] {
        &self.waypoints
    }

    /// Arc length at each waypoint.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    /// Point at arc length `s`, clamped to `[0, length]`.
    pub fn point_at(&self, s: f64) -> Point {
        let len = self.length();
        if s <= 0.0 || self.waypoints.len() == 1 {
            return self.waypoints[0];
        }
        if s >= len {
            return *self.waypoints.last().unwrap();
        }
        // first waypoint with cumulative > s
        let hi = self.cumulative.partition_point(|&c| c <= s);
        let lo = hi - 1;
        let seg = self.cumulative[hi] - self.cumulative[lo];
        let f = (s - self.cumulative[lo]) / seg;
        let a = self.waypoints[lo];
        let b = self.waypoints[hi];
        a + (b - a) * f
    }

    /// Arc length reached by the rover after `t` steps, clamped to the path.
    pub fn arc_at_step(&self, t: usize, cfg: &MissionConfig) -> f64 {
        (cfg.v_r * cfg.dt * t as f64).min(self.length())
    }
}

/// Rover position after `t` steps at constant speed. Clamps at the path end
/// (logged once per path).
pub fn rover_position(path: &RoverPath, t: usize, cfg: &MissionConfig) -> Point {
    let s = cfg.v_r * cfg.dt * t as f64;
    if s > path.length() && path.length() > 0.0 && !path.exhausted_logged.swap(true, Ordering::Relaxed) {
        log::info!("rover path exhausted at step {t}; rover parks at the final waypoint");
    }
    path.point_at(s)
}

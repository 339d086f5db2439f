//! Mission scenarios: rover path, horizon, fleet size and optional value map.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::maps::{value_map_from_csv, MapError, ValueMap};
use crate::model::{MissionConfig, PathError, Point, RoverPath};

/// Where a scenario's value map comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ValueSource {
    /// Grid CSV file, resolved relative to the working directory.
    File { path: PathBuf },
    /// `inside` within `radius` of `center`, `outside` elsewhere.
    Disc { center: Point, radius: f64, inside: f64, outside: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub waypoints: Vec<Point>,
    pub steps: usize,
    /// Overrides the configured fleet size.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub value_map: Option<ValueSource>,
}

pub const PRESETS: [&str; 3] = ["fig4", "line1000", "crater-value"];

/// Crater used by the `crater-value` preset.
pub const CRATER_CENTER: Point = Point { x: 150.0, y: 80.0 };
pub const CRATER_RADIUS: f64 = 70.0;

impl Scenario {
    pub fn preset(name: &str, cfg: &MissionConfig) -> Option<Self> {
        let from_path = |path: RoverPath, steps: usize, n: Option<usize>, value_map| Scenario {
            name: name.to_string(),
            waypoints: path.waypoints().to_vec(),
            steps,
            n,
            value_map,
        };
        match name {
            // a lap around a 200 m crater, then 500 m straight on
            "fig4" => Some(from_path(
                RoverPath::circle_then_line(Point::default(), 200.0, 360, 500.0),
                3600,
                Some(10),
                None,
            )),
            // 1000 s along a straight line, with slots available to the end
            "line1000" => Some(from_path(
                RoverPath::straight(Point::default(), 0.0, 1000.0 * cfg.v_r * cfg.dt + cfg.r_c),
                1000,
                None,
                None,
            )),
            // drive past a high-value crater north of the track
            "crater-value" => Some(from_path(
                RoverPath::straight(Point::default(), 0.0, 300.0 + cfg.r_c),
                600,
                Some(2),
                Some(ValueSource::Disc {
                    center: CRATER_CENTER,
                    radius: CRATER_RADIUS,
                    inside: 1.0,
                    outside: 0.2,
                }),
            )),
            _ => None,
        }
    }

    /// Random polyline long enough for `steps` of rover travel, turning by
    /// at most 60 degrees between 100 m legs.
    pub fn random(seed: u64, steps: usize, cfg: &MissionConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let need = steps as f64 * cfg.v_r * cfg.dt + cfg.r_c;
        let mut heading: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let mut p = Point::default();
        let mut waypoints = vec![p];
        let mut len = 0.0;
        while len < need {
            heading += rng.random_range(-std::f64::consts::FRAC_PI_3..std::f64::consts::FRAC_PI_3);
            p = p + Point::from_angle(heading) * 100.0;
            waypoints.push(p);
            len += 100.0;
        }
        Self {
            name: format!("random-{seed}"),
            waypoints,
            steps,
            n: None,
            value_map: None,
        }
    }

    pub fn path(&self) -> Result<RoverPath, PathError> {
        RoverPath::new(self.waypoints.clone())
    }

    pub fn fleet_size(&self, cfg: &MissionConfig) -> usize {
        self.n.unwrap_or(cfg.n)
    }

    pub fn load_value_map(&self, cfg: &MissionConfig) -> Result<Option<ValueMap>, MapError> {
        match &self.value_map {
            None => Ok(None),
            Some(ValueSource::File { path }) => {
                let text = std::fs::read_to_string(path).map_err(|e| MapError::Parse(format!("{}: {e}", path.display())))?;
                value_map_from_csv(&text).map(Some)
            }
            Some(ValueSource::Disc {
                center,
                radius,
                inside,
                outside,
            }) => {
                let path = self.path().map_err(|e| MapError::Geometry(e.to_string()))?;
                let extent = path
                    .waypoints()
                    .iter()
                    .map(|w| w.x.abs().max(w.y.abs()))
                    .fold(0.0, f64::max)
                    + 2.0 * (cfg.r_c + cfg.r_s);
                ValueMap::disc(*center, *radius, *inside, *outside, extent, cfg.cell).map(Some)
            }
        }
    }
}

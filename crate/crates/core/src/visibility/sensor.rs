use super::VisibilityError;
use crate::geometry::Point3;
use serde::{Deserialize, Serialize};

/// Which kind of agent occupies a viewpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentClass {
    Ground,
    Aerial,
}

impl AgentClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AgentClass::Ground => "ground",
            AgentClass::Aerial => "aerial",
        }
    }
}

/// Constraint envelope of a range scanner. Angles are in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorModel {
    pub min_range: f64,
    pub max_range: f64,
    /// Largest angle between the surface normal and the direction to the
    /// sensor at which a sample still counts as observed.
    pub max_incidence: f64,
    /// Elevation limits relative to the horizontal plane.
    pub min_elevation: f64,
    pub max_elevation: f64,
    /// 360 for a panoramic scanner.
    pub horizontal_fov: f64,
    /// Lattice step used when simulating scans.
    pub angular_resolution: f64,
    /// Standard deviation of Gaussian range noise in simulated scans.
    pub range_noise_sigma: f64,
}

impl SensorModel {
    /// Tripod-class panoramic terrestrial scanner.
    pub fn terrestrial() -> Self {
        SensorModel {
            min_range: 0.6,
            max_range: 60.0,
            max_incidence: 75.0,
            min_elevation: -60.0,
            max_elevation: 90.0,
            horizontal_fov: 360.0,
            angular_resolution: 0.5,
            range_noise_sigma: 0.005,
        }
    }

    /// Downward-looking UAV scanner.
    pub fn aerial() -> Self {
        SensorModel {
            min_range: 2.0,
            max_range: 80.0,
            max_incidence: 75.0,
            min_elevation: -90.0,
            max_elevation: 30.0,
            horizontal_fov: 360.0,
            angular_resolution: 0.5,
            range_noise_sigma: 0.01,
        }
    }

    pub fn validate(&self) -> Result<(), VisibilityError> {
        let bad = |m: String| Err(VisibilityError::InvalidSensor(m));
        if !(self.min_range >= 0.0 && self.min_range < self.max_range) {
            return bad(format!(
                "range [{}, {}] must satisfy 0 <= min < max",
                self.min_range, self.max_range
            ));
        }
        if !(self.max_incidence > 0.0 && self.max_incidence <= 90.0) {
            return bad(format!("max_incidence {} must be in (0, 90]", self.max_incidence));
        }
        if !(-90.0 <= self.min_elevation
            && self.min_elevation < self.max_elevation
            && self.max_elevation <= 90.0)
        {
            return bad(format!(
                "elevation band ({}, {}) must satisfy -90 <= min < max <= 90",
                self.min_elevation, self.max_elevation
            ));
        }
        if !(self.horizontal_fov > 0.0 && self.horizontal_fov <= 360.0) {
            return bad(format!("horizontal_fov {} must be in (0, 360]", self.horizontal_fov));
        }
        if !(self.angular_resolution > 0.0) {
            return bad(format!(
                "angular_resolution {} must be positive",
                self.angular_resolution
            ));
        }
        if !(self.range_noise_sigma >= 0.0) {
            return bad(format!(
                "range_noise_sigma {} must be non-negative",
                self.range_noise_sigma
            ));
        }
        Ok(())
    }
}

/// One sensor envelope per agent class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSet {
    pub ground: SensorModel,
    pub aerial: SensorModel,
}

impl Default for SensorSet {
    fn default() -> Self {
        SensorSet {
            ground: SensorModel::terrestrial(),
            aerial: SensorModel::aerial(),
        }
    }
}

impl SensorSet {
    pub fn for_class(&self, class: AgentClass) -> &SensorModel {
        match class {
            AgentClass::Ground => &self.ground,
            AgentClass::Aerial => &self.aerial,
        }
    }
}

/// A candidate scanner pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewpoint {
    pub id: usize,
    pub position: Point3,
    pub agent_class: AgentClass,
    /// Azimuth (degrees, counter-clockwise from +x) of the centre of a
    /// limited horizontal field of view.
    pub heading: Option<f64>,
}

impl Viewpoint {
    pub fn new(id: usize, position: Point3, agent_class: AgentClass) -> Self {
        Viewpoint {
            id,
            position,
            agent_class,
            heading: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SensorModel::terrestrial().validate().unwrap();
        SensorModel::aerial().validate().unwrap();
    }

    #[test]
    fn bad_envelopes_rejected() {
        let mut s = SensorModel::terrestrial();
        s.max_incidence = 95.0;
        assert!(s.validate().is_err());
        let mut s = SensorModel::terrestrial();
        s.min_range = 70.0;
        assert!(s.validate().is_err());
        let mut s = SensorModel::terrestrial();
        s.min_elevation = 90.0;
        assert!(s.validate().is_err());
    }
}

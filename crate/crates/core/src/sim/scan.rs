use super::SimError;
use crate::geometry::{Dir3, Point3, PointCloud, SpatialIndex, Vec3};
use crate::visibility::{AgentClass, SensorModel, Viewpoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub sensor: SensorModel,
    /// Lattice step in degrees; overrides the sensor's own resolution.
    pub angular_resolution: f64,
    pub seed: u64,
    /// Standard deviation of the per-axis position error of coarse
    /// walk-through scans.
    pub pose_jitter_sigma: f64,
}

impl ScanConfig {
    pub fn new(sensor: SensorModel, seed: u64) -> Self {
        ScanConfig {
            sensor,
            angular_resolution: sensor.angular_resolution,
            seed,
            pose_jitter_sigma: 0.0,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        self.sensor.validate()?;
        if !(self.angular_resolution > 0.0) || !(self.pose_jitter_sigma >= 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "resolution {} and jitter {}",
                self.angular_resolution, self.pose_jitter_sigma
            )));
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a key path into an independent stream seed, so
/// random draws depend on what they are for rather than when they happen.
pub fn stream_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(splitmix(seed), |acc, &k| splitmix(acc ^ splitmix(k)))
}

/// Elevation rows from the lower to the upper limit inclusive.
pub fn elevation_steps(sensor: &SensorModel, resolution: f64) -> usize {
    ((sensor.max_elevation - sensor.min_elevation) / resolution + 1e-9).floor() as usize + 1
}

fn azimuth_steps(sensor: &SensorModel, resolution: f64) -> (usize, f64) {
    if sensor.horizontal_fov >= 360.0 {
        ((360.0 / resolution + 1e-9).floor() as usize, 0.0)
    } else {
        (
            (sensor.horizontal_fov / resolution + 1e-9).floor() as usize + 1,
            -sensor.horizontal_fov / 2.0,
        )
    }
}

/// Unit ray directions of the scan lattice, elevation-major.
pub fn ray_directions(sensor: &SensorModel, resolution: f64, heading: Option<f64>) -> Vec<Dir3> {
    let rows = elevation_steps(sensor, resolution);
    let (cols, az0) = azimuth_steps(sensor, resolution);
    let heading = heading.unwrap_or(0.0);
    let mut dirs = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let el = (sensor.min_elevation + r as f64 * resolution).to_radians();
        for c in 0..cols {
            let az = (heading + az0 + c as f64 * resolution).to_radians();
            dirs.push(Dir3::new_normalize(Vec3::new(
                el.cos() * az.cos(),
                el.cos() * az.sin(),
                el.sin(),
            )));
        }
    }
    dirs
}

fn class_key(c: AgentClass) -> u64 {
    match c {
        AgentClass::Ground => 1,
        AgentClass::Aerial => 2,
    }
}

/// Casts the sensor lattice from `vp` and returns the returns in range.
///
/// Each return is displaced along its ray by Gaussian range noise drawn from
/// a stream keyed by `(seed, viewpoint, ray index)`. Every point records the
/// viewpoint position as its origin.
pub fn simulate_scan(index: &SpatialIndex, vp: &Viewpoint, cfg: &ScanConfig) -> Result<PointCloud, SimError> {
    cfg.validate()?;
    let s = &cfg.sensor;
    let dirs = ray_directions(s, cfg.angular_resolution, vp.heading);
    let noise = (s.range_noise_sigma > 0.0).then(|| Normal::new(0.0, s.range_noise_sigma).unwrap());
    let vp_key = stream_seed(cfg.seed, &[class_key(vp.agent_class), vp.id as u64]);
    let points: Vec<Point3> = dirs
        .par_iter()
        .enumerate()
        .filter_map(|(r, d)| {
            let hit = index.ray_cast(&vp.position, d, s.max_range)?;
            if hit.t < s.min_range {
                return None;
            }
            let dt = noise.map_or(0.0, |n| {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(vp_key, &[r as u64]));
                n.sample(&mut rng)
            });
            Some(hit.point + d.into_inner() * dt)
        })
        .collect();
    let origins = vec![vp.position; points.len()];
    Ok(PointCloud::new(points)
        .and_then(|c| c.with_origins(origins))
        .expect("ray hits are finite"))
}

/// Low-resolution scans from each waypoint, taken from a randomly offset
/// position, merged in waypoint order.
pub fn simulate_coarse_survey(
    index: &SpatialIndex,
    waypoints: &[Point3],
    cfg: &ScanConfig,
) -> Result<PointCloud, SimError> {
    if waypoints.is_empty() {
        return Err(SimError::NoWaypoints);
    }
    cfg.validate()?;
    let jitter = (cfg.pose_jitter_sigma > 0.0).then(|| Normal::new(0.0, cfg.pose_jitter_sigma).unwrap());
    let clouds = waypoints
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let offset = jitter.map_or(Vec3::zeros(), |n| {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, &[u64::MAX, i as u64]));
                Vec3::new(n.sample(&mut rng), n.sample(&mut rng), n.sample(&mut rng))
            });
            let vp = Viewpoint::new(i, w + offset, AgentClass::Ground);
            simulate_scan(index, &vp, cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PointCloud::concat(&clouds))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_size() {
        let s = SensorModel::terrestrial();
        assert_eq!(elevation_steps(&s, 1.0), 151);
        assert_eq!(ray_directions(&s, 1.0, None).len(), 360 * 151);
        assert_eq!(ray_directions(&s, 0.5, None).len(), 720 * 301);
        let mut narrow = s;
        narrow.horizontal_fov = 90.0;
        assert_eq!(ray_directions(&narrow, 1.0, None).len(), 91 * 151);
    }

    #[test]
    fn streams_differ_by_key() {
        assert_ne!(stream_seed(1, &[2, 3]), stream_seed(1, &[3, 2]));
        assert_eq!(stream_seed(1, &[2, 3]), stream_seed(1, &[2, 3]));
    }
}

use super::{is_finite, Dir3, GeometryError, Point3};

/// A set of measured points, optionally with normals and the sensor position
/// each point was recorded from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point3>,
    normals: Option<Vec<Dir3>>,
    origins: Option<Vec<Point3>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Result<Self, GeometryError> {
        if let Some(i) = points.iter().position(|p| !is_finite(p)) {
            return Err(GeometryError::NonFinite(i));
        }
        Ok(PointCloud {
            points,
            normals: None,
            origins: None,
        })
    }

    pub fn with_normals(mut self, normals: Vec<Dir3>) -> Result<Self, GeometryError> {
        if normals.len() != self.points.len() {
            return Err(GeometryError::LengthMismatch {
                what: "normals",
                got: normals.len(),
                expected: self.points.len(),
            });
        }
        self.normals = Some(normals);
        Ok(self)
    }

    pub fn with_origins(mut self, origins: Vec<Point3>) -> Result<Self, GeometryError> {
        if origins.len() != self.points.len() {
            return Err(GeometryError::LengthMismatch {
                what: "origins",
                got: origins.len(),
                expected: self.points.len(),
            });
        }
        if let Some(i) = origins.iter().position(|p| !is_finite(p)) {
            return Err(GeometryError::NonFinite(i));
        }
        self.origins = Some(origins);
        Ok(self)
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn normals(&self) -> Option<&[Dir3]> {
        self.normals.as_deref()
    }

    pub fn origins(&self) -> Option<&[Point3]> {
        self.origins.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Option<Point3> {
        if self.points.is_empty() {
            return None;
        }
        let sum = self
            .points
            .iter()
            .fold(nalgebra::Vector3::zeros(), |acc, p| acc + p.coords);
        Some(Point3::from(sum / self.points.len() as f64))
    }

    /// Concatenates clouds. Optional attributes survive only if every
    /// non-empty input carries them.
    pub fn concat<'a>(clouds: impl IntoIterator<Item = &'a PointCloud>) -> PointCloud {
        let clouds: Vec<&PointCloud> = clouds.into_iter().filter(|c| !c.is_empty()).collect();
        let points = clouds.iter().flat_map(|c| c.points.iter().copied()).collect();
        let normals = clouds
            .iter()
            .all(|c| c.normals.is_some())
            .then(|| {
                clouds
                    .iter()
                    .flat_map(|c| c.normals.as_ref().unwrap().iter().copied())
                    .collect()
            });
        let origins = clouds
            .iter()
            .all(|c| c.origins.is_some())
            .then(|| {
                clouds
                    .iter()
                    .flat_map(|c| c.origins.as_ref().unwrap().iter().copied())
                    .collect()
            });
        PointCloud {
            points,
            normals: if clouds.is_empty() { None } else { normals },
            origins: if clouds.is_empty() { None } else { origins },
        }
    }

    /// Keeps the first point (in input order) falling in each cubic cell of
    /// side `cell`. Output order follows input order.
    pub fn voxel_downsample(&self, cell: f64) -> PointCloud {
        let mut seen = std::collections::HashSet::new();
        let keep: Vec<usize> = (0..self.points.len())
            .filter(|&i| {
                let p = self.points[i];
                let key = (
                    (p.x / cell).floor() as i64,
                    (p.y / cell).floor() as i64,
                    (p.z / cell).floor() as i64,
                );
                seen.insert(key)
            })
            .collect();
        self.select(&keep)
    }

    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            normals: self
                .normals
                .as_ref()
                .map(|n| indices.iter().map(|&i| n[i]).collect()),
            origins: self
                .origins
                .as_ref()
                .map(|o| indices.iter().map(|&i| o[i]).collect()),
        }
    }
}

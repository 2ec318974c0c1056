use super::{is_finite, GeometryError, Point3, Vec3};

/// Triangles with area at or below this are treated as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-10;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3>) -> Self {
        let mut b = Aabb::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    pub fn grow(&mut self, p: &Point3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn merge(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn center(&self) -> Point3 {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn inflated(&self, margin: f64) -> Aabb {
        let m = Vec3::repeat(margin);
        Aabb {
            min: self.min - m,
            max: self.max + m,
        }
    }

    pub fn longest_axis(&self) -> usize {
        let e = self.extent();
        if e.x >= e.y && e.x >= e.z {
            0
        } else if e.y >= e.z {
            1
        } else {
            2
        }
    }

    pub fn contains(&self, p: &Point3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// Squared distance from `p` to the box (zero inside).
    pub fn distance_squared(&self, p: &Point3) -> f64 {
        (0..3)
            .map(|i| {
                let d = (self.min[i] - p[i]).max(0.0).max(p[i] - self.max[i]);
                d * d
            })
            .sum()
    }
}

/// Indexed triangle mesh with derived per-face normals and areas.
///
/// Normals follow the right-hand rule on the winding `(i, j, k)`. Degenerate
/// faces carry a zero normal and zero area until [`crate::meshify::clean_mesh`]
/// drops them.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[u32; 3]>,
    normals: Vec<Vec3>,
    areas: Vec<f64>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[u32; 3]>) -> Result<Self, GeometryError> {
        if let Some(i) = vertices.iter().position(|p| !is_finite(p)) {
            return Err(GeometryError::NonFinite(i));
        }
        let count = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&index) = tri.iter().find(|&&i| i as usize >= count) {
                return Err(GeometryError::IndexOutOfRange {
                    triangle: t,
                    index,
                    count,
                });
            }
        }
        let mut mesh = TriangleMesh {
            vertices,
            triangles,
            normals: Vec::new(),
            areas: Vec::new(),
        };
        mesh.derive();
        Ok(mesh)
    }

    pub fn empty() -> Self {
        TriangleMesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            normals: Vec::new(),
            areas: Vec::new(),
        }
    }

    fn derive(&mut self) {
        let (normals, areas) = self
            .triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i as usize]);
                let cross = (b - a).cross(&(c - a));
                let len = cross.norm();
                let area = 0.5 * len;
                if area > DEGENERATE_AREA {
                    (cross / len, area)
                } else {
                    (Vec3::zeros(), area)
                }
            })
            .unzip();
        self.normals = normals;
        self.areas = areas;
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle_points(&self, t: usize) -> [Point3; 3] {
        self.triangles[t].map(|i| self.vertices[i as usize])
    }

    pub fn normal(&self, t: usize) -> Vec3 {
        self.normals[t]
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    /// Appends `other`, offsetting its indices.
    pub fn append(&mut self, other: &TriangleMesh) {
        let offset = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles
            .extend(other.triangles.iter().map(|t| t.map(|i| i + offset)));
        self.normals.extend_from_slice(&other.normals);
        self.areas.extend_from_slice(&other.areas);
    }

    /// Applies `f` to every vertex and recomputes derived data.
    pub fn map_vertices(&self, f: impl Fn(&Point3) -> Point3) -> TriangleMesh {
        let mut m = TriangleMesh {
            vertices: self.vertices.iter().map(f).collect(),
            triangles: self.triangles.clone(),
            normals: Vec::new(),
            areas: Vec::new(),
        };
        m.derive();
        m
    }

    /// Reverses the winding of every triangle.
    pub fn flipped(&self) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
            normals: self.normals.iter().map(|n| -n).collect(),
            areas: self.areas.clone(),
        }
    }

    pub fn into_parts(self) -> (Vec<Point3>, Vec<[u32; 3]>) {
        (self.vertices, self.triangles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_follows_winding() {
        let m = TriangleMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert_eq!(m.normal(0), Vec3::z());
        assert!((m.area(0) - 0.5).abs() < 1e-15);
        assert_eq!(m.flipped().normal(0), -Vec3::z());
    }

    #[test]
    fn rejects_bad_index() {
        let err = TriangleMesh::new(vec![Point3::origin()], vec![[0, 0, 3]]).unwrap_err();
        assert!(matches!(err, GeometryError::IndexOutOfRange { index: 3, .. }));
    }

    #[test]
    fn rejects_nan() {
        let err = TriangleMesh::new(vec![Point3::new(f64::NAN, 0.0, 0.0)], vec![]).unwrap_err();
        assert_eq!(err, GeometryError::NonFinite(0));
    }

    #[test]
    fn degenerate_has_zero_normal() {
        let p = Point3::new(1.0, 2.0, 3.0);
        let m = TriangleMesh::new(vec![p, p, p], vec![[0, 1, 2]]).unwrap();
        assert_eq!(m.normal(0), Vec3::zeros());
        assert_eq!(m.area(0), 0.0);
    }
}

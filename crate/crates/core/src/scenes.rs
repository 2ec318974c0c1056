//! Programmatic test scenes: rooms, yards, buildings and spheres.
//!
//! Surfaces that a sensor could stand in front of face into free space.
//! Faces hidden inside solids (wall bottoms, ground under a building) are not
//! emitted so every triangle is observable in principle.

use crate::geometry::{Aabb, Point3, TriangleMesh, Vec3};

#[derive(Debug, Default, Clone)]
pub struct MeshBuilder {
    vertices: Vec<Point3>,
    triangles: Vec<[u32; 3]>,
}

/// Selects faces of an axis-aligned box.
#[derive(Debug, Clone, Copy)]
pub struct BoxFaces {
    pub neg_x: bool,
    pub pos_x: bool,
    pub neg_y: bool,
    pub pos_y: bool,
    pub bottom: bool,
    pub top: bool,
}

impl BoxFaces {
    pub const ALL: BoxFaces = BoxFaces {
        neg_x: true,
        pos_x: true,
        neg_y: true,
        pos_y: true,
        bottom: true,
        top: true,
    };
    pub const NO_BOTTOM: BoxFaces = BoxFaces {
        bottom: false,
        ..BoxFaces::ALL
    };
}

impl MeshBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, p: Point3) -> u32 {
        self.vertices.push(p);
        (self.vertices.len() - 1) as u32
    }

    pub fn triangle(&mut self, a: Point3, b: Point3, c: Point3) {
        let ia = self.vertex(a);
        let ib = self.vertex(b);
        let ic = self.vertex(c);
        self.triangles.push([ia, ib, ic]);
    }

    /// Planar quad `a, b, c, d` (counter-clockwise seen from the front side)
    /// split into a grid whose cell edges are at most `max_edge` long.
    pub fn quad(&mut self, a: Point3, b: Point3, c: Point3, d: Point3, max_edge: f64) {
        let nu = (((b - a).norm() / max_edge).ceil() as usize).max(1);
        let nv = (((d - a).norm() / max_edge).ceil() as usize).max(1);
        let base = self.vertices.len() as u32;
        for j in 0..=nv {
            let fv = j as f64 / nv as f64;
            let left = a + (d - a) * fv;
            let right = b + (c - b) * fv;
            for i in 0..=nu {
                let fu = i as f64 / nu as f64;
                self.vertices.push(left + (right - left) * fu);
            }
        }
        let row = (nu + 1) as u32;
        for j in 0..nv as u32 {
            for i in 0..nu as u32 {
                let v00 = base + j * row + i;
                let v10 = v00 + 1;
                let v01 = v00 + row;
                let v11 = v01 + 1;
                self.triangles.push([v00, v10, v11]);
                self.triangles.push([v00, v11, v01]);
            }
        }
    }

    /// Axis-aligned rectangle in the plane `z = h` facing `+z` (`up`) or `-z`.
    pub fn horizontal_rect(&mut self, min: (f64, f64), max: (f64, f64), h: f64, up: bool, max_edge: f64) {
        let a = Point3::new(min.0, min.1, h);
        let b = Point3::new(max.0, min.1, h);
        let c = Point3::new(max.0, max.1, h);
        let d = Point3::new(min.0, max.1, h);
        if up {
            self.quad(a, b, c, d, max_edge);
        } else {
            self.quad(a, d, c, b, max_edge);
        }
    }

    /// Axis-aligned box. `outward` selects whether faces point out of the
    /// solid (a building) or into it (a room shell).
    pub fn axis_box(&mut self, b: &Aabb, faces: BoxFaces, outward: bool, max_edge: f64) {
        let (lo, hi) = (b.min, b.max);
        let p = |x: f64, y: f64, z: f64| Point3::new(x, y, z);
        let mut emit = |q: [Point3; 4]| {
            if outward {
                self.quad(q[0], q[1], q[2], q[3], max_edge);
            } else {
                self.quad(q[0], q[3], q[2], q[1], max_edge);
            }
        };
        if faces.neg_x {
            emit([p(lo.x, lo.y, lo.z), p(lo.x, lo.y, hi.z), p(lo.x, hi.y, hi.z), p(lo.x, hi.y, lo.z)]);
        }
        if faces.pos_x {
            emit([p(hi.x, lo.y, lo.z), p(hi.x, hi.y, lo.z), p(hi.x, hi.y, hi.z), p(hi.x, lo.y, hi.z)]);
        }
        if faces.neg_y {
            emit([p(lo.x, lo.y, lo.z), p(hi.x, lo.y, lo.z), p(hi.x, lo.y, hi.z), p(lo.x, lo.y, hi.z)]);
        }
        if faces.pos_y {
            emit([p(lo.x, hi.y, lo.z), p(lo.x, hi.y, hi.z), p(hi.x, hi.y, hi.z), p(hi.x, hi.y, lo.z)]);
        }
        if faces.bottom {
            emit([p(lo.x, lo.y, lo.z), p(lo.x, hi.y, lo.z), p(hi.x, hi.y, lo.z), p(hi.x, lo.y, lo.z)]);
        }
        if faces.top {
            emit([p(lo.x, lo.y, hi.z), p(hi.x, lo.y, hi.z), p(hi.x, hi.y, hi.z), p(lo.x, hi.y, hi.z)]);
        }
    }

    /// Both sides of a vertical rectangle in the plane `x = x0`.
    pub fn double_sided_x(&mut self, x0: f64, y: (f64, f64), z: (f64, f64), max_edge: f64) {
        let a = Point3::new(x0, y.0, z.0);
        let b = Point3::new(x0, y.1, z.0);
        let c = Point3::new(x0, y.1, z.1);
        let d = Point3::new(x0, y.0, z.1);
        self.quad(a, b, c, d, max_edge);
        self.quad(a, d, c, b, max_edge);
    }

    /// Up-facing ground of square cells over `[min, max]`, skipping cells whose
    /// centre lies inside any footprint.
    pub fn ground_cells(&mut self, min: (f64, f64), max: (f64, f64), cell: f64, footprints: &[Aabb]) {
        let nx = ((max.0 - min.0) / cell).round() as usize;
        let ny = ((max.1 - min.1) / cell).round() as usize;
        for j in 0..ny {
            for i in 0..nx {
                let x0 = min.0 + i as f64 * cell;
                let y0 = min.1 + j as f64 * cell;
                let cx = x0 + 0.5 * cell;
                let cy = y0 + 0.5 * cell;
                let covered = footprints.iter().any(|f| {
                    cx > f.min.x && cx < f.max.x && cy > f.min.y && cy < f.max.y
                });
                if !covered {
                    self.horizontal_rect((x0, y0), (x0 + cell, y0 + cell), 0.0, true, cell);
                }
            }
        }
    }

    pub fn append(&mut self, mesh: &TriangleMesh) {
        let base = self.vertices.len() as u32;
        self.vertices.extend_from_slice(mesh.vertices());
        self.triangles
            .extend(mesh.triangles().iter().map(|t| t.map(|i| i + base)));
    }

    pub fn build(self) -> TriangleMesh {
        TriangleMesh::new(self.vertices, self.triangles).expect("builder emits valid indices")
    }
}

/// Closed latitude/longitude sphere with outward normals and shared vertices.
/// Produces `2 * slices * (stacks - 1)` triangles.
pub fn uv_sphere(center: Point3, radius: f64, stacks: usize, slices: usize) -> TriangleMesh {
    let stacks = stacks.max(2);
    let slices = slices.max(3);
    let mut v = vec![center + Vec3::z() * radius];
    for i in 1..stacks {
        let theta = std::f64::consts::PI * i as f64 / stacks as f64;
        for j in 0..slices {
            let phi = std::f64::consts::TAU * j as f64 / slices as f64;
            v.push(
                center
                    + Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
                        * radius,
            );
        }
    }
    v.push(center - Vec3::z() * radius);
    let south = (v.len() - 1) as u32;
    let ring = |i: usize, j: usize| (1 + (i - 1) * slices + (j % slices)) as u32;
    let mut t = Vec::new();
    for j in 0..slices {
        t.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..slices {
            let a = ring(i, j);
            let b = ring(i, j + 1);
            let c = ring(i + 1, j);
            let d = ring(i + 1, j + 1);
            t.push([a, c, d]);
            t.push([a, d, b]);
        }
    }
    for j in 0..slices {
        t.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    TriangleMesh::new(v, t).expect("valid sphere")
}

/// Flat up-facing floor over `[0, sx] x [0, sy]` at `z = 0`.
pub fn flat_floor(sx: f64, sy: f64, max_edge: f64) -> TriangleMesh {
    let mut b = MeshBuilder::new();
    b.horizontal_rect((0.0, 0.0), (sx, sy), 0.0, true, max_edge);
    b.build()
}

/// Closed room shell `[0, sx] x [0, sy] x [0, sz]` with normals facing inward.
pub fn room_shell(sx: f64, sy: f64, sz: f64, max_edge: f64) -> TriangleMesh {
    let mut b = MeshBuilder::new();
    let bounds = Aabb {
        min: Point3::origin(),
        max: Point3::new(sx, sy, sz),
    };
    b.axis_box(&bounds, BoxFaces::ALL, false, max_edge);
    b.build()
}

/// Room `11 x 5 x 3` m split at `x = 5.5` by a thin full-height partition with
/// one doorway (`y` in `[0.5, 1.5]`, `2.1` m high).
pub fn partitioned_room(max_edge: f64) -> TriangleMesh {
    let mut b = MeshBuilder::new();
    let bounds = Aabb {
        min: Point3::origin(),
        max: Point3::new(11.0, 5.0, 3.0),
    };
    b.axis_box(&bounds, BoxFaces::ALL, false, max_edge);
    b.double_sided_x(5.5, (0.0, 0.5), (0.0, 3.0), max_edge);
    b.double_sided_x(5.5, (1.5, 5.0), (0.0, 3.0), max_edge);
    b.double_sided_x(5.5, (0.5, 1.5), (2.1, 3.0), max_edge);
    b.build()
}

/// Closed `size`-square floor with a solid regular-polygon column of the
/// given radius and height at `center`.
pub fn floor_with_column(size: f64, center: (f64, f64), radius: f64, height: f64, sides: usize) -> TriangleMesh {
    let mut b = MeshBuilder::new();
    b.horizontal_rect((0.0, 0.0), (size, size), 0.0, true, size);
    b.append(&prism(center, radius, height, sides));
    b.build()
}

/// Vertical prism over a regular polygon with a top cap and no bottom.
pub fn prism(center: (f64, f64), radius: f64, height: f64, sides: usize) -> TriangleMesh {
    let mut b = MeshBuilder::new();
    let at = |k: usize, z: f64| {
        let a = std::f64::consts::TAU * k as f64 / sides as f64;
        Point3::new(center.0 + radius * a.cos(), center.1 + radius * a.sin(), z)
    };
    let top = Point3::new(center.0, center.1, height);
    for k in 0..sides {
        b.quad(at(k, 0.0), at(k + 1, 0.0), at(k + 1, height), at(k, height), height);
        b.triangle(top, at(k, height), at(k + 1, height));
    }
    b.build()
}

/// A `bw x bd x bh` closed box building centred in a square yard of side
/// `yard`. The building has no bottom and the yard has a hole under it.
pub fn box_building_in_yard(yard: f64, bw: f64, bd: f64, bh: f64, cell: f64) -> TriangleMesh {
    let half = yard / 2.0;
    let footprint = Aabb {
        min: Point3::new(-bw / 2.0, -bd / 2.0, 0.0),
        max: Point3::new(bw / 2.0, bd / 2.0, bh),
    };
    let mut b = MeshBuilder::new();
    b.ground_cells((-half, -half), (half, half), cell, &[footprint]);
    b.axis_box(&footprint, BoxFaces::NO_BOTTOM, true, cell);
    b.build()
}

/// The ground-truth courtyard used by the pipeline examples: a 24 m square
/// site, a walled 16 m courtyard with four 2.4 m entrances, a central pier and
/// a low bench. Ground cells are `0.4 / refine` m.
pub fn courtyard(refine: usize) -> TriangleMesh {
    let cell = 0.4 / refine.max(1) as f64;
    let mut solids = Vec::new();
    let wall_h = 3.0;
    let (inner, outer, gate) = (7.6, 8.0, 1.2);
    let wall = |x: (f64, f64), y: (f64, f64)| Aabb {
        min: Point3::new(x.0, y.0, 0.0),
        max: Point3::new(x.1, y.1, wall_h),
    };
    for &s in &[-1.0f64, 1.0] {
        let band = if s < 0.0 { (-outer, -inner) } else { (inner, outer) };
        for &t in &[-1.0f64, 1.0] {
            // corner block, then the segments on either side of it up to the gates
            let other = if t < 0.0 { (-outer, -inner) } else { (inner, outer) };
            solids.push(wall(band, other));
            let run = if t < 0.0 { (-inner, -gate) } else { (gate, inner) };
            solids.push(wall(run, band));
            solids.push(wall(band, run));
        }
    }
    solids.push(Aabb {
        min: Point3::new(-0.4, -0.4, 0.0),
        max: Point3::new(0.4, 0.4, wall_h),
    });
    solids.push(Aabb {
        min: Point3::new(3.2, 3.6, 0.0),
        max: Point3::new(5.2, 4.4, 0.8),
    });
    let mut b = MeshBuilder::new();
    b.ground_cells((-12.0, -12.0), (12.0, 12.0), cell, &solids);
    for s in &solids {
        let mut faces = BoxFaces::NO_BOTTOM;
        // Wall pieces abut face to face; drop faces another piece covers.
        let touches = |a: &Aabb, b: &Aabb, axis: usize, hi: bool| {
            let v = if hi { a.max[axis] } else { a.min[axis] };
            let o = if hi { b.min[axis] } else { b.max[axis] };
            let other = (axis + 1) % 2;
            (v - o).abs() < 1e-9 && b.min[other] <= a.min[other] && b.max[other] >= a.max[other]
        };
        for o in &solids {
            if std::ptr::eq(s, o) {
                continue;
            }
            faces.neg_x &= !touches(s, o, 0, false);
            faces.pos_x &= !touches(s, o, 0, true);
            faces.neg_y &= !touches(s, o, 1, false);
            faces.pos_y &= !touches(s, o, 1, true);
        }
        b.axis_box(s, faces, true, 1.0 / refine.max(1) as f64);
    }
    b.build()
}

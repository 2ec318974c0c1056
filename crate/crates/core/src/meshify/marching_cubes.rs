use super::tables::TRI_TABLE;
use super::VoxelGrid;
use crate::geometry::{Point3, TriangleMesh};
use std::collections::HashMap;

// Cube corners in table order, as (di, dj, dk) offsets.
const CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

// Cube edges as corner pairs, in table order.
const EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [1, 2],
    [3, 2],
    [0, 3],
    [4, 5],
    [5, 6],
    [7, 6],
    [4, 7],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

/// Extracts the `iso` level set of `grid` as a welded triangle mesh.
///
/// Cells with any unknown corner emit nothing. Vertices sit at the linear
/// interpolation of the field along each crossing edge and are shared by every
/// cell touching that edge. Faces are wound so their normals point toward
/// increasing field values.
pub fn marching_cubes(grid: &VoxelGrid, iso: f64) -> TriangleMesh {
    let [cx, cy, cz] = grid.dims;
    let mut vertices: Vec<Point3> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    // (lower node index, axis) -> vertex id
    let mut edge_vertex: HashMap<(usize, u8), u32> = HashMap::new();

    for k in 0..cz {
        for j in 0..cy {
            for i in 0..cx {
                let mut nodes = [0usize; 8];
                let mut case = 0usize;
                let mut all_known = true;
                for (c, off) in CORNERS.iter().enumerate() {
                    let n = grid.node_index(i + off[0], j + off[1], k + off[2]);
                    nodes[c] = n;
                    all_known &= grid.known[n];
                    if grid.values[n] < iso {
                        case |= 1 << c;
                    }
                }
                if !all_known || case == 0 || case == 255 {
                    continue;
                }
                let row = &TRI_TABLE[case];
                let mut e = 0;
                while e < 16 && row[e] >= 0 {
                    let mut tri = [0u32; 3];
                    for (slot, &edge) in row[e..e + 3].iter().enumerate() {
                        let [lo_c, hi_c] = EDGES[edge as usize];
                        let axis = (0..3)
                            .find(|&a| CORNERS[lo_c][a] != CORNERS[hi_c][a])
                            .unwrap() as u8;
                        let (na, nb) = (nodes[lo_c], nodes[hi_c]);
                        tri[slot] = *edge_vertex.entry((na, axis)).or_insert_with(|| {
                            let (va, vb) = (grid.values[na], grid.values[nb]);
                            let t = if vb != va { (iso - va) / (vb - va) } else { 0.5 };
                            let pa = grid.node_position_linear(na);
                            let pb = grid.node_position_linear(nb);
                            vertices.push(pa + (pb - pa) * t);
                            (vertices.len() - 1) as u32
                        });
                    }
                    // Table winding faces the low side; reverse it.
                    triangles.push([tri[0], tri[2], tri[1]]);
                    e += 3;
                }
            }
        }
    }
    TriangleMesh::new(vertices, triangles).expect("marching cubes emits valid indices")
}

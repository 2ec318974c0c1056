use super::TriangleMesh;
use std::collections::HashMap;

/// Edge-incidence and connectivity summary of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyReport {
    pub boundary_edges: usize,
    pub non_manifold_edges: usize,
    pub components: usize,
    pub total_area: f64,
}

impl TopologyReport {
    pub fn is_watertight(&self) -> bool {
        self.boundary_edges == 0 && self.non_manifold_edges == 0
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] || (self.size[a] == self.size[b] && b < a) {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Per-triangle component label; triangles sharing a vertex are connected.
/// Labels are dense and numbered in order of first appearance.
pub(crate) fn triangle_components(mesh: &TriangleMesh) -> (Vec<usize>, usize) {
    let mut uf = UnionFind::new(mesh.vertices().len());
    for &[a, b, c] in mesh.triangles() {
        uf.union(a as usize, b as usize);
        uf.union(a as usize, c as usize);
    }
    let mut label_of_root = HashMap::new();
    let labels = mesh
        .triangles()
        .iter()
        .map(|t| {
            let root = uf.find(t[0] as usize);
            let next = label_of_root.len();
            *label_of_root.entry(root).or_insert(next)
        })
        .collect();
    (labels, label_of_root.len())
}

pub fn mesh_topology_report(mesh: &TriangleMesh) -> TopologyReport {
    let mut edges: HashMap<(u32, u32), u32> = HashMap::with_capacity(mesh.triangle_count() * 2);
    for &[a, b, c] in mesh.triangles() {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            *edges.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        }
    }
    let boundary_edges = edges.values().filter(|&&n| n == 1).count();
    let non_manifold_edges = edges.values().filter(|&&n| n > 2).count();
    let (_, components) = triangle_components(mesh);
    TopologyReport {
        boundary_edges,
        non_manifold_edges,
        components,
        total_area: mesh.total_area(),
    }
}

use super::MeshifyError;
use crate::geometry::topology::triangle_components;
use crate::geometry::{TriangleMesh, DEGENERATE_AREA};

/// Drops degenerate faces, then every vertex-connected component whose area
/// is below `min_component_area`. Surviving vertices keep their relative
/// order, so a mesh with nothing to remove comes back unchanged.
pub fn clean_mesh(mesh: &TriangleMesh, min_component_area: f64) -> Result<TriangleMesh, MeshifyError> {
    let kept: Vec<usize> = (0..mesh.triangle_count())
        .filter(|&t| mesh.area(t) > DEGENERATE_AREA)
        .collect();
    let stage = subset(mesh, &kept);
    let (labels, count) = triangle_components(&stage);
    let mut area = vec![0.0; count];
    for (t, &l) in labels.iter().enumerate() {
        area[l] += stage.area(t);
    }
    let kept: Vec<usize> = (0..stage.triangle_count())
        .filter(|&t| area[labels[t]] >= min_component_area)
        .collect();
    let out = subset(&stage, &kept);
    if out.is_empty() {
        return Err(MeshifyError::AllRemoved);
    }
    Ok(out)
}

fn subset(mesh: &TriangleMesh, tris: &[usize]) -> TriangleMesh {
    let n = mesh.vertices().len();
    let mut used = vec![false; n];
    for &t in tris {
        for &v in &mesh.triangles()[t] {
            used[v as usize] = true;
        }
    }
    let mut remap = vec![u32::MAX; n];
    let mut vertices = Vec::new();
    for (i, p) in mesh.vertices().iter().enumerate() {
        if used[i] {
            remap[i] = vertices.len() as u32;
            vertices.push(*p);
        }
    }
    let triangles = tris
        .iter()
        .map(|&t| mesh.triangles()[t].map(|v| remap[v as usize]))
        .collect();
    TriangleMesh::new(vertices, triangles).expect("remapped indices are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::scenes::uv_sphere;

    #[test]
    fn watertight_mesh_unchanged() {
        let s = uv_sphere(Point3::origin(), 1.0, 10, 20);
        assert_eq!(clean_mesh(&s, 0.01).unwrap(), s);
    }

    #[test]
    fn only_degenerate_is_all_removed() {
        let p = Point3::new(1.0, 1.0, 1.0);
        let m = TriangleMesh::new(vec![p, p, p], vec![[0, 1, 2], [2, 1, 0]]).unwrap();
        assert_eq!(clean_mesh(&m, 0.0).unwrap_err(), MeshifyError::AllRemoved);
    }

    #[test]
    fn degenerate_faces_removed_from_component() {
        let mut m = uv_sphere(Point3::origin(), 1.0, 6, 8);
        let (mut v, mut t) = m.clone().into_parts();
        v.push(Point3::new(5.0, 5.0, 5.0));
        let last = (v.len() - 1) as u32;
        t.push([last, last, 0]);
        m = TriangleMesh::new(v, t).unwrap();
        let out = clean_mesh(&m, 0.0).unwrap();
        assert_eq!(out.triangle_count(), m.triangle_count() - 1);
        assert_eq!(out.vertices().len(), m.vertices().len() - 1);
    }
}

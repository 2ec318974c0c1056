use super::MeshifyError;
use crate::geometry::{Dir3, PointCloud, PointIndex, Vec3};
use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;

/// Per-point normals from the covariance of each point's `k` nearest
/// neighbours (itself included). The eigenvector of the smallest eigenvalue
/// is flipped toward the recorded scan origin, or away from the cloud
/// centroid when no origins exist.
pub fn estimate_normals(cloud: &PointCloud, k: usize) -> Result<PointCloud, MeshifyError> {
    if k < 3 {
        return Err(MeshifyError::InvalidParameter(format!("normal k must be >= 3, got {k}")));
    }
    if cloud.len() < k {
        return Err(MeshifyError::TooFewPoints {
            needed: k,
            got: cloud.len(),
        });
    }
    let points = cloud.points();
    let index = PointIndex::new(points).map_err(|_| MeshifyError::EmptyCloud)?;
    let centroid = cloud.centroid().ok_or(MeshifyError::EmptyCloud)?;
    let origins = cloud.origins();

    let normals: Vec<Dir3> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let nbrs = index.knn(&points[i], k);
            let mean = nbrs
                .iter()
                .fold(Vec3::zeros(), |acc, &(j, _)| acc + points[j].coords)
                / nbrs.len() as f64;
            let mut cov = Matrix3::zeros();
            for &(j, _) in &nbrs {
                let d = points[j].coords - mean;
                cov += d * d.transpose();
            }
            let eig = SymmetricEigen::new(cov);
            let smallest = eig.eigenvalues.imin();
            let mut n: Vec3 = eig.eigenvectors.column(smallest).into_owned();
            let n_len = n.norm();
            if !(n_len.is_finite() && n_len > 0.0) {
                n = Vec3::z();
            } else {
                n /= n_len;
            }
            let toward = match origins {
                Some(o) => o[i] - points[i],
                None => points[i] - centroid,
            };
            if n.dot(&toward) < 0.0 {
                n = -n;
            }
            Dir3::new_unchecked(n)
        })
        .collect();
    Ok(cloud
        .clone()
        .with_normals(normals)
        .expect("one normal per point"))
}

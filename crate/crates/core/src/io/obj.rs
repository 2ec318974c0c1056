use super::IoError;
use crate::geometry::{Point3, TriangleMesh};

fn vertex_ref(tok: &str, count: usize, line: usize) -> Result<u32, IoError> {
    let head = tok.split('/').next().unwrap_or("");
    let i: i64 = head
        .parse()
        .map_err(|_| IoError::parse(format!("line {line}"), format!("bad face index `{tok}`")))?;
    let resolved = match i {
        0 => None,
        i if i > 0 => Some(i - 1),
        i => Some(count as i64 + i),
    };
    match resolved {
        Some(r) if r >= 0 && (r as usize) < count => Ok(r as u32),
        _ => Err(IoError::parse(
            format!("line {line}"),
            format!("face index {i} outside 1..={count}"),
        )),
    }
}

/// Reads vertex positions and faces from Wavefront OBJ text. Polygons are
/// split into triangle fans; texture, normal, group and material records
/// are skipped.
pub fn parse_obj(text: &str) -> Result<TriangleMesh, IoError> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        let mut words = body.split_whitespace();
        let Some(tag) = words.next() else { continue };
        match tag {
            "v" => {
                let c: Vec<f64> = words
                    .take(3)
                    .map(|w| w.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| IoError::parse(format!("line {line}"), "bad vertex coordinate"))?;
                if c.len() != 3 {
                    return Err(IoError::parse(format!("line {line}"), "vertex needs 3 coordinates"));
                }
                vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            "f" => {
                let idx = words
                    .map(|w| vertex_ref(w, vertices.len(), line))
                    .collect::<Result<Vec<_>, _>>()?;
                if idx.len() < 3 {
                    return Err(IoError::parse(format!("line {line}"), "face needs at least 3 vertices"));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            "vt" | "vn" | "vp" | "g" | "o" | "s" | "usemtl" | "mtllib" => {}
            other => {
                return Err(IoError::UnsupportedFeature(format!(
                    "OBJ record `{other}` at line {line}"
                )))
            }
        }
    }
    Ok(TriangleMesh::new(vertices, triangles)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_becomes_two_triangles() {
        let m = parse_obj("# quad\nv 0 0 0\nv 3 0 0\nv 3 2 0\nv 0 2 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n").unwrap();
        assert_eq!(m.triangle_count(), 2);
        assert!((m.total_area() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn negative_indices() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n").unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_obj("v 0 0 0\nv 1 0 0\nf 1 2 9\n").unwrap_err();
        assert!(matches!(&e, IoError::Parse { location, .. } if location == "line 3"), "{e}");
        assert!(matches!(parse_obj("l 1 2\n"), Err(IoError::UnsupportedFeature(_))));
    }
}

use super::{write_atomic, Geometry, IoError};
use crate::geometry::{direction, Point3, PointCloud, TriangleMesh, Vec3};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyEncoding {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Scalar> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar(String, Scalar),
    List(String, Scalar, Scalar),
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
}

/// Pulls values out of the body one at a time, in either encoding.
enum Body<'a> {
    Ascii {
        tokens: Vec<(usize, &'a str)>,
        pos: usize,
    },
    Binary {
        bytes: &'a [u8],
        pos: usize,
        base: usize,
    },
}

impl Body<'_> {
    fn next(&mut self, ty: Scalar) -> Result<f64, IoError> {
        match self {
            Body::Ascii { tokens, pos } => {
                let Some(&(line, tok)) = tokens.get(*pos) else {
                    let line = tokens.last().map_or(0, |t| t.0);
                    return Err(IoError::parse(format!("line {line}"), "unexpected end of data"));
                };
                *pos += 1;
                tok.parse::<f64>()
                    .map_err(|_| IoError::parse(format!("line {line}"), format!("bad number `{tok}`")))
            }
            Body::Binary { bytes, pos, base } => {
                let n = ty.size();
                if *pos + n > bytes.len() {
                    return Err(IoError::parse(
                        format!("byte {}", *base + *pos),
                        "unexpected end of data",
                    ));
                }
                let v = ty.read_le(&bytes[*pos..*pos + n]);
                *pos += n;
                Ok(v)
            }
        }
    }
}

fn parse_header(bytes: &[u8]) -> Result<(PlyEncoding, Vec<Element>, usize, usize), IoError> {
    let mut elements: Vec<Element> = Vec::new();
    let mut encoding = None;
    let mut offset = 0;
    let mut line_no = 0;
    loop {
        let rest = &bytes[offset..];
        let Some(nl) = rest.iter().position(|&b| b == b'\n') else {
            return Err(IoError::parse(format!("line {}", line_no + 1), "header not terminated"));
        };
        line_no += 1;
        let line = std::str::from_utf8(&rest[..nl])
            .map_err(|_| IoError::parse(format!("line {line_no}"), "header is not text"))?
            .trim_end_matches('\r')
            .trim();
        offset += nl + 1;
        let loc = format!("line {line_no}");
        let words: Vec<&str> = line.split_whitespace().collect();
        if line_no == 1 {
            if line != "ply" {
                return Err(IoError::parse(loc, "missing `ply` magic"));
            }
            continue;
        }
        match words.as_slice() {
            [] | ["comment", ..] | ["obj_info", ..] => {}
            ["format", fmt, _] => {
                encoding = Some(match *fmt {
                    "ascii" => PlyEncoding::Ascii,
                    "binary_little_endian" => PlyEncoding::BinaryLittleEndian,
                    other => return Err(IoError::UnsupportedFeature(format!("PLY format {other}"))),
                })
            }
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| IoError::parse(loc, format!("bad element count `{count}`")))?,
                props: Vec::new(),
            }),
            ["property", "list", cty, ity, name] => {
                let (Some(c), Some(i)) = (Scalar::parse(cty), Scalar::parse(ity)) else {
                    return Err(IoError::parse(loc, "unknown list property type"));
                };
                elements
                    .last_mut()
                    .ok_or_else(|| IoError::parse(loc.clone(), "property before element"))?
                    .props
                    .push(Property::List(name.to_string(), c, i));
            }
            ["property", ty, name] => {
                let t = Scalar::parse(ty).ok_or_else(|| IoError::parse(loc.clone(), format!("unknown type `{ty}`")))?;
                elements
                    .last_mut()
                    .ok_or_else(|| IoError::parse(loc.clone(), "property before element"))?
                    .props
                    .push(Property::Scalar(name.to_string(), t));
            }
            ["end_header"] => break,
            _ => return Err(IoError::parse(loc, format!("unrecognised header line `{line}`"))),
        }
    }
    let encoding = encoding.ok_or_else(|| IoError::parse("header", "missing format line"))?;
    Ok((encoding, elements, offset, line_no))
}

/// Decodes an ascii or binary little-endian PLY file.
///
/// Vertices need `x y z` and may carry `nx ny nz` and `origin_x origin_y
/// origin_z`; other properties are read and ignored. A non-empty face element
/// (`vertex_indices` or `vertex_index`) makes the result a mesh, with
/// polygons split into triangle fans.
pub fn parse_ply(bytes: &[u8]) -> Result<Geometry, IoError> {
    let (encoding, elements, body_start, header_lines) = parse_header(bytes)?;
    let body_bytes = &bytes[body_start..];
    let mut body = match encoding {
        PlyEncoding::Ascii => {
            let text = std::str::from_utf8(body_bytes)
                .map_err(|e| IoError::parse(format!("byte {}", body_start + e.valid_up_to()), "invalid text"))?;
            let tokens = text
                .lines()
                .enumerate()
                .flat_map(|(i, l)| l.split_whitespace().map(move |t| (header_lines + i + 1, t)))
                .collect();
            Body::Ascii { tokens, pos: 0 }
        }
        PlyEncoding::BinaryLittleEndian => Body::Binary {
            bytes: body_bytes,
            pos: 0,
            base: body_start,
        },
    };

    let mut points = Vec::new();
    let mut normals: Option<Vec<Vec3>> = None;
    let mut origins: Option<Vec<Point3>> = None;
    let mut faces: Vec<[u32; 3]> = Vec::new();
    let mut saw_faces = false;

    for el in &elements {
        let col = |n: &str| {
            el.props
                .iter()
                .position(|p| matches!(p, Property::Scalar(name, _) if name == n))
        };
        let is_vertex = el.name == "vertex";
        let xyz = [col("x"), col("y"), col("z")];
        let nrm = [col("nx"), col("ny"), col("nz")];
        let org = [col("origin_x"), col("origin_y"), col("origin_z")];
        if is_vertex {
            if xyz.iter().any(Option::is_none) {
                return Err(IoError::parse("header", "vertex element lacks x, y or z"));
            }
            if nrm.iter().all(Option::is_some) {
                normals = Some(Vec::with_capacity(el.count));
            }
            if org.iter().all(Option::is_some) {
                origins = Some(Vec::with_capacity(el.count));
            }
            points.reserve(el.count);
        }
        let is_face = el.name == "face";
        saw_faces |= is_face && el.count > 0;
        let mut scalars = vec![0.0; el.props.len()];
        for _ in 0..el.count {
            for (pi, prop) in el.props.iter().enumerate() {
                match prop {
                    Property::Scalar(_, ty) => scalars[pi] = body.next(*ty)?,
                    Property::List(name, cty, ity) => {
                        let n = body.next(*cty)? as usize;
                        let mut idx = Vec::with_capacity(n);
                        for _ in 0..n {
                            idx.push(body.next(*ity)?);
                        }
                        if is_face && (name == "vertex_indices" || name == "vertex_index") {
                            if let Some(bad) = idx.iter().find(|v| **v < 0.0) {
                                return Err(IoError::parse("face list", format!("negative index {bad}")));
                            }
                            for k in 1..n.saturating_sub(1) {
                                faces.push([idx[0] as u32, idx[k] as u32, idx[k + 1] as u32]);
                            }
                        }
                    }
                }
            }
            if is_vertex {
                let g = |c: [Option<usize>; 3]| Vec3::new(scalars[c[0].unwrap()], scalars[c[1].unwrap()], scalars[c[2].unwrap()]);
                points.push(Point3::from(g(xyz)));
                if let Some(n) = normals.as_mut() {
                    n.push(g(nrm));
                }
                if let Some(o) = origins.as_mut() {
                    o.push(Point3::from(g(org)));
                }
            }
        }
    }

    if saw_faces {
        return Ok(Geometry::Mesh(TriangleMesh::new(points, faces)?));
    }
    let mut cloud = PointCloud::new(points)?;
    if let Some(ns) = normals {
        let dirs = ns
            .iter()
            .enumerate()
            .map(|(i, n)| direction(*n).ok_or_else(|| IoError::parse(format!("vertex {i}"), "zero normal")))
            .collect::<Result<Vec<_>, _>>()?;
        cloud = cloud.with_normals(dirs)?;
    }
    if let Some(os) = origins {
        cloud = cloud.with_origins(os)?;
    }
    Ok(Geometry::Cloud(cloud))
}

fn header(encoding: PlyEncoding, vertex_count: usize, props: &[&str], face_count: Option<usize>) -> String {
    let mut h = String::from("ply\n");
    h += match encoding {
        PlyEncoding::Ascii => "format ascii 1.0\n",
        PlyEncoding::BinaryLittleEndian => "format binary_little_endian 1.0\n",
    };
    let _ = writeln!(h, "element vertex {vertex_count}");
    for p in props {
        let ty = if matches!(*p, "red" | "green" | "blue") { "uchar" } else { "double" };
        let _ = writeln!(h, "property {ty} {p}");
    }
    if let Some(f) = face_count {
        let _ = writeln!(h, "element face {f}");
        h += "property list uchar int vertex_indices\n";
    }
    h += "end_header\n";
    h
}

/// Encodes a cloud with whatever attributes it carries, plus optional
/// per-point RGB. Coordinates are written as doubles.
pub fn cloud_ply_bytes(cloud: &PointCloud, colors: Option<&[[u8; 3]]>, encoding: PlyEncoding) -> Vec<u8> {
    let mut props = vec!["x", "y", "z"];
    if cloud.normals().is_some() {
        props.extend(["nx", "ny", "nz"]);
    }
    if cloud.origins().is_some() {
        props.extend(["origin_x", "origin_y", "origin_z"]);
    }
    if colors.is_some() {
        props.extend(["red", "green", "blue"]);
    }
    let mut out = header(encoding, cloud.len(), &props, None).into_bytes();
    let mut line = String::new();
    for i in 0..cloud.len() {
        let mut vals: Vec<f64> = cloud.points()[i].iter().copied().collect();
        if let Some(n) = cloud.normals() {
            vals.extend(n[i].iter());
        }
        if let Some(o) = cloud.origins() {
            vals.extend(o[i].iter());
        }
        let rgb = colors.map(|c| c[i]);
        match encoding {
            PlyEncoding::Ascii => {
                line.clear();
                for v in &vals {
                    let _ = write!(line, "{v} ");
                }
                if let Some(c) = rgb {
                    let _ = write!(line, "{} {} {} ", c[0], c[1], c[2]);
                }
                line.pop();
                line.push('\n');
                out.extend_from_slice(line.as_bytes());
            }
            PlyEncoding::BinaryLittleEndian => {
                vals.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes()));
                if let Some(c) = rgb {
                    out.extend_from_slice(&c);
                }
            }
        }
    }
    out
}

pub fn mesh_ply_bytes(mesh: &TriangleMesh, encoding: PlyEncoding) -> Vec<u8> {
    let mut out = header(encoding, mesh.vertices().len(), &["x", "y", "z"], Some(mesh.triangle_count())).into_bytes();
    match encoding {
        PlyEncoding::Ascii => {
            let mut s = String::new();
            for v in mesh.vertices() {
                let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
            }
            for t in mesh.triangles() {
                let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
            }
            out.extend_from_slice(s.as_bytes());
        }
        PlyEncoding::BinaryLittleEndian => {
            for v in mesh.vertices() {
                v.iter().for_each(|c| out.extend_from_slice(&c.to_le_bytes()));
            }
            for t in mesh.triangles() {
                out.push(3);
                t.iter().for_each(|i| out.extend_from_slice(&(*i as i32).to_le_bytes()));
            }
        }
    }
    out
}

pub fn write_cloud_ply(
    path: &Path,
    cloud: &PointCloud,
    colors: Option<&[[u8; 3]]>,
    encoding: PlyEncoding,
) -> Result<(), IoError> {
    write_atomic(path, &cloud_ply_bytes(cloud, colors, encoding))
}

pub fn write_mesh_ply(path: &Path, mesh: &TriangleMesh, encoding: PlyEncoding) -> Result<(), IoError> {
    write_atomic(path, &mesh_ply_bytes(mesh, encoding))
}

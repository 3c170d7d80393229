//! Meshes sampled from surface patches, half-space clipping and export to
//! OBJ, binary PLY and CSV.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bjorling::{cross, dot, norm, phi, surface_patch_of, GridSpec};
use crate::curves::PlanarCurve;
use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Face {
    Tri([usize; 3]),
    Quad([usize; 4]),
}

impl Face {
    pub fn indices(&self) -> &[usize] {
        match self {
            Face::Tri(f) => f,
            Face::Quad(f) => f,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Face>,
    /// Metric density `¼(1 + |g|²)²|η|²` per vertex.
    pub density: Vec<f64>,
    /// `|g|` per vertex.
    pub g_abs: Vec<f64>,
    /// Vertices on the geodesic `s = 0`, in order of increasing `t`.
    pub geodesic: Vec<usize>,
}

impl SurfaceMesh {
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.density.len() != n || self.g_abs.len() != n {
            return Err(Error::InvalidParameter("attribute length differs from vertex count".into()));
        }
        if self.vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("mesh has non-finite coordinates".into()));
        }
        for f in &self.faces {
            if f.indices().iter().any(|&i| i >= n) {
                return Err(Error::InvalidParameter("face index out of range".into()));
            }
        }
        if self.geodesic.iter().any(|&i| i >= n) {
            return Err(Error::InvalidParameter("geodesic index out of range".into()));
        }
        Ok(())
    }

    /// Sum of triangle areas, quads split along their first diagonal.
    pub fn area(&self) -> f64 {
        let tri = |a: usize, b: usize, c: usize| {
            let p = self.vertices[a];
            let u = sub(self.vertices[b], p);
            let v = sub(self.vertices[c], p);
            0.5 * norm(cross(u, v))
        };
        self.faces
            .iter()
            .map(|f| match *f {
                Face::Tri([a, b, c]) => tri(a, b, c),
                Face::Quad([a, b, c, d]) => tri(a, b, c) + tri(a, c, d),
            })
            .sum()
    }

    pub fn bounding_box(&self) -> Option<([f64; 3], [f64; 3])> {
        let first = *self.vertices.first()?;
        let mut lo = first;
        let mut hi = first;
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        Some((lo, hi))
    }

    /// Faces split into triangles (fan from the first corner).
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::with_capacity(2 * self.faces.len());
        for f in &self.faces {
            let ix = f.indices();
            for j in 1..ix.len() - 1 {
                out.push([ix[0], ix[j], ix[j + 1]]);
            }
        }
        out
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn lerp(a: [f64; 3], b: [f64; 3], u: f64) -> [f64; 3] {
    [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]), a[2] + u * (b[2] - a[2])]
}

/// Quad mesh over the grid with density and `|g|` attached. Vertex
/// `l * nt + j` sits at `t_j + i s_l`.
pub fn sample_mesh(curve: &PlanarCurve, grid: GridSpec, strategy: Strategy) -> Result<SurfaceMesh> {
    let triple = phi(curve)?;
    let patch = surface_patch_of(&triple, grid, strategy)?;
    let (nt, ns) = (grid.nt, grid.ns);
    let rows = try_map_indexed(strategy, ns, |l| {
        let mut out = Vec::with_capacity(nt);
        for j in 0..nt {
            let p = triple.eval(Complex64::new(patch.t[j], patch.s[l]))?;
            let eta = p[0] - Complex64::i() * p[1];
            let sum = p[0].norm_sqr() + p[1].norm_sqr() + p[2].norm_sqr();
            out.push((0.5 * sum, p[2].norm() / eta.norm()));
        }
        Ok::<_, Error>(out)
    })?;
    let mut density = Vec::with_capacity(nt * ns);
    let mut g_abs = Vec::with_capacity(nt * ns);
    for (d, g) in rows.into_iter().flatten() {
        density.push(d);
        g_abs.push(g);
    }
    let mut faces = Vec::with_capacity((nt - 1) * (ns - 1));
    for l in 0..ns - 1 {
        for j in 0..nt - 1 {
            let a = l * nt + j;
            faces.push(Face::Quad([a, a + 1, a + nt + 1, a + nt]));
        }
    }
    let geodesic = match patch.geodesic_row() {
        Some(l) => (0..nt).map(|j| l * nt + j).collect(),
        None => Vec::new(),
    };
    Ok(SurfaceMesh {
        vertices: patch.points,
        faces,
        density,
        g_abs,
        geodesic,
    })
}

/// Keep the part of the mesh with `normal · x >= offset`. Faces crossing the
/// plane are clipped and fan-triangulated; unused vertices are dropped.
pub fn clip_halfspace(mesh: &SurfaceMesh, normal: [f64; 3], offset: f64) -> SurfaceMesh {
    let side: Vec<f64> = mesh.vertices.iter().map(|&v| dot(normal, v) - offset).collect();
    let mut vertices = mesh.vertices.clone();
    let mut density = mesh.density.clone();
    let mut g_abs = mesh.g_abs.clone();
    let mut cut: HashMap<(usize, usize), usize> = HashMap::new();
    let mut faces = Vec::new();

    for face in &mesh.faces {
        let ix = face.indices();
        if ix.iter().all(|&i| side[i] >= 0.0) {
            faces.push(*face);
            continue;
        }
        if ix.iter().all(|&i| side[i] < 0.0) {
            continue;
        }
        // Sutherland–Hodgman against a single plane.
        let mut poly = Vec::with_capacity(ix.len() + 2);
        for q in 0..ix.len() {
            let a = ix[q];
            let b = ix[(q + 1) % ix.len()];
            let (da, db) = (side[a], side[b]);
            if da >= 0.0 {
                poly.push(a);
            }
            if (da >= 0.0) != (db >= 0.0) {
                let key = (a.min(b), a.max(b));
                let idx = *cut.entry(key).or_insert_with(|| {
                    let (lo, hi) = key;
                    let u = side[lo] / (side[lo] - side[hi]);
                    vertices.push(lerp(mesh.vertices[lo], mesh.vertices[hi], u));
                    density.push(mesh.density[lo] + u * (mesh.density[hi] - mesh.density[lo]));
                    g_abs.push(mesh.g_abs[lo] + u * (mesh.g_abs[hi] - mesh.g_abs[lo]));
                    vertices.len() - 1
                });
                if poly.last() != Some(&idx) {
                    poly.push(idx);
                }
            }
        }
        for j in 1..poly.len().saturating_sub(1) {
            faces.push(Face::Tri([poly[0], poly[j], poly[j + 1]]));
        }
    }

    // Compact in order of first appearance in the original numbering.
    let mut used = vec![false; vertices.len()];
    for f in &faces {
        for &i in f.indices() {
            used[i] = true;
        }
    }
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut out = SurfaceMesh::default();
    for i in 0..vertices.len() {
        if used[i] {
            remap[i] = out.vertices.len();
            out.vertices.push(vertices[i]);
            out.density.push(density[i]);
            out.g_abs.push(g_abs[i]);
        }
    }
    out.faces = faces
        .into_iter()
        .map(|f| match f {
            Face::Tri(t) => Face::Tri(t.map(|i| remap[i])),
            Face::Quad(q) => Face::Quad(q.map(|i| remap[i])),
        })
        .collect();
    out.geodesic = mesh
        .geodesic
        .iter()
        .filter(|&&i| used[i])
        .map(|&i| remap[i])
        .collect();
    out
}

pub fn write_obj<W: Write>(mesh: &SurfaceMesh, mut out: W) -> std::io::Result<()> {
    for v in &mesh.vertices {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
    }
    for f in &mesh.faces {
        write!(out, "f")?;
        for i in f.indices() {
            write!(out, " {}", i + 1)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_ply<W: Write>(mesh: &SurfaceMesh, mut out: W) -> std::io::Result<()> {
    let tris = mesh.triangles();
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n\
         property double x\nproperty double y\nproperty double z\n\
         property double density\nproperty double g_abs\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        tris.len()
    )?;
    for (i, v) in mesh.vertices.iter().enumerate() {
        for x in [v[0], v[1], v[2], mesh.density[i], mesh.g_abs[i]] {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    for t in tris {
        out.write_all(&[3u8])?;
        for i in t {
            let i = i32::try_from(i).map_err(|_| std::io::Error::other("vertex index exceeds i32"))?;
            out.write_all(&i.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(mesh: &SurfaceMesh, mut out: W) -> std::io::Result<()> {
    let mut on_geodesic = vec![false; mesh.vertices.len()];
    for &i in &mesh.geodesic {
        on_geodesic[i] = true;
    }
    writeln!(out, "index,x,y,z,density,g_abs,geodesic")?;
    for (i, v) in mesh.vertices.iter().enumerate() {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            i, v[0], v[1], v[2], mesh.density[i], mesh.g_abs[i], on_geodesic[i] as u8
        )?;
    }
    Ok(())
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn export_obj(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), |w| write_obj(mesh, w))
}

pub fn export_ply(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), |w| write_ply(mesh, w))
}

pub fn export_csv(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), |w| write_csv(mesh, w))
}

/// Vertex positions and 0-based face index lists.
pub type ObjData = (Vec<[f64; 3]>, Vec<Vec<usize>>);

/// Vertices and faces of an OBJ file (only `v` and `f` records).
pub fn read_obj(path: impl AsRef<Path>) -> Result<ObjData> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let mut parts = line.split_whitespace();
        let bad = || Error::Parse(format!("{}:{}: malformed record", path.display(), n + 1));
        match parts.next() {
            Some("v") => {
                let mut v = [0.0; 3];
                for x in v.iter_mut() {
                    *x = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                }
                vertices.push(v);
            }
            Some("f") => {
                let face = parts
                    .map(|p| {
                        let idx: usize = p.split('/').next().unwrap_or("").parse().map_err(|_| bad())?;
                        idx.checked_sub(1).ok_or_else(bad)
                    })
                    .collect::<Result<Vec<_>>>()?;
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

//! Mesh export and import (OBJ, ASCII PLY) and numeric CSV tables.

use crate::error::{Error, Result};
use crate::patch::Patch;
use crate::solver::DiscreteGraph;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Triangle mesh in model coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Ply => "ply",
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("obj") => Ok(MeshFormat::Obj),
            Some(e) if e.eq_ignore_ascii_case("ply") => Ok(MeshFormat::Ply),
            _ => Err(Error::Invalid(format!("unknown mesh format for {}", path.display()))),
        }
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// The section as a mesh over its nodes, faces oriented as in the mesh.
pub fn graph_mesh(graph: &DiscreteGraph) -> SurfaceMesh {
    SurfaceMesh {
        vertices: (0..graph.mesh.len())
            .map(|i| {
                let p = graph.point(i);
                [p.x, p.y, p.z]
            })
            .collect(),
        faces: graph.mesh.triangles.clone(),
    }
}

/// Sample a patch on a `nu × nv` parameter grid, two triangles per cell.
pub fn patch_mesh(patch: &dyn Patch, nu: usize, nv: usize) -> Result<SurfaceMesh> {
    if nu < 2 || nv < 2 {
        return Err(Error::Invalid(format!("grid {nu} x {nv} needs at least 2 x 2 samples")));
    }
    let ([u0, u1], [v0, v1]) = patch.domain();
    let mut vertices = Vec::with_capacity(nu * nv);
    for j in 0..nv {
        let v = v0 + (v1 - v0) * j as f64 / (nv - 1) as f64;
        for i in 0..nu {
            let u = u0 + (u1 - u0) * i as f64 / (nu - 1) as f64;
            let p = patch.point(u, v);
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(Error::Numerical(format!("patch is not finite at ({u}, {v})")));
            }
            vertices.push([p.x, p.y, p.z]);
        }
    }
    let mut faces = Vec::with_capacity(2 * (nu - 1) * (nv - 1));
    for j in 0..nv - 1 {
        for i in 0..nu - 1 {
            let a = j * nu + i;
            let b = a + 1;
            let c = a + nu;
            let d = c + 1;
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    Ok(SurfaceMesh { vertices, faces })
}

impl SurfaceMesh {
    fn check(&self) -> Result<()> {
        let n = self.vertices.len();
        if let Some(f) = self.faces.iter().find(|f| f.iter().any(|&i| i >= n)) {
            return Err(Error::Invalid(format!("face {f:?} refers past {n} vertices")));
        }
        if self.vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("mesh has non-finite vertices".into()));
        }
        Ok(())
    }

    pub fn to_obj(&self) -> Result<String> {
        self.check()?;
        let mut s = String::new();
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", format_float(v[0]), format_float(v[1]), format_float(v[2]));
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        Ok(s)
    }

    pub fn from_obj(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => vertices.push(parse_triple(it, n, |t| t.parse::<f64>().ok())?),
                Some("f") => {
                    // accept `i`, `i/t` and `i/t/n` references, 1-based
                    let idx = parse_triple(it, n, |t| {
                        t.split('/').next()?.parse::<usize>().ok().filter(|&i| i > 0).map(|i| i - 1)
                    })?;
                    faces.push(idx);
                }
                _ => {}
            }
        }
        let mesh = SurfaceMesh { vertices, faces };
        mesh.check()?;
        Ok(mesh)
    }

    pub fn to_ply(&self) -> Result<String> {
        self.check()?;
        let mut s = String::new();
        let _ = writeln!(s, "ply\nformat ascii 1.0");
        let _ = writeln!(s, "element vertex {}", self.vertices.len());
        let _ = writeln!(s, "property double x\nproperty double y\nproperty double z");
        let _ = writeln!(s, "element face {}", self.faces.len());
        let _ = writeln!(s, "property list uchar int vertex_indices\nend_header");
        for v in &self.vertices {
            let _ = writeln!(s, "{} {} {}", format_float(v[0]), format_float(v[1]), format_float(v[2]));
        }
        for f in &self.faces {
            let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
        }
        Ok(s)
    }

    pub fn from_ply(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let bad = |n: usize, what: &str| Error::Invalid(format!("ply line {}: {what}", n + 1));
        match lines.next() {
            Some((_, "ply")) => {}
            _ => return Err(bad(0, "missing magic")),
        }
        let (mut nv, mut nf) = (None, None);
        loop {
            let (n, line) = lines.next().ok_or_else(|| bad(0, "missing end_header"))?;
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok.as_slice() {
                ["end_header"] => break,
                ["format", f, ..] if *f != "ascii" => return Err(bad(n, "only ascii ply is read")),
                ["element", "vertex", c] => nv = Some(c.parse::<usize>().map_err(|_| bad(n, "vertex count"))?),
                ["element", "face", c] => nf = Some(c.parse::<usize>().map_err(|_| bad(n, "face count"))?),
                _ => {}
            }
        }
        let (nv, nf) = (nv.ok_or_else(|| bad(0, "no vertex element"))?, nf.unwrap_or(0));
        let mut vertices = Vec::with_capacity(nv);
        let mut faces = Vec::with_capacity(nf);
        for _ in 0..nv {
            let (n, line) = lines.next().ok_or_else(|| bad(0, "truncated vertex list"))?;
            vertices.push(parse_triple(line.split_whitespace(), n, |t| t.parse::<f64>().ok())?);
        }
        for _ in 0..nf {
            let (n, line) = lines.next().ok_or_else(|| bad(0, "truncated face list"))?;
            let mut it = line.split_whitespace();
            if it.next() != Some("3") {
                return Err(bad(n, "only triangles are read"));
            }
            faces.push(parse_triple(it, n, |t| t.parse::<usize>().ok())?);
        }
        let mesh = SurfaceMesh { vertices, faces };
        mesh.check()?;
        Ok(mesh)
    }

    pub fn write(&self, path: &Path, format: MeshFormat) -> Result<()> {
        let text = match format {
            MeshFormat::Obj => self.to_obj()?,
            MeshFormat::Ply => self.to_ply()?,
        };
        fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let format = MeshFormat::from_path(path)?;
        let text = fs::read_to_string(path)?;
        match format {
            MeshFormat::Obj => Self::from_obj(&text),
            MeshFormat::Ply => Self::from_ply(&text),
        }
    }
}

fn parse_triple<'a, T: Copy + Default>(
    mut it: impl Iterator<Item = &'a str>,
    line: usize,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<[T; 3]> {
    let mut out = [T::default(); 3];
    for slot in &mut out {
        let tok = it.next().ok_or_else(|| Error::Invalid(format!("line {}: expected three entries", line + 1)))?;
        *slot = parse(tok).ok_or_else(|| Error::Invalid(format!("line {}: cannot parse {tok:?}", line + 1)))?;
    }
    Ok(out)
}

/// Numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Invalid(format!("row of {} entries for {} columns", row.len(), self.header.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|&x| format_float(x))).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers().map_err(|e| Error::Invalid(e.to_string()))?.iter().map(String::from).collect();
        let mut table = Table { header, rows: Vec::new() };
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Invalid(e.to_string()))?;
            let row = rec
                .iter()
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("cannot parse {t:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            table.push(row)?;
        }
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&fs::read_to_string(path)?)
    }
}

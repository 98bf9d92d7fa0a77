//! Binary mesh cache.
//!
//! Layout (little endian): 8-byte magic, `u32` version, joint position and
//! gap, wheel-path y, layer table, the three grid axes, then node and element
//! counts used as a consistency check on reload. Everything else is rebuilt
//! deterministically from the axes.

use std::io::{Read, Write};
use std::path::Path;

use super::{JointSpec, LayerRole, LayerSpec, Mesh};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PVLMESH\0";
pub const VERSION: u32 = 1;

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        self.u32(v.len() as u32);
        for &x in v {
            self.f64(x);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Mesh("mesh cache is truncated".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn str(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::Mesh("mesh cache holds invalid UTF-8".into()))
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.u32()? as usize;
        (0..n).map(|_| self.f64()).collect()
    }
}

fn role_code(role: LayerRole) -> u8 {
    match role {
        LayerRole::Course => 0,
        LayerRole::Slab => 1,
        LayerRole::Subbase => 2,
        LayerRole::Subgrade => 3,
    }
}

pub fn encode(mesh: &Mesh) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(VERSION);
    w.f64(mesh.joint.position);
    w.f64(mesh.joint.gap_width);
    w.f64(mesh.wheel_path_y);
    w.u32(mesh.layers.len() as u32);
    for l in &mesh.layers {
        w.str(&l.name);
        w.f64(l.thickness);
        w.str(&l.material);
        w.0.push(role_code(l.role));
    }
    w.f64s(&mesh.xs);
    w.f64s(&mesh.ys);
    w.f64s(&mesh.zs);
    w.u64(mesh.node_count() as u64);
    w.u64(mesh.element_count() as u64);
    w.0
}

pub fn decode(buf: &[u8]) -> Result<Mesh> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Mesh("not a mesh cache (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Mesh(format!(
            "mesh cache version {version} is not supported (expected {VERSION})"
        )));
    }
    let joint = JointSpec {
        position: r.f64()?,
        gap_width: r.f64()?,
    };
    let wheel = r.f64()?;
    let n_layers = r.u32()?;
    let mut layers = Vec::with_capacity(n_layers as usize);
    for _ in 0..n_layers {
        let name = r.str()?;
        let thickness = r.f64()?;
        let material = r.str()?;
        let role = match r.u8()? {
            0 => LayerRole::Course,
            1 => LayerRole::Slab,
            2 => LayerRole::Subbase,
            3 => LayerRole::Subgrade,
            c => return Err(Error::Mesh(format!("mesh cache: unknown layer role code {c}"))),
        };
        layers.push(LayerSpec {
            name,
            thickness,
            material,
            role,
        });
    }
    let xs = r.f64s()?;
    let ys = r.f64s()?;
    let zs = r.f64s()?;
    let nodes = r.u64()?;
    let elements = r.u64()?;
    if r.pos != buf.len() {
        return Err(Error::Mesh("mesh cache has trailing bytes".into()));
    }
    let mesh = Mesh::from_axes(layers, xs, ys, zs, joint, wheel)?;
    if mesh.node_count() as u64 != nodes || mesh.element_count() as u64 != elements {
        return Err(Error::Mesh("mesh cache counts do not match the rebuilt mesh".into()));
    }
    Ok(mesh)
}

pub fn write(mesh: &Mesh, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode(mesh)).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<Mesh> {
    let mut buf = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    decode(&buf)
}

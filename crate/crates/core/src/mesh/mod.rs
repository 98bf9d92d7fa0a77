//! Structured hexahedral half-model of the layered pavement.
//!
//! Axes: `x` longitudinal (traffic), `y` transverse with `y = 0` on the
//! symmetry plane, `z` vertical pointing up with `z = 0` at the fixed base.
//! Every element is an axis-aligned box; the PCC slab is interrupted by a
//! void transverse joint gap while all other layers stay continuous.

mod cache;
mod grading;

pub use grading::{AxisGrading, Bias, GradedRegion, GradingSpec, PavementGrading};

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Grid coordinates closer than this (mm) are considered coincident.
const COORD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerRole {
    /// One of the asphalt overlay courses.
    Course,
    /// The jointed PCC slab.
    Slab,
    Subbase,
    Subgrade,
}

impl LayerRole {
    pub fn as_str(self) -> &'static str {
        match self {
            LayerRole::Course => "course",
            LayerRole::Slab => "slab",
            LayerRole::Subbase => "subbase",
            LayerRole::Subgrade => "subgrade",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "course" => Some(LayerRole::Course),
            "slab" => Some(LayerRole::Slab),
            "subbase" => Some(LayerRole::Subbase),
            "subgrade" => Some(LayerRole::Subgrade),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub name: String,
    /// mm
    pub thickness: f64,
    /// Material label resolved against the catalog.
    pub material: String,
    pub role: LayerRole,
}

impl LayerSpec {
    pub fn new(name: &str, thickness: f64, material: &str, role: LayerRole) -> Self {
        LayerSpec {
            name: name.to_string(),
            thickness,
            material: material.to_string(),
            role,
        }
    }
}

/// Default layer stack, top-down: three 50 mm overlay courses, 220 mm PCC,
/// 180 mm aggregate subbase, 2880 mm subgrade.
pub fn default_layers() -> Vec<LayerSpec> {
    vec![
        LayerSpec::new("surface", 50.0, "SB", LayerRole::Course),
        LayerSpec::new("intermediate", 50.0, "SB", LayerRole::Course),
        LayerSpec::new("leveling", 50.0, "SB", LayerRole::Course),
        LayerSpec::new("pcc", 220.0, "PCC", LayerRole::Slab),
        LayerSpec::new("subbase", 180.0, "SUBBASE", LayerRole::Subbase),
        LayerSpec::new("subgrade", 2880.0, "SUBGRADE", LayerRole::Subgrade),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointSpec {
    /// Longitudinal position of the joint centerline, mm.
    pub position: f64,
    /// Width of the void gap in the slab, mm.
    pub gap_width: f64,
}

impl JointSpec {
    pub fn gap(&self) -> (f64, f64) {
        (
            self.position - self.gap_width / 2.0,
            self.position + self.gap_width / 2.0,
        )
    }
}

impl Default for JointSpec {
    fn default() -> Self {
        JointSpec {
            position: 1800.0,
            gap_width: 10.0,
        }
    }
}

/// Everything `generate` needs.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    /// Top-down.
    pub layers: Vec<LayerSpec>,
    /// Longitudinal plan dimension, mm.
    pub length: f64,
    /// Transverse plan dimension of the half model, mm.
    pub width: f64,
    pub grading: GradingSpec,
    pub joint: JointSpec,
    /// Wheel-path centerline, mm from the symmetry plane.
    pub wheel_path_y: f64,
}

/// A loaded-surface face on the top of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFace {
    pub element: usize,
    /// Corner nodes in order (x0,y0), (x1,y0), (x1,y1), (x0,y1).
    pub nodes: [usize; 4],
    pub x: [f64; 2],
    pub y: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeRelation {
    BottomOfCourse,
    AboveJoint,
    OnWheelPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    layers: Vec<LayerSpec>,
    joint: JointSpec,
    wheel_path_y: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    zs: Vec<f64>,
    /// `(k_bottom, k_top)` cell-row range per layer, top-down like `layers`.
    layer_rows: Vec<(usize, usize)>,
    nodes: Vec<[f64; 3]>,
    elements: Vec<[usize; 8]>,
    element_cell: Vec<[usize; 3]>,
    element_layer: Vec<usize>,
    cell_element: Vec<Option<usize>>,
    grid_node: Vec<Option<usize>>,
    node_sets: BTreeMap<String, Vec<usize>>,
    element_sets: BTreeMap<String, Vec<usize>>,
    top_faces: Vec<SurfaceFace>,
}

/// Builds the mesh from its spec.
pub fn generate(spec: &MeshSpec) -> Result<Mesh> {
    if spec.layers.is_empty() {
        return Err(Error::Mesh("no layers".into()));
    }
    for l in &spec.layers {
        if !(l.thickness > 0.0 && l.thickness.is_finite()) {
            return Err(Error::Mesh(format!(
                "layer '{}' thickness must be > 0, got {}",
                l.name, l.thickness
            )));
        }
    }
    if !(spec.length > 0.0 && spec.width > 0.0) {
        return Err(Error::Mesh(format!(
            "plan dimensions must be positive, got {} x {}",
            spec.length, spec.width
        )));
    }
    let depth: f64 = spec.layers.iter().map(|l| l.thickness).sum();
    let xs = spec.grading.x.coordinates(spec.length)?;
    let ys = spec.grading.y.coordinates(spec.width)?;
    let zs = spec.grading.z.coordinates(depth)?;
    Mesh::from_axes(spec.layers.clone(), xs, ys, zs, spec.joint, spec.wheel_path_y)
}

fn find_coord(coords: &[f64], value: f64) -> Option<usize> {
    coords.iter().position(|&c| (c - value).abs() <= COORD_TOL)
}

impl Mesh {
    /// Builds the mesh from explicit grid coordinates.
    pub fn from_axes(
        layers: Vec<LayerSpec>,
        xs: Vec<f64>,
        ys: Vec<f64>,
        zs: Vec<f64>,
        joint: JointSpec,
        wheel_path_y: f64,
    ) -> Result<Mesh> {
        for (name, c) in [("x", &xs), ("y", &ys), ("z", &zs)] {
            if c.len() < 2 || c[0] != 0.0 || !c.windows(2).all(|w| w[1] > w[0]) {
                return Err(Error::Mesh(format!(
                    "{name} coordinates must start at 0 and be strictly increasing"
                )));
            }
        }
        let (nx, ny, nz) = (xs.len() - 1, ys.len() - 1, zs.len() - 1);
        let length = xs[nx];
        let width = ys[ny];
        let depth: f64 = layers.iter().map(|l| l.thickness).sum();
        if (zs[nz] - depth).abs() > COORD_TOL {
            return Err(Error::Mesh(format!(
                "vertical grading spans {} mm but layers sum to {depth} mm",
                zs[nz]
            )));
        }
        if !(wheel_path_y >= 0.0 && wheel_path_y <= width) {
            return Err(Error::Mesh(format!(
                "wheel path y = {wheel_path_y} lies outside the plan width {width}"
            )));
        }

        // Layer boundaries must be grid planes.
        let mut layer_rows = Vec::with_capacity(layers.len());
        let mut top = depth;
        for l in &layers {
            let bottom = top - l.thickness;
            let kt = find_coord(&zs, top).ok_or_else(|| {
                Error::Mesh(format!("layer '{}' top z = {top} is not a grid plane", l.name))
            })?;
            let kb = find_coord(&zs, bottom.max(0.0)).ok_or_else(|| {
                Error::Mesh(format!(
                    "layer '{}' bottom z = {bottom} is not a grid plane; an element would span the interface",
                    l.name
                ))
            })?;
            layer_rows.push((kb, kt));
            top = bottom;
        }
        let mut row_layer = vec![0usize; nz];
        for (li, &(kb, kt)) in layer_rows.iter().enumerate() {
            for r in &mut row_layer[kb..kt] {
                *r = li;
            }
        }

        // Joint gap must be resolved by grid lines.
        let has_slab = layers.iter().any(|l| l.role == LayerRole::Slab);
        let (gap_lo, gap_hi) = joint.gap();
        let gap_cols = if has_slab {
            if !(joint.gap_width > 0.0 && gap_lo > 0.0 && gap_hi < length) {
                return Err(Error::Mesh(format!(
                    "joint gap [{gap_lo}, {gap_hi}] must lie inside the plan length {length}"
                )));
            }
            let (i0, i1) = match (find_coord(&xs, gap_lo), find_coord(&xs, gap_hi)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Mesh(format!(
                        "joint gap of {} mm is narrower than the local element size: no grid lines at x = {gap_lo} and x = {gap_hi}",
                        joint.gap_width
                    )))
                }
            };
            i0..i1
        } else {
            0..0
        };

        let grid = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
        let cell = |i: usize, j: usize, k: usize| i + nx * (j + ny * k);

        let mut elements_grid = Vec::new();
        let mut element_cell = Vec::new();
        let mut element_layer = Vec::new();
        let mut cell_element = vec![None; nx * ny * nz];
        for k in 0..nz {
            let li = row_layer[k];
            let in_slab = layers[li].role == LayerRole::Slab;
            for j in 0..ny {
                for i in 0..nx {
                    if in_slab && gap_cols.contains(&i) {
                        continue;
                    }
                    cell_element[cell(i, j, k)] = Some(elements_grid.len());
                    elements_grid.push([
                        grid(i, j, k),
                        grid(i + 1, j, k),
                        grid(i + 1, j + 1, k),
                        grid(i, j + 1, k),
                        grid(i, j, k + 1),
                        grid(i + 1, j, k + 1),
                        grid(i + 1, j + 1, k + 1),
                        grid(i, j + 1, k + 1),
                    ]);
                    element_cell.push([i, j, k]);
                    element_layer.push(li);
                }
            }
        }

        // Compact node numbering over the nodes actually used.
        let mut grid_node = vec![None; (nx + 1) * (ny + 1) * (nz + 1)];
        for conn in &elements_grid {
            for &g in conn {
                grid_node[g] = Some(0);
            }
        }
        let mut nodes = Vec::new();
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    let g = grid(i, j, k);
                    if grid_node[g].is_some() {
                        grid_node[g] = Some(nodes.len());
                        nodes.push([xs[i], ys[j], zs[k]]);
                    }
                }
            }
        }
        let elements: Vec<[usize; 8]> = elements_grid
            .iter()
            .map(|conn| conn.map(|g| grid_node[g].expect("used node")))
            .collect();

        let mut mesh = Mesh {
            layers,
            joint,
            wheel_path_y,
            xs,
            ys,
            zs,
            layer_rows,
            nodes,
            elements,
            element_cell,
            element_layer,
            cell_element,
            grid_node,
            node_sets: BTreeMap::new(),
            element_sets: BTreeMap::new(),
            top_faces: Vec::new(),
        };
        mesh.build_sets(gap_cols);
        Ok(mesh)
    }

    fn build_sets(&mut self, gap_cols: std::ops::Range<usize>) {
        let (nx, ny, nz) = self.dims();
        let mut sets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    let Some(n) = self.grid_node(i, j, k) else { continue };
                    if j == 0 {
                        sets.entry("symmetry_plane".into()).or_default().push(n);
                    }
                    if j == ny {
                        sets.entry("lateral_plane".into()).or_default().push(n);
                    }
                    if i == 0 || i == nx {
                        sets.entry("longitudinal_ends".into()).or_default().push(n);
                    }
                    if k == 0 {
                        sets.entry("base".into()).or_default().push(n);
                    }
                    if k == nz {
                        sets.entry("top_surface".into()).or_default().push(n);
                    }
                }
            }
        }
        if !gap_cols.is_empty() {
            let mut joint_nodes = Vec::new();
            for (li, l) in self.layers.iter().enumerate() {
                if l.role != LayerRole::Slab {
                    continue;
                }
                let (kb, kt) = self.layer_rows[li];
                for k in kb..=kt {
                    for j in 0..=ny {
                        for i in [gap_cols.start, gap_cols.end] {
                            if let Some(n) = self.grid_node(i, j, k) {
                                joint_nodes.push(n);
                            }
                        }
                    }
                }
            }
            joint_nodes.sort_unstable();
            joint_nodes.dedup();
            sets.insert("joint_faces".into(), joint_nodes);
        }
        self.node_sets = sets;

        let mut esets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (e, &li) in self.element_layer.iter().enumerate() {
            esets.entry(self.layers[li].name.clone()).or_default().push(e);
        }
        let mut faces = Vec::new();
        let mut wheel = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let Some(e) = self.cell_element(i, j, nz - 1) else { continue };
                let conn = self.elements[e];
                let face = SurfaceFace {
                    element: e,
                    nodes: [conn[4], conn[5], conn[6], conn[7]],
                    x: [self.xs[i], self.xs[i + 1]],
                    y: [self.ys[j], self.ys[j + 1]],
                };
                if face.y[0] <= self.wheel_path_y && self.wheel_path_y <= face.y[1] {
                    wheel.push(faces.len());
                }
                faces.push(face);
            }
        }
        esets.insert("top_row".into(), faces.iter().map(|f| f.element).collect());
        esets.insert("wheel_path".into(), wheel.iter().map(|&f| faces[f].element).collect());
        self.element_sets = esets;
        self.top_faces = faces;
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.xs.len() - 1, self.ys.len() - 1, self.zs.len() - 1)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn zs(&self) -> &[f64] {
        &self.zs
    }

    pub fn length(&self) -> f64 {
        *self.xs.last().expect("non-empty axis")
    }

    pub fn width(&self) -> f64 {
        *self.ys.last().expect("non-empty axis")
    }

    pub fn depth(&self) -> f64 {
        *self.zs.last().expect("non-empty axis")
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn layer_index(&self, name: &str) -> Option<usize> {
        self.layers.iter().position(|l| l.name == name)
    }

    /// Copy with different material labels on the named layers.
    pub fn with_layer_materials(&self, assignment: &[(&str, &str)]) -> Result<Mesh> {
        let mut out = self.clone();
        for (layer, material) in assignment {
            let li = out
                .layer_index(layer)
                .ok_or_else(|| Error::Mesh(format!("unknown layer '{layer}'")))?;
            out.layers[li].material = material.to_string();
        }
        Ok(out)
    }

    pub fn joint(&self) -> JointSpec {
        self.joint
    }

    pub fn wheel_path_y(&self) -> f64 {
        self.wheel_path_y
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn elements(&self) -> &[[usize; 8]] {
        &self.elements
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn element_layer(&self, e: usize) -> usize {
        self.element_layer[e]
    }

    pub fn element_layers(&self) -> &[usize] {
        &self.element_layer
    }

    pub fn element_material(&self, e: usize) -> &str {
        &self.layers[self.element_layer[e]].material
    }

    pub fn element_cell(&self, e: usize) -> [usize; 3] {
        self.element_cell[e]
    }

    pub fn cell_element(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        let (nx, ny, _) = self.dims();
        self.cell_element[i + nx * (j + ny * k)]
    }

    pub fn grid_node(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        let (nx, ny, _) = self.dims();
        self.grid_node[i + (nx + 1) * (j + (ny + 1) * k)]
    }

    pub fn element_coords(&self, e: usize) -> [[f64; 3]; 8] {
        self.elements[e].map(|n| self.nodes[n])
    }

    pub fn centroid(&self, e: usize) -> [f64; 3] {
        let [i, j, k] = self.element_cell[e];
        [
            0.5 * (self.xs[i] + self.xs[i + 1]),
            0.5 * (self.ys[j] + self.ys[j + 1]),
            0.5 * (self.zs[k] + self.zs[k + 1]),
        ]
    }

    /// Edge lengths along x, y, z.
    pub fn element_size(&self, e: usize) -> [f64; 3] {
        let [i, j, k] = self.element_cell[e];
        [
            self.xs[i + 1] - self.xs[i],
            self.ys[j + 1] - self.ys[j],
            self.zs[k + 1] - self.zs[k],
        ]
    }

    pub fn node_set(&self, name: &str) -> Option<&[usize]> {
        self.node_sets.get(name).map(Vec::as_slice)
    }

    pub fn node_set_names(&self) -> impl Iterator<Item = &str> {
        self.node_sets.keys().map(String::as_str)
    }

    pub fn element_set(&self, name: &str) -> Option<&[usize]> {
        self.element_sets.get(name).map(Vec::as_slice)
    }

    pub fn top_faces(&self) -> &[SurfaceFace] {
        &self.top_faces
    }

    /// Elements of `course` selected by `relation`.
    ///
    /// All relations start from the elements whose lower face lies on the
    /// course's bottom plane. `AboveJoint` keeps the column(s) with centroid
    /// nearest the joint, ordered by transverse distance from the wheel-path
    /// centerline. `OnWheelPath` keeps the row nearest the wheel-path
    /// centerline, ordered by distance from the joint. `BottomOfCourse`
    /// returns all of them, ordered by transverse then longitudinal distance.
    pub fn probe_elements(&self, course: &str, relation: ProbeRelation) -> Result<Vec<usize>> {
        let li = self
            .layer_index(course)
            .ok_or_else(|| Error::Mesh(format!("unknown course '{course}'")))?;
        let kb = self.layer_rows[li].0;
        let (nx, ny, _) = self.dims();
        let jx = self.joint.position;
        let wy = self.wheel_path_y;
        let mut bottom: Vec<(usize, f64, f64)> = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if let Some(e) = self.cell_element(i, j, kb) {
                    let c = self.centroid(e);
                    bottom.push((e, (c[0] - jx).abs(), (c[1] - wy).abs()));
                }
            }
        }
        let near = |d: f64, best: f64| d <= best + COORD_TOL;
        let mut out: Vec<(usize, f64, f64)> = match relation {
            ProbeRelation::BottomOfCourse => bottom,
            ProbeRelation::AboveJoint => {
                let best = bottom.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
                bottom.into_iter().filter(|b| near(b.1, best)).collect()
            }
            ProbeRelation::OnWheelPath => {
                let best = bottom.iter().map(|b| b.2).fold(f64::INFINITY, f64::min);
                let mut v: Vec<_> = bottom.into_iter().filter(|b| near(b.2, best)).collect();
                v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                return Ok(v.into_iter().map(|b| b.0).collect());
            }
        };
        out.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.1.total_cmp(&b.1)).then(a.0.cmp(&b.0)));
        Ok(out.into_iter().map(|b| b.0).collect())
    }

    /// Bottom-row element of `course` whose centroid is nearest `(x, y)`.
    pub fn probe_at(&self, course: &str, x: f64, y: f64) -> Result<usize> {
        let all = self.probe_elements(course, ProbeRelation::BottomOfCourse)?;
        all.into_iter()
            .min_by(|&a, &b| {
                let da = self.centroid(a);
                let db = self.centroid(b);
                let ka = (da[0] - x).abs() + (da[1] - y).abs();
                let kb = (db[0] - x).abs() + (db[1] - y).abs();
                ka.total_cmp(&kb).then(a.cmp(&b))
            })
            .ok_or_else(|| Error::Mesh(format!("course '{course}' has no elements")))
    }

    /// Writes the versioned binary cache.
    pub fn write_cache(&self, path: &std::path::Path) -> Result<()> {
        cache::write(self, path)
    }

    pub fn read_cache(path: &std::path::Path) -> Result<Mesh> {
        cache::read(path)
    }
}

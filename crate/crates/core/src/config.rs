//! Run configuration: presets plus flat `block.key = value` overrides.
//!
//! ```text
//! preset = desk
//! materials_file = mixes.txt
//! geometry.layer = surface, 50, PM, course
//! load.n_increments = 10
//! solver.threads = 4
//! ```
//!
//! `#` starts a comment. Repeated keys (`geometry.layer`,
//! `load.tire_center_offset_mm`) replace the preset list on first use and
//! append afterwards. Unknown keys are errors.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::loading::{Footprint, LoadSchedule, PressureModel};
use crate::materials::MaterialCatalog;
use crate::mesh::{default_layers, generate, JointSpec, LayerRole, LayerSpec, Mesh, MeshSpec, PavementGrading, ProbeRelation};
use crate::solver::{SolveSettings, SolverKind};

pub const THREADS_ENV: &str = "PAVERLAY_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Desk,
    Paper,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "desk" => Some(Preset::Desk),
            "paper" => Some(Preset::Paper),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Desk => "desk",
            Preset::Paper => "paper",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    /// Top-down.
    pub layers: Vec<LayerSpec>,
    pub length: f64,
    pub width: f64,
    pub joint: JointSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadConfig {
    /// MPa
    pub p_max: f64,
    pub footprint_length: f64,
    pub footprint_width: f64,
    pub step: f64,
    /// s
    pub dt: f64,
    pub n_increments: usize,
    /// First footprint center; defaults to half the footprint length.
    pub start_x: Option<f64>,
    pub tire_offsets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub geometry: GeometryConfig,
    pub grading: PavementGrading,
    pub load: LoadConfig,
    pub solver: SolveSettings,
    /// `None` uses the built-in placeholder library.
    pub materials_file: Option<PathBuf>,
    pub output_dir: PathBuf,
}

/// Probe elements used for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Probes {
    /// Bottom of the lowest overlay course, above the joint, on the wheel path.
    pub above_joint: usize,
    /// Same course, halfway between the model end and the joint.
    pub mid_slab: usize,
}

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        RunConfig {
            preset,
            geometry: GeometryConfig {
                layers: default_layers(),
                length: 3600.0,
                width: 1200.0,
                joint: JointSpec::default(),
            },
            grading: match preset {
                Preset::Desk => PavementGrading::desk(),
                Preset::Paper => PavementGrading::paper(),
            },
            load: LoadConfig {
                p_max: 1.2,
                footprint_length: 220.0,
                footprint_width: 240.0,
                step: 20.0,
                dt: 0.009,
                n_increments: 170,
                start_x: None,
                tire_offsets: vec![600.0],
            },
            solver: SolveSettings::default(),
            materials_file: None,
            output_dir: PathBuf::from("out"),
        }
    }

    pub fn wheel_path_y(&self) -> f64 {
        let o = &self.load.tire_offsets;
        o.iter().sum::<f64>() / o.len().max(1) as f64
    }

    pub fn course_count(&self) -> usize {
        self.geometry.layers.iter().take_while(|l| l.role == LayerRole::Course).count()
    }

    /// Name of the overlay course sitting on the slab.
    pub fn leveling_course(&self) -> Result<&str> {
        let n = self.course_count();
        if n == 0 {
            return Err(Error::invalid("geometry has no overlay course on top"));
        }
        Ok(&self.geometry.layers[n - 1].name)
    }

    pub fn start_x(&self) -> f64 {
        self.load.start_x.unwrap_or(self.load.footprint_length / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if g.layers.is_empty() {
            return Err(Error::invalid("geometry.layer: at least one layer is required"));
        }
        for l in &g.layers {
            if !(l.thickness > 0.0) {
                return Err(Error::invalid(format!("geometry.layer '{}': thickness must be > 0", l.name)));
            }
        }
        if !(g.length > 0.0 && g.width > 0.0) {
            return Err(Error::invalid("geometry.length_mm and geometry.width_mm must be > 0"));
        }
        if !(g.joint.gap_width > 0.0 && g.joint.position > 0.0 && g.joint.position < g.length) {
            return Err(Error::invalid("geometry.joint_x_mm must lie inside the model and geometry.gap_mm be > 0"));
        }
        let l = &self.load;
        if !(l.p_max > 0.0) {
            return Err(Error::invalid("load.p_max_MPa must be > 0"));
        }
        if !(l.footprint_length > 0.0 && l.footprint_width > 0.0) {
            return Err(Error::invalid("load.footprint_length_mm and load.footprint_width_mm must be > 0"));
        }
        if !(l.step > 0.0) {
            return Err(Error::invalid("load.step_mm must be > 0"));
        }
        if !(l.dt > 0.0) {
            return Err(Error::invalid("load.dt_ms must be > 0"));
        }
        if l.n_increments == 0 {
            return Err(Error::invalid("load.n_increments must be >= 1"));
        }
        if l.tire_offsets.is_empty() {
            return Err(Error::invalid("load.tire_center_offset_mm: at least one tire is required"));
        }
        let a = l.footprint_length / 2.0;
        let first = self.start_x();
        let last = first + (l.n_increments - 1) as f64 * l.step;
        let tol = 1e-9 * g.length;
        if first - a < -tol || last + a > g.length + tol {
            return Err(Error::invalid(format!(
                "load path [{}, {}] mm leaves the model length {} mm",
                first - a,
                last + a,
                g.length
            )));
        }
        for &o in &l.tire_offsets {
            if o - l.footprint_width / 2.0 < -tol || o + l.footprint_width / 2.0 > g.width + tol {
                return Err(Error::invalid(format!(
                    "load.tire_center_offset_mm = {o}: footprint leaves the model width {} mm",
                    g.width
                )));
            }
        }
        self.solver.validate()?;
        if self.course_count() == 0 {
            return Err(Error::invalid("geometry.layer: the top layer must be an overlay course"));
        }
        Ok(())
    }

    pub fn mesh_spec(&self) -> Result<MeshSpec> {
        let g = &self.geometry;
        let th: Vec<f64> = g.layers.iter().map(|l| l.thickness).collect();
        let grading = self.grading.build(
            g.length,
            g.width,
            g.joint.position,
            g.joint.gap_width,
            self.wheel_path_y(),
            &th,
            self.course_count(),
        )?;
        Ok(MeshSpec {
            layers: g.layers.clone(),
            length: g.length,
            width: g.width,
            grading,
            joint: g.joint,
            wheel_path_y: self.wheel_path_y(),
        })
    }

    pub fn build_mesh(&self) -> Result<Mesh> {
        generate(&self.mesh_spec()?)
    }

    pub fn footprints(&self) -> Result<Vec<Footprint>> {
        self.load
            .tire_offsets
            .iter()
            .map(|&o| Footprint::new(self.load.footprint_length, self.load.footprint_width, o))
            .collect()
    }

    pub fn pressure(&self) -> Result<PressureModel> {
        PressureModel::new(self.load.p_max, self.load.footprint_length / 2.0)
    }

    pub fn schedule(&self) -> Result<LoadSchedule> {
        LoadSchedule::uniform(self.start_x(), self.load.step, self.load.dt, self.load.n_increments)
    }

    pub fn catalog(&self) -> Result<MaterialCatalog> {
        match &self.materials_file {
            Some(p) => MaterialCatalog::load(p),
            None => Ok(MaterialCatalog::placeholder()),
        }
    }

    pub fn probes(&self, mesh: &Mesh) -> Result<Probes> {
        let course = self.leveling_course()?;
        let above = mesh.probe_elements(course, ProbeRelation::AboveJoint)?;
        let above_joint = *above
            .first()
            .ok_or_else(|| Error::Mesh(format!("no '{course}' element above the joint")))?;
        let mid_slab = mesh.probe_at(course, self.geometry.joint.position / 2.0, self.wheel_path_y())?;
        Ok(Probes { above_joint, mid_slab })
    }

    /// Applies `PAVERLAY_THREADS` if set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(THREADS_ENV) {
            self.solver.threads = v
                .trim()
                .parse()
                .ok()
                .filter(|&n: &usize| n >= 1)
                .ok_or_else(|| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        }
        Ok(())
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg = parse_config_str(&text, &path.display().to_string())?;
    if let Some(m) = &cfg.materials_file {
        if !m.exists() {
            return Err(Error::invalid(format!("materials_file '{}' does not exist", m.display())));
        }
    }
    Ok(cfg)
}

fn parse_layer(value: &str) -> std::result::Result<LayerSpec, String> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err("expected 'name, thickness_mm, material, role'".into());
    }
    let thickness: f64 = parts[1].parse().map_err(|_| format!("invalid thickness '{}'", parts[1]))?;
    let role = LayerRole::parse(parts[3])
        .ok_or_else(|| format!("unknown role '{}' (course, slab, subbase, subgrade)", parts[3]))?;
    if parts[0].is_empty() || parts[2].is_empty() {
        return Err("layer name and material must be non-empty".into());
    }
    Ok(LayerSpec::new(parts[0], thickness, parts[2], role))
}

/// Parses configuration text. `source` names the input in error messages.
pub fn parse_config_str(text: &str, source: &str) -> Result<RunConfig> {
    let err = |line: usize, message: String| Error::Parse {
        file: source.to_string(),
        line,
        message,
    };
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(i + 1, format!("expected 'key = value', got '{line}'")))?;
        entries.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }

    let mut preset = Preset::Desk;
    for (line, k, v) in &entries {
        if k == "preset" {
            preset = Preset::parse(v).ok_or_else(|| err(*line, format!("preset: unknown preset '{v}' (desk, paper)")))?;
        }
    }
    let mut cfg = RunConfig::preset(preset);
    let mut layers_seen = false;
    let mut tires_seen = false;

    for (line, key, v) in &entries {
        let line = *line;
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(line, format!("{key}: invalid number '{v}'")))
        };
        let count = |v: &str| -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| err(line, format!("{key}: invalid non-negative integer '{v}'")))
        };
        match key.as_str() {
            "preset" => {}
            "materials_file" => cfg.materials_file = Some(PathBuf::from(v)),
            "output_dir" => cfg.output_dir = PathBuf::from(v),
            "geometry.length_mm" => cfg.geometry.length = num(v)?,
            "geometry.width_mm" => cfg.geometry.width = num(v)?,
            "geometry.joint_x_mm" => cfg.geometry.joint.position = num(v)?,
            "geometry.gap_mm" => cfg.geometry.joint.gap_width = num(v)?,
            "geometry.layer" => {
                if !layers_seen {
                    cfg.geometry.layers.clear();
                    layers_seen = true;
                }
                let l = parse_layer(v).map_err(|m| err(line, format!("{key}: {m}")))?;
                cfg.geometry.layers.push(l);
            }
            "grading.joint_size_mm" => cfg.grading.joint_size = num(v)?,
            "grading.joint_zone_mm" => cfg.grading.joint_zone = num(v)?,
            "grading.path_size_mm" => cfg.grading.path_size = num(v)?,
            "grading.path_half_width_mm" => cfg.grading.path_half_width = num(v)?,
            "grading.course_size_mm" => cfg.grading.course_size = num(v)?,
            "grading.growth" => cfg.grading.growth = num(v)?,
            "grading.max_size_x_mm" => cfg.grading.max_size_x = num(v)?,
            "grading.max_size_y_mm" => cfg.grading.max_size_y = num(v)?,
            "grading.max_size_z_mm" => cfg.grading.max_size_z = num(v)?,
            "load.p_max_MPa" => cfg.load.p_max = num(v)?,
            "load.footprint_length_mm" => cfg.load.footprint_length = num(v)?,
            "load.footprint_width_mm" => cfg.load.footprint_width = num(v)?,
            "load.step_mm" => cfg.load.step = num(v)?,
            "load.dt_ms" => cfg.load.dt = num(v)? * 1e-3,
            "load.n_increments" => cfg.load.n_increments = count(v)?,
            "load.start_x_mm" => cfg.load.start_x = Some(num(v)?),
            "load.tire_center_offset_mm" => {
                if !tires_seen {
                    cfg.load.tire_offsets.clear();
                    tires_seen = true;
                }
                cfg.load.tire_offsets.push(num(v)?);
            }
            "solver.solver" => {
                cfg.solver.solver =
                    SolverKind::parse(v).ok_or_else(|| err(line, format!("{key}: expected 'direct' or 'cg', got '{v}'")))?
            }
            "solver.tol" => cfg.solver.tol = num(v)?,
            "solver.max_iter" => cfg.solver.max_iter = count(v)?,
            "solver.hourglass_coeff" => cfg.solver.hourglass_coeff = num(v)?,
            "solver.threads" => cfg.solver.threads = count(v)?,
            other => return Err(err(line, format!("unknown key '{other}'"))),
        }
    }
    cfg.validate().map_err(|e| match e {
        Error::Invalid(m) => Error::Parse {
            file: source.to_string(),
            line: 0,
            message: m,
        },
        other => other,
    })?;
    Ok(cfg)
}

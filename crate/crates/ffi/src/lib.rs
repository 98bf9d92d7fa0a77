//! C interface to `paverlay`.
//!
//! Objects are opaque handles created by the `pv_*` constructors and
//! released with the matching `pv_*_free`. Every fallible function returns a
//! [`PvStatus`]; on failure the message is available from [`pv_last_error`]
//! on the same thread until the next failing call. Enum arguments must hold
//! one of their declared values.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use paverlay::config::{parse_config, parse_config_str, Preset, RunConfig};
use paverlay::mesh::Mesh;
use paverlay::results::{envelope, export_fields, write_history_csv, StressHistory};
use paverlay::solver::{run_passage, PassageSpec};
use paverlay::study::{
    course_stats, extremes_report, markdown_report, published_table, Course, Mixture, MixtureAssignment,
    SweepTable,
};
use paverlay::Error;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PvStatus {
    Ok = 0,
    NullPointer = 1,
    Invalid = 2,
    Parse = 3,
    Mesh = 4,
    Load = 5,
    Solver = 6,
    Io = 7,
    Utf8 = 8,
    OutOfRange = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PvMixture {
    Dg = 0,
    Pm = 1,
    Sb = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PvCourse {
    Surface = 0,
    Intermediate = 1,
    Leveling = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PvQuantity {
    S11 = 0,
    S12 = 1,
}

/// One probe sample. Stresses in kPa, Voigt order 11, 22, 33, 12, 13, 23.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PvRecord {
    pub increment: usize,
    pub time: f64,
    pub load_x: f64,
    pub element: usize,
    pub stress: [f64; 6],
}

/// Passage peaks of one probe, kPa and mm.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PvEnvelope {
    pub s11_peak: f64,
    pub s11_increment: usize,
    pub s11_load_x: f64,
    pub s12_peak: f64,
    pub s12_increment: usize,
    pub s12_load_x: f64,
}

/// Lowest S11 and S12 rows of a sweep table. Mixtures are
/// surface, intermediate, leveling.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvExtremes {
    pub min_s11: f64,
    pub min_s11_mixtures: [PvMixture; 3],
    pub min_s12: f64,
    pub min_s12_mixtures: [PvMixture; 3],
    /// NaN when the table lacks the all-SB or all-PM row.
    pub sb_over_pm_s11_percent: f64,
}

/// Run configuration. Keeps its source text so single keys can be changed.
pub struct PvConfig {
    text: String,
    config: RunConfig,
}

pub struct PvMesh {
    mesh: Mesh,
}

pub struct PvPassage {
    history: StressHistory,
    above_joint: usize,
    mid_slab: usize,
    factorizations: usize,
    max_equilibrium_error: f64,
}

pub struct PvTable {
    table: SweepTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PvStatus {
    match e {
        Error::Invalid(_) => PvStatus::Invalid,
        Error::Parse { .. } => PvStatus::Parse,
        Error::Mesh(_) => PvStatus::Mesh,
        Error::Load(_) => PvStatus::Load,
        Error::Solver(_) => PvStatus::Solver,
        Error::Io { .. } => PvStatus::Io,
        Error::Case { source, .. } => status_of(source),
    }
}

struct Fail(PvStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PvStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PvStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(PvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(PvStatus::Utf8, format!("{what} is not valid UTF-8")))
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn mixture(m: Mixture) -> PvMixture {
    match m {
        Mixture::DG => PvMixture::Dg,
        Mixture::PM => PvMixture::Pm,
        Mixture::SB => PvMixture::Sb,
    }
}

fn from_mixture(m: PvMixture) -> Mixture {
    match m {
        PvMixture::Dg => Mixture::DG,
        PvMixture::Pm => Mixture::PM,
        PvMixture::Sb => Mixture::SB,
    }
}

fn mixtures(a: MixtureAssignment) -> [PvMixture; 3] {
    [mixture(a.surface), mixture(a.intermediate), mixture(a.leveling)]
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer returned by a `pv_*` function documented
/// as returning an owned string.
#[no_mangle]
pub unsafe extern "C" fn pv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn config_from_text(text: String, source: &str) -> Result<Box<PvConfig>, Fail> {
    let mut config = parse_config_str(&text, source)?;
    config.apply_env()?;
    Ok(Box::new(PvConfig { text, config }))
}

/// Configuration from configuration text (`block.key = value` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_config_from_str(text: *const c_char, out_cfg: *mut *mut PvConfig) -> PvStatus {
    guard(|| {
        let text = str_arg(text, "text")?.to_string();
        let slot = out(out_cfg, "out")?;
        *slot = Box::into_raw(config_from_text(text, "<string>")?);
        Ok(())
    })
}

/// Configuration for a named preset (`desk` or `paper`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_config_from_preset(name: *const c_char, out_cfg: *mut *mut PvConfig) -> PvStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let slot = out(out_cfg, "out")?;
        Preset::parse(name).ok_or_else(|| Fail(PvStatus::Invalid, format!("unknown preset '{name}'")))?;
        *slot = Box::into_raw(config_from_text(format!("preset = {name}\n"), "<preset>")?);
        Ok(())
    })
}

/// Configuration read from a file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_config_from_file(path: *const c_char, out_cfg: *mut *mut PvConfig) -> PvStatus {
    guard(|| {
        let path = Path::new(str_arg(path, "path")?);
        let slot = out(out_cfg, "out")?;
        let text = std::fs::read_to_string(path).map_err(|e| Fail(PvStatus::Io, format!("{}: {e}", path.display())))?;
        let mut config = parse_config(path)?;
        config.apply_env()?;
        *slot = Box::into_raw(Box::new(PvConfig { text, config }));
        Ok(())
    })
}

/// Sets one key as if `key = value` were appended to the configuration.
/// The configuration is unchanged on failure.
///
/// # Safety
/// `cfg` must be a live configuration handle; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pv_config_set(cfg: *mut PvConfig, key: *const c_char, value: *const c_char) -> PvStatus {
    guard(|| {
        let cfg = out(cfg, "cfg")?;
        let key = str_arg(key, "key")?;
        let value = str_arg(value, "value")?;
        if key.contains(['\n', '=', '#']) || value.contains(['\n', '#']) {
            return Err(Fail(PvStatus::Invalid, "key and value must be single tokens".into()));
        }
        let text = format!("{}\n{key} = {value}\n", cfg.text);
        *cfg = *config_from_text(text, "<config>")?;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a handle from a `pv_config_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn pv_config_free(cfg: *mut PvConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Generates the mesh described by `cfg`.
///
/// # Safety
/// `cfg` must be a live configuration handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_mesh_build(cfg: *const PvConfig, out_mesh: *mut *mut PvMesh) -> PvStatus {
    guard(|| {
        let cfg = obj(cfg, "cfg")?;
        let slot = out(out_mesh, "out")?;
        let mesh = cfg.config.build_mesh()?;
        *slot = Box::into_raw(Box::new(PvMesh { mesh }));
        Ok(())
    })
}

/// # Safety
/// `mesh` must be a live mesh handle.
#[no_mangle]
pub unsafe extern "C" fn pv_mesh_node_count(mesh: *const PvMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.node_count())
}

/// # Safety
/// `mesh` must be a live mesh handle.
#[no_mangle]
pub unsafe extern "C" fn pv_mesh_element_count(mesh: *const PvMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.mesh.element_count())
}

/// Writes the mesh as a legacy VTK unstructured grid.
///
/// # Safety
/// `mesh` must be a live mesh handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pv_mesh_write_vtk(mesh: *const PvMesh, path: *const c_char) -> PvStatus {
    guard(|| {
        let mesh = obj(mesh, "mesh")?;
        let path = str_arg(path, "path")?;
        export_fields(&mesh.mesh, None, Path::new(path))?;
        Ok(())
    })
}

/// # Safety
/// `mesh` must be null or a handle from [`pv_mesh_build`].
#[no_mangle]
pub unsafe extern "C" fn pv_mesh_free(mesh: *mut PvMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Runs one load passage, recording the above-joint and mid-slab probes.
///
/// # Safety
/// `cfg` must be a live configuration handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_passage_run(cfg: *const PvConfig, out_passage: *mut *mut PvPassage) -> PvStatus {
    guard(|| {
        let cfg = &obj(cfg, "cfg")?.config;
        let slot = out(out_passage, "out")?;
        let catalog = cfg.catalog()?;
        let mesh = cfg.build_mesh()?;
        let probes = cfg.probes(&mesh)?;
        let footprints = cfg.footprints()?;
        let schedule = cfg.schedule()?;
        let spec = PassageSpec {
            footprints: &footprints,
            pressure: cfg.pressure()?,
            schedule: &schedule,
            probes: &[probes.above_joint, probes.mid_slab],
            snapshots: &[],
        };
        let run = run_passage(&mesh, &catalog, &spec, &cfg.solver)?;
        *slot = Box::into_raw(Box::new(PvPassage {
            history: run.history,
            above_joint: probes.above_joint,
            mid_slab: probes.mid_slab,
            factorizations: run.factorizations,
            max_equilibrium_error: run.equilibrium_errors.iter().copied().fold(0.0, f64::max),
        }));
        Ok(())
    })
}

/// # Safety
/// `p` must be a live passage handle.
#[no_mangle]
pub unsafe extern "C" fn pv_passage_record_count(p: *const PvPassage) -> usize {
    p.as_ref().map_or(0, |p| p.history.records().len())
}

/// Probe element ids: index 0 is above the joint, 1 is mid-slab.
///
/// # Safety
/// `p` must be a live passage handle; `element` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_passage_probe(p: *const PvPassage, index: usize, element: *mut usize) -> PvStatus {
    guard(|| {
        let p = obj(p, "passage")?;
        let slot = out(element, "element")?;
        *slot = match index {
            0 => p.above_joint,
            1 => p.mid_slab,
            _ => return Err(Fail(PvStatus::OutOfRange, format!("probe index {index} (0 or 1)"))),
        };
        Ok(())
    })
}

/// Record `index` in increment-major, probe-minor order.
///
/// # Safety
/// `p` must be a live passage handle; `record` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_passage_record(p: *const PvPassage, index: usize, record: *mut PvRecord) -> PvStatus {
    guard(|| {
        let p = obj(p, "passage")?;
        let slot = out(record, "record")?;
        let records = p.history.records();
        let r = records
            .get(index)
            .ok_or_else(|| Fail(PvStatus::OutOfRange, format!("record {index} of {}", records.len())))?;
        *slot = PvRecord {
            increment: r.increment,
            time: r.time,
            load_x: r.load_x,
            element: r.element,
            stress: r.stress,
        };
        Ok(())
    })
}

/// Peak S11 and absolute S12 of one probe element.
///
/// # Safety
/// `p` must be a live passage handle; `env` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_passage_envelope(p: *const PvPassage, element: usize, env: *mut PvEnvelope) -> PvStatus {
    guard(|| {
        let p = obj(p, "passage")?;
        let slot = out(env, "envelope")?;
        let e = envelope(&p.history.probe(element)?)?;
        *slot = PvEnvelope {
            s11_peak: e.s11_peak,
            s11_increment: e.s11_increment,
            s11_load_x: e.s11_load_x,
            s12_peak: e.s12_peak,
            s12_increment: e.s12_increment,
            s12_load_x: e.s12_load_x,
        };
        Ok(())
    })
}

/// # Safety
/// `p` must be a live passage handle.
#[no_mangle]
pub unsafe extern "C" fn pv_passage_factorizations(p: *const PvPassage) -> usize {
    p.as_ref().map_or(0, |p| p.factorizations)
}

/// Largest relative reaction imbalance over all increments.
///
/// # Safety
/// `p` must be a live passage handle.
#[no_mangle]
pub unsafe extern "C" fn pv_passage_max_equilibrium_error(p: *const PvPassage) -> f64 {
    p.as_ref().map_or(f64::NAN, |p| p.max_equilibrium_error)
}

/// Writes the probe history CSV.
///
/// # Safety
/// `p` must be a live passage handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pv_passage_write_csv(p: *const PvPassage, path: *const c_char) -> PvStatus {
    guard(|| {
        let p = obj(p, "passage")?;
        let path = str_arg(path, "path")?;
        write_history_csv(&p.history, Path::new(path))?;
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`pv_passage_run`].
#[no_mangle]
pub unsafe extern "C" fn pv_passage_free(p: *mut PvPassage) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The built-in published 27-case table.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_table_published(out_table: *mut *mut PvTable) -> PvStatus {
    guard(|| {
        let slot = out(out_table, "out")?;
        *slot = Box::into_raw(Box::new(PvTable {
            table: published_table(),
        }));
        Ok(())
    })
}

/// Reads a sweep table CSV.
///
/// # Safety
/// `path` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_table_read_csv(path: *const c_char, out_table: *mut *mut PvTable) -> PvStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let slot = out(out_table, "out")?;
        let table = SweepTable::read_csv(Path::new(path))?;
        *slot = Box::into_raw(Box::new(PvTable { table }));
        Ok(())
    })
}

/// # Safety
/// `t` must be a live table handle.
#[no_mangle]
pub unsafe extern "C" fn pv_table_row_count(t: *const PvTable) -> usize {
    t.as_ref().map_or(0, |t| t.table.rows.len())
}

/// Percent difference of the mean `quantity` of `mixture` against the mean
/// of `reference` over the nine rows holding each mixture in `course`.
///
/// # Safety
/// `t` must be a live table handle; `percent` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_table_course_delta(
    t: *const PvTable,
    course: PvCourse,
    quantity: PvQuantity,
    mixture: PvMixture,
    reference: PvMixture,
    percent: *mut f64,
) -> PvStatus {
    guard(|| {
        let t = obj(t, "table")?;
        let slot = out(percent, "percent")?;
        let course = match course {
            PvCourse::Surface => Course::Surface,
            PvCourse::Intermediate => Course::Intermediate,
            PvCourse::Leveling => Course::Leveling,
        };
        let st = course_stats(&t.table, course)?;
        let (m, r) = (from_mixture(mixture), from_mixture(reference));
        *slot = match quantity {
            PvQuantity::S11 => st.s11_delta(m, r),
            PvQuantity::S12 => st.s12_delta(m, r),
        };
        Ok(())
    })
}

/// # Safety
/// `t` must be a live table handle; `ex` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_table_extremes(t: *const PvTable, ex: *mut PvExtremes) -> PvStatus {
    guard(|| {
        let t = obj(t, "table")?;
        let slot = out(ex, "extremes")?;
        let e = extremes_report(&t.table)?;
        *slot = PvExtremes {
            min_s11: e.min_s11.s11_peak,
            min_s11_mixtures: mixtures(e.min_s11.assignment),
            min_s12: e.min_s12.s12_peak,
            min_s12_mixtures: mixtures(e.min_s12.assignment),
            sb_over_pm_s11_percent: e.sb_over_pm_s11.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Markdown study report. The string must be released with
/// [`pv_string_free`].
///
/// # Safety
/// `t` must be a live table handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pv_table_report(t: *const PvTable, out_md: *mut *mut c_char) -> PvStatus {
    guard(|| {
        let t = obj(t, "table")?;
        let slot = out(out_md, "out")?;
        let md = markdown_report(&t.table)?;
        *slot = CString::new(md)
            .map_err(|_| Fail(PvStatus::Invalid, "report contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from a `pv_table_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn pv_table_free(t: *mut PvTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Runs the analytic benchmark suite. Returns `PV_STATUS_OK` when every
/// check passes and `PV_STATUS_SOLVER` otherwise.
///
/// # Safety
/// `passed` and `total` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_validate(passed: *mut usize, total: *mut usize) -> PvStatus {
    guard(|| {
        let p = out(passed, "passed")?;
        let n = out(total, "total")?;
        let checks = paverlay::validate::run_suite();
        *n = checks.len();
        *p = checks.iter().filter(|c| c.passed).count();
        match checks.iter().find(|c| !c.passed) {
            None => Ok(()),
            Some(c) => Err(Fail(PvStatus::Solver, format!("{}: {}", c.name, c.detail))),
        }
    })
}

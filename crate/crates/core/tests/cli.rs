use std::path::Path;
use std::process::{Command, Output};

use paverlay::results::read_history_csv;
use paverlay::study::{SweepTable, SWEEP_HEADER};
use vtkio::model::{Attribute, DataSet, Piece, VertexNumbers};

const TINY: &str = "\
# Short section around one joint, coarse grading.
geometry.length_mm = 1200
geometry.width_mm = 600
geometry.joint_x_mm = 600
geometry.layer = surface, 50, SB, course
geometry.layer = intermediate, 50, SB, course
geometry.layer = leveling, 50, SB, course
geometry.layer = pcc, 220, PCC, slab
geometry.layer = subbase, 180, SUBBASE, subbase
geometry.layer = subgrade, 500, SUBGRADE, subgrade
grading.path_size_mm = 60
grading.course_size_mm = 50
grading.growth = 1.6
grading.max_size_x_mm = 200
grading.max_size_y_mm = 200
grading.max_size_z_mm = 400
load.tire_center_offset_mm = 300
load.step_mm = 40
load.n_increments = 12
load.start_x_mm = 380
";

fn paverlay(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paverlay"))
        .current_dir(dir)
        .env_remove("PAVERLAY_THREADS")
        .args(args)
        .output()
        .unwrap()
}

fn stderr_line(out: &Output) -> String {
    let s = String::from_utf8_lossy(&out.stderr).to_string();
    assert_eq!(s.trim_end().lines().count(), 1, "expected one failure line, got {s:?}");
    s.trim_end().to_string()
}

#[test]
fn validate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = paverlay(dir.path(), &["validate"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.lines().count() >= 7);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn report_from_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = paverlay(dir.path(), &["report", "--fixture"]);
    assert!(out.status.success());
    let md = String::from_utf8(out.stdout).unwrap();
    assert!(md.contains("- SB vs PM: SB is higher by 9.04 %"));
    assert!(md.contains("- SB vs DG: SB is higher by 8.70 %"));
    assert!(md.contains("Lowest S11: 437.35 kPa at surface/base/leveling = PM/PM/PM"));
    assert!(md.contains("paper-fixture"));

    let out = paverlay(dir.path(), &["report", "--fixture", "--out", "rep"]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("rep/report.md")).unwrap(), md);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "load.n_increments = 10\nload.nope = 1\n").unwrap();
    let out = paverlay(dir.path(), &["--config", "bad.cfg", "mesh"]);
    assert_eq!(out.status.code(), Some(1));
    let line = stderr_line(&out);
    assert!(line.starts_with("error kind=parse exit=1:"), "{line}");
    assert!(line.contains("bad.cfg:2") && line.contains("load.nope"), "{line}");

    let out = paverlay(dir.path(), &["--config", "missing.cfg", "mesh"]);
    assert_eq!(out.status.code(), Some(1));
    stderr_line(&out);

    let out = paverlay(dir.path(), &["report"]);
    assert_eq!(out.status.code(), Some(1));
    stderr_line(&out);

    let out = paverlay(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).starts_with("error kind=usage exit=1:"));

    let out = Command::new(env!("CARGO_BIN_EXE_paverlay"))
        .current_dir(dir.path())
        .env("PAVERLAY_THREADS", "zero")
        .arg("mesh")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).contains("PAVERLAY_THREADS"));
}

#[test]
fn invalid_material_names_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let lib = "name = XX\nkind = elastic\nE_inst_Pa = 1e9\nnu = 0.6\n";
    std::fs::write(dir.path().join("mat.txt"), lib).unwrap();
    std::fs::write(dir.path().join("run.cfg"), "materials_file = mat.txt\n").unwrap();
    let out = paverlay(dir.path(), &["--config", "run.cfg", "run"]);
    assert_eq!(out.status.code(), Some(1));
    let line = stderr_line(&out);
    assert!(line.contains("nu") || line.contains("Poisson"), "{line}");
}

#[test]
fn mesh_writes_cache_and_vtk() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tiny.cfg"), TINY).unwrap();
    let out = paverlay(dir.path(), &["-c", "tiny.cfg", "--out", "m", "mesh"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mesh = paverlay::mesh::Mesh::read_cache(&dir.path().join("m/mesh.bin")).unwrap();
    let (cells, _) = load_vtk(&dir.path().join("m/mesh.vtk"));
    assert_eq!(cells, mesh.element_count());
}

/// Cell count and the names of cell attributes of a legacy VTK file.
fn load_vtk(path: &Path) -> (usize, Vec<String>) {
    let vtk = vtkio::Vtk::import(path).unwrap();
    let DataSet::UnstructuredGrid { pieces, .. } = vtk.data else {
        panic!("expected an unstructured grid");
    };
    let Piece::Inline(piece) = &pieces[0] else {
        panic!("expected inline data");
    };
    let cells = match &piece.cells.cell_verts {
        VertexNumbers::Legacy { num_cells, .. } => *num_cells as usize,
        VertexNumbers::XML { offsets, .. } => offsets.len(),
    };
    assert_eq!(piece.cells.types.len(), cells);
    let names = piece
        .data
        .cell
        .iter()
        .map(|a| match a {
            Attribute::DataArray(d) => d.name.clone(),
            Attribute::Field { name, .. } => name.clone(),
        })
        .collect();
    (cells, names)
}

#[test]
fn run_and_sweep_on_a_short_section() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tiny.cfg"), TINY).unwrap();
    let out = paverlay(dir.path(), &["-c", "tiny.cfg", "--out", "r", "run", "--vtk", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = read_history_csv(&dir.path().join("r/history.csv")).unwrap();
    assert_eq!(h.probes().len(), 2);
    assert_eq!(h.records().len(), 24);
    let summary = std::fs::read_to_string(dir.path().join("r/summary.txt")).unwrap();
    assert!(summary.contains("increments = 12"));
    assert!(summary.contains("factorizations = 1"));
    let (_, names) = load_vtk(&dir.path().join("r/fields_0005.vtk"));
    for n in ["S11_kPa", "S22_kPa", "S33_kPa", "S12_kPa", "S13_kPa", "S23_kPa"] {
        assert!(names.iter().any(|x| x == n), "{n} missing from {names:?}");
    }

    let out = paverlay(dir.path(), &["-c", "tiny.cfg", "--out", "s", "sweep", "--limit", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    assert!(text.starts_with(SWEEP_HEADER));
    let t = SweepTable::parse_csv(&text, "sweep.csv").unwrap();
    assert_eq!(t.rows.len(), 2);
    assert!(t.rows.iter().all(|r| r.s11_peak.is_finite()));

    // Statistics need the full 27-case table.
    let out = paverlay(dir.path(), &["report", "--table", "s/sweep.csv"]);
    assert_eq!(out.status.code(), Some(1));
    stderr_line(&out);
}

#[test]
fn thread_override_keeps_results() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tiny.cfg"), TINY).unwrap();
    let a = paverlay(dir.path(), &["-c", "tiny.cfg", "--out", "a", "run"]);
    assert!(a.status.success());
    let b = Command::new(env!("CARGO_BIN_EXE_paverlay"))
        .current_dir(dir.path())
        .env("PAVERLAY_THREADS", "4")
        .args(["-c", "tiny.cfg", "--out", "b", "run"])
        .output()
        .unwrap();
    assert!(b.status.success());
    let ha = std::fs::read(dir.path().join("a/history.csv")).unwrap();
    let hb = std::fs::read(dir.path().join("b/history.csv")).unwrap();
    assert_eq!(ha, hb);
}

/// The full desk passage: 170 history rows per probe and a VTK snapshot at
/// increment 85 with one cell per element.
#[test]
fn desk_run_with_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let out = paverlay(dir.path(), &["--preset", "desk", "--out", "d", "run", "--vtk", "85"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = read_history_csv(&dir.path().join("d/history.csv")).unwrap();
    for &p in h.probes() {
        assert_eq!(h.records().iter().filter(|r| r.element == p).count(), 170);
    }
    let summary = std::fs::read_to_string(dir.path().join("d/summary.txt")).unwrap();
    let elements: usize = summary
        .lines()
        .find_map(|l| l.strip_prefix("elements = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(elements <= 15_000);
    let (cells, names) = load_vtk(&dir.path().join("d/fields_0085.vtk"));
    assert_eq!(cells, elements);
    assert!(names.iter().any(|n| n == "S11_kPa"));
}

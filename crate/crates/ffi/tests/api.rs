use std::ffi::{CStr, CString};
use std::ptr;

use paverlay_ffi::*;

const TINY: &str = "\
geometry.length_mm = 1200
geometry.width_mm = 600
geometry.joint_x_mm = 600
geometry.layer = surface, 50, SB, course
geometry.layer = intermediate, 50, PM, course
geometry.layer = leveling, 50, DG, course
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

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = pv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn version_is_a_string() {
    let v = unsafe { CStr::from_ptr(pv_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn published_table_statistics() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(pv_table_published(&mut t), PvStatus::Ok);
        assert_eq!(pv_table_row_count(t), 27);
        let mut d = 0.0;
        let cases = [
            (PvCourse::Surface, PvQuantity::S11, PvMixture::Sb, PvMixture::Pm, 9.04),
            (PvCourse::Intermediate, PvQuantity::S11, PvMixture::Sb, PvMixture::Dg, 9.27),
            (PvCourse::Leveling, PvQuantity::S12, PvMixture::Dg, PvMixture::Pm, 0.81),
        ];
        for (course, q, m, r, want) in cases {
            assert_eq!(pv_table_course_delta(t, course, q, m, r, &mut d), PvStatus::Ok);
            assert!((d - want).abs() < 0.05, "{d} vs {want}");
        }
        let mut ex = std::mem::MaybeUninit::<PvExtremes>::uninit();
        assert_eq!(pv_table_extremes(t, ex.as_mut_ptr()), PvStatus::Ok);
        let ex = ex.assume_init();
        assert_eq!(ex.min_s11, 437.35);
        assert_eq!(ex.min_s11_mixtures, [PvMixture::Pm; 3]);
        assert_eq!(ex.min_s12, 491.88);
        assert_eq!(ex.min_s12_mixtures, [PvMixture::Sb, PvMixture::Sb, PvMixture::Pm]);
        assert!((ex.sb_over_pm_s11_percent - 54.27).abs() < 5e-3);

        let mut md = ptr::null_mut();
        assert_eq!(pv_table_report(t, &mut md), PvStatus::Ok);
        let text = CStr::from_ptr(md).to_str().unwrap().to_string();
        pv_string_free(md);
        assert!(text.contains("paper-fixture") && text.contains("437.35"));
        pv_table_free(t);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(pv_config_from_str(ptr::null(), &mut cfg), PvStatus::NullPointer);
        assert!(last_error().contains("text"));

        let bad = c("load.n_increments = 5\nsolver.bogus = 1\n");
        assert_eq!(pv_config_from_str(bad.as_ptr(), &mut cfg), PvStatus::Parse);
        assert!(last_error().contains(":2:"), "{}", last_error());
        assert!(cfg.is_null());

        assert_eq!(pv_config_from_preset(c("huge").as_ptr(), &mut cfg), PvStatus::Invalid);
        assert_eq!(pv_config_from_file(c("/nonexistent/x.cfg").as_ptr(), &mut cfg), PvStatus::Io);

        let mut t = ptr::null_mut();
        assert_eq!(pv_table_read_csv(c("/nonexistent/t.csv").as_ptr(), &mut t), PvStatus::Io);

        let mut d = 0.0;
        assert_eq!(
            pv_table_course_delta(ptr::null(), PvCourse::Surface, PvQuantity::S11, PvMixture::Dg, PvMixture::Pm, &mut d),
            PvStatus::NullPointer
        );
        assert_eq!(pv_mesh_element_count(ptr::null()), 0);
        pv_config_free(ptr::null_mut());
        pv_mesh_free(ptr::null_mut());
        pv_passage_free(ptr::null_mut());
        pv_table_free(ptr::null_mut());
        pv_string_free(ptr::null_mut());
    }
}

#[test]
fn config_set_replaces_a_key() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(pv_config_from_preset(c("desk").as_ptr(), &mut cfg), PvStatus::Ok);
        let mut mesh = ptr::null_mut();
        assert_eq!(pv_mesh_build(cfg, &mut mesh), PvStatus::Ok);
        let desk = pv_mesh_element_count(mesh);
        assert!(desk > 0 && desk <= 15_000);
        pv_mesh_free(mesh);

        assert_eq!(pv_config_set(cfg, c("grading.growth").as_ptr(), c("1.6").as_ptr()), PvStatus::Ok);
        assert_eq!(pv_mesh_build(cfg, &mut mesh), PvStatus::Ok);
        assert!(pv_mesh_element_count(mesh) < desk);
        pv_mesh_free(mesh);

        assert_eq!(pv_config_set(cfg, c("solver.tol").as_ptr(), c("1.0").as_ptr()), PvStatus::Parse);
        assert!(last_error().contains("tol"), "{}", last_error());
        assert_eq!(pv_config_set(cfg, c("a\nb").as_ptr(), c("1").as_ptr()), PvStatus::Invalid);
        pv_config_free(cfg);
    }
}

#[test]
fn passage_on_a_short_section() {
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(pv_config_from_str(c(TINY).as_ptr(), &mut cfg), PvStatus::Ok);

        let mut mesh = ptr::null_mut();
        assert_eq!(pv_mesh_build(cfg, &mut mesh), PvStatus::Ok);
        assert!(pv_mesh_node_count(mesh) > pv_mesh_element_count(mesh));
        let vtk = dir.path().join("mesh.vtk");
        assert_eq!(pv_mesh_write_vtk(mesh, c(vtk.to_str().unwrap()).as_ptr()), PvStatus::Ok);
        assert!(std::fs::read_to_string(&vtk).unwrap().starts_with("# vtk DataFile"));
        pv_mesh_free(mesh);

        let mut p = ptr::null_mut();
        assert_eq!(pv_passage_run(cfg, &mut p), PvStatus::Ok);
        assert_eq!(pv_passage_record_count(p), 24);
        assert_eq!(pv_passage_factorizations(p), 1);
        assert!(pv_passage_max_equilibrium_error(p) < 1e-8);

        let (mut above, mut mid) = (0, 0);
        assert_eq!(pv_passage_probe(p, 0, &mut above), PvStatus::Ok);
        assert_eq!(pv_passage_probe(p, 1, &mut mid), PvStatus::Ok);
        assert_ne!(above, mid);
        assert_eq!(pv_passage_probe(p, 2, &mut mid), PvStatus::OutOfRange);

        let mut r = PvRecord::default();
        assert_eq!(pv_passage_record(p, 0, &mut r), PvStatus::Ok);
        assert_eq!((r.increment, r.load_x), (0, 380.0));
        assert!(r.stress.iter().all(|s| s.is_finite()));
        assert_eq!(pv_passage_record(p, 24, &mut r), PvStatus::OutOfRange);

        let mut peak = f64::NEG_INFINITY;
        for i in 0..24 {
            pv_passage_record(p, i, &mut r);
            if r.element == above {
                peak = peak.max(r.stress[0]);
            }
        }
        let mut env = PvEnvelope::default();
        assert_eq!(pv_passage_envelope(p, above, &mut env), PvStatus::Ok);
        assert_eq!(env.s11_peak, peak);
        assert_eq!(pv_passage_envelope(p, usize::MAX, &mut env), PvStatus::Invalid);

        let csv = dir.path().join("h.csv");
        assert_eq!(pv_passage_write_csv(p, c(csv.to_str().unwrap()).as_ptr()), PvStatus::Ok);
        assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 25);
        pv_passage_free(p);
        pv_config_free(cfg);
    }
}

#[test]
fn validate_suite_passes() {
    let (mut passed, mut total) = (0, 0);
    assert_eq!(unsafe { pv_validate(&mut passed, &mut total) }, PvStatus::Ok);
    assert!(total >= 7);
    assert_eq!(passed, total);
}

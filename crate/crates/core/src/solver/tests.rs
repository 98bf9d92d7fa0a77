use super::*;
use crate::loading::uniform_pressure_forces;
use crate::materials::{relaxation_modulus, PronyTerm, ShiftFactor};
use crate::mesh::{JointSpec, LayerRole, LayerSpec, PavementGrading};
use approx::assert_relative_eq;

fn block(xs: &[f64], ys: &[f64], zs: &[f64]) -> Mesh {
    let depth = *zs.last().unwrap();
    Mesh::from_axes(
        vec![LayerSpec::new("blk", depth, "B", LayerRole::Subgrade)],
        xs.to_vec(),
        ys.to_vec(),
        zs.to_vec(),
        JointSpec::default(),
        0.0,
    )
    .unwrap()
}

fn elastic(e: f64, nu: f64) -> MaterialRecord {
    MaterialRecord::elastic("B", e, nu).unwrap()
}

fn visco() -> MaterialRecord {
    MaterialRecord::viscoelastic(
        "V",
        3000.0,
        0.35,
        vec![
            PronyTerm {
                weight: 0.3,
                relaxation_time: 0.1,
            },
            PronyTerm {
                weight: 0.4,
                relaxation_time: 1.0,
            },
        ],
        ShiftFactor::identity(),
    )
    .unwrap()
}

/// Normal rollers on the four sides and the base.
fn box_rollers(mesh: &Mesh) -> Constraints {
    let mut c = Constraints::new();
    let (l, w) = (mesh.length(), mesh.width());
    for (n, p) in mesh.nodes().iter().enumerate() {
        if p[0] == 0.0 || p[0] == l {
            c.fix(3 * n, 0.0);
        }
        if p[1] == 0.0 || p[1] == w {
            c.fix(3 * n + 1, 0.0);
        }
        if p[2] == 0.0 {
            c.fix(3 * n + 2, 0.0);
        }
    }
    c
}

#[test]
fn patch_test_uniaxial_strain() {
    let mesh = block(&[0.0, 3.0, 7.0, 12.0], &[0.0, 2.0, 5.0, 9.0], &[0.0, 4.0, 6.0, 10.0]);
    let (e, nu, p) = (1000.0, 0.3, 0.5);
    let mut sim =
        Simulation::with_materials(&mesh, vec![elastic(e, nu)], box_rollers(&mesh), SolveSettings::default()).unwrap();
    let f = uniform_pressure_forces(&mesh, p).to_dense(3 * mesh.node_count());
    let rep = sim.step(&f, 1.0, 0.0).unwrap();
    assert!(rep.equilibrium_error < 1e-12, "{}", rep.equilibrium_error);
    let lateral = -p * nu / (1.0 - nu);
    let all: Vec<usize> = (0..mesh.element_count()).collect();
    for s in sim.recover_stress(&all).unwrap() {
        let s = s.map(|v| v / MPA_TO_KPA);
        assert_relative_eq!(s[2], -p, max_relative = 1e-10);
        assert_relative_eq!(s[0], lateral, max_relative = 1e-10);
        assert_relative_eq!(s[1], lateral, max_relative = 1e-10);
        for c in 3..6 {
            assert!(s[c].abs() < 1e-10 * p);
        }
    }
    let (total, hourglass) = sim.energies();
    assert!(total > 0.0 && hourglass.abs() < 1e-12 * total);
}

#[test]
fn patch_test_prescribed_linear_fields() {
    let xs = [0.0, 2.0, 5.0, 6.0, 10.0];
    let ys = [0.0, 1.5, 4.0, 8.0];
    let zs = [0.0, 3.0, 3.5, 7.0];
    let mesh = block(&xs, &ys, &zs);
    let (e, nu) = (2500.0, 0.25);
    let (g, k) = crate::materials::elastic_moduli(e, nu).unwrap();
    let (lam, mu) = lame(g, k);
    let grads = [
        [[1e-3, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[2e-4, 5e-4, -1e-4], [3e-4, -6e-4, 2e-4], [1e-4, 0.0, 4e-4]],
        [[0.0, 1e-3, 0.0], [1e-3, 0.0, 0.0], [0.0, 0.0, 0.0]],
    ];
    for grad in grads {
        let mut c = Constraints::new();
        for (n, p) in mesh.nodes().iter().enumerate() {
            let on_boundary = p[0] == 0.0 || p[0] == 10.0 || p[1] == 0.0 || p[1] == 8.0 || p[2] == 0.0 || p[2] == 7.0;
            if on_boundary {
                for i in 0..3 {
                    c.fix(3 * n + i, (0..3).map(|j| grad[i][j] * p[j]).sum());
                }
            }
        }
        let mut sim = Simulation::with_materials(&mesh, vec![elastic(e, nu)], c, SolveSettings::default()).unwrap();
        assert!(sim.equation_count() > 0);
        sim.step(&vec![0.0; 3 * mesh.node_count()], 1.0, 0.0).unwrap();
        let eps = [
            grad[0][0],
            grad[1][1],
            grad[2][2],
            grad[0][1] + grad[1][0],
            grad[0][2] + grad[2][0],
            grad[1][2] + grad[2][1],
        ];
        let tr = eps[0] + eps[1] + eps[2];
        let want = [
            lam * tr + 2.0 * mu * eps[0],
            lam * tr + 2.0 * mu * eps[1],
            lam * tr + 2.0 * mu * eps[2],
            mu * eps[3],
            mu * eps[4],
            mu * eps[5],
        ];
        let scale = want.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for s in &sim.state().stress {
            for c in 0..6 {
                assert!((s[c] - want[c]).abs() <= 1e-10 * scale, "{} vs {}", s[c], want[c]);
            }
        }
        let (total, hourglass) = sim.energies();
        assert!(hourglass.abs() < 0.05 * total);
    }
}

/// One element under held uniaxial extension with free lateral faces.
fn uniaxial_relaxation(mat: MaterialRecord, strain: f64) -> (Simulation, f64) {
    let h = 10.0;
    let mesh = block(&[0.0, h], &[0.0, h], &[0.0, h]);
    let mut c = Constraints::new();
    for (n, p) in mesh.nodes().iter().enumerate() {
        if p[0] == 0.0 {
            c.fix(3 * n, 0.0);
        }
        if p[1] == 0.0 {
            c.fix(3 * n + 1, 0.0);
        }
        if p[2] == 0.0 {
            c.fix(3 * n + 2, 0.0);
        }
        if p[2] == h {
            c.fix(3 * n + 2, strain * h);
        }
    }
    let sim = Simulation::with_materials(&mesh, vec![mat], c, SolveSettings::default()).unwrap();
    (sim, h)
}

#[test]
fn held_extension_relaxes_like_prony_with_constant_poisson_ratio() {
    let mat = visco();
    let (shear, _) = mat.series();
    let tau1 = 0.1;
    let strain = 1e-3;
    let (mut sim, _) = uniaxial_relaxation(mat.clone(), strain);
    let zero = vec![0.0; 3 * sim.mesh().node_count()];
    let t0 = 1e-12 * tau1;
    sim.step(&zero, t0, 0.0).unwrap();
    let mut t = t0;
    let dt = tau1 / 10.0;
    let check = |sim: &Simulation, t: f64| {
        let s = sim.state().stress[0];
        let e_r = 2.0 * (1.0 + 0.35) * relaxation_modulus(&shear, mat.shift, t).unwrap();
        assert_relative_eq!(s[2], e_r * strain, max_relative = 1e-8);
        for c in [0, 1, 3, 4, 5] {
            assert!(s[c].abs() < 1e-10 * s[2].abs(), "component {c}: {}", s[c]);
        }
        let e = sim.state().points[0].strain;
        assert_relative_eq!(-e[0] / e[2], 0.35, epsilon = 1e-3);
        assert_relative_eq!(-e[1] / e[2], 0.35, epsilon = 1e-3);
    };
    check(&sim, t);
    for _ in 0..100 {
        sim.step(&zero, dt, 0.0).unwrap();
        t += dt;
        check(&sim, t);
    }
    assert_eq!(sim.factorizations(), 2);
}

#[test]
fn effective_moduli_limits() {
    let mat = visco();
    let (shear, _) = mat.series();
    let mesh = block(&[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0]);
    let sim = Simulation::with_materials(&mesh, vec![mat], box_rollers(&mesh), SolveSettings::default()).unwrap();
    let tiny = sim.effective_stiffness(1e-6 * 0.1).unwrap();
    assert_relative_eq!(tiny.coefficients(0).shear_effective, shear.instantaneous_modulus(), max_relative = 1e-6);
    let tinier = sim.effective_stiffness(1e-16).unwrap();
    assert_relative_eq!(tinier.coefficients(0).shear_effective, shear.instantaneous_modulus(), max_relative = 1e-9);

    // dt = τ1: hand evaluation of G∞ + Σ g G0 τ/Δξ (1 - exp(-Δξ/τ)).
    let g0 = 3000.0 / 2.7;
    let hand = g0 * (1.0 - 0.7) + 0.3 * g0 * (1.0 - (-1.0f64).exp()) + 0.4 * g0 * 10.0 * (1.0 - (-0.1f64).exp());
    let op = sim.effective_stiffness(0.1).unwrap();
    assert_relative_eq!(op.coefficients(0).shear_effective, hand, max_relative = 1e-12);
}

#[test]
fn elastic_operator_independent_of_dt() {
    let mesh = block(&[0.0, 1.0, 3.0], &[0.0, 2.0], &[0.0, 1.0, 2.0]);
    let sim = Simulation::with_materials(&mesh, vec![elastic(100.0, 0.2)], box_rollers(&mesh), SolveSettings::default())
        .unwrap();
    let a = sim.effective_stiffness(0.009).unwrap();
    let b = sim.effective_stiffness(123.0).unwrap();
    assert_eq!(a.matrix, b.matrix);
}

#[test]
fn missing_supports_are_singular() {
    let mesh = block(&[0.0, 1.0, 2.0], &[0.0, 1.0], &[0.0, 1.0]);
    let mut sim =
        Simulation::with_materials(&mesh, vec![elastic(100.0, 0.2)], Constraints::new(), SolveSettings::default())
            .unwrap();
    let err = sim.step(&vec![0.0; 3 * mesh.node_count()], 1.0, 0.0).unwrap_err();
    assert!(err.to_string().contains("positive definite"), "{err}");
}

#[test]
fn settings_are_validated() {
    let mesh = block(&[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0]);
    for s in [
        SolveSettings {
            hourglass_coeff: 0.2,
            ..Default::default()
        },
        SolveSettings {
            tol: 0.1,
            ..Default::default()
        },
        SolveSettings {
            threads: 0,
            ..Default::default()
        },
    ] {
        let err = Simulation::with_materials(&mesh, vec![elastic(1.0, 0.2)], Constraints::new(), s).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}

#[test]
fn recover_stress_checks_ids() {
    let mesh = block(&[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0]);
    let sim = Simulation::with_materials(&mesh, vec![elastic(1.0, 0.2)], box_rollers(&mesh), SolveSettings::default())
        .unwrap();
    assert_eq!(sim.recover_stress(&[0]).unwrap(), vec![[0.0; 6]]);
    assert!(sim.recover_stress(&[1]).is_err());
}

/// Short pavement section symmetric about its joint.
pub(crate) fn mini_pavement() -> (Mesh, MaterialCatalog) {
    let layers = vec![
        LayerSpec::new("surface", 50.0, "SB", LayerRole::Course),
        LayerSpec::new("intermediate", 50.0, "PM", LayerRole::Course),
        LayerSpec::new("leveling", 50.0, "DG", LayerRole::Course),
        LayerSpec::new("pcc", 220.0, "PCC", LayerRole::Slab),
        LayerSpec::new("subbase", 180.0, "SUBBASE", LayerRole::Subbase),
        LayerSpec::new("subgrade", 500.0, "SUBGRADE", LayerRole::Subgrade),
    ];
    let th: Vec<f64> = layers.iter().map(|l| l.thickness).collect();
    let grading = PavementGrading {
        joint_size: 10.0,
        joint_zone: 0.0,
        path_size: 60.0,
        path_half_width: 120.0,
        course_size: 50.0,
        growth: 1.6,
        max_size_x: 200.0,
        max_size_y: 200.0,
        max_size_z: 400.0,
    }
    .build(1200.0, 600.0, 600.0, 10.0, 300.0, &th, 3)
    .unwrap();
    let mesh = crate::mesh::generate(&crate::mesh::MeshSpec {
        layers,
        length: 1200.0,
        width: 600.0,
        grading,
        joint: JointSpec {
            position: 600.0,
            gap_width: 10.0,
        },
        wheel_path_y: 300.0,
    })
    .unwrap();
    (mesh, MaterialCatalog::placeholder())
}

fn mini_passage(settings: &SolveSettings, probes: &[usize]) -> PassageOutcome {
    let (mesh, catalog) = mini_pavement();
    let fp = [Footprint::new(220.0, 240.0, 300.0).unwrap()];
    let schedule = LoadSchedule::uniform(110.0, 100.0, 0.009, 10).unwrap();
    let spec = PassageSpec {
        footprints: &fp,
        pressure: PressureModel::new(1.2, 110.0).unwrap(),
        schedule: &schedule,
        probes,
        snapshots: &[],
    };
    run_passage(&mesh, &catalog, &spec, settings).unwrap()
}

fn mini_probes() -> Vec<usize> {
    let (mesh, _) = mini_pavement();
    let mut p = mesh
        .probe_elements("leveling", crate::mesh::ProbeRelation::AboveJoint)
        .unwrap();
    p.truncate(1);
    p.push(mesh.probe_at("surface", 300.0, 300.0).unwrap());
    p.push(mesh.probe_at("subgrade", 900.0, 100.0).unwrap());
    p
}

#[test]
fn passage_is_thread_count_independent() {
    let probes = mini_probes();
    let one = mini_passage(&SolveSettings::default(), &probes);
    let eight = mini_passage(
        &SolveSettings {
            threads: 8,
            ..Default::default()
        },
        &probes,
    );
    assert_eq!(one.history, eight.history);
    assert_eq!(one.factorizations, 1);
    assert!(one.equilibrium_errors.iter().all(|&e| e < 1e-8), "{:?}", one.equilibrium_errors);
}

#[test]
fn reused_factorization_matches_refactorizing() {
    let probes = mini_probes();
    let reuse = mini_passage(&SolveSettings::default(), &probes);
    let fresh = mini_passage(
        &SolveSettings {
            reuse_factorization: false,
            ..Default::default()
        },
        &probes,
    );
    assert_eq!(fresh.factorizations, 10);
    for (a, b) in reuse.history.records().iter().zip(fresh.history.records()) {
        for c in 0..6 {
            assert_relative_eq!(a.stress[c], b.stress[c], epsilon = 1e-9, max_relative = 1e-10);
        }
    }
}

#[test]
fn iterative_solver_matches_direct() {
    let probes = mini_probes();
    let direct = mini_passage(&SolveSettings::default(), &probes);
    let cg = mini_passage(
        &SolveSettings {
            solver: SolverKind::Cg,
            tol: 1e-12,
            ..Default::default()
        },
        &probes,
    );
    assert!(cg.cg_iterations.iter().all(|&n| n > 0));
    let scale = direct
        .history
        .records()
        .iter()
        .flat_map(|r| r.stress)
        .map(f64::abs)
        .fold(0.0, f64::max);
    for (a, b) in direct.history.records().iter().zip(cg.history.records()) {
        for c in 0..6 {
            assert!((a.stress[c] - b.stress[c]).abs() < 1e-6 * scale);
        }
    }
}

#[test]
fn mirrored_loads_give_mirrored_stresses() {
    let (mesh, catalog) = mini_pavement();
    let (nx, _, _) = mesh.dims();
    let xs = mesh.xs();
    for i in 0..=nx {
        assert_relative_eq!(xs[i] + xs[nx - i], 1200.0, max_relative = 1e-12);
    }
    let fp = [Footprint::new(220.0, 240.0, 300.0).unwrap()];
    let pm = PressureModel::new(1.2, 110.0).unwrap();
    let solve_at = |x: f64| {
        let mut sim =
            Simulation::new(&mesh, &catalog, Constraints::pavement(&mesh), SolveSettings::default()).unwrap();
        let f = nodal_forces(&mesh, &fp, &pm, x).unwrap().to_dense(3 * mesh.node_count());
        sim.step(&f, 0.009, x).unwrap();
        sim.state().stress.clone()
    };
    let a = solve_at(600.0 - 170.0);
    let b = solve_at(600.0 + 170.0);
    let scale = a.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    for e in 0..mesh.element_count() {
        let [i, j, k] = mesh.element_cell(e);
        let m = mesh.cell_element(nx - 1 - i, j, k).unwrap();
        let sign = [1.0, 1.0, 1.0, -1.0, -1.0, 1.0];
        for c in 0..6 {
            assert!(
                (a[e][c] - sign[c] * b[m][c]).abs() <= 1e-9 * scale,
                "element {e} comp {c}: {} vs {}",
                a[e][c],
                b[m][c]
            );
        }
    }
}

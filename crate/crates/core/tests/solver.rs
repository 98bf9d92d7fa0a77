use paverlay::loading::{nodal_forces, Footprint, PressureModel};
use paverlay::materials::MaterialRecord;
use paverlay::mesh::{JointSpec, LayerRole, LayerSpec, Mesh};
use paverlay::solver::{Constraints, Simulation};

fn axis(length: f64, h: f64) -> Vec<f64> {
    let n = (length / h).round() as usize;
    (0..=n).map(|i| i as f64 * h).collect()
}

/// Stiff 40 mm course over a soft base under one half footprint. Returns the
/// volume average of S11 (MPa) over x in [0, 80], y in [0, 40] and the lower
/// half of the course, a functional every grid below resolves exactly.
fn course_average(h: f64) -> (f64, usize) {
    let layers = vec![
        LayerSpec::new("top", 40.0, "T", LayerRole::Course),
        LayerSpec::new("base", 120.0, "B", LayerRole::Subgrade),
    ];
    let mesh = Mesh::from_axes(
        layers,
        axis(240.0, h),
        axis(120.0, h),
        axis(160.0, h),
        JointSpec::default(),
        30.0,
    )
    .unwrap();
    let materials = vec![
        MaterialRecord::elastic("T", 3000.0, 0.35).unwrap(),
        MaterialRecord::elastic("B", 100.0, 0.4).unwrap(),
    ];
    let c = Constraints::pavement(&mesh);
    let mut sim = Simulation::with_materials(&mesh, materials, c, Default::default()).unwrap();
    let fp = [Footprint::new(80.0, 60.0, 30.0).unwrap()];
    let model = PressureModel::new(0.7, 40.0).unwrap();
    let f = nodal_forces(&mesh, &fp, &model, 40.0).unwrap().to_dense(3 * mesh.node_count());
    sim.step(&f, 1.0, 40.0).unwrap();
    let (mut sum, mut vol) = (0.0, 0.0);
    for e in 0..mesh.element_count() {
        let c = mesh.centroid(e);
        if c[0] < 80.0 && c[1] < 40.0 && c[2] > 120.0 && c[2] < 140.0 {
            let s = mesh.element_size(e);
            let v = s[0] * s[1] * s[2];
            sum += sim.state().stress[e][0] * v;
            vol += v;
        }
    }
    assert!((vol - 80.0 * 40.0 * 20.0).abs() < 1e-6);
    (sum / vol, mesh.element_count())
}

#[test]
fn refinement_converges_monotonically() {
    let levels: Vec<_> = [20.0, 10.0, 5.0].into_iter().map(course_average).collect();
    for (v, n) in &levels {
        println!("elements {n:>6}: mean S11 {v:.5} MPa");
    }
    let d1 = (levels[1].0 - levels[0].0).abs();
    let d2 = (levels[2].0 - levels[1].0).abs();
    assert!(levels.iter().all(|(v, _)| *v > 0.0), "course bottom should be in tension: {levels:?}");
    assert!(d2 < d1, "differences {d1:.3e} then {d2:.3e}");
}

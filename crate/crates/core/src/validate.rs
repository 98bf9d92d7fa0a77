//! Analytic benchmark suite run by `paverlay validate`.
//!
//! Every check compares the implementation with a closed form or with an
//! independent quadrature. Nothing here is random.

use std::f64::consts::PI;

use crate::config::{Preset, RunConfig};
use crate::loading::{nodal_forces, uniform_pressure_forces};
use crate::materials::{relaxation_modulus, MaterialRecord, PronyTerm, ShiftFactor, ViscoPointState};
use crate::mesh::{JointSpec, LayerRole, LayerSpec, Mesh};
use crate::solver::{lame, Constraints, SolveSettings, Simulation};
use crate::study::{course_stats, extremes_report, published_table, Course, Mixture};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from(name: &'static str, r: Result<(bool, String)>) -> Check {
        match r {
            Ok((passed, detail)) => Check { name, passed, detail },
            Err(e) => Check {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        }
    }
}

/// Runs all checks in a fixed order.
pub fn run_suite() -> Vec<Check> {
    vec![
        Check::from("patch-uniaxial-strain", patch_uniaxial()),
        Check::from("patch-linear-field", patch_linear_field()),
        Check::from("relaxation-prony", relaxation(false)),
        Check::from("constant-poisson-ratio", relaxation(true)),
        Check::from("hereditary-quadrature", hereditary()),
        Check::from("load-resultant", load_resultant()),
        Check::from("published-table-statistics", published_statistics()),
    ]
}

fn block(xs: &[f64], ys: &[f64], zs: &[f64]) -> Result<Mesh> {
    Mesh::from_axes(
        vec![LayerSpec::new("block", *zs.last().unwrap_or(&1.0), "B", LayerRole::Subgrade)],
        xs.to_vec(),
        ys.to_vec(),
        zs.to_vec(),
        JointSpec::default(),
        0.0,
    )
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.abs().max(f64::MIN_POSITIVE)
}

fn patch_uniaxial() -> Result<(bool, String)> {
    let mesh = block(&[0.0, 3.0, 7.0, 12.0], &[0.0, 2.0, 5.0, 9.0], &[0.0, 4.0, 6.0, 10.0])?;
    let (e, nu, p) = (1000.0, 0.3, 0.5);
    let mut c = Constraints::new();
    let (l, w) = (mesh.length(), mesh.width());
    for (n, x) in mesh.nodes().iter().enumerate() {
        if x[0] == 0.0 || x[0] == l {
            c.fix(3 * n, 0.0);
        }
        if x[1] == 0.0 || x[1] == w {
            c.fix(3 * n + 1, 0.0);
        }
        if x[2] == 0.0 {
            c.fix(3 * n + 2, 0.0);
        }
    }
    let mut sim = Simulation::with_materials(&mesh, vec![MaterialRecord::elastic("B", e, nu)?], c, Default::default())?;
    let f = uniform_pressure_forces(&mesh, p).to_dense(3 * mesh.node_count());
    sim.step(&f, 1.0, 0.0)?;
    let lateral = -p * nu / (1.0 - nu);
    let want = [lateral, lateral, -p, 0.0, 0.0, 0.0];
    let err = worst(&sim.state().stress, &want);
    Ok((err <= 1e-10, format!("max relative stress error {err:.2e} over {} elements", mesh.element_count())))
}

fn worst(stress: &[[f64; 6]], want: &[f64; 6]) -> f64 {
    let scale = want.iter().map(|v| v.abs()).fold(0.0, f64::max);
    stress
        .iter()
        .flat_map(|s| (0..6).map(move |c| rel(s[c], want[c], scale)))
        .fold(0.0, f64::max)
}

fn patch_linear_field() -> Result<(bool, String)> {
    let (xs, ys, zs) = ([0.0, 2.0, 5.0, 6.0, 10.0], [0.0, 1.5, 4.0, 8.0], [0.0, 3.0, 3.5, 7.0]);
    let mesh = block(&xs, &ys, &zs)?;
    let (e, nu) = (2500.0, 0.25);
    let (g, k) = crate::materials::elastic_moduli(e, nu)?;
    let (lam, mu) = lame(g, k);
    let grad = [[2e-4, 5e-4, -1e-4], [3e-4, -6e-4, 2e-4], [1e-4, 0.0, 4e-4]];
    let mut c = Constraints::new();
    for (n, x) in mesh.nodes().iter().enumerate() {
        let boundary = x[0] == 0.0 || x[0] == 10.0 || x[1] == 0.0 || x[1] == 8.0 || x[2] == 0.0 || x[2] == 7.0;
        if boundary {
            for i in 0..3 {
                c.fix(3 * n + i, (0..3).map(|j| grad[i][j] * x[j]).sum());
            }
        }
    }
    let mut sim = Simulation::with_materials(&mesh, vec![MaterialRecord::elastic("B", e, nu)?], c, Default::default())?;
    sim.step(&vec![0.0; 3 * mesh.node_count()], 1.0, 0.0)?;
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
    let err = worst(&sim.state().stress, &want);
    let (total, hg) = sim.energies();
    let ratio = hg / total;
    Ok((
        err <= 1e-10 && ratio < 0.05,
        format!("max relative stress error {err:.2e}, hourglass energy share {ratio:.2e}"),
    ))
}

fn relaxing_material() -> Result<MaterialRecord> {
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
}

/// One element held at a fixed axial extension with free lateral faces.
/// Checks the axial stress against E(t) = 2(1 + ν)G(t), or the lateral
/// contraction ratio against ν.
fn relaxation(poisson: bool) -> Result<(bool, String)> {
    let mat = relaxing_material()?;
    let (shear, _) = mat.series();
    let nu = mat.poissons_ratio;
    let tau1 = 0.1;
    let (h, strain) = (10.0, 1e-3);
    let mesh = block(&[0.0, h], &[0.0, h], &[0.0, h])?;
    let mut c = Constraints::new();
    for (n, x) in mesh.nodes().iter().enumerate() {
        for i in 0..3 {
            if x[i] == 0.0 {
                c.fix(3 * n + i, 0.0);
            }
        }
        if x[2] == h {
            c.fix(3 * n + 2, strain * h);
        }
    }
    let mut sim = Simulation::with_materials(&mesh, vec![mat.clone()], c, SolveSettings::default())?;
    let zero = vec![0.0; 3 * mesh.node_count()];
    let mut t = 1e-12 * tau1;
    sim.step(&zero, t, 0.0)?;
    let mut worst_stress = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut sample = |sim: &Simulation, t: f64| -> Result<()> {
        let s = sim.state().stress[0];
        let want = 2.0 * (1.0 + nu) * relaxation_modulus(&shear, mat.shift, t)? * strain;
        worst_stress = worst_stress.max(rel(s[2], want, want));
        let e = sim.state().points[0].strain;
        worst_ratio = worst_ratio.max((-e[0] / e[2] - nu).abs()).max((-e[1] / e[2] - nu).abs());
        Ok(())
    };
    sample(&sim, t)?;
    let dt = tau1 / 10.0;
    for _ in 0..100 {
        sim.step(&zero, dt, 0.0)?;
        t += dt;
        sample(&sim, t)?;
    }
    if poisson {
        Ok((
            worst_ratio <= 1e-3,
            format!("max |lateral/axial strain ratio - {nu}| = {worst_ratio:.2e}"),
        ))
    } else {
        Ok((
            worst_stress <= 1e-8,
            format!("max relative error against the Prony curve {worst_stress:.2e} over t in [0, 10 tau1]"),
        ))
    }
}

/// Shear stress of a single point under a piecewise-linear engineering
/// shear strain history, against composite Simpson quadrature of
/// ∫ G(t - s) dγ/ds ds.
fn hereditary() -> Result<(bool, String)> {
    let terms = vec![
        PronyTerm {
            weight: 0.25,
            relaxation_time: 0.02,
        },
        PronyTerm {
            weight: 0.35,
            relaxation_time: 0.2,
        },
        PronyTerm {
            weight: 0.2,
            relaxation_time: 2.0,
        },
    ];
    let mat = MaterialRecord::viscoelastic("H", 2000.0, 0.3, terms, ShiftFactor::new(0.5)?)?;
    let (shear, _) = mat.series();
    let steps = 50;
    let dt = 0.01;
    let knots: Vec<f64> = (0..=steps)
        .map(|k| if k == 0 { 0.0 } else { 1e-3 * ((0.37 * k as f64).sin() + 0.5 * (1.3 * k as f64).cos()) })
        .collect();
    let mut state = ViscoPointState::for_material(&mat);
    let coeffs = mat.step_coefficients(dt)?;
    let mut got = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut de = [0.0; 6];
        de[3] = knots[k + 1] - knots[k];
        got.push(coeffs.advance(&mut state, &de)[3]);
    }
    let sub = 10_000 / steps;
    let mut err = 0.0f64;
    let mut peak = 0.0f64;
    let mut oracle = Vec::with_capacity(steps);
    for n in 1..=steps {
        let t = n as f64 * dt;
        let mut acc = 0.0;
        for k in 0..n {
            let rate = (knots[k + 1] - knots[k]) / dt;
            let h = dt / sub as f64;
            let mut seg = 0.0;
            for j in 0..=sub {
                let s = k as f64 * dt + j as f64 * h;
                let w = if j == 0 || j == sub {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                seg += w * relaxation_modulus(&shear, mat.shift, (t - s).max(0.0))?;
            }
            acc += rate * seg * h / 3.0;
        }
        peak = peak.max(acc.abs());
        oracle.push(acc);
    }
    for (a, b) in got.iter().zip(&oracle) {
        err = err.max(rel(*a, *b, peak));
    }
    Ok((err <= 1e-6, format!("max error {err:.2e} relative to the peak stress over {steps} steps")))
}

fn load_resultant() -> Result<(bool, String)> {
    let cfg = RunConfig::preset(Preset::Desk);
    let mesh = cfg.build_mesh()?;
    let fps = cfg.footprints()?;
    let model = cfg.pressure()?;
    let schedule = cfg.schedule()?;
    let a = cfg.load.footprint_length / 2.0;
    let want = cfg.load.p_max * PI / 2.0 * a * cfg.load.footprint_width * fps.len() as f64;
    let mut err = 0.0f64;
    for inc in &schedule.increments {
        let f = nodal_forces(&mesh, &fps, &model, inc.center_x)?;
        err = err.max(rel(-f.total(2), want, want));
    }
    Ok((
        err <= 1e-9,
        format!(
            "{} increments, resultant {want:.1} N, max relative error {err:.2e}",
            schedule.len()
        ),
    ))
}

fn published_statistics() -> Result<(bool, String)> {
    use Mixture::*;
    let t = published_table();
    let s = course_stats(&t, Course::Surface)?;
    let b = course_stats(&t, Course::Intermediate)?;
    let l = course_stats(&t, Course::Leveling)?;
    let cases = [
        (s.s11_delta(SB, PM), 9.04, 0.05),
        (s.s11_delta(SB, DG), 8.70, 0.05),
        (s.s12_delta(PM, SB), 2.56, 0.05),
        (s.s12_delta(DG, SB), 2.38, 0.05),
        (b.s11_delta(SB, PM), 10.04, 0.05),
        (b.s11_delta(SB, DG), 9.27, 0.05),
        (l.s11_delta(SB, PM), 29.65, 0.05),
        (l.s11_delta(DG, PM), 8.94, 0.05),
        (l.s12_delta(DG, PM), 0.81, 0.05),
        (l.s12_delta(SB, PM), 4.64, 0.10),
    ];
    let bad = cases.iter().filter(|(got, want, tol)| (got - want).abs() > *tol).count();
    let ex = extremes_report(&t)?;
    let gap = ex.sb_over_pm_s11.unwrap_or(f64::NAN);
    let extremes_ok = ex.min_s11.s11_peak == 437.35 && ex.min_s12.s12_peak == 491.88 && (gap - 54.27).abs() < 5e-3;
    Ok((
        bad == 0 && extremes_ok,
        format!("{} of {} course deltas within tolerance, all-SB/all-PM gap {gap:.2} %", cases.len() - bad, cases.len()),
    ))
}

#[cfg(test)]
mod tests {
    #[test]
    fn suite_passes() {
        for c in super::run_suite() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}

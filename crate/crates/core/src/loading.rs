//! Tire footprints, semi-elliptical contact pressure and the moving-load
//! schedule.
//!
//! Units: mm, N, MPa. Only vertical contact pressure is applied; surface
//! shear tractions are not modeled.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Rectangular contact area of one tire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    /// Longitudinal length `2a`, mm.
    pub length: f64,
    /// Transverse width, mm.
    pub width: f64,
    /// Center of the footprint measured from the symmetry plane, mm.
    pub center_offset: f64,
}

impl Footprint {
    pub fn new(length: f64, width: f64, center_offset: f64) -> Result<Self> {
        if !(length > 0.0 && width > 0.0) {
            return Err(Error::Load(format!(
                "footprint dimensions must be > 0, got {length} x {width}"
            )));
        }
        Ok(Footprint {
            length,
            width,
            center_offset,
        })
    }

    pub fn y_range(&self) -> (f64, f64) {
        (
            self.center_offset - self.width / 2.0,
            self.center_offset + self.width / 2.0,
        )
    }
}

/// Semi-elliptical longitudinal pressure profile, uniform transversely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureModel {
    /// Peak pressure at the footprint center, MPa.
    pub p_max: f64,
    /// Half of the footprint length, mm.
    pub half_length: f64,
}

impl PressureModel {
    pub fn new(p_max: f64, half_length: f64) -> Result<Self> {
        if !(p_max > 0.0 && half_length > 0.0) {
            return Err(Error::Load(format!(
                "pressure model needs p_max > 0 and a > 0, got {p_max}, {half_length}"
            )));
        }
        Ok(PressureModel { p_max, half_length })
    }

    /// Resultant force of one footprint, N: `p_max (π/2) a w`.
    pub fn resultant(&self, footprint: &Footprint) -> f64 {
        self.p_max * std::f64::consts::FRAC_PI_2 * self.half_length * footprint.width
    }
}

/// Contact pressure at longitudinal distance `x_local` from the footprint
/// center; zero outside the footprint.
pub fn pressure_at(model: &PressureModel, x_local: f64) -> f64 {
    let s = x_local / model.half_length;
    if s.abs() >= 1.0 {
        0.0
    } else {
        model.p_max * (1.0 - s * s).sqrt()
    }
}

/// Antiderivative of `sqrt(1 - s²)`.
fn ellipse_area(s: f64) -> f64 {
    let s = s.clamp(-1.0, 1.0);
    0.5 * (s * (1.0 - s * s).sqrt() + s.asin())
}

/// Antiderivative of `s sqrt(1 - s²)`.
fn ellipse_moment(s: f64) -> f64 {
    let s = s.clamp(-1.0, 1.0);
    -(1.0 - s * s).powf(1.5) / 3.0
}

/// Sparse nodal force vector: `(dof, value)` sorted by dof, no duplicates.
/// Dofs are `3 * node + component`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodalForces {
    pub entries: Vec<(usize, f64)>,
}

impl NodalForces {
    fn from_map(map: BTreeMap<usize, f64>) -> Self {
        NodalForces {
            entries: map.into_iter().collect(),
        }
    }

    pub fn total(&self, component: usize) -> f64 {
        self.entries
            .iter()
            .filter(|(d, _)| d % 3 == component)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn add_to(&self, dense: &mut [f64]) {
        for &(d, v) in &self.entries {
            dense[d] += v;
        }
    }

    pub fn to_dense(&self, ndof: usize) -> Vec<f64> {
        let mut v = vec![0.0; ndof];
        self.add_to(&mut v);
        v
    }
}

/// Consistent nodal forces of all `footprints` with their centers at
/// longitudinal position `center_x`.
///
/// Each loaded top face is clipped to the footprint rectangle and the
/// product of the pressure and the bilinear face shape functions is
/// integrated in closed form, so the resultant is exact on any mesh.
pub fn nodal_forces(
    mesh: &Mesh,
    footprints: &[Footprint],
    model: &PressureModel,
    center_x: f64,
) -> Result<NodalForces> {
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for fp in footprints {
        if (fp.length / 2.0 - model.half_length).abs() > 1e-9 * fp.length {
            return Err(Error::Load(format!(
                "footprint length {} does not match pressure half-length {}",
                fp.length, model.half_length
            )));
        }
        let a = model.half_length;
        let (x_lo, x_hi) = (center_x - a, center_x + a);
        let (y_lo, y_hi) = fp.y_range();
        let tol = 1e-9 * mesh.length().max(mesh.width());
        if x_lo < -tol || x_hi > mesh.length() + tol || y_lo < -tol || y_hi > mesh.width() + tol {
            return Err(Error::Load(format!(
                "footprint [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}] lies outside the meshed surface {} x {}",
                mesh.length(),
                mesh.width()
            )));
        }
        for face in mesh.top_faces() {
            let [x0, x1] = face.x;
            let [y0, y1] = face.y;
            let xa = x0.max(x_lo);
            let xb = x1.min(x_hi);
            let ya = y0.max(y_lo);
            let yb = y1.min(y_hi);
            if !(xa < xb && ya < yb) {
                continue;
            }
            let (hx, hy) = (x1 - x0, y1 - y0);
            let (sa, sb) = ((xa - center_x) / a, (xb - center_x) / a);
            let d_area = ellipse_area(sb) - ellipse_area(sa);
            let d_moment = ellipse_moment(sb) - ellipse_moment(sa);
            // ∫ p dx and ∫ p (x - x0) dx over the clipped interval.
            let ix0 = model.p_max * a * d_area;
            let ix1 = model.p_max * a * ((center_x - x0) * d_area + a * d_moment);
            let right = ix1 / hx;
            let left = ix0 - right;
            // ∫ (y1 - y)/hy dy and ∫ (y - y0)/hy dy.
            let hi = ((yb - y0).powi(2) - (ya - y0).powi(2)) / (2.0 * hy);
            let lo = (yb - ya) - hi;
            let weights = [left * lo, right * lo, right * hi, left * hi];
            for (node, w) in face.nodes.iter().zip(weights) {
                *acc.entry(3 * node + 2).or_insert(0.0) -= w;
            }
        }
    }
    Ok(NodalForces::from_map(acc))
}

/// Nodal forces of a uniform pressure `p` (MPa, compressive) over the whole top surface.
pub fn uniform_pressure_forces(mesh: &Mesh, p: f64) -> NodalForces {
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for face in mesh.top_faces() {
        let area = (face.x[1] - face.x[0]) * (face.y[1] - face.y[0]);
        for node in face.nodes {
            *acc.entry(3 * node + 2).or_insert(0.0) -= p * area / 4.0;
        }
    }
    NodalForces::from_map(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Increment {
    /// Footprint center during this increment, mm.
    pub center_x: f64,
    /// Seconds.
    pub duration: f64,
}

/// Sequence of load placements. Increment `k` is centered at
/// `start + k * step`; the load leaves the path at `start + n * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSchedule {
    pub increments: Vec<Increment>,
    /// mm
    pub step: f64,
    /// mm
    pub start: f64,
}

impl LoadSchedule {
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// mm traversed over the whole schedule.
    pub fn traversed(&self) -> f64 {
        self.step * self.increments.len() as f64
    }

    /// mm/s, from the first increment.
    pub fn speed_mm_per_s(&self) -> f64 {
        self.step / self.increments[0].duration
    }

    pub fn speed_kmh(&self) -> f64 {
        self.speed_mm_per_s() * 3.6e-3
    }

    /// End time of each increment, s.
    pub fn end_times(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.increments
            .iter()
            .map(|inc| {
                t += inc.duration;
                t
            })
            .collect()
    }

    /// `count` uniform increments from `start`.
    pub fn uniform(start: f64, step: f64, dt: f64, count: usize) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::Load(format!("step must be > 0, got {step}")));
        }
        if !(dt > 0.0) {
            return Err(Error::Load(format!("increment duration must be > 0, got {dt}")));
        }
        if count == 0 {
            return Err(Error::Load("schedule needs at least one increment".into()));
        }
        Ok(LoadSchedule {
            increments: (0..count)
                .map(|k| Increment {
                    center_x: start + k as f64 * step,
                    duration: dt,
                })
                .collect(),
            step,
            start,
        })
    }
}

/// Uniform schedule covering the path from `start` to `end`; the length
/// must be a whole number of steps.
pub fn build_schedule(start: f64, end: f64, step: f64, dt: f64) -> Result<LoadSchedule> {
    if !(step > 0.0 && dt > 0.0) {
        return Err(Error::Load(format!(
            "step and duration must be > 0, got {step} mm, {dt} s"
        )));
    }
    let span = end - start;
    let n = (span / step).round();
    if n < 1.0 || (n * step - span).abs() > 1e-9 * span.abs().max(step) {
        return Err(Error::Load(format!(
            "path length {span} mm is not a positive whole number of {step} mm steps"
        )));
    }
    LoadSchedule::uniform(start, step, dt, n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, AxisGrading, GradingSpec, JointSpec, LayerRole, LayerSpec, MeshSpec};
    use approx::assert_relative_eq;

    fn flat_mesh(nx: usize, ny: usize, length: f64, width: f64) -> Mesh {
        generate(&MeshSpec {
            layers: vec![LayerSpec::new("top", 50.0, "A", LayerRole::Course)],
            length,
            width,
            grading: GradingSpec {
                x: AxisGrading::uniform(length, nx),
                y: AxisGrading::uniform(width, ny),
                z: AxisGrading::uniform(50.0, 1),
            },
            joint: JointSpec::default(),
            wheel_path_y: width / 2.0,
        })
        .unwrap()
    }

    #[test]
    fn pressure_profile() {
        let m = PressureModel::new(1.2, 110.0).unwrap();
        assert_eq!(pressure_at(&m, 0.0), 1.2);
        assert_eq!(pressure_at(&m, 110.0), 0.0);
        assert_eq!(pressure_at(&m, -110.0), 0.0);
        assert_eq!(pressure_at(&m, 300.0), 0.0);
        assert_relative_eq!(pressure_at(&m, 55.0), 1.2 * 0.75f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(pressure_at(&m, 55.0), 1.03923, max_relative = 1e-5);
    }

    #[test]
    fn resultant_is_exact_on_any_mesh() {
        let m = PressureModel::new(1.2, 110.0).unwrap();
        let fp = Footprint::new(220.0, 240.0, 600.0).unwrap();
        let expected = 1.2 * std::f64::consts::FRAC_PI_2 * 110.0 * 240.0;
        assert_relative_eq!(expected, 49_762.8, max_relative = 1e-6);
        for (nx, ny) in [(36, 12), (7, 5), (113, 31)] {
            let mesh = flat_mesh(nx, ny, 3600.0, 1200.0);
            for cx in [110.0, 1001.3, 1800.0, 3490.0] {
                let f = nodal_forces(&mesh, &[fp], &m, cx).unwrap();
                assert_relative_eq!(-f.total(2), expected, max_relative = 1e-9);
                assert!(f.entries.iter().all(|&(d, v)| d % 3 == 2 && v <= 0.0));
            }
        }
    }

    #[test]
    fn forces_stay_on_touched_faces() {
        let mesh = flat_mesh(36, 12, 3600.0, 1200.0);
        let m = PressureModel::new(1.2, 40.0).unwrap();
        let fp = Footprint::new(80.0, 60.0, 650.0).unwrap();
        // Footprint [1710, 1790] x [620, 680] sits inside one 100 x 100 face.
        let f = nodal_forces(&mesh, &[fp], &m, 1750.0).unwrap();
        assert_eq!(f.entries.len(), 4);
        for &(d, _) in &f.entries {
            let p = mesh.nodes()[d / 3];
            assert!(p[0] == 1700.0 || p[0] == 1800.0);
            assert!(p[1] == 600.0 || p[1] == 700.0);
        }
    }

    #[test]
    fn mirrored_positions_mirror_forces() {
        let mesh = flat_mesh(36, 12, 3600.0, 1200.0);
        let m = PressureModel::new(1.2, 110.0).unwrap();
        let fp = Footprint::new(220.0, 240.0, 600.0).unwrap();
        let a = nodal_forces(&mesh, &[fp], &m, 1800.0 - 137.0).unwrap();
        let b = nodal_forces(&mesh, &[fp], &m, 1800.0 + 137.0).unwrap();
        let find = |f: &NodalForces, x: f64, y: f64| {
            f.entries
                .iter()
                .find(|(d, _)| {
                    let p = mesh.nodes()[d / 3];
                    (p[0] - x).abs() < 1e-9 && (p[1] - y).abs() < 1e-9
                })
                .map(|e| e.1)
                .unwrap_or(0.0)
        };
        assert_eq!(a.entries.len(), b.entries.len());
        for &(d, v) in &a.entries {
            let p = mesh.nodes()[d / 3];
            assert_relative_eq!(find(&b, 3600.0 - p[0], p[1]), v, max_relative = 1e-10);
        }
    }

    #[test]
    fn translation_permutes_forces() {
        let mesh = flat_mesh(36, 12, 3600.0, 1200.0);
        let m = PressureModel::new(1.2, 110.0).unwrap();
        let fp = Footprint::new(220.0, 240.0, 600.0).unwrap();
        let a = nodal_forces(&mesh, &[fp], &m, 1234.0).unwrap();
        let b = nodal_forces(&mesh, &[fp], &m, 1334.0).unwrap();
        let mut shifted: Vec<([i64; 2], f64)> = a
            .entries
            .iter()
            .map(|&(d, v)| {
                let p = mesh.nodes()[d / 3];
                ([p[0] as i64 + 100, p[1] as i64], v)
            })
            .collect();
        let mut moved: Vec<([i64; 2], f64)> = b
            .entries
            .iter()
            .map(|&(d, v)| {
                let p = mesh.nodes()[d / 3];
                ([p[0] as i64, p[1] as i64], v)
            })
            .collect();
        shifted.sort_by_key(|e| e.0);
        moved.sort_by_key(|e| e.0);
        assert_eq!(shifted.len(), moved.len());
        for (s, m) in shifted.iter().zip(&moved) {
            assert_eq!(s.0, m.0);
            assert_relative_eq!(s.1, m.1, max_relative = 1e-9);
        }
    }

    #[test]
    fn footprint_outside_is_rejected() {
        let mesh = flat_mesh(10, 4, 1000.0, 400.0);
        let m = PressureModel::new(1.2, 110.0).unwrap();
        let fp = Footprint::new(220.0, 240.0, 200.0).unwrap();
        assert!(nodal_forces(&mesh, &[fp], &m, 50.0).is_err());
        let wide = Footprint::new(220.0, 240.0, 350.0).unwrap();
        assert!(nodal_forces(&mesh, &[wide], &m, 500.0).is_err());
        let mismatch = Footprint::new(200.0, 240.0, 200.0).unwrap();
        assert!(nodal_forces(&mesh, &[mismatch], &m, 500.0).is_err());
    }

    #[test]
    fn schedule_presets() {
        let s = LoadSchedule::uniform(110.0, 20.0, 0.009, 170).unwrap();
        assert_eq!(s.len(), 170);
        assert_relative_eq!(s.traversed(), 3400.0);
        assert_relative_eq!(s.speed_mm_per_s(), 2222.222222222222, max_relative = 1e-12);
        assert_relative_eq!(s.speed_kmh(), 8.0, max_relative = 1e-12);
        assert_relative_eq!(s.increments[85].center_x, 110.0 + 85.0 * 20.0);

        let b = build_schedule(110.0, 3510.0, 20.0, 0.009).unwrap();
        assert_eq!(b, s);
        let single = build_schedule(1800.0, 1820.0, 20.0, 0.009).unwrap();
        assert_eq!(single.len(), 1);

        assert!(build_schedule(0.0, 100.0, 0.0, 0.009).is_err());
        assert!(build_schedule(0.0, 100.0, 20.0, -1.0).is_err());
        assert!(build_schedule(0.0, 110.0, 20.0, 0.009).is_err());
    }

    #[test]
    fn uniform_pressure_total() {
        let mesh = flat_mesh(7, 3, 700.0, 300.0);
        let f = uniform_pressure_forces(&mesh, 0.5);
        assert_relative_eq!(f.total(2), -0.5 * 700.0 * 300.0, max_relative = 1e-14);
    }
}

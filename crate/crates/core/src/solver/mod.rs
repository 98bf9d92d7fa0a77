//! Quasi-static viscoelastic time stepping on the hexahedral mesh.
//!
//! Each increment solves `K̂ Δu = f_ext − f_hist`, where `K̂` uses the
//! per-material effective moduli for the increment length and `f_hist`
//! is the internal force the current state would carry at the end of the
//! increment if the strain were frozen. With a uniform increment length the
//! operator is constant and factorized once.
//!
//! Element work runs on a private rayon pool of `threads` workers; every
//! reduction into global arrays is done sequentially in element order, so
//! results do not depend on the thread count.

mod element;
mod sparse;

pub use element::{lame, ElementMatrix, HexOperator};
pub use sparse::{conjugate_gradient, Analysis, CgReport, CholeskyFactor, SparsePattern, SymmetricMatrix};

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::loading::{nodal_forces, Footprint, LoadSchedule, PressureModel};
use crate::materials::{MaterialCatalog, MaterialRecord, StepCoefficients, ViscoPointState, Voigt};
use crate::mesh::Mesh;
use crate::results::{StressHistory, StressRecord};

/// Moduli in the material library are in Pa; the solver works in MPa.
pub const PA_TO_MPA: f64 = 1e-6;
/// Reported stresses are in kPa.
pub const MPA_TO_KPA: f64 = 1e3;

const UNCONSTRAINED: usize = usize::MAX;
const ASSEMBLY_CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Direct,
    Cg,
}

impl SolverKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "direct" => Some(SolverKind::Direct),
            "cg" => Some(SolverKind::Cg),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Direct => "direct",
            SolverKind::Cg => "cg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveSettings {
    pub solver: SolverKind,
    /// Relative residual tolerance of the iterative solver.
    pub tol: f64,
    pub max_iter: usize,
    pub hourglass_coeff: f64,
    pub threads: usize,
    /// Keep the factorization while the increment length is unchanged.
    pub reuse_factorization: bool,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            solver: SolverKind::Direct,
            tol: 1e-10,
            max_iter: 20_000,
            hourglass_coeff: 0.05,
            threads: 1,
            reuse_factorization: true,
        }
    }
}

impl SolveSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::invalid(format!("solver.tol must be in (0, 1e-2], got {}", self.tol)));
        }
        if !(0.01..=0.15).contains(&self.hourglass_coeff) {
            return Err(Error::invalid(format!(
                "solver.hourglass_coeff must be in [0.01, 0.15], got {}",
                self.hourglass_coeff
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("solver.max_iter must be >= 1"));
        }
        if self.threads == 0 {
            return Err(Error::invalid("solver.threads must be >= 1"));
        }
        Ok(())
    }
}

/// Prescribed total displacements, keyed by dof (`3 * node + component`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraints {
    values: BTreeMap<usize, f64>,
}

impl Constraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fix(&mut self, dof: usize, value: f64) {
        self.values.insert(dof, value);
    }

    pub fn contains(&self, dof: usize) -> bool {
        self.values.contains_key(&dof)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(&d, &v)| (d, v))
    }

    /// Rollers normal to the symmetry, lateral and end planes; fully fixed base.
    pub fn pavement(mesh: &Mesh) -> Self {
        let mut c = Constraints::new();
        for set in ["symmetry_plane", "lateral_plane"] {
            for &n in mesh.node_set(set).unwrap_or(&[]) {
                c.fix(3 * n + 1, 0.0);
            }
        }
        for &n in mesh.node_set("longitudinal_ends").unwrap_or(&[]) {
            c.fix(3 * n, 0.0);
        }
        for &n in mesh.node_set("base").unwrap_or(&[]) {
            for i in 0..3 {
                c.fix(3 * n + i, 0.0);
            }
        }
        c
    }
}

/// Mutable state of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Nodal displacements, mm, `3 * node_count` entries.
    pub displacement: Vec<f64>,
    /// One integration point per element.
    pub points: Vec<ViscoPointState>,
    /// Centroid stress per element, MPa.
    pub stress: Vec<Voigt>,
    /// Completed increments.
    pub increment: usize,
    /// Load center of the last increment, mm.
    pub load_x: f64,
    /// s
    pub time: f64,
}

/// Diagnostics of one increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub cg_iterations: usize,
    /// `|Σ f_ext + Σ reactions|` relative to the applied load.
    pub equilibrium_error: f64,
    pub refactorized: bool,
}

/// Assembled effective operator for one increment length.
#[derive(Debug)]
pub struct EffectiveOperator {
    pub dt: f64,
    pub matrix: SymmetricMatrix,
    coeffs: Vec<StepCoefficients>,
    /// Lamé constants of the effective moduli per layer.
    lame: Vec<(f64, f64)>,
    factor: Option<CholeskyFactor>,
    diag_inv: Vec<f64>,
}

impl EffectiveOperator {
    pub fn coefficients(&self, layer: usize) -> &StepCoefficients {
        &self.coeffs[layer]
    }
}

pub struct Simulation {
    mesh: Mesh,
    materials: Vec<MaterialRecord>,
    settings: SolveSettings,
    pool: rayon::ThreadPool,
    ops: Vec<HexOperator>,
    /// Hourglass stiffness coefficient per element.
    hourglass: Vec<f64>,
    element_eq: Vec<[usize; 24]>,
    constraints: Constraints,
    eq_of_dof: Vec<usize>,
    n_eq: usize,
    pattern: SparsePattern,
    analysis: Option<Analysis>,
    operator: Option<EffectiveOperator>,
    state: SimState,
    factorizations: usize,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("elements", &self.mesh.element_count())
            .field("equations", &self.n_eq)
            .field("increment", &self.state.increment)
            .finish()
    }
}

fn element_dofs(conn: &[usize; 8]) -> [usize; 24] {
    std::array::from_fn(|k| 3 * conn[k / 3] + k % 3)
}

fn gather(mesh: &Mesh, e: usize, u: &[f64]) -> [f64; 24] {
    element_dofs(&mesh.elements()[e]).map(|d| u[d])
}

impl Simulation {
    /// Materials resolved from `catalog` (Pa) by layer material name.
    pub fn new(mesh: &Mesh, catalog: &MaterialCatalog, constraints: Constraints, settings: SolveSettings) -> Result<Self> {
        let materials = mesh
            .layers()
            .iter()
            .map(|l| catalog.resolve(&l.material).and_then(|m| m.scaled(PA_TO_MPA)))
            .collect::<Result<Vec<_>>>()?;
        Self::with_materials(mesh, materials, constraints, settings)
    }

    /// `materials[i]` (already in MPa) is used for layer `i`.
    pub fn with_materials(
        mesh: &Mesh,
        materials: Vec<MaterialRecord>,
        constraints: Constraints,
        settings: SolveSettings,
    ) -> Result<Self> {
        settings.validate()?;
        if materials.len() != mesh.layers().len() {
            return Err(Error::invalid(format!(
                "{} materials given for {} layers",
                materials.len(),
                mesh.layers().len()
            )));
        }
        for m in &materials {
            m.validate()?;
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(settings.threads)
            .build()
            .map_err(|e| Error::Solver(format!("cannot start worker pool: {e}")))?;
        let ndof = 3 * mesh.node_count();
        for (d, _) in constraints.iter() {
            if d >= ndof {
                return Err(Error::invalid(format!("constraint on dof {d} outside the model ({ndof} dofs)")));
            }
        }
        let ops = pool.install(|| {
            (0..mesh.element_count())
                .into_par_iter()
                .map(|e| HexOperator::new(&mesh.element_coords(e)))
                .collect::<Result<Vec<_>>>()
        })?;
        let hourglass = (0..mesh.element_count())
            .map(|e| {
                let (g0, k0) = crate::materials::elastic_moduli(
                    materials[mesh.element_layer(e)].youngs_modulus,
                    materials[mesh.element_layer(e)].poissons_ratio,
                )
                .expect("validated material");
                let (l0, m0) = lame(g0, k0);
                ops[e].hourglass_coefficient(settings.hourglass_coeff, l0, m0)
            })
            .collect();

        let mut eq_of_dof = vec![UNCONSTRAINED; ndof];
        let mut n_eq = 0;
        for (d, slot) in eq_of_dof.iter_mut().enumerate() {
            if !constraints.contains(d) {
                *slot = n_eq;
                n_eq += 1;
            }
        }
        let element_eq: Vec<[usize; 24]> = mesh
            .elements()
            .iter()
            .map(|conn| element_dofs(conn).map(|d| eq_of_dof[d]))
            .collect();
        let groups: Vec<Vec<usize>> = element_eq
            .iter()
            .map(|g| g.iter().copied().filter(|&q| q != UNCONSTRAINED).collect())
            .collect();
        let pattern = SparsePattern::from_groups(n_eq, groups.iter().map(Vec::as_slice));

        let points = (0..mesh.element_count())
            .map(|e| ViscoPointState::for_material(&materials[mesh.element_layer(e)]))
            .collect();
        let state = SimState {
            displacement: vec![0.0; ndof],
            points,
            stress: vec![[0.0; 6]; mesh.element_count()],
            increment: 0,
            load_x: f64::NAN,
            time: 0.0,
        };
        Ok(Simulation {
            mesh: mesh.clone(),
            materials,
            settings,
            pool,
            ops,
            hourglass,
            element_eq,
            constraints,
            eq_of_dof,
            n_eq,
            pattern,
            analysis: None,
            operator: None,
            state,
            factorizations: 0,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn materials(&self) -> &[MaterialRecord] {
        &self.materials
    }

    pub fn settings(&self) -> &SolveSettings {
        &self.settings
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn equation_count(&self) -> usize {
        self.n_eq
    }

    pub fn pattern(&self) -> &SparsePattern {
        &self.pattern
    }

    /// Numeric factorizations performed so far.
    pub fn factorizations(&self) -> usize {
        self.factorizations
    }

    pub fn element_operator(&self, e: usize) -> &HexOperator {
        &self.ops[e]
    }

    pub fn hourglass_coefficient(&self, e: usize) -> f64 {
        self.hourglass[e]
    }

    /// Changes the prescribed value of an already constrained dof.
    pub fn set_prescribed(&mut self, dof: usize, value: f64) -> Result<()> {
        if !self.constraints.contains(dof) {
            return Err(Error::invalid(format!("dof {dof} is not constrained")));
        }
        self.constraints.fix(dof, value);
        Ok(())
    }

    /// Assembles the effective operator for increment length `dt` without
    /// factorizing it.
    pub fn effective_stiffness(&self, dt: f64) -> Result<EffectiveOperator> {
        let coeffs = self
            .materials
            .iter()
            .map(|m| m.step_coefficients(dt))
            .collect::<Result<Vec<_>>>()?;
        let lame_eff: Vec<(f64, f64)> = coeffs.iter().map(|c| lame(c.shear_effective, c.bulk_effective)).collect();
        let mut matrix = SymmetricMatrix::zeros(&self.pattern);
        let ne = self.mesh.element_count();
        let mut start = 0;
        while start < ne {
            let end = (start + ASSEMBLY_CHUNK).min(ne);
            let mats: Vec<ElementMatrix> = self.pool.install(|| {
                (start..end)
                    .into_par_iter()
                    .map(|e| {
                        let (l, m) = lame_eff[self.mesh.element_layer(e)];
                        self.ops[e].stiffness(l, m, self.hourglass[e])
                    })
                    .collect()
            });
            for (e, k) in (start..end).zip(&mats) {
                let eq = &self.element_eq[e];
                for b in 0..24 {
                    let c = eq[b];
                    if c == UNCONSTRAINED {
                        continue;
                    }
                    for a in 0..24 {
                        let r = eq[a];
                        if r == UNCONSTRAINED || r > c {
                            continue;
                        }
                        let p = self.pattern.position(r, c).expect("pattern covers element couplings");
                        matrix.values[p] += k[a][b];
                    }
                }
            }
            start = end;
        }
        Ok(EffectiveOperator {
            dt,
            matrix,
            coeffs,
            lame: lame_eff,
            factor: None,
            diag_inv: Vec::new(),
        })
    }

    fn prepare(&mut self, dt: f64) -> Result<bool> {
        if self.settings.reuse_factorization {
            if let Some(op) = &self.operator {
                if op.dt == dt {
                    return Ok(false);
                }
            }
        }
        let mut op = self.effective_stiffness(dt)?;
        match self.settings.solver {
            _ if self.n_eq == 0 => {}
            SolverKind::Direct => {
                if self.analysis.is_none() {
                    self.analysis = Some(Analysis::new(&self.pattern)?);
                }
                let analysis = self.analysis.as_ref().expect("analysis");
                op.factor = Some(CholeskyFactor::new(analysis, &self.pattern, &op.matrix)?);
            }
            SolverKind::Cg => {
                op.diag_inv = op
                    .matrix
                    .diagonal(&self.pattern)
                    .iter()
                    .map(|&d| {
                        if d > 0.0 {
                            Ok(1.0 / d)
                        } else {
                            Err(Error::Solver("non-positive diagonal in stiffness matrix".into()))
                        }
                    })
                    .collect::<Result<_>>()?;
            }
        }
        self.factorizations += 1;
        self.operator = Some(op);
        Ok(true)
    }

    /// Advances one increment of length `dt` under the dense external
    /// force vector `f_ext` (N, one entry per dof).
    pub fn step(&mut self, f_ext: &[f64], dt: f64, load_x: f64) -> Result<StepReport> {
        let ndof = 3 * self.mesh.node_count();
        if f_ext.len() != ndof {
            return Err(Error::invalid(format!(
                "force vector has {} entries, model has {ndof} dofs",
                f_ext.len()
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("increment duration must be > 0, got {dt}")));
        }
        let refactorized = self.prepare(dt)?;
        let op = self.operator.as_ref().expect("operator prepared");

        // Prescribed increments.
        let mut du = vec![0.0; ndof];
        for (d, v) in self.constraints.iter() {
            du[d] = v - self.state.displacement[d];
        }
        let du_c = &du;

        let hist: Vec<[f64; 24]> = self.pool.install(|| {
            (0..self.mesh.element_count())
                .into_par_iter()
                .map(|e| {
                    let layer = self.mesh.element_layer(e);
                    let s = op.coeffs[layer].history_stress(&self.state.points[e]);
                    let u = gather(&self.mesh, e, &self.state.displacement);
                    let mut f = self.ops[e].stress_force(&s);
                    let hg = self.ops[e].hourglass_force(self.hourglass[e], &u);
                    for k in 0..24 {
                        f[k] += hg[k];
                    }
                    let dpres = gather(&self.mesh, e, du_c);
                    if dpres.iter().any(|&v| v != 0.0) {
                        let (l, m) = op.lame[layer];
                        let ke = self.ops[e].stiffness(l, m, self.hourglass[e]);
                        for a in 0..24 {
                            f[a] += (0..24).map(|b| ke[a][b] * dpres[b]).sum::<f64>();
                        }
                    }
                    f
                })
                .collect()
        });
        let mut rhs = vec![0.0; self.n_eq];
        for (d, &q) in self.eq_of_dof.iter().enumerate() {
            if q != UNCONSTRAINED {
                rhs[q] = f_ext[d];
            }
        }
        for (e, f) in hist.iter().enumerate() {
            for (k, &q) in self.element_eq[e].iter().enumerate() {
                if q != UNCONSTRAINED {
                    rhs[q] -= f[k];
                }
            }
        }

        let mut cg_iterations = 0;
        let x = match self.settings.solver {
            _ if self.n_eq == 0 => Vec::new(),
            SolverKind::Direct => {
                let analysis = self.analysis.as_ref().expect("analysis");
                let op = self.operator.as_mut().expect("operator");
                op.factor.as_mut().expect("factor").solve(analysis, &mut rhs);
                rhs
            }
            SolverKind::Cg => {
                let op = self.operator.as_ref().expect("operator");
                let mut x = vec![0.0; self.n_eq];
                let rep = conjugate_gradient(
                    &self.pattern,
                    &op.matrix,
                    &op.diag_inv,
                    &rhs,
                    &mut x,
                    self.settings.tol,
                    self.settings.max_iter,
                )?;
                cg_iterations = rep.iterations;
                x
            }
        };
        for (d, &q) in self.eq_of_dof.iter().enumerate() {
            if q != UNCONSTRAINED {
                du[d] = x[q];
            }
        }
        for d in 0..ndof {
            self.state.displacement[d] += du[d];
        }

        let op = self.operator.as_ref().expect("operator");
        let mesh = &self.mesh;
        let ops = &self.ops;
        let du_ref = &du;
        let state = &mut self.state;
        self.pool.install(|| {
            state
                .points
                .par_iter_mut()
                .zip(state.stress.par_iter_mut())
                .enumerate()
                .for_each(|(e, (point, stress))| {
                    let de_u = element_dofs(&mesh.elements()[e]).map(|d| du_ref[d]);
                    let de = ops[e].strain(&de_u);
                    *stress = op.coeffs[mesh.element_layer(e)].advance(point, &de);
                })
        });
        self.state.increment += 1;
        self.state.time += dt;
        self.state.load_x = load_x;

        let equilibrium_error = self.equilibrium_error(f_ext);
        Ok(StepReport {
            cg_iterations,
            equilibrium_error,
            refactorized,
        })
    }

    /// Internal nodal forces of the current state, N.
    pub fn internal_forces(&self) -> Vec<f64> {
        let per_element: Vec<[f64; 24]> = self.pool.install(|| {
            (0..self.mesh.element_count())
                .into_par_iter()
                .map(|e| {
                    let u = gather(&self.mesh, e, &self.state.displacement);
                    let mut f = self.ops[e].stress_force(&self.state.stress[e]);
                    let hg = self.ops[e].hourglass_force(self.hourglass[e], &u);
                    for k in 0..24 {
                        f[k] += hg[k];
                    }
                    f
                })
                .collect()
        });
        let mut out = vec![0.0; 3 * self.mesh.node_count()];
        for (e, f) in per_element.iter().enumerate() {
            for (k, d) in element_dofs(&self.mesh.elements()[e]).into_iter().enumerate() {
                out[d] += f[k];
            }
        }
        out
    }

    /// Support reactions `(dof, force)` at constrained dofs.
    pub fn reactions(&self, f_ext: &[f64]) -> Vec<(usize, f64)> {
        let f_int = self.internal_forces();
        self.constraints.iter().map(|(d, _)| (d, f_int[d] - f_ext[d])).collect()
    }

    /// `max_i |Σ f_ext,i + Σ R_i|` over the three directions, relative to
    /// the applied load (or to the reactions when nothing is applied).
    pub fn equilibrium_error(&self, f_ext: &[f64]) -> f64 {
        let mut applied = [0.0; 3];
        for (d, f) in f_ext.iter().enumerate() {
            applied[d % 3] += f;
        }
        let mut react = [0.0; 3];
        let mut react_abs = 0.0;
        for (d, r) in self.reactions(f_ext) {
            react[d % 3] += r;
            react_abs += r.abs();
        }
        let scale = applied.iter().map(|a| a * a).sum::<f64>().sqrt();
        let scale = if scale > 0.0 { scale } else { react_abs.max(f64::MIN_POSITIVE) };
        (0..3).map(|i| (applied[i] + react[i]).abs()).fold(0.0, f64::max) / scale
    }

    /// Centroid stresses of `elements`, kPa.
    pub fn recover_stress(&self, elements: &[usize]) -> Result<Vec<Voigt>> {
        elements
            .iter()
            .map(|&e| {
                self.state
                    .stress
                    .get(e)
                    .map(|s| s.map(|v| v * MPA_TO_KPA))
                    .ok_or_else(|| Error::invalid(format!("unknown element id {e}")))
            })
            .collect()
    }

    /// Total strain energy `½ uᵀ f_int` and its hourglass part, N·mm.
    pub fn energies(&self) -> (f64, f64) {
        let mut total = 0.0;
        let mut hourglass = 0.0;
        for e in 0..self.mesh.element_count() {
            let u = gather(&self.mesh, e, &self.state.displacement);
            let hg = self.ops[e].hourglass_force(self.hourglass[e], &u);
            let f = self.ops[e].stress_force(&self.state.stress[e]);
            let eh: f64 = 0.5 * (0..24).map(|k| hg[k] * u[k]).sum::<f64>();
            hourglass += eh;
            total += eh + 0.5 * (0..24).map(|k| f[k] * u[k]).sum::<f64>();
        }
        (total, hourglass)
    }
}

/// Inputs of one passage besides mesh, materials and settings.
#[derive(Debug, Clone)]
pub struct PassageSpec<'a> {
    pub footprints: &'a [Footprint],
    pub pressure: PressureModel,
    pub schedule: &'a LoadSchedule,
    /// Elements whose stresses are recorded at every increment.
    pub probes: &'a [usize],
    /// 0-based increments after which a copy of the state is kept.
    pub snapshots: &'a [usize],
}

#[derive(Debug, Clone)]
pub struct PassageOutcome {
    pub history: StressHistory,
    pub equilibrium_errors: Vec<f64>,
    pub factorizations: usize,
    pub snapshots: Vec<(usize, SimState)>,
    pub cg_iterations: Vec<usize>,
}

/// Runs the moving-load passage on the pavement supports.
pub fn run_passage(
    mesh: &Mesh,
    catalog: &MaterialCatalog,
    spec: &PassageSpec<'_>,
    settings: &SolveSettings,
) -> Result<PassageOutcome> {
    let sim = Simulation::new(mesh, catalog, Constraints::pavement(mesh), settings.clone())?;
    run_passage_with(sim, spec)
}

/// Runs a passage on a prepared simulation.
pub fn run_passage_with(mut sim: Simulation, spec: &PassageSpec<'_>) -> Result<PassageOutcome> {
    if spec.schedule.is_empty() {
        return Err(Error::Load("load schedule is empty".into()));
    }
    for &p in spec.probes {
        if p >= sim.mesh().element_count() {
            return Err(Error::invalid(format!("unknown probe element id {p}")));
        }
    }
    let ndof = 3 * sim.mesh().node_count();
    let mut records = Vec::with_capacity(spec.schedule.len() * spec.probes.len());
    let mut equilibrium_errors = Vec::with_capacity(spec.schedule.len());
    let mut cg_iterations = Vec::with_capacity(spec.schedule.len());
    let mut snapshots = Vec::new();
    for (k, inc) in spec.schedule.increments.iter().enumerate() {
        let forces = nodal_forces(sim.mesh(), spec.footprints, &spec.pressure, inc.center_x)?;
        let f = forces.to_dense(ndof);
        let report = sim.step(&f, inc.duration, inc.center_x)?;
        equilibrium_errors.push(report.equilibrium_error);
        cg_iterations.push(report.cg_iterations);
        let stresses = sim.recover_stress(spec.probes)?;
        for (&element, stress) in spec.probes.iter().zip(stresses) {
            records.push(StressRecord {
                increment: k,
                time: sim.state().time,
                load_x: inc.center_x,
                element,
                stress,
            });
        }
        if spec.snapshots.contains(&k) {
            snapshots.push((k, sim.state().clone()));
        }
    }
    Ok(PassageOutcome {
        history: StressHistory::new(spec.probes.to_vec(), records)?,
        equilibrium_errors,
        factorizations: sim.factorizations(),
        snapshots,
        cg_iterations,
    })
}

/// Assembled effective operator of a pavement model (supports applied).
pub fn effective_stiffness(
    mesh: &Mesh,
    catalog: &MaterialCatalog,
    dt: f64,
    settings: &SolveSettings,
) -> Result<(SparsePattern, EffectiveOperator)> {
    let sim = Simulation::new(mesh, catalog, Constraints::pavement(mesh), settings.clone())?;
    let op = sim.effective_stiffness(dt)?;
    Ok((sim.pattern.clone(), op))
}

#[cfg(test)]
mod tests;

//! Constitutive models for the pavement layers.
//!
//! Every layer goes through the same generalized Maxwell kernel. Elastic
//! layers are the zero-term case, so the solver never branches on the
//! material kind.
//!
//! Stress and strain use Voigt order `[11, 22, 33, 12, 13, 23]` with
//! engineering shear strains. The kernel is unit-agnostic: moduli and the
//! returned stresses share whatever unit the caller uses (the library file
//! stores Pa, the solver works in MPa).

mod library;

pub use library::{parse_library, MaterialCatalog, PLACEHOLDER_LIBRARY};

use crate::error::{Error, Result};

/// Symmetric second-order tensor in Voigt order, engineering shear.
pub type Voigt = [f64; 6];

/// Below this value of `Δξ/τ` the ramp factor is evaluated by its Taylor series.
const RAMP_SERIES_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PronyTerm {
    /// Dimensionless weight (`g_i` or `k_i`).
    pub weight: f64,
    /// Relaxation time in seconds of reduced time.
    pub relaxation_time: f64,
}

/// Relaxation modulus `M(ξ) = M0 (1 - Σ w_i (1 - exp(-ξ/τ_i)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PronySeries {
    instantaneous_modulus: f64,
    terms: Vec<PronyTerm>,
}

impl PronySeries {
    pub fn new(instantaneous_modulus: f64, terms: Vec<PronyTerm>) -> Result<Self> {
        if !(instantaneous_modulus > 0.0 && instantaneous_modulus.is_finite()) {
            return Err(Error::invalid(format!(
                "instantaneous modulus must be positive, got {instantaneous_modulus}"
            )));
        }
        let mut sum = 0.0;
        let mut prev_tau = 0.0;
        for (i, t) in terms.iter().enumerate() {
            if !(t.weight > 0.0 && t.weight.is_finite()) {
                return Err(Error::invalid(format!(
                    "prony term {}: weight must be > 0, got {}",
                    i + 1,
                    t.weight
                )));
            }
            if !(t.relaxation_time > 0.0 && t.relaxation_time.is_finite()) {
                return Err(Error::invalid(format!(
                    "prony term {}: relaxation time must be > 0, got {}",
                    i + 1,
                    t.relaxation_time
                )));
            }
            if t.relaxation_time <= prev_tau {
                return Err(Error::invalid(format!(
                    "prony term {}: relaxation times must be strictly increasing ({} after {})",
                    i + 1,
                    t.relaxation_time,
                    prev_tau
                )));
            }
            prev_tau = t.relaxation_time;
            sum += t.weight;
        }
        if sum >= 1.0 {
            return Err(Error::invalid(format!(
                "sum of prony weights must be < 1 (long-term modulus positive), got {sum}"
            )));
        }
        Ok(PronySeries {
            instantaneous_modulus,
            terms,
        })
    }

    /// Zero-term series: a purely elastic modulus.
    pub fn elastic(modulus: f64) -> Result<Self> {
        Self::new(modulus, Vec::new())
    }

    pub fn instantaneous_modulus(&self) -> f64 {
        self.instantaneous_modulus
    }

    pub fn terms(&self) -> &[PronyTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// `M0 (1 - Σ w_i)`.
    pub fn long_term_modulus(&self) -> f64 {
        self.instantaneous_modulus * (1.0 - self.weight_sum())
    }

    /// Same weights and times, different instantaneous modulus.
    pub fn with_modulus(&self, instantaneous_modulus: f64) -> Result<Self> {
        Self::new(instantaneous_modulus, self.terms.clone())
    }

    /// Modulus seen by an increment of reduced-time length `dxi` when strain
    /// ramps linearly across it.
    pub fn effective_modulus(&self, dxi: f64) -> f64 {
        let m0 = self.instantaneous_modulus;
        self.long_term_modulus()
            + self
                .terms
                .iter()
                .map(|t| t.weight * m0 * ramp_factor(dxi / t.relaxation_time))
                .sum::<f64>()
    }
}

/// Time-temperature shift factor: reduced time is `t / a_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftFactor(f64);

impl ShiftFactor {
    pub fn new(a_t: f64) -> Result<Self> {
        if a_t > 0.0 && a_t.is_finite() {
            Ok(ShiftFactor(a_t))
        } else {
            Err(Error::invalid(format!("shift factor aT must be > 0, got {a_t}")))
        }
    }

    pub fn identity() -> Self {
        ShiftFactor(1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn reduced_time(self, t: f64) -> f64 {
        t / self.0
    }
}

impl Default for ShiftFactor {
    fn default() -> Self {
        Self::identity()
    }
}

/// `(1 - exp(-x)) / x`, accurate for tiny `x`.
pub fn ramp_factor(x: f64) -> f64 {
    if x < RAMP_SERIES_THRESHOLD {
        1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// Relaxation modulus of `series` at wall time `t` (seconds).
pub fn relaxation_modulus(series: &PronySeries, shift: ShiftFactor, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("time must be >= 0, got {t}")));
    }
    let xi = shift.reduced_time(t);
    let relaxed: f64 = series
        .terms
        .iter()
        .map(|term| term.weight * -(-xi / term.relaxation_time).exp_m1())
        .sum();
    Ok(series.instantaneous_modulus * (1.0 - relaxed))
}

/// Shear and bulk moduli from Young's modulus and Poisson's ratio.
pub fn elastic_moduli(youngs: f64, nu: f64) -> Result<(f64, f64)> {
    if !(youngs > 0.0 && youngs.is_finite()) {
        return Err(Error::invalid(format!(
            "Young's modulus must be > 0, got {youngs}"
        )));
    }
    if !(nu >= 0.0 && nu < 0.5) {
        return Err(Error::invalid(format!(
            "Poisson's ratio must satisfy 0 <= nu < 0.5, got {nu}"
        )));
    }
    Ok((youngs / (2.0 * (1.0 + nu)), youngs / (3.0 * (1.0 - 2.0 * nu))))
}

/// Bulk series for a material whose Poisson's ratio stays constant in time:
/// the same weights and relaxation times as the shear series, scaled to `bulk0`.
pub fn bulk_prony_from_shear(shear: &PronySeries, nu: f64, bulk0: f64) -> Result<PronySeries> {
    if !(nu >= 0.0 && nu < 0.5) {
        return Err(Error::invalid(format!(
            "Poisson's ratio must satisfy 0 <= nu < 0.5, got {nu}"
        )));
    }
    shear.with_modulus(bulk0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaterialKind {
    Elastic,
    Viscoelastic,
}

impl MaterialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MaterialKind::Elastic => "elastic",
            MaterialKind::Viscoelastic => "viscoelastic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureMeta {
    pub binder: String,
    pub asphalt_content_pct: f64,
}

/// Constitutive description of one layer or overlay course.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialRecord {
    pub name: String,
    pub kind: MaterialKind,
    /// Instantaneous value for viscoelastic records.
    pub youngs_modulus: f64,
    pub poissons_ratio: f64,
    /// Shear relaxation, instantaneous modulus `G0`.
    pub shear_prony: Option<PronySeries>,
    pub shift: ShiftFactor,
    pub mixture_meta: Option<MixtureMeta>,
}

impl MaterialRecord {
    pub fn elastic(name: impl Into<String>, youngs: f64, nu: f64) -> Result<Self> {
        let rec = MaterialRecord {
            name: name.into(),
            kind: MaterialKind::Elastic,
            youngs_modulus: youngs,
            poissons_ratio: nu,
            shear_prony: None,
            shift: ShiftFactor::identity(),
            mixture_meta: None,
        };
        rec.validate()?;
        Ok(rec)
    }

    /// Viscoelastic record from shear weights/times; `G0` follows from `E0` and `nu`.
    pub fn viscoelastic(
        name: impl Into<String>,
        youngs: f64,
        nu: f64,
        terms: Vec<PronyTerm>,
        shift: ShiftFactor,
    ) -> Result<Self> {
        let (g0, _) = elastic_moduli(youngs, nu)?;
        let rec = MaterialRecord {
            name: name.into(),
            kind: MaterialKind::Viscoelastic,
            youngs_modulus: youngs,
            poissons_ratio: nu,
            shear_prony: Some(PronySeries::new(g0, terms)?),
            shift,
            mixture_meta: None,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.poissons_ratio > 0.0 && self.poissons_ratio < 0.5) {
            return Err(Error::invalid(format!(
                "material '{}': Poisson's ratio must satisfy 0 < nu < 0.5, got {}",
                self.name, self.poissons_ratio
            )));
        }
        let (g0, _) = elastic_moduli(self.youngs_modulus, self.poissons_ratio)?;
        match (self.kind, &self.shear_prony) {
            (MaterialKind::Viscoelastic, None) => Err(Error::invalid(format!(
                "material '{}': viscoelastic kind requires a shear Prony series",
                self.name
            ))),
            (MaterialKind::Viscoelastic, Some(s)) if s.is_empty() => Err(Error::invalid(format!(
                "material '{}': viscoelastic kind requires at least one Prony term",
                self.name
            ))),
            (_, Some(s)) if (s.instantaneous_modulus() - g0).abs() > 1e-9 * g0 => {
                Err(Error::invalid(format!(
                    "material '{}': shear series modulus {} disagrees with E/(2(1+nu)) = {}",
                    self.name,
                    s.instantaneous_modulus(),
                    g0
                )))
            }
            _ => Ok(()),
        }
    }

    /// Copy with all moduli multiplied by `factor` (e.g. 1e-6 for Pa -> MPa).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        out.youngs_modulus *= factor;
        if let Some(s) = &self.shear_prony {
            out.shear_prony = Some(s.with_modulus(s.instantaneous_modulus() * factor)?);
        }
        Ok(out)
    }

    pub fn term_count(&self) -> usize {
        self.shear_prony.as_ref().map_or(0, PronySeries::len)
    }

    /// Shear and bulk series; zero-term for elastic records.
    pub fn series(&self) -> (PronySeries, PronySeries) {
        let (g0, k0) = elastic_moduli(self.youngs_modulus, self.poissons_ratio)
            .expect("validated material");
        let shear = match &self.shear_prony {
            Some(s) => s.clone(),
            None => PronySeries::elastic(g0).expect("validated material"),
        };
        let bulk = bulk_prony_from_shear(&shear, self.poissons_ratio, k0)
            .expect("validated material");
        (shear, bulk)
    }

    /// Precomputes the per-step coefficients for increments of `dt` seconds.
    pub fn step_coefficients(&self, dt: f64) -> Result<StepCoefficients> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("time increment must be > 0, got {dt}")));
        }
        Ok(StepCoefficients::new(self, dt))
    }

    /// Hereditary-integral stress update over one increment.
    pub fn update_stress(
        &self,
        state: &ViscoPointState,
        strain_increment: &Voigt,
        dt: f64,
    ) -> Result<(Voigt, ViscoPointState)> {
        update_stress(self, state, strain_increment, dt)
    }
}

/// Internal variables of one integration point.
#[derive(Debug, Clone, PartialEq)]
pub struct ViscoPointState {
    /// Deviatoric stress carried by each Maxwell branch.
    pub dev_memory: Vec<Voigt>,
    /// Pressure-like volumetric stress carried by each branch.
    pub vol_memory: Vec<f64>,
    pub strain: Voigt,
    pub reduced_time: f64,
}

impl ViscoPointState {
    pub fn new(term_count: usize) -> Self {
        ViscoPointState {
            dev_memory: vec![[0.0; 6]; term_count],
            vol_memory: vec![0.0; term_count],
            strain: [0.0; 6],
            reduced_time: 0.0,
        }
    }

    pub fn for_material(mat: &MaterialRecord) -> Self {
        Self::new(mat.term_count())
    }

    pub fn term_count(&self) -> usize {
        self.dev_memory.len()
    }
}

/// Coefficients of the recursive update for a fixed material and increment length.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCoefficients {
    pub dt: f64,
    pub dxi: f64,
    pub shear_long_term: f64,
    pub bulk_long_term: f64,
    /// Effective (algorithmic) moduli for this increment.
    pub shear_effective: f64,
    pub bulk_effective: f64,
    /// Instantaneous moduli.
    pub shear0: f64,
    pub bulk0: f64,
    /// `exp(-Δξ/τ_i)`.
    pub decay: Vec<f64>,
    /// `w_i M0 τ_i/Δξ (1 - exp(-Δξ/τ_i))` for shear and bulk.
    pub shear_gain: Vec<f64>,
    pub bulk_gain: Vec<f64>,
}

impl StepCoefficients {
    fn new(mat: &MaterialRecord, dt: f64) -> Self {
        let (shear, bulk) = mat.series();
        let dxi = mat.shift.reduced_time(dt);
        let mut decay = Vec::with_capacity(shear.len());
        let mut shear_gain = Vec::with_capacity(shear.len());
        let mut bulk_gain = Vec::with_capacity(shear.len());
        for (gs, ks) in shear.terms().iter().zip(bulk.terms()) {
            let x = dxi / gs.relaxation_time;
            let r = ramp_factor(x);
            decay.push((-x).exp());
            shear_gain.push(gs.weight * shear.instantaneous_modulus() * r);
            bulk_gain.push(ks.weight * bulk.instantaneous_modulus() * r);
        }
        let shear_long_term = shear.long_term_modulus();
        let bulk_long_term = bulk.long_term_modulus();
        StepCoefficients {
            dt,
            dxi,
            shear_long_term,
            bulk_long_term,
            shear_effective: shear_long_term + shear_gain.iter().sum::<f64>(),
            bulk_effective: bulk_long_term + bulk_gain.iter().sum::<f64>(),
            shear0: shear.instantaneous_modulus(),
            bulk0: bulk.instantaneous_modulus(),
            decay,
            shear_gain,
            bulk_gain,
        }
    }

    /// Stress at the end of the increment if the strain does not change.
    pub fn history_stress(&self, state: &ViscoPointState) -> Voigt {
        let (vol, dev) = split(&state.strain);
        let mut s = [0.0; 6];
        for c in 0..3 {
            s[c] = 2.0 * self.shear_long_term * dev[c] + self.bulk_long_term * vol;
        }
        for c in 3..6 {
            s[c] = self.shear_long_term * dev[c];
        }
        for i in 0..self.decay.len() {
            let d = self.decay[i];
            let p = d * state.vol_memory[i];
            for c in 0..3 {
                s[c] += d * state.dev_memory[i][c] + p;
            }
            for c in 3..6 {
                s[c] += d * state.dev_memory[i][c];
            }
        }
        s
    }

    /// Tangent response `D̂ : Δε`.
    pub fn tangent_stress(&self, de: &Voigt) -> Voigt {
        let (dvol, ddev) = split(de);
        let mut s = [0.0; 6];
        for c in 0..3 {
            s[c] = 2.0 * self.shear_effective * ddev[c] + self.bulk_effective * dvol;
        }
        for c in 3..6 {
            s[c] = self.shear_effective * ddev[c];
        }
        s
    }

    /// Advances `state` by one increment and returns the new stress.
    pub fn advance(&self, state: &mut ViscoPointState, de: &Voigt) -> Voigt {
        debug_assert_eq!(state.term_count(), self.decay.len());
        let (dvol, ddev) = split(de);
        for i in 0..self.decay.len() {
            let d = self.decay[i];
            let g = self.shear_gain[i];
            let m = &mut state.dev_memory[i];
            for c in 0..3 {
                m[c] = d * m[c] + 2.0 * g * ddev[c];
            }
            for c in 3..6 {
                m[c] = d * m[c] + g * ddev[c];
            }
            state.vol_memory[i] = d * state.vol_memory[i] + self.bulk_gain[i] * dvol;
        }
        for c in 0..6 {
            state.strain[c] += de[c];
        }
        state.reduced_time += self.dxi;
        self.current_stress(state)
    }

    /// Stress carried by `state` (long-term springs plus branch memories).
    pub fn current_stress(&self, state: &ViscoPointState) -> Voigt {
        current_stress_with(self.shear_long_term, self.bulk_long_term, state)
    }
}

/// Volumetric strain and deviatoric part (engineering shear kept as-is).
fn split(e: &Voigt) -> (f64, Voigt) {
    let vol = e[0] + e[1] + e[2];
    let m = vol / 3.0;
    (vol, [e[0] - m, e[1] - m, e[2] - m, e[3], e[4], e[5]])
}

fn current_stress_with(g_inf: f64, k_inf: f64, state: &ViscoPointState) -> Voigt {
    let (vol, dev) = split(&state.strain);
    let mut s = [0.0; 6];
    for c in 0..3 {
        s[c] = 2.0 * g_inf * dev[c] + k_inf * vol;
    }
    for c in 3..6 {
        s[c] = g_inf * dev[c];
    }
    for (m, p) in state.dev_memory.iter().zip(&state.vol_memory) {
        for c in 0..3 {
            s[c] += m[c] + p;
        }
        for c in 3..6 {
            s[c] += m[c];
        }
    }
    s
}

/// Stress held by a point state, independent of any increment length.
pub fn current_stress(mat: &MaterialRecord, state: &ViscoPointState) -> Voigt {
    let (shear, bulk) = mat.series();
    current_stress_with(shear.long_term_modulus(), bulk.long_term_modulus(), state)
}

/// One increment of the recursive hereditary-integral update, assuming the
/// strain varies linearly over `dt`.
pub fn update_stress(
    mat: &MaterialRecord,
    state: &ViscoPointState,
    strain_increment: &Voigt,
    dt: f64,
) -> Result<(Voigt, ViscoPointState)> {
    if state.term_count() != mat.term_count() {
        return Err(Error::invalid(format!(
            "point state has {} terms, material '{}' has {}",
            state.term_count(),
            mat.name,
            mat.term_count()
        )));
    }
    let coeffs = mat.step_coefficients(dt)?;
    let mut next = state.clone();
    let stress = coeffs.advance(&mut next, strain_increment);
    Ok((stress, next))
}

//! The 27-case overlay mixture sweep, course statistics and reporting.
//!
//! Percent differences follow `(larger − smaller) / smaller`: a drop from
//! SB to PM is quoted relative to the PM value.

mod fixture;

pub use fixture::published_table;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::materials::MaterialCatalog;
use crate::results::{envelope, format_g6};
use crate::solver::{run_passage, PassageSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mixture {
    DG,
    PM,
    SB,
}

impl Mixture {
    pub const ALL: [Mixture; 3] = [Mixture::DG, Mixture::PM, Mixture::SB];

    pub fn label(self) -> &'static str {
        match self {
            Mixture::DG => "DG",
            Mixture::PM => "PM",
            Mixture::SB => "SB",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "DG" => Some(Mixture::DG),
            "PM" => Some(Mixture::PM),
            "SB" => Some(Mixture::SB),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Course {
    Surface,
    /// Also called the base course.
    Intermediate,
    Leveling,
}

impl Course {
    pub const ALL: [Course; 3] = [Course::Surface, Course::Intermediate, Course::Leveling];

    pub fn title(self) -> &'static str {
        match self {
            Course::Surface => "Surface course",
            Course::Intermediate => "Intermediate (base) course",
            Course::Leveling => "Leveling course",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "surface" => Some(Course::Surface),
            "intermediate" | "base" => Some(Course::Intermediate),
            "leveling" => Some(Course::Leveling),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MixtureAssignment {
    pub surface: Mixture,
    pub intermediate: Mixture,
    pub leveling: Mixture,
}

impl MixtureAssignment {
    pub fn uniform(m: Mixture) -> Self {
        MixtureAssignment {
            surface: m,
            intermediate: m,
            leveling: m,
        }
    }

    pub fn get(&self, course: Course) -> Mixture {
        match course {
            Course::Surface => self.surface,
            Course::Intermediate => self.intermediate,
            Course::Leveling => self.leveling,
        }
    }

    /// All 27 combinations, surface-major.
    pub fn all() -> Vec<MixtureAssignment> {
        let mut out = Vec::with_capacity(27);
        for surface in Mixture::ALL {
            for intermediate in Mixture::ALL {
                for leveling in Mixture::ALL {
                    out.push(MixtureAssignment {
                        surface,
                        intermediate,
                        leveling,
                    });
                }
            }
        }
        out
    }

    pub fn label(&self) -> String {
        format!("{}/{}/{}", self.surface.label(), self.intermediate.label(), self.leveling.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Simulated,
    PaperFixture,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Simulated => "simulated",
            Provenance::PaperFixture => "paper-fixture",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "simulated" => Some(Provenance::Simulated),
            "paper-fixture" => Some(Provenance::PaperFixture),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub assignment: MixtureAssignment,
    /// kPa
    pub s11_peak: f64,
    /// kPa
    pub s12_peak: f64,
}

/// Sweep results. Assignments are distinct and stresses finite; a complete
/// table has all 27 combinations.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub provenance: Provenance,
}

pub const SWEEP_HEADER: &str = "surface,base,leveling,S11_peak_kPa,S12_peak_kPa,provenance";

impl SweepTable {
    pub fn new(rows: Vec<SweepRow>, provenance: Provenance) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for r in &rows {
            if !seen.insert(r.assignment) {
                return Err(Error::invalid(format!("duplicate assignment {}", r.assignment.label())));
            }
            if !(r.s11_peak.is_finite() && r.s12_peak.is_finite()) {
                return Err(Error::invalid(format!("non-finite stress for {}", r.assignment.label())));
            }
        }
        Ok(SweepTable { rows, provenance })
    }

    pub fn is_complete(&self) -> bool {
        self.rows.len() == 27
    }

    pub fn row(&self, a: MixtureAssignment) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.assignment == a)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        for r in &self.rows {
            let a = r.assignment;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                a.surface.label(),
                a.intermediate.label(),
                a.leveling.label(),
                format_g6(r.s11_peak),
                format_g6(r.s12_peak),
                self.provenance.as_str()
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn parse_csv(text: &str, source: &str) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse {
            file: source.to_string(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == SWEEP_HEADER => {}
            _ => return Err(perr(1, format!("expected header '{SWEEP_HEADER}'"))),
        }
        let mut rows = Vec::new();
        let mut provenance = None;
        for (i, line) in lines {
            let n = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 6 {
                return Err(perr(n, format!("expected 6 fields, found {}", f.len())));
            }
            let mix = |s: &str| Mixture::parse(s).ok_or_else(|| perr(n, format!("unknown mixture '{s}'")));
            let num = |s: &str| s.parse::<f64>().map_err(|_| perr(n, format!("invalid number '{s}'")));
            let p = Provenance::parse(f[5]).ok_or_else(|| perr(n, format!("unknown provenance '{}'", f[5])))?;
            if provenance.is_some_and(|q| q != p) {
                return Err(perr(n, "mixed provenance in one table".into()));
            }
            provenance = Some(p);
            rows.push(SweepRow {
                assignment: MixtureAssignment {
                    surface: mix(f[0])?,
                    intermediate: mix(f[1])?,
                    leveling: mix(f[2])?,
                },
                s11_peak: num(f[3])?,
                s12_peak: num(f[4])?,
            });
        }
        let provenance = provenance.ok_or_else(|| perr(2, "table has no rows".into()))?;
        SweepTable::new(rows, provenance).map_err(|e| perr(0, e.to_string()))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, &path.display().to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// Sums in sorted order so the result does not depend on row order.
    fn of(values: &[f64]) -> Summary {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Summary {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            max: v[v.len() - 1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureStats {
    pub mixture: Mixture,
    pub s11: Summary,
    pub s12: Summary,
}

/// Statistics over the 9 rows sharing a course's mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct CourseStats {
    pub course: Course,
    /// DG, PM, SB order.
    pub mixtures: [MixtureStats; 3],
}

/// `(value − reference) / reference`, percent.
pub fn percent_delta(value: f64, reference: f64) -> f64 {
    (value - reference) / reference * 100.0
}

impl CourseStats {
    pub fn get(&self, m: Mixture) -> &MixtureStats {
        &self.mixtures[m as usize]
    }

    /// Mean S11 of `m` relative to mean S11 of `reference`, percent.
    pub fn s11_delta(&self, m: Mixture, reference: Mixture) -> f64 {
        percent_delta(self.get(m).s11.mean, self.get(reference).s11.mean)
    }

    pub fn s12_delta(&self, m: Mixture, reference: Mixture) -> f64 {
        percent_delta(self.get(m).s12.mean, self.get(reference).s12.mean)
    }

    /// Mixture with the smallest mean S11 (first in DG, PM, SB order on ties).
    pub fn s11_reference(&self) -> Mixture {
        argmin_by(&self.mixtures, |s| s.s11.mean)
    }

    pub fn s12_reference(&self) -> Mixture {
        argmin_by(&self.mixtures, |s| s.s12.mean)
    }
}

fn argmin_by(stats: &[MixtureStats; 3], key: impl Fn(&MixtureStats) -> f64) -> Mixture {
    let mut best = stats[0];
    for s in &stats[1..] {
        if key(s) < key(&best) {
            best = *s;
        }
    }
    best.mixture
}

pub fn course_stats(table: &SweepTable, course: Course) -> Result<CourseStats> {
    if !table.is_complete() {
        return Err(Error::invalid(format!(
            "course statistics need all 27 combinations, table has {}",
            table.rows.len()
        )));
    }
    let mixtures = Mixture::ALL.map(|m| {
        let rows: Vec<&SweepRow> = table.rows.iter().filter(|r| r.assignment.get(course) == m).collect();
        debug_assert_eq!(rows.len(), 9);
        let s11: Vec<f64> = rows.iter().map(|r| r.s11_peak).collect();
        let s12: Vec<f64> = rows.iter().map(|r| r.s12_peak).collect();
        MixtureStats {
            mixture: m,
            s11: Summary::of(&s11),
            s12: Summary::of(&s12),
        }
    });
    Ok(CourseStats { course, mixtures })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes {
    pub min_s11: SweepRow,
    pub min_s12: SweepRow,
    /// `(all-SB − all-PM) / all-PM` for S11, percent, when both rows exist.
    pub sb_over_pm_s11: Option<f64>,
    pub sb_over_pm_s12: Option<f64>,
}

pub fn extremes_report(table: &SweepTable) -> Result<Extremes> {
    let first = *table.rows.first().ok_or_else(|| Error::invalid("empty sweep table"))?;
    let mut min_s11 = first;
    let mut min_s12 = first;
    for r in &table.rows[1..] {
        if r.s11_peak < min_s11.s11_peak {
            min_s11 = *r;
        }
        if r.s12_peak < min_s12.s12_peak {
            min_s12 = *r;
        }
    }
    let sb = table.row(MixtureAssignment::uniform(Mixture::SB));
    let pm = table.row(MixtureAssignment::uniform(Mixture::PM));
    let (sb_over_pm_s11, sb_over_pm_s12) = match (sb, pm) {
        (Some(sb), Some(pm)) => (
            Some(percent_delta(sb.s11_peak, pm.s11_peak)),
            Some(percent_delta(sb.s12_peak, pm.s12_peak)),
        ),
        _ => (None, None),
    };
    Ok(Extremes {
        min_s11,
        min_s12,
        sb_over_pm_s11,
        sb_over_pm_s12,
    })
}

/// Markdown report with one section per course and the extremes.
pub fn markdown_report(table: &SweepTable) -> Result<String> {
    let mut out = String::new();
    let prov = table.provenance.as_str();
    let _ = writeln!(out, "# Overlay mixture study\n");
    let _ = writeln!(out, "Provenance: **{prov}**\n");
    let _ = writeln!(
        out,
        "Stresses are passage peaks at the bottom of the overlay above the joint, kPa. \
         Percent differences are (larger - smaller) / smaller.\n"
    );
    for course in Course::ALL {
        let st = course_stats(table, course)?;
        let _ = writeln!(out, "## {} ({prov})\n", course.title());
        let _ = writeln!(out, "| Mixture | S11 mean | S11 min | S11 max | S12 mean | S12 min | S12 max |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for s in &st.mixtures {
            let _ = writeln!(
                out,
                "| {} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} |",
                s.mixture.label(),
                s.s11.mean,
                s.s11.min,
                s.s11.max,
                s.s12.mean,
                s.s12.min,
                s.s12.max
            );
        }
        let _ = writeln!(out);
        for (name, key) in [("S11", 0usize), ("S12", 1usize)] {
            let mean = |m: Mixture| if key == 0 { st.get(m).s11.mean } else { st.get(m).s12.mean };
            let _ = writeln!(out, "{name} mean differences:\n");
            for (i, &a) in Mixture::ALL.iter().enumerate() {
                for &b in &Mixture::ALL[i + 1..] {
                    let (hi, lo) = if mean(a) >= mean(b) { (a, b) } else { (b, a) };
                    let _ = writeln!(
                        out,
                        "- {} vs {}: {} is higher by {:.2} %",
                        hi.label(),
                        lo.label(),
                        hi.label(),
                        percent_delta(mean(hi), mean(lo))
                    );
                }
            }
            let _ = writeln!(out);
        }
    }
    let ex = extremes_report(table)?;
    let _ = writeln!(out, "## Extremes ({prov})\n");
    let _ = writeln!(
        out,
        "- Lowest S11: {:.2} kPa at surface/base/leveling = {}",
        ex.min_s11.s11_peak,
        ex.min_s11.assignment.label()
    );
    let _ = writeln!(
        out,
        "- Lowest S12: {:.2} kPa at surface/base/leveling = {}",
        ex.min_s12.s12_peak,
        ex.min_s12.assignment.label()
    );
    if let Some(g) = ex.sb_over_pm_s11 {
        let _ = writeln!(out, "- All-SB vs all-PM S11: all-SB is higher by {g:.2} %");
    }
    if let Some(g) = ex.sb_over_pm_s12 {
        let _ = writeln!(out, "- All-SB vs all-PM S12: all-SB is higher by {g:.2} %");
    }
    Ok(out)
}

/// Runs one passage per assignment and collects the above-joint envelopes.
///
/// The first three overlay courses of the configured geometry receive the
/// surface, intermediate and leveling mixtures. Cases run concurrently on
/// `case_threads` workers; each case uses the configured solver settings.
pub fn run_sweep(
    config: &RunConfig,
    catalog: &MaterialCatalog,
    assignments: &[MixtureAssignment],
    case_threads: usize,
) -> Result<SweepTable> {
    let courses: Vec<String> = config
        .geometry
        .layers
        .iter()
        .take(config.course_count())
        .map(|l| l.name.clone())
        .collect();
    if courses.len() != 3 {
        return Err(Error::invalid(format!(
            "the sweep needs exactly three overlay courses, geometry has {}",
            courses.len()
        )));
    }
    for m in Mixture::ALL {
        catalog.resolve(m.label())?;
    }
    let base_mesh = config.build_mesh()?;
    let probes = config.probes(&base_mesh)?;
    let footprints = config.footprints()?;
    let schedule = config.schedule()?;
    let pressure = config.pressure()?;

    let run_case = |a: &MixtureAssignment| -> Result<SweepRow> {
        let assign = [
            (courses[0].as_str(), a.surface.label()),
            (courses[1].as_str(), a.intermediate.label()),
            (courses[2].as_str(), a.leveling.label()),
        ];
        let mesh = base_mesh.with_layer_materials(&assign)?;
        let spec = PassageSpec {
            footprints: &footprints,
            pressure,
            schedule: &schedule,
            probes: &[probes.above_joint],
            snapshots: &[],
        };
        let out = run_passage(&mesh, catalog, &spec, &config.solver)?;
        let env = envelope(&out.history)?;
        Ok(SweepRow {
            assignment: *a,
            s11_peak: env.s11_peak,
            s12_peak: env.s12_peak,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(case_threads.max(1))
        .build()
        .map_err(|e| Error::Solver(format!("cannot start case pool: {e}")))?;
    let rows: Vec<Result<SweepRow>> = pool.install(|| assignments.par_iter().map(run_case).collect());
    let rows = rows
        .into_iter()
        .zip(assignments)
        .map(|(r, a)| {
            r.map_err(|e| Error::Case {
                case: a.label(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SweepTable::new(rows, Provenance::Simulated)
}

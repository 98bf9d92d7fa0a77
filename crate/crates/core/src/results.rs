//! Probe stress histories, passage envelopes and file export.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::materials::Voigt;
use crate::mesh::Mesh;
use crate::solver::SimState;

pub const HISTORY_HEADER: &str =
    "increment,time_s,load_x_mm,element_id,S11_kPa,S22_kPa,S33_kPa,S12_kPa,S13_kPa,S23_kPa";

/// Stress of one probe at the end of one increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressRecord {
    /// 0-based.
    pub increment: usize,
    /// s
    pub time: f64,
    /// Load center, mm.
    pub load_x: f64,
    pub element: usize,
    /// kPa, order `[11, 22, 33, 12, 13, 23]`.
    pub stress: Voigt,
}

/// Records ordered by increment, then by probe in `probes` order.
#[derive(Debug, Clone, PartialEq)]
pub struct StressHistory {
    probes: Vec<usize>,
    records: Vec<StressRecord>,
}

impl StressHistory {
    pub fn new(probes: Vec<usize>, records: Vec<StressRecord>) -> Result<Self> {
        if probes.is_empty() {
            return Err(Error::invalid("stress history needs at least one probe"));
        }
        let np = probes.len();
        if records.len() % np != 0 {
            return Err(Error::invalid(format!(
                "{} records do not split into increments of {np} probes",
                records.len()
            )));
        }
        let mut prev: Option<(usize, f64)> = None;
        for chunk in records.chunks(np) {
            let (inc, time) = (chunk[0].increment, chunk[0].time);
            for (r, &p) in chunk.iter().zip(&probes) {
                if r.element != p || r.increment != inc || r.time != time {
                    return Err(Error::invalid(format!(
                        "history records of increment {inc} do not follow the probe order"
                    )));
                }
            }
            if let Some((pi, pt)) = prev {
                if inc <= pi || !(time > pt) {
                    return Err(Error::invalid(format!(
                        "history increments/times must strictly increase (increment {inc} at t = {time})"
                    )));
                }
            }
            prev = Some((inc, time));
        }
        Ok(StressHistory { probes, records })
    }

    pub fn probes(&self) -> &[usize] {
        &self.probes
    }

    pub fn records(&self) -> &[StressRecord] {
        &self.records
    }

    pub fn increment_count(&self) -> usize {
        self.records.len() / self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn for_probe(&self, element: usize) -> impl Iterator<Item = &StressRecord> {
        self.records.iter().filter(move |r| r.element == element)
    }

    /// History restricted to one probe.
    pub fn probe(&self, element: usize) -> Result<StressHistory> {
        if !self.probes.contains(&element) {
            return Err(Error::invalid(format!("element {element} is not a probe of this history")));
        }
        StressHistory::new(vec![element], self.for_probe(element).copied().collect())
    }

    /// Appends a later history over the same probes.
    pub fn concat(&self, later: &StressHistory) -> Result<StressHistory> {
        if self.probes != later.probes {
            return Err(Error::invalid("cannot concatenate histories with different probes"));
        }
        let mut records = self.records.clone();
        records.extend_from_slice(&later.records);
        StressHistory::new(self.probes.clone(), records)
    }
}

/// Passage envelope: signed maximum of S11 and maximum of |S12|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageSummary {
    /// kPa
    pub s11_peak: f64,
    pub s11_increment: usize,
    /// mm
    pub s11_load_x: f64,
    pub s11_element: usize,
    /// kPa, absolute value.
    pub s12_peak: f64,
    pub s12_increment: usize,
    pub s12_load_x: f64,
    pub s12_element: usize,
}

impl PassageSummary {
    /// Envelope of two envelopes; on ties `self` wins.
    pub fn merge(&self, other: &PassageSummary) -> PassageSummary {
        let mut out = *self;
        if other.s11_peak > self.s11_peak {
            out.s11_peak = other.s11_peak;
            out.s11_increment = other.s11_increment;
            out.s11_load_x = other.s11_load_x;
            out.s11_element = other.s11_element;
        }
        if other.s12_peak > self.s12_peak {
            out.s12_peak = other.s12_peak;
            out.s12_increment = other.s12_increment;
            out.s12_load_x = other.s12_load_x;
            out.s12_element = other.s12_element;
        }
        out
    }
}

/// Envelope over all records; the first record attaining a peak wins.
pub fn envelope(history: &StressHistory) -> Result<PassageSummary> {
    let first = history
        .records
        .first()
        .ok_or_else(|| Error::invalid("cannot take the envelope of an empty history"))?;
    let mut out = PassageSummary {
        s11_peak: first.stress[0],
        s11_increment: first.increment,
        s11_load_x: first.load_x,
        s11_element: first.element,
        s12_peak: first.stress[3].abs(),
        s12_increment: first.increment,
        s12_load_x: first.load_x,
        s12_element: first.element,
    };
    for r in &history.records[1..] {
        if r.stress[0] > out.s11_peak {
            out.s11_peak = r.stress[0];
            out.s11_increment = r.increment;
            out.s11_load_x = r.load_x;
            out.s11_element = r.element;
        }
        if r.stress[3].abs() > out.s12_peak {
            out.s12_peak = r.stress[3].abs();
            out.s12_increment = r.increment;
            out.s12_load_x = r.load_x;
            out.s12_element = r.element;
        }
    }
    Ok(out)
}

/// Formats like C's `%.6g`.
pub fn format_g6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (5 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn history_csv(history: &StressHistory) -> String {
    let mut out = String::with_capacity(64 * (history.records.len() + 1));
    out.push_str(HISTORY_HEADER);
    out.push('\n');
    for r in &history.records {
        let _ = write!(
            out,
            "{},{},{},{}",
            r.increment,
            format_g6(r.time),
            format_g6(r.load_x),
            r.element
        );
        for s in r.stress {
            out.push(',');
            out.push_str(&format_g6(s));
        }
        out.push('\n');
    }
    out
}

pub fn write_history_csv(history: &StressHistory, path: &Path) -> Result<()> {
    std::fs::write(path, history_csv(history)).map_err(|e| Error::io(path, e))
}

pub fn parse_history_csv(text: &str, source: &str) -> Result<StressHistory> {
    let perr = |line: usize, message: String| Error::Parse {
        file: source.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == HISTORY_HEADER => {}
        _ => return Err(perr(1, format!("expected header '{HISTORY_HEADER}'"))),
    }
    let mut records = Vec::new();
    let mut probes = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(perr(lineno, format!("expected 10 fields, found {}", fields.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| perr(lineno, format!("invalid integer '{s}'")));
        let num = |s: &str| s.parse::<f64>().map_err(|_| perr(lineno, format!("invalid number '{s}'")));
        let increment = int(fields[0])?;
        let element = int(fields[3])?;
        if records.first().is_none_or(|r: &StressRecord| r.increment == increment) {
            probes.push(element);
        }
        let mut stress = [0.0; 6];
        for c in 0..6 {
            stress[c] = num(fields[4 + c])?;
        }
        records.push(StressRecord {
            increment,
            time: num(fields[1])?,
            load_x: num(fields[2])?,
            element,
            stress,
        });
    }
    StressHistory::new(probes, records).map_err(|e| perr(0, e.to_string()))
}

pub fn read_history_csv(path: &Path) -> Result<StressHistory> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_history_csv(&text, &path.display().to_string())
}

/// Legacy ASCII VTK unstructured grid with nodal displacements (mm) and
/// cell stresses (kPa) plus the layer index of each cell.
pub fn vtk_string(mesh: &Mesh, state: Option<&SimState>) -> Result<String> {
    let nn = mesh.node_count();
    let ne = mesh.element_count();
    if let Some(s) = state {
        if s.displacement.len() != 3 * nn || s.stress.len() != ne {
            return Err(Error::invalid(format!(
                "state ({} dofs, {} elements) does not match the mesh ({} nodes, {ne} elements)",
                s.displacement.len(),
                s.stress.len(),
                nn
            )));
        }
    }
    let mut out = String::with_capacity(120 * (nn + ne));
    out.push_str("# vtk DataFile Version 3.0\npaverlay field export\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {nn} double");
    for p in mesh.nodes() {
        let _ = writeln!(out, "{:e} {:e} {:e}", p[0], p[1], p[2]);
    }
    let _ = writeln!(out, "CELLS {ne} {}", ne * 9);
    for conn in mesh.elements() {
        out.push('8');
        for n in conn {
            let _ = write!(out, " {n}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "CELL_TYPES {ne}");
    for _ in 0..ne {
        out.push_str("12\n");
    }
    let _ = writeln!(out, "POINT_DATA {nn}\nVECTORS displacement_mm double");
    for n in 0..nn {
        let u = state.map_or([0.0; 3], |s| {
            [s.displacement[3 * n], s.displacement[3 * n + 1], s.displacement[3 * n + 2]]
        });
        let _ = writeln!(out, "{:e} {:e} {:e}", u[0], u[1], u[2]);
    }
    let _ = writeln!(out, "CELL_DATA {ne}");
    for (c, name) in ["S11_kPa", "S22_kPa", "S33_kPa", "S12_kPa", "S13_kPa", "S23_kPa"]
        .iter()
        .enumerate()
    {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for e in 0..ne {
            let v = state.map_or(0.0, |s| s.stress[e][c] * crate::solver::MPA_TO_KPA);
            let _ = writeln!(out, "{v:e}");
        }
    }
    out.push_str("SCALARS layer int 1\nLOOKUP_TABLE default\n");
    for e in 0..ne {
        let _ = writeln!(out, "{}", mesh.element_layer(e));
    }
    Ok(out)
}

pub fn export_fields(mesh: &Mesh, state: Option<&SimState>, path: &Path) -> Result<()> {
    let text = vtk_string(mesh, state)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

//! Line-oriented materials library files.

use std::collections::BTreeMap;
use std::path::Path;

use super::{MaterialKind, MaterialRecord, MixtureMeta, PronySeries, PronyTerm, ShiftFactor};
use crate::error::{Error, Result};

/// Built-in library with illustrative (not measured) properties.
pub const PLACEHOLDER_LIBRARY: &str = include_str!("../../data/materials_placeholder.txt");

/// Named collection of material records, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaterialCatalog {
    records: Vec<MaterialRecord>,
    index: BTreeMap<String, usize>,
}

impl MaterialCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn placeholder() -> Self {
        parse_library(PLACEHOLDER_LIBRARY, "<builtin>").expect("built-in library parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_library(&text, &path.display().to_string())
    }

    pub fn insert(&mut self, record: MaterialRecord) -> Result<()> {
        record.validate()?;
        if self.index.contains_key(&record.name) {
            return Err(Error::invalid(format!("duplicate material '{}'", record.name)));
        }
        self.index.insert(record.name.clone(), self.records.len());
        self.records.push(record);
        Ok(())
    }

    /// Replaces (or adds) the record with the same name.
    pub fn upsert(&mut self, record: MaterialRecord) -> Result<()> {
        record.validate()?;
        match self.index.get(&record.name) {
            Some(&i) => self.records[i] = record,
            None => {
                self.index.insert(record.name.clone(), self.records.len());
                self.records.push(record);
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&MaterialRecord> {
        self.index.get(name).map(|&i| &self.records[i])
    }

    pub fn resolve(&self, name: &str) -> Result<&MaterialRecord> {
        self.get(name)
            .ok_or_else(|| Error::invalid(format!("material '{name}' not found in catalog")))
    }

    pub fn records(&self) -> &[MaterialRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Default)]
struct Draft {
    name: String,
    name_line: usize,
    kind: Option<MaterialKind>,
    youngs: Option<f64>,
    nu: Option<(f64, usize)>,
    a_t: Option<f64>,
    terms: Vec<PronyTerm>,
    last_prony_line: usize,
    binder: Option<String>,
    asphalt_content: Option<f64>,
}

/// Parses a materials library. Errors carry the offending line number.
pub fn parse_library(text: &str, source: &str) -> Result<MaterialCatalog> {
    let err = |line: usize, message: String| Error::Parse {
        file: source.to_string(),
        line,
        message,
    };
    let mut catalog = MaterialCatalog::new();
    let mut draft: Option<Draft> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(line_no, format!("expected `key = value`, got '{line}'")))?;

        if key == "name" {
            if let Some(d) = draft.take() {
                finish(d, &mut catalog, source)?;
            }
            if value.is_empty() {
                return Err(err(line_no, "empty material name".into()));
            }
            if catalog.get(value).is_some() {
                return Err(err(line_no, format!("duplicate material '{value}'")));
            }
            draft = Some(Draft {
                name: value.to_string(),
                name_line: line_no,
                ..Draft::default()
            });
            continue;
        }
        let d = draft
            .as_mut()
            .ok_or_else(|| err(line_no, format!("key '{key}' before any `name =` line")))?;
        let number = |v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(line_no, format!("{key}: '{v}' is not a finite number")))
        };
        match key {
            "kind" => {
                d.kind = Some(match value {
                    "elastic" => MaterialKind::Elastic,
                    "viscoelastic" => MaterialKind::Viscoelastic,
                    other => {
                        return Err(err(
                            line_no,
                            format!("kind must be 'elastic' or 'viscoelastic', got '{other}'"),
                        ))
                    }
                })
            }
            "E_inst_Pa" => {
                let e = number(value)?;
                if e <= 0.0 {
                    return Err(err(line_no, format!("E_inst_Pa must be > 0, got {e}")));
                }
                d.youngs = Some(e);
            }
            "nu" => {
                let nu = number(value)?;
                if !(nu > 0.0 && nu < 0.5) {
                    return Err(err(
                        line_no,
                        format!("nu must satisfy 0 < nu < 0.5, got {nu}"),
                    ));
                }
                d.nu = Some((nu, line_no));
            }
            "aT" => {
                let a = number(value)?;
                if a <= 0.0 {
                    return Err(err(line_no, format!("aT must be > 0, got {a}")));
                }
                d.a_t = Some(a);
            }
            "prony" => {
                let (w, tau) = value
                    .split_once(',')
                    .ok_or_else(|| err(line_no, "prony expects `<g_i>, <tau_i_s>`".into()))?;
                let w = number(w.trim())?;
                let tau = number(tau.trim())?;
                if w <= 0.0 {
                    return Err(err(line_no, format!("prony weight must be > 0, got {w}")));
                }
                if tau <= 0.0 {
                    return Err(err(line_no, format!("prony relaxation time must be > 0, got {tau}")));
                }
                if let Some(prev) = d.terms.last() {
                    if tau <= prev.relaxation_time {
                        return Err(err(
                            line_no,
                            format!(
                                "prony relaxation times must be strictly increasing ({tau} after {})",
                                prev.relaxation_time
                            ),
                        ));
                    }
                }
                let sum: f64 = d.terms.iter().map(|t| t.weight).sum::<f64>() + w;
                if sum >= 1.0 {
                    return Err(err(
                        line_no,
                        format!("sum of prony weights must be < 1, reaches {sum}"),
                    ));
                }
                d.terms.push(PronyTerm {
                    weight: w,
                    relaxation_time: tau,
                });
                d.last_prony_line = line_no;
            }
            "binder" => d.binder = Some(value.to_string()),
            "asphalt_content_pct" => {
                let pct = number(value)?;
                if !(0.0..=100.0).contains(&pct) {
                    return Err(err(line_no, format!("asphalt_content_pct out of range: {pct}")));
                }
                d.asphalt_content = Some(pct);
            }
            other => return Err(err(line_no, format!("unknown key '{other}'"))),
        }
    }
    if let Some(d) = draft.take() {
        finish(d, &mut catalog, source)?;
    }
    Ok(catalog)
}

fn finish(d: Draft, catalog: &mut MaterialCatalog, source: &str) -> Result<()> {
    let err = |line: usize, message: String| Error::Parse {
        file: source.to_string(),
        line,
        message: format!("material '{}': {message}", d.name),
    };
    let kind = d.kind.ok_or_else(|| err(d.name_line, "missing `kind`".into()))?;
    let youngs = d.youngs.ok_or_else(|| err(d.name_line, "missing `E_inst_Pa`".into()))?;
    let (nu, nu_line) = d.nu.ok_or_else(|| err(d.name_line, "missing `nu`".into()))?;
    let shift = ShiftFactor::new(d.a_t.unwrap_or(1.0)).map_err(|e| err(d.name_line, e.to_string()))?;
    let (g0, _) = super::elastic_moduli(youngs, nu).map_err(|e| err(nu_line, e.to_string()))?;
    let shear_prony = match kind {
        MaterialKind::Viscoelastic => {
            if d.terms.is_empty() {
                return Err(err(
                    d.name_line,
                    "viscoelastic kind requires at least one `prony` line".into(),
                ));
            }
            Some(PronySeries::new(g0, d.terms).map_err(|e| err(d.last_prony_line, e.to_string()))?)
        }
        MaterialKind::Elastic => {
            if !d.terms.is_empty() {
                return Err(err(d.last_prony_line, "elastic kind takes no `prony` lines".into()));
            }
            None
        }
    };
    let mixture_meta = match (d.binder, d.asphalt_content) {
        (Some(binder), Some(asphalt_content_pct)) => Some(MixtureMeta {
            binder,
            asphalt_content_pct,
        }),
        (None, None) => None,
        _ => {
            return Err(err(
                d.name_line,
                "`binder` and `asphalt_content_pct` must be given together".into(),
            ))
        }
    };
    let record = MaterialRecord {
        name: d.name,
        kind,
        youngs_modulus: youngs,
        poissons_ratio: nu,
        shear_prony,
        shift,
        mixture_meta,
    };
    catalog.insert(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(e: Error) -> usize {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn placeholder_catalog_has_all_layers() {
        let c = MaterialCatalog::placeholder();
        for name in ["DG", "PM", "SB", "PCC", "SUBBASE", "SUBGRADE"] {
            assert!(c.get(name).is_some(), "{name}");
        }
        let dg = c.get("DG").unwrap();
        assert_eq!(dg.kind, MaterialKind::Viscoelastic);
        assert_eq!(dg.term_count(), 5);
        assert_eq!(dg.poissons_ratio, 0.35);
        let meta = dg.mixture_meta.as_ref().unwrap();
        assert_eq!(meta.binder, "SBS PG-22");
        assert_eq!(meta.asphalt_content_pct, 5.4);
        assert_eq!(c.get("PM").unwrap().mixture_meta.as_ref().unwrap().asphalt_content_pct, 4.5);
        assert_eq!(c.get("SB").unwrap().mixture_meta.as_ref().unwrap().binder, "PG 64-22");
    }

    #[test]
    fn rejects_bad_nu_with_line() {
        let text = "name = A\nkind = elastic\nE_inst_Pa = 1e9\nnu = 0.6\n";
        let e = parse_library(text, "t").unwrap_err();
        assert!(e.to_string().contains("0 < nu < 0.5"), "{e}");
        assert_eq!(line_of(e), 4);
    }

    #[test]
    fn rejects_weight_sum_at_offending_line() {
        let text = "name = A\nkind = viscoelastic\nE_inst_Pa = 1e9\nnu = 0.3\n\
                    prony = 0.5, 0.1\nprony = 0.5, 1.0\n";
        assert_eq!(line_of(parse_library(text, "t").unwrap_err()), 6);
    }

    #[test]
    fn rejects_non_increasing_tau() {
        let text = "name = A\nkind = viscoelastic\nE_inst_Pa = 1e9\nnu = 0.3\n\
                    prony = 0.1, 1.0\n# comment\nprony = 0.1, 0.5\n";
        assert_eq!(line_of(parse_library(text, "t").unwrap_err()), 7);
    }

    #[test]
    fn viscoelastic_requires_prony() {
        let text = "\nname = A\nkind = viscoelastic\nE_inst_Pa = 1e9\nnu = 0.3\n";
        assert_eq!(line_of(parse_library(text, "t").unwrap_err()), 2);
    }

    #[test]
    fn rejects_unknown_keys_and_orphans() {
        assert_eq!(line_of(parse_library("name = A\ncolour = red\n", "t").unwrap_err()), 2);
        assert_eq!(line_of(parse_library("nu = 0.3\n", "t").unwrap_err()), 1);
        assert_eq!(line_of(parse_library("name = A\nnu 0.3\n", "t").unwrap_err()), 2);
    }

    #[test]
    fn rejects_duplicates() {
        let rec = "kind = elastic\nE_inst_Pa = 1e9\nnu = 0.3\n";
        let text = format!("name = A\n{rec}name = A\n{rec}");
        assert_eq!(line_of(parse_library(&text, "t").unwrap_err()), 5);
    }

    #[test]
    fn shear_modulus_derived_from_young() {
        let text = "name = A\nkind = viscoelastic\nE_inst_Pa = 2.7e9\nnu = 0.35\naT = 2\nprony = 0.5, 1\n";
        let c = parse_library(text, "t").unwrap();
        let a = c.get("A").unwrap();
        let g0 = a.shear_prony.as_ref().unwrap().instantaneous_modulus();
        assert!((g0 - 1.0e9).abs() < 1e-3);
        assert_eq!(a.shift.value(), 2.0);
    }
}

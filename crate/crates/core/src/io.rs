//! State files, grid exports, and JSON reports.
//!
//! The canonical interchange format for states is JSON
//! (`{"d": 3, "amplitudes": [[re, im], ...]}`); plain-text files with one
//! "re im" pair per line are accepted for ingesting published coefficient
//! lists. Grids export as CSV, JSON, or (for the nonnegative Husimi density
//! only) 8-bit P2 PGM with a linear intensity scale between the grid
//! maximum and zero. Discrete grids use centered coordinates
//! `-(d-1)/2 <= a <= (d-1)/2`; continuous grids use `[0, 1)` coordinates.
//! All exports are deterministic byte streams for fixed inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bargmann::{Constellation, HusimiGrid};
use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::localization::{HaarEstimate, Histogram, SicReport};
use crate::op::PureState;
use crate::reps::{ChordGrid, WignerGrid};
use crate::search::{SearchConfig, SearchResult};
use crate::zauner::{ClassicalHGrid, CycleSet, LabeledEigenbasis, Sector};
use crate::VERSION;

/// Maximum tolerated deviation of a loaded state's norm from 1 before the
/// exact renormalization step.
const LOAD_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    d: usize,
    amplitudes: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    version: Option<String>,
}

/// Loads a state from JSON or from plain text with one "re im" pair per
/// line (dimension inferred from the line count). The parsed amplitudes
/// must be normalized to within `1e-6`; they are then renormalized exactly
/// and phase-canonicalized.
pub fn load_state(path: impl AsRef<Path>) -> Result<PureState> {
    let text = fs::read_to_string(path)?;
    parse_state(&text)
}

/// Parses state file content (JSON or plain text).
pub fn parse_state(text: &str) -> Result<PureState> {
    let trimmed = text.trim_start();
    let (d, amps) = if trimmed.starts_with('{') {
        let file: StateFile =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        let amps: Vec<C64> = file.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        if amps.len() != file.d {
            return Err(Error::DimensionMismatch {
                expected: file.d,
                got: amps.len(),
            });
        }
        (Dim::new(file.d)?, amps)
    } else {
        let mut amps = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected \"re im\", got {line:?}",
                    lineno + 1
                )));
            }
            let re: f64 = fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let im: f64 = fields[1]
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            amps.push(C64::new(re, im));
        }
        (Dim::new(amps.len())?, amps)
    };
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > LOAD_NORM_TOL {
        return Err(Error::NotNormalizable((norm - 1.0).abs()));
    }
    PureState::normalized(d, amps)
}

/// Saves a state as canonical JSON (phase-canonicalized amplitudes).
pub fn save_state(state: &PureState, path: impl AsRef<Path>, label: Option<&str>) -> Result<()> {
    fs::write(path, state_to_json(state, label)?)?;
    Ok(())
}

pub fn state_to_json(state: &PureState, label: Option<&str>) -> Result<String> {
    let canonical = state.canonicalized();
    let file = StateFile {
        d: canonical.dim().get(),
        amplitudes: canonical.amps().iter().map(|z| [z.re, z.im]).collect(),
        label: label.map(str::to_owned),
        source: None,
        version: Some(VERSION.to_owned()),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// A grid ready for export.
pub enum GridData<'a> {
    Chord(&'a ChordGrid),
    Wigner(&'a WignerGrid),
    Husimi(&'a HusimiGrid),
    ClassicalH(&'a ClassicalHGrid),
}

impl GridData<'_> {
    fn kind(&self) -> &'static str {
        match self {
            GridData::Chord(_) => "chord",
            GridData::Wigner(_) => "wigner",
            GridData::Husimi(_) => "husimi",
            GridData::ClassicalH(_) => "classical_h",
        }
    }
}

/// Export formats for grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridFormat {
    Csv,
    Json,
    Pgm,
}

impl GridFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(GridFormat::Csv),
            "json" => Ok(GridFormat::Json),
            "pgm" => Ok(GridFormat::Pgm),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

/// Serializes a grid in the requested format. PGM is valid only for the
/// nonnegative Husimi grids.
pub fn grid_to_string(grid: &GridData<'_>, format: GridFormat) -> Result<String> {
    match format {
        GridFormat::Csv => Ok(grid_to_csv(grid)),
        GridFormat::Json => grid_to_json(grid),
        GridFormat::Pgm => match grid {
            GridData::Husimi(h) => Ok(husimi_to_pgm(h)),
            other => Err(Error::UnsupportedFormat {
                format: "pgm",
                kind: other.kind(),
            }),
        },
    }
}

/// Writes a grid to a file.
pub fn export_grid(grid: &GridData<'_>, format: GridFormat, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, grid_to_string(grid, format)?)?;
    Ok(())
}

fn centered_range(d: Dim) -> impl Iterator<Item = i64> {
    -d.centered_max()..=d.centered_max()
}

fn grid_to_csv(grid: &GridData<'_>) -> String {
    let mut out = String::new();
    match grid {
        GridData::Chord(g) => {
            out.push_str("a1,a2,re,im\n");
            let d = g.dim();
            for a1 in centered_range(d) {
                for a2 in centered_range(d) {
                    let v = g.get(crate::dim::PhasePoint::new(d, a1, a2));
                    let _ = writeln!(out, "{a1},{a2},{},{}", v.re, v.im);
                }
            }
        }
        GridData::Wigner(g) => {
            out.push_str("x1,x2,w\n");
            let d = g.dim();
            for x1 in centered_range(d) {
                for x2 in centered_range(d) {
                    let v = g.get(crate::dim::PhasePoint::new(d, x1, x2));
                    let _ = writeln!(out, "{x1},{x2},{v}");
                }
            }
        }
        GridData::Husimi(g) => {
            out.push_str("q,p,h\n");
            let n = g.resolution();
            for iq in 0..n {
                for ip in 0..n {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        iq as f64 / n as f64,
                        ip as f64 / n as f64,
                        g.get(iq, ip)
                    );
                }
            }
        }
        GridData::ClassicalH(g) => {
            out.push_str("q,p,h\n");
            let n = g.n;
            for i in 0..n {
                for j in 0..n {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        i as f64 / n as f64,
                        j as f64 / n as f64,
                        g.values[i * n + j]
                    );
                }
            }
        }
    }
    out
}

fn grid_to_json(grid: &GridData<'_>) -> Result<String> {
    #[derive(Serialize)]
    struct GridFile {
        kind: &'static str,
        version: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
        resolution: usize,
        rows: Vec<Vec<f64>>,
    }
    let (d, resolution, rows): (Option<usize>, usize, Vec<Vec<f64>>) = match grid {
        GridData::Chord(g) => {
            let dim = g.dim();
            let mut rows = Vec::new();
            for a1 in centered_range(dim) {
                for a2 in centered_range(dim) {
                    let v = g.get(crate::dim::PhasePoint::new(dim, a1, a2));
                    rows.push(vec![a1 as f64, a2 as f64, v.re, v.im]);
                }
            }
            (Some(dim.get()), dim.get(), rows)
        }
        GridData::Wigner(g) => {
            let dim = g.dim();
            let mut rows = Vec::new();
            for x1 in centered_range(dim) {
                for x2 in centered_range(dim) {
                    rows.push(vec![
                        x1 as f64,
                        x2 as f64,
                        g.get(crate::dim::PhasePoint::new(dim, x1, x2)),
                    ]);
                }
            }
            (Some(dim.get()), dim.get(), rows)
        }
        GridData::Husimi(g) => {
            let n = g.resolution();
            let mut rows = Vec::new();
            for iq in 0..n {
                for ip in 0..n {
                    rows.push(vec![iq as f64 / n as f64, ip as f64 / n as f64, g.get(iq, ip)]);
                }
            }
            (Some(g.dim().get()), n, rows)
        }
        GridData::ClassicalH(g) => {
            let n = g.n;
            let mut rows = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    rows.push(vec![
                        i as f64 / n as f64,
                        j as f64 / n as f64,
                        g.values[i * n + j],
                    ]);
                }
            }
            (None, n, rows)
        }
    };
    Ok(serde_json::to_string_pretty(&GridFile {
        kind: grid.kind(),
        version: VERSION,
        d,
        resolution,
        rows,
    })?)
}

/// 8-bit P2 PGM, linear intensity between the grid maximum (255) and zero
/// (0). Rows run over `p` from high to low so the origin sits at the lower
/// left, columns over `q`.
fn husimi_to_pgm(grid: &HusimiGrid) -> String {
    let n = grid.resolution();
    let max = grid.max();
    let mut out = format!("P2\n{n} {n}\n255\n");
    for ip in (0..n).rev() {
        let mut row = String::new();
        for iq in 0..n {
            let v = if max > 0.0 {
                (grid.get(iq, ip) / max * 255.0).round() as u32
            } else {
                0
            };
            if iq > 0 {
                row.push(' ');
            }
            let _ = write!(row, "{}", v.min(255));
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Constellation export: the zero list plus the centroid residual.
pub fn constellation_to_json(c: &Constellation) -> Result<String> {
    #[derive(Serialize)]
    struct File {
        version: &'static str,
        d: usize,
        zeros: Vec<[f64; 2]>,
        centroid_residual: f64,
    }
    Ok(serde_json::to_string_pretty(&File {
        version: VERSION,
        d: c.dim().get(),
        zeros: c.zeros().iter().map(|z| [z.re, z.im]).collect(),
        centroid_residual: c.centroid_residual(),
    })?)
}

/// CycleSet export: fixed points, cycles (centered coordinates), per-region
/// counts, and the closed-form values for cross-checking.
pub fn cycles_to_json(cycles: &CycleSet) -> Result<String> {
    #[derive(Serialize)]
    struct Formulas {
        n0: usize,
        n_plus: usize,
        n_minus: usize,
        independent_phases: usize,
    }
    #[derive(Serialize)]
    struct File {
        version: &'static str,
        d: usize,
        fixed_points: Vec<[i64; 2]>,
        cycles: Vec<Vec<[i64; 2]>>,
        n0: usize,
        n_plus: usize,
        n_minus: usize,
        independent_phases: usize,
        formulas: Formulas,
    }
    let d = cycles.dim();
    let ctr = |p: crate::dim::PhasePoint| -> [i64; 2] {
        let (a, b) = p.centered(d);
        [a, b]
    };
    Ok(serde_json::to_string_pretty(&File {
        version: VERSION,
        d: d.get(),
        fixed_points: cycles.fixed_points().iter().map(|&p| ctr(p)).collect(),
        cycles: cycles
            .cycles()
            .iter()
            .map(|c| c.iter().map(|&p| ctr(p)).collect())
            .collect(),
        n0: cycles.cycle_count(0),
        n_plus: cycles.cycle_count(1),
        n_minus: cycles.cycle_count(-1),
        independent_phases: cycles.independent_phases(),
        formulas: Formulas {
            n0: crate::zauner::cycle_count_formula(d, 0),
            n_plus: crate::zauner::cycle_count_formula(d, 1),
            n_minus: crate::zauner::cycle_count_formula(d, -1),
            independent_phases: crate::zauner::independent_phase_formula(d),
        },
    })?)
}

/// Eigenbasis export: the `(i, eps_i, r, k)` table.
pub fn eigenbasis_to_json(basis: &LabeledEigenbasis) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        i: usize,
        eps: f64,
        r: i8,
        k: u8,
        k_signed: i8,
    }
    #[derive(Serialize)]
    struct File {
        version: &'static str,
        d: usize,
        entries: Vec<Row>,
    }
    Ok(serde_json::to_string_pretty(&File {
        version: VERSION,
        d: basis.dim().get(),
        entries: basis
            .entries()
            .iter()
            .map(|e| Row {
                i: e.index,
                eps: e.eps,
                r: e.r,
                k: e.k,
                k_signed: e.k_signed(),
            })
            .collect(),
    })?)
}

/// Expansion export: coefficients against a labeled eigenbasis.
pub fn expansion_to_json(
    basis: &LabeledEigenbasis,
    coeffs: &crate::zauner::ExpansionCoeffs,
) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        i: usize,
        eps: f64,
        r: i8,
        k: u8,
        re: f64,
        im: f64,
        abs: f64,
    }
    #[derive(Serialize)]
    struct File {
        version: &'static str,
        d: usize,
        sector: serde_json::Value,
        coefficients: Vec<Row>,
    }
    let sector = match coeffs.sector() {
        Sector::Pure(k) => serde_json::json!(k),
        Sector::Mixed => serde_json::json!("mixed"),
    };
    Ok(serde_json::to_string_pretty(&File {
        version: VERSION,
        d: basis.dim().get(),
        sector,
        coefficients: coeffs
            .coeffs()
            .iter()
            .zip(basis.entries())
            .map(|(a, e)| Row {
                i: e.index,
                eps: e.eps,
                r: e.r,
                k: e.k,
                re: a.re,
                im: a.im,
                abs: a.norm(),
            })
            .collect(),
    })?)
}

pub fn sic_report_to_json(report: &SicReport) -> Result<String> {
    #[derive(Serialize)]
    struct File<'a> {
        version: &'static str,
        #[serde(flatten)]
        report: &'a SicReport,
    }
    Ok(serde_json::to_string_pretty(&File {
        version: VERSION,
        report,
    })?)
}

pub fn haar_estimate_to_json(est: &HaarEstimate) -> Result<String> {
    #[derive(Serialize)]
    struct File<'a> {
        version: &'static str,
        #[serde(flatten)]
        estimate: &'a HaarEstimate,
    }
    Ok(serde_json::to_string_pretty(&File {
        version: VERSION,
        estimate: est,
    })?)
}

/// Histogram CSV: `bin_lo,bin_hi,count` rows.
pub fn histogram_to_csv(hist: &Histogram) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (lo, hi, count) in hist.edges() {
        let _ = writeln!(out, "{lo},{hi},{count}");
    }
    out
}

pub fn search_result_to_json(config: &SearchConfig, result: &SearchResult) -> Result<String> {
    #[derive(Serialize)]
    struct File<'a> {
        version: &'static str,
        config: &'a SearchConfig,
        m_value: f64,
        gap: f64,
        converged: bool,
        restart_index: usize,
        iterations: usize,
        seed: u64,
        optimizer: &'static str,
        rng_algorithm: &'static str,
        state: Vec<[f64; 2]>,
    }
    let canonical = result.best_state.canonicalized();
    Ok(serde_json::to_string_pretty(&File {
        version: VERSION,
        config,
        m_value: result.m_value,
        gap: result.gap,
        converged: result.converged,
        restart_index: result.restart_index,
        iterations: result.iterations,
        seed: result.seed,
        optimizer: result.optimizer,
        rng_algorithm: result.rng_algorithm,
        state: canonical.amps().iter().map(|z| [z.re, z.im]).collect(),
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bargmann::husimi_grid;
    use crate::reps::{chord_of_state, wigner_of_state};

    fn d3_fiducial_json() -> &'static str {
        r#"{"d":3,"amplitudes":[[0,0],[0.7071067811865475,0],[-0.7071067811865475,0]]}"#
    }

    #[test]
    fn parse_json_state() {
        let state = parse_state(d3_fiducial_json()).unwrap();
        assert_eq!(state.dim().get(), 3);
        let report = crate::localization::verify_sic(&state, 1e-10);
        assert!(report.pass);
    }

    #[test]
    fn parse_text_state() {
        let text = "0.1 0\n0.2 0\n0.3 0\n0.4 0\n0.5 0\n0.6 0.0\n0.3 0\n";
        let state = parse_state(text).unwrap();
        assert_eq!(state.dim().get(), 7);
    }

    #[test]
    fn parse_rejects_bad_norm() {
        let text = "0.5 0\n0.5 0\n0.0 0\n";
        assert!(matches!(parse_state(text), Err(Error::NotNormalizable(_))));
    }

    #[test]
    fn parse_rejects_dimension_mismatch() {
        let text = r#"{"d":4,"amplitudes":[[1,0],[0,0],[0,0]]}"#;
        assert!(matches!(
            parse_state(text),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(parse_state("not a number"), Err(Error::Parse(_))));
    }

    #[test]
    fn save_load_round_trip() {
        let state = parse_state(d3_fiducial_json()).unwrap();
        let tmp = std::env::temp_dir().join("sicps_io_roundtrip_test.json");
        save_state(&state, &tmp, Some("fid3")).unwrap();
        let back = load_state(&tmp).unwrap();
        std::fs::remove_file(&tmp).ok();
        for i in 0..3 {
            assert!((state.amp(i) - back.amp(i)).norm() < 1e-15);
        }
    }

    #[test]
    fn wigner_csv_shape() {
        let d = Dim::new(5).unwrap();
        let grid = wigner_of_state(&PureState::basis_state(d, 0));
        let csv = grid_to_csv(&GridData::Wigner(&grid));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x1,x2,w");
        assert_eq!(lines.len(), 26); // header + 25 rows
        assert!(lines[1].starts_with("-2,-2,"));
        assert!(lines[25].starts_with("2,2,"));
    }

    #[test]
    fn chord_csv_has_both_parts() {
        let d = Dim::new(3).unwrap();
        let grid = chord_of_state(&PureState::basis_state(d, 0));
        let csv = grid_to_csv(&GridData::Chord(&grid));
        assert!(csv.starts_with("a1,a2,re,im\n"));
        assert_eq!(csv.lines().count(), 10);
    }

    #[test]
    fn husimi_pgm_valid() {
        let d = Dim::new(5).unwrap();
        let state = PureState::basis_state(d, 0);
        let grid = husimi_grid(&state, 24).unwrap();
        let pgm = husimi_to_pgm(&grid);
        let mut lines = pgm.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("24 24"));
        assert_eq!(lines.next(), Some("255"));
        let pixels: Vec<u32> = lines
            .flat_map(|l| l.split(' '))
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(pixels.len(), 24 * 24);
        assert_eq!(pixels.iter().copied().max(), Some(255));
    }

    #[test]
    fn pgm_rejected_for_signed_grids() {
        let d = Dim::new(3).unwrap();
        let wigner = wigner_of_state(&PureState::basis_state(d, 0));
        assert!(matches!(
            grid_to_string(&GridData::Wigner(&wigner), GridFormat::Pgm),
            Err(Error::UnsupportedFormat { .. })
        ));
        let chord = chord_of_state(&PureState::basis_state(d, 0));
        assert!(matches!(
            grid_to_string(&GridData::Chord(&chord), GridFormat::Pgm),
            Err(Error::UnsupportedFormat { .. })
        ));
    }

    #[test]
    fn exports_are_deterministic() {
        let d = Dim::new(5).unwrap();
        let state = PureState::basis_state(d, 2);
        let grid = wigner_of_state(&state);
        let a = grid_to_string(&GridData::Wigner(&grid), GridFormat::Csv).unwrap();
        let b = grid_to_string(&GridData::Wigner(&grid), GridFormat::Csv).unwrap();
        assert_eq!(a, b);
        let ja = grid_to_string(&GridData::Wigner(&grid), GridFormat::Json).unwrap();
        let jb = grid_to_string(&GridData::Wigner(&grid), GridFormat::Json).unwrap();
        assert_eq!(ja, jb);
        assert!(ja.contains("\"version\""));
    }
}

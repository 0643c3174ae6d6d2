//! Plain-text file formats for fixtures: occupation-number states,
//! scattering tables, and projector sets.
//!
//! All three formats are line-oriented: `#` starts a comment, blank lines
//! are ignored, tokens are whitespace-separated. Complex numbers are two
//! floats `re im`.
//!
//! Occupation-number state fixture:
//!
//! ```text
//! space <single_particle_dim> <max_total>
//! accessible [<mode> ...]
//! term <n_0> ... <n_{dim-1}> <re> <im>
//! ```
//!
//! Scattering table (row indices 0..3 in input order
//! `(v 0), (v 1), (h 0), (h 1)`; each row is a list of
//! `<qubit_out> <label> <re> <im>` quadruples):
//!
//! ```text
//! process <name>
//! row <index> <qubit_out> <label> <re> <im> [...]
//! ```
//!
//! Projector set (each `projector` keyword is followed by `dim` lines of
//! `dim` complex entries):
//!
//! ```text
//! dim <d>
//! projector
//! <re> <im>  ... (d pairs)
//! ...
//! ```

use num_complex::Complex;
use thiserror::Error;

use crate::cascade::ProjectorSet;
use crate::fock::{AccessibilityPartition, FockSpace, FockStateVector};
use crate::linalg::CMatrix;
use crate::scattering::{ProcessEntry, ScatteringProcess};

/// Parse failure with the 1-based source line.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = stripped.split_whitespace().collect();
        if tokens.is_empty() {
            None
        } else {
            Some((i + 1, tokens))
        }
    })
}

fn parse_num<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T, ParseError> {
    token.parse().map_err(|_| ParseError {
        line,
        message: format!("cannot parse {what} from '{token}'"),
    })
}

/// Parses an occupation-number state fixture.
pub fn parse_fock_fixture(text: &str) -> Result<FockStateVector<f64>, ParseError> {
    let mut space: Option<(usize, u32)> = None;
    let mut accessible: Option<Vec<usize>> = None;
    let mut state: Option<FockStateVector<f64>> = None;

    for (line, tokens) in content_lines(text) {
        match tokens[0] {
            "space" => {
                if space.is_some() {
                    return fail(line, "duplicate 'space' line");
                }
                if tokens.len() != 3 {
                    return fail(line, "expected: space <single_particle_dim> <max_total>");
                }
                let dim: usize = parse_num(tokens[1], line, "single_particle_dim")?;
                let max_total: u32 = parse_num(tokens[2], line, "max_total")?;
                if dim == 0 {
                    return fail(line, "single_particle_dim must be at least 1");
                }
                space = Some((dim, max_total));
            }
            "accessible" => {
                if accessible.is_some() {
                    return fail(line, "duplicate 'accessible' line");
                }
                let modes = tokens[1..]
                    .iter()
                    .map(|t| parse_num::<usize>(t, line, "mode index"))
                    .collect::<Result<Vec<_>, _>>()?;
                accessible = Some(modes);
            }
            "term" => {
                let state = match (&mut state, space, &accessible) {
                    (Some(s), _, _) => s,
                    (none, Some((dim, max_total)), Some(acc)) => {
                        let partition = AccessibilityPartition::new(dim, acc.iter().copied())
                            .map_err(|e| ParseError {
                                line,
                                message: e.to_string(),
                            })?;
                        *none = Some(FockStateVector::new(FockSpace::new(partition, max_total)));
                        none.as_mut().expect("just set")
                    }
                    _ => return fail(line, "'term' must come after 'space' and 'accessible'"),
                };
                let dim = state.space().single_particle_dim();
                if tokens.len() != 1 + dim + 2 {
                    return fail(
                        line,
                        format!("expected {dim} occupations followed by re im"),
                    );
                }
                let occupations = tokens[1..1 + dim]
                    .iter()
                    .map(|t| parse_num::<u32>(t, line, "occupation"))
                    .collect::<Result<Vec<_>, _>>()?;
                let re: f64 = parse_num(tokens[1 + dim], line, "real part")?;
                let im: f64 = parse_num(tokens[2 + dim], line, "imaginary part")?;
                state
                    .add_amplitude(&occupations, Complex::new(re, im))
                    .map_err(|e| ParseError {
                        line,
                        message: e.to_string(),
                    })?;
            }
            other => return fail(line, format!("unknown keyword '{other}'")),
        }
    }

    match (state, space, accessible) {
        (Some(s), _, _) => Ok(s),
        (None, Some((dim, max_total)), Some(acc)) => {
            let partition = AccessibilityPartition::new(dim, acc).map_err(|e| ParseError {
                line: 0,
                message: e.to_string(),
            })?;
            Ok(FockStateVector::new(FockSpace::new(partition, max_total)))
        }
        _ => fail(0, "fixture needs 'space' and 'accessible' lines"),
    }
}

/// Renders an occupation-number state in the fixture format.
pub fn format_fock_fixture(state: &FockStateVector<f64>) -> String {
    let space = state.space();
    let mut out = String::new();
    out.push_str(&format!(
        "space {} {}\n",
        space.single_particle_dim(),
        space.max_total()
    ));
    let modes: Vec<String> = space
        .partition()
        .accessible_modes()
        .iter()
        .map(|m| m.to_string())
        .collect();
    out.push_str(&format!("accessible {}\n", modes.join(" ")));
    for (index, amplitude) in state.terms() {
        let occ: Vec<String> = index.occupations().iter().map(|n| n.to_string()).collect();
        out.push_str(&format!(
            "term {} {:e} {:e}\n",
            occ.join(" "),
            amplitude.re,
            amplitude.im
        ));
    }
    out
}

/// Parses a scattering table; the result is unitarity-validated.
pub fn parse_process_table(text: &str) -> Result<ScatteringProcess<f64>, ParseError> {
    let mut name: Option<String> = None;
    let mut rows: [Option<(usize, Vec<ProcessEntry<f64>>)>; 4] = [None, None, None, None];

    for (line, tokens) in content_lines(text) {
        match tokens[0] {
            "process" => {
                if name.is_some() {
                    return fail(line, "duplicate 'process' line");
                }
                if tokens.len() != 2 {
                    return fail(line, "expected: process <name>");
                }
                name = Some(tokens[1].to_string());
            }
            "row" => {
                if tokens.len() < 2 {
                    return fail(line, "expected: row <index> <entries...>");
                }
                let index: usize = parse_num(tokens[1], line, "row index")?;
                if index > 3 {
                    return fail(line, "row index must be 0..=3");
                }
                if rows[index].is_some() {
                    return fail(line, format!("duplicate row {index}"));
                }
                let payload = &tokens[2..];
                if payload.is_empty() || payload.len() % 4 != 0 {
                    return fail(
                        line,
                        "row entries must be quadruples: <qubit_out> <label> <re> <im>",
                    );
                }
                let mut entries = Vec::with_capacity(payload.len() / 4);
                for chunk in payload.chunks(4) {
                    let qubit_out: u8 = parse_num(chunk[0], line, "qubit_out")?;
                    if qubit_out > 1 {
                        return fail(line, "qubit_out must be 0 or 1");
                    }
                    let label: u32 = parse_num(chunk[1], line, "radiation label")?;
                    let re: f64 = parse_num(chunk[2], line, "real part")?;
                    let im: f64 = parse_num(chunk[3], line, "imaginary part")?;
                    entries.push(ProcessEntry {
                        qubit_out,
                        radiation_label: label,
                        amplitude: Complex::new(re, im),
                    });
                }
                rows[index] = Some((line, entries));
            }
            other => return fail(line, format!("unknown keyword '{other}'")),
        }
    }

    let name = name.unwrap_or_else(|| "custom".to_string());
    let mut table: [Vec<ProcessEntry<f64>>; 4] = [vec![], vec![], vec![], vec![]];
    for (index, slot) in rows.into_iter().enumerate() {
        match slot {
            Some((_, entries)) => table[index] = entries,
            None => return fail(0, format!("missing row {index}")),
        }
    }
    ScatteringProcess::new(name, table).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })
}

/// Renders a scattering table in the file format.
pub fn format_process_table(process: &ScatteringProcess<f64>) -> String {
    let mut out = format!("process {}\n", process.name());
    for (index, row) in process.rows().iter().enumerate() {
        out.push_str(&format!("row {index}"));
        for entry in row {
            out.push_str(&format!(
                " {} {} {:e} {:e}",
                entry.qubit_out, entry.radiation_label, entry.amplitude.re, entry.amplitude.im
            ));
        }
        out.push('\n');
    }
    out
}

/// Parses a projector set. Hermiticity and positive semidefiniteness are
/// checked here; idempotency and commutation diagnostics come from
/// [`ProjectorSet::validate`].
pub fn parse_projector_set(text: &str) -> Result<ProjectorSet<f64>, ParseError> {
    let mut dim: Option<usize> = None;
    let mut matrices: Vec<CMatrix<f64>> = Vec::new();
    let mut current: Option<(usize, Vec<Complex<f64>>)> = None;

    let close = |current: &mut Option<(usize, Vec<Complex<f64>>)>,
                 matrices: &mut Vec<CMatrix<f64>>,
                 dim: usize|
     -> Result<(), ParseError> {
        if let Some((line, entries)) = current.take() {
            if entries.len() != dim * dim {
                return fail(
                    line,
                    format!(
                        "projector has {} entries, expected {}",
                        entries.len(),
                        dim * dim
                    ),
                );
            }
            matrices.push(CMatrix::from_vec(dim, entries));
        }
        Ok(())
    };

    for (line, tokens) in content_lines(text) {
        match tokens[0] {
            "dim" => {
                if dim.is_some() {
                    return fail(line, "duplicate 'dim' line");
                }
                if tokens.len() != 2 {
                    return fail(line, "expected: dim <d>");
                }
                let d: usize = parse_num(tokens[1], line, "dimension")?;
                if d == 0 {
                    return fail(line, "dimension must be at least 1");
                }
                dim = Some(d);
            }
            "projector" => {
                let Some(d) = dim else {
                    return fail(line, "'projector' must come after 'dim'");
                };
                close(&mut current, &mut matrices, d)?;
                current = Some((line, Vec::with_capacity(d * d)));
            }
            _ => {
                let Some((_, entries)) = current.as_mut() else {
                    return fail(line, "matrix entries must follow a 'projector' line");
                };
                if tokens.len() % 2 != 0 {
                    return fail(line, "matrix rows must hold re/im pairs");
                }
                for pair in tokens.chunks(2) {
                    let re: f64 = parse_num(pair[0], line, "real part")?;
                    let im: f64 = parse_num(pair[1], line, "imaginary part")?;
                    entries.push(Complex::new(re, im));
                }
            }
        }
    }

    let Some(d) = dim else {
        return fail(0, "projector set needs a 'dim' line");
    };
    close(&mut current, &mut matrices, d)?;
    ProjectorSet::new(d, matrices).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })
}

/// Renders a projector set in the file format.
pub fn format_projector_set(set: &ProjectorSet<f64>) -> String {
    let mut out = format!("dim {}\n", set.dim());
    for n in 0..set.len() {
        out.push_str("projector\n");
        let m = set.projector(n).matrix();
        for i in 0..set.dim() {
            let row: Vec<String> = (0..set.dim())
                .map(|j| format!("{:e} {:e}", m[(i, j)].re, m[(i, j)].im))
                .collect();
            out.push_str(&row.join("  "));
            out.push('\n');
        }
    }
    out
}

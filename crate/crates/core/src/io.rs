//! JSON state files.
//!
//! Every file is an object with a `"type"` tag:
//!
//! ```json
//! {"type": "DensityMatrix", "dim": 2, "re": [[0.5, 0], [0, 0.5]], "im": [[0, 0], [0, 0]]}
//! {"type": "CQState", "outcomes": [{"label": "0", "state": {"dim": 1, "re": [[0.5]]}}, ...]}
//! {"type": "Wavefunction", "q0": -10.0, "dq": 0.01, "d": 1, "re": [[...], ...], "im": [[...], ...]}
//! ```
//!
//! `im` may be omitted for real data. Wavefunction `re`/`im` hold one row of
//! `d` memory amplitudes per grid point. Readers validate the decoded object
//! and reject it with the name of the first violated invariant.

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, C64};
use crate::qstate::{CqState, DensityMatrix, GridWaveFunction};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

#[derive(Debug, Clone)]
pub enum State {
    Density(DensityMatrix),
    Cq(CqState),
    Wave(GridWaveFunction),
}

impl State {
    pub fn type_tag(&self) -> &'static str {
        match self {
            State::Density(_) => "DensityMatrix",
            State::Cq(_) => "CQState",
            State::Wave(_) => "Wavefunction",
        }
    }
}

/// A decoded state with any non-fatal remarks about it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub state: State,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    dim: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomeFile {
    label: String,
    state: MatrixFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CqFile {
    outcomes: Vec<OutcomeFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaveFile {
    q0: f64,
    dq: f64,
    d: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

pub fn load_state(path: impl AsRef<Path>) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)?;
    parse_state(&text)
}

pub fn parse_state(text: &str) -> Result<Loaded> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Parse("state file must be a JSON object".into()))?;
    let tag = match obj.remove("type") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(Error::Parse("field \"type\" must be a string".into())),
        None => return Err(Error::Parse("missing field \"type\"".into())),
    };
    let mut warnings = Vec::new();
    let state = match tag.as_str() {
        "DensityMatrix" => State::Density(DensityMatrix::new(matrix(decode(value)?)?)?),
        "CQState" => {
            let file: CqFile = decode(value)?;
            let outcomes = file
                .outcomes
                .into_iter()
                .map(|o| Ok((o.label, matrix(o.state)?)))
                .collect::<Result<Vec<_>>>()?;
            State::Cq(CqState::new(outcomes)?)
        }
        "Wavefunction" => {
            let file: WaveFile = decode(value)?;
            let n = file.re.len();
            if !n.is_power_of_two() {
                warnings.push(format!(
                    "grid has N = {n} points, not a power of two; momentum transforms zero-pad to {}",
                    n.next_power_of_two()
                ));
            }
            let samples = table(&file.re, file.im.as_deref(), n, file.d, "wavefunction")?;
            State::Wave(GridWaveFunction::new(file.q0, file.dq, samples)?)
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown type tag {other:?} (expected DensityMatrix, CQState or Wavefunction)"
            )))
        }
    };
    Ok(Loaded { state, warnings })
}

fn decode<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))
}

fn matrix(file: MatrixFile) -> Result<CMatrix> {
    table(&file.re, file.im.as_deref(), file.dim, file.dim, "matrix")
}

fn table(re: &[Vec<f64>], im: Option<&[Vec<f64>]>, rows: usize, cols: usize, what: &str) -> Result<DMatrix<C64>> {
    let shape_ok = |t: &[Vec<f64>]| t.len() == rows && t.iter().all(|r| r.len() == cols);
    if !shape_ok(re) || im.is_some_and(|t| !shape_ok(t)) {
        return Err(Error::Parse(format!("{what} entries must form a {rows}x{cols} table")));
    }
    if re.iter().chain(im.unwrap_or_default()).flatten().any(|x| !x.is_finite()) {
        return Err(Error::Parse(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| c(re[i][j], im.map_or(0.0, |t| t[i][j]))))
}

fn split(m: &DMatrix<C64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let part = |f: fn(&C64) -> f64| m.row_iter().map(|r| r.iter().map(f).collect()).collect();
    (part(|z| z.re), part(|z| z.im))
}

fn matrix_file(m: &CMatrix) -> MatrixFile {
    let (re, im) = split(m);
    MatrixFile {
        dim: m.nrows(),
        re,
        im: Some(im),
    }
}

/// Inverse of [`parse_state`].
pub fn to_json(state: &State) -> Value {
    let body = match state {
        State::Density(rho) => serde_json::to_value(matrix_file(rho.matrix())),
        State::Cq(cq) => serde_json::to_value(CqFile {
            outcomes: cq
                .outcomes()
                .iter()
                .map(|(label, op)| OutcomeFile {
                    label: label.clone(),
                    state: matrix_file(op),
                })
                .collect(),
        }),
        State::Wave(wf) => {
            let (re, im) = split(wf.samples());
            serde_json::to_value(WaveFile {
                q0: wf.q0,
                dq: wf.dq,
                d: wf.memory_dim(),
                re,
                im: Some(im),
            })
        }
    };
    let mut body = body.expect("state files serialize to plain JSON");
    body.as_object_mut()
        .expect("state files are objects")
        .insert("type".into(), Value::String(state.type_tag().into()));
    body
}

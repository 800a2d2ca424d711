//! State files (JSON), point clouds and tables (CSV), atomic output.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::SectorCoordinates;
use crate::quantum::{DensityMatrix, Matrix8, PureState, C64, DIM};
use crate::zoo::State;

/// Value of the `ordering` header field: qubit A is the most significant bit.
pub const ORDERING: &str = "ABC-msb";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StateMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
}

/// Amplitudes or matrix entries as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateBody {
    Pure { amplitudes: Vec<[f64; 2]> },
    Density { matrix: Vec<Vec<[f64; 2]>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub ordering: String,
    #[serde(flatten)]
    pub body: StateBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<StateMetadata>,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex([re, im]: [f64; 2]) -> C64 {
    C64::new(re, im)
}

impl StateFile {
    pub fn from_pure(psi: &PureState, metadata: Option<StateMetadata>) -> Self {
        Self {
            ordering: ORDERING.into(),
            body: StateBody::Pure {
                amplitudes: psi.amplitudes().iter().map(|&z| pair(z)).collect(),
            },
            metadata,
        }
    }

    pub fn from_density(rho: &DensityMatrix, metadata: Option<StateMetadata>) -> Self {
        let m = rho.matrix();
        Self {
            ordering: ORDERING.into(),
            body: StateBody::Density {
                matrix: (0..DIM)
                    .map(|i| (0..DIM).map(|j| pair(m[(i, j)])).collect())
                    .collect(),
            },
            metadata,
        }
    }

    pub fn from_state(state: &State, metadata: Option<StateMetadata>) -> Self {
        match state {
            State::Pure(p) => Self::from_pure(p, metadata),
            State::Mixed(m) => Self::from_density(m, metadata),
        }
    }

    /// Parses the JSON text; shape problems are [`Error::Parse`].
    pub fn parse(text: &str) -> Result<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.ordering != ORDERING {
            return Err(Error::Parse(format!(
                "unsupported ordering {:?}, expected {ORDERING:?}",
                file.ordering
            )));
        }
        match &file.body {
            StateBody::Pure { amplitudes } if amplitudes.len() != DIM => {
                return Err(Error::Parse(format!(
                    "expected {DIM} amplitudes, got {}",
                    amplitudes.len()
                )))
            }
            StateBody::Density { matrix }
                if matrix.len() != DIM || matrix.iter().any(|r| r.len() != DIM) =>
            {
                return Err(Error::Parse(format!("density matrix must be {DIM}×{DIM}")))
            }
            _ => {}
        }
        Ok(file)
    }

    /// The validated state; unphysical content is [`Error::InvalidState`].
    pub fn state(&self) -> Result<State> {
        match &self.body {
            StateBody::Pure { amplitudes } => {
                let mut a = [C64::new(0.0, 0.0); DIM];
                for (z, p) in a.iter_mut().zip(amplitudes) {
                    *z = complex(*p);
                }
                Ok(State::Pure(PureState::new(a)?))
            }
            StateBody::Density { matrix } => {
                let m = Matrix8::from_fn(|i, j| complex(matrix[i][j]));
                Ok(State::Mixed(DensityMatrix::new(m)?))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files serialize")
    }
}

/// Reads and validates a state file.
pub fn read_state_file(path: &Path) -> Result<(State, StateFile)> {
    let text = fs::read_to_string(path)?;
    let file = StateFile::parse(&text)?;
    Ok((file.state()?, file))
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Twelve significant digits in scientific notation; `NaN` marks missing values.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

pub fn parse_float(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
}

/// A header and rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| Ok(rec?.iter().map(String::from).collect()))
            .collect::<Result<Vec<Vec<String>>>>()?;
        Ok(Self { header, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_csv()?)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

const COORD_COLUMNS: [&str; 7] = ["s1A", "s1B", "s1C", "s2AB", "s2BC", "s2CA", "s3"];

/// One row of a point cloud. Rows with fewer parameters leave the trailing
/// cells blank; infeasible coordinates and slacks are `NaN`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRow {
    pub generator: String,
    pub params: Vec<f64>,
    pub coords: [f64; 7],
    pub slacks: Vec<f64>,
}

impl PointRow {
    pub fn new(
        generator: impl Into<String>,
        params: Vec<f64>,
        coords: Option<&SectorCoordinates>,
        slacks: Vec<f64>,
    ) -> Self {
        Self {
            generator: generator.into(),
            params,
            coords: coords.map_or([f64::NAN; 7], |c| c.as_array()),
            slacks,
        }
    }
}

/// `generator, param1..paramK, s1A..s3, slack_<criterion>...`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub criteria: Vec<String>,
    pub rows: Vec<PointRow>,
}

impl PointCloud {
    fn param_count(&self) -> usize {
        self.rows.iter().map(|r| r.params.len()).max().unwrap_or(0)
    }

    pub fn to_table(&self) -> Table {
        let k = self.param_count();
        let mut header = vec!["generator".to_string()];
        header.extend((1..=k).map(|i| format!("param{i}")));
        header.extend(COORD_COLUMNS.iter().map(|s| s.to_string()));
        header.extend(self.criteria.iter().map(|c| format!("slack_{c}")));
        let mut t = Table::new(header);
        for r in &self.rows {
            let mut row = vec![r.generator.clone()];
            row.extend((0..k).map(|i| r.params.get(i).map_or(String::new(), |&p| format_float(p))));
            row.extend(r.coords.iter().map(|&x| format_float(x)));
            row.extend(r.slacks.iter().map(|&x| format_float(x)));
            t.push(row);
        }
        t
    }

    pub fn from_table(t: &Table) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("point cloud: {m}"));
        if t.header.first().map(String::as_str) != Some("generator") {
            return Err(bad("first column must be `generator`"));
        }
        let k = t.header.iter().filter(|h| h.starts_with("param")).count();
        let coord_start = 1 + k;
        if t.header
            .get(coord_start..coord_start + 7)
            .is_none_or(|h| h != COORD_COLUMNS)
        {
            return Err(bad("missing coordinate columns"));
        }
        let criteria = t.header[coord_start + 7..]
            .iter()
            .map(|h| {
                h.strip_prefix("slack_")
                    .map(String::from)
                    .ok_or_else(|| bad(&format!("unexpected column {h:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = t
            .rows
            .iter()
            .map(|r| {
                let params = r[1..coord_start]
                    .iter()
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_float(s))
                    .collect::<Result<Vec<_>>>()?;
                let mut coords = [0.0; 7];
                for (c, s) in coords.iter_mut().zip(&r[coord_start..coord_start + 7]) {
                    *c = parse_float(s)?;
                }
                let slacks = r[coord_start + 7..]
                    .iter()
                    .map(|s| parse_float(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(PointRow {
                    generator: r[0].clone(),
                    params,
                    coords,
                    slacks,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { criteria, rows })
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        self.to_table().to_csv()
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        Self::from_table(&Table::from_csv(reader)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_csv()?)
    }
}

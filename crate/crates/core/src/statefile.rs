//! Plain-text state files.
//!
//! ```text
//! l_a = 1.0891e23
//! anchors_a = 1.0891e23,-1.0891e23
//! half_width_a = 6
//! l_b = 1.0891e23
//! anchors_b = 1.0891e23,-1.0891e23
//! half_width_b = 6
//! format = vector
//! rows = 338
//! cols = 1
//! data:
//! 0.7071,0 0,0 ...
//! ```
//!
//! The header describes one single-shell window per sphere. After `data:`
//! come `rows` lines of `cols` whitespace-separated `re,im` pairs in
//! row-major order. Lines starting with `#` are comments.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::amspace::{BasisWindow, DensityMatrix, StateVector, TruncatedProductBasis};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// How one sphere's window is described in the header.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    pub l: f64,
    pub anchors: Vec<f64>,
    pub half_width: u32,
}

impl WindowSpec {
    pub fn build(&self) -> Result<BasisWindow> {
        BasisWindow::new(self.l, &self.anchors, self.half_width)
    }

    pub fn of(w: &BasisWindow) -> Result<Self> {
        if w.shells() != (0..=0) {
            return Err(Error::Domain("state files hold single-shell windows only".into()));
        }
        Ok(WindowSpec { l: w.l_ref(), anchors: w.segments().iter().map(|s| s.anchor).collect(), half_width: w.half_width() })
    }
}

#[derive(Debug, Clone)]
pub enum StateData {
    Vector(StateVector),
    Density(DensityMatrix),
}

impl StateData {
    pub fn density(&self) -> DensityMatrix {
        match self {
            StateData::Vector(v) => v.density(),
            StateData::Density(d) => d.clone(),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            StateData::Vector(_) => "vector",
            StateData::Density(_) => "density",
        }
    }

    fn matrix(&self) -> CMatrix {
        match self {
            StateData::Vector(v) => CMatrix::from_column_slice(v.amplitudes.len(), 1, v.amplitudes.as_slice()),
            StateData::Density(d) => d.matrix.clone(),
        }
    }
}

/// A state together with the windows it lives on.
#[derive(Debug, Clone)]
pub struct StateFile {
    pub window_a: WindowSpec,
    pub window_b: WindowSpec,
    pub data: StateData,
}

impl StateFile {
    pub fn new(basis: &TruncatedProductBasis, data: StateData) -> Result<Self> {
        let dims = match &data {
            StateData::Vector(v) => v.dims,
            StateData::Density(d) => d.dims,
        };
        if dims != basis.dims() {
            return Err(Error::Dimension { expected: basis.dim(), found: dims.0 * dims.1 });
        }
        Ok(StateFile { window_a: WindowSpec::of(&basis.a)?, window_b: WindowSpec::of(&basis.b)?, data })
    }

    pub fn basis(&self) -> Result<TruncatedProductBasis> {
        Ok(TruncatedProductBasis::new(self.window_a.build()?, self.window_b.build()?))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|a| format!("{a:e}")).collect::<Vec<_>>().join(",")
}

impl std::fmt::Display for StateFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (suffix, w) in [("a", &self.window_a), ("b", &self.window_b)] {
            writeln!(f, "l_{suffix} = {:e}", w.l)?;
            writeln!(f, "anchors_{suffix} = {}", join(&w.anchors))?;
            writeln!(f, "half_width_{suffix} = {}", w.half_width)?;
        }
        let m = self.data.matrix();
        writeln!(f, "format = {}", self.data.label())?;
        writeln!(f, "rows = {}", m.nrows())?;
        writeln!(f, "cols = {}", m.ncols())?;
        writeln!(f, "data:")?;
        let mut line = String::new();
        for i in 0..m.nrows() {
            line.clear();
            for j in 0..m.ncols() {
                if j > 0 {
                    line.push(' ');
                }
                let z = m[(i, j)];
                let _ = write!(line, "{:e},{:e}", z.re, z.im);
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_num<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| parse_err(format!("state file: bad value for '{key}': '{raw}'")))
}

fn parse_pair(token: &str) -> Result<C64> {
    let (re, im) = token.split_once(',').ok_or_else(|| parse_err(format!("state file: expected re,im, got '{token}'")))?;
    Ok(C64::new(parse_num("re", re)?, parse_num("im", im)?))
}

impl FromStr for StateFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let mut header = std::collections::BTreeMap::new();
        loop {
            let (_, line) = lines.next().ok_or_else(|| parse_err("state file: missing 'data:' line"))?;
            if line.trim() == "data:" {
                break;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| parse_err(format!("state file: expected key = value, got '{line}'")))?;
            header.insert(k.trim().to_string(), v.trim().to_string());
        }
        const KEYS: [&str; 9] = ["l_a", "anchors_a", "half_width_a", "l_b", "anchors_b", "half_width_b", "format", "rows", "cols"];
        if let Some(k) = header.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(parse_err(format!("state file: unknown key '{k}'")));
        }
        let get = |k: &str| header.get(k).ok_or_else(|| parse_err(format!("state file: missing key '{k}'")));
        let window = |s: &str| -> Result<WindowSpec> {
            let anchors =
                get(&format!("anchors_{s}"))?.split(',').map(|a| parse_num(&format!("anchors_{s}"), a)).collect::<Result<Vec<f64>>>()?;
            Ok(WindowSpec {
                l: parse_num(&format!("l_{s}"), get(&format!("l_{s}"))?)?,
                anchors,
                half_width: parse_num(&format!("half_width_{s}"), get(&format!("half_width_{s}"))?)?,
            })
        };
        let (window_a, window_b) = (window("a")?, window("b")?);
        let rows: usize = parse_num("rows", get("rows")?)?;
        let cols: usize = parse_num("cols", get("cols")?)?;

        let mut values = Vec::with_capacity(rows * cols);
        let mut seen_rows = 0;
        for (lineno, line) in lines {
            let row = line.split_whitespace().map(parse_pair).collect::<Result<Vec<_>>>()?;
            if row.len() != cols {
                return Err(parse_err(format!("state file line {}: expected {cols} entries, found {}", lineno + 1, row.len())));
            }
            values.extend(row);
            seen_rows += 1;
        }
        if seen_rows != rows {
            return Err(parse_err(format!("state file: expected {rows} data rows, found {seen_rows}")));
        }

        let basis = TruncatedProductBasis::new(window_a.build()?, window_b.build()?);
        let n = basis.dim();
        let data = match get("format")?.as_str() {
            "vector" => {
                if cols != 1 || rows != n {
                    return Err(Error::Dimension { expected: n, found: rows });
                }
                StateData::Vector(StateVector::new(basis.dims(), CVector::from_vec(values))?)
            }
            "density" => {
                if rows != n || cols != n {
                    return Err(Error::Dimension { expected: n, found: rows });
                }
                StateData::Density(DensityMatrix::new(basis.dims(), CMatrix::from_row_slice(rows, cols, &values))?)
            }
            other => return Err(parse_err(format!("state file: format must be vector or density, got '{other}'"))),
        };
        Ok(StateFile { window_a, window_b, data })
    }
}

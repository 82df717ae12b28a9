//! JSON files for spaces, measures, actions and certificates, and the
//! versioned CSV writer shared by every command.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use eqgh_core::action::{ActionMode, FiniteAction};
use eqgh_core::group::{GeneratedGroup, GroupKind};
use eqgh_core::metric::{FiniteMetricSpace, MetricSpace, PointMap};
use eqgh_core::wasserstein::DiscreteMeasure;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SPACE_SCHEMA: &str = "eqgh.space/1";
pub const MEASURE_SCHEMA: &str = "eqgh.measure/1";
pub const ACTION_SCHEMA: &str = "eqgh.action/1";

/// Environment variable naming the scenario directory.
pub const DATA_DIR_ENV: &str = "EQGH_DATA_DIR";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: expected schema {expected}, found {found}")]
    Schema { path: PathBuf, expected: String, found: String },
    #[error(transparent)]
    Core(#[from] eqgh_core::Error),
}

pub type IoResult<T> = Result<T, IoError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    #[serde(default = "space_schema")]
    pub schema: String,
    pub points: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

fn space_schema() -> String {
    SPACE_SCHEMA.into()
}

fn measure_schema() -> String {
    MEASURE_SCHEMA.into()
}

fn action_schema() -> String {
    ACTION_SCHEMA.into()
}

impl SpaceFile {
    pub fn from_space<M: MetricSpace + ?Sized>(space: &M) -> Self {
        let n = space.len();
        SpaceFile {
            schema: SPACE_SCHEMA.into(),
            points: (0..n).map(|i| format!("p{i}")).collect(),
            dist: (0..n).map(|i| (0..n).map(|j| space.dist(i, j)).collect()).collect(),
        }
    }

    pub fn to_space(&self) -> eqgh_core::Result<FiniteMetricSpace> {
        FiniteMetricSpace::new(self.points.clone(), self.dist.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    #[serde(default = "measure_schema")]
    pub schema: String,
    /// Id of the space the weights live on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    pub weights: Vec<f64>,
}

impl MeasureFile {
    pub fn from_measure(mu: &DiscreteMeasure) -> Self {
        MeasureFile { schema: MEASURE_SCHEMA.into(), space: None, weights: mu.weights().to_vec() }
    }

    pub fn to_measure(&self) -> eqgh_core::Result<DiscreteMeasure> {
        DiscreteMeasure::new(self.weights.clone())
    }
}

/// An action stored by generator images keyed by generator name; the space
/// is referenced by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionFile {
    #[serde(default = "action_schema")]
    pub schema: String,
    pub id: String,
    pub space: String,
    pub group: GroupKind,
    pub mode: ActionMode,
    pub generators: BTreeMap<String, Vec<usize>>,
}

impl ActionFile {
    pub fn from_action<S: MetricSpace>(id: &str, space_id: &str, action: &FiniteAction<S>) -> Self {
        let names = action.group().generator_names();
        ActionFile {
            schema: ACTION_SCHEMA.into(),
            id: id.into(),
            space: space_id.into(),
            group: action.group().kind(),
            mode: action.mode(),
            generators: names.iter().cloned().zip(action.generator_maps().iter().map(|m| m.image().to_vec())).collect(),
        }
    }

    /// Generators are matched to the group's default names when those are
    /// the keys, otherwise taken in key order.
    pub fn to_action<S: MetricSpace>(&self, space: S) -> eqgh_core::Result<FiniteAction<S>> {
        let default = GeneratedGroup::new(self.group)?;
        let group = if default.generator_names().iter().all(|n| self.generators.contains_key(n)) {
            default
        } else {
            GeneratedGroup::with_names(self.group, self.generators.keys().cloned().collect())?
        };
        let n = space.len();
        let gens = group
            .generator_names()
            .iter()
            .map(|name| PointMap::new(n, n, self.generators[name].clone()))
            .collect::<eqgh_core::Result<Vec<_>>>()?;
        FiniteAction::new(group, space, gens, self.mode)
    }
}

fn check_schema(path: &Path, expected: &str, found: &str) -> IoResult<()> {
    if found != expected {
        return Err(IoError::Schema { path: path.into(), expected: expected.into(), found: found.into() });
    }
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> IoResult<T> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json { path: path.into(), source })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> IoResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| IoError::File { path: dir.into(), source })?;
    }
    let text = to_json(value);
    fs::write(path, text).map_err(|source| IoError::File { path: path.into(), source })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

pub fn read_space(path: &Path) -> IoResult<FiniteMetricSpace> {
    let f: SpaceFile = read_json(path)?;
    check_schema(path, SPACE_SCHEMA, &f.schema)?;
    Ok(f.to_space()?)
}

pub fn read_measure(path: &Path) -> IoResult<DiscreteMeasure> {
    let f: MeasureFile = read_json(path)?;
    check_schema(path, MEASURE_SCHEMA, &f.schema)?;
    Ok(f.to_measure()?)
}

pub fn read_action(path: &Path, space: FiniteMetricSpace) -> IoResult<FiniteAction<FiniteMetricSpace>> {
    let f: ActionFile = read_json(path)?;
    check_schema(path, ACTION_SCHEMA, &f.schema)?;
    Ok(f.to_action(space)?)
}

/// Comma-separated table with a `# eqgh.<kind> v1` first line and a header
/// row. Floats use Rust's shortest round-trip form, so output is stable.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    kind: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(kind: &str, header: &[&str]) -> Self {
        Csv { kind: kind.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# eqgh.{} v1", self.kind).unwrap();
        writeln!(out, "{}", self.header.join(",")).unwrap();
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| quote(c)).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn write(&self, path: &Path) -> IoResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|source| IoError::File { path: dir.into(), source })?;
        }
        fs::write(path, self.render()).map_err(|source| IoError::File { path: path.into(), source })
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Float cell: shortest representation that parses back exactly.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut c = Csv::new("demo", &["a", "b"]);
        c.push(vec![num(0.1), "x,y".into()]);
        assert_eq!(c.render(), "# eqgh.demo v1\na,b\n0.1,\"x,y\"\n");
    }

    #[test]
    fn space_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = FiniteMetricSpace::line(&[0.0, 1.5, 4.0]).unwrap();
        let path = dir.path().join("s.json");
        write_json(&path, &SpaceFile::from_space(&s)).unwrap();
        let back = read_space(&path).unwrap();
        assert_eq!(back.matrix(), s.matrix());
    }

    #[test]
    fn action_round_trip() {
        let s = FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap();
        let a = FiniteAction::new(
            GeneratedGroup::z2(),
            s.clone(),
            vec![PointMap::new(3, 3, vec![1, 2, 0]).unwrap(), PointMap::identity(3)],
            ActionMode::Group,
        )
        .unwrap();
        let f = ActionFile::from_action("alpha", "X", &a);
        let text = to_json(&f);
        assert!(text.contains("\"kind\": \"z2\""));
        let back: ActionFile = serde_json::from_str(&text).unwrap();
        let b = back.to_action(s).unwrap();
        assert_eq!(b.generator_maps(), a.generator_maps());
        assert_eq!(b.group(), a.group());
    }

    #[test]
    fn plain_space_object_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        std::fs::write(&path, r#"{"points": ["a", "b"], "dist": [[0, 2], [2, 0]]}"#).unwrap();
        assert_eq!(read_space(&path).unwrap().dist(0, 1), 2.0);
    }

    #[test]
    fn schema_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        write_json(&path, &MeasureFile { schema: "other".into(), space: None, weights: vec![1.0] }).unwrap();
        assert!(matches!(read_measure(&path), Err(IoError::Schema { .. })));
    }
}
